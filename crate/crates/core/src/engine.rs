//! Premise tests and weighted enumeration of the j-element subsets of a sample.
//!
//! A ufg-premise is a set A with A ⊊ γ(A) whose closure is not covered by the closures
//! of its maximal proper subsets. [`count_tuples`] sums, for each cardinality j, the
//! weight of all j-sets of distinct sample objects that are premises (b_j) and, for each
//! query, of those premises whose closure contains it (a_j).
//!
//! Premises are decided on the full product ground space: for mixed data that is
//! ℝ² × V × ℝ, not the subset of covariate combinations that can occur.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::closures::{
    ClosureDescriptor, CodedObject, Element, Escape, HierPrefixClosure, NominalClosure,
    ProductClosure,
};
use crate::context::FormalContext;
use crate::error::{input, Result, UfgError};
use crate::geometry::{cover_rule, intervals_cover, CoverRule, Point2};
use crate::rational::{common_denominator, int, Rational};
use crate::sample::Sample;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PremiseVerdict {
    pub is_premise: bool,
    /// An element of γ(A) outside every γ(A∖{a}), when the family can produce one.
    pub witness: Option<Element>,
    /// For products: the component through which each element of A escapes, in A order.
    pub assignment: Option<Vec<usize>>,
}

impl PremiseVerdict {
    fn no() -> Self {
        PremiseVerdict {
            is_premise: false,
            witness: None,
            assignment: None,
        }
    }
}

/// (C1) and (C2) for a set A of pairwise distinct elements.
pub fn is_premise(desc: &ClosureDescriptor, a: &[Element]) -> Result<PremiseVerdict> {
    if a.is_empty() {
        return input("premise test needs a nonempty set");
    }
    for g in a {
        desc.validate(g)?;
    }
    let distinct: BTreeSet<&Element> = a.iter().collect();
    if distinct.len() != a.len() {
        return input("premise test needs pairwise distinct elements");
    }
    if !desc.closure_size(a)?.exceeds(a.len()) {
        return Ok(PremiseVerdict::no());
    }
    let all: Vec<usize> = (0..a.len()).collect();
    Ok(match desc.escape(a, &all)? {
        Escape::Covered => PremiseVerdict::no(),
        Escape::Escapes { witness, assignment } => PremiseVerdict {
            is_premise: true,
            witness,
            assignment,
        },
    })
}

/// Premise test on a finite context by object ids.
pub fn is_premise_finite<S: AsRef<str>>(ctx: &FormalContext, a: &[S]) -> Result<PremiseVerdict> {
    if a.is_empty() {
        return input("premise test needs a nonempty set");
    }
    let set = ctx.object_set(a)?;
    let idx: Vec<usize> = set.ones().collect();
    let closed = ctx.close(&set);
    if closed.count_ones(..) == idx.len() {
        return Ok(PremiseVerdict::no());
    }
    let all: Vec<usize> = (0..idx.len()).collect();
    let diff = crate::closures::finite_escape_set(ctx, &idx, &all);
    Ok(match diff.ones().next() {
        Some(b) => PremiseVerdict {
            is_premise: true,
            witness: Some(Element::Object(b)),
            assignment: None,
        },
        None => PremiseVerdict::no(),
    })
}

/// Premise test for mixed (location, category, value) triples under `desc`, which must
/// be a product of the plane, a nominal and an interordinal component in that order.
pub fn is_premise_mixed(desc: &ClosureDescriptor, a: &[Element]) -> Result<PremiseVerdict> {
    let Some(p) = desc.downcast::<ProductClosure>() else {
        return input("mixed premise test needs a product descriptor");
    };
    let names: Vec<&str> = p.components().iter().map(|c| c.name()).collect();
    if names != ["convex2d", "nominal", "interordinal"] {
        return input("mixed premise test needs the plane × nominal × interordinal product");
    }
    if a.len() > 4 {
        return input(format!(
            "mixed premises have at most 4 elements, got a set of {}",
            a.len()
        ));
    }
    check_unique_locations(a)?;
    is_premise(desc, a)
}

/// Premise test for coded objects.
pub fn is_premise_hier(h: &HierPrefixClosure, a: &[CodedObject]) -> Result<PremiseVerdict> {
    let desc = ClosureDescriptor::hier(h.clone());
    let elems: Vec<Element> = a.iter().cloned().map(Element::Coded).collect();
    is_premise(&desc, &elems)
}

/// Two distinct mixed elements may not share a location.
fn check_unique_locations(a: &[Element]) -> Result<()> {
    let mut seen: HashMap<&Point2, &Element> = HashMap::new();
    for g in a {
        let Element::Tuple(xs) = g else { continue };
        let Some(Element::Point(p)) = xs.first() else {
            continue;
        };
        if let Some(prev) = seen.insert(p, g) {
            if prev != g {
                return input(format!(
                    "location ({}, {}) carries conflicting covariates",
                    p.x, p.y
                ));
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------

/// Per-cardinality weighted premise counts. Index `j - 1` holds cardinality j.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TupleCounts {
    pub j_max: usize,
    pub b: Vec<Rational>,
    /// `a[q][j - 1]` for query q.
    pub a: Vec<Vec<Rational>>,
    /// Number of premise sets per cardinality, among objects of positive weight.
    pub premise_sets: Vec<u64>,
    pub counter: String,
    pub notes: Vec<String>,
}

impl TupleCounts {
    fn zero(j_max: usize, nq: usize, counter: &str) -> Self {
        TupleCounts {
            j_max,
            b: vec![Rational::zero(); j_max],
            a: vec![vec![Rational::zero(); j_max]; nq],
            premise_sets: vec![0; j_max],
            counter: counter.to_string(),
            notes: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct CountOptions {
    /// Defaults to the descriptor's premise bound.
    pub j_max: Option<usize>,
    /// 0 uses the ambient thread pool.
    pub workers: usize,
    /// Counter name; `None` picks the first registered counter that applies.
    pub counter: Option<String>,
    /// Largest number of distinct objects accepted when j_max ≥ 4; defaults to
    /// [`DEFAULT_N_CAP`].
    pub n_cap: Option<usize>,
}

pub const DEFAULT_N_CAP: usize = 300;

/// Strategy for computing [`TupleCounts`]. All counters produce identical results on
/// the inputs they accept.
pub trait TupleCounter: Send + Sync {
    fn name(&self) -> &'static str;

    fn supports(&self, desc: &ClosureDescriptor, j_max: usize) -> bool;

    /// `objects` are distinct elements with positive weights.
    fn count(
        &self,
        objects: &[(Element, Rational)],
        queries: &[Element],
        desc: &ClosureDescriptor,
        j_max: usize,
    ) -> Result<TupleCounts>;
}

pub struct CounterRegistry {
    counters: Vec<Box<dyn TupleCounter>>,
}

impl fmt::Debug for CounterRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.names()).finish()
    }
}

impl Default for CounterRegistry {
    fn default() -> Self {
        CounterRegistry {
            counters: vec![
                Box::new(PlanarCounter),
                Box::new(HierFrequencyCounter),
                Box::new(GenericCounter),
            ],
        }
    }
}

impl CounterRegistry {
    pub fn register(&mut self, c: Box<dyn TupleCounter>) {
        self.counters.insert(0, c);
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.counters.iter().map(|c| c.name()).collect()
    }

    pub fn get(&self, name: &str) -> Option<&dyn TupleCounter> {
        self.counters.iter().find(|c| c.name() == name).map(|c| &**c)
    }

    pub fn select(&self, name: Option<&str>, desc: &ClosureDescriptor, j_max: usize) -> Result<&dyn TupleCounter> {
        match name {
            Some(n) => {
                let c = self.get(n).ok_or_else(|| {
                    UfgError::Config(format!("unknown counter {n:?}; known: {}", self.names().join(", ")))
                })?;
                if !c.supports(desc, j_max) {
                    return Err(UfgError::Config(format!(
                        "counter {n:?} does not apply to a {} descriptor with j_max {j_max}",
                        desc.name()
                    )));
                }
                Ok(c)
            }
            None => self
                .counters
                .iter()
                .find(|c| c.supports(desc, j_max))
                .map(|c| &**c)
                .ok_or_else(|| UfgError::Unsupported(format!("no counter for {}", desc.name()))),
        }
    }
}

pub fn count_tuples(
    sample: &Sample,
    queries: &[Element],
    desc: &ClosureDescriptor,
    j_max: usize,
) -> Result<TupleCounts> {
    count_tuples_with(
        sample,
        queries,
        desc,
        &CountOptions {
            j_max: Some(j_max),
            ..CountOptions::default()
        },
    )
}

pub fn count_tuples_with(
    sample: &Sample,
    queries: &[Element],
    desc: &ClosureDescriptor,
    opts: &CountOptions,
) -> Result<TupleCounts> {
    count_tuples_in(&CounterRegistry::default(), sample, queries, desc, opts)
}

pub fn count_tuples_in(
    registry: &CounterRegistry,
    sample: &Sample,
    queries: &[Element],
    desc: &ClosureDescriptor,
    opts: &CountOptions,
) -> Result<TupleCounts> {
    if sample.is_empty() {
        return input("empty sample");
    }
    let bound = desc.max_premise_bound()?;
    let j_max = opts.j_max.unwrap_or(bound);
    if j_max == 0 || j_max > bound {
        return Err(UfgError::Config(format!(
            "j_max {j_max} outside 1..={bound} for a {} descriptor",
            desc.name()
        )));
    }
    for o in sample.observations() {
        desc.validate(&o.element)?;
    }
    for q in queries {
        desc.validate(q)?;
    }
    let objects = sample.positive_objects();
    if let Some(p) = desc.downcast::<ProductClosure>() {
        if p.components().iter().any(|c| c.name() == "convex2d") {
            let elems: Vec<Element> = objects.iter().map(|(e, _)| e.clone()).collect();
            check_unique_locations(&elems)?;
        }
    }
    let cap = opts.n_cap.unwrap_or(DEFAULT_N_CAP);
    if j_max >= 4 && objects.len() > cap {
        return Err(UfgError::Resource(format!(
            "{} distinct objects exceed the cap of {cap} for j_max {j_max}; raise the cap or lower j_max",
            objects.len()
        )));
    }
    let counter = registry.select(opts.counter.as_deref(), desc, j_max)?;
    in_pool(opts.workers, || counter.count(&objects, queries, desc, j_max))?
}

fn in_pool<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    if workers == 0 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| UfgError::Resource(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

/// Calls `f` on every increasing index tuple of length `j` from `0..n` that starts
/// with `first`.
fn for_each_combination(n: usize, j: usize, first: usize, mut f: impl FnMut(&[usize])) {
    if j == 0 || first >= n || n - first < j {
        return;
    }
    let mut idx: Vec<usize> = (first..first + j).collect();
    loop {
        f(&idx);
        // advance positions 1.. like an odometer
        let mut p = j;
        loop {
            if p <= 1 {
                return;
            }
            p -= 1;
            if idx[p] < n - (j - p) {
                break;
            }
        }
        idx[p] += 1;
        for q in p + 1..j {
            idx[q] = idx[q - 1] + 1;
        }
    }
}

// ---------------------------------------------------------------------------
// Generic enumeration

/// Enumerates all j-sets with exact rationals and the family's own premise test.
#[derive(Debug, Clone, Copy)]
pub struct GenericCounter;

impl TupleCounter for GenericCounter {
    fn name(&self) -> &'static str {
        "generic"
    }

    fn supports(&self, _desc: &ClosureDescriptor, _j_max: usize) -> bool {
        true
    }

    fn count(
        &self,
        objects: &[(Element, Rational)],
        queries: &[Element],
        desc: &ClosureDescriptor,
        j_max: usize,
    ) -> Result<TupleCounts> {
        let n = objects.len();
        let nq = queries.len();
        let mut out = TupleCounts::zero(j_max, nq, self.name());
        for j in 1..=j_max {
            let parts: Vec<Result<(Rational, Vec<Rational>, u64)>> = (0..n)
                .into_par_iter()
                .map(|first| {
                    let mut b = Rational::zero();
                    let mut a = vec![Rational::zero(); nq];
                    let mut sets = 0u64;
                    let mut err = None;
                    for_each_combination(n, j, first, |idx| {
                        if err.is_some() {
                            return;
                        }
                        let set: Vec<Element> = idx.iter().map(|&i| objects[i].0.clone()).collect();
                        let mut step = || -> Result<()> {
                            if !is_premise(desc, &set)?.is_premise {
                                return Ok(());
                            }
                            let w: Rational = idx.iter().fold(Rational::one(), |acc, &i| acc * &objects[i].1);
                            let closed = desc.close(&set)?;
                            for (q, slot) in queries.iter().zip(a.iter_mut()) {
                                if closed.contains(q)? {
                                    *slot += &w;
                                }
                            }
                            b += w;
                            sets += 1;
                            Ok(())
                        };
                        if let Err(e) = step() {
                            err = Some(e);
                        }
                    });
                    match err {
                        Some(e) => Err(e),
                        None => Ok((b, a, sets)),
                    }
                })
                .collect();
            for part in parts {
                let (b, a, sets) = part?;
                out.b[j - 1] += b;
                out.premise_sets[j - 1] += sets;
                for (q, x) in a.into_iter().enumerate() {
                    out.a[q][j - 1] += x;
                }
            }
        }
        Ok(out)
    }
}

// ---------------------------------------------------------------------------
// Hierarchical codes via code frequencies

/// Counts premises of coded data from the code-frequency table: singletons are premises
/// when their code carries other objects, pairs of distinct codes when the class of their
/// common prefix holds a third code.
#[derive(Debug, Clone, Copy)]
pub struct HierFrequencyCounter;

impl TupleCounter for HierFrequencyCounter {
    fn name(&self) -> &'static str {
        "hier-frequency"
    }

    fn supports(&self, desc: &ClosureDescriptor, j_max: usize) -> bool {
        desc.downcast::<HierPrefixClosure>().is_some() && j_max <= 2
    }

    fn count(
        &self,
        objects: &[(Element, Rational)],
        queries: &[Element],
        desc: &ClosureDescriptor,
        j_max: usize,
    ) -> Result<TupleCounts> {
        let h = desc
            .downcast::<HierPrefixClosure>()
            .ok_or_else(|| UfgError::Config("hier-frequency counter needs coded data".into()))?;
        let mut out = TupleCounts::zero(j_max, queries.len(), self.name());
        // code -> (weight, objects)
        let mut codes: BTreeMap<&str, (Rational, u64)> = BTreeMap::new();
        for (e, w) in objects {
            let c = &e.as_coded().expect("validated").code;
            let slot = codes.entry(c.as_str()).or_insert((Rational::zero(), 0));
            slot.0 += w;
            slot.1 += 1;
        }
        let q_codes: Vec<&str> = queries.iter().map(|q| q.as_coded().expect("validated").code.as_str()).collect();

        let ground_codes = h.ground_codes().count();
        let mut single_premise: BTreeSet<&str> = BTreeSet::new();
        for (&c, (w, k)) in &codes {
            let many = h.multiplicity(c).exceeds(1);
            if many && ground_codes > 1 {
                single_premise.insert(c);
                out.b[0] += w;
                out.premise_sets[0] += k;
            } else if many {
                out.notes.push(format!(
                    "singletons of code {c} satisfy A ⊊ γ(A) but γ(∅) already is the whole single-code ground space"
                ));
            }
        }
        for (q, c) in q_codes.iter().enumerate() {
            if single_premise.contains(c) {
                out.a[q][0] = codes[c].0.clone();
            }
        }
        if j_max < 2 {
            return Ok(out);
        }

        // prefix -> weight and object count per child digit
        let mut nodes: BTreeMap<&str, BTreeMap<u8, (Rational, u64)>> = BTreeMap::new();
        for (&c, (w, k)) in &codes {
            for l in 0..c.len() {
                let slot = nodes
                    .entry(&c[..l])
                    .or_default()
                    .entry(c.as_bytes()[l])
                    .or_insert((Rational::zero(), 0));
                slot.0 += w;
                slot.1 += k;
            }
        }
        let mut node_weight: BTreeMap<&str, Rational> = BTreeMap::new();
        for (&p, children) in &nodes {
            if children.len() < 2 {
                continue;
            }
            let total: Rational = children.values().map(|(w, _)| w).sum();
            let squares: Rational = children.values().map(|(w, _)| w * w).sum();
            let pair_w = (&total * &total - squares) / int(2);
            let total_k: u64 = children.values().map(|(_, k)| k).sum();
            let squares_k: u64 = children.values().map(|(_, k)| k * k).sum();
            let pair_k = (total_k * total_k - squares_k) / 2;
            if h.codes_under(p).nth(2).is_some() {
                out.b[1] += &pair_w;
                out.premise_sets[1] += pair_k;
                node_weight.insert(p, pair_w);
            } else {
                out.notes.push(format!(
                    "object pairs with codes {} have no third code under prefix {p:?} and are not premises",
                    h.codes_under(p).cloned().collect::<Vec<_>>().join(" and ")
                ));
            }
        }
        for (q, c) in q_codes.iter().enumerate() {
            for l in 0..c.len() {
                if let Some(w) = node_weight.get(&c[..l]) {
                    out.a[q][1] += w;
                }
            }
        }
        Ok(out)
    }
}

// ---------------------------------------------------------------------------
// Plane with optional nominal and interordinal covariates, on an integer lattice

/// Exact counter for the plane alone or the plane with one nominal and one
/// interordinal covariate. Coordinates are moved to a common-denominator lattice and
/// premise sets are decided from orientation signs and covariate ranks.
#[derive(Debug, Clone, Copy)]
pub struct PlanarCounter;

#[derive(Clone, Copy, Default)]
struct Slots {
    spatial: usize,
    veg: Option<usize>,
    elev: Option<usize>,
}

fn planar_slots(desc: &ClosureDescriptor) -> Option<(Slots, Option<NominalClosure>)> {
    if desc.name() == "convex2d" {
        return Some((Slots::default(), None));
    }
    let p = desc.downcast::<ProductClosure>()?;
    let mut slots = Slots::default();
    let (mut sp, mut nominal) = (None, None);
    for (i, c) in p.components().iter().enumerate() {
        match c.name() {
            "convex2d" if sp.is_none() => sp = Some(i),
            "nominal" if slots.veg.is_none() => {
                slots.veg = Some(i);
                nominal = c.downcast::<NominalClosure>().cloned();
            }
            "interordinal" if slots.elev.is_none() => slots.elev = Some(i),
            _ => return None,
        }
    }
    slots.spatial = sp?;
    Some((slots, nominal))
}

/// A point on the lattice with its covariate ranks.
#[derive(Clone, Copy, Debug)]
struct Site {
    x: i64,
    y: i64,
    lex: u32,
    veg: u32,
    elev: u32,
}

#[inline]
fn orient(a: &Site, b: &Site, c: &Site) -> i8 {
    let d = (b.x as i128 - a.x as i128) * (c.y as i128 - a.y as i128)
        - (b.y as i128 - a.y as i128) * (c.x as i128 - a.x as i128);
    d.signum() as i8
}

/// Exact sum of u128 terms.
#[derive(Clone, Default)]
struct Acc {
    lo: u128,
    hi: BigUint,
}

impl Acc {
    #[inline]
    fn add(&mut self, x: u128) {
        match self.lo.checked_add(x) {
            Some(s) => self.lo = s,
            None => {
                self.hi += self.lo;
                self.lo = x;
            }
        }
    }

    fn merge(&mut self, other: &Acc) {
        self.hi += &other.hi;
        self.add(other.lo);
    }

    fn value(&self) -> BigUint {
        &self.hi + self.lo
    }
}

const COORD_LIMIT: i64 = 1 << 62;
const WEIGHT_LIMIT: u64 = 1 << 31;

struct Lattice {
    sites: Vec<Site>,
    queries: Vec<Site>,
    weights: Vec<u128>,
    weight_den: BigInt,
    n_veg: usize,
}

fn lattice(
    objects: &[(Element, Rational)],
    queries: &[Element],
    slots: Slots,
    nominal: Option<&NominalClosure>,
) -> Option<Lattice> {
    let parts = |e: &Element| -> (Point2, Option<String>, Option<Rational>) {
        match e {
            Element::Point(p) => (p.clone(), None, None),
            Element::Tuple(xs) => (
                xs[slots.spatial].as_point().expect("validated").clone(),
                slots.veg.map(|i| xs[i].as_category().expect("validated").to_string()),
                slots.elev.map(|i| xs[i].as_value().expect("validated").clone()),
            ),
            _ => unreachable!("validated element"),
        }
    };
    let all: Vec<(Point2, Option<String>, Option<Rational>)> =
        objects.iter().map(|(e, _)| e).chain(queries).map(parts).collect();
    let dx = common_denominator(all.iter().map(|t| &t.0.x));
    let dy = common_denominator(all.iter().map(|t| &t.0.y));
    let to_i64 = |r: &Rational, d: &BigInt| -> Option<i64> {
        let v = (r * Rational::from_integer(d.clone())).to_integer().to_i64()?;
        (v.abs() < COORD_LIMIT).then_some(v)
    };
    let lex: BTreeSet<&Point2> = all.iter().map(|t| &t.0).collect();
    let lex: HashMap<&Point2, u32> = lex.into_iter().enumerate().map(|(i, p)| (p, i as u32)).collect();
    let elev: BTreeSet<&Rational> = all.iter().filter_map(|t| t.2.as_ref()).collect();
    let elev: HashMap<&Rational, u32> = elev.into_iter().enumerate().map(|(i, v)| (v, i as u32)).collect();
    let veg: HashMap<&str, u32> = nominal
        .map(|n| n.categories().iter().enumerate().map(|(i, c)| (c.as_str(), i as u32)).collect())
        .unwrap_or_default();
    let mut sites = Vec::with_capacity(all.len());
    for (p, v, e) in &all {
        sites.push(Site {
            x: to_i64(&p.x, &dx)?,
            y: to_i64(&p.y, &dy)?,
            lex: lex[p],
            veg: v.as_ref().map_or(0, |c| veg[c.as_str()]),
            elev: e.as_ref().map_or(0, |x| elev[x]),
        });
    }
    let queries_sites = sites.split_off(objects.len());
    let weight_den = common_denominator(objects.iter().map(|(_, w)| w));
    let mut weights = Vec::with_capacity(objects.len());
    for (_, w) in objects {
        let v = (w * Rational::from_integer(weight_den.clone())).to_integer().to_u64()?;
        if v >= WEIGHT_LIMIT {
            return None;
        }
        weights.push(v as u128);
    }
    Some(Lattice {
        sites,
        queries: queries_sites,
        weights,
        weight_den,
        n_veg: nominal.map_or(0, |n| n.categories().len()),
    })
}

/// Masks of removal sets through which the nominal coordinate of `v` escapes.
fn veg_escapes(v: &[u32], n_veg: usize) -> u32 {
    let k = v.len();
    let same = v.iter().all(|&x| x == v[0]);
    let mut out = 1u32;
    'mask: for mask in 1u32..(1 << k) {
        let mut singles = [0u32; 4];
        let mut n_singles = 0usize;
        for r in 0..k {
            if mask & (1 << r) == 0 {
                continue;
            }
            let mut rest = (0..k).filter(|&i| i != r).map(|i| v[i]);
            let first = rest.next().expect("k ≥ 2");
            if rest.any(|x| x != first) {
                continue 'mask;
            }
            if !singles[..n_singles].contains(&first) {
                singles[n_singles] = first;
                n_singles += 1;
            }
        }
        let escapes = if same {
            !singles[..n_singles].contains(&v[0])
        } else {
            n_veg > n_singles
        };
        if escapes {
            out |= 1 << mask;
        }
    }
    out
}

/// Masks of removal sets through which the interval coordinate of `e` escapes.
fn elev_escapes(e: &[u32]) -> u32 {
    let k = e.len();
    let lo = *e.iter().min().unwrap() as usize;
    let hi = *e.iter().max().unwrap() as usize;
    let mut out = 1u32;
    for mask in 1u32..(1 << k) {
        let mut spans: Vec<(usize, usize)> = (0..k)
            .filter(|r| mask & (1 << r) != 0)
            .map(|r| {
                let rest = (0..k).filter(|&i| i != r).map(|i| e[i] as usize);
                let (mut a, mut b) = (usize::MAX, 0);
                for x in rest {
                    a = a.min(x);
                    b = b.max(x);
                }
                (a, b)
            })
            .collect();
        spans.sort_unstable();
        if !intervals_cover(lo, hi, &spans) {
            out |= 1 << mask;
        }
    }
    out
}

/// Whether a set of lattice sites with cover rule `rule` and covariate escape masks is
/// a premise: the removed elements must split into a spatial, a nominal and an interval
/// group that each escape.
fn planar_premise(k: usize, rule: &CoverRule, veg: u32, elev: u32) -> bool {
    let full = (1u32 << k) - 1;
    let mut coverable = 0u32;
    for m in 0..=full {
        let mut s = m;
        loop {
            if veg & (1 << s) != 0 && elev & (1 << (m ^ s)) != 0 {
                coverable |= 1 << m;
                break;
            }
            if s == 0 {
                break;
            }
            s = (s - 1) & m;
        }
    }
    (0..=full).any(|s| (s == 0 || !rule.covers(s as u8)) && coverable & (1 << (full ^ s)) != 0)
}

/// Closed hull of 2 to 4 distinct sites: CCW vertices, or the two ends of a segment.
enum SmallHull {
    Segment(Site, Site),
    Polygon(Vec<Site>),
}

fn small_hull(pts: &[Site]) -> SmallHull {
    let mut p: Vec<Site> = pts.to_vec();
    p.sort_by_key(|s| s.lex);
    let collinear = (2..p.len()).all(|i| orient(&p[0], &p[1], &p[i]) == 0);
    if collinear {
        return SmallHull::Segment(p[0], p[p.len() - 1]);
    }
    let mut hull: Vec<Site> = Vec::with_capacity(2 * p.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &Site>> = if pass == 0 {
            Box::new(p.iter())
        } else {
            Box::new(p.iter().rev())
        };
        for s in iter {
            while hull.len() >= start + 2 && orient(&hull[hull.len() - 2], &hull[hull.len() - 1], s) <= 0 {
                hull.pop();
            }
            hull.push(*s);
        }
        hull.pop();
    }
    SmallHull::Polygon(hull)
}

impl SmallHull {
    #[inline]
    fn contains(&self, q: &Site) -> bool {
        match self {
            SmallHull::Segment(a, b) => orient(a, b, q) == 0 && a.lex <= q.lex && q.lex <= b.lex,
            SmallHull::Polygon(v) => (0..v.len()).all(|i| orient(&v[i], &v[(i + 1) % v.len()], q) >= 0),
        }
    }
}

impl TupleCounter for PlanarCounter {
    fn name(&self) -> &'static str {
        "planar"
    }

    fn supports(&self, desc: &ClosureDescriptor, j_max: usize) -> bool {
        j_max <= 4 && planar_slots(desc).is_some()
    }

    fn count(
        &self,
        objects: &[(Element, Rational)],
        queries: &[Element],
        desc: &ClosureDescriptor,
        j_max: usize,
    ) -> Result<TupleCounts> {
        let (slots, nominal) = planar_slots(desc)
            .ok_or_else(|| UfgError::Config("planar counter needs planar data".into()))?;
        let Some(lat) = lattice(objects, queries, slots, nominal.as_ref()) else {
            let mut out = GenericCounter.count(objects, queries, desc, j_max)?;
            out.notes.push("coordinates or weights exceed the lattice range; enumerated exactly instead".into());
            return Ok(out);
        };
        let n = lat.sites.len();
        let nq = lat.queries.len();
        let mut order: Vec<usize> = (0..nq).collect();
        order.sort_by_key(|&q| lat.queries[q].elev);
        let sorted: Vec<Site> = order.iter().map(|&q| lat.queries[q]).collect();
        let has_veg = slots.veg.is_some();
        let has_elev = slots.elev.is_some();

        let mut out = TupleCounts::zero(j_max, nq, self.name());
        let mut den = BigInt::one();
        for j in 1..=j_max {
            den *= &lat.weight_den;
            if j == 1 {
                continue;
            }
            let parts: Vec<(Acc, Vec<Acc>, u64)> = (0..n)
                .into_par_iter()
                .map(|first| {
                    let mut b = Acc::default();
                    let mut a = vec![Acc::default(); nq];
                    let mut sets = 0u64;
                    let mut pts = [lat.sites[0]; 4];
                    for_each_combination(n, j, first, |idx| {
                        for (slot, &i) in pts.iter_mut().zip(idx) {
                            *slot = lat.sites[i];
                        }
                        let pts = &pts[..j];
                        let veg: Vec<u32> = pts.iter().map(|s| s.veg).collect();
                        let elev: Vec<u32> = pts.iter().map(|s| s.elev).collect();
                        let ev = if has_veg { veg_escapes(&veg, lat.n_veg) } else { 1 };
                        let ee = if has_elev { elev_escapes(&elev) } else { 1 };
                        let rule = cover_rule(j, |x, y, z| orient(&pts[x], &pts[y], &pts[z]), |x, y| pts[x].lex < pts[y].lex);
                        if !planar_premise(j, &rule, ev, ee) {
                            return;
                        }
                        let w = idx.iter().map(|&i| lat.weights[i]).product::<u128>();
                        b.add(w);
                        sets += 1;
                        let (lo, hi) = if has_elev {
                            (*elev.iter().min().unwrap(), *elev.iter().max().unwrap())
                        } else {
                            (0, 0)
                        };
                        let range = if has_elev {
                            sorted.partition_point(|s| s.elev < lo)..sorted.partition_point(|s| s.elev <= hi)
                        } else {
                            0..nq
                        };
                        let single_veg = veg.iter().all(|&v| v == veg[0]).then_some(veg[0]);
                        let hull = small_hull(pts);
                        for r in range {
                            let q = &sorted[r];
                            if let (true, Some(v)) = (has_veg, single_veg) {
                                if q.veg != v {
                                    continue;
                                }
                            }
                            if hull.contains(q) {
                                a[order[r]].add(w);
                            }
                        }
                    });
                    (b, a, sets)
                })
                .collect();
            let mut b = Acc::default();
            let mut a = vec![Acc::default(); nq];
            for (pb, pa, sets) in &parts {
                b.merge(pb);
                for (x, y) in a.iter_mut().zip(pa) {
                    x.merge(y);
                }
                out.premise_sets[j - 1] += sets;
            }
            let to_rat = |acc: &Acc| Rational::new(BigInt::from(acc.value()), den.clone());
            out.b[j - 1] = to_rat(&b);
            for (q, acc) in a.iter().enumerate() {
                out.a[q][j - 1] = to_rat(acc);
            }
        }
        Ok(out)
    }
}
