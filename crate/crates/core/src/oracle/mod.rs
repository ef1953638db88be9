//! Brute-force reference implementations for tests.
//!
//! Nothing here calls into the engine or the closure operators; descriptors are only
//! read for their data (incidence, categories, catalog). Everything is single-threaded
//! and exact.

pub mod product;
pub mod table;

use std::collections::BTreeSet;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::closures::{
    ClosureDescriptor, CodedObject, Element, FiniteContextClosure, HierPrefixClosure, NominalClosure, ProductClosure,
};
use crate::depth::{DepthResult, QueryDepth, Weights};
use crate::error::{Result, UfgError};
use crate::geometry::Point2;
use crate::rational::{int, Rational};
use crate::sample::Sample;

pub use product::Coord;
use table::{HierTable, Table};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilyMode {
    /// Only the family {A∖{a} : a ∈ A}.
    MaximalOnly,
    /// Every family of proper subsets.
    AllFamilies,
}

#[derive(Clone, Debug)]
pub struct OracleConfig {
    pub seed: u64,
    pub mc_samples: usize,
    pub mode: FamilyMode,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            seed: 0,
            mc_samples: 100_000,
            mode: FamilyMode::MaximalOnly,
        }
    }
}

impl OracleConfig {
    pub fn with_mode(mode: FamilyMode) -> Self {
        OracleConfig {
            mode,
            ..Self::default()
        }
    }
}

fn coords_of(desc: &ClosureDescriptor) -> Option<Vec<Coord>> {
    let one = |d: &ClosureDescriptor| -> Option<Coord> {
        match d.name() {
            "convex2d" => Some(Coord::Plane),
            "interordinal" => Some(Coord::Line),
            "nominal" => Some(Coord::Nominal(d.downcast::<NominalClosure>()?.categories().to_vec())),
            _ => None,
        }
    };
    match desc.downcast::<ProductClosure>() {
        Some(p) => p.components().iter().map(one).collect(),
        None => one(desc).map(|c| vec![c]),
    }
}

fn unsupported(desc: &ClosureDescriptor) -> UfgError {
    UfgError::Unsupported(format!("no oracle for {} descriptors", desc.name()))
}

fn object_indices(a: &[Element], n: usize) -> Result<Vec<usize>> {
    a.iter()
        .map(|g| match g {
            Element::Object(i) if *i < n => Ok(*i),
            _ => Err(UfgError::Input(format!("{g:?} is not an object of the context"))),
        })
        .collect()
}

fn coded(a: &[Element]) -> Result<Vec<CodedObject>> {
    a.iter()
        .map(|g| {
            g.as_coded()
                .cloned()
                .ok_or_else(|| UfgError::Input(format!("{g:?} is not a coded object")))
        })
        .collect()
}

/// Literal premise test; also returns a witness when the mode yields one.
pub fn premise_oracle_witness(desc: &ClosureDescriptor, a: &[Element], cfg: &OracleConfig) -> Result<(bool, Option<Element>)> {
    let distinct: BTreeSet<&Element> = a.iter().collect();
    if distinct.len() != a.len() || a.is_empty() {
        return Err(UfgError::Input("oracle premise test needs distinct elements".into()));
    }
    if let Some(f) = desc.downcast::<FiniteContextClosure>() {
        let t = Table::from_context(f.context());
        let idx = object_indices(a, t.n_objects())?;
        let (p, w) = t.premise(&idx, cfg.mode)?;
        return Ok((p, w.map(Element::Object)));
    }
    if let Some(h) = desc.downcast::<HierPrefixClosure>() {
        let objs = coded(a)?;
        let ht = HierTable::build(h, &objs)?;
        let (p, w) = ht.table.premise(&ht.rows_of, cfg.mode)?;
        let w = w.map(|r| Element::Coded(CodedObject::new(ht.row_codes[r].clone(), format!("#{r}"))));
        return Ok((p, w));
    }
    let coords = coords_of(desc).ok_or_else(|| unsupported(desc))?;
    product::product_premise(&coords, a, cfg.mode)
}

pub fn premise_oracle(desc: &ClosureDescriptor, a: &[Element], cfg: &OracleConfig) -> Result<bool> {
    premise_oracle_witness(desc, a, cfg).map(|(p, _)| p)
}

/// Whether `g` lies in the closure of `a`, computed from the descriptor's data alone.
pub fn closure_contains_oracle(desc: &ClosureDescriptor, a: &[Element], g: &Element) -> Result<bool> {
    if let Some(f) = desc.downcast::<FiniteContextClosure>() {
        let t = Table::from_context(f.context());
        let idx = object_indices(a, t.n_objects())?;
        let gi = object_indices(std::slice::from_ref(g), t.n_objects())?[0];
        return Ok(t.close(&idx)[gi]);
    }
    if let Some(h) = desc.downcast::<HierPrefixClosure>() {
        let objs = coded(a)?;
        let q = coded(std::slice::from_ref(g))?.remove(0);
        let ht = HierTable::build(h, &[])?;
        let codes: Vec<&str> = objs.iter().map(|o| o.code.as_str()).collect();
        return Ok(ht.contains(&codes, &q.code));
    }
    let coords = coords_of(desc).ok_or_else(|| unsupported(desc))?;
    if a.is_empty() {
        // Φ(M) is empty on the plane and the line, all of V for one category
        return Ok(coords.iter().all(|c| matches!(c, Coord::Nominal(v) if v.len() == 1)));
    }
    product::product_contains(&coords, a, g)
}

pub const DEPTH_ORACLE_LIMIT: usize = 40;

/// Empirical depth enumerated over index combinations of the raw observations.
pub fn depth_oracle(
    sample: &Sample,
    queries: &[Element],
    desc: &ClosureDescriptor,
    w: &Weights,
    cfg: &OracleConfig,
) -> Result<DepthResult> {
    let n = sample.len();
    if n > DEPTH_ORACLE_LIMIT {
        return Err(UfgError::Resource(format!("depth oracle handles at most {DEPTH_ORACLE_LIMIT} observations")));
    }
    let j_max = desc.max_premise_bound()?;
    let obs = sample.observations();
    let mut b = vec![Rational::zero(); j_max];
    let mut a = vec![vec![Rational::zero(); j_max]; queries.len()];
    let mut sets = vec![0u64; j_max];
    for j in 1..=j_max.min(n) {
        let mut idx: Vec<usize> = (0..j).collect();
        loop {
            let elems: Vec<Element> = idx.iter().map(|&i| obs[i].element.clone()).collect();
            let distinct: BTreeSet<&Element> = elems.iter().collect();
            if distinct.len() == j && premise_oracle(desc, &elems, cfg)? {
                let weight: Rational = idx.iter().map(|&i| obs[i].weight.clone()).product();
                b[j - 1] += &weight;
                sets[j - 1] += 1;
                for (q, row) in queries.iter().zip(a.iter_mut()) {
                    if closure_contains_oracle(desc, &elems, q)? {
                        row[j - 1] += &weight;
                    }
                }
            }
            // next combination
            let mut p = j;
            while p > 0 && idx[p - 1] == n - j + p - 1 {
                p -= 1;
            }
            if p == 0 {
                break;
            }
            idx[p - 1] += 1;
            for q in p..j {
                idx[q] = idx[q - 1] + 1;
            }
        }
    }
    let j_set: BTreeSet<usize> = (1..=j_max).filter(|&j| !b[j - 1].is_zero()).collect();
    let rows: Vec<QueryDepth> = a
        .into_iter()
        .map(|aq| {
            let mut terms = Vec::with_capacity(j_max);
            let mut depth = Rational::zero();
            for j in 1..=j_max {
                let t = if b[j - 1].is_zero() {
                    Rational::zero()
                } else {
                    w.get(j) * &aq[j - 1] / &b[j - 1]
                };
                depth += &t;
                terms.push(t);
            }
            QueryDepth { depth, a: aq, terms }
        })
        .collect();
    let best = rows.iter().map(|r| r.depth.clone()).max();
    let median = (0..rows.len()).filter(|&i| Some(&rows[i].depth) == best.as_ref()).collect();
    Ok(DepthResult {
        queries: rows,
        b,
        j_set,
        median,
        premise_sets: sets,
        warnings: Vec::new(),
    })
}

fn orient(p: &Point2, q: &Point2, r: &Point2) -> i8 {
    let v = (&q.x - &p.x) * (&r.y - &p.y) - (&q.y - &p.y) * (&r.x - &p.x);
    if v.is_zero() {
        0
    } else if v > Rational::zero() {
        1
    } else {
        -1
    }
}

fn on_segment(p: &Point2, q: &Point2, z: &Point2) -> bool {
    orient(p, q, z) == 0
        && p.x.clone().min(q.x.clone()) <= z.x
        && z.x <= p.x.clone().max(q.x.clone())
        && p.y.clone().min(q.y.clone()) <= z.y
        && z.y <= p.y.clone().max(q.y.clone())
}

fn in_triangle(a: &Point2, b: &Point2, c: &Point2, z: &Point2) -> bool {
    let o = orient(a, b, c);
    [orient(a, b, z), orient(b, c, z), orient(c, a, z)].iter().all(|&s| s * o >= 0)
}

/// Fractions (P₂, P₃) of non-degenerate pairs and triples of the sample whose closed
/// hull holds `query`.
pub fn simplicial_depth_2d(points: &[Point2], query: &Point2) -> (Rational, Rational) {
    let n = points.len();
    let (mut pairs, mut pairs_in, mut tri, mut tri_in) = (0i64, 0i64, 0i64, 0i64);
    for i in 0..n {
        for j in i + 1..n {
            if points[i] != points[j] {
                pairs += 1;
                if on_segment(&points[i], &points[j], query) {
                    pairs_in += 1;
                }
            }
            for k in j + 1..n {
                if orient(&points[i], &points[j], &points[k]) != 0 {
                    tri += 1;
                    if in_triangle(&points[i], &points[j], &points[k], query) {
                        tri_in += 1;
                    }
                }
            }
        }
    }
    let frac = |a: i64, b: i64| if b == 0 { Rational::zero() } else { Rational::new(a.into(), b.into()) };
    (frac(pairs_in, pairs), frac(tri_in, tri))
}

const MC_BITS: u32 = 20;

/// Searches for a point of conv(P) outside conv(P∖{g}) for every g ∈ T by sampling
/// random convex combinations with denominator 2^20.
pub fn cover_witness_mc(points: &[Point2], removed: &[Point2], cfg: &OracleConfig) -> Option<Point2> {
    let mut p: Vec<Point2> = points.to_vec();
    p.sort();
    p.dedup();
    let rests: Vec<Vec<Point2>> = removed
        .iter()
        .map(|g| p.iter().filter(|q| *q != g).cloned().collect())
        .collect();
    let escapes = |z: &Point2| {
        rests.iter().all(|rest| {
            !(rest.iter().enumerate().any(|(i, a)| {
                a == z
                    || rest[i + 1..].iter().enumerate().any(|(j, b)| {
                        on_segment(a, b, z)
                            || rest[i + 1 + j + 1..]
                                .iter()
                                .any(|c| orient(a, b, c) != 0 && in_triangle(a, b, c, z))
                    })
            }))
        })
    };
    if p.len() == 1 {
        return escapes(&p[0]).then(|| p[0].clone());
    }
    let mut simplices: Vec<Vec<&Point2>> = Vec::new();
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            for k in j + 1..p.len() {
                if orient(&p[i], &p[j], &p[k]) != 0 {
                    simplices.push(vec![&p[i], &p[j], &p[k]]);
                }
            }
        }
    }
    if simplices.is_empty() {
        // collinear: the segment between the extremes
        simplices.push(vec![&p[0], &p[p.len() - 1]]);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let scale = int(1 << MC_BITS);
    for _ in 0..cfg.mc_samples {
        let s = &simplices[rng.gen_range(0..simplices.len())];
        let mut u: i64 = rng.gen_range(0..=1 << MC_BITS);
        let mut v: i64 = if s.len() == 3 { rng.gen_range(0..=1 << MC_BITS) } else { 0 };
        if u + v > 1 << MC_BITS {
            u = (1 << MC_BITS) - u;
            v = (1 << MC_BITS) - v;
        }
        let (fu, fv) = (int(u) / &scale, int(v) / &scale);
        let mut x = s[0].x.clone() + &fu * (&s[1].x - &s[0].x);
        let mut y = s[0].y.clone() + &fu * (&s[1].y - &s[0].y);
        if s.len() == 3 {
            x += &fv * (&s[2].x - &s[0].x);
            y += &fv * (&s[2].y - &s[0].y);
        }
        let z = Point2::new(x, y);
        if escapes(&z) {
            return Some(z);
        }
    }
    None
}

pub const MAJORANT_LEAF_LIMIT: usize = 5_000_000;

/// Pointwise minimum over all quasiconcave F ≥ D with values among D's values, found by
/// exhaustive search. Errors if that minimum is not itself quasiconcave.
pub fn minimal_majorant(depths: &[(Element, Rational)], desc: &ClosureDescriptor) -> Result<Vec<Rational>> {
    let n = depths.len();
    let values: Vec<Rational> = depths.iter().map(|(_, d)| d.clone()).collect::<BTreeSet<_>>().into_iter().collect();
    let elems: Vec<Element> = depths.iter().map(|(g, _)| g.clone()).collect();
    let options: Vec<Vec<usize>> = depths
        .iter()
        .map(|(_, d)| (0..values.len()).filter(|&v| &values[v] >= d).collect())
        .collect();
    let quasiconcave = |f: &[usize]| -> Result<bool> {
        for level in 0..values.len() {
            let contour: Vec<Element> = (0..n).filter(|&g| f[g] >= level).map(|g| elems[g].clone()).collect();
            if contour.is_empty() {
                continue;
            }
            for g in 0..n {
                if f[g] < level && closure_contains_oracle(desc, &contour, &elems[g])? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    };
    let mut best: Vec<usize> = vec![usize::MAX; n];
    let mut f = vec![0usize; n];
    let mut choice = vec![0usize; n];
    let mut leaves = 0usize;
    'search: loop {
        for g in 0..n {
            f[g] = options[g][choice[g]];
        }
        leaves += 1;
        if leaves > MAJORANT_LEAF_LIMIT {
            return Err(UfgError::Resource("majorant search space too large".into()));
        }
        if quasiconcave(&f)? {
            for g in 0..n {
                best[g] = best[g].min(f[g]);
            }
        }
        for g in (0..n).rev() {
            choice[g] += 1;
            if choice[g] < options[g].len() {
                continue 'search;
            }
            choice[g] = 0;
        }
        break;
    }
    if best.iter().any(|&b| b == usize::MAX) || !quasiconcave(&best)? {
        return Err(UfgError::Input("no attained minimal quasiconcave majorant".into()));
    }
    Ok(best.into_iter().map(|v| values[v].clone()).collect())
}
