//! Depth functionals on top of the premise counts.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};

use crate::closures::{ClosureDescriptor, Element, FiniteContextClosure, HierPrefixClosure};
use crate::engine::{count_tuples_with, CountOptions, TupleCounts};
use crate::error::{input, Result, UfgError};
use crate::rational::Rational;
use crate::sample::Sample;

/// Weights C_j; cardinalities beyond the given list weigh 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Weights {
    c: Vec<Rational>,
}

impl Weights {
    pub fn ones() -> Self {
        Weights { c: Vec::new() }
    }

    pub fn new(c: Vec<Rational>) -> Result<Self> {
        if let Some(x) = c.iter().find(|x| *x <= &Rational::zero()) {
            return input(format!("weight C_j must be positive, got {x}"));
        }
        Ok(Weights { c })
    }

    pub fn get(&self, j: usize) -> Rational {
        self.c.get(j - 1).cloned().unwrap_or_else(Rational::one)
    }

    pub fn as_slice(&self) -> &[Rational] {
        &self.c
    }
}

impl Default for Weights {
    fn default() -> Self {
        Self::ones()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QueryDepth {
    pub depth: Rational,
    /// a_j(g), index j - 1.
    pub a: Vec<Rational>,
    /// C_j · a_j(g) / b_j, zero when b_j = 0.
    pub terms: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DepthResult {
    pub queries: Vec<QueryDepth>,
    pub b: Vec<Rational>,
    pub j_set: BTreeSet<usize>,
    /// Indices of the queries with maximal depth.
    pub median: Vec<usize>,
    pub premise_sets: Vec<u64>,
    pub warnings: Vec<String>,
}

impl DepthResult {
    pub fn depths(&self) -> Vec<Rational> {
        self.queries.iter().map(|q| q.depth.clone()).collect()
    }

    pub fn max_depth(&self) -> Option<&Rational> {
        self.queries.iter().map(|q| &q.depth).max()
    }

    pub fn min_depth(&self) -> Option<&Rational> {
        self.queries.iter().map(|q| &q.depth).min()
    }

    pub fn distinct_values(&self) -> usize {
        self.queries.iter().map(|q| &q.depth).collect::<BTreeSet<_>>().len()
    }
}

pub fn detect_j(counts: &TupleCounts) -> BTreeSet<usize> {
    counts
        .b
        .iter()
        .enumerate()
        .filter(|(_, b)| !b.is_zero())
        .map(|(i, _)| i + 1)
        .collect()
}

/// Turns premise counts into depths: D(g) = Σ_{j∈J} C_j · a_j(g) / b_j.
pub fn depth_from_counts(counts: &TupleCounts, w: &Weights) -> DepthResult {
    let j_set = detect_j(counts);
    let queries: Vec<QueryDepth> = counts
        .a
        .iter()
        .map(|a| {
            let terms: Vec<Rational> = a
                .iter()
                .zip(&counts.b)
                .enumerate()
                .map(|(i, (a, b))| {
                    if b.is_zero() {
                        Rational::zero()
                    } else {
                        w.get(i + 1) * a / b
                    }
                })
                .collect();
            QueryDepth {
                depth: terms.iter().sum(),
                a: a.clone(),
                terms,
            }
        })
        .collect();
    let median = match queries.iter().map(|q| &q.depth).max() {
        Some(m) => (0..queries.len()).filter(|&i| &queries[i].depth == m).collect(),
        None => Vec::new(),
    };
    let mut warnings = counts.notes.clone();
    if j_set.is_empty() {
        warnings.push("no premise at any cardinality; all depths are zero".into());
    }
    DepthResult {
        queries,
        b: counts.b.clone(),
        j_set,
        median,
        premise_sets: counts.premise_sets.clone(),
        warnings,
    }
}

pub fn ufg_depth(sample: &Sample, queries: &[Element], desc: &ClosureDescriptor, w: &Weights) -> Result<DepthResult> {
    ufg_depth_with(sample, queries, desc, w, &CountOptions::default())
}

pub fn ufg_depth_with(
    sample: &Sample,
    queries: &[Element],
    desc: &ClosureDescriptor,
    w: &Weights,
    opts: &CountOptions,
) -> Result<DepthResult> {
    let counts = count_tuples_with(sample, queries, desc, opts)?;
    Ok(depth_from_counts(&counts, w))
}

/// Depth under a known distribution on a finite support: the empirical depth of the
/// support weighted by its probabilities. Tuples with a repeated object are never
/// premises, so the ratios a_j / b_j are the conditional probabilities.
pub fn population_depth(
    support: &[(Element, Rational)],
    queries: &[Element],
    desc: &ClosureDescriptor,
    w: &Weights,
) -> Result<DepthResult> {
    ufg_depth(&Sample::weighted(support.iter().cloned())?, queries, desc, w)
}

/// D^qc(g) = max{α : g ∈ γ(Cont_α)} over the distinct values α of D on the candidates.
pub fn quasiconcave_hull(depths: &[(Element, Rational)], desc: &ClosureDescriptor) -> Result<Vec<Rational>> {
    let levels: BTreeSet<&Rational> = depths.iter().map(|(_, d)| d).collect();
    let mut out: Vec<Option<Rational>> = vec![None; depths.len()];
    for alpha in levels.into_iter().rev() {
        let contour: Vec<Element> = depths
            .iter()
            .filter(|(_, d)| d >= alpha)
            .map(|(g, _)| g.clone())
            .collect();
        let closed = desc.close(&contour)?;
        for (slot, (g, _)) in out.iter_mut().zip(depths) {
            if slot.is_none() && closed.contains(g)? {
                *slot = Some(alpha.clone());
            }
        }
    }
    Ok(out.into_iter().map(|x| x.expect("every candidate is in its own contour")).collect())
}

/// T(g) = 1 − max{P(E) : E extent, g ∉ E} with P the normalized sample weights.
pub fn generalized_tukey(sample: &Sample, queries: &[Element], desc: &ClosureDescriptor) -> Result<Vec<Rational>> {
    let total = sample.total_weight();
    if total.is_zero() {
        return input("generalized Tukey depth needs positive total weight");
    }
    for g in sample.elements().iter().chain(queries) {
        desc.validate(g)?;
    }
    if let Some(f) = desc.downcast::<FiniteContextClosure>() {
        let ctx = f.context();
        let extents = ctx.extents()?;
        let mut mass = vec![Rational::zero(); ctx.num_objects()];
        for o in sample.observations() {
            mass[o.element.as_object().expect("validated")] += &o.weight;
        }
        let ext_mass: Vec<Rational> = extents.iter().map(|e| e.ones().map(|i| &mass[i]).sum()).collect();
        return Ok(queries
            .iter()
            .map(|q| {
                let i = q.as_object().expect("validated");
                let worst = extents
                    .iter()
                    .zip(&ext_mass)
                    .filter(|(e, _)| !e.contains(i))
                    .map(|(_, m)| m)
                    .max()
                    .cloned()
                    .unwrap_or_else(Rational::zero);
                Rational::one() - worst / &total
            })
            .collect());
    }
    if desc.downcast::<HierPrefixClosure>().is_some() {
        let mut mass: BTreeMap<String, Rational> = BTreeMap::new();
        for o in sample.observations() {
            let code = &o.element.as_coded().expect("validated").code;
            for l in 0..=code.len() {
                *mass.entry(code[..l].to_string()).or_insert_with(Rational::zero) += &o.weight;
            }
        }
        return Ok(queries
            .iter()
            .map(|q| {
                let code = &q.as_coded().expect("validated").code;
                let worst = mass
                    .iter()
                    .filter(|(p, _)| !code.starts_with(p.as_str()))
                    .map(|(_, m)| m)
                    .max()
                    .cloned()
                    .unwrap_or_else(Rational::zero);
                Rational::one() - worst / &total
            })
            .collect());
    }
    Err(UfgError::Unsupported(format!(
        "generalized Tukey depth needs a finite context or hierarchical codes, not {}",
        desc.name()
    )))
}

fn code_weights(sample: &Sample) -> Result<BTreeMap<String, Rational>> {
    if sample.is_empty() {
        return input("empty sample");
    }
    let mut out: BTreeMap<String, Rational> = BTreeMap::new();
    let mut len = None;
    for o in sample.observations() {
        let c = o
            .element
            .as_coded()
            .ok_or_else(|| UfgError::Input(format!("observation {:?} is not coded", o.id)))?;
        if *len.get_or_insert(c.code.len()) != c.code.len() {
            return input("codes of different lengths");
        }
        *out.entry(c.code.clone()).or_insert_with(Rational::zero) += &o.weight;
    }
    Ok(out)
}

fn argmax<'a>(w: impl Iterator<Item = (&'a String, &'a Rational)> + Clone) -> Vec<String> {
    match w.clone().map(|(_, x)| x).max() {
        Some(m) => w.filter(|(_, x)| *x == m).map(|(c, _)| c.clone()).collect(),
        None => Vec::new(),
    }
}

/// Codes of maximal total weight.
pub fn finest_mode(sample: &Sample) -> Result<Vec<String>> {
    Ok(argmax(code_weights(sample)?.iter()))
}

/// Follows the modal digit level by level; ties branch.
pub fn topdown_median(sample: &Sample) -> Result<Vec<String>> {
    let codes = code_weights(sample)?;
    let levels = codes.keys().next().map_or(0, |c| c.len());
    let mut frontier = vec![String::new()];
    for l in 0..levels {
        let mut next = Vec::new();
        for p in &frontier {
            let mut child: BTreeMap<String, Rational> = BTreeMap::new();
            for (c, w) in codes.range(p.clone()..).take_while(|(c, _)| c.starts_with(p.as_str())) {
                *child.entry(c[..=l].to_string()).or_insert_with(Rational::zero) += w;
            }
            next.extend(argmax(child.iter()));
        }
        frontier = next;
    }
    Ok(frontier)
}
