//! Finite formal contexts (G, M, I) and their derivation operators.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::io::Read;

use fixedbitset::FixedBitSet;

use crate::error::{input, Result, UfgError};

pub const DEFAULT_EXTENT_LIMIT: usize = 24;
pub const VC_GROUND_LIMIT: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormalContext {
    objects: Vec<String>,
    attributes: Vec<String>,
    rows: Vec<FixedBitSet>,
    cols: Vec<FixedBitSet>,
    object_index: HashMap<String, usize>,
    attribute_index: HashMap<String, usize>,
}

impl FormalContext {
    pub fn new(
        objects: Vec<String>,
        attributes: Vec<String>,
        incidence: Vec<Vec<bool>>,
    ) -> Result<Self> {
        let object_index = index_of(&objects, "object")?;
        let attribute_index = index_of(&attributes, "attribute")?;
        if incidence.len() != objects.len() {
            return input(format!(
                "incidence has {} rows for {} objects",
                incidence.len(),
                objects.len()
            ));
        }
        let mut rows = Vec::with_capacity(objects.len());
        let mut cols = vec![FixedBitSet::with_capacity(objects.len()); attributes.len()];
        for (g, row) in incidence.iter().enumerate() {
            if row.len() != attributes.len() {
                return input(format!(
                    "incidence row {} has {} cells for {} attributes",
                    g,
                    row.len(),
                    attributes.len()
                ));
            }
            let mut bits = FixedBitSet::with_capacity(attributes.len());
            for (m, &x) in row.iter().enumerate() {
                if x {
                    bits.insert(m);
                    cols[m].insert(g);
                }
            }
            rows.push(bits);
        }
        Ok(FormalContext {
            objects,
            attributes,
            rows,
            cols,
            object_index,
            attribute_index,
        })
    }

    /// Context with generated ids `g1..` and `m1..`; each row string holds `0`/`1` cells.
    pub fn from_rows(rows: &[&str]) -> Result<Self> {
        let width = rows.first().map_or(0, |r| r.len());
        let objects = (1..=rows.len()).map(|i| format!("g{i}")).collect();
        let attributes = (1..=width).map(|i| format!("m{i}")).collect();
        let mut incidence = Vec::new();
        for r in rows {
            let mut row = Vec::new();
            for c in r.chars() {
                match c {
                    '0' => row.push(false),
                    '1' => row.push(true),
                    _ => return input(format!("bad cell {c:?}")),
                }
            }
            incidence.push(row);
        }
        Self::new(objects, attributes, incidence)
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn attributes(&self) -> &[String] {
        &self.attributes
    }

    pub fn num_objects(&self) -> usize {
        self.objects.len()
    }

    pub fn num_attributes(&self) -> usize {
        self.attributes.len()
    }

    pub fn incident(&self, g: usize, m: usize) -> bool {
        self.rows[g].contains(m)
    }

    pub fn row(&self, g: usize) -> &FixedBitSet {
        &self.rows[g]
    }

    pub fn object_index(&self, id: &str) -> Option<usize> {
        self.object_index.get(id).copied()
    }

    pub fn attribute_index(&self, id: &str) -> Option<usize> {
        self.attribute_index.get(id).copied()
    }

    pub fn object_set<S: AsRef<str>>(&self, ids: &[S]) -> Result<FixedBitSet> {
        let mut set = FixedBitSet::with_capacity(self.objects.len());
        for id in ids {
            let id = id.as_ref();
            match self.object_index(id) {
                Some(i) => set.insert(i),
                None => return input(format!("unknown object id {id:?}")),
            }
        }
        Ok(set)
    }

    pub fn attribute_set<S: AsRef<str>>(&self, ids: &[S]) -> Result<FixedBitSet> {
        let mut set = FixedBitSet::with_capacity(self.attributes.len());
        for id in ids {
            let id = id.as_ref();
            match self.attribute_index(id) {
                Some(i) => set.insert(i),
                None => return input(format!("unknown attribute id {id:?}")),
            }
        }
        Ok(set)
    }

    pub fn full_objects(&self) -> FixedBitSet {
        let mut s = FixedBitSet::with_capacity(self.objects.len());
        s.insert_range(..);
        s
    }

    /// Object ids of a set, sorted by id.
    pub fn object_ids(&self, set: &FixedBitSet) -> Vec<String> {
        let mut ids: Vec<String> = set.ones().map(|i| self.objects[i].clone()).collect();
        ids.sort();
        ids
    }

    pub fn attribute_ids(&self, set: &FixedBitSet) -> Vec<String> {
        let mut ids: Vec<String> = set.ones().map(|i| self.attributes[i].clone()).collect();
        ids.sort();
        ids
    }

    /// Ψ: attributes shared by every object of the set.
    pub fn intent(&self, objects: &FixedBitSet) -> FixedBitSet {
        let mut out = FixedBitSet::with_capacity(self.attributes.len());
        out.insert_range(..);
        for g in objects.ones() {
            out.intersect_with(&self.rows[g]);
        }
        out
    }

    /// Φ: objects having every attribute of the set.
    pub fn extent(&self, attributes: &FixedBitSet) -> FixedBitSet {
        let mut out = self.full_objects();
        for m in attributes.ones() {
            out.intersect_with(&self.cols[m]);
        }
        out
    }

    /// γ = Φ∘Ψ.
    pub fn close(&self, objects: &FixedBitSet) -> FixedBitSet {
        self.extent(&self.intent(objects))
    }

    pub fn derive_intent<S: AsRef<str>>(&self, ids: &[S]) -> Result<Vec<String>> {
        let set = self.object_set(ids)?;
        Ok(self.attribute_ids(&self.intent(&set)))
    }

    pub fn derive_extent<S: AsRef<str>>(&self, ids: &[S]) -> Result<Vec<String>> {
        let set = self.attribute_set(ids)?;
        Ok(self.object_ids(&self.extent(&set)))
    }

    pub fn closure<S: AsRef<str>>(&self, ids: &[S]) -> Result<Vec<String>> {
        let set = self.object_set(ids)?;
        Ok(self.object_ids(&self.close(&set)))
    }

    pub fn extents(&self) -> Result<Vec<FixedBitSet>> {
        self.extents_with_limit(DEFAULT_EXTENT_LIMIT)
    }

    /// All distinct Φ(B), B ⊆ M, in canonical order (by size, then by sorted ids).
    ///
    /// Works attribute by attribute: the family of Φ(B) is the closure of {G} under
    /// intersection with the attribute columns, de-duplicated as it grows.
    pub fn extents_with_limit(&self, limit: usize) -> Result<Vec<FixedBitSet>> {
        if self.objects.len() > limit && self.attributes.len() > limit {
            return Err(UfgError::Resource(format!(
                "extent enumeration limited to contexts with at most {limit} objects or {limit} attributes"
            )));
        }
        let mut seen: HashSet<FixedBitSet> = HashSet::new();
        let mut family = vec![self.full_objects()];
        seen.insert(self.full_objects());
        for col in &self.cols {
            let mut fresh = Vec::new();
            for e in &family {
                let mut x = e.clone();
                x.intersect_with(col);
                if seen.insert(x.clone()) {
                    fresh.push(x);
                }
            }
            family.extend(fresh);
        }
        let mut keyed: Vec<(usize, Vec<String>, FixedBitSet)> = family
            .into_iter()
            .map(|e| (e.count_ones(..), self.object_ids(&e), e))
            .collect();
        keyed.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
        Ok(keyed.into_iter().map(|k| k.2).collect())
    }

    pub fn enumerate_extents(&self) -> Result<Vec<Vec<String>>> {
        Ok(self
            .extents()?
            .iter()
            .map(|e| self.object_ids(e))
            .collect())
    }

    /// Parses a cross table: header row of attribute ids after a leading label cell,
    /// then one row per object with its id followed by `0`/`1` cells.
    pub fn from_csv<R: Read>(reader: R, label: &str) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers = rdr
            .headers()
            .map_err(|e| UfgError::ingest(label, 1, e.to_string()))?
            .clone();
        if headers.is_empty() {
            return Err(UfgError::EmptySample {
                path: label.to_string(),
            });
        }
        let attributes: Vec<String> = headers.iter().skip(1).map(str::to_string).collect();
        let mut objects = Vec::new();
        let mut incidence = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(|e| {
                let line = e.position().map_or(0, |p| p.line());
                UfgError::ingest(label, line, e.to_string())
            })?;
            let line = rec.position().map_or(0, |p| p.line());
            if rec.len() != attributes.len() + 1 {
                return Err(UfgError::ingest(
                    label,
                    line,
                    format!("expected {} cells, found {}", attributes.len() + 1, rec.len()),
                ));
            }
            let id = rec[0].to_string();
            if id.is_empty() {
                return Err(UfgError::ingest(label, line, "empty object id"));
            }
            let mut row = Vec::with_capacity(attributes.len());
            for (k, cell) in rec.iter().skip(1).enumerate() {
                match cell {
                    "0" => row.push(false),
                    "1" => row.push(true),
                    other => {
                        return Err(UfgError::ingest(
                            label,
                            line,
                            format!(
                                "cell for attribute {:?} must be 0 or 1, found {other:?}",
                                attributes[k]
                            ),
                        ))
                    }
                }
            }
            objects.push(id);
            incidence.push(row);
        }
        if objects.is_empty() {
            return Err(UfgError::EmptySample {
                path: label.to_string(),
            });
        }
        Self::new(objects, attributes, incidence).map_err(|e| match e {
            UfgError::Input(m) => UfgError::ingest(label, 1, m),
            other => other,
        })
    }
}

fn index_of(ids: &[String], what: &str) -> Result<HashMap<String, usize>> {
    let mut map = HashMap::with_capacity(ids.len());
    for (i, id) in ids.iter().enumerate() {
        if map.insert(id.clone(), i).is_some() {
            return input(format!("duplicate {what} id {id:?}"));
        }
    }
    Ok(map)
}

/// A → B over object sets: every extent containing A contains B.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Implication {
    pub premise: BTreeSet<String>,
    pub conclusion: BTreeSet<String>,
}

impl Implication {
    pub fn new<S: AsRef<str>>(ctx: &FormalContext, premise: &[S], conclusion: &[S]) -> Result<Self> {
        ctx.object_set(premise)?;
        ctx.object_set(conclusion)?;
        Ok(Implication {
            premise: premise.iter().map(|s| s.as_ref().to_string()).collect(),
            conclusion: conclusion.iter().map(|s| s.as_ref().to_string()).collect(),
        })
    }

    /// A → γ(A).
    pub fn to_closure<S: AsRef<str>>(ctx: &FormalContext, premise: &[S]) -> Result<Self> {
        let concl = ctx.closure(premise)?;
        Ok(Implication {
            premise: premise.iter().map(|s| s.as_ref().to_string()).collect(),
            conclusion: concl.into_iter().collect(),
        })
    }

    /// Whether the implication holds in the context: γ(B) ⊆ γ(A).
    pub fn holds(&self, ctx: &FormalContext) -> Result<bool> {
        let a: Vec<&String> = self.premise.iter().collect();
        let b: Vec<&String> = self.conclusion.iter().collect();
        let ga = ctx.close(&ctx.object_set(&a)?);
        let gb = ctx.close(&ctx.object_set(&b)?);
        Ok(gb.is_subset(&ga))
    }
}

pub fn respects(d: &BTreeSet<String>, imp: &Implication) -> bool {
    !imp.premise.is_subset(d) || imp.conclusion.is_subset(d)
}

/// Largest k such that some k-subset of `ground` is shattered by `sets`.
pub fn vc_dimension(sets: &[FixedBitSet], ground: &FixedBitSet) -> Result<usize> {
    let points: Vec<usize> = ground.ones().collect();
    if points.len() > VC_GROUND_LIMIT {
        return Err(UfgError::Resource(format!(
            "VC dimension computed only for grounds of at most {VC_GROUND_LIMIT} elements"
        )));
    }
    let k = points.len();
    let mut traces: Vec<u32> = sets
        .iter()
        .map(|s| {
            points
                .iter()
                .enumerate()
                .filter(|(_, &p)| s.contains(p))
                .fold(0u32, |acc, (i, _)| acc | (1 << i))
        })
        .collect();
    traces.sort_unstable();
    traces.dedup();
    if traces.is_empty() {
        return Ok(0);
    }
    let mut shattered: HashSet<u32> = HashSet::from([0u32]);
    let mut best = 0;
    for d in 1..=k {
        if traces.len() < (1usize << d) {
            break;
        }
        let mut level = HashSet::new();
        for &s in &shattered {
            for i in 0..k {
                let bit = 1u32 << i;
                // extend only by elements above the current top bit, so each set is built once
                if s & bit != 0 || (s != 0 && bit < (1 << (31 - s.leading_zeros()))) {
                    continue;
                }
                let t = s | bit;
                let hereditary = (0..k)
                    .filter(|j| t & (1 << j) != 0)
                    .all(|j| shattered.contains(&(t & !(1 << j))));
                if hereditary && is_shattered(&traces, t) {
                    level.insert(t);
                }
            }
        }
        if level.is_empty() {
            break;
        }
        best = d;
        shattered = level;
    }
    Ok(best)
}

fn is_shattered(traces: &[u32], s: u32) -> bool {
    let need = 1usize << s.count_ones();
    let mut seen = HashSet::with_capacity(need);
    for &t in traces {
        seen.insert(t & s);
        if seen.len() == need {
            return true;
        }
    }
    false
}
