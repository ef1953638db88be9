//! Closures read straight off an explicit incidence table.

use std::collections::{BTreeMap, BTreeSet};

use crate::closures::{Cardinality, CodedObject, GroundMode, HierPrefixClosure};
use crate::context::FormalContext;
use crate::error::{Result, UfgError};

use super::FamilyMode;

/// Objects × attributes, row-major.
#[derive(Clone, Debug)]
pub struct Table {
    pub rows: Vec<Vec<bool>>,
    pub n_attributes: usize,
}

impl Table {
    pub fn from_context(ctx: &FormalContext) -> Self {
        let rows = (0..ctx.num_objects())
            .map(|g| (0..ctx.num_attributes()).map(|m| ctx.incident(g, m)).collect())
            .collect();
        Table {
            rows,
            n_attributes: ctx.num_attributes(),
        }
    }

    pub fn n_objects(&self) -> usize {
        self.rows.len()
    }

    /// Attributes shared by all objects in `a`.
    pub fn intent(&self, a: &[usize]) -> Vec<bool> {
        (0..self.n_attributes).map(|m| a.iter().all(|&g| self.rows[g][m])).collect()
    }

    /// Objects carrying every attribute in `b`.
    pub fn extent(&self, b: &[bool]) -> Vec<bool> {
        self.rows
            .iter()
            .map(|row| b.iter().zip(row).all(|(&need, &has)| !need || has))
            .collect()
    }

    pub fn close(&self, a: &[usize]) -> Vec<bool> {
        self.extent(&self.intent(a))
    }

    /// Literal (C1) and (C2) for a set of distinct row indices; returns a witness row.
    pub fn premise(&self, a: &[usize], mode: FamilyMode) -> Result<(bool, Option<usize>)> {
        let k = a.len();
        if k == 0 {
            return Err(UfgError::Input("oracle premise test needs a nonempty set".into()));
        }
        let closed = self.close(a);
        let proper = (0..self.n_objects()).any(|g| closed[g] && !a.contains(&g));
        if !proper {
            return Ok((false, None));
        }
        let sub = |mask: u32| -> Vec<usize> { (0..k).filter(|i| mask & (1 << i) != 0).map(|i| a[i]).collect() };
        let full = (1u32 << k) - 1;
        match mode {
            FamilyMode::MaximalOnly => {
                let parts: Vec<Vec<bool>> = (0..k).map(|i| self.close(&sub(full ^ (1 << i)))).collect();
                let free = (0..self.n_objects()).find(|&g| closed[g] && parts.iter().all(|p| !p[g]));
                Ok((free.is_some(), free))
            }
            FamilyMode::AllFamilies => {
                if k > 4 {
                    return Err(UfgError::Resource("all-families mode handles at most 4 elements".into()));
                }
                if self.n_objects() > 128 {
                    return Err(UfgError::Resource("all-families mode handles at most 128 objects".into()));
                }
                let bits = |v: &[bool]| v.iter().enumerate().fold(0u128, |acc, (g, &x)| if x { acc | 1 << g } else { acc });
                let target = bits(&closed);
                let parts: Vec<u128> = (0..full).map(|m| bits(&self.close(&sub(m)))).collect();
                let n_fam = 1usize << parts.len();
                let mut union = vec![0u128; n_fam];
                for f in 1..n_fam {
                    let low = f.trailing_zeros() as usize;
                    union[f] = union[f & (f - 1)] | parts[low];
                }
                if union.iter().any(|&u| u == target) {
                    return Ok((false, None));
                }
                let free = (0..self.n_objects()).find(|&g| closed[g] && union[n_fam - 1] & (1 << g) == 0);
                Ok((true, free))
            }
        }
    }
}

/// Explicit table of a hierarchical ground space: one row per object copy, one column
/// per prefix of a ground code.
#[derive(Clone, Debug)]
pub struct HierTable {
    pub table: Table,
    pub row_codes: Vec<String>,
    pub prefixes: Vec<String>,
    /// Rows assigned to the given objects, in input order.
    pub rows_of: Vec<usize>,
}

pub const HIER_CODE_LIMIT: usize = 10_000;

impl HierTable {
    /// Infinitely many objects per code are represented by one more copy than the
    /// number of given objects.
    pub fn build(h: &HierPrefixClosure, objects: &[CodedObject]) -> Result<HierTable> {
        let ground: Vec<String> = match h.mode() {
            GroundMode::Catalog => h.catalog().iter().cloned().collect(),
            GroundMode::Sample => h.ground_codes().cloned().collect(),
        };
        if ground.len() > HIER_CODE_LIMIT {
            return Err(UfgError::Resource(format!(
                "hierarchical oracle handles at most {HIER_CODE_LIMIT} codes"
            )));
        }
        let mut prefixes: BTreeSet<String> = BTreeSet::new();
        for c in &ground {
            for l in 0..=c.len() {
                prefixes.insert(c[..l].to_string());
            }
        }
        let prefixes: Vec<String> = prefixes.into_iter().collect();
        let mut wanted: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
        for (i, o) in objects.iter().enumerate() {
            wanted.entry(o.code.as_str()).or_default().push(i);
        }
        let mut row_codes = Vec::new();
        let mut rows_of = vec![usize::MAX; objects.len()];
        for c in &ground {
            let copies = match h.multiplicity(c) {
                Cardinality::Infinite => (objects.len() + 1).max(2),
                Cardinality::Finite(k) => k,
            };
            let want = wanted.remove(c.as_str()).unwrap_or_default();
            if want.len() > copies {
                return Err(UfgError::Input(format!("more objects with code {c} than the ground space holds")));
            }
            for (copy, &i) in want.iter().enumerate() {
                rows_of[i] = row_codes.len() + copy;
            }
            for _ in 0..copies {
                row_codes.push(c.clone());
            }
        }
        if let Some((c, _)) = wanted.into_iter().next() {
            return Err(UfgError::Input(format!("code {c} is not in the ground space")));
        }
        if row_codes.len().saturating_mul(prefixes.len()) > 4_000_000 {
            return Err(UfgError::Resource("hierarchical oracle table too large".into()));
        }
        let rows = row_codes
            .iter()
            .map(|c| prefixes.iter().map(|p| c.starts_with(p.as_str())).collect())
            .collect();
        Ok(HierTable {
            table: Table {
                rows,
                n_attributes: prefixes.len(),
            },
            row_codes,
            prefixes,
            rows_of,
        })
    }

    /// Whether an object with `code` carries every attribute shared by `codes`.
    pub fn contains(&self, codes: &[&str], code: &str) -> bool {
        self.prefixes
            .iter()
            .filter(|p| codes.iter().all(|c| c.starts_with(p.as_str())))
            .all(|p| code.starts_with(p.as_str()))
    }
}
