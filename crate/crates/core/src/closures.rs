//! Closure operators of the scaling families and their products.
//!
//! Each family implements [`ClosureFamily`]; a [`ClosureDescriptor`] is a shared handle
//! to one of them. Families never materialize attributes: the plane uses convex hulls,
//! the real line closed intervals, nominal data "one category or all", and
//! hierarchical codes their longest common prefix.

use std::any::Any;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::{Arc, OnceLock};

use fixedbitset::FixedBitSet;

use crate::context::{vc_dimension, FormalContext, VC_GROUND_LIMIT};
use crate::error::{input, Result, UfgError};
use crate::geometry::{convex_hull, covers_hull_fast, ConvexPoly, Point2};
use crate::rational::Rational;

/// An object identified by its code; equal codes with different `object` keys are
/// distinct objects carrying the same attributes.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CodedObject {
    pub code: String,
    pub object: String,
}

impl CodedObject {
    pub fn new(code: impl Into<String>, object: impl Into<String>) -> Self {
        CodedObject {
            code: code.into(),
            object: object.into(),
        }
    }
}

/// An element of some ground space.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Element {
    /// Object index of a finite context.
    Object(usize),
    Point(Point2),
    Category(String),
    Value(Rational),
    Coded(CodedObject),
    Tuple(Vec<Element>),
}

impl Element {
    pub fn mixed(point: Point2, category: impl Into<String>, value: Rational) -> Self {
        Element::Tuple(vec![
            Element::Point(point),
            Element::Category(category.into()),
            Element::Value(value),
        ])
    }

    pub fn as_point(&self) -> Option<&Point2> {
        match self {
            Element::Point(p) => Some(p),
            _ => None,
        }
    }

    pub fn as_category(&self) -> Option<&str> {
        match self {
            Element::Category(c) => Some(c),
            _ => None,
        }
    }

    pub fn as_value(&self) -> Option<&Rational> {
        match self {
            Element::Value(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_coded(&self) -> Option<&CodedObject> {
        match self {
            Element::Coded(c) => Some(c),
            _ => None,
        }
    }

    pub fn as_object(&self) -> Option<usize> {
        match self {
            Element::Object(i) => Some(*i),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CategorySet {
    Single(String),
    All,
}

/// Symbolic γ(A).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClosedSet {
    Empty,
    Everything,
    Hull(ConvexPoly),
    Categories(CategorySet),
    Interval(Rational, Rational),
    /// Objects whose code starts with the prefix; the empty prefix is the whole space.
    /// A full-length prefix is the class of one code (all its duplicates).
    Prefix(String),
    Objects(FixedBitSet),
    Product(Vec<ClosedSet>),
}

impl ClosedSet {
    /// Closed membership: hull boundaries and interval endpoints count as inside.
    pub fn contains(&self, g: &Element) -> Result<bool> {
        let mismatch = || UfgError::Input(format!("element {g:?} does not fit closed set {self:?}"));
        Ok(match self {
            ClosedSet::Empty => false,
            ClosedSet::Everything => true,
            ClosedSet::Hull(h) => h.contains(g.as_point().ok_or_else(mismatch)?),
            ClosedSet::Categories(CategorySet::All) => {
                g.as_category().ok_or_else(mismatch)?;
                true
            }
            ClosedSet::Categories(CategorySet::Single(c)) => g.as_category().ok_or_else(mismatch)? == c,
            ClosedSet::Interval(lo, hi) => {
                let v = g.as_value().ok_or_else(mismatch)?;
                lo <= v && v <= hi
            }
            ClosedSet::Prefix(p) => g.as_coded().ok_or_else(mismatch)?.code.starts_with(p.as_str()),
            ClosedSet::Objects(set) => {
                let i = g.as_object().ok_or_else(mismatch)?;
                if i >= set.len() {
                    return Err(mismatch());
                }
                set.contains(i)
            }
            ClosedSet::Product(parts) => {
                let Element::Tuple(xs) = g else {
                    return Err(mismatch());
                };
                if xs.len() != parts.len() {
                    return Err(mismatch());
                }
                for (part, x) in parts.iter().zip(xs) {
                    if !part.contains(x)? {
                        return Ok(false);
                    }
                }
                true
            }
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cardinality {
    Finite(usize),
    Infinite,
}

impl Cardinality {
    pub fn exceeds(&self, n: usize) -> bool {
        match self {
            Cardinality::Finite(k) => *k > n,
            Cardinality::Infinite => true,
        }
    }

    fn times(self, other: Cardinality) -> Cardinality {
        match (self, other) {
            (Cardinality::Finite(0), _) | (_, Cardinality::Finite(0)) => Cardinality::Finite(0),
            (Cardinality::Finite(a), Cardinality::Finite(b)) => {
                a.checked_mul(b).map_or(Cardinality::Infinite, Cardinality::Finite)
            }
            _ => Cardinality::Infinite,
        }
    }
}

/// Outcome of asking whether γ(A) ∖ ⋃_{r∈T} γ(A∖{r}) is nonempty.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Escape {
    Covered,
    Escapes {
        witness: Option<Element>,
        /// For products: component index chosen for each removed index, in `T` order.
        assignment: Option<Vec<usize>>,
    },
}

impl Escape {
    pub fn escapes(&self) -> bool {
        matches!(self, Escape::Escapes { .. })
    }

    fn with(witness: Option<Element>) -> Self {
        Escape::Escapes {
            witness,
            assignment: None,
        }
    }
}

/// A closure operator on some ground space.
pub trait ClosureFamily: fmt::Debug + Send + Sync + Any {
    fn name(&self) -> &'static str;

    /// Errors if `g` is not in the ground space.
    fn validate(&self, g: &Element) -> Result<()>;

    /// γ(A) for nonempty A.
    fn close(&self, a: &[Element]) -> Result<ClosedSet>;

    /// |γ(A)| for nonempty A, used by (C1).
    fn closure_size(&self, a: &[Element]) -> Result<Cardinality>;

    /// Decides whether γ(A) ∖ ⋃_{r∈removed} γ(A∖{a_r}) is nonempty, where γ(∅) = Φ(M).
    /// `a` holds pairwise distinct elements; `removed` indexes into `a`.
    fn escape(&self, a: &[Element], removed: &[usize]) -> Result<Escape>;

    fn max_premise_bound(&self) -> Result<usize>;

    fn as_any(&self) -> &dyn Any;
}

/// Shared handle to a closure family.
#[derive(Clone, Debug)]
pub struct ClosureDescriptor(Arc<dyn ClosureFamily>);

impl std::ops::Deref for ClosureDescriptor {
    type Target = dyn ClosureFamily;

    fn deref(&self) -> &Self::Target {
        &*self.0
    }
}

impl ClosureDescriptor {
    pub fn from_family(f: impl ClosureFamily) -> Self {
        ClosureDescriptor(Arc::new(f))
    }

    pub fn finite(ctx: FormalContext) -> Self {
        Self::from_family(FiniteContextClosure::new(ctx, None))
    }

    pub fn finite_with_cap(ctx: FormalContext, cap: usize) -> Self {
        Self::from_family(FiniteContextClosure::new(ctx, Some(cap)))
    }

    pub fn nominal<S: Into<String>>(categories: impl IntoIterator<Item = S>) -> Result<Self> {
        Ok(Self::from_family(NominalClosure::new(categories)?))
    }

    pub fn interordinal() -> Self {
        Self::from_family(InterordinalClosure)
    }

    pub fn convex2d() -> Self {
        Self::from_family(ConvexHullClosure)
    }

    pub fn hier(h: HierPrefixClosure) -> Self {
        Self::from_family(h)
    }

    pub fn product(components: Vec<ClosureDescriptor>, cap: Option<usize>) -> Result<Self> {
        Ok(Self::from_family(ProductClosure::new(components, cap)?))
    }

    /// Plane × nominal × real line, the scaling of mixed spatial data.
    pub fn mixed<S: Into<String>>(categories: impl IntoIterator<Item = S>) -> Result<Self> {
        Self::product(
            vec![Self::convex2d(), Self::nominal(categories)?, Self::interordinal()],
            None,
        )
    }

    pub fn downcast<T: 'static>(&self) -> Option<&T> {
        self.0.as_any().downcast_ref::<T>()
    }
}

// ---------------------------------------------------------------------------
// Finite contexts

#[derive(Debug)]
pub struct FiniteContextClosure {
    ctx: FormalContext,
    cap: Option<usize>,
    bound: OnceLock<std::result::Result<usize, UfgError>>,
}

impl FiniteContextClosure {
    pub fn new(ctx: FormalContext, cap: Option<usize>) -> Self {
        FiniteContextClosure {
            ctx,
            cap,
            bound: OnceLock::new(),
        }
    }

    pub fn context(&self) -> &FormalContext {
        &self.ctx
    }

    fn objects(&self, a: &[Element]) -> Result<FixedBitSet> {
        let mut set = FixedBitSet::with_capacity(self.ctx.num_objects());
        for g in a {
            self.validate(g)?;
            set.insert(g.as_object().unwrap());
        }
        Ok(set)
    }
}

/// γ(A) ∖ ⋃_{r∈removed} γ(A∖{a_r}) over a finite context, as a bit set.
pub(crate) fn finite_escape_set(ctx: &FormalContext, a: &[usize], removed: &[usize]) -> FixedBitSet {
    let mut all = FixedBitSet::with_capacity(ctx.num_objects());
    for &g in a {
        all.insert(g);
    }
    let mut diff = ctx.close(&all);
    for &r in removed {
        let mut rest = all.clone();
        rest.set(a[r], false);
        diff.difference_with(&ctx.close(&rest));
    }
    diff
}

impl ClosureFamily for FiniteContextClosure {
    fn name(&self) -> &'static str {
        "finite"
    }

    fn validate(&self, g: &Element) -> Result<()> {
        match g {
            Element::Object(i) if *i < self.ctx.num_objects() => Ok(()),
            _ => input(format!("{g:?} is not an object of the context")),
        }
    }

    fn close(&self, a: &[Element]) -> Result<ClosedSet> {
        Ok(ClosedSet::Objects(self.ctx.close(&self.objects(a)?)))
    }

    fn closure_size(&self, a: &[Element]) -> Result<Cardinality> {
        Ok(Cardinality::Finite(self.ctx.close(&self.objects(a)?).count_ones(..)))
    }

    fn escape(&self, a: &[Element], removed: &[usize]) -> Result<Escape> {
        self.objects(a)?;
        let idx: Vec<usize> = a.iter().map(|g| g.as_object().unwrap()).collect();
        let diff = finite_escape_set(&self.ctx, &idx, removed);
        Ok(match diff.ones().next() {
            Some(b) => Escape::with(Some(Element::Object(b))),
            None => Escape::Covered,
        })
    }

    fn max_premise_bound(&self) -> Result<usize> {
        self.bound
            .get_or_init(|| {
                let vc = if self.ctx.num_objects() <= VC_GROUND_LIMIT {
                    self.ctx
                        .extents()
                        .and_then(|ext| vc_dimension(&ext, &self.ctx.full_objects()))
                        .ok()
                } else {
                    None
                };
                match (vc, self.cap) {
                    (Some(v), _) => Ok(v.max(1)),
                    (None, Some(c)) => Ok(c),
                    (None, None) => Err(UfgError::Config(format!(
                        "context with {} objects is too large for the VC bound; supply a premise-size cap",
                        self.ctx.num_objects()
                    ))),
                }
            })
            .clone()
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}

// ---------------------------------------------------------------------------
// Nominal scaling

#[derive(Debug, Clone)]
pub struct NominalClosure {
    categories: Vec<String>,
}

impl NominalClosure {
    pub fn new<S: Into<String>>(categories: impl IntoIterator<Item = S>) -> Result<Self> {
        let categories: Vec<String> = categories.into_iter().map(Into::into).collect();
        if categories.is_empty() {
            return input("nominal scaling needs at least one category");
        }
        let distinct: BTreeSet<&String> = categories.iter().collect();
        if distinct.len() != categories.len() {
            return input("nominal categories must be distinct");
        }
        Ok(NominalClosure { categories })
    }

    pub fn categories(&self) -> &[String] {
        &self.categories
    }

    fn cat<'a>(&self, g: &'a Element) -> Result<&'a str> {
        match g {
            Element::Category(c) if self.categories.iter().any(|x| x == c) => Ok(c),
            _ => input(format!("{g:?} is not one of the categories {:?}", self.categories)),
        }
    }

    fn close_cats(&self, cats: &[&str]) -> ClosedSet {
        match cats.first() {
            None if self.categories.len() == 1 => ClosedSet::Categories(CategorySet::All),
            None => ClosedSet::Empty,
            Some(c) if cats.iter().all(|x| x == c) => {
                ClosedSet::Categories(CategorySet::Single(c.to_string()))
            }
            Some(_) => ClosedSet::Categories(CategorySet::All),
        }
    }
}

impl ClosureFamily for NominalClosure {
    fn name(&self) -> &'static str {
        "nominal"
    }

    fn validate(&self, g: &Element) -> Result<()> {
        self.cat(g).map(|_| ())
    }

    fn close(&self, a: &[Element]) -> Result<ClosedSet> {
        let cats = a.iter().map(|g| self.cat(g)).collect::<Result<Vec<_>>>()?;
        Ok(self.close_cats(&cats))
    }

    fn closure_size(&self, a: &[Element]) -> Result<Cardinality> {
        Ok(match self.close(a)? {
            ClosedSet::Categories(CategorySet::Single(_)) => Cardinality::Finite(1),
            ClosedSet::Empty => Cardinality::Finite(0),
            _ => Cardinality::Finite(self.categories.len()),
        })
    }

    fn escape(&self, a: &[Element], removed: &[usize]) -> Result<Escape> {
        let cats = a.iter().map(|g| self.cat(g)).collect::<Result<Vec<_>>>()?;
        let mut singles: BTreeSet<String> = BTreeSet::new();
        for &r in removed {
            let rest: Vec<&str> = cats.iter().enumerate().filter(|&(i, _)| i != r).map(|(_, c)| *c).collect();
            match self.close_cats(&rest) {
                ClosedSet::Categories(CategorySet::All) => return Ok(Escape::Covered),
                ClosedSet::Categories(CategorySet::Single(c)) => {
                    singles.insert(c);
                }
                _ => {}
            }
        }
        let free = match self.close_cats(&cats) {
            ClosedSet::Categories(CategorySet::Single(c)) => (!singles.contains(&c)).then_some(c),
            _ => self.categories.iter().find(|c| !singles.contains(*c)).cloned(),
        };
        Ok(match free {
            Some(c) => Escape::with(Some(Element::Category(c))),
            None => Escape::Covered,
        })
    }

    fn max_premise_bound(&self) -> Result<usize> {
        Ok(2)
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}

// ---------------------------------------------------------------------------
// Interordinal scaling of the real line

#[derive(Debug, Clone, Copy)]
pub struct InterordinalClosure;

fn values(a: &[Element]) -> Result<Vec<&Rational>> {
    a.iter()
        .map(|g| g.as_value().ok_or_else(|| UfgError::Input(format!("{g:?} is not a real value"))))
        .collect()
}

fn span<'a>(vals: impl Iterator<Item = &'a Rational>) -> Option<(&'a Rational, &'a Rational)> {
    vals.fold(None, |acc, v| match acc {
        None => Some((v, v)),
        Some((lo, hi)) => Some((lo.min(v), hi.max(v))),
    })
}

impl ClosureFamily for InterordinalClosure {
    fn name(&self) -> &'static str {
        "interordinal"
    }

    fn validate(&self, g: &Element) -> Result<()> {
        values(std::slice::from_ref(g)).map(|_| ())
    }

    fn close(&self, a: &[Element]) -> Result<ClosedSet> {
        let v = values(a)?;
        Ok(match span(v.into_iter()) {
            Some((lo, hi)) => ClosedSet::Interval(lo.clone(), hi.clone()),
            None => ClosedSet::Empty,
        })
    }

    fn closure_size(&self, a: &[Element]) -> Result<Cardinality> {
        let v = values(a)?;
        Ok(match span(v.into_iter()) {
            Some((lo, hi)) if lo == hi => Cardinality::Finite(1),
            Some(_) => Cardinality::Infinite,
            None => Cardinality::Finite(0),
        })
    }

    fn escape(&self, a: &[Element], removed: &[usize]) -> Result<Escape> {
        let v = values(a)?;
        let Some((lo, hi)) = span(v.iter().copied()) else {
            return Ok(Escape::Covered);
        };
        let mut spans: Vec<(&Rational, &Rational)> = removed
            .iter()
            .filter_map(|&r| span(v.iter().enumerate().filter(|&(i, _)| i != r).map(|(_, x)| *x)))
            .collect();
        spans.sort();
        let two = Rational::from_integer(2.into());
        let mut it = spans.into_iter();
        let Some((s0, e0)) = it.next() else {
            return Ok(Escape::with(Some(Element::Value(lo.clone()))));
        };
        if s0 > lo {
            return Ok(Escape::with(Some(Element::Value(lo.clone()))));
        }
        let mut reach = e0;
        for (s, e) in it {
            if s > reach {
                return Ok(Escape::with(Some(Element::Value((reach + s) / &two))));
            }
            reach = reach.max(e);
        }
        Ok(if reach < hi {
            Escape::with(Some(Element::Value(hi.clone())))
        } else {
            Escape::Covered
        })
    }

    fn max_premise_bound(&self) -> Result<usize> {
        Ok(2)
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}

// ---------------------------------------------------------------------------
// Closed half-space scaling of the plane

#[derive(Debug, Clone, Copy)]
pub struct ConvexHullClosure;

fn points(a: &[Element]) -> Result<Vec<Point2>> {
    a.iter()
        .map(|g| {
            g.as_point()
                .cloned()
                .ok_or_else(|| UfgError::Input(format!("{g:?} is not a point")))
        })
        .collect()
}

impl ClosureFamily for ConvexHullClosure {
    fn name(&self) -> &'static str {
        "convex2d"
    }

    fn validate(&self, g: &Element) -> Result<()> {
        points(std::slice::from_ref(g)).map(|_| ())
    }

    fn close(&self, a: &[Element]) -> Result<ClosedSet> {
        Ok(match convex_hull(&points(a)?) {
            Some(h) => ClosedSet::Hull(h),
            None => ClosedSet::Empty,
        })
    }

    fn closure_size(&self, a: &[Element]) -> Result<Cardinality> {
        Ok(match convex_hull(&points(a)?) {
            None => Cardinality::Finite(0),
            Some(ConvexPoly::Point(_)) => Cardinality::Finite(1),
            Some(_) => Cardinality::Infinite,
        })
    }

    fn escape(&self, a: &[Element], removed: &[usize]) -> Result<Escape> {
        let pts = points(a)?;
        if removed.is_empty() {
            return Ok(Escape::with(pts.first().cloned().map(Element::Point)));
        }
        for &r in removed {
            if pts.iter().enumerate().any(|(i, q)| i != r && *q == pts[r]) {
                return Ok(Escape::Covered);
            }
        }
        if pts.len() > 8 {
            return input("planar cover test supports at most 8 points");
        }
        let mask = removed.iter().fold(0u8, |m, &r| m | (1 << r));
        Ok(if covers_hull_fast(&pts, mask)? {
            Escape::Covered
        } else {
            Escape::with(None)
        })
    }

    fn max_premise_bound(&self) -> Result<usize> {
        Ok(3)
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}

// ---------------------------------------------------------------------------
// Hierarchical prefix codes

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroundMode {
    /// Every catalog code is part of the ground space.
    Catalog,
    /// Only codes observed in the sample are.
    Sample,
}

#[derive(Debug, Clone)]
pub struct HierPrefixClosure {
    levels: usize,
    catalog: BTreeSet<String>,
    duplicates: bool,
    mode: GroundMode,
    /// Distinct observed objects per code, used in sample mode.
    observed: BTreeMap<String, usize>,
}

impl HierPrefixClosure {
    /// Catalog-mode descriptor. Codes must be digit strings of length `levels`.
    pub fn new<S: Into<String>>(
        catalog: impl IntoIterator<Item = S>,
        levels: usize,
        duplicates: bool,
    ) -> Result<Self> {
        if levels == 0 {
            return input("hierarchical codes need at least one level");
        }
        let mut set = BTreeSet::new();
        for c in catalog {
            let c: String = c.into();
            check_code(&c, levels)?;
            set.insert(c);
        }
        if set.is_empty() {
            return input("empty code catalog");
        }
        Ok(HierPrefixClosure {
            levels,
            catalog: set,
            duplicates,
            mode: GroundMode::Catalog,
            observed: BTreeMap::new(),
        })
    }

    /// Restricts the ground space to the given observed objects.
    pub fn with_sample_ground<'a>(mut self, objects: impl IntoIterator<Item = &'a CodedObject>) -> Result<Self> {
        let mut distinct: BTreeSet<&CodedObject> = BTreeSet::new();
        for o in objects {
            if !self.catalog.contains(&o.code) {
                return input(format!("code {:?} is not in the catalog", o.code));
            }
            distinct.insert(o);
        }
        let mut observed = BTreeMap::new();
        for o in distinct {
            *observed.entry(o.code.clone()).or_insert(0) += 1;
        }
        if observed.is_empty() {
            return input("sample ground space is empty");
        }
        self.observed = observed;
        self.mode = GroundMode::Sample;
        Ok(self)
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn duplicates(&self) -> bool {
        self.duplicates
    }

    pub fn mode(&self) -> GroundMode {
        self.mode
    }

    pub fn catalog(&self) -> &BTreeSet<String> {
        &self.catalog
    }

    /// Codes of the ground space.
    pub fn ground_codes(&self) -> Box<dyn Iterator<Item = &String> + '_> {
        match self.mode {
            GroundMode::Catalog => Box::new(self.catalog.iter()),
            GroundMode::Sample => Box::new(self.observed.keys()),
        }
    }

    /// Ground codes starting with `prefix`.
    pub fn codes_under<'a>(&'a self, prefix: &'a str) -> impl Iterator<Item = &'a String> + 'a {
        let set: Box<dyn Iterator<Item = &String>> = match self.mode {
            GroundMode::Catalog => Box::new(self.catalog.range(prefix.to_string()..)),
            GroundMode::Sample => Box::new(self.observed.range(prefix.to_string()..).map(|(k, _)| k)),
        };
        set.take_while(move |c| c.starts_with(prefix))
    }

    /// Objects per ground code.
    pub fn multiplicity(&self, code: &str) -> Cardinality {
        match (self.mode, self.duplicates) {
            (_, false) => Cardinality::Finite(1),
            (GroundMode::Catalog, true) => Cardinality::Infinite,
            (GroundMode::Sample, true) => Cardinality::Finite(*self.observed.get(code).unwrap_or(&0)),
        }
    }

    fn code<'a>(&self, g: &'a Element) -> Result<&'a str> {
        match g {
            Element::Coded(o) => {
                if !self.catalog.contains(&o.code) {
                    return input(format!("code {:?} is not in the catalog", o.code));
                }
                Ok(&o.code)
            }
            _ => input(format!("{g:?} is not a coded object")),
        }
    }

    /// Class of a nonempty code list, or Φ(M) for the empty list.
    fn class(&self, codes: &[&str]) -> ClosedSet {
        match codes.first() {
            None => {
                let mut g = self.ground_codes();
                let first = g.next();
                if first.is_some() && g.next().is_none() {
                    ClosedSet::Everything
                } else {
                    ClosedSet::Empty
                }
            }
            Some(_) => ClosedSet::Prefix(common_prefix(codes).to_string()),
        }
    }
}

pub(crate) fn check_code(code: &str, levels: usize) -> Result<()> {
    if code.len() != levels || !code.bytes().all(|b| b.is_ascii_digit()) {
        return input(format!("code {code:?} is not a {levels}-digit code"));
    }
    Ok(())
}

/// Longest common prefix of nonempty codes.
pub fn common_prefix<'a>(codes: &[&'a str]) -> &'a str {
    let first = codes[0];
    let mut len = first.len();
    for c in &codes[1..] {
        len = first
            .bytes()
            .zip(c.bytes())
            .take(len)
            .take_while(|(x, y)| x == y)
            .count();
    }
    &first[..len]
}

impl ClosureFamily for HierPrefixClosure {
    fn name(&self) -> &'static str {
        "hier-prefix"
    }

    fn validate(&self, g: &Element) -> Result<()> {
        self.code(g).map(|_| ())
    }

    fn close(&self, a: &[Element]) -> Result<ClosedSet> {
        let codes = a.iter().map(|g| self.code(g)).collect::<Result<Vec<_>>>()?;
        Ok(self.class(&codes))
    }

    fn closure_size(&self, a: &[Element]) -> Result<Cardinality> {
        let codes = a.iter().map(|g| self.code(g)).collect::<Result<Vec<_>>>()?;
        let p = common_prefix(&codes);
        let mut total = Cardinality::Finite(0);
        for c in self.codes_under(p) {
            total = match (total, self.multiplicity(c)) {
                (Cardinality::Finite(x), Cardinality::Finite(y)) => Cardinality::Finite(x + y),
                _ => Cardinality::Infinite,
            };
        }
        Ok(total)
    }

    fn escape(&self, a: &[Element], removed: &[usize]) -> Result<Escape> {
        let codes = a.iter().map(|g| self.code(g)).collect::<Result<Vec<_>>>()?;
        let p = common_prefix(&codes);
        let mut blocks: Vec<String> = Vec::new();
        for &r in removed {
            let rest: Vec<&str> = codes.iter().enumerate().filter(|&(i, _)| i != r).map(|(_, c)| *c).collect();
            match self.class(&rest) {
                ClosedSet::Prefix(q) => blocks.push(q),
                ClosedSet::Everything => return Ok(Escape::Covered),
                _ => {}
            }
        }
        let free = self
            .codes_under(p)
            .find(|c| !blocks.iter().any(|q| c.starts_with(q.as_str())));
        Ok(match free {
            Some(c) => Escape::with(Some(Element::Coded(CodedObject::new(c.clone(), "*")))),
            None => Escape::Covered,
        })
    }

    fn max_premise_bound(&self) -> Result<usize> {
        Ok(2)
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}

// ---------------------------------------------------------------------------
// Products on disjoint coordinates

#[derive(Debug, Clone)]
pub struct ProductClosure {
    components: Vec<ClosureDescriptor>,
    cap: Option<usize>,
}

impl ProductClosure {
    pub fn new(components: Vec<ClosureDescriptor>, cap: Option<usize>) -> Result<Self> {
        if components.is_empty() {
            return input("a product needs at least one component");
        }
        if components.iter().any(|c| c.name() == "hier-prefix") {
            return Err(UfgError::Unsupported(
                "hierarchical codes cannot be a product component".into(),
            ));
        }
        if cap == Some(0) {
            return input("premise-size cap must be positive");
        }
        Ok(ProductClosure { components, cap })
    }

    pub fn components(&self) -> &[ClosureDescriptor] {
        &self.components
    }

    fn project(&self, a: &[Element]) -> Result<Vec<Vec<Element>>> {
        let k = self.components.len();
        let mut cols = vec![Vec::with_capacity(a.len()); k];
        for g in a {
            match g {
                Element::Tuple(xs) if xs.len() == k => {
                    for (c, x) in xs.iter().enumerate() {
                        cols[c].push(x.clone());
                    }
                }
                _ => return input(format!("{g:?} is not a {k}-tuple")),
            }
        }
        Ok(cols)
    }

    /// Component names sorted, to recognise the plane × nominal × line product.
    fn signature(&self) -> Vec<&'static str> {
        let mut s: Vec<&'static str> = self.components.iter().map(|c| c.name()).collect();
        s.sort_unstable();
        s
    }
}

impl ClosureFamily for ProductClosure {
    fn name(&self) -> &'static str {
        "product"
    }

    fn validate(&self, g: &Element) -> Result<()> {
        match g {
            Element::Tuple(xs) if xs.len() == self.components.len() => {
                for (c, x) in self.components.iter().zip(xs) {
                    c.validate(x)?;
                }
                Ok(())
            }
            _ => input(format!("{g:?} is not a {}-tuple", self.components.len())),
        }
    }

    fn close(&self, a: &[Element]) -> Result<ClosedSet> {
        let cols = self.project(a)?;
        let parts = self
            .components
            .iter()
            .zip(&cols)
            .map(|(c, col)| c.close(col))
            .collect::<Result<Vec<_>>>()?;
        Ok(ClosedSet::Product(parts))
    }

    fn closure_size(&self, a: &[Element]) -> Result<Cardinality> {
        let cols = self.project(a)?;
        let mut total = Cardinality::Finite(1);
        for (c, col) in self.components.iter().zip(&cols) {
            total = total.times(c.closure_size(col)?);
        }
        Ok(total)
    }

    /// A point of the product escapes γ(A∖{r}) iff one of its coordinates escapes the
    /// matching component closure, and coordinates can be chosen independently. So the
    /// removed indices must split into one escaping group per component.
    fn escape(&self, a: &[Element], removed: &[usize]) -> Result<Escape> {
        let cols = self.project(a)?;
        let t = removed.len();
        if t > 16 {
            return input("too many removed elements for the product escape search");
        }
        let full = (1usize << t) - 1;
        let mut esc: Vec<Vec<Option<Escape>>> = Vec::with_capacity(self.components.len());
        for (c, col) in self.components.iter().zip(&cols) {
            let mut row = Vec::with_capacity(full + 1);
            for mask in 0..=full {
                let sub: Vec<usize> = (0..t).filter(|i| mask & (1 << i) != 0).map(|i| removed[i]).collect();
                let e = c.escape(col, &sub)?;
                row.push(e.escapes().then_some(e));
            }
            esc.push(row);
        }
        // reach[m] = assignment of the removed positions in m to components
        let mut reach: Vec<Option<Vec<usize>>> = vec![None; full + 1];
        reach[0] = Some(vec![usize::MAX; t]);
        for (ci, row) in esc.iter().enumerate() {
            let mut next = reach.clone();
            for m in 0..=full {
                let Some(base) = &reach[m] else { continue };
                let free = full & !m;
                let mut s = free;
                loop {
                    if row[s].is_some() && next[m | s].is_none() {
                        let mut asg = base.clone();
                        for (i, slot) in asg.iter_mut().enumerate() {
                            if s & (1 << i) != 0 {
                                *slot = ci;
                            }
                        }
                        next[m | s] = Some(asg);
                    }
                    if s == 0 {
                        break;
                    }
                    s = (s - 1) & free;
                }
            }
            reach = next;
        }
        let Some(assignment) = reach[full].clone() else {
            return Ok(Escape::Covered);
        };
        let mut witness = Vec::with_capacity(self.components.len());
        for (ci, row) in esc.iter().enumerate() {
            let mask = (0..t).filter(|&i| assignment[i] == ci).fold(0, |m, i| m | (1 << i));
            match &row[mask] {
                Some(Escape::Escapes { witness: Some(w), .. }) => witness.push(w.clone()),
                _ => break,
            }
        }
        let witness = (witness.len() == self.components.len()).then(|| Element::Tuple(witness));
        Ok(Escape::Escapes {
            witness,
            assignment: Some(assignment),
        })
    }

    fn max_premise_bound(&self) -> Result<usize> {
        let sum = if self.signature() == ["convex2d", "interordinal", "nominal"] {
            4
        } else {
            let mut s = 0;
            for c in &self.components {
                s += c.max_premise_bound()?;
            }
            s
        };
        Ok(self.cap.map_or(sum, |c| c.min(sum)))
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}
