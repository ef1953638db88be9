//! Data kinds: how each input schema becomes a sample, queries and a closure descriptor.

use std::collections::BTreeSet;
use std::path::Path;

use ufg_core::closures::{ClosureDescriptor, CodedObject, Element, HierPrefixClosure};
use ufg_core::context::FormalContext;
use ufg_core::ingest::{self, open};
use ufg_core::{Result, Sample, UfgError};

use crate::args::RunArgs;

#[derive(Debug, Clone)]
pub struct Query {
    pub id: String,
    pub element: Element,
}

/// A sample plus whatever the kind needs to build its descriptor later.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub sample: Sample,
    pub context: Option<FormalContext>,
    pub hier: Option<HierPrefixClosure>,
}

pub trait DataKind: Send + Sync {
    fn name(&self) -> &'static str;

    fn load(&self, args: &RunArgs) -> Result<Loaded>;

    fn read_queries(&self, path: &Path, loaded: &Loaded) -> Result<Vec<Query>>;

    /// `queries` may add categories that the descriptor has to know about.
    fn descriptor(&self, args: &RunArgs, loaded: &Loaded, queries: &[Query]) -> Result<ClosureDescriptor>;
}

pub struct DataKindRegistry {
    kinds: Vec<Box<dyn DataKind>>,
}

impl Default for DataKindRegistry {
    fn default() -> Self {
        DataKindRegistry {
            kinds: vec![Box::new(TableKind), Box::new(MixedKind), Box::new(HierKind), Box::new(SpatialKind)],
        }
    }
}

impl DataKindRegistry {
    pub fn names(&self) -> Vec<&'static str> {
        self.kinds.iter().map(|k| k.name()).collect()
    }

    pub fn get(&self, name: &str) -> Result<&dyn DataKind> {
        self.kinds
            .iter()
            .find(|k| k.name() == name)
            .map(|k| &**k)
            .ok_or_else(|| UfgError::Config(format!("unknown kind {name:?}; known: {}", self.names().join(", "))))
    }
}

fn input_path(args: &RunArgs) -> Result<&Path> {
    args.input
        .as_deref()
        .ok_or_else(|| UfgError::Config("no input file; pass --input".into()))
}

fn label(p: &Path) -> String {
    p.display().to_string()
}

pub fn observation_queries(sample: &Sample) -> Vec<Query> {
    sample
        .observations()
        .iter()
        .map(|o| Query {
            id: o.id.clone(),
            element: o.element.clone(),
        })
        .collect()
}

fn sample_queries(s: Sample) -> Vec<Query> {
    observation_queries(&s)
}

// ---------------------------------------------------------------------------

struct TableKind;

impl DataKind for TableKind {
    fn name(&self) -> &'static str {
        "table"
    }

    fn load(&self, args: &RunArgs) -> Result<Loaded> {
        let path = input_path(args)?;
        let ctx = ingest::read_table(open(path)?, &label(path))?;
        let sample = match &args.sample_file {
            Some(p) => ingest::read_table_sample(open(p)?, &label(p), &ctx)?,
            None => ingest::table_sample(&ctx),
        };
        Ok(Loaded {
            sample,
            context: Some(ctx),
            hier: None,
        })
    }

    fn read_queries(&self, path: &Path, loaded: &Loaded) -> Result<Vec<Query>> {
        let ctx = loaded.context.as_ref().expect("table kind loads a context");
        Ok(sample_queries(ingest::read_table_sample(open(path)?, &label(path), ctx)?))
    }

    fn descriptor(&self, _: &RunArgs, loaded: &Loaded, _: &[Query]) -> Result<ClosureDescriptor> {
        Ok(ClosureDescriptor::finite(loaded.context.clone().expect("table kind loads a context")))
    }
}

// ---------------------------------------------------------------------------

struct MixedKind;

impl DataKind for MixedKind {
    fn name(&self) -> &'static str {
        "mixed"
    }

    fn load(&self, args: &RunArgs) -> Result<Loaded> {
        let path = input_path(args)?;
        let data = ingest::read_mixed(open(path)?, &label(path))?;
        Ok(Loaded {
            sample: data.sample,
            context: None,
            hier: None,
        })
    }

    fn read_queries(&self, path: &Path, _: &Loaded) -> Result<Vec<Query>> {
        Ok(sample_queries(ingest::read_mixed(open(path)?, &label(path))?.sample))
    }

    fn descriptor(&self, args: &RunArgs, loaded: &Loaded, queries: &[Query]) -> Result<ClosureDescriptor> {
        let used: BTreeSet<String> = loaded
            .sample
            .observations()
            .iter()
            .map(|o| &o.element)
            .chain(queries.iter().map(|q| &q.element))
            .flat_map(|g| match g {
                Element::Tuple(parts) => parts.iter().filter_map(Element::as_category).map(str::to_string).collect(),
                other => other.as_category().map(str::to_string).into_iter().collect::<Vec<_>>(),
            })
            .collect();
        let cats: Vec<String> = match &args.categories {
            Some(list) => {
                let given: Vec<String> = list.split(',').map(|c| c.trim().to_string()).filter(|c| !c.is_empty()).collect();
                let known: BTreeSet<&String> = given.iter().collect();
                if let Some(missing) = used.iter().find(|c| !known.contains(c)) {
                    return Err(UfgError::Config(format!("category {missing:?} is not in --categories")));
                }
                given
            }
            None => used.into_iter().collect(),
        };
        ClosureDescriptor::mixed(cats)
    }
}

// ---------------------------------------------------------------------------

struct HierKind;

impl DataKind for HierKind {
    fn name(&self) -> &'static str {
        "hier"
    }

    fn load(&self, args: &RunArgs) -> Result<Loaded> {
        let path = input_path(args)?;
        let catalog = match &args.catalog {
            Some(p) => Some(ingest::read_catalog(open(p)?, &label(p))?),
            None => None,
        };
        let mode = match (args.ground_mode.as_deref(), &catalog) {
            (Some(m), _) => m,
            (None, Some(_)) => "catalog",
            (None, None) => "sample",
        };
        if mode == "catalog" && catalog.is_none() {
            return Err(UfgError::Config("catalog ground mode needs --catalog".into()));
        }
        let sample = ingest::read_hier(open(path)?, &label(path), catalog.as_ref().map(|(c, _)| c), args.duplicates)?;
        let objects: Vec<CodedObject> = sample
            .observations()
            .iter()
            .filter_map(|o| o.element.as_coded().cloned())
            .collect();
        let (codes, levels) = match catalog {
            Some(c) => c,
            None => {
                let codes: BTreeSet<String> = objects.iter().map(|o| o.code.clone()).collect();
                let levels = codes.iter().next().map_or(0, |c| c.len());
                (codes, levels)
            }
        };
        let h = HierPrefixClosure::new(codes, levels, args.duplicates)?;
        let h = if mode == "sample" { h.with_sample_ground(objects.iter())? } else { h };
        Ok(Loaded {
            sample,
            context: None,
            hier: Some(h),
        })
    }

    fn read_queries(&self, path: &Path, loaded: &Loaded) -> Result<Vec<Query>> {
        let h = loaded.hier.as_ref().expect("hier kind loads a hierarchy");
        let ground: BTreeSet<String> = h.ground_codes().cloned().collect();
        Ok(sample_queries(ingest::read_hier(open(path)?, &label(path), Some(&ground), true)?))
    }

    fn descriptor(&self, _: &RunArgs, loaded: &Loaded, _: &[Query]) -> Result<ClosureDescriptor> {
        Ok(ClosureDescriptor::hier(loaded.hier.clone().expect("hier kind loads a hierarchy")))
    }
}

// ---------------------------------------------------------------------------

struct SpatialKind;

impl DataKind for SpatialKind {
    fn name(&self) -> &'static str {
        "spatial"
    }

    fn load(&self, args: &RunArgs) -> Result<Loaded> {
        let path = input_path(args)?;
        Ok(Loaded {
            sample: ingest::read_spatial(open(path)?, &label(path))?,
            context: None,
            hier: None,
        })
    }

    fn read_queries(&self, path: &Path, _: &Loaded) -> Result<Vec<Query>> {
        Ok(sample_queries(ingest::read_spatial(open(path)?, &label(path))?))
    }

    fn descriptor(&self, _: &RunArgs, _: &Loaded, _: &[Query]) -> Result<ClosureDescriptor> {
        Ok(ClosureDescriptor::convex2d())
    }
}
