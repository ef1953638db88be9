use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use ufg_core::closures::{CodedObject, Element};
use ufg_core::depth::{finest_mode, generalized_tukey, topdown_median, ufg_depth_with, DepthResult, Weights};
use ufg_core::engine::{count_tuples_with, CountOptions};
use ufg_core::geometry::Point2;
use ufg_core::ingest::{open, read_raster};
use ufg_core::rational::{fraction_string, int, parse_rational, to_decimal};
use ufg_core::{Rational, Result, UfgError};

use crate::args::{RunArgs, Verb};
use crate::kinds::{observation_queries, DataKind, DataKindRegistry, Loaded, Query};

pub const SCHEMA_VERSION: u32 = 1;
const DIGITS: usize = 15;

/// Reports a warning as a JSON line on standard error.
pub fn warn(msg: &str) {
    eprintln!("{}", json!({"schema_version": SCHEMA_VERSION, "warning": msg}));
}

fn dec(r: &Rational) -> String {
    to_decimal(r, DIGITS)
}

fn io(path: &Path, e: impl std::fmt::Display) -> UfgError {
    UfgError::Io(format!("{}: {e}", path.display()))
}

fn out_file(args: &RunArgs, name: &str) -> Result<PathBuf> {
    fs::create_dir_all(&args.out).map_err(|e| io(&args.out, e))?;
    Ok(args.out.join(name))
}

fn write_json(path: &Path, v: &Value) -> Result<()> {
    let text = serde_json::to_string_pretty(v).expect("json values serialize");
    fs::write(path, text + "\n").map_err(|e| io(path, e))
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    csv::Writer::from_path(path).map_err(|e| io(path, e))
}

fn csv_row<I, T>(w: &mut csv::Writer<fs::File>, path: &Path, row: I) -> Result<()>
where
    I: IntoIterator<Item = T>,
    T: AsRef<[u8]>,
{
    w.write_record(row).map_err(|e| io(path, e))
}

fn finish(mut w: csv::Writer<fs::File>, path: &Path) -> Result<()> {
    w.flush().map_err(|e| io(path, e))
}

fn weights(args: &RunArgs) -> Result<Weights> {
    match &args.weights {
        None => Ok(Weights::ones()),
        Some(list) => Weights::new(list.split(',').map(parse_rational).collect::<Result<Vec<_>>>()?),
    }
}

fn options(args: &RunArgs) -> CountOptions {
    CountOptions {
        j_max: args.j_max,
        workers: args.workers,
        counter: args.counter.clone(),
        n_cap: args.n_cap,
    }
}

struct Run<'a> {
    kind: &'a dyn DataKind,
    loaded: Loaded,
}

fn load<'a>(reg: &'a DataKindRegistry, args: &RunArgs) -> Result<Run<'a>> {
    let name = args
        .kind
        .as_deref()
        .ok_or_else(|| UfgError::Config(format!("no data kind; pass --kind ({})", reg.names().join(", "))))?;
    let kind = reg.get(name)?;
    let loaded = kind.load(args)?;
    Ok(Run { kind, loaded })
}

fn queries(run: &Run, args: &RunArgs) -> Result<Vec<Query>> {
    match &args.queries {
        Some(p) => run.kind.read_queries(p, &run.loaded),
        None => Ok(observation_queries(&run.loaded.sample)),
    }
}

fn same(a: &Element, b: &Element) -> bool {
    match (a.as_coded(), b.as_coded()) {
        (Some(x), Some(y)) => x.code == y.code,
        _ => a == b,
    }
}

pub fn dispatch(verb: &Verb) -> Result<()> {
    let reg = DataKindRegistry::default();
    let args = verb.args();
    match verb {
        Verb::Depth(_) => depth(&reg, args),
        Verb::Grid(_) => grid(&reg, args),
        Verb::Compare(_) => compare(&reg, args),
        Verb::Premises(_) => premises(&reg, args),
        Verb::Extents(_) => extents(&reg, args),
        Verb::Tukey(_) => tukey(&reg, args),
    }
}

fn extreme(res: &DepthResult, ids: &[String], pick: Option<&Rational>) -> Value {
    match pick {
        None => Value::Null,
        Some(d) => {
            let at: Vec<&String> = res
                .queries
                .iter()
                .zip(ids)
                .filter(|(q, _)| &q.depth == d)
                .map(|(_, id)| id)
                .collect();
            json!({"query_ids": at, "depth": dec(d), "depth_exact": fraction_string(d)})
        }
    }
}

fn depth(reg: &DataKindRegistry, args: &RunArgs) -> Result<()> {
    let run = load(reg, args)?;
    let qs = queries(&run, args)?;
    let desc = run.kind.descriptor(args, &run.loaded, &qs)?;
    let w = weights(args)?;
    let elems: Vec<Element> = qs.iter().map(|q| q.element.clone()).collect();
    let res = ufg_depth_with(&run.loaded.sample, &elems, &desc, &w, &options(args))?;
    for m in &res.warnings {
        warn(m);
    }
    let j_max = res.b.len();
    let sample_elems = run.loaded.sample.elements();
    let path = out_file(args, "depths.csv")?;
    let mut out = csv_writer(&path)?;
    let mut header = vec!["query_id".to_string(), "depth".to_string()];
    header.extend((1..=j_max).map(|j| format!("term_j{j}")));
    header.extend(["in_sample".to_string(), "depth_exact".to_string()]);
    csv_row(&mut out, &path, &header)?;
    for (q, row) in qs.iter().zip(&res.queries) {
        let mut rec = vec![q.id.clone(), dec(&row.depth)];
        rec.extend(row.terms.iter().map(dec));
        rec.push(sample_elems.iter().any(|g| same(g, &q.element)).to_string());
        rec.push(fraction_string(&row.depth));
        csv_row(&mut out, &path, &rec)?;
    }
    finish(out, &path)?;
    let ids: Vec<String> = qs.iter().map(|q| q.id.clone()).collect();
    let median: Vec<&String> = res.median.iter().map(|&i| &ids[i]).collect();
    let summary = json!({
        "schema_version": SCHEMA_VERSION,
        "kind": run.kind.name(),
        "closure": desc.name(),
        "n_observations": run.loaded.sample.len(),
        "n_objects": run.loaded.sample.positive_objects().len(),
        "n_queries": qs.len(),
        "j_max": j_max,
        "J": res.j_set.iter().collect::<Vec<_>>(),
        "weights": (1..=j_max).map(|j| fraction_string(&w.get(j))).collect::<Vec<_>>(),
        "b": res.b.iter().map(fraction_string).collect::<Vec<_>>(),
        "premise_sets": res.premise_sets,
        "median": {"query_ids": median, "unique": res.median.len() == 1},
        "max": extreme(&res, &ids, res.max_depth()),
        "min": extreme(&res, &ids, res.min_depth()),
        "distinct_values": res.distinct_values(),
        "warnings": res.warnings,
    });
    write_json(&out_file(args, "summary.json")?, &summary)
}

fn grid_axis(lo: &Option<String>, hi: &Option<String>, n: Option<usize>, axis: &str) -> Result<Vec<Rational>> {
    let (Some(lo), Some(hi), Some(n)) = (lo, hi, n) else {
        return Err(UfgError::Config(format!(
            "grid needs --{axis}min, --{axis}max and --n{axis}, or a --raster"
        )));
    };
    if n == 0 {
        return Err(UfgError::Config(format!("--n{axis} must be positive")));
    }
    let (lo, hi) = (parse_rational(lo)?, parse_rational(hi)?);
    if lo > hi {
        return Err(UfgError::Config(format!("--{axis}min exceeds --{axis}max")));
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    let step = (&hi - &lo) / int(n as i64 - 1);
    Ok((0..n).map(|i| &lo + &step * int(i as i64)).collect())
}

fn grid(reg: &DataKindRegistry, args: &RunArgs) -> Result<()> {
    let run = load(reg, args)?;
    let mixed = match run.kind.name() {
        "mixed" => true,
        "spatial" => false,
        other => return Err(UfgError::Config(format!("grid needs mixed or spatial data, not {other}"))),
    };
    let cells: Vec<(Point2, Option<(String, Rational)>)> = if let Some(p) = &args.raster {
        if args.nx.is_some() || args.ny.is_some() || args.vegetation.is_some() || args.elevation.is_some() {
            return Err(UfgError::Config("a raster defines the grid; drop --nx/--ny/--vegetation/--elevation".into()));
        }
        read_raster(open(p)?, &p.display().to_string())?
            .into_iter()
            .map(|c| (c.point, Some((c.vegetation, c.elevation))))
            .collect()
    } else {
        let cov = match (&args.vegetation, &args.elevation) {
            (Some(v), Some(e)) => Some((v.clone(), parse_rational(e)?)),
            (None, None) if !mixed => None,
            _ if mixed => {
                return Err(UfgError::Config(
                    "mixed grids need a --raster or both --vegetation and --elevation".into(),
                ))
            }
            _ => return Err(UfgError::Config("spatial grids take no covariates".into())),
        };
        let xs = grid_axis(&args.xmin, &args.xmax, args.nx, "x")?;
        let ys = grid_axis(&args.ymin, &args.ymax, args.ny, "y")?;
        ys.iter()
            .flat_map(|y| xs.iter().map(move |x| Point2::new(x.clone(), y.clone())))
            .map(|p| (p, cov.clone()))
            .collect()
    };
    let qs: Vec<Query> = cells
        .iter()
        .enumerate()
        .map(|(i, (p, cov))| Query {
            id: format!("cell{i}"),
            element: match (mixed, cov) {
                (true, Some((v, e))) => Element::mixed(p.clone(), v.clone(), e.clone()),
                _ => Element::Point(p.clone()),
            },
        })
        .collect();
    let desc = run.kind.descriptor(args, &run.loaded, &qs)?;
    let elems: Vec<Element> = qs.iter().map(|q| q.element.clone()).collect();
    let res = ufg_depth_with(&run.loaded.sample, &elems, &desc, &weights(args)?, &options(args))?;
    for m in &res.warnings {
        warn(m);
    }
    let path = out_file(args, "grid.csv")?;
    let mut out = csv_writer(&path)?;
    csv_row(&mut out, &path, ["x", "y", "vegetation", "elevation", "depth", "depth_exact"])?;
    for ((p, cov), row) in cells.iter().zip(&res.queries) {
        let (v, e) = match cov {
            Some((v, e)) => (v.clone(), dec(e)),
            None => (String::new(), String::new()),
        };
        csv_row(&mut out, &path, [dec(&p.x), dec(&p.y), v, e, dec(&row.depth), fraction_string(&row.depth)])?;
    }
    finish(out, &path)
}

fn compare(reg: &DataKindRegistry, args: &RunArgs) -> Result<()> {
    let run = load(reg, args)?;
    if run.kind.name() != "hier" {
        return Err(UfgError::Config("compare needs hierarchical data (--kind hier)".into()));
    }
    let sample = &run.loaded.sample;
    let codes: BTreeSet<String> = sample
        .observations()
        .iter()
        .filter_map(|o| o.element.as_coded().map(|c| c.code.clone()))
        .collect();
    let qs: Vec<Query> = codes
        .iter()
        .map(|c| Query {
            id: c.clone(),
            element: Element::Coded(CodedObject::new(c.clone(), format!("query {c}"))),
        })
        .collect();
    let desc = run.kind.descriptor(args, &run.loaded, &qs)?;
    let elems: Vec<Element> = qs.iter().map(|q| q.element.clone()).collect();
    let res = ufg_depth_with(sample, &elems, &desc, &weights(args)?, &options(args))?;
    for m in &res.warnings {
        warn(m);
    }
    let tukey = generalized_tukey(sample, &elems, &desc)?;
    let mode = finest_mode(sample)?;
    let topdown = topdown_median(sample)?;
    let ufg: Vec<&String> = res.median.iter().map(|&i| &qs[i].id).collect();
    let best = res.max_depth().cloned().unwrap_or_default();
    let tukey_values: BTreeSet<&Rational> = tukey.iter().collect();
    let v = json!({
        "schema_version": SCHEMA_VERSION,
        "ufg_median": ufg,
        "ufg_median_depth": dec(&best),
        "ufg_median_depth_exact": fraction_string(&best),
        "ufg_distinct_values": res.distinct_values(),
        "mode": mode,
        "topdown_median": topdown,
        "topdown_differs_from_mode": topdown != mode,
        "tukey": {
            "values": qs.iter().zip(&tukey).map(|(q, t)| json!({
                "code": q.id, "tukey": dec(t), "tukey_exact": fraction_string(t)
            })).collect::<Vec<_>>(),
            "distinct_values": tukey_values.len(),
        },
    });
    write_json(&out_file(args, "compare.json")?, &v)
}

fn premises(reg: &DataKindRegistry, args: &RunArgs) -> Result<()> {
    let run = load(reg, args)?;
    let desc = run.kind.descriptor(args, &run.loaded, &[])?;
    let counts = count_tuples_with(&run.loaded.sample, &[], &desc, &options(args))?;
    for m in &counts.notes {
        warn(m);
    }
    let v = json!({
        "schema_version": SCHEMA_VERSION,
        "kind": run.kind.name(),
        "counter": counts.counter,
        "j_max": counts.j_max,
        "premise_sets": counts.premise_sets,
        "b": counts.b.iter().map(fraction_string).collect::<Vec<_>>(),
        "J": ufg_core::depth::detect_j(&counts).into_iter().collect::<Vec<_>>(),
    });
    println!("{}", serde_json::to_string_pretty(&v).expect("json values serialize"));
    Ok(())
}

fn extents(reg: &DataKindRegistry, args: &RunArgs) -> Result<()> {
    let run = load(reg, args)?;
    let Some(ctx) = &run.loaded.context else {
        return Err(UfgError::Unsupported(format!(
            "extents are listed for finite contexts only, not {} data",
            run.kind.name()
        )));
    };
    let ext = ctx.enumerate_extents()?;
    let v = json!({
        "schema_version": SCHEMA_VERSION,
        "n_extents": ext.len(),
        "extents": ext,
    });
    println!("{}", serde_json::to_string_pretty(&v).expect("json values serialize"));
    Ok(())
}

fn tukey(reg: &DataKindRegistry, args: &RunArgs) -> Result<()> {
    let run = load(reg, args)?;
    let qs = queries(&run, args)?;
    let desc = run.kind.descriptor(args, &run.loaded, &qs)?;
    let elems: Vec<Element> = qs.iter().map(|q| q.element.clone()).collect();
    let t = generalized_tukey(&run.loaded.sample, &elems, &desc)?;
    let path = out_file(args, "tukey.csv")?;
    let mut out = csv_writer(&path)?;
    csv_row(&mut out, &path, ["query_id", "tukey", "tukey_exact"])?;
    for (q, v) in qs.iter().zip(&t) {
        csv_row(&mut out, &path, [q.id.clone(), dec(v), fraction_string(v)])?;
    }
    finish(out, &path)
}
