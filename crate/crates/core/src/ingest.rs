//! CSV and catalog readers. All errors carry the source label and line number.
//!
//! Schemas (UTF-8, comma separated, header required):
//!
//! | kind    | columns                                  |
//! |---------|------------------------------------------|
//! | mixed   | `id,x,y,vegetation,elevation[,weight]`   |
//! | spatial | `id,x,y[,weight]`                        |
//! | hier    | `id,code[,weight]`                       |
//! | table   | cross table, see [`FormalContext::from_csv`] |
//! | raster  | `x,y,vegetation,elevation`               |
//!
//! Numbers are exact: decimals, `p/q` fractions and exponents are accepted.

use std::collections::{BTreeSet, HashMap};
use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use crate::closures::{check_code, CodedObject, Element};
use crate::context::FormalContext;
use crate::error::{Result, UfgError};
use crate::geometry::Point2;
use crate::rational::{int, parse_rational, Rational};
use crate::sample::{Observation, Sample};

pub fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| UfgError::Io(format!("{}: {e}", path.display())))
}

struct Rows {
    label: String,
    header: Vec<String>,
    rows: Vec<(u64, csv::StringRecord)>,
}

impl Rows {
    fn read<R: Read>(reader: R, label: &str, required: &[&str], optional: &[&str]) -> Result<Rows> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let header: Vec<String> = rdr
            .headers()
            .map_err(|e| UfgError::ingest(label, 1, e.to_string()))?
            .iter()
            .map(str::to_string)
            .collect();
        if header.iter().all(|h| h.is_empty()) {
            return Err(UfgError::EmptySample { path: label.into() });
        }
        let ok = header.len() >= required.len()
            && header.len() <= required.len() + optional.len()
            && header.iter().zip(required.iter().chain(optional)).all(|(h, e)| h == e);
        if !ok {
            let mut want = required.join(",");
            for o in optional {
                want.push_str(&format!("[,{o}]"));
            }
            return Err(UfgError::ingest(
                label,
                1,
                format!("header must be {want}, found {}", header.join(",")),
            ));
        }
        let mut rows = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(|e| {
                let line = e.position().map_or(0, |p| p.line());
                UfgError::ingest(label, line, e.to_string())
            })?;
            let line = rec.position().map_or(0, |p| p.line());
            if rec.len() != header.len() {
                return Err(UfgError::ingest(
                    label,
                    line,
                    format!("expected {} fields, found {}", header.len(), rec.len()),
                ));
            }
            rows.push((line, rec));
        }
        if rows.is_empty() {
            return Err(UfgError::EmptySample { path: label.into() });
        }
        Ok(Rows {
            label: label.into(),
            header,
            rows,
        })
    }

    fn has(&self, col: &str) -> bool {
        self.header.iter().any(|h| h == col)
    }

    fn err(&self, line: u64, msg: impl Into<String>) -> UfgError {
        UfgError::ingest(&self.label, line, msg)
    }

    fn number(&self, line: u64, rec: &csv::StringRecord, i: usize) -> Result<Rational> {
        parse_rational(&rec[i]).map_err(|_| self.err(line, format!("{}: not a number: {:?}", self.header[i], &rec[i])))
    }

    fn weight(&self, line: u64, rec: &csv::StringRecord, i: usize) -> Result<Rational> {
        if !self.has("weight") {
            return Ok(int(1));
        }
        let w = self.number(line, rec, i)?;
        if w < int(0) {
            return Err(self.err(line, "weight must be nonnegative"));
        }
        Ok(w)
    }

    fn id(&self, line: u64, rec: &csv::StringRecord, seen: &mut BTreeSet<String>) -> Result<String> {
        let id = rec[0].to_string();
        if id.is_empty() {
            return Err(self.err(line, "empty id"));
        }
        if !seen.insert(id.clone()) {
            return Err(self.err(line, format!("duplicate id {id:?}")));
        }
        Ok(id)
    }
}

/// Mixed sample plus the sorted set of categories it uses.
#[derive(Debug, Clone)]
pub struct MixedData {
    pub sample: Sample,
    pub categories: Vec<String>,
}

/// Reads mixed records. Records at one location must agree on vegetation and elevation;
/// identical records are kept as repeated observations.
pub fn read_mixed<R: Read>(reader: R, label: &str) -> Result<MixedData> {
    let rows = Rows::read(reader, label, &["id", "x", "y", "vegetation", "elevation"], &["weight"])?;
    let mut seen = BTreeSet::new();
    let mut at: HashMap<Point2, (String, Rational, u64)> = HashMap::new();
    let mut obs = Vec::with_capacity(rows.rows.len());
    let mut cats = BTreeSet::new();
    for (line, rec) in &rows.rows {
        let line = *line;
        let id = rows.id(line, rec, &mut seen)?;
        let p = Point2::new(rows.number(line, rec, 1)?, rows.number(line, rec, 2)?);
        let veg = rec[3].to_string();
        if veg.is_empty() {
            return Err(rows.err(line, "empty vegetation"));
        }
        let elev = rows.number(line, rec, 4)?;
        let weight = rows.weight(line, rec, 5)?;
        if let Some((v, e, first)) = at.get(&p) {
            if *v != veg || *e != elev {
                return Err(rows.err(
                    line,
                    format!("location ({}, {}) already has different covariates at line {first}", p.x, p.y),
                ));
            }
        } else {
            at.insert(p.clone(), (veg.clone(), elev.clone(), line));
        }
        cats.insert(veg.clone());
        obs.push(Observation {
            id,
            element: Element::mixed(p, veg, elev),
            weight,
        });
    }
    Ok(MixedData {
        sample: Sample::new(obs)?,
        categories: cats.into_iter().collect(),
    })
}

pub fn read_spatial<R: Read>(reader: R, label: &str) -> Result<Sample> {
    let rows = Rows::read(reader, label, &["id", "x", "y"], &["weight"])?;
    let mut seen = BTreeSet::new();
    let mut obs = Vec::with_capacity(rows.rows.len());
    for (line, rec) in &rows.rows {
        let line = *line;
        let id = rows.id(line, rec, &mut seen)?;
        let p = Point2::new(rows.number(line, rec, 1)?, rows.number(line, rec, 2)?);
        let weight = rows.weight(line, rec, 3)?;
        obs.push(Observation {
            id,
            element: Element::Point(p),
            weight,
        });
    }
    Sample::new(obs)
}

/// Reads coded observations. With `duplicates` each record is its own object;
/// otherwise records with equal codes are one object. Codes must be in `catalog`
/// when one is given, and all codes must share one length.
pub fn read_hier<R: Read>(
    reader: R,
    label: &str,
    catalog: Option<&BTreeSet<String>>,
    duplicates: bool,
) -> Result<Sample> {
    let rows = Rows::read(reader, label, &["id", "code"], &["weight"])?;
    let levels = catalog.and_then(|c| c.iter().next()).map(|c| c.len());
    let mut seen = BTreeSet::new();
    let mut obs = Vec::with_capacity(rows.rows.len());
    let mut len = levels;
    for (line, rec) in &rows.rows {
        let line = *line;
        let id = rows.id(line, rec, &mut seen)?;
        let code = rec[1].to_string();
        let l = *len.get_or_insert(code.len());
        check_code(&code, l).map_err(|_| rows.err(line, format!("code {code:?} is not a {l}-digit code")))?;
        if let Some(c) = catalog {
            if !c.contains(&code) {
                return Err(rows.err(line, format!("code {code:?} is not in the catalog")));
            }
        }
        let weight = rows.weight(line, rec, 2)?;
        let object = if duplicates { id.clone() } else { code.clone() };
        obs.push(Observation {
            id,
            element: Element::Coded(CodedObject::new(code, object)),
            weight,
        });
    }
    Sample::new(obs)
}

/// One code per line; `#` starts a comment; blank lines are skipped.
pub fn read_catalog<R: Read>(reader: R, label: &str) -> Result<(BTreeSet<String>, usize)> {
    let mut codes = BTreeSet::new();
    let mut levels = None;
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let line = line.map_err(|e| UfgError::ingest(label, i as u64 + 1, e.to_string()))?;
        let code = line.split('#').next().unwrap_or("").trim();
        if code.is_empty() {
            continue;
        }
        let l = *levels.get_or_insert(code.len());
        check_code(code, l).map_err(|_| UfgError::ingest(label, i as u64 + 1, format!("code {code:?} is not a {l}-digit code")))?;
        codes.insert(code.to_string());
    }
    match levels {
        Some(l) => Ok((codes, l)),
        None => Err(UfgError::ingest(label, 1, "empty catalog")),
    }
}

pub fn read_table<R: Read>(reader: R, label: &str) -> Result<FormalContext> {
    FormalContext::from_csv(reader, label)
}

/// Each object of the context once with unit weight.
pub fn table_sample(ctx: &FormalContext) -> Sample {
    Sample::new(
        ctx.objects()
            .iter()
            .enumerate()
            .map(|(i, id)| Observation {
                id: id.clone(),
                element: Element::Object(i),
                weight: int(1),
            })
            .collect(),
    )
    .expect("object ids are unique")
}

/// Observations of context objects: `id,object[,weight]`.
pub fn read_table_sample<R: Read>(reader: R, label: &str, ctx: &FormalContext) -> Result<Sample> {
    let rows = Rows::read(reader, label, &["id", "object"], &["weight"])?;
    let mut seen = BTreeSet::new();
    let mut obs = Vec::with_capacity(rows.rows.len());
    for (line, rec) in &rows.rows {
        let line = *line;
        let id = rows.id(line, rec, &mut seen)?;
        let g = ctx
            .object_index(&rec[1])
            .ok_or_else(|| rows.err(line, format!("unknown object {:?}", &rec[1])))?;
        let weight = rows.weight(line, rec, 2)?;
        obs.push(Observation {
            id,
            element: Element::Object(g),
            weight,
        });
    }
    Sample::new(obs)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RasterCell {
    pub point: Point2,
    pub vegetation: String,
    pub elevation: Rational,
}

pub fn read_raster<R: Read>(reader: R, label: &str) -> Result<Vec<RasterCell>> {
    let rows = Rows::read(reader, label, &["x", "y", "vegetation", "elevation"], &[])?;
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(rows.rows.len());
    for (line, rec) in &rows.rows {
        let line = *line;
        let point = Point2::new(rows.number(line, rec, 0)?, rows.number(line, rec, 1)?);
        if !seen.insert(point.clone()) {
            return Err(rows.err(line, "repeated raster location"));
        }
        out.push(RasterCell {
            point,
            vegetation: rec[2].to_string(),
            elevation: rows.number(line, rec, 3)?,
        });
    }
    Ok(out)
}
