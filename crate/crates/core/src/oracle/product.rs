//! Literal (C1)/(C2) on products of the plane, nominal and interordinal scalings.
//!
//! Every closure involved is a product of per-coordinate closed sets whose boundaries
//! come from the points of A: lines through two locations, the elevation values, the
//! categories. One representative per cell of that arrangement is enough to compare
//! any two unions of such sets, so the definition is evaluated on the product of the
//! per-coordinate representatives.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::closures::Element;
use crate::error::{Result, UfgError};
use crate::geometry::Point2;
use crate::rational::{int, Rational};

use super::FamilyMode;

#[derive(Clone, Debug)]
pub enum Coord {
    Plane,
    Nominal(Vec<String>),
    Line,
}

/// An exact point either in i128 homogeneous form (w > 0) or as rationals.
#[derive(Clone, Debug)]
struct Cand {
    x: Rational,
    y: Rational,
    h: Option<(i128, i128, i128)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Lat {
    x: i64,
    y: i64,
}

fn lcm_den<'a>(vals: impl Iterator<Item = &'a Rational>) -> BigInt {
    let mut l = BigInt::from(1);
    for v in vals {
        let d = v.denom().clone();
        let g = num_integer::Integer::gcd(&l, &d);
        l = &l / &g * d;
    }
    l
}

fn sgn_big(x: &Rational) -> i8 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

/// Sign of (q − p) × (z − p) for lattice p, q.
fn orient(p: Lat, q: Lat, z: &Cand) -> i8 {
    if let Some((x, y, w)) = z.h {
        let go = || -> Option<i128> {
            let dx = (q.x as i128).checked_sub(p.x as i128)?;
            let dy = (q.y as i128).checked_sub(p.y as i128)?;
            let zy = y.checked_sub((p.y as i128).checked_mul(w)?)?;
            let zx = x.checked_sub((p.x as i128).checked_mul(w)?)?;
            dx.checked_mul(zy)?.checked_sub(dy.checked_mul(zx)?)
        };
        if let Some(v) = go() {
            return v.signum() as i8;
        }
    }
    let (px, py) = (int(p.x), int(p.y));
    let v = (int(q.x) - &px) * (&z.y - &py) - (int(q.y) - &py) * (&z.x - &px);
    sgn_big(&v)
}

fn orient3(a: Lat, b: Lat, c: Lat) -> i8 {
    let v = (b.x as i128 - a.x as i128) * (c.y as i128 - a.y as i128)
        - (b.y as i128 - a.y as i128) * (c.x as i128 - a.x as i128);
    v.signum() as i8
}

fn between(lo: i64, hi: i64, v: &Rational, h: Option<(i128, i128)>) -> bool {
    let (lo, hi) = (lo.min(hi), lo.max(hi));
    if let Some((v, w)) = h {
        if let (Some(a), Some(b)) = ((lo as i128).checked_mul(w), (hi as i128).checked_mul(w)) {
            return a <= v && v <= b;
        }
    }
    &int(lo) <= v && v <= &int(hi)
}

fn on_segment(p: Lat, q: Lat, z: &Cand) -> bool {
    orient(p, q, z) == 0
        && between(p.x, q.x, &z.x, z.h.map(|h| (h.0, h.2)))
        && between(p.y, q.y, &z.y, z.h.map(|h| (h.1, h.2)))
}

fn same(p: Lat, z: &Cand) -> bool {
    between(p.x, p.x, &z.x, z.h.map(|h| (h.0, h.2))) && between(p.y, p.y, &z.y, z.h.map(|h| (h.1, h.2)))
}

/// z ∈ conv(pts) via Carathéodory: some triangle, segment or point of pts holds z.
fn in_hull(pts: &[Lat], z: &Cand) -> bool {
    let k = pts.len();
    for i in 0..k {
        if same(pts[i], z) {
            return true;
        }
        for j in i + 1..k {
            if on_segment(pts[i], pts[j], z) {
                return true;
            }
            for l in j + 1..k {
                let o = orient3(pts[i], pts[j], pts[l]);
                if o == 0 {
                    continue;
                }
                let s = [
                    orient(pts[i], pts[j], z),
                    orient(pts[j], pts[l], z),
                    orient(pts[l], pts[i], z),
                ];
                if s.iter().all(|&x| x * o >= 0) {
                    return true;
                }
            }
        }
    }
    false
}

fn cand(x: Rational, y: Rational) -> Cand {
    let d = lcm_den([&x, &y].into_iter());
    let h = (|| {
        let w = d.to_i128()?;
        let hx = (&x * Rational::from_integer(d.clone())).to_integer().to_i128()?;
        let hy = (&y * Rational::from_integer(d.clone())).to_integer().to_i128()?;
        Some((hx, hy, w))
    })();
    Cand { x, y, h }
}

/// Line a·x + b·y = c through two lattice points.
fn line(p: Lat, q: Lat) -> (Rational, Rational, Rational) {
    let a = int(q.y - p.y);
    let b = int(p.x - q.x);
    let c = &a * int(p.x) + &b * int(p.y);
    (a, b, c)
}

/// One representative per face, edge and vertex of the arrangement of all lines through
/// two of the points, restricted to the points' hull.
fn plane_candidates(pts: &[Lat]) -> Vec<Cand> {
    let mut distinct: Vec<Lat> = Vec::new();
    for p in pts {
        if !distinct.contains(p) {
            distinct.push(*p);
        }
    }
    let mut lines = Vec::new();
    for i in 0..distinct.len() {
        for j in i + 1..distinct.len() {
            lines.push(line(distinct[i], distinct[j]));
        }
    }
    let mut vertices: BTreeSet<(Rational, Rational)> = distinct.iter().map(|p| (int(p.x), int(p.y))).collect();
    for i in 0..lines.len() {
        for j in i + 1..lines.len() {
            let (a1, b1, c1) = &lines[i];
            let (a2, b2, c2) = &lines[j];
            let det = a1 * b2 - a2 * b1;
            if det.is_zero() {
                continue;
            }
            let x = (c1 * b2 - c2 * b1) / &det;
            let y = (a1 * c2 - a2 * c1) / &det;
            vertices.insert((x, y));
        }
    }
    let xs: BTreeSet<Rational> = vertices.iter().map(|v| v.0.clone()).collect();
    let xs: Vec<Rational> = xs.into_iter().collect();
    let mut sweeps = xs.clone();
    for w in xs.windows(2) {
        sweeps.push((&w[0] + &w[1]) / int(2));
    }
    let mut out = Vec::new();
    for sx in sweeps {
        let mut ys: BTreeSet<Rational> = vertices.iter().filter(|v| v.0 == sx).map(|v| v.1.clone()).collect();
        for (a, b, c) in &lines {
            if !b.is_zero() {
                ys.insert((c - a * &sx) / b);
            }
        }
        let ys: Vec<Rational> = ys.into_iter().collect();
        let mut rep = ys.clone();
        for w in ys.windows(2) {
            rep.push((&w[0] + &w[1]) / int(2));
        }
        for y in rep {
            let z = cand(sx.clone(), y);
            if in_hull(&distinct, &z) {
                out.push(z);
            }
        }
    }
    out
}

/// Membership of each candidate's coordinate in the closure of each listed subset.
/// Bit `s` of the result corresponds to `subsets[s]`.
fn masks(coord: &Coord, col: &[&Element], subsets: &[u32]) -> Result<Vec<(u64, Option<Element>)>> {
    let pick = |m: u32| -> Vec<usize> { (0..col.len()).filter(|i| m & (1 << i) != 0).collect() };
    let bad = |g: &Element| UfgError::Input(format!("oracle cannot read {g:?}"));
    Ok(match coord {
        Coord::Plane => {
            let mut pts = Vec::with_capacity(col.len());
            let mut raw: Vec<&Point2> = Vec::with_capacity(col.len());
            for g in col {
                raw.push(g.as_point().ok_or_else(|| bad(g))?);
            }
            let dx = lcm_den(raw.iter().map(|p| &p.x));
            let dy = lcm_den(raw.iter().map(|p| &p.y));
            for p in &raw {
                let x = (&p.x * Rational::from_integer(dx.clone())).to_integer().to_i64();
                let y = (&p.y * Rational::from_integer(dy.clone())).to_integer().to_i64();
                match (x, y) {
                    (Some(x), Some(y)) if x.abs() < 1 << 40 && y.abs() < 1 << 40 => pts.push(Lat { x, y }),
                    _ => return Err(UfgError::Resource("oracle coordinates too large".into())),
                }
            }
            plane_candidates(&pts)
                .into_iter()
                .map(|z| {
                    let m = subsets.iter().enumerate().fold(0u64, |acc, (s, &sub)| {
                        let sp: Vec<Lat> = pick(sub).into_iter().map(|i| pts[i]).collect();
                        if !sp.is_empty() && in_hull(&sp, &z) {
                            acc | (1 << s)
                        } else {
                            acc
                        }
                    });
                    // back to the original scale for the witness
                    let w = Point2::new(z.x / Rational::from_integer(dx.clone()), z.y / Rational::from_integer(dy.clone()));
                    (m, Some(Element::Point(w)))
                })
                .collect()
        }
        Coord::Nominal(v) => {
            let mut cats = Vec::with_capacity(col.len());
            for g in col {
                cats.push(g.as_category().ok_or_else(|| bad(g))?);
            }
            v.iter()
                .map(|c| {
                    let m = subsets.iter().enumerate().fold(0u64, |acc, (s, &sub)| {
                        let inside: BTreeSet<&str> = pick(sub).into_iter().map(|i| cats[i]).collect();
                        let member = match inside.len() {
                            0 => v.len() == 1,
                            1 => inside.contains(c.as_str()),
                            _ => true,
                        };
                        if member {
                            acc | (1 << s)
                        } else {
                            acc
                        }
                    });
                    (m, Some(Element::Category(c.clone())))
                })
                .collect()
        }
        Coord::Line => {
            let mut vals = Vec::with_capacity(col.len());
            for g in col {
                vals.push(g.as_value().ok_or_else(|| bad(g))?.clone());
            }
            let sorted: BTreeSet<Rational> = vals.iter().cloned().collect();
            let sorted: Vec<Rational> = sorted.into_iter().collect();
            let mut reps = sorted.clone();
            for w in sorted.windows(2) {
                reps.push((&w[0] + &w[1]) / int(2));
            }
            reps.into_iter()
                .map(|e| {
                    let m = subsets.iter().enumerate().fold(0u64, |acc, (s, &sub)| {
                        let inside: Vec<&Rational> = pick(sub).into_iter().map(|i| &vals[i]).collect();
                        let member = !inside.is_empty()
                            && inside.iter().any(|v| **v <= e)
                            && inside.iter().any(|v| **v >= e);
                        if member {
                            acc | (1 << s)
                        } else {
                            acc
                        }
                    });
                    (m, Some(Element::Value(e)))
                })
                .collect()
        }
    })
}

/// Decides whether `a` is a premise of the product of `coords`. Elements are tuples in
/// coordinate order, or bare coordinates when there is a single coordinate.
pub fn product_premise(coords: &[Coord], a: &[Element], mode: FamilyMode) -> Result<(bool, Option<Element>)> {
    let k = a.len();
    if k == 0 || k > 6 {
        return Err(UfgError::Resource(format!("product oracle handles 1 to 6 elements, got {k}")));
    }
    if mode == FamilyMode::AllFamilies && k > 4 {
        return Err(UfgError::Resource("all-families mode handles at most 4 elements".into()));
    }
    let full = (1u32 << k) - 1;
    let mut subsets = vec![full];
    match mode {
        FamilyMode::AllFamilies => subsets.extend(0..full),
        FamilyMode::MaximalOnly => subsets.extend((0..k).map(|i| full ^ (1 << i))),
    }
    let cols: Vec<Vec<&Element>> = (0..coords.len())
        .map(|c| {
            a.iter()
                .map(|g| match g {
                    Element::Tuple(xs) => &xs[c],
                    other => other,
                })
                .collect()
        })
        .collect();
    let per: Vec<Vec<(u64, Option<Element>)>> = coords
        .iter()
        .zip(&cols)
        .map(|(c, col)| masks(c, col, &subsets))
        .collect::<Result<_>>()?;

    // Walk the product of representatives, keeping the membership pattern and whether
    // the representative is an element of A.
    let mut inside: BTreeSet<u64> = BTreeSet::new();
    let mut outside: BTreeSet<u64> = BTreeSet::new();
    let mut beyond_a = false;
    let mut first_free: Option<Vec<usize>> = None;
    let mut idx = vec![0usize; coords.len()];
    'walk: loop {
        let m = idx.iter().enumerate().fold(u64::MAX, |acc, (c, &i)| acc & per[c][i].0);
        if m & 1 != 0 {
            inside.insert(m >> 1);
            let z: Vec<&Element> = idx.iter().enumerate().map(|(c, &i)| per[c][i].1.as_ref().unwrap()).collect();
            let in_a = (0..k).any(|g| (0..coords.len()).all(|c| cols[c][g] == z[c]));
            if !in_a {
                beyond_a = true;
            }
            if first_free.is_none() && m >> 1 == 0 {
                first_free = Some(idx.clone());
            }
        } else {
            outside.insert(m >> 1);
        }
        for c in (0..coords.len()).rev() {
            idx[c] += 1;
            if idx[c] < per[c].len() {
                continue 'walk;
            }
            idx[c] = 0;
        }
        break;
    }
    if !beyond_a {
        return Ok((false, None));
    }
    let n_sub = subsets.len() - 1;
    // a family reproduces γ(A) iff it meets every pattern inside γ(A) and none outside
    let covered = match mode {
        FamilyMode::MaximalOnly => inside.iter().all(|&m| m != 0),
        FamilyMode::AllFamilies => (0u64..1 << n_sub)
            .any(|fam| inside.iter().all(|&m| m & fam != 0) && outside.iter().all(|&m| m & fam == 0)),
    };
    if covered {
        return Ok((false, None));
    }
    let witness = first_free.map(|idx| {
        let parts: Vec<Element> = idx.iter().enumerate().map(|(c, &i)| per[c][i].1.clone().unwrap()).collect();
        if parts.len() == 1 {
            parts.into_iter().next().unwrap()
        } else {
            Element::Tuple(parts)
        }
    });
    Ok((true, witness))
}

/// Closed membership of `g` in the product closure of `a`, coordinate by coordinate.
pub fn product_contains(coords: &[Coord], a: &[Element], g: &Element) -> Result<bool> {
    let get = |e: &'_ Element, c: usize| -> Element {
        match e {
            Element::Tuple(xs) => xs[c].clone(),
            other => other.clone(),
        }
    };
    for (c, coord) in coords.iter().enumerate() {
        let col: Vec<Element> = a.iter().map(|e| get(e, c)).collect();
        let x = get(g, c);
        let bad = || UfgError::Input(format!("oracle cannot read {x:?}"));
        let inside = match coord {
            Coord::Plane => {
                let p = x.as_point().ok_or_else(bad)?;
                let pts: Vec<&Point2> = col.iter().map(|e| e.as_point().ok_or_else(bad)).collect::<Result<_>>()?;
                let dx = lcm_den(pts.iter().map(|p| &p.x).chain([&p.x]));
                let dy = lcm_den(pts.iter().map(|p| &p.y).chain([&p.y]));
                let sx = Rational::from_integer(dx);
                let sy = Rational::from_integer(dy);
                let lat: Option<Vec<Lat>> = pts
                    .iter()
                    .map(|q| {
                        Some(Lat {
                            x: (&q.x * &sx).to_integer().to_i64()?,
                            y: (&q.y * &sy).to_integer().to_i64()?,
                        })
                    })
                    .collect();
                let lat = lat.ok_or_else(|| UfgError::Resource("oracle coordinates too large".into()))?;
                in_hull(&lat, &cand(&p.x * &sx, &p.y * &sy))
            }
            Coord::Nominal(v) => {
                let c0 = x.as_category().ok_or_else(bad)?;
                let inside: BTreeSet<&str> = col.iter().map(|e| e.as_category().ok_or_else(bad)).collect::<Result<_>>()?;
                match inside.len() {
                    0 => v.len() == 1,
                    1 => inside.contains(c0),
                    _ => v.iter().any(|c| c == c0),
                }
            }
            Coord::Line => {
                let e = x.as_value().ok_or_else(bad)?;
                let vals: Vec<&Rational> = col.iter().map(|e| e.as_value().ok_or_else(bad)).collect::<Result<_>>()?;
                vals.iter().any(|v| *v <= e) && vals.iter().any(|v| *v >= e)
            }
        };
        if !inside {
            return Ok(false);
        }
    }
    Ok(true)
}
