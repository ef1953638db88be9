//! Exact planar geometry over rationals: predicates, hulls, convex clipping and the
//! hull-cover test behind the (C2) check in the plane.

use std::fmt;

use num_traits::{Signed, Zero};

use crate::error::{input, Result};
use crate::rational::{parse_rational, Rational};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point2 {
    pub x: Rational,
    pub y: Rational,
}

impl Point2 {
    pub fn new(x: Rational, y: Rational) -> Self {
        Point2 { x, y }
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        Point2::new(crate::rational::int(x), crate::rational::int(y))
    }

    pub fn parse(x: &str, y: &str) -> Result<Self> {
        Ok(Point2::new(parse_rational(x)?, parse_rational(y)?))
    }
}

impl fmt::Debug for Point2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

fn cross(p: &Point2, q: &Point2, r: &Point2) -> Rational {
    (&q.x - &p.x) * (&r.y - &p.y) - (&q.y - &p.y) * (&r.x - &p.x)
}

/// Sign of (q−p)×(r−p): +1 for a left turn, −1 for a right turn, 0 when collinear.
pub fn orientation(p: &Point2, q: &Point2, r: &Point2) -> i8 {
    let c = cross(p, q, r);
    if c.is_positive() {
        1
    } else if c.is_negative() {
        -1
    } else {
        0
    }
}

/// Closed convex hull of finitely many points. Polygons are counterclockwise and
/// strictly convex; collinear or coincident inputs give a segment or a point.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum ConvexPoly {
    Point(Point2),
    Segment(Point2, Point2),
    Polygon(Vec<Point2>),
}

impl fmt::Debug for ConvexPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConvexPoly::Point(p) => write!(f, "Point{p:?}"),
            ConvexPoly::Segment(a, b) => write!(f, "Segment[{a:?}, {b:?}]"),
            ConvexPoly::Polygon(v) => write!(f, "Polygon{v:?}"),
        }
    }
}

/// `a·x + b·y ≥ c`.
struct HalfPlane {
    a: Rational,
    b: Rational,
    c: Rational,
}

impl HalfPlane {
    fn slack(&self, p: &Point2) -> Rational {
        &self.a * &p.x + &self.b * &p.y - &self.c
    }

    /// Left of the directed line p→q.
    fn left_of(p: &Point2, q: &Point2) -> Self {
        let a = &p.y - &q.y;
        let b = &q.x - &p.x;
        let c = &a * &p.x + &b * &p.y;
        HalfPlane { a, b, c }
    }

    /// Points whose projection on p→q does not fall before p.
    fn ahead_of(p: &Point2, q: &Point2) -> Self {
        let a = &q.x - &p.x;
        let b = &q.y - &p.y;
        let c = &a * &p.x + &b * &p.y;
        HalfPlane { a, b, c }
    }
}

impl ConvexPoly {
    pub fn vertices(&self) -> Vec<Point2> {
        match self {
            ConvexPoly::Point(p) => vec![p.clone()],
            ConvexPoly::Segment(a, b) => vec![a.clone(), b.clone()],
            ConvexPoly::Polygon(v) => v.clone(),
        }
    }

    pub fn dimension(&self) -> usize {
        match self {
            ConvexPoly::Point(_) => 0,
            ConvexPoly::Segment(..) => 1,
            ConvexPoly::Polygon(_) => 2,
        }
    }

    /// Closed containment; boundary points count as inside.
    pub fn contains(&self, p: &Point2) -> bool {
        match self {
            ConvexPoly::Point(q) => q == p,
            ConvexPoly::Segment(a, b) => {
                orientation(a, b, p) == 0 && a.min(b) <= p && p <= a.max(b)
            }
            ConvexPoly::Polygon(v) => (0..v.len())
                .all(|i| orientation(&v[i], &v[(i + 1) % v.len()], p) >= 0),
        }
    }

    fn half_planes(&self) -> Vec<HalfPlane> {
        match self {
            ConvexPoly::Point(p) => {
                let one = Rational::from_integer(1.into());
                let zero = Rational::zero();
                vec![
                    HalfPlane { a: one.clone(), b: zero.clone(), c: p.x.clone() },
                    HalfPlane { a: -one.clone(), b: zero.clone(), c: -p.x.clone() },
                    HalfPlane { a: zero.clone(), b: one.clone(), c: p.y.clone() },
                    HalfPlane { a: zero, b: -one, c: -p.y.clone() },
                ]
            }
            ConvexPoly::Segment(a, b) => vec![
                HalfPlane::left_of(a, b),
                HalfPlane::left_of(b, a),
                HalfPlane::ahead_of(a, b),
                HalfPlane::ahead_of(b, a),
            ],
            ConvexPoly::Polygon(v) => (0..v.len())
                .map(|i| HalfPlane::left_of(&v[i], &v[(i + 1) % v.len()]))
                .collect(),
        }
    }
}

/// Andrew's monotone chain with exact predicates. Returns `None` for no points.
pub fn convex_hull(points: &[Point2]) -> Option<ConvexPoly> {
    let mut pts: Vec<Point2> = points.to_vec();
    pts.sort();
    pts.dedup();
    match pts.len() {
        0 => return None,
        1 => return Some(ConvexPoly::Point(pts.pop().unwrap())),
        _ => {}
    }
    let mut lower: Vec<Point2> = Vec::new();
    for p in &pts {
        while lower.len() >= 2 && orientation(&lower[lower.len() - 2], &lower[lower.len() - 1], p) <= 0 {
            lower.pop();
        }
        lower.push(p.clone());
    }
    let mut upper: Vec<Point2> = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2 && orientation(&upper[upper.len() - 2], &upper[upper.len() - 1], p) <= 0 {
            upper.pop();
        }
        upper.push(p.clone());
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    Some(if lower.len() == 2 {
        let b = lower.pop().unwrap();
        let a = lower.pop().unwrap();
        ConvexPoly::Segment(a, b)
    } else {
        ConvexPoly::Polygon(lower)
    })
}

fn clip(subject: &[Point2], h: &HalfPlane) -> Vec<Point2> {
    let n = subject.len();
    let mut out = Vec::with_capacity(n + 2);
    for i in 0..n {
        let cur = &subject[i];
        let next = &subject[(i + 1) % n];
        let sc = h.slack(cur);
        let sn = h.slack(next);
        if !sc.is_negative() {
            out.push(cur.clone());
        }
        if (sc.is_negative() && sn.is_positive()) || (sc.is_positive() && sn.is_negative()) {
            let t = &sc / (&sc - &sn);
            out.push(Point2::new(
                &cur.x + &t * (&next.x - &cur.x),
                &cur.y + &t * (&next.y - &cur.y),
            ));
        }
    }
    out
}

/// Exact intersection of two closed convex sets; `None` when disjoint.
pub fn intersect(a: &ConvexPoly, b: &ConvexPoly) -> Option<ConvexPoly> {
    let mut pts = a.vertices();
    for h in b.half_planes() {
        pts = clip(&pts, &h);
        if pts.is_empty() {
            return None;
        }
    }
    convex_hull(&pts)
}

/// Twice the enclosed area (shoelace formula); zero for points and segments.
pub fn area2(p: &ConvexPoly) -> Rational {
    match p {
        ConvexPoly::Polygon(v) => {
            let mut s = Rational::zero();
            for i in 0..v.len() {
                let q = &v[(i + 1) % v.len()];
                s += &v[i].x * &q.y - &q.x * &v[i].y;
            }
            s
        }
        _ => Rational::zero(),
    }
}

pub const COVER_POINT_LIMIT: usize = 6;

/// Whether ⋃_{g∈T} conv(P∖{g}) ⊇ conv(P). Repeated points in P are merged.
///
/// In dimension 2 the test compares areas: the omit-one hulls are closed subsets of
/// conv(P), so if their union misses a point it misses a relatively open subset of
/// conv(P), which has positive area. Equality of areas therefore means cover.
pub fn covers_hull(points: &[Point2], removed: &[Point2]) -> Result<bool> {
    let mut p: Vec<Point2> = points.to_vec();
    p.sort();
    p.dedup();
    if p.len() > COVER_POINT_LIMIT {
        return input(format!(
            "cover test supports at most {COVER_POINT_LIMIT} points, got {}",
            p.len()
        ));
    }
    let mut t: Vec<usize> = Vec::new();
    for g in removed {
        match p.iter().position(|q| q == g) {
            Some(i) => t.push(i),
            None => return input(format!("removed point {g:?} is not in the point set")),
        }
    }
    t.sort_unstable();
    t.dedup();
    if t.is_empty() {
        return input("cover test needs a nonempty removal set");
    }
    let hull = convex_hull(&p).expect("nonempty");
    let rest = |g: usize| -> Vec<Point2> {
        p.iter()
            .enumerate()
            .filter(|&(i, _)| i != g)
            .map(|(_, q)| q.clone())
            .collect()
    };
    match hull.dimension() {
        0 => Ok(t.iter().any(|&g| !rest(g).is_empty())),
        1 => {
            // p is sorted lexicographically, which is the order along the line
            let k = p.len();
            let mut spans: Vec<(usize, usize)> = t
                .iter()
                .map(|&g| {
                    let lo = if g == 0 { 1 } else { 0 };
                    let hi = if g == k - 1 { k - 2 } else { k - 1 };
                    (lo, hi)
                })
                .collect();
            spans.sort_unstable();
            Ok(intervals_cover(0, k - 1, &spans))
        }
        _ => {
            let parts: Vec<ConvexPoly> = t
                .iter()
                .map(|&g| convex_hull(&rest(g)).expect("at least two points remain"))
                .collect();
            let mut union = Rational::zero();
            for mask in 1u32..(1 << parts.len()) {
                let mut acc: Option<ConvexPoly> = Some(hull.clone());
                for (i, part) in parts.iter().enumerate() {
                    if mask & (1 << i) != 0 {
                        acc = acc.and_then(|a| intersect(&a, part));
                    }
                }
                if let Some(piece) = acc {
                    let a = area2(&piece);
                    if mask.count_ones() % 2 == 1 {
                        union += a;
                    } else {
                        union -= a;
                    }
                }
            }
            Ok(union == area2(&hull))
        }
    }
}

/// Whether closed intervals `spans` (sorted by start) cover [lo, hi] on a line where
/// consecutive integer positions are separated by gaps of positive length.
pub(crate) fn intervals_cover(lo: usize, hi: usize, spans: &[(usize, usize)]) -> bool {
    let mut it = spans.iter();
    let Some(&(s0, e0)) = it.next() else {
        return false;
    };
    if s0 > lo {
        return false;
    }
    let mut reach = e0;
    for &(s, e) in it {
        if s > reach {
            return false;
        }
        reach = reach.max(e);
    }
    reach >= hi
}

/// Cover pattern of at most four pairwise distinct points, read off from
/// orientation signs alone: `T` covers iff it meets `any` or contains one of `all`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoverRule {
    pub any: u8,
    pub all: [u8; 2],
    pub n_all: u8,
}

impl CoverRule {
    const NEVER: CoverRule = CoverRule { any: 0, all: [0; 2], n_all: 0 };

    #[inline]
    pub fn covers(&self, t: u8) -> bool {
        t & self.any != 0 || self.all[..self.n_all as usize].iter().any(|&m| t & m == m)
    }
}

/// Builds the cover rule for `k ≤ 4` distinct points given their orientation predicate
/// and a strict lexicographic order (which orders collinear points along their line).
pub fn cover_rule(
    k: usize,
    orient: impl Fn(usize, usize, usize) -> i8,
    lex_less: impl Fn(usize, usize) -> bool,
) -> CoverRule {
    assert!(k <= 4, "cover rule handles at most four points");
    if k <= 2 {
        return CoverRule::NEVER;
    }
    let mut collinear = true;
    'outer: for i in 0..k {
        for j in i + 1..k {
            for l in j + 1..k {
                if orient(i, j, l) != 0 {
                    collinear = false;
                    break 'outer;
                }
            }
        }
    }
    if collinear {
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&a, &b| {
            if lex_less(a, b) {
                std::cmp::Ordering::Less
            } else {
                std::cmp::Ordering::Greater
            }
        });
        let ends = (1u8 << order[0]) | (1u8 << order[k - 1]);
        let full = ((1u16 << k) - 1) as u8;
        return CoverRule { any: full & !ends, all: [ends, 0], n_all: 1 };
    }
    if k == 3 {
        return CoverRule::NEVER;
    }
    for d in 0..4 {
        let o: Vec<usize> = (0..4).filter(|&x| x != d).collect();
        let (a, b, c) = (o[0], o[1], o[2]);
        let turn = orient(a, b, c);
        if turn == 0 {
            continue;
        }
        let s = [orient(a, b, d) * turn, orient(b, c, d) * turn, orient(c, a, d) * turn];
        if s.iter().any(|&x| x < 0) {
            continue;
        }
        let edges = [(a, b), (b, c), (c, a)];
        let vertices = (1u8 << a) | (1u8 << b) | (1u8 << c);
        return match s.iter().position(|&x| x == 0) {
            Some(e) => CoverRule {
                any: 1 << d,
                all: [(1 << edges[e].0) | (1 << edges[e].1), 0],
                n_all: 1,
            },
            None => CoverRule { any: 1 << d, all: [vertices, 0], n_all: 1 },
        };
    }
    let mut diagonals = [0u8; 2];
    let mut n = 0;
    for i in 0..4 {
        for j in i + 1..4 {
            let o: Vec<usize> = (0..4).filter(|&x| x != i && x != j).collect();
            if orient(i, j, o[0]) * orient(i, j, o[1]) < 0 && n < 2 {
                diagonals[n] = (1 << i) | (1 << j);
                n += 1;
            }
        }
    }
    CoverRule { any: 0, all: diagonals, n_all: n as u8 }
}

/// The cover test for at most four distinct points via [`cover_rule`]; falls back to
/// [`covers_hull`] otherwise.
pub fn covers_hull_fast(points: &[Point2], removed_mask: u8) -> Result<bool> {
    let distinct = {
        let mut p = points.to_vec();
        p.sort();
        p.dedup();
        p.len() == points.len()
    };
    if points.len() <= 4 && distinct {
        let rule = cover_rule(
            points.len(),
            |i, j, l| orientation(&points[i], &points[j], &points[l]),
            |i, j| points[i] < points[j],
        );
        return Ok(rule.covers(removed_mask));
    }
    let removed: Vec<Point2> = (0..points.len())
        .filter(|i| removed_mask & (1 << i) != 0)
        .map(|i| points[i].clone())
        .collect();
    covers_hull(points, &removed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn p(x: i64, y: i64) -> Point2 {
        Point2::from_ints(x, y)
    }

    #[test]
    fn orientation_signs() {
        assert_eq!(orientation(&p(0, 0), &p(1, 0), &p(0, 1)), 1);
        assert_eq!(orientation(&p(0, 0), &p(1, 0), &p(2, 0)), 0);
        assert_eq!(orientation(&p(0, 0), &p(0, 1), &p(1, 0)), -1);
    }

    #[test]
    fn hull_degenerate_forms() {
        assert_eq!(convex_hull(&[p(0, 0)]), Some(ConvexPoly::Point(p(0, 0))));
        assert_eq!(
            convex_hull(&[p(0, 0), p(2, 0), p(1, 0)]),
            Some(ConvexPoly::Segment(p(0, 0), p(2, 0)))
        );
        assert_eq!(convex_hull(&[]), None);
        let sq = convex_hull(&[p(0, 0), p(1, 1), p(1, 0), p(0, 1), p(1, 0)]).unwrap();
        assert_eq!(sq, ConvexPoly::Polygon(vec![p(0, 0), p(1, 0), p(1, 1), p(0, 1)]));
    }

    #[test]
    fn containment_is_closed() {
        let seg = convex_hull(&[p(0, 0), p(2, 0)]).unwrap();
        assert!(seg.contains(&p(1, 0)));
        assert!(!seg.contains(&p(3, 0)));
        let tri = convex_hull(&[p(0, 0), p(4, 0), p(0, 4)]).unwrap();
        assert!(!tri.contains(&p(3, 3)));
        assert!(tri.contains(&p(2, 2)));
        assert!(tri.contains(&p(0, 0)));
    }

    #[test]
    fn intersections_and_areas() {
        let unit = convex_hull(&[p(0, 0), p(1, 0), p(1, 1), p(0, 1)]).unwrap();
        let far = convex_hull(&[p(2, 2), p(3, 2), p(3, 3), p(2, 3)]).unwrap();
        assert_eq!(intersect(&unit, &far), None);
        assert_eq!(area2(&unit), int(2));
        let tri = convex_hull(&[p(0, 0), p(4, 0), p(0, 4)]).unwrap();
        assert_eq!(area2(&tri), int(16));
        assert_eq!(intersect(&tri, &tri), Some(tri.clone()));
        let touching = convex_hull(&[p(1, 0), p(2, 0), p(2, 1), p(1, 1)]).unwrap();
        assert_eq!(
            intersect(&unit, &touching),
            Some(ConvexPoly::Segment(p(1, 0), p(1, 1)))
        );
        let seg = ConvexPoly::Segment(p(-1, 1), p(5, 1));
        assert_eq!(intersect(&seg, &tri), Some(ConvexPoly::Segment(p(0, 1), p(3, 1))));
        assert_eq!(intersect(&tri, &seg), Some(ConvexPoly::Segment(p(0, 1), p(3, 1))));
        let dot = ConvexPoly::Point(p(1, 1));
        assert_eq!(intersect(&unit, &dot), Some(dot.clone()));
        assert_eq!(area2(&seg), int(0));
    }

    #[test]
    fn cover_examples() {
        let tri = [p(0, 0), p(4, 0), p(0, 4)];
        assert!(!covers_hull(&tri, &tri).unwrap());
        let line = [p(0, 0), p(1, 0), p(2, 0)];
        assert!(covers_hull(&line, &[p(1, 0)]).unwrap());
        assert!(!covers_hull(&line, &[p(0, 0)]).unwrap());
        assert!(covers_hull(&line, &[p(0, 0), p(2, 0)]).unwrap());
        let square = [p(0, 0), p(1, 0), p(1, 1), p(0, 1)];
        assert!(covers_hull(&square, &square).unwrap());
        assert!(!covers_hull(&square, &[p(0, 0), p(1, 0)]).unwrap());
        assert!(covers_hull(&square, &[p(0, 0), p(1, 1)]).unwrap());
        assert!(!covers_hull(&[p(3, 3)], &[p(3, 3)]).unwrap());
        assert!(covers_hull(&tri, &[p(9, 9)]).is_err());
        assert!(covers_hull(&tri, &[]).is_err());
    }

    #[test]
    fn interior_and_edge_points() {
        let inner = [p(0, 0), p(6, 0), p(0, 6), p(1, 1)];
        assert!(covers_hull(&inner, &[p(1, 1)]).unwrap());
        assert!(!covers_hull(&inner, &[p(0, 0), p(6, 0)]).unwrap());
        assert!(covers_hull(&inner, &[p(0, 0), p(6, 0), p(0, 6)]).unwrap());
        let edge = [p(0, 0), p(6, 0), p(0, 6), p(3, 0)];
        assert!(covers_hull(&edge, &[p(0, 0), p(6, 0)]).unwrap());
        assert!(!covers_hull(&edge, &[p(0, 0), p(0, 6)]).unwrap());
        for mask in 1u8..16 {
            for pts in [&inner, &edge] {
                let removed: Vec<Point2> =
                    (0..4).filter(|i| mask & (1 << i) != 0).map(|i| pts[i].clone()).collect();
                assert_eq!(
                    covers_hull(pts, &removed).unwrap(),
                    covers_hull_fast(pts, mask).unwrap(),
                    "{pts:?} {mask}"
                );
            }
        }
    }
}
