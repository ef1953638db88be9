use fixedbitset::FixedBitSet;
use num_traits::{One, Zero};
use proptest::prelude::*;

use ufg_core::closures::{ClosureDescriptor, CodedObject, Element, HierPrefixClosure};
use ufg_core::context::FormalContext;
use ufg_core::depth::{quasiconcave_hull, ufg_depth, Weights};
use ufg_core::engine::{count_tuples_with, is_premise, is_premise_finite, CountOptions};
use ufg_core::geometry::{covers_hull, covers_hull_fast, Point2};
use ufg_core::oracle::{cover_witness_mc, depth_oracle, premise_oracle, FamilyMode, OracleConfig};
use ufg_core::rational::{fraction_string, int, parse_rational, ratio, Rational};
use ufg_core::sample::{Observation, Sample};

fn ctx_from(rows: &[Vec<bool>]) -> FormalContext {
    let objects = (0..rows.len()).map(|i| format!("g{i}")).collect();
    let attributes = (0..rows[0].len()).map(|i| format!("m{i}")).collect();
    FormalContext::new(objects, attributes, rows.to_vec()).unwrap()
}

fn bits(n: usize, idx: impl IntoIterator<Item = usize>) -> FixedBitSet {
    let mut b = FixedBitSet::with_capacity(n);
    for i in idx {
        b.insert(i);
    }
    b
}

fn context_strategy(max_g: usize, max_m: usize) -> impl Strategy<Value = Vec<Vec<bool>>> {
    (2..=max_g, 1..=max_m).prop_flat_map(|(g, m)| prop::collection::vec(prop::collection::vec(any::<bool>(), m), g))
}

fn point() -> impl Strategy<Value = Point2> {
    (0i64..6, 0i64..6).prop_map(|(x, y)| Point2::from_ints(x, y))
}

fn mixed() -> impl Strategy<Value = Vec<Element>> {
    prop::collection::btree_map((0i64..5, 0i64..5), (0usize..2, 1i64..4), 3..8).prop_map(|m| {
        m.into_iter()
            .map(|((x, y), (c, e))| Element::mixed(Point2::from_ints(x, y), ["a", "b"][c], int(e)))
            .collect()
    })
}

fn weighted_objects(ws: &[u8]) -> Sample {
    Sample::new(
        ws.iter()
            .enumerate()
            .map(|(i, &w)| Observation {
                id: format!("o{i}"),
                element: Element::Object(i),
                weight: int(w as i64),
            })
            .collect(),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn closure_axioms(rows in context_strategy(7, 5), a in prop::collection::vec(0usize..7, 0..4), b in prop::collection::vec(0usize..7, 0..4)) {
        let ctx = ctx_from(&rows);
        let n = ctx.num_objects();
        let a = bits(n, a.into_iter().filter(|&i| i < n));
        let mut ab = a.clone();
        ab.union_with(&bits(n, b.into_iter().filter(|&i| i < n)));
        let ca = ctx.close(&a);
        prop_assert!(a.is_subset(&ca));
        prop_assert!(ca.is_subset(&ctx.close(&ab)));
        prop_assert_eq!(ctx.close(&ca), ca);
    }

    #[test]
    fn finite_premise_matches_oracle(rows in context_strategy(7, 5), pick in prop::collection::btree_set(0usize..7, 1..5)) {
        let ctx = ctx_from(&rows);
        let a: Vec<usize> = pick.into_iter().filter(|&i| i < ctx.num_objects()).collect();
        prop_assume!(!a.is_empty());
        let desc = ClosureDescriptor::finite(ctx.clone());
        let elems: Vec<Element> = a.iter().map(|&i| Element::Object(i)).collect();
        let engine = is_premise(&desc, &elems).unwrap();
        let ids: Vec<String> = a.iter().map(|&i| format!("g{i}")).collect();
        prop_assert_eq!(is_premise_finite(&ctx, &ids).unwrap().is_premise, engine.is_premise);
        let maximal = premise_oracle(&desc, &elems, &OracleConfig::with_mode(FamilyMode::MaximalOnly)).unwrap();
        let all = premise_oracle(&desc, &elems, &OracleConfig::with_mode(FamilyMode::AllFamilies)).unwrap();
        prop_assert_eq!(engine.is_premise, maximal);
        prop_assert_eq!(maximal, all);
        if let Some(Element::Object(w)) = engine.witness {
            let closed = ctx.close(&bits(ctx.num_objects(), a.iter().cloned()));
            prop_assert!(closed.contains(w));
            for skip in 0..a.len() {
                let rest = bits(ctx.num_objects(), a.iter().enumerate().filter(|(k, _)| *k != skip).map(|(_, &g)| g));
                prop_assert!(!ctx.close(&rest).contains(w));
            }
        }
    }

    #[test]
    fn finite_depth_matches_oracle(rows in context_strategy(6, 4), ws in prop::collection::vec(0u8..4, 6)) {
        let ctx = ctx_from(&rows);
        let n = ctx.num_objects();
        prop_assume!(ws[..n].iter().any(|&w| w > 0));
        // repeated observations of one object exercise the aggregation path
        let mut obs = Vec::new();
        for (g, &w) in ws[..n].iter().enumerate() {
            for k in 0..w {
                obs.push(Observation { id: format!("o{g}_{k}"), element: Element::Object(g), weight: Rational::one() });
            }
        }
        let sample = Sample::new(obs).unwrap();
        let desc = ClosureDescriptor::finite(ctx);
        let queries: Vec<Element> = (0..n).map(Element::Object).collect();
        let w = Weights::new(vec![ratio(1, 2), int(2), ratio(3, 4)]).unwrap();
        let got = ufg_depth(&sample, &queries, &desc, &w).unwrap();
        let want = depth_oracle(&sample, &queries, &desc, &w, &OracleConfig::default()).unwrap();
        prop_assert_eq!(got.depths(), want.depths());
        prop_assert_eq!(&got.b, &want.b);
        prop_assert_eq!(&got.j_set, &want.j_set);
    }

    #[test]
    fn counts_bounded(rows in context_strategy(7, 5), ws in prop::collection::vec(1u8..5, 7)) {
        let ctx = ctx_from(&rows);
        let n = ctx.num_objects();
        let desc = ClosureDescriptor::finite(ctx);
        let queries: Vec<Element> = (0..n).map(Element::Object).collect();
        let res = ufg_depth(&weighted_objects(&ws[..n]), &queries, &desc, &Weights::ones()).unwrap();
        for q in &res.queries {
            for (j, (a, b)) in q.a.iter().zip(&res.b).enumerate() {
                prop_assert!(*a >= Rational::zero() && a <= b);
                prop_assert!(q.terms[j] >= Rational::zero() && q.terms[j] <= Rational::one());
            }
        }
    }

    #[test]
    fn fast_cover_rule_matches_areas(pts in prop::collection::btree_set(point(), 1..5), mask in 1u8..16) {
        let pts: Vec<Point2> = pts.into_iter().collect();
        let mask = mask & ((1u8 << pts.len()) - 1);
        prop_assume!(mask != 0);
        let removed: Vec<Point2> = (0..pts.len()).filter(|i| mask & (1 << i) != 0).map(|i| pts[i].clone()).collect();
        let slow = covers_hull(&pts, &removed).unwrap();
        prop_assert_eq!(covers_hull_fast(&pts, mask).unwrap(), slow);
    }

    #[test]
    fn planar_counter_matches_generic(elems in mixed(), q in mixed()) {
        let desc = ClosureDescriptor::mixed(["a", "b"]).unwrap();
        let sample = Sample::unit(elems);
        let opts = |c: &str| CountOptions { counter: Some(c.into()), ..CountOptions::default() };
        let planar = count_tuples_with(&sample, &q, &desc, &opts("planar")).unwrap();
        let generic = count_tuples_with(&sample, &q, &desc, &opts("generic")).unwrap();
        prop_assert_eq!(planar.b, generic.b);
        prop_assert_eq!(planar.a, generic.a);
        prop_assert_eq!(planar.premise_sets, generic.premise_sets);
    }

    #[test]
    fn hier_counter_matches_generic(codes in prop::collection::vec((1u8..4, 1u8..4), 2..14), dup in any::<bool>()) {
        let catalog: Vec<String> = (1..4).flat_map(|a| (1..4).map(move |b| format!("{a}{b}"))).collect();
        let h = HierPrefixClosure::new(catalog.iter().cloned(), 2, dup).unwrap();
        let obs: Vec<Element> = codes
            .iter()
            .enumerate()
            .map(|(i, (a, b))| {
                let code = format!("{a}{b}");
                let object = if dup { format!("p{i}") } else { code.clone() };
                Element::Coded(CodedObject::new(code, object))
            })
            .collect();
        let desc = ClosureDescriptor::hier(h);
        let sample = Sample::unit(obs);
        let queries: Vec<Element> = catalog.iter().map(|c| Element::Coded(CodedObject::new(c.clone(), "q"))).collect();
        let opts = |c: &str| CountOptions { counter: Some(c.into()), ..CountOptions::default() };
        let fast = count_tuples_with(&sample, &queries, &desc, &opts("hier-frequency")).unwrap();
        let generic = count_tuples_with(&sample, &queries, &desc, &opts("generic")).unwrap();
        prop_assert_eq!(&fast.b, &generic.b);
        prop_assert_eq!(&fast.a, &generic.a);
        let oracle = depth_oracle(&sample, &queries, &desc, &Weights::ones(), &OracleConfig::default()).unwrap();
        prop_assert_eq!(&fast.b, &oracle.b);
    }

    #[test]
    fn plane_depth_scale_invariant(pts in prop::collection::vec(point(), 3..8), q in point(), num in 1i64..9, den in 1i64..9) {
        let desc = ClosureDescriptor::convex2d();
        let s = ratio(num, den);
        let scale = |p: &Point2| Point2::new(&p.x * &s, &p.y * &s);
        let a = ufg_depth(&Sample::unit(pts.iter().cloned().map(Element::Point)), &[Element::Point(q.clone())], &desc, &Weights::ones()).unwrap();
        let b = ufg_depth(&Sample::unit(pts.iter().map(|p| Element::Point(scale(p)))), &[Element::Point(scale(&q))], &desc, &Weights::ones()).unwrap();
        prop_assert_eq!(a.depths(), b.depths());
    }

    #[test]
    fn hull_is_idempotent(rows in context_strategy(7, 4), vals in prop::collection::vec(0i64..6, 7)) {
        let ctx = ctx_from(&rows);
        let n = ctx.num_objects();
        let desc = ClosureDescriptor::finite(ctx);
        let pairs: Vec<(Element, Rational)> = (0..n).map(|g| (Element::Object(g), int(vals[g]))).collect();
        let once = quasiconcave_hull(&pairs, &desc).unwrap();
        let again: Vec<(Element, Rational)> = (0..n).map(|g| (Element::Object(g), once[g].clone())).collect();
        prop_assert_eq!(quasiconcave_hull(&again, &desc).unwrap(), once);
    }

    #[test]
    fn fraction_round_trip(n in -10_000i64..10_000, d in 1i64..500) {
        let r = ratio(n, d);
        prop_assert_eq!(parse_rational(&fraction_string(&r)).unwrap(), r);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn cover_agrees_with_sampled_witness(pts in prop::collection::btree_set(point(), 3..5), mask in 1u8..16) {
        let pts: Vec<Point2> = pts.into_iter().collect();
        let mask = mask & ((1u8 << pts.len()) - 1);
        prop_assume!(mask != 0);
        let removed: Vec<Point2> = (0..pts.len()).filter(|i| mask & (1 << i) != 0).map(|i| pts[i].clone()).collect();
        let covered = covers_hull(&pts, &removed).unwrap();
        let cfg = OracleConfig { mc_samples: 20_000, ..OracleConfig::default() };
        prop_assert_eq!(cover_witness_mc(&pts, &removed, &cfg).is_none(), covered);
    }
}
