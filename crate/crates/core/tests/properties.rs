//! Invariants checked over randomly generated inputs.

use std::collections::BTreeSet;

use nagata_core::corpus;
use nagata_core::covers::{
    boundary_distance, check_decomposition, decomposition_to_lebesgue_cover, lebesgue_profile, mesh, refines, Cover,
};
use nagata_core::dimension::{find_decomposition, scale_range_dimension, transport_witness, DimQuery, SearchMode};
use nagata_core::extension::{
    extend_into_convex, mcshane_extend, project_to_simplex, real_lipschitz, total_vector_lipschitz, whitney_extend,
    ConvexBody, PartialMap,
};
use nagata_core::hyperbolic::{build_tower, dh_metric, hyperbolicity_certificate};
use nagata_core::metric::{bilipschitz_bounds, point_cloud, FiniteMap, FiniteMetricSpace, Norm};
use nagata_core::nerve::{barycentric_map, build_nerve, simplex_distance, star_preimages, verify_barycentric_bound};
use nagata_core::scalar::{Rational, Scalar};
use proptest::prelude::*;

fn cloud(points: &BTreeSet<(i32, i32)>, norm: Norm) -> FiniteMetricSpace<f64> {
    let pts: Vec<Vec<f64>> = points.iter().map(|&(x, y)| vec![x as f64, y as f64]).collect();
    point_cloud(&pts, norm).unwrap()
}

fn exact(space: &FiniteMetricSpace<f64>) -> FiniteMetricSpace<Rational> {
    space.map_scalar(|d| Rational::from_f64(*d).unwrap())
}

fn points(max: usize) -> impl Strategy<Value = BTreeSet<(i32, i32)>> {
    prop::collection::btree_set((0..8i32, 0..6i32), 2..=max)
}

fn space_and_cover(max: usize) -> impl Strategy<Value = (FiniteMetricSpace<f64>, Cover)> {
    (points(max), 1..5usize, any::<u64>()).prop_map(|(p, k, seed)| {
        let space = cloud(&p, Norm::L1);
        let cover = corpus::random_cover(space.len(), k, 0.25, &mut corpus::rng(seed));
        (space, cover)
    })
}

#[test]
fn local_lebesgue_number_can_exceed_the_mesh() {
    // Singletons have mesh 0 but sit at distance 1 from the rest.
    let space = corpus::path(2);
    let profile = lebesgue_profile(&space, &Cover::singletons(2)).unwrap();
    assert_eq!(profile.mesh, 0.0);
    assert_eq!(profile.global.to_f64(), 1.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn max_transform_absorbs_smaller_thresholds(p in points(8), delta in 1..5i64, gap in 1..5i64) {
        let space = exact(&cloud(&p, Norm::L1));
        let (delta, eps) = (Rational::from_i64(delta), Rational::from_i64(delta + gap));
        let twice = space.transform_max(&delta).unwrap().transform_max(&eps).unwrap();
        prop_assert_eq!(twice.rows(), space.transform_max(&eps).unwrap().rows());
        let twice = space.transform_min(&eps).unwrap().transform_min(&delta).unwrap();
        prop_assert_eq!(twice.rows(), space.transform_min(&delta).unwrap().rows());
        prop_assert!(space.transform_max(&delta).unwrap().is_metric());
        prop_assert!(space.transform_min(&delta).unwrap().is_metric());
    }

    #[test]
    fn lipschitz_constants_are_submultiplicative(
        p in points(7),
        q in points(7),
        r in points(7),
        seed in any::<u64>(),
    ) {
        use rand::Rng;
        let (x, y, z) = (cloud(&p, Norm::L1), cloud(&q, Norm::L2), cloud(&r, Norm::L1));
        let mut rng = corpus::rng(seed);
        let f = FiniteMap::total((0..x.len()).map(|_| rng.random_range(0..y.len())).collect());
        let g = FiniteMap::total((0..y.len()).map(|_| rng.random_range(0..z.len())).collect());
        let gf = f.compose(&g);
        let lhs = gf.lipschitz_constant(&x, &z);
        let rhs = g.lipschitz_constant(&y, &z) * f.lipschitz_constant(&x, &y);
        prop_assert!(lhs <= rhs * (1.0 + 1e-12), "{lhs} > {rhs}");
    }

    #[test]
    fn swapping_metrics_inverts_bilipschitz_bounds(p in points(8), eps in 1..6i64) {
        let a = exact(&cloud(&p, Norm::L1));
        let b = a.transform_max(&Rational::from_i64(eps)).unwrap();
        let ab = bilipschitz_bounds(&a, &b).unwrap();
        let ba = bilipschitz_bounds(&b, &a).unwrap();
        prop_assert_eq!(ba.mu, Rational::from_i64(1) / ab.lambda.clone());
        prop_assert_eq!(ba.lambda, Rational::from_i64(1) / ab.mu.clone());
    }

    #[test]
    fn boundary_distance_is_one_lipschitz((space, cover) in space_and_cover(9)) {
        let n = space.len();
        for s in 0..cover.len() {
            let f: Vec<f64> = (0..n).map(|x| boundary_distance(&space, &cover, s, x).unwrap().to_f64()).collect();
            if f.iter().any(|v| v.is_infinite()) {
                prop_assert!(f.iter().all(|v| v.is_infinite()));
                continue;
            }
            for x in 0..n {
                for y in 0..n {
                    prop_assert!((f[x] - f[y]).abs() <= *space.dist(x, y) + 1e-9);
                }
            }
        }
    }

    #[test]
    fn lebesgue_profile_is_ordered((space, cover) in space_and_cover(9)) {
        let profile = lebesgue_profile(&space, &cover).unwrap();
        let has_whole = !cover.whole_space_elements().is_empty();
        for local in &profile.local {
            prop_assert!(profile.global <= *local);
            prop_assert_eq!(local.is_infinite(), has_whole);
            if !has_whole {
                prop_assert!(local.to_f64() <= space.diameter() + 1e-9);
            }
        }
    }

    #[test]
    fn refinement_does_not_increase_mesh((space, cover) in space_and_cover(9), seed in any::<u64>()) {
        use rand::Rng;
        let mut rng = corpus::rng(seed);
        // Shrink every element to a random nonempty subset, keeping a cover.
        let n = space.len();
        let mut fine: Vec<Vec<usize>> = cover.elements().iter().map(|e| e.iter().copied().filter(|_| rng.random_bool(0.6)).collect()).collect();
        for x in 0..n {
            if !fine.iter().any(|e| e.contains(&x)) {
                let owner = cover.memberships(x)[0];
                fine[owner].push(x);
            }
        }
        let fine = Cover::new(n, fine.into_iter().filter(|e| !e.is_empty()).collect()).unwrap();
        prop_assert!(refines(&fine, &cover));
        prop_assert!(mesh(&space, &fine) <= mesh(&space, &cover));
    }

    #[test]
    fn lebesgue_conversion_keeps_its_guarantees(p in points(10), r in 1..4u32, shrink_q in 1..5u32) {
        let space = cloud(&p, Norm::L1);
        let r = r as f64;
        let found = find_decomposition(&space, &r, &3.0, 2, SearchMode::Auto).unwrap();
        let decomp = found.found().expect("three families at C = 3 always exist on these grids").clone();
        prop_assert!(check_decomposition(&space, &decomp).unwrap().is_valid);
        let shrink = shrink_q as f64 / 12.0;
        let cover = decomposition_to_lebesgue_cover(&space, &decomp, &shrink).unwrap();
        let profile = lebesgue_profile(&space, &cover).unwrap();
        prop_assert!(cover.multiplicity() <= decomp.families);
        prop_assert!(profile.global.at_least(&(shrink * r)));
        // Every element sits inside the shrink·r neighborhood of its piece.
        for (k, e) in cover.elements().iter().enumerate() {
            let piece = decomp.cover.element(k);
            for &x in e {
                prop_assert!(space.point_set_distance(x, piece.iter().copied()).unwrap() < shrink * r + 1e-9);
            }
        }
    }

    #[test]
    fn barycentric_outputs_are_nerve_points((space, cover) in space_and_cover(9), l2 in any::<bool>()) {
        let norm = if l2 { Norm::L2 } else { Norm::L1 };
        let nerve = build_nerve(&cover).unwrap();
        let map = barycentric_map(&space, &cover, norm).unwrap();
        for p in &map {
            prop_assert!(p.check().is_ok(), "{:?}", p);
            prop_assert!(p.weights.iter().all(|w| *w >= 0.0));
            prop_assert!((p.weights.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            prop_assert!(nerve.contains(&p.support()));
        }
        let stars = star_preimages(&map, &nerve).unwrap();
        for (e, &v) in stars.cover.elements().iter().zip(&stars.vertex_of) {
            prop_assert!(e.iter().all(|&x| cover.contains(v, x)));
        }
        prop_assert!(verify_barycentric_bound(&space, &cover, norm).unwrap().holds);
    }

    #[test]
    fn l1_and_l2_simplex_metrics_are_comparable((space, cover) in space_and_cover(8)) {
        let l1 = barycentric_map(&space, &cover, Norm::L1).unwrap();
        let l2 = barycentric_map(&space, &cover, Norm::L2).unwrap();
        let k = cover.len() as f64;
        for x in 0..space.len() {
            for y in 0..space.len() {
                let a = simplex_distance(&l1[x], &l1[y]).unwrap();
                let b = simplex_distance(&l2[x], &l2[y]).unwrap();
                prop_assert!(b <= a + 1e-12 && a <= k.sqrt() * b + 1e-9);
            }
        }
    }

    #[test]
    fn real_extensions_agree_on_domain_and_respect_lambda(
        p in points(9),
        picks in prop::collection::vec((any::<prop::sample::Index>(), -6..7i64), 1..5),
        extra in 0..3i64,
    ) {
        let space = exact(&cloud(&p, Norm::L1));
        let mut domain = Vec::new();
        let mut values = Vec::new();
        for (idx, v) in picks {
            let x = idx.index(space.len());
            if !domain.contains(&x) {
                domain.push(x);
                values.push(Rational::from_i64(v));
            }
        }
        let f = PartialMap::new(domain.clone(), values.clone()).unwrap();
        let lambda = real_lipschitz(&space, &f) + Rational::from_i64(extra);
        for ext in [mcshane_extend(&space, &f, &lambda).unwrap(), whitney_extend(&space, &f, &lambda).unwrap()] {
            for (&a, v) in domain.iter().zip(&values) {
                prop_assert_eq!(&ext.values[a], v);
            }
            let all = PartialMap::total(ext.values.clone());
            prop_assert!(real_lipschitz(&space, &all) <= lambda);
        }
    }

    #[test]
    fn simplex_projection_is_idempotent_and_nonexpanding(
        u in prop::collection::vec(-2.0f64..2.0, 4),
        v in prop::collection::vec(-2.0f64..2.0, 4),
    ) {
        let pu = project_to_simplex(&u, 4, Norm::L2).unwrap();
        let pv = project_to_simplex(&v, 4, Norm::L2).unwrap();
        let again = project_to_simplex(&pu.weights, 4, Norm::L2).unwrap();
        for (a, b) in again.weights.iter().zip(&pu.weights) {
            prop_assert!((a - b).abs() < 1e-12);
        }
        prop_assert!(Norm::L2.distance(&pu.weights, &pv.weights) <= Norm::L2.distance(&u, &v) + 1e-12);
    }

    #[test]
    fn convex_extensions_stay_in_the_body(
        p in points(9),
        seed in any::<u64>(),
        corner in any::<bool>(),
        l2 in any::<bool>(),
    ) {
        use rand::Rng;
        let space = cloud(&p, if l2 { Norm::L2 } else { Norm::L1 });
        let norm = if l2 { Norm::L2 } else { Norm::L1 };
        let mut rng = corpus::rng(seed);
        let body = if corner { ConvexBody::CornerSimplex { dim: 3 } } else { ConvexBody::ProbabilitySimplex { dim: 3 } };
        let domain: Vec<usize> = (0..space.len()).filter(|_| rng.random_bool(0.5)).collect();
        let values: Vec<Vec<f64>> = domain
            .iter()
            .map(|_| {
                let raw: Vec<f64> = (0..3).map(|_| rng.random::<f64>()).collect();
                let total: f64 = raw.iter().sum::<f64>() + if corner { rng.random::<f64>() } else { 0.0 };
                raw.iter().map(|w| w / total).collect()
            })
            .collect();
        let f = PartialMap::new(domain, values).unwrap();
        let lambda = nagata_core::extension::vector_lipschitz(&space, &f, norm);
        let ext = extend_into_convex(&space, &f, lambda, body, norm).unwrap();
        for v in &ext.values {
            prop_assert!(body.contains(v).is_ok(), "{:?}", v);
        }
        let measured = total_vector_lipschitz(&space, &ext.values, norm);
        prop_assert!(measured <= 9.0 * ext.lambda_effective + 1e-9, "{measured} vs {}", ext.lambda_effective);
    }

    #[test]
    fn exact_dimension_is_monotone_under_subsets(p in points(7), keep in prop::collection::vec(any::<bool>(), 7), c2 in 2..6u32) {
        let space = exact(&cloud(&p, Norm::L1));
        let subset: Vec<usize> = (0..space.len()).filter(|&i| keep[i]).collect();
        prop_assume!(!subset.is_empty());
        let sub = space.subspace(&subset).unwrap();
        let c = Rational::from_ratio(c2 as i64, 2);
        let scales = vec![Rational::from_i64(1), Rational::from_i64(2), Rational::from_i64(3)];
        let q = DimQuery::new(&space, c.clone(), Some(scales.clone())).unwrap().with_search(SearchMode::ExactOnly);
        let full = scale_range_dimension(&space, &q).unwrap();
        let q = DimQuery::new(&sub, c, Some(scales)).unwrap().with_search(SearchMode::ExactOnly);
        let part = scale_range_dimension(&sub, &q).unwrap();
        prop_assert!(full.exact && part.exact);
        prop_assert!(part.upper <= full.upper);
    }

    #[test]
    fn greedy_success_implies_exact_success(p in points(8), r in 1..4u32, c2 in 2..7u32, n in 0..3usize) {
        let space = cloud(&p, Norm::L1);
        let (r, c) = (r as f64, c2 as f64 / 2.0);
        let greedy = find_decomposition(&space, &r, &c, n, SearchMode::GreedyOnly).unwrap();
        if let Some(d) = greedy.found() {
            prop_assert!(check_decomposition(&space, d).unwrap().is_valid);
            prop_assert!(find_decomposition(&space, &r, &c, n, SearchMode::ExactOnly).unwrap().found().is_some());
        }
    }

    #[test]
    fn witnesses_transport_across_functor_metrics(p in points(8), eps in 1..4i64, r in 2..5i64) {
        let space = exact(&cloud(&p, Norm::L1));
        let eps = Rational::from_i64(eps);
        let target = space.transform_max(&eps).unwrap();
        let (r, c) = (Rational::from_i64(r), Rational::from_i64(2));
        let found = find_decomposition(&space, &r, &c, 2, SearchMode::ExactOnly).unwrap();
        if let Some(w) = found.found() {
            let moved = transport_witness(&space, &target, w, &c).unwrap();
            prop_assert!(moved.valid);
            let bounds = bilipschitz_bounds(&space, &target).unwrap();
            prop_assert_eq!(moved.c, bounds.lambda * c / bounds.mu);
        }
    }

    #[test]
    fn hyperbolized_metrics_are_certified(p in points(10), n in 1..3usize) {
        let space = cloud(&p, Norm::L1);
        let tower = build_tower(&space, n, 2.0, 4.0, SearchMode::Auto);
        prop_assume!(tower.is_ok());
        let dh = dh_metric(&space, &tower.unwrap()).unwrap();
        prop_assert!(dh.is_metric());
        for base in 0..dh.len() {
            let report = hyperbolicity_certificate(&dh, base).unwrap();
            prop_assert!(report.side_defect <= 1.0);
            prop_assert!(report.delta_measured <= 4.0);
            prop_assert!(report.boundary_margin >= -2.0);
            prop_assert!(report.checks.iter().all(|c| c.passes()));
        }
    }
}
