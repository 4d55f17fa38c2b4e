//! Library results compared against independent brute-force computations.

use std::collections::BTreeSet;

use nagata_core::corpus;
use nagata_core::covers::{lebesgue_profile, Cover};
use nagata_core::dimension::{find_decomposition, scale_range_dimension, DimQuery, Search, SearchMode};
use nagata_core::extension::project_onto_simplex;
use nagata_core::hyperbolic::{build_tower, dh_metric, hyperbolicity_certificate};
use nagata_core::metric::{point_cloud, FiniteMetricSpace, Norm};
use nagata_core::scalar::{Extended, Rational, Scalar};
use proptest::prelude::*;

fn l1_space(points: &BTreeSet<(i32, i32)>) -> FiniteMetricSpace<f64> {
    let pts: Vec<Vec<f64>> = points.iter().map(|&(x, y)| vec![x as f64, y as f64]).collect();
    point_cloud(&pts, Norm::L1).unwrap()
}

fn lattice_points(max: usize) -> impl Strategy<Value = BTreeSet<(i32, i32)>> {
    prop::collection::btree_set((0..7i32, 0..5i32), 1..=max)
}

/// Every set partition of `0..n` as a block label per point.
fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    fn grow(prefix: &mut Vec<usize>, n: usize, blocks: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for b in 0..=blocks {
            prefix.push(b);
            grow(prefix, n, blocks.max(b + 1), out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    grow(&mut Vec::new(), n, 0, &mut out);
    out
}

/// Whether some partition into pieces of diameter at most `c·r` admits a
/// coloring with `colors` colors in which same-colored pieces are at
/// distance at least `r`. Overlapping covers shrink to partitions without
/// breaking either condition, so partitions suffice.
fn brute_decomposable(space: &FiniteMetricSpace<f64>, r: f64, c: f64, colors: usize) -> bool {
    let n = space.len();
    let tol = 1e-9;
    set_partitions(n).into_iter().any(|label| {
        let blocks = label.iter().max().map_or(0, |m| m + 1);
        let members: Vec<Vec<usize>> = (0..blocks).map(|b| (0..n).filter(|&x| label[x] == b).collect()).collect();
        let diam_ok = members
            .iter()
            .all(|m| m.iter().all(|&x| m.iter().all(|&y| *space.dist(x, y) <= c * r + tol)));
        if !diam_ok {
            return false;
        }
        let close = |a: usize, b: usize| {
            members[a].iter().any(|&x| members[b].iter().any(|&y| *space.dist(x, y) < r - tol))
        };
        let mut color = vec![0usize; blocks];
        loop {
            let proper = (0..blocks).all(|a| (a + 1..blocks).all(|b| color[a] != color[b] || !close(a, b)));
            if proper {
                return true;
            }
            let mut k = 0;
            while k < blocks && color[k] + 1 == colors {
                color[k] = 0;
                k += 1;
            }
            if k == blocks {
                return false;
            }
            color[k] += 1;
        }
    })
}

#[test]
fn six_point_path_at_r2_c1_matches_partition_search() {
    let space = corpus::path(6);
    for n in 0..3 {
        let expected = brute_decomposable(&space, 2.0, 1.0, n + 1);
        let got = find_decomposition(&space, &2.0, &1.0, n, SearchMode::ExactOnly).unwrap();
        assert_eq!(got.found().is_some(), expected, "n = {n}");
        let exact = space.map_scalar(|d| Rational::from_f64(*d).unwrap());
        let got = find_decomposition(&exact, &Rational::from_i64(2), &Rational::from_i64(1), n, SearchMode::ExactOnly)
            .unwrap();
        assert_eq!(got.found().is_some(), expected, "exact arithmetic, n = {n}");
    }
    assert!(!brute_decomposable(&space, 2.0, 1.0, 1));
    assert!(brute_decomposable(&space, 2.0, 1.0, 2));
}

#[test]
fn four_by_four_grid_has_dimension_one_at_scales_one_and_two() {
    let grid = corpus::grid(4, 4);
    let at = |x: usize, y: usize| y * 4 + x;
    // r = 2, one family: pieces pairwise at distance >= 2 force unit-distance
    // neighbors together, so the whole grid (diameter 6 > 4) is one piece.
    let mut label: Vec<usize> = (0..16).collect();
    for x in 0..4 {
        for y in 0..4 {
            for (u, v) in [(x + 1, y), (x, y + 1)] {
                if u < 4 && v < 4 {
                    let (a, b) = (label[at(x, y)], label[at(u, v)]);
                    label.iter_mut().filter(|l| **l == b).for_each(|l| *l = a);
                }
            }
        }
    }
    assert!(label.iter().all(|&l| l == label[0]));
    assert_eq!(grid.diameter(), 6.0);
    // Two families: 2x2 blocks colored as a checkerboard.
    let blocks: Vec<Vec<usize>> = (0..4)
        .map(|b| {
            let (bx, by) = (2 * (b % 2), 2 * (b / 2));
            vec![at(bx, by), at(bx + 1, by), at(bx, by + 1), at(bx + 1, by + 1)]
        })
        .collect();
    let color = [0, 1, 1, 0];
    for a in 0..4 {
        assert!(grid.set_diameter(&blocks[a]) <= 4.0);
        for b in a + 1..4 {
            if color[a] == color[b] {
                assert!(grid.set_distance(&blocks[a], &blocks[b]).unwrap() >= 2.0);
            }
        }
    }
    // So the dimension is 0 at r = 1 (singletons) and 1 at r = 2. Sixteen
    // points exceed the exhaustive threshold, so the library reports bounds.
    let q = DimQuery::new(&grid, 2.0, Some(vec![1.0, 2.0])).unwrap();
    let report = scale_range_dimension(&grid, &q).unwrap();
    assert_eq!(report.at(&1.0).unwrap().upper, 0);
    let at2 = report.at(&2.0).unwrap();
    assert!(at2.lower <= 1 && at2.upper >= 1, "{} ..= {}", at2.lower, at2.upper);
    assert_eq!(at2.lower, 1);
    assert!(report.lower <= 1 && report.upper >= 1);
    assert!(find_decomposition(&grid, &2.0, &2.0, 0, SearchMode::Auto).unwrap().found().is_none());
}

#[test]
fn least_level_scan_on_hand_built_tower() {
    let space = corpus::path(5);
    let tower = build_tower(&space, 1, 2.0, 4.0, SearchMode::Auto).unwrap();
    let dh = dh_metric(&space, &tower).unwrap();
    for x in 0..5 {
        for y in 0..5 {
            let least = if x == y {
                0
            } else {
                1 + tower
                    .levels
                    .iter()
                    .position(|level| level.elements().iter().any(|e| e.contains(&x) && e.contains(&y)))
                    .unwrap()
            };
            assert_eq!(*dh.dist(x, y), least as f64, "({x}, {y})");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn exact_search_agrees_with_partition_enumeration(
        points in lattice_points(6),
        r in 1..4u32,
        c2 in 2..7u32,
        n in 0..3usize,
    ) {
        let space = l1_space(&points);
        let (r, c) = (r as f64, c2 as f64 / 2.0);
        let expected = brute_decomposable(&space, r, c, n + 1);
        let exact = find_decomposition(&space, &r, &c, n, SearchMode::ExactOnly).unwrap();
        prop_assert_eq!(exact.found().is_some(), expected);
        match find_decomposition(&space, &r, &c, n, SearchMode::Auto).unwrap() {
            Search::Found(..) => prop_assert!(expected),
            Search::NotFound => prop_assert!(!expected),
            Search::Unknown => {}
        }
    }

    #[test]
    fn lebesgue_number_matches_direct_formula(
        points in lattice_points(9),
        elements in 1..5usize,
        seed in any::<u64>(),
    ) {
        let space = l1_space(&points);
        let n = space.len();
        let cover = corpus::random_cover(n, elements, 0.3, &mut corpus::rng(seed));
        let profile = lebesgue_profile(&space, &cover).unwrap();
        let mut global = f64::INFINITY;
        for x in 0..n {
            let mut best = 0.0f64;
            for e in cover.elements() {
                if !e.contains(&x) {
                    continue;
                }
                let outside = (0..n).filter(|y| !e.contains(y)).map(|y| *space.dist(x, y)).fold(f64::INFINITY, f64::min);
                best = best.max(outside);
            }
            prop_assert_eq!(profile.local[x].to_f64(), best);
            global = global.min(best);
        }
        prop_assert_eq!(profile.global.to_f64(), global);
        prop_assert_eq!(profile.global.is_infinite(), global.is_infinite());
    }

    #[test]
    fn gromov_products_and_delta_match_definitions(points in lattice_points(8), base_pick in any::<usize>()) {
        let space = l1_space(&points);
        let n = space.len();
        let base = base_pick % n;
        let tower = build_tower(&space, 2, 2.0, 4.0, SearchMode::Auto);
        prop_assume!(tower.is_ok());
        let dh = dh_metric(&space, &tower.unwrap()).unwrap();
        let report = hyperbolicity_certificate(&dh, base).unwrap();
        let d = |a: usize, b: usize| *dh.dist(a, b);
        let gp = |x: usize, y: usize| (d(x, base) + d(y, base) - d(x, y)) / 2.0;
        let mut delta = 0.0f64;
        let mut side = 0.0f64;
        for x in 0..n {
            for y in 0..n {
                prop_assert_eq!(report.products[x][y], gp(x, y));
                for z in 0..n {
                    delta = delta.max(gp(x, y).min(gp(y, z)) - gp(x, z));
                    let mut sides = [d(x, y), d(y, z), d(x, z)];
                    sides.sort_by(|a, b| b.partial_cmp(a).unwrap());
                    side = side.max(sides[0] - sides[1]);
                }
            }
        }
        prop_assert_eq!(report.delta_measured, delta);
        prop_assert_eq!(report.side_defect, side);
        prop_assert!(side <= 1.0);
        prop_assert!(delta <= 4.0);
    }

    #[test]
    fn simplex_projection_satisfies_threshold_form(v in prop::collection::vec(-3.0f64..3.0, 1..7)) {
        let p = project_onto_simplex(&v);
        // The projection is max(v_i - θ, 0) for the θ that makes it sum to one;
        // find θ by bisection.
        let total = |theta: f64| v.iter().map(|x| (x - theta).max(0.0)).sum::<f64>();
        let (mut lo, mut hi) = (v.iter().cloned().fold(f64::INFINITY, f64::min) - 1.0, v.iter().cloned().fold(f64::NEG_INFINITY, f64::max));
        for _ in 0..200 {
            let mid = (lo + hi) / 2.0;
            if total(mid) > 1.0 { lo = mid } else { hi = mid }
        }
        for (pi, vi) in p.iter().zip(&v) {
            prop_assert!((pi - (vi - lo).max(0.0)).abs() < 1e-9, "{:?} -> {:?}", v, p);
        }
    }
}

#[test]
fn whole_space_cover_has_infinite_lebesgue_number() {
    let space = corpus::path(4);
    let profile = lebesgue_profile(&space, &Cover::whole(4)).unwrap();
    assert_eq!(profile.global, Extended::Infinite);
}
