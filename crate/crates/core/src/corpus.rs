//! Seeded generators for test spaces, covers and maps.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::covers::{Cover, FamilyDecomposition};
use crate::metric::{point_cloud, FiniteMetricSpace, Norm};

/// The generator every corpus routine draws from.
pub type CorpusRng = ChaCha8Rng;

pub fn rng(seed: u64) -> CorpusRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Family a generated space belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Path,
    Grid,
    Tree,
    Uniform,
    Cloud,
    Clusters,
}

impl Kind {
    pub const ALL: [Kind; 6] = [Kind::Path, Kind::Grid, Kind::Tree, Kind::Uniform, Kind::Cloud, Kind::Clusters];
}

/// A generated space with a short description.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub kind: Kind,
    pub name: String,
    pub space: FiniteMetricSpace<f64>,
}

/// `{0, 1, …, n-1}` on the line.
pub fn path(n: usize) -> FiniteMetricSpace<f64> {
    FiniteMetricSpace::from_fn(n, |i, j| (i as f64 - j as f64).abs()).expect("n > 0")
}

/// `w × h` integer grid with the l1 metric.
pub fn grid(w: usize, h: usize) -> FiniteMetricSpace<f64> {
    let pts: Vec<Vec<f64>> = (0..h).flat_map(|y| (0..w).map(move |x| vec![x as f64, y as f64])).collect();
    point_cloud(&pts, Norm::L1).expect("w, h > 0")
}

/// All distances one.
pub fn uniform(n: usize) -> FiniteMetricSpace<f64> {
    FiniteMetricSpace::from_fn(n, |i, j| if i == j { 0.0 } else { 1.0 }).expect("n > 0")
}

/// Random recursive tree with integer edge weights in `1..=max_weight`,
/// carrying its path metric.
pub fn tree(n: usize, max_weight: u32, rng: &mut impl Rng) -> FiniteMetricSpace<f64> {
    let mut depth = vec![0.0; n];
    let mut parent = vec![usize::MAX; n];
    for v in 1..n {
        parent[v] = rng.random_range(0..v);
        depth[v] = depth[parent[v]] + f64::from(rng.random_range(1..=max_weight.max(1)));
    }
    let ancestors = |mut v: usize| {
        let mut out = vec![v];
        while parent[v] != usize::MAX {
            v = parent[v];
            out.push(v);
        }
        out
    };
    let chains: Vec<Vec<usize>> = (0..n).map(ancestors).collect();
    FiniteMetricSpace::from_fn(n, |i, j| {
        let lca = chains[i].iter().find(|a| chains[j].contains(a)).copied().unwrap_or(0);
        depth[i] + depth[j] - 2.0 * depth[lca]
    })
    .expect("n > 0")
}

/// Uniform points in `[0, side]^dim`.
pub fn cloud(n: usize, dim: usize, side: f64, norm: Norm, rng: &mut impl Rng) -> FiniteMetricSpace<f64> {
    let pts: Vec<Vec<f64>> = (0..n).map(|_| (0..dim).map(|_| rng.random::<f64>() * side).collect()).collect();
    point_cloud(&pts, norm).expect("n > 0")
}

/// Integer grid points moved by at most `jitter` in each coordinate.
pub fn perturbed_grid(w: usize, h: usize, jitter: f64, rng: &mut impl Rng) -> FiniteMetricSpace<f64> {
    let pts: Vec<Vec<f64>> = (0..h)
        .flat_map(|y| (0..w).map(move |x| (x, y)))
        .map(|(x, y)| {
            vec![x as f64 + rng.random_range(-jitter..=jitter), y as f64 + rng.random_range(-jitter..=jitter)]
        })
        .collect();
    point_cloud(&pts, Norm::L2).expect("w, h > 0")
}

/// `k` clusters of `size` points within `spread` of centers `sep` apart on a line.
pub fn clusters(k: usize, size: usize, spread: f64, sep: f64, rng: &mut impl Rng) -> FiniteMetricSpace<f64> {
    let pts: Vec<Vec<f64>> = (0..k)
        .flat_map(|c| (0..size).map(move |_| c))
        .map(|c| vec![c as f64 * sep + rng.random::<f64>() * spread, rng.random::<f64>() * spread])
        .collect();
    point_cloud(&pts, Norm::L2).expect("k, size > 0")
}

/// One random space of the given kind with about `n` points.
pub fn sample(kind: Kind, n: usize, rng: &mut impl Rng) -> Sample {
    let n = n.max(1);
    let (name, space) = match kind {
        Kind::Path => (format!("path({n})"), path(n)),
        Kind::Grid => {
            let w = rng.random_range(1..=n.min(4));
            let h = (n / w).max(1);
            (format!("grid({w}x{h})"), grid(w, h))
        }
        Kind::Tree => (format!("tree({n})"), tree(n, 3, rng)),
        Kind::Uniform => (format!("uniform({n})"), uniform(n)),
        Kind::Cloud => (format!("cloud({n})"), cloud(n, 2, 10.0, Norm::L2, rng)),
        Kind::Clusters => {
            let k = rng.random_range(1..=3.min(n));
            let size = (n / k).max(1);
            (format!("clusters({k}x{size})"), clusters(k, size, 1.0, 10.0, rng))
        }
    };
    Sample { kind, name, space }
}

/// Every kind at every size in `sizes`, drawn from one seed.
pub fn small_corpus(seed: u64, sizes: &[usize]) -> Vec<Sample> {
    let mut r = rng(seed);
    let mut out = Vec::new();
    for &n in sizes {
        for kind in Kind::ALL {
            out.push(sample(kind, n, &mut r));
        }
    }
    out
}

/// A random cover with `elements` nonempty elements: every point joins one
/// random element, then each membership is added with probability `extra`.
pub fn random_cover(n_points: usize, elements: usize, extra: f64, rng: &mut impl Rng) -> Cover {
    let elements = elements.clamp(1, n_points.max(1));
    let mut masks = vec![vec![false; n_points]; elements];
    let mut order: Vec<usize> = (0..n_points).collect();
    order.shuffle(rng);
    for (k, &x) in order.iter().enumerate() {
        let s = if k < elements { k } else { rng.random_range(0..elements) };
        masks[s][x] = true;
    }
    for mask in masks.iter_mut() {
        for m in mask.iter_mut() {
            if !*m && rng.random::<f64>() < extra {
                *m = true;
            }
        }
    }
    Cover::from_masks(n_points, masks).expect("every point is assigned")
}

/// Brick-wall decomposition of `grid(w, h)` at integer scale `r`: bricks of
/// `2r × r` points, each row shifted by half a brick, colored by the
/// triangular lattice rule `(i - j) mod 3`. Same-colored bricks are at l1
/// distance at least `r + 1` and every brick has diameter at most `3r - 2`.
pub fn brick_decomposition(w: usize, h: usize, r: usize) -> FamilyDecomposition<f64> {
    let r = r.max(1) as i64;
    let (bw, bh) = (2 * r, r);
    let mut bricks: Vec<((i64, i64), Vec<usize>)> = Vec::new();
    for y in 0..h {
        for x in 0..w {
            let j = y as i64 / bh;
            let i = (x as i64 - j * r).div_euclid(bw);
            match bricks.iter_mut().find(|(key, _)| *key == (i, j)) {
                Some((_, pts)) => pts.push(y * w + x),
                None => bricks.push(((i, j), vec![y * w + x])),
            }
        }
    }
    let family_of = bricks.iter().map(|((i, j), _)| (i - j).rem_euclid(3) as usize).collect();
    let cover = Cover::new(w * h, bricks.into_iter().map(|(_, p)| p).collect()).expect("bricks cover the grid");
    FamilyDecomposition::new(cover, family_of, 3, r as f64).expect("colors are below 3")
}

/// Two-family decomposition of a tree metric at scale `r`: annuli of width
/// `r` around `root`, each split where branches part below depth
/// `k·r - r/2`; even annuli form one family and odd annuli the other.
/// Pieces have diameter below `3r`.
pub fn annulus_decomposition(space: &FiniteMetricSpace<f64>, root: usize, r: f64) -> FamilyDecomposition<f64> {
    let depth = |x: usize| *space.dist(root, x);
    let mut pieces: Vec<(usize, Vec<usize>)> = Vec::new();
    for x in space.points() {
        let k = (depth(x) / r).floor() as usize;
        let t = k as f64 * r - r / 2.0;
        let joins = |y: usize| (depth(x) + depth(y) - space.dist(x, y)) / 2.0 >= t;
        match pieces.iter_mut().find(|(pk, pts)| *pk == k && joins(pts[0])) {
            Some((_, pts)) => pts.push(x),
            None => pieces.push((k, vec![x])),
        }
    }
    let family_of = pieces.iter().map(|(k, _)| k % 2).collect();
    let cover = Cover::new(space.len(), pieces.into_iter().map(|(_, p)| p).collect()).expect("pieces cover the tree");
    FamilyDecomposition::new(cover, family_of, 2, r).expect("parities are below 2")
}

/// Random nonempty subset of `0..n` with roughly `fraction` of the points.
pub fn random_subset(n: usize, fraction: f64, rng: &mut impl Rng) -> Vec<usize> {
    let mut out: Vec<usize> = (0..n).filter(|_| rng.random::<f64>() < fraction).collect();
    if out.is_empty() {
        out.push(rng.random_range(0..n));
    }
    out
}
