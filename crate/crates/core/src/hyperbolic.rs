//! Integer-valued hyperbolic metric from a tower of covers, Gromov products
//! and the exhaustive triangle and four-point certificates.

use serde::Serialize;

use crate::check::Check;
use crate::covers::{lebesgue_profile, Cover, CoverError};
use crate::dimension::{characterization_convert, find_decomposition, CoverForm, Direction, DimensionError, Search, SearchMode};
use crate::metric::{FiniteMetricSpace, MetricError};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HyperbolicError {
    #[error(transparent)]
    Dimension(#[from] DimensionError),
    #[error(transparent)]
    Cover(#[from] CoverError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("no decomposition into {families} families with mesh at most C*r at r = {r}")]
    NoDecomposition { r: f64, families: usize },
    #[error("points {0} and {1} share no element of any level")]
    NotTotal(usize, usize),
    #[error("tower condition fails between levels {lower} and {upper}: {reason}")]
    Gap { lower: usize, upper: usize, reason: String },
}

/// Mesh, Lebesgue number and multiplicity of one level.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelProfile {
    /// Scale the level was built at; `None` for the forced top level.
    pub r: Option<f64>,
    pub mesh: f64,
    /// `+inf` when some element is the whole space.
    pub lebesgue: f64,
    pub multiplicity: usize,
}

/// A scale whose cover was skipped because it broke the tower conditions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DroppedLevel {
    pub r: f64,
    pub reason: String,
    /// Point realizing the new Lebesgue number.
    pub lebesgue_point: Option<usize>,
    /// Pair realizing the previous mesh.
    pub mesh_pair: Option<(usize, usize)>,
}

/// Levels `U_1, …, U_k` (stored 0-based) with `U_k = {X}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverTower {
    pub levels: Vec<Cover>,
    pub profiles: Vec<LevelProfile>,
    pub dropped: Vec<DroppedLevel>,
    pub n: usize,
}

impl CoverTower {
    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }
}

fn profile(space: &FiniteMetricSpace<f64>, cover: &Cover, r: Option<f64>) -> Result<(LevelProfile, usize), CoverError> {
    let p = lebesgue_profile(space, cover)?;
    let argmin = (0..space.len())
        .min_by(|&a, &b| p.local[a].to_f64().total_cmp(&p.local[b].to_f64()))
        .unwrap_or(0);
    Ok((
        LevelProfile { r, mesh: p.mesh, lebesgue: p.global.to_f64(), multiplicity: cover.multiplicity() },
        argmin,
    ))
}

fn mesh_pair(space: &FiniteMetricSpace<f64>, cover: &Cover) -> Option<(usize, usize)> {
    let mut best: Option<(f64, usize, usize)> = None;
    for e in cover.elements() {
        for &a in e {
            for &b in e {
                let d = *space.dist(a, b);
                if a < b && best.is_none_or(|(m, _, _)| d > m) {
                    best = Some((d, a, b));
                }
            }
        }
    }
    best.map(|(_, a, b)| (a, b))
}

/// Checks multiplicity, monotonicity and `2·mesh(U_i) < L(U_{i+1})`.
pub fn check_tower(tower: &CoverTower) -> Result<(), HyperbolicError> {
    for (i, p) in tower.profiles.iter().enumerate() {
        if p.multiplicity > tower.n + 1 {
            return Err(HyperbolicError::Gap {
                lower: i + 1,
                upper: i + 1,
                reason: format!("multiplicity {} exceeds n+1 = {}", p.multiplicity, tower.n + 1),
            });
        }
    }
    for (i, w) in tower.profiles.windows(2).enumerate() {
        let (lo, hi) = (&w[0], &w[1]);
        let reason = if hi.mesh < lo.mesh {
            Some("mesh decreases")
        } else if hi.lebesgue < lo.lebesgue {
            Some("Lebesgue number decreases")
        } else if hi.lebesgue <= 2.0 * lo.mesh {
            Some("2*mesh(U_i) >= L(U_{i+1})")
        } else {
            None
        };
        if let Some(reason) = reason {
            return Err(HyperbolicError::Gap { lower: i + 1, upper: i + 2, reason: reason.into() });
        }
    }
    Ok(())
}

/// Covers at scales `r_j = growth^j · δ/2` (δ the least positive distance),
/// from decompositions with `n+1` families converted to Lebesgue covers with
/// shrink `1/4`. Scales whose cover breaks the tower conditions are dropped;
/// the last level is the whole space.
pub fn build_tower(
    space: &FiniteMetricSpace<f64>,
    n: usize,
    c: f64,
    growth: f64,
    search: SearchMode,
) -> Result<CoverTower, HyperbolicError> {
    if !(growth > 1.0 && growth.is_finite()) {
        return Err(HyperbolicError::Parameter(format!("growth must exceed 1, got {growth}")));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(HyperbolicError::Parameter(format!("C must be positive, got {c}")));
    }
    if space.is_empty() {
        return Err(HyperbolicError::Parameter("space is empty".into()));
    }
    let whole = Cover::whole(space.len());
    let mut levels: Vec<Cover> = Vec::new();
    let mut profiles: Vec<LevelProfile> = Vec::new();
    let mut dropped = Vec::new();
    if let Some(delta) = space.min_positive_distance() {
        let diameter = space.diameter();
        let mut r = delta / 2.0;
        while !levels.last().is_some_and(|l| !l.whole_space_elements().is_empty()) && r <= diameter * growth
        {
            let decomp = match find_decomposition(space, &r, &c, n, search)? {
                Search::Found(d, _) => d,
                _ => return Err(HyperbolicError::NoDecomposition { r, families: n + 1 }),
            };
            let conv =
                characterization_convert(space, &CoverForm::Decomposition(decomp), Direction::DecompositionToLebesgue, &0.25)?;
            let cover = conv.cover;
            let scale = r;
            r *= growth;
            if levels.last() == Some(&cover) {
                continue;
            }
            let (p, lpoint) = profile(space, &cover, Some(scale))?;
            if let Some(prev) = profiles.last() {
                let reason = if p.mesh < prev.mesh {
                    Some("mesh decreases")
                } else if p.lebesgue < prev.lebesgue {
                    Some("Lebesgue number decreases")
                } else if p.lebesgue <= 2.0 * prev.mesh {
                    Some("2*mesh(U_i) >= L(U_{i+1})")
                } else {
                    None
                };
                if let Some(reason) = reason {
                    dropped.push(DroppedLevel {
                        r: scale,
                        reason: reason.into(),
                        lebesgue_point: Some(lpoint),
                        mesh_pair: mesh_pair(space, levels.last().expect("profiles and levels align")),
                    });
                    continue;
                }
            }
            levels.push(cover);
            profiles.push(p);
        }
    }
    let total = levels.last().is_some_and(|l| !l.whole_space_elements().is_empty());
    if total {
        let last = levels.len() - 1;
        levels[last] = whole.clone();
        profiles[last] = profile(space, &whole, profiles[last].r)?.0;
    } else {
        levels.push(whole.clone());
        profiles.push(profile(space, &whole, None)?.0);
    }
    let tower = CoverTower { levels, profiles, dropped, n };
    check_tower(&tower)?;
    Ok(tower)
}

/// `d_h(x, y)` is the least 1-based level with an element containing both.
pub fn dh_metric(space: &FiniteMetricSpace<f64>, tower: &CoverTower) -> Result<FiniteMetricSpace<f64>, HyperbolicError> {
    let n = space.len();
    let mut rows = vec![vec![0.0; n]; n];
    for x in 0..n {
        for y in x + 1..n {
            let level = tower
                .levels
                .iter()
                .position(|l| l.elements().iter().any(|e| e.binary_search(&x).is_ok() && e.binary_search(&y).is_ok()))
                .ok_or(HyperbolicError::NotTotal(x, y))?;
            rows[x][y] = (level + 1) as f64;
            rows[y][x] = (level + 1) as f64;
        }
    }
    Ok(FiniteMetricSpace::new(space.labels().to_vec(), rows)?)
}

/// `(x|y)` with respect to `base`.
pub fn gromov_product(d: &FiniteMetricSpace<f64>, base: usize, x: usize, y: usize) -> f64 {
    (d.dist(x, base) + d.dist(y, base) - d.dist(x, y)) / 2.0
}

/// Triangle and four-point measurements of one basepoint.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HyperbolicReport {
    pub basepoint: usize,
    pub basepoint_label: String,
    /// Row-major products `(x|y)`.
    pub products: Vec<Vec<f64>>,
    /// `max min((x|y), (y|z)) - (x|z)` over ordered triples.
    pub delta_measured: f64,
    pub delta_triple: Option<(usize, usize, usize)>,
    /// `max (largest side - second side)` over triples.
    pub side_defect: f64,
    pub side_triple: Option<(usize, usize, usize)>,
    /// `min 2(x|y) - min(d(x, x0), d(y, x0))`, bounded below by `-2`.
    pub boundary_margin: f64,
    pub checks: Vec<Check>,
}

/// Exhaustive scan of all triples for the side defect and the four-point
/// condition with `δ = 4`, plus the single-boundary-point inequality.
pub fn hyperbolicity_certificate(d: &FiniteMetricSpace<f64>, base: usize) -> Result<HyperbolicReport, HyperbolicError> {
    let n = d.len();
    if base >= n {
        return Err(HyperbolicError::Parameter(format!("basepoint {base} out of range")));
    }
    let products: Vec<Vec<f64>> = (0..n).map(|x| (0..n).map(|y| gromov_product(d, base, x, y)).collect()).collect();
    let mut delta = 0.0;
    let mut delta_triple = None;
    let mut side = 0.0;
    let mut side_triple = None;
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                let gap = products[x][y].min(products[y][z]) - products[x][z];
                if gap > delta {
                    delta = gap;
                    delta_triple = Some((x, y, z));
                }
                if x < y && y < z {
                    let mut s = [*d.dist(x, y), *d.dist(y, z), *d.dist(x, z)];
                    s.sort_by(|a, b| b.total_cmp(a));
                    if s[0] - s[1] > side {
                        side = s[0] - s[1];
                        side_triple = Some((x, y, z));
                    }
                }
            }
        }
    }
    let mut margin = f64::INFINITY;
    for x in 0..n {
        for y in 0..n {
            margin = margin.min(2.0 * products[x][y] - d.dist(x, base).min(*d.dist(y, base)));
        }
    }
    let triple = |t: Option<(usize, usize, usize)>| t.map(|(a, b, c)| format!("({a}, {b}, {c})"));
    let mut delta_check = Check::le("(x|z) >= min((x|y),(y|z)) - 4", delta, 4.0);
    if let Some(w) = triple(delta_triple) {
        delta_check = delta_check.with_witness(w);
    }
    let mut side_check = Check::le("a <= b + 1 for sides a >= b >= c", side, 1.0);
    if let Some(w) = triple(side_triple) {
        side_check = side_check.with_witness(w);
    }
    let checks = vec![
        side_check,
        delta_check,
        Check::ge("2(x|y) >= min(d_h(x,x0), d_h(y,x0)) - 2", margin, -2.0),
    ];
    Ok(HyperbolicReport {
        basepoint: base,
        basepoint_label: d.label(base).to_string(),
        products,
        delta_measured: delta,
        delta_triple,
        side_defect: side,
        side_triple,
        boundary_margin: margin,
        checks,
    })
}

/// Default basepoint: the lexicographically first label.
pub fn default_basepoint(d: &FiniteMetricSpace<f64>) -> usize {
    (0..d.len()).min_by(|&a, &b| d.label(a).cmp(d.label(b))).unwrap_or(0)
}

/// One level of the coarse-equivalence table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoarseRow {
    pub level: usize,
    pub mesh: f64,
    pub lebesgue: f64,
    /// Pairs with `d_h <= i` but `d > mesh(U_i)`.
    pub upper_violations: Vec<(usize, usize)>,
    /// Pairs with `d < L(U_i)` but `d_h > i`.
    pub lower_violations: Vec<(usize, usize)>,
}

/// For each level, `d_h <= i ⟹ d <= mesh(U_i)` and `d < L(U_i) ⟹ d_h <= i`
/// over all pairs; the mesh column and the Lebesgue column are the two
/// control functions.
pub fn coarse_equivalence_profile(
    d: &FiniteMetricSpace<f64>,
    dh: &FiniteMetricSpace<f64>,
    tower: &CoverTower,
) -> Result<Vec<CoarseRow>, HyperbolicError> {
    if d.labels() != dh.labels() {
        return Err(HyperbolicError::Parameter("label sets differ".into()));
    }
    let n = d.len();
    let mut rows = Vec::with_capacity(tower.len());
    for (i, p) in tower.profiles.iter().enumerate() {
        let level = (i + 1) as f64;
        let mut upper = Vec::new();
        let mut lower = Vec::new();
        for x in 0..n {
            for y in x + 1..n {
                if *dh.dist(x, y) <= level && !d.dist(x, y).le_tol(&p.mesh) {
                    upper.push((x, y));
                }
                if *d.dist(x, y) < p.lebesgue && *dh.dist(x, y) > level {
                    lower.push((x, y));
                }
            }
        }
        rows.push(CoarseRow { level: i + 1, mesh: p.mesh, lebesgue: p.lebesgue, upper_violations: upper, lower_violations: lower });
    }
    Ok(rows)
}

/// Covers of `(X, d_h)` at one integer scale.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PreservationRow {
    pub r: usize,
    /// 1-based tower level used, or `None` for singletons.
    pub level: Option<usize>,
    pub mesh: f64,
    pub lebesgue: f64,
    pub multiplicity: usize,
    pub holds: bool,
}

/// Singletons for `r <= 4`, level `min(⌊r⌋, k)` above, each checked for
/// `mesh <= r`, `L >= r/4` and multiplicity at most `n+1` in `d_h`.
pub fn dim_na_preservation(
    dh: &FiniteMetricSpace<f64>,
    tower: &CoverTower,
    max_r: usize,
) -> Result<Vec<PreservationRow>, HyperbolicError> {
    let mut rows = Vec::new();
    for r in 1..=max_r {
        let (level, cover) = if r <= 4 {
            (None, Cover::singletons(dh.len()))
        } else {
            let i = r.min(tower.len());
            (Some(i), tower.levels[i - 1].clone())
        };
        let p = lebesgue_profile(dh, &cover)?;
        let rf = r as f64;
        let lebesgue = p.global.to_f64();
        let multiplicity = cover.multiplicity();
        let holds = p.mesh <= rf && lebesgue >= rf / 4.0 && multiplicity <= tower.n + 1;
        rows.push(PreservationRow { r, level, mesh: p.mesh, lebesgue, multiplicity, holds });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> FiniteMetricSpace<f64> {
        FiniteMetricSpace::from_fn(n, |i, j| (i as f64 - j as f64).abs()).unwrap()
    }

    fn hand_tower() -> (FiniteMetricSpace<f64>, CoverTower) {
        let x = path(5);
        let levels = vec![Cover::new(5, vec![vec![0, 1], vec![2, 3], vec![4]]).unwrap(), Cover::whole(5)];
        let profiles = levels.iter().map(|l| profile(&x, l, None).unwrap().0).collect();
        (x, CoverTower { levels, profiles, dropped: vec![], n: 0 })
    }

    #[test]
    fn hand_built_tower_distances() {
        let (x, tower) = hand_tower();
        let dh = dh_metric(&x, &tower).unwrap();
        assert_eq!(*dh.dist(0, 1), 1.0);
        assert_eq!(*dh.dist(1, 2), 2.0);
        assert_eq!(*dh.dist(0, 4), 2.0);
        assert!(dh.is_metric());
        let rep = hyperbolicity_certificate(&dh, 0).unwrap();
        assert!(rep.checks.iter().all(Check::passes));
    }

    #[test]
    fn uniform_space_gives_two_levels() {
        let x = FiniteMetricSpace::from_fn(5, |i, j| if i == j { 0.0 } else { 1.0 }).unwrap();
        let t = build_tower(&x, 0, 2.0, 4.0, SearchMode::Auto).unwrap();
        assert_eq!(t.levels, vec![Cover::singletons(5), Cover::whole(5)]);
        let dh = dh_metric(&x, &t).unwrap();
        let rep = hyperbolicity_certificate(&dh, 0).unwrap();
        assert_eq!((rep.side_defect, rep.delta_measured), (0.0, 0.0));
    }

    #[test]
    fn singleton_space_has_one_level() {
        let x = path(1);
        let t = build_tower(&x, 0, 1.0, 4.0, SearchMode::Auto).unwrap();
        assert_eq!(t.len(), 1);
    }

    #[test]
    fn path_tower_passes_everything() {
        let x = path(16);
        let t = build_tower(&x, 1, 2.0, 4.0, SearchMode::Auto).unwrap();
        check_tower(&t).unwrap();
        let dh = dh_metric(&x, &t).unwrap();
        assert!(dh.is_metric());
        for b in 0..16 {
            assert!(hyperbolicity_certificate(&dh, b).unwrap().checks.iter().all(Check::passes));
        }
        for row in coarse_equivalence_profile(&x, &dh, &t).unwrap() {
            assert!(row.upper_violations.is_empty() && row.lower_violations.is_empty());
        }
        assert!(dim_na_preservation(&dh, &t, t.len() + 4).unwrap().iter().all(|r| r.holds));
    }

    #[test]
    fn growth_at_most_one_is_rejected() {
        assert!(build_tower(&path(3), 0, 2.0, 1.0, SearchMode::Auto).is_err());
    }
}
