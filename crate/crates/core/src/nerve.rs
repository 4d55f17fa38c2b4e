//! Nerves of covers, barycentric partition-of-unity maps into them, and the
//! l₁/l₂ geometry of simplices.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::covers::{boundary_distance_unchecked, lebesgue_profile, Cover, CoverError};
use crate::metric::{lipschitz_constant, FiniteMetricSpace, Norm};
use crate::scalar::{Extended, Scalar, TAU};

/// Largest simplex dimension [`build_nerve`] will enumerate.
pub const MAX_NERVE_DIMENSION: usize = 25;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NerveError {
    #[error(transparent)]
    Cover(#[from] CoverError),
    #[error("nerve dimension {0} exceeds the enumeration limit {MAX_NERVE_DIMENSION}")]
    TooLarge(usize),
    #[error("simplex points use different norms")]
    NormMismatch,
    #[error("simplex points have {0} and {1} coordinates")]
    DimensionMismatch(usize, usize),
    #[error("map has {got} points, expected {expected}")]
    MapLength { got: usize, expected: usize },
    #[error("point {point}: {reason}")]
    NotInSimplex { point: usize, reason: String },
}

/// Abstract simplicial complex with one vertex per cover element.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NerveComplex {
    pub vertices: usize,
    /// Every nonempty subfamily with a common point, sorted by size then
    /// lexicographically.
    pub simplices: Vec<Vec<usize>>,
    /// Largest simplex size minus one (`-1` only for an empty complex).
    pub dimension: isize,
}

impl NerveComplex {
    pub fn contains(&self, simplex: &[usize]) -> bool {
        let mut s = simplex.to_vec();
        s.sort_unstable();
        self.simplices.binary_search_by(|t| simplex_order(t, &s)).is_ok()
    }

    /// Simplices with exactly `dim + 1` vertices.
    pub fn simplices_of_dimension(&self, dim: usize) -> impl Iterator<Item = &Vec<usize>> {
        self.simplices.iter().filter(move |s| s.len() == dim + 1)
    }

    pub fn is_downward_closed(&self) -> bool {
        self.simplices.iter().all(|s| {
            s.len() == 1
                || (0..s.len()).all(|skip| {
                    let face: Vec<usize> =
                        s.iter().enumerate().filter(|(k, _)| *k != skip).map(|(_, &v)| v).collect();
                    self.contains(&face)
                })
        })
    }
}

fn simplex_order(a: &Vec<usize>, b: &Vec<usize>) -> std::cmp::Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

/// The nerve of `cover`: all subfamilies with a common point.
pub fn build_nerve(cover: &Cover) -> Result<NerveComplex, NerveError> {
    let mut maximal: BTreeSet<Vec<usize>> = BTreeSet::new();
    for x in 0..cover.n_points() {
        let t = cover.memberships(x);
        if t.len() > MAX_NERVE_DIMENSION + 1 {
            return Err(NerveError::TooLarge(t.len() - 1));
        }
        maximal.insert(t);
    }
    let mut all: BTreeSet<Vec<usize>> = BTreeSet::new();
    for top in &maximal {
        let k = top.len();
        for mask in 1u64..(1u64 << k) {
            let face: Vec<usize> = (0..k).filter(|b| mask >> b & 1 == 1).map(|b| top[b]).collect();
            all.insert(face);
        }
    }
    let mut simplices: Vec<Vec<usize>> = all.into_iter().collect();
    simplices.sort_by(simplex_order);
    let dimension = simplices.iter().map(|s| s.len() as isize - 1).max().unwrap_or(-1);
    Ok(NerveComplex { vertices: cover.len(), simplices, dimension })
}

/// Barycentric coordinates over the vertices of a simplex or nerve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimplexPoint {
    pub weights: Vec<f64>,
    pub norm: Norm,
}

impl SimplexPoint {
    pub fn new(weights: Vec<f64>, norm: Norm) -> Self {
        Self { weights, norm }
    }

    pub fn vertex(index: usize, vertices: usize, norm: Norm) -> Self {
        let mut weights = vec![0.0; vertices];
        weights[index] = 1.0;
        Self { weights, norm }
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    /// Vertices carrying positive weight.
    pub fn support(&self) -> Vec<usize> {
        (0..self.weights.len()).filter(|&i| self.weights[i] > 0.0).collect()
    }

    /// Nonnegative weights summing to one (within tolerance).
    pub fn check(&self) -> Result<(), String> {
        if let Some(w) = self.weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
            return Err(format!("weight {w} is not a nonnegative number"));
        }
        let total: f64 = self.weights.iter().sum();
        if (total - 1.0).abs() > TAU * self.weights.len().max(1) as f64 {
            return Err(format!("weights sum to {total}"));
        }
        Ok(())
    }

    /// On the boundary sphere: some weight is exactly zero.
    pub fn on_boundary(&self) -> bool {
        self.weights.contains(&0.0)
    }
}

/// l₁ or l₂ distance between two points of the same simplex.
pub fn simplex_distance(p: &SimplexPoint, q: &SimplexPoint) -> Result<f64, NerveError> {
    if p.norm != q.norm {
        return Err(NerveError::NormMismatch);
    }
    if p.dim() != q.dim() {
        return Err(NerveError::DimensionMismatch(p.dim(), q.dim()));
    }
    Ok(p.norm.distance(&p.weights, &q.weights))
}

/// `φ_s(x) = f_s(x) / Σ_t f_t(x)`.
///
/// If some elements equal the whole space their `f` is `+∞`; the map then
/// sends every point to the barycenter of those vertices (a single vertex in
/// the usual case of one such element).
pub fn barycentric_map(
    space: &FiniteMetricSpace<f64>,
    cover: &Cover,
    norm: Norm,
) -> Result<Vec<SimplexPoint>, NerveError> {
    if cover.n_points() != space.len() {
        return Err(CoverError::SpaceMismatch { cover: cover.n_points(), space: space.len() }.into());
    }
    let whole = cover.whole_space_elements();
    if !whole.is_empty() {
        let mut weights = vec![0.0; cover.len()];
        for &s in &whole {
            weights[s] = 1.0 / whole.len() as f64;
        }
        return Ok(vec![SimplexPoint::new(weights, norm); space.len()]);
    }
    let mut out = Vec::with_capacity(space.len());
    for x in space.points() {
        let f: Vec<f64> = (0..cover.len())
            .map(|s| match boundary_distance_unchecked(space, cover, s, x) {
                Extended::Finite(v) => v,
                Extended::Infinite => unreachable!("whole-space elements handled above"),
            })
            .collect();
        let total: f64 = f.iter().sum();
        if total <= 0.0 {
            return Err(CoverError::Uncovered(x).into());
        }
        out.push(SimplexPoint::new(f.iter().map(|v| v / total).collect(), norm));
    }
    Ok(out)
}

/// Measured Lipschitz constant of a map into a simplex.
pub fn map_lipschitz_constant(
    space: &FiniteMetricSpace<f64>,
    domain: &[usize],
    values: &[SimplexPoint],
) -> f64 {
    lipschitz_constant(space, domain, |k, l| values[k].norm.distance(&values[k].weights, &values[l].weights))
}

/// Measured `Lip(φ)` against `4·m(U)²/L(U)` for both multiplicity counts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BarycentricBoundReport {
    pub norm: Norm,
    pub measured_lip: f64,
    /// `None` when the Lebesgue number is infinite.
    pub lebesgue: Option<f64>,
    pub mult_plus_one: usize,
    pub mult_open: usize,
    /// `4·(1+|T|)²/L`.
    pub stated_bound: f64,
    /// `4·|T|²/L`.
    pub open_bound: f64,
    pub holds: bool,
    pub holds_open: bool,
}

pub fn verify_barycentric_bound(
    space: &FiniteMetricSpace<f64>,
    cover: &Cover,
    norm: Norm,
) -> Result<BarycentricBoundReport, NerveError> {
    let phi = barycentric_map(space, cover, norm)?;
    let domain: Vec<usize> = space.points().collect();
    let measured_lip = map_lipschitz_constant(space, &domain, &phi);
    let profile = lebesgue_profile(space, cover)?;
    let lebesgue = profile.global.finite().copied();
    let bound = |m: usize| match lebesgue {
        Some(l) => 4.0 * (m * m) as f64 / l,
        None => 0.0,
    };
    let stated_bound = bound(profile.mult_plus_one_max);
    let open_bound = bound(profile.mult_open_max);
    Ok(BarycentricBoundReport {
        norm,
        measured_lip,
        lebesgue,
        mult_plus_one: profile.mult_plus_one_max,
        mult_open: profile.mult_open_max,
        holds: measured_lip.le_tol(&stated_bound),
        holds_open: measured_lip.le_tol(&open_bound),
        stated_bound,
        open_bound,
    })
}

/// `{x : weight_v(x) > 0}` for every vertex `v`, keeping empty sets so the
/// result stays indexed by vertex.
pub fn support_cover(map: &[SimplexPoint], vertices: usize) -> Result<Cover, NerveError> {
    let mut elements = vec![Vec::new(); vertices];
    for (x, p) in map.iter().enumerate() {
        if p.dim() != vertices {
            return Err(NerveError::DimensionMismatch(p.dim(), vertices));
        }
        for v in p.support() {
            elements[v].push(x);
        }
    }
    Ok(Cover::indexed(map.len(), elements)?)
}

/// Preimages of open vertex stars, with empty preimages dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct StarCover {
    pub cover: Cover,
    /// Nerve vertex behind each element of `cover`.
    pub vertex_of: Vec<usize>,
}

pub fn star_preimages(map: &[SimplexPoint], nerve: &NerveComplex) -> Result<StarCover, NerveError> {
    let indexed = support_cover(map, nerve.vertices)?;
    for (x, p) in map.iter().enumerate() {
        let support = p.support();
        if !support.is_empty() && !nerve.contains(&support) {
            return Err(NerveError::NotInSimplex { point: x, reason: "support is not a nerve simplex".into() });
        }
    }
    let vertex_of: Vec<usize> = (0..indexed.len()).filter(|&v| !indexed.element(v).is_empty()).collect();
    let cover = Cover::new(map.len(), vertex_of.iter().map(|&v| indexed.element(v).to_vec()).collect())?;
    Ok(StarCover { cover, vertex_of })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> FiniteMetricSpace<f64> {
        FiniteMetricSpace::from_fn(n, |i, j| (i as f64 - j as f64).abs()).unwrap()
    }

    #[test]
    fn nerve_of_small_covers() {
        let disjoint = Cover::new(4, vec![vec![0, 1], vec![2, 3]]).unwrap();
        let n = build_nerve(&disjoint).unwrap();
        assert_eq!(n.simplices, vec![vec![0], vec![1]]);
        assert_eq!(n.dimension, 0);
        let overlap = Cover::new(4, vec![vec![0, 1, 2], vec![1, 2, 3]]).unwrap();
        let n = build_nerve(&overlap).unwrap();
        assert!(n.contains(&[1, 0]));
        assert_eq!(n.dimension, 1);
        assert!(n.is_downward_closed());
    }

    #[test]
    fn barycentric_values_on_path_cover() {
        let x = path(4);
        let c = Cover::new(4, vec![vec![0, 1, 2], vec![1, 2, 3]]).unwrap();
        let phi = barycentric_map(&x, &c, Norm::L1).unwrap();
        assert_eq!(phi[0].weights, vec![1.0, 0.0]);
        assert!((phi[1].weights[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((phi[1].weights[1] - 1.0 / 3.0).abs() < 1e-15);
        let d = simplex_distance(&phi[1], &phi[0]).unwrap();
        assert!((d - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn singleton_cover_maps_to_vertices() {
        let x = path(3);
        let phi = barycentric_map(&x, &Cover::singletons(3), Norm::L1).unwrap();
        for (i, p) in phi.iter().enumerate() {
            assert_eq!(p, &SimplexPoint::vertex(i, 3, Norm::L1));
        }
    }

    #[test]
    fn whole_space_cover_is_constant() {
        let x = path(3);
        let c = Cover::new(3, vec![vec![0, 1, 2], vec![0]]).unwrap();
        let phi = barycentric_map(&x, &c, Norm::L1).unwrap();
        assert!(phi.iter().all(|p| p.weights == vec![1.0, 0.0]));
        let r = verify_barycentric_bound(&x, &Cover::whole(3), Norm::L1).unwrap();
        assert_eq!(r.measured_lip, 0.0);
        assert!(r.holds);
    }

    #[test]
    fn simplex_distance_errors_and_vertices() {
        let a = SimplexPoint::vertex(0, 2, Norm::L1);
        let b = SimplexPoint::vertex(1, 2, Norm::L1);
        assert_eq!(simplex_distance(&a, &b).unwrap(), 2.0);
        assert_eq!(simplex_distance(&a, &a).unwrap(), 0.0);
        let c = SimplexPoint::vertex(1, 2, Norm::L2);
        assert!(matches!(simplex_distance(&a, &c), Err(NerveError::NormMismatch)));
        let d = SimplexPoint::vertex(1, 3, Norm::L1);
        assert!(matches!(simplex_distance(&a, &d), Err(NerveError::DimensionMismatch(2, 3))));
    }

    #[test]
    fn star_preimages_recover_supports() {
        let x = path(4);
        let c = Cover::new(4, vec![vec![0, 1, 2], vec![1, 2, 3]]).unwrap();
        let phi = barycentric_map(&x, &c, Norm::L1).unwrap();
        let nerve = build_nerve(&c).unwrap();
        let stars = star_preimages(&phi, &nerve).unwrap();
        assert_eq!(stars.cover, c);
        let constant = vec![SimplexPoint::vertex(1, 2, Norm::L1); 4];
        let stars = star_preimages(&constant, &nerve).unwrap();
        assert_eq!(stars.cover, Cover::whole(4));
        assert_eq!(stars.vertex_of, vec![1]);
    }
}
