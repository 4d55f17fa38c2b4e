//! Concrete refiners and sphere extenders.

use crate::check::{all_pass, describe_failures};
use crate::covers::{
    boundary_distance, decomposition_to_lebesgue_cover, lebesgue_number, mesh, Cover, FamilyDecomposition,
};
use crate::extension::PartialMap;
use crate::metric::{FiniteMetricSpace, Norm};
use crate::nerve::map_lipschitz_constant;
use crate::nerve::SimplexPoint;
use crate::scalar::Scalar;

use super::{
    extension_constant, extension_from_refinement, lambda_window, lift_refinement, simplex_extension_factor,
    RunOptions, SphereError, SphereExtender, SphereExtension, Refiner, Window,
};

/// Refines by a fixed cover `W` of a base space, built for example from a
/// known decomposition.
///
/// Each element of `W` (restricted to the points of the input space) is
/// placed in the first `U_i` containing it. For `mesh(W) < r < r₂` every
/// element fits, and the result is `L(W)`-Lebesgue, so `t = L(W)/r₂`.
/// Spaces are matched to the base space by label, so subspaces work too.
#[derive(Debug, Clone)]
pub struct CoverRefiner {
    labels: Vec<String>,
    cover: Cover,
    elements: usize,
    window: Window,
    t: f64,
}

impl CoverRefiner {
    pub fn new(base: &FiniteMetricSpace<f64>, cover: Cover, elements: usize, r2: f64) -> Result<Self, SphereError> {
        if cover.n_points() != base.len() {
            return Err(crate::covers::CoverError::SpaceMismatch { cover: cover.n_points(), space: base.len() }.into());
        }
        if elements < 2 || cover.multiplicity() > elements - 1 {
            return Err(SphereError::Precondition(format!(
                "fixed cover has multiplicity {} but refinements of {elements}-element covers need at most {}",
                cover.multiplicity(),
                elements.saturating_sub(1)
            )));
        }
        let window = Window::new(mesh(base, &cover), r2)?;
        let t = match lebesgue_number(base, &cover).finite() {
            Some(l) => (l / r2).min(1.0),
            None => 1.0,
        };
        Ok(Self { labels: base.labels().to_vec(), cover, elements, window, t })
    }

    /// Uses the open `shrink·r`-neighborhood cover of a decomposition.
    pub fn from_decomposition(
        base: &FiniteMetricSpace<f64>,
        decomp: &FamilyDecomposition<f64>,
        shrink: f64,
        elements: usize,
        r2: f64,
    ) -> Result<Self, SphereError> {
        let cover = decomposition_to_lebesgue_cover(base, decomp, &shrink)?;
        Self::new(base, cover, elements, r2)
    }

    pub fn cover(&self) -> &Cover {
        &self.cover
    }
}

impl Refiner for CoverRefiner {
    fn elements(&self) -> usize {
        self.elements
    }

    fn shrink_factor(&self) -> f64 {
        self.t
    }

    fn window(&self) -> Window {
        self.window
    }

    fn refine(&self, space: &FiniteMetricSpace<f64>, cover: &Cover, _r: f64) -> Result<Cover, SphereError> {
        if cover.len() != self.elements {
            return Err(SphereError::Precondition(format!(
                "cover has {} elements, refiner expects {}",
                cover.len(),
                self.elements
            )));
        }
        let base_index: Vec<usize> = space
            .labels()
            .iter()
            .map(|l| {
                self.labels.iter().position(|b| b == l).ok_or_else(|| {
                    SphereError::Precondition(format!("point `{l}` is not in the refiner's base space"))
                })
            })
            .collect::<Result<_, _>>()?;
        let restricted = self.cover.restrict(&base_index)?;
        let mut out = vec![Vec::new(); cover.len()];
        for e in restricted.elements().iter().filter(|e| !e.is_empty()) {
            let home = (0..cover.len())
                .find(|&i| e.iter().all(|&p| cover.contains(i, p)))
                .ok_or_else(|| SphereError::OracleRefused(format!("no cover element contains {e:?}")))?;
            out[home].extend_from_slice(e);
        }
        Ok(Cover::indexed(space.len(), out)?)
    }
}

/// Toy refiner: every point lying in all elements is removed from the
/// element where its boundary distance `f_s(x)` is smallest (ties to the
/// lowest index). The declared `t` and window are taken on trust and the
/// pipelines check them.
#[derive(Debug, Clone)]
pub struct ShrinkingRefiner {
    pub elements: usize,
    pub t: f64,
    pub window: Window,
}

impl Refiner for ShrinkingRefiner {
    fn elements(&self) -> usize {
        self.elements
    }

    fn shrink_factor(&self) -> f64 {
        self.t
    }

    fn window(&self) -> Window {
        self.window
    }

    fn refine(&self, space: &FiniteMetricSpace<f64>, cover: &Cover, _r: f64) -> Result<Cover, SphereError> {
        let mut elements: Vec<Vec<usize>> = cover.elements().to_vec();
        for x in space.points() {
            if cover.local_multiplicity(x) < cover.len() {
                continue;
            }
            let mut drop = 0;
            let mut best = boundary_distance(space, cover, 0, x)?;
            for s in 1..cover.len() {
                let f = boundary_distance(space, cover, s, x)?;
                if f < best {
                    best = f;
                    drop = s;
                }
            }
            elements[drop].retain(|&p| p != x);
        }
        Ok(Cover::indexed(space.len(), elements)?)
    }
}

/// Lifts a refiner for `(n+2)`-element covers to `(n+3)`-element covers
/// with `t/4` on the window `(4r₁, 4r₂)`.
#[derive(Debug, Clone)]
pub struct LiftedRefiner<R> {
    pub inner: R,
}

impl<R: Refiner> Refiner for LiftedRefiner<R> {
    fn elements(&self) -> usize {
        self.inner.elements() + 1
    }

    fn shrink_factor(&self) -> f64 {
        self.inner.shrink_factor() / 4.0
    }

    fn window(&self) -> Window {
        self.inner.window().scaled(4.0)
    }

    fn refine(&self, space: &FiniteMetricSpace<f64>, cover: &Cover, r: f64) -> Result<Cover, SphereError> {
        let report = lift_refinement(&self.inner, space, cover, r, RunOptions::default())?;
        if !all_pass(&report.checks) {
            return Err(SphereError::OracleRefused(describe_failures(&report.checks)));
        }
        Ok(report.cover)
    }
}

/// Toy extender: each point takes the value at its nearest domain point
/// (ties to the lowest index); an empty domain maps to vertex 0. Refuses
/// when the result is not `k·λ`-Lipschitz.
#[derive(Debug, Clone)]
pub struct NearestPointExtender {
    pub m: usize,
    pub k: f64,
    pub norm: Norm,
}

impl SphereExtender for NearestPointExtender {
    fn sphere_dim(&self) -> usize {
        self.m
    }

    fn constant(&self) -> f64 {
        self.k
    }

    fn window(&self) -> Window {
        Window::unbounded()
    }

    fn norm(&self) -> Norm {
        self.norm
    }

    fn extend(
        &self,
        space: &FiniteMetricSpace<f64>,
        f: &PartialMap<Vec<f64>>,
        lambda: f64,
    ) -> Result<SphereExtension, SphereError> {
        let vertex = SimplexPoint::vertex(0, self.m + 2, self.norm).weights;
        let values: Vec<Vec<f64>> = space
            .points()
            .map(|x| {
                if let Some(v) = f.get(x) {
                    return v.clone();
                }
                let mut nearest: Option<(f64, &Vec<f64>)> = None;
                for (&a, v) in f.domain.iter().zip(&f.values) {
                    let d = *space.dist(x, a);
                    if nearest.is_none_or(|(best, _)| d < best) {
                        nearest = Some((d, v));
                    }
                }
                nearest.map_or_else(|| vertex.clone(), |(_, v)| v.clone())
            })
            .collect();
        let points: Vec<SimplexPoint> = values.iter().map(|v| SimplexPoint::new(v.clone(), self.norm)).collect();
        let domain: Vec<usize> = space.points().collect();
        let measured_lip = map_lipschitz_constant(space, &domain, &points);
        let input: Vec<SimplexPoint> = f.values.iter().map(|v| SimplexPoint::new(v.clone(), self.norm)).collect();
        let lambda_effective = lambda.max(crate::metric::lipschitz_constant(space, &f.domain, |k, l| {
            self.norm.distance(&input[k].weights, &input[l].weights)
        }));
        if !measured_lip.le_tol(&(self.k * lambda_effective)) {
            return Err(SphereError::OracleRefused(format!(
                "nearest-point extension is {measured_lip}-Lipschitz, above {}",
                self.k * lambda_effective
            )));
        }
        Ok(SphereExtension { values, lambda_effective, measured_lip, warnings: Vec::new() })
    }
}

/// Sphere extender built from a refiner by the radial-splice construction.
#[derive(Debug, Clone)]
pub struct RefinementBackedExtender<R> {
    pub refiner: R,
    pub norm: Norm,
}

impl<R: Refiner> RefinementBackedExtender<R> {
    pub fn new(refiner: R, norm: Norm) -> Self {
        Self { refiner, norm }
    }

    /// Simplex extension constant `s` for `Δ^{m+1} ⊂ ℝ^{m+2}`.
    pub fn s(&self) -> f64 {
        simplex_extension_factor(self.norm, self.refiner.elements())
    }
}

impl<R: Refiner> SphereExtender for RefinementBackedExtender<R> {
    fn sphere_dim(&self) -> usize {
        self.refiner.elements() - 2
    }

    fn constant(&self) -> f64 {
        extension_constant(self.sphere_dim(), self.s(), self.refiner.shrink_factor())
    }

    fn window(&self) -> Window {
        lambda_window(self.refiner.window(), self.sphere_dim(), self.s())
    }

    fn norm(&self) -> Norm {
        self.norm
    }

    fn extend(
        &self,
        space: &FiniteMetricSpace<f64>,
        f: &PartialMap<Vec<f64>>,
        lambda: f64,
    ) -> Result<SphereExtension, SphereError> {
        let report = extension_from_refinement(&self.refiner, space, f, lambda, self.norm, RunOptions::default())?;
        if !all_pass(&report.checks) {
            return Err(SphereError::OracleRefused(describe_failures(&report.checks)));
        }
        Ok(SphereExtension {
            values: report.values,
            lambda_effective: report.lambda_effective,
            measured_lip: report.measured_lip,
            warnings: report.warnings,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> FiniteMetricSpace<f64> {
        FiniteMetricSpace::from_fn(n, |i, j| (i as f64 - j as f64).abs()).unwrap()
    }

    #[test]
    fn cover_refiner_places_pieces_in_first_container() {
        let x = path(6);
        let w = Cover::new(6, vec![vec![0, 1], vec![2, 3], vec![4, 5]]).unwrap();
        let refiner = CoverRefiner::new(&x, w, 2, 10.0).unwrap();
        assert_eq!(refiner.window().lo, 1.0);
        assert_eq!(refiner.shrink_factor(), 0.1);
        let u = Cover::new(6, vec![vec![0, 1, 2, 3], vec![2, 3, 4, 5]]).unwrap();
        let v = refiner.refine(&x, &u, 2.0).unwrap();
        assert_eq!(v.elements(), &[vec![0, 1, 2, 3], vec![4, 5]]);
        let sub = x.subspace(&[2, 3, 4]).unwrap();
        let u_sub = Cover::new(3, vec![vec![0, 1], vec![1, 2]]).unwrap();
        let v_sub = refiner.refine(&sub, &u_sub, 2.0).unwrap();
        assert_eq!(v_sub.elements(), &[vec![0, 1], vec![2]]);
    }

    #[test]
    fn cover_refiner_refuses_split_pieces() {
        let x = path(4);
        let refiner = CoverRefiner::new(&x, Cover::whole(4), 2, 10.0).unwrap();
        let u = Cover::new(4, vec![vec![0, 1, 2], vec![2, 3]]).unwrap();
        assert!(matches!(refiner.refine(&x, &u, 1.0), Err(SphereError::OracleRefused(_))));
    }

    #[test]
    fn shrinking_refiner_drops_shallowest_membership() {
        let x = path(4);
        let u = Cover::new(4, vec![vec![0, 1, 2], vec![1, 2, 3]]).unwrap();
        let s = ShrinkingRefiner { elements: 2, t: 0.5, window: Window::unbounded() };
        let v = s.refine(&x, &u, 1.0).unwrap();
        assert_eq!(v.elements(), &[vec![0, 1], vec![2, 3]]);
        assert_eq!(v.multiplicity(), 1);
    }

    #[test]
    fn nearest_point_extender_on_empty_domain() {
        let x = path(3);
        let e = NearestPointExtender { m: 0, k: 1.0, norm: Norm::L1 };
        let out = e.extend(&x, &PartialMap::new(vec![], vec![]).unwrap(), 1.0).unwrap();
        assert_eq!(out.values, vec![vec![1.0, 0.0]; 3]);
        let f = PartialMap::new(vec![0, 2], vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert!(matches!(e.extend(&x, &f, 1.0), Err(SphereError::OracleRefused(_))));
        assert!(NearestPointExtender { m: 0, k: 2.0, norm: Norm::L1 }.extend(&x, &f, 1.0).is_ok());
    }
}
