//! Sphere extensors and cover refinements: both directions of their
//! equivalence, the multiplicity lift, nerve surgery and chain tests.
//!
//! Maps into the sphere `S^m` are maps into the boundary of the standard
//! simplex `Δ^{m+1}`: weight vectors of length `m+2` with at least one
//! weight exactly zero.

pub mod chains;
pub mod extend;
pub mod lift;
pub mod oracles;
pub mod refine;
pub mod surgery;

use serde::Serialize;

use crate::check::Check;
use crate::covers::{lebesgue_number, refines_indexed, Cover, CoverError};
use crate::extension::{ExtensionError, PartialMap};
use crate::metric::{FiniteMetricSpace, MetricError, Norm};
use crate::nerve::NerveError;
use crate::scalar::TAU;

pub use chains::{chain_components, dim_zero_certificate, ChainPartition, ChainRule, DimZeroScale};
pub use extend::{extension_from_refinement, ExtensionFromRefinement};
pub use lift::{lift_refinement, LiftReport};
pub use oracles::{CoverRefiner, LiftedRefiner, NearestPointExtender, RefinementBackedExtender, ShrinkingRefiner};
pub use refine::{refinement_from_extension, RefinementFromExtension};
pub use surgery::{nerve_surgery_refine, SurgeryReport};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SphereError {
    #[error(transparent)]
    Cover(#[from] CoverError),
    #[error(transparent)]
    Nerve(#[from] NerveError),
    #[error(transparent)]
    Extension(#[from] ExtensionError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error("{what} = {value} lies outside the window ({lo}, {hi})")]
    OutsideWindow { what: String, value: f64, lo: f64, hi: f64 },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("oracle refused: {0}")]
    OracleRefused(String),
}

/// An open interval `(lo, hi)` of scales or Lipschitz constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Window {
    pub lo: f64,
    pub hi: f64,
}

impl Window {
    pub fn new(lo: f64, hi: f64) -> Result<Self, SphereError> {
        if !(lo >= 0.0 && lo < hi) {
            return Err(SphereError::Precondition(format!("window ({lo}, {hi}) is empty")));
        }
        Ok(Self { lo, hi })
    }

    pub fn unbounded() -> Self {
        Self { lo: 0.0, hi: f64::INFINITY }
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo < v && v < self.hi
    }

    pub fn scaled(&self, k: f64) -> Self {
        Self { lo: self.lo * k, hi: self.hi * k }
    }

    /// Errors with [`SphereError::OutsideWindow`] unless `v` is inside or
    /// `force` is set. Returns whether `v` is inside.
    pub fn require(&self, what: &str, v: f64, force: bool) -> Result<bool, SphereError> {
        let inside = self.contains(v);
        if !inside && !force {
            return Err(SphereError::OutsideWindow { what: what.into(), value: v, lo: self.lo, hi: self.hi });
        }
        Ok(inside)
    }
}

/// Options shared by the pipelines.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunOptions {
    /// Run outside oracle windows; guaranteed bounds are then reported, not asserted.
    pub force: bool,
}

/// A total map into `∂Δ^{m+1}` returned by a sphere extender.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereExtension {
    pub values: Vec<Vec<f64>>,
    pub lambda_effective: f64,
    pub measured_lip: f64,
    pub warnings: Vec<String>,
}

/// Extends Lipschitz maps `A → S^m` over the whole space.
pub trait SphereExtender: Send + Sync {
    /// `m`: values have `m + 2` weights.
    fn sphere_dim(&self) -> usize;
    /// Guaranteed constant `C`: extensions are `C·λ`-Lipschitz.
    fn constant(&self) -> f64;
    /// Lipschitz constants for which the guarantee holds.
    fn window(&self) -> Window;
    fn norm(&self) -> Norm;
    fn extend(
        &self,
        space: &FiniteMetricSpace<f64>,
        f: &PartialMap<Vec<f64>>,
        lambda: f64,
    ) -> Result<SphereExtension, SphereError>;
}

/// Refines r-Lebesgue covers with a fixed number of elements to covers of
/// one less multiplicity.
pub trait Refiner: Send + Sync {
    /// Number of elements `m + 2` of the covers it accepts.
    fn elements(&self) -> usize;
    /// Guaranteed factor `t`: outputs are `t·r`-Lebesgue.
    fn shrink_factor(&self) -> f64;
    /// Scales `r` for which the guarantee holds.
    fn window(&self) -> Window;
    /// Returns an indexed refinement `V_i ⊆ U_i` of multiplicity at most
    /// `elements() - 1`.
    fn refine(&self, space: &FiniteMetricSpace<f64>, cover: &Cover, r: f64) -> Result<Cover, SphereError>;
}

/// `√k` for l₂ and `k²` for l₁: the simplex extension constant in `ℝᵏ`.
pub fn simplex_extension_factor(norm: Norm, k: usize) -> f64 {
    let k = k as f64;
    match norm {
        Norm::L2 => k.sqrt(),
        Norm::L1 => k * k,
    }
}

/// `t = 1 / (4·C·(m+2)²·(m+1))`.
pub fn refinement_shrink_factor(m: usize, c: f64) -> f64 {
    let m2 = (m + 2) as f64;
    1.0 / (4.0 * c * m2 * m2 * (m + 1) as f64)
}

/// `C = 50·(m+2)²·s + 150·s²·(m+2)⁵ / t`.
pub fn extension_constant(m: usize, s: f64, t: f64) -> f64 {
    let m2 = (m + 2) as f64;
    50.0 * m2 * m2 * s + 150.0 * s * s * m2.powi(5) / t
}

/// Extender window for a refiner window `(r₁, r₂)`:
/// `1/(12·s·r₂·(m+2)) < λ < 1/(12·s·r₁·(m+2))`.
pub fn lambda_window(refiner: Window, m: usize, s: f64) -> Window {
    let k = 12.0 * s * (m + 2) as f64;
    let hi = if refiner.lo > 0.0 { 1.0 / (k * refiner.lo) } else { f64::INFINITY };
    Window { lo: 1.0 / (k * refiner.hi), hi }
}

/// A point of `∂Δ^{vertices-1}`: nonnegative, summing to one, with an
/// exactly-zero weight.
pub fn check_sphere_value(v: &[f64], vertices: usize) -> Result<(), String> {
    if v.len() != vertices {
        return Err(format!("{} weights, expected {vertices}", v.len()));
    }
    if let Some(w) = v.iter().find(|w| !w.is_finite() || **w < 0.0) {
        return Err(format!("weight {w} is negative"));
    }
    let total: f64 = v.iter().sum();
    if (total - 1.0).abs() > TAU * vertices as f64 {
        return Err(format!("weights sum to {total}"));
    }
    if !v.contains(&0.0) {
        return Err("no weight is zero, so the point is interior".into());
    }
    Ok(())
}

/// Index and reason of the first value that is not on the sphere.
pub fn first_off_sphere(values: &[Vec<f64>], vertices: usize) -> Option<(usize, String)> {
    values.iter().enumerate().find_map(|(x, v)| check_sphere_value(v, vertices).err().map(|e| (x, e)))
}

pub(crate) fn image_check(name: &str, values: &[Vec<f64>], vertices: usize) -> Check {
    match first_off_sphere(values, vertices) {
        None => Check::flag(name, true),
        Some((x, reason)) => Check::flag(name, false).with_witness(format!("point {x}: {reason}")),
    }
}

/// The three refinement guarantees: `V_i ⊆ U_i`, multiplicity, Lebesgue.
pub(crate) fn refinement_checks(
    space: &FiniteMetricSpace<f64>,
    coarse: &Cover,
    fine: &Cover,
    max_mult: usize,
    min_lebesgue: f64,
    assert_bounds: bool,
) -> Vec<Check> {
    let lebesgue = lebesgue_number(space, fine).to_f64();
    vec![
        Check::flag("refines (V_i within U_i)", refines_indexed(fine, coarse)),
        Check::le("multiplicity", fine.multiplicity() as f64, max_mult as f64),
        Check::ge("Lebesgue number >= t*r", lebesgue, min_lebesgue).asserted_if(assert_bounds),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_match_closed_forms() {
        assert_eq!(refinement_shrink_factor(0, 1.0), 1.0 / 16.0);
        assert_eq!(extension_constant(0, 4.0, 0.5), 154400.0);
        let w = lambda_window(Window { lo: 1.0, hi: 2.0 }, 0, 1.0);
        assert_eq!(w.lo, 1.0 / 48.0);
        assert_eq!(w.hi, 1.0 / 24.0);
        assert_eq!(lambda_window(Window { lo: 0.0, hi: 2.0 }, 0, 1.0).hi, f64::INFINITY);
    }

    #[test]
    fn sphere_values() {
        assert!(check_sphere_value(&[1.0, 0.0], 2).is_ok());
        assert!(check_sphere_value(&[0.5, 0.5], 2).is_err());
        assert!(check_sphere_value(&[0.5, 0.5, 0.0], 2).is_err());
    }
}
