//! Oracles assembled from decompositions of the input space, sized so that
//! their guaranteed windows contain the scale a pipeline will ask for.

use nagata_core::covers::Cover;
use nagata_core::dimension::{find_decomposition, Search, SearchMode};
use nagata_core::metric::{FiniteMetricSpace, Norm};
use nagata_core::sphere_ext::{
    simplex_extension_factor, CoverRefiner, RefinementBackedExtender, Refiner, SphereError,
};

/// A refiner for `elements`-element covers whose window `(mesh(W), 2r)`
/// contains `r`. `W` is the quarter-neighborhood cover of a decomposition
/// into at most `elements - 1` families at scale `r/(2C+2)`, or the
/// singletons when none is found.
pub fn refiner_for_scale(
    space: &FiniteMetricSpace<f64>,
    elements: usize,
    r: f64,
    c: f64,
) -> Result<CoverRefiner, SphereError> {
    if elements < 2 {
        return Err(SphereError::Precondition("refiners need covers of at least 2 elements".into()));
    }
    let rho = r / (2.0 * c + 2.0);
    if rho > 0.0 && rho.is_finite() {
        if let Ok(Search::Found(d, _)) = find_decomposition(space, &rho, &c, elements - 2, SearchMode::Auto) {
            if d.families < elements {
                if let Ok(refiner) = CoverRefiner::from_decomposition(space, &d, 0.25, elements, 2.0 * r) {
                    if refiner.window().contains(r) {
                        return Ok(refiner);
                    }
                }
            }
        }
    }
    CoverRefiner::new(space, Cover::singletons(space.len()), elements, 2.0 * r)
}

/// Scale `1/(12·s·λ·(m+2))` at which a refinement-backed extender with
/// Lipschitz input `λ` calls its refiner.
pub fn extender_scale(norm: Norm, m: usize, lambda: f64) -> f64 {
    let k = m + 2;
    1.0 / (12.0 * simplex_extension_factor(norm, k) * lambda * k as f64)
}

/// A sphere extender for `S^m` whose window contains `lambda`.
pub fn extender_for_lambda(
    space: &FiniteMetricSpace<f64>,
    m: usize,
    lambda: f64,
    norm: Norm,
    c: f64,
) -> Result<RefinementBackedExtender<CoverRefiner>, SphereError> {
    let r = extender_scale(norm, m, lambda);
    Ok(RefinementBackedExtender::new(refiner_for_scale(space, m + 2, r, c)?, norm))
}
