//! Cover refinement from a sphere extender: push the barycentric map of an
//! `(m+2)`-element cover off the interior of the simplex and read the
//! refinement off the supports.

use crate::check::Check;
use crate::covers::{lebesgue_number, Cover};
use crate::extension::PartialMap;
use crate::metric::FiniteMetricSpace;
use crate::nerve::{barycentric_map, map_lipschitz_constant, support_cover, SimplexPoint};

use super::{image_check, refinement_checks, refinement_shrink_factor, RunOptions, SphereError, SphereExtender};

/// Result of [`refinement_from_extension`].
#[derive(Debug, Clone, PartialEq)]
pub struct RefinementFromExtension {
    /// `V_i = {x : g_i(x) > 0}`, indexed like the input cover.
    pub cover: Cover,
    /// `t = 1/(4·C·(m+2)²·(m+1))`.
    pub t: f64,
    /// `λ = 4·(m+2)²/r`, the Lipschitz constant handed to the extender.
    pub lambda: f64,
    pub phi_lip: f64,
    pub g_lip: f64,
    /// Points where `φ` is already on the boundary.
    pub boundary_points: Vec<usize>,
    pub oracle_called: bool,
    pub checks: Vec<Check>,
    pub warnings: Vec<String>,
}

/// Refines an r-Lebesgue cover `{U_0, …, U_{m+1}}` to multiplicity `m+1`
/// and Lebesgue number `t·r`.
pub fn refinement_from_extension(
    ext: &dyn SphereExtender,
    space: &FiniteMetricSpace<f64>,
    cover: &Cover,
    r: f64,
    opts: RunOptions,
) -> Result<RefinementFromExtension, SphereError> {
    let m = ext.sphere_dim();
    let k = m + 2;
    if cover.len() != k {
        return Err(SphereError::Precondition(format!(
            "cover has {} elements, the extender handles {k}",
            cover.len()
        )));
    }
    if cover.n_points() != space.len() {
        return Err(crate::covers::CoverError::SpaceMismatch { cover: cover.n_points(), space: space.len() }.into());
    }
    if !(r > 0.0 && r.is_finite()) {
        return Err(SphereError::Precondition(format!("scale r must be positive and finite, got {r}")));
    }
    if !lebesgue_number(space, cover).at_least(&r) {
        return Err(SphereError::Precondition(format!("cover is not {r}-Lebesgue")));
    }
    let lambda = 4.0 * (k * k) as f64 / r;
    let inside = ext.window().require("4(m+2)^2/r", lambda, opts.force)?;
    let c = ext.constant();
    let t = refinement_shrink_factor(m, c);
    let norm = ext.norm();

    let phi: Vec<SimplexPoint> = barycentric_map(space, cover, norm)?;
    let all: Vec<usize> = space.points().collect();
    let phi_lip = map_lipschitz_constant(space, &all, &phi);
    let mut checks = vec![Check::le("Lip(phi) <= 4(m+2)^2/r", phi_lip, lambda)];

    let boundary_points: Vec<usize> = all.iter().copied().filter(|&x| phi[x].on_boundary()).collect();
    let f = PartialMap::new(
        boundary_points.clone(),
        boundary_points.iter().map(|&x| phi[x].weights.clone()).collect(),
    )?;
    let oracle_called = boundary_points.len() < space.len();
    let mut warnings = Vec::new();
    let g: Vec<Vec<f64>> = if oracle_called {
        let out = ext.extend(space, &f, lambda)?;
        warnings.extend(out.warnings);
        out.values
    } else {
        phi.iter().map(|p| p.weights.clone()).collect()
    };
    if g.len() != space.len() {
        return Err(SphereError::OracleRefused(format!("extender returned {} values", g.len())));
    }
    let restricts = boundary_points.iter().all(|&x| g[x] == phi[x].weights);
    checks.push(Check::flag("g = phi where phi is on the boundary", restricts));
    checks.push(image_check("image(g) in boundary of simplex", &g, k));
    let g_points: Vec<SimplexPoint> = g.iter().map(|v| SimplexPoint::new(v.clone(), norm)).collect();
    let g_lip = map_lipschitz_constant(space, &all, &g_points);
    checks.push(Check::le("Lip(g) <= C*lambda", g_lip, c * lambda).asserted_if(inside));

    let refined = support_cover(&g_points, k)?;
    checks.extend(refinement_checks(space, cover, &refined, m + 1, t * r, inside));
    Ok(RefinementFromExtension {
        cover: refined,
        t,
        lambda,
        phi_lip,
        g_lip,
        boundary_points,
        oracle_called,
        checks,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::check::all_pass;
    use crate::metric::Norm;
    use crate::sphere_ext::NearestPointExtender;

    #[test]
    fn boundary_only_cover_needs_no_oracle() {
        let x = FiniteMetricSpace::from_fn(4, |i, j| (i as f64 - j as f64).abs()).unwrap();
        let u = Cover::new(4, vec![vec![0, 1], vec![2, 3]]).unwrap();
        let ext = NearestPointExtender { m: 0, k: 1.0, norm: Norm::L1 };
        let out = refinement_from_extension(&ext, &x, &u, 1.0, RunOptions::default()).unwrap();
        assert!(!out.oracle_called);
        assert_eq!(out.cover, u);
        assert!(all_pass(&out.checks), "{:?}", out.checks);
    }

    #[test]
    fn wrong_element_count_is_rejected() {
        let x = FiniteMetricSpace::from_fn(3, |i, j| (i as f64 - j as f64).abs()).unwrap();
        let ext = NearestPointExtender { m: 1, k: 1.0, norm: Norm::L1 };
        let r = refinement_from_extension(&ext, &x, &Cover::singletons(3), 1.0, RunOptions::default());
        assert!(r.is_ok());
        let r = refinement_from_extension(&ext, &x, &Cover::whole(3), 1.0, RunOptions::default());
        assert!(matches!(r, Err(SphereError::Precondition(_))));
    }
}
