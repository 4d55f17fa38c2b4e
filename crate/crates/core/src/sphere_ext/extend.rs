//! Sphere extension from cover refinements: extend into the simplex, then
//! push the interior out to the boundary by splicing the radial projection
//! with the partition of unity of a refined cover.

use crate::check::Check;
use crate::covers::{lebesgue_number, Cover};
use crate::extension::{extend_into_convex, vector_lipschitz, ConvexBody, PartialMap};
use crate::metric::{lipschitz_constant, FiniteMetricSpace, Norm};
use crate::nerve::{barycentric_map, map_lipschitz_constant, SimplexPoint};

use super::{
    check_sphere_value, extension_constant, image_check, lambda_window, refinement_checks,
    simplex_extension_factor, Refiner, RunOptions, SphereError,
};

/// Result of [`extension_from_refinement`].
#[derive(Debug, Clone, PartialEq)]
pub struct ExtensionFromRefinement {
    /// The extension `h`, one weight vector per point.
    pub values: Vec<Vec<f64>>,
    /// The simplex-valued extension `g`.
    pub g: Vec<Vec<f64>>,
    /// `α(x) = (m+2)·min_i g_i(x)`.
    pub alpha: Vec<f64>,
    pub u_cover: Cover,
    /// The refined cover, when the oracle was needed.
    pub v_cover: Option<Cover>,
    /// `r = 1/(12·s·λ·(m+2))`.
    pub r: f64,
    pub s: f64,
    pub t: f64,
    /// `C = 50(m+2)²s + 150s²(m+2)⁵/t`.
    pub constant: f64,
    pub lambda_effective: f64,
    /// Measured `Lip(h)`.
    pub measured_lip: f64,
    pub oracle_called: bool,
    pub checks: Vec<Check>,
    pub warnings: Vec<String>,
}

/// `β(z)`: 0 below 1/3, `3z - 1` on `[1/3, 2/3]`, 1 above.
pub fn cutoff(z: f64) -> f64 {
    (3.0 * z - 1.0).clamp(0.0, 1.0)
}

/// Extends a λ-Lipschitz `f: A → ∂Δ^{m+1}` to the whole space using a
/// refiner for `(m+2)`-element covers.
pub fn extension_from_refinement(
    refiner: &dyn Refiner,
    space: &FiniteMetricSpace<f64>,
    f: &PartialMap<Vec<f64>>,
    lambda: f64,
    norm: Norm,
    opts: RunOptions,
) -> Result<ExtensionFromRefinement, SphereError> {
    let k = refiner.elements();
    if k < 2 {
        return Err(SphereError::Precondition("refiner must accept covers of at least 2 elements".into()));
    }
    let m = k - 2;
    for (&a, v) in f.domain.iter().zip(&f.values) {
        check_sphere_value(v, k)
            .map_err(|e| SphereError::Precondition(format!("value at point {a} is not on the sphere: {e}")))?;
    }
    let s = simplex_extension_factor(norm, k);
    let t = refiner.shrink_factor();
    let constant = extension_constant(m, s, t);
    let mut warnings = Vec::new();

    let ext = extend_into_convex(space, f, lambda, ConvexBody::ProbabilitySimplex { dim: k }, norm)?;
    warnings.extend(ext.warnings.iter().cloned());
    let lam = ext.lambda_effective;
    let g = ext.values;
    let mut checks = vec![Check::le("Lip(g) <= s*lambda", vector_lipschitz_total(space, &g, norm), s * lam)];

    let mins: Vec<f64> = g.iter().map(|v| v.iter().copied().fold(f64::INFINITY, f64::min)).collect();
    let alpha: Vec<f64> = mins.iter().map(|mn| k as f64 * mn).collect();
    let psi: Vec<Vec<f64>> = g.iter().zip(&mins).map(|(v, mn)| v.iter().map(|gi| gi - mn).collect()).collect();
    let all_points: Vec<usize> = space.points().collect();
    checks.push(
        Check::le(
            "Lip(alpha) <= (m+2)*s*lambda",
            lipschitz_constant(space, &all_points, |a, b| (alpha[a] - alpha[b]).abs()),
            k as f64 * s * lam,
        )
        .informational(),
    );

    let u_elements: Vec<Vec<usize>> = (0..k)
        .map(|i| space.points().filter(|&x| psi[x][i] > 0.0 || alpha[x] > 2.0 / 3.0).collect())
        .collect();
    let u_cover = Cover::indexed(space.len(), u_elements)?;
    let r = 1.0 / (12.0 * s * lam * k as f64);
    checks.push(Check::ge("L(U) >= 1/(12*s*lambda*(m+2))", lebesgue_number(space, &u_cover).to_f64(), r));

    let window = lambda_window(refiner.window(), m, s);
    let needs_oracle = alpha.iter().any(|&a| cutoff(a) > 0.0);
    let mut inside = window.contains(lam);
    let mut v_cover = None;
    let mut phi: Vec<Vec<f64>> = vec![vec![0.0; k]; space.len()];
    if needs_oracle {
        inside = window.require("lambda", lam, opts.force)?;
        let v = refiner.refine(space, &u_cover, r)?;
        checks.extend(refinement_checks(space, &u_cover, &v, m + 1, t * r, inside));
        let points = barycentric_map(space, &v, norm)?;
        let lip_phi = map_lipschitz_constant(space, &all_points, &points);
        checks.push(
            Check::le("Lip(phi) <= 48*s*lambda*(m+2)^3/t", lip_phi, 48.0 * s * lam * (k as f64).powi(3) / t)
                .asserted_if(inside),
        );
        phi = points.into_iter().map(|p: SimplexPoint| p.weights).collect();
        v_cover = Some(v);
    }
    checks.push(Check::flag("lambda inside extender window", inside).asserted_if(needs_oracle && !opts.force));

    let mut impossible = Vec::new();
    let values: Vec<Vec<f64>> = space
        .points()
        .map(|x| {
            if let Some(v) = f.get(x) {
                return v.clone();
            }
            let beta = cutoff(alpha[x]);
            if beta > 0.0 && beta < 1.0 && psi[x].iter().all(|&p| p > 0.0) {
                impossible.push(x);
            }
            let radial = if beta < 1.0 { (1.0 - beta) / (1.0 - alpha[x]) } else { 0.0 };
            (0..k).map(|i| psi[x][i] * radial + beta * phi[x][i]).collect()
        })
        .collect();

    let restricts = f.domain.iter().zip(&f.values).all(|(&a, v)| {
        values[a].iter().zip(v).all(|(p, q)| p.to_bits() == q.to_bits())
    });
    checks.push(Check::flag("h|A = f exactly", restricts));
    checks.push(image_check("image(h) in boundary of simplex", &values, k));
    let mut impossible_check = Check::flag("no splice point has every psi_i > 0", impossible.is_empty());
    if let Some(x) = impossible.first() {
        impossible_check = impossible_check.with_witness(format!("point {x}"));
    }
    checks.push(impossible_check);
    let measured_lip = vector_lipschitz_total(space, &values, norm);
    checks.push(Check::le("Lip(h) <= C*lambda", measured_lip, constant * lam).asserted_if(inside || !needs_oracle));

    Ok(ExtensionFromRefinement {
        values,
        g,
        alpha,
        u_cover,
        v_cover,
        r,
        s,
        t,
        constant,
        lambda_effective: lam,
        measured_lip,
        oracle_called: needs_oracle,
        checks,
        warnings,
    })
}

fn vector_lipschitz_total(space: &FiniteMetricSpace<f64>, values: &[Vec<f64>], norm: Norm) -> f64 {
    vector_lipschitz(space, &PartialMap::total(values.to_vec()), norm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::check::all_pass;
    use crate::sphere_ext::CoverRefiner;

    fn path(n: usize, step: f64) -> FiniteMetricSpace<f64> {
        FiniteMetricSpace::from_fn(n, |i, j| step * (i as f64 - j as f64).abs()).unwrap()
    }

    #[test]
    fn cutoff_shape() {
        assert_eq!(cutoff(0.2), 0.0);
        assert_eq!(cutoff(0.5), 0.5);
        assert_eq!(cutoff(0.9), 1.0);
    }

    #[test]
    fn full_domain_is_returned_unchanged() {
        let x = path(3, 1.0);
        let f = PartialMap::total(vec![vec![1.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]);
        let refiner = CoverRefiner::new(&x, Cover::singletons(3), 2, 10.0).unwrap();
        let out = extension_from_refinement(&refiner, &x, &f, 1.0, Norm::L1, RunOptions::default()).unwrap();
        assert_eq!(out.values, f.values);
        assert!(!out.oracle_called);
        assert!(all_pass(&out.checks), "{:?}", out.checks);
    }

    #[test]
    fn opposite_vertices_on_a_long_path() {
        let x = path(10, 1.0);
        let f = PartialMap::new(vec![0, 9], vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let lambda = 2.0 / 9.0;
        let s = simplex_extension_factor(Norm::L2, 2);
        let r = 1.0 / (12.0 * s * lambda * 2.0);
        let refiner = CoverRefiner::new(&x, Cover::singletons(10), 2, 2.0 * r).unwrap();
        let out = extension_from_refinement(&refiner, &x, &f, lambda, Norm::L2, RunOptions::default()).unwrap();
        assert!(out.oracle_called);
        assert!(all_pass(&out.checks), "{:?}", out.checks);
        assert_eq!(out.values[0], vec![1.0, 0.0]);
        assert_eq!(out.values[9], vec![0.0, 1.0]);
    }
}
