//! Nerve surgery: lower the multiplicity of a decomposition's cover by one
//! using a sphere extender on every top simplex of the nerve.

use serde::Serialize;

use crate::check::Check;
use crate::covers::{check_decomposition, lebesgue_number, mesh, FamilyDecomposition};
use crate::extension::PartialMap;
use crate::metric::FiniteMetricSpace;
use crate::nerve::{barycentric_map, build_nerve, map_lipschitz_constant, star_preimages, SimplexPoint, StarCover};

use super::{check_sphere_value, RunOptions, SphereError, SphereExtender};

/// What happened on one top simplex.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimplexSurgery {
    pub simplex: Vec<usize>,
    pub interior_points: usize,
    pub boundary_points: usize,
    pub measured_lip: f64,
}

/// Result of [`nerve_surgery_refine`].
#[derive(Debug, Clone, PartialEq)]
pub struct SurgeryReport {
    pub cover: StarCover,
    /// Pasted map into the nerve, one weight vector per point.
    pub g: Vec<Vec<f64>>,
    /// `λ = 4(n+2)²/r`.
    pub lambda: f64,
    /// Extender constant `k`.
    pub k: f64,
    /// `c = mesh(U)/r` of the input decomposition.
    pub c: f64,
    /// `d = r/(4k(n+3)³)`.
    pub d: f64,
    pub f_lip: f64,
    pub g_lip: f64,
    pub simplices: Vec<SimplexSurgery>,
    pub checks: Vec<Check>,
}

/// Replaces the barycentric map of a decomposition cover (with `n+2`
/// families and Lebesgue number at least `r`) on each top simplex by an
/// extension of its boundary values, then takes star preimages.
pub fn nerve_surgery_refine(
    ext: &dyn SphereExtender,
    space: &FiniteMetricSpace<f64>,
    decomp: &FamilyDecomposition<f64>,
    opts: RunOptions,
) -> Result<SurgeryReport, SphereError> {
    let n = ext.sphere_dim();
    let top = n + 2;
    if decomp.families > top {
        return Err(SphereError::Precondition(format!(
            "decomposition has {} families, surgery with S^{n} needs at most {top}",
            decomp.families
        )));
    }
    let r = decomp.r;
    let report = check_decomposition(space, decomp)?;
    if let Some((a, b, _)) = report.violating_pair {
        return Err(SphereError::Precondition(format!("elements {a} and {b} of one family are closer than r")));
    }
    let cover = &decomp.cover;
    if !lebesgue_number(space, cover).at_least(&r) {
        return Err(SphereError::Precondition(format!("decomposition cover is not {r}-Lebesgue")));
    }
    let c = report.mesh / r;
    let k = ext.constant();
    let norm = ext.norm();
    let lambda = 4.0 * (top * top) as f64 / r;
    let inside = ext.window().require("4(n+2)^2/r", lambda, opts.force)?;

    let f = barycentric_map(space, cover, norm)?;
    let all: Vec<usize> = space.points().collect();
    let f_lip = map_lipschitz_constant(space, &all, &f);
    let mut checks = vec![Check::le("Lip(f) <= 4(n+2)^2/r", f_lip, lambda)];
    let nerve = build_nerve(cover)?;
    let supports: Vec<Vec<usize>> = f.iter().map(SimplexPoint::support).collect();
    let mut g: Vec<Vec<f64>> = f.iter().map(|p| p.weights.clone()).collect();
    let mut simplices = Vec::new();
    let mut pasting_ok = true;

    for simplex in nerve.simplices_of_dimension(top - 1) {
        let interior: Vec<usize> = all.iter().copied().filter(|&x| supports[x] == *simplex).collect();
        if interior.is_empty() {
            continue;
        }
        let piece: Vec<usize> =
            all.iter().copied().filter(|&x| supports[x].iter().all(|v| simplex.contains(v))).collect();
        let sub = space.subspace(&piece)?;
        let local = |x: usize| -> Vec<f64> { simplex.iter().map(|&v| f[x].weights[v]).collect() };
        let boundary: Vec<usize> = (0..piece.len()).filter(|&i| supports[piece[i]] != *simplex).collect();
        let partial = PartialMap::new(boundary.clone(), boundary.iter().map(|&i| local(piece[i])).collect())?;
        let out = ext.extend(&sub, &partial, lambda)?;
        if out.values.len() != piece.len() {
            return Err(SphereError::OracleRefused(format!("extender returned {} values", out.values.len())));
        }
        for (i, &x) in piece.iter().enumerate() {
            check_sphere_value(&out.values[i], top).map_err(|e| {
                SphereError::OracleRefused(format!("value at point {x} on simplex {simplex:?}: {e}"))
            })?;
            if supports[x] != *simplex {
                pasting_ok &= out.values[i] == local(x);
                continue;
            }
            let mut weights = vec![0.0; cover.len()];
            for (j, &v) in simplex.iter().enumerate() {
                weights[v] = out.values[i][j];
            }
            g[x] = weights;
        }
        simplices.push(SimplexSurgery {
            simplex: simplex.clone(),
            interior_points: interior.len(),
            boundary_points: boundary.len(),
            measured_lip: out.measured_lip,
        });
    }
    checks.push(Check::flag("extensions agree with f on shared faces", pasting_ok));
    for s in &simplices {
        checks.push(
            Check::le(format!("Lip(g on simplex {:?}) <= k*lambda", s.simplex), s.measured_lip, k * lambda)
                .asserted_if(inside),
        );
    }
    let g_points: Vec<SimplexPoint> = g.iter().map(|w| SimplexPoint::new(w.clone(), norm)).collect();
    let g_lip = map_lipschitz_constant(space, &all, &g_points);
    let stars = star_preimages(&g_points, &nerve)?;
    let n3 = (n + 3) as f64;
    let d = r / (4.0 * k * n3.powi(3));
    checks.push(Check::le("multiplicity <= n+1", stars.cover.multiplicity() as f64, (n + 1) as f64));
    checks.push(Check::ge("L(V) >= r/(4k(n+3)^3)", lebesgue_number(space, &stars.cover).to_f64(), d).asserted_if(inside));
    checks.push(Check::le("mesh(V) <= 4*c*r", mesh(space, &stars.cover), 4.0 * c * r));
    Ok(SurgeryReport { cover: stars, g, lambda, k, c, d, f_lip, g_lip, simplices, checks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::check::all_pass;
    use crate::covers::Cover;
    use crate::metric::Norm;
    use crate::sphere_ext::NearestPointExtender;

    #[test]
    fn no_top_simplex_means_supports_of_f() {
        let x = FiniteMetricSpace::from_fn(4, |i, j| (i as f64 - j as f64).abs()).unwrap();
        let d = FamilyDecomposition::new(Cover::singletons(4), vec![0; 4], 1, 1.0).unwrap();
        let ext = NearestPointExtender { m: 0, k: 1.0, norm: Norm::L1 };
        let out = nerve_surgery_refine(&ext, &x, &d, RunOptions::default()).unwrap();
        assert!(out.simplices.is_empty());
        assert_eq!(out.cover.cover, Cover::singletons(4));
        assert!(all_pass(&out.checks), "{:?}", out.checks);
    }
}
