//! Lifting a refiner for `(n+2)`-element covers to `(n+3)`-element covers.

use crate::check::Check;
use crate::covers::{lebesgue_number, refines_indexed, Cover};
use crate::metric::FiniteMetricSpace;

use super::{refinement_checks, Refiner, RunOptions, SphereError};

/// Result of [`lift_refinement`].
#[derive(Debug, Clone, PartialEq)]
pub struct LiftReport {
    /// `W'`, indexed like the input cover.
    pub cover: Cover,
    /// `A`: union of the balls `B(x, s/2)` with `B(x, s)` not inside the last element.
    pub a: Vec<usize>,
    /// Guaranteed factor `t`, a quarter of the inner refiner's.
    pub t: f64,
    pub oracle_called: bool,
    pub checks: Vec<Check>,
}

/// Refines an s-Lebesgue cover `{W_0, …, W_{n+2}}` to multiplicity `n+2`
/// and Lebesgue number `t·s`, keeping `W_{n+2}` and refining the rest on the
/// part of the space it does not swallow.
pub fn lift_refinement(
    inner: &dyn Refiner,
    space: &FiniteMetricSpace<f64>,
    w: &Cover,
    s: f64,
    opts: RunOptions,
) -> Result<LiftReport, SphereError> {
    let k = inner.elements();
    if w.len() != k + 1 {
        return Err(SphereError::Precondition(format!(
            "cover has {} elements, lifting a refiner for {k} needs {}",
            w.len(),
            k + 1
        )));
    }
    if w.n_points() != space.len() {
        return Err(crate::covers::CoverError::SpaceMismatch { cover: w.n_points(), space: space.len() }.into());
    }
    if !(s > 0.0 && s.is_finite()) {
        return Err(SphereError::Precondition(format!("scale s must be positive and finite, got {s}")));
    }
    if !lebesgue_number(space, w).at_least(&s) {
        return Err(SphereError::Precondition(format!("cover is not {s}-Lebesgue")));
    }
    let inside = inner.window().require("s/4", s / 4.0, opts.force)?;
    let t = inner.shrink_factor() / 4.0;
    let last = k;
    let n_points = space.len();

    let mut in_a = vec![false; n_points];
    for x in space.points() {
        let escapes = space.open_ball(x, &s).iter().any(|&y| !w.contains(last, y));
        if escapes {
            for y in space.open_ball(x, &(s / 2.0)) {
                in_a[y] = true;
            }
        }
    }
    let a: Vec<usize> = space.points().filter(|&x| in_a[x]).collect();
    let mut checks = Vec::new();

    let mut elements: Vec<Vec<usize>> = vec![Vec::new(); k + 1];
    elements[last] = w.element(last).to_vec();
    let oracle_called = !a.is_empty();
    if oracle_called {
        let widened: Vec<Vec<usize>> = (0..k)
            .map(|i| space.points().filter(|&x| !in_a[x] || w.contains(i, x)).collect())
            .collect();
        let widened = Cover::indexed(n_points, widened)?;
        checks.push(Check::ge("L(U') >= s/4", lebesgue_number(space, &widened).to_f64(), s / 4.0));
        let refined = inner.refine(space, &widened, s / 4.0)?;
        checks.extend(refinement_checks(space, &widened, &refined, k - 1, 4.0 * t * s / 4.0, inside));
        for (i, e) in elements.iter_mut().enumerate().take(k) {
            *e = refined.element(i).iter().copied().filter(|&x| in_a[x]).collect();
        }
    }
    let cover = Cover::indexed(n_points, elements)?;
    checks.push(Check::flag("refines (W'_i within W_i)", refines_indexed(&cover, w)));
    checks.push(Check::le("multiplicity <= n+2", cover.multiplicity() as f64, k as f64));
    checks.push(Check::ge("L(W') >= t*s", lebesgue_number(space, &cover).to_f64(), t * s).asserted_if(inside));
    Ok(LiftReport { cover, a, t, oracle_called, checks })
}
