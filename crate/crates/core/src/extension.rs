//! Lipschitz extension: McShane (inf-form) and Whitney (sup-form) extension
//! of real functions, coordinatewise extension into ℝⁿ followed by the
//! nearest-point retraction onto a simplex.

use crate::metric::{lipschitz_constant, FiniteMetricSpace, MetricError, Norm};
use crate::nerve::SimplexPoint;
use crate::scalar::{Scalar, TAU};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ExtensionError {
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error("the map has an empty domain")]
    EmptyDomain,
    #[error("domain point {0} is not a point of the space")]
    DomainOutOfRange(usize),
    #[error("domain point {0} is listed twice")]
    DuplicateDomainPoint(usize),
    #[error("{values} values for {domain} domain points")]
    ValueCount { domain: usize, values: usize },
    #[error("value at domain point {point} is outside the target: {reason}")]
    ValueOutsideTarget { point: usize, reason: String },
    #[error("vector of dimension {got} where {expected} was expected")]
    DimensionMismatch { got: usize, expected: usize },
    #[error("Lipschitz constant must be nonnegative, got {0}")]
    NegativeLambda(String),
    #[error("declared Lipschitz constant {declared} is below the measured {measured}")]
    DishonestLambda { declared: String, measured: String },
}

/// A map defined on a subset `A` of a finite metric space.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialMap<V> {
    pub domain: Vec<usize>,
    pub values: Vec<V>,
}

impl<V: Clone> PartialMap<V> {
    pub fn new(domain: Vec<usize>, values: Vec<V>) -> Result<Self, ExtensionError> {
        if domain.len() != values.len() {
            return Err(ExtensionError::ValueCount { domain: domain.len(), values: values.len() });
        }
        let mut seen = domain.clone();
        seen.sort_unstable();
        if let Some(w) = seen.windows(2).find(|w| w[0] == w[1]) {
            return Err(ExtensionError::DuplicateDomainPoint(w[0]));
        }
        Ok(Self { domain, values })
    }

    /// The map defined on every point of an `n`-point space.
    pub fn total(values: Vec<V>) -> Self {
        Self { domain: (0..values.len()).collect(), values }
    }

    pub fn len(&self) -> usize {
        self.domain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.domain.is_empty()
    }

    /// Value at `x`, if `x ∈ A`.
    pub fn get(&self, x: usize) -> Option<&V> {
        self.domain.iter().position(|&a| a == x).map(|k| &self.values[k])
    }

    /// Restriction to the points of `subset` that lie in the domain.
    pub fn restrict_to(&self, subset: &[usize]) -> Self {
        let (domain, values) = self
            .domain
            .iter()
            .zip(&self.values)
            .filter(|(a, _)| subset.contains(a))
            .map(|(&a, v)| (a, v.clone()))
            .unzip();
        Self { domain, values }
    }

    fn check_domain(&self, n: usize) -> Result<(), ExtensionError> {
        match self.domain.iter().find(|&&a| a >= n) {
            Some(&a) => Err(ExtensionError::DomainOutOfRange(a)),
            None => Ok(()),
        }
    }
}

/// A total map produced by an extension, with the Lipschitz bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct Extension<V, S = f64> {
    pub values: Vec<V>,
    pub lambda_declared: S,
    /// Lipschitz constant of the input map on its domain.
    pub lambda_on_domain: S,
    /// `max(declared, measured)`: the constant the construction used.
    pub lambda_effective: S,
    pub warnings: Vec<String>,
}

fn effective_lambda<S: Scalar>(declared: &S, measured: &S, warnings: &mut Vec<String>) -> Result<S, ExtensionError> {
    if *declared < S::zero() {
        return Err(ExtensionError::NegativeLambda(declared.to_exact_string()));
    }
    if measured.le_tol(declared) {
        Ok(declared.clone())
    } else {
        warnings.push(format!(
            "declared Lipschitz constant {} is below the measured {}; using the measured value",
            declared.to_exact_string(),
            measured.to_exact_string()
        ));
        Ok(measured.clone())
    }
}

/// Errors unless the declared constant is honest on the domain.
pub fn require_honest_lambda<S: Scalar>(measured: &S, declared: &S) -> Result<(), ExtensionError> {
    if measured.le_tol(declared) {
        Ok(())
    } else {
        Err(ExtensionError::DishonestLambda {
            declared: declared.to_exact_string(),
            measured: measured.to_exact_string(),
        })
    }
}

/// Lipschitz constant of a real-valued partial map.
pub fn real_lipschitz<S: Scalar>(space: &FiniteMetricSpace<S>, f: &PartialMap<S>) -> S {
    lipschitz_constant(space, &f.domain, |k, l| (f.values[k].clone() - f.values[l].clone()).abs())
}

fn real_extend<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    f: &PartialMap<S>,
    lambda: &S,
    inf_form: bool,
) -> Result<Extension<S, S>, ExtensionError> {
    if f.is_empty() {
        return Err(ExtensionError::EmptyDomain);
    }
    f.check_domain(space.len())?;
    let measured = real_lipschitz(space, f);
    let mut warnings = Vec::new();
    let lam = effective_lambda(lambda, &measured, &mut warnings)?;
    let values = space
        .points()
        .map(|x| {
            if let Some(v) = f.get(x) {
                return v.clone();
            }
            let candidates = f.domain.iter().zip(&f.values).map(|(&a, v)| {
                let slope = lam.clone() * space.dist(x, a).clone();
                if inf_form {
                    v.clone() + slope
                } else {
                    v.clone() - slope
                }
            });
            candidates
                .reduce(|a, b| if inf_form { S::min_of(a, b) } else { S::max_of(a, b) })
                .expect("nonempty domain")
        })
        .collect();
    Ok(Extension {
        values,
        lambda_declared: lambda.clone(),
        lambda_on_domain: measured,
        lambda_effective: lam,
        warnings,
    })
}

/// McShane extension `f̃(x) = min_{a ∈ A} (f(a) + λ·d(x, a))`.
///
/// With `λ ≥ Lip(f)` the formula reproduces `f` on `A`; points of `A` are
/// copied rather than recomputed so the restriction is bit-exact for floats.
pub fn mcshane_extend<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    f: &PartialMap<S>,
    lambda: &S,
) -> Result<Extension<S, S>, ExtensionError> {
    real_extend(space, f, lambda, true)
}

/// Whitney extension `f̃(x) = max_{a ∈ A} (f(a) - λ·d(x, a))`, the smallest
/// λ-Lipschitz extension (McShane's is the largest).
pub fn whitney_extend<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    f: &PartialMap<S>,
    lambda: &S,
) -> Result<Extension<S, S>, ExtensionError> {
    real_extend(space, f, lambda, false)
}

/// A closed convex target body in ℝⁿ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConvexBody {
    /// `{x ∈ ℝⁿ : x ≥ 0, Σx = 1}`, the simplex spanned by the basis vectors.
    ProbabilitySimplex { dim: usize },
    /// `{x ∈ ℝⁿ : x ≥ 0, Σx ≤ 1}`, the n-simplex with a vertex at the origin.
    CornerSimplex { dim: usize },
}

impl ConvexBody {
    /// Ambient dimension `n`.
    pub fn dim(&self) -> usize {
        match *self {
            ConvexBody::ProbabilitySimplex { dim } | ConvexBody::CornerSimplex { dim } => dim,
        }
    }

    /// Membership up to tolerance.
    pub fn contains(&self, v: &[f64]) -> Result<(), String> {
        if v.len() != self.dim() {
            return Err(format!("{} coordinates, expected {}", v.len(), self.dim()));
        }
        if let Some(w) = v.iter().find(|w| !w.is_finite() || **w < -TAU) {
            return Err(format!("coordinate {w} is negative"));
        }
        let total: f64 = v.iter().sum();
        let slack = TAU * v.len().max(1) as f64;
        match self {
            ConvexBody::ProbabilitySimplex { .. } if (total - 1.0).abs() > slack => {
                Err(format!("coordinates sum to {total}, not 1"))
            }
            ConvexBody::CornerSimplex { .. } if total > 1.0 + slack => {
                Err(format!("coordinates sum to {total} > 1"))
            }
            _ => Ok(()),
        }
    }

    /// l₂ nearest point of the body.
    pub fn project(&self, v: &[f64]) -> Vec<f64> {
        match self {
            ConvexBody::ProbabilitySimplex { .. } => project_onto_simplex(v),
            ConvexBody::CornerSimplex { .. } => {
                let clamped: Vec<f64> = v.iter().map(|x| x.max(0.0)).collect();
                if clamped.iter().sum::<f64>() <= 1.0 {
                    clamped
                } else {
                    project_onto_simplex(v)
                }
            }
        }
    }

    /// A point used as the constant extension of an empty map.
    pub fn base_point(&self) -> Vec<f64> {
        let mut p = vec![0.0; self.dim()];
        if let ConvexBody::ProbabilitySimplex { .. } = self {
            p[0] = 1.0;
        }
        p
    }

    /// Extension constant for a λ-Lipschitz map into this body: `√n` for l₂
    /// and `n²` for l₁.
    pub fn extension_factor(&self, norm: Norm) -> f64 {
        let n = self.dim() as f64;
        match norm {
            Norm::L2 => n.sqrt(),
            Norm::L1 => n * n,
        }
    }
}

/// Euclidean projection onto `{w ≥ 0, Σw = 1}` by sorting and thresholding.
pub fn project_onto_simplex(v: &[f64]) -> Vec<f64> {
    if v.is_empty() {
        return Vec::new();
    }
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut prefix = 0.0;
    let mut theta = 0.0;
    for (j, &u) in sorted.iter().enumerate() {
        prefix += u;
        let candidate = (prefix - 1.0) / (j + 1) as f64;
        if u - candidate > 0.0 {
            theta = candidate;
        }
    }
    let mut w: Vec<f64> = v.iter().map(|x| (x - theta).max(0.0)).collect();
    let total: f64 = w.iter().sum();
    if total > 0.0 {
        w.iter_mut().for_each(|x| *x /= total);
    }
    w
}

/// Projects a vector onto the standard simplex with `vertices` vertices.
pub fn project_to_simplex(v: &[f64], vertices: usize, norm: Norm) -> Result<SimplexPoint, ExtensionError> {
    if v.len() != vertices || vertices == 0 {
        return Err(ExtensionError::DimensionMismatch { got: v.len(), expected: vertices });
    }
    Ok(SimplexPoint::new(project_onto_simplex(v), norm))
}

/// Lipschitz constant of a vector-valued partial map.
pub fn vector_lipschitz(space: &FiniteMetricSpace<f64>, f: &PartialMap<Vec<f64>>, norm: Norm) -> f64 {
    lipschitz_constant(space, &f.domain, |k, l| norm.distance(&f.values[k], &f.values[l]))
}

/// Lipschitz constant of a total vector-valued map.
pub fn total_vector_lipschitz(space: &FiniteMetricSpace<f64>, values: &[Vec<f64>], norm: Norm) -> f64 {
    let domain: Vec<usize> = space.points().collect();
    lipschitz_constant(space, &domain, |k, l| norm.distance(&values[k], &values[l]))
}

/// Extends a λ-Lipschitz map `A → body` to all of `X`: McShane on each
/// coordinate, then the l₂ nearest-point retraction onto the body.
///
/// The result is `√n·λ`-Lipschitz for l₂ and `n²·λ`-Lipschitz for l₁.
/// Values on `A` are returned unchanged. An empty map extends to the
/// body's base point.
pub fn extend_into_convex(
    space: &FiniteMetricSpace<f64>,
    f: &PartialMap<Vec<f64>>,
    lambda: f64,
    body: ConvexBody,
    norm: Norm,
) -> Result<Extension<Vec<f64>>, ExtensionError> {
    f.check_domain(space.len())?;
    for (&a, v) in f.domain.iter().zip(&f.values) {
        body.contains(v).map_err(|reason| ExtensionError::ValueOutsideTarget { point: a, reason })?;
    }
    let measured = vector_lipschitz(space, f, norm);
    let mut warnings = Vec::new();
    let lam = effective_lambda(&lambda, &measured, &mut warnings)?;
    if f.is_empty() {
        return Ok(Extension {
            values: vec![body.base_point(); space.len()],
            lambda_declared: lambda,
            lambda_on_domain: 0.0,
            lambda_effective: lam,
            warnings,
        });
    }
    let n = body.dim();
    let values = space
        .points()
        .map(|x| {
            if let Some(v) = f.get(x) {
                return v.clone();
            }
            let raw: Vec<f64> = (0..n)
                .map(|i| {
                    f.domain
                        .iter()
                        .zip(&f.values)
                        .map(|(&a, v)| v[i] + lam * space.dist(x, a))
                        .fold(f64::INFINITY, f64::min)
                })
                .collect();
            body.project(&raw)
        })
        .collect();
    Ok(Extension { values, lambda_declared: lambda, lambda_on_domain: measured, lambda_effective: lam, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    #[test]
    fn mcshane_on_three_point_path() {
        let x = FiniteMetricSpace::from_fn(3, |i, j| Rational::from_i64((i as i64 - j as i64).abs())).unwrap();
        let f = PartialMap::new(vec![0, 2], vec![Rational::from_i64(0), Rational::from_i64(2)]).unwrap();
        let e = mcshane_extend(&x, &f, &Rational::from_i64(1)).unwrap();
        assert_eq!(e.values[1], Rational::from_i64(1));
        assert!(e.warnings.is_empty());
        let w = whitney_extend(&x, &f, &Rational::from_i64(1)).unwrap();
        assert_eq!(w.values[1], Rational::from_i64(1));
    }

    #[test]
    fn dishonest_lambda_is_raised_with_warning() {
        let x = FiniteMetricSpace::from_fn(3, |i, j| (i as f64 - j as f64).abs()).unwrap();
        let f = PartialMap::new(vec![0, 1], vec![0.0, 3.0]).unwrap();
        let e = mcshane_extend(&x, &f, &1.0).unwrap();
        assert_eq!(e.lambda_effective, 3.0);
        assert_eq!(e.warnings.len(), 1);
        assert!(require_honest_lambda(&e.lambda_on_domain, &1.0).is_err());
        assert!(matches!(mcshane_extend(&x, &PartialMap::new(vec![], vec![]).unwrap(), &1.0), Err(ExtensionError::EmptyDomain)));
    }

    #[test]
    fn projection_examples() {
        assert_eq!(project_onto_simplex(&[2.0, 0.0]), vec![1.0, 0.0]);
        assert_eq!(project_onto_simplex(&[0.8, 0.8]), vec![0.5, 0.5]);
        assert_eq!(project_onto_simplex(&[0.25, 0.75]), vec![0.25, 0.75]);
        assert!(project_to_simplex(&[1.0], 2, Norm::L2).is_err());
        let corner = ConvexBody::CornerSimplex { dim: 2 };
        assert_eq!(corner.project(&[0.2, -1.0]), vec![0.2, 0.0]);
        assert_eq!(corner.project(&[2.0, 0.0]), vec![1.0, 0.0]);
    }

    #[test]
    fn segment_extension_matches_real_mcshane() {
        let x = FiniteMetricSpace::from_fn(3, |i, j| (i as f64 - j as f64).abs()).unwrap();
        let f = PartialMap::new(vec![0, 2], vec![vec![0.0], vec![1.0]]).unwrap();
        let e = extend_into_convex(&x, &f, 0.5, ConvexBody::CornerSimplex { dim: 1 }, Norm::L2).unwrap();
        assert_eq!(e.values, vec![vec![0.0], vec![0.5], vec![1.0]]);
    }

    #[test]
    fn values_outside_body_are_rejected() {
        let x = FiniteMetricSpace::from_fn(2, |i, j| (i as f64 - j as f64).abs()).unwrap();
        let f = PartialMap::new(vec![0], vec![vec![0.7, 0.7]]).unwrap();
        let e = extend_into_convex(&x, &f, 1.0, ConvexBody::ProbabilitySimplex { dim: 2 }, Norm::L1);
        assert!(matches!(e, Err(ExtensionError::ValueOutsideTarget { point: 0, .. })));
    }
}
