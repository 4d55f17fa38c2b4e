//! Finite metric spaces, axiom validation, the `max(d, ε)` / `min(d, ε)`
//! functors, Lipschitz constants of maps between finite spaces, and the
//! l₁/l₂ geometry of ℝⁿ.

use std::collections::HashMap;

use serde::Serialize;

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MetricError {
    #[error("a metric space needs at least one point")]
    Empty,
    #[error("distance table has {rows} rows but {labels} labels")]
    RowCount { rows: usize, labels: usize },
    #[error("row {row} has {len} entries, expected {expected}")]
    NotSquare { row: usize, len: usize, expected: usize },
    #[error("duplicate label `{0}`")]
    DuplicateLabel(String),
    #[error("distance ({row}, {col}) is not a finite number")]
    NonFinite { row: usize, col: usize },
    #[error("scale must be positive, got {0}")]
    NonPositiveScale(String),
    #[error("label sets differ: `{0}` is missing from the second space")]
    LabelMismatch(String),
    #[error("point index {index} out of range for a space of {len} points")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("distance table violates the metric axioms ({} violation(s))", .0.len())]
    NotAMetric(Vec<Violation>),
    #[error("vector dimensions differ: {0} vs {1}")]
    DimensionMismatch(usize, usize),
}

/// One failed metric axiom, with witness point indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "axiom", rename_all = "snake_case")]
pub enum Violation {
    /// `d(x, x) != 0`.
    Diagonal { x: usize },
    /// `d(x, y) < 0`.
    Negative { x: usize, y: usize },
    /// `d(x, y) = 0` for `x != y`.
    Indiscernible { x: usize, y: usize },
    /// `d(x, y) != d(y, x)`.
    Asymmetric { x: usize, y: usize },
    /// `d(x, z) > d(x, via) + d(via, z)`.
    Triangle { x: usize, via: usize, z: usize },
}

impl Violation {
    pub fn witnesses(&self) -> Vec<usize> {
        match *self {
            Violation::Diagonal { x } => vec![x],
            Violation::Negative { x, y }
            | Violation::Indiscernible { x, y }
            | Violation::Asymmetric { x, y } => vec![x, y],
            Violation::Triangle { x, via, z } => vec![x, via, z],
        }
    }
}

/// Labelled points with a full pairwise distance table.
///
/// Construction only checks the table's shape; [`FiniteMetricSpace::validate`]
/// checks the axioms and [`FiniteMetricSpace::metric`] does both.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMetricSpace<S = f64> {
    labels: Vec<String>,
    dist: Vec<S>,
}

impl<S: Scalar> FiniteMetricSpace<S> {
    /// Builds a space from labels and a row-major table, checking shape only.
    pub fn new(labels: Vec<String>, rows: Vec<Vec<S>>) -> Result<Self, MetricError> {
        let n = labels.len();
        if n == 0 {
            return Err(MetricError::Empty);
        }
        if rows.len() != n {
            return Err(MetricError::RowCount { rows: rows.len(), labels: n });
        }
        let mut seen = HashMap::with_capacity(n);
        for (i, l) in labels.iter().enumerate() {
            if seen.insert(l.as_str(), i).is_some() {
                return Err(MetricError::DuplicateLabel(l.clone()));
            }
        }
        let mut dist = Vec::with_capacity(n * n);
        for (row, values) in rows.into_iter().enumerate() {
            if values.len() != n {
                return Err(MetricError::NotSquare { row, len: values.len(), expected: n });
            }
            for (col, v) in values.into_iter().enumerate() {
                if !v.to_f64().is_finite() && !S::EXACT {
                    return Err(MetricError::NonFinite { row, col });
                }
                dist.push(v);
            }
        }
        Ok(Self { labels, dist })
    }

    /// Builds a space and rejects tables that are not metrics.
    pub fn metric(labels: Vec<String>, rows: Vec<Vec<S>>) -> Result<Self, MetricError> {
        let space = Self::new(labels, rows)?;
        let violations = space.validate();
        if violations.is_empty() {
            Ok(space)
        } else {
            Err(MetricError::NotAMetric(violations))
        }
    }

    /// Labels `"0"`, `"1"`, ... for a table given by a distance function.
    pub fn from_fn(n: usize, mut d: impl FnMut(usize, usize) -> S) -> Result<Self, MetricError> {
        let labels = (0..n).map(|i| i.to_string()).collect();
        let rows = (0..n).map(|i| (0..n).map(|j| d(i, j)).collect()).collect();
        Self::new(labels, rows)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> &S {
        &self.dist[i * self.len() + j]
    }

    pub fn rows(&self) -> Vec<Vec<S>> {
        self.dist.chunks(self.len()).map(|r| r.to_vec()).collect()
    }

    pub fn points(&self) -> std::ops::Range<usize> {
        0..self.len()
    }

    /// Every violated axiom; empty iff the table is a metric.
    ///
    /// Float tables are compared with the global tolerance; a triangle
    /// violation is reported once per unordered endpoint pair and midpoint.
    pub fn validate(&self) -> Vec<Violation> {
        let n = self.len();
        let zero = S::zero();
        let mut out = Vec::new();
        for x in 0..n {
            if !self.dist(x, x).eq_tol(&zero) {
                out.push(Violation::Diagonal { x });
            }
        }
        for x in 0..n {
            for y in (x + 1)..n {
                let (a, b) = (self.dist(x, y), self.dist(y, x));
                if a.lt_strict(&zero) || b.lt_strict(&zero) {
                    out.push(Violation::Negative { x, y });
                } else if a.le_tol(&zero) || b.le_tol(&zero) {
                    out.push(Violation::Indiscernible { x, y });
                }
                if !a.eq_tol(b) {
                    out.push(Violation::Asymmetric { x, y });
                }
            }
        }
        for x in 0..n {
            for z in (x + 1)..n {
                let direct = self.dist(x, z);
                for via in 0..n {
                    if via == x || via == z {
                        continue;
                    }
                    let detour = self.dist(x, via).clone() + self.dist(via, z).clone();
                    if !direct.le_tol(&detour) {
                        out.push(Violation::Triangle { x, via, z });
                    }
                }
            }
        }
        out
    }

    pub fn is_metric(&self) -> bool {
        self.validate().is_empty()
    }

    fn check_index(&self, index: usize) -> Result<(), MetricError> {
        if index < self.len() {
            Ok(())
        } else {
            Err(MetricError::IndexOutOfRange { index, len: self.len() })
        }
    }

    /// The subspace on `points` (in the given order).
    pub fn subspace(&self, points: &[usize]) -> Result<Self, MetricError> {
        if points.is_empty() {
            return Err(MetricError::Empty);
        }
        for &p in points {
            self.check_index(p)?;
        }
        let labels = points.iter().map(|&p| self.labels[p].clone()).collect();
        let rows = points
            .iter()
            .map(|&i| points.iter().map(|&j| self.dist(i, j).clone()).collect())
            .collect();
        Self::new(labels, rows)
    }

    fn map_off_diagonal(&self, f: impl Fn(&S) -> S) -> Self {
        let n = self.len();
        let dist = (0..n * n)
            .map(|k| if k / n == k % n { self.dist[k].clone() } else { f(&self.dist[k]) })
            .collect();
        Self { labels: self.labels.clone(), dist }
    }

    /// Off-diagonal entries become `max(d(x, y), ε)`; the diagonal is untouched.
    pub fn transform_max(&self, epsilon: &S) -> Result<Self, MetricError> {
        positive(epsilon)?;
        Ok(self.map_off_diagonal(|d| S::max_of(d.clone(), epsilon.clone())))
    }

    /// Off-diagonal entries become `min(d(x, y), ε)`; the diagonal is untouched.
    pub fn transform_min(&self, epsilon: &S) -> Result<Self, MetricError> {
        positive(epsilon)?;
        Ok(self.map_off_diagonal(|d| S::min_of(d.clone(), epsilon.clone())))
    }

    pub fn map_scalar<T: Scalar>(&self, f: impl Fn(&S) -> T) -> FiniteMetricSpace<T> {
        FiniteMetricSpace { labels: self.labels.clone(), dist: self.dist.iter().map(f).collect() }
    }

    pub fn to_f64(&self) -> FiniteMetricSpace<f64> {
        self.map_scalar(|d| d.to_f64())
    }

    pub fn diameter(&self) -> S {
        self.dist.iter().cloned().fold(S::zero(), S::max_of)
    }

    /// The exact smallest positive distance (the discreteness constant);
    /// `None` for a one-point space.
    pub fn min_positive_distance(&self) -> Option<S> {
        let n = self.len();
        let mut best: Option<S> = None;
        for i in 0..n {
            for j in (i + 1)..n {
                let d = self.dist(i, j);
                if *d > S::zero() && best.as_ref().is_none_or(|b| d < b) {
                    best = Some(d.clone());
                }
            }
        }
        best
    }

    /// Sorted distinct positive distances (the scales at which covers of a
    /// finite space change combinatorially).
    pub fn distinct_distances(&self) -> Vec<S> {
        let n = self.len();
        let mut all: Vec<S> = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                let d = self.dist(i, j);
                if *d > S::zero() {
                    all.push(d.clone());
                }
            }
        }
        all.sort_by(|a, b| a.partial_cmp(b).expect("distances are comparable"));
        all.dedup_by(|a, b| a == b);
        all
    }

    /// Diameter of a point set; zero for empty or singleton sets.
    pub fn set_diameter(&self, set: &[usize]) -> S {
        let mut best = S::zero();
        for (k, &a) in set.iter().enumerate() {
            for &b in &set[k + 1..] {
                if *self.dist(a, b) > best {
                    best = self.dist(a, b).clone();
                }
            }
        }
        best
    }

    /// Distance between two nonempty point sets (`None` if either is empty).
    pub fn set_distance(&self, a: &[usize], b: &[usize]) -> Option<S> {
        let mut best: Option<S> = None;
        for &x in a {
            for &y in b {
                let d = self.dist(x, y);
                if best.as_ref().is_none_or(|v| d < v) {
                    best = Some(d.clone());
                }
            }
        }
        best
    }

    /// Distance from a point to a set (`None` if the set is empty).
    pub fn point_set_distance(&self, x: usize, set: impl IntoIterator<Item = usize>) -> Option<S> {
        set.into_iter().map(|y| self.dist(x, y).clone()).fold(None, |acc, d| match acc {
            None => Some(d),
            Some(v) => Some(S::min_of(v, d)),
        })
    }

    /// Points at distance strictly less than `radius` from `center`.
    pub fn open_ball(&self, center: usize, radius: &S) -> Vec<usize> {
        self.points().filter(|&y| self.dist(center, y) < radius).collect()
    }
}

fn positive<S: Scalar>(v: &S) -> Result<(), MetricError> {
    if *v > S::zero() {
        Ok(())
    } else {
        Err(MetricError::NonPositiveScale(v.to_exact_string()))
    }
}

/// Exact `max_{x≠y} d_Y(f x, f y) / d_X(x, y)` over the listed domain points.
///
/// `image_dist(k, l)` is the target distance between the images of
/// `domain[k]` and `domain[l]`. Pairs at source distance zero are skipped;
/// singletons and constant maps give zero.
pub fn lipschitz_constant<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    domain: &[usize],
    mut image_dist: impl FnMut(usize, usize) -> S,
) -> S {
    let mut best = S::zero();
    for k in 0..domain.len() {
        for l in (k + 1)..domain.len() {
            let d = space.dist(domain[k], domain[l]);
            if *d > S::zero() {
                let ratio = image_dist(k, l) / d.clone();
                if ratio > best {
                    best = ratio;
                }
            }
        }
    }
    best
}

/// A map from a subset of one finite space into another finite space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteMap {
    pub domain: Vec<usize>,
    pub images: Vec<usize>,
}

impl FiniteMap {
    pub fn total(images: Vec<usize>) -> Self {
        Self { domain: (0..images.len()).collect(), images }
    }

    pub fn identity(n: usize) -> Self {
        Self::total((0..n).collect())
    }

    pub fn lipschitz_constant<S: Scalar>(
        &self,
        source: &FiniteMetricSpace<S>,
        target: &FiniteMetricSpace<S>,
    ) -> S {
        lipschitz_constant(source, &self.domain, |k, l| {
            target.dist(self.images[k], self.images[l]).clone()
        })
    }

    /// `then ∘ self`, for a total `then` on the target space.
    pub fn compose(&self, then: &FiniteMap) -> FiniteMap {
        let lookup: HashMap<usize, usize> =
            then.domain.iter().copied().zip(then.images.iter().copied()).collect();
        let mut domain = Vec::new();
        let mut images = Vec::new();
        for (&x, y) in self.domain.iter().zip(&self.images) {
            if let Some(&z) = lookup.get(y) {
                domain.push(x);
                images.push(z);
            }
        }
        FiniteMap { domain, images }
    }
}

/// Best constants in `μ·d_a ≤ d_b ≤ λ·d_a` for the identity between two
/// metrics on the same labels.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BiLipschitzBounds<S> {
    pub mu: S,
    pub lambda: S,
}

/// Identity `(X, a) → (X, b)`; labels are matched by name.
///
/// A one-point space has no pairs and reports `(1, 1)`.
pub fn bilipschitz_bounds<S: Scalar>(
    a: &FiniteMetricSpace<S>,
    b: &FiniteMetricSpace<S>,
) -> Result<BiLipschitzBounds<S>, MetricError> {
    if a.len() != b.len() {
        let missing = a
            .labels()
            .iter()
            .find(|l| b.index_of(l).is_none())
            .or_else(|| b.labels().iter().find(|l| a.index_of(l).is_none()))
            .cloned()
            .unwrap_or_default();
        return Err(MetricError::LabelMismatch(missing));
    }
    let mut to_b = Vec::with_capacity(a.len());
    for l in a.labels() {
        to_b.push(b.index_of(l).ok_or_else(|| MetricError::LabelMismatch(l.clone()))?);
    }
    let mut ratios = Vec::new();
    for i in 0..a.len() {
        for j in (i + 1)..a.len() {
            let da = a.dist(i, j);
            if *da > S::zero() {
                ratios.push(b.dist(to_b[i], to_b[j]).clone() / da.clone());
            }
        }
    }
    let mut it = ratios.into_iter();
    let Some(first) = it.next() else {
        return Ok(BiLipschitzBounds { mu: S::one(), lambda: S::one() });
    };
    let (mu, lambda) = it.fold((first.clone(), first), |(lo, hi), r| {
        (S::min_of(lo, r.clone()), S::max_of(hi, r))
    });
    Ok(BiLipschitzBounds { mu, lambda })
}

/// The ε and δ constants of the micro/macro functors.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleParams<S = f64> {
    epsilon: S,
    delta: S,
}

impl<S: Scalar> ScaleParams<S> {
    pub fn new(epsilon: S, delta: S) -> Result<Self, MetricError> {
        positive(&epsilon)?;
        positive(&delta)?;
        Ok(Self { epsilon, delta })
    }

    pub fn epsilon(&self) -> &S {
        &self.epsilon
    }

    pub fn delta(&self) -> &S {
        &self.delta
    }

    /// `1 + ε/δ`: Lipschitz constant of `(X, d) → (X, max(d, ε))` on a
    /// δ-discrete space, and of `(X, min(d, ε)) → (X, d)` on a δ-bounded one
    /// with the roles of the two constants swapped.
    pub fn functor_constant(&self) -> S {
        S::one() + self.epsilon.clone() / self.delta.clone()
    }
}

/// Norm used on ℝⁿ and on simplices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Norm {
    #[default]
    L1,
    L2,
}

impl Norm {
    pub fn distance(self, a: &[f64], b: &[f64]) -> f64 {
        debug_assert_eq!(a.len(), b.len());
        match self {
            Norm::L1 => a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum(),
            Norm::L2 => a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt(),
        }
    }
}

impl std::str::FromStr for Norm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "l1" => Ok(Norm::L1),
            "l2" => Ok(Norm::L2),
            other => Err(format!("unknown norm `{other}` (expected l1 or l2)")),
        }
    }
}

/// A point of ℝⁿ tagged with the norm it is measured in.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorPoint {
    pub coords: Vec<f64>,
    pub norm: Norm,
}

impl VectorPoint {
    pub fn new(coords: Vec<f64>, norm: Norm) -> Self {
        Self { coords, norm }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn distance(&self, other: &VectorPoint) -> Result<f64, MetricError> {
        if self.dim() != other.dim() {
            return Err(MetricError::DimensionMismatch(self.dim(), other.dim()));
        }
        Ok(self.norm.distance(&self.coords, &other.coords))
    }
}

/// Materializes the distance table of a point cloud.
pub fn point_cloud(points: &[Vec<f64>], norm: Norm) -> Result<FiniteMetricSpace<f64>, MetricError> {
    let Some(first) = points.first() else {
        return Err(MetricError::Empty);
    };
    for p in points {
        if p.len() != first.len() {
            return Err(MetricError::DimensionMismatch(first.len(), p.len()));
        }
    }
    FiniteMetricSpace::from_fn(points.len(), |i, j| norm.distance(&points[i], &points[j]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn line(xs: &[i64]) -> FiniteMetricSpace<Rational> {
        FiniteMetricSpace::from_fn(xs.len(), |i, j| Rational::from_i64((xs[i] - xs[j]).abs())).unwrap()
    }

    fn q(n: i64) -> Rational {
        Rational::from_i64(n)
    }

    #[test]
    fn singleton_is_valid() {
        let s = FiniteMetricSpace::new(vec!["a".into()], vec![vec![0.0]]).unwrap();
        assert!(s.validate().is_empty());
        assert_eq!(s.min_positive_distance(), None);
    }

    #[test]
    fn reports_single_triangle_violation() {
        let s = FiniteMetricSpace::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![vec![0.0, 1.0, 5.0], vec![1.0, 0.0, 1.0], vec![5.0, 1.0, 0.0]],
        )
        .unwrap();
        assert_eq!(s.validate(), vec![Violation::Triangle { x: 0, via: 1, z: 2 }]);
    }

    #[test]
    fn structural_errors_are_distinct() {
        let e = FiniteMetricSpace::<f64>::new(vec!["a".into(), "b".into()], vec![vec![0.0, 1.0]]);
        assert!(matches!(e, Err(MetricError::RowCount { .. })));
        let e = FiniteMetricSpace::<f64>::new(vec!["a".into()], vec![vec![0.0, 1.0]]);
        assert!(matches!(e, Err(MetricError::NotSquare { .. })));
        assert!(matches!(FiniteMetricSpace::<f64>::new(vec![], vec![]), Err(MetricError::Empty)));
        let e = FiniteMetricSpace::new(vec!["a".into(), "a".into()], vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
        assert!(matches!(e, Err(MetricError::DuplicateLabel(_))));
    }

    #[test]
    fn flags_asymmetry_and_zero_distances() {
        let s = FiniteMetricSpace::new(
            vec!["a".into(), "b".into()],
            vec![vec![0.0, 1.0], vec![2.0, 0.0]],
        )
        .unwrap();
        assert!(s.validate().contains(&Violation::Asymmetric { x: 0, y: 1 }));
        let s = FiniteMetricSpace::new(
            vec!["a".into(), "b".into()],
            vec![vec![0.0, 0.0], vec![0.0, 0.0]],
        )
        .unwrap();
        assert_eq!(s.validate(), vec![Violation::Indiscernible { x: 0, y: 1 }]);
    }

    #[test]
    fn max_transform_on_line() {
        let s = line(&[0, 1, 3]);
        let t = s.transform_max(&q(2)).unwrap();
        assert_eq!(t.dist(0, 1), &q(2));
        assert_eq!(t.dist(1, 2), &q(2));
        assert_eq!(t.dist(0, 2), &q(3));
        assert_eq!(t.dist(1, 1), &q(0));
        assert!(t.is_metric());
        let path = line(&[0, 1, 2]);
        let all = path.transform_max(&q(2)).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(all.dist(i, j), &if i == j { q(0) } else { q(2) });
            }
        }
        assert_eq!(path.transform_max(&Rational::from_ratio(1, 2)).unwrap(), path);
    }

    #[test]
    fn min_transform_on_line() {
        let s = line(&[0, 1, 3]);
        let t = s.transform_min(&q(2)).unwrap();
        assert_eq!(t.dist(0, 1), &q(1));
        assert_eq!(t.dist(1, 2), &q(2));
        assert_eq!(t.dist(0, 2), &q(2));
        assert!(t.is_metric());
        assert_eq!(s.transform_min(&q(10)).unwrap(), s);
        let u = s.transform_min(&q(1)).unwrap();
        assert!(u.distinct_distances() == vec![q(1)]);
        assert!(s.transform_min(&q(0)).is_err());
        assert!(s.transform_max(&q(-1)).is_err());
    }

    #[test]
    fn lipschitz_of_identity_between_functor_metrics() {
        let s = line(&[0, 3, 7, 8]);
        let eps = q(2);
        let m = s.transform_max(&eps).unwrap();
        let id = FiniteMap::identity(s.len());
        assert_eq!(id.lipschitz_constant(&m, &s), q(1));
        let delta = s.min_positive_distance().unwrap();
        let inverse = id.lipschitz_constant(&s, &m);
        let bound = ScaleParams::new(eps, delta).unwrap().functor_constant();
        assert!(inverse <= bound);
        // pair (7, 8): max(1, 2) / 1
        assert_eq!(inverse, q(2));
    }

    #[test]
    fn constant_maps_have_zero_lipschitz_constant() {
        let s = line(&[0, 2, 5]);
        let f = FiniteMap::total(vec![1, 1, 1]);
        assert_eq!(f.lipschitz_constant(&s, &s), q(0));
    }

    #[test]
    fn bilipschitz_identical_and_swapped() {
        let s = line(&[0, 2, 5]);
        let b = bilipschitz_bounds(&s, &s).unwrap();
        assert_eq!((b.mu, b.lambda), (q(1), q(1)));
        let t = s.transform_min(&q(3)).unwrap();
        let fwd = bilipschitz_bounds(&s, &t).unwrap();
        let back = bilipschitz_bounds(&t, &s).unwrap();
        assert_eq!(back.mu, q(1) / fwd.lambda.clone());
        assert_eq!(back.lambda, q(1) / fwd.mu.clone());
        let other = FiniteMetricSpace::from_fn(2, |i, j| if i == j { q(0) } else { q(1) }).unwrap();
        assert!(bilipschitz_bounds(&s, &other).is_err());
    }

    #[test]
    fn l1_l2_identity_bounds() {
        let pts = vec![vec![0.0, 0.0], vec![1.0, 2.0], vec![-1.0, 3.0], vec![2.0, -1.0]];
        let l1 = point_cloud(&pts, Norm::L1).unwrap();
        let l2 = point_cloud(&pts, Norm::L2).unwrap();
        let b = bilipschitz_bounds(&l2, &l1).unwrap();
        assert!(b.lambda <= 2.0 + 1e-12);
        assert!(b.mu >= 1.0 - 1e-12);
    }
}
