//! Covers of finite metric spaces: Lebesgue numbers, multiplicity, mesh,
//! r-disjoint family decompositions and refinement.
//!
//! Conventions used throughout the crate:
//!
//! * `f_s(x) = dist(x, X \ U_s)`, with `dist(x, ∅) = +∞`.
//! * A family is r-disjoint when distinct members are at set distance `≥ r`.
//! * Balls are open: `B(x, ρ) = {y : d(x, y) < ρ}`, so `B(x, L_U(x)) ⊆ U_s`
//!   for the maximizing `s`.

use crate::metric::FiniteMetricSpace;
use crate::scalar::{Extended, Scalar};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CoverError {
    #[error("cover element {element} contains point {point}, but the space has {len} points")]
    PointOutOfRange { element: usize, point: usize, len: usize },
    #[error("cover element {0} is empty")]
    EmptyElement(usize),
    #[error("point {0} is not covered")]
    Uncovered(usize),
    #[error("cover is for {cover} points but the space has {space}")]
    SpaceMismatch { cover: usize, space: usize },
    #[error("no cover element with index {0}")]
    BadElement(usize),
    #[error("no point with index {0}")]
    BadPoint(usize),
    #[error("family assignment has {got} entries for {expected} elements")]
    FamilyLength { got: usize, expected: usize },
    #[error("element {element} is assigned to family {family} but only {families} families exist")]
    FamilyOutOfRange { element: usize, family: usize, families: usize },
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("decomposition is not r-disjoint: elements {0} and {1} are too close")]
    InvalidDecomposition(usize, usize),
    #[error("post-condition failed: {0}")]
    GuaranteeViolated(String),
}

/// An indexed family of point subsets whose union is the whole space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cover {
    n_points: usize,
    elements: Vec<Vec<usize>>,
    masks: Vec<Vec<bool>>,
}

impl Cover {
    /// A cover with nonempty elements.
    pub fn new(n_points: usize, elements: Vec<Vec<usize>>) -> Result<Self, CoverError> {
        if let Some(i) = elements.iter().position(|e| e.is_empty()) {
            return Err(CoverError::EmptyElement(i));
        }
        Self::indexed(n_points, elements)
    }

    /// A cover whose elements may be empty.
    ///
    /// Refinements produced by the extension constructions keep the indexing
    /// of the cover they refine, so some `V_i` can be empty.
    pub fn indexed(n_points: usize, elements: Vec<Vec<usize>>) -> Result<Self, CoverError> {
        let mut masks = Vec::with_capacity(elements.len());
        let mut covered = vec![false; n_points];
        let mut normalized = Vec::with_capacity(elements.len());
        for (i, mut e) in elements.into_iter().enumerate() {
            e.sort_unstable();
            e.dedup();
            let mut mask = vec![false; n_points];
            for &p in &e {
                if p >= n_points {
                    return Err(CoverError::PointOutOfRange { element: i, point: p, len: n_points });
                }
                mask[p] = true;
                covered[p] = true;
            }
            masks.push(mask);
            normalized.push(e);
        }
        if let Some(p) = covered.iter().position(|c| !c) {
            return Err(CoverError::Uncovered(p));
        }
        Ok(Self { n_points, elements: normalized, masks })
    }

    /// Builds from membership masks.
    pub fn from_masks(n_points: usize, masks: Vec<Vec<bool>>) -> Result<Self, CoverError> {
        let elements = masks
            .iter()
            .map(|m| m.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i).collect())
            .collect();
        Self::indexed(n_points, elements)
    }

    pub fn singletons(n_points: usize) -> Self {
        Self::new(n_points, (0..n_points).map(|i| vec![i]).collect()).expect("singletons cover")
    }

    pub fn whole(n_points: usize) -> Self {
        Self::new(n_points, vec![(0..n_points).collect()]).expect("whole space covers")
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[Vec<usize>] {
        &self.elements
    }

    pub fn element(&self, s: usize) -> &[usize] {
        &self.elements[s]
    }

    #[inline]
    pub fn contains(&self, s: usize, x: usize) -> bool {
        self.masks[s][x]
    }

    /// Indices of elements containing `x` (the set `T(x)`).
    pub fn memberships(&self, x: usize) -> Vec<usize> {
        (0..self.len()).filter(|&s| self.masks[s][x]).collect()
    }

    /// Number of elements containing `x`.
    pub fn local_multiplicity(&self, x: usize) -> usize {
        self.masks.iter().filter(|m| m[x]).count()
    }

    /// Max number of elements containing a point (the usual convention).
    pub fn multiplicity(&self) -> usize {
        (0..self.n_points).map(|x| self.local_multiplicity(x)).max().unwrap_or(0)
    }

    /// `true` if some element is the whole space.
    pub fn whole_space_elements(&self) -> Vec<usize> {
        (0..self.len()).filter(|&s| self.elements[s].len() == self.n_points).collect()
    }

    /// Elements with empty members dropped (indices are renumbered).
    pub fn without_empty(&self) -> Cover {
        Cover::new(self.n_points, self.elements.iter().filter(|e| !e.is_empty()).cloned().collect())
            .expect("dropping empty elements keeps a cover")
    }

    /// The family `{U_s ∩ subset}` over the points of `subset`, with point
    /// indices renumbered to positions in `subset`.
    pub fn restrict(&self, subset: &[usize]) -> Result<Cover, CoverError> {
        let elements = self
            .masks
            .iter()
            .map(|m| {
                subset.iter().enumerate().filter(|(_, &p)| m[p]).map(|(k, _)| k).collect()
            })
            .collect();
        Cover::indexed(subset.len(), elements)
    }

    fn check_space<S: Scalar>(&self, space: &FiniteMetricSpace<S>) -> Result<(), CoverError> {
        if space.len() != self.n_points {
            return Err(CoverError::SpaceMismatch { cover: self.n_points, space: space.len() });
        }
        Ok(())
    }
}

/// `f_s(x) = dist(x, X \ U_s)`: `+∞` when `U_s = X`, `0` when `x ∉ U_s`.
pub fn boundary_distance<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    cover: &Cover,
    s: usize,
    x: usize,
) -> Result<Extended<S>, CoverError> {
    cover.check_space(space)?;
    if s >= cover.len() {
        return Err(CoverError::BadElement(s));
    }
    if x >= space.len() {
        return Err(CoverError::BadPoint(x));
    }
    Ok(boundary_distance_unchecked(space, cover, s, x))
}

pub(crate) fn boundary_distance_unchecked<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    cover: &Cover,
    s: usize,
    x: usize,
) -> Extended<S> {
    match space.point_set_distance(x, space.points().filter(|&y| !cover.contains(s, y))) {
        Some(d) => Extended::Finite(d),
        None => Extended::Infinite,
    }
}

/// Local and global Lebesgue numbers, mesh and both multiplicity counts.
#[derive(Debug, Clone, PartialEq)]
pub struct LebesgueProfile<S> {
    /// `L_U(x) = max_s f_s(x)`.
    pub local: Vec<Extended<S>>,
    /// `L(U) = min_x L_U(x)`.
    pub global: Extended<S>,
    pub mesh: S,
    /// `|{s : f_s(x) > 0}|` per point.
    pub mult_open: Vec<usize>,
    pub mult_open_max: usize,
    /// `1 + |{s : f_s(x) > 0}|` per point.
    pub mult_plus_one: Vec<usize>,
    pub mult_plus_one_max: usize,
}

pub fn lebesgue_profile<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    cover: &Cover,
) -> Result<LebesgueProfile<S>, CoverError> {
    cover.check_space(space)?;
    let n = space.len();
    let mut local = Vec::with_capacity(n);
    let mut mult_open = Vec::with_capacity(n);
    for x in 0..n {
        let mut best = Extended::Finite(S::zero());
        let mut count = 0;
        for s in 0..cover.len() {
            let f = boundary_distance_unchecked(space, cover, s, x);
            if f.is_positive() {
                count += 1;
            }
            best = best.max(f);
        }
        local.push(best);
        mult_open.push(count);
    }
    let global = local.iter().cloned().fold(Extended::Infinite, Extended::min);
    let mult_plus_one: Vec<usize> = mult_open.iter().map(|m| m + 1).collect();
    Ok(LebesgueProfile {
        global,
        mesh: mesh(space, cover),
        mult_open_max: mult_open.iter().copied().max().unwrap_or(0),
        mult_plus_one_max: mult_plus_one.iter().copied().max().unwrap_or(0),
        local,
        mult_open,
        mult_plus_one,
    })
}

/// Global Lebesgue number alone.
pub fn lebesgue_number<S: Scalar>(space: &FiniteMetricSpace<S>, cover: &Cover) -> Extended<S> {
    let mut global = Extended::Infinite;
    for x in space.points() {
        let mut best = Extended::Finite(S::zero());
        for s in 0..cover.len() {
            if cover.contains(s, x) {
                best = best.max(boundary_distance_unchecked(space, cover, s, x));
            }
        }
        global = global.min(best);
    }
    global
}

/// `r ≤ L(U)`.
pub fn is_r_lebesgue<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    cover: &Cover,
    r: &S,
) -> Result<bool, CoverError> {
    cover.check_space(space)?;
    if *r <= S::zero() {
        return Err(CoverError::Parameter("r must be positive".into()));
    }
    Ok(lebesgue_number(space, cover).at_least(r))
}

/// Largest element diameter.
pub fn mesh<S: Scalar>(space: &FiniteMetricSpace<S>, cover: &Cover) -> S {
    cover.elements().iter().map(|e| space.set_diameter(e)).fold(S::zero(), S::max_of)
}

/// Every element of `fine` lies inside some element of `coarse`.
pub fn refines(fine: &Cover, coarse: &Cover) -> bool {
    fine.n_points == coarse.n_points
        && fine.elements().iter().all(|e| {
            (0..coarse.len()).any(|s| e.iter().all(|&p| coarse.contains(s, p)))
        })
}

/// `fine_i ⊆ coarse_i` for every index (same number of elements).
pub fn refines_indexed(fine: &Cover, coarse: &Cover) -> bool {
    fine.n_points == coarse.n_points
        && fine.len() == coarse.len()
        && (0..fine.len()).all(|s| fine.element(s).iter().all(|&p| coarse.contains(s, p)))
}

/// A cover split into `families` groups at disjointness scale `r`.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyDecomposition<S = f64> {
    pub cover: Cover,
    pub family_of: Vec<usize>,
    pub families: usize,
    pub r: S,
}

impl<S: Scalar> FamilyDecomposition<S> {
    pub fn new(cover: Cover, family_of: Vec<usize>, families: usize, r: S) -> Result<Self, CoverError> {
        if family_of.len() != cover.len() {
            return Err(CoverError::FamilyLength { got: family_of.len(), expected: cover.len() });
        }
        if let Some((element, &family)) = family_of.iter().enumerate().find(|(_, &f)| f >= families) {
            return Err(CoverError::FamilyOutOfRange { element, family, families });
        }
        if r <= S::zero() {
            return Err(CoverError::Parameter("disjointness scale r must be positive".into()));
        }
        Ok(Self { cover, family_of, families, r })
    }

    /// Every point its own element, all in one family.
    pub fn singletons(n_points: usize, r: S) -> Result<Self, CoverError> {
        Self::new(Cover::singletons(n_points), vec![0; n_points], 1, r)
    }

    pub fn members_of(&self, family: usize) -> Vec<usize> {
        (0..self.cover.len()).filter(|&s| self.family_of[s] == family).collect()
    }

    pub fn map_scalar<T: Scalar>(&self, f: impl Fn(&S) -> T) -> FamilyDecomposition<T> {
        FamilyDecomposition {
            cover: self.cover.clone(),
            family_of: self.family_of.clone(),
            families: self.families,
            r: f(&self.r),
        }
    }
}

/// Outcome of [`check_decomposition`].
#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionReport<S> {
    pub is_valid: bool,
    /// Two elements of one family closer than `r`, with their set distance.
    pub violating_pair: Option<(usize, usize, S)>,
    pub mesh: S,
    /// `mesh / r`: the empirical constant `C`.
    pub bound_ratio: S,
}

/// Verifies family-wise r-disjointness and measures `mesh / r`.
pub fn check_decomposition<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    decomp: &FamilyDecomposition<S>,
) -> Result<DecompositionReport<S>, CoverError> {
    decomp.cover.check_space(space)?;
    let cover = &decomp.cover;
    let mut violating_pair = None;
    'outer: for a in 0..cover.len() {
        for b in (a + 1)..cover.len() {
            if decomp.family_of[a] != decomp.family_of[b] {
                continue;
            }
            let Some(d) = space.set_distance(cover.element(a), cover.element(b)) else {
                continue;
            };
            if !decomp.r.le_tol(&d) {
                violating_pair = Some((a, b, d));
                break 'outer;
            }
        }
    }
    let mesh = mesh(space, cover);
    Ok(DecompositionReport {
        is_valid: violating_pair.is_none(),
        violating_pair,
        bound_ratio: mesh.clone() / decomp.r.clone(),
        mesh,
    })
}

/// Open neighborhoods `{x : dist(x, U) < ρ}` of every element.
pub fn neighborhood_cover<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    cover: &Cover,
    radius: &S,
) -> Cover {
    let elements = cover
        .elements()
        .iter()
        .map(|e| {
            space
                .points()
                .filter(|&x| space.point_set_distance(x, e.iter().copied()).is_some_and(|d| d < *radius))
                .collect()
        })
        .collect();
    Cover::indexed(space.len(), elements).expect("neighborhoods of a cover still cover")
}

/// Converts an r-disjoint decomposition into a cover of multiplicity at most
/// the family count, Lebesgue number at least `shrink·r`, and mesh at most
/// `mesh + 2·shrink·r`, by taking open `shrink·r`-neighborhoods.
///
/// All three guarantees are re-measured before returning.
pub fn decomposition_to_lebesgue_cover<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    decomp: &FamilyDecomposition<S>,
    shrink: &S,
) -> Result<Cover, CoverError> {
    let half = S::from_ratio(1, 2);
    if *shrink <= S::zero() || *shrink >= half {
        return Err(CoverError::Parameter(format!(
            "shrink must lie in (0, 1/2), got {}",
            shrink.to_exact_string()
        )));
    }
    let report = check_decomposition(space, decomp)?;
    if let Some((a, b, _)) = report.violating_pair {
        return Err(CoverError::InvalidDecomposition(a, b));
    }
    let radius = shrink.clone() * decomp.r.clone();
    let out = neighborhood_cover(space, &decomp.cover, &radius);

    let mult = out.multiplicity();
    if mult > decomp.families {
        return Err(CoverError::GuaranteeViolated(format!(
            "multiplicity {mult} exceeds family count {}",
            decomp.families
        )));
    }
    if !lebesgue_number(space, &out).at_least(&radius) {
        return Err(CoverError::GuaranteeViolated("Lebesgue number below shrink·r".into()));
    }
    let allowed = report.mesh + radius.clone() + radius;
    if !mesh(space, &out).le_tol(&allowed) {
        return Err(CoverError::GuaranteeViolated("mesh above mesh + 2·shrink·r".into()));
    }
    if !refines_indexed(&decomp.cover, &out) {
        return Err(CoverError::GuaranteeViolated("neighborhoods do not contain elements".into()));
    }
    Ok(out)
}

/// Neighborhood conversion that keeps the family structure: the result is a
/// decomposition whose families are `(1 - 2·shrink)·r`-disjoint, reported at
/// scale `min(1 - 2·shrink, shrink)·r`, and whose cover has Lebesgue number at
/// least that scale.
pub fn lebesgue_decomposition<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    decomp: &FamilyDecomposition<S>,
    shrink: &S,
) -> Result<FamilyDecomposition<S>, CoverError> {
    let cover = decomposition_to_lebesgue_cover(space, decomp, shrink)?;
    let two = S::from_i64(2);
    let sep = S::one() - two * shrink.clone();
    let scale = S::min_of(sep, shrink.clone()) * decomp.r.clone();
    let out = FamilyDecomposition::new(cover, decomp.family_of.clone(), decomp.families, scale)?;
    let report = check_decomposition(space, &out)?;
    if !report.is_valid {
        return Err(CoverError::GuaranteeViolated("neighborhood families are not disjoint".into()));
    }
    Ok(out)
}

/// Open balls of a common radius around the given centers.
pub fn ball_cover<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    centers: &[usize],
    radius: &S,
) -> Result<Cover, CoverError> {
    Cover::new(space.len(), centers.iter().map(|&c| space.open_ball(c, radius)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn path(n: usize) -> FiniteMetricSpace<Rational> {
        FiniteMetricSpace::from_fn(n, |i, j| Rational::from_i64((i as i64 - j as i64).abs())).unwrap()
    }

    fn q(n: i64) -> Rational {
        Rational::from_i64(n)
    }

    #[test]
    fn boundary_distance_cases() {
        let x = path(4);
        let c = Cover::new(4, vec![vec![0, 1, 2], vec![1, 2, 3]]).unwrap();
        assert_eq!(boundary_distance(&x, &c, 0, 0).unwrap(), Extended::Finite(q(3)));
        assert_eq!(boundary_distance(&x, &c, 1, 0).unwrap(), Extended::Finite(q(0)));
        let w = Cover::whole(4);
        assert_eq!(boundary_distance(&x, &w, 0, 2).unwrap(), Extended::Infinite);
        assert!(matches!(boundary_distance(&x, &c, 5, 0), Err(CoverError::BadElement(5))));
    }

    #[test]
    fn profile_of_two_interval_cover() {
        let x = path(4);
        let c = Cover::new(4, vec![vec![0, 1, 2], vec![1, 2, 3]]).unwrap();
        let p = lebesgue_profile(&x, &c).unwrap();
        assert_eq!(p.global, Extended::Finite(q(2)));
        assert_eq!(p.mesh, q(2));
        assert_eq!(p.mult_open_max, 2);
        assert_eq!(p.mult_plus_one_max, 3);
        assert!(is_r_lebesgue(&x, &c, &q(2)).unwrap());
        assert!(!is_r_lebesgue(&x, &c, &Rational::from_ratio(5, 2)).unwrap());
    }

    #[test]
    fn whole_space_and_singleton_profiles() {
        let x = path(3);
        let p = lebesgue_profile(&x, &Cover::whole(3)).unwrap();
        assert_eq!(p.global, Extended::Infinite);
        assert_eq!(p.mult_open_max, 1);
        assert!(is_r_lebesgue(&x, &Cover::whole(3), &q(1000)).unwrap());
        let s = lebesgue_profile(&x, &Cover::singletons(3)).unwrap();
        assert_eq!(s.global, Extended::Finite(q(1)));
        assert_eq!(s.mesh, q(0));
    }

    #[test]
    fn cover_constructor_rejects_bad_input() {
        assert!(matches!(Cover::new(3, vec![vec![0, 1]]), Err(CoverError::Uncovered(2))));
        assert!(matches!(Cover::new(2, vec![vec![0, 1], vec![]]), Err(CoverError::EmptyElement(1))));
        assert!(Cover::indexed(2, vec![vec![0, 1], vec![]]).is_ok());
        assert!(matches!(Cover::new(2, vec![vec![0, 7]]), Err(CoverError::PointOutOfRange { .. })));
    }

    #[test]
    fn refinement_checks() {
        let a = Cover::new(4, vec![vec![0, 1], vec![2, 3]]).unwrap();
        let b = Cover::new(4, vec![vec![0, 1, 2], vec![2, 3]]).unwrap();
        assert!(refines(&a, &b));
        assert!(!refines(&b, &a));
        assert!(refines(&a, &a));
        assert!(refines(&Cover::singletons(4), &b));
        assert!(refines_indexed(&a, &b));
    }

    #[test]
    fn decomposition_checks() {
        let x = path(4);
        let ok = FamilyDecomposition::singletons(4, q(1)).unwrap();
        let rep = check_decomposition(&x, &ok).unwrap();
        assert!(rep.is_valid);
        assert_eq!(rep.bound_ratio, q(0));
        let overlapping = FamilyDecomposition::new(
            Cover::new(4, vec![vec![0, 1, 2], vec![2, 3]]).unwrap(),
            vec![0, 0],
            1,
            q(1),
        )
        .unwrap();
        let rep = check_decomposition(&x, &overlapping).unwrap();
        assert!(!rep.is_valid);
        assert_eq!(rep.violating_pair, Some((0, 1, q(0))));
        assert!(FamilyDecomposition::new(Cover::singletons(2), vec![0, 3], 2, q(1)).is_err());
    }

    #[test]
    fn lebesgue_conversion_of_singletons() {
        let x = path(5);
        let d = FamilyDecomposition::singletons(5, q(1)).unwrap();
        let c = decomposition_to_lebesgue_cover(&x, &d, &Rational::from_ratio(1, 4)).unwrap();
        assert_eq!(c, Cover::singletons(5));
        assert!(decomposition_to_lebesgue_cover(&x, &d, &Rational::from_ratio(1, 2)).is_err());
    }

    #[test]
    fn lebesgue_conversion_keeps_families() {
        let x = path(8);
        // blocks {0,1}, {4,5} in family 0 and {2,3}, {6,7} in family 1: 3-disjoint
        let cover = Cover::new(8, vec![vec![0, 1], vec![4, 5], vec![2, 3], vec![6, 7]]).unwrap();
        let d = FamilyDecomposition::new(cover, vec![0, 0, 1, 1], 2, q(3)).unwrap();
        let third = Rational::from_ratio(1, 3);
        let ld = lebesgue_decomposition(&x, &d, &third).unwrap();
        assert_eq!(ld.r, q(1));
        assert!(lebesgue_number(&x, &ld.cover).at_least(&q(1)));
        assert!(ld.cover.multiplicity() <= 2);
    }
}
