//! Nagata-Assouad dimension at a finite list of scales: exhaustive search
//! for small spaces, a net-and-color heuristic for larger ones, conversions
//! between the cover characterizations, and the micro/macro comparisons.

use serde::Serialize;

use crate::covers::{
    boundary_distance, check_decomposition, decomposition_to_lebesgue_cover, lebesgue_profile, mesh, Cover,
    CoverError, FamilyDecomposition,
};
use crate::metric::{bilipschitz_bounds, BiLipschitzBounds, FiniteMetricSpace, MetricError};
use crate::scalar::{Extended, Scalar};
use crate::sphere_ext::chains::{chain_components, ChainRule};

/// Largest space the exhaustive search accepts.
pub const EXACT_THRESHOLD: usize = 12;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DimensionError {
    #[error(transparent)]
    Cover(#[from] CoverError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("exact search is limited to {threshold} points, the space has {points}")]
    TooLargeForExact { points: usize, threshold: usize },
}

/// How a decomposition was found.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Strict r-chain components, which decide the one-family case exactly.
    Chains,
    Exact,
    Greedy,
}

/// Which searches to run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchMode {
    /// Exact up to [`EXACT_THRESHOLD`] points, greedy above.
    #[default]
    Auto,
    /// Exact only; larger spaces are an error.
    ExactOnly,
    /// Never run the exhaustive search.
    GreedyOnly,
}

/// Outcome of [`find_decomposition`].
#[derive(Debug, Clone, PartialEq)]
pub enum Search<S> {
    Found(FamilyDecomposition<S>, Method),
    /// Proven impossible.
    NotFound,
    /// The heuristic failed; nothing is proven.
    Unknown,
}

impl<S> Search<S> {
    pub fn found(&self) -> Option<&FamilyDecomposition<S>> {
        match self {
            Search::Found(d, _) => Some(d),
            _ => None,
        }
    }
}

fn check_params<S: Scalar>(r: &S, c: &S) -> Result<(), DimensionError> {
    if *r <= S::zero() {
        return Err(DimensionError::Parameter(format!("r must be positive, got {}", r.to_exact_string())));
    }
    if *c <= S::zero() {
        return Err(DimensionError::Parameter(format!("C must be positive, got {}", c.to_exact_string())));
    }
    Ok(())
}

fn from_coloring<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    color: &[usize],
    families: usize,
    r: &S,
) -> Result<FamilyDecomposition<S>, DimensionError> {
    let mut elements = Vec::new();
    let mut family_of = Vec::new();
    for c in 0..families {
        let members: Vec<usize> = space.points().filter(|&x| color[x] == c).collect();
        if members.is_empty() {
            continue;
        }
        let sub = space.subspace(&members)?;
        for comp in chain_components(&sub, r, ChainRule::LessThan).components {
            elements.push(comp.into_iter().map(|i| members[i]).collect());
            family_of.push(c);
        }
    }
    Ok(FamilyDecomposition::new(Cover::new(space.len(), elements)?, family_of, families, r.clone())?)
}

/// The one-family decomposition by strict r-chain components, if their
/// diameters are within `C·r`. This decides `n = 0` exactly.
pub fn chain_decomposition<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    r: &S,
    c: &S,
) -> Result<Option<FamilyDecomposition<S>>, DimensionError> {
    check_params(r, c)?;
    let bound = c.clone() * r.clone();
    let partition = chain_components(space, r, ChainRule::LessThan);
    if partition.diameters.iter().any(|d| !d.le_tol(&bound)) {
        return Ok(None);
    }
    let cover = Cover::new(space.len(), partition.components.clone())?;
    let n = cover.len();
    Ok(Some(FamilyDecomposition::new(cover, vec![0; n], 1, r.clone())?))
}

/// Backtracking over canonical colorings with at most `colors` colors;
/// within each color the strict r-chain components must fit in `C·r`.
fn exact_coloring<S: Scalar>(space: &FiniteMetricSpace<S>, r: &S, c: &S, colors: usize) -> Option<Vec<usize>> {
    let n = space.len();
    let bound = c.clone() * r.clone();
    let link: Vec<Vec<bool>> =
        (0..n).map(|i| (0..n).map(|j| i != j && space.dist(i, j).lt_strict(r)).collect()).collect();
    let fits: Vec<Vec<bool>> = (0..n).map(|i| (0..n).map(|j| space.dist(i, j).le_tol(&bound)).collect()).collect();
    let mut color = vec![usize::MAX; n];

    fn component_fits(x: usize, color: &[usize], link: &[Vec<bool>], fits: &[Vec<bool>]) -> bool {
        let c = color[x];
        let mut comp = vec![x];
        let mut k = 0;
        while k < comp.len() {
            let y = comp[k];
            for z in 0..color.len() {
                if color[z] == c && link[y][z] && !comp.contains(&z) {
                    comp.push(z);
                }
            }
            k += 1;
        }
        comp.iter().all(|&a| comp.iter().all(|&b| fits[a][b]))
    }

    fn go(
        i: usize,
        used: usize,
        colors: usize,
        color: &mut Vec<usize>,
        link: &[Vec<bool>],
        fits: &[Vec<bool>],
    ) -> bool {
        if i == color.len() {
            return true;
        }
        for c in 0..colors.min(used + 1) {
            color[i] = c;
            if component_fits(i, color, link, fits) && go(i + 1, used.max(c + 1), colors, color, link, fits) {
                return true;
            }
        }
        color[i] = usize::MAX;
        false
    }

    go(0, 0, colors, &mut color, &link, &fits).then_some(color)
}

/// Maximal `C·r/2`-net, nearest-center clusters (ties to the lowest index),
/// first-fit coloring with set distance at least `r` inside each color.
/// Returns the coloring of clusters as a decomposition with as many families
/// as colors used.
pub fn greedy_decomposition<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    r: &S,
    c: &S,
) -> Result<FamilyDecomposition<S>, DimensionError> {
    check_params(r, c)?;
    let radius = c.clone() * r.clone() / S::from_i64(2);
    let mut centers: Vec<usize> = Vec::new();
    for x in space.points() {
        if centers.iter().all(|&z| radius.le_tol(space.dist(x, z))) {
            centers.push(x);
        }
    }
    let mut clusters: Vec<Vec<usize>> = vec![Vec::new(); centers.len()];
    for x in space.points() {
        let mut best = 0;
        for k in 1..centers.len() {
            if space.dist(x, centers[k]) < space.dist(x, centers[best]) {
                best = k;
            }
        }
        clusters[best].push(x);
    }
    let mut color_of: Vec<usize> = Vec::with_capacity(clusters.len());
    for k in 0..clusters.len() {
        let mut c = 0;
        while (0..k).any(|j| {
            color_of[j] == c
                && space.set_distance(&clusters[k], &clusters[j]).is_some_and(|d| !r.le_tol(&d))
        }) {
            c += 1;
        }
        color_of.push(c);
    }
    let families = color_of.iter().copied().max().map_or(1, |m| m + 1);
    Ok(FamilyDecomposition::new(Cover::new(space.len(), clusters)?, color_of, families, r.clone())?)
}

/// Exhaustive search for a decomposition into at most `n+1` families.
/// Independent of the chain shortcut; exponential in `|X|`.
pub fn exact_decomposition<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    r: &S,
    c: &S,
    n: usize,
) -> Result<Option<FamilyDecomposition<S>>, DimensionError> {
    check_params(r, c)?;
    if space.len() > EXACT_THRESHOLD {
        return Err(DimensionError::TooLargeForExact { points: space.len(), threshold: EXACT_THRESHOLD });
    }
    match exact_coloring(space, r, c, n + 1) {
        Some(color) => Ok(Some(from_coloring(space, &color, n + 1, r)?)),
        None => Ok(None),
    }
}

/// A decomposition into at most `n+1` r-disjoint families with mesh at most
/// `C·r`. Auto and greedy modes first try the strict chain components, then
/// the greedy coloring; exact-only mode runs the exhaustive search alone.
pub fn find_decomposition<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    r: &S,
    c: &S,
    n: usize,
    mode: SearchMode,
) -> Result<Search<S>, DimensionError> {
    check_params(r, c)?;
    if mode == SearchMode::ExactOnly {
        return Ok(match exact_decomposition(space, r, c, n)? {
            Some(d) => Search::Found(d, Method::Exact),
            None => Search::NotFound,
        });
    }
    if let Some(d) = chain_decomposition(space, r, c)? {
        return Ok(Search::Found(widen(d, n + 1), Method::Chains));
    }
    if n == 0 {
        return Ok(Search::NotFound);
    }
    let greedy = greedy_decomposition(space, r, c)?;
    if greedy.families <= n + 1 {
        return Ok(Search::Found(widen(greedy, n + 1), Method::Greedy));
    }
    if mode == SearchMode::GreedyOnly || space.len() > EXACT_THRESHOLD {
        return Ok(Search::Unknown);
    }
    match exact_coloring(space, r, c, n + 1) {
        Some(color) => Ok(Search::Found(from_coloring(space, &color, n + 1, r)?, Method::Exact)),
        None => Ok(Search::NotFound),
    }
}

fn widen<S: Scalar>(mut d: FamilyDecomposition<S>, families: usize) -> FamilyDecomposition<S> {
    d.families = d.families.max(families);
    d
}

/// Which scales a query looks at.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", content = "m", rename_all = "snake_case")]
pub enum ScaleMode<S> {
    Full,
    /// Only `r > M`.
    Macro(S),
    /// Only `r < M`.
    Micro(S),
}

impl<S: Scalar> ScaleMode<S> {
    pub fn includes(&self, r: &S) -> bool {
        match self {
            ScaleMode::Full => true,
            ScaleMode::Macro(m) => r > m,
            ScaleMode::Micro(m) => r < m,
        }
    }
}

/// Bound ratio, scales and scope of a dimension estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct DimQuery<S> {
    pub c: S,
    pub scales: Vec<S>,
    pub mode: ScaleMode<S>,
    pub search: SearchMode,
}

impl<S: Scalar> DimQuery<S> {
    /// Scales default to the distinct positive pairwise distances.
    pub fn new(space: &FiniteMetricSpace<S>, c: S, scales: Option<Vec<S>>) -> Result<Self, DimensionError> {
        let mut scales = scales.unwrap_or_else(|| space.distinct_distances());
        if c <= S::zero() {
            return Err(DimensionError::Parameter(format!("C must be positive, got {}", c.to_exact_string())));
        }
        if let Some(r) = scales.iter().find(|r| **r <= S::zero()) {
            return Err(DimensionError::Parameter(format!("scale {} is not positive", r.to_exact_string())));
        }
        scales.sort_by(|a, b| a.partial_cmp(b).expect("scales are comparable"));
        scales.dedup_by(|a, b| a == b);
        Ok(Self { c, scales, mode: ScaleMode::Full, search: SearchMode::Auto })
    }

    pub fn with_mode(mut self, mode: ScaleMode<S>) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_search(mut self, search: SearchMode) -> Self {
        self.search = search;
        self
    }
}

/// Dimension bounds at one scale, with a witness for the upper bound.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleDimension<S> {
    pub r: S,
    pub lower: usize,
    pub upper: usize,
    pub exact: bool,
    pub witness: FamilyDecomposition<S>,
    pub method: Method,
}

/// Smallest `n` with a decomposition at scale `r`, or bounds on it.
pub fn scale_dimension<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    r: &S,
    c: &S,
    search: SearchMode,
) -> Result<ScaleDimension<S>, DimensionError> {
    check_params(r, c)?;
    if search == SearchMode::ExactOnly {
        if space.len() > EXACT_THRESHOLD {
            return Err(DimensionError::TooLargeForExact { points: space.len(), threshold: EXACT_THRESHOLD });
        }
        let mut n = 0;
        loop {
            if let Some(color) = exact_coloring(space, r, c, n + 1) {
                let witness = from_coloring(space, &color, n + 1, r)?;
                return Ok(ScaleDimension { r: r.clone(), lower: n, upper: n, exact: true, witness, method: Method::Exact });
            }
            n += 1;
        }
    }
    if let Some(d) = chain_decomposition(space, r, c)? {
        return Ok(ScaleDimension { r: r.clone(), lower: 0, upper: 0, exact: true, witness: d, method: Method::Chains });
    }
    let greedy = greedy_decomposition(space, r, c)?;
    let mut upper = greedy.families - 1;
    let mut witness = greedy;
    let mut method = Method::Greedy;
    let exact_allowed = search == SearchMode::Auto && space.len() <= EXACT_THRESHOLD;
    if exact_allowed {
        for n in 1..upper {
            if let Some(color) = exact_coloring(space, r, c, n + 1) {
                witness = from_coloring(space, &color, n + 1, r)?;
                method = Method::Exact;
                upper = n;
                break;
            }
        }
    }
    let exact = exact_allowed || upper == 1;
    Ok(ScaleDimension { r: r.clone(), lower: if exact { upper } else { 1 }, upper, exact, witness, method })
}

/// Per-scale results and the overall bounds over the scales in scope.
#[derive(Debug, Clone, PartialEq)]
pub struct DimensionReport<S> {
    pub c: S,
    pub mode: ScaleMode<S>,
    pub scales: Vec<ScaleDimension<S>>,
    /// Scales excluded by the mode.
    pub skipped: Vec<S>,
    pub lower: usize,
    pub upper: usize,
    pub exact: bool,
}

impl<S> DimensionReport<S> {
    pub fn value(&self) -> Option<usize> {
        self.exact.then_some(self.upper)
    }

    pub fn at(&self, r: &S) -> Option<&ScaleDimension<S>>
    where
        S: PartialEq,
    {
        self.scales.iter().find(|s| s.r == *r)
    }
}

pub fn scale_range_dimension<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    q: &DimQuery<S>,
) -> Result<DimensionReport<S>, DimensionError> {
    let mut scales = Vec::new();
    let mut skipped = Vec::new();
    for r in &q.scales {
        if q.mode.includes(r) {
            scales.push(scale_dimension(space, r, &q.c, q.search)?);
        } else {
            skipped.push(r.clone());
        }
    }
    let lower = scales.iter().map(|s| s.lower).max().unwrap_or(0);
    let upper = scales.iter().map(|s| s.upper).max().unwrap_or(0);
    let exact = scales.iter().all(|s| s.exact) || lower == upper;
    Ok(DimensionReport { c: q.c.clone(), mode: q.mode.clone(), scales, skipped, lower, upper, exact })
}

/// Verdict of comparing two bounded quantities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Holds,
    Violated,
    /// The bounds are too loose to decide.
    Undetermined,
}

/// `a <= b` for quantities known as `[lower, upper]` intervals.
pub fn compare_le(a: (usize, usize), b: (usize, usize)) -> Relation {
    if a.1 <= b.0 {
        Relation::Holds
    } else if a.0 > b.1 {
        Relation::Violated
    } else {
        Relation::Undetermined
    }
}

/// One scale of a micro/macro comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FunctorRow {
    pub r: f64,
    /// `r > M` for macro, `r < M` for micro.
    pub in_range: bool,
    /// Bounds on the dimension of `(X, d)` at `(r, C)`, when in range.
    pub original: Option<(usize, usize)>,
    /// Bounds on the dimension of the transformed space at `(r, C)`.
    pub transformed: (usize, usize),
    /// Bounds at the slackened constant used by the comparison.
    pub transformed_slack: Option<(usize, usize)>,
    pub relation: String,
    pub verdict: Relation,
}

/// Macro or micro comparison against the transformed space.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FunctorReport {
    pub kind: String,
    pub m: f64,
    pub c: f64,
    pub rows: Vec<FunctorRow>,
    pub restricted: (usize, usize),
    pub transformed: (usize, usize),
    pub holds: bool,
    pub undetermined: usize,
}

fn bounds<S>(s: &ScaleDimension<S>) -> (usize, usize) {
    (s.lower, s.upper)
}

fn combine(relations: &[Relation]) -> Relation {
    if relations.contains(&Relation::Violated) {
        Relation::Violated
    } else if relations.contains(&Relation::Undetermined) {
        Relation::Undetermined
    } else {
        Relation::Holds
    }
}

fn functor_report<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    c: &S,
    scales: &[S],
    m: &S,
    macro_mode: bool,
    search: SearchMode,
) -> Result<FunctorReport, DimensionError> {
    if *m <= S::zero() {
        return Err(DimensionError::Parameter(format!("M must be positive, got {}", m.to_exact_string())));
    }
    let transformed = if macro_mode { space.transform_max(m)? } else { space.transform_min(m)? };
    let mode = if macro_mode { ScaleMode::Macro(m.clone()) } else { ScaleMode::Micro(m.clone()) };
    let q = DimQuery::new(space, c.clone(), Some(scales.to_vec()))?.with_search(search);
    let restricted = scale_range_dimension(space, &q.clone().with_mode(mode.clone()))?;
    let full_t = scale_range_dimension(&transformed, &q)?;
    let mut rows = Vec::new();
    for st in &full_t.scales {
        let r = &st.r;
        let in_range = mode.includes(r);
        let t = bounds(st);
        let row = if in_range {
            let orig = bounds(restricted.at(r).expect("in-range scales are evaluated"));
            if macro_mode {
                let c1 = S::max_of(c.clone(), S::one());
                let slack = bounds(&scale_dimension(&transformed, r, &c1, search)?);
                FunctorRow {
                    r: r.to_f64(),
                    in_range,
                    original: Some(orig),
                    transformed: t,
                    transformed_slack: Some(slack),
                    relation: "n_max(d,M)(r, max(C,1)) <= n_d(r, C) <= n_max(d,M)(r, C)".into(),
                    verdict: combine(&[compare_le(slack, orig), compare_le(orig, t)]),
                }
            } else {
                let tight = (c.clone() * r.clone()) < *m;
                let mut verdict = vec![compare_le(t, orig)];
                if tight {
                    verdict.push(compare_le(orig, t));
                }
                FunctorRow {
                    r: r.to_f64(),
                    in_range,
                    original: Some(orig),
                    transformed: t,
                    transformed_slack: None,
                    relation: if tight {
                        "n_min(d,M)(r, C) = n_d(r, C) since C*r < M".into()
                    } else {
                        "n_min(d,M)(r, C) <= n_d(r, C)".into()
                    },
                    verdict: combine(&verdict),
                }
            }
        } else if macro_mode {
            FunctorRow {
                r: r.to_f64(),
                in_range,
                original: None,
                transformed: t,
                transformed_slack: None,
                relation: "n_max(d,M)(r, C) = 0 for r <= M".into(),
                verdict: compare_le(t, (0, 0)),
            }
        } else {
            let c1 = c.clone() + S::one();
            let slack = bounds(&scale_dimension(&transformed, r, &c1, search)?);
            FunctorRow {
                r: r.to_f64(),
                in_range,
                original: None,
                transformed: t,
                transformed_slack: Some(slack),
                relation: "n_min(d,M)(r, C+1) = 0 for r >= M".into(),
                verdict: compare_le(slack, (0, 0)),
            }
        };
        rows.push(row);
    }
    let holds = rows.iter().all(|r| r.verdict != Relation::Violated);
    let undetermined = rows.iter().filter(|r| r.verdict == Relation::Undetermined).count();
    Ok(FunctorReport {
        kind: if macro_mode { "macro" } else { "micro" }.into(),
        m: m.to_f64(),
        c: c.to_f64(),
        rows,
        restricted: (restricted.lower, restricted.upper),
        transformed: (full_t.lower, full_t.upper),
        holds,
        undetermined,
    })
}

/// Compares the dimension of `(X, d)` at scales `r > M` with that of
/// `(X, max(d, M))` at every scale.
pub fn macro_dimension<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    c: &S,
    scales: &[S],
    m: &S,
    search: SearchMode,
) -> Result<FunctorReport, DimensionError> {
    functor_report(space, c, scales, m, true, search)
}

/// Compares the dimension of `(X, d)` at scales `r < M` with that of
/// `(X, min(d, M))` at every scale.
pub fn micro_dimension<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    c: &S,
    scales: &[S],
    m: &S,
    search: SearchMode,
) -> Result<FunctorReport, DimensionError> {
    functor_report(space, c, scales, m, false, search)
}

/// A decomposition of `(X, a)` read in `(X, b)` where `μ·a ≤ b ≤ λ·a`: the
/// families are `μ·r`-disjoint and the mesh is at most `(λ·C/μ)·(μ·r)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Transported<S> {
    pub decomposition: FamilyDecomposition<S>,
    pub bounds: BiLipschitzBounds<S>,
    /// `λ·C/μ`.
    pub c: S,
    pub valid: bool,
}

/// Moves a witness between bi-Lipschitz equivalent metrics on the same
/// labels and re-checks it there.
pub fn transport_witness<S: Scalar>(
    source: &FiniteMetricSpace<S>,
    target: &FiniteMetricSpace<S>,
    witness: &FamilyDecomposition<S>,
    c: &S,
) -> Result<Transported<S>, DimensionError> {
    let bounds = bilipschitz_bounds(source, target)?;
    let to_target: Vec<usize> = source
        .labels()
        .iter()
        .map(|l| target.index_of(l).ok_or_else(|| MetricError::LabelMismatch(l.clone())))
        .collect::<Result<_, _>>()?;
    let elements = witness.cover.elements().iter().map(|e| e.iter().map(|&x| to_target[x]).collect()).collect();
    let r = bounds.mu.clone() * witness.r.clone();
    let c_new = bounds.lambda.clone() * c.clone() / bounds.mu.clone();
    let decomposition =
        FamilyDecomposition::new(Cover::new(target.len(), elements)?, witness.family_of.clone(), witness.families, r)?;
    let report = check_decomposition(target, &decomposition)?;
    let valid = report.is_valid && report.mesh.le_tol(&(c_new.clone() * decomposition.r.clone()));
    Ok(Transported { decomposition, bounds, c: c_new, valid })
}

/// Which characterization a conversion produces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Direction {
    /// Decomposition to a Lebesgue cover of bounded multiplicity.
    #[serde(rename = "1->2")]
    DecompositionToLebesgue,
    /// Lebesgue cover to a cover whose small balls meet few elements.
    #[serde(rename = "2->3")]
    LebesgueToBallCount,
    /// Ball-count cover back to a decomposition.
    #[serde(rename = "3->1")]
    BallCountToDecomposition,
}

/// Output of [`characterization_convert`] with its measured constants.
#[derive(Debug, Clone, PartialEq)]
pub struct Converted<S> {
    pub cover: Cover,
    /// Families for decompositions produced by `3->1`.
    pub family_of: Option<Vec<usize>>,
    /// Scale `r` at which the output form holds.
    pub r: S,
    pub mesh: S,
    /// `mesh / r`.
    pub ratio: S,
    /// Multiplicity, maximal number of elements met by an r-ball, or number
    /// of families, depending on the direction.
    pub count: usize,
    pub lebesgue: Option<S>,
}

/// Input accepted by [`characterization_convert`].
#[derive(Debug, Clone, PartialEq)]
pub enum CoverForm<S> {
    Decomposition(FamilyDecomposition<S>),
    /// A cover with the scale it is assumed to be Lebesgue (or ball-count) at.
    Cover(Cover, S),
}

/// Maximum over points of the number of elements meeting `B(x, r)`.
pub fn ball_count<S: Scalar>(space: &FiniteMetricSpace<S>, cover: &Cover, r: &S) -> usize {
    space
        .points()
        .map(|x| {
            let ball = space.open_ball(x, r);
            cover.elements().iter().filter(|e| e.iter().any(|p| ball.contains(p))).count()
        })
        .max()
        .unwrap_or(0)
}

/// Converts between the three equivalent forms of the dimension bound.
///
/// `1->2` takes open `shrink·r`-neighborhoods, Lebesgue at `shrink·r`.
/// `2->3` keeps `V_s = {x : f_s(x) >= r/2}`: any `r/2`-ball meeting `V_s`
/// has its center in `U_s`, so it meets at most `m(U)` elements.
/// `3->1` first-fit colors elements closer than `r` into families.
pub fn characterization_convert<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    input: &CoverForm<S>,
    direction: Direction,
    shrink: &S,
) -> Result<Converted<S>, DimensionError> {
    match (direction, input) {
        (Direction::DecompositionToLebesgue, CoverForm::Decomposition(d)) => {
            let cover = decomposition_to_lebesgue_cover(space, d, shrink)?;
            let r = shrink.clone() * d.r.clone();
            let profile = lebesgue_profile(space, &cover)?;
            Ok(Converted {
                count: profile.mult_open_max,
                lebesgue: profile.global.finite().cloned(),
                ratio: profile.mesh.clone() / r.clone(),
                mesh: profile.mesh,
                r,
                cover,
                family_of: None,
            })
        }
        (Direction::LebesgueToBallCount, CoverForm::Cover(u, r)) => {
            if !crate::covers::lebesgue_number(space, u).at_least(r) {
                return Err(DimensionError::Parameter(format!("cover is not {}-Lebesgue", r.to_exact_string())));
            }
            let half = r.clone() / S::from_i64(2);
            let mut elements = Vec::with_capacity(u.len());
            for s in 0..u.len() {
                let mut e = Vec::new();
                for x in space.points() {
                    if boundary_distance(space, u, s, x)?.at_least(&half) {
                        e.push(x);
                    }
                }
                elements.push(e);
            }
            let cover = Cover::indexed(space.len(), elements)?.without_empty();
            let m = mesh(space, &cover);
            Ok(Converted {
                count: ball_count(space, &cover, &half),
                lebesgue: None,
                ratio: m.clone() / half.clone(),
                mesh: m,
                r: half,
                cover,
                family_of: None,
            })
        }
        (Direction::BallCountToDecomposition, CoverForm::Cover(v, r)) => {
            let mut family_of: Vec<usize> = Vec::with_capacity(v.len());
            for k in 0..v.len() {
                let mut c = 0;
                while (0..k).any(|j| {
                    family_of[j] == c && space.set_distance(v.element(k), v.element(j)).is_some_and(|d| !r.le_tol(&d))
                }) {
                    c += 1;
                }
                family_of.push(c);
            }
            let families = family_of.iter().copied().max().map_or(1, |m| m + 1);
            let d = FamilyDecomposition::new(v.clone(), family_of.clone(), families, r.clone())?;
            let report = check_decomposition(space, &d)?;
            Ok(Converted {
                cover: v.clone(),
                family_of: Some(family_of),
                r: r.clone(),
                ratio: report.bound_ratio,
                mesh: report.mesh,
                count: families,
                lebesgue: None,
            })
        }
        _ => Err(DimensionError::Parameter(format!("input form does not match direction {direction:?}"))),
    }
}

/// One scale of the union harness.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnionRow {
    pub r: f64,
    pub a: (usize, usize),
    pub b: (usize, usize),
    pub union: (usize, usize),
    /// Smallest tried multiple `k` of `C` at which the union reaches
    /// `max(n_A, n_B)` (upper bounds), if any.
    pub inflation: Option<f64>,
}

/// Measures dimensions of `A`, `B` and `A ∪ B` at each scale, and how much
/// `C` must grow for the union to match the larger part. Nothing is asserted.
pub fn union_harness<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    a: &[usize],
    b: &[usize],
    c: &S,
    scales: &[S],
    search: SearchMode,
) -> Result<Vec<UnionRow>, DimensionError> {
    let sa = space.subspace(a)?;
    let sb = space.subspace(b)?;
    let mut union: Vec<usize> = a.iter().chain(b).copied().collect();
    union.sort_unstable();
    union.dedup();
    let su = space.subspace(&union)?;
    let mut rows = Vec::new();
    for r in scales {
        let da = scale_dimension(&sa, r, c, search)?;
        let db = scale_dimension(&sb, r, c, search)?;
        let du = scale_dimension(&su, r, c, search)?;
        let target = da.upper.max(db.upper);
        let mut inflation = None;
        for k in 0..8 {
            let factor = S::from_i64(1 << k);
            if scale_dimension(&su, r, &(c.clone() * factor), search)?.upper <= target {
                inflation = Some((1u32 << k) as f64);
                break;
            }
        }
        rows.push(UnionRow {
            r: r.to_f64(),
            a: bounds(&da),
            b: bounds(&db),
            union: bounds(&du),
            inflation,
        });
    }
    Ok(rows)
}

/// Lebesgue number as an optional finite value.
pub fn finite_lebesgue<S: Scalar>(space: &FiniteMetricSpace<S>, cover: &Cover) -> Option<S> {
    match crate::covers::lebesgue_number(space, cover) {
        Extended::Finite(v) => Some(v),
        Extended::Infinite => None,
    }
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
    fn small_scale_gives_singletons() {
        let x = path(5);
        let s = find_decomposition(&x, &Rational::from_ratio(1, 2), &q(1), 0, SearchMode::Auto).unwrap();
        let d = s.found().unwrap();
        assert_eq!(d.cover, Cover::singletons(5));
        assert_eq!(d.families, 1);
    }

    #[test]
    fn large_scale_gives_whole_space() {
        let x = path(5);
        let s = find_decomposition(&x, &q(4), &q(1), 0, SearchMode::Auto).unwrap();
        assert_eq!(s.found().unwrap().cover, Cover::whole(5));
    }

    #[test]
    fn six_point_path_at_r2_c1() {
        let x = path(6);
        assert_eq!(find_decomposition(&x, &q(2), &q(1), 0, SearchMode::Auto).unwrap(), Search::NotFound);
        let s = find_decomposition(&x, &q(2), &q(1), 1, SearchMode::ExactOnly).unwrap();
        let d = s.found().unwrap();
        assert!(check_decomposition(&x, d).unwrap().is_valid);
        assert!(check_decomposition(&x, d).unwrap().mesh <= q(2));
    }

    #[test]
    fn exact_search_beats_greedy_or_matches() {
        let x = path(9);
        let d = scale_dimension(&x, &q(2), &q(2), SearchMode::Auto).unwrap();
        assert_eq!((d.lower, d.upper), (1, 1));
        assert!(d.exact);
    }

    #[test]
    fn singleton_space_is_zero_dimensional() {
        let x = path(1);
        let q1 = DimQuery::new(&x, q(1), Some(vec![q(1), q(5)])).unwrap();
        assert_eq!(scale_range_dimension(&x, &q1).unwrap().value(), Some(0));
    }

    #[test]
    fn conversions_measure_constants() {
        let x = path(8);
        let d = scale_dimension(&x, &q(2), &q(2), SearchMode::Auto).unwrap().witness;
        let quarter = Rational::from_ratio(1, 4);
        let c2 = characterization_convert(&x, &CoverForm::Decomposition(d.clone()), Direction::DecompositionToLebesgue, &quarter)
            .unwrap();
        assert!(c2.count <= d.families);
        let c3 = characterization_convert(&x, &CoverForm::Cover(c2.cover.clone(), c2.r.clone()), Direction::LebesgueToBallCount, &quarter)
            .unwrap();
        assert!(c3.count <= c2.count);
        let c1 = characterization_convert(&x, &CoverForm::Cover(c3.cover.clone(), c3.r.clone()), Direction::BallCountToDecomposition, &quarter)
            .unwrap();
        assert!(c1.count >= 1);
    }

    #[test]
    fn relation_intervals() {
        assert_eq!(compare_le((0, 1), (1, 2)), Relation::Holds);
        assert_eq!(compare_le((2, 2), (0, 1)), Relation::Violated);
        assert_eq!(compare_le((0, 2), (1, 1)), Relation::Undetermined);
    }
}
