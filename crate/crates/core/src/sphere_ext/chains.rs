//! r-chain components and the dimension-zero certificate.

use std::collections::VecDeque;

use serde::Serialize;

use crate::metric::FiniteMetricSpace;
use crate::scalar::Scalar;

use super::SphereError;

/// Which distances link two points of a chain.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ChainRule {
    /// `d(x, y) <= r`.
    #[default]
    AtMost,
    /// `d(x, y) < r`. Components under this rule are exactly the finest
    /// partition into sets at mutual distance at least `r`.
    LessThan,
}

impl ChainRule {
    pub fn links<S: Scalar>(self, d: &S, r: &S) -> bool {
        match self {
            ChainRule::AtMost => d.le_tol(r),
            ChainRule::LessThan => d.lt_strict(r),
        }
    }
}

/// Equivalence classes of the r-chain relation with their diameters.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainPartition<S> {
    /// Sorted components, ordered by smallest point.
    pub components: Vec<Vec<usize>>,
    pub diameters: Vec<S>,
}

pub fn chain_components<S: Scalar>(space: &FiniteMetricSpace<S>, r: &S, rule: ChainRule) -> ChainPartition<S> {
    let n = space.len();
    let mut seen = vec![false; n];
    let mut components = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut component = vec![start];
        let mut queue = VecDeque::from([start]);
        while let Some(x) = queue.pop_front() {
            for y in 0..n {
                if !seen[y] && rule.links(space.dist(x, y), r) {
                    seen[y] = true;
                    component.push(y);
                    queue.push_back(y);
                }
            }
        }
        component.sort_unstable();
        components.push(component);
    }
    let diameters = components.iter().map(|c| space.set_diameter(c)).collect();
    ChainPartition { components, diameters }
}

/// A chain component too large for the bound, with a farthest pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainWitness {
    pub component: Vec<usize>,
    pub diameter: f64,
    pub pair: (usize, usize),
}

/// Verdict at one scale.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimZeroScale {
    pub r: f64,
    pub components: usize,
    pub components_bounded: bool,
    pub witness: Option<ChainWitness>,
}

/// For each scale, whether every r-chain component has diameter at most `C·r`.
pub fn dim_zero_certificate<S: Scalar>(
    space: &FiniteMetricSpace<S>,
    c: &S,
    scales: &[S],
    rule: ChainRule,
) -> Result<Vec<DimZeroScale>, SphereError> {
    if *c <= S::one() {
        return Err(SphereError::Precondition(format!("C must exceed 1, got {}", c.to_exact_string())));
    }
    let mut out = Vec::with_capacity(scales.len());
    for r in scales {
        if *r <= S::zero() {
            return Err(SphereError::Precondition(format!("scale {} is not positive", r.to_exact_string())));
        }
        let partition = chain_components(space, r, rule);
        let bound = c.clone() * r.clone();
        let witness = partition
            .components
            .iter()
            .zip(&partition.diameters)
            .find(|(_, d)| !d.le_tol(&bound))
            .map(|(comp, d)| {
                let mut pair = (comp[0], comp[0]);
                for &x in comp {
                    for &y in comp {
                        if *space.dist(x, y) == *d {
                            pair = (x.min(y), x.max(y));
                        }
                    }
                }
                ChainWitness { component: comp.clone(), diameter: d.to_f64(), pair }
            });
        out.push(DimZeroScale {
            r: r.to_f64(),
            components: partition.components.len(),
            components_bounded: witness.is_none(),
            witness,
        });
    }
    Ok(out)
}
