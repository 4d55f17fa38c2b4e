//! The seeded acceptance suite: ten criteria, each a batch of generated
//! instances whose asserted checks must all pass.

use std::time::{Duration, Instant};

use nagata_core::check::{all_pass, describe_failures, Check};
use nagata_core::corpus::{self, Kind};
use nagata_core::covers::{check_decomposition, lebesgue_decomposition, lebesgue_number, Cover};
use nagata_core::dimension::{
    exact_decomposition, greedy_decomposition, macro_dimension, micro_dimension, scale_dimension,
    transport_witness, Relation, SearchMode,
};
use nagata_core::extension::{
    extend_into_convex, mcshane_extend, real_lipschitz, total_vector_lipschitz, vector_lipschitz, whitney_extend,
    ConvexBody, PartialMap,
};
use nagata_core::hyperbolic::{
    build_tower, coarse_equivalence_profile, dh_metric, dim_na_preservation, hyperbolicity_certificate,
};
use nagata_core::metric::{FiniteMetricSpace, Norm};
use nagata_core::nerve::verify_barycentric_bound;
use nagata_core::scalar::{Rational, Scalar};
use nagata_core::sphere_ext::chains::{dim_zero_certificate, ChainRule};
use nagata_core::sphere_ext::{
    extension_from_refinement, lift_refinement, nerve_surgery_refine, refinement_from_extension,
    simplex_extension_factor, RunOptions,
};
use rand::seq::IndexedRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::build::{extender_for_lambda, refiner_for_scale};

/// Outcome of one criterion. Timing is kept out of the serialized form so
/// reports stay byte-identical across runs.
#[derive(Debug, Clone, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: String,
    pub instances: usize,
    pub failures: usize,
    pub passed: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub failure_samples: Vec<String>,
    pub notes: Vec<String>,
    #[serde(skip)]
    pub elapsed: Duration,
    #[serde(skip)]
    pub limit: Duration,
}

impl CriterionResult {
    pub fn within_time(&self) -> bool {
        self.elapsed <= self.limit
    }

    /// `PASS`/`FAIL` line with counts and timing.
    pub fn line(&self) -> String {
        let ok = self.passed && self.within_time();
        format!(
            "[{}] criterion {:>2} {:<34} {} instances, {} failures, {:.2}s (limit {}s)",
            if ok { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.instances,
            self.failures,
            self.elapsed.as_secs_f64(),
            self.limit.as_secs()
        )
    }
}

/// Result of one instance: `Err` carries a description of the failure.
type Trial = Result<(), String>;

const MAX_SAMPLES: usize = 5;

fn finish(id: u8, name: &str, limit_s: u64, start: Instant, trials: Vec<Trial>, notes: Vec<String>) -> CriterionResult {
    let failures: Vec<String> = trials.iter().enumerate().filter_map(|(i, t)| t.as_ref().err().map(|e| format!("#{i}: {e}"))).collect();
    CriterionResult {
        id,
        name: name.into(),
        instances: trials.len(),
        failures: failures.len(),
        passed: failures.is_empty() && !trials.is_empty(),
        failure_samples: failures.into_iter().take(MAX_SAMPLES).collect(),
        notes,
        elapsed: start.elapsed(),
        limit: Duration::from_secs(limit_s),
    }
}

fn checks_trial(checks: &[Check]) -> Trial {
    if all_pass(checks) {
        Ok(())
    } else {
        Err(describe_failures(checks))
    }
}

fn criterion_rng(seed: u64, id: u8) -> corpus::CorpusRng {
    corpus::rng(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ u64::from(id))
}

fn random_space(kinds: &[Kind], lo: usize, hi: usize, rng: &mut corpus::CorpusRng) -> corpus::Sample {
    let kind = *kinds.choose(rng).expect("kinds is nonempty");
    let n = rng.random_range(lo..=hi);
    corpus::sample(kind, n, rng)
}

fn integral(kind: Kind) -> bool {
    matches!(kind, Kind::Path | Kind::Grid | Kind::Tree | Kind::Uniform)
}

// 1. McShane (and Whitney) extension of real functions.

struct RealInstance {
    kind: Kind,
    space: FiniteMetricSpace<f64>,
    domain: Vec<usize>,
    float_values: Vec<f64>,
    exact_values: Vec<Rational>,
}

fn real_trial<S: Scalar>(space: &FiniteMetricSpace<S>, domain: &[usize], values: Vec<S>) -> Trial {
    let f = PartialMap::new(domain.to_vec(), values).map_err(|e| e.to_string())?;
    let lambda = real_lipschitz(space, &f);
    for (name, ext) in [("McShane", mcshane_extend(space, &f, &lambda)), ("Whitney", whitney_extend(space, &f, &lambda))] {
        let ext = ext.map_err(|e| format!("{name}: {e}"))?;
        if ext.lambda_effective != lambda {
            return Err(format!("{name}: effective lambda changed from {lambda}"));
        }
        for (&a, v) in f.domain.iter().zip(&f.values) {
            if ext.values[a] != *v {
                return Err(format!("{name}: value at domain point {a} changed"));
            }
        }
        let lip = real_lipschitz(space, &PartialMap::total(ext.values.clone()));
        if !lip.le_tol(&lambda) {
            return Err(format!("{name}: Lip = {lip} > lambda = {lambda}"));
        }
    }
    Ok(())
}

pub fn mcshane_suite(seed: u64) -> CriterionResult {
    let start = Instant::now();
    let mut rng = criterion_rng(seed, 1);
    let instances: Vec<RealInstance> = (0..500)
        .map(|_| {
            let sample = random_space(&Kind::ALL, 2, 20, &mut rng);
            let n = sample.space.len();
            let frac = rng.random_range(0.1..0.9);
            let domain = corpus::random_subset(n, frac, &mut rng);
            let float_values = domain.iter().map(|_| rng.random_range(-5.0..5.0)).collect();
            let exact_values = domain
                .iter()
                .map(|_| Rational::new(rng.random_range(-20i64..=20).into(), rng.random_range(1i64..=6).into()))
                .collect();
            RealInstance { kind: sample.kind, space: sample.space, domain, float_values, exact_values }
        })
        .collect();
    let trials: Vec<(Trial, bool)> = instances
        .par_iter()
        .map(|inst| {
            let float = real_trial(&inst.space, &inst.domain, inst.float_values.clone()).map_err(|e| format!("float: {e}"));
            if float.is_err() || !integral(inst.kind) {
                return (float, false);
            }
            let exact_space = inst.space.map_scalar(|v| Rational::from_f64(*v).expect("finite"));
            (real_trial(&exact_space, &inst.domain, inst.exact_values.clone()).map_err(|e| format!("exact: {e}")), true)
        })
        .collect();
    let exact_runs = trials.iter().filter(|(_, e)| *e).count();
    let notes = vec![format!("{exact_runs} instances also run with exact rational arithmetic (tolerance 0)")];
    finish(1, "McShane extension", 5, start, trials.into_iter().map(|(t, _)| t).collect(), notes)
}

// 2. Extension into simplices.

fn random_corner_point(dim: usize, rng: &mut corpus::CorpusRng) -> Vec<f64> {
    let e: Vec<f64> = (0..=dim).map(|_| -(1.0f64 - rng.random::<f64>()).ln()).collect();
    let total: f64 = e.iter().sum();
    e[..dim].iter().map(|v| v / total).collect()
}

pub fn simplex_suite(seed: u64) -> CriterionResult {
    let start = Instant::now();
    let mut rng = criterion_rng(seed, 2);
    let instances: Vec<_> = (0..200)
        .map(|i| {
            let dim = rng.random_range(1..=4);
            let norm = if i % 2 == 0 { Norm::L2 } else { Norm::L1 };
            let sample = random_space(&Kind::ALL, 2, 15, &mut rng);
            let domain = corpus::random_subset(sample.space.len(), rng.random_range(0.1..0.9), &mut rng);
            let values: Vec<Vec<f64>> = domain.iter().map(|_| random_corner_point(dim, &mut rng)).collect();
            (sample.space, dim, norm, domain, values)
        })
        .collect();
    // For l1 runs: whether the smaller n^{3/2} bound also held.
    let results: Vec<(Trial, Option<bool>)> = instances
        .par_iter()
        .map(|(space, dim, norm, domain, values)| {
            let run = || -> Result<Option<bool>, String> {
                let body = ConvexBody::CornerSimplex { dim: *dim };
                let f = PartialMap::new(domain.clone(), values.clone()).map_err(|e| e.to_string())?;
                let lambda = vector_lipschitz(space, &f, *norm);
                let ext = extend_into_convex(space, &f, lambda, body, *norm).map_err(|e| e.to_string())?;
                if domain.iter().zip(values).any(|(&a, v)| ext.values[a] != *v) {
                    return Err("values on the domain changed".into());
                }
                if let Some((x, why)) =
                    ext.values.iter().enumerate().find_map(|(x, v)| body.contains(v).err().map(|e| (x, e)))
                {
                    return Err(format!("point {x} left the simplex: {why}"));
                }
                let lip = total_vector_lipschitz(space, &ext.values, *norm);
                let bound = body.extension_factor(*norm) * ext.lambda_effective;
                if !lip.le_tol(&bound) {
                    return Err(format!("dim {dim} {norm:?}: Lip = {lip} > {bound}"));
                }
                let tighter = (*dim as f64).powf(1.5) * ext.lambda_effective;
                Ok((*norm == Norm::L1).then(|| lip.le_tol(&tighter)))
            };
            match run() {
                Ok(flag) => (Ok(()), flag),
                Err(e) => (Err(e), None),
            }
        })
        .collect();
    let l1_runs = results.iter().filter(|r| r.1.is_some()).count();
    let tight = results.iter().filter(|r| r.1 == Some(true)).count();
    let notes = vec![format!("l1 runs within n^(3/2)*lambda as well as n^2*lambda: {tight} of {l1_runs}")];
    finish(2, "extension into simplices", 10, start, results.into_iter().map(|r| r.0).collect(), notes)
}

// 3. Barycentric map bound.

pub fn barycentric_suite(seed: u64) -> CriterionResult {
    let start = Instant::now();
    let mut rng = criterion_rng(seed, 3);
    let instances: Vec<_> = (0..300)
        .map(|_| {
            let sample = random_space(&Kind::ALL, 2, 15, &mut rng);
            let n = sample.space.len();
            let elements = rng.random_range(1..=5.min(n));
            let extra = *[0.0, 0.15, 0.3].choose(&mut rng).expect("nonempty");
            let cover = corpus::random_cover(n, elements, extra, &mut rng);
            (sample.space, cover)
        })
        .collect();
    let results: Vec<(Trial, usize, f64)> = instances
        .par_iter()
        .map(|(space, cover)| {
            let mut open_failures = 0;
            let mut worst = 0.0f64;
            for norm in [Norm::L1, Norm::L2] {
                let rep = match verify_barycentric_bound(space, cover, norm) {
                    Ok(r) => r,
                    Err(e) => return (Err(e.to_string()), 0, 0.0),
                };
                if !rep.holds_open {
                    open_failures += 1;
                }
                if rep.stated_bound > 0.0 {
                    worst = worst.max(rep.measured_lip / rep.stated_bound);
                }
                if !rep.holds {
                    return (
                        Err(format!("{norm:?}: Lip = {} > 4*m^2/L = {}", rep.measured_lip, rep.stated_bound)),
                        open_failures,
                        worst,
                    );
                }
            }
            (Ok(()), open_failures, worst)
        })
        .collect();
    let open: usize = results.iter().map(|r| r.1).sum();
    let worst = results.iter().map(|r| r.2).fold(0.0, f64::max);
    let notes = vec![
        "asserted with m(U) = 1 + |T(x)|".into(),
        format!("with m(U) = |T(x)| instead, the bound fails on {open} of {} (cover, norm) runs", 2 * results.len()),
        format!("largest measured Lip / bound ratio: {worst:.4}"),
    ];
    finish(3, "barycentric Lipschitz bound", 10, start, results.into_iter().map(|r| r.0).collect(), notes)
}

// 4. Sphere extension from a refinement oracle.

fn sphere_map(
    space: &FiniteMetricSpace<f64>,
    k: usize,
    rng: &mut corpus::CorpusRng,
) -> (Vec<usize>, Vec<Vec<f64>>) {
    let n = space.len();
    let mut domain = corpus::random_subset(n, rng.random_range(0.2..0.7), rng);
    if domain.len() < 2 {
        domain = vec![0, n - 1];
    }
    let values = if rng.random_bool(0.5) {
        domain
            .iter()
            .map(|_| {
                let mut v = vec![0.0; k];
                v[rng.random_range(0..k)] = 1.0;
                v
            })
            .collect()
    } else {
        let eps = 10f64.powf(-rng.random_range(0.0..3.0));
        let anchors: Vec<usize> = (0..k - 1).map(|_| rng.random_range(0..n)).collect();
        let missing = rng.random_range(0..k);
        domain
            .iter()
            .map(|&a| {
                let h: Vec<f64> = anchors.iter().map(|&z| 1.0 + eps * space.dist(a, z)).collect();
                let total: f64 = h.iter().sum();
                let mut v: Vec<f64> = h.iter().map(|x| x / total).collect();
                v.insert(missing, 0.0);
                v
            })
            .collect()
    };
    (domain, values)
}

pub fn extension_loop_suite(seed: u64) -> CriterionResult {
    let start = Instant::now();
    let mut rng = criterion_rng(seed, 4);
    let kinds = [Kind::Path, Kind::Grid, Kind::Tree, Kind::Cloud, Kind::Clusters];
    let instances: Vec<_> = (0..100)
        .map(|i| {
            let m = i % 3;
            let norm = if i % 2 == 0 { Norm::L2 } else { Norm::L1 };
            let sample = random_space(&kinds, 4, 16, &mut rng);
            let (domain, values) = sphere_map(&sample.space, m + 2, &mut rng);
            (sample.space, m, norm, domain, values)
        })
        .collect();
    let results: Vec<(Trial, bool, bool)> = instances
        .par_iter()
        .map(|(space, m, norm, domain, values)| {
            let k = m + 2;
            let run = || -> Result<(bool, bool), String> {
                let f = PartialMap::new(domain.clone(), values.clone()).map_err(|e| e.to_string())?;
                let mut lambda = vector_lipschitz(space, &f, *norm);
                if lambda <= 0.0 {
                    lambda = 1.0 / space.diameter();
                }
                let s = simplex_extension_factor(*norm, k);
                let r = 1.0 / (12.0 * s * lambda * k as f64);
                let refiner = refiner_for_scale(space, k, r, 2.0).map_err(|e| e.to_string())?;
                let nontrivial = refiner.cover() != &Cover::singletons(space.len());
                let out = extension_from_refinement(&refiner, space, &f, lambda, *norm, RunOptions::default())
                    .map_err(|e| e.to_string())?;
                checks_trial(&out.checks)?;
                Ok((out.oracle_called, nontrivial))
            };
            match run() {
                Ok((called, nontrivial)) => (Ok(()), called, nontrivial),
                Err(e) => (Err(e), false, false),
            }
        })
        .collect();
    let called = results.iter().filter(|r| r.1).count();
    let nontrivial = results.iter().filter(|r| r.2).count();
    let notes = vec![
        format!("oracle called on {called} instances"),
        format!("{nontrivial} oracles built from a decomposition coarser than singletons"),
    ];
    finish(4, "sphere extension from refinements", 30, start, results.into_iter().map(|r| r.0).collect(), notes)
}

// 5. Refinement from a sphere extender.

fn scale_of(space: &FiniteMetricSpace<f64>, cover: &Cover) -> f64 {
    lebesgue_number(space, cover).finite().copied().unwrap_or_else(|| space.diameter().max(1.0))
}

pub fn refinement_loop_suite(seed: u64) -> CriterionResult {
    let start = Instant::now();
    let mut rng = criterion_rng(seed, 5);
    let instances: Vec<_> = (0..100)
        .map(|i| {
            let m = i % 2;
            let norm = if i % 3 == 0 { Norm::L2 } else { Norm::L1 };
            let sample = random_space(&Kind::ALL, m + 3, 14, &mut rng);
            let cover = corpus::random_cover(sample.space.len(), m + 2, 0.3, &mut rng);
            (sample.space, m, norm, cover)
        })
        .collect();
    let results: Vec<(Trial, bool)> = instances
        .par_iter()
        .map(|(space, m, norm, cover)| {
            let run = || -> Result<bool, String> {
                let r = scale_of(space, cover);
                let lambda = 4.0 * ((m + 2) * (m + 2)) as f64 / r;
                let ext = extender_for_lambda(space, *m, lambda, *norm, 2.0).map_err(|e| e.to_string())?;
                let out = refinement_from_extension(&ext, space, cover, r, RunOptions::default()).map_err(|e| e.to_string())?;
                checks_trial(&out.checks)?;
                Ok(out.oracle_called)
            };
            match run() {
                Ok(called) => (Ok(()), called),
                Err(e) => (Err(e), false),
            }
        })
        .collect();
    let called = results.iter().filter(|r| r.1).count();
    let notes = vec![format!("extender called on {called} instances")];
    finish(5, "refinement from sphere extensions", 30, start, results.into_iter().map(|r| r.0).collect(), notes)
}

// 6. Lifting refiners by one element.

pub fn lift_suite(seed: u64) -> CriterionResult {
    let start = Instant::now();
    let mut rng = criterion_rng(seed, 6);
    let instances: Vec<_> = (0..100)
        .map(|_| {
            let sample = loop {
                let s = random_space(&Kind::ALL, 3, 16, &mut rng);
                if s.space.len() >= 3 {
                    break s;
                }
            };
            let cover = corpus::random_cover(sample.space.len(), 3, 0.3, &mut rng);
            (sample.space, cover)
        })
        .collect();
    let results: Vec<(Trial, bool)> = instances
        .par_iter()
        .map(|(space, w)| {
            let run = || -> Result<bool, String> {
                let s = scale_of(space, w);
                let inner = refiner_for_scale(space, 2, s / 4.0, 2.0).map_err(|e| e.to_string())?;
                let out = lift_refinement(&inner, space, w, s, RunOptions::default()).map_err(|e| e.to_string())?;
                checks_trial(&out.checks)?;
                if out.cover.multiplicity() > 2 {
                    return Err(format!("multiplicity {}", out.cover.multiplicity()));
                }
                Ok(out.oracle_called)
            };
            match run() {
                Ok(called) => (Ok(()), called),
                Err(e) => (Err(e), false),
            }
        })
        .collect();
    let called = results.iter().filter(|r| r.1).count();
    let notes = vec![format!("inner refiner called on {called} instances")];
    finish(6, "lifting refinements", 30, start, results.into_iter().map(|r| r.0).collect(), notes)
}

// 7. Nerve surgery.

#[derive(Debug, Clone, Serialize)]
pub struct SurgeryRow {
    pub space: String,
    pub n: usize,
    pub r: f64,
    pub c: f64,
    pub simplices: usize,
    pub multiplicity: usize,
    pub lebesgue: f64,
    pub lebesgue_bound: f64,
    pub mesh: f64,
    pub mesh_bound: f64,
}

pub fn surgery_suite(seed: u64) -> (CriterionResult, Vec<SurgeryRow>) {
    let start = Instant::now();
    let mut rng = criterion_rng(seed, 7);
    let instances: Vec<_> = (0..30)
        .map(|i| {
            if i % 2 == 0 {
                let w = rng.random_range(12..=20);
                let h = rng.random_range(8..=16);
                let r = rng.random_range(5..=6);
                (format!("grid({w}x{h})"), corpus::grid(w, h), 1, corpus::brick_decomposition(w, h, r))
            } else {
                let n = rng.random_range(20..=40);
                let t = corpus::tree(n, 3, &mut rng);
                let r = f64::from(rng.random_range(5..=8));
                let d = corpus::annulus_decomposition(&t, 0, r);
                (format!("tree({n})"), t, 0, d)
            }
        })
        .collect();
    let results: Vec<Result<SurgeryRow, String>> = instances
        .par_iter()
        .map(|(name, space, n, base)| {
            let dec = lebesgue_decomposition(space, base, &0.25).map_err(|e| format!("{name}: {e}"))?;
            let lambda = 4.0 * ((n + 2) * (n + 2)) as f64 / dec.r;
            let ext = extender_for_lambda(space, *n, lambda, Norm::L1, 2.0).map_err(|e| e.to_string())?;
            let out = nerve_surgery_refine(&ext, space, &dec, RunOptions::default()).map_err(|e| format!("{name}: {e}"))?;
            checks_trial(&out.checks).map_err(|e| format!("{name}: {e}"))?;
            let find = |label: &str| out.checks.iter().find(|c| c.name.starts_with(label)).cloned();
            let leb = find("L(V)").expect("Lebesgue check present");
            let mesh = find("mesh(V)").expect("mesh check present");
            Ok(SurgeryRow {
                space: name.clone(),
                n: *n,
                r: dec.r,
                c: out.c,
                simplices: out.simplices.len(),
                multiplicity: out.cover.cover.multiplicity(),
                lebesgue: leb.measured.unwrap_or(f64::NAN),
                lebesgue_bound: leb.bound.unwrap_or(f64::NAN),
                mesh: mesh.measured.unwrap_or(f64::NAN),
                mesh_bound: mesh.bound.unwrap_or(f64::NAN),
            })
        })
        .collect();
    let rows: Vec<SurgeryRow> = results.iter().filter_map(|r| r.as_ref().ok().cloned()).collect();
    let with_cells = rows.iter().filter(|r| r.simplices > 0).count();
    let slack = rows
        .iter()
        .filter(|r| r.mesh_bound > 0.0)
        .map(|r| r.mesh / r.mesh_bound)
        .fold(0.0, f64::max);
    let notes = vec![
        format!("{with_cells} instances had at least one top simplex to operate on"),
        format!("largest mesh(V) / (4*c*r) ratio: {slack:.4}"),
    ];
    let trials = results.into_iter().map(|r| r.map(|_| ())).collect();
    (finish(7, "nerve surgery", 60, start, trials, notes), rows)
}

// 8. Hyperbolic metric from towers.

pub fn hyperbolic_suite(seed: u64) -> CriterionResult {
    let start = Instant::now();
    let mut rng = criterion_rng(seed, 8);
    let instances: Vec<_> = (0..50).map(|_| random_space(&Kind::ALL, 5, 40, &mut rng)).collect();
    let results: Vec<(Trial, f64, usize)> = instances
        .par_iter()
        .map(|sample| {
            let run = || -> Result<(f64, usize), String> {
                let space = &sample.space;
                let tower = [2.0, 3.0, 4.0]
                    .iter()
                    .find_map(|&c| (0..=3).find_map(|n| build_tower(space, n, c, 4.0, SearchMode::Auto).ok()))
                    .ok_or_else(|| format!("{}: no tower with n <= 3 and C <= 4", sample.name))?;
                let dh = dh_metric(space, &tower).map_err(|e| e.to_string())?;
                if !dh.is_metric() {
                    return Err(format!("{}: d_h is not a metric", sample.name));
                }
                let mut delta = 0.0f64;
                for b in space.points() {
                    let rep = hyperbolicity_certificate(&dh, b).map_err(|e| e.to_string())?;
                    checks_trial(&rep.checks).map_err(|e| format!("{} basepoint {b}: {e}", sample.name))?;
                    delta = delta.max(rep.delta_measured);
                }
                for row in coarse_equivalence_profile(space, &dh, &tower).map_err(|e| e.to_string())? {
                    if !row.upper_violations.is_empty() || !row.lower_violations.is_empty() {
                        return Err(format!("{}: coarse table violated at level {}", sample.name, row.level));
                    }
                }
                for row in dim_na_preservation(&dh, &tower, tower.len() + 4).map_err(|e| e.to_string())? {
                    if !row.holds {
                        return Err(format!("{}: d_h cover at r = {} fails", sample.name, row.r));
                    }
                }
                Ok((delta, tower.len()))
            };
            match run() {
                Ok((d, levels)) => (Ok(()), d, levels),
                Err(e) => (Err(e), 0.0, 0),
            }
        })
        .collect();
    let delta = results.iter().map(|r| r.1).fold(0.0, f64::max);
    let deep = results.iter().filter(|r| r.2 >= 3).count();
    let notes = vec![
        format!("largest measured delta over all towers and basepoints: {delta}"),
        format!("{deep} towers have at least 3 levels"),
    ];
    finish(8, "hyperbolic tower metric", 60, start, results.into_iter().map(|r| r.0).collect(), notes)
}

// 9 and 10 run over the small corpus.

/// All spaces of at most 12 points used by the dimension criteria.
pub fn small_spaces(seed: u64) -> Vec<corpus::Sample> {
    corpus::small_corpus(seed, &[1, 2, 4, 6, 8, 10, 12])
}

/// Distinct distances and the midpoints between consecutive ones.
fn test_scales(space: &FiniteMetricSpace<f64>) -> (Vec<f64>, Vec<f64>) {
    let d = space.distinct_distances();
    let mut mids: Vec<f64> = d.windows(2).map(|w| (w[0] + w[1]) / 2.0).collect();
    if let (Some(first), Some(last)) = (d.first(), d.last()) {
        mids.insert(0, first / 2.0);
        mids.push(last * 2.0);
    }
    if d.is_empty() {
        mids.push(1.0);
    }
    (d, mids)
}

fn coherence_trial(sample: &corpus::Sample, rng_seed: u64) -> Result<usize, String> {
    let space = &sample.space;
    let name = &sample.name;
    let (dists, mids) = test_scales(space);
    let scales: Vec<f64> = dists.iter().chain(&mids).copied().collect();
    let mut checked = 0;
    let err = |e: nagata_core::dimension::DimensionError| format!("{name}: {e}");
    for &c in &[1.0, 2.0] {
        for &r in &scales {
            let greedy = greedy_decomposition(space, &r, &c).map_err(err)?;
            for n in 0..=3 {
                if greedy.families <= n + 1 && exact_decomposition(space, &r, &c, n).map_err(err)?.is_none() {
                    return Err(format!("{name}: greedy succeeds at r={r}, C={c}, n={n} but exact search does not"));
                }
                checked += 1;
            }
            let whole = scale_dimension(space, &r, &c, SearchMode::ExactOnly).map_err(err)?;
            if !check_decomposition(space, &whole.witness).map_err(|e| e.to_string())?.is_valid {
                return Err(format!("{name}: exact witness invalid at r={r}"));
            }
            let mut sub_rng = corpus::rng(rng_seed ^ (r.to_bits() >> 3));
            for _ in 0..2 {
                let subset = corpus::random_subset(space.len(), 0.6, &mut sub_rng);
                let sub = space.subspace(&subset).map_err(|e| e.to_string())?;
                let part = scale_dimension(&sub, &r, &c, SearchMode::ExactOnly).map_err(err)?;
                if part.upper > whole.upper {
                    return Err(format!(
                        "{name}: subspace {subset:?} has dimension {} > {} at r={r}, C={c}",
                        part.upper, whole.upper
                    ));
                }
                checked += 1;
            }
        }
    }
    let delta = space.min_positive_distance().unwrap_or(1.0);
    let diam = space.diameter().max(delta);
    let c = 2.0;
    for (label, epsilons, is_max) in
        [("max", [delta / 2.0, delta, 2.0 * delta], true), ("min", [diam / 2.0, diam, 2.0 * diam], false)]
    {
        let transformed: Vec<FiniteMetricSpace<f64>> = epsilons
            .iter()
            .map(|e| if is_max { space.transform_max(e) } else { space.transform_min(e) })
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        for a in 0..transformed.len() {
            for b in 0..transformed.len() {
                if a == b {
                    continue;
                }
                for &r in &scales {
                    let src = scale_dimension(&transformed[a], &r, &c, SearchMode::ExactOnly).map_err(err)?;
                    let moved = transport_witness(&transformed[a], &transformed[b], &src.witness, &c).map_err(err)?;
                    if !moved.valid {
                        return Err(format!("{name}: {label}(d, {}) witness at r={r} fails in {label}(d, {})", epsilons[a], epsilons[b]));
                    }
                    let dst = scale_dimension(&transformed[b], &moved.decomposition.r, &moved.c, SearchMode::ExactOnly)
                        .map_err(err)?;
                    if dst.upper > src.upper {
                        return Err(format!("{name}: transported dimension {} exceeds {} at r={r}", dst.upper, src.upper));
                    }
                    checked += 1;
                }
            }
        }
    }
    let mut all: Vec<f64> = space.rows().into_iter().flatten().filter(|d| *d > 0.0).collect();
    all.sort_by(f64::total_cmp);
    let m = all.get(all.len() / 2).copied().unwrap_or(1.0);
    for report in [
        macro_dimension(space, &c, &scales, &m, SearchMode::ExactOnly).map_err(err)?,
        micro_dimension(space, &c, &scales, &m, SearchMode::ExactOnly).map_err(err)?,
    ] {
        if let Some(row) = report.rows.iter().find(|r| r.verdict != Relation::Holds) {
            return Err(format!("{name}: {} relation {:?} at r={}: {}", report.kind, row.verdict, row.r, row.relation));
        }
        checked += report.rows.len();
    }
    Ok(checked)
}

pub fn coherence_suite(seed: u64) -> CriterionResult {
    let start = Instant::now();
    let spaces = small_spaces(seed);
    let results: Vec<(Trial, usize)> = spaces
        .par_iter()
        .enumerate()
        .map(|(i, s)| match coherence_trial(s, seed ^ i as u64) {
            Ok(n) => (Ok(()), n),
            Err(e) => (Err(e), 0),
        })
        .collect();
    let comparisons: usize = results.iter().map(|r| r.1).sum();
    let notes = vec![format!("{comparisons} individual comparisons over {} spaces", spaces.len())];
    finish(9, "dimension oracle coherence", 120, start, results.into_iter().map(|r| r.0).collect(), notes)
}

fn dim_zero_trial(sample: &corpus::Sample) -> Result<usize, String> {
    let space = &sample.space;
    let (dists, mids) = test_scales(space);
    let mut checked = 0;
    for c in [1.5, 2.0, 3.0] {
        let scales: Vec<f64> = dists.iter().chain(&mids).copied().collect();
        let strict = dim_zero_certificate(space, &c, &scales, ChainRule::LessThan).map_err(|e| e.to_string())?;
        let loose = dim_zero_certificate(space, &c, &mids, ChainRule::AtMost).map_err(|e| e.to_string())?;
        for (r, verdict) in scales.iter().zip(&strict) {
            let exact = scale_dimension(space, r, &c, SearchMode::ExactOnly).map_err(|e| e.to_string())?;
            if verdict.components_bounded != (exact.upper == 0) {
                return Err(format!(
                    "{}: chains say {} but exact dimension is {} at r={r}, C={c}",
                    sample.name, verdict.components_bounded, exact.upper
                ));
            }
            checked += 1;
        }
        for (verdict, strict_verdict) in loose.iter().zip(&strict[dists.len()..]) {
            if verdict.components_bounded != strict_verdict.components_bounded {
                return Err(format!("{}: chain rules disagree at r={} off the distance set", sample.name, verdict.r));
            }
        }
    }
    Ok(checked)
}

pub fn dim_zero_suite(seed: u64) -> CriterionResult {
    let start = Instant::now();
    let spaces = small_spaces(seed);
    let results: Vec<(Trial, usize)> = spaces
        .par_iter()
        .map(|s| match dim_zero_trial(s) {
            Ok(n) => (Ok(()), n),
            Err(e) => (Err(e), 0),
        })
        .collect();
    let comparisons: usize = results.iter().map(|r| r.1).sum();
    let notes = vec![
        format!("{comparisons} (r, C) verdicts compared over {} spaces", spaces.len()),
        "chains use d < r at the distance set itself; d <= r is compared off it".into(),
    ];
    finish(10, "dimension zero certificate", 30, start, results.into_iter().map(|r| r.0).collect(), notes)
}

/// All ten criteria in order, with the surgery measurement table.
pub fn run_all(seed: u64) -> (Vec<CriterionResult>, Vec<SurgeryRow>) {
    let (surgery, rows) = surgery_suite(seed);
    let results = vec![
        mcshane_suite(seed),
        simplex_suite(seed),
        barycentric_suite(seed),
        extension_loop_suite(seed),
        refinement_loop_suite(seed),
        lift_suite(seed),
        surgery,
        hyperbolic_suite(seed),
        coherence_suite(seed),
        dim_zero_suite(seed),
    ];
    (results, rows)
}
