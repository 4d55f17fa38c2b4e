//! One function per subcommand. Each loads its inputs, runs the pipeline and
//! hands checks and a JSON result to the report.

use nagata_core::check::Check;
use nagata_core::covers::{
    check_decomposition, lebesgue_decomposition, lebesgue_number, lebesgue_profile, mesh, Cover, FamilyDecomposition,
};
use nagata_core::dimension::{
    macro_dimension, micro_dimension, scale_dimension, scale_range_dimension, DimQuery, DimensionError, Relation,
    ScaleMode, SearchMode, EXACT_THRESHOLD,
};
use nagata_core::extension::{
    extend_into_convex, mcshane_extend, real_lipschitz, total_vector_lipschitz, vector_lipschitz, whitney_extend,
    ConvexBody, PartialMap,
};
use nagata_core::hyperbolic::{
    build_tower, coarse_equivalence_profile, default_basepoint, dh_metric, dim_na_preservation,
    hyperbolicity_certificate, CoverTower, HyperbolicError, HyperbolicReport,
};
use nagata_core::metric::{bilipschitz_bounds, FiniteMetricSpace, Norm};
use nagata_core::nerve::{barycentric_map, build_nerve, verify_barycentric_bound};
use nagata_core::scalar::{Extended, Scalar};
use nagata_core::sphere_ext::chains::{dim_zero_certificate, ChainRule};
use nagata_core::sphere_ext::{
    extension_from_refinement, lift_refinement, nerve_surgery_refine, refinement_from_extension, RunOptions,
    SphereError,
};
use serde_json::{json, Value};

use crate::build::{extender_for_lambda, extender_scale, refiner_for_scale};
use crate::io::{self, float, num, FromJson, Target};
use crate::report::RunReport;
use crate::{suite, Cli, CliError, Command, RuleArg, SearchArg, TransformKind};

/// Shared flags and the report being filled.
struct Ctx<'a> {
    cli: &'a Cli,
    report: &'a mut RunReport,
}

impl Ctx<'_> {
    fn norm(&self) -> Norm {
        self.cli.norm.into()
    }

    fn opts(&self) -> RunOptions {
        RunOptions { force: self.cli.force }
    }

    fn load(&mut self, role: &str, path: &std::path::Path) -> Result<io::Loaded, CliError> {
        let file = io::read(path)?;
        self.report.input(role, &file);
        Ok(file)
    }

    fn space<S: FromJson>(&mut self, path: &std::path::Path) -> Result<FiniteMetricSpace<S>, CliError> {
        let file = self.load("space", path)?;
        io::load_space(&file, self.norm())
    }

    /// A space that must satisfy the metric axioms.
    fn metric<S: FromJson>(&mut self, path: &std::path::Path) -> Result<FiniteMetricSpace<S>, CliError> {
        let space = self.space(path)?;
        if let Some(v) = space.validate().first() {
            return Err(CliError::Input(format!(
                "not a metric: {} fails at {}",
                axiom_name(v),
                labels(&space, &v.witnesses()).join(", ")
            )));
        }
        Ok(space)
    }

    fn float_only(&self) -> Result<(), CliError> {
        if self.cli.exact {
            return Err(CliError::Usage(format!("`{}` runs in floating point only; drop --exact", self.cli.command.name())));
        }
        Ok(())
    }
}

pub fn dispatch(cli: &Cli, report: &mut RunReport) -> Result<(), CliError> {
    let mut ctx = Ctx { cli, report };
    let exact = cli.exact;
    macro_rules! generic {
        ($f:ident($($arg:expr),*)) => {
            if exact {
                $f::<nagata_core::scalar::Rational>(&mut ctx, $($arg),*)
            } else {
                $f::<f64>(&mut ctx, $($arg),*)
            }
        };
    }
    let (checks, result) = match &cli.command {
        Command::Validate(a) => generic!(validate(&a.space))?,
        Command::Transform { space, kind, epsilon } => generic!(transform(&space.space, *kind, epsilon))?,
        Command::Lebesgue { space, cover, shrink } => generic!(lebesgue(&space.space, cover, shrink))?,
        Command::Nerve { space, cover } => {
            ctx.float_only()?;
            nerve(&mut ctx, &space.space, cover)?
        }
        Command::ExtendMcshane { space, map, whitney } => generic!(extend_real(&space.space, map, *whitney))?,
        Command::ExtendSimplex { space, map } => {
            ctx.float_only()?;
            extend_simplex(&mut ctx, &space.space, map)?
        }
        Command::ExtendSphere { space, map, c } => {
            ctx.float_only()?;
            extend_sphere(&mut ctx, &space.space, map, c)?
        }
        Command::Refine { space, cover, r, c } => {
            ctx.float_only()?;
            refine(&mut ctx, &space.space, cover, r.as_deref(), c)?
        }
        Command::Lift { space, cover, s, c } => {
            ctx.float_only()?;
            lift(&mut ctx, &space.space, cover, s.as_deref(), c)?
        }
        Command::Surgery { space, cover, shrink, c } => {
            ctx.float_only()?;
            surgery(&mut ctx, &space.space, cover, shrink.as_deref(), c)?
        }
        Command::Dim { space, c, scales, macro_m, micro, search } => generic!(dim(
            &space.space,
            c,
            scales.as_deref(),
            macro_m.as_deref(),
            micro.as_deref(),
            *search
        ))?,
        Command::Dim0 { space, c, scales, rule } => generic!(dim0(&space.space, c, scales.as_deref(), *rule))?,
        Command::Hyperbolize { space, n, c, growth, basepoint, all_basepoints } => {
            ctx.float_only()?;
            hyperbolize(&mut ctx, &space.space, *n, c, growth, basepoint.as_deref(), *all_basepoints)?
        }
        Command::Corpus { criterion } => {
            ctx.float_only()?;
            corpus(&mut ctx, criterion)?
        }
    };
    ctx.report.finish(checks, result);
    Ok(())
}

type Output = Result<(Vec<Check>, Value), CliError>;

fn labels<S: Scalar>(space: &FiniteMetricSpace<S>, points: &[usize]) -> Vec<String> {
    points.iter().map(|&p| space.label(p).to_string()).collect()
}

fn axiom_name(v: &nagata_core::metric::Violation) -> &'static str {
    use nagata_core::metric::Violation::*;
    match v {
        Diagonal { .. } => "d(x,x) = 0",
        Negative { .. } => "d(x,y) >= 0",
        Indiscernible { .. } => "d(x,y) > 0 for x != y",
        Asymmetric { .. } => "d(x,y) = d(y,x)",
        Triangle { .. } => "d(x,z) <= d(x,y) + d(y,z)",
    }
}

fn extended<S: Scalar>(v: &Extended<S>) -> Value {
    match v.finite() {
        Some(x) => num(x),
        None => Value::String("inf".into()),
    }
}

/// `measured <= bound`, exactly for rationals.
fn check_le<S: Scalar>(name: impl Into<String>, measured: &S, bound: &S) -> Check {
    let mut c = Check::le(name, measured.to_f64(), bound.to_f64());
    c.holds = measured.le_tol(bound);
    c
}

fn sphere_err(e: SphereError) -> CliError {
    match e {
        SphereError::OracleRefused(_) => CliError::Run(e.to_string()),
        other => CliError::Input(other.to_string()),
    }
}

fn dim_err(e: DimensionError) -> CliError {
    match e {
        DimensionError::Parameter(_) | DimensionError::TooLargeForExact { .. } => CliError::Usage(e.to_string()),
        other => CliError::Input(other.to_string()),
    }
}

fn hyp_err(e: HyperbolicError) -> CliError {
    match e {
        HyperbolicError::Parameter(_) => CliError::Usage(e.to_string()),
        HyperbolicError::Gap { .. } | HyperbolicError::NotTotal(..) => CliError::Run(e.to_string()),
        other => CliError::Input(other.to_string()),
    }
}

fn decomposition_json<S: Scalar>(space: &FiniteMetricSpace<S>, d: &FamilyDecomposition<S>) -> Value {
    json!({
        "elements": io::cover_json(space, &d.cover),
        "families": (0..d.families).map(|f| d.members_of(f)).collect::<Vec<_>>(),
        "r": num(&d.r),
    })
}

fn per_point<S: Scalar>(space: &FiniteMetricSpace<S>, values: impl IntoIterator<Item = Value>) -> Value {
    Value::Object(space.labels().iter().cloned().zip(values).collect())
}

fn weights_json(values: &[Vec<f64>]) -> impl Iterator<Item = Value> + '_ {
    values.iter().map(|v| Value::Array(v.iter().map(|x| float(*x)).collect()))
}

fn validate<S: FromJson>(ctx: &mut Ctx, path: &std::path::Path) -> Output {
    let space: FiniteMetricSpace<S> = ctx.space(path)?;
    let violations = space.validate();
    let mut check = Check::flag("metric axioms", violations.is_empty());
    if let Some(v) = violations.first() {
        check = check.with_witness(format!("{}: ({})", axiom_name(v), labels(&space, &v.witnesses()).join(", ")));
    }
    let listed: Vec<Value> = violations
        .iter()
        .take(100)
        .map(|v| {
            let mut entry = serde_json::to_value(v).expect("violations serialize");
            entry["labels"] = json!(labels(&space, &v.witnesses()));
            entry
        })
        .collect();
    let result = json!({
        "points": space.len(),
        "violation_count": violations.len(),
        "violations": listed,
        "diameter": num(&space.diameter()),
        "min_positive_distance": space.min_positive_distance().as_ref().map_or(Value::Null, num),
    });
    Ok((vec![check], result))
}

fn transform<S: FromJson>(ctx: &mut Ctx, path: &std::path::Path, kind: TransformKind, epsilon: &str) -> Output {
    let space: FiniteMetricSpace<S> = ctx.metric(path)?;
    let eps: S = io::parse_number(epsilon)?;
    if eps <= S::zero() {
        return Err(CliError::Usage("epsilon must be positive".into()));
    }
    let out = match kind {
        TransformKind::Max => space.transform_max(&eps),
        TransformKind::Min => space.transform_min(&eps),
    }
    .map_err(|e| CliError::Run(e.to_string()))?;
    let bounds = bilipschitz_bounds(&space, &out).map_err(|e| CliError::Run(e.to_string()))?;
    let checks = vec![Check::flag("transformed table is a metric", out.is_metric())];
    let result = json!({
        "kind": match kind { TransformKind::Max => "max", TransformKind::Min => "min" },
        "epsilon": num(&eps),
        "space": io::space_json(&out),
        "bilipschitz": { "mu": num(&bounds.mu), "lambda": num(&bounds.lambda) },
    });
    Ok((checks, result))
}

fn lebesgue<S: FromJson>(ctx: &mut Ctx, path: &std::path::Path, cover: &std::path::Path, shrink: &str) -> Output {
    let space: FiniteMetricSpace<S> = ctx.metric(path)?;
    let file = ctx.load("cover", cover)?;
    let input = io::load_cover(&file, &space)?;
    let profile = lebesgue_profile(&space, &input.cover).map_err(|e| CliError::Input(e.to_string()))?;
    let mut checks = Vec::new();
    let mut result = json!({
        "local": per_point(&space, profile.local.iter().map(extended)),
        "lebesgue": extended(&profile.global),
        "mesh": num(&profile.mesh),
        "multiplicity_open": profile.mult_open_max,
        "multiplicity_plus_one": profile.mult_plus_one_max,
    });
    if let (Some(r), None) = (&input.r, &input.decomposition) {
        let mut c = Check::flag(format!("L(U) >= r = {}", r.to_exact_string()), profile.global.at_least(r));
        c.measured = Some(profile.global.to_f64());
        c.bound = Some(r.to_f64());
        checks.push(c);
    }
    if let Some(d) = &input.decomposition {
        let shrink: S = io::parse_number(shrink)?;
        let rep = check_decomposition(&space, d).map_err(|e| CliError::Input(e.to_string()))?;
        let mut valid = Check::flag("families are r-disjoint", rep.is_valid);
        if let Some((a, b, dist)) = &rep.violating_pair {
            valid = valid.with_witness(format!("elements {a} and {b} at distance {}", dist.to_exact_string()));
        }
        checks.push(valid);
        result["decomposition_mesh_ratio"] = num(&rep.bound_ratio);
        if rep.is_valid {
            let converted = lebesgue_decomposition(&space, d, &shrink).map_err(|e| CliError::Run(e.to_string()))?;
            let radius = shrink.clone() * d.r.clone();
            let m = converted.cover.multiplicity();
            checks.push(Check::le("multiplicity <= families", m as f64, d.families as f64));
            let l = lebesgue_number(&space, &converted.cover);
            let mut lc = Check::flag("L >= shrink*r", l.at_least(&radius));
            lc.measured = Some(l.to_f64());
            lc.bound = Some(radius.to_f64());
            checks.push(lc);
            let allowed = rep.mesh.clone() + radius.clone() + radius;
            checks.push(check_le("mesh <= mesh(U) + 2*shrink*r", &mesh(&space, &converted.cover), &allowed));
            result["converted"] = decomposition_json(&space, &converted);
        }
    }
    Ok((checks, result))
}

fn nerve(ctx: &mut Ctx, path: &std::path::Path, cover: &std::path::Path) -> Output {
    let space: FiniteMetricSpace<f64> = ctx.metric(path)?;
    let file = ctx.load("cover", cover)?;
    let input = io::load_cover(&file, &space)?;
    let norm = ctx.norm();
    let complex = build_nerve(&input.cover).map_err(|e| CliError::Input(e.to_string()))?;
    let phi = barycentric_map(&space, &input.cover, norm).map_err(|e| CliError::Input(e.to_string()))?;
    let rep = verify_barycentric_bound(&space, &input.cover, norm).map_err(|e| CliError::Input(e.to_string()))?;
    let mut stated = Check::le("Lip(phi) <= 4*m(U)^2/L(U), m(U) = 1 + |T(x)|", rep.measured_lip, rep.stated_bound);
    stated.holds = rep.holds;
    let mut open =
        Check::le("Lip(phi) <= 4*m(U)^2/L(U), m(U) = |T(x)|", rep.measured_lip, rep.open_bound).informational();
    open.holds = rep.holds_open;
    let checks = vec![
        Check::flag("nerve is closed under faces", complex.is_downward_closed()),
        stated,
        open,
    ];
    let values: Vec<Vec<f64>> = phi.iter().map(|p| p.weights.clone()).collect();
    let result = json!({
        "nerve": complex,
        "barycentric": per_point(&space, weights_json(&values)),
        "bound": rep,
    });
    Ok((checks, result))
}

fn extend_real<S: FromJson>(ctx: &mut Ctx, path: &std::path::Path, map: &std::path::Path, whitney: bool) -> Output {
    let space: FiniteMetricSpace<S> = ctx.metric(path)?;
    let file = ctx.load("map", map)?;
    let input = io::load_map(&file, &space)?;
    if input.target != Target::Real {
        return Err(CliError::Input("extend-mcshane needs a map with target kind `real`".into()));
    }
    let lambda = S::from_json(&input.lambda).map_err(|e| CliError::Input(format!("lambda: {e}")))?;
    let f = PartialMap::new(input.domain.clone(), input.real_values::<S>()?).map_err(|e| CliError::Input(e.to_string()))?;
    let ext = if whitney { whitney_extend(&space, &f, &lambda) } else { mcshane_extend(&space, &f, &lambda) }
        .map_err(|e| CliError::Input(e.to_string()))?;
    let kept = f.domain.iter().zip(&f.values).all(|(&a, v)| ext.values[a] == *v);
    let lip = real_lipschitz(&space, &PartialMap::total(ext.values.clone()));
    let checks = vec![
        Check::flag("extension restricts to f on A", kept),
        check_le("Lip(extension) <= lambda", &lip, &ext.lambda_effective),
    ];
    let result = json!({
        "method": if whitney { "whitney" } else { "mcshane" },
        "values": per_point(&space, ext.values.iter().map(num)),
        "lambda_declared": num(&ext.lambda_declared),
        "lambda_on_domain": num(&ext.lambda_on_domain),
        "lambda_effective": num(&ext.lambda_effective),
        "measured_lip": num(&lip),
        "warnings": ext.warnings,
    });
    Ok((checks, result))
}

fn float_lambda(input: &io::MapInput) -> Result<f64, CliError> {
    f64::from_json(&input.lambda).map_err(|e| CliError::Input(format!("lambda: {e}")))
}

fn extend_simplex(ctx: &mut Ctx, path: &std::path::Path, map: &std::path::Path) -> Output {
    let space: FiniteMetricSpace<f64> = ctx.metric(path)?;
    let file = ctx.load("map", map)?;
    let input = io::load_map(&file, &space)?;
    let (body, norm) = match input.target {
        Target::Simplex { vertices, norm } => (ConvexBody::ProbabilitySimplex { dim: vertices }, norm),
        Target::CornerSimplex { dim, norm } => (ConvexBody::CornerSimplex { dim }, norm),
        _ => return Err(CliError::Input("extend-simplex needs target kind `simplex` or `corner_simplex`".into())),
    };
    let lambda = float_lambda(&input)?;
    let f = PartialMap::new(input.domain.clone(), input.vector_values()?).map_err(|e| CliError::Input(e.to_string()))?;
    let ext = extend_into_convex(&space, &f, lambda, body, norm).map_err(|e| CliError::Input(e.to_string()))?;
    let kept = f.domain.iter().zip(&f.values).all(|(&a, v)| ext.values[a] == *v);
    let outside = ext.values.iter().enumerate().find_map(|(x, v)| body.contains(v).err().map(|e| (x, e)));
    let mut inside = Check::flag("image inside the simplex", outside.is_none());
    if let Some((x, why)) = outside {
        inside = inside.with_witness(format!("{}: {why}", space.label(x)));
    }
    let lip = total_vector_lipschitz(&space, &ext.values, norm);
    let factor = body.extension_factor(norm);
    let checks = vec![
        Check::flag("extension restricts to f on A", kept),
        inside,
        Check::le(
            if norm == Norm::L2 { "Lip <= sqrt(n)*lambda" } else { "Lip <= n^2*lambda" },
            lip,
            factor * ext.lambda_effective,
        ),
    ];
    let result = json!({
        "body": body,
        "norm": norm,
        "values": per_point(&space, weights_json(&ext.values)),
        "lambda_declared": float(ext.lambda_declared),
        "lambda_on_domain": float(ext.lambda_on_domain),
        "lambda_effective": float(ext.lambda_effective),
        "measured_lip": float(lip),
        "factor": float(factor),
        "warnings": ext.warnings,
    });
    Ok((checks, result))
}

fn extend_sphere(ctx: &mut Ctx, path: &std::path::Path, map: &std::path::Path, c: &str) -> Output {
    let space: FiniteMetricSpace<f64> = ctx.metric(path)?;
    let file = ctx.load("map", map)?;
    let input = io::load_map(&file, &space)?;
    let Target::SimplexBoundary { vertices, norm } = input.target else {
        return Err(CliError::Input("extend-sphere needs target kind `simplex_boundary`".into()));
    };
    if vertices < 2 {
        return Err(CliError::Input("a simplex boundary needs at least 2 vertices".into()));
    }
    let c: f64 = io::parse_number(c)?;
    let lambda = float_lambda(&input)?;
    let f = PartialMap::new(input.domain.clone(), input.vector_values()?).map_err(|e| CliError::Input(e.to_string()))?;
    let lambda_used = lambda.max(vector_lipschitz(&space, &f, norm));
    let lambda_used = if lambda_used > 0.0 { lambda_used } else { 1.0 / space.diameter().max(1.0) };
    let r = extender_scale(norm, vertices - 2, lambda_used);
    let refiner = refiner_for_scale(&space, vertices, r, c).map_err(sphere_err)?;
    let out = extension_from_refinement(&refiner, &space, &f, lambda, norm, ctx.opts()).map_err(sphere_err)?;
    let result = json!({
        "values": per_point(&space, weights_json(&out.values)),
        "r": float(out.r),
        "s": float(out.s),
        "t": float(out.t),
        "constant": float(out.constant),
        "lambda_effective": float(out.lambda_effective),
        "measured_lip": float(out.measured_lip),
        "oracle_called": out.oracle_called,
        "u_cover": io::cover_json(&space, &out.u_cover),
        "v_cover": out.v_cover.as_ref().map(|v| io::cover_json(&space, v)),
        "oracle_cover": io::cover_json(&space, refiner.cover()),
        "warnings": out.warnings,
    });
    Ok((out.checks, result))
}

/// `L(U)`, or the diameter (at least 1) when some element is the whole space.
fn default_scale(space: &FiniteMetricSpace<f64>, cover: &Cover) -> f64 {
    lebesgue_number(space, cover).finite().copied().unwrap_or_else(|| space.diameter().max(1.0))
}

fn refine(ctx: &mut Ctx, path: &std::path::Path, cover: &std::path::Path, r: Option<&str>, c: &str) -> Output {
    let space: FiniteMetricSpace<f64> = ctx.metric(path)?;
    let file = ctx.load("cover", cover)?;
    let input = io::load_cover(&file, &space)?;
    let k = input.cover.len();
    if k < 2 {
        return Err(CliError::Input("refine needs a cover of at least 2 elements".into()));
    }
    let c: f64 = io::parse_number(c)?;
    let r = match r {
        Some(t) => io::parse_number(t)?,
        None => input.r.unwrap_or_else(|| default_scale(&space, &input.cover)),
    };
    let lambda = 4.0 * (k * k) as f64 / r;
    let ext = extender_for_lambda(&space, k - 2, lambda, ctx.norm(), c).map_err(sphere_err)?;
    let out = refinement_from_extension(&ext, &space, &input.cover, r, ctx.opts()).map_err(sphere_err)?;
    let result = json!({
        "cover": io::cover_json(&space, &out.cover),
        "r": float(r),
        "t": float(out.t),
        "lambda": float(out.lambda),
        "phi_lip": float(out.phi_lip),
        "g_lip": float(out.g_lip),
        "boundary_points": labels(&space, &out.boundary_points),
        "oracle_called": out.oracle_called,
        "warnings": out.warnings,
    });
    Ok((out.checks, result))
}

fn lift(ctx: &mut Ctx, path: &std::path::Path, cover: &std::path::Path, s: Option<&str>, c: &str) -> Output {
    let space: FiniteMetricSpace<f64> = ctx.metric(path)?;
    let file = ctx.load("cover", cover)?;
    let input = io::load_cover(&file, &space)?;
    if input.cover.len() < 3 {
        return Err(CliError::Input("lift needs a cover of at least 3 elements".into()));
    }
    let c: f64 = io::parse_number(c)?;
    let s = match s {
        Some(t) => io::parse_number(t)?,
        None => input.r.unwrap_or_else(|| default_scale(&space, &input.cover)),
    };
    let inner = refiner_for_scale(&space, input.cover.len() - 1, s / 4.0, c).map_err(sphere_err)?;
    let out = lift_refinement(&inner, &space, &input.cover, s, ctx.opts()).map_err(sphere_err)?;
    let result = json!({
        "cover": io::cover_json(&space, &out.cover),
        "s": float(s),
        "t": float(out.t),
        "a": labels(&space, &out.a),
        "oracle_called": out.oracle_called,
    });
    Ok((out.checks, result))
}

fn surgery(ctx: &mut Ctx, path: &std::path::Path, cover: &std::path::Path, shrink: Option<&str>, c: &str) -> Output {
    let space: FiniteMetricSpace<f64> = ctx.metric(path)?;
    let file = ctx.load("cover", cover)?;
    let input = io::load_cover(&file, &space)?;
    let Some(mut decomp) = input.decomposition else {
        return Err(CliError::Input("surgery needs a cover file with `families` and `r`".into()));
    };
    if let Some(shrink) = shrink {
        let shrink: f64 = io::parse_number(shrink)?;
        decomp = lebesgue_decomposition(&space, &decomp, &shrink).map_err(|e| CliError::Input(e.to_string()))?;
    }
    let c: f64 = io::parse_number(c)?;
    let n = decomp.families.saturating_sub(2);
    let lambda = 4.0 * ((n + 2) * (n + 2)) as f64 / decomp.r;
    let ext = extender_for_lambda(&space, n, lambda, Norm::L1, c).map_err(sphere_err)?;
    let out = nerve_surgery_refine(&ext, &space, &decomp, ctx.opts()).map_err(sphere_err)?;
    let result = json!({
        "n": n,
        "input": decomposition_json(&space, &decomp),
        "cover": io::cover_json(&space, &out.cover.cover),
        "simplices": out.simplices,
        "lambda": float(out.lambda),
        "k": float(out.k),
        "c": float(out.c),
        "d": float(out.d),
        "f_lip": float(out.f_lip),
        "g_lip": float(out.g_lip),
    });
    Ok((out.checks, result))
}

fn search_mode(s: SearchArg) -> SearchMode {
    match s {
        SearchArg::Auto => SearchMode::Auto,
        SearchArg::Exact => SearchMode::ExactOnly,
        SearchArg::Greedy => SearchMode::GreedyOnly,
    }
}

fn dim<S: FromJson>(
    ctx: &mut Ctx,
    path: &std::path::Path,
    c: &str,
    scales: Option<&str>,
    macro_m: Option<&str>,
    micro: Option<&str>,
    search: SearchArg,
) -> Output {
    let space: FiniteMetricSpace<S> = ctx.metric(path)?;
    let c: S = io::parse_number(c)?;
    let scales = scales.map(io::parse_scales::<S>).transpose()?;
    let search = search_mode(search);
    let mut query = DimQuery::new(&space, c.clone(), scales).map_err(dim_err)?.with_search(search);
    let functor = match (macro_m, micro) {
        (Some(m), _) => Some((true, io::parse_number::<S>(m)?)),
        (None, Some(m)) => Some((false, io::parse_number::<S>(m)?)),
        _ => None,
    };
    if let Some((is_macro, m)) = &functor {
        query = query.with_mode(if *is_macro { ScaleMode::Macro(m.clone()) } else { ScaleMode::Micro(m.clone()) });
    }
    let report = scale_range_dimension(&space, &query).map_err(dim_err)?;
    let mut checks = Vec::new();
    let mut rows = Vec::new();
    for s in &report.scales {
        let rep = check_decomposition(&space, &s.witness).map_err(|e| CliError::Run(e.to_string()))?;
        let bound = c.clone() * s.r.clone();
        let mut check = Check::flag(format!("witness at r = {} is r-disjoint with mesh <= C*r", s.r.to_exact_string()), rep.is_valid && rep.mesh.le_tol(&bound));
        check.measured = Some(rep.mesh.to_f64());
        check.bound = Some(bound.to_f64());
        checks.push(check);
        rows.push(json!({
            "r": num(&s.r),
            "lower": s.lower,
            "upper": s.upper,
            "exact": s.exact,
            "method": s.method,
            "witness": decomposition_json(&space, &s.witness),
        }));
    }
    let mut result = json!({
        "c": num(&report.c),
        "search": search,
        "scales": rows,
        "skipped": report.skipped.iter().map(num).collect::<Vec<_>>(),
        "lower": report.lower,
        "upper": report.upper,
        "exact": report.exact,
        "value": report.value(),
    });
    if let Some((is_macro, m)) = functor {
        let all: Vec<S> = query.scales.clone();
        let fr = if is_macro { macro_dimension(&space, &c, &all, &m, search) } else { micro_dimension(&space, &c, &all, &m, search) }
            .map_err(dim_err)?;
        let violated = fr.rows.iter().find(|r| r.verdict == Relation::Violated);
        let mut check = Check::flag(format!("{} relation at every scale", fr.kind), violated.is_none());
        if let Some(row) = violated {
            check = check.with_witness(format!("r = {}: {}", row.r, row.relation));
        }
        checks.push(check);
        result["functor"] = serde_json::to_value(&fr).expect("functor reports serialize");
    }
    Ok((checks, result))
}

/// Distinct distances and the midpoints between them, plus half the
/// smallest and twice the largest.
fn dim0_default_scales<S: Scalar>(space: &FiniteMetricSpace<S>) -> Vec<S> {
    let d = space.distinct_distances();
    let half = S::from_ratio(1, 2);
    let two = S::from_i64(2);
    let mut out = d.clone();
    out.extend(d.windows(2).map(|w| (w[0].clone() + w[1].clone()) * half.clone()));
    if let (Some(first), Some(last)) = (d.first(), d.last()) {
        out.push(first.clone() * half.clone());
        out.push(last.clone() * two);
    }
    if out.is_empty() {
        out.push(S::one());
    }
    out.sort_by(|a, b| a.partial_cmp(b).expect("scales are comparable"));
    out
}

fn dim0<S: FromJson>(ctx: &mut Ctx, path: &std::path::Path, c: &str, scales: Option<&str>, rule: RuleArg) -> Output {
    let space: FiniteMetricSpace<S> = ctx.metric(path)?;
    let c: S = io::parse_number(c)?;
    let scales = match scales {
        Some(t) => io::parse_scales::<S>(t)?,
        None => dim0_default_scales(&space),
    };
    let rule = match rule {
        RuleArg::AtMost => ChainRule::AtMost,
        RuleArg::LessThan => ChainRule::LessThan,
    };
    let verdicts = dim_zero_certificate(&space, &c, &scales, rule).map_err(|e| CliError::Usage(e.to_string()))?;
    let cross_check = space.len() <= EXACT_THRESHOLD;
    let mut checks = Vec::new();
    let mut rows = Vec::new();
    for (r, v) in scales.iter().zip(&verdicts) {
        let mut check = Check::flag(format!("chain components at r = {} have diameter <= C*r", r.to_exact_string()), v.components_bounded);
        if let Some(w) = &v.witness {
            check = check.with_witness(format!(
                "component of {} points, diameter {} between {} and {}",
                w.component.len(),
                w.diameter,
                space.label(w.pair.0),
                space.label(w.pair.1)
            ));
        }
        checks.push(check);
        let mut row = serde_json::to_value(v).expect("verdicts serialize");
        row["r"] = num(r);
        if cross_check {
            let exact = scale_dimension(&space, r, &c, SearchMode::ExactOnly).map_err(dim_err)?;
            let agrees = v.components_bounded == (exact.upper == 0);
            checks.push(
                Check::flag(format!("exhaustive search agrees at r = {}", r.to_exact_string()), agrees)
                    .asserted_if(rule == ChainRule::LessThan),
            );
            row["exact_dimension"] = json!(exact.upper);
        }
        rows.push(row);
    }
    let result = json!({
        "c": num(&c),
        "rule": rule,
        "scales": rows,
        "dimension_zero": verdicts.iter().all(|v| v.components_bounded),
    });
    Ok((checks, result))
}

fn certificate_json(d: &FiniteMetricSpace<f64>, rep: &HyperbolicReport) -> Value {
    let triple = |t: &Option<(usize, usize, usize)>| {
        t.map(|(a, b, c)| json!([d.label(a), d.label(b), d.label(c)]))
    };
    json!({
        "basepoint": rep.basepoint_label,
        "delta_measured": float(rep.delta_measured),
        "delta_triple": triple(&rep.delta_triple),
        "side_defect": float(rep.side_defect),
        "side_triple": triple(&rep.side_triple),
        "boundary_margin": float(rep.boundary_margin),
    })
}

fn tower_json(space: &FiniteMetricSpace<f64>, tower: &CoverTower) -> Value {
    json!({
        "n": tower.n,
        "levels": tower.levels.iter().zip(&tower.profiles).enumerate().map(|(i, (cover, p))| json!({
            "level": i + 1,
            "profile": p,
            "elements": io::cover_json(space, cover),
        })).collect::<Vec<_>>(),
        "dropped": tower.dropped,
    })
}

fn hyperbolize(
    ctx: &mut Ctx,
    path: &std::path::Path,
    n: Option<usize>,
    c: &str,
    growth: &str,
    basepoint: Option<&str>,
    all_basepoints: bool,
) -> Output {
    let space: FiniteMetricSpace<f64> = ctx.metric(path)?;
    let c: f64 = io::parse_number(c)?;
    let growth: f64 = io::parse_number(growth)?;
    let tower = match n {
        Some(n) => build_tower(&space, n, c, growth, SearchMode::Auto).map_err(hyp_err)?,
        None => {
            let mut last = None;
            let mut found = None;
            for n in 0..=3 {
                match build_tower(&space, n, c, growth, SearchMode::Auto) {
                    Ok(t) => {
                        found = Some(t);
                        break;
                    }
                    Err(e @ HyperbolicError::Parameter(_)) => return Err(hyp_err(e)),
                    Err(e) => last = Some(e),
                }
            }
            match found {
                Some(t) => t,
                None => return Err(hyp_err(last.expect("at least one attempt"))),
            }
        }
    };
    let dh = dh_metric(&space, &tower).map_err(hyp_err)?;
    let mut checks = Vec::new();
    let violations = dh.validate();
    let mut metric = Check::flag("d_h is a metric", violations.is_empty());
    if let Some(v) = violations.first() {
        metric = metric.with_witness(labels(&dh, &v.witnesses()).join(", "));
    }
    checks.push(metric);
    let bases: Vec<usize> = if all_basepoints {
        dh.points().collect()
    } else if let Some(label) = basepoint {
        vec![dh.index_of(label).ok_or_else(|| CliError::Usage(format!("unknown basepoint `{label}`")))?]
    } else {
        vec![default_basepoint(&dh)]
    };
    let mut certificates = Vec::new();
    for b in bases {
        let rep = hyperbolicity_certificate(&dh, b).map_err(hyp_err)?;
        for mut check in rep.checks.clone() {
            if all_basepoints {
                check.name = format!("{} (basepoint {})", check.name, rep.basepoint_label);
            }
            checks.push(check);
        }
        certificates.push(certificate_json(&dh, &rep));
    }
    let coarse = coarse_equivalence_profile(&space, &dh, &tower).map_err(hyp_err)?;
    for row in &coarse {
        let mut check = Check::flag(
            format!("level {}: d_h <= i implies d <= mesh, d < L implies d_h <= i", row.level),
            row.upper_violations.is_empty() && row.lower_violations.is_empty(),
        );
        if let Some(&(x, y)) = row.upper_violations.first().or(row.lower_violations.first()) {
            check = check.with_witness(format!("{}, {}", space.label(x), space.label(y)));
        }
        checks.push(check);
    }
    let preservation = dim_na_preservation(&dh, &tower, tower.len() + 4).map_err(hyp_err)?;
    for row in &preservation {
        checks.push(Check::flag(
            format!("d_h cover at r = {}: mesh <= r, L >= r/4, multiplicity <= n+1", row.r),
            row.holds,
        ));
    }
    let result = json!({
        "tower": tower_json(&space, &tower),
        "dh": io::space_json(&dh),
        "certificates": certificates,
        "delta_measured": float(certificates_max(&certificates)),
        "coarse": coarse,
        "preservation": preservation,
    });
    Ok((checks, result))
}

fn certificates_max(certs: &[Value]) -> f64 {
    certs.iter().filter_map(|c| c["delta_measured"].as_f64()).fold(0.0, f64::max)
}

fn corpus(ctx: &mut Ctx, criteria: &[u8]) -> Output {
    let seed = ctx.cli.seed;
    if let Some(bad) = criteria.iter().find(|c| !(1..=10).contains(*c)) {
        return Err(CliError::Usage(format!("criterion {bad} does not exist; use 1-10")));
    }
    let wanted = |id: u8| criteria.is_empty() || criteria.contains(&id);
    let mut results = Vec::new();
    let mut surgery_rows = Vec::new();
    for id in 1..=10u8 {
        if !wanted(id) {
            continue;
        }
        let r = match id {
            1 => suite::mcshane_suite(seed),
            2 => suite::simplex_suite(seed),
            3 => suite::barycentric_suite(seed),
            4 => suite::extension_loop_suite(seed),
            5 => suite::refinement_loop_suite(seed),
            6 => suite::lift_suite(seed),
            7 => {
                let (r, rows) = suite::surgery_suite(seed);
                surgery_rows = rows;
                r
            }
            8 => suite::hyperbolic_suite(seed),
            9 => suite::coherence_suite(seed),
            _ => suite::dim_zero_suite(seed),
        };
        eprintln!("{}", r.line());
        results.push(r);
    }
    let checks = results
        .iter()
        .map(|r| {
            let check = Check::flag(format!("criterion {}: {}", r.id, r.name), r.passed);
            match r.failure_samples.first() {
                Some(f) => check.with_witness(f.clone()),
                None => check,
            }
        })
        .collect();
    let result = json!({ "criteria": results, "surgery": surgery_rows });
    Ok((checks, result))
}
