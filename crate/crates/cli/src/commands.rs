//! One function per subcommand. Each returns an [`Outcome`] or a core
//! error; the caller maps errors to exit codes.

use std::fs;
use std::io::Read;
use std::path::Path;

use chen_core::{
    alpha_identity_residual_perturbed, bound_real, check_lagrangian_symmetry,
    coefficient_comparison, equality_case_generate, equality_shape_detect, factorization_check,
    lagrangian_decomposition_gap, mean_curvature, numeric_max_oracle, random_lagrangian,
    random_orthogonal, random_shape, real_decomposition_gap, restricted_hessian_eigenvalues,
    run_sweep, sample_rng, solve_closed_form, solve_kkt, theta_k, theta_k_bruteforce, verify_with,
    AmbientForm, BoundKind, CurvatureView, Error, QpDocument, QpSolutionDoc, Result, ShapeDocument,
    ShapeOperatorSet, SolveMethod, SpaceFormKind, SweepConfig, TraceConstrainedQp, VerifyOptions,
};
use serde_json::json;

use crate::output::{sig12, Outcome};

/// Environment variables that override verification tolerances.
pub const ENV_HOLDS_TOL: &str = "CHEN_HOLDS_TOL";
pub const ENV_EQUALITY_TOL: &str = "CHEN_EQUALITY_TOL";

fn env_tolerance(name: &str) -> Result<Option<f64>> {
    match std::env::var(name) {
        Err(_) => Ok(None),
        Ok(raw) => {
            let v: f64 = raw
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("{name}={raw} is not a number")))?;
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "{name}={raw} must be a nonnegative finite number"
                )));
            }
            Ok(Some(v))
        }
    }
}

fn verify_options() -> Result<VerifyOptions> {
    let mut opts = VerifyOptions::default();
    if let Some(v) = env_tolerance(ENV_HOLDS_TOL)? {
        opts.holds_tol = v;
    }
    if let Some(v) = env_tolerance(ENV_EQUALITY_TOL)? {
        opts.equality_tol = v;
    }
    Ok(opts)
}

fn read_input(path: &Path) -> Result<String> {
    if path == Path::new("-") {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| Error::Schema(format!("reading stdin: {e}")))?;
        return Ok(buf);
    }
    fs::read_to_string(path).map_err(|e| Error::Schema(format!("reading {}: {e}", path.display())))
}

/// Pick the bound family a document naturally belongs to: real ambient
/// means the real bound; complex ambient means Lagrangian when the data
/// qualifies (square codimension, doubled dimension, fully symmetric
/// coefficients) and totally real otherwise.
fn infer_kind(shape: &ShapeOperatorSet, ambient: &AmbientForm) -> BoundKind {
    match ambient.kind() {
        SpaceFormKind::Real => BoundKind::Real,
        SpaceFormKind::Complex => {
            let qualifies = shape.p() == shape.n()
                && ambient.ambient_real_dim() == 2 * shape.n()
                && check_lagrangian_symmetry(shape, 1e-12)
                    .map(|r| r.symmetric)
                    .unwrap_or(false);
            if qualifies {
                BoundKind::LagrangianOrderN
            } else {
                BoundKind::TotallyReal
            }
        }
    }
}

// ---------------------------------------------------------------------------
// compute
// ---------------------------------------------------------------------------

pub fn compute(input: &Path, orders: &[usize], kind: Option<BoundKind>) -> Result<Outcome> {
    let text = read_input(input)?;
    let doc = ShapeDocument::from_json(&text)?;
    let (shape, ambient) = doc.to_parts()?;
    let n = shape.n();
    let kind = kind.unwrap_or_else(|| infer_kind(&shape, &ambient));
    let orders: Vec<usize> = if orders.is_empty() {
        match kind {
            BoundKind::LagrangianOrderN => vec![n],
            _ => (3..=n).collect(),
        }
    } else {
        orders.to_vec()
    };

    let opts = verify_options()?;
    let view = CurvatureView::new(&shape, &ambient)?;
    let tau = view.scalar_curvature();
    let h = mean_curvature(&shape);

    let mut rows = Vec::new();
    let mut any_violation = false;
    for &k in &orders {
        let verdict = verify_with(&shape, &ambient, k, kind, &opts)?;
        any_violation |= !verdict.holds;
        rows.push((k, tau - verdict.delta, verdict));
    }

    let kind_word = match ambient.kind() {
        SpaceFormKind::Real => "real",
        SpaceFormKind::Complex => "complex",
    };
    let mut lines = vec![
        format!(
            "shape: n={n} p={} in {kind_word} space form, c={}, ambient real dim {}",
            shape.p(),
            sig12(ambient.c()),
            ambient.ambient_real_dim()
        ),
        format!("kind: {kind}"),
        format!("tau = {}", sig12(tau)),
        format!(
            "|H|^2 = {}  (components: {})",
            sig12(h.norm_sq),
            h.components
                .iter()
                .map(|&v| sig12(v))
                .collect::<Vec<_>>()
                .join(", ")
        ),
    ];
    for (k, theta, v) in &rows {
        lines.push(format!(
            "k={k}: theta = {}, delta = {}, bound = {}, slack = {}, holds: {}, equality: {}",
            sig12(*theta),
            sig12(v.delta),
            sig12(v.bound),
            sig12(v.slack),
            v.holds,
            v.equality
        ));
    }

    let json = json!({
        "n": n,
        "p": shape.p(),
        "ambient": { "kind": ambient.kind(), "c": ambient.c(), "ambient_real_dim": ambient.ambient_real_dim() },
        "kind": kind,
        "tau": tau,
        "mean_curvature": { "components": h.components, "norm_sq": h.norm_sq },
        "results": rows
            .iter()
            .map(|(k, theta, v)| json!({ "k": k, "theta": theta, "verdict": v }))
            .collect::<Vec<_>>(),
    });
    Ok(Outcome {
        json,
        text: lines.join("\n"),
        violation: any_violation,
    })
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

#[allow(clippy::too_many_arguments)]
pub fn sweep(
    kind: BoundKind,
    dims: &[usize],
    codims: Option<&[usize]>,
    count: usize,
    seed: u64,
    amplitude: Option<f64>,
    c_min: Option<f64>,
    c_max: Option<f64>,
) -> Result<Outcome> {
    let mut cfg = SweepConfig::new(kind);
    if kind == BoundKind::LagrangianOrderN && codims.is_some() {
        return Err(Error::InconsistentKind {
            kind: "lagrangian".into(),
            reason: "codimension is forced to n; drop --p".into(),
        });
    }
    if !dims.is_empty() {
        cfg.dims = dims.to_vec();
    }
    if let Some(p) = codims {
        cfg.codims = p.to_vec();
    }
    cfg.count = count;
    cfg.seed = seed;
    if let Some(a) = amplitude {
        cfg.amplitude = a;
    }
    if let Some(lo) = c_min {
        cfg.c_range.0 = lo;
    }
    if let Some(hi) = c_max {
        cfg.c_range.1 = hi;
    }
    let opts = verify_options()?;
    cfg.holds_tol = opts.holds_tol;
    cfg.equality_tol = opts.equality_tol;

    let report = run_sweep(&cfg)?;
    let violation = !report.violations.is_empty();

    let mut lines = vec![
        format!(
            "sweep kind={kind} dims={:?} count={} seed={}",
            cfg.dims, cfg.count, cfg.seed
        ),
        format!("samples: {}, checks: {}", report.samples, report.checks),
        format!(
            "min slack: {}",
            report.min_slack.map_or("n/a".into(), sig12)
        ),
    ];
    for ks in &report.per_k {
        lines.push(format!(
            "k={}: checks {}, slack min {} / mean {} / max {}",
            ks.k,
            ks.checks,
            sig12(ks.min_slack),
            sig12(ks.mean_slack),
            sig12(ks.max_slack)
        ));
    }
    lines.push(format!("violations: {}", report.violations.len()));

    Ok(Outcome {
        json: serde_json::to_value(&report).expect("report serializes"),
        text: lines.join("\n"),
        violation,
    })
}

// ---------------------------------------------------------------------------
// qp
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum MethodArg {
    All,
    ClosedForm,
    Kkt,
    Oracle,
}

/// Bound family as a command-line value; mirrors [`BoundKind`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum KindArg {
    Real,
    TotallyReal,
    Lagrangian,
}

impl From<KindArg> for BoundKind {
    fn from(kind: KindArg) -> Self {
        match kind {
            KindArg::Real => BoundKind::Real,
            KindArg::TotallyReal => BoundKind::TotallyReal,
            KindArg::Lagrangian => BoundKind::LagrangianOrderN,
        }
    }
}

pub fn qp(
    label: &str,
    n: usize,
    k_order: Option<usize>,
    r: Option<usize>,
    trace: f64,
    method: MethodArg,
    starts: usize,
) -> Result<Outcome> {
    let doc = QpDocument {
        label: label.to_string(),
        n,
        k_order,
        r,
        trace,
    };
    let program: TraceConstrainedQp = doc.build()?;

    let mut solutions = serde_json::Map::new();
    let mut lines = vec![format!(
        "program {label}: n={n}{}{} trace={}",
        k_order.map(|k| format!(" k_order={k}")).unwrap_or_default(),
        r.map(|r| format!(" r={r}")).unwrap_or_default(),
        sig12(trace)
    )];
    let mut values = Vec::new();

    let mut run = |m: SolveMethod| -> Result<()> {
        let sol = match m {
            SolveMethod::ClosedForm => solve_closed_form(&program)?,
            SolveMethod::Kkt => solve_kkt(&program)?,
            SolveMethod::NumericOracle => numeric_max_oracle(&program, starts)?,
        };
        let key = match m {
            SolveMethod::ClosedForm => "closed_form",
            SolveMethod::Kkt => "kkt",
            SolveMethod::NumericOracle => "oracle",
        };
        lines.push(format!(
            "{key}: max = {} at ({}), multiplier = {}",
            sig12(sol.max_value),
            sol.point
                .iter()
                .map(|&v| sig12(v))
                .collect::<Vec<_>>()
                .join(", "),
            sig12(sol.multiplier)
        ));
        values.push(sol.max_value);
        solutions.insert(
            key.to_string(),
            serde_json::to_value(QpSolutionDoc::from(&sol)).expect("solution serializes"),
        );
        Ok(())
    };

    match method {
        MethodArg::All => {
            run(SolveMethod::ClosedForm)?;
            run(SolveMethod::Kkt)?;
            run(SolveMethod::NumericOracle)?;
        }
        MethodArg::ClosedForm => run(SolveMethod::ClosedForm)?,
        MethodArg::Kkt => run(SolveMethod::Kkt)?,
        MethodArg::Oracle => run(SolveMethod::NumericOracle)?,
    }

    let certificate = restricted_hessian_eigenvalues(&program);
    let certified = certificate.iter().all(|&ev| ev < 0.0);
    lines.push(format!(
        "restricted Hessian eigenvalues: {} (negative definite: {certified})",
        certificate
            .iter()
            .map(|&v| sig12(v))
            .collect::<Vec<_>>()
            .join(", ")
    ));

    // With every path requested, disagreement is a mathematical violation.
    let spread = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - values.iter().cloned().fold(f64::INFINITY, f64::min);
    let scale = 1.0 + values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let agree = spread <= 1e-6 * scale;
    if method == MethodArg::All {
        lines.push(format!("max-value spread across paths: {}", sig12(spread)));
    }

    let violation = !certified || (method == MethodArg::All && !agree);
    let json = json!({
        "program": { "label": label, "n": n, "k_order": k_order, "r": r, "trace": trace },
        "solutions": solutions,
        "restricted_hessian_eigenvalues": certificate,
        "negative_definite": certified,
        "max_value_spread": if method == MethodArg::All { Some(spread) } else { None },
    });
    Ok(Outcome {
        json,
        text: lines.join("\n"),
        violation,
    })
}

// ---------------------------------------------------------------------------
// equality
// ---------------------------------------------------------------------------

pub fn equality(n: usize, p: usize, a: &[f64], c: f64) -> Result<Outcome> {
    if a.len() != p {
        return Err(Error::InvalidParameter(format!(
            "--a needs exactly p = {p} values, got {}",
            a.len()
        )));
    }
    let shape = equality_case_generate(n, p, a)?;
    let ambient = AmbientForm::real(c, n + p)?;
    let opts = verify_options()?;

    let mut verdicts = Vec::new();
    let mut violation = false;
    for k in 3..=n {
        let v = verify_with(&shape, &ambient, k, BoundKind::Real, &opts)?;
        violation |= !(v.holds && v.equality);
        verdicts.push(v);
    }
    let pattern = equality_shape_detect(&shape, 1e-10);
    violation |= pattern.is_none();

    let doc = ShapeDocument::from_parts(&shape, &ambient);
    let mut lines = vec![format!(
        "equality shape: n={n} p={p} a=({}) c={}",
        a.iter().map(|&v| sig12(v)).collect::<Vec<_>>().join(", "),
        sig12(c)
    )];
    for v in &verdicts {
        lines.push(format!(
            "k={}: delta = {}, bound = {}, slack = {}, equality: {}",
            v.k,
            sig12(v.delta),
            sig12(v.bound),
            sig12(v.slack),
            v.equality
        ));
    }
    lines.push(format!("pattern detected: {}", pattern.is_some()));

    let json = json!({
        "shape": doc,
        "verdicts": verdicts,
        "pattern_detected": pattern.is_some(),
    });
    Ok(Outcome {
        json,
        text: lines.join("\n"),
        violation,
    })
}

// ---------------------------------------------------------------------------
// sample
// ---------------------------------------------------------------------------

pub fn sample(
    n: usize,
    p: Option<usize>,
    seed: u64,
    lagrangian: bool,
    amplitude: f64,
    c: f64,
) -> Result<Outcome> {
    if !(amplitude.is_finite() && amplitude > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "amplitude must be positive and finite, got {amplitude}"
        )));
    }
    let mut rng = sample_rng(seed, 0);
    let (shape, ambient) = if lagrangian {
        if let Some(p) = p {
            if p != n {
                return Err(Error::InvalidParameter(format!(
                    "a Lagrangian sample has p = n = {n}, got --p {p}"
                )));
            }
        }
        let lag = random_lagrangian(n, amplitude, &mut rng)?;
        let ambient = AmbientForm::complex(c, 2 * n)?;
        (lag.into_shape(), ambient)
    } else {
        let p = p.unwrap_or(1);
        let shape = random_shape(n, p, amplitude, &mut rng)?;
        let ambient = AmbientForm::real(c, n + p)?;
        (shape, ambient)
    };
    let doc = ShapeDocument::from_parts(&shape, &ambient);
    let text = doc.to_json_pretty();
    Ok(Outcome {
        json: serde_json::to_value(&doc).expect("document serializes"),
        text,
        violation: false,
    })
}

// ---------------------------------------------------------------------------
// selfcheck
// ---------------------------------------------------------------------------

struct Check {
    name: &'static str,
    passed: bool,
    detail: String,
}

fn check(name: &'static str, passed: bool, detail: String) -> Check {
    Check {
        name,
        passed,
        detail,
    }
}

/// The full invariant battery. Analytic identities ignore the seed by
/// construction; sampled checks use it, so changing the seed must not change
/// any pass/fail outcome.
pub fn selfcheck(seed: u64, perturb_hessian: bool, only: Option<&str>) -> Result<Outcome> {
    let mut checks: Vec<Check> = Vec::new();

    checks.push(check(
        "cubic-factorization",
        factorization_check(),
        "9n^3-6n^2-29n+10 = (3n+5)(3n-1)(n-2) for n in 3..=64".into(),
    ));

    let coeff = (3..=10_000usize).all(coefficient_comparison);
    checks.push(check(
        "coefficient-comparison",
        coeff,
        "order-n coefficient never exceeds the generic-order one, n in 3..=10^4".into(),
    ));

    {
        let perturbation = if perturb_hessian { 1e-3 } else { 0.0 };
        let mut worst = 0.0f64;
        for (n, k) in [(3usize, 3usize), (6, 4), (10, 7)] {
            worst = worst.max(alpha_identity_residual_perturbed(
                n,
                k,
                500,
                seed,
                perturbation,
            )?);
        }
        checks.push(check(
            "alpha-identity",
            worst <= 1e-10,
            format!("worst completed-square residual {}", sig12(worst)),
        ));
    }

    {
        let mut worst = 0.0f64;
        let mut ok = true;
        for n in 3..=6usize {
            for &t in &[-2.5f64, 1.0, 4.0] {
                for program in [
                    TraceConstrainedQp::fr_real(n, n, t)?,
                    TraceConstrainedQp::f1_lagrangian(n, t)?,
                    TraceConstrainedQp::fr_lagrangian(n, 2, t)?,
                ] {
                    let closed = solve_closed_form(&program)?;
                    let kkt = solve_kkt(&program)?;
                    let oracle = numeric_max_oracle(&program, 8)?;
                    let scale = 1.0 + closed.max_value.abs();
                    ok &= (closed.max_value - kkt.max_value).abs() <= 1e-10 * scale;
                    ok &= (closed.max_value - oracle.max_value).abs() <= 1e-6 * scale;
                    worst = worst.max((closed.max_value - oracle.max_value).abs() / scale);
                }
            }
        }
        checks.push(check(
            "qp-three-path",
            ok,
            format!("36 programs, worst oracle deviation {}", sig12(worst)),
        ));
    }

    {
        let mut ok = true;
        for n in 3..=16usize {
            for k in 3..=n {
                ok &= restricted_hessian_eigenvalues(&TraceConstrainedQp::fr_real(n, k, 1.0)?)
                    .iter()
                    .all(|&ev| ev < 0.0);
            }
            ok &= restricted_hessian_eigenvalues(&TraceConstrainedQp::f1_lagrangian(n, 1.0)?)
                .iter()
                .all(|&ev| ev < 0.0);
            for r in 2..=n {
                ok &=
                    restricted_hessian_eigenvalues(&TraceConstrainedQp::fr_lagrangian(n, r, 1.0)?)
                        .iter()
                        .all(|&ev| ev < 0.0);
            }
        }
        checks.push(check(
            "qp-negativity",
            ok,
            "restricted Hessians for n <= 16".into(),
        ));
    }

    {
        let mut worst = 0.0f64;
        for s in 0..10u64 {
            let mut rng = sample_rng(seed, s);
            let n = 3 + (s as usize) % 3;
            let shape = random_shape(n, 1 + (s as usize) % 3, 1.0, &mut rng)?;
            let ambient = AmbientForm::real(-1.0 + 0.4 * s as f64, n + 3)?;
            let view = CurvatureView::new(&shape, &ambient)?;
            let mut by_pairs = 0.0;
            for i in 0..n {
                for j in i + 1..n {
                    by_pairs += view.sectional(i, j);
                }
            }
            let tau = view.scalar_curvature();
            worst = worst.max((tau - by_pairs).abs() / (1.0 + tau.abs()));
        }
        checks.push(check(
            "tau-two-path",
            worst <= 1e-11,
            format!(
                "trace form vs sectional sum, worst relative gap {}",
                sig12(worst)
            ),
        ));
    }

    {
        let mut worst = f64::NEG_INFINITY;
        for s in 0..10u64 {
            let mut rng = sample_rng(seed, 100 + s);
            let n = 3 + (s as usize) % 3;
            let shape = random_shape(n, 1 + (s as usize) % 2, 1.0, &mut rng)?;
            let ambient = AmbientForm::real(0.5, n + 2)?;
            for k in 3..=n {
                worst = worst.max(real_decomposition_gap(&shape, &ambient, k)?);
            }
        }
        for s in 0..5u64 {
            let mut rng = sample_rng(seed, 200 + s);
            let n = 3 + (s as usize) % 2;
            let lag = random_lagrangian(n, 1.0, &mut rng)?;
            let ambient = AmbientForm::complex(0.8, 2 * n)?;
            worst = worst.max(lagrangian_decomposition_gap(&lag, &ambient)?);
        }
        checks.push(check(
            "decomposition-gap",
            worst <= 1e-10,
            format!("curvature side minus form side, worst {}", sig12(worst)),
        ));
    }

    {
        let mut ok = true;
        for s in 0..4u64 {
            let mut rng = sample_rng(seed, 300 + s);
            let n = 3 + (s as usize) % 2;
            let p = 1 + (s as usize) % 2;
            let a: Vec<f64> = (0..p).map(|i| 0.5 + 0.5 * (s as f64 + i as f64)).collect();
            let shape = equality_case_generate(n, p, &a)?;
            let ambient = AmbientForm::real(0.7, n + p)?;
            let v = verify_with(
                &shape,
                &ambient,
                n,
                BoundKind::Real,
                &VerifyOptions::default(),
            )?;
            ok &= v.slack.abs() <= 1e-8 && v.equality;
            let q = random_orthogonal(n, &mut rng);
            ok &= equality_shape_detect(&shape.rotate_tangent_frame(&q)?, 1e-8).is_some();
        }
        checks.push(check(
            "equality-roundtrip",
            ok,
            "generate, verify zero slack, rotate, re-detect".into(),
        ));
    }

    {
        let mut ok = true;
        let mut worst = 0.0f64;
        for s in 0..3u64 {
            let mut rng = sample_rng(seed, 400 + s);
            let shape = random_shape(3, 1 + (s as usize) % 2, 1.0, &mut rng)?;
            let ambient = AmbientForm::real(0.5, 6)?;
            let searched = theta_k(&shape, &ambient, 3)?;
            let grid = theta_k_bruteforce(&shape, &ambient, 3, 2000)?;
            let gap = (searched.theta - grid.theta).abs();
            worst = worst.max(gap);
            ok &= gap <= 1e-4;
        }
        checks.push(check(
            "theta-grid-agreement",
            ok,
            format!("search vs dense grid, worst gap {}", sig12(worst)),
        ));
    }

    {
        let mut worst = 0.0f64;
        let mut ok = true;
        for n in 3..=8usize {
            for p in 1..=3usize {
                let mut rng = sample_rng(seed, (500 + 10 * n + p) as u64);
                let shape = random_shape(n, p, 1.0, &mut rng)?;
                let h2 = mean_curvature(&shape).norm_sq;
                let mut total = 0.0;
                for op in shape.operators() {
                    total += solve_closed_form(&TraceConstrainedQp::fr_real(n, n, op.trace())?)?
                        .max_value;
                }
                let part = bound_real(n, 0.0, h2)?;
                let gap = (total - part).abs() / (1.0 + part.abs());
                ok &= gap <= 1e-12;
                worst = worst.max(gap);
            }
        }
        checks.push(check(
            "bound-assembly",
            ok,
            format!(
                "per-direction maxima reassemble the |H|^2 term of the real bound, worst relative gap {}",
                sig12(worst)
            ),
        ));
    }

    if let Some(filter) = only {
        checks.retain(|c| c.name.contains(filter));
        if checks.is_empty() {
            return Err(Error::InvalidParameter(format!(
                "no selfcheck matches --only {filter}"
            )));
        }
    }

    let passed = checks.iter().all(|c| c.passed);
    let mut lines = Vec::with_capacity(checks.len() + 1);
    for c in &checks {
        lines.push(format!(
            "{} {} — {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        ));
    }
    lines.push(format!(
        "selfcheck: {}",
        if passed {
            "all checks passed"
        } else {
            "FAILURES"
        }
    ));

    let json = json!({
        "seed": seed,
        "perturb_hessian": perturb_hessian,
        "checks": checks
            .iter()
            .map(|c| json!({ "name": c.name, "passed": c.passed, "detail": c.detail }))
            .collect::<Vec<_>>(),
        "passed": passed,
    });
    Ok(Outcome {
        json,
        text: lines.join("\n"),
        violation: !passed,
    })
}
