//! The acceptance gate: eight criteria, one test each, each printing a
//! single machine-greppable PASS/FAIL line. Lines are written straight to
//! the stdout file descriptor so they stay visible in a plain
//! `cargo test --workspace` run, where the harness would capture `println!`.
//!
//! Each criterion is self-contained and asserts its own tolerances; the
//! printed line summarizes the checked volume so a log reader can audit
//! what ran.

use std::io::Write;
use std::time::Instant;

use chen_core::{
    alpha_identity_residual, bound_real, coefficient_comparison, equality_case_generate,
    equality_shape_detect, factorization_check, mean_curvature, numeric_max_oracle,
    random_orthogonal, random_shape, restricted_hessian_eigenvalues, run_sweep, sample_rng,
    solve_closed_form, solve_kkt, theta_k, theta_k_bruteforce, theta_k_with, verify, AmbientForm,
    BoundKind, ShapeOperatorSet, SweepConfig, ThetaOptions, TraceConstrainedQp,
    DEFAULT_BRUTEFORCE_RESOLUTION,
};
use nalgebra::DVector;

const GATE_SEED: u64 = 20_260_819;

fn report(criterion: usize, detail: &str, failures: &[String]) {
    let status = if failures.is_empty() { "PASS" } else { "FAIL" };
    let line = format!("[criterion {criterion}] {status} — {detail}\n");
    // Direct fd write: the test harness only captures the print! macros.
    std::io::stdout()
        .lock()
        .write_all(line.as_bytes())
        .expect("stdout accepts the report line");
    assert!(
        failures.is_empty(),
        "criterion {criterion} failures:\n{}",
        failures.join("\n")
    );
}

/// Criterion 1: the real-family program solved three ways over the full
/// documented grid, against the closed-form pattern, within 5 seconds.
#[test]
fn criterion_1_real_qp_closed_form_grid() {
    let t0 = Instant::now();
    let mut failures = Vec::new();
    let mut instances = 0usize;
    for n in 3..=8usize {
        for k in 3..=n {
            for &t in &[-3.0f64, 1.0, 6.0] {
                instances += 1;
                let qp = TraceConstrainedQp::fr_real(n, k, t).unwrap();
                let closed = solve_closed_form(&qp).unwrap();

                let a = t / (n as f64 - 1.0);
                let max = (n as f64 - 2.0) * t * t / (2.0 * (n as f64 - 1.0));
                if closed.point[0].abs() > 1e-12 {
                    failures.push(format!("n={n} k={k} t={t}: first coordinate not 0"));
                }
                for j in 1..n {
                    if (closed.point[j] - a).abs() > 1e-12 * (1.0 + a.abs()) {
                        failures.push(format!("n={n} k={k} t={t}: coordinate {j} != {a}"));
                    }
                }
                if (closed.max_value - max).abs() > 1e-12 * (1.0 + max.abs()) {
                    failures.push(format!(
                        "n={n} k={k} t={t}: max {} != {max}",
                        closed.max_value
                    ));
                }

                let kkt = solve_kkt(&qp).unwrap();
                if (closed.max_value - kkt.max_value).abs() > 1e-10 * (1.0 + max.abs())
                    || (closed.point.clone() - &kkt.point).norm() > 1e-10 * (1.0 + a.abs())
                    || (closed.multiplier - kkt.multiplier).abs() > 1e-10
                {
                    failures.push(format!("n={n} k={k} t={t}: stationarity path disagrees"));
                }

                let oracle = numeric_max_oracle(&qp, 8).unwrap();
                if (closed.max_value - oracle.max_value).abs() > 1e-6 * (1.0 + max.abs()) {
                    failures.push(format!(
                        "n={n} k={k} t={t}: oracle {} vs {}",
                        oracle.max_value, closed.max_value
                    ));
                }
            }
        }
    }
    let elapsed = t0.elapsed();
    if elapsed.as_secs_f64() >= 5.0 {
        failures.push(format!("runtime {elapsed:.2?} exceeds 5 s"));
    }
    report(
        1,
        &format!("real-family program: {instances} instances, three paths, {elapsed:.2?}"),
        &failures,
    );
}

/// Criterion 2: both Lagrangian programs, generic formulas plus the two
/// pinned instances, each via all three paths.
#[test]
fn criterion_2_lagrangian_qp_reproduction() {
    let mut failures = Vec::new();

    // Generic-formula check across sizes, slot-1 and slot-r families.
    for n in 3..=8usize {
        for &t in &[-3.0f64, 1.0, 6.0] {
            let qp = TraceConstrainedQp::f1_lagrangian(n, t).unwrap();
            let sol = solve_closed_form(&qp).unwrap();
            let a = t / (n as f64 + 1.0);
            let max = (n as f64 - 2.0) * t * t / (2.0 * (n as f64 + 1.0));
            if (sol.point[0] - 2.0 * a).abs() > 1e-12 * (1.0 + a.abs())
                || (1..n).any(|j| (sol.point[j] - a).abs() > 1e-12 * (1.0 + a.abs()))
                || (sol.max_value - max).abs() > 1e-12 * (1.0 + max.abs())
            {
                failures.push(format!("f1 n={n} t={t}: closed form off pattern"));
            }

            for r in 2..=n {
                let qp = TraceConstrainedQp::fr_lagrangian(n, r, t).unwrap();
                let sol = solve_closed_form(&qp).unwrap();
                let nf = n as f64;
                let b = t / (3.0 * nf + 5.0);
                let max =
                    (3.0 * nf - 1.0) * (nf - 2.0) * t * t / (2.0 * (3.0 * nf + 5.0) * (nf - 1.0));
                let expected = |j: usize| {
                    if j == 0 {
                        2.0 * b
                    } else if j + 1 == r {
                        9.0 * b
                    } else {
                        3.0 * b
                    }
                };
                if (0..n).any(|j| (sol.point[j] - expected(j)).abs() > 1e-12 * (1.0 + b.abs()))
                    || (sol.max_value - max).abs() > 1e-12 * (1.0 + max.abs())
                {
                    failures.push(format!("fr n={n} r={r} t={t}: closed form off pattern"));
                }
            }
        }
    }

    // Pinned instances, triple-path.
    // [PAPER] n=3, trace 4, slot-1 family: maximum 2 at (2, 1, 1).
    // [PAPER] n=3, trace 14, slot-2 family: maximum 28 at (2, 9, 3).
    let pinned: [(TraceConstrainedQp, [f64; 3], f64); 2] = [
        (
            TraceConstrainedQp::f1_lagrangian(3, 4.0).unwrap(),
            [2.0, 1.0, 1.0],
            2.0,
        ),
        (
            TraceConstrainedQp::fr_lagrangian(3, 2, 14.0).unwrap(),
            [2.0, 9.0, 3.0],
            28.0,
        ),
    ];
    for (qp, point, max) in &pinned {
        let closed = solve_closed_form(qp).unwrap();
        let kkt = solve_kkt(qp).unwrap();
        let oracle = numeric_max_oracle(qp, 8).unwrap();
        let target = DVector::from_row_slice(point);
        if (closed.point.clone() - &target).norm() > 1e-12 || (closed.max_value - max).abs() > 1e-12
        {
            failures.push(format!("pinned instance (max {max}): closed form off"));
        }
        if (kkt.max_value - max).abs() > 1e-10 || (kkt.point - &target).norm() > 1e-10 {
            failures.push(format!(
                "pinned instance (max {max}): stationarity path off"
            ));
        }
        if (oracle.max_value - max).abs() > 1e-6 {
            failures.push(format!("pinned instance (max {max}): oracle off"));
        }
    }

    report(
        2,
        "slot-1 and slot-r programs, generic grid plus pinned instances",
        &failures,
    );
}

/// Criterion 3: negativity certificates for every family, and the
/// completed-square identity at rounding level over 10^3 random vectors.
#[test]
fn criterion_3_negativity_certificates() {
    let mut failures = Vec::new();
    let mut certified = 0usize;

    for n in 3..=16usize {
        for k in 3..=n {
            let qp = TraceConstrainedQp::fr_real(n, k, 1.0).unwrap();
            certified += 1;
            if restricted_hessian_eigenvalues(&qp)
                .iter()
                .any(|&ev| ev >= 0.0)
            {
                failures.push(format!("fr_real n={n} k={k}: nonnegative eigenvalue"));
            }
        }
        let qp = TraceConstrainedQp::f1_lagrangian(n, 1.0).unwrap();
        certified += 1;
        if restricted_hessian_eigenvalues(&qp)
            .iter()
            .any(|&ev| ev >= 0.0)
        {
            failures.push(format!("f1 n={n}: nonnegative eigenvalue"));
        }
        for r in 2..=n {
            let qp = TraceConstrainedQp::fr_lagrangian(n, r, 1.0).unwrap();
            certified += 1;
            if restricted_hessian_eigenvalues(&qp)
                .iter()
                .any(|&ev| ev >= 0.0)
            {
                failures.push(format!("fr n={n} r={r}: nonnegative eigenvalue"));
            }
        }
    }

    for (n, k) in [(3usize, 3usize), (5, 4), (8, 5), (12, 12)] {
        let residual = alpha_identity_residual(n, k, 1000, GATE_SEED).unwrap();
        if residual > 1e-10 {
            failures.push(format!("alpha identity n={n} k={k}: residual {residual}"));
        }
    }

    report(
        3,
        &format!("{certified} restricted Hessians + 4x10^3 identity samples"),
        &failures,
    );
}

/// Criterion 4: bulk randomized verification — 10^4 real shapes and 10^3
/// Lagrangian shapes, zero violations, under the 2-minute budget.
#[test]
fn criterion_4_inequality_sweeps() {
    let t0 = Instant::now();
    let mut failures = Vec::new();

    let mut cfg = SweepConfig::new(BoundKind::Real);
    cfg.dims = vec![3, 4, 5];
    cfg.codims = vec![1, 2, 3];
    cfg.count = 10_000;
    cfg.seed = GATE_SEED;
    cfg.holds_tol = 1e-7;
    let real = run_sweep(&cfg).unwrap();
    if !real.violations.is_empty() {
        failures.push(format!("real sweep: {} violations", real.violations.len()));
    }
    if real.samples != 10_000 {
        failures.push(format!("real sweep ran {} samples", real.samples));
    }
    if let Some(slack) = real.min_slack {
        if slack < -1e-7 {
            failures.push(format!("real sweep min slack {slack}"));
        }
    } else {
        failures.push("real sweep recorded no checks".into());
    }

    let mut cfg = SweepConfig::new(BoundKind::LagrangianOrderN);
    cfg.dims = vec![3, 4];
    cfg.count = 1_000;
    cfg.seed = GATE_SEED + 1;
    cfg.holds_tol = 1e-7;
    let lag = run_sweep(&cfg).unwrap();
    if !lag.violations.is_empty() {
        failures.push(format!(
            "lagrangian sweep: {} violations",
            lag.violations.len()
        ));
    }
    if lag.samples != 1_000 {
        failures.push(format!("lagrangian sweep ran {} samples", lag.samples));
    }

    let elapsed = t0.elapsed();
    if elapsed.as_secs_f64() >= 120.0 {
        failures.push(format!("runtime {elapsed:.1?} exceeds 2 min"));
    }
    report(
        4,
        &format!(
            "10^4 real checks (min slack {:.3e}) + 10^3 Lagrangian (min slack {:.3e}), {elapsed:.1?}",
            real.min_slack.unwrap_or(f64::NAN),
            lag.min_slack.unwrap_or(f64::NAN)
        ),
        &failures,
    );
}

/// Criterion 5: generated equality cases verify with zero slack, survive
/// rotation and re-detection, and the totally geodesic sphere case is exact.
#[test]
fn criterion_5_equality_cases() {
    let mut failures = Vec::new();

    for n in 3..=5usize {
        for p in 1..=3usize {
            let mut rng = sample_rng(GATE_SEED, (n * 10 + p) as u64);
            let a: Vec<f64> = (0..p)
                .map(|_| 3.0 * (rand::Rng::random::<f64>(&mut rng) - 0.4))
                .collect();
            let shape = equality_case_generate(n, p, &a).unwrap();
            let ambient = AmbientForm::real(0.7, n + p).unwrap();
            for k in 3..=n {
                let v = verify(&shape, &ambient, k, BoundKind::Real).unwrap();
                if v.slack.abs() > 1e-8 {
                    failures.push(format!("n={n} p={p} k={k}: slack {}", v.slack));
                }
                if !v.equality {
                    failures.push(format!("n={n} p={p} k={k}: equality not flagged"));
                }
            }

            let q = random_orthogonal(n, &mut rng);
            let rotated = shape.rotate_tangent_frame(&q).unwrap();
            match equality_shape_detect(&rotated, 1e-8) {
                None => failures.push(format!("n={n} p={p}: pattern lost after rotation")),
                Some(pat) => {
                    let mut expected = DVector::zeros(n);
                    for j in 0..n {
                        expected[j] = q[(0, j)];
                    }
                    if expected.dot(&pat.direction) < 0.0 {
                        expected = -expected;
                    }
                    if (expected - &pat.direction).norm() > 1e-7 {
                        failures.push(format!("n={n} p={p}: recovered direction off"));
                    }
                }
            }
        }
    }

    // Totally geodesic in the unit sphere: delta_3 and the bound are both
    // exactly 2 (all quantities integer-valued in floating point).
    let shape = ShapeOperatorSet::zeros(3, 1).unwrap();
    let ambient = AmbientForm::real(1.0, 4).unwrap();
    let v = verify(&shape, &ambient, 3, BoundKind::Real).unwrap();
    if v.delta != 2.0 || v.bound != 2.0 {
        failures.push(format!(
            "totally geodesic: delta {} bound {}",
            v.delta, v.bound
        ));
    }
    if !v.equality {
        failures.push("totally geodesic: equality not flagged".into());
    }

    report(
        5,
        "equality generation, rotation round trip, totally geodesic case",
        &failures,
    );
}

/// Criterion 6: the searched invariant against the dense-grid oracle on 50
/// seeded shapes, plus order-2 domination.
#[test]
fn criterion_6_theta_oracle_equivalence() {
    let mut failures = Vec::new();
    let mut comparisons = 0usize;

    for s in 0..50u64 {
        let n = if s % 2 == 0 { 3 } else { 4 };
        let p = 1 + (s as usize) % 2;
        let mut rng = sample_rng(GATE_SEED, 4000 + s);
        let shape = random_shape(n, p, 1.0, &mut rng).unwrap();
        let ambient = AmbientForm::real(0.5, n + p).unwrap();

        let t2 = theta_k(&shape, &ambient, 2).unwrap().theta;
        for k in 2..=n {
            let searched = theta_k(&shape, &ambient, k).unwrap();
            let grid =
                theta_k_bruteforce(&shape, &ambient, k, DEFAULT_BRUTEFORCE_RESOLUTION).unwrap();
            comparisons += 1;
            if (searched.theta - grid.theta).abs() > 1e-4 {
                failures.push(format!(
                    "shape {s} k={k}: search {} vs grid {}",
                    searched.theta, grid.theta
                ));
            }
            if searched.theta < t2 - 1e-9 {
                failures.push(format!("shape {s} k={k}: below order-2 value"));
            }
        }
    }

    report(
        6,
        &format!("{comparisons} search-vs-grid comparisons on 50 shapes"),
        &failures,
    );
}

/// Criterion 7: the cubic factorization and the coefficient comparison in
/// exact integer arithmetic across the documented ranges.
#[test]
fn criterion_7_arithmetic_identities() {
    let mut failures = Vec::new();
    if !factorization_check() {
        failures.push("cubic factorization failed somewhere in 3..=64".into());
    }
    for n in 3..=10_000usize {
        if !coefficient_comparison(n) {
            failures.push(format!("coefficient comparison failed at n={n}"));
            break;
        }
    }
    report(
        7,
        "cubic factorization (3..=64) + coefficient comparison (3..=10^4)",
        &failures,
    );
}

/// Criterion 8: summing the per-direction maxima reassembles the mean
/// curvature part of the real bound.
#[test]
fn criterion_8_bound_assembly_identity() {
    let mut failures = Vec::new();
    let mut checked = 0usize;
    for n in 3..=8usize {
        for p in 1..=3usize {
            let mut rng = sample_rng(GATE_SEED, (100 * n + p) as u64);
            let shape = random_shape(n, p, 1.2, &mut rng).unwrap();
            let h2 = mean_curvature(&shape).norm_sq;

            let mut total = 0.0;
            for a in shape.operators() {
                let qp = TraceConstrainedQp::fr_real(n, n, a.trace()).unwrap();
                total += solve_closed_form(&qp).unwrap().max_value;
            }
            // The |H|^2 part of the real bound is the bound at c = 0.
            let h_part = bound_real(n, 0.0, h2).unwrap();
            checked += 1;
            if (total - h_part).abs() > 1e-12 * (1.0 + h_part.abs()) {
                failures.push(format!("n={n} p={p}: sum {total} vs bound part {h_part}"));
            }
        }
    }
    report(
        8,
        &format!("{checked} random shapes reassemble the |H|^2 term"),
        &failures,
    );
}

/// The search options the sweeps rely on stay pinned to safe semantics:
/// a sweep search may only ever land at or above the default search.
#[test]
fn sweep_options_overestimate_only() {
    // [DERIVED] Both option sets minimize the same objective; fewer starts
    // can only end higher. Guards the monotone-safety argument the sweep
    // criterion rests on.
    let mut worst = 0.0f64;
    for s in 0..10u64 {
        let mut rng = sample_rng(GATE_SEED, 5000 + s);
        let n = 4 + (s as usize) % 2;
        let shape = random_shape(n, 2, 1.0, &mut rng).unwrap();
        let ambient = AmbientForm::real(0.0, n + 2).unwrap();
        let full = theta_k_with(&shape, &ambient, 3, &ThetaOptions::default()).unwrap();
        let quick = theta_k_with(&shape, &ambient, 3, &ThetaOptions::sweep()).unwrap();
        worst = worst.max(full.theta - quick.theta);
        assert!(
            quick.theta >= full.theta - 1e-9,
            "seed {s}: sweep search {} undercuts default {}",
            quick.theta,
            full.theta
        );
    }
    println!("[sweep-options] PASS — max (default - sweep) gap {worst:.3e}");
}
