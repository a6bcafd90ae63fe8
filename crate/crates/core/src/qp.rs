//! Trace-constrained quadratic maximization.
//!
//! The curvature bounds in [`crate::bounds`] rest on maximizing certain
//! quadratic forms `f(x) = x^T M x` over the affine constraint
//! `x_1 + ... + x_n = t` (the variables are diagonal second-fundamental-form
//! entries and `t` a fixed trace). Three labeled families arise:
//!
//! * `fr_real(n, k_order)` — the form behind the real-space-form bound:
//!   `f(x) = sum_{i<j} x_i x_j - x_1 (x_2 + ... + x_k) / (k - 1)`.
//!   Maximum `(n-2) t^2 / (2(n-1))` at `(0, a, ..., a)`, `a = t/(n-1)`.
//! * `f1_lagrangian(n)` — the Lagrangian form whose distinguished slot is
//!   slot 1: `fr_real` at `k = n` minus `(n-2)/(n-1) sum_{j>=2} x_j^2`.
//!   Maximum `(n-2) t^2 / (2(n+1))` at `(2a, a, ..., a)`, `a = t/(n+1)`.
//! * `fr_lagrangian(n, r)` with slot `2 <= r <= n` — the Lagrangian form for
//!   the remaining slots: `fr_real` at `k = n` minus `sum_{j != r} x_j^2`
//!   plus `x_1^2 / (n-1)`. Maximum `(3n-1)(n-2) t^2 / (2(3n+5)(n-1))` at
//!   `(2b, 3b, ..., 9b at slot r, ..., 3b)`, `b = t/(3n+5)`.
//!
//! Slots are numbered `1..n` as in the classical formulas; only the
//! in-memory vectors are 0-based.
//!
//! Every family is solved three independent ways — the closed forms above,
//! the linear stationarity (KKT) system, and a derivative-free numeric
//! search — and each maximum carries a negativity certificate: the
//! eigenvalues of the Hessian restricted to the constraint plane.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::curvature::CurvatureView;
use crate::error::{Error, Result};
use crate::linalg::{hyperplane_basis, sym_eigenvalues_sorted};
use crate::optimize::nelder_mead;
use crate::shape::{AmbientForm, LagrangianShape, ShapeOperatorSet};

/// Seed of the numeric oracle's starting points (fixed: the oracle is a
/// deterministic reference, not a sampler).
const ORACLE_SEED: u64 = 0x9E37_79B9_7F4A_7C15;

/// Minimum number of starts the numeric oracle accepts.
pub const MIN_ORACLE_STARTS: usize = 8;

/// Which labeled family a program belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QpLabel {
    /// Real-space-form family; `k_order` is the plane order `k`.
    FrReal { k_order: usize },
    /// Lagrangian family, distinguished slot 1.
    F1Lagrangian,
    /// Lagrangian family, distinguished slot `r` (`2 <= r <= n`, 1-based).
    FrLagrangian { r: usize },
}

/// How a [`QpSolution`] was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveMethod {
    ClosedForm,
    Kkt,
    NumericOracle,
}

/// A quadratic form `x^T M x` maximized over `sum_i x_i = trace_value`.
#[derive(Clone, Debug)]
pub struct TraceConstrainedQp {
    n: usize,
    matrix: DMatrix<f64>,
    trace_value: f64,
    label: Option<QpLabel>,
}

/// One solution of a [`TraceConstrainedQp`].
#[derive(Clone, Debug)]
pub struct QpSolution {
    /// Maximizing point on the constraint plane.
    pub point: DVector<f64>,
    /// Lagrange multiplier: the common value of the gradient components.
    pub multiplier: f64,
    /// The maximum of the form on the plane.
    pub max_value: f64,
    pub method: SolveMethod,
}

fn check_n(n: usize) -> Result<()> {
    if n < 3 {
        return Err(Error::DimensionTooSmall { min: 3, got: n });
    }
    Ok(())
}

fn check_trace(t: f64) -> Result<()> {
    if !t.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "trace value must be finite, got {t}"
        )));
    }
    Ok(())
}

impl TraceConstrainedQp {
    /// The real-space-form family. Requires `3 <= k_order <= n` (below order
    /// 3 the restricted Hessian degenerates and no bound family uses it).
    pub fn fr_real(n: usize, k_order: usize, trace_value: f64) -> Result<Self> {
        check_n(n)?;
        check_trace(trace_value)?;
        if k_order < 3 || k_order > n {
            return Err(Error::OrderOutOfRange {
                k: k_order,
                min: 3,
                max: n,
            });
        }
        let km1 = (k_order - 1) as f64;
        let mut m = DMatrix::from_element(n, n, 0.5);
        m.fill_diagonal(0.0);
        for j in 1..k_order {
            let w = 0.5 - 0.5 / km1;
            m[(0, j)] = w;
            m[(j, 0)] = w;
        }
        Ok(Self {
            n,
            matrix: m,
            trace_value,
            label: Some(QpLabel::FrReal { k_order }),
        })
    }

    /// The Lagrangian family with distinguished slot 1.
    pub fn f1_lagrangian(n: usize, trace_value: f64) -> Result<Self> {
        check_n(n)?;
        check_trace(trace_value)?;
        let nm1 = (n - 1) as f64;
        let mut m = DMatrix::from_element(n, n, 0.5);
        for j in 1..n {
            let w = 0.5 - 0.5 / nm1;
            m[(0, j)] = w;
            m[(j, 0)] = w;
        }
        m.fill_diagonal(-(nm1 - 1.0) / nm1);
        m[(0, 0)] = 0.0;
        Ok(Self {
            n,
            matrix: m,
            trace_value,
            label: Some(QpLabel::F1Lagrangian),
        })
    }

    /// The Lagrangian family with distinguished slot `r`, `2 <= r <= n`
    /// (slots numbered `1..n`).
    pub fn fr_lagrangian(n: usize, r: usize, trace_value: f64) -> Result<Self> {
        check_n(n)?;
        check_trace(trace_value)?;
        if r < 2 || r > n {
            return Err(Error::InvalidParameter(format!(
                "distinguished slot r = {r} out of range 2..={n}"
            )));
        }
        let nm1 = (n - 1) as f64;
        let mut m = DMatrix::from_element(n, n, 0.5);
        for j in 1..n {
            let w = 0.5 - 0.5 / nm1;
            m[(0, j)] = w;
            m[(j, 0)] = w;
        }
        m.fill_diagonal(-1.0);
        m[(0, 0)] = -(nm1 - 1.0) / nm1;
        m[(r - 1, r - 1)] = 0.0;
        Ok(Self {
            n,
            matrix: m,
            trace_value,
            label: Some(QpLabel::FrLagrangian { r }),
        })
    }

    /// An arbitrary symmetric form with no label (closed-form solving is
    /// unavailable; KKT and the numeric oracle still apply).
    pub fn from_symmetric(matrix: DMatrix<f64>, trace_value: f64) -> Result<Self> {
        let n = matrix.nrows();
        check_n(n)?;
        check_trace(trace_value)?;
        if matrix.ncols() != n {
            return Err(Error::OperatorSizeMismatch {
                r: 0,
                rows: matrix.nrows(),
                cols: matrix.ncols(),
                n,
            });
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let dev = (matrix[(i, j)] - matrix[(j, i)]).abs();
                if dev > 1e-12 {
                    return Err(Error::AsymmetricOperator {
                        r: 0,
                        i,
                        j,
                        deviation: dev,
                    });
                }
            }
        }
        Ok(Self {
            n,
            matrix,
            trace_value,
            label: None,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn trace_value(&self) -> f64 {
        self.trace_value
    }

    pub fn label(&self) -> Option<QpLabel> {
        self.label
    }

    /// The form's matrix `M` (so that `value(x) = x^T M x`).
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// `f(x) = x^T M x`.
    pub fn value(&self, x: &DVector<f64>) -> f64 {
        x.dot(&(&self.matrix * x))
    }

    /// `grad f(x) = 2 M x`.
    pub fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.matrix * x * 2.0
    }

    /// The (constant) Hessian `2 M`.
    pub fn hessian(&self) -> DMatrix<f64> {
        &self.matrix * 2.0
    }

    /// `max |grad f(x)_i - multiplier|`: how far `x` is from being a
    /// constrained critical point with the given multiplier.
    pub fn stationarity_residual(&self, x: &DVector<f64>, multiplier: f64) -> f64 {
        self.gradient(x)
            .iter()
            .map(|g| (g - multiplier).abs())
            .fold(0.0, f64::max)
    }
}

/// Solve a labeled program by its closed form.
pub fn solve_closed_form(qp: &TraceConstrainedQp) -> Result<QpSolution> {
    let n = qp.n;
    let nf = n as f64;
    let t = qp.trace_value;
    let label = qp.label.ok_or(Error::UnlabeledQp)?;
    let (point, multiplier, max_value) = match label {
        QpLabel::FrReal { .. } => {
            let a = t / (nf - 1.0);
            let mut x = DVector::from_element(n, a);
            x[0] = 0.0;
            (x, (nf - 2.0) * a, (nf - 2.0) * t * t / (2.0 * (nf - 1.0)))
        }
        QpLabel::F1Lagrangian => {
            let a = t / (nf + 1.0);
            let mut x = DVector::from_element(n, a);
            x[0] = 2.0 * a;
            (x, (nf - 2.0) * a, (nf - 2.0) * t * t / (2.0 * (nf + 1.0)))
        }
        QpLabel::FrLagrangian { r } => {
            let b = t / (3.0 * nf + 5.0);
            let mut x = DVector::from_element(n, 3.0 * b);
            x[0] = 2.0 * b;
            x[r - 1] = 9.0 * b;
            let coeff = (3.0 * nf - 1.0) * (nf - 2.0) / (nf - 1.0);
            (x, coeff * b, coeff * t * t / (2.0 * (3.0 * nf + 5.0)))
        }
    };
    Ok(QpSolution {
        point,
        multiplier,
        max_value,
        method: SolveMethod::ClosedForm,
    })
}

/// Solve the stationarity (KKT) system
/// `[2M, -1; 1^T, 0] [x; lambda] = [0; t]` directly.
///
/// A singular system is reported as [`Error::DegenerateQp`] with the
/// dimension of its nullspace.
pub fn solve_kkt(qp: &TraceConstrainedQp) -> Result<QpSolution> {
    let n = qp.n;
    let mut sys = DMatrix::zeros(n + 1, n + 1);
    sys.view_mut((0, 0), (n, n)).copy_from(&(&qp.matrix * 2.0));
    for i in 0..n {
        sys[(i, n)] = -1.0;
        sys[(n, i)] = 1.0;
    }
    let mut rhs = DVector::zeros(n + 1);
    rhs[n] = qp.trace_value;

    let svd = sys.svd(true, true);
    let sigma_max = svd.singular_values[0];
    let eps = 1e-10 * sigma_max.max(1.0);
    let rank = svd.rank(eps);
    if rank < n + 1 {
        return Err(Error::DegenerateQp {
            nullspace_dim: n + 1 - rank,
        });
    }
    let sol = svd
        .solve(&rhs, eps)
        .map_err(|e| Error::InvalidParameter(format!("KKT solve failed: {e}")))?;
    let point = sol.rows(0, n).clone_owned();
    let max_value = qp.value(&point);
    Ok(QpSolution {
        point,
        multiplier: sol[n],
        max_value,
        method: SolveMethod::Kkt,
    })
}

/// Maximize the form numerically: derivative-free simplex descent of `-f`
/// in a deterministic orthonormal chart of the constraint plane, from
/// `starts >= MIN_ORACLE_STARTS` seeded starting points, with a two-stage
/// refinement of the winner. Independent of both closed forms and the KKT
/// system; exists to cross-check them.
pub fn numeric_max_oracle(qp: &TraceConstrainedQp, starts: usize) -> Result<QpSolution> {
    if starts < MIN_ORACLE_STARTS {
        return Err(Error::InvalidParameter(format!(
            "numeric oracle needs at least {MIN_ORACLE_STARTS} starts, got {starts}"
        )));
    }
    let n = qp.n;
    let basis = hyperplane_basis(n);
    let center = DVector::from_element(n, qp.trace_value / n as f64);
    let embed = |u: &DVector<f64>| &center + &basis * u;
    let objective = |u: &DVector<f64>| -qp.value(&embed(u));

    let mut rng = ChaCha8Rng::seed_from_u64(ORACLE_SEED);
    let spread = 1.0 + qp.trace_value.abs() / n as f64;
    let mut best_u = DVector::zeros(n - 1);
    let mut best_val = f64::INFINITY;
    for _ in 0..starts {
        let u0 = DVector::from_fn(n - 1, |_, _| {
            let g: f64 = rng.sample(StandardNormal);
            g * spread
        });
        let (u, val) = nelder_mead(objective, &u0, 0.5 * spread, 1e-12, 6000);
        if val < best_val {
            best_val = val;
            best_u = u;
        }
    }
    // Refinement passes with shrinking simplices catch any start that
    // stalled with a collapsed simplex.
    for scale in [1e-3 * spread, 1e-7 * spread] {
        let (u, val) = nelder_mead(objective, &best_u, scale, 1e-13, 6000);
        if val < best_val {
            best_val = val;
            best_u = u;
        }
    }
    let point = embed(&best_u);
    let grad = qp.gradient(&point);
    let multiplier = grad.sum() / n as f64;
    Ok(QpSolution {
        max_value: qp.value(&point),
        point,
        multiplier,
        method: SolveMethod::NumericOracle,
    })
}

/// Eigenvalues (ascending) of the Hessian `2M` restricted to the constraint
/// plane `sum_i x_i = const`: the negativity certificate that makes a
/// stationary point a global maximum. All eigenvalues strictly negative
/// means the restricted form is negative definite.
pub fn restricted_hessian_eigenvalues(qp: &TraceConstrainedQp) -> Vec<f64> {
    let basis = hyperplane_basis(qp.n);
    let restricted = basis.tr_mul(&(qp.hessian() * &basis));
    sym_eigenvalues_sorted(&restricted)
}

/// Largest residual, over `samples` constraint-tangent vectors, of the
/// completed-square identity for the `fr_real` Hessian: for `sum_i X_i = 0`,
///
/// ```text
/// X^T (2M) X = -1/(k-1) [ sum_{j=2..k} (X_1 + X_j)^2
///                         + (k-2) sum_{j=2..k} X_j^2
///                         + (k-1) sum_{i>k} X_i^2 ]
/// ```
///
/// This identity is what certifies negative semidefiniteness symbolically;
/// the residual should vanish to rounding.
pub fn alpha_identity_residual(n: usize, k_order: usize, samples: usize, seed: u64) -> Result<f64> {
    alpha_identity_residual_perturbed(n, k_order, samples, seed, 0.0)
}

/// [`alpha_identity_residual`] with an artificial defect of size
/// `perturbation` injected into the Hessian. A fault-injection hook: with a
/// nonzero perturbation the residual must become large, proving the check
/// can fail.
pub fn alpha_identity_residual_perturbed(
    n: usize,
    k_order: usize,
    samples: usize,
    seed: u64,
    perturbation: f64,
) -> Result<f64> {
    let qp = TraceConstrainedQp::fr_real(n, k_order, 0.0)?;
    let mut hess = qp.hessian();
    hess[(0, 1)] += perturbation;
    hess[(1, 0)] += perturbation;
    let km1 = (k_order - 1) as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let mut x = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
        let mean = x.sum() / n as f64;
        x.add_scalar_mut(-mean);
        let norm = x.norm();
        if norm < 1e-9 {
            continue;
        }
        x /= norm;
        let lhs = x.dot(&(&hess * &x));
        let mut rhs = 0.0;
        for j in 1..k_order {
            rhs += (x[0] + x[j]) * (x[0] + x[j]) + (km1 - 1.0) * x[j] * x[j];
        }
        for xi in x.iter().skip(k_order) {
            rhs += km1 * xi * xi;
        }
        rhs /= -km1;
        worst = worst.max((lhs - rhs).abs());
    }
    Ok(worst)
}

/// Whether `9n^3 - 6n^2 - 29n + 10 = (3n+5)(3n-1)(n-2)` holds exactly in
/// integer arithmetic for this `n`. (The cubic is the unsimplified
/// coefficient arising in the slot-`r` Lagrangian maximum.)
pub fn cubic_factorization_holds(n: i128) -> bool {
    9 * n * n * n - 6 * n * n - 29 * n + 10 == (3 * n + 5) * (3 * n - 1) * (n - 2)
}

/// [`cubic_factorization_holds`] over the whole documented range `3..=64`.
pub fn factorization_check() -> bool {
    (3..=64).all(cubic_factorization_holds)
}

/// The real-family decomposition gap at order `k`, in the frame the shape
/// is stored in (direction `X = e_1`, plane `L` spanned by the first `k`
/// frame vectors):
///
/// ```text
/// gap = [tau - Ric_L(e_1)/(k-1)]
///       - [(n+1)(n-2)/2 c_eff + sum_r fr_real(diag A_r)]
/// ```
///
/// Expanding the Gauss equation shows the bracket difference equals minus a
/// sum of squared off-diagonal entries, so the gap is never positive; it
/// vanishes exactly when the dropped entries vanish. This function computes
/// both sides independently (curvature API vs. form evaluation) so the
/// cancellation is a real consistency check.
pub fn real_decomposition_gap(
    shape: &ShapeOperatorSet,
    ambient: &AmbientForm,
    k: usize,
) -> Result<f64> {
    let n = shape.n();
    if k < 3 || k > n {
        return Err(Error::OrderOutOfRange { k, min: 3, max: n });
    }
    let view = CurvatureView::new(shape, ambient)?;
    let tau = view.scalar_curvature();
    let mut e1 = DVector::zeros(n);
    e1[0] = 1.0;
    let l_basis: Vec<DVector<f64>> = (1..k)
        .map(|j| {
            let mut e = DVector::zeros(n);
            e[j] = 1.0;
            e
        })
        .collect();
    let ric = view.ric_l(&e1, &l_basis)?;
    let lhs = tau - ric / (k as f64 - 1.0);

    let nf = n as f64;
    let mut rhs = 0.5 * (nf + 1.0) * (nf - 2.0) * view.effective_constant();
    for a in shape.operators() {
        let diag = a.diagonal();
        let qp = TraceConstrainedQp::fr_real(n, k, diag.sum())?;
        rhs += qp.value(&diag);
    }
    Ok(lhs - rhs)
}

/// The Lagrangian decomposition gap at order `n`, in the stored frame:
///
/// ```text
/// gap = [tau - Ric(e_1)/(n-1)]
///       - [(n+1)(n-2)/2 c_eff + f1(diag A_1) + sum_{r>=2} fr(diag A_r)]
/// ```
///
/// Full three-index symmetry lets the dropped off-diagonal squares absorb
/// into the slot forms' diagonal corrections, so again the gap is never
/// positive.
pub fn lagrangian_decomposition_gap(
    lagrangian: &LagrangianShape,
    ambient: &AmbientForm,
) -> Result<f64> {
    let shape = lagrangian.shape();
    let n = shape.n();
    let view = CurvatureView::new(shape, ambient)?;
    let tau = view.scalar_curvature();
    let mut e1 = DVector::zeros(n);
    e1[0] = 1.0;
    let l_basis: Vec<DVector<f64>> = (1..n)
        .map(|j| {
            let mut e = DVector::zeros(n);
            e[j] = 1.0;
            e
        })
        .collect();
    let ric = view.ric_l(&e1, &l_basis)?;
    let lhs = tau - ric / (n as f64 - 1.0);

    let nf = n as f64;
    let mut rhs = 0.5 * (nf + 1.0) * (nf - 2.0) * view.effective_constant();
    for (ridx, a) in shape.operators().iter().enumerate() {
        let diag = a.diagonal();
        let qp = if ridx == 0 {
            TraceConstrainedQp::f1_lagrangian(n, diag.sum())?
        } else {
            TraceConstrainedQp::fr_lagrangian(n, ridx + 1, diag.sum())?
        };
        rhs += qp.value(&diag);
    }
    Ok(lhs - rhs)
}
