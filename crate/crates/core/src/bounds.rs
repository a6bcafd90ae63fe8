//! The sharp upper bounds on `delta_k` and their verification.
//!
//! Three bound families are implemented, each pairing an ambient situation
//! with a closed-form right-hand side:
//!
//! * [`BoundKind::Real`] — submanifold of a real space form, any order
//!   `3 <= k <= n`:
//!   `delta_k <= (n-2)/2 [ n^2/(n-1) |H|^2 + (n+1) c ]`.
//! * [`BoundKind::TotallyReal`] — totally real submanifold of a complex
//!   space form: the same expression with `c` replaced by `c/4`.
//! * [`BoundKind::LagrangianOrderN`] — Lagrangian submanifold of a complex
//!   space form, order `k = n` only:
//!   `delta_n <= (n+1)(n-2)/8 c + (3n-1)(n-2) n^2 / (2(3n+5)(n-1)) |H|^2`,
//!   strictly sharper in the `|H|^2` coefficient.
//!
//! [`verify`] evaluates `delta_k` from shape data, the bound from `n`, `c`,
//! `|H|^2`, and returns a [`Verdict`]. Equality in the first two families is
//! attained exactly by the shapes of [`equality_case_generate`], which
//! [`equality_shape_detect`] recognizes in any frame.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::invariants::{delta_k_with, ThetaOptions};
use crate::linalg;
use crate::shape::{
    check_lagrangian_symmetry, mean_curvature, AmbientForm, ShapeOperatorSet, SpaceFormKind,
    LAGRANGIAN_SYMMETRY_TOL,
};

/// Default tolerance on the violation side: the bound "holds" when
/// `slack >= -holds_tol`.
pub const DEFAULT_HOLDS_TOL: f64 = 1e-7;

/// Default tolerance for declaring equality: `|slack| <= equality_tol`.
pub const DEFAULT_EQUALITY_TOL: f64 = 1e-6;

/// Default residual tolerance for [`equality_shape_detect`].
pub const EQUALITY_DETECT_TOL: f64 = 1e-8;

/// Which bound family a verdict refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundKind {
    #[serde(rename = "real")]
    Real,
    #[serde(rename = "totally-real")]
    TotallyReal,
    #[serde(rename = "lagrangian")]
    LagrangianOrderN,
}

impl std::fmt::Display for BoundKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BoundKind::Real => "real",
            BoundKind::TotallyReal => "totally-real",
            BoundKind::LagrangianOrderN => "lagrangian",
        })
    }
}

fn check_bound_inputs(n: usize, c: f64, h_sq: f64) -> Result<()> {
    if n < 3 {
        return Err(Error::DimensionTooSmall { min: 3, got: n });
    }
    if !c.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "curvature constant must be finite, got {c}"
        )));
    }
    if !h_sq.is_finite() || h_sq < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "squared mean curvature must be finite and nonnegative, got {h_sq}"
        )));
    }
    Ok(())
}

/// Real-space-form bound: `(n-2)/2 [ n^2/(n-1) h_sq + (n+1) c ]`.
pub fn bound_real(n: usize, c: f64, h_sq: f64) -> Result<f64> {
    check_bound_inputs(n, c, h_sq)?;
    let nf = n as f64;
    Ok(0.5 * (nf - 2.0) * (nf * nf / (nf - 1.0) * h_sq + (nf + 1.0) * c))
}

/// Totally real bound: the real bound at effective constant `c/4`.
pub fn bound_totally_real(n: usize, c: f64, h_sq: f64) -> Result<f64> {
    bound_real(n, c / 4.0, h_sq)
}

/// Lagrangian order-`n` bound:
/// `(n+1)(n-2)/8 c + (3n-1)(n-2) n^2 / (2(3n+5)(n-1)) h_sq`.
pub fn bound_lagrangian(n: usize, c: f64, h_sq: f64) -> Result<f64> {
    check_bound_inputs(n, c, h_sq)?;
    let nf = n as f64;
    let c_part = (nf + 1.0) * (nf - 2.0) / 8.0 * c;
    let h_part =
        (3.0 * nf - 1.0) * (nf - 2.0) * nf * nf / (2.0 * (3.0 * nf + 5.0) * (nf - 1.0)) * h_sq;
    Ok(c_part + h_part)
}

/// Exact integer check that the Lagrangian `|H|^2` coefficient never exceeds
/// the totally real one:
/// `(n-2)/(n+1) <= (3n-1)(n-2) / ((3n+5)(n-1))`, cross-multiplied in `i128`
/// (all denominators are positive for `n >= 3`).
pub fn coefficient_comparison(n: usize) -> bool {
    debug_assert!(n >= 3);
    let n = n as i128;
    (n - 2) * (3 * n + 5) * (n - 1) <= (3 * n - 1) * (n - 2) * (n + 1)
}

/// Controls for [`verify_with`].
#[derive(Clone, Copy, Debug)]
pub struct VerifyOptions {
    pub holds_tol: f64,
    pub equality_tol: f64,
    pub theta: ThetaOptions,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            holds_tol: DEFAULT_HOLDS_TOL,
            equality_tol: DEFAULT_EQUALITY_TOL,
            theta: ThetaOptions::default(),
        }
    }
}

/// The outcome of checking one bound against one shape.
#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub kind: BoundKind,
    pub k: usize,
    pub delta: f64,
    pub bound: f64,
    /// `bound - delta`; nonnegative (up to `holds_tol`) when the bound holds.
    pub slack: f64,
    pub holds: bool,
    /// Whether the shape attains the bound (within `equality_tol`).
    pub equality: bool,
    /// Whether this family's equality case has a recognizer
    /// ([`equality_shape_detect`]); false for the Lagrangian family.
    pub equality_characterized: bool,
    pub holds_tol: f64,
    pub equality_tol: f64,
    /// Minimizing direction from the `theta_k` search.
    #[serde(rename = "argmin_X")]
    pub argmin_x: Vec<f64>,
}

/// [`verify_with`] under default options.
pub fn verify(
    shape: &ShapeOperatorSet,
    ambient: &AmbientForm,
    k: usize,
    kind: BoundKind,
) -> Result<Verdict> {
    verify_with(shape, ambient, k, kind, &VerifyOptions::default())
}

/// Compute `delta_k` from the shape data, the bound from `(n, c, |H|^2)`,
/// and compare.
///
/// The requested family must match the data: real bounds need a real
/// ambient form, totally real and Lagrangian bounds a complex one, and the
/// Lagrangian family additionally requires `k = n`, `p = n`, fully
/// symmetric coefficients, and ambient real dimension exactly `2n`.
pub fn verify_with(
    shape: &ShapeOperatorSet,
    ambient: &AmbientForm,
    k: usize,
    kind: BoundKind,
    opts: &VerifyOptions,
) -> Result<Verdict> {
    let n = shape.n();
    if k < 3 || k > n {
        return Err(Error::OrderOutOfRange { k, min: 3, max: n });
    }
    let mismatch = |reason: String| Error::InconsistentKind {
        kind: kind.to_string(),
        reason,
    };
    match kind {
        BoundKind::Real => {
            if ambient.kind() != SpaceFormKind::Real {
                return Err(mismatch("ambient form is complex".into()));
            }
        }
        BoundKind::TotallyReal => {
            if ambient.kind() != SpaceFormKind::Complex {
                return Err(mismatch("ambient form is real".into()));
            }
        }
        BoundKind::LagrangianOrderN => {
            if ambient.kind() != SpaceFormKind::Complex {
                return Err(mismatch("ambient form is real".into()));
            }
            if k != n {
                return Err(mismatch(format!("order k = {k} must equal n = {n}")));
            }
            if shape.p() != n {
                return Err(mismatch(format!(
                    "codimension p = {} must equal n = {n}",
                    shape.p()
                )));
            }
            let report = check_lagrangian_symmetry(shape, LAGRANGIAN_SYMMETRY_TOL)?;
            if !report.symmetric {
                return Err(mismatch(format!(
                    "coefficients not fully symmetric: max violation {:.3e}",
                    report.max_violation
                )));
            }
            if ambient.ambient_real_dim() != 2 * n {
                return Err(mismatch(format!(
                    "ambient real dimension {} must equal 2n = {}",
                    ambient.ambient_real_dim(),
                    2 * n
                )));
            }
        }
    }

    let result = delta_k_with(shape, ambient, k, &opts.theta)?;
    let h_sq = mean_curvature(shape).norm_sq;
    let bound = match kind {
        BoundKind::Real => bound_real(n, ambient.c(), h_sq)?,
        BoundKind::TotallyReal => bound_totally_real(n, ambient.c(), h_sq)?,
        BoundKind::LagrangianOrderN => bound_lagrangian(n, ambient.c(), h_sq)?,
    };
    let slack = bound - result.delta;
    let holds = slack >= -opts.holds_tol;
    let equality = holds && slack.abs() <= opts.equality_tol;
    Ok(Verdict {
        kind,
        k,
        delta: result.delta,
        bound,
        slack,
        holds,
        equality,
        equality_characterized: kind != BoundKind::LagrangianOrderN,
        holds_tol: opts.holds_tol,
        equality_tol: opts.equality_tol,
        argmin_x: result.theta.argmin_x.iter().copied().collect(),
    })
}

/// The equality pattern of the real and totally real families, expressed
/// invariantly: one unit direction annihilated by every operator, and each
/// operator a multiple of the projection onto its complement.
#[derive(Clone, Debug)]
pub struct EqualityPattern {
    /// The distinguished direction `v` with `A_r v = 0` for all `r`.
    pub direction: DVector<f64>,
    /// Coefficient `a_r` of each operator: `A_r = a_r (I - v v^T)`.
    pub coefficients: Vec<f64>,
}

/// Build the equality-case shape in its adapted frame:
/// `A_r = diag(0, a_r, ..., a_r)`. Such a shape attains the real (or totally
/// real) bound exactly, for every admissible order and every curvature
/// constant.
pub fn equality_case_generate(n: usize, p: usize, a: &[f64]) -> Result<ShapeOperatorSet> {
    if n < 3 {
        return Err(Error::DimensionTooSmall { min: 3, got: n });
    }
    if p == 0 {
        return Err(Error::NoNormalDirections);
    }
    if a.len() != p {
        return Err(Error::InvalidParameter(format!(
            "expected {p} coefficients, got {}",
            a.len()
        )));
    }
    if let Some(bad) = a.iter().find(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "coefficient must be finite, got {bad}"
        )));
    }
    let ops = a
        .iter()
        .map(|&ar| {
            let mut m = DMatrix::identity(n, n) * ar;
            m[(0, 0)] = 0.0;
            m
        })
        .collect();
    ShapeOperatorSet::new(ops)
}

/// Recognize the equality pattern in an arbitrary frame: find a unit `v`
/// with `A_r = a_r (I - v v^T)` for all `r`, to within `tol` per entry.
/// Returns the pattern, or `None` if no direction fits.
///
/// Candidates for `v` are the eigenvectors of `sum_r A_r^2`, since the
/// pattern forces `v` into its kernel; each candidate is tested against the
/// full reconstruction, so false positives cannot slip through.
pub fn equality_shape_detect(shape: &ShapeOperatorSet, tol: f64) -> Option<EqualityPattern> {
    let n = shape.n();
    let mut squares = DMatrix::zeros(n, n);
    for a in shape.operators() {
        squares.gemm(1.0, a, a, 1.0);
    }
    let (_, vecs) = linalg::sym_eigen_sorted(&squares);
    'candidates: for col in 0..n {
        let v = vecs.column(col).clone_owned();
        let nm1 = n as f64 - 1.0;
        let mut coefficients = Vec::with_capacity(shape.p());
        for a in shape.operators() {
            let av = a * &v;
            let ar = (a.trace() - v.dot(&av)) / nm1;
            // Residual of A - a_r (I - v v^T), checked entrywise.
            for i in 0..n {
                for j in 0..n {
                    let target = if i == j {
                        ar * (1.0 - v[i] * v[i])
                    } else {
                        -ar * v[i] * v[j]
                    };
                    if (a[(i, j)] - target).abs() > tol {
                        continue 'candidates;
                    }
                }
            }
            coefficients.push(ar);
        }
        let mut direction = v;
        linalg::canonical_sign(&mut direction);
        return Some(EqualityPattern {
            direction,
            coefficients,
        });
    }
    None
}
