//! The pointwise invariants `theta_k` and `delta_k`.
//!
//! For `2 <= k <= n`, let `L` run over `k`-planes of the tangent space and
//! `X` over unit vectors in `L`. The quantity minimized is the normalized
//! partial Ricci curvature `Ric_L(X) / (k - 1)`; its minimum is `theta_k`,
//! and `delta_k = tau - theta_k`.
//!
//! Two structure results make this computable without optimizing over the
//! full flag of `(X, L)` pairs:
//!
//! * For fixed `X`, the minimum over planes containing `X` is the sum of the
//!   `k - 1` smallest eigenvalues of the Jacobi-type form `B(X)` (a Ky Fan
//!   trace minimum). This reduces the search space to the unit sphere.
//! * For `k = n` the plane is the whole tangent space, so
//!   `theta_n = lambda_min(Ric) / (n - 1)` with `Ric` the Ricci operator —
//!   a single symmetric eigenproblem, no search at all.
//!
//! The sphere search runs Nelder-Mead in deterministic tangent charts from
//! seeded random starts, then a compass polish on the sphere itself. A
//! Halton-grid brute-force path serves as an independent oracle.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::curvature::{ricci_matrix, CurvatureView};
use crate::error::{Error, Result};
use crate::linalg::{self, complement_basis};
use crate::optimize::{compass_sphere, halton_sphere_point, nelder_mead, MAX_HALTON_DIM};
use crate::sample::random_unit_vector;
use crate::shape::{AmbientForm, ShapeOperatorSet};

/// Master seed from which multi-start directions are derived by default.
pub const DEFAULT_THETA_SEED: u64 = 20_240_601;

/// Smallest admissible brute-force grid.
pub const MIN_BRUTEFORCE_RESOLUTION: usize = 100;

/// Grid size at which the brute-force scan is trusted as an oracle for
/// low dimensions (`n <= 4`): dense enough that the best grid point lands
/// in the global basin before polishing.
pub const DEFAULT_BRUTEFORCE_RESOLUTION: usize = 20_000;

/// Final polish: step threshold and evaluation budget.
const POLISH_TOL: f64 = 1e-13;
const POLISH_INIT_STEP: f64 = 1e-3;
const POLISH_MAX_EVALS: usize = 60_000;

/// Brute-force scan: how many distant-basin grid candidates to polish, the
/// cosine above which two directions (up to sign) count as the same basin,
/// and the polish starting step, sized to the grid's covering radius.
const POLISH_CANDIDATES: usize = 12;
const CANDIDATE_MIN_COS: f64 = 0.94;
const GRID_POLISH_INIT_STEP: f64 = 0.05;

/// How a [`ThetaResult`] was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ThetaMethod {
    /// Exact eigenvalue path (`k = n`).
    EigenExact,
    /// Seeded multi-start chart search plus compass polish.
    MultiStart,
    /// Halton-grid scan plus compass polish.
    BruteForce,
}

/// Search controls for the sphere minimization.
#[derive(Clone, Copy, Debug)]
pub struct ThetaOptions {
    /// Number of random starting directions.
    pub starts: usize,
    /// Simplex diameter at which a chart search stops.
    pub step_tol: f64,
    /// Reflection budget per start.
    pub max_iters: usize,
    /// Step threshold at which the final compass polish stops.
    pub polish_tol: f64,
    /// Master seed for the starting directions.
    pub seed: u64,
}

impl Default for ThetaOptions {
    fn default() -> Self {
        Self {
            starts: 64,
            step_tol: 1e-12,
            max_iters: 2000,
            polish_tol: POLISH_TOL,
            seed: DEFAULT_THETA_SEED,
        }
    }
}

impl ThetaOptions {
    /// Cheaper settings for bulk sweeps: fewer starts, a coarser chart
    /// tolerance, and an earlier polish cutoff. A cheaper search can only
    /// overestimate `theta_k` (hence underestimate `delta_k`), so bulk
    /// verification never produces spurious violations.
    pub fn sweep() -> Self {
        Self {
            starts: 4,
            step_tol: 1e-7,
            polish_tol: 1e-9,
            ..Self::default()
        }
    }
}

/// Minimizer data for one `theta_k` computation.
#[derive(Clone, Debug)]
pub struct ThetaResult {
    pub k: usize,
    /// The invariant value `min Ric_L(X) / (k - 1)`.
    pub theta: f64,
    /// Minimizing unit direction (sign-normalized; `-X` is equivalent).
    pub argmin_x: DVector<f64>,
    /// Orthonormal basis of the minimizing plane, `argmin_x` first.
    pub argmin_l_basis: Vec<DVector<f64>>,
    pub method: ThetaMethod,
    /// Starting points examined (multi-start) or grid points scanned
    /// (brute force); zero for the exact path.
    pub starts_used: usize,
}

/// A `delta_k` value together with the pieces it is made of.
#[derive(Clone, Debug)]
pub struct DeltaResult {
    pub tau: f64,
    pub theta: ThetaResult,
    /// `tau - theta`.
    pub delta: f64,
}

/// Evaluates `min_L Ric_L(x) / (k-1)` over planes containing `x`, with all
/// scratch space preallocated; this is the hot loop of every search.
struct ThetaObjective<'a> {
    shape: &'a ShapeOperatorSet,
    c_eff: f64,
    count: usize, // k - 1
    basis: DMatrix<f64>,
    tmp: DMatrix<f64>,
    gram: DMatrix<f64>,
    form: DMatrix<f64>,
    ax: DVector<f64>,
    v: DVector<f64>,
}

impl<'a> ThetaObjective<'a> {
    fn new(shape: &'a ShapeOperatorSet, c_eff: f64, k: usize) -> Self {
        let n = shape.n();
        Self {
            shape,
            c_eff,
            count: k - 1,
            basis: DMatrix::zeros(n, n - 1),
            tmp: DMatrix::zeros(n, n - 1),
            gram: DMatrix::zeros(n - 1, n - 1),
            form: DMatrix::zeros(n - 1, n - 1),
            ax: DVector::zeros(n),
            v: DVector::zeros(n - 1),
        }
    }

    /// Objective at a unit direction `x`.
    fn value(&mut self, x: &DVector<f64>) -> f64 {
        linalg::complement_basis_into(x, &mut self.basis);
        self.form.fill(0.0);
        self.form.fill_diagonal(self.c_eff);
        for a in self.shape.operators() {
            self.ax.gemv(1.0, a, x, 0.0);
            let xax = x.dot(&self.ax);
            self.tmp.gemm(1.0, a, &self.basis, 0.0);
            self.gram.gemm_tr(1.0, &self.basis, &self.tmp, 0.0);
            self.v.gemv_tr(1.0, &self.basis, &self.ax, 0.0);
            let g = &self.gram;
            self.form.zip_apply(g, |f, gab| *f += xax * gab);
            self.form.ger(-1.0, &self.v, &self.v, 1.0);
        }
        let vals = linalg::sym_eigenvalues_sorted(&self.form);
        vals[..self.count].iter().sum::<f64>() / self.count as f64
    }
}

fn check_order(k: usize, n: usize) -> Result<()> {
    if k < 2 || k > n {
        return Err(Error::OrderOutOfRange { k, min: 2, max: n });
    }
    Ok(())
}

/// Exact minimum over planes through a fixed unit `x`: the value
/// `min_L Ric_L(x) / (k - 1)` and an orthonormal basis of a minimizing
/// plane's complement of `x` (the `k - 1` bottom eigenvectors of the
/// Jacobi-type form mapped back to the tangent space).
pub fn theta_given_x(
    shape: &ShapeOperatorSet,
    ambient: &AmbientForm,
    x: &DVector<f64>,
    k: usize,
) -> Result<(f64, Vec<DVector<f64>>)> {
    check_order(k, shape.n())?;
    let view = CurvatureView::new(shape, ambient)?;
    let jac = view.jacobi_form(x)?;
    let (vals, vecs) = linalg::sym_eigen_sorted(&jac.matrix);
    let value = vals.iter().take(k - 1).sum::<f64>() / (k - 1) as f64;
    let mut plane = Vec::with_capacity(k - 1);
    for i in 0..k - 1 {
        let mut u = &jac.basis * vecs.column(i);
        linalg::canonical_sign(&mut u);
        plane.push(u);
    }
    Ok((value, plane))
}

/// `theta_k` with default search options.
pub fn theta_k(shape: &ShapeOperatorSet, ambient: &AmbientForm, k: usize) -> Result<ThetaResult> {
    theta_k_with(shape, ambient, k, &ThetaOptions::default())
}

/// `theta_k` with explicit search options.
///
/// `k = n` bypasses the search entirely and takes the bottom eigenpair of
/// the Ricci operator.
pub fn theta_k_with(
    shape: &ShapeOperatorSet,
    ambient: &AmbientForm,
    k: usize,
    opts: &ThetaOptions,
) -> Result<ThetaResult> {
    let n = shape.n();
    check_order(k, n)?;
    ambient.check_hosts(shape)?;
    if opts.starts == 0 {
        return Err(Error::InvalidParameter(
            "at least one start is required".into(),
        ));
    }

    if k == n {
        let ric = ricci_matrix(shape, ambient)?;
        let (vals, vecs) = linalg::sym_eigen_sorted(&ric);
        let x = vecs.column(0).clone_owned();
        let theta = vals[0] / (n as f64 - 1.0);
        let complement = complement_basis(&x);
        let mut basis = vec![x.clone()];
        basis.extend((0..n - 1).map(|c| complement.column(c).clone_owned()));
        return Ok(ThetaResult {
            k,
            theta,
            argmin_x: x,
            argmin_l_basis: basis,
            method: ThetaMethod::EigenExact,
            starts_used: 0,
        });
    }

    let c_eff = ambient.effective_constant();
    let mut objective = ThetaObjective::new(shape, c_eff, k);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);

    let mut best_x: Option<DVector<f64>> = None;
    let mut best_val = f64::INFINITY;
    for _ in 0..opts.starts {
        let center = random_unit_vector(n, &mut rng);
        let chart = complement_basis(&center);
        let g = |u: &DVector<f64>| {
            let mut x = &center + &chart * u;
            x.normalize_mut();
            objective.value(&x)
        };
        let (u, val) = nelder_mead(
            g,
            &DVector::zeros(n - 1),
            0.7,
            opts.step_tol,
            opts.max_iters,
        );
        if val < best_val {
            let mut x = &center + &chart * u;
            x.normalize_mut();
            best_val = val;
            best_x = Some(x);
        }
    }
    let x = best_x.expect("at least one start");
    finish_search(
        shape,
        ambient,
        &mut objective,
        x,
        best_val,
        k,
        ThetaMethod::MultiStart,
        opts.starts,
        opts.polish_tol,
    )
}

/// Independent estimate of `theta_k` by scanning a deterministic
/// quasi-uniform grid of at least [`MIN_BRUTEFORCE_RESOLUTION`] sphere
/// directions and polishing the best one. Slower and coarser than
/// [`theta_k_with`], but shares none of its search machinery.
pub fn theta_k_bruteforce(
    shape: &ShapeOperatorSet,
    ambient: &AmbientForm,
    k: usize,
    resolution: usize,
) -> Result<ThetaResult> {
    let n = shape.n();
    check_order(k, n)?;
    ambient.check_hosts(shape)?;
    if resolution < MIN_BRUTEFORCE_RESOLUTION {
        return Err(Error::InvalidParameter(format!(
            "brute-force resolution {resolution} below minimum {MIN_BRUTEFORCE_RESOLUTION}"
        )));
    }
    if n > MAX_HALTON_DIM {
        return Err(Error::InvalidParameter(format!(
            "brute-force grid supports dimension at most {MAX_HALTON_DIM}, got {n}"
        )));
    }

    let c_eff = ambient.effective_constant();
    let mut objective = ThetaObjective::new(shape, c_eff, k);

    // Keep the best grid directions from mutually distant basins, not just
    // the single best point: near-minimal values from different regions can
    // polish into different local minima, and the oracle must report the
    // lowest. Directions within ~20 degrees (X and -X identified) count as
    // one basin and keep only their best representative.
    let mut candidates: Vec<(f64, DVector<f64>)> = Vec::with_capacity(POLISH_CANDIDATES + 1);
    for i in 1..=resolution as u64 {
        let x = halton_sphere_point(n, i);
        let val = objective.value(&x);
        if let Some(slot) = candidates
            .iter_mut()
            .find(|(_, y)| x.dot(y).abs() >= CANDIDATE_MIN_COS)
        {
            if val < slot.0 {
                *slot = (val, x);
                candidates.sort_by(|a, b| a.0.total_cmp(&b.0));
            }
            continue;
        }
        if candidates.len() < POLISH_CANDIDATES {
            candidates.push((val, x));
            candidates.sort_by(|a, b| a.0.total_cmp(&b.0));
        } else if val < candidates.last().expect("nonempty").0 {
            candidates.pop();
            candidates.push((val, x));
            candidates.sort_by(|a, b| a.0.total_cmp(&b.0));
        }
    }

    let mut best_x = candidates[0].1.clone();
    let mut best_val = f64::INFINITY;
    for (val, x) in candidates {
        let (px, pval) = compass_sphere(
            |y| objective.value(y),
            x,
            val,
            GRID_POLISH_INIT_STEP,
            POLISH_TOL,
            POLISH_MAX_EVALS,
        );
        if pval < best_val {
            best_val = pval;
            best_x = px;
        }
    }
    finish_search(
        shape,
        ambient,
        &mut objective,
        best_x,
        best_val,
        k,
        ThetaMethod::BruteForce,
        resolution,
        POLISH_TOL,
    )
}

/// Common tail of both searches: compass-polish on the sphere, then
/// recompute the value and minimizing plane exactly at the final direction.
#[allow(clippy::too_many_arguments)]
fn finish_search(
    shape: &ShapeOperatorSet,
    ambient: &AmbientForm,
    objective: &mut ThetaObjective<'_>,
    x: DVector<f64>,
    fx: f64,
    k: usize,
    method: ThetaMethod,
    starts_used: usize,
    polish_tol: f64,
) -> Result<ThetaResult> {
    let (mut x, _) = compass_sphere(
        |y| objective.value(y),
        x,
        fx,
        POLISH_INIT_STEP,
        polish_tol.max(f64::EPSILON),
        POLISH_MAX_EVALS,
    );
    linalg::canonical_sign(&mut x);
    x.normalize_mut();
    let (theta, plane) = theta_given_x(shape, ambient, &x, k)?;
    let mut basis = vec![x.clone()];
    basis.extend(plane);
    Ok(ThetaResult {
        k,
        theta,
        argmin_x: x,
        argmin_l_basis: basis,
        method,
        starts_used,
    })
}

/// `delta_k = tau - theta_k` with default options.
pub fn delta_k(shape: &ShapeOperatorSet, ambient: &AmbientForm, k: usize) -> Result<DeltaResult> {
    delta_k_with(shape, ambient, k, &ThetaOptions::default())
}

/// `delta_k = tau - theta_k` with explicit search options.
pub fn delta_k_with(
    shape: &ShapeOperatorSet,
    ambient: &AmbientForm,
    k: usize,
    opts: &ThetaOptions,
) -> Result<DeltaResult> {
    let view = CurvatureView::new(shape, ambient)?;
    let tau = view.scalar_curvature();
    let theta = theta_k_with(shape, ambient, k, opts)?;
    let delta = tau - theta.theta;
    Ok(DeltaResult { tau, theta, delta })
}
