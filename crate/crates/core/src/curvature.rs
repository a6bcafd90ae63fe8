//! Intrinsic curvature of a shape via the Gauss equation.
//!
//! All quantities are assembled from the ambient curvature constant and the
//! shape operators alone: for tangent vectors `X, Y`,
//!
//! ```text
//! R(X, Y, X, Y) = c_eff (|X|^2 |Y|^2 - <X, Y>^2)
//!                 + sum_r [ (X' A_r X)(Y' A_r Y) - (X' A_r Y)^2 ]
//! ```
//!
//! where `c_eff` is the effective sectional constant of the ambient form
//! ([`AmbientForm::effective_constant`]).

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg;
use crate::shape::{AmbientForm, ShapeOperatorSet};

/// Tolerance for unit-length and orthonormality checks on user-supplied
/// directions and plane bases.
pub const DIRECTION_TOL: f64 = 1e-10;

/// Curvature data of one shape in one ambient form, with the sectional
/// curvatures of coordinate planes precomputed.
pub struct CurvatureView<'a> {
    shape: &'a ShapeOperatorSet,
    c_eff: f64,
    /// `K(e_i, e_j)` for `i != j`; the diagonal holds NaN as a sentinel since
    /// a "plane" spanned by one vector has no sectional curvature.
    sectional: DMatrix<f64>,
}

impl<'a> CurvatureView<'a> {
    pub fn new(shape: &'a ShapeOperatorSet, ambient: &AmbientForm) -> Result<Self> {
        ambient.check_hosts(shape)?;
        let n = shape.n();
        let c_eff = ambient.effective_constant();
        let mut sectional = DMatrix::from_element(n, n, f64::NAN);
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let mut k = c_eff;
                for a in shape.operators() {
                    k += a[(i, i)] * a[(j, j)] - a[(i, j)] * a[(i, j)];
                }
                sectional[(i, j)] = k;
            }
        }
        Ok(Self {
            shape,
            c_eff,
            sectional,
        })
    }

    pub fn shape(&self) -> &ShapeOperatorSet {
        self.shape
    }

    /// Effective constant sectional curvature of the ambient form.
    pub fn effective_constant(&self) -> f64 {
        self.c_eff
    }

    /// Sectional curvature of the coordinate plane spanned by frame vectors
    /// `i` and `j`. The arguments must differ: the diagonal is not a plane.
    pub fn sectional(&self, i: usize, j: usize) -> f64 {
        debug_assert!(i != j, "sectional curvature needs two distinct directions");
        self.sectional[(i, j)]
    }

    /// The full table of coordinate-plane sectional curvatures; diagonal
    /// entries are NaN sentinels.
    pub fn sectional_block(&self) -> &DMatrix<f64> {
        &self.sectional
    }

    /// Scalar curvature `tau = sum_{i < j} K(e_i, e_j)`, evaluated through
    /// the trace form of the Gauss equation:
    /// `tau = n(n-1)/2 c_eff + 1/2 sum_r [ (tr A_r)^2 - |A_r|_F^2 ]`.
    pub fn scalar_curvature(&self) -> f64 {
        let n = self.shape.n() as f64;
        let mut tau = 0.5 * n * (n - 1.0) * self.c_eff;
        for a in self.shape.operators() {
            let tr = a.trace();
            let frob_sq: f64 = a.iter().map(|v| v * v).sum();
            tau += 0.5 * (tr * tr - frob_sq);
        }
        tau
    }

    /// The (unnormalized) curvature value `R(X, Y, X, Y)` for arbitrary
    /// tangent vectors; no unit-length requirement.
    pub fn curvature_xyxy(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        let mut value = self.c_eff * (x.norm_squared() * y.norm_squared() - x.dot(y) * x.dot(y));
        for a in self.shape.operators() {
            let ax = a * x;
            let xax = x.dot(&ax);
            let yax = y.dot(&ax);
            let yay = y.dot(&(a * y));
            value += xax * yay - yax * yax;
        }
        value
    }

    /// Partial Ricci curvature of a unit vector `x` inside the plane spanned
    /// by `x` and the supplied orthonormal complement basis:
    /// `Ric_L(X) = sum_a R(X, u_a, X, u_a)`.
    ///
    /// `x` must be unit and the basis vectors unit, mutually orthogonal, and
    /// orthogonal to `x`, each to within [`DIRECTION_TOL`].
    pub fn ric_l(&self, x: &DVector<f64>, l_basis: &[DVector<f64>]) -> Result<f64> {
        let n = self.shape.n();
        check_unit(x, n)?;
        let mut frame = DMatrix::zeros(n, 1 + l_basis.len());
        frame.set_column(0, x);
        for (a, u) in l_basis.iter().enumerate() {
            if u.len() != n {
                return Err(Error::OperatorSizeMismatch {
                    r: a,
                    rows: u.len(),
                    cols: 1,
                    n,
                });
            }
            frame.set_column(1 + a, u);
        }
        let dev = linalg::orthogonality_deviation(&frame);
        if dev > DIRECTION_TOL {
            return Err(Error::NotOrthonormal {
                what: "plane basis",
                deviation: dev,
                tol: DIRECTION_TOL,
            });
        }
        Ok(l_basis.iter().map(|u| self.curvature_xyxy(x, u)).sum())
    }

    /// The Jacobi-type quadratic form of a unit direction `x`: the symmetric
    /// `(n-1) x (n-1)` matrix `B` over a deterministic orthonormal basis `U`
    /// of the complement of `x`, with
    /// `B[(a, b)] = R(x, u_a, x, u_b)`.
    ///
    /// Partial Ricci curvatures of planes through `x` are sums of diagonal
    /// entries of `B` after rotating `U`; in particular the minimum of
    /// `Ric_L(x)` over `k`-planes `L` containing `x` is the sum of the
    /// `k - 1` smallest eigenvalues of `B`.
    pub fn jacobi_form(&self, x: &DVector<f64>) -> Result<JacobiForm> {
        let n = self.shape.n();
        check_unit(x, n)?;
        let basis = linalg::complement_basis(x);
        let mut matrix = DMatrix::identity(n - 1, n - 1) * self.c_eff;
        for a in self.shape.operators() {
            let ax = a * x;
            let xax = x.dot(&ax);
            let g = basis.tr_mul(&(a * &basis));
            let v = basis.tr_mul(&ax);
            // matrix += xax * g - v v^T
            matrix.zip_apply(&g, |m, gab| *m += xax * gab);
            matrix.ger(-1.0, &v, &v, 1.0);
        }
        linalg::symmetrize_in_place(&mut matrix);
        Ok(JacobiForm {
            direction: x.clone(),
            basis,
            matrix,
        })
    }
}

/// Jacobi-type form of one unit direction: complement basis and the matrix
/// of `R(x, ., x, .)` over it.
pub struct JacobiForm {
    pub direction: DVector<f64>,
    /// `n x (n-1)`; columns span the complement of `direction`.
    pub basis: DMatrix<f64>,
    /// Symmetric `(n-1) x (n-1)` matrix of the form over `basis`.
    pub matrix: DMatrix<f64>,
}

/// Ricci operator of the shape in the tangent frame:
/// `Ric[(i, j)] = (n-1) c_eff delta_ij + sum_r [ A_r[(i, j)] tr(A_r) - (A_r^2)[(i, j)] ]`,
/// so that `x^T Ric x` is the (full) Ricci curvature of a unit `x` and
/// `tr(Ric) = 2 tau`.
pub fn ricci_matrix(shape: &ShapeOperatorSet, ambient: &AmbientForm) -> Result<DMatrix<f64>> {
    ambient.check_hosts(shape)?;
    let n = shape.n();
    let c_eff = ambient.effective_constant();
    let mut ric = DMatrix::identity(n, n) * ((n as f64 - 1.0) * c_eff);
    for a in shape.operators() {
        let tr = a.trace();
        ric.zip_apply(a, |m, aij| *m += tr * aij);
        ric.gemm(-1.0, a, a, 1.0);
    }
    linalg::symmetrize_in_place(&mut ric);
    Ok(ric)
}

fn check_unit(x: &DVector<f64>, n: usize) -> Result<()> {
    if x.len() != n {
        return Err(Error::OperatorSizeMismatch {
            r: 0,
            rows: x.len(),
            cols: 1,
            n,
        });
    }
    let dev = (x.norm() - 1.0).abs();
    if dev > DIRECTION_TOL {
        return Err(Error::NotUnit {
            deviation: dev,
            tol: DIRECTION_TOL,
        });
    }
    Ok(())
}
