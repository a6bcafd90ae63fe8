//! Pointwise second-order data of an immersed submanifold.
//!
//! A [`ShapeOperatorSet`] holds the shape operators `A_1, ..., A_p` of an
//! `n`-dimensional submanifold at one point, expressed in an orthonormal
//! tangent frame and an orthonormal normal frame. Together with an
//! [`AmbientForm`] describing the surrounding space form, this is all the
//! data the curvature and invariant computations need.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, ORTHOGONALITY_TOL};

/// Required symmetry of each stored operator matrix.
pub const OPERATOR_SYMMETRY_TOL: f64 = 1e-12;

/// Default tolerance for the full-symmetry test of Lagrangian shape data.
pub const LAGRANGIAN_SYMMETRY_TOL: f64 = 1e-12;

/// Which family of ambient space forms a shape sits in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpaceFormKind {
    /// Real space form of constant sectional curvature `c`.
    Real,
    /// Complex space form of constant holomorphic sectional curvature `c`;
    /// submanifolds here are assumed totally real.
    Complex,
}

/// An ambient space form: its family, curvature constant, and real dimension.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AmbientForm {
    kind: SpaceFormKind,
    c: f64,
    ambient_real_dim: usize,
}

impl AmbientForm {
    /// Real space form `R^m`, `S^m(c)`, or `H^m(c)` depending on the sign of `c`.
    pub fn real(c: f64, ambient_real_dim: usize) -> Result<Self> {
        Self::new(SpaceFormKind::Real, c, ambient_real_dim)
    }

    /// Complex space form of constant holomorphic sectional curvature `c`,
    /// described by its real dimension (which must be even).
    pub fn complex(c: f64, ambient_real_dim: usize) -> Result<Self> {
        Self::new(SpaceFormKind::Complex, c, ambient_real_dim)
    }

    pub fn new(kind: SpaceFormKind, c: f64, ambient_real_dim: usize) -> Result<Self> {
        if !c.is_finite() {
            return Err(Error::AmbientInvalid(format!(
                "curvature constant must be finite, got {c}"
            )));
        }
        if ambient_real_dim == 0 {
            return Err(Error::AmbientInvalid(
                "ambient real dimension must be positive".into(),
            ));
        }
        if kind == SpaceFormKind::Complex && !ambient_real_dim.is_multiple_of(2) {
            return Err(Error::AmbientInvalid(format!(
                "complex space form needs even real dimension, got {ambient_real_dim}"
            )));
        }
        Ok(Self {
            kind,
            c,
            ambient_real_dim,
        })
    }

    pub fn kind(&self) -> SpaceFormKind {
        self.kind
    }

    /// The curvature constant of the form (holomorphic sectional curvature in
    /// the complex case).
    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn ambient_real_dim(&self) -> usize {
        self.ambient_real_dim
    }

    /// The constant sectional curvature seen by tangent planes of the
    /// submanifolds treated here: `c` in a real space form, `c/4` for totally
    /// real directions in a complex space form.
    pub fn effective_constant(&self) -> f64 {
        match self.kind {
            SpaceFormKind::Real => self.c,
            SpaceFormKind::Complex => self.c / 4.0,
        }
    }

    /// Check that this ambient space can host a shape with `n` tangent and
    /// `p` normal directions.
    pub fn check_hosts(&self, shape: &ShapeOperatorSet) -> Result<()> {
        let (n, p) = (shape.n(), shape.p());
        if n + p > self.ambient_real_dim {
            return Err(Error::AmbientTooSmall {
                m: self.ambient_real_dim,
                n,
                p,
            });
        }
        Ok(())
    }
}

/// The shape operators `A_1, ..., A_p` of an `n`-dimensional submanifold at a
/// point, one symmetric `n x n` matrix per normal direction.
///
/// `A_r[(i, j)]` equals the second-fundamental-form coefficient
/// `h^r_{ij} = <h(e_i, e_j), xi_r>` in the chosen frames. Normal directions
/// are indexed `0..p` and tangent directions `0..n` throughout the crate.
#[derive(Clone, Debug, PartialEq)]
pub struct ShapeOperatorSet {
    n: usize,
    ops: Vec<DMatrix<f64>>,
}

impl ShapeOperatorSet {
    /// Validate and wrap a list of shape operators.
    ///
    /// Requires at least one operator, tangent dimension at least 3, all
    /// matrices square of matching size, and each symmetric to within
    /// [`OPERATOR_SYMMETRY_TOL`].
    pub fn new(ops: Vec<DMatrix<f64>>) -> Result<Self> {
        let Some(first) = ops.first() else {
            return Err(Error::NoNormalDirections);
        };
        let n = first.nrows();
        if n < 3 {
            return Err(Error::DimensionTooSmall { min: 3, got: n });
        }
        for (r, op) in ops.iter().enumerate() {
            if op.nrows() != n || op.ncols() != n {
                return Err(Error::OperatorSizeMismatch {
                    r,
                    rows: op.nrows(),
                    cols: op.ncols(),
                    n,
                });
            }
            for i in 0..n {
                for j in (i + 1)..n {
                    let dev = (op[(i, j)] - op[(j, i)]).abs();
                    if dev > OPERATOR_SYMMETRY_TOL {
                        return Err(Error::AsymmetricOperator {
                            r,
                            i,
                            j,
                            deviation: dev,
                        });
                    }
                }
            }
        }
        Ok(Self { n, ops })
    }

    /// The shape of a totally geodesic point: all operators zero.
    pub fn zeros(n: usize, p: usize) -> Result<Self> {
        if p == 0 {
            return Err(Error::NoNormalDirections);
        }
        Self::new(vec![DMatrix::zeros(n, n); p])
    }

    /// Tangent dimension `n`.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Codimension `p` (number of normal directions).
    pub fn p(&self) -> usize {
        self.ops.len()
    }

    /// The shape operator for normal direction `r` (`0 <= r < p`).
    pub fn weingarten(&self, r: usize) -> Result<&DMatrix<f64>> {
        self.ops.get(r).ok_or(Error::NormalIndexOutOfRange {
            r,
            p: self.ops.len(),
        })
    }

    /// All operators, indexed by normal direction.
    pub fn operators(&self) -> &[DMatrix<f64>] {
        &self.ops
    }

    /// Re-express the operators in a rotated tangent frame with columns of
    /// `q` as the new frame vectors: each `A_r` becomes `q^T A_r q`.
    pub fn rotate_tangent_frame(&self, q: &DMatrix<f64>) -> Result<Self> {
        if q.nrows() != self.n || q.ncols() != self.n {
            return Err(Error::OperatorSizeMismatch {
                r: 0,
                rows: q.nrows(),
                cols: q.ncols(),
                n: self.n,
            });
        }
        let dev = linalg::orthogonality_deviation(q);
        if dev > ORTHOGONALITY_TOL {
            return Err(Error::NotOrthogonal {
                deviation: dev,
                tol: ORTHOGONALITY_TOL,
            });
        }
        let ops = self
            .ops
            .iter()
            .map(|a| {
                let mut rotated = q.tr_mul(&(a * q));
                // Exact resymmetrization: the product is symmetric only up to
                // rounding, and downstream validation insists on symmetry.
                linalg::symmetrize_in_place(&mut rotated);
                rotated
            })
            .collect();
        Ok(Self { n: self.n, ops })
    }

    /// Re-express the operators in a rotated normal frame with columns of `o`
    /// as the new normal vectors: the new `A'_s` is `sum_r o[(r, s)] A_r`.
    pub fn rotate_normal_frame(&self, o: &DMatrix<f64>) -> Result<Self> {
        let p = self.p();
        if o.nrows() != p || o.ncols() != p {
            return Err(Error::OperatorSizeMismatch {
                r: 0,
                rows: o.nrows(),
                cols: o.ncols(),
                n: p,
            });
        }
        let dev = linalg::orthogonality_deviation(o);
        if dev > ORTHOGONALITY_TOL {
            return Err(Error::NotOrthogonal {
                deviation: dev,
                tol: ORTHOGONALITY_TOL,
            });
        }
        let ops = (0..p)
            .map(|s| {
                let mut acc = DMatrix::zeros(self.n, self.n);
                for r in 0..p {
                    let w = o[(r, s)];
                    acc.zip_apply(&self.ops[r], |m, aij| *m += w * aij);
                }
                acc
            })
            .collect();
        Ok(Self { n: self.n, ops })
    }
}

/// The mean curvature vector in the normal frame, plus its squared norm.
#[derive(Clone, Debug, PartialEq)]
pub struct MeanCurvatureRecord {
    /// Component along each normal direction: `tr(A_r) / n`.
    pub components: Vec<f64>,
    /// `|H|^2`, the squared length of the mean curvature vector.
    pub norm_sq: f64,
}

/// Mean curvature vector of a shape: component `r` is `tr(A_r) / n`.
pub fn mean_curvature(shape: &ShapeOperatorSet) -> MeanCurvatureRecord {
    let n = shape.n() as f64;
    let components: Vec<f64> = shape.operators().iter().map(|a| a.trace() / n).collect();
    let norm_sq = components.iter().map(|h| h * h).sum();
    MeanCurvatureRecord {
        components,
        norm_sq,
    }
}

/// Outcome of the full-symmetry test for Lagrangian shape data.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymmetryReport {
    /// Whether every coefficient survives all permutations of its three
    /// indices within the requested tolerance.
    pub symmetric: bool,
    /// Largest deviation found between permuted coefficients.
    pub max_violation: f64,
}

/// Test whether `h^r_{ij}` is fully symmetric in all three indices, the
/// trademark of Lagrangian submanifolds of a complex space form (the normal
/// frame `J e_1, ..., J e_n` pairs indices `r` and `i` interchangeably).
///
/// Requires `p == n` so that the index swap is meaningful. Each operator is
/// already symmetric in `(i, j)`, so only the swap of the normal index with
/// the first tangent index is examined; together the two generate all six
/// permutations.
pub fn check_lagrangian_symmetry(shape: &ShapeOperatorSet, tol: f64) -> Result<SymmetryReport> {
    let (n, p) = (shape.n(), shape.p());
    if p != n {
        return Err(Error::NotLagrangian(format!(
            "codimension p = {p} must equal tangent dimension n = {n}"
        )));
    }
    let ops = shape.operators();
    let mut max_violation: f64 = 0.0;
    for r in 0..n {
        for i in (r + 1)..n {
            for j in 0..n {
                let dev = (ops[r][(i, j)] - ops[i][(r, j)]).abs();
                max_violation = max_violation.max(dev);
            }
        }
    }
    Ok(SymmetryReport {
        symmetric: max_violation <= tol,
        max_violation,
    })
}

/// Shape data of a Lagrangian submanifold of a complex space form: `p == n`
/// and coefficients fully symmetric in all three indices.
///
/// Construction enforces full symmetry to [`LAGRANGIAN_SYMMETRY_TOL`]; use
/// [`check_lagrangian_symmetry`] to probe arbitrary shape data without
/// constructing this type.
#[derive(Clone, Debug, PartialEq)]
pub struct LagrangianShape {
    shape: ShapeOperatorSet,
}

impl LagrangianShape {
    pub fn new(shape: ShapeOperatorSet) -> Result<Self> {
        Self::with_tolerance(shape, LAGRANGIAN_SYMMETRY_TOL)
    }

    pub fn with_tolerance(shape: ShapeOperatorSet, tol: f64) -> Result<Self> {
        let report = check_lagrangian_symmetry(&shape, tol)?;
        if !report.symmetric {
            return Err(Error::NotLagrangian(format!(
                "coefficients not fully symmetric: max violation {:.3e} exceeds {tol:.1e}",
                report.max_violation
            )));
        }
        Ok(Self { shape })
    }

    pub fn shape(&self) -> &ShapeOperatorSet {
        &self.shape
    }

    pub fn into_shape(self) -> ShapeOperatorSet {
        self.shape
    }

    pub fn n(&self) -> usize {
        self.shape.n()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use nalgebra::DVector;

    fn diag(values: &[f64]) -> DMatrix<f64> {
        DMatrix::from_diagonal(&DVector::from_row_slice(values))
    }

    #[test]
    fn rejects_empty_and_small_shapes() {
        assert!(matches!(
            ShapeOperatorSet::new(vec![]),
            Err(Error::NoNormalDirections)
        ));
        let tiny = vec![DMatrix::zeros(2, 2)];
        assert!(matches!(
            ShapeOperatorSet::new(tiny),
            Err(Error::DimensionTooSmall { min: 3, got: 2 })
        ));
    }

    #[test]
    fn rejects_asymmetric_operator_with_indices() {
        let mut a = DMatrix::zeros(3, 3);
        a[(0, 2)] = 1.0;
        a[(2, 0)] = 1.0 + 1e-6;
        let err = ShapeOperatorSet::new(vec![DMatrix::zeros(3, 3), a]).unwrap_err();
        match err {
            Error::AsymmetricOperator { r, i, j, .. } => {
                assert_eq!((r, i, j), (1, 0, 2));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn rejects_mismatched_operator_sizes() {
        let ops = vec![DMatrix::zeros(3, 3), DMatrix::zeros(4, 4)];
        assert!(matches!(
            ShapeOperatorSet::new(ops),
            Err(Error::OperatorSizeMismatch { r: 1, .. })
        ));
    }

    #[test]
    fn weingarten_bounds_checked() {
        let s = ShapeOperatorSet::zeros(3, 2).unwrap();
        assert!(s.weingarten(1).is_ok());
        assert!(matches!(
            s.weingarten(2),
            Err(Error::NormalIndexOutOfRange { r: 2, p: 2 })
        ));
    }

    #[test]
    fn mean_curvature_of_round_sphere_point() {
        // [TRIVIAL] A_1 = I in n = 3 gives H = (1) and |H|^2 = 1.
        let s = ShapeOperatorSet::new(vec![diag(&[1.0, 1.0, 1.0])]).unwrap();
        let h = mean_curvature(&s);
        assert_abs_diff_eq!(h.components[0], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(h.norm_sq, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn ambient_validation() {
        assert!(AmbientForm::complex(4.0, 7).is_err());
        assert!(AmbientForm::real(f64::NAN, 4).is_err());
        let amb = AmbientForm::complex(4.0, 6).unwrap();
        assert_abs_diff_eq!(amb.effective_constant(), 1.0, epsilon = 1e-15);
        let amb = AmbientForm::real(-2.0, 5).unwrap();
        assert_abs_diff_eq!(amb.effective_constant(), -2.0, epsilon = 1e-15);

        let s = ShapeOperatorSet::zeros(3, 2).unwrap();
        assert!(AmbientForm::real(0.0, 5).unwrap().check_hosts(&s).is_ok());
        assert!(matches!(
            AmbientForm::real(0.0, 4).unwrap().check_hosts(&s),
            Err(Error::AmbientTooSmall { m: 4, n: 3, p: 2 })
        ));
    }

    #[test]
    fn tangent_rotation_round_trip() {
        let s = ShapeOperatorSet::new(vec![DMatrix::from_row_slice(
            3,
            3,
            &[1.0, 0.5, 0.0, 0.5, -1.0, 0.25, 0.0, 0.25, 2.0],
        )])
        .unwrap();
        // Rotation in the (0, 1) tangent plane.
        let th: f64 = 0.7;
        let q = DMatrix::from_row_slice(
            3,
            3,
            &[
                th.cos(),
                -th.sin(),
                0.0,
                th.sin(),
                th.cos(),
                0.0,
                0.0,
                0.0,
                1.0,
            ],
        );
        let rotated = s.rotate_tangent_frame(&q).unwrap();
        let back = rotated.rotate_tangent_frame(&q.transpose()).unwrap();
        for (a, b) in s.operators().iter().zip(back.operators()) {
            assert!((a - b).abs().max() < 1e-12);
        }
    }

    #[test]
    fn normal_rotation_mixes_operators_linearly() {
        let a1 = diag(&[1.0, 2.0, 3.0]);
        let a2 = diag(&[-1.0, 0.0, 1.0]);
        let s = ShapeOperatorSet::new(vec![a1.clone(), a2.clone()]).unwrap();
        let th: f64 = 0.3;
        let o = DMatrix::from_row_slice(2, 2, &[th.cos(), -th.sin(), th.sin(), th.cos()]);
        let rotated = s.rotate_normal_frame(&o).unwrap();
        let expected0 = &a1 * th.cos() + &a2 * th.sin();
        assert!((rotated.weingarten(0).unwrap() - expected0).abs().max() < 1e-14);
    }

    #[test]
    fn rotation_rejects_nonorthogonal_frames() {
        let s = ShapeOperatorSet::zeros(3, 1).unwrap();
        let mut q = DMatrix::identity(3, 3);
        q[(0, 1)] = 1e-6;
        assert!(matches!(
            s.rotate_tangent_frame(&q),
            Err(Error::NotOrthogonal { .. })
        ));
    }

    #[test]
    fn full_symmetry_detects_violations() {
        // Fully symmetric coefficients: h^r_{ij} = r + i + j keeps every
        // permutation of the three indices equal.
        let n = 3;
        let ops: Vec<DMatrix<f64>> = (0..n)
            .map(|r| DMatrix::from_fn(n, n, |i, j| (r + i + j) as f64))
            .collect();
        let s = ShapeOperatorSet::new(ops).unwrap();
        let report = check_lagrangian_symmetry(&s, LAGRANGIAN_SYMMETRY_TOL).unwrap();
        assert!(report.symmetric);
        assert!(LagrangianShape::new(s.clone()).is_ok());

        // Breaking one coefficient pair by 1e-3 must be caught and measured.
        let mut ops: Vec<DMatrix<f64>> = s.operators().to_vec();
        ops[0][(1, 2)] += 1e-3;
        ops[0][(2, 1)] += 1e-3;
        let bad = ShapeOperatorSet::new(ops).unwrap();
        let report = check_lagrangian_symmetry(&bad, LAGRANGIAN_SYMMETRY_TOL).unwrap();
        assert!(!report.symmetric);
        assert_abs_diff_eq!(report.max_violation, 1e-3, epsilon = 1e-12);
        assert!(LagrangianShape::new(bad).is_err());
    }

    #[test]
    fn symmetry_check_requires_square_codimension() {
        let s = ShapeOperatorSet::zeros(3, 2).unwrap();
        assert!(matches!(
            check_lagrangian_symmetry(&s, 1e-12),
            Err(Error::NotLagrangian(_))
        ));
    }
}
