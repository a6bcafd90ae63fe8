//! Small dense linear-algebra helpers shared across the crate.
//!
//! Everything here is deterministic: no randomness, ties broken by index, and
//! eigenvector signs fixed by [`canonical_sign`].

use nalgebra::{DMatrix, DVector};

/// Threshold below which a coordinate is treated as zero when fixing signs.
pub(crate) const SIGN_EPS: f64 = 1e-12;

/// Largest admissible deviation when a matrix claims to be orthogonal.
pub const ORTHOGONALITY_TOL: f64 = 1e-10;

/// Eigenvalues of a symmetric matrix, ascending.
///
/// Sizes 1-3 use closed forms (the 3x3 case via the trigonometric solution of
/// the characteristic cubic); larger sizes fall back to an iterative
/// symmetric eigensolver. Only the lower triangle and diagonal are read on
/// the closed-form paths, so a numerically symmetrized input is not required.
pub fn sym_eigenvalues_sorted(m: &DMatrix<f64>) -> Vec<f64> {
    let n = m.nrows();
    debug_assert_eq!(n, m.ncols(), "matrix must be square");
    match n {
        0 => Vec::new(),
        1 => vec![m[(0, 0)]],
        2 => {
            let (a, b, c) = (m[(0, 0)], m[(1, 0)], m[(1, 1)]);
            let mid = 0.5 * (a + c);
            let rad = (0.25 * (a - c) * (a - c) + b * b).sqrt();
            vec![mid - rad, mid + rad]
        }
        3 => eigenvalues_3x3(m),
        _ => {
            let mut vals: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
            vals.sort_by(f64::total_cmp);
            vals
        }
    }
}

/// Eigenvalues of a symmetric 3x3 matrix via the trigonometric form of the
/// characteristic cubic, ascending.
fn eigenvalues_3x3(m: &DMatrix<f64>) -> Vec<f64> {
    let (a00, a11, a22) = (m[(0, 0)], m[(1, 1)], m[(2, 2)]);
    let (a10, a20, a21) = (m[(1, 0)], m[(2, 0)], m[(2, 1)]);
    let off = a10 * a10 + a20 * a20 + a21 * a21;
    let q = (a00 + a11 + a22) / 3.0;
    let dd = (a00 - q) * (a00 - q) + (a11 - q) * (a11 - q) + (a22 - q) * (a22 - q);
    let p = ((dd + 2.0 * off) / 6.0).sqrt();
    if p == 0.0 {
        return vec![q, q, q];
    }
    // det((M - qI)/p) / 2, expanded from the lower triangle.
    let (b00, b11, b22) = ((a00 - q) / p, (a11 - q) / p, (a22 - q) / p);
    let (b10, b20, b21) = (a10 / p, a20 / p, a21 / p);
    let det = b00 * (b11 * b22 - b21 * b21) - b10 * (b10 * b22 - b21 * b20)
        + b20 * (b10 * b21 - b11 * b20);
    let r = (det / 2.0).clamp(-1.0, 1.0);
    let phi = r.acos() / 3.0;
    let hi = q + 2.0 * p * phi.cos();
    let lo = q + 2.0 * p * (phi + 2.0 * std::f64::consts::FRAC_PI_3).cos();
    vec![lo, 3.0 * q - hi - lo, hi]
}

/// Full symmetric eigendecomposition, eigenvalues ascending, each eigenvector
/// sign-fixed by [`canonical_sign`]. Columns of the returned matrix are the
/// eigenvectors in eigenvalue order.
pub fn sym_eigen_sorted(m: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let n = m.nrows();
    let eig = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a]
            .total_cmp(&eig.eigenvalues[b])
            .then(a.cmp(&b))
    });
    let values = DVector::from_fn(n, |i, _| eig.eigenvalues[order[i]]);
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = eig.eigenvectors.column(src).clone_owned();
        canonical_sign(&mut col);
        vectors.set_column(dst, &col);
    }
    (values, vectors)
}

/// Sum of the `count` smallest eigenvalues of a symmetric matrix.
pub fn sum_smallest_eigenvalues(m: &DMatrix<f64>, count: usize) -> f64 {
    debug_assert!(count <= m.nrows());
    sym_eigenvalues_sorted(m).iter().take(count).sum()
}

/// Maximum absolute entry of `Q^T Q - I`; zero for an exactly orthogonal `Q`
/// (columns orthonormal; `Q` may be rectangular with full column rank).
pub fn orthogonality_deviation(q: &DMatrix<f64>) -> f64 {
    let gram = q.tr_mul(q);
    let mut dev: f64 = 0.0;
    for i in 0..gram.nrows() {
        for j in 0..gram.ncols() {
            let target = if i == j { 1.0 } else { 0.0 };
            dev = dev.max((gram[(i, j)] - target).abs());
        }
    }
    dev
}

/// Flip `v` so its first coordinate of magnitude above [`SIGN_EPS`] is
/// positive. Leaves a (near-)zero vector untouched.
pub fn canonical_sign(v: &mut DVector<f64>) {
    for i in 0..v.len() {
        if v[i].abs() > SIGN_EPS {
            if v[i] < 0.0 {
                v.neg_mut();
            }
            return;
        }
    }
}

/// Deterministic orthonormal basis of the hyperplane `{ v : sum_i v_i = 0 }`
/// in `R^n`, returned as the columns of an `n x (n-1)` matrix.
///
/// Column `k` (0-based) is `(1, ..., 1, -(k+1), 0, ..., 0) / sqrt((k+1)(k+2))`
/// with `k + 1` leading ones.
pub fn hyperplane_basis(n: usize) -> DMatrix<f64> {
    debug_assert!(n >= 2);
    DMatrix::from_fn(n, n - 1, |i, k| {
        let m = (k + 1) as f64;
        let scale = 1.0 / (m * (m + 1.0)).sqrt();
        if i <= k {
            scale
        } else if i == k + 1 {
            -m * scale
        } else {
            0.0
        }
    })
}

/// Deterministic orthonormal basis of the orthogonal complement of a unit
/// vector `x`, returned as the columns of an `n x (n-1)` matrix.
///
/// The basis is produced by Gram-Schmidt (run twice for stability) on the
/// coordinate vectors `e_j`, taking `j` in ascending order of `|x_j|` and
/// dropping the index where `|x_j|` is largest. Since that dropped component
/// is at least `1/sqrt(n)`, the construction is uniformly well conditioned.
pub fn complement_basis(x: &DVector<f64>) -> DMatrix<f64> {
    let n = x.len();
    let mut basis = DMatrix::zeros(n, n - 1);
    complement_basis_into(x, &mut basis);
    basis
}

/// [`complement_basis`] writing into a preallocated `n x (n-1)` buffer.
pub(crate) fn complement_basis_into(x: &DVector<f64>, basis: &mut DMatrix<f64>) {
    let n = x.len();
    debug_assert!(n >= 2);
    debug_assert!((x.norm() - 1.0).abs() < 1e-8, "direction must be unit");
    debug_assert_eq!((basis.nrows(), basis.ncols()), (n, n - 1));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| x[a].abs().total_cmp(&x[b].abs()).then(a.cmp(&b)));

    let mut v = DVector::zeros(n);
    for (col, &j) in order[..n - 1].iter().enumerate() {
        v.fill(0.0);
        v[j] = 1.0;
        for _ in 0..2 {
            let along = x.dot(&v);
            v.axpy(-along, x, 1.0);
            for prev in 0..col {
                let along = basis.column(prev).dot(&v);
                let prev_col = basis.column(prev);
                for (vi, bi) in v.iter_mut().zip(prev_col.iter()) {
                    *vi -= along * bi;
                }
            }
        }
        v.normalize_mut();
        canonical_sign(&mut v);
        basis.set_column(col, &v);
    }
}

/// Replace `m` by its symmetric part `(m + m^T) / 2`.
pub(crate) fn symmetrize_in_place(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    debug_assert_eq!(n, m.ncols());
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = avg;
            m[(j, i)] = avg;
        }
    }
}
