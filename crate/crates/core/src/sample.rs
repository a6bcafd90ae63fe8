//! Seeded random generation of shapes and frames.
//!
//! Batch work keys every sample to `(master_seed, index)` through the
//! generator's stream mechanism, so sample `i` of a batch is the same
//! whether the batch is drawn serially, in parallel, or partially.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::shape::{LagrangianShape, ShapeOperatorSet};

/// Independent generator for sample `index` of a batch keyed by
/// `master_seed`.
pub fn sample_rng(master_seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}

fn gaussian(rng: &mut impl Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// Uniformly random unit vector (normalized Gaussian).
pub fn random_unit_vector(dim: usize, rng: &mut impl Rng) -> DVector<f64> {
    loop {
        let v = DVector::from_fn(dim, |_, _| gaussian(rng));
        let norm = v.norm();
        if norm > 1e-6 {
            return v / norm;
        }
    }
}

/// Haar-distributed random orthogonal matrix: QR of a Gaussian matrix with
/// the usual sign fix on the R diagonal.
pub fn random_orthogonal(dim: usize, rng: &mut impl Rng) -> DMatrix<f64> {
    let mut g = DMatrix::zeros(dim, dim);
    for j in 0..dim {
        for i in 0..dim {
            g[(i, j)] = gaussian(rng);
        }
    }
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..dim {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

fn uniform_symmetric(amplitude: f64, rng: &mut impl Rng) -> f64 {
    amplitude * (2.0 * rng.random::<f64>() - 1.0)
}

/// Random shape with `p` independent symmetric operators, free entries
/// (upper triangle including the diagonal) i.i.d. uniform in
/// `[-amplitude, amplitude]`.
pub fn random_shape(
    n: usize,
    p: usize,
    amplitude: f64,
    rng: &mut impl Rng,
) -> Result<ShapeOperatorSet> {
    let mut ops = Vec::with_capacity(p);
    for _ in 0..p {
        let mut a = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = uniform_symmetric(amplitude, rng);
                a[(i, j)] = v;
                a[(j, i)] = v;
            }
        }
        ops.push(a);
    }
    ShapeOperatorSet::new(ops)
}

/// Random Lagrangian shape: an i.i.d. uniform `n^3` tensor symmetrized over
/// all six index permutations. Each orbit's average is computed once, in a
/// fixed order, and written to every position of the orbit, so the symmetry
/// holds exactly (not merely to rounding).
pub fn random_lagrangian(n: usize, amplitude: f64, rng: &mut impl Rng) -> Result<LagrangianShape> {
    // Underlying unsymmetrized tensor g[r][i][j], drawn in lexicographic
    // order of (r, i, j).
    let mut g = vec![0.0f64; n * n * n];
    for slot in g.iter_mut() {
        *slot = uniform_symmetric(amplitude, rng);
    }
    let at = |r: usize, i: usize, j: usize| g[(r * n + i) * n + j];

    let mut ops = vec![DMatrix::zeros(n, n); n];
    for r in 0..n {
        for i in r..n {
            for j in i..n {
                let v = (at(r, i, j)
                    + at(r, j, i)
                    + at(i, r, j)
                    + at(i, j, r)
                    + at(j, r, i)
                    + at(j, i, r))
                    / 6.0;
                ops[r][(i, j)] = v;
                ops[r][(j, i)] = v;
                ops[i][(r, j)] = v;
                ops[i][(j, r)] = v;
                ops[j][(r, i)] = v;
                ops[j][(i, r)] = v;
            }
        }
    }
    LagrangianShape::new(ShapeOperatorSet::new(ops)?)
}
