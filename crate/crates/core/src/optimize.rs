//! Deterministic derivative-free minimization.
//!
//! The searches here never consult a random source themselves: ties are
//! broken by index, so a run is reproducible given its starting data. Any
//! randomness lives with the caller, who picks starting points.

use nalgebra::DVector;

use crate::linalg::complement_basis;

/// Nelder-Mead simplex minimization of `f` starting at `x0` with initial
/// simplex edge `scale`. Stops when the simplex infinity-diameter drops
/// below `step_tol` or after `max_iters` reflections. Returns the best
/// vertex and its value.
pub(crate) fn nelder_mead<F>(
    mut f: F,
    x0: &DVector<f64>,
    scale: f64,
    step_tol: f64,
    max_iters: usize,
) -> (DVector<f64>, f64)
where
    F: FnMut(&DVector<f64>) -> f64,
{
    let dim = x0.len();
    debug_assert!(dim >= 1);
    let mut verts: Vec<DVector<f64>> = Vec::with_capacity(dim + 1);
    verts.push(x0.clone());
    for i in 0..dim {
        let mut v = x0.clone();
        v[i] += scale;
        verts.push(v);
    }
    let mut vals: Vec<f64> = verts.iter().map(&mut f).collect();

    const ALPHA: f64 = 1.0; // reflection
    const GAMMA: f64 = 2.0; // expansion
    const RHO: f64 = 0.5; // contraction
    const SIGMA: f64 = 0.5; // shrink

    for _ in 0..max_iters {
        // Order vertices best-first; ties broken by index for determinism.
        let mut idx: Vec<usize> = (0..=dim).collect();
        idx.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]).then(a.cmp(&b)));
        let verts_sorted: Vec<DVector<f64>> = idx.iter().map(|&i| verts[i].clone()).collect();
        let vals_sorted: Vec<f64> = idx.iter().map(|&i| vals[i]).collect();
        verts = verts_sorted;
        vals = vals_sorted;

        let diam = verts[1..]
            .iter()
            .map(|v| (v - &verts[0]).amax())
            .fold(0.0f64, f64::max);
        if diam < step_tol {
            break;
        }

        let mut centroid = DVector::zeros(dim);
        for v in &verts[..dim] {
            centroid += v;
        }
        centroid /= dim as f64;

        let reflected = &centroid + (&centroid - &verts[dim]) * ALPHA;
        let f_reflected = f(&reflected);

        if f_reflected < vals[0] {
            let expanded = &centroid + (&reflected - &centroid) * GAMMA;
            let f_expanded = f(&expanded);
            if f_expanded < f_reflected {
                verts[dim] = expanded;
                vals[dim] = f_expanded;
            } else {
                verts[dim] = reflected;
                vals[dim] = f_reflected;
            }
        } else if f_reflected < vals[dim - 1] {
            verts[dim] = reflected;
            vals[dim] = f_reflected;
        } else {
            let outside = f_reflected < vals[dim];
            let toward = if outside { &reflected } else { &verts[dim] };
            let contracted = &centroid + (toward - &centroid) * RHO;
            let f_contracted = f(&contracted);
            let gate = if outside { f_reflected } else { vals[dim] };
            if f_contracted < gate {
                verts[dim] = contracted;
                vals[dim] = f_contracted;
            } else {
                for i in 1..=dim {
                    verts[i] = &verts[0] + (&verts[i] - &verts[0]) * SIGMA;
                    vals[i] = f(&verts[i]);
                }
            }
        }
    }

    let mut best = 0;
    for i in 1..=dim {
        if vals[i] < vals[best] {
            best = i;
        }
    }
    (verts.swap_remove(best), vals[best])
}

/// Compass (coordinate pattern) descent of `f` restricted to the unit
/// sphere: probe along an orthonormal complement basis of the current point,
/// renormalize, accept strict improvements, and halve the step on failure.
/// Stops once the step drops below `tol` or after `max_evals` evaluations.
///
/// `fx` must be `f(x)`; passing it avoids one evaluation.
pub(crate) fn compass_sphere<F>(
    mut f: F,
    mut x: DVector<f64>,
    mut fx: f64,
    init_step: f64,
    tol: f64,
    max_evals: usize,
) -> (DVector<f64>, f64)
where
    F: FnMut(&DVector<f64>) -> f64,
{
    let mut step = init_step;
    let mut evals = 0usize;
    while step >= tol && evals < max_evals {
        let basis = complement_basis(&x);
        let mut improved = false;
        'probe: for c in 0..basis.ncols() {
            for sgn in [1.0f64, -1.0] {
                let mut cand = &x + basis.column(c) * (sgn * step);
                cand.normalize_mut();
                let fc = f(&cand);
                evals += 1;
                if fc < fx {
                    x = cand;
                    fx = fc;
                    improved = true;
                    break 'probe;
                }
                if evals >= max_evals {
                    break 'probe;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (x, fx)
}

/// Van der Corput radical inverse of `index` in the given base; for
/// `index >= 1` the value lies strictly inside `(0, 1)`.
pub(crate) fn halton(mut index: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while index > 0 {
        r += f * (index % base) as f64;
        index /= base;
        f *= inv;
    }
    r
}

const HALTON_PRIMES: [u64; 32] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
    101, 103, 107, 109, 113, 127, 131,
];

/// Maximum dimension supported by [`halton_sphere_point`].
pub(crate) const MAX_HALTON_DIM: usize = HALTON_PRIMES.len();

/// Deterministic quasi-uniform point on the unit sphere in `R^n`: Halton
/// coordinates in distinct prime bases pushed through the Box-Muller
/// transform and normalized. `index` must be at least 1 and `n` at most
/// [`MAX_HALTON_DIM`].
pub(crate) fn halton_sphere_point(n: usize, index: u64) -> DVector<f64> {
    debug_assert!(index >= 1, "index 0 maps to the origin");
    debug_assert!(n <= MAX_HALTON_DIM);
    let pairs = n.div_ceil(2);
    let mut coords = Vec::with_capacity(2 * pairs);
    for p in 0..pairs {
        let u1 = halton(index, HALTON_PRIMES[2 * p]);
        let u2 = halton(index, HALTON_PRIMES[2 * p + 1]);
        let radius = (-2.0 * u1.ln()).sqrt();
        let angle = std::f64::consts::TAU * u2;
        coords.push(radius * angle.cos());
        coords.push(radius * angle.sin());
    }
    coords.truncate(n);
    let mut x = DVector::from_vec(coords);
    let norm = x.norm();
    if norm < 1e-9 {
        // Essentially impossible for a low-discrepancy input; keep total.
        x.fill(0.0);
        x[0] = 1.0;
        return x;
    }
    x /= norm;
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nelder_mead_minimizes_quadratic() {
        let target = DVector::from_vec(vec![1.0, -2.0, 0.5]);
        let f = |x: &DVector<f64>| {
            (x - &target)
                .iter()
                .enumerate()
                .map(|(i, d)| (i + 1) as f64 * d * d)
                .sum::<f64>()
        };
        let x0 = DVector::zeros(3);
        let (x, fx) = nelder_mead(f, &x0, 0.7, 1e-12, 4000);
        assert!((x - &target).norm() < 1e-6, "converged to wrong point");
        assert!(fx < 1e-11);
    }

    #[test]
    fn nelder_mead_is_deterministic() {
        let f = |x: &DVector<f64>| x.iter().map(|v| (v - 0.3).powi(2)).sum::<f64>() + x[0] * x[1];
        let x0 = DVector::from_vec(vec![2.0, -1.0]);
        let (a, fa) = nelder_mead(f, &x0, 0.5, 1e-10, 2000);
        let (b, fb) = nelder_mead(f, &x0, 0.5, 1e-10, 2000);
        assert_eq!(a, b);
        assert_eq!(fa.to_bits(), fb.to_bits());
    }

    #[test]
    fn compass_descends_linear_functional_on_sphere() {
        // min over the sphere of <x, v> is attained at -v/|v|.
        let v = DVector::from_vec(vec![0.3, -0.8, 0.52]);
        let f = |x: &DVector<f64>| x.dot(&v);
        let x0 = DVector::from_vec(vec![1.0, 0.0, 0.0]);
        let fx0 = f(&x0);
        let (x, fx) = compass_sphere(f, x0, fx0, 0.5, 1e-12, 100_000);
        let expected = -&v / v.norm();
        assert!((x - expected).norm() < 1e-5);
        assert!((fx + v.norm()).abs() < 1e-10);
    }

    #[test]
    fn halton_base_two_prefix() {
        // [TRIVIAL] radical inverse in base 2: 1/2, 1/4, 3/4, 1/8, ...
        let seq: Vec<f64> = (1..=5).map(|i| halton(i, 2)).collect();
        assert_eq!(seq, vec![0.5, 0.25, 0.75, 0.125, 0.625]);
    }

    #[test]
    fn sphere_points_are_unit_and_spread() {
        let mut mean = DVector::zeros(5);
        for i in 1..=400 {
            let x = halton_sphere_point(5, i);
            assert!((x.norm() - 1.0).abs() < 1e-12);
            mean += &x;
        }
        mean /= 400.0;
        // Quasi-uniform points nearly cancel; a clustered set would not.
        assert!(mean.norm() < 0.12, "sphere points are badly clustered");
    }
}
