//! Extreme eigenpairs of real symmetric tridiagonal matrices.
//!
//! Eigenvalues are located by Sturm-sequence bisection on the Gershgorin
//! interval; eigenvectors come from inverse iteration with a partially
//! pivoted tridiagonal LU factorization. Both steps are deterministic for a
//! fixed input.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{tridiag_apply, TridiagonalBlock};

/// Relative width at which bisection stops.
pub const BISECTION_REL_TOL: f64 = 1e-14;
/// Residual bound `‖T v − E v‖ ≤ RESIDUAL_TOL · max(1, |E|)`.
pub const RESIDUAL_TOL: f64 = 1e-10;

const MAX_BISECTION_STEPS: usize = 300;
const MAX_INVERSE_STEPS: usize = 8;
const MAX_ATTEMPTS: usize = 3;
const FALLBACK_SEED: u64 = 0x7c_5eed;

#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub value: f64,
    /// Unit norm, first nonzero entry positive.
    pub vector: Vec<f64>,
}

/// Number of eigenvalues strictly below `x`.
pub fn sturm_count(diag: &[f64], offdiag: &[f64], x: f64) -> usize {
    let pivmin = pivot_floor(offdiag);
    let mut count = 0;
    let mut q = 0.0;
    for i in 0..diag.len() {
        q = if i == 0 { diag[0] - x } else { diag[i] - x - offdiag[i - 1] * offdiag[i - 1] / q };
        if q.abs() < pivmin {
            q = -pivmin;
        }
        if q <= 0.0 {
            count += 1;
        }
    }
    count
}

fn pivot_floor(offdiag: &[f64]) -> f64 {
    let emax = offdiag.iter().fold(1.0f64, |m, e| m.max(e * e));
    f64::MIN_POSITIVE * emax
}

/// Gershgorin enclosure `[lo, hi]` of the spectrum.
pub fn gershgorin(diag: &[f64], offdiag: &[f64]) -> (f64, f64) {
    let n = diag.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let left = if i > 0 { offdiag[i - 1].abs() } else { 0.0 };
        let right = if i + 1 < n { offdiag[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - left - right);
        hi = hi.max(diag[i] + left + right);
    }
    (lo, hi)
}

/// The `k`-th smallest eigenvalue (0-based).
pub fn kth_eigenvalue(diag: &[f64], offdiag: &[f64], k: usize) -> f64 {
    let (g_lo, g_hi) = gershgorin(diag, offdiag);
    let pad = f64::EPSILON * g_lo.abs().max(g_hi.abs()).max(1.0);
    let mut lo = g_lo - pad;
    let mut hi = g_hi + pad;
    for _ in 0..MAX_BISECTION_STEPS {
        if hi - lo <= BISECTION_REL_TOL * lo.abs().max(hi.abs()) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(diag, offdiag, mid) > k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Full spectrum in ascending order.
pub fn eigenvalues(diag: &[f64], offdiag: &[f64]) -> Vec<f64> {
    (0..diag.len()).map(|k| kth_eigenvalue(diag, offdiag, k)).collect()
}

pub fn all_eigenvalues(block: &TridiagonalBlock) -> Vec<f64> {
    eigenvalues(&block.diag, &block.offdiag)
}

pub fn ground_eigenpair(block: &TridiagonalBlock) -> Result<EigenPair> {
    ground_pair(&block.diag, &block.offdiag)
}

/// Lowest eigenpair of an unreduced symmetric tridiagonal matrix.
pub fn ground_pair(diag: &[f64], offdiag: &[f64]) -> Result<EigenPair> {
    check_unreduced(diag, offdiag)?;
    let value = kth_eigenvalue(diag, offdiag, 0);
    eigenvector_for(diag, offdiag, value)
}

fn check_unreduced(diag: &[f64], offdiag: &[f64]) -> Result<()> {
    if diag.is_empty() {
        return Err(Error::EmptyBlock);
    }
    assert_eq!(offdiag.len() + 1, diag.len(), "off-diagonal length mismatch");
    if let Some((index, &value)) = offdiag.iter().enumerate().find(|(_, e)| **e == 0.0 || !e.is_finite()) {
        return Err(Error::ReducibleBlock { index, value });
    }
    Ok(())
}

/// Eigenvector for an already located eigenvalue, by inverse iteration.
pub fn eigenvector_for(diag: &[f64], offdiag: &[f64], value: f64) -> Result<EigenPair> {
    check_unreduced(diag, offdiag)?;
    let n = diag.len();
    if n == 1 {
        return Ok(EigenPair { value, vector: vec![1.0] });
    }
    let tol = RESIDUAL_TOL * value.abs().max(1.0);
    let norm = diag.iter().chain(offdiag).fold(0.0f64, |m, x| m.max(x.abs())).max(f64::MIN_POSITIVE);

    // The ground vector of a matrix with off-diagonal signs s follows the
    // gauge s_{k+1} = -sign(e_k) s_k, so this start has positive overlap with it.
    let mut start = vec![1.0; n];
    for k in 1..n {
        start[k] = -offdiag[k - 1].signum() * start[k - 1];
    }
    let mut rng = ChaCha8Rng::seed_from_u64(FALLBACK_SEED);
    let mut best = f64::INFINITY;

    for attempt in 0..MAX_ATTEMPTS {
        let shift = if attempt == 0 {
            value
        } else {
            for x in start.iter_mut() {
                *x *= 1.0 + 1e-8 * rng.random_range(-1.0..1.0);
            }
            value + 1e-8 * norm * rng.random_range(-1.0..1.0)
        };
        let lu = TridiagLu::factor(diag, offdiag, shift, norm);
        let mut v = start.clone();
        normalize(&mut v);
        for _ in 0..MAX_INVERSE_STEPS {
            lu.solve(&mut v);
            if !normalize(&mut v) {
                break;
            }
            let r = residual_norm(diag, offdiag, value, &v);
            best = best.min(r);
            if r <= tol {
                fix_sign(&mut v);
                return Ok(EigenPair { value, vector: v });
            }
        }
    }
    Err(Error::NoConvergence { residual: best, attempts: MAX_ATTEMPTS })
}

/// `‖T v − λ v‖₂`.
pub fn residual_norm(diag: &[f64], offdiag: &[f64], value: f64, v: &[f64]) -> f64 {
    tridiag_apply(diag, offdiag, v).iter().zip(v).map(|(tv, x)| (tv - value * x).powi(2)).sum::<f64>().sqrt()
}

fn normalize(v: &mut [f64]) -> bool {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !(n > 0.0) || !n.is_finite() {
        return false;
    }
    v.iter_mut().for_each(|x| *x /= n);
    true
}

fn fix_sign(v: &mut [f64]) {
    if let Some(&first) = v.iter().find(|x| **x != 0.0) {
        if first < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

/// LU factors of `T − σI` with partial pivoting (same layout as LAPACK gttrf).
struct TridiagLu {
    dl: Vec<f64>,
    d: Vec<f64>,
    du: Vec<f64>,
    du2: Vec<f64>,
    swapped: Vec<bool>,
}

impl TridiagLu {
    fn factor(diag: &[f64], offdiag: &[f64], shift: f64, norm: f64) -> Self {
        let n = diag.len();
        let mut d: Vec<f64> = diag.iter().map(|x| x - shift).collect();
        let mut dl = offdiag.to_vec();
        let mut du = offdiag.to_vec();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        let tiny = f64::EPSILON * norm;

        for i in 0..n - 1 {
            if d[i].abs() >= dl[i].abs() {
                if d[i] == 0.0 {
                    d[i] = tiny;
                }
                let fact = dl[i] / d[i];
                dl[i] = fact;
                d[i + 1] -= fact * du[i];
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] *= -fact;
                }
                swapped[i] = true;
            }
        }
        if d[n - 1] == 0.0 {
            d[n - 1] = tiny;
        }
        Self { dl, d, du, du2, swapped }
    }

    fn solve(&self, b: &mut [f64]) {
        let n = self.d.len();
        for i in 0..n - 1 {
            if self.swapped[i] {
                let temp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = temp - self.dl[i] * b[i];
            } else {
                b[i + 1] -= self.dl[i] * b[i];
            }
        }
        b[n - 1] /= self.d[n - 1];
        if n > 1 {
            b[n - 2] = (b[n - 2] - self.du[n - 2] * b[n - 1]) / self.d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.du[i] * b[i + 1] - self.du2[i] * b[i + 2]) / self.d[i];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{hamiltonian_block, ModelParams};
    use nalgebra::{DMatrix, SymmetricEigen};
    use proptest::prelude::*;
    use rand::Rng;

    fn dense(diag: &[f64], off: &[f64]) -> DMatrix<f64> {
        let n = diag.len();
        DMatrix::from_fn(n, n, |r, c| {
            if r == c {
                diag[r]
            } else if r + 1 == c {
                off[r]
            } else if c + 1 == r {
                off[c]
            } else {
                0.0
            }
        })
    }

    fn random_tridiag(n: usize, seed: u64) -> (Vec<f64>, Vec<f64>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
        let e = (0..n - 1).map(|_| rng.random_range(0.1..3.0)).collect();
        (d, e)
    }

    #[test]
    fn two_by_two_ground_state() {
        let w = 2.0;
        let g = 0.7;
        let pair = ground_pair(&[w / 2.0, w / 2.0], &[g]).unwrap();
        assert!((pair.value - (w / 2.0 - g)).abs() < 1e-14);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((pair.vector[0] - s).abs() < 1e-12);
        assert!((pair.vector[1] + s).abs() < 1e-12);
    }

    #[test]
    fn one_by_one() {
        let pair = ground_pair(&[3.25], &[]).unwrap();
        assert_eq!(pair.value, 3.25);
        assert_eq!(pair.vector, vec![1.0]);
        assert_eq!(eigenvalues(&[3.25], &[]), vec![3.25]);
    }

    #[test]
    fn symmetric_pair_spectrum() {
        let ev = eigenvalues(&[1.5, 1.5], &[0.25]);
        assert!((ev[0] - 1.25).abs() < 1e-14);
        assert!((ev[1] - 1.75).abs() < 1e-14);
    }

    #[test]
    fn resonant_two_emitter_block_symmetric_about_diagonal() {
        let p = ModelParams::new(2, 1.0, 0.0, 1.0).unwrap();
        let b = hamiltonian_block(&p, 1);
        let ev = all_eigenvalues(&b);
        assert!((ev[0] + ev[1] - 2.0 * b.diag[0]).abs() < 1e-14);
        assert!((ev[1] - ev[0] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn random_block_matches_dense_oracle() {
        for seed in 0..5 {
            let (d, e) = random_tridiag(50, seed);
            let oracle = SymmetricEigen::new(dense(&d, &e)).eigenvalues;
            let emin = oracle.iter().cloned().fold(f64::INFINITY, f64::min);
            let pair = ground_pair(&d, &e).unwrap();
            assert!((pair.value - emin).abs() < 1e-10, "{} vs {emin}", pair.value);
            let mut sorted: Vec<f64> = oracle.iter().cloned().collect();
            sorted.sort_by(f64::total_cmp);
            for (a, b) in eigenvalues(&d, &e).iter().zip(&sorted) {
                assert!((a - b).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn ground_pair_invariants_on_physical_blocks() {
        let p = ModelParams::with_detuning(1000, 3.0).unwrap();
        for nu in [1u64, 10, 500, 999, 1000, 1001, 2500, 3000] {
            let b = hamiltonian_block(&p, nu);
            let pair = ground_eigenpair(&b).unwrap();
            let norm: f64 = pair.vector.iter().map(|x| x * x).sum();
            assert!((norm - 1.0).abs() < 1e-12);
            let r = residual_norm(&b.diag, &b.offdiag, pair.value, &pair.vector);
            assert!(r <= RESIDUAL_TOL * pair.value.abs().max(1.0), "nu={nu} r={r:e}");
            assert!(pair.vector[0] > 0.0);
        }
    }

    #[test]
    fn sturm_count_brackets_ground_value() {
        for seed in 10..15 {
            let (d, e) = random_tridiag(30, seed);
            let pair = ground_pair(&d, &e).unwrap();
            let eps = 1e-9;
            assert_eq!(sturm_count(&d, &e, pair.value - eps), 0);
            assert!(sturm_count(&d, &e, pair.value + eps) >= 1);
        }
    }

    #[test]
    fn inverse_iteration_vectors_are_orthogonal() {
        let (d, e) = random_tridiag(40, 99);
        let vals = eigenvalues(&d, &e);
        let vecs: Vec<Vec<f64>> = vals.iter().map(|&v| eigenvector_for(&d, &e, v).unwrap().vector).collect();
        for i in 0..vecs.len() {
            for j in 0..i {
                let dot: f64 = vecs[i].iter().zip(&vecs[j]).map(|(a, b)| a * b).sum();
                assert!(dot.abs() < 1e-8, "({i},{j}) dot={dot:e}");
            }
        }
    }

    #[test]
    fn rejects_reducible_and_empty() {
        assert_eq!(ground_pair(&[], &[]).unwrap_err(), Error::EmptyBlock);
        assert!(matches!(
            ground_pair(&[1.0, 2.0, 3.0], &[1.0, 0.0]).unwrap_err(),
            Error::ReducibleBlock { index: 1, .. }
        ));
    }

    #[test]
    fn negative_offdiagonals_are_handled() {
        let d = [0.3, -1.2, 0.8, 2.0];
        let e = [-0.5, 0.9, -1.1];
        let pair = ground_pair(&d, &e).unwrap();
        let emin =
            SymmetricEigen::new(dense(&d, &e)).eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!((pair.value - emin).abs() < 1e-12);
    }

    #[test]
    fn bit_reproducible() {
        let (d, e) = random_tridiag(64, 5);
        assert_eq!(eigenvalues(&d, &e), eigenvalues(&d, &e));
        assert_eq!(ground_pair(&d, &e).unwrap(), ground_pair(&d, &e).unwrap());
    }

    proptest! {
        #[test]
        fn leading_submatrix_interlaces(
            d in prop::collection::vec(-10.0f64..10.0, 3..25),
            seed in any::<u64>(),
        ) {
            let n = d.len();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let e: Vec<f64> = (0..n - 1).map(|_| rng.random_range(0.05..4.0)).collect();
            let full = eigenvalues(&d, &e);
            let sub = eigenvalues(&d[..n - 1], &e[..n - 2]);
            let slack = 1e-9;
            for k in 0..n - 1 {
                prop_assert!(full[k] <= sub[k] + slack);
                prop_assert!(sub[k] <= full[k + 1] + slack);
            }
        }
    }
}
