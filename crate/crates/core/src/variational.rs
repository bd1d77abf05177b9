//! Separable coherent-state mean field: an atomic (Bloch) coherent state for
//! the emitters times a field coherent state `|α⟩`, with `α` real.
//!
//! The grand potential at fixed chemical potential is
//!
//! ```text
//! M(α, θ, φ) = (ω_c − μ) α² − (ω_a − μ) J cos θ − μ J
//!              + [g √(2J) (1 + η) α + ε √(8J³)] sin θ cos φ
//! ```
//!
//! The solver stays on the `φ = 0` branch, so the optimal field amplitude is
//! `α = −g √(2J)(1+η) sin θ / (2(ω_c − μ))` and comes out non-positive. For
//! each `μ` it minimizes `M` globally over `(α, θ)`, then bisects `μ` until the
//! excitation density `α²/N − cos θ / 2` hits the target.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::ModelParams;

/// Admissible `|ρ_ex(α, θ) − target|`.
pub const CONSTRAINT_TOL: f64 = 1e-8;
/// Admissible norm of the per-emitter gradient at a solution.
pub const STATIONARITY_TOL: f64 = 1e-6;

const BRACKET_EXPANSIONS: usize = 4;
const MAX_BISECTION_STEPS: usize = 400;
const THETA_SCAN_POINTS: usize = 2049;

/// Atomic coherent state `|θ, φ⟩` over the Dicke states `|M⟩`, `M = −J..J`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlochState {
    pub theta: f64,
    pub phi: f64,
    pub two_j: u64,
    /// Amplitude of `|M⟩` at index `J + M`.
    pub amplitudes: Vec<Complex64>,
}

impl BlochState {
    pub fn j(&self) -> f64 {
        self.two_j as f64 / 2.0
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn jz_mean(&self) -> f64 {
        let j = self.j();
        self.amplitudes.iter().enumerate().map(|(k, a)| a.norm_sqr() * (k as f64 - j)).sum()
    }

    /// `⟨J_+⟩`.
    pub fn j_plus_mean(&self) -> Complex64 {
        let j = self.j();
        (0..self.amplitudes.len().saturating_sub(1))
            .map(|k| {
                let m = k as f64 - j;
                let ladder = (j * (j + 1.0) - m * (m + 1.0)).sqrt();
                self.amplitudes[k + 1].conj() * self.amplitudes[k] * ladder
            })
            .sum()
    }

    /// `⟨θ, φ | ψ⟩` for `ψ` given over the same Dicke states.
    pub fn overlap(&self, psi: &[Complex64]) -> Complex64 {
        self.amplitudes.iter().zip(psi).map(|(a, b)| a.conj() * b).sum()
    }
}

fn ln_binomial(n: u64, k: u64) -> f64 {
    let k = k.min(n - k);
    (0..k).map(|i| ((n - i) as f64).ln() - ((i + 1) as f64).ln()).sum()
}

/// Amplitudes `sqrt(C(2J, J+M)) sin^{J+M}(θ/2) cos^{J−M}(θ/2) e^{i(J+M)φ}`.
pub fn bloch_state(two_j: u64, theta: f64, phi: f64) -> Result<BlochState> {
    if !(0.0..=std::f64::consts::PI).contains(&theta) {
        return Err(Error::ThetaDomain(theta));
    }
    let (s, c) = (0.5 * theta).sin_cos();
    let amplitudes = (0..=two_j)
        .map(|k| {
            let modulus = if s == 0.0 {
                if k == 0 {
                    1.0
                } else {
                    0.0
                }
            } else if c <= 0.0 {
                if k == two_j {
                    1.0
                } else {
                    0.0
                }
            } else {
                (0.5 * ln_binomial(two_j, k) + k as f64 * s.ln() + (two_j - k) as f64 * c.ln()).exp()
            };
            Complex64::from_polar(modulus, k as f64 * phi)
        })
        .collect();
    Ok(BlochState { theta, phi, two_j, amplitudes })
}

/// Mean-field energy functional with its optional couplings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanField {
    pub params: ModelParams,
    pub eta: f64,
    pub epsilon: f64,
}

impl MeanField {
    pub fn new(params: ModelParams, eta: f64, epsilon: f64) -> Self {
        Self { params, eta, epsilon }
    }

    fn field_coupling(&self) -> f64 {
        self.params.g() * (2.0 * self.params.j()).sqrt() * (1.0 + self.eta)
    }

    fn drive(&self) -> f64 {
        self.epsilon * (8.0 * self.params.j().powi(3)).sqrt()
    }

    pub fn mbar(&self, alpha: f64, theta: f64, phi: f64, mu: f64) -> f64 {
        let p = &self.params;
        let j = p.j();
        (p.omega_c() - mu) * alpha * alpha - (p.omega_a() - mu) * j * theta.cos() - mu * j
            + (self.field_coupling() * alpha + self.drive()) * theta.sin() * phi.cos()
    }

    /// `(∂M/∂α, ∂M/∂θ, ∂M/∂φ)`.
    pub fn gradient(&self, alpha: f64, theta: f64, phi: f64, mu: f64) -> [f64; 3] {
        let p = &self.params;
        let j = p.j();
        let coupling = self.field_coupling() * alpha + self.drive();
        [
            2.0 * (p.omega_c() - mu) * alpha + self.field_coupling() * theta.sin() * phi.cos(),
            (p.omega_a() - mu) * j * theta.sin() + coupling * theta.cos() * phi.cos(),
            -coupling * theta.sin() * phi.sin(),
        ]
    }

    /// `M / N` as a function of the per-emitter amplitude `a = α / √N`.
    pub fn reduced_mbar(&self, a: f64, theta: f64, phi: f64, mu: f64) -> f64 {
        let n = f64::from(self.params.n_emitters());
        self.mbar(a * n.sqrt(), theta, phi, mu) / n
    }

    /// `(∂(M/N)/∂a, ∂(M/N)/∂θ)` at `φ = 0`.
    pub fn reduced_gradient(&self, alpha: f64, theta: f64, mu: f64) -> [f64; 2] {
        let n = f64::from(self.params.n_emitters());
        let [ga, gt, _] = self.gradient(alpha, theta, 0.0, mu);
        [ga / n.sqrt(), gt / n]
    }

    /// Magnitudes of the terms summed in each reduced gradient component,
    /// the natural scale for relative comparisons.
    pub fn reduced_gradient_scale(&self, alpha: f64, theta: f64, mu: f64) -> [f64; 2] {
        let p = &self.params;
        let n = f64::from(p.n_emitters());
        let j = p.j();
        let coupling = self.field_coupling() * alpha + self.drive();
        [
            (2.0 * (p.omega_c() - mu) * alpha).abs() / n.sqrt()
                + (self.field_coupling() * theta.sin()).abs() / n.sqrt(),
            ((p.omega_a() - mu) * j * theta.sin()).abs() / n + (coupling * theta.cos()).abs() / n,
        ]
    }

    pub fn density(&self, alpha: f64, theta: f64) -> f64 {
        constraint_density(alpha, theta, &self.params)
    }

    /// Global minimum of `M` over `(α, θ)` at `φ = 0` for fixed `μ`; `None`
    /// when `μ ≥ ω_c` leaves `M` unbounded below in `α`.
    pub fn minimize_at(&self, mu: f64) -> Option<InnerMinimum> {
        let p = &self.params;
        let x = p.omega_c() - mu;
        if !(x > 0.0) {
            return None;
        }
        let j = p.j();
        let gc = self.field_coupling();
        let e = self.drive();
        let alpha_of = |theta: f64| -gc * theta.sin() / (2.0 * x);
        let profile = |theta: f64| self.mbar(alpha_of(theta), theta, 0.0, mu);

        let mut interior = Vec::new();
        if e == 0.0 && gc != 0.0 {
            let c = 2.0 * x * (p.omega_a() - mu) * j / (gc * gc);
            if c.abs() < 1.0 {
                interior.push(c.acos());
            }
        } else {
            interior.extend(scan_local_minima(&profile, |t| {
                let (s, c) = t.sin_cos();
                let dh = -gc * gc * s * c / (2.0 * x) + (p.omega_a() - mu) * j * s + e * c;
                let d2h = -gc * gc * (2.0 * t).cos() / (2.0 * x) + (p.omega_a() - mu) * j * c - e * s;
                (dh, d2h)
            }));
        }

        let trivial = [0.0, std::f64::consts::PI].map(|theta| Branch {
            alpha: 0.0,
            theta,
            mbar: self.mbar(0.0, theta, 0.0, mu),
        });
        let best_trivial = if trivial[1].mbar < trivial[0].mbar { trivial[1] } else { trivial[0] };
        let best_interior = interior
            .into_iter()
            .map(|theta| {
                let alpha = alpha_of(theta);
                Branch { alpha, theta, mbar: self.mbar(alpha, theta, 0.0, mu) }
            })
            .min_by(|a, b| a.mbar.total_cmp(&b.mbar));

        let tie = 1e-12 * best_trivial.mbar.abs().max(1.0);
        Some(match best_interior {
            Some(b) if b.mbar < best_trivial.mbar - tie => InnerMinimum { best: b, competing: None },
            Some(b) if b.mbar <= best_trivial.mbar + tie && b.alpha != 0.0 => {
                InnerMinimum { best: best_trivial, competing: Some(b) }
            }
            _ => InnerMinimum { best: best_trivial, competing: None },
        })
    }

    fn density_at(&self, mu: f64) -> f64 {
        self.minimize_at(mu).map_or(f64::INFINITY, |m| self.density(m.best.alpha, m.best.theta))
    }

    /// Solve for the chemical potential whose minimizer has density `target`.
    pub fn solve(&self, target: f64) -> Result<VariationalSolution> {
        if !(target >= -0.5) || !target.is_finite() {
            return Err(Error::TargetDomain(target));
        }
        let p = &self.params;
        let width = 5.0 * p.g();
        let mut lo = p.omega_a().min(p.omega_c()) - width;
        let mut hi = p.omega_a().max(p.omega_c()) + width;
        let mut step = width;
        for _ in 0..BRACKET_EXPANSIONS {
            if self.density_at(lo) <= target {
                break;
            }
            step *= 2.0;
            lo -= step;
        }
        step = width;
        for _ in 0..BRACKET_EXPANSIONS {
            if self.density_at(hi) >= target {
                break;
            }
            step *= 2.0;
            hi += step;
        }
        if self.density_at(lo) > target || self.density_at(hi) < target {
            return Err(Error::NoBracket(target));
        }

        for _ in 0..MAX_BISECTION_STEPS {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.density_at(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }

        let (mu, inner) = [hi, lo]
            .into_iter()
            .filter_map(|mu| self.minimize_at(mu).map(|m| (mu, m)))
            .min_by(|(_, a), (_, b)| {
                let ra = (self.density(a.best.alpha, a.best.theta) - target).abs();
                let rb = (self.density(b.best.alpha, b.best.theta) - target).abs();
                ra.total_cmp(&rb)
            })
            .ok_or(Error::NoBracket(target))?;
        let Branch { alpha, theta, mbar } = inner.best;
        let residual = (self.density(alpha, theta) - target).abs();
        if !(residual <= CONSTRAINT_TOL) {
            return Err(Error::ConstraintUnsatisfied { target, residual });
        }
        Ok(VariationalSolution {
            alpha,
            theta,
            phi: 0.0,
            mu,
            rho_ex: target,
            mbar_value: mbar,
            eta: self.eta,
            epsilon: self.epsilon,
            params: self.params,
            constraint_residual: residual,
            competing: inner.competing,
        })
    }
}

/// Local minima of a smooth function on `[0, π]`, found on a uniform grid and
/// polished with Newton steps on its derivative.
fn scan_local_minima(f: &impl Fn(f64) -> f64, deriv: impl Fn(f64) -> (f64, f64)) -> Vec<f64> {
    let pi = std::f64::consts::PI;
    let h = pi / (THETA_SCAN_POINTS - 1) as f64;
    let vals: Vec<f64> = (0..THETA_SCAN_POINTS).map(|i| f(i as f64 * h)).collect();
    let mut out = Vec::new();
    for i in 1..THETA_SCAN_POINTS - 1 {
        if vals[i] <= vals[i - 1] && vals[i] <= vals[i + 1] {
            let (mut a, mut b) = ((i - 1) as f64 * h, (i + 1) as f64 * h);
            // golden section, then Newton polish
            let r = 0.5 * (5f64.sqrt() - 1.0);
            for _ in 0..80 {
                let c = b - r * (b - a);
                let d = a + r * (b - a);
                if f(c) < f(d) {
                    b = d;
                } else {
                    a = c;
                }
            }
            let mut t = 0.5 * (a + b);
            for _ in 0..20 {
                let (d1, d2) = deriv(t);
                if !(d2 > 0.0) {
                    break;
                }
                let next = t - d1 / d2;
                if !(next > 0.0 && next < pi) || (next - t).abs() < 1e-16 {
                    break;
                }
                t = next;
            }
            out.push(t);
        }
    }
    out
}

/// A stationary point of `M` at fixed `μ` and `φ = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Branch {
    pub alpha: f64,
    pub theta: f64,
    pub mbar: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InnerMinimum {
    pub best: Branch,
    /// Nonzero-field branch tied with the selected `α = 0` branch.
    pub competing: Option<Branch>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VariationalSolution {
    /// Signed field amplitude; non-positive on the `φ = 0` branch.
    pub alpha: f64,
    pub theta: f64,
    pub phi: f64,
    pub mu: f64,
    pub rho_ex: f64,
    pub mbar_value: f64,
    pub eta: f64,
    pub epsilon: f64,
    pub params: ModelParams,
    pub constraint_residual: f64,
    pub competing: Option<Branch>,
}

impl VariationalSolution {
    /// `|α|`.
    pub fn amplitude(&self) -> f64 {
        self.alpha.abs()
    }

    /// `⟨J_z⟩ / N = −cos θ / 2`.
    pub fn jz_per_emitter(&self) -> f64 {
        -0.5 * self.theta.cos()
    }

    pub fn functional(&self) -> MeanField {
        MeanField::new(self.params, self.eta, self.epsilon)
    }

    /// Norm of the per-emitter gradient in `(α/√N, θ)`.
    pub fn stationarity(&self) -> f64 {
        let [a, t] = self.functional().reduced_gradient(self.alpha, self.theta, self.mu);
        a.hypot(t)
    }
}

/// `M(α, θ, φ)` at chemical potential `mu`.
pub fn mbar(alpha: f64, theta: f64, phi: f64, mu: f64, params: &ModelParams, eta: f64, epsilon: f64) -> f64 {
    MeanField::new(*params, eta, epsilon).mbar(alpha, theta, phi, mu)
}

/// Excitation density `α²/N − cos θ / 2` on the same axis as `(ν − J)/N`.
pub fn constraint_density(alpha: f64, theta: f64, params: &ModelParams) -> f64 {
    alpha * alpha / f64::from(params.n_emitters()) - 0.5 * theta.cos()
}

pub fn solve_variational(
    params: &ModelParams,
    target_rho_ex: f64,
    eta: f64,
    epsilon: f64,
) -> Result<VariationalSolution> {
    MeanField::new(*params, eta, epsilon).solve(target_rho_ex)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn bloch_poles() {
        let s = bloch_state(6, 0.0, 0.3).unwrap();
        assert_eq!(s.amplitudes[0], Complex64::new(1.0, 0.0));
        assert!(s.amplitudes[1..].iter().all(|a| a.norm() == 0.0));
        let s = bloch_state(6, PI, 0.0).unwrap();
        assert!(close(s.amplitudes[6].norm(), 1.0, 1e-15));
        assert!(s.amplitudes[..6].iter().all(|a| a.norm() < 1e-15));
        assert!(close(s.jz_mean(), 3.0, 1e-12));
    }

    #[test]
    fn bloch_single_qubit_equator() {
        let s = bloch_state(1, PI / 2.0, 0.0).unwrap();
        assert!(close(s.amplitudes[0].re, FRAC_1_SQRT_2, 1e-15));
        assert!(close(s.amplitudes[1].re, FRAC_1_SQRT_2, 1e-15));
        assert!(close(s.jz_mean(), 0.0, 1e-15));
    }

    #[test]
    fn bloch_rejects_theta_outside_domain() {
        assert_eq!(bloch_state(2, -0.1, 0.0).unwrap_err(), Error::ThetaDomain(-0.1));
        assert!(bloch_state(2, 3.2, 0.0).is_err());
    }

    #[test]
    fn bloch_normalized_and_rotation_consistent() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for two_j in [1u64, 2, 7, 40, 2000] {
            for _ in 0..5 {
                let theta = rng.random_range(0.0..PI);
                let phi = rng.random_range(0.0..2.0 * PI);
                let s = bloch_state(two_j, theta, phi).unwrap();
                let j = two_j as f64 / 2.0;
                assert!(close(s.norm_sqr(), 1.0, 1e-12));
                assert!(close(s.jz_mean(), -j * theta.cos(), 1e-10 * j.max(1.0)));
                let jp = s.j_plus_mean();
                assert!(close(jp.norm(), j * theta.sin(), 1e-10 * j.max(1.0)));
            }
        }
    }

    #[test]
    fn bloch_coupling_matches_functional() {
        // ⟨(g/√N)(a†J₋ + aJ₊)⟩ for real α equals g√(2J) α sinθ cosφ
        let p = ModelParams::with_detuning(5, 3.0).unwrap();
        let (alpha, theta, phi) = (-0.8, 1.1, 0.4);
        let s = bloch_state(p.two_j(), theta, phi).unwrap();
        let jp = s.j_plus_mean();
        let coupling = p.coupling_scale() * alpha * (jp + jp.conj()).re;
        let mf = MeanField::new(p, 0.0, 0.0);
        let mu = 0.2;
        let without = mf.mbar(alpha, theta, PI / 2.0, mu);
        assert!(close(mf.mbar(alpha, theta, phi, mu) - without, coupling, 1e-12));
    }

    #[test]
    fn completeness_quadrature() {
        // (2J+1)/(4π) ∫ dΩ |⟨θ,φ|ψ⟩|² = ⟨ψ|ψ⟩
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for two_j in 1..=10u64 {
            let psi: Vec<Complex64> = (0..=two_j)
                .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            let norm: f64 = psi.iter().map(|a| a.norm_sqr()).sum();
            let (nt, np) = (400usize, 2 * two_j as usize + 3);
            let ht = PI / nt as f64;
            let mut integral = 0.0;
            for i in 0..=nt {
                let theta = (i as f64 * ht).min(PI);
                let w = if i == 0 || i == nt {
                    1.0
                } else if i % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                let ring: f64 = (0..np)
                    .map(|k| {
                        let phi = 2.0 * PI * k as f64 / np as f64;
                        bloch_state(two_j, theta, phi).unwrap().overlap(&psi).norm_sqr()
                    })
                    .sum::<f64>()
                    * (2.0 * PI / np as f64);
                integral += w * ht / 3.0 * ring * theta.sin();
            }
            let lhs = (two_j as f64 + 1.0) / (4.0 * PI) * integral;
            assert!(close(lhs, norm, 1e-6 * norm), "2J={two_j}: {lhs} vs {norm}");
        }
    }

    #[test]
    fn mbar_empty_cavity_ground_matter() {
        let p = ModelParams::new(8, 1.0, 3.0, 1.0).unwrap();
        for mu in [-3.0, 0.0, 0.7] {
            assert!(close(mbar(0.0, 0.0, 0.0, mu, &p, 0.0, 0.0), -p.omega_a() * 4.0, 1e-12));
        }
    }

    #[test]
    fn mbar_phi_half_pi_removes_coupling() {
        let p = ModelParams::new(8, 1.0, 3.0, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let (a, t, mu) = (rng.random_range(-3.0..3.0), rng.random_range(0.0..PI), 0.3);
            let with = mbar(a, t, PI / 2.0, mu, &p, 0.4, 0.2);
            let none = mbar(0.0, t, 0.0, mu, &p, 0.0, 0.0) + (p.omega_c() - mu) * a * a;
            assert!(close(with, none, 1e-12));
        }
    }

    #[test]
    fn gradient_matches_central_differences() {
        let p = ModelParams::new(12, 1.0, 3.0, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let h = 1e-5;
        for _ in 0..20 {
            let mf = MeanField::new(p, rng.random_range(-0.5..0.5), rng.random_range(-0.2..0.2));
            let (a, t, f, mu) = (
                rng.random_range(-3.0..3.0),
                rng.random_range(0.1..3.0),
                rng.random_range(0.0..6.0),
                rng.random_range(-3.0..0.9),
            );
            let g = mf.gradient(a, t, f, mu);
            let fd = [
                (mf.mbar(a + h, t, f, mu) - mf.mbar(a - h, t, f, mu)) / (2.0 * h),
                (mf.mbar(a, t + h, f, mu) - mf.mbar(a, t - h, f, mu)) / (2.0 * h),
                (mf.mbar(a, t, f + h, mu) - mf.mbar(a, t, f - h, mu)) / (2.0 * h),
            ];
            for k in 0..3 {
                let scale = g[k].abs().max(fd[k].abs()).max(1.0);
                assert!((g[k] - fd[k]).abs() <= 1e-6 * scale, "{k}: {} vs {}", g[k], fd[k]);
            }
        }
    }

    #[test]
    fn density_examples() {
        let p = ModelParams::with_detuning(10, 3.0).unwrap();
        assert_eq!(constraint_density(0.0, 0.0, &p), -0.5);
        assert_eq!(constraint_density(0.0, PI, &p), 0.5);
        assert!(close(constraint_density(10f64.sqrt(), PI / 2.0, &p), 1.0, 1e-15));
    }

    #[test]
    fn empty_system_solution() {
        let p = ModelParams::with_detuning(10, 3.0).unwrap();
        let s = solve_variational(&p, -0.5, 0.0, 0.0).unwrap();
        assert_eq!((s.alpha, s.theta), (0.0, 0.0));
        assert!(close(s.mbar_value, -p.omega_a() * p.j(), 1e-12));
    }

    #[test]
    fn crossover_saturates_matter() {
        let p = ModelParams::with_detuning(1000, 3.0).unwrap();
        let s = solve_variational(&p, 0.5, 0.0, 0.0).unwrap();
        assert!(s.amplitude() < 1e-3 * 1000f64.sqrt());
        assert!(s.jz_per_emitter() > 0.499);
    }

    #[test]
    fn solutions_are_constrained_and_stationary() {
        let p = ModelParams::with_detuning(50, 3.0).unwrap();
        for (eta, eps, first) in [(0.0, 0.0, 0), (0.3, 0.0, 0), (0.0, -0.01, 1)] {
            for k in first..=30 {
                let target = -0.5 + k as f64 * 0.1;
                let s = solve_variational(&p, target, eta, eps).unwrap();
                assert!(s.constraint_residual <= CONSTRAINT_TOL);
                assert!(s.stationarity() <= STATIONARITY_TOL, "target {target}: {}", s.stationarity());
            }
        }
    }

    #[test]
    fn phi_zero_not_improved() {
        let p = ModelParams::with_detuning(40, 3.0).unwrap();
        for target in [-0.3, 0.0, 0.3, 0.8, 2.0] {
            let s = solve_variational(&p, target, 0.0, 0.0).unwrap();
            let mf = s.functional();
            let base = mf.mbar(s.alpha, s.theta, 0.0, s.mu);
            for dphi in [-0.1, 0.1] {
                assert!(mf.mbar(s.alpha, s.theta, dphi, s.mu) >= base);
            }
        }
    }

    #[test]
    fn stencil_does_not_lower_mbar() {
        let p = ModelParams::with_detuning(40, 3.0).unwrap();
        for target in [-0.45, -0.2, 0.1, 0.5, 0.9, 3.0] {
            let s = solve_variational(&p, target, 0.0, 0.0).unwrap();
            let mf = s.functional();
            let n = 40f64.sqrt();
            let a0 = s.alpha / n;
            let base = mf.reduced_mbar(a0, s.theta, 0.0, s.mu);
            for k in 0..10 {
                let ang = 2.0 * PI * k as f64 / 10.0;
                let a = a0 + 1e-3 * ang.cos();
                let t = (s.theta + 1e-3 * ang.sin()).clamp(0.0, PI);
                assert!(mf.reduced_mbar(a, t, 0.0, s.mu) >= base - 1e-14, "target {target} dir {k}");
            }
        }
    }

    #[test]
    fn rejects_target_below_empty() {
        let p = ModelParams::with_detuning(10, 3.0).unwrap();
        assert_eq!(solve_variational(&p, -0.6, 0.0, 0.0).unwrap_err(), Error::TargetDomain(-0.6));
    }

    #[test]
    fn density_monotone_in_mu() {
        let mf = MeanField::new(ModelParams::with_detuning(20, 3.0).unwrap(), 0.0, 0.0);
        let mut last = f64::NEG_INFINITY;
        for k in 0..400 {
            let mu = -8.0 + k as f64 * 0.0224;
            let r = mf.density_at(mu);
            assert!(r >= last - 1e-12, "mu={mu}");
            last = r;
        }
    }
}
