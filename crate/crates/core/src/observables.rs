//! Physical quantities derived from manifold ground states.
//!
//! Every basis state of a manifold carries a distinct photon number and a
//! distinct `M`, so the coefficient vector is already a Schmidt decomposition:
//! both reduced density matrices are diagonal with entries `c_k²`, and the
//! photon and matter distributions are the same weights on different labels.

use std::collections::{BTreeMap, HashMap};

use crate::eigen::ground_eigenpair;
use crate::error::{Error, Result};
use crate::model::{hamiltonian_block, manifold_dim, BasisState, ModelParams};

/// Tolerance on `Σ c_k² = 1` for externally supplied coefficients.
pub const NORM_TOL: f64 = 1e-10;
/// Relative width of the Poissonian band in [`classify_statistics`].
pub const POISSON_REL_TOL: f64 = 1e-9;
/// Default absolute jump in `λ₂ − λ₁` above which a crossing may be abrupt.
pub const DEFAULT_JUMP_THRESHOLD: f64 = 0.5;
/// Default factor by which an abrupt step must exceed the gentler of its
/// neighbouring steps.
pub const DEFAULT_STEP_RATIO: f64 = 10.0;

/// Lowest eigenstate of one manifold.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundState {
    pub nu: u64,
    pub params: ModelParams,
    pub energy: f64,
    coeffs: Vec<f64>,
}

impl GroundState {
    /// Diagonalize manifold `nu` and keep its ground state.
    pub fn solve(params: &ModelParams, nu: u64) -> Result<Self> {
        let pair = ground_eigenpair(&hamiltonian_block(params, nu))?;
        Ok(Self { nu, params: *params, energy: pair.value, coeffs: pair.vector })
    }

    /// Wrap an arbitrary normalized vector over the basis of manifold `nu`.
    /// The energy is its Hamiltonian expectation value.
    pub fn from_coefficients(params: &ModelParams, nu: u64, coeffs: Vec<f64>) -> Result<Self> {
        let dim = manifold_dim(params, nu);
        if coeffs.len() != dim {
            return Err(Error::InvalidState(format!(
                "expected {dim} coefficients for manifold {nu}, got {}",
                coeffs.len()
            )));
        }
        let norm: f64 = coeffs.iter().map(|c| c * c).sum();
        if !((norm - 1.0).abs() <= NORM_TOL) {
            return Err(Error::InvalidState(format!("norm² = {norm}")));
        }
        let energy = hamiltonian_block(params, nu).expectation(&coeffs);
        Ok(Self { nu, params: *params, energy, coeffs })
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    /// Basis label of coefficient `k`.
    pub fn label(&self, k: usize) -> BasisState {
        BasisState { two_m: 2 * k as i64 - self.params.two_j() as i64, photons: self.nu - k as u64 }
    }

    fn weights(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.coeffs.iter().enumerate().map(|(k, c)| (k, c * c))
    }
}

/// Mean, variance and standardized third and fourth central moments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub mean: f64,
    pub variance: f64,
    /// Undefined for a single-point distribution.
    pub skewness: Option<f64>,
    pub kurtosis: Option<f64>,
}

impl Moments {
    /// Moments of the discrete distribution `{(x, p)}`.
    pub fn from_weights(points: &[(f64, f64)]) -> Self {
        let mean: f64 = points.iter().map(|(x, p)| p * x).sum();
        let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
        for &(x, p) in points {
            let d = x - mean;
            let d2 = d * d;
            m2 += p * d2;
            m3 += p * d2 * d;
            m4 += p * d2 * d2;
        }
        let degenerate = m2 <= f64::EPSILON * f64::EPSILON * mean.abs().max(1.0).powi(2);
        Self {
            mean,
            variance: m2,
            skewness: (!degenerate).then(|| m3 / m2.powf(1.5)),
            kurtosis: (!degenerate).then(|| m4 / (m2 * m2)),
        }
    }

    pub fn as_array(&self) -> [Option<f64>; 4] {
        [Some(self.mean), Some(self.variance), self.skewness, self.kurtosis]
    }
}

/// Matter moments over the excited-emitter count `M + J`, plus the raw mean `⟨J_z⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatterMoments {
    pub moments: Moments,
    pub raw_mean: f64,
}

impl MatterMoments {
    pub fn abs_mean(&self) -> f64 {
        self.raw_mean.abs()
    }
}

/// `ρ_ex = (ν − J) / N`.
pub fn excitation_density(params: &ModelParams, nu: u64) -> f64 {
    (nu as f64 - params.j()) / f64::from(params.n_emitters())
}

/// `μ_ν = E⁰_{ν+1} − E⁰_ν`.
pub fn chemical_potential(ground_energies: &BTreeMap<u64, f64>, nu: u64) -> Result<f64> {
    let here = ground_energies.get(&nu).ok_or(Error::MissingNeighbor(nu))?;
    let next = ground_energies.get(&(nu + 1)).ok_or(Error::MissingNeighbor(nu + 1))?;
    Ok(next - here)
}

/// `⟨J_z⟩ = Σ c_k² M_k`.
pub fn population_inversion(state: &GroundState) -> f64 {
    state.weights().map(|(k, p)| p * state.label(k).m()).sum()
}

pub fn photon_moments(state: &GroundState) -> Moments {
    let points: Vec<(f64, f64)> = state.weights().map(|(k, p)| (state.label(k).photons as f64, p)).collect();
    Moments::from_weights(&points)
}

pub fn matter_moments(state: &GroundState) -> MatterMoments {
    let two_j = state.params.two_j();
    let points: Vec<(f64, f64)> =
        state.weights().map(|(k, p)| (state.label(k).matter_excitations(two_j) as f64, p)).collect();
    MatterMoments { moments: Moments::from_weights(&points), raw_mean: population_inversion(state) }
}

/// `g²(0) = ⟨a†a†aa⟩ / ⟨a†a⟩²`; `None` for an empty cavity.
pub fn g2_zero(state: &GroundState) -> Option<f64> {
    let (mut n1, mut n2) = (0.0, 0.0);
    for (k, p) in state.weights() {
        let n = state.label(k).photons as f64;
        n1 += p * n;
        n2 += p * n * (n - 1.0);
    }
    (n1 > 0.0).then(|| n2 / (n1 * n1))
}

/// Dimension-normalized linear entropy `D/(D−1) (1 − Tr ρ_A²)`, zero for `D = 1`.
pub fn linear_entropy(state: &GroundState) -> f64 {
    let d = state.dim();
    if d == 1 {
        return 0.0;
    }
    let purity: f64 = state.weights().map(|(_, p)| p * p).sum();
    let s = d as f64 / (d as f64 - 1.0) * (1.0 - purity);
    s.clamp(0.0, 1.0)
}

/// Reduced density matrix keyed by (row label, column label) of the kept subsystem.
pub type ReducedMatrix = BTreeMap<(i64, i64), f64>;

/// Partial trace of `|ψ⟩⟨ψ|` over the subsystem whose label `traced` extracts,
/// keeping the label `kept`.
fn partial_trace(
    state: &GroundState,
    traced: impl Fn(&BasisState) -> i64,
    kept: impl Fn(&BasisState) -> i64,
) -> ReducedMatrix {
    let mut groups: HashMap<i64, Vec<(i64, f64)>> = HashMap::new();
    for (k, &c) in state.coeffs.iter().enumerate() {
        let s = state.label(k);
        groups.entry(traced(&s)).or_default().push((kept(&s), c));
    }
    let mut rho = ReducedMatrix::new();
    for members in groups.values() {
        for &(r, cr) in members {
            for &(c, cc) in members {
                *rho.entry((r, c)).or_insert(0.0) += cr * cc;
            }
        }
    }
    rho
}

/// Matter state `ρ_A = Tr_C |ψ⟩⟨ψ|`, keyed by `2M`.
pub fn reduced_matter(state: &GroundState) -> ReducedMatrix {
    partial_trace(state, |s| s.photons as i64, |s| s.two_m)
}

/// Light state `ρ_C = Tr_A |ψ⟩⟨ψ|`, keyed by photon number.
pub fn reduced_light(state: &GroundState) -> ReducedMatrix {
    partial_trace(state, |s| s.two_m, |s| s.photons as i64)
}

fn purity(rho: &ReducedMatrix) -> f64 {
    rho.values().map(|x| x * x).sum()
}

/// `(Tr ρ_A², Tr ρ_C²)`.
pub fn purity_pair(state: &GroundState) -> (f64, f64) {
    (purity(&reduced_matter(state)), purity(&reduced_light(state)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityEntry {
    pub row: BasisState,
    pub col: BasisState,
    pub value: f64,
}

/// All `D²` entries `c_j c_k` of the pure-state density matrix, row-major.
pub fn density_matrix_elements(state: &GroundState) -> Vec<DensityEntry> {
    let d = state.dim();
    let mut out = Vec::with_capacity(d * d);
    for (j, &cj) in state.coeffs.iter().enumerate() {
        for (k, &ck) in state.coeffs.iter().enumerate() {
            out.push(DensityEntry { row: state.label(j), col: state.label(k), value: cj * ck });
        }
    }
    out
}

/// Sum of absolute off-diagonal density-matrix elements.
pub fn coherence_l1(state: &GroundState) -> f64 {
    let l1: f64 = state.coeffs.iter().map(|c| c.abs()).sum();
    l1 * l1 - 1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Statistics {
    SubPoissonian,
    Poissonian,
    SuperPoissonian,
}

impl Statistics {
    pub fn as_str(&self) -> &'static str {
        match self {
            Statistics::SubPoissonian => "sub",
            Statistics::Poissonian => "poissonian",
            Statistics::SuperPoissonian => "super",
        }
    }
}

/// Compare variance against mean.
pub fn classify_statistics(mean: f64, variance: f64) -> Statistics {
    let band = POISSON_REL_TOL * mean.abs().max(variance.abs());
    if (variance - mean).abs() <= band {
        Statistics::Poissonian
    } else if variance < mean {
        Statistics::SubPoissonian
    } else {
        Statistics::SuperPoissonian
    }
}

/// Skewness `1/√λ₁` and kurtosis `3 + 1/λ₁` of a Poisson law with the same mean.
pub fn poisson_reference(mean: f64) -> Option<(f64, f64)> {
    (mean > 0.0).then(|| (1.0 / mean.sqrt(), 3.0 + 1.0 / mean))
}

/// Population inversion rescaled by the universal density factor,
/// `(⟨J_z⟩/N + 1/2) / (ρ_ex + 1/2)`. `None` at `ρ_ex = −1/2`.
pub fn scaled_inversion(jz_mean: f64, params: &ModelParams, nu: u64) -> Option<f64> {
    let denom = excitation_density(params, nu) + 0.5;
    let n = f64::from(params.n_emitters());
    (denom > 0.0).then(|| (jz_mean / n + 0.5) / denom)
}

/// One row of an exact sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableRecord {
    pub nu: u64,
    pub rho_ex: f64,
    pub energy: f64,
    pub mu: Option<f64>,
    pub jz_mean: f64,
    pub jz_scaled: Option<f64>,
    pub light: Moments,
    pub matter: MatterMoments,
    pub g2: Option<f64>,
    pub lin_entropy: f64,
    pub poisson_ref: Option<(f64, f64)>,
}

impl ObservableRecord {
    pub fn from_state(state: &GroundState, mu: Option<f64>) -> Self {
        let light = photon_moments(state);
        let matter = matter_moments(state);
        Self {
            nu: state.nu,
            rho_ex: excitation_density(&state.params, state.nu),
            energy: state.energy,
            mu,
            jz_mean: matter.raw_mean,
            jz_scaled: scaled_inversion(matter.raw_mean, &state.params, state.nu),
            light,
            matter,
            g2: g2_zero(state),
            lin_entropy: linear_entropy(state),
            poisson_ref: poisson_reference(light.mean),
        }
    }

    /// Variance minus the mean it is compared against. For matter the
    /// comparison mean is `|⟨J_z⟩|`.
    pub fn poisson_gap(&self, subsystem: Subsystem) -> f64 {
        match subsystem {
            Subsystem::Light => self.light.variance - self.light.mean,
            Subsystem::Matter => self.matter.moments.variance - self.matter.abs_mean(),
        }
    }

    pub fn statistics(&self, subsystem: Subsystem) -> Statistics {
        match subsystem {
            Subsystem::Light => classify_statistics(self.light.mean, self.light.variance),
            Subsystem::Matter => classify_statistics(self.matter.abs_mean(), self.matter.moments.variance),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    Light,
    Matter,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrossingKind {
    Smooth,
    Discontinuous,
}

/// A sign change of the Poisson gap between two adjacent sweep points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossing {
    /// Interpolated zero for smooth crossings; the upper point for jumps.
    pub rho_ex: f64,
    pub lower: f64,
    pub upper: f64,
    pub kind: CrossingKind,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossingOptions {
    /// Smallest absolute change of the gap between neighbours that can be a jump.
    pub jump_threshold: f64,
    /// The step must also be this many times the smaller adjacent step, so a
    /// steep but steady gap still counts as a smooth crossing.
    pub step_ratio: f64,
}

impl Default for CrossingOptions {
    fn default() -> Self {
        Self { jump_threshold: DEFAULT_JUMP_THRESHOLD, step_ratio: DEFAULT_STEP_RATIO }
    }
}

impl CrossingOptions {
    fn is_jump(&self, points: &[(f64, f64)], i: usize) -> bool {
        let step = |k: usize| (points[k + 1].1 - points[k].1).abs();
        let here = step(i);
        let before = i.checked_sub(1).map(step);
        let after = (i + 2 < points.len()).then(|| step(i + 1));
        let gentlest = match (before, after) {
            (Some(a), Some(b)) => a.min(b),
            (Some(a), None) | (None, Some(a)) => a,
            (None, None) => 0.0,
        };
        here >= self.jump_threshold && here >= self.step_ratio * gentlest
    }
}

pub fn find_statistics_crossing(
    sweep: &[ObservableRecord],
    subsystem: Subsystem,
    options: CrossingOptions,
) -> Result<Vec<Crossing>> {
    let points: Vec<(f64, f64)> = sweep.iter().map(|r| (r.rho_ex, r.poisson_gap(subsystem))).collect();
    find_crossings(&points, options)
}

/// Sign changes of `y` along sorted `(x, y)` samples.
pub fn find_crossings(points: &[(f64, f64)], options: CrossingOptions) -> Result<Vec<Crossing>> {
    if points.is_empty() {
        return Err(Error::EmptySweep);
    }
    if let Some(i) = points.windows(2).position(|w| !(w[0].0 < w[1].0)) {
        return Err(Error::UnsortedSweep(i + 1));
    }
    let mut out = Vec::new();
    let mut i = 0;
    while i + 1 < points.len() {
        let (x0, y0) = points[i];
        let (x1, y1) = points[i + 1];
        if y0 * y1 < 0.0 {
            out.push(if options.is_jump(points, i) {
                Crossing { rho_ex: x1, lower: x0, upper: x1, kind: CrossingKind::Discontinuous }
            } else {
                let x = x0 - y0 * (x1 - x0) / (y1 - y0);
                Crossing { rho_ex: x, lower: x0, upper: x1, kind: CrossingKind::Smooth }
            });
        } else if y1 == 0.0 && y0 != 0.0 {
            // run of exact zeros: it is a crossing if the next nonzero flips sign
            let mut j = i + 1;
            while j < points.len() && points[j].1 == 0.0 {
                j += 1;
            }
            if j < points.len() && points[j].1 * y0 < 0.0 {
                out.push(Crossing { rho_ex: x1, lower: x0, upper: points[j].0, kind: CrossingKind::Smooth });
            }
            i = j.saturating_sub(1).max(i + 1);
            continue;
        }
        i += 1;
    }
    Ok(out)
}

/// Highest smooth crossing strictly below `rho_ex`.
pub fn last_smooth_crossing_below(crossings: &[Crossing], rho_ex: f64) -> Option<f64> {
    crossings
        .iter()
        .filter(|c| c.kind == CrossingKind::Smooth && c.rho_ex < rho_ex)
        .map(|c| c.rho_ex)
        .fold(None, |m, x| Some(m.map_or(x, |m: f64| m.max(x))))
}

/// Truncated Poisson amplitudes `sqrt(e^{-λ} λⁿ/n!)` for `n = 0..=n_max`,
/// with `n_max = ceil(λ + n_sigma √λ)`, renormalized and listed by
/// decreasing `n` to match manifold ordering.
pub fn poissonian_coefficients(mean: f64, n_sigma: f64) -> Vec<f64> {
    let n_max = (mean + n_sigma * mean.sqrt()).ceil() as usize;
    let mut log_p = Vec::with_capacity(n_max + 1);
    let mut acc = -mean;
    for n in 0..=n_max {
        if n > 0 {
            acc += mean.ln() - (n as f64).ln();
        }
        log_p.push(acc);
    }
    let mut amps: Vec<f64> = log_p.iter().rev().map(|lp| (0.5 * lp).exp()).collect();
    let norm = amps.iter().map(|a| a * a).sum::<f64>().sqrt();
    amps.iter_mut().for_each(|a| *a /= norm);
    amps
}
