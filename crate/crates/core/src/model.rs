//! Tavis-Cummings Hamiltonian restricted to conserved-excitation manifolds.
//!
//! The total excitation number `a†a + J_z + J` commutes with the Hamiltonian,
//! so each eigenvalue `nu` labels an invariant block. Inside a block the states
//! `|M, n⟩` are ordered by decreasing photon number, starting at `|-J, nu⟩`,
//! and the Hamiltonian is a real symmetric tridiagonal matrix.
//!
//! [`dense_hamiltonian`] builds the full operator on a truncated product space
//! from ladder-operator matrices. It exists to check the block construction.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Largest product-space dimension [`dense_hamiltonian`] will allocate.
pub const DENSE_ORACLE_CAP: usize = 4096;

/// Physical constants of one emitter assembly coupled to one cavity mode.
///
/// Energies are in units of the coupling `g` unless the caller chooses
/// otherwise. The emitter frequency is stored; the detuning is derived as
/// `omega_c - omega_a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    n_emitters: u32,
    omega_c: f64,
    omega_a: f64,
    g: f64,
}

impl ModelParams {
    /// Parameters from cavity frequency and detuning, `omega_a = omega_c - detuning`.
    pub fn new(n_emitters: u32, omega_c: f64, detuning: f64, g: f64) -> Result<Self> {
        Self::from_frequencies(n_emitters, omega_c, omega_c - detuning, g)
    }

    pub fn from_frequencies(n_emitters: u32, omega_c: f64, omega_a: f64, g: f64) -> Result<Self> {
        if n_emitters == 0 {
            return Err(Error::InvalidParams("n_emitters must be at least 1".into()));
        }
        if !(g > 0.0) || !g.is_finite() {
            return Err(Error::InvalidParams(format!("coupling g must be positive, got {g}")));
        }
        if !omega_c.is_finite() || !omega_a.is_finite() {
            return Err(Error::InvalidParams("frequencies must be finite".into()));
        }
        Ok(Self { n_emitters, omega_c, omega_a, g })
    }

    /// Resonant-cavity reference `omega_c = 1`, coupling `g = 1`.
    pub fn with_detuning(n_emitters: u32, detuning: f64) -> Result<Self> {
        Self::new(n_emitters, 1.0, detuning, 1.0)
    }

    pub fn n_emitters(&self) -> u32 {
        self.n_emitters
    }

    pub fn omega_c(&self) -> f64 {
        self.omega_c
    }

    pub fn omega_a(&self) -> f64 {
        self.omega_a
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn detuning(&self) -> f64 {
        self.omega_c - self.omega_a
    }

    /// Collective spin `J = N/2`.
    pub fn j(&self) -> f64 {
        f64::from(self.n_emitters) / 2.0
    }

    /// `2J`, the number of matter excitations at saturation.
    pub fn two_j(&self) -> u64 {
        u64::from(self.n_emitters)
    }

    /// Collective coupling per emitter, `g / sqrt(N)`.
    pub fn coupling_scale(&self) -> f64 {
        self.g / f64::from(self.n_emitters).sqrt()
    }
}

/// A product state `|M, n⟩`. `M` is kept as the integer `2M`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BasisState {
    pub two_m: i64,
    pub photons: u64,
}

impl BasisState {
    pub fn m(&self) -> f64 {
        self.two_m as f64 / 2.0
    }

    /// Number of excited emitters, `M + J`.
    pub fn matter_excitations(&self, two_j: u64) -> u64 {
        ((self.two_m + two_j as i64) / 2) as u64
    }
}

/// Ordered basis of the manifold with `nu` total excitations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifoldBasis {
    pub nu: u64,
    pub two_j: u64,
    pub states: Vec<BasisState>,
}

impl ManifoldBasis {
    pub fn dim(&self) -> usize {
        self.states.len()
    }
}

/// Block dimension `min(nu, 2J) + 1`.
pub fn manifold_dim(params: &ModelParams, nu: u64) -> usize {
    (nu.min(params.two_j()) + 1) as usize
}

/// States of manifold `nu` by decreasing photon number: the k-th entry is
/// `(-J + k, nu - k)`.
pub fn manifold_basis(params: &ModelParams, nu: u64) -> ManifoldBasis {
    let two_j = params.two_j();
    let states = (0..manifold_dim(params, nu) as u64)
        .map(|k| BasisState { two_m: 2 * k as i64 - two_j as i64, photons: nu - k })
        .collect();
    ManifoldBasis { nu, two_j, states }
}

/// Real symmetric tridiagonal matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalBlock {
    pub diag: Vec<f64>,
    pub offdiag: Vec<f64>,
    pub nu: u64,
    pub params: ModelParams,
}

impl TridiagonalBlock {
    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// `T v`.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        tridiag_apply(&self.diag, &self.offdiag, v)
    }

    /// Rayleigh quotient `vᵀ T v / vᵀ v`.
    pub fn expectation(&self, v: &[f64]) -> f64 {
        let tv = self.apply(v);
        let num: f64 = tv.iter().zip(v).map(|(a, b)| a * b).sum();
        let den: f64 = v.iter().map(|x| x * x).sum();
        num / den
    }
}

pub(crate) fn tridiag_apply(diag: &[f64], offdiag: &[f64], v: &[f64]) -> Vec<f64> {
    let n = diag.len();
    (0..n)
        .map(|i| {
            let mut s = diag[i] * v[i];
            if i > 0 {
                s += offdiag[i - 1] * v[i - 1];
            }
            if i + 1 < n {
                s += offdiag[i] * v[i + 1];
            }
            s
        })
        .collect()
}

/// Matrix of the Hamiltonian in the ordered basis of manifold `nu`.
///
/// `diag[k] = omega_c (nu - k) + omega_a (k - J)` and
/// `offdiag[k] = (g/sqrt N) sqrt(nu - k) sqrt((2J - k)(k + 1))`, the last
/// factor being `sqrt(J(J+1) - M(M+1))` at `M = k - J`.
pub fn hamiltonian_block(params: &ModelParams, nu: u64) -> TridiagonalBlock {
    let dim = manifold_dim(params, nu);
    let two_j = params.two_j();
    let j = params.j();
    let diag =
        (0..dim as u64).map(|k| params.omega_c * (nu - k) as f64 + params.omega_a * (k as f64 - j)).collect();
    let scale = params.coupling_scale();
    let offdiag = (0..dim.saturating_sub(1) as u64)
        .map(|k| {
            let photons = (nu - k) as f64;
            let spin = ((two_j - k) * (k + 1)) as f64;
            scale * photons.sqrt() * spin.sqrt()
        })
        .collect();
    TridiagonalBlock { diag, offdiag, nu, params: *params }
}

/// Index of `|M, n⟩` in the truncated product space `{|M⟩} ⊗ {|0⟩..|n_max⟩}`.
pub fn dense_index(params: &ModelParams, n_ph_max: u64, state: BasisState) -> Option<usize> {
    if state.photons > n_ph_max {
        return None;
    }
    let m_idx = (state.two_m + params.two_j() as i64) / 2;
    Some(m_idx as usize * (n_ph_max as usize + 1) + state.photons as usize)
}

/// Label of the product-space index `idx`, inverse of [`dense_index`].
pub fn dense_label(params: &ModelParams, n_ph_max: u64, idx: usize) -> BasisState {
    let nph = n_ph_max as usize + 1;
    BasisState { two_m: 2 * (idx / nph) as i64 - params.two_j() as i64, photons: (idx % nph) as u64 }
}

fn dense_dim(params: &ModelParams, n_ph_max: u64, cap: usize) -> Result<usize> {
    let dim = (params.two_j() as usize + 1).saturating_mul(n_ph_max as usize + 1);
    if dim > cap {
        return Err(Error::OracleTooLarge { dim, cap });
    }
    Ok(dim)
}

/// Full Hamiltonian on the truncated product space, built from ladder
/// operators as `omega_c a†a + omega_a J_z + (g/sqrt N)(a† J_- + a J_+)`.
pub fn dense_hamiltonian(params: &ModelParams, n_ph_max: u64) -> Result<DMatrix<f64>> {
    dense_hamiltonian_with_cap(params, n_ph_max, DENSE_ORACLE_CAP)
}

pub fn dense_hamiltonian_with_cap(params: &ModelParams, n_ph_max: u64, cap: usize) -> Result<DMatrix<f64>> {
    dense_dim(params, n_ph_max, cap)?;
    let spin_dim = params.two_j() as usize + 1;
    let nph = n_ph_max as usize + 1;
    let j = params.j();

    let mut jz = DMatrix::<f64>::zeros(spin_dim, spin_dim);
    let mut jp = DMatrix::<f64>::zeros(spin_dim, spin_dim);
    for i in 0..spin_dim {
        let m = i as f64 - j;
        jz[(i, i)] = m;
        if i + 1 < spin_dim {
            jp[(i + 1, i)] = (j * (j + 1.0) - m * (m + 1.0)).sqrt();
        }
    }
    let jm = jp.transpose();

    let mut a = DMatrix::<f64>::zeros(nph, nph);
    for n in 1..nph {
        a[(n - 1, n)] = (n as f64).sqrt();
    }
    let ad = a.transpose();
    let num = &ad * &a;

    let id_spin = DMatrix::<f64>::identity(spin_dim, spin_dim);
    let id_ph = DMatrix::<f64>::identity(nph, nph);

    let h = id_spin.kronecker(&num) * params.omega_c
        + jz.kronecker(&id_ph) * params.omega_a
        + (jm.kronecker(&ad) + jp.kronecker(&a)) * params.coupling_scale();
    Ok(h)
}

/// Excitation-number operator `a†a + J_z + J` on the same truncated space.
pub fn dense_excitation_number(params: &ModelParams, n_ph_max: u64) -> Result<DMatrix<f64>> {
    let dim = dense_dim(params, n_ph_max, DENSE_ORACLE_CAP)?;
    Ok(DMatrix::from_fn(dim, dim, |r, c| {
        if r == c {
            let s = dense_label(params, n_ph_max, r);
            (s.photons + s.matter_excitations(params.two_j())) as f64
        } else {
            0.0
        }
    }))
}
