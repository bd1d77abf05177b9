//! Deterministic sweeps over manifolds, densities and emitter frequencies.
//!
//! Manifolds are independent, so the per-`ν` work runs on the rayon pool and
//! is reassembled in `ν` order. The output does not depend on the thread count.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::observables::{population_inversion, scaled_inversion, GroundState, ObservableRecord};
use crate::variational::{MeanField, VariationalSolution};

/// Run per-item work either on the current rayon pool or serially.
fn map_items<T, R>(items: Vec<T>, parallel: bool, f: impl Fn(T) -> R + Sync + Send) -> Vec<R>
where
    T: Send,
    R: Send,
{
    if parallel {
        items.into_par_iter().map(f).collect()
    } else {
        items.into_iter().map(f).collect()
    }
}

/// One observable record per manifold in `nu_min..=nu_max`. The chemical
/// potential of the last row uses the ground energy of `nu_max + 1`.
pub fn exact_sweep(params: &ModelParams, nu_min: u64, nu_max: u64) -> Result<Vec<ObservableRecord>> {
    exact_sweep_with(params, nu_min, nu_max, true)
}

pub fn exact_sweep_with(
    params: &ModelParams,
    nu_min: u64,
    nu_max: u64,
    parallel: bool,
) -> Result<Vec<ObservableRecord>> {
    if nu_min > nu_max {
        return Err(Error::EmptySweep);
    }
    let nus: Vec<u64> = (nu_min..=nu_max).collect();
    let rows = map_items(nus, parallel, |nu| {
        GroundState::solve(params, nu).map(|s| ObservableRecord::from_state(&s, None))
    });
    let mut rows: Vec<ObservableRecord> = rows.into_iter().collect::<Result<_>>()?;
    let tail = GroundState::solve(params, nu_max + 1)?.energy;
    let energies: Vec<f64> = rows.iter().map(|r| r.energy).chain([tail]).collect();
    for (row, pair) in rows.iter_mut().zip(energies.windows(2)) {
        row.mu = Some(pair[1] - pair[0]);
    }
    Ok(rows)
}

/// Manifold whose density `(ν − J)/N` equals `rho_ex`, if there is one.
pub fn manifold_for_density(params: &ModelParams, rho_ex: f64) -> Option<u64> {
    let nu = rho_ex * f64::from(params.n_emitters()) + params.j();
    let rounded = nu.round();
    (rounded >= 0.0 && (nu - rounded).abs() < 1e-9).then_some(rounded as u64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingPoint {
    pub omega_a: f64,
    pub rho_ex: f64,
    pub nu: u64,
    pub jz_mean: f64,
    pub jz_scaled: Option<f64>,
}

/// Scaled inversion on the grid `omega_a × rho_set`, keeping `omega_c` and `g`
/// from `base`. Rows are ordered by `omega_a`, then by the order of `rho_set`.
pub fn scaling_sweep(
    base: &ModelParams,
    omega_a_grid: &[f64],
    rho_set: &[f64],
    parallel: bool,
) -> Result<Vec<ScalingPoint>> {
    let nus: Vec<u64> = rho_set
        .iter()
        .map(|&r| {
            manifold_for_density(base, r).ok_or_else(|| {
                Error::InvalidParams(format!(
                    "density {r} is not (nu - J)/N for any integer nu at N = {}",
                    base.n_emitters()
                ))
            })
        })
        .collect::<Result<_>>()?;
    let mut jobs = Vec::with_capacity(omega_a_grid.len() * rho_set.len());
    for &wa in omega_a_grid {
        let p = ModelParams::from_frequencies(base.n_emitters(), base.omega_c(), wa, base.g())?;
        for (&rho, &nu) in rho_set.iter().zip(&nus) {
            jobs.push((p, rho, nu));
        }
    }
    map_items(jobs, parallel, |(p, rho_ex, nu)| {
        let jz = population_inversion(&GroundState::solve(&p, nu)?);
        Ok(ScalingPoint {
            omega_a: p.omega_a(),
            rho_ex,
            nu,
            jz_mean: jz,
            jz_scaled: scaled_inversion(jz, &p, nu),
        })
    })
    .into_iter()
    .collect()
}

/// Largest spread of the scaled inversion across densities at any single `omega_a`.
pub fn max_collapse_spread(points: &[ScalingPoint]) -> f64 {
    let mut spread = 0.0f64;
    for chunk in points.chunk_by(|a, b| a.omega_a == b.omega_a) {
        let vals: Vec<f64> = chunk.iter().filter_map(|p| p.jz_scaled).collect();
        if let (Some(lo), Some(hi)) =
            (vals.iter().cloned().reduce(f64::min), vals.iter().cloned().reduce(f64::max))
        {
            spread = spread.max(hi - lo);
        }
    }
    spread
}

/// Variational solutions for each target density, in input order.
pub fn variational_sweep(
    functional: &MeanField,
    targets: &[f64],
    parallel: bool,
) -> Result<Vec<VariationalSolution>> {
    map_items(targets.to_vec(), parallel, |t| functional.solve(t)).into_iter().collect()
}

/// `n` evenly spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_sweep_rows() {
        let p = ModelParams::with_detuning(2, 3.0).unwrap();
        let rows = exact_sweep(&p, 0, 4).unwrap();
        assert_eq!(rows.len(), 5);
        assert_eq!(rows[0].light.mean, 0.0);
        assert_eq!(rows[0].lin_entropy, 0.0);
        assert_eq!(rows[0].g2, None);
        assert!(rows.iter().all(|r| r.mu.is_some()));
    }

    #[test]
    fn parallel_equals_serial() {
        let p = ModelParams::with_detuning(30, 3.0).unwrap();
        assert_eq!(exact_sweep_with(&p, 0, 90, true).unwrap(), exact_sweep_with(&p, 0, 90, false).unwrap());
    }

    #[test]
    fn density_to_manifold() {
        let p = ModelParams::with_detuning(10, 3.0).unwrap();
        assert_eq!(manifold_for_density(&p, -0.4), Some(1));
        assert_eq!(manifold_for_density(&p, 0.6), Some(11));
        assert_eq!(manifold_for_density(&p, 0.05), None);
        let odd = ModelParams::with_detuning(3, 3.0).unwrap();
        assert_eq!(manifold_for_density(&odd, 0.0), None);
    }

    #[test]
    fn scaling_single_density() {
        let p = ModelParams::with_detuning(10, 3.0).unwrap();
        let pts = scaling_sweep(&p, &[-1.0, 0.0, 1.0], &[0.2], false).unwrap();
        assert_eq!(pts.len(), 3);
        assert_eq!(max_collapse_spread(&pts), 0.0);
        assert!(scaling_sweep(&p, &[0.0], &[0.05], false).is_err());
    }

    #[test]
    fn linspace_endpoints() {
        let v = linspace(-0.5, 1.5, 201);
        assert_eq!(v[0], -0.5);
        assert_eq!(v[100], 0.5);
        assert_eq!(v[200], 1.5);
        assert_eq!(linspace(2.0, 3.0, 1), vec![2.0]);
    }
}
