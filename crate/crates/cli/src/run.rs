//! The four sweep modes, each producing a [`Table`].

use rayon::prelude::*;
use tc_core::model::BasisState;
use tc_core::observables::{
    coherence_l1, density_matrix_elements, find_statistics_crossing, Crossing, CrossingKind, CrossingOptions,
    Subsystem,
};
use tc_core::sweep::{exact_sweep_with, linspace, max_collapse_spread, scaling_sweep, variational_sweep};
use tc_core::{GroundState, MeanField};

use crate::config::Settings;
use crate::error::{CliError, Result};
use crate::table::{num, opt, Table};

pub const EXACT_COLUMNS: &[&str] = &[
    "nu",
    "rho_ex",
    "energy",
    "mu",
    "lambda1",
    "lambda2",
    "lambda3",
    "lambda4",
    "matter_lambda1",
    "matter_lambda2",
    "matter_lambda3",
    "matter_lambda4",
    "jz",
    "jz_scaled",
    "g2",
    "lin_entropy",
    "poisson_lambda3",
    "poisson_lambda4",
    "light_statistics",
    "matter_statistics",
];

pub const VARIATIONAL_COLUMNS: &[&str] = &[
    "rho_ex",
    "alpha",
    "mu_shift",
    "theta",
    "jz_per_n",
    "mbar",
    "constraint_residual",
    "stationarity",
    "competing_alpha",
];

pub const SCALING_COLUMNS: &[&str] = &["omega_a", "rho_ex", "nu", "jz", "jz_scaled"];

pub const TOMOGRAPHY_COLUMNS: &[&str] = &["nu", "row_m", "row_photons", "col_m", "col_photons", "value"];

/// Run `f` on a dedicated pool of `threads` workers (0 = rayon's default).
pub fn with_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

fn echo_keys(table: &mut Table, mode: &str, s: &Settings, keys: &[&str]) {
    table.echo("mode", mode);
    for k in keys {
        table.echo(k, s.echo(k));
    }
}

fn crossing_line(subsystem: &str, c: &Crossing) -> String {
    let kind = match c.kind {
        CrossingKind::Smooth => "smooth",
        CrossingKind::Discontinuous => "discontinuous",
    };
    format!(
        "crossing {subsystem} {kind} rho_ex={} lower={} upper={}",
        num(c.rho_ex),
        num(c.lower),
        num(c.upper)
    )
}

pub fn run_exact(s: &Settings) -> Result<Table> {
    let params = s.params()?;
    let rows = with_pool(s.threads, || exact_sweep_with(&params, s.nu_min, s.nu_max, true))??;
    let mut t = Table::new(EXACT_COLUMNS);
    echo_keys(
        &mut t,
        "exact",
        s,
        &["emitters", "detuning", "coupling", "nu_min", "nu_max", "jump_threshold", "step_ratio"],
    );
    for r in &rows {
        let [l1, l2, l3, l4] = r.light.as_array();
        let [m1, m2, m3, m4] = r.matter.moments.as_array();
        t.push(vec![
            r.nu.to_string(),
            num(r.rho_ex),
            num(r.energy),
            opt(r.mu),
            opt(l1),
            opt(l2),
            opt(l3),
            opt(l4),
            opt(m1),
            opt(m2),
            opt(m3),
            opt(m4),
            num(r.jz_mean),
            opt(r.jz_scaled),
            opt(r.g2),
            num(r.lin_entropy),
            opt(r.poisson_ref.map(|p| p.0)),
            opt(r.poisson_ref.map(|p| p.1)),
            r.statistics(Subsystem::Light).as_str().to_string(),
            r.statistics(Subsystem::Matter).as_str().to_string(),
        ]);
    }
    let opts = CrossingOptions { jump_threshold: s.jump_threshold, step_ratio: s.step_ratio };
    for (name, sub) in [("light", Subsystem::Light), ("matter", Subsystem::Matter)] {
        for c in find_statistics_crossing(&rows, sub, opts)? {
            t.footer.push(crossing_line(name, &c));
        }
    }
    Ok(t)
}

pub fn run_variational(s: &Settings) -> Result<Table> {
    let params = s.params()?;
    let functional = MeanField::new(params, s.eta, s.epsilon);
    let targets = linspace(s.rho_min, s.rho_max, s.rho_steps);
    let sols = with_pool(s.threads, || variational_sweep(&functional, &targets, true))??;
    let mut t = Table::new(VARIATIONAL_COLUMNS);
    echo_keys(
        &mut t,
        "variational",
        s,
        &["emitters", "detuning", "coupling", "rho_min", "rho_max", "rho_steps", "eta", "epsilon"],
    );
    for v in &sols {
        t.push(vec![
            num(v.rho_ex),
            num(v.amplitude()),
            num((v.mu - params.omega_c()) / params.g()),
            num(v.theta),
            num(v.jz_per_emitter()),
            num(v.mbar_value),
            num(v.constraint_residual),
            num(v.stationarity()),
            opt(v.competing.map(|b| b.alpha.abs())),
        ]);
    }
    Ok(t)
}

pub fn run_scaling(s: &Settings) -> Result<Table> {
    let params = s.params()?;
    let points = with_pool(s.threads, || scaling_sweep(&params, &s.omega_a_grid, &s.rho_set, true))??;
    let mut t = Table::new(SCALING_COLUMNS);
    echo_keys(&mut t, "scaling", s, &["emitters", "coupling", "omega_a_grid", "rho_set"]);
    for p in &points {
        t.push(vec![num(p.omega_a), num(p.rho_ex), p.nu.to_string(), num(p.jz_mean), opt(p.jz_scaled)]);
    }
    t.footer.push(format!("max_spread = {}", num(max_collapse_spread(&points))));
    Ok(t)
}

fn label_m(state: &BasisState) -> String {
    num(state.m())
}

pub fn run_tomography(s: &Settings) -> Result<Table> {
    if s.nu.is_empty() {
        return Err(CliError::Config("tomography needs at least one manifold in `nu`".into()));
    }
    let params = s.params()?;
    let states = with_pool(s.threads, || {
        s.nu.par_iter().map(|&nu| GroundState::solve(&params, nu)).collect::<tc_core::Result<Vec<_>>>()
    })??;
    let mut t = Table::new(TOMOGRAPHY_COLUMNS);
    echo_keys(&mut t, "tomography", s, &["emitters", "detuning", "coupling", "nu"]);
    for state in &states {
        for e in density_matrix_elements(state) {
            t.push(vec![
                state.nu.to_string(),
                label_m(&e.row),
                e.row.photons.to_string(),
                label_m(&e.col),
                e.col.photons.to_string(),
                num(e.value),
            ]);
        }
        t.footer.push(format!("coherence_l1 nu={} value={}", state.nu, num(coherence_l1(state))));
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::RawConfig;

    fn settings(pairs: &[(&str, &str)]) -> Settings {
        let raw: RawConfig = pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
        Settings::from_raw(&raw).unwrap()
    }

    #[test]
    fn exact_small() {
        let t = run_exact(&settings(&[("emitters", "2"), ("nu_max", "4")])).unwrap();
        assert_eq!(t.rows.len(), 5);
        let row0 = &t.rows[0];
        assert_eq!(row0[4], "0.0");
        assert_eq!(row0[15], "0.0");
        assert_eq!(row0[14], "");
    }

    #[test]
    fn variational_endpoints() {
        let t = run_variational(&settings(&[("emitters", "100"), ("rho_steps", "31")])).unwrap();
        let first = &t.rows[0];
        assert_eq!((first[0].as_str(), first[1].as_str(), first[3].as_str()), ("-0.5", "0.0", "0.0"));
        let half = t.rows.iter().find(|r| r[0] == "0.5").unwrap();
        assert!(half[1].parse::<f64>().unwrap() < 1e-3 * 10.0);
        assert!(t.rows.iter().all(|r| r[6].parse::<f64>().unwrap() < 1e-8));
    }

    #[test]
    fn scaling_single_density() {
        let t = run_scaling(&settings(&[("emitters", "10"), ("rho_set", "0.2"), ("omega_a_grid", "-1:1:3")]))
            .unwrap();
        assert_eq!(t.rows.len(), 3);
        assert_eq!(t.footer, vec!["max_spread = 0.0".to_string()]);
    }

    #[test]
    fn tomography_counts() {
        let t = run_tomography(&settings(&[("emitters", "4"), ("nu", "0,3")])).unwrap();
        // D = 1 for nu = 0, D = 4 for nu = 3
        assert_eq!(t.rows.len(), 1 + 16);
        assert_eq!(t.rows[0][5], "1.0");
        assert!(run_tomography(&settings(&[("emitters", "4")])).is_err());
    }

    #[test]
    fn crossover_has_fewer_coherences() {
        let n = 10;
        let l1 = |nu: u64| {
            let p = tc_core::ModelParams::with_detuning(n, 3.0).unwrap();
            coherence_l1(&GroundState::solve(&p, nu).unwrap())
        };
        let at = l1(10);
        assert!(at < l1(9) && at < l1(11), "{} {} {}", l1(9), at, l1(11));
    }
}
