//! Sweep orchestration for the `tavis` binary: configuration, CSV emission
//! and SVG plots on top of `tc_core`.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod plot;
pub mod run;
pub mod table;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{read_config, RawConfig, Settings};
pub use crate::error::{CliError, Result};

#[derive(Debug, Parser)]
#[command(name = "tavis", version, about = "Tavis-Cummings manifold sweeps")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Ground-state observables for every manifold in [nu-min, nu-max].
    Exact(Overrides),
    /// Coherent-state mean field over a density grid.
    Variational(Overrides),
    /// Scaled population inversion over an emitter-frequency grid.
    Scaling(Overrides),
    /// Density-matrix elements of selected manifolds.
    Tomography(Overrides),
    /// Render a sweep CSV as SVG.
    Plot(PlotArgs),
}

/// Flags mirroring the config keys. A flag beats the config file.
#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// Flat `key = value` file read before the flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub emitters: Option<String>,
    /// `ω_c − ω_a` with `ω_c = 1`.
    #[arg(long, allow_hyphen_values = true)]
    pub detuning: Option<String>,
    #[arg(long)]
    pub coupling: Option<String>,
    #[arg(long)]
    pub nu_min: Option<String>,
    #[arg(long)]
    pub nu_max: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub rho_min: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub rho_max: Option<String>,
    #[arg(long)]
    pub rho_steps: Option<String>,
    /// `lo:hi:count` or a comma-separated list.
    #[arg(long, allow_hyphen_values = true)]
    pub omega_a_grid: Option<String>,
    /// Comma-separated densities for the scaling sweep.
    #[arg(long, allow_hyphen_values = true)]
    pub rho_set: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub eta: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub epsilon: Option<String>,
    #[arg(long)]
    pub jump_threshold: Option<String>,
    #[arg(long)]
    pub step_ratio: Option<String>,
    /// Comma-separated manifolds for tomography.
    #[arg(long)]
    pub nu: Option<String>,
    /// Output CSV; stdout when absent or `-`.
    #[arg(long)]
    pub out: Option<String>,
    #[arg(long)]
    pub threads: Option<String>,
}

impl Overrides {
    fn flags(&self) -> [(&'static str, &Option<String>); 17] {
        [
            ("emitters", &self.emitters),
            ("detuning", &self.detuning),
            ("coupling", &self.coupling),
            ("nu_min", &self.nu_min),
            ("nu_max", &self.nu_max),
            ("rho_min", &self.rho_min),
            ("rho_max", &self.rho_max),
            ("rho_steps", &self.rho_steps),
            ("omega_a_grid", &self.omega_a_grid),
            ("rho_set", &self.rho_set),
            ("eta", &self.eta),
            ("epsilon", &self.epsilon),
            ("jump_threshold", &self.jump_threshold),
            ("step_ratio", &self.step_ratio),
            ("nu", &self.nu),
            ("out", &self.out),
            ("threads", &self.threads),
        ]
    }

    /// Config file values with flags laid over them.
    pub fn resolve(&self) -> Result<Settings> {
        let mut raw = match &self.config {
            Some(path) => read_config(path)?,
            None => RawConfig::new(),
        };
        for (key, value) in self.flags() {
            if let Some(v) = value {
                raw.insert(key.to_string(), v.clone());
            }
        }
        Settings::from_raw(&raw)
    }
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    /// CSV written by one of the sweep subcommands.
    pub input: PathBuf,
    /// fig3 | fig4 | fig5 | moments | fig7 | tomography
    #[arg(long)]
    pub figure: String,
    /// SVG path; defaults to the input with an `.svg` extension.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn execute(cli: Cli) -> Result<()> {
    let (settings, table) = match cli.command {
        Command::Plot(args) => {
            let figure = args.figure.parse()?;
            let out = args.out.unwrap_or_else(|| args.input.with_extension("svg"));
            return plot::render(&args.input, figure, &out);
        }
        Command::Exact(o) => {
            let s = o.resolve()?;
            let t = run::run_exact(&s)?;
            (s, t)
        }
        Command::Variational(o) => {
            let s = o.resolve()?;
            let t = run::run_variational(&s)?;
            (s, t)
        }
        Command::Scaling(o) => {
            let s = o.resolve()?;
            let t = run::run_scaling(&s)?;
            (s, t)
        }
        Command::Tomography(o) => {
            let s = o.resolve()?;
            let t = run::run_tomography(&s)?;
            (s, t)
        }
    };
    table.write(settings.out.as_deref())
}
