//! Static SVG rendering of the sweep CSVs.

use std::path::Path;
use std::str::FromStr;

use plotters::coord::Shift;
use plotters::prelude::*;

use crate::error::{CliError, Result};
use crate::table::ReadTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    /// Variational amplitude, chemical potential, angle and inversion.
    Fig3,
    /// Exact photon number, inversion, chemical potential and energy.
    Fig4,
    /// `g²(0)` and linear entropy.
    Fig5,
    /// Light and matter moments with Poisson references.
    Moments,
    /// Scaled inversion against emitter frequency, one curve per density.
    Fig7,
    /// Density-matrix magnitudes, one panel per manifold.
    Tomography,
}

impl FromStr for Figure {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "fig3" => Figure::Fig3,
            "fig4" => Figure::Fig4,
            "fig5" => Figure::Fig5,
            "moments" => Figure::Moments,
            "fig7" => Figure::Fig7,
            "tomography" => Figure::Tomography,
            other => return Err(CliError::Config(format!("unknown figure `{other}`"))),
        })
    }
}

impl Figure {
    pub fn required_columns(self) -> &'static [&'static str] {
        match self {
            Figure::Fig3 => &["rho_ex", "alpha", "mu_shift", "theta", "jz_per_n"],
            Figure::Fig4 => &["rho_ex", "lambda1", "jz", "mu", "energy"],
            Figure::Fig5 => &["rho_ex", "g2", "lin_entropy"],
            Figure::Moments => &[
                "rho_ex",
                "lambda1",
                "lambda2",
                "lambda3",
                "lambda4",
                "matter_lambda1",
                "matter_lambda2",
                "matter_lambda3",
                "matter_lambda4",
                "poisson_lambda3",
                "poisson_lambda4",
            ],
            Figure::Fig7 => &["omega_a", "rho_ex", "jz_scaled"],
            Figure::Tomography => &["nu", "row_photons", "col_photons", "value"],
        }
    }
}

/// Check the schema, naming the first missing column.
pub fn check_schema(table: &ReadTable, figure: Figure) -> Result<()> {
    match figure.required_columns().iter().find(|c| table.index(c).is_none()) {
        Some(c) => Err(CliError::Schema(format!("missing column `{c}` for figure {figure:?}"))),
        None => Ok(()),
    }
}

type Area<'a> = DrawingArea<SVGBackend<'a>, Shift>;

fn plot_err(e: impl std::fmt::Display) -> CliError {
    CliError::Plot(e.to_string())
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    let pad = if hi > lo { 0.05 * (hi - lo) } else { 0.5 };
    (lo - pad, hi + pad)
}

/// Points split at undefined values so gaps stay gaps.
fn segments(x: &[f64], y: &[f64]) -> Vec<Vec<(f64, f64)>> {
    let mut out = vec![Vec::new()];
    for (&a, &b) in x.iter().zip(y) {
        if a.is_finite() && b.is_finite() {
            out.last_mut().unwrap().push((a, b));
        } else if !out.last().unwrap().is_empty() {
            out.push(Vec::new());
        }
    }
    out.retain(|s| !s.is_empty());
    out
}

struct Series<'a> {
    label: &'a str,
    y: Vec<f64>,
}

fn line_panel(area: &Area, title: &str, x: &[f64], series: &[Series]) -> Result<()> {
    let (x0, x1) = range(x.iter().copied());
    let (y0, y1) = range(series.iter().flat_map(|s| s.y.iter().copied()));
    let mut chart = ChartBuilder::on(area)
        .caption(title, ("sans-serif", 16))
        .margin(8)
        .x_label_area_size(28)
        .y_label_area_size(48)
        .build_cartesian_2d(x0..x1, y0..y1)
        .map_err(plot_err)?;
    chart.configure_mesh().light_line_style(WHITE).draw().map_err(plot_err)?;
    for (i, s) in series.iter().enumerate() {
        let color = Palette99::pick(i).to_rgba();
        for (k, seg) in segments(x, &s.y).into_iter().enumerate() {
            let drawn = chart.draw_series(LineSeries::new(seg, color.stroke_width(2))).map_err(plot_err)?;
            if k == 0 && series.len() > 1 {
                drawn.label(s.label).legend(move |(x, y)| PathElement::new([(x, y), (x + 16, y)], color));
            }
        }
    }
    if series.len() > 1 {
        chart
            .configure_series_labels()
            .background_style(WHITE.mix(0.8))
            .border_style(BLACK)
            .draw()
            .map_err(plot_err)?;
    }
    Ok(())
}

fn column(table: &ReadTable, name: &str) -> Vec<f64> {
    table.floats(table.index(name).expect("schema checked"))
}

fn panels(root: &Area, table: &ReadTable, x: &str, groups: &[&[&str]], cols: usize) -> Result<()> {
    let rows = groups.len().div_ceil(cols);
    let xs = column(table, x);
    for (area, group) in root.split_evenly((rows, cols)).iter().zip(groups) {
        let series: Vec<Series> = group.iter().map(|c| Series { label: c, y: column(table, c) }).collect();
        line_panel(area, &group.join(", "), &xs, &series)?;
    }
    Ok(())
}

fn scaling_panel(root: &Area, table: &ReadTable) -> Result<()> {
    let (w, rho, jz) = (column(table, "omega_a"), column(table, "rho_ex"), column(table, "jz_scaled"));
    let mut densities: Vec<f64> = rho.iter().copied().filter(|r| r.is_finite()).collect();
    densities.sort_by(f64::total_cmp);
    densities.dedup();
    let mut x = Vec::new();
    let labels: Vec<String> = densities.iter().map(|d| format!("rho_ex = {d}")).collect();
    let mut series = Vec::new();
    for (d, label) in densities.iter().zip(&labels) {
        let pick: Vec<usize> = (0..rho.len()).filter(|&i| rho[i] == *d).collect();
        if x.is_empty() {
            x = pick.iter().map(|&i| w[i]).collect();
        }
        series.push(Series { label, y: pick.iter().map(|&i| jz[i]).collect() });
    }
    line_panel(root, "scaled inversion", &x, &series)
}

fn distinct_in_order(values: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = values.iter().copied().filter(|n| n.is_finite()).collect();
    out.dedup();
    out
}

fn tomography_panels(root: &Area, table: &ReadTable) -> Result<()> {
    let (nu, r, c, v) = (
        column(table, "nu"),
        column(table, "row_photons"),
        column(table, "col_photons"),
        column(table, "value"),
    );
    let manifolds = distinct_in_order(&nu);
    let areas = root.split_evenly((1, manifolds.len().max(1)));
    for (area, m) in areas.iter().zip(&manifolds) {
        let pick: Vec<usize> = (0..nu.len()).filter(|&i| nu[i] == *m).collect();
        let hi = pick.iter().map(|&i| r[i].max(c[i])).fold(0.0, f64::max) + 1.0;
        let vmax = pick.iter().map(|&i| v[i].abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        let mut chart = ChartBuilder::on(area)
            .caption(format!("nu = {m}"), ("sans-serif", 16))
            .margin(8)
            .x_label_area_size(28)
            .y_label_area_size(36)
            .build_cartesian_2d(0.0..hi, 0.0..hi)
            .map_err(plot_err)?;
        chart.configure_mesh().disable_mesh().draw().map_err(plot_err)?;
        chart
            .draw_series(pick.iter().map(|&i| {
                let shade = (v[i].abs() / vmax).clamp(0.0, 1.0);
                let color = HSLColor(0.62, 0.8, 1.0 - 0.6 * shade);
                Rectangle::new([(c[i], r[i]), (c[i] + 1.0, r[i] + 1.0)], color.filled())
            }))
            .map_err(plot_err)?;
    }
    Ok(())
}

/// Render `figure` from the CSV at `input` into the SVG file `output`.
pub fn render(input: &Path, figure: Figure, output: &Path) -> Result<()> {
    let table = ReadTable::read(input)?;
    check_schema(&table, figure)?;
    let size = match figure {
        Figure::Fig5 => (900, 360),
        Figure::Fig7 => (640, 480),
        Figure::Tomography => {
            let panels = distinct_in_order(&column(&table, "nu")).len().max(1);
            (360 * panels as u32, 380)
        }
        _ => (900, 700),
    };
    let root = SVGBackend::new(output, size).into_drawing_area();
    root.fill(&WHITE).map_err(plot_err)?;
    match figure {
        Figure::Fig3 => {
            panels(&root, &table, "rho_ex", &[&["alpha"], &["mu_shift"], &["theta"], &["jz_per_n"]], 2)?
        }
        Figure::Fig4 => panels(&root, &table, "rho_ex", &[&["lambda1"], &["jz"], &["mu"], &["energy"]], 2)?,
        Figure::Fig5 => panels(&root, &table, "rho_ex", &[&["g2"], &["lin_entropy"]], 2)?,
        Figure::Moments => panels(
            &root,
            &table,
            "rho_ex",
            &[
                &["lambda1", "matter_lambda1"],
                &["lambda2", "matter_lambda2"],
                &["lambda3", "matter_lambda3", "poisson_lambda3"],
                &["lambda4", "matter_lambda4", "poisson_lambda4"],
            ],
            2,
        )?,
        Figure::Fig7 => scaling_panel(&root, &table)?,
        Figure::Tomography => tomography_panels(&root, &table)?,
    }
    root.present().map_err(plot_err)?;
    Ok(())
}
