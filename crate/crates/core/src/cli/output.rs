//! CSV, heatmap and report writers.

use std::fmt::Write as _;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::stats::{ols2, pearson, RegressionReport};
use crate::sweep::{Aggregates, CellAggregate, SweepRecord};
use crate::{Error, Result};

use super::config::RegressOn;

/// Pixels per grid cell along each axis.
pub const CELL_PX: usize = 20;

/// Formats like C's `%.{digits}g`.
pub fn format_sig(v: f64, digits: usize) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let sci = format!("{:.*e}", digits - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("scientific notation");
    let exp: i32 = exp.parse().expect("exponent");
    if exp < -4 || exp >= digits as i32 {
        let m = trim_zeros(mantissa);
        format!("{m}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{v:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn real(v: Option<f64>) -> String {
    v.map(|x| format_sig(x, 9)).unwrap_or_default()
}

fn int(v: Option<usize>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Writes records as CSV with a header of the record field names. Reals
/// carry 9 significant digits; missing values are empty.
pub fn emit_csv(records: &[SweepRecord], path: &Path) -> Result<()> {
    let ctx = || format!("writing {}", path.display());
    let file = fs::File::create(path).map_err(|e| Error::io(ctx(), e))?;
    let mut w = BufWriter::new(file);
    let mut out = SweepRecord::FIELDS.join(",");
    out.push('\n');
    for r in records {
        let row = [
            format_sig(r.target_ifd, 9),
            format_sig(r.target_dfd, 9),
            r.replicate.to_string(),
            r.seed.to_string(),
            real(r.achieved_ifd),
            real(r.achieved_dfd),
            real(r.achieved_sdi),
            int(r.steps),
            int(r.passes),
            int(r.completed_components),
            int(r.total_components),
            real(r.performance),
            real(r.comm_density),
            real(r.collaborator_ratio),
            csv_field(r.failure.as_deref().unwrap_or("")),
        ];
        out.push_str(&row.join(","));
        out.push('\n');
    }
    w.write_all(out.as_bytes()).map_err(|e| Error::io(ctx(), e))?;
    w.flush().map_err(|e| Error::io(ctx(), e))
}

/// Per-cell quantity rendered in a heatmap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Measure {
    Performance,
    CommDensity,
    Steps,
    Passes,
    CollaboratorRatio,
}

impl Measure {
    pub const HEATMAPS: [Measure; 4] = [
        Measure::Performance,
        Measure::CommDensity,
        Measure::Steps,
        Measure::CollaboratorRatio,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Measure::Performance => "performance",
            Measure::CommDensity => "comm_density",
            Measure::Steps => "steps",
            Measure::Passes => "passes",
            Measure::CollaboratorRatio => "collaborator_ratio",
        }
    }

    pub fn of(self, cell: &CellAggregate) -> f64 {
        match self {
            Measure::Performance => cell.performance.mean,
            Measure::CommDensity => cell.comm_density.mean,
            Measure::Steps => cell.steps.mean,
            Measure::Passes => cell.passes.mean,
            Measure::CollaboratorRatio => cell.collaborator_ratio.mean,
        }
    }
}

impl std::str::FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            Measure::Performance,
            Measure::CommDensity,
            Measure::Steps,
            Measure::Passes,
            Measure::CollaboratorRatio,
        ]
        .into_iter()
        .find(|m| m.name() == s)
        .ok_or_else(|| Error::InvalidParams(format!("unknown measure '{s}'")))
    }
}

/// Rendered heatmap: binary PPM bytes plus the value range.
#[derive(Debug, Clone, PartialEq)]
pub struct Heatmap {
    pub width: usize,
    pub height: usize,
    pub min: f64,
    pub max: f64,
    /// RGB triples, row-major from the top-left pixel.
    pub pixels: Vec<u8>,
}

impl Heatmap {
    pub fn to_ppm(&self) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend_from_slice(&self.pixels);
        out
    }

    pub fn pixel(&self, x: usize, y: usize) -> [u8; 3] {
        let i = 3 * (y * self.width + x);
        [self.pixels[i], self.pixels[i + 1], self.pixels[i + 2]]
    }
}

fn sorted_axis(values: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut v: Vec<f64> = values.collect();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

/// Lays cells out with IFD increasing rightward and DFD increasing upward,
/// mapping [min, max] linearly from blue to red. Cells absent from the
/// aggregate set are black.
pub fn render_heatmap(cells: &[CellAggregate], measure: Measure) -> Result<Heatmap> {
    if cells.is_empty() {
        return Err(Error::InvalidGrid("no cells to render".into()));
    }
    let xs = sorted_axis(cells.iter().map(|c| c.target_ifd));
    let ys = sorted_axis(cells.iter().map(|c| c.target_dfd));
    let mut slots: Vec<Option<f64>> = vec![None; xs.len() * ys.len()];
    for c in cells {
        let i = xs.iter().position(|&x| x == c.target_ifd).expect("on axis");
        let j = ys.iter().position(|&y| y == c.target_dfd).expect("on axis");
        let slot = &mut slots[j * xs.len() + i];
        if slot.is_some() {
            return Err(Error::InvalidGrid(format!(
                "non-rectangular cell set: ({}, {}) appears twice",
                c.target_ifd, c.target_dfd
            )));
        }
        *slot = Some(measure.of(c));
    }
    let finite = slots.iter().flatten().copied().filter(|v| v.is_finite());
    let min = finite.clone().fold(f64::INFINITY, f64::min);
    let max = finite.fold(f64::NEG_INFINITY, f64::max);

    let (width, height) = (xs.len() * CELL_PX, ys.len() * CELL_PX);
    let mut pixels = vec![0u8; width * height * 3];
    for py in 0..height {
        // Top row shows the highest DFD.
        let j = ys.len() - 1 - py / CELL_PX;
        for px in 0..width {
            let i = px / CELL_PX;
            let rgb = match slots[j * xs.len() + i] {
                Some(v) if v.is_finite() => ramp(v, min, max),
                _ => [0, 0, 0],
            };
            let k = 3 * (py * width + px);
            pixels[k..k + 3].copy_from_slice(&rgb);
        }
    }
    Ok(Heatmap {
        width,
        height,
        min,
        max,
        pixels,
    })
}

fn ramp(v: f64, min: f64, max: f64) -> [u8; 3] {
    let t = if max > min {
        ((v - min) / (max - min)).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let red = (255.0 * t).round() as u8;
    [red, 0, 255 - red]
}

/// Writes `path` (binary PPM) and a sidecar `<stem>.range.txt` with the
/// measure name and value range.
pub fn emit_heatmap(cells: &[CellAggregate], measure: Measure, path: &Path) -> Result<Heatmap> {
    let map = render_heatmap(cells, measure)?;
    fs::write(path, map.to_ppm()).map_err(|e| Error::io(format!("writing {}", path.display()), e))?;
    let sidecar = path.with_extension("range.txt");
    let text = format!(
        "measure={}\nmin={}\nmax={}\n",
        measure.name(),
        format_sig(map.min, 9),
        format_sig(map.max, 9)
    );
    fs::write(&sidecar, text).map_err(|e| Error::io(format!("writing {}", sidecar.display()), e))?;
    Ok(map)
}

/// Regressor and outcome columns over the cell aggregates.
pub struct CellColumns {
    pub ifd: Vec<f64>,
    pub dfd: Vec<f64>,
    pub performance: Vec<f64>,
    pub comm_density: Vec<f64>,
}

impl CellColumns {
    pub fn from_aggregates(aggs: &Aggregates, regress_on: RegressOn) -> Self {
        let cells = &aggs.cells;
        let (ifd, dfd) = match regress_on {
            RegressOn::Achieved => (
                cells.iter().map(|c| c.achieved_ifd).collect(),
                cells.iter().map(|c| c.achieved_dfd).collect(),
            ),
            RegressOn::Target => (
                cells.iter().map(|c| c.target_ifd).collect(),
                cells.iter().map(|c| c.target_dfd).collect(),
            ),
        };
        CellColumns {
            ifd,
            dfd,
            performance: cells.iter().map(|c| c.performance.mean).collect(),
            comm_density: cells.iter().map(|c| c.comm_density.mean).collect(),
        }
    }

    pub fn regress_comm_density(&self) -> Result<RegressionReport> {
        ols2(&self.comm_density, &self.ifd, &self.dfd)
    }

    pub fn regress_performance(&self, scale: f64) -> Result<RegressionReport> {
        let y: Vec<f64> = self.performance.iter().map(|p| p * scale).collect();
        ols2(&y, &self.ifd, &self.dfd)
    }
}

fn p_text(p: f64) -> String {
    if p < 0.001 {
        "<0.001".into()
    } else {
        format!("{p:.3}")
    }
}

fn regression_table(out: &mut String, title: &str, fit: &Result<RegressionReport>) {
    let _ = writeln!(
        out,
        "{title:<24}{:>12}{:>12}{:>14}{:>10}",
        "Estimate", "SE", "t-statistic", "p-value"
    );
    match fit {
        Ok(r) => {
            for (name, c) in [("Intercept", &r.intercept), ("IFD", &r.x1), ("DFD", &r.x2)] {
                let _ = writeln!(
                    out,
                    "{name:<24}{:>12.4}{:>12.4}{:>14.2}{:>10}",
                    c.estimate,
                    c.std_error,
                    c.t_stat,
                    p_text(c.p_value)
                );
            }
            let _ = writeln!(
                out,
                "{:<24}df = {}   adjusted R^2 = {:.2}   F = {:.1}   p {}",
                "",
                r.df,
                r.adj_r_squared,
                r.f_stat,
                match p_text(r.f_p_value) {
                    s if s.starts_with('<') => s,
                    s => format!("= {s}"),
                }
            );
        }
        Err(e) => {
            let _ = writeln!(out, "  regression unavailable: {e}");
        }
    }
}

/// Regression tables for communication density and scaled performance,
/// followed by their correlation across cells.
pub fn format_report(aggs: &Aggregates, regress_on: RegressOn, performance_scale: f64, title: &str) -> String {
    let cols = CellColumns::from_aggregates(aggs, regress_on);
    let mut out = String::new();
    let _ = writeln!(out, "{title}");
    let _ = writeln!(
        out,
        "cells: {}   failed runs excluded: {}   regressors: {} IFD/DFD   performance scale: {}",
        aggs.cells.len(),
        aggs.failed,
        match regress_on {
            RegressOn::Achieved => "achieved",
            RegressOn::Target => "target",
        },
        format_sig(performance_scale, 9)
    );
    let _ = writeln!(out);
    regression_table(&mut out, "Communication density", &cols.regress_comm_density());
    let _ = writeln!(out);
    regression_table(&mut out, "Performance", &cols.regress_performance(performance_scale));
    let _ = writeln!(out);
    match pearson(&cols.performance, &cols.comm_density) {
        Ok(c) => {
            let _ = writeln!(
                out,
                "Performance vs communication density: r({}) = {:.2}, p {}",
                c.df,
                c.r,
                match p_text(c.p_value) {
                    s if s.starts_with('<') => s,
                    s => format!("= {s}"),
                }
            );
        }
        Err(e) => {
            let _ = writeln!(out, "Performance vs communication density: unavailable ({e})");
        }
    }
    out
}
