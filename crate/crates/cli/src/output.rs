//! CSV and JSON artifacts.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::Context;
use schwartz_spectral::{DivisionPolicy, Grid, GridDistribution, SpectralError};
use serde::Serialize;

/// Shortest round-trip form, switching to exponent notation outside
/// `[1e-5, 1e16)`.
pub fn format_float(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || (1e-5..1e16).contains(&a) || !a.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// Writes `x0[,x1…],re,im` rows in row-major order.
pub fn write_csv(path: &Path, u: &GridDistribution) -> anyhow::Result<()> {
    let grid = u.grid();
    let mut text = String::new();
    for axis in 0..grid.dim() {
        write!(text, "x{axis},").unwrap();
    }
    text.push_str("re,im\n");
    for (k, z) in u.samples().iter().enumerate() {
        for x in grid.point(k) {
            write!(text, "{},", format_float(x)).unwrap();
        }
        writeln!(text, "{},{}", format_float(z.re), format_float(z.im)).unwrap();
    }
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

#[derive(Debug, Serialize)]
pub struct GridReport {
    pub dim: usize,
    pub counts: Vec<usize>,
    pub half_extents: Vec<f64>,
    pub spacings: Vec<f64>,
}

impl From<&Grid> for GridReport {
    fn from(g: &Grid) -> Self {
        Self {
            dim: g.dim(),
            counts: g.counts().to_vec(),
            half_extents: g.half_extents().to_vec(),
            spacings: g.spacings(),
        }
    }
}

/// Where division or inversion broke down.
#[derive(Debug, Serialize)]
pub struct Failure {
    pub kind: &'static str,
    /// Index point with the largest offending coordinate mass (or smallest `|l|`).
    pub worst_index: Vec<f64>,
    pub worst_flat_index: usize,
    pub mass: Option<f64>,
    pub symbol_magnitude: f64,
    pub message: String,
}

impl Failure {
    /// `None` for errors that are not division or inversion failures.
    pub fn from_error(e: &SpectralError) -> Option<Self> {
        match e {
            SpectralError::NotDivisible {
                worst_index,
                point,
                mass,
                symbol_magnitude,
            } => Some(Self {
                kind: "not_divisible",
                worst_index: point.clone(),
                worst_flat_index: *worst_index,
                mass: Some(*mass),
                symbol_magnitude: *symbol_magnitude,
                message: e.to_string(),
            }),
            SpectralError::NotInvertible {
                worst_index,
                point,
                symbol_magnitude,
            } => Some(Self {
                kind: "not_invertible",
                worst_index: point.clone(),
                worst_flat_index: *worst_index,
                mass: None,
                symbol_magnitude: *symbol_magnitude,
                message: e.to_string(),
            }),
            _ => None,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Divisibility {
    pub divisible: bool,
    pub zero_set_size: Option<usize>,
    pub failure: Option<Failure>,
}

#[derive(Debug, Serialize)]
pub struct SolveReport {
    pub command: &'static str,
    pub status: &'static str,
    pub grid: GridReport,
    pub family: &'static str,
    pub symbol: String,
    pub policy: DivisionPolicy,
    pub residual: Option<f64>,
    pub divisibility: Divisibility,
    pub outputs: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct GreenIndex {
    pub point: Vec<f64>,
    pub flat_index: usize,
    pub weak_residual: f64,
    pub file: String,
}

#[derive(Debug, Serialize)]
pub struct GreenReport {
    pub command: &'static str,
    pub status: &'static str,
    pub grid: GridReport,
    pub family: &'static str,
    pub symbol: String,
    pub policy: DivisionPolicy,
    /// `inverse` when `1/l` exists on the grid, `divided` for the quotient route.
    pub route: Option<&'static str>,
    pub max_weak_residual: Option<f64>,
    pub indices: Vec<GreenIndex>,
    /// Failures of the routes tried, in order.
    pub failures: Vec<Failure>,
}

#[derive(Debug, Serialize)]
pub struct ExpandReport {
    pub command: &'static str,
    pub status: &'static str,
    pub grid: GridReport,
    pub index_grid: GridReport,
    pub family: &'static str,
    pub symbol: String,
    pub outputs: Vec<String>,
}
