//! Solving `A(u) = d` for operators diagonal in a basis, by dividing the
//! datum's coordinates by the eigenvalue system.
//!
//! Constant-coefficient differential operators `D = Σ c_j ∂^j` are diagonal
//! in the Fourier family with symbol `Σ c_j (-i)^{|j|} p^j`. On the truncated
//! grid the Fourier family is periodic, so [`solve_pde`] returns the periodic
//! solution on the box.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SpectralError};
use crate::families::{coordinates, superpose, CoordinateDistribution, SchwartzFamily};
use crate::grid::{Grid, GridDistribution, SymbolFunction};
use crate::spectral::spectral_apply;

/// `Σ c_j ∂^j` keyed by multi-index.
#[derive(Debug, Clone, PartialEq)]
pub struct DifferentialOperatorSpec {
    dim: usize,
    terms: BTreeMap<Vec<u32>, Complex64>,
}

impl DifferentialOperatorSpec {
    /// The zero operator in `dim` variables.
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::new(dim)
            .with_term(&vec![0; dim], Complex64::new(1.0, 0.0))
            .expect("multi-index length matches")
    }

    /// `∂^order / ∂x_axis^order`.
    pub fn derivative(dim: usize, axis: usize, order: u32) -> Self {
        let mut index = vec![0; dim];
        index[axis] = order;
        Self::new(dim)
            .with_term(&index, Complex64::new(1.0, 0.0))
            .expect("multi-index length matches")
    }

    /// Adds `coeff·∂^index`, accumulating onto an existing term.
    pub fn with_term(mut self, index: &[u32], coeff: Complex64) -> Result<Self> {
        if index.len() != self.dim {
            return Err(SpectralError::ArityMismatch {
                expected: self.dim,
                found: index.len(),
            });
        }
        if !(coeff.re.is_finite() && coeff.im.is_finite()) {
            return Err(SpectralError::NonFinite(format!("coefficient of {index:?}")));
        }
        *self
            .terms
            .entry(index.to_vec())
            .or_insert(Complex64::new(0.0, 0.0)) += coeff;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], Complex64)> {
        self.terms.iter().map(|(k, &v)| (k.as_slice(), v))
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `P(p) = Σ c_j (-i)^{|j|} p^j`.
    pub fn symbol_at(&self, p: &[f64]) -> Complex64 {
        self.terms
            .iter()
            .map(|(j, &c)| {
                let order: u32 = j.iter().sum();
                let monomial: f64 = j
                    .iter()
                    .zip(p)
                    .map(|(&e, &x)| x.powi(e as i32))
                    .product();
                c * minus_i_pow(order) * monomial
            })
            .sum()
    }
}

fn minus_i_pow(k: u32) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, -1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, 1.0),
    }
}

/// The Fourier symbol of `spec`, checked against the index grid's dimension.
pub fn differential_symbol(
    spec: &DifferentialOperatorSpec,
    index_grid: &Grid,
) -> Result<SymbolFunction> {
    if spec.dim() != index_grid.dim() {
        return Err(SpectralError::ArityMismatch {
            expected: index_grid.dim(),
            found: spec.dim(),
        });
    }
    let owned = spec.clone();
    let descriptor = if spec.is_empty() {
        "0".to_string()
    } else {
        spec.terms()
            .map(|(j, c)| format!("({c})∂^{j:?}"))
            .collect::<Vec<_>>()
            .join(" + ")
    };
    Ok(SymbolFunction::new(spec.dim(), descriptor, move |p| {
        owned.symbol_at(p)
    }))
}

/// Thresholds turning exact division into a testable numerical rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DivisionPolicy {
    /// `|a(p)|` at or below this counts as a zero of the symbol.
    pub zero_threshold: f64,
    /// When set, `zero_threshold` is taken relative to `max |a|` on the grid.
    pub relative: bool,
    /// Coordinate mass allowed on the zero set, relative to `‖d_v‖∞`.
    pub residual_threshold: f64,
}

impl Default for DivisionPolicy {
    fn default() -> Self {
        Self {
            zero_threshold: 1e-12,
            relative: true,
            residual_threshold: 1e-10,
        }
    }
}

impl DivisionPolicy {
    pub fn absolute(zero_threshold: f64, residual_threshold: f64) -> Self {
        Self {
            zero_threshold,
            relative: false,
            residual_threshold,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.zero_threshold.is_nan() || self.zero_threshold <= 0.0 {
            return Err(SpectralError::NonFinite(format!(
                "zero threshold {} must be positive",
                self.zero_threshold
            )));
        }
        if !(self.residual_threshold.is_finite() && self.residual_threshold >= 0.0) {
            return Err(SpectralError::NonFinite(format!(
                "residual threshold {} must be finite and non-negative",
                self.residual_threshold
            )));
        }
        Ok(())
    }

    /// Effective zero cutoff for a symbol with the given sup over the grid.
    pub fn zero_cutoff(&self, symbol_max: f64) -> f64 {
        if self.relative {
            self.zero_threshold * symbol_max
        } else {
            self.zero_threshold
        }
    }
}

/// `q = d_v / a` off the symbol's zero set, `q = 0` on it.
pub fn divide(
    d_v: &GridDistribution,
    a: &SymbolFunction,
    policy: &DivisionPolicy,
) -> Result<CoordinateDistribution> {
    policy.validate()?;
    let grid = d_v.grid();
    let values = a.sample(grid)?;
    let symbol_max = values.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let cutoff = policy.zero_cutoff(symbol_max);
    let allowed = policy.residual_threshold * d_v.sup_norm();

    let mut worst: Option<(usize, f64)> = None;
    let quotient = d_v
        .samples()
        .iter()
        .zip(&values)
        .enumerate()
        .map(|(k, (&d, &s))| {
            if s.norm() > cutoff {
                d / s
            } else {
                let mass = d.norm();
                if mass > allowed && worst.is_none_or(|(_, m)| mass > m) {
                    worst = Some((k, mass));
                }
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    if let Some((k, mass)) = worst {
        return Err(SpectralError::NotDivisible {
            worst_index: k,
            point: grid.point(k),
            mass,
            symbol_magnitude: values[k].norm(),
        });
    }
    Ok(CoordinateDistribution::new(GridDistribution::new(
        grid.clone(),
        quotient,
    )?))
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub solution: GridDistribution,
    /// The quotient coordinates `q` with `u = ∫ q v`.
    pub quotient: CoordinateDistribution,
    /// `‖A(u) − d‖₂ / ‖d‖₂` (absolute when `d = 0`).
    pub residual: f64,
    /// Number of index points treated as zeros of the symbol.
    pub zero_set_size: usize,
}

/// Solves `∫ a[u|v] v = d` by `u = ∫ (d_v / a) v`.
pub fn solve(
    v: &SchwartzFamily,
    a: &SymbolFunction,
    d: &GridDistribution,
    policy: &DivisionPolicy,
) -> Result<Solution> {
    if !v.is_basis() {
        return Err(SpectralError::NotABasis(format!(
            "{} family is not flagged as a basis",
            v.kind()
        )));
    }
    let d_v = coordinates(d, v)?;
    let quotient = divide(&d_v, a, policy)?;
    let solution = superpose(&quotient, v)?;
    let residual = spectral_apply(a, v, &solution)?.relative_l2_error(d)?;
    let values = a.sample(v.index_grid())?;
    let cutoff = policy.zero_cutoff(values.iter().map(|z| z.norm()).fold(0.0, f64::max));
    let zero_set_size = values.iter().filter(|z| z.norm() <= cutoff).count();
    Ok(Solution {
        solution,
        quotient,
        residual,
        zero_set_size,
    })
}

/// Periodic solution of `D u = d` through the Fourier family of `d`'s grid.
pub fn solve_pde(
    spec: &DifferentialOperatorSpec,
    d: &GridDistribution,
    policy: &DivisionPolicy,
) -> Result<Solution> {
    let fourier = SchwartzFamily::fourier(d.grid());
    let symbol = differential_symbol(spec, fourier.index_grid())?;
    solve(&fourier, &symbol, d, policy)
}
