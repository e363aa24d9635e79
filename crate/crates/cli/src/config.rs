//! JSON run configuration.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, ensure, Context};
use schwartz_spectral::{
    differential_symbol, Complex64, DifferentialOperatorSpec, DivisionPolicy, Grid,
    GridDistribution, SchwartzFamily, SymbolFunction,
};
use serde::Deserialize;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub grid: GridSpec,
    #[serde(default)]
    pub operator: OperatorSpec,
    #[serde(default)]
    pub datum: DatumSpec,
    #[serde(default)]
    pub policy: DivisionPolicy,
    #[serde(default)]
    pub output: OutputSpec,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub dim: usize,
    pub counts: Vec<usize>,
    pub half_extents: Vec<f64>,
}

/// A complex number written either as a plain number or as `[re, im]`.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
pub enum ComplexValue {
    Real(f64),
    Pair([f64; 2]),
}

impl ComplexValue {
    pub fn value(self) -> Complex64 {
        match self {
            ComplexValue::Real(re) => Complex64::new(re, 0.0),
            ComplexValue::Pair([re, im]) => Complex64::new(re, im),
        }
    }
}

impl Default for ComplexValue {
    fn default() -> Self {
        ComplexValue::Real(1.0)
    }
}

/// A wave vector, written as a number (acting on axis 0) or one entry per axis.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum WaveVector {
    Scalar(f64),
    Vector(Vec<f64>),
}

impl Default for WaveVector {
    fn default() -> Self {
        WaveVector::Scalar(1.0)
    }
}

impl WaveVector {
    fn phase(&self, x: &[f64]) -> f64 {
        match self {
            WaveVector::Scalar(k) => k * x[0],
            WaveVector::Vector(k) => k.iter().zip(x).map(|(k, x)| k * x).sum(),
        }
    }

    fn check(&self, dim: usize) -> anyhow::Result<()> {
        if let WaveVector::Vector(k) = self {
            ensure!(k.len() == dim, "wave vector has {} entries, grid has dim {dim}", k.len());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub index: Vec<u32>,
    pub coeff: ComplexValue,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SymbolSpec {
    Constant {
        #[serde(default)]
        value: ComplexValue,
    },
    /// `Σ c_α p^α` over the listed terms.
    Polynomial { terms: Vec<TermSpec> },
    Cos {
        #[serde(default)]
        k: WaveVector,
    },
    Sin {
        #[serde(default)]
        k: WaveVector,
    },
}

#[derive(Debug, Clone, Copy, Default, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    Dirac,
    #[default]
    Fourier,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum OperatorSpec {
    #[default]
    Identity,
    /// `Σ c_α ∂^α` with constant coefficients.
    Differential { terms: Vec<TermSpec> },
    /// Diagonal in the named family with the given symbol on its index grid.
    Diagonal {
        #[serde(default)]
        family: FamilyKind,
        symbol: SymbolSpec,
    },
    /// Pointwise multiplication by a function of `x`.
    Multiplication { symbol: SymbolSpec },
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DatumSpec {
    #[default]
    Zero,
    Gaussian {
        #[serde(default = "unit_sigma")]
        sigma: f64,
        #[serde(default)]
        center: Option<Vec<f64>>,
    },
    Sin {
        #[serde(default)]
        k: WaveVector,
    },
    Cos {
        #[serde(default)]
        k: WaveVector,
    },
    Constant {
        #[serde(default)]
        value: ComplexValue,
    },
    Delta { point: Vec<f64> },
    /// CSV in the output format; sample rows must follow the grid's row-major order.
    File { path: PathBuf },
}

fn unit_sigma() -> f64 {
    1.0
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub dir: Option<PathBuf>,
}

/// The operator as a symbol on the index grid of a basis family.
pub struct DiagonalForm {
    pub family: SchwartzFamily,
    pub symbol: SymbolFunction,
}

impl RunConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    pub fn grid(&self) -> anyhow::Result<Grid> {
        let g = &self.grid;
        Ok(Grid::new(g.dim, &g.counts, &g.half_extents)?)
    }

    pub fn diagonal_form(&self, grid: &Grid) -> anyhow::Result<DiagonalForm> {
        let dim = grid.dim();
        let (family, symbol) = match &self.operator {
            OperatorSpec::Identity => (SchwartzFamily::fourier(grid), SymbolFunction::one(dim)),
            OperatorSpec::Differential { terms } => {
                let mut spec = DifferentialOperatorSpec::new(dim);
                for t in terms {
                    spec = spec.with_term(&t.index, t.coeff.value())?;
                }
                ensure!(!spec.is_empty(), "differential operator has no terms");
                let family = SchwartzFamily::fourier(grid);
                let symbol = differential_symbol(&spec, family.index_grid())?;
                (family, symbol)
            }
            OperatorSpec::Diagonal { family, symbol } => {
                let family = match family {
                    FamilyKind::Dirac => SchwartzFamily::dirac(grid),
                    FamilyKind::Fourier => SchwartzFamily::fourier(grid),
                };
                (family, symbol.build(dim)?)
            }
            OperatorSpec::Multiplication { symbol } => {
                (SchwartzFamily::dirac(grid), symbol.build(dim)?)
            }
        };
        Ok(DiagonalForm { family, symbol })
    }

    /// Samples the datum; relative file paths resolve against `base`.
    pub fn datum(&self, grid: &Grid, base: &Path) -> anyhow::Result<GridDistribution> {
        let dim = grid.dim();
        let d = match &self.datum {
            DatumSpec::Zero => GridDistribution::zeros(grid),
            DatumSpec::Gaussian { sigma, center } => {
                ensure!(*sigma > 0.0, "gaussian sigma must be positive");
                let center = center.clone().unwrap_or_else(|| vec![0.0; dim]);
                ensure!(center.len() == dim, "gaussian center must have {dim} entries");
                GridDistribution::from_fn(grid, |x| {
                    let r2: f64 = x.iter().zip(&center).map(|(x, c)| (x - c).powi(2)).sum();
                    Complex64::new((-r2 / (2.0 * sigma * sigma)).exp(), 0.0)
                })?
            }
            DatumSpec::Sin { k } => {
                k.check(dim)?;
                GridDistribution::from_fn(grid, |x| Complex64::new(k.phase(x).sin(), 0.0))?
            }
            DatumSpec::Cos { k } => {
                k.check(dim)?;
                GridDistribution::from_fn(grid, |x| Complex64::new(k.phase(x).cos(), 0.0))?
            }
            DatumSpec::Constant { value } => {
                let c = value.value();
                GridDistribution::from_fn(grid, |_| c)?
            }
            DatumSpec::Delta { point } => SchwartzFamily::dirac(grid).member(point)?,
            DatumSpec::File { path } => {
                let path = if path.is_absolute() { path.clone() } else { base.join(path) };
                read_samples(&path, grid)?
            }
        };
        Ok(d)
    }
}

impl SymbolSpec {
    pub fn build(&self, dim: usize) -> anyhow::Result<SymbolFunction> {
        Ok(match self {
            SymbolSpec::Constant { value } => SymbolFunction::constant(dim, value.value()),
            SymbolSpec::Polynomial { terms } => {
                let mut terms_owned = Vec::with_capacity(terms.len());
                for t in terms {
                    ensure!(
                        t.index.len() == dim,
                        "polynomial term {:?} does not match dim {dim}",
                        t.index
                    );
                    terms_owned.push((t.index.clone(), t.coeff.value()));
                }
                SymbolFunction::new(dim, "polynomial", move |p| {
                    terms_owned
                        .iter()
                        .map(|(alpha, c)| {
                            let monomial: f64 = alpha
                                .iter()
                                .zip(p)
                                .map(|(&a, &x)| x.powi(a as i32))
                                .product();
                            c * monomial
                        })
                        .sum()
                })
            }
            SymbolSpec::Cos { k } => {
                k.check(dim)?;
                let k = k.clone();
                SymbolFunction::real(dim, "cos", move |p| k.phase(p).cos())
            }
            SymbolSpec::Sin { k } => {
                k.check(dim)?;
                let k = k.clone();
                SymbolFunction::real(dim, "sin", move |p| k.phase(p).sin())
            }
        })
    }
}

fn read_samples(path: &Path, grid: &Grid) -> anyhow::Result<GridDistribution> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading datum file {}", path.display()))?;
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| anyhow!("datum file is empty"))?;
    let columns = grid.dim() + 2;
    ensure!(
        header.split(',').count() == columns,
        "datum header `{header}` should have {columns} columns"
    );
    let mut samples = Vec::with_capacity(grid.len());
    for (row, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != columns {
            bail!("datum row {} has {} columns, expected {columns}", row + 1, fields.len());
        }
        let parse = |s: &str| {
            s.parse::<f64>()
                .with_context(|| format!("datum row {}: bad number `{s}`", row + 1))
        };
        samples.push(Complex64::new(parse(fields[columns - 2])?, parse(fields[columns - 1])?));
    }
    Ok(GridDistribution::new(grid.clone(), samples)?)
}
