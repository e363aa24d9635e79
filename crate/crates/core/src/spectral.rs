//! Spectral expansion of operators diagonal in a Schwartz family, and the
//! generalized spectral measures built from families, operators and
//! eigenvalue systems.
//!
//! Every measure is a linear map from functions to either a distribution or
//! an operator. Measures over the eigenvalue spectrum `S = a(ℝᵐ)` take
//! [`SpectrumFunction`]s and only ever see them through `f∘a` on the index
//! grid; `S` itself is never materialized.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Result, SpectralError};
use crate::families::{coordinates, superpose, CoordinateDistribution, SchwartzFamily};
use crate::grid::{GridDistribution, SymbolFunction};
use crate::oracle::DenseOperator;
use crate::probes::{band_limited_probes, PROBE_COUNT};
use crate::solver::{differential_symbol, DifferentialOperatorSpec};

/// An S-linear operator on grid distributions.
#[derive(Debug, Clone)]
pub enum SLinearOperator {
    Identity,
    Zero,
    /// `u ↦ ∫ a[u|v] v`.
    DiagonalInFamily {
        family: SchwartzFamily,
        symbol: SymbolFunction,
    },
    /// `u ↦ f·u` on the space grid.
    Multiplication(SymbolFunction),
    /// `Σ c_j ∂^j`, applied through the Fourier family of the argument's grid.
    DifferentialConstCoeff(DifferentialOperatorSpec),
    Dense(DenseOperator),
    /// The coordinate operator `[·|v]`, mapping space-grid data to the index grid.
    Coordinates(SchwartzFamily),
    /// `u ↦ ∫ (w·B(u)) v`.
    Synthesis {
        inner: Box<SLinearOperator>,
        family: SchwartzFamily,
        weight: SymbolFunction,
    },
}

impl SLinearOperator {
    pub fn diagonal(family: &SchwartzFamily, symbol: &SymbolFunction) -> Self {
        Self::DiagonalInFamily {
            family: family.clone(),
            symbol: symbol.clone(),
        }
    }

    pub fn apply(&self, u: &GridDistribution) -> Result<GridDistribution> {
        match self {
            Self::Identity => Ok(u.clone()),
            Self::Zero => Ok(GridDistribution::zeros(u.grid())),
            Self::DiagonalInFamily { family, symbol } => spectral_apply(symbol, family, u),
            Self::Multiplication(f) => u.mul_symbol(f),
            Self::DifferentialConstCoeff(spec) => {
                let fourier = SchwartzFamily::fourier(u.grid());
                let symbol = differential_symbol(spec, fourier.index_grid())?;
                spectral_apply(&symbol, &fourier, u)
            }
            Self::Dense(dense) => dense.apply(u),
            Self::Coordinates(family) => Ok(coordinates(u, family)?.into_inner()),
            Self::Synthesis {
                inner,
                family,
                weight,
            } => {
                let b = inner.apply(u)?;
                superpose(&b.mul_symbol(weight)?, family)
            }
        }
    }
}

/// `A(u) = ∫ (a[u|v]) v` for the operator with eigenfamily `v` and
/// eigenvalue system `a`.
pub fn spectral_apply(
    a: &SymbolFunction,
    v: &SchwartzFamily,
    u: &GridDistribution,
) -> Result<GridDistribution> {
    if a.arity() != v.index_dim() {
        return Err(SpectralError::ArityMismatch {
            expected: v.index_dim(),
            found: a.arity(),
        });
    }
    let c = coordinates(u, v)?;
    superpose(&c.mul_symbol(a)?, v)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenReport {
    pub max_residual: f64,
    /// Index point with the largest residual.
    pub worst_index: Vec<f64>,
    pub tolerance: f64,
    pub checked: usize,
    pub pass: bool,
}

/// Checks `A(v_p) = a(p) v_p` over every index point.
pub fn is_eigenfamily(
    op: &SLinearOperator,
    v: &SchwartzFamily,
    a: &SymbolFunction,
    tol: f64,
) -> Result<EigenReport> {
    eigen_residuals(op, v, a, tol, None)
}

/// As [`is_eigenfamily`], restricted to index points with `max |pᵢ| ≤ band`.
pub fn is_eigenfamily_in_band(
    op: &SLinearOperator,
    v: &SchwartzFamily,
    a: &SymbolFunction,
    tol: f64,
    band: f64,
) -> Result<EigenReport> {
    eigen_residuals(op, v, a, tol, Some(band))
}

fn eigen_residuals(
    op: &SLinearOperator,
    v: &SchwartzFamily,
    a: &SymbolFunction,
    tol: f64,
    band: Option<f64>,
) -> Result<EigenReport> {
    let index = v.index_grid();
    let values = a.sample(index)?;
    let mut worst = (0.0_f64, Vec::new());
    let mut checked = 0;
    for (k, &value) in values.iter().enumerate() {
        let p = index.point(k);
        if let Some(band) = band {
            if p.iter().any(|x| x.abs() > band) {
                continue;
            }
        }
        let member = v.member_at(k);
        let image = op.apply(&member)?;
        let expected = member.scale(value);
        let residual = image.sub(&expected)?.sup_norm() / member.sup_norm().max(1.0);
        checked += 1;
        if residual > worst.0 || worst.1.is_empty() {
            worst = (residual, p);
        }
    }
    Ok(EigenReport {
        max_residual: worst.0,
        worst_index: worst.1,
        tolerance: tol,
        checked,
        pass: worst.0 <= tol,
    })
}

/// Reads off `a(p)` from the action of `op` on each member, via the
/// concentrated coordinates `[v_p|v] = δ_p/Δp`.
pub fn eigenvalues_on_members(
    op: &SLinearOperator,
    v: &SchwartzFamily,
) -> Result<GridDistribution> {
    let index = v.index_grid();
    let dp = index.quadrature_weight();
    let mut values = Vec::with_capacity(index.len());
    for k in 0..index.len() {
        let image = op.apply(&v.member_at(k))?;
        values.push(coordinates(&image, v)?.samples()[k] * dp);
    }
    GridDistribution::new(index.clone(), values)
}

/// Maximum of `‖A(u) − B(u)‖∞ / ‖u‖∞` over the members of `family`
/// plus [`PROBE_COUNT`] seeded band-limited probes on its space grid.
pub fn probe_discrepancy(
    lhs: &SLinearOperator,
    rhs: &SLinearOperator,
    family: &SchwartzFamily,
    seed: u64,
) -> Result<f64> {
    let mut probes: Vec<GridDistribution> =
        (0..family.index_grid().len()).map(|k| family.member_at(k)).collect();
    probes.extend(band_limited_probes(family.space_grid(), PROBE_COUNT, seed));
    let mut worst = 0.0_f64;
    for u in &probes {
        let scale = u.sup_norm();
        if scale == 0.0 {
            continue;
        }
        let diff = lhs.apply(u)?.sub(&rhs.apply(u)?)?.sup_norm();
        worst = worst.max(diff / scale);
    }
    Ok(worst)
}

/// Operator equality by probing on members and random band-limited data.
pub fn operators_agree(
    lhs: &SLinearOperator,
    rhs: &SLinearOperator,
    family: &SchwartzFamily,
    seed: u64,
    tol: f64,
) -> Result<bool> {
    Ok(probe_discrepancy(lhs, rhs, family, seed)? <= tol)
}

type SpectrumFn = dyn Fn(Complex64) -> Complex64 + Send + Sync;

/// A function on the eigenvalue spectrum, consumed only through `f∘a`.
#[derive(Clone)]
pub struct SpectrumFunction {
    descriptor: String,
    eval: Arc<SpectrumFn>,
}

impl fmt::Debug for SpectrumFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("SpectrumFunction").field(&self.descriptor).finish()
    }
}

impl SpectrumFunction {
    pub fn new(
        descriptor: impl Into<String>,
        eval: impl Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            descriptor: descriptor.into(),
            eval: Arc::new(eval),
        }
    }

    /// `j_S`, the canonical injection of the spectrum into ℂ.
    pub fn identity() -> Self {
        Self::new("j_S", |s| s)
    }

    /// `1_S`.
    pub fn one() -> Self {
        Self::new("1_S", |_| Complex64::new(1.0, 0.0))
    }

    pub fn descriptor(&self) -> &str {
        &self.descriptor
    }

    pub fn eval(&self, s: Complex64) -> Complex64 {
        (self.eval)(s)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (f, g) = (self.eval.clone(), other.eval.clone());
        Self::new(
            format!("({})·({})", self.descriptor, other.descriptor),
            move |s| f(s) * g(s),
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        let (f, g) = (self.eval.clone(), other.eval.clone());
        Self::new(
            format!("({})+({})", self.descriptor, other.descriptor),
            move |s| f(s) + g(s),
        )
    }

    /// `f∘a`.
    pub fn compose(&self, a: &SymbolFunction) -> SymbolFunction {
        let f = self.eval.clone();
        let inner = a.clone();
        SymbolFunction::new(
            a.arity(),
            format!("({})∘({})", self.descriptor, a.descriptor()),
            move |p| f(inner.eval(p)),
        )
    }
}

/// Argument of a generalized measure.
#[derive(Debug, Clone)]
pub enum MeasureArg {
    /// A function on the index space ℝᵐ.
    Symbol(SymbolFunction),
    /// A function on the eigenvalue spectrum.
    Spectrum(SpectrumFunction),
}

impl MeasureArg {
    fn mul(&self, other: &Self) -> Result<Self> {
        match (self, other) {
            (Self::Symbol(f), Self::Symbol(g)) => Ok(Self::Symbol(f.mul(g)?)),
            (Self::Spectrum(f), Self::Spectrum(g)) => Ok(Self::Spectrum(f.mul(g))),
            _ => Err(SpectralError::ArgumentMismatch(
                "cannot multiply an index-space function with a spectrum function".into(),
            )),
        }
    }
}

impl From<SymbolFunction> for MeasureArg {
    fn from(f: SymbolFunction) -> Self {
        Self::Symbol(f)
    }
}

impl From<SpectrumFunction> for MeasureArg {
    fn from(f: SpectrumFunction) -> Self {
        Self::Spectrum(f)
    }
}

/// Which functions a measure accepts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasureDomain {
    Index { arity: usize },
    Spectrum,
}

/// Value of a measure at a function.
#[derive(Debug, Clone)]
pub enum MeasureValue {
    Distribution(GridDistribution),
    Operator(SLinearOperator),
}

impl MeasureValue {
    pub fn as_operator(&self) -> Result<&SLinearOperator> {
        match self {
            Self::Operator(op) => Ok(op),
            Self::Distribution(_) => Err(SpectralError::ArgumentMismatch(
                "measure value is a distribution, not an operator".into(),
            )),
        }
    }

    pub fn as_distribution(&self) -> Result<&GridDistribution> {
        match self {
            Self::Distribution(d) => Ok(d),
            Self::Operator(_) => Err(SpectralError::ArgumentMismatch(
                "measure value is an operator, not a distribution".into(),
            )),
        }
    }

    /// Applies an operator value to `u`.
    pub fn apply(&self, u: &GridDistribution) -> Result<GridDistribution> {
        self.as_operator()?.apply(u)
    }
}

#[derive(Debug, Clone)]
pub enum GeneralizedMeasure {
    /// `μ_v : f ↦ ∫ (f[·|v]) v`.
    Basis(SchwartzFamily),
    /// `(B.v) : f ↦ ∫ (f·B(·)) v`.
    SpectralProduct {
        operator: SLinearOperator,
        family: SchwartzFamily,
    },
    /// `(g.μ) : f ↦ μ(g f)`.
    Scaled {
        weight: MeasureArg,
        inner: Box<GeneralizedMeasure>,
    },
    /// `μ_a(u, v) : f ↦ (f∘a)[u|v]`; coordinates cached at construction.
    EigenspectrumVector {
        coordinates: CoordinateDistribution,
        family: SchwartzFamily,
        symbol: SymbolFunction,
    },
    /// `μ_(a,v) : f ↦ ∫ (f∘a)[·|v] v`.
    EigenspectrumOperator {
        symbol: SymbolFunction,
        family: SchwartzFamily,
    },
}

impl GeneralizedMeasure {
    pub fn domain(&self) -> MeasureDomain {
        match self {
            Self::Basis(v) => MeasureDomain::Index {
                arity: v.index_dim(),
            },
            Self::SpectralProduct { family, .. } => MeasureDomain::Index {
                arity: family.index_dim(),
            },
            Self::Scaled { inner, .. } => inner.domain(),
            Self::EigenspectrumVector { .. } | Self::EigenspectrumOperator { .. } => {
                MeasureDomain::Spectrum
            }
        }
    }

    fn expect_symbol<'a>(&self, arg: &'a MeasureArg, arity: usize) -> Result<&'a SymbolFunction> {
        match arg {
            MeasureArg::Symbol(f) if f.arity() == arity => Ok(f),
            MeasureArg::Symbol(f) => Err(SpectralError::ArityMismatch {
                expected: arity,
                found: f.arity(),
            }),
            MeasureArg::Spectrum(_) => Err(SpectralError::ArgumentMismatch(
                "measure on the index space evaluated at a spectrum function".into(),
            )),
        }
    }

    fn expect_spectrum<'a>(&self, arg: &'a MeasureArg) -> Result<&'a SpectrumFunction> {
        match arg {
            MeasureArg::Spectrum(f) => Ok(f),
            MeasureArg::Symbol(_) => Err(SpectralError::ArgumentMismatch(
                "measure on the eigenvalue spectrum evaluated at an index-space function".into(),
            )),
        }
    }

    pub fn evaluate(&self, arg: &MeasureArg) -> Result<MeasureValue> {
        match self {
            Self::Basis(v) => {
                let f = self.expect_symbol(arg, v.index_dim())?;
                Ok(MeasureValue::Operator(SLinearOperator::diagonal(v, f)))
            }
            Self::SpectralProduct { operator, family } => {
                let f = self.expect_symbol(arg, family.index_dim())?;
                Ok(MeasureValue::Operator(SLinearOperator::Synthesis {
                    inner: Box::new(operator.clone()),
                    family: family.clone(),
                    weight: f.clone(),
                }))
            }
            Self::Scaled { weight, inner } => inner.evaluate(&weight.mul(arg)?),
            Self::EigenspectrumVector {
                coordinates,
                symbol,
                ..
            } => {
                let f = self.expect_spectrum(arg)?;
                Ok(MeasureValue::Distribution(
                    coordinates.mul_symbol(&f.compose(symbol))?,
                ))
            }
            Self::EigenspectrumOperator { symbol, family } => {
                let f = self.expect_spectrum(arg)?;
                Ok(MeasureValue::Operator(SLinearOperator::diagonal(
                    family,
                    &f.compose(symbol),
                )))
            }
        }
    }

    /// The unit function of this measure's domain.
    pub fn unit(&self) -> MeasureArg {
        match self.domain() {
            MeasureDomain::Index { arity } => MeasureArg::Symbol(SymbolFunction::one(arity)),
            MeasureDomain::Spectrum => MeasureArg::Spectrum(SpectrumFunction::one()),
        }
    }
}

/// `μ_v`, defined for basis families.
pub fn spectral_distribution(v: &SchwartzFamily) -> Result<GeneralizedMeasure> {
    if !v.is_basis() {
        return Err(SpectralError::NotABasis(format!(
            "{} family is not flagged as a basis",
            v.kind()
        )));
    }
    Ok(GeneralizedMeasure::Basis(v.clone()))
}

/// `(B.v)`; `B` must map the family's space grid to its index grid, which is
/// checked lazily when the resulting operators are applied.
pub fn spectral_product(b: &SLinearOperator, v: &SchwartzFamily) -> Result<GeneralizedMeasure> {
    if let SLinearOperator::Coordinates(w) = b {
        v.index_grid().ensure_same(w.index_grid(), "spectral product")?;
        v.space_grid().ensure_same(w.space_grid(), "spectral product")?;
    }
    if let SLinearOperator::Dense(d) = b {
        v.index_grid().ensure_same(d.grid(), "spectral product")?;
    }
    Ok(GeneralizedMeasure::SpectralProduct {
        operator: b.clone(),
        family: v.clone(),
    })
}

/// `g.μ`.
pub fn scale_measure(g: &MeasureArg, mu: &GeneralizedMeasure) -> Result<GeneralizedMeasure> {
    match (g, mu.domain()) {
        (MeasureArg::Symbol(f), MeasureDomain::Index { arity }) if f.arity() != arity => {
            return Err(SpectralError::ArityMismatch {
                expected: arity,
                found: f.arity(),
            })
        }
        (MeasureArg::Symbol(_), MeasureDomain::Spectrum)
        | (MeasureArg::Spectrum(_), MeasureDomain::Index { .. }) => {
            return Err(SpectralError::ArgumentMismatch(
                "weight and measure live on different domains".into(),
            ))
        }
        _ => {}
    }
    Ok(GeneralizedMeasure::Scaled {
        weight: g.clone(),
        inner: Box::new(mu.clone()),
    })
}

/// `∫ μ = μ(1)`.
pub fn integrate_measure(mu: &GeneralizedMeasure) -> Result<MeasureValue> {
    mu.evaluate(&mu.unit())
}

/// `μ_a(u, v)`.
pub fn eigenspectrum_measure(
    u: &GridDistribution,
    v: &SchwartzFamily,
    a: &SymbolFunction,
) -> Result<GeneralizedMeasure> {
    if a.arity() != v.index_dim() {
        return Err(SpectralError::ArityMismatch {
            expected: v.index_dim(),
            found: a.arity(),
        });
    }
    Ok(GeneralizedMeasure::EigenspectrumVector {
        coordinates: coordinates(u, v)?,
        family: v.clone(),
        symbol: a.clone(),
    })
}

/// `μ_(a,v)`, defined for basis families.
pub fn operator_spectral_measure(
    a: &SymbolFunction,
    v: &SchwartzFamily,
) -> Result<GeneralizedMeasure> {
    if !v.is_basis() {
        return Err(SpectralError::NotABasis(format!(
            "{} family is not flagged as a basis",
            v.kind()
        )));
    }
    if a.arity() != v.index_dim() {
        return Err(SpectralError::ArityMismatch {
            expected: v.index_dim(),
            found: a.arity(),
        });
    }
    Ok(GeneralizedMeasure::EigenspectrumOperator {
        symbol: a.clone(),
        family: v.clone(),
    })
}
