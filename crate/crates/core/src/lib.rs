//! Spectral calculus over continuous eigenfamilies, discretized on uniform
//! grids.
//!
//! A [`grid::Grid`] stands in for ℝⁿ and a [`grid::GridDistribution`] for a
//! tempered distribution. A [`families::SchwartzFamily`] (Dirac, Fourier or
//! an explicit kernel) maps index points to distributions; coordinates and
//! superposition move between the two sides. On top of that sit spectral
//! expansion and generalized spectral measures ([`spectral`]), division
//! solvers for operators diagonal in a basis ([`solver`]), Green families
//! ([`green`]) and brute-force reference operators ([`oracle`]).

pub mod error;
mod fft;
pub mod families;
pub mod green;
pub mod grid;
pub mod oracle;
pub mod probes;
pub mod solver;
pub mod spectral;
pub mod verify;


pub use error::{Result, SpectralError};
pub use families::{
    coordinates, family_product, scale_family, superpose, CoordinateDistribution, SchwartzFamily,
};
pub use green::{green_family, green_family_divided, left_inverse_family, GreenFamilyResult};
pub use grid::{dual_grid, make_grid, quadrature_weight, Grid, GridDistribution, SymbolFunction};
pub use oracle::{dense_from_diagonal, finite_difference, DenseOperator};
pub use solver::{
    differential_symbol, divide, solve, solve_pde, DifferentialOperatorSpec, DivisionPolicy,
    Solution,
};
pub use spectral::{
    eigenspectrum_measure, integrate_measure, is_eigenfamily, operator_spectral_measure,
    scale_measure, spectral_apply, spectral_distribution, spectral_product, GeneralizedMeasure,
    MeasureArg, MeasureValue, SLinearOperator, SpectrumFunction,
};

pub use num_complex::Complex64;
