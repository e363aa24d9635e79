//! Green families `G` with `L(G_p) = δ_p`, built from an eigenfamily `λ` of
//! `L` with eigenvalue system `l` and a left inverse `μ` (`μ.λ = δ`).
//!
//! Two constructions:
//!
//! * `l` invertible: `G_p = ∫ (1/l) μ_p λ`.
//! * `μ_p` divisible by `l`: `G_p = ∫ ν_p λ` with `l ν_p = μ_p`.
//!
//! Because deltas cannot be compared pointwise on a grid, each member is
//! checked weakly: `r_p = max_φ |⟨L G_p, φ⟩ − φ(p)|` over Gaussian probes.

use num_complex::Complex64;

use crate::error::{Result, SpectralError};
use crate::families::{coordinates, superpose, SchwartzFamily};
use crate::grid::{GridDistribution, SymbolFunction};
use crate::probes::{gaussian_probe_set, GaussianProbe};
use crate::solver::{divide, DivisionPolicy};
use crate::spectral::spectral_apply;

#[derive(Debug, Clone)]
pub struct GreenFamilyResult {
    /// Kernel family indexed by `μ`'s index grid, members on `λ`'s space grid.
    pub family: SchwartzFamily,
    /// Weak residual `r_p` per index point, in row-major order.
    pub residuals: Vec<f64>,
}

impl GreenFamilyResult {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().cloned().fold(0.0, f64::max)
    }
}

/// The coordinate family of deltas, `μ_p = [δ_p|λ]`, so that `μ.λ = δ`.
pub fn left_inverse_family(lambda: &SchwartzFamily) -> Result<SchwartzFamily> {
    if !lambda.is_basis() {
        return Err(SpectralError::NotABasis(format!(
            "{} family has no canonical left inverse",
            lambda.kind()
        )));
    }
    let space = lambda.space_grid();
    let delta = SchwartzFamily::dirac(space);
    let mu = SchwartzFamily::kernel_from_members(space, lambda.index_grid(), |k| {
        Ok(coordinates(&delta.member_at(k), lambda)?.into_inner())
    })?;
    Ok(mu.flagged_basis())
}

/// Weak residuals `max_φ |⟨L G_p, φ⟩ − φ(p)|` with `L` applied spectrally.
pub fn weak_residuals(
    green: &SchwartzFamily,
    lambda: &SchwartzFamily,
    l: &SymbolFunction,
    probes: &[GaussianProbe],
) -> Result<Vec<f64>> {
    let space = lambda.space_grid();
    let sampled: Vec<GridDistribution> = probes.iter().map(|p| p.sample(space)).collect();
    let index = green.index_grid();
    (0..index.len())
        .map(|k| {
            let p = index.point(k);
            let applied = spectral_apply(l, lambda, &green.member_at(k))?;
            let mut worst = 0.0_f64;
            for (probe, phi) in probes.iter().zip(&sampled) {
                let pairing = applied.pairing(phi)?;
                worst = worst.max((pairing - Complex64::new(probe.eval(&p), 0.0)).norm());
            }
            Ok(worst)
        })
        .collect()
}

fn check_compatible(lambda: &SchwartzFamily, mu: &SchwartzFamily) -> Result<()> {
    mu.space_grid()
        .ensure_same(lambda.index_grid(), "left inverse family")?;
    mu.index_grid()
        .ensure_same(lambda.space_grid(), "left inverse family")
}

/// `G_p = ∫ (1/l) μ_p λ`, requiring `|l| > ε_div` on the whole index grid.
pub fn green_family(
    lambda: &SchwartzFamily,
    l: &SymbolFunction,
    mu: &SchwartzFamily,
) -> Result<GreenFamilyResult> {
    green_family_with_policy(lambda, l, mu, &DivisionPolicy::default())
}

pub fn green_family_with_policy(
    lambda: &SchwartzFamily,
    l: &SymbolFunction,
    mu: &SchwartzFamily,
    policy: &DivisionPolicy,
) -> Result<GreenFamilyResult> {
    policy.validate()?;
    check_compatible(lambda, mu)?;
    let values = l.sample(lambda.index_grid())?;
    let max = values.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let cutoff = policy.zero_cutoff(max);
    if let Some((k, z)) = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
    {
        if z.norm() <= cutoff {
            return Err(SpectralError::NotInvertible {
                worst_index: k,
                point: lambda.index_grid().point(k),
                symbol_magnitude: z.norm(),
            });
        }
    }
    let inverse = l.recip();
    let family = SchwartzFamily::kernel_from_members(mu.index_grid(), lambda.space_grid(), |k| {
        superpose(&mu.member_at(k).mul_symbol(&inverse)?, lambda)
    })?;
    let residuals = weak_residuals(&family, lambda, l, &gaussian_probe_set(lambda.space_grid()))?;
    Ok(GreenFamilyResult {
        family,
        residuals,
    })
}

/// `G_p = ∫ ν_p λ` with `ν_p` the thresholded quotient of `μ_p` by `l`.
pub fn green_family_divided(
    lambda: &SchwartzFamily,
    l: &SymbolFunction,
    mu: &SchwartzFamily,
    policy: &DivisionPolicy,
) -> Result<GreenFamilyResult> {
    policy.validate()?;
    check_compatible(lambda, mu)?;
    let nu = SchwartzFamily::kernel_from_members(mu.index_grid(), mu.space_grid(), |k| {
        Ok(divide(&mu.member_at(k), l, policy)?.into_inner())
    })?;
    // every ν_p is a grid sample here, so G is the product family ν.λ
    let family = crate::families::family_product(&nu, lambda)?;
    let residuals = weak_residuals(&family, lambda, l, &gaussian_probe_set(lambda.space_grid()))?;
    Ok(GreenFamilyResult {
        family,
        residuals,
    })
}
