//! Schwartz families indexed by a grid, the coordinate operator `[·|v]`,
//! superposition `∫ c v`, and the product of families.
//!
//! Conventions (fixed across the crate):
//!
//! * Dirac: `δ_p` is the nearest-node delta with value `1/Δx` at `p`, so the
//!   quadrature pairing `⟨δ_p, φ⟩` returns `φ(p)` exactly.
//! * Fourier: members `v_p(x) = e^{-i(p|x)}` indexed by the dual grid, with
//!   coordinates `c(p) = (2π)^{-n} Σₖ u(xₖ) e^{+i(p|xₖ)} Δx`.
//! * Kernel: explicit samples `K[p, x]`; coordinates are the least-squares
//!   solution of `Σ_p c(p) K[p, ·] Δp = u`.

use std::fmt;
use std::ops::Deref;
use std::sync::{Arc, OnceLock};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Result, SpectralError};
use crate::fft;
use crate::grid::{Grid, GridDistribution, SymbolFunction};

/// Condition estimate past which kernel coordinates are refused.
pub const DEFAULT_CONDITION_LIMIT: f64 = 1e8;

/// Coefficients of a distribution with respect to a family, living on the
/// family's index grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CoordinateDistribution(GridDistribution);

impl CoordinateDistribution {
    pub fn new(inner: GridDistribution) -> Self {
        Self(inner)
    }

    pub fn into_inner(self) -> GridDistribution {
        self.0
    }

    pub fn as_distribution(&self) -> &GridDistribution {
        &self.0
    }
}

impl Deref for CoordinateDistribution {
    type Target = GridDistribution;

    fn deref(&self) -> &GridDistribution {
        &self.0
    }
}

impl From<GridDistribution> for CoordinateDistribution {
    fn from(inner: GridDistribution) -> Self {
        Self(inner)
    }
}

/// Family given by explicit member samples, row `p` holding `member(p)`.
pub struct KernelFamily {
    index: Grid,
    space: Grid,
    kernel: Vec<Complex64>,
    basis: bool,
    condition_limit: f64,
    // Pseudo-inverse of the synthesis matrix, built on first use.
    analysis: OnceLock<std::result::Result<DMatrix<Complex64>, SpectralError>>,
}

impl fmt::Debug for KernelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KernelFamily")
            .field("index", &self.index)
            .field("space", &self.space)
            .field("basis", &self.basis)
            .field("condition_limit", &self.condition_limit)
            .finish_non_exhaustive()
    }
}

impl KernelFamily {
    pub fn index_grid(&self) -> &Grid {
        &self.index
    }

    pub fn space_grid(&self) -> &Grid {
        &self.space
    }

    /// Row-major `(index count) × (space count)` samples.
    pub fn kernel(&self) -> &[Complex64] {
        &self.kernel
    }

    pub fn row(&self, k: usize) -> &[Complex64] {
        let width = self.space.len();
        &self.kernel[k * width..(k + 1) * width]
    }

    pub fn condition_limit(&self) -> f64 {
        self.condition_limit
    }

    fn synthesis_matrix(&self) -> DMatrix<Complex64> {
        let dp = self.index.quadrature_weight();
        DMatrix::from_fn(self.space.len(), self.index.len(), |x, p| {
            self.row(p)[x] * dp
        })
    }

    /// Condition estimate `σ_max/σ_min` of the synthesis matrix.
    pub fn condition_estimate(&self) -> f64 {
        let svd = self.synthesis_matrix().svd(false, false);
        condition_of(svd.singular_values.as_slice())
    }

    fn analysis(&self) -> Result<&DMatrix<Complex64>> {
        self.analysis
            .get_or_init(|| {
                let svd = self.synthesis_matrix().svd(true, true);
                let condition = condition_of(svd.singular_values.as_slice());
                if condition.is_nan() || condition > self.condition_limit {
                    return Err(SpectralError::IllConditioned {
                        condition,
                        limit: self.condition_limit,
                    });
                }
                svd.pseudo_inverse(0.0)
                    .map_err(|_| SpectralError::IllConditioned {
                        condition: f64::INFINITY,
                        limit: self.condition_limit,
                    })
            })
            .as_ref()
            .map_err(Clone::clone)
    }
}

fn condition_of(singular_values: &[f64]) -> f64 {
    let max = singular_values.iter().cloned().fold(0.0, f64::max);
    let min = singular_values.iter().cloned().fold(f64::INFINITY, f64::min);
    if max == 0.0 || min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

#[derive(Debug, Clone)]
pub enum SchwartzFamily {
    /// Nearest-node deltas on a grid; index grid and space grid coincide.
    Dirac(Grid),
    /// `e^{-i(p|x)}` with `p` on the dual of the space grid.
    Fourier { space: Grid, index: Grid },
    Kernel(Arc<KernelFamily>),
}

impl SchwartzFamily {
    pub fn dirac(grid: &Grid) -> Self {
        Self::Dirac(grid.clone())
    }

    pub fn fourier(space: &Grid) -> Self {
        Self::Fourier {
            space: space.clone(),
            index: space.dual(),
        }
    }

    /// Family with member `p` equal to row `p` of `kernel` (index-major).
    pub fn kernel(index: &Grid, space: &Grid, kernel: Vec<Complex64>) -> Result<Self> {
        Self::kernel_with_limit(index, space, kernel, DEFAULT_CONDITION_LIMIT)
    }

    pub fn kernel_with_limit(
        index: &Grid,
        space: &Grid,
        kernel: Vec<Complex64>,
        condition_limit: f64,
    ) -> Result<Self> {
        if kernel.len() != index.len() * space.len() {
            return Err(SpectralError::GridMismatch(format!(
                "kernel has {} samples, expected {} x {}",
                kernel.len(),
                index.len(),
                space.len()
            )));
        }
        if let Some(k) = kernel.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(SpectralError::NonFinite(format!("kernel sample {k}")));
        }
        Ok(Self::Kernel(Arc::new(KernelFamily {
            index: index.clone(),
            space: space.clone(),
            kernel,
            basis: false,
            condition_limit,
            analysis: OnceLock::new(),
        })))
    }

    /// Builds a kernel family row by row.
    pub fn kernel_from_members(
        index: &Grid,
        space: &Grid,
        mut member: impl FnMut(usize) -> Result<GridDistribution>,
    ) -> Result<Self> {
        let mut kernel = Vec::with_capacity(index.len() * space.len());
        for k in 0..index.len() {
            let row = member(k)?;
            space.ensure_same(row.grid(), "kernel member")?;
            kernel.extend_from_slice(row.samples());
        }
        Self::kernel(index, space, kernel)
    }

    /// Flags a family as a basis without checking it.
    pub fn flagged_basis(self) -> Self {
        match self {
            Self::Kernel(k) => {
                let k = Arc::try_unwrap(k).unwrap_or_else(|shared| KernelFamily {
                    index: shared.index.clone(),
                    space: shared.space.clone(),
                    kernel: shared.kernel.clone(),
                    basis: shared.basis,
                    condition_limit: shared.condition_limit,
                    analysis: OnceLock::new(),
                });
                Self::Kernel(Arc::new(KernelFamily { basis: true, ..k }))
            }
            other => other,
        }
    }

    /// Flags a kernel family as a basis after checking that its synthesis
    /// matrix is square and within the condition limit.
    pub fn verified_basis(self) -> Result<Self> {
        if let Self::Kernel(k) = &self {
            if k.index.len() != k.space.len() {
                return Err(SpectralError::NotABasis(format!(
                    "{} index points against {} space points",
                    k.index.len(),
                    k.space.len()
                )));
            }
            k.analysis()?;
        }
        Ok(self.flagged_basis())
    }

    pub fn is_basis(&self) -> bool {
        match self {
            Self::Dirac(_) | Self::Fourier { .. } => true,
            Self::Kernel(k) => k.basis,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Dirac(_) => "dirac",
            Self::Fourier { .. } => "fourier",
            Self::Kernel(_) => "kernel",
        }
    }

    pub fn index_grid(&self) -> &Grid {
        match self {
            Self::Dirac(g) => g,
            Self::Fourier { index, .. } => index,
            Self::Kernel(k) => &k.index,
        }
    }

    pub fn space_grid(&self) -> &Grid {
        match self {
            Self::Dirac(g) => g,
            Self::Fourier { space, .. } => space,
            Self::Kernel(k) => &k.space,
        }
    }

    pub fn index_dim(&self) -> usize {
        self.index_grid().dim()
    }

    pub fn space_dim(&self) -> usize {
        self.space_grid().dim()
    }

    /// Member at flat index `k` of the index grid.
    pub fn member_at(&self, k: usize) -> GridDistribution {
        match self {
            Self::Dirac(g) => GridDistribution::unit(g, k).scale(Complex64::new(
                1.0 / g.quadrature_weight(),
                0.0,
            )),
            Self::Fourier { space, index } => {
                let p = index.point(k);
                let samples = (0..space.len())
                    .map(|l| {
                        let x = space.point(l);
                        let phase: f64 = p.iter().zip(&x).map(|(a, b)| a * b).sum();
                        Complex64::from_polar(1.0, -phase)
                    })
                    .collect();
                GridDistribution::from_parts(space.clone(), samples)
            }
            Self::Kernel(kf) => GridDistribution::from_parts(kf.space.clone(), kf.row(k).to_vec()),
        }
    }

    /// Member `v_p` for an index point `p` of the index grid.
    pub fn member(&self, p: &[f64]) -> Result<GridDistribution> {
        let k = self.index_grid().locate(p)?;
        Ok(self.member_at(k))
    }

    pub fn coordinates(&self, u: &GridDistribution) -> Result<CoordinateDistribution> {
        coordinates(u, self)
    }

    pub fn superpose(&self, c: &GridDistribution) -> Result<GridDistribution> {
        superpose(c, self)
    }
}

/// `[u|v]`: coefficients `c` on the index grid with `∫ c v = u`.
pub fn coordinates(u: &GridDistribution, v: &SchwartzFamily) -> Result<CoordinateDistribution> {
    v.space_grid().ensure_same(u.grid(), "coordinates")?;
    let c = match v {
        SchwartzFamily::Dirac(_) => u.clone(),
        SchwartzFamily::Fourier { space, index } => {
            GridDistribution::from_parts(index.clone(), fft::forward(u.samples(), space))
        }
        SchwartzFamily::Kernel(kf) => {
            let pinv = kf.analysis()?;
            let rhs = DVector::from_column_slice(u.samples());
            let c = pinv * rhs;
            GridDistribution::from_parts(kf.index.clone(), c.as_slice().to_vec())
        }
    };
    Ok(CoordinateDistribution(c))
}

/// `∫ c v = Σ_p c(p) v_p Δp`.
pub fn superpose(c: &GridDistribution, v: &SchwartzFamily) -> Result<GridDistribution> {
    v.index_grid().ensure_same(c.grid(), "superpose")?;
    Ok(match v {
        SchwartzFamily::Dirac(_) => c.clone(),
        SchwartzFamily::Fourier { space, .. } => {
            GridDistribution::from_parts(space.clone(), fft::inverse(c.samples(), space))
        }
        SchwartzFamily::Kernel(kf) => {
            let dp = kf.index.quadrature_weight();
            let mut out = vec![Complex64::new(0.0, 0.0); kf.space.len()];
            for (k, &ck) in c.samples().iter().enumerate() {
                if ck == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let w = ck * dp;
                for (slot, &m) in out.iter_mut().zip(kf.row(k)) {
                    *slot += w * m;
                }
            }
            GridDistribution::from_parts(kf.space.clone(), out)
        }
    })
}

/// The family `p ↦ a(p)·v_p`.
pub fn scale_family(a: &SymbolFunction, v: &SchwartzFamily) -> Result<SchwartzFamily> {
    if a.arity() != v.index_dim() {
        return Err(SpectralError::ArityMismatch {
            expected: v.index_dim(),
            found: a.arity(),
        });
    }
    let values = a.sample(v.index_grid())?;
    SchwartzFamily::kernel_from_members(v.index_grid(), v.space_grid(), |k| {
        Ok(v.member_at(k).scale(values[k]))
    })
}

/// The product family `μ.λ` with members `∫ μ_p λ`.
pub fn family_product(mu: &SchwartzFamily, lambda: &SchwartzFamily) -> Result<SchwartzFamily> {
    mu.space_grid()
        .ensure_same(lambda.index_grid(), "family product")?;
    SchwartzFamily::kernel_from_members(mu.index_grid(), lambda.space_grid(), |k| {
        superpose(&mu.member_at(k), lambda)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn gaussian(grid: &Grid) -> GridDistribution {
        GridDistribution::from_fn(grid, |x| c((-x[0] * x[0]).exp(), 0.0)).unwrap()
    }

    #[test]
    fn dirac_member_at_origin() {
        let g = Grid::line(8, PI).unwrap();
        let d = SchwartzFamily::dirac(&g).member(&[0.0]).unwrap();
        for (k, z) in d.samples().iter().enumerate() {
            let expected = if k == 4 { 4.0 / PI } else { 0.0 };
            assert!((z.re - expected).abs() < 1e-14 && z.im == 0.0);
        }
        // quadrature oracle: pairing reproduces point evaluation
        let phi = GridDistribution::from_fn(&g, |x| c(x[0].cos() + 2.0, 0.0)).unwrap();
        let pairing = d.pairing(&phi).unwrap();
        assert!((pairing - c(3.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn fourier_member_is_plane_wave() {
        let g = Grid::line(16, PI).unwrap();
        let v = SchwartzFamily::fourier(&g);
        let m = v.member(&[3.0]).unwrap();
        for (x, z) in g.axis_points(0).iter().zip(m.samples()) {
            assert!((z - Complex64::from_polar(1.0, -3.0 * x)).norm() < 1e-14);
        }
        assert!(matches!(
            v.member(&[0.5]),
            Err(SpectralError::IndexOffGrid { .. })
        ));
    }

    #[test]
    fn zero_kernel_members_vanish() {
        let g = Grid::line(4, 1.0).unwrap();
        let v = SchwartzFamily::kernel(&g, &g, vec![c(0.0, 0.0); 16]).unwrap();
        assert_eq!(v.member(&[0.0]).unwrap().sup_norm(), 0.0);
    }

    #[test]
    fn dirac_coordinates_are_identity() {
        let g = Grid::line(32, 4.0).unwrap();
        let u = gaussian(&g);
        let v = SchwartzFamily::dirac(&g);
        assert_eq!(coordinates(&u, &v).unwrap().as_distribution(), &u);
        assert_eq!(superpose(&u, &v).unwrap(), u);
    }

    #[test]
    fn fourier_member_coordinates_concentrate() {
        let g = Grid::line(32, 3.0).unwrap();
        let v = SchwartzFamily::fourier(&g);
        let p0 = v.index_grid().point(19);
        let c0 = coordinates(&v.member(&p0).unwrap(), &v).unwrap();
        let dp = v.index_grid().quadrature_weight();
        for (k, z) in c0.samples().iter().enumerate() {
            let expected = if k == 19 { 1.0 / dp } else { 0.0 };
            assert!((z - c(expected, 0.0)).norm() < 1e-12, "k={k} z={z}");
        }
    }

    #[test]
    fn single_mass_superposes_to_member() {
        let g = Grid::line(16, 2.0).unwrap();
        let v = SchwartzFamily::fourier(&g);
        let dp = v.index_grid().quadrature_weight();
        let mass = GridDistribution::unit(v.index_grid(), 5).scale(c(1.0 / dp, 0.0));
        let u = superpose(&mass, &v).unwrap();
        assert!(u.relative_sup_error(&v.member_at(5)).unwrap() < 1e-13);
    }

    #[test]
    fn zero_in_zero_out() {
        let g = Grid::line(16, 2.0).unwrap();
        for v in [SchwartzFamily::dirac(&g), SchwartzFamily::fourier(&g)] {
            let z = GridDistribution::zeros(&g);
            assert_eq!(coordinates(&z, &v).unwrap().sup_norm(), 0.0);
            assert_eq!(superpose(&GridDistribution::zeros(v.index_grid()), &v).unwrap().sup_norm(), 0.0);
        }
    }

    #[test]
    fn fourier_resolution_of_identity() {
        let g = Grid::line(128, 8.0).unwrap();
        let v = SchwartzFamily::fourier(&g);
        let u = gaussian(&g);
        let back = superpose(&coordinates(&u, &v).unwrap(), &v).unwrap();
        assert!(back.relative_sup_error(&u).unwrap() < 1e-12);
    }

    #[test]
    fn grid_mismatch_is_reported() {
        let g = Grid::line(16, 2.0).unwrap();
        let h = Grid::line(16, 3.0).unwrap();
        let v = SchwartzFamily::fourier(&g);
        assert!(matches!(
            coordinates(&gaussian(&h), &v),
            Err(SpectralError::GridMismatch(_))
        ));
        assert!(matches!(
            superpose(&gaussian(&h), &v),
            Err(SpectralError::GridMismatch(_))
        ));
    }

    #[test]
    fn kernel_coordinates_invert_superposition() {
        // well-conditioned random-ish kernel
        let g = Grid::line(8, 1.0).unwrap();
        let kernel: Vec<Complex64> = (0..64)
            .map(|k| {
                let (i, j) = (k / 8, k % 8);
                let diag = if i == j { 3.0 } else { 0.0 };
                c(diag + 0.1 * ((i * 7 + j * 3) % 5) as f64, 0.05 * (i as f64 - j as f64))
            })
            .collect();
        let v = SchwartzFamily::kernel(&g, &g, kernel).unwrap().verified_basis().unwrap();
        assert!(v.is_basis());
        let coeffs = GridDistribution::from_fn(&g, |p| c(p[0], 1.0 - p[0] * p[0])).unwrap();
        let u = superpose(&coeffs, &v).unwrap();
        let back = coordinates(&u, &v).unwrap();
        assert!(back.relative_sup_error(&coeffs).unwrap() < 1e-12);
    }

    #[test]
    fn singular_kernel_is_ill_conditioned() {
        let g = Grid::line(4, 1.0).unwrap();
        // two identical rows
        let mut kernel = vec![c(0.0, 0.0); 16];
        for i in 0..4 {
            kernel[i * 4 + i.min(2)] = c(1.0, 0.0);
        }
        let v = SchwartzFamily::kernel(&g, &g, kernel).unwrap();
        assert!(matches!(
            coordinates(&GridDistribution::unit(&g, 0), &v),
            Err(SpectralError::IllConditioned { .. })
        ));
        assert!(v.verified_basis().is_err());
    }

    #[test]
    fn scale_by_one_keeps_members() {
        let g = Grid::line(8, 2.0).unwrap();
        let v = SchwartzFamily::fourier(&g);
        let s = scale_family(&SymbolFunction::one(1), &v).unwrap();
        for k in 0..8 {
            assert_eq!(s.member_at(k), v.member_at(k));
        }
        assert!(matches!(
            scale_family(&SymbolFunction::one(2), &v),
            Err(SpectralError::ArityMismatch { .. })
        ));
    }

    #[test]
    fn scaled_dirac_members() {
        let g = Grid::line(8, 2.0).unwrap();
        let v = SchwartzFamily::dirac(&g);
        let a = SymbolFunction::real(1, "1+p^2", |p| 1.0 + p[0] * p[0]);
        let s = scale_family(&a, &v).unwrap();
        for k in 0..8 {
            let p = g.point(k);
            let expected = v.member_at(k).scale(a.eval(&p));
            assert_eq!(s.member_at(k), expected);
        }
    }

    #[test]
    fn scaled_fourier_family_is_derivative_family() {
        // forward-difference oracle on the plane waves, at a fine grid
        let g = Grid::line(64, PI).unwrap();
        let v = SchwartzFamily::fourier(&g);
        let a = SymbolFunction::new(1, "-ip", |p| Complex64::new(0.0, -p[0]));
        let s = scale_family(&a, &v).unwrap();
        let h = 1e-6;
        for k in [28, 31, 33, 36] {
            let p = v.index_grid().point(k)[0];
            for (l, x) in g.axis_points(0).iter().enumerate() {
                let fd = (Complex64::from_polar(1.0, -p * (x + h))
                    - Complex64::from_polar(1.0, -p * (x - h)))
                    / (2.0 * h);
                assert!((s.member_at(k).samples()[l] - fd).norm() < 1e-7);
            }
        }
    }

    #[test]
    fn zero_family_product() {
        let g = Grid::line(8, 2.0).unwrap();
        let lambda = SchwartzFamily::fourier(&g);
        let zero = SchwartzFamily::kernel(&g, lambda.index_grid(), vec![c(0.0, 0.0); 64]).unwrap();
        let prod = family_product(&zero, &lambda).unwrap();
        for k in 0..8 {
            assert_eq!(prod.member_at(k).sup_norm(), 0.0);
        }
        assert!(matches!(
            family_product(&lambda, &lambda),
            Err(SpectralError::GridMismatch(_))
        ));
    }

    #[test]
    fn dirac_coordinate_family_times_dirac() {
        let g = Grid::line(8, 2.0).unwrap();
        let delta = SchwartzFamily::dirac(&g);
        let mu = SchwartzFamily::kernel_from_members(&g, &g, |k| {
            Ok(coordinates(&delta.member_at(k), &delta)?.into_inner())
        })
        .unwrap();
        let prod = family_product(&mu, &delta).unwrap();
        for k in 0..8 {
            assert_eq!(prod.member_at(k), delta.member_at(k));
        }
    }
}
