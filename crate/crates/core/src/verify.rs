//! Named invariant suites run on fixed desk-scale grids.
//!
//! Every check measures one quantity and compares it against a pinned
//! threshold. Reports contain no timings, so two runs with the same seed
//! render identically.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Result, SpectralError};
use crate::families::{family_product, superpose, SchwartzFamily};
use crate::green::{green_family, left_inverse_family};
use crate::grid::{Grid, GridDistribution, SymbolFunction};
use crate::oracle::{dense_from_diagonal, finite_difference};
use crate::probes::{band_limited_probes, random_scalars};
use crate::solver::{divide, solve, solve_pde, DifferentialOperatorSpec, DivisionPolicy};
use crate::spectral::{
    eigenspectrum_measure, eigenvalues_on_members, integrate_measure, is_eigenfamily,
    is_eigenfamily_in_band, operator_spectral_measure, scale_measure,
    spectral_apply, spectral_distribution, MeasureArg, SLinearOperator, SpectrumFunction,
};

pub const SUITES: [&str; 5] = ["identity", "homomorphism", "eigen", "green", "solver"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub suite: String,
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    /// `true` when the value must not exceed the threshold, `false` when it
    /// must exceed it.
    pub upper_bound: bool,
    pub pass: bool,
}

impl Check {
    fn at_most(suite: &str, name: &str, value: f64, threshold: f64) -> Self {
        Self {
            suite: suite.into(),
            name: name.into(),
            value,
            threshold,
            upper_bound: true,
            pass: value <= threshold,
        }
    }

    fn above(suite: &str, name: &str, value: f64, threshold: f64) -> Self {
        Self {
            suite: suite.into(),
            name: name.into(),
            value,
            threshold,
            upper_bound: false,
            pass: value > threshold,
        }
    }

    fn holds(suite: &str, name: &str, ok: bool) -> Self {
        Self {
            suite: suite.into(),
            name: name.into(),
            value: if ok { 0.0 } else { 1.0 },
            threshold: 0.0,
            upper_bound: true,
            pass: ok,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| !c.pass).count()
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "seed {}", self.seed)?;
        for c in &self.checks {
            let relation = if c.upper_bound { "<=" } else { ">" };
            writeln!(
                f,
                "{:4}  {:<13} {:<44} {:>10.3e} {} {:.1e}",
                if c.pass { "PASS" } else { "FAIL" },
                c.suite,
                c.name,
                c.value,
                relation,
                c.threshold
            )?;
        }
        write!(
            f,
            "{} checks, {} failed",
            self.checks.len(),
            self.failures()
        )
    }
}

/// Runs a named suite (`identity`, `homomorphism`, `eigen`, `green`,
/// `solver`, or `all`).
pub fn run_suite(name: &str, seed: u64) -> Result<VerifyReport> {
    let checks = match name {
        "all" => {
            let mut all = Vec::new();
            for suite in SUITES {
                all.extend(suite_checks(suite, seed)?);
            }
            all
        }
        other if SUITES.contains(&other) => suite_checks(other, seed)?,
        other => return Err(SpectralError::UnknownSuite(other.to_string())),
    };
    Ok(VerifyReport { seed, checks })
}

fn suite_checks(name: &str, seed: u64) -> Result<Vec<Check>> {
    match name {
        "identity" => identity_suite(seed),
        "homomorphism" => homomorphism_suite(seed),
        "eigen" => eigen_suite(seed),
        "green" => green_suite(seed),
        "solver" => solver_suite(seed),
        _ => unreachable!("suite names are checked by run_suite"),
    }
}

fn coordinates(u: &GridDistribution, v: &SchwartzFamily) -> Result<GridDistribution> {
    Ok(crate::families::coordinates(u, v)?.into_inner())
}

fn c64(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn gaussian(grid: &Grid, sigma: f64) -> Result<GridDistribution> {
    GridDistribution::from_fn(grid, |x| {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        c64((-r2 / (2.0 * sigma * sigma)).exp())
    })
}

fn minus_ip() -> SymbolFunction {
    SymbolFunction::new(1, "-ip", |p| Complex64::new(0.0, -p[0]))
}

fn helmholtz_spec() -> DifferentialOperatorSpec {
    DifferentialOperatorSpec::identity(1)
        .with_term(&[2], c64(-1.0))
        .expect("one-dimensional multi-index")
}

/// Random coefficient vector on a grid, seeded.
fn random_coefficients(grid: &Grid, seed: u64) -> Result<GridDistribution> {
    let values = random_scalars(grid.len(), seed);
    GridDistribution::new(grid.clone(), values)
}

/// Relative sup error of `a` against `b`.
fn rel(a: &GridDistribution, b: &GridDistribution) -> Result<f64> {
    a.relative_sup_error(b)
}

/// Member `p ↦ δ_{-p}`: a kernel basis that is its own inverse.
fn reflection_family(grid: &Grid) -> Result<SchwartzFamily> {
    let delta = SchwartzFamily::dirac(grid);
    SchwartzFamily::kernel_from_members(grid, grid, |k| {
        let p = grid.point(k);
        let reflected: Vec<f64> = p.iter().map(|x| -x).collect();
        // -(-L) = L is outside the half-open box; wrap it back periodically.
        let wrapped: Vec<f64> = reflected
            .iter()
            .zip(grid.half_extents())
            .map(|(&x, &l)| if x >= l { x - 2.0 * l } else { x })
            .collect();
        delta.member(&wrapped)
    })?
    .verified_basis()
}

fn identity_suite(seed: u64) -> Result<Vec<Check>> {
    const S: &str = "identity";
    let mut out = Vec::new();

    let line = Grid::line(128, 8.0)?;
    let plane = Grid::new(2, &[32, 32], &[6.0, 6.0])?;
    for (label, grid) in [("1d", &line), ("2d", &plane)] {
        let u = gaussian(grid, 1.0)?;
        for v in [SchwartzFamily::fourier(grid), SchwartzFamily::dirac(grid)] {
            let back = superpose(&coordinates(&u, &v)?, &v)?;
            out.push(Check::at_most(
                S,
                &format!("reconstruction {} {label}", v.kind()),
                rel(&back, &u)?,
                1e-8,
            ));
            let c = random_coefficients(v.index_grid(), seed)?;
            let again = coordinates(&superpose(&c, &v)?, &v)?;
            out.push(Check::at_most(
                S,
                &format!("coefficient round trip {} {label}", v.kind()),
                rel(&again, &c)?,
                1e-10,
            ));
        }
    }

    // linearity of coordinates and superposition
    let v = SchwartzFamily::fourier(&line);
    let probes = band_limited_probes(&line, 2, seed);
    let scalars = random_scalars(2, seed ^ 0x5eed);
    let (alpha, beta) = (scalars[0], scalars[1]);
    let combo = probes[0].scale(alpha).add(&probes[1].scale(beta))?;
    let lhs = coordinates(&combo, &v)?;
    let rhs = coordinates(&probes[0], &v)?
        .scale(alpha)
        .add(&coordinates(&probes[1], &v)?.scale(beta))?;
    out.push(Check::at_most(S, "coordinates linearity", rel(&lhs, &rhs)?, 1e-12));
    let c0 = random_coefficients(v.index_grid(), seed + 1)?;
    let c1 = random_coefficients(v.index_grid(), seed + 2)?;
    let lhs = superpose(&c0.scale(alpha).add(&c1.scale(beta))?, &v)?;
    let rhs = superpose(&c0, &v)?
        .scale(alpha)
        .add(&superpose(&c1, &v)?.scale(beta))?;
    out.push(Check::at_most(S, "superpose linearity", rel(&lhs, &rhs)?, 1e-12));

    // a kernel basis whose left inverse squares to the Dirac family
    let small = Grid::line(32, 4.0)?;
    let lambda = reflection_family(&small)?;
    let mu = left_inverse_family(&lambda)?;
    let square = family_product(&mu, &mu)?;
    let delta = SchwartzFamily::dirac(&small);
    let mut square_err = 0.0_f64;
    for k in 0..small.len() {
        square_err = square_err.max(rel(&square.member_at(k), &delta.member_at(k))?);
    }
    out.push(Check::at_most(S, "left inverse squares to dirac", square_err, 1e-12));
    let c = random_coefficients(&small, seed + 3)?;
    let again = coordinates(&superpose(&c, &mu)?, &mu)?;
    out.push(Check::at_most(S, "left inverse round trip", rel(&again, &c)?, 1e-8));
    Ok(out)
}

fn homomorphism_suite(seed: u64) -> Result<Vec<Check>> {
    const S: &str = "homomorphism";
    let mut out = Vec::new();
    let grid = Grid::line(128, 8.0)?;
    let v = SchwartzFamily::fourier(&grid);
    let mu_v = spectral_distribution(&v)?;
    let f = SymbolFunction::real(1, "p^2", |p| p[0] * p[0]);
    let g = SymbolFunction::real(1, "cos p", |p| p[0].cos());
    let fg = f.mul(&g)?;
    let op_f = mu_v.evaluate(&f.clone().into())?;
    let op_g = mu_v.evaluate(&g.clone().into())?;
    let op_fg = mu_v.evaluate(&fg.clone().into())?;
    let probes = band_limited_probes(&grid, 16, seed);
    let mut worst = 0.0_f64;
    for u in &probes {
        let lhs = op_fg.apply(u)?;
        let rhs = op_f.apply(&op_g.apply(u)?)?;
        worst = worst.max(lhs.sub(&rhs)?.sup_norm() / u.sup_norm());
    }
    out.push(Check::at_most(S, "mu(fg) = mu(f) mu(g)", worst, 1e-10));

    // linearity in the function argument
    let sum = f.add(&g)?;
    let op_sum = mu_v.evaluate(&sum.into())?;
    let mut worst = 0.0_f64;
    for u in &probes[..4] {
        let lhs = op_sum.apply(u)?;
        let rhs = op_f.apply(u)?.add(&op_g.apply(u)?)?;
        worst = worst.max(rel(&lhs, &rhs)?);
    }
    out.push(Check::at_most(S, "measure linearity", worst, 1e-10));

    // injectivity: eigenvalues recovered from members equal the symbol
    let small = Grid::line(32, 4.0)?;
    let w = SchwartzFamily::fourier(&small);
    let mu_w = spectral_distribution(&w)?;
    let h = SymbolFunction::real(1, "1+p^2/(1+p^4)", |p| 1.0 + p[0] * p[0] / (1.0 + p[0].powi(4)));
    let recovered = eigenvalues_on_members(mu_w.evaluate(&h.clone().into())?.as_operator()?, &w)?;
    let sampled = GridDistribution::new(w.index_grid().clone(), h.sample(w.index_grid())?)?;
    out.push(Check::at_most(
        S,
        "symbol recovered from member action",
        recovered.sub(&sampled)?.sup_norm(),
        1e-10,
    ));

    // Dirac specialization
    let delta = SchwartzFamily::dirac(&grid);
    let mu_delta = spectral_distribution(&delta)?;
    let m = SymbolFunction::real(1, "1+x^2", |x| 1.0 + x[0] * x[0]);
    let op = mu_delta.evaluate(&m.clone().into())?;
    let mut worst = 0.0_f64;
    for u in &probes[..4] {
        worst = worst.max(rel(&op.apply(u)?, &u.mul_symbol(&m)?)?);
    }
    out.push(Check::at_most(S, "dirac measure is multiplication", worst, 1e-14));

    // scaling composition g.(f.mu) = (gf).mu
    let nested = scale_measure(&g.clone().into(), &scale_measure(&f.clone().into(), &mu_v)?)?;
    let flat = scale_measure(&fg.into(), &mu_v)?;
    let probe_fn: MeasureArg = SymbolFunction::real(1, "1/(1+p^2)", |p| 1.0 / (1.0 + p[0] * p[0])).into();
    let lhs = nested.evaluate(&probe_fn)?.apply(&probes[0])?;
    let rhs = flat.evaluate(&probe_fn)?.apply(&probes[0])?;
    out.push(Check::at_most(S, "scale composition", rel(&lhs, &rhs)?, 1e-12));

    // expansion theorem: [A u | v] = mu_a(u, v)(j_S)
    let a = minus_ip();
    let u = gaussian(&grid, 1.0)?;
    let lhs = coordinates(&spectral_apply(&a, &v, &u)?, &v)?;
    let rhs = eigenspectrum_measure(&u, &v, &a)?
        .evaluate(&SpectrumFunction::identity().into())?;
    out.push(Check::at_most(
        S,
        "coordinates of A(u) = mu_a(u,v)(j_S)",
        rel(&lhs, rhs.as_distribution()?)?,
        1e-12,
    ));

    // integral of mu_(a,v) is the identity
    let id = integrate_measure(&operator_spectral_measure(&a, &v)?)?;
    let mut worst = 0.0_f64;
    for u in &probes[..8] {
        worst = worst.max(rel(&id.apply(u)?, u)?);
    }
    out.push(Check::at_most(S, "integral of mu_(a,v) is identity", worst, 1e-10));
    Ok(out)
}

fn eigen_suite(seed: u64) -> Result<Vec<Check>> {
    const S: &str = "eigen";
    let mut out = Vec::new();

    let grid = Grid::line(256, PI)?;
    let v = SchwartzFamily::fourier(&grid);
    let fd4 = finite_difference(&DifferentialOperatorSpec::derivative(1, 0, 1), &grid, 4)?;
    let report = is_eigenfamily_in_band(&SLinearOperator::Dense(fd4.clone()), &v, &minus_ip(), 1e-4, 3.0)?;
    out.push(Check::at_most(S, "fd4 d/dx on fourier band |p|<=3", report.max_residual, 1e-4));
    let report = is_eigenfamily_in_band(&SLinearOperator::Dense(fd4), &v, &minus_ip(), 1e-6, 2.0)?;
    out.push(Check::at_most(S, "fd4 d/dx on fourier band |p|<=2", report.max_residual, 1e-6));

    let small = Grid::line(64, PI)?;
    let w = SchwartzFamily::fourier(&small);
    let id = is_eigenfamily(&SLinearOperator::Identity, &w, &SymbolFunction::one(1), 0.0)?;
    out.push(Check::at_most(S, "identity has every basis as eigenfamily", id.max_residual, 0.0));
    let x2 = SLinearOperator::Multiplication(SymbolFunction::real(1, "x^2", |x| x[0] * x[0]));
    let p2 = SymbolFunction::real(1, "p^2", |p| p[0] * p[0]);
    let report = is_eigenfamily(&x2, &w, &p2, 1e-6)?;
    out.push(Check::above(S, "x^2 is not diagonal in fourier", report.max_residual, 1e-6));

    // dense oracle agreement
    let a = minus_ip();
    let dense = dense_from_diagonal(&w, &a)?;
    let mut worst = 0.0_f64;
    for u in band_limited_probes(&small, 16, seed) {
        let lhs = dense.apply(&u)?;
        let rhs = spectral_apply(&a, &w, &u)?;
        worst = worst.max(lhs.sub(&rhs)?.sup_norm() / u.sup_norm());
    }
    out.push(Check::at_most(S, "dense oracle matches spectral apply", worst, 1e-12));
    let sin = GridDistribution::from_fn(&small, |x| c64(x[0].sin()))?;
    let cos = GridDistribution::from_fn(&small, |x| c64(x[0].cos()))?;
    out.push(Check::at_most(
        S,
        "dense spectral derivative of sin",
        dense.apply(&sin)?.sub(&cos)?.sup_norm(),
        1e-8,
    ));

    // order-2 finite differences converge at rate 4 against the spectral derivative
    let errors: Vec<f64> = [128usize, 256]
        .iter()
        .map(|&n| -> Result<f64> {
            let g = Grid::line(n, 8.0)?;
            let u = gaussian(&g, 1.0)?;
            let fd = finite_difference(&DifferentialOperatorSpec::derivative(1, 0, 1), &g, 2)?;
            let spectral = spectral_apply(&minus_ip(), &SchwartzFamily::fourier(&g), &u)?;
            Ok(fd.apply(&u)?.sub(&spectral)?.sup_norm())
        })
        .collect::<Result<_>>()?;
    let ratio = errors[0] / errors[1];
    out.push(Check::holds(
        S,
        &format!("fd2 convergence ratio {ratio:.3} in [3.5, 4.5]"),
        (3.5..=4.5).contains(&ratio),
    ));
    Ok(out)
}

fn solver_suite(seed: u64) -> Result<Vec<Check>> {
    const S: &str = "solver";
    let mut out = Vec::new();
    let policy = DivisionPolicy::default();

    let grid = Grid::line(64, PI)?;
    let sin = GridDistribution::from_fn(&grid, |x| c64(x[0].sin()))?;
    let minus_cos = GridDistribution::from_fn(&grid, |x| c64(-x[0].cos()))?;
    let derivative = DifferentialOperatorSpec::derivative(1, 0, 1);
    let sol = solve_pde(&derivative, &sin, &policy)?;
    out.push(Check::at_most(S, "u' = sin gives -cos", rel(&sol.solution, &minus_cos)?, 1e-10));
    out.push(Check::at_most(S, "u' = sin residual", sol.residual, 1e-10));

    let one = GridDistribution::from_fn(&grid, |_| c64(1.0))?;
    let rejected = match solve_pde(&derivative, &one, &policy) {
        Err(SpectralError::NotDivisible { point, .. }) => point == vec![0.0],
        _ => false,
    };
    out.push(Check::holds(S, "u' = 1 not divisible at p = 0", rejected));

    let grid = Grid::line(128, 8.0)?;
    let datum = gaussian(&grid, 1.0)?;
    let spec = helmholtz_spec();
    let sol = solve_pde(&spec, &datum, &policy)?;
    out.push(Check::at_most(S, "(I - D^2) u = gaussian residual", sol.residual, 1e-10));
    let fd = finite_difference(&DifferentialOperatorSpec::derivative(1, 0, 2), &grid, 2)?
        .shifted(c64(1.0), c64(-1.0));
    let reference = fd.solve(&datum)?;
    out.push(Check::at_most(
        S,
        "(I - D^2) u agrees with fd2 dense solve",
        rel(&sol.solution, &reference)?,
        1e-3,
    ));

    // a [u|v] = [d|v] wherever the symbol is not treated as zero
    let v = SchwartzFamily::fourier(&grid);
    let a = crate::solver::differential_symbol(&spec, v.index_grid())?;
    let lhs = coordinates(&sol.solution, &v)?.mul_symbol(&a)?;
    let rhs = coordinates(&datum, &v)?;
    out.push(Check::at_most(S, "eigen-representation identity", rel(&lhs, &rhs)?, 1e-12));

    // round trip on random data with no mass on the zero set
    let probes = band_limited_probes(&grid, 4, seed);
    let deriv_symbol = minus_ip();
    let mut worst = 0.0_f64;
    for d in &probes {
        let mut c = coordinates(d, &v)?.into_samples();
        let zero = v.index_grid().locate(&[0.0])?;
        c[zero] = Complex64::new(0.0, 0.0);
        let d = superpose(&GridDistribution::new(v.index_grid().clone(), c)?, &v)?;
        let sol = solve(&v, &deriv_symbol, &d, &policy)?;
        worst = worst.max(spectral_apply(&deriv_symbol, &v, &sol.solution)?.relative_l2_error(&d)?);
    }
    out.push(Check::at_most(S, "round trip off the zero set", worst, 1e-10));

    // gauge freedom on the zero set
    let d = &probes[0];
    let d_v = {
        let mut c = coordinates(d, &v)?.into_samples();
        c[v.index_grid().locate(&[0.0])?] = Complex64::new(0.0, 0.0);
        GridDistribution::new(v.index_grid().clone(), c)?
    };
    let q = divide(&d_v, &deriv_symbol, &policy)?;
    let zero = v.index_grid().locate(&[0.0])?;
    let added = GridDistribution::unit(v.index_grid(), zero).scale(Complex64::new(0.7, -0.2));
    let d_space = superpose(&d_v, &v)?;
    let base = spectral_apply(&deriv_symbol, &v, &superpose(&q, &v)?)?.sub(&d_space)?.l2_norm();
    let shifted = spectral_apply(&deriv_symbol, &v, &superpose(&q.add(&added)?, &v)?)?
        .sub(&d_space)?
        .l2_norm();
    let values = deriv_symbol.sample(v.index_grid())?;
    let cutoff = policy.zero_cutoff(values.iter().map(|z| z.norm()).fold(0.0, f64::max));
    let mass = superpose(&added, &v)?.l2_norm();
    out.push(Check::at_most(
        S,
        "gauge freedom on the zero set",
        (shifted - base).abs(),
        cutoff * mass + 1e-14 * d_space.l2_norm(),
    ));
    Ok(out)
}

fn green_suite(_seed: u64) -> Result<Vec<Check>> {
    const S: &str = "green";
    let mut out = Vec::new();
    let grid = Grid::line(1024, 20.0)?;
    let lambda = SchwartzFamily::fourier(&grid);
    let mu = left_inverse_family(&lambda)?;
    let spec = helmholtz_spec();
    let l = crate::solver::differential_symbol(&spec, lambda.index_grid())?;
    let result = green_family(&lambda, &l, &mu)?;

    let sampled: Vec<usize> = (0..8).map(|k| k * grid.len() / 8 + grid.len() / 16).collect();
    let worst_sampled = sampled
        .iter()
        .map(|&k| result.residuals[k])
        .fold(0.0, f64::max);
    out.push(Check::at_most(S, "weak residual at 8 indices", worst_sampled, 1e-6));
    out.push(Check::at_most(S, "weak residual at every index", result.max_residual(), 1e-6));

    let delta = SchwartzFamily::dirac(&grid);
    let policy = DivisionPolicy::default();
    let mut worst = 0.0_f64;
    for &k in &sampled {
        let sol = solve(&lambda, &l, &delta.member_at(k), &policy)?;
        worst = worst.max(rel(&sol.solution, &result.family.member_at(k))?);
    }
    out.push(Check::at_most(S, "green member equals solve of delta", worst, 1e-12));

    let product = family_product(&mu, &lambda)?;
    let phi = crate::probes::GaussianProbe {
        center: vec![0.3],
        width: 1.0,
    };
    let phi_s = phi.sample(&grid);
    let mut worst = 0.0_f64;
    for k in 0..grid.len() {
        let pairing = product.member_at(k).pairing(&phi_s)?;
        worst = worst.max((pairing - c64(phi.eval(&grid.point(k)))).norm());
    }
    out.push(Check::at_most(S, "left inverse product pairs as delta", worst, 1e-8));
    Ok(out)
}
