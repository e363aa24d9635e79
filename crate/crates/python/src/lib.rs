//! Python bindings: grids, distributions, families, symbols, solvers, Green
//! families and the invariant suites.

use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use schwartz_spectral::green::green_family_with_policy;
use schwartz_spectral::verify::run_suite;
use schwartz_spectral::{
    coordinates, differential_symbol, green_family_divided, left_inverse_family, solve,
    spectral_apply, Complex64, DifferentialOperatorSpec, DivisionPolicy, Grid, GridDistribution,
    SchwartzFamily, SpectralError, SymbolFunction,
};

create_exception!(pyschwartz, SchwartzError, PyValueError);
create_exception!(pyschwartz, NotDivisibleError, SchwartzError);
create_exception!(pyschwartz, NotInvertibleError, SchwartzError);

fn to_py(e: SpectralError) -> PyErr {
    match &e {
        SpectralError::NotDivisible { point, .. } => {
            NotDivisibleError::new_err((e.to_string(), point.clone()))
        }
        SpectralError::NotInvertible { point, .. } => {
            NotInvertibleError::new_err((e.to_string(), point.clone()))
        }
        _ => SchwartzError::new_err(e.to_string()),
    }
}

trait IntoPyResult<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> IntoPyResult<T> for schwartz_spectral::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(to_py)
    }
}

#[pyclass(name = "Grid", module = "pyschwartz", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyGrid(Grid);

#[pymethods]
impl PyGrid {
    #[new]
    fn new(counts: Vec<usize>, half_extents: Vec<f64>) -> PyResult<Self> {
        Grid::new(counts.len(), &counts, &half_extents).py().map(Self)
    }

    #[staticmethod]
    fn line(count: usize, half_extent: f64) -> PyResult<Self> {
        Grid::line(count, half_extent).py().map(Self)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    #[getter]
    fn counts(&self) -> Vec<usize> {
        self.0.counts().to_vec()
    }

    #[getter]
    fn half_extents(&self) -> Vec<f64> {
        self.0.half_extents().to_vec()
    }

    #[getter]
    fn spacings(&self) -> Vec<f64> {
        self.0.spacings()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    /// Node coordinates in row-major order.
    fn points(&self) -> Vec<Vec<f64>> {
        self.0.points()
    }

    fn locate(&self, point: Vec<f64>) -> PyResult<usize> {
        self.0.locate(&point).py()
    }

    fn dual(&self) -> Self {
        Self(self.0.dual())
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.0 == other.0
    }

    fn __repr__(&self) -> String {
        format!("Grid(counts={:?}, half_extents={:?})", self.0.counts(), self.0.half_extents())
    }
}

#[pyclass(name = "Distribution", module = "pyschwartz", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyDistribution(GridDistribution);

#[pymethods]
impl PyDistribution {
    #[new]
    fn new(grid: &PyGrid, samples: Vec<Complex64>) -> PyResult<Self> {
        GridDistribution::new(grid.0.clone(), samples).py().map(Self)
    }

    /// Samples `f(x)` at every node; `f` takes a list of coordinates.
    #[staticmethod]
    fn from_function(grid: &PyGrid, f: &Bound<'_, PyAny>) -> PyResult<Self> {
        let mut samples = Vec::with_capacity(grid.0.len());
        for x in grid.0.points() {
            samples.push(f.call1((x,))?.extract::<Complex64>()?);
        }
        GridDistribution::new(grid.0.clone(), samples).py().map(Self)
    }

    #[getter]
    fn grid(&self) -> PyGrid {
        PyGrid(self.0.grid().clone())
    }

    #[getter]
    fn samples(&self) -> Vec<Complex64> {
        self.0.samples().to_vec()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __add__(&self, other: &Self) -> PyResult<Self> {
        self.0.add(&other.0).py().map(Self)
    }

    fn __sub__(&self, other: &Self) -> PyResult<Self> {
        self.0.sub(&other.0).py().map(Self)
    }

    fn scale(&self, factor: Complex64) -> Self {
        Self(self.0.scale(factor))
    }

    fn sup_norm(&self) -> f64 {
        self.0.sup_norm()
    }

    fn l2_norm(&self) -> f64 {
        self.0.l2_norm()
    }

    /// `Σ u φ Δx`, bilinear.
    fn pairing(&self, test: &Self) -> PyResult<Complex64> {
        self.0.pairing(&test.0).py()
    }

    fn relative_sup_error(&self, reference: &Self) -> PyResult<f64> {
        self.0.relative_sup_error(&reference.0).py()
    }
}

#[pyclass(name = "Symbol", module = "pyschwartz", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PySymbol(SymbolFunction);

#[pymethods]
impl PySymbol {
    /// Wraps a Python callable taking a list of `arity` floats.
    #[new]
    #[pyo3(signature = (f, arity = 1, descriptor = "python"))]
    fn new(f: Py<PyAny>, arity: usize, descriptor: &str) -> Self {
        Self(SymbolFunction::new(arity, descriptor, move |p| {
            Python::attach(|py| {
                f.call1(py, (p.to_vec(),))
                    .ok()
                    .and_then(|v| v.extract::<Complex64>(py).ok())
                    // non-finite samples are rejected when the symbol is sampled
                    .unwrap_or(Complex64::new(f64::NAN, f64::NAN))
            })
        }))
    }

    #[staticmethod]
    fn constant(arity: usize, value: Complex64) -> Self {
        Self(SymbolFunction::constant(arity, value))
    }

    /// Symbol of `Σ c_α ∂^α` from `(α, c)` pairs.
    #[staticmethod]
    fn differential(dim: usize, terms: Vec<(Vec<u32>, Complex64)>) -> PyResult<Self> {
        Ok(Self(build_differential(dim, terms)?.1))
    }

    #[getter]
    fn arity(&self) -> usize {
        self.0.arity()
    }

    #[getter]
    fn descriptor(&self) -> String {
        self.0.descriptor().to_string()
    }

    fn __call__(&self, point: Vec<f64>) -> Complex64 {
        self.0.eval(&point)
    }

    fn __mul__(&self, other: &Self) -> PyResult<Self> {
        self.0.mul(&other.0).py().map(Self)
    }

    fn __add__(&self, other: &Self) -> PyResult<Self> {
        self.0.add(&other.0).py().map(Self)
    }
}

/// The spec together with a dimension-generic symbol closure; the closure
/// does not depend on any grid.
fn build_differential(
    dim: usize,
    terms: Vec<(Vec<u32>, Complex64)>,
) -> PyResult<(DifferentialOperatorSpec, SymbolFunction)> {
    let mut spec = DifferentialOperatorSpec::new(dim);
    for (alpha, c) in terms {
        spec = spec.with_term(&alpha, c).py()?;
    }
    let owned = spec.clone();
    let symbol = SymbolFunction::new(dim, "differential", move |p| owned.symbol_at(p));
    Ok((spec, symbol))
}

#[pyclass(name = "Family", module = "pyschwartz", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyFamily(SchwartzFamily);

#[pymethods]
impl PyFamily {
    #[staticmethod]
    fn dirac(grid: &PyGrid) -> Self {
        Self(SchwartzFamily::dirac(&grid.0))
    }

    #[staticmethod]
    fn fourier(grid: &PyGrid) -> Self {
        Self(SchwartzFamily::fourier(&grid.0))
    }

    /// Family given by its members, one distribution per index node.
    #[staticmethod]
    fn from_members(index: &PyGrid, members: Vec<PyRef<'_, PyDistribution>>) -> PyResult<Self> {
        if members.len() != index.0.len() {
            return Err(SchwartzError::new_err(format!(
                "{} members for {} index points",
                members.len(),
                index.0.len()
            )));
        }
        let space = members
            .first()
            .map(|m| m.0.grid().clone())
            .ok_or_else(|| SchwartzError::new_err("no members"))?;
        SchwartzFamily::kernel_from_members(&index.0, &space, |k| Ok(members[k].0.clone()))
            .py()
            .map(Self)
    }

    #[getter]
    fn kind(&self) -> &'static str {
        self.0.kind()
    }

    #[getter]
    fn index_grid(&self) -> PyGrid {
        PyGrid(self.0.index_grid().clone())
    }

    #[getter]
    fn space_grid(&self) -> PyGrid {
        PyGrid(self.0.space_grid().clone())
    }

    fn is_basis(&self) -> bool {
        self.0.is_basis()
    }

    /// Checks invertibility of the kernel and flags it as a basis.
    fn verified_basis(&self) -> PyResult<Self> {
        self.0.clone().verified_basis().py().map(Self)
    }

    fn member(&self, point: Vec<f64>) -> PyResult<PyDistribution> {
        self.0.member(&point).py().map(PyDistribution)
    }

    fn coordinates(&self, u: &PyDistribution) -> PyResult<PyDistribution> {
        coordinates(&u.0, &self.0).py().map(|c| PyDistribution(c.into_inner()))
    }

    fn superpose(&self, c: &PyDistribution) -> PyResult<PyDistribution> {
        self.0.superpose(&c.0).py().map(PyDistribution)
    }

    fn left_inverse(&self) -> PyResult<Self> {
        left_inverse_family(&self.0).py().map(Self)
    }

    fn __repr__(&self) -> String {
        format!("Family(kind={:?}, index={}, space={})", self.0.kind(), self.0.index_grid(), self.0.space_grid())
    }
}

/// `∫ a[u|v] v`.
#[pyfunction(name = "spectral_apply")]
fn py_spectral_apply(a: &PySymbol, v: &PyFamily, u: &PyDistribution) -> PyResult<PyDistribution> {
    spectral_apply(&a.0, &v.0, &u.0).py().map(PyDistribution)
}

fn policy(zero_threshold: f64, relative: bool, residual_threshold: f64) -> DivisionPolicy {
    DivisionPolicy {
        zero_threshold,
        relative,
        residual_threshold,
    }
}

/// Solves `∫ a[u|v] v = d`; returns `(u, relative residual)`.
#[pyfunction(name = "solve")]
#[pyo3(signature = (v, a, d, zero_threshold = 1e-12, relative = true, residual_threshold = 1e-10))]
fn py_solve(
    v: &PyFamily,
    a: &PySymbol,
    d: &PyDistribution,
    zero_threshold: f64,
    relative: bool,
    residual_threshold: f64,
) -> PyResult<(PyDistribution, f64)> {
    let p = policy(zero_threshold, relative, residual_threshold);
    let sol = solve(&v.0, &a.0, &d.0, &p).py()?;
    Ok((PyDistribution(sol.solution), sol.residual))
}

/// Periodic solution of `Σ c_α ∂^α u = d` from `(α, c)` pairs.
#[pyfunction(name = "solve_pde")]
#[pyo3(signature = (terms, d, zero_threshold = 1e-12, relative = true, residual_threshold = 1e-10))]
fn py_solve_pde(
    terms: Vec<(Vec<u32>, Complex64)>,
    d: &PyDistribution,
    zero_threshold: f64,
    relative: bool,
    residual_threshold: f64,
) -> PyResult<(PyDistribution, f64)> {
    let (spec, _) = build_differential(d.0.grid().dim(), terms)?;
    let p = policy(zero_threshold, relative, residual_threshold);
    let sol = schwartz_spectral::solve_pde(&spec, &d.0, &p).py()?;
    Ok((PyDistribution(sol.solution), sol.residual))
}

/// Green family of the operator diagonal in the basis `lam` with eigenvalue
/// system `l`. Returns `(family, weak residuals, route)` where route is
/// `"inverse"` or `"divided"`.
#[pyfunction(name = "green")]
#[pyo3(signature = (lam, l, zero_threshold = 1e-12, relative = true, residual_threshold = 1e-10))]
fn py_green(
    lam: &PyFamily,
    l: &PySymbol,
    zero_threshold: f64,
    relative: bool,
    residual_threshold: f64,
) -> PyResult<(PyFamily, Vec<f64>, &'static str)> {
    let p = policy(zero_threshold, relative, residual_threshold);
    let mu = left_inverse_family(&lam.0).py()?;
    let (result, route) = match green_family_with_policy(&lam.0, &l.0, &mu, &p) {
        Ok(r) => (r, "inverse"),
        Err(SpectralError::NotInvertible { .. }) => {
            (green_family_divided(&lam.0, &l.0, &mu, &p).py()?, "divided")
        }
        Err(e) => return Err(to_py(e)),
    };
    Ok((PyFamily(result.family), result.residuals, route))
}

/// Samples the symbol of `Σ c_α ∂^α` on a grid's nodes.
#[pyfunction(name = "differential_symbol_samples")]
fn py_differential_symbol_samples(
    grid: &PyGrid,
    terms: Vec<(Vec<u32>, Complex64)>,
) -> PyResult<Vec<Complex64>> {
    let (spec, _) = build_differential(grid.0.dim(), terms)?;
    differential_symbol(&spec, &grid.0).py()?.sample(&grid.0).py()
}

/// Runs an invariant suite; returns `(all passed, printed report)`.
#[pyfunction(name = "verify")]
#[pyo3(signature = (suite, seed = 42))]
fn py_verify(suite: &str, seed: u64) -> PyResult<(bool, String)> {
    let report = run_suite(suite, seed).py()?;
    Ok((report.all_passed(), report.to_string()))
}

#[pymodule]
fn pyschwartz(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGrid>()?;
    m.add_class::<PyDistribution>()?;
    m.add_class::<PySymbol>()?;
    m.add_class::<PyFamily>()?;
    m.add_function(wrap_pyfunction!(py_spectral_apply, m)?)?;
    m.add_function(wrap_pyfunction!(py_solve, m)?)?;
    m.add_function(wrap_pyfunction!(py_solve_pde, m)?)?;
    m.add_function(wrap_pyfunction!(py_green, m)?)?;
    m.add_function(wrap_pyfunction!(py_differential_symbol_samples, m)?)?;
    m.add_function(wrap_pyfunction!(py_verify, m)?)?;
    let py = m.py();
    m.add("SchwartzError", py.get_type::<SchwartzError>())?;
    m.add("NotDivisibleError", py.get_type::<NotDivisibleError>())?;
    m.add("NotInvertibleError", py.get_type::<NotInvertibleError>())?;
    Ok(())
}
