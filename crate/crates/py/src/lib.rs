//! Python bindings. Rationals cross the boundary as `fractions.Fraction`
//! (plain `int` is accepted on input).

use num_bigint::BigInt;
use num_rational::BigRational;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyTuple};

use hyperpf::ensemble::{self, MomentSequence, NamedWeight, Route};
use hyperpf::exterior::{ModelShape, Multivector};
use hyperpf::oracle::{self, Method};
use hyperpf::spine::{self, StructureTable};
use hyperpf::tau::{self, LaurentPolynomial};
use hyperpf::Scalar;

fn err(e: hyperpf::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

#[pyclass(name = "Shape", frozen, eq, from_py_object)]
#[derive(Clone, PartialEq)]
pub struct PyShape(ModelShape);

#[pymethods]
impl PyShape {
    #[new]
    #[pyo3(signature = (charge, particles))]
    fn new(charge: usize, particles: usize) -> PyResult<Self> {
        ModelShape::new(charge, particles).map(PyShape).map_err(err)
    }

    #[getter]
    fn charge(&self) -> usize {
        self.0.charge()
    }

    #[getter]
    fn particles(&self) -> usize {
        self.0.particles()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    /// Momentum radius `K = L^2 (M - 1) / 2`.
    #[getter]
    fn radius(&self) -> i64 {
        self.0.radius()
    }

    #[getter]
    fn beta(&self) -> u32 {
        self.0.beta()
    }

    fn moments_needed(&self) -> usize {
        ensemble::moments_needed(&self.0)
    }

    fn default_k_cut(&self) -> usize {
        tau::default_k_cut(&self.0)
    }

    fn __repr__(&self) -> String {
        format!("Shape(charge={}, particles={})", self.0.charge(), self.0.particles())
    }
}

/// Exact moment sequence `m_0, m_1, ...`, optionally scale-tagged.
#[pyclass(name = "Moments", frozen, from_py_object)]
#[derive(Clone)]
pub struct PyMoments(MomentSequence);

#[pymethods]
impl PyMoments {
    #[new]
    fn new(values: Vec<BigRational>) -> Self {
        PyMoments(MomentSequence::new(values))
    }

    /// `"uniform:a,b"` or `"gaussian"`.
    #[staticmethod]
    fn named(weight: &str, count: usize) -> PyResult<Self> {
        NamedWeight::parse(weight)
            .and_then(|w| w.moments(count))
            .map(PyMoments)
            .map_err(err)
    }

    /// Reproducible random rationals with numerators and denominators
    /// bounded by `bound`.
    #[staticmethod]
    #[pyo3(signature = (count, seed, bound = 9))]
    fn random(count: usize, seed: u64, bound: i64) -> Self {
        PyMoments(oracle::random_moments(&mut oracle::seeded_rng(seed), count, bound))
    }

    #[getter]
    fn values(&self) -> Vec<BigRational> {
        self.0.values().to_vec()
    }

    #[getter]
    fn scale(&self) -> Option<(String, f64)> {
        self.0.scale().map(|t| (t.symbol.clone(), t.value))
    }

    fn __len__(&self) -> usize {
        self.0.values().len()
    }

    fn __repr__(&self) -> String {
        let vals: Vec<String> = self.0.values().iter().map(|v| v.to_string()).collect();
        format!("Moments([{}])", vals.join(", "))
    }
}

fn scalar_tuple(s: Scalar) -> (BigRational, Option<String>, i32) {
    (s.value, s.scale.map(|t| t.symbol), s.power)
}

fn multivector_dict<'py>(py: Python<'py>, a: &Multivector) -> PyResult<Bound<'py, PyDict>> {
    let out = PyDict::new(py);
    for (blade, c) in a.iter() {
        out.set_item(PyTuple::new(py, blade.degrees().collect::<Vec<_>>())?, c)?;
    }
    Ok(out)
}

fn laurent_dict<'py>(py: Python<'py>, p: &LaurentPolynomial<BigRational>) -> PyResult<Bound<'py, PyDict>> {
    let out = PyDict::new(py);
    for (e, c) in p.terms() {
        out.set_item(e, c)?;
    }
    Ok(out)
}

/// Partition function as `(value, scale_symbol, power)`; the full value
/// is `value * scale^power`.
#[pyfunction]
#[pyo3(signature = (moments, shape, route = "hyperpfaffian"))]
fn partition(
    moments: &PyMoments,
    shape: &PyShape,
    route: &str,
) -> PyResult<(BigRational, Option<String>, i32)> {
    let route = match route {
        "hyperpfaffian" => Route::Hyperpfaffian,
        "structure" => Route::StructurePoly,
        other => return Err(PyValueError::new_err(format!("unknown route {other:?}"))),
    };
    ensemble::partition_function(&moments.0, &shape.0, route)
        .map(scalar_tuple)
        .map_err(err)
}

/// Closed-form `Z` for a named weight.
#[pyfunction]
fn closed_form_partition(weight: &str, shape: &PyShape) -> PyResult<(BigRational, Option<String>, i32)> {
    let w = NamedWeight::parse(weight).map_err(err)?;
    oracle::closed_form_partition(&w, &shape.0).map(scalar_tuple).map_err(err)
}

/// Momentum mode `epsilon_p` as `{degrees: coefficient}`.
#[pyfunction]
fn epsilon<'py>(py: Python<'py>, p: i64, shape: &PyShape) -> PyResult<Bound<'py, PyDict>> {
    multivector_dict(py, &spine::epsilon(p, &shape.0))
}

/// Sorted momentum keys mapped to integer structure coefficients.
#[pyfunction]
fn structure_table<'py>(py: Python<'py>, shape: &PyShape) -> PyResult<Bound<'py, PyDict>> {
    let table = StructureTable::build(&shape.0).map_err(err)?;
    let out = PyDict::new(py);
    for (key, c) in table.entries() {
        out.set_item(PyTuple::new(py, key)?, c)?;
    }
    Ok(out)
}

/// Hyperpfaffian of a 2-form given as an antisymmetric matrix (L = 2 only).
#[pyfunction]
fn pfaffian(matrix: Vec<Vec<BigRational>>) -> PyResult<BigRational> {
    hyperpf::exterior::pfaffian_classical(&matrix).map_err(err)
}

#[pyfunction]
fn psi_minus<'py>(py: Python<'py>, moments: &PyMoments, shape: &PyShape) -> PyResult<Bound<'py, PyDict>> {
    laurent_dict(py, &tau::psi_minus(&moments.0, &shape.0).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (moments_plus, shape, k_cut = None))]
fn psi_plus<'py>(
    py: Python<'py>,
    moments_plus: &PyMoments,
    shape: &PyShape,
    k_cut: Option<usize>,
) -> PyResult<Bound<'py, PyDict>> {
    let k = k_cut.unwrap_or_else(|| tau::default_k_cut(&shape.0));
    laurent_dict(py, &tau::psi_plus(&moments_plus.0, &shape.0, k).map_err(err)?)
}

/// `[z^0] psi_minus(t) * psi_plus(t')`.
#[pyfunction]
#[pyo3(signature = (moments, moments_plus, shape, k_cut = None))]
fn hirota_residual(
    moments: &PyMoments,
    moments_plus: &PyMoments,
    shape: &PyShape,
    k_cut: Option<usize>,
) -> PyResult<BigRational> {
    let k = k_cut.unwrap_or_else(|| tau::default_k_cut(&shape.0));
    tau::hirota_residual(&moments.0, &moments_plus.0, &shape.0, k).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (moments, moments_plus, shape, k_cut = None))]
fn transport_spectrum<'py>(
    py: Python<'py>,
    moments: &PyMoments,
    moments_plus: &PyMoments,
    shape: &PyShape,
    k_cut: Option<usize>,
) -> PyResult<Bound<'py, PyDict>> {
    let k = k_cut.unwrap_or_else(|| tau::default_k_cut(&shape.0));
    laurent_dict(
        py,
        &tau::transport_spectrum(&moments.0, &moments_plus.0, &shape.0, k).map_err(err)?,
    )
}

/// `z^{2K} tau_{M-1}` of the Miwa-shifted moments.
#[pyfunction]
fn miwa_insertion(moments: &PyMoments, z: BigRational, shape: &PyShape) -> PyResult<BigRational> {
    tau::miwa_insertion(&moments.0, &z, &shape.0).map_err(err)
}

/// [`miwa_insertion`] divided by `tau_M`.
#[pyfunction]
fn miwa_ratio(moments: &PyMoments, z: BigRational, shape: &PyShape) -> PyResult<BigRational> {
    tau::miwa_ratio(&moments.0, &z, &shape.0).map_err(err)
}

/// Correlation density at exact points for a named weight, as a float.
#[pyfunction]
fn correlation(points: Vec<BigRational>, weight: &str, shape: &PyShape) -> PyResult<f64> {
    let w = NamedWeight::parse(weight).map_err(err)?;
    let r = ensemble::correlation(&points, &w, &shape.0, false).map_err(err)?;
    r.to_f64()
        .ok_or_else(|| PyValueError::new_err("weight has no pointwise density"))
}

/// Weight-free part `star(...)/Z` of the correlation for explicit moments.
#[pyfunction]
fn weightless_correlation(
    points: Vec<BigRational>,
    moments: &PyMoments,
    shape: &PyShape,
) -> PyResult<(BigRational, Option<String>, i32)> {
    let w = NamedWeight::Explicit(moments.0.clone());
    ensemble::correlation(&points, &w, &shape.0, true)
        .map(|c| scalar_tuple(c.weightless))
        .map_err(err)
}

/// Numerical `Z`; returns `{"estimate", "std_error", "samples_or_nodes"}`.
#[pyfunction]
#[pyo3(signature = (weight, shape, method = "monte_carlo", budget = 0, seed = 0))]
fn integrate<'py>(
    py: Python<'py>,
    weight: &str,
    shape: &PyShape,
    method: &str,
    budget: u64,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let w = NamedWeight::parse(weight).map_err(err)?;
    let method: Method = method.parse().map_err(err)?;
    let report = oracle::integrate_partition(&w, &shape.0, method, budget, seed).map_err(err)?;
    let out = PyDict::new(py);
    out.set_item("estimate", report.estimate)?;
    out.set_item("std_error", report.std_error)?;
    out.set_item("samples_or_nodes", report.samples_or_nodes)?;
    Ok(out)
}

/// Runs the command-line front end; returns `(exit_code, stdout, stderr)`.
#[pyfunction]
fn run_cli(args: Vec<String>) -> (i32, String, String) {
    let argv = std::iter::once("hyperpf".to_string()).chain(args);
    let out = hyperpf::cli::run(argv);
    (out.code, out.stdout, out.stderr)
}

#[pyfunction]
fn factorial(n: u64) -> BigInt {
    hyperpf::scalar::factorial(n)
}

#[pymodule]
fn hyperpf_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyShape>()?;
    m.add_class::<PyMoments>()?;
    m.add_function(wrap_pyfunction!(partition, m)?)?;
    m.add_function(wrap_pyfunction!(closed_form_partition, m)?)?;
    m.add_function(wrap_pyfunction!(epsilon, m)?)?;
    m.add_function(wrap_pyfunction!(structure_table, m)?)?;
    m.add_function(wrap_pyfunction!(pfaffian, m)?)?;
    m.add_function(wrap_pyfunction!(psi_minus, m)?)?;
    m.add_function(wrap_pyfunction!(psi_plus, m)?)?;
    m.add_function(wrap_pyfunction!(hirota_residual, m)?)?;
    m.add_function(wrap_pyfunction!(transport_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(miwa_insertion, m)?)?;
    m.add_function(wrap_pyfunction!(miwa_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(correlation, m)?)?;
    m.add_function(wrap_pyfunction!(weightless_correlation, m)?)?;
    m.add_function(wrap_pyfunction!(integrate, m)?)?;
    m.add_function(wrap_pyfunction!(run_cli, m)?)?;
    m.add_function(wrap_pyfunction!(factorial, m)?)?;
    Ok(())
}
