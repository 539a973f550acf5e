//! Python bindings for `sumprod_core`. Reports come back as plain dicts
//! (their JSON form); colorings, sampled functions and sieves are classes.

use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyMemoryError, PyTimeoutError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyComplex;
use sumprod_core::averages::{AvgMode, SampledFunction};
use sumprod_core::coloring::{self as col, RichnessConfig};
use sumprod_core::dioph::{self, DiophParams, ScanOptions, WeylOptions};
use sumprod_core::projections::{self as proj, NormParams};
use sumprod_core::selberg::{self, Normalizer};
use sumprod_core::{search, suite, LabError};

create_exception!(sumprod, CapacityError, PyMemoryError);
create_exception!(sumprod, RangeError, PyValueError);
create_exception!(sumprod, ConfigError, PyValueError);
create_exception!(sumprod, LabIoError, PyException);

fn err(e: LabError) -> PyErr {
    let msg = e.to_string();
    match e {
        LabError::Domain(_) => PyValueError::new_err(msg),
        LabError::Range(_) => RangeError::new_err(msg),
        LabError::Capacity(_) => CapacityError::new_err(msg),
        LabError::Timeout(_) => PyTimeoutError::new_err(msg),
        LabError::Config(_) => ConfigError::new_err(msg),
        LabError::Io(_) => LabIoError::new_err(msg),
    }
}

trait IntoPy<T> {
    fn py_err(self) -> PyResult<T>;
}

impl<T> IntoPy<T> for sumprod_core::Result<T> {
    fn py_err(self) -> PyResult<T> {
        self.map_err(err)
    }
}

/// Serializes through JSON into Python objects.
fn to_py<'py, T: serde::Serialize>(py: Python<'py>, v: &T) -> PyResult<Bound<'py, PyAny>> {
    let s = serde_json::to_string(v).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (s,))
}

fn complex<'py>(py: Python<'py>, z: Complex64) -> Bound<'py, PyComplex> {
    PyComplex::from_doubles(py, z.re, z.im)
}

fn mode(name: &str) -> PyResult<AvgMode> {
    match name {
        "log" => Ok(AvgMode::Log),
        "uniform" => Ok(AvgMode::Uniform),
        _ => Err(PyValueError::new_err(format!("mode must be 'log' or 'uniform', got '{name}'"))),
    }
}

/// An r-coloring of [N].
#[pyclass(name = "Coloring", module = "sumprod", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyColoring {
    inner: col::Coloring,
}

#[pymethods]
impl PyColoring {
    /// `colors[x - 1]` is the color of `x`.
    #[new]
    fn new(r: u32, colors: Vec<u16>) -> PyResult<Self> {
        Ok(Self { inner: col::Coloring::new(r, colors).py_err()? })
    }

    #[staticmethod]
    fn extremal(r: u32) -> PyResult<Self> {
        Ok(Self { inner: col::extremal_coloring(r).py_err()? })
    }

    /// Class `i` is `[starts[i-1], starts[i])`; integers before the first
    /// start get color 0.
    #[staticmethod]
    fn interval(n: u64, starts: Vec<u64>) -> PyResult<Self> {
        Ok(Self { inner: col::interval_coloring(n, &starts).py_err()? })
    }

    #[staticmethod]
    fn random(n: u64, r: u32, seed: u64) -> PyResult<Self> {
        Ok(Self { inner: col::Coloring::random(n, r, seed).py_err()? })
    }

    #[staticmethod]
    fn from_json(s: &str) -> PyResult<Self> {
        Ok(Self { inner: col::Coloring::from_rle_json(s).py_err()? })
    }

    fn to_json(&self) -> PyResult<String> {
        self.inner.to_rle_json().py_err()
    }

    #[getter]
    fn n(&self) -> u64 {
        self.inner.n()
    }

    #[getter]
    fn r(&self) -> u32 {
        self.inner.r()
    }

    fn color(&self, x: u64) -> PyResult<u16> {
        if x == 0 || x > self.inner.n() {
            return Err(RangeError::new_err(format!("{x} is outside [1, {}]", self.inner.n())));
        }
        Ok(self.inner.color(x))
    }

    fn colors(&self) -> Vec<u16> {
        self.inner.colors().to_vec()
    }

    fn restrict(&self, n: u64) -> PyResult<Self> {
        Ok(Self { inner: self.inner.restrict(n).py_err()? })
    }

    /// `(x, y, color)` with `x + y` and `xy` of one color, or None.
    fn find_monochromatic(&self) -> Option<(u64, u64, u16)> {
        col::find_monochromatic(&self.inner).map(|w| (w.x, w.y, w.color))
    }

    fn __len__(&self) -> usize {
        self.inner.n() as usize
    }

    fn __repr__(&self) -> String {
        format!("Coloring(n={}, r={})", self.inner.n(), self.inner.r())
    }
}

/// Complex samples of a 1-bounded function on `[lo, lo + len)`.
#[pyclass(name = "SampledFunction", module = "sumprod", frozen)]
pub struct PySampled {
    inner: SampledFunction,
}

#[pymethods]
impl PySampled {
    #[new]
    #[pyo3(signature = (lo, values, bound = 1.0))]
    fn new(lo: i64, values: Vec<Complex64>, bound: f64) -> PyResult<Self> {
        Ok(Self { inner: SampledFunction::new(lo, values, bound).py_err()? })
    }

    #[staticmethod]
    fn random_disc(lo: i64, hi: i64, seed: u64, stream: u64) -> PyResult<Self> {
        Ok(Self { inner: SampledFunction::random_disc(lo, hi, seed, stream).py_err()? })
    }

    #[getter]
    fn lo(&self) -> i64 {
        self.inner.lo()
    }

    #[getter]
    fn hi(&self) -> i64 {
        self.inner.hi()
    }

    fn __call__<'py>(&self, py: Python<'py>, n: i64) -> PyResult<Bound<'py, PyComplex>> {
        self.inner
            .get(n)
            .map(|z| complex(py, z))
            .ok_or_else(|| RangeError::new_err(format!("{n} is outside [{}, {}]", self.inner.lo(), self.inner.hi())))
    }

    /// `Pi_{q,H} f` on the points its window fits in.
    fn project(&self, q: u64, h: u64) -> PyResult<Self> {
        Ok(Self { inner: proj::project(&self.inner, q, h).py_err()? })
    }

    #[pyo3(signature = (n, q, h, mode = "log"))]
    fn u1_norm(&self, n: u64, q: u64, h: u64, mode: &str) -> PyResult<f64> {
        let p = NormParams::new(n, q, h).py_err()?;
        match self::mode(mode)? {
            AvgMode::Log => proj::u1log_norm(&self.inner, p),
            AvgMode::Uniform => proj::u1_norm(&self.inner, p),
        }
        .py_err()
    }
}

#[pyclass(name = "SelbergSieve", module = "sumprod", frozen)]
pub struct PySieve {
    inner: selberg::SelbergSieve,
}

#[pymethods]
impl PySieve {
    #[new]
    #[pyo3(signature = (r, normalizer = "mu2"))]
    fn new(r: f64, normalizer: &str) -> PyResult<Self> {
        let kind: Normalizer = normalizer.parse().py_err()?;
        Ok(Self { inner: selberg::SelbergSieve::new(r, kind).py_err()? })
    }

    /// The majorant at `n`.
    fn __call__(&self, n: u64) -> f64 {
        self.inner.value(n)
    }

    /// Majorant on `[X, 2X)`.
    fn table(&self, x: u64) -> PyResult<Vec<f64>> {
        self.inner.table(x).py_err()
    }

    /// `(q, c_q)` pairs of the Ramanujan expansion.
    fn coefficients(&self) -> Vec<(u64, f64)> {
        self.inner.expand().moduli()
    }

    fn expansion_at(&self, n: u64) -> f64 {
        self.inner.expand().eval(n)
    }
}

#[pyfunction]
fn verify_extremal<'py>(py: Python<'py>, r: u32) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &col::verify_extremal(r).py_err()?)
}

#[pyfunction]
#[pyo3(signature = (r, n_max, budget = search::DEFAULT_NODE_BUDGET))]
fn sp_number<'py>(py: Python<'py>, r: u32, n_max: u64, budget: u64) -> PyResult<Bound<'py, PyAny>> {
    let res = py.detach(|| search::sp_number(r, n_max, budget)).py_err()?;
    to_py(py, &res)
}

#[pyfunction]
#[pyo3(signature = (n, r, budget = search::DEFAULT_NODE_BUDGET))]
fn colorability<'py>(py: Python<'py>, n: u64, r: u32, budget: u64) -> PyResult<Bound<'py, PyAny>> {
    let cert = py.detach(|| search::colorability(n, r, budget)).py_err()?;
    to_py(py, &cert)
}

#[pyfunction]
fn run_suite<'py>(py: Python<'py>, name: &str, n: u64, draws: usize, seed: u64) -> PyResult<Bound<'py, PyAny>> {
    let lemma: suite::Lemma = name.parse().py_err()?;
    let rep = py.detach(|| suite::run_suite(lemma, n, draws, seed)).py_err()?;
    to_py(py, &rep)
}

#[pyfunction]
fn trivial_checks<'py>(py: Python<'py>, n: u64) -> PyResult<Bound<'py, PyAny>> {
    let checks = suite::trivial_checks(n).py_err()?;
    let pairs: Vec<_> = checks.iter().map(|c| (c.name.clone(), c.got, c.expected, c.pass())).collect();
    to_py(py, &pairs)
}

#[pyfunction]
fn exp_sum<'py>(py: Python<'py>, s: Vec<i64>, theta: f64) -> PyResult<Bound<'py, PyComplex>> {
    Ok(complex(py, dioph::exp_sum(&s, theta).py_err()?))
}

#[pyfunction]
#[pyo3(signature = (s, l, lp, d, deltas, grid_size = None))]
fn dioph_verify<'py>(
    py: Python<'py>,
    s: Vec<i64>,
    l: f64,
    lp: f64,
    d: f64,
    deltas: Vec<f64>,
    grid_size: Option<usize>,
) -> PyResult<Bound<'py, PyAny>> {
    let params = DiophParams::new(l, lp, d).py_err()?;
    let opts = ScanOptions { grid_size, ..ScanOptions::default() };
    let rep = py.detach(|| dioph::dioph_verify(&s, params, &deltas, opts)).py_err()?;
    to_py(py, &rep)
}

#[pyfunction]
fn vino_verify<'py>(py: Python<'py>, alpha: f64, t: u64, delta1: f64, delta2: f64) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &dioph::vino_verify(alpha, t, delta1, delta2).py_err()?)
}

#[pyfunction]
fn gamma_coprimality(m: Vec<u64>) -> PyResult<f64> {
    dioph::gamma_coprimality(&m).py_err()
}

/// `(numerator, denominator)` as decimal strings.
#[pyfunction]
fn gamma_exact(m: Vec<u64>) -> PyResult<(String, String)> {
    let g = dioph::gamma_exact(&m).py_err()?;
    Ok((g.numer().to_string(), g.denom().to_string()))
}

#[pyfunction]
#[pyo3(signature = (x, m, theta))]
fn vonmangoldt_exp_sum<'py>(py: Python<'py>, x: u64, m: u32, theta: f64) -> PyResult<Bound<'py, PyComplex>> {
    Ok(complex(py, dioph::vonmangoldt_exp_sum(x, m, theta).py_err()?))
}

#[pyfunction]
#[pyo3(signature = (x, m, eps, exponent = 6.0))]
fn weyl_structure_scan<'py>(py: Python<'py>, x: u64, m: u32, eps: f64, exponent: f64) -> PyResult<Bound<'py, PyAny>> {
    let opts = WeylOptions { exponent, ..WeylOptions::default() };
    let rep = py.detach(|| dioph::weyl_structure_scan(x, m, eps, opts)).py_err()?;
    to_py(py, &rep)
}

#[pyfunction]
#[pyo3(signature = (x, r, q, c = 0.125, a = 4.0, normalizer = "mu2"))]
fn sieve_report<'py>(
    py: Python<'py>,
    x: u64,
    r: f64,
    q: u64,
    c: f64,
    a: f64,
    normalizer: &str,
) -> PyResult<Bound<'py, PyAny>> {
    let kind: Normalizer = normalizer.parse().py_err()?;
    let rep = py
        .detach(|| selberg::band_decompose(x, r, q, c, a, kind).and_then(|d| selberg::verify_sieve_bounds(&d)))
        .py_err()?;
    to_py(py, &rep)
}

#[pyfunction]
fn richness_scan<'py>(
    py: Python<'py>,
    coloring: &PyColoring,
    v: u64,
    imax: u32,
    windows: Vec<(u64, u64)>,
    kmax: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let cfg = RichnessConfig { v, imax, windows, kmax };
    let rep = py.detach(|| col::richness_scan(&coloring.inner, &cfg)).py_err()?;
    to_py(py, &rep)
}

/// Runs the command line (without the program name); returns the exit
/// code and captured stdout.
#[pyfunction]
fn run_cli(py: Python<'_>, args: Vec<String>) -> (i32, String, String) {
    py.detach(|| {
        let mut out = Vec::new();
        let mut errb = Vec::new();
        let argv = std::iter::once("sumprod".to_string()).chain(args);
        let code = sumprod_core::cli::run(argv, &mut out, &mut errb);
        (code, String::from_utf8_lossy(&out).into_owned(), String::from_utf8_lossy(&errb).into_owned())
    })
}

#[pymodule]
fn sumprod(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add("CapacityError", py.get_type::<CapacityError>())?;
    m.add("RangeError", py.get_type::<RangeError>())?;
    m.add("ConfigError", py.get_type::<ConfigError>())?;
    m.add("LabIoError", py.get_type::<LabIoError>())?;
    m.add_class::<PyColoring>()?;
    m.add_class::<PySampled>()?;
    m.add_class::<PySieve>()?;
    m.add_function(wrap_pyfunction!(verify_extremal, m)?)?;
    m.add_function(wrap_pyfunction!(sp_number, m)?)?;
    m.add_function(wrap_pyfunction!(colorability, m)?)?;
    m.add_function(wrap_pyfunction!(run_suite, m)?)?;
    m.add_function(wrap_pyfunction!(trivial_checks, m)?)?;
    m.add_function(wrap_pyfunction!(exp_sum, m)?)?;
    m.add_function(wrap_pyfunction!(dioph_verify, m)?)?;
    m.add_function(wrap_pyfunction!(vino_verify, m)?)?;
    m.add_function(wrap_pyfunction!(gamma_coprimality, m)?)?;
    m.add_function(wrap_pyfunction!(gamma_exact, m)?)?;
    m.add_function(wrap_pyfunction!(vonmangoldt_exp_sum, m)?)?;
    m.add_function(wrap_pyfunction!(weyl_structure_scan, m)?)?;
    m.add_function(wrap_pyfunction!(sieve_report, m)?)?;
    m.add_function(wrap_pyfunction!(richness_scan, m)?)?;
    m.add_function(wrap_pyfunction!(run_cli, m)?)?;
    Ok(())
}
