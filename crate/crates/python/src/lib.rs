//! Python bindings: series, partition functions, quasi-shuffle reductions,
//! detector verification and search.

use macmahon::detector::{self, Detector};
use macmahon::partition::{self, PartVector};
use macmahon::quasimodular::{self, Verdict};
use macmahon::series::{format_rational, parse_rational, ExactRational};
use macmahon::shuffle::{self, LinComb, Word};
use macmahon::{Error, QSeries};
use num_bigint::BigInt;
use num_traits::Zero;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::InvalidArgument(_) | Error::InsufficientTruncation { .. } | Error::Parse(_) => {
            PyValueError::new_err(e.to_string())
        }
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

fn part_vector(v: Vec<u32>) -> PyResult<PartVector> {
    PartVector::new(v).map_err(to_py)
}

fn fraction<'py>(py: Python<'py>, x: &ExactRational) -> PyResult<Bound<'py, PyAny>> {
    let cls = py.import("fractions")?.getattr("Fraction")?;
    cls.call1((x.numer().clone(), x.denom().clone()))
}

fn lincomb_to_py<'py>(py: Python<'py>, l: &LinComb) -> PyResult<Vec<(Vec<u32>, Bound<'py, PyAny>)>> {
    l.iter()
        .map(|(w, c)| Ok((w.letters().to_vec(), fraction(py, c)?)))
        .collect()
}

/// Truncated power series in q with exact rational coefficients.
#[pyclass(name = "QSeries", frozen, skip_from_py_object, module = "pymacmahon")]
#[derive(Clone)]
struct PyQSeries {
    inner: QSeries,
}

#[pymethods]
impl PyQSeries {
    /// Builds a series from coefficients given as ints, Fractions or "p/q"
    /// strings; the truncation is `len(coeffs) - 1`.
    #[new]
    fn new(coeffs: Vec<Bound<'_, PyAny>>) -> PyResult<Self> {
        let parsed = coeffs
            .iter()
            .map(|c| parse_rational(&c.str()?.to_string()).map_err(to_py))
            .collect::<PyResult<Vec<_>>>()?;
        Ok(PyQSeries {
            inner: QSeries::from_coeffs(parsed).map_err(to_py)?,
        })
    }

    #[getter]
    fn truncation(&self) -> usize {
        self.inner.truncation()
    }

    fn coeff<'py>(&self, py: Python<'py>, n: usize) -> PyResult<Bound<'py, PyAny>> {
        if n > self.inner.truncation() {
            return Err(PyValueError::new_err(format!(
                "index {n} beyond truncation {}",
                self.inner.truncation()
            )));
        }
        fraction(py, self.inner.coeff(n))
    }

    fn coeffs<'py>(&self, py: Python<'py>) -> PyResult<Vec<Bound<'py, PyAny>>> {
        self.inner.coeffs().iter().map(|c| fraction(py, c)).collect()
    }

    /// Coefficients as "p/q" strings.
    fn coeff_strings(&self) -> Vec<String> {
        self.inner.coeffs().iter().map(format_rational).collect()
    }

    /// `D^power` with `D = q d/dq`.
    #[pyo3(signature = (power = 1))]
    fn apply_d(&self, power: u32) -> Self {
        PyQSeries {
            inner: self.inner.apply_d(power),
        }
    }

    fn scale(&self, c: &Bound<'_, PyAny>) -> PyResult<Self> {
        let c = parse_rational(&c.str()?.to_string()).map_err(to_py)?;
        Ok(PyQSeries {
            inner: self.inner.scale(&c),
        })
    }

    fn __add__(&self, other: &Self) -> Self {
        PyQSeries {
            inner: &self.inner + &other.inner,
        }
    }

    fn __sub__(&self, other: &Self) -> Self {
        PyQSeries {
            inner: &self.inner - &other.inner,
        }
    }

    fn __mul__(&self, other: &Self) -> Self {
        PyQSeries {
            inner: &self.inner * &other.inner,
        }
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn __len__(&self) -> usize {
        self.inner.truncation() + 1
    }

    fn __repr__(&self) -> String {
        format!("QSeries({})", self.inner)
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json_string(&self.inner)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner: QSeries = serde_json_from(text)?;
        Ok(PyQSeries { inner })
    }
}

fn serde_json_string<T: serde::Serialize>(x: &T) -> PyResult<String> {
    serde_json::to_string(x).map_err(|e| PyValueError::new_err(e.to_string()))
}

fn serde_json_from<T: serde::de::DeserializeOwned>(text: &str) -> PyResult<T> {
    serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))
}

fn wrap(inner: QSeries) -> PyQSeries {
    PyQSeries { inner }
}

/// `M_v(n)` by enumerating partitions.
#[pyfunction]
fn brute_m(vec: Vec<u32>, n: u64) -> PyResult<BigInt> {
    partition::brute_m(&part_vector(vec)?, n).map_err(to_py)
}

/// Generating series `Σ M_v(n) q^n`.
#[pyfunction]
fn u_series(vec: Vec<u32>, truncation: usize) -> PyResult<PyQSeries> {
    Ok(wrap(partition::u_series(&part_vector(vec)?, truncation)))
}

/// MacMahon's `U_a = Σ M_a(n) q^n`.
#[pyfunction]
fn macmahon_u(a: usize, truncation: usize) -> PyResult<PyQSeries> {
    partition::macmahon_u(a, truncation).map(wrap).map_err(to_py)
}

#[pyfunction]
fn sym_u(vec: Vec<u32>, truncation: usize) -> PyResult<PyQSeries> {
    shuffle::sym_u(&part_vector(vec)?, truncation).map(wrap).map_err(to_py)
}

#[pyfunction]
fn g_series(k: u32, truncation: usize) -> PyResult<PyQSeries> {
    quasimodular::g_series(k, truncation).map(wrap).map_err(to_py)
}

#[pyfunction]
fn h_series(k: u32, truncation: usize) -> PyResult<PyQSeries> {
    quasimodular::h_series(k, truncation).map(wrap).map_err(to_py)
}

#[pyfunction]
fn f_series(k: u32, l: u32, truncation: usize) -> PyResult<PyQSeries> {
    quasimodular::f_series(k, l, truncation).map(wrap).map_err(to_py)
}

/// Coefficients of `series` in the monomials `G2^i G4^j G6^l` of weight
/// `<= max_weight`, keyed by monomial label. Zero coefficients are omitted.
#[pyfunction]
fn express_quasimodular<'py>(
    py: Python<'py>,
    series: &PyQSeries,
    max_weight: u32,
) -> PyResult<Bound<'py, PyDict>> {
    let basis = quasimodular::qm_mixed_basis(max_weight, series.inner.truncation()).map_err(to_py)?;
    let rep = quasimodular::express_in_basis(&series.inner, &basis).map_err(to_py)?;
    let out = PyDict::new(py);
    for (e, c) in rep.coefficients.iter().filter(|(_, c)| !c.is_zero()) {
        out.set_item(e.to_string(), fraction(py, c)?)?;
    }
    Ok(out)
}

/// `(True, None)` when the series detects primes on its window, otherwise
/// `(False, witness)`.
#[pyfunction]
fn is_prime_detecting(series: &PyQSeries) -> PyResult<(bool, Option<usize>)> {
    match quasimodular::is_prime_detecting(&series.inner).map_err(to_py)? {
        Verdict::Yes => Ok((true, None)),
        Verdict::No { witness, .. } => Ok((false, Some(witness))),
    }
}

/// Quasi-shuffle product of two words as `[(vector, Fraction), ...]`.
#[pyfunction]
fn quasi_shuffle<'py>(py: Python<'py>, a: Vec<u32>, b: Vec<u32>) -> PyResult<Vec<(Vec<u32>, Bound<'py, PyAny>)>> {
    if a.contains(&0) || b.contains(&0) {
        return Err(PyValueError::new_err("letters must be >= 1"));
    }
    lincomb_to_py(py, &shuffle::quasi_shuffle(&Word::new(a), &Word::new(b)))
}

/// Convolution `Σ_{i+j=n} M_a(i) M_b(j)` as a combination of words.
#[pyfunction]
fn convolution_reduce<'py>(py: Python<'py>, a: Vec<u32>, b: Vec<u32>) -> PyResult<Vec<(Vec<u32>, Bound<'py, PyAny>)>> {
    let l = shuffle::convolution_reduce(&part_vector(a)?, &part_vector(b)?);
    lincomb_to_py(py, &l)
}

/// `n M_v(n)` as a combination of `M_w(n)`.
#[pyfunction]
#[pyo3(signature = (vec, verify_to = 120))]
fn times_n_reduce<'py>(py: Python<'py>, vec: Vec<u32>, verify_to: usize) -> PyResult<Vec<(Vec<u32>, Bound<'py, PyAny>)>> {
    let l = shuffle::times_n_reduce(&part_vector(vec)?, verify_to).map_err(to_py)?;
    lincomb_to_py(py, &l)
}

/// Checks the five polynomial-coefficient detectors; returns certificates
/// as JSON strings.
#[pyfunction]
#[pyo3(signature = (truncation = 150))]
fn verify_table1(truncation: usize) -> PyResult<Vec<String>> {
    detector::verify_table1(truncation)
        .map_err(to_py)?
        .iter()
        .map(serde_json_string)
        .collect()
}

/// Certifies a detector given in the JSON detector-file format.
#[pyfunction]
#[pyo3(signature = (detector_json, truncation = 150))]
fn verify_detector(detector_json: &str, truncation: usize) -> PyResult<String> {
    let det = Detector::from_json(detector_json).map_err(to_py)?;
    let series = det.series(truncation).map_err(to_py)?;
    serde_json_string(&detector::certify(det.to_string(), &series).map_err(to_py)?)
}

/// Series of a detector in the JSON detector-file format.
#[pyfunction]
fn detector_series(detector_json: &str, truncation: usize) -> PyResult<PyQSeries> {
    let det = Detector::from_json(detector_json).map_err(to_py)?;
    det.series(truncation).map(wrap).map_err(to_py)
}

/// Basis of polynomial-coefficient detectors, each as lists of integer
/// coefficients (lowest degree first) for `M_1, M_2, ...`.
#[pyfunction]
#[pyo3(signature = (max_a, max_deg, truncation = 150))]
fn search_poly_detectors(max_a: usize, max_deg: usize, truncation: usize) -> PyResult<Vec<Vec<Vec<BigInt>>>> {
    Ok(detector::search_poly_detectors(max_a, max_deg, truncation)
        .map_err(to_py)?
        .into_iter()
        .map(|d| d.polys.iter().map(|p| p.coeffs().to_vec()).collect())
        .collect())
}

/// Constant-coefficient detectors with `|v| <= d`, each as
/// `[(vector, int), ...]`.
#[pyfunction]
#[pyo3(signature = (d, truncation = 150))]
fn search_const_detectors(d: u32, truncation: usize) -> PyResult<Vec<Vec<(Vec<u32>, BigInt)>>> {
    Ok(detector::search_const_detectors(d, truncation)
        .map_err(to_py)?
        .detectors
        .into_iter()
        .map(|det| det.terms.into_iter().map(|(w, c)| (w.letters().to_vec(), c)).collect())
        .collect())
}

/// Runs the command-line interface in-process and returns its exit code.
#[pyfunction]
fn run_cli(args: Vec<String>) -> i32 {
    macmahon::cli::run(std::iter::once("macmahon".to_string()).chain(args))
}

#[pymodule]
pub fn pymacmahon(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyQSeries>()?;
    m.add_function(wrap_pyfunction!(brute_m, m)?)?;
    m.add_function(wrap_pyfunction!(u_series, m)?)?;
    m.add_function(wrap_pyfunction!(macmahon_u, m)?)?;
    m.add_function(wrap_pyfunction!(sym_u, m)?)?;
    m.add_function(wrap_pyfunction!(g_series, m)?)?;
    m.add_function(wrap_pyfunction!(h_series, m)?)?;
    m.add_function(wrap_pyfunction!(f_series, m)?)?;
    m.add_function(wrap_pyfunction!(express_quasimodular, m)?)?;
    m.add_function(wrap_pyfunction!(is_prime_detecting, m)?)?;
    m.add_function(wrap_pyfunction!(quasi_shuffle, m)?)?;
    m.add_function(wrap_pyfunction!(convolution_reduce, m)?)?;
    m.add_function(wrap_pyfunction!(times_n_reduce, m)?)?;
    m.add_function(wrap_pyfunction!(verify_table1, m)?)?;
    m.add_function(wrap_pyfunction!(verify_detector, m)?)?;
    m.add_function(wrap_pyfunction!(detector_series, m)?)?;
    m.add_function(wrap_pyfunction!(search_poly_detectors, m)?)?;
    m.add_function(wrap_pyfunction!(search_const_detectors, m)?)?;
    m.add_function(wrap_pyfunction!(run_cli, m)?)?;
    Ok(())
}
