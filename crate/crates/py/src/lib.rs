//! Python bindings for the main types and operations.
//!
//! Matrices cross the boundary as `(dims, data)` pairs where `data` is a
//! flat row-major list of `(re, im)` tuples, mirroring the CLI matrix-file
//! schema.

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use entglkit::distill;
use entglkit::montecarlo;
use entglkit::permcrit;
use entglkit::protocol;
use entglkit::qstate::{self, ComplexMatrix};
use entglkit::robustness::{self, SchmidtSpectrum};
use entglkit::witness;
use entglkit::zoo;

type PyMatrixData = Vec<(f64, f64)>;

fn to_matrix(dims: &[usize], data: &[(f64, f64)]) -> PyResult<ComplexMatrix> {
    let total: usize = dims.iter().product();
    let entries: Vec<Complex64> = data.iter().map(|&(re, im)| Complex64::new(re, im)).collect();
    ComplexMatrix::new(total, total, entries).map_err(|e| PyValueError::new_err(e.to_string()))
}

fn to_state(dims: Vec<usize>, data: PyMatrixData) -> PyResult<entglkit::QuantumState> {
    let m = to_matrix(&dims, &data)?;
    entglkit::QuantumState::new(m, dims).map_err(|e| PyValueError::new_err(e.to_string()))
}

fn matrix_out(m: &ComplexMatrix) -> PyMatrixData {
    m.entries().iter().map(|z| (z.re, z.im)).collect()
}

/// A state from one of the named families.
#[pyclass]
#[derive(Clone)]
struct PyFamilyPoint {
    #[pyo3(get)]
    family: String,
    #[pyo3(get)]
    dims: Vec<usize>,
    #[pyo3(get)]
    data: PyMatrixData,
    #[pyo3(get)]
    flags: std::collections::HashMap<String, bool>,
    #[pyo3(get)]
    schmidt_number: Option<usize>,
}

impl PyFamilyPoint {
    fn from_zoo(point: zoo::FamilyPoint) -> Self {
        Self {
            family: format!("{:?}", point.family).to_lowercase(),
            dims: point.state.dims().to_vec(),
            data: matrix_out(point.state.matrix()),
            flags: point.flags.into_iter().collect(),
            schmidt_number: point.schmidt_number,
        }
    }
}

#[pyfunction]
fn werner(d: usize, beta: f64) -> PyResult<PyFamilyPoint> {
    zoo::werner(d, beta)
        .map(PyFamilyPoint::from_zoo)
        .map_err(|e| PyValueError::new_err(e.to_string()))
}

#[pyfunction]
fn isotropic(d: usize, beta: f64) -> PyResult<PyFamilyPoint> {
    zoo::isotropic(d, beta)
        .map(PyFamilyPoint::from_zoo)
        .map_err(|e| PyValueError::new_err(e.to_string()))
}

#[pyfunction]
fn stormer(alpha: f64) -> PyResult<PyFamilyPoint> {
    zoo::stormer(alpha)
        .map(PyFamilyPoint::from_zoo)
        .map_err(|e| PyValueError::new_err(e.to_string()))
}

#[pyfunction]
fn chessboard() -> PyFamilyPoint {
    PyFamilyPoint::from_zoo(zoo::chessboard())
}

#[pyfunction]
fn edge55() -> PyFamilyPoint {
    PyFamilyPoint::from_zoo(zoo::edge55())
}

#[pyfunction]
fn edge66() -> PyFamilyPoint {
    PyFamilyPoint::from_zoo(zoo::edge66())
}

#[pyfunction]
fn uuvvf(d: usize, eps: f64, delta: f64) -> PyResult<PyFamilyPoint> {
    zoo::uuvvf(d, eps, delta)
        .map(PyFamilyPoint::from_zoo)
        .map_err(|e| PyValueError::new_err(e.to_string()))
}

#[pyfunction]
fn watrous(d: usize, eps: f64) -> PyResult<PyFamilyPoint> {
    zoo::watrous(d, eps)
        .map(PyFamilyPoint::from_zoo)
        .map_err(|e| PyValueError::new_err(e.to_string()))
}

#[pyfunction]
fn is_ppt(dims: Vec<usize>, data: PyMatrixData, tol: f64) -> PyResult<bool> {
    let state = to_state(dims, data)?;
    qstate::is_ppt(&state, tol).map_err(|e| PyValueError::new_err(e.to_string()))
}

#[pyfunction]
fn realignment_norm(dims: Vec<usize>, data: PyMatrixData) -> PyResult<f64> {
    let state = to_state(dims, data)?;
    let r = qstate::realign(&state).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(qstate::trace_norm(&r))
}

#[pyfunction]
fn criterion_value(dims: Vec<usize>, data: PyMatrixData, sigma: Vec<usize>) -> PyResult<f64> {
    let d = dims.first().copied().unwrap_or(0);
    let state = to_state(dims, data)?;
    let c = permcrit::PermutationCriterion::from_one_line(&sigma, d)
        .map_err(|e| PyValueError::new_err(e.to_string()))?;
    permcrit::criterion_value(&state, &c).map_err(|e| PyValueError::new_err(e.to_string()))
}

#[pyfunction]
fn classify_permutations(parties: usize) -> PyResult<(usize, Vec<Vec<usize>>)> {
    let c = permcrit::classify_independent(parties)
        .map_err(|e| PyValueError::new_err(e.to_string()))?;
    let reps = c.representatives.iter().map(|p| p.one_line()).collect();
    Ok((c.orbit_count, reps))
}

#[pyfunction]
fn schmidt_coefficients(amplitudes: PyMatrixData, d_a: usize, d_b: usize) -> PyResult<Vec<f64>> {
    let amps: Vec<Complex64> = amplitudes
        .iter()
        .map(|&(re, im)| Complex64::new(re, im))
        .collect();
    let psi = qstate::PureStateVector::new(amps, d_a, d_b)
        .map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(qstate::schmidt_decompose(&psi).coefficients)
}

#[pyfunction]
#[pyo3(signature = (dims, data, n_tests=10_000, opt_steps=300, seed=0, copies=1))]
fn distill_test(
    dims: Vec<usize>,
    data: PyMatrixData,
    n_tests: usize,
    opt_steps: usize,
    seed: u64,
    copies: usize,
) -> PyResult<(bool, f64, usize)> {
    let state = to_state(dims, data)?;
    let verdict = if copies == 1 {
        distill::distill_test_1copy(&state, n_tests, opt_steps, seed)
    } else {
        distill::distill_test_ncopy(&state, copies, n_tests, opt_steps, seed)
    }
    .map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok((verdict.detected, verdict.min_value, verdict.tests_run))
}

#[pyfunction]
fn reduction_check(dims: Vec<usize>, data: PyMatrixData) -> PyResult<bool> {
    let state = to_state(dims, data)?;
    distill::reduction_check(&state).map_err(|e| PyValueError::new_err(e.to_string()))
}

#[pyfunction]
fn schmidt_witness_matrix(d: usize, n: usize) -> PyResult<(Vec<usize>, PyMatrixData)> {
    let w = witness::schmidt_witness(d, n).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok((vec![d, d], matrix_out(&w.matrix)))
}

#[pyfunction]
fn evaluate_witness(
    w_dims: Vec<usize>,
    w_data: PyMatrixData,
    s_dims: Vec<usize>,
    s_data: PyMatrixData,
) -> PyResult<f64> {
    let w = to_matrix(&w_dims, &w_data)?;
    let state = to_state(s_dims, s_data)?;
    witness::evaluate_witness_matrix(&w, state.matrix())
        .map_err(|e| PyValueError::new_err(e.to_string()))
}

#[pyfunction]
fn robustness_pure(coeffs: Vec<f64>, d: usize) -> PyResult<(f64, f64, f64)> {
    let sp = SchmidtSpectrum::new(coeffs, d).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(robustness::robustness_pure(&sp))
}

#[pyfunction]
fn recurrence_step(y: f64) -> PyResult<f64> {
    protocol::recurrence_step(y).map_err(|e| PyValueError::new_err(e.to_string()))
}

#[pyfunction]
fn qpa_step(p: [f64; 4]) -> PyResult<[f64; 4]> {
    protocol::qpa_step(p).map_err(|e| PyValueError::new_err(e.to_string()))
}

#[pyfunction]
fn breeding_yield(p: [f64; 4]) -> PyResult<(f64, f64)> {
    let y = protocol::breeding_yield(p).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok((y.raw, y.clamped))
}

#[pyfunction]
fn nielsen_feasible(source: Vec<f64>, target: Vec<f64>) -> PyResult<bool> {
    protocol::nielsen_feasible(&source, &target).map_err(|e| PyValueError::new_err(e.to_string()))
}

#[pyfunction]
fn max_conversion_prob(source: Vec<f64>, target: Vec<f64>) -> PyResult<f64> {
    protocol::max_conversion_prob(&source, &target)
        .map_err(|e| PyValueError::new_err(e.to_string()))
}

#[pyfunction]
#[pyo3(signature = (d, n_states, n_tests, opt_steps, seed))]
fn volume_experiment(
    d: usize,
    n_states: usize,
    n_tests: usize,
    opt_steps: usize,
    seed: u64,
) -> PyResult<(f64, f64, Vec<(usize, f64)>)> {
    let r = montecarlo::volume_experiment(d, n_states, n_tests, opt_steps, seed)
        .map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok((r.frac_ppt, r.frac_npt_undetected, r.detection_curve))
}

#[pymodule]
fn entglkit_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyFamilyPoint>()?;
    m.add_function(wrap_pyfunction!(werner, m)?)?;
    m.add_function(wrap_pyfunction!(isotropic, m)?)?;
    m.add_function(wrap_pyfunction!(stormer, m)?)?;
    m.add_function(wrap_pyfunction!(chessboard, m)?)?;
    m.add_function(wrap_pyfunction!(edge55, m)?)?;
    m.add_function(wrap_pyfunction!(edge66, m)?)?;
    m.add_function(wrap_pyfunction!(uuvvf, m)?)?;
    m.add_function(wrap_pyfunction!(watrous, m)?)?;
    m.add_function(wrap_pyfunction!(is_ppt, m)?)?;
    m.add_function(wrap_pyfunction!(realignment_norm, m)?)?;
    m.add_function(wrap_pyfunction!(criterion_value, m)?)?;
    m.add_function(wrap_pyfunction!(classify_permutations, m)?)?;
    m.add_function(wrap_pyfunction!(schmidt_coefficients, m)?)?;
    m.add_function(wrap_pyfunction!(distill_test, m)?)?;
    m.add_function(wrap_pyfunction!(reduction_check, m)?)?;
    m.add_function(wrap_pyfunction!(schmidt_witness_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate_witness, m)?)?;
    m.add_function(wrap_pyfunction!(robustness_pure, m)?)?;
    m.add_function(wrap_pyfunction!(recurrence_step, m)?)?;
    m.add_function(wrap_pyfunction!(qpa_step, m)?)?;
    m.add_function(wrap_pyfunction!(breeding_yield, m)?)?;
    m.add_function(wrap_pyfunction!(nielsen_feasible, m)?)?;
    m.add_function(wrap_pyfunction!(max_conversion_prob, m)?)?;
    m.add_function(wrap_pyfunction!(volume_experiment, m)?)?;
    Ok(())
}
