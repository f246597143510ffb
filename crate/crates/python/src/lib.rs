//! Python bindings. Structured results come back as plain dicts and lists.

use std::collections::BTreeMap;

use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;

use hyperproc::crm::{
    self, mct::geometric_to_one, mp_reduce, pi1_dne, transfer_from_lpo_all, transfer_from_lpr, transfer_from_mct,
    HonestLpr, HonestMct, MctOptions, Sigma1Instance, TransferLpo,
};
use hyperproc::formula::{eval_delta0, eval_statement, parse_formula, parse_statement_with_params, Env, Statement};
use hyperproc::hyperlogic::{hyper_implies, hyper_not, hyper_or_alt, hyper_or_witnessed, HyperFormula, WitnessProcedure};
use hyperproc::omega::{check_omega_invariance, extract_modulus, omega_ca, OmegaParamFormula, ScanMode, ScanOptions};
use hyperproc::reals::{self, ConstructiveReal};
use hyperproc::report::{self, RunConfig};
use hyperproc::transfer::{in_t, pi1_trans_level};
use hyperproc::{Error, ErrorClass, HyperModel, Level};

create_exception!(pyhyperproc, PreconditionError, PyRuntimeError, "A budget, cap or precondition stopped the computation.");

fn py_err(e: impl Into<Error>) -> PyErr {
    let e = e.into();
    match e.class() {
        ErrorClass::Usage => PyValueError::new_err(e.to_string()),
        ErrorClass::Precondition => PreconditionError::new_err(e.to_string()),
    }
}

fn to_py(py: Python<'_>, v: &impl Serialize) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(v).map_err(py_err)?;
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

fn level(text: &str) -> PyResult<Level> {
    match text.trim() {
        "N" => Ok(Level::STANDARD),
        "*N" => Ok(Level::Top),
        t => t
            .strip_prefix('N')
            .and_then(|k| k.parse().ok())
            .map(Level::Finite)
            .ok_or_else(|| PyValueError::new_err(format!("bad level `{text}`"))),
    }
}

fn scan(mode: &str, seed: u64, samples: usize) -> PyResult<ScanOptions> {
    let mode = match mode {
        "exhaustive" => ScanMode::Exhaustive,
        "sampled" => ScanMode::Sampled { count: samples, seed },
        other => return Err(PyValueError::new_err(format!("unknown mode `{other}`"))),
    };
    Ok(ScanOptions { mode, ..ScanOptions::default() })
}

/// A finite stratified model `[0, M]` with thresholds `t0 < t1 < ... < M`.
#[pyclass(frozen, skip_from_py_object, name = "Model", module = "pyhyperproc")]
#[derive(Clone)]
struct PyModel(HyperModel);

#[pymethods]
impl PyModel {
    #[new]
    fn new(max_element: u64, thresholds: Vec<u64>) -> PyResult<Self> {
        HyperModel::new(max_element, thresholds).map(PyModel).map_err(py_err)
    }

    /// `M=2048,levels=16,128`
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        text.parse::<HyperModel>().map(PyModel).map_err(py_err)
    }

    #[staticmethod]
    fn default() -> Self {
        PyModel(HyperModel::default_model())
    }

    #[getter]
    fn max_element(&self) -> u64 {
        self.0.max_element()
    }

    #[getter]
    fn thresholds(&self) -> Vec<u64> {
        self.0.thresholds().to_vec()
    }

    fn level_of(&self, n: u64) -> PyResult<String> {
        let h = self.0.hypernat(n).map_err(py_err)?;
        Ok(self.0.level_of(h).map_err(py_err)?.to_string())
    }

    /// `(lo, hi)` of the infinite numbers above the given level.
    fn omega_band(&self, level_name: &str) -> PyResult<(u64, u64)> {
        let b = self.0.omega_band(level(level_name)?).map_err(py_err)?;
        Ok((b.lo, b.hi))
    }

    fn __repr__(&self) -> String {
        self.0.to_string()
    }
}

/// A fast Cauchy real, built from a spec such as `rat:3/4` or
/// `indicator: n = 5`.
#[pyclass(frozen, name = "Real", module = "pyhyperproc")]
struct PyReal(ConstructiveReal);

#[pymethods]
impl PyReal {
    #[new]
    fn new(model: &PyModel, spec: &str) -> PyResult<Self> {
        reals::parse_real(&model.0, spec).map(PyReal).map_err(py_err)
    }

    /// The `n`-th approximation as `(numerator, denominator)` strings.
    fn at(&self, n: u64) -> (String, String) {
        let q = self.0.at(n);
        (q.numer().to_string(), q.denom().to_string())
    }

    fn validate(&self, py: Python<'_>, depth: u64) -> PyResult<Py<PyAny>> {
        to_py(py, &reals::validate_fast_cauchy(&self.0, depth))
    }

    fn lt(&self, py: Python<'_>, other: &PyReal, budget: u64) -> PyResult<Py<PyAny>> {
        to_py(py, &reals::real_lt(&self.0, &other.0, budget))
    }

    fn eq(&self, other: &PyReal, depth: u64) -> bool {
        reals::real_eq(&self.0, &other.0, depth)
    }

    fn __add__(&self, other: &PyReal) -> PyReal {
        PyReal(reals::real_add(&self.0, &other.0))
    }

    fn __neg__(&self) -> PyReal {
        PyReal(reals::real_neg(&self.0))
    }
}

fn stmt(text: &str, params: Option<BTreeMap<String, u64>>) -> PyResult<Statement> {
    let params = params.unwrap_or_default().into_iter().map(|(k, v)| (k, Some(v))).collect();
    parse_statement_with_params(text, &params).map_err(py_err)
}

fn instance(phi: &str, var: &str) -> PyResult<Sigma1Instance> {
    Sigma1Instance::new(parse_formula(phi).map_err(py_err)?, var).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (model, text, params=None))]
fn eval(model: &PyModel, text: &str, params: Option<BTreeMap<String, u64>>) -> PyResult<bool> {
    eval_statement(&model.0, &stmt(text, params)?).map_err(py_err)
}

/// Truth of a bounded formula under the given variable values.
#[pyfunction]
#[pyo3(signature = (model, text, env=None))]
fn eval_formula(model: &PyModel, text: &str, env: Option<BTreeMap<String, u64>>) -> PyResult<bool> {
    let env = Env { vars: env.unwrap_or_default(), ..Env::default() };
    eval_delta0(&model.0, &parse_formula(text).map_err(py_err)?, &env).map_err(py_err)
}

fn psi(text: &str, omega_var: &str) -> PyResult<OmegaParamFormula> {
    OmegaParamFormula::infer(parse_formula(text).map_err(py_err)?, omega_var).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (model, text, omega_var="w", mode="exhaustive", seed=0, samples=4096))]
fn omega_check(
    py: Python<'_>,
    model: &PyModel,
    text: &str,
    omega_var: &str,
    mode: &str,
    seed: u64,
    samples: usize,
) -> PyResult<Py<PyAny>> {
    let r = check_omega_invariance(&model.0, &psi(text, omega_var)?, &scan(mode, seed, samples)?).map_err(py_err)?;
    to_py(py, &r)
}

#[pyfunction]
#[pyo3(signature = (model, text, omega_var="w"))]
fn omega_modulus(py: Python<'_>, model: &PyModel, text: &str, omega_var: &str) -> PyResult<Py<PyAny>> {
    to_py(py, &extract_modulus(&model.0, &psi(text, omega_var)?, &ScanOptions::default()).map_err(py_err)?)
}

/// Members of the standard set the formula defines.
#[pyfunction]
#[pyo3(signature = (model, text, omega_var="w", at=None))]
fn omega_set(model: &PyModel, text: &str, omega_var: &str, at: Option<u64>) -> PyResult<Vec<u64>> {
    let psi = psi(text, omega_var)?;
    let at = match at {
        Some(w) => w,
        None => psi.band(&model.0).map_err(py_err)?.midpoint(),
    };
    Ok(omega_ca(&model.0, &psi, at, &ScanOptions::default()).map_err(py_err)?.members())
}

#[pyfunction]
#[pyo3(signature = (model, text, params=None))]
fn transfer_in_t(py: Python<'_>, model: &PyModel, text: &str, params: Option<BTreeMap<String, u64>>) -> PyResult<Py<PyAny>> {
    to_py(py, &in_t(&model.0, &stmt(text, params)?).map_err(py_err)?)
}

#[pyfunction]
#[pyo3(signature = (model, phi, var="n", level_name="*N"))]
fn pi1_trans(model: &PyModel, phi: &str, var: &str, level_name: &str) -> PyResult<bool> {
    pi1_trans_level(&model.0, &parse_formula(phi).map_err(py_err)?, var, level(level_name)?).map_err(py_err)
}

/// `op` is `implies`, `not`, `or` (needs `witness`) or `alt-or`.
#[pyfunction]
#[pyo3(signature = (model, op, a, b=None, witness=None, omega_var="w"))]
fn hyper(
    py: Python<'_>,
    model: &PyModel,
    op: &str,
    a: &str,
    b: Option<&str>,
    witness: Option<&str>,
    omega_var: &str,
) -> PyResult<Py<PyAny>> {
    let m = &model.0;
    let a = stmt(a, None)?;
    let b = || -> PyResult<Statement> { stmt(b.ok_or_else(|| PyValueError::new_err("`b` is required"))?, None) };
    let v = match op {
        "implies" => hyper_implies(m, &a, &b()?),
        "not" => hyper_not(m, &a),
        "alt-or" => hyper_or_alt(m, &a, &b()?),
        "or" => {
            let w = witness.ok_or_else(|| PyValueError::new_err("`witness` is required for `or`"))?;
            let w = WitnessProcedure::verify(m, psi(w, omega_var)?, &ScanOptions::default()).map_err(py_err)?;
            hyper_or_witnessed(m, &HyperFormula::from(a), &HyperFormula::from(b()?), &w)
        }
        other => return Err(PyValueError::new_err(format!("unknown connective `{other}`"))),
    };
    to_py(py, &v.map_err(py_err)?)
}

#[pyfunction]
#[pyo3(signature = (model, phi, var="n"))]
fn lpo_transfer(py: Python<'_>, model: &PyModel, phi: &str, var: &str) -> PyResult<Py<PyAny>> {
    to_py(py, &transfer_from_lpo_all(&model.0, &TransferLpo::default(), &instance(phi, var)?).map_err(py_err)?)
}

#[pyfunction]
#[pyo3(signature = (model, phi, var="n"))]
fn lpr_transfer(py: Python<'_>, model: &PyModel, phi: &str, var: &str) -> PyResult<Py<PyAny>> {
    to_py(py, &transfer_from_lpr(&model.0, &HonestLpr, &instance(phi, var)?).map_err(py_err)?)
}

/// Limit of `1 - 1/2^(n+1)` as `(value, modulus)`.
#[pyfunction]
fn mct_geometric(model: &PyModel) -> PyResult<(String, Vec<u64>)> {
    let r = crm::mct_limit(&model.0, &geometric_to_one(), &MctOptions::default()).map_err(py_err)?;
    Ok((r.value.to_string(), r.modulus))
}

#[pyfunction]
#[pyo3(signature = (model, phi, var="n"))]
fn mct_transfer(py: Python<'_>, model: &PyModel, phi: &str, var: &str) -> PyResult<Py<PyAny>> {
    let one = ConstructiveReal::from_integer(1);
    let d = transfer_from_mct(&model.0, &HonestMct::default(), &instance(phi, var)?, &geometric_to_one(), &one)
        .map_err(py_err)?;
    to_py(py, &d)
}

#[pyfunction]
#[pyo3(signature = (model, phi, var="n"))]
fn mp(py: Python<'_>, model: &PyModel, phi: &str, var: &str) -> PyResult<Py<PyAny>> {
    to_py(py, &mp_reduce(&model.0, &instance(phi, var)?).map_err(py_err)?)
}

#[pyfunction]
#[pyo3(signature = (model, phi, var="n"))]
fn dne(py: Python<'_>, model: &PyModel, phi: &str, var: &str) -> PyResult<Py<PyAny>> {
    to_py(py, &pi1_dne(&model.0, &instance(phi, var)?).map_err(py_err)?)
}

/// The demo scoreboard as a JSON report string.
#[pyfunction]
#[pyo3(signature = (model=None, seed=0))]
fn demo(py: Python<'_>, model: Option<&PyModel>, seed: u64) -> PyResult<String> {
    let mut cfg = RunConfig { seed, ..RunConfig::default() };
    if let Some(m) = model {
        cfg.model = m.0.clone();
    }
    let board = py.detach(|| hyperproc::demo::run_demo(&cfg)).map_err(py_err)?;
    report::render("crm demo", &cfg, &board).map_err(py_err)
}

#[pymodule]
fn pyhyperproc(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("PreconditionError", m.py().get_type::<PreconditionError>())?;
    m.add("__version__", report::VERSION)?;
    m.add_class::<PyModel>()?;
    m.add_class::<PyReal>()?;
    m.add_function(wrap_pyfunction!(eval, m)?)?;
    m.add_function(wrap_pyfunction!(eval_formula, m)?)?;
    m.add_function(wrap_pyfunction!(omega_check, m)?)?;
    m.add_function(wrap_pyfunction!(omega_modulus, m)?)?;
    m.add_function(wrap_pyfunction!(omega_set, m)?)?;
    m.add_function(wrap_pyfunction!(transfer_in_t, m)?)?;
    m.add_function(wrap_pyfunction!(pi1_trans, m)?)?;
    m.add_function(wrap_pyfunction!(hyper, m)?)?;
    m.add_function(wrap_pyfunction!(lpo_transfer, m)?)?;
    m.add_function(wrap_pyfunction!(lpr_transfer, m)?)?;
    m.add_function(wrap_pyfunction!(mct_geometric, m)?)?;
    m.add_function(wrap_pyfunction!(mct_transfer, m)?)?;
    m.add_function(wrap_pyfunction!(mp, m)?)?;
    m.add_function(wrap_pyfunction!(dne, m)?)?;
    m.add_function(wrap_pyfunction!(demo, m)?)?;
    Ok(())
}
