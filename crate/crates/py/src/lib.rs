//! Python bindings: scripted sessions, multivector fields, Jacobi
//! operators and the verification suites.

use liftlab::calculus::schouten;
use liftlab::geometry::{Chart, FirstOrderBiDiffOp, MultiVector as CoreMultiVector};
use liftlab::lifts::{jacobi_lift, poissonization};
use liftlab::verify::{self, Report as CoreReport};
use liftlab_cli::{Object, Outcome, Session as CoreSession};
use pyo3::exceptions::{PyKeyError, PyTypeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn json_to_py(py: Python<'_>, v: &serde_json::Value) -> PyResult<Py<PyAny>> {
    use serde_json::Value;
    Ok(match v {
        Value::Null => py.None(),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any().unbind(),
        Value::Number(n) => match n.as_i64() {
            Some(i) => i.into_pyobject(py)?.into_any().unbind(),
            None => n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any().unbind(),
        },
        Value::String(s) => s.into_pyobject(py)?.into_any().unbind(),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(json_to_py(py, item)?)?;
            }
            list.into_any().unbind()
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, item) in map {
                dict.set_item(k, json_to_py(py, item)?)?;
            }
            dict.into_any().unbind()
        }
    })
}

/// Outcome of a verification suite.
#[pyclass(frozen, name = "Report")]
struct Report {
    inner: CoreReport,
}

#[pymethods]
impl Report {
    #[getter]
    fn suite(&self) -> &str {
        &self.inner.suite
    }

    /// True when every non-informational condition passed.
    #[getter]
    fn passed(&self) -> bool {
        self.inner.all_passed()
    }

    #[getter]
    fn equivalences_hold(&self) -> bool {
        self.inner.equivalences_hold()
    }

    /// `label -> passed` for every record.
    fn conditions(&self) -> Vec<(String, bool)> {
        self.inner.records.iter().map(|r| (r.label.clone(), r.passed)).collect()
    }

    fn to_dict(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        json_to_py(py, &self.inner.to_json())
    }

    fn __str__(&self) -> String {
        self.inner.render_text()
    }
}

/// Multivector field on a coordinate chart.
#[pyclass(frozen, name = "MultiVector", skip_from_py_object)]
#[derive(Clone)]
struct MultiVector {
    inner: CoreMultiVector,
}

#[pymethods]
impl MultiVector {
    #[getter]
    fn degree(&self) -> usize {
        self.inner.degree()
    }

    fn is_zero(&self) -> bool {
        self.inner.is_zero()
    }

    fn __add__(&self, other: &MultiVector) -> PyResult<MultiVector> {
        Ok(MultiVector {
            inner: self.inner.try_add(&other.inner).map_err(value_error)?,
        })
    }

    fn __sub__(&self, other: &MultiVector) -> PyResult<MultiVector> {
        Ok(MultiVector {
            inner: self.inner.try_sub(&other.inner).map_err(value_error)?,
        })
    }

    fn __neg__(&self) -> MultiVector {
        MultiVector { inner: self.inner.neg() }
    }

    fn __eq__(&self, other: &MultiVector) -> bool {
        self.inner == other.inner
    }

    fn wedge(&self, other: &MultiVector) -> PyResult<MultiVector> {
        Ok(MultiVector {
            inner: self.inner.wedge(&other.inner).map_err(value_error)?,
        })
    }

    /// Schouten bracket `[[self, other]]`.
    fn schouten(&self, other: &MultiVector) -> PyResult<MultiVector> {
        Ok(MultiVector {
            inner: schouten(&self.inner, &other.inner).map_err(value_error)?,
        })
    }

    /// `[[L, L]] = 0` for a bivector.
    fn is_poisson(&self) -> PyResult<bool> {
        verify::is_poisson(&self.inner).map_err(value_error)
    }

    fn __str__(&self) -> String {
        self.inner.render()
    }

    fn __repr__(&self) -> String {
        format!("MultiVector({})", self.inner.render())
    }
}

/// First-order bidifferential operator `L + I (x) G1 + G2 (x) I + a I (x) I`.
#[pyclass(frozen, name = "JacobiOperator")]
struct JacobiOperator {
    inner: FirstOrderBiDiffOp,
}

#[pymethods]
impl JacobiOperator {
    /// The skew operator of a pair `(L, G)`.
    #[staticmethod]
    fn from_pair(lambda: &MultiVector, gamma: &MultiVector) -> PyResult<JacobiOperator> {
        Ok(JacobiOperator {
            inner: FirstOrderBiDiffOp::skew(&lambda.inner, &gamma.inner).map_err(value_error)?,
        })
    }

    fn is_jacobi(&self) -> PyResult<bool> {
        verify::is_jacobi(&self.inner).map_err(value_error)
    }

    /// Poissonization on `M x R`, rendered.
    fn poissonization(&self) -> PyResult<String> {
        let t = poissonization(&self.inner).map_err(value_error)?;
        Ok(match t.to_multivector() {
            Ok(m) if t.is_skew() => m.render(),
            _ => t.render(),
        })
    }

    /// Jacobi lift to first-order operators on `M`, rendered.
    fn jacobi_lift(&self) -> PyResult<String> {
        Ok(jacobi_lift(&self.inner).map_err(value_error)?.render())
    }

    /// Characterization suite with an optional witness `j1`.
    #[pyo3(signature = (j1=None))]
    fn characterization(&self, j1: Option<&JacobiOperator>) -> PyResult<Report> {
        let inner = verify::theorem8_suite(&self.inner, j1.map(|j| &j.inner)).map_err(value_error)?;
        Ok(Report { inner })
    }

    fn __str__(&self) -> String {
        self.inner.render()
    }
}

/// A script session: definitions accumulate across `run` calls.
#[pyclass(name = "Session")]
struct Session {
    inner: CoreSession,
}

fn outcome_to_py(py: Python<'_>, out: &Outcome) -> PyResult<Py<PyAny>> {
    let v = out.to_json();
    if let Some(e) = &out.error {
        return Err(PyValueError::new_err(format!("{}: {}", e.pos, e.message)));
    }
    json_to_py(py, &v)
}

#[pymethods]
impl Session {
    #[new]
    #[pyo3(signature = (seed=0))]
    fn new(seed: u64) -> Self {
        Session {
            inner: CoreSession::new(seed),
        }
    }

    /// Runs script text; returns `{"outputs": [...], "all_passed": bool}`.
    /// Errors raise `ValueError` with `line:col`.
    fn run(&mut self, py: Python<'_>, src: &str) -> PyResult<Py<PyAny>> {
        let out = self.inner.run_script(src);
        outcome_to_py(py, &out)
    }

    /// Bound names in definition order.
    fn names(&self) -> Vec<String> {
        self.inner.names().to_vec()
    }

    /// The statement that re-creates a binding.
    fn canonical(&self, name: &str) -> PyResult<String> {
        self.inner
            .canonical(name)
            .ok_or_else(|| PyKeyError::new_err(name.to_string()))
    }

    /// A bound multivector field.
    fn multivector(&self, name: &str) -> PyResult<MultiVector> {
        match self.inner.get(name) {
            Some(Object::Field { value, .. }) => Ok(MultiVector { inner: value.clone() }),
            Some(_) => Err(PyTypeError::new_err(format!("`{name}` is not a multivector"))),
            None => Err(PyKeyError::new_err(name.to_string())),
        }
    }

    /// A bound first-order bidifferential operator.
    fn operator(&self, name: &str) -> PyResult<JacobiOperator> {
        match self.inner.get(name) {
            Some(Object::Operator { value, .. }) => Ok(JacobiOperator { inner: value.clone() }),
            Some(_) => Err(PyTypeError::new_err(format!("`{name}` is not an operator"))),
            None => Err(PyKeyError::new_err(name.to_string())),
        }
    }

    /// Runs `check SUITE ARGS...` and returns the report.
    #[pyo3(signature = (suite, *args))]
    fn check(&mut self, suite: &str, args: Vec<String>) -> PyResult<Report> {
        let out = self.inner.run_script(&format!("check {suite} {}\n", args.join(" ")));
        if let Some(e) = out.error {
            return Err(PyValueError::new_err(e.message));
        }
        match out.outputs.into_iter().next() {
            Some(liftlab_cli::Output::Report { report, .. }) => Ok(Report { inner: report }),
            _ => Err(PyValueError::new_err("check produced no report")),
        }
    }
}

/// Coordinate basis multivector `d/dx_i ^ ...` on a chart of base coordinates.
#[pyfunction]
fn basis(coords: Vec<String>, indices: Vec<usize>) -> PyResult<MultiVector> {
    let chart = Chart::base(&coords).map_err(value_error)?.into_ref();
    if indices.iter().any(|&i| i >= chart.dim()) {
        return Err(PyValueError::new_err("index out of range"));
    }
    Ok(MultiVector {
        inner: CoreMultiVector::coordinate_basis(&chart, &indices),
    })
}

/// Randomized identity battery.
#[pyfunction]
#[pyo3(signature = (seed=0, count=30))]
fn battery(seed: u64, count: usize) -> PyResult<Report> {
    Ok(Report {
        inner: verify::battery(seed, count).map_err(value_error)?,
    })
}

/// Runs a script in a fresh session.
#[pyfunction]
#[pyo3(signature = (src, seed=0))]
fn run_script(py: Python<'_>, src: &str, seed: u64) -> PyResult<Py<PyAny>> {
    outcome_to_py(py, &liftlab_cli::run_source(src, seed))
}

#[pymodule]
#[pyo3(name = "liftlab")]
fn liftlab_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Session>()?;
    m.add_class::<MultiVector>()?;
    m.add_class::<JacobiOperator>()?;
    m.add_class::<Report>()?;
    m.add_function(wrap_pyfunction!(basis, m)?)?;
    m.add_function(wrap_pyfunction!(battery, m)?)?;
    m.add_function(wrap_pyfunction!(run_script, m)?)?;
    Ok(())
}
