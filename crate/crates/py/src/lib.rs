//! Python bindings. Report-shaped results come back as plain dicts and lists
//! (complex numbers as `[re, im]`), the field and its singular points as classes.

use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use serde::Serialize;

use foliate::foliation::{self, LineSpec, Location, SingPoint, DEFAULT_TOL};
use foliate::holonomy::{self, IntegratorSettings};
use foliate::io::{parse_field_str, FieldFile};
use foliate::moduli::{self, FiberSearchConfig};
use foliate::sampling;

create_exception!(foliate_py, FoliationError, PyException, "Raised with (code, message).");

fn err(e: foliate::Error) -> PyErr {
    FoliationError::new_err((e.code(), e.to_string()))
}

/// Serialize through JSON into Python objects.
fn to_py<T: Serialize>(py: Python<'_>, x: &T) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(x).map_err(|e| FoliationError::new_err(("Internal", e.to_string())))?;
    let json = py.import("json")?;
    Ok(json.call_method1("loads", (text,))?.unbind())
}

/// Polynomial vector field `P d/dx + Q d/dy`.
#[pyclass(name = "VectorField", module = "foliate_py", frozen)]
pub struct PyVectorField {
    inner: foliation::VectorField,
}

#[pymethods]
impl PyVectorField {
    /// Coefficients in the order 1, x, y, x^2, xy, y^2, ...
    #[new]
    fn new(degree: usize, p: Vec<Complex64>, q: Vec<Complex64>) -> PyResult<Self> {
        let file = FieldFile { degree, p, q, label: None, seed: None };
        Ok(PyVectorField { inner: file.to_field().map_err(err)? })
    }

    #[staticmethod]
    #[pyo3(signature = (seed, degree = 2))]
    fn random(seed: u64, degree: usize) -> Self {
        PyVectorField { inner: sampling::random_field(seed, degree) }
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner = parse_field_str(text).and_then(|f| f.to_field()).map_err(err)?;
        Ok(PyVectorField { inner })
    }

    fn to_json(&self) -> String {
        FieldFile::from_field(&self.inner, None, None).to_json()
    }

    #[getter]
    fn degree(&self) -> usize {
        self.inner.degree()
    }

    #[getter]
    fn p(&self) -> Vec<Complex64> {
        self.inner.p().coeffs().to_vec()
    }

    #[getter]
    fn q(&self) -> Vec<Complex64> {
        self.inner.q().coeffs().to_vec()
    }

    fn __call__(&self, x: Complex64, y: Complex64) -> (Complex64, Complex64) {
        self.inner.eval(x, y)
    }

    /// Infinite points first, then finite ones.
    #[pyo3(signature = (tol = DEFAULT_TOL))]
    fn singular_points(&self, tol: f64) -> PyResult<Vec<PySingularPoint>> {
        let set = foliation::singular_points(&self.inner, tol).map_err(err)?;
        Ok(set.iter().cloned().map(|inner| PySingularPoint { inner }).collect())
    }

    /// Residuals of the index sum and the ratio sum along the line at infinity.
    fn verify(&self) -> PyResult<(f64, f64)> {
        let bb = foliation::verify_baum_bott(&self.inner, DEFAULT_TOL).map_err(err)?;
        let cs = foliation::verify_camacho_sad_line(&self.inner, &LineSpec::Infinity, DEFAULT_TOL).map_err(err)?;
        Ok((bb, cs))
    }

    fn moduli(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_py(py, &moduli::moduli_vector(&self.inner).map_err(err)?)
    }

    /// `(p, q)` coefficients of the regular representative over the basis
    /// `x(x+y-2), y(x+y-2), xy`.
    fn regular_representative(&self) -> PyResult<(Vec<Complex64>, Vec<Complex64>)> {
        let (rep, _) = moduli::to_regular_representative(&self.inner).map_err(err)?;
        Ok((rep.p.to_vec(), rep.q.to_vec()))
    }

    fn __repr__(&self) -> String {
        format!("VectorField(degree={})", self.inner.degree())
    }
}

#[pyclass(name = "SingularPoint", module = "foliate_py", frozen)]
pub struct PySingularPoint {
    inner: SingPoint,
}

#[pymethods]
impl PySingularPoint {
    #[getter]
    fn is_infinite(&self) -> bool {
        self.inner.is_infinite()
    }

    /// `(x, y)` for finite points, the unit direction `[x : y]` for points at infinity.
    #[getter]
    fn location(&self) -> (Complex64, Complex64) {
        match self.inner.location {
            Location::Finite { x, y } => (x, y),
            loc => {
                let d = loc.direction().expect("infinite points have a direction");
                (d[0], d[1])
            }
        }
    }

    #[getter]
    fn eigenvalues(&self) -> (Complex64, Complex64) {
        (self.inner.lambda, self.inner.mu)
    }

    #[getter]
    fn ratio(&self) -> Option<Complex64> {
        self.inner.char_ratio
    }

    #[getter]
    fn nu(&self) -> Option<Complex64> {
        self.inner.nu
    }

    #[getter]
    fn residual(&self) -> f64 {
        self.inner.residual
    }

    fn __repr__(&self) -> String {
        format!("SingularPoint({:?}, nu={:?})", self.inner.location, self.inner.nu)
    }
}

#[pyfunction]
fn baum_bott_target(n: usize) -> f64 {
    foliation::baum_bott_target(n)
}

#[pyfunction]
fn dimension_report(py: Python<'_>, n: usize) -> PyResult<Py<PyAny>> {
    to_py(py, &moduli::dimension_report(n).map_err(err)?)
}

/// Jacobian of the moduli map at the field's regular representative.
#[pyfunction]
#[pyo3(signature = (field, step = 1e-6))]
fn moduli_jacobian(py: Python<'_>, field: &PyVectorField, step: f64) -> PyResult<Py<PyAny>> {
    let (rep, _) = moduli::to_regular_representative(&field.inner).map_err(err)?;
    to_py(py, &moduli::moduli_jacobian(&rep, step).map_err(err)?)
}

#[pyfunction]
fn darboux_scan(py: Python<'_>, alpha: Complex64, ks: Vec<Complex64>) -> PyResult<Py<PyAny>> {
    to_py(py, &moduli::darboux_family_scan(alpha, &ks).map_err(err)?)
}

#[pyfunction]
fn darboux_member(k: Complex64, alpha: Complex64) -> PyResult<PyVectorField> {
    Ok(PyVectorField { inner: moduli::darboux_family_member(k, alpha).map_err(err)? })
}

/// Representatives with the same index vector as `field`.
#[pyfunction]
#[pyo3(signature = (field, restarts = 20, seed = 0, random_starts = false))]
fn fiber_search(
    py: Python<'_>,
    field: &PyVectorField,
    restarts: usize,
    seed: u64,
    random_starts: bool,
) -> PyResult<Py<PyAny>> {
    let target = moduli::moduli_vector(&field.inner).map_err(err)?;
    let start = if random_starts {
        None
    } else {
        Some(moduli::to_regular_representative(&field.inner).map_err(err)?.0)
    };
    let cfg = FiberSearchConfig { restarts, seed, start, ..Default::default() };
    to_py(py, &moduli::fiber_search(&target, &cfg).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (field, index, rtol = 1e-10))]
fn holonomy_multiplier(py: Python<'_>, field: &PyVectorField, index: usize, rtol: f64) -> PyResult<Py<PyAny>> {
    let settings = IntegratorSettings { rtol, ..Default::default() };
    to_py(py, &holonomy::holonomy_multiplier(&field.inner, index, &[], settings).map_err(err)?)
}

#[pyfunction]
fn generator_product_check(py: Python<'_>, field: &PyVectorField, samples: Vec<Complex64>) -> PyResult<Py<PyAny>> {
    let report = holonomy::generator_product_check(&field.inner, None, &samples, IntegratorSettings::default())
        .map_err(err)?;
    to_py(py, &report)
}

#[pymodule]
fn foliate_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("FoliationError", m.py().get_type::<FoliationError>())?;
    m.add_class::<PyVectorField>()?;
    m.add_class::<PySingularPoint>()?;
    m.add_function(wrap_pyfunction!(baum_bott_target, m)?)?;
    m.add_function(wrap_pyfunction!(dimension_report, m)?)?;
    m.add_function(wrap_pyfunction!(moduli_jacobian, m)?)?;
    m.add_function(wrap_pyfunction!(darboux_scan, m)?)?;
    m.add_function(wrap_pyfunction!(darboux_member, m)?)?;
    m.add_function(wrap_pyfunction!(fiber_search, m)?)?;
    m.add_function(wrap_pyfunction!(holonomy_multiplier, m)?)?;
    m.add_function(wrap_pyfunction!(generator_product_check, m)?)?;
    Ok(())
}
