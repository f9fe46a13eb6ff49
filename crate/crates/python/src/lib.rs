//! Python bindings: thin wrappers over the core types plus JSON-string
//! passthrough for structured results, so the Python side needs nothing
//! beyond the standard `json` module.

use orlicz_core::bodies::{random_body, BodyClass, ConvexBody};
use orlicz_core::functionals::{
    affine_orlicz, ellipsoid_closed_form, geominimal_orlicz, lp_affine_closed_form, OptimizerOpts,
};
use orlicz_core::grid::SphereGrid;
use orlicz_core::harness::{run_suite, SUITE_NAMES};
use orlicz_core::mixed;
use orlicz_core::orlicz::{OrliczFunction, PhiSpec};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn err(e: orlicz_core::Error) -> PyErr {
    PyValueError::new_err(format!("[{}] {e}", e.code()))
}

fn jerr(e: serde_json::Error) -> PyErr {
    PyValueError::new_err(format!("[ParseError] {e}"))
}

/// Quadrature grid on the unit sphere.
#[pyclass(name = "Grid")]
struct PyGrid {
    inner: SphereGrid,
}

#[pymethods]
impl PyGrid {
    #[new]
    fn new(dim: usize, resolution: usize) -> PyResult<Self> {
        Ok(PyGrid {
            inner: SphereGrid::build(dim, resolution).map_err(err)?,
        })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }
}

/// Convex body in support-function representation.
#[pyclass(name = "Body")]
struct PyBody {
    inner: ConvexBody,
}

#[pymethods]
impl PyBody {
    #[staticmethod]
    fn ball(r: f64) -> PyBody {
        PyBody {
            inner: ConvexBody::ball(r),
        }
    }

    #[staticmethod]
    fn random(dim: usize, seed: u64, class: &str) -> PyResult<PyBody> {
        let class = match class {
            "smooth" => BodyClass::Smooth,
            "polytope" => BodyClass::Polytope,
            other => return Err(PyValueError::new_err(format!("unknown body class: {other}"))),
        };
        Ok(PyBody {
            inner: random_body(dim, seed, class).map_err(err)?,
        })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<PyBody> {
        let inner: ConvexBody = serde_json::from_str(text).map_err(jerr)?;
        inner.validate().map_err(err)?;
        Ok(PyBody { inner })
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner).map_err(jerr)
    }

    fn volume(&self) -> PyResult<f64> {
        self.inner.volume().map_err(err)
    }

    fn polar(&self) -> PyResult<PyBody> {
        Ok(PyBody {
            inner: self.inner.polar().map_err(err)?,
        })
    }

    fn scaled(&self, s: f64) -> PyBody {
        PyBody {
            inner: self.inner.scaled(s),
        }
    }

    fn support(&self, grid: &PyGrid) -> PyResult<Vec<f64>> {
        self.inner.support_profile(&grid.inner).map_err(err)
    }
}

/// Orlicz function phi with its audited classification.
#[pyclass(name = "Phi")]
struct PyPhi {
    inner: OrliczFunction,
}

#[pymethods]
impl PyPhi {
    #[new]
    fn new(spec: &str, dim: usize) -> PyResult<Self> {
        Ok(PyPhi {
            inner: PhiSpec::parse(spec)
                .and_then(|s| s.into_function(dim))
                .map_err(err)?,
        })
    }

    fn eval(&self, t: f64) -> PyResult<f64> {
        self.inner.eval(t).map_err(err)
    }

    #[getter]
    fn class_name(&self) -> String {
        format!("{:?}", self.inner.class())
    }
}

fn opts_for(restarts: usize, seed: u64) -> OptimizerOpts {
    OptimizerOpts {
        restarts,
        seed,
        ..Default::default()
    }
}

/// Orlicz mixed volume V_phi(K, Q).
#[pyfunction]
#[pyo3(signature = (k, q, phi, grid=None))]
fn v_phi(k: &PyBody, q: &PyBody, phi: &PyPhi, grid: Option<&PyGrid>) -> PyResult<f64> {
    Ok(mixed::v_phi(&k.inner, &q.inner, &phi.inner, grid.map(|g| &g.inner))
        .map_err(err)?
        .value)
}

/// Orlicz phi-surface area S_phi(K).
#[pyfunction]
#[pyo3(signature = (k, phi, grid=None))]
fn s_phi(k: &PyBody, phi: &PyPhi, grid: Option<&PyGrid>) -> PyResult<f64> {
    mixed::s_phi(&k.inner, &phi.inner, grid.map(|g| &g.inner)).map_err(err)
}

/// Orlicz affine surface area; returns the full result as a JSON string.
#[pyfunction]
#[pyo3(signature = (k, phi, grid, restarts=8, seed=0))]
fn affine(k: &PyBody, phi: &PyPhi, grid: &PyGrid, restarts: usize, seed: u64) -> PyResult<String> {
    let r = affine_orlicz(&k.inner, &phi.inner, &grid.inner, &opts_for(restarts, seed))
        .map_err(err)?;
    serde_json::to_string(&r).map_err(jerr)
}

/// Orlicz geominimal surface area; returns the full result as JSON.
#[pyfunction]
#[pyo3(signature = (k, phi, grid, restarts=8, seed=0))]
fn geominimal(
    k: &PyBody,
    phi: &PyPhi,
    grid: &PyGrid,
    restarts: usize,
    seed: u64,
) -> PyResult<String> {
    let r = geominimal_orlicz(&k.inner, &phi.inner, &grid.inner, &opts_for(restarts, seed))
        .map_err(err)?;
    serde_json::to_string(&r).map_err(jerr)
}

/// Closed-form value n phi(vrad(E polar)) |E| for balls and ellipsoids.
#[pyfunction]
fn ellipsoid_value(e: &PyBody, phi: &PyPhi) -> PyResult<f64> {
    ellipsoid_closed_form(&e.inner, &phi.inner).map_err(err)
}

/// L_p affine surface area via the curvature integral.
#[pyfunction]
fn lp_closed_form(k: &PyBody, p: f64, grid: &PyGrid) -> PyResult<f64> {
    lp_affine_closed_form(&k.inner, p, &grid.inner).map_err(err)
}

/// Run an inequality suite; returns the SuiteReport as a JSON string.
#[pyfunction]
#[pyo3(signature = (name, grid, seed=42, tol=0.01, restarts=8))]
fn verify(name: &str, grid: &PyGrid, seed: u64, tol: f64, restarts: usize) -> PyResult<String> {
    let report = run_suite(name, &grid.inner, seed, tol, &opts_for(restarts, seed), None)
        .map_err(err)?;
    serde_json::to_string(&report).map_err(jerr)
}

#[pyfunction]
fn suite_names() -> Vec<String> {
    SUITE_NAMES.iter().map(|s| s.to_string()).collect()
}

#[pymodule]
fn orlicz_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGrid>()?;
    m.add_class::<PyBody>()?;
    m.add_class::<PyPhi>()?;
    m.add_function(wrap_pyfunction!(v_phi, m)?)?;
    m.add_function(wrap_pyfunction!(s_phi, m)?)?;
    m.add_function(wrap_pyfunction!(affine, m)?)?;
    m.add_function(wrap_pyfunction!(geominimal, m)?)?;
    m.add_function(wrap_pyfunction!(ellipsoid_value, m)?)?;
    m.add_function(wrap_pyfunction!(lp_closed_form, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(suite_names, m)?)?;
    Ok(())
}
