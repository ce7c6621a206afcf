//! Python bindings for bogocert.
//!
//! Structured results (certificates, reports, filtrations) come back as plain
//! Python dicts built from the same JSON the command-line tool emits.

use std::path::PathBuf;
use std::sync::Arc;

use bogocert::algnum::{FieldElement, IntPoly, NumberField};
use bogocert::heights::{self, parse_positive_rational, BoundParams};
use bogocert::lmfdb::{default_cache_root, LmfdbClient, Policy, UreqTransport};
use bogocert::localfields::{self, CrystallineParams};
use bogocert::matgroups::{self, FiniteRingSpec, Mat2, MatSubspace, SubgroupGens, DEFAULT_CAP};
use bogocert::newforms::{self, DataSource, NewformRecord};
use bogocert::Error;
use num_bigint::BigUint;
use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use pyo3::types::PyModule;
use serde::Serialize;

create_exception!(bogocert_py, BogocertError, PyException);
create_exception!(bogocert_py, InvalidInputError, BogocertError);
create_exception!(bogocert_py, DataError, BogocertError);
create_exception!(bogocert_py, UnsupportedError, BogocertError);

fn py_err(e: Error) -> PyErr {
    let msg = e.to_string();
    match e {
        Error::InvalidInput(_) => InvalidInputError::new_err(msg),
        Error::DataInsufficient(_) | Error::Schema { .. } | Error::Network(_) | Error::Io(_) => DataError::new_err(msg),
        Error::Unsupported(_) | Error::Overflow { .. } | Error::NotApplicable(_) => UnsupportedError::new_err(msg),
    }
}

trait OrPy<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> OrPy<T> for bogocert::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(py_err)
    }
}

fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| BogocertError::new_err(e.to_string()))?;
    PyModule::import(py, "json")?.call_method1("loads", (text,))
}

fn ring(spec: &str) -> PyResult<Arc<FiniteRingSpec>> {
    spec.parse::<FiniteRingSpec>().map(Arc::new).py()
}

/// Access to newform data: bundled fixtures, a local cache and, unless
/// offline, the LMFDB API.
#[pyclass(name = "Client", module = "bogocert_py")]
struct PyClient {
    inner: LmfdbClient,
}

#[pymethods]
impl PyClient {
    #[new]
    #[pyo3(signature = (cache_dir=None, offline=true, refresh=false))]
    fn new(cache_dir: Option<PathBuf>, offline: bool, refresh: bool) -> Self {
        let root = cache_dir.unwrap_or_else(default_cache_root);
        let inner = if offline {
            LmfdbClient::new(root, None, Policy::OfflineOnly)
        } else {
            let policy = if refresh { Policy::Refresh } else { Policy::CacheFirst };
            LmfdbClient::new(root, Some(Box::new(UreqTransport::default())), policy)
        };
        PyClient { inner }
    }

    fn newform(&self, label: &str) -> PyResult<Newform> {
        Ok(Newform { rec: self.inner.newform(label).py()? })
    }

    fn newspace_dim(&self, level: u64, weight: u64, char_orbit: u64) -> PyResult<u64> {
        self.inner.newspace_dim(level, weight, char_orbit).py()
    }

    /// Search primes up to `bound` for a certificate.
    #[pyo3(signature = (label, bound=500))]
    fn certify<'py>(&self, py: Python<'py>, label: &str, bound: u64) -> PyResult<Bound<'py, PyAny>> {
        let rec = self.inner.newform(label).py()?;
        to_py(py, &newforms::certify(&rec, bound, &self.inner).py()?)
    }

    /// Full hypothesis report at p, including big-image evidence.
    fn report<'py>(&self, py: Python<'py>, label: &str, p: u64) -> PyResult<Bound<'py, PyAny>> {
        let rec = self.inner.newform(label).py()?;
        to_py(py, &newforms::full_report(&rec, p, &self.inner).py()?)
    }

    /// Recompute the reference table of trace-zero examples.
    fn table<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &newforms::reproduce_table(&self.inner).py()?)
    }
}

#[pyclass(name = "Newform", module = "bogocert_py")]
struct Newform {
    rec: NewformRecord,
}

#[pymethods]
impl Newform {
    #[getter]
    fn label(&self) -> &str {
        &self.rec.label
    }
    #[getter]
    fn level(&self) -> u64 {
        self.rec.level
    }
    #[getter]
    fn weight(&self) -> u64 {
        self.rec.weight
    }
    #[getter]
    fn hecke_degree(&self) -> usize {
        self.rec.hecke_degree()
    }
    #[getter]
    fn cm(&self) -> bool {
        self.rec.cm
    }
    /// Conductor of the nebentypus, recomputed from its values.
    #[getter]
    fn char_conductor(&self) -> u64 {
        self.rec.computed_conductor()
    }
    #[getter]
    fn coeff_bound(&self) -> u64 {
        self.rec.coeff_bound()
    }

    /// a_n as a string in the power basis of the Hecke field.
    fn a(&self, n: u64) -> PyResult<String> {
        Ok(self.rec.a(n).py()?.to_string())
    }

    fn chi(&self, n: u64) -> Option<String> {
        self.rec.chi(n).map(|c| c.to_string())
    }

    /// P0, P1 and P3 at p; big image is left unchecked.
    fn check<'py>(&self, py: Python<'py>, p: u64) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &newforms::check_assumption1(&self.rec, p).py()?)
    }

    /// Frobenius polynomial at r, reduced at the prime above p given by `root`.
    #[pyo3(signature = (r, p, root=None))]
    fn frobenius_charpoly(&self, r: u64, p: u64, root: Option<u64>) -> PyResult<(String, bool)> {
        let root = match root {
            Some(x) => x,
            None => *bogocert::algnum::splitting_type(&self.rec.field, p)
                .py()?
                .degree_one_roots()
                .first()
                .ok_or_else(|| InvalidInputError::new_err(format!("no degree-one prime above {p}")))?,
        };
        let f = newforms::frobenius_charpoly(&self.rec, r, p, root).py()?;
        Ok((f.to_string(), newforms::irreducible_quadratic(&f)))
    }

    fn __repr__(&self) -> String {
        format!("Newform('{}', degree {})", self.rec.label, self.rec.hecke_degree())
    }
}

/// Weil height of the algebraic number with the given minimal polynomial,
/// or of `coords` in the field defined by `field`. Returns (lower, upper).
#[pyfunction]
#[pyo3(signature = (minpoly=None, field=None, coords=None))]
fn weil_height(minpoly: Option<&str>, field: Option<&str>, coords: Option<Vec<i64>>) -> PyResult<(f64, f64)> {
    let x = match (minpoly, field, coords) {
        (Some(f), None, None) => FieldElement::from_minimal_polynomial(&f.parse::<IntPoly>().py()?).py()?,
        (None, Some(f), Some(c)) => {
            let k = NumberField::from_poly(f.parse::<IntPoly>().py()?).py()?;
            FieldElement::from_i64s(&k, &c).py()?
        }
        _ => return Err(InvalidInputError::new_err("give either minpoly, or field and coords")),
    };
    let h = heights::weil_height(&x).py()?;
    Ok((h.lower, h.upper))
}

/// Place-sum lower bound for the height of a non-root of unity.
#[pyfunction]
#[pyo3(signature = (a, b, rho, s_size, degree_ratio, p))]
fn lower_bound(a: u64, b: u64, rho: f64, s_size: u64, degree_ratio: (u64, u64), p: u64) -> PyResult<f64> {
    heights::lower_bound(&BoundParams { a, b, rho, s_size, degree_ratio, p }).py()
}

/// s_{p,rho}(lambda) as an exact fraction string; rho is e.g. "1/25".
#[pyfunction]
fn accelerate(p: u64, rho: &str, lam: BigUint) -> PyResult<String> {
    let rho = parse_positive_rational(rho).py()?;
    Ok(heights::accelerate(p, &rho, &lam).py()?.to_string())
}

#[pyfunction]
fn bogomolov_constant<'py>(py: Python<'py>, p: u64, c1: &str, c2: BigUint) -> PyResult<Bound<'py, PyAny>> {
    let c1 = parse_positive_rational(c1).py()?;
    to_py(py, &heights::bogomolov_constant(p, &c1, &c2).py()?)
}

#[pyfunction]
fn delta(p: u64, k: u64) -> PyResult<u64> {
    localfields::delta(p, k).py()
}

#[pyfunction]
fn gal_structure<'py>(py: Python<'py>, p: u64, k: u64, n: u32) -> PyResult<Bound<'py, PyAny>> {
    let params = CrystallineParams::new(p, k, n).py()?;
    to_py(py, &localfields::gal_structure(&params).py()?)
}

#[pyfunction]
fn unit_group_oracle<'py>(py: Python<'py>, p: u64, k: u64, n: u32) -> PyResult<Bound<'py, PyAny>> {
    let params = CrystallineParams::new(p, k, n).py()?;
    to_py(py, &localfields::unit_group_oracle(&params).py()?)
}

#[pyfunction]
fn ramification_filtration<'py>(py: Python<'py>, p: u64, k: u64, n: u32) -> PyResult<Bound<'py, PyAny>> {
    let params = CrystallineParams::new(p, k, n).py()?;
    to_py(py, &localfields::ramification_filtration(&params).py()?)
}

#[pyfunction]
fn assumption3_constants<'py>(py: Python<'py>, p: u64, k: u64, d: u32, n_max: u32) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &localfields::assumption3_constants(p, k, d, n_max).py()?)
}

/// Order of the subgroup and of its normal closure in GL2 over `ring`.
/// With no generators, uses the non-split Cartan subgroup.
#[pyfunction]
#[pyo3(signature = (ring_spec, gens=None, cap=DEFAULT_CAP))]
fn normal_closure(ring_spec: &str, gens: Option<Vec<String>>, cap: usize) -> PyResult<(usize, usize, usize)> {
    let r = ring(ring_spec)?;
    let h = match gens {
        Some(g) => {
            let mats = g.iter().map(|s| Mat2::parse(&r, s)).collect::<bogocert::Result<Vec<_>>>().py()?;
            SubgroupGens::new(&r, mats).py()?
        }
        None => matgroups::nonsplit_cartan(&r).py()?,
    };
    let h = matgroups::group_closure(&h, cap).py()?;
    let g = matgroups::gl2(&r, cap).py()?;
    let nc = matgroups::normal_closure(&h, &g, cap).py()?;
    let order = |s: &SubgroupGens| s.order().ok_or_else(|| UnsupportedError::new_err("group not enumerated"));
    Ok((order(&h)?, order(&nc)?, order(&g)?))
}

/// Dimension of the span of the seeds under SL2 conjugation.
#[pyfunction]
fn adjoint_closure_dim(ring_spec: &str, seeds: Vec<String>) -> PyResult<usize> {
    let r = ring(ring_spec)?;
    let mats = seeds.iter().map(|s| Mat2::parse(&r, s)).collect::<bogocert::Result<Vec<_>>>().py()?;
    let v = MatSubspace::span(&r, &mats).py()?;
    Ok(matgroups::adjoint_closure(&r, &v).py()?.dim())
}

/// Run the command-line tool in-process. Returns (exit_code, stdout, stderr).
#[pyfunction]
fn run_cli(args: Vec<String>) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("bogocert".to_string()).chain(args);
    let code = bogocert::cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8_lossy(&out).into_owned(), String::from_utf8_lossy(&err).into_owned())
}

#[pymodule]
fn bogocert_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add("BogocertError", py.get_type::<BogocertError>())?;
    m.add("InvalidInputError", py.get_type::<InvalidInputError>())?;
    m.add("DataError", py.get_type::<DataError>())?;
    m.add("UnsupportedError", py.get_type::<UnsupportedError>())?;
    m.add_class::<PyClient>()?;
    m.add_class::<Newform>()?;
    m.add_function(wrap_pyfunction!(weil_height, m)?)?;
    m.add_function(wrap_pyfunction!(lower_bound, m)?)?;
    m.add_function(wrap_pyfunction!(accelerate, m)?)?;
    m.add_function(wrap_pyfunction!(bogomolov_constant, m)?)?;
    m.add_function(wrap_pyfunction!(delta, m)?)?;
    m.add_function(wrap_pyfunction!(gal_structure, m)?)?;
    m.add_function(wrap_pyfunction!(unit_group_oracle, m)?)?;
    m.add_function(wrap_pyfunction!(ramification_filtration, m)?)?;
    m.add_function(wrap_pyfunction!(assumption3_constants, m)?)?;
    m.add_function(wrap_pyfunction!(normal_closure, m)?)?;
    m.add_function(wrap_pyfunction!(adjoint_closure_dim, m)?)?;
    m.add_function(wrap_pyfunction!(run_cli, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
