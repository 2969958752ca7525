//! Python bindings. The surface mirrors the CLI: rings come from the
//! same JSON specs, property and set names are the same strings, and
//! `verify` returns the same JSON report the CLI would print.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use qbr_core::closure::{is_b_ring, is_qb_nonunital, is_qb_ring};
use qbr_core::error::QbrError;
use qbr_core::exchange::is_exchange_ring;
use qbr_core::ideals::{jacobson_radical, primeness};
use qbr_core::jacobson::{demo_claims, laurent_image, parse_jelement};
use qbr_core::quasi::{quasi_invertible, quasi_invertible_set};
use qbr_core::regular::{idempotents, maximal_regular_elements, regular_elements};
use qbr_core::ring::matrix_ring;
use qbr_core::suites::{parse_selection, run_suites_with_base, suite_catalog};
use qbr_core::{build_ring, zoo, Elem, FiniteRing, RingSpec};

fn qerr(e: QbrError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A finite ring with exact, table-backed arithmetic. Elements are
/// indices in 0..order; the methods validate them.
#[pyclass(frozen)]
struct Ring {
    spec: Option<RingSpec>,
    inner: FiniteRing,
}

impl Ring {
    fn elem(&self, a: u32) -> PyResult<Elem> {
        if (a as usize) < self.inner.order() {
            Ok(Elem(a))
        } else {
            Err(PyValueError::new_err(format!(
                "element {a} out of range for a ring of order {}",
                self.inner.order()
            )))
        }
    }
}

#[pymethods]
impl Ring {
    /// Build a ring from a JSON spec, e.g. '{"kind": "zn", "n": 6}'.
    #[new]
    fn new(spec_json: &str) -> PyResult<Self> {
        let spec: RingSpec = serde_json::from_str(spec_json)
            .map_err(|e| PyValueError::new_err(format!("malformed spec: {e}")))?;
        let inner = build_ring(&spec).map_err(qerr)?;
        Ok(Ring { spec: Some(spec), inner })
    }

    /// Fetch a ring from the built-in corpus by name, e.g. "M2(GF(2))".
    #[staticmethod]
    fn zoo(name: &str) -> PyResult<Self> {
        let entry = zoo::find(name)
            .ok_or_else(|| PyValueError::new_err(format!("no corpus ring named {name:?}")))?;
        Ok(Ring { spec: None, inner: entry.ring.clone() })
    }

    fn __repr__(&self) -> String {
        format!("Ring({}, order {})", self.inner.label(), self.inner.order())
    }

    fn __len__(&self) -> usize {
        self.inner.order()
    }

    #[getter]
    fn label(&self) -> &str {
        self.inner.label()
    }

    #[getter]
    fn order(&self) -> usize {
        self.inner.order()
    }

    #[getter]
    fn is_unital(&self) -> bool {
        self.inner.is_unital()
    }

    #[getter]
    fn zero(&self) -> u32 {
        self.inner.zero().0
    }

    #[getter]
    fn one(&self) -> Option<u32> {
        self.inner.one().map(|e| e.0)
    }

    fn add(&self, a: u32, b: u32) -> PyResult<u32> {
        Ok(self.inner.add(self.elem(a)?, self.elem(b)?).0)
    }

    fn mul(&self, a: u32, b: u32) -> PyResult<u32> {
        Ok(self.inner.mul(self.elem(a)?, self.elem(b)?).0)
    }

    fn neg(&self, a: u32) -> PyResult<u32> {
        Ok(self.inner.neg(self.elem(a)?).0)
    }

    fn sub(&self, a: u32, b: u32) -> PyResult<u32> {
        Ok(self.inner.sub(self.elem(a)?, self.elem(b)?).0)
    }

    /// Decide a named property: "b", "qb", "qb-nonunital", "exchange",
    /// "semiprime" or "prime". Raises ValueError where the CLI would
    /// skip (e.g. "exchange" without an identity).
    fn check(&self, property: &str) -> PyResult<bool> {
        let r = &self.inner;
        match property {
            "b" => Ok(is_b_ring(r).map_err(qerr)?.holds),
            "qb" => Ok(is_qb_ring(r).map_err(qerr)?.holds),
            "qb-nonunital" => Ok(is_qb_nonunital(r)),
            "exchange" => {
                r.one().ok_or(QbrError::NonUnitalRing).map_err(qerr)?;
                Ok(is_exchange_ring(r))
            }
            "semiprime" => Ok(primeness(r).semiprime),
            "prime" => Ok(primeness(r).prime),
            other => Err(PyValueError::new_err(format!("unknown property {other:?}"))),
        }
    }

    /// A named element set as a sorted list of indices: "units", "qinv",
    /// "regular", "idempotents", "radical" or "maxreg".
    fn sets(&self, set: &str) -> PyResult<Vec<u32>> {
        let r = &self.inner;
        let members: Vec<u32> = match set {
            "units" => {
                r.one().ok_or(QbrError::NonUnitalRing).map_err(qerr)?;
                r.units().iter().map(|e| e.0).collect()
            }
            "qinv" => quasi_invertible_set(r).map_err(qerr)?.iter().map(|e| e.0).collect(),
            "regular" => regular_elements(r).iter().map(|e| e.0).collect(),
            "idempotents" => idempotents(r).iter().map(|e| e.0).collect(),
            "radical" => jacobson_radical(r).map_err(qerr)?.iter().map(|e| e.0).collect(),
            "maxreg" => maximal_regular_elements(r).map_err(qerr)?.iter().map(|e| e.0).collect(),
            other => return Err(PyValueError::new_err(format!("unknown set {other:?}"))),
        };
        Ok(members)
    }

    /// The canonical quasi-inverse of u, or None when u is not
    /// quasi-invertible.
    fn quasi_inverse(&self, u: u32) -> PyResult<Option<u32>> {
        let w = quasi_invertible(&self.inner, self.elem(u)?).map_err(qerr)?;
        Ok(w.map(|w| w.v.0))
    }

    /// Run verification suites and return the JSON report the CLI's
    /// `verify` command would emit. `suite` is a suite name or "all".
    #[pyo3(signature = (suite = "all", seed = 0))]
    fn verify(&self, suite: &str, seed: u64) -> PyResult<String> {
        let suites = parse_selection(suite)
            .ok_or_else(|| PyValueError::new_err(format!("unknown suite {suite:?}")))?;
        let m2_base = match &self.spec {
            Some(RingSpec::Matrix { size: 2, base }) => Some(build_ring(base).map_err(qerr)?),
            _ => None,
        };
        let mut report = run_suites_with_base(&self.inner, m2_base.as_ref(), &suites, seed);
        report.spec = self.spec.as_ref().map(|s| serde_json::to_value(s).expect("specs serialize"));
        Ok(report.to_json())
    }

    /// The ring M2(self), with entries encoded row-major in base
    /// order^4.
    fn matrix2(&self) -> PyResult<Ring> {
        let inner = matrix_ring(&self.inner, 2).map_err(qerr)?;
        let spec = self
            .spec
            .as_ref()
            .map(|base| RingSpec::Matrix { size: 2, base: Box::new(base.clone()) });
        Ok(Ring { spec, inner })
    }
}

/// Names of every ring in the built-in corpus, for Ring.zoo.
#[pyfunction]
fn zoo_names() -> Vec<String> {
    zoo::all().iter().map(|e| e.name.clone()).collect()
}

/// The verification suites `Ring.verify` accepts, as (name, summary)
/// pairs.
#[pyfunction]
fn suites() -> Vec<(String, String)> {
    suite_catalog().into_iter().map(|(n, w)| (n.to_string(), w.to_string())).collect()
}

/// Exact demonstrations in F_p<x, y | xy = 1>, as a JSON report of
/// claims with certificates. `bound` caps the matrix-unit sweep.
#[pyfunction]
#[pyo3(signature = (p, bound = 6))]
fn demo_jacobson(p: u32, bound: u32) -> PyResult<String> {
    let report = demo_claims(p, bound).map_err(qerr)?;
    serde_json::to_string(&report).map_err(|e| PyValueError::new_err(e.to_string()))
}

/// Normalize an expression in F_p<x, y | xy = 1>, e.g. "y^2 x + 3 y".
/// Returns (normal_form, laurent_image).
#[pyfunction]
fn jnormal(p: u32, expr: &str) -> PyResult<(String, String)> {
    let elem = parse_jelement(p, expr).map_err(qerr)?;
    let image = laurent_image(&elem);
    Ok((elem.to_string(), image.to_string()))
}

#[pymodule]
fn qbr_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Ring>()?;
    m.add_function(wrap_pyfunction!(zoo_names, m)?)?;
    m.add_function(wrap_pyfunction!(suites, m)?)?;
    m.add_function(wrap_pyfunction!(demo_jacobson, m)?)?;
    m.add_function(wrap_pyfunction!(jnormal, m)?)?;
    Ok(())
}
