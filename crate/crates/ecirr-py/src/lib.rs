//! Python bindings: fields, polynomials, rational-map transforms, curves,
//! quadratic-order valuations, sequence runs, and the worked-example
//! reproduction, exposed as the `ecirr` extension module.

use std::path::Path;
use std::sync::Arc;

use num_bigint::BigInt;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use ecirr_core::poly::first_irreducible;
use ecirr_core::quadorder::{nu_alpha, QuadOrder};
use ecirr_core::sequence::{self, SelectionStrategy, SequenceParams};
use ecirr_core::{io, repro, Curve, Error, FieldCtx, Poly, RationalMap};

fn to_py(e: Error) -> PyErr {
    PyValueError::new_err(format!("[{}] {e}", e.name()))
}

// ---- Field ----

/// A finite field F_{p^n}; extension fields carry an explicit modulus or
/// default to the canonical (first in counter order) irreducible one.
#[pyclass(name = "Field")]
struct PyField {
    ctx: Arc<FieldCtx>,
}

#[pymethods]
impl PyField {
    #[new]
    #[pyo3(signature = (p, n = 1, modulus = None))]
    fn new(p: u64, n: usize, modulus: Option<Vec<i64>>) -> PyResult<Self> {
        let ctx = match (n, modulus) {
            (1, None) => FieldCtx::prime(p).map_err(to_py)?,
            (_, Some(m)) => FieldCtx::new(p, n, &m).map_err(to_py)?,
            (_, None) => {
                let prime = FieldCtx::prime(p).map_err(to_py)?;
                let m: Vec<i64> = first_irreducible(&prime, n)
                    .map_err(to_py)?
                    .coeffs()
                    .iter()
                    .map(|c| c.coords()[0] as i64)
                    .collect();
                FieldCtx::new(p, n, &m).map_err(to_py)?
            }
        };
        Ok(PyField { ctx })
    }

    #[getter]
    fn p(&self) -> u64 {
        self.ctx.p()
    }

    #[getter]
    fn degree(&self) -> usize {
        self.ctx.degree()
    }

    #[getter]
    fn order(&self) -> u128 {
        self.ctx.order_u128()
    }

    /// Build a polynomial from little-endian integer coefficients.
    fn poly(&self, coeffs: Vec<i64>) -> PyPoly {
        PyPoly {
            inner: Poly::from_ints(&self.ctx, &coeffs),
        }
    }

    fn __repr__(&self) -> String {
        format!("Field({})", self.ctx)
    }
}

// ---- Polynomial ----

#[pyclass(name = "Polynomial", skip_from_py_object)]
#[derive(Clone)]
struct PyPoly {
    inner: Poly,
}

#[pymethods]
impl PyPoly {
    /// Degree, or None for the zero polynomial.
    #[getter]
    fn degree(&self) -> Option<usize> {
        self.inner.degree()
    }

    /// Little-endian coefficients: plain integers over a prime field,
    /// coordinate lists over an extension.
    fn coeffs(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        let cs = self.inner.coeffs();
        if self.inner.ctx().degree() == 1 {
            let flat: Vec<u64> = cs.iter().map(|c| c.coords()[0]).collect();
            Ok(flat.into_pyobject(py)?.unbind().into_any())
        } else {
            let nested: Vec<Vec<u64>> = cs.iter().map(|c| c.coords().to_vec()).collect();
            Ok(nested.into_pyobject(py)?.unbind().into_any())
        }
    }

    fn is_irreducible(&self) -> PyResult<bool> {
        self.inner.is_irreducible().map_err(to_py)
    }

    /// Monic irreducible factors with multiplicities, canonically ordered;
    /// the discarded unit is the leading coefficient.
    #[pyo3(signature = (seed = 0))]
    fn factor(&self, seed: u64) -> PyResult<Vec<(PyPoly, u32)>> {
        let fac = self.inner.factor(seed).map_err(to_py)?;
        Ok(fac
            .factors
            .into_iter()
            .map(|(p, m)| (PyPoly { inner: p }, m))
            .collect())
    }

    /// SHA-256 digest of the field description and coefficients.
    fn digest(&self) -> String {
        io::poly_digest(&self.inner)
    }

    fn __eq__(&self, other: &PyPoly) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!("Polynomial({})", self.inner)
    }
}

// ---- Rational map ----

#[pyclass(name = "RationalMap")]
struct PyMap {
    inner: RationalMap,
}

#[pymethods]
impl PyMap {
    #[new]
    fn new(field: &PyField, a: Vec<i64>, b: Vec<i64>) -> PyResult<Self> {
        let a = Poly::from_ints(&field.ctx, &a);
        let b = Poly::from_ints(&field.ctx, &b);
        Ok(PyMap {
            inner: RationalMap::new(a, b).map_err(to_py)?,
        })
    }

    #[getter]
    fn degree(&self) -> usize {
        self.inner.degree()
    }

    /// Apply the induced polynomial transform; the result has degree
    /// `self.degree * f.degree`.
    fn transform(&self, f: &PyPoly) -> PyResult<PyPoly> {
        Ok(PyPoly {
            inner: self.inner.transform(&f.inner).map_err(to_py)?,
        })
    }

    fn __repr__(&self) -> String {
        format!(
            "RationalMap(degree {}, over F_{}^{})",
            self.inner.degree(),
            self.inner.ctx().p(),
            self.inner.ctx().degree()
        )
    }
}

/// Load a rational map from a JSON description file.
#[pyfunction]
fn load_map(path: &str) -> PyResult<PyMap> {
    let desc: io::MapDesc = io::read_json(Path::new(path)).map_err(to_py)?;
    Ok(PyMap {
        inner: desc.build(None).map_err(to_py)?,
    })
}

// ---- Curve ----

#[pyclass(name = "Curve")]
struct PyCurve {
    inner: Curve,
}

#[pymethods]
impl PyCurve {
    #[new]
    fn new(field: &PyField, a: i64, b: i64) -> PyResult<Self> {
        Ok(PyCurve {
            inner: Curve::new(field.ctx.from_i64(a), field.ctx.from_i64(b)).map_err(to_py)?,
        })
    }

    /// Point count data as (q, order, trace).
    fn count_points(&self) -> PyResult<(u64, u64, i64)> {
        let d = self.inner.count_points().map_err(to_py)?;
        Ok((d.q, d.n, d.t))
    }

    fn is_ordinary(&self) -> PyResult<bool> {
        self.inner.is_ordinary().map_err(to_py)
    }

    /// Order of the curve over the degree-k extension, from the trace
    /// recurrence.
    fn extension_order(&self, k: u32) -> PyResult<BigInt> {
        Ok(self.inner.count_points().map_err(to_py)?.extension_order(k))
    }

    /// Check that the map is the x-part of an endomorphism; returns
    /// (all_ok, pairs_checked, exhaustive).
    #[pyo3(signature = (map, pairs = 4096, seed = 0))]
    fn verify_endomorphism(&self, map: &PyMap, pairs: u64, seed: u64) -> PyResult<(bool, u64, bool)> {
        let report = ecirr_core::curve::verify_endomorphism(&self.inner, &map.inner, pairs, seed)
            .map_err(to_py)?;
        Ok((report.all_ok(), report.pairs_checked, report.exhaustive))
    }

    fn __repr__(&self) -> String {
        format!(
            "Curve(y^2 = x^3 + {}x + {} over F_{}^{})",
            self.inner.a(),
            self.inner.b(),
            self.inner.ctx().p(),
            self.inner.ctx().degree()
        )
    }
}

/// Load a curve from a JSON description file.
#[pyfunction]
fn load_curve(path: &str) -> PyResult<PyCurve> {
    let desc: io::CurveDesc = io::read_json(Path::new(path)).map_err(to_py)?;
    let ctx = desc.field.build().map_err(to_py)?;
    Ok(PyCurve {
        inner: Curve::new(ctx.from_i64(desc.a), ctx.from_i64(desc.b)).map_err(to_py)?,
    })
}

// ---- Sequence runs ----

#[pyclass(name = "SequenceResult")]
struct PySequenceResult {
    #[pyo3(get)]
    degrees: Vec<usize>,
    #[pyo3(get)]
    switched_at: Option<usize>,
    #[pyo3(get)]
    restarts: u32,
    polys: Vec<Poly>,
}

#[pymethods]
impl PySequenceResult {
    /// The polynomials f_0 .. f_target in order.
    fn polynomials(&self) -> Vec<PyPoly> {
        self.polys.iter().map(|p| PyPoly { inner: p.clone() }).collect()
    }

    fn __repr__(&self) -> String {
        format!(
            "SequenceResult(degrees {:?}, switched_at {:?}, restarts {})",
            self.degrees, self.switched_at, self.restarts
        )
    }
}

fn parse_strategy(s: &str) -> PyResult<SelectionStrategy> {
    let (head, tail) = match s.split_once(':') {
        Some((h, t)) => (h, Some(t)),
        None => (s, None),
    };
    let bad = || PyValueError::new_err(format!("unknown selection {s:?}"));
    match (head, tail) {
        ("smallest-degree", None) => Ok(SelectionStrategy::SmallestDegree),
        ("largest-degree", None) => Ok(SelectionStrategy::LargestDegree),
        ("smallest-degree-above", Some(t)) => t
            .parse()
            .map(SelectionStrategy::SmallestDegreeAbove)
            .map_err(|_| bad()),
        ("kth-canonical", Some(t)) => t.parse().map(SelectionStrategy::KthCanonical).map_err(|_| bad()),
        _ => Err(bad()),
    }
}

/// Iterate the construction: factor-and-select until the degree clears
/// twice the seed degree, then apply the transform directly.
#[pyfunction]
#[pyo3(signature = (map, f0, target, selection = "largest-degree", depth = None, seed = 0))]
fn run_sequence(
    map: &PyMap,
    f0: &PyPoly,
    target: usize,
    selection: &str,
    depth: Option<u32>,
    seed: u64,
) -> PyResult<PySequenceResult> {
    let mut params = SequenceParams::new(map.inner.clone(), f0.inner.clone(), target);
    params.strategy = parse_strategy(selection)?;
    params.known_depth = depth;
    params.seed = seed;
    let run = sequence::run(&params).map_err(to_py)?;
    Ok(PySequenceResult {
        degrees: run.degrees(),
        switched_at: run.switched_at,
        restarts: run.restarts,
        polys: run.steps.into_iter().map(|s| s.poly).collect(),
    })
}

// ---- Valuations ----

/// nu_alpha(beta) in the maximal order of Q(sqrt(D)): the largest k with
/// alpha^k dividing beta, plus the exact cofactor beta / alpha^k.
#[pyfunction]
fn valuation(d: i64, alpha: (i64, i64), beta: (i64, i64)) -> PyResult<(u32, (BigInt, BigInt))> {
    let ord = QuadOrder::new(d).map_err(to_py)?;
    let alpha = ord.elem(alpha.0, alpha.1);
    let beta = ord.elem(beta.0, beta.1);
    let (k, cofactor) = nu_alpha(&beta, &alpha).map_err(to_py)?;
    Ok((k, (cofactor.c0().clone(), cofactor.c1().clone())))
}

// ---- Reproduction ----

/// Replay the worked degree-17 example against its frozen values; returns
/// (all_ok, checks, degrees) with checks as (name, ok, detail) triples.
#[pyfunction]
#[pyo3(signature = (data_dir, target = 3))]
fn reproduce(data_dir: &str, target: usize) -> PyResult<(bool, Vec<(String, bool, String)>, Vec<usize>)> {
    let report = repro::reproduce(Path::new(data_dir), target).map_err(to_py)?;
    let checks = report
        .checks
        .iter()
        .map(|c| (c.name.to_string(), c.ok, c.detail.clone()))
        .collect();
    Ok((report.all_ok(), checks, report.degrees))
}

#[pymodule]
fn ecirr(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyField>()?;
    m.add_class::<PyPoly>()?;
    m.add_class::<PyMap>()?;
    m.add_class::<PyCurve>()?;
    m.add_class::<PySequenceResult>()?;
    m.add_function(wrap_pyfunction!(load_map, m)?)?;
    m.add_function(wrap_pyfunction!(load_curve, m)?)?;
    m.add_function(wrap_pyfunction!(run_sequence, m)?)?;
    m.add_function(wrap_pyfunction!(valuation, m)?)?;
    m.add_function(wrap_pyfunction!(reproduce, m)?)?;
    Ok(())
}
