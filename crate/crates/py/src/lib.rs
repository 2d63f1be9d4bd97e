//! Python bindings. Dyadic numbers cross the boundary as their string codes
//! (`+11/100`), since Python has no exact binary rational type.

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;

use sonda_core::catalog::{find_op, fun_real_pair, real_pair, Oracle};
use sonda_core::cfun::{apply, Domain};
use sonda_core::complexity::{self, builtin_function, builtin_predicate, table_predicate, Caps};
use sonda_core::ivp::{lip_ivp, LipIvp};
use sonda_core::names::PredName;
use sonda_core::real::{real_add, real_exp01, real_from_dyadic, real_mul, real_neg, real_sin};
use sonda_core::sets::{convex_hull, parse_exact_set, set_from_exact, set_query, ExactSet, HullOptions};
use sonda_core::{decode_dyadic, parse_expr, Dyadic, SondaError as CoreError};

create_exception!(sonda, SondaError, PyException);

fn err(e: CoreError) -> PyErr {
    match e {
        CoreError::Parse { .. } | CoreError::MalformedDyadic(_) | CoreError::OutOfDomain(_) | CoreError::EmptySet => {
            PyValueError::new_err(e.to_string())
        }
        e => SondaError::new_err(e.to_string()),
    }
}

/// A dyadic string, or a number in expression syntax like `3/4` or `0.5`.
fn dyadic(s: &str) -> PyResult<Dyadic> {
    if let Ok(d) = decode_dyadic(s) {
        return Ok(d);
    }
    parse_expr(s)
        .map_err(err)?
        .eval_exact(&[])
        .ok_or_else(|| PyValueError::new_err(format!("{s:?} is not a dyadic number")))
}

/// Encodes a dyadic rational.
#[pyfunction]
fn encode(value: &str) -> PyResult<String> {
    Ok(dyadic(value)?.encode())
}

/// Decodes a dyadic string to a float (lossy).
#[pyfunction]
fn to_float(code: &str) -> PyResult<f64> {
    Ok(decode_dyadic(code).map_err(err)?.to_f64())
}

#[pyclass(name = "Real", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyReal(sonda_core::RealName);

#[pymethods]
impl PyReal {
    /// A real from a closed expression such as `sin(1/2) * 3`.
    #[new]
    fn new(expr: &str) -> PyResult<Self> {
        let e = parse_expr(expr).map_err(err)?;
        if e.uses_t() || e.uses_y() {
            return Err(PyValueError::new_err("a real expression cannot mention t or y"));
        }
        Ok(PyReal(e.real_name().map_err(err)?))
    }

    #[staticmethod]
    fn exact(value: &str) -> PyResult<Self> {
        Ok(PyReal(real_from_dyadic(&dyadic(value)?)))
    }

    /// A dyadic string within `2^-n` of the real.
    fn approx(&self, n: u64) -> PyResult<String> {
        Ok(self.0.approx(n).map_err(err)?.encode())
    }

    /// The raw answer of the name at `u`, padding included.
    fn query(&self, u: &str) -> PyResult<String> {
        self.0.name().query(u).map_err(err)
    }

    #[getter]
    fn bound(&self) -> u32 {
        self.0.bound()
    }

    fn __add__(&self, other: &PyReal) -> Self {
        PyReal(real_add(&self.0, &other.0))
    }

    fn __mul__(&self, other: &PyReal) -> Self {
        PyReal(real_mul(&self.0, &other.0))
    }

    fn __sub__(&self, other: &PyReal) -> Self {
        PyReal(real_add(&self.0, &real_neg(&other.0)))
    }

    fn __neg__(&self) -> Self {
        PyReal(real_neg(&self.0))
    }

    fn sin(&self) -> Self {
        PyReal(real_sin(&self.0))
    }

    fn exp01(&self) -> Self {
        PyReal(real_exp01(&self.0))
    }

    fn __float__(&self) -> PyResult<f64> {
        Ok(self.0.approx(60).map_err(err)?.to_f64())
    }

    fn __repr__(&self) -> PyResult<String> {
        Ok(format!("Real(~{})", self.0.approx(20).map_err(err)?.to_decimal(6)))
    }
}

fn domain(name: &str) -> PyResult<Domain> {
    match name {
        "unit" => Ok(Domain::Unit),
        "rect" => Ok(Domain::Rect),
        _ => Err(PyValueError::new_err(format!("domain must be 'unit' or 'rect', not {name:?}"))),
    }
}

#[pyclass(name = "CFun", frozen)]
struct PyCFun(sonda_core::CFunName);

#[pymethods]
impl PyCFun {
    #[new]
    #[pyo3(signature = (expr, domain = "unit"))]
    fn new(expr: &str, domain: &str) -> PyResult<Self> {
        let d = self::domain(domain)?;
        Ok(PyCFun(parse_expr(expr).map_err(err)?.to_cfun(d).map_err(err)?))
    }

    /// `f(point)` to within `2^-n`; `point` holds one or two coordinates.
    fn eval(&self, n: u64, point: Vec<String>) -> PyResult<String> {
        let pts = point.iter().map(|s| dyadic(s)).collect::<PyResult<Vec<_>>>()?;
        if pts.len() != self.0.domain().dim() {
            return Err(PyValueError::new_err(format!("expected {} coordinates", self.0.domain().dim())));
        }
        Ok(self.0.approx(n, &pts).map_err(err)?.encode())
    }

    fn modulus(&self, n: usize) -> PyResult<usize> {
        self.0.modulus(n).map_err(err)
    }

    fn apply(&self, x: &PyReal) -> PyResult<PyReal> {
        Ok(PyReal(apply(&self.0, &x.0).map_err(err)?))
    }
}

/// `h' = g(t, h)`, `h(0) = 0` on `[0,1]`.
#[pyclass(name = "Ivp", frozen)]
struct PyIvp(LipIvp);

#[pymethods]
impl PyIvp {
    #[new]
    #[pyo3(signature = (rhs, lipschitz = None))]
    fn new(rhs: &str, lipschitz: Option<u32>) -> PyResult<Self> {
        let g = parse_expr(rhs).map_err(err)?.to_lip(lipschitz).map_err(err)?;
        Ok(PyIvp(lip_ivp(&g).map_err(err)?))
    }

    /// `(value, steps)` for `h(at)` within `2^-n`.
    fn solve(&self, n: u64, at: &str) -> PyResult<(String, u64)> {
        let run = self.0.solve(n, &dyadic(at)?).map_err(err)?;
        Ok((run.value.encode(), run.steps))
    }

    /// Values at many points from one Euler pass.
    fn solve_many(&self, n: u64, at: Vec<String>) -> PyResult<Vec<String>> {
        let us = at.iter().map(|s| dyadic(s)).collect::<PyResult<Vec<_>>>()?;
        let batch = self.0.solve_batch(n, &us).map_err(err)?;
        Ok(batch.values.iter().map(Dyadic::encode).collect())
    }

    /// `(p, q)`: `2^p` steps with `q` fractional bits of state.
    fn schedule(&self, n: u64) -> PyResult<(u64, u64)> {
        let s = self.0.schedule(n).map_err(err)?;
        Ok((s.p, s.q))
    }
}

/// A closed subset of the unit square, queried through its gap predicate.
#[pyclass(name = "Set", frozen)]
struct PySet(PredName);

#[pymethods]
impl PySet {
    /// Finitely many points, each a pair of dyadic strings or numbers.
    #[staticmethod]
    fn points(points: Vec<(String, String)>) -> PyResult<Self> {
        let pts = points
            .iter()
            .map(|(u, v)| Ok((dyadic(u)?, dyadic(v)?)))
            .collect::<PyResult<Vec<_>>>()?;
        Ok(PySet(set_from_exact(&ExactSet::Points(pts)).map_err(err)?))
    }

    /// The point-file format: a point per line, `#` comments, optional `polygon`.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(PySet(set_from_exact(&parse_exact_set(text).map_err(err)?).map_err(err)?))
    }

    fn query(&self, u: &str, v: &str, n: u64) -> PyResult<bool> {
        set_query(&self.0, &dyadic(u)?, &dyadic(v)?, n).map_err(err)
    }

    #[pyo3(signature = (max_prec = 6, parallel = false))]
    fn hull(&self, max_prec: u64, parallel: bool) -> Self {
        PySet(convex_hull(&self.0, HullOptions { max_prec, parallel }))
    }
}

/// `P(L, n)` for `L` given as a list of values `L(0), L(1), ...` (held
/// constant past the end) or one of `"id"`, `"square"`.
#[pyfunction]
fn sopoly_eval(poly: &str, size: &Bound<'_, PyAny>, n: u64) -> PyResult<u64> {
    let p = sonda_core::SecondOrderPolynomial::parse(poly).map_err(err)?;
    let l = if let Ok(name) = size.extract::<String>() {
        match name.as_str() {
            "id" => sonda_core::SizeFn::identity(),
            "square" => sonda_core::SizeFn::square(),
            _ => return Err(PyValueError::new_err(format!("unknown size function {name:?}"))),
        }
    } else {
        let values: Vec<usize> = size.extract()?;
        if values.is_empty() {
            return Err(PyValueError::new_err("empty size table"));
        }
        sonda_core::SizeFn::from_table(values)
    };
    Ok(p.eval(&l, n))
}

fn predicate(arg: &str) -> PyResult<PredName> {
    match builtin_predicate(arg) {
        Some(p) => Ok(p),
        None => table_predicate(arg).map_err(err),
    }
}

/// `pred` is a builtin name (`and`, `xor`, ...) or table text of
/// `bitstring bit` lines.
#[pyfunction]
fn exist2(pred: &str, u: &str, n: usize) -> PyResult<bool> {
    complexity::exist2(&predicate(pred)?, u, n, &Caps::default()).map_err(err)
}

#[pyfunction]
fn sat2(pred: &str, formula: &str) -> PyResult<bool> {
    complexity::sat2(&predicate(pred)?, formula, &Caps::default()).map_err(err)
}

#[pyfunction]
fn qbf2(pred: &str, formula: &str) -> PyResult<bool> {
    complexity::qbf2(&predicate(pred)?, formula, &Caps::default()).map_err(err)
}

/// `fun` is one of `id`, `zero`, `inc`, `dec`.
#[pyfunction]
fn power2(fun: &str, u: &str) -> PyResult<bool> {
    let f = builtin_function(fun).ok_or_else(|| PyValueError::new_err(format!("unknown function {fun:?}")))?;
    complexity::power2(&f, u, &Caps::default()).map_err(err)
}

/// Runs a catalog operator under the meter: `(answer, cost, bound)`.
#[pyfunction]
#[pyo3(signature = (op, n, x, y = None, fun = None))]
fn meter(op: &str, n: u64, x: &PyReal, y: Option<PyRef<'_, PyReal>>, fun: Option<PyRef<'_, PyCFun>>) -> PyResult<(String, u64, u64)> {
    let op = find_op(op).ok_or_else(|| PyValueError::new_err(format!("unknown operator {op:?}")))?;
    let oracle = match op.oracle {
        Oracle::Real => x.0.name().clone(),
        Oracle::RealPair => {
            let y = y.ok_or_else(|| PyValueError::new_err("this operator needs y"))?;
            real_pair(&x.0, &y.0)
        }
        Oracle::FunReal => {
            let f = fun.ok_or_else(|| PyValueError::new_err("this operator needs fun"))?;
            fun_real_pair(&f.0, &x.0)
        }
    };
    let out = op.run(&oracle, n).map_err(err)?;
    Ok((out.output, out.cost, out.bound.unwrap_or(u64::MAX)))
}

#[pymodule]
fn sonda(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("SondaError", m.py().get_type::<SondaError>())?;
    m.add_class::<PyReal>()?;
    m.add_class::<PyCFun>()?;
    m.add_class::<PyIvp>()?;
    m.add_class::<PySet>()?;
    m.add_function(wrap_pyfunction!(encode, m)?)?;
    m.add_function(wrap_pyfunction!(to_float, m)?)?;
    m.add_function(wrap_pyfunction!(sopoly_eval, m)?)?;
    m.add_function(wrap_pyfunction!(exist2, m)?)?;
    m.add_function(wrap_pyfunction!(sat2, m)?)?;
    m.add_function(wrap_pyfunction!(qbf2, m)?)?;
    m.add_function(wrap_pyfunction!(power2, m)?)?;
    m.add_function(wrap_pyfunction!(meter, m)?)?;
    Ok(())
}
