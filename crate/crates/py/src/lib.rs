//! Python bindings for `propcalc`.

use propcalc::cli::{self, setup, Format, Suite, SuiteConfig, SHIPPED};
use propcalc::cobar::{cobar, cylinder, two_colored_resolution};
use propcalc::convolution::{self, build_g, build_k, k_element, LError, LInfinity, Shared};
use propcalc::coproperad::Coproperad;
use propcalc::exactlin::{Lin, Vector, Q};
use pyo3::exceptions::{PyKeyError, PyValueError};
use pyo3::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::sync::Arc;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Sparse vectors cross the boundary as `{index: "p/q"}`.
pub fn to_vector(x: &BTreeMap<usize, String>) -> Result<Vector, String> {
    let mut v = Lin::new();
    for (&i, c) in x {
        v.add_term(i, c.parse::<Q>().map_err(|e| format!("coefficient `{c}`: {e}"))?);
    }
    Ok(v)
}

pub fn from_vector(v: &Vector) -> BTreeMap<usize, String> {
    v.iter().map(|(i, c)| (*i, c.to_string())).collect()
}

#[pyclass(name = "Coproperad", module = "propcalc_py", frozen)]
pub struct PyCoproperad {
    pub inner: Arc<Coproperad>,
}

#[pymethods]
impl PyCoproperad {
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(PyCoproperad { inner: Arc::new(Coproperad::parse(text).map_err(value_err)?) })
    }

    /// One of the fixtures bundled with the library.
    #[staticmethod]
    fn shipped(name: &str) -> PyResult<Self> {
        let (_, text) = SHIPPED.iter().find(|(n, _)| *n == name).ok_or_else(|| PyKeyError::new_err(name.to_string()))?;
        Self::parse(text)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn labels(&self) -> Vec<String> {
        self.inner.atoms.iter().map(|a| a.label.clone()).collect()
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    /// Failed audit checks; empty when the coproperad is valid.
    fn audit(&self) -> Vec<String> {
        self.inner.audit().failures
    }

    /// `d² = 0` on the cobar construction, the resolution and the cylinder.
    fn cobar_d2(&self) -> BTreeMap<String, bool> {
        let c = &self.inner;
        [cobar(c), two_colored_resolution(c), cylinder(c)].into_iter().map(|p| (p.name.clone(), p.check_d_squared().ok())).collect()
    }

    fn __repr__(&self) -> String {
        format!("Coproperad(dim={})", self.inner.dim())
    }
}

/// A shifted L∞-algebra built from a coproperad.
#[pyclass(name = "LAlgebra", module = "propcalc_py", frozen)]
pub struct PyLAlgebra {
    pub inner: Shared,
}

pub fn bracket(l: &dyn LInfinity, args: &[(BTreeMap<usize, String>, i32)]) -> Result<BTreeMap<usize, String>, String> {
    let xs: Vec<Vector> = args.iter().map(|(x, _)| to_vector(x)).collect::<Result<_, _>>()?;
    let pairs: Vec<(&Vector, i32)> = xs.iter().zip(args).map(|(x, (_, d))| (x, *d)).collect();
    convolution::ell(l, &pairs).map(|y| from_vector(&y)).map_err(|e: LError| e.to_string())
}

#[pymethods]
impl PyLAlgebra {
    /// `𝔨` on the standard complexes of dimensions `dim_a` and `dim_b`.
    #[staticmethod]
    fn k(c: &PyCoproperad, dim_a: usize, dim_b: usize) -> Self {
        PyLAlgebra { inner: Arc::new(build_k(&c.inner, &cli::standard_complex(dim_a), &cli::standard_complex(dim_b))) }
    }

    /// The convolution algebra of gebra structures on the standard complex.
    #[staticmethod]
    fn g(c: &PyCoproperad, dim: usize) -> Self {
        PyLAlgebra { inner: Arc::new(build_g(&c.inner, &cli::standard_complex(dim))) }
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn degree(&self, i: usize) -> i32 {
        self.inner.degree(i)
    }

    fn label(&self, i: usize) -> String {
        self.inner.label(i)
    }

    fn level(&self, i: usize) -> usize {
        self.inner.level(i)
    }

    /// `ℓ_n(x_1, …, x_n)` on `(vector, degree)` pairs.
    fn bracket(&self, args: Vec<(BTreeMap<usize, String>, i32)>) -> PyResult<BTreeMap<usize, String>> {
        bracket(self.inner.as_ref(), &args).map_err(PyValueError::new_err)
    }

    fn mc_residual(&self, x: BTreeMap<usize, String>) -> PyResult<BTreeMap<usize, String>> {
        let v = to_vector(&x).map_err(PyValueError::new_err)?;
        convolution::mc_residual(self.inner.as_ref(), &v).map(|r| from_vector(&r)).map_err(value_err)
    }

    fn jacobi_residual(&self, args: Vec<(BTreeMap<usize, String>, i32)>) -> PyResult<BTreeMap<usize, String>> {
        let xs: Vec<Vector> = args.iter().map(|(x, _)| to_vector(x)).collect::<Result<_, _>>().map_err(PyValueError::new_err)?;
        let pairs: Vec<(&Vector, i32)> = xs.iter().zip(&args).map(|(x, (_, d))| (x, *d)).collect();
        convolution::jacobi_residual(self.inner.as_ref(), &pairs).map(|r| from_vector(&r)).map_err(value_err)
    }

    /// Twist by a Maurer-Cartan element.
    fn twisted(&self, a: BTreeMap<usize, String>) -> PyResult<PyLAlgebra> {
        let v = to_vector(&a).map_err(PyValueError::new_err)?;
        let t = convolution::Twisted::new(self.inner.clone(), v).map_err(value_err)?;
        Ok(PyLAlgebra { inner: Arc::new(t) })
    }

    fn __repr__(&self) -> String {
        format!("LAlgebra(dim={})", self.inner.dim())
    }
}

/// The element `(α, f, β)` of `𝔨` for the seeded structures and morphism.
pub fn standard_mc_element(c: &Coproperad, dim_a: usize, dim_b: usize, seed: u64) -> BTreeMap<usize, String> {
    let cfg = SuiteConfig { dim_a, dim_b, ..SuiteConfig::default() };
    let s = setup(c, &cfg, &mut ChaCha8Rng::seed_from_u64(seed));
    let k = build_k(c, &s.spaces[0], &s.spaces[1]);
    from_vector(&k_element(&k, Some(&s.structures[0]), Some(&s.f), Some(&s.structures[1])))
}

#[pyfunction]
#[pyo3(name = "standard_mc_element")]
fn py_standard_mc_element(c: &PyCoproperad, dim_a: usize, dim_b: usize, seed: u64) -> BTreeMap<usize, String> {
    standard_mc_element(&c.inner, dim_a, dim_b, seed)
}

/// Run suites and return the JSON report.
#[allow(clippy::too_many_arguments)]
pub fn run_suites_json(
    suites: Vec<String>,
    dim_a: usize,
    dim_b: usize,
    max_weight: usize,
    bracket_arity: usize,
    seed: u64,
    negative_control: bool,
) -> Result<String, String> {
    let suites = suites.iter().map(|s| s.parse::<Suite>()).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
    let cfg = SuiteConfig { suites, dim_a, dim_b, max_weight, bracket_arity, seed, negative_control, ..SuiteConfig::default() };
    cli::run(&cfg).map(|r| cli::emit(&r, Format::Json)).map_err(|e| e.to_string())
}

#[pyfunction]
#[allow(clippy::too_many_arguments)]
#[pyo3(signature = (suites=Vec::new(), dim_a=2, dim_b=2, max_weight=3, bracket_arity=4, seed=7, negative_control=false))]
fn run_suites(
    py: Python<'_>,
    suites: Vec<String>,
    dim_a: usize,
    dim_b: usize,
    max_weight: usize,
    bracket_arity: usize,
    seed: u64,
    negative_control: bool,
) -> PyResult<String> {
    py.detach(|| run_suites_json(suites, dim_a, dim_b, max_weight, bracket_arity, seed, negative_control)).map_err(PyValueError::new_err)
}

#[pyfunction]
fn shipped_fixtures() -> Vec<&'static str> {
    SHIPPED.iter().map(|(n, _)| *n).collect()
}

#[pymodule]
#[pyo3(name = "propcalc_py")]
pub fn init_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyCoproperad>()?;
    m.add_class::<PyLAlgebra>()?;
    m.add_function(wrap_pyfunction!(py_standard_mc_element, m)?)?;
    m.add_function(wrap_pyfunction!(run_suites, m)?)?;
    m.add_function(wrap_pyfunction!(shipped_fixtures, m)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vectors_cross_as_fraction_strings() {
        let x = BTreeMap::from([(0, "1/2".to_string()), (3, "-2".to_string())]);
        assert_eq!(from_vector(&to_vector(&x).unwrap()), x);
        assert!(to_vector(&BTreeMap::from([(0, "x".to_string())])).is_err());
    }

    #[test]
    fn unknown_suite_is_rejected() {
        assert!(run_suites_json(vec!["nope".into()], 2, 2, 3, 4, 7, false).is_err());
    }
}
