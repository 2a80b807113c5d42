//! Python bindings: `import aliquot`.

use num_bigint::BigUint;
use pyo3::exceptions::{PyOverflowError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use aliquot_core::arith;
use aliquot_core::inverse;
use aliquot_core::orbit::{self, Certificate, ComponentResult, Config, FiniteComponent, OrbitParams, Terminal};
use aliquot_core::scan;
use aliquot_core::Error;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Domain(m) => PyValueError::new_err(m),
        Error::Overflow(m) => PyOverflowError::new_err(format!("arithmetic overflow in {m}")),
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

/// Sorted list of every m with s(m) = n, for even n >= 2.
#[pyfunction]
fn s_inverse(py: Python<'_>, n: u64) -> PyResult<Vec<u128>> {
    py.detach(|| inverse::s_inverse(n)).map(|image| image.values()).map_err(to_py)
}

/// Like `s_inverse`, with the branch that found each preimage.
#[pyfunction]
fn s_inverse_with_provenance(py: Python<'_>, n: u64) -> PyResult<Vec<(u128, &'static str)>> {
    let image = py.detach(|| inverse::s_inverse(n)).map_err(to_py)?;
    Ok(image.preimages.iter().map(|p| (p.m, p.provenance.as_str())).collect())
}

/// s(n) = sigma(n) - n.
#[pyfunction]
fn aliquot_sum(n: u64) -> PyResult<u128> {
    arith::aliquot_sum_wide(n).map_err(to_py)
}

#[pyfunction]
fn factor(n: u64) -> PyResult<Vec<(u64, u32)>> {
    arith::factor(n).map(|f| f.factors().to_vec()).map_err(to_py)
}

#[pyfunction]
fn is_prime(n: u64) -> bool {
    arith::is_prime(n)
}

/// Result of iterating s from a start value.
#[pyclass(frozen, get_all, module = "aliquot")]
struct Orbit {
    start: u64,
    trajectory: Vec<u64>,
    k: usize,
    /// One of "odd", "prime_predecessor", "cycle", "exceeded_bound", "steps_exhausted".
    kind: &'static str,
    /// The terminal value (odd m, m with m - 1 prime, the exceeding value, or the last value).
    value: Option<u128>,
    witness: Option<u128>,
    cycle: Option<Vec<u64>>,
}

#[pymethods]
impl Orbit {
    fn __repr__(&self) -> String {
        format!("Orbit(start={}, k={}, kind={:?})", self.start, self.k, self.kind)
    }
}

/// Iterate s from n. With `prime_stop` the orbit also stops once m - 1 is prime.
#[pyfunction]
#[pyo3(signature = (n, bound = orbit::DEFAULT_BOUND, max_steps = orbit::DEFAULT_MAX_STEPS, prime_stop = true))]
fn forward_orbit(n: u64, bound: u64, max_steps: usize, prime_stop: bool) -> PyResult<Orbit> {
    let params = OrbitParams { bound, max_steps, stop_on_prime_predecessor: prime_stop };
    let o = orbit::forward_orbit_with(n, &params).map_err(to_py)?;
    let (kind, value, witness, cycle) = match o.terminal {
        Terminal::ReachedOdd { m } => ("odd", Some(m as u128), None, None),
        Terminal::PredecessorPrimeSquare { m, witness, .. } => ("prime_predecessor", Some(m as u128), Some(witness), None),
        Terminal::EnteredCycle { cycle, .. } => ("cycle", None, None, Some(cycle.elements().to_vec())),
        Terminal::ExceededBound { value } => ("exceeded_bound", Some(value), None, None),
        Terminal::StepsExhausted { last } => ("steps_exhausted", Some(last as u128), None, None),
    };
    Ok(Orbit { start: o.start, trajectory: o.trajectory, k: o.k, kind, value, witness, cycle })
}

/// Classification of one connected component.
#[pyclass(frozen, module = "aliquot")]
struct Component {
    #[pyo3(get)]
    n: u64,
    /// "finite", "potentially_infinite" or "indeterminate".
    #[pyo3(get)]
    status: &'static str,
    /// (m, j, k) with m odd and s^k(n) = s^j(m).
    #[pyo3(get)]
    certificate: Option<(BigUint, u32, u32)>,
    #[pyo3(get)]
    reason: Option<String>,
    finite: Option<FiniteComponent>,
}

#[pymethods]
impl Component {
    #[getter]
    fn nodes(&self) -> Option<Vec<u64>> {
        self.finite.as_ref().map(|f| f.nodes.clone())
    }

    #[getter]
    fn edges(&self) -> Option<Vec<(u64, u64)>> {
        self.finite.as_ref().map(|f| f.edges.clone())
    }

    /// The cycle a finite component drains into.
    #[getter]
    fn cycle(&self) -> Option<Vec<u64>> {
        self.finite.as_ref().map(|f| f.anchor.elements().to_vec())
    }

    fn size(&self) -> Option<usize> {
        self.finite.as_ref().map(FiniteComponent::size)
    }

    /// DOT text of a finite component.
    fn to_dot(&self) -> PyResult<String> {
        match &self.finite {
            Some(f) => Ok(f.to_dot()),
            None => Err(PyValueError::new_err(format!("component of {} is {}", self.n, self.status))),
        }
    }

    fn __repr__(&self) -> String {
        match (&self.finite, &self.certificate) {
            (Some(f), _) => format!("Component(n={}, finite, size={})", self.n, f.size()),
            (_, Some((m, j, k))) => format!("Component(n={}, potentially_infinite, cert=({m}, {j}, {k}))", self.n),
            _ => format!("Component(n={}, {})", self.n, self.status),
        }
    }
}

impl Component {
    fn new(n: u64, r: ComponentResult) -> Self {
        let status = r.status();
        let mut c = Component { n, status, certificate: None, reason: None, finite: None };
        match r {
            ComponentResult::Finite(f) => c.finite = Some(f),
            ComponentResult::PotentiallyInfinite { certificate: Certificate { m, j, k } } => {
                c.certificate = Some((m, j, k))
            }
            ComponentResult::Indeterminate(i) => {
                c.reason = Some(format!("{} after {} at {}", i.limit.as_str(), i.explored, i.at))
            }
        }
        c
    }
}

fn config(bound: Option<u64>, max_steps: Option<usize>, max_nodes: Option<usize>) -> Config {
    let mut config = Config::default();
    config.bound = bound.unwrap_or(config.bound);
    config.max_steps = max_steps.unwrap_or(config.max_steps);
    config.max_nodes = max_nodes.unwrap_or(config.max_nodes);
    config
}

/// Shares cycle components and fallback searches across calls.
#[pyclass(frozen, module = "aliquot")]
struct Classifier {
    inner: orbit::Classifier,
}

#[pymethods]
impl Classifier {
    #[new]
    #[pyo3(signature = (bound = None, max_steps = None, max_nodes = None))]
    fn new(bound: Option<u64>, max_steps: Option<usize>, max_nodes: Option<usize>) -> Self {
        Classifier { inner: orbit::Classifier::new(config(bound, max_steps, max_nodes)) }
    }

    fn classify(&self, py: Python<'_>, n: u64) -> PyResult<Component> {
        let r = py.detach(|| self.inner.classify(n)).map_err(to_py)?;
        Ok(Component::new(n, r))
    }

    /// Summary of a scan of every even n <= limit, as JSON text.
    fn scan(&self, py: Python<'_>, limit: u64) -> PyResult<String> {
        let summary = py.detach(|| scan::scan_summary(limit, &self.inner)).map_err(to_py)?;
        Ok(serde_json::to_string(&summary).expect("summaries serialize"))
    }
}

#[pyfunction]
#[pyo3(signature = (n, bound = None, max_steps = None, max_nodes = None))]
fn classify(
    py: Python<'_>,
    n: u64,
    bound: Option<u64>,
    max_steps: Option<usize>,
    max_nodes: Option<usize>,
) -> PyResult<Component> {
    Classifier::new(bound, max_steps, max_nodes).classify(py, n)
}

/// True iff m is odd and s^k(n) = s^j(m).
#[pyfunction]
fn verify_certificate(n: u64, m: BigUint, j: u32, k: u32) -> PyResult<bool> {
    orbit::verify_certificate(n, &Certificate { m, j, k }).map_err(to_py)
}

/// Checks every even n in [8, limit]; returns (largest minimal p, the n needing it).
#[pyfunction]
fn verify_goldbach(py: Python<'_>, limit: u64) -> PyResult<(u64, u64)> {
    let r = py.detach(|| arith::verify_goldbach(limit)).map_err(to_py)?;
    Ok((r.max_min_p, r.max_min_p_at))
}

#[pymodule]
fn aliquot(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(s_inverse, m)?)?;
    m.add_function(wrap_pyfunction!(s_inverse_with_provenance, m)?)?;
    m.add_function(wrap_pyfunction!(aliquot_sum, m)?)?;
    m.add_function(wrap_pyfunction!(factor, m)?)?;
    m.add_function(wrap_pyfunction!(is_prime, m)?)?;
    m.add_function(wrap_pyfunction!(forward_orbit, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(verify_certificate, m)?)?;
    m.add_function(wrap_pyfunction!(verify_goldbach, m)?)?;
    m.add_class::<Orbit>()?;
    m.add_class::<Component>()?;
    m.add_class::<Classifier>()?;
    Ok(())
}
