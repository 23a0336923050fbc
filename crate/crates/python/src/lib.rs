//! Python bindings for `chained-bell`.

use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;

use chained_bell::chain::{self, make_chain};
use chained_bell::lhv::{self, DeterministicStrategy};
use chained_bell::loss::{self, LossSpec};
use chained_bell::oracle;
use chained_bell::singlet::{self, Angle};
use chained_bell::sv::{self, SvSpec};
use chained_bell::BellError;

fn to_py(e: BellError) -> PyErr {
    match e {
        BellError::CapExceeded { .. } => PyArithmeticError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn angle(theta: f64) -> PyResult<Angle> {
    Angle::new(theta).map_err(to_py)
}

fn loss_spec(eta: f64) -> PyResult<LossSpec> {
    LossSpec::new(eta).map_err(to_py)
}

fn sv_spec(gamma: f64, mass: f64, cap: usize) -> PyResult<SvSpec> {
    SvSpec::new(gamma)
        .and_then(|s| s.with_mass_threshold(mass))
        .and_then(|s| s.with_cap(cap))
        .map_err(to_py)
}

/// Joint distribution of Alice's count `n` and Bob's count `m`.
#[pyclass(name = "JointCountDistribution", module = "chained_bell", frozen)]
struct PyJointCountDistribution {
    inner: singlet::JointCountDistribution,
}

#[pymethods]
impl PyJointCountDistribution {
    #[getter]
    fn max_count(&self) -> usize {
        self.inner.max_count()
    }

    #[getter]
    fn mass(&self) -> f64 {
        self.inner.mass()
    }

    fn get(&self, n: usize, m: usize) -> f64 {
        self.inner.get(n, m)
    }

    /// Rows indexed by `n`, columns by `m`.
    fn to_list(&self) -> Vec<Vec<f64>> {
        self.inner
            .entries()
            .chunks(self.inner.max_count() + 1)
            .map(<[f64]>::to_vec)
            .collect()
    }

    fn mean_abs_difference(&self) -> f64 {
        self.inner.mean_abs_difference()
    }

    fn alice_marginal(&self) -> Vec<f64> {
        self.inner.alice_marginal()
    }

    fn bob_marginal(&self) -> Vec<f64> {
        self.inner.bob_marginal()
    }

    fn __repr__(&self) -> String {
        format!(
            "JointCountDistribution(max_count={}, mass={})",
            self.inner.max_count(),
            self.inner.mass()
        )
    }
}

#[pyclass(name = "BellBreakdown", module = "chained_bell", frozen, get_all)]
struct PyBellBreakdown {
    lhs: f64,
    rhs: f64,
    bell: f64,
    per_n: Vec<(usize, f64)>,
    settings: usize,
    eta: f64,
    gamma: Option<f64>,
    n_max: Option<usize>,
    mass: Option<f64>,
}

impl From<chain::BellBreakdown> for PyBellBreakdown {
    fn from(b: chain::BellBreakdown) -> Self {
        PyBellBreakdown {
            lhs: b.lhs,
            rhs: b.rhs,
            bell: b.bell,
            per_n: b.per_n,
            settings: b.settings,
            eta: b.eta,
            gamma: b.gamma,
            n_max: b.n_max,
            mass: b.mass,
        }
    }
}

#[pymethods]
impl PyBellBreakdown {
    fn violates(&self) -> bool {
        self.bell < 0.0
    }

    fn __repr__(&self) -> String {
        format!(
            "BellBreakdown(settings={}, eta={}, lhs={}, rhs={}, bell={})",
            self.settings, self.eta, self.lhs, self.rhs, self.bell
        )
    }
}

/// Settings geometry for `L` settings per side.
#[pyclass(name = "ChainSpec", module = "chained_bell", frozen)]
struct PyChainSpec {
    inner: chain::ChainSpec,
}

#[pymethods]
impl PyChainSpec {
    #[new]
    fn new(settings: usize) -> PyResult<Self> {
        Ok(PyChainSpec {
            inner: make_chain(settings).map_err(to_py)?,
        })
    }

    #[getter]
    fn settings(&self) -> usize {
        self.inner.settings()
    }

    #[getter]
    fn theta(&self) -> f64 {
        self.inner.theta().radians()
    }

    #[getter]
    fn theta_prime(&self) -> f64 {
        self.inner.theta_prime().radians()
    }

    fn __repr__(&self) -> String {
        format!("ChainSpec(settings={})", self.inner.settings())
    }
}

#[pyfunction]
fn joint_distribution(photons: usize, theta: f64) -> PyResult<PyJointCountDistribution> {
    let inner = singlet::joint_distribution(photons, angle(theta)?).map_err(to_py)?;
    Ok(PyJointCountDistribution { inner })
}

#[pyfunction]
fn oracle_joint_distribution(
    photons: usize,
    theta_a: f64,
    theta_b: f64,
) -> PyResult<PyJointCountDistribution> {
    let inner = oracle::oracle_joint_distribution(photons, angle(theta_a)?, angle(theta_b)?)
        .map_err(to_py)?;
    Ok(PyJointCountDistribution { inner })
}

#[pyfunction]
fn binomial_thin(dist: &PyJointCountDistribution, eta: f64) -> PyResult<PyJointCountDistribution> {
    Ok(PyJointCountDistribution {
        inner: loss::binomial_thin(&dist.inner, loss_spec(eta)?),
    })
}

#[pyfunction]
#[pyo3(signature = (dist, eta, samples, seed = 0))]
fn mc_thin(
    py: Python<'_>,
    dist: &PyJointCountDistribution,
    eta: f64,
    samples: u64,
    seed: u64,
) -> PyResult<PyJointCountDistribution> {
    let inner = py
        .detach(|| oracle::mc_thin(&dist.inner, eta, samples, seed))
        .map_err(to_py)?;
    Ok(PyJointCountDistribution { inner })
}

#[pyfunction]
#[pyo3(signature = (theta, gamma, eta = 1.0, mass = sv::DEFAULT_MASS_THRESHOLD, cap = 60))]
fn sv_mixture(
    theta: f64,
    gamma: f64,
    eta: f64,
    mass: f64,
    cap: usize,
) -> PyResult<PyJointCountDistribution> {
    let inner = sv::sv_mixture(angle(theta)?, &sv_spec(gamma, mass, cap)?, loss_spec(eta)?)
        .map_err(to_py)?;
    Ok(PyJointCountDistribution { inner })
}

#[pyfunction]
#[pyo3(signature = (photons, settings, eta = 1.0))]
fn bell_fixed_n(photons: usize, settings: usize, eta: f64) -> PyResult<PyBellBreakdown> {
    let chain = make_chain(settings).map_err(to_py)?;
    chain::bell_fixed_n(photons, &chain, loss_spec(eta)?)
        .map(Into::into)
        .map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (settings, gamma, eta = 1.0, mass = sv::DEFAULT_MASS_THRESHOLD, cap = 60))]
fn bell_sv(
    py: Python<'_>,
    settings: usize,
    gamma: f64,
    eta: f64,
    mass: f64,
    cap: usize,
) -> PyResult<PyBellBreakdown> {
    let chain = make_chain(settings).map_err(to_py)?;
    let spec = sv_spec(gamma, mass, cap)?;
    let loss = loss_spec(eta)?;
    py.detach(|| chain::bell_sv(&chain, &spec, loss))
        .map(Into::into)
        .map_err(to_py)
}

#[pyfunction]
fn asymptotic_bell_fixed_n(photons: u64) -> f64 {
    chain::asymptotic_bell_fixed_n(photons)
}

/// Large-L right-hand side as `(numerator, denominator)`.
#[pyfunction]
fn asymptotic_rhs_fraction(photons: u64) -> (u64, u64) {
    chain::asymptotic_rhs_fraction(photons)
}

#[pyfunction]
fn rhs_sv_asymptotic(gamma: f64) -> f64 {
    chain::rhs_sv_asymptotic(gamma)
}

#[pyfunction]
fn lambda_sq(photons: usize, gamma: f64) -> f64 {
    sv::lambda_sq(photons, gamma)
}

#[pyfunction]
#[pyo3(signature = (gamma, mass = sv::DEFAULT_MASS_THRESHOLD, cap = 60))]
fn n_max_for(gamma: f64, mass: f64, cap: usize) -> PyResult<usize> {
    sv::n_max_for(&sv_spec(gamma, mass, cap)?).map_err(to_py)
}

#[pyfunction]
fn mean_photon_number(gamma: f64) -> f64 {
    sv::mean_photon_number(gamma)
}

#[pyfunction]
fn intensity_correlation(theta_a: f64, theta_b: f64, gamma: f64) -> PyResult<f64> {
    Ok(sv::intensity_correlation(
        angle(theta_a)?,
        angle(theta_b)?,
        gamma,
    ))
}

#[pyfunction]
fn intensity_visibility(gamma: f64) -> f64 {
    sv::intensity_visibility(gamma)
}

#[pyfunction]
fn polygon_check(alice: Vec<u32>, bob: Vec<u32>) -> PyResult<f64> {
    let s = DeterministicStrategy::new(alice, bob).map_err(to_py)?;
    Ok(lhv::polygon_check(&s))
}

#[pyfunction]
fn lhv_minimum(py: Python<'_>, settings: usize, cap: u32) -> PyResult<f64> {
    py.detach(|| lhv::lhv_minimum(settings, cap)).map_err(to_py)
}

#[pyfunction]
fn empirical_distance(v: Vec<i64>, w: Vec<i64>) -> PyResult<f64> {
    lhv::empirical_distance(&v, &w).map_err(to_py)
}

#[pymodule]
#[pyo3(name = "chained_bell")]
fn chained_bell_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyJointCountDistribution>()?;
    m.add_class::<PyBellBreakdown>()?;
    m.add_class::<PyChainSpec>()?;
    m.add_function(wrap_pyfunction!(joint_distribution, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_joint_distribution, m)?)?;
    m.add_function(wrap_pyfunction!(binomial_thin, m)?)?;
    m.add_function(wrap_pyfunction!(mc_thin, m)?)?;
    m.add_function(wrap_pyfunction!(sv_mixture, m)?)?;
    m.add_function(wrap_pyfunction!(bell_fixed_n, m)?)?;
    m.add_function(wrap_pyfunction!(bell_sv, m)?)?;
    m.add_function(wrap_pyfunction!(asymptotic_bell_fixed_n, m)?)?;
    m.add_function(wrap_pyfunction!(asymptotic_rhs_fraction, m)?)?;
    m.add_function(wrap_pyfunction!(rhs_sv_asymptotic, m)?)?;
    m.add_function(wrap_pyfunction!(lambda_sq, m)?)?;
    m.add_function(wrap_pyfunction!(n_max_for, m)?)?;
    m.add_function(wrap_pyfunction!(mean_photon_number, m)?)?;
    m.add_function(wrap_pyfunction!(intensity_correlation, m)?)?;
    m.add_function(wrap_pyfunction!(intensity_visibility, m)?)?;
    m.add_function(wrap_pyfunction!(polygon_check, m)?)?;
    m.add_function(wrap_pyfunction!(lhv_minimum, m)?)?;
    m.add_function(wrap_pyfunction!(empirical_distance, m)?)?;
    Ok(())
}
