//! Python bindings: model constructors, the assembled pipeline with its
//! spectral diagnostics, and the closed-form kernels.

use std::sync::OnceLock;

use gibbslab::analysis::{
    build_parent_pipeline, build_pipeline, calibrate_gap_constant, mixing_bound_verify,
    spectral_gap, ModelPipeline, ParentPipeline, Sector,
};
use gibbslab::config::MethodChoice;
use gibbslab::kernels;
use gibbslab::lindblad::{even_sector_gap, kms_dbc_residual, Method};
use gibbslab::model;
use gibbslab::thirdq::naive_vectorization_counterexample;
use num_complex::Complex;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn to_py(e: gibbslab::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_method(s: &str) -> PyResult<Method> {
    MethodChoice::parse(s).map(MethodChoice::to_method).map_err(to_py)
}

fn parse_sector(s: &str) -> PyResult<Sector> {
    match s {
        "full" => Ok(Sector::Full),
        "even" => Ok(Sector::Even),
        "odd" => Ok(Sector::Odd),
        other => Err(PyValueError::new_err(format!(
            "sector must be full, even or odd, got '{other}'"
        ))),
    }
}

/// A fermionic lattice model: Hamiltonian terms plus mode geometry.
#[pyclass(frozen, name = "Model")]
struct PyModel {
    inner: model::FermionModel,
}

#[pymethods]
impl PyModel {
    /// One Dirac mode with level splitting `epsilon`.
    #[staticmethod]
    #[pyo3(signature = (epsilon=0.4))]
    fn single_mode(epsilon: f64) -> PyResult<Self> {
        Ok(PyModel {
            inner: model::single_mode(epsilon).map_err(to_py)?,
        })
    }

    /// Two modes joined by a hopping amplitude.
    #[staticmethod]
    #[pyo3(signature = (hopping=0.7))]
    fn two_mode_chain(hopping: f64) -> PyResult<Self> {
        Ok(PyModel {
            inner: model::two_mode_chain(hopping).map_err(to_py)?,
        })
    }

    /// Spinful Hubbard chain with unit hopping, on-site repulsion `u` and
    /// chemical potential `mu`.
    #[staticmethod]
    #[pyo3(signature = (sites=1, u=0.0, mu=0.3))]
    fn hubbard(sites: usize, u: f64, mu: f64) -> PyResult<Self> {
        Ok(PyModel {
            inner: model::build_fermi_hubbard(sites, u, mu).map_err(to_py)?,
        })
    }

    /// Spinless chain with nearest-neighbour hopping and density coupling.
    #[staticmethod]
    #[pyo3(signature = (modes=5, hopping=1.0, mu=0.3, coupling=0.1))]
    fn spinless_chain(modes: usize, hopping: f64, mu: f64, coupling: f64) -> PyResult<Self> {
        Ok(PyModel {
            inner: model::spinless_chain(modes, hopping, mu, coupling).map_err(to_py)?,
        })
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name.clone()
    }

    #[getter]
    fn n_modes(&self) -> usize {
        self.inner.n_modes()
    }

    #[getter]
    fn is_free(&self) -> bool {
        self.inner.is_free()
    }

    fn __repr__(&self) -> String {
        format!("Model({}, modes={})", self.inner.name, self.inner.n_modes())
    }
}

/// The assembled thermal generator for one model at one inverse temperature,
/// with the doubled-space construction computed on demand.
#[pyclass(frozen, name = "Pipeline")]
struct PyPipeline {
    p: ModelPipeline,
    method: Method,
    parent: OnceLock<ParentPipeline>,
}

impl PyPipeline {
    fn parent(&self) -> PyResult<&ParentPipeline> {
        if let Some(pp) = self.parent.get() {
            return Ok(pp);
        }
        let built = build_parent_pipeline(&self.p, self.method).map_err(to_py)?;
        Ok(self.parent.get_or_init(|| built))
    }
}

#[pymethods]
impl PyPipeline {
    #[new]
    #[pyo3(signature = (model, beta, method="closed"))]
    fn new(model: &PyModel, beta: f64, method: &str) -> PyResult<Self> {
        let method = parse_method(method)?;
        let p = build_pipeline(model.inner.clone(), beta, method).map_err(to_py)?;
        Ok(PyPipeline {
            p,
            method,
            parent: OnceLock::new(),
        })
    }

    #[getter]
    fn beta(&self) -> f64 {
        self.p.state.beta
    }

    #[getter]
    fn sigma_min(&self) -> f64 {
        self.p.state.sigma_min
    }

    #[getter]
    fn log_partition(&self) -> f64 {
        self.p.state.log_z
    }

    fn hamiltonian_eigenvalues(&self) -> Vec<f64> {
        self.p.eig.values.clone()
    }

    /// Frobenius norm of the generator applied to the thermal state.
    fn stationarity_residual(&self) -> f64 {
        self.p
            .assembled
            .stationarity_residual(&self.p.state.sigma, &self.p.algebra)
    }

    /// Deviation of the Heisenberg generator from self-adjointness in the
    /// thermal inner product.
    fn detailed_balance_residual(&self) -> PyResult<f64> {
        kms_dbc_residual(&self.p.assembled.heisenberg, &self.p.gram).map_err(to_py)
    }

    /// Even-sector spectral gap of the generator.
    fn even_gap(&self) -> PyResult<f64> {
        even_sector_gap(
            &self.p.assembled.heisenberg,
            &self.p.gram,
            self.p.algebra.basis_len,
        )
        .map_err(to_py)
    }

    /// Spectral gap of the doubled-space Hermitian operator, by sector.
    #[pyo3(signature = (sector="full"))]
    fn parent_gap(&self, sector: &str) -> PyResult<f64> {
        let sector = parse_sector(sector)?;
        let pp = self.parent()?;
        Ok(spectral_gap(&pp.parent.total, sector).map_err(to_py)?.gap)
    }

    fn parent_hermiticity(&self) -> PyResult<f64> {
        Ok(self.parent()?.parent.hermiticity)
    }

    /// Spectral norm of the interacting part of the doubled-space operator.
    fn interaction_norm(&self) -> PyResult<f64> {
        Ok(self.parent()?.split.interaction_norm())
    }

    /// Verifies the trace-distance convergence bound on probe states.
    /// Returns (worst bound slack, empirical tail rate, even-sector gap).
    #[pyo3(signature = (seed=7))]
    fn mixing(&self, seed: u64) -> PyResult<(f64, Option<f64>, f64)> {
        let rep = mixing_bound_verify(&self.p, seed).map_err(to_py)?;
        Ok((rep.worst_slack, rep.tail_rate, rep.gap))
    }

    fn __repr__(&self) -> String {
        format!(
            "Pipeline({}, beta={}, modes={})",
            self.p.model.name, self.p.state.beta, self.p.algebra.n_modes
        )
    }
}

/// Frequency profile of the jump filter.
#[pyfunction]
fn f_hat(omega: f64, beta: f64) -> f64 {
    kernels::f_hat(omega, beta)
}

/// Thermal weighting window; equals 1 at omega = -1/beta.
#[pyfunction]
fn thermal_window(omega: f64, beta: f64) -> f64 {
    kernels::thermal_window(omega, beta)
}

/// Two-frequency dissipator coefficient.
#[pyfunction]
fn dissipator_coefficient(nu: f64, nup: f64, beta: f64) -> f64 {
    kernels::dissipator_coefficient(nu, nup, beta)
}

/// Odd kernel in frequency; purely imaginary, zero at the origin.
#[pyfunction]
fn odd_kernel_hat(omega: f64) -> Complex<f64> {
    kernels::odd_kernel_hat(omega)
}

/// Shifted Gaussian kernel in frequency.
#[pyfunction]
fn shift_kernel_hat(omega: f64) -> f64 {
    kernels::shift_kernel_hat(omega)
}

/// Closed form of the tilted filter transform at (t, omega).
#[pyfunction]
fn tilted_filter(t: f64, omega: f64, beta: f64) -> Complex<f64> {
    kernels::tilted_filter_closed(t, omega, beta)
}

/// Coherent-correction weight for a Bohr frequency pair.
#[pyfunction]
fn coherent_weight(nu: f64, nup: f64, beta: f64) -> Complex<f64> {
    kernels::coherent_weight(nu, nup, beta)
}

/// Single-mode doubled-space gap prediction for calibration constant `c`.
#[pyfunction]
fn single_mode_gap(eps: f64, beta: f64, c: f64) -> f64 {
    gibbslab::thirdq::single_mode_gap(eps, beta, c)
}

/// Gap constant fixed by the zero-splitting single mode at unit beta.
#[pyfunction]
#[pyo3(signature = (method="closed"))]
fn gap_constant(method: &str) -> PyResult<f64> {
    calibrate_gap_constant(parse_method(method)?).map_err(to_py)
}

/// Residuals (superoperator commutator, naive-image anticommutator,
/// corrected-image commutator) of the vectorization pitfall demonstration.
#[pyfunction]
fn vectorization_counterexample() -> PyResult<(f64, f64, f64)> {
    let r = naive_vectorization_counterexample().map_err(to_py)?;
    Ok((
        r.superop_commutator,
        r.naive_anticommutator,
        r.corrected_commutator,
    ))
}

#[pymodule]
fn gibbslab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyModel>()?;
    m.add_class::<PyPipeline>()?;
    m.add_function(wrap_pyfunction!(f_hat, m)?)?;
    m.add_function(wrap_pyfunction!(thermal_window, m)?)?;
    m.add_function(wrap_pyfunction!(dissipator_coefficient, m)?)?;
    m.add_function(wrap_pyfunction!(odd_kernel_hat, m)?)?;
    m.add_function(wrap_pyfunction!(shift_kernel_hat, m)?)?;
    m.add_function(wrap_pyfunction!(tilted_filter, m)?)?;
    m.add_function(wrap_pyfunction!(coherent_weight, m)?)?;
    m.add_function(wrap_pyfunction!(single_mode_gap, m)?)?;
    m.add_function(wrap_pyfunction!(gap_constant, m)?)?;
    m.add_function(wrap_pyfunction!(vectorization_counterexample, m)?)?;
    Ok(())
}
