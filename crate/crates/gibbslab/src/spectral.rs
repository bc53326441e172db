//! Spectral side of the construction: eigendecomposition, Gibbs states,
//! decomposition of observables into fixed-frequency components, the KMS inner
//! product, and imaginary-time conjugation.

use crate::algebra::Algebra;
use crate::linalg::{hermitian_eigen, hermiticity_residual, max_abs, HermitianEigen};
use crate::{Error, Result, C64};
use nalgebra::DMatrix;

/// Frequency components with magnitude below this are dropped entirely.
const COMPONENT_FLOOR: f64 = 1e-13;

/// Checked eigendecomposition of a Hermitian matrix; eigenvalues ascending.
pub fn eigendecompose(h: &DMatrix<C64>) -> Result<HermitianEigen> {
    let res = hermiticity_residual(h);
    if res > 1e-10 {
        return Err(Error::NonHermitian { residual: res });
    }
    Ok(hermitian_eigen(h))
}

/// One fixed-frequency component of an observable.
#[derive(Clone, Debug)]
pub struct BohrComponent {
    pub frequency: f64,
    pub matrix: DMatrix<C64>,
}

/// Decomposition of an observable over the frequency differences of a
/// Hamiltonian's spectrum.
#[derive(Clone, Debug)]
pub struct BohrDecomposition {
    pub components: Vec<BohrComponent>,
    /// Count of successive frequency gaps that fell inside (tol, 10 tol],
    /// close enough to the clustering threshold to deserve a report.
    pub ambiguous_gaps: usize,
}

impl BohrDecomposition {
    pub fn total(&self, dim: usize) -> DMatrix<C64> {
        let mut acc = DMatrix::zeros(dim, dim);
        for c in &self.components {
            acc += &c.matrix;
        }
        acc
    }
}

/// Splits an operator into its fixed-frequency parts relative to `eig`.
///
/// Eigenvalue differences are clustered with a threshold of 1e−9 relative to
/// the spectral range; each cluster's frequency is the mean over its pairs.
pub fn bohr_decompose(op: &DMatrix<C64>, eig: &HermitianEigen) -> BohrDecomposition {
    let d = eig.values.len();
    let range = eig.values[d - 1] - eig.values[0];
    let tol = 1e-9 * range.max(1.0);

    let rotated = eig.vectors.adjoint() * op * &eig.vectors;
    // entry (row, col) oscillates at E_row - E_col under Heisenberg evolution
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(d * d);
    for a in 0..d {
        for b in 0..d {
            pairs.push((eig.values[a] - eig.values[b], a, b));
        }
    }
    pairs.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());

    let mut components = Vec::new();
    let mut ambiguous = 0usize;
    let mut start = 0usize;
    for i in 1..=pairs.len() {
        let split = i == pairs.len() || {
            let gap = pairs[i].0 - pairs[i - 1].0;
            if gap > tol && gap <= 10.0 * tol {
                ambiguous += 1;
            }
            gap > tol
        };
        if !split {
            continue;
        }
        let cluster = &pairs[start..i];
        let freq = cluster.iter().map(|p| p.0).sum::<f64>() / cluster.len() as f64;
        let mut part = DMatrix::zeros(d, d);
        for &(_, row, col) in cluster {
            part[(row, col)] = rotated[(row, col)];
        }
        let back = &eig.vectors * part * eig.vectors.adjoint();
        if max_abs(&back) >= COMPONENT_FLOOR {
            components.push(BohrComponent {
                frequency: freq,
                matrix: back,
            });
        }
        start = i;
    }
    BohrDecomposition {
        components,
        ambiguous_gaps: ambiguous,
    }
}

/// Thermal state of a Hamiltonian at inverse temperature β ≥ 0.
#[derive(Clone, Debug)]
pub struct GibbsState {
    pub beta: f64,
    pub log_z: f64,
    pub sigma: DMatrix<C64>,
    pub sigma_min: f64,
    basis: DMatrix<C64>,
    log_weights: Vec<f64>,
}

/// Builds the Gibbs state from an eigendecomposition of the Hamiltonian.
/// Normalization goes through log-sum-exp, so large β‖H‖ stays finite.
pub fn gibbs_state(eig: &HermitianEigen, beta: f64) -> Result<GibbsState> {
    if !(beta >= 0.0) || !beta.is_finite() {
        return Err(Error::Config(format!(
            "inverse temperature must be finite and nonnegative, got {beta}"
        )));
    }
    let top = eig.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let shifted: Vec<f64> = eig.values.iter().map(|&v| -beta * (v - top)).collect();
    let log_z = -beta * top + shifted.iter().map(|&x| x.exp()).sum::<f64>().ln();
    let log_weights: Vec<f64> = eig.values.iter().map(|&v| -beta * v - log_z).collect();
    let weights: Vec<f64> = log_weights.iter().map(|&x| x.exp()).collect();
    let sigma_min = weights.iter().cloned().fold(f64::INFINITY, f64::min);

    let d = eig.values.len();
    let mut scaled = eig.vectors.clone();
    for (j, &w) in weights.iter().enumerate() {
        for i in 0..d {
            scaled[(i, j)] *= w;
        }
    }
    let sigma = &scaled * eig.vectors.adjoint();
    Ok(GibbsState {
        beta,
        log_z,
        sigma,
        sigma_min,
        basis: eig.vectors.clone(),
        log_weights,
    })
}

impl GibbsState {
    /// σ^p for any real p, built in the Hamiltonian eigenbasis.
    pub fn power(&self, p: f64) -> Result<DMatrix<C64>> {
        let d = self.log_weights.len();
        let mut worst = 0.0f64;
        let mut scaled = self.basis.clone();
        for (j, &lw) in self.log_weights.iter().enumerate() {
            let expo = p * lw;
            worst = worst.max(expo);
            let w = expo.exp();
            for i in 0..d {
                scaled[(i, j)] *= w;
            }
        }
        if worst > 700.0 {
            return Err(Error::ThermalOverflow { exponent: worst });
        }
        Ok(&scaled * self.basis.adjoint())
    }
}

/// KMS inner product Tr[X† σ^{1/2} Y σ^{1/2}].
pub fn kms_inner(x: &DMatrix<C64>, y: &DMatrix<C64>, state: &GibbsState) -> Result<C64> {
    if state.sigma_min < 1e-14 {
        return Err(Error::RankDeficientState {
            sigma_min: state.sigma_min,
        });
    }
    let half = state.power(0.5)?;
    Ok((x.adjoint() * &half * y * &half).trace())
}

/// Superoperator of X ↦ A X A in monomial coordinates.
pub fn sandwich_superop(a: &DMatrix<C64>, algebra: &Algebra) -> DMatrix<C64> {
    let m = algebra.basis_len;
    let mut out = DMatrix::zeros(m, m);
    for b in 0..m {
        let left = algebra.monomial(b as u64).right_mul_dense(a);
        let col = left * a;
        out.set_column(b, &algebra.vectorize(&col));
    }
    out
}

/// Gram matrix of the KMS inner product in orthonormal monomial coordinates.
pub fn kms_gram(state: &GibbsState, algebra: &Algebra) -> Result<DMatrix<C64>> {
    if state.sigma_min < 1e-14 {
        return Err(Error::RankDeficientState {
            sigma_min: state.sigma_min,
        });
    }
    let half = state.power(0.5)?;
    Ok(sandwich_superop(&half, algebra) * C64::new(algebra.dim as f64, 0.0))
}

/// σ^p X σ^{−p} for p ∈ {±1/4, ±1/2}, with an overflow guard on β‖H‖.
pub fn imaginary_time_conjugate(
    x: &DMatrix<C64>,
    state: &GibbsState,
    p: f64,
) -> Result<DMatrix<C64>> {
    let allowed = [0.25, -0.25, 0.5, -0.5];
    if !allowed.iter().any(|&q| (q - p).abs() < 1e-15) {
        return Err(Error::Config(format!(
            "imaginary-time exponent must be one of ±1/4, ±1/2, got {p}"
        )));
    }
    let d = state.log_weights.len();
    let rotated = state.basis.adjoint() * x * &state.basis;
    let mut out = rotated.clone();
    for a in 0..d {
        for b in 0..d {
            let expo = p * (state.log_weights[a] - state.log_weights[b]);
            if expo > 700.0 {
                return Err(Error::ThermalOverflow { exponent: expo });
            }
            out[(a, b)] = rotated[(a, b)] * expo.exp();
        }
    }
    Ok(&state.basis * out * state.basis.adjoint())
}

/// Checked constructor for model Hamiltonians handed in as dense matrices.
pub fn hamiltonian_eigen(h: &DMatrix<C64>) -> Result<HermitianEigen> {
    eigendecompose(h)
}
