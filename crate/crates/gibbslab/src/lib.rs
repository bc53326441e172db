//! Desk-scale laboratory for KMS-detailed-balanced fermionic Lindbladians.
//!
//! The pipeline: Majorana operator algebra -> lattice Hamiltonians ->
//! Gaussian-filtered Lindbladian with its coherent correction -> third-quantized
//! parent Hamiltonian on the doubled fermionic space -> spectral, mixing and
//! locality diagnostics. Everything is dense linear algebra, capped at seven
//! Dirac modes so the 4^n superoperator space stays in memory.

pub mod algebra;
pub mod analysis;
pub mod config;
pub mod kernels;
pub mod linalg;
pub mod lindblad;
pub mod model;
pub mod report;
pub mod spectral;
pub mod thirdq;

use thiserror::Error;

pub type C64 = num_complex::Complex64;

/// Hard cap on source Dirac modes; the parent space is 4^n-dimensional.
pub const MAX_DIRAC_MODES: usize = 7;

/// Coefficients below this are dropped during polynomial canonicalization.
pub const PRUNE_TOL: f64 = 1e-14;

/// serde default hook for the configurable mode cap.
pub fn max_modes_default() -> usize {
    MAX_DIRAC_MODES
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("capacity exceeded: {requested} Dirac modes requested, cap is {cap}")]
    CapacityExceeded { requested: usize, cap: usize },
    #[error("Majorana index {index} out of range for {n_modes} Dirac modes")]
    IndexOutOfRange { index: usize, n_modes: usize },
    #[error("monomial indices must be strictly increasing, got {0:?}")]
    NonCanonicalIndices(Vec<usize>),
    #[error("length mismatch: x has {x_len} entries, y has {y_len}")]
    LengthMismatch { x_len: usize, y_len: usize },
    #[error("coefficient matrix is not Hermitian (worst entry residual {residual:.3e})")]
    NonHermitian { residual: f64 },
    #[error("coefficient matrix has real parts above 1e-12 (worst {worst:.3e})")]
    NonImaginary { worst: f64 },
    #[error("locality violated by entries {pairs:?} (1-based Majorana index pairs)")]
    LocalityViolation { pairs: Vec<(usize, usize)> },
    #[error("mixed-parity operator where a parity-homogeneous one is required")]
    MixedParity,
    #[error("state is not full rank: smallest eigenvalue {sigma_min:.3e}")]
    RankDeficientState { sigma_min: f64 },
    #[error("thermal exponent overflow: |beta*nu*p| = {exponent:.3e} exceeds 700")]
    ThermalOverflow { exponent: f64 },
    #[error("superoperator does not decompose in the left/right basis (residual {residual:.3e})")]
    DecompositionResidual { residual: f64 },
    #[error("odd-parity density operator rejected")]
    OddParityState,
    #[error("dual-method disagreement: {what} differ by {diff:.3e} (limit {limit:.1e})")]
    MethodDisagreement { what: String, diff: f64, limit: f64 },
    #[error("assembly invariant breached: {0}")]
    AssemblyInvariant(String),
    #[error("config: {0}")]
    Config(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
