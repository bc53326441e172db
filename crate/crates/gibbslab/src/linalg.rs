//! Shared dense linear algebra: sorted Hermitian eigendecomposition, singular
//! values, and a scaling-and-squaring matrix exponential for the non-normal
//! superoperator generators.

use crate::C64;
use nalgebra::linalg::SymmetricEigen;
use nalgebra::{DMatrix, DVector};

/// Hermitian eigendecomposition with eigenvalues sorted ascending.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Columns are the eigenvectors, in eigenvalue order.
    pub vectors: DMatrix<C64>,
}

pub fn hermitian_eigen(m: &DMatrix<C64>) -> HermitianEigen {
    let se = SymmetricEigen::new(m.clone());
    let k = se.eigenvalues.len();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].partial_cmp(&se.eigenvalues[b]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let mut vectors = DMatrix::zeros(k, k);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &se.eigenvectors.column(src));
    }
    HermitianEigen { values, vectors }
}

/// Hermitian eigenvalues only, sorted ascending.
pub fn hermitian_eigenvalues(m: &DMatrix<C64>) -> Vec<f64> {
    let mut v: Vec<f64> = SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}

/// Apply a real function to a Hermitian matrix through its eigenbasis.
pub fn hermitian_fn(eig: &HermitianEigen, f: impl Fn(f64) -> f64) -> DMatrix<C64> {
    let k = eig.values.len();
    let mut scaled = eig.vectors.clone();
    for (j, &lam) in eig.values.iter().enumerate() {
        let w = C64::new(f(lam), 0.0);
        for i in 0..k {
            scaled[(i, j)] *= w;
        }
    }
    &scaled * eig.vectors.adjoint()
}

/// Largest singular value.
pub fn spectral_norm(m: &DMatrix<C64>) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    sv.iter().fold(0.0f64, |acc, &s| acc.max(s))
}

pub fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
}

pub fn hermiticity_residual(m: &DMatrix<C64>) -> f64 {
    max_abs(&(m - m.adjoint()))
}

fn one_norm(m: &DMatrix<C64>) -> f64 {
    let mut worst = 0.0f64;
    for c in 0..m.ncols() {
        let s: f64 = m.column(c).iter().map(|z| z.norm()).sum();
        worst = worst.max(s);
    }
    worst
}

const PADE13_THETA: f64 = 5.371920351148152;
const PADE13_B: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// Matrix exponential by order-13 Pade approximation with scaling and squaring.
pub fn expm(m: &DMatrix<C64>) -> DMatrix<C64> {
    let d = m.nrows();
    assert_eq!(d, m.ncols(), "expm needs a square matrix");
    let norm = one_norm(m);
    let s = if norm > PADE13_THETA {
        (norm / PADE13_THETA).log2().ceil().max(0.0) as u32
    } else {
        0
    };
    let a = m.map(|z| z / 2f64.powi(s as i32));
    let id = DMatrix::<C64>::identity(d, d);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a2 * &a4;
    let b = &PADE13_B;
    let w1 = &a6 * (a6.scale(b[13]) + a4.scale(b[11]) + a2.scale(b[9]));
    let w2 = a6.scale(b[7]) + a4.scale(b[5]) + a2.scale(b[3]) + id.scale(b[1]);
    let u = &a * (w1 + w2);
    let z1 = &a6 * (a6.scale(b[12]) + a4.scale(b[10]) + a2.scale(b[8]));
    let v = z1 + a6.scale(b[6]) + a4.scale(b[4]) + a2.scale(b[2]) + id.scale(b[0]);
    let lhs = &v - &u;
    let rhs = &v + &u;
    let mut r = lhs
        .lu()
        .solve(&rhs)
        .expect("Pade denominator is singular; generator norm too extreme");
    for _ in 0..s {
        r = &r * &r;
    }
    r
}

/// expm(t * m) applied to a vector.
pub fn expm_apply(m: &DMatrix<C64>, t: f64, v: &DVector<C64>) -> DVector<C64> {
    expm(&m.map(|z| z * t)) * v
}
