//! Doubled-space representation: the a-fermion space carrying left and right
//! multiplication as Majorana operators, transport of superoperators, the
//! parent Hamiltonian and its free-mode decoupling.
//!
//! The a-space is the monomial coordinate space itself; the isometry between
//! operators and a-space vectors is plain vectorization.

use crate::algebra::{mask_product, Algebra};
use crate::kernels::dissipator_coefficient;
use crate::linalg::{hermitian_eigen, hermiticity_residual, max_abs, HermitianEigen};
use crate::lindblad::AssembledLindbladian;
use crate::model::CanonicalForm;
use crate::spectral::{sandwich_superop, GibbsState};
use crate::{Error, Result, C64};
use nalgebra::{DMatrix, DVector};

/// The 4^n-dimensional space of a-fermions for n source modes, with its 4n
/// Majorana representatives.
pub struct ASpace {
    pub n_source: usize,
    pub dim: usize,
    hats: Vec<DMatrix<C64>>,
}

impl ASpace {
    pub fn new(n_source: usize) -> Result<Self> {
        if n_source == 0 || n_source > crate::MAX_DIRAC_MODES {
            return Err(Error::CapacityExceeded {
                requested: n_source,
                cap: crate::MAX_DIRAC_MODES,
            });
        }
        let dim = 1usize << (2 * n_source);
        let hats = (1..=4 * n_source).map(|k| hat_gamma(dim, k)).collect();
        Ok(ASpace {
            n_source,
            dim,
            hats,
        })
    }

    /// Hat Majorana for a 1-based index k ≤ 4n.
    pub fn hat(&self, k: usize) -> &DMatrix<C64> {
        &self.hats[k - 1]
    }

    /// Diagonal of the a-space parity operator, (−1)^{|α|}.
    pub fn parity_diagonal(&self) -> DVector<f64> {
        DVector::from_fn(self.dim, |alpha, _| {
            if (alpha as u64).count_ones() % 2 == 0 {
                1.0
            } else {
                -1.0
            }
        })
    }
}

/// Majorana representative of index k on the a-space. Odd k act by left
/// multiplication with a sign, even k carry an extra phase i and an
/// occupation-dependent sign on the same mode.
fn hat_gamma(dim: usize, k: usize) -> DMatrix<C64> {
    let j = (k + 1) / 2;
    let mut out = DMatrix::zeros(dim, dim);
    for alpha in 0..dim as u64 {
        let (s, m) = crate::algebra::left_gamma_product(j, alpha);
        let phase = if k % 2 == 1 {
            C64::new(s as f64, 0.0)
        } else {
            let occ = if alpha & (1u64 << (j - 1)) == 0 { 1.0 } else { -1.0 };
            C64::new(0.0, s as f64 * occ)
        };
        out[(m as usize, alpha as usize)] = phase;
    }
    out
}

/// a-space coordinates of a dense operator.
pub fn phi_map(x: &DMatrix<C64>, alg: &Algebra) -> DVector<C64> {
    alg.vectorize(x)
}

/// Dense operator from a-space coordinates.
pub fn phi_inverse(v: &DVector<C64>, alg: &Algebra) -> DMatrix<C64> {
    alg.devectorize(v)
}

/// a-space image of left multiplication by X.
pub fn phi_left(x: &DMatrix<C64>, alg: &Algebra, aspace: &ASpace) -> DMatrix<C64> {
    let coords = alg.vectorize(x);
    let mut out = DMatrix::zeros(aspace.dim, aspace.dim);
    for mask in 0..aspace.dim as u64 {
        let c = coords[mask as usize];
        if c.norm() <= 1e-16 {
            continue;
        }
        for alpha in 0..aspace.dim as u64 {
            let (s, m) = mask_product(mask, alpha);
            out[(m as usize, alpha as usize)] += c * s as f64;
        }
    }
    out
}

/// a-space image of right multiplication by X.
pub fn phi_right(x: &DMatrix<C64>, alg: &Algebra, aspace: &ASpace) -> DMatrix<C64> {
    let coords = alg.vectorize(x);
    let mut out = DMatrix::zeros(aspace.dim, aspace.dim);
    for mask in 0..aspace.dim as u64 {
        let c = coords[mask as usize];
        if c.norm() <= 1e-16 {
            continue;
        }
        let odd = mask.count_ones() % 2 == 1;
        for alpha in 0..aspace.dim as u64 {
            let (s, m) = mask_product(alpha, mask);
            let mut ph = s as f64;
            if odd && alpha.count_ones() % 2 == 1 {
                ph = -ph;
            }
            out[(m as usize, alpha as usize)] += c * ph;
        }
    }
    out
}

/// Coefficients c[α, α′] of a superoperator matrix over the two-sided monomial
/// action X ↦ γ^α X γ^α′, plus the reconstruction residual.
pub fn superop_decompose(t: &DMatrix<C64>, alg: &Algebra) -> (DMatrix<C64>, f64) {
    let m = alg.basis_len;
    let scale = 1.0 / m as f64;
    let mut c = DMatrix::zeros(m, m);
    for alpha in 0..m as u64 {
        for alphap in 0..m as u64 {
            let mut acc = C64::new(0.0, 0.0);
            for beta in 0..m as u64 {
                let (s1, m1) = mask_product(alpha, beta);
                let (s2, m2) = mask_product(m1, alphap);
                acc += t[(m2 as usize, beta as usize)] * (s1 * s2) as f64;
            }
            c[(alpha as usize, alphap as usize)] = acc * scale;
        }
    }
    // rebuild to measure how faithfully the two-sided basis captured T
    let mut rebuilt: DMatrix<C64> = DMatrix::zeros(m, m);
    for alpha in 0..m as u64 {
        for alphap in 0..m as u64 {
            let cc = c[(alpha as usize, alphap as usize)];
            if cc.norm() <= 1e-15 {
                continue;
            }
            for beta in 0..m as u64 {
                let (s1, m1) = mask_product(alpha, beta);
                let (s2, m2) = mask_product(m1, alphap);
                rebuilt[(m2 as usize, beta as usize)] += cc * (s1 * s2) as f64;
            }
        }
    }
    let residual = max_abs(&(t - rebuilt));
    (c, residual)
}

/// Transport of a superoperator matrix to the a-space through its two-sided
/// monomial decomposition.
pub fn phi_superop(t: &DMatrix<C64>, alg: &Algebra, aspace: &ASpace) -> Result<DMatrix<C64>> {
    let (c, residual) = superop_decompose(t, alg);
    if residual > 1e-9 {
        return Err(Error::DecompositionResidual { residual });
    }
    Ok(assemble_from_coeffs(&c, aspace))
}

/// The three norms demonstrating that commuting one-sided superoperators pick
/// up anticommuting naive images under doubling, while the parity-corrected
/// images commute again.
#[derive(Clone, Copy, Debug)]
pub struct CounterexampleReport {
    pub superop_commutator: f64,
    pub naive_anticommutator: f64,
    pub corrected_commutator: f64,
}

/// Left multiplication by γ_1 and right multiplication by γ_2 on one source
/// mode, against the γ_1 and γ_4 of the ordinary two-mode algebra.
pub fn naive_vectorization_counterexample() -> Result<CounterexampleReport> {
    let alg1 = Algebra::new(1)?;
    let g1 = alg1.gamma_dense(1);
    let g2 = alg1.gamma_dense(2);
    let m = alg1.basis_len;
    let mut c1 = DMatrix::zeros(m, m);
    let mut c2 = DMatrix::zeros(m, m);
    for b in 0..m {
        let x = alg1.monomial(b as u64).to_dense();
        c1.set_column(b, &alg1.vectorize(&(&g1 * &x)));
        c2.set_column(b, &alg1.vectorize(&(&x * &g2)));
    }
    let superop_commutator = crate::linalg::spectral_norm(&(&c1 * &c2 - &c2 * &c1));

    let alg2 = Algebra::new(2)?;
    let n1 = alg2.gamma_dense(1);
    let n4 = alg2.gamma_dense(4);
    let naive_anticommutator = crate::linalg::spectral_norm(&(&n1 * &n4 + &n4 * &n1));
    let corrected = &n4 * alg2.parity_operator();
    let corrected_commutator =
        crate::linalg::spectral_norm(&(&n1 * &corrected - &corrected * &n1));
    Ok(CounterexampleReport {
        superop_commutator,
        naive_anticommutator,
        corrected_commutator,
    })
}

/// Parent Hamiltonian on the a-space, split into the image of the coherent
/// part and the rest.
pub struct ParentHamiltonian {
    pub total: DMatrix<C64>,
    pub coherent_part: DMatrix<C64>,
    pub dissipative_part: DMatrix<C64>,
    pub hermiticity: f64,
    pub decomposition_residual: f64,
}

/// Conjugates the Heisenberg generator by the quarter-power Gibbs sandwich and
/// transports it to the a-space. The result is Hermitian and negative
/// semidefinite with the purified Gibbs vector in its kernel.
pub fn build_parent_hamiltonian(
    assembled: &AssembledLindbladian,
    state: &GibbsState,
    alg: &Algebra,
    aspace: &ASpace,
) -> Result<ParentHamiltonian> {
    let q = state.power(0.25)?;
    let qi = state.power(-0.25)?;
    let mg = sandwich_superop(&q, alg);
    let mgi = sandwich_superop(&qi, alg);

    let s_total = &mg * &assembled.heisenberg * &mgi;
    let mut m_coh = DMatrix::zeros(alg.basis_len, alg.basis_len);
    for b in 0..alg.basis_len {
        let x = alg.monomial(b as u64).to_dense();
        let comm = (&assembled.coherent * &x - &x * &assembled.coherent) * C64::new(0.0, 1.0);
        m_coh.set_column(b, &alg.vectorize(&comm));
    }
    let s_coh = &mg * m_coh * &mgi;

    let (c_total, r1) = superop_decompose(&s_total, alg);
    let (c_coh, r2) = superop_decompose(&s_coh, alg);
    let residual = r1.max(r2);
    if residual > 1e-9 {
        return Err(Error::DecompositionResidual { residual });
    }
    let total = assemble_from_coeffs(&c_total, aspace);
    let coherent_part = assemble_from_coeffs(&c_coh, aspace);
    let dissipative_part = &total - &coherent_part;
    let hermiticity = hermiticity_residual(&total);
    Ok(ParentHamiltonian {
        total,
        coherent_part,
        dissipative_part,
        hermiticity,
        decomposition_residual: residual,
    })
}

fn assemble_from_coeffs(c: &DMatrix<C64>, aspace: &ASpace) -> DMatrix<C64> {
    let dim = aspace.dim;
    let mut out = DMatrix::zeros(dim, dim);
    for alpha in 0..dim as u64 {
        for alphap in 0..dim as u64 {
            let cc = c[(alpha as usize, alphap as usize)];
            if cc.norm() <= 1e-15 {
                continue;
            }
            let odd = alphap.count_ones() % 2 == 1;
            for mu in 0..dim as u64 {
                let (sr, mr) = mask_product(mu, alphap);
                let mut ph = sr as f64;
                if odd && mu.count_ones() % 2 == 1 {
                    ph = -ph;
                }
                let (sl, ml) = mask_product(alpha, mr);
                out[(ml as usize, mu as usize)] += cc * (ph * sl as f64);
            }
        }
    }
    out
}

/// Explicit operator-by-operator route to the same parent Hamiltonian, used to
/// validate the superoperator transport.
pub fn build_parent_explicit(
    assembled: &AssembledLindbladian,
    state: &GibbsState,
    alg: &Algebra,
    aspace: &ASpace,
) -> Result<DMatrix<C64>> {
    let beta = state.beta;
    let q = state.power(0.25)?;
    let qi = state.power(-0.25)?;
    let b_tilde = &q * &assembled.coherent * &qi;
    let mut out = (phi_left(&b_tilde, alg, aspace)
        - phi_right(&b_tilde.adjoint(), alg, aspace))
        * C64::new(0.0, 1.0);

    for ch in &assembled.channels {
        for (ai, &nu) in ch.frequencies.iter().enumerate() {
            for (bi, &nup) in ch.frequencies.iter().enumerate() {
                let damp = (-beta * (nu + nup) / 4.0).exp();
                let g_cross = dissipator_coefficient(-nu, -nup, beta);
                let left = phi_left(&ch.operators[ai], alg, aspace);
                let right = phi_right(&ch.operators[bi].adjoint(), alg, aspace);
                out += left * right * C64::new(damp * g_cross, 0.0);

                let prod = &ch.operators[ai] * &ch.operators[bi];
                if max_abs(&prod) <= 1e-14 {
                    continue;
                }
                let g_mixed = dissipator_coefficient(-nu, nup, beta);
                out -= phi_left(&prod, alg, aspace) * C64::new(0.5 * damp * g_mixed, 0.0);
                out -= phi_right(&prod, alg, aspace)
                    * C64::new(0.5 * (beta * (nu + nup) / 4.0).exp() * g_mixed, 0.0);
            }
        }
    }
    Ok(out)
}

/// Purified Gibbs vector 2^{n/2} φ(σ^{1/2}), the parent kernel candidate.
pub fn analytic_ground_vector(state: &GibbsState, alg: &Algebra) -> Result<DVector<C64>> {
    let half = state.power(0.5)?;
    Ok(alg.vectorize(&half) * C64::new((alg.dim as f64).sqrt(), 0.0))
}

/// Top of the parent spectrum with the kernel vector, phase-fixed so the
/// identity coordinate is real positive.
pub struct GroundReport {
    pub vector: DVector<C64>,
    pub top_eigenvalue: f64,
    pub second_eigenvalue: f64,
    pub degenerate: bool,
    pub eigen: HermitianEigen,
}

pub fn ground_vector(parent_total: &DMatrix<C64>) -> GroundReport {
    let sym = (parent_total + parent_total.adjoint()) * C64::new(0.5, 0.0);
    let eig = hermitian_eigen(&sym);
    let d = eig.values.len();
    let mut vector = eig.vectors.column(d - 1).into_owned();
    let v0 = vector[0];
    if v0.norm() > 1e-12 {
        let phase = v0 / v0.norm();
        vector *= phase.conj();
    }
    let range = (eig.values[d - 1] - eig.values[0]).max(1.0);
    let degenerate = (eig.values[d - 1] - eig.values[d - 2]).abs() < 1e-9 * range;
    GroundReport {
        vector,
        top_eigenvalue: eig.values[d - 1],
        second_eigenvalue: eig.values[d - 2],
        degenerate,
        eigen: eig,
    }
}

/// Thermal expectation through the doubled space: Tr[σ X] = ⟨v, Φ(L_X) v⟩.
pub fn expectation_via_parent(
    x: &DMatrix<C64>,
    v: &DVector<C64>,
    alg: &Algebra,
    aspace: &ASpace,
) -> C64 {
    let lx = phi_left(x, alg, aspace);
    let w = lx * v;
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..v.len() {
        acc += v[i].conj() * w[i];
    }
    acc
}

/// The four-way split of the parent into free and interacting portions of the
/// coherent and dissipative images.
pub struct ParentSplit {
    pub c_free: DMatrix<C64>,
    pub c_int: DMatrix<C64>,
    pub d_free: DMatrix<C64>,
    pub d_int: DMatrix<C64>,
}

impl ParentSplit {
    /// ‖V‖ of the interacting portion, the spectral norm of c_int + d_int.
    pub fn interaction_norm(&self) -> f64 {
        crate::linalg::spectral_norm(&(&self.c_int + &self.d_int))
    }
}

/// Splits a parent built from the full model against the parent of its free
/// part: interacting portions are the differences per image.
pub fn split_free_interacting(full: &ParentHamiltonian, free: &ParentHamiltonian) -> ParentSplit {
    ParentSplit {
        c_free: free.coherent_part.clone(),
        c_int: &full.coherent_part - &free.coherent_part,
        d_free: free.dissipative_part.clone(),
        d_int: &full.dissipative_part - &free.dissipative_part,
    }
}

/// Residual of total = c_free + c_int + d_free + d_int against the full parent.
pub fn split_consistency(full: &ParentHamiltonian, split: &ParentSplit) -> f64 {
    let sum = &split.c_free + &split.c_int + &split.d_free + &split.d_int;
    max_abs(&(&full.total - sum))
}

/// Closed form of the single-mode parent Hamiltonian on the four-dimensional
/// a-space, calibrated by the constant `c`.
pub fn single_mode_closed_form(eps: f64, beta: f64, c: f64, aspace: &ASpace) -> DMatrix<C64> {
    let d1 = (aspace.hat(1) + aspace.hat(3) * C64::new(0.0, 1.0)) * C64::new(0.5, 0.0);
    let d2 = (aspace.hat(2) + aspace.hat(4) * C64::new(0.0, 1.0)) * C64::new(0.5, 0.0);
    closed_form_from_pair(&d1, &d2, eps, beta, c)
}

fn closed_form_from_pair(
    d1: &DMatrix<C64>,
    d2: &DMatrix<C64>,
    eps: f64,
    beta: f64,
    c: f64,
) -> DMatrix<C64> {
    let dim = d1.nrows();
    let id = DMatrix::identity(dim, dim);
    let sh = (2.0 * beta * eps).sinh();
    let chh = (2.0 * beta * eps).cosh();
    let core = d1.adjoint() * d2 * C64::new(0.0, -1.0)
        + d2.adjoint() * d1 * C64::new(0.0, 1.0)
        + d1.adjoint() * d1 * C64::new(-sh, 0.0)
        + d2.adjoint() * d2 * C64::new(sh, 0.0)
        + id * C64::new(-chh, 0.0);
    core * C64::new(c * (-4.0 * beta * beta * eps * eps).exp(), 0.0)
}

/// Decoupled free parent: rotates the hat Majoranas by the canonical form of
/// the free Hamiltonian and sums single-mode closed forms. Also returns the
/// predicted gap, the smallest single-mode gap over the modes.
pub fn decouple_free_parent(
    canon: &CanonicalForm,
    beta: f64,
    c: f64,
    aspace: &ASpace,
) -> (DMatrix<C64>, f64) {
    let n = canon.eps.len();
    let two_n = 2 * n;
    let dim = aspace.dim;
    // zeta-hats: odd family from odd source hats, even family from even ones
    let mut zeta_odd: Vec<DMatrix<C64>> = Vec::with_capacity(two_n);
    let mut zeta_even: Vec<DMatrix<C64>> = Vec::with_capacity(two_n);
    for k in 0..two_n {
        let mut zo = DMatrix::zeros(dim, dim);
        let mut ze = DMatrix::zeros(dim, dim);
        for j in 0..two_n {
            let w = C64::new(canon.q[(j, k)], 0.0);
            zo += aspace.hat(2 * j + 1) * w;
            ze += aspace.hat(2 * j + 2) * w;
        }
        zeta_odd.push(zo);
        zeta_even.push(ze);
    }
    let mut total = DMatrix::zeros(dim, dim);
    let mut min_gap = f64::INFINITY;
    for m in 0..n {
        let d1 = (&zeta_odd[2 * m] + &zeta_odd[2 * m + 1] * C64::new(0.0, 1.0))
            * C64::new(0.5, 0.0);
        let d2 = (&zeta_even[2 * m] + &zeta_even[2 * m + 1] * C64::new(0.0, 1.0))
            * C64::new(0.5, 0.0);
        let eps_mode = canon.eps[m] / 2.0;
        total += closed_form_from_pair(&d1, &d2, eps_mode, beta, c);
        let gap = c * (-4.0 * beta * beta * eps_mode * eps_mode).exp()
            * (2.0 * beta * eps_mode).cosh();
        min_gap = min_gap.min(gap);
    }
    (total, min_gap)
}

/// Single-mode parent gap predicted by the closed form.
pub fn single_mode_gap(eps: f64, beta: f64, c: f64) -> f64 {
    c * (-4.0 * beta * beta * eps * eps).exp() * (2.0 * beta * eps).cosh()
}
