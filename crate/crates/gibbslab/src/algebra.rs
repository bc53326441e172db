//! Majorana operator algebra: dense chain representation, the orthonormal
//! monomial basis indexed by bitmasks, parity structure and operator norms.
//!
//! Monomial masks: bit j-1 set means gamma_j participates; the basis index of
//! a monomial equals its mask. Every monomial matrix in this representation is
//! a signed permutation with phases, which [`PhasePerm`] exploits.

use crate::{C64, Error, Result, MAX_DIRAC_MODES, PRUNE_TOL};
use nalgebra::{DMatrix, DVector};
use std::collections::BTreeMap;

/// gamma^a gamma^b = sign * gamma^(a XOR b); bits of `b` processed ascending.
pub fn mask_product(a: u64, b: u64) -> (i32, u64) {
    let mut sign = 1i32;
    let mut acc = a;
    let mut bb = b;
    while bb != 0 {
        let low = bb & bb.wrapping_neg();
        let j = 64 - low.leading_zeros() as u64; // 1-based position of the low bit
        if ((acc >> j).count_ones() & 1) == 1 {
            sign = -sign;
        }
        acc ^= low;
        bb ^= low;
    }
    (sign, acc)
}

/// gamma_j * gamma^a for a 1-based index j.
pub fn left_gamma_product(j: usize, a: u64) -> (i32, u64) {
    let below = (1u64 << (j - 1)) - 1;
    let sign = if ((a & below).count_ones() & 1) == 1 { -1 } else { 1 };
    (sign, a ^ (1u64 << (j - 1)))
}

/// gamma^a * gamma_j for a 1-based index j.
pub fn right_gamma_product(a: u64, j: usize) -> (i32, u64) {
    let sign = if ((a >> j).count_ones() & 1) == 1 { -1 } else { 1 };
    (sign, a ^ (1u64 << (j - 1)))
}

/// Geometry of the mode set: which lattice site carries each Majorana index.
#[derive(Clone, Debug)]
pub struct ModeLayout {
    pub n_sites: usize,
    pub lattice_dim: usize,
    /// Integer coordinates per site, `lattice_dim` entries each.
    pub site_coords: Vec<Vec<i64>>,
    /// Site of Majorana j (1-based j at position j-1); length 2n.
    pub majorana_site: Vec<usize>,
    /// Interaction radius in lattice distance units.
    pub r0: f64,
}

impl ModeLayout {
    /// One Dirac mode per site on a 1-D open chain.
    pub fn chain(n_modes: usize) -> Self {
        let site_coords = (0..n_modes).map(|i| vec![i as i64]).collect();
        let majorana_site = (0..2 * n_modes).map(|k| k / 2).collect();
        ModeLayout {
            n_sites: n_modes,
            lattice_dim: 1,
            site_coords,
            majorana_site,
            r0: 1.0,
        }
    }

    /// Two co-located Dirac modes (spin up/down) per site on a 1-D open chain.
    pub fn chain_spinful(n_sites: usize) -> Self {
        let site_coords = (0..n_sites).map(|i| vec![i as i64]).collect();
        // mode m = 2*site + spin, two Majoranas per mode
        let majorana_site = (0..4 * n_sites).map(|k| (k / 2) / 2).collect();
        ModeLayout {
            n_sites,
            lattice_dim: 1,
            site_coords,
            majorana_site,
            r0: 1.0,
        }
    }

    pub fn n_modes(&self) -> usize {
        self.majorana_site.len() / 2
    }

    /// Euclidean distance between two sites.
    pub fn distance(&self, site_a: usize, site_b: usize) -> f64 {
        let a = &self.site_coords[site_a];
        let b = &self.site_coords[site_b];
        a.iter()
            .zip(b)
            .map(|(x, y)| ((x - y) as f64).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// Site of a 1-based Majorana index.
    pub fn site_of(&self, j: usize) -> usize {
        self.majorana_site[j - 1]
    }
}

/// Ordered product of distinct Majorana operators, stored as a bitmask.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct MajoranaMonomial {
    pub mask: u64,
}

impl MajoranaMonomial {
    pub const IDENTITY: MajoranaMonomial = MajoranaMonomial { mask: 0 };

    /// Build from strictly increasing 1-based indices.
    pub fn from_indices(indices: &[usize]) -> Result<Self> {
        let mut mask = 0u64;
        let mut prev = 0usize;
        for &j in indices {
            if j == 0 || j <= prev {
                return Err(Error::NonCanonicalIndices(indices.to_vec()));
            }
            mask |= 1u64 << (j - 1);
            prev = j;
        }
        Ok(MajoranaMonomial { mask })
    }

    pub fn indices(&self) -> Vec<usize> {
        (0..64)
            .filter(|b| self.mask & (1u64 << b) != 0)
            .map(|b| b + 1)
            .collect()
    }

    pub fn degree(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn parity(&self) -> usize {
        self.degree() % 2
    }
}

/// Sparse operator as a sum of canonical monomials with complex coefficients.
#[derive(Clone, Debug)]
pub struct MajoranaPolynomial {
    terms: BTreeMap<u64, C64>,
    pub n_modes: usize,
}

impl MajoranaPolynomial {
    pub fn new(n_modes: usize) -> Self {
        MajoranaPolynomial {
            terms: BTreeMap::new(),
            n_modes,
        }
    }

    pub fn identity(n_modes: usize) -> Self {
        let mut p = Self::new(n_modes);
        p.terms.insert(0, C64::new(1.0, 0.0));
        p
    }

    /// Add `coeff * gamma_{j1} ... gamma_{jk}` for an arbitrary index sequence;
    /// repeated and out-of-order indices are canonicalized with sign tracking.
    pub fn add_product(&mut self, indices: &[usize], coeff: C64) -> Result<()> {
        let mut mask = 0u64;
        let mut sign = 1i32;
        for &j in indices {
            if j == 0 || j > 2 * self.n_modes {
                return Err(Error::IndexOutOfRange {
                    index: j,
                    n_modes: self.n_modes,
                });
            }
            let (s, m) = right_gamma_product(mask, j);
            sign *= s;
            mask = m;
        }
        self.accumulate(mask, coeff * sign as f64);
        Ok(())
    }

    /// Add a coefficient on an already-canonical monomial.
    pub fn add_monomial(&mut self, mono: MajoranaMonomial, coeff: C64) {
        self.accumulate(mono.mask, coeff);
    }

    fn accumulate(&mut self, mask: u64, coeff: C64) {
        let entry = self.terms.entry(mask).or_insert(C64::new(0.0, 0.0));
        *entry += coeff;
        if entry.norm() < PRUNE_TOL {
            self.terms.remove(&mask);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (MajoranaMonomial, C64)> + '_ {
        self.terms
            .iter()
            .map(|(&mask, &c)| (MajoranaMonomial { mask }, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Common degree parity of all monomials, or an error on a mixed sum.
    pub fn parity(&self) -> Result<Option<usize>> {
        let mut seen = None;
        for (&mask, _) in &self.terms {
            let p = (mask.count_ones() % 2) as usize;
            match seen {
                None => seen = Some(p),
                Some(q) if q != p => return Err(Error::MixedParity),
                _ => {}
            }
        }
        Ok(seen)
    }

    pub fn scale(&mut self, factor: C64) {
        for c in self.terms.values_mut() {
            *c *= factor;
        }
    }
}

/// Matrix on the 2^m-dimensional Hilbert space of m Dirac modes.
#[derive(Clone, Debug)]
pub struct DenseOperator {
    pub matrix: DMatrix<C64>,
    pub n_modes: usize,
}

impl DenseOperator {
    pub fn new(matrix: DMatrix<C64>, n_modes: usize) -> Result<Self> {
        let d = 1usize << n_modes;
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::AssemblyInvariant(format!(
                "dense operator must be {d}x{d} for {n_modes} modes, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(DenseOperator { matrix, n_modes })
    }
}

/// Signed-permutation-with-phase matrix: column c holds the single entry
/// `phase[c]` at row `row[c]`. Closed under products and adjoints.
#[derive(Clone, Debug)]
pub struct PhasePerm {
    pub dim: usize,
    pub row: Vec<usize>,
    pub phase: Vec<C64>,
}

impl PhasePerm {
    pub fn identity(dim: usize) -> Self {
        PhasePerm {
            dim,
            row: (0..dim).collect(),
            phase: vec![C64::new(1.0, 0.0); dim],
        }
    }

    /// Matrix product self * rhs.
    pub fn matmul(&self, rhs: &PhasePerm) -> PhasePerm {
        let mut row = vec![0usize; self.dim];
        let mut phase = vec![C64::new(0.0, 0.0); self.dim];
        for c in 0..self.dim {
            let mid = rhs.row[c];
            row[c] = self.row[mid];
            phase[c] = self.phase[mid] * rhs.phase[c];
        }
        PhasePerm {
            dim: self.dim,
            row,
            phase,
        }
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for c in 0..self.dim {
            m[(self.row[c], c)] = self.phase[c];
        }
        m
    }

    /// (1/dim) Tr[self^dagger X].
    pub fn scaled_inner(&self, x: &DMatrix<C64>) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for c in 0..self.dim {
            acc += self.phase[c].conj() * x[(self.row[c], c)];
        }
        acc / self.dim as f64
    }

    /// Dense product X * self, using the single-entry column structure.
    pub fn right_mul_dense(&self, x: &DMatrix<C64>) -> DMatrix<C64> {
        let mut out = DMatrix::zeros(self.dim, self.dim);
        for c in 0..self.dim {
            let src = self.row[c];
            let ph = self.phase[c];
            for r in 0..self.dim {
                out[(r, c)] = x[(r, src)] * ph;
            }
        }
        out
    }

    /// Dense product self * X.
    pub fn left_mul_dense(&self, x: &DMatrix<C64>) -> DMatrix<C64> {
        let mut out = DMatrix::zeros(self.dim, self.dim);
        for c in 0..self.dim {
            let ph = self.phase[c];
            let dst = self.row[c];
            for k in 0..self.dim {
                out[(dst, k)] += ph * x[(c, k)];
            }
        }
        out
    }
}

/// Dense representation context: the 2n chain-ordered Majorana matrices and
/// all 4^n monomial matrices for one mode count, in phase-permutation form.
pub struct Algebra {
    pub n_modes: usize,
    /// Hilbert space dimension 2^n.
    pub dim: usize,
    /// Monomial basis size 4^n.
    pub basis_len: usize,
    gammas: Vec<PhasePerm>,
    monomials: Vec<PhasePerm>,
}

impl Algebra {
    pub fn new(n_modes: usize) -> Result<Self> {
        if n_modes == 0 || n_modes > MAX_DIRAC_MODES {
            return Err(Error::CapacityExceeded {
                requested: n_modes,
                cap: MAX_DIRAC_MODES,
            });
        }
        let dim = 1usize << n_modes;
        let basis_len = 1usize << (2 * n_modes);
        let gammas: Vec<PhasePerm> = (1..=2 * n_modes)
            .map(|k| gamma_phase_perm(n_modes, k))
            .collect();
        // mono[mask] = gamma_lowest * mono[rest], matching increasing-order products
        let mut monomials = Vec::with_capacity(basis_len);
        monomials.push(PhasePerm::identity(dim));
        for mask in 1..basis_len as u64 {
            let j = mask.trailing_zeros() as usize + 1;
            let rest = (mask & (mask - 1)) as usize;
            monomials.push(gammas[j - 1].matmul(&monomials[rest]));
        }
        Ok(Algebra {
            n_modes,
            dim,
            basis_len,
            gammas,
            monomials,
        })
    }

    /// gamma_j for a 1-based index.
    pub fn gamma(&self, j: usize) -> &PhasePerm {
        &self.gammas[j - 1]
    }

    pub fn gamma_dense(&self, j: usize) -> DMatrix<C64> {
        self.gammas[j - 1].to_dense()
    }

    pub fn gammas_dense(&self) -> Vec<DMatrix<C64>> {
        self.gammas.iter().map(|g| g.to_dense()).collect()
    }

    pub fn monomial(&self, mask: u64) -> &PhasePerm {
        &self.monomials[mask as usize]
    }

    pub fn monomial_dense(&self, mask: u64) -> DMatrix<C64> {
        self.monomials[mask as usize].to_dense()
    }

    /// Coefficients of X over the monomial basis; an isometry from the scaled
    /// Hilbert-Schmidt inner product (1/2^n)Tr[X^dag Y] to the Euclidean one.
    pub fn vectorize(&self, x: &DMatrix<C64>) -> DVector<C64> {
        DVector::from_iterator(
            self.basis_len,
            self.monomials.iter().map(|m| m.scaled_inner(x)),
        )
    }

    pub fn devectorize(&self, v: &DVector<C64>) -> DMatrix<C64> {
        let mut out = DMatrix::zeros(self.dim, self.dim);
        for (mask, mono) in self.monomials.iter().enumerate() {
            let c = v[mask];
            if c.norm() == 0.0 {
                continue;
            }
            for col in 0..self.dim {
                out[(mono.row[col], col)] += c * mono.phase[col];
            }
        }
        out
    }

    /// Parity operator i^n gamma_1 ... gamma_2n (diagonal in this representation).
    pub fn parity_operator(&self) -> DMatrix<C64> {
        let full = self.basis_len as u64 - 1;
        let phase = C64::new(0.0, 1.0).powu(self.n_modes as u32);
        self.monomial_dense(full) * phase
    }
}

fn gamma_phase_perm(n: usize, k: usize) -> PhasePerm {
    let d = 1usize << n;
    let j = (k + 1) / 2; // Dirac mode, 1-based
    let bit = 1usize << (n - j);
    // sign string over modes 1..j-1, which sit at the high bit positions
    let zmask = ((1usize << (j - 1)) - 1) << (n - j + 1);
    let mut row = vec![0usize; d];
    let mut phase = vec![C64::new(0.0, 0.0); d];
    for c in 0..d {
        row[c] = c ^ bit;
        let zsign = if ((c & zmask).count_ones() & 1) == 1 {
            -1.0
        } else {
            1.0
        };
        phase[c] = if k % 2 == 1 {
            C64::new(zsign, 0.0)
        } else if c & bit == 0 {
            C64::new(0.0, zsign)
        } else {
            C64::new(0.0, -zsign)
        };
    }
    PhasePerm { dim: d, row, phase }
}

/// All 2n Majorana matrices as dense operators.
pub fn build_majorana_matrices(layout: &ModeLayout) -> Result<Vec<DenseOperator>> {
    let n = layout.n_modes();
    let alg = Algebra::new(n)?;
    (1..=2 * n)
        .map(|j| DenseOperator::new(alg.gamma_dense(j), n))
        .collect()
}

/// Assemble a polynomial into its dense matrix.
pub fn polynomial_to_matrix(p: &MajoranaPolynomial, alg: &Algebra) -> Result<DenseOperator> {
    if p.n_modes != alg.n_modes {
        return Err(Error::AssemblyInvariant(format!(
            "polynomial on {} modes assembled in a {}-mode algebra",
            p.n_modes, alg.n_modes
        )));
    }
    let mut out = DMatrix::zeros(alg.dim, alg.dim);
    for (mono, c) in p.terms() {
        if mono.mask >= alg.basis_len as u64 {
            return Err(Error::IndexOutOfRange {
                index: 64 - mono.mask.leading_zeros() as usize,
                n_modes: alg.n_modes,
            });
        }
        let pp = alg.monomial(mono.mask);
        for col in 0..alg.dim {
            out[(pp.row[col], col)] += c * pp.phase[col];
        }
    }
    DenseOperator::new(out, alg.n_modes)
}

/// Monomial coefficients of a dense operator.
pub fn monomial_vectorize(x: &DenseOperator, alg: &Algebra) -> DVector<C64> {
    alg.vectorize(&x.matrix)
}

/// Largest singular value.
pub fn operator_norm(x: &DMatrix<C64>) -> f64 {
    crate::linalg::spectral_norm(x)
}

/// Closed-form operator norm of sum_j x_j gamma_j + i sum_j y_j gamma_j:
/// norm^2 = |x|^2 + |y|^2 + 2 sqrt(|x|^2 |y|^2 - (x.y)^2).
pub fn linear_combination_norm(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            x_len: x.len(),
            y_len: y.len(),
        });
    }
    let x2: f64 = x.iter().map(|v| v * v).sum();
    let y2: f64 = y.iter().map(|v| v * v).sum();
    let xy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let cross = (x2 * y2 - xy * xy).max(0.0);
    Ok((x2 + y2 + 2.0 * cross.sqrt()).sqrt())
}

/// Split into even-degree and odd-degree monomial parts.
pub fn parity_split(x: &DMatrix<C64>, alg: &Algebra) -> (DMatrix<C64>, DMatrix<C64>) {
    let v = alg.vectorize(x);
    let mut even = v.clone();
    let mut odd = v;
    for mask in 0..alg.basis_len {
        if (mask as u64).count_ones() % 2 == 0 {
            odd[mask] = C64::new(0.0, 0.0);
        } else {
            even[mask] = C64::new(0.0, 0.0);
        }
    }
    (alg.devectorize(&even), alg.devectorize(&odd))
}

/// Monomial-basis indices of even-degree masks.
pub fn even_indices(basis_len: usize) -> Vec<usize> {
    (0..basis_len)
        .filter(|m| (*m as u64).count_ones() % 2 == 0)
        .collect()
}

/// Monomial-basis indices of odd-degree masks.
pub fn odd_indices(basis_len: usize) -> Vec<usize> {
    (0..basis_len)
        .filter(|m| (*m as u64).count_ones() % 2 == 1)
        .collect()
}
