//! Model Hamiltonians: quadratic coefficient matrices, their canonical normal
//! form, free Heisenberg evolution, Hubbard-type interacting models and
//! locality auditing.
//!
//! A quadratic Hamiltonian is H = sum_{jk} h_{jk} gamma_j gamma_k with h
//! imaginary and antisymmetric. Dirac mode m (0-based) owns Majoranas 2m+1 and
//! 2m+2 (1-based).

use crate::algebra::{Algebra, MajoranaPolynomial, ModeLayout};
use crate::linalg::max_abs;
use crate::{Error, Result, C64};
use nalgebra::{DMatrix, DVector};

fn check_quadratic_matrix(h: &DMatrix<C64>) -> Result<()> {
    let worst_re = h.iter().map(|z| z.re.abs()).fold(0.0f64, f64::max);
    if worst_re > 1e-12 {
        return Err(Error::NonImaginary { worst: worst_re });
    }
    let sym = h.transpose() + h;
    let res = max_abs(&sym);
    if res > 1e-12 {
        return Err(Error::NonHermitian { residual: res });
    }
    Ok(())
}

/// Polynomial form of a quadratic coefficient matrix.
pub fn build_quadratic(h: &DMatrix<C64>) -> Result<MajoranaPolynomial> {
    check_quadratic_matrix(h)?;
    let two_n = h.nrows();
    let mut p = MajoranaPolynomial::new(two_n / 2);
    for j in 0..two_n {
        for k in j + 1..two_n {
            let c = h[(j, k)] - h[(k, j)];
            if c.norm() > 0.0 {
                p.add_product(&[j + 1, k + 1], c)?;
            }
        }
    }
    Ok(p)
}

/// Normal form of a quadratic Hamiltonian: an orthogonal rotation of the
/// Majorana indices after which the coefficient matrix is block diagonal with
/// nonnegative upper entries, ordered by decreasing mode energy.
#[derive(Clone, Debug)]
pub struct CanonicalForm {
    /// Mode energies, descending and nonnegative; ε = 2λ for block weight λ.
    pub eps: Vec<f64>,
    /// Orthogonal rotation: ζ_k = Σ_j q[j,k] γ_j.
    pub q: DMatrix<f64>,
    /// q^T a q with a the real antisymmetric part; ideally block diagonal
    /// with b[2m, 2m+1] = eps[m] / 2.
    pub b: DMatrix<f64>,
    /// Deviation of `b` from its ideal block-diagonal form.
    pub residual: f64,
}

/// Brings an imaginary antisymmetric coefficient matrix to canonical form via
/// a real Schur decomposition of its imaginary part.
pub fn canonical_form(h: &DMatrix<C64>) -> Result<CanonicalForm> {
    check_quadratic_matrix(h)?;
    let two_n = h.nrows();
    let a = DMatrix::from_fn(two_n, two_n, |i, j| h[(i, j)].im);
    let schur = nalgebra::linalg::Schur::new(a.clone());
    let (qs, t) = schur.unpack();

    // antisymmetry of q^T a q forces t block diagonal with 2x2 blocks
    let mut blocks: Vec<(f64, usize, bool)> = Vec::new();
    let mut zero_cols: Vec<usize> = Vec::new();
    let mut k = 0usize;
    while k < two_n {
        if k + 1 < two_n && t[(k, k + 1)].abs() > 1e-12 {
            let w = t[(k, k + 1)];
            blocks.push((w.abs(), k, w < 0.0));
            k += 2;
        } else {
            zero_cols.push(k);
            k += 1;
        }
    }
    blocks.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap());

    let mut q = DMatrix::zeros(two_n, two_n);
    let mut eps = Vec::with_capacity(two_n / 2);
    let mut col = 0usize;
    for &(lam, at, swap) in &blocks {
        let (c1, c2) = if swap { (at + 1, at) } else { (at, at + 1) };
        q.set_column(col, &qs.column(c1).into_owned());
        q.set_column(col + 1, &qs.column(c2).into_owned());
        eps.push(2.0 * lam);
        col += 2;
    }
    for &z in &zero_cols {
        q.set_column(col, &qs.column(z).into_owned());
        col += 1;
    }
    for _ in 0..zero_cols.len() / 2 {
        eps.push(0.0);
    }

    let b = q.transpose() * &a * &q;
    let mut residual = 0.0f64;
    for i in 0..two_n {
        for j in 0..two_n {
            let ideal = if i / 2 == j / 2 && i % 2 == 0 && j == i + 1 {
                eps[i / 2] / 2.0
            } else if i / 2 == j / 2 && i % 2 == 1 && j + 1 == i {
                -eps[j / 2] / 2.0
            } else {
                0.0
            };
            residual = residual.max((b[(i, j)] - ideal).abs());
        }
    }
    Ok(CanonicalForm {
        eps,
        q,
        b,
        residual,
    })
}

/// Heisenberg evolution of the Majorana coefficient vectors under a quadratic
/// Hamiltonian: γ_l(t) = Σ_j R_{jl}(t) γ_j with R = exp(4iht), which is real
/// orthogonal.
pub fn free_heisenberg(h: &DMatrix<C64>, t: f64) -> Result<DMatrix<f64>> {
    check_quadratic_matrix(h)?;
    let scaled = h.map(|z| z * C64::new(0.0, 4.0 * t));
    let r = crate::linalg::expm(&scaled);
    let worst_im = r.iter().map(|z| z.im.abs()).fold(0.0f64, f64::max);
    if worst_im > 1e-12 {
        return Err(Error::AssemblyInvariant(format!(
            "free evolution rotation has imaginary residue {worst_im:.3e}"
        )));
    }
    Ok(r.map(|z| z.re))
}

/// A model Hamiltonian split into its quadratic part, a scalar offset and the
/// remaining interaction polynomial.
#[derive(Clone, Debug)]
pub struct FermionModel {
    pub name: String,
    pub layout: ModeLayout,
    /// Full Hamiltonian including the offset as an identity term.
    pub hamiltonian: MajoranaPolynomial,
    /// Imaginary antisymmetric coefficient matrix of the quadratic part.
    pub free_h: DMatrix<C64>,
    /// Scalar carried by the free part.
    pub free_offset: f64,
    /// Interaction strength knob, zero for free models.
    pub coupling: f64,
}

impl FermionModel {
    pub fn n_modes(&self) -> usize {
        self.layout.n_modes()
    }

    /// Free portion as a polynomial, offset included.
    pub fn free_polynomial(&self) -> Result<MajoranaPolynomial> {
        let mut p = build_quadratic(&self.free_h)?;
        if self.free_offset != 0.0 {
            p.add_product(&[], C64::new(self.free_offset, 0.0))?;
        }
        Ok(p)
    }

    /// Dense matrix of the full Hamiltonian.
    pub fn dense(&self, alg: &Algebra) -> Result<DMatrix<C64>> {
        Ok(crate::algebra::polynomial_to_matrix(&self.hamiltonian, alg)?.matrix)
    }

    /// Dense matrix of the free portion.
    pub fn dense_free(&self, alg: &Algebra) -> Result<DMatrix<C64>> {
        Ok(crate::algebra::polynomial_to_matrix(&self.free_polynomial()?, alg)?.matrix)
    }

    pub fn is_free(&self) -> bool {
        self.coupling == 0.0
    }
}

fn empty_h(n_modes: usize) -> DMatrix<C64> {
    DMatrix::zeros(2 * n_modes, 2 * n_modes)
}

fn add_hopping(h: &mut DMatrix<C64>, t: f64, mode_a: usize, mode_b: usize) {
    // -t (c_a^dag c_b + h.c.) for 0-based modes a < b
    let (p, q) = (2 * mode_a, 2 * mode_a + 1);
    let (r, s) = (2 * mode_b, 2 * mode_b + 1);
    h[(p, s)] += C64::new(0.0, -t / 4.0);
    h[(s, p)] += C64::new(0.0, t / 4.0);
    h[(q, r)] += C64::new(0.0, t / 4.0);
    h[(r, q)] += C64::new(0.0, -t / 4.0);
}

fn add_chemical(h: &mut DMatrix<C64>, mu: f64, mode: usize) -> f64 {
    // -mu n_mode; returns the scalar offset it contributes
    let (p, q) = (2 * mode, 2 * mode + 1);
    h[(p, q)] += C64::new(0.0, -mu / 4.0);
    h[(q, p)] += C64::new(0.0, mu / 4.0);
    -mu / 2.0
}

fn model_from_parts(
    name: &str,
    layout: ModeLayout,
    free_h: DMatrix<C64>,
    free_offset: f64,
    interaction: &[(Vec<usize>, C64)],
    coupling: f64,
) -> Result<FermionModel> {
    let n = layout.n_modes();
    let mut hamiltonian = build_quadratic(&free_h)?;
    if free_offset != 0.0 {
        hamiltonian.add_product(&[], C64::new(free_offset, 0.0))?;
    }
    debug_assert_eq!(hamiltonian.n_modes, n);
    for (idx, c) in interaction {
        hamiltonian.add_product(idx, *c)?;
    }
    Ok(FermionModel {
        name: name.to_string(),
        layout,
        hamiltonian,
        free_h,
        free_offset,
        coupling,
    })
}

/// One fermionic mode with energy splitting ε: H = 2iε γ_1 γ_2.
pub fn single_mode(eps: f64) -> Result<FermionModel> {
    let mut h = empty_h(1);
    h[(0, 1)] = C64::new(0.0, eps);
    h[(1, 0)] = C64::new(0.0, -eps);
    model_from_parts(
        &format!("single-mode(eps={eps})"),
        ModeLayout::chain(1),
        h,
        0.0,
        &[],
        0.0,
    )
}

/// Two spinless modes with hopping amplitude t.
pub fn two_mode_chain(t: f64) -> Result<FermionModel> {
    let mut h = empty_h(2);
    add_hopping(&mut h, t, 0, 1);
    model_from_parts(
        &format!("two-mode-chain(t={t})"),
        ModeLayout::chain(2),
        h,
        0.0,
        &[],
        0.0,
    )
}

/// Single-site Hubbard atom: U(n_up - 1/2)(n_dn - 1/2) - mu(n_up + n_dn).
pub fn hubbard_single_site(u: f64, mu: f64) -> Result<FermionModel> {
    let mut h = empty_h(2);
    let mut offset = 0.0;
    offset += add_chemical(&mut h, mu, 0);
    offset += add_chemical(&mut h, mu, 1);
    // (n_up - 1/2)(n_dn - 1/2) = -(1/4) gamma_1 gamma_2 gamma_3 gamma_4
    let quartic = vec![(vec![1, 2, 3, 4], C64::new(-u / 4.0, 0.0))];
    model_from_parts(
        &format!("hubbard-1site(U={u},mu={mu})"),
        ModeLayout::chain_spinful(1),
        h,
        offset,
        &quartic,
        u,
    )
}

/// Two-site Hubbard chain with unit hopping. Mode index is 2*site + spin.
pub fn hubbard_two_site(u: f64, mu: f64, t: f64) -> Result<FermionModel> {
    let mut h = empty_h(4);
    let mut offset = 0.0;
    for mode in 0..4 {
        offset += add_chemical(&mut h, mu, mode);
    }
    for spin in 0..2 {
        add_hopping(&mut h, t, spin, 2 + spin);
    }
    let mut quartic = Vec::new();
    for site in 0..2 {
        let (up, dn) = (2 * site, 2 * site + 1);
        let idx = vec![2 * up + 1, 2 * up + 2, 2 * dn + 1, 2 * dn + 2];
        quartic.push((idx, C64::new(-u / 4.0, 0.0)));
    }
    model_from_parts(
        &format!("hubbard-2site(U={u},mu={mu},t={t})"),
        ModeLayout::chain_spinful(2),
        h,
        offset,
        &quartic,
        u,
    )
}

/// Spinful Hubbard chain with unit hopping, open boundary.
pub fn build_fermi_hubbard(n_sites: usize, u: f64, mu: f64) -> Result<FermionModel> {
    match n_sites {
        1 => hubbard_single_site(u, mu),
        2 => hubbard_two_site(u, mu, 1.0),
        _ => {
            let n_modes = 2 * n_sites;
            if n_modes > crate::MAX_DIRAC_MODES {
                return Err(Error::CapacityExceeded {
                    requested: n_modes,
                    cap: crate::MAX_DIRAC_MODES,
                });
            }
            let mut h = empty_h(n_modes);
            let mut offset = 0.0;
            for mode in 0..n_modes {
                offset += add_chemical(&mut h, mu, mode);
            }
            for site in 0..n_sites - 1 {
                for spin in 0..2 {
                    add_hopping(&mut h, 1.0, 2 * site + spin, 2 * (site + 1) + spin);
                }
            }
            let mut quartic = Vec::new();
            for site in 0..n_sites {
                let (up, dn) = (2 * site, 2 * site + 1);
                quartic.push((
                    vec![2 * up + 1, 2 * up + 2, 2 * dn + 1, 2 * dn + 2],
                    C64::new(-u / 4.0, 0.0),
                ));
            }
            model_from_parts(
                &format!("hubbard-{n_sites}site(U={u},mu={mu})"),
                ModeLayout::chain_spinful(n_sites),
                h,
                offset,
                &quartic,
                u,
            )
        }
    }
}

/// Spinless chain with nearest-neighbor hopping, chemical potential and a
/// density-density coupling across each bond.
pub fn spinless_chain(n_modes: usize, t: f64, mu: f64, u: f64) -> Result<FermionModel> {
    if n_modes > crate::MAX_DIRAC_MODES {
        return Err(Error::CapacityExceeded {
            requested: n_modes,
            cap: crate::MAX_DIRAC_MODES,
        });
    }
    let mut h = empty_h(n_modes);
    let mut offset = 0.0;
    for mode in 0..n_modes {
        offset += add_chemical(&mut h, mu, mode);
    }
    for mode in 0..n_modes - 1 {
        add_hopping(&mut h, t, mode, mode + 1);
    }
    // (n_i - 1/2)(n_{i+1} - 1/2) = -(1/4) gamma_p gamma_q gamma_r gamma_s
    let mut quartic = Vec::new();
    for mode in 0..n_modes - 1 {
        quartic.push((
            vec![2 * mode + 1, 2 * mode + 2, 2 * mode + 3, 2 * mode + 4],
            C64::new(-u / 4.0, 0.0),
        ));
    }
    model_from_parts(
        &format!("spinless-chain(n={n_modes},t={t},mu={mu},U={u})"),
        ModeLayout::chain(n_modes),
        h,
        offset,
        &quartic,
        u,
    )
}

/// Restriction of a model to the terms supported within lattice distance
/// `radius` of `center`, on the unchanged Hilbert space.
pub fn truncate_to_ball(model: &FermionModel, center: usize, radius: f64) -> Result<FermionModel> {
    let layout = &model.layout;
    let mut kept = MajoranaPolynomial::new(model.n_modes());
    for (mono, c) in model.hamiltonian.terms() {
        let inside = mono
            .indices()
            .iter()
            .all(|&j| layout.distance(layout.site_of(j), center) <= radius + 1e-12);
        if inside {
            kept.add_monomial(mono, c);
        }
    }
    let mut free_h = model.free_h.clone();
    let two_n = free_h.nrows();
    for j in 0..two_n {
        for k in 0..two_n {
            let da = layout.distance(layout.site_of(j + 1), center);
            let db = layout.distance(layout.site_of(k + 1), center);
            if da > radius + 1e-12 || db > radius + 1e-12 {
                free_h[(j, k)] = C64::new(0.0, 0.0);
            }
        }
    }
    Ok(FermionModel {
        name: format!("{}|ball(r={radius})", model.name),
        layout: layout.clone(),
        hamiltonian: kept,
        free_h,
        free_offset: model.free_offset,
        coupling: model.coupling,
    })
}

/// Per-term interaction ranges of a polynomial under a layout.
#[derive(Clone, Debug)]
pub struct LocalityAudit {
    /// Largest site-to-site distance inside any single term.
    pub max_range: f64,
    /// Term count by polynomial degree.
    pub degree_histogram: Vec<(usize, usize)>,
}

/// Checks that every term of `p` fits inside the layout's declared interaction
/// radius and reports the observed ranges.
pub fn locality_audit(p: &MajoranaPolynomial, layout: &ModeLayout) -> Result<LocalityAudit> {
    let mut max_range = 0.0f64;
    let mut offenders: Vec<(usize, usize)> = Vec::new();
    let mut histogram: std::collections::BTreeMap<usize, usize> = std::collections::BTreeMap::new();
    for (mono, _) in p.terms() {
        let idx = mono.indices();
        *histogram.entry(idx.len()).or_insert(0) += 1;
        for (i, &ja) in idx.iter().enumerate() {
            for &jb in idx.iter().skip(i + 1) {
                let d = layout.distance(layout.site_of(ja), layout.site_of(jb));
                max_range = max_range.max(d);
                if d > layout.r0 + 1e-12 {
                    offenders.push((layout.site_of(ja), layout.site_of(jb)));
                }
            }
        }
    }
    if !offenders.is_empty() {
        offenders.sort_unstable();
        offenders.dedup();
        return Err(Error::LocalityViolation { pairs: offenders });
    }
    Ok(LocalityAudit {
        max_range,
        degree_histogram: histogram.into_iter().collect(),
    })
}

/// Mode occupation n_m - 1/2 as a polynomial (0-based mode).
pub fn centered_occupation(n_modes: usize, mode: usize) -> Result<MajoranaPolynomial> {
    let mut p = MajoranaPolynomial::new(n_modes);
    // n_m - 1/2 = -(i/2) gamma_{2m+1} gamma_{2m+2}
    p.add_product(&[2 * mode + 1, 2 * mode + 2], C64::new(0.0, -0.5))?;
    Ok(p)
}

/// Custom model from explicit terms; quadratic portion is not separated, so
/// the free coefficient matrix stays empty.
pub fn from_terms(
    name: &str,
    layout: ModeLayout,
    terms: &[(Vec<usize>, C64)],
) -> Result<FermionModel> {
    let n = layout.n_modes();
    let mut hamiltonian = MajoranaPolynomial::new(n);
    let mut free_h = empty_h(n);
    let mut free_offset = 0.0;
    let mut coupling = 0.0f64;
    for (idx, c) in terms {
        hamiltonian.add_product(idx, *c)?;
        match idx.len() {
            0 => free_offset += c.re,
            2 => {
                let (j, k) = (idx[0] - 1, idx[1] - 1);
                free_h[(j, k)] += *c * 0.5;
                free_h[(k, j)] -= *c * 0.5;
            }
            _ => coupling = coupling.max(c.norm()),
        }
    }
    check_quadratic_matrix(&free_h)?;
    Ok(FermionModel {
        name: name.to_string(),
        layout,
        hamiltonian,
        free_h,
        free_offset,
        coupling,
    })
}

/// Canonical mode energies of the free part, largest first.
pub fn free_mode_energies(model: &FermionModel) -> Result<Vec<f64>> {
    Ok(canonical_form(&model.free_h)?.eps)
}

/// Column l of the free Heisenberg rotation as a coefficient vector.
pub fn heisenberg_column(h: &DMatrix<C64>, t: f64, l: usize) -> Result<DVector<f64>> {
    Ok(free_heisenberg(h, t)?.column(l).into_owned())
}
