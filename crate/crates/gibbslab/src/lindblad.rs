//! Assembly of the thermal Lindbladian: frequency-resolved jump operators,
//! dissipator coefficients, the coherent correction, the generator in both
//! pictures, detailed-balance diagnostics and time evolution.

use crate::algebra::Algebra;
use crate::kernels::{
    self, coherent_weight, dissipator_coefficient, dissipator_coefficient_quadrature,
    CoherentQuadrature,
};
use crate::linalg::{expm, hermitian_eigen, hermitian_eigenvalues, hermiticity_residual, HermitianEigen};
use crate::spectral::{bohr_decompose, GibbsState};
use crate::{Error, Result, C64};
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use std::collections::{BTreeSet, HashMap};

/// Which evaluation route the kernel coefficients take.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Closed,
    Quadrature,
    Both,
}

/// Frequency components of one Majorana coupling operator.
#[derive(Clone, Debug)]
pub struct JumpChannel {
    /// 1-based Majorana index of the bath coupling.
    pub majorana: usize,
    pub frequencies: Vec<f64>,
    pub operators: Vec<DMatrix<C64>>,
}

/// Decomposes γ_j over the Bohr frequencies of the Hamiltonian.
pub fn bohr_channel(j: usize, eig: &HermitianEigen, alg: &Algebra) -> JumpChannel {
    let dec = bohr_decompose(&alg.gamma_dense(j), eig);
    let mut frequencies = Vec::with_capacity(dec.components.len());
    let mut operators = Vec::with_capacity(dec.components.len());
    for c in dec.components {
        frequencies.push(c.frequency);
        operators.push(c.matrix);
    }
    JumpChannel {
        majorana: j,
        frequencies,
        operators,
    }
}

/// Filtered jump operator A_j(ω) = Σ_ν f̂(ω − ν) X_ν.
pub fn jump_operator(channel: &JumpChannel, omega: f64, beta: f64) -> DMatrix<C64> {
    let d = channel.operators[0].nrows();
    let mut acc = DMatrix::zeros(d, d);
    for (nu, x) in channel.frequencies.iter().zip(&channel.operators) {
        acc += x * C64::new(kernels::f_hat(omega - nu, beta), 0.0);
    }
    acc
}

/// Same operator through the defining time integral, on a trapezoid grid over
/// [−8β, 8β]. Cross-check for the frequency-domain route.
pub fn jump_operator_time_quadrature(
    coupling: &DMatrix<C64>,
    eig: &HermitianEigen,
    omega: f64,
    beta: f64,
) -> DMatrix<C64> {
    let d = coupling.nrows();
    let rotated = eig.vectors.adjoint() * coupling * &eig.vectors;
    let points = 4001usize;
    let lim = 8.0 * beta;
    let h = 2.0 * lim / (points - 1) as f64;
    let norm = (2.0 * std::f64::consts::PI).sqrt();
    let mut acc: DMatrix<C64> = DMatrix::zeros(d, d);
    for i in 0..points {
        let t = -lim + i as f64 * h;
        let w = if i == 0 || i == points - 1 { 0.5 * h } else { h };
        let scalar = w * kernels::filter_time(t, beta) / norm;
        let phase = C64::new(0.0, -omega * t).exp() * scalar;
        for a in 0..d {
            for b in 0..d {
                let conj = C64::new(0.0, (eig.values[a] - eig.values[b]) * t).exp();
                acc[(a, b)] += rotated[(a, b)] * conj * phase;
            }
        }
    }
    &eig.vectors * acc * eig.vectors.adjoint()
}

fn freq_key(x: f64) -> i64 {
    (x * 1e10).round() as i64
}

/// Dissipator coefficient matrix over a frequency list, with an optional
/// quadrature cross-check shared through `cache`.
pub fn dissipator_coefficients(
    frequencies: &[f64],
    beta: f64,
    method: Method,
    cache: &HashMap<(i64, i64), f64>,
) -> Result<(DMatrix<f64>, f64)> {
    let m = frequencies.len();
    let closed = DMatrix::from_fn(m, m, |a, b| {
        dissipator_coefficient(frequencies[a], frequencies[b], beta)
    });
    if method == Method::Closed {
        return Ok((closed, 0.0));
    }
    let mut quad = DMatrix::zeros(m, m);
    let mut gap = 0.0f64;
    for a in 0..m {
        for b in 0..m {
            let ka = freq_key(frequencies[a]);
            let kb = freq_key(frequencies[b]);
            let key = (ka.min(kb), ka.max(kb));
            let q = match cache.get(&key) {
                Some(&v) => v,
                None => dissipator_coefficient_quadrature(frequencies[a], frequencies[b], beta),
            };
            quad[(a, b)] = q;
            gap = gap.max((q - closed[(a, b)]).abs());
        }
    }
    if gap > 1e-6 {
        return Err(Error::MethodDisagreement {
            what: "dissipator coefficient".into(),
            diff: gap,
            limit: 1e-6,
        });
    }
    let used = if method == Method::Quadrature { quad } else { closed };
    Ok((used, gap))
}

/// Coherent correction summed over channels: B = Σ_j Σ_{ν ν′} w(ν, ν′) X_ν X_ν′
/// with the closed-form weight, optionally cross-checked against the double
/// time quadrature on the [−6, 6]² grid.
pub fn coherent_term(
    channels: &[JumpChannel],
    beta: f64,
    method: Method,
) -> Result<(DMatrix<C64>, f64)> {
    let d = channels
        .first()
        .and_then(|c| c.operators.first())
        .map(|x| x.nrows())
        .ok_or_else(|| Error::AssemblyInvariant("no jump channels".into()))?;

    let mut closed: DMatrix<C64> = DMatrix::zeros(d, d);
    let mut quad: DMatrix<C64> = DMatrix::zeros(d, d);
    let mut cq = if method == Method::Closed {
        None
    } else {
        Some(CoherentQuadrature::new(beta))
    };
    for ch in channels {
        for (a, nu) in ch.frequencies.iter().enumerate() {
            for (b, nup) in ch.frequencies.iter().enumerate() {
                let prod = &ch.operators[a] * &ch.operators[b];
                closed += &prod * coherent_weight(*nu, *nup, beta);
                if let Some(cq) = cq.as_mut() {
                    quad += &prod * cq.weight(*nu, *nup);
                }
            }
        }
    }
    let mut gap = 0.0;
    if cq.is_some() {
        gap = crate::linalg::max_abs(&(&closed - &quad));
        if gap > 1e-5 {
            return Err(Error::MethodDisagreement {
                what: "coherent weight".into(),
                diff: gap,
                limit: 1e-5,
            });
        }
    }
    let used = if method == Method::Quadrature { quad } else { closed };
    let herm = hermiticity_residual(&used);
    if herm > 1e-9 {
        return Err(Error::NonHermitian { residual: herm });
    }
    Ok((used, gap))
}

/// The generator with everything needed downstream: the coupling channels,
/// the coherent correction and the superoperator in both pictures, over the
/// orthonormal monomial basis.
pub struct AssembledLindbladian {
    pub beta: f64,
    pub method: Method,
    pub channels: Vec<JumpChannel>,
    pub coherent: DMatrix<C64>,
    /// Matrix of the Heisenberg generator X ↦ L†(X).
    pub heisenberg: DMatrix<C64>,
    /// Matrix of the Schrödinger generator, the adjoint of `heisenberg`.
    pub schrodinger: DMatrix<C64>,
    pub dissipator_method_gap: f64,
    pub coherent_method_gap: f64,
}

pub fn assemble_lindbladian(
    eig: &HermitianEigen,
    alg: &Algebra,
    beta: f64,
    method: Method,
) -> Result<AssembledLindbladian> {
    let channels: Vec<usize> = (1..=2 * alg.n_modes).collect();
    assemble_lindbladian_with(eig, alg, beta, method, &channels, 1.0)
}

/// Full assembly with an explicit channel list. `coherent_scale` rescales the
/// coherent correction, which deliberately breaks detailed balance when not 1;
/// the control tests use that.
pub fn assemble_lindbladian_with(
    eig: &HermitianEigen,
    alg: &Algebra,
    beta: f64,
    method: Method,
    channel_indices: &[usize],
    coherent_scale: f64,
) -> Result<AssembledLindbladian> {
    for &j in channel_indices {
        if j == 0 || j > 2 * alg.n_modes {
            return Err(Error::IndexOutOfRange {
                index: j,
                n_modes: alg.n_modes,
            });
        }
    }
    let channels: Vec<JumpChannel> = channel_indices
        .iter()
        .map(|&j| bohr_channel(j, eig, alg))
        .collect();

    // quadrature route: precompute distinct coefficient pairs in parallel
    let cache: HashMap<(i64, i64), f64> = if method == Method::Closed {
        HashMap::new()
    } else {
        let mut wanted: BTreeSet<(i64, i64)> = BTreeSet::new();
        let mut rep: HashMap<(i64, i64), (f64, f64)> = HashMap::new();
        for ch in &channels {
            for &a in &ch.frequencies {
                for &b in &ch.frequencies {
                    let (ka, kb) = (freq_key(a), freq_key(b));
                    let key = (ka.min(kb), ka.max(kb));
                    if wanted.insert(key) {
                        rep.insert(key, (a, b));
                    }
                }
            }
        }
        wanted
            .into_par_iter()
            .map(|key| {
                let (a, b) = rep[&key];
                (key, dissipator_coefficient_quadrature(a, b, beta))
            })
            .collect()
    };

    let mut dissipator_gap = 0.0f64;
    let mut pairs: Vec<Vec<(DMatrix<C64>, DMatrix<C64>)>> = Vec::with_capacity(channels.len());
    let d = alg.dim;
    let mut m_tot: DMatrix<C64> = DMatrix::zeros(d, d);
    for ch in &channels {
        let (g, gap) = dissipator_coefficients(&ch.frequencies, beta, method, &cache)?;
        dissipator_gap = dissipator_gap.max(gap);
        let mut ch_pairs = Vec::with_capacity(ch.frequencies.len());
        for a in 0..ch.frequencies.len() {
            let mut r: DMatrix<C64> = DMatrix::zeros(d, d);
            for b in 0..ch.frequencies.len() {
                r += &ch.operators[b] * C64::new(g[(a, b)], 0.0);
            }
            let xdag = ch.operators[a].adjoint();
            m_tot += &xdag * &r;
            ch_pairs.push((xdag, r));
        }
        pairs.push(ch_pairs);
    }

    let (coherent_raw, coherent_gap) = coherent_term(&channels, beta, method)?;
    let coherent = coherent_raw * C64::new(coherent_scale, 0.0);

    let flat_pairs: Vec<(DMatrix<C64>, DMatrix<C64>)> = pairs.into_iter().flatten().collect();
    let columns: Vec<DVector<C64>> = (0..alg.basis_len)
        .into_par_iter()
        .map(|col| {
            let x = alg.monomial(col as u64).to_dense();
            let mut acc = (&coherent * &x - &x * &coherent) * C64::new(0.0, 1.0);
            for (xdag, r) in &flat_pairs {
                acc += xdag * (&x * r);
            }
            acc -= (&m_tot * &x + &x * &m_tot) * C64::new(0.5, 0.0);
            alg.vectorize(&acc)
        })
        .collect();
    let mut heisenberg = DMatrix::zeros(alg.basis_len, alg.basis_len);
    for (i, c) in columns.iter().enumerate() {
        heisenberg.set_column(i, c);
    }

    // unitality: the identity monomial must be annihilated
    let unital = heisenberg.column(0).norm();
    if unital > 1e-9 {
        return Err(Error::AssemblyInvariant(format!(
            "generator fails to annihilate the identity, residual {unital:.3e}"
        )));
    }
    let schrodinger = heisenberg.adjoint();
    Ok(AssembledLindbladian {
        beta,
        method,
        channels,
        coherent,
        heisenberg,
        schrodinger,
        dissipator_method_gap: dissipator_gap,
        coherent_method_gap: coherent_gap,
    })
}

impl AssembledLindbladian {
    /// ‖L(σ)‖_F for a candidate stationary state.
    pub fn stationarity_residual(&self, sigma: &DMatrix<C64>, alg: &Algebra) -> f64 {
        let v = alg.vectorize(sigma);
        let w = &self.schrodinger * v;
        (alg.dim as f64).sqrt() * w.norm()
    }

    /// Heisenberg action on a dense observable.
    pub fn apply_heisenberg(&self, x: &DMatrix<C64>, alg: &Algebra) -> DMatrix<C64> {
        alg.devectorize(&(&self.heisenberg * alg.vectorize(x)))
    }

    /// Schrödinger action on a dense state.
    pub fn apply_schrodinger(&self, rho: &DMatrix<C64>, alg: &Algebra) -> DMatrix<C64> {
        alg.devectorize(&(&self.schrodinger * alg.vectorize(rho)))
    }
}

/// ‖M − G^{-1} M† G‖_F, the detailed-balance residual of the Heisenberg
/// generator with respect to the KMS Gram matrix.
pub fn kms_dbc_residual(heisenberg: &DMatrix<C64>, gram: &DMatrix<C64>) -> Result<f64> {
    let rhs = heisenberg.adjoint() * gram;
    let lu = gram.clone().lu();
    let solved = lu
        .solve(&rhs)
        .ok_or_else(|| Error::AssemblyInvariant("Gram matrix is singular".into()))?;
    Ok((heisenberg - solved).norm())
}

/// Eigenvalues of the generator restricted to one parity sector, computed from
/// the Hermitization G^{1/2} M G^{-1/2}. Returns them ascending together with
/// the Hermiticity defect of the conjugated block.
pub fn sector_eigenvalues(
    heisenberg: &DMatrix<C64>,
    gram: &DMatrix<C64>,
    indices: &[usize],
) -> Result<(Vec<f64>, f64)> {
    let k = indices.len();
    let msub = DMatrix::from_fn(k, k, |r, c| heisenberg[(indices[r], indices[c])]);
    let gsub = DMatrix::from_fn(k, k, |r, c| gram[(indices[r], indices[c])]);
    let ge = hermitian_eigen(&gsub);
    let min_ev = ge.values.iter().cloned().fold(f64::INFINITY, f64::min);
    if min_ev <= 0.0 {
        return Err(Error::RankDeficientState { sigma_min: min_ev });
    }
    let half = crate::linalg::hermitian_fn(&ge, |x| x.sqrt());
    let inv_half = crate::linalg::hermitian_fn(&ge, |x| 1.0 / x.sqrt());
    let s = &half * msub * &inv_half;
    let defect = hermiticity_residual(&s);
    let sym = (&s + s.adjoint()) * C64::new(0.5, 0.0);
    Ok((hermitian_eigenvalues(&sym), defect))
}

/// Spectral gap of the even-parity sector: distance from the stationary
/// eigenvalue at 0 to the next one below.
pub fn even_sector_gap(
    heisenberg: &DMatrix<C64>,
    gram: &DMatrix<C64>,
    basis_len: usize,
) -> Result<f64> {
    let idx = crate::algebra::even_indices(basis_len);
    let (evs, _) = sector_eigenvalues(heisenberg, gram, &idx)?;
    let m = evs.len();
    Ok(evs[m - 1] - evs[m - 2])
}

/// Largest sector eigenvalue over both parities; nonpositive for a generator
/// with its spectrum in the left half plane.
pub fn top_sector_eigenvalue(
    heisenberg: &DMatrix<C64>,
    gram: &DMatrix<C64>,
    basis_len: usize,
) -> Result<f64> {
    let even = crate::algebra::even_indices(basis_len);
    let odd = crate::algebra::odd_indices(basis_len);
    let (ee, _) = sector_eigenvalues(heisenberg, gram, &even)?;
    let (oe, _) = sector_eigenvalues(heisenberg, gram, &odd)?;
    Ok(ee
        .last()
        .copied()
        .unwrap_or(f64::NEG_INFINITY)
        .max(oe.last().copied().unwrap_or(f64::NEG_INFINITY)))
}

/// Trace distance (1/2)‖a − b‖_1 of two Hermitian matrices.
pub fn trace_distance(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    let diff = a - b;
    let sym = (&diff + diff.adjoint()) * C64::new(0.5, 0.0);
    hermitian_eigenvalues(&sym).iter().map(|v| v.abs()).sum::<f64>() / 2.0
}

/// Propagates a state to time t and validates trace, Hermiticity and spectrum.
pub fn evolve(
    assembled: &AssembledLindbladian,
    alg: &Algebra,
    rho0: &DMatrix<C64>,
    t: f64,
) -> Result<DMatrix<C64>> {
    let prop = expm(&(&assembled.schrodinger * C64::new(t, 0.0)));
    let out = alg.devectorize(&(&prop * alg.vectorize(rho0)));
    let dtr = (out.trace() - rho0.trace()).norm();
    if dtr > 1e-10 {
        return Err(Error::AssemblyInvariant(format!(
            "evolution changed the trace by {dtr:.3e}"
        )));
    }
    let herm = hermiticity_residual(&out);
    if herm > 1e-10 {
        return Err(Error::NonHermitian { residual: herm });
    }
    let sym = (&out + out.adjoint()) * C64::new(0.5, 0.0);
    let min_ev = hermitian_eigenvalues(&sym)
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    if min_ev < -1e-9 {
        return Err(Error::AssemblyInvariant(format!(
            "evolution lost positivity, min eigenvalue {min_ev:.3e}"
        )));
    }
    Ok(out)
}

/// Outcome of the empirical mixing-time search.
#[derive(Clone, Debug)]
pub struct MixingEstimate {
    pub epsilon: f64,
    pub time: f64,
    pub converged: bool,
    pub t_max: f64,
    pub propagator_evaluations: usize,
}

/// Smallest time at which every probe state is within `epsilon` of the target
/// in trace distance, located by doubling then bisection.
pub fn mixing_time_empirical(
    assembled: &AssembledLindbladian,
    alg: &Algebra,
    states: &[DMatrix<C64>],
    target: &GibbsState,
    epsilon: f64,
    gap_hint: f64,
) -> Result<MixingEstimate> {
    if !(epsilon > 0.0) || epsilon >= 2.0 {
        return Err(Error::Config(format!(
            "mixing threshold must lie in (0, 2), got {epsilon}"
        )));
    }
    let g = gap_hint.max(1e-6);
    let t_max = 200.0 / g;
    let mut evals = 0usize;
    let dist_at = |t: f64| -> f64 {
        let prop = expm(&(&assembled.schrodinger * C64::new(t, 0.0)));
        states
            .iter()
            .map(|rho| {
                let out = alg.devectorize(&(&prop * alg.vectorize(rho)));
                trace_distance(&out, &target.sigma)
            })
            .fold(0.0, f64::max)
    };

    let mut hi = 1.0 / g;
    evals += 1;
    while dist_at(hi) > epsilon {
        hi *= 2.0;
        evals += 1;
        if hi > t_max {
            return Ok(MixingEstimate {
                epsilon,
                time: t_max,
                converged: false,
                t_max,
                propagator_evaluations: evals,
            });
        }
    }
    let mut lo = 0.0f64;
    for _ in 0..50 {
        let mid = 0.5 * (lo + hi);
        evals += 1;
        if dist_at(mid) > epsilon {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-4 * hi.max(1e-12) {
            break;
        }
    }
    Ok(MixingEstimate {
        epsilon,
        time: hi,
        converged: true,
        t_max,
        propagator_evaluations: evals,
    })
}

/// ‖y‖_G in monomial coordinates.
pub fn gram_norm(gram: &DMatrix<C64>, y: &DVector<C64>) -> f64 {
    let q = y.adjoint() * gram * y;
    q[(0, 0)].re.max(0.0).sqrt()
}
