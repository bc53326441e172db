//! Study layer: gap extraction, the interaction-strength sweep, mixing bound
//! verification, correlation and quasi-locality decay profiles, and kernel
//! self-diagnostics.

use crate::algebra::{even_indices, odd_indices, Algebra};
use crate::kernels;
use crate::linalg::{expm, hermitian_eigenvalues, hermiticity_residual, HermitianEigen};
use crate::lindblad::{
    assemble_lindbladian, even_sector_gap, gram_norm, mixing_time_empirical, trace_distance,
    AssembledLindbladian, Method, MixingEstimate,
};
use crate::model::{self, FermionModel};
use crate::spectral::{gibbs_state, hamiltonian_eigen, kms_gram, GibbsState};
use crate::thirdq::{
    build_parent_hamiltonian, ground_vector, single_mode_gap, split_free_interacting, ASpace,
    GroundReport, ParentHamiltonian, ParentSplit,
};
use crate::{Error, Result, C64};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

/// Everything the downstream studies need about one model at one temperature.
pub struct ModelPipeline {
    pub model: FermionModel,
    pub algebra: Algebra,
    pub eig: HermitianEigen,
    pub state: GibbsState,
    pub gram: DMatrix<C64>,
    pub assembled: AssembledLindbladian,
}

pub fn build_pipeline(model: FermionModel, beta: f64, method: Method) -> Result<ModelPipeline> {
    let n = model.n_modes();
    let channels: Vec<usize> = (1..=2 * n).collect();
    build_pipeline_with(model, beta, method, &channels)
}

pub fn build_pipeline_with(
    model: FermionModel,
    beta: f64,
    method: Method,
    channels: &[usize],
) -> Result<ModelPipeline> {
    let algebra = Algebra::new(model.n_modes())?;
    let h = model.dense(&algebra)?;
    let eig = hamiltonian_eigen(&h)?;
    let state = gibbs_state(&eig, beta)?;
    let gram = kms_gram(&state, &algebra)?;
    let assembled = crate::lindblad::assemble_lindbladian_with(
        &eig, &algebra, beta, method, channels, 1.0,
    )?;
    Ok(ModelPipeline {
        model,
        algebra,
        eig,
        state,
        gram,
        assembled,
    })
}

/// Parent construction for a pipeline, with the free counterpart when the
/// model has an interacting part.
pub struct ParentPipeline {
    pub aspace: ASpace,
    pub parent: ParentHamiltonian,
    pub free_parent: ParentHamiltonian,
    pub split: ParentSplit,
    pub ground: GroundReport,
}

pub fn build_parent_pipeline(p: &ModelPipeline, method: Method) -> Result<ParentPipeline> {
    let aspace = ASpace::new(p.algebra.n_modes)?;
    let parent = build_parent_hamiltonian(&p.assembled, &p.state, &p.algebra, &aspace)?;
    let free_parent = if p.model.is_free() {
        build_parent_hamiltonian(&p.assembled, &p.state, &p.algebra, &aspace)?
    } else {
        let h0 = p.model.dense_free(&p.algebra)?;
        let eig0 = hamiltonian_eigen(&h0)?;
        let state0 = gibbs_state(&eig0, p.state.beta)?;
        let assembled0 = assemble_lindbladian(&eig0, &p.algebra, p.state.beta, method)?;
        build_parent_hamiltonian(&assembled0, &state0, &p.algebra, &aspace)?
    };
    let split = split_free_interacting(&parent, &free_parent);
    let ground = ground_vector(&parent.total);
    Ok(ParentPipeline {
        aspace,
        parent,
        free_parent,
        split,
        ground,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sector {
    Full,
    Even,
    Odd,
}

impl Sector {
    pub fn label(&self) -> &'static str {
        match self {
            Sector::Full => "full",
            Sector::Even => "even",
            Sector::Odd => "odd",
        }
    }
}

/// Top of a Hermitian spectrum restricted to a parity sector of the monomial
/// basis indexing.
#[derive(Clone, Debug)]
pub struct GapReport {
    pub sector: Sector,
    pub top_eigenvalue: f64,
    pub second_eigenvalue: f64,
    pub gap: f64,
    pub degenerate_top: bool,
}

pub fn spectral_gap(matrix: &DMatrix<C64>, sector: Sector) -> Result<GapReport> {
    let res = hermiticity_residual(matrix);
    if res > 1e-8 {
        return Err(Error::NonHermitian { residual: res });
    }
    let n = matrix.nrows();
    let idx: Vec<usize> = match sector {
        Sector::Full => (0..n).collect(),
        Sector::Even => even_indices(n),
        Sector::Odd => odd_indices(n),
    };
    let sub = DMatrix::from_fn(idx.len(), idx.len(), |r, c| matrix[(idx[r], idx[c])]);
    let sym = (&sub + sub.adjoint()) * C64::new(0.5, 0.0);
    let evs = hermitian_eigenvalues(&sym);
    let m = evs.len();
    if m < 2 {
        return Err(Error::AssemblyInvariant(
            "sector too small for a gap".into(),
        ));
    }
    let range = (evs[m - 1] - evs[0]).max(1.0);
    Ok(GapReport {
        sector,
        top_eigenvalue: evs[m - 1],
        second_eigenvalue: evs[m - 2],
        gap: evs[m - 1] - evs[m - 2],
        degenerate_top: (evs[m - 1] - evs[m - 2]).abs() < 1e-9 * range,
    })
}

/// Calibration of the overall gap constant: minus the second eigenvalue of
/// the zero-splitting single-mode parent at β = 1.
pub fn calibrate_gap_constant(method: Method) -> Result<f64> {
    let p = build_pipeline(model::single_mode(0.0)?, 1.0, method)?;
    let pp = build_parent_pipeline(&p, method)?;
    Ok(-pp.ground.second_eigenvalue)
}

/// Probe states for mixing studies: every even-parity computational basis
/// projector plus `extra` Haar-random even pure states.
pub fn probe_states(alg: &Algebra, extra: usize, rng: &mut ChaCha20Rng) -> Vec<DMatrix<C64>> {
    let d = alg.dim;
    let par = alg.parity_operator();
    let even: Vec<usize> = (0..d).filter(|&i| par[(i, i)].re > 0.0).collect();
    let mut states = Vec::new();
    for &i in &even {
        let mut m = DMatrix::zeros(d, d);
        m[(i, i)] = C64::new(1.0, 0.0);
        states.push(m);
    }
    for _ in 0..extra {
        let mut v: DVector<C64> = DVector::zeros(d);
        for &i in &even {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            v[i] = C64::new(re, im);
        }
        let norm = v.norm();
        v /= C64::new(norm, 0.0);
        states.push(&v * v.adjoint());
    }
    states
}

/// Random even-parity Hermitian observable with σ-traceless option.
pub fn random_even_observable(
    alg: &Algebra,
    rng: &mut ChaCha20Rng,
    sigma: Option<&DMatrix<C64>>,
) -> DMatrix<C64> {
    let mut coords: DVector<C64> = DVector::zeros(alg.basis_len);
    for i in even_indices(alg.basis_len) {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        coords[i] = C64::new(re, im);
    }
    let z = alg.devectorize(&coords);
    let mut y = (&z + z.adjoint()) * C64::new(0.5, 0.0);
    if let Some(s) = sigma {
        let mean = (s * &y).trace();
        let d = y.nrows();
        y -= DMatrix::identity(d, d) * mean;
    }
    y
}

/// Verification record for the mixing bound on one pipeline.
#[derive(Clone, Debug)]
pub struct MixingReport {
    pub gap: f64,
    pub sigma_min: f64,
    /// max over sampled (t, state) of distance minus the bound.
    pub worst_slack: f64,
    /// Decay rate read off the tail of the worst-state distance curve.
    pub tail_rate: Option<f64>,
    /// max over observables and times of ‖e^{Mt}y‖_G − e^{−gt}‖y‖_G.
    pub contraction_slack: f64,
    pub times: Vec<f64>,
    pub worst_distances: Vec<f64>,
    pub state_count: usize,
}

pub fn mixing_bound_verify(p: &ModelPipeline, seed: u64) -> Result<MixingReport> {
    let gap = even_sector_gap(&p.assembled.heisenberg, &p.gram, p.algebra.basis_len)?;
    let sigma_min = p.state.sigma_min;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let states = probe_states(&p.algebra, 10, &mut rng);

    let t_lo = 0.05 / gap;
    let t_hi = 12.0 / gap;
    let times: Vec<f64> = (0..20)
        .map(|i| t_lo * (t_hi / t_lo).powf(i as f64 / 19.0))
        .collect();
    let prefactor = 1.0 / sigma_min.sqrt();
    let mut worst_slack = f64::NEG_INFINITY;
    let mut worst_distances = Vec::with_capacity(times.len());
    let mut slowest = 0usize;
    let m = times.len();
    for (ti, &t) in times.iter().enumerate() {
        let prop = expm(&(&p.assembled.schrodinger * C64::new(t, 0.0)));
        let mut worst_d = 0.0f64;
        for (si, rho) in states.iter().enumerate() {
            let out = p.algebra.devectorize(&(&prop * p.algebra.vectorize(rho)));
            let d = trace_distance(&out, &p.state.sigma);
            let bound = prefactor * (-gap * t).exp();
            worst_slack = worst_slack.max(d - bound);
            if d > worst_d {
                worst_d = d;
                if ti == m - 1 {
                    slowest = si;
                }
            }
        }
        worst_distances.push(worst_d);
    }

    // Tail rate of the slowest state, measured by iterating its difference
    // from the thermal state through a fixed short-time propagator. Norms
    // decay multiplicatively, so there is no absolute noise floor; projecting
    // out the trace component each step stops roundoff from re-exciting the
    // stationary mode. The last-pair slope then reads the leading decay rate
    // with subleading bias below e^{-40}.
    let step = 2.0 / gap;
    let prop = expm(&(&p.assembled.schrodinger * C64::new(step, 0.0)));
    let zero = DMatrix::<C64>::zeros(p.algebra.dim, p.algebra.dim);
    let mut delta = &states[slowest] - &p.state.sigma;
    let mut tail_norms: Vec<f64> = Vec::new();
    for _ in 0..25 {
        delta = p.algebra.devectorize(&(&prop * p.algebra.vectorize(&delta)));
        let tr = delta.trace();
        delta -= &p.state.sigma * tr;
        tail_norms.push(trace_distance(&delta, &zero));
    }
    let k = tail_norms.len();
    let tail_rate = if tail_norms[k - 1] > 1e-250 && tail_norms[k - 1] < tail_norms[k - 2] {
        Some((tail_norms[k - 2].ln() - tail_norms[k - 1].ln()) / step)
    } else {
        None
    };

    let mut contraction_slack = f64::NEG_INFINITY;
    for _ in 0..10 {
        let y = random_even_observable(&p.algebra, &mut rng, Some(&p.state.sigma));
        let y0 = p.algebra.vectorize(&y);
        let base = gram_norm(&p.gram, &y0);
        for &t in &[0.3, 1.0, 3.0] {
            let prop = expm(&(&p.assembled.heisenberg * C64::new(t, 0.0)));
            let yt = &prop * &y0;
            let slack = gram_norm(&p.gram, &yt) - (-gap * t).exp() * base;
            contraction_slack = contraction_slack.max(slack);
        }
    }

    Ok(MixingReport {
        gap,
        sigma_min,
        worst_slack,
        tail_rate,
        contraction_slack,
        times,
        worst_distances,
        state_count: states.len(),
    })
}

/// Empirical mixing time against the rigorous budget for one threshold.
#[derive(Clone, Debug)]
pub struct MixingComparison {
    pub estimate: MixingEstimate,
    pub budget: f64,
}

pub fn mixing_time_with_budget(
    p: &ModelPipeline,
    epsilon: f64,
    seed: u64,
) -> Result<MixingComparison> {
    let gap = even_sector_gap(&p.assembled.heisenberg, &p.gram, p.algebra.basis_len)?;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let states = probe_states(&p.algebra, 10, &mut rng);
    let estimate = mixing_time_empirical(
        &p.assembled,
        &p.algebra,
        &states,
        &p.state,
        epsilon,
        gap,
    )?;
    let budget =
        (0.5 * (1.0 / p.state.sigma_min).ln() + (1.0 / epsilon).ln()) / gap;
    Ok(MixingComparison { estimate, budget })
}

/// Log-linear decay fit over distance-value samples.
#[derive(Clone, Debug)]
pub struct DecayFit {
    pub distances: Vec<f64>,
    pub values: Vec<f64>,
    /// Positive rate of exp(−rate · distance) decay, when fittable.
    pub rate: Option<f64>,
    /// Worst absolute log-residual of the fit.
    pub fit_residual: f64,
    pub usable: usize,
}

pub fn fit_decay(distances: &[f64], values: &[f64], floor: f64) -> DecayFit {
    let pairs: Vec<(f64, f64)> = distances
        .iter()
        .zip(values)
        .filter(|(_, &v)| v > floor)
        .map(|(&d, &v)| (d, v.ln()))
        .collect();
    let usable = pairs.len();
    if usable < 2 {
        return DecayFit {
            distances: distances.to_vec(),
            values: values.to_vec(),
            rate: None,
            fit_residual: 0.0,
            usable,
        };
    }
    let n = usable as f64;
    let sx: f64 = pairs.iter().map(|p| p.0).sum();
    let sy: f64 = pairs.iter().map(|p| p.1).sum();
    let sxx: f64 = pairs.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pairs.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    let fit_residual = pairs
        .iter()
        .map(|&(x, y)| (y - slope * x - intercept).abs())
        .fold(0.0, f64::max);
    DecayFit {
        distances: distances.to_vec(),
        values: values.to_vec(),
        rate: Some(-slope),
        fit_residual,
        usable,
    }
}

/// Connected correlations of centered occupations along a chain pipeline.
#[derive(Clone, Debug)]
pub struct CorrelationReport {
    pub fit: DecayFit,
    pub monotone: bool,
    pub bound_ok: bool,
    /// All samples below the measurement floor.
    pub below_noise: bool,
}

pub fn correlation_decay(model: &FermionModel, beta: f64) -> Result<CorrelationReport> {
    let n = model.n_modes();
    if n < 3 {
        return Err(Error::Config(
            "correlation profile needs at least three modes".into(),
        ));
    }
    // thermal expectations only, no generator assembly
    let alg = Algebra::new(n)?;
    let eig = hamiltonian_eigen(&model.dense(&alg)?)?;
    let state = gibbs_state(&eig, beta)?;
    let alg = &alg;
    let x = crate::algebra::polynomial_to_matrix(&model::centered_occupation(n, 0)?, alg)?.matrix;
    let ex = (&state.sigma * &x).trace().re;
    let xnorm = crate::linalg::spectral_norm(&x);
    let mut distances = Vec::new();
    let mut values = Vec::new();
    let mut bound_ok = true;
    for r in 1..n {
        let y = crate::algebra::polynomial_to_matrix(&model::centered_occupation(n, r)?, alg)?
            .matrix;
        let ey = (&state.sigma * &y).trace().re;
        let exy = (&state.sigma * &x * &y).trace().re;
        let v = (exy - ex * ey).abs();
        if v > 2.0 * xnorm * crate::linalg::spectral_norm(&y) + 1e-12 {
            bound_ok = false;
        }
        distances.push(r as f64);
        values.push(v);
    }
    let below_noise = values.iter().all(|&v| v < 1e-14);
    let monotone = values.windows(2).all(|w| w[1] <= w[0] + 1e-15);
    let fit = fit_decay(&distances, &values, 1e-13);
    Ok(CorrelationReport {
        fit,
        monotone,
        bound_ok,
        below_noise,
    })
}

/// Tilted jump operator Σ_ν e^{−βν/4} f̂(ω − ν) X_ν for one channel.
pub fn tilted_jump(
    channel: &crate::lindblad::JumpChannel,
    omega: f64,
    beta: f64,
) -> DMatrix<C64> {
    let d = channel.operators[0].nrows();
    let mut acc = DMatrix::zeros(d, d);
    for (nu, xop) in channel.frequencies.iter().zip(&channel.operators) {
        let w = (-beta * nu / 4.0).exp() * kernels::f_hat(omega - nu, beta);
        acc += xop * C64::new(w, 0.0);
    }
    acc
}

/// Quasi-locality profile: spectral-norm error of rebuilding the tilted jump
/// from Hamiltonians truncated to growing balls around the coupling site.
#[derive(Clone, Debug)]
pub struct QuasiLocalityReport {
    pub fit: DecayFit,
    pub monotone: bool,
    /// err(ω = 2/β) / err(ω = 0) at the largest radius, with the tilt target
    /// e^{−1/2}.
    pub omega_ratio: f64,
    pub omega_ratio_target: f64,
    pub omega_ratio_within_factor_3: bool,
}

pub fn quasi_locality_profile(
    model: &FermionModel,
    beta: f64,
    omega: f64,
    radii: &[f64],
) -> Result<QuasiLocalityReport> {
    let alg = Algebra::new(model.n_modes())?;
    let eig_full = hamiltonian_eigen(&model.dense(&alg)?)?;
    let center = model.layout.site_of(1);
    let full = crate::lindblad::bohr_channel(1, &eig_full, &alg);
    let reference = tilted_jump(&full, omega, beta);
    let reference_alt = tilted_jump(&full, 2.0 / beta, beta);

    let mut values = Vec::with_capacity(radii.len());
    let mut last_pair = (0.0f64, 0.0f64);
    for &r in radii {
        let truncated = model::truncate_to_ball(model, center, r)?;
        let eig_r = hamiltonian_eigen(&truncated.dense(&alg)?)?;
        let ch = crate::lindblad::bohr_channel(1, &eig_r, &alg);
        let approx = tilted_jump(&ch, omega, beta);
        let err = crate::linalg::spectral_norm(&(&reference - approx));
        let approx_alt = tilted_jump(&ch, 2.0 / beta, beta);
        let err_alt = crate::linalg::spectral_norm(&(&reference_alt - approx_alt));
        values.push(err);
        last_pair = (err, err_alt);
    }
    let fit = fit_decay(radii, &values, 1e-13);
    if fit.usable < 2 {
        return Err(Error::AssemblyInvariant(
            "quasi-locality profile has fewer than two usable radii".into(),
        ));
    }
    let monotone = values.windows(2).all(|w| w[1] <= w[0] + 1e-15);
    let omega_ratio = if last_pair.0 > 1e-300 {
        last_pair.1 / last_pair.0
    } else {
        f64::NAN
    };
    let target = (-0.5f64).exp();
    let within = omega_ratio.is_finite()
        && omega_ratio < 3.0 * target
        && omega_ratio > target / 3.0;
    Ok(QuasiLocalityReport {
        fit,
        monotone,
        omega_ratio,
        omega_ratio_target: target,
        omega_ratio_within_factor_3: within,
    })
}

/// One point of the interaction sweep.
#[derive(Clone, Debug)]
pub struct SweepPoint {
    pub u: f64,
    pub beta: f64,
    pub gap: f64,
    pub degenerate_top: bool,
    pub interaction_norm: f64,
    /// ‖V‖/U for interacting points.
    pub ratio: Option<f64>,
    pub mixing_time: f64,
    pub mixing_converged: bool,
    pub seed: u64,
}

/// Sweep of the single-site Hubbard parent gap over interaction strengths.
#[derive(Clone, Debug)]
pub struct SweepResult {
    pub points: Vec<SweepPoint>,
    /// max |gap(U) − gap(0)| / U over interacting points.
    pub envelope_slope: f64,
    /// Least-squares slope of gap against U.
    pub lsq_slope: f64,
    /// Relative spread of ‖V‖/U over interacting points.
    pub ratio_spread: f64,
    /// Analytic free-limit gap from the decoupled closed form.
    pub endpoint_analytic_gap: f64,
    pub endpoint_rel_err: f64,
    pub gap_constant: f64,
}

pub fn gap_vs_u_sweep(
    us: &[f64],
    beta: f64,
    mu: f64,
    method: Method,
    seed: u64,
) -> Result<SweepResult> {
    if us.is_empty() {
        return Err(Error::Config("sweep needs at least one point".into()));
    }
    let c = calibrate_gap_constant(method)?;
    let mut points = Vec::with_capacity(us.len());
    for (i, &u) in us.iter().enumerate() {
        let point_seed = seed.wrapping_add(i as u64);
        let p = build_pipeline(model::hubbard_single_site(u, mu)?, beta, method)?;
        let pp = build_parent_pipeline(&p, method)?;
        let gap_report = spectral_gap(&pp.parent.total, Sector::Full)?;
        let vnorm = pp.split.interaction_norm();
        let mixing = mixing_time_with_budget(&p, 0.1, point_seed)?;
        points.push(SweepPoint {
            u,
            beta,
            gap: gap_report.gap,
            degenerate_top: gap_report.degenerate_top,
            interaction_norm: vnorm,
            ratio: if u > 0.0 { Some(vnorm / u) } else { None },
            mixing_time: mixing.estimate.time,
            mixing_converged: mixing.estimate.converged,
            seed: point_seed,
        });
    }

    let base_gap = points
        .iter()
        .find(|p| p.u == 0.0)
        .map(|p| p.gap)
        .unwrap_or(points[0].gap);
    let mut envelope_slope = 0.0f64;
    let mut ratios = Vec::new();
    for p in &points {
        if p.u > 0.0 {
            envelope_slope = envelope_slope.max((p.gap - base_gap).abs() / p.u);
            if let Some(r) = p.ratio {
                ratios.push(r);
            }
        }
    }
    let lsq_slope = if points.len() >= 2 {
        let n = points.len() as f64;
        let sx: f64 = points.iter().map(|p| p.u).sum();
        let sy: f64 = points.iter().map(|p| p.gap).sum();
        let sxx: f64 = points.iter().map(|p| p.u * p.u).sum();
        let sxy: f64 = points.iter().map(|p| p.u * p.gap).sum();
        (n * sxy - sx * sy) / (n * sxx - sx * sx)
    } else {
        0.0
    };
    let ratio_spread = if ratios.len() >= 2 {
        let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
        let max = ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        (max - min) / mean
    } else {
        0.0
    };

    // analytic free endpoint from the canonical mode energies
    let free = model::hubbard_single_site(0.0, mu)?;
    let canon = model::canonical_form(&free.free_h)?;
    let endpoint_analytic_gap = canon
        .eps
        .iter()
        .map(|&e| single_mode_gap(e / 2.0, beta, c))
        .fold(f64::INFINITY, f64::min);
    let endpoint_rel_err = (base_gap - endpoint_analytic_gap).abs() / endpoint_analytic_gap;

    Ok(SweepResult {
        points,
        envelope_slope,
        lsq_slope,
        ratio_spread,
        endpoint_analytic_gap,
        endpoint_rel_err,
        gap_constant: c,
    })
}

/// Self-checks of the closed kernel forms against quadrature and decay
/// expectations.
#[derive(Clone, Debug)]
pub struct KernelReport {
    /// Worst tilted-filter disagreement over the checkpoint list.
    pub tilted_filter_worst: f64,
    /// Spread of F(0, ω) e^{βω/4} over ω, which the closed form makes constant.
    pub tilt_invariance_spread: f64,
    pub envelope: DecayFit,
    pub envelope_rate_positive: bool,
    pub envelope_ratio_ok: bool,
    pub odd_hat_origin: f64,
    pub window_peak_residual: f64,
    pub filter_time_norm_err: f64,
    pub filter_freq_norm_err: f64,
    /// Flat-window quadrature against the autocorrelation identity.
    pub flat_window_residual: f64,
}

pub fn kernel_diagnostics(beta: f64) -> Result<KernelReport> {
    let checkpoints = [
        (0.0, 0.0, 1.0),
        (0.7, 1.1, 1.0),
        (-1.2, 0.5, 0.5),
        (0.3, -2.0, 2.0),
        (2.0, 3.0, 1.0),
    ];
    let mut worst = 0.0f64;
    for &(t, om, b) in &checkpoints {
        let closed = kernels::tilted_filter_closed(t, om, b);
        let quad = kernels::tilted_filter_quadrature(t, om, b);
        worst = worst.max((closed - quad).norm());
    }

    let omegas = [0.0, 1.0, 2.0];
    let vals: Vec<f64> = omegas
        .iter()
        .map(|&om| {
            (kernels::tilted_filter_closed(0.0, om, beta) * (beta * om / 4.0).exp()).norm()
        })
        .collect();
    let spread = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - vals.iter().cloned().fold(f64::INFINITY, f64::min);

    let radii = [1.0, 2.0, 3.0, 4.0];
    let mut env_vals = Vec::new();
    for &r in &radii {
        let mut best = 0.0f64;
        for k in 0..8 {
            let th = std::f64::consts::PI * k as f64 / 4.0;
            let v = kernels::coherent_inverse_transform(r * th.cos(), r * th.sin(), beta);
            best = best.max(v.norm());
        }
        env_vals.push(best);
    }
    let envelope = fit_decay(&radii, &env_vals, 1e-300);
    let rate = envelope.rate.unwrap_or(0.0);
    let ratio_ok = env_vals[3] / env_vals[1] <= (-2.0 * rate).exp() * (1.0 + 1e-9)
        || env_vals[3] <= env_vals[1];

    let bundle = kernels::KernelBundle::new(beta);
    let inv = bundle.invariant_residuals();
    let ft_norm = kernels::filter_time_norm_residual(beta);
    let ff_norm = kernels::filter_freq_norm_residual(beta);

    let flat = |_w: f64| 1.0;
    let mut flat_res = 0.0f64;
    for &(nu, nup) in &[(0.0, 0.0), (0.4, -0.3), (1.0, 0.5)] {
        let quad = kernels::dissipator_quadrature_with_window(nu, nup, beta, flat);
        let ident = (-beta * beta * (nu - nup) * (nu - nup) / 8.0).exp();
        flat_res = flat_res.max((quad - ident).abs());
    }

    Ok(KernelReport {
        tilted_filter_worst: worst,
        tilt_invariance_spread: spread,
        envelope,
        envelope_rate_positive: rate > 0.0,
        envelope_ratio_ok: ratio_ok,
        odd_hat_origin: inv[1],
        window_peak_residual: inv[0],
        filter_time_norm_err: ft_norm,
        filter_freq_norm_err: ff_norm,
        flat_window_residual: flat_res,
    })
}
