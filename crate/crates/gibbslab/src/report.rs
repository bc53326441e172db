//! Run reports and file outputs.
//!
//! Every command funnels into [`execute`], which returns the structured
//! report plus human-readable summary lines and writes `report.toml` and the
//! command's CSV files into the output directory. Outputs carry no
//! timestamps, so a rerun with the same configuration reproduces the files
//! byte for byte.

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::analysis::{
    build_parent_pipeline, build_pipeline_with, correlation_decay, gap_vs_u_sweep,
    kernel_diagnostics, mixing_bound_verify, mixing_time_with_budget, quasi_locality_profile,
    random_even_observable, spectral_gap, Sector,
};
use crate::config::RunConfig;
use crate::lindblad::{kms_dbc_residual, sector_eigenvalues, top_sector_eigenvalue};
use crate::linalg::hermitian_eigenvalues;
use crate::thirdq::{analytic_ground_vector, expectation_via_parent, split_consistency};
use crate::{algebra, kernels, Error, Result, C64};

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CommandKind {
    Build,
    Gap,
    Mix,
    Sweep,
    Correlations,
    Kernels,
    Validate,
}

impl CommandKind {
    pub fn label(&self) -> &'static str {
        match self {
            CommandKind::Build => "build",
            CommandKind::Gap => "gap",
            CommandKind::Mix => "mix",
            CommandKind::Sweep => "sweep",
            CommandKind::Correlations => "correlations",
            CommandKind::Kernels => "kernels",
            CommandKind::Validate => "validate",
        }
    }
}

/// One named numeric check with its limit. `passed` is `value <= limit`
/// unless the producer says otherwise (e.g. lower bounds).
#[derive(Clone, Debug, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub limit: f64,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub note: String,
}

impl CheckRecord {
    fn upper(name: &str, value: f64, limit: f64) -> Self {
        CheckRecord {
            name: name.into(),
            passed: value <= limit,
            value,
            limit,
            note: String::new(),
        }
    }

    fn lower(name: &str, value: f64, limit: f64) -> Self {
        CheckRecord {
            name: name.into(),
            passed: value >= limit,
            value,
            limit,
            note: "lower bound".into(),
        }
    }

    fn flag(name: &str, passed: bool, note: &str) -> Self {
        CheckRecord {
            name: name.into(),
            passed,
            value: if passed { 1.0 } else { 0.0 },
            limit: 1.0,
            note: note.into(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MetaSection {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub model: String,
    pub modes: usize,
    pub beta: f64,
    pub seed: u64,
    pub method: String,
    pub channels: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct StationarySection {
    pub residual: f64,
    pub dbc_residual: f64,
    pub sigma_min: f64,
    pub log_partition: f64,
    pub generator_top: f64,
    pub even_gap: f64,
    pub dissipator_method_gap: f64,
    pub coherent_method_gap: f64,
    pub coherent_norm: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ParentSection {
    pub hermiticity: f64,
    pub decomposition_residual: f64,
    pub top_eigenvalue: f64,
    pub gap_full: f64,
    pub gap_even: f64,
    pub gap_odd: f64,
    pub degenerate_top: bool,
    pub sector_match_residual: f64,
    pub ground_annihilation: f64,
    pub ground_overlap: f64,
    pub interaction_norm: f64,
    pub split_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expectation_worst: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct MixSection {
    pub gap: f64,
    pub sigma_min: f64,
    pub state_count: usize,
    pub worst_slack: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tail_rate: Option<f64>,
    pub contraction_slack: f64,
    pub epsilon: f64,
    pub empirical_time: f64,
    pub empirical_converged: bool,
    pub budget: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepSection {
    pub beta: f64,
    pub mu: f64,
    pub points: usize,
    pub gap_constant: f64,
    pub envelope_slope: f64,
    pub lsq_slope: f64,
    pub ratio_spread: f64,
    pub endpoint_analytic_gap: f64,
    pub endpoint_rel_err: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CorrelationSection {
    pub modes: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub correlation_length: Option<f64>,
    pub fit_residual: f64,
    pub usable: usize,
    pub monotone: bool,
    pub bound_ok: bool,
    pub below_noise: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct LocalitySection {
    pub omega: f64,
    pub radii: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rate: Option<f64>,
    pub fit_residual: f64,
    pub monotone: bool,
    pub omega_ratio: f64,
    pub omega_ratio_target: f64,
    pub omega_ratio_within_factor_3: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct KernelsSection {
    pub beta: f64,
    pub tilted_filter_worst: f64,
    pub tilt_invariance_spread: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub envelope_rate: Option<f64>,
    pub envelope_fit_residual: f64,
    pub odd_hat_origin: f64,
    pub window_peak_residual: f64,
    pub filter_time_norm_err: f64,
    pub filter_freq_norm_err: f64,
    pub flat_window_residual: f64,
    pub coherent_pairing_residual: f64,
    /// Which closed transform each frequency combination feeds.
    pub coherent_pairing: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub meta: MetaSection,
    pub checks: Vec<CheckRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stationary: Option<StationarySection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parent: Option<ParentSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mixing: Option<MixSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub correlation: Option<CorrelationSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub locality: Option<LocalitySection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kernels: Option<KernelsSection>,
}

impl RunReport {
    fn new(meta: MetaSection) -> Self {
        RunReport {
            meta,
            checks: Vec::new(),
            stationary: None,
            parent: None,
            mixing: None,
            sweep: None,
            correlation: None,
            locality: None,
            kernels: None,
        }
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectraRow {
    pub series: String,
    pub index: usize,
    pub value: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DecayRow {
    pub series: String,
    pub distance: f64,
    pub value: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub u: f64,
    pub beta: f64,
    pub gap: f64,
    pub degenerate_top: bool,
    pub interaction_norm: f64,
    pub ratio: Option<f64>,
    pub mixing_time: f64,
    pub mixing_converged: bool,
    pub seed: u64,
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)
        .map_err(|e| Error::Config(format!("csv open: {e}")))?;
    for row in rows {
        w.serialize(row)
            .map_err(|e| Error::Config(format!("csv write: {e}")))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_report(path: &Path, report: &RunReport) -> Result<()> {
    let text = toml::to_string_pretty(report)
        .map_err(|e| Error::Config(format!("report serialize: {e}")))?;
    std::fs::write(path, text)?;
    Ok(())
}

/// Everything a finished command hands back to the caller.
pub struct RunArtifacts {
    pub report: RunReport,
    pub files: Vec<PathBuf>,
    pub summary: Vec<String>,
}

pub fn execute(cfg: &RunConfig, kind: CommandKind, out_dir: &Path) -> Result<RunArtifacts> {
    cfg.validate()?;
    let model = cfg.build_model()?;
    let meta = MetaSection {
        tool: "gibbslab".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: kind.label().into(),
        model: model.name.clone(),
        modes: model.n_modes(),
        beta: cfg.beta,
        seed: cfg.seed,
        method: format!("{:?}", cfg.method).to_lowercase(),
        channels: cfg.channels_for(model.n_modes()),
    };
    let mut report = RunReport::new(meta);
    let mut summary = Vec::new();
    let mut files = Vec::new();

    if kind == CommandKind::Validate {
        summary.push(format!(
            "configuration ok: model {} on {} modes, beta {}, seed {}",
            report.meta.model, report.meta.modes, cfg.beta, cfg.seed
        ));
        return Ok(RunArtifacts {
            report,
            files,
            summary,
        });
    }

    std::fs::create_dir_all(out_dir)?;
    match kind {
        CommandKind::Build | CommandKind::Gap => {
            run_build(cfg, kind, out_dir, &mut report, &mut summary, &mut files)?
        }
        CommandKind::Mix => run_mix(cfg, out_dir, &mut report, &mut summary, &mut files)?,
        CommandKind::Sweep => run_sweep(cfg, out_dir, &mut report, &mut summary, &mut files)?,
        CommandKind::Correlations => {
            run_correlations(cfg, out_dir, &mut report, &mut summary, &mut files)?
        }
        CommandKind::Kernels => run_kernels(cfg, out_dir, &mut report, &mut summary, &mut files)?,
        CommandKind::Validate => unreachable!(),
    }

    let report_path = out_dir.join("report.toml");
    write_report(&report_path, &report)?;
    files.push(report_path);
    let failed: Vec<&str> = report
        .checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| c.name.as_str())
        .collect();
    if failed.is_empty() {
        summary.push(format!("all {} checks passed", report.checks.len()));
    } else {
        summary.push(format!("failed checks: {}", failed.join(", ")));
    }
    Ok(RunArtifacts {
        report,
        files,
        summary,
    })
}

fn run_build(
    cfg: &RunConfig,
    kind: CommandKind,
    out_dir: &Path,
    report: &mut RunReport,
    summary: &mut Vec<String>,
    files: &mut Vec<PathBuf>,
) -> Result<()> {
    let method = cfg.method.to_method();
    let model = cfg.build_model()?;
    let channels = cfg.channels_for(model.n_modes());
    let p = build_pipeline_with(model, cfg.beta, method, &channels)?;
    let alg = &p.algebra;

    let stat = p.assembled.stationarity_residual(&p.state.sigma, alg);
    let dbc = kms_dbc_residual(&p.assembled.heisenberg, &p.gram)?;
    let top = top_sector_eigenvalue(&p.assembled.heisenberg, &p.gram, alg.basis_len)?;
    let even_idx = algebra::even_indices(alg.basis_len);
    let (even_evs, _) = sector_eigenvalues(&p.assembled.heisenberg, &p.gram, &even_idx)?;
    let odd_idx = algebra::odd_indices(alg.basis_len);
    let (odd_evs, _) = sector_eigenvalues(&p.assembled.heisenberg, &p.gram, &odd_idx)?;
    let m = even_evs.len();
    let even_gap = even_evs[m - 1] - even_evs[m - 2];
    report.stationary = Some(StationarySection {
        residual: stat,
        dbc_residual: dbc,
        sigma_min: p.state.sigma_min,
        log_partition: p.state.log_z,
        generator_top: top,
        even_gap,
        dissipator_method_gap: p.assembled.dissipator_method_gap,
        coherent_method_gap: p.assembled.coherent_method_gap,
        coherent_norm: crate::linalg::spectral_norm(&p.assembled.coherent),
    });
    report.checks.push(CheckRecord::upper("stationarity", stat, 1e-7));
    report
        .checks
        .push(CheckRecord::upper("detailed_balance", dbc, 1e-7));
    report
        .checks
        .push(CheckRecord::upper("left_half_plane", top, 1e-9));

    let pp = build_parent_pipeline(&p, method)?;
    let full = spectral_gap(&pp.parent.total, Sector::Full)?;
    let even = spectral_gap(&pp.parent.total, Sector::Even)?;
    let odd = spectral_gap(&pp.parent.total, Sector::Odd)?;

    // even-sector multiset match between the parent block and the
    // Hermitized generator
    let sub = DMatrix::from_fn(even_idx.len(), even_idx.len(), |r, c| {
        pp.parent.total[(even_idx[r], even_idx[c])]
    });
    let sym = (&sub + sub.adjoint()) * C64::new(0.5, 0.0);
    let parent_even = hermitian_eigenvalues(&sym);
    let sector_match = parent_even
        .iter()
        .zip(&even_evs)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);

    let v_analytic = analytic_ground_vector(&p.state, alg)?;
    let annihilation = (&pp.parent.total * &v_analytic).norm();
    let mut overlap = C64::new(0.0, 0.0);
    for i in 0..v_analytic.len() {
        overlap += v_analytic[i].conj() * pp.ground.vector[i];
    }
    let split_res = split_consistency(&pp.parent, &pp.split);

    let expectation_worst = if kind == CommandKind::Build {
        let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed);
        let mut worst = 0.0f64;
        for _ in 0..20 {
            let x = random_even_observable(alg, &mut rng, None);
            let lhs = (&p.state.sigma * &x).trace();
            let rhs = expectation_via_parent(&x, &pp.ground.vector, alg, &pp.aspace);
            worst = worst.max((lhs - rhs).norm());
        }
        Some(worst)
    } else {
        None
    };

    report.parent = Some(ParentSection {
        hermiticity: pp.parent.hermiticity,
        decomposition_residual: pp.parent.decomposition_residual,
        top_eigenvalue: full.top_eigenvalue,
        gap_full: full.gap,
        gap_even: even.gap,
        gap_odd: odd.gap,
        degenerate_top: full.degenerate_top,
        sector_match_residual: sector_match,
        ground_annihilation: annihilation,
        ground_overlap: overlap.norm(),
        interaction_norm: pp.split.interaction_norm(),
        split_residual: split_res,
        expectation_worst,
    });
    report.checks.push(CheckRecord::upper(
        "parent_hermiticity",
        pp.parent.hermiticity,
        1e-9,
    ));
    report
        .checks
        .push(CheckRecord::upper("sector_match", sector_match, 1e-8));
    report.checks.push(CheckRecord::upper(
        "ground_annihilation",
        annihilation,
        1e-7,
    ));
    report.checks.push(CheckRecord::lower(
        "ground_overlap",
        overlap.norm(),
        1.0 - 1e-8,
    ));
    report
        .checks
        .push(CheckRecord::upper("split_residual", split_res, 1e-9));
    if let Some(w) = expectation_worst {
        report
            .checks
            .push(CheckRecord::upper("expectation_transport", w, 1e-7));
    }

    let mut rows = Vec::new();
    for (i, v) in p.eig.values.iter().enumerate() {
        rows.push(SpectraRow {
            series: "hamiltonian".into(),
            index: i,
            value: *v,
        });
    }
    for (i, v) in pp.ground.eigen.values.iter().enumerate() {
        rows.push(SpectraRow {
            series: "parent".into(),
            index: i,
            value: *v,
        });
    }
    for (i, v) in even_evs.iter().enumerate() {
        rows.push(SpectraRow {
            series: "generator_even".into(),
            index: i,
            value: *v,
        });
    }
    for (i, v) in odd_evs.iter().enumerate() {
        rows.push(SpectraRow {
            series: "generator_odd".into(),
            index: i,
            value: *v,
        });
    }
    let spectra_path = out_dir.join("spectra.csv");
    write_csv(&spectra_path, &rows)?;
    files.push(spectra_path);

    summary.push(format!(
        "model {} at beta {}: stationarity {:.2e}, balance {:.2e}",
        report.meta.model, cfg.beta, stat, dbc
    ));
    summary.push(format!(
        "parent gap {:.6} (even {:.6}, odd {:.6}), ground overlap {:.12}",
        full.gap,
        even.gap,
        odd.gap,
        overlap.norm()
    ));
    Ok(())
}

fn run_mix(
    cfg: &RunConfig,
    out_dir: &Path,
    report: &mut RunReport,
    summary: &mut Vec<String>,
    files: &mut Vec<PathBuf>,
) -> Result<()> {
    let method = cfg.method.to_method();
    let model = cfg.build_model()?;
    let channels = cfg.channels_for(model.n_modes());
    let p = build_pipeline_with(model, cfg.beta, method, &channels)?;
    let bound = mixing_bound_verify(&p, cfg.seed)?;
    let cmp = mixing_time_with_budget(&p, cfg.mixing.epsilon, cfg.seed)?;

    report.mixing = Some(MixSection {
        gap: bound.gap,
        sigma_min: bound.sigma_min,
        state_count: bound.state_count,
        worst_slack: bound.worst_slack,
        tail_rate: bound.tail_rate,
        contraction_slack: bound.contraction_slack,
        epsilon: cfg.mixing.epsilon,
        empirical_time: cmp.estimate.time,
        empirical_converged: cmp.estimate.converged,
        budget: cmp.budget,
    });
    report
        .checks
        .push(CheckRecord::upper("mixing_bound", bound.worst_slack, 1e-7));
    if let Some(rate) = bound.tail_rate {
        report.checks.push(CheckRecord::lower(
            "mixing_tail_rate",
            rate,
            bound.gap - 1e-6,
        ));
    }
    report.checks.push(CheckRecord::upper(
        "kms_contraction",
        bound.contraction_slack,
        1e-7,
    ));
    if cmp.estimate.converged {
        report.checks.push(CheckRecord::upper(
            "mixing_budget",
            cmp.estimate.time,
            cmp.budget,
        ));
    }

    let mut rows = Vec::new();
    for (t, d) in bound.times.iter().zip(&bound.worst_distances) {
        rows.push(DecayRow {
            series: "mixing_distance".into(),
            distance: *t,
            value: *d,
        });
    }
    let decay_path = out_dir.join("decay.csv");
    write_csv(&decay_path, &rows)?;
    files.push(decay_path);

    summary.push(format!(
        "sector gap {:.6}, bound slack {:.2e}, empirical time {:.4} within budget {:.4}",
        bound.gap, bound.worst_slack, cmp.estimate.time, cmp.budget
    ));
    Ok(())
}

fn linspace(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![lo];
    }
    (0..points)
        .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
        .collect()
}

fn run_sweep(
    cfg: &RunConfig,
    out_dir: &Path,
    report: &mut RunReport,
    summary: &mut Vec<String>,
    files: &mut Vec<PathBuf>,
) -> Result<()> {
    let method = cfg.method.to_method();
    let us = linspace(cfg.sweep.u_min, cfg.sweep.u_max, cfg.sweep.points);
    let sweep = gap_vs_u_sweep(&us, cfg.beta, cfg.sweep.mu, method, cfg.seed)?;

    let interacting = sweep.points.iter().filter(|p| p.u > 0.0).count();
    report.sweep = Some(SweepSection {
        beta: cfg.beta,
        mu: cfg.sweep.mu,
        points: sweep.points.len(),
        gap_constant: sweep.gap_constant,
        envelope_slope: sweep.envelope_slope,
        lsq_slope: sweep.lsq_slope,
        ratio_spread: sweep.ratio_spread,
        endpoint_analytic_gap: sweep.endpoint_analytic_gap,
        endpoint_rel_err: sweep.endpoint_rel_err,
    });
    let all_simple = sweep.points.iter().all(|p| !p.degenerate_top);
    report.checks.push(CheckRecord::flag(
        "sweep_top_simple",
        all_simple,
        "top eigenvalue simple at every point",
    ));
    if interacting >= 2 {
        report.checks.push(CheckRecord::upper(
            "sweep_ratio_spread",
            sweep.ratio_spread,
            0.10,
        ));
    }
    report.checks.push(CheckRecord::upper(
        "sweep_endpoint",
        sweep.endpoint_rel_err,
        1e-6,
    ));

    let rows: Vec<SweepRow> = sweep
        .points
        .iter()
        .map(|p| SweepRow {
            u: p.u,
            beta: p.beta,
            gap: p.gap,
            degenerate_top: p.degenerate_top,
            interaction_norm: p.interaction_norm,
            ratio: p.ratio,
            mixing_time: p.mixing_time,
            mixing_converged: p.mixing_converged,
            seed: p.seed,
        })
        .collect();
    let sweep_path = out_dir.join("sweep.csv");
    write_csv(&sweep_path, &rows)?;
    files.push(sweep_path);

    summary.push(format!(
        "{} points, envelope slope {:.6}, ratio spread {:.4}, endpoint err {:.2e}",
        sweep.points.len(),
        sweep.envelope_slope,
        sweep.ratio_spread,
        sweep.endpoint_rel_err
    ));
    Ok(())
}

fn run_correlations(
    cfg: &RunConfig,
    out_dir: &Path,
    report: &mut RunReport,
    summary: &mut Vec<String>,
    files: &mut Vec<PathBuf>,
) -> Result<()> {
    let c = &cfg.correlation;
    let chain = crate::model::spinless_chain(c.modes, c.hopping, c.mu, c.coupling)?;
    let corr = correlation_decay(&chain, cfg.beta)?;

    report.correlation = Some(CorrelationSection {
        modes: c.modes,
        rate: corr.fit.rate,
        correlation_length: corr.fit.rate.map(|r| 1.0 / r),
        fit_residual: corr.fit.fit_residual,
        usable: corr.fit.usable,
        monotone: corr.monotone,
        bound_ok: corr.bound_ok,
        below_noise: corr.below_noise,
    });
    report.checks.push(CheckRecord::flag(
        "correlation_monotone",
        corr.monotone || corr.below_noise,
        "separated occupations decorrelate with distance",
    ));
    report.checks.push(CheckRecord::flag(
        "correlation_bound",
        corr.bound_ok,
        "norm product bound holds",
    ));

    let loc = &cfg.locality;
    let model2 = crate::model::spinless_chain(c.modes, c.hopping, c.mu, c.coupling)?;
    let ql = quasi_locality_profile(&model2, cfg.beta, loc.omega, &loc.radii)?;
    report.locality = Some(LocalitySection {
        omega: loc.omega,
        radii: loc.radii.clone(),
        rate: ql.fit.rate,
        fit_residual: ql.fit.fit_residual,
        monotone: ql.monotone,
        omega_ratio: ql.omega_ratio,
        omega_ratio_target: ql.omega_ratio_target,
        omega_ratio_within_factor_3: ql.omega_ratio_within_factor_3,
    });
    report.checks.push(CheckRecord::flag(
        "locality_monotone",
        ql.monotone,
        "truncation error falls with radius",
    ));
    report.checks.push(CheckRecord::lower(
        "locality_rate",
        ql.fit.rate.unwrap_or(0.0),
        0.0,
    ));

    let mut rows = Vec::new();
    for (d, v) in corr.fit.distances.iter().zip(&corr.fit.values) {
        rows.push(DecayRow {
            series: "correlation".into(),
            distance: *d,
            value: *v,
        });
    }
    for (d, v) in ql.fit.distances.iter().zip(&ql.fit.values) {
        rows.push(DecayRow {
            series: "quasi_locality".into(),
            distance: *d,
            value: *v,
        });
    }
    let decay_path = out_dir.join("decay.csv");
    write_csv(&decay_path, &rows)?;
    files.push(decay_path);

    summary.push(format!(
        "correlation rate {:?}, locality rate {:?}, tilt ratio {:.4} (target {:.4})",
        corr.fit.rate, ql.fit.rate, ql.omega_ratio, ql.omega_ratio_target
    ));
    Ok(())
}

fn run_kernels(
    cfg: &RunConfig,
    out_dir: &Path,
    report: &mut RunReport,
    summary: &mut Vec<String>,
    files: &mut Vec<PathBuf>,
) -> Result<()> {
    let diag = kernel_diagnostics(cfg.beta)?;

    // pairing of the coherent weight against the separable grid quadrature
    let mut quad = kernels::CoherentQuadrature::new(cfg.beta);
    let mut pairing = 0.0f64;
    for &(nu, nup) in &[(0.0, 0.0), (0.7, -0.4), (-1.1, 0.6), (1.5, 1.5)] {
        let closed = kernels::coherent_weight(nu, nup, cfg.beta);
        let grid = quad.weight(nu, nup);
        pairing = pairing.max((closed - grid).norm());
    }

    report.kernels = Some(KernelsSection {
        beta: cfg.beta,
        tilted_filter_worst: diag.tilted_filter_worst,
        tilt_invariance_spread: diag.tilt_invariance_spread,
        envelope_rate: diag.envelope.rate,
        envelope_fit_residual: diag.envelope.fit_residual,
        odd_hat_origin: diag.odd_hat_origin,
        window_peak_residual: diag.window_peak_residual,
        filter_time_norm_err: diag.filter_time_norm_err,
        filter_freq_norm_err: diag.filter_freq_norm_err,
        flat_window_residual: diag.flat_window_residual,
        coherent_pairing_residual: pairing,
        coherent_pairing: "sum frequency feeds the odd transform, difference the shifted one"
            .into(),
    });
    report.checks.push(CheckRecord::upper(
        "filter_closed_form",
        diag.tilted_filter_worst,
        1e-7,
    ));
    report.checks.push(CheckRecord::upper(
        "odd_kernel_origin",
        diag.odd_hat_origin,
        1e-10,
    ));
    report.checks.push(CheckRecord::upper(
        "window_peak",
        diag.window_peak_residual,
        1e-12,
    ));
    report.checks.push(CheckRecord::upper(
        "flat_window_autocorrelation",
        diag.flat_window_residual,
        1e-9,
    ));
    report.checks.push(CheckRecord::flag(
        "envelope_rate_positive",
        diag.envelope_rate_positive,
        "coherent envelope decays with radius",
    ));
    report.checks.push(CheckRecord::upper(
        "coherent_pairing",
        pairing,
        1e-6,
    ));

    let mut rows = Vec::new();
    for (d, v) in diag.envelope.distances.iter().zip(&diag.envelope.values) {
        rows.push(DecayRow {
            series: "kernel_envelope".into(),
            distance: *d,
            value: *v,
        });
    }
    let decay_path = out_dir.join("decay.csv");
    write_csv(&decay_path, &rows)?;
    files.push(decay_path);

    summary.push(format!(
        "filter agreement {:.2e}, pairing {:.2e}, envelope rate {:?}",
        diag.tilted_filter_worst, pairing, diag.envelope.rate
    ));
    Ok(())
}
