//! Acceptance gate for the whole pipeline. Each test covers one numbered
//! criterion and prints a single pass/fail line (visible with --nocapture, or
//! on failure). Tolerances are the contract; loosening them is a bug.

use std::collections::HashMap;
use std::sync::OnceLock;
use std::time::Instant;

use gibbslab::algebra::{even_indices, odd_indices, operator_norm, Algebra};
use gibbslab::analysis::{
    build_parent_pipeline, build_pipeline, calibrate_gap_constant, correlation_decay,
    gap_vs_u_sweep, kernel_diagnostics, mixing_bound_verify, quasi_locality_profile,
    random_even_observable, spectral_gap, ModelPipeline, ParentPipeline, Sector,
};
use gibbslab::kernels;
use gibbslab::lindblad::{
    assemble_lindbladian_with, bohr_channel, coherent_term, dissipator_coefficients,
    even_sector_gap, kms_dbc_residual, sector_eigenvalues, Method,
};
use gibbslab::linalg::{hermitian_eigenvalues, max_abs, spectral_norm};
use gibbslab::model::{self, canonical_form};
use gibbslab::spectral::{gibbs_state, hamiltonian_eigen, kms_gram};
use gibbslab::thirdq::{
    analytic_ground_vector, decouple_free_parent, expectation_via_parent,
    naive_vectorization_counterexample, phi_left, phi_right, single_mode_gap, ASpace,
};
use gibbslab::C64;
use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

struct Case {
    label: String,
    beta: f64,
    p: ModelPipeline,
    pp: ParentPipeline,
}

static CASES: OnceLock<Vec<Case>> = OnceLock::new();

fn cases() -> &'static [Case] {
    CASES.get_or_init(|| {
        let mut out = Vec::new();
        for beta in [0.5, 1.0, 2.0] {
            let models = [
                model::single_mode(0.4).unwrap(),
                model::two_mode_chain(0.7).unwrap(),
                model::hubbard_single_site(0.0, 0.3).unwrap(),
                model::hubbard_single_site(0.2, 0.3).unwrap(),
            ];
            for m in models {
                let label = format!("{} beta={beta}", m.name);
                let p = build_pipeline(m, beta, Method::Closed).unwrap();
                let pp = build_parent_pipeline(&p, Method::Closed).unwrap();
                out.push(Case { label, beta, p, pp });
            }
        }
        out
    })
}

fn verdict(n: u32, label: &str, pass: bool, detail: &str) {
    let line = format!(
        "criterion {n} ({label}): {}; {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    println!("{line}");
    assert!(pass, "{line}");
}

#[test]
fn criterion_01_algebra_exactness() {
    let t0 = Instant::now();
    let mut worst = 0.0f64;
    let alg = Algebra::new(6).unwrap();
    let gammas = alg.gammas_dense();
    let id = DMatrix::<C64>::identity(alg.dim, alg.dim);
    for j in 0..gammas.len() {
        for k in j..gammas.len() {
            let ac = &gammas[j] * &gammas[k] + &gammas[k] * &gammas[j];
            let target = if j == k {
                id.scale(2.0)
            } else {
                DMatrix::zeros(alg.dim, alg.dim)
            };
            worst = worst.max(operator_norm(&(ac - target)));
        }
    }
    let aspace = ASpace::new(3).unwrap();
    let aid = DMatrix::<C64>::identity(aspace.dim, aspace.dim);
    for j in 1..=12 {
        for k in j..=12 {
            let ac = aspace.hat(j) * aspace.hat(k) + aspace.hat(k) * aspace.hat(j);
            let target = if j == k {
                aid.scale(2.0)
            } else {
                DMatrix::zeros(aspace.dim, aspace.dim)
            };
            worst = worst.max(operator_norm(&(ac - target)));
        }
    }
    let elapsed = t0.elapsed().as_secs_f64();
    verdict(
        1,
        "algebra exactness",
        worst <= 1e-13 && elapsed < 10.0,
        &format!("worst anticommutator residual {worst:.2e}, {elapsed:.1}s"),
    );
}

#[test]
fn criterion_02_thermal_stationarity() {
    let t0 = Instant::now();
    let mut worst = 0.0f64;
    for c in cases() {
        let r = c.p.assembled.stationarity_residual(&c.p.state.sigma, &c.p.algebra);
        worst = worst.max(r);
    }
    let elapsed = t0.elapsed().as_secs_f64();
    verdict(
        2,
        "thermal stationarity",
        worst <= 1e-7 && elapsed < 120.0,
        &format!("worst Frobenius residual {worst:.2e} over {} cases, {elapsed:.1}s", cases().len()),
    );
}

#[test]
fn criterion_03_detailed_balance() {
    let mut worst = 0.0f64;
    for c in cases() {
        let dbc = kms_dbc_residual(&c.p.assembled.heisenberg, &c.p.gram).unwrap();
        worst = worst.max(dbc);
    }
    // negative control: doubling the coherent correction must break the symmetry
    let m = model::hubbard_two_site(0.2, 0.3, 1.0).unwrap();
    let alg = Algebra::new(m.n_modes()).unwrap();
    let eig = hamiltonian_eigen(&m.dense(&alg).unwrap()).unwrap();
    let channels: Vec<usize> = (1..=2 * m.n_modes()).collect();
    let bad = assemble_lindbladian_with(&eig, &alg, 1.0, Method::Closed, &channels, 2.0).unwrap();
    let state = gibbs_state(&eig, 1.0).unwrap();
    let gram = kms_gram(&state, &alg).unwrap();
    let control = kms_dbc_residual(&bad.heisenberg, &gram).unwrap();
    verdict(
        3,
        "detailed balance",
        worst <= 1e-7 && control > 1e-3,
        &format!("worst residual {worst:.2e}, doubled-correction control {control:.2e}"),
    );
}

#[test]
fn criterion_04_sector_spectrum_transport() {
    let mut worst = 0.0f64;
    for c in cases() {
        let even_idx = even_indices(c.p.algebra.basis_len);
        let (gen_evs, _) =
            sector_eigenvalues(&c.p.assembled.heisenberg, &c.p.gram, &even_idx).unwrap();
        let par = c.pp.aspace.parity_diagonal();
        let keep: Vec<usize> = (0..c.pp.aspace.dim).filter(|&i| par[i] > 0.0).collect();
        let sub = c.pp.parent.total.select_rows(&keep).select_columns(&keep);
        let mut parent_evs = hermitian_eigenvalues(&sub);
        parent_evs.sort_by(f64::total_cmp);
        assert_eq!(parent_evs.len(), gen_evs.len(), "{}", c.label);
        for (a, b) in parent_evs.iter().zip(gen_evs.iter()) {
            worst = worst.max((a - b).abs());
        }
    }
    verdict(
        4,
        "sector spectrum transport",
        worst <= 1e-8,
        &format!("worst even-sector multiset deviation {worst:.2e}"),
    );
}

#[test]
fn criterion_05_parent_hermiticity_and_gap_order() {
    let mut worst_herm = 0.0f64;
    let mut worst_excess = f64::NEG_INFINITY;
    for c in cases() {
        worst_herm = worst_herm.max(c.pp.parent.hermiticity);
        let full = spectral_gap(&c.pp.parent.total, Sector::Full).unwrap();
        let even_gen =
            even_sector_gap(&c.p.assembled.heisenberg, &c.p.gram, c.p.algebra.basis_len).unwrap();
        worst_excess = worst_excess.max(full.gap - even_gen);
    }
    verdict(
        5,
        "parent hermiticity and gap order",
        worst_herm <= 1e-9 && worst_excess <= 1e-9,
        &format!("worst hermiticity {worst_herm:.2e}, worst gap excess {worst_excess:.2e}"),
    );
}

#[test]
fn criterion_06_free_sector_closed_forms() {
    let t0 = Instant::now();
    // (a) the free part of the coherent image vanishes
    let mut worst_free = 0.0f64;
    for c in cases() {
        worst_free = worst_free.max(spectral_norm(&c.pp.split.c_free));
    }
    // (b) calibrated single-mode gap against the closed form
    let c_cal = calibrate_gap_constant(Method::Closed).unwrap();
    let mut worst_rel = 0.0f64;
    for eps in [0.3, 0.5, 1.0] {
        for beta in [0.5, 1.0, 2.0] {
            let p = build_pipeline(model::single_mode(eps).unwrap(), beta, Method::Closed).unwrap();
            let pp = build_parent_pipeline(&p, Method::Closed).unwrap();
            let got = spectral_gap(&pp.parent.total, Sector::Full).unwrap().gap;
            let want = single_mode_gap(eps, beta, c_cal);
            worst_rel = worst_rel.max((got - want).abs() / want);
        }
    }
    // (c) multi-mode free parents decouple into sums of single-mode forms
    let mut worst_sum = 0.0f64;
    for c in cases() {
        if !c.p.model.is_free() || c.p.algebra.n_modes < 2 {
            continue;
        }
        let canon = canonical_form(&c.p.model.free_h).unwrap();
        let (direct, _) = decouple_free_parent(&canon, c.beta, c_cal, &c.pp.aspace);
        worst_sum = worst_sum.max(max_abs(&(&c.pp.free_parent.total - direct)));
    }
    let elapsed = t0.elapsed().as_secs_f64();
    verdict(
        6,
        "free sector closed forms",
        worst_free <= 1e-8 && worst_rel <= 1e-6 && worst_sum <= 1e-8 && elapsed < 120.0,
        &format!(
            "free coherent norm {worst_free:.2e}, gap relative error {worst_rel:.2e}, decoupling residual {worst_sum:.2e}, {elapsed:.1}s"
        ),
    );
}

#[test]
fn criterion_07_mixing_bound() {
    let mut worst_slack = f64::NEG_INFINITY;
    let mut worst_margin = f64::INFINITY;
    let mut states = usize::MAX;
    for (i, c) in cases().iter().enumerate() {
        if (c.beta - 1.0).abs() > 1e-12 {
            continue;
        }
        let rep = mixing_bound_verify(&c.p, 20240917 + i as u64).unwrap();
        worst_slack = worst_slack.max(rep.worst_slack);
        let rate = rep.tail_rate.expect("tail rate should be measurable");
        worst_margin = worst_margin.min(rate - rep.gap);
        states = states.min(rep.state_count);
    }
    verdict(
        7,
        "mixing bound",
        worst_slack <= 1e-7 && worst_margin >= -1e-6 && states >= 11,
        &format!(
            "worst bound slack {worst_slack:.2e}, worst rate margin {worst_margin:.2e}, >= {states} probe states"
        ),
    );
}

#[test]
fn criterion_08_ground_state_expectations() {
    let mut worst = 0.0f64;
    let mut rng = ChaCha20Rng::seed_from_u64(8);
    for c in cases() {
        let v = analytic_ground_vector(&c.p.state, &c.p.algebra).unwrap();
        for _ in 0..20 {
            let x = random_even_observable(&c.p.algebra, &mut rng, None);
            let lhs = (&c.p.state.sigma * &x).trace().re;
            let rhs = expectation_via_parent(&x, &v, &c.p.algebra, &c.pp.aspace);
            worst = worst.max((lhs - rhs.re).abs().max(rhs.im.abs()));
        }
    }
    verdict(
        8,
        "ground state expectations",
        worst <= 1e-7,
        &format!("worst deviation {worst:.2e} over 20 observables per case"),
    );
}

#[test]
fn criterion_09_vectorization_counterexample() {
    let r = naive_vectorization_counterexample().unwrap();
    let worst = r
        .superop_commutator
        .max(r.naive_anticommutator)
        .max(r.corrected_commutator);
    verdict(
        9,
        "vectorization counterexample",
        worst <= 1e-13,
        &format!(
            "superoperator commutator {:.2e}, naive-image anticommutator {:.2e}, corrected commutator {:.2e}",
            r.superop_commutator, r.naive_anticommutator, r.corrected_commutator
        ),
    );
}

#[test]
fn criterion_10_image_norm_preservation() {
    let alg = Algebra::new(2).unwrap();
    let aspace = ASpace::new(2).unwrap();
    let mut rng = ChaCha20Rng::seed_from_u64(10);
    let mut worst_left = 0.0f64;
    let mut worst_right = f64::NEG_INFINITY;
    for odd in [false, true] {
        let idx = if odd {
            odd_indices(alg.basis_len)
        } else {
            even_indices(alg.basis_len)
        };
        for _ in 0..100 {
            let mut coords: DVector<C64> = DVector::zeros(alg.basis_len);
            for &i in &idx {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                coords[i] = C64::new(re, im);
            }
            let a = alg.devectorize(&coords);
            let na = operator_norm(&a);
            let nl = spectral_norm(&phi_left(&a, &alg, &aspace));
            let nr = spectral_norm(&phi_right(&a, &alg, &aspace));
            worst_left = worst_left.max((nl - na).abs());
            worst_right = worst_right.max(nr - na);
        }
    }
    verdict(
        10,
        "image norm preservation",
        worst_left <= 1e-10 && worst_right <= 1e-10,
        &format!(
            "left-image norm deviation {worst_left:.2e}, right-image norm excess {worst_right:.2e}, 100 draws per parity"
        ),
    );
}

#[test]
fn criterion_11_dual_method_agreement() {
    let m = model::hubbard_two_site(0.2, 0.3, 1.0).unwrap();
    let alg = Algebra::new(m.n_modes()).unwrap();
    let eig = hamiltonian_eigen(&m.dense(&alg).unwrap()).unwrap();
    let beta = 1.0;
    let channels: Vec<_> = (1..=2 * m.n_modes())
        .map(|j| bohr_channel(j, &eig, &alg))
        .collect();
    let cache = HashMap::new();
    let mut worst_g = 0.0f64;
    for ch in &channels {
        let (_, gap) =
            dissipator_coefficients(&ch.frequencies, beta, Method::Both, &cache).unwrap();
        worst_g = worst_g.max(gap);
    }
    let (_, coherent_gap) = coherent_term(&channels, beta, Method::Both).unwrap();
    verdict(
        11,
        "dual method agreement",
        worst_g <= 1e-8 && coherent_gap <= 1e-6,
        &format!(
            "dissipator closed vs quadrature {worst_g:.2e}, coherent closed vs grid {coherent_gap:.2e}; winning pairing: sum frequency feeds the odd transform, difference the shifted one"
        ),
    );
}

#[test]
fn criterion_12_interaction_sweep_stability() {
    let t0 = Instant::now();
    let us: Vec<f64> = (0..7).map(|i| 0.3 * i as f64 / 6.0).collect();
    let sweep = gap_vs_u_sweep(&us, 1.0, 0.3, Method::Closed, 424242).unwrap();
    let simple_top = sweep.points.iter().all(|pt| !pt.degenerate_top);
    // direct check that the top eigenvalue itself stays pinned at zero
    let mut worst_top = 0.0f64;
    for &u in &us {
        let p = build_pipeline(model::hubbard_single_site(u, 0.3).unwrap(), 1.0, Method::Closed)
            .unwrap();
        let pp = build_parent_pipeline(&p, Method::Closed).unwrap();
        worst_top = worst_top.max(pp.ground.top_eigenvalue.abs());
    }
    let gap0 = sweep.points[0].gap;
    let envelope_ok = sweep
        .points
        .iter()
        .skip(1)
        .all(|pt| (pt.gap - gap0).abs() <= sweep.envelope_slope * pt.u + 1e-12);
    let elapsed = t0.elapsed().as_secs_f64();
    verdict(
        12,
        "interaction sweep stability",
        simple_top
            && worst_top <= 1e-9
            && envelope_ok
            && sweep.ratio_spread <= 0.10
            && elapsed < 300.0,
        &format!(
            "top eigenvalue magnitude {worst_top:.2e}, envelope slope {:.4}, least-squares slope {:.4}, interaction-ratio spread {:.3}, {elapsed:.1}s",
            sweep.envelope_slope, sweep.lsq_slope, sweep.ratio_spread
        ),
    );
}

#[test]
fn criterion_13_decay_diagnostics() {
    let chain = model::spinless_chain(5, 1.0, 0.3, 0.1).unwrap();
    let qloc = quasi_locality_profile(&chain, 1.0, 0.3, &[1.0, 2.0, 3.0]).unwrap();
    let qloc_rate = qloc.fit.rate.unwrap_or(0.0);
    let corr = correlation_decay(&chain, 1.0).unwrap();
    let kern = kernel_diagnostics(1.0).unwrap();
    let origin = kernels::odd_kernel_hat(0.0).norm();
    verdict(
        13,
        "decay diagnostics",
        qloc.monotone
            && qloc_rate > 0.0
            && (corr.monotone || corr.below_noise)
            && kern.tilted_filter_worst <= 1e-7
            && origin <= 1e-10,
        &format!(
            "locality rate {qloc_rate:.3}, correlation rate {:.3}, tilted filter closed vs quadrature {:.2e}, odd kernel at origin {origin:.2e}",
            corr.fit.rate.unwrap_or(0.0),
            kern.tilted_filter_worst
        ),
    );
}
