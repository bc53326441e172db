//! Parent-Hamiltonian construction on the doubled space: route agreement,
//! calibration, single-mode closed forms, sector correspondence with the
//! generator, and the vectorization-image norm identities.

use gibbslab::algebra::{even_indices, odd_indices, operator_norm, Algebra};
use gibbslab::analysis::{
    build_parent_pipeline, build_pipeline, calibrate_gap_constant, random_even_observable,
    spectral_gap, Sector,
};
use gibbslab::lindblad::{even_sector_gap, sector_eigenvalues, Method};
use gibbslab::linalg::{hermitian_eigenvalues, max_abs, spectral_norm};
use gibbslab::model::{self, canonical_form};
use gibbslab::thirdq::{
    self, analytic_ground_vector, build_parent_explicit, decouple_free_parent,
    expectation_via_parent, naive_vectorization_counterexample, phi_left, phi_right,
    single_mode_closed_form, single_mode_gap, split_consistency, ASpace,
};
use gibbslab::C64;
use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

const C_CAL: f64 = 1.1013906298063674;

#[test]
fn calibration_constant_pinned() {
    let c = calibrate_gap_constant(Method::Closed).unwrap();
    assert!((c - C_CAL).abs() <= 1e-10 * C_CAL, "C = {c}");
    // analytic value sqrt(2) e^{-1/4}
    let analytic = 2.0_f64.sqrt() * (-0.25_f64).exp();
    assert!((c - analytic).abs() <= 1e-12);
}

#[test]
fn both_parent_routes_agree() {
    for (m, beta) in [
        (model::single_mode(0.4).unwrap(), 1.0),
        (model::hubbard_single_site(0.2, 0.3).unwrap(), 1.0),
    ] {
        let p = build_pipeline(m, beta, Method::Closed).unwrap();
        let aspace = ASpace::new(p.algebra.n_modes).unwrap();
        let via_superop =
            thirdq::build_parent_hamiltonian(&p.assembled, &p.state, &p.algebra, &aspace)
                .unwrap();
        let explicit =
            build_parent_explicit(&p.assembled, &p.state, &p.algebra, &aspace).unwrap();
        let diff = max_abs(&(&via_superop.total - explicit));
        assert!(diff <= 1e-9, "route disagreement {diff:e}");
    }
}

#[test]
fn parent_is_hermitian_negative_and_gap_ordered() {
    for (m, beta) in [
        (model::single_mode(0.4).unwrap(), 1.0),
        (model::two_mode_chain(0.7).unwrap(), 1.0),
        (model::hubbard_single_site(0.2, 0.3).unwrap(), 1.0),
    ] {
        let p = build_pipeline(m, beta, Method::Closed).unwrap();
        let pp = build_parent_pipeline(&p, Method::Closed).unwrap();
        assert!(pp.parent.hermiticity <= 1e-9);
        assert!(pp.ground.top_eigenvalue.abs() <= 1e-9);
        let full = spectral_gap(&pp.parent.total, Sector::Full).unwrap();
        let even_gen =
            even_sector_gap(&p.assembled.heisenberg, &p.gram, p.algebra.basis_len).unwrap();
        assert!(
            full.gap <= even_gen + 1e-9,
            "full parent gap {} above even generator gap {even_gen}",
            full.gap
        );
    }
}

#[test]
fn parent_full_gaps_pinned() {
    let cases = [
        (model::single_mode(0.4).unwrap(), 7.7672194531990080e-1),
        (model::two_mode_chain(0.7).unwrap(), 1.0347009612126532),
        (model::hubbard_single_site(0.2, 0.3).unwrap(), 1.0929562415580107),
        (model::hubbard_single_site(0.0, 0.3).unwrap(), 1.0890237516079020),
    ];
    for (m, want) in cases {
        let name = m.name.clone();
        let p = build_pipeline(m, 1.0, Method::Closed).unwrap();
        let pp = build_parent_pipeline(&p, Method::Closed).unwrap();
        let got = spectral_gap(&pp.parent.total, Sector::Full).unwrap().gap;
        assert!(
            (got - want).abs() <= 1e-8 * want,
            "{name}: full gap {got} vs {want}"
        );
    }
}

#[test]
fn sector_spectra_match_generator() {
    for (m, beta) in [
        (model::single_mode(0.4).unwrap(), 1.0),
        (model::hubbard_single_site(0.2, 0.3).unwrap(), 0.5),
    ] {
        let p = build_pipeline(m, beta, Method::Closed).unwrap();
        let pp = build_parent_pipeline(&p, Method::Closed).unwrap();
        let even_idx = even_indices(p.algebra.basis_len);
        let (gen_evs, _) =
            sector_eigenvalues(&p.assembled.heisenberg, &p.gram, &even_idx).unwrap();
        // even block of the parent, in the a-space parity grading
        let par = pp.aspace.parity_diagonal();
        let keep: Vec<usize> = (0..pp.aspace.dim).filter(|&i| par[i] > 0.0).collect();
        let sub = pp.parent.total.select_rows(&keep).select_columns(&keep);
        let mut parent_evs = hermitian_eigenvalues(&sub);
        parent_evs.sort_by(f64::total_cmp);
        assert_eq!(parent_evs.len(), gen_evs.len());
        let range = gen_evs
            .iter()
            .fold(0.0f64, |m, &v| m.max(v.abs()))
            .max(1.0);
        for (a, b) in parent_evs.iter().zip(gen_evs.iter()) {
            assert!(
                (a - b).abs() <= 1e-8 * range,
                "sector eigenvalue mismatch {a} vs {b}"
            );
        }
    }
}

#[test]
fn single_mode_closed_form_matches_built() {
    let aspace = ASpace::new(1).unwrap();
    for (eps, beta) in [(0.3, 1.0), (0.5, 0.5), (1.0, 2.0)] {
        let p = build_pipeline(model::single_mode(eps).unwrap(), beta, Method::Closed).unwrap();
        let pp = build_parent_pipeline(&p, Method::Closed).unwrap();
        let closed = single_mode_closed_form(eps, beta, C_CAL, &aspace);
        let diff = max_abs(&(&pp.parent.total - closed));
        assert!(diff <= 1e-8, "eps={eps} beta={beta}: {diff:e}");
    }
}

#[test]
fn single_mode_gaps_pinned() {
    let table = [
        (0.3, 0.5, 1.0522327764261592),
        (0.3, 1.0, 9.1092826957290307e-1),
        (0.3, 2.0, 4.7249059447190833e-1),
        (0.5, 0.5, 9.6723682869799199e-1),
        (0.5, 1.0, 6.2522382132268173e-1),
        (0.5, 2.0, 7.5893543629994203e-2),
        (1.0, 0.5, 6.2522382132268173e-1),
        (1.0, 1.0, 7.5893543629994203e-2),
        (1.0, 2.0, 3.3847240243912825e-6),
    ];
    for (eps, beta, want) in table {
        let got = single_mode_gap(eps, beta, C_CAL);
        assert!(
            (got - want).abs() <= 1e-12 + 1e-12 * want,
            "gap({eps},{beta}) = {got} vs {want}"
        );
    }
}

#[test]
fn free_parent_decouples_into_mode_sum() {
    let m = model::two_mode_chain(0.7).unwrap();
    let canon = canonical_form(&m.free_h).unwrap();
    let p = build_pipeline(m, 1.0, Method::Closed).unwrap();
    let pp = build_parent_pipeline(&p, Method::Closed).unwrap();
    let (direct_sum, predicted_gap) =
        decouple_free_parent(&canon, 1.0, C_CAL, &pp.aspace);
    let diff = max_abs(&(&pp.free_parent.total - direct_sum));
    assert!(diff <= 1e-8, "decoupled free parent residual {diff:e}");
    let full = spectral_gap(&pp.parent.total, Sector::Full).unwrap();
    assert!((full.gap - predicted_gap).abs() <= 1e-8 * predicted_gap);
}

#[test]
fn free_model_has_zero_coherent_parent() {
    for m in [
        model::single_mode(0.4).unwrap(),
        model::two_mode_chain(0.7).unwrap(),
    ] {
        let p = build_pipeline(m, 1.0, Method::Closed).unwrap();
        let pp = build_parent_pipeline(&p, Method::Closed).unwrap();
        let norm = spectral_norm(&pp.split.c_free);
        assert!(norm <= 1e-8, "free coherent image norm {norm:e}");
    }
}

#[test]
fn split_reassembles_total() {
    let m = model::hubbard_single_site(0.2, 0.3).unwrap();
    let p = build_pipeline(m, 1.0, Method::Closed).unwrap();
    let pp = build_parent_pipeline(&p, Method::Closed).unwrap();
    let res = split_consistency(&pp.parent, &pp.split);
    assert!(res <= 1e-9, "split residual {res:e}");
    assert!(pp.split.interaction_norm() > 0.0);
}

#[test]
fn ground_vector_encodes_thermal_state() {
    for (m, beta) in [
        (model::single_mode(0.4).unwrap(), 1.0),
        (model::hubbard_single_site(0.2, 0.3).unwrap(), 2.0),
    ] {
        let p = build_pipeline(m, beta, Method::Closed).unwrap();
        let pp = build_parent_pipeline(&p, Method::Closed).unwrap();
        let v_analytic = analytic_ground_vector(&p.state, &p.algebra).unwrap();
        // the purification is annihilated by the parent
        let img = &pp.parent.total * &v_analytic;
        assert!(img.norm() <= 1e-7, "annihilation residual {:e}", img.norm());
        // and matches the computed top eigenvector up to phase
        let overlap = pp.ground.vector.dotc(&v_analytic).norm()
            / (pp.ground.vector.norm() * v_analytic.norm());
        assert!(overlap >= 1.0 - 1e-8, "overlap {overlap}");
    }
}

#[test]
fn parent_transports_expectations() {
    let m = model::hubbard_single_site(0.2, 0.3).unwrap();
    let p = build_pipeline(m, 1.0, Method::Closed).unwrap();
    let pp = build_parent_pipeline(&p, Method::Closed).unwrap();
    let v = analytic_ground_vector(&p.state, &p.algebra).unwrap();
    let mut rng = ChaCha20Rng::seed_from_u64(11);
    for _ in 0..20 {
        let x = random_even_observable(&p.algebra, &mut rng, None);
        let lhs = (&p.state.sigma * &x).trace().re;
        let rhs = expectation_via_parent(&x, &v, &p.algebra, &pp.aspace);
        assert!((lhs - rhs.re).abs() <= 1e-7, "{lhs} vs {}", rhs.re);
        assert!(rhs.im.abs() <= 1e-9);
    }
}

#[test]
fn naive_image_anticommutes_corrected_commutes() {
    let r = naive_vectorization_counterexample().unwrap();
    assert!(r.superop_commutator <= 1e-13);
    assert!(r.naive_anticommutator <= 1e-13);
    assert!(r.corrected_commutator <= 1e-13);
}

fn random_homogeneous(alg: &Algebra, odd: bool, rng: &mut ChaCha20Rng) -> DMatrix<C64> {
    let idx = if odd {
        odd_indices(alg.basis_len)
    } else {
        even_indices(alg.basis_len)
    };
    let mut coords: DVector<C64> = DVector::zeros(alg.basis_len);
    for i in idx {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        coords[i] = C64::new(re, im);
    }
    alg.devectorize(&coords)
}

#[test]
fn image_norms_track_operator_norms() {
    let alg = Algebra::new(2).unwrap();
    let aspace = ASpace::new(2).unwrap();
    let mut rng = ChaCha20Rng::seed_from_u64(5);
    for odd in [false, true] {
        for _ in 0..25 {
            let a = random_homogeneous(&alg, odd, &mut rng);
            let na = operator_norm(&a);
            let nl = spectral_norm(&phi_left(&a, &alg, &aspace));
            let nr = spectral_norm(&phi_right(&a, &alg, &aspace));
            assert!((nl - na).abs() <= 1e-10, "left image norm {nl} vs {na}");
            assert!(nr <= na + 1e-10, "right image norm {nr} vs {na}");
        }
    }
}
