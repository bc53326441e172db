//! Exactness of the Majorana representations: anticommutation relations,
//! orthonormality under the scaled trace inner product, and agreement between
//! the phase-permutation fast path and dense matrix arithmetic.

use gibbslab::algebra::{
    left_gamma_product, mask_product, operator_norm, right_gamma_product, Algebra,
    MajoranaMonomial, PhasePerm,
};
use gibbslab::thirdq::ASpace;
use gibbslab::C64;
use nalgebra::DMatrix;
use proptest::prelude::*;

fn anticommutator(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    a * b + b * a
}

#[test]
fn source_gammas_anticommute_n6() {
    let alg = Algebra::new(6).unwrap();
    let gammas = alg.gammas_dense();
    let id = DMatrix::<C64>::identity(alg.dim, alg.dim);
    let mut worst = 0.0f64;
    for j in 0..gammas.len() {
        for k in j..gammas.len() {
            let ac = anticommutator(&gammas[j], &gammas[k]);
            let target = if j == k {
                id.scale(2.0)
            } else {
                DMatrix::zeros(alg.dim, alg.dim)
            };
            let r = operator_norm(&(ac - target).map(|z| z));
            worst = worst.max(r);
        }
    }
    assert!(worst <= 1e-13, "worst anticommutator residual {worst:e}");
}

#[test]
fn hat_gammas_anticommute_n3() {
    let aspace = ASpace::new(3).unwrap();
    let id = DMatrix::<C64>::identity(aspace.dim, aspace.dim);
    let mut worst = 0.0f64;
    for j in 1..=12 {
        for k in j..=12 {
            let ac = anticommutator(aspace.hat(j), aspace.hat(k));
            let target = if j == k {
                id.scale(2.0)
            } else {
                DMatrix::zeros(aspace.dim, aspace.dim)
            };
            worst = worst.max(operator_norm(&(ac - target)));
        }
    }
    assert!(worst <= 1e-13, "worst hat anticommutator residual {worst:e}");
    // each hat is Hermitian and squares to the identity
    for j in 1..=12 {
        let h = aspace.hat(j);
        assert!(operator_norm(&(h - h.adjoint())) <= 1e-14);
    }
}

#[test]
fn monomials_are_orthonormal() {
    let alg = Algebra::new(3).unwrap();
    // all 64 monomials over 6 gammas
    for a in 0u64..64 {
        let pa = alg.monomial(a);
        for b in 0u64..64 {
            let pb = alg.monomial(b);
            let inner = pa.scaled_inner(&pb.to_dense());
            let want = if a == b { 1.0 } else { 0.0 };
            assert!(
                (inner - C64::new(want, 0.0)).norm() <= 1e-13,
                "<m_{a}, m_{b}> = {inner}"
            );
        }
    }
}

#[test]
fn phase_perm_matches_dense_products() {
    let alg = Algebra::new(3).unwrap();
    for a in 0u64..64 {
        let pa = alg.monomial(a);
        let da = pa.to_dense();
        for b in [0u64, 1, 5, 9, 21, 42, 63] {
            let pb = alg.monomial(b);
            let fast = pa.matmul(&pb).to_dense();
            let slow = &da * pb.to_dense();
            assert!(operator_norm(&(fast - slow)) <= 1e-13);
        }
    }
}

#[test]
fn mask_product_sign_rule() {
    let alg = Algebra::new(3).unwrap();
    for a in [0u64, 3, 7, 12, 33, 63] {
        for b in [0u64, 1, 6, 25, 63] {
            let (sign, mask) = mask_product(a, b);
            let dense = alg.monomial(a).to_dense() * alg.monomial(b).to_dense();
            let expect = alg.monomial(mask).to_dense().scale(sign as f64);
            assert!(operator_norm(&(dense - expect)) <= 1e-13);
        }
    }
}

#[test]
fn monomial_parity_and_degree() {
    let m = MajoranaMonomial::from_indices(&[1, 4, 5]).unwrap();
    assert_eq!(m.degree(), 3);
    assert_eq!(m.parity(), 1);
    assert_eq!(m.indices(), vec![1, 4, 5]);
    let even = MajoranaMonomial::from_indices(&[2, 3]).unwrap();
    assert_eq!(even.parity(), 0);
}

#[test]
fn identity_phase_perm_is_neutral() {
    let alg = Algebra::new(2).unwrap();
    let id = PhasePerm::identity(alg.dim);
    for a in 0u64..16 {
        let p = alg.monomial(a);
        assert!(operator_norm(&(id.matmul(&p).to_dense() - p.to_dense())) == 0.0);
        assert!(operator_norm(&(p.matmul(&id).to_dense() - p.to_dense())) == 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn left_gamma_matches_dense(j in 1usize..=6, mask in 0u64..64) {
        let alg = Algebra::new(3).unwrap();
        let (sign, out) = left_gamma_product(j, mask);
        let dense = alg.gamma_dense(j) * alg.monomial(mask).to_dense();
        let expect = alg.monomial(out).to_dense().scale(sign as f64);
        prop_assert!(operator_norm(&(dense - expect)) <= 1e-13);
    }

    #[test]
    fn right_gamma_matches_dense(j in 1usize..=6, mask in 0u64..64) {
        let alg = Algebra::new(3).unwrap();
        let (sign, out) = right_gamma_product(mask, j);
        let dense = alg.monomial(mask).to_dense() * alg.gamma_dense(j);
        let expect = alg.monomial(out).to_dense().scale(sign as f64);
        prop_assert!(operator_norm(&(dense - expect)) <= 1e-13);
    }

    #[test]
    fn mask_product_associates(a in 0u64..64, b in 0u64..64, c in 0u64..64) {
        let (s1, ab) = mask_product(a, b);
        let (s2, abc_l) = mask_product(ab, c);
        let (s3, bc) = mask_product(b, c);
        let (s4, abc_r) = mask_product(a, bc);
        prop_assert_eq!(abc_l, abc_r);
        prop_assert_eq!(s1 * s2, s3 * s4);
    }
}
