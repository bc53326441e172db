//! Pinned numeric values for the closed-form kernels. The literals were
//! produced by an independent quadrature implementation and guard against
//! silent changes in constants or argument conventions.

use gibbslab::kernels::{
    self, coherent_weight, dissipator_coefficient, dissipator_coefficient_quadrature, f_hat,
    odd_kernel_hat, shift_kernel_hat, thermal_window, tilted_filter_closed,
    tilted_filter_quadrature, CoherentQuadrature,
};

const TOL: f64 = 1e-12;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

#[test]
fn odd_kernel_hat_pinned() {
    let cases = [
        (0.7, 1.4440440444654770e-1),
        (-1.3, -2.2529876983085537e-1),
        (2.5, 2.2502564982159828e-1),
    ];
    for (w, want) in cases {
        let got = odd_kernel_hat(w);
        assert!(got.re.abs() < 1e-15, "odd kernel must be purely imaginary");
        assert!(close(got.im, want, TOL), "odd_hat({w}): {} vs {want}", got.im);
    }
    assert!(odd_kernel_hat(0.0).norm() < 1e-15);
}

#[test]
fn shift_kernel_hat_pinned() {
    let cases = [
        (0.0, 2.4724446692818779e-2),
        (0.7, 2.0129119516076502e-2),
        (-2.0, 3.1746817967120484e-2),
    ];
    for (w, want) in cases {
        assert!(close(shift_kernel_hat(w), want, TOL));
    }
}

#[test]
fn filter_hat_pinned() {
    assert!(close(f_hat(0.0, 1.3), 7.2015620841721728e-1, TOL));
    assert!(close(f_hat(1.1, 1.3), 4.3192119154086556e-1, TOL));
    // evenness
    assert!(close(f_hat(1.1, 1.3), f_hat(-1.1, 1.3), 1e-15));
}

#[test]
fn window_pinned() {
    assert!(close(thermal_window(0.7, 0.9), 2.6488751892235918e-1, TOL));
    // peak value 1 at omega = -1/beta
    for beta in [0.5, 1.0, 2.0] {
        assert!(close(thermal_window(-1.0 / beta, beta), 1.0, 1e-15));
    }
}

#[test]
fn dissipator_coefficient_pinned() {
    let cases = [
        (0.0, 0.0, 1.0, 5.5069531490318369e-1),
        (0.5, -0.5, 1.0, 4.8598690966990804e-1),
        (1.2, 0.4, 0.5, 4.2461449585069405e-1),
        (-2.0, 1.0, 2.0, 7.8552467843690157e-3),
        (3.0, 3.0, 1.7, 6.4485279160550677e-5),
    ];
    for (nu, nup, beta, want) in cases {
        assert!(
            close(dissipator_coefficient(nu, nup, beta), want, TOL),
            "g({nu},{nup};{beta})"
        );
        // symmetric in its two frequencies
        assert!(close(
            dissipator_coefficient(nup, nu, beta),
            dissipator_coefficient(nu, nup, beta),
            1e-15
        ));
    }
}

#[test]
fn dissipator_quadrature_matches_closed() {
    for (nu, nup, beta) in [
        (0.0, 0.0, 1.0),
        (0.5, -0.5, 1.0),
        (1.2, 0.4, 0.5),
        (-2.0, 1.0, 2.0),
    ] {
        let q = dissipator_coefficient_quadrature(nu, nup, beta);
        let c = dissipator_coefficient(nu, nup, beta);
        assert!(close(q, c, 1e-8), "quadrature {q} vs closed {c}");
    }
}

#[test]
fn tilted_filter_pinned() {
    let a = tilted_filter_closed(0.7, 1.1, 1.0);
    assert!(close(a.re, 4.0400918586210527e-1, TOL));
    assert!(close(a.im, -1.8041941085280661e-1, TOL));
    let b = tilted_filter_closed(-1.2, 0.5, 0.5);
    assert!(close(b.re, 3.2853330225317938e-3, TOL));
    assert!(close(b.im, -2.2476172483744668e-3, TOL));
}

#[test]
fn tilted_filter_quadrature_agrees() {
    for (t, om, beta) in [(0.0, 0.0, 1.0), (0.7, 1.1, 1.0), (0.3, -2.0, 2.0)] {
        let c = tilted_filter_closed(t, om, beta);
        let q = tilted_filter_quadrature(t, om, beta);
        assert!((c - q).norm() < 1e-7, "({t},{om},{beta}): {:e}", (c - q).norm());
    }
}

#[test]
fn coherent_weight_matches_grid_quadrature() {
    let beta = 1.0;
    let mut grid = CoherentQuadrature::new(beta);
    for (nu, nup) in [(0.0, 0.0), (0.7, -0.4), (-1.1, 0.6), (1.5, 1.5), (0.3, 2.1)] {
        let closed = coherent_weight(nu, nup, beta);
        let quad = grid.weight(nu, nup);
        assert!(
            (closed - quad).norm() < 1e-6,
            "weight({nu},{nup}): {:e}",
            (closed - quad).norm()
        );
    }
}

#[test]
fn flat_window_recovers_autocorrelation() {
    // with the thermal window replaced by 1 the double integral collapses to
    // the filter autocorrelation e^{-beta^2 (nu - nup)^2 / 8}
    for beta in [0.7, 1.0] {
        for (nu, nup) in [(0.0, 0.0), (0.4, -0.3), (1.0, 0.5)] {
            let q = kernels::dissipator_quadrature_with_window(nu, nup, beta, |_| 1.0);
            let ident = (-beta * beta * (nu - nup) * (nu - nup) / 8.0).exp();
            assert!(close(q, ident, 1e-9));
        }
    }
}

#[test]
fn filter_norms_are_unit() {
    for beta in [0.5, 1.0, 2.0] {
        assert!(kernels::filter_time_norm_residual(beta) < 1e-9);
        assert!(kernels::filter_freq_norm_residual(beta) < 1e-9);
    }
}

#[test]
fn bundle_invariants() {
    for beta in [0.5, 1.0, 1.7] {
        let b = kernels::KernelBundle::new(beta);
        let [peak, origin, even] = b.invariant_residuals();
        assert!(peak < 1e-12);
        assert!(origin < 1e-10);
        assert!(even < 1e-12);
    }
}
