//! Scalar kernels behind the thermal jump construction: the Gaussian time
//! filter, the frequency weighting window, the two convolution kernels of the
//! coherent correction, and the dissipator coefficient in closed form with
//! quadrature cross-checks.
//!
//! Fourier convention throughout: ĝ(ω) = (2π)^{−1/2} ∫ e^{−iωt} g(t) dt.

use crate::C64;
use std::collections::HashMap;
use std::f64::consts::PI;

/// Composite Simpson rule on a uniform grid. `points` is rounded up to odd.
pub(crate) fn simpson<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, points: usize) -> f64 {
    let m = if points % 2 == 0 { points + 1 } else { points.max(3) };
    let h = (hi - lo) / (m - 1) as f64;
    let mut acc = f(lo) + f(hi);
    for i in 1..m - 1 {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(lo + i as f64 * h);
    }
    acc * h / 3.0
}

pub(crate) fn simpson_c<F: Fn(f64) -> C64>(f: F, lo: f64, hi: f64, points: usize) -> C64 {
    let m = if points % 2 == 0 { points + 1 } else { points.max(3) };
    let h = (hi - lo) / (m - 1) as f64;
    let mut acc = f(lo) + f(hi);
    for i in 1..m - 1 {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += f(lo + i as f64 * h) * w;
    }
    acc * (h / 3.0)
}

/// Time-domain Gaussian filter, L2-normalized so that ∫ f(t)² dt = 1.
pub fn filter_time(t: f64, beta: f64) -> f64 {
    (-t * t / (beta * beta)).exp() / (beta * (PI / 2.0).sqrt()).sqrt()
}

/// Fourier transform of the filter. Positive, even, also L2-normalized.
pub fn f_hat(omega: f64, beta: f64) -> f64 {
    beta.sqrt() * (2.0 * PI).powf(-0.25) * (-beta * beta * omega * omega / 4.0).exp()
}

/// Frequency weighting window of the dissipator; equals 1 at ω = −1/β.
pub fn thermal_window(omega: f64, beta: f64) -> f64 {
    let x = beta * omega + 1.0;
    (-x * x / 2.0).exp()
}

/// Odd coherent kernel at time t, evaluated as the defining convolution of a
/// sech envelope with a sine-Gaussian, by Simpson quadrature on s ∈ [−10, 10].
pub fn odd_kernel_time(t: f64) -> f64 {
    let val = simpson(
        |s| {
            let u = t - s;
            (1.0 / (2.0 * PI * s).cosh()) * (-u).sin() * (-2.0 * u * u).exp()
        },
        -10.0,
        10.0,
        8001,
    );
    2.0 * PI.sqrt() * 0.125f64.exp() * val
}

/// Fourier transform of the odd kernel. Pure imaginary, odd, vanishes at 0.
pub fn odd_kernel_hat(omega: f64) -> C64 {
    let scale = PI.sqrt() * 0.125f64.exp() / 4.0 / (omega / 4.0).cosh();
    let lobe = (-(omega - 1.0) * (omega - 1.0) / 8.0).exp()
        - (-(omega + 1.0) * (omega + 1.0) / 8.0).exp();
    C64::new(0.0, scale * lobe)
}

/// Shifted-Gaussian coherent kernel at time t.
pub fn shift_kernel_time(t: f64) -> C64 {
    let mag = (-4.0 * t * t).exp() / (2.0 * PI.powf(1.5));
    mag * C64::new(0.0, -2.0 * t).exp()
}

/// Fourier transform of the shifted kernel. Real positive, centered at ω = −2.
pub fn shift_kernel_hat(omega: f64) -> f64 {
    (-(omega + 2.0) * (omega + 2.0) / 16.0).exp() / (4.0 * 2f64.sqrt() * PI.powf(1.5))
}

/// Dissipator coefficient g(ν, ν′) in closed form. The window and both filter
/// factors are Gaussians, so the ω-integral collapses to this expression.
pub fn dissipator_coefficient(nu: f64, nup: f64, beta: f64) -> f64 {
    let (u, v) = (beta * nu, beta * nup);
    let expo = (-1.0 - (u + v) - 0.75 * (u * u + v * v) + 0.5 * u * v) / 4.0;
    expo.exp() / 2f64.sqrt()
}

/// Quadrature route for g(ν, ν′): direct ω-integration of the window times the
/// two filter factors, on an interval covering every peak plus 14/β of margin.
pub fn dissipator_coefficient_quadrature(nu: f64, nup: f64, beta: f64) -> f64 {
    dissipator_quadrature_with_window(nu, nup, beta, |w| thermal_window(w, beta))
}

/// Same quadrature with a caller-supplied window. With a flat window the
/// coefficient reduces to the filter autocorrelation e^{−β²(ν−ν′)²/8}.
pub fn dissipator_quadrature_with_window<W: Fn(f64) -> f64>(
    nu: f64,
    nup: f64,
    beta: f64,
    window: W,
) -> f64 {
    let lo = (-1.0 / beta).min(nu).min(nup) - 14.0 / beta;
    let hi = (-1.0 / beta).max(nu).max(nup) + 14.0 / beta;
    simpson(
        |w| window(w) * f_hat(w - nu, beta) * f_hat(w - nup, beta),
        lo,
        hi,
        20001,
    )
}

/// Weight of the X_ν X_ν′ product in the coherent correction. The argument
/// pairing (sum frequency into the odd kernel, difference into the shifted
/// one) and the overall factor 2 are pinned by the time-domain double
/// quadrature; see [`CoherentQuadrature`].
pub fn coherent_weight(nu: f64, nup: f64, beta: f64) -> C64 {
    4.0 * PI * odd_kernel_hat(beta * (nu + nup)) * shift_kernel_hat(beta * (nup - nu))
}

const COHERENT_GRID_POINTS: usize = 801;
const COHERENT_GRID_HALF: f64 = 6.0;

/// Double quadrature of the coherent term on the [−6, 6]² time grid with 801
/// Simpson points per axis. After Bohr expansion the grid sum factorizes
/// exactly into two one-dimensional transforms, cached per frequency here.
pub struct CoherentQuadrature {
    beta: f64,
    axis: Vec<f64>,
    weights: Vec<f64>,
    odd_vals: Vec<f64>,
    shift_vals: Vec<C64>,
    sum_cache: HashMap<i64, C64>,
    diff_cache: HashMap<i64, C64>,
}

impl CoherentQuadrature {
    pub fn new(beta: f64) -> Self {
        let m = COHERENT_GRID_POINTS;
        let h = 2.0 * COHERENT_GRID_HALF / (m - 1) as f64;
        let axis: Vec<f64> = (0..m).map(|i| -COHERENT_GRID_HALF + i as f64 * h).collect();
        let weights: Vec<f64> = (0..m)
            .map(|i| {
                let w = if i == 0 || i == m - 1 {
                    1.0
                } else if i % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                w * h / 3.0
            })
            .collect();
        let odd_vals = axis.iter().map(|&t| odd_kernel_time(t)).collect();
        let shift_vals = axis.iter().map(|&t| shift_kernel_time(t)).collect();
        CoherentQuadrature {
            beta,
            axis,
            weights,
            odd_vals,
            shift_vals,
            sum_cache: HashMap::new(),
            diff_cache: HashMap::new(),
        }
    }

    fn key(x: f64) -> i64 {
        (x * 1e12).round() as i64
    }

    fn sum_transform(&mut self, x: f64) -> C64 {
        let k = Self::key(x);
        if let Some(&v) = self.sum_cache.get(&k) {
            return v;
        }
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..self.axis.len() {
            acc += self.weights[i] * self.odd_vals[i] * C64::new(0.0, -x * self.axis[i]).exp();
        }
        self.sum_cache.insert(k, acc);
        acc
    }

    fn diff_transform(&mut self, y: f64) -> C64 {
        let k = Self::key(y);
        if let Some(&v) = self.diff_cache.get(&k) {
            return v;
        }
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..self.axis.len() {
            acc += self.weights[i] * self.shift_vals[i] * C64::new(0.0, y * self.axis[i]).exp();
        }
        self.diff_cache.insert(k, acc);
        acc
    }

    /// Grid-quadrature value of the weight that [`coherent_weight`] gives in
    /// closed form.
    pub fn weight(&mut self, nu: f64, nup: f64) -> C64 {
        let x = self.beta * (nu + nup);
        let y = self.beta * (nu - nup);
        2.0 * self.sum_transform(x) * self.diff_transform(y)
    }
}

/// Tilted filter transform in closed form: a Gaussian in t carrying the phase
/// ω − 1/(2β) and the overall thermal tilt e^{−βω/4}.
pub fn tilted_filter_closed(t: f64, omega: f64, beta: f64) -> C64 {
    let mag = (1.0 / 16.0f64).exp() / (beta * (PI / 2.0).sqrt()).sqrt()
        * (-t * t / (beta * beta)).exp()
        * (-beta * omega / 4.0).exp();
    mag * C64::new(0.0, -t * (omega - 1.0 / (2.0 * beta))).exp()
}

/// Quadrature route for the tilted filter transform: ν-integration of the
/// tilted filter spectrum against e^{−iνt}.
pub fn tilted_filter_quadrature(t: f64, omega: f64, beta: f64) -> C64 {
    let lim = 30.0 / beta;
    simpson_c(
        |nu| {
            (-beta * nu / 4.0).exp() * f_hat(omega - nu, beta) * C64::new(0.0, -nu * t).exp()
        },
        -lim,
        lim,
        40001,
    ) / (2.0 * PI).sqrt()
}

/// Inverse two-dimensional transform of the coherent weight, evaluated through
/// the convolution theorem. Used only for decay-envelope diagnostics.
pub fn coherent_inverse_transform(t: f64, tp: f64, beta: f64) -> C64 {
    let u = (t + tp) / (2.0 * beta);
    let v = (tp - t) / (2.0 * beta);
    (2.0 * PI / (beta * beta)) * odd_kernel_time(u) * shift_kernel_time(v)
}

/// |∫ f(t)² dt − 1| by quadrature; the filter is L2-normalized.
pub fn filter_time_norm_residual(beta: f64) -> f64 {
    let lim = 20.0 * beta;
    (simpson(|t| filter_time(t, beta).powi(2), -lim, lim, 20001) - 1.0).abs()
}

/// |∫ f̂(ω)² dω − 1| by quadrature.
pub fn filter_freq_norm_residual(beta: f64) -> f64 {
    let lim = 40.0 / beta;
    (simpson(|w| f_hat(w, beta).powi(2), -lim, lim, 20001) - 1.0).abs()
}

/// Closed-form kernel set at a fixed inverse temperature.
#[derive(Clone, Copy, Debug)]
pub struct KernelBundle {
    pub beta: f64,
}

impl KernelBundle {
    pub fn new(beta: f64) -> Self {
        KernelBundle { beta }
    }

    pub fn f_hat(&self, omega: f64) -> f64 {
        f_hat(omega, self.beta)
    }

    pub fn window(&self, omega: f64) -> f64 {
        thermal_window(omega, self.beta)
    }

    pub fn odd_hat(&self, omega: f64) -> C64 {
        odd_kernel_hat(omega)
    }

    pub fn shift_hat(&self, omega: f64) -> f64 {
        shift_kernel_hat(omega)
    }

    /// Structural identities the closed forms must satisfy.
    pub fn invariant_residuals(&self) -> [f64; 3] {
        [
            (self.window(-1.0 / self.beta) - 1.0).abs(),
            self.odd_hat(0.0).norm(),
            (self.f_hat(0.1) - self.f_hat(-0.1)).abs(),
        ]
    }
}
