//! Reference values computed without the closed-form paths: fixed-step RK4
//! for the scalar mode problem, Bessel series, and analytic integrals.
//! Shared by the unit tests, the acceptance suite and `verify`.

use std::f64::consts::PI;

use crate::ode::rk4_fixed;

/// `(w(t), w'(t))` for `w'' + λw + w' = 0` by fixed-step RK4; the step is
/// `1e-4` or smaller when `√λ` is large, keeping `h√λ <= 2e-3`.
pub fn rk4_mode(lambda: f64, a: f64, b: f64, t: f64) -> (f64, f64) {
    let h = if lambda > 0.0 {
        1e-4f64.min(2e-3 / lambda.sqrt())
    } else {
        1e-4
    };
    rk4_mode_step(lambda, a, b, t, h)
}

pub fn rk4_mode_step(lambda: f64, a: f64, b: f64, t: f64, h: f64) -> (f64, f64) {
    if t == 0.0 {
        return (a, b);
    }
    let y = rk4_fixed(|_, y: &[f64; 2]| [y[1], -lambda * y[0] - y[1]], [a, b], t, h);
    (y[0], y[1])
}

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `J0(x)` by its power series; accurate to ~1e-10 for `|x| <= 20`.
pub fn bessel_j0(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        term *= -q / (k as f64 * k as f64);
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-300) && k > 5 {
            break;
        }
    }
    sum
}

/// `Y0(x)` by its power series, `x > 0`.
pub fn bessel_y0(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut harmonic = 0.0;
    let mut sum = 0.0;
    for k in 1..200 {
        let kf = k as f64;
        term *= -q / (kf * kf);
        harmonic += 1.0 / kf;
        let add = -term * harmonic;
        sum += add;
        if add.abs() < 1e-18 * sum.abs().max(1e-300) && k > 5 {
            break;
        }
    }
    2.0 / PI * (((0.5 * x).ln() + EULER_GAMMA) * bessel_j0(x) + sum)
}

/// Smallest Dirichlet eigenvalue of `-Δ` on the planar annulus `a < r < b`
/// (radial modes): the first root `k` of `J0(ka)Y0(kb) - J0(kb)Y0(ka)`,
/// located by scanning and bisection, returned as `k²`.
pub fn annulus_first_eigenvalue(a: f64, b: f64) -> f64 {
    let cross = |k: f64| bessel_j0(k * a) * bessel_y0(k * b) - bessel_j0(k * b) * bessel_y0(k * a);
    let dk = 1e-3 * PI / (b - a);
    let mut lo = dk;
    let mut flo = cross(lo);
    loop {
        let hi = lo + dk;
        let fhi = cross(hi);
        if flo.signum() != fhi.signum() {
            let (mut l, mut h, mut fl) = (lo, hi, flo);
            for _ in 0..200 {
                let mid = 0.5 * (l + h);
                let fm = cross(mid);
                if fm.signum() == fl.signum() {
                    l = mid;
                    fl = fm;
                } else {
                    h = mid;
                }
            }
            let k = 0.5 * (l + h);
            return k * k;
        }
        lo = hi;
        flo = fhi;
    }
}

/// `k`-th radial Dirichlet eigenvalue of the 3D shell `(a, b)`, from
/// `w = r u` solving `-w'' = λ w`.
pub fn shell3d_eigenvalue(k: usize, a: f64, b: f64) -> f64 {
    let x = k as f64 * PI / (b - a);
    x * x
}

/// `‖e^{tΔ} f‖₂²` on the line for `f = exp(-x²/(2σ²))`.
pub fn gaussian_heat_norm_sq(sigma: f64, t: f64) -> f64 {
    sigma * sigma * (PI / (sigma * sigma + 2.0 * t)).sqrt()
}
