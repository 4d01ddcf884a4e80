//! Classical RK4, fixed-step and with step-doubling control.
//!
//! These integrators never touch the closed-form mode formulas, which is
//! what makes them usable as references.

use crate::error::{Error, Result};

pub fn rk4_step<const N: usize, F>(f: &F, t: f64, y: [f64; N], h: f64) -> [f64; N]
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let k1 = f(t, &y);
    let y2 = axpy(&y, 0.5 * h, &k1);
    let k2 = f(t + 0.5 * h, &y2);
    let y3 = axpy(&y, 0.5 * h, &k2);
    let k3 = f(t + 0.5 * h, &y3);
    let y4 = axpy(&y, h, &k3);
    let k4 = f(t + h, &y4);
    let mut out = y;
    for i in 0..N {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

fn axpy<const N: usize>(y: &[f64; N], a: f64, k: &[f64; N]) -> [f64; N] {
    let mut out = *y;
    for i in 0..N {
        out[i] += a * k[i];
    }
    out
}

/// Fixed step RK4 from `0` to `t`; the last step is shortened to land on `t`.
pub fn rk4_fixed<const N: usize, F>(f: F, y0: [f64; N], t: f64, h: f64) -> [f64; N]
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let steps = (t / h).ceil() as usize;
    let mut y = y0;
    let mut s = 0.0;
    for i in 0..steps {
        let next = if i + 1 == steps {
            t
        } else {
            (i + 1) as f64 * h
        };
        y = rk4_step(&f, s, y, next - s);
        s = next;
    }
    y
}

/// RK4 with step doubling and local extrapolation. `rtol` is applied per
/// component relative to `max(|y|, scale)`.
pub fn rk4_adaptive<const N: usize, F>(
    f: F,
    y0: [f64; N],
    t: f64,
    rtol: f64,
    scale: f64,
) -> Result<[f64; N]>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    if t == 0.0 {
        return Ok(y0);
    }
    let max_steps = 5_000_000usize;
    let mut y = y0;
    let mut s = 0.0;
    let mut h = (t / 64.0).min(0.05);
    let h_min = t * 1e-14;
    let mut steps = 0usize;
    while s < t {
        if s + h > t {
            h = t - s;
        }
        let big = rk4_step(&f, s, y, h);
        let half = rk4_step(&f, s, y, 0.5 * h);
        let small = rk4_step(&f, s + 0.5 * h, half, 0.5 * h);
        let mut err: f64 = 0.0;
        for i in 0..N {
            let denom = small[i].abs().max(scale);
            err = err.max((small[i] - big[i]).abs() / 15.0 / denom);
        }
        if !err.is_finite() {
            return Err(Error::Convergence {
                stage: "adaptive RK4".into(),
            });
        }
        if err <= rtol || h <= h_min {
            for i in 0..N {
                y[i] = small[i] + (small[i] - big[i]) / 15.0;
            }
            s += h;
        }
        let factor = if err == 0.0 {
            4.0
        } else {
            (0.9 * (rtol / err).powf(0.2)).clamp(0.2, 4.0)
        };
        h *= factor;
        steps += 1;
        if steps > max_steps {
            return Err(Error::Convergence {
                stage: "adaptive RK4".into(),
            });
        }
    }
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_step_harmonic_oscillator() {
        let y = rk4_fixed(|_, y: &[f64; 2]| [y[1], -y[0]], [1.0, 0.0], 1.0, 1e-3);
        assert!((y[0] - 1f64.cos()).abs() < 1e-12);
    }

    #[test]
    fn adaptive_exponential() {
        let y = rk4_adaptive(|_, y: &[f64; 1]| [-y[0]], [1.0], 10.0, 1e-10, 1.0).unwrap();
        assert!((y[0] - (-10f64).exp()).abs() < 1e-9);
    }
}
