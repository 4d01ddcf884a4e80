//! `-d²/dx²` on the real line through its continuous spectrum.
//!
//! Even data are represented by the cosine transform `F(ξ) = ∫ f(x) cos(ξx) dx`
//! and odd data by the sine transform, sampled on `ξ > 0`. With mode
//! weights `dξ/π` the modal norm is the physical `L²(ℝ)` norm.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{compensated_sum, gauss_legendre, Accumulator};
use crate::spectral::{EigenMode, ModalOperator, ModalVector};

/// Gauss-Legendre nodes placed on `[0, ξ_min]`.
pub const LOW_BLOCK: usize = 8;

/// Symmetry class of line data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    Even,
    Odd,
}

#[derive(Debug, Clone)]
pub struct WholeLine {
    xi_min: f64,
    xi_max: f64,
    xi: Vec<f64>,
    operator: ModalOperator,
}

/// Frequency quadrature: a Gauss-Legendre block on `[0, ξ_min]` followed by
/// trapezoid nodes uniform in `log ξ` on `[ξ_min, ξ_max]`; `λ = ξ²`.
pub fn build_whole_line(xi_min: f64, xi_max: f64, m: usize) -> Result<WholeLine> {
    if !(xi_min.is_finite() && xi_min > 0.0 && xi_max.is_finite() && xi_max > xi_min) {
        return Err(Error::domain(format!(
            "frequency range needs 0 < xi_min < xi_max, got [{xi_min}, {xi_max}]"
        )));
    }
    if m < 2 * LOW_BLOCK {
        return Err(Error::domain(format!("m = {m} below the minimum of {}", 2 * LOW_BLOCK)));
    }
    let (gx, gw) = gauss_legendre(LOW_BLOCK);
    let mut xi = Vec::with_capacity(m);
    let mut w = Vec::with_capacity(m);
    for (x, wt) in gx.iter().zip(&gw) {
        xi.push(0.5 * xi_min * (x + 1.0));
        w.push(0.5 * xi_min * wt);
    }
    let n_log = m - LOW_BLOCK;
    let s0 = xi_min.ln();
    let ds = (xi_max.ln() - s0) / (n_log - 1) as f64;
    for j in 0..n_log {
        let x = if j == 0 {
            xi_min
        } else if j + 1 == n_log {
            xi_max
        } else {
            (s0 + ds * j as f64).exp()
        };
        let end = if j == 0 || j + 1 == n_log { 0.5 } else { 1.0 };
        xi.push(x);
        w.push(end * ds * x);
    }
    let modes = xi
        .iter()
        .zip(&w)
        .map(|(&x, &wt)| EigenMode::new(x * x, wt / std::f64::consts::PI))
        .collect::<Result<Vec<_>>>()?;
    Ok(WholeLine {
        xi_min,
        xi_max,
        operator: ModalOperator::new("whole_line", modes)?,
        xi,
    })
}

impl WholeLine {
    pub fn operator(&self) -> &ModalOperator {
        &self.operator
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.xi
    }

    pub fn xi_min(&self) -> f64 {
        self.xi_min
    }

    pub fn xi_max(&self) -> f64 {
        self.xi_max
    }

    /// Latest time for which the missing band `ξ < ξ_min` stays negligible.
    pub fn valid_until(&self) -> f64 {
        0.01 / (self.xi_min * self.xi_min)
    }

    /// Samples a known transform `F(ξ)` at the quadrature nodes.
    pub fn from_spectrum<F: Fn(f64) -> f64>(&self, f: F) -> ModalVector {
        ModalVector::new(self.xi.iter().map(|&x| f(x)).collect())
    }

    /// Transform of data supported in `[-half_width, half_width]` with the
    /// given parity, by composite Simpson over `[0, half_width]`.
    pub fn analyze<F: Fn(f64) -> f64>(&self, f: F, half_width: f64, parity: Parity) -> Result<ModalVector> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::domain("support half-width must be positive"));
        }
        let panels = {
            let p = (8.0 * self.xi_max * half_width).ceil().max(1000.0) as usize;
            p + p % 2
        };
        let h = half_width / panels as f64;
        let samples: Vec<(f64, f64)> = (0..=panels)
            .map(|i| {
                let x = h * i as f64;
                let c = if i == 0 || i == panels {
                    1.0
                } else if i % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                (x, c * h / 3.0 * f(x))
            })
            .collect();
        Ok(self.from_spectrum(|xi| {
            let mut acc = Accumulator::default();
            for &(x, wf) in &samples {
                let k = match parity {
                    Parity::Even => (xi * x).cos(),
                    Parity::Odd => (xi * x).sin(),
                };
                acc.add(wf * k);
            }
            2.0 * acc.total()
        }))
    }

    /// Inverse transform at the points `x`.
    pub fn synthesize(&self, c: &ModalVector, x: &[f64], parity: Parity) -> Result<Vec<f64>> {
        self.operator.check(c)?;
        Ok(x
            .iter()
            .map(|&x| {
                compensated_sum(self.operator.modes().iter().zip(&self.xi).zip(c.iter()).map(
                    |((m, &xi), &cj)| {
                        let k = match parity {
                            Parity::Even => (xi * x).cos(),
                            Parity::Odd => (xi * x).sin(),
                        };
                        m.weight * cj * k
                    },
                ))
            })
            .collect())
    }
}

/// Cosine transform of `e^{-x²/(2σ²)}`.
pub fn gaussian_transform(sigma: f64, xi: f64) -> f64 {
    sigma * (2.0 * std::f64::consts::PI).sqrt() * (-0.5 * sigma * sigma * xi * xi).exp()
}
