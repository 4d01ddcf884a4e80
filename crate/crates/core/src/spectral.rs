//! Spectral representation of `A` and exact per-mode solutions.
//!
//! Each eigenvalue `λ` reduces the damped equation to the scalar problem
//! `w'' + w' + λw = 0`, whose characteristic roots are `(-1 ± √(1-4λ))/2`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::numeric::{compensated_sum, inv_factorial};

/// Half-width of the band `|1 - 4λ| < CRITICAL_BAND` evaluated by series.
pub const CRITICAL_BAND: f64 = 1e-6;

/// Largest supported time-derivative order.
pub const MAX_DERIVATIVE: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenMode {
    pub lambda: f64,
    pub weight: f64,
}

impl EigenMode {
    pub fn new(lambda: f64, weight: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(Error::domain(format!("eigenvalue {lambda} must be finite and >= 0")));
        }
        if !(weight.is_finite() && weight > 0.0) {
            return Err(Error::domain(format!("mode weight {weight} must be finite and > 0")));
        }
        Ok(EigenMode { lambda, weight })
    }
}

/// Nonnegative selfadjoint operator given by its spectral data.
#[derive(Debug, Clone, PartialEq)]
pub struct ModalOperator {
    modes: Vec<EigenMode>,
    label: String,
}

impl ModalOperator {
    pub fn new(label: impl Into<String>, modes: Vec<EigenMode>) -> Result<Self> {
        if modes.is_empty() {
            return Err(Error::Degenerate("operator needs at least one mode".into()));
        }
        for m in &modes {
            EigenMode::new(m.lambda, m.weight)?;
        }
        if modes.windows(2).any(|w| w[1].lambda < w[0].lambda) {
            return Err(Error::domain("eigenvalues must be sorted nondecreasing"));
        }
        Ok(ModalOperator {
            modes,
            label: label.into(),
        })
    }

    /// Unit weights, as for an orthonormal eigenbasis.
    pub fn from_eigenvalues(label: impl Into<String>, lambdas: &[f64]) -> Result<Self> {
        let modes = lambdas
            .iter()
            .map(|&l| EigenMode::new(l, 1.0))
            .collect::<Result<Vec<_>>>()?;
        Self::new(label, modes)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn modes(&self) -> &[EigenMode] {
        &self.modes
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn lambdas(&self) -> impl Iterator<Item = f64> + '_ {
        self.modes.iter().map(|m| m.lambda)
    }

    pub fn weights(&self) -> impl Iterator<Item = f64> + '_ {
        self.modes.iter().map(|m| m.weight)
    }

    pub fn zeros(&self) -> ModalVector {
        ModalVector::zeros(self.len())
    }

    pub fn check(&self, v: &ModalVector) -> Result<()> {
        check_len(self.len(), v.len())
    }

    pub fn check_pair(&self, data: &CauchyPair) -> Result<()> {
        self.check(&data.u0)?;
        self.check(&data.u1)
    }

    /// `‖f‖² = Σ w f²`.
    pub fn norm_sq(&self, f: &ModalVector) -> Result<f64> {
        self.check(f)?;
        Ok(compensated_sum(
            self.modes.iter().zip(f.iter()).map(|(m, &c)| m.weight * c * c),
        ))
    }

    pub fn norm(&self, f: &ModalVector) -> Result<f64> {
        Ok(self.norm_sq(f)?.sqrt())
    }

    pub fn inner(&self, f: &ModalVector, g: &ModalVector) -> Result<f64> {
        self.check(f)?;
        self.check(g)?;
        Ok(compensated_sum(
            self.modes
                .iter()
                .zip(f.iter().zip(g.iter()))
                .map(|(m, (&a, &b))| m.weight * a * b),
        ))
    }

    /// Applies `k(λ, f_j)` mode by mode.
    pub fn map<F: Fn(f64, f64) -> f64>(&self, f: &ModalVector, k: F) -> Result<ModalVector> {
        self.check(f)?;
        Ok(ModalVector::new(
            self.modes
                .iter()
                .zip(f.iter())
                .map(|(m, &c)| k(m.lambda, c))
                .collect(),
        ))
    }
}

/// Coefficients in the eigenbasis of a [`ModalOperator`].
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ModalVector {
    coeffs: Vec<f64>,
}

impl ModalVector {
    pub fn new(coeffs: Vec<f64>) -> Self {
        ModalVector { coeffs }
    }

    pub fn zeros(n: usize) -> Self {
        ModalVector {
            coeffs: vec![0.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.coeffs
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.coeffs.iter()
    }

    pub fn add(&self, other: &ModalVector) -> Result<ModalVector> {
        check_len(self.len(), other.len())?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn sub(&self, other: &ModalVector) -> Result<ModalVector> {
        check_len(self.len(), other.len())?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    pub fn scale(&self, c: f64) -> ModalVector {
        ModalVector::new(self.coeffs.iter().map(|x| c * x).collect())
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    fn zip_with(&self, other: &ModalVector, f: impl Fn(f64, f64) -> f64) -> ModalVector {
        ModalVector::new(
            self.coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        )
    }
}

impl From<Vec<f64>> for ModalVector {
    fn from(coeffs: Vec<f64>) -> Self {
        ModalVector::new(coeffs)
    }
}

impl std::ops::Index<usize> for ModalVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.coeffs[i]
    }
}

impl std::ops::IndexMut<usize> for ModalVector {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.coeffs[i]
    }
}

/// Initial data `(u(0), u'(0))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CauchyPair {
    pub u0: ModalVector,
    pub u1: ModalVector,
}

impl CauchyPair {
    pub fn new(u0: ModalVector, u1: ModalVector) -> Result<Self> {
        check_len(u0.len(), u1.len())?;
        if u0.iter().chain(u1.iter()).any(|x| !x.is_finite()) {
            return Err(Error::domain("initial data must be finite"));
        }
        Ok(CauchyPair { u0, u1 })
    }

    /// `v00 = u0 + u1`, the data carried by the heat semigroup.
    pub fn v00(&self) -> ModalVector {
        self.u0.zip_with(&self.u1, |a, b| a + b)
    }

    pub fn len(&self) -> usize {
        self.u0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u0.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeState {
    pub value: f64,
    pub derivative: f64,
}

fn check_time(t: f64) -> Result<()> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("time {t} must be finite and >= 0")))
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda.is_finite() && lambda >= 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("eigenvalue {lambda} must be finite and >= 0")))
    }
}

/// Exact solution of `w'' + λw + w' = 0`, `w(0) = a`, `w'(0) = b`.
pub fn mode_solve(lambda: f64, a: f64, b: f64, t: f64) -> Result<ModeState> {
    mode_derivative(lambda, a, b, t, 0)
}

/// `(w^(k)(t), w^(k+1)(t))` for the scalar mode problem.
pub fn mode_derivative(lambda: f64, a: f64, b: f64, t: f64, k: usize) -> Result<ModeState> {
    check_lambda(lambda)?;
    check_time(t)?;
    if k > MAX_DERIVATIVE {
        return Err(Error::UnsupportedOrder {
            what: "time derivative",
            order: k,
            max: MAX_DERIVATIVE,
        });
    }
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::domain("mode data must be finite"));
    }
    let (value, derivative) = mode_kernel(lambda, a, b, t, k);
    Ok(ModeState { value, derivative })
}

/// Unchecked kernel shared by every per-mode path.
pub(crate) fn mode_kernel(lambda: f64, a: f64, b: f64, t: f64, k: usize) -> (f64, f64) {
    let d = 1.0 - 4.0 * lambda;
    let lift = || {
        let (mut p, mut q) = (a, b);
        for _ in 0..k {
            (p, q) = (q, -lambda * p - q);
        }
        (p, q)
    };
    if t == 0.0 {
        // Initial derivatives straight from the equation, exact for k = 0.
        return lift();
    }
    if d.abs() < CRITICAL_BAND {
        let (p, q) = lift();
        let next = (q, -lambda * p - q);
        return (
            critical_value(lambda, p, q, t),
            critical_value(lambda, next.0, next.1, t),
        );
    }
    if d > 0.0 {
        let sd = d.sqrt();
        let rp = -2.0 * lambda / (1.0 + sd);
        let rm = -0.5 * (1.0 + sd);
        let cp = (b - rm * a) / sd;
        let cm = (rp * a - b) / sd;
        let ep = (rp * t).exp();
        let em = (rm * t).exp();
        let rpk = rp.powi(k as i32);
        let rmk = rm.powi(k as i32);
        (
            cp * rpk * ep + cm * rmk * em,
            cp * rpk * rp * ep + cm * rmk * rm * em,
        )
    } else {
        let nu = 0.5 * (-d).sqrt();
        let r = Complex64::new(-0.5, nu);
        let c = Complex64::new(a, -(b + 0.5 * a) / nu);
        let (s, co) = (nu * t).sin_cos();
        let e = Complex64::new(co, s) * (-0.5 * t).exp();
        let mut z = c * e;
        for _ in 0..k {
            z *= r;
        }
        (z.re, (z * r).re)
    }
}

/// Solution in the near-critical band through `ψ(z, t) = Σ z^m t^{2m+1}/(2m+1)!`
/// and its companion `Σ z^m t^{2m}/(2m)!`, with `z = (1 - 4λ)/4`.
fn critical_value(lambda: f64, a: f64, b: f64, t: f64) -> f64 {
    let z = 0.25 * (1.0 - 4.0 * lambda);
    let x = z * t * t;
    let damp = (-0.5 * t).exp();
    let (c, s) = if x.abs() <= 1.0 {
        let mut c = 0.0;
        let mut s = 0.0;
        let mut xm = 1.0;
        for m in 0..40 {
            let tc = xm * inv_factorial(2 * m);
            let ts = xm * inv_factorial(2 * m + 1);
            c += tc;
            s += ts;
            if tc.abs() < 1e-18 * c.abs() && m > 0 {
                break;
            }
            xm *= x;
        }
        (c * damp, s * t * damp)
    } else if z > 0.0 {
        // Same entire functions, written as cosh/sinh with the damping folded in.
        let mu = z.sqrt();
        let hi = ((mu - 0.5) * t).exp();
        let lo = (-(mu + 0.5) * t).exp();
        (0.5 * (hi + lo), lo * (2.0 * mu * t).exp_m1() / (2.0 * mu))
    } else {
        let nu = (-z).sqrt();
        let (sn, cs) = (nu * t).sin_cos();
        (cs * damp, sn / nu * damp)
    };
    a * c + (b + 0.5 * a) * s
}

/// Componentwise [`mode_solve`].
pub fn evolve(op: &ModalOperator, data: &CauchyPair, t: f64) -> Result<(ModalVector, ModalVector)> {
    evolve_derivative(op, data, t, 0)
}

/// `(u^(k)(t), u^(k+1)(t))` componentwise.
pub fn evolve_derivative(
    op: &ModalOperator,
    data: &CauchyPair,
    t: f64,
    k: usize,
) -> Result<(ModalVector, ModalVector)> {
    op.check_pair(data)?;
    check_time(t)?;
    if k > MAX_DERIVATIVE {
        return Err(Error::UnsupportedOrder {
            what: "time derivative",
            order: k,
            max: MAX_DERIVATIVE,
        });
    }
    let n = op.len();
    let mut u = Vec::with_capacity(n);
    let mut up = Vec::with_capacity(n);
    for (j, m) in op.modes().iter().enumerate() {
        let (v, d) = mode_kernel(m.lambda, data.u0[j], data.u1[j], t, k);
        u.push(v);
        up.push(d);
    }
    Ok((ModalVector::new(u), ModalVector::new(up)))
}

/// `e^{-λt}`.
pub fn heat_mode(lambda: f64, t: f64) -> Result<f64> {
    check_lambda(lambda)?;
    check_time(t)?;
    Ok((-lambda * t).exp())
}

/// `e^{-tA} f`.
pub fn heat_apply(op: &ModalOperator, f: &ModalVector, t: f64) -> Result<ModalVector> {
    check_time(t)?;
    op.map(f, |l, c| (-l * t).exp() * c)
}

/// `A^s f`, with `0^0 = 1`.
pub fn apply_power(op: &ModalOperator, f: &ModalVector, s: f64) -> Result<ModalVector> {
    if !(s.is_finite() && s >= 0.0) {
        return Err(Error::domain(format!("power {s} must be finite and >= 0")));
    }
    op.map(f, |l, c| l.powf(s) * c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_eigenvalue_closed_form() {
        let s = mode_solve(0.0, 1.0, 1.0, 40.0).unwrap();
        assert!((s.value - 2.0).abs() < 1e-15);
        assert!(s.derivative.abs() < 1e-15);
        let s = mode_solve(0.0, 0.0, 1.0, 3.0).unwrap();
        assert!((s.value - (1.0 - (-3.0f64).exp())).abs() < 1e-15);
    }

    #[test]
    fn critical_eigenvalue_value() {
        let s = mode_solve(0.25, 1.0, 0.0, 2.0).unwrap();
        assert!((s.value - 2.0 * (-1.0f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn initial_conditions() {
        let s = mode_solve(1.0, 0.0, 1.0, 0.0).unwrap();
        assert_eq!(s.value, 0.0);
        assert_eq!(s.derivative, 1.0);
    }

    #[test]
    fn second_derivative_of_zero_mode() {
        // u = 1 - e^{-t}, so u'' = -e^{-t}.
        let s = mode_derivative(0.0, 0.0, 1.0, 1.0, 2).unwrap();
        assert!((s.value + (-1.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn errors_on_bad_input() {
        assert!(matches!(mode_solve(-1.0, 1.0, 0.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(mode_solve(1.0, 1.0, 0.0, -1.0), Err(Error::Domain(_))));
        assert!(matches!(
            mode_derivative(1.0, 1.0, 0.0, 1.0, 13),
            Err(Error::UnsupportedOrder { .. })
        ));
    }

    #[test]
    fn heat_and_powers() {
        assert_eq!(heat_mode(3.0, 0.0).unwrap(), 1.0);
        assert!((heat_mode(2.0, 0.5).unwrap() - (-1.0f64).exp()).abs() < 1e-16);
        let op = ModalOperator::from_eigenvalues("t", &[0.0, 2.0]).unwrap();
        let f = ModalVector::new(vec![3.0, 5.0]);
        assert_eq!(apply_power(&op, &f, 0.0).unwrap(), f);
        let twice = apply_power(&op, &apply_power(&op, &f, 1.0).unwrap(), 1.0).unwrap();
        assert_eq!(twice, apply_power(&op, &f, 2.0).unwrap());
        assert!(apply_power(&op, &f, -1.0).is_err());
    }

    #[test]
    fn operator_validation() {
        assert!(ModalOperator::from_eigenvalues("x", &[]).is_err());
        assert!(ModalOperator::from_eigenvalues("x", &[2.0, 1.0]).is_err());
        assert!(ModalOperator::new("x", vec![EigenMode { lambda: 1.0, weight: 0.0 }]).is_err());
        let op = ModalOperator::from_eigenvalues("x", &[1.0]).unwrap();
        let data = CauchyPair::new(ModalVector::zeros(2), ModalVector::zeros(2)).unwrap();
        assert!(matches!(evolve(&op, &data, 1.0), Err(Error::Shape { .. })));
    }
}
