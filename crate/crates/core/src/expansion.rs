//! Asymptotic profiles of the diffusion phenomenon.
//!
//! With `s = tλ`, the ℓ-th profile acts on each mode as
//! `λ^ℓ e^{-s} (P_ℓ(s) v00 - Q_ℓ(s) u0)` where
//! `P_ℓ(s) = Σ_j C(2ℓ, ℓ+j)(-s)^j/j!` and `Q_ℓ(s) = Σ_k C(2ℓ-1, ℓ+k)(-s)^k/k!`.

use crate::error::{Error, Result};
use crate::numeric::{inv_factorial, BinomialTable};
use crate::ode::rk4_adaptive;
use crate::spectral::{self, CauchyPair, ModalOperator, ModalVector};

pub const MAX_PROFILE_ORDER: usize = 30;
pub const MAX_REGULARIZATION_ORDER: usize = 16;
pub const MAX_ORACLE_ORDER: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub struct ProfilePolynomials {
    pub order: usize,
    /// Ascending coefficients of `P_ℓ`, degree `ℓ`.
    pub p: Vec<f64>,
    /// Ascending coefficients of `Q_ℓ`, degree `ℓ - 1`; empty for `ℓ = 0`.
    pub q: Vec<f64>,
}

impl ProfilePolynomials {
    /// Coefficients of `d/dt` of the profile divided by `λ^{ℓ+1} e^{-s}`,
    /// that is `P' - P` and `Q' - Q`.
    pub fn time_derivative(&self) -> (Vec<f64>, Vec<f64>) {
        (shift_derivative(&self.p), shift_derivative(&self.q))
    }
}

fn shift_derivative(c: &[f64]) -> Vec<f64> {
    (0..c.len())
        .map(|j| {
            let dp = if j + 1 < c.len() {
                (j + 1) as f64 * c[j + 1]
            } else {
                0.0
            };
            dp - c[j]
        })
        .collect()
}

fn sign(j: usize) -> f64 {
    if j % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn order_check(what: &'static str, order: usize, max: usize) -> Result<()> {
    if order > max {
        Err(Error::UnsupportedOrder { what, order, max })
    } else {
        Ok(())
    }
}

pub fn profile_poly(ell: usize) -> Result<ProfilePolynomials> {
    order_check("profile order", ell, MAX_PROFILE_ORDER)?;
    let b = BinomialTable::shared();
    let p = (0..=ell)
        .map(|j| b.get(2 * ell, ell + j) * sign(j) * inv_factorial(j))
        .collect();
    let q = if ell == 0 {
        Vec::new()
    } else {
        (0..ell)
            .map(|k| b.get(2 * ell - 1, ell + k) * sign(k) * inv_factorial(k))
            .collect()
    };
    Ok(ProfilePolynomials { order: ell, p, q })
}

fn horner(c: &[f64], s: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &x| acc * s + x)
}

/// `λ^power e^{-λt} poly(λt)`, evaluated in log form once `s > 1` so that
/// large `λ^power` and tiny `e^{-s}` never meet in floating point.
pub fn lambda_exp_poly(power: usize, lambda: f64, t: f64, poly: &[f64]) -> f64 {
    if poly.is_empty() {
        return 0.0;
    }
    if lambda == 0.0 {
        return if power == 0 { poly[0] } else { 0.0 };
    }
    let s = lambda * t;
    if s <= 1.0 {
        return lambda.powi(power as i32) * (-s).exp() * horner(poly, s);
    }
    let deg = poly.len() - 1;
    let inv = 1.0 / s;
    let tail = poly.iter().fold(0.0, |acc, &x| acc * inv + x);
    let log_mag = power as f64 * lambda.ln() + deg as f64 * s.ln() - s;
    log_mag.exp() * tail
}

/// `v_ℓ(t)`.
pub fn profile_v(ell: usize, op: &ModalOperator, data: &CauchyPair, t: f64) -> Result<ModalVector> {
    op.check_pair(data)?;
    let v00 = data.v00();
    if ell == 0 {
        return spectral::heat_apply(op, &v00, t);
    }
    check_time(t)?;
    let pq = profile_poly(ell)?;
    Ok(per_mode(op, |j, l| {
        lambda_exp_poly(ell, l, t, &pq.p) * v00[j] - lambda_exp_poly(ell, l, t, &pq.q) * data.u0[j]
    }))
}

/// `d/dt v_ℓ(t)`.
pub fn profile_v_dt(
    ell: usize,
    op: &ModalOperator,
    data: &CauchyPair,
    t: f64,
) -> Result<ModalVector> {
    op.check_pair(data)?;
    check_time(t)?;
    let (dp, dq) = profile_poly(ell)?.time_derivative();
    let v00 = data.v00();
    Ok(per_mode(op, |j, l| {
        lambda_exp_poly(ell + 1, l, t, &dp) * v00[j] - lambda_exp_poly(ell + 1, l, t, &dq) * data.u0[j]
    }))
}

/// `V_n = Σ_{ℓ<n} v_ℓ`, zero for `n = 0`.
pub fn partial_sum_v(n: usize, op: &ModalOperator, data: &CauchyPair, t: f64) -> Result<ModalVector> {
    op.check_pair(data)?;
    check_time(t)?;
    accumulate(n, op, |ell| profile_v(ell, op, data, t))
}

/// `(V_n(t), V_n'(t))`.
pub fn partial_sum_v_dt(
    n: usize,
    op: &ModalOperator,
    data: &CauchyPair,
    t: f64,
) -> Result<(ModalVector, ModalVector)> {
    let v = partial_sum_v(n, op, data, t)?;
    let dv = accumulate(n, op, |ell| profile_v_dt(ell, op, data, t))?;
    Ok((v, dv))
}

fn accumulate<F>(n: usize, op: &ModalOperator, term: F) -> Result<ModalVector>
where
    F: Fn(usize) -> Result<ModalVector>,
{
    if n == 0 {
        return Ok(op.zeros());
    }
    order_check("partial sum order", n - 1, MAX_PROFILE_ORDER)?;
    let mut acc = term(0)?;
    for ell in 1..n {
        let v = term(ell)?;
        for (a, b) in acc.as_mut_slice().iter_mut().zip(v.iter()) {
            *a += b;
        }
    }
    Ok(acc)
}

/// Polynomials of `v_{ℓ,k}` in `s`, sign included.
pub fn vlk_polys(ell: usize, k: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    order_check("profile order l+k", ell + k, MAX_PROFILE_ORDER)?;
    let b = BinomialTable::shared();
    let sg = sign(ell + k);
    let p = (0..=ell)
        .map(|j| sg * b.get(ell + k, j + k) * sign(j) * inv_factorial(j))
        .collect();
    let q = (0..ell)
        .map(|j| sg * b.get(ell + k - 1, j + k) * sign(j) * inv_factorial(j))
        .collect();
    Ok((p, q))
}

/// Scalar `v_{ℓ,k}(t)` for a single mode with data `(v00, u0)`.
pub fn vlk_scalar(ell: usize, k: usize, lambda: f64, v00: f64, u0: f64, t: f64) -> Result<f64> {
    let (p, q) = vlk_polys(ell, k)?;
    Ok(lambda_exp_poly(0, lambda, t, &p) * v00 - lambda_exp_poly(0, lambda, t, &q) * u0)
}

/// `v_{ℓ,k}(t)`, which satisfies `d^k/dt^k v_{ℓ,0} = A^k v_{ℓ,k}`.
pub fn profile_vlk(
    ell: usize,
    k: usize,
    op: &ModalOperator,
    data: &CauchyPair,
    t: f64,
) -> Result<ModalVector> {
    op.check_pair(data)?;
    check_time(t)?;
    let (p, q) = vlk_polys(ell, k)?;
    let v00 = data.v00();
    Ok(per_mode(op, |j, l| {
        lambda_exp_poly(0, l, t, &p) * v00[j] - lambda_exp_poly(0, l, t, &q) * data.u0[j]
    }))
}

/// `(I_n(λ), J_n(λ))` with `I_n + λ^n J_n = 1`.
pub fn in_jn(n: usize, lambda: f64) -> Result<(f64, f64)> {
    in_jn_with(BinomialTable::shared(), n, lambda)
}

/// [`in_jn`] against an explicit binomial table.
pub fn in_jn_with(table: &BinomialTable, n: usize, lambda: f64) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(Error::UnsupportedOrder {
            what: "regularization order (must be >= 1)",
            order: 0,
            max: MAX_REGULARIZATION_ORDER,
        });
    }
    order_check("regularization order", n, MAX_REGULARIZATION_ORDER)?;
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(Error::domain(format!("eigenvalue {lambda} must be finite and >= 0")));
    }
    let x = lambda / (1.0 + lambda);
    let y = 1.0 / (1.0 + lambda);
    let top = 2 * n - 1;
    let mut i = 0.0;
    let mut jn = 0.0;
    for k in 0..n {
        let base = x.powi(k as i32) * y.powi((top - k) as i32);
        i += table.get(top, k) * base;
        jn += table.get(top, n + k) * base;
    }
    Ok((i, jn))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegularizedPair {
    pub star: CauchyPair,
    pub starstar: CauchyPair,
    pub n: usize,
}

impl RegularizedPair {
    /// Per-mode `star + λ^n starstar`.
    pub fn recompose(&self, op: &ModalOperator) -> Result<CauchyPair> {
        let n = self.n as i32;
        let f = |a: &ModalVector, b: &ModalVector| -> Result<ModalVector> {
            op.check(a)?;
            op.check(b)?;
            Ok(per_mode(op, |j, l| a[j] + l.powi(n) * b[j]))
        };
        CauchyPair::new(
            f(&self.star.u0, &self.starstar.u0)?,
            f(&self.star.u1, &self.starstar.u1)?,
        )
    }
}

pub fn regularize(n: usize, op: &ModalOperator, data: &CauchyPair) -> Result<RegularizedPair> {
    op.check_pair(data)?;
    let factors = op
        .lambdas()
        .map(|l| in_jn(n, l))
        .collect::<Result<Vec<_>>>()?;
    let scale = |v: &ModalVector, pick: fn(&(f64, f64)) -> f64| {
        ModalVector::new(v.iter().zip(&factors).map(|(c, f)| c * pick(f)).collect())
    };
    Ok(RegularizedPair {
        star: CauchyPair::new(scale(&data.u0, |f| f.0), scale(&data.u1, |f| f.0))?,
        starstar: CauchyPair::new(scale(&data.u0, |f| f.1), scale(&data.u1, |f| f.1))?,
        n,
    })
}

/// `(u - V_n, u' - V_n')` at time `t`.
pub fn remainder(
    n: usize,
    op: &ModalOperator,
    data: &CauchyPair,
    t: f64,
) -> Result<(ModalVector, ModalVector)> {
    let (u, up) = spectral::evolve(op, data, t)?;
    let (v, vp) = partial_sum_v_dt(n, op, data, t)?;
    Ok((u.sub(&v)?, up.sub(&vp)?))
}

/// Reference value of `d^n/dt^n U_n(t)` for one mode, where
/// `U'' + λU + U' = -d/dt v_{n-1,0}`, `U(0) = 0`, `U'(0) = (-1)^n b`,
/// integrated with adaptive RK4. Higher derivatives are recovered from the
/// differentiated equation using analytic derivatives of the forcing.
pub fn err_equation_oracle(n: usize, lambda: f64, a: f64, b: f64, t: f64, tol: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::UnsupportedOrder {
            what: "error-equation order (must be >= 1)",
            order: 0,
            max: MAX_ORACLE_ORDER,
        });
    }
    order_check("error-equation order", n, MAX_ORACLE_ORDER)?;
    if !(tol.is_finite() && tol >= 1e-12) {
        return Err(Error::domain(format!("tolerance {tol} must be >= 1e-12")));
    }
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(Error::domain(format!("eigenvalue {lambda} must be finite and >= 0")));
    }
    check_time(t)?;
    let v00 = a + b;
    let (p1, q1) = vlk_polys(n - 1, 1)?;
    let forcing = |s: f64| -> f64 {
        -lambda * (lambda_exp_poly(0, lambda, s, &p1) * v00 - lambda_exp_poly(0, lambda, s, &q1) * a)
    };
    let rhs = |s: f64, y: &[f64; 2]| [y[1], forcing(s) - lambda * y[0] - y[1]];
    let scale = (a.abs() + b.abs()).max(1e-300);
    let y = rk4_adaptive(rhs, [0.0, sign(n) * b], t, tol, scale)?;
    let mut d = vec![y[0], y[1]];
    for k in 0..n.saturating_sub(1) {
        let gk = -lambda.powi(k as i32 + 1) * vlk_scalar(n - 1, k + 1, lambda, v00, a, t)?;
        let next = gk - lambda * d[k] - d[k + 1];
        d.push(next);
    }
    Ok(d[n])
}

/// `K_ℓ = sup_{s>=0} s^ℓ e^{-s} (|P_ℓ(s)| + |Q_ℓ(s)|)`, so that
/// `|v_ℓ(t)| <= K_ℓ t^{-ℓ} (|v00| + |u0|)` per mode.
pub fn profile_decay_constant(ell: usize) -> Result<f64> {
    let pq = profile_poly(ell)?;
    let s_max = 40.0 + 10.0 * ell as f64;
    let steps = 20_000;
    let mut sup: f64 = 0.0;
    for i in 0..=steps {
        let s = s_max * i as f64 / steps as f64;
        let mag = horner(&pq.p, s).abs() + horner(&pq.q, s).abs();
        sup = sup.max(s.powi(ell as i32) * (-s).exp() * mag);
    }
    Ok(sup)
}

fn per_mode<F: Fn(usize, f64) -> f64>(op: &ModalOperator, f: F) -> ModalVector {
    ModalVector::new(op.lambdas().enumerate().map(|(j, l)| f(j, l)).collect())
}

fn check_time(t: f64) -> Result<()> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("time {t} must be finite and >= 0")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(l: f64, u0: f64, u1: f64) -> (ModalOperator, CauchyPair) {
        (
            ModalOperator::from_eigenvalues("one", &[l]).unwrap(),
            CauchyPair::new(vec![u0].into(), vec![u1].into()).unwrap(),
        )
    }

    #[test]
    fn low_order_polynomials() {
        let p0 = profile_poly(0).unwrap();
        assert_eq!(p0.p, vec![1.0]);
        assert!(p0.q.is_empty());
        let p1 = profile_poly(1).unwrap();
        assert_eq!(p1.p, vec![2.0, -1.0]);
        assert_eq!(p1.q, vec![1.0]);
        let p2 = profile_poly(2).unwrap();
        assert_eq!(p2.p, vec![6.0, -4.0, 0.5]);
        assert_eq!(p2.q, vec![3.0, -1.0]);
        assert!(profile_poly(31).is_err());
    }

    #[test]
    fn first_profile_value() {
        // v00 = 1, u0 = 0 gives (2 - 1) e^{-1}.
        let (op, data) = single(1.0, 0.0, 1.0);
        let v = profile_v(1, &op, &data, 1.0).unwrap();
        assert!((v[0] - (-1.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn zero_mode_profiles_vanish() {
        let (op, data) = single(0.0, 0.3, 0.7);
        for ell in 1..6 {
            assert_eq!(profile_v(ell, &op, &data, 2.0).unwrap()[0], 0.0);
        }
    }

    #[test]
    fn in_jn_small_cases() {
        let (i, j) = in_jn(1, 3.0).unwrap();
        assert!((i - 0.25).abs() < 1e-16 && (j - 0.25).abs() < 1e-16);
        let (i, j) = in_jn(2, 1.0).unwrap();
        assert!((i - 0.5).abs() < 1e-15 && (j - 0.5).abs() < 1e-15);
        assert!(in_jn(0, 1.0).is_err());
        assert!(in_jn(17, 1.0).is_err());
    }

    #[test]
    fn zero_mode_remainder() {
        let (op, data) = single(0.0, 0.4, 1.3);
        let (r, rp) = remainder(1, &op, &data, 2.5).unwrap();
        let e = (-2.5f64).exp();
        assert!((r[0] + 1.3 * e).abs() < 1e-15);
        assert!((rp[0] - 1.3 * e).abs() < 1e-15);
    }

    #[test]
    fn oracle_initial_and_zero_mode() {
        let d = err_equation_oracle(1, 0.7, 0.3, 1.1, 0.0, 1e-10).unwrap();
        assert_eq!(d, -1.1);
        let d = err_equation_oracle(1, 0.0, 0.3, 1.1, 4.0, 1e-10).unwrap();
        assert!((d + 1.1 * (-4.0f64).exp()).abs() < 1e-9);
    }

    #[test]
    fn decay_constants_are_finite() {
        for ell in 0..=8 {
            let k = profile_decay_constant(ell).unwrap();
            assert!(k.is_finite() && k > 0.0);
        }
    }
}
