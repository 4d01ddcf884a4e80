use std::f64::consts::E;

use approx::assert_relative_eq;
use proptest::prelude::*;

use dampwave::expansion::{
    err_equation_oracle, in_jn, partial_sum_v, partial_sum_v_dt, profile_decay_constant, profile_poly, profile_v,
    profile_v_dt, profile_vlk, regularize, remainder, vlk_polys,
};
use dampwave::spectral::{evolve, heat_apply, CauchyPair, ModalOperator, ModalVector};

fn choose(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

fn factorial(j: u64) -> f64 {
    (1..=j).map(|i| i as f64).product()
}

fn horner(c: &[f64], s: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &x| acc * s + x)
}

fn single(lambda: f64, a: f64, b: f64) -> (ModalOperator, CauchyPair) {
    let op = ModalOperator::from_eigenvalues("single", &[lambda]).unwrap();
    let data = CauchyPair::new(ModalVector::new(vec![a]), ModalVector::new(vec![b])).unwrap();
    (op, data)
}

fn sample_problem() -> (ModalOperator, CauchyPair) {
    let op = ModalOperator::from_eigenvalues("sample", &[0.0, 0.01, 0.25, 0.7, 2.0, 9.0]).unwrap();
    let data = CauchyPair::new(
        ModalVector::new(vec![0.3, -1.2, 0.8, 0.5, -0.25, 1.0]),
        ModalVector::new(vec![1.0, 0.4, -0.6, 0.9, 0.75, -0.5]),
    )
    .unwrap();
    (op, data)
}

#[test]
fn low_order_profile_polynomials() {
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
fn profile_polynomials_match_binomial_formula() {
    for ell in 0..=12u64 {
        let pq = profile_poly(ell as usize).unwrap();
        for j in 0..=ell {
            let want = choose(2 * ell, ell + j) as f64 * (-1f64).powi(j as i32) / factorial(j);
            assert_relative_eq!(pq.p[j as usize], want, max_relative = 1e-15);
        }
        for k in 0..ell {
            let want = choose(2 * ell - 1, ell + k) as f64 * (-1f64).powi(k as i32) / factorial(k);
            assert_relative_eq!(pq.q[k as usize], want, max_relative = 1e-15);
        }
    }
}

#[test]
fn profile_examples() {
    let (op, data) = sample_problem();
    let v0 = profile_v(0, &op, &data, 1.7).unwrap();
    assert_eq!(v0, heat_apply(&op, &data.v00(), 1.7).unwrap());
    for ell in 1..5 {
        assert_eq!(profile_v(ell, &op, &data, 2.0).unwrap()[0], 0.0);
    }
    // v00 = u0 + u1 = 1 and u0 = 0.
    let (op, data) = single(1.0, 0.0, 1.0);
    assert_relative_eq!(profile_v(1, &op, &data, 1.0).unwrap()[0], 1.0 / E, max_relative = 1e-14);
}

#[test]
fn partial_sums() {
    let (op, data) = sample_problem();
    let t = 3.0;
    assert_eq!(partial_sum_v(0, &op, &data, t).unwrap(), op.zeros());
    assert_eq!(partial_sum_v(1, &op, &data, t).unwrap(), profile_v(0, &op, &data, t).unwrap());
    let diff = partial_sum_v(3, &op, &data, t).unwrap().sub(&partial_sum_v(2, &op, &data, t).unwrap()).unwrap();
    let v2 = profile_v(2, &op, &data, t).unwrap();
    for (a, b) in diff.iter().zip(v2.iter()) {
        assert!((a - b).abs() <= 1e-15);
    }

    let (v, dv) = partial_sum_v_dt(0, &op, &data, t).unwrap();
    assert_eq!((v, dv), (op.zeros(), op.zeros()));
    let d0 = profile_v_dt(0, &op, &data, t).unwrap();
    let v00 = data.v00();
    for (j, l) in op.lambdas().enumerate() {
        let want = -l * (-l * t).exp() * v00[j];
        assert!((d0[j] - want).abs() <= 1e-14 * want.abs());
    }
}

#[test]
fn partial_sum_derivative_matches_central_difference() {
    let (op, data) = sample_problem();
    let h = 1e-5;
    for n in 1..=5 {
        for &t in &[0.5, 2.0, 7.0] {
            let (_, dv) = partial_sum_v_dt(n, &op, &data, t).unwrap();
            let hi = partial_sum_v(n, &op, &data, t + h).unwrap();
            let lo = partial_sum_v(n, &op, &data, t - h).unwrap();
            for j in 0..op.len() {
                let fd = (hi[j] - lo[j]) / (2.0 * h);
                assert!(
                    (dv[j] - fd).abs() <= 1e-6 * dv[j].abs().max(1e-4),
                    "n={n} t={t} mode {j}: {} vs {fd}",
                    dv[j]
                );
            }
        }
    }
}

#[test]
fn vlk_identities() {
    let (op, data) = sample_problem();
    let t = 1.3;
    let v01 = profile_vlk(0, 1, &op, &data, t).unwrap();
    let v00 = data.v00();
    for (j, l) in op.lambdas().enumerate() {
        assert_relative_eq!(v01[j], -(-l * t).exp() * v00[j], max_relative = 1e-15);
    }

    for ell in 0..=6 {
        let diag = profile_vlk(ell, ell, &op, &data, t).unwrap();
        let v = profile_v(ell, &op, &data, t).unwrap();
        for (j, l) in op.lambdas().enumerate() {
            let lhs = l.powi(ell as i32) * diag[j];
            assert!((lhs - v[j]).abs() <= 1e-13 * v[j].abs().max(1e-300) + 1e-300, "ℓ={ell} mode {j}");
        }
    }

    let h = 1e-5;
    for ell in 0..=5 {
        let v1 = profile_vlk(ell, 1, &op, &data, t).unwrap();
        let hi = profile_vlk(ell, 0, &op, &data, t + h).unwrap();
        let lo = profile_vlk(ell, 0, &op, &data, t - h).unwrap();
        for (j, l) in op.lambdas().enumerate() {
            let fd = (hi[j] - lo[j]) / (2.0 * h);
            let want = l * v1[j];
            assert!((fd - want).abs() <= 1e-6 * want.abs().max(1e-4), "ℓ={ell} mode {j}: {fd} vs {want}");
        }
    }
}

/// `e^{-s}(P' - P)`: derivative of `e^{-s} P(s)` in `s`.
fn shifted_derivative(c: &[f64]) -> Vec<f64> {
    let mut d = vec![0.0; c.len()];
    for (i, &x) in c.iter().enumerate() {
        d[i] -= x;
        if i > 0 {
            d[i - 1] += i as f64 * x;
        }
    }
    d
}

#[test]
fn recursion_in_s() {
    // With v_{ℓ,0} = e^{-s} R_ℓ(s), s = λt, the recursion
    // d/dt v_ℓ + λ v_ℓ = -d/dt v_{ℓ-1} reads R_ℓ' = -(R_{ℓ-1}' - R_{ℓ-1}).
    for ell in 1..=6 {
        let (p, q) = vlk_polys(ell, 0).unwrap();
        let (pp, qp) = vlk_polys(ell - 1, 0).unwrap();
        for (cur, prev) in [(p, pp), (q, qp)] {
            let prev_d = shifted_derivative(&prev);
            let cur_d = shifted_derivative(&cur);
            for &s in &[0.0, 0.3, 1.0, 4.0, 11.0] {
                let lhs = (horner(&cur_d, s) + horner(&cur, s)) * (-s).exp();
                let rhs = -horner(&prev_d, s) * (-s).exp();
                assert!((lhs - rhs).abs() <= 1e-8, "ℓ={ell} s={s}: {lhs} vs {rhs}");
            }
        }
    }
}

#[test]
fn recursion_initial_values() {
    let (op, data) = sample_problem();
    // v_{0,0}(0) = u0 + u1 starts the recursion; later orders see only u1.
    // The value is formed as ±(v00 - u0), hence the rounding allowance.
    for ell in 1..=8 {
        let v = profile_vlk(ell, 0, &op, &data, 0.0).unwrap();
        let sign = if ell % 2 == 0 { 1.0 } else { -1.0 };
        for j in 0..op.len() {
            let slack = 2.0 * f64::EPSILON * (data.u0[j].abs() + data.u1[j].abs());
            assert!((v[j] - sign * data.u1[j]).abs() <= slack, "ℓ={ell} mode {j}");
        }
    }
}

#[test]
fn in_jn_examples() {
    for &l in &[0.0, 0.5, 3.0, 1e4] {
        let (i, j) = in_jn(1, l).unwrap();
        assert_relative_eq!(i, 1.0 / (1.0 + l), max_relative = 1e-15);
        assert_relative_eq!(j, 1.0 / (1.0 + l), max_relative = 1e-15);
    }
    let (i, j) = in_jn(2, 1.0).unwrap();
    assert_relative_eq!(i, 0.5, max_relative = 1e-15);
    assert_relative_eq!(j, 0.5, max_relative = 1e-15);
    assert!(in_jn(0, 1.0).is_err());
    assert!(in_jn(17, 1.0).is_err());
}

#[test]
fn in_jn_partition_on_log_grid() {
    let mut grid = vec![0.0];
    grid.extend((0..=240).map(|i| 10f64.powf(-6.0 + i as f64 * 0.05)));
    for n in 1..=8 {
        for &l in &grid {
            let (i, j) = in_jn(n, l).unwrap();
            let err = (i + l.powi(n as i32) * j - 1.0).abs();
            assert!(err <= 1e-12, "n={n} λ={l}: {err:e}");
        }
    }
}

#[test]
fn regularization() {
    let (op, data) = sample_problem();
    for n in 1..=6 {
        let reg = regularize(n, &op, &data).unwrap();
        let back = reg.recompose(&op).unwrap();
        for (x, y) in back.u0.iter().chain(back.u1.iter()).zip(data.u0.iter().chain(data.u1.iter())) {
            assert!((x - y).abs() <= 1e-12 * y.abs().max(1e-300));
        }
    }
    let reg = regularize(1, &op, &data).unwrap();
    assert_eq!(reg.star.u0[0], data.u0[0]);
    assert_eq!(reg.starstar.u1[0], data.u1[0]);

    let sup = (0..=800)
        .map(|i| 10f64.powf(i as f64 * 0.01))
        .chain([0.0, 1e8])
        .map(|l| l * in_jn(1, l).unwrap().0)
        .fold(0.0f64, f64::max);
    assert!(sup < 1.0 && sup > 1.0 - 1e-7, "sup {sup}");
}

#[test]
fn remainder_examples() {
    let (op, data) = sample_problem();
    let (r, rp) = remainder(0, &op, &data, 0.0).unwrap();
    assert_eq!((r, rp), (data.u0.clone(), data.u1.clone()));

    let (b, a) = (0.8, -0.3);
    let (op, data) = single(0.0, a, b);
    for &t in &[0.0, 0.5, 4.0] {
        let (r, rp) = remainder(1, &op, &data, t).unwrap();
        assert!((r[0] + b * (-t as f64).exp()).abs() <= 1e-15);
        assert!((rp[0] - b * (-t as f64).exp()).abs() <= 1e-15);
    }
}

#[test]
fn error_equation_oracle() {
    let (a, b) = (0.6, -1.1);
    assert!((err_equation_oracle(1, 0.7, a, b, 0.0, 1e-10).unwrap() + b).abs() <= 1e-12);
    for &t in &[0.5, 3.0] {
        let v = err_equation_oracle(1, 0.0, a, b, t, 1e-10).unwrap();
        assert!((v + b * (-t as f64).exp()).abs() <= 1e-8);
    }
    for n in 1..=2 {
        for &l in &[0.01, 0.25, 2.0] {
            let (op, data) = single(l, a, b);
            for &t in &[0.0, 1.0, 2.5, 5.0, 10.0] {
                let oracle = err_equation_oracle(n, l, a, b, t, 1e-10).unwrap();
                let (r, _) = remainder(n, &op, &data, t).unwrap();
                assert!((r[0] - oracle).abs() <= 1e-6, "n={n} λ={l} t={t}: {} vs {oracle}", r[0]);
            }
        }
    }
}

#[test]
fn profile_decay_bound() {
    let (op, data) = sample_problem();
    for ell in 0..=6 {
        let k = profile_decay_constant(ell).unwrap();
        assert!(k.is_finite() && k > 0.0);
        for &t in &[1.0, 2.0, 10.0, 100.0, 1000.0] {
            let v = profile_v(ell, &op, &data, t).unwrap();
            let v00 = data.v00();
            for j in 0..op.len() {
                let bound = k * t.powi(-(ell as i32)) * (v00[j].abs() + data.u0[j].abs());
                assert!(v[j].abs() <= bound * (1.0 + 1e-12), "ℓ={ell} t={t} mode {j}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn partition_of_unity(n in 1usize..=8, zero in prop::bool::weighted(0.05), log_l in -6.0f64..6.0) {
        let l = if zero { 0.0 } else { 10f64.powf(log_l) };
        let (i, j) = in_jn(n, l).unwrap();
        prop_assert!((i + l.powi(n as i32) * j - 1.0).abs() <= 1e-12);
        prop_assert!(i >= 0.0 && j >= 0.0);
    }

    #[test]
    fn decomposition_identity(
        n in 1usize..=3,
        lambda in prop_oneof![Just(0.0), 0.001f64..5.0],
        a in -2.0f64..2.0,
        b in -2.0f64..2.0,
        t in 0.0f64..8.0,
    ) {
        let (op, data) = single(lambda, a, b);
        let (u, _) = evolve(&op, &data, t).unwrap();
        let profiles: f64 = (0..n)
            .map(|ell| lambda.powi(ell as i32) * profile_vlk(ell, ell, &op, &data, t).unwrap()[0])
            .sum();
        let tail = err_equation_oracle(n, lambda, a, b, t, 1e-10).unwrap();
        prop_assert!((u[0] - profiles - tail).abs() <= 1e-6 * (a.abs() + b.abs()).max(1.0),
            "{} vs {}", u[0], profiles + tail);
    }
}
