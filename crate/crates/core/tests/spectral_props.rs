use std::f64::consts::E;

use approx::assert_relative_eq;
use num_complex::Complex64;
use proptest::prelude::*;

use dampwave::spectral::{
    apply_power, evolve, evolve_derivative, heat_apply, heat_mode, mode_derivative, mode_solve, CauchyPair,
    EigenMode, ModalOperator, ModalVector,
};

/// Classical RK4 on `w'' + λw + w' = 0` with a step small against `1/√λ`.
fn rk4(lambda: f64, a: f64, b: f64, t: f64) -> (f64, f64) {
    if t == 0.0 {
        return (a, b);
    }
    let h_max = if lambda > 1.0 { 2e-3 / lambda.sqrt() } else { 1e-4 };
    let steps = (t / h_max.min(1e-4)).ceil() as usize;
    let h = t / steps as f64;
    let f = |y: [f64; 2]| [y[1], -lambda * y[0] - y[1]];
    let mut y = [a, b];
    for _ in 0..steps {
        let k1 = f(y);
        let k2 = f([y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]]);
        let k3 = f([y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]]);
        let k4 = f([y[0] + h * k3[0], y[1] + h * k3[1]]);
        for i in 0..2 {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    (y[0], y[1])
}

fn single(lambda: f64, a: f64, b: f64) -> (ModalOperator, CauchyPair) {
    let op = ModalOperator::from_eigenvalues("single", &[lambda]).unwrap();
    let data = CauchyPair::new(ModalVector::new(vec![a]), ModalVector::new(vec![b])).unwrap();
    (op, data)
}

#[test]
fn zero_mode_settles_at_a_plus_b() {
    let s = mode_solve(0.0, 1.0, 1.0, 40.0).unwrap();
    assert!((s.value - 2.0).abs() <= 1e-15);
    assert!(s.derivative.abs() <= 1e-15);
}

#[test]
fn critical_mode_matches_rk4() {
    let s = mode_solve(0.25, 1.0, 0.0, 2.0).unwrap();
    let (w, _) = rk4(0.25, 1.0, 0.0, 2.0);
    assert!((s.value - w).abs() < 1e-10);
    assert_relative_eq!(s.value, 2.0 / E, max_relative = 1e-12);
}

#[test]
fn underdamped_mode_matches_rk4() {
    let s = mode_solve(1.0, 1.0, 0.0, 1.0).unwrap();
    let (w, wp) = rk4(1.0, 1.0, 0.0, 1.0);
    assert!((s.value - w).abs() < 1e-10);
    assert!((s.derivative - wp).abs() < 1e-10);
    assert!((s.value - 0.660).abs() < 5e-4);
}

#[test]
fn initial_state_is_the_data() {
    let s = mode_solve(1.0, 0.0, 1.0, 0.0).unwrap();
    assert_eq!((s.value, s.derivative), (0.0, 1.0));
}

#[test]
fn rejects_negative_arguments() {
    assert!(mode_solve(-1.0, 1.0, 0.0, 1.0).is_err());
    assert!(mode_solve(1.0, 1.0, 0.0, -1.0).is_err());
    assert!(mode_derivative(1.0, 1.0, 0.0, 1.0, 13).is_err());
    let (op, _) = single(1.0, 1.0, 0.0);
    let f = ModalVector::new(vec![1.0]);
    assert!(apply_power(&op, &f, -0.5).is_err());
    let short = CauchyPair::new(ModalVector::new(vec![]), ModalVector::new(vec![])).unwrap();
    assert!(evolve(&op, &short, 1.0).is_err());
}

#[test]
fn evolve_at_zero_and_on_the_zero_mode() {
    let op = ModalOperator::from_eigenvalues("three", &[0.0, 0.3, 7.0]).unwrap();
    let data = CauchyPair::new(
        ModalVector::new(vec![0.5, -1.0, 2.0]),
        ModalVector::new(vec![1.5, 0.25, -3.0]),
    )
    .unwrap();
    let (u, up) = evolve(&op, &data, 0.0).unwrap();
    assert_eq!(u, data.u0);
    assert_eq!(up, data.u1);

    let (op, data) = single(0.0, 0.0, 1.0);
    let (u, _) = evolve(&op, &data, 3.0).unwrap();
    assert_relative_eq!(u[0], 1.0 - (-3.0f64).exp(), max_relative = 1e-15);
}

#[test]
fn second_derivative_of_the_zero_mode() {
    // w = 1 - e^{-t}, so w'' = -e^{-t}.
    let (op, data) = single(0.0, 0.0, 1.0);
    let (u2, u3) = evolve_derivative(&op, &data, 1.0, 2).unwrap();
    assert_relative_eq!(u2[0], -1.0 / E, max_relative = 1e-14);
    assert_relative_eq!(u3[0], 1.0 / E, max_relative = 1e-14);
}

#[test]
fn first_derivative_matches_central_difference() {
    let h = 1e-5;
    for &lambda in &[0.0, 0.1, 0.25, 0.9, 12.0] {
        let (op, data) = single(lambda, 0.7, -0.4);
        for &t in &[0.5, 2.0, 6.0] {
            let (d, _) = evolve_derivative(&op, &data, t, 1).unwrap();
            let fd = (evolve(&op, &data, t + h).unwrap().0[0] - evolve(&op, &data, t - h).unwrap().0[0]) / (2.0 * h);
            assert!(
                (d[0] - fd).abs() <= 1e-6 * d[0].abs().max(1e-3),
                "λ={lambda} t={t}: {} vs {fd}",
                d[0]
            );
        }
    }
}

#[test]
fn heat_mode_values_and_semigroup() {
    assert_eq!(heat_mode(3.0, 0.0).unwrap(), 1.0);
    assert_relative_eq!(heat_mode(2.0, 0.5).unwrap(), (-1.0f64).exp(), max_relative = 1e-15);
    for &l in &[0.0, 0.5, 4.0] {
        let prod = heat_mode(l, 0.3).unwrap() * heat_mode(l, 1.1).unwrap();
        assert_relative_eq!(heat_mode(l, 1.4).unwrap(), prod, max_relative = 1e-14);
    }
    assert!(heat_mode(-1.0, 1.0).is_err());
}

#[test]
fn heat_apply_and_powers() {
    let op = ModalOperator::new(
        "weighted",
        vec![
            EigenMode::new(0.0, 0.5).unwrap(),
            EigenMode::new(0.4, 1.0).unwrap(),
            EigenMode::new(3.0, 2.0).unwrap(),
        ],
    )
    .unwrap();
    let f = ModalVector::new(vec![1.0, -2.0, 0.5]);
    assert_eq!(heat_apply(&op, &f, 0.0).unwrap(), f);
    let mut last = f64::INFINITY;
    for &t in &[0.0, 0.1, 1.0, 10.0] {
        let n = op.norm(&heat_apply(&op, &f, t).unwrap()).unwrap();
        assert!(n <= last);
        last = n;
    }

    assert_eq!(apply_power(&op, &f, 0.0).unwrap(), f);
    let twice = apply_power(&op, &apply_power(&op, &f, 1.0).unwrap(), 1.0).unwrap();
    let once = apply_power(&op, &f, 2.0).unwrap();
    for (a, b) in twice.iter().zip(once.iter()) {
        assert!((a - b).abs() <= 1e-15 * b.abs().max(1.0));
    }
    let half = apply_power(&op, &f, 0.5).unwrap();
    let seminorm: f64 = op.modes().iter().zip(f.iter()).map(|(m, c)| m.weight * m.lambda * c * c).sum();
    assert_relative_eq!(op.norm_sq(&half).unwrap(), seminorm, max_relative = 1e-14);
}

/// Value of `c₊e^{r₊t} + c₋e^{r₋t}` with complex roots when `λ > 1/4`.
fn characteristic(lambda: f64, a: f64, b: f64, t: f64) -> f64 {
    let disc = Complex64::new(1.0 - 4.0 * lambda, 0.0).sqrt();
    let rp = (-1.0 + disc) / 2.0;
    let rm = (-1.0 - disc) / 2.0;
    let cp = (b - rm * a) / (rp - rm);
    let cm = (rp * a - b) / (rp - rm);
    (cp * (rp * t).exp() + cm * (rm * t).exp()).re
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn matches_rk4(
        log_l in -4.0f64..6.0,
        zero in prop::bool::weighted(0.1),
        a in -10.0f64..10.0,
        b in -10.0f64..10.0,
        t in 0.0f64..20.0,
    ) {
        let lambda = if zero { 0.0 } else { 10f64.powf(log_l) };
        let s = mode_solve(lambda, a, b, t).unwrap();
        let (w, _) = rk4(lambda, a, b, t);
        prop_assert!((s.value - w).abs() <= 1e-8 * (a.abs() + b.abs()).max(1e-12),
            "λ={} a={} b={} t={}: {} vs {}", lambda, a, b, t, s.value, w);
    }

    #[test]
    fn continuous_across_critical_value(
        a in -10.0f64..10.0,
        b in -10.0f64..10.0,
        t in 0.0f64..40.0,
    ) {
        let mid = mode_solve(0.25, a, b, t).unwrap();
        for l in [0.25 - 1e-9, 0.25 + 1e-9] {
            let s = mode_solve(l, a, b, t).unwrap();
            prop_assert!((s.value - mid.value).abs() <= 1e-6);
            prop_assert!((s.derivative - mid.derivative).abs() <= 1e-6);
        }
    }

    #[test]
    fn agrees_with_characteristic_roots(
        lambda in prop_oneof![0.0f64..0.2499, 0.2501f64..50.0],
        a in -10.0f64..10.0,
        b in -10.0f64..10.0,
        t in 0.0f64..20.0,
    ) {
        let s = mode_solve(lambda, a, b, t).unwrap();
        let c = characteristic(lambda, a, b, t);
        let scale = (a.abs() + b.abs()).max(1e-12) * (-0.5 * t).exp().max((-t).exp());
        prop_assert!((s.value - c).abs() <= 1e-12 * scale.max(c.abs()) + 1e-15 * (a.abs() + b.abs()));
    }

    #[test]
    fn derivatives_satisfy_the_equation(
        lambda in 0.0f64..100.0,
        a in -5.0f64..5.0,
        b in -5.0f64..5.0,
        t in 0.0f64..15.0,
        k in 0usize..=10,
    ) {
        let lo = mode_derivative(lambda, a, b, t, k).unwrap();
        let hi = mode_derivative(lambda, a, b, t, k + 1).unwrap();
        prop_assert_eq!(lo.derivative, hi.value);
        let residual = hi.derivative + lo.derivative + lambda * lo.value;
        let size = hi.derivative.abs() + lo.derivative.abs() + lambda * lo.value.abs();
        prop_assert!(residual.abs() <= 1e-10 * size.max(1.0), "residual {}", residual);
    }

    #[test]
    fn order_zero_is_evolve(
        lambdas in prop::collection::vec(0.0f64..20.0, 1..6),
        t in 0.0f64..10.0,
        seed in 0u64..1000,
    ) {
        let mut lambdas = lambdas;
        lambdas.sort_by(f64::total_cmp);
        let n = lambdas.len();
        let op = ModalOperator::from_eigenvalues("random", &lambdas).unwrap();
        let coeff = |j: usize, s: u64| (((j as u64 + 1) * 2654435761 + s) % 1000) as f64 / 500.0 - 1.0;
        let data = CauchyPair::new(
            ModalVector::new((0..n).map(|j| coeff(j, seed)).collect()),
            ModalVector::new((0..n).map(|j| coeff(j, seed + 17)).collect()),
        ).unwrap();
        let direct = evolve(&op, &data, t).unwrap();
        let via = evolve_derivative(&op, &data, t, 0).unwrap();
        prop_assert_eq!(direct, via);
    }
}
