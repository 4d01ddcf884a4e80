use approx::assert_relative_eq;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use dampwave::rates::{
    check_decay, fit_loglog, fit_window, log_corrected_fit, plateau_check, sample_schedule, samples, RateSample,
};

fn series(t: &[f64], mut f: impl FnMut(f64) -> f64) -> Vec<RateSample> {
    t.iter().map(|&t| RateSample::new(t, f(t))).collect()
}

#[test]
fn schedule() {
    assert!(sample_schedule(1.0, 100.0, 3).is_err());
    assert!(sample_schedule(0.0, 100.0, 5).is_err());
    let t = sample_schedule(1.0, 100.0, 5).unwrap();
    let want = [1.0, 10f64.sqrt(), 10.0, 10f64.powf(1.5), 100.0];
    assert_eq!(t[0], 1.0);
    assert_eq!(t[4], 100.0);
    for (a, b) in t.iter().zip(want) {
        assert_relative_eq!(*a, b, max_relative = 1e-14);
    }
}

#[test]
fn exact_and_constant_laws() {
    let t = sample_schedule(1.0, 1e3, 30).unwrap();
    let fit = fit_loglog(&series(&t, |t| t.powi(-3))).unwrap();
    assert!((fit.slope + 3.0).abs() <= 1e-12 && fit.rms_residual <= 1e-12);
    assert_eq!(fit.samples_used, 30);
    let fit = fit_loglog(&series(&t, |_| 4.2)).unwrap();
    assert!(fit.slope.abs() <= 1e-12);
    assert!(fit_loglog(&series(&[1.0, 1.0, 1.0, 1.0], |_| 2.0)).is_err());
}

#[test]
fn noisy_power_law() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let noise = Normal::new(0.0, 1.0).unwrap();
    let t = sample_schedule(1.0, 1e4, 60).unwrap();
    let s = series(&t, |t| 5.0 * t.powf(-1.5) * (1.0 + 0.01 * noise.sample(&mut rng)));
    let fit = fit_loglog(&s).unwrap();
    assert!((-1.55..=-1.45).contains(&fit.slope), "slope {}", fit.slope);
}

#[test]
fn underflow_is_dropped() {
    let t = sample_schedule(1.0, 100.0, 10).unwrap();
    let mut s = series(&t, |t| t.powi(-2));
    s[3].value = 0.0;
    s[7].value = 1e-320;
    let fit = fit_loglog(&s).unwrap();
    assert_eq!(fit.dropped, 2);
    assert!((fit.slope + 2.0).abs() <= 1e-12);
}

#[test]
fn window_discards_early_samples() {
    let t = sample_schedule(0.1, 1e5, 50).unwrap();
    // A transient that dies out early biases the full fit but not the window.
    let s = series(&t, |t| t.powi(-2) * (1.0 + 30.0 * (-20.0 * t).exp()));
    let fit = fit_window(&s, 0.2).unwrap();
    assert!((fit.slope + 2.0).abs() <= 1e-6);
    assert!((fit_loglog(&s).unwrap().slope + 2.0).abs() > 0.01);
    assert!(fit.window.0 > t[9]);
}

#[test]
fn log_corrected() {
    let t = sample_schedule(2.0, 1e5, 40).unwrap();
    let s = series(&t, |t| t.powf(-0.5) / t.ln());
    let (lo, hi) = log_corrected_fit(&s, 0.5, 1.0).unwrap();
    assert!((hi / lo - 1.0).abs() <= 1e-12);

    let s = series(&t, |t| t.powf(-0.5));
    let (lo, hi) = log_corrected_fit(&s, 0.5, 1.0).unwrap();
    assert_relative_eq!(hi / lo, 1e5f64.ln() / 2f64.ln(), max_relative = 1e-12);

    let early = series(&[1.5, 3.0, 5.0], |t| t);
    assert!(log_corrected_fit(&early, 0.5, 1.0).is_err());
}

#[test]
fn plateaus() {
    let t = sample_schedule(1.0, 100.0, 21).unwrap();
    let p = plateau_check(&series(&t, |_| 3.0), 0.5).unwrap();
    assert_eq!(p.ratio, 1.0);
    let p = plateau_check(&series(&t, |t| t.powf(0.1)), 0.5).unwrap();
    assert_relative_eq!(p.ratio, 10f64.powf(0.1), max_relative = 1e-12);
    assert!(plateau_check(&[], 0.5).is_err());
    assert!(plateau_check(&series(&t, |_| 1.0), 0.0).is_err());
}

#[test]
fn decay_verdicts() {
    let t = sample_schedule(1.0, 1e3, 25).unwrap();
    let s = series(&t, |t| 2.0 * t.powf(-1.25));
    assert!(check_decay(&s, -1.25, 0.05).unwrap().passed);
    let off = check_decay(&s, -1.25 + 0.1, 0.05).unwrap();
    assert!(!off.passed);
    assert!((off.gap - 0.1).abs() <= 1e-10);
}

#[test]
fn samples_pairs_in_order() {
    let s = samples(&[1.0, 2.0], &[3.0, 4.0]);
    assert_eq!(s, vec![RateSample::new(1.0, 3.0), RateSample::new(2.0, 4.0)]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exact_power_laws(p in -6.0f64..2.0, c in 1e-3f64..1e3, t0 in 0.1f64..10.0, decades in 1.0f64..5.0) {
        let t = sample_schedule(t0, t0 * 10f64.powf(decades), 24).unwrap();
        let fit = fit_loglog(&series(&t, |t| c * t.powf(p))).unwrap();
        prop_assert!((fit.slope - p).abs() <= 1e-10);
        prop_assert!(fit.rms_residual <= 1e-12);
    }

    #[test]
    fn slope_ignores_rescaling(p in -4.0f64..0.0, c in 1e-6f64..1e6, wiggle in 0.0f64..0.3) {
        let t = sample_schedule(1.0, 1e4, 30).unwrap();
        let base = series(&t, |t| t.powf(p) * (1.0 + wiggle * t.ln().sin()));
        let scaled: Vec<RateSample> = base.iter().map(|s| RateSample::new(s.t, c * s.value)).collect();
        let (a, b) = (fit_loglog(&base).unwrap(), fit_loglog(&scaled).unwrap());
        prop_assert!((a.slope - b.slope).abs() <= 1e-10);
        prop_assert!((b.intercept - a.intercept - c.ln()).abs() <= 1e-9);
    }

    #[test]
    fn plateau_ignores_reindexing(seed in 0u64..1000, fraction in 0.1f64..1.0) {
        let t = sample_schedule(1.0, 1e3, 20).unwrap();
        let s = series(&t, |t| 1.0 + ((t * (seed as f64 + 1.0)).sin()).abs());
        let mut shuffled = s.clone();
        shuffled.reverse();
        shuffled.rotate_left((seed % 20) as usize);
        prop_assert_eq!(plateau_check(&s, fraction).unwrap(), plateau_check(&shuffled, fraction).unwrap());
    }
}
