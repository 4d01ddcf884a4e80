//! Invariant suite behind `dampwave verify`. `fast` checks every module's
//! properties at small sizes; `full` adds the acceptance criteria.

pub mod acceptance;

use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::domains::{
    build_interval, build_radial_projected, build_whole_line, gaussian_transform, harmonic_profile, tridiag_eigh,
    DomainSpec,
};
use crate::error::Result;
use crate::expansion::{
    err_equation_oracle, in_jn_with, lambda_exp_poly, profile_decay_constant, profile_v, profile_vlk, remainder,
    vlk_polys,
};
use crate::functionals::{energy, h_norm_sq};
use crate::numeric::BinomialTable;
use crate::oracle::{gaussian_heat_norm_sq, rk4_mode, shell3d_eigenvalue};
use crate::rates::{fit_loglog, plateau_check, sample_schedule, samples, RateSample};
use crate::runner::{self, DataSpec, ExperimentConfig, Generator, Metric, Schedule};
use crate::spectral::{evolve, evolve_derivative, heat_apply, mode_solve, CauchyPair, ModalOperator};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Level {
    Fast,
    Full,
}

/// Deliberate defects for checking that the suite notices them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Fault {
    /// Off-by-one entry in the binomial table used by `in_jn`.
    CorruptBinomials,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Options {
    pub fault: Option<Fault>,
}

impl Options {
    /// The binomial table `in_jn` checks should use.
    pub fn binomials(&self) -> BinomialTable {
        let shared = BinomialTable::shared();
        match self.fault {
            Some(Fault::CorruptBinomials) => shared.corrupted(5, 2, 1),
            None => shared.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub module: String,
    pub op: String,
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub level: Level,
    pub passed: bool,
    pub total: usize,
    pub failed: usize,
    pub checks: Vec<CheckResult>,
}

impl Summary {
    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Runs `body` and records its verdict; an `Err` counts as a failure.
pub fn check<F>(module: &str, op: &str, name: &str, body: F) -> CheckResult
where
    F: FnOnce() -> Result<(bool, String)>,
{
    let start = Instant::now();
    let (passed, detail) = match body() {
        Ok(v) => v,
        Err(e) => (false, format!("error: {e}")),
    };
    CheckResult {
        module: module.into(),
        op: op.into(),
        name: name.into(),
        passed,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    }
}

pub fn run_suite(level: Level, options: Options) -> Summary {
    let mut checks = fast_checks(&options);
    if level == Level::Full {
        checks.extend(acceptance::run_all(&options));
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    Summary {
        level,
        passed: failed == 0,
        total: checks.len(),
        failed,
        checks,
    }
}

/// Seeded random operator and data with `n` modes, eigenvalues log-uniform
/// in `[lo, hi]`, weights in `[0.5, 1.5]`.
pub fn random_problem(seed: u64, n: usize, lo: f64, hi: f64) -> (ModalOperator, CauchyPair) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (a, b) = (lo.ln(), hi.ln());
    let mut lambdas: Vec<f64> = (0..n).map(|_| (a + (b - a) * rng.gen::<f64>()).exp()).collect();
    lambdas.sort_by(f64::total_cmp);
    let modes = lambdas
        .into_iter()
        .map(|l| crate::EigenMode::new(l, 0.5 + rng.gen::<f64>()).expect("valid mode"))
        .collect();
    let op = ModalOperator::new("random", modes).expect("valid operator");
    let u0: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let u1: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let data = CauchyPair::new(u0.into(), u1.into()).expect("matching lengths");
    (op, data)
}

fn single(lambda: f64, a: f64, b: f64) -> Result<(ModalOperator, CauchyPair)> {
    Ok((
        ModalOperator::from_eigenvalues("single", &[lambda])?,
        CauchyPair::new(vec![a].into(), vec![b].into())?,
    ))
}

fn fast_checks(options: &Options) -> Vec<CheckResult> {
    vec![
        check("spectral", "mode_solve", "agrees with RK4", || {
            let mut worst: f64 = 0.0;
            for lambda in [0.0, 0.1, 0.249_999_9, 0.25, 0.250_000_1, 3.0, 1e4] {
                for (a, b) in [(1.0, 0.0), (0.0, 1.0), (-2.0, 3.0)] {
                    for t in [0.5, 2.0, 7.0] {
                        let w = mode_solve(lambda, a, b, t)?;
                        let (v, _) = rk4_mode(lambda, a, b, t);
                        worst = worst.max((w.value - v).abs() / (a.abs() + b.abs()));
                    }
                }
            }
            Ok((worst <= 1e-8, format!("max error {worst:.2e} (tol 1e-8)")))
        }),
        check("spectral", "mode_solve", "continuity at the critical eigenvalue", || {
            let mut worst: f64 = 0.0;
            for t in [0.1, 1.0, 10.0, 20.0] {
                let c = mode_solve(0.25, 1.0, -0.3, t)?.value;
                for d in [-1e-9, 1e-9] {
                    worst = worst.max((mode_solve(0.25 + d, 1.0, -0.3, t)?.value - c).abs());
                }
            }
            Ok((worst <= 1e-6, format!("max jump {worst:.2e} (tol 1e-6)")))
        }),
        check("spectral", "mode_solve", "characteristic-root reconstruction", || {
            let mut worst: f64 = 0.0;
            for lambda in [0.05, 0.2, 0.3, 2.0, 50.0] {
                let (a, b) = (0.7, -1.3);
                let root = Complex64::new(1.0 - 4.0 * lambda, 0.0).sqrt();
                let rp = (-1.0 + root) / 2.0;
                let rm = (-1.0 - root) / 2.0;
                let cp = (b - rm * a) / (rp - rm);
                let cm = (rp * a - b) / (rp - rm);
                for t in [0.5, 3.0, 12.0] {
                    let exact = cp * (rp * t).exp() + cm * (rm * t).exp();
                    let scale = (cp * (rp * t).exp()).norm() + (cm * (rm * t).exp()).norm();
                    let w = mode_solve(lambda, a, b, t)?.value;
                    worst = worst.max((w - exact.re).abs() / scale);
                }
            }
            Ok((worst <= 1e-12, format!("max relative deviation {worst:.2e} (tol 1e-12)")))
        }),
        check("spectral", "evolve_derivative", "differentiated equation residual", || {
            let (op, data) = random_problem(11, 24, 1e-2, 40.0);
            let mut worst: f64 = 0.0;
            for t in [0.3, 2.0, 9.0] {
                for k in 0..6 {
                    let (dk, dk1) = evolve_derivative(&op, &data, t, k)?;
                    let (_, dk2) = evolve_derivative(&op, &data, t, k + 1)?;
                    for (j, m) in op.modes().iter().enumerate() {
                        let scale = dk2[j].abs() + m.lambda * dk[j].abs() + dk1[j].abs();
                        if scale > 0.0 {
                            let r = dk2[j] + m.lambda * dk[j] + dk1[j];
                            worst = worst.max(r.abs() / scale);
                        }
                    }
                }
            }
            Ok((worst <= 1e-10, format!("max relative residual {worst:.2e} (tol 1e-10)")))
        }),
        check("expansion", "in_jn", "partition of unity", || {
            let table = options.binomials();
            partition_of_unity(&table, 20)
        }),
        check("expansion", "vlk_polys", "recursion between consecutive profiles", || {
            // d/dt [P(λt) e^{-λt}] = λ (P' - P)(λt) e^{-λt}, from the coefficients.
            let dt = |poly: &[f64], lambda: f64, t: f64| -> f64 {
                let mut d: Vec<f64> = poly.iter().map(|c| -c).collect();
                for (j, c) in poly.iter().enumerate().skip(1) {
                    d[j - 1] += j as f64 * c;
                }
                lambda * lambda_exp_poly(0, lambda, t, &d)
            };
            let (v00, u0) = (0.8, -0.4);
            let mut worst: f64 = 0.0;
            for lambda in [0.01, 0.3, 2.0, 10.0] {
                for t in [0.5, 3.0, 10.0] {
                    for ell in 1..=6 {
                        let (p, q) = vlk_polys(ell, 0)?;
                        let (pp, qp) = vlk_polys(ell - 1, 0)?;
                        let v = lambda_exp_poly(0, lambda, t, &p) * v00 - lambda_exp_poly(0, lambda, t, &q) * u0;
                        let dv = dt(&p, lambda, t) * v00 - dt(&q, lambda, t) * u0;
                        let dprev = dt(&pp, lambda, t) * v00 - dt(&qp, lambda, t) * u0;
                        let scale = dv.abs() + lambda * v.abs() + dprev.abs() + 1e-300;
                        worst = worst.max((dv + lambda * v + dprev).abs() / scale);
                    }
                }
            }
            Ok((worst <= 1e-8, format!("max relative residual {worst:.2e} (tol 1e-8)")))
        }),
        check("expansion", "profile_vlk", "initial values", || {
            let (op, data) = random_problem(12, 16, 1e-3, 1e3);
            let mut worst: f64 = 0.0;
            for ell in 1..=6 {
                let v = profile_vlk(ell, 0, &op, &data, 0.0)?;
                let sign = if ell % 2 == 0 { 1.0 } else { -1.0 };
                for j in 0..op.len() {
                    let scale = data.u0[j].abs() + data.u1[j].abs();
                    worst = worst.max((v[j] - sign * data.u1[j]).abs() / scale);
                }
            }
            Ok((worst <= 4.0 * f64::EPSILON, format!("max deviation {worst:.2e} (rounding of u0 + u1)")))
        }),
        check("expansion", "remainder", "decomposition identity against the error equation", || {
            let mut worst: f64 = 0.0;
            for n in 1..=3 {
                for lambda in [0.05, 0.25, 1.5] {
                    let (a, b) = (0.6, -1.1);
                    let (op, data) = single(lambda, a, b)?;
                    for t in [0.7, 4.0] {
                        let r = remainder(n, &op, &data, t)?.0[0];
                        let o = err_equation_oracle(n, lambda, a, b, t, 1e-10)?;
                        worst = worst.max((r - o).abs());
                    }
                }
            }
            Ok((worst <= 1e-6, format!("max difference {worst:.2e} (tol 1e-6)")))
        }),
        check("expansion", "profile_decay_constant", "profile decay bound", || {
            let (op, data) = random_problem(13, 32, 1e-3, 1e2);
            let v00 = data.v00();
            let mut worst: f64 = 0.0;
            for ell in 0..=6 {
                let k = profile_decay_constant(ell)?;
                if !k.is_finite() {
                    return Ok((false, format!("K_{ell} = {k}")));
                }
                for t in [1.0, 5.0, 40.0] {
                    let v = profile_v(ell, &op, &data, t)?;
                    for j in 0..op.len() {
                        let bound = k * t.powi(-(ell as i32)) * (v00[j].abs() + data.u0[j].abs());
                        worst = worst.max(v[j].abs() / bound);
                    }
                }
            }
            Ok((worst <= 1.0 + 1e-9, format!("max |v|/bound = {worst:.4}")))
        }),
        check("functionals", "energy", "monotone in time", || {
            let mut ok = true;
            for seed in 0..10 {
                let (op, data) = random_problem(100 + seed, 32, 1e-3, 1e2);
                let mut prev = f64::INFINITY;
                for t in sample_schedule(0.01, 50.0, 40)? {
                    let (u, up) = evolve(&op, &data, t)?;
                    let e = energy(&op, &u, &up)?;
                    ok &= e <= prev * (1.0 + 1e-14);
                    prev = e;
                }
            }
            Ok((ok, "10 random data, 40 times each".into()))
        }),
        check("functionals", "h_norm_sq", "sharp-norm dissipation", sharp_norm_ratio),
        check("functionals", "h_norm_sq", "sharp norm plus weighted energy bound", || {
            let mut rng = ChaCha8Rng::seed_from_u64(21);
            let mut worst: f64 = 0.0;
            for i in 0..200 {
                let (op, data) = random_problem(1000 + i, 12, 1e-3, 1e2);
                let t = 50.0 * rng.gen::<f64>();
                let (u, up) = evolve(&op, &data, t)?;
                let lhs = 2.0 * h_norm_sq(&op, &u, &up)? + t * energy(&op, &u, &up)?;
                let rhs = 2.0 * h_norm_sq(&op, &data.u0, &data.u1)?;
                worst = worst.max(lhs / rhs);
            }
            Ok((worst <= 1.0 + 1e-12, format!("max lhs/rhs {worst:.6}")))
        }),
        check("functionals", "h_norm_sq", "agrees with its energy decomposition", || {
            let (op, data) = random_problem(14, 48, 1e-3, 1e2);
            let mut worst: f64 = 0.0;
            for t in [0.0, 1.0, 10.0] {
                let (u, up) = evolve(&op, &data, t)?;
                let direct = h_norm_sq(&op, &u, &up)?;
                let mid = up.add(&u.scale(0.5))?;
                let sqrt_a = crate::spectral::apply_power(&op, &u, 0.5)?;
                let rebuilt = op.norm_sq(&sqrt_a)? + op.norm_sq(&mid)? + 0.25 * op.norm_sq(&u)?;
                worst = worst.max((direct - rebuilt).abs() / rebuilt);
            }
            Ok((worst <= 1e-12, format!("max relative gap {worst:.2e}")))
        }),
        check("functionals", "energy", "strong-solution derivative rates", || {
            let line = build_whole_line(1e-3, 50.0, 2000)?;
            let f = line.from_spectrum(|xi| gaussian_transform(1.0, xi));
            let data = CauchyPair::new(f.clone(), f)?;
            let t = sample_schedule(10.0, 1e4, 20)?;
            let mut detail = Vec::new();
            let mut ok = true;
            for n in 1..=2 {
                let v: Vec<f64> = t
                    .iter()
                    .map(|&t| Ok(line.operator().norm_sq(&evolve_derivative(line.operator(), &data, t, n)?.0)?))
                    .collect::<Result<_>>()?;
                let fit = crate::rates::fit_window(&samples(&t, &v), crate::rates::DEFAULT_DISCARD)?;
                ok &= fit.slope <= -2.0 * n as f64 + 0.2;
                detail.push(format!("n={n}: slope {:.3}", fit.slope));
            }
            Ok((ok, detail.join(", ")))
        }),
        check("domains", "build_interval", "exact spectrum and orthonormal modes", || {
            let d = build_interval(2.0, 64)?;
            let mut worst: f64 = 0.0;
            for (k, l) in d.operator().lambdas().enumerate() {
                let exact = ((k + 1) as f64 * std::f64::consts::PI / 2.0).powi(2);
                worst = worst.max((l - exact).abs() / exact);
            }
            let defect = d.orthonormality_defect();
            Ok((
                worst <= 1e-14 && defect <= 1e-10,
                format!("eigenvalue error {worst:.1e}, orthonormality defect {defect:.1e}"),
            ))
        }),
        check("domains", "tridiag_eigh", "2x2 and residuals", || {
            let e = tridiag_eigh(&[2.0, 2.0], &[1.0])?;
            let small = (e.values[0] - 1.0).abs() < 1e-14 && (e.values[1] - 3.0).abs() < 1e-14;
            let mut rng = ChaCha8Rng::seed_from_u64(5);
            let n = 200;
            let d: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let o: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let e = tridiag_eigh(&d, &o)?;
            let norm = d.iter().chain(&o).fold(0.0f64, |a, x| a.max(x.abs())) * 3.0;
            let mut worst: f64 = 0.0;
            for k in 0..n {
                let v = e.vector(k);
                for i in 0..n {
                    let mut tv = d[i] * v[i];
                    if i > 0 {
                        tv += o[i - 1] * v[i - 1];
                    }
                    if i + 1 < n {
                        tv += o[i] * v[i + 1];
                    }
                    worst = worst.max((tv - e.values[k] * v[i]).abs());
                }
            }
            Ok((small && worst <= 1e-10 * norm, format!("2x2 exact: {small}, max residual {worst:.1e}")))
        }),
        check("domains", "build_whole_line", "Gaussian heat norm", || {
            let line = build_whole_line(1e-3, 50.0, 4000)?;
            let f = line.from_spectrum(|xi| gaussian_transform(1.0, xi));
            let mut worst: f64 = 0.0;
            for t in [0.0, 1.0, 100.0] {
                let got = line.operator().norm_sq(&heat_apply(line.operator(), &f, t)?)?;
                let want = gaussian_heat_norm_sq(1.0, t);
                worst = worst.max((got - want).abs() / want);
            }
            Ok((worst <= 1e-6, format!("max relative error {worst:.2e}")))
        }),
        check("domains", "harmonic_profile", "bounds on the three-dimensional profile", || {
            let (n, r_in) = (3.0f64, 1.5);
            let h = harmonic_profile(3, r_in)?;
            let mut ok = true;
            for i in 0..=400 {
                let r = r_in * (1.0 + 0.05 * i as f64);
                let v = h.value(r)?;
                ok &= (0.0..=1.0).contains(&v);
                if r >= 2.0 * r_in {
                    let cap = 2f64.powf(n - 1.0) * n * r_in.powf(n - 2.0) / r.powf(n - 1.0);
                    ok &= h.derivative(r)?.abs() <= cap;
                }
            }
            Ok((ok, "401 radii in [r_in, 21 r_in]".into()))
        }),
        check("domains", "build_radial_exterior", "nonnegative spectrum and refinement", || {
            let exact = shell3d_eigenvalue(1, 1.0, 6.0);
            let mut errs = Vec::new();
            let mut nonneg = true;
            for m in [100, 200] {
                let d = build_radial_projected(3, 1.0, 6.0, m, &[], 1.0)?;
                nonneg &= d.operator().lambdas().all(|l| l >= 0.0);
                let first = d.operator().lambdas().next().unwrap_or(f64::NAN);
                errs.push((first - exact).abs());
            }
            let reduction = errs[0] / errs[1];
            Ok((
                nonneg && reduction >= 2.0,
                format!("first-eigenvalue error {:.2e} -> {:.2e} (factor {reduction:.2})", errs[0], errs[1]),
            ))
        }),
        check("rates", "fit_loglog", "exact laws and rescaling", || {
            let t = sample_schedule(1.0, 1e3, 12)?;
            let v: Vec<f64> = t.iter().map(|t| 5.0 * t.powf(-1.5)).collect();
            let f = fit_loglog(&samples(&t, &v))?;
            let scaled: Vec<f64> = v.iter().map(|v| 1e7 * v).collect();
            let g = fit_loglog(&samples(&t, &scaled))?;
            let p = plateau_check(&samples(&t, &v), 0.5)?;
            let rev: Vec<RateSample> = samples(&t, &v).into_iter().rev().collect();
            let q = plateau_check(&rev, 0.5)?;
            let ok = (f.slope + 1.5).abs() <= 1e-12
                && f.rms_residual <= 1e-12
                && (g.slope - f.slope).abs() <= 1e-12
                && p == q;
            Ok((ok, format!("slope {:.14}, rescaled {:.14}", f.slope, g.slope)))
        }),
        check("cli", "run", "guards reject out-of-window schedules", || {
            let mut cfg = small_config();
            cfg.domain = DomainSpec::Radial {
                dim: 3,
                r_in: 1.0,
                r_out: 30.0,
                m: 200,
            };
            cfg.schedule.t1 = 40.0;
            let radial = matches!(cfg.validate(), Err(crate::Error::Config(e)) if e.iter().any(|m| m.contains("finite-propagation")));
            cfg.domain = DomainSpec::WholeLine {
                xi_min: 0.1,
                xi_max: 20.0,
                m: 400,
            };
            let line = matches!(cfg.validate(), Err(crate::Error::Config(e)) if e.iter().any(|m| m.contains("xi_min")));
            Ok((radial && line, format!("radial rejected: {radial}, whole line rejected: {line}")))
        }),
        check("cli", "run", "deterministic CSV of the expected shape", || {
            let cfg = small_config();
            let a = runner::run(&cfg)?.to_csv();
            let b = runner::run(&cfg)?.to_csv();
            let rows = a.lines().count() - 1;
            let want = cfg.metrics.len() * cfg.orders.len() * cfg.schedule.count;
            Ok((a == b && rows == want, format!("{rows} rows (expected {want}), identical: {}", a == b)))
        }),
    ]
}

/// A five-time interval experiment.
pub fn small_config() -> ExperimentConfig {
    ExperimentConfig {
        name: "interval_smoke".into(),
        domain: DomainSpec::Interval { length: 10.0, m: 256 },
        data: DataSpec {
            generator: Generator::Bump { support: [3.0, 7.0] },
            u0_scale: 1.0,
            u1_scale: 1.0,
        },
        orders: vec![1],
        schedule: Schedule {
            t0: 1.0,
            t1: 20.0,
            count: 5,
        },
        metrics: vec![Metric::L2, Metric::Energy, Metric::LocalEnergy { radius: 5.0 }],
        expectations: vec![],
        output: None,
    }
}

/// `|I_n + λ^n J_n - 1| <= 1e-12` for `n <= 8` on `{0}` and `points`
/// log-spaced eigenvalues in `[1e-6, 1e6]`.
pub fn partition_of_unity(table: &BinomialTable, points: usize) -> Result<(bool, String)> {
    let mut lambdas = vec![0.0];
    lambdas.extend((0..points).map(|i| 10f64.powf(-6.0 + 12.0 * i as f64 / (points - 1) as f64)));
    let mut worst = (0.0f64, 0, 0.0);
    for n in 1..=8 {
        for &l in &lambdas {
            let (i, j) = in_jn_with(table, n, l)?;
            let dev = (i + l.powi(n as i32) * j - 1.0).abs();
            if dev > worst.0 {
                worst = (dev, n, l);
            }
        }
    }
    Ok((
        worst.0 <= 1e-12,
        format!("max deviation {:.2e} at n={}, lambda={:.3e} (tol 1e-12)", worst.0, worst.1, worst.2),
    ))
}

/// Ratio of central-difference errors of `d/dt ‖u‖²_♯ = -E` for `h = 1e-3`
/// and `h = 5e-4`.
pub fn sharp_norm_ratio() -> Result<(bool, String)> {
    let (op, data) = random_problem(15, 16, 0.05, 5.0);
    let t = 2.0;
    let sharp = |s: f64| -> Result<f64> {
        let (u, up) = evolve(&op, &data, s)?;
        h_norm_sq(&op, &u, &up)
    };
    let (u, up) = evolve(&op, &data, t)?;
    let e = energy(&op, &u, &up)?;
    let err = |h: f64| -> Result<f64> { Ok(((sharp(t + h)? - sharp(t - h)?) / (2.0 * h) + e).abs()) };
    let (e1, e2) = (err(1e-3)?, err(5e-4)?);
    let ratio = e1 / e2;
    Ok((
        (3.5..=4.5).contains(&ratio),
        format!("errors {e1:.3e} -> {e2:.3e}, reduction {ratio:.3} (want 3.5..4.5)"),
    ))
}

