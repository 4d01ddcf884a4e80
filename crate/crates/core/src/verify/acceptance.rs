//! The acceptance criteria, one function per criterion. Each returns a
//! [`CheckResult`] under module `acceptance`.

use super::{check, partition_of_unity, random_problem, sharp_norm_ratio, CheckResult, Options};
use crate::domains::{build_radial_projected, radial_grid, DomainSpec, Grid1D, Geometry};
use crate::error::{Error, Result};
use crate::expansion::{err_equation_oracle, remainder};
use crate::functionals::{dissipation_integral, energy, nash_ratio, NashVariant};
use crate::oracle::{annulus_first_eigenvalue, rk4_mode_step, shell3d_eigenvalue};
use crate::rates::sample_schedule;
use crate::runner::{
    self, DataSpec, Expectation, ExperimentConfig, Generator, Law, Metric, Report, Schedule,
};
use crate::spectral::{evolve, heat_apply, mode_solve, CauchyPair, ModalOperator};

pub const CRITERIA: usize = 13;

fn criterion(n: usize, name: &str, body: impl FnOnce() -> Result<(bool, String)>) -> CheckResult {
    check("acceptance", &format!("criterion {n}"), name, body)
}

pub fn criterion_1(options: &Options) -> CheckResult {
    criterion(1, "partition of unity", || partition_of_unity(&options.binomials(), 60))
}

pub fn criterion_2() -> CheckResult {
    criterion(2, "mode solver against RK4", || {
        let times: Vec<f64> = (0..200).map(|i| 20.0 * i as f64 / 199.0).collect();
        let mut worst = (0.0f64, 0.0, 0.0);
        for lambda in [0.0f64, 0.1, 0.249_999, 0.25, 1.0, 100.0] {
            let h = if lambda > 0.0 { 1e-4f64.min(2e-3 / lambda.sqrt()) } else { 1e-4 };
            for (a, b) in [(1.0, 0.0), (0.0, 1.0), (0.3, -0.7)] {
                let (mut w, mut wp, mut s) = (a, b, 0.0);
                for &t in &times {
                    (w, wp) = rk4_mode_step(lambda, w, wp, t - s, h);
                    s = t;
                    let exact = mode_solve(lambda, a, b, t)?;
                    let err = (exact.value - w).abs() / (a.abs() + b.abs());
                    if err > worst.0 {
                        worst = (err, lambda, t);
                    }
                }
            }
        }
        Ok((
            worst.0 <= 1e-8,
            format!("max relative error {:.2e} at lambda={}, t={:.2} (tol 1e-8)", worst.0, worst.1, worst.2),
        ))
    })
}

pub fn criterion_3() -> CheckResult {
    criterion(3, "energy identity", || {
        let (op, data) = random_problem(3, 64, 1e-3, 1e2);
        let e0 = energy(&op, &data.u0, &data.u1)?;
        let mut worst: f64 = 0.0;
        for t in [1.0, 5.0, 20.0] {
            let (u, up) = evolve(&op, &data, t)?;
            let d = dissipation_integral(&op, &data, t, 1e-10)?;
            worst = worst.max((energy(&op, &u, &up)? + d - e0).abs() / e0);
        }
        Ok((worst <= 1e-6, format!("max relative defect {worst:.2e} (tol 1e-6)")))
    })
}

pub fn criterion_4() -> CheckResult {
    criterion(4, "sharp-norm identity", sharp_norm_ratio)
}

pub fn criterion_5() -> CheckResult {
    criterion(5, "decomposition identity", || {
        let mut worst = (0.0f64, 0, 0.0, 0.0);
        for n in 1..=2 {
            for lambda in [0.01, 0.25, 2.0] {
                for (a, b) in [(1.0, -0.5), (0.4, 1.3)] {
                    let op = ModalOperator::from_eigenvalues("single", &[lambda])?;
                    let data = CauchyPair::new(vec![a].into(), vec![b].into())?;
                    for i in 0..=20 {
                        let t = 0.5 * i as f64;
                        let r = remainder(n, &op, &data, t)?.0[0];
                        let o = err_equation_oracle(n, lambda, a, b, t, 1e-10)?;
                        let d = (r - o).abs();
                        if d > worst.0 {
                            worst = (d, n, lambda, t);
                        }
                    }
                }
            }
        }
        Ok((
            worst.0 <= 1e-6,
            format!(
                "max difference {:.2e} at n={}, lambda={}, t={} (tol 1e-6)",
                worst.0, worst.1, worst.2, worst.3
            ),
        ))
    })
}

fn slope(metric: Metric, order: usize, expected: f64, tol: f64) -> Expectation {
    Expectation {
        metric,
        order,
        law: Law::Slope { expected, tol },
    }
}

/// Whole line, Gaussian data, `‖u - V_m‖` and `E(u - V_m)` for `m = 0, 1, 2`.
pub fn line_gaussian_config() -> ExperimentConfig {
    let mut expectations = Vec::new();
    for m in 0..3 {
        let mf = m as f64;
        expectations.push(slope(Metric::L2, m, -(0.25 + mf), 0.15));
    }
    for m in 0..3 {
        let mf = m as f64;
        expectations.push(slope(Metric::Energy, m, -(0.5 + 2.0 * mf + 1.0), 0.3));
    }
    ExperimentConfig {
        name: "line_gaussian".into(),
        domain: DomainSpec::WholeLine {
            xi_min: 1e-3,
            xi_max: 50.0,
            m: 4000,
        },
        data: DataSpec {
            generator: Generator::Gaussian { center: 0.0, width: 1.0 },
            u0_scale: 1.0,
            u1_scale: 1.0,
        },
        orders: vec![0, 1, 2],
        schedule: Schedule {
            t0: 10.0,
            t1: 1e4,
            count: 30,
        },
        metrics: vec![Metric::L2, Metric::Energy],
        expectations,
        output: Some("out/line_gaussian".into()),
    }
}

/// Whole line, `û₁ = |ξ|^{δ-1/2} e^{-ξ²}` with `δ = 0.02`, `u0 = 0`.
pub fn line_heavy_tail_config() -> ExperimentConfig {
    ExperimentConfig {
        name: "line_heavy_tail".into(),
        domain: DomainSpec::WholeLine {
            xi_min: 1e-3,
            xi_max: 50.0,
            m: 4000,
        },
        data: DataSpec {
            generator: Generator::HeavyTail { delta: 0.02 },
            u0_scale: 0.0,
            u1_scale: 1.0,
        },
        orders: vec![1, 2],
        schedule: Schedule {
            t0: 10.0,
            t1: 1e4,
            count: 30,
        },
        metrics: vec![Metric::L2],
        expectations: vec![slope(Metric::L2, 1, -1.0, 0.2), slope(Metric::L2, 2, -2.0, 0.2)],
        output: Some("out/line_heavy_tail".into()),
    }
}

/// Shell `(1, 400)` in three dimensions, bump data in `(1, 3)`.
pub fn shell3d_config() -> ExperimentConfig {
    let local = Metric::LocalEnergy { radius: 5.0 };
    ExperimentConfig {
        name: "shell3d_bump".into(),
        domain: DomainSpec::Radial {
            dim: 3,
            r_in: 1.0,
            r_out: 400.0,
            m: 3000,
        },
        data: DataSpec {
            generator: Generator::Bump { support: [1.0, 3.0] },
            u0_scale: 1.0,
            u1_scale: 1.0,
        },
        orders: vec![0],
        schedule: Schedule {
            t0: 10.0,
            t1: 300.0,
            count: 24,
        },
        metrics: vec![Metric::L2, Metric::Energy, local],
        expectations: vec![
            slope(local, 0, -3.0, 0.4),
            slope(Metric::Energy, 0, -2.5, 0.3),
            Expectation {
                metric: Metric::L2,
                order: 0,
                law: Law::LogCorrected {
                    p: 1.5,
                    sigma: 0.0,
                    power: 2.0,
                    max_ratio: 3.0,
                    window: Some([100.0, 300.0]),
                },
            },
        ],
        output: Some("out/shell3d_bump".into()),
    }
}

/// Shell `(1, 2000)` in the plane, bump data in `(1, 3)`.
pub fn shell2d_config() -> ExperimentConfig {
    ExperimentConfig {
        name: "shell2d_bump".into(),
        domain: DomainSpec::Radial {
            dim: 2,
            r_in: 1.0,
            r_out: 2000.0,
            m: 6000,
        },
        data: DataSpec {
            generator: Generator::Bump { support: [1.0, 3.0] },
            u0_scale: 1.0,
            u1_scale: 1.0,
        },
        orders: vec![0],
        schedule: Schedule {
            t0: 10.0,
            t1: 1000.0,
            count: 25,
        },
        metrics: vec![Metric::L2],
        expectations: vec![Expectation {
            metric: Metric::L2,
            order: 0,
            law: Law::LogCorrected {
                p: 1.0,
                sigma: 2.0,
                power: 2.0,
                max_ratio: 5.0,
                window: Some([100.0, 1000.0]),
            },
        }],
        output: Some("out/shell2d_bump".into()),
    }
}

fn verdict_summary(report: &Report, pick: impl Fn(usize) -> bool) -> (bool, String) {
    let mut ok = true;
    let mut parts = Vec::new();
    for (_, v) in report.verdicts.iter().enumerate().filter(|(i, _)| pick(*i)) {
        ok &= v.passed;
        parts.push(format!("{}: {}", v.series, v.detail));
    }
    (ok && !parts.is_empty(), parts.join("; "))
}

pub fn criterion_6() -> CheckResult {
    criterion(6, "whole-line expansion rates", || {
        Ok(verdict_summary(&runner::run(&line_gaussian_config())?, |_| true))
    })
}

pub fn criterion_7() -> CheckResult {
    criterion(7, "energy-space remainder rates", || {
        Ok(verdict_summary(&runner::run(&line_heavy_tail_config())?, |_| true))
    })
}

/// Criteria 8 and 9 share one three-dimensional run.
pub fn criteria_8_9() -> [CheckResult; 2] {
    let start = std::time::Instant::now();
    let report = runner::run(&shell3d_config());
    let shared = start.elapsed().as_secs_f64();
    let mut c8 = criterion(8, "local and total energy decay in 3D", || {
        let r = report.as_ref().map_err(clone_err)?;
        Ok(verdict_summary(r, |i| i < 2))
    });
    c8.seconds += shared;
    let c9 = criterion(9, "3D L2 plateau", || {
        let r = report.as_ref().map_err(clone_err)?;
        let (ok, detail) = verdict_summary(r, |i| i == 2);
        let series = r.series("l2[n=0]").ok_or_else(|| Error::Degenerate("missing l2 series".into()))?;
        let window: Vec<f64> = series
            .samples
            .iter()
            .filter(|s| s.t >= 100.0 * (1.0 - 1e-9))
            .map(|s| s.value)
            .collect();
        let positive = window.first().is_some_and(|v| *v > 0.0) && window.last().is_some_and(|v| *v > 0.0);
        Ok((ok && positive, format!("{detail}; endpoints positive: {positive}")))
    });
    [c8, c9]
}

fn clone_err(e: &Error) -> Error {
    Error::Numeric {
        stage: "shell3d run".into(),
        detail: e.to_string(),
    }
}

pub fn criterion_10() -> CheckResult {
    criterion(10, "2D logarithmic decay", || {
        let cfg = shell2d_config();
        let DomainSpec::Radial { dim, r_in, r_out, m } = cfg.domain else {
            unreachable!("planar shell config")
        };
        let grid = radial_grid(dim, r_in, r_out, m)?;
        let bump: Vec<f64> = grid.nodes().iter().map(|&r| runner::data::bump(r, 1.0, 3.0)).collect();
        let dom = build_radial_projected(dim, r_in, r_out, m, &[bump], r_in)?;
        let f = dom.projection(0);
        let mut lo = f64::INFINITY;
        let mut hi: f64 = 0.0;
        for t in sample_schedule(10.0, 1e3, 25)? {
            let n = dom.operator().norm(&heat_apply(dom.operator(), f, t)?)?;
            let c = t.sqrt() * (1.0 + (1.0 + t).ln()) * n;
            lo = lo.min(c);
            hi = hi.max(c);
        }
        let heat_ratio = hi / lo;
        let heat_ok = heat_ratio <= 4.0;
        let (wave_ok, wave) = verdict_summary(&runner::run(&cfg)?, |_| true);
        Ok((
            heat_ok && wave_ok,
            format!("heat: ratio {heat_ratio:.3} (max 4); damped wave: {wave}"),
        ))
    })
}

pub fn criterion_11() -> CheckResult {
    criterion(11, "radial eigenvalues", || {
        let (a, b) = (1.0, 6.0);
        let d3 = build_radial_projected(3, a, b, 2000, &[], a)?;
        let mut worst3: f64 = 0.0;
        for (k, l) in d3.operator().lambdas().take(5).enumerate() {
            let exact = shell3d_eigenvalue(k + 1, a, b);
            worst3 = worst3.max((l - exact).abs() / exact);
        }
        let d2 = build_radial_projected(2, a, b, 2000, &[], a)?;
        let first = d2.operator().lambdas().next().unwrap_or(f64::NAN);
        let exact2 = annulus_first_eigenvalue(a, b);
        let err2 = (first - exact2).abs() / exact2;
        Ok((
            worst3 <= 5e-3 && err2 <= 1e-2,
            format!("3D first five max rel err {worst3:.2e} (tol 5e-3); 2D first rel err {err2:.2e} (tol 1e-2)"),
        ))
    })
}

fn nash_families(grid: &Grid1D) -> Vec<(&'static str, Vec<f64>)> {
    let lo = match *grid.geometry() {
        Geometry::Radial { r_in, .. } => r_in,
        _ => 0.0,
    };
    let x = grid.nodes();
    vec![
        ("gaussian", x.iter().map(|&r| (-(r - lo - 4.0).powi(2) / 2.0).exp()).collect()),
        ("bump", x.iter().map(|&r| runner::data::bump(r, lo + 1.0, lo + 7.0)).collect()),
    ]
}

pub fn criterion_12() -> CheckResult {
    criterion(12, "Nash ratios", || {
        let mut scale_worst: f64 = 0.0;
        let mut refine_worst: f64 = 0.0;
        let cases: [(usize, &[NashVariant]); 3] = [
            (1, &[NashVariant::Nash, NashVariant::Gn]),
            (2, &[NashVariant::Nash, NashVariant::Gn, NashVariant::Lognash]),
            (3, &[NashVariant::Nash, NashVariant::Gn]),
        ];
        for (dim, variants) in cases {
            let build = |m: usize| -> Result<Grid1D> {
                if dim == 1 {
                    Grid1D::line(-20.0, 40.0, m)
                } else {
                    radial_grid(dim, 1.0, 60.0, m)
                }
            };
            let (coarse, fine) = (build(1000)?, build(2000)?);
            for &variant in variants {
                let r_in = (dim > 1).then_some(1.0);
                for ((name, f), (_, g)) in nash_families(&coarse).into_iter().zip(nash_families(&fine)) {
                    let base = nash_ratio(&f, &coarse, variant, r_in)?;
                    let scaled: Vec<f64> = f.iter().map(|v| 37.5 * v).collect();
                    let s = nash_ratio(&scaled, &coarse, variant, r_in)?;
                    scale_worst = scale_worst.max((s - base).abs() / base);
                    let refined = nash_ratio(&g, &fine, variant, r_in)?;
                    let rel = (refined - base).abs() / base;
                    if rel > refine_worst {
                        refine_worst = rel;
                    }
                    if !rel.is_finite() {
                        return Err(Error::Degenerate(format!("{name} ratio not finite")));
                    }
                }
            }
        }
        Ok((
            scale_worst <= 1e-12 && refine_worst <= 0.02,
            format!("scaling defect {scale_worst:.2e} (tol 1e-12); refinement change {refine_worst:.2e} (tol 2e-2)"),
        ))
    })
}

/// A small shell experiment used for determinism checks.
pub fn determinism_config() -> ExperimentConfig {
    ExperimentConfig {
        name: "determinism".into(),
        domain: DomainSpec::Radial {
            dim: 3,
            r_in: 1.0,
            r_out: 60.0,
            m: 400,
        },
        data: DataSpec {
            generator: Generator::Bump { support: [1.0, 3.0] },
            u0_scale: 1.0,
            u1_scale: 0.5,
        },
        orders: vec![0, 1],
        schedule: Schedule {
            t0: 2.0,
            t1: 40.0,
            count: 16,
        },
        metrics: vec![Metric::L2, Metric::Sharp, Metric::LocalEnergy { radius: 5.0 }],
        expectations: vec![],
        output: None,
    }
}

/// In-process form: the same config on one thread and on three.
pub fn criterion_13() -> CheckResult {
    criterion(13, "determinism", || {
        let cfg = determinism_config();
        let on = |threads: usize| -> Result<Report> {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| Error::numeric("thread pool", e.to_string()))?;
            pool.install(|| runner::run(&cfg))
        };
        let (a, b) = (on(1)?, on(3)?);
        let same_csv = a.to_csv() == b.to_csv();
        let same_json = a.to_json() == b.to_json();
        Ok((
            same_csv && same_json,
            format!("CSV identical: {same_csv}, JSON identical: {same_json}"),
        ))
    })
}

pub fn run_all(options: &Options) -> Vec<CheckResult> {
    let mut out = vec![
        criterion_1(options),
        criterion_2(),
        criterion_3(),
        criterion_4(),
        criterion_5(),
        criterion_6(),
        criterion_7(),
    ];
    out.extend(criteria_8_9());
    out.extend([criterion_10(), criterion_11(), criterion_12(), criterion_13()]);
    out
}
