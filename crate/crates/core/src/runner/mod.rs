//! Declarative experiments: a JSON config names a domain, initial data,
//! expansion orders, a time schedule and metrics; [`run`] evaluates every
//! metric on `u - V_n` and checks the declared decay laws.

pub mod config;
pub mod data;
pub mod report;

use std::time::Instant;

use rayon::prelude::*;

pub use config::{series_name, DataSpec, Expectation, ExperimentConfig, Generator, Law, Metric, Schedule};
pub use report::{export, write_outputs, ExportFormat, Report, Series, SeriesFit, Verdict, SCHEMA_VERSION};

use crate::domains::{
    build_interval, build_radial_projected, build_whole_line, DomainSpec, Grid1D, Parity, ProjectedDomain,
    RealizedDomain, WholeLine,
};
use crate::error::{Error, Result};
use crate::expansion::remainder;
use crate::functionals::{energy, h_norm_sq, local_energy, weighted_l1_log};
use crate::rates::{check_decay, fit_window, log_corrected_fit, sample_schedule, RateSample, DEFAULT_DISCARD};
use crate::spectral::{CauchyPair, ModalOperator, ModalVector};

enum Backend {
    Line(WholeLine),
    Interval(RealizedDomain),
    Radial(ProjectedDomain),
}

/// A validated config with its discretization and modal data.
pub struct Experiment {
    config: ExperimentConfig,
    backend: Backend,
    data: CauchyPair,
}

impl Experiment {
    pub fn prepare(config: &ExperimentConfig) -> Result<Self> {
        config.validate()?;
        let shape_fn = data::profile(&config.data.generator);
        let (backend, shape) = match config.domain {
            DomainSpec::WholeLine { xi_min, xi_max, m } => {
                let line = build_whole_line(xi_min, xi_max, m)?;
                let shape = match config.data.generator {
                    Generator::Gaussian { width, .. } => {
                        Some(line.from_spectrum(|xi| crate::domains::gaussian_transform(width, xi)))
                    }
                    Generator::Bump { support: [_, hi] } => {
                        let f = shape_fn.as_ref().expect("bump has a profile");
                        Some(line.analyze(f, hi, Parity::Even)?)
                    }
                    _ => None,
                };
                (Backend::Line(line), shape)
            }
            DomainSpec::Interval { length, m } => {
                let dom = build_interval(length, m)?;
                let shape = match &shape_fn {
                    Some(f) => Some(dom.analyze(&dom.grid().nodes().iter().map(|&x| f(x)).collect::<Vec<_>>())?),
                    None => None,
                };
                (Backend::Interval(dom), shape)
            }
            DomainSpec::Radial { dim, r_in, r_out, m } => {
                let probe_radius = config.metrics.iter().fold(r_in, |r, m| match m {
                    Metric::LocalEnergy { radius } => r.max(*radius),
                    Metric::WeightedL1Log => r_out,
                    _ => r,
                });
                let grid = crate::domains::radial_grid(dim, r_in, r_out, m)?;
                let functions: Vec<Vec<f64>> = shape_fn
                    .iter()
                    .map(|f| grid.nodes().iter().map(|&r| f(r)).collect())
                    .collect();
                let dom = build_radial_projected(dim, r_in, r_out, m, &functions, probe_radius)?;
                let shape = (!functions.is_empty()).then(|| dom.projection(0).clone());
                (Backend::Radial(dom), shape)
            }
        };
        let op = match &backend {
            Backend::Line(l) => l.operator(),
            Backend::Interval(d) => d.operator(),
            Backend::Radial(d) => d.operator(),
        };
        let data = data::assemble(&config.data, op, shape)?;
        Ok(Experiment {
            config: config.clone(),
            backend,
            data,
        })
    }

    pub fn config(&self) -> &ExperimentConfig {
        &self.config
    }

    pub fn operator(&self) -> &ModalOperator {
        match &self.backend {
            Backend::Line(l) => l.operator(),
            Backend::Interval(d) => d.operator(),
            Backend::Radial(d) => d.operator(),
        }
    }

    pub fn data(&self) -> &CauchyPair {
        &self.data
    }

    /// Grid on which physical metrics are evaluated, if any.
    fn physical_grid(&self) -> Option<&Grid1D> {
        match &self.backend {
            Backend::Line(_) => None,
            Backend::Interval(d) => Some(d.grid()),
            Backend::Radial(d) => Some(d.probe_grid()),
        }
    }

    fn synthesize(&self, c: &ModalVector) -> Result<Vec<f64>> {
        match &self.backend {
            Backend::Line(_) => Err(Error::domain("no physical grid on the whole line")),
            Backend::Interval(d) => d.synthesize(c),
            Backend::Radial(d) => d.synthesize_probes(c),
        }
    }

    /// Metric values for every `(metric, order)` pair at time `t`, metric-major.
    fn evaluate(&self, t: f64) -> Result<Vec<f64>> {
        let op = self.operator();
        let cfg = &self.config;
        let needs_grid = cfg.metrics.iter().any(Metric::needs_grid);
        let mut per_order = Vec::with_capacity(cfg.orders.len());
        for &n in &cfg.orders {
            let (r, rp) = remainder(n, op, &self.data, t)?;
            let physical = if needs_grid {
                Some((self.synthesize(&r)?, self.synthesize(&rp)?))
            } else {
                None
            };
            per_order.push((r, rp, physical));
        }
        let mut out = Vec::with_capacity(cfg.metrics.len() * cfg.orders.len());
        for metric in &cfg.metrics {
            for (r, rp, physical) in &per_order {
                let v = match *metric {
                    Metric::L2 => op.norm(r)?,
                    Metric::Energy => energy(op, r, rp)?,
                    Metric::Sharp => h_norm_sq(op, r, rp)?,
                    Metric::LocalEnergy { radius } => {
                        let (u, up) = physical.as_ref().expect("grid metrics synthesize");
                        local_energy(self.physical_grid().expect("grid domain"), u, up, radius)?
                    }
                    Metric::WeightedL1Log => {
                        let (u, _) = physical.as_ref().expect("grid metrics synthesize");
                        let r_in = match cfg.domain {
                            DomainSpec::Radial { r_in, .. } => r_in,
                            _ => return Err(Error::domain("weighted_l1_log needs a radial domain")),
                        };
                        weighted_l1_log(u, self.physical_grid().expect("grid domain"), r_in)?
                    }
                };
                out.push(v);
            }
        }
        Ok(out)
    }
}

/// Runs an experiment. Times are evaluated in parallel and collected in
/// schedule order, so the report does not depend on the thread count.
pub fn run(config: &ExperimentConfig) -> Result<Report> {
    let start = Instant::now();
    let exp = Experiment::prepare(config)?;
    let s = config.schedule;
    let times = sample_schedule(s.t0, s.t1, s.count)?;
    let rows: Vec<Vec<f64>> = times
        .par_iter()
        .map(|&t| exp.evaluate(t))
        .collect::<Result<_>>()?;
    let mut series = Vec::new();
    let mut col = 0;
    for metric in &config.metrics {
        for &order in &config.orders {
            series.push(Series {
                name: series_name(metric, order),
                metric: *metric,
                order,
                samples: times.iter().zip(&rows).map(|(&t, row)| RateSample::new(t, row[col])).collect(),
            });
            col += 1;
        }
    }
    let fits = series
        .iter()
        .map(|s| match fit_window(&s.samples, DEFAULT_DISCARD) {
            Ok(fit) => SeriesFit {
                series: s.name.clone(),
                fit: Some(fit),
                note: None,
            },
            Err(e) => SeriesFit {
                series: s.name.clone(),
                fit: None,
                note: Some(e.to_string()),
            },
        })
        .collect();
    let verdicts = config
        .expectations
        .iter()
        .map(|e| {
            let name = series_name(&e.metric, e.order);
            let s = series.iter().find(|s| s.name == name).expect("validated expectation");
            judge(&name, &e.law, &s.samples)
        })
        .collect();
    Ok(Report {
        schema_version: SCHEMA_VERSION,
        tool: env!("CARGO_PKG_NAME").into(),
        tool_version: env!("CARGO_PKG_VERSION").into(),
        config_hash: config.hash(),
        config: config.clone(),
        times,
        series,
        fits,
        verdicts,
        runtime: Some(start.elapsed()),
    })
}

fn judge(name: &str, law: &Law, samples: &[RateSample]) -> Verdict {
    let (passed, measured, detail) = match *law {
        Law::Slope { expected, tol } => match check_decay(samples, expected, tol) {
            Ok(c) => (
                c.passed,
                Some(c.fit.slope),
                format!("slope {:.4} vs {expected} (gap {:.4}, tol {tol})", c.fit.slope, c.gap),
            ),
            Err(e) => (false, None, e.to_string()),
        },
        Law::LogCorrected {
            p,
            sigma,
            power,
            max_ratio,
            window,
        } => {
            let (lo, hi) = window.map_or((f64::NEG_INFINITY, f64::INFINITY), |[a, b]| (a, b));
            let slack = 1e-9;
            let picked: Vec<RateSample> = samples
                .iter()
                .filter(|s| s.t >= lo * (1.0 - slack) && s.t <= hi * (1.0 + slack))
                .map(|s| RateSample::new(s.t, s.value.abs().powf(power)))
                .collect();
            match compensated_range(&picked, p, sigma) {
                Ok((a, b)) if a > 0.0 => {
                    let ratio = b / a;
                    (
                        ratio <= max_ratio,
                        Some(ratio),
                        format!(
                            "t^{p} (log t)^{sigma} value^{power} in [{a:.4e}, {b:.4e}], ratio {ratio:.3} (max {max_ratio}) over {} samples",
                            picked.len()
                        ),
                    )
                }
                Ok(_) => (false, None, "compensated series reaches zero".into()),
                Err(e) => (false, None, e.to_string()),
            }
        }
    };
    Verdict {
        series: name.into(),
        law: law.clone(),
        passed,
        measured,
        detail,
    }
}

fn compensated_range(samples: &[RateSample], p: f64, sigma: f64) -> Result<(f64, f64)> {
    if samples.len() < 2 {
        return Err(Error::Fit(format!("{} samples in the window, need 2", samples.len())));
    }
    if sigma != 0.0 {
        return log_corrected_fit(samples, p, sigma);
    }
    Ok(samples
        .iter()
        .map(|s| s.value * s.t.powf(p))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v))))
}
