use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::domains::DomainSpec;
use crate::error::{Error, Result};
use crate::expansion::MAX_PROFILE_ORDER;
use crate::rates::MIN_FIT_SAMPLES;

/// A declarative decay experiment. Times are dimensionless; radii and
/// lengths are in the domain's length unit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub domain: DomainSpec,
    pub data: DataSpec,
    /// Expansion orders `n`; each metric is evaluated on `u - V_n`.
    pub orders: Vec<usize>,
    pub schedule: Schedule,
    #[serde(default)]
    pub metrics: Vec<Metric>,
    #[serde(default)]
    pub expectations: Vec<Expectation>,
    /// Output directory, overridden by `--out`.
    #[serde(default)]
    pub output: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Schedule {
    pub t0: f64,
    pub t1: f64,
    pub count: usize,
}

/// Initial data: one named generator, scaled into `(u0, u1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataSpec {
    #[serde(flatten)]
    pub generator: Generator,
    #[serde(default = "one")]
    pub u0_scale: f64,
    #[serde(default = "one")]
    pub u1_scale: f64,
}

fn one() -> f64 {
    1.0
}

/// Data generators.
///
/// * `gaussian`: `exp(-(x - center)²/(2 width²))` in the physical variable
///   (`x` is the radius on shells); on the line `center` must be 0 and the
///   transform is analytic.
/// * `bump`: `exp(1 - 1/(1 - y²))` for `y = (2x - lo - hi)/(hi - lo)` in
///   `(-1, 1)`, zero outside `support = [lo, hi]`; positive, compactly
///   supported, peak value 1.
/// * `heavy_tail`: modal coefficients `λ^{(-1/2+δ)/2} e^{-λ}` (on the line
///   `|ξ|^{-1/2+δ} e^{-ξ²}`), energy data barely outside `L¹`.
/// * `random_energy`: `u0_j ∝ g_j / √(w_j (1+λ_j))`, `u1_j ∝ g'_j / √w_j` with
///   standard normals from a seeded ChaCha8 stream, rescaled to `E(0) = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "generator", rename_all = "snake_case")]
pub enum Generator {
    Gaussian { center: f64, width: f64 },
    Bump { support: [f64; 2] },
    HeavyTail { delta: f64 },
    RandomEnergy {
        #[serde(default)]
        seed: Option<u64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Metric {
    /// `‖r‖`.
    L2,
    /// `E(r; t)`.
    Energy,
    /// `‖(r, r')‖²_𝓗`.
    Sharp,
    /// Energy of `r` in `{|x| <= radius}`.
    LocalEnergy { radius: f64 },
    /// `Σ w (1 + log(r/r_in)) |r|` on radial shells.
    WeightedL1Log,
}

impl Metric {
    pub fn label(&self) -> String {
        match self {
            Metric::L2 => "l2".into(),
            Metric::Energy => "energy".into(),
            Metric::Sharp => "sharp".into(),
            Metric::LocalEnergy { radius } => format!("local_energy(R={radius})"),
            Metric::WeightedL1Log => "weighted_l1_log".into(),
        }
    }

    pub fn needs_grid(&self) -> bool {
        matches!(self, Metric::LocalEnergy { .. } | Metric::WeightedL1Log)
    }
}

/// Name of the series for `metric` evaluated on `u - V_order`.
pub fn series_name(metric: &Metric, order: usize) -> String {
    format!("{}[n={order}]", metric.label())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expectation {
    pub metric: Metric,
    pub order: usize,
    pub law: Law,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Law {
    /// Windowed log-log slope within `tol` of `expected`.
    Slope { expected: f64, tol: f64 },
    /// `value^power t^p (log t)^σ` stays within a factor `max_ratio` over
    /// `window` (the whole schedule by default).
    LogCorrected {
        p: f64,
        sigma: f64,
        #[serde(default = "one")]
        power: f64,
        max_ratio: f64,
        #[serde(default)]
        window: Option<[f64; 2]>,
    },
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// SHA-256 of the canonical compact JSON form.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }

    /// Latest admissible time, if the domain imposes one.
    fn time_limit(&self) -> Option<(f64, String)> {
        match self.domain {
            DomainSpec::Interval { .. } => None,
            DomainSpec::WholeLine { xi_min, .. } => Some((
                0.01 / (xi_min * xi_min),
                format!("xi_min window: t1 must be <= 0.01/xi_min^2 = {}", 0.01 / (xi_min * xi_min)),
            )),
            DomainSpec::Radial { r_out, .. } => {
                let support = match self.data.generator {
                    Generator::Gaussian { center, width } => center + 8.0 * width,
                    Generator::Bump { support } => support[1],
                    Generator::HeavyTail { .. } | Generator::RandomEnergy { .. } => r_out,
                };
                let limit = r_out - support - 2.0;
                Some((
                    limit,
                    format!(
                        "finite-propagation window: t1 must be <= r_out - support radius - 2 = {limit} \
                         (support radius {support})"
                    ),
                ))
            }
        }
    }

    /// Every violated guard, or `Ok`.
    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        let name_ok = |c: char| c.is_ascii_alphanumeric() || "-_.".contains(c);
        if self.name.is_empty() || self.name.starts_with('.') || !self.name.chars().all(name_ok) {
            errs.push(format!("name {:?} must be a plain file stem ([A-Za-z0-9._-])", self.name));
        }
        if let Err(e) = self.domain.check() {
            errs.push(format!("domain: {e}"));
        }
        let s = self.schedule;
        if s.count < MIN_FIT_SAMPLES {
            errs.push(format!("schedule.count = {} below {MIN_FIT_SAMPLES}", s.count));
        }
        if !(s.t0.is_finite() && s.t1.is_finite() && s.t0 > 0.0 && s.t1 > s.t0) {
            errs.push(format!("schedule needs 0 < t0 < t1, got [{}, {}]", s.t0, s.t1));
        }
        if let Some((limit, msg)) = self.time_limit() {
            if !(s.t1 <= limit) {
                errs.push(format!("schedule.t1 = {}: {msg}", s.t1));
            }
        }
        if self.orders.is_empty() {
            errs.push("orders must list at least one expansion order".into());
        }
        for &n in &self.orders {
            if n > MAX_PROFILE_ORDER + 1 {
                errs.push(format!("order {n} above the maximum {}", MAX_PROFILE_ORDER + 1));
            }
        }
        for (i, n) in self.orders.iter().enumerate() {
            if self.orders[..i].contains(n) {
                errs.push(format!("order {n} listed twice"));
            }
        }
        for (i, m) in self.metrics.iter().enumerate() {
            if self.metrics[..i].contains(m) {
                errs.push(format!("metric {} listed twice", m.label()));
            }
        }
        self.validate_data(&mut errs);
        for m in &self.metrics {
            match (m, &self.domain) {
                (Metric::LocalEnergy { .. }, DomainSpec::WholeLine { .. }) => {
                    errs.push("local_energy needs a grid domain (interval or radial)".into())
                }
                (Metric::LocalEnergy { radius }, DomainSpec::Radial { r_in, .. }) if !(*radius >= *r_in) => {
                    errs.push(format!("local_energy radius {radius} below r_in = {r_in}"))
                }
                (Metric::LocalEnergy { radius }, _) if !(*radius >= 0.0) => {
                    errs.push(format!("local_energy radius {radius} must be >= 0"))
                }
                (Metric::WeightedL1Log, d) if !matches!(d, DomainSpec::Radial { .. }) => {
                    errs.push("weighted_l1_log needs a radial domain".into())
                }
                _ => {}
            }
        }
        for e in &self.expectations {
            if !self.metrics.contains(&e.metric) {
                errs.push(format!("expectation refers to unlisted metric {}", e.metric.label()));
            }
            if !self.orders.contains(&e.order) {
                errs.push(format!("expectation refers to unlisted order {}", e.order));
            }
            match e.law {
                Law::Slope { tol, .. } if !(tol > 0.0) => errs.push("slope tolerance must be positive".into()),
                Law::LogCorrected { max_ratio, window, sigma, .. } => {
                    if !(max_ratio >= 1.0) {
                        errs.push("max_ratio must be >= 1".into());
                    }
                    let lo = window.map_or(s.t0, |w| w[0]);
                    if sigma != 0.0 && lo < 2.0 {
                        errs.push("log-corrected laws need window times >= 2".into());
                    }
                    if let Some([a, b]) = window {
                        if !(b > a) {
                            errs.push("log-corrected window must satisfy lo < hi".into());
                        }
                    }
                }
                _ => {}
            }
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(errs))
        }
    }

    fn validate_data(&self, errs: &mut Vec<String>) {
        let d = &self.data;
        if !(d.u0_scale.is_finite() && d.u1_scale.is_finite()) {
            errs.push("data scales must be finite".into());
        }
        let interior = |lo: f64, hi: f64| -> Option<(f64, f64)> {
            match self.domain {
                DomainSpec::Interval { length, .. } => Some((0.0, length)),
                DomainSpec::Radial { r_in, r_out, .. } => Some((r_in, r_out)),
                DomainSpec::WholeLine { .. } => {
                    let _ = (lo, hi);
                    None
                }
            }
        };
        match d.generator {
            Generator::Gaussian { center, width } => {
                if !(width > 0.0 && width.is_finite()) {
                    errs.push(format!("gaussian width {width} must be positive"));
                }
                if matches!(self.domain, DomainSpec::WholeLine { .. }) && center != 0.0 {
                    errs.push("whole-line gaussian must be centred at 0 (even data)".into());
                }
            }
            Generator::Bump { support: [lo, hi] } => {
                if !(hi > lo) {
                    errs.push(format!("bump support [{lo}, {hi}] must satisfy lo < hi"));
                }
                match interior(lo, hi) {
                    Some((a, b)) if !(lo >= a && hi <= b) => {
                        errs.push(format!("bump support [{lo}, {hi}] outside the domain ({a}, {b})"))
                    }
                    None if lo != -hi => errs.push("whole-line bump must be symmetric (support [-a, a])".into()),
                    _ => {}
                }
            }
            Generator::HeavyTail { delta } => {
                if !(delta > 0.0 && delta < 1.0) {
                    errs.push(format!("heavy_tail delta {delta} must lie in (0, 1)"));
                }
            }
            Generator::RandomEnergy { seed } => {
                if seed.is_none() {
                    errs.push("random_energy requires an explicit seed".into());
                }
            }
        }
    }
}
