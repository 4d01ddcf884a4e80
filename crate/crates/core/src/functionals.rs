//! Energy-type functionals, generator graph norms, dissipation integrals and
//! the grid norms used by the decay estimates.
//!
//! Every reduction goes through [`compensated_sum`] in mode or node order.

use serde::{Deserialize, Serialize};

use crate::domains::{Geometry, Grid1D};
use crate::error::{check_len, Error, Result};
use crate::numeric::{adaptive_simpson, compensated_sum, QuadTol};
use crate::spectral::{self, CauchyPair, ModalOperator, ModalVector};

pub const MAX_GRAPH_ORDER: usize = 12;
pub const MAX_HEAT_SQUARE_ORDER: usize = 8;

/// `E = ‖u'‖² + ‖A^{1/2}u‖²`.
pub fn energy(op: &ModalOperator, u: &ModalVector, uprime: &ModalVector) -> Result<f64> {
    op.check(u)?;
    op.check(uprime)?;
    Ok(compensated_sum(
        op.modes()
            .iter()
            .zip(u.iter().zip(uprime.iter()))
            .map(|(m, (&a, &b))| m.weight * (b * b + m.lambda * a * a)),
    ))
}

/// `‖(f,g)‖²_𝓗 = ‖A^{1/2}f‖² + ¼‖f‖² + ‖g + f/2‖²`; on a trajectory
/// `(u, u')` this is the sharp norm whose time derivative is `-E`.
pub fn h_norm_sq(op: &ModalOperator, f: &ModalVector, g: &ModalVector) -> Result<f64> {
    op.check(f)?;
    op.check(g)?;
    Ok(compensated_sum(
        op.modes()
            .iter()
            .zip(f.iter().zip(g.iter()))
            .map(|(m, (&a, &b))| {
                let c = b + 0.5 * a;
                m.weight * (m.lambda * a * a + 0.25 * a * a + c * c)
            }),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub energy: f64,
    pub sharp: f64,
    pub l2sq: f64,
}

impl EnergyReport {
    pub fn compute(op: &ModalOperator, u: &ModalVector, uprime: &ModalVector) -> Result<Self> {
        Ok(EnergyReport {
            energy: energy(op, u, uprime)?,
            sharp: h_norm_sq(op, u, uprime)?,
            l2sq: op.norm_sq(u)?,
        })
    }
}

/// An element `(f, g)` of the energy space.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorPair {
    pub f: ModalVector,
    pub g: ModalVector,
}

impl GeneratorPair {
    pub fn new(f: ModalVector, g: ModalVector) -> Result<Self> {
        check_len(f.len(), g.len())?;
        Ok(GeneratorPair { f, g })
    }
}

impl From<&CauchyPair> for GeneratorPair {
    fn from(d: &CauchyPair) -> Self {
        GeneratorPair {
            f: d.u0.clone(),
            g: d.u1.clone(),
        }
    }
}

/// `𝓛(f, g) = (g, -Af - g)`.
pub fn generator_apply(op: &ModalOperator, p: &GeneratorPair) -> Result<GeneratorPair> {
    op.check(&p.f)?;
    op.check(&p.g)?;
    let g = ModalVector::new(
        op.lambdas()
            .zip(p.f.iter().zip(p.g.iter()))
            .map(|(l, (&f, &g))| -l * f - g)
            .collect(),
    );
    Ok(GeneratorPair { f: p.g.clone(), g })
}

/// `Σ_{k<=n} ‖𝓛^k p‖²_𝓗`.
pub fn graph_norm_sq(op: &ModalOperator, p: &GeneratorPair, n: usize) -> Result<f64> {
    if n > MAX_GRAPH_ORDER {
        return Err(Error::UnsupportedOrder {
            what: "graph norm",
            order: n,
            max: MAX_GRAPH_ORDER,
        });
    }
    let mut terms = Vec::with_capacity(n + 1);
    let mut cur = p.clone();
    terms.push(h_norm_sq(op, &cur.f, &cur.g)?);
    for _ in 0..n {
        cur = generator_apply(op, &cur)?;
        terms.push(h_norm_sq(op, &cur.f, &cur.g)?);
    }
    Ok(compensated_sum(terms))
}

fn check_tol(tol: f64) -> Result<()> {
    if tol.is_finite() && tol >= 1e-12 {
        Ok(())
    } else {
        Err(Error::domain(format!("tolerance {tol} must be >= 1e-12")))
    }
}

/// `2 ∫_0^{t1} ‖u'(s)‖² ds` by adaptive Simpson.
pub fn dissipation_integral(op: &ModalOperator, data: &CauchyPair, t1: f64, tol: f64) -> Result<f64> {
    op.check_pair(data)?;
    check_tol(tol)?;
    if !(t1.is_finite() && t1 > 0.0) {
        return Err(Error::domain(format!("t1 = {t1} must be positive")));
    }
    let scale = energy(op, &data.u0, &data.u1)?;
    if scale == 0.0 {
        return Ok(0.0);
    }
    let integrand = |s: f64| -> f64 {
        let (_, up) = spectral::evolve(op, data, s).expect("shapes checked");
        2.0 * op.norm_sq(&up).expect("shapes checked")
    };
    let quad = QuadTol {
        abs: tol * scale,
        rel: tol,
        max_subdivisions: 1 << 16,
    };
    adaptive_simpson(integrand, 0.0, t1, quad)
}

/// `∫_0^{tmax} (1+t)^m ‖A^{(m+1)/2} e^{-tA} f‖² dt`.
pub fn heat_square_integral(
    op: &ModalOperator,
    f: &ModalVector,
    m: usize,
    tmax: f64,
    tol: f64,
) -> Result<f64> {
    op.check(f)?;
    check_tol(tol)?;
    if m > MAX_HEAT_SQUARE_ORDER {
        return Err(Error::UnsupportedOrder {
            what: "heat square integral",
            order: m,
            max: MAX_HEAT_SQUARE_ORDER,
        });
    }
    if !(tmax.is_finite() && tmax > 0.0) {
        return Err(Error::domain(format!("tmax = {tmax} must be positive")));
    }
    let p = (m + 1) as i32;
    let integrand = |t: f64| -> f64 {
        (1.0 + t).powi(m as i32)
            * compensated_sum(
                op.modes()
                    .iter()
                    .zip(f.iter())
                    .map(|(md, &c)| md.weight * md.lambda.powi(p) * (-2.0 * md.lambda * t).exp() * c * c),
            )
    };
    let scale = integrand(0.0).abs() * tmax.min(1.0);
    if scale == 0.0 && f.iter().all(|&c| c == 0.0) {
        return Ok(0.0);
    }
    let quad = QuadTol {
        abs: tol * scale.max(f64::MIN_POSITIVE),
        rel: tol,
        max_subdivisions: 1 << 16,
    };
    adaptive_simpson(integrand, 0.0, tmax, quad)
}

/// `(Σ w_i |f_i|^q)^{1/q}`, or `max |f_i|` for `q = ∞`.
pub fn lq_norm(f: &[f64], cellweights: &[f64], q: f64) -> Result<f64> {
    check_len(f.len(), cellweights.len())?;
    if q.is_nan() || q < 1.0 {
        return Err(Error::domain(format!("exponent q = {q} must be >= 1")));
    }
    if q.is_infinite() {
        return Ok(f.iter().fold(0.0, |m, x| m.max(x.abs())));
    }
    let s = compensated_sum(f.iter().zip(cellweights).map(|(x, w)| w * x.abs().powf(q)));
    Ok(s.powf(1.0 / q))
}

/// `Σ w_i (1 + log(r_i/r_in)) |f_i|`.
pub fn weighted_l1_log(f: &[f64], grid: &Grid1D, r_in: f64) -> Result<f64> {
    check_len(grid.len(), f.len())?;
    if !(r_in.is_finite() && r_in > 0.0) {
        return Err(Error::domain("r_in must be positive"));
    }
    if grid.nodes()[0] < r_in {
        return Err(Error::domain(format!(
            "node {} lies below r_in = {r_in}",
            grid.nodes()[0]
        )));
    }
    Ok(compensated_sum(
        grid.nodes()
            .iter()
            .zip(grid.cellweights())
            .zip(f)
            .map(|((r, w), x)| w * (1.0 + (r / r_in).ln()) * x.abs()),
    ))
}

fn lower_extent(grid: &Grid1D) -> f64 {
    match *grid.geometry() {
        Geometry::Interval { .. } => 0.0,
        Geometry::Line => 0.0,
        Geometry::Radial { r_in, .. } => r_in,
    }
}

/// Energy in `{|x| <= R}`: `Σ w_i (u'_i² + |∇u|_i²)` over those nodes.
pub fn local_energy(grid: &Grid1D, u: &[f64], uprime: &[f64], radius: f64) -> Result<f64> {
    check_len(grid.len(), u.len())?;
    check_len(grid.len(), uprime.len())?;
    if radius.is_nan() || radius < lower_extent(grid) {
        return Err(Error::domain(format!(
            "radius {radius} outside the grid extent (lower end {})",
            lower_extent(grid)
        )));
    }
    let grad = grid.gradient(u)?;
    Ok(compensated_sum(
        grid.nodes()
            .iter()
            .zip(grid.cellweights())
            .zip(uprime.iter().zip(&grad))
            .filter(|((x, _), _)| x.abs() <= radius)
            .map(|((_, w), (v, g))| w * (v * v + g * g)),
    ))
}

/// Energy over the whole grid.
pub fn grid_energy(grid: &Grid1D, u: &[f64], uprime: &[f64]) -> Result<f64> {
    local_energy(grid, u, uprime, f64::INFINITY)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NashVariant {
    /// `‖f‖₂^{2+4/N} / (‖f‖₁^{4/N} ‖∇f‖₂²)`.
    Nash,
    /// `‖f‖_{1+2/N}^{1+2/N} / (‖f‖₁^{(N²+4)/(N(N+2))} ‖∇f‖₂^{4/(N+2)})`.
    Gn,
    /// `‖H^{1/2} f‖₂² / (‖H f‖₁ ‖∇f‖₂)` with `H = 1 + log(r/r_in)`.
    Lognash,
}

/// Left side over right side of the chosen inequality, without constant.
pub fn nash_ratio(f: &[f64], grid: &Grid1D, variant: NashVariant, r_in: Option<f64>) -> Result<f64> {
    check_len(grid.len(), f.len())?;
    if f.iter().all(|&x| x == 0.0) {
        return Err(Error::Degenerate("Nash ratio of the zero function".into()));
    }
    let w = grid.cellweights();
    let grad = grid.gradient(f)?;
    let grad_l2 = lq_norm(&grad, w, 2.0)?;
    if grad_l2 == 0.0 {
        return Err(Error::Degenerate("gradient vanishes".into()));
    }
    let n = grid.dimension() as f64;
    let l1 = lq_norm(f, w, 1.0)?;
    Ok(match variant {
        NashVariant::Nash => {
            let l2 = lq_norm(f, w, 2.0)?;
            l2.powf(2.0 + 4.0 / n) / (l1.powf(4.0 / n) * grad_l2 * grad_l2)
        }
        NashVariant::Gn => {
            let p = 1.0 + 2.0 / n;
            let lp = lq_norm(f, w, p)?;
            lp.powf(p) / (l1.powf((n * n + 4.0) / (n * (n + 2.0))) * grad_l2.powf(4.0 / (n + 2.0)))
        }
        NashVariant::Lognash => {
            let r_in = r_in.ok_or_else(|| Error::domain("lognash ratio requires r_in"))?;
            let h: Vec<f64> = grid
                .nodes()
                .iter()
                .map(|r| {
                    if *r < r_in {
                        Err(Error::domain(format!("node {r} lies below r_in = {r_in}")))
                    } else {
                        Ok(1.0 + (r / r_in).ln())
                    }
                })
                .collect::<Result<_>>()?;
            let num = compensated_sum(f.iter().zip(&h).zip(w).map(|((x, h), w)| w * h * x * x));
            let den = compensated_sum(f.iter().zip(&h).zip(w).map(|((x, h), w)| w * h * x.abs()));
            num / (den * grad_l2)
        }
    })
}
