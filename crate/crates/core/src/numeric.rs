//! Small numerical kernels shared by every module: compensated summation,
//! exact binomials, Gauss-Legendre rules and adaptive Simpson quadrature.

use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Neumaier-compensated sum in the iteration order of `values`.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut acc = Accumulator::default();
    for v in values {
        acc.add(v);
    }
    acc.total()
}

/// Running Neumaier sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct Accumulator {
    sum: f64,
    comp: f64,
}

impl Accumulator {
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Pascal triangle of exact `u128` binomials.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinomialTable {
    rows: Vec<Vec<u128>>,
}

/// Largest row kept in the shared table.
pub const BINOMIAL_ROWS: usize = 64;

impl BinomialTable {
    pub fn new(max_n: usize) -> Self {
        let mut rows: Vec<Vec<u128>> = Vec::with_capacity(max_n + 1);
        for n in 0..=max_n {
            let mut row = vec![1u128; n + 1];
            for k in 1..n {
                row[k] = rows[n - 1][k - 1] + rows[n - 1][k];
            }
            rows.push(row);
        }
        BinomialTable { rows }
    }

    /// Process-wide table with rows `0..=BINOMIAL_ROWS`.
    pub fn shared() -> &'static BinomialTable {
        static TABLE: OnceLock<BinomialTable> = OnceLock::new();
        TABLE.get_or_init(|| BinomialTable::new(BINOMIAL_ROWS))
    }

    pub fn max_n(&self) -> usize {
        self.rows.len() - 1
    }

    /// `C(n, k)`, zero outside `0..=n`.
    pub fn exact(&self, n: usize, k: usize) -> u128 {
        if k > n {
            0
        } else {
            self.rows[n][k]
        }
    }

    pub fn get(&self, n: usize, k: usize) -> f64 {
        self.exact(n, k) as f64
    }

    /// Copy with one entry shifted by `delta`; a fault-injection hook for `verify`.
    pub fn corrupted(&self, n: usize, k: usize, delta: i64) -> Self {
        let mut out = self.clone();
        if n < out.rows.len() && k <= n {
            let v = out.rows[n][k] as i128 + delta as i128;
            out.rows[n][k] = v.max(0) as u128;
        }
        out
    }
}

/// `1/j!` for `j <= 170`.
pub fn inv_factorial(j: usize) -> f64 {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    let t = TABLE.get_or_init(|| {
        let mut v = Vec::with_capacity(171);
        let mut f = 1.0f64;
        v.push(1.0);
        for i in 1..=170 {
            f *= i as f64;
            v.push(1.0 / f);
        }
        v
    });
    t[j]
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        if d != 0.0 {
            dp = d;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Tolerances for [`adaptive_simpson`].
#[derive(Debug, Clone, Copy)]
pub struct QuadTol {
    pub abs: f64,
    pub rel: f64,
    pub max_subdivisions: usize,
}

impl QuadTol {
    pub fn new(tol: f64) -> Self {
        QuadTol {
            abs: tol,
            rel: tol,
            max_subdivisions: 1 << 16,
        }
    }
}

struct Panel {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

/// Adaptive Simpson on `[a, b]` with Richardson correction.
///
/// A panel is accepted once its local error estimate is below its share of
/// `max(abs, rel * |estimate|)`. Accepted contributions are summed in
/// left-to-right order.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: QuadTol) -> Result<f64> {
    if !(a.is_finite() && b.is_finite()) || b < a {
        return Err(Error::domain(format!("quadrature interval [{a}, {b}]")));
    }
    if a == b {
        return Ok(0.0);
    }
    let initial = 16usize;
    let width = b - a;
    let mut panels: Vec<Panel> = Vec::with_capacity(initial);
    let mut coarse = Accumulator::default();
    for i in 0..initial {
        let pa = a + width * i as f64 / initial as f64;
        let pb = if i + 1 == initial {
            b
        } else {
            a + width * (i + 1) as f64 / initial as f64
        };
        let (fa, fm, fb) = (f(pa), f(0.5 * (pa + pb)), f(pb));
        let whole = simpson(pa, pb, fa, fm, fb);
        coarse.add(whole);
        panels.push(Panel {
            a: pa,
            b: pb,
            fa,
            fm,
            fb,
            whole,
        });
    }
    let scale = coarse.total().abs();
    let budget = tol.abs.max(tol.rel * scale);
    let mut subdivisions = initial;
    let mut done: Vec<(f64, f64)> = Vec::new();
    // Depth-first, leftmost panel first, so `done` comes out ordered by position.
    panels.reverse();
    while let Some(p) = panels.pop() {
        let m = 0.5 * (p.a + p.b);
        let lm = 0.5 * (p.a + m);
        let rm = 0.5 * (m + p.b);
        let (flm, frm) = (f(lm), f(rm));
        let left = simpson(p.a, m, p.fa, flm, p.fm);
        let right = simpson(m, p.b, p.fm, frm, p.fb);
        let diff = left + right - p.whole;
        let share = budget * (p.b - p.a) / width;
        if !diff.is_finite() {
            return Err(Error::numeric("adaptive quadrature", "non-finite integrand"));
        }
        if diff.abs() <= 15.0 * share || p.b - p.a <= width * 1e-14 {
            done.push((p.a, left + right + diff / 15.0));
            continue;
        }
        subdivisions += 1;
        if subdivisions > tol.max_subdivisions {
            return Err(Error::Convergence {
                stage: "adaptive quadrature".into(),
            });
        }
        panels.push(Panel {
            a: m,
            b: p.b,
            fa: p.fm,
            fm: frm,
            fb: p.fb,
            whole: right,
        });
        panels.push(Panel {
            a: p.a,
            b: m,
            fa: p.fa,
            fm: flm,
            fb: p.fm,
            whole: left,
        });
    }
    Ok(compensated_sum(done.into_iter().map(|(_, v)| v)))
}
