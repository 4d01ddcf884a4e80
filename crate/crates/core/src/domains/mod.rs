//! Concrete realizations of the Dirichlet Laplacian.

mod eigen;
mod grid;
mod radial;
mod whole_line;

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::numeric::Accumulator;
use crate::spectral::{ModalOperator, ModalVector};

pub use eigen::{tridiag_eigh, tridiag_eigh_tracked, TrackedEigen, TridiagEigen, MAX_QL_ITERATIONS};
pub use grid::{Geometry, Grid1D};
pub use radial::{negative_laplacian, radial_grid, MAX_RADIAL_NODES};
pub use whole_line::{build_whole_line, gaussian_transform, Parity, WholeLine, LOW_BLOCK};

/// Largest interval grid.
pub const MAX_INTERVAL_NODES: usize = 4096;

/// Relative threshold below which slightly negative eigenvalues are set to zero.
pub const CLAMP_THRESHOLD: f64 = 1e-12;

/// JSON description of a domain: geometry and resolution, never eigendata.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DomainSpec {
    Interval { length: f64, m: usize },
    WholeLine { xi_min: f64, xi_max: f64, m: usize },
    Radial { dim: usize, r_in: f64, r_out: f64, m: usize },
}

/// A grid, the spectral data of its discrete Laplacian and a dense table of
/// mode shapes orthonormal under the cell weights.
#[derive(Debug, Clone)]
pub struct RealizedDomain {
    spec: DomainSpec,
    grid: Grid1D,
    operator: ModalOperator,
    /// Column-major: mode `k` occupies `basis[k*m..(k+1)*m]`.
    basis: Vec<f64>,
}

impl RealizedDomain {
    pub fn spec(&self) -> &DomainSpec {
        &self.spec
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn operator(&self) -> &ModalOperator {
        &self.operator
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn mode_shape(&self, k: usize) -> &[f64] {
        let m = self.len();
        &self.basis[k * m..(k + 1) * m]
    }

    /// `c_k = Σ_i w_i φ_k(x_i) f_i`.
    pub fn analyze(&self, f: &[f64]) -> Result<ModalVector> {
        check_len(self.len(), f.len())?;
        let wf: Vec<f64> = f
            .iter()
            .zip(self.grid.cellweights())
            .map(|(f, w)| f * w)
            .collect();
        Ok(ModalVector::new(
            (0..self.operator.len())
                .map(|k| {
                    let mut acc = Accumulator::default();
                    for (p, x) in self.mode_shape(k).iter().zip(&wf) {
                        acc.add(p * x);
                    }
                    acc.total()
                })
                .collect(),
        ))
    }

    /// `f_i = Σ_k c_k φ_k(x_i)`.
    pub fn synthesize(&self, c: &ModalVector) -> Result<Vec<f64>> {
        self.operator.check(c)?;
        let mut out = vec![0.0; self.len()];
        for (k, &ck) in c.iter().enumerate() {
            if ck == 0.0 {
                continue;
            }
            for (o, p) in out.iter_mut().zip(self.mode_shape(k)) {
                *o += ck * p;
            }
        }
        Ok(out)
    }

    /// Largest deviation of the weighted Gram matrix from the identity.
    pub fn orthonormality_defect(&self) -> f64 {
        let m = self.len();
        let w = self.grid.cellweights();
        let mut worst: f64 = 0.0;
        for a in 0..m {
            let pa: Vec<f64> = self.mode_shape(a).iter().zip(w).map(|(p, w)| p * w).collect();
            for b in a..m {
                let g: f64 = pa.iter().zip(self.mode_shape(b)).map(|(x, y)| x * y).sum();
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((g - target).abs());
            }
        }
        worst
    }
}

impl DomainSpec {
    pub fn check(&self) -> Result<()> {
        match *self {
            DomainSpec::Interval { length, m } => check_interval(length, m),
            DomainSpec::WholeLine { xi_min, xi_max, m } => build_whole_line(xi_min, xi_max, m).map(|_| ()),
            DomainSpec::Radial { dim, r_in, r_out, m } => radial::check_shell(dim, r_in, r_out, m),
        }
    }
}

fn check_interval(length: f64, m: usize) -> Result<()> {
    if !(length.is_finite() && length > 0.0) {
        return Err(Error::domain(format!("interval length {length} must be positive")));
    }
    if m == 0 || m > MAX_INTERVAL_NODES {
        return Err(Error::domain(format!(
            "interval size m = {m} outside 1..={MAX_INTERVAL_NODES}"
        )));
    }
    Ok(())
}

/// Sine basis on `(0, L)`: `λ_k = (kπ/L)²`, shapes `√(2/L) sin(kπx/L)` on the
/// uniform interior grid `x_i = iL/(m+1)`, where they are exactly orthonormal.
pub fn build_interval(length: f64, m: usize) -> Result<RealizedDomain> {
    check_interval(length, m)?;
    let h = length / (m + 1) as f64;
    let nodes: Vec<f64> = (1..=m).map(|i| i as f64 * h).collect();
    let grid = Grid1D::new(nodes, vec![h; m], Geometry::Interval { length })?;
    let pi = std::f64::consts::PI;
    let lambdas: Vec<f64> = (1..=m)
        .map(|k| {
            let x = k as f64 * (pi / length);
            x * x
        })
        .collect();
    let amp = (2.0 / length).sqrt();
    let mut basis = Vec::with_capacity(m * m);
    for k in 1..=m {
        for i in 1..=m {
            // Reduce the argument exactly before scaling by π.
            let r = (k * i) % (2 * (m + 1));
            basis.push(amp * (pi * r as f64 / (m + 1) as f64).sin());
        }
    }
    Ok(RealizedDomain {
        spec: DomainSpec::Interval { length, m },
        grid,
        operator: ModalOperator::from_eigenvalues(format!("interval(L={length})"), &lambdas)?,
        basis,
    })
}

/// Finite-volume Dirichlet Laplacian on the shell `r_in < r < r_out` in
/// dimension `N ∈ {2, 3}`, fully diagonalized.
pub fn build_radial_exterior(dim: usize, r_in: f64, r_out: f64, m: usize) -> Result<RealizedDomain> {
    radial::check_shell(dim, r_in, r_out, m)?;
    let grid = radial_grid(dim, r_in, r_out, m)?;
    let (diag, off) = radial::symmetric_tridiagonal(&grid)?;
    let max_diag = diag.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    let eig = tridiag_eigh(&diag, &off)?;
    let lambdas = clamp_spectrum(&eig.values, max_diag)?;
    let inv_sqrt_w: Vec<f64> = grid.cellweights().iter().map(|w| 1.0 / w.sqrt()).collect();
    let mut basis = eig.vectors;
    for col in basis.chunks_mut(m) {
        for (v, s) in col.iter_mut().zip(&inv_sqrt_w) {
            *v *= s;
        }
    }
    Ok(RealizedDomain {
        spec: DomainSpec::Radial { dim, r_in, r_out, m },
        grid,
        operator: ModalOperator::from_eigenvalues(
            format!("radial(N={dim}, r_in={r_in}, r_out={r_out})"),
            &lambdas,
        )?,
        basis,
    })
}

fn clamp_spectrum(values: &[f64], max_diag: f64) -> Result<Vec<f64>> {
    let floor = -CLAMP_THRESHOLD * max_diag;
    values
        .iter()
        .map(|&l| {
            if l < floor {
                Err(Error::numeric(
                    "radial eigendecomposition",
                    format!("eigenvalue {l} below the clamp floor {floor}"),
                ))
            } else {
                Ok(l.max(0.0))
            }
        })
        .collect()
}

/// A radial shell diagonalized only as far as a few quantities require:
/// the eigen-coordinates of given grid functions and the mode shapes at the
/// nodes `r <= probe_radius` (plus one neighbour for gradients).
///
/// Uses the same grid, operator and rotations as [`build_radial_exterior`],
/// at `O(m^2 (1 + probes/m))` cost instead of `O(m^3)`.
#[derive(Debug, Clone)]
pub struct ProjectedDomain {
    spec: DomainSpec,
    grid: Grid1D,
    probe_grid: Grid1D,
    operator: ModalOperator,
    /// Column-major `p x m`: `φ_j` at probe node `i` is `probe_shapes[j*p + i]`.
    probe_shapes: Vec<f64>,
    projections: Vec<ModalVector>,
}

pub fn build_radial_projected(
    dim: usize,
    r_in: f64,
    r_out: f64,
    m: usize,
    functions: &[Vec<f64>],
    probe_radius: f64,
) -> Result<ProjectedDomain> {
    radial::check_shell(dim, r_in, r_out, m)?;
    let grid = radial_grid(dim, r_in, r_out, m)?;
    for f in functions {
        check_len(m, f.len())?;
    }
    let probes = grid.nodes().iter().take_while(|&&r| r <= probe_radius).count();
    let probes = (probes + 1).min(m);
    let (diag, off) = radial::symmetric_tridiagonal(&grid)?;
    let max_diag = diag.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    let sqrt_w: Vec<f64> = grid.cellweights().iter().map(|w| w.sqrt()).collect();
    let mut rows: Vec<Vec<f64>> = functions
        .iter()
        .map(|f| f.iter().zip(&sqrt_w).map(|(f, s)| f * s).collect())
        .collect();
    for i in 0..probes {
        let mut e = vec![0.0; m];
        e[i] = 1.0;
        rows.push(e);
    }
    let tracked = tridiag_eigh_tracked(&diag, &off, &rows)?;
    let lambdas = clamp_spectrum(&tracked.values, max_diag)?;
    let projections = (0..functions.len())
        .map(|r| ModalVector::new(tracked.row(r)))
        .collect();
    let k = tracked.k;
    let nf = functions.len();
    let mut probe_shapes = Vec::with_capacity(probes * m);
    for j in 0..m {
        for i in 0..probes {
            probe_shapes.push(tracked.projections[j * k + nf + i] / sqrt_w[i]);
        }
    }
    let probe_grid = Grid1D::new(
        grid.nodes()[..probes].to_vec(),
        grid.cellweights()[..probes].to_vec(),
        *grid.geometry(),
    )?;
    Ok(ProjectedDomain {
        spec: DomainSpec::Radial { dim, r_in, r_out, m },
        grid,
        probe_grid,
        operator: ModalOperator::from_eigenvalues(
            format!("radial(N={dim}, r_in={r_in}, r_out={r_out})"),
            &lambdas,
        )?,
        probe_shapes,
        projections,
    })
}

impl ProjectedDomain {
    pub fn spec(&self) -> &DomainSpec {
        &self.spec
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    /// The leading nodes at which mode shapes are known.
    pub fn probe_grid(&self) -> &Grid1D {
        &self.probe_grid
    }

    pub fn operator(&self) -> &ModalOperator {
        &self.operator
    }

    /// Eigen-coordinates of the `i`-th function passed to the builder.
    pub fn projection(&self, i: usize) -> &ModalVector {
        &self.projections[i]
    }

    /// `Σ_k c_k φ_k` at the probe nodes.
    pub fn synthesize_probes(&self, c: &ModalVector) -> Result<Vec<f64>> {
        self.operator.check(c)?;
        let p = self.probe_grid.len();
        let mut out = vec![0.0; p];
        for (j, &cj) in c.iter().enumerate() {
            if cj == 0.0 {
                continue;
            }
            for (o, s) in out.iter_mut().zip(&self.probe_shapes[j * p..(j + 1) * p]) {
                *o += cj * s;
            }
        }
        Ok(out)
    }
}

/// The radial harmonic function vanishing on the inner sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarmonicProfile {
    pub dim: usize,
    pub r_in: f64,
}

pub fn harmonic_profile(dim: usize, r_in: f64) -> Result<HarmonicProfile> {
    if dim != 2 && dim != 3 {
        return Err(Error::domain(format!("dimension {dim} not in {{2, 3}}")));
    }
    if !(r_in.is_finite() && r_in > 0.0) {
        return Err(Error::domain("r_in must be positive"));
    }
    Ok(HarmonicProfile { dim, r_in })
}

impl HarmonicProfile {
    fn check(&self, r: f64) -> Result<()> {
        if r >= self.r_in && r.is_finite() {
            Ok(())
        } else {
            Err(Error::domain(format!("radius {r} below r_in = {}", self.r_in)))
        }
    }

    /// `1 - r_in/r` for N = 3, `log(r/r_in)` for N = 2.
    pub fn value(&self, r: f64) -> Result<f64> {
        self.check(r)?;
        Ok(match self.dim {
            3 => 1.0 - self.r_in / r,
            _ => (r / self.r_in).ln(),
        })
    }

    pub fn derivative(&self, r: f64) -> Result<f64> {
        self.check(r)?;
        Ok(match self.dim {
            3 => self.r_in / (r * r),
            _ => 1.0 / r,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_spectrum_on_pi() {
        let d = build_interval(std::f64::consts::PI, 32).unwrap();
        for (k, l) in d.operator().lambdas().enumerate() {
            assert_eq!(l, ((k + 1) * (k + 1)) as f64);
        }
        assert!(d.orthonormality_defect() < 1e-13);
    }

    #[test]
    fn interval_analyze_sine() {
        let pi = std::f64::consts::PI;
        let d = build_interval(pi, 64).unwrap();
        let f: Vec<f64> = d.grid().nodes().iter().map(|x| x.sin()).collect();
        let c = d.analyze(&f).unwrap();
        // sin x = √(π/2) φ_1.
        assert!((c[0] - (pi / 2.0).sqrt()).abs() < 1e-12);
        assert!(c.iter().skip(1).all(|x| x.abs() < 1e-12));
    }

    #[test]
    fn harmonic_values() {
        let h = harmonic_profile(3, 2.0).unwrap();
        assert_eq!(h.value(2.0).unwrap(), 0.0);
        assert_eq!(h.value(4.0).unwrap(), 0.5);
        assert!(h.value(1.0).is_err());
        let h2 = harmonic_profile(2, 1.0).unwrap();
        assert_eq!(h2.value(1.0).unwrap(), 0.0);
        assert!(harmonic_profile(4, 1.0).is_err());
    }

    #[test]
    fn spec_roundtrip() {
        let s = DomainSpec::Radial { dim: 3, r_in: 1.0, r_out: 400.0, m: 3000 };
        let j = serde_json::to_string(&s).unwrap();
        assert_eq!(j, r#"{"kind":"radial","dim":3,"r_in":1.0,"r_out":400.0,"m":3000}"#);
        assert_eq!(serde_json::from_str::<DomainSpec>(&j).unwrap(), s);
    }
}
