//! Radial Dirichlet Laplacian on an exterior shell, vertex-centred finite
//! volumes on a logarithmic grid.
//!
//! Face coefficients are the exact fluxes of the radial harmonic profiles,
//! `|S^{N-1}| / ∫ r^{1-N} dr` over each gap, so the discrete operator
//! annihilates `1 - r_in/r` (N = 3) and `log(r/r_in)` (N = 2) exactly.

use std::f64::consts::PI;

use crate::error::{check_len, Error, Result};

use super::grid::{Geometry, Grid1D};

/// Largest radial node count accepted (the dense basis is `m^2` doubles).
pub const MAX_RADIAL_NODES: usize = 8192;

pub(crate) fn sphere_area(dim: usize) -> f64 {
    match dim {
        2 => 2.0 * PI,
        3 => 4.0 * PI,
        _ => unreachable!("dimension checked by caller"),
    }
}

pub(crate) fn check_shell(dim: usize, r_in: f64, r_out: f64, m: usize) -> Result<()> {
    let mut problems = Vec::new();
    if dim != 2 && dim != 3 {
        problems.push(format!("dimension {dim} not in {{2, 3}}"));
    }
    if !(r_in.is_finite() && r_in > 0.0) {
        problems.push(format!("r_in = {r_in} must be positive"));
    }
    if !(r_out.is_finite() && r_out > 4.0 * r_in) {
        problems.push(format!("r_out = {r_out} must exceed 4 r_in"));
    }
    if m < 64 {
        problems.push(format!("m = {m} below the minimum of 64"));
    }
    if m > MAX_RADIAL_NODES {
        problems.push(format!("m = {m} above the maximum of {MAX_RADIAL_NODES}"));
    }
    if problems.is_empty() {
        Ok(())
    } else {
        Err(Error::domain(problems.join("; ")))
    }
}

/// All `m + 2` radii, boundary included: `r_j = r_in e^{j Δs}`.
fn radii(r_in: f64, r_out: f64, m: usize) -> Vec<f64> {
    let ds = (r_out / r_in).ln() / (m + 1) as f64;
    let mut r: Vec<f64> = (0..m + 2).map(|j| r_in * (j as f64 * ds).exp()).collect();
    r[0] = r_in;
    r[m + 1] = r_out;
    r
}

fn face_coefficient(dim: usize, a: f64, b: f64) -> f64 {
    match dim {
        3 => 4.0 * PI * a * b / (b - a),
        _ => 2.0 * PI / (b / a).ln(),
    }
}

/// Interior nodes of the log-spaced shell grid with their cell volumes.
pub fn radial_grid(dim: usize, r_in: f64, r_out: f64, m: usize) -> Result<Grid1D> {
    if dim != 2 && dim != 3 {
        return Err(Error::domain(format!("dimension {dim} not in {{2, 3}}")));
    }
    if !(r_in > 0.0 && r_out > r_in) || m == 0 {
        return Err(Error::domain("radial grid needs 0 < r_in < r_out and m >= 1"));
    }
    let r = radii(r_in, r_out, m);
    let area = sphere_area(dim);
    let n = dim as i32;
    let weights = (1..=m)
        .map(|j| {
            let lo = 0.5 * (r[j - 1] + r[j]);
            let hi = 0.5 * (r[j] + r[j + 1]);
            area * (hi.powi(n) - lo.powi(n)) / dim as f64
        })
        .collect();
    Grid1D::new(
        r[1..=m].to_vec(),
        weights,
        Geometry::Radial { dim, r_in, r_out },
    )
}

/// Face coefficients for the gaps `(r_j, r_{j+1})`, `j = 0..=m`.
pub(crate) fn faces(grid: &Grid1D) -> Result<Vec<f64>> {
    let (dim, r_in, r_out) = match *grid.geometry() {
        Geometry::Radial { dim, r_in, r_out } => (dim, r_in, r_out),
        _ => return Err(Error::domain("radial stencil needs a radial grid")),
    };
    let mut r = Vec::with_capacity(grid.len() + 2);
    r.push(r_in);
    r.extend_from_slice(grid.nodes());
    r.push(r_out);
    Ok(r.windows(2).map(|w| face_coefficient(dim, w[0], w[1])).collect())
}

/// Symmetrized operator `W^{-1/2} K W^{-1/2}` as (diagonal, off-diagonal).
pub(crate) fn symmetric_tridiagonal(grid: &Grid1D) -> Result<(Vec<f64>, Vec<f64>)> {
    let a = faces(grid)?;
    let w = grid.cellweights();
    let m = grid.len();
    let diag = (0..m).map(|j| (a[j] + a[j + 1]) / w[j]).collect();
    let off = (0..m - 1)
        .map(|j| -a[j + 1] / (w[j] * w[j + 1]).sqrt())
        .collect();
    Ok((diag, off))
}

/// `-Δ f` on a radial grid, with zero values at both boundary spheres.
pub fn negative_laplacian(grid: &Grid1D, f: &[f64]) -> Result<Vec<f64>> {
    check_len(grid.len(), f.len())?;
    let a = faces(grid)?;
    let w = grid.cellweights();
    let m = grid.len();
    Ok((0..m)
        .map(|j| {
            let left = if j > 0 { f[j - 1] } else { 0.0 };
            let right = if j + 1 < m { f[j + 1] } else { 0.0 };
            (a[j] * (f[j] - left) + a[j + 1] * (f[j] - right)) / w[j]
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shell_volume_is_nearly_exact() {
        let g = radial_grid(3, 1.0, 10.0, 4000).unwrap();
        let v: f64 = g.cellweights().iter().sum();
        let exact = 4.0 * PI / 3.0 * (1000.0 - 1.0);
        // The half cells next to both spheres belong to the boundary nodes.
        assert!((v - exact).abs() / exact < 2e-3);
        assert!(v < exact);
    }

    #[test]
    fn guards() {
        assert!(check_shell(4, 1.0, 10.0, 100).is_err());
        assert!(check_shell(3, 1.0, 3.0, 100).is_err());
        assert!(check_shell(3, 1.0, 10.0, 10).is_err());
        assert!(check_shell(2, 1.0, 10.0, 64).is_ok());
    }
}
