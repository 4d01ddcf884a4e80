use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Geometry {
    /// `(0, length)` with Dirichlet ends.
    Interval { length: f64 },
    /// A window of the real line, no boundary condition.
    Line,
    /// The shell `r_in < |x| < r_out` in dimension `dim`, Dirichlet on both spheres.
    Radial { dim: usize, r_in: f64, r_out: f64 },
}

impl Geometry {
    pub fn dimension(&self) -> usize {
        match self {
            Geometry::Interval { .. } | Geometry::Line => 1,
            Geometry::Radial { dim, .. } => *dim,
        }
    }

    /// Positions carrying a zero Dirichlet value just outside the node range.
    pub fn dirichlet_ends(&self) -> Option<(f64, f64)> {
        match *self {
            Geometry::Interval { length } => Some((0.0, length)),
            Geometry::Line => None,
            Geometry::Radial { r_in, r_out, .. } => Some((r_in, r_out)),
        }
    }
}

/// Nodes with their cell measures (including `|S^{N-1}| r^{N-1}` on radial grids).
#[derive(Debug, Clone, PartialEq)]
pub struct Grid1D {
    nodes: Vec<f64>,
    cellweights: Vec<f64>,
    geometry: Geometry,
}

impl Grid1D {
    pub fn new(nodes: Vec<f64>, cellweights: Vec<f64>, geometry: Geometry) -> Result<Self> {
        check_len(nodes.len(), cellweights.len())?;
        if nodes.is_empty() {
            return Err(Error::Degenerate("grid needs at least one node".into()));
        }
        if nodes.windows(2).any(|w| !(w[1] > w[0])) || nodes.iter().any(|x| !x.is_finite()) {
            return Err(Error::domain("grid nodes must be finite and strictly increasing"));
        }
        if cellweights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::domain("cell weights must be finite and positive"));
        }
        if let Some((lo, hi)) = geometry.dirichlet_ends() {
            if nodes[0] <= lo || nodes[nodes.len() - 1] >= hi {
                return Err(Error::domain("grid nodes must lie strictly inside the domain"));
            }
        }
        Ok(Grid1D {
            nodes,
            cellweights,
            geometry,
        })
    }

    /// Uniform grid on `[x_min, x_max]` with equal cells, for line data.
    pub fn line(x_min: f64, x_max: f64, m: usize) -> Result<Self> {
        if !(x_max > x_min) || m < 3 {
            return Err(Error::domain("line grid needs x_max > x_min and m >= 3"));
        }
        let h = (x_max - x_min) / (m - 1) as f64;
        let nodes = (0..m).map(|i| x_min + h * i as f64).collect();
        Grid1D::new(nodes, vec![h; m], Geometry::Line)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn cellweights(&self) -> &[f64] {
        &self.cellweights
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn dimension(&self) -> usize {
        self.geometry.dimension()
    }

    /// Derivative along the grid coordinate: three-point centered stencil on
    /// nonuniform spacing, with the Dirichlet zero as the outer neighbour on
    /// bounded geometries and a one-sided second-order closure on the line.
    pub fn gradient(&self, f: &[f64]) -> Result<Vec<f64>> {
        check_len(self.len(), f.len())?;
        let n = self.len();
        let x = &self.nodes;
        let ends = self.geometry.dirichlet_ends();
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let left = if i > 0 {
                Some((x[i - 1], f[i - 1]))
            } else {
                ends.map(|(lo, _)| (lo, 0.0))
            };
            let right = if i + 1 < n {
                Some((x[i + 1], f[i + 1]))
            } else {
                ends.map(|(_, hi)| (hi, 0.0))
            };
            let g = match (left, right) {
                (Some(l), Some(r)) => centered(l, (x[i], f[i]), r),
                (None, Some(_)) if n >= 3 => one_sided((x[0], f[0]), (x[1], f[1]), (x[2], f[2]), x[0]),
                (Some(_), None) if n >= 3 => {
                    one_sided((x[n - 3], f[n - 3]), (x[n - 2], f[n - 2]), (x[n - 1], f[n - 1]), x[n - 1])
                }
                _ => return Err(Error::Degenerate("gradient needs three nodes".into())),
            };
            out.push(g);
        }
        Ok(out)
    }
}

fn centered(l: (f64, f64), c: (f64, f64), r: (f64, f64)) -> f64 {
    let hm = c.0 - l.0;
    let hp = r.0 - c.0;
    (hm * hm * r.1 - hp * hp * l.1 + (hp * hp - hm * hm) * c.1) / (hm * hp * (hm + hp))
}

/// Derivative at `x` of the quadratic through three points.
fn one_sided(a: (f64, f64), b: (f64, f64), c: (f64, f64), x: f64) -> f64 {
    let la = ((x - b.0) + (x - c.0)) / ((a.0 - b.0) * (a.0 - c.0));
    let lb = ((x - a.0) + (x - c.0)) / ((b.0 - a.0) * (b.0 - c.0));
    let lc = ((x - a.0) + (x - b.0)) / ((c.0 - a.0) * (c.0 - b.0));
    la * a.1 + lb * b.1 + lc * c.1
}
