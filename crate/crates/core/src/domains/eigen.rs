//! Symmetric tridiagonal eigensolver: implicit QL with Wilkinson-type
//! shifts.
//!
//! The eigenvector matrix is the product of the plane rotations, and each of
//! its rows evolves independently under them. The solver therefore carries a
//! `k x n` block of tracked rows: identity rows give the full eigenbasis,
//! while a data row `g` comes out as `g^T Z`, i.e. its coordinates in the
//! eigenbasis, at `O(n)` per rotation instead of `O(n^2)`.

use crate::error::{check_len, Error, Result};

/// Iterations allowed per eigenvalue before giving up.
pub const MAX_QL_ITERATIONS: usize = 60;

#[derive(Debug, Clone)]
pub struct TridiagEigen {
    /// Ascending eigenvalues.
    pub values: Vec<f64>,
    /// Column-major `n x n`; column `k` is the eigenvector of `values[k]`.
    pub vectors: Vec<f64>,
    pub n: usize,
}

impl TridiagEigen {
    pub fn vector(&self, k: usize) -> &[f64] {
        &self.vectors[k * self.n..(k + 1) * self.n]
    }
}

/// All eigenpairs of the symmetric tridiagonal matrix with main diagonal
/// `diag` and off-diagonal `offdiag` (length `n - 1`).
pub fn tridiag_eigh(diag: &[f64], offdiag: &[f64]) -> Result<TridiagEigen> {
    let n = diag.len();
    let mut z = vec![0.0; n * n];
    for i in 0..n {
        z[i * n + i] = 1.0;
    }
    let values = ql_tracked(diag, offdiag, &mut z, n)?;
    Ok(TridiagEigen {
        values,
        vectors: z,
        n,
    })
}

/// Eigenvalues plus `rows^T Z` for each tracked row.
#[derive(Debug, Clone)]
pub struct TrackedEigen {
    pub values: Vec<f64>,
    /// Column-major `k x n`: entry `(r, j)` is `<rows[r], z_j>`.
    pub projections: Vec<f64>,
    pub k: usize,
}

impl TrackedEigen {
    /// Coordinates of tracked row `r` against all eigenvectors.
    pub fn row(&self, r: usize) -> Vec<f64> {
        self.projections.iter().skip(r).step_by(self.k).copied().collect()
    }
}

/// Eigenvalues of the tridiagonal matrix and the eigen-coordinates of the
/// given rows, each of length `n`. Identical arithmetic to [`tridiag_eigh`].
pub fn tridiag_eigh_tracked(diag: &[f64], offdiag: &[f64], rows: &[Vec<f64>]) -> Result<TrackedEigen> {
    let n = diag.len();
    let k = rows.len();
    for r in rows {
        check_len(n, r.len())?;
    }
    let mut z = vec![0.0; n * k];
    for (r, row) in rows.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            z[j * k + r] = v;
        }
    }
    let values = ql_tracked(diag, offdiag, &mut z, k)?;
    Ok(TrackedEigen {
        values,
        projections: z,
        k,
    })
}

/// Implicit QL on `(diag, offdiag)`; every rotation of columns `(i, i+1)` is
/// also applied to the column-major block `z` with `k` rows. Returns the
/// ascending eigenvalues with the columns of `z` permuted to match.
fn ql_tracked(diag: &[f64], offdiag: &[f64], z: &mut [f64], k: usize) -> Result<Vec<f64>> {
    let n = diag.len();
    if n == 0 {
        return Err(Error::Degenerate("empty tridiagonal matrix".into()));
    }
    if offdiag.len() + 1 != n {
        return Err(Error::Shape {
            expected: n - 1,
            found: offdiag.len(),
        });
    }
    if diag.iter().chain(offdiag).any(|x| !x.is_finite()) {
        return Err(Error::domain("tridiagonal entries must be finite"));
    }
    let mut d = diag.to_vec();
    let mut e = offdiag.to_vec();
    e.push(0.0);

    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > MAX_QL_ITERATIONS {
                    return Err(Error::numeric(
                        "tridiagonal eigensolver",
                        format!("no convergence for eigenvalue {l} after {MAX_QL_ITERATIONS} iterations"),
                    ));
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    rotate_columns(z, k, i, c, s);
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }

    // Selection sort keeps the column swaps at O(n^2).
    for i in 0..n.saturating_sub(1) {
        let mut best = i;
        for j in i + 1..n {
            if d[j] < d[best] {
                best = j;
            }
        }
        if best != i {
            d.swap(i, best);
            if k > 0 {
                let (left, right) = z.split_at_mut(best * k);
                left[i * k..(i + 1) * k].swap_with_slice(&mut right[..k]);
            }
        }
    }
    Ok(d)
}

#[inline]
fn rotate_columns(z: &mut [f64], k: usize, i: usize, c: f64, s: f64) {
    if k == 0 {
        return;
    }
    let (left, right) = z.split_at_mut((i + 1) * k);
    let zi = &mut left[i * k..];
    let zj = &mut right[..k];
    for (a, b) in zi.iter_mut().zip(zj.iter_mut()) {
        let h = *b;
        *b = s * *a + c * h;
        *a = c * *a - s * h;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two() {
        let r = tridiag_eigh(&[2.0, 2.0], &[1.0]).unwrap();
        assert!((r.values[0] - 1.0).abs() < 1e-14);
        assert!((r.values[1] - 3.0).abs() < 1e-14);
        let v = r.vector(0);
        assert!((v[0] + v[1]).abs() < 1e-14);
    }

    #[test]
    fn one_by_one_and_shape_errors() {
        let r = tridiag_eigh(&[5.0], &[]).unwrap();
        assert_eq!(r.values, vec![5.0]);
        assert!(tridiag_eigh(&[1.0, 2.0], &[]).is_err());
        assert!(tridiag_eigh(&[], &[]).is_err());
    }

    #[test]
    fn tracked_rows_match_dense_vectors() {
        let n = 40;
        let diag: Vec<f64> = (0..n).map(|i| 2.0 + (i as f64).sin()).collect();
        let off: Vec<f64> = (0..n - 1).map(|i| 0.3 + 0.1 * (i as f64).cos()).collect();
        let dense = tridiag_eigh(&diag, &off).unwrap();
        let g: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).cos()).collect();
        let mut unit = vec![0.0; n];
        unit[7] = 1.0;
        let tracked = tridiag_eigh_tracked(&diag, &off, &[g.clone(), unit]).unwrap();
        assert_eq!(tracked.values, dense.values);
        let proj = tracked.row(0);
        let row7 = tracked.row(1);
        for j in 0..n {
            let direct: f64 = dense.vector(j).iter().zip(&g).map(|(a, b)| a * b).sum();
            assert!((proj[j] - direct).abs() < 1e-13);
            assert_eq!(row7[j], dense.vector(j)[7]);
        }
    }

    #[test]
    fn free_laplacian_spectrum() {
        let n = 50;
        let r = tridiag_eigh(&vec![2.0; n], &vec![-1.0; n - 1]).unwrap();
        for (k, l) in r.values.iter().enumerate() {
            let exact = 2.0 - 2.0 * ((k + 1) as f64 * std::f64::consts::PI / (n + 1) as f64).cos();
            assert!((l - exact).abs() < 1e-13);
        }
    }
}
