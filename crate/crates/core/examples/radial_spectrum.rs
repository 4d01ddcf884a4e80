//! Radial Dirichlet spectra of shells against Bessel and sine references.
//!
//! `cargo run --example radial_spectrum`

use dampwave::domains::build_radial_exterior;
use dampwave::oracle::{annulus_first_eigenvalue, shell3d_eigenvalue};

fn main() -> dampwave::Result<()> {
    let (a, b) = (1.0, 9.0);
    for m in [250, 500, 1000] {
        let shell = build_radial_exterior(3, a, b, m)?;
        let first: Vec<f64> = shell.operator().lambdas().take(3).collect();
        let err = (first[0] - shell3d_eigenvalue(1, a, b)).abs() / shell3d_eigenvalue(1, a, b);
        println!("3D m {m:>5}: {first:.6?}  rel err {err:.2e}  orth {:.1e}", shell.orthonormality_defect());
    }
    let (a, b) = (1.0, 8.0);
    let exact = annulus_first_eigenvalue(a, b);
    for m in [250, 500, 1000] {
        let annulus = build_radial_exterior(2, a, b, m)?;
        let l = annulus.operator().lambdas().next().unwrap();
        println!("2D m {m:>5}: {l:.8}  exact {exact:.8}  rel err {:.2e}", (l - exact).abs() / exact);
    }
    Ok(())
}
