//! Energy loss equals the dissipation integral; the sharp norm is equivalent to energy plus L².
//!
//! `cargo run --example energy_identity`

use dampwave::functionals::{dissipation_integral, energy, h_norm_sq};
use dampwave::spectral::{evolve, CauchyPair, ModalOperator, ModalVector};

fn main() -> dampwave::Result<()> {
    let lambdas: Vec<f64> = (0..40).map(|k| 0.01 * (k as f64).powi(2)).collect();
    let op = ModalOperator::from_eigenvalues("squares", &lambdas)?;
    let u0 = ModalVector::new((0..40).map(|k| (-0.1 * k as f64).exp()).collect());
    let u1 = ModalVector::new((0..40).map(|k| (k as f64).sin()).collect());
    let data = CauchyPair::new(u0.clone(), u1.clone())?;

    let e0 = energy(&op, &u0, &u1)?;
    for &t in &[0.5, 2.0, 10.0, 50.0] {
        let (u, up) = evolve(&op, &data, t)?;
        let loss = e0 - energy(&op, &u, &up)?;
        let diss = dissipation_integral(&op, &data, t, 1e-12)?;
        println!("t {t:>5}: E(0)-E(t) {loss:.12e}  2∫‖u'‖² {diss:.12e}  diff {:.1e}", loss - diss);
    }

    let (u, up) = evolve(&op, &data, 3.0)?;
    let h = h_norm_sq(&op, &u, &up)?;
    let e = energy(&op, &u, &up)?;
    let l2 = op.norm_sq(&u)?;
    println!("sharp norm² {h:.6}, energy {e:.6}, ‖u‖² {l2:.6}, ratio {:.4}", h / (e + l2));
    Ok(())
}
