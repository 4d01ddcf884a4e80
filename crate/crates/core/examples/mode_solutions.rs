//! Closed-form mode solutions across the damping regimes, against the heat mode.
//!
//! `cargo run --example mode_solutions`

use dampwave::spectral::{heat_mode, mode_derivative, mode_solve};

fn main() -> dampwave::Result<()> {
    println!("{:>8} {:>6} {:>14} {:>14} {:>14}", "lambda", "t", "w(t)", "w'(t)", "heat e^{-λt}");
    for &lambda in &[0.0, 0.1, 0.25, 1.0, 25.0] {
        for &t in &[0.0, 1.0, 10.0] {
            let s = mode_solve(lambda, 1.0, 0.0, t)?;
            println!(
                "{lambda:>8} {t:>6} {:>14.6e} {:>14.6e} {:>14.6e}",
                s.value,
                s.derivative,
                heat_mode(lambda, t)?
            );
        }
    }
    // Low modes behave like the heat flow; the difference decays faster.
    let lambda = 1e-3;
    for &t in &[10.0, 100.0, 1000.0] {
        let w = mode_solve(lambda, 1.0, 1.0, t)?.value;
        println!("lambda {lambda}: t {t:>6}  w - (a+b)e^(-λt) = {:.3e}", w - 2.0 * heat_mode(lambda, t)?);
    }
    let d2 = mode_derivative(0.25, 1.0, 0.0, 1.0, 1)?;
    println!("critical mode at t=1: w'' = {:.15}", d2.derivative);
    Ok(())
}
