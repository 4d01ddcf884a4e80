//! Decay of `‖∂_t^n u‖₂` on the line for Gaussian data, fitted against `t^{-1/4-n}`.
//!
//! `cargo run --example whole_line_decay`

use dampwave::domains::{build_whole_line, gaussian_transform};
use dampwave::rates::{fit_window, sample_schedule, RateSample};
use dampwave::spectral::{evolve_derivative, CauchyPair};

fn main() -> dampwave::Result<()> {
    let line = build_whole_line(1e-3, 40.0, 400)?;
    let op = line.operator();
    let u0 = line.from_spectrum(|xi| gaussian_transform(1.0, xi));
    let data = CauchyPair::new(u0.clone(), u0.scale(0.0))?;
    println!("quadrature valid until t = {:.3e}", line.valid_until());

    let times = sample_schedule(1.0, 1e4, 30)?;
    for n in 0..3 {
        let s: Vec<RateSample> = times
            .iter()
            .map(|&t| {
                let (d, _) = evolve_derivative(op, &data, t, n)?;
                Ok(RateSample::new(t, op.norm(&d)?))
            })
            .collect::<dampwave::Result<_>>()?;
        let fit = fit_window(&s, 0.3)?;
        println!("n {n}: slope {:.4}  expected {:.4}", fit.slope, -0.25 - n as f64);
    }
    Ok(())
}
