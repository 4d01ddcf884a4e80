//! Asymptotic profiles and how fast the remainder `u - V_n` decays.
//!
//! `cargo run --example profiles`

use dampwave::domains::build_interval;
use dampwave::expansion::{profile_poly, remainder};
use dampwave::rates::{fit_loglog, sample_schedule, RateSample};
use dampwave::spectral::{CauchyPair, ModalVector};

fn main() -> dampwave::Result<()> {
    for ell in 0..4 {
        let p = profile_poly(ell)?;
        println!("ell {ell}: {p:?}");
    }

    // Low modes of a long interval approximate the small-frequency regime.
    let domain = build_interval(200.0, 200)?;
    let op = domain.operator();
    let u0 = ModalVector::new((0..op.len()).map(|k| 1.0 / (1.0 + k as f64).powi(2)).collect());
    let u1 = u0.scale(0.5);
    let data = CauchyPair::new(u0, u1)?;

    let times = sample_schedule(1.0, 100.0, 12)?;
    for n in 0..4 {
        let s: Vec<RateSample> = times
            .iter()
            .map(|&t| {
                let (r, _) = remainder(n, op, &data, t)?;
                Ok(RateSample::new(t, op.norm(&r)?))
            })
            .collect::<dampwave::Result<_>>()?;
        let fit = fit_loglog(&s)?;
        let what = if n == 0 { "‖u‖".to_string() } else { format!("‖u - V_{n}‖") };
        println!("{what:<11} at t=100 {:.3e}, log-log slope {:.3}", s.last().unwrap().value, fit.slope);
    }
    Ok(())
}
