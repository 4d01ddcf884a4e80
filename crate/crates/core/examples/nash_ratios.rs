//! Nash-type ratios stay bounded below across scalings of a bump.
//!
//! `cargo run --example nash_ratios`

use dampwave::domains::{radial_grid, Grid1D};
use dampwave::functionals::{nash_ratio, NashVariant};

fn bump(r: f64, center: f64, width: f64) -> f64 {
    let x = (r - center) / width;
    if x.abs() < 1.0 {
        (-1.0 / (1.0 - x * x)).exp()
    } else {
        0.0
    }
}

fn main() -> dampwave::Result<()> {
    let line = Grid1D::line(-200.0, 200.0, 8001)?;
    let shell3 = radial_grid(3, 1.0, 200.0, 8000)?;
    let shell2 = radial_grid(2, 1.0, 200.0, 8000)?;
    println!("{:>6} {:>12} {:>12} {:>12}", "width", "nash N=1", "gn N=3", "lognash N=2");
    for width in [0.5, 1.0, 2.0, 4.0, 8.0] {
        let f1: Vec<f64> = line.nodes().iter().map(|&x| bump(x, 0.0, width)).collect();
        let f3: Vec<f64> = shell3.nodes().iter().map(|&r| bump(r, 1.5 + width, width)).collect();
        let f2: Vec<f64> = shell2.nodes().iter().map(|&r| bump(r, 1.5 + width, width)).collect();
        println!(
            "{width:>6} {:>12.5} {:>12.5} {:>12.5}",
            nash_ratio(&f1, &line, NashVariant::Nash, None)?,
            nash_ratio(&f3, &shell3, NashVariant::Gn, None)?,
            nash_ratio(&f2, &shell2, NashVariant::Lognash, Some(1.0))?
        );
    }
    Ok(())
}
