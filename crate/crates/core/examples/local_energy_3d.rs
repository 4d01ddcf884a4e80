//! Local energy decay outside a ball in three dimensions.
//!
//! `cargo run --release --example local_energy_3d`

use dampwave::runner::run;
use dampwave::verify::acceptance::shell3d_config;

fn main() -> dampwave::Result<()> {
    let report = run(&shell3d_config())?;
    for s in &report.series {
        let (first, last) = (s.samples[0], s.samples[s.samples.len() - 1]);
        println!("{:<24} t {:>5} -> {:>5}: {:.3e} -> {:.3e}", s.name, first.t, last.t, first.value, last.value);
    }
    for v in &report.verdicts {
        println!("{} {:<24} {}", if v.passed { "PASS" } else { "FAIL" }, v.series, v.detail);
    }
    Ok(())
}
