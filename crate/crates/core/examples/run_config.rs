//! Runs a JSON experiment config and prints fits and verdicts.
//!
//! `cargo run --example run_config -- configs/line_gaussian.json`

use dampwave::runner::{run, ExperimentConfig};

fn main() -> dampwave::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| "configs/line_gaussian.json".into());
    let config = ExperimentConfig::load(path.as_ref())?;
    let report = run(&config)?;
    for f in &report.fits {
        match &f.fit {
            Some(fit) => println!("{:<28} slope {:>8.4}  rms {:.2e}", f.series, fit.slope, fit.rms_residual),
            None => println!("{:<28} no fit: {}", f.series, f.note.as_deref().unwrap_or("")),
        }
    }
    for v in &report.verdicts {
        println!("{} {:<28} {}", if v.passed { "PASS" } else { "FAIL" }, v.series, v.detail);
    }
    if let Some(rt) = report.runtime {
        println!("runtime {:.2}s", rt.as_secs_f64());
    }
    Ok(())
}
