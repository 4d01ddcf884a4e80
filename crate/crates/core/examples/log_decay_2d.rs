//! Logarithmically corrected L² decay outside a disk: `t ‖u‖² log²(t)` stays bounded.
//!
//! `cargo run --release --example log_decay_2d`

use dampwave::runner::run;
use dampwave::verify::acceptance::shell2d_config;

fn main() -> dampwave::Result<()> {
    let report = run(&shell2d_config())?;
    let l2 = &report.series[0];
    for s in &l2.samples {
        let compensated = s.t * s.value * s.value * s.t.ln().powi(2);
        println!("t {:>9.2}  ‖u‖ {:.4e}  t‖u‖²log²t {compensated:.4}", s.t, s.value);
    }
    for v in &report.verdicts {
        println!("{} {}", if v.passed { "PASS" } else { "FAIL" }, v.detail);
    }
    Ok(())
}
