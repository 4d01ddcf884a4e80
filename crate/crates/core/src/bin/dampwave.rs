use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use dampwave::runner::{self, export, write_outputs, ExperimentConfig, ExportFormat, Report};
use dampwave::verify::{self, Fault, Level, Options};

#[derive(Parser)]
#[command(name = "dampwave", version, about = "Damped wave decay experiments and invariant checks")]
struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true, env = "DEL_THREADS")]
    threads: Option<usize>,

    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment config and write `<name>.csv` and `<name>.json`.
    Simulate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run the invariant suite and print a JSON summary.
    Verify {
        #[arg(long, value_enum, default_value = "fast")]
        level: LevelArg,
        #[arg(long, value_enum, hide = true)]
        inject_fault: Option<FaultArg>,
    },
    /// Write a report in one format, from a saved JSON report or a config.
    Export {
        #[arg(long, value_enum)]
        format: FormatArg,
        #[arg(long, conflicts_with = "config", required_unless_present = "config")]
        report: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelArg {
    Fast,
    Full,
}

#[derive(Clone, Copy, ValueEnum)]
enum FaultArg {
    CorruptBinomials,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn out_dir(cli_out: Option<PathBuf>, config: &ExperimentConfig) -> PathBuf {
    cli_out
        .or_else(|| config.output.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"))
}

fn run(cli: Cli) -> dampwave::Result<ExitCode> {
    match cli.command {
        Command::Simulate { config } => {
            let config = ExperimentConfig::load(&config)?;
            let report = runner::run(&config)?;
            let dir = out_dir(cli.out, &config);
            for path in write_outputs(&report, &dir)? {
                eprintln!("wrote {}", path.display());
            }
            for v in &report.verdicts {
                println!("{} {} {}", if v.passed { "PASS" } else { "FAIL" }, v.series, v.detail);
            }
            if let Some(rt) = report.runtime {
                eprintln!("runtime {:.2}s", rt.as_secs_f64());
            }
            Ok(if report.all_passed() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Verify { level, inject_fault } => {
            let level = match level {
                LevelArg::Fast => Level::Fast,
                LevelArg::Full => Level::Full,
            };
            let options = Options {
                fault: inject_fault.map(|FaultArg::CorruptBinomials| Fault::CorruptBinomials),
            };
            let summary = verify::run_suite(level, options);
            let json = serde_json::to_string_pretty(&summary)?;
            if let Some(dir) = cli.out {
                std::fs::create_dir_all(&dir)?;
                std::fs::write(dir.join("verify.json"), format!("{json}\n"))?;
            }
            println!("{json}");
            for c in summary.failures() {
                eprintln!("FAILED {}::{} {}: {}", c.module, c.op, c.name, c.detail);
            }
            Ok(if summary.passed { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Export { format, report, config } => {
            let format = match format {
                FormatArg::Csv => ExportFormat::Csv,
                FormatArg::Json => ExportFormat::Json,
            };
            let report = match (report, config) {
                (Some(path), _) => Report::from_json(&std::fs::read_to_string(path)?)?,
                (None, Some(path)) => runner::run(&ExperimentConfig::load(&path)?)?,
                (None, None) => unreachable!("clap requires one source"),
            };
            let dir = out_dir(cli.out, &report.config);
            let path = export(&report, format, &dir)?;
            println!("{}", path.display());
            Ok(ExitCode::SUCCESS)
        }
    }
}
