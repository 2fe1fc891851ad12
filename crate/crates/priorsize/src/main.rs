use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use priorsize::cli;

/// Quantifies how much information a prior adds or subtracts, measured in
/// observations, by matching subsampled posterior uncertainty curves.
#[derive(Parser)]
#[command(name = "priorsize", version)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the diagnostic on a dataset described by a config file.
    Diagnose {
        /// Path to a key=value config file.
        #[arg(long)]
        config: PathBuf,
        /// Also write SVG plots next to the CSV outputs.
        #[arg(long)]
        svg: bool,
    },
    /// Print closed-form reference quantities for one (r, Delta^2, c).
    Oracle {
        /// Likelihood share r = k/(k+m), in (0, 1).
        #[arg(long)]
        r: f64,
        /// Squared standardized prior-truth distance.
        #[arg(long)]
        delta_sq: f64,
        /// Variance-share constant; 1/2 for all built-in families.
        #[arg(long, default_value_t = 0.5)]
        c: f64,
    },
    /// Run the built-in simulation scenarios and write summary tables.
    Simulate {
        /// Scenario set: normal, exp-rate, exp-mean or all.
        #[arg(long, default_value = "all")]
        set: String,
        /// Number of seeds per scenario.
        #[arg(long, default_value_t = 5)]
        seeds: u64,
        /// Output directory for the summary CSVs.
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let args = Args::parse();
    let result: Result<i32, priorsize::Error> = match args.command {
        Command::Diagnose { config, svg } => cli::parse_config(&config).and_then(|mut cfg| {
            cfg.svg = cfg.svg || svg;
            let (out, code) = cli::run_diagnose(&cfg)?;
            println!(
                "verdict: {} (slope {}, k0 {})",
                out.report.verdict.name(),
                out.report.slope.map(|s| format!("{s:.4}")).unwrap_or_else(|| "n/a".into()),
                out.report.k0
            );
            for w in &out.report.warnings {
                eprintln!("warning: {w}");
            }
            Ok(code)
        }),
        Command::Oracle { r, delta_sq, c } => cli::oracle_row(r, delta_sq, c).map(|row| {
            print!("{row}");
            0
        }),
        Command::Simulate { set, seeds, out } => cli::run_simulate(&set, seeds, &out).map(|()| 0),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
