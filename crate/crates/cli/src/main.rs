//! `hca` — exact Hamiltonian-CA experiments from the command line.
//!
//! Two subcommands:
//!
//! * `hca run <config.json>` executes one experiment described by a config
//!   file and writes a deterministic `report.json` (plus experiment
//!   artifacts) into the configured output directory. Exit code 0 when every
//!   check passed, 1 when a check failed, 2 for config or I/O errors.
//! * `hca verify-all [--seed N] [--out DIR]` runs the canned verification
//!   suite and prints one line per criterion.

mod config;
mod experiments;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand};

use config::ConfigFile;
use hca_core::verify;

#[derive(Parser)]
#[command(
    name = "hca",
    version,
    about = "exact integer Hamiltonian cellular automata"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment from a JSON config file.
    Run {
        /// Path to the experiment config.
        config: PathBuf,
    },
    /// Run the full canned verification suite.
    VerifyAll {
        /// Seed for the randomized checks (fixed default for reproducible runs).
        #[arg(long, default_value_t = 0x5eed_cafe)]
        seed: u64,
        /// Output directory for per-criterion reports.
        #[arg(long, default_value = "hca-verify")]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run { config } => run_experiment(&config),
        Command::VerifyAll { seed, out } => verify_all(seed, &out),
    }
}

fn config_error(message: impl std::fmt::Display) -> ExitCode {
    eprintln!("config error: {message}");
    ExitCode::from(2)
}

fn run_experiment(path: &Path) -> ExitCode {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return config_error(format!("{}: {e}", path.display())),
    };
    let file = match ConfigFile::parse(&text) {
        Ok(f) => f,
        Err(e) => return config_error(e),
    };
    if let Err(e) = file.experiment.validate() {
        return config_error(e);
    }
    let out_dir = PathBuf::from(&file.out_dir);
    if let Err(e) = fs::create_dir_all(&out_dir) {
        return config_error(format!("{}: {e}", out_dir.display()));
    }

    let report = match experiments::run(&file.experiment, &out_dir) {
        Ok(r) => r,
        Err(e) => return config_error(e),
    };
    if let Err(e) = experiments::write_json(&out_dir.join("report.json"), &report) {
        return config_error(e);
    }
    // wall-clock metadata lives in its own file so report.json stays
    // byte-identical across runs of the same config
    if let Err(e) = write_meta(&out_dir) {
        return config_error(e);
    }

    println!(
        "{}: {}",
        report.experiment,
        if report.passed { "PASS" } else { "FAIL" }
    );
    if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn write_meta(out_dir: &Path) -> anyhow::Result<()> {
    let stamp = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0);
    experiments::write_json(
        &out_dir.join("meta.json"),
        &serde_json::json!({ "created_unix_ms": stamp }),
    )
}

fn verify_all(seed: u64, out: &Path) -> ExitCode {
    if let Err(e) = fs::create_dir_all(out) {
        return config_error(format!("{}: {e}", out.display()));
    }
    let reports = verify::run_all(seed);
    let mut all_passed = true;
    println!("{:-^78}", " verification suite ");
    for report in &reports {
        all_passed &= report.passed;
        println!(
            "criterion {:2}  {:<38} {}  [{:.2}s]",
            report.id,
            report.name,
            if report.passed { "PASS" } else { "FAIL" },
            report.seconds
        );
        if !report.passed {
            println!("              {}", report.details);
        }
        let name = format!("criterion_{:02}.json", report.id);
        if let Err(e) = experiments::write_json(&out.join(name), report) {
            return config_error(e);
        }
    }
    println!("{:-^78}", "");
    let summary = serde_json::json!({
        "seed": seed,
        "passed": all_passed,
        "criteria": reports,
    });
    if let Err(e) = experiments::write_json(&out.join("summary.json"), &summary) {
        return config_error(e);
    }
    if let Err(e) = write_meta(out) {
        return config_error(e);
    }
    println!(
        "{} of {} criteria passed (seed {seed})",
        reports.iter().filter(|r| r.passed).count(),
        reports.len()
    );
    if all_passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
