use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use thermoforms::config::{catalog, RunConfig};
use thermoforms::report::sha256_hex;
use thermoforms::runner;

/// Checks exact-differential and loop identities of equation-of-state
/// models and writes machine-readable verification reports.
#[derive(Parser)]
#[command(name = "thermoforms", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every task in a JSON config and write reports plus CSV tables.
    ///
    /// Exit status: 0 when every task passes, 1 when a task fails or
    /// errors, 2 when the config cannot be read or does not validate.
    Run {
        /// Path to the JSON run configuration.
        config: PathBuf,
    },
    /// List the available task kinds and their parameters.
    ListTasks,
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run { config } => run(&config),
        Command::ListTasks => {
            list_tasks();
            ExitCode::SUCCESS
        }
    }
}

fn run(path: &PathBuf) -> ExitCode {
    // Everything up to here is config handling: any failure means no
    // report files get written and the status is 2.
    let bytes = match std::fs::read(path) {
        Ok(b) => b,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", path.display());
            return ExitCode::from(2);
        }
    };
    let text = match std::str::from_utf8(&bytes) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {} is not UTF-8: {e}", path.display());
            return ExitCode::from(2);
        }
    };
    let config = match RunConfig::from_json(text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };

    let sha = sha256_hex(&bytes);
    let outcomes = match runner::run_config(&config, &sha) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    };
    let dir = runner::resolve_output_dir(&config);
    if let Err(e) = runner::write_outcomes(&dir, &outcomes) {
        eprintln!("error: cannot write reports to {}: {e}", dir.display());
        return ExitCode::FAILURE;
    }

    let mut passed = 0usize;
    for outcome in &outcomes {
        let r = &outcome.report;
        let verdict = if r.pass { "PASS" } else { "FAIL" };
        passed += r.pass as usize;
        println!(
            "{verdict} {} [{}]: max |residual| = {:.3e} (tolerance {:.1e}); {}",
            r.task_id, r.task, r.max_abs_residual, r.tolerance, r.summary
        );
    }
    println!(
        "{passed}/{} task(s) passed; reports in {}",
        outcomes.len(),
        dir.display()
    );
    if passed == outcomes.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn list_tasks() {
    for info in catalog() {
        println!("{}  [module: {}]", info.name, info.origin_module);
        println!("  required: {}", info.required.join(", "));
        println!("  optional: {}", info.optional.join(", "));
        let example: Vec<&str> = info.example.split_whitespace().collect();
        println!("  example:  {}", example.join(" "));
        println!();
    }
}
