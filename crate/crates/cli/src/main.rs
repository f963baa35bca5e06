use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dfs_cli::output::write_json;
use dfs_cli::runner::{EXIT_OK, EXIT_THRESHOLD_UNMET, EXIT_VALIDATION};
use dfs_cli::{dfs_structure, load_config, run_experiment, run_table, search, CliError, SummaryRow, WORKERS_ENV};
use serde::Serialize;

/// Decoherence-free subspace preparation runs.
///
/// Times are in units of 1/Γ_c. Exit status: 0 success, 1 threshold not
/// met, 2 invalid input, 3 numerical failure.
#[derive(Parser)]
#[command(name = "dfs", version)]
struct Cli {
    /// Worker threads for table runs and searches.
    #[arg(long, global = true, env = WORKERS_ENV)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment from a TOML config.
    Run {
        config: PathBuf,
        /// Directory for outputs when the config has no [output] table.
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Reproduce the N = 5, C = -5 table (quench, ramp, edge shortcut).
    Table1 {
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Reproduce the N = 5, C = 0 table (quench, ramp, central shortcut).
    Table2 {
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Find the shortest duration that meets the success threshold.
    Search {
        config: PathBuf,
        /// Write the JSON result here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List every symmetric occupation with its DFS index and the DFS
    /// dimension for each index.
    DfsStructure {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn emit<T: Serialize>(value: &T, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => write_json(value, path).map_err(|source| CliError::Io { path: path.to_owned(), source }),
        None => {
            println!("{}", serde_json::to_string_pretty(value).expect("reports serialise"));
            Ok(())
        }
    }
}

fn status(ok: bool) -> i32 {
    if ok {
        EXIT_OK
    } else {
        EXIT_THRESHOLD_UNMET
    }
}

fn execute(command: Command) -> Result<i32, CliError> {
    match command {
        Command::Run { config, out_dir } => {
            let config = load_config(&config)?;
            let report = run_experiment(&config, &out_dir)?;
            println!("{}", SummaryRow::text_header());
            println!("{}", report.summary.text_line());
            Ok(status(report.summary.meets_threshold))
        }
        Command::Table1 { out_dir } => table(1, &out_dir),
        Command::Table2 { out_dir } => table(2, &out_dir),
        Command::Search { config, out } => {
            let config = load_config(&config)?;
            let report = search(&config)?;
            emit(&report, out.as_deref())?;
            Ok(EXIT_OK)
        }
        Command::DfsStructure { n, out } => {
            emit(&dfs_structure(n)?, out.as_deref())?;
            Ok(EXIT_OK)
        }
    }
}

fn table(number: u8, out_dir: &Path) -> Result<i32, CliError> {
    let report = run_table(number, out_dir)?;
    let path = out_dir.join(format!("table{number}.json"));
    emit(&report, Some(&path))?;
    println!("{}", SummaryRow::text_header());
    for row in &report.rows {
        println!("{}", row.text_line());
    }
    println!("wrote {}", path.display());
    Ok(status(report.rows.iter().all(|r| r.meets_threshold)))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            let code = if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
            return ExitCode::from(code as u8);
        }
    };
    if let Some(workers) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(workers.max(1)).build_global() {
            log::warn!("could not size the worker pool: {e}");
        }
    }
    let code = execute(cli.command).unwrap_or_else(|e| {
        eprintln!("error: {e}");
        e.exit_code()
    });
    ExitCode::from(code as u8)
}
