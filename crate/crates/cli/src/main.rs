use clap::{Parser, Subcommand};
use std::path::PathBuf;

use mcell_cli::commands;

/// Simulator for vehicle-mounted 5G cells: drive scenarios, deployment
/// comparisons and parameter sweeps.
#[derive(Parser)]
#[command(name = "mcell", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the drive scenario and write results.csv.
    Run {
        /// Config file with `key = value` lines.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output directory.
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Override one config key, e.g. --set seed=7. Repeatable.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        /// Also write the per-TTI trace.csv.
        #[arg(long)]
        trace: bool,
    },
    /// Compare the three deployment options and write comparison.csv.
    Compare {
        /// Output directory.
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Header-size overrides, one `LAYER<TAB>bytes` per line.
        #[arg(long)]
        headers: Option<PathBuf>,
        /// Latency overrides, one `key<TAB>milliseconds` per line.
        #[arg(long)]
        latencies: Option<PathBuf>,
        /// Config file (used for the attachment window).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Override one config key. Repeatable.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
    /// Rerun the scenario for each value of one config key.
    Sweep {
        /// Config key to sweep.
        key: String,
        /// Values to run, one scenario each.
        values: Vec<String>,
        /// Config file with `key = value` lines.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output directory.
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Override one config key. Repeatable.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
}

/// Rust ignores SIGPIPE by default, turning `mcell ... | head` into a
/// broken-pipe panic. Restore the default so a closed pipe ends the
/// process quietly, as readers of CLI output expect.
#[cfg(unix)]
fn restore_sigpipe_default() {
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
}

#[cfg(not(unix))]
fn restore_sigpipe_default() {}

fn main() -> anyhow::Result<()> {
    restore_sigpipe_default();
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config, out, set, trace } => {
            commands::cmd_run(config.as_deref(), &out, &set, trace)
        }
        Command::Compare { out, headers, latencies, config, set } => commands::cmd_compare(
            config.as_deref(),
            &out,
            &set,
            headers.as_deref(),
            latencies.as_deref(),
        ),
        Command::Sweep { key, values, config, out, set } => {
            commands::cmd_sweep(config.as_deref(), &out, &set, &key, &values)
        }
    }
}
