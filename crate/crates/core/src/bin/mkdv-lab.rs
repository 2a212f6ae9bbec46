use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use mkdv_lab::runner::{run_file, Mode, Overrides};

/// Run one mKdV lab experiment described by a JSON config.
#[derive(Parser, Debug)]
#[command(name = "mkdv-lab", version)]
struct Cli {
    /// JSON run config; omitted means an empty config.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Where artifacts go (beats OUTPUT_DIR and the file).
    #[arg(long)]
    output_dir: Option<PathBuf>,
    /// Overrides the config's mode.
    #[arg(long, value_parser = |s: &str| s.parse::<Mode>())]
    mode: Option<Mode>,
    /// Overrides the initial-data and ensemble seeds.
    #[arg(long)]
    seed: Option<u64>,
    /// Only log errors.
    #[arg(long)]
    quiet: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.quiet { "error" } else { "info" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    let overrides = Overrides { mode: cli.mode, seed: cli.seed, output_dir: cli.output_dir };
    let code = run_file(cli.config.as_deref(), &overrides);
    ExitCode::from(code as u8)
}
