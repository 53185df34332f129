//! `be-lab`: compute and verify Berry–Esseen bounds from a JSON experiment file.

use berry_esseen::lab::{
    execute, output_path, parse_config_with, Command, Format, Overrides, EXIT_CONFIG, EXIT_RUNTIME, OUTPUT_DIR_ENV,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "be-lab", version, about = "Explicit Berry–Esseen bounds with Monte Carlo verification")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate the selected bounds.
    Bound(Common),
    /// Evaluate the selected bounds and check them against simulated distances.
    Verify(Common),
    /// Tabulate the counterexample over an ε grid.
    Example41(Common),
    /// Repeat `bound` or `verify` over one parameter axis.
    Sweep(Common),
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Args)]
struct Common {
    /// Experiment configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Master seed; overrides `mc.seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Replicate count; overrides `mc.replicates`.
    #[arg(long)]
    replicates: Option<usize>,
    /// Worker threads; overrides `mc.threads` (0 = all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Output file; overrides `output.path`. Standard output if unset.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Output format; overrides `output.format`.
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, args) = match cli.command {
        Cmd::Bound(a) => (Command::Bound, a),
        Cmd::Verify(a) => (Command::Verify, a),
        Cmd::Example41(a) => (Command::Example41, a),
        Cmd::Sweep(a) => (Command::Sweep, a),
    };
    ExitCode::from(run(command, args) as u8)
}

fn run(command: Command, args: Common) -> i32 {
    let text = match std::fs::read_to_string(&args.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", args.config.display());
            return EXIT_CONFIG;
        }
    };
    let ov = Overrides {
        seed: args.seed,
        replicates: args.replicates,
        threads: args.threads,
        output: args.output,
        format: args.format.map(|f| match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }),
    };
    let cfg = match parse_config_with(&text, command, &ov) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: invalid configuration {}:\n{e}", args.config.display());
            return EXIT_CONFIG;
        }
    };
    let outcome = match execute(command, &cfg) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_RUNTIME;
        }
    };
    for e in &outcome.errors {
        eprintln!("error: {e}");
    }
    let dir = std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from);
    let written = match output_path(&cfg.output, dir.as_deref()) {
        Some(path) => std::fs::write(&path, &outcome.bytes).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => std::io::stdout().write_all(&outcome.bytes).map_err(|e| format!("cannot write output: {e}")),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return EXIT_RUNTIME;
    }
    outcome.exit_code()
}
