use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use viscofix::commands::{cmd_oracle, cmd_run, cmd_tables, cmd_validate, Which};

#[derive(Parser)]
#[command(name = "viscofix", version, about = "Viscosity iterations for common fixed points")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a configured problem, writing a trace CSV and a summary.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        trace: PathBuf,
        /// Summary file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Rerun the published experiments and compare.
    Tables {
        #[arg(long, value_enum, default_value_t = WhichArg::All)]
        which: WhichArg,
        /// Directory for the report and per-row traces.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a config's schedules against the convergence conditions.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Fixed point of a scalar map by bisection.
    Oracle {
        /// `cos`, `proj:lo:hi`, `w:sin,cos:0.5,0.33` or `k:sin,cos:0.5,0.33`.
        map: String,
        #[arg(allow_hyphen_values = true)]
        lo: f64,
        #[arg(allow_hyphen_values = true)]
        hi: f64,
        tol: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum WhichArg {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
    #[value(name = "3")]
    Three,
    All,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut stdout = io::stdout().lock();
    let status = match cli.command {
        Command::Run { config, trace, out, seed } => cmd_run(&config, &trace, out.as_deref(), seed, &mut stdout),
        Command::Tables { which, out } => {
            let which = match which {
                WhichArg::One => Which::One,
                WhichArg::Two => Which::Two,
                WhichArg::Three => Which::Three,
                WhichArg::All => Which::All,
            };
            cmd_tables(which, out.as_deref(), &mut stdout)
        }
        Command::Validate { config } => cmd_validate(&config, &mut stdout),
        Command::Oracle { map, lo, hi, tol } => cmd_oracle(&map, lo, hi, tol, &mut stdout),
    };
    match status {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
