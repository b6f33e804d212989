use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use rz_pairing_lab::{exit_code, render, reproduce_reference_table, run, Format, Options, EXIT_INPUT, GOLDEN};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Table,
    Json,
    Csv,
}

#[derive(Parser, Debug)]
#[command(name = "rz-pairing-lab", version, about = "Evaluate R/Z-valued pairings on a catalog of model manifolds")]
struct Cli {
    /// Default comparison tolerance for expectations without their own `tol`.
    #[arg(long, global = true, env = "RZ_PAIRING_TOL", default_value_t = 1e-9)]
    tol: f64,
    /// Default grid size for sampled forms and path families.
    #[arg(long, global = true, default_value_t = 1024)]
    grid: usize,
    /// Default mode cutoff for truncated spectra.
    #[arg(long, global = true, default_value_t = 1000)]
    cutoff: u64,
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Table)]
    format: FormatArg,
    /// Parallel scenario evaluation; output order is unchanged.
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a scenario file (`-` reads stdin).
    Run { file: PathBuf },
    /// Evaluate the bundled golden file.
    Reproduce,
    /// Print the bundled golden file.
    Golden,
}

fn fail(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_INPUT as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if !(cli.tol.is_finite() && cli.tol >= 0.0) {
        return fail(format!("--tol must be a non-negative number, got {}", cli.tol));
    }
    let opts = Options {
        tol: cli.tol,
        grid: cli.grid,
        cutoff: cli.cutoff,
        format: match cli.format {
            FormatArg::Table => Format::Table,
            FormatArg::Json => Format::Json,
            FormatArg::Csv => Format::Csv,
        },
        jobs: cli.jobs,
    };
    let records = match &cli.command {
        Command::Golden => {
            print!("{GOLDEN}");
            return ExitCode::SUCCESS;
        }
        Command::Reproduce => reproduce_reference_table(&opts),
        Command::Run { file } => {
            let src = if file.as_os_str() == "-" {
                let mut s = String::new();
                std::io::stdin().read_to_string(&mut s).map(|_| s)
            } else {
                std::fs::read_to_string(file)
            };
            match src {
                Ok(src) => run(&src, &opts),
                Err(e) => return fail(format!("{}: {e}", file.display())),
            }
        }
    };
    match records {
        Ok(records) => {
            let mut out = std::io::stdout().lock();
            if out.write_all(render(&records, opts.format).as_bytes()).and_then(|_| out.flush()).is_err() {
                return ExitCode::from(EXIT_INPUT as u8);
            }
            ExitCode::from(exit_code(&records) as u8)
        }
        Err(e) => fail(e),
    }
}
