use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use gradua::cli::{run, Command, InputError, JobDescription, JobOptions, Report};

/// Exact computations on Z-graded manifold charts.
#[derive(Debug, Parser)]
#[command(name = "gradua", version)]
struct Args {
    /// check-q | ce | derived-bracket | linfinity | algebroid | commutator | apply | eval | taylor | invert
    command: Command,
    /// JSON input document
    #[arg(long)]
    input: PathBuf,
    /// Override the chart truncation (word-length cutoff)
    #[arg(long)]
    truncation: Option<usize>,
    /// Point as comma-separated rationals, e.g. "1,2/3"
    #[arg(long, allow_hyphen_values = true)]
    point: Option<String>,
    /// Taylor order
    #[arg(long)]
    order: Option<usize>,
    /// Largest L∞ arity to extract
    #[arg(long)]
    max_arity: Option<usize>,
    /// Decimal digits for display-only approximations
    #[arg(long)]
    precision: Option<usize>,
    /// Write the report here instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let report = match std::fs::read_to_string(&args.input) {
        Ok(input) => run(&JobDescription {
            command: args.command,
            input,
            options: JobOptions {
                truncation: args.truncation,
                point: args.point,
                order: args.order,
                max_arity: args.max_arity,
                precision: args.precision,
            },
        }),
        Err(e) => Report::input_error(
            args.command.as_str(),
            InputError {
                code: "E_IO",
                path: args.input.display().to_string(),
                message: e.to_string(),
            },
        ),
    };
    let text = report.render();
    match &args.output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                eprintln!("gradua: cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::from(report.exit_code() as u8)
}
