use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use nystrom_bench::registry::registry;
use nystrom_bench::report::{describe_metadata, format_sci};
use nystrom_bench::{emit_table, run_example, BenchError, ExampleId, RunOptions, TableFormat};

const EXIT_USAGE: u8 = 1;
const EXIT_NON_CONVERGENCE: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "nystrom-bench", about = "Convergence tables for the Nyström solvers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve one example for a list of orders and print the error table.
    Run(RunArgs),
    /// Print the example registry with the published targets.
    List,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Md,
}

#[derive(Debug, clap::Args)]
struct RunArgs {
    #[arg(long)]
    example: String,
    /// Comma-separated orders, e.g. 8,16,32 (defaults to the example's list).
    #[arg(long, value_delimiter = ',')]
    m: Option<Vec<usize>>,
    #[arg(long, value_enum, default_value = "md")]
    format: Format,
    /// Smoothing exponent for the boundary examples.
    #[arg(long)]
    q: Option<u32>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Order of the reference solve for examples without a closed form.
    #[arg(long, default_value_t = 512)]
    ref_m: usize,
    /// Write the table here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn list(out: &mut impl Write) -> io::Result<()> {
    for spec in registry() {
        writeln!(out, "{:<5} {} [{}]", spec.id, spec.description, spec.table)?;
        let default_m: Vec<String> = spec.default_m.iter().map(|m| m.to_string()).collect();
        writeln!(out, "      default m: {}", default_m.join(","))?;
        for table in spec.targets {
            let targets: Vec<String> = table
                .rows
                .iter()
                .map(|r| match r.interior {
                    Some(d) => format!("{}: {} / {}", r.m, format_sci(r.error), format_sci(d)),
                    None => format!("{}: {}", r.m, format_sci(r.error)),
                })
                .collect();
            let label = if spec.is_boundary() { format!("q={} ", table.q) } else { String::new() };
            writeln!(out, "      {label}targets: {}", targets.join(", "))?;
        }
    }
    Ok(())
}

fn run(args: RunArgs) -> Result<bool, BenchError> {
    let id: ExampleId = args.example.parse()?;
    let spec = id.spec();
    let m_list = args.m.unwrap_or_else(|| spec.default_m.to_vec());
    let opts = RunOptions { seed: args.seed, q: args.q.map(f64::from), ref_m: args.ref_m, ..RunOptions::default() };
    let report = run_example(id, &m_list, &opts)?;
    let format = match args.format {
        Format::Csv => TableFormat::Csv,
        Format::Md => TableFormat::Markdown,
    };
    let table = emit_table(&report, format);
    eprintln!("{}", describe_metadata(&report.metadata));
    match args.out {
        Some(path) => fs::write(&path, table).map_err(|e| BenchError::Table(format!("{}: {e}", path.display())))?,
        None => {
            let _ = io::stdout().lock().write_all(table.as_bytes());
        }
    }
    Ok(report.all_converged())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    match cli.command {
        Command::List => {
            // a closed pipe (e.g. `| head`) is not an error
            let _ = list(&mut io::stdout().lock());
            ExitCode::SUCCESS
        }
        Command::Run(args) => match run(args) {
            Ok(true) => ExitCode::SUCCESS,
            Ok(false) => {
                eprintln!("error: at least one order did not converge");
                ExitCode::from(EXIT_NON_CONVERGENCE)
            }
            Err(err @ BenchError::Reference { .. }) => {
                eprintln!("error: {err}");
                ExitCode::from(EXIT_NON_CONVERGENCE)
            }
            Err(err) => {
                eprintln!("error: {err}");
                ExitCode::from(EXIT_USAGE)
            }
        },
    }
}
