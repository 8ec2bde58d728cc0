use agcal::report::Format;
use agcal::scenario::{parse_grid, parse_scenario};
use agcal::{run_scenario, RunOptions};
use agcal_core::rate_dsl::{compare_o, normalize, parse, RateError};
use clap::{Parser, Subcommand};
use std::io::Write;
use std::process::ExitCode;

const EXIT_MISMATCH: u8 = 1;
const EXIT_SCHEMA: u8 = 2;
const EXIT_IO: u8 = 3;

#[derive(Parser)]
#[command(name = "agcal", version = agcal_core::ENGINE_VERSION, about = "Asymptotic gauge calculus engine")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a scenario file and print its report
    Run {
        scenario: std::path::PathBuf,
        #[arg(long, default_value = "json-lines", value_parser = ["json-lines", "table"])]
        format: String,
        /// Grid override as eps0,r,n
        #[arg(long)]
        grid: Option<String>,
        /// Run independent commands concurrently
        #[arg(long)]
        parallel: bool,
    },
    /// Parse an expression and print its canonical and normal forms
    Parse { expr: String },
    /// Decide the big-O relation between two expressions
    Compare { x: String, y: String },
    /// Print the engine version
    Version,
}

fn expr_error(which: &str, text: &str, e: RateError) -> ExitCode {
    eprintln!("{which}: {e}");
    if let RateError::Syntax { pos, .. } = e {
        eprintln!("  {text}");
        eprintln!("  {}^", " ".repeat(text[..pos.min(text.len())].chars().count()));
    }
    ExitCode::from(EXIT_SCHEMA)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::Version => {
            println!("agcal {}", agcal_core::ENGINE_VERSION);
            ExitCode::SUCCESS
        }
        Cmd::Parse { expr } => match parse(&expr) {
            Ok(e) => {
                println!("canonical: {}", e.to_canonical());
                match normalize(&e) {
                    Ok(nf) => println!("normal form: {nf}"),
                    Err(err) => println!("normal form: unavailable ({err})"),
                }
                ExitCode::SUCCESS
            }
            Err(err) => expr_error("parse error", &expr, err),
        },
        Cmd::Compare { x, y } => {
            let ex = match parse(&x) {
                Ok(e) => e,
                Err(err) => return expr_error("x", &x, err),
            };
            let ey = match parse(&y) {
                Ok(e) => e,
                Err(err) => return expr_error("y", &y, err),
            };
            match (normalize(&ex), normalize(&ey)) {
                (Ok(a), Ok(b)) => {
                    println!("{}", compare_o(&a, &b).name());
                    ExitCode::SUCCESS
                }
                (Err(err), _) | (_, Err(err)) => {
                    eprintln!("outside the decidable fragment: {err}");
                    eprintln!("use a compare command in a scenario for the numeric fallback");
                    ExitCode::from(EXIT_SCHEMA)
                }
            }
        }
        Cmd::Run {
            scenario,
            format,
            grid,
            parallel,
        } => {
            let text = match std::fs::read_to_string(&scenario) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("{}: {e}", scenario.display());
                    return ExitCode::from(EXIT_IO);
                }
            };
            let grid = match grid.as_deref().map(parse_grid).transpose() {
                Ok(g) => g,
                Err((_, msg)) => {
                    eprintln!("--grid: {msg}");
                    return ExitCode::from(EXIT_SCHEMA);
                }
            };
            let s = match parse_scenario(&text) {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("{}:{}:{}: {}", scenario.display(), e.line, e.column, e.message);
                    return ExitCode::from(EXIT_SCHEMA);
                }
            };
            let report = run_scenario(&s, &RunOptions { grid, parallel });
            let fmt = Format::from_name(&format).expect("validated by clap");
            let mut out = std::io::stdout().lock();
            if out.write_all(report.emit(fmt).as_bytes()).and_then(|_| out.flush()).is_err() {
                return ExitCode::from(EXIT_IO);
            }
            if report.all_matched() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_MISMATCH)
            }
        }
    }
}
