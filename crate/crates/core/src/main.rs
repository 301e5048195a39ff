use clap::{Parser, ValueEnum};
use propcalc::cli::{emit, run, Format, Suite, SuiteConfig};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Text,
    Json,
}

/// Run the verification suites over coproperad fixtures.
#[derive(Parser)]
#[command(name = "propcalc", version)]
struct Args {
    /// suite to run (repeatable); all suites when omitted
    #[arg(long)]
    suite: Vec<String>,
    /// coproperad fixture file (repeatable); the shipped fixtures when omitted
    #[arg(long = "coproperad")]
    coproperads: Vec<PathBuf>,
    #[arg(long = "dimA", default_value_t = 2)]
    dim_a: usize,
    #[arg(long = "dimB", default_value_t = 2)]
    dim_b: usize,
    #[arg(long, default_value_t = 3)]
    max_weight: usize,
    /// output and input arity caps, as `OUT,IN`
    #[arg(long, default_value = "3,4")]
    max_arity: String,
    #[arg(long, default_value_t = 4)]
    bracket_arity: usize,
    #[arg(long, default_value_t = 4)]
    poly_degree: u32,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, value_enum, default_value = "text")]
    format: OutFormat,
    /// corrupt the binary brackets, so the Jacobi suite must fail
    #[arg(long)]
    negative_control: bool,
}

fn config(a: &Args) -> Result<SuiteConfig, String> {
    let (o, i) = a.max_arity.split_once(',').ok_or("--max-arity expects OUT,IN")?;
    let parse = |s: &str| s.trim().parse::<usize>().map_err(|e| format!("--max-arity: {e}"));
    let suites = a.suite.iter().map(|s| s.parse::<Suite>().map_err(|e| e.to_string())).collect::<Result<_, _>>()?;
    Ok(SuiteConfig {
        coproperads: a.coproperads.clone(),
        dim_a: a.dim_a,
        dim_b: a.dim_b,
        max_weight: a.max_weight,
        max_arity: (parse(o)?, parse(i)?),
        bracket_arity: a.bracket_arity,
        poly_degree: a.poly_degree,
        seed: a.seed,
        suites,
        negative_control: a.negative_control,
    })
}

fn main() -> ExitCode {
    let args = Args::parse();
    let cfg = match config(&args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("propcalc: {e}");
            return ExitCode::from(2);
        }
    };
    match run(&cfg) {
        Ok(report) => {
            let f = match args.format {
                OutFormat::Text => Format::Text,
                OutFormat::Json => Format::Json,
            };
            print!("{}", emit(&report, f));
            ExitCode::from(if report.passed() { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("propcalc: {e}");
            ExitCode::from(2)
        }
    }
}
