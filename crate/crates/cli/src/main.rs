use std::process::ExitCode;

use ambient_cli::suites::{parse_f, parse_i, parse_point, parse_rationals};
use ambient_cli::{run_suite, with_pool, Options, SuiteError};
use ambient_core::g2alg::Octonions;
use ambient_core::planefield::root_type;
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "ambient", version, about = "Exact verification of ambient metrics and holonomy for (2,3,5) plane fields")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a named suite: g2, i-family, fq-family, structure-equations, holonomy, quartics, all
    Verify {
        suite: String,
        /// I(x) in the expression grammar
        #[arg(long = "I")]
        i: Option<String>,
        /// F(q) in the expression grammar
        #[arg(long = "F")]
        f: Option<String>,
        /// evaluation point, e.g. x=1,t=2 (repeatable)
        #[arg(long)]
        point: Vec<String>,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        /// write the JSON report here
        #[arg(long)]
        json: Option<String>,
        /// report 0 ms for every check, so reports are byte-stable
        #[arg(long)]
        no_timing: bool,
    },
    /// Classify a pair of null vectors by their common stabilizer in g2
    ClassifyPair {
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, allow_hyphen_values = true)]
        y: String,
    },
    /// Root type of the binary quartic a0 v^4 + a1 u v^3 + ... + a4 u^4
    RootType {
        #[arg(long, allow_hyphen_values = true)]
        coeffs: String,
    },
}

fn usage(e: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(2)
}

fn verify(
    suite: &str,
    i: Option<String>,
    f: Option<String>,
    point: Vec<String>,
    depth: usize,
    json: Option<String>,
    no_timing: bool,
) -> Result<ExitCode, SuiteError> {
    let mut opts = Options { depth, ..Options::default() };
    opts.i = i.as_deref().map(parse_i).transpose()?;
    opts.f = f.as_deref().map(parse_f).transpose()?;
    if !point.is_empty() {
        opts.points = point.iter().map(|p| parse_point(p)).collect::<Result<_, _>>()?;
    }
    let mut report = with_pool(|| run_suite(suite, &opts))?;
    if no_timing {
        report.checks.iter_mut().for_each(|c| c.ms = 0);
    }
    print!("{}", report.to_text(!no_timing));
    if let Some(path) = json {
        if let Err(e) = std::fs::write(&path, report.to_json() + "\n") {
            eprintln!("error: cannot write {path}: {e}");
            return Ok(ExitCode::from(2));
        }
    }
    Ok(if report.passed() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match cli.cmd {
        Cmd::Verify { suite, i, f, point, depth, json, no_timing } => {
            verify(&suite, i, f, point, depth, json, no_timing).unwrap_or_else(usage)
        }
        Cmd::ClassifyPair { x, y } => {
            let (x, y) = match (parse_rationals(&x, 7), parse_rationals(&y, 7)) {
                (Ok(x), Ok(y)) => (x, y),
                (Err(e), _) | (_, Err(e)) => return usage(e),
            };
            match Octonions::new().classify_pair(&x, &y) {
                Ok(c) => {
                    println!("case {}", c.case);
                    println!("stabilizer dim {}", c.stabilizer_dim);
                    println!("fingerprint {}", c.fingerprint);
                    if c.consistent() {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(1)
                    }
                }
                Err(e) => usage(e),
            }
        }
        Cmd::RootType { coeffs } => match parse_rationals(&coeffs, 5) {
            Ok(a) => {
                let a: [_; 5] = a.try_into().expect("five coefficients");
                println!("{}", root_type(&a));
                ExitCode::SUCCESS
            }
            Err(e) => usage(e),
        },
    }
}
