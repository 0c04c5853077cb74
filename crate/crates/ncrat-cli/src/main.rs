//! `ncrat`: command-line front end for realizations of nc rational
//! expressions. All inputs and outputs are JSON; exact rationals are written
//! as `"p/q"` strings.
//!
//! Exit codes: 0 success, 1 other failure, 2 usage or parse error,
//! 3 centre not in the domain, 4 point not in the domain, 5 inconclusive
//! equivalence search, 6 not hermitian.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use ncrat::algebra::{cohn_check, NamedAlgebra};
use ncrat::functions::{equivalent, mcmillan_degree, SearchOptions, Verdict};
use ncrat::hermitian::{
    descriptor_form, descriptor_to_fm, fm_to_descriptor, invertible_s_forms, kernel_image_check, structure_matrix,
    symmetric_form, DescriptorRealization,
};
use ncrat::io::{read_tuple, FromJson, ToJson};
use ncrat::{kalman_reduce, parse, synthesize, taylor_table, Expr, FmRealization, Matrix, NcError, Q};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "ncrat", version, about = "Realizations of noncommutative rational expressions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize a realization of an expression centred at a matrix point.
    Realize {
        #[arg(long)]
        expr: String,
        /// JSON file with the centre (an array of s×s matrices).
        #[arg(long)]
        centre: PathBuf,
        /// Reduce to a minimal realization and attach the Kalman report.
        #[arg(long)]
        minimize: bool,
    },
    /// Evaluate an expression or a realization at a matrix tuple.
    Eval {
        #[arg(long, conflicts_with = "realization", required_unless_present = "realization")]
        expr: Option<String>,
        #[arg(long)]
        realization: Option<PathBuf>,
        #[arg(long)]
        point: PathBuf,
    },
    /// Decide whether two expressions define the same nc rational function.
    Equiv {
        expr1: String,
        expr2: String,
        #[arg(long)]
        seed: u64,
        /// Sampling attempts per size.
        #[arg(long, default_value_t = 200)]
        budget: usize,
        /// Comma separated sizes to search for a common centre.
        #[arg(long, value_delimiter = ',', default_value = "1,2,3,4")]
        sizes: Vec<usize>,
        /// Number of variables (defaults to the largest index used).
        #[arg(long)]
        vars: Option<usize>,
    },
    /// McMillan degree of an expression, computed at the given centre.
    Mcmillan {
        #[arg(long)]
        expr: String,
        #[arg(long)]
        centre: PathBuf,
    },
    /// Taylor–Taylor coefficients of an expression around a centre.
    Taylor {
        #[arg(long)]
        expr: String,
        #[arg(long)]
        centre: PathBuf,
        #[arg(long)]
        order: usize,
    },
    /// Hermitian structure, symmetric form and (with --F) a descriptor form.
    Hermitian {
        /// A minimal realization in JSON.
        #[arg(long)]
        realization: PathBuf,
        /// JSON file with a definite hermitian s×s matrix.
        #[arg(long = "F")]
        f: Option<PathBuf>,
        /// Also emit the floating point signature form.
        #[arg(long)]
        float: bool,
    },
    /// Convert between FM and descriptor realizations.
    Descriptor {
        #[arg(long)]
        realization: PathBuf,
        #[arg(long, value_enum)]
        direction: Direction,
    },
    /// Compare two equivalent expressions over a matrix-based algebra.
    Cohn {
        expr1: String,
        expr2: String,
        /// `matn:<n>` or `ut:<n>`.
        #[arg(long)]
        algebra: String,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[arg(long)]
        vars: Option<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Direction {
    Fm2d,
    D2fm,
}

struct Failure {
    code: u8,
    message: String,
    /// Output still worth printing, such as an inconclusive verdict.
    stdout: Option<String>,
}

impl From<NcError> for Failure {
    fn from(e: NcError) -> Self {
        let code = match e {
            NcError::Parse { .. } | NcError::VariableIndex { .. } | NcError::Serde(_) => 2,
            NcError::CentreNotInDomain => 3,
            NcError::NotInDomain => 4,
            NcError::Inconclusive => 5,
            NcError::NotHermitian(_) => 6,
            _ => 1,
        };
        Failure { code, message: e.to_string(), stdout: None }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| Failure { code: 2, message: format!("cannot read {}: {e}", path.display()), stdout: None })
}

fn read_matrices(path: &Path) -> CliResult<Vec<Matrix<Q>>> {
    let xs = read_tuple(&read(path)?)?;
    if xs.is_empty() {
        return Err(NcError::Serde(format!("{} holds no matrices", path.display())).into());
    }
    Ok(xs)
}

/// Parses an expression; the variable count defaults to the largest index.
fn parse_expr(text: &str, vars: Option<usize>) -> CliResult<Expr> {
    let e = parse(text, vars.unwrap_or(usize::MAX))?;
    Ok(e)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    // a closed stdout (for example a pipe into `head`) is not an error
    let emit = |text: &str| {
        let _ = writeln!(io::stdout(), "{text}");
    };
    match run(cli.command) {
        Ok(out) => {
            emit(&out);
            ExitCode::SUCCESS
        }
        Err(f) => {
            if let Some(out) = &f.stdout {
                emit(out);
            }
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON values always serialize")
}

fn run(command: Command) -> CliResult<String> {
    match command {
        Command::Realize { expr, centre, minimize } => {
            let centre = read_matrices(&centre)?;
            let e = parse_expr(&expr, Some(centre.len()))?;
            let r = synthesize(&e, &centre)?;
            if !minimize {
                return Ok(r.to_json_string());
            }
            let (reduced, report) = kalman_reduce(&r)?;
            let mut v = reduced.to_json();
            v["kalman_report"] = report.to_json();
            Ok(pretty(&v))
        }
        Command::Eval { expr, realization, point } => {
            let point = read_matrices(&point)?;
            let value = match (expr, realization) {
                (Some(text), _) => parse_expr(&text, Some(point.len()))?.eval(&point),
                (None, Some(path)) => FmRealization::<Q>::from_json_str(&read(&path)?)?.evaluate(&point),
                (None, None) => unreachable!("clap requires one of --expr and --realization"),
            };
            match value {
                Ok(m) => Ok(m.to_json_string()),
                Err(NcError::NotInDomain) => Err(Failure { code: 4, message: "not-in-domain".into(), stdout: None }),
                Err(e) => Err(e.into()),
            }
        }
        Command::Equiv { expr1, expr2, seed, budget, sizes, vars } => {
            let e1 = parse_expr(&expr1, vars)?;
            let e2 = parse_expr(&expr2, vars)?;
            let d = vars.unwrap_or(e1.num_vars().max(e2.num_vars()).max(1));
            let opts = SearchOptions { budget, sizes, ..SearchOptions::with_seed(seed) };
            let verdict = equivalent::<Q>(&e1, &e2, d, &opts)?;
            let out = verdict.to_json_string();
            if verdict.verdict == Verdict::Inconclusive {
                return Err(Failure { stdout: Some(out), ..NcError::Inconclusive.into() });
            }
            Ok(out)
        }
        Command::Mcmillan { expr, centre } => {
            let centre = read_matrices(&centre)?;
            let e = parse_expr(&expr, Some(centre.len()))?;
            Ok(mcmillan_degree(&e, &centre)?.to_string())
        }
        Command::Taylor { expr, centre, order } => {
            let centre = read_matrices(&centre)?;
            let e = parse_expr(&expr, Some(centre.len()))?;
            Ok(taylor_table(&e, &centre, order)?.to_json_string())
        }
        Command::Hermitian { realization, f, float } => {
            let r = FmRealization::<Q>::from_json_str(&read(&realization)?)?;
            let s = structure_matrix(&r)?;
            let h = symmetric_form(&r, &s)?;
            let mut out = json!({
                "structure_matrix": s.to_json(),
                "kernel_image": kernel_image_check(&s, &r).to_json(),
                "symmetric_form": h.to_json(),
                "invertible_S": invertible_s_forms(&h, &r)?.is_some(),
            });
            if float {
                let hf = symmetric_form(&r.to_f64(), &s.to_f64())?.to_signature();
                out["signature_form"] = hf.to_json();
            }
            if let Some(path) = f {
                let f: Matrix<Q> = Matrix::from_json_str(&read(&path)?)?;
                out["descriptor"] = descriptor_form(&h, &f)?.to_json();
            }
            Ok(pretty(&out))
        }
        Command::Descriptor { realization, direction } => {
            let text = read(&realization)?;
            match direction {
                Direction::Fm2d => Ok(fm_to_descriptor(&FmRealization::<Q>::from_json_str(&text)?)?.to_json_string()),
                Direction::D2fm => Ok(descriptor_to_fm(&DescriptorRealization::<Q>::from_json_str(&text)?)?.to_json_string()),
            }
        }
        Command::Cohn { expr1, expr2, algebra, seed, samples, vars } => {
            let e1 = parse_expr(&expr1, vars)?;
            let e2 = parse_expr(&expr2, vars)?;
            let opts = SearchOptions::with_seed(seed);
            let report = match NamedAlgebra::parse(&algebra).map_err(|e| Failure { code: 2, message: e.to_string(), stdout: None })? {
                NamedAlgebra::Matrix(a) => cohn_check::<Q, _>(&e1, &e2, &a, samples, &opts)?,
                NamedAlgebra::UpperTriangular(a) => cohn_check::<Q, _>(&e1, &e2, &a, samples, &opts)?,
            };
            let out = report.to_json_string();
            if !report.passed() {
                return Err(Failure { code: 1, message: "discrepancy found".into(), stdout: Some(out) });
            }
            Ok(out)
        }
    }
}
