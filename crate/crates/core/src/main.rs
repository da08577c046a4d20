use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use barvinok::canonical::{canonicalize, CanonicalMatrix};
use barvinok::formulas::Coefficients;
use barvinok::report::{run_homology, Method};
use barvinok::tree::{build_complex_with_cap, tree_from_matrix, DEFAULT_SIMPLEX_CAP};
use barvinok::trop::{barvinok_rank_le2, RationalMatrix};
use barvinok::Error;

#[derive(Parser)]
#[command(name = "barvinok", version, about = "Matrices of Barvinok rank two and the homology of the space they form")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Canonical form, rank-two test and tree of a matrix given as CSV.
    Rank {
        file: PathBuf,
    },
    /// Homology of B(d,n) by one or more methods.
    Homology {
        #[arg(short)]
        d: usize,
        #[arg(short)]
        n: usize,
        /// Comma-separated subset of simplicial,cellular,morse,formula, or `all`.
        #[arg(long, default_value = "all")]
        methods: String,
        /// z, q, z2 or z3 (any prime p as zp).
        #[arg(long, default_value = "z")]
        coeff: String,
        #[arg(long)]
        reduced: bool,
        /// Maximal number of simplices the simplicial method may build.
        #[arg(long, default_value_t = DEFAULT_SIMPLEX_CAP)]
        cap: u128,
        /// Add wall-clock times per method to the report.
        #[arg(long)]
        timings: bool,
    },
    /// Writes the simplicial complex or its boundary matrices.
    Export {
        #[arg(short)]
        d: usize,
        #[arg(short)]
        n: usize,
        #[arg(long, value_enum)]
        what: What,
        #[arg(short, long)]
        out: PathBuf,
        #[arg(long, default_value_t = DEFAULT_SIMPLEX_CAP)]
        cap: u128,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum What {
    Complex,
    Boundaries,
}

#[derive(Serialize)]
struct RankReport<'a> {
    command: &'static str,
    canonical: &'a CanonicalMatrix,
    verdict: &'static str,
    rank_le_2: bool,
    generators: Option<(usize, usize)>,
    tree: Option<String>,
}

#[derive(Serialize)]
struct BoundaryManifest {
    d: usize,
    n: usize,
    ranks: Vec<usize>,
    files: Vec<BoundaryFile>,
}

#[derive(Serialize)]
struct BoundaryFile {
    degree: usize,
    rows: usize,
    cols: usize,
    path: String,
}

enum Failure {
    Lib(Error),
    Io(String),
    Disagreement(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn io_err(path: &Path, e: std::io::Error) -> Failure {
    Failure::Io(format!("{}: {e}", path.display()))
}

fn cmd_rank(file: &Path) -> Result<String, Failure> {
    let text = std::fs::read_to_string(file).map_err(|e| Failure::Lib(Error::Parse(format!("{}: {e}", file.display()))))?;
    let m = RationalMatrix::parse_csv(&text)?;
    let cm = canonicalize(&m)?;
    let pair = barvinok_rank_le2(&m);
    let tree = match pair {
        Some(_) => Some(tree_from_matrix(&cm)?.to_string()),
        None => None,
    };
    let report = RankReport {
        command: "rank",
        canonical: &cm,
        verdict: if pair.is_some() { "rank <= 2" } else { "rank > 2" },
        rank_le_2: pair.is_some(),
        generators: pair.map(|p| p.one_based()),
        tree,
    };
    Ok(serde_json::to_string_pretty(&report).expect("serializable"))
}

fn cmd_export(d: usize, n: usize, what: What, out: &Path, cap: u128) -> Result<String, Failure> {
    let q = build_complex_with_cap(d, n, cap)?;
    std::fs::create_dir_all(out).map_err(|e| io_err(out, e))?;
    match what {
        What::Complex => {
            let path = out.join("complex.json");
            std::fs::write(&path, q.to_json()).map_err(|e| io_err(&path, e))?;
            Ok(path.display().to_string())
        }
        What::Boundaries => {
            let c = q.chain_complex()?;
            let mut files = Vec::new();
            for k in 1..=c.top() {
                let name = format!("boundary_{k}.csv");
                let path = out.join(&name);
                let b = c.boundary(k);
                std::fs::write(&path, b.to_triplet_csv()).map_err(|e| io_err(&path, e))?;
                files.push(BoundaryFile { degree: k, rows: b.rows(), cols: b.cols(), path: name });
            }
            let manifest = BoundaryManifest { d, n, ranks: c.ranks().to_vec(), files };
            let path = out.join("boundaries.json");
            let json = serde_json::to_string_pretty(&manifest).expect("serializable");
            std::fs::write(&path, json).map_err(|e| io_err(&path, e))?;
            Ok(path.display().to_string())
        }
    }
}

fn run(cli: Cli) -> Result<String, Failure> {
    match cli.command {
        Command::Rank { file } => cmd_rank(&file),
        Command::Homology { d, n, methods, coeff, reduced, cap, timings } => {
            let methods = Method::parse_list(&methods)?;
            let coeff = Coefficients::parse(&coeff)?;
            let report = run_homology(d, n, &methods, coeff, reduced, cap, timings)?;
            let json = report.to_json();
            if report.agree {
                Ok(json)
            } else {
                Err(Failure::Disagreement(json))
            }
        }
        Command::Export { d, n, what, out, cap } => cmd_export(d, n, what, &out, cap),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            println!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Disagreement(json)) => {
            println!("{json}");
            eprintln!("error: methods disagree");
            ExitCode::from(4)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::Parse(_) | Error::Domain(_) | Error::InvalidCharacteristic(_) => 2,
                Error::ZeroClass => 3,
                Error::Resource { .. } => 5,
                _ => 1,
            };
            ExitCode::from(code)
        }
    }
}
