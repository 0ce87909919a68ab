//! Batch front-end for exact L∞ computations on JSON documents.
//!
//! Exit codes: 0 when every check passes, 1 for usage and parse errors,
//! 2 for mathematical failures.

mod commands;
mod doc;
mod error;
mod report;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::doc::Loader;
use crate::error::CliError;
use crate::report::{envelope, header, render, Format, Outcome};

#[derive(Parser)]
#[command(name = "linfty", version, about = "Exact L-infinity computations on JSON documents")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
    /// Seed for subcommands that sample.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum CheckTarget {
    /// The L-infinity relations of an algebra document.
    Structure {
        #[arg(long)]
        algebra: PathBuf,
    },
    /// The morphism relations of a morphism document.
    Morphism {
        #[arg(long)]
        morphism: PathBuf,
    },
    /// The identities and side conditions of a contraction document.
    Contraction {
        #[arg(long)]
        contraction: PathBuf,
    },
    /// The (co)simplicial identities or functoriality of a diagram document.
    Diagram {
        #[arg(long)]
        diagram: PathBuf,
    },
}

#[derive(Subcommand)]
enum Command {
    #[command(subcommand)]
    Check(CheckTarget),
    /// Print the canonical form of an algebra document.
    Normalize {
        #[arg(long)]
        algebra: PathBuf,
    },
    /// log(exp a exp b), read off a filled 2-simplex.
    Bch {
        #[arg(long)]
        algebra: PathBuf,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
    },
    /// Gauge action of a on the Maurer-Cartan element x.
    Gauge {
        #[arg(long)]
        algebra: PathBuf,
        #[arg(long)]
        x: String,
        #[arg(long)]
        a: String,
    },
    /// Fill the horn Λ^n_k.
    FillHorn {
        #[arg(long)]
        algebra: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        /// Cochain on the horn, keyed by simplex labels such as "0,1".
        #[arg(long)]
        horn: String,
    },
    /// The simplex determined by its star at a vertex.
    SimplexFromStar {
        #[arg(long)]
        algebra: PathBuf,
        #[arg(long)]
        n: usize,
        /// {"vertex": i, "x": element, "values": {"0,1": element, ...}}
        #[arg(long)]
        star: String,
    },
    /// Maurer-Cartan element of C*(Δ_n; L) from (y, K v) through the vertex contraction.
    McSolve {
        #[arg(long)]
        algebra: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        vertex: usize,
        #[arg(long)]
        y: String,
        /// Degree-0 cochain v; sampled from the seed when absent.
        #[arg(long)]
        v: Option<String>,
    },
    /// Transferred structure on C*(Δ_n; L).
    Transfer {
        #[arg(long)]
        algebra: PathBuf,
        #[arg(long)]
        n: usize,
    },
    /// Dimensions of the partial totalizations.
    Tot {
        #[arg(long)]
        diagram: PathBuf,
        #[arg(long)]
        k: Option<usize>,
    },
    /// Truncated homotopy limit of a poset diagram.
    HolimK {
        #[arg(long)]
        diagram: PathBuf,
        #[arg(long)]
        k: usize,
    },
    /// Obstruction to lifting a Maurer-Cartan element along a central extension.
    Obstruction {
        #[arg(long)]
        extension: PathBuf,
        #[arg(long)]
        x: String,
    },
    /// π_i of the Deligne-Getzler groupoid of an abelian algebra, two ways.
    AbelianHomotopy {
        #[arg(long)]
        algebra: PathBuf,
        #[arg(long)]
        i: usize,
    },
    /// Verify the Dupont contraction on Δ_n.
    DupontVerify {
        #[arg(long)]
        n: usize,
        /// Coefficients; the one-dimensional abelian algebra when absent.
        #[arg(long)]
        algebra: Option<PathBuf>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Check(CheckTarget::Structure { .. }) => "check structure",
            Command::Check(CheckTarget::Morphism { .. }) => "check morphism",
            Command::Check(CheckTarget::Contraction { .. }) => "check contraction",
            Command::Check(CheckTarget::Diagram { .. }) => "check diagram",
            Command::Normalize { .. } => "normalize",
            Command::Bch { .. } => "bch",
            Command::Gauge { .. } => "gauge",
            Command::FillHorn { .. } => "fill-horn",
            Command::SimplexFromStar { .. } => "simplex-from-star",
            Command::McSolve { .. } => "mc-solve",
            Command::Transfer { .. } => "transfer",
            Command::Tot { .. } => "tot",
            Command::HolimK { .. } => "holim-k",
            Command::Obstruction { .. } => "obstruction",
            Command::AbelianHomotopy { .. } => "abelian-homotopy",
            Command::DupontVerify { .. } => "dupont-verify",
        }
    }
}

fn run(cmd: &Command, ld: &mut Loader, seed: u64) -> Result<Outcome, CliError> {
    use commands as c;
    match cmd {
        Command::Check(CheckTarget::Structure { algebra }) => c::check_structure(ld, algebra),
        Command::Check(CheckTarget::Morphism { morphism }) => c::check_morphism_doc(ld, morphism),
        Command::Check(CheckTarget::Contraction { contraction }) => c::check_contraction_doc(ld, contraction),
        Command::Check(CheckTarget::Diagram { diagram }) => c::check_diagram(ld, diagram),
        Command::Normalize { .. } => unreachable!("handled before the report"),
        Command::Bch { algebra, a, b } => c::bch(ld, algebra, a, b),
        Command::Gauge { algebra, x, a } => c::gauge(ld, algebra, x, a),
        Command::FillHorn { algebra, n, k, horn } => c::fill_horn(ld, algebra, *n, *k, horn),
        Command::SimplexFromStar { algebra, n, star } => c::simplex_from_star(ld, algebra, *n, star),
        Command::McSolve { algebra, n, vertex, y, v } => c::mc_solve(ld, algebra, *n, *vertex, y, v.as_deref(), seed),
        Command::Transfer { algebra, n } => c::transfer(ld, algebra, *n),
        Command::Tot { diagram, k } => c::tot(ld, diagram, *k),
        Command::HolimK { diagram, k } => c::holim(ld, diagram, *k),
        Command::Obstruction { extension, x } => c::obstruction(ld, extension, x),
        Command::AbelianHomotopy { algebra, i } => c::abelian_homotopy(ld, algebra, *i),
        Command::DupontVerify { n, algebra } => c::dupont_verify(ld, algebra.as_deref(), *n, seed),
    }
}

fn normalize(path: &Path) -> Result<String, CliError> {
    let mut ld = Loader::default();
    let doc: doc::AlgebraDoc = ld.file("algebra", path)?;
    doc::build_algebra(&doc)?;
    let mut s = serde_json::to_string_pretty(&doc::canonical(&doc)?).expect("documents serialize");
    s.push('\n');
    Ok(s)
}

fn emit(s: &str) {
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(s.as_bytes());
    let _ = out.flush();
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    if let Command::Normalize { algebra } = &cli.command {
        return match normalize(algebra) {
            Ok(s) => {
                emit(&s);
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("linfty: {e}");
                ExitCode::from(e.exit_code())
            }
        };
    }
    let mut ld = Loader::default();
    let outcome = run(&cli.command, &mut ld, cli.seed);
    if let Err(e) = &outcome {
        if e.exit_code() == 1 {
            eprintln!("linfty: {e}");
            return ExitCode::from(1);
        }
    }
    let report = envelope(header(cli.command.name(), cli.seed, &ld.hashes), &outcome);
    emit(&render(&report, cli.format));
    match outcome {
        Ok(o) if o.passed => ExitCode::SUCCESS,
        Ok(_) => ExitCode::from(2),
        Err(e) => ExitCode::from(e.exit_code()),
    }
}
