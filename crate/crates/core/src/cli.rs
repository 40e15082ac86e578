//! Command-line front end.
//!
//! Exit codes: 0 on success, 2 for input errors or failed hypotheses, 3 when
//! a verification check fails.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::decomposer::{general_decompose, DecomposeOptions};
use crate::error::{Error, Result};
use crate::graph::{build_matrix, MatrixKind};
use crate::io;
use crate::matrix::MatrixC;
use crate::permutation::Permutation;
use crate::spectral::{self, MATCH_TOL};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "equidecomp",
    version,
    about = "Equitable decompositions over graph automorphisms"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Decompose a matrix into its divisor matrix and complementary blocks.
    Decompose(CommonArgs),
    /// List the eigenvalues of the input matrix.
    Spectrum(CommonArgs),
    /// Compare the spectral radius of the matrix with that of its divisor.
    Radius(CommonArgs),
}

#[derive(Args, Debug, Clone)]
pub struct CommonArgs {
    /// Graph JSON file.
    #[arg(long, conflicts_with = "matrix", required_unless_present = "matrix")]
    pub graph: Option<PathBuf>,
    /// Dense matrix JSON file.
    #[arg(long)]
    pub matrix: Option<PathBuf>,
    /// Matrix built from a graph input.
    #[arg(long, default_value = "adjacency")]
    pub kind: MatrixKind,
    /// Automorphism in cycle notation, e.g. "(1 2 3)(4 5)".
    #[arg(long)]
    pub perm: Option<String>,
    /// Transversal seeds as JSON nested lists stage → round → vertices.
    #[arg(long)]
    pub seeds: Option<String>,
    /// Eigenvalue matching tolerance.
    #[arg(long, default_value_t = MATCH_TOL)]
    pub tol: f64,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Check that the spectra of the pieces recombine into the spectrum of the input.
    #[arg(long)]
    pub verify: bool,
    /// Include the accumulated similarity transform in the output.
    #[arg(long)]
    pub emit_transform: bool,
}

#[derive(Clone, Debug)]
pub enum Input {
    Graph(PathBuf),
    Matrix(PathBuf),
}

/// Validated settings for one command.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub input: Input,
    pub kind: MatrixKind,
    pub perm: Option<String>,
    pub seeds: Vec<Vec<Vec<usize>>>,
    pub tol: f64,
    pub out: Option<PathBuf>,
    pub verify: bool,
    pub emit_transform: bool,
}

impl RunConfig {
    pub fn from_args(args: &CommonArgs) -> Result<Self> {
        let input = match (&args.graph, &args.matrix) {
            (Some(g), None) => Input::Graph(g.clone()),
            (None, Some(m)) => Input::Matrix(m.clone()),
            _ => {
                return Err(Error::Parse(
                    "exactly one of --graph and --matrix is required".into(),
                ))
            }
        };
        if !(args.tol.is_finite() && args.tol > 0.0) {
            return Err(Error::Parse(format!(
                "tolerance {} must be positive",
                args.tol
            )));
        }
        let seeds = match &args.seeds {
            Some(s) => io::parse_seeds(s)?,
            None => Vec::new(),
        };
        Ok(Self {
            input,
            kind: args.kind,
            perm: args.perm.clone(),
            seeds,
            tol: args.tol,
            out: args.out.clone(),
            verify: args.verify,
            emit_transform: args.emit_transform,
        })
    }

    pub fn load_matrix(&self) -> Result<MatrixC> {
        match &self.input {
            Input::Graph(path) => build_matrix(&io::read_graph(path)?, self.kind),
            Input::Matrix(path) => {
                let m = io::read_matrix(path)?;
                if m.rows() == 0 {
                    return Err(Error::InvalidGraph("empty matrix".into()));
                }
                Ok(m)
            }
        }
    }

    /// The permutation, identity when none was given.
    pub fn load_perm(&self, n: usize) -> Result<Permutation> {
        match &self.perm {
            Some(text) => Permutation::parse_cycles(text, n),
            None => Ok(Permutation::identity(n)),
        }
    }
}

/// Result of a command. `artifact` is JSON for `--out` (or standard output);
/// `report` is human-readable text.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub artifact: Option<String>,
    pub report: String,
    pub code: i32,
}

pub fn cmd_decompose(cfg: &RunConfig) -> Result<Outcome> {
    let m = cfg.load_matrix()?;
    let phi = cfg.load_perm(m.rows())?;
    let opts = DecomposeOptions {
        seeds: cfg.seeds.clone(),
        emit_transform: cfg.emit_transform,
    };
    let res = match general_decompose(&m, &phi, &opts) {
        Ok(res) => res,
        Err(e @ Error::ResidualTooLarge { .. }) => {
            return Ok(Outcome {
                artifact: None,
                report: format!("{e}\n"),
                code: EXIT_VERIFY,
            })
        }
        Err(e) => return Err(e),
    };
    let verified = if cfg.verify {
        verify_pieces(&m, &res.divisor, res.block_matrices(), cfg.tol)?
    } else {
        true
    };
    Ok(Outcome {
        artifact: Some(io::to_canonical_string(&io::result_to_value(
            &res, verified,
        ))),
        report: String::new(),
        code: if verified { EXIT_OK } else { EXIT_VERIFY },
    })
}

/// `σ(m) = σ(divisor) ∪ ⋃ σ(blocks)` within `tol`.
pub fn verify_pieces<'a>(
    m: &MatrixC,
    divisor: &'a MatrixC,
    blocks: impl IntoIterator<Item = &'a MatrixC>,
    tol: f64,
) -> Result<bool> {
    let parts = std::iter::once(divisor).chain(blocks);
    Ok(spectral::spectra_agree(m, parts, tol)?.equal)
}

/// Re-runs the spectrum check of a stored decomposition against `m`.
pub fn reverify(m: &MatrixC, stored: &io::StoredResult, tol: f64) -> Result<bool> {
    verify_pieces(m, &stored.divisor, stored.blocks.iter().map(|b| &b.2), tol)
}

pub fn cmd_spectrum(cfg: &RunConfig) -> Result<Outcome> {
    let m = cfg.load_matrix()?;
    let spec = spectral::spectrum(&m)?;
    let doc = serde_json::json!({
        "n": m.rows(),
        "values": spec.values.iter().map(|z| serde_json::json!([z.re, z.im])).collect::<Vec<_>>(),
    });
    Ok(Outcome {
        artifact: Some(io::to_canonical_string(&doc)),
        report: spectrum_table(&spec),
        code: EXIT_OK,
    })
}

pub fn spectrum_table(spec: &spectral::SpectrumMultiset) -> String {
    let mut s = format!("{:>4}  {:>22}  {:>22}\n", "#", "re", "im");
    for (k, z) in spec.values.iter().enumerate() {
        s.push_str(&format!(
            "{:>4}  {:>22.15e}  {:>22.15e}\n",
            k + 1,
            z.re,
            z.im
        ));
    }
    s
}

pub fn cmd_radius(cfg: &RunConfig) -> Result<Outcome> {
    let m = cfg.load_matrix()?;
    let phi = cfg.load_perm(m.rows())?;
    let r = spectral::check_radius_equality(&m, &phi)?;
    let report = format!(
        "nonnegative: yes\nirreducible: yes\nrho(M): {:.16e}\nrho(divisor): {:.16e}\ndifference: {:.3e}\n{}\n",
        r.rho_matrix,
        r.rho_divisor,
        (r.rho_matrix - r.rho_divisor).abs(),
        if r.equal { "PASS" } else { "FAIL" }
    );
    Ok(Outcome {
        artifact: None,
        report,
        code: if r.equal { EXIT_OK } else { EXIT_VERIFY },
    })
}

/// Runs a parsed command. The JSON artifact goes to `--out` when given and to
/// `stdout` otherwise; the report goes to `stdout` when the artifact does not,
/// else to `err`. Returns the process exit code.
pub fn run(cli: Cli, stdout: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let (args, cmd): (&CommonArgs, fn(&RunConfig) -> Result<Outcome>) = match &cli.command {
        Command::Decompose(a) => (a, cmd_decompose),
        Command::Spectrum(a) => (a, cmd_spectrum),
        Command::Radius(a) => (a, cmd_radius),
    };
    let outcome = RunConfig::from_args(args).and_then(|cfg| {
        let outcome = cmd(&cfg)?;
        match (&outcome.artifact, &cfg.out) {
            (Some(json), Some(path)) => {
                std::fs::write(path, json)?;
                stdout.write_all(outcome.report.as_bytes())?;
            }
            (Some(json), None) => {
                stdout.write_all(json.as_bytes())?;
                err.write_all(outcome.report.as_bytes())?;
            }
            (None, _) => stdout.write_all(outcome.report.as_bytes())?,
        }
        Ok(outcome.code)
    });
    match outcome {
        Ok(code) => {
            if code == EXIT_VERIFY {
                let _ = writeln!(err, "error: verification failed");
            }
            code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INPUT
        }
    }
}
