//! Command-line front end for the `aqec` binary.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::algebras::AlgebraStructure;
use crate::channels::{compose, Channel};
use crate::correctability::{
    delta_estimate, exact_check, largest_correctable, optimal_error, verify_with, Tolerances, SDP_TOL,
};
use crate::diamond::{cb_check, diamond_distance};
use crate::error::{Error, Result};
use crate::io::{algebra_to_value, channel_to_value, load_algebra, load_channel, load_code, report_to_value, to_canonical_string};

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const VERDICT_FALSE: i32 = 1;
    pub const INPUT_ERROR: i32 = 2;
    pub const NUMERICAL_FAILURE: i32 = 3;
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    #[default]
    Text,
    Json,
}

/// Exact and approximate correctability of operator algebras.
#[derive(Debug, Parser)]
#[command(name = "aqec", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Channel document (give it twice for `diamond`).
    #[arg(long, global = true)]
    pub channel: Vec<PathBuf>,

    /// Algebra document; defaults to the full algebra on the channel input.
    #[arg(long, global = true)]
    pub algebra: Option<PathBuf>,

    /// Code document; the channel is then applied after encoding.
    #[arg(long, global = true)]
    pub code: Option<PathBuf>,

    #[arg(long, global = true, default_value_t = 1e-6, value_parser = positive_f64)]
    pub tol: f64,

    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    #[arg(long, global = true, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    pub samples: u64,

    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    pub output: OutputFormat,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Commutation test of the algebra with all error products.
    CheckExact,
    /// Correctability estimate from the complementary channel.
    Delta,
    /// Optimal reconstruction error and an optimal recovery channel.
    Optimal,
    /// Checks δ²/4 ≤ E ≤ 2√δ within --tol.
    VerifyBounds,
    /// Largest algebra correctable for the channel (algebra document).
    LargestAlgebra,
    /// Complementary channel (channel document).
    Complement,
    /// Diamond-norm distance between two channels.
    Diamond,
}

fn positive_f64(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        Ok(_) => Err("must be a positive finite number".into()),
        Err(e) => Err(e.to_string()),
    }
}

/// Six significant digits, fixed notation where it stays readable.
pub fn format_sig6(x: f64) -> String {
    if x == 0.0 {
        return "0.00000".into();
    }
    let mag = x.abs().log10().floor() as i32;
    if (-3..6).contains(&mag) {
        format!("{x:.*}", (5 - mag) as usize)
    } else {
        format!("{x:.5e}")
    }
}

/// Whether a failure is the caller's input or a numerical breakdown.
pub fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::DegenerateSample { .. }
        | Error::NoConvergence(_)
        | Error::Numerical { .. }
        | Error::SolverStalled { .. } => exit::NUMERICAL_FAILURE,
        _ => exit::INPUT_ERROR,
    }
}

struct Outcome {
    text: String,
    json: Value,
    verdict: bool,
}

impl Outcome {
    fn value(text: String, json: Value) -> Self {
        Self { text, json, verdict: true }
    }
}

fn one_channel(cli: &Cli) -> Result<Channel> {
    match cli.channel.as_slice() {
        [p] => load_channel(p),
        [] => Err(Error::InvalidInput("--channel is required".into())),
        _ => Err(Error::InvalidInput("expected exactly one --channel".into())),
    }
}

/// Channel (composed with the encoding when `--code` is given) and algebra.
fn channel_and_algebra(cli: &Cli) -> Result<(Channel, AlgebraStructure)> {
    let mut n = one_channel(cli)?;
    if let Some(path) = &cli.code {
        let code = load_code(path)?;
        if code.dim_phys() != n.dim_in() {
            return Err(Error::DimensionMismatch(format!(
                "{}: code lives in dimension {}, channel input is {}",
                path.display(),
                code.dim_phys(),
                n.dim_in()
            )));
        }
        n = compose(&n, &code.encoding())?;
    }
    let alg = match &cli.algebra {
        Some(p) => load_algebra(p)?,
        None => AlgebraStructure::full(n.dim_in()),
    };
    if alg.ambient_dim() != n.dim_in() {
        return Err(Error::DimensionMismatch(format!(
            "algebra acts on dimension {}, channel input is {}",
            alg.ambient_dim(),
            n.dim_in()
        )));
    }
    Ok((n, alg))
}

fn tolerances(cli: &Cli) -> Tolerances {
    Tolerances { exact: cli.tol, bounds: cli.tol, sdp: SDP_TOL }
}

fn execute(cli: &Cli) -> Result<Outcome> {
    Ok(match cli.command {
        Command::CheckExact => {
            let (n, alg) = channel_and_algebra(cli)?;
            let (exact, defect) = exact_check(&n, &alg, cli.tol)?;
            let text = if exact {
                format!("EXACT (defect {defect:.1e})")
            } else {
                format!("NOT EXACT (defect {defect:.1e})")
            };
            Outcome { text, json: json!({ "exact": exact, "kl_defect": defect }), verdict: exact }
        }
        Command::Delta => {
            let (n, alg) = channel_and_algebra(cli)?;
            let delta = delta_estimate(&n, &alg, SDP_TOL)?;
            Outcome::value(format!("δ = {}", format_sig6(delta)), json!({ "delta": delta }))
        }
        Command::Optimal => {
            let (n, alg) = channel_and_algebra(cli)?;
            let (e, recovery) = optimal_error(&n, &alg, SDP_TOL)?;
            Outcome::value(
                format!("E = {}", format_sig6(e)),
                json!({ "optimal_error": e, "recovery": channel_to_value(&recovery) }),
            )
        }
        Command::VerifyBounds => {
            let (n, alg) = channel_and_algebra(cli)?;
            let mut report = verify_with(&n, &alg, tolerances(cli))?;
            report.seed = Some(cli.seed);
            let verdict = match (report.lower_bound_ok, report.upper_bound_ok) {
                (true, true) => "BOUNDS OK",
                (false, true) => "BOUNDS VIOLATED (lower)",
                (true, false) => "BOUNDS VIOLATED (upper)",
                (false, false) => "BOUNDS VIOLATED (lower, upper)",
            };
            Outcome {
                text: format!("δ={:.3} E={:.3} {verdict}", report.delta.max(0.0), report.optimal_error.max(0.0)),
                json: report_to_value(&report),
                verdict: report.bounds_ok,
            }
        }
        Command::LargestAlgebra => {
            let alg = largest_correctable(&one_channel(cli)?, cli.tol)?;
            let doc = algebra_to_value(&alg);
            Outcome::value(to_canonical_string(&doc).trim_end().to_owned(), doc)
        }
        Command::Complement => {
            let doc = channel_to_value(&one_channel(cli)?.complement());
            Outcome::value(to_canonical_string(&doc).trim_end().to_owned(), doc)
        }
        Command::Diamond => {
            let [a, b] = cli.channel.as_slice() else {
                return Err(Error::InvalidInput("diamond needs --channel twice".into()));
            };
            let (n1, n2) = (load_channel(a)?, load_channel(b)?);
            let d = diamond_distance(&n1, &n2, SDP_TOL)?;
            let lower = cb_check(&n1, &n2, cli.samples as usize, cli.seed)?;
            Outcome::value(
                format!("diamond distance = {} (sampled lower bound {})", format_sig6(d), format_sig6(lower)),
                json!({ "diamond": d, "sampled_lower_bound": lower, "samples": cli.samples, "seed": cli.seed }),
            )
        }
    })
}

/// Runs one command, writing the report to `out` and diagnostics to `err`.
/// Returns the process exit code.
pub fn run(cli: &Cli, out: &mut impl Write, err: &mut impl Write) -> i32 {
    match execute(cli) {
        Ok(outcome) => {
            let body = match cli.output {
                OutputFormat::Text => format!("{}\n", outcome.text),
                OutputFormat::Json => to_canonical_string(&outcome.json),
            };
            if out.write_all(body.as_bytes()).is_err() {
                return exit::INPUT_ERROR;
            }
            if outcome.verdict { exit::OK } else { exit::VERDICT_FALSE }
        }
        Err(e) => {
            let code = exit_code_for(&e);
            let _ = writeln!(err, "error: {e}");
            if code == exit::NUMERICAL_FAILURE {
                let _ = writeln!(err, "hint: rerun with AQEC_VERBOSE=1 to see the solver trace");
            }
            code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig6_formatting() {
        assert_eq!(format_sig6(1.5), "1.50000");
        assert_eq!(format_sig6(0.0), "0.00000");
        assert_eq!(format_sig6(0.0123456789), "0.0123457");
        assert_eq!(format_sig6(123.4567), "123.457");
        assert_eq!(format_sig6(2.5e-9), "2.50000e-9");
    }

    #[test]
    fn flags_parse_with_defaults() {
        let cli = Cli::try_parse_from(["aqec", "diamond", "--channel", "a.json", "--channel", "b.json"]).unwrap();
        assert_eq!(cli.command, Command::Diamond);
        assert_eq!(cli.channel.len(), 2);
        assert_eq!((cli.tol, cli.seed, cli.samples, cli.output), (1e-6, 0, 1000, OutputFormat::Text));
        assert!(Cli::try_parse_from(["aqec", "delta", "--tol", "-1"]).is_err());
        assert!(Cli::try_parse_from(["aqec", "delta", "--samples", "0"]).is_err());
    }

    #[test]
    fn missing_file_is_an_input_error() {
        let cli = Cli::try_parse_from(["aqec", "complement", "--channel", "/nonexistent/x.json"]).unwrap();
        let (mut out, mut err) = (Vec::new(), Vec::new());
        assert_eq!(run(&cli, &mut out, &mut err), exit::INPUT_ERROR);
        assert!(String::from_utf8(err).unwrap().contains("/nonexistent/x.json"));
    }

    #[test]
    fn numerical_errors_map_to_exit_3() {
        let e = Error::SolverStalled { iterations: 1, gap: 1.0, infeas: 1.0 };
        assert_eq!(exit_code_for(&e), exit::NUMERICAL_FAILURE);
        assert_eq!(exit_code_for(&Error::UnknownChannel("x".into())), exit::INPUT_ERROR);
    }
}
