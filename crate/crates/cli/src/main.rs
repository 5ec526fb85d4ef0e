//! `prismatic`: realize, uniformize and inspect decorated cusp surfaces.

mod check;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use prismatic::solver::{self, CurvatureTarget, SolveOptions};
use prismatic::{complex, Error, ResultDocument, SurfaceDocument, TriangulatedSurface};
use serde_json::json;

#[derive(Parser)]
#[command(name = "prismatic", version, about = "Convex prismatic complexes over decorated cusp surfaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Find the weights realizing prescribed cusp curvatures.
    Realize {
        /// Surface document; edge lengths are Penner lengths.
        #[arg(long)]
        surface: PathBuf,
        #[command(flatten)]
        kappa: KappaArgs,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, default_value_t = 100)]
        max_iter: usize,
        /// Output file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Find the discretely conformal metric with prescribed curvatures.
    Uniformize {
        /// Surface document; edge lengths are hyperbolic lengths.
        #[arg(long)]
        metric: PathBuf,
        #[command(flatten)]
        kappa: KappaArgs,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, default_value_t = 100)]
        max_iter: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Flip to the convex (Epstein–Penner) triangulation for given weights.
    Delaunay {
        #[arg(long)]
        surface: PathBuf,
        /// Comma-separated weights by cusp id; defaults to the document's
        /// weights, then to zero.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        weights: Option<Vec<f64>>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run consistency checks on a document and print a pass/fail table.
    Check {
        #[arg(long)]
        surface: PathBuf,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        weights: Option<Vec<f64>>,
    },
}

#[derive(Args)]
struct KappaArgs {
    /// Comma-separated target curvatures by cusp id. Without this or
    /// `--kappa-zero`, the document's `kappa_target` is used.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, conflicts_with = "kappa_zero")]
    kappa: Option<Vec<f64>>,
    /// Target zero curvature at every cusp.
    #[arg(long)]
    kappa_zero: bool,
}

/// A failure, with the exit code it maps to.
#[derive(Debug)]
enum Failure {
    Lib(Error),
    Io { path: PathBuf, message: String },
    Usage(String),
    Checks,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Lib(Error::Infeasible(_)) => 2,
            Failure::Lib(Error::NoConvergence { .. } | Error::Stuck { .. } | Error::FlipCap { .. }) => 3,
            _ => 1,
        }
    }

    fn to_json(&self) -> serde_json::Value {
        match self {
            Failure::Lib(e) => {
                let mut v = json!({ "error": error_kind(e), "message": e.to_string() });
                match e {
                    Error::NoConvergence { iterations, residual, trace } => {
                        v["iterations"] = json!(iterations);
                        v["residual"] = json!(residual);
                        v["trace"] = json!(trace);
                    }
                    Error::InadmissibleTriangle { triangle, corner } => {
                        v["triangle"] = json!(triangle);
                        v["corner"] = json!(corner);
                    }
                    Error::FlipCap { cap, history } => {
                        v["cap"] = json!(cap);
                        v["history"] = json!(history);
                    }
                    Error::Stuck { edge } => v["edge"] = json!(edge),
                    _ => {}
                }
                v
            }
            Failure::Io { path, message } => json!({ "error": "io", "path": path, "message": message }),
            Failure::Usage(message) => json!({ "error": "usage", "message": message }),
            Failure::Checks => json!({ "error": "check_failed", "message": "one or more checks failed" }),
        }
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Domain { .. } => "domain",
        Error::Range { .. } => "range",
        Error::InadmissiblePrism { .. } | Error::InadmissibleTriangle { .. } => "inadmissible",
        Error::Degenerate(_) => "degenerate",
        Error::InvalidSlot { .. }
        | Error::FixedPoint { .. }
        | Error::NotInvolution { .. }
        | Error::Unglued { .. }
        | Error::Disconnected { .. }
        | Error::Empty => "invalid_surface",
        Error::CountMismatch { .. } | Error::NonFinite { .. } => "invalid_input",
        Error::InvalidEdge(_) | Error::InvalidCusp(_) => "invalid_index",
        Error::Unflippable(_) => "unflippable",
        Error::FlipCap { .. } => "flip_cap",
        Error::Stuck { .. } => "stuck",
        Error::Infeasible(_) => "infeasible",
        Error::Precondition(_) => "precondition",
        Error::NoConvergence { .. } => "no_convergence",
        Error::Mismatch(_) => "mismatch",
        Error::Document(_) => "document",
    }
}

fn read_document(path: &Path) -> Result<SurfaceDocument, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Io { path: path.into(), message: e.to_string() })?;
    Ok(SurfaceDocument::parse(&text)?)
}

fn write_output(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Io { path: path.into(), message: e.to_string() }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn target(surface: &TriangulatedSurface, args: &KappaArgs, doc: &SurfaceDocument) -> Result<CurvatureTarget, Failure> {
    if args.kappa_zero {
        return Ok(CurvatureTarget::zero(surface)?);
    }
    match args.kappa.as_ref().or(doc.kappa_target.as_ref()) {
        Some(k) => Ok(CurvatureTarget::new(surface, k.clone())?),
        None => Err(Failure::Usage("no target: pass --kappa, --kappa-zero, or set kappa_target".into())),
    }
}

fn realize(surface: &Path, kappa: &KappaArgs, tol: f64, max_iter: usize, out: Option<&Path>) -> Result<(), Failure> {
    let doc = read_document(surface)?;
    let metric = doc.metric()?;
    let target = target(metric.surface(), kappa, &doc)?;
    let opts = SolveOptions { tol, max_iter, initial: doc.weights.clone() };
    let rep = solver::solve(&metric, &target, &opts)?;
    let mut result = ResultDocument::from_state(&rep.state, rep.flips)?;
    result.residual = Some(rep.residual);
    result.iterations = rep.iterations;
    result.trace = rep.trace;
    write_output(out, &result.to_json())
}

fn uniformize(metric: &Path, kappa: &KappaArgs, tol: f64, max_iter: usize, out: Option<&Path>) -> Result<(), Failure> {
    let doc = read_document(metric)?;
    let pm = doc.polyhedral()?;
    let target = target(pm.surface(), kappa, &doc)?;
    let opts = SolveOptions { tol, max_iter, initial: None };
    let u = solver::uniformize(&pm, &target, &opts)?;
    let flip_log = u.lower_flips.iter().chain(&u.report.flips).copied().collect();
    let mut result = ResultDocument::from_state(&u.report.state, flip_log)?.with_factors(&u.factors);
    result.residual = Some(u.report.residual);
    result.iterations = u.report.iterations;
    result.trace = u.report.trace;
    result.conformal_residual = Some(u.conformal_residual);
    write_output(out, &result.to_json())
}

fn delaunay(surface: &Path, weights: Option<Vec<f64>>, out: Option<&Path>) -> Result<(), Failure> {
    let doc = read_document(surface)?;
    let metric = doc.metric()?;
    let r = weights.or(doc.weights).unwrap_or_else(|| vec![0.0; metric.surface().num_cusps()]);
    let d = complex::delaunayize(&metric, &r)?;
    write_output(out, &ResultDocument::from_state(&d.state, d.flips)?.to_json())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Realize { surface, kappa, tol, max_iter, out } => realize(&surface, &kappa, tol, max_iter, out.as_deref()),
        Command::Uniformize { metric, kappa, tol, max_iter, out } => {
            uniformize(&metric, &kappa, tol, max_iter, out.as_deref())
        }
        Command::Delaunay { surface, weights, out } => delaunay(&surface, weights, out.as_deref()),
        Command::Check { surface, weights } => {
            let text =
                fs::read_to_string(&surface).map_err(|e| Failure::Io { path: surface.clone(), message: e.to_string() })?;
            let rows = check::run(&text, weights)?;
            print!("{}", check::table(&rows));
            if rows.iter().all(|r| r.passed) {
                Ok(())
            } else {
                Err(Failure::Checks)
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", f.to_json());
            ExitCode::from(f.code())
        }
    }
}
