//! Command-line grammar and its validation into a [`RunConfig`].

use std::path::PathBuf;

use annulus_core::{AnnulusWindow, Error, FunctionModel, QuadConfig, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Largest number of windows a surface or scan may request.
pub const MAX_GRID_POINTS: usize = 10_000;

#[derive(Debug, Parser)]
#[command(name = "annulus", version, about = "Nevanlinna characteristic of functions on annuli")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate T(τ, r; f) and its parts on one window.
    Eval(CommonArgs),
    /// Tabulate T over a grid of windows.
    Surface(CommonArgs),
    /// Run identity and property checks.
    Verify(CommonArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Jensen1,
    Jensen2,
    Eq12,
    Cartan,
    Lemma4,
    Lemma5,
    Lemma6,
    Fft,
    Theorem1,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Jensen1 => "jensen1",
            Suite::Jensen2 => "jensen2",
            Suite::Eq12 => "eq12",
            Suite::Cartan => "cartan",
            Suite::Lemma4 => "lemma4",
            Suite::Lemma5 => "lemma5",
            Suite::Lemma6 => "lemma6",
            Suite::Fft => "fft",
            Suite::Theorem1 => "theorem1",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Function: an expression in z, or `rational: scale; (root, mult); ...`.
    #[arg(long = "fn", value_name = "SPEC")]
    pub function: String,
    /// Inner radius parameter τ ≥ 1 (the inner circle is |z| = 1/τ).
    #[arg(long, default_value_t = 2.0)]
    pub tau: f64,
    /// Outer radius r ≥ 1.
    #[arg(long, default_value_t = 3.0)]
    pub r: f64,
    /// Log-spaced τ axis `lo:hi:n`.
    #[arg(long, value_name = "LO:HI:N")]
    pub tau_grid: Option<String>,
    /// Log-spaced r axis `lo:hi:n`.
    #[arg(long, value_name = "LO:HI:N")]
    pub r_grid: Option<String>,
    /// Comma-separated verification suites.
    #[arg(long, value_delimiter = ',')]
    pub suite: Vec<Suite>,
    /// φ panels for averages over the unit circle of values.
    #[arg(long, default_value_t = 512)]
    pub nphi: usize,
    /// Relative quadrature tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Node budget for one integral.
    #[arg(long)]
    pub max_nodes: Option<usize>,
    /// Worker threads (default: available parallelism).
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Output file (default: standard output).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output format (default: csv for surfaces, json otherwise).
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Seed for randomized test points.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// Validated inputs shared by every command.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub f: FunctionModel,
    pub window: AnnulusWindow,
    pub tau_grid: Option<Vec<f64>>,
    pub r_grid: Option<Vec<f64>>,
    pub suites: Vec<Suite>,
    pub n_phi: usize,
    pub quad: QuadConfig,
    pub jobs: Option<usize>,
    pub format: Option<Format>,
    pub seed: u64,
}

impl RunConfig {
    pub fn from_args(a: &CommonArgs) -> Result<Self> {
        let f = FunctionModel::from_spec(&a.function)?.rationalized();
        let mut quad = QuadConfig::default();
        if let Some(tol) = a.tol {
            if !(tol > 0.0 && tol.is_finite()) {
                return Err(Error::InvalidArgument(format!("--tol must be positive, got {tol}")));
            }
            quad.tol = tol;
        }
        if let Some(n) = a.max_nodes {
            if n == 0 {
                return Err(Error::InvalidArgument("--max-nodes must be positive".into()));
            }
            quad.max_nodes = n;
        }
        if a.jobs == Some(0) {
            return Err(Error::InvalidArgument("--jobs must be positive".into()));
        }
        if a.nphi == 0 {
            return Err(Error::InvalidArgument("--nphi must be positive".into()));
        }
        let tau_grid = a.tau_grid.as_deref().map(|s| parse_axis(s, "--tau-grid")).transpose()?;
        let r_grid = a.r_grid.as_deref().map(|s| parse_axis(s, "--r-grid")).transpose()?;
        if let (Some(t), Some(r)) = (&tau_grid, &r_grid) {
            if t.len() * r.len() > MAX_GRID_POINTS {
                return Err(Error::InvalidArgument(format!(
                    "grid has {} points, the limit is {MAX_GRID_POINTS}",
                    t.len() * r.len()
                )));
            }
        }
        Ok(Self {
            f,
            window: AnnulusWindow::new(a.tau, a.r)?,
            tau_grid,
            r_grid,
            suites: a.suite.clone(),
            n_phi: a.nphi,
            quad,
            jobs: a.jobs,
            format: a.format,
            seed: a.seed,
        })
    }
}

/// `lo:hi:n` as `n` log-spaced values from `lo` to `hi` inclusive.
pub fn parse_axis(text: &str, flag: &str) -> Result<Vec<f64>> {
    let bad = |why: &str| Error::InvalidArgument(format!("{flag} {text:?}: {why}"));
    let parts: Vec<&str> = text.split(':').collect();
    let [lo, hi, n] = parts[..] else {
        return Err(bad("expected lo:hi:n"));
    };
    let lo: f64 = lo.trim().parse().map_err(|_| bad("lo is not a number"))?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad("hi is not a number"))?;
    let n: usize = n.trim().parse().map_err(|_| bad("n is not a positive integer"))?;
    if !(lo.is_finite() && hi.is_finite() && lo >= 1.0 && hi >= lo) {
        return Err(bad("need 1 ≤ lo ≤ hi"));
    }
    if n == 0 || n > MAX_GRID_POINTS {
        return Err(bad("n must be between 1 and 10000"));
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    if hi == lo {
        return Err(bad("need lo < hi for more than one point"));
    }
    let step = (hi / lo).ln() / (n - 1) as f64;
    Ok((0..n)
        .map(|k| if k + 1 == n { hi } else { lo * (step * k as f64).exp() })
        .collect())
}
