use std::path::PathBuf;
use std::str::FromStr;

use clap::{Parser, ValueEnum};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Analyze,
    Fit,
    Stokes,
    Wkb,
    Appendix,
}

/// Polynomial degree and pole order, given as `Npoly,Mpole`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BasisDegrees {
    pub poly: usize,
    pub pole: usize,
}

impl FromStr for BasisDegrees {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (a, b) = s
            .split_once(',')
            .ok_or_else(|| format!("expected Npoly,Mpole, got {s:?}"))?;
        let parse = |x: &str| x.trim().parse::<usize>().map_err(|e| format!("{x:?}: {e}"));
        Ok(Self {
            poly: parse(a)?,
            pole: parse(b)?,
        })
    }
}

#[derive(Debug, Parser)]
#[command(name = "exq", version, about = "Extremal domain analysis: fits, Stokes graphs, WKB scaling, identity checks")]
pub struct Args {
    #[arg(long, value_enum)]
    pub command: Command,
    /// Domain file (JSON list of Fourier contours, outer first).
    #[arg(long)]
    pub domain: PathBuf,
    /// Boundary samples per contour.
    #[arg(long, default_value_t = 512)]
    pub samples: usize,
    #[arg(long, default_value = "8,8")]
    pub basis: BasisDegrees,
    /// Tolerance for identity checks.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long, default_value = "exq-out")]
    pub out: PathBuf,
    /// Seed for randomized checks.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub domain: PathBuf,
    pub samples: usize,
    pub basis: BasisDegrees,
    pub tol: f64,
    pub out: PathBuf,
    pub seed: u64,
}

impl TryFrom<Args> for RunConfig {
    type Error = CliError;

    fn try_from(a: Args) -> Result<Self, CliError> {
        if a.samples < 64 {
            return Err(CliError::Config(format!("--samples must be at least 64, got {}", a.samples)));
        }
        if !(a.tol > 0.0 && a.tol.is_finite()) {
            return Err(CliError::Config(format!("--tol must be positive, got {}", a.tol)));
        }
        Ok(Self {
            command: a.command,
            domain: a.domain,
            samples: a.samples,
            basis: a.basis,
            tol: a.tol,
            out: a.out,
            seed: a.seed,
        })
    }
}
