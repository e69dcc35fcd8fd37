//! Command-line parsing into a [`SweepSpec`].

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{CliError, Result};
use crate::sweep::{Experiment, Mode, StrategyKind, SweepSpec, DEFAULT_REPEATS, DEFAULT_SHOTS};
use crate::table::{Destination, Format};

#[derive(Debug, Parser)]
#[command(
    name = "pccsim",
    version,
    about = "Phase-covariant cloning experiments"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Clone fidelities of |D> against the cloning parameter q.
    #[command(name = "fidelity_vs_q", visible_alias = "fidelity-vs-q")]
    FidelityVsQ(Opts),
    /// Clone fidelities over equatorial input phases at fixed q.
    #[command(name = "fidelity_vs_phase", visible_alias = "fidelity-vs-phase")]
    FidelityVsPhase(Opts),
    /// Bob and Eve fidelities of cos 2θ|H> + sin 2θ|V> for both machines.
    #[command(name = "fidelity_vs_theta", visible_alias = "fidelity-vs-theta")]
    FidelityVsTheta(Opts),
    /// Bob's <σz> under PCC(+), PCC(−) and their balanced mixture.
    #[command(name = "bias_vs_q", visible_alias = "bias-vs-q")]
    BiasVsQ(Opts),
    /// BB84 rounds with a σz check; QBER, bias and verdict per q.
    Bb84(Opts),
    /// Compiles the Sagnac presets and checks them against the ideal isometries.
    #[command(name = "verify_optics", visible_alias = "verify-optics")]
    VerifyOptics(Opts),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    None,
    Plus,
    Minus,
    Mirrored,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct Opts {
    /// Cloning parameter (fixed q for phase/θ sweeps, one-point grid otherwise).
    #[arg(long, conflicts_with = "alpha_deg", allow_hyphen_values = true)]
    pub q: Option<f64>,
    /// Half-wave plate angle in degrees; sets q = sin²(2α).
    #[arg(long, allow_hyphen_values = true)]
    pub alpha_deg: Option<f64>,
    /// Comma-separated values or start:stop:count.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    #[arg(long)]
    pub shots: Option<u64>,
    #[arg(long)]
    pub repeats: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Werner visibility of the entangled source.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub visibility: f64,
    #[arg(long, value_enum)]
    pub strategy: Option<StrategyArg>,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    pub format: FormatArg,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Analytic values instead of simulated tomography.
    #[arg(long)]
    pub exact: bool,
    /// Number of BB84 signals.
    #[arg(long)]
    pub signals: Option<usize>,
}

/// Everything needed to run and emit one experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct Invocation {
    pub spec: SweepSpec,
    pub format: Format,
    pub destination: Destination,
}

/// Parses `a,b,c` or `start:stop:count` (inclusive, evenly spaced).
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let bad = |why: &str| CliError::BadGrid(text.to_string(), why.to_string());
    let number = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| bad(&format!("{:?} is not a number", s.trim())))
    };
    if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        let [a, b, n] = parts[..] else {
            return Err(bad("expected start:stop:count"));
        };
        let (a, b) = (number(a)?, number(b)?);
        let n: usize = n
            .trim()
            .parse()
            .map_err(|_| bad("count must be a positive integer"))?;
        return match n {
            0 => Err(bad("count must be a positive integer")),
            1 => Ok(vec![a]),
            _ => Ok((0..n)
                .map(|k| a + (b - a) * k as f64 / (n - 1) as f64)
                .collect()),
        };
    }
    let values = text.split(',').map(number).collect::<Result<Vec<_>>>()?;
    if values.is_empty() {
        return Err(CliError::EmptyGrid);
    }
    Ok(values)
}

fn reject(cond: bool, flag: &str, e: Experiment) -> Result<()> {
    if cond {
        Err(CliError::Conflict(format!(
            "{flag} is not used by {}",
            e.name()
        )))
    } else {
        Ok(())
    }
}

impl Command {
    pub fn split(&self) -> (Experiment, &Opts) {
        match self {
            Self::FidelityVsQ(o) => (Experiment::FidelityVsQ, o),
            Self::FidelityVsPhase(o) => (Experiment::FidelityVsPhase, o),
            Self::FidelityVsTheta(o) => (Experiment::FidelityVsTheta, o),
            Self::BiasVsQ(o) => (Experiment::BiasVsQ, o),
            Self::Bb84(o) => (Experiment::Bb84, o),
            Self::VerifyOptics(o) => (Experiment::VerifyOptics, o),
        }
    }
}

impl Opts {
    pub fn into_invocation(&self, experiment: Experiment) -> Result<Invocation> {
        let e = experiment;
        let mut spec = SweepSpec::new(e);
        spec.seed = self.seed;
        spec.source_visibility = self.visibility;

        let sampled = self.shots.is_some() || self.repeats.is_some();
        if e.uses_tomography() {
            if self.exact && sampled {
                return Err(CliError::Conflict(
                    "--exact cannot be combined with --shots or --repeats".into(),
                ));
            }
            spec.mode = if self.exact {
                Mode::Exact
            } else {
                Mode::Sampled {
                    shots: self.shots.unwrap_or(DEFAULT_SHOTS),
                    repeats: self.repeats.unwrap_or(DEFAULT_REPEATS),
                }
            };
        } else {
            reject(sampled, "--shots/--repeats", e)?;
            reject(self.exact && e == Experiment::Bb84, "--exact", e)?;
        }

        reject(
            self.strategy.is_some() && !e.uses_strategy(),
            "--strategy",
            e,
        )?;
        if let Some(s) = self.strategy {
            spec.strategy = match s {
                StrategyArg::None => StrategyKind::None,
                StrategyArg::Plus => StrategyKind::Plus,
                StrategyArg::Minus => StrategyKind::Minus,
                StrategyArg::Mirrored => StrategyKind::Mirrored,
            };
        }
        reject(
            self.signals.is_some() && e != Experiment::Bb84,
            "--signals",
            e,
        )?;
        if let Some(n) = self.signals {
            spec.signals = n;
        }

        let q_from_alpha = match self.alpha_deg {
            Some(a) if e != Experiment::VerifyOptics => {
                if !a.is_finite() {
                    return Err(CliError::OutOfDomain {
                        name: "alpha_deg",
                        value: a,
                        lo: 0.0,
                        hi: 90.0,
                    });
                }
                Some(pcc_core::cloning::waveplate_to_q(a.to_radians())?.value())
            }
            _ => None,
        };
        let q = self.q.or(q_from_alpha);

        let grid = self.grid.as_deref().map(parse_grid).transpose()?;
        let point = match e {
            Experiment::VerifyOptics => {
                reject(self.q.is_some(), "--q", e)?;
                self.alpha_deg
            }
            _ if e.uses_fixed_q() => {
                if let Some(q) = q {
                    spec.q = q;
                }
                None
            }
            _ => q,
        };
        match (grid, point) {
            (Some(_), Some(_)) => {
                return Err(CliError::Conflict(
                    "--grid cannot be combined with a single-point --q/--alpha-deg".into(),
                ))
            }
            (Some(g), None) => spec.grid = g,
            (None, Some(p)) => spec.grid = vec![p],
            (None, None) => {}
        }

        spec.validate()?;
        Ok(Invocation {
            spec,
            format: match self.format {
                FormatArg::Csv => Format::Csv,
                FormatArg::Json => Format::Json,
            },
            destination: self
                .out
                .clone()
                .map_or(Destination::Stdout, Destination::File),
        })
    }
}

pub fn parse_invocation<I, T>(args: I) -> Result<Invocation>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(CliError::Usage)?;
    let (experiment, opts) = cli.command.split();
    opts.into_invocation(experiment)
}
