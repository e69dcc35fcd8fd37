//! Named experiments evaluated over a parameter grid.

use std::str::FromStr;

use pcc_core::cloning::{
    apply_cloner, clone_marginals, pcc_isometry, waveplate_to_q, CloningParameter, EveStrategy,
    Probability,
};
use pcc_core::optics::{
    circuit_marginals, compile_circuit, equivalent_up_to_local_phase, sagnac_preset, SagnacVariant,
};
use pcc_core::protocol::{
    make_source, prepare_for_bob, run_bb84, Bb84Config, SourceModel, Verdict,
};
use pcc_core::qstate::{
    bloch_vector, fidelity_pure, make_equatorial_state, make_polar_state, partial_trace,
    DensityMatrix, PureState, Subsystem,
};
use pcc_core::tomography::{derive_seed, tomography_pipeline, Shots, RNG_NAME};

use crate::error::{CliError, Result};
use crate::table::ResultTable;

pub const DEFAULT_SHOTS: u64 = 10_000;
pub const DEFAULT_REPEATS: usize = 20;
pub const DEFAULT_SIGNALS: usize = 100_000;
pub const DEFAULT_CHECK_FRACTION: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Experiment {
    FidelityVsQ,
    FidelityVsPhase,
    FidelityVsTheta,
    BiasVsQ,
    Bb84,
    VerifyOptics,
}

/// What the grid values of an experiment mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridAxis {
    pub name: &'static str,
    pub lo: f64,
    pub hi: f64,
}

impl Experiment {
    pub const ALL: [Experiment; 6] = [
        Self::FidelityVsQ,
        Self::FidelityVsPhase,
        Self::FidelityVsTheta,
        Self::BiasVsQ,
        Self::Bb84,
        Self::VerifyOptics,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::FidelityVsQ => "fidelity_vs_q",
            Self::FidelityVsPhase => "fidelity_vs_phase",
            Self::FidelityVsTheta => "fidelity_vs_theta",
            Self::BiasVsQ => "bias_vs_q",
            Self::Bb84 => "bb84",
            Self::VerifyOptics => "verify_optics",
        }
    }

    pub fn grid_axis(self) -> GridAxis {
        let (name, lo, hi) = match self {
            Self::FidelityVsQ | Self::BiasVsQ | Self::Bb84 => ("q", 0.0, 1.0),
            Self::FidelityVsPhase => ("phi_deg", 0.0, 360.0),
            Self::FidelityVsTheta => ("theta_deg", 0.0, 90.0),
            Self::VerifyOptics => ("alpha_deg", 0.0, 90.0),
        };
        GridAxis { name, lo, hi }
    }

    pub fn default_grid(self) -> Vec<f64> {
        let steps = |hi: f64, n: usize| (0..n).map(|k| hi * k as f64 / (n - 1) as f64).collect();
        match self {
            Self::FidelityVsQ | Self::BiasVsQ => (0..=10).map(|k| k as f64 / 10.0).collect(),
            Self::FidelityVsPhase => steps(360.0, 13),
            Self::FidelityVsTheta => steps(45.0, 13),
            Self::Bb84 => vec![0.5],
            Self::VerifyOptics => vec![0.0, 9.0, 18.0, 22.5, 27.0, 36.0, 45.0],
        }
    }

    /// Whether results come from simulated tomography (and so admit a sampled mode).
    pub fn uses_tomography(self) -> bool {
        matches!(
            self,
            Self::FidelityVsQ | Self::FidelityVsPhase | Self::FidelityVsTheta | Self::BiasVsQ
        )
    }

    /// Whether the sweep uses its fixed `q` (grid is not over `q`).
    pub fn uses_fixed_q(self) -> bool {
        matches!(self, Self::FidelityVsPhase | Self::FidelityVsTheta)
    }

    pub fn uses_strategy(self) -> bool {
        matches!(self, Self::FidelityVsQ | Self::FidelityVsPhase | Self::Bb84)
    }

    pub fn default_q(self) -> f64 {
        match self {
            Self::FidelityVsPhase => 0.4,
            _ => 0.5,
        }
    }

    /// Column names in output order.
    pub fn columns(self, mode: Mode) -> Vec<String> {
        let (key, estimates): (&str, &[&str]) = match self {
            Self::FidelityVsQ => ("q", &["F_B", "F_E"]),
            Self::FidelityVsPhase => ("phi_deg", &["F_B", "F_E"]),
            Self::FidelityVsTheta => (
                "theta_deg",
                &["F_B_plus", "F_B_minus", "F_E_plus", "F_E_minus"],
            ),
            Self::BiasVsQ => ("q", &["z_plus", "z_minus", "z_mirrored"]),
            Self::Bb84 => {
                return [
                    "q",
                    "qber_x",
                    "qber_y",
                    "sifted_x",
                    "sifted_y",
                    "check_rounds",
                    "sigma_z_bias",
                    "bias_std_error",
                    "f_bob",
                    "f_eve",
                    "eve_detected",
                ]
                .map(String::from)
                .to_vec()
            }
            Self::VerifyOptics => {
                return [
                    "alpha_deg",
                    "q",
                    "plus_ok",
                    "plus_residual",
                    "minus_ok",
                    "minus_residual",
                    "marginal_err",
                ]
                .map(String::from)
                .to_vec()
            }
        };
        let mut cols = vec![key.to_string()];
        cols.extend(estimates.iter().map(|s| s.to_string()));
        if let Mode::Sampled { .. } = mode {
            cols.extend(estimates.iter().map(|s| format!("{s}_std")));
        }
        cols
    }
}

impl FromStr for Experiment {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let norm = s.replace('-', "_");
        Self::ALL
            .into_iter()
            .find(|e| e.name() == norm)
            .ok_or_else(|| format!("unknown experiment {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Sampled { shots: u64, repeats: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrategyKind {
    None,
    Plus,
    Minus,
    Mirrored,
}

impl StrategyKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::None => "none",
            Self::Plus => "plus",
            Self::Minus => "minus",
            Self::Mirrored => "mirrored",
        }
    }

    /// Mirrored alternates the two machines with equal probability.
    pub fn at(self, q: f64) -> Result<EveStrategy<f64>> {
        let q = CloningParameter::new(q)?;
        Ok(match self {
            Self::None => EveStrategy::NoAttack,
            Self::Plus => EveStrategy::PccPlus(q),
            Self::Minus => EveStrategy::PccMinus(q),
            Self::Mirrored => EveStrategy::RandomMirrored {
                q,
                p_plus: Probability::half(),
            },
        })
    }
}

impl FromStr for StrategyKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "none" => Ok(Self::None),
            "plus" => Ok(Self::Plus),
            "minus" => Ok(Self::Minus),
            "mirrored" => Ok(Self::Mirrored),
            other => Err(format!("unknown strategy {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub experiment: Experiment,
    /// Grid values in the experiment's own unit (`q`, or degrees).
    pub grid: Vec<f64>,
    pub mode: Mode,
    pub seed: u64,
    pub source_visibility: f64,
    /// Cloning parameter for the phase and θ sweeps.
    pub q: f64,
    pub strategy: StrategyKind,
    pub signals: usize,
}

impl SweepSpec {
    /// Default grid, sampled mode and ideal source.
    pub fn new(experiment: Experiment) -> Self {
        Self {
            experiment,
            grid: experiment.default_grid(),
            mode: if experiment.uses_tomography() {
                Mode::Sampled {
                    shots: DEFAULT_SHOTS,
                    repeats: DEFAULT_REPEATS,
                }
            } else {
                Mode::Exact
            },
            seed: 0,
            source_visibility: 1.0,
            q: experiment.default_q(),
            strategy: StrategyKind::Plus,
            signals: DEFAULT_SIGNALS,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid.is_empty() {
            return Err(CliError::EmptyGrid);
        }
        let axis = self.experiment.grid_axis();
        for &x in &self.grid {
            in_domain(axis.name, x, axis.lo, axis.hi)?;
        }
        in_domain("visibility", self.source_visibility, 0.0, 1.0)?;
        in_domain("q", self.q, 0.0, 1.0)?;
        if let Mode::Sampled { shots, repeats } = self.mode {
            if !self.experiment.uses_tomography() {
                return Err(CliError::Conflict(format!(
                    "{} has no sampled tomography mode",
                    self.experiment.name()
                )));
            }
            if shots == 0 {
                return Err(pcc_core::Error::ZeroShots.into());
            }
            if repeats == 0 {
                return Err(pcc_core::Error::ZeroRepeats.into());
            }
        }
        if self.signals == 0 {
            return Err(pcc_core::Error::NoSignals.into());
        }
        Ok(())
    }
}

fn in_domain(name: &'static str, value: f64, lo: f64, hi: f64) -> Result<()> {
    if value.is_finite() && (lo..=hi).contains(&value) {
        Ok(())
    } else {
        Err(CliError::OutOfDomain {
            name,
            value,
            lo,
            hi,
        })
    }
}

/// Estimate of a fidelity-like quantity: exact value, or mean and std over repeats.
fn fidelity_estimate(
    rho: &DensityMatrix<f64>,
    psi: &PureState<f64>,
    mode: Mode,
    seed: u64,
) -> Result<(f64, f64)> {
    match mode {
        Mode::Exact => Ok((fidelity_pure(psi, rho)?, 0.0)),
        Mode::Sampled { shots, repeats } => {
            Ok(
                tomography_pipeline(rho, Shots::Finite(shots), repeats, seed)?
                    .fidelity_stats(psi)?,
            )
        }
    }
}

fn sigma_z_estimate(rho: &DensityMatrix<f64>, mode: Mode, seed: u64) -> Result<(f64, f64)> {
    match mode {
        Mode::Exact => Ok((bloch_vector(rho)?.z, 0.0)),
        Mode::Sampled { shots, repeats } => {
            let r = tomography_pipeline(rho, Shots::Finite(shots), repeats, seed)?;
            Ok((r.bloch_estimate.z, r.std_errors[2]))
        }
    }
}

/// Key value followed by estimates, then (sampled mode) their std columns.
fn assemble(key: f64, estimates: &[(f64, f64)], mode: Mode) -> Vec<f64> {
    let mut row = vec![key];
    row.extend(estimates.iter().map(|e| e.0));
    if let Mode::Sampled { .. } = mode {
        row.extend(estimates.iter().map(|e| e.1));
    }
    row
}

fn marginal_error(
    u: &pcc_core::CMatrix64,
    q: CloningParameter<f64>,
    variant: SagnacVariant,
) -> Result<f64> {
    let iso = pcc_isometry(q, variant.orientation());
    let eq = equivalent_up_to_local_phase(u, &iso)?;
    let corrected = eq.corrected(u);
    let mut worst = 0.0_f64;
    for input in [make_equatorial_state(0.3)?, make_polar_state(0.2)?] {
        let rho = input.density();
        let (cb, ce) = circuit_marginals(&corrected, &rho)?;
        let ideal = apply_cloner(&iso, &rho)?;
        worst = worst
            .max(cb.max_abs_diff(&partial_trace(&ideal, Subsystem::Bob)?))
            .max(ce.max_abs_diff(&partial_trace(&ideal, Subsystem::Eve)?));
    }
    Ok(worst)
}

fn row_for(
    spec: &SweepSpec,
    source: &DensityMatrix<f64>,
    index: usize,
    x: f64,
) -> Result<Vec<f64>> {
    let seed = |series: u64| derive_seed(spec.seed, &[index as u64, series]);
    let mode = spec.mode;
    match spec.experiment {
        Experiment::FidelityVsQ | Experiment::FidelityVsPhase => {
            let (q, phi) = match spec.experiment {
                Experiment::FidelityVsQ => (x, 0.0),
                _ => (spec.q, x.to_radians()),
            };
            let psi = make_equatorial_state(phi)?;
            let (bob, eve) =
                clone_marginals(&spec.strategy.at(q)?, &prepare_for_bob(source, &psi)?)?;
            let fb = fidelity_estimate(&bob, &psi, mode, seed(0))?;
            let fe = fidelity_estimate(&eve, &psi, mode, seed(1))?;
            Ok(assemble(x, &[fb, fe], mode))
        }
        Experiment::FidelityVsTheta => {
            let psi = make_polar_state(x.to_radians())?;
            let input = prepare_for_bob(source, &psi)?;
            let (bp, ep) = clone_marginals(&StrategyKind::Plus.at(spec.q)?, &input)?;
            let (bm, em) = clone_marginals(&StrategyKind::Minus.at(spec.q)?, &input)?;
            let est = [
                fidelity_estimate(&bp, &psi, mode, seed(0))?,
                fidelity_estimate(&bm, &psi, mode, seed(1))?,
                fidelity_estimate(&ep, &psi, mode, seed(2))?,
                fidelity_estimate(&em, &psi, mode, seed(3))?,
            ];
            Ok(assemble(x, &est, mode))
        }
        Experiment::BiasVsQ => {
            let input = prepare_for_bob(source, &make_equatorial_state(0.0)?)?;
            let mut est = Vec::with_capacity(3);
            for (k, kind) in [
                StrategyKind::Plus,
                StrategyKind::Minus,
                StrategyKind::Mirrored,
            ]
            .into_iter()
            .enumerate()
            {
                let (bob, _) = clone_marginals(&kind.at(x)?, &input)?;
                est.push(sigma_z_estimate(&bob, mode, seed(k as u64))?);
            }
            Ok(assemble(x, &est, mode))
        }
        Experiment::Bb84 => {
            let config = Bb84Config {
                n_signals: spec.signals,
                strategy: spec.strategy.at(x)?,
                check_fraction: DEFAULT_CHECK_FRACTION,
                source: SourceModel::new(spec.source_visibility)?,
                seed: seed(0),
            };
            let r = run_bb84(&config)?;
            Ok(vec![
                x,
                r.qber_x,
                r.qber_y,
                r.sifted_x as f64,
                r.sifted_y as f64,
                r.check_rounds as f64,
                r.sigma_z_bias,
                r.bias_std_error,
                r.f_bob,
                r.f_eve,
                if r.verdict == Verdict::EveDetected {
                    1.0
                } else {
                    0.0
                },
            ])
        }
        Experiment::VerifyOptics => {
            let alpha = x.to_radians();
            let q = waveplate_to_q(alpha)?;
            let mut row = vec![x, q.value()];
            let mut worst = 0.0_f64;
            for variant in [SagnacVariant::Plus, SagnacVariant::Minus] {
                let u = compile_circuit(&sagnac_preset(alpha, variant)?)?;
                let eq = equivalent_up_to_local_phase(&u, &pcc_isometry(q, variant.orientation()))?;
                row.push(if eq.verdict { 1.0 } else { 0.0 });
                row.push(eq.residual);
                worst = worst.max(marginal_error(&u, q, variant)?);
            }
            row.push(worst);
            Ok(row)
        }
    }
}

fn metadata(spec: &SweepSpec, table: &mut ResultTable) {
    let e = spec.experiment;
    table.push_meta("tool", "pccsim");
    table.push_meta("version", env!("CARGO_PKG_VERSION"));
    table.push_meta("experiment", e.name());
    table.push_meta("grid_axis", e.grid_axis().name);
    table.push_meta("grid", crate::table::MetaValue::List(spec.grid.clone()));
    table.push_meta("angle_unit", "degrees");
    if e.uses_tomography() {
        match spec.mode {
            Mode::Exact => table.push_meta("mode", "exact"),
            Mode::Sampled { shots, repeats } => {
                table.push_meta("mode", "sampled");
                table.push_meta("shots", shots);
                table.push_meta("repeats", repeats as u64);
            }
        }
    }
    if e.uses_fixed_q() {
        table.push_meta("q", spec.q);
    }
    if e.uses_strategy() {
        table.push_meta("strategy", spec.strategy.name());
    }
    if e == Experiment::Bb84 {
        table.push_meta("signals", spec.signals as u64);
        table.push_meta("check_fraction", DEFAULT_CHECK_FRACTION);
    }
    table.push_meta("visibility", spec.source_visibility);
    table.push_meta("seed", spec.seed);
    table.push_meta("rng", RNG_NAME);
}

/// Evaluates every grid point in order. The whole spec is validated first.
pub fn run_sweep(spec: &SweepSpec) -> Result<ResultTable> {
    spec.validate()?;
    let source = make_source(&SourceModel::new(spec.source_visibility)?)?;
    let mut table = ResultTable::new(spec.experiment.columns(spec.mode));
    metadata(spec, &mut table);
    for (i, &x) in spec.grid.iter().enumerate() {
        table.push_row(row_for(spec, &source, i, x)?)?;
    }
    Ok(table)
}
