//! Entangled-source BB84 on the equator with a phase-covariant eavesdropper.
//!
//! The source emits `v·|Φ+><Φ+| + (1−v)·I/4` over (Alice, Bob). Alice
//! prepares Bob's photon remotely by projecting her own; for `|Φ+>` the
//! projection onto `|a>` leaves Bob in `|a*>`, so to send `|ψ>` Alice projects
//! onto `|ψ*>`. Eve clones Bob's photon on its way, then Bob measures X or Y
//! (sifted key rounds) or Z (the bias check).

use rand::Rng;
use rayon::prelude::*;

use crate::cloning::{clone_marginals, EveStrategy};
use crate::error::{check_range, Error, Result};
use crate::linalg::CMatrix;
use crate::qstate::{bloch_vector, fidelity_pure, make_equatorial_state, DensityMatrix, PureState};
use crate::scalar::Real;
use crate::tomography::{derive_seed, rng_for, Axis};

/// Werner-type source model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceModel<T> {
    visibility: T,
}

impl<T: Real> SourceModel<T> {
    pub fn new(visibility: T) -> Result<Self> {
        check_range("visibility", visibility.as_f64(), 0.0, 1.0)?;
        Ok(Self { visibility })
    }

    pub fn ideal() -> Self {
        Self {
            visibility: T::one(),
        }
    }

    pub fn visibility(&self) -> T {
        self.visibility
    }
}

/// `(|00> + |11>)/√2`
pub fn phi_plus<T: Real>() -> PureState<T> {
    let h = crate::scalar::re(T::FRAC_1_SQRT_2());
    let z = crate::scalar::re(T::zero());
    PureState::new(vec![h, z, z, h]).expect("normalized Bell state")
}

pub fn make_source<T: Real>(model: &SourceModel<T>) -> Result<DensityMatrix<T>> {
    let bell = phi_plus::<T>().density();
    let noise = DensityMatrix::maximally_mixed(2)?;
    bell.mix(model.visibility, &noise)
}

/// Bob's conditional state after Alice projects her half onto `alice_state`.
pub fn remote_prepare<T: Real>(
    source: &DensityMatrix<T>,
    alice_state: &PureState<T>,
) -> Result<(DensityMatrix<T>, T)> {
    if source.n_qubits() != 2 {
        return Err(Error::DimensionMismatch(source.dim(), 4));
    }
    if alice_state.n_qubits() != 1 {
        return Err(Error::DimensionMismatch(alice_state.dim(), 2));
    }
    let projector = alice_state.density().matrix().kron(&CMatrix::identity(2));
    let projected = projector.matmul(source.matrix()).matmul(&projector);
    let m = projected;
    // Tr_A with Alice as the high factor.
    let bob = CMatrix::from_fn(2, 2, |i, j| m[(i, j)] + m[(2 + i, 2 + j)]);
    let prob = bob.trace().re;
    if prob < T::lit(1e-12) {
        return Err(Error::ImpossibleProjection(prob.as_f64()));
    }
    Ok((DensityMatrix::new(bob.scale_real(T::one() / prob))?, prob))
}

/// Bob's state when Alice wants to send `target` through the given source.
pub fn prepare_for_bob<T: Real>(
    source: &DensityMatrix<T>,
    target: &PureState<T>,
) -> Result<DensityMatrix<T>> {
    Ok(remote_prepare(source, &target.conj())?.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Clean,
    EveDetected,
}

/// Default detection threshold in standard errors.
pub const DEFAULT_Z_THRESHOLD: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bb84Config<T> {
    pub n_signals: usize,
    pub strategy: EveStrategy<T>,
    /// Fraction of rounds Bob spends on the σz check instead of X/Y.
    pub check_fraction: T,
    pub source: SourceModel<T>,
    pub seed: u64,
}

impl<T: Real> Bb84Config<T> {
    pub fn new(n_signals: usize, strategy: EveStrategy<T>, seed: u64) -> Self {
        Self {
            n_signals,
            strategy,
            check_fraction: T::lit(0.1),
            source: SourceModel::ideal(),
            seed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bb84Report<T> {
    pub qber_x: T,
    pub qber_y: T,
    pub sifted_x: usize,
    pub sifted_y: usize,
    pub check_rounds: usize,
    pub sigma_z_bias: T,
    pub bias_std_error: T,
    pub f_bob: T,
    pub f_eve: T,
    pub verdict: Verdict,
}

/// Signals handled per independent random stream.
const BLOCK: usize = 4096;

/// Per-signal outcome probabilities for each of Alice's four states.
struct Channel {
    /// `[basis][bit][eve_plus]` -> P(Bob's outcome = +1) for X/Y and Z.
    p_plus_same: [[[f64; 2]; 2]; 2],
    p_plus_z: [[[f64; 2]; 2]; 2],
    /// Probability Eve uses PCC(+) on a round (1 for single-machine strategies).
    eve_plus: f64,
}

#[derive(Default, Clone, Copy)]
struct Tally {
    sifted: [u64; 2],
    errors: [u64; 2],
    z_plus: u64,
    z_minus: u64,
}

impl Tally {
    fn merge(mut self, o: Tally) -> Tally {
        for k in 0..2 {
            self.sifted[k] += o.sifted[k];
            self.errors[k] += o.errors[k];
        }
        self.z_plus += o.z_plus;
        self.z_minus += o.z_minus;
        self
    }
}

/// The four equatorial BB84 states: X basis phases {0, π}, Y basis {π/2, 3π/2}.
/// Bit 0 is the +1 eigenstate.
fn bb84_state<T: Real>(basis: usize, bit: usize) -> Result<PureState<T>> {
    let phi =
        T::FRAC_PI_2() * T::from_usize(basis).unwrap() + T::PI() * T::from_usize(bit).unwrap();
    make_equatorial_state(phi)
}

fn basis_axis(basis: usize) -> Axis {
    if basis == 0 {
        Axis::X
    } else {
        Axis::Y
    }
}

fn build_channel<T: Real>(config: &Bb84Config<T>, source: &DensityMatrix<T>) -> Result<Channel> {
    let (machines, eve_plus) = match config.strategy {
        EveStrategy::RandomMirrored { q, p_plus } => (
            [EveStrategy::PccPlus(q), EveStrategy::PccMinus(q)],
            p_plus.value().as_f64(),
        ),
        s => ([s, s], 1.0),
    };
    let mut ch = Channel {
        p_plus_same: [[[0.0; 2]; 2]; 2],
        p_plus_z: [[[0.0; 2]; 2]; 2],
        eve_plus,
    };
    for basis in 0..2 {
        for bit in 0..2 {
            let bob_in = prepare_for_bob(source, &bb84_state::<T>(basis, bit)?)?;
            for (m, strategy) in machines.iter().enumerate() {
                let (bob, _) = clone_marginals(strategy, &bob_in)?;
                let v = bloch_vector(&bob)?;
                let e = basis_axis(basis).component(&v).as_f64();
                ch.p_plus_same[basis][bit][m] = (0.5 * (1.0 + e)).clamp(0.0, 1.0);
                ch.p_plus_z[basis][bit][m] = (0.5 * (1.0 + v.z.as_f64())).clamp(0.0, 1.0);
            }
        }
    }
    Ok(ch)
}

fn run_block<T: Real>(config: &Bb84Config<T>, ch: &Channel, block: usize) -> Tally {
    let mut rng = rng_for(derive_seed(config.seed, &[block as u64]));
    let start = block * BLOCK;
    let end = (start + BLOCK).min(config.n_signals);
    let check = config.check_fraction.as_f64();
    let mut t = Tally::default();
    for _ in start..end {
        let basis = rng.random_range(0..2usize);
        let bit = rng.random_range(0..2usize);
        let machine = if rng.random::<f64>() < ch.eve_plus {
            0
        } else {
            1
        };
        if rng.random::<f64>() < check {
            if rng.random::<f64>() < ch.p_plus_z[basis][bit][machine] {
                t.z_plus += 1;
            } else {
                t.z_minus += 1;
            }
        } else {
            let bob_basis = rng.random_range(0..2usize);
            let outcome_plus = rng.random::<f64>() < ch.p_plus_same[basis][bit][machine];
            if bob_basis == basis {
                t.sifted[basis] += 1;
                // bit 0 is the +1 eigenstate
                if outcome_plus != (bit == 0) {
                    t.errors[basis] += 1;
                }
            }
        }
    }
    t
}

/// Exact Bob/Eve fidelities averaged over Alice's four states.
pub fn exact_clone_fidelities<T: Real>(
    strategy: &EveStrategy<T>,
    source: &SourceModel<T>,
) -> Result<(T, T)> {
    let rho = make_source(source)?;
    let (mut fb, mut fe) = (T::zero(), T::zero());
    for basis in 0..2 {
        for bit in 0..2 {
            let psi = bb84_state::<T>(basis, bit)?;
            let (bob, eve) = clone_marginals(strategy, &prepare_for_bob(&rho, &psi)?)?;
            fb = fb + fidelity_pure(&psi, &bob)?;
            fe = fe + fidelity_pure(&psi, &eve)?;
        }
    }
    let four = T::lit(4.0);
    Ok((fb / four, fe / four))
}

/// Simulates `n_signals` rounds. Deterministic in `config.seed`.
pub fn run_bb84<T: Real>(config: &Bb84Config<T>) -> Result<Bb84Report<T>> {
    if config.n_signals == 0 {
        return Err(Error::NoSignals);
    }
    check_range("check_fraction", config.check_fraction.as_f64(), 0.0, 1.0)?;
    let source = make_source(&config.source)?;
    let ch = build_channel(config, &source)?;
    let blocks = config.n_signals.div_ceil(BLOCK);
    let t = (0..blocks)
        .into_par_iter()
        .map(|b| run_block(config, &ch, b))
        .reduce(Tally::default, Tally::merge);

    let rate = |e: u64, n: u64| if n == 0 { 0.0 } else { e as f64 / n as f64 };
    let n_check = t.z_plus + t.z_minus;
    let (bias, bias_se) = match n_check {
        0 => (0.0, 0.0),
        1 => (if t.z_plus == 1 { 1.0 } else { -1.0 }, 0.0),
        n => {
            let nf = n as f64;
            let m = (t.z_plus as f64 - t.z_minus as f64) / nf;
            // sample variance of ±1 outcomes
            let var = (1.0 - m * m) * nf / (nf - 1.0);
            (m, (var / nf).sqrt())
        }
    };
    let (f_bob, f_eve) = exact_clone_fidelities(&config.strategy, &config.source)?;
    let mut report = Bb84Report {
        qber_x: T::lit(rate(t.errors[0], t.sifted[0])),
        qber_y: T::lit(rate(t.errors[1], t.sifted[1])),
        sifted_x: t.sifted[0] as usize,
        sifted_y: t.sifted[1] as usize,
        check_rounds: n_check as usize,
        sigma_z_bias: T::lit(bias),
        bias_std_error: T::lit(bias_se),
        f_bob,
        f_eve,
        verdict: Verdict::Clean,
    };
    report.verdict = if bias_se > 0.0 {
        detect_bias(&report, T::lit(DEFAULT_Z_THRESHOLD))?
    } else if bias != 0.0 {
        // Every check outcome agreed: a deterministic nonzero σz.
        Verdict::EveDetected
    } else {
        Verdict::Clean
    };
    Ok(report)
}

/// `EveDetected` iff `|bias| > z_threshold · bias_std_error`.
pub fn detect_bias<T: Real>(report: &Bb84Report<T>, z_threshold: T) -> Result<Verdict> {
    if report.bias_std_error.partial_cmp(&T::zero()) != Some(std::cmp::Ordering::Greater) {
        return Err(Error::ZeroStdError);
    }
    Ok(
        if report.sigma_z_bias.abs() > z_threshold * report.bias_std_error {
            Verdict::EveDetected
        } else {
            Verdict::Clean
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cloning::CloningParameter;
    use crate::qstate::make_polar_state;
    use crate::scalar::c;
    use std::f64::consts::PI;

    fn q(v: f64) -> CloningParameter<f64> {
        CloningParameter::new(v).unwrap()
    }

    #[test]
    fn source_examples() {
        let ideal = make_source(&SourceModel::<f64>::ideal()).unwrap();
        assert!((ideal.purity() - 1.0).abs() < 1e-12);
        let white = make_source(&SourceModel::new(0.0).unwrap()).unwrap();
        assert!(white.max_abs_diff(&DensityMatrix::maximally_mixed(2).unwrap()) < 1e-15);
        assert!(SourceModel::new(1.2).is_err());

        let noisy = make_source(&SourceModel::new(0.95_f64).unwrap()).unwrap();
        let d = make_equatorial_state(0.0).unwrap();
        let (bob, _) = remote_prepare(&noisy, &d).unwrap();
        assert!((fidelity_pure(&d, &bob).unwrap() - 0.975).abs() < 1e-12);
    }

    #[test]
    fn remote_preparation_examples() {
        let bell = make_source(&SourceModel::<f64>::ideal()).unwrap();
        let d = make_equatorial_state(0.0).unwrap();
        let (bob, p) = remote_prepare(&bell, &d).unwrap();
        assert!(bob.max_abs_diff(&d.density()) < 1e-12 && (p - 0.5).abs() < 1e-12);

        let (bob, p) = remote_prepare(&bell, &PureState::zero()).unwrap();
        assert!(bob.max_abs_diff(&PureState::zero().density()) < 1e-12 && (p - 0.5).abs() < 1e-12);

        // (<0| - i<1|)/√2 on Alice's side of (|00> + |11>)/√2 leaves
        // Bob with (|0> - i|1>)/2, i.e. the conjugate state.
        let plus_i = make_equatorial_state(PI / 2.0).unwrap();
        let (bob, _) = remote_prepare(&bell, &plus_i).unwrap();
        let minus_i =
            PureState::new(vec![c(0.5_f64.sqrt(), 0.0), c(0.0, -0.5_f64.sqrt())]).unwrap();
        assert!(bob.max_abs_diff(&minus_i.density()) < 1e-12);

        for t in [0.1, 0.5, 1.2] {
            let a = make_polar_state(t).unwrap();
            let (bob, _) = remote_prepare(&bell, &a).unwrap();
            assert!(bob.max_abs_diff(&a.density()) < 1e-12);
        }
    }

    #[test]
    fn no_attack_is_error_free() {
        let r = run_bb84(&Bb84Config::<f64>::new(20_000, EveStrategy::NoAttack, 5)).unwrap();
        assert_eq!((r.qber_x, r.qber_y), (0.0, 0.0));
        assert_eq!(r.f_bob, 1.0);
        assert_eq!(r.verdict, Verdict::Clean);
        assert!(r.sigma_z_bias.abs() < 5.0 * r.bias_std_error);
    }

    #[test]
    fn symmetric_attack_qber() {
        let n = 100_000;
        let r = run_bb84(&Bb84Config::new(n, EveStrategy::PccPlus(q(0.5)), 11)).unwrap();
        let expected = 0.5 * (1.0 - 0.5_f64.sqrt());
        for (qber, sifted) in [(r.qber_x, r.sifted_x), (r.qber_y, r.sifted_y)] {
            let se = (expected * (1.0 - expected) / sifted as f64).sqrt();
            assert!((qber - expected).abs() < 3.0 * se, "{qber} vs {expected}");
        }
        assert!((r.f_bob - (1.0 - expected)).abs() < 1e-12);
        assert_eq!(r.verdict, Verdict::EveDetected);
    }

    #[test]
    fn report_is_seed_deterministic() {
        let cfg = Bb84Config::new(10_000, EveStrategy::balanced(q(0.7)), 99);
        assert_eq!(run_bb84(&cfg).unwrap(), run_bb84(&cfg).unwrap());
        assert_eq!(
            run_bb84(&Bb84Config::<f64>::new(0, EveStrategy::NoAttack, 1)),
            Err(Error::NoSignals)
        );
    }

    #[test]
    fn detection_rule() {
        let mut r = run_bb84(&Bb84Config::<f64>::new(1000, EveStrategy::NoAttack, 1)).unwrap();
        r.sigma_z_bias = 0.5;
        r.bias_std_error = 0.05;
        assert_eq!(detect_bias(&r, 5.0).unwrap(), Verdict::EveDetected);
        assert_eq!(detect_bias(&r, 20.0).unwrap(), Verdict::Clean);
        r.bias_std_error = 0.0;
        assert_eq!(detect_bias(&r, 5.0), Err(Error::ZeroStdError));
    }
}
