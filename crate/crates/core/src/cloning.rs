//! Asymmetric phase-covariant cloners PCC(+) and PCC(−).
//!
//! Both machines are two-qubit isometries from Bob's input qubit into the
//! (Bob, Eve) pair with Eve's qubit starting in `|0>`:
//!
//! ```text
//! PCC(+):  |0> -> |00>                 |1> -> √(1−q)|10> + √q|01>
//! PCC(−):  |1> -> |10>                 |0> -> √(1−q)|00> + √q|11>
//! ```
//!
//! For equatorial inputs the clone fidelities are `F_B = (1 + √(1−q))/2` and
//! `F_E = (1 + √q)/2` for either orientation; PCC(+) pulls Bob's Bloch vector
//! towards `|0>` (`<σz> = q`) and PCC(−) towards `|1>` (`<σz> = −q`).
//!
//! PCC(−) only flips Bob's qubit around PCC(+), so Eve's raw qubit holds a
//! bit-flipped copy (`X|ψ>`, which is `|ψ*>` on the equator). Eve knows which
//! machine she ran and reads her qubit in the matching frame
//! ([`Orientation::eve_frame`]); [`clone_marginals`] reports her clone in that
//! frame, while [`strategy_output`] and [`partial_trace`] give the raw joint
//! state.

use num_traits::Zero;

use crate::error::{check_finite, check_range, Error, Result};
use crate::linalg::{inner, pauli_x, CMatrix};
use crate::qstate::{
    bloch_vector, make_equatorial_state, partial_trace, DensityMatrix, PureState, Subsystem, Tensor,
};
use crate::scalar::{re, Real, C};

/// Fidelity of the optimal universal 1 -> 2 qubit cloner.
pub const UNIVERSAL_CLONER_FIDELITY: f64 = 5.0 / 6.0;

/// Asymmetry `q ∈ [0, 1]`; `q = 0.5` is the symmetric machine.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct CloningParameter<T>(T);

impl<T: Real> CloningParameter<T> {
    pub fn new(q: T) -> Result<Self> {
        check_range("q", q.as_f64(), 0.0, 1.0)?;
        Ok(Self(q))
    }

    pub fn value(self) -> T {
        self.0
    }
}

/// Probability weight in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Probability<T>(T);

impl<T: Real> Probability<T> {
    pub fn new(p: T) -> Result<Self> {
        check_range("probability", p.as_f64(), 0.0, 1.0)?;
        Ok(Self(p))
    }

    pub fn half() -> Self {
        Self(T::lit(0.5))
    }

    pub fn value(self) -> T {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    /// Shrinks towards `|0>`.
    Plus,
    /// Shrinks towards `|1>`.
    Minus,
}

impl Orientation {
    pub fn mirrored(self) -> Self {
        match self {
            Self::Plus => Self::Minus,
            Self::Minus => Self::Plus,
        }
    }

    /// Local unitary Eve applies to her qubit before reading it out:
    /// identity for PCC(+), a bit flip for PCC(−).
    pub fn eve_frame<T: Real>(self) -> CMatrix<T> {
        match self {
            Self::Plus => CMatrix::identity(2),
            Self::Minus => pauli_x(),
        }
    }
}

/// A 4x2 isometry from one qubit into the (Bob, Eve) space.
#[derive(Debug, Clone, PartialEq)]
pub struct CloningIsometry<T> {
    matrix: CMatrix<T>,
    orientation: Orientation,
}

impl<T: Real> CloningIsometry<T> {
    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    /// Image of the input basis state `|index>`.
    pub fn column(&self, index: usize) -> Vec<C<T>> {
        self.matrix.col(index)
    }

    pub fn apply_pure(&self, input: &PureState<T>) -> Result<PureState<T>> {
        if input.n_qubits() != 1 {
            return Err(Error::DimensionMismatch(input.dim(), 2));
        }
        PureState::new(self.matrix.apply(input.amplitudes()))
    }

    /// Extends the isometry to a 4x4 unitary acting on `input ⊗ |0>_path`:
    /// column `2i` is the image of `|i>`, the odd columns complete an
    /// orthonormal basis.
    pub fn embed_unitary(&self) -> CMatrix<T> {
        let mut cols: Vec<Vec<C<T>>> = vec![self.column(0), self.column(1)];
        for k in 0..4 {
            if cols.len() == 4 {
                break;
            }
            let mut v = vec![C::zero(); 4];
            v[k] = re(T::one());
            for u in &cols {
                let proj = inner(u, &v);
                for (vi, ui) in v.iter_mut().zip(u) {
                    *vi = *vi - *ui * proj;
                }
            }
            let n = crate::linalg::norm_sqr(&v).sqrt();
            if n > T::lit(1e-6) {
                cols.push(v.into_iter().map(|z| z / re(n)).collect());
            }
        }
        let order = [0usize, 2, 1, 3];
        CMatrix::from_fn(4, 4, |i, j| {
            let src = order
                .iter()
                .position(|&o| o == j)
                .expect("column permutation");
            cols[src][i]
        })
    }
}

/// Builds PCC(+) or PCC(−) at asymmetry `q`.
pub fn pcc_isometry<T: Real>(
    q: CloningParameter<T>,
    orientation: Orientation,
) -> CloningIsometry<T> {
    let keep = (T::one() - q.0).sqrt();
    let leak = q.0.sqrt();
    let z = T::zero();
    let o = T::one();
    // rows: |00>, |01>, |10>, |11>  (Bob, Eve)
    let matrix = match orientation {
        Orientation::Plus => CMatrix::from_real_rows(&[[o, z], [z, leak], [z, keep], [z, z]]),
        Orientation::Minus => CMatrix::from_real_rows(&[[keep, z], [z, z], [z, o], [leak, z]]),
    };
    CloningIsometry {
        matrix,
        orientation,
    }
}

/// PCC(−) assembled as `(X_B ⊗ I_E) · PCC(+) · X`.
pub fn mirrored_via_bitflips<T: Real>(q: CloningParameter<T>) -> CloningIsometry<T> {
    let x = pauli_x::<T>();
    let x_bob = x.kron(&CMatrix::identity(2));
    let plus = pcc_isometry(q, Orientation::Plus);
    CloningIsometry {
        matrix: x_bob.matmul(&plus.matrix).matmul(&x),
        orientation: Orientation::Minus,
    }
}

/// `V ρ V†` on a single-qubit input.
pub fn apply_cloner<T: Real>(
    iso: &CloningIsometry<T>,
    input: &DensityMatrix<T>,
) -> Result<DensityMatrix<T>> {
    if input.n_qubits() != 1 {
        return Err(Error::DimensionMismatch(input.dim(), 2));
    }
    DensityMatrix::new(iso.matrix.conjugate(input.matrix()))
}

/// Closed-form `(F_B, F_E)` for equatorial inputs.
pub fn analytic_fidelities<T: Real>(q: CloningParameter<T>) -> (T, T) {
    let half = T::lit(0.5);
    (
        half * (T::one() + (T::one() - q.0).sqrt()),
        half * (T::one() + q.0.sqrt()),
    )
}

/// `q = sin²(2α)` for the rotating half-wave plate at physical angle `α`.
pub fn waveplate_to_q<T: Real>(alpha: T) -> Result<CloningParameter<T>> {
    check_finite("alpha", alpha.as_f64())?;
    let s = (alpha + alpha).sin();
    // sin² can overshoot 1 by an ulp.
    Ok(CloningParameter((s * s).min(T::one())))
}

/// What Eve does to each signal on its way to Bob.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EveStrategy<T> {
    NoAttack,
    PccPlus(CloningParameter<T>),
    PccMinus(CloningParameter<T>),
    /// PCC(+) with probability `p_plus`, PCC(−) otherwise.
    RandomMirrored {
        q: CloningParameter<T>,
        p_plus: Probability<T>,
    },
}

impl<T: Real> EveStrategy<T> {
    /// Balanced alternation between the two mirrored machines.
    pub fn balanced(q: CloningParameter<T>) -> Self {
        Self::RandomMirrored {
            q,
            p_plus: Probability::half(),
        }
    }

    pub fn q(&self) -> Option<CloningParameter<T>> {
        match *self {
            Self::NoAttack => None,
            Self::PccPlus(q) | Self::PccMinus(q) | Self::RandomMirrored { q, .. } => Some(q),
        }
    }
}

/// Joint (Bob, Eve) state after Eve's strategy, as an ensemble average.
pub fn strategy_output<T: Real>(
    strategy: &EveStrategy<T>,
    input: &DensityMatrix<T>,
) -> Result<DensityMatrix<T>> {
    match *strategy {
        EveStrategy::NoAttack => {
            if input.n_qubits() != 1 {
                return Err(Error::DimensionMismatch(input.dim(), 2));
            }
            input.tensor(&PureState::zero().density())
        }
        EveStrategy::PccPlus(q) => apply_cloner(&pcc_isometry(q, Orientation::Plus), input),
        EveStrategy::PccMinus(q) => apply_cloner(&pcc_isometry(q, Orientation::Minus), input),
        EveStrategy::RandomMirrored { q, p_plus } => {
            let plus = apply_cloner(&pcc_isometry(q, Orientation::Plus), input)?;
            let minus = apply_cloner(&pcc_isometry(q, Orientation::Minus), input)?;
            plus.mix(p_plus.value(), &minus)
        }
    }
}

/// Eve's clone from a raw joint output of the `orientation` machine, in her readout frame.
pub fn eve_readout<T: Real>(
    joint: &DensityMatrix<T>,
    orientation: Orientation,
) -> Result<DensityMatrix<T>> {
    partial_trace(joint, Subsystem::Eve)?.evolve(&orientation.eve_frame())
}

/// Bob's reduced state and Eve's clone (in her readout frame) after the strategy.
///
/// Under `RandomMirrored` Eve knows the machine used on each round, so her
/// clone is the mixture of the per-machine readouts.
pub fn clone_marginals<T: Real>(
    strategy: &EveStrategy<T>,
    input: &DensityMatrix<T>,
) -> Result<(DensityMatrix<T>, DensityMatrix<T>)> {
    let single = |orientation: Orientation, q: CloningParameter<T>| -> Result<_> {
        let joint = apply_cloner(&pcc_isometry(q, orientation), input)?;
        Ok((
            partial_trace(&joint, Subsystem::Bob)?,
            eve_readout(&joint, orientation)?,
        ))
    };
    match *strategy {
        EveStrategy::NoAttack => {
            let joint = strategy_output(strategy, input)?;
            Ok((
                partial_trace(&joint, Subsystem::Bob)?,
                partial_trace(&joint, Subsystem::Eve)?,
            ))
        }
        EveStrategy::PccPlus(q) => single(Orientation::Plus, q),
        EveStrategy::PccMinus(q) => single(Orientation::Minus, q),
        EveStrategy::RandomMirrored { q, p_plus } => {
            let (bp, ep) = single(Orientation::Plus, q)?;
            let (bm, em) = single(Orientation::Minus, q)?;
            let w = p_plus.value();
            Ok((bp.mix(w, &bm)?, ep.mix(w, &em)?))
        }
    }
}

/// `<σz>` of Bob's clone of the equatorial state at phase `phi`.
pub fn bob_sigma_z_bias<T: Real>(strategy: &EveStrategy<T>, phi: T) -> Result<T> {
    let psi = make_equatorial_state(phi)?;
    let (bob, _) = clone_marginals(strategy, &psi.density())?;
    Ok(bloch_vector(&bob)?.z)
}
