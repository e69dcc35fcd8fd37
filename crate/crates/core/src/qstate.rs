//! Pure and mixed states of one and two qubits.
//!
//! Basis order is `|0> = |H>`, `|1> = |V>`. Joint objects are ordered
//! (Bob, Eve): the first tensor factor is Bob's qubit and occupies the most
//! significant index bit, so the two-qubit basis is `{00, 01, 10, 11}` with
//! the left digit belonging to Bob.

use num_traits::{One, Zero};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{check_finite, Error, Result};
use crate::linalg::{inner, kron_vec, norm_sqr, pauli_x, pauli_y, pauli_z, CMatrix};
use crate::scalar::{c, is_finite, re, Real, C};

/// Largest register the state types accept. Public operations stay at two
/// qubits; larger registers only appear as intermediate Kronecker products.
pub const MAX_QUBITS: usize = 4;

/// Which half of a (Bob, Eve) pair to keep in a partial trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Subsystem {
    Bob,
    Eve,
}

fn qubits_for_dim(dim: usize) -> Result<usize> {
    if dim.is_power_of_two() && dim >= 2 {
        let n = dim.trailing_zeros() as usize;
        if n <= MAX_QUBITS {
            return Ok(n);
        }
    }
    Err(Error::BadDimension {
        expected: format!("2^n with 1 <= n <= {MAX_QUBITS}"),
        got: dim,
    })
}

/// A normalized state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState<T> {
    n_qubits: usize,
    amplitudes: Vec<C<T>>,
}

impl<T: Real> PureState<T> {
    pub fn new(amplitudes: Vec<C<T>>) -> Result<Self> {
        let n_qubits = qubits_for_dim(amplitudes.len())?;
        if !amplitudes.iter().all(|&a| is_finite(a)) {
            return Err(Error::NonFinite("amplitudes"));
        }
        let norm = norm_sqr(&amplitudes);
        if (norm - T::one()).abs() > T::invariant_tol() {
            return Err(Error::NotNormalized(norm.as_f64()));
        }
        Ok(Self {
            n_qubits,
            amplitudes,
        })
    }

    /// Normalizes `amplitudes` first; rejects the zero vector.
    pub fn normalized(amplitudes: Vec<C<T>>) -> Result<Self> {
        let norm = norm_sqr(&amplitudes).sqrt();
        if !norm.is_finite() {
            return Err(Error::NonFinite("amplitudes"));
        }
        if norm <= T::epsilon() {
            return Err(Error::NotNormalized(0.0));
        }
        Self::new(amplitudes.into_iter().map(|a| a / re(norm)).collect())
    }

    /// Computational basis state `|index>` on `n_qubits`.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        let dim = 1usize << n_qubits.min(MAX_QUBITS + 1);
        qubits_for_dim(dim)?;
        if index >= dim {
            return Err(Error::BadDimension {
                expected: format!("index < {dim}"),
                got: index,
            });
        }
        let mut amps = vec![C::zero(); dim];
        amps[index] = C::one();
        Self::new(amps)
    }

    pub fn zero() -> Self {
        Self::from_pair(C::one(), C::zero())
    }

    pub fn one() -> Self {
        Self::from_pair(C::zero(), C::one())
    }

    fn from_pair(a: C<T>, b: C<T>) -> Self {
        Self {
            n_qubits: 1,
            amplitudes: vec![a, b],
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C<T>] {
        &self.amplitudes
    }

    /// Orthogonal single-qubit state `(-b*, a*)`.
    pub fn orthogonal(&self) -> Result<Self> {
        if self.n_qubits != 1 {
            return Err(Error::DimensionMismatch(self.dim(), 2));
        }
        let (a, b) = (self.amplitudes[0], self.amplitudes[1]);
        Ok(Self::from_pair(-b.conj(), a.conj()))
    }

    /// Componentwise complex conjugate in the computational basis.
    pub fn conj(&self) -> Self {
        Self {
            n_qubits: self.n_qubits,
            amplitudes: self.amplitudes.iter().map(|a| a.conj()).collect(),
        }
    }

    pub fn density(&self) -> DensityMatrix<T> {
        DensityMatrix {
            n_qubits: self.n_qubits,
            entries: CMatrix::outer(&self.amplitudes, &self.amplitudes),
        }
    }

    pub fn bloch_vector(&self) -> Result<BlochVector<T>> {
        bloch_vector(&self.density())
    }
}

/// `(|0> + e^{i phi}|1>)/sqrt(2)`.
pub fn make_equatorial_state<T: Real>(phi: T) -> Result<PureState<T>> {
    check_finite("phi", phi.as_f64())?;
    let h = T::FRAC_1_SQRT_2();
    let (s, cs) = phi.sin_cos();
    Ok(PureState::from_pair(re(h), c(h * cs, h * s)))
}

/// `cos(2 theta)|H> + sin(2 theta)|V>`.
pub fn make_polar_state<T: Real>(theta: T) -> Result<PureState<T>> {
    check_finite("theta", theta.as_f64())?;
    let (s, cs) = (theta + theta).sin_cos();
    Ok(PureState::from_pair(re(cs), re(s)))
}

/// A Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<T> {
    n_qubits: usize,
    entries: CMatrix<T>,
}

impl<T: Real> DensityMatrix<T> {
    /// Validates every density-matrix invariant at `T::invariant_tol()`.
    pub fn new(entries: CMatrix<T>) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::BadDimension {
                expected: "square matrix".into(),
                got: entries.cols(),
            });
        }
        let n_qubits = qubits_for_dim(entries.rows())?;
        if !entries.is_finite() {
            return Err(Error::NonFinite("density matrix"));
        }
        let tol = T::invariant_tol();
        let herm = entries.hermiticity_defect();
        if herm > tol {
            return Err(Error::NotHermitian(herm.as_f64()));
        }
        let tr = entries.trace();
        if (tr.re - T::one()).abs() > tol || tr.im.abs() > tol {
            return Err(Error::BadTrace(tr.re.as_f64()));
        }
        let min_ev = entries.hermitian_eigenvalues()[0];
        if min_ev < -tol {
            return Err(Error::NotPositive(min_ev.as_f64()));
        }
        Ok(Self { n_qubits, entries })
    }

    /// `I / 2^n`
    pub fn maximally_mixed(n_qubits: usize) -> Result<Self> {
        let dim = 1usize << n_qubits.min(MAX_QUBITS + 1);
        qubits_for_dim(dim)?;
        let w = T::one() / T::from_usize(dim).expect("small dimension");
        Ok(Self {
            n_qubits,
            entries: CMatrix::identity(dim).scale_real(w),
        })
    }

    /// `(I + x σx + y σy + z σz) / 2`; rejects vectors outside the Bloch ball.
    pub fn from_bloch(v: BlochVector<T>) -> Result<Self> {
        Self::new(bloch_matrix(v))
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.entries.rows()
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.entries
    }

    pub fn into_matrix(self) -> CMatrix<T> {
        self.entries
    }

    pub fn purity(&self) -> T {
        self.entries.matmul(&self.entries).trace().re
    }

    /// `Tr(ρ · op)` (real part; `op` is expected Hermitian).
    pub fn expectation(&self, op: &CMatrix<T>) -> Result<T> {
        if op.rows() != self.dim() || op.cols() != self.dim() {
            return Err(Error::DimensionMismatch(op.rows(), self.dim()));
        }
        Ok(self.entries.matmul(op).trace().re)
    }

    /// Convex combination `w·self + (1-w)·other`.
    pub fn mix(&self, w: T, other: &Self) -> Result<Self> {
        crate::error::check_range("mixture weight", w.as_f64(), 0.0, 1.0)?;
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(self.dim(), other.dim()));
        }
        let m = &self.entries.scale_real(w) + &other.entries.scale_real(T::one() - w);
        Self::new(m)
    }

    /// `U ρ U†` for a unitary of matching size.
    pub fn evolve(&self, u: &CMatrix<T>) -> Result<Self> {
        if u.cols() != self.dim() {
            return Err(Error::DimensionMismatch(u.cols(), self.dim()));
        }
        Self::new(u.conjugate(&self.entries))
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.entries.max_abs_diff(&other.entries)
    }
}

impl<T: Real> From<&PureState<T>> for DensityMatrix<T> {
    fn from(psi: &PureState<T>) -> Self {
        psi.density()
    }
}

impl<T: Real> From<PureState<T>> for DensityMatrix<T> {
    fn from(psi: PureState<T>) -> Self {
        psi.density()
    }
}

/// Kronecker composition; the left operand becomes the high (Bob) factor.
pub trait Tensor: Sized {
    fn tensor(&self, rhs: &Self) -> Result<Self>;
}

impl<T: Real> Tensor for PureState<T> {
    fn tensor(&self, rhs: &Self) -> Result<Self> {
        if self.n_qubits + rhs.n_qubits > MAX_QUBITS {
            return Err(Error::BadDimension {
                expected: format!("at most {MAX_QUBITS} qubits"),
                got: self.n_qubits + rhs.n_qubits,
            });
        }
        Ok(Self {
            n_qubits: self.n_qubits + rhs.n_qubits,
            amplitudes: kron_vec(&self.amplitudes, &rhs.amplitudes),
        })
    }
}

impl<T: Real> Tensor for DensityMatrix<T> {
    fn tensor(&self, rhs: &Self) -> Result<Self> {
        if self.n_qubits + rhs.n_qubits > MAX_QUBITS {
            return Err(Error::BadDimension {
                expected: format!("at most {MAX_QUBITS} qubits"),
                got: self.n_qubits + rhs.n_qubits,
            });
        }
        Ok(Self {
            n_qubits: self.n_qubits + rhs.n_qubits,
            entries: self.entries.kron(&rhs.entries),
        })
    }
}

pub fn tensor_product<S: Tensor>(a: &S, b: &S) -> Result<S> {
    a.tensor(b)
}

/// Reduced state of one half of a (Bob, Eve) pair.
pub fn partial_trace<T: Real>(rho: &DensityMatrix<T>, keep: Subsystem) -> Result<DensityMatrix<T>> {
    if rho.n_qubits != 2 {
        return Err(Error::BadDimension {
            expected: "4 (two qubits)".into(),
            got: rho.dim(),
        });
    }
    let m = &rho.entries;
    let reduced = CMatrix::from_fn(2, 2, |i, j| match keep {
        Subsystem::Bob => m[(2 * i, 2 * j)] + m[(2 * i + 1, 2 * j + 1)],
        Subsystem::Eve => m[(i, j)] + m[(2 + i, 2 + j)],
    });
    DensityMatrix::new(reduced)
}

/// `<ψ|ρ|ψ>`, clamped to `[0, 1]` against rounding.
pub fn fidelity_pure<T: Real>(psi: &PureState<T>, rho: &DensityMatrix<T>) -> Result<T> {
    if psi.dim() != rho.dim() {
        return Err(Error::DimensionMismatch(psi.dim(), rho.dim()));
    }
    let f = inner(psi.amplitudes(), &rho.entries.apply(psi.amplitudes())).re;
    Ok(f.max(T::zero()).min(T::one()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Real> BlochVector<T> {
    pub fn new(x: T, y: T, z: T) -> Self {
        Self { x, y, z }
    }

    pub fn norm(&self) -> T {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn scaled(&self, k: T) -> Self {
        Self::new(self.x * k, self.y * k, self.z * k)
    }

    pub fn distance(&self, other: &Self) -> T {
        let (dx, dy, dz) = (self.x - other.x, self.y - other.y, self.z - other.z);
        (dx * dx + dy * dy + dz * dz).sqrt()
    }

    pub fn components(&self) -> [T; 3] {
        [self.x, self.y, self.z]
    }
}

/// Pauli expectations `(<σx>, <σy>, <σz>)` of a single-qubit state.
pub fn bloch_vector<T: Real>(rho: &DensityMatrix<T>) -> Result<BlochVector<T>> {
    if rho.n_qubits != 1 {
        return Err(Error::BadDimension {
            expected: "2 (one qubit)".into(),
            got: rho.dim(),
        });
    }
    let m = &rho.entries;
    let two = T::lit(2.0);
    Ok(BlochVector::new(
        two * m[(0, 1)].re,
        -two * m[(0, 1)].im,
        m[(0, 0)].re - m[(1, 1)].re,
    ))
}

/// `(I + x σx + y σy + z σz) / 2` without any physicality check.
pub fn bloch_matrix<T: Real>(v: BlochVector<T>) -> CMatrix<T> {
    let half = T::lit(0.5);
    let mut m = CMatrix::identity(2);
    for (k, p) in [(v.x, pauli_x()), (v.y, pauli_y()), (v.z, pauli_z())] {
        m = &m + &p.scale_real(k);
    }
    m.scale_real(half)
}

/// Haar-random pure state from normalized Gaussian amplitudes.
pub fn random_pure_state<T: Real, R: Rng + ?Sized>(
    n_qubits: usize,
    rng: &mut R,
) -> Result<PureState<T>> {
    let dim = 1usize << n_qubits.min(MAX_QUBITS + 1);
    qubits_for_dim(dim)?;
    let amps = (0..dim)
        .map(|_| {
            let a: f64 = rng.sample(StandardNormal);
            let b: f64 = rng.sample(StandardNormal);
            c(T::lit(a), T::lit(b))
        })
        .collect();
    PureState::normalized(amps)
}

/// Random single-qubit mixed state: trace out one half of a random two-qubit pure state.
pub fn random_density_matrix<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Result<DensityMatrix<T>> {
    let joint = random_pure_state::<T, R>(2, rng)?;
    partial_trace(&joint.density(), Subsystem::Bob)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn equatorial_examples() {
        let d = make_equatorial_state(0.0_f64).unwrap();
        assert!(close(d.amplitudes()[0].re, FRAC_1_SQRT_2, 1e-15));
        assert!(close(d.amplitudes()[1].re, FRAC_1_SQRT_2, 1e-15));

        let p = make_equatorial_state(PI / 2.0).unwrap();
        assert!(close(p.amplitudes()[1].im, FRAC_1_SQRT_2, 1e-15));
        assert!(close(p.amplitudes()[1].re, 0.0, 1e-15));

        // ρ = |ψ><ψ| with ψ = (1, -1)/√2 has <σx> = -1; computed from Tr(ρσ) directly.
        let m = make_equatorial_state(PI).unwrap().density();
        let ex = m.expectation(&pauli_x()).unwrap();
        let ey = m.expectation(&pauli_y()).unwrap();
        let ez = m.expectation(&pauli_z()).unwrap();
        let b = bloch_vector(&m).unwrap();
        assert!(close(ex, -1.0, 1e-15) && close(b.x, ex, 1e-15));
        assert!(close(ey, 0.0, 1e-15) && close(b.y, ey, 1e-15));
        assert!(close(ez, 0.0, 1e-15) && close(b.z, ez, 1e-15));
    }

    #[test]
    fn non_finite_angles_rejected() {
        assert_eq!(
            make_equatorial_state(f64::NAN),
            Err(Error::NonFinite("phi"))
        );
        assert_eq!(
            make_polar_state(f64::INFINITY),
            Err(Error::NonFinite("theta"))
        );
    }

    #[test]
    #[allow(clippy::approx_constant)]
    fn polar_examples() {
        let h = make_polar_state(0.0_f64).unwrap();
        assert_eq!(h.amplitudes()[0], c(1.0, 0.0));
        let v = make_polar_state(PI / 4.0).unwrap();
        assert!(close(v.amplitudes()[0].re, 0.0, 1e-15));
        assert!(close(v.amplitudes()[1].re, 1.0, 1e-15));
        let d = make_polar_state(PI / 8.0).unwrap();
        assert!(close(d.amplitudes()[0].re, 0.70711, 1e-5));
        assert!(close(d.amplitudes()[1].re, 0.70711, 1e-5));
    }

    #[test]
    fn tensor_examples() {
        let zz = PureState::<f64>::zero().tensor(&PureState::zero()).unwrap();
        assert_eq!(
            zz.amplitudes(),
            PureState::basis(2, 0).unwrap().amplitudes()
        );

        let d = make_equatorial_state(0.0_f64).unwrap();
        let d0 = d.tensor(&PureState::zero()).unwrap();
        let a = d0.amplitudes();
        assert!(close(a[0].re, FRAC_1_SQRT_2, 1e-15) && close(a[2].re, FRAC_1_SQRT_2, 1e-15));
        assert_eq!(a[1], c(0.0, 0.0));
        assert_eq!(a[3], c(0.0, 0.0));

        // Direct outer-product expansion of (|D>|0>)(<D|<0|).
        let rho = tensor_product(&d.density(), &PureState::zero().density()).unwrap();
        let direct = CMatrix::outer(a, a);
        assert!(rho.matrix().max_abs_diff(&direct) < 1e-15);
        assert!(close(rho.matrix().trace().re, 1.0, 1e-15));
    }

    #[test]
    fn partial_trace_of_product_recovers_factor() {
        let d = make_equatorial_state(0.3_f64).unwrap().density();
        let z = PureState::<f64>::zero().density();
        let joint = d.tensor(&z).unwrap();
        assert_eq!(partial_trace(&joint, Subsystem::Bob).unwrap(), d);
        // Tr(d) is 1 only to an ulp, so the Eve side is equal to rounding.
        assert!(
            partial_trace(&joint, Subsystem::Eve)
                .unwrap()
                .max_abs_diff(&z)
                < 1e-15
        );
        assert!(matches!(
            partial_trace(&d, Subsystem::Bob),
            Err(Error::BadDimension { .. })
        ));
    }

    #[test]
    fn fidelity_examples() {
        let d = make_equatorial_state(0.0_f64).unwrap();
        assert!(close(fidelity_pure(&d, &d.density()).unwrap(), 1.0, 1e-15));
        let mixed = DensityMatrix::<f64>::maximally_mixed(1).unwrap();
        assert!(close(fidelity_pure(&d, &mixed).unwrap(), 0.5, 1e-15));
        let joint = DensityMatrix::<f64>::maximally_mixed(2).unwrap();
        assert_eq!(
            fidelity_pure(&d, &joint),
            Err(Error::DimensionMismatch(2, 4))
        );
    }

    #[test]
    fn bloch_examples() {
        let z = bloch_vector(&PureState::<f64>::zero().density()).unwrap();
        assert_eq!((z.x, z.y, z.z), (0.0, 0.0, 1.0));
        let d = make_equatorial_state(0.0_f64)
            .unwrap()
            .bloch_vector()
            .unwrap();
        assert!(close(d.x, 1.0, 1e-15) && close(d.y, 0.0, 1e-15) && close(d.z, 0.0, 1e-15));
        let plus_i = make_equatorial_state(PI / 2.0)
            .unwrap()
            .bloch_vector()
            .unwrap();
        assert!(close(plus_i.y, 1.0, 1e-15));
    }

    #[test]
    fn density_constructor_rejects_bad_matrices() {
        let not_herm =
            CMatrix::from_rows(&[[c(0.5, 0.0), c(0.1, 0.0)], [c(0.0, 0.0), c(0.5, 0.0)]]);
        assert!(matches!(
            DensityMatrix::new(not_herm),
            Err(Error::NotHermitian(_))
        ));
        let bad_trace = CMatrix::<f64>::identity(2);
        assert!(matches!(
            DensityMatrix::new(bad_trace),
            Err(Error::BadTrace(_))
        ));
        let negative = CMatrix::from_real_rows(&[[1.2, 0.0], [0.0, -0.2]]);
        assert!(matches!(
            DensityMatrix::new(negative),
            Err(Error::NotPositive(_))
        ));
        let nan = CMatrix::from_real_rows(&[[f64::NAN, 0.0], [0.0, 0.5]]);
        assert!(matches!(DensityMatrix::new(nan), Err(Error::NonFinite(_))));
        assert!(matches!(
            DensityMatrix::new(CMatrix::<f64>::identity(3).scale_real(1.0 / 3.0)),
            Err(Error::BadDimension { .. })
        ));
    }

    #[test]
    fn pure_constructor_rejects_unnormalized() {
        assert!(matches!(
            PureState::new(vec![c(1.0_f64, 0.0), c(1.0, 0.0)]),
            Err(Error::NotNormalized(_))
        ));
        assert!(matches!(
            PureState::new(vec![c(1.0_f64, 0.0); 3]),
            Err(Error::BadDimension { .. })
        ));
    }

    #[test]
    fn works_in_single_precision() {
        let d = make_equatorial_state(0.7_f32).unwrap();
        let z = PureState::<f32>::zero();
        let rho = d.tensor(&z).unwrap().density();
        let b = partial_trace(&rho, Subsystem::Bob).unwrap();
        assert!((fidelity_pure(&d, &b).unwrap() - 1.0).abs() < 1e-6);
    }
}
