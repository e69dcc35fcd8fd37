//! Finite-shot Pauli tomography of a single qubit.
//!
//! Counts are drawn from the binomial law with success probability
//! `(1 + <σ_axis>)/2`, reconstruction is linear inversion, and unphysical
//! estimates are pulled back onto the Bloch ball radially.
//!
//! Randomness: every draw comes from a `ChaCha20Rng` seeded with
//! `seed_from_u64`, and independent samples get their own seed derived with
//! SplitMix64 from `(seed, repeat, axis)`. Results therefore do not depend on
//! evaluation order or thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::qstate::{
    bloch_matrix, bloch_vector, fidelity_pure, BlochVector, DensityMatrix, PureState,
};
use crate::scalar::Real;

/// Name recorded in output metadata.
pub const RNG_NAME: &str =
    "ChaCha20Rng (rand_chacha 0.9, seed_from_u64) with SplitMix64 substream seeds";

/// SplitMix64 finalizer.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic child seed for the sample labelled by `path`.
pub fn derive_seed(seed: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(splitmix64(seed), |acc, &k| splitmix64(acc ^ splitmix64(k)))
}

pub(crate) fn rng_for(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn label(self) -> char {
        match self {
            Axis::X => 'X',
            Axis::Y => 'Y',
            Axis::Z => 'Z',
        }
    }

    fn index(self) -> usize {
        self as usize
    }

    pub fn component<T: Real>(self, v: &BlochVector<T>) -> T {
        match self {
            Axis::X => v.x,
            Axis::Y => v.y,
            Axis::Z => v.z,
        }
    }
}

/// Projective measurement of one Pauli observable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MeasurementSetting {
    pub axis: Axis,
}

impl From<Axis> for MeasurementSetting {
    fn from(axis: Axis) -> Self {
        Self { axis }
    }
}

/// Number of repetitions per setting, or exact expectations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Shots {
    Finite(u64),
    Infinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CountRecord {
    pub setting: MeasurementSetting,
    pub n_plus: u64,
    pub n_minus: u64,
    pub seed: u64,
}

impl CountRecord {
    pub fn shots(&self) -> u64 {
        self.n_plus + self.n_minus
    }

    pub fn expectation<T: Real>(&self) -> T {
        let n = self.shots() as f64;
        T::lit((self.n_plus as f64 - self.n_minus as f64) / n)
    }
}

/// One axis worth of data: sampled counts or an exact expectation value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AxisRecord<T> {
    Counts(CountRecord),
    Exact {
        setting: MeasurementSetting,
        expectation: T,
    },
}

impl<T: Real> AxisRecord<T> {
    pub fn setting(&self) -> MeasurementSetting {
        match *self {
            AxisRecord::Counts(r) => r.setting,
            AxisRecord::Exact { setting, .. } => setting,
        }
    }

    pub fn expectation(&self) -> T {
        match *self {
            AxisRecord::Counts(r) => r.expectation(),
            AxisRecord::Exact { expectation, .. } => expectation,
        }
    }
}

fn outcome_probability<T: Real>(rho: &DensityMatrix<T>, axis: Axis) -> Result<f64> {
    let v = bloch_vector(rho)?;
    let p = 0.5 * (1.0 + axis.component(&v).as_f64());
    Ok(p.clamp(0.0, 1.0))
}

/// Draws `shots` outcomes of `setting` on `rho`.
pub fn simulate_counts<T: Real>(
    rho: &DensityMatrix<T>,
    setting: MeasurementSetting,
    shots: u64,
    seed: u64,
) -> Result<CountRecord> {
    if shots == 0 {
        return Err(Error::ZeroShots);
    }
    let p = outcome_probability(rho, setting.axis)?;
    let mut rng = rng_for(seed);
    let n_plus = Binomial::new(shots, p)
        .expect("probability clamped to [0, 1]")
        .sample(&mut rng);
    Ok(CountRecord {
        setting,
        n_plus,
        n_minus: shots - n_plus,
        seed,
    })
}

/// Exact-expectation record for one axis.
pub fn exact_record<T: Real>(
    rho: &DensityMatrix<T>,
    setting: MeasurementSetting,
) -> Result<AxisRecord<T>> {
    let v = bloch_vector(rho)?;
    Ok(AxisRecord::Exact {
        setting,
        expectation: setting.axis.component(&v),
    })
}

/// `(I + x̂σx + ŷσy + ẑσz)/2`; the result may fail positivity.
pub fn linear_inversion<T: Real>(records: &[AxisRecord<T>]) -> Result<CMatrix<T>> {
    let mut est = [None; 3];
    for r in records {
        est[r.setting().axis.index()] = Some(r.expectation());
    }
    let mut comps = [T::zero(); 3];
    for axis in Axis::ALL {
        comps[axis.index()] = est[axis.index()].ok_or(Error::MissingAxis(axis.label()))?;
    }
    Ok(bloch_matrix(BlochVector::new(comps[0], comps[1], comps[2])))
}

/// Nearest physical state along the Bloch radius.
pub fn project_physical<T: Real>(m: &CMatrix<T>) -> Result<DensityMatrix<T>> {
    if m.rows() != 2 || m.cols() != 2 {
        return Err(Error::BadDimension {
            expected: "2x2".into(),
            got: m.rows(),
        });
    }
    let herm = m.hermiticity_defect();
    if herm > T::lit(1e-9) {
        return Err(Error::NotHermitian(herm.as_f64()));
    }
    let tr = m.trace();
    if (tr.re - T::one()).abs() > T::lit(1e-9) {
        return Err(Error::BadTrace(tr.re.as_f64()));
    }
    let two = T::lit(2.0);
    let v = BlochVector::new(
        two * m[(0, 1)].re,
        -two * m[(0, 1)].im,
        m[(0, 0)].re - m[(1, 1)].re,
    );
    let r = v.norm();
    if r <= T::one() {
        return DensityMatrix::new(bloch_matrix(v));
    }
    DensityMatrix::new(bloch_matrix(v.scaled(T::one() / r)))
}

/// Outcome of repeated tomography runs.
#[derive(Debug, Clone, PartialEq)]
pub struct TomographyResult<T> {
    /// Mean of the per-repeat physical reconstructions.
    pub rho: DensityMatrix<T>,
    pub bloch_estimate: BlochVector<T>,
    /// Sample standard deviation of each Bloch component across repeats
    /// (zero for a single repeat).
    pub std_errors: [T; 3],
    /// Per-repeat physical reconstructions in repeat order.
    pub samples: Vec<DensityMatrix<T>>,
}

impl<T: Real> TomographyResult<T> {
    /// Mean and sample standard deviation of the per-repeat fidelities with `psi`.
    pub fn fidelity_stats(&self, psi: &PureState<T>) -> Result<(T, T)> {
        let f: Vec<T> = self
            .samples
            .iter()
            .map(|s| fidelity_pure(psi, s))
            .collect::<Result<_>>()?;
        Ok(mean_std(&f))
    }
}

pub(crate) fn mean_std<T: Real>(xs: &[T]) -> (T, T) {
    let n = T::from_usize(xs.len()).expect("sample count");
    let mean = xs.iter().copied().sum::<T>() / n;
    if xs.len() < 2 {
        return (mean, T::zero());
    }
    let var = xs.iter().map(|&x| (x - mean) * (x - mean)).sum::<T>() / (n - T::one());
    (mean, var.sqrt())
}

/// Runs `repeats` independent X/Y/Z tomographies of `rho_true`.
pub fn tomography_pipeline<T: Real>(
    rho_true: &DensityMatrix<T>,
    shots: Shots,
    repeats: usize,
    seed: u64,
) -> Result<TomographyResult<T>> {
    if repeats == 0 {
        return Err(Error::ZeroRepeats);
    }
    if shots == Shots::Finite(0) {
        return Err(Error::ZeroShots);
    }
    if rho_true.n_qubits() != 1 {
        return Err(Error::DimensionMismatch(rho_true.dim(), 2));
    }
    let samples: Vec<DensityMatrix<T>> = (0..repeats)
        .into_par_iter()
        .map(|rep| {
            let records = Axis::ALL
                .iter()
                .map(|&axis| match shots {
                    Shots::Infinite => exact_record(rho_true, axis.into()),
                    Shots::Finite(n) => {
                        let s = derive_seed(seed, &[rep as u64, axis.index() as u64]);
                        simulate_counts(rho_true, axis.into(), n, s).map(AxisRecord::Counts)
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            project_physical(&linear_inversion(&records)?)
        })
        .collect::<Result<_>>()?;

    let blochs: Vec<BlochVector<T>> = samples.iter().map(bloch_vector).collect::<Result<_>>()?;
    let mut mean = [T::zero(); 3];
    let mut std = [T::zero(); 3];
    for k in 0..3 {
        let comp: Vec<T> = blochs.iter().map(|b| b.components()[k]).collect();
        (mean[k], std[k]) = mean_std(&comp);
    }
    let bloch_estimate = BlochVector::new(mean[0], mean[1], mean[2]);
    let rho = DensityMatrix::new(bloch_matrix(bloch_estimate))?;
    Ok(TomographyResult {
        rho,
        bloch_estimate,
        std_errors: std,
        samples,
    })
}
