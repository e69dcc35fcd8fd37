//! Simulator for asymmetric phase-covariant cloning of qubits.
//!
//! * [`qstate`]: one- and two-qubit pure and mixed states, partial trace, fidelity, Bloch vectors.
//! * [`cloning`]: the PCC(+) / PCC(−) isometries, closed-form fidelities, Eve's strategies.
//! * [`optics`]: Jones-calculus model of the displaced Sagnac realization on polarization ⊗ path.
//! * [`tomography`]: finite-shot Pauli tomography with linear inversion.
//! * [`protocol`]: entangled source, remote preparation and the BB84 eavesdropping harness.
//!
//! Everything is generic over the real scalar `T: Real` (`f32` or `f64`);
//! the `*64` aliases below fix `T = f64`.

pub mod cloning;
pub mod error;
pub mod linalg;
pub mod optics;
pub mod protocol;
pub mod qstate;
pub mod scalar;
pub mod tomography;

pub use error::{Error, Result};
pub use scalar::{Real, C};

pub type Complex64 = C<f64>;
pub type CMatrix64 = linalg::CMatrix<f64>;
pub type PureState64 = qstate::PureState<f64>;
pub type DensityMatrix64 = qstate::DensityMatrix<f64>;
pub type BlochVector64 = qstate::BlochVector<f64>;
pub type CloningParameter64 = cloning::CloningParameter<f64>;
pub type CloningIsometry64 = cloning::CloningIsometry<f64>;
pub type EveStrategy64 = cloning::EveStrategy<f64>;
pub type OpticalCircuit64 = optics::OpticalCircuit<f64>;
pub type TomographyResult64 = tomography::TomographyResult<f64>;
pub type Bb84Config64 = protocol::Bb84Config<f64>;
pub type Bb84Report64 = protocol::Bb84Report<f64>;

pub type PureState32 = qstate::PureState<f32>;
pub type DensityMatrix32 = qstate::DensityMatrix<f32>;
