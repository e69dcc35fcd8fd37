//! Independent hand-expanded oracles for the derived example values.
//!
//! The oracle here writes the cloner output amplitudes out explicitly and sums
//! over the traced index by hand; it shares no code with the isometry,
//! Kronecker or partial-trace routines it checks.

use std::f64::consts::PI;

use pcc_core::cloning::{
    analytic_fidelities, apply_cloner, bob_sigma_z_bias, eve_readout, pcc_isometry,
    CloningParameter, EveStrategy, Orientation,
};
use pcc_core::qstate::{
    bloch_vector, fidelity_pure, make_equatorial_state, partial_trace, Subsystem,
};
use pcc_core::Complex64;

type Amp = Complex64;

/// Joint amplitudes `[a00, a01, a10, a11]` (Bob, Eve) of the cloner acting on `a|0> + b|1>`.
fn oracle_joint(a: Amp, b: Amp, q: f64, orientation: Orientation) -> [Amp; 4] {
    let (k, l) = ((1.0 - q).sqrt(), q.sqrt());
    let zero = Amp::new(0.0, 0.0);
    match orientation {
        // |0> -> |00>, |1> -> k|10> + l|01>
        Orientation::Plus => [a, b * l, b * k, zero],
        // |1> -> |10>, |0> -> k|00> + l|11>
        Orientation::Minus => [a * k, zero, b, a * l],
    }
}

/// Reduced 2x2 matrix as `[r00, r01, r10, r11]`.
fn oracle_reduced(amps: &[Amp; 4], keep: Subsystem) -> [Amp; 4] {
    let idx = |bob: usize, eve: usize| 2 * bob + eve;
    let mut r = [Amp::new(0.0, 0.0); 4];
    for i in 0..2 {
        for j in 0..2 {
            let mut s = Amp::new(0.0, 0.0);
            for t in 0..2 {
                let (u, v) = match keep {
                    Subsystem::Bob => (idx(i, t), idx(j, t)),
                    Subsystem::Eve => (idx(t, i), idx(t, j)),
                };
                s += amps[u] * amps[v].conj();
            }
            r[2 * i + j] = s;
        }
    }
    r
}

fn oracle_fidelity(a: Amp, b: Amp, r: &[Amp; 4]) -> f64 {
    (a.conj() * r[0] * a + a.conj() * r[1] * b + b.conj() * r[2] * a + b.conj() * r[3] * b).re
}

/// Eve's bit-flip readout frame: X r X.
fn flipped(r: [Amp; 4]) -> [Amp; 4] {
    [r[3], r[2], r[1], r[0]]
}

fn equatorial(phi: f64) -> (Amp, Amp) {
    let h = 0.5_f64.sqrt();
    (Amp::new(h, 0.0), Amp::from_polar(h, phi))
}

#[test]
fn oracle_symmetric_marginal_entries() {
    let (a, b) = equatorial(0.0);
    let joint = oracle_joint(a, b, 0.5, Orientation::Plus);
    for keep in [Subsystem::Bob, Subsystem::Eve] {
        let r = oracle_reduced(&joint, keep);
        assert!((r[0].re - 0.75).abs() < 1e-15);
        assert!((r[3].re - 0.25).abs() < 1e-15);
        assert!((r[1].re - 0.353553390593).abs() < 1e-12);
    }
}

#[test]
fn bob_bloch_vector_at_q_0_3() {
    // Oracle: x = 2 Re r01, z = r00 - r11.
    let (a, b) = equatorial(0.0);
    let r = oracle_reduced(&oracle_joint(a, b, 0.3, Orientation::Plus), Subsystem::Bob);
    let (ox, oz) = (2.0 * r[1].re, r[0].re - r[3].re);
    assert!((ox - 0.83666).abs() < 1e-5 && (oz - 0.3).abs() < 1e-15);

    let q = CloningParameter::new(0.3).unwrap();
    let d = make_equatorial_state(0.0).unwrap();
    let out = apply_cloner(&pcc_isometry(q, Orientation::Plus), &d.density()).unwrap();
    let v = bloch_vector(&partial_trace(&out, Subsystem::Bob).unwrap()).unwrap();
    assert!((v.x - ox).abs() < 1e-12 && v.y.abs() < 1e-12 && (v.z - oz).abs() < 1e-12);
}

#[test]
fn fidelities_at_q_0_4_over_phase_grid() {
    // Frozen from the oracle: (1+√0.6)/2 and (1+√0.4)/2.
    const FB: f64 = 0.887298;
    const FE: f64 = 0.816228;
    let q = CloningParameter::new(0.4).unwrap();
    for orientation in [Orientation::Plus, Orientation::Minus] {
        let iso = pcc_isometry(q, orientation);
        for k in 0..=100 {
            let phi = 2.0 * PI * k as f64 / 100.0;
            let (a, b) = equatorial(phi);
            let joint = oracle_joint(a, b, 0.4, orientation);
            let ofb = oracle_fidelity(a, b, &oracle_reduced(&joint, Subsystem::Bob));
            let eve = oracle_reduced(&joint, Subsystem::Eve);
            let eve = match orientation {
                Orientation::Plus => eve,
                Orientation::Minus => flipped(eve),
            };
            let ofe = oracle_fidelity(a, b, &eve);
            assert!(
                (ofb - FB).abs() < 1e-6 && (ofe - FE).abs() < 1e-6,
                "{orientation:?} {phi} {ofb} {ofe}"
            );

            let psi = make_equatorial_state(phi).unwrap();
            let out = apply_cloner(&iso, &psi.density()).unwrap();
            let fb = fidelity_pure(&psi, &partial_trace(&out, Subsystem::Bob).unwrap()).unwrap();
            let fe = fidelity_pure(&psi, &eve_readout(&out, orientation).unwrap()).unwrap();
            assert!((fb - ofb).abs() < 1e-12 && (fe - ofe).abs() < 1e-12);
        }
    }
    let (fb, fe) = analytic_fidelities(q);
    assert!((fb - FB).abs() < 1e-6 && (fe - FE).abs() < 1e-6);
}

#[test]
fn minus_bias_sign_from_oracle() {
    for &phi in &[0.0, 0.9, 3.3] {
        let (a, b) = equatorial(phi);
        let r = oracle_reduced(&oracle_joint(a, b, 0.3, Orientation::Minus), Subsystem::Bob);
        let oz = r[0].re - r[3].re;
        assert!((oz + 0.3).abs() < 1e-15);
        let z = bob_sigma_z_bias(
            &EveStrategy::PccMinus(CloningParameter::new(0.3).unwrap()),
            phi,
        )
        .unwrap();
        assert!((z - oz).abs() < 1e-12);
    }
}
