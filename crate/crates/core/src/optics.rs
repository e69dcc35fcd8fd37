//! Polarization ⊗ path model of the displaced Sagnac cloner.
//!
//! A single photon carries two qubits: polarization (`H = |0>`, `V = |1>`),
//! which is Bob's qubit, and path mode (`0`, `1`), which is Eve's. The joint
//! basis is ordered `{(H,0), (H,1), (V,0), (V,1)}`, i.e. polarization ⊗ path,
//! matching the (Bob, Eve) convention of the rest of the crate.
//!
//! Elements act on that 4-dimensional space:
//! * the PBS transmits `H` (path unchanged) and reflects `V` (path flipped);
//! * a waveplate sits on one path and acts on the polarization of that path only;
//! * the path remapper is the closing `HWP(45°)` on path 1 plus the last PBS pass,
//!   which moves Eve's path qubit onto polarization in path 0.

use std::str::FromStr;

use num_traits::{One, Zero};

use crate::cloning::{CloningIsometry, Orientation};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::qstate::{partial_trace, DensityMatrix, Subsystem};
use crate::scalar::{c, re, Real, C};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Path {
    Zero,
    One,
}

impl Path {
    fn index(self) -> usize {
        match self {
            Path::Zero => 0,
            Path::One => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OpticalElement<T> {
    Pbs,
    Hwp { angle: T, path: Path },
    Qwp { angle: T, path: Path },
    PathRemapper,
}

/// Half-wave plate with fast axis at `alpha`: `[[cos2α, sin2α], [sin2α, −cos2α]]`.
pub fn hwp_jones<T: Real>(alpha: T) -> CMatrix<T> {
    let (s, cs) = (alpha + alpha).sin_cos();
    CMatrix::from_real_rows(&[[cs, s], [s, -cs]])
}

/// Quarter-wave plate with fast axis at `alpha`: `R(α) · diag(1, i) · R(−α)`.
pub fn qwp_jones<T: Real>(alpha: T) -> CMatrix<T> {
    let (s, cs) = alpha.sin_cos();
    let (c2, s2, sc) = (cs * cs, s * s, s * cs);
    CMatrix::from_rows(&[[c(c2, s2), c(sc, -sc)], [c(sc, -sc), c(s2, c2)]])
}

/// `|H,p> -> |H,p>`, `|V,p> -> |V,1−p>`.
pub fn pbs_unitary<T: Real>() -> CMatrix<T> {
    let mut u = CMatrix::zeros(4, 4);
    u[(0, 0)] = C::one();
    u[(1, 1)] = C::one();
    u[(3, 2)] = C::one();
    u[(2, 3)] = C::one();
    u
}

/// Embeds a 2x2 polarization operator so that it acts on `path` only.
fn on_path<T: Real>(jones: &CMatrix<T>, path: Path) -> CMatrix<T> {
    let p = path.index();
    let mut u = CMatrix::identity(4);
    for a in 0..2 {
        for b in 0..2 {
            u[(2 * a + p, 2 * b + p)] = jones[(a, b)];
        }
    }
    u
}

impl<T: Real> OpticalElement<T> {
    pub fn unitary(&self) -> CMatrix<T> {
        match *self {
            OpticalElement::Pbs => pbs_unitary(),
            OpticalElement::Hwp { angle, path } => on_path(&hwp_jones(angle), path),
            OpticalElement::Qwp { angle, path } => on_path(&qwp_jones(angle), path),
            OpticalElement::PathRemapper => {
                let h3 = on_path(&hwp_jones(T::FRAC_PI_4()), Path::One);
                pbs_unitary().matmul(&h3)
            }
        }
    }

    fn check(&self) -> Result<()> {
        match *self {
            OpticalElement::Hwp { angle, .. } | OpticalElement::Qwp { angle, .. }
                if !angle.is_finite() =>
            {
                Err(Error::NonFinite("waveplate angle"))
            }
            _ => Ok(()),
        }
    }
}

/// Ordered list of elements; the first element acts first.
#[derive(Debug, Clone, PartialEq)]
pub struct OpticalCircuit<T> {
    elements: Vec<OpticalElement<T>>,
}

impl<T: Real> OpticalCircuit<T> {
    pub fn new(elements: Vec<OpticalElement<T>>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::EmptyCircuit);
        }
        for e in &elements {
            e.check()?;
        }
        Ok(Self { elements })
    }

    pub fn elements(&self) -> &[OpticalElement<T>] {
        &self.elements
    }
}

/// `U = U_n ⋯ U_1`. A non-unitary product is an element-model bug.
pub fn compile_circuit<T: Real>(circuit: &OpticalCircuit<T>) -> Result<CMatrix<T>> {
    let u = circuit
        .elements
        .iter()
        .fold(CMatrix::identity(4), |acc, e| e.unitary().matmul(&acc));
    let defect = u.isometry_defect();
    if defect > T::invariant_tol() {
        return Err(Error::NonUnitary(defect.as_f64()));
    }
    Ok(u)
}

/// Named Sagnac configurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SagnacVariant {
    /// H1 (clockwise, `V` arm) rotated, H2 at 0°.
    Plus,
    /// H2 (counter-clockwise, `H` arm) rotated, H1 at 0°.
    Minus,
}

impl SagnacVariant {
    pub fn name(self) -> &'static str {
        match self {
            SagnacVariant::Plus => "sagnac-plus",
            SagnacVariant::Minus => "sagnac-minus",
        }
    }

    pub fn orientation(self) -> Orientation {
        match self {
            SagnacVariant::Plus => Orientation::Plus,
            SagnacVariant::Minus => Orientation::Minus,
        }
    }
}

impl FromStr for SagnacVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sagnac-plus" => Ok(SagnacVariant::Plus),
            "sagnac-minus" => Ok(SagnacVariant::Minus),
            other => Err(Error::UnknownPreset(other.to_string())),
        }
    }
}

/// Split at the PBS, one waveplate per arm, recombine at the PBS.
///
/// After the first pass `H` stays on path 0 and `V` moves to path 1, so H2
/// sits on path 0 and H1 on path 1.
pub fn sagnac_preset<T: Real>(alpha: T, variant: SagnacVariant) -> Result<OpticalCircuit<T>> {
    let (h1, h2) = match variant {
        SagnacVariant::Plus => (alpha, T::zero()),
        SagnacVariant::Minus => (T::zero(), alpha),
    };
    OpticalCircuit::new(vec![
        OpticalElement::Pbs,
        OpticalElement::Hwp {
            angle: h2,
            path: Path::Zero,
        },
        OpticalElement::Hwp {
            angle: h1,
            path: Path::One,
        },
        OpticalElement::Pbs,
    ])
}

/// Diagonal phase correction `D_pol ⊗ D_path` found by the equivalence check.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalPhases<T> {
    /// Phases on `(H, V)`.
    pub polarization: [C<T>; 2],
    /// Phases on `(path 0, path 1)`.
    pub path: [C<T>; 2],
}

impl<T: Real> LocalPhases<T> {
    pub fn identity() -> Self {
        Self {
            polarization: [C::one(), C::one()],
            path: [C::one(), C::one()],
        }
    }

    pub fn matrix(&self) -> CMatrix<T> {
        CMatrix::diag(&self.polarization).kron(&CMatrix::diag(&self.path))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Equivalence<T> {
    pub verdict: bool,
    pub phases: LocalPhases<T>,
    /// `max |(D_pol ⊗ D_path)·u − target|` over the physical input columns.
    pub residual: T,
}

impl<T: Real> Equivalence<T> {
    /// `u` with the fitted local phases applied at the output.
    pub fn corrected(&self, u: &CMatrix<T>) -> CMatrix<T> {
        self.phases.matrix().matmul(u)
    }
}

/// Input columns reachable by a photon entering on path 0.
const PHYSICAL_COLUMNS: [usize; 2] = [0, 2];

/// Searches a local diagonal phase correction making `u` match `target` on
/// the path-0 input sector.
///
/// Each output row with target support fixes the required phase `t/u`. The
/// phases must factor as `a_pol · b_path`; that is solved by propagating
/// along the bipartite (polarization, path) graph of fixed entries, leaving
/// unconstrained factors at 1. The verdict is the residual test at 1e-9.
pub fn equivalent_up_to_local_phase<T: Real>(
    u: &CMatrix<T>,
    target: &CloningIsometry<T>,
) -> Result<Equivalence<T>> {
    if u.rows() != 4 || u.cols() != 4 {
        return Err(Error::DimensionMismatch(u.rows(), 4));
    }
    let t = target.matrix();
    let support = T::lit(1e-9);

    let mut row_phase: [Option<C<T>>; 4] = [None; 4];
    for (i, slot) in row_phase.iter_mut().enumerate() {
        // Use the largest target entry in the row for the best-conditioned ratio.
        let best = PHYSICAL_COLUMNS
            .iter()
            .enumerate()
            .map(|(k, &col)| (t[(i, k)], u[(i, col)]))
            .filter(|(tv, uv)| tv.norm() > support && uv.norm() > support)
            .max_by(|a, b| a.0.norm().partial_cmp(&b.0.norm()).unwrap());
        if let Some((tv, uv)) = best {
            let ratio = tv / uv;
            *slot = Some(ratio / re(ratio.norm()));
        }
    }

    // Unknowns: pol[0..2], path[0..2]; entry (pol p, path r) is row 2p + r.
    let mut pol: [Option<C<T>>; 2] = [None, None];
    let mut path: [Option<C<T>>; 2] = [None, None];
    loop {
        let before = (pol, path);
        for p in 0..2 {
            for r in 0..2 {
                if let Some(d) = row_phase[2 * p + r] {
                    match (pol[p], path[r]) {
                        (Some(a), None) => path[r] = Some(d / a),
                        (None, Some(b)) => pol[p] = Some(d / b),
                        _ => {}
                    }
                }
            }
        }
        if (pol, path) == before {
            // Seed the next disconnected component.
            let seeded = (0..2)
                .find(|&p| pol[p].is_none() && (0..2).any(|r| row_phase[2 * p + r].is_some()));
            match seeded {
                Some(p) => pol[p] = Some(C::one()),
                None => break,
            }
        }
    }
    let phases = LocalPhases {
        polarization: [pol[0].unwrap_or(C::one()), pol[1].unwrap_or(C::one())],
        path: [path[0].unwrap_or(C::one()), path[1].unwrap_or(C::one())],
    };

    let corrected = phases.matrix().matmul(u);
    let residual = PHYSICAL_COLUMNS
        .iter()
        .enumerate()
        .flat_map(|(k, &col)| (0..4).map(move |i| (i, k, col)))
        .map(|(i, k, col)| (corrected[(i, col)] - t[(i, k)]).norm())
        .fold(T::zero(), T::max);

    Ok(Equivalence {
        verdict: residual < support,
        phases,
        residual,
    })
}

/// Joint state produced by sending `input_polarization` into path 0.
pub fn circuit_output<T: Real>(
    u: &CMatrix<T>,
    input_polarization: &DensityMatrix<T>,
) -> Result<DensityMatrix<T>> {
    if input_polarization.n_qubits() != 1 {
        return Err(Error::DimensionMismatch(input_polarization.dim(), 2));
    }
    let path0 = CMatrix::diag(&[C::one(), C::zero()]);
    let joint = input_polarization.matrix().kron(&path0);
    DensityMatrix::new(u.conjugate(&joint))
}

/// Bob (polarization) and Eve (path) marginals after a compiled circuit.
pub fn circuit_marginals<T: Real>(
    u: &CMatrix<T>,
    input_polarization: &DensityMatrix<T>,
) -> Result<(DensityMatrix<T>, DensityMatrix<T>)> {
    let joint = circuit_output(u, input_polarization)?;
    Ok((
        partial_trace(&joint, Subsystem::Bob)?,
        partial_trace(&joint, Subsystem::Eve)?,
    ))
}

/// Polarization state on path 0 after the remapper, given a joint state whose
/// polarization has already been projected onto `H` by Bob's analyzer.
///
/// Returns the normalized polarization state and the probability of the `H`
/// projection.
pub fn remap_eve_to_polarization<T: Real>(
    joint: &DensityMatrix<T>,
) -> Result<(DensityMatrix<T>, T)> {
    if joint.n_qubits() != 2 {
        return Err(Error::DimensionMismatch(joint.dim(), 4));
    }
    let keep_h = CMatrix::diag(&[C::one(), C::one(), C::zero(), C::zero()]);
    let projected = keep_h.conjugate(joint.matrix());
    let prob = projected.trace().re;
    if prob < T::lit(1e-12) {
        return Err(Error::ImpossibleProjection(prob.as_f64()));
    }
    let remapped = OpticalElement::<T>::PathRemapper
        .unitary()
        .conjugate(&projected)
        .scale_real(T::one() / prob);
    let joint = DensityMatrix::new(remapped)?;
    Ok((partial_trace(&joint, Subsystem::Bob)?, prob))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cloning::{pcc_isometry, waveplate_to_q, CloningParameter};
    use crate::qstate::{bloch_vector, PureState};
    use std::f64::consts::PI;

    fn basis(i: usize) -> Vec<C<f64>> {
        PureState::basis(2, i).unwrap().amplitudes().to_vec()
    }

    const H0: usize = 0;
    const H1: usize = 1;
    const V0: usize = 2;
    const V1: usize = 3;

    #[test]
    fn hwp_examples() {
        let u0 = hwp_jones(0.0_f64);
        assert!(u0.max_abs_diff(&CMatrix::from_real_rows(&[[1.0, 0.0], [0.0, -1.0]])) < 1e-15);
        let u45 = hwp_jones(PI / 4.0);
        assert!(u45.max_abs_diff(&CMatrix::from_real_rows(&[[0.0, 1.0], [1.0, 0.0]])) < 1e-15);
        let u = hwp_jones(PI / 8.0);
        assert!((u[(0, 1)].norm_sqr() - 0.5).abs() < 1e-15);
        for a in [0.1_f64, 0.7, 2.0] {
            let u = hwp_jones(a);
            assert!(u.isometry_defect() < 1e-12);
            // |<H|U|V>|² = sin²2α, |<V|U|V>|² = cos²2α
            assert!((u[(0, 1)].norm_sqr() - (2.0 * a).sin().powi(2)).abs() < 1e-15);
            assert!((u[(1, 1)].norm_sqr() - (2.0 * a).cos().powi(2)).abs() < 1e-15);
        }
    }

    #[test]
    fn qwp_examples() {
        let u0 = qwp_jones(0.0_f64);
        assert!(u0.max_abs_diff(&CMatrix::diag(&[c(1.0, 0.0), c(0.0, 1.0)])) < 1e-15);
        let out = PureState::new(qwp_jones(PI / 4.0).apply(&[c(1.0, 0.0), c(0.0, 0.0)])).unwrap();
        let b = out.bloch_vector().unwrap();
        assert!((b.y.abs() - 1.0).abs() < 1e-12);
        for a in [0.0, 0.3, 1.1, -0.4] {
            let q = qwp_jones(a);
            assert!(q.isometry_defect() < 1e-12);
            let qq = q.matmul(&q);
            let h = hwp_jones(a);
            let g = global_phase_between(&qq, &h);
            assert!(qq.max_abs_diff(&h.scale(g)) < 1e-12, "alpha {a}");
        }
    }

    fn global_phase_between(a: &CMatrix<f64>, b: &CMatrix<f64>) -> C<f64> {
        let (i, _) = b
            .data()
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.norm().partial_cmp(&y.1.norm()).unwrap())
            .unwrap();
        let r = a.data()[i] / b.data()[i];
        r / r.norm()
    }

    #[test]
    fn pbs_examples() {
        let p = pbs_unitary::<f64>();
        assert_eq!(p.apply(&basis(H0)), basis(H0));
        assert_eq!(p.apply(&basis(V0)), basis(V1));
        assert_eq!(p.apply(&basis(H1)), basis(H1));
        assert!(p.matmul(&p).max_abs_diff(&CMatrix::identity(4)) < 1e-15);
    }

    #[test]
    fn compile_examples() {
        let pp =
            OpticalCircuit::<f64>::new(vec![OpticalElement::Pbs, OpticalElement::Pbs]).unwrap();
        assert!(
            compile_circuit(&pp)
                .unwrap()
                .max_abs_diff(&CMatrix::identity(4))
                < 1e-15
        );
        assert_eq!(OpticalCircuit::<f64>::new(vec![]), Err(Error::EmptyCircuit));
        assert!(OpticalCircuit::new(vec![OpticalElement::Hwp {
            angle: f64::NAN,
            path: Path::Zero
        }])
        .is_err());

        let u = compile_circuit(&sagnac_preset(0.0_f64, SagnacVariant::Plus).unwrap()).unwrap();
        let h = u.apply(&basis(H0));
        let v = u.apply(&basis(V0));
        assert!((h[H0].norm() - 1.0).abs() < 1e-15);
        assert!((v[V0].norm() - 1.0).abs() < 1e-15);

        let u = compile_circuit(&sagnac_preset(PI / 8.0, SagnacVariant::Plus).unwrap()).unwrap();
        let q = waveplate_to_q(PI / 8.0).unwrap().value();
        assert!((u.apply(&basis(V0))[H1].norm_sqr() - q).abs() < 1e-15);
    }

    #[test]
    fn preset_examples() {
        let plus = compile_circuit(&sagnac_preset(PI / 8.0, SagnacVariant::Plus).unwrap()).unwrap();
        let out = plus.apply(&basis(V0));
        assert!((out[V0].norm_sqr() - 0.5).abs() < 1e-15);
        assert!((out[H1].norm_sqr() - 0.5).abs() < 1e-15);

        let minus =
            compile_circuit(&sagnac_preset(PI / 8.0, SagnacVariant::Minus).unwrap()).unwrap();
        let out = minus.apply(&basis(H0));
        assert!((out[H0].norm_sqr() - 0.5).abs() < 1e-15);
        assert!((out[V1].norm_sqr() - 0.5).abs() < 1e-15);

        assert_eq!(
            "sagnac-plus".parse::<SagnacVariant>(),
            Ok(SagnacVariant::Plus)
        );
        assert_eq!(
            "sagnac-minus".parse::<SagnacVariant>(),
            Ok(SagnacVariant::Minus)
        );
        assert!("sagnac".parse::<SagnacVariant>().is_err());
    }

    /// Phase fit done independently: every nonzero target entry gives `t/u`,
    /// and a valid correction needs all of them consistent with a product form.
    fn direct_phase_fit(u: &CMatrix<f64>, t: &CMatrix<f64>) -> bool {
        let mut d = [None; 4];
        for i in 0..4 {
            for (k, col) in [0usize, 2].into_iter().enumerate() {
                let (tv, uv) = (t[(i, k)], u[(i, col)]);
                if tv.norm() > 1e-9 {
                    if (tv.norm() - uv.norm()).abs() > 1e-9 {
                        return false;
                    }
                    let r = tv / uv;
                    match d[i] {
                        None => d[i] = Some(r),
                        Some(prev) if (prev - r).norm() > 1e-9 => return false,
                        _ => {}
                    }
                } else if uv.norm() > 1e-9 {
                    return false;
                }
            }
        }
        match d {
            [Some(a), Some(b), Some(cc), Some(e)] => (a * e - b * cc).norm() < 1e-9,
            _ => true,
        }
    }

    #[test]
    fn sagnac_matches_isometry_on_grid() {
        for k in 0..=10 {
            let alpha = k as f64 * PI / 40.0;
            let q = waveplate_to_q(alpha).unwrap();
            for variant in [SagnacVariant::Plus, SagnacVariant::Minus] {
                let u = compile_circuit(&sagnac_preset(alpha, variant).unwrap()).unwrap();
                let target = pcc_isometry(q, variant.orientation());
                let eq = equivalent_up_to_local_phase(&u, &target).unwrap();
                assert!(eq.verdict, "{variant:?} α={alpha} residual {}", eq.residual);
                assert!(direct_phase_fit(&u, target.matrix()));
            }
        }
    }

    #[test]
    fn mismatched_orientation_is_rejected() {
        let q = CloningParameter::new(0.5).unwrap();
        let u = compile_circuit(&sagnac_preset(PI / 8.0, SagnacVariant::Minus).unwrap()).unwrap();
        let eq = equivalent_up_to_local_phase(&u, &pcc_isometry(q, Orientation::Plus)).unwrap();
        assert!(!eq.verdict);
        assert!(!direct_phase_fit(
            &u,
            pcc_isometry(q, Orientation::Plus).matrix()
        ));
    }

    #[test]
    fn embedding_is_its_own_witness() {
        for qv in [0.0, 0.3, 1.0] {
            let iso = pcc_isometry(CloningParameter::new(qv).unwrap(), Orientation::Plus);
            let eq = equivalent_up_to_local_phase(&iso.embed_unitary(), &iso).unwrap();
            assert!(eq.verdict);
            assert_eq!(eq.phases, LocalPhases::identity());
            assert_eq!(eq.residual, 0.0);
        }
    }

    #[test]
    fn remapper_moves_path_onto_polarization() {
        // Joint |H> ⊗ ρ_path; after the merge the polarization carries ρ_path.
        let eve =
            DensityMatrix::from_bloch(crate::qstate::BlochVector::new(0.2, -0.4, 0.6)).unwrap();
        let joint = PureState::<f64>::zero()
            .density()
            .matrix()
            .kron(eve.matrix());
        let (pol, prob) = remap_eve_to_polarization(&DensityMatrix::new(joint).unwrap()).unwrap();
        assert!((prob - 1.0).abs() < 1e-15);
        let b = bloch_vector(&pol).unwrap();
        assert!((b.z - 0.6).abs() < 1e-15);
        assert!(pol.max_abs_diff(&eve) < 1e-15);

        let vv = PureState::<f64>::basis(2, V0).unwrap().density();
        assert!(matches!(
            remap_eve_to_polarization(&vv),
            Err(Error::ImpossibleProjection(_))
        ));
    }
}
