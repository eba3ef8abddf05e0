//! Decoherence channels: generalized amplitude damping toward the
//! maximally mixed state and phase damping, with exponential damping
//! parameters `gamma = 1 - exp(-t/T)`.

use num_complex::Complex64;

use crate::densmat::{DensityState, QubitLabel};
use crate::error::SimError;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// The four generalized-amplitude-damping Kraus operators for a given
/// damping parameter `gamma1`.
pub fn kraus_gad(gamma1: f64) -> [[Complex64; 4]; 4] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let s = (1.0 - gamma1).sqrt();
    let g = gamma1.sqrt();
    [
        [c(h), c(0.0), c(0.0), c(h * s)],
        [c(0.0), c(h * g), c(0.0), c(0.0)],
        [c(h * s), c(0.0), c(0.0), c(h)],
        [c(0.0), c(0.0), c(h * g), c(0.0)],
    ]
}

/// The two phase-damping Kraus operators for a given `gamma2`.
pub fn kraus_pd(gamma2: f64) -> [[Complex64; 4]; 2] {
    [
        [c(1.0), c(0.0), c(0.0), c((1.0 - gamma2).sqrt())],
        [c(0.0), c(0.0), c(0.0), c(gamma2.sqrt())],
    ]
}

/// Apply decoherence for an elapsed time on one qubit: generalized
/// amplitude damping with `gamma1 = 1 - exp(-t/T1)` followed by phase
/// damping with `gamma2 = 1 - exp(-t/T2)`.
pub fn decohere(
    state: &mut DensityState,
    qubit: &QubitLabel,
    elapsed: f64,
    t1: f64,
    t2: f64,
) -> Result<(), SimError> {
    if elapsed < 0.0 {
        return Err(SimError::InvalidParameter(format!(
            "negative elapsed time {elapsed}"
        )));
    }
    decohere_exponents(state, qubit, elapsed / t1, elapsed / t2)
}

/// Decoherence with directly accumulated decay exponents `x1 = sum t/T1`
/// and `x2 = sum t/T2`. Both channel families compose additively in the
/// exponent, so bookkeeping over mixed idle/link intervals reduces to two
/// running sums per qubit.
pub fn decohere_exponents(
    state: &mut DensityState,
    qubit: &QubitLabel,
    x1: f64,
    x2: f64,
) -> Result<(), SimError> {
    if x1 < 0.0 || x2 < 0.0 {
        return Err(SimError::InvalidParameter(
            "negative decay exponent".into(),
        ));
    }
    if x1 > 0.0 {
        let gamma1 = 1.0 - (-x1).exp();
        state.apply_kraus_1q(&kraus_gad(gamma1), qubit)?;
    }
    if x2 > 0.0 {
        let gamma2 = 1.0 - (-x2).exp();
        state.apply_kraus_1q(&kraus_pd(gamma2), qubit)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::densmat::{Gate, NodeId, Slot};

    fn q() -> QubitLabel {
        QubitLabel::device(NodeId::A, Slot::Mem(0))
    }

    #[test]
    fn zero_elapsed_time_is_identity() {
        let mut s = DensityState::ghz(vec![q(), QubitLabel::device(NodeId::B, Slot::Mem(0))]);
        let before = s.clone();
        decohere(&mut s, &q(), 0.0, 1.0, 1.0).unwrap();
        for (a, b) in s.matrix().iter().zip(before.matrix()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn negative_elapsed_time_is_rejected() {
        let mut s = DensityState::zeros(vec![q()]);
        assert!(decohere(&mut s, &q(), -1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn excited_population_after_one_t1() {
        // GAD at t = T1 on |1><1| leaves population (1 + e^-1)/2 in |1>.
        let mut s = DensityState::zeros(vec![q()]);
        s.apply_gate(Gate::X, &[q()]).unwrap();
        decohere(&mut s, &q(), 1.0, 1.0, f64::INFINITY).unwrap();
        let m = s.matrix();
        let expect = 0.5 * (1.0 + (-1.0f64).exp());
        assert!((m[3].re - expect).abs() < 1e-12, "{} vs {expect}", m[3].re);
    }

    #[test]
    fn full_damping_reaches_maximally_mixed() {
        // gamma1 = 1 corresponds to t -> infinity.
        let mut s = DensityState::zeros(vec![q()]);
        s.apply_kraus_1q(&kraus_gad(1.0), &q()).unwrap();
        let m = s.matrix();
        assert!((m[0].re - 0.5).abs() < 1e-12);
        assert!((m[3].re - 0.5).abs() < 1e-12);
    }

    #[test]
    fn phase_damping_scales_coherences() {
        // On |+><+| at t = T2 the off-diagonal shrinks by sqrt(e^-1).
        let mut s = DensityState::zeros(vec![q()]);
        s.apply_gate(Gate::H, &[q()]).unwrap();
        decohere(&mut s, &q(), 1.0, f64::INFINITY, 1.0).unwrap();
        let m = s.matrix();
        let expect = 0.5 * (-1.0f64).exp().sqrt();
        assert!((m[1].re - expect).abs() < 1e-12, "{} vs {expect}", m[1].re);
    }

    #[test]
    fn phase_damping_with_gamma_one_minus_inv_e_on_plus() {
        let mut s = DensityState::zeros(vec![q()]);
        s.apply_gate(Gate::H, &[q()]).unwrap();
        let gamma2 = 1.0 - (-1.0f64).exp();
        s.apply_kraus_1q(&kraus_pd(gamma2), &q()).unwrap();
        let m = s.matrix();
        assert!((m[1].re - 0.5 * (1.0 - gamma2).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn decoherence_composes_as_a_semigroup() {
        let partner = QubitLabel::device(NodeId::B, Slot::Mem(0));
        let make = || {
            let mut s = DensityState::ghz(vec![q(), partner]);
            s.apply_gate(Gate::H, &[q()]).unwrap();
            s
        };
        let (t1, t2) = (0.7, 0.3);
        let mut split = make();
        decohere(&mut split, &q(), 0.4, t1, t2).unwrap();
        decohere(&mut split, &q(), 0.9, t1, t2).unwrap();
        let mut joint = make();
        decohere(&mut joint, &q(), 1.3, t1, t2).unwrap();
        for (a, b) in split.matrix().iter().zip(joint.matrix()) {
            assert!((a - b).norm() < 1e-8);
        }
    }
}
