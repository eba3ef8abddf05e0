//! Dense density-matrix engine: registers, the hardware gate set,
//! Kraus channels, projective measurement, and partial trace.

mod eigen;
mod label;
mod pauli;
mod state;

pub use eigen::hermitian_eigenvalues;
pub use label::{NodeId, QubitLabel, Slot};
pub use pauli::{Pauli, PauliString};
pub use state::{
    trace_distance, DensityState, Gate, EIGENVALUE_TOL, HERMITICITY_TOL, TRACE_TOL,
};

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn q(node: u8, mem: u8) -> QubitLabel {
        QubitLabel::device(NodeId(node), Slot::Mem(mem))
    }

    #[test]
    fn x_flips_zero_to_one() {
        let mut s = DensityState::zeros(vec![q(0, 0)]);
        s.apply_gate(Gate::X, &[q(0, 0)]).unwrap();
        let m = s.matrix();
        assert!((m[3].re - 1.0).abs() < 1e-12);
        assert!(m[0].norm() < 1e-12);
    }

    #[test]
    fn cx_on_10_gives_11() {
        // Control first in the label order, big-endian: |10> has index 2.
        let mut s = DensityState::zeros(vec![q(0, 0), q(0, 1)]);
        s.apply_gate(Gate::X, &[q(0, 0)]).unwrap();
        s.apply_gate(Gate::CX, &[q(0, 0), q(0, 1)]).unwrap();
        let m = s.matrix();
        assert!((m[3 * 4 + 3].re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bell_circuit_reaches_phi_plus() {
        let mut s = DensityState::zeros(vec![q(0, 0), q(1, 0)]);
        s.apply_gate(Gate::H, &[q(0, 0)]).unwrap();
        s.apply_gate(Gate::CX, &[q(0, 0), q(1, 0)]).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let phi_plus = vec![c(h, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(h, 0.0)];
        assert!((s.fidelity_pure(&phi_plus).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn swap_moves_population_and_is_involutive() {
        let (a, b) = (q(0, 0), q(0, 1));
        let mut s = DensityState::zeros(vec![a, b]);
        s.apply_gate(Gate::X, &[b]).unwrap(); // |01>
        s.apply_swap(&a, &b).unwrap();
        let m = s.matrix();
        assert!((m[2 * 4 + 2].re - 1.0).abs() < 1e-12, "now |10>");
        s.apply_swap(&a, &b).unwrap();
        let m = s.matrix();
        assert!((m[4 + 1].re - 1.0).abs() < 1e-12, "back to |01>");
    }

    #[test]
    fn gate_then_inverse_restores_state() {
        let labels = vec![q(0, 0), q(1, 0)];
        let mut s = DensityState::ghz(labels.clone());
        s.apply_gate(Gate::H, &[q(0, 0)]).unwrap();
        let before = s.clone();
        s.apply_gate(Gate::CiY, &[q(0, 0), q(1, 0)]).unwrap();
        // (CiY)^-1 = C(-iY) = CiY conjugated by Z on target... simplest:
        // apply CiY three more times; (iY)^4 = I.
        s.apply_gate(Gate::CiY, &[q(0, 0), q(1, 0)]).unwrap();
        s.apply_gate(Gate::CiY, &[q(0, 0), q(1, 0)]).unwrap();
        s.apply_gate(Gate::CiY, &[q(0, 0), q(1, 0)]).unwrap();
        for (x, y) in s.matrix().iter().zip(before.matrix()) {
            assert!((x - y).norm() < 1e-9);
        }
    }

    #[test]
    fn identity_kraus_preserves_state() {
        let mut s = DensityState::ghz(vec![q(0, 0), q(1, 0)]);
        let before = s.clone();
        let id = [[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]];
        s.apply_kraus_1q(&id, &q(0, 0)).unwrap();
        for (x, y) in s.matrix().iter().zip(before.matrix()) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn incomplete_kraus_is_rejected() {
        let mut s = DensityState::zeros(vec![q(0, 0)]);
        let bad = [[c(0.9, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.9, 0.0)]];
        assert!(matches!(
            s.apply_kraus_1q(&bad, &q(0, 0)),
            Err(crate::error::SimError::IncompleteKraus { .. })
        ));
    }

    #[test]
    fn z_measurement_of_zero_state_is_plus() {
        let mut s = DensityState::zeros(vec![q(0, 0)]);
        let p = s.prob_z_plus(&q(0, 0)).unwrap();
        assert!((p - 1.0).abs() < 1e-12);
        let branch = s.project_z(&q(0, 0), true).unwrap();
        assert!((branch - 1.0).abs() < 1e-12);
        assert_eq!(s.num_qubits(), 0);
        assert!((s.trace() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn measuring_half_a_bell_pair_collapses_the_partner() {
        let mut s = DensityState::zeros(vec![q(0, 0), q(1, 0)]);
        s.apply_gate(Gate::H, &[q(0, 0)]).unwrap();
        s.apply_gate(Gate::CX, &[q(0, 0), q(1, 0)]).unwrap();
        assert!((s.prob_z_plus(&q(0, 0)).unwrap() - 0.5).abs() < 1e-12);
        let p = s.project_z(&q(0, 0), false).unwrap();
        assert!((p - 0.5).abs() < 1e-12);
        // Partner collapsed to |1>.
        let m = s.matrix();
        assert!((m[3].re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_probability_branch_is_guarded() {
        let mut s = DensityState::zeros(vec![q(0, 0)]);
        assert!(matches!(
            s.project_z(&q(0, 0), false),
            Err(crate::error::SimError::ZeroProbabilityBranch(_))
        ));
    }

    #[test]
    fn tracing_half_of_phi_plus_gives_maximally_mixed() {
        let mut s = DensityState::zeros(vec![q(0, 0), q(1, 0)]);
        s.apply_gate(Gate::H, &[q(0, 0)]).unwrap();
        s.apply_gate(Gate::CX, &[q(0, 0), q(1, 0)]).unwrap();
        let r = s.partial_trace(&[q(0, 0)]).unwrap();
        let m = r.matrix();
        assert!((m[0].re - 0.5).abs() < 1e-12);
        assert!((m[3].re - 0.5).abs() < 1e-12);
        assert!(m[1].norm() < 1e-12);
    }

    #[test]
    fn tracing_nothing_is_identity_and_everything_errors() {
        let s = DensityState::ghz(vec![q(0, 0), q(1, 0)]);
        let same = s.partial_trace(&[]).unwrap();
        assert_eq!(same.num_qubits(), 2);
        assert!(matches!(
            s.partial_trace(&[q(0, 0), q(1, 0)]),
            Err(crate::error::SimError::TraceOutEverything)
        ));
    }

    #[test]
    fn tracing_a_product_factor_leaves_the_other() {
        let a = DensityState::ghz(vec![q(0, 0), q(1, 0)]);
        let b = DensityState::zeros(vec![q(2, 0)]);
        let joint = a.tensor(&b);
        let reduced = joint.partial_trace(&[q(2, 0)]).unwrap();
        for (x, y) in reduced.matrix().iter().zip(a.matrix()) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn fidelity_of_maximally_mixed_two_qubit_state_is_quarter() {
        let s = DensityState::maximally_mixed(vec![q(0, 0), q(1, 0)]);
        assert!((s.fidelity_ghz() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn trace_distance_basics() {
        let zero = DensityState::zeros(vec![q(0, 0)]);
        let mut one = DensityState::zeros(vec![q(0, 0)]);
        one.apply_gate(Gate::X, &[q(0, 0)]).unwrap();
        let mixed = DensityState::maximally_mixed(vec![q(0, 0)]);
        assert!(trace_distance(&zero, &zero).unwrap() < 1e-12);
        assert!((trace_distance(&zero, &one).unwrap() - 1.0).abs() < 1e-12);
        // Eigenvalues of diag(1,0) - diag(1/2,1/2) are +-1/2.
        assert!((trace_distance(&zero, &mixed).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn permuted_register_relabels_consistently() {
        let (a, b) = (q(0, 0), q(1, 0));
        let mut s = DensityState::zeros(vec![a, b]);
        s.apply_gate(Gate::X, &[b]).unwrap(); // |01>
        let p = s.permuted(&[b, a]).unwrap();
        let m = p.matrix();
        assert!((m[2 * 4 + 2].re - 1.0).abs() < 1e-12, "|10> after swap of labels");
    }

    #[test]
    fn born_rule_measurement_frequencies() {
        use rand::Rng;
        let mut rng = crate::rng::shot_rng(11, 0);
        let shots = 100_000usize;
        let mut plus = 0usize;
        for _ in 0..shots {
            let mut s = DensityState::zeros(vec![q(0, 0)]);
            s.apply_gate(Gate::H, &[q(0, 0)]).unwrap();
            let p = s.prob_z_plus(&q(0, 0)).unwrap();
            let outcome = rng.gen::<f64>() < p;
            s.project_z(&q(0, 0), outcome).unwrap();
            if outcome {
                plus += 1;
            }
        }
        // 5 sigma binomial band around p = 0.5.
        let sigma = (0.25 / shots as f64).sqrt();
        let rate = plus as f64 / shots as f64;
        assert!((rate - 0.5).abs() < 5.0 * sigma, "rate {rate}");
    }
}
