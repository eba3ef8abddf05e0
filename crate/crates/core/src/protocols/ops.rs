//! State-level fusion and distillation, free of hardware routing.
//!
//! These act directly on density matrices and are the reference
//! implementations the recipe executor is checked against: the executor
//! reproduces them exactly once SWAP choreography, timing, and noise
//! channels are switched off.

use rand::Rng;

use super::stabilizer::Stabilizer;
use crate::densmat::{DensityState, Gate, QubitLabel};
use crate::error::SimError;
use crate::rng::SimRng;

/// Both outcome branches of fusing `other` into `main` at co-located
/// qubits `qubit_i` (of `main`, the control) and `qubit_j` (of `other`,
/// measured in the Z basis): `(probability, corrected state)`, the +1
/// branch first. Zero-probability branches are dropped.
pub fn fuse_branches(
    main: &DensityState,
    other: &DensityState,
    qubit_i: &QubitLabel,
    qubit_j: &QubitLabel,
) -> Result<Vec<(f64, DensityState)>, SimError> {
    for l in main.labels() {
        if other.contains(l) {
            return Err(SimError::DuplicateQubit(l.to_string()));
        }
    }
    let mut joint = main.tensor(other);
    joint.apply_gate(Gate::CX, &[*qubit_i, *qubit_j])?;
    let mut out = Vec::new();
    for plus in [true, false] {
        let mut branch = joint.clone();
        match branch.project_z(qubit_j, plus) {
            Ok(p) => {
                if !plus {
                    // A -1 outcome is repaired by bit flips on the rest of
                    // the consumed state.
                    for l in other.labels() {
                        if l != qubit_j {
                            branch.apply_gate(Gate::X, &[*l])?;
                        }
                    }
                }
                out.push((p, branch));
            }
            Err(SimError::ZeroProbabilityBranch(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// Fuse two states, sampling the measurement outcome.
pub fn fuse(
    main: &DensityState,
    other: &DensityState,
    qubit_i: &QubitLabel,
    qubit_j: &QubitLabel,
    rng: &mut SimRng,
) -> Result<DensityState, SimError> {
    let branches = fuse_branches(main, other, qubit_i, qubit_j)?;
    Ok(pick(branches.into_iter().map(|(p, s)| (p, s)), rng))
}

/// Every outcome combination of a distillation:
/// `(probability, success, post-measurement main state)`.
///
/// `main_qubits` orders the main state's qubits to match the stabilizer
/// letters; `ancilla_qubits` are the co-located ancilla qubits for the
/// support positions, in support order.
pub fn distill_branches(
    main: &DensityState,
    ancilla: &DensityState,
    stabilizer: &Stabilizer,
    main_qubits: &[QubitLabel],
    ancilla_qubits: &[QubitLabel],
) -> Result<Vec<(f64, bool, DensityState)>, SimError> {
    let support = stabilizer.support();
    if support.len() != ancilla_qubits.len() || ancilla.num_qubits() != ancilla_qubits.len() {
        return Err(SimError::InvalidParameter(
            "ancilla weight must match the stabilizer support".into(),
        ));
    }
    stabilizer.validate_for_ghz(main_qubits.len())?;
    let mut joint = main.tensor(ancilla);
    for (pos, anc) in support.iter().zip(ancilla_qubits) {
        let gate = match stabilizer.letters.0[*pos] {
            crate::densmat::Pauli::X => Gate::CX,
            crate::densmat::Pauli::Z => Gate::CZ,
            crate::densmat::Pauli::Y => Gate::CiY,
            crate::densmat::Pauli::I => unreachable!(),
        };
        joint.apply_gate(gate, &[*anc, main_qubits[*pos]])?;
    }
    // X-basis measurement of every ancilla qubit; even parity of -1
    // outcomes heralds success (controlled-iY absorbs stabilizer signs).
    let mut branches = vec![(1.0f64, true, joint)];
    for anc in ancilla_qubits {
        let mut next = Vec::new();
        for (p, even, state) in branches {
            let mut hadamarded = state;
            hadamarded.apply_gate(Gate::H, &[*anc])?;
            for plus in [true, false] {
                let mut b = hadamarded.clone();
                match b.project_z(anc, plus) {
                    Ok(bp) => next.push((p * bp, even == plus, b)),
                    Err(SimError::ZeroProbabilityBranch(_)) => {}
                    Err(e) => return Err(e),
                }
            }
        }
        branches = next;
    }
    Ok(branches
        .into_iter()
        .map(|(p, even, s)| (p, even, s))
        .collect())
}

/// Distill with sampled outcomes: `(success, post state)`. On failure the
/// post-measurement state is what a caller discards.
pub fn distill(
    main: &DensityState,
    ancilla: &DensityState,
    stabilizer: &Stabilizer,
    main_qubits: &[QubitLabel],
    ancilla_qubits: &[QubitLabel],
    rng: &mut SimRng,
) -> Result<(bool, DensityState), SimError> {
    let branches = distill_branches(main, ancilla, stabilizer, main_qubits, ancilla_qubits)?;
    Ok(pick(
        branches.into_iter().map(|(p, ok, s)| (p, (ok, s))),
        rng,
    ))
}

fn pick<T>(branches: impl Iterator<Item = (f64, T)>, rng: &mut SimRng) -> T {
    let branches: Vec<(f64, T)> = branches.collect();
    let total: f64 = branches.iter().map(|(p, _)| p).sum();
    let mut r = rng.gen::<f64>() * total;
    let n = branches.len();
    for (i, (p, v)) in branches.into_iter().enumerate() {
        if r < p || i == n - 1 {
            return v;
        }
        r -= p;
    }
    unreachable!("non-empty branch list")
}
