//! One Monte Carlo shot of the stabilizer-measurement Choi state.
//!
//! Each node's data qubit starts maximally entangled with a noiseless
//! reference qubit. The GHZ protocol runs under the cycle-time cutoff; on
//! completion the GHZ state is consumed to measure the stabilizer on the
//! data qubits (controlled-Pauli from each GHZ qubit, X readout of the GHZ
//! qubits), the recorded parity picks the branch, and the odd branch is
//! canonicalized onto the even one by a fixed single-qubit frame Pauli.
//! Data qubits keep decohering to the stabilizer round boundary either way.

use num_complex::Complex64;

use super::basis::StabilizerType;
use crate::densmat::{DensityState, Gate, NodeId, Pauli, QubitLabel, Slot};
use crate::error::SimError;
use crate::noise::HardwareParams;
use crate::protocols::{Basis, Executor, ProtocolRecipe, RunStatus};
use crate::rng::SimRng;

/// Result of one characterization shot.
pub struct ChoiShot {
    /// Choi state over `[data qubits..., reference qubits...]` in node
    /// order.
    pub state: DensityState,
    /// Whether GHZ generation finished within the cycle time.
    pub completed: bool,
    /// GHZ generation duration (cutoff when not completed).
    pub duration: f64,
    pub bell_attempts: u64,
    pub restart_count: u64,
}

/// Canonical label order of the Choi register.
pub fn choi_labels(nodes: &[NodeId]) -> Vec<QubitLabel> {
    let mut labels: Vec<QubitLabel> = nodes
        .iter()
        .map(|n| QubitLabel::device(*n, Slot::Data))
        .collect();
    labels.extend((0..nodes.len()).map(|i| QubitLabel::Reference(i as u8)));
    labels
}

/// Run one shot and return the Choi register.
pub fn choi_one_shot(
    recipe: &ProtocolRecipe,
    hw: &HardwareParams,
    t_ghz: f64,
    stabilizer: StabilizerType,
    rng: SimRng,
) -> Result<ChoiShot, SimError> {
    let nodes = recipe.nodes.clone();
    let mut exec = Executor::new(hw, &nodes, rng);
    exec.set_deadline(Some(t_ghz));
    // One data-reference pair per node.
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    for (i, node) in nodes.iter().enumerate() {
        let d = QubitLabel::device(*node, Slot::Data);
        let r = QubitLabel::Reference(i as u8);
        exec.insert_cluster(DensityState::from_pure(vec![d, r], &[h, zero, zero, h]));
    }
    let status = exec.run(recipe)?;
    let completed = status == RunStatus::Completed;
    let mut duration = t_ghz;
    if completed {
        duration = exec.now();
        // Consumption happens after generation; the cutoff no longer
        // applies.
        exec.set_deadline(None);
        let gate = match stabilizer {
            StabilizerType::X => Gate::CX,
            StabilizerType::Z => Gate::CZ,
        };
        let mut parity = 1i8;
        for (i, node) in nodes.iter().enumerate() {
            let ghz_qubit = exec.protocol_qubit_in(*node).ok_or_else(|| {
                SimError::Execution(format!("no GHZ qubit left in node {node}"))
            })?;
            if ghz_qubit.slot() != Some(Slot::Comm) {
                exec.exec_swap(*node, Slot::Comm, ghz_qubit.slot().unwrap())?;
            }
            exec.exec_gate2(gate, *node, Slot::Comm, Slot::Data)?;
            let meas_id = 10_000 + i as u32;
            exec.exec_measure(meas_id, *node, Slot::Comm, Basis::X)?;
            parity *= exec.meas_outcome(meas_id).expect("just measured");
        }
        if parity == -1 {
            // Fold the odd branch onto the even one. A Pauli on the data
            // half alone only shifts the error label; applied to the first
            // data qubit and its reference partner together, a Pauli that
            // anticommutes with the stabilizer flips the branch while
            // leaving every error label in place.
            let frame = match stabilizer {
                StabilizerType::X => Pauli::Z,
                StabilizerType::Z => Pauli::X,
            };
            let d0 = QubitLabel::device(nodes[0], Slot::Data);
            exec.apply_frame_pauli(frame, &d0)?;
            exec.apply_frame_pauli(frame, &QubitLabel::Reference(0))?;
        }
    }
    // Residual waiting decoheres the data qubits to the round boundary.
    let boundary = exec.now().max(t_ghz);
    exec.advance_all_to(boundary);
    exec.flush_all()?;
    let state = exec.extract_joined(&choi_labels(&nodes))?;
    Ok(ChoiShot {
        state,
        completed,
        duration,
        bell_attempts: exec.bell_attempts,
        restart_count: exec.restart_count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::{BellParams, CoherenceTimes, NoiseParams, OperationTimes};
    use crate::protocols::builtin_recipe;
    use crate::protocols::CompileConfig;
    use crate::rng::shot_rng;
    use crate::superop::basis::ChoiBasis;

    #[test]
    fn noiseless_shot_is_the_projected_maximally_entangled_state() {
        let hw = HardwareParams::ideal();
        let recipe = builtin_recipe("plain", &CompileConfig::default()).unwrap();
        for stab in [StabilizerType::X, StabilizerType::Z] {
            let shot = choi_one_shot(&recipe, &hw, 1.0, stab, shot_rng(0, 0)).unwrap();
            assert!(shot.completed);
            let basis = ChoiBasis::new(stab, 4);
            let p_identity = basis.probability(shot.state.matrix(), 0, 0);
            assert!(
                (p_identity - 1.0).abs() < 1e-9,
                "{stab:?}: identity entry {p_identity}"
            );
        }
    }

    #[test]
    fn timeout_shot_without_decoherence_is_the_unprojected_state() {
        let mut hw = HardwareParams::ideal();
        hw.times = OperationTimes::default_nv();
        hw.p_link_override = Some(1.0);
        let recipe = builtin_recipe("plain", &CompileConfig::default()).unwrap();
        // Far too short for even one link.
        let shot =
            choi_one_shot(&recipe, &hw, 1e-9, StabilizerType::Z, shot_rng(1, 0)).unwrap();
        assert!(!shot.completed);
        let basis = ChoiBasis::new(StabilizerType::Z, 4);
        // |Psi><Psi| splits evenly over the two branches of the identity
        // representative.
        let p_plus = basis.probability(shot.state.matrix(), 0, 0);
        let p_minus = basis.probability(shot.state.matrix(), 0, 1);
        assert!((p_plus - 0.5).abs() < 1e-9, "p+ = {p_plus}");
        assert!((p_minus - 0.5).abs() < 1e-9, "p- = {p_minus}");
    }

    #[test]
    fn consumption_noise_matches_a_direct_channel_composition() {
        // Two-node instance with gate noise on the controlled-Z
        // consumption gates only. The channel average over all readout
        // branches must match a flat-register composition of depolarized
        // controlled-Z channels, branch probabilities included.
        use crate::densmat::trace_distance;
        use crate::noise::depolarize_2q;
        use crate::protocols::{compile_tree, ProtocolTree};
        let mut hw = HardwareParams::ideal();
        hw.noise = NoiseParams { p_g: 0.03, p_m: 0.0 };
        let tree = ProtocolTree::bell(NodeId::A, NodeId::B);
        let recipe = compile_tree(&tree, "pair", &CompileConfig::default()).unwrap();
        let nodes = [NodeId::A, NodeId::B];
        let labels = choi_labels(&nodes);

        // Executor path, channel-averaged over forced readout branches.
        let mut executed: Option<DensityState> = None;
        for combo in 0..4u32 {
            let branches = vec![combo & 1 == 0, combo & 2 == 0];
            let mut exec = Executor::new(&hw, &nodes, shot_rng(11, combo as u64));
            let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            let zero = Complex64::new(0.0, 0.0);
            for (i, node) in nodes.iter().enumerate() {
                let d = QubitLabel::device(*node, Slot::Data);
                let r = QubitLabel::Reference(i as u8);
                exec.insert_cluster(DensityState::from_pure(vec![d, r], &[h, zero, zero, h]));
            }
            exec.force_outcomes(branches);
            assert_eq!(exec.run(&recipe).unwrap(), RunStatus::Completed);
            let mut parity = 1i8;
            let mut weight = 1.0;
            for (i, node) in nodes.iter().enumerate() {
                exec.exec_gate2(Gate::CZ, *node, Slot::Comm, Slot::Data).unwrap();
                let id = 10_000 + i as u32;
                exec.exec_measure(id, *node, Slot::Comm, Basis::X).unwrap();
                parity *= exec.meas_outcome(id).unwrap();
                weight *= exec.meas_branch_probability(id).unwrap();
            }
            if parity == -1 {
                exec.apply_frame_pauli(Pauli::X, &QubitLabel::device(nodes[0], Slot::Data))
                    .unwrap();
                exec.apply_frame_pauli(Pauli::X, &QubitLabel::Reference(0)).unwrap();
            }
            exec.flush_all().unwrap();
            let state = exec.extract_joined(&labels).unwrap();
            match &mut executed {
                None => {
                    let mut s = state;
                    s.scale(weight);
                    executed = Some(s);
                }
                Some(acc) => acc.accumulate(&state, weight),
            }
        }
        let executed = executed.unwrap();

        // Flat-register oracle: GHZ_2 (x) two data-reference pairs, four
        // depolarized controlled-Z channels... two here, then the same
        // branch average.
        let g: Vec<QubitLabel> = nodes
            .iter()
            .map(|n| QubitLabel::device(*n, Slot::Mem(7)))
            .collect();
        let mut base = DensityState::ghz(g.clone());
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        for (i, node) in nodes.iter().enumerate() {
            let d = QubitLabel::device(*node, Slot::Data);
            let r = QubitLabel::Reference(i as u8);
            base = base.tensor(&DensityState::from_pure(vec![d, r], &[h, zero, zero, h]));
        }
        for (i, node) in nodes.iter().enumerate() {
            let d = QubitLabel::device(*node, Slot::Data);
            base.apply_gate(Gate::CZ, &[g[i], d]).unwrap();
            depolarize_2q(&mut base, &g[i], &d, hw.noise.p_g).unwrap();
            base.apply_gate(Gate::H, &[g[i]]).unwrap();
        }
        let mut oracle: Option<DensityState> = None;
        for combo in 0..4u32 {
            let mut state = base.clone();
            let mut parity = 1i8;
            let mut weight = 1.0;
            let mut dead = false;
            for (i, _) in nodes.iter().enumerate() {
                let plus = [combo & 1 == 0, combo & 2 == 0][i];
                match state.project_z(&g[i], plus) {
                    Ok(p) => weight *= p,
                    Err(_) => {
                        dead = true;
                        break;
                    }
                }
                if !plus {
                    parity = -parity;
                }
            }
            if dead {
                continue;
            }
            if parity == -1 {
                state
                    .apply_pauli(Pauli::X, &QubitLabel::device(nodes[0], Slot::Data))
                    .unwrap();
                state.apply_pauli(Pauli::X, &QubitLabel::Reference(0)).unwrap();
            }
            let state = state.permuted(&labels).unwrap();
            match &mut oracle {
                None => {
                    let mut s = state;
                    s.scale(weight);
                    oracle = Some(s);
                }
                Some(acc) => acc.accumulate(&state, weight),
            }
        }
        let oracle = oracle.unwrap();
        let d = trace_distance(&executed, &oracle).unwrap();
        assert!(d < 1e-9, "channel distance {d}");
    }

    #[test]
    fn bell_noise_only_shot_probabilities_sum_to_one() {
        let hw = HardwareParams {
            bell: BellParams::near_term(),
            coherence: CoherenceTimes::infinite(),
            times: OperationTimes::instantaneous(),
            noise: NoiseParams::noiseless(),
            n_dd: 1,
            p_link_override: Some(1.0),
            noiseless_swaps: false,
        };
        let recipe = builtin_recipe("modicum", &CompileConfig::default()).unwrap();
        for shot_idx in 0..5 {
            let shot =
                choi_one_shot(&recipe, &hw, 1.0, StabilizerType::X, shot_rng(4, shot_idx)).unwrap();
            assert!(shot.completed);
            shot.state.check_physical().unwrap();
            let basis = ChoiBasis::new(StabilizerType::X, 4);
            let mut sum = 0.0;
            let mut identity = 0.0;
            for m in 0..basis.num_representatives() {
                for s in 0..2 {
                    let p = basis.probability(shot.state.matrix(), m, s);
                    assert!(p > -1e-9, "entry ({m},{s}) = {p}");
                    sum += p;
                    if m == 0 && s == 0 {
                        identity = p;
                    }
                }
            }
            assert!((sum - 1.0).abs() < 1e-6, "sum {sum}");
            assert!(identity > 0.7, "stabilizer fidelity {identity}");
        }
    }
}
