//! Deterministic conversion of a timed tree into a protocol recipe.
//!
//! Hardware constraints drive the slot choreography: Bell pairs land on
//! communication qubits, every two-qubit gate controls on the communication
//! qubit, and only communication qubits can be measured. SWAPs are inserted
//! exactly when a memory qubit must act as a control or be measured, plus
//! the evictions that free a communication qubit for an incoming Bell pair.
//! Memory slots are handed out first-free.

use std::collections::BTreeMap;

use super::recipe::{Basis, DistillCheck, Instruction, ProtocolRecipe};
use super::schedule::{schedule_tree, TimedTree, TreeIndex};
use super::tree::ProtocolTree;
use crate::densmat::{Gate, NodeId, Pauli, Slot};
use crate::error::SimError;

#[derive(Debug, Clone, Copy)]
pub struct CompileConfig {
    /// Memory slots available per node next to the communication qubit.
    pub mem_slots: u8,
}

impl Default for CompileConfig {
    fn default() -> Self {
        CompileConfig { mem_slots: 3 }
    }
}

/// Schedule and compile a protocol tree in one go.
pub fn compile_tree(
    tree: &ProtocolTree,
    name: &str,
    config: &CompileConfig,
) -> Result<ProtocolRecipe, SimError> {
    tree.validate()?;
    compile_recipe(&schedule_tree(tree), name, config)
}

type VQubit = u32;

#[derive(Default)]
struct NodeSlots {
    comm: Option<VQubit>,
    mems: Vec<Option<VQubit>>,
    peak: usize,
}

impl NodeSlots {
    fn count(&self) -> usize {
        self.comm.iter().count() + self.mems.iter().filter(|m| m.is_some()).count()
    }
}

struct Compiler<'a> {
    idx: TreeIndex<'a>,
    config: CompileConfig,
    instructions: Vec<Instruction>,
    slots: BTreeMap<NodeId, NodeSlots>,
    locations: BTreeMap<VQubit, (NodeId, Slot)>,
    /// Qubits of the state produced by each emitted element, sorted by node.
    states: BTreeMap<usize, Vec<(NodeId, VQubit)>>,
    /// Instruction range emitted per element.
    segments: BTreeMap<usize, (u32, u32)>,
    next_vq: VQubit,
    next_meas: u32,
}

/// Compile a timed tree into the unique recipe implied by the slot policy.
pub fn compile_recipe(
    timed: &TimedTree,
    name: &str,
    config: &CompileConfig,
) -> Result<ProtocolRecipe, SimError> {
    let idx = TreeIndex::new(&timed.tree);
    let mut c = Compiler {
        idx,
        config: *config,
        instructions: Vec::new(),
        slots: BTreeMap::new(),
        locations: BTreeMap::new(),
        states: BTreeMap::new(),
        segments: BTreeMap::new(),
        next_vq: 0,
        next_meas: 0,
    };
    for node in timed.tree.nodes() {
        c.slots.insert(
            node,
            NodeSlots {
                comm: None,
                mems: vec![None; config.mem_slots as usize],
                peak: 0,
            },
        );
    }

    // Post-order element sequence.
    let mut post = Vec::new();
    fn post_order(idx: &TreeIndex<'_>, id: usize, out: &mut Vec<usize>) {
        if let Some((left, _)) = idx.elements[id].children() {
            let left_id = id + 1;
            let right_id = id + 1 + left.element_count();
            post_order(idx, left_id, out);
            post_order(idx, right_id, out);
        }
        out.push(id);
    }
    post_order(&c.idx, 0, &mut post);

    for step in 1..=timed.num_steps {
        for id in &post {
            if timed.steps[id] == step {
                c.emit_element(*id)?;
            }
        }
        c.instructions.push(Instruction::Sync);
    }

    let k = timed.tree.leaf_count() as u32;
    let q = c.slots.values().map(|s| s.peak).max().unwrap_or(0) as u32;
    Ok(ProtocolRecipe {
        name: name.to_string(),
        k,
        q,
        nodes: timed.tree.nodes(),
        instructions: c.instructions,
    })
}

impl<'a> Compiler<'a> {
    fn emit_element(&mut self, id: usize) -> Result<(), SimError> {
        let start = self.instructions.len() as u32;
        match self.idx.elements[id] {
            ProtocolTree::Bell { nodes } => self.emit_bell(id, *nodes)?,
            ProtocolTree::Fusion { main, at, .. } => {
                let left_id = id + 1;
                let right_id = id + 1 + main.element_count();
                self.emit_fusion(id, left_id, right_id, *at)?;
            }
            ProtocolTree::Distill {
                main, stabilizer, ..
            } => {
                let left_id = id + 1;
                let right_id = id + 1 + main.element_count();
                let stab = stabilizer.clone();
                self.emit_distill(id, left_id, right_id, stab, start)?;
            }
        }
        let end = self.instructions.len() as u32;
        debug_assert!(end > start, "element emitted no instructions");
        self.segments.insert(id, (start, end - 1));
        Ok(())
    }

    fn slot_of(&self, vq: VQubit) -> (NodeId, Slot) {
        self.locations[&vq]
    }

    fn occupant(&self, node: NodeId, slot: Slot) -> Option<VQubit> {
        let ns = &self.slots[&node];
        match slot {
            Slot::Comm => ns.comm,
            Slot::Mem(k) => ns.mems[k as usize],
            Slot::Data => None,
        }
    }

    fn set_slot(&mut self, node: NodeId, slot: Slot, v: Option<VQubit>) {
        let ns = self.slots.get_mut(&node).expect("known node");
        match slot {
            Slot::Comm => ns.comm = v,
            Slot::Mem(k) => ns.mems[k as usize] = v,
            Slot::Data => unreachable!("data slots never hold protocol qubits"),
        }
        if let Some(vq) = v {
            self.locations.insert(vq, (node, slot));
        }
        let count = ns.count();
        let ns = self.slots.get_mut(&node).unwrap();
        ns.peak = ns.peak.max(count);
    }

    fn free_mem_slot(&self, node: NodeId) -> Result<Slot, SimError> {
        let ns = &self.slots[&node];
        ns.mems
            .iter()
            .position(|m| m.is_none())
            .map(|k| Slot::Mem(k as u8))
            .ok_or_else(|| {
                SimError::Recipe(format!(
                    "node {node} exceeds the configured {} memory slots",
                    self.config.mem_slots
                ))
            })
    }

    /// Exchange the occupants of two slots of one node.
    fn emit_swap(&mut self, node: NodeId, s1: Slot, s2: Slot) {
        let (o1, o2) = (self.occupant(node, s1), self.occupant(node, s2));
        self.instructions.push(Instruction::Swap { node, s1, s2 });
        self.set_slot(node, s1, o2);
        self.set_slot(node, s2, o1);
        if o2.is_none() {
            self.set_slot(node, s1, None);
        }
        if o1.is_none() {
            self.set_slot(node, s2, None);
        }
    }

    /// Make room on the communication qubit for an incoming Bell half.
    fn free_comm(&mut self, node: NodeId) -> Result<(), SimError> {
        if self.occupant(node, Slot::Comm).is_some() {
            let target = self.free_mem_slot(node)?;
            self.emit_swap(node, Slot::Comm, target);
        }
        Ok(())
    }

    /// Route a qubit to the communication slot of its node.
    fn ensure_comm(&mut self, vq: VQubit) {
        let (node, slot) = self.slot_of(vq);
        if slot != Slot::Comm {
            self.emit_swap(node, Slot::Comm, slot);
        }
    }

    fn emit_bell(&mut self, id: usize, nodes: [NodeId; 2]) -> Result<(), SimError> {
        for n in nodes {
            self.free_comm(n)?;
        }
        self.instructions.push(Instruction::Link {
            a: nodes[0],
            b: nodes[1],
        });
        let mut qubits = Vec::new();
        let mut sorted = nodes;
        sorted.sort();
        for n in sorted {
            let vq = self.next_vq;
            self.next_vq += 1;
            self.set_slot(n, Slot::Comm, Some(vq));
            qubits.push((n, vq));
        }
        self.states.insert(id, qubits);
        Ok(())
    }

    fn emit_fusion(
        &mut self,
        id: usize,
        main_id: usize,
        other_id: usize,
        at: NodeId,
    ) -> Result<(), SimError> {
        let main_state = self.states[&main_id].clone();
        let other_state = self.states[&other_id].clone();
        let qi = main_state
            .iter()
            .find(|(n, _)| *n == at)
            .expect("fusion node in main")
            .1;
        let qj = other_state
            .iter()
            .find(|(n, _)| *n == at)
            .expect("fusion node in other")
            .1;
        // The main qubit controls, so it must sit on the communication slot.
        self.ensure_comm(qi);
        let (_, tslot) = self.slot_of(qj);
        self.instructions.push(Instruction::Gate2 {
            gate: Gate::CX,
            node: at,
            control: Slot::Comm,
            target: tslot,
        });
        // The measured qubit must reach the communication slot in turn.
        self.emit_swap(at, Slot::Comm, tslot);
        let meas_id = self.next_meas;
        self.next_meas += 1;
        self.instructions.push(Instruction::Measure {
            id: meas_id,
            node: at,
            slot: Slot::Comm,
            basis: Basis::Z,
        });
        self.set_slot(at, Slot::Comm, None);
        self.locations.remove(&qj);
        // On a -1 outcome every remaining qubit of the measured state takes
        // a Pauli-X correction.
        let mut merged: Vec<(NodeId, VQubit)> = main_state;
        for (n, vq) in other_state {
            if vq == qj {
                continue;
            }
            let (node, slot) = self.slot_of(vq);
            debug_assert_eq!(node, n);
            self.instructions.push(Instruction::Correct {
                meas: meas_id,
                pauli: Pauli::X,
                node,
                slot,
            });
            merged.push((n, vq));
        }
        merged.sort_by_key(|(n, _)| *n);
        self.states.insert(id, merged);
        Ok(())
    }

    fn emit_distill(
        &mut self,
        id: usize,
        main_id: usize,
        anc_id: usize,
        stab: super::stabilizer::Stabilizer,
        own_start: u32,
    ) -> Result<(), SimError> {
        let main_state = self.states[&main_id].clone();
        let anc_state = self.states[&anc_id].clone();
        let mut meas_ids = Vec::new();
        for pos in stab.support() {
            let (node, qm) = main_state[pos];
            let qa = anc_state
                .iter()
                .find(|(n, _)| *n == node)
                .expect("ancilla on support node")
                .1;
            self.ensure_comm(qa);
            let (_, mslot) = self.slot_of(qm);
            let gate = match stab.letters.0[pos] {
                Pauli::X => Gate::CX,
                Pauli::Z => Gate::CZ,
                Pauli::Y => Gate::CiY,
                Pauli::I => unreachable!("support positions are non-identity"),
            };
            self.instructions.push(Instruction::Gate2 {
                gate,
                node,
                control: Slot::Comm,
                target: mslot,
            });
            let meas_id = self.next_meas;
            self.next_meas += 1;
            self.instructions.push(Instruction::Measure {
                id: meas_id,
                node,
                slot: Slot::Comm,
                basis: Basis::X,
            });
            self.set_slot(node, Slot::Comm, None);
            self.locations.remove(&qa);
            meas_ids.push(meas_id);
        }
        // Controlled-iY absorbs the sign of Y-carrying stabilizers, so the
        // success condition is always even parity for generated recipes.
        let drop = main_state.iter().map(|(_, vq)| self.slot_of(*vq)).collect();
        let replay = self.subtree_ranges(id, own_start);
        self.instructions.push(Instruction::Distill(DistillCheck {
            parity_even: true,
            meas_ids,
            replay,
            drop,
        }));
        self.states.insert(id, main_state);
        Ok(())
    }

    /// Merged instruction ranges of a subtree, including the distillation
    /// element currently being emitted: its own span starts at `own_start`
    /// and ends at the check instruction pushed right after this call.
    fn subtree_ranges(&self, id: usize, own_start: u32) -> Vec<(u32, u32)> {
        let size = self.idx.elements[id].element_count();
        let mut spans: Vec<(u32, u32)> = (id..id + size)
            .filter_map(|e| self.segments.get(&e).copied())
            .collect();
        spans.push((own_start, self.instructions.len() as u32));
        spans.sort_unstable();
        let mut merged: Vec<(u32, u32)> = Vec::new();
        for (s, e) in spans {
            match merged.last_mut() {
                Some((_, le)) if s <= *le + 1 => *le = (*le).max(e),
                _ => merged.push((s, e)),
            }
        }
        merged
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocols::stabilizer::Stabilizer;

    fn plain_tree() -> ProtocolTree {
        ProtocolTree::fuse(
            ProtocolTree::fuse(
                ProtocolTree::bell(NodeId::A, NodeId::B),
                ProtocolTree::bell(NodeId::B, NodeId::C),
                NodeId::B,
            ),
            ProtocolTree::bell(NodeId::C, NodeId::D),
            NodeId::C,
        )
    }

    fn modicum_tree() -> ProtocolTree {
        ProtocolTree::distill(
            plain_tree(),
            ProtocolTree::bell(NodeId::B, NodeId::C),
            Stabilizer::parse("+IZZI").unwrap(),
        )
    }

    #[test]
    fn plain_compiles_to_k3_q2() {
        let r = compile_tree(&plain_tree(), "plain", &CompileConfig::default()).unwrap();
        assert_eq!(r.k, 3);
        assert_eq!(r.q, 2);
        assert_eq!(r.derived_k(), 3);
    }

    #[test]
    fn modicum_compiles_to_k4_q2() {
        let r = compile_tree(&modicum_tree(), "modicum", &CompileConfig::default()).unwrap();
        assert_eq!(r.k, 4);
        assert_eq!(r.q, 2);
    }

    #[test]
    fn compilation_is_deterministic() {
        let a = compile_tree(&modicum_tree(), "modicum", &CompileConfig::default()).unwrap();
        let b = compile_tree(&modicum_tree(), "modicum", &CompileConfig::default()).unwrap();
        assert_eq!(a.to_text(), b.to_text());
    }

    #[test]
    fn recipes_respect_hardware_constraints() {
        for tree in [plain_tree(), modicum_tree()] {
            let r = compile_tree(&tree, "t", &CompileConfig::default()).unwrap();
            for ins in &r.instructions {
                match ins {
                    Instruction::Gate2 { control, .. } => assert_eq!(*control, Slot::Comm),
                    Instruction::Measure { slot, .. } => assert_eq!(*slot, Slot::Comm),
                    _ => {}
                }
            }
            // Round trip through text.
            let parsed = ProtocolRecipe::parse(&r.to_text(), "mem").unwrap();
            assert_eq!(parsed, r);
        }
    }

    #[test]
    fn tight_memory_budget_is_reported() {
        let err = compile_tree(&modicum_tree(), "m", &CompileConfig { mem_slots: 0 });
        assert!(matches!(err, Err(SimError::Recipe(_))));
    }
}
