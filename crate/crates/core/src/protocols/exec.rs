//! Time-tracked execution of protocol recipes on the hardware model.
//!
//! Every node carries its own clock. Bell generation attempts are geometric
//! trials quantized to the dynamical-decoupling grid; gates, swaps, and
//! measurements start at the next refocusing point after their operands are
//! free; nodes synchronize whenever an outcome must be communicated
//! classically. Decoherence is bookkept lazily: clock advances accrue decay
//! exponents per qubit (link-mode coherence times while the node is
//! generating entanglement, idle-mode otherwise) and the accumulated channel
//! is applied just before the qubit is next touched.

use std::collections::{BTreeMap, VecDeque};

use rand::Rng;

use super::recipe::{Basis, DistillCheck, Instruction, ProtocolRecipe};
use crate::densmat::{DensityState, Gate, NodeId, Pauli, QubitLabel, Slot};
use crate::error::SimError;
use crate::noise::{decohere_exponents, depolarize_2q, flip_measurement, HardwareParams};
use crate::rng::SimRng;

/// Result of running a recipe to completion or abort.
#[derive(Debug, Clone)]
pub struct ExecutionResult {
    /// The generated GHZ state over the protocol's nodes (sorted order),
    /// or `None` on timeout.
    pub ghz_state: Option<DensityState>,
    /// Wall-clock duration of the run; on timeout, the cutoff itself.
    pub duration: f64,
    pub bell_attempts: u64,
    pub restart_count: u64,
    pub timed_out: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    Completed,
    TimedOut,
}

#[derive(Debug, Clone, Copy, Default)]
struct Decay {
    x1: f64,
    x2: f64,
}

#[derive(Debug, Clone)]
struct LiveQubit {
    cluster: usize,
    decay: Decay,
}

#[derive(Debug, Clone, Copy)]
struct MeasRecord {
    outcome: i8,
    done_at: f64,
    branch_prob: f64,
}

/// Low-level executor; the superoperator builder drives it directly to
/// append the stabilizer-consumption circuit after a recipe completes.
pub struct Executor<'h> {
    pub hw: &'h HardwareParams,
    rng: SimRng,
    forced_outcomes: Option<VecDeque<bool>>,
    clusters: Vec<Option<DensityState>>,
    qubits: BTreeMap<QubitLabel, LiveQubit>,
    clocks: BTreeMap<NodeId, f64>,
    meas: BTreeMap<u32, MeasRecord>,
    pub bell_attempts: u64,
    pub restart_count: u64,
    deadline: Option<f64>,
    timed_out: bool,
}

impl<'h> Executor<'h> {
    pub fn new(hw: &'h HardwareParams, nodes: &[NodeId], rng: SimRng) -> Self {
        Executor {
            hw,
            rng,
            forced_outcomes: None,
            clusters: Vec::new(),
            qubits: BTreeMap::new(),
            clocks: nodes.iter().map(|n| (*n, 0.0)).collect(),
            meas: BTreeMap::new(),
            bell_attempts: 0,
            restart_count: 0,
            deadline: None,
            timed_out: false,
        }
    }

    /// Replace sampled measurement outcomes by a fixed branch sequence
    /// (`true` = the +1 branch); used by the brute-force equivalence tests.
    pub fn force_outcomes(&mut self, outcomes: Vec<bool>) {
        self.forced_outcomes = Some(outcomes.into());
    }

    pub fn set_deadline(&mut self, deadline: Option<f64>) {
        self.deadline = deadline;
    }

    pub fn timed_out(&self) -> bool {
        self.timed_out
    }

    pub fn now(&self) -> f64 {
        self.clocks.values().fold(0.0, |a, b| a.max(*b))
    }

    pub fn rng_mut(&mut self) -> &mut SimRng {
        &mut self.rng
    }

    /// Insert an externally prepared cluster (e.g. data-reference pairs for
    /// channel characterization).
    pub fn insert_cluster(&mut self, state: DensityState) {
        let id = self.clusters.len();
        for label in state.labels() {
            self.qubits.insert(
                *label,
                LiveQubit {
                    cluster: id,
                    decay: Decay::default(),
                },
            );
        }
        self.clusters.push(Some(state));
    }

    // ----- time and decoherence bookkeeping -----

    /// Next refocusing point at or after `t`.
    fn align(&self, t: f64) -> f64 {
        let t_dd = self.hw.t_dd();
        if t_dd <= 0.0 {
            return t;
        }
        let r = t / t_dd;
        let snapped = (r - 1e-9).ceil().max(0.0);
        snapped * t_dd
    }

    /// Advance one node's clock, accruing decay on every qubit it holds.
    fn advance_node(&mut self, node: NodeId, to: f64, link_mode: bool) {
        let from = self.clocks[&node];
        if to <= from {
            return;
        }
        let dt = to - from;
        let co = &self.hw.coherence;
        for (label, q) in self.qubits.iter_mut() {
            if label.node() != Some(node) {
                continue;
            }
            let (t1, t2) = if label.is_electron() {
                (co.t1_idle_e, co.t2_idle_e)
            } else if link_mode {
                (co.t1_link_n, co.t2_link_n)
            } else {
                (co.t1_idle_n, co.t2_idle_n)
            };
            q.decay.x1 += dt / t1;
            q.decay.x2 += dt / t2;
        }
        self.clocks.insert(node, to);
    }

    fn advance_all(&mut self, to: f64) {
        let nodes: Vec<NodeId> = self.clocks.keys().copied().collect();
        for n in nodes {
            let t = self.clocks[&n].max(to);
            self.advance_node(n, t, false);
        }
    }

    /// Apply the accrued decoherence of one qubit and reset its exponents.
    fn flush(&mut self, label: &QubitLabel) -> Result<(), SimError> {
        let q = self
            .qubits
            .get_mut(label)
            .ok_or_else(|| SimError::UnknownQubit(label.to_string()))?;
        let decay = std::mem::take(&mut q.decay);
        if decay.x1 > 0.0 || decay.x2 > 0.0 {
            let cluster = q.cluster;
            let state = self.clusters[cluster]
                .as_mut()
                .expect("live qubit points at live cluster");
            decohere_exponents(state, label, decay.x1, decay.x2)?;
        }
        Ok(())
    }

    /// Apply all outstanding decoherence (e.g. before reading out states).
    pub fn flush_all(&mut self) -> Result<(), SimError> {
        let labels: Vec<QubitLabel> = self.qubits.keys().copied().collect();
        for l in labels {
            self.flush(&l)?;
        }
        Ok(())
    }

    /// Synchronize every node (classical barrier).
    pub fn sync_all(&mut self) {
        let t = self.now();
        self.advance_all(t);
    }

    /// Advance all nodes to the deadline and mark the run aborted.
    fn abort_at_deadline(&mut self) -> Result<(), SimError> {
        let d = self.deadline.expect("abort only with a deadline");
        self.advance_all(d);
        self.flush_all()?;
        self.timed_out = true;
        Ok(())
    }

    // ----- cluster plumbing -----

    fn cluster_of(&self, label: &QubitLabel) -> Result<usize, SimError> {
        self.qubits
            .get(label)
            .map(|q| q.cluster)
            .ok_or_else(|| SimError::UnknownQubit(label.to_string()))
    }

    pub fn occupied(&self, label: &QubitLabel) -> bool {
        self.qubits.contains_key(label)
    }

    /// Merge the clusters containing the two labels if they differ.
    fn entangle_clusters(&mut self, a: &QubitLabel, b: &QubitLabel) -> Result<usize, SimError> {
        let ca = self.cluster_of(a)?;
        let cb = self.cluster_of(b)?;
        if ca == cb {
            return Ok(ca);
        }
        let sa = self.clusters[ca].take().expect("live cluster");
        let sb = self.clusters[cb].take().expect("live cluster");
        let joined = sa.tensor(&sb);
        self.clusters[ca] = Some(joined);
        for q in self.qubits.values_mut() {
            if q.cluster == cb {
                q.cluster = ca;
            }
        }
        Ok(ca)
    }

    /// Remove a qubit that was measured or traced out of its cluster.
    fn remove_qubit(&mut self, label: &QubitLabel) {
        if let Some(q) = self.qubits.remove(label) {
            if self.clusters[q.cluster]
                .as_ref()
                .map(|s| s.num_qubits() == 0)
                .unwrap_or(false)
            {
                self.clusters[q.cluster] = None;
            }
        }
    }

    /// The state holding the given qubits, reordered to the label order.
    pub fn extract_state(&self, order: &[QubitLabel]) -> Result<DensityState, SimError> {
        let c = self.cluster_of(&order[0])?;
        for l in order {
            if self.cluster_of(l)? != c {
                return Err(SimError::Execution(format!(
                    "{l} is not entangled with {}",
                    order[0]
                )));
            }
        }
        let state = self.clusters[c].as_ref().expect("live cluster");
        if state.num_qubits() != order.len() {
            return Err(SimError::Execution(format!(
                "cluster holds {} qubits, expected {}",
                state.num_qubits(),
                order.len()
            )));
        }
        state.permuted(order)
    }

    /// Tensor together however many clusters hold the given qubits and
    /// return the joined state in the requested label order.
    pub fn extract_joined(&mut self, order: &[QubitLabel]) -> Result<DensityState, SimError> {
        for l in order.iter().skip(1) {
            let first = order[0];
            let (ca, cb) = (self.cluster_of(&first)?, self.cluster_of(l)?);
            if ca != cb {
                self.entangle_clusters(&first, l)?;
            }
        }
        self.extract_state(order)
    }

    /// Noiseless zero-duration Pauli frame operation (branch
    /// canonicalization, not a hardware gate).
    pub fn apply_frame_pauli(&mut self, p: Pauli, label: &QubitLabel) -> Result<(), SimError> {
        let c = self.cluster_of(label)?;
        self.clusters[c]
            .as_mut()
            .expect("live cluster")
            .apply_pauli(p, label)
    }

    /// Idle every node forward to the given time (no-op for nodes already
    /// past it).
    pub fn advance_all_to(&mut self, to: f64) {
        self.advance_all(to);
    }

    /// The protocol qubit currently held by a node, if any.
    pub fn protocol_qubit_in(&self, node: NodeId) -> Option<QubitLabel> {
        self.qubits
            .keys()
            .find(|l| {
                l.node() == Some(node)
                    && matches!(l.slot(), Some(Slot::Comm) | Some(Slot::Mem(_)))
            })
            .copied()
    }

    /// All live device qubits in protocol slots (not data, not reference).
    pub fn protocol_qubits(&self) -> Vec<QubitLabel> {
        self.qubits
            .keys()
            .filter(|l| matches!(l.slot(), Some(Slot::Comm) | Some(Slot::Mem(_))))
            .copied()
            .collect()
    }

    // ----- timed operations -----

    fn gate1_duration(&self, gate: Gate, slot: Slot) -> f64 {
        let t = &self.hw.times;
        match (gate, slot.is_electron()) {
            (Gate::X | Gate::Y, true) => t.t_xy_e,
            (Gate::X | Gate::Y, false) => t.t_xy_n,
            (Gate::Z | Gate::H, true) => t.t_zh_e,
            (Gate::Z | Gate::H, false) => t.t_zh_n,
            _ => unreachable!("single-qubit gate expected"),
        }
    }

    fn would_exceed(&self, t: f64) -> bool {
        self.deadline.map(|d| t > d + 1e-15).unwrap_or(false)
    }

    /// Geometric number of attempts until the next link succeeds.
    fn sample_attempts(&mut self) -> u64 {
        let p = self.hw.p_link();
        if p >= 1.0 {
            return 1;
        }
        let u: f64 = 1.0 - self.rng.gen::<f64>();
        1 + (u.ln() / (1.0 - p).ln()).floor() as u64
    }

    fn exec_link(&mut self, a: NodeId, b: NodeId) -> Result<RunStatus, SimError> {
        for n in [a, b] {
            let comm = QubitLabel::device(n, Slot::Comm);
            if self.occupied(&comm) {
                return Err(SimError::Execution(format!(
                    "link needs a free communication qubit at {n}"
                )));
            }
        }
        let ready = self.clocks[&a].max(self.clocks[&b]);
        let start = self.align(ready);
        let attempts = self.sample_attempts();
        let windows = attempts.div_ceil(2 * self.hw.n_dd as u64);
        let t_dd = self.hw.t_dd();
        let done = start + windows as f64 * t_dd;
        if self.would_exceed(done) {
            // The round is lost; both nodes keep attempting until the cutoff.
            let d = self.deadline.unwrap();
            for n in [a, b] {
                let t = self.clocks[&n];
                self.advance_node(n, start.max(t).min(d), false);
                self.advance_node(n, d, true);
            }
            self.abort_at_deadline()?;
            return Ok(RunStatus::TimedOut);
        }
        for n in [a, b] {
            self.advance_node(n, start, false);
            self.advance_node(n, done, true);
        }
        self.bell_attempts += attempts;
        let la = QubitLabel::device(a, Slot::Comm);
        let lb = QubitLabel::device(b, Slot::Comm);
        let (state, _p) = crate::noise::bell_state_ghz_frame(&self.hw.bell, [la, lb])?;
        self.insert_cluster(state);
        Ok(RunStatus::Completed)
    }

    /// Exchange the occupants of two slots of a node, as three noisy CNOT
    /// gates. A swap with an empty side moves the occupant through the junk
    /// spin of the free slot; with both sides empty it is a no-op.
    pub fn exec_swap(&mut self, node: NodeId, s1: Slot, s2: Slot) -> Result<RunStatus, SimError> {
        let l1 = QubitLabel::device(node, s1);
        let l2 = QubitLabel::device(node, s2);
        let (o1, o2) = (self.occupied(&l1), self.occupied(&l2));
        if !o1 && !o2 {
            return Ok(RunStatus::Completed);
        }
        let start = self.align(self.clocks[&node]);
        let done = start + self.hw.times.t_swap;
        if self.would_exceed(done) {
            self.abort_at_deadline()?;
            return Ok(RunStatus::TimedOut);
        }
        self.advance_node(node, start, false);
        for l in [&l1, &l2] {
            if self.occupied(l) {
                self.flush(l)?;
            }
        }
        let noiseless = self.hw.noiseless_swaps || self.hw.noise.p_g == 0.0;
        if noiseless {
            // A perfect SWAP is a relabeling.
            if o1 && o2 {
                let (c1, c2) = (self.cluster_of(&l1)?, self.cluster_of(&l2)?);
                if c1 == c2 {
                    self.clusters[c1].as_mut().unwrap().swap_labels(&l1, &l2)?;
                } else {
                    self.clusters[c1].as_mut().unwrap().relabel(&l1, l2)?;
                    self.clusters[c2].as_mut().unwrap().relabel(&l2, l1)?;
                }
                let (qa, qb) = (self.qubits[&l1].clone(), self.qubits[&l2].clone());
                self.qubits.insert(l1, qb);
                self.qubits.insert(l2, qa);
            } else {
                let (from, to) = if o1 { (l1, l2) } else { (l2, l1) };
                let c = self.cluster_of(&from)?;
                self.clusters[c].as_mut().unwrap().relabel(&from, to)?;
                let q = self.qubits.remove(&from).unwrap();
                self.qubits.insert(to, q);
            }
        } else {
            // Bring in a |0> junk spin when one side is free.
            let injected = if o1 && o2 {
                self.entangle_clusters(&l1, &l2)?;
                None
            } else {
                let (live, free) = if o1 { (l1, l2) } else { (l2, l1) };
                let c = self.cluster_of(&live)?;
                let fresh = DensityState::zeros(vec![free]);
                let joined = self.clusters[c].take().unwrap().tensor(&fresh);
                self.clusters[c] = Some(joined);
                self.qubits.insert(
                    free,
                    LiveQubit {
                        cluster: c,
                        decay: Decay::default(),
                    },
                );
                Some(if o1 { (l1, l2) } else { (l2, l1) })
            };
            let c = self.cluster_of(&l1)?;
            let state = self.clusters[c].as_mut().unwrap();
            for (ctrl, tgt) in [(&l1, &l2), (&l2, &l1), (&l1, &l2)] {
                state.apply_gate(Gate::CX, &[*ctrl, *tgt])?;
                depolarize_2q(state, &l1, &l2, self.hw.noise.p_g)?;
            }
            if let Some((was_live, _was_free)) = injected {
                // The occupant moved; the vacated spin is junk again.
                let c = self.cluster_of(&was_live)?;
                let state = self.clusters[c].as_mut().unwrap();
                let reduced = state.partial_trace(&[was_live])?;
                *state = reduced;
                self.remove_qubit(&was_live);
            }
        }
        self.advance_node(node, done, false);
        Ok(RunStatus::Completed)
    }

    pub fn exec_gate1(&mut self, gate: Gate, node: NodeId, slot: Slot) -> Result<RunStatus, SimError> {
        let label = QubitLabel::device(node, slot);
        let start = self.align(self.clocks[&node]);
        let done = start + self.gate1_duration(gate, slot);
        if self.would_exceed(done) {
            self.abort_at_deadline()?;
            return Ok(RunStatus::TimedOut);
        }
        self.advance_node(node, start, false);
        self.flush(&label)?;
        let c = self.cluster_of(&label)?;
        self.clusters[c].as_mut().unwrap().apply_gate(gate, &[label])?;
        self.advance_node(node, done, false);
        Ok(RunStatus::Completed)
    }

    /// Intra-node two-qubit gate controlled on the communication qubit,
    /// followed by two-qubit depolarizing noise.
    pub fn exec_gate2(
        &mut self,
        gate: Gate,
        node: NodeId,
        control: Slot,
        target: Slot,
    ) -> Result<RunStatus, SimError> {
        if control != Slot::Comm {
            return Err(SimError::Execution(format!(
                "two-qubit gates must control on the communication qubit, got {control}"
            )));
        }
        let lc = QubitLabel::device(node, control);
        let lt = QubitLabel::device(node, target);
        let start = self.align(self.clocks[&node]);
        let done = start + self.hw.times.t_2q;
        if self.would_exceed(done) {
            self.abort_at_deadline()?;
            return Ok(RunStatus::TimedOut);
        }
        self.advance_node(node, start, false);
        self.flush(&lc)?;
        self.flush(&lt)?;
        let c = self.entangle_clusters(&lc, &lt)?;
        let state = self.clusters[c].as_mut().unwrap();
        state.apply_gate(gate, &[lc, lt])?;
        depolarize_2q(state, &lc, &lt, self.hw.noise.p_g)?;
        self.advance_node(node, done, false);
        Ok(RunStatus::Completed)
    }

    /// Measure a communication qubit. The recorded outcome may be flipped
    /// by measurement noise while the state collapses along the true branch.
    pub fn exec_measure(
        &mut self,
        id: u32,
        node: NodeId,
        slot: Slot,
        basis: Basis,
    ) -> Result<RunStatus, SimError> {
        if slot != Slot::Comm {
            return Err(SimError::Execution(
                "only communication qubits can be measured".into(),
            ));
        }
        let label = QubitLabel::device(node, slot);
        let start = self.align(self.clocks[&node]);
        let extra = match basis {
            Basis::X => self.hw.times.t_zh_e,
            Basis::Z => 0.0,
        };
        let done = start + extra + self.hw.times.t_meas;
        if self.would_exceed(done) {
            self.abort_at_deadline()?;
            return Ok(RunStatus::TimedOut);
        }
        self.advance_node(node, start, false);
        self.flush(&label)?;
        let c = self.cluster_of(&label)?;
        let state = self.clusters[c].as_mut().unwrap();
        if basis == Basis::X {
            state.apply_gate(Gate::H, &[label])?;
        }
        let p_plus = state.prob_z_plus(&label)?;
        let plus = match self.forced_outcomes.as_mut().and_then(|f| f.pop_front()) {
            Some(forced) => forced,
            None => self.rng.gen::<f64>() < p_plus,
        };
        let branch_prob = state.project_z(&label, plus)?;
        self.remove_qubit(&label);
        let true_outcome: i8 = if plus { 1 } else { -1 };
        let recorded = flip_measurement(true_outcome, self.hw.noise.p_m, &mut self.rng);
        self.meas.insert(
            id,
            MeasRecord {
                outcome: recorded,
                done_at: done,
                branch_prob,
            },
        );
        self.advance_node(node, done, false);
        Ok(RunStatus::Completed)
    }

    pub fn meas_outcome(&self, id: u32) -> Option<i8> {
        self.meas.get(&id).map(|m| m.outcome)
    }

    /// Born probability of the branch the measurement actually took.
    pub fn meas_branch_probability(&self, id: u32) -> Option<f64> {
        self.meas.get(&id).map(|m| m.branch_prob)
    }

    fn exec_correct(
        &mut self,
        meas: u32,
        pauli: Pauli,
        node: NodeId,
        slot: Slot,
    ) -> Result<RunStatus, SimError> {
        let rec = *self
            .meas
            .get(&meas)
            .ok_or_else(|| SimError::Execution(format!("unknown measurement {meas}")))?;
        // Classical message: the target node cannot act before the outcome
        // exists.
        let t = self.clocks[&node].max(rec.done_at);
        self.advance_node(node, t, false);
        if rec.outcome == 1 {
            return Ok(RunStatus::Completed);
        }
        let gate = match pauli {
            Pauli::X => Gate::X,
            Pauli::Y => Gate::Y,
            Pauli::Z => Gate::Z,
            Pauli::I => return Ok(RunStatus::Completed),
        };
        self.exec_gate1(gate, node, slot)
    }

    fn exec_distill(&mut self, check: &DistillCheck) -> Result<DistillVerdict, SimError> {
        let mut t_known = 0.0f64;
        let mut product = 1i8;
        for id in &check.meas_ids {
            let rec = self
                .meas
                .get(id)
                .ok_or_else(|| SimError::Execution(format!("unknown measurement {id}")))?;
            t_known = t_known.max(rec.done_at);
            product *= rec.outcome;
        }
        // The nodes holding the main state wait for the verdict.
        for (node, _) in &check.drop {
            let t = self.clocks[node].max(t_known);
            self.advance_node(*node, t, false);
        }
        let success = (product == 1) == check.parity_even;
        if success {
            return Ok(DistillVerdict::Success);
        }
        self.restart_count += 1;
        // Discard the post-measurement main state.
        let mut by_cluster: BTreeMap<usize, Vec<QubitLabel>> = BTreeMap::new();
        for (node, slot) in &check.drop {
            let label = QubitLabel::device(*node, *slot);
            let c = self.cluster_of(&label)?;
            by_cluster.entry(c).or_default().push(label);
        }
        for (c, labels) in by_cluster {
            let state = self.clusters[c].as_ref().expect("live cluster");
            if labels.len() == state.num_qubits() {
                self.clusters[c] = None;
            } else {
                let reduced = state.partial_trace(&labels)?;
                self.clusters[c] = Some(reduced);
            }
            for l in labels {
                self.qubits.remove(&l);
            }
        }
        Ok(DistillVerdict::Failure)
    }

    fn exec_instruction(&mut self, ins: &Instruction) -> Result<Flow, SimError> {
        let status = match ins {
            Instruction::Sync => {
                self.sync_all();
                RunStatus::Completed
            }
            Instruction::Link { a, b } => self.exec_link(*a, *b)?,
            Instruction::Swap { node, s1, s2 } => self.exec_swap(*node, *s1, *s2)?,
            Instruction::Gate1 { gate, node, slot } => self.exec_gate1(*gate, *node, *slot)?,
            Instruction::Gate2 {
                gate,
                node,
                control,
                target,
            } => self.exec_gate2(*gate, *node, *control, *target)?,
            Instruction::Measure {
                id,
                node,
                slot,
                basis,
            } => self.exec_measure(*id, *node, *slot, *basis)?,
            Instruction::Correct {
                meas,
                pauli,
                node,
                slot,
            } => self.exec_correct(*meas, *pauli, *node, *slot)?,
            Instruction::Distill(check) => {
                return match self.exec_distill(check)? {
                    DistillVerdict::Success => Ok(Flow::Continue),
                    DistillVerdict::Failure => {
                        let mut indices = Vec::new();
                        for (lo, hi) in &check.replay {
                            indices.extend((*lo as usize)..=(*hi as usize));
                        }
                        Ok(Flow::Replay(indices))
                    }
                };
            }
        };
        Ok(match status {
            RunStatus::Completed => Flow::Continue,
            RunStatus::TimedOut => Flow::TimedOut,
        })
    }

    /// Run a recipe to completion or cutoff.
    pub fn run(&mut self, recipe: &ProtocolRecipe) -> Result<RunStatus, SimError> {
        let program: Vec<usize> = (0..recipe.instructions.len()).collect();
        let mut stack: Vec<(Vec<usize>, usize)> = vec![(program, 0)];
        while let Some(frame) = stack.last_mut() {
            if frame.1 >= frame.0.len() {
                stack.pop();
                continue;
            }
            let idx = frame.0[frame.1];
            frame.1 += 1;
            match self.exec_instruction(&recipe.instructions[idx])? {
                Flow::Continue => {}
                Flow::Replay(indices) => stack.push((indices, 0)),
                Flow::TimedOut => return Ok(RunStatus::TimedOut),
            }
        }
        self.sync_all();
        if self.would_exceed(self.now()) {
            self.abort_at_deadline()?;
            return Ok(RunStatus::TimedOut);
        }
        Ok(RunStatus::Completed)
    }
}

enum DistillVerdict {
    Success,
    Failure,
}

enum Flow {
    Continue,
    Replay(Vec<usize>),
    TimedOut,
}

/// Execute a protocol recipe under the hardware model with an optional GHZ
/// cycle-time cutoff.
pub fn execute_recipe(
    recipe: &ProtocolRecipe,
    hw: &HardwareParams,
    t_ghz: Option<f64>,
    rng: SimRng,
) -> Result<ExecutionResult, SimError> {
    let mut exec = Executor::new(hw, &recipe.nodes, rng);
    exec.set_deadline(t_ghz);
    let status = exec.run(recipe)?;
    match status {
        RunStatus::TimedOut => Ok(ExecutionResult {
            ghz_state: None,
            duration: t_ghz.expect("timeout implies a deadline"),
            bell_attempts: exec.bell_attempts,
            restart_count: exec.restart_count,
            timed_out: true,
        }),
        RunStatus::Completed => {
            exec.flush_all()?;
            let mut labels = exec.protocol_qubits();
            labels.sort();
            if labels.len() != recipe.nodes.len() {
                return Err(SimError::Execution(format!(
                    "expected one output qubit per node, found {}",
                    labels.len()
                )));
            }
            let state = exec.extract_state(&labels)?;
            Ok(ExecutionResult {
                ghz_state: Some(state),
                duration: exec.now(),
                bell_attempts: exec.bell_attempts,
                restart_count: exec.restart_count,
                timed_out: false,
            })
        }
    }
}
