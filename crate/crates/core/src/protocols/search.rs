//! Dynamic program over GHZ generation protocols.
//!
//! Cells are indexed by `(weight n, Bell-pair cost k, node set)`; each cell
//! keeps the best protocols found so far. New candidates arise either by
//! non-locally measuring a stabilizer of a buffered protocol with a
//! buffered ancilla (distillation) or by fusing two buffered protocols
//! overlapping in one node. Every candidate is compiled to its recipe and
//! scored by the mean stabilizer fidelity of Monte Carlo executions.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

use super::compile::{compile_tree, CompileConfig};
use super::recipe::ProtocolRecipe;
use super::stabilizer::ghz_stabilizers;
use super::tree::ProtocolTree;
use crate::densmat::NodeId;
use crate::error::SimError;
use crate::noise::HardwareParams;
use crate::rng::{derive_seed, shot_rng};
use crate::superop::{choi_one_shot, ChoiBasis, StabilizerType};

/// Inputs of the protocol search.
#[derive(Debug, Clone)]
pub struct SearchConfig {
    /// Weight of the target GHZ state (2..=4).
    pub n_m: usize,
    /// Maximum number of Bell pairs.
    pub k_m: u32,
    /// Model parameter set used for scoring.
    pub hardware: HardwareParams,
    /// Protocols kept per cell.
    pub buffer_size: usize,
    /// Monte Carlo shots per candidate.
    pub shots: u64,
    pub seed: u64,
    pub compile: CompileConfig,
    /// Scoring cutoff; `None` runs protocols to completion.
    pub t_ghz: Option<f64>,
}

impl SearchConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        if !(2..=4).contains(&self.n_m) {
            return Err(SimError::InvalidParameter(
                "final GHZ weight must be 2..=4".into(),
            ));
        }
        if self.k_m < self.n_m as u32 - 1 {
            return Err(SimError::InvalidParameter(format!(
                "k_m = {} cannot build a weight-{} state",
                self.k_m, self.n_m
            )));
        }
        if self.buffer_size == 0 || self.shots == 0 {
            return Err(SimError::InvalidParameter(
                "buffer size and shot count must be >= 1".into(),
            ));
        }
        self.hardware.validate()
    }
}

/// A scored protocol in the search buffer.
#[derive(Debug, Clone)]
pub struct Candidate {
    pub tree: ProtocolTree,
    pub recipe: ProtocolRecipe,
    pub score: f64,
}

/// Cell key: `(n, k, sorted node set)`.
pub type CellKey = (usize, u32, Vec<NodeId>);

/// The search buffer: best candidates per cell, best first.
#[derive(Debug, Default, Clone)]
pub struct SearchBuffer {
    pub cells: BTreeMap<CellKey, Vec<Candidate>>,
}

impl SearchBuffer {
    /// All candidates of weight `n` and cost `k` across node sets, best
    /// first.
    pub fn ranked(&self, n: usize, k: u32) -> Vec<&Candidate> {
        let mut out: Vec<&Candidate> = self
            .cells
            .iter()
            .filter(|((cn, ck, _), _)| *cn == n && *ck == k)
            .flat_map(|(_, v)| v.iter())
            .collect();
        out.sort_by(|a, b| order_key(a).partial_cmp(&order_key(b)).unwrap());
        out
    }
}

fn order_key(c: &Candidate) -> (f64, u32, String) {
    // Descending score; ties broken by smaller q, then the encoding.
    (-c.score, c.recipe.q, c.tree.encode())
}

/// State weights and node sets reachable with Bell links on the ring.
fn node_sets(n: usize) -> Vec<Vec<NodeId>> {
    let all = [NodeId::A, NodeId::B, NodeId::C, NodeId::D];
    match n {
        2 => (0..4u8)
            .map(|i| {
                let mut v = vec![NodeId(i), NodeId((i + 1) % 4)];
                v.sort();
                v
            })
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect(),
        3 => (0..4usize)
            .map(|skip| {
                all.iter()
                    .enumerate()
                    .filter(|(i, _)| *i != skip)
                    .map(|(_, n)| *n)
                    .collect()
            })
            .collect(),
        4 => vec![all.to_vec()],
        _ => Vec::new(),
    }
}

/// Score one tree: compile it and average the stabilizer fidelity of the
/// full-X cat measurement over the configured shot count. Returns the
/// candidate, or `None` when the tree does not compile within the slot
/// budget.
fn evaluate(tree: &ProtocolTree, config: &SearchConfig) -> Result<Option<Candidate>, SimError> {
    let recipe = match compile_tree(tree, "candidate", &config.compile) {
        Ok(r) => r,
        Err(SimError::Recipe(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    let n = tree.weight();
    let basis = ChoiBasis::new(StabilizerType::X, n);
    let cand_seed = derive_seed(config.seed, fnv1a(tree.encode().as_bytes()));
    let t_ghz = config.t_ghz.unwrap_or(f64::INFINITY);
    let mut total = 0.0;
    for shot in 0..config.shots {
        let rng = shot_rng(cand_seed, shot);
        let result = choi_one_shot(&recipe, &config.hardware, t_ghz, StabilizerType::X, rng)?;
        if result.completed {
            total += basis.probability(result.state.matrix(), 0, 0).max(0.0);
        }
    }
    Ok(Some(Candidate {
        tree: tree.clone(),
        recipe,
        score: total / config.shots as f64,
    }))
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf29ce484222325u64;
    for b in bytes {
        hash ^= *b as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}

/// Distillation candidates for a cell.
fn distillation_trees(
    buffer: &SearchBuffer,
    n: usize,
    k: u32,
    nodes: &[NodeId],
    buffer_size: usize,
) -> Vec<ProtocolTree> {
    let mut out = Vec::new();
    for g in ghz_stabilizers(n) {
        let weight = g.weight() as u32;
        let support_nodes: Vec<NodeId> = g.support().iter().map(|i| nodes[*i]).collect();
        let lo = weight.saturating_sub(1).max(1);
        if k < n as u32 - 1 {
            continue;
        }
        for k_anc in lo..=(k - (n as u32 - 1)) {
            let main_key = (n, k - k_anc, nodes.to_vec());
            let anc_key = (weight as usize, k_anc, support_nodes.clone());
            let (Some(mains), Some(ancs)) =
                (buffer.cells.get(&main_key), buffer.cells.get(&anc_key))
            else {
                continue;
            };
            for main in mains.iter().take(buffer_size) {
                for anc in ancs.iter().take(buffer_size) {
                    out.push(ProtocolTree::distill(
                        main.tree.clone(),
                        anc.tree.clone(),
                        g.clone(),
                    ));
                }
            }
        }
    }
    out
}

/// Fusion candidates for a cell.
fn fusion_trees(
    buffer: &SearchBuffer,
    n: usize,
    k: u32,
    nodes: &[NodeId],
    buffer_size: usize,
) -> Vec<ProtocolTree> {
    let mut out = Vec::new();
    for n2 in 2..n {
        let n1 = n - n2 + 1;
        // k1 = k - k2 must cover a weight-n1 state: k2 <= k - n + n2.
        let hi = k + n2 as u32;
        if hi < n as u32 {
            continue;
        }
        for k2 in (n2 as u32 - 1)..=(hi - n as u32) {
            let k1 = k - k2;
            if k1 < n1 as u32 - 1 {
                continue;
            }
            for s1 in node_sets(n1) {
                if !s1.iter().all(|x| nodes.contains(x)) {
                    continue;
                }
                for s2 in node_sets(n2) {
                    if !s2.iter().all(|x| nodes.contains(x)) {
                        continue;
                    }
                    let shared: Vec<NodeId> =
                        s1.iter().filter(|x| s2.contains(x)).copied().collect();
                    if shared.len() != 1 {
                        continue;
                    }
                    let mut union: Vec<NodeId> = s1.clone();
                    union.extend(s2.iter().filter(|x| !s1.contains(x)));
                    union.sort();
                    if union != nodes {
                        continue;
                    }
                    let key1 = (n1, k1, s1.clone());
                    let key2 = (n2, k2, s2.clone());
                    let (Some(b1), Some(b2)) =
                        (buffer.cells.get(&key1), buffer.cells.get(&key2))
                    else {
                        continue;
                    };
                    for p1 in b1.iter().take(buffer_size) {
                        for p2 in b2.iter().take(buffer_size) {
                            out.push(ProtocolTree::fuse(
                                p1.tree.clone(),
                                p2.tree.clone(),
                                shared[0],
                            ));
                        }
                    }
                }
            }
        }
    }
    out
}

/// Run the dynamic program, optionally resuming from a prior buffer.
/// `on_cell` is invoked after each finished cell (snapshot hook).
pub fn dynamic_search(
    config: &SearchConfig,
    resume: Option<SearchBuffer>,
    mut on_cell: impl FnMut(&CellKey, &[Candidate]),
) -> Result<SearchBuffer, SimError> {
    config.validate()?;
    let mut buffer = resume.unwrap_or_default();
    for n in 2..=config.n_m {
        let k_hi = config.k_m - (config.n_m as u32 - n as u32);
        for k in (n as u32 - 1)..=k_hi {
            for nodes in node_sets(n) {
                let key: CellKey = (n, k, nodes.clone());
                if buffer.cells.contains_key(&key) {
                    continue; // resumed
                }
                let mut trees: Vec<ProtocolTree> = Vec::new();
                if n == 2 && k == 1 {
                    trees.push(ProtocolTree::bell(nodes[0], nodes[1]));
                } else {
                    trees.extend(distillation_trees(&buffer, n, k, &nodes, config.buffer_size));
                    trees.extend(fusion_trees(&buffer, n, k, &nodes, config.buffer_size));
                }
                // Deduplicate structurally identical candidates.
                let mut seen = BTreeSet::new();
                trees.retain(|t| seen.insert(t.encode()));
                let mut candidates: Vec<Candidate> = trees
                    .par_iter()
                    .map(|t| evaluate(t, config))
                    .collect::<Result<Vec<_>, SimError>>()?
                    .into_iter()
                    .flatten()
                    .collect();
                candidates
                    .sort_by(|a, b| order_key(a).partial_cmp(&order_key(b)).unwrap());
                candidates.truncate(config.buffer_size);
                if !candidates.is_empty() {
                    on_cell(&key, &candidates);
                    buffer.cells.insert(key, candidates);
                }
            }
        }
    }
    Ok(buffer)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn noiseless_config(n_m: usize, k_m: u32, shots: u64) -> SearchConfig {
        SearchConfig {
            n_m,
            k_m,
            hardware: HardwareParams::ideal(),
            buffer_size: 2,
            shots,
            seed: 7,
            compile: CompileConfig::default(),
            t_ghz: None,
        }
    }

    #[test]
    fn noiseless_pair_fusion_scores_one() {
        let config = noiseless_config(3, 2, 4);
        let buffer = dynamic_search(&config, None, |_, _| {}).unwrap();
        let best = buffer.ranked(3, 2);
        assert!(!best.is_empty());
        assert!((best[0].score - 1.0).abs() < 1e-9, "score {}", best[0].score);
        assert_eq!(best[0].recipe.k, 2);
    }

    #[test]
    fn noiseless_search_finds_plain_at_cost_three() {
        let config = noiseless_config(4, 3, 4);
        let buffer = dynamic_search(&config, None, |_, _| {}).unwrap();
        let best = buffer.ranked(4, 3);
        assert!(!best.is_empty());
        let top = &best[0];
        assert!((top.score - 1.0).abs() < 1e-9);
        assert_eq!(top.recipe.k, 3);
        assert_eq!(top.recipe.q, 2);
        // Plain means: three Bell pairs fused without any distillation.
        let enc = top.tree.encode();
        assert!(
            !enc.contains("D+") && !enc.contains("D-"),
            "expected a pure fusion chain, got {enc}"
        );
    }

    #[test]
    fn resume_skips_completed_cells() {
        let config = noiseless_config(3, 2, 2);
        let mut cells_seen = 0;
        let buffer = dynamic_search(&config, None, |_, _| cells_seen += 1).unwrap();
        assert!(cells_seen > 0);
        let mut resumed_cells = 0;
        let again = dynamic_search(&config, Some(buffer.clone()), |_, _| resumed_cells += 1)
            .unwrap();
        assert_eq!(resumed_cells, 0, "everything came from the snapshot");
        assert_eq!(again.cells.len(), buffer.cells.len());
    }

    #[test]
    fn tree_encoding_round_trips_through_parse() {
        let config = noiseless_config(4, 4, 2);
        let buffer = dynamic_search(&config, None, |_, _| {}).unwrap();
        for cands in buffer.cells.values() {
            for c in cands {
                let parsed = ProtocolTree::parse(&c.tree.encode()).unwrap();
                assert_eq!(parsed, c.tree);
            }
        }
    }
}
