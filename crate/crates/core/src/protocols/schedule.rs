//! Conversion of a protocol tree into a timed tree.
//!
//! Heuristics: larger branches are created first (left branch on ties), and
//! Bell generations on non-overlapping node pairs are co-scheduled into the
//! same time step, prioritized by proximity in the binary tree (path length
//! to the leaves already in the step). Fusion, distillation, and SWAP
//! instructions execute at the earliest possible point: the step in which
//! the last of their inputs completes.

use std::collections::BTreeMap;

use super::tree::ProtocolTree;
use crate::densmat::NodeId;

/// A protocol tree with a time-step index per element.
///
/// Elements are identified by their DFS pre-order index (root = 0, main
/// branch before other/ancilla branch).
#[derive(Debug, Clone)]
pub struct TimedTree {
    pub tree: ProtocolTree,
    pub steps: BTreeMap<usize, u32>,
    pub num_steps: u32,
}

/// Flat view of the tree elements in DFS pre-order.
pub(crate) struct TreeIndex<'a> {
    pub elements: Vec<&'a ProtocolTree>,
    pub parent: Vec<Option<usize>>,
    pub depth: Vec<usize>,
}

impl<'a> TreeIndex<'a> {
    pub fn new(tree: &'a ProtocolTree) -> Self {
        let mut idx = TreeIndex {
            elements: Vec::new(),
            parent: Vec::new(),
            depth: Vec::new(),
        };
        idx.visit(tree, None, 0);
        idx
    }

    fn visit(&mut self, e: &'a ProtocolTree, parent: Option<usize>, depth: usize) {
        let id = self.elements.len();
        self.elements.push(e);
        self.parent.push(parent);
        self.depth.push(depth);
        if let Some((left, right)) = e.children() {
            self.visit(left, Some(id), depth + 1);
            self.visit(right, Some(id), depth + 1);
        }
    }

    /// Tree path length between two elements.
    fn distance(&self, a: usize, b: usize) -> usize {
        let (mut x, mut y) = (a, b);
        let mut steps = 0;
        while x != y {
            if self.depth[x] >= self.depth[y] {
                x = self.parent[x].expect("reached root without meeting");
            } else {
                y = self.parent[y].expect("reached root without meeting");
            }
            steps += 1;
        }
        steps
    }
}

/// Leaf generation order: recursive descent visiting the larger branch
/// first, the left branch on ties. Returns element ids of the leaves.
fn leaf_order(idx: &TreeIndex<'_>) -> Vec<usize> {
    fn visit(idx: &TreeIndex<'_>, id: usize, out: &mut Vec<usize>) {
        let e = idx.elements[id];
        match e.children() {
            None => out.push(id),
            Some((left, right)) => {
                let left_id = id + 1;
                let right_id = id + 1 + left.element_count();
                if right.element_count() > left.element_count() {
                    visit(idx, right_id, out);
                    visit(idx, left_id, out);
                } else {
                    visit(idx, left_id, out);
                    visit(idx, right_id, out);
                }
            }
        }
    }
    let mut out = Vec::new();
    visit(idx, 0, &mut out);
    out
}

fn leaf_pair(e: &ProtocolTree) -> [NodeId; 2] {
    match e {
        ProtocolTree::Bell { nodes } => {
            let mut p = *nodes;
            p.sort();
            p
        }
        _ => unreachable!("leaf expected"),
    }
}

/// Deterministic step assignment for the whole tree.
pub fn schedule_tree(tree: &ProtocolTree) -> TimedTree {
    let idx = TreeIndex::new(tree);
    let order = leaf_order(&idx);

    // Group consecutive equal node pairs into runs; a run executes
    // sequentially inside one step.
    let mut runs: Vec<(Vec<usize>, [NodeId; 2])> = Vec::new();
    for leaf in order {
        let pair = leaf_pair(idx.elements[leaf]);
        match runs.last_mut() {
            Some((ids, p)) if *p == pair => ids.push(leaf),
            _ => runs.push((vec![leaf], pair)),
        }
    }

    // Greedy packing of runs into steps: each step seeds with the first
    // unassigned run, then absorbs node-disjoint runs by tree proximity.
    let mut run_step = vec![0u32; runs.len()];
    let mut assigned = vec![false; runs.len()];
    let mut step = 0u32;
    while assigned.iter().any(|a| !a) {
        step += 1;
        let seed = assigned.iter().position(|a| !a).unwrap();
        assigned[seed] = true;
        run_step[seed] = step;
        let mut members = vec![seed];
        loop {
            let mut best: Option<(usize, usize)> = None; // (distance, run)
            for (r, done) in assigned.iter().enumerate() {
                if *done {
                    continue;
                }
                let disjoint = members.iter().all(|m| {
                    let mp = runs[*m].1;
                    !mp.contains(&runs[r].1[0]) && !mp.contains(&runs[r].1[1])
                });
                if !disjoint {
                    continue;
                }
                let dist = members
                    .iter()
                    .flat_map(|m| runs[*m].0.iter())
                    .flat_map(|u| runs[r].0.iter().map(|v| idx.distance(*u, *v)))
                    .min()
                    .unwrap();
                if best.map_or(true, |(d, br)| dist < d || (dist == d && r < br)) {
                    best = Some((dist, r));
                }
            }
            match best {
                Some((_, r)) => {
                    assigned[r] = true;
                    run_step[r] = step;
                    members.push(r);
                }
                None => break,
            }
        }
    }

    let mut steps: BTreeMap<usize, u32> = BTreeMap::new();
    for (r, (ids, _)) in runs.iter().enumerate() {
        for id in ids {
            steps.insert(*id, run_step[r]);
        }
    }
    // Internal elements run in the step where their last input completes.
    fn assign_ops(idx: &TreeIndex<'_>, id: usize, steps: &mut BTreeMap<usize, u32>) -> u32 {
        if let Some(s) = steps.get(&id) {
            return *s;
        }
        let e = idx.elements[id];
        let (left, _) = e.children().expect("internal element");
        let left_id = id + 1;
        let right_id = id + 1 + left.element_count();
        let s = assign_ops(idx, left_id, steps).max(assign_ops(idx, right_id, steps));
        steps.insert(id, s);
        s
    }
    assign_ops(&idx, 0, &mut steps);

    TimedTree {
        tree: tree.clone(),
        steps,
        num_steps: step,
    }
}

impl TimedTree {
    /// Leaves of each step, as `(step, node pairs)` for inspection.
    pub fn step_links(&self) -> Vec<(u32, Vec<[NodeId; 2]>)> {
        let idx = TreeIndex::new(&self.tree);
        let mut per_step: BTreeMap<u32, Vec<[NodeId; 2]>> = BTreeMap::new();
        for (id, e) in idx.elements.iter().enumerate() {
            if e.children().is_none() {
                per_step
                    .entry(self.steps[&id])
                    .or_default()
                    .push(leaf_pair(e));
            }
        }
        per_step.into_iter().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::densmat::NodeId;

    fn plain() -> ProtocolTree {
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

    #[test]
    fn single_bell_pair_is_one_step() {
        let timed = schedule_tree(&ProtocolTree::bell(NodeId::A, NodeId::B));
        assert_eq!(timed.num_steps, 1);
    }

    #[test]
    fn plain_coschedules_the_outer_links() {
        let timed = schedule_tree(&plain());
        assert_eq!(timed.num_steps, 2);
        let links = timed.step_links();
        assert_eq!(
            links[0].1,
            vec![[NodeId::A, NodeId::B], [NodeId::C, NodeId::D]],
            "AB and CD belong to step 1"
        );
        assert_eq!(links[1].1, vec![[NodeId::B, NodeId::C]]);
    }

    #[test]
    fn step_of_a_parent_is_at_least_its_childrens() {
        let timed = schedule_tree(&plain());
        let idx = TreeIndex::new(&timed.tree);
        for (id, e) in idx.elements.iter().enumerate() {
            if let Some((left, _)) = e.children() {
                let left_id = id + 1;
                let right_id = id + 1 + left.element_count();
                assert!(timed.steps[&id] >= timed.steps[&left_id]);
                assert!(timed.steps[&id] >= timed.steps[&right_id]);
            }
        }
    }

    #[test]
    fn sequential_same_pair_links_share_a_step() {
        use crate::protocols::stabilizer::Stabilizer;
        // Distilled C-D pair next to a distilled A-B pair: both subtrees
        // should land in step 1.
        let dist_pair = |a: NodeId, b: NodeId| {
            ProtocolTree::distill(
                ProtocolTree::bell(a, b),
                ProtocolTree::bell(a, b),
                Stabilizer::parse("+ZZ").unwrap(),
            )
        };
        let t = ProtocolTree::fuse(
            ProtocolTree::fuse(dist_pair(NodeId::C, NodeId::D), ProtocolTree::bell(NodeId::B, NodeId::C), NodeId::C),
            dist_pair(NodeId::A, NodeId::B),
            NodeId::B,
        );
        t.validate().unwrap();
        let timed = schedule_tree(&t);
        let links = timed.step_links();
        assert_eq!(links[0].0, 1);
        assert_eq!(
            links[0].1,
            vec![
                [NodeId::C, NodeId::D],
                [NodeId::C, NodeId::D],
                [NodeId::A, NodeId::B],
                [NodeId::A, NodeId::B]
            ]
        );
    }
}
