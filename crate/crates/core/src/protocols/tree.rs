//! GHZ generation plans as binary trees.
//!
//! A leaf creates a Bell pair between two connected nodes. A fusion merges
//! two entangled states overlapping in exactly one node into a larger GHZ
//! state. A distillation consumes an ancillary state to non-locally measure
//! a stabilizer of the main state; both children survive only on even
//! measurement parity.

use std::fmt;

use super::stabilizer::Stabilizer;
use crate::densmat::NodeId;
use crate::error::SimError;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ProtocolTree {
    Bell {
        nodes: [NodeId; 2],
    },
    /// CNOT from `main`'s qubit at `at` onto `other`'s qubit at `at`,
    /// then a Z measurement of `other`'s qubit.
    Fusion {
        main: Box<ProtocolTree>,
        other: Box<ProtocolTree>,
        at: NodeId,
    },
    /// Non-local measurement of `stabilizer` (indexed by `main`'s sorted
    /// node list) using `ancilla`, which must live on the support nodes.
    Distill {
        main: Box<ProtocolTree>,
        ancilla: Box<ProtocolTree>,
        stabilizer: Stabilizer,
    },
}

impl ProtocolTree {
    pub fn bell(a: NodeId, b: NodeId) -> ProtocolTree {
        ProtocolTree::Bell { nodes: [a, b] }
    }

    pub fn fuse(main: ProtocolTree, other: ProtocolTree, at: NodeId) -> ProtocolTree {
        ProtocolTree::Fusion {
            main: Box::new(main),
            other: Box::new(other),
            at,
        }
    }

    pub fn distill(main: ProtocolTree, ancilla: ProtocolTree, stabilizer: Stabilizer) -> ProtocolTree {
        ProtocolTree::Distill {
            main: Box::new(main),
            ancilla: Box::new(ancilla),
            stabilizer,
        }
    }

    /// Sorted set of nodes holding one qubit each of the produced state.
    pub fn nodes(&self) -> Vec<NodeId> {
        match self {
            ProtocolTree::Bell { nodes } => {
                let mut v = nodes.to_vec();
                v.sort();
                v
            }
            ProtocolTree::Fusion { main, other, .. } => {
                let mut v = main.nodes();
                for n in other.nodes() {
                    if !v.contains(&n) {
                        v.push(n);
                    }
                }
                v.sort();
                v
            }
            ProtocolTree::Distill { main, .. } => main.nodes(),
        }
    }

    /// Weight of the produced GHZ state.
    pub fn weight(&self) -> usize {
        self.nodes().len()
    }

    /// Number of Bell pairs consumed (tree leaves).
    pub fn leaf_count(&self) -> usize {
        match self {
            ProtocolTree::Bell { .. } => 1,
            ProtocolTree::Fusion { main, other, .. } => main.leaf_count() + other.leaf_count(),
            ProtocolTree::Distill { main, ancilla, .. } => {
                main.leaf_count() + ancilla.leaf_count()
            }
        }
    }

    /// Total number of tree elements (branch size in the scheduling
    /// heuristics).
    pub fn element_count(&self) -> usize {
        match self {
            ProtocolTree::Bell { .. } => 1,
            ProtocolTree::Fusion { main, other, .. } => {
                1 + main.element_count() + other.element_count()
            }
            ProtocolTree::Distill { main, ancilla, .. } => {
                1 + main.element_count() + ancilla.element_count()
            }
        }
    }

    pub fn children(&self) -> Option<(&ProtocolTree, &ProtocolTree)> {
        match self {
            ProtocolTree::Bell { .. } => None,
            ProtocolTree::Fusion { main, other, .. } => Some((main, other)),
            ProtocolTree::Distill { main, ancilla, .. } => Some((main, ancilla)),
        }
    }

    /// Structural validity: Bell pairs on connected nodes, fusions on
    /// states overlapping in exactly the fusion node, distillations with
    /// matching ancilla support and a genuine GHZ stabilizer.
    pub fn validate(&self) -> Result<(), SimError> {
        match self {
            ProtocolTree::Bell { nodes } => {
                if nodes[0] == nodes[1] {
                    return Err(SimError::InvalidParameter(
                        "Bell pair needs two distinct nodes".into(),
                    ));
                }
                if !nodes[0].adjacent(&nodes[1]) {
                    return Err(SimError::InvalidParameter(format!(
                        "nodes {} and {} share no optical connection",
                        nodes[0], nodes[1]
                    )));
                }
                Ok(())
            }
            ProtocolTree::Fusion { main, other, at } => {
                main.validate()?;
                other.validate()?;
                let (mn, on) = (main.nodes(), other.nodes());
                let overlap: Vec<_> = mn.iter().filter(|n| on.contains(n)).collect();
                if overlap.len() != 1 || *overlap[0] != *at {
                    return Err(SimError::InvalidParameter(format!(
                        "fusion at {at} requires the states to overlap exactly there"
                    )));
                }
                Ok(())
            }
            ProtocolTree::Distill {
                main,
                ancilla,
                stabilizer,
            } => {
                main.validate()?;
                ancilla.validate()?;
                let mn = main.nodes();
                stabilizer.validate_for_ghz(mn.len())?;
                let support_nodes: Vec<NodeId> = stabilizer
                    .support()
                    .into_iter()
                    .map(|i| mn[i])
                    .collect();
                let mut an = ancilla.nodes();
                an.sort();
                if support_nodes != an {
                    return Err(SimError::InvalidParameter(format!(
                        "ancilla nodes do not match stabilizer support of {}",
                        stabilizer.to_text()
                    )));
                }
                Ok(())
            }
        }
    }

    /// Canonical text encoding, used for deterministic tie-breaking and as
    /// part of recipe headers.
    pub fn encode(&self) -> String {
        match self {
            ProtocolTree::Bell { nodes } => format!("({}{})", nodes[0], nodes[1]),
            ProtocolTree::Fusion { main, other, at } => {
                format!("F{}[{},{}]", at, main.encode(), other.encode())
            }
            ProtocolTree::Distill {
                main,
                ancilla,
                stabilizer,
            } => format!(
                "D{}[{},{}]",
                stabilizer.to_text(),
                main.encode(),
                ancilla.encode()
            ),
        }
    }

    /// Relabel every node through the given map (a symmetry of the node
    /// ring when used by the search).
    pub fn relabel(&self, map: &dyn Fn(NodeId) -> NodeId) -> ProtocolTree {
        match self {
            ProtocolTree::Bell { nodes } => ProtocolTree::bell(map(nodes[0]), map(nodes[1])),
            ProtocolTree::Fusion { main, other, at } => ProtocolTree::Fusion {
                main: Box::new(main.relabel(map)),
                other: Box::new(other.relabel(map)),
                at: map(*at),
            },
            ProtocolTree::Distill {
                main,
                ancilla,
                stabilizer,
            } => {
                // Letters are indexed by sorted node order, which the
                // relabeling permutes.
                let old_nodes = main.nodes();
                let new_main = main.relabel(map);
                let new_nodes = new_main.nodes();
                let mut letters = vec![crate::densmat::Pauli::I; old_nodes.len()];
                for (i, n) in old_nodes.iter().enumerate() {
                    let pos = new_nodes
                        .iter()
                        .position(|m| *m == map(*n))
                        .expect("relabeled node present");
                    letters[pos] = stabilizer.letters.0[i];
                }
                ProtocolTree::Distill {
                    main: Box::new(new_main),
                    ancilla: Box::new(ancilla.relabel(map)),
                    stabilizer: Stabilizer {
                        letters: crate::densmat::PauliString(letters),
                        negative: stabilizer.negative,
                    },
                }
            }
        }
    }

    /// Structural isomorphism up to the dihedral symmetry of the node ring:
    /// true when some ring symmetry maps one tree onto the other exactly.
    pub fn isomorphic(&self, other: &ProtocolTree) -> bool {
        for reflect in [false, true] {
            for shift in 0..4u8 {
                let map = move |n: NodeId| {
                    let v = if reflect { (4 - n.0) % 4 } else { n.0 };
                    NodeId((v + shift) % 4)
                };
                if self.relabel(&map).encode() == other.encode() {
                    return true;
                }
            }
        }
        false
    }
}

impl ProtocolTree {
    /// Parse the canonical encoding produced by [`ProtocolTree::encode`].
    pub fn parse(text: &str) -> Result<ProtocolTree, SimError> {
        let mut chars = text.chars().peekable();
        let tree = parse_tree(&mut chars)?;
        if chars.next().is_some() {
            return Err(SimError::InvalidParameter(format!(
                "trailing input in tree encoding `{text}`"
            )));
        }
        Ok(tree)
    }
}

type Chars<'a> = std::iter::Peekable<std::str::Chars<'a>>;

fn parse_tree(chars: &mut Chars<'_>) -> Result<ProtocolTree, SimError> {
    let bad = |msg: &str| SimError::InvalidParameter(format!("tree encoding: {msg}"));
    match chars.peek() {
        Some('(') => {
            chars.next();
            let a = chars
                .next()
                .and_then(NodeId::from_name)
                .ok_or_else(|| bad("expected node"))?;
            let b = chars
                .next()
                .and_then(NodeId::from_name)
                .ok_or_else(|| bad("expected node"))?;
            if chars.next() != Some(')') {
                return Err(bad("expected `)`"));
            }
            Ok(ProtocolTree::bell(a, b))
        }
        Some('F') => {
            chars.next();
            let at = chars
                .next()
                .and_then(NodeId::from_name)
                .ok_or_else(|| bad("expected fusion node"))?;
            if chars.next() != Some('[') {
                return Err(bad("expected `[`"));
            }
            let main = parse_tree(chars)?;
            if chars.next() != Some(',') {
                return Err(bad("expected `,`"));
            }
            let other = parse_tree(chars)?;
            if chars.next() != Some(']') {
                return Err(bad("expected `]`"));
            }
            Ok(ProtocolTree::fuse(main, other, at))
        }
        Some('D') => {
            chars.next();
            let mut stab = String::new();
            while let Some(c) = chars.peek() {
                if *c == '[' {
                    break;
                }
                stab.push(*c);
                chars.next();
            }
            let stabilizer =
                Stabilizer::parse(&stab).ok_or_else(|| bad("bad stabilizer literal"))?;
            if chars.next() != Some('[') {
                return Err(bad("expected `[`"));
            }
            let main = parse_tree(chars)?;
            if chars.next() != Some(',') {
                return Err(bad("expected `,`"));
            }
            let ancilla = parse_tree(chars)?;
            if chars.next() != Some(']') {
                return Err(bad("expected `]`"));
            }
            Ok(ProtocolTree::distill(main, ancilla, stabilizer))
        }
        other => Err(bad(&format!("unexpected `{other:?}`"))),
    }
}

impl fmt::Display for ProtocolTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.encode())
    }
}
