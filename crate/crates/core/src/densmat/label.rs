//! Qubit labels: which node a qubit lives in and which role it plays there.

use std::fmt;

/// A network node. The four nodes taking part in one stabilizer measurement
/// are written `A`..`D`; they sit clockwise around the stabilizer so that
/// consecutive nodes (and `D`-`A`) are optically connected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u8);

impl NodeId {
    pub const A: NodeId = NodeId(0);
    pub const B: NodeId = NodeId(1);
    pub const C: NodeId = NodeId(2);
    pub const D: NodeId = NodeId(3);

    pub fn name(&self) -> char {
        (b'A' + self.0) as char
    }

    pub fn from_name(c: char) -> Option<NodeId> {
        let c = c.to_ascii_uppercase();
        if c.is_ascii_uppercase() {
            Some(NodeId(c as u8 - b'A'))
        } else {
            None
        }
    }

    /// Whether two nodes share an optical connection on the four-node ring.
    pub fn adjacent(&self, other: &NodeId) -> bool {
        let d = (4 + self.0 as i8 - other.0 as i8).rem_euclid(4);
        d == 1 || d == 3
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

/// The role a qubit plays inside its node.
///
/// Each node exposes one optically active communication qubit, a set of
/// memory slots for storing intermediate entangled states, and a dedicated
/// data slot holding the code's data qubit. Data slots are never recruited
/// as protocol ancillas.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Slot {
    Comm,
    Mem(u8),
    Data,
}

impl Slot {
    /// Electron-spin slots use electron gate times and coherence times,
    /// everything else is a nuclear-spin memory.
    pub fn is_electron(&self) -> bool {
        matches!(self, Slot::Comm)
    }

    pub fn name(&self) -> String {
        match self {
            Slot::Comm => "c".to_string(),
            Slot::Mem(k) => format!("m{k}"),
            Slot::Data => "d".to_string(),
        }
    }

    pub fn from_name(s: &str) -> Option<Slot> {
        match s {
            "c" => Some(Slot::Comm),
            "d" => Some(Slot::Data),
            _ => s
                .strip_prefix('m')
                .and_then(|k| k.parse::<u8>().ok())
                .map(Slot::Mem),
        }
    }
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

/// Identifies one qubit of a simulation register.
///
/// `Device` qubits live in a network node; `Reference` qubits are the
/// mathematical reference half used when characterizing a channel through a
/// maximally entangled state. Reference qubits belong to no node, take no
/// operation time and never decohere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum QubitLabel {
    Device { node: NodeId, slot: Slot },
    Reference(u8),
}

impl QubitLabel {
    pub fn device(node: NodeId, slot: Slot) -> Self {
        QubitLabel::Device { node, slot }
    }

    pub fn node(&self) -> Option<NodeId> {
        match self {
            QubitLabel::Device { node, .. } => Some(*node),
            QubitLabel::Reference(_) => None,
        }
    }

    pub fn slot(&self) -> Option<Slot> {
        match self {
            QubitLabel::Device { slot, .. } => Some(*slot),
            QubitLabel::Reference(_) => None,
        }
    }

    pub fn is_electron(&self) -> bool {
        matches!(
            self,
            QubitLabel::Device {
                slot: Slot::Comm,
                ..
            }
        )
    }
}

impl fmt::Display for QubitLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QubitLabel::Device { node, slot } => write!(f, "{node}:{slot}"),
            QubitLabel::Reference(k) => write!(f, "ref{k}"),
        }
    }
}
