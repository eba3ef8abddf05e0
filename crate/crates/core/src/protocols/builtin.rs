//! Built-in GHZ generation protocols.
//!
//! Plain fuses three Bell pairs without distillation; Modicum adds a single
//! distillation with a fourth pair. The remaining trees are the
//! best-performing protocols of the search at near-term parameters, named
//! by their Bell-pair cost.

use super::compile::{compile_tree, CompileConfig};
use super::recipe::ProtocolRecipe;
use super::stabilizer::Stabilizer;
use super::tree::ProtocolTree;
use crate::densmat::NodeId;
use crate::error::SimError;

fn stab(s: &str) -> Stabilizer {
    Stabilizer::parse(s).expect("valid stabilizer literal")
}

/// Plain (k=3, q=2): three Bell pairs fused into a GHZ state.
pub fn plain_tree() -> ProtocolTree {
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

/// Modicum (k=4, q=2): the fourth Bell pair purifies the middle link
/// before the fusion chain. The XX check catches the phase flips that
/// dominate optically generated pairs.
pub fn modicum_tree() -> ProtocolTree {
    ProtocolTree::fuse(
        ProtocolTree::fuse(
            purified_pair(NodeId::B, NodeId::C),
            ProtocolTree::bell(NodeId::A, NodeId::B),
            NodeId::B,
        ),
        ProtocolTree::bell(NodeId::C, NodeId::D),
        NodeId::C,
    )
}

/// A purified Bell pair: two links on the same adjacent node pair, the
/// second one measuring the XX stabilizer of the first (which catches the
/// dominant phase flips of the optical pair source).
fn purified_pair(a: NodeId, b: NodeId) -> ProtocolTree {
    ProtocolTree::distill(
        ProtocolTree::bell(a, b),
        ProtocolTree::bell(a, b),
        stab("+XX"),
    )
}

/// The GHZ_4 body shared by the sextimum/septimum family: purified C-D and
/// A-B pairs fused through a bare B-C link.
fn purified_body() -> ProtocolTree {
    ProtocolTree::fuse(
        ProtocolTree::fuse(
            purified_pair(NodeId::C, NodeId::D),
            ProtocolTree::bell(NodeId::B, NodeId::C),
            NodeId::C,
        ),
        purified_pair(NodeId::A, NodeId::B),
        NodeId::B,
    )
}

/// Sextimum (k=6, q=3): three purified pairs fused into the GHZ state.
pub fn sextimum_tree() -> ProtocolTree {
    ProtocolTree::fuse(
        ProtocolTree::fuse(
            purified_pair(NodeId::C, NodeId::D),
            purified_pair(NodeId::B, NodeId::C),
            NodeId::C,
        ),
        purified_pair(NodeId::A, NodeId::B),
        NodeId::B,
    )
}

/// Septimum (k=7, q=3): the purified body distilled with a purified pair.
pub fn septimum_tree() -> ProtocolTree {
    ProtocolTree::distill(purified_body(), purified_pair(NodeId::B, NodeId::C), stab("+IZZI"))
}

/// Decimum (k=10, q=3): septimum with an additional weight-4 stabilizer
/// check consumed from a plainly fused ancilla GHZ.
pub fn decimum_tree() -> ProtocolTree {
    ProtocolTree::distill(septimum_tree(), plain_tree(), stab("+XXXX"))
}

/// Undecum (k=11, q=3): the weight-4 check ancilla starts from a purified
/// A-B pair.
pub fn undecum_tree() -> ProtocolTree {
    let anc = ProtocolTree::fuse(
        ProtocolTree::fuse(
            purified_pair(NodeId::A, NodeId::B),
            ProtocolTree::bell(NodeId::B, NodeId::C),
            NodeId::B,
        ),
        ProtocolTree::bell(NodeId::C, NodeId::D),
        NodeId::C,
    );
    ProtocolTree::distill(septimum_tree(), anc, stab("+XXXX"))
}

/// Duodecum (k=12, q=4): a sextimum state checked against a second GHZ
/// built from three purified pairs.
pub fn duodecum_tree() -> ProtocolTree {
    ProtocolTree::distill(sextimum_tree(), sextimum_tree(), stab("+XXXX"))
}

/// Look up a built-in protocol tree by name.
pub fn builtin_tree(name: &str) -> Option<ProtocolTree> {
    match name {
        "plain" => Some(plain_tree()),
        "modicum" => Some(modicum_tree()),
        "sextimum" => Some(sextimum_tree()),
        "septimum" => Some(septimum_tree()),
        "decimum" => Some(decimum_tree()),
        "undecum" => Some(undecum_tree()),
        "duodecum" => Some(duodecum_tree()),
        _ => None,
    }
}

pub const BUILTIN_NAMES: [&str; 7] = [
    "plain",
    "modicum",
    "sextimum",
    "septimum",
    "decimum",
    "undecum",
    "duodecum",
];

/// Compile a built-in protocol to its recipe.
pub fn builtin_recipe(name: &str, config: &CompileConfig) -> Result<ProtocolRecipe, SimError> {
    let tree = builtin_tree(name)
        .ok_or_else(|| SimError::InvalidParameter(format!("unknown protocol `{name}`")))?;
    compile_tree(&tree, name, config)
}
