//! Protocol recipes: explicit timed instruction sequences with conditional
//! corrections and distillation failure branches, plus the line-oriented
//! text format they are stored in.
//!
//! The text format is stable: superoperator cache keys hash this exact
//! serialization.

use std::fmt::Write as _;

use crate::densmat::{Gate, NodeId, Pauli, Slot};
use crate::error::ParseError;

pub const RECIPE_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    Z,
    X,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Instruction {
    /// Barrier: every node waits for the slowest one.
    Sync,
    /// Generate a Bell pair on the communication qubits of two nodes.
    Link { a: NodeId, b: NodeId },
    /// Exchange the occupants of two slots of a node. A swap with one empty
    /// side moves the occupant; with both sides empty it is a no-op (which
    /// occurs when a failure branch replays an eviction).
    Swap { node: NodeId, s1: Slot, s2: Slot },
    /// Single-qubit gate.
    Gate1 { gate: Gate, node: NodeId, slot: Slot },
    /// Intra-node two-qubit gate; the control must be the communication
    /// qubit.
    Gate2 {
        gate: Gate,
        node: NodeId,
        control: Slot,
        target: Slot,
    },
    /// Measure a communication qubit; X basis is a Hadamard followed by a
    /// Z readout.
    Measure {
        id: u32,
        node: NodeId,
        slot: Slot,
        basis: Basis,
    },
    /// Conditional Pauli applied when measurement `meas` reported -1.
    Correct {
        meas: u32,
        pauli: Pauli,
        node: NodeId,
        slot: Slot,
    },
    /// Distillation verdict: parity of the listed measurement outcomes.
    /// On failure the listed qubits are discarded and the instruction index
    /// ranges are executed again.
    Distill(DistillCheck),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistillCheck {
    pub parity_even: bool,
    pub meas_ids: Vec<u32>,
    /// Inclusive instruction index ranges to re-execute on failure.
    pub replay: Vec<(u32, u32)>,
    pub drop: Vec<(NodeId, Slot)>,
}

/// A compiled GHZ generation plan.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolRecipe {
    pub name: String,
    /// Bell pairs consumed on the failure-free path.
    pub k: u32,
    /// Peak number of protocol qubits in any single node.
    pub q: u32,
    pub nodes: Vec<NodeId>,
    pub instructions: Vec<Instruction>,
}

impl ProtocolRecipe {
    /// Canonical text serialization.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# protocol recipe");
        let _ = writeln!(out, "version {RECIPE_FORMAT_VERSION}");
        let _ = writeln!(out, "name {}", self.name);
        let _ = writeln!(out, "k {}", self.k);
        let _ = writeln!(out, "q {}", self.q);
        let _ = writeln!(
            out,
            "nodes {}",
            self.nodes
                .iter()
                .map(|n| n.name().to_string())
                .collect::<Vec<_>>()
                .join(" ")
        );
        let _ = writeln!(out, "begin");
        for ins in &self.instructions {
            let _ = writeln!(out, "{}", instruction_to_text(ins));
        }
        let _ = writeln!(out, "end");
        out
    }

    pub fn parse(text: &str, file: &str) -> Result<ProtocolRecipe, ParseError> {
        let mut name = None;
        let mut k = None;
        let mut q = None;
        let mut nodes: Option<Vec<NodeId>> = None;
        let mut instructions = Vec::new();
        let mut in_body = false;
        let mut ended = false;
        let syntax = |line: usize, msg: String| ParseError::Syntax {
            file: file.to_string(),
            line,
            msg,
        };
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let lineno = lineno + 1;
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if ended {
                return Err(syntax(lineno, "content after `end`".into()));
            }
            if !in_body {
                let (key, rest) = line.split_once(' ').unwrap_or((line, ""));
                match key {
                    "version" => {
                        let v: u32 = rest
                            .trim()
                            .parse()
                            .map_err(|_| syntax(lineno, "bad version".into()))?;
                        if v != RECIPE_FORMAT_VERSION {
                            return Err(syntax(lineno, format!("unsupported version {v}")));
                        }
                    }
                    "name" => name = Some(rest.trim().to_string()),
                    "k" => {
                        k = Some(rest.trim().parse().map_err(|_| syntax(lineno, "bad k".into()))?)
                    }
                    "q" => {
                        q = Some(rest.trim().parse().map_err(|_| syntax(lineno, "bad q".into()))?)
                    }
                    "nodes" => {
                        let mut v = Vec::new();
                        for tok in rest.split_whitespace() {
                            let c = tok.chars().next().unwrap();
                            v.push(
                                NodeId::from_name(c)
                                    .ok_or_else(|| syntax(lineno, format!("bad node {tok}")))?,
                            );
                        }
                        nodes = Some(v);
                    }
                    "begin" => in_body = true,
                    other => return Err(syntax(lineno, format!("unknown header key `{other}`"))),
                }
            } else if line == "end" {
                ended = true;
            } else {
                instructions.push(parse_instruction(line, file, lineno)?);
            }
        }
        if !ended {
            return Err(syntax(0, "missing `end`".into()));
        }
        let recipe = ProtocolRecipe {
            name: name.ok_or(ParseError::MissingKey("name".into()))?,
            k: k.ok_or(ParseError::MissingKey("k".into()))?,
            q: q.ok_or(ParseError::MissingKey("q".into()))?,
            nodes: nodes.ok_or(ParseError::MissingKey("nodes".into()))?,
            instructions,
        };
        recipe.check_structure(file)?;
        Ok(recipe)
    }

    /// Light structural validation: measurement ids defined before use and
    /// replay ranges inside the program.
    fn check_structure(&self, file: &str) -> Result<(), ParseError> {
        let n = self.instructions.len() as u32;
        let mut seen = std::collections::BTreeSet::new();
        for (i, ins) in self.instructions.iter().enumerate() {
            match ins {
                Instruction::Measure { id, .. } => {
                    if !seen.insert(*id) {
                        return Err(ParseError::Syntax {
                            file: file.into(),
                            line: 0,
                            msg: format!("measurement id {id} reused at instruction {i}"),
                        });
                    }
                }
                Instruction::Correct { meas, .. } => {
                    if !seen.contains(meas) {
                        return Err(ParseError::Syntax {
                            file: file.into(),
                            line: 0,
                            msg: format!("correction at instruction {i} references unknown measurement {meas}"),
                        });
                    }
                }
                Instruction::Distill(d) => {
                    for id in &d.meas_ids {
                        if !seen.contains(id) {
                            return Err(ParseError::Syntax {
                                file: file.into(),
                                line: 0,
                                msg: format!("distillation check references unknown measurement {id}"),
                            });
                        }
                    }
                    for (lo, hi) in &d.replay {
                        if lo > hi || *hi >= n || *hi as usize > i {
                            return Err(ParseError::Syntax {
                                file: file.into(),
                                line: 0,
                                msg: format!("bad replay range {lo}-{hi} at instruction {i}"),
                            });
                        }
                    }
                }
                _ => {}
            }
        }
        Ok(())
    }

    /// Count of Bell pairs consumed on the failure-free path.
    pub fn derived_k(&self) -> u32 {
        self.instructions
            .iter()
            .filter(|i| matches!(i, Instruction::Link { .. }))
            .count() as u32
    }
}

fn slot_text(s: &Slot) -> String {
    s.name()
}

fn instruction_to_text(ins: &Instruction) -> String {
    match ins {
        Instruction::Sync => "sync".into(),
        Instruction::Link { a, b } => format!("link {a} {b}"),
        Instruction::Swap { node, s1, s2 } => {
            format!("swap {node} {} {}", slot_text(s1), slot_text(s2))
        }
        Instruction::Gate1 { gate, node, slot } => {
            format!("{} {node} {}", gate.name(), slot_text(slot))
        }
        Instruction::Gate2 {
            gate,
            node,
            control,
            target,
        } => format!(
            "{} {node} {} {}",
            gate.name(),
            slot_text(control),
            slot_text(target)
        ),
        Instruction::Measure {
            id,
            node,
            slot,
            basis,
        } => format!(
            "meas {id} {node} {} {}",
            slot_text(slot),
            match basis {
                Basis::Z => "z",
                Basis::X => "x",
            }
        ),
        Instruction::Correct {
            meas,
            pauli,
            node,
            slot,
        } => format!(
            "corr {meas} {} {node} {}",
            pauli.letter().to_ascii_lowercase(),
            slot_text(slot)
        ),
        Instruction::Distill(d) => {
            let ids = d
                .meas_ids
                .iter()
                .map(|i| i.to_string())
                .collect::<Vec<_>>()
                .join(",");
            let ranges = d
                .replay
                .iter()
                .map(|(a, b)| if a == b { a.to_string() } else { format!("{a}-{b}") })
                .collect::<Vec<_>>()
                .join(",");
            let drops = d
                .drop
                .iter()
                .map(|(n, s)| format!("{n}:{}", slot_text(s)))
                .collect::<Vec<_>>()
                .join(",");
            format!(
                "dist {} meas {ids} replay {ranges} drop {drops}",
                if d.parity_even { "even" } else { "odd" }
            )
        }
    }
}

fn parse_instruction(line: &str, file: &str, lineno: usize) -> Result<Instruction, ParseError> {
    let syntax = |msg: String| ParseError::Syntax {
        file: file.to_string(),
        line: lineno,
        msg,
    };
    let toks: Vec<&str> = line.split_whitespace().collect();
    let node = |tok: &str| -> Result<NodeId, ParseError> {
        tok.chars()
            .next()
            .and_then(NodeId::from_name)
            .ok_or_else(|| syntax(format!("bad node `{tok}`")))
    };
    let slot = |tok: &str| -> Result<Slot, ParseError> {
        Slot::from_name(tok).ok_or_else(|| syntax(format!("bad slot `{tok}`")))
    };
    match toks[0] {
        "sync" => Ok(Instruction::Sync),
        "link" => {
            if toks.len() != 3 {
                return Err(syntax("link takes two nodes".into()));
            }
            Ok(Instruction::Link {
                a: node(toks[1])?,
                b: node(toks[2])?,
            })
        }
        "swap" => {
            if toks.len() != 4 {
                return Err(syntax("swap takes node and two slots".into()));
            }
            Ok(Instruction::Swap {
                node: node(toks[1])?,
                s1: slot(toks[2])?,
                s2: slot(toks[3])?,
            })
        }
        g @ ("x" | "y" | "z" | "h") => {
            if toks.len() != 3 {
                return Err(syntax(format!("{g} takes node and slot")));
            }
            Ok(Instruction::Gate1 {
                gate: Gate::from_name(g).unwrap(),
                node: node(toks[1])?,
                slot: slot(toks[2])?,
            })
        }
        g @ ("cx" | "cz" | "ciy") => {
            if toks.len() != 4 {
                return Err(syntax(format!("{g} takes node, control, target")));
            }
            Ok(Instruction::Gate2 {
                gate: Gate::from_name(g).unwrap(),
                node: node(toks[1])?,
                control: slot(toks[2])?,
                target: slot(toks[3])?,
            })
        }
        "meas" => {
            if toks.len() != 5 {
                return Err(syntax("meas takes id, node, slot, basis".into()));
            }
            Ok(Instruction::Measure {
                id: toks[1].parse().map_err(|_| syntax("bad meas id".into()))?,
                node: node(toks[2])?,
                slot: slot(toks[3])?,
                basis: match toks[4] {
                    "z" => Basis::Z,
                    "x" => Basis::X,
                    other => return Err(syntax(format!("bad basis `{other}`"))),
                },
            })
        }
        "corr" => {
            if toks.len() != 5 {
                return Err(syntax("corr takes meas id, pauli, node, slot".into()));
            }
            Ok(Instruction::Correct {
                meas: toks[1].parse().map_err(|_| syntax("bad meas id".into()))?,
                pauli: Pauli::from_letter(toks[2].chars().next().unwrap())
                    .ok_or_else(|| syntax("bad pauli".into()))?,
                node: node(toks[3])?,
                slot: slot(toks[4])?,
            })
        }
        "dist" => {
            // dist <even|odd> meas a,b replay x-y,z drop N:s,M:s
            if toks.len() != 8 || toks[2] != "meas" || toks[4] != "replay" || toks[6] != "drop" {
                return Err(syntax("malformed dist instruction".into()));
            }
            let parity_even = match toks[1] {
                "even" => true,
                "odd" => false,
                other => return Err(syntax(format!("bad parity `{other}`"))),
            };
            let meas_ids = toks[3]
                .split(',')
                .map(|t| t.parse::<u32>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| syntax("bad meas id list".into()))?;
            let mut replay = Vec::new();
            for r in toks[5].split(',') {
                let (a, b) = match r.split_once('-') {
                    Some((a, b)) => (a, b),
                    None => (r, r),
                };
                replay.push((
                    a.parse().map_err(|_| syntax("bad replay range".into()))?,
                    b.parse().map_err(|_| syntax("bad replay range".into()))?,
                ));
            }
            let mut drop = Vec::new();
            for d in toks[7].split(',') {
                let (n, s) = d
                    .split_once(':')
                    .ok_or_else(|| syntax("bad drop entry".into()))?;
                drop.push((node(n)?, slot(s)?));
            }
            Ok(Instruction::Distill(DistillCheck {
                parity_even,
                meas_ids,
                replay,
                drop,
            }))
        }
        other => Err(syntax(format!("unknown instruction `{other}`"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        let recipe = ProtocolRecipe {
            name: "toy".into(),
            k: 2,
            q: 2,
            nodes: vec![NodeId::A, NodeId::B],
            instructions: vec![
                Instruction::Link {
                    a: NodeId::A,
                    b: NodeId::B,
                },
                Instruction::Swap {
                    node: NodeId::A,
                    s1: Slot::Comm,
                    s2: Slot::Mem(0),
                },
                Instruction::Link {
                    a: NodeId::A,
                    b: NodeId::B,
                },
                Instruction::Gate2 {
                    gate: Gate::CZ,
                    node: NodeId::A,
                    control: Slot::Comm,
                    target: Slot::Mem(0),
                },
                Instruction::Measure {
                    id: 0,
                    node: NodeId::A,
                    slot: Slot::Comm,
                    basis: Basis::X,
                },
                Instruction::Measure {
                    id: 1,
                    node: NodeId::B,
                    slot: Slot::Comm,
                    basis: Basis::X,
                },
                Instruction::Correct {
                    meas: 0,
                    pauli: Pauli::X,
                    node: NodeId::B,
                    slot: Slot::Mem(0),
                },
                Instruction::Distill(DistillCheck {
                    parity_even: true,
                    meas_ids: vec![0, 1],
                    replay: vec![(0, 7)],
                    drop: vec![(NodeId::A, Slot::Mem(0)), (NodeId::B, Slot::Mem(0))],
                }),
                Instruction::Sync,
            ],
        };
        let text = recipe.to_text();
        let parsed = ProtocolRecipe::parse(&text, "test").unwrap();
        assert_eq!(parsed, recipe);
        assert_eq!(parsed.to_text(), text);
        assert_eq!(parsed.derived_k(), 2);
    }

    #[test]
    fn rejects_unknown_instructions_and_bad_references() {
        let bad = "version 1\nname x\nk 1\nq 1\nnodes A B\nbegin\nfrobnicate A\nend\n";
        assert!(ProtocolRecipe::parse(bad, "t").is_err());
        let bad_ref = "version 1\nname x\nk 1\nq 1\nnodes A B\nbegin\ncorr 7 x A c\nend\n";
        assert!(ProtocolRecipe::parse(bad_ref, "t").is_err());
    }
}
