//! The stabilizer group of GHZ states.
//!
//! `|GHZ_n>` is stabilized by the group generated by `X^(x)n` and the
//! weight-2 operators `Z_i Z_j`. Every element is either a product of Z
//! pairs (an even-support Z string) or `X^(x)n` times such a product, which
//! turns the X letters at the Z positions into Y and contributes a sign
//! `(-1)^(|S|/2)` for `|S|` Y letters.

use crate::densmat::{Pauli, PauliString};
use crate::error::SimError;

/// A signed Pauli string; `letters` are indexed by the target state's
/// qubits in sorted node order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Stabilizer {
    pub letters: PauliString,
    pub negative: bool,
}

impl Stabilizer {
    /// Weight: number of non-identity letters.
    pub fn weight(&self) -> usize {
        self.letters.weight()
    }

    /// Positions of the non-identity letters.
    pub fn support(&self) -> Vec<usize> {
        self.letters
            .0
            .iter()
            .enumerate()
            .filter(|(_, p)| **p != Pauli::I)
            .map(|(i, _)| i)
            .collect()
    }

    /// Check membership in the GHZ_n stabilizer group (identity excluded).
    pub fn validate_for_ghz(&self, n: usize) -> Result<(), SimError> {
        if self.letters.len() != n {
            return Err(SimError::InvalidParameter(format!(
                "stabilizer length {} does not match state weight {n}",
                self.letters.len()
            )));
        }
        let has_xy = self
            .letters
            .0
            .iter()
            .any(|p| matches!(p, Pauli::X | Pauli::Y));
        if has_xy {
            if self.letters.0.iter().any(|p| matches!(p, Pauli::I | Pauli::Z)) {
                return Err(SimError::InvalidParameter(format!(
                    "{} is not a GHZ stabilizer: X/Y letters must cover every qubit",
                    self.letters
                )));
            }
            let y_count = self.letters.0.iter().filter(|p| **p == Pauli::Y).count();
            if y_count % 2 != 0 {
                return Err(SimError::InvalidParameter(format!(
                    "{} is not a GHZ stabilizer: odd number of Y letters",
                    self.letters
                )));
            }
            let expect_negative = (y_count / 2) % 2 == 1;
            if self.negative != expect_negative {
                return Err(SimError::InvalidParameter(format!(
                    "wrong sign for {}: expected {}",
                    self.letters,
                    if expect_negative { "-" } else { "+" }
                )));
            }
        } else {
            let z_count = self.letters.0.iter().filter(|p| **p == Pauli::Z).count();
            if z_count == 0 || z_count % 2 != 0 {
                return Err(SimError::InvalidParameter(format!(
                    "{} is not a GHZ stabilizer: Z support must be even and non-empty",
                    self.letters
                )));
            }
            if self.negative {
                return Err(SimError::InvalidParameter(format!(
                    "Z-type stabilizer {} cannot be negative",
                    self.letters
                )));
            }
        }
        Ok(())
    }

    /// Canonical text form, e.g. `+XXXX` or `-XXYY`.
    pub fn to_text(&self) -> String {
        format!(
            "{}{}",
            if self.negative { '-' } else { '+' },
            self.letters
        )
    }

    pub fn parse(s: &str) -> Option<Stabilizer> {
        let (sign, rest) = match s.as_bytes().first()? {
            b'+' => (false, &s[1..]),
            b'-' => (true, &s[1..]),
            _ => (false, s),
        };
        Some(Stabilizer {
            letters: PauliString::parse(rest)?,
            negative: sign,
        })
    }
}

/// Every non-identity element of the GHZ_n stabilizer group, in a fixed
/// deterministic order.
pub fn ghz_stabilizers(n: usize) -> Vec<Stabilizer> {
    assert!((2..=4).contains(&n), "GHZ weight must be 2..=4");
    let mut out = Vec::new();
    for with_x in [false, true] {
        for mask in 0..(1u32 << n) {
            if mask.count_ones() % 2 != 0 {
                continue;
            }
            if !with_x && mask == 0 {
                continue; // identity
            }
            let letters: Vec<Pauli> = (0..n)
                .map(|i| {
                    let z = (mask >> i) & 1 == 1;
                    match (with_x, z) {
                        (false, false) => Pauli::I,
                        (false, true) => Pauli::Z,
                        (true, false) => Pauli::X,
                        (true, true) => Pauli::Y,
                    }
                })
                .collect();
            let negative = with_x && (mask.count_ones() / 2) % 2 == 1;
            out.push(Stabilizer {
                letters: PauliString(letters),
                negative,
            });
        }
    }
    out
}
