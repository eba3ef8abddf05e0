//! Pauli letters and Pauli strings.

use std::fmt;

/// Single-qubit Pauli operator, ordered `I < X < Y < Z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pauli {
    I = 0,
    X = 1,
    Y = 2,
    Z = 3,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn from_index(i: usize) -> Pauli {
        Pauli::ALL[i]
    }

    pub fn letter(&self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_letter(c: char) -> Option<Pauli> {
        match c.to_ascii_uppercase() {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    /// Product of two Pauli letters with the phase dropped.
    pub fn mul_letter(&self, other: Pauli) -> Pauli {
        // The non-identity letters form the Klein group under phaseless
        // multiplication: a*a = I, and the product of two distinct letters
        // is the third.
        let (a, b) = (*self as u8, other as u8);
        if a == 0 {
            return other;
        }
        if b == 0 {
            return *self;
        }
        if a == b {
            return Pauli::I;
        }
        Pauli::from_index((6 - a - b) as usize)
    }

    pub fn anticommutes(&self, other: Pauli) -> bool {
        *self != Pauli::I && other != Pauli::I && *self != other
    }
}

/// A string of Pauli letters; length 4 in every stabilizer-channel context.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PauliString(pub Vec<Pauli>);

impl PauliString {
    pub fn identity(n: usize) -> PauliString {
        PauliString(vec![Pauli::I; n])
    }

    pub fn uniform(p: Pauli, n: usize) -> PauliString {
        PauliString(vec![p; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().all(|p| *p == Pauli::I)
    }

    pub fn weight(&self) -> usize {
        self.0.iter().filter(|p| **p != Pauli::I).count()
    }

    /// Letter-wise product with the phase dropped.
    pub fn mul_letterwise(&self, other: &PauliString) -> PauliString {
        debug_assert_eq!(self.len(), other.len());
        PauliString(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a.mul_letter(*b))
                .collect(),
        )
    }

    /// Whether the string anticommutes with `other` (odd number of
    /// position-wise anticommutations).
    pub fn anticommutes(&self, other: &PauliString) -> bool {
        self.0
            .iter()
            .zip(&other.0)
            .filter(|(a, b)| a.anticommutes(**b))
            .count()
            % 2
            == 1
    }

    /// Dense index of the string when each letter is a base-4 digit,
    /// first qubit most significant.
    pub fn index(&self) -> usize {
        self.0.iter().fold(0, |acc, p| acc * 4 + *p as usize)
    }

    pub fn from_dense_index(mut idx: usize, n: usize) -> PauliString {
        let mut letters = vec![Pauli::I; n];
        for k in (0..n).rev() {
            letters[k] = Pauli::from_index(idx % 4);
            idx /= 4;
        }
        PauliString(letters)
    }

    pub fn parse(s: &str) -> Option<PauliString> {
        s.chars().map(Pauli::from_letter).collect::<Option<_>>().map(PauliString)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.0 {
            write!(f, "{}", p.letter())?;
        }
        Ok(())
    }
}
