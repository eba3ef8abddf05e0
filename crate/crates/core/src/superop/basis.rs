//! The orthonormal Choi-state basis of a stabilizer measurement channel.
//!
//! For the maximally entangled state `|Psi> = sum_j |j>|j> / sqrt(2^n)` over
//! `n` data and `n` reference qubits, the projected states
//! `|Psi_+-> = (1 +- P^(x)n (x) 1)/sqrt(2) |Psi>` and their Pauli-shifted
//! versions `|Psi_s^(m)> = (P_m (x) 1)|Psi_s>` form a complete orthonormal
//! basis once one representative per coset `{P_m, P_m P^(x)n}` is kept.

use num_complex::Complex64;

use crate::densmat::{Pauli, PauliString};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StabilizerType {
    X,
    Z,
}

impl StabilizerType {
    pub fn letter(&self) -> Pauli {
        match self {
            StabilizerType::X => Pauli::X,
            StabilizerType::Z => Pauli::Z,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            StabilizerType::X => "X",
            StabilizerType::Z => "Z",
        }
    }

    pub fn from_name(s: &str) -> Option<StabilizerType> {
        match s {
            "X" | "x" => Some(StabilizerType::X),
            "Z" | "z" => Some(StabilizerType::Z),
            _ => None,
        }
    }
}

/// Sparse state vector over `2n` qubits (basis index, amplitude).
pub type SparseVec = Vec<(usize, Complex64)>;

/// Apply one Pauli letter to a computational-basis ket index at the given
/// qubit position (big-endian over `total` qubits).
fn apply_letter(
    letter: Pauli,
    pos: usize,
    total: usize,
    idx: usize,
    amp: Complex64,
) -> (usize, Complex64) {
    let mask = 1usize << (total - 1 - pos);
    let bit = idx & mask != 0;
    match letter {
        Pauli::I => (idx, amp),
        Pauli::X => (idx ^ mask, amp),
        Pauli::Z => (idx, if bit { -amp } else { amp }),
        // Y|0> = i|1>, Y|1> = -i|0>.
        Pauli::Y => {
            let i = Complex64::new(0.0, 1.0);
            (idx ^ mask, if bit { -i * amp } else { i * amp })
        }
    }
}

fn apply_string(string: &PauliString, total: usize, v: &SparseVec) -> SparseVec {
    v.iter()
        .map(|(idx, amp)| {
            let mut cur = (*idx, *amp);
            for (pos, letter) in string.0.iter().enumerate() {
                cur = apply_letter(*letter, pos, total, cur.0, cur.1);
            }
            cur
        })
        .collect()
}

fn merge(v: SparseVec) -> SparseVec {
    let mut sorted = v;
    sorted.sort_by_key(|(i, _)| *i);
    let mut out: SparseVec = Vec::with_capacity(sorted.len());
    for (i, a) in sorted {
        match out.last_mut() {
            Some((j, b)) if *j == i => *b += a,
            _ => out.push((i, a)),
        }
    }
    out.retain(|(_, a)| a.norm_sqr() > 1e-24);
    out
}

/// Precomputed basis for one stabilizer type and data-qubit count.
pub struct ChoiBasis {
    pub n: usize,
    pub stabilizer: StabilizerType,
    /// Coset representatives in dense Pauli-string index order.
    pub representatives: Vec<PauliString>,
    /// Basis vectors: `states[m][s]` for representative `m` and branch
    /// `s in {+, -}` (no-measurement-error first).
    states: Vec<[SparseVec; 2]>,
}

impl ChoiBasis {
    pub fn new(stabilizer: StabilizerType, n: usize) -> ChoiBasis {
        let total = 2 * n;
        let dim_half = 1usize << n;
        let norm = Complex64::new(1.0 / (dim_half as f64).sqrt(), 0.0);
        let psi: SparseVec = (0..dim_half)
            .map(|j| (j * dim_half + j, norm))
            .collect();
        let full = PauliString::uniform(stabilizer.letter(), n);
        let shifted = apply_string(&full, total, &psi);
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let psi_plus = merge(
            psi.iter()
                .map(|(i, a)| (*i, a * h))
                .chain(shifted.iter().map(|(i, a)| (*i, a * h)))
                .collect(),
        );
        let psi_minus = merge(
            psi.iter()
                .map(|(i, a)| (*i, a * h))
                .chain(shifted.iter().map(|(i, a)| (*i, -a * h)))
                .collect(),
        );

        let mut representatives = Vec::new();
        let mut states = Vec::new();
        for m_idx in 0..(1usize << (2 * n)) {
            let m = PauliString::from_dense_index(m_idx, n);
            let partner = m.mul_letterwise(&full);
            if partner.index() < m_idx {
                continue; // the coset partner is the representative
            }
            let plus = merge(apply_string(&m, total, &psi_plus));
            let minus = merge(apply_string(&m, total, &psi_minus));
            representatives.push(m);
            states.push([plus, minus]);
        }
        ChoiBasis {
            n,
            stabilizer,
            representatives,
            states,
        }
    }

    /// `<Psi_s^(m)| rho |Psi_s^(m)>` for representative index `m_pos` and
    /// branch `s` (0 = no measurement error, 1 = measurement error), where
    /// `rho` is a row-major `4^n x 4^n` matrix over the canonical qubit
    /// order (data qubits first, then reference qubits).
    pub fn probability(&self, mat: &[Complex64], m_pos: usize, s: usize) -> f64 {
        let v = &self.states[m_pos][s];
        let dim = 1usize << (2 * self.n);
        debug_assert_eq!(mat.len(), dim * dim);
        let mut acc = Complex64::default();
        for (i, ai) in v {
            for (j, aj) in v {
                acc += ai.conj() * mat[i * dim + j] * aj;
            }
        }
        acc.re
    }

    pub fn num_representatives(&self) -> usize {
        self.representatives.len()
    }
}
