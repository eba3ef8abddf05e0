//! Dense density-matrix register.
//!
//! A [`DensityState`] owns an ordered sequence of qubit labels and the
//! `2^n x 2^n` complex matrix over them. The ordering convention is
//! big-endian: the first label is the most significant bit of a basis-state
//! index, so `|q0 q1 ... q(n-1)>` has index `q0*2^(n-1) + ... + q(n-1)`.
//!
//! States are plain values. Nothing here mutates shared data, so registers
//! can be sent freely between Monte Carlo workers.

use num_complex::Complex64;

use super::eigen::hermitian_eigenvalues;
use super::label::QubitLabel;
use super::pauli::{Pauli, PauliString};
use crate::error::SimError;

pub const TRACE_TOL: f64 = 1e-9;
pub const HERMITICITY_TOL: f64 = 1e-9;
pub const EIGENVALUE_TOL: f64 = -1e-8;

const C0: Complex64 = Complex64::new(0.0, 0.0);
const C1: Complex64 = Complex64::new(1.0, 0.0);

/// The gate set of the hardware model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Gate {
    X,
    Y,
    Z,
    H,
    CX,
    CZ,
    CiY,
}

impl Gate {
    pub fn is_two_qubit(&self) -> bool {
        matches!(self, Gate::CX | Gate::CZ | Gate::CiY)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Gate::X => "x",
            Gate::Y => "y",
            Gate::Z => "z",
            Gate::H => "h",
            Gate::CX => "cx",
            Gate::CZ => "cz",
            Gate::CiY => "ciy",
        }
    }

    pub fn from_name(s: &str) -> Option<Gate> {
        match s {
            "x" => Some(Gate::X),
            "y" => Some(Gate::Y),
            "z" => Some(Gate::Z),
            "h" => Some(Gate::H),
            "cx" => Some(Gate::CX),
            "cz" => Some(Gate::CZ),
            "ciy" => Some(Gate::CiY),
            _ => None,
        }
    }

    /// For controlled gates, the 2x2 block applied to the target.
    fn target_block(&self) -> [Complex64; 4] {
        match self {
            Gate::CX => mat1q(Pauli::X),
            Gate::CZ => mat1q(Pauli::Z),
            // i*Y = [[0, 1], [-1, 0]]
            Gate::CiY => [C0, C1, -C1, C0],
            _ => unreachable!("not a controlled gate"),
        }
    }
}

fn mat1q(p: Pauli) -> [Complex64; 4] {
    let i = Complex64::new(0.0, 1.0);
    match p {
        Pauli::I => [C1, C0, C0, C1],
        Pauli::X => [C0, C1, C1, C0],
        Pauli::Y => [C0, -i, i, C0],
        Pauli::Z => [C1, C0, C0, -C1],
    }
}

const H_MATRIX: [Complex64; 4] = {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    [
        Complex64::new(h, 0.0),
        Complex64::new(h, 0.0),
        Complex64::new(h, 0.0),
        Complex64::new(-h, 0.0),
    ]
};

/// Dense density matrix over an ordered set of live qubits.
#[derive(Debug, Clone)]
pub struct DensityState {
    labels: Vec<QubitLabel>,
    mat: Vec<Complex64>,
}

impl DensityState {
    /// The zero-qubit state (the scalar 1); measuring the last qubit of a
    /// register leaves this behind.
    pub fn vacuous() -> DensityState {
        DensityState {
            labels: Vec::new(),
            mat: vec![C1],
        }
    }

    /// `|0...0><0...0|` over the given labels.
    pub fn zeros(labels: Vec<QubitLabel>) -> DensityState {
        let dim = 1usize << labels.len();
        let mut mat = vec![C0; dim * dim];
        mat[0] = C1;
        DensityState { labels, mat }
    }

    /// Pure state from an amplitude vector of length `2^n`.
    pub fn from_pure(labels: Vec<QubitLabel>, amplitudes: &[Complex64]) -> DensityState {
        let dim = 1usize << labels.len();
        assert_eq!(amplitudes.len(), dim, "amplitude vector length");
        let mut mat = vec![C0; dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                mat[i * dim + j] = amplitudes[i] * amplitudes[j].conj();
            }
        }
        DensityState { labels, mat }
    }

    /// Convex mixture of pure states sharing one label set.
    pub fn mixture(labels: Vec<QubitLabel>, terms: &[(f64, Vec<Complex64>)]) -> DensityState {
        let dim = 1usize << labels.len();
        let mut mat = vec![C0; dim * dim];
        for (w, amp) in terms {
            assert_eq!(amp.len(), dim);
            for i in 0..dim {
                for j in 0..dim {
                    mat[i * dim + j] += *w * amp[i] * amp[j].conj();
                }
            }
        }
        DensityState { labels, mat }
    }

    /// `(|0...0> + |1...1>)/sqrt(2)` over the given labels.
    pub fn ghz(labels: Vec<QubitLabel>) -> DensityState {
        let dim = 1usize << labels.len();
        let mut amp = vec![C0; dim];
        let a = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        amp[0] = a;
        amp[dim - 1] = a;
        DensityState::from_pure(labels, &amp)
    }

    /// Maximally mixed state `I / 2^n`.
    pub fn maximally_mixed(labels: Vec<QubitLabel>) -> DensityState {
        let dim = 1usize << labels.len();
        let mut mat = vec![C0; dim * dim];
        let v = Complex64::new(1.0 / dim as f64, 0.0);
        for i in 0..dim {
            mat[i * dim + i] = v;
        }
        DensityState { labels, mat }
    }

    pub fn num_qubits(&self) -> usize {
        self.labels.len()
    }

    pub fn dim(&self) -> usize {
        1usize << self.labels.len()
    }

    pub fn labels(&self) -> &[QubitLabel] {
        &self.labels
    }

    pub fn matrix(&self) -> &[Complex64] {
        &self.mat
    }

    pub fn index_of(&self, label: &QubitLabel) -> Result<usize, SimError> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| SimError::UnknownQubit(label.to_string()))
    }

    pub fn contains(&self, label: &QubitLabel) -> bool {
        self.labels.contains(label)
    }

    fn bit_mask(&self, qubit_pos: usize) -> usize {
        1usize << (self.labels.len() - 1 - qubit_pos)
    }

    pub fn trace(&self) -> f64 {
        let dim = self.dim();
        (0..dim).map(|i| self.mat[i * dim + i].re).sum()
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        let dim = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..dim {
            for j in 0..=i {
                let d = (self.mat[i * dim + j] - self.mat[j * dim + i].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.mat, self.dim())
    }

    /// Check the density-matrix invariants: unit trace, Hermiticity, and
    /// positivity down to the accepted floating-point drift.
    pub fn check_physical(&self) -> Result<(), SimError> {
        let tr = self.trace();
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(SimError::InvalidParameter(format!(
                "trace {tr} deviates from 1 beyond {TRACE_TOL}"
            )));
        }
        let herm = self.hermiticity_deviation();
        if herm > HERMITICITY_TOL {
            return Err(SimError::NotHermitian(herm));
        }
        let min = self
            .eigenvalues()
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        if min < EIGENVALUE_TOL {
            return Err(SimError::NegativeEigenvalue(min));
        }
        Ok(())
    }

    /// Tensor product; `self` keeps the most significant bits.
    pub fn tensor(&self, other: &DensityState) -> DensityState {
        let (da, db) = (self.dim(), other.dim());
        let dim = da * db;
        let mut labels = self.labels.clone();
        labels.extend_from_slice(&other.labels);
        let mut mat = vec![C0; dim * dim];
        for ia in 0..da {
            for ja in 0..da {
                let a = self.mat[ia * da + ja];
                if a == C0 {
                    continue;
                }
                for ib in 0..db {
                    let row = ia * db + ib;
                    for jb in 0..db {
                        mat[row * dim + (ja * db + jb)] = a * other.mat[ib * db + jb];
                    }
                }
            }
        }
        DensityState { labels, mat }
    }

    /// Conjugate by a single-qubit unitary: `rho -> U rho U^dag`.
    pub fn apply_1q(&mut self, u: &[Complex64; 4], qubit_pos: usize) {
        let dim = self.dim();
        let mask = self.bit_mask(qubit_pos);
        // Left multiply by U on row pairs.
        for base in StrideIter::new(dim, mask) {
            let (r0, r1) = (base, base | mask);
            for col in 0..dim {
                let x = self.mat[r0 * dim + col];
                let y = self.mat[r1 * dim + col];
                self.mat[r0 * dim + col] = u[0] * x + u[1] * y;
                self.mat[r1 * dim + col] = u[2] * x + u[3] * y;
            }
        }
        // Right multiply by U^dag on column pairs.
        for base in StrideIter::new(dim, mask) {
            let (c0, c1) = (base, base | mask);
            for row in 0..dim {
                let x = self.mat[row * dim + c0];
                let y = self.mat[row * dim + c1];
                self.mat[row * dim + c0] = x * u[0].conj() + y * u[1].conj();
                self.mat[row * dim + c1] = x * u[2].conj() + y * u[3].conj();
            }
        }
    }

    /// Conjugate by a controlled single-qubit unitary.
    pub fn apply_controlled_1q(&mut self, u: &[Complex64; 4], control_pos: usize, target_pos: usize) {
        let dim = self.dim();
        let cmask = self.bit_mask(control_pos);
        let tmask = self.bit_mask(target_pos);
        for base in StrideIter::new(dim, tmask) {
            if base & cmask == 0 {
                continue;
            }
            let (r0, r1) = (base, base | tmask);
            for col in 0..dim {
                let x = self.mat[r0 * dim + col];
                let y = self.mat[r1 * dim + col];
                self.mat[r0 * dim + col] = u[0] * x + u[1] * y;
                self.mat[r1 * dim + col] = u[2] * x + u[3] * y;
            }
        }
        for base in StrideIter::new(dim, tmask) {
            if base & cmask == 0 {
                continue;
            }
            let (c0, c1) = (base, base | tmask);
            for row in 0..dim {
                let x = self.mat[row * dim + c0];
                let y = self.mat[row * dim + c1];
                self.mat[row * dim + c0] = x * u[0].conj() + y * u[1].conj();
                self.mat[row * dim + c1] = x * u[2].conj() + y * u[3].conj();
            }
        }
    }

    /// Apply a gate from the hardware gate set.
    pub fn apply_gate(&mut self, gate: Gate, targets: &[QubitLabel]) -> Result<(), SimError> {
        match gate {
            Gate::X | Gate::Y | Gate::Z | Gate::H => {
                if targets.len() != 1 {
                    return Err(SimError::InvalidParameter(format!(
                        "{} expects one target",
                        gate.name()
                    )));
                }
                let q = self.index_of(&targets[0])?;
                let u = match gate {
                    Gate::X => mat1q(Pauli::X),
                    Gate::Y => mat1q(Pauli::Y),
                    Gate::Z => mat1q(Pauli::Z),
                    Gate::H => H_MATRIX,
                    _ => unreachable!(),
                };
                self.apply_1q(&u, q);
            }
            Gate::CX | Gate::CZ | Gate::CiY => {
                if targets.len() != 2 {
                    return Err(SimError::InvalidParameter(format!(
                        "{} expects control and target",
                        gate.name()
                    )));
                }
                if targets[0] == targets[1] {
                    return Err(SimError::ControlEqualsTarget);
                }
                let c = self.index_of(&targets[0])?;
                let t = self.index_of(&targets[1])?;
                self.apply_controlled_1q(&gate.target_block(), c, t);
            }
        }
        Ok(())
    }

    /// Conjugate by a Pauli on one qubit (noiseless frame operation).
    pub fn apply_pauli(&mut self, p: Pauli, label: &QubitLabel) -> Result<(), SimError> {
        if p == Pauli::I {
            return Ok(());
        }
        let q = self.index_of(label)?;
        self.apply_1q(&mat1q(p), q);
        Ok(())
    }

    /// SWAP realized as three CNOT gates (noise handled by the caller).
    pub fn apply_swap(&mut self, a: &QubitLabel, b: &QubitLabel) -> Result<(), SimError> {
        if a == b {
            return Err(SimError::ControlEqualsTarget);
        }
        self.apply_gate(Gate::CX, &[*a, *b])?;
        self.apply_gate(Gate::CX, &[*b, *a])?;
        self.apply_gate(Gate::CX, &[*a, *b])?;
        Ok(())
    }

    /// Apply a single-qubit Kraus channel `rho -> sum_i K_i rho K_i^dag`.
    ///
    /// The set must resolve the identity within `1e-9`.
    pub fn apply_kraus_1q(
        &mut self,
        kraus: &[[Complex64; 4]],
        label: &QubitLabel,
    ) -> Result<(), SimError> {
        let mut comp = [C0; 4];
        for k in kraus {
            // K^dag K
            comp[0] += k[0].conj() * k[0] + k[2].conj() * k[2];
            comp[1] += k[0].conj() * k[1] + k[2].conj() * k[3];
            comp[2] += k[1].conj() * k[0] + k[3].conj() * k[2];
            comp[3] += k[1].conj() * k[1] + k[3].conj() * k[3];
        }
        let dev = (comp[0] - C1)
            .norm()
            .max((comp[3] - C1).norm())
            .max(comp[1].norm())
            .max(comp[2].norm());
        if dev > 1e-9 {
            return Err(SimError::IncompleteKraus { deviation: dev });
        }
        let q = self.index_of(label)?;
        let mut acc = vec![C0; self.mat.len()];
        let original = self.mat.clone();
        for k in kraus {
            self.mat.copy_from_slice(&original);
            self.apply_1q_general(k, q);
            for (a, m) in acc.iter_mut().zip(&self.mat) {
                *a += m;
            }
        }
        self.mat = acc;
        Ok(())
    }

    /// `rho -> K rho K^dag` for a general (non-unitary) 2x2 operator.
    fn apply_1q_general(&mut self, k: &[Complex64; 4], qubit_pos: usize) {
        // Same sweep as apply_1q; kept separate so the unitary path stays
        // easy to read.
        self.apply_1q(k, qubit_pos);
    }

    /// Probability that a Z measurement of the qubit yields +1.
    pub fn prob_z_plus(&self, label: &QubitLabel) -> Result<f64, SimError> {
        let q = self.index_of(label)?;
        let dim = self.dim();
        let mask = self.bit_mask(q);
        let mut p = 0.0;
        for i in 0..dim {
            if i & mask == 0 {
                p += self.mat[i * dim + i].re;
            }
        }
        Ok(p)
    }

    /// Project a qubit onto the chosen Z branch, renormalize, and remove the
    /// measured qubit from the register. Returns the branch probability.
    ///
    /// An X-basis measurement is a Hadamard followed by this.
    pub fn project_z(&mut self, label: &QubitLabel, plus: bool) -> Result<f64, SimError> {
        let q = self.index_of(label)?;
        let dim = self.dim();
        let mask = self.bit_mask(q);
        let keep_bit = if plus { 0 } else { mask };
        let mut p = 0.0;
        for i in 0..dim {
            if i & mask == keep_bit {
                p += self.mat[i * dim + i].re;
            }
        }
        if p <= 1e-12 {
            return Err(SimError::ZeroProbabilityBranch(label.to_string()));
        }
        let ndim = dim / 2;
        let mut nmat = vec![C0; ndim * ndim];
        let norm = Complex64::new(1.0 / p, 0.0);
        let mut row_idx = 0;
        for i in 0..dim {
            if i & mask != keep_bit {
                continue;
            }
            let mut col_idx = 0;
            for j in 0..dim {
                if j & mask != keep_bit {
                    continue;
                }
                nmat[row_idx * ndim + col_idx] = self.mat[i * dim + j] * norm;
                col_idx += 1;
            }
            row_idx += 1;
        }
        self.labels.remove(q);
        self.mat = nmat;
        Ok(p)
    }

    /// Trace out the given qubits; the reduced state keeps the remaining
    /// labels in order. Refuses to trace out the whole register.
    pub fn partial_trace(&self, traced: &[QubitLabel]) -> Result<DensityState, SimError> {
        if traced.is_empty() {
            return Ok(self.clone());
        }
        let mut positions = Vec::with_capacity(traced.len());
        for l in traced {
            positions.push(self.index_of(l)?);
        }
        if positions.len() >= self.labels.len() {
            return Err(SimError::TraceOutEverything);
        }
        let mut out = self.clone();
        // Trace out from the highest position so earlier positions stay valid.
        positions.sort_unstable_by(|a, b| b.cmp(a));
        for pos in positions {
            out = out.trace_out_position(pos);
        }
        Ok(out)
    }

    fn trace_out_position(&self, pos: usize) -> DensityState {
        let dim = self.dim();
        let mask = self.bit_mask(pos);
        let ndim = dim / 2;
        let mut nmat = vec![C0; ndim * ndim];
        let expand = |idx: usize| -> usize {
            // Insert a zero bit at the mask position.
            let high = (idx & !(mask - 1)) << 1;
            let low = idx & (mask - 1);
            high | low
        };
        for i in 0..ndim {
            let ei = expand(i);
            for j in 0..ndim {
                let ej = expand(j);
                nmat[i * ndim + j] =
                    self.mat[ei * dim + ej] + self.mat[(ei | mask) * dim + (ej | mask)];
            }
        }
        let mut labels = self.labels.clone();
        labels.remove(pos);
        DensityState { labels, mat: nmat }
    }

    /// Reorder the register so its labels appear in the given order.
    pub fn permuted(&self, order: &[QubitLabel]) -> Result<DensityState, SimError> {
        if order.len() != self.labels.len() {
            return Err(SimError::DimensionMismatch {
                expected: self.labels.len(),
                actual: order.len(),
            });
        }
        let mut perm = Vec::with_capacity(order.len());
        for l in order {
            perm.push(self.index_of(l)?);
        }
        let n = self.labels.len();
        let dim = self.dim();
        let remap = |idx: usize| -> usize {
            let mut out = 0usize;
            for (new_pos, old_pos) in perm.iter().enumerate() {
                let bit = (idx >> (n - 1 - old_pos)) & 1;
                out |= bit << (n - 1 - new_pos);
            }
            out
        };
        let mut nmat = vec![C0; dim * dim];
        for i in 0..dim {
            let ri = remap(i);
            for j in 0..dim {
                nmat[ri * dim + remap(j)] = self.mat[i * dim + j];
            }
        }
        Ok(DensityState {
            labels: order.to_vec(),
            mat: nmat,
        })
    }

    /// Overlap `<psi| rho |psi>` with a pure state given as amplitudes over
    /// this register's ordering.
    pub fn fidelity_pure(&self, psi: &[Complex64]) -> Result<f64, SimError> {
        let dim = self.dim();
        if psi.len() != dim {
            return Err(SimError::DimensionMismatch {
                expected: dim,
                actual: psi.len(),
            });
        }
        let mut acc = C0;
        for i in 0..dim {
            let mut row = C0;
            for j in 0..dim {
                row += self.mat[i * dim + j] * psi[j];
            }
            acc += psi[i].conj() * row;
        }
        Ok(acc.re)
    }

    /// Fidelity `<GHZ_n| rho |GHZ_n>` with the GHZ state over this register.
    pub fn fidelity_ghz(&self) -> f64 {
        let dim = self.dim();
        let a = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let mut psi = vec![C0; dim];
        psi[0] = a;
        psi[dim - 1] = a;
        self.fidelity_pure(&psi).expect("dimension matches")
    }

    /// Expectation value of a Pauli string over the full register.
    pub fn pauli_expectation(&self, string: &PauliString) -> Result<f64, SimError> {
        if string.len() != self.labels.len() {
            return Err(SimError::DimensionMismatch {
                expected: self.labels.len(),
                actual: string.len(),
            });
        }
        let mut op = self.clone();
        for (pos, p) in string.0.iter().enumerate() {
            if *p != Pauli::I {
                // Left-multiply only: tr(P rho) via conjugation trick is
                // wrong, so multiply rows directly.
                op.left_mul_only(&mat1q(*p), pos);
            }
        }
        let dim = op.dim();
        let tr: Complex64 = (0..dim).map(|i| op.mat[i * dim + i]).sum();
        Ok(tr.re)
    }

    fn left_mul_only(&mut self, u: &[Complex64; 4], qubit_pos: usize) {
        let dim = self.dim();
        let mask = self.bit_mask(qubit_pos);
        for base in StrideIter::new(dim, mask) {
            let (r0, r1) = (base, base | mask);
            for col in 0..dim {
                let x = self.mat[r0 * dim + col];
                let y = self.mat[r1 * dim + col];
                self.mat[r0 * dim + col] = u[0] * x + u[1] * y;
                self.mat[r1 * dim + col] = u[2] * x + u[3] * y;
            }
        }
    }

    /// Add `w * other` into this matrix (same label order required).
    pub fn accumulate(&mut self, other: &DensityState, w: f64) {
        debug_assert_eq!(self.labels, other.labels);
        for (a, b) in self.mat.iter_mut().zip(&other.mat) {
            *a += w * b;
        }
    }

    pub fn scale(&mut self, w: f64) {
        for a in self.mat.iter_mut() {
            *a *= w;
        }
    }

    pub fn zeros_like(&self) -> DensityState {
        DensityState {
            labels: self.labels.clone(),
            mat: vec![C0; self.mat.len()],
        }
    }

    /// Rename a qubit label in place (metadata only).
    pub fn relabel(&mut self, old: &QubitLabel, new: QubitLabel) -> Result<(), SimError> {
        if self.contains(&new) {
            return Err(SimError::DuplicateQubit(new.to_string()));
        }
        let pos = self.index_of(old)?;
        self.labels[pos] = new;
        Ok(())
    }

    /// Exchange two labels in place; equivalent to a perfect SWAP of the
    /// two qubits without touching the matrix.
    pub fn swap_labels(&mut self, a: &QubitLabel, b: &QubitLabel) -> Result<(), SimError> {
        let pa = self.index_of(a)?;
        let pb = self.index_of(b)?;
        self.labels.swap(pa, pb);
        Ok(())
    }
}

/// Trace distance `T(a, b) = 1/2 tr |a - b|` via the eigenvalues of the
/// Hermitian difference.
pub fn trace_distance(a: &DensityState, b: &DensityState) -> Result<f64, SimError> {
    if a.dim() != b.dim() {
        return Err(SimError::DimensionMismatch {
            expected: a.dim(),
            actual: b.dim(),
        });
    }
    let ha = a.hermiticity_deviation();
    let hb = b.hermiticity_deviation();
    if ha > 1e-7 || hb > 1e-7 {
        return Err(SimError::NotHermitian(ha.max(hb)));
    }
    let dim = a.dim();
    let diff: Vec<Complex64> = a
        .mat
        .iter()
        .zip(&b.mat)
        .map(|(x, y)| x - y)
        .collect();
    let ev = hermitian_eigenvalues(&diff, dim);
    Ok(0.5 * ev.iter().map(|v| v.abs()).sum::<f64>())
}

/// Iterates over all indices below `dim` whose `mask` bit is clear.
struct StrideIter {
    dim: usize,
    mask: usize,
    base: usize,
    off: usize,
}

impl StrideIter {
    fn new(dim: usize, mask: usize) -> StrideIter {
        StrideIter {
            dim,
            mask,
            base: 0,
            off: 0,
        }
    }
}

impl Iterator for StrideIter {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.base >= self.dim {
            return None;
        }
        let item = self.base + self.off;
        self.off += 1;
        if self.off == self.mask {
            self.off = 0;
            self.base += 2 * self.mask;
        }
        Some(item)
    }
}
