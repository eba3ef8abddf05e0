//! The toric surface code lattice: data qubits on the edges of an L x L
//! periodic grid, Z stabilizers on plaquettes, X stabilizers on stars.

use crate::densmat::Pauli;

/// Edge index: horizontal edges `h(i,j) = i*L + j` run from vertex `(i,j)`
/// to `(i,j+1)`; vertical edges `v(i,j) = L^2 + i*L + j` run from `(i,j)`
/// to `(i+1,j)`. All coordinates wrap.
#[derive(Debug, Clone)]
pub struct ToricLattice {
    pub l: usize,
}

/// Which stabilizer family a site belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StabKind {
    /// Z-type, detects bit flips.
    Plaquette,
    /// X-type, detects phase flips.
    Star,
}

/// Pauli frame of the data qubits: per-edge bit-flip and phase-flip bits.
#[derive(Debug, Clone)]
pub struct ErrorPattern {
    pub x: Vec<bool>,
    pub z: Vec<bool>,
}

impl ErrorPattern {
    pub fn new(lattice: &ToricLattice) -> ErrorPattern {
        ErrorPattern {
            x: vec![false; lattice.num_edges()],
            z: vec![false; lattice.num_edges()],
        }
    }

    /// Apply one Pauli letter to one edge.
    pub fn apply(&mut self, edge: usize, p: Pauli) {
        match p {
            Pauli::I => {}
            Pauli::X => self.x[edge] = !self.x[edge],
            Pauli::Z => self.z[edge] = !self.z[edge],
            Pauli::Y => {
                self.x[edge] = !self.x[edge];
                self.z[edge] = !self.z[edge];
            }
        }
    }
}

impl ToricLattice {
    pub fn new(l: usize) -> ToricLattice {
        assert!(l >= 2, "lattice size must be at least 2");
        ToricLattice { l }
    }

    pub fn num_edges(&self) -> usize {
        2 * self.l * self.l
    }

    pub fn num_sites(&self) -> usize {
        self.l * self.l
    }

    pub fn h(&self, i: usize, j: usize) -> usize {
        (i % self.l) * self.l + (j % self.l)
    }

    pub fn v(&self, i: usize, j: usize) -> usize {
        self.l * self.l + (i % self.l) * self.l + (j % self.l)
    }

    /// The four edges of a stabilizer in ring order (each consecutive pair,
    /// and the last-first pair, meet at a lattice vertex). This order maps
    /// onto the four network nodes of the GHZ protocol.
    pub fn stabilizer_edges(&self, kind: StabKind, site: usize) -> [usize; 4] {
        let (i, j) = (site / self.l, site % self.l);
        match kind {
            // Face (i, j): top, right, bottom, left.
            StabKind::Plaquette => [
                self.h(i, j),
                self.v(i, j + 1),
                self.h(i + 1, j),
                self.v(i, j),
            ],
            // Vertex (i, j): up, right, down, left.
            StabKind::Star => [
                self.v(i + self.l - 1, j),
                self.h(i, j),
                self.v(i, j),
                self.h(i, j + self.l - 1),
            ],
        }
    }

    /// True stabilizer eigenvalue under the current error pattern.
    pub fn eigenvalue(&self, kind: StabKind, site: usize, errors: &ErrorPattern) -> i8 {
        let flips = self
            .stabilizer_edges(kind, site)
            .iter()
            .filter(|e| match kind {
                StabKind::Plaquette => errors.x[**e],
                StabKind::Star => errors.z[**e],
            })
            .count();
        if flips % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// Neighbouring site across each of the four stabilizer edges, aligned
    /// with [`stabilizer_edges`]: `neighbor[k]` shares edge `k`.
    pub fn site_neighbors(&self, kind: StabKind, site: usize) -> [usize; 4] {
        let (i, j) = (site / self.l, site % self.l);
        let l = self.l;
        let wrap = |i: usize, j: usize| (i % l) * l + (j % l);
        match kind {
            StabKind::Plaquette => [
                wrap(i + l - 1, j),
                wrap(i, j + 1),
                wrap(i + 1, j),
                wrap(i, j + l - 1),
            ],
            StabKind::Star => [
                wrap(i + l - 1, j),
                wrap(i, j + 1),
                wrap(i + 1, j),
                wrap(i, j + l - 1),
            ],
        }
    }

    /// Edges of the four non-contractible logical operators.
    pub fn logical_z(&self, which: usize) -> Vec<usize> {
        match which {
            // Vertical loop of vertical edges in column 0.
            0 => (0..self.l).map(|i| self.v(i, 0)).collect(),
            // Horizontal loop of horizontal edges in row 0.
            _ => (0..self.l).map(|j| self.h(0, j)).collect(),
        }
    }

    pub fn logical_x(&self, which: usize) -> Vec<usize> {
        match which {
            // Dual horizontal loop: vertical edges of row 0.
            0 => (0..self.l).map(|j| self.v(0, j)).collect(),
            // Dual vertical loop: horizontal edges of column 0.
            _ => (0..self.l).map(|i| self.h(i, 0)).collect(),
        }
    }

    /// Anticommutation bits of the residual against the four logical
    /// operators, ordered `[Z1 vs X-errors, Z2 vs X-errors, X1 vs
    /// Z-errors, X2 vs Z-errors]`; the memory survived iff all clear.
    pub fn logical_check(&self, residual: &ErrorPattern) -> [bool; 4] {
        let odd = |edges: &[usize], bits: &[bool]| {
            edges.iter().filter(|e| bits[**e]).count() % 2 == 1
        };
        [
            odd(&self.logical_z(0), &residual.x),
            odd(&self.logical_z(1), &residual.x),
            odd(&self.logical_x(0), &residual.z),
            odd(&self.logical_x(1), &residual.z),
        ]
    }
}
