//! The four-round stabilizer schedule.
//!
//! Single-communication-qubit nodes cannot serve two overlapping GHZ
//! generations at once, so each cycle splits into two checkerboard rounds
//! of plaquettes followed by two of stars; every node then takes part in
//! exactly one stabilizer measurement per round.

use super::lattice::{StabKind, ToricLattice};

#[derive(Debug, Clone)]
pub struct StabilizerBatch {
    pub kind: StabKind,
    pub sites: Vec<usize>,
}

/// Checkerboard partition: plaquette-even, plaquette-odd, star-even,
/// star-odd. Requires an even lattice size so the coloring wraps.
pub fn four_round_schedule(lattice: &ToricLattice) -> [StabilizerBatch; 4] {
    assert!(lattice.l % 2 == 0, "odd lattice sizes break the checkerboard");
    let split = |kind: StabKind| {
        let mut even = Vec::new();
        let mut odd = Vec::new();
        for site in 0..lattice.num_sites() {
            let (i, j) = (site / lattice.l, site % lattice.l);
            if (i + j) % 2 == 0 {
                even.push(site);
            } else {
                odd.push(site);
            }
        }
        (
            StabilizerBatch { kind, sites: even },
            StabilizerBatch { kind, sites: odd },
        )
    };
    let (pe, po) = split(StabKind::Plaquette);
    let (se, so) = split(StabKind::Star);
    [pe, po, se, so]
}
