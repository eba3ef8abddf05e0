//! The toric memory channel driven by stabilizer-measurement
//! superoperators.
//!
//! Each cycle runs four rounds: the even-checkerboard plaquettes, the odd
//! plaquettes, then the star halves, so that every node takes part in
//! exactly one GHZ generation per round. Per stabilizer, a completion coin
//! decides between the success superoperator (sample an error and record
//! the outcome, flipped on a measurement-error flag) and the fail branch
//! (sample decoherence-only errors and repeat the previous outcome). A
//! final perfect readout round closes the time dimension before decoding.

use rand::Rng;

use super::decoder::{decode_union_find, edge_set_syndrome, DecodeGraph};
use super::lattice::{ErrorPattern, StabKind, ToricLattice};
use super::schedule::four_round_schedule;
use crate::densmat::PauliString;
use crate::error::SimError;
use crate::rng::SimRng;
use crate::superop::Superoperator;

/// Noise of one stabilizer round.
#[derive(Debug, Clone)]
pub struct RoundNoise {
    pub success: Superoperator,
    pub fail: Option<Superoperator>,
    pub p_ghz: f64,
}

impl RoundNoise {
    pub fn perfect(kind: StabKind) -> RoundNoise {
        RoundNoise {
            success: Superoperator::identity(stab_type(kind), crate::superop::SuperopKind::Success, 4),
            fail: None,
            p_ghz: 1.0,
        }
    }
}

fn stab_type(kind: StabKind) -> crate::superop::StabilizerType {
    match kind {
        StabKind::Plaquette => crate::superop::StabilizerType::Z,
        StabKind::Star => crate::superop::StabilizerType::X,
    }
}

/// Noise model of the full four-round cycle.
#[derive(Debug, Clone)]
pub struct ChannelNoise {
    /// Indexed by round: plaquette-even, plaquette-odd, star-even,
    /// star-odd.
    pub rounds: [RoundNoise; 4],
}

impl ChannelNoise {
    /// Identity superoperators everywhere: the noiseless channel.
    pub fn perfect() -> ChannelNoise {
        ChannelNoise {
            rounds: [
                RoundNoise::perfect(StabKind::Plaquette),
                RoundNoise::perfect(StabKind::Plaquette),
                RoundNoise::perfect(StabKind::Star),
                RoundNoise::perfect(StabKind::Star),
            ],
        }
    }

    /// The plaquette rounds use the Z characterization, the star rounds the
    /// X characterization.
    pub fn from_characterizations(
        z: (Superoperator, Option<Superoperator>, f64),
        x: (Superoperator, Option<Superoperator>, f64),
    ) -> ChannelNoise {
        let plaq = RoundNoise {
            success: z.0,
            fail: z.1,
            p_ghz: z.2,
        };
        let star = RoundNoise {
            success: x.0,
            fail: x.1,
            p_ghz: x.2,
        };
        ChannelNoise {
            rounds: [plaq.clone(), plaq, star.clone(), star],
        }
    }

    /// Perfect-measurement phenomenological proxy: identity superoperators
    /// except for the last round of each cycle, which deposits independent
    /// X and Z flips with probability `p` per data qubit. Depositing after
    /// the cycle's final measurements makes every stabilizer see each
    /// error batch for the first time in the next layer, the textbook
    /// between-rounds error model.
    pub fn phenomenological(p: f64) -> ChannelNoise {
        let mut rounds = ChannelNoise::perfect().rounds;
        rounds[3] = RoundNoise {
            success: Superoperator::iid_depolarizing_proxy(
                crate::superop::StabilizerType::X,
                p,
                4,
            ),
            fail: None,
            p_ghz: 1.0,
        };
        ChannelNoise { rounds }
    }
}

/// Outcome record of one memory-channel run.
#[derive(Debug, Clone)]
pub struct ChannelOutcome {
    pub logical_success: bool,
    /// Anticommutation bits against the four logical operators.
    pub logical_flips: [bool; 4],
}

/// Run `cycles` stabilizer cycles plus a perfect readout round, decode both
/// sectors, and report whether the logical memory survived.
pub fn run_memory_channel(
    lattice: &ToricLattice,
    noise: &ChannelNoise,
    cycles: usize,
    rng: &mut SimRng,
) -> Result<ChannelOutcome, SimError> {
    let l = lattice.l;
    if l % 2 != 0 {
        return Err(SimError::InvalidParameter(
            "the four-round schedule needs an even lattice size".into(),
        ));
    }
    let sites = lattice.num_sites();
    let rounds = four_round_schedule(lattice);
    let mut errors = ErrorPattern::new(lattice);
    // Raw outcomes per site and kind; +1 initially (fresh code state).
    let mut last_plaq = vec![1i8; sites];
    let mut last_star = vec![1i8; sites];
    // Flip layers: [cycle][site] per kind.
    let mut plaq_flips: Vec<Vec<bool>> = Vec::with_capacity(cycles + 1);
    let mut star_flips: Vec<Vec<bool>> = Vec::with_capacity(cycles + 1);

    for _cycle in 0..cycles {
        let mut plaq_layer = vec![false; sites];
        let mut star_layer = vec![false; sites];
        for (round_idx, batch) in rounds.iter().enumerate() {
            let round_noise = &noise.rounds[round_idx];
            let kind = batch.kind;
            for &site in &batch.sites {
                let (outcome, pauli) = measure_stabilizer(
                    lattice,
                    kind,
                    site,
                    &errors,
                    round_noise,
                    match kind {
                        StabKind::Plaquette => last_plaq[site],
                        StabKind::Star => last_star[site],
                    },
                    rng,
                )?;
                if let Some((string, edges)) = pauli {
                    for (pos, letter) in string.0.iter().enumerate() {
                        errors.apply(edges[pos], *letter);
                    }
                }
                match kind {
                    StabKind::Plaquette => {
                        plaq_layer[site] = outcome != last_plaq[site];
                        last_plaq[site] = outcome;
                    }
                    StabKind::Star => {
                        star_layer[site] = outcome != last_star[site];
                        last_star[site] = outcome;
                    }
                }
            }
        }
        plaq_flips.push(plaq_layer);
        star_flips.push(star_layer);
    }

    // Perfect readout round closes the syndrome volume.
    let mut plaq_layer = vec![false; sites];
    let mut star_layer = vec![false; sites];
    for site in 0..sites {
        let p = lattice.eigenvalue(StabKind::Plaquette, site, &errors);
        plaq_layer[site] = p != last_plaq[site];
        let s = lattice.eigenvalue(StabKind::Star, site, &errors);
        star_layer[site] = s != last_star[site];
    }
    plaq_flips.push(plaq_layer);
    star_flips.push(star_layer);

    // Decode each sector and apply the corrections.
    let layers = cycles + 1;
    for (kind, flips) in [
        (StabKind::Plaquette, &plaq_flips),
        (StabKind::Star, &star_flips),
    ] {
        let graph = DecodeGraph::new(lattice, kind, layers);
        let mut defects = vec![false; graph.num_vertices()];
        for (t, layer) in flips.iter().enumerate() {
            for (site, flip) in layer.iter().enumerate() {
                if *flip {
                    defects[graph.vertex(site, t)] = true;
                }
            }
        }
        let correction = decode_union_find(&graph, &defects);
        debug_assert_eq!(edge_set_syndrome(&graph, &correction.edges), defects);
        for q in correction.qubit_flips {
            match kind {
                StabKind::Plaquette => errors.x[q as usize] = !errors.x[q as usize],
                StabKind::Star => errors.z[q as usize] = !errors.z[q as usize],
            }
        }
    }

    // The residual must be syndrome-free; anything left is logical.
    for site in 0..sites {
        if lattice.eigenvalue(StabKind::Plaquette, site, &errors) != 1
            || lattice.eigenvalue(StabKind::Star, site, &errors) != 1
        {
            return Err(SimError::Execution(
                "residual error has a nonempty syndrome after correction".into(),
            ));
        }
    }
    let logical_flips = lattice.logical_check(&errors);
    Ok(ChannelOutcome {
        logical_success: logical_flips.iter().all(|f| !*f),
        logical_flips,
    })
}

type SampledPauli = Option<(PauliString, [usize; 4])>;

#[allow(clippy::too_many_arguments)]
fn measure_stabilizer(
    lattice: &ToricLattice,
    kind: StabKind,
    site: usize,
    errors: &ErrorPattern,
    noise: &RoundNoise,
    last_outcome: i8,
    rng: &mut SimRng,
) -> Result<(i8, SampledPauli), SimError> {
    let edges = lattice.stabilizer_edges(kind, site);
    let completed = noise.p_ghz >= 1.0 || rng.gen::<f64>() < noise.p_ghz;
    if completed {
        let (string, meas_error) = noise.success.sample(rng);
        let true_outcome = lattice.eigenvalue(kind, site, errors);
        let outcome = if meas_error { -true_outcome } else { true_outcome };
        Ok((outcome, Some((string, edges))))
    } else {
        // GHZ generation missed the cycle time: the last measured value is
        // duplicated; decoherence still hits the data qubits.
        let pauli = match &noise.fail {
            Some(fail) => {
                let (string, _flag) = fail.sample(rng);
                Some((string, edges))
            }
            None => None,
        };
        Ok((last_outcome, pauli))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::shot_rng;
    use crate::superop::{StabilizerType, SuperopKind};

    #[test]
    fn perfect_channel_never_fails() {
        let lattice = ToricLattice::new(4);
        let noise = ChannelNoise::perfect();
        let mut rng = shot_rng(1, 0);
        for _ in 0..50 {
            let out = run_memory_channel(&lattice, &noise, 4, &mut rng).unwrap();
            assert!(out.logical_success);
        }
    }

    #[test]
    fn repeated_single_edge_errors_are_corrected() {
        // A success superoperator that always applies X to one fixed edge
        // of each plaquette: two adjacent defects move deterministically
        // and the decoder keeps up, cycle after cycle.
        let mut probs = vec![0.0; 512];
        let one_x = PauliString::parse("XIII").unwrap();
        probs[2 * one_x.index()] = 1.0;
        let fixed =
            Superoperator::new(StabilizerType::Z, SuperopKind::Success, 1.0, 4, probs).unwrap();
        let mut noise = ChannelNoise::perfect();
        noise.rounds[0] = RoundNoise {
            success: fixed,
            fail: None,
            p_ghz: 1.0,
        };
        let lattice = ToricLattice::new(4);
        let mut rng = shot_rng(2, 0);
        let out = run_memory_channel(&lattice, &noise, 1, &mut rng).unwrap();
        assert!(out.logical_success, "single-edge noise must decode");
    }

    #[test]
    fn low_phenomenological_noise_rarely_fails_and_decodes_validly() {
        let lattice = ToricLattice::new(6);
        let noise = ChannelNoise::phenomenological(0.02);
        let mut failures = 0;
        for shot in 0..200 {
            let mut rng = shot_rng(3, shot);
            let out = run_memory_channel(&lattice, &noise, 6, &mut rng).unwrap();
            if !out.logical_success {
                failures += 1;
            }
        }
        assert!(failures < 20, "failures {failures} out of 200 at p=0.02");
    }

    #[test]
    fn determinism_per_seed() {
        let lattice = ToricLattice::new(4);
        let noise = ChannelNoise::phenomenological(0.09);
        let run = |seed| {
            let mut rng = shot_rng(seed, 11);
            (0..20)
                .map(|_| {
                    run_memory_channel(&lattice, &noise, 4, &mut rng)
                        .unwrap()
                        .logical_success
                })
                .collect::<Vec<bool>>()
        };
        assert_eq!(run(5), run(5));
        assert_ne!(run(5), run(6), "different seeds explore different paths");
    }
}
