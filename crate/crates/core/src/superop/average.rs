//! Monte Carlo averaging of Choi states into superoperators, with
//! deterministic parallel reduction and convergence diagnostics.
//!
//! Shots are grouped into fixed blocks; each block is summed sequentially
//! with its own derived seeds and blocks are folded in index order, so the
//! result is bit-identical for any worker count. Snapshots of the running
//! success mean feed the trace-distance convergence curve.

use num_complex::Complex64;
use rayon::prelude::*;

use super::basis::{ChoiBasis, StabilizerType};
use super::choi::choi_one_shot;
use super::types::{SuperopKind, Superoperator};
use crate::densmat::{hermitian_eigenvalues, DensityState};
use crate::error::SimError;
use crate::noise::HardwareParams;
use crate::protocols::ProtocolRecipe;
use crate::rng::shot_rng;

/// Shots per reduction block; fixed so that the grouping (and thus the
/// floating-point result) never depends on the worker count.
pub const BLOCK_SHOTS: u64 = 128;

/// Running sums of Choi matrices, mergeable across shards.
#[derive(Clone)]
pub struct ChoiAccumulator {
    pub success_sum: Vec<Complex64>,
    pub fail_sum: Vec<Complex64>,
    pub success_count: u64,
    pub fail_count: u64,
    dim: usize,
}

impl ChoiAccumulator {
    pub fn new(n: usize) -> ChoiAccumulator {
        let dim = 1usize << (2 * n);
        ChoiAccumulator {
            success_sum: vec![Complex64::default(); dim * dim],
            fail_sum: vec![Complex64::default(); dim * dim],
            success_count: 0,
            fail_count: 0,
            dim,
        }
    }

    pub fn add_shot(&mut self, state: &DensityState, completed: bool) {
        debug_assert_eq!(state.dim(), self.dim);
        let (sum, count) = if completed {
            (&mut self.success_sum, &mut self.success_count)
        } else {
            (&mut self.fail_sum, &mut self.fail_count)
        };
        for (a, b) in sum.iter_mut().zip(state.matrix()) {
            *a += b;
        }
        *count += 1;
    }

    /// Fold another accumulator into this one (associative and, for a
    /// fixed fold order, exactly reproducible).
    pub fn merge(&mut self, other: &ChoiAccumulator) {
        for (a, b) in self.success_sum.iter_mut().zip(&other.success_sum) {
            *a += b;
        }
        for (a, b) in self.fail_sum.iter_mut().zip(&other.fail_sum) {
            *a += b;
        }
        self.success_count += other.success_count;
        self.fail_count += other.fail_count;
    }

    pub fn success_mean(&self) -> Option<Vec<Complex64>> {
        if self.success_count == 0 {
            return None;
        }
        let w = 1.0 / self.success_count as f64;
        Some(self.success_sum.iter().map(|a| a * w).collect())
    }

    pub fn fail_mean(&self) -> Option<Vec<Complex64>> {
        if self.fail_count == 0 {
            return None;
        }
        let w = 1.0 / self.fail_count as f64;
        Some(self.fail_sum.iter().map(|a| a * w).collect())
    }
}

/// Options for the averaging run.
#[derive(Debug, Clone, Copy)]
pub struct AverageOptions {
    pub shots: u64,
    pub seed: u64,
    /// Record convergence snapshots of the running success mean.
    pub track_convergence: bool,
}

/// Averaged characterization of one stabilizer type.
pub struct SuperopAverage {
    pub success: Superoperator,
    /// Absent when every shot completed.
    pub fail: Option<Superoperator>,
    pub p_ghz: f64,
    pub shots: u64,
    /// `(iteration, trace distance to the final success mean)` at the
    /// recorded checkpoints; present when tracking was requested and at
    /// least one checkpoint accumulated.
    pub convergence: Vec<(u64, f64)>,
    /// Mean completed-run duration (success shots).
    pub mean_duration: f64,
}

/// Monte Carlo average of the stabilizer-measurement superoperators.
pub fn average_superoperator(
    recipe: &ProtocolRecipe,
    hw: &HardwareParams,
    t_ghz: f64,
    stabilizer: StabilizerType,
    options: &AverageOptions,
) -> Result<SuperopAverage, SimError> {
    if options.shots == 0 {
        return Err(SimError::InvalidParameter("shots must be >= 1".into()));
    }
    let n = recipe.nodes.len();
    let block_count = options.shots.div_ceil(BLOCK_SHOTS);
    let checkpoints = checkpoint_schedule(options.shots);

    let mut total = ChoiAccumulator::new(n);
    let mut snapshots: Vec<(u64, Vec<Complex64>, u64)> = Vec::new(); // (shots, sum, count)
    let mut duration_sum = 0.0f64;
    let mut next_checkpoint = 0usize;

    // Process blocks in deterministic chunks: each block is summed by one
    // worker, chunks fold sequentially in index order.
    let chunk = rayon::current_num_threads().max(1) as u64 * 2;
    let mut block = 0u64;
    while block < block_count {
        let hi = (block + chunk).min(block_count);
        let results: Vec<(ChoiAccumulator, f64)> = (block..hi)
            .into_par_iter()
            .map(|b| {
                let mut acc = ChoiAccumulator::new(n);
                let mut dur = 0.0;
                let lo = b * BLOCK_SHOTS;
                let hi = ((b + 1) * BLOCK_SHOTS).min(options.shots);
                for shot in lo..hi {
                    let rng = shot_rng(options.seed, shot);
                    let result = choi_one_shot(recipe, hw, t_ghz, stabilizer, rng)
                        .expect("choi shot failed");
                    acc.add_shot(&result.state, result.completed);
                    if result.completed {
                        dur += result.duration;
                    }
                }
                (acc, dur)
            })
            .collect();
        for (acc, dur) in &results {
            total.merge(acc);
            duration_sum += dur;
            if options.track_convergence {
                let done = (total.success_count + total.fail_count).min(options.shots);
                while next_checkpoint < checkpoints.len() && checkpoints[next_checkpoint] <= done
                {
                    snapshots.push((done, total.success_sum.clone(), total.success_count));
                    next_checkpoint += 1;
                }
            }
        }
        block = hi;
    }

    let basis = ChoiBasis::new(stabilizer, n);
    let p_ghz = total.success_count as f64 / options.shots as f64;
    let success_mean = total.success_mean().ok_or_else(|| {
        SimError::Execution(format!(
            "no shot completed within t_GHZ = {t_ghz}; the cycle time is too small"
        ))
    })?;
    let success =
        super::extract_probs_with_basis(&success_mean, &basis, SuperopKind::Success, p_ghz)?;
    let fail = match total.fail_mean() {
        Some(mean) => Some(super::extract_probs_with_basis(
            &mean,
            &basis,
            SuperopKind::Fail,
            p_ghz,
        )?),
        None => None,
    };

    // Convergence curve: trace distance of each snapshot mean to the final
    // mean, computed in parallel after the fact.
    let convergence: Vec<(u64, f64)> = snapshots
        .par_iter()
        .filter(|(_, _, count)| *count > 0)
        .map(|(done, sum, count)| {
            let w = 1.0 / *count as f64;
            let dim = 1usize << (2 * n);
            let diff: Vec<Complex64> = sum
                .iter()
                .zip(&success_mean)
                .map(|(a, b)| a * w - b)
                .collect();
            let ev = hermitian_eigenvalues(&diff, dim);
            (*done, 0.5 * ev.iter().map(|v| v.abs()).sum::<f64>())
        })
        .collect();

    Ok(SuperopAverage {
        success,
        fail,
        p_ghz,
        shots: options.shots,
        convergence,
        mean_duration: if total.success_count > 0 {
            duration_sum / total.success_count as f64
        } else {
            t_ghz
        },
    })
}

/// Checkpoint iterations: every ~100 shots early on (matching the
/// published convergence study), stretching geometrically afterwards so
/// long runs stay tractable; the final iteration is always included.
fn checkpoint_schedule(shots: u64) -> Vec<u64> {
    let mut points = Vec::new();
    let mut at = BLOCK_SHOTS;
    while at <= shots.min(2048) {
        points.push(at);
        at += BLOCK_SHOTS;
    }
    let mut step = BLOCK_SHOTS * 4;
    while at <= shots {
        points.push(at);
        at += step;
        step = (step as f64 * 1.25) as u64 / BLOCK_SHOTS * BLOCK_SHOTS;
        step = step.max(BLOCK_SHOTS);
    }
    if points.last() != Some(&shots) {
        points.push(shots);
    }
    points
}

/// Serialize a convergence curve as a two-column sidecar file.
pub fn convergence_to_text(curve: &[(u64, f64)]) -> String {
    let mut out = String::from("# iteration trace_distance\n");
    for (i, d) in curve {
        out.push_str(&format!("{i} {d:.16e}\n"));
    }
    out
}
