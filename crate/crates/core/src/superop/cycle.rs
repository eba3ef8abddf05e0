//! GHZ cycle-time selection.
//!
//! Longer protocols need longer cutoffs to reach the same completion
//! probability, but decoherence punishes generous cutoffs; the heuristic
//! targets a completion probability that shrinks with the protocol's
//! Bell-pair cost and reads the matching duration quantile off a cutoff-free
//! probe run at an estimated threshold error rate.

use rayon::prelude::*;

use crate::error::SimError;
use crate::noise::HardwareParams;
use crate::protocols::{execute_recipe, ProtocolRecipe};
use crate::rng::shot_rng;

/// Target completion probability for a protocol consuming `k` Bell pairs:
/// `(100.2 - k/10)%`, clamped to 0.999 for trivial protocols.
pub fn cycle_time_target(k: u32) -> f64 {
    let p = (100.2 - k as f64 / 10.0) / 100.0;
    p.min(0.999)
}

/// Pick a GHZ cycle time: run the protocol without a cutoff at the
/// estimated threshold error probability and return the smallest duration
/// that at least the target fraction of runs meets.
pub fn ghz_cycle_time(
    recipe: &ProtocolRecipe,
    hw: &HardwareParams,
    p_th_estimate: f64,
    probe_shots: u64,
    seed: u64,
) -> Result<f64, SimError> {
    if probe_shots == 0 {
        return Err(SimError::InvalidParameter("probe_shots must be >= 1".into()));
    }
    let mut probe_hw = hw.clone();
    probe_hw.noise.p_g = p_th_estimate;
    probe_hw.noise.p_m = p_th_estimate;
    probe_hw.validate()?;
    let mut durations: Vec<f64> = (0..probe_shots)
        .into_par_iter()
        .map(|shot| {
            let res = execute_recipe(recipe, &probe_hw, None, shot_rng(seed, shot))
                .expect("probe run failed");
            res.duration
        })
        .collect();
    durations.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let target = cycle_time_target(recipe.k);
    // Smallest duration d with |{runs <= d}| >= ceil(target * shots).
    let need = ((target * probe_shots as f64).ceil() as usize).clamp(1, probe_shots as usize);
    Ok(durations[need - 1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocols::{builtin_recipe, CompileConfig};

    #[test]
    fn published_targets() {
        assert!((cycle_time_target(7) - 0.995).abs() < 1e-12);
        assert!((cycle_time_target(42) - 0.960).abs() < 1e-12);
        assert!((cycle_time_target(2) - 0.999).abs() < 1e-12, "clamped");
    }

    #[test]
    fn deterministic_durations_return_the_deterministic_time() {
        // p_link = 1 and no distillation: every run takes the same time.
        let mut hw = HardwareParams::near_term();
        hw.p_link_override = Some(1.0);
        hw.noise.p_g = 0.0;
        hw.noise.p_m = 0.0;
        let recipe = builtin_recipe("plain", &CompileConfig::default()).unwrap();
        let t = ghz_cycle_time(&recipe, &hw, 0.0, 64, 3).unwrap();
        let one = execute_recipe(&recipe, &hw, None, shot_rng(3, 0)).unwrap();
        // Durations vary only through fusion corrections; the quantile
        // covers at least 99.9% of runs, bounded by the slowest branch.
        assert!(t >= one.duration * 0.5 && t < one.duration * 2.0, "t = {t}");
        let again = ghz_cycle_time(&recipe, &hw, 0.0, 64, 3).unwrap();
        assert_eq!(t, again);
    }

    #[test]
    fn longer_cutoffs_cover_more_runs() {
        let hw = HardwareParams::near_term();
        let recipe = builtin_recipe("plain", &CompileConfig::default()).unwrap();
        let t = ghz_cycle_time(&recipe, &hw, 0.01, 300, 4).unwrap();
        assert!(t > 0.0);
        // Empirically check the covered fraction on fresh seeds.
        let shots = 300u64;
        let covered = (0..shots)
            .filter(|s| {
                let r = execute_recipe(&recipe, &hw, Some(t), shot_rng(77, *s)).unwrap();
                !r.timed_out
            })
            .count();
        let rate = covered as f64 / shots as f64;
        // Target for k=3 is 0.999; allow generous binomial slack.
        assert!(rate > 0.95, "coverage {rate}");
    }
}
