//! Link efficiency and dynamical-decoupling sequence-length optimization.

use crate::error::SimError;

/// Link efficiency: the number of entangled pairs generatable within the
/// coherence times, `2 p_link / (t_link (1/T1 + 1/T2))`.
pub fn link_efficiency(p_link: f64, t_link: f64, t1_link_n: f64, t2_link_n: f64) -> f64 {
    2.0 * p_link / (t_link * (1.0 / t1_link_n + 1.0 / t2_link_n))
}

/// The reference attempt horizon for the sequence-length optimization.
/// It reproduces the tabulated sequence lengths for both the near-term set
/// (18) and the state-of-the-art set (500).
pub const DEFAULT_ATTEMPT_HORIZON: u64 = 5_000;

/// Expected number of decoupling windows of width `2 n'` attempts needed by
/// the slower of two parallel geometric link generations.
///
/// With `q = 1 - p_link` and `r = q^(2n')`, summing the survival function of
/// `ceil(max(i,j) / 2n')` gives the closed form
/// `1 + 2 r/(1-r) - r^2/(1-r^2)`, the exact infinite-attempt limit.
fn expected_windows(p_link: f64, half_window: u64) -> f64 {
    let q = 1.0 - p_link;
    let r = q.powi(2 * half_window as i32);
    if r <= 0.0 {
        return 1.0;
    }
    1.0 + 2.0 * r / (1.0 - r) - r * r / (1.0 - r * r)
}

/// Window count restricted to attempt pairs `(i, j)` with `i, j <= a_max`;
/// the tail mass beyond the horizon is dropped, not renormalized.
fn expected_windows_capped(p_link: f64, half_window: u64, a_max: u64) -> f64 {
    let q = 1.0 - p_link;
    let w = 2 * half_window;
    let mut acc = 0.0;
    let mut cdf_prev = 0.0f64; // P(max <= (b-1) w)
    let mut b = 1u64;
    while (b - 1) * w < a_max {
        let hi = (b * w).min(a_max);
        let cdf = {
            let t = 1.0 - q.powi(hi as i32);
            t * t
        };
        acc += (cdf - cdf_prev) * b as f64;
        cdf_prev = cdf;
        b += 1;
    }
    acc
}

/// Expected completion time of two parallel link generations when attempts
/// quantize to decoupling sequences of `2 n'` attempts plus a pulse.
pub fn dd_objective(p_link: f64, t_link: f64, t_pulse: f64, n_prime: u64, a_max: Option<u64>) -> f64 {
    let window = 2.0 * n_prime as f64 * t_link + t_pulse;
    let windows = match a_max {
        Some(a) => expected_windows_capped(p_link, n_prime, a),
        None => expected_windows(p_link, n_prime),
    };
    windows * window
}

/// Optimize the number of link attempts per half decoupling sequence by
/// minimizing the expected two-link completion time over attempt pairs up
/// to the reference horizon.
pub fn optimize_n_dd(p_link: f64, t_link: f64, t_pulse: f64) -> Result<u32, SimError> {
    optimize_n_dd_with_horizon(p_link, t_link, t_pulse, Some(DEFAULT_ATTEMPT_HORIZON))
}

/// Sequence-length optimization with an explicit attempt horizon;
/// `None` evaluates the exact infinite-attempt objective.
pub fn optimize_n_dd_with_horizon(
    p_link: f64,
    t_link: f64,
    t_pulse: f64,
    a_max: Option<u64>,
) -> Result<u32, SimError> {
    if !(p_link > 0.0 && p_link <= 1.0) {
        return Err(SimError::InvalidParameter(format!(
            "p_link = {p_link} outside (0, 1]"
        )));
    }
    if t_link <= 0.0 || t_pulse < 0.0 {
        return Err(SimError::InvalidParameter(
            "t_link must be positive, t_pulse non-negative".into(),
        ));
    }
    if let Some(a) = a_max {
        if a < 2 {
            return Err(SimError::InvalidParameter(
                "attempt horizon must be at least 2".into(),
            ));
        }
    }
    // Beyond the horizon (or a few expected attempt counts) a wider window
    // only adds idle time, so the search range is bounded.
    let limit = match a_max {
        Some(a) => a,
        None => ((10.0 / p_link).ceil() as u64).clamp(4, 2_000_000),
    };
    let mut best = (f64::INFINITY, 1u64);
    for n in 1..=limit {
        let obj = dd_objective(p_link, t_link, t_pulse, n, a_max);
        if obj < best.0 {
            best = (obj, n);
        }
    }
    Ok(best.1 as u32)
}

/// Attempt horizon that keeps the dropped geometric tail below `tol`.
pub fn horizon_for_tail(p_link: f64, tol: f64) -> Result<u64, SimError> {
    if !(p_link > 0.0 && p_link <= 1.0) || !(tol > 0.0 && tol < 1.0) {
        return Err(SimError::InvalidParameter(
            "need p_link in (0, 1] and tol in (0, 1)".into(),
        ));
    }
    let a = (tol.ln() / (1.0 - p_link).ln()).ceil();
    if !a.is_finite() || a > 1e8 {
        return Err(SimError::InvalidParameter(format!(
            "attempt horizon for tail {tol} at p_link {p_link} does not converge"
        )));
    }
    Ok((a as u64).max(2))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tabulated_link_efficiencies() {
        // State-of-the-art column: 2e-1.
        let sota = link_efficiency(1e-4, 6e-6, 0.03, 0.0075);
        assert!((sota - 0.2).abs() < 1e-12, "{sota}");
        // Near-term column: 2e3.
        let near = link_efficiency(0.1, 6e-6, 0.3, 0.075);
        assert!((near - 2000.0).abs() < 1e-9, "{near}");
        // Scaled-decoherence column: 200 * f_dec.
        for f_dec in [0.5, 1.0, 4.0, 1000.0] {
            let eta = link_efficiency(0.1, 6e-6, 0.03 * f_dec, 0.0075 * f_dec);
            assert!((eta - 200.0 * f_dec).abs() < 1e-9 * f_dec.max(1.0));
        }
    }

    #[test]
    fn efficiency_is_linear_in_coherence_times() {
        let base = link_efficiency(0.3, 1e-5, 0.2, 0.05);
        let doubled = link_efficiency(0.3, 1e-5, 0.4, 0.1);
        assert!((doubled - 2.0 * base).abs() < 1e-9);
    }

    #[test]
    fn near_term_n_dd_is_18() {
        assert_eq!(optimize_n_dd(0.1, 6e-6, 1e-3).unwrap(), 18);
    }

    #[test]
    fn state_of_the_art_n_dd_is_500() {
        assert_eq!(optimize_n_dd(1e-4, 6e-6, 1e-3).unwrap(), 500);
    }

    #[test]
    fn free_pulses_make_one_attempt_windows_optimal() {
        assert_eq!(optimize_n_dd(0.35, 6e-6, 0.0).unwrap(), 1);
    }

    #[test]
    fn returned_optimum_beats_its_neighbors() {
        for p in [0.02, 0.1, 0.53] {
            let n = optimize_n_dd(p, 6e-6, 1e-3).unwrap() as u64;
            let cap = Some(DEFAULT_ATTEMPT_HORIZON);
            let here = dd_objective(p, 6e-6, 1e-3, n, cap);
            assert!(here <= dd_objective(p, 6e-6, 1e-3, n + 1, cap));
            if n > 1 {
                assert!(here <= dd_objective(p, 6e-6, 1e-3, n - 1, cap));
            }
        }
    }

    #[test]
    fn closed_form_matches_truncated_double_sum() {
        // Direct truncation of the two-geometric objective.
        let (p, n) = (0.23, 3u64);
        let q: f64 = 1.0 - p;
        let a_max = 200;
        let mut acc = 0.0;
        for i in 1..=a_max {
            for j in 1..=a_max {
                let pi = p * q.powi(i - 1);
                let pj = p * q.powi(j - 1);
                let windows = ((i.max(j) as f64) / (2.0 * n as f64)).ceil();
                acc += pi * pj * windows;
            }
        }
        assert!((acc - expected_windows(p, n)).abs() < 1e-9);
        assert!((acc - expected_windows_capped(p, n, 200)).abs() < 1e-12);
    }

    #[test]
    fn capped_objective_approaches_closed_form_for_large_horizons() {
        let (p, n) = (0.1, 18u64);
        let exact = expected_windows(p, n);
        let capped = expected_windows_capped(p, n, horizon_for_tail(p, 1e-10).unwrap());
        assert!((exact - capped).abs() < 1e-8);
    }

    #[test]
    fn horizon_for_tail_bounds_the_tail() {
        let a = horizon_for_tail(0.1, 1e-8).unwrap();
        let q: f64 = 0.9;
        assert!(q.powi(a as i32) < 1e-8);
        assert!(q.powi(a as i32 - 1) >= 1e-8 * 0.9);
        assert!(horizon_for_tail(1e-12, 1e-8).is_err());
    }
}
