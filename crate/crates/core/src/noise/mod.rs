//! Hardware noise models: optical Bell-pair generation, decoherence with
//! coherence-time bookkeeping, two-qubit gate and measurement noise,
//! dynamical-decoupling sequence optimization, and the link-efficiency
//! figure of merit.

mod bell;
mod dd;
mod decohere;
mod gates;

pub use bell::{bell_state, bell_state_ghz_frame, lambda_from_phase_std, phi, BellParams, BellProtocol};
pub use dd::{dd_objective, horizon_for_tail, link_efficiency, optimize_n_dd, optimize_n_dd_with_horizon, DEFAULT_ATTEMPT_HORIZON};
pub use decohere::{decohere, decohere_exponents, kraus_gad, kraus_pd};
pub use gates::{depolarize_2q, flip_measurement};

use crate::error::SimError;

/// Coherence times in seconds. Memory (nuclear-spin) qubits decohere faster
/// while their node is generating entanglement, so they carry separate
/// `link` times next to the `idle` ones; the electron qubit has idle times
/// only.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherenceTimes {
    pub t1_idle_n: f64,
    pub t2_idle_n: f64,
    pub t1_link_n: f64,
    pub t2_link_n: f64,
    pub t1_idle_e: f64,
    pub t2_idle_e: f64,
}

impl CoherenceTimes {
    /// Table values for current hardware: memory qubits survive 300 s / 10 s
    /// idling but only 0.03 s / 0.0075 s during entanglement generation.
    pub fn state_of_the_art() -> Self {
        CoherenceTimes {
            t1_idle_n: 300.0,
            t2_idle_n: 10.0,
            t1_link_n: 0.03,
            t2_link_n: 0.0075,
            t1_idle_e: 300.0,
            t2_idle_e: 1.0,
        }
    }

    /// Near-term set: link-mode coherence times one order of magnitude
    /// above the state of the art.
    pub fn near_term() -> Self {
        CoherenceTimes {
            t1_link_n: 0.3,
            t2_link_n: 0.075,
            ..Self::state_of_the_art()
        }
    }

    /// No decoherence at all (idealized modular scenario).
    pub fn infinite() -> Self {
        CoherenceTimes {
            t1_idle_n: f64::INFINITY,
            t2_idle_n: f64::INFINITY,
            t1_link_n: f64::INFINITY,
            t2_link_n: f64::INFINITY,
            t1_idle_e: f64::INFINITY,
            t2_idle_e: f64::INFINITY,
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let all = [
            self.t1_idle_n,
            self.t2_idle_n,
            self.t1_link_n,
            self.t2_link_n,
            self.t1_idle_e,
            self.t2_idle_e,
        ];
        if all.iter().any(|t| !(*t > 0.0)) {
            return Err(SimError::InvalidParameter(
                "coherence times must be strictly positive".into(),
            ));
        }
        if self.t1_link_n > self.t1_idle_n || self.t2_link_n > self.t2_idle_n {
            return Err(SimError::InvalidParameter(
                "link coherence times must not exceed idle times".into(),
            ));
        }
        Ok(())
    }
}

/// Operation durations in seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperationTimes {
    pub t_link: f64,
    pub t_meas: f64,
    pub t_xy_e: f64,
    pub t_xy_n: f64,
    pub t_zh_e: f64,
    pub t_zh_n: f64,
    pub t_2q: f64,
    pub t_swap: f64,
    pub t_pulse: f64,
}

impl OperationTimes {
    /// A SWAP compiles to three CNOT gates, so `t_swap = 3 * t_2q`.
    pub fn new(
        t_link: f64,
        t_meas: f64,
        t_xy_e: f64,
        t_xy_n: f64,
        t_zh_e: f64,
        t_zh_n: f64,
        t_2q: f64,
        t_pulse: f64,
    ) -> Self {
        OperationTimes {
            t_link,
            t_meas,
            t_xy_e,
            t_xy_n,
            t_zh_e,
            t_zh_n,
            t_2q,
            t_swap: 3.0 * t_2q,
            t_pulse,
        }
    }

    /// Typical nitrogen-vacancy time scales (natural carbon concentration).
    pub fn default_nv() -> Self {
        OperationTimes::new(
            6e-6, 4e-6, 0.14e-6, 1.0e-3, 0.1e-6, 0.5e-3, 0.5e-3, 1.0e-3,
        )
    }

    /// Everything instantaneous; useful for isolating other noise sources.
    pub fn instantaneous() -> Self {
        OperationTimes::new(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let all = [
            self.t_link,
            self.t_meas,
            self.t_xy_e,
            self.t_xy_n,
            self.t_zh_e,
            self.t_zh_n,
            self.t_2q,
            self.t_swap,
            self.t_pulse,
        ];
        if all.iter().any(|t| *t < 0.0 || !t.is_finite()) {
            return Err(SimError::InvalidParameter(
                "operation times must be finite and non-negative".into(),
            ));
        }
        if (self.t_swap - 3.0 * self.t_2q).abs() > 1e-15 {
            return Err(SimError::InvalidParameter(
                "t_swap must equal 3 * t_2q".into(),
            ));
        }
        Ok(())
    }
}

/// Two-qubit gate depolarizing probability and measurement flip probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseParams {
    pub p_g: f64,
    pub p_m: f64,
}

impl NoiseParams {
    pub fn noiseless() -> Self {
        NoiseParams { p_g: 0.0, p_m: 0.0 }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if !(0.0..=1.0).contains(&self.p_g) || !(0.0..=1.0).contains(&self.p_m) {
            return Err(SimError::InvalidParameter(
                "p_g and p_m must lie in [0, 1]".into(),
            ));
        }
        Ok(())
    }
}

/// Derived link figures: per-attempt success probability, Bell fidelity,
/// decoupling sequence length, and the link efficiency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    pub p_link: f64,
    pub f_link: f64,
    pub n_dd: u32,
    pub eta_link_star: f64,
}

impl LinkBudget {
    pub fn new(
        p_link: f64,
        f_link: f64,
        n_dd: u32,
        t_link: f64,
        t1_link_n: f64,
        t2_link_n: f64,
    ) -> Self {
        LinkBudget {
            p_link,
            f_link,
            n_dd,
            eta_link_star: link_efficiency(p_link, t_link, t1_link_n, t2_link_n),
        }
    }
}

/// Full hardware model consumed by the protocol executor.
#[derive(Debug, Clone)]
pub struct HardwareParams {
    pub bell: BellParams,
    pub coherence: CoherenceTimes,
    pub times: OperationTimes,
    pub noise: NoiseParams,
    /// Bell-pair generation attempts per half decoupling sequence.
    pub n_dd: u32,
    /// Force a per-attempt success probability instead of the Bell model's
    /// (idealization knob; `1.0` makes link timing deterministic).
    pub p_link_override: Option<f64>,
    /// Treat SWAP gates as noiseless (idealized modular scenario).
    pub noiseless_swaps: bool,
}

impl HardwareParams {
    /// Fully idealized hardware: perfect Bell pairs on demand, no noise,
    /// no decoherence, instantaneous operations.
    pub fn ideal() -> Self {
        HardwareParams {
            bell: BellParams::perfect(),
            coherence: CoherenceTimes::infinite(),
            times: OperationTimes::instantaneous(),
            noise: NoiseParams::noiseless(),
            n_dd: 1,
            p_link_override: Some(1.0),
            noiseless_swaps: false,
        }
    }

    /// Near-term double-click parameter set.
    pub fn near_term() -> Self {
        HardwareParams {
            bell: BellParams::near_term(),
            coherence: CoherenceTimes::near_term(),
            times: OperationTimes::default_nv(),
            noise: NoiseParams { p_g: 0.01, p_m: 0.01 },
            n_dd: 18,
            p_link_override: None,
            noiseless_swaps: false,
        }
    }

    /// State-of-the-art single-click parameter set.
    pub fn state_of_the_art() -> Self {
        HardwareParams {
            bell: BellParams::state_of_the_art(),
            coherence: CoherenceTimes::state_of_the_art(),
            times: OperationTimes::default_nv(),
            noise: NoiseParams { p_g: 0.01, p_m: 0.01 },
            n_dd: 500,
            p_link_override: None,
            noiseless_swaps: false,
        }
    }

    /// Center-to-center time of consecutive refocusing points.
    pub fn t_dd(&self) -> f64 {
        self.times.t_pulse + 2.0 * self.n_dd as f64 * self.times.t_link
    }

    pub fn p_link(&self) -> f64 {
        self.p_link_override
            .unwrap_or_else(|| self.bell.success_probability())
    }

    pub fn link_budget(&self) -> LinkBudget {
        LinkBudget::new(
            self.p_link(),
            self.bell.f_link(),
            self.n_dd,
            self.times.t_link,
            self.coherence.t1_link_n,
            self.coherence.t2_link_n,
        )
    }

    pub fn validate(&self) -> Result<(), SimError> {
        self.bell.validate()?;
        self.coherence.validate()?;
        self.times.validate()?;
        self.noise.validate()?;
        if self.n_dd == 0 {
            return Err(SimError::InvalidParameter("n_dd must be >= 1".into()));
        }
        if let Some(p) = self.p_link_override {
            if !(p > 0.0 && p <= 1.0) {
                return Err(SimError::InvalidParameter(
                    "p_link override must lie in (0, 1]".into(),
                ));
            }
        }
        Ok(())
    }
}
