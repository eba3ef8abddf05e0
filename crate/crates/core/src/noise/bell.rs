//! Analytic Bell-pair models for the single-click and double-click optical
//! entanglement protocols.
//!
//! Both protocols produce a mixture over the odd-parity Bell states
//! `|Psi+-> = (|01> +- |10>)/sqrt(2)`; the single-click state carries an
//! extra `|00><00|` component from unheralded no-photon events. All
//! dephasing contributions enter through a single parameter `phi`.

use num_complex::Complex64;

use crate::densmat::{DensityState, QubitLabel};
use crate::error::SimError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BellProtocol {
    SingleClick,
    DoubleClick,
}

/// Parameters of the optical Bell-pair generation model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BellParams {
    pub protocol: BellProtocol,
    /// Preparation fidelity of the initial spin-photon state.
    pub f_prep: f64,
    /// Probability of an excitation error per heralded event.
    pub p_ee: f64,
    /// Photon indistinguishability per Bell-state measurement.
    pub mu: f64,
    /// Dephasing fidelity from the phase uncertainty of the optical path
    /// difference; fixed to 1 for the double-click protocol.
    pub lambda: f64,
    /// Total photon detection probability per excitation.
    pub eta_ph: f64,
    /// Bright-state population; single-click only.
    pub alpha: Option<f64>,
}

impl BellParams {
    pub fn perfect() -> Self {
        BellParams {
            protocol: BellProtocol::DoubleClick,
            f_prep: 1.0,
            p_ee: 0.0,
            mu: 1.0,
            lambda: 1.0,
            eta_ph: 1.0,
            alpha: None,
        }
    }

    /// Near-term double-click set.
    pub fn near_term() -> Self {
        BellParams {
            protocol: BellProtocol::DoubleClick,
            f_prep: 0.999,
            p_ee: 0.01,
            mu: 0.95,
            lambda: 1.0,
            eta_ph: 0.4472,
            alpha: None,
        }
    }

    /// State-of-the-art single-click set. The bright-state population is
    /// not published directly; it is recovered by inverting the success
    /// probability to the tabulated `p_link = 1e-4`.
    pub fn state_of_the_art() -> Self {
        let mut p = BellParams {
            protocol: BellProtocol::SingleClick,
            f_prep: 0.99,
            p_ee: 0.04,
            mu: 0.9,
            lambda: 0.984,
            eta_ph: 0.0046,
            alpha: None,
        };
        p.alpha = Some(p.alpha_for_success_probability(1e-4));
        p
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let in_unit = |v: f64| (0.0..=1.0).contains(&v);
        if ![self.f_prep, self.p_ee, self.mu, self.lambda, self.eta_ph]
            .iter()
            .all(|v| in_unit(*v))
        {
            return Err(SimError::InvalidParameter(
                "Bell model parameters must lie in [0, 1]".into(),
            ));
        }
        match self.protocol {
            BellProtocol::SingleClick => match self.alpha {
                Some(a) if in_unit(a) => Ok(()),
                Some(_) => Err(SimError::InvalidParameter(
                    "alpha must lie in [0, 1]".into(),
                )),
                None => Err(SimError::InvalidParameter(
                    "single-click model requires alpha".into(),
                )),
            },
            BellProtocol::DoubleClick => {
                if self.alpha.is_some() {
                    Err(SimError::InvalidParameter(
                        "alpha is meaningful only for single-click".into(),
                    ))
                } else {
                    Ok(())
                }
            }
        }
    }

    pub fn phi(&self) -> f64 {
        phi(self)
    }

    /// Per-attempt success probability of the protocol.
    pub fn success_probability(&self) -> f64 {
        match self.protocol {
            BellProtocol::DoubleClick => self.eta_ph * self.eta_ph / 2.0,
            BellProtocol::SingleClick => {
                let a = self.alpha.expect("validated single-click has alpha");
                single_click_success(self.eta_ph, self.mu, a)
            }
        }
    }

    /// Fidelity of the generated pair with respect to `|Psi+>`.
    pub fn f_link(&self) -> f64 {
        let phi = self.phi();
        match self.protocol {
            BellProtocol::DoubleClick => 0.5 * (1.0 + phi * phi),
            BellProtocol::SingleClick => {
                let a = self.alpha.expect("validated single-click has alpha");
                let p = single_click_success(self.eta_ph, self.mu, a);
                (1.0 + phi) * self.eta_ph * a * (1.0 - a) / p
            }
        }
    }

    /// Invert the single-click success probability for the bright-state
    /// population (smaller root, the physically used branch).
    pub fn alpha_for_success_probability(&self, p_link: f64) -> f64 {
        // p(alpha) = 2 eta alpha + eta^2 alpha^2 (mu - 3)/2 is increasing on
        // the relevant branch; bisect on [0, 1].
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if single_click_success(self.eta_ph, self.mu, mid) < p_link {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

fn single_click_success(eta: f64, mu: f64, alpha: f64) -> f64 {
    2.0 * eta * alpha + eta * eta * alpha * alpha * (mu - 3.0) / 2.0
}

/// The combined dephasing parameter of the Bell model:
/// `sqrt(mu) (2 F_prep - 1)^2 (2 lambda - 1) (1 - p_EE)^2`.
pub fn phi(params: &BellParams) -> f64 {
    params.mu.sqrt()
        * (2.0 * params.f_prep - 1.0).powi(2)
        * (2.0 * params.lambda - 1.0)
        * (1.0 - params.p_ee).powi(2)
}

/// Dephasing fidelity from the standard deviation (radians) of the optical
/// phase instability: `(1 + I1(s^-2)/I0(s^-2)) / 2` with modified Bessel
/// functions `I0`, `I1`.
pub fn lambda_from_phase_std(sigma_phi: f64) -> f64 {
    assert!(sigma_phi > 0.0, "phase standard deviation must be positive");
    let x = 1.0 / (sigma_phi * sigma_phi);
    0.5 * (1.0 + bessel_i1_over_i0(x))
}

/// `I1(x) / I0(x)` for `x >= 0`.
fn bessel_i1_over_i0(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x < 200.0 {
        // Power series of both functions; the shared exponential growth is
        // irrelevant for the ratio and f64 holds I0 up to x ~ 700.
        let q = 0.25 * x * x;
        let (mut i0, mut t0) = (1.0f64, 1.0f64);
        let (mut i1, mut t1) = (1.0f64, 1.0f64);
        for k in 1..3000 {
            let kf = k as f64;
            t0 *= q / (kf * kf);
            t1 *= q / (kf * (kf + 1.0));
            i0 += t0;
            i1 += t1;
            if t0 < 1e-17 * i0 && t1 < 1e-17 * i1 {
                break;
            }
        }
        (0.5 * x) * i1 / i0
    } else {
        // Large-argument asymptotics; the common prefactor cancels.
        let a = 1.0 / (8.0 * x);
        let p0 = 1.0 + a * (1.0 + a * (4.5 + a * 37.5));
        let p1 = 1.0 - a * (3.0 + a * (7.5 + a * 52.5));
        p1 / p0
    }
}

/// The generated pair in the GHZ frame: the deterministic local bit flip
/// that maps `|Psi+>` onto `|Phi+> = GHZ_2` is absorbed into the link, so
/// protocol circuits can treat every link as a noisy `(|00> + |11>)/sqrt(2)`.
pub fn bell_state_ghz_frame(
    params: &BellParams,
    labels: [QubitLabel; 2],
) -> Result<(DensityState, f64), SimError> {
    let (mut state, p) = bell_state(params, labels)?;
    state.apply_gate(crate::densmat::Gate::X, &[labels[0]])?;
    Ok((state, p))
}

/// Density matrix and per-attempt success probability of the generated
/// Bell pair over the two given labels (first label = first node).
pub fn bell_state(
    params: &BellParams,
    labels: [QubitLabel; 2],
) -> Result<(DensityState, f64), SimError> {
    params.validate()?;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let c = |re: f64| Complex64::new(re, 0.0);
    let psi_plus = vec![c(0.0), c(h), c(h), c(0.0)];
    let psi_minus = vec![c(0.0), c(h), c(-h), c(0.0)];
    let zero_zero = vec![c(1.0), c(0.0), c(0.0), c(0.0)];
    let phi = params.phi();
    match params.protocol {
        BellProtocol::DoubleClick => {
            let f = 0.5 * (1.0 + phi * phi);
            let state = DensityState::mixture(
                labels.to_vec(),
                &[(f, psi_plus), (1.0 - f, psi_minus)],
            );
            Ok((state, params.success_probability()))
        }
        BellProtocol::SingleClick => {
            let a = params.alpha.expect("validated");
            let p = single_click_success(params.eta_ph, params.mu, a);
            if p <= 0.0 {
                return Err(SimError::InvalidParameter(
                    "single-click success probability is not positive".into(),
                ));
            }
            let base = params.eta_ph * a * (1.0 - a) / p;
            let f_plus = (1.0 + phi) * base;
            let f_minus = (1.0 - phi) * base;
            let residual = 1.0 - f_plus - f_minus;
            if residual < -1e-12 {
                return Err(SimError::InvalidParameter(format!(
                    "unnormalizable single-click coefficients: F+ + F- = {}",
                    f_plus + f_minus
                )));
            }
            let state = DensityState::mixture(
                labels.to_vec(),
                &[
                    (f_plus, psi_plus),
                    (f_minus, psi_minus),
                    (residual.max(0.0), zero_zero),
                ],
            );
            Ok((state, p))
        }
    }
}
