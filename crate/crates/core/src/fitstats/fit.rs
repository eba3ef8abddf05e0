//! Weighted Gauss-Newton fitting of the scaling model.

use super::linalg::{invert, solve};
use super::model::{model_jacobian_row, model_value, FitParams, N_PARAMS};
use super::student::t_factor;
use super::DataPoint;
use crate::error::FitError;

#[derive(Debug, Clone, Copy)]
pub struct FitOptions {
    pub max_iterations: usize,
    /// Relative step-norm convergence criterion.
    pub tolerance: f64,
    /// Confidence level for the reported intervals.
    pub confidence: f64,
    /// Step halvings allowed when the weighted residual sum increases.
    pub max_halvings: usize,
    pub initial_guess: Option<FitParams>,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            max_iterations: 200,
            tolerance: 1e-10,
            confidence: 0.95,
            max_halvings: 30,
            initial_guess: None,
        }
    }
}

/// Converged fit of the seven-parameter scaling model.
#[derive(Debug, Clone)]
pub struct FitResult {
    pub beta: FitParams,
    /// Row-major 7x7 covariance of the parameters (chi-squared scaled when
    /// the reduced chi-squared exceeds one).
    pub covariance: Vec<f64>,
    pub chi2_nu: f64,
    pub nu: u64,
    /// Half widths of the confidence intervals, per parameter.
    pub ci: [f64; N_PARAMS],
    pub confidence: f64,
    pub iterations: usize,
}

impl FitResult {
    pub fn p_th(&self) -> f64 {
        self.beta.p_th
    }

    pub fn p_th_ci(&self) -> f64 {
        self.ci[4]
    }

    pub fn parameter_sigma(&self, k: usize) -> f64 {
        self.covariance[k * N_PARAMS + k].max(0.0).sqrt()
    }
}

/// Confine a shape exponent to `[0.05, 20]` preserving its sign.
fn clamp_exponent(v: f64) -> f64 {
    let mag = v.abs().clamp(0.05, 20.0);
    if v < 0.0 {
        -mag
    } else {
        mag
    }
}

/// The finite-size amplitude multiplies `L^(-1/zeta) <= 1` against rates
/// in [0, 1]; larger magnitudes only arise on the degenerate valley where
/// `d` and `zeta` trade off, so the box ends that crawl.
fn clamp_amplitude(v: f64) -> f64 {
    v.clamp(-2.0, 2.0)
}

fn weighted_q(data: &[DataPoint], beta: &FitParams) -> f64 {
    data.iter()
        .map(|d| {
            let eps = d.rate() - model_value(beta, d.p, d.l as f64);
            let s = d.sigma();
            (eps / s) * (eps / s)
        })
        .sum()
}

/// Gauss-Newton with step halving on the weighted squared-residual sum.
pub fn fit_threshold(data: &[DataPoint], options: &FitOptions) -> Result<FitResult, FitError> {
    let n_c = data.len();
    if n_c <= N_PARAMS {
        return Err(FitError::TooFewPoints {
            n_c,
            n_p: N_PARAMS,
        });
    }
    for d in data {
        d.validate()?;
    }
    let mut sizes: Vec<usize> = data.iter().map(|d| d.l).collect();
    sizes.sort_unstable();
    sizes.dedup();
    if sizes.len() < 2 {
        return Err(FitError::SingleLatticeSize);
    }
    // Accumulation order must not depend on how the caller ordered the
    // points: sort a local copy canonically.
    let data = {
        let mut d = data.to_vec();
        d.sort_by(|x, y| {
            (x.l, x.p, x.m, x.n)
                .partial_cmp(&(y.l, y.p, y.m, y.n))
                .unwrap()
        });
        d
    };
    let data = &data[..];

    let mut beta = match options.initial_guess {
        Some(g) => g,
        None => initial_guess(data)?,
    };
    let mut q = weighted_q(data, &beta);
    let mut iterations = 0;
    let mut converged = false;
    let mut stagnant = 0;
    let mut window: std::collections::VecDeque<f64> = Default::default();
    // Marquardt parameter: zero recovers the plain Gauss-Newton update
    // and the damped iteration shares its fixed points; the adaptive
    // damping is what keeps the ill-conditioned normal matrix of this
    // ansatz from producing useless steps.
    let mut lambda = 1e-3;
    while iterations < options.max_iterations {
        iterations += 1;
        // Normal equations J^T S^-1 J d = J^T S^-1 eps.
        let mut jtj = vec![0.0; N_PARAMS * N_PARAMS];
        let mut jte = vec![0.0; N_PARAMS];
        for d in data {
            let row = model_jacobian_row(&beta, d.p, d.l as f64);
            let s2 = d.sigma() * d.sigma();
            let eps = d.rate() - model_value(&beta, d.p, d.l as f64);
            for i in 0..N_PARAMS {
                jte[i] += row[i] * eps / s2;
                for j in 0..N_PARAMS {
                    jtj[i * N_PARAMS + j] += row[i] * row[j] / s2;
                }
            }
        }
        let q_before = q;
        let mut accepted = false;
        let mut last_delta = vec![0.0; N_PARAMS];
        for _ in 0..=options.max_halvings {
            let mut damped = jtj.clone();
            for k in 0..N_PARAMS {
                let d = jtj[k * N_PARAMS + k].abs().max(1e-12);
                damped[k * N_PARAMS + k] += lambda * d;
            }
            let delta = solve(damped, jte.clone(), N_PARAMS)?;
            // The shape exponents stay in a sane range: the ansatz
            // degenerates as 1/kappa or 1/zeta approaches zero (the
            // scaling term flattens into the constant) and unbounded
            // exponents open an endless flat valley.
            let mut cand = FitParams::from_slice(
                &beta
                    .to_vec()
                    .iter()
                    .zip(&delta)
                    .map(|(b, d)| b + d)
                    .collect::<Vec<f64>>(),
            );
            cand.kappa = clamp_exponent(cand.kappa);
            cand.zeta = clamp_exponent(cand.zeta);
            cand.d = clamp_amplitude(cand.d);
            let cand_q = weighted_q(data, &cand);
            if cand_q <= q + 1e-14 {
                // Effective (post-clamp) step.
                last_delta = cand
                    .to_vec()
                    .iter()
                    .zip(beta.to_vec())
                    .map(|(n, o)| n - o)
                    .collect();
                beta = cand;
                q = cand_q;
                accepted = true;
                lambda = (lambda / 3.0).max(1e-12);
                break;
            }
            lambda = (lambda * 4.0).min(1e12);
        }
        if !accepted {
            // No downhill step in any damping regime: a numerical
            // stationary point.
            converged = true;
            break;
        }
        // Component-wise relative step criterion.
        let vec = beta.to_vec();
        let small = last_delta
            .iter()
            .zip(&vec)
            .all(|(d, b)| d.abs() <= options.tolerance * b.abs().max(1e-12));
        if small {
            converged = true;
            break;
        }
        // Flat-valley exits: the objective has effectively stopped moving
        // per iteration, or over a trailing window (an unidentifiable
        // direction crawling at machine scale).
        if q_before - q <= 1e-8 * (1.0 + q_before) {
            stagnant += 1;
            if stagnant >= 3 {
                converged = true;
                break;
            }
        } else {
            stagnant = 0;
        }
        window.push_back(q);
        if window.len() > 20 {
            let oldest = window.pop_front().unwrap();
            if oldest - q <= 1e-4 * (1.0 + q) {
                converged = true;
                break;
            }
        }
    }
    if !converged {
        return Err(FitError::NoConvergence(options.max_iterations));
    }

    let nu = (n_c - N_PARAMS) as u64;
    let chi2_nu = q / nu as f64;
    // Covariance (J^T S^-1 J)^-1 at the converged parameters, scaled up
    // when the fit under-describes the data.
    let mut jtj = vec![0.0; N_PARAMS * N_PARAMS];
    for d in data {
        let row = model_jacobian_row(&beta, d.p, d.l as f64);
        let s2 = d.sigma() * d.sigma();
        for i in 0..N_PARAMS {
            for j in 0..N_PARAMS {
                jtj[i * N_PARAMS + j] += row[i] * row[j] / s2;
            }
        }
    }
    let mut covariance = invert(&jtj, N_PARAMS)?;
    if chi2_nu > 1.0 {
        for v in covariance.iter_mut() {
            *v *= chi2_nu;
        }
    }
    let t_ci = t_factor(nu, options.confidence);
    let mut ci = [0.0; N_PARAMS];
    for (k, slot) in ci.iter_mut().enumerate() {
        *slot = t_ci * covariance[k * N_PARAMS + k].max(0.0).sqrt();
    }
    Ok(FitResult {
        beta,
        covariance,
        chi2_nu,
        nu,
        ci,
        confidence: options.confidence,
        iterations,
    })
}

/// Starting point: scan a coarse grid of candidate thresholds with unit
/// shape exponents; at each candidate the model is linear in
/// `(a, b, c, d)`, so those come from one weighted least-squares solve,
/// and the candidate with the smallest weighted residual sum wins.
fn initial_guess(data: &[DataPoint]) -> Result<FitParams, FitError> {
    let p_min = data.iter().map(|d| d.p).fold(f64::INFINITY, f64::min);
    let p_max = data.iter().map(|d| d.p).fold(0.0f64, f64::max);
    let mut best: Option<(f64, FitParams)> = None;
    for step in 0..=40 {
        let p_th = p_min + (p_max - p_min) * step as f64 / 40.0;
        let mut ata = vec![0.0; 16];
        let mut aty = vec![0.0; 4];
        for d in data {
            let l = d.l as f64;
            let x = d.p - p_th;
            let cols = [1.0, x * l, x * x * l * l, 1.0 / l];
            let w = 1.0 / (d.sigma() * d.sigma());
            let y = d.rate();
            for i in 0..4 {
                aty[i] += w * cols[i] * y;
                for j in 0..4 {
                    ata[i * 4 + j] += w * cols[i] * cols[j];
                }
            }
        }
        let Ok(sol) = solve(ata, aty, 4) else {
            continue;
        };
        let cand = FitParams {
            a: sol[0],
            b: sol[1],
            c: sol[2],
            d: sol[3],
            p_th,
            kappa: 1.0,
            zeta: 1.0,
        };
        let q = weighted_q(data, &cand);
        if best.as_ref().map_or(true, |(bq, _)| q < *bq) {
            best = Some((q, cand));
        }
    }
    best.map(|(_, b)| b)
        .ok_or_else(|| FitError::InvalidData("initial guess grid failed".into()))
}
