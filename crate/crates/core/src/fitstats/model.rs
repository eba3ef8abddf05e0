//! The finite-size scaling regression model
//! `r = a + b (p - p_th) L^(1/kappa) + c (p - p_th)^2 L^(2/kappa)
//!      + d L^(-1/zeta)`
//! and its analytic Jacobian.

pub const N_PARAMS: usize = 7;

/// Parameter vector `(a, b, c, d, p_th, kappa, zeta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub p_th: f64,
    pub kappa: f64,
    pub zeta: f64,
}

impl FitParams {
    pub fn from_slice(v: &[f64]) -> FitParams {
        FitParams {
            a: v[0],
            b: v[1],
            c: v[2],
            d: v[3],
            p_th: v[4],
            kappa: v[5],
            zeta: v[6],
        }
    }

    pub fn to_vec(self) -> Vec<f64> {
        vec![self.a, self.b, self.c, self.d, self.p_th, self.kappa, self.zeta]
    }
}

/// Model prediction at one input combination.
pub fn model_value(beta: &FitParams, p: f64, l: f64) -> f64 {
    let x = p - beta.p_th;
    let lk = l.powf(1.0 / beta.kappa);
    beta.a + beta.b * x * lk + beta.c * x * x * lk * lk + beta.d * l.powf(-1.0 / beta.zeta)
}

/// Partial derivatives with respect to `(a, b, c, d, p_th, kappa, zeta)`.
pub fn model_jacobian_row(beta: &FitParams, p: f64, l: f64) -> [f64; N_PARAMS] {
    let x = p - beta.p_th;
    let ln_l = l.ln();
    let lk = l.powf(1.0 / beta.kappa);
    let lk2 = lk * lk;
    let lz = l.powf(-1.0 / beta.zeta);
    [
        1.0,
        x * lk,
        x * x * lk2,
        lz,
        -beta.b * lk - 2.0 * beta.c * x * lk2,
        (beta.b * x * lk + 2.0 * beta.c * x * x * lk2) * ln_l * (-1.0 / (beta.kappa * beta.kappa)),
        beta.d * lz * ln_l / (beta.zeta * beta.zeta),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jacobian_matches_central_finite_differences() {
        let mut rng = crate::rng::shot_rng(17, 0);
        use rand::Rng;
        for _ in 0..20 {
            let beta = FitParams {
                a: 0.4 + rng.gen::<f64>(),
                b: -40.0 * rng.gen::<f64>() - 1.0,
                c: -200.0 * rng.gen::<f64>() - 1.0,
                d: rng.gen::<f64>() - 0.5,
                p_th: 0.002 + 0.01 * rng.gen::<f64>(),
                kappa: 0.5 + rng.gen::<f64>(),
                zeta: 0.5 + rng.gen::<f64>(),
            };
            let p = beta.p_th * (0.8 + 0.4 * rng.gen::<f64>());
            let l = [4.0, 6.0, 8.0, 12.0][rng.gen_range(0..4)];
            let analytic = model_jacobian_row(&beta, p, l);
            let vec = beta.to_vec();
            // The model is linear in (a, b, c, d) and quadratic in p_th,
            // where central differences are exact, so generous steps avoid
            // roundoff; the genuinely nonlinear exponents get small steps.
            let steps = [1.0, 1.0, 1.0, 1.0, 1e-5, 1e-4, 1e-4];
            for k in 0..N_PARAMS {
                let h = steps[k];
                let mut up = vec.clone();
                up[k] += h;
                let mut dn = vec.clone();
                dn[k] -= h;
                let numeric = (model_value(&FitParams::from_slice(&up), p, l)
                    - model_value(&FitParams::from_slice(&dn), p, l))
                    / (2.0 * h);
                let scale = analytic[k].abs().max(numeric.abs()).max(1e-9);
                assert!(
                    ((analytic[k] - numeric) / scale).abs() < 1e-6,
                    "param {k}: analytic {} vs numeric {numeric}",
                    analytic[k]
                );
            }
        }
    }
}
