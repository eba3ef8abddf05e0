//! Threshold estimation: weighted Gauss-Newton fit of the finite-size
//! scaling model with covariance, reduced chi-squared handling, and
//! Student-t confidence intervals.

pub mod fit;
pub mod linalg;
pub mod model;
pub mod student;

pub use fit::{fit_threshold, FitOptions, FitResult};
pub use model::{model_jacobian_row, model_value, FitParams, N_PARAMS};
pub use student::t_factor;

use crate::error::FitError;

/// One observed logical success rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DataPoint {
    /// Physical error probability.
    pub p: f64,
    /// Lattice size.
    pub l: usize,
    /// Successful iterations.
    pub m: u64,
    /// Total iterations.
    pub n: u64,
}

impl DataPoint {
    pub fn rate(&self) -> f64 {
        self.m as f64 / self.n as f64
    }

    /// Binomial standard deviation of the observed rate, floored at
    /// `1/(2N)` so degenerate rates keep a finite weight.
    pub fn sigma(&self) -> f64 {
        let r = self.rate();
        let raw = (r * (1.0 - r) / self.n as f64).sqrt();
        raw.max(1.0 / (2.0 * self.n as f64))
    }

    pub fn validate(&self) -> Result<(), FitError> {
        if self.n == 0 || self.m > self.n {
            return Err(FitError::InvalidData(format!(
                "need 0 <= M <= N with N > 0, got M={} N={}",
                self.m, self.n
            )));
        }
        if !(self.p.is_finite() && self.p >= 0.0) || self.l < 2 {
            return Err(FitError::InvalidData(format!(
                "bad input combination p={} L={}",
                self.p, self.l
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigma_floor_guards_degenerate_rates() {
        let perfect = DataPoint {
            p: 0.01,
            l: 8,
            m: 1000,
            n: 1000,
        };
        assert_eq!(perfect.sigma(), 1.0 / 2000.0);
        let typical = DataPoint {
            p: 0.1,
            l: 8,
            m: 600,
            n: 1000,
        };
        assert!((typical.sigma() - (0.6f64 * 0.4 / 1000.0).sqrt()).abs() < 1e-15);
    }
}
