//! Model parameters and the uniform check report.

use alloc::string::String;

use crate::{Error, Result};

/// Parameters of a run: nonlinearity exponent `p`, data decay `rho`,
/// supersolution growth exponent `alpha`, kernel-lemma exponent `sigma`,
/// data size `eps` and time shift `t0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub p: f64,
    pub rho: f64,
    pub alpha: f64,
    pub sigma: f64,
    pub eps: f64,
    pub t0: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams {
            p: 2.0,
            rho: 1.5,
            alpha: 1.0,
            sigma: 0.6,
            eps: 0.01,
            t0: 50.0,
        }
    }
}

fn invalid(name: &'static str, value: f64, expected: &'static str) -> Error {
    Error::InvalidParam { name, value, expected }
}

impl ModelParams {
    pub fn new(p: f64, rho: f64, alpha: f64, sigma: f64, eps: f64, t0: f64) -> Result<Self> {
        let params = ModelParams {
            p,
            rho,
            alpha,
            sigma,
            eps,
            t0,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p.is_finite() && self.p > 1.0) {
            return Err(invalid("p", self.p, "p > 1"));
        }
        if !(self.rho.is_finite() && self.rho > 1.0) {
            return Err(invalid("rho", self.rho, "rho > 1"));
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(invalid("alpha", self.alpha, "0 < alpha <= 1"));
        }
        if !(self.sigma > 0.5 && self.sigma < 0.75) {
            return Err(invalid("sigma", self.sigma, "1/2 < sigma < 3/4"));
        }
        if !(self.eps.is_finite() && self.eps > 0.0) {
            return Err(invalid("eps", self.eps, "eps > 0"));
        }
        if !(self.t0.is_finite() && self.t0 >= 0.0) {
            return Err(invalid("t0", self.t0, "t0 >= 0"));
        }
        Ok(())
    }

    /// Decay exponent `1/(q rho (p-1)) - 1/(p-1)` of `||u(t)||_q` for
    /// slowly decaying data; `inv_q = 1/q` (zero for the sup norm).
    pub fn decay_exponent(&self, inv_q: f64) -> f64 {
        inv_q / (self.rho * (self.p - 1.0)) - 1.0 / (self.p - 1.0)
    }

    /// Data decay slower than the self-similar profile: `rho < 2/(p-1)`.
    pub fn is_slowly_decaying(&self) -> bool {
        self.rho < 2.0 / (self.p - 1.0)
    }

    /// Outside the subcritical range `1 < p < 3` results are exploratory.
    pub fn is_exploratory(&self) -> bool {
        self.p >= 3.0
    }
}

/// Outcome of one verification.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub name: String,
    pub passed: bool,
    /// The quantity compared against the check's threshold at its worst point.
    pub worst_value: f64,
    /// `(t, x)` of the worst point; `x` (or `t`) is 0 where it does not apply.
    pub worst_location: (f64, f64),
    /// Fitted value of a constant the analysis only asserts to exist.
    pub empirical_constant: Option<f64>,
}

impl CheckReport {
    /// A non-finite `worst_value` marks the check failed and is stored as
    /// `f64::MAX` with its sign.
    pub fn new(
        name: impl Into<String>,
        passed: bool,
        worst_value: f64,
        worst_location: (f64, f64),
        empirical_constant: Option<f64>,
    ) -> Self {
        let (passed, worst_value) = if worst_value.is_finite() {
            (passed, worst_value)
        } else if worst_value.is_nan() {
            (false, f64::MAX)
        } else {
            (false, if worst_value > 0.0 { f64::MAX } else { -f64::MAX })
        };
        CheckReport {
            name: name.into(),
            passed,
            worst_value,
            worst_location,
            empirical_constant,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        ModelParams::default().validate().unwrap();
    }

    #[test]
    fn rejects_out_of_range() {
        let d = ModelParams::default();
        assert!(ModelParams { p: 1.0, ..d }.validate().is_err());
        assert!(ModelParams { rho: 0.9, ..d }.validate().is_err());
        assert!(ModelParams { alpha: 0.0, ..d }.validate().is_err());
        assert!(ModelParams { alpha: 1.5, ..d }.validate().is_err());
        assert!(ModelParams { sigma: 0.75, ..d }.validate().is_err());
        assert!(ModelParams { eps: 0.0, ..d }.validate().is_err());
        assert!(ModelParams { t0: -1.0, ..d }.validate().is_err());
    }

    #[test]
    fn decay_exponents() {
        let d = ModelParams::default();
        assert!((d.decay_exponent(1.0) + 1.0 / 3.0).abs() < 1e-15);
        assert!((d.decay_exponent(0.5) + 2.0 / 3.0).abs() < 1e-15);
        assert!((d.decay_exponent(0.0) + 1.0).abs() < 1e-15);
    }

    #[test]
    fn non_finite_worst_value_fails() {
        let r = CheckReport::new("x", true, f64::INFINITY, (0.0, 0.0), None);
        assert!(!r.passed);
        assert_eq!(r.worst_value, f64::MAX);
    }
}
