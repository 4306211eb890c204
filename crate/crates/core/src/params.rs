use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The L²-critical exponent.
pub const P_BAR: f64 = 10.0 / 3.0;

/// `γ_t = 3(t − 2) / (2t)`
#[inline]
pub fn gamma(t: f64) -> f64 {
    3.0 * (t - 2.0) / (2.0 * t)
}

/// Scalar problem data: mass `a`, coupling `μ`, exponents `p` and `q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemParams {
    pub a: f64,
    pub mu: f64,
    pub p: f64,
    pub q: f64,
}

impl ProblemParams {
    pub fn new(a: f64, mu: f64, p: f64, q: f64) -> Result<Self> {
        let prm = ProblemParams { a, mu, p, q };
        prm.validate()?;
        Ok(prm)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a.is_finite() && self.a > 0.0) {
            return Err(Error::Parameter(format!("mass a must be positive, got {}", self.a)));
        }
        if !self.mu.is_finite() {
            return Err(Error::Parameter("mu must be finite".into()));
        }
        for (name, t) in [("p", self.p), ("q", self.q)] {
            if !(t > 2.0 && t <= 6.0) {
                return Err(Error::Parameter(format!("{name} = {t} outside (2, 6]")));
            }
        }
        if self.p == self.q {
            return Err(Error::Parameter("q must differ from p".into()));
        }
        Ok(())
    }

    pub fn gamma_p(&self) -> f64 {
        gamma(self.p)
    }

    pub fn gamma_q(&self) -> f64 {
        gamma(self.q)
    }

    /// Fiber exponents `(pγ_p, qγ_q)`.
    pub fn fiber_exponents(&self) -> (f64, f64) {
        (self.p * self.gamma_p(), self.q * self.gamma_q())
    }

    pub fn with_mu(self, mu: f64) -> Self {
        ProblemParams { mu, ..self }
    }

    pub fn with_q(self, q: f64) -> Self {
        ProblemParams { q, ..self }
    }

    pub fn with_a(self, a: f64) -> Self {
        ProblemParams { a, ..self }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn critical_exponents() {
        assert!((gamma(P_BAR) - 0.6).abs() < 1e-15);
        assert!((P_BAR * gamma(P_BAR) - 2.0).abs() < 1e-15);
        assert!((8.0 / 3.0 * gamma(8.0 / 3.0) - 1.0).abs() < 1e-15);
        assert_eq!(gamma(2.0), 0.0);
        assert_eq!(gamma(6.0), 1.0);
    }

    #[test]
    fn validation() {
        assert!(ProblemParams::new(1.0, 1.0, 4.0, 2.2).is_ok());
        assert!(ProblemParams::new(1.0, 1.0, 4.0, 4.0).is_err());
        assert!(ProblemParams::new(1.0, 1.0, 6.5, 2.2).is_err());
        assert!(ProblemParams::new(1.0, 1.0, 4.0, 2.0).is_err());
        assert!(ProblemParams::new(-1.0, 1.0, 4.0, 2.2).is_err());
        assert!(ProblemParams::new(1.0, f64::NAN, 4.0, 2.2).is_err());
    }
}
