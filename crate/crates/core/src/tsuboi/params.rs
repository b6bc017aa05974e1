use std::fmt;

use super::TsuboiError;
use crate::feasibility::{check_conditions, Residuals};

/// Exponents of the length formula together with the target Hölder exponent.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Params {
    pub tau: f64,
    pub p: f64,
    pub q: f64,
    pub q_prime: f64,
    pub r: f64,
}

impl Params {
    pub fn new(tau: f64, p: f64, q: f64, q_prime: f64, r: f64) -> Result<Self, TsuboiError> {
        if !(tau > 0.0 && tau < 1.0) {
            return Err(TsuboiError::InvalidParams(format!("tau = {tau} outside (0,1)")));
        }
        for (name, v) in [("p", p), ("q", q), ("q'", q_prime), ("r", r)] {
            if !(v > 1.0 && v.is_finite()) {
                return Err(TsuboiError::InvalidParams(format!("{name} = {v} must exceed 1")));
            }
        }
        Ok(Params { tau, p, q, q_prime, r })
    }

    pub fn residuals(&self) -> Residuals {
        check_conditions(self)
    }
}

impl fmt::Display for Params {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "tau={:.17} p={:.17} q={:.17} q'={:.17} r={:.17}", self.tau, self.p, self.q, self.q_prime, self.r)
    }
}
