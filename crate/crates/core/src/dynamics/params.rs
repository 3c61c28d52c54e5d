use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-link Glauber parameters.
///
/// Stored as log-fugacities `r_i = ln λ_i` so that large rates produced by
/// the solvers do not overflow; fugacity `λ_i = e^{r_i}` and transmission
/// strategy `U_i = λ_i / (1 + λ_i)` are derived on demand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkParams {
    r: Vec<f64>,
}

impl LinkParams {
    pub fn from_log_fugacities(r: Vec<f64>) -> Result<Self> {
        if let Some((link, &value)) = r.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidFugacity { link, value: value.exp() });
        }
        Ok(Self { r })
    }

    pub fn from_fugacities(lambda: &[f64]) -> Result<Self> {
        for (link, &value) in lambda.iter().enumerate() {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::InvalidFugacity { link, value });
            }
        }
        Ok(Self { r: lambda.iter().map(|l| l.ln()).collect() })
    }

    /// Builds parameters from transmission strategies `U_i ∈ (0, 1)`.
    pub fn from_strategies(u: &[f64]) -> Result<Self> {
        for (link, &value) in u.iter().enumerate() {
            if !(value > 0.0 && value < 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "transmission strategy of link {link} must lie in (0,1), got {value}"
                )));
            }
        }
        Ok(Self { r: u.iter().map(|&u| (u / (1.0 - u)).ln()).collect() })
    }

    pub fn uniform_fugacity(n: usize, lambda: f64) -> Result<Self> {
        Self::from_fugacities(&vec![lambda; n])
    }

    pub fn uniform_strategy(n: usize, u: f64) -> Result<Self> {
        Self::from_strategies(&vec![u; n])
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    pub fn log_fugacities(&self) -> &[f64] {
        &self.r
    }

    pub fn log_fugacities_mut(&mut self) -> &mut [f64] {
        &mut self.r
    }

    #[inline]
    pub fn log_fugacity(&self, i: usize) -> f64 {
        self.r[i]
    }

    #[inline]
    pub fn fugacity(&self, i: usize) -> f64 {
        self.r[i].exp()
    }

    pub fn fugacities(&self) -> Vec<f64> {
        self.r.iter().map(|r| r.exp()).collect()
    }

    /// `U_i = λ_i / (1 + λ_i)`, evaluated as a logistic in `r_i`.
    #[inline]
    pub fn strategy(&self, i: usize) -> f64 {
        logistic(self.r[i])
    }

    pub fn strategies(&self) -> Vec<f64> {
        self.r.iter().map(|&r| logistic(r)).collect()
    }

    pub(crate) fn check_len(&self, n: usize) -> Result<()> {
        if self.r.len() != n {
            return Err(Error::LengthMismatch { expected: n, got: self.r.len() });
        }
        Ok(())
    }
}

#[inline]
pub(crate) fn logistic(r: f64) -> f64 {
    if r >= 0.0 {
        1.0 / (1.0 + (-r).exp())
    } else {
        let e = r.exp();
        e / (1.0 + e)
    }
}

/// Packet arrival model: i.i.d. Bernoulli(ν_i) per slot, or saturated links
/// that always hold a packet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArrivalConfig {
    pub nu: Vec<f64>,
    pub saturated: bool,
}

impl ArrivalConfig {
    pub fn saturated(n: usize) -> Self {
        Self { nu: vec![1.0; n], saturated: true }
    }

    pub fn bernoulli(nu: Vec<f64>) -> Result<Self> {
        check_rates(&nu)?;
        Ok(Self { nu, saturated: false })
    }

    pub fn uniform(n: usize, nu: f64) -> Result<Self> {
        Self::bernoulli(vec![nu; n])
    }
}

/// Arrival rates must be probabilities.
pub fn check_rates(nu: &[f64]) -> Result<()> {
    for (link, &value) in nu.iter().enumerate() {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::InvalidArrivalRate { link, value });
        }
    }
    Ok(())
}
