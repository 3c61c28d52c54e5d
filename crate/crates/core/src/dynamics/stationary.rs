use serde::Serialize;

use super::params::LinkParams;
use crate::error::{Error, Result};
use crate::graph::{InterferenceGraph, Schedule, ScheduleSpace};

/// Probability mass over a [`ScheduleSpace`], in the space's order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistributionOverSchedules {
    probs: Vec<f64>,
}

impl DistributionOverSchedules {
    /// Accepts user-supplied masses that are nonnegative and sum to one
    /// within `1e-9`.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidDistribution("no atoms".into()));
        }
        if let Some(p) = probs.iter().find(|p| !(**p >= 0.0) || !p.is_finite()) {
            return Err(Error::InvalidDistribution(format!("negative or non-finite mass {p}")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidDistribution(format!("masses sum to {total}")));
        }
        Ok(Self { probs })
    }

    /// Normalises nonnegative weights.
    pub(crate) fn from_weights(mut w: Vec<f64>) -> Self {
        let total: f64 = w.iter().sum();
        for x in &mut w {
            *x /= total;
        }
        Self { probs: w }
    }

    /// Gibbs distribution `p(X) ∝ exp(Σ_i x_i r_i)`, normalised with a max shift.
    pub fn gibbs(space: &ScheduleSpace, r: &[f64]) -> Self {
        let logw: Vec<f64> = space.iter().map(|x| linear_form(x, r)).collect();
        let max = logw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        Self::from_weights(logw.iter().map(|l| (l - max).exp()).collect())
    }

    pub fn point_mass(space: &ScheduleSpace, x: Schedule) -> Result<Self> {
        let idx = space.index_of(x).ok_or(Error::InfeasibleSchedule(x.bits()))?;
        let mut probs = vec![0.0; space.len()];
        probs[idx] = 1.0;
        Ok(Self { probs })
    }

    pub fn uniform(space: &ScheduleSpace) -> Self {
        Self { probs: vec![1.0 / space.len() as f64; space.len()] }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// `Σ_X p(X) log p(X)` with `0 log 0 = 0`.
    pub fn neg_entropy(&self) -> f64 {
        self.probs.iter().filter(|&&p| p > 0.0).map(|p| p * p.ln()).sum()
    }

    pub(crate) fn check_support(&self, space: &ScheduleSpace) -> Result<()> {
        if self.probs.len() != space.len() {
            return Err(Error::SupportMismatch(self.probs.len(), space.len()));
        }
        Ok(())
    }
}

/// `Σ_{i ∈ X} r_i`.
#[inline]
pub(crate) fn linear_form(x: Schedule, r: &[f64]) -> f64 {
    let mut bits = x.bits();
    let mut acc = 0.0;
    while bits != 0 {
        acc += r[bits.trailing_zeros() as usize];
        bits &= bits - 1;
    }
    acc
}

/// `log Σ_{X ∈ Ω} exp(Σ_i x_i r_i)` with a max shift.
pub fn log_partition(space: &ScheduleSpace, r: &[f64]) -> f64 {
    let logw: Vec<f64> = space.iter().map(|x| linear_form(x, r)).collect();
    log_sum_exp(&logw)
}

pub(crate) fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + values.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// Product-form stationary distribution `π(X) ∝ Π_{i ∈ X} λ_i` of the
/// single-site chain.
pub fn stationary_distribution(
    space: &ScheduleSpace,
    params: &LinkParams,
) -> Result<DistributionOverSchedules> {
    params.check_len(space.n())?;
    Ok(DistributionOverSchedules::gibbs(space, params.log_fugacities()))
}

/// Mean service rates `s_i = Σ_{X: x_i = 1} p(X)`.
pub fn service_rates(dist: &DistributionOverSchedules, space: &ScheduleSpace) -> Result<Vec<f64>> {
    dist.check_support(space)?;
    let mut s = vec![0.0; space.n()];
    for (x, &p) in space.iter().zip(dist.probs()) {
        for i in x.links() {
            s[i] += p;
        }
    }
    Ok(s)
}

/// One-step kernel `P(x → y)` of the chain: a uniformly chosen link is
/// switched on with probability `U_i` when its neighbors are silent and
/// switched off otherwise.
pub fn transition_probability(
    g: &InterferenceGraph,
    params: &LinkParams,
    x: Schedule,
    y: Schedule,
) -> f64 {
    let n = g.n() as f64;
    let diff = x.bits() ^ y.bits();
    match diff.count_ones() {
        0 => {
            let leave: f64 = (0..g.n())
                .map(|i| transition_probability(g, params, x, x.flipped(i)))
                .sum();
            1.0 - leave
        }
        1 => {
            let i = diff.trailing_zeros() as usize;
            let silent = x.bits() & g.neighbors_mask(i) == 0;
            let u = params.strategy(i);
            match (x.contains(i), silent) {
                (false, true) => u / n,
                (true, true) => (1.0 - u) / n,
                // A busy neighbor blocks activation; a transmitting link always
                // has silent neighbors in a feasible schedule.
                (false, false) => 0.0,
                (true, false) => 1.0 / n,
            }
        }
        _ => 0.0,
    }
}
