use serde::{Deserialize, Serialize};

use super::primal::{objective_f, solve_prime, RateDomain, SolveOptions};
use crate::dynamics::{
    capacity_check, check_rates, service_rates, DistributionOverSchedules,
};
use crate::error::{Error, Result};
use crate::graph::ScheduleSpace;

/// Form of the service constraints `E_p[x_i] ? ν_i`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ServiceConstraint {
    /// `E_p[x_i] >= ν_i`; pairs with nonnegative log-fugacities.
    #[default]
    AtLeast,
    /// `E_p[x_i] = ν_i`; pairs with unconstrained log-fugacities.
    Exactly,
}

impl ServiceConstraint {
    pub fn rate_domain(self) -> RateDomain {
        match self {
            Self::AtLeast => RateDomain::NonNegative,
            Self::Exactly => RateDomain::Unconstrained,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MaxEntSolution {
    pub distribution: DistributionOverSchedules,
    /// Per-link multipliers; `p*(X) ∝ exp(Σ_i m_i x_i)`.
    pub multipliers: Vec<f64>,
    pub sweeps: usize,
    /// Largest constraint violation at termination.
    pub residual: f64,
}

const MAXENT_TOL: f64 = 1e-13;
const MAXENT_SWEEPS: usize = 200_000;

/// Minimises `Σ_X p(X) log p(X)` over distributions on the schedule space
/// subject to the service constraints.
///
/// Solved by cyclic I-projections from the uniform distribution: each step
/// tilts `p` along one link's indicator until that link's constraint holds
/// (or, for `AtLeast`, until its multiplier would turn negative).
pub fn solve_dual_maxent(space: &ScheduleSpace, nu: &[f64], constraint: ServiceConstraint) -> Result<MaxEntSolution> {
    let n = space.n();
    if nu.len() != n {
        return Err(Error::LengthMismatch { expected: n, got: nu.len() });
    }
    check_rates(nu)?;
    let cap = capacity_check(space, nu)?;
    if !cap.feasible {
        return Err(Error::OutsideCapacityRegion { slack: cap.slack });
    }
    if constraint == ServiceConstraint::Exactly {
        if let Some((link, &value)) = nu.iter().enumerate().find(|(_, &v)| v <= 0.0) {
            return Err(Error::InvalidArrivalRate { link, value });
        }
    }

    let mut m = vec![0.0; n];
    let mut p = DistributionOverSchedules::gibbs(space, &m);
    let mut sweeps = 0;
    loop {
        let mut largest = 0.0f64;
        for i in 0..n {
            let q = marginal(space, &p, i);
            let theta = if nu[i] == 0.0 {
                f64::NEG_INFINITY
            } else {
                (nu[i] * (1.0 - q) / (q * (1.0 - nu[i]))).ln()
            };
            let c = match constraint {
                ServiceConstraint::AtLeast => theta.max(-m[i]),
                ServiceConstraint::Exactly => theta,
            };
            if c != 0.0 {
                m[i] += c;
                p = DistributionOverSchedules::gibbs(space, &m);
                largest = largest.max(c.abs());
            }
        }
        sweeps += 1;
        if largest < MAXENT_TOL || sweeps >= MAXENT_SWEEPS {
            break;
        }
    }
    let s = service_rates(&p, space)?;
    let residual = s
        .iter()
        .zip(nu)
        .map(|(s, nu)| match constraint {
            ServiceConstraint::AtLeast => (nu - s).max(0.0),
            ServiceConstraint::Exactly => (nu - s).abs(),
        })
        .fold(0.0, f64::max);
    Ok(MaxEntSolution { distribution: p, multipliers: m, sweeps, residual })
}

fn marginal(space: &ScheduleSpace, p: &DistributionOverSchedules, i: usize) -> f64 {
    space.iter().zip(p.probs()).filter(|(x, _)| x.contains(i)).map(|(_, &w)| w).sum()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualityReport {
    /// `max F(r; ν)`.
    pub primal_value: f64,
    /// `min Σ p log p`.
    pub dual_value: f64,
    pub gap: f64,
    /// `E_{p*}[x_i] − ν_i`.
    pub residuals: Vec<f64>,
    /// `max_X |p*(X) − π_{r*}(X)|` with `r*` from the primal solver.
    pub product_form_error: f64,
    /// `max_i |r*_i (s_i(r*) − ν_i)|`.
    pub complementary_slackness: f64,
    pub primal_converged: bool,
    pub primal_solution: Vec<f64>,
    pub dual_multipliers: Vec<f64>,
}

/// Solves the primal and the max-entropy problem independently and
/// compares them.
pub fn verify_duality(space: &ScheduleSpace, nu: &[f64], constraint: ServiceConstraint) -> Result<DualityReport> {
    let dual = solve_dual_maxent(space, nu, constraint)?;
    let mut opts = SolveOptions::default().tol(1e-11).max_iter(200_000);
    opts.domain = constraint.rate_domain();
    let primal = solve_prime(space, nu, &opts)?;
    let r = &primal.solution;
    let primal_value = objective_f(space, r, nu)?;
    let dual_value = dual.distribution.neg_entropy();
    let pi = DistributionOverSchedules::gibbs(space, r);
    let product_form_error = pi
        .probs()
        .iter()
        .zip(dual.distribution.probs())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let s_dual = service_rates(&dual.distribution, space)?;
    let s_primal = service_rates(&pi, space)?;
    let complementary_slackness = r
        .iter()
        .zip(s_primal.iter().zip(nu))
        .map(|(r, (s, nu))| (r * (s - nu)).abs())
        .fold(0.0, f64::max);
    Ok(DualityReport {
        primal_value,
        dual_value,
        gap: (primal_value - dual_value).abs(),
        residuals: s_dual.iter().zip(nu).map(|(s, nu)| s - nu).collect(),
        product_form_error,
        complementary_slackness,
        primal_converged: primal.converged,
        primal_solution: primal.solution,
        dual_multipliers: dual.multipliers,
    })
}
