use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{distributed_update, IterateRecord, LearningRateSchedule, SolveReport};
use crate::dynamics::{
    capacity_check, check_rates, log_partition, service_rates, simulate, ArrivalConfig, DistributionOverSchedules,
    LinkParams, RatePolicy, SimConfig, WindowStats,
};
use crate::error::{Error, Result};
use crate::graph::ScheduleSpace;

/// `F(r; ν) = Σ_i ν_i r_i − log Σ_X exp(Σ_i x_i r_i)`.
pub fn objective_f(space: &ScheduleSpace, r: &[f64], nu: &[f64]) -> Result<f64> {
    check_lengths(space, r, nu)?;
    let linear: f64 = nu.iter().zip(r).map(|(a, b)| a * b).sum();
    Ok(linear - log_partition(space, r))
}

/// `∂F/∂r_i = ν_i − s_i(r)`.
pub fn grad_f(space: &ScheduleSpace, r: &[f64], nu: &[f64]) -> Result<Vec<f64>> {
    check_lengths(space, r, nu)?;
    let s = service_rates(&DistributionOverSchedules::gibbs(space, r), space)?;
    Ok(nu.iter().zip(&s).map(|(a, b)| a - b).collect())
}

fn check_lengths(space: &ScheduleSpace, r: &[f64], nu: &[f64]) -> Result<()> {
    let n = space.n();
    for len in [r.len(), nu.len()] {
        if len != n {
            return Err(Error::LengthMismatch { expected: n, got: len });
        }
    }
    Ok(())
}

/// Feasible set for the log-fugacities.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateDomain {
    /// `r >= 0`, with projection after every step.
    #[default]
    NonNegative,
    /// Any real `r`; the optimum then satisfies `s(r) = ν` exactly.
    Unconstrained,
}

impl RateDomain {
    fn project(self, r: f64) -> f64 {
        match self {
            Self::NonNegative => r.max(0.0),
            Self::Unconstrained => r,
        }
    }

    /// Stationarity measure: the move of a unit projected gradient step.
    fn projected_grad_norm(self, r: &[f64], g: &[f64]) -> f64 {
        r.iter()
            .zip(g)
            .map(|(&r, &g)| match self {
                Self::NonNegative => g.max(-r).abs(),
                Self::Unconstrained => g.abs(),
            })
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum SolveMode {
    /// Projected Newton ascent on the exact `F`, with backtracked gradient steps as fallback.
    Exact,
    /// The distributed algorithm: Bernoulli arrivals, window averages and
    /// the learning-rate schedule.
    Simulated { horizon: u64, window_length: u64, seed: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    pub schedule: LearningRateSchedule,
    pub mode: SolveMode,
    pub domain: RateDomain,
    pub tol: f64,
    pub max_iter: usize,
    pub initial: Option<Vec<f64>>,
    /// Record every k-th iterate in the trajectory.
    pub record_every: Option<usize>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            schedule: LearningRateSchedule::default(),
            mode: SolveMode::Exact,
            domain: RateDomain::NonNegative,
            tol: 1e-9,
            max_iter: 100_000,
            initial: None,
            record_every: None,
        }
    }
}

impl SolveOptions {
    pub fn unconstrained(mut self) -> Self {
        self.domain = RateDomain::Unconstrained;
        self
    }

    pub fn tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn record_every(mut self, k: usize) -> Self {
        self.record_every = Some(k.max(1));
        self
    }
}

/// Window-boundary update `r ← [r + α(t)(ν' − s')]₊` with `t` counting
/// windows from 1.
#[derive(Debug, Clone)]
pub struct GradientPolicy {
    pub schedule: LearningRateSchedule,
    pub domain: RateDomain,
    pub t: u64,
    record_every: Option<usize>,
    pub history: Vec<(u64, Vec<f64>)>,
}

impl GradientPolicy {
    pub fn new(schedule: LearningRateSchedule) -> Self {
        Self { schedule, domain: RateDomain::NonNegative, t: 0, record_every: None, history: Vec::new() }
    }

    pub fn with_domain(mut self, domain: RateDomain) -> Self {
        self.domain = domain;
        self
    }

    pub fn recording(mut self, every: usize) -> Self {
        self.record_every = Some(every.max(1));
        self
    }
}

impl RatePolicy for GradientPolicy {
    fn update(&mut self, window: &WindowStats, r: &mut [f64]) {
        self.t += 1;
        let alpha = self.schedule.alpha(self.t);
        match self.domain {
            RateDomain::NonNegative => {
                let next = distributed_update(r, &window.nu_hat, &window.s_hat, alpha);
                r.copy_from_slice(&next);
            }
            RateDomain::Unconstrained => {
                for (ri, (nu, s)) in r.iter_mut().zip(window.nu_hat.iter().zip(&window.s_hat)) {
                    *ri += alpha * (nu - s);
                }
            }
        }
        if self.record_every.is_some_and(|k| self.t.is_multiple_of(k as u64)) {
            self.history.push((self.t, r.to_vec()));
        }
    }
}

/// Maximises `F(·; ν)` over the chosen rate domain.
///
/// Rates outside the capacity region are accepted; the report then carries
/// `feasible = Some(false)` and normally `converged = false`, since `F` has
/// no finite maximiser.
pub fn solve_prime(space: &ScheduleSpace, nu: &[f64], options: &SolveOptions) -> Result<SolveReport> {
    let n = space.n();
    if nu.len() != n {
        return Err(Error::LengthMismatch { expected: n, got: nu.len() });
    }
    check_rates(nu)?;
    if !(options.tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {}", options.tol)));
    }
    let r0 = match &options.initial {
        Some(r) if r.len() != n => return Err(Error::LengthMismatch { expected: n, got: r.len() }),
        Some(r) => r.iter().map(|&v| options.domain.project(v)).collect(),
        None => vec![0.0; n],
    };
    let feasible = capacity_check(space, nu)?.feasible;
    let mut report = match &options.mode {
        SolveMode::Exact => exact_ascent(space, nu, r0, options)?,
        SolveMode::Simulated { horizon, window_length, seed } => {
            simulated_ascent(space, nu, r0, options, *horizon, *window_length, *seed)?
        }
    };
    report.feasible = Some(feasible);
    if !feasible {
        report.notes.push("target rates lie outside the capacity region".into());
    }
    Ok(report)
}

fn exact_ascent(space: &ScheduleSpace, nu: &[f64], mut r: Vec<f64>, opt: &SolveOptions) -> Result<SolveReport> {
    let domain = opt.domain;
    let mut f = objective_f(space, &r, nu)?;
    let mut g = grad_f(space, &r, nu)?;
    let mut pg = domain.projected_grad_norm(&r, &g);
    let mut step = 1.0f64;
    let mut trajectory = Vec::new();
    let mut iter = 0;
    let mut notes = Vec::new();
    let record = |iter: usize, f: f64, pg: f64, r: &[f64], t: &mut Vec<IterateRecord>| {
        if opt.record_every.is_some_and(|k| iter.is_multiple_of(k)) {
            t.push(IterateRecord { iter, objective: f, grad_norm: pg, values: r.to_vec() });
        }
    };
    record(0, f, pg, &r, &mut trajectory);
    while pg >= opt.tol && iter < opt.max_iter {
        let accepted = match newton_step(space, &r, &g, f, nu, domain)? {
            Some(found) => Some(found),
            None => gradient_step(space, &r, &g, f, nu, domain, &mut step)?,
        };
        let Some((cand, fc)) = accepted else {
            notes.push("line search stalled".into());
            break;
        };
        r = cand;
        f = fc;
        g = grad_f(space, &r, nu)?;
        pg = domain.projected_grad_norm(&r, &g);
        iter += 1;
        record(iter, f, pg, &r, &mut trajectory);
        if !r.iter().all(|v| v.is_finite()) {
            notes.push("iterate diverged".into());
            break;
        }
    }
    if opt.record_every.is_some() && trajectory.last().map(|t| t.iter) != Some(iter) {
        trajectory.push(IterateRecord { iter, objective: f, grad_norm: pg, values: r.clone() });
    }
    let converged = pg < opt.tol;
    if !converged && iter >= opt.max_iter {
        notes.push(format!("stopped after {iter} iterations with projected gradient {pg:e}"));
    }
    Ok(SolveReport {
        iterations: iter,
        objective: f,
        grad_norm: pg,
        converged,
        feasible: None,
        solution: r,
        trajectory,
        notes,
    })
}

type Candidate = Option<(Vec<f64>, f64)>;

/// Backtracks from `r + t d` (projected) until the Armijo condition holds.
#[allow(clippy::too_many_arguments)]
fn backtrack(
    space: &ScheduleSpace,
    r: &[f64],
    g: &[f64],
    d: &[f64],
    f: f64,
    nu: &[f64],
    domain: RateDomain,
    t: &mut f64,
) -> Result<Candidate> {
    while *t > 1e-16 {
        let cand: Vec<f64> = r.iter().zip(d).map(|(&ri, &di)| domain.project(ri + *t * di)).collect();
        let gain: f64 = cand.iter().zip(r).zip(g).map(|((c, ri), gi)| gi * (c - ri)).sum();
        let fc = objective_f(space, &cand, nu)?;
        if gain > 0.0 && fc >= f + 1e-4 * gain {
            return Ok(Some((cand, fc)));
        }
        *t *= 0.5;
    }
    Ok(None)
}

/// Projected gradient step; `step` carries the accepted length between calls.
fn gradient_step(
    space: &ScheduleSpace,
    r: &[f64],
    g: &[f64],
    f: f64,
    nu: &[f64],
    domain: RateDomain,
    step: &mut f64,
) -> Result<Candidate> {
    let found = backtrack(space, r, g, g, f, nu, domain, step)?;
    *step = (*step * 2.0).min(1e6);
    Ok(found)
}

/// Newton step on the links not held at the bound. The Hessian of `F` is
/// minus the covariance of the link indicators under the product form.
fn newton_step(
    space: &ScheduleSpace,
    r: &[f64],
    g: &[f64],
    f: f64,
    nu: &[f64],
    domain: RateDomain,
) -> Result<Candidate> {
    let free: Vec<usize> = (0..r.len())
        .filter(|&i| domain == RateDomain::Unconstrained || r[i] > 0.0 || g[i] > 0.0)
        .collect();
    if free.is_empty() {
        return Ok(None);
    }
    let m = free.len();
    let p = DistributionOverSchedules::gibbs(space, r);
    let mut second = DMatrix::<f64>::zeros(m, m);
    let mut first = vec![0.0; m];
    for (x, &w) in space.iter().zip(p.probs()) {
        let on: Vec<usize> = (0..m).filter(|&a| x.contains(free[a])).collect();
        for &a in &on {
            first[a] += w;
            for &b in &on {
                second[(a, b)] += w;
            }
        }
    }
    let cov = DMatrix::from_fn(m, m, |a, b| second[(a, b)] - first[a] * first[b]);
    let Some(chol) = cov.cholesky() else {
        return Ok(None);
    };
    let rhs = DVector::from_iterator(m, free.iter().map(|&i| g[i]));
    let sol = chol.solve(&rhs);
    if !sol.iter().all(|v| v.is_finite()) {
        return Ok(None);
    }
    let mut d = vec![0.0; r.len()];
    for (a, &i) in free.iter().enumerate() {
        d[i] = sol[a];
    }
    let full: Vec<f64> = r.iter().zip(&d).map(|(&ri, &di)| domain.project(ri + di)).collect();
    let gain: f64 = full.iter().zip(r).zip(g).map(|((c, ri), gi)| gi * (c - ri)).sum();
    if gain > 0.0 && gain < 1e-12 * f.abs().max(1.0) {
        // Below the resolution of F: accept the step when it shrinks the gradient.
        let before = domain.projected_grad_norm(r, g);
        let after = domain.projected_grad_norm(&full, &grad_f(space, &full, nu)?);
        if after < before {
            let fc = objective_f(space, &full, nu)?;
            return Ok(Some((full, fc)));
        }
    }
    let mut t = 1.0;
    backtrack(space, r, g, &d, f, nu, domain, &mut t)
}

fn simulated_ascent(
    space: &ScheduleSpace,
    nu: &[f64],
    r0: Vec<f64>,
    opt: &SolveOptions,
    horizon: u64,
    window_length: u64,
    seed: u64,
) -> Result<SolveReport> {
    let g = space.graph();
    let mut policy = GradientPolicy::new(opt.schedule).with_domain(opt.domain);
    if let Some(k) = opt.record_every {
        policy = policy.recording(k);
    }
    let arrivals = ArrivalConfig::bernoulli(nu.to_vec())?;
    let config = SimConfig::new(horizon, seed).window_length(window_length);
    let trace = simulate(g, &LinkParams::from_log_fugacities(r0)?, &arrivals, &config, Some(&mut policy), None)?;
    let r = trace.final_params.log_fugacities().to_vec();
    let objective = objective_f(space, &r, nu)?;
    let grad = grad_f(space, &r, nu)?;
    let grad_norm = opt.domain.projected_grad_norm(&r, &grad);
    let trajectory = policy
        .history
        .iter()
        .map(|(t, r)| -> Result<IterateRecord> {
            let f = objective_f(space, r, nu)?;
            let pg = opt.domain.projected_grad_norm(r, &grad_f(space, r, nu)?);
            Ok(IterateRecord { iter: *t as usize, objective: f, grad_norm: pg, values: r.clone() })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SolveReport {
        iterations: trace.windows.len(),
        objective,
        grad_norm,
        converged: grad_norm < opt.tol,
        feasible: None,
        solution: r,
        trajectory,
        notes: vec![format!("{} windows of {} slots", trace.windows.len(), window_length)],
    })
}
