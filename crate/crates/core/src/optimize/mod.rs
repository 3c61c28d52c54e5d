//! Throughput optimization: the primal log-fugacity problem, its
//! maximum-entropy dual, and the complexity-constrained dual with the
//! auxiliary-function update.

mod constrained;
mod dual;
mod primal;

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::report::fmt_g;

pub use constrained::{
    aux_derivative, aux_function_a, dual_objective_d, run_dual_iteration, zeta_gibbs, zeta_update, DminMode,
    DualState, JensenConstant, DualIterationReport, ZetaStep, AGNOSTIC_TOL, DELTA_MAX,
};
pub use dual::{solve_dual_maxent, verify_duality, DualityReport, MaxEntSolution, ServiceConstraint};
pub use primal::{
    grad_f, objective_f, solve_prime, GradientPolicy, RateDomain, SolveMode, SolveOptions,
};

/// Step size of the distributed update as a function of the window count
/// `t >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum LearningRateSchedule {
    Constant { alpha0: f64 },
    /// `α(t) = 1 / ((1 + t^0.3) ln(1 + t^0.3))`.
    TimeVarying,
}

impl LearningRateSchedule {
    pub fn alpha(&self, t: u64) -> f64 {
        match *self {
            Self::Constant { alpha0 } => alpha0,
            Self::TimeVarying => {
                let a = 1.0 + (t.max(1) as f64).powf(0.3);
                1.0 / (a * a.ln())
            }
        }
    }
}

impl Default for LearningRateSchedule {
    fn default() -> Self {
        Self::Constant { alpha0: 0.01 }
    }
}

/// `r_i ← [r_i + α (ν'_i − s'_i)]₊`.
pub fn distributed_update(r: &[f64], nu_hat: &[f64], s_hat: &[f64], alpha: f64) -> Vec<f64> {
    r.iter()
        .zip(nu_hat.iter().zip(s_hat))
        .map(|(&r, (&nu, &s))| (r + alpha * (nu - s)).max(0.0))
        .collect()
}

/// One recorded iterate of a solver.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterateRecord {
    pub iter: usize,
    pub objective: f64,
    pub grad_norm: f64,
    /// Per-link iterate (`r` for the primal, `ζ` for the dual updates).
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    pub iterations: usize,
    pub objective: f64,
    pub grad_norm: f64,
    pub converged: bool,
    /// Capacity-region verdict for the target rates, when checked.
    pub feasible: Option<bool>,
    pub solution: Vec<f64>,
    pub trajectory: Vec<IterateRecord>,
    pub notes: Vec<String>,
}

impl SolveReport {
    /// Long-format trajectory: `iter,objective,grad_norm,link,value`.
    pub fn trajectory_csv(&self) -> String {
        let mut out = String::from("iter,objective,grad_norm,link,value\n");
        for rec in &self.trajectory {
            for (link, v) in rec.values.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{}",
                    rec.iter,
                    fmt_g(rec.objective),
                    fmt_g(rec.grad_norm),
                    link,
                    fmt_g(*v)
                );
            }
        }
        out
    }

    pub fn summary_json(&self) -> serde_json::Value {
        serde_json::json!({
            "iterations": self.iterations,
            "objective": self.objective,
            "grad_norm": self.grad_norm,
            "converged": self.converged,
            "feasible": self.feasible,
            "solution": self.solution,
            "notes": self.notes,
        })
    }
}
