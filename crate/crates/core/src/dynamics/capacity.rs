use microlp::{ComparisonOp, OptimizationDirection, Problem};
use serde::Serialize;

use super::params::check_rates;
use crate::error::{Error, Result};
use crate::graph::{Schedule, ScheduleSpace};

/// Strictness margin on the optimal max-min slack.
pub const CAPACITY_SLACK_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Serialize)]
pub struct CapacityReport {
    pub feasible: bool,
    /// `max_t min_i (Σ_X t_X x_i − ν_i)` over the convex hull of Ω.
    pub slack: f64,
    /// Time-sharing weights achieving `slack` (nonzero entries only).
    pub witness: Vec<(Schedule, f64)>,
    /// Link weights `w` on the simplex with `max_X w·(x − ν) <= slack`,
    /// present when the vector is not strictly dominated.
    pub certificate: Option<Vec<f64>>,
}

/// Schedules not contained in a larger feasible schedule. Dominance means
/// they suffice for the max-min slack problem.
fn maximal_schedules(space: &ScheduleSpace) -> Vec<Schedule> {
    let g = space.graph();
    space
        .iter()
        .filter(|x| {
            (0..g.n()).all(|i| x.contains(i) || x.bits() & g.neighbors_mask(i) != 0)
        })
        .collect()
}

/// Capacity-region membership: is `ν` strictly dominated by a convex
/// combination of feasible schedules?
///
/// Solves `max m` subject to `Σ_X t_X x_i − m >= ν_i`, `Σ t_X = 1`, `t >= 0`,
/// and declares `ν` feasible when the optimum exceeds [`CAPACITY_SLACK_TOL`].
pub fn capacity_check(space: &ScheduleSpace, nu: &[f64]) -> Result<CapacityReport> {
    let n = space.n();
    if nu.len() != n {
        return Err(Error::LengthMismatch { expected: n, got: nu.len() });
    }
    check_rates(nu)?;
    let cols = maximal_schedules(space);

    let mut lp = Problem::new(OptimizationDirection::Maximize);
    let t: Vec<_> = cols.iter().map(|_| lp.add_var(0.0, (0.0, f64::INFINITY))).collect();
    let m = lp.add_var(1.0, (-1.0, 1.0));
    let simplex: Vec<_> = t.iter().map(|&v| (v, 1.0)).collect();
    lp.add_constraint(simplex.as_slice(), ComparisonOp::Eq, 1.0);
    for (i, &nu_i) in nu.iter().enumerate() {
        let mut row: Vec<_> = cols
            .iter()
            .zip(&t)
            .filter(|(x, _)| x.contains(i))
            .map(|(_, &v)| (v, 1.0))
            .collect();
        row.push((m, -1.0));
        lp.add_constraint(row.as_slice(), ComparisonOp::Ge, nu_i);
    }
    let sol = lp
        .solve()
        .map_err(|e| Error::Lp(format!("{e:?}")))?
        .into_solution()
        .map_err(|_| Error::Lp("solve interrupted".into()))?;
    let slack = sol.objective();
    let witness = cols
        .iter()
        .zip(&t)
        .map(|(&x, &v)| (x, sol.var_value(v)))
        .filter(|(_, w)| *w > 1e-12)
        .collect();
    let feasible = slack > CAPACITY_SLACK_TOL;
    let certificate = if feasible { None } else { Some(separating_weights(&cols, nu)?) };
    Ok(CapacityReport { feasible, slack, witness, certificate })
}

/// Dual of the max-min slack problem: `min z` over link weights `w` on the
/// simplex with `z >= Σ_i w_i (x_i − ν_i)` for every schedule.
fn separating_weights(cols: &[Schedule], nu: &[f64]) -> Result<Vec<f64>> {
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let w: Vec<_> = nu.iter().map(|_| lp.add_var(0.0, (0.0, 1.0))).collect();
    let z = lp.add_var(1.0, (-1.0, 1.0));
    let simplex: Vec<_> = w.iter().map(|&v| (v, 1.0)).collect();
    lp.add_constraint(simplex.as_slice(), ComparisonOp::Eq, 1.0);
    for x in cols {
        // z − Σ_i w_i (x_i − ν_i) >= 0
        let mut row: Vec<_> = w
            .iter()
            .enumerate()
            .map(|(i, &v)| (v, -((x.contains(i) as u8 as f64) - nu[i])))
            .collect();
        row.push((z, 1.0));
        lp.add_constraint(row.as_slice(), ComparisonOp::Ge, 0.0);
    }
    let sol = lp
        .solve()
        .map_err(|e| Error::Lp(format!("{e:?}")))?
        .into_solution()
        .map_err(|_| Error::Lp("solve interrupted".into()))?;
    Ok(w.iter().map(|&v| sol.var_value(v)).collect())
}

/// Largest `v` such that the uniform vector `(v, …, v)` is dominated by a
/// time-sharing of schedules; uniform rates below it lie in the capacity region.
pub fn symmetric_capacity(space: &ScheduleSpace) -> Result<f64> {
    Ok(capacity_check(space, &vec![0.0; space.n()])?.slack)
}
