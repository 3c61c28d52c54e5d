use serde::{Deserialize, Serialize};

use crate::dependencies::row_summary;
use crate::dynamics::{
    check_rates, linear_form, log_sum_exp, service_rates, stationary_distribution, DistributionOverSchedules,
    LinkParams,
};
use crate::error::{Error, Result};
use crate::graph::{jensen_constant, min_vertex_cover_size, ScheduleSpace};

/// Source of the per-link minimum row sum `d_{i,min}` inside the
/// constrained dual.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum DminMode {
    /// `d_i λ_i / (1 + λ_i)` with `λ_i = e^{−ζ_i}`, i.e. `d_i / (1 + e^{ζ_i})`.
    #[default]
    Degree,
    /// `min_X d_i^X` from the per-state matrices. Every link with a neighbor
    /// has a zero minimum, so its term is dropped like an isolated link's.
    Exact,
    /// Constant `d_{i,min}`; `Fixed(1.0)` recovers the unconstrained dual.
    Fixed(f64),
}

/// Choice of the constant `C` in the auxiliary bound.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum JensenConstant {
    /// `1 + MVC`.
    #[default]
    MinVertexCover,
    /// `1 + n`: dominates `Σ_i (1 − x_i)` on every schedule, which the
    /// convexity step of the bound needs.
    EmptySchedule,
    Fixed(f64),
}

impl JensenConstant {
    pub fn value(&self, space: &ScheduleSpace) -> f64 {
        match *self {
            Self::MinVertexCover => jensen_constant(space) as f64,
            Self::EmptySchedule => 1.0 + space.n() as f64,
            Self::Fixed(c) => c,
        }
    }
}

/// Dual iterate together with the constants of the constrained problem.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualState {
    pub zeta: Vec<f64>,
    pub epsilon: f64,
    /// Jensen constant `C`.
    pub c: f64,
    pub dmin: DminMode,
    /// Per-link `k_i` with `d_{i,min}(z) = k_i / (1 + e^z)`; zero drops the term.
    coeff: Vec<f64>,
}

impl DualState {
    pub fn new(space: &ScheduleSpace, zeta: Vec<f64>, epsilon: f64, jensen: JensenConstant, dmin: DminMode) -> Result<Self> {
        let n = space.n();
        if zeta.len() != n {
            return Err(Error::LengthMismatch { expected: n, got: zeta.len() });
        }
        if let Some(z) = zeta.iter().find(|z| !(**z >= 0.0) || !z.is_finite()) {
            return Err(Error::InvalidParameter(format!("dual variables must be finite and nonnegative, got {z}")));
        }
        if !(0.0..1.0).contains(&epsilon) {
            return Err(Error::InvalidParameter(format!("epsilon must lie in [0,1), got {epsilon}")));
        }
        let c = jensen.value(space);
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidParameter(format!("Jensen constant must be positive, got {c}")));
        }
        let g = space.graph();
        let coeff = match dmin {
            DminMode::Degree | DminMode::Fixed(_) => g.degrees().iter().map(|&d| d as f64).collect(),
            DminMode::Exact => {
                // Row sums are U_i times a neighbor count; read the count at U = 1/2.
                let half = LinkParams::uniform_fugacity(n, 1.0)?;
                row_summary(space, &half, None)?.d_min.iter().map(|d| (2.0 * d).round()).collect()
            }
        };
        if let DminMode::Fixed(v) = dmin {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!("pinned d_min must be positive, got {v}")));
            }
        }
        Ok(Self { zeta, epsilon, c, dmin, coeff })
    }

    /// Fugacities implied by the dual variables, `λ_i = e^{−ζ_i}`.
    pub fn implied_params(&self) -> LinkParams {
        LinkParams::from_log_fugacities(self.zeta.iter().map(|z| -z).collect()).expect("finite dual variables")
    }

    pub fn d_min(&self, i: usize, z: f64) -> f64 {
        match self.dmin {
            DminMode::Fixed(v) => v,
            _ => self.coeff[i] / (1.0 + z.exp()),
        }
    }

    /// `z / d_{i,min}(z)`, or zero for an absent constraint.
    fn penalty(&self, i: usize, z: f64) -> f64 {
        match self.dmin {
            DminMode::Fixed(v) => z / v,
            _ if self.coeff[i] == 0.0 => 0.0,
            _ => z * (1.0 + z.exp()) / self.coeff[i],
        }
    }

    fn with_zeta(&self, zeta: Vec<f64>) -> Self {
        Self { zeta, ..self.clone() }
    }
}

/// `p(X) ∝ exp(−Σ_i ζ_i (1 − x_i))`, the distribution whose log-partition
/// appears in `D`. It is the product form at `λ_i = e^{ζ_i}`.
pub fn zeta_gibbs(space: &ScheduleSpace, zeta: &[f64]) -> DistributionOverSchedules {
    let total: f64 = zeta.iter().sum();
    let logw: Vec<f64> = space.iter().map(|x| linear_form(x, zeta) - total).collect();
    let max = logw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = logw.iter().map(|l| (l - max).exp()).collect();
    let z: f64 = w.iter().sum();
    DistributionOverSchedules::new(w.into_iter().map(|v| v / z).collect()).expect("normalised weights")
}

fn log_zeta_partition(space: &ScheduleSpace, zeta: &[f64]) -> f64 {
    let total: f64 = zeta.iter().sum();
    let logw: Vec<f64> = space.iter().map(|x| linear_form(x, zeta) - total).collect();
    log_sum_exp(&logw)
}

/// `D(ζ; ν) = Σ_i (ν_i − (1−ε)/d_{i,min}) ζ_i − log Σ_X exp(Σ_i (x_i − 1) ζ_i)`.
pub fn dual_objective_d(space: &ScheduleSpace, state: &DualState, nu: &[f64]) -> Result<f64> {
    check(space, state, nu)?;
    let linear: f64 = (0..space.n())
        .map(|i| nu[i] * state.zeta[i] - (1.0 - state.epsilon) * state.penalty(i, state.zeta[i]))
        .sum();
    Ok(linear - log_zeta_partition(space, &state.zeta))
}

/// Upper bound on `D(ζ) − D(ζ + δ)`:
///
/// `log(1 + Σ_i (1 − s_i)/C (e^{−C δ_i} − 1)) − Σ_i ν_i δ_i
///  + (1−ε) Σ_i [(ζ_i+δ_i)/d_{i,min}(ζ_i+δ_i) − ζ_i/d_{i,min}(ζ_i)]`
///
/// with `s` the link marginals of [`zeta_gibbs`] at `ζ`.
pub fn aux_function_a(space: &ScheduleSpace, state: &DualState, delta: &[f64], nu: &[f64]) -> Result<f64> {
    check(space, state, nu)?;
    let n = space.n();
    if delta.len() != n {
        return Err(Error::LengthMismatch { expected: n, got: delta.len() });
    }
    if let Some(i) = (0..n).find(|&i| !(delta[i] > -state.zeta[i]) || !delta[i].is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "step {} of link {i} must exceed −ζ_i = {}",
            delta[i], -state.zeta[i]
        )));
    }
    let s = service_rates(&zeta_gibbs(space, &state.zeta), space)?;
    let c = state.c;
    let arg = 1.0 + (0..n).map(|i| (1.0 - s[i]) / c * ((-c * delta[i]).exp() - 1.0)).sum::<f64>();
    if !(arg > 0.0) {
        return Err(Error::InvalidParameter(format!("auxiliary bound undefined: log argument {arg}")));
    }
    let rest: f64 = (0..n)
        .map(|i| {
            -nu[i] * delta[i]
                + (1.0 - state.epsilon)
                    * (state.penalty(i, state.zeta[i] + delta[i]) - state.penalty(i, state.zeta[i]))
        })
        .sum();
    Ok(arg.ln() + rest)
}

/// Per-link step derivative
/// `(s_i − 1) e^{−C δ_i} − ν_i + (1−ε)(1 + ζ_i + δ_i) e^{ζ_i+δ_i} / d_i`,
/// dropping the last term where `d_i = 0`.
pub fn aux_derivative(
    space: &ScheduleSpace,
    state: &DualState,
    delta: &[f64],
    nu: &[f64],
    s: &[f64],
) -> Result<Vec<f64>> {
    check(space, state, nu)?;
    let n = space.n();
    for len in [delta.len(), s.len()] {
        if len != n {
            return Err(Error::LengthMismatch { expected: n, got: len });
        }
    }
    Ok((0..n).map(|i| derivative_at(state, i, delta[i], nu[i], s[i])).collect())
}

#[inline]
fn derivative_at(state: &DualState, i: usize, delta: f64, nu: f64, s: f64) -> f64 {
    let z = state.zeta[i] + delta;
    let mut v = (s - 1.0) * (-state.c * delta).exp() - nu;
    if state.coeff[i] > 0.0 {
        v += (1.0 - state.epsilon) * (1.0 + z) * z.exp() / state.coeff[i];
    }
    v
}

/// Upper end of the step search interval.
pub const DELTA_MAX: f64 = 10.0;
const BISECTION_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZetaStep {
    pub zeta: Vec<f64>,
    pub delta: Vec<f64>,
    /// Links that took the corner step `δ = −ζ_i` (no sign change found).
    pub corner: Vec<bool>,
    /// Service rates at the implied fugacities `e^{−ζ}` used for the step.
    pub service: Vec<f64>,
}

/// One update `ζ ← max(0, ζ + δ*)`, where `δ*_i` zeroes the step
/// derivative on `(−ζ_i, 10]` (bisection to `1e-10`). Without a sign change
/// on the interval the corner `δ*_i = −ζ_i` is taken.
pub fn zeta_update(space: &ScheduleSpace, state: &DualState, nu: &[f64]) -> Result<ZetaStep> {
    check(space, state, nu)?;
    let n = space.n();
    let service = service_rates(&stationary_distribution(space, &state.implied_params())?, space)?;
    let mut delta = vec![0.0; n];
    let mut corner = vec![false; n];
    for i in 0..n {
        let f = |d: f64| derivative_at(state, i, d, nu[i], service[i]);
        let (mut lo, mut hi) = (-state.zeta[i], DELTA_MAX);
        let (flo, fhi) = (f(lo), f(hi));
        if flo.signum() == fhi.signum() || flo == 0.0 {
            delta[i] = -state.zeta[i];
            corner[i] = true;
            continue;
        }
        while hi - lo > BISECTION_TOL {
            let mid = 0.5 * (lo + hi);
            if f(mid).signum() == flo.signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        delta[i] = 0.5 * (lo + hi);
    }
    let zeta = state.zeta.iter().zip(&delta).map(|(z, d)| (z + d).max(0.0)).collect();
    Ok(ZetaStep { zeta, delta, corner, service })
}

fn check(space: &ScheduleSpace, state: &DualState, nu: &[f64]) -> Result<()> {
    let n = space.n();
    for len in [state.zeta.len(), nu.len()] {
        if len != n {
            return Err(Error::LengthMismatch { expected: n, got: len });
        }
    }
    check_rates(nu)
}

/// Threshold on `‖ζ‖_∞` for the service-rate agnostic verdict.
pub const AGNOSTIC_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualIterationReport {
    pub iterations: usize,
    /// `‖ζ‖_∞ < 1e-6` at termination.
    pub service_rate_agnostic: bool,
    /// Iteration stopped because `ζ` stopped moving.
    pub stalled: bool,
    pub max_iter_reached: bool,
    pub c: f64,
    pub mvc: usize,
    pub log2_n: f64,
    pub final_zeta: Vec<f64>,
    /// `‖ζ‖_∞` per iterate, starting with the initial point.
    pub zeta_norms: Vec<f64>,
    /// Full `ζ` per iterate.
    pub trajectory: Vec<Vec<f64>>,
    /// `‖ζ‖_∞` is nonincreasing after the first tenth of the run.
    pub monotone_after_burn_in: bool,
    pub objective: Vec<f64>,
    pub interpretation: String,
}

impl DualIterationReport {
    pub fn mvc_within_log2_n(&self) -> bool {
        self.mvc as f64 <= self.log2_n
    }
}

/// Iterates [`zeta_update`] with exact service rates from `zeta0`.
pub fn run_dual_iteration(
    space: &ScheduleSpace,
    nu: &[f64],
    epsilon: f64,
    max_iter: usize,
    zeta0: Vec<f64>,
    jensen: JensenConstant,
) -> Result<DualIterationReport> {
    let mut state = DualState::new(space, zeta0, epsilon, jensen, DminMode::Degree)?;
    let norm = |z: &[f64]| z.iter().cloned().fold(0.0, f64::max);
    let mut trajectory = vec![state.zeta.clone()];
    let mut zeta_norms = vec![norm(&state.zeta)];
    let mut objective = vec![dual_objective_d(space, &state, nu)?];
    let mut iterations = 0;
    let mut stalled = false;
    while zeta_norms[iterations] >= AGNOSTIC_TOL && iterations < max_iter {
        let step = zeta_update(space, &state, nu)?;
        let moved = step.zeta.iter().zip(&state.zeta).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        state = state.with_zeta(step.zeta);
        iterations += 1;
        trajectory.push(state.zeta.clone());
        zeta_norms.push(norm(&state.zeta));
        objective.push(dual_objective_d(space, &state, nu)?);
        if moved < 1e-13 {
            stalled = true;
            break;
        }
    }
    let burn_in = iterations / 10;
    let monotone_after_burn_in = zeta_norms[burn_in..].windows(2).all(|w| w[1] <= w[0] + 1e-12);
    let agnostic = zeta_norms[iterations] < AGNOSTIC_TOL;
    let interpretation = if agnostic {
        "ζ → 0: implied fugacity e^{−ζ} = 1 on every link, independent of the observed service rates".into()
    } else {
        format!(
            "ζ settled at ‖ζ‖_∞ = {:.6}; the update still depends on the service rates",
            zeta_norms[iterations]
        )
    };
    Ok(DualIterationReport {
        iterations,
        service_rate_agnostic: agnostic,
        stalled,
        max_iter_reached: !agnostic && !stalled && iterations >= max_iter,
        c: state.c,
        mvc: min_vertex_cover_size(space),
        log2_n: (space.n() as f64).log2(),
        final_zeta: state.zeta,
        zeta_norms,
        trajectory,
        monotone_after_burn_in,
        objective,
        interpretation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{GraphSpec, InterferenceGraph};
    use crate::optimize::objective_f;
    use proptest::prelude::*;

    fn space(spec: GraphSpec) -> ScheduleSpace {
        spec.build().unwrap().schedule_space().unwrap()
    }

    fn state(s: &ScheduleSpace, zeta: Vec<f64>) -> DualState {
        DualState::new(s, zeta, 0.0, JensenConstant::EmptySchedule, DminMode::Degree).unwrap()
    }

    #[test]
    fn objective_examples() {
        let c5 = space(GraphSpec::Cycle { n: 5 });
        let d0 = dual_objective_d(&c5, &state(&c5, vec![0.0; 5]), &[0.2; 5]).unwrap();
        assert!((d0 + (c5.len() as f64).ln()).abs() < 1e-14);

        let one = InterferenceGraph::empty(1).unwrap().schedule_space().unwrap();
        for (z, nu) in [(0.3, 0.4), (2.0, 0.1)] {
            let d = dual_objective_d(&one, &state(&one, vec![z]), &[nu]).unwrap();
            assert!((d - (nu * z - (1.0 + (-z).exp()).ln())).abs() < 1e-14);
        }

        let k2 = space(GraphSpec::Complete { n: 2 });
        let z = 0.7f64;
        let st = DualState::new(&k2, vec![z, z], 0.0, JensenConstant::EmptySchedule, DminMode::Fixed(1.0)).unwrap();
        let d = dual_objective_d(&k2, &st, &[0.0, 0.0]).unwrap();
        let want = -2.0 * z - ((-2.0 * z).exp() + 2.0 * (-z).exp()).ln();
        assert!((d - want).abs() < 1e-14);
    }

    #[test]
    fn zeta_form_is_product_form_at_positive_exponent() {
        let c6 = space(GraphSpec::Cycle { n: 6 });
        let zeta = vec![0.1, 0.9, 0.4, 1.7, 0.0, 0.3];
        let p = zeta_gibbs(&c6, &zeta);
        let plus = stationary_distribution(&c6, &LinkParams::from_log_fugacities(zeta.clone()).unwrap()).unwrap();
        let minus = stationary_distribution(&c6, &DualState::new(&c6, zeta.clone(), 0.0, JensenConstant::default(), DminMode::Degree).unwrap().implied_params()).unwrap();
        let err = |a: &DistributionOverSchedules, b: &DistributionOverSchedules| {
            a.probs().iter().zip(b.probs()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
        };
        assert!(err(&p, &plus) < 1e-12);
        assert!(err(&p, &minus) > 1e-2);
        // Agreement with e^{−ζ} only at ζ = 0.
        let zero = zeta_gibbs(&c6, &[0.0; 6]);
        assert!(err(&zero, &DistributionOverSchedules::uniform(&c6)) < 1e-15);
    }

    #[test]
    fn pinned_dmin_reduces_to_primal_objective() {
        let c6 = space(GraphSpec::Cycle { n: 6 });
        let zeta = vec![0.2, 1.1, 0.0, 0.5, 2.0, 0.7];
        let nu = [0.3, 0.1, 0.2, 0.25, 0.15, 0.05];
        let st = DualState::new(&c6, zeta.clone(), 0.0, JensenConstant::default(), DminMode::Fixed(1.0)).unwrap();
        let d = dual_objective_d(&c6, &st, &nu).unwrap();
        assert!((d - objective_f(&c6, &zeta, &nu).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn dmin_modes() {
        let star = space(GraphSpec::Star { n: 4 });
        let st = state(&star, vec![0.0; 4]);
        assert!((st.d_min(0, 0.0) - 1.5).abs() < 1e-15);
        assert!((st.d_min(1, 0.0) - 0.5).abs() < 1e-15);
        let ex = DualState::new(&star, vec![0.0; 4], 0.0, JensenConstant::default(), DminMode::Exact).unwrap();
        assert!((0..4).all(|i| ex.d_min(i, 0.3) == 0.0));
        // With every term dropped, D is the plain dual at ζ.
        let nu = [0.1; 4];
        let d = dual_objective_d(&star, &ex.with_zeta(vec![0.5; 4]), &nu).unwrap();
        assert!((d - (0.2 - log_zeta_partition(&star, &[0.5; 4]))).abs() < 1e-14);
    }

    #[test]
    fn jensen_constants() {
        let star = space(GraphSpec::Star { n: 16 });
        assert_eq!(JensenConstant::MinVertexCover.value(&star), 2.0);
        assert_eq!(JensenConstant::EmptySchedule.value(&star), 17.0);
        assert_eq!(JensenConstant::Fixed(3.5).value(&star), 3.5);
    }

    #[test]
    fn aux_examples() {
        let c6 = space(GraphSpec::Cycle { n: 6 });
        let st = state(&c6, vec![0.5; 6]);
        assert!(aux_function_a(&c6, &st, &[0.0; 6], &[0.2; 6]).unwrap().abs() < 1e-15);
        let star = space(GraphSpec::Star { n: 4 });
        for jensen in [JensenConstant::MinVertexCover, JensenConstant::EmptySchedule] {
            let st = DualState::new(&star, vec![1.0; 4], 0.0, jensen, DminMode::Degree).unwrap();
            assert!(aux_function_a(&star, &st, &[-0.5; 4], &[0.1; 4]).unwrap().is_finite());
            assert!(aux_function_a(&star, &st, &[-1.0; 4], &[0.1; 4]).is_err());
        }
    }

    #[test]
    fn minimum_cover_constant_can_break_the_bound() {
        // On the star the silent-link count of the empty schedule exceeds
        // 1 + MVC, so the convexity step fails for small uniform steps.
        let star = space(GraphSpec::Star { n: 8 });
        let nu = [0.05; 8];
        let zeta = vec![0.2; 8];
        let delta = vec![0.05; 8];
        let lhs = |st: &DualState| {
            dual_objective_d(&star, st, &nu).unwrap()
                - dual_objective_d(&star, &st.with_zeta(vec![0.25; 8]), &nu).unwrap()
        };
        let mvc = DualState::new(&star, zeta.clone(), 0.0, JensenConstant::MinVertexCover, DminMode::Degree).unwrap();
        let full = DualState::new(&star, zeta, 0.0, JensenConstant::EmptySchedule, DminMode::Degree).unwrap();
        let a_mvc = aux_function_a(&star, &mvc, &delta, &nu);
        assert!(a_mvc.map_or(true, |a| lhs(&mvc) >= a));
        assert!(lhs(&full) < aux_function_a(&star, &full, &delta, &nu).unwrap());
    }

    #[test]
    fn derivative_examples() {
        let star = space(GraphSpec::Star { n: 4 });
        let st = state(&star, vec![0.0; 4]);
        let s = service_rates(&stationary_distribution(&star, &st.implied_params()).unwrap(), &star).unwrap();
        let g = aux_derivative(&star, &st, &[0.0; 4], &[0.1; 4], &s).unwrap();
        // Leaf: (s − 1) − ν + 1 with d = 1.
        assert!((g[1] - (s[1] - 1.0 - 0.1 + 1.0)).abs() < 1e-15);
        // Saturated link on a large clique: only −ν survives.
        let k = space(GraphSpec::Complete { n: 12 });
        let stk = DualState::new(&k, vec![0.0; 12], 0.0, JensenConstant::default(), DminMode::Degree).unwrap();
        let mut s = vec![0.0; 12];
        s[0] = 1.0;
        let gk = aux_derivative(&k, &stk, &[0.0; 12], &[0.05; 12], &s).unwrap();
        assert!((gk[0] - (-0.05 + 1.0 / 11.0)).abs() < 1e-15);
    }

    #[test]
    fn zero_is_fixed_only_without_a_positive_root() {
        let iso = InterferenceGraph::empty(4).unwrap().schedule_space().unwrap();
        let step = zeta_update(&iso, &state(&iso, vec![0.0; 4]), &[0.05; 4]).unwrap();
        assert_eq!(step.zeta, vec![0.0; 4]);
        // The star center's step derivative is negative just above zero and
        // crosses on (0, 10], so the center leaves zero while leaves stay.
        let star = space(GraphSpec::Star { n: 6 });
        let step = zeta_update(&star, &state(&star, vec![0.0; 6]), &[0.05; 6]).unwrap();
        assert!(step.zeta[0] > 0.1);
        assert_eq!(&step.zeta[1..], &[0.0; 5]);
    }

    #[test]
    fn update_zeroes_the_derivative() {
        let c6 = space(GraphSpec::Cycle { n: 6 });
        let st = state(&c6, vec![1.0; 6]);
        let nu = [0.05; 6];
        let step = zeta_update(&c6, &st, &nu).unwrap();
        let g = aux_derivative(&c6, &st, &step.delta, &nu, &step.service).unwrap();
        for (i, gi) in g.iter().enumerate() {
            assert!(step.corner[i] || gi.abs() < 1e-8, "{gi}");
            assert!(step.zeta[i] >= 0.0);
        }
    }

    #[test]
    fn isolated_links_go_to_zero() {
        let s = InterferenceGraph::empty(3).unwrap().schedule_space().unwrap();
        let rep = run_dual_iteration(&s, &[0.2; 3], 0.0, 10, vec![1.0; 3], JensenConstant::default()).unwrap();
        assert!(rep.service_rate_agnostic);
        assert_eq!(rep.iterations, 1);
    }

    #[test]
    fn run_reports_constants() {
        let s = space(GraphSpec::Star { n: 8 });
        let rep = run_dual_iteration(&s, &[0.05; 8], 0.0, 200, vec![1.0; 8], JensenConstant::default()).unwrap();
        assert_eq!(rep.mvc, 1);
        assert_eq!(rep.c, 2.0);
        assert_eq!(rep.log2_n, 3.0);
        assert_eq!(rep.zeta_norms.len(), rep.iterations + 1);
        assert!(rep.mvc_within_log2_n());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn step_derivative_is_increasing(
            zeta in proptest::collection::vec(0.01f64..3.0, 6),
            frac in proptest::collection::vec(-0.9f64..2.0, 6),
            nu in proptest::collection::vec(0.0f64..0.3, 6),
        ) {
            let c6 = space(GraphSpec::Cycle { n: 6 });
            let st = DualState::new(&c6, zeta.clone(), 0.0, JensenConstant::MinVertexCover, DminMode::Degree).unwrap();
            let s = service_rates(&stationary_distribution(&c6, &st.implied_params()).unwrap(), &c6).unwrap();
            let delta: Vec<f64> = zeta.iter().zip(&frac).map(|(z, f)| z * f).collect();
            let h = 1e-4;
            let up: Vec<f64> = delta.iter().map(|d| d + h).collect();
            let down: Vec<f64> = delta.iter().map(|d| d - h).collect();
            let gu = aux_derivative(&c6, &st, &up, &nu, &s).unwrap();
            let gd = aux_derivative(&c6, &st, &down, &nu, &s).unwrap();
            for i in 0..6 {
                prop_assert!(gu[i] - gd[i] > 0.0);
            }
        }

        #[test]
        fn aux_bound_is_convex_in_each_step(
            zeta in proptest::collection::vec(0.05f64..2.0, 5),
            frac in proptest::collection::vec(-0.8f64..1.0, 5),
            link in 0usize..5,
        ) {
            let c5 = space(GraphSpec::Cycle { n: 5 });
            let st = state(&c5, zeta.clone());
            let nu = [0.1; 5];
            let delta: Vec<f64> = zeta.iter().zip(&frac).map(|(z, f)| z * f).collect();
            let h = 1e-3;
            let mut up = delta.clone();
            let mut down = delta.clone();
            up[link] += h;
            down[link] -= h;
            let a = |d: &[f64]| aux_function_a(&c5, &st, d, &nu).unwrap();
            prop_assert!(a(&up) + a(&down) - 2.0 * a(&delta) > 0.0);
        }
    }
}
