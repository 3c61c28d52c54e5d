//! Dependencies matrices and the Dobrushin condition.
//!
//! Rows are indexed by the observed link `i`, columns by the flipped link
//! `j`: entry `(i, j)` is the largest total-variation change in link `i`'s
//! conditional marginal when link `j` alone changes state. The chain mixes
//! fast when every row sum is below one.
//!
//! Under the product-form law the conditional marginal of link `i` given
//! everything else is `U_i` when all its neighbors are silent and `0`
//! otherwise, which yields the closed form used by
//! [`dependencies_matrix_analytic`]. [`dependencies_matrix_exact`] instead
//! conditions the stationary distribution directly and maximises over all
//! flip pairs in `Ω²`.

use std::fmt::Write as _;

use serde::Serialize;

use crate::dynamics::{stationary_distribution, DistributionOverSchedules, LinkParams, Trace};
use crate::error::{Error, Result};
use crate::graph::{InterferenceGraph, Schedule, ScheduleSpace};
use crate::report::fmt_g;

/// `½ Σ_x |μ(x) − ν(x)|`.
pub fn tv_distance(mu: &[f64], nu: &[f64]) -> Result<f64> {
    if mu.len() != nu.len() {
        return Err(Error::SupportMismatch(mu.len(), nu.len()));
    }
    Ok(0.5 * mu.iter().zip(nu).map(|(a, b)| (a - b).abs()).sum::<f64>())
}

/// Total variation between Bernoulli(p) and Bernoulli(q).
#[inline]
fn bernoulli_tv(p: f64, q: f64) -> f64 {
    0.5 * ((1.0 - p) - (1.0 - q)).abs() + 0.5 * (p - q).abs()
}

/// Probability that link `i` transmits given the states of all other links
/// in `x` (the state of `i` itself in `x` is ignored).
#[inline]
pub fn conditional_marginal(g: &InterferenceGraph, params: &LinkParams, x: Schedule, i: usize) -> f64 {
    if x.bits() & g.neighbors_mask(i) != 0 {
        0.0
    } else {
        params.strategy(i)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MatrixKind {
    /// Worst case over flip pairs.
    Analytic,
    /// One schedule `X`.
    PerState,
    /// Average of per-state matrices under a distribution.
    Expected,
    /// Estimated from a simulation trace.
    Empirical,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DependenciesMatrix {
    pub kind: MatrixKind,
    n: usize,
    entries: Vec<f64>,
    /// Rows whose estimator had no conditioning samples (empirical only).
    undefined_rows: Vec<bool>,
}

impl DependenciesMatrix {
    fn zeros(kind: MatrixKind, n: usize) -> Self {
        Self { kind, n, entries: vec![0.0; n * n], undefined_rows: vec![false; n] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize, v: f64) {
        self.entries[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.row(i).iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<f64> {
        (0..self.n).map(|j| (0..self.n).map(|i| self.get(i, j)).sum()).collect()
    }

    pub fn undefined_rows(&self) -> Vec<usize> {
        self.undefined_rows.iter().enumerate().filter(|(_, &u)| u).map(|(i, _)| i).collect()
    }

    pub fn is_row_defined(&self, i: usize) -> bool {
        !self.undefined_rows[i]
    }

    pub fn max_abs_diff(&self, other: &DependenciesMatrix) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// `n` lines of `n` comma-separated entries; undefined empirical rows are
    /// written as `nan`.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for i in 0..self.n {
            let row: Vec<String> = if self.undefined_rows[i] {
                vec!["nan".into(); self.n]
            } else {
                self.row(i).iter().map(|&v| fmt_g(v)).collect()
            };
            let _ = writeln!(out, "{}", row.join(","));
        }
        out
    }

    /// `{kind, n, entries, row_sums, norms}`; undefined rows become `null`.
    pub fn to_json(&self) -> serde_json::Value {
        let entries: Vec<serde_json::Value> = (0..self.n)
            .map(|i| {
                if self.undefined_rows[i] {
                    serde_json::Value::Null
                } else {
                    serde_json::json!(self.row(i))
                }
            })
            .collect();
        serde_json::json!({
            "kind": self.kind,
            "n": self.n,
            "entries": entries,
            "row_sums": self.row_sums(),
            "undefined_rows": self.undefined_rows(),
            "norms": matrix_norms(self),
        })
    }
}

/// Closed form: `R_ij = U_i` for neighbors, `0` otherwise.
///
/// The all-silent completion makes every neighbor flip feasible and exposes
/// the full swing of link `i`'s marginal between `U_i` and `0`.
pub fn dependencies_matrix_analytic(g: &InterferenceGraph, params: &LinkParams) -> Result<DependenciesMatrix> {
    params.check_len(g.n())?;
    let mut m = DependenciesMatrix::zeros(MatrixKind::Analytic, g.n());
    for i in 0..g.n() {
        let u = params.strategy(i);
        for j in g.neighbors(i) {
            m.set(i, j, u);
        }
    }
    Ok(m)
}

/// Brute force over `Ω²`: conditional marginals are read off the stationary
/// distribution and every pair differing only at `j` is compared.
pub fn dependencies_matrix_exact(space: &ScheduleSpace, params: &LinkParams) -> Result<DependenciesMatrix> {
    let n = space.n();
    let pi = stationary_distribution(space, params)?;
    let prob = |x: Schedule| space.index_of(x).map_or(0.0, |k| pi.probs()[k]);
    // marginal[k][i]: P(x_i = 1 | other links as in schedule k)
    let marginal: Vec<Vec<f64>> = space
        .iter()
        .map(|x| {
            (0..n)
                .map(|i| {
                    let on = prob(x.with(i));
                    let off = prob(x.without(i));
                    on / (on + off)
                })
                .collect()
        })
        .collect();
    let mut m = DependenciesMatrix::zeros(MatrixKind::Analytic, n);
    for (kx, x) in space.iter().enumerate() {
        for j in 0..n {
            let y = x.flipped(j);
            if y < x {
                continue;
            }
            let Some(ky) = space.index_of(y) else { continue };
            for i in (0..n).filter(|&i| i != j) {
                let mu = [1.0 - marginal[kx][i], marginal[kx][i]];
                let nu = [1.0 - marginal[ky][i], marginal[ky][i]];
                let d = tv_distance(&mu, &nu)?;
                if d > m.get(i, j) {
                    m.set(i, j, d);
                }
            }
        }
    }
    Ok(m)
}

/// Per-state matrix `R^X`: link `j` is flipped in `x`; when the flip leaves
/// the schedule space the whole column is zero.
pub fn dependencies_matrix_state(
    g: &InterferenceGraph,
    params: &LinkParams,
    x: Schedule,
) -> Result<DependenciesMatrix> {
    params.check_len(g.n())?;
    if !g.is_independent(x.bits()) {
        return Err(Error::InfeasibleSchedule(x.bits()));
    }
    let n = g.n();
    let mut m = DependenciesMatrix::zeros(MatrixKind::PerState, n);
    for j in 0..n {
        let y = x.flipped(j);
        if !g.is_independent(y.bits()) {
            continue;
        }
        for i in g.neighbors(j) {
            let d = bernoulli_tv(conditional_marginal(g, params, x, i), conditional_marginal(g, params, y, i));
            m.set(i, j, d);
        }
    }
    Ok(m)
}

/// `I = Σ_X p(X) R^X`.
pub fn expected_dependencies(
    space: &ScheduleSpace,
    params: &LinkParams,
    p: &DistributionOverSchedules,
) -> Result<DependenciesMatrix> {
    if p.len() != space.len() {
        return Err(Error::SupportMismatch(p.len(), space.len()));
    }
    let n = space.n();
    let mut m = DependenciesMatrix::zeros(MatrixKind::Expected, n);
    for (x, &px) in space.iter().zip(p.probs()) {
        if px == 0.0 {
            continue;
        }
        let rx = dependencies_matrix_state(space.graph(), params, x)?;
        for (acc, v) in m.entries.iter_mut().zip(&rx.entries) {
            *acc += px * v;
        }
    }
    Ok(m)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowSummary {
    /// `d_i^X` for every schedule (outer index follows the schedule space).
    pub row_sums: Vec<Vec<f64>>,
    /// `d_{i,min} = min_X d_i^X`.
    pub d_min: Vec<f64>,
    /// `max_X d_i^X`.
    pub d_max: Vec<f64>,
    /// `Σ_X d_i^X p(X)` when a distribution was supplied.
    pub weighted: Option<Vec<f64>>,
}

pub fn row_summary(
    space: &ScheduleSpace,
    params: &LinkParams,
    p: Option<&DistributionOverSchedules>,
) -> Result<RowSummary> {
    let n = space.n();
    if let Some(p) = p {
        if p.len() != space.len() {
            return Err(Error::SupportMismatch(p.len(), space.len()));
        }
    }
    let mut row_sums = Vec::with_capacity(space.len());
    let mut d_min = vec![f64::INFINITY; n];
    let mut d_max = vec![0.0f64; n];
    let mut weighted = p.map(|_| vec![0.0; n]);
    for (k, x) in space.iter().enumerate() {
        let sums = dependencies_matrix_state(space.graph(), params, x)?.row_sums();
        for i in 0..n {
            d_min[i] = d_min[i].min(sums[i]);
            d_max[i] = d_max[i].max(sums[i]);
            if let (Some(w), Some(p)) = (weighted.as_mut(), p) {
                w[i] += p.probs()[k] * sums[i];
            }
        }
        row_sums.push(sums);
    }
    Ok(RowSummary { row_sums, d_min, d_max, weighted })
}

/// `d_i λ_i / (1 + λ_i)`, the degree-based estimate of `d_{i,min}`.
pub fn degree_estimate(g: &InterferenceGraph, params: &LinkParams) -> Result<Vec<f64>> {
    params.check_len(g.n())?;
    Ok((0..g.n()).map(|i| g.degree(i) as f64 * params.strategy(i)).collect())
}

/// Estimates `R` from a trace: `R̂_ij = p̂_i` for neighbors, where `p̂_i` is
/// the fraction of slots with all of `i`'s neighbors silent in which `i`
/// transmitted. Rows with no such slots are flagged undefined.
///
/// With `tail` set, the tail-window counts are used instead of the
/// lifetime counts.
pub fn empirical_dependencies(trace: &Trace, g: &InterferenceGraph, tail: bool) -> Result<DependenciesMatrix> {
    if trace.n != g.n() {
        return Err(Error::LengthMismatch { expected: g.n(), got: trace.n });
    }
    let counts = if tail {
        trace
            .tail_conditional
            .as_ref()
            .ok_or_else(|| Error::InvalidParameter("trace has no tail-window counts".into()))?
    } else {
        &trace.conditional
    };
    let mut m = DependenciesMatrix::zeros(MatrixKind::Empirical, g.n());
    for (i, c) in counts.iter().enumerate() {
        match c.frequency() {
            Some(p) => {
                for j in g.neighbors(i) {
                    m.set(i, j, p);
                }
            }
            None => m.undefined_rows[i] = true,
        }
    }
    Ok(m)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MatrixNorms {
    /// Max column sum.
    pub norm1: f64,
    /// Max row sum.
    pub norm_inf: f64,
    /// Largest singular value.
    pub spectral: f64,
    /// Every row sum below one.
    pub dobrushin: bool,
}

/// Operator norms; undefined empirical rows count as zero.
pub fn matrix_norms(m: &DependenciesMatrix) -> MatrixNorms {
    let norm_inf = m.row_sums().into_iter().fold(0.0, f64::max);
    let norm1 = m.col_sums().into_iter().fold(0.0, f64::max);
    MatrixNorms { norm1, norm_inf, spectral: spectral_norm(m), dobrushin: norm_inf < 1.0 }
}

/// Power iteration on `MᵀM`, stopping when successive estimates agree to `1e-10`.
fn spectral_norm(m: &DependenciesMatrix) -> f64 {
    let n = m.n;
    if m.entries.iter().all(|&v| v == 0.0) {
        return 0.0;
    }
    let mut v = vec![1.0 / (n as f64).sqrt(); n];
    let mut prev = 0.0;
    for _ in 0..100_000 {
        let mv: Vec<f64> = (0..n).map(|i| m.row(i).iter().zip(&v).map(|(a, b)| a * b).sum()).collect();
        let mut w = vec![0.0; n];
        for (i, &mvi) in mv.iter().enumerate() {
            for (j, wj) in w.iter_mut().enumerate() {
                *wj += m.get(i, j) * mvi;
            }
        }
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        let sigma = norm.sqrt();
        v = w.into_iter().map(|x| x / norm).collect();
        if (sigma - prev).abs() <= 1e-10 * sigma.max(1.0) {
            return sigma;
        }
        prev = sigma;
    }
    prev
}
