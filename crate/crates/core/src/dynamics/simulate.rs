use std::fmt::Write as _;

use rand::Rng;
use serde::Serialize;

use super::params::{ArrivalConfig, LinkParams};
use crate::error::{Error, Result};
use crate::graph::{InterferenceGraph, Schedule, ScheduleSpace};
use crate::rng::{rng_from_seed, SimRng};

/// Deterministic core of one GD-CSMA slot: `link` was selected and `draw`
/// is a uniform sample in `[0, 1)`.
///
/// The selected link transmits iff its neighbors were all silent and
/// `draw < U_link`; every other link keeps its state.
#[inline]
pub fn gd_csma_transition(
    x: Schedule,
    link: usize,
    draw: f64,
    params: &LinkParams,
    g: &InterferenceGraph,
) -> Schedule {
    if x.bits() & g.neighbors_mask(link) == 0 && draw < params.strategy(link) {
        x.with(link)
    } else {
        x.without(link)
    }
}

/// One slot of the chain: pick a link uniformly, then apply
/// [`gd_csma_transition`].
pub fn gd_csma_step(
    x: Schedule,
    params: &LinkParams,
    g: &InterferenceGraph,
    rng: &mut impl Rng,
) -> Schedule {
    let link = rng.gen_range(0..g.n());
    let draw: f64 = rng.gen();
    gd_csma_transition(x, link, draw, params, g)
}

/// Averages over one window of slots.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindowStats {
    pub window_index: usize,
    /// Mean arrivals per slot, `ν'_i`.
    pub nu_hat: Vec<f64>,
    /// Fraction of slots ending with the link transmitting, `s'_i`.
    pub s_hat: Vec<f64>,
    /// Log-fugacities in force during the window.
    pub r_snapshot: Vec<f64>,
}

/// Slots in which every neighbor of a link was silent, and how many of those
/// ended with the link transmitting.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ConditionalCounts {
    pub silent_slots: u64,
    pub transmitting: u64,
}

impl ConditionalCounts {
    pub fn frequency(&self) -> Option<f64> {
        (self.silent_slots > 0).then(|| self.transmitting as f64 / self.silent_slots as f64)
    }
}

/// Updates parameters at window boundaries from the window's local averages.
pub trait RatePolicy {
    fn update(&mut self, window: &WindowStats, r: &mut [f64]);
}

#[derive(Debug, Clone)]
pub struct SimConfig {
    pub horizon: u64,
    pub window_length: u64,
    pub seed: u64,
    pub initial_schedule: Schedule,
    /// Also accumulate conditional counts over the last `tail_window` slots.
    pub tail_window: Option<u64>,
    pub record_history: bool,
}

impl SimConfig {
    pub fn new(horizon: u64, seed: u64) -> Self {
        Self {
            horizon,
            window_length: 100,
            seed,
            initial_schedule: Schedule::EMPTY,
            tail_window: None,
            record_history: false,
        }
    }

    pub fn window_length(mut self, w: u64) -> Self {
        self.window_length = w;
        self
    }

    pub fn tail_window(mut self, w: u64) -> Self {
        self.tail_window = Some(w);
        self
    }

    pub fn record_history(mut self) -> Self {
        self.record_history = true;
        self
    }
}

/// Slotted simulation history.
#[derive(Debug, Clone, Serialize)]
pub struct Trace {
    pub n: usize,
    pub horizon: u64,
    pub window_length: u64,
    pub saturated: bool,
    /// Schedule at the end of every slot, when requested.
    #[serde(skip)]
    pub history: Option<Vec<Schedule>>,
    /// Slots spent in each schedule, in [`ScheduleSpace`] order, when a space
    /// was supplied.
    pub occupancy: Option<Vec<u64>>,
    pub conditional: Vec<ConditionalCounts>,
    pub tail_conditional: Option<Vec<ConditionalCounts>>,
    pub windows: Vec<WindowStats>,
    pub final_schedule: u32,
    pub final_params: LinkParams,
}

impl Trace {
    /// Visit frequencies over the schedule space.
    pub fn occupancy_frequencies(&self) -> Option<Vec<f64>> {
        let occ = self.occupancy.as_ref()?;
        let total = self.horizon.max(1) as f64;
        Some(occ.iter().map(|&c| c as f64 / total).collect())
    }

    /// Per-link service averaged over all completed windows.
    pub fn mean_service(&self) -> Result<Vec<f64>> {
        if self.windows.is_empty() {
            return Err(Error::EmptyTrace);
        }
        let mut acc = vec![0.0; self.n];
        for w in &self.windows {
            for (a, s) in acc.iter_mut().zip(&w.s_hat) {
                *a += s;
            }
        }
        let m = self.windows.len() as f64;
        Ok(acc.into_iter().map(|a| a / m).collect())
    }

    /// Window summary as CSV: `slot_window,link,nu_hat,s_hat,r`.
    pub fn windows_csv(&self) -> String {
        let mut out = String::from("slot_window,link,nu_hat,s_hat,r\n");
        for w in &self.windows {
            for i in 0..self.n {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{}",
                    w.window_index,
                    i,
                    crate::report::fmt_g(w.nu_hat[i]),
                    crate::report::fmt_g(w.s_hat[i]),
                    crate::report::fmt_g(w.r_snapshot[i]),
                );
            }
        }
        out
    }
}

/// Runs the chain for `config.horizon` slots.
///
/// Deterministic in `config.seed`. Arrivals are drawn per link per slot
/// unless saturated; a link counts as served in a slot when it transmits at
/// the slot's end. When `policy` is given it rewrites the log-fugacities
/// at each window boundary.
pub fn simulate(
    g: &InterferenceGraph,
    initial: &LinkParams,
    arrivals: &ArrivalConfig,
    config: &SimConfig,
    mut policy: Option<&mut dyn RatePolicy>,
    space: Option<&ScheduleSpace>,
) -> Result<Trace> {
    let n = g.n();
    initial.check_len(n)?;
    if !arrivals.saturated && arrivals.nu.len() != n {
        return Err(Error::LengthMismatch { expected: n, got: arrivals.nu.len() });
    }
    if config.window_length == 0 {
        return Err(Error::InvalidParameter("window length must be at least 1".into()));
    }
    if !g.is_independent(config.initial_schedule.bits()) {
        return Err(Error::InfeasibleSchedule(config.initial_schedule.bits()));
    }
    if let Some(space) = space {
        if space.graph() != g {
            return Err(Error::InvalidParameter("schedule space belongs to another graph".into()));
        }
    }

    let mut rng: SimRng = rng_from_seed(config.seed);
    let mut params = initial.clone();
    let mut strategies = params.strategies();
    let masks: Vec<u32> = (0..n).map(|i| g.neighbors_mask(i)).collect();

    let mut state = config.initial_schedule.bits();
    let mut occupancy = space.map(|s| vec![0u64; s.len()]);
    let mut run_start = 0u64;
    let mut history = config.record_history.then(|| Vec::with_capacity(config.horizon as usize));
    let mut conditional = vec![ConditionalCounts::default(); n];
    let tail_start = config.tail_window.map(|w| config.horizon.saturating_sub(w));
    let mut tail = config.tail_window.map(|_| vec![ConditionalCounts::default(); n]);

    let mut win_arrivals = vec![0u64; n];
    let mut win_service = vec![0u64; n];
    let mut win_slots = 0u64;
    let mut windows = Vec::new();

    for slot in 0..config.horizon {
        let link = rng.gen_range(0..n);
        let prev = state;
        if state & masks[link] == 0 {
            let draw: f64 = rng.gen();
            if draw < strategies[link] {
                state |= 1 << link;
            } else {
                state &= !(1 << link);
            }
        } else {
            state &= !(1 << link);
        }

        if !arrivals.saturated {
            for (a, &nu) in win_arrivals.iter_mut().zip(&arrivals.nu) {
                if rng.gen::<f64>() < nu {
                    *a += 1;
                }
            }
        }

        if let (Some(occ), Some(space)) = (occupancy.as_mut(), space) {
            if state != prev {
                let idx = space.index_of(Schedule(prev)).expect("chain left the schedule space");
                occ[idx] += slot - run_start;
                run_start = slot;
            }
        }
        if let Some(h) = history.as_mut() {
            h.push(Schedule(state));
        }

        let in_tail = tail_start.is_some_and(|t| slot >= t);
        for i in 0..n {
            let on = (state >> i) & 1;
            win_service[i] += on as u64;
            if state & masks[i] == 0 {
                conditional[i].silent_slots += 1;
                conditional[i].transmitting += on as u64;
                if in_tail {
                    if let Some(t) = tail.as_mut() {
                        t[i].silent_slots += 1;
                        t[i].transmitting += on as u64;
                    }
                }
            }
        }

        win_slots += 1;
        if win_slots == config.window_length {
            let len = win_slots as f64;
            let stats = WindowStats {
                window_index: windows.len(),
                nu_hat: if arrivals.saturated {
                    vec![1.0; n]
                } else {
                    win_arrivals.iter().map(|&a| a as f64 / len).collect()
                },
                s_hat: win_service.iter().map(|&s| s as f64 / len).collect(),
                r_snapshot: params.log_fugacities().to_vec(),
            };
            if let Some(p) = policy.as_deref_mut() {
                p.update(&stats, params.log_fugacities_mut());
                strategies = params.strategies();
            }
            windows.push(stats);
            win_arrivals.iter_mut().for_each(|a| *a = 0);
            win_service.iter_mut().for_each(|s| *s = 0);
            win_slots = 0;
        }
    }

    if let (Some(occ), Some(space)) = (occupancy.as_mut(), space) {
        let idx = space.index_of(Schedule(state)).expect("chain left the schedule space");
        occ[idx] += config.horizon - run_start;
    }

    Ok(Trace {
        n,
        horizon: config.horizon,
        window_length: config.window_length,
        saturated: arrivals.saturated,
        history,
        occupancy,
        conditional,
        tail_conditional: tail,
        windows,
        final_schedule: state,
        final_params: params,
    })
}

/// `|mean_t s'_i − s_i|` per link, averaging the trace's windows.
pub fn mixing_gap(trace: &Trace, exact: &[f64]) -> Result<Vec<f64>> {
    if exact.len() != trace.n {
        return Err(Error::LengthMismatch { expected: trace.n, got: exact.len() });
    }
    let mean = trace.mean_service()?;
    Ok(mean.iter().zip(exact).map(|(m, s)| (m - s).abs()).collect())
}
