//! The GD-CSMA Markov chain: slotted simulation, exact stationary analysis
//! over the schedule space, mixing diagnostics and capacity-region checks.

mod capacity;
mod params;
mod simulate;
mod stationary;

pub use capacity::{capacity_check, symmetric_capacity, CapacityReport, CAPACITY_SLACK_TOL};
pub use params::{check_rates, ArrivalConfig, LinkParams};
pub use simulate::{
    gd_csma_step, gd_csma_transition, mixing_gap, simulate, ConditionalCounts, RatePolicy,
    SimConfig, Trace, WindowStats,
};
pub use stationary::{
    log_partition, service_rates, stationary_distribution, transition_probability,
    DistributionOverSchedules,
};

pub(crate) use stationary::{linear_form, log_sum_exp};
