//! Simulates the chain on a cycle and compares visit frequencies and
//! per-window service with the product-form stationary distribution.

use gdcsma::dependencies::tv_distance;
use gdcsma::dynamics::{
    mixing_gap, service_rates, simulate, stationary_distribution, ArrivalConfig, LinkParams, SimConfig,
};
use gdcsma::graph::GraphSpec;

fn main() -> gdcsma::Result<()> {
    let g = GraphSpec::Cycle { n: 8 }.build()?;
    let space = g.schedule_space()?;
    for lambda in [0.25, 1.0, 4.0] {
        let params = LinkParams::uniform_fugacity(8, lambda)?;
        let pi = stationary_distribution(&space, &params)?;
        let s = service_rates(&pi, &space)?;
        for horizon in [10_000, 100_000, 1_000_000] {
            let config = SimConfig::new(horizon, 42).window_length(1000);
            let trace = simulate(&g, &params, &ArrivalConfig::saturated(8), &config, None, Some(&space))?;
            let tv = tv_distance(&trace.occupancy_frequencies().unwrap(), pi.probs())?;
            let gap = mixing_gap(&trace, &s)?.into_iter().fold(0.0, f64::max);
            println!("λ={lambda:<5} slots={horizon:<8} TV={tv:.5} max|s'−s|={gap:.5}");
        }
        println!("  exact service rate per link: {:.6}", s[0]);
    }
    Ok(())
}
