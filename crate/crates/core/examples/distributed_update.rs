//! The window-based gradient update running inside the simulated chain,
//! with the constant and the time-varying step sizes.

use gdcsma::dynamics::service_rates;
use gdcsma::dynamics::DistributionOverSchedules;
use gdcsma::graph::GraphSpec;
use gdcsma::optimize::{solve_prime, LearningRateSchedule, SolveMode, SolveOptions};

fn main() -> gdcsma::Result<()> {
    let space = GraphSpec::Circulant { n: 10, k: 4 }.build()?.schedule_space()?;
    let nu = vec![0.15; 10];
    for schedule in [LearningRateSchedule::Constant { alpha0: 0.01 }, LearningRateSchedule::TimeVarying] {
        let opts = SolveOptions {
            schedule,
            mode: SolveMode::Simulated { horizon: 2_000_000, window_length: 100, seed: 1 },
            ..SolveOptions::default()
        }
        .record_every(5000);
        let rep = solve_prime(&space, &nu, &opts)?;
        let s = service_rates(&DistributionOverSchedules::gibbs(&space, &rep.solution), &space)?;
        println!("{schedule:?}: {} windows, projected gradient {:.4}", rep.iterations, rep.grad_norm);
        println!("  r = {:.3?}", rep.solution);
        println!("  service at final r = {:.4?}", s);
    }
    Ok(())
}
