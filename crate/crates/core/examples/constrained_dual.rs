//! The complexity-constrained dual: objective, auxiliary bound, one update
//! step, and the iterated update on a star and a complete graph.

use gdcsma::graph::GraphSpec;
use gdcsma::optimize::{
    aux_function_a, dual_objective_d, run_dual_iteration, zeta_update, DminMode, DualState, JensenConstant,
};

fn main() -> gdcsma::Result<()> {
    let star = GraphSpec::Star { n: 6 }.build()?.schedule_space()?;
    let nu = [0.05; 6];
    let state = DualState::new(&star, vec![1.0; 6], 0.0, JensenConstant::EmptySchedule, DminMode::Degree)?;
    let d0 = dual_objective_d(&star, &state, &nu)?;
    let delta = [-0.5; 6];
    let moved = DualState::new(&star, vec![0.5; 6], 0.0, JensenConstant::EmptySchedule, DminMode::Degree)?;
    let d1 = dual_objective_d(&star, &moved, &nu)?;
    let a = aux_function_a(&star, &state, &delta, &nu)?;
    println!("star(6): D(ζ) − D(ζ+δ) = {:.6} ≤ A = {a:.6}", d0 - d1);

    let step = zeta_update(&star, &state, &nu)?;
    println!("one update from ζ = 1: ζ' = {:.4?} (corner {:?})", step.zeta, step.corner);

    for spec in [GraphSpec::Star { n: 16 }, GraphSpec::Complete { n: 16 }, GraphSpec::Cycle { n: 16 }] {
        let space = spec.build()?.schedule_space()?;
        let rep = run_dual_iteration(&space, &[0.05; 16], 0.0, 10_000, vec![1.0; 16], JensenConstant::MinVertexCover)?;
        println!(
            "{}: MVC {} vs log2 n {}, {} iterations, ‖ζ‖∞ = {:.4}, agnostic = {}",
            spec.label(),
            rep.mvc,
            rep.log2_n,
            rep.iterations,
            rep.zeta_norms.last().unwrap(),
            rep.service_rate_agnostic
        );
        println!("  {}", rep.interpretation);
    }
    Ok(())
}
