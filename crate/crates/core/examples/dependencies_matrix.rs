//! Closed-form, brute-force and simulated dependencies matrices, their norms
//! and the Dobrushin condition as the transmission strategy grows.

use gdcsma::dependencies::{
    dependencies_matrix_analytic, dependencies_matrix_exact, empirical_dependencies, degree_estimate,
    matrix_norms, row_summary,
};
use gdcsma::dynamics::{simulate, ArrivalConfig, LinkParams, SimConfig};
use gdcsma::graph::GraphSpec;

fn main() -> gdcsma::Result<()> {
    let g = GraphSpec::Star { n: 5 }.build()?;
    let space = g.schedule_space()?;
    let params = LinkParams::uniform_fugacity(5, 1.0)?;
    let analytic = dependencies_matrix_analytic(&g, &params)?;
    let exact = dependencies_matrix_exact(&space, &params)?;
    print!("star(5), λ = 1\n{}", analytic.to_csv());
    println!("exact vs closed form: {:.1e}", exact.max_abs_diff(&analytic));
    let summary = row_summary(&space, &params, None)?;
    println!("d_min {:?}  d_max {:?}", summary.d_min, summary.d_max);
    println!("degree estimate {:?}", degree_estimate(&g, &params)?);

    let trace = simulate(&g, &params, &ArrivalConfig::saturated(5), &SimConfig::new(1_000_000, 7), None, None)?;
    let emp = empirical_dependencies(&trace, &g, false)?;
    println!("empirical vs closed form: {:.4}", emp.max_abs_diff(&analytic));

    println!("\ncirculant(16,6): ‖R‖∞ against U (threshold 1/6)");
    let circ = GraphSpec::Circulant { n: 16, k: 6 }.build()?;
    for u in [0.10, 0.15, 1.0 / 6.0, 0.20, 0.30] {
        let norms = matrix_norms(&dependencies_matrix_analytic(&circ, &LinkParams::uniform_strategy(16, u)?)?);
        println!("U={u:.4}  ‖R‖₁={:.4} ‖R‖∞={:.4} ‖R‖₂={:.4} dobrushin={}", norms.norm1, norms.norm_inf, norms.spectral, norms.dobrushin);
    }
    Ok(())
}
