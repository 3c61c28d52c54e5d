//! Exact primal ascent on F(r; ν) against the maximum-entropy dual.

use gdcsma::optimize::{solve_dual_maxent, solve_prime, verify_duality, ServiceConstraint, SolveOptions};
use gdcsma::graph::GraphSpec;

fn main() -> gdcsma::Result<()> {
    let c6 = GraphSpec::Cycle { n: 6 }.build()?.schedule_space()?;
    let nu = [0.40, 0.10, 0.30, 0.20, 0.35, 0.05];

    let primal = solve_prime(&c6, &nu, &SolveOptions::default().unconstrained().tol(1e-12))?;
    println!("primal: {} iterations, F = {:.10}, r = {:.4?}", primal.iterations, primal.objective, primal.solution);

    let dual = solve_dual_maxent(&c6, &nu, ServiceConstraint::Exactly)?;
    println!("dual: {} sweeps, Σ p log p = {:.10}", dual.sweeps, dual.distribution.neg_entropy());

    for c in [ServiceConstraint::Exactly, ServiceConstraint::AtLeast] {
        let rep = verify_duality(&c6, &nu, c)?;
        println!(
            "{c:?}: gap {:.2e}, product-form error {:.2e}, complementary slackness {:.2e}",
            rep.gap, rep.product_form_error, rep.complementary_slackness
        );
    }
    Ok(())
}
