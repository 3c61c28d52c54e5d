//! Capacity-region membership via the time-sharing LP.

use gdcsma::dynamics::{capacity_check, symmetric_capacity};
use gdcsma::graph::GraphSpec;

fn main() -> gdcsma::Result<()> {
    let k16 = GraphSpec::Complete { n: 16 }.build()?.schedule_space()?;
    for nu in [0.05, 1.0 / 16.0, 0.07] {
        let rep = capacity_check(&k16, &[nu; 16])?;
        println!("K16 ν={nu:.4}: feasible={} slack={:+.3e}", rep.feasible, rep.slack);
    }

    let star = GraphSpec::Star { n: 6 }.build()?.schedule_space()?;
    println!("star(6) symmetric capacity {:.4}", symmetric_capacity(&star)?);
    let nu = [0.45, 0.5, 0.5, 0.5, 0.5, 0.5];
    let rep = capacity_check(&star, &nu)?;
    println!("star(6) ν={nu:?}: feasible={} slack={:+.4}", rep.feasible, rep.slack);
    for (x, w) in &rep.witness {
        println!("  schedule {:<14} weight {w:.4}", x.label());
    }
    Ok(())
}
