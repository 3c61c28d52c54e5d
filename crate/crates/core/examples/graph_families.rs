//! Structural constants of the six standard interference graphs at n = 16.

use gdcsma::dynamics::symmetric_capacity;
use gdcsma::graph::{jensen_constant, max_independent_set_size, min_vertex_cover_size, GraphSpec};

fn main() -> gdcsma::Result<()> {
    println!("{:<18} {:>6} {:>10} {:>4} {:>4} {:>4} {:>9}", "graph", "edges", "schedules", "mis", "mvc", "C", "sym.cap");
    for spec in GraphSpec::standard_families(16) {
        let g = spec.build()?;
        let space = g.schedule_space()?;
        println!(
            "{:<18} {:>6} {:>10} {:>4} {:>4} {:>4} {:>9.4}",
            spec.label(),
            g.edges().len(),
            space.len(),
            max_independent_set_size(&space),
            min_vertex_cover_size(&space),
            jensen_constant(&space),
            symmetric_capacity(&space)?,
        );
    }
    println!("log2(16) = {}", 16f64.log2());
    Ok(())
}
