//! A reduced scenario sweep written to a directory given on the command
//! line (default `scenario-out`).

use gdcsma::cli::{run_scenario, write_outputs, GraphEntry, ScenarioConfig};

fn main() -> gdcsma::Result<()> {
    let dir = std::env::args().nth(1).unwrap_or_else(|| "scenario-out".into());
    let config = ScenarioConfig {
        scenario: 1,
        graphs: ["star:16", "cycle:16", "circulant:16:6", "complete:16"]
            .iter()
            .map(|s| GraphEntry::Text((*s).into()))
            .collect(),
        horizon: 200_000,
        seed: 11,
        ..ScenarioConfig::default()
    };
    let result = run_scenario(&config, 4)?;
    for row in &result.rows {
        println!(
            "{:<16} U={:.2}  ‖R‖₁ emp {:.4} analytic {:.4}  dobrushin {}",
            row.graph_label, row.sweep_value, row.norm1_emp, row.norm1_analytic, row.dobrushin
        );
    }
    for path in write_outputs(&result, dir.as_ref(), true)? {
        println!("wrote {}", path.display());
    }
    Ok(())
}
