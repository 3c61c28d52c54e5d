use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dependencies::{dependencies_matrix_analytic, empirical_dependencies, matrix_norms, DependenciesMatrix};
use crate::dynamics::{capacity_check, simulate, symmetric_capacity, ArrivalConfig, LinkParams, SimConfig, Trace};
use crate::error::{Error, Result};
use crate::graph::{GraphSpec, InterferenceGraph};
use crate::optimize::{GradientPolicy, LearningRateSchedule};
use crate::report::{fmt_g, svg_line_chart, Series};
use crate::rng::cell_seed;

/// Graph entry in a config: either a spec string such as `"circulant:16:6"`
/// or the tagged object form `{"family": "star", "n": 16}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GraphEntry {
    Text(String),
    Spec(GraphSpec),
}

impl GraphEntry {
    pub fn resolve(&self) -> Result<GraphSpec> {
        match self {
            Self::Text(s) => s.parse(),
            Self::Spec(g) => Ok(g.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    /// 1: saturated links at a fixed strategy `U`; 2: Bernoulli arrivals with
    /// the constant-rate update; 3: the same with the time-varying rate.
    pub scenario: u8,
    /// Empty means the standard six families at `n` links.
    pub graphs: Vec<GraphEntry>,
    pub n: usize,
    /// `U` values (scenario 1) or uniform arrival rates (scenarios 2 and 3).
    /// Empty selects the default grid.
    pub sweep: Vec<f64>,
    pub horizon: u64,
    pub window_length: u64,
    pub alpha0: f64,
    #[serde(rename = "initial_U")]
    pub initial_u: f64,
    pub seed: u64,
    pub epsilon: f64,
    /// Length of the tail window reported separately in scenarios 2 and 3.
    pub tail_window: u64,
    pub out_dir: Option<PathBuf>,
    pub svg: bool,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            scenario: 1,
            graphs: Vec::new(),
            n: 16,
            sweep: Vec::new(),
            horizon: 1_000_000,
            window_length: 100,
            alpha0: 0.01,
            initial_u: 0.5,
            seed: 0,
            epsilon: 0.0,
            tail_window: 100_000,
            out_dir: None,
            svg: false,
        }
    }
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse { line: e.line(), msg: e.to_string() })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn graph_specs(&self) -> Result<Vec<GraphSpec>> {
        if self.graphs.is_empty() {
            return Ok(GraphSpec::standard_families(self.n));
        }
        self.graphs.iter().map(GraphEntry::resolve).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=3).contains(&self.scenario) {
            return Err(Error::InvalidParameter(format!("scenario must be 1, 2 or 3, got {}", self.scenario)));
        }
        if let Some(v) = self.sweep.iter().find(|v| !(**v > 0.0 && **v < 1.0)) {
            return Err(Error::InvalidParameter(format!("sweep values must lie in (0,1), got {v}")));
        }
        if self.window_length == 0 {
            return Err(Error::InvalidParameter("window_length must be at least 1".into()));
        }
        if !(self.initial_u > 0.0 && self.initial_u < 1.0) {
            return Err(Error::InvalidParameter(format!("initial_U must lie in (0,1), got {}", self.initial_u)));
        }
        if !(self.alpha0 > 0.0) {
            return Err(Error::InvalidParameter(format!("alpha0 must be positive, got {}", self.alpha0)));
        }
        if !(0.0..1.0).contains(&self.epsilon) {
            return Err(Error::InvalidParameter(format!("epsilon must lie in [0,1), got {}", self.epsilon)));
        }
        self.graph_specs()?.iter().try_for_each(|g| g.build().map(|_| ()))
    }

    pub fn sweep_param(&self) -> &'static str {
        if self.scenario == 1 {
            "U"
        } else {
            "nu"
        }
    }
}

/// `count` evenly spaced points on `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..count).map(|k| lo + (hi - lo) * k as f64 / (count - 1) as f64).collect(),
    }
}

/// Default `U` grid for scenario 1.
pub fn default_strategy_grid() -> Vec<f64> {
    linspace(0.05, 0.95, 10)
}

/// Default arrival grid for scenarios 2 and 3: ten points from 0.01 to 90%
/// of the graph's symmetric capacity.
pub fn default_arrival_grid(g: &InterferenceGraph) -> Result<Vec<f64>> {
    let cap = symmetric_capacity(&g.schedule_space()?)?;
    Ok(linspace(0.01, 0.9 * cap, 10))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub scenario: u8,
    pub graph: String,
    /// Label that tells apart graphs of one family, e.g. `circulant(16,6)`.
    pub graph_label: String,
    pub n: usize,
    pub k: Option<usize>,
    pub sweep_param: String,
    pub sweep_value: f64,
    pub norm1_emp: f64,
    pub norminf_emp: f64,
    pub spectral_emp: f64,
    pub norm1_analytic: f64,
    /// Analytic `‖R‖_∞ < 1`.
    pub dobrushin: bool,
    pub flags: Vec<String>,
}

pub const SWEEP_HEADER: &str =
    "scenario,graph,n,k,sweep_param,sweep_value,norm1_emp,norminf_emp,spectral_emp,norm1_analytic,dobrushin,flags";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub scenario: u8,
    pub rows: Vec<SweepRow>,
    /// Same cells estimated over the tail window only (scenarios 2 and 3).
    pub tail_rows: Option<Vec<SweepRow>>,
    pub graph_labels: Vec<String>,
}

impl SweepResult {
    pub fn has_flags(&self) -> bool {
        self.rows.iter().chain(self.tail_rows.iter().flatten()).any(|r| !r.flags.is_empty())
    }

    pub fn csv(&self) -> String {
        rows_csv(&self.rows)
    }

    pub fn tail_csv(&self) -> Option<String> {
        self.tail_rows.as_deref().map(rows_csv)
    }

    /// Norm-1 against the sweep value, one series per graph; `analytic`
    /// selects the closed-form column.
    pub fn svg(&self, analytic: bool) -> String {
        let series: Vec<Series> = self
            .graph_labels
            .iter()
            .map(|label| Series {
                name: label.clone(),
                points: self
                    .rows
                    .iter()
                    .filter(|r| &r.graph_label == label)
                    .map(|r| (r.sweep_value, if analytic { r.norm1_analytic } else { r.norm1_emp }))
                    .collect(),
            })
            .collect();
        let param = self.rows.first().map_or("U", |r| r.sweep_param.as_str());
        let which = if analytic { "analytic" } else { "empirical" };
        svg_line_chart(
            &format!("Scenario {}: {which} norm-1 of R", self.scenario),
            param,
            "||R||_1",
            &series,
            Some(1.0),
        )
    }
}

fn rows_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            r.scenario,
            r.graph,
            r.n,
            r.k.map(|k| k.to_string()).unwrap_or_default(),
            r.sweep_param,
            fmt_g(r.sweep_value),
            fmt_g(r.norm1_emp),
            fmt_g(r.norminf_emp),
            fmt_g(r.spectral_emp),
            fmt_g(r.norm1_analytic),
            r.dobrushin,
            r.flags.join(";").replace([',', '\n'], " ")
        );
    }
    out
}

struct Cell {
    gi: usize,
    si: usize,
    spec: GraphSpec,
    graph: InterferenceGraph,
    value: f64,
}

/// Runs every `(graph, sweep value)` cell of a scenario on up to `jobs`
/// threads. Rows come back in graph-major order regardless of `jobs`, and
/// each cell draws from its own stream, so output does not depend on
/// scheduling.
pub fn run_scenario(config: &ScenarioConfig, jobs: usize) -> Result<SweepResult> {
    config.validate()?;
    let specs = config.graph_specs()?;
    let mut cells = Vec::new();
    for (gi, spec) in specs.iter().enumerate() {
        let graph = spec.build()?;
        let grid = if !config.sweep.is_empty() {
            config.sweep.clone()
        } else if config.scenario == 1 {
            default_strategy_grid()
        } else {
            default_arrival_grid(&graph)?
        };
        for (si, value) in grid.into_iter().enumerate() {
            cells.push(Cell { gi, si, spec: spec.clone(), graph: graph.clone(), value });
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    let results: Vec<(SweepRow, Option<SweepRow>)> =
        pool.install(|| cells.par_iter().map(|c| run_cell(config, c)).collect());
    let (rows, tails): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    let tail_rows = (config.scenario != 1).then(|| tails.into_iter().flatten().collect());
    Ok(SweepResult {
        scenario: config.scenario,
        rows,
        tail_rows,
        graph_labels: specs.iter().map(GraphSpec::label).collect(),
    })
}

fn run_cell(config: &ScenarioConfig, cell: &Cell) -> (SweepRow, Option<SweepRow>) {
    let mut flags = Vec::new();
    let seed = cell_seed(config.seed, &[config.scenario as u64, cell.gi as u64, cell.si as u64]);
    let n = cell.graph.n();
    let base = SweepRow {
        scenario: config.scenario,
        graph: cell.spec.family().to_string(),
        graph_label: cell.spec.label(),
        n,
        k: cell.spec.k(),
        sweep_param: config.sweep_param().to_string(),
        sweep_value: cell.value,
        norm1_emp: f64::NAN,
        norminf_emp: f64::NAN,
        spectral_emp: f64::NAN,
        norm1_analytic: f64::NAN,
        dobrushin: false,
        flags: Vec::new(),
    };
    let outcome = if config.scenario == 1 {
        strategy_cell(config, cell, seed)
    } else {
        arrival_cell(config, cell, seed, &mut flags)
    };
    match outcome {
        Ok((trace, analytic)) => {
            let analytic_norms = matrix_norms(&analytic);
            let row_for = |tail: bool, flags: &[String]| {
                let mut row = SweepRow {
                    norm1_analytic: analytic_norms.norm1,
                    dobrushin: analytic_norms.dobrushin,
                    flags: flags.to_vec(),
                    ..base.clone()
                };
                match empirical_dependencies(&trace, &cell.graph, tail) {
                    Ok(emp) => fill_empirical(&mut row, &emp),
                    Err(e) => row.flags.push(format!("estimator_error:{e}")),
                }
                row
            };
            let main = row_for(false, &flags);
            let tail = (config.scenario != 1).then(|| row_for(true, &flags));
            (main, tail)
        }
        Err(e) => {
            flags.push(format!("cell_error:{e}"));
            let row = SweepRow { flags, ..base };
            let tail = (config.scenario != 1).then(|| row.clone());
            (row, tail)
        }
    }
}

fn fill_empirical(row: &mut SweepRow, emp: &DependenciesMatrix) {
    let norms = matrix_norms(emp);
    row.norm1_emp = norms.norm1;
    row.norminf_emp = norms.norm_inf;
    row.spectral_emp = norms.spectral;
    let undefined = emp.undefined_rows();
    if !undefined.is_empty() {
        let links: Vec<String> = undefined.iter().map(|i| i.to_string()).collect();
        row.flags.push(format!("undefined_rows:{}", links.join("|")));
    }
}

fn strategy_cell(config: &ScenarioConfig, cell: &Cell, seed: u64) -> Result<(Trace, DependenciesMatrix)> {
    let n = cell.graph.n();
    let params = LinkParams::uniform_strategy(n, cell.value)?;
    let sim = SimConfig::new(config.horizon, seed).window_length(config.window_length);
    let trace = simulate(&cell.graph, &params, &ArrivalConfig::saturated(n), &sim, None, None)?;
    let analytic = dependencies_matrix_analytic(&cell.graph, &params)?;
    Ok((trace, analytic))
}

fn arrival_cell(
    config: &ScenarioConfig,
    cell: &Cell,
    seed: u64,
    flags: &mut Vec<String>,
) -> Result<(Trace, DependenciesMatrix)> {
    let n = cell.graph.n();
    let nu = vec![cell.value; n];
    if !capacity_check(&cell.graph.schedule_space()?, &nu)?.feasible {
        flags.push("outside_capacity".into());
    }
    let schedule = if config.scenario == 2 {
        LearningRateSchedule::Constant { alpha0: config.alpha0 }
    } else {
        LearningRateSchedule::TimeVarying
    };
    let mut policy = GradientPolicy::new(schedule);
    let initial = LinkParams::uniform_strategy(n, config.initial_u)?;
    // The update keeps log-fugacities nonnegative, so start inside that set.
    let initial = LinkParams::from_log_fugacities(initial.log_fugacities().iter().map(|r| r.max(0.0)).collect())?;
    let sim = SimConfig::new(config.horizon, seed)
        .window_length(config.window_length)
        .tail_window(config.tail_window);
    let trace = simulate(&cell.graph, &initial, &ArrivalConfig::bernoulli(nu)?, &sim, Some(&mut policy), None)?;
    let analytic = dependencies_matrix_analytic(&cell.graph, &trace.final_params)?;
    Ok((trace, analytic))
}

/// Writes `scenario<N>.csv`, the tail CSV and, when requested, the SVG charts
/// into `dir`. Returns the written paths.
pub fn write_outputs(result: &SweepResult, dir: &Path, svg: bool) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let stem = format!("scenario{}", result.scenario);
    let mut put = |name: String, body: String| -> Result<()> {
        let path = dir.join(name);
        std::fs::write(&path, body)?;
        written.push(path);
        Ok(())
    };
    put(format!("{stem}.csv"), result.csv())?;
    if let Some(tail) = result.tail_csv() {
        put(format!("{stem}_tail.csv"), tail)?;
    }
    if svg {
        put(format!("{stem}_norm1_empirical.svg"), result.svg(false))?;
        put(format!("{stem}_norm1_analytic.svg"), result.svg(true))?;
    }
    Ok(written)
}
