//! Batch front end behind the `gdcsma` binary.
//!
//! Every command prints its main table to stdout and, with `--out <dir>`,
//! also writes CSV/JSON (and SVG for sweeps with `--svg`) files there.
//! Exit status: 0 on success, 1 on invalid input, 2 when a sweep finished
//! with flagged cells.

mod scenario;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::dependencies::{
    dependencies_matrix_analytic, dependencies_matrix_exact, empirical_dependencies, matrix_norms,
};
use crate::dynamics::{
    capacity_check, service_rates, simulate, stationary_distribution, symmetric_capacity, ArrivalConfig, LinkParams,
    SimConfig,
};
use crate::error::{Error, Result};
use crate::graph::{jensen_constant, max_independent_set_size, min_vertex_cover_size, GraphSpec, InterferenceGraph};
use crate::optimize::{
    dual_objective_d, solve_prime, run_dual_iteration, verify_duality, DminMode, DualState, IterateRecord,
    JensenConstant, LearningRateSchedule, RateDomain, ServiceConstraint, SolveMode, SolveOptions, SolveReport,
};
use crate::report::fmt_g;

pub use scenario::{
    default_arrival_grid, default_strategy_grid, linspace, run_scenario, write_outputs, GraphEntry, ScenarioConfig,
    SweepResult, SweepRow, SWEEP_HEADER,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_FLAGGED: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "gdcsma", version, about = "Glauber-dynamics CSMA analysis toolkit")]
pub struct Cli {
    /// JSON scenario config; command-line flags override its fields.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for sweep cells.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Directory for CSV/JSON/SVG outputs.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Also emit SVG charts for sweeps.
    #[arg(long, global = true)]
    pub svg: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Degrees, schedule count, MIS, MVC and the Jensen constant.
    GraphInfo(GraphArgs),
    /// Stationary distribution and service rates at a uniform fugacity.
    Stationary {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
    },
    /// Dependencies matrix and its norms.
    Depmatrix {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        #[arg(long, value_enum, default_value_t = DepMode::Analytic)]
        mode: DepMode,
        /// Slots simulated in empirical mode.
        #[arg(long, default_value_t = 1_000_000)]
        horizon: u64,
    },
    /// Primal, dual, constrained-dual and auxiliary-update solvers.
    Optimize(OptimizeArgs),
    /// Capacity-region membership of an arrival vector.
    Capacity {
        #[command(flatten)]
        graph: GraphArgs,
        /// One rate for every link, or a comma-separated vector.
        #[arg(long)]
        nu: String,
    },
    /// Parameter sweeps over graph families.
    Scenario(ScenarioArgs),
}

#[derive(Debug, Args)]
pub struct GraphArgs {
    /// `star:16`, `cycle:16`, `circulant:16:6` or `complete:16`.
    pub graph: Option<String>,
    /// Edge-list file: first line `n`, then `i j` per edge.
    #[arg(long, conflicts_with = "graph")]
    pub edges: Option<PathBuf>,
}

impl GraphArgs {
    fn load(&self) -> Result<(String, InterferenceGraph)> {
        match (&self.graph, &self.edges) {
            (Some(spec), None) => {
                let spec: GraphSpec = spec.parse()?;
                Ok((spec.to_string(), spec.build()?))
            }
            (None, Some(path)) => Ok((path.display().to_string(), InterferenceGraph::load_edge_list(path)?)),
            _ => Err(Error::InvalidGraph("give a graph spec or --edges <file>".into())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DepMode {
    Analytic,
    Exact,
    Empirical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Solver {
    Prime,
    Dual,
    Constrained,
    Iterate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PrimeMode {
    Exact,
    Simulated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RateKind {
    Constant,
    Timevar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum JensenArg {
    Mvc,
    Empty,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    /// One rate for every link, or a comma-separated vector.
    #[arg(long)]
    pub nu: String,
    #[arg(long, value_enum, default_value_t = Solver::Prime)]
    pub solver: Solver,
    #[arg(long, value_enum, default_value_t = PrimeMode::Exact)]
    pub mode: PrimeMode,
    #[arg(long, value_enum, default_value_t = RateKind::Constant)]
    pub rate: RateKind,
    #[arg(long, default_value_t = 0.01)]
    pub alpha0: f64,
    /// Equality service constraints with unconstrained log-fugacities.
    #[arg(long)]
    pub equality: bool,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long, default_value_t = 100_000)]
    pub max_iter: usize,
    #[arg(long, default_value_t = 1_000_000)]
    pub horizon: u64,
    #[arg(long, default_value_t = 100)]
    pub window_length: u64,
    #[arg(long, default_value_t = 0.0)]
    pub epsilon: f64,
    /// Initial dual variable on every link.
    #[arg(long, default_value_t = 1.0)]
    pub zeta0: f64,
    #[arg(long, value_enum, default_value_t = JensenArg::Mvc)]
    pub jensen: JensenArg,
}

#[derive(Debug, Args)]
pub struct ScenarioArgs {
    /// 1, 2, 3 or `all`.
    #[arg(long)]
    pub scenario: Option<String>,
    /// Graph specs; defaults to the six standard families.
    #[arg(long = "graph")]
    pub graphs: Vec<String>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub sweep: Option<Vec<f64>>,
    #[arg(long)]
    pub horizon: Option<u64>,
    #[arg(long)]
    pub window_length: Option<u64>,
    #[arg(long)]
    pub alpha0: Option<f64>,
    #[arg(long = "initial-u")]
    pub initial_u: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub tail_window: Option<u64>,
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit status. Tables go to `stdout`, diagnostics to `stderr`.
pub fn run_from_args<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(stderr, "{}", e.render())
            } else {
                write!(stdout, "{}", e.render())
            };
            return code;
        }
    };
    match run(&cli, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_INVALID
        }
    }
}

pub fn run(cli: &Cli, stdout: &mut dyn Write) -> Result<i32> {
    if cli.config.is_some() && !matches!(cli.command, Command::Scenario(_)) {
        return Err(Error::InvalidParameter("--config applies to the scenario command only".into()));
    }
    let mut out = Output { stdout, dir: cli.out.clone() };
    match &cli.command {
        Command::GraphInfo(g) => graph_info(g, &mut out),
        Command::Stationary { graph, lambda } => stationary(graph, *lambda, &mut out),
        Command::Depmatrix { graph, lambda, mode, horizon } => {
            depmatrix(graph, *lambda, *mode, *horizon, cli.seed.unwrap_or(0), &mut out)
        }
        Command::Optimize(args) => optimize(args, cli.seed.unwrap_or(0), &mut out),
        Command::Capacity { graph, nu } => capacity(graph, nu, &mut out),
        Command::Scenario(args) => scenario_cmd(cli, args, &mut out),
    }
}

struct Output<'a> {
    stdout: &'a mut dyn Write,
    dir: Option<PathBuf>,
}

impl Output<'_> {
    fn print(&mut self, text: &str) -> Result<()> {
        self.stdout.write_all(text.as_bytes())?;
        Ok(())
    }

    fn file(&mut self, name: &str, body: &str) -> Result<()> {
        if let Some(dir) = &self.dir {
            std::fs::create_dir_all(dir)?;
            std::fs::write(dir.join(name), body)?;
        }
        Ok(())
    }
}

fn parse_rates(text: &str, n: usize) -> Result<Vec<f64>> {
    let values: Vec<f64> = text
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| Error::InvalidParameter(format!("rate '{t}': {e}"))))
        .collect::<Result<_>>()?;
    match values.len() {
        1 => Ok(vec![values[0]; n]),
        len if len == n => Ok(values),
        len => Err(Error::LengthMismatch { expected: n, got: len }),
    }
}

fn join(values: &[f64]) -> String {
    values.iter().map(|v| fmt_g(*v)).collect::<Vec<_>>().join(" ")
}

fn graph_info(args: &GraphArgs, out: &mut Output) -> Result<i32> {
    let (name, g) = args.load()?;
    let space = g.schedule_space()?;
    let info = serde_json::json!({
        "graph": name,
        "n": g.n(),
        "edges": g.edges().len(),
        "degrees": g.degrees(),
        "schedules": space.len(),
        "mis": max_independent_set_size(&space),
        "mvc": min_vertex_cover_size(&space),
        "jensen_c": jensen_constant(&space),
        "log2_n": (g.n() as f64).log2(),
        "symmetric_capacity": symmetric_capacity(&space)?,
    });
    let mut text = String::new();
    for key in ["graph", "n", "edges", "schedules", "mis", "mvc", "jensen_c", "log2_n", "symmetric_capacity"] {
        let v = &info[key];
        let shown = match v.as_f64() {
            Some(f) if !v.is_u64() => fmt_g(f),
            _ => v.to_string().trim_matches('"').to_string(),
        };
        let _ = writeln!(text, "{key}: {shown}");
    }
    let degrees: Vec<String> = g.degrees().iter().map(|d| d.to_string()).collect();
    let _ = writeln!(text, "degrees: {}", degrees.join(" "));
    out.print(&text)?;
    out.file("graph_info.json", &format!("{:#}\n", info))?;
    Ok(EXIT_OK)
}

fn stationary(args: &GraphArgs, lambda: f64, out: &mut Output) -> Result<i32> {
    let (_, g) = args.load()?;
    let space = g.schedule_space()?;
    let params = LinkParams::uniform_fugacity(g.n(), lambda)?;
    let pi = stationary_distribution(&space, &params)?;
    let s = service_rates(&pi, &space)?;
    let mut dist = String::from("schedule,size,probability\n");
    for (x, p) in space.iter().zip(pi.probs()) {
        let _ = writeln!(dist, "{},{},{}", x.label(), x.size(), fmt_g(*p));
    }
    let mut service = String::from("link,lambda,service_rate\n");
    for (i, si) in s.iter().enumerate() {
        let _ = writeln!(service, "{i},{},{}", fmt_g(lambda), fmt_g(*si));
    }
    out.print(&dist)?;
    out.print("\n")?;
    out.print(&service)?;
    out.file("stationary.csv", &dist)?;
    out.file("service_rates.csv", &service)?;
    Ok(EXIT_OK)
}

fn depmatrix(args: &GraphArgs, lambda: f64, mode: DepMode, horizon: u64, seed: u64, out: &mut Output) -> Result<i32> {
    let (_, g) = args.load()?;
    let params = LinkParams::uniform_fugacity(g.n(), lambda)?;
    let m = match mode {
        DepMode::Analytic => dependencies_matrix_analytic(&g, &params)?,
        DepMode::Exact => dependencies_matrix_exact(&g.schedule_space()?, &params)?,
        DepMode::Empirical => {
            let sim = SimConfig::new(horizon, seed);
            let trace = simulate(&g, &params, &ArrivalConfig::saturated(g.n()), &sim, None, None)?;
            empirical_dependencies(&trace, &g, false)?
        }
    };
    let norms = matrix_norms(&m);
    let csv = m.to_csv();
    out.print(&csv)?;
    let mut text = format!(
        "norm1: {}\nnorm_inf: {}\nspectral: {}\ndobrushin: {}\n",
        fmt_g(norms.norm1),
        fmt_g(norms.norm_inf),
        fmt_g(norms.spectral),
        norms.dobrushin
    );
    let undefined = m.undefined_rows();
    if !undefined.is_empty() {
        let links: Vec<String> = undefined.iter().map(|i| i.to_string()).collect();
        let _ = writeln!(text, "undefined_rows: {}", links.join(" "));
    }
    out.print(&text)?;
    out.file("depmatrix.csv", &csv)?;
    out.file("depmatrix.json", &format!("{:#}\n", m.to_json()))?;
    Ok(if undefined.is_empty() { EXIT_OK } else { EXIT_FLAGGED })
}

fn capacity(args: &GraphArgs, nu: &str, out: &mut Output) -> Result<i32> {
    let (_, g) = args.load()?;
    let space = g.schedule_space()?;
    let nu = parse_rates(nu, g.n())?;
    let rep = capacity_check(&space, &nu)?;
    let mut text = format!("feasible: {}\nslack: {}\n", rep.feasible, fmt_g(rep.slack));
    for (x, w) in &rep.witness {
        let _ = writeln!(text, "witness {}: {}", x.label(), fmt_g(*w));
    }
    if let Some(c) = &rep.certificate {
        let _ = writeln!(text, "certificate: {}", join(c));
    }
    out.print(&text)?;
    out.file("capacity.json", &format!("{:#}\n", serde_json::to_value(&rep).expect("serialisable")))?;
    Ok(EXIT_OK)
}

fn optimize(args: &OptimizeArgs, seed: u64, out: &mut Output) -> Result<i32> {
    let (_, g) = args.graph.load()?;
    let space = g.schedule_space()?;
    let n = g.n();
    let nu = parse_rates(&args.nu, n)?;
    let constraint = if args.equality { ServiceConstraint::Exactly } else { ServiceConstraint::AtLeast };
    match args.solver {
        Solver::Prime => {
            let cap = capacity_check(&space, &nu)?;
            if !cap.feasible {
                return Err(Error::OutsideCapacityRegion { slack: cap.slack });
            }
            let opts = SolveOptions {
                schedule: match args.rate {
                    RateKind::Constant => LearningRateSchedule::Constant { alpha0: args.alpha0 },
                    RateKind::Timevar => LearningRateSchedule::TimeVarying,
                },
                mode: match args.mode {
                    PrimeMode::Exact => SolveMode::Exact,
                    PrimeMode::Simulated => {
                        SolveMode::Simulated { horizon: args.horizon, window_length: args.window_length, seed }
                    }
                },
                domain: if args.equality { RateDomain::Unconstrained } else { RateDomain::NonNegative },
                tol: args.tol,
                max_iter: args.max_iter,
                initial: None,
                record_every: Some(match args.mode {
                    PrimeMode::Exact => 1,
                    PrimeMode::Simulated => 100,
                }),
            };
            let rep = solve_prime(&space, &nu, &opts)?;
            let lambda: Vec<f64> = rep.solution.iter().map(|r| r.exp()).collect();
            let text = format!(
                "solver: prime\nconverged: {}\niterations: {}\nobjective: {}\ngrad_norm: {}\nr: {}\nlambda: {}\n",
                rep.converged,
                rep.iterations,
                fmt_g(rep.objective),
                fmt_g(rep.grad_norm),
                join(&rep.solution),
                join(&lambda)
            );
            out.print(&text)?;
            write_report(out, &rep)?;
            Ok(if rep.converged { EXIT_OK } else { EXIT_FLAGGED })
        }
        Solver::Dual => {
            let rep = verify_duality(&space, &nu, constraint)?;
            let worst = rep.residuals.iter().fold(0.0f64, |a, r| a.max(r.abs()));
            let text = format!(
                "solver: dual\nprimal_value: {}\ndual_value: {}\ngap: {}\nproduct_form_error: {}\nmax_residual: {}\ncomplementary_slackness: {}\nr: {}\n",
                fmt_g(rep.primal_value),
                fmt_g(rep.dual_value),
                fmt_g(rep.gap),
                fmt_g(rep.product_form_error),
                fmt_g(worst),
                fmt_g(rep.complementary_slackness),
                join(&rep.primal_solution)
            );
            out.print(&text)?;
            out.file("duality.json", &format!("{:#}\n", serde_json::to_value(&rep).expect("serialisable")))?;
            Ok(EXIT_OK)
        }
        Solver::Constrained | Solver::Iterate => {
            let jensen = match args.jensen {
                JensenArg::Mvc => JensenConstant::MinVertexCover,
                JensenArg::Empty => JensenConstant::EmptySchedule,
            };
            let run = run_dual_iteration(&space, &nu, args.epsilon, args.max_iter, vec![args.zeta0; n], jensen)?;
            let mut text = String::new();
            if args.solver == Solver::Iterate {
                let _ = write!(
                    text,
                    "solver: iterate\nverdict: {}\niterations: {}\nC: {}\nmvc: {}\nlog2_n: {}\nmvc_within_log2_n: {}\nfinal_zeta_norm: {}\nmonotone_after_burn_in: {}\ninterpretation: {}\n",
                    run.service_rate_agnostic,
                    run.iterations,
                    fmt_g(run.c),
                    run.mvc,
                    fmt_g(run.log2_n),
                    run.mvc_within_log2_n(),
                    fmt_g(*run.zeta_norms.last().expect("initial point")),
                    run.monotone_after_burn_in,
                    run.interpretation
                );
            } else {
                let state = DualState::new(&space, run.final_zeta.clone(), args.epsilon, jensen, DminMode::Degree)?;
                let _ = write!(
                    text,
                    "solver: constrained\niterations: {}\nobjective: {}\nzeta: {}\n",
                    run.iterations,
                    fmt_g(dual_objective_d(&space, &state, &nu)?),
                    join(&run.final_zeta)
                );
            }
            out.print(&text)?;
            let trajectory = run
                .trajectory
                .iter()
                .enumerate()
                .map(|(k, z)| IterateRecord {
                    iter: k,
                    objective: run.objective[k],
                    grad_norm: run.zeta_norms[k],
                    values: z.clone(),
                })
                .collect();
            let rep = SolveReport {
                iterations: run.iterations,
                objective: *run.objective.last().expect("initial point"),
                grad_norm: *run.zeta_norms.last().expect("initial point"),
                converged: run.service_rate_agnostic || run.stalled,
                feasible: None,
                solution: run.final_zeta.clone(),
                trajectory,
                notes: vec![run.interpretation.clone()],
            };
            write_report(out, &rep)?;
            out.file("dual_iteration.json", &format!("{:#}\n", serde_json::to_value(&run).expect("serialisable")))?;
            Ok(EXIT_OK)
        }
    }
}

fn write_report(out: &mut Output, rep: &SolveReport) -> Result<()> {
    out.file("optimize_trajectory.csv", &rep.trajectory_csv())?;
    out.file("optimize_summary.json", &format!("{:#}\n", rep.summary_json()))
}

fn scenario_cmd(cli: &Cli, args: &ScenarioArgs, out: &mut Output) -> Result<i32> {
    let mut config = match &cli.config {
        Some(path) => ScenarioConfig::load(path)?,
        None => ScenarioConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if !args.graphs.is_empty() {
        config.graphs = args.graphs.iter().cloned().map(GraphEntry::Text).collect();
    }
    if let Some(n) = args.n {
        config.n = n;
    }
    if let Some(sweep) = &args.sweep {
        config.sweep = sweep.clone();
    }
    macro_rules! set {
        ($($field:ident),*) => { $(if let Some(v) = args.$field { config.$field = v; })* };
    }
    set!(horizon, window_length, alpha0, initial_u, epsilon, tail_window);
    if let Some(dir) = &cli.out {
        config.out_dir = Some(dir.clone());
    }
    config.svg |= cli.svg;
    let scenarios: Vec<u8> = match args.scenario.as_deref() {
        None => vec![config.scenario],
        Some("all") => vec![1, 2, 3],
        Some(s) => vec![s
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("scenario must be 1, 2, 3 or all, got '{s}'")))?],
    };
    let jobs = cli.jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let mut flagged = false;
    for s in scenarios {
        let cfg = ScenarioConfig { scenario: s, ..config.clone() };
        let result = run_scenario(&cfg, jobs)?;
        out.print(&result.csv())?;
        if let Some(dir) = cfg.out_dir.as_deref() {
            write_outputs(&result, dir, cfg.svg)?;
        }
        flagged |= result.has_flags();
    }
    Ok(if flagged { EXIT_FLAGGED } else { EXIT_OK })
}

/// Entry point used by the binary.
pub fn main() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_from_args(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}
