//! Executes scenario tasks and writes the result bundle.

use std::fs;
use std::path::Path;

use routing_games::{
    br_dynamics, closed_form_selfish_ne, game, metrics, price_of_anarchy, social_optimum,
    value_of_unilateral_altruism, wardrop_equilibrium, wardrop_price_of_anarchy, DocMatrix,
    DynamicsParams, EquilibriumResult, Error as CoreError, FlowProfile, LbNetwork,
};

use crate::report::{sig12, CsvWriter, KvWriter};
use crate::scenario::{DocSpec, Scenario, SolverKnobs, Task};

/// Command-line overrides for the solver knobs of a scenario file.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub eps_fixed_point: Option<f64>,
    pub eps_equilibrium: Option<f64>,
    pub max_rounds: Option<usize>,
    pub grid_step: Option<f64>,
    pub player_order: Option<Vec<usize>>,
    pub seed: Option<u64>,
}

impl Overrides {
    pub fn apply(&self, scenario: &mut Scenario) {
        let knobs = &mut scenario.solver;
        if let Some(v) = self.eps_fixed_point {
            knobs.eps_fixed_point = v;
        }
        if let Some(v) = self.eps_equilibrium {
            knobs.eps_equilibrium = v;
        }
        if let Some(v) = self.max_rounds {
            knobs.max_rounds = v;
        }
        if let Some(v) = self.grid_step {
            knobs.grid_step = v;
        }
        if let Some(v) = &self.player_order {
            knobs.player_order = Some(v.clone());
        }
        if let Some(v) = self.seed {
            knobs.seed = v;
        }
    }
}

#[derive(Debug)]
pub enum RunError {
    /// Scenario file does not parse or validate; message carries line/field.
    Parse(String),
    /// Network parameters violate the admissible regime.
    Regime(String),
    Io(std::io::Error),
    Other(String),
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Parse(msg) => write!(f, "{msg}"),
            RunError::Regime(msg) => write!(f, "parameter regime violated: {msg}"),
            RunError::Io(e) => write!(f, "io error: {e}"),
            RunError::Other(msg) => write!(f, "{msg}"),
        }
    }
}

impl std::error::Error for RunError {}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Io(e)
    }
}

fn lift(err: CoreError) -> RunError {
    match err {
        CoreError::ParameterRegime(msg) => RunError::Regime(msg),
        other => RunError::Other(other.to_string()),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TaskStatus {
    Ok,
    Failed(String),
}

#[derive(Debug)]
pub struct RunSummary {
    pub statuses: Vec<(Task, TaskStatus)>,
}

impl RunSummary {
    pub fn all_ok(&self) -> bool {
        self.statuses.iter().all(|(_, s)| *s == TaskStatus::Ok)
    }
}

pub fn run_scenario_file(
    path: &Path,
    out_dir: &Path,
    overrides: &Overrides,
) -> Result<RunSummary, RunError> {
    let text = fs::read_to_string(path)
        .map_err(|e| RunError::Parse(format!("cannot read {}: {e}", path.display())))?;
    let mut scenario = Scenario::parse(&text).map_err(RunError::Parse)?;
    overrides.apply(&mut scenario);
    scenario.validate().map_err(RunError::Parse)?;
    run_scenario(&scenario, out_dir)
}

/// Runs every task of the scenario, writing one file per task into
/// `out_dir`. A task that fails (e.g. non-convergence) is marked failed in
/// the bundle while the remaining tasks still run.
pub fn run_scenario(scenario: &Scenario, out_dir: &Path) -> Result<RunSummary, RunError> {
    fs::create_dir_all(out_dir)?;
    // Echo the canonical form of the scenario for reproducibility.
    fs::write(out_dir.join("scenario.toml"), scenario.to_toml())?;

    let mut statuses = Vec::new();
    for &task in &scenario.tasks {
        let status = run_task(scenario, task, out_dir)?;
        statuses.push((task, status));
    }

    let mut run_log = KvWriter::new("run summary");
    for (task, status) in &statuses {
        match status {
            TaskStatus::Ok => run_log.field(task.as_str(), "ok"),
            TaskStatus::Failed(reason) => run_log.field(task.as_str(), format!("failed: {reason}")),
        };
    }
    run_log.write_to(&out_dir.join("run.txt"))?;
    Ok(RunSummary { statuses })
}

fn run_task(scenario: &Scenario, task: Task, out_dir: &Path) -> Result<TaskStatus, RunError> {
    match task {
        Task::Nash => task_nash(scenario, out_dir),
        Task::Trace => task_trace(scenario, out_dir),
        Task::Wardrop => task_wardrop(scenario, out_dir),
        Task::Opt => task_opt(scenario, out_dir),
        Task::Poa => task_poa(scenario, out_dir),
        Task::Vou => task_vou(scenario, out_dir),
        Task::Sweep => task_sweep(scenario, out_dir),
    }
}

fn single_network(scenario: &Scenario) -> Result<LbNetwork, RunError> {
    let mut nets = scenario.networks().map_err(lift)?;
    Ok(nets.remove(0).1)
}

fn dynamics_params(knobs: &SolverKnobs, record_trace: bool) -> DynamicsParams {
    DynamicsParams {
        max_rounds: knobs.max_rounds,
        eps_fixed_point: knobs.eps_fixed_point,
        player_order: knobs.player_order.clone(),
        record_trace,
    }
}

/// Closed form for the selfish game when the network admits it, otherwise
/// best-response dynamics from pure-local routing.
fn solve_equilibrium(
    net: &LbNetwork,
    doc: &DocMatrix,
    knobs: &SolverKnobs,
) -> Result<EquilibriumResult, RunError> {
    if doc.is_selfish() {
        match closed_form_selfish_ne(net) {
            Ok(result) => return Ok(result),
            Err(CoreError::ParameterRegime(_)) => {}
            Err(other) => return Err(lift(other)),
        }
    }
    let start = FlowProfile::pure_local(net);
    let run = br_dynamics(net, doc, &start, &dynamics_params(knobs, false)).map_err(lift)?;
    Ok(run.result)
}

fn write_equilibrium(result: &EquilibriumResult, title: &str, path: &Path) -> Result<(), RunError> {
    let mut out = KvWriter::new(title);
    out.field("method", result.method.as_str())
        .field("converged", result.converged.to_string())
        .field("iterations", result.iterations.to_string());
    let n = result.flows.players();
    for i in 0..n {
        out.float(&format!("local_flow[{i}]"), result.flows.local_flow(i));
    }
    for i in 0..n {
        out.float(&format!("actual_cost[{i}]"), result.actual_costs[i]);
    }
    for i in 0..n {
        out.float(&format!("perceived_cost[{i}]"), result.perceived_costs[i]);
    }
    out.float("total_actual_cost", result.total_actual_cost());
    out.write_to(path)?;
    Ok(())
}

fn task_nash(scenario: &Scenario, out_dir: &Path) -> Result<TaskStatus, RunError> {
    let net = single_network(scenario)?;
    let doc = scenario.doc_matrix().map_err(RunError::Parse)?;
    let result = solve_equilibrium(&net, &doc, &scenario.solver)?;
    write_equilibrium(&result, "nash equilibrium", &out_dir.join("nash.txt"))?;
    if result.converged {
        Ok(TaskStatus::Ok)
    } else {
        Ok(TaskStatus::Failed("solver did not converge".into()))
    }
}

fn task_trace(scenario: &Scenario, out_dir: &Path) -> Result<TaskStatus, RunError> {
    let net = single_network(scenario)?;
    let doc = scenario.doc_matrix().map_err(RunError::Parse)?;
    let start = FlowProfile::pure_local(&net);
    let run = br_dynamics(
        &net,
        &doc,
        &start,
        &dynamics_params(&scenario.solver, true),
    )
    .map_err(lift)?;

    let n = net.players();
    let mut header: Vec<String> = vec!["round".into()];
    header.extend((0..n).map(|i| format!("local_flow_{i}")));
    header.extend((0..n).map(|i| format!("actual_cost_{i}")));
    let header_refs: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
    let mut csv = CsvWriter::new(&header_refs);
    for round in &run.trace {
        let mut cells = vec![round.round.to_string()];
        cells.extend(round.locals.iter().map(|&v| sig12(v)));
        cells.extend(round.costs.iter().map(|&v| sig12(v)));
        csv.row(&cells);
    }
    csv.write_to(&out_dir.join("trace.csv"))?;
    write_equilibrium(&run.result, "dynamics endpoint", &out_dir.join("trace.txt"))?;
    if run.result.converged {
        Ok(TaskStatus::Ok)
    } else {
        Ok(TaskStatus::Failed("dynamics did not converge".into()))
    }
}

fn task_wardrop(scenario: &Scenario, out_dir: &Path) -> Result<TaskStatus, RunError> {
    let net = single_network(scenario)?;
    let outcome = wardrop_equilibrium(&net).map_err(lift)?;
    let mut out = KvWriter::new("wardrop equilibrium");
    let n = net.players();
    for i in 0..n {
        out.float(&format!("local_path_flow[{i}]"), outcome.local_flows[i]);
    }
    for i in 0..n {
        out.floats(&format!("cross_path_flows[{i}]"), &outcome.cross_flows[i]);
    }
    for i in 0..n {
        out.float(&format!("common_latency[{i}]"), outcome.common_latency[i]);
    }
    for i in 0..n {
        out.float(&format!("per_source_cost[{i}]"), outcome.per_source_cost[i]);
    }
    out.float("total_cost", outcome.total_cost)
        .float("potential", outcome.potential)
        .float("poa", wardrop_price_of_anarchy(&net).map_err(lift)?);
    out.write_to(&out_dir.join("wardrop.txt"))?;
    Ok(TaskStatus::Ok)
}

fn task_opt(scenario: &Scenario, out_dir: &Path) -> Result<TaskStatus, RunError> {
    let net = single_network(scenario)?;
    let opt = social_optimum(&net).map_err(lift)?;
    let verifier_starts = 8;
    let verifier_gap =
        routing_games::random_start_descent_gap(&net, verifier_starts, scenario.solver.seed)
            .map_err(lift)?;
    let mut out = KvWriter::new("social optimum");
    out.field("method", opt.method.as_str());
    let n = net.players();
    for i in 0..n {
        out.float(&format!("local_flow[{i}]"), opt.flows.local_flow(i));
    }
    for i in 0..n {
        out.float(&format!("per_player_cost[{i}]"), opt.per_player[i]);
    }
    out.float("total_cost", opt.total_cost)
        .field("flows_unique", opt.flows_unique.to_string())
        .float("descent_gap", opt.descent_gap)
        .field("verifier_starts", verifier_starts.to_string())
        .field("verifier_seed", scenario.solver.seed.to_string())
        .float("verifier_gap", verifier_gap);
    out.write_to(&out_dir.join("opt.txt"))?;
    Ok(TaskStatus::Ok)
}

fn task_poa(scenario: &Scenario, out_dir: &Path) -> Result<TaskStatus, RunError> {
    let net = single_network(scenario)?;
    let report = price_of_anarchy(&net).map_err(lift)?;
    let mut out = KvWriter::new("price of anarchy");
    out.float("worst_ne_total_cost", report.worst_ne_total_cost)
        .float("opt_total_cost", report.opt_total_cost)
        .float("poa", report.poa);
    if let Some(formula) = report.closed_form_poa {
        out.float("closed_form_poa", formula);
    }
    out.write_to(&out_dir.join("poa.txt"))?;
    Ok(TaskStatus::Ok)
}

fn vou_player(scenario: &Scenario) -> usize {
    match &scenario.doc {
        DocSpec::Altruistic { player, .. } => *player,
        _ => 0,
    }
}

fn vou_grid(scenario: &Scenario) -> Vec<f64> {
    match &scenario.doc {
        DocSpec::Altruistic {
            beta_grid: Some(grid),
            ..
        } => grid.clone(),
        _ => metrics::default_beta_grid(scenario.players()),
    }
}

fn task_vou(scenario: &Scenario, out_dir: &Path) -> Result<TaskStatus, RunError> {
    let net = single_network(scenario)?;
    let player = vou_player(scenario);
    let grid = vou_grid(scenario);
    let report = value_of_unilateral_altruism(&net, player, &grid).map_err(lift)?;

    let mut out = KvWriter::new("value of unilateral altruism");
    out.field("player", player.to_string())
        .float("selfish_best_cost", report.selfish_best_cost);
    match report.altruistic_best_cost {
        Some(best) => out.float("altruistic_best_cost", best),
        None => out.field("altruistic_best_cost", "unavailable"),
    };
    match report.vou {
        Some(vou) => out.float("vou", vou),
        None => out.field("vou", "unavailable"),
    };
    if let Some(beta) = report.beta_at_best {
        out.float("beta_at_best", beta);
    }
    if let Some(bound) = report.analytic_lower_bound {
        out.float("analytic_lower_bound", bound);
    }
    out.write_to(&out_dir.join("vou.txt"))?;

    let mut csv = CsvWriter::new(&["beta", "best_cost", "equilibrium_found"]);
    for point in &report.per_beta {
        csv.row(&[
            sig12(point.beta),
            point
                .best_cost
                .map(sig12)
                .unwrap_or_else(|| "".into()),
            point.best_cost.is_some().to_string(),
        ]);
    }
    csv.write_to(&out_dir.join("vou_beta.csv"))?;

    if report.vou.is_some() {
        Ok(TaskStatus::Ok)
    } else {
        Ok(TaskStatus::Failed(
            "no verified equilibrium at any swept beta".into(),
        ))
    }
}

fn task_sweep(scenario: &Scenario, out_dir: &Path) -> Result<TaskStatus, RunError> {
    let (seq, m_from, m_to, players) = scenario
        .sequence()
        .ok_or_else(|| RunError::Parse("the sweep task needs a sequence network".into()))?;
    let player = vou_player(scenario);
    let grid = vou_grid(scenario);

    let mut csv = CsvWriter::new(&["m", "poa", "vou", "zeta_m", "c_m", "delta_m"]);
    for m in m_from..=m_to {
        let net = seq.network(m, players).map_err(lift)?;
        let poa = price_of_anarchy(&net).map_err(lift)?;
        let vou = value_of_unilateral_altruism(&net, player, &grid).map_err(lift)?;
        let zeta = game::zeta(&net).map_err(lift)?;
        csv.row(&[
            m.to_string(),
            sig12(poa.poa),
            vou.vou.map(sig12).unwrap_or_else(|| "".into()),
            sig12(zeta),
            sig12(seq.cross_cost(m)),
            sig12(seq.delta(m)),
        ]);
    }
    csv.write_to(&out_dir.join("sweep.csv"))?;
    Ok(TaskStatus::Ok)
}
