//! The fixed reproduction suite behind `reproduce-paper`: recomputes every
//! headline quantity of the published load-balancing example family, checks
//! it against the expected value, and lists the known discrepancies between
//! published intermediate values and what honest computation gives.

use std::fs;
use std::path::Path;

use routing_games::{
    br_dynamics, closed_form_selfish_ne, game, grid_oracle_ne, load_taker_profile,
    load_taking_threshold_per_opponent, metrics, price_of_anarchy, value_of_unilateral_altruism,
    verify_equilibrium, wardrop_equilibrium, wardrop_price_of_anarchy, DocMatrix, DynamicsParams,
    FlowProfile, LbNetwork, ParamSequence,
};

use crate::report::{sig12, CsvWriter, KvWriter};

#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub computed: String,
    pub expected: String,
}

#[derive(Debug)]
pub struct ReproReport {
    pub checks: Vec<Check>,
    pub notes: Vec<(String, String)>,
}

impl ReproReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failing(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }
}

struct Suite {
    checks: Vec<Check>,
    notes: Vec<(String, String)>,
}

impl Suite {
    fn check(&mut self, name: &str, pass: bool, computed: String, expected: String) {
        self.checks.push(Check {
            name: name.into(),
            pass,
            computed,
            expected,
        });
    }

    fn close(&mut self, name: &str, computed: f64, expected: f64, tol: f64) {
        self.check(
            name,
            (computed - expected).abs() <= tol,
            sig12(computed),
            format!("{} +/- {tol:e}", sig12(expected)),
        );
    }

    fn note(&mut self, name: &str, text: &str) {
        self.notes.push((name.into(), text.into()));
    }
}

/// Runs the full suite and writes `report.txt`, `trace_cascade.csv`,
/// `family_sweep.csv` and `altruism_beta.csv` into `out_dir`.
pub fn reproduce(out_dir: &Path) -> Result<ReproReport, String> {
    fs::create_dir_all(out_dir).map_err(|e| e.to_string())?;
    let mut suite = Suite {
        checks: Vec::new(),
        notes: Vec::new(),
    };

    cascade_trace(&mut suite, out_dir)?;
    two_user_equilibrium(&mut suite)?;
    family_sweep(&mut suite, out_dir)?;
    nonatomic_family(&mut suite)?;
    altruism_value(&mut suite, out_dir)?;
    load_taking_ranges(&mut suite)?;
    n_player_checks(&mut suite)?;

    suite.note(
        "two_user_prose_ratio",
        "the published narrative calls the two-user inefficiency 'about 50x'; \
         the closed form and the simulation both give 5.95 on the same \
         parameters (per-player cost 0.595 against the optimum 0.1). The \
         computed ratio is reported.",
    );
    suite.note(
        "n_player_altruistic_cost",
        "the published n-player altruistic equilibrium cost is stated as r*L; \
         evaluating the cost at the load-taking flows gives n*r*L (2*r*L in \
         the two-player statement). Costs here are always computed from the \
         flows.",
    );
    suite.note(
        "n_player_symmetric_flow",
        "the published symmetric equilibrium flow is r/2 + zeta for every n; \
         best-response verification accepts r/n + 2*(n-1)*zeta/n instead, \
         which agrees at n = 2. The verified value is reported.",
    );
    suite.note(
        "cooperation_weight_convention",
        "the load-taking range (1/n, 1] holds in the per-opponent cooperation \
         weight; expressed as the total weight committed to others the lower \
         edge sits near (n-1)/n. Both reduce to 1/2 for two players.",
    );

    write_report(&suite, out_dir)?;
    Ok(ReproReport {
        checks: suite.checks,
        notes: suite.notes,
    })
}

fn cascade_trace(suite: &mut Suite, out_dir: &Path) -> Result<(), String> {
    let net = LbNetwork::canonical();
    let doc = DocMatrix::selfish(2);
    let start = FlowProfile::pure_local(&net);
    let params = DynamicsParams {
        record_trace: true,
        ..DynamicsParams::default()
    };
    let run = br_dynamics(&net, &doc, &start, &params).map_err(|e| e.to_string())?;

    let mut csv = CsvWriter::new(&[
        "round",
        "local_flow_0",
        "local_flow_1",
        "actual_cost_0",
        "actual_cost_1",
    ]);
    for round in &run.trace {
        csv.row(&[
            round.round.to_string(),
            sig12(round.locals[0]),
            sig12(round.locals[1]),
            sig12(round.costs[0]),
            sig12(round.costs[1]),
        ]);
    }
    csv.write_to(&out_dir.join("trace_cascade.csv"))
        .map_err(|e| e.to_string())?;

    suite.close("cascade_round0_cost", run.trace[0].costs[0], 0.1, 1e-12);
    suite.close("cascade_first_shed", run.trace[1].locals[0], 0.999, 1e-12);
    suite.close("cascade_first_reply", run.trace[1].locals[1], 0.998, 1e-12);
    let last = run.trace.last().unwrap();
    suite.check(
        "cascade_endpoint_near_half",
        (last.locals[0] - 0.5).abs() < 0.01 && (last.locals[1] - 0.5).abs() < 0.01,
        format!("({}, {})", sig12(last.locals[0]), sig12(last.locals[1])),
        "within 0.01 of (0.5, 0.5)".into(),
    );
    suite.check(
        "cascade_converged",
        run.result.converged,
        run.result.converged.to_string(),
        "true".into(),
    );
    Ok(())
}

fn two_user_equilibrium(suite: &mut Suite) -> Result<(), String> {
    let net = LbNetwork::canonical();
    let doc = DocMatrix::selfish(2);
    let closed = closed_form_selfish_ne(&net).map_err(|e| e.to_string())?;
    suite.close("two_user_flow", closed.flows.local_flow(0), 0.505, 1e-12);
    suite.close("two_user_cost", closed.actual_costs[0], 0.595, 1e-12);
    suite.check(
        "two_user_verified",
        closed.converged,
        closed.converged.to_string(),
        "true".into(),
    );

    let run = br_dynamics(
        &net,
        &doc,
        &FlowProfile::pure_local(&net),
        &DynamicsParams::default(),
    )
    .map_err(|e| e.to_string())?;
    suite.close(
        "two_user_dynamics_gap",
        closed.flows.sup_distance(&run.result.flows),
        0.0,
        1e-6,
    );

    let oracle = grid_oracle_ne(&net, &doc, 1e-3).map_err(|e| e.to_string())?;
    let verified: Vec<_> = oracle.iter().filter(|e| e.converged).collect();
    suite.check(
        "two_user_oracle_unique",
        verified.len() == 1 && (verified[0].flows.local_flow(0) - 0.505).abs() < 1e-12,
        format!("{} verified grid equilibria", verified.len()),
        "exactly one, at (0.505, 0.505)".into(),
    );
    Ok(())
}

fn family_sweep(suite: &mut Suite, out_dir: &Path) -> Result<(), String> {
    let seq = ParamSequence::standard();
    let mut csv = CsvWriter::new(&["m", "poa", "vou", "zeta_m", "c_m", "delta_m"]);
    let grid = metrics::default_beta_grid(2);
    let mut last_poa = 0.0;
    let mut last_vou = 0.0;
    let mut vou_at_2 = 0.0;
    for m in 2..=6 {
        let net = seq.network(m, 2).map_err(|e| e.to_string())?;
        let poa = price_of_anarchy(&net).map_err(|e| e.to_string())?;
        let vou = value_of_unilateral_altruism(&net, 0, &grid).map_err(|e| e.to_string())?;
        let vou_value = vou.vou.ok_or("altruism sweep found no equilibrium")?;
        let zeta = game::zeta(&net).map_err(|e| e.to_string())?;
        csv.row(&[
            m.to_string(),
            sig12(poa.poa),
            sig12(vou_value),
            sig12(zeta),
            sig12(seq.cross_cost(m)),
            sig12(seq.delta(m)),
        ]);
        if m == 2 {
            vou_at_2 = vou_value;
        }
        suite.check(
            &format!("anarchy_ratio_increases_m{m}"),
            poa.poa > last_poa,
            sig12(poa.poa),
            format!("> {}", sig12(last_poa)),
        );
        suite.check(
            &format!("altruism_value_increases_m{m}"),
            vou_value > last_vou,
            sig12(vou_value),
            format!("> {}", sig12(last_vou)),
        );
        last_poa = poa.poa;
        last_vou = vou_value;
    }
    csv.write_to(&out_dir.join("family_sweep.csv"))
        .map_err(|e| e.to_string())?;
    suite.check(
        "anarchy_ratio_exceeds_100_at_m6",
        last_poa > 100.0,
        sig12(last_poa),
        "> 100".into(),
    );
    suite.check(
        "altruism_value_unbounded_trend",
        last_vou > 10.0 * vou_at_2,
        sig12(last_vou),
        format!("> 10 * {}", sig12(vou_at_2)),
    );
    Ok(())
}

fn nonatomic_family(suite: &mut Suite) -> Result<(), String> {
    let seq = ParamSequence::standard();
    for m in 2..=6 {
        let net = seq.network(m, 2).map_err(|e| e.to_string())?;
        let outcome = wardrop_equilibrium(&net).map_err(|e| e.to_string())?;
        let local_only = outcome
            .cross_flows
            .iter()
            .all(|flows| flows.iter().all(|&f| f.abs() < 1e-12));
        suite.check(
            &format!("nonatomic_local_only_m{m}"),
            local_only,
            format!("{:?}", outcome.local_flows),
            "all demand on local paths".into(),
        );
        let ratio = wardrop_price_of_anarchy(&net).map_err(|e| e.to_string())?;
        suite.close(&format!("nonatomic_ratio_m{m}"), ratio, 1.0, 1e-9);
    }
    Ok(())
}

fn altruism_value(suite: &mut Suite, out_dir: &Path) -> Result<(), String> {
    let net = LbNetwork::canonical();
    let grid = metrics::default_beta_grid(2);
    let report = value_of_unilateral_altruism(&net, 0, &grid).map_err(|e| e.to_string())?;

    let mut csv = CsvWriter::new(&["beta", "best_cost", "equilibrium_found"]);
    for point in &report.per_beta {
        csv.row(&[
            sig12(point.beta),
            point.best_cost.map(sig12).unwrap_or_default(),
            point.best_cost.is_some().to_string(),
        ]);
    }
    csv.write_to(&out_dir.join("altruism_beta.csv"))
        .map_err(|e| e.to_string())?;

    suite.close(
        "altruism_best_cost",
        report.altruistic_best_cost.ok_or("no altruistic equilibrium")?,
        0.2,
        1e-12,
    );
    suite.close("altruism_value", report.vou.ok_or("no ratio")?, 2.975, 1e-6);
    suite.close(
        "altruism_lower_bound",
        report.analytic_lower_bound.ok_or("missing bound")?,
        2.975,
        1e-9,
    );

    // Full altruism keeps the load-taking equilibrium.
    let doc = DocMatrix::unilateral(2, 0, 1.0).map_err(|e| e.to_string())?;
    let profile = load_taker_profile(&net, 0).map_err(|e| e.to_string())?;
    let pass = verify_equilibrium(&net, &doc, &profile, 1e-9)
        .map_err(|e| e.to_string())?
        .is_pass();
    suite.check(
        "altruism_full_commitment",
        pass,
        pass.to_string(),
        "true".into(),
    );
    Ok(())
}

fn load_taking_ranges(suite: &mut Suite) -> Result<(), String> {
    let net = LbNetwork::canonical();
    let profile = load_taker_profile(&net, 0).map_err(|e| e.to_string())?;
    for (beta, expect) in [
        (0.1, false),
        (0.4, false),
        (0.49, false),
        (0.51, true),
        (0.75, true),
        (1.0, true),
    ] {
        let doc = DocMatrix::unilateral(2, 0, beta).map_err(|e| e.to_string())?;
        let pass = verify_equilibrium(&net, &doc, &profile, 1e-9)
            .map_err(|e| e.to_string())?
            .is_pass();
        suite.check(
            &format!("load_taking_two_players_beta_{beta}"),
            pass == expect,
            pass.to_string(),
            expect.to_string(),
        );
    }
    let threshold = load_taking_threshold_per_opponent(&net, 0).map_err(|e| e.to_string())?;
    suite.close("load_taking_threshold_two_players", threshold, 0.5, 0.01);
    Ok(())
}

fn n_player_checks(suite: &mut Suite) -> Result<(), String> {
    for n in [3usize, 5] {
        let net = LbNetwork::canonical_with_players(n).map_err(|e| e.to_string())?;
        let closed = closed_form_selfish_ne(&net).map_err(|e| e.to_string())?;
        suite.check(
            &format!("symmetric_equilibrium_verified_n{n}"),
            closed.converged,
            closed.converged.to_string(),
            "true".into(),
        );
        let expected_flow = 1.0 / n as f64 + 2.0 * (n as f64 - 1.0) * 0.005 / n as f64;
        suite.close(
            &format!("symmetric_flow_n{n}"),
            closed.flows.local_flow(0),
            expected_flow,
            1e-12,
        );

        let doc = DocMatrix::selfish(n);
        let run = br_dynamics(
            &net,
            &doc,
            &FlowProfile::pure_local(&net),
            &DynamicsParams::default(),
        )
        .map_err(|e| e.to_string())?;
        suite.close(
            &format!("symmetric_dynamics_gap_n{n}"),
            closed.flows.sup_distance(&run.result.flows),
            0.0,
            1e-6,
        );

        let threshold =
            load_taking_threshold_per_opponent(&net, 0).map_err(|e| e.to_string())?;
        suite.close(
            &format!("load_taking_threshold_n{n}"),
            threshold,
            1.0 / n as f64,
            0.01,
        );

        // Altruist cost at the load-taking equilibrium, computed from flows.
        let profile = load_taker_profile(&net, 0).map_err(|e| e.to_string())?;
        let cost = game::player_cost(&net, &profile, 0).map_err(|e| e.to_string())?;
        suite.close(
            &format!("load_taker_cost_n{n}"),
            cost,
            n as f64 * 0.1,
            1e-12,
        );
    }
    Ok(())
}

fn write_report(suite: &Suite, out_dir: &Path) -> Result<(), String> {
    let mut out = KvWriter::new("reference reproduction report");
    for check in &suite.checks {
        out.field(
            &format!("check {}", check.name),
            format!(
                "{} (computed {}, expected {})",
                if check.pass { "PASS" } else { "FAIL" },
                check.computed,
                check.expected
            ),
        );
    }
    out.blank();
    let failed = suite.checks.iter().filter(|c| !c.pass).count();
    out.field("checks_total", suite.checks.len().to_string());
    out.field("checks_failed", failed.to_string());
    out.blank();
    for (name, text) in &suite.notes {
        out.field(&format!("note {name}"), text.as_str());
    }
    out.write_to(&out_dir.join("report.txt"))
        .map_err(|e| e.to_string())
}
