//! Acceptance suite: one test per release criterion, each printing a
//! pass/fail line with its computed values and enforcing its runtime budget.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::time::{Duration, Instant};

use routing_games::{
    br_dynamics, closed_form_selfish_ne, game, grid_oracle_ne, load_taker_profile,
    load_taking_threshold_per_opponent, metrics, price_of_anarchy, social_optimum,
    value_of_unilateral_altruism, verify_equilibrium, wardrop_equilibrium,
    wardrop_price_of_anarchy, DocMatrix, DynamicsParams, FlowProfile, LatencyFn, LbNetwork,
    ParamSequence,
};
use routing_games_cli::reproduction;

fn finish(criterion: &str, budget: Duration, started: Instant, detail: String) {
    let elapsed = started.elapsed();
    println!(
        "acceptance {criterion}: PASS in {:.1} ms — {detail}",
        elapsed.as_secs_f64() * 1e3
    );
    assert!(
        elapsed <= budget,
        "{criterion} exceeded its runtime budget: {elapsed:?} > {budget:?}"
    );
}

/// Criterion 1: the closed form gives local flow 0.505 and per-player cost
/// 0.595 on the canonical network; dynamics from pure-local agree within
/// 1e-6; verification passes at 1e-9. Under 1 s.
#[test]
fn criterion_1_closed_form_equilibrium() {
    let started = Instant::now();
    let net = LbNetwork::canonical();
    let doc = DocMatrix::selfish(2);

    let closed = closed_form_selfish_ne(&net).unwrap();
    for i in 0..2 {
        assert!((closed.flows.local_flow(i) - 0.505).abs() < 1e-12);
        assert!((closed.actual_costs[i] - 0.595).abs() < 1e-12);
    }
    let run = br_dynamics(
        &net,
        &doc,
        &FlowProfile::pure_local(&net),
        &DynamicsParams::default(),
    )
    .unwrap();
    assert!(run.result.converged);
    let gap = closed.flows.sup_distance(&run.result.flows);
    assert!(gap < 1e-6, "dynamics gap {gap}");
    assert!(verify_equilibrium(&net, &doc, &closed.flows, 1e-9).unwrap().is_pass());
    assert!(verify_equilibrium(&net, &doc, &run.result.flows, 1e-9).unwrap().is_pass());

    finish(
        "criterion 1 (closed-form equilibrium)",
        Duration::from_secs(1),
        started,
        format!(
            "flow 0.505, cost 0.595, dynamics gap {gap:.2e} over {} rounds",
            run.result.iterations
        ),
    );
}

/// Criterion 2: the anarchy ratio is 5.95 on the canonical network with
/// formula/simulation agreement below 1e-9, strictly increases over the
/// indexed family m = 2..6 and exceeds 100 by m = 6. Under 5 s.
#[test]
fn criterion_2_anarchy_ratio_formula_vs_simulation() {
    let started = Instant::now();
    let canonical = price_of_anarchy(&LbNetwork::canonical()).unwrap();
    assert!((canonical.poa - 5.95).abs() < 1e-9, "poa {}", canonical.poa);
    assert!((canonical.poa - canonical.closed_form_poa.unwrap()).abs() < 1e-9);

    let seq = ParamSequence::standard();
    let mut values = Vec::new();
    for m in 2..=6 {
        let report = price_of_anarchy(&seq.network(m, 2).unwrap()).unwrap();
        assert!((report.poa - report.closed_form_poa.unwrap()).abs() < 1e-9);
        values.push(report.poa);
    }
    assert!(values.windows(2).all(|w| w[1] > w[0]), "not increasing: {values:?}");
    assert!(values[4] > 100.0, "m = 6 ratio {} too small", values[4]);

    finish(
        "criterion 2 (anarchy ratio)",
        Duration::from_secs(5),
        started,
        format!("canonical 5.95; family {values:?}"),
    );
}

/// Criterion 3: the non-atomic equilibrium keeps all demand on local paths
/// for every swept index, with ratio 1 within 1e-9. Under 1 s.
#[test]
fn criterion_3_nonatomic_efficiency() {
    let started = Instant::now();
    let seq = ParamSequence::standard();
    let mut nets = vec![LbNetwork::canonical()];
    for m in 2..=6 {
        nets.push(seq.network(m, 2).unwrap());
    }
    for net in &nets {
        let outcome = wardrop_equilibrium(net).unwrap();
        for flows in &outcome.cross_flows {
            for &f in flows {
                assert!(f.abs() < 1e-12, "cross path carries {f}");
            }
        }
        let ratio = wardrop_price_of_anarchy(net).unwrap();
        assert!((ratio - 1.0).abs() <= 1e-9, "ratio {ratio}");
    }
    finish(
        "criterion 3 (non-atomic efficiency)",
        Duration::from_secs(1),
        started,
        format!("{} networks, all local-only with ratio 1", nets.len()),
    );
}

/// Criterion 4: the load-taking pair is an equilibrium exactly for strong
/// enough commitments. Two players: passes at beta 0.51/0.75/1.0, fails at
/// 0.1/0.4/0.49. Three players: the per-opponent weight threshold moves to
/// 1/3 (within 0.01), checked on both sides. Under 5 s.
#[test]
fn criterion_4_altruistic_equilibrium_and_gamma_set() {
    let started = Instant::now();
    let net = LbNetwork::canonical();
    let profile = load_taker_profile(&net, 0).unwrap();
    for (beta, expect) in [
        (0.51, true),
        (0.75, true),
        (1.0, true),
        (0.1, false),
        (0.4, false),
        (0.49, false),
    ] {
        let doc = DocMatrix::unilateral(2, 0, beta).unwrap();
        let pass = verify_equilibrium(&net, &doc, &profile, 1e-9).unwrap().is_pass();
        assert_eq!(pass, expect, "two players at beta = {beta}");
    }

    let net3 = LbNetwork::canonical_with_players(3).unwrap();
    let profile3 = load_taker_profile(&net3, 0).unwrap();
    let third = 1.0 / 3.0;
    let threshold = load_taking_threshold_per_opponent(&net3, 0).unwrap();
    assert!(
        (threshold - third).abs() < 0.01,
        "three-player threshold {threshold} vs 1/3"
    );
    for (weight, expect) in [
        (third + 0.02, true),
        (0.45, true),
        (0.5, true),
        (third - 0.02, false),
        (0.2, false),
        (0.1, false),
    ] {
        let doc = DocMatrix::unilateral_per_opponent(3, 0, weight).unwrap();
        let pass = verify_equilibrium(&net3, &doc, &profile3, 1e-9).unwrap().is_pass();
        assert_eq!(pass, expect, "three players at weight = {weight}");
    }

    finish(
        "criterion 4 (altruistic equilibrium and gamma set)",
        Duration::from_secs(5),
        started,
        format!("two-player split at 1/2; three-player threshold {threshold:.6} vs 1/3"),
    );
}

/// Criterion 5: the altruism value is 2.975 with best altruistic cost
/// 0.2 = 2 r L on the canonical network, and strictly increases along the
/// family with at least a tenfold gain from m = 2 to m = 6. Under 10 s.
#[test]
fn criterion_5_altruism_value() {
    let started = Instant::now();
    let grid = metrics::default_beta_grid(2);

    let report = value_of_unilateral_altruism(&LbNetwork::canonical(), 0, &grid).unwrap();
    let best = report.altruistic_best_cost.unwrap();
    assert!((best - 0.2).abs() < 1e-12, "best altruistic cost {best}");
    let vou = report.vou.unwrap();
    assert!((vou - 2.975).abs() <= 1e-6, "canonical ratio {vou}");

    let seq = ParamSequence::standard();
    let mut values = Vec::new();
    for m in 2..=6 {
        let report =
            value_of_unilateral_altruism(&seq.network(m, 2).unwrap(), 0, &grid).unwrap();
        values.push(report.vou.unwrap());
    }
    assert!(values.windows(2).all(|w| w[1] > w[0]), "not increasing: {values:?}");
    assert!(
        values[4] > 10.0 * values[0],
        "m = 6 value {} not 10x the m = 2 value {}",
        values[4],
        values[0]
    );

    finish(
        "criterion 5 (altruism value)",
        Duration::from_secs(10),
        started,
        format!("canonical 2.975 at cost 0.2; family {values:?}"),
    );
}

/// Criterion 6: the brute-force oracle on the 1e-3 grid localizes the
/// selfish equilibrium to one verified profile at (0.505, 0.505) with every
/// raw survivor within one grid step, and recovers (1, 0.999) for the
/// committed altruist. Under 30 s.
#[test]
fn criterion_6_oracle_equivalence() {
    let started = Instant::now();
    let net = LbNetwork::canonical();

    let selfish = grid_oracle_ne(&net, &DocMatrix::selfish(2), 1e-3).unwrap();
    for e in &selfish {
        for i in 0..2 {
            assert!(
                (e.flows.local_flow(i) - 0.505).abs() <= 1e-3 + 1e-12,
                "stray survivor {:?}",
                e.flows.local_flows()
            );
        }
    }
    let verified: Vec<_> = selfish.iter().filter(|e| e.converged).collect();
    assert_eq!(verified.len(), 1, "verified survivors: {}", verified.len());
    assert!((verified[0].flows.local_flow(0) - 0.505).abs() < 1e-12);
    assert!((verified[0].flows.local_flow(1) - 0.505).abs() < 1e-12);

    let altruistic =
        grid_oracle_ne(&net, &DocMatrix::unilateral(2, 0, 0.75).unwrap(), 1e-3).unwrap();
    assert!(
        altruistic.iter().any(|e| e.converged
            && (e.flows.local_flow(0) - 1.0).abs() < 1e-12
            && (e.flows.local_flow(1) - 0.999).abs() < 1e-12),
        "(1, 0.999) missing from the altruistic oracle set"
    );

    finish(
        "criterion 6 (oracle equivalence)",
        Duration::from_secs(30),
        started,
        format!(
            "{} raw / 1 verified selfish survivors; altruistic set recovers (1, 0.999)",
            selfish.len()
        ),
    );
}

/// Small deterministic generator so the property battery needs no RNG crate.
struct Lcg(u64);

impl Lcg {
    fn next_u64(&mut self) -> u64 {
        // splitmix64
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        let u = self.next_u64() as f64 / u64::MAX as f64;
        lo + u * (hi - lo)
    }
}

/// Criterion 7: the property batteries. Latency monotonicity and convexity
/// over 1000 random parameter draws, perceived-cost linearity over 500,
/// interior best-response stationarity over 200 cases at 1e-10, the
/// variational-inequality check on every scenario network, and the
/// social-optimum lower bound on every verified equilibrium. Under 60 s.
#[test]
fn criterion_7_property_suites() {
    let started = Instant::now();
    let mut rng = Lcg(42);

    // Latency monotonicity and convexity, 1000 cases.
    for _ in 0..1000 {
        let latency = if rng.next_u64().is_multiple_of(2) {
            LatencyFn::affine(rng.uniform(0.0, 5.0), rng.uniform(0.0, 5.0)).unwrap()
        } else {
            LatencyFn::elbow(
                rng.uniform(1e-3, 2.0),
                rng.uniform(1e-4, 0.5),
                rng.uniform(0.1, 3.0),
                rng.uniform(0.0, 1.0),
            )
            .unwrap()
        };
        let a = rng.uniform(0.0, 6.0);
        let b = rng.uniform(0.0, 6.0);
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        assert!(latency.eval(lo).unwrap() <= latency.eval(hi).unwrap() + 1e-12);
        let lambda = rng.uniform(0.0, 1.0);
        let mid = lambda * lo + (1.0 - lambda) * hi;
        let chord = lambda * latency.eval(lo).unwrap() + (1.0 - lambda) * latency.eval(hi).unwrap();
        assert!(latency.eval(mid).unwrap() <= chord + 1e-12);
    }

    // Perceived-cost linearity, 500 cases on the three-player network.
    let net3 = LbNetwork::canonical_with_players(3).unwrap();
    for _ in 0..500 {
        let locals = [
            rng.uniform(0.0, 1.0),
            rng.uniform(0.0, 1.0),
            rng.uniform(0.0, 1.0),
        ];
        let x = FlowProfile::from_local_flows(&net3, &locals).unwrap();
        let raw = [
            rng.uniform(0.01, 1.0),
            rng.uniform(0.01, 1.0),
            rng.uniform(0.01, 1.0),
        ];
        let total: f64 = raw.iter().sum();
        let row: Vec<f64> = raw.iter().map(|w| w / total).collect();
        let doc = DocMatrix::from_rows(vec![
            row.clone(),
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
        ])
        .unwrap();
        let costs = game::all_costs(&net3, &x).unwrap();
        let expected: f64 = row.iter().zip(&costs).map(|(w, c)| w * c).sum();
        let got = game::perceived_cost(&net3, &x, &doc, 0).unwrap();
        assert!((got - expected).abs() <= 1e-12 * expected.abs().max(1.0));
        let identity = DocMatrix::selfish(3);
        assert_eq!(
            game::perceived_cost(&net3, &x, &identity, 1).unwrap(),
            game::player_cost(&net3, &x, 1).unwrap()
        );
    }

    // Interior best responses satisfy the stationarity identity, 200 cases.
    let mut accepted = 0;
    let mut attempts = 0;
    while accepted < 200 {
        attempts += 1;
        assert!(attempts < 40_000, "case generation stalled at {accepted}");
        let knee_latency = rng.uniform(0.05, 0.3);
        let width = rng.uniform(5e-3, 5e-2);
        let cross_hi = (1.0 * knee_latency / width).min(2.0);
        if cross_hi <= knee_latency * 1.05 {
            continue;
        }
        let c = rng.uniform(knee_latency * 1.05, cross_hi);
        let net = LbNetwork::new(
            2,
            1.0,
            LatencyFn::elbow(knee_latency, width, 1.0, 0.0).unwrap(),
            LatencyFn::constant(c).unwrap(),
        )
        .unwrap();
        let zeta = 0.5 * c * width / knee_latency;
        let symmetric = 0.5 + zeta;
        let q = (symmetric + rng.uniform(-2.0, 2.0) * zeta).clamp(0.05, 0.95);
        let profile = FlowProfile::from_local_flows(&net, &[0.0, q]).unwrap();
        let response = game::best_response(&net, &DocMatrix::selfish(2), 0, &profile).unwrap();
        let p = response.local_flow;

        // Keep only interior optima clear of both latency kinks.
        let margin = 1e-6;
        if p < margin || p > 1.0 - margin {
            continue;
        }
        if (p - (q - width)).abs() < margin || (p - (q + width)).abs() < margin {
            continue;
        }
        let x1 = p + (1.0 - q);
        let x2 = q + (1.0 - p);
        let gradient = knee_latency / width;
        let kink = 1.0 - width;
        let g1 = if x1 > kink { gradient } else { 0.0 };
        let g2 = if x2 > kink { gradient } else { 0.0 };
        if g1 + g2 == 0.0 {
            continue;
        }
        let t1 = net.local_latency().eval(x1).unwrap();
        let t2 = net.local_latency().eval(x2).unwrap();
        let implied = (t2 - t1 + c + 1.0 * g2) / (g1 + g2);
        assert!(
            (p - implied).abs() <= 1e-10,
            "stationarity identity off by {:.2e} (p = {p}, q = {q}, c = {c})",
            (p - implied).abs()
        );
        accepted += 1;
    }

    // Variational inequality holds on every scenario network (the solver
    // errors out otherwise), including degenerate cross costs.
    let seq = ParamSequence::standard();
    let mut nets = vec![
        LbNetwork::canonical(),
        LbNetwork::canonical_with_players(3).unwrap(),
        LbNetwork::canonical_with_players(5).unwrap(),
        LbNetwork::new(
            2,
            1.0,
            LatencyFn::elbow(0.1, 1e-3, 1.0, 0.0).unwrap(),
            LatencyFn::constant(0.05).unwrap(),
        )
        .unwrap(),
        LbNetwork::new(
            2,
            1.0,
            LatencyFn::elbow(0.1, 1e-3, 1.0, 0.0).unwrap(),
            LatencyFn::constant(0.0).unwrap(),
        )
        .unwrap(),
    ];
    for m in 2..=6 {
        nets.push(seq.network(m, 2).unwrap());
    }
    for net in &nets {
        wardrop_equilibrium(net).expect("variational inequality must hold");
    }

    // Social optimum lower-bounds every verified equilibrium.
    let canonical = LbNetwork::canonical();
    let mut equilibria = vec![
        (canonical.clone(), closed_form_selfish_ne(&canonical).unwrap().flows),
        (canonical.clone(), load_taker_profile(&canonical, 0).unwrap()),
    ];
    for m in 2..=6 {
        let net = seq.network(m, 2).unwrap();
        let ne = closed_form_selfish_ne(&net).unwrap();
        equilibria.push((net, ne.flows));
    }
    for (net, flows) in &equilibria {
        let total: f64 = game::all_costs(net, flows).unwrap().iter().sum();
        let opt = social_optimum(net).unwrap();
        assert!(opt.total_cost <= total + 1e-9);
    }

    finish(
        "criterion 7 (property suites)",
        Duration::from_secs(60),
        started,
        format!(
            "1000 latency, 500 linearity, 200 stationarity cases ({attempts} draws), \
             {} VI networks, {} bounded equilibria",
            nets.len(),
            equilibria.len()
        ),
    );
}

fn snapshot_tree(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut files = BTreeMap::new();
    for entry in fs::read_dir(dir).unwrap() {
        let entry = entry.unwrap();
        files.insert(
            entry.file_name().to_string_lossy().into_owned(),
            fs::read(entry.path()).unwrap(),
        );
    }
    files
}

/// Criterion 8: running the reproduction suite twice produces byte-identical
/// bundles, with every check green and the documented discrepancies listed.
#[test]
fn criterion_8_reproduction_determinism() {
    let started = Instant::now();
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();

    let first = reproduction::reproduce(a.path()).unwrap();
    assert!(first.all_pass(), "failing checks: {:?}", first.failing());
    let note_names: Vec<&str> = first.notes.iter().map(|(n, _)| n.as_str()).collect();
    assert!(note_names.contains(&"two_user_prose_ratio"));
    assert!(note_names.contains(&"n_player_altruistic_cost"));

    let second = reproduction::reproduce(b.path()).unwrap();
    assert!(second.all_pass());

    let tree_a = snapshot_tree(a.path());
    let tree_b = snapshot_tree(b.path());
    assert_eq!(
        tree_a.keys().collect::<Vec<_>>(),
        tree_b.keys().collect::<Vec<_>>()
    );
    for (name, bytes) in &tree_a {
        assert_eq!(bytes, &tree_b[name], "file {name} differs between runs");
    }

    finish(
        "criterion 8 (reproduction determinism)",
        Duration::from_secs(120),
        started,
        format!(
            "{} checks pass twice; {} files byte-identical",
            first.checks.len(),
            tree_a.len()
        ),
    );
}
