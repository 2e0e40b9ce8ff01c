//! Cross-solver consistency: the closed form, the dynamics and the grid
//! oracle must all tell the same story, and the welfare benchmarks must
//! bound every verified equilibrium.

use routing_games::{
    br_dynamics, closed_form_selfish_ne, grid_oracle_ne, load_taker_profile,
    load_taking_threshold_per_opponent, social_optimum, verify_equilibrium, DocMatrix,
    DynamicsParams, FlowProfile, LbNetwork, ParamSequence,
};

#[test]
fn closed_form_and_dynamics_agree_across_the_family() {
    let seq = ParamSequence::standard();
    for m in 2..=6 {
        for n in [2usize, 3, 5] {
            let net = seq.network(m, n).unwrap();
            let closed = closed_form_selfish_ne(&net).unwrap();
            assert!(closed.converged, "closed form must verify at m={m}, n={n}");

            let params = DynamicsParams {
                max_rounds: 3_000_000,
                ..DynamicsParams::default()
            };
            let doc = DocMatrix::selfish(n);
            let run = br_dynamics(&net, &doc, &FlowProfile::pure_local(&net), &params).unwrap();
            assert!(run.result.converged, "dynamics must converge at m={m}, n={n}");
            let gap = closed.flows.sup_distance(&run.result.flows);
            assert!(gap < 1e-6, "flow gap {gap} at m={m}, n={n}");

            assert!(verify_equilibrium(&net, &doc, &closed.flows, 1e-9)
                .unwrap()
                .is_pass());
            assert!(verify_equilibrium(&net, &doc, &run.result.flows, 1e-9)
                .unwrap()
                .is_pass());
        }
    }
}

#[test]
fn oracle_confirms_the_unique_two_player_equilibrium() {
    let net = LbNetwork::canonical();
    let doc = DocMatrix::selfish(2);
    let found = grid_oracle_ne(&net, &doc, 1e-3).unwrap();
    let verified: Vec<_> = found.iter().filter(|e| e.converged).collect();
    assert_eq!(verified.len(), 1);
    assert!((verified[0].flows.local_flow(0) - 0.505).abs() < 1e-12);
    assert!((verified[0].flows.local_flow(1) - 0.505).abs() < 1e-12);
    // Every raw grid survivor sits within one grid step of the equilibrium.
    for e in &found {
        for i in 0..2 {
            assert!(
                (e.flows.local_flow(i) - 0.505).abs() <= 1e-3 + 1e-12,
                "stray grid equilibrium {:?}",
                e.flows.local_flows()
            );
        }
    }
}

#[test]
fn two_player_gamma_boundary_splits_at_one_half() {
    let net = LbNetwork::canonical();
    let profile = load_taker_profile(&net, 0).unwrap();
    for k in 1..=20 {
        let beta = k as f64 * 0.05;
        let doc = DocMatrix::unilateral(2, 0, beta).unwrap();
        let pass = verify_equilibrium(&net, &doc, &profile, 1e-9)
            .unwrap()
            .is_pass();
        if beta >= 0.51 {
            assert!(pass, "load taking must be stable at beta = {beta}");
        }
        if beta <= 0.49 {
            assert!(!pass, "load taking must be unstable at beta = {beta}");
        }
    }
}

#[test]
fn load_taking_threshold_tracks_one_over_n() {
    for n in [2usize, 3, 5] {
        let net = LbNetwork::canonical_with_players(n).unwrap();
        let threshold = load_taking_threshold_per_opponent(&net, 0).unwrap();
        let expected = 1.0 / n as f64;
        assert!(
            (threshold - expected).abs() < 0.01,
            "n = {n}: threshold {threshold} vs {expected}"
        );
    }
}

#[test]
fn social_optimum_lower_bounds_every_verified_equilibrium() {
    let seq = ParamSequence::standard();
    let mut cases: Vec<(LbNetwork, DocMatrix, FlowProfile)> = Vec::new();

    let canonical = LbNetwork::canonical();
    let selfish_ne = closed_form_selfish_ne(&canonical).unwrap();
    cases.push((canonical.clone(), DocMatrix::selfish(2), selfish_ne.flows.clone()));
    cases.push((
        canonical.clone(),
        DocMatrix::unilateral(2, 0, 0.75).unwrap(),
        load_taker_profile(&canonical, 0).unwrap(),
    ));
    for m in 2..=6 {
        let net = seq.network(m, 2).unwrap();
        let ne = closed_form_selfish_ne(&net).unwrap();
        cases.push((net, DocMatrix::selfish(2), ne.flows));
    }

    for (net, doc, flows) in cases {
        assert!(verify_equilibrium(&net, &doc, &flows, 1e-9).unwrap().is_pass());
        let equilibrium_total: f64 = routing_games::game::all_costs(&net, &flows)
            .unwrap()
            .iter()
            .sum();
        let opt = social_optimum(&net).unwrap();
        assert!(
            opt.total_cost <= equilibrium_total + 1e-9,
            "optimum {} above equilibrium {}",
            opt.total_cost,
            equilibrium_total
        );
    }
}

#[test]
fn solver_types_are_shareable_across_threads() {
    fn assert_send_sync<T: Send + Sync>() {}
    assert_send_sync::<LbNetwork>();
    assert_send_sync::<FlowProfile>();
    assert_send_sync::<DocMatrix>();
    assert_send_sync::<routing_games::EquilibriumResult>();
    assert_send_sync::<routing_games::LatencyFn>();
    assert_send_sync::<ParamSequence>();

    // Independent scenario evaluations run concurrently on shared inputs and
    // agree with the sequential answer.
    let net = std::sync::Arc::new(LbNetwork::canonical());
    let handles: Vec<_> = (0..4)
        .map(|_| {
            let net = std::sync::Arc::clone(&net);
            std::thread::spawn(move || {
                let ne = closed_form_selfish_ne(&net).unwrap();
                assert!(ne.converged);
                ne.actual_costs[0]
            })
        })
        .collect();
    for handle in handles {
        let cost = handle.join().unwrap();
        assert!((cost - 0.595).abs() < 1e-12);
    }
}

#[test]
fn dynamics_match_closed_form_from_asymmetric_starts() {
    let net = LbNetwork::canonical();
    let doc = DocMatrix::selfish(2);
    for start in [[0.2, 0.9], [0.0, 0.0], [1.0, 0.3]] {
        let x0 = FlowProfile::from_local_flows(&net, &start).unwrap();
        let run = br_dynamics(&net, &doc, &x0, &DynamicsParams::default()).unwrap();
        assert!(run.result.converged, "start {start:?}");
        for i in 0..2 {
            assert!(
                (run.result.flows.local_flow(i) - 0.505).abs() < 1e-6,
                "start {start:?} landed at {:?}",
                run.result.flows.local_flows()
            );
        }
    }
}
