//! Property tests for the model primitives.

use proptest::prelude::*;
use routing_games::game::{all_costs, best_response, perceived_cost, player_cost};
use routing_games::{DocMatrix, FlowProfile, LatencyFn, LbNetwork};

fn latency_strategy() -> impl Strategy<Value = LatencyFn> {
    prop_oneof![
        (0.0f64..5.0, 0.0f64..5.0).prop_map(|(a, b)| LatencyFn::affine(a, b).unwrap()),
        (1e-3f64..2.0, 1e-4f64..0.5, 0.1f64..3.0, 0.0f64..1.0)
            .prop_map(|(l, w, k, o)| LatencyFn::elbow(l, w, k, o).unwrap()),
    ]
}

proptest! {
    #[test]
    fn latency_is_non_decreasing(t in latency_strategy(), x1 in 0.0f64..6.0, x2 in 0.0f64..6.0) {
        let (lo, hi) = if x1 <= x2 { (x1, x2) } else { (x2, x1) };
        prop_assert!(t.eval(lo).unwrap() <= t.eval(hi).unwrap() + 1e-12);
    }

    #[test]
    fn latency_is_convex(
        t in latency_strategy(),
        x1 in 0.0f64..6.0,
        x2 in 0.0f64..6.0,
        lambda in 0.0f64..=1.0,
    ) {
        let mid = lambda * x1 + (1.0 - lambda) * x2;
        let chord = lambda * t.eval(x1).unwrap() + (1.0 - lambda) * t.eval(x2).unwrap();
        prop_assert!(t.eval(mid).unwrap() <= chord + 1e-12);
    }

    #[test]
    fn latency_is_non_negative(t in latency_strategy(), x in 0.0f64..6.0) {
        prop_assert!(t.eval(x).unwrap() >= 0.0);
    }

    // Perceived cost is linear in the weight row; the identity row recovers
    // the actual cost exactly.
    #[test]
    fn perceived_cost_is_linear_in_the_weights(
        locals in proptest::collection::vec(0.0f64..=1.0, 3),
        weights in proptest::collection::vec(0.01f64..1.0, 3),
    ) {
        let net = LbNetwork::canonical_with_players(3).unwrap();
        let x = FlowProfile::from_local_flows(&net, &locals).unwrap();
        let total: f64 = weights.iter().sum();
        let row: Vec<f64> = weights.iter().map(|w| w / total).collect();
        let mut rows = vec![row.clone(), vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]];
        rows[1] = vec![0.0, 1.0, 0.0];
        rows[2] = vec![0.0, 0.0, 1.0];
        let doc = DocMatrix::from_rows(rows).unwrap();

        let costs = all_costs(&net, &x).unwrap();
        let expected: f64 = row.iter().zip(&costs).map(|(w, c)| w * c).sum();
        let got = perceived_cost(&net, &x, &doc, 0).unwrap();
        prop_assert!((got - expected).abs() <= 1e-12 * expected.abs().max(1.0));

        let identity = DocMatrix::selfish(3);
        for i in 0..3 {
            prop_assert_eq!(
                perceived_cost(&net, &x, &identity, i).unwrap(),
                player_cost(&net, &x, i).unwrap()
            );
        }
    }

    // Marginal cost on a link is strictly increasing in both the total link
    // flow and the player's own flow on the ascending elbow region.
    #[test]
    fn marginal_cost_increases_in_both_arguments(
        own1 in 0.0f64..1.0,
        own_bump in 1e-6f64..0.5,
        total_bump in 1e-6f64..0.5,
    ) {
        let t = LatencyFn::elbow(0.1, 1e-3, 1.0, 0.0).unwrap();
        // Stay on the ascending branch: totals at or above the knee flow.
        let total1 = 1.0 + own1;
        let marginal = |own: f64, total: f64| {
            t.eval(total).unwrap() + own * 100.0 // slope L/width = 100 on the branch
        };
        prop_assert!(marginal(own1 + own_bump, total1) > marginal(own1, total1));
        prop_assert!(marginal(own1, total1 + total_bump) > marginal(own1, total1));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // Wherever the optimizer lands in the interior away from every kink, the
    // stationarity identity p = (T2 - T1 + c + r g2) / (g1 + g2) holds at the
    // reported point.
    #[test]
    fn interior_best_responses_satisfy_the_stationarity_identity(
        q_offset in -0.04f64..0.04,
        c in 0.5f64..2.0,
    ) {
        let net = LbNetwork::new(
            2,
            1.0,
            LatencyFn::elbow(0.1, 1e-2, 1.0, 0.0).unwrap(),
            LatencyFn::constant(c).unwrap(),
        )
        .unwrap();
        let doc = DocMatrix::selfish(2);
        let q = (0.5 + 0.05 * c + q_offset).clamp(0.0, 1.0);
        let profile = FlowProfile::from_local_flows(&net, &[0.0, q]).unwrap();
        let br = best_response(&net, &doc, 0, &profile).unwrap();
        let p = br.local_flow;

        // Only check genuinely interior, kink-free solutions.
        let x1 = p + (1.0 - q);
        let x2 = q + (1.0 - p);
        let kink = 0.99;
        prop_assume!(p > 1e-6 && p < 1.0 - 1e-6);
        prop_assume!((x1 - kink).abs() > 1e-6 && (x2 - kink).abs() > 1e-6);

        let g = 10.0;
        let g1 = if x1 > kink { g } else { 0.0 };
        let g2 = if x2 > kink { g } else { 0.0 };
        prop_assume!(g1 + g2 > 0.0);
        let t1 = net.local_latency().eval(x1).unwrap();
        let t2 = net.local_latency().eval(x2).unwrap();
        let implied = (t2 - t1 + c + 1.0 * g2) / (g1 + g2);
        prop_assert!(
            (p - implied).abs() < 1e-10,
            "p = {p}, identity gives {implied} (q = {q}, c = {c})"
        );
    }
}
