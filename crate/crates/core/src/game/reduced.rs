//! Allocation-free cost evaluation over the reduced strategy space, where a
//! player's strategy is the scalar local flow and the residual demand is
//! split equally across the cross links. Used by the hot loops of the grid
//! oracle and the sweeps.

use crate::network::LbNetwork;

pub(crate) struct Workspace {
    pub totals: Vec<f64>,
    pub latencies: Vec<f64>,
}

impl Workspace {
    pub fn new(players: usize) -> Self {
        Workspace {
            totals: vec![0.0; players],
            latencies: vec![0.0; players],
        }
    }
}

/// Total flow on each local link under equal cross splits.
pub(crate) fn totals_into(net: &LbNetwork, locals: &[f64], out: &mut [f64]) {
    let n = net.players();
    let r = net.demand();
    let share = 1.0 / (n - 1) as f64;
    let diverted: f64 = locals.iter().map(|&p| (r - p) * share).sum();
    for (k, &p) in locals.iter().enumerate() {
        // Everyone else's equal share lands here; the own share does not.
        out[k] = p + diverted - (r - p) * share;
    }
}

/// Actual cost of player `i`, given the local totals' latencies.
#[inline]
pub(crate) fn player_cost_with(
    net: &LbNetwork,
    locals: &[f64],
    latencies: &[f64],
    latency_sum: f64,
    i: usize,
) -> f64 {
    let n = net.players();
    let r = net.demand();
    let p = locals[i];
    let share = (r - p) / (n - 1) as f64;
    let cross_latency = net.cross_latency().value(share);
    p * latencies[i] + (r - p) * cross_latency + share * (latency_sum - latencies[i])
}

/// Fills `ws` and returns the sum of local-link latencies.
pub(crate) fn refresh(net: &LbNetwork, locals: &[f64], ws: &mut Workspace) -> f64 {
    totals_into(net, locals, &mut ws.totals);
    let mut sum = 0.0;
    for (lat, &x) in ws.latencies.iter_mut().zip(ws.totals.iter()) {
        *lat = net.local_latency().value(x.max(0.0));
        sum += *lat;
    }
    sum
}

/// Perceived cost of player `i` under the weight row `row`.
pub(crate) fn perceived_from_locals(
    net: &LbNetwork,
    locals: &[f64],
    row: &[f64],
    ws: &mut Workspace,
) -> f64 {
    let latency_sum = refresh(net, locals, ws);
    let mut value = 0.0;
    for (k, &w) in row.iter().enumerate() {
        if w != 0.0 {
            value += w * player_cost_with(net, locals, &ws.latencies, latency_sum, k);
        }
    }
    value
}
