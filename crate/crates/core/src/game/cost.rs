//! Actual and perceived player costs on a load-balancing network.

use crate::doc::DocMatrix;
use crate::error::{Error, Result};
use crate::flow::FlowProfile;
use crate::network::LbNetwork;

/// Actual cost of player `i`: the flow-weighted sum of link latencies over
/// every link the player's traffic touches. Cross traffic pays the cross link
/// plus the local link it merges into.
pub fn player_cost(net: &LbNetwork, x: &FlowProfile, i: usize) -> Result<f64> {
    x.validate(net)?;
    check_player(net, i)?;
    Ok(player_cost_unchecked(net, x, i))
}

/// All actual costs at once.
pub fn all_costs(net: &LbNetwork, x: &FlowProfile) -> Result<Vec<f64>> {
    x.validate(net)?;
    Ok((0..net.players())
        .map(|i| player_cost_unchecked(net, x, i))
        .collect())
}

/// Perceived cost of player `i`: the row-weighted sum of actual costs.
pub fn perceived_cost(net: &LbNetwork, x: &FlowProfile, doc: &DocMatrix, i: usize) -> Result<f64> {
    if doc.players() != net.players() {
        return Err(Error::DimensionMismatch {
            expected: net.players(),
            got: doc.players(),
        });
    }
    let costs = all_costs(net, x)?;
    check_player(net, i)?;
    Ok(weighted(doc.row(i), &costs))
}

/// All perceived costs at once (one row-weighted sum per player).
pub fn all_perceived_costs(net: &LbNetwork, x: &FlowProfile, doc: &DocMatrix) -> Result<Vec<f64>> {
    if doc.players() != net.players() {
        return Err(Error::DimensionMismatch {
            expected: net.players(),
            got: doc.players(),
        });
    }
    let costs = all_costs(net, x)?;
    Ok((0..net.players())
        .map(|i| weighted(doc.row(i), &costs))
        .collect())
}

fn check_player(net: &LbNetwork, i: usize) -> Result<()> {
    if i >= net.players() {
        return Err(Error::InvalidParameter(format!(
            "player index {i} out of range for {} players",
            net.players()
        )));
    }
    Ok(())
}

fn weighted(row: &[f64], costs: &[f64]) -> f64 {
    row.iter().zip(costs).map(|(w, c)| w * c).sum()
}

pub(crate) fn player_cost_unchecked(net: &LbNetwork, x: &FlowProfile, i: usize) -> f64 {
    let n = net.players();
    let mut cost = x.local_flow(i) * net.local_latency().value(x.total_local(i).max(0.0));
    for j in 0..n {
        if j == i {
            continue;
        }
        let f = x.cross_flow(i, j);
        if f != 0.0 {
            cost += f
                * (net.cross_latency().value(f.max(0.0))
                    + net.local_latency().value(x.total_local(j).max(0.0)));
        }
    }
    cost
}
