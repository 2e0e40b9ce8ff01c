//! Non-atomic (Wardrop) equilibrium via exact Beckmann-potential
//! minimization, with a variational-inequality check on the result.

use crate::error::{Error, Result};
use crate::network::LbNetwork;

/// Latency tolerance for the variational-inequality verdict.
pub const EPS_W: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct WardropOutcome {
    /// Aggregate flow each source keeps on its direct path.
    pub local_flows: Vec<f64>,
    /// Aggregate flow each source sends down each cross path (slot order).
    pub cross_flows: Vec<Vec<f64>>,
    /// The common latency `A` of the used paths, per source.
    pub common_latency: Vec<f64>,
    pub per_source_cost: Vec<f64>,
    pub total_cost: f64,
    /// Beckmann potential at the equilibrium.
    pub potential: f64,
}

/// Beckmann potential of the reduced per-source flows `locals` (residuals
/// split equally over the cross paths): `sum_l ∫_0^{x_l} T_l`.
pub fn beckmann_potential(net: &LbNetwork, locals: &[f64]) -> f64 {
    let n = net.players();
    let r = net.demand();
    let share = 1.0 / (n - 1) as f64;
    let diverted: f64 = locals.iter().map(|&y| (r - y) * share).sum();
    let mut potential = 0.0;
    for &y in locals {
        let total = y + diverted - (r - y) * share;
        potential += net.local_latency().integral_unchecked(total.max(0.0));
        let s = (r - y) * share;
        potential += (n - 1) as f64 * net.cross_latency().integral_unchecked(s.max(0.0));
    }
    potential
}

/// Minimizes the Beckmann potential over the per-source diversion scalars by
/// exact piecewise-quadratic coordinate descent, then verifies the Wardrop
/// variational inequality: every used path sits at the common minimum
/// latency, every unused path at or above it (within [`EPS_W`]).
pub fn wardrop_equilibrium(net: &LbNetwork) -> Result<WardropOutcome> {
    let n = net.players();
    let r = net.demand();
    let share = 1.0 / (n - 1) as f64;
    let mut locals = vec![r; n];

    for _round in 0..500 {
        let mut change: f64 = 0.0;
        for i in 0..n {
            let best = minimize_source_potential(net, &locals, i);
            change = change.max((locals[i] - best).abs());
            locals[i] = best;
        }
        if change < 1e-13 {
            break;
        }
    }

    // Aggregate link totals and path latencies.
    let diverted: f64 = locals.iter().map(|&y| (r - y) * share).sum();
    let totals: Vec<f64> = locals
        .iter()
        .map(|&y| (y + diverted - (r - y) * share).max(0.0))
        .collect();
    let local_latency: Vec<f64> = totals.iter().map(|&x| net.local_latency().value(x)).collect();

    let mut cross_flows = Vec::with_capacity(n);
    let mut common_latency = Vec::with_capacity(n);
    let mut per_source_cost = Vec::with_capacity(n);
    for (i, &y) in locals.iter().enumerate() {
        let s = (r - y) * share;
        let cross_here: Vec<f64> = vec![s; n - 1];
        let mut paths = vec![(local_latency[i], y)];
        for j in 0..n {
            if j != i {
                paths.push((net.cross_latency().value(s) + local_latency[j], s));
            }
        }
        let a = paths
            .iter()
            .map(|&(lat, _)| lat)
            .fold(f64::INFINITY, f64::min);
        for &(lat, flow) in &paths {
            if flow > 1e-9 && (lat - a).abs() > EPS_W {
                return Err(Error::InternalConsistency(format!(
                    "used path of source {i} sits {} above the minimum latency {a}",
                    lat - a
                )));
            }
            if lat < a - EPS_W {
                return Err(Error::InternalConsistency(format!(
                    "path latency {lat} of source {i} undercuts the minimum {a}"
                )));
            }
        }
        let cost: f64 = paths.iter().map(|&(lat, flow)| lat * flow).sum();
        cross_flows.push(cross_here);
        common_latency.push(a);
        per_source_cost.push(cost);
    }

    Ok(WardropOutcome {
        total_cost: per_source_cost.iter().sum(),
        potential: beckmann_potential(net, &locals),
        local_flows: locals,
        cross_flows,
        common_latency,
        per_source_cost,
    })
}

/// Exact 1-D minimization of the potential in source `i`'s local flow.
fn minimize_source_potential(net: &LbNetwork, locals: &[f64], i: usize) -> f64 {
    let n = net.players();
    let r = net.demand();
    let share = 1.0 / (n - 1) as f64;

    // Opponent contributions to each local link.
    let mut base = vec![0.0; n];
    for (j, b) in base.iter_mut().enumerate() {
        for (k, &y) in locals.iter().enumerate() {
            if k == i || k == j {
                continue;
            }
            *b += (r - y) * share;
        }
        if j != i {
            *b += locals[j];
        }
    }

    let total = |j: usize, y: f64| -> f64 {
        if j == i {
            base[j] + y
        } else {
            base[j] + (r - y) * share
        }
    };

    let mut candidates = vec![0.0, r];
    for kink in net.local_latency().kink_points() {
        let own = kink - base[i];
        if own > 0.0 && own < r {
            candidates.push(own);
        }
        for j in 0..n {
            if j != i {
                let y = r - (n - 1) as f64 * (kink - base[j]);
                if y > 0.0 && y < r {
                    candidates.push(y);
                }
            }
        }
    }
    for kink in net.cross_latency().kink_points() {
        let y = r - (n - 1) as f64 * kink;
        if y > 0.0 && y < r {
            candidates.push(y);
        }
    }
    candidates.sort_by(|a, b| a.partial_cmp(b).unwrap());
    candidates.dedup_by(|a, b| (*a - *b).abs() <= 1e-13 * r.max(1.0));

    // Piece vertices from the potential's per-piece slope and curvature.
    let mut vertices = Vec::new();
    for pair in candidates.windows(2) {
        let (lo, hi) = (pair[0], pair[1]);
        if hi - lo <= 1e-13 * r.max(1.0) {
            continue;
        }
        let mid = 0.5 * (lo + hi);
        let s = (r - mid) * share;
        let mut slope = net.local_latency().value(total(i, mid).max(0.0))
            - net.cross_latency().value(s.max(0.0));
        let mut curvature = net.local_latency().slope_at(total(i, mid).max(0.0))
            + net.cross_latency().slope_at(s.max(0.0)) * share;
        for j in 0..n {
            if j != i {
                let x = total(j, mid).max(0.0);
                slope -= share * net.local_latency().value(x);
                curvature += share * share * net.local_latency().slope_at(x);
            }
        }
        if curvature > 1e-12 {
            let vertex = mid - slope / curvature;
            if vertex > lo && vertex < hi {
                vertices.push(vertex);
            }
        }
    }
    candidates.extend(vertices);

    let mut scratch = locals.to_vec();
    let mut best = (r, f64::INFINITY);
    for &y in &candidates {
        scratch[i] = y;
        let value = beckmann_potential(net, &scratch);
        if value < best.1 - 1e-15 || (value < best.1 + 1e-15 && y > best.0) {
            best = (y, value);
        }
    }
    best.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::latency::LatencyFn;

    #[test]
    fn canonical_equilibrium_uses_only_local_paths() {
        let net = LbNetwork::canonical();
        let outcome = wardrop_equilibrium(&net).unwrap();
        for i in 0..2 {
            assert!((outcome.local_flows[i] - 1.0).abs() < 1e-12);
            assert!((outcome.common_latency[i] - 0.1).abs() < 1e-12);
            assert!((outcome.per_source_cost[i] - 0.1).abs() < 1e-12);
        }
        assert!((outcome.total_cost - 0.2).abs() < 1e-12);
    }

    #[test]
    fn cheap_cross_links_still_leave_local_paths_cheapest() {
        // c < L: the cross path still costs c + T(r) > T(r) as long as the
        // receiving link carries the full demand.
        let net = LbNetwork::new(
            2,
            1.0,
            LatencyFn::elbow(0.1, 1e-3, 1.0, 0.0).unwrap(),
            LatencyFn::constant(0.05).unwrap(),
        )
        .unwrap();
        let outcome = wardrop_equilibrium(&net).unwrap();
        assert!((outcome.local_flows[0] - 1.0).abs() < 1e-12);

        // Brute-force the symmetric one-dimensional potential as a check.
        let mut best = (0.0, f64::INFINITY);
        for k in 0..=100_000 {
            let y = k as f64 / 100_000.0;
            let value = beckmann_potential(&net, &[y, y]);
            if value < best.1 {
                best = (y, value);
            }
        }
        assert!((best.0 - 1.0).abs() < 1e-5, "scan found {best:?}");
    }

    #[test]
    fn five_sources_stay_local_across_the_family() {
        let net = LbNetwork::canonical_with_players(5).unwrap();
        let outcome = wardrop_equilibrium(&net).unwrap();
        assert!((outcome.total_cost - 0.5).abs() < 1e-12);
        for flows in &outcome.cross_flows {
            for &f in flows {
                assert!(f.abs() < 1e-12);
            }
        }
    }
}
