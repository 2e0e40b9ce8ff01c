//! Brute-force equilibrium oracle on a flow grid, independent of the
//! best-response machinery. Intentionally dumb: enumerate reduced profiles,
//! keep those where no player improves by any grid deviation.

use crate::doc::DocMatrix;
use crate::error::{Error, Result};
use crate::flow::FlowProfile;
use crate::game::reduced::{self, Workspace};
use crate::game::{verify, EquilibriumResult, Method, EPS_EQ};
use crate::network::LbNetwork;

/// Enumerates every reduced profile on the grid (multiples of `grid_step`
/// augmented with the strategy points the steep-elbow family pivots on) and
/// returns the profiles from which no player can improve their perceived
/// cost by more than [`EPS_EQ`] through any grid deviation. Supports two or
/// three players; the work grows as `grid^n`.
///
/// The grid cannot distinguish a profile whose true best response falls
/// exactly midway between two grid points, so the raw set may contain such
/// knife-edge neighbors of a genuine equilibrium. Each reported profile
/// therefore also carries the continuous verification verdict in
/// `converged`; filter on it when grid resolution is not enough.
pub fn grid_oracle_ne(
    net: &LbNetwork,
    doc: &DocMatrix,
    grid_step: f64,
) -> Result<Vec<EquilibriumResult>> {
    let n = net.players();
    if n > 3 {
        return Err(Error::Configuration(format!(
            "the grid oracle supports at most 3 players, got {n}"
        )));
    }
    if doc.players() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: doc.players(),
        });
    }
    let r = net.demand();
    if !(grid_step > 0.0 && grid_step <= r / 4.0) {
        return Err(Error::Configuration(format!(
            "grid step must lie in (0, r/4] so the special strategy points sit \
             strictly inside the grid, got {grid_step}"
        )));
    }

    let grid = build_grid(net, grid_step);
    let equilibria = match n {
        2 => oracle_two(net, doc, &grid),
        3 => oracle_three(net, doc, &grid),
        _ => unreachable!(),
    };

    let mut results = Vec::new();
    for locals in equilibria {
        let flows = FlowProfile::from_local_flows(net, &locals)?;
        let verified = verify::verify_equilibrium(net, doc, &flows, EPS_EQ)?.is_pass();
        results.push(EquilibriumResult::assemble(
            net,
            doc,
            flows,
            verified,
            0,
            Method::GridOracle,
        )?);
    }
    Ok(results)
}

/// Grid = multiples of the step plus the special points: the endpoints, the
/// knee-sheds `r - k*delta`, and the closed-form symmetric flows when the
/// network is in the steep-elbow regime.
fn build_grid(net: &LbNetwork, step: f64) -> Vec<f64> {
    let r = net.demand();
    let n = net.players();
    let mut grid: Vec<f64> = Vec::new();
    let count = (r / step).floor() as usize;
    for k in 0..=count {
        grid.push((k as f64 * step).min(r));
    }
    grid.push(r);
    if let Some(width) = net.local_elbow_width() {
        grid.push((r - width).max(0.0));
        grid.push((r - (n - 1) as f64 * width).max(0.0));
    }
    if let Ok(z) = crate::game::closed_form::zeta(net) {
        grid.push(r / 2.0 + z);
        if let Ok(flow) = crate::game::closed_form::symmetric_local_flow(net) {
            grid.push(flow);
        }
    }
    grid.retain(|p| (0.0..=r).contains(p));
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    grid.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * r.max(1.0));
    grid
}

fn oracle_two(net: &LbNetwork, doc: &DocMatrix, grid: &[f64]) -> Vec<Vec<f64>> {
    let mut ws = Workspace::new(2);
    let len = grid.len();
    // best[i][q] = the best perceived cost player i can reach when the
    // opponent sits at grid[q].
    let mut best = vec![vec![f64::INFINITY; len]; 2];
    let mut locals = [0.0; 2];
    for i in 0..2 {
        let row = doc.row(i);
        for (qi, &q) in grid.iter().enumerate() {
            let mut lowest = f64::INFINITY;
            for &p in grid {
                locals[i] = p;
                locals[1 - i] = q;
                let v = reduced::perceived_from_locals(net, &locals, row, &mut ws);
                if v < lowest {
                    lowest = v;
                }
            }
            best[i][qi] = lowest;
        }
    }
    let mut found = Vec::new();
    for (ai, &a) in grid.iter().enumerate() {
        for (bi, &b) in grid.iter().enumerate() {
            let locals = [a, b];
            let v0 = reduced::perceived_from_locals(net, &locals, doc.row(0), &mut ws);
            if v0 > best[0][bi] + EPS_EQ {
                continue;
            }
            let v1 = reduced::perceived_from_locals(net, &locals, doc.row(1), &mut ws);
            if v1 > best[1][ai] + EPS_EQ {
                continue;
            }
            found.push(vec![a, b]);
        }
    }
    found
}

fn oracle_three(net: &LbNetwork, doc: &DocMatrix, grid: &[f64]) -> Vec<Vec<f64>> {
    let mut ws = Workspace::new(3);
    let len = grid.len();
    // best[i][qa * len + qb]: opponents in ascending player order.
    let mut best = vec![vec![f64::INFINITY; len * len]; 3];
    let mut locals = [0.0; 3];
    for i in 0..3 {
        let row = doc.row(i);
        let others: Vec<usize> = (0..3).filter(|&k| k != i).collect();
        for (qa_i, &qa) in grid.iter().enumerate() {
            for (qb_i, &qb) in grid.iter().enumerate() {
                locals[others[0]] = qa;
                locals[others[1]] = qb;
                let mut lowest = f64::INFINITY;
                for &p in grid {
                    locals[i] = p;
                    let v = reduced::perceived_from_locals(net, &locals, row, &mut ws);
                    if v < lowest {
                        lowest = v;
                    }
                }
                best[i][qa_i * len + qb_i] = lowest;
            }
        }
    }
    let mut found = Vec::new();
    for (ai, &a) in grid.iter().enumerate() {
        for (bi, &b) in grid.iter().enumerate() {
            for (ci, &c) in grid.iter().enumerate() {
                let locals = [a, b, c];
                let keys = [bi * len + ci, ai * len + ci, ai * len + bi];
                let mut ok = true;
                for i in 0..3 {
                    let v = reduced::perceived_from_locals(net, &locals, doc.row(i), &mut ws);
                    if v > best[i][keys[i]] + EPS_EQ {
                        ok = false;
                        break;
                    }
                }
                if ok {
                    found.push(vec![a, b, c]);
                }
            }
        }
    }
    found
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::latency::LatencyFn;

    #[test]
    fn canonical_selfish_equilibrium_is_unique_after_verification() {
        let net = LbNetwork::canonical();
        let doc = DocMatrix::selfish(2);
        let found = grid_oracle_ne(&net, &doc, 1e-2).unwrap();
        let verified: Vec<_> = found.iter().filter(|e| e.converged).collect();
        assert_eq!(verified.len(), 1, "knife-edge grid profiles must not verify");
        assert!((verified[0].flows.local_flow(0) - 0.505).abs() < 1e-12);
        assert!((verified[0].flows.local_flow(1) - 0.505).abs() < 1e-12);
    }

    #[test]
    fn altruistic_oracle_recovers_the_load_taker_pair() {
        let net = LbNetwork::canonical();
        let doc = DocMatrix::unilateral(2, 0, 0.75).unwrap();
        let found = grid_oracle_ne(&net, &doc, 1e-2).unwrap();
        assert!(
            found.iter().any(|e| (e.flows.local_flow(0) - 1.0).abs() < 1e-12
                && (e.flows.local_flow(1) - 0.999).abs() < 1e-12),
            "expected (1, 0.999) among {:?}",
            found
                .iter()
                .map(|e| e.flows.local_flows().to_vec())
                .collect::<Vec<_>>()
        );
    }

    #[test]
    fn free_cross_links_leave_only_balanced_profiles() {
        let net = LbNetwork::new(
            2,
            1.0,
            LatencyFn::elbow(0.1, 1e-3, 1.0, 0.0).unwrap(),
            LatencyFn::constant(0.0).unwrap(),
        )
        .unwrap();
        let doc = DocMatrix::selfish(2);
        let found = grid_oracle_ne(&net, &doc, 1e-2).unwrap();
        let verified: Vec<_> = found.iter().filter(|e| e.converged).collect();
        assert!(!verified.is_empty());
        for e in verified {
            // Rerouting is free, so any equilibrium keeps both local links at
            // the demand, i.e. the two local flows agree.
            assert!(
                (e.flows.local_flow(0) - e.flows.local_flow(1)).abs() < 1e-12,
                "off-balance equilibrium {:?}",
                e.flows.local_flows()
            );
        }
    }

    #[test]
    fn too_many_players_or_coarse_grids_are_rejected() {
        let net5 = LbNetwork::canonical_with_players(5).unwrap();
        assert!(matches!(
            grid_oracle_ne(&net5, &DocMatrix::selfish(5), 1e-2),
            Err(Error::Configuration(_))
        ));
        let net = LbNetwork::canonical();
        assert!(matches!(
            grid_oracle_ne(&net, &DocMatrix::selfish(2), 0.5),
            Err(Error::Configuration(_))
        ));
    }
}
