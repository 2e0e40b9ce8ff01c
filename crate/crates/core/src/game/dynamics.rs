//! Round-robin best-response dynamics.

use crate::doc::DocMatrix;
use crate::error::{Error, Result};
use crate::flow::FlowProfile;
use crate::game::{best_response, cost, verify, EquilibriumResult, Method, EPS_EQ, EPS_FIXED_POINT};
use crate::network::LbNetwork;

#[derive(Debug, Clone)]
pub struct DynamicsParams {
    pub max_rounds: usize,
    /// Convergence threshold on the sup-norm flow change over a full round.
    pub eps_fixed_point: f64,
    /// Update order; defaults to ascending player index.
    pub player_order: Option<Vec<usize>>,
    /// Record one [`TraceRound`] per round (plus the start as round 0).
    pub record_trace: bool,
}

impl Default for DynamicsParams {
    fn default() -> Self {
        DynamicsParams {
            max_rounds: 10_000,
            eps_fixed_point: EPS_FIXED_POINT,
            player_order: None,
            record_trace: false,
        }
    }
}

/// One snapshot of the dynamics: flows and actual costs after `round` rounds.
#[derive(Debug, Clone)]
pub struct TraceRound {
    pub round: usize,
    pub locals: Vec<f64>,
    pub costs: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct DynamicsRun {
    pub result: EquilibriumResult,
    pub trace: Vec<TraceRound>,
}

/// Iterates exact best responses in round-robin order from `start` until the
/// flow matrix moves less than `eps_fixed_point` over a full round or
/// `max_rounds` is exhausted. Non-convergence is reported through
/// `result.converged`, not as an error; the final iterate is returned either
/// way.
pub fn br_dynamics(
    net: &LbNetwork,
    doc: &DocMatrix,
    start: &FlowProfile,
    params: &DynamicsParams,
) -> Result<DynamicsRun> {
    start.validate(net)?;
    let n = net.players();
    let order: Vec<usize> = match &params.player_order {
        Some(order) => {
            let mut seen = vec![false; n];
            for &i in order {
                if i >= n || seen[i] {
                    return Err(Error::Configuration(format!(
                        "player order must be a permutation of 0..{n}"
                    )));
                }
                seen[i] = true;
            }
            if order.len() != n {
                return Err(Error::Configuration(format!(
                    "player order must cover all {n} players"
                )));
            }
            order.clone()
        }
        None => (0..n).collect(),
    };

    let mut state = start.clone();
    let mut trace = Vec::new();
    if params.record_trace {
        trace.push(TraceRound {
            round: 0,
            locals: state.local_flows().to_vec(),
            costs: cost::all_costs(net, &state)?,
        });
    }

    let mut fixed_point = false;
    let mut rounds = 0;
    while rounds < params.max_rounds {
        rounds += 1;
        let before: Vec<f64> = state.local_flows().to_vec();
        for &i in &order {
            let response = best_response::best_response(net, doc, i, &state)?;
            state.set_local_equal_split(i, response.local_flow);
        }
        let change = before
            .iter()
            .zip(state.local_flows())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if params.record_trace {
            trace.push(TraceRound {
                round: rounds,
                locals: state.local_flows().to_vec(),
                costs: cost::all_costs(net, &state)?,
            });
        }
        if change < params.eps_fixed_point {
            fixed_point = true;
            break;
        }
    }

    let verified = fixed_point
        && verify::verify_equilibrium(net, doc, &state, EPS_EQ)?.is_pass();
    let result =
        EquilibriumResult::assemble(net, doc, state, verified, rounds, Method::BrDynamics)?;
    Ok(DynamicsRun { result, trace })
}
