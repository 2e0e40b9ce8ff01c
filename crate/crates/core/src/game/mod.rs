//! Player costs, best responses, equilibrium solvers and verification.

pub mod best_response;
pub mod closed_form;
pub mod cost;
pub mod dynamics;
pub mod oracle;
pub(crate) mod reduced;
pub mod verify;

use crate::doc::DocMatrix;
use crate::error::Result;
use crate::flow::FlowProfile;
use crate::network::LbNetwork;

pub use best_response::{best_response, BestResponse, EPS_TIE};
pub use closed_form::{closed_form_selfish_ne, symmetric_local_flow, symmetric_player_cost, zeta};
pub use cost::{all_costs, all_perceived_costs, perceived_cost, player_cost};
pub use dynamics::{br_dynamics, DynamicsParams, DynamicsRun, TraceRound};
pub use oracle::grid_oracle_ne;
pub use verify::{verify_equilibrium, VerifyOutcome};

/// Default fixed-point tolerance on flows for best-response dynamics.
pub const EPS_FIXED_POINT: f64 = 1e-10;
/// Default equilibrium tolerance on perceived cost.
pub const EPS_EQ: f64 = 1e-9;

/// How an equilibrium candidate was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ClosedForm,
    BrDynamics,
    GridOracle,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::ClosedForm => "closed_form",
            Method::BrDynamics => "br_dynamics",
            Method::GridOracle => "grid_oracle",
        }
    }
}

/// An equilibrium candidate with its diagnostics. `converged` is only set
/// when the profile passed [`verify_equilibrium`] at [`EPS_EQ`].
#[derive(Debug, Clone)]
pub struct EquilibriumResult {
    pub flows: FlowProfile,
    pub actual_costs: Vec<f64>,
    pub perceived_costs: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
    pub method: Method,
}

impl EquilibriumResult {
    pub(crate) fn assemble(
        net: &LbNetwork,
        doc: &DocMatrix,
        flows: FlowProfile,
        converged: bool,
        iterations: usize,
        method: Method,
    ) -> Result<Self> {
        let actual_costs = cost::all_costs(net, &flows)?;
        let perceived_costs = cost::all_perceived_costs(net, &flows, doc)?;
        Ok(EquilibriumResult {
            flows,
            actual_costs,
            perceived_costs,
            converged,
            iterations,
            method,
        })
    }

    pub fn total_actual_cost(&self) -> f64 {
        self.actual_costs.iter().sum()
    }
}

/// The profile where `player` absorbs the full demand locally and everyone
/// else sheds exactly enough to bring their own local-link total to the
/// elbow knee: with equal cross splits that is `(n - 1)` widths each, one
/// width in the two-player game.
pub fn load_taker_profile(net: &LbNetwork, player: usize) -> Result<FlowProfile> {
    let width = net.local_elbow_width().ok_or_else(|| {
        crate::error::Error::Configuration(
            "the load-taker profile needs an elbow local latency".into(),
        )
    })?;
    let n = net.players();
    let shed = (n - 1) as f64 * width;
    let locals: Vec<f64> = (0..n)
        .map(|i| {
            if i == player {
                net.demand()
            } else {
                net.demand() - shed
            }
        })
        .collect();
    FlowProfile::from_local_flows(net, &locals)
}
