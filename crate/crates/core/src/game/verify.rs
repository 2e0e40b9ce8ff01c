//! Equilibrium verification by best-response recomputation.

use crate::doc::DocMatrix;
use crate::error::Result;
use crate::flow::FlowProfile;
use crate::game::{best_response, cost};
use crate::network::LbNetwork;

#[derive(Debug, Clone, PartialEq)]
pub enum VerifyOutcome {
    Pass,
    /// Some player can lower their perceived cost by more than the tolerance.
    ImprovingDeviation {
        player: usize,
        deviation_local_flow: f64,
        current_cost: f64,
        improved_cost: f64,
        gain: f64,
    },
}

impl VerifyOutcome {
    pub fn is_pass(&self) -> bool {
        matches!(self, VerifyOutcome::Pass)
    }
}

/// Recomputes every player's exact best response with the others held fixed;
/// the profile passes iff nobody's perceived cost drops by more than
/// `eps_eq`.
pub fn verify_equilibrium(
    net: &LbNetwork,
    doc: &DocMatrix,
    x: &FlowProfile,
    eps_eq: f64,
) -> Result<VerifyOutcome> {
    for player in 0..net.players() {
        let current = cost::perceived_cost(net, x, doc, player)?;
        let response = best_response::best_response(net, doc, player, x)?;
        let gain = current - response.perceived_cost;
        if gain > eps_eq {
            return Ok(VerifyOutcome::ImprovingDeviation {
                player,
                deviation_local_flow: response.local_flow,
                current_cost: current,
                improved_cost: response.perceived_cost,
                gain,
            });
        }
    }
    Ok(VerifyOutcome::Pass)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::load_taker_profile;

    #[test]
    fn closed_form_equilibrium_passes() {
        let net = LbNetwork::canonical();
        let doc = DocMatrix::selfish(2);
        let x = FlowProfile::from_local_flows(&net, &[0.505, 0.505]).unwrap();
        assert!(verify_equilibrium(&net, &doc, &x, 1e-9).unwrap().is_pass());
    }

    #[test]
    fn load_taker_pair_passes_with_committed_altruist() {
        let net = LbNetwork::canonical();
        let doc = DocMatrix::unilateral(2, 0, 0.75).unwrap();
        let x = load_taker_profile(&net, 0).unwrap();
        assert!((x.local_flow(1) - 0.999).abs() < 1e-15);
        assert!(verify_equilibrium(&net, &doc, &x, 1e-9).unwrap().is_pass());
    }

    #[test]
    fn loose_tolerances_widen_the_accepted_band() {
        // Just below the commitment threshold the best deviation gains only
        // ~7e-3, so a 1e-2 tolerance accepts what 1e-9 rejects.
        let net = LbNetwork::canonical();
        let doc = DocMatrix::unilateral(2, 0, 0.49).unwrap();
        let x = load_taker_profile(&net, 0).unwrap();
        assert!(!verify_equilibrium(&net, &doc, &x, 1e-9).unwrap().is_pass());
        assert!(verify_equilibrium(&net, &doc, &x, 1e-2).unwrap().is_pass());
        // Far below the threshold the gain is large either way.
        let far = DocMatrix::unilateral(2, 0, 0.4).unwrap();
        assert!(!verify_equilibrium(&net, &far, &x, 1e-2).unwrap().is_pass());
    }

    #[test]
    fn pure_local_fails_with_a_one_width_shed() {
        let net = LbNetwork::canonical();
        let doc = DocMatrix::selfish(2);
        let x = FlowProfile::pure_local(&net);
        match verify_equilibrium(&net, &doc, &x, 1e-9).unwrap() {
            VerifyOutcome::ImprovingDeviation {
                player,
                deviation_local_flow,
                gain,
                ..
            } => {
                assert_eq!(player, 0);
                assert!((deviation_local_flow - 0.999).abs() < 1e-12);
                // 0.1 down to delta * (c + 2L) = 0.0012.
                assert!((gain - 0.0988).abs() < 1e-12);
            }
            VerifyOutcome::Pass => panic!("pure local routing is not an equilibrium"),
        }
    }
}
