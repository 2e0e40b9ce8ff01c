//! Efficiency metrics: the anarchy ratio of the selfish game and the value a
//! player recovers by unilaterally committing to altruism.

use crate::doc::DocMatrix;
use crate::error::{Error, Result};
use crate::flow::FlowProfile;
use crate::game::{
    br_dynamics, closed_form, grid_oracle_ne, load_taker_profile, verify_equilibrium,
    DynamicsParams, EquilibriumResult, EPS_EQ,
};
use crate::network::LbNetwork;
use crate::welfare::{social_optimum, wardrop_equilibrium};

/// Grid step used when the oracle participates in metric computations.
pub const DEFAULT_ORACLE_STEP: f64 = 1e-2;
/// Round cap for the dynamics runs inside beta sweeps.
const SWEEP_DYNAMICS_ROUNDS: usize = 4_000;

#[derive(Debug, Clone)]
pub struct PoaReport {
    pub worst_ne_total_cost: f64,
    pub opt_total_cost: f64,
    pub poa: f64,
    /// The analytic value `1 + ((n-1)/n) (r - 2 zeta) c / (r L)`, reduced to
    /// `1 + (r/2 - zeta) c / (r L)` for two players.
    pub closed_form_poa: Option<f64>,
}

/// The analytic anarchy ratio of the steep-elbow family.
pub fn closed_form_poa(net: &LbNetwork) -> Result<f64> {
    let cost = closed_form::symmetric_player_cost(net)?;
    let opt = net.demand() * net.local_latency().value(net.demand());
    Ok(cost / opt)
}

/// Worst verified Nash equilibrium cost over the social optimum. The worst
/// equilibrium is taken across the closed form and (for up to three players)
/// the grid oracle; the simulated ratio is required to agree with the
/// analytic formula to `1e-9`.
pub fn price_of_anarchy(net: &LbNetwork) -> Result<PoaReport> {
    let ne = closed_form::closed_form_selfish_ne(net)?;
    if !ne.converged {
        return Err(Error::InternalConsistency(
            "the closed-form equilibrium failed best-response verification".into(),
        ));
    }
    let mut worst = ne.total_actual_cost();
    if net.players() <= 3 {
        let doc = DocMatrix::selfish(net.players());
        for found in grid_oracle_ne(net, &doc, DEFAULT_ORACLE_STEP)? {
            if found.converged {
                worst = worst.max(found.total_actual_cost());
            }
        }
    }
    let opt = social_optimum(net)?;
    let poa = worst / opt.total_cost;
    let formula = closed_form_poa(net)?;
    if (poa - formula).abs() > 1e-9 {
        return Err(Error::InternalConsistency(format!(
            "simulated anarchy ratio {poa} disagrees with the formula {formula}"
        )));
    }
    Ok(PoaReport {
        worst_ne_total_cost: worst,
        opt_total_cost: opt.total_cost,
        poa,
        closed_form_poa: Some(formula),
    })
}

/// Anarchy ratio of the non-atomic reinterpretation of the same network.
pub fn wardrop_price_of_anarchy(net: &LbNetwork) -> Result<f64> {
    let wardrop = wardrop_equilibrium(net)?;
    let opt = social_optimum(net)?;
    Ok(wardrop.total_cost / opt.total_cost)
}

#[derive(Debug, Clone)]
pub struct VouPoint {
    pub beta: f64,
    /// Best verified equilibrium cost of the altruist at this beta, if any
    /// equilibrium was found.
    pub best_cost: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct VouReport {
    pub player: usize,
    /// The altruist's cost at the best selfish equilibrium.
    pub selfish_best_cost: f64,
    /// Infimum of the altruist's actual cost over the swept betas.
    pub altruistic_best_cost: Option<f64>,
    pub vou: Option<f64>,
    pub beta_at_best: Option<f64>,
    /// Analytic two-player lower bound `(r L + (r/2 - zeta) c) / (2 r L)`.
    pub analytic_lower_bound: Option<f64>,
    pub per_beta: Vec<VouPoint>,
}

/// Default sweep: 101 evenly spaced points on `(0, 1]` plus the analytic
/// threshold candidates `1/n + 1e-6` and `(n-1)/n + 1e-6`.
pub fn default_beta_grid(players: usize) -> Vec<f64> {
    let mut grid: Vec<f64> = (1..=101).map(|k| k as f64 / 101.0).collect();
    grid.push(1.0 / players as f64 + 1e-6);
    grid.push((players - 1) as f64 / players as f64 + 1e-6);
    grid.retain(|&b| b > 0.0 && b <= 1.0);
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    grid.dedup_by(|a, b| (*a - *b).abs() <= 1e-12);
    grid
}

/// Sweeps the altruism weight of `player` over `beta_grid`, collects every
/// verified equilibrium of the resulting game (best-response dynamics from
/// pure-local and from the selfish equilibrium, plus the grid oracle for up
/// to three players) and reports the ratio of the player's selfish
/// equilibrium cost to the infimum of their actual cost across the sweep.
/// When no beta yields a verified equilibrium the ratio is reported as
/// unavailable rather than guessed.
pub fn value_of_unilateral_altruism(
    net: &LbNetwork,
    player: usize,
    beta_grid: &[f64],
) -> Result<VouReport> {
    let n = net.players();
    if player >= n {
        return Err(Error::InvalidParameter(format!(
            "player index {player} out of range for {n} players"
        )));
    }
    if beta_grid.is_empty() {
        return Err(Error::Configuration("the beta grid is empty".into()));
    }
    for &beta in beta_grid {
        if !(beta > 0.0 && beta <= 1.0) {
            return Err(Error::Configuration(format!(
                "beta values must lie in (0, 1], got {beta}"
            )));
        }
    }

    let selfish = closed_form::closed_form_selfish_ne(net)?;
    if !selfish.converged {
        return Err(Error::InternalConsistency(
            "the closed-form selfish equilibrium failed verification".into(),
        ));
    }
    let selfish_best_cost = selfish.actual_costs[player];

    let pure_local = FlowProfile::pure_local(net);
    let params = DynamicsParams {
        max_rounds: SWEEP_DYNAMICS_ROUNDS,
        ..DynamicsParams::default()
    };

    let mut per_beta = Vec::with_capacity(beta_grid.len());
    let mut best: Option<(f64, f64)> = None; // (cost, beta)
    for &beta in beta_grid {
        let doc = DocMatrix::unilateral(n, player, beta)?;
        let mut candidates: Vec<EquilibriumResult> = Vec::new();
        candidates.push(br_dynamics(net, &doc, &pure_local, &params)?.result);
        candidates.push(br_dynamics(net, &doc, &selfish.flows, &params)?.result);
        if n <= 3 {
            let step = if n == 2 { DEFAULT_ORACLE_STEP } else { 2.5e-2 };
            candidates.extend(grid_oracle_ne(net, &doc, step)?);
        }
        let mut best_here: Option<f64> = None;
        for candidate in candidates.iter().filter(|c| c.converged) {
            let cost = candidate.actual_costs[player];
            if best_here.is_none_or(|b| cost < b) {
                best_here = Some(cost);
            }
        }
        if let Some(cost) = best_here {
            if best.is_none_or(|(b, _)| cost < b) {
                best = Some((cost, beta));
            }
        }
        per_beta.push(VouPoint {
            beta,
            best_cost: best_here,
        });
    }

    let analytic_lower_bound = if n == 2 {
        closed_form::symmetric_player_cost(net).ok().map(|cost| {
            cost / (2.0 * net.demand() * net.local_latency().value(net.demand()))
        })
    } else {
        None
    };

    Ok(VouReport {
        player,
        selfish_best_cost,
        altruistic_best_cost: best.map(|(cost, _)| cost),
        vou: best.map(|(cost, _)| selfish_best_cost / cost),
        beta_at_best: best.map(|(_, beta)| beta),
        analytic_lower_bound,
        per_beta,
    })
}

#[derive(Debug, Clone)]
pub enum Spillover {
    /// The load-taking profile is an equilibrium at this beta; deltas are
    /// selfish-equilibrium cost minus altruistic-equilibrium cost per player.
    Applicable {
        selfish_costs: Vec<f64>,
        altruistic_costs: Vec<f64>,
        deltas: Vec<f64>,
    },
    NotApplicable { reason: String },
}

/// Per-player cost improvement when `player` commits to altruism weight
/// `beta` and the game settles on the load-taking profile.
pub fn altruism_benefit_spillover(net: &LbNetwork, player: usize, beta: f64) -> Result<Spillover> {
    let doc = DocMatrix::unilateral(net.players(), player, beta)?;
    let profile = load_taker_profile(net, player)?;
    let verdict = verify_equilibrium(net, &doc, &profile, EPS_EQ)?;
    if !verdict.is_pass() {
        return Ok(Spillover::NotApplicable {
            reason: format!(
                "the load-taking profile is not an equilibrium at beta = {beta}: {verdict:?}"
            ),
        });
    }
    let selfish = closed_form::closed_form_selfish_ne(net)?;
    let altruistic_costs = crate::game::cost::all_costs(net, &profile)?;
    let deltas: Vec<f64> = selfish
        .actual_costs
        .iter()
        .zip(&altruistic_costs)
        .map(|(s, a)| s - a)
        .collect();
    Ok(Spillover::Applicable {
        selfish_costs: selfish.actual_costs,
        altruistic_costs,
        deltas,
    })
}

/// Empirical lower edge of the per-opponent cooperation weights for which
/// the load-taking profile survives verification, located by bisection.
pub fn load_taking_threshold_per_opponent(net: &LbNetwork, player: usize) -> Result<f64> {
    let n = net.players();
    let profile = load_taker_profile(net, player)?;
    let accepts = |w: f64| -> Result<bool> {
        let doc = DocMatrix::unilateral_per_opponent(n, player, w)?;
        Ok(verify_equilibrium(net, &doc, &profile, EPS_EQ)?.is_pass())
    };
    let mut hi = 1.0 / (n - 1) as f64;
    if !accepts(hi)? {
        return Err(Error::InternalConsistency(
            "the load-taking profile fails even at the maximal cooperation weight".into(),
        ));
    }
    let mut lo = 1e-9;
    if accepts(lo)? {
        return Ok(lo);
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if accepts(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
