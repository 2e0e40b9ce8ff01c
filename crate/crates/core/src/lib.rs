//! Equilibrium solvers and efficiency metrics for atomic splittable routing
//! games on load-balancing networks.
//!
//! The model: `n` players, one per source node, each ship a fixed demand to a
//! common destination over a direct local link or two-hop cross detours
//! through the other sources. Local links carry a steep piecewise-linear
//! "elbow" latency, cross links a constant cost. Players may weigh other
//! players' costs into their own objective (degrees of cooperation), which
//! turns the selfish game into a unilaterally altruistic one without leaving
//! the standard Nash framework.
//!
//! The crate provides exact best responses (piecewise-quadratic candidate
//! enumeration), best-response dynamics, closed-form symmetric equilibria,
//! an independent brute-force grid oracle, the social optimum, the
//! non-atomic (Wardrop) equilibrium, and the derived efficiency metrics.

// Parameter validation uses `!(x > 0.0)` on purpose: it rejects NaN, which
// `x <= 0.0` lets through. Index loops over several same-length buffers stay
// index-based for symmetry with the math.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod doc;
pub mod error;
pub mod flow;
pub mod game;
pub mod latency;
pub mod metrics;
pub mod network;
pub mod welfare;

pub use doc::DocMatrix;
pub use error::{Error, Result, Violation};
pub use flow::{FlowProfile, FLOW_TOL};
pub use game::{
    best_response, br_dynamics, closed_form_selfish_ne, grid_oracle_ne, load_taker_profile,
    perceived_cost, player_cost, verify_equilibrium, BestResponse, DynamicsParams, DynamicsRun,
    EquilibriumResult, Method, TraceRound, VerifyOutcome, EPS_EQ, EPS_FIXED_POINT, EPS_TIE,
};
pub use latency::LatencyFn;
pub use metrics::{
    altruism_benefit_spillover, closed_form_poa, default_beta_grid,
    load_taking_threshold_per_opponent, price_of_anarchy, value_of_unilateral_altruism,
    wardrop_price_of_anarchy, PoaReport, Spillover, VouPoint, VouReport, DEFAULT_ORACLE_STEP,
};
pub use network::{Demand, GeneralLink, GeneralNetwork, LbNetwork, ParamSequence};
pub use welfare::{
    beckmann_potential, projected_descent, random_start_descent_gap, social_cost, social_optimum,
    wardrop_equilibrium, OptMethod, SocialOutcome, WardropOutcome, EPS_W,
};
