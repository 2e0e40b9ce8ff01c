//! Centralized welfare benchmarks: social optimum and the non-atomic
//! (Wardrop) equilibrium.

pub mod social;
pub mod wardrop;

pub use social::{
    projected_descent, random_start_descent_gap, social_cost, social_optimum, OptMethod,
    SocialOutcome,
};
pub use wardrop::{beckmann_potential, wardrop_equilibrium, WardropOutcome, EPS_W};
