//! Closed-form symmetric Nash equilibrium for the steep-elbow family.
//!
//! With elbow local links pinned at the demand and constant-cost cross
//! links, every local link carries exactly `r` at any symmetric equal-split
//! profile, so the stationarity condition of a player's piecewise-quadratic
//! cost is linear and solves in closed form: equating the own marginal cost
//! `p * g` with the cross-side marginal `c + (r - p) * g / (n - 1)` gives
//!
//! ```text
//! p* = r / n + (n - 1) * c * delta / (n * L),      zeta = c * delta / (2 L)
//! J* = r L + ((n - 1) / n) * (r - 2 zeta) * c
//! ```
//!
//! For two players this is `r/2 + zeta` with cost `rL + (r/2 - zeta) c`.

use crate::doc::DocMatrix;
use crate::error::{Error, Result};
use crate::flow::FlowProfile;
use crate::game::{verify, EquilibriumResult, Method, EPS_EQ};
use crate::latency::LatencyFn;
use crate::network::LbNetwork;

/// Regime parameters `(L, delta, c)` of a network in the steep-elbow family.
pub(crate) fn regime(net: &LbNetwork) -> Result<(f64, f64, f64)> {
    let (knee_latency, width, knee, offset) = match *net.local_latency() {
        LatencyFn::Elbow {
            knee_latency,
            width,
            knee,
            offset,
        } => (knee_latency, width, knee, offset),
        LatencyFn::Affine { .. } => {
            return Err(Error::ParameterRegime(
                "closed form needs elbow latencies on local links".into(),
            ))
        }
    };
    if offset != 0.0 {
        return Err(Error::ParameterRegime(format!(
            "closed form needs a zero-offset elbow, got offset {offset}"
        )));
    }
    if (knee - net.demand()).abs() > 1e-12 {
        return Err(Error::ParameterRegime(format!(
            "closed form needs the elbow knee at the demand: knee {knee} vs r {}",
            net.demand()
        )));
    }
    let cross = match *net.cross_latency() {
        LatencyFn::Affine { slope: 0.0, intercept } => intercept,
        _ => {
            return Err(Error::ParameterRegime(
                "closed form needs constant-cost cross links".into(),
            ))
        }
    };
    let r = net.demand();
    let gradient_bound = r * knee_latency / width;
    if cross >= gradient_bound {
        return Err(Error::ParameterRegime(format!(
            "c < r*L/delta fails: c = {cross} >= {gradient_bound}"
        )));
    }
    if cross <= knee_latency {
        return Err(Error::ParameterRegime(format!(
            "c > L fails: c = {cross} <= {knee_latency}"
        )));
    }
    if knee_latency <= width {
        return Err(Error::ParameterRegime(format!(
            "L > delta fails: {knee_latency} <= {width}"
        )));
    }
    Ok((knee_latency, width, cross))
}

/// Half the ratio of the cross-link cost to the local marginal latency:
/// `zeta = (1/2) * c / (L / delta)`.
pub fn zeta(net: &LbNetwork) -> Result<f64> {
    let (l, delta, c) = regime(net)?;
    Ok(0.5 * c * delta / l)
}

/// Equilibrium local flow of every player: `r/n + 2 (n-1) zeta / n`.
pub fn symmetric_local_flow(net: &LbNetwork) -> Result<f64> {
    let z = zeta(net)?;
    let n = net.players() as f64;
    Ok(net.demand() / n + 2.0 * (n - 1.0) * z / n)
}

/// Equilibrium cost of every player: `r L + ((n-1)/n) (r - 2 zeta) c`.
pub fn symmetric_player_cost(net: &LbNetwork) -> Result<f64> {
    let (l, _, c) = regime(net)?;
    let z = zeta(net)?;
    let n = net.players() as f64;
    Ok(net.demand() * l + (n - 1.0) / n * (net.demand() - 2.0 * z) * c)
}

/// The unique selfish Nash equilibrium of the steep-elbow family, in closed
/// form, verified against the exact best responses before being reported as
/// converged.
pub fn closed_form_selfish_ne(net: &LbNetwork) -> Result<EquilibriumResult> {
    let flow = symmetric_local_flow(net)?;
    let locals = vec![flow; net.players()];
    let flows = FlowProfile::from_local_flows(net, &locals)?;
    let doc = DocMatrix::selfish(net.players());
    let verified = verify::verify_equilibrium(net, &doc, &flows, EPS_EQ)?.is_pass();
    EquilibriumResult::assemble(net, &doc, flows, verified, 0, Method::ClosedForm)
}
