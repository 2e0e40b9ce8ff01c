//! Exact best responses by piecewise-quadratic candidate enumeration.
//!
//! With every link latency piecewise linear and every link total affine in
//! the player's local flow `p`, the perceived cost is piecewise quadratic in
//! `p` on `[0, r]`. Its global minimizer therefore lies at an interval
//! endpoint, at a breakpoint induced by some latency kink, or at the vertex
//! of a quadratic piece. Enumerating those candidates and evaluating the true
//! objective at each is exact; no iterative optimization is involved.

use crate::doc::DocMatrix;
use crate::error::{Error, Result};
use crate::flow::FlowProfile;
use crate::network::LbNetwork;

/// Cost tolerance within which candidate minimizers count as tied.
pub const EPS_TIE: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct BestResponse {
    /// Minimizing local flow; residual demand splits equally on cross links.
    pub local_flow: f64,
    /// Perceived cost at the minimizer.
    pub perceived_cost: f64,
    /// All candidate flows tied with the winner within [`EPS_TIE`]; the
    /// winner is the largest of these.
    pub ties: Vec<f64>,
    /// Number of candidate points examined.
    pub candidates: usize,
}

/// Globally minimizes player `player`'s perceived cost over the local flow
/// `p ∈ [0, r]`, holding every other player's row of `profile` fixed. The
/// player's residual demand is split equally across their cross links; for
/// two players this is the full strategy space.
pub fn best_response(
    net: &LbNetwork,
    doc: &DocMatrix,
    player: usize,
    profile: &FlowProfile,
) -> Result<BestResponse> {
    if doc.players() != net.players() {
        return Err(Error::DimensionMismatch {
            expected: net.players(),
            got: doc.players(),
        });
    }
    if player >= net.players() {
        return Err(Error::InvalidParameter(format!(
            "player index {player} out of range for {} players",
            net.players()
        )));
    }
    profile.validate(net)?;

    let view = Objective::new(net, doc, player, profile);
    let r = net.demand();

    let mut candidates = view.breakpoints();
    candidates.push(0.0);
    candidates.push(r);
    candidates.sort_by(|a, b| a.partial_cmp(b).unwrap());
    candidates.dedup_by(|a, b| (*a - *b).abs() <= 1e-13 * r.max(1.0));

    // Vertex of the quadratic on each open piece between breakpoints.
    let mut vertices = Vec::new();
    for pair in candidates.windows(2) {
        let (lo, hi) = (pair[0], pair[1]);
        if hi - lo <= 1e-13 * r.max(1.0) {
            continue;
        }
        let mid = 0.5 * (lo + hi);
        let (slope, half_curvature) = view.slope_and_curvature(mid);
        if half_curvature > 1e-12 {
            let vertex = mid - slope / (2.0 * half_curvature);
            if vertex > lo && vertex < hi {
                vertices.push(vertex);
            }
        }
    }
    candidates.extend(vertices);
    candidates.sort_by(|a, b| a.partial_cmp(b).unwrap());
    candidates.dedup_by(|a, b| (*a - *b).abs() <= 1e-13 * r.max(1.0));

    let mut scratch = vec![0.0; 2 * net.players()];
    let values: Vec<f64> = candidates
        .iter()
        .map(|&p| view.value(p, &mut scratch))
        .collect();
    let best_value = values.iter().copied().fold(f64::INFINITY, f64::min);

    let mut ties: Vec<f64> = candidates
        .iter()
        .zip(&values)
        .filter(|(_, &v)| v <= best_value + EPS_TIE)
        .map(|(&p, _)| p)
        .collect();
    ties.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let winner = *ties.last().expect("candidate set is never empty");

    Ok(BestResponse {
        local_flow: winner,
        perceived_cost: view.value(winner, &mut scratch),
        ties,
        candidates: candidates.len(),
    })
}

/// Perceived cost of `player` as a function of their local flow, with the
/// opponents' rows frozen.
struct Objective<'a> {
    net: &'a LbNetwork,
    profile: &'a FlowProfile,
    row: &'a [f64],
    player: usize,
    /// Opponents' contribution to each local link's total.
    base: Vec<f64>,
    /// Per opponent `k`: the constant cross-link part of their cost.
    cross_const: Vec<f64>,
}

impl<'a> Objective<'a> {
    fn new(net: &'a LbNetwork, doc: &'a DocMatrix, player: usize, profile: &'a FlowProfile) -> Self {
        let n = net.players();
        let mut base = vec![0.0; n];
        for (j, b) in base.iter_mut().enumerate() {
            for k in 0..n {
                if k == player || k == j {
                    continue;
                }
                *b += profile.cross_flow(k, j);
            }
            if j != player {
                *b += profile.local_flow(j);
            }
        }
        let mut cross_const = vec![0.0; n];
        for k in 0..n {
            if k == player {
                continue;
            }
            let mut acc = 0.0;
            for j in 0..n {
                if j == k {
                    continue;
                }
                let f = profile.cross_flow(k, j);
                acc += f * net.cross_latency().value(f.max(0.0));
            }
            cross_const[k] = acc;
        }
        Objective {
            net,
            profile,
            row: doc.row(player),
            player,
            base,
            cross_const,
        }
    }

    #[inline]
    fn share(&self) -> f64 {
        1.0 / (self.net.players() - 1) as f64
    }

    #[inline]
    fn total(&self, j: usize, p: f64) -> f64 {
        if j == self.player {
            self.base[j] + p
        } else {
            self.base[j] + (self.net.demand() - p) * self.share()
        }
    }

    /// Flows at which the objective can stop being a single quadratic.
    fn breakpoints(&self) -> Vec<f64> {
        let n = self.net.players();
        let r = self.net.demand();
        let mut points = Vec::new();
        let mut push = |p: f64| {
            if p > 0.0 && p < r {
                points.push(p);
            }
        };
        for kink in self.net.local_latency().kink_points() {
            // Own local link total crosses the kink.
            push(kink - self.base[self.player]);
            // Each opponent's local link total crosses the kink.
            for j in 0..n {
                if j != self.player {
                    push(r - (n - 1) as f64 * (kink - self.base[j]));
                }
            }
        }
        for kink in self.net.cross_latency().kink_points() {
            push(r - (n - 1) as f64 * kink);
        }
        points
    }

    /// True perceived cost at local flow `p`. `scratch` holds `2n` floats.
    fn value(&self, p: f64, scratch: &mut [f64]) -> f64 {
        let n = self.net.players();
        let r = self.net.demand();
        let (totals, lats) = scratch.split_at_mut(n);
        let mut lat_sum = 0.0;
        for j in 0..n {
            totals[j] = self.total(j, p);
            lats[j] = self.net.local_latency().value(totals[j].max(0.0));
            lat_sum += lats[j];
        }
        let s = (r - p) * self.share();
        let mut value = 0.0;
        for (k, &w) in self.row.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            let cost_k = if k == self.player {
                p * lats[k]
                    + (r - p) * self.net.cross_latency().value(s.max(0.0))
                    + s * (lat_sum - lats[k])
            } else {
                let mut acc = self.cross_const[k] + self.profile.local_flow(k) * lats[k];
                for j in 0..n {
                    if j != k {
                        acc += self.profile.cross_flow(k, j) * lats[j];
                    }
                }
                acc
            };
            value += w * cost_k;
        }
        value
    }

    /// First derivative and half the second derivative of the perceived cost
    /// at `p`, valid on the quadratic piece containing `p`. Opponent costs
    /// are linear in `p`, so all curvature comes from the player's own terms.
    fn slope_and_curvature(&self, p: f64) -> (f64, f64) {
        let n = self.net.players();
        let r = self.net.demand();
        let share = self.share();
        let s = (r - p) * share;
        let cross_lat = self.net.cross_latency().value(s.max(0.0));
        let cross_slope = self.net.cross_latency().slope_at(s.max(0.0));

        let mut slope = 0.0;
        let mut half_curvature = 0.0;
        let own_total = self.total(self.player, p).max(0.0);
        let own_lat = self.net.local_latency().value(own_total);
        let own_g = self.net.local_latency().slope_at(own_total);

        for (k, &w) in self.row.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            if k == self.player {
                let mut sum_latency = 0.0;
                let mut sum_slope = 0.0;
                for j in 0..n {
                    if j == k {
                        continue;
                    }
                    let total_j = self.total(j, p).max(0.0);
                    sum_latency += cross_lat + self.net.local_latency().value(total_j);
                    sum_slope += cross_slope + self.net.local_latency().slope_at(total_j);
                }
                let d_own = own_lat + p * own_g - share * sum_latency - s * share * sum_slope;
                slope += w * d_own;
                half_curvature += w * (own_g + share * share * sum_slope);
            } else {
                // d x_j / d p is +1 on the player's link, -share elsewhere.
                let mut d_k = self.profile.local_flow(k)
                    * self.net.local_latency().slope_at(self.total(k, p).max(0.0))
                    * (-share);
                for j in 0..n {
                    if j == k {
                        continue;
                    }
                    let direction = if j == self.player { 1.0 } else { -share };
                    d_k += self.profile.cross_flow(k, j)
                        * self.net.local_latency().slope_at(self.total(j, p).max(0.0))
                        * direction;
                }
                slope += w * d_k;
            }
        }
        (slope, half_curvature)
    }
}
