//! Flow profiles on load-balancing networks.

use crate::error::{Error, Result, Violation};
use crate::network::LbNetwork;

/// Absolute tolerance for all flow-conservation checks.
pub const FLOW_TOL: f64 = 1e-12;

/// One routing strategy per player: the flow kept on the player's local link
/// plus the flows pushed onto each cross link. Traffic on the cross link
/// `i -> j` implicitly continues over `j`'s local link, so a profile is fully
/// determined by these decision variables.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowProfile {
    demand: f64,
    local: Vec<f64>,
    /// Row `i` holds the cross flows of player `i` toward the other sources,
    /// in ascending source order with `i` itself skipped.
    cross: Vec<Vec<f64>>,
}

#[inline]
fn slot(i: usize, j: usize) -> usize {
    debug_assert_ne!(i, j);
    if j < i {
        j
    } else {
        j - 1
    }
}

impl FlowProfile {
    /// Every player routes the full demand over their local link.
    pub fn pure_local(net: &LbNetwork) -> Self {
        let n = net.players();
        FlowProfile {
            demand: net.demand(),
            local: vec![net.demand(); n],
            cross: vec![vec![0.0; n - 1]; n],
        }
    }

    /// Builds the profile where player `i` keeps `locals[i]` on the local link
    /// and splits the residual demand equally over the cross links.
    pub fn from_local_flows(net: &LbNetwork, locals: &[f64]) -> Result<Self> {
        let n = net.players();
        if locals.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: locals.len(),
            });
        }
        let r = net.demand();
        let mut local = Vec::with_capacity(n);
        let mut cross = Vec::with_capacity(n);
        for (i, &p) in locals.iter().enumerate() {
            if p < -FLOW_TOL || p > r + FLOW_TOL {
                return Err(Error::InvalidParameter(format!(
                    "local flow of player {i} must lie in [0, {r}], got {p}"
                )));
            }
            let p = p.clamp(0.0, r);
            local.push(p);
            cross.push(vec![(r - p) / (n - 1) as f64; n - 1]);
        }
        Ok(FlowProfile {
            demand: r,
            local,
            cross,
        })
    }

    /// Builds a profile from explicit per-player rows. `cross[i]` lists the
    /// flows toward the other sources in ascending order with `i` skipped.
    pub fn from_parts(net: &LbNetwork, local: Vec<f64>, cross: Vec<Vec<f64>>) -> Result<Self> {
        let profile = FlowProfile {
            demand: net.demand(),
            local,
            cross,
        };
        profile.validate(net)?;
        Ok(profile)
    }

    pub fn players(&self) -> usize {
        self.local.len()
    }

    pub fn demand(&self) -> f64 {
        self.demand
    }

    pub fn local_flows(&self) -> &[f64] {
        &self.local
    }

    pub fn local_flow(&self, i: usize) -> f64 {
        self.local[i]
    }

    /// Flow player `i` pushes onto the cross link toward source `j`.
    pub fn cross_flow(&self, i: usize, j: usize) -> f64 {
        self.cross[i][slot(i, j)]
    }

    /// Total flow on the local link of source `j`, second hops included.
    pub fn total_local(&self, j: usize) -> f64 {
        let mut total = self.local[j];
        for i in 0..self.players() {
            if i != j {
                total += self.cross_flow(i, j);
            }
        }
        total
    }

    /// Largest per-player local-flow difference between two profiles.
    pub fn sup_distance(&self, other: &FlowProfile) -> f64 {
        self.local
            .iter()
            .zip(&other.local)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Replaces player `i`'s row by `p` local and an equal cross split.
    pub(crate) fn set_local_equal_split(&mut self, i: usize, p: f64) {
        let n = self.players();
        let p = p.clamp(0.0, self.demand);
        self.local[i] = p;
        let share = (self.demand - p) / (n - 1) as f64;
        for s in self.cross[i].iter_mut() {
            *s = share;
        }
    }

    /// Checks dimensions, non-negativity and per-player conservation within
    /// [`FLOW_TOL`]; collects every failed constraint.
    pub fn validate(&self, net: &LbNetwork) -> Result<()> {
        let n = net.players();
        if self.local.len() != n || self.cross.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: self.local.len().max(self.cross.len()),
            });
        }
        for row in &self.cross {
            if row.len() != n - 1 {
                return Err(Error::DimensionMismatch {
                    expected: n - 1,
                    got: row.len(),
                });
            }
        }
        let r = net.demand();
        let mut violations = Vec::new();
        for i in 0..n {
            if self.local[i] < -FLOW_TOL {
                violations.push(Violation {
                    player: i,
                    constraint: "negative local flow".into(),
                    magnitude: -self.local[i],
                });
            }
            for (s, &f) in self.cross[i].iter().enumerate() {
                if f < -FLOW_TOL {
                    violations.push(Violation {
                        player: i,
                        constraint: format!("negative cross flow (slot {s})"),
                        magnitude: -f,
                    });
                }
            }
            let shipped: f64 = self.local[i] + self.cross[i].iter().sum::<f64>();
            if (shipped - r).abs() > FLOW_TOL {
                violations.push(Violation {
                    player: i,
                    constraint: format!("demand conservation: ships {shipped}, needs {r}"),
                    magnitude: (shipped - r).abs(),
                });
            }
        }
        if violations.is_empty() {
            Ok(())
        } else {
            Err(Error::InfeasibleProfile(violations))
        }
    }
}
