//! Load-balancing network topologies and the indexed example family.

use crate::error::{Error, Result, Violation};
use crate::latency::LatencyFn;

/// The symmetric load-balancing network: `n` source nodes, one destination.
///
/// Every source `i` has a local link straight to the destination and one cross
/// link to each other source `j`; traffic sent on the cross link `i -> j`
/// continues over `j`'s local link. All players ship the same demand. Local
/// links share one latency function, cross links another.
#[derive(Debug, Clone, PartialEq)]
pub struct LbNetwork {
    players: usize,
    demand: f64,
    local: LatencyFn,
    cross: LatencyFn,
}

impl LbNetwork {
    pub fn new(players: usize, demand: f64, local: LatencyFn, cross: LatencyFn) -> Result<Self> {
        if players < 2 {
            return Err(Error::InvalidParameter(format!(
                "a load-balancing network needs at least 2 players, got {players}"
            )));
        }
        if !(demand > 0.0) || !demand.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "demand must be positive, got {demand}"
            )));
        }
        Ok(LbNetwork {
            players,
            demand,
            local,
            cross,
        })
    }

    /// The two-player example network used throughout the test suites:
    /// `r = 1`, steep local elbow (`L = 0.1`, `width = 1e-3`) and unit-cost
    /// cross links.
    pub fn canonical() -> Self {
        LbNetwork::new(
            2,
            1.0,
            LatencyFn::elbow(0.1, 1e-3, 1.0, 0.0).unwrap(),
            LatencyFn::constant(1.0).unwrap(),
        )
        .unwrap()
    }

    /// Same link parameters as [`LbNetwork::canonical`] with `n` players.
    pub fn canonical_with_players(players: usize) -> Result<Self> {
        LbNetwork::new(
            players,
            1.0,
            LatencyFn::elbow(0.1, 1e-3, 1.0, 0.0).unwrap(),
            LatencyFn::constant(1.0).unwrap(),
        )
    }

    pub fn players(&self) -> usize {
        self.players
    }

    pub fn demand(&self) -> f64 {
        self.demand
    }

    pub fn local_latency(&self) -> &LatencyFn {
        &self.local
    }

    pub fn cross_latency(&self) -> &LatencyFn {
        &self.cross
    }

    /// `n` local links plus `n (n - 1)` cross links.
    pub fn link_count(&self) -> usize {
        self.players * self.players
    }

    /// Width of the local elbow, when the local latency is an elbow.
    ///
    /// This is the `delta` that strategy points such as the delta load taker
    /// are built from; it is always read from the network, never a constant.
    pub fn local_elbow_width(&self) -> Option<f64> {
        match self.local {
            LatencyFn::Elbow { width, .. } => Some(width),
            LatencyFn::Affine { .. } => None,
        }
    }
}

/// The indexed family of example networks: `delta_m = delta0^m`,
/// `c_m = c0^m`, steep elbows on local links and constant-cost cross links.
///
/// An index `m` is admissible only while `c_m < r * L / delta_m` and
/// `c_m > L > delta_m > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamSequence {
    pub delta0: f64,
    pub c0: f64,
    pub base_latency: f64,
    pub demand: f64,
}

impl ParamSequence {
    pub fn new(delta0: f64, c0: f64, base_latency: f64, demand: f64) -> Result<Self> {
        if !(delta0 > 0.0 && delta0 < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "delta0 must lie in (0, 1), got {delta0}"
            )));
        }
        if !(c0 > 1.0) {
            return Err(Error::InvalidParameter(format!(
                "c0 must exceed 1, got {c0}"
            )));
        }
        if !(base_latency > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "base latency must be positive, got {base_latency}"
            )));
        }
        if !(demand > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "demand must be positive, got {demand}"
            )));
        }
        Ok(ParamSequence {
            delta0,
            c0,
            base_latency,
            demand,
        })
    }

    /// The standard sweep family used by the CLI: `delta0 = 0.1`, `c0 = 2`,
    /// `L = 0.1`, `r = 1`.
    pub fn standard() -> Self {
        ParamSequence::new(0.1, 2.0, 0.1, 1.0).unwrap()
    }

    pub fn delta(&self, m: u32) -> f64 {
        self.delta0.powi(m as i32)
    }

    pub fn cross_cost(&self, m: u32) -> f64 {
        self.c0.powi(m as i32)
    }

    /// Checks the admissibility constraints at index `m`, naming the first
    /// violated inequality.
    pub fn check_regime(&self, m: u32) -> Result<()> {
        if m < 1 {
            return Err(Error::InvalidParameter("sequence index m starts at 1".into()));
        }
        let delta = self.delta(m);
        let c = self.cross_cost(m);
        let l = self.base_latency;
        let gradient_bound = self.demand * l / delta;
        if c >= gradient_bound {
            return Err(Error::ParameterRegime(format!(
                "c_m < r*L/delta_m fails at m = {m}: c_{m} = {c} >= {gradient_bound}"
            )));
        }
        if c <= l {
            return Err(Error::ParameterRegime(format!(
                "c_m > L fails at m = {m}: c_{m} = {c} <= {l}"
            )));
        }
        if l <= delta {
            return Err(Error::ParameterRegime(format!(
                "L > delta_m fails at m = {m}: {l} <= delta_{m} = {delta}"
            )));
        }
        Ok(())
    }

    /// Builds the `n`-player network at index `m`.
    pub fn network(&self, m: u32, players: usize) -> Result<LbNetwork> {
        self.check_regime(m)?;
        let local = LatencyFn::elbow(self.base_latency, self.delta(m), self.demand, 0.0)?;
        let cross = LatencyFn::constant(self.cross_cost(m))?;
        LbNetwork::new(players, self.demand, local, cross)
    }
}

/// A plain directed edge-list network. Feasibility and cost evaluation only;
/// the solvers operate on [`LbNetwork`].
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralNetwork {
    nodes: usize,
    links: Vec<GeneralLink>,
    demands: Vec<Demand>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneralLink {
    pub from: usize,
    pub to: usize,
    pub latency: LatencyFn,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Demand {
    pub source: usize,
    pub sink: usize,
    pub rate: f64,
}

impl GeneralNetwork {
    pub fn new(nodes: usize, links: Vec<GeneralLink>, demands: Vec<Demand>) -> Result<Self> {
        for link in &links {
            if link.from >= nodes || link.to >= nodes {
                return Err(Error::InvalidParameter(format!(
                    "link {} -> {} references a node outside 0..{nodes}",
                    link.from, link.to
                )));
            }
        }
        for demand in &demands {
            if demand.source >= nodes || demand.sink >= nodes {
                return Err(Error::InvalidParameter(
                    "demand references a node outside the graph".into(),
                ));
            }
            if !(demand.rate > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "demand rate must be positive, got {}",
                    demand.rate
                )));
            }
        }
        Ok(GeneralNetwork {
            nodes,
            links,
            demands,
        })
    }

    pub fn links(&self) -> &[GeneralLink] {
        &self.links
    }

    pub fn demands(&self) -> &[Demand] {
        &self.demands
    }

    /// Per-player flow conservation at every node, within `1e-12` absolute.
    pub fn validate_flows(&self, flows: &[Vec<f64>]) -> Result<()> {
        if flows.len() != self.demands.len() {
            return Err(Error::DimensionMismatch {
                expected: self.demands.len(),
                got: flows.len(),
            });
        }
        let tol = 1e-12;
        let mut violations = Vec::new();
        for (player, row) in flows.iter().enumerate() {
            if row.len() != self.links.len() {
                return Err(Error::DimensionMismatch {
                    expected: self.links.len(),
                    got: row.len(),
                });
            }
            for (l, &f) in row.iter().enumerate() {
                if f < -tol {
                    violations.push(Violation {
                        player,
                        constraint: format!("negative flow on link {l}"),
                        magnitude: -f,
                    });
                }
            }
            let demand = self.demands[player];
            for node in 0..self.nodes {
                let mut net_out = 0.0;
                for (l, link) in self.links.iter().enumerate() {
                    if link.from == node {
                        net_out += row[l];
                    }
                    if link.to == node {
                        net_out -= row[l];
                    }
                }
                let want = if node == demand.source {
                    demand.rate
                } else if node == demand.sink {
                    -demand.rate
                } else {
                    0.0
                };
                if (net_out - want).abs() > tol {
                    violations.push(Violation {
                        player,
                        constraint: format!("conservation at node {node}"),
                        magnitude: (net_out - want).abs(),
                    });
                }
            }
        }
        if violations.is_empty() {
            Ok(())
        } else {
            Err(Error::InfeasibleProfile(violations))
        }
    }

    pub fn player_cost(&self, flows: &[Vec<f64>], player: usize) -> Result<f64> {
        self.validate_flows(flows)?;
        let mut cost = 0.0;
        for (l, link) in self.links.iter().enumerate() {
            let total: f64 = flows.iter().map(|row| row[l]).sum();
            cost += flows[player][l] * link.latency.value(total.max(0.0));
        }
        Ok(cost)
    }

    pub fn total_cost(&self, flows: &[Vec<f64>]) -> Result<f64> {
        let mut total = 0.0;
        for player in 0..self.demands.len() {
            total += self.player_cost(flows, player)?;
        }
        Ok(total)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sequence_index_two_is_admissible() {
        let seq = ParamSequence::new(0.1, 2.0, 0.1, 1.0).unwrap();
        let net = seq.network(2, 2).unwrap();
        match *net.local_latency() {
            LatencyFn::Elbow {
                knee_latency,
                width,
                knee,
                offset,
            } => {
                assert_eq!(knee_latency, 0.1);
                assert!((width - 0.01).abs() < 1e-16);
                assert_eq!(knee, 1.0);
                assert_eq!(offset, 0.0);
            }
            LatencyFn::Affine { .. } => panic!("local links must be elbows"),
        }
        assert_eq!(*net.cross_latency(), LatencyFn::constant(4.0).unwrap());
        // 4 < 1 * 0.1 / 0.01 = 10 keeps the gradient bound.
        assert!(seq.check_regime(2).is_ok());
    }

    #[test]
    fn sequence_index_one_names_the_gradient_bound() {
        let seq = ParamSequence::new(0.1, 2.0, 0.1, 1.0).unwrap();
        match seq.network(1, 2) {
            Err(Error::ParameterRegime(msg)) => {
                assert!(msg.contains("c_m < r*L/delta_m"), "got: {msg}")
            }
            other => panic!("expected a parameter-regime error, got {other:?}"),
        }
    }

    #[test]
    fn sequence_rejects_bad_seeds() {
        assert!(ParamSequence::new(1.2, 2.0, 0.1, 1.0).is_err());
        assert!(ParamSequence::new(0.1, 0.9, 0.1, 1.0).is_err());
    }

    #[test]
    fn general_network_conservation() {
        // source 0 -> {direct link, detour via node 1} -> sink 2
        let net = GeneralNetwork::new(
            3,
            vec![
                GeneralLink {
                    from: 0,
                    to: 2,
                    latency: LatencyFn::affine(1.0, 0.0).unwrap(),
                },
                GeneralLink {
                    from: 0,
                    to: 1,
                    latency: LatencyFn::constant(0.5).unwrap(),
                },
                GeneralLink {
                    from: 1,
                    to: 2,
                    latency: LatencyFn::affine(2.0, 0.0).unwrap(),
                },
            ],
            vec![Demand {
                source: 0,
                sink: 2,
                rate: 1.0,
            }],
        )
        .unwrap();

        let ok = vec![vec![0.6, 0.4, 0.4]];
        assert!(net.validate_flows(&ok).is_ok());
        // direct 0.6 * 0.6 + detour 0.4 * (0.5 + 0.8)
        let cost = net.player_cost(&ok, 0).unwrap();
        assert!((cost - (0.36 + 0.4 * 1.3)).abs() < 1e-12);

        let broken = vec![vec![0.6, 0.4, 0.3]];
        assert!(matches!(
            net.validate_flows(&broken),
            Err(Error::InfeasibleProfile(_))
        ));
    }
}
