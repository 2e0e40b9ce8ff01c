//! Scenario files: a TOML description of one batch run.

use serde::{Deserialize, Serialize};

use routing_games::{DocMatrix, LatencyFn, LbNetwork, ParamSequence, Result as CoreResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub network: NetworkSpec,
    #[serde(default)]
    pub doc: DocSpec,
    pub tasks: Vec<Task>,
    #[serde(default)]
    pub solver: SolverKnobs,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum NetworkSpec {
    /// Fully explicit link parameters.
    Explicit {
        players: usize,
        demand: f64,
        local: LatencySpec,
        cross: LatencySpec,
    },
    /// A member of the indexed steep-elbow family.
    Sequence {
        players: usize,
        delta0: f64,
        c0: f64,
        base_latency: f64,
        demand: f64,
        m: u32,
        /// Upper index for the sweep task (inclusive).
        #[serde(default, skip_serializing_if = "Option::is_none")]
        m_to: Option<u32>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LatencySpec {
    Affine {
        slope: f64,
        intercept: f64,
    },
    Elbow {
        knee_latency: f64,
        width: f64,
        knee: f64,
        #[serde(default)]
        offset: f64,
    },
}

impl LatencySpec {
    pub fn build(&self) -> CoreResult<LatencyFn> {
        match *self {
            LatencySpec::Affine { slope, intercept } => LatencyFn::affine(slope, intercept),
            LatencySpec::Elbow {
                knee_latency,
                width,
                knee,
                offset,
            } => LatencyFn::elbow(knee_latency, width, knee, offset),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum DocSpec {
    #[default]
    Selfish,
    /// One unilaterally altruistic player, everyone else selfish.
    Altruistic {
        player: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        beta: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        beta_grid: Option<Vec<f64>>,
    },
    /// Fully explicit weight matrix.
    Matrix { rows: Vec<Vec<f64>> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Nash,
    Wardrop,
    Opt,
    Poa,
    Vou,
    Trace,
    Sweep,
}

impl Task {
    pub fn as_str(&self) -> &'static str {
        match self {
            Task::Nash => "nash",
            Task::Wardrop => "wardrop",
            Task::Opt => "opt",
            Task::Poa => "poa",
            Task::Vou => "vou",
            Task::Trace => "trace",
            Task::Sweep => "sweep",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverKnobs {
    pub eps_fixed_point: f64,
    pub eps_equilibrium: f64,
    pub max_rounds: usize,
    pub grid_step: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub player_order: Option<Vec<usize>>,
    pub seed: u64,
}

impl Default for SolverKnobs {
    fn default() -> Self {
        SolverKnobs {
            eps_fixed_point: routing_games::EPS_FIXED_POINT,
            eps_equilibrium: routing_games::EPS_EQ,
            max_rounds: 10_000,
            grid_step: routing_games::DEFAULT_ORACLE_STEP,
            player_order: None,
            seed: 42,
        }
    }
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Self, String> {
        let scenario: Scenario =
            toml::from_str(text).map_err(|e| format!("scenario parse error: {e}"))?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("scenarios always serialize")
    }

    pub fn players(&self) -> usize {
        match self.network {
            NetworkSpec::Explicit { players, .. } | NetworkSpec::Sequence { players, .. } => {
                players
            }
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        let n = self.players();
        if n < 2 {
            return Err(format!("network.players: need at least 2 players, got {n}"));
        }
        if self.tasks.is_empty() {
            return Err("tasks: at least one task is required".into());
        }
        match &self.network {
            NetworkSpec::Explicit { demand, local, cross, .. } => {
                if !(*demand > 0.0) {
                    return Err(format!("network.demand: must be positive, got {demand}"));
                }
                local
                    .build()
                    .map_err(|e| format!("network.local: {e}"))?;
                cross
                    .build()
                    .map_err(|e| format!("network.cross: {e}"))?;
                if self.tasks.contains(&Task::Sweep) {
                    return Err("tasks: the sweep task needs a sequence network".into());
                }
            }
            NetworkSpec::Sequence {
                delta0,
                c0,
                base_latency,
                demand,
                m,
                m_to,
                ..
            } => {
                ParamSequence::new(*delta0, *c0, *base_latency, *demand)
                    .map_err(|e| format!("network: {e}"))?;
                if *m < 1 {
                    return Err("network.m: sequence indices start at 1".into());
                }
                if self.tasks.contains(&Task::Sweep) {
                    match m_to {
                        None => return Err("network.m_to: the sweep task needs m_to".into()),
                        Some(hi) if hi < m => {
                            return Err(format!("network.m_to: {hi} is below m = {m}"))
                        }
                        _ => {}
                    }
                }
            }
        }
        match &self.doc {
            DocSpec::Selfish => {}
            DocSpec::Altruistic { player, beta, beta_grid } => {
                if *player >= n {
                    return Err(format!(
                        "doc.player: index {player} out of range for {n} players"
                    ));
                }
                if let Some(beta) = beta {
                    if !(*beta > 0.0 && *beta <= 1.0) {
                        return Err(format!("doc.beta: must lie in (0, 1], got {beta}"));
                    }
                }
                if let Some(grid) = beta_grid {
                    for b in grid {
                        if !(*b > 0.0 && *b <= 1.0) {
                            return Err(format!("doc.beta_grid: values must lie in (0, 1], got {b}"));
                        }
                    }
                }
                let needs_beta = self
                    .tasks
                    .iter()
                    .any(|t| matches!(t, Task::Nash | Task::Trace));
                if needs_beta && beta.is_none() {
                    return Err("doc.beta: nash/trace with an altruistic player need beta".into());
                }
            }
            DocSpec::Matrix { rows } => {
                DocMatrix::from_rows(rows.clone()).map_err(|e| format!("doc.rows: {e}"))?;
                if rows.len() != n {
                    return Err(format!(
                        "doc.rows: got {} rows for {n} players",
                        rows.len()
                    ));
                }
            }
        }
        let knobs = &self.solver;
        if !(knobs.eps_fixed_point > 0.0 && knobs.eps_equilibrium > 0.0) {
            return Err("solver: tolerances must be positive".into());
        }
        if !(knobs.grid_step > 0.0) {
            return Err("solver.grid_step: must be positive".into());
        }
        if let Some(order) = &knobs.player_order {
            let mut seen = vec![false; n];
            if order.len() != n {
                return Err(format!(
                    "solver.player_order: need {n} entries, got {}",
                    order.len()
                ));
            }
            for &i in order {
                if i >= n || seen[i] {
                    return Err("solver.player_order: must be a permutation of the players".into());
                }
                seen[i] = true;
            }
        }
        Ok(())
    }

    /// The networks this scenario runs on: one, or the swept family.
    pub fn networks(&self) -> CoreResult<Vec<(Option<u32>, LbNetwork)>> {
        match &self.network {
            NetworkSpec::Explicit {
                players,
                demand,
                local,
                cross,
            } => Ok(vec![(
                None,
                LbNetwork::new(*players, *demand, local.build()?, cross.build()?)?,
            )]),
            NetworkSpec::Sequence {
                players,
                delta0,
                c0,
                base_latency,
                demand,
                m,
                ..
            } => {
                let seq = ParamSequence::new(*delta0, *c0, *base_latency, *demand)?;
                Ok(vec![(Some(*m), seq.network(*m, *players)?)])
            }
        }
    }

    pub fn sequence(&self) -> Option<(ParamSequence, u32, u32, usize)> {
        match &self.network {
            NetworkSpec::Sequence {
                players,
                delta0,
                c0,
                base_latency,
                demand,
                m,
                m_to,
            } => ParamSequence::new(*delta0, *c0, *base_latency, *demand)
                .ok()
                .map(|seq| (seq, *m, m_to.unwrap_or(*m), *players)),
            NetworkSpec::Explicit { .. } => None,
        }
    }

    /// The weight matrix for single-equilibrium tasks.
    pub fn doc_matrix(&self) -> Result<DocMatrix, String> {
        let n = self.players();
        match &self.doc {
            DocSpec::Selfish => Ok(DocMatrix::selfish(n)),
            DocSpec::Altruistic { player, beta, .. } => {
                let beta = beta.ok_or("doc.beta: required for this task")?;
                DocMatrix::unilateral(n, *player, beta).map_err(|e| e.to_string())
            }
            DocSpec::Matrix { rows } => {
                DocMatrix::from_rows(rows.clone()).map_err(|e| e.to_string())
            }
        }
    }
}
