//! JSON scenario files.
//!
//! ```json
//! {
//!   "graph":   {"n": 2, "m": 1, "edges": [[1, 2], [3, 2]]},
//!   "leaders": {"mu": 0.5,
//!               "trajectory": {"kind": "circle", "R": 2.0, "omega": 0.5, "theta0": 0.0},
//!               "offsets": [[1, 1, 0.1], [-1, 1, -0.1], [0, -1, 0.0]]},
//!   "gains":   {"g1": 1, "g2": 1, "g3": 1, "g4": 4, "gamma1": 1, "gamma2": 1},
//!   "sim":     {"dt": 0.001, "tFinal": 40, "logEvery": 10, "seed": 7}
//! }
//! ```
//!
//! Edge indices are 1-based; followers are `1..=n`, leaders `n+1..=n+m`, and a
//! leader link is written `[leader, follower]`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::InteractionGraph;
use crate::leaders::{LeaderModel, Trajectory};
use crate::observer::{AgentState, Gains};
use crate::pose::{Pose, Vec2};
use crate::scalar::Real;
use crate::sim::{default_initial_states, ScenarioConfig};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub graph: GraphSpec,
    pub leaders: LeadersSpec,
    pub gains: Gains<f64>,
    pub sim: SimSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSpec {
    pub n: usize,
    pub m: usize,
    pub edges: Vec<[usize; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct LeadersSpec {
    pub mu: f64,
    pub trajectory: TrajectorySpec,
    pub offsets: Vec<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta_bar_horizon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta_bar_samples: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum TrajectorySpec {
    Stationary {
        pose: [f64; 3],
    },
    Line {
        origin: [f64; 3],
        velocity: [f64; 3],
    },
    Circle {
        #[serde(rename = "R")]
        radius: f64,
        omega: f64,
        #[serde(default)]
        theta0: f64,
        #[serde(default)]
        spin: bool,
        #[serde(default)]
        center: [f64; 2],
    },
    Lissajous {
        center: [f64; 3],
        amplitude: [f64; 3],
        frequency: [f64; 3],
        #[serde(default)]
        phase: [f64; 3],
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialState {
    pub eta: [f64; 3],
    #[serde(default)]
    pub phi: [f64; 3],
    #[serde(default)]
    pub rho: [f64; 3],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct SimSpec {
    pub dt: f64,
    pub t_final: f64,
    #[serde(default = "default_log_every")]
    pub log_every: usize,
    #[serde(default)]
    pub seed: u64,
    /// Half-width of the random position box for default initial states.
    #[serde(default = "default_init_box")]
    pub init_box: f64,
    #[serde(default = "default_init_theta_box")]
    pub init_theta_box: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<Vec<InitialState>>,
}

fn default_log_every() -> usize {
    10
}

fn default_init_box() -> f64 {
    5.0
}

fn default_init_theta_box() -> f64 {
    1.0
}

/// Malformed scenario text, with the position serde reports.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

fn pose<T: Real>(a: [f64; 3]) -> Pose<T> {
    Pose::new(T::lit(a[0]), T::lit(a[1]), T::lit(a[2]))
}

impl TrajectorySpec {
    pub fn build<T: Real>(&self) -> Trajectory<T> {
        match *self {
            TrajectorySpec::Stationary { pose: p } => Trajectory::Stationary { pose: pose(p) },
            TrajectorySpec::Line { origin, velocity } => {
                Trajectory::Line { origin: pose(origin), velocity: pose(velocity) }
            }
            TrajectorySpec::Circle { radius, omega, theta0, spin, center } => Trajectory::Circle {
                center: Vec2::new(T::lit(center[0]), T::lit(center[1])),
                radius: T::lit(radius),
                omega: T::lit(omega),
                theta0: T::lit(theta0),
                spin,
            },
            TrajectorySpec::Lissajous { center, amplitude, frequency, phase } => Trajectory::Lissajous {
                center: pose(center),
                amplitude: pose(amplitude),
                frequency: pose(frequency),
                phase: pose(phase),
            },
        }
    }
}

impl Scenario {
    pub fn from_json(text: &str) -> std::result::Result<Self, ParseError> {
        serde_json::from_str(text).map_err(|e| ParseError {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn build_graph(&self) -> Result<InteractionGraph> {
        let edges: Vec<(usize, usize)> = self.graph.edges.iter().map(|e| (e[0], e[1])).collect();
        InteractionGraph::new(self.graph.n, self.graph.m, &edges)
    }

    pub fn build_model<T: Real>(&self) -> Result<LeaderModel<T>> {
        LeaderModel::new(
            self.leaders.trajectory.build(),
            self.leaders.offsets.iter().map(|&d| pose(d)).collect(),
            T::lit(self.leaders.mu),
        )
    }

    pub fn build_gains<T: Real>(&self) -> Gains<T> {
        let g = &self.gains;
        Gains {
            g1: T::lit(g.g1),
            g2: T::lit(g.g2),
            g3: T::lit(g.g3),
            g4: T::lit(g.g4),
            gamma1: T::lit(g.gamma1),
            gamma2: T::lit(g.gamma2),
        }
    }

    /// Assembles a run configuration; `seed` overrides the file's seed for
    /// default initial states.
    pub fn to_config<T: Real>(&self, seed: Option<u64>) -> Result<ScenarioConfig<T>> {
        let graph = self.build_graph()?;
        let model = self.build_model::<T>()?;
        if model.m() != graph.m() {
            return Err(Error::InvalidParameter(format!(
                "{} offsets for m = {} leaders",
                model.m(),
                graph.m()
            )));
        }
        let initial = match &self.sim.initial {
            Some(list) => {
                list.iter().map(|s| AgentState::new(pose(s.eta), pose(s.phi), pose(s.rho))).collect()
            }
            None => default_initial_states(
                graph.n(),
                &model,
                seed.unwrap_or(self.sim.seed),
                T::lit(self.sim.init_box),
                T::lit(self.sim.init_theta_box),
            ),
        };
        let eta_bar_window = match (self.leaders.eta_bar_horizon, self.leaders.eta_bar_samples) {
            (None, None) => None,
            (h, s) => {
                let (dh, ds) = model.trajectory().sup_window();
                Some((h.map(T::lit).unwrap_or(dh), s.unwrap_or(ds)))
            }
        };
        Ok(ScenarioConfig {
            graph,
            model,
            gains: self.build_gains(),
            initial,
            dt: T::lit(self.sim.dt),
            t_final: T::lit(self.sim.t_final),
            log_every: self.sim.log_every,
            eta_bar_window,
            override_validation: false,
        })
    }
}
