//! Per-agent distributed reference generator.
//!
//! Each follower keeps a third-order state `(η, φ, ρ)` and drives it with a
//! coupling signal built only from what its neighbors share: follower
//! neighbors expose their own observer state, leader neighbors expose their
//! scaled target `η̃_{L,j}` and the first two derivatives of `η_{L,j}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::InteractionGraph;
use crate::leaders::LeaderModel;
use crate::pose::Pose;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gains<T> {
    pub g1: T,
    pub g2: T,
    pub g3: T,
    pub g4: T,
    pub gamma1: T,
    pub gamma2: T,
}

/// Observer state of one follower: reference pose and its first two rates.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AgentState<T> {
    pub eta: Pose<T>,
    pub phi: Pose<T>,
    pub rho: Pose<T>,
}

/// What a leader shares with the followers listening to it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LeaderSignal<T> {
    /// Local leader index, `0..m`.
    pub index: usize,
    pub scaled_pose: Pose<T>,
    pub velocity: Pose<T>,
    pub acceleration: Pose<T>,
}

/// Everything agent `i` is allowed to read when computing its coupling signal.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct NeighborView<T> {
    pub followers: Vec<(usize, AgentState<T>)>,
    pub leaders: Vec<LeaderSignal<T>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GainReport<T> {
    pub positive: bool,
    pub required_g4: T,
    /// `g4 - n·η̄_c`; non-negative when the gain condition holds.
    pub slack: T,
    pub passed: bool,
}

impl<T: Real> Gains<T> {
    pub fn all_positive(&self) -> bool {
        [self.g1, self.g2, self.g3, self.g4, self.gamma1, self.gamma2]
            .iter()
            .all(|&g| g > T::zero() && g.is_finite())
    }
}

impl<T: Real> AgentState<T> {
    pub fn new(eta: Pose<T>, phi: Pose<T>, rho: Pose<T>) -> Self {
        Self { eta, phi, rho }
    }

    pub fn at_rest(eta: Pose<T>) -> Self {
        Self { eta, phi: Pose::zero(), rho: Pose::zero() }
    }

    pub fn is_finite(&self) -> bool {
        self.eta.is_finite() && self.phi.is_finite() && self.rho.is_finite()
    }

    pub fn max_abs(&self) -> T {
        self.eta.max_abs().max(self.phi.max_abs()).max(self.rho.max_abs())
    }

    /// `self + k·rate`, used by the integrator.
    pub fn axpy(&self, k: T, rate: &Self) -> Self {
        Self {
            eta: self.eta + rate.eta * k,
            phi: self.phi + rate.phi * k,
            rho: self.rho + rate.rho * k,
        }
    }
}

impl<T: Real> NeighborView<T> {
    /// Collects agent `i`'s view at time `t`: the observer states of its
    /// follower neighbors and the signals of the leaders it hears. Nothing
    /// outside row `i` of the adjacency is read.
    pub fn gather(
        graph: &InteractionGraph,
        i: usize,
        states: &[AgentState<T>],
        model: &LeaderModel<T>,
        t: T,
    ) -> Self {
        let followers = graph.follower_neighbors(i).iter().map(|&j| (j, states[j])).collect();
        let leader_ids = graph.leader_neighbors(i);
        let leaders = if leader_ids.is_empty() {
            Vec::new()
        } else {
            let c = model.eval_center(t);
            leader_ids
                .iter()
                .map(|&k| LeaderSignal {
                    index: k,
                    scaled_pose: c.eta + model.offsets()[k] * model.mu(),
                    velocity: c.d1,
                    acceleration: c.d2,
                })
                .collect()
        };
        Self { followers, leaders }
    }
}

/// Local coupling signal `s_i`:
///
/// ```text
/// Σ_f (ρ_i-ρ_j) + g1 Σ_f (φ_i-φ_j) + g2 Σ_f (η_i-η_j)
///   + Σ_l (ρ_i-η̈_L) + g1 Σ_l (φ_i-η̇_L) + g2 Σ_l (η_i-η̃_L)
/// ```
///
/// The leader position term uses the scaled target; the rate terms use the
/// unscaled leader rates, which equal those of the scaled target.
pub fn coupling_signal<T: Real>(
    graph: &InteractionGraph,
    i: usize,
    own: &AgentState<T>,
    view: &NeighborView<T>,
    gains: &Gains<T>,
) -> Result<Pose<T>> {
    let mut d_rho = Pose::zero();
    let mut d_phi = Pose::zero();
    let mut d_eta = Pose::zero();
    for (j, other) in &view.followers {
        if *j >= graph.n() || graph.weight(i, *j) == 0 {
            return Err(Error::InconsistentView { agent: i, neighbor: *j });
        }
        d_rho += own.rho - other.rho;
        d_phi += own.phi - other.phi;
        d_eta += own.eta - other.eta;
    }
    for l in &view.leaders {
        if l.index >= graph.m() || graph.weight(i, graph.n() + l.index) == 0 {
            return Err(Error::InconsistentView { agent: i, neighbor: graph.n() + l.index });
        }
        d_rho += own.rho - l.acceleration;
        d_phi += own.phi - l.velocity;
        d_eta += own.eta - l.scaled_pose;
    }
    Ok(d_rho + d_phi * gains.g1 + d_eta * gains.g2)
}

/// Bounded steering term `g4 s / √(‖s‖² + γ1² e^{-2γ2 t})`; its norm never
/// exceeds `g4`.
pub fn steering_term<T: Real>(s: Pose<T>, gains: &Gains<T>, t: T) -> Pose<T> {
    let fade = gains.gamma1 * (-gains.gamma2 * t).exp();
    let denom = (s.norm_squared() + fade * fade).sqrt();
    if denom == T::zero() {
        // Only reachable once the fade underflows with s = 0.
        return Pose::zero();
    }
    s * (gains.g4 / denom)
}

/// Right-hand side of the observer: `η̇ = φ`, `φ̇ = ρ`,
/// `ρ̇ = -g1 φ - g2 ρ - g3 s - g4 s / √(‖s‖² + γ1² e^{-2γ2 t})`.
pub fn state_derivative<T: Real>(own: &AgentState<T>, s: Pose<T>, gains: &Gains<T>, t: T) -> AgentState<T> {
    let d_rho = -(own.phi * gains.g1) - own.rho * gains.g2 - s * gains.g3 - steering_term(s, gains, t);
    AgentState { eta: own.phi, phi: own.rho, rho: d_rho }
}

/// Every follower's coupling signal, each computed from its own view.
pub fn stacked_coupling<T: Real>(
    graph: &InteractionGraph,
    states: &[AgentState<T>],
    model: &LeaderModel<T>,
    gains: &Gains<T>,
    t: T,
) -> Result<Vec<Pose<T>>> {
    (0..graph.n())
        .map(|i| {
            let view = NeighborView::gather(graph, i, states, model, t);
            coupling_signal(graph, i, &states[i], &view, gains)
        })
        .collect()
}

/// Positivity of all gains and `g4 ≥ n·η̄_c`.
pub fn validate_gains<T: Real>(gains: &Gains<T>, n: usize, eta_bar: T) -> GainReport<T> {
    let positive = gains.all_positive();
    let required_g4 = T::from_count(n) * eta_bar;
    let slack = gains.g4 - required_g4;
    GainReport { positive, required_g4, slack, passed: positive && slack >= T::zero() }
}
