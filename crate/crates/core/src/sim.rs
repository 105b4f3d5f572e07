//! Fixed-step RK4 integration of the coupled follower observers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analysis::{DiagnosticsFrame, Envelope};
use crate::error::{Error, Result};
use crate::graph::{Assumption1Report, InteractionGraph, LaplacianPartition};
use crate::leaders::{Assumption3Report, LeaderModel};
use crate::observer::{coupling_signal, state_derivative, validate_gains, AgentState, GainReport, Gains, NeighborView};
use crate::pose::Pose;
use crate::scalar::Real;

/// Any state component beyond this magnitude counts as divergence.
pub const BLOW_UP_LIMIT: f64 = 1e9;

#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioConfig<T> {
    pub graph: InteractionGraph,
    pub model: LeaderModel<T>,
    pub gains: Gains<T>,
    pub initial: Vec<AgentState<T>>,
    pub dt: T,
    pub t_final: T,
    pub log_every: usize,
    /// Sampling window for `η̄_c`; the trajectory family's own window when `None`.
    pub eta_bar_window: Option<(T, usize)>,
    pub override_validation: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ValidationReport<T> {
    pub assumption1: Assumption1Report,
    /// Built-in trajectory families are smooth with bounded derivatives.
    pub assumption2: bool,
    pub assumption3: Option<Assumption3Report>,
    /// Set when the formation is too degenerate to evaluate.
    pub assumption3_error: Option<String>,
    pub l1_positive_definite: bool,
    pub eta_bar: T,
    pub gain_condition: GainReport<T>,
}

/// Graph, partition, leaders and gains: everything the vector field needs.
#[derive(Clone, Debug)]
pub struct System<T> {
    pub graph: InteractionGraph,
    pub partition: LaplacianPartition<T>,
    pub model: LeaderModel<T>,
    pub gains: Gains<T>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulationRun<T> {
    pub times: Vec<T>,
    /// `states[k][i]`: follower `i` at `times[k]`.
    pub states: Vec<Vec<AgentState<T>>>,
    pub diagnostics: Vec<DiagnosticsFrame<T>>,
    pub envelope: Envelope<T>,
    pub eta_bar: T,
}

impl<T: Real> ValidationReport<T> {
    pub fn passed(&self) -> bool {
        self.failures().is_empty()
    }

    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !self.assumption1.connected_followers {
            out.push("assumption 1: follower graph is not connected".to_string());
        }
        if !self.assumption1.every_follower_reaches_leader {
            out.push("assumption 1: some follower has no path to a leader".to_string());
        }
        if !self.l1_positive_definite {
            out.push("L1 is not positive definite".to_string());
        }
        if let Some(e) = &self.assumption3_error {
            out.push(format!("assumption 3: {e}"));
        }
        if let Some(r) = &self.assumption3 {
            if !r.origin_enclosed {
                out.push("assumption 3: offset polygon does not strictly enclose the origin".to_string());
            }
            if !r.convex {
                out.push("assumption 3: offsets are not in convex position".to_string());
            }
            if !r.theta_straddles_zero {
                out.push("assumption 3: orientation offsets do not straddle zero".to_string());
            }
        }
        if !self.gain_condition.positive {
            out.push("gains must all be positive".to_string());
        }
        if self.gain_condition.slack < T::zero() {
            out.push(format!(
                "gain condition g4 ≥ n·η̄_c violated: slack {} (need g4 ≥ {})",
                self.gain_condition.slack, self.gain_condition.required_g4
            ));
        }
        out
    }
}

impl<T: Real> ScenarioConfig<T> {
    pub fn eta_bar(&self) -> T {
        match self.eta_bar_window {
            Some((horizon, samples)) => self.model.eta_bar(self.gains.g1, self.gains.g2, horizon, samples),
            None => self.model.eta_bar_default(self.gains.g1, self.gains.g2),
        }
    }

    pub fn validate(&self) -> ValidationReport<T> {
        let (assumption3, assumption3_error) = match self.model.check_assumption3() {
            Ok(r) => (Some(r), None),
            Err(e) => (None, Some(e.to_string())),
        };
        let eta_bar = self.eta_bar();
        ValidationReport {
            assumption1: self.graph.check_assumption1(),
            assumption2: true,
            assumption3,
            assumption3_error,
            l1_positive_definite: self.graph.partition::<T>().is_ok(),
            eta_bar,
            gain_condition: validate_gains(&self.gains, self.graph.n(), eta_bar),
        }
    }

    fn check_shape(&self) -> Result<()> {
        if !(self.dt > T::zero()) || !self.dt.is_finite() {
            return Err(Error::InvalidParameter(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_final >= self.dt) || !self.t_final.is_finite() {
            return Err(Error::InvalidParameter(format!("tFinal must be at least dt, got {}", self.t_final)));
        }
        if self.log_every == 0 {
            return Err(Error::InvalidParameter("logEvery must be at least 1".into()));
        }
        if self.initial.len() != self.graph.n() {
            return Err(Error::InvalidParameter(format!(
                "{} initial states for {} followers",
                self.initial.len(),
                self.graph.n()
            )));
        }
        if self.model.m() != self.graph.m() {
            return Err(Error::InvalidParameter(format!(
                "{} leader offsets for {} leaders in the graph",
                self.model.m(),
                self.graph.m()
            )));
        }
        if self.initial.iter().any(|s| !s.is_finite()) {
            return Err(Error::InvalidParameter("initial states must be finite".into()));
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        (self.t_final / self.dt).round().to_usize().unwrap_or(0).max(1)
    }
}

impl<T: Real> System<T> {
    pub fn new(graph: InteractionGraph, model: LeaderModel<T>, gains: Gains<T>) -> Result<Self> {
        let partition = graph.partition()?;
        Ok(Self { graph, partition, model, gains })
    }

    /// Rate of every follower at time `t`; each agent sees only its own view.
    pub fn derivative(&self, states: &[AgentState<T>], t: T) -> Result<Vec<AgentState<T>>> {
        (0..self.graph.n())
            .map(|i| {
                let view = NeighborView::gather(&self.graph, i, states, &self.model, t);
                let s = coupling_signal(&self.graph, i, &states[i], &view, &self.gains)?;
                Ok(state_derivative(&states[i], s, &self.gains, t))
            })
            .collect()
    }

    /// One classical RK4 step. Substages use times `t`, `t + dt/2`, `t + dt`.
    pub fn step(&self, states: &[AgentState<T>], t: T, dt: T) -> Result<Vec<AgentState<T>>> {
        if !(dt > T::zero()) {
            return Err(Error::InvalidParameter(format!("dt must be positive, got {dt}")));
        }
        let half = dt * T::lit(0.5);
        let shift = |base: &[AgentState<T>], k: T, rate: &[AgentState<T>]| -> Vec<AgentState<T>> {
            base.iter().zip(rate).map(|(s, r)| s.axpy(k, r)).collect()
        };
        let k1 = self.derivative(states, t)?;
        let k2 = self.derivative(&shift(states, half, &k1), t + half)?;
        let k3 = self.derivative(&shift(states, half, &k2), t + half)?;
        let k4 = self.derivative(&shift(states, dt, &k3), t + dt)?;
        let sixth = dt / T::lit(6.0);
        let two = T::lit(2.0);
        let next: Vec<AgentState<T>> = states
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let combine = |a: Pose<T>, b: Pose<T>, c: Pose<T>, d: Pose<T>| (a + b * two + c * two + d) * sixth;
                AgentState {
                    eta: s.eta + combine(k1[i].eta, k2[i].eta, k3[i].eta, k4[i].eta),
                    phi: s.phi + combine(k1[i].phi, k2[i].phi, k3[i].phi, k4[i].phi),
                    rho: s.rho + combine(k1[i].rho, k2[i].rho, k3[i].rho, k4[i].rho),
                }
            })
            .collect();
        if next.iter().any(|s| !s.is_finite()) {
            return Err(Error::NonFiniteState { t: (t + dt).as_f64() });
        }
        Ok(next)
    }
}

/// Initial observer states: `η` uniform in a box around the leader centroid
/// at `t = 0`, `φ = ρ = 0`. Deterministic for a given seed.
pub fn default_initial_states<T: Real>(
    n: usize,
    model: &LeaderModel<T>,
    seed: u64,
    position_half_width: T,
    theta_half_width: T,
) -> Vec<AgentState<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = T::from_count(model.m());
    let centroid = model.eval_center(T::zero()).eta + model.offsets().iter().copied().sum::<Pose<T>>() * (T::one() / m);
    let mut uniform = |w: T| T::lit(rng.gen_range(-1.0..=1.0)) * w;
    (0..n)
        .map(|_| {
            let dx = uniform(position_half_width);
            let dy = uniform(position_half_width);
            let dth = uniform(theta_half_width);
            AgentState::at_rest(centroid + Pose::new(dx, dy, dth))
        })
        .collect()
}

/// Integrates the scenario, logging every `log_every` steps plus the final
/// step.
pub fn run<T: Real>(config: &ScenarioConfig<T>) -> Result<SimulationRun<T>> {
    run_with(config, |_, _| {})
}

/// As [`run`], calling `on_frame` with each logged state and its diagnostics
/// as soon as they are produced, so callers can stream output that survives a
/// later divergence.
pub fn run_with<T: Real>(
    config: &ScenarioConfig<T>,
    mut on_frame: impl FnMut(&[AgentState<T>], &DiagnosticsFrame<T>),
) -> Result<SimulationRun<T>> {
    config.check_shape()?;
    let report = config.validate();
    if !config.override_validation && !report.passed() {
        return Err(Error::ValidationFailed(report.failures().join("; ")));
    }
    let system = System::new(config.graph.clone(), config.model.clone(), config.gains)?;
    let eta_bar = report.eta_bar;

    let mut states = config.initial.clone();
    let s0 = crate::analysis::big_s(&states, &system.partition, &system.model, &system.gains, T::zero());
    let envelope = Envelope::new(crate::analysis::v1(&s0, &system.partition), &system.gains, &system.partition, eta_bar);

    let mut out = SimulationRun { times: Vec::new(), states: Vec::new(), diagnostics: Vec::new(), envelope, eta_bar };
    let mut log = |out: &mut SimulationRun<T>, states: &[AgentState<T>], t: T| -> Result<()> {
        let frame =
            DiagnosticsFrame::compute(&system.graph, &system.partition, &system.model, &system.gains, states, t, &envelope)?;
        on_frame(states, &frame);
        out.times.push(t);
        out.states.push(states.to_vec());
        out.diagnostics.push(frame);
        Ok(())
    };
    log(&mut out, &states, T::zero())?;

    let steps = config.steps();
    let limit = T::lit(BLOW_UP_LIMIT);
    for k in 0..steps {
        let t = T::from_count(k) * config.dt;
        states = system.step(&states, t, config.dt)?;
        let t_next = T::from_count(k + 1) * config.dt;
        if states.iter().any(|s| s.max_abs() > limit) {
            return Err(Error::NonFiniteState { t: t_next.as_f64() });
        }
        if (k + 1) % config.log_every == 0 || k + 1 == steps {
            log(&mut out, &states, t_next)?;
        }
    }
    Ok(out)
}

impl<T: Real> SimulationRun<T> {
    pub fn final_states(&self) -> &[AgentState<T>] {
        self.states.last().map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn final_time(&self) -> T {
        *self.times.last().expect("run has at least the initial frame")
    }

    pub fn xi_norms(&self) -> Vec<(T, T)> {
        self.diagnostics.iter().map(|f| (f.t, f.xi_norm())).collect()
    }

    /// Count of frames where `V1` exceeds its envelope.
    pub fn envelope_violations(&self) -> usize {
        self.diagnostics.iter().filter(|f| !f.envelope_holds()).count()
    }
}

/// Earliest logged time after which `‖ξ_F‖ ≤ tol` at every remaining frame;
/// `None` if the last frame is still above `tol`.
pub fn convergence_time<T: Real>(run: &SimulationRun<T>, tol: T) -> Option<T> {
    let mut first = None;
    for f in run.diagnostics.iter().rev() {
        if f.xi_norm() <= tol {
            first = Some(f.t);
        } else {
            break;
        }
    }
    first
}
