//! Leader formation: a common center trajectory `η_c(t)` with closed-form
//! derivatives through third order, constant offsets `d_j`, and the scaled
//! targets `η_c(t) + μ d_j` the followers converge to.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hull::hull_of_offsets;
use crate::pose::{Pose, Vec2};
use crate::scalar::Real;

/// Built-in center trajectories. All are smooth with bounded derivatives.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Trajectory<T> {
    Stationary { pose: Pose<T> },
    /// `η_c(t) = origin + velocity·t`.
    Line { origin: Pose<T>, velocity: Pose<T> },
    /// `p_c = center + R (cos ωt, sin ωt)`; `θ_c = θ₀`, or `θ₀ + ωt` when `spin`.
    Circle { center: Vec2<T>, radius: T, omega: T, theta0: T, spin: bool },
    /// Componentwise `center + amplitude·sin(frequency·t + phase)`.
    Lissajous { center: Pose<T>, amplitude: Pose<T>, frequency: Pose<T>, phase: Pose<T> },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryDerivatives<T> {
    pub eta: Pose<T>,
    pub d1: Pose<T>,
    pub d2: Pose<T>,
    pub d3: Pose<T>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Assumption3Report {
    pub origin_enclosed: bool,
    pub convex: bool,
    pub theta_straddles_zero: bool,
}

impl Assumption3Report {
    pub fn holds(&self) -> bool {
        self.origin_enclosed && self.convex && self.theta_straddles_zero
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LeaderModel<T> {
    trajectory: Trajectory<T>,
    offsets: Vec<Pose<T>>,
    mu: T,
}

impl<T: Real> Trajectory<T> {
    pub fn eval(&self, t: T) -> TrajectoryDerivatives<T> {
        let zero = Pose::zero();
        match *self {
            Trajectory::Stationary { pose } => TrajectoryDerivatives { eta: pose, d1: zero, d2: zero, d3: zero },
            Trajectory::Line { origin, velocity } => {
                TrajectoryDerivatives { eta: origin + velocity * t, d1: velocity, d2: zero, d3: zero }
            }
            Trajectory::Circle { center, radius, omega, theta0, spin } => {
                let (s, c) = (omega * t).sin_cos();
                let r1 = radius * omega;
                let r2 = r1 * omega;
                let r3 = r2 * omega;
                let (theta, theta_rate) = if spin { (theta0 + omega * t, omega) } else { (theta0, T::zero()) };
                TrajectoryDerivatives {
                    eta: Pose::new(center.x + radius * c, center.y + radius * s, theta),
                    d1: Pose::new(-r1 * s, r1 * c, theta_rate),
                    d2: Pose::new(-r2 * c, -r2 * s, T::zero()),
                    d3: Pose::new(r3 * s, -r3 * c, T::zero()),
                }
            }
            Trajectory::Lissajous { center, amplitude, frequency, phase } => {
                let comp = |c: T, a: T, w: T, p: T| {
                    let (s, co) = (w * t + p).sin_cos();
                    [c + a * s, a * w * co, -a * w * w * s, -a * w * w * w * co]
                };
                let x = comp(center.x, amplitude.x, frequency.x, phase.x);
                let y = comp(center.y, amplitude.y, frequency.y, phase.y);
                let th = comp(center.theta, amplitude.theta, frequency.theta, phase.theta);
                let at = |k: usize| Pose::new(x[k], y[k], th[k]);
                TrajectoryDerivatives { eta: at(0), d1: at(1), d2: at(2), d3: at(3) }
            }
        }
    }

    /// Sampling window `(horizon, samples)` that covers the sup of any
    /// derivative combination for this family.
    pub fn sup_window(&self) -> (T, usize) {
        let two_pi = T::lit(std::f64::consts::TAU);
        match *self {
            Trajectory::Stationary { .. } | Trajectory::Line { .. } => (T::one(), 2),
            Trajectory::Circle { omega, .. } if omega != T::zero() => (two_pi / omega.abs(), 4097),
            Trajectory::Circle { .. } => (T::one(), 2),
            Trajectory::Lissajous { frequency, .. } => {
                let slowest = [frequency.x, frequency.y, frequency.theta]
                    .into_iter()
                    .map(T::abs)
                    .filter(|w| *w > T::zero())
                    .fold(T::infinity(), T::min);
                if slowest.is_finite() {
                    (T::lit(10.0) * two_pi / slowest, 20_001)
                } else {
                    (T::one(), 2)
                }
            }
        }
    }

    fn is_finite(&self) -> bool {
        match self {
            Trajectory::Stationary { pose } => pose.is_finite(),
            Trajectory::Line { origin, velocity } => origin.is_finite() && velocity.is_finite(),
            Trajectory::Circle { center, radius, omega, theta0, .. } => {
                center.x.is_finite()
                    && center.y.is_finite()
                    && radius.is_finite()
                    && omega.is_finite()
                    && theta0.is_finite()
            }
            Trajectory::Lissajous { center, amplitude, frequency, phase } => {
                center.is_finite() && amplitude.is_finite() && frequency.is_finite() && phase.is_finite()
            }
        }
    }
}

impl<T: Real> LeaderModel<T> {
    pub fn new(trajectory: Trajectory<T>, offsets: Vec<Pose<T>>, mu: T) -> Result<Self> {
        if !(mu > T::zero() && mu < T::one()) {
            return Err(Error::InvalidScale { mu: mu.as_f64() });
        }
        if offsets.is_empty() {
            return Err(Error::InvalidParameter("leader model needs at least one offset".into()));
        }
        if offsets.iter().any(|d| !d.is_finite()) || !trajectory.is_finite() {
            return Err(Error::InvalidParameter("leader model parameters must be finite".into()));
        }
        Ok(Self { trajectory, offsets, mu })
    }

    pub fn trajectory(&self) -> &Trajectory<T> {
        &self.trajectory
    }

    pub fn offsets(&self) -> &[Pose<T>] {
        &self.offsets
    }

    pub fn position_offsets(&self) -> Vec<Vec2<T>> {
        self.offsets.iter().map(|d| d.position()).collect()
    }

    pub fn m(&self) -> usize {
        self.offsets.len()
    }

    pub fn mu(&self) -> T {
        self.mu
    }

    /// Same formation with a different scale factor.
    pub fn with_mu(&self, mu: T) -> Result<Self> {
        Self::new(self.trajectory.clone(), self.offsets.clone(), mu)
    }

    pub fn eval_center(&self, t: T) -> TrajectoryDerivatives<T> {
        self.trajectory.eval(t)
    }

    fn offset(&self, j: usize) -> Result<Pose<T>> {
        self.offsets.get(j).copied().ok_or(Error::IndexOutOfRange {
            index: j,
            min: 0,
            max: self.offsets.len() - 1,
        })
    }

    /// `η_{L,j}(t) = η_c(t) + d_j` for local leader index `j` (0-based).
    pub fn eval_leader(&self, j: usize, t: T) -> Result<Pose<T>> {
        Ok(self.eval_center(t).eta + self.offset(j)?)
    }

    /// `η̃_{L,j}(t) = η_c(t) + μ d_j`.
    pub fn eval_scaled_leader(&self, j: usize, t: T) -> Result<Pose<T>> {
        Ok(self.eval_center(t).eta + self.offset(j)? * self.mu)
    }

    /// Scaled target of every leader, with the shared derivatives of `η_c`.
    pub fn scaled_targets(&self, t: T) -> (Vec<Pose<T>>, TrajectoryDerivatives<T>) {
        let c = self.eval_center(t);
        (self.offsets.iter().map(|&d| c.eta + d * self.mu).collect(), c)
    }

    /// Sampled `sup ‖η⃛_c + g1 η̈_c + g2 η̇_c‖` over `samples` evenly spaced
    /// times in `[0, horizon]`, times a 1.1 safety factor.
    pub fn eta_bar(&self, g1: T, g2: T, horizon: T, samples: usize) -> T {
        let samples = samples.max(2);
        let last = T::from_count(samples - 1);
        let sup = (0..samples)
            .map(|k| {
                let c = self.eval_center(horizon * T::from_count(k) / last);
                (c.d3 + c.d2 * g1 + c.d1 * g2).norm()
            })
            .fold(T::zero(), T::max);
        sup * T::lit(1.1)
    }

    /// [`eta_bar`](Self::eta_bar) over the family's own sampling window.
    pub fn eta_bar_default(&self, g1: T, g2: T) -> T {
        let (horizon, samples) = self.trajectory.sup_window();
        self.eta_bar(g1, g2, horizon, samples)
    }

    pub fn check_assumption3(&self) -> Result<Assumption3Report> {
        let m = self.m();
        if m < 3 {
            return Err(Error::DegenerateFormation(format!("need at least 3 leaders, got {m}")));
        }
        let hull = hull_of_offsets(&self.position_offsets())?;
        let (lo, hi) = self
            .offsets
            .iter()
            .fold((T::infinity(), T::neg_infinity()), |(lo, hi), d| (lo.min(d.theta), hi.max(d.theta)));
        Ok(Assumption3Report {
            origin_enclosed: hull.clearance(Vec2::zero()) > T::zero(),
            convex: hull.len() == m,
            theta_straddles_zero: lo <= T::zero() && T::zero() <= hi,
        })
    }
}
