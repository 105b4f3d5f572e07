//! Distributed reference-trajectory generation for containment of planar
//! vehicles.
//!
//! Each follower runs a third-order observer driven only by its neighbors.
//! The references converge to the convex hull of μ-scaled moving leaders;
//! the [`analysis`] and [`hull`] modules certify that convergence (Lyapunov
//! envelope, containment error, hull margins).
//!
//! Everything numeric is generic over [`Real`] (`f32` or `f64`); the `*64`
//! aliases below fix the scalar to `f64`.

// `!(x > 0)` is used on purpose so that NaN lands in the rejecting branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod graph;
pub mod hull;
pub mod leaders;
pub mod linalg;
pub mod observer;
pub mod pose;
pub mod scalar;
pub mod scenario;
pub mod sim;

pub use error::{Error, Result};
pub use graph::{Assumption1Report, InteractionGraph, LaplacianPartition};
pub use hull::{ConvexPolygon, HullMargins, ThetaInterval};
pub use leaders::{Assumption3Report, LeaderModel, Trajectory, TrajectoryDerivatives};
pub use linalg::Matrix;
pub use observer::{AgentState, GainReport, Gains, NeighborView};
pub use pose::{Pose, Vec2};
pub use scalar::Real;
pub use scenario::Scenario;
pub use sim::{ScenarioConfig, SimulationRun, System, ValidationReport};
pub use analysis::{DiagnosticsFrame, Envelope};

pub type Pose64 = Pose<f64>;
pub type Vec2_64 = Vec2<f64>;
pub type Matrix64 = Matrix<f64>;
pub type Gains64 = Gains<f64>;
pub type AgentState64 = AgentState<f64>;
pub type LeaderModel64 = LeaderModel<f64>;
pub type Trajectory64 = Trajectory<f64>;
pub type LaplacianPartition64 = LaplacianPartition<f64>;
pub type ConvexPolygon64 = ConvexPolygon<f64>;
pub type HullMargins64 = HullMargins<f64>;
pub type ScenarioConfig64 = ScenarioConfig<f64>;
pub type SimulationRun64 = SimulationRun<f64>;
pub type DiagnosticsFrame64 = DiagnosticsFrame<f64>;

pub type Pose32 = Pose<f32>;
pub type Gains32 = Gains<f32>;
pub type LeaderModel32 = LeaderModel<f32>;
pub type ScenarioConfig32 = ScenarioConfig<f32>;
