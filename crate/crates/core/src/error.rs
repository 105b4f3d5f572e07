use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("self loop on node {node}")]
    SelfLoop { node: usize },
    #[error("edge ({source_node}, {receiver}) makes leader {receiver} a receiver")]
    LeaderReceivesEdge { source_node: usize, receiver: usize },
    #[error("index {index} out of range (valid: {min}..={max})")]
    IndexOutOfRange { index: usize, min: usize, max: usize },
    #[error("graph needs at least one follower and one leader (n={n}, m={m})")]
    EmptyGraph { n: usize, m: usize },
    #[error("L1 is singular: lambda_min = {min_eig:e} (every follower must reach a leader)")]
    SingularL1 { min_eig: f64 },
    #[error("scale mu = {mu} outside (0, 1)")]
    InvalidScale { mu: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("degenerate formation: {0}")]
    DegenerateFormation(String),
    #[error("degenerate edge: coincident offsets")]
    DegenerateEdge,
    #[error("edge line passes through the formation center")]
    ZeroDistance,
    #[error("agent {agent} was handed neighbor {neighbor}, which is not in its adjacency row")]
    InconsistentView { agent: usize, neighbor: usize },
    #[error("non-positive value at sample {index}")]
    NonPositiveValue { index: usize },
    #[error("state diverged at t = {t}")]
    NonFiniteState { t: f64 },
    #[error("validation failed: {0}")]
    ValidationFailed(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
