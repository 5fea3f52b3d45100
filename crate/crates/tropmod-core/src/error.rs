use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("lattice rank {rank} exceeds the supported dimension cap {cap}")]
    DimensionTooLarge { rank: usize, cap: usize },
    #[error("integer overflow while converting an exact intermediate result")]
    Overflow,
    #[error("invalid cone: {0}")]
    InvalidCone(String),
    #[error("invalid cone morphism: {0}")]
    InvalidMorphism(String),
    #[error("point lies outside the cone")]
    OutsideCone,
    #[error("point is not in the relative interior of the base cone")]
    NotInterior,
    #[error("graph is disconnected")]
    Disconnected,
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("(g, n) = ({g}, {n}) is not a stable pair")]
    UnstablePair { g: u32, n: u32 },
    #[error("invalid tropical curve: {0}")]
    InvalidCurve(String),
    #[error("base cones differ")]
    BaseMismatch,
    #[error("base cone is not a ray")]
    NotRay,
    #[error("invalid section datum: {0}")]
    InvalidDatum(String),
    #[error("leg label {0} occurs on both sides")]
    LabelClash(u32),
    #[error("missing leg label {0}")]
    MissingLeg(u32),
    #[error("edge length is zero")]
    ZeroLength,
    #[error("vertex for component {component} is unstable")]
    Unstable { component: u32 },
    #[error("invalid stack data: {0}")]
    InvalidStack(String),
    #[error("invalid degeneration: {0}")]
    InvalidDegeneration(String),
    #[error("search budget of {0} steps exceeded")]
    BudgetExceeded(u64),
    #[error("schema error: {0}")]
    Schema(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
