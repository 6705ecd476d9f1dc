use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("a domain graph needs at least two regions, got {0}")]
    TooFewRegions(usize),
    #[error("region {region}: material constant must be positive and finite, got {epsilon}")]
    InvalidMaterial { region: usize, epsilon: f64 },
    #[error("angular frequency must be positive and finite, got {0}")]
    InvalidFrequency(f64),
    #[error("unknown region id {0}")]
    UnknownRegion(usize),
    #[error("interface ({from},{to}) points into the exterior region 1")]
    OrientedIntoExterior { from: usize, to: usize },
    #[error("interface ({from},{to}) connects a region to itself")]
    SelfLoop { from: usize, to: usize },
    #[error("interface between regions {a} and {b} is listed more than once")]
    DuplicateInterface { a: usize, b: usize },
    #[error("interface index {index} out of range ({len} interfaces)")]
    InterfaceIndex { index: usize, len: usize },
    #[error("the normal on exterior interface ({from},{to}) cannot be flipped")]
    ExteriorFlip { from: usize, to: usize },

    #[error("invalid mesh: {0}")]
    Mesh(String),
    #[error("invalid scene: {0}")]
    Scene(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("coincident points in kernel evaluation")]
    CoincidentPoints,
    #[error("degenerate element (area {0:e})")]
    DegenerateElement(f64),

    #[error("missing mesh for interface {0}")]
    MissingMesh(usize),
    #[error("missing Burton-Miller coefficient for region {0}")]
    MissingAlpha(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("inadmissible configuration: {0}")]
    Config(String),
    #[error("accumulation point {index} vanishes")]
    ZeroAccumulationPoint { index: usize },

    #[error("GMRES breakdown at iteration {0}: non-finite values")]
    Breakdown(usize),
    #[error("eigenvalue iteration did not converge")]
    EigenNoConvergence,

    #[error("series solution: singular system for mode n = {0}")]
    SingularMode(usize),
    #[error("relative error undefined: reference vector has zero norm")]
    ZeroReference,

    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
