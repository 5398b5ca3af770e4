use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown shape kind `{0}`")]
    UnknownKind(String),

    #[error("inconsistent shape parameters: {0}")]
    InconsistentParams(String),

    #[error("exact closest-point oracle unavailable for shape kind `{0}`")]
    OracleUnavailable(&'static str),

    #[error("sample count {count} is too small (minimum {min})")]
    TooFewSamples { count: usize, min: usize },

    #[error("refinement error: fill distance {fill} exceeds ceiling {ceiling}")]
    Refinement { fill: f64, ceiling: f64 },

    #[error("empty point cloud")]
    EmptyCloud,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("gradient undefined: point lies on the set (distance {distance})")]
    OnSet { distance: f64 },

    #[error("point {point:?} is flagged medial (spread {spread} >= lambda {lambda})")]
    MedialPoint { point: Vec<f64>, spread: f64, lambda: f64 },

    #[error("medial crossing detected at {point:?} (spread {spread})")]
    MedialCrossing { point: Vec<f64>, spread: f64 },

    #[error("no jump of the closest-point map across the segment (jump {jump} < lambda {lambda})")]
    NoJump { jump: f64, lambda: f64 },

    #[error("both halves of the bracket [{u:?}, {v:?}] carry jumps; shorten the segment")]
    MultipleJumps { u: Vec<f64>, v: Vec<f64> },

    #[error("connect radius {radius} is below the floor {floor} (4 x fill distance)")]
    RadiusTooSmall { radius: f64, floor: f64 },

    #[error("endpoint {point:?} is {distance} away from the cloud (tolerance {tolerance})")]
    EndpointOffCloud { point: Vec<f64>, distance: f64, tolerance: f64 },

    #[error("no path: endpoints lie in different components ({0} and {1})")]
    NoPath(usize, usize),

    #[error("ball of radius {radius} around {center:?} holds fewer than 2 connected points")]
    TooFewPoints { center: Vec<f64>, radius: f64 },

    #[error("radii must be strictly decreasing")]
    RadiiNotDecreasing,

    #[error("probe region around {center:?} is not medial-free (delta {delta})")]
    InvalidRegion { center: Vec<f64>, delta: f64 },

    #[error("point {0:?} does not lie on the shape")]
    NotOnShape(Vec<f64>),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid config: {0}")]
    Config(String),

    #[error("experiment `{name}` failed: {source}")]
    Experiment {
        name: String,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
