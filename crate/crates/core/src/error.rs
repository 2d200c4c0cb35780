use crate::metric::{PointId, Violation};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("point index {index} out of range for instance of {len} points")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("subset is empty")]
    EmptySubset,

    #[error("subset has zero diameter (needs at least two points, got {0})")]
    DegenerateSubset(usize),

    #[error("matrix is not square: row {row} has {len} entries, expected {expected}")]
    NonSquare {
        row: usize,
        len: usize,
        expected: usize,
    },

    #[error("not a metric: {} violation(s), first: {}", .0.len(), .0[0])]
    InvalidMetric(Vec<Violation>),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("radius for point {point} must be positive and finite, got {radius}")]
    NonPositiveRadius { point: PointId, radius: f64 },

    #[error("no radius assigned to point {0}")]
    MissingRadius(PointId),

    #[error("parameter `{name}` must be positive, got {value}")]
    NonPositiveParameter { name: &'static str, value: f64 },

    #[error("exact solver cap exceeded: {size} points > cap {cap}; use greedy mode")]
    CapExceeded { size: usize, cap: usize },

    #[error("subset is not R-separated")]
    NotSeparated,

    #[error("operation needs a coordinate instance")]
    NotCoords,

    #[error("point {point} lies outside the unit ball (norm {norm})")]
    OutsideUnitBall { point: PointId, norm: f64 },

    #[error("root {0} is not a vertex of the tree")]
    RootNotInTree(PointId),

    #[error("dimension exponent must be positive when N >= 2")]
    ZeroDimension,

    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
