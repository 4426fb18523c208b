use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degree mode {mode:?} is not defined for the {layer:?} layer")]
    InvalidMode {
        layer: crate::Layer,
        mode: crate::DegreeMode,
    },
    #[error("node {id} is outside the network (n = {n})")]
    UnknownNode { id: usize, n: usize },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("degenerate data: {0}")]
    Degenerate(String),
    #[error("matrix shape error: {0}")]
    Shape(String),
    #[error("invalid value: {0}")]
    Value(String),
    #[error("correlation undefined: {0} has zero variance")]
    DegenerateVariance(&'static str),
    #[error("weighted normal equations are singular")]
    Singular,
    #[error("network has {n} nodes, at least {min} are required")]
    TooSmall { n: usize, min: usize },
    #[error("network is empty")]
    EmptyNetwork,
    #[error("pair sampling stalled at {collected} of {target} pairs")]
    Stalled { collected: usize, target: usize },
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("invalid conditional probability table: {0}")]
    InvalidCpt(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
