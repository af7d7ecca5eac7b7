use thiserror::Error;

/// A grid line: `(family, index)`.
pub type LineId = (usize, i32);

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid basis: {0}")]
    InvalidBasis(String),
    #[error("degenerate basis: directions {0} and {1} are collinear")]
    DegenerateBasis(usize, usize),
    #[error("singular multigrid: lines {0:?}, {1:?} and {2:?} meet in a common point")]
    SingularGrid(LineId, LineId, LineId),
    #[error("degenerate band: {0}")]
    DegenerateBand(String),
    #[error("invalid patch: {0}")]
    InvalidPatch(String),
    #[error("tile {tile} has no edge family {family}")]
    WrongFamily { tile: u32, family: usize },
    #[error("operation requires a rhombus adjacency graph")]
    NotRhombus,
    #[error("unsupported rule: {0}")]
    UnsupportedRule(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("indeterminate: {0}")]
    Indeterminate(String),
    #[error("insufficient margin: {0}")]
    Margin(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
