use thiserror::Error;

use crate::grid::Coord;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvcError {
    #[error("degenerate grid parameters: {0}")]
    DegenerateParameters(String),

    #[error("instance has {n} vertices, solver cap is {cap}")]
    TooLarge { n: usize, cap: usize },

    #[error("guard set is not a vertex cover")]
    NotACover,

    #[error("target has {target} vertices but {guards} guards are placed")]
    SizeMismatch { guards: usize, target: usize },

    #[error("illegal defense move: {0}")]
    IllegalMove(String),

    #[error("defense image leaves edge {0}-{1} uncovered")]
    CoverBroken(Coord, Coord),

    #[error("strategy not applicable: {0}")]
    NotApplicable(String),

    #[error("indefensible attack: {0}")]
    Indefensible(String),

    #[error("no legal attack available")]
    NoLegalAttack,

    #[error("illegal attack: {0}")]
    IllegalAttack(String),

    #[error("no eternal cover with at most {k_max} guards")]
    NoneFound { k_max: usize },

    #[error("unknown vertex {0}")]
    UnknownVertex(Coord),

    #[error("malformed report: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, EvcError>;
