use thiserror::Error;

use crate::rules::Symbol;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("alphabet must have at least one symbol")]
    EmptyAlphabet,
    #[error("duplicate alphabet label `{0}`")]
    DuplicateLabel(String),
    #[error("symbol {symbol} out of range for alphabet of size {size}")]
    SymbolOutOfRange { symbol: usize, size: usize },
    #[error("word of length {got} is too short (need at least {needed})")]
    WordTooShort { needed: usize, got: usize },
    #[error("invalid rule table: {0}")]
    InvalidRule(String),
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    #[error("group order {0} exceeds the supported maximum of 4096")]
    OrderTooLarge(usize),
    #[error("not a subgroup: {0}")]
    NotSubgroup(String),
    #[error("subgroup is not normal")]
    NotNormal,
    #[error("group is not abelian")]
    NotAbelian,
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),
    #[error("word length {len} exceeds the depth cap {cap}")]
    DepthCapExceeded { len: usize, cap: usize },
    #[error("conditioning event for word {word:?} has zero mass")]
    ZeroMass { word: Vec<Symbol> },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("invalid circle system: {0}")]
    InvalidSystem(String),
}
