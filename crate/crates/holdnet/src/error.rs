//! Error type shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("negative market value {value} for holding ({fund}, {asset})")]
    NegativeValue {
        fund: String,
        asset: String,
        value: f64,
    },
    #[error("non-finite market value for holding ({fund}, {asset})")]
    NonFiniteValue { fund: String, asset: String },
    #[error("edge list is empty")]
    EmptyEdgeList,
    #[error("no edges survive aggregation (all holdings have zero value)")]
    NoSurvivingEdges,
    #[error("duplicate edge for (fund {fund}, asset {asset})")]
    DuplicateEdge { fund: usize, asset: usize },
    #[error("unknown fund index {0}")]
    UnknownFundIndex(usize),
    #[error("unknown asset index {0}")]
    UnknownAssetIndex(usize),
    #[error("unknown fund id {0:?}")]
    UnknownFundId(String),
    #[error("unknown asset id {0:?}")]
    UnknownAssetId(String),
    #[error("fund {0:?} has an empty portfolio")]
    EmptyPortfolio(String),
    #[error("empty asset set")]
    EmptyAssetSet,
    #[error("empty sample")]
    EmptySample,
    #[error("pair metrics need at least two funds, network has {0}")]
    TooFewFunds(usize),
    #[error("line {line}: {message}")]
    MalformedRecord { line: u64, message: String },
    #[error("unexpected header {found:?}, expected {expected:?}")]
    UnexpectedHeader { expected: String, found: String },
    #[error("invalid quarter label {0:?} (expected e.g. 2006Q2)")]
    InvalidQuarter(String),
    #[error("no usable records for quarter {0}")]
    EmptyQuarter(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("no assets above the {quantile} quantile; lower the quantile to select a nonempty top-asset set")]
    EmptyTopAssets { quantile: f64 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
