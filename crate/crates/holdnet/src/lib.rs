//! Weighted bipartite fund-asset holding networks.
//!
//! The crate builds quarterly snapshots of fund portfolios, measures
//! diversification (inverse Herfindahl index) and cross-portfolio overlap
//! (Jaccard and similarity indices), generates randomized benchmark
//! networks, simulates fire-sale distress propagation, and produces
//! synthetic networks with tunable heterogeneity and style correlation.
//!
//! With the default `parallel` feature the pairwise-similarity engine and
//! the shock ensembles fan out over rayon; without it every computation
//! runs sequentially with identical results.

pub mod contagion;
pub mod error;
pub mod ingest;
pub mod io;
pub mod metrics;
pub mod network;
pub mod nullmodel;
pub(crate) mod rng;
pub mod synth;

pub use error::{Error, Result};
pub use network::{
    AssetIdx, EdgeRecord, FundIdx, HoldingNetwork, PortfolioView, Quarter, SnapshotStats,
};
