//! Randomized benchmark networks.
//!
//! `rnd1` reassigns the original E edges to E distinct fund-asset pairs
//! drawn uniformly at random, with the original weight multiset shuffled
//! independently onto the new pairs. `rnd2` keeps each fund's degree and
//! weight multiset (hence its inverse Herfindahl index) and only resamples
//! which assets it holds. Both keep the original node tables, so `N_f`,
//! `N_a` and the density denominator stay comparable; `rnd1` may therefore
//! leave some funds or assets without edges.
//!
//! Given the same seed, either model reproduces the same network on every
//! platform: draws come from a ChaCha8 stream keyed by `(seed, model tag)`.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::network::HoldingNetwork;
use crate::rng::{stream_rng, STREAM_RND1, STREAM_RND2};

/// The two randomization strategies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NullModel {
    /// Uniform edge reassignment; only E is preserved.
    Rnd1,
    /// Degree- and weight-preserving asset resampling per fund.
    Rnd2,
}

impl fmt::Display for NullModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NullModel::Rnd1 => write!(f, "rnd1"),
            NullModel::Rnd2 => write!(f, "rnd2"),
        }
    }
}

/// Parsed CLI-facing spec string `rnd1:<seed>` / `rnd2:<seed>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomizationSpec {
    pub model: NullModel,
    pub seed: u64,
}

impl fmt::Display for RandomizationSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.model, self.seed)
    }
}

impl FromStr for RandomizationSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidConfig(format!("invalid randomization spec {s:?}, expected rnd1:<seed> or rnd2:<seed>"));
        let (name, seed) = s.split_once(':').ok_or_else(bad)?;
        let model = match name {
            "rnd1" => NullModel::Rnd1,
            "rnd2" => NullModel::Rnd2,
            _ => return Err(bad()),
        };
        let seed: u64 = seed.parse().map_err(|_| bad())?;
        Ok(RandomizationSpec { model, seed })
    }
}

/// Apply the requested null model.
pub fn randomize(net: &HoldingNetwork, spec: RandomizationSpec) -> Result<HoldingNetwork> {
    match spec.model {
        NullModel::Rnd1 => rnd1(net, spec.seed),
        NullModel::Rnd2 => rnd2(net, spec.seed),
    }
}

/// Sample `k` distinct values from `0..n` uniformly, via rejection when the
/// draw is sparse and Floyd's algorithm otherwise. Result is unsorted.
fn sample_distinct<R: Rng>(rng: &mut R, n: u64, k: u64, out: &mut Vec<u64>) {
    debug_assert!(k <= n);
    out.clear();
    let mut chosen: HashSet<u64> = HashSet::with_capacity(k as usize);
    if (k as f64) <= 0.5 * n as f64 {
        while (out.len() as u64) < k {
            let cell = rng.random_range(0..n);
            if chosen.insert(cell) {
                out.push(cell);
            }
        }
    } else {
        for j in (n - k)..n {
            let t = rng.random_range(0..=j);
            if chosen.insert(t) {
                out.push(t);
            } else {
                chosen.insert(j);
                out.push(j);
            }
        }
    }
}

/// Uniform edge reassignment (model Rnd-1): E distinct fund-asset pairs are
/// drawn at random and the original weight multiset is shuffled onto them.
pub fn rnd1(net: &HoldingNetwork, seed: u64) -> Result<HoldingNetwork> {
    let mut rng = stream_rng(seed, STREAM_RND1);
    let n_f = net.n_funds() as u64;
    let n_a = net.n_assets() as u64;
    let e = net.n_edges() as u64;

    let mut cells = Vec::with_capacity(e as usize);
    sample_distinct(&mut rng, n_f * n_a, e, &mut cells);
    cells.sort_unstable();

    let mut weights: Vec<f64> = net.edge_values.clone();
    weights.shuffle(&mut rng);

    let edges: Vec<(u32, u32, f64)> = cells
        .iter()
        .zip(weights)
        .map(|(&cell, w)| ((cell / n_a) as u32, (cell % n_a) as u32, w))
        .collect();
    HoldingNetwork::from_parts(
        net.quarter(),
        net.fund_ids().to_vec(),
        net.asset_ids().to_vec(),
        edges,
    )
}

/// Degree- and weight-preserving randomization (model Rnd-2): every fund
/// keeps its degree and weight multiset, and draws that many distinct
/// assets uniformly from the full asset set; weights land on the new assets
/// in uniformly random order.
pub fn rnd2(net: &HoldingNetwork, seed: u64) -> Result<HoldingNetwork> {
    let mut rng = stream_rng(seed, STREAM_RND2);
    let n_a = net.n_assets() as u64;
    let mut edges: Vec<(u32, u32, f64)> = Vec::with_capacity(net.n_edges());
    let mut sampled = Vec::new();
    for i in 0..net.n_funds() {
        let range = net.fund_offsets[i]..net.fund_offsets[i + 1];
        let k = range.len() as u64;
        if k == 0 {
            continue;
        }
        sample_distinct(&mut rng, n_a, k, &mut sampled);
        sampled.sort_unstable();
        let mut weights: Vec<f64> = net.edge_values[range].to_vec();
        weights.shuffle(&mut rng);
        for (&asset, w) in sampled.iter().zip(weights) {
            edges.push((i as u32, asset as u32, w));
        }
    }
    HoldingNetwork::from_parts(
        net.quarter(),
        net.fund_ids().to_vec(),
        net.asset_ids().to_vec(),
        edges,
    )
}
