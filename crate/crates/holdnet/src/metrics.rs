//! Diversification and overlap metrics.
//!
//! Per fund, the inverse Herfindahl index `h_i = 1 / sum_a w_ia^2` counts
//! effective leading assets. Per pair of funds, the Jaccard index
//! `J_ij = |P_i n P_j| / |P_i u P_j|` measures topological overlap and the
//! similarity index `s_ij = J_ij * sum_a min(w_ia, w_ja)` additionally
//! compares weight profiles, so `0 <= s_ij <= J_ij <= 1`.
//!
//! The all-pairs engine walks an asset-major inverted index: only funds that
//! actually share an asset ever become candidates, so disjoint pairs cost
//! nothing. Results are identical to the naive double loop and are emitted
//! in canonical `(i, j)` order regardless of the worker count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::network::{FundIdx, HoldingNetwork, PortfolioView};

/// Overlap record for one unordered fund pair, `i < j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairSimilarity {
    pub i: FundIdx,
    pub j: FundIdx,
    pub jaccard: f64,
    pub similarity: f64,
}

/// Options for the all-pairs engine. `min_overlap` is the smallest
/// intersection size a pair needs to be emitted.
#[derive(Debug, Clone, Copy)]
pub struct PairwiseOptions {
    pub min_overlap: u32,
}

impl Default for PairwiseOptions {
    fn default() -> Self {
        PairwiseOptions { min_overlap: 1 }
    }
}

/// Inverse Herfindahl index of one portfolio (effective number of leading
/// assets): 1 for a single-asset fund, equal to the degree for uniform
/// weights.
pub fn inverse_herfindahl(view: &PortfolioView) -> Result<f64> {
    if view.entries.is_empty() {
        return Err(Error::EmptySample);
    }
    let sum_sq: f64 = view.entries.iter().map(|&(_, w)| w * w).sum();
    Ok(1.0 / sum_sq)
}

/// Jaccard index of two asset sets given as strictly increasing index
/// slices.
pub fn jaccard(a: &[crate::network::AssetIdx], b: &[crate::network::AssetIdx]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyAssetSet);
    }
    let mut inter = 0usize;
    let (mut x, mut y) = (0usize, 0usize);
    while x < a.len() && y < b.len() {
        match a[x].cmp(&b[y]) {
            std::cmp::Ordering::Less => x += 1,
            std::cmp::Ordering::Greater => y += 1,
            std::cmp::Ordering::Equal => {
                inter += 1;
                x += 1;
                y += 1;
            }
        }
    }
    let union = a.len() + b.len() - inter;
    Ok(inter as f64 / union as f64)
}

/// Similarity index of two portfolios: Jaccard times the sum of the smaller
/// weight on each common asset. One exactly when both funds hold the same
/// assets in the same proportions; zero when they do not overlap.
pub fn similarity(p_i: &PortfolioView, p_j: &PortfolioView) -> Result<f64> {
    if p_i.entries.is_empty() || p_j.entries.is_empty() {
        return Err(Error::EmptyAssetSet);
    }
    let mut inter = 0usize;
    let mut min_sum = 0.0f64;
    let (mut x, mut y) = (0usize, 0usize);
    while x < p_i.entries.len() && y < p_j.entries.len() {
        let (a, wa) = p_i.entries[x];
        let (b, wb) = p_j.entries[y];
        match a.cmp(&b) {
            std::cmp::Ordering::Less => x += 1,
            std::cmp::Ordering::Greater => y += 1,
            std::cmp::Ordering::Equal => {
                inter += 1;
                min_sum += wa.min(wb);
                x += 1;
                y += 1;
            }
        }
    }
    let union = p_i.entries.len() + p_j.entries.len() - inter;
    let j = inter as f64 / union as f64;
    Ok(j * min_sum)
}

struct PairEngine<'a> {
    net: &'a HoldingNetwork,
    degrees: Vec<u32>,
    /// Normalized holder weight per asset-major slot.
    slot_weights: Vec<f64>,
}

struct Scratch {
    inter: Vec<u32>,
    min_sum: Vec<f64>,
    touched: Vec<u32>,
}

impl Scratch {
    fn new(n_funds: usize) -> Self {
        Scratch {
            inter: vec![0; n_funds],
            min_sum: vec![0.0; n_funds],
            touched: Vec::new(),
        }
    }
}

impl<'a> PairEngine<'a> {
    fn new(net: &'a HoldingNetwork) -> Self {
        let degrees: Vec<u32> = (0..net.n_funds())
            .map(|i| (net.fund_offsets[i + 1] - net.fund_offsets[i]) as u32)
            .collect();
        let sizes = net.fund_sizes();
        let slot_weights: Vec<f64> = (0..net.n_edges())
            .map(|slot| {
                let fund = net.aedge_funds[slot].index();
                net.edge_values[net.aedge_pos[slot] as usize] / sizes[fund]
            })
            .collect();
        PairEngine {
            net,
            degrees,
            slot_weights,
        }
    }

    /// Collect all pairs `(i, j)` with `j > i` that share at least
    /// `min_overlap` assets, sorted by `j`.
    fn scan_fund(
        &self,
        i: usize,
        scratch: &mut Scratch,
        min_overlap: u32,
        rows: &mut Vec<PairSimilarity>,
    ) {
        let net = self.net;
        let size = net.fund_sizes()[i];
        for e in net.fund_offsets[i]..net.fund_offsets[i + 1] {
            let asset = net.edge_assets[e].index();
            let w_i = net.edge_values[e] / size;
            for slot in net.asset_offsets[asset]..net.asset_offsets[asset + 1] {
                let j = net.aedge_funds[slot].0;
                if j as usize <= i {
                    continue;
                }
                let ju = j as usize;
                if scratch.inter[ju] == 0 {
                    scratch.touched.push(j);
                }
                scratch.inter[ju] += 1;
                scratch.min_sum[ju] += w_i.min(self.slot_weights[slot]);
            }
        }
        scratch.touched.sort_unstable();
        for &j in &scratch.touched {
            let ju = j as usize;
            let inter = scratch.inter[ju];
            if inter >= min_overlap {
                let union = self.degrees[i] + self.degrees[ju] - inter;
                let jac = inter as f64 / union as f64;
                rows.push(PairSimilarity {
                    i: FundIdx(i as u32),
                    j: FundIdx(j),
                    jaccard: jac,
                    similarity: jac * scratch.min_sum[ju],
                });
            }
            scratch.inter[ju] = 0;
            scratch.min_sum[ju] = 0.0;
        }
        scratch.touched.clear();
    }
}

/// All overlapping fund pairs via the inverted-index engine, sorted by
/// `(i, j)`. Uses rayon when the `parallel` feature is enabled.
pub fn pairwise_similarities(
    net: &HoldingNetwork,
    opts: PairwiseOptions,
) -> Result<Vec<PairSimilarity>> {
    if net.n_funds() < 2 {
        return Err(Error::TooFewFunds(net.n_funds()));
    }
    let engine = PairEngine::new(net);
    #[cfg(feature = "parallel")]
    {
        let chunks: Vec<Vec<PairSimilarity>> = fund_ranges(net.n_funds())
            .into_par_iter()
            .map(|(start, end)| {
                let mut scratch = Scratch::new(net.n_funds());
                let mut rows = Vec::new();
                for i in start..end {
                    engine.scan_fund(i, &mut scratch, opts.min_overlap, &mut rows);
                }
                rows
            })
            .collect();
        Ok(chunks.concat())
    }
    #[cfg(not(feature = "parallel"))]
    {
        pairwise_with_engine_seq(net, &engine, opts)
    }
}

/// Contiguous fund ranges for the engine. The partition depends only on
/// the fund count, never on the worker count, and ranges are always
/// combined in order, so results are identical bit for bit whether the
/// ranges run on one thread or many.
fn fund_ranges(n_funds: usize) -> Vec<(usize, usize)> {
    let chunk = (n_funds / 256).max(32);
    (0..n_funds)
        .step_by(chunk)
        .map(|start| (start, (start + chunk).min(n_funds)))
        .collect()
}

/// Sequential variant of [`pairwise_similarities`]; always available and
/// bit-identical to the parallel path.
pub fn pairwise_similarities_seq(
    net: &HoldingNetwork,
    opts: PairwiseOptions,
) -> Result<Vec<PairSimilarity>> {
    if net.n_funds() < 2 {
        return Err(Error::TooFewFunds(net.n_funds()));
    }
    let engine = PairEngine::new(net);
    pairwise_with_engine_seq(net, &engine, opts)
}

fn pairwise_with_engine_seq(
    net: &HoldingNetwork,
    engine: &PairEngine<'_>,
    opts: PairwiseOptions,
) -> Result<Vec<PairSimilarity>> {
    let mut scratch = Scratch::new(net.n_funds());
    let mut rows = Vec::new();
    for i in 0..net.n_funds() {
        engine.scan_fund(i, &mut scratch, opts.min_overlap, &mut rows);
    }
    Ok(rows)
}

/// How pair averages treat funds that share no asset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PairMeanMode {
    /// Disjoint pairs enter the average as zeros, so `jbar`/`sbar` are means
    /// over all `C(N_f, 2)` unordered pairs.
    #[default]
    IncludeDisjoint,
    /// Average only over pairs with a nonempty intersection.
    OverlappingOnly,
}

/// Network-wide averages of the three indices.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct MeanIndices {
    pub hbar: f64,
    pub jbar: f64,
    pub sbar: f64,
}

/// Mean inverse Herfindahl over funds and mean Jaccard/similarity over
/// unordered fund pairs. Funds left without holdings (possible only in
/// randomized networks) are skipped for `hbar` and count as disjoint in the
/// pair averages.
pub fn mean_indices(net: &HoldingNetwork, mode: PairMeanMode) -> Result<MeanIndices> {
    if net.n_funds() < 2 {
        return Err(Error::TooFewFunds(net.n_funds()));
    }
    let mut h_sum = 0.0;
    let mut h_count = 0usize;
    for i in 0..net.n_funds() {
        let idx = FundIdx(i as u32);
        if net.fund_degree(idx)? == 0 {
            continue;
        }
        h_sum += inverse_herfindahl(&net.portfolio_weights(idx)?)?;
        h_count += 1;
    }
    if h_count == 0 {
        return Err(Error::EmptySample);
    }

    let engine = PairEngine::new(net);
    let opts = PairwiseOptions::default();
    let fold_range = |start: usize, end: usize| {
        let mut scratch = Scratch::new(net.n_funds());
        let mut rows = Vec::new();
        let mut emitted = 0usize;
        let mut j_sum = 0.0f64;
        let mut s_sum = 0.0f64;
        for i in start..end {
            rows.clear();
            engine.scan_fund(i, &mut scratch, opts.min_overlap, &mut rows);
            emitted += rows.len();
            j_sum += rows.iter().map(|r| r.jaccard).sum::<f64>();
            s_sum += rows.iter().map(|r| r.similarity).sum::<f64>();
        }
        (emitted, j_sum, s_sum)
    };
    #[cfg(feature = "parallel")]
    let partials: Vec<(usize, f64, f64)> = fund_ranges(net.n_funds())
        .into_par_iter()
        .map(|(start, end)| fold_range(start, end))
        .collect();
    #[cfg(not(feature = "parallel"))]
    let partials: Vec<(usize, f64, f64)> = fund_ranges(net.n_funds())
        .into_iter()
        .map(|(start, end)| fold_range(start, end))
        .collect();

    let mut emitted = 0usize;
    let mut j_sum = 0.0;
    let mut s_sum = 0.0;
    for (count, j, s) in partials {
        emitted += count;
        j_sum += j;
        s_sum += s;
    }
    let n = net.n_funds();
    let denominator = match mode {
        PairMeanMode::IncludeDisjoint => (n * (n - 1) / 2) as f64,
        PairMeanMode::OverlappingOnly => emitted as f64,
    };
    let (jbar, sbar) = if denominator == 0.0 {
        (0.0, 0.0)
    } else {
        (j_sum / denominator, s_sum / denominator)
    };
    Ok(MeanIndices {
        hbar: h_sum / h_count as f64,
        jbar,
        sbar,
    })
}

/// Complementary cumulative distribution: `(value, P(X >= value))` at every
/// distinct sample value, in increasing value order.
#[derive(Debug, Clone, PartialEq)]
pub struct CcdfTable {
    pub points: Vec<(f64, f64)>,
}

/// Which side of the bipartite graph a degree distribution refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Funds,
    Assets,
}

pub fn degree_ccdf(net: &HoldingNetwork, side: Side) -> Result<CcdfTable> {
    let degrees: Vec<f64> = match side {
        Side::Funds => (0..net.n_funds())
            .map(|i| (net.fund_offsets[i + 1] - net.fund_offsets[i]) as f64)
            .collect(),
        Side::Assets => (0..net.n_assets())
            .map(|a| (net.asset_offsets[a + 1] - net.asset_offsets[a]) as f64)
            .collect(),
    };
    index_ccdf(&degrees)
}

pub fn index_ccdf(values: &[f64]) -> Result<CcdfTable> {
    if values.is_empty() {
        return Err(Error::EmptySample);
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::InvalidConfig("NaN in sample".into()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut points = Vec::new();
    let mut pos = 0usize;
    while pos < sorted.len() {
        let value = sorted[pos];
        points.push((value, (sorted.len() - pos) as f64 / n));
        let mut next = pos + 1;
        while next < sorted.len() && sorted[next] == value {
            next += 1;
        }
        pos = next;
    }
    Ok(CcdfTable { points })
}

/// Probability density over logarithmically spaced bins, for fat-tailed
/// samples of positive values. Rows are `(geometric bin center, density)`;
/// a single-valued sample degenerates to one `(value, 1.0)` point mass.
pub fn log_binned_pdf(values: &[f64], bins: usize) -> Result<CcdfTable> {
    if values.is_empty() {
        return Err(Error::EmptySample);
    }
    if bins == 0 {
        return Err(Error::InvalidConfig("bin count must be positive".into()));
    }
    if values.iter().any(|&v| !v.is_finite() || v <= 0.0) {
        return Err(Error::InvalidConfig(
            "log-binned pdf requires positive finite values".into(),
        ));
    }
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if min == max {
        return Ok(CcdfTable {
            points: vec![(min, 1.0)],
        });
    }
    let log_min = min.ln();
    let step = (max.ln() - log_min) / bins as f64;
    let mut counts = vec![0usize; bins];
    for &v in values {
        let mut b = ((v.ln() - log_min) / step) as usize;
        if b >= bins {
            b = bins - 1;
        }
        counts[b] += 1;
    }
    let n = values.len() as f64;
    let points = counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(b, &c)| {
            let lo = (log_min + step * b as f64).exp();
            let hi = (log_min + step * (b + 1) as f64).exp();
            ((lo * hi).sqrt(), c as f64 / (n * (hi - lo)))
        })
        .collect();
    Ok(CcdfTable { points })
}
