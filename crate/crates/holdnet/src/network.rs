//! Immutable bipartite fund-asset holding network for one quarterly snapshot.
//!
//! A snapshot holds the weighted incidence structure in both orientations
//! (fund-major and asset-major CSR), node strength tables (fund sizes `S_i`,
//! aggregate asset values `M_alpha`) and the total system value `S_tot`.
//! Construction is single-threaded; once built, the network is read-only and
//! safe to share across threads.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Quarterly snapshot label, e.g. `2006Q2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Quarter {
    year: i32,
    quarter: u8,
}

impl Quarter {
    pub fn new(year: i32, quarter: u8) -> Result<Self> {
        if !(1..=4).contains(&quarter) {
            return Err(Error::InvalidQuarter(format!("{year}Q{quarter}")));
        }
        Ok(Quarter { year, quarter })
    }

    pub fn year(&self) -> i32 {
        self.year
    }

    pub fn quarter(&self) -> u8 {
        self.quarter
    }

    /// True when the date falls inside this calendar quarter.
    pub fn contains(&self, date: NaiveDate) -> bool {
        date.year() == self.year && (date.month0() / 3) as u8 + 1 == self.quarter
    }
}

impl fmt::Display for Quarter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}Q{}", self.year, self.quarter)
    }
}

impl FromStr for Quarter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidQuarter(s.to_owned());
        let (y, q) = s.split_once(['Q', 'q']).ok_or_else(bad)?;
        let year: i32 = y.parse().map_err(|_| bad())?;
        let quarter: u8 = q.parse().map_err(|_| bad())?;
        Quarter::new(year, quarter).map_err(|_| bad())
    }
}

/// Dense fund index, contiguous from 0 within one snapshot.
#[repr(transparent)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FundIdx(pub u32);

/// Dense asset index, contiguous from 0 within one snapshot.
#[repr(transparent)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AssetIdx(pub u32);

impl FundIdx {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl AssetIdx {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// One holding relationship as it appears in edge-list files.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeRecord {
    pub fund_id: String,
    pub asset_id: String,
    pub market_value: f64,
}

impl EdgeRecord {
    pub fn new(fund_id: impl Into<String>, asset_id: impl Into<String>, market_value: f64) -> Self {
        EdgeRecord {
            fund_id: fund_id.into(),
            asset_id: asset_id.into(),
            market_value,
        }
    }
}

/// Sparse normalized weight vector of one fund: entries `(asset, w)` with
/// `w = W / S_i`, strictly positive, sorted by asset index, summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct PortfolioView {
    pub fund: FundIdx,
    pub entries: Vec<(AssetIdx, f64)>,
}

impl PortfolioView {
    pub fn degree(&self) -> usize {
        self.entries.len()
    }

    /// Asset indices, ascending.
    pub fn assets(&self) -> impl Iterator<Item = AssetIdx> + '_ {
        self.entries.iter().map(|&(a, _)| a)
    }
}

/// Summary row for one snapshot: node counts, edge count, density
/// `rho = E / (N_f * N_a)`, mean fund degree `kbar = E / N_f`, total value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SnapshotStats {
    pub n_funds: usize,
    pub n_assets: usize,
    pub n_edges: usize,
    pub density: f64,
    pub mean_fund_degree: f64,
    pub total_value: f64,
}

/// One quarterly snapshot of the weighted bipartite holding network.
///
/// Edges are stored twice: fund-major CSR (`edge_assets` / `edge_values`,
/// sorted by asset within each fund) and an asset-major CSR whose entries
/// point back into the fund-major arrays, so both orientations share one
/// copy of the weights.
#[derive(Debug, Clone)]
pub struct HoldingNetwork {
    quarter: Quarter,
    fund_ids: Vec<String>,
    asset_ids: Vec<String>,
    fund_lookup: HashMap<String, FundIdx>,
    asset_lookup: HashMap<String, AssetIdx>,
    fund_sizes: Vec<f64>,
    asset_values: Vec<f64>,
    total_value: f64,
    pub(crate) fund_offsets: Vec<usize>,
    pub(crate) edge_assets: Vec<AssetIdx>,
    pub(crate) edge_values: Vec<f64>,
    pub(crate) asset_offsets: Vec<usize>,
    pub(crate) aedge_funds: Vec<FundIdx>,
    pub(crate) aedge_pos: Vec<u32>,
}

impl HoldingNetwork {
    /// Build a snapshot from raw holding records.
    ///
    /// Duplicate `(fund, asset)` pairs are summed, zero-value holdings are
    /// dropped after summing, and funds or assets left without a surviving
    /// edge are excluded. Node indices are assigned in lexicographic id
    /// order, so the result does not depend on input order.
    pub fn build<I>(quarter: Quarter, records: I) -> Result<Self>
    where
        I: IntoIterator<Item = EdgeRecord>,
    {
        let mut aggregated: std::collections::BTreeMap<(String, String), f64> =
            std::collections::BTreeMap::new();
        let mut saw_any = false;
        for rec in records {
            saw_any = true;
            if !rec.market_value.is_finite() {
                return Err(Error::NonFiniteValue {
                    fund: rec.fund_id,
                    asset: rec.asset_id,
                });
            }
            if rec.market_value < 0.0 {
                return Err(Error::NegativeValue {
                    fund: rec.fund_id,
                    asset: rec.asset_id,
                    value: rec.market_value,
                });
            }
            *aggregated.entry((rec.fund_id, rec.asset_id)).or_insert(0.0) += rec.market_value;
        }
        if !saw_any {
            return Err(Error::EmptyEdgeList);
        }
        aggregated.retain(|_, v| *v > 0.0);
        if aggregated.is_empty() {
            return Err(Error::NoSurvivingEdges);
        }

        let mut fund_ids: Vec<String> = aggregated.keys().map(|(f, _)| f.clone()).collect();
        fund_ids.dedup();
        let mut asset_ids: Vec<String> = aggregated.keys().map(|(_, a)| a.clone()).collect();
        asset_ids.sort_unstable();
        asset_ids.dedup();

        let fund_index: HashMap<&str, u32> = fund_ids
            .iter()
            .enumerate()
            .map(|(i, id)| (id.as_str(), i as u32))
            .collect();
        let asset_index: HashMap<&str, u32> = asset_ids
            .iter()
            .enumerate()
            .map(|(i, id)| (id.as_str(), i as u32))
            .collect();

        let edges: Vec<(u32, u32, f64)> = aggregated
            .iter()
            .map(|((f, a), w)| (fund_index[f.as_str()], asset_index[a.as_str()], *w))
            .collect();

        Self::from_parts(quarter, fund_ids, asset_ids, edges)
    }

    /// Assemble a snapshot from pre-indexed parts.
    ///
    /// Unlike [`HoldingNetwork::build`], the node tables are taken as given:
    /// ids keep their position even when they end up with no incident edge.
    /// Null-model randomizations rely on this to keep `N_f`, `N_a` and the
    /// density denominator comparable with the source network.
    pub fn from_parts(
        quarter: Quarter,
        fund_ids: Vec<String>,
        asset_ids: Vec<String>,
        mut edges: Vec<(u32, u32, f64)>,
    ) -> Result<Self> {
        if edges.is_empty() {
            return Err(Error::EmptyEdgeList);
        }
        let n_funds = fund_ids.len();
        let n_assets = asset_ids.len();

        let mut fund_lookup = HashMap::with_capacity(n_funds);
        for (i, id) in fund_ids.iter().enumerate() {
            if fund_lookup.insert(id.clone(), FundIdx(i as u32)).is_some() {
                return Err(Error::InvalidConfig(format!("duplicate fund id {id:?}")));
            }
        }
        let mut asset_lookup = HashMap::with_capacity(n_assets);
        for (i, id) in asset_ids.iter().enumerate() {
            if asset_lookup.insert(id.clone(), AssetIdx(i as u32)).is_some() {
                return Err(Error::InvalidConfig(format!("duplicate asset id {id:?}")));
            }
        }

        edges.sort_unstable_by_key(|&(f, a, _)| (f, a));
        for window in edges.windows(2) {
            if window[0].0 == window[1].0 && window[0].1 == window[1].1 {
                return Err(Error::DuplicateEdge {
                    fund: window[0].0 as usize,
                    asset: window[0].1 as usize,
                });
            }
        }

        let n_edges = edges.len();
        let mut fund_offsets = vec![0usize; n_funds + 1];
        let mut asset_degrees = vec![0usize; n_assets];
        for &(f, a, w) in &edges {
            if f as usize >= n_funds {
                return Err(Error::UnknownFundIndex(f as usize));
            }
            if a as usize >= n_assets {
                return Err(Error::UnknownAssetIndex(a as usize));
            }
            if !w.is_finite() {
                return Err(Error::NonFiniteValue {
                    fund: fund_ids[f as usize].clone(),
                    asset: asset_ids[a as usize].clone(),
                });
            }
            if w <= 0.0 {
                return Err(Error::NegativeValue {
                    fund: fund_ids[f as usize].clone(),
                    asset: asset_ids[a as usize].clone(),
                    value: w,
                });
            }
            fund_offsets[f as usize + 1] += 1;
            asset_degrees[a as usize] += 1;
        }
        for i in 0..n_funds {
            fund_offsets[i + 1] += fund_offsets[i];
        }

        let mut edge_assets = Vec::with_capacity(n_edges);
        let mut edge_values = Vec::with_capacity(n_edges);
        for &(_, a, w) in &edges {
            edge_assets.push(AssetIdx(a));
            edge_values.push(w);
        }

        let mut asset_offsets = vec![0usize; n_assets + 1];
        for a in 0..n_assets {
            asset_offsets[a + 1] = asset_offsets[a] + asset_degrees[a];
        }
        let mut cursor = asset_offsets.clone();
        let mut aedge_funds = vec![FundIdx(0); n_edges];
        let mut aedge_pos = vec![0u32; n_edges];
        for (pos, &(f, a, _)) in edges.iter().enumerate() {
            let slot = cursor[a as usize];
            aedge_funds[slot] = FundIdx(f);
            aedge_pos[slot] = pos as u32;
            cursor[a as usize] += 1;
        }

        let mut fund_sizes = vec![0.0f64; n_funds];
        for i in 0..n_funds {
            fund_sizes[i] = edge_values[fund_offsets[i]..fund_offsets[i + 1]].iter().sum();
        }
        let mut asset_values = vec![0.0f64; n_assets];
        for a in 0..n_assets {
            let mut m = 0.0;
            for slot in asset_offsets[a]..asset_offsets[a + 1] {
                m += edge_values[aedge_pos[slot] as usize];
            }
            asset_values[a] = m;
        }
        let total_value = fund_sizes.iter().sum();

        Ok(HoldingNetwork {
            quarter,
            fund_ids,
            asset_ids,
            fund_lookup,
            asset_lookup,
            fund_sizes,
            asset_values,
            total_value,
            fund_offsets,
            edge_assets,
            edge_values,
            asset_offsets,
            aedge_funds,
            aedge_pos,
        })
    }

    pub fn quarter(&self) -> Quarter {
        self.quarter
    }

    pub fn n_funds(&self) -> usize {
        self.fund_ids.len()
    }

    pub fn n_assets(&self) -> usize {
        self.asset_ids.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edge_values.len()
    }

    /// Total value of the system, defined as the fund-major sum of sizes.
    pub fn total_value(&self) -> f64 {
        self.total_value
    }

    pub fn fund_ids(&self) -> &[String] {
        &self.fund_ids
    }

    pub fn asset_ids(&self) -> &[String] {
        &self.asset_ids
    }

    pub fn fund_id(&self, fund: FundIdx) -> Result<&str> {
        self.fund_ids
            .get(fund.index())
            .map(String::as_str)
            .ok_or(Error::UnknownFundIndex(fund.index()))
    }

    pub fn asset_id(&self, asset: AssetIdx) -> Result<&str> {
        self.asset_ids
            .get(asset.index())
            .map(String::as_str)
            .ok_or(Error::UnknownAssetIndex(asset.index()))
    }

    pub fn fund_index(&self, id: &str) -> Result<FundIdx> {
        self.fund_lookup
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownFundId(id.to_owned()))
    }

    pub fn asset_index(&self, id: &str) -> Result<AssetIdx> {
        self.asset_lookup
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownAssetId(id.to_owned()))
    }

    /// Size `S_i` of a fund (node strength).
    pub fn fund_size(&self, fund: FundIdx) -> Result<f64> {
        self.fund_sizes
            .get(fund.index())
            .copied()
            .ok_or(Error::UnknownFundIndex(fund.index()))
    }

    /// Aggregate market value `M_alpha` of an asset.
    pub fn asset_value(&self, asset: AssetIdx) -> Result<f64> {
        self.asset_values
            .get(asset.index())
            .copied()
            .ok_or(Error::UnknownAssetIndex(asset.index()))
    }

    pub fn fund_sizes(&self) -> &[f64] {
        &self.fund_sizes
    }

    pub fn asset_values(&self) -> &[f64] {
        &self.asset_values
    }

    /// Number of distinct assets held by the fund.
    pub fn fund_degree(&self, fund: FundIdx) -> Result<usize> {
        let i = fund.index();
        if i >= self.n_funds() {
            return Err(Error::UnknownFundIndex(i));
        }
        Ok(self.fund_offsets[i + 1] - self.fund_offsets[i])
    }

    /// Number of funds holding the asset.
    pub fn asset_degree(&self, asset: AssetIdx) -> Result<usize> {
        let a = asset.index();
        if a >= self.n_assets() {
            return Err(Error::UnknownAssetIndex(a));
        }
        Ok(self.asset_offsets[a + 1] - self.asset_offsets[a])
    }

    /// Holdings of one fund as parallel slices `(assets, values)`, sorted by
    /// asset index.
    pub fn fund_holdings(&self, fund: FundIdx) -> Result<(&[AssetIdx], &[f64])> {
        let i = fund.index();
        if i >= self.n_funds() {
            return Err(Error::UnknownFundIndex(i));
        }
        let range = self.fund_offsets[i]..self.fund_offsets[i + 1];
        Ok((&self.edge_assets[range.clone()], &self.edge_values[range]))
    }

    /// Holders of one asset as `(fund, value)` pairs, sorted by fund index.
    pub fn asset_holders(&self, asset: AssetIdx) -> Result<impl Iterator<Item = (FundIdx, f64)> + '_> {
        let a = asset.index();
        if a >= self.n_assets() {
            return Err(Error::UnknownAssetIndex(a));
        }
        let range = self.asset_offsets[a]..self.asset_offsets[a + 1];
        Ok(range.map(move |slot| {
            (
                self.aedge_funds[slot],
                self.edge_values[self.aedge_pos[slot] as usize],
            )
        }))
    }

    /// Normalized portfolio weights `w = W / S_i` of one fund.
    pub fn portfolio_weights(&self, fund: FundIdx) -> Result<PortfolioView> {
        let (assets, values) = self.fund_holdings(fund)?;
        if assets.is_empty() {
            return Err(Error::EmptyPortfolio(self.fund_ids[fund.index()].clone()));
        }
        let size = self.fund_sizes[fund.index()];
        let entries = assets
            .iter()
            .zip(values)
            .map(|(&a, &w)| (a, w / size))
            .collect();
        Ok(PortfolioView { fund, entries })
    }

    pub fn snapshot_stats(&self) -> SnapshotStats {
        let n_funds = self.n_funds();
        let n_assets = self.n_assets();
        let n_edges = self.n_edges();
        SnapshotStats {
            n_funds,
            n_assets,
            n_edges,
            density: n_edges as f64 / (n_funds as f64 * n_assets as f64),
            mean_fund_degree: n_edges as f64 / n_funds as f64,
            total_value: self.total_value,
        }
    }

    /// Canonical fund-major edge list, suitable for export.
    pub fn edge_records(&self) -> impl Iterator<Item = EdgeRecord> + '_ {
        (0..self.n_funds()).flat_map(move |i| {
            let range = self.fund_offsets[i]..self.fund_offsets[i + 1];
            range.map(move |e| EdgeRecord {
                fund_id: self.fund_ids[i].clone(),
                asset_id: self.asset_ids[self.edge_assets[e].index()].clone(),
                market_value: self.edge_values[e],
            })
        })
    }

    /// Edge triples `(fund, asset, value)` in canonical fund-major order.
    pub fn edge_triples(&self) -> impl Iterator<Item = (FundIdx, AssetIdx, f64)> + '_ {
        (0..self.n_funds()).flat_map(move |i| {
            let range = self.fund_offsets[i]..self.fund_offsets[i + 1];
            range.map(move |e| (FundIdx(i as u32), self.edge_assets[e], self.edge_values[e]))
        })
    }

    /// Audit the structural invariants; used by tests and by generators that
    /// assemble networks through [`HoldingNetwork::from_parts`].
    pub fn validate(&self) -> Result<()> {
        let n_edges = self.n_edges();
        let fail = |msg: String| Err(Error::InvalidConfig(msg));

        if self.fund_offsets.len() != self.n_funds() + 1
            || self.asset_offsets.len() != self.n_assets() + 1
            || *self.fund_offsets.last().unwrap() != n_edges
            || *self.asset_offsets.last().unwrap() != n_edges
            || self.aedge_funds.len() != n_edges
            || self.aedge_pos.len() != n_edges
        {
            return fail("inconsistent adjacency layout".into());
        }

        let fund_degree_sum: usize = (0..self.n_funds())
            .map(|i| self.fund_offsets[i + 1] - self.fund_offsets[i])
            .sum();
        let asset_degree_sum: usize = (0..self.n_assets())
            .map(|a| self.asset_offsets[a + 1] - self.asset_offsets[a])
            .sum();
        if fund_degree_sum != n_edges || asset_degree_sum != n_edges {
            return fail("degree sums do not match edge count".into());
        }

        for i in 0..self.n_funds() {
            let assets = &self.edge_assets[self.fund_offsets[i]..self.fund_offsets[i + 1]];
            if !assets.windows(2).all(|w| w[0] < w[1]) {
                return fail(format!("fund {i} adjacency not strictly sorted"));
            }
        }
        if !self.edge_values.iter().all(|&w| w.is_finite() && w > 0.0) {
            return fail("non-positive edge value".into());
        }

        // Asset-major entries must be a bijection onto the fund-major edges.
        let mut seen = vec![false; n_edges];
        for a in 0..self.n_assets() {
            for slot in self.asset_offsets[a]..self.asset_offsets[a + 1] {
                let pos = self.aedge_pos[slot] as usize;
                if pos >= n_edges || seen[pos] || self.edge_assets[pos].index() != a {
                    return fail("asset-major view disagrees with fund-major edges".into());
                }
                seen[pos] = true;
            }
        }

        let rel = |x: f64, y: f64| (x - y).abs() <= 1e-9 * x.abs().max(y.abs()).max(1.0);
        let fund_total: f64 = self.fund_sizes.iter().sum();
        let asset_total: f64 = self.asset_values.iter().sum();
        if fund_total != self.total_value {
            return fail("total value does not equal the sum of fund sizes".into());
        }
        if !rel(fund_total, asset_total) {
            return fail("fund and asset totals disagree beyond tolerance".into());
        }
        for i in 0..self.n_funds() {
            let s: f64 = self.edge_values[self.fund_offsets[i]..self.fund_offsets[i + 1]]
                .iter()
                .sum();
            if s != self.fund_sizes[i] {
                return fail(format!("fund {i} size is stale"));
            }
        }
        Ok(())
    }
}
