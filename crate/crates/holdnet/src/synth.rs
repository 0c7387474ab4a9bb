//! Synthetic holding networks with tunable heterogeneity and correlation.
//!
//! Fund degrees follow a truncated power law scaled to the target mean;
//! asset popularity follows a second power law. Cross-portfolio correlation
//! comes from a style mixture: each style owns a popularity-sampled pool of
//! assets, and a fund of style `g` draws its assets without replacement
//! from `(1 - kappa) * popularity + kappa * pool(g)`. At `kappa = 0` styles
//! are irrelevant; at `kappa = 1` funds pick exclusively from their style
//! menu, and pools sampled by popularity keep the popular head shared
//! across styles, so mean overlap grows monotonically with `kappa`.
//!
//! Fund sizes are drawn from a fixed fat-tailed law (Pareto, shape 3/2) and
//! rescaled so edge values sum to the requested total.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{HoldingNetwork, Quarter};
use crate::rng::{stream_rng, STREAM_SYNTH};
use rand::Rng;

const FUND_SIZE_SHAPE: f64 = 1.5;

/// Distribution of portfolio weights within a fund.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightMode {
    /// Equal weight on every held asset.
    Uniform,
    /// Weights proportional to Pareto draws with the given tail exponent.
    PowerLaw { exponent: f64 },
}

/// Parameters of the synthetic generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthSpec {
    pub n_funds: usize,
    pub n_assets: usize,
    /// Target mean fund degree `kbar`.
    pub mean_degree: f64,
    /// Fund-degree tail exponent `gamma_f` (> 1; mean targeting needs > 2).
    pub gamma_funds: f64,
    /// Asset-popularity tail exponent `gamma_a` (> 1).
    pub gamma_assets: f64,
    /// Number of investment styles `G`.
    pub styles: usize,
    /// Style concentration `kappa` in `[0, 1]`.
    pub style_concentration: f64,
    pub weight_mode: WeightMode,
    /// Total system value the edge values are scaled to.
    pub total_value: f64,
    pub seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            n_funds: 1000,
            n_assets: 4000,
            mean_degree: 50.0,
            gamma_funds: 2.5,
            gamma_assets: 2.2,
            styles: 1,
            style_concentration: 0.0,
            weight_mode: WeightMode::Uniform,
            total_value: 1e12,
            seed: 0,
        }
    }
}

impl SynthSpec {
    pub fn validate(&self) -> Result<()> {
        let err = |msg: String| Err(Error::InvalidConfig(msg));
        if self.n_funds == 0 || self.n_assets == 0 {
            return err("n_funds and n_assets must be positive".into());
        }
        if !(self.mean_degree >= 1.0 && self.mean_degree <= self.n_assets as f64) {
            return err(format!(
                "mean degree must lie in [1, n_assets], got {}",
                self.mean_degree
            ));
        }
        if self.gamma_funds <= 1.0 || self.gamma_assets <= 1.0 {
            return err("tail exponents must exceed 1".into());
        }
        if self.styles == 0 {
            return err("style count must be positive".into());
        }
        if !(0.0..=1.0).contains(&self.style_concentration) {
            return err(format!(
                "style concentration must lie in [0, 1], got {}",
                self.style_concentration
            ));
        }
        if let WeightMode::PowerLaw { exponent } = self.weight_mode {
            if exponent <= 1.0 {
                return err("weight exponent must exceed 1".into());
            }
        }
        if !(self.total_value > 0.0 && self.total_value.is_finite()) {
            return err("total value must be positive".into());
        }
        Ok(())
    }
}

/// Inverse-CDF Pareto draw on `[scale, inf)` with the given tail shape.
fn pareto<R: Rng>(rng: &mut R, scale: f64, shape: f64) -> f64 {
    let u: f64 = rng.random();
    scale * (1.0 - u).powf(-1.0 / shape)
}

fn exponential<R: Rng>(rng: &mut R) -> f64 {
    let u: f64 = rng.random();
    -(1.0 - u).ln()
}

/// Weighted sampling of `k` distinct indices without replacement
/// (exponential-race keys `Exp(1) / w`, smallest `k` win). Indices with
/// zero weight are never selected.
fn weighted_distinct<R: Rng>(rng: &mut R, weights: &[f64], k: usize) -> Vec<usize> {
    let mut keys: Vec<(f64, usize)> = weights
        .iter()
        .enumerate()
        .filter_map(|(a, &w)| {
            let e = exponential(rng);
            (w > 0.0).then_some((e / w, a))
        })
        .collect();
    let k = k.min(keys.len());
    if k == 0 {
        return Vec::new();
    }
    keys.select_nth_unstable_by(k - 1, |x, y| {
        x.0.total_cmp(&y.0).then(x.1.cmp(&y.1))
    });
    keys.truncate(k);
    keys.into_iter().map(|(_, a)| a).collect()
}

/// Generate one synthetic snapshot, deterministically from `spec.seed`.
pub fn generate(spec: &SynthSpec, quarter: Quarter) -> Result<HoldingNetwork> {
    spec.validate()?;
    let mut rng = stream_rng(spec.seed, STREAM_SYNTH);
    let n_funds = spec.n_funds;
    let n_assets = spec.n_assets;

    // Fund degrees: truncated power law with the scale chosen so the
    // untruncated mean equals the target (requires gamma > 2).
    let degree_scale = if spec.gamma_funds > 2.0 {
        (spec.mean_degree * (spec.gamma_funds - 2.0) / (spec.gamma_funds - 1.0)).max(1.0)
    } else {
        1.0
    };
    let degree_shape = spec.gamma_funds - 1.0;
    let degrees: Vec<usize> = (0..n_funds)
        .map(|_| {
            pareto(&mut rng, degree_scale, degree_shape)
                .round()
                .clamp(1.0, n_assets as f64) as usize
        })
        .collect();

    let popularity: Vec<f64> = (0..n_assets)
        .map(|_| pareto(&mut rng, 1.0, spec.gamma_assets - 1.0))
        .collect();
    let popularity_mass: f64 = popularity.iter().sum();

    let fund_styles: Vec<usize> = (0..n_funds)
        .map(|_| rng.random_range(0..spec.styles))
        .collect();

    // Style menus: popularity-sampled asset pools sized to twice the mean
    // degree, so a typical portfolio fits inside its style menu while the
    // popular head stays shared across styles. That keeps mean overlap
    // monotone in kappa and makes a single fully concentrated style the
    // maximal-overlap configuration.
    let pool_size = ((2.0 * spec.mean_degree).ceil() as usize).clamp(1, n_assets);
    let kappa = spec.style_concentration;
    let style_mix: Vec<Vec<f64>> = (0..spec.styles)
        .map(|_| {
            let pool = weighted_distinct(&mut rng, &popularity, pool_size);
            let pool_mass: f64 = pool.iter().map(|&a| popularity[a]).sum();
            let mut mix: Vec<f64> = popularity
                .iter()
                .map(|&p| (1.0 - kappa) * p / popularity_mass)
                .collect();
            for &a in &pool {
                mix[a] += kappa * popularity[a] / pool_mass;
            }
            mix
        })
        .collect();

    // Asset menus per fund.
    let mut fund_assets: Vec<Vec<usize>> = Vec::with_capacity(n_funds);
    let mut complement: Vec<usize> = Vec::new();
    for i in 0..n_funds {
        let mix = &style_mix[fund_styles[i]];
        let mut chosen = weighted_distinct(&mut rng, mix, degrees[i]);
        if chosen.len() < degrees[i] {
            // Mixture support exhausted (kappa = 1 and a degree larger than
            // the style pool): fill uniformly from the unreachable assets.
            let mut in_pool = vec![false; n_assets];
            for &a in &chosen {
                in_pool[a] = true;
            }
            complement.clear();
            complement.extend((0..n_assets).filter(|&a| !in_pool[a] && mix[a] == 0.0));
            let missing = degrees[i] - chosen.len();
            for slot in 0..missing {
                let last = complement.len() - 1 - slot;
                let pick = rng.random_range(0..=last);
                chosen.push(complement[pick]);
                complement.swap(pick, last);
            }
        }
        chosen.sort_unstable();
        fund_assets.push(chosen);
    }

    // Fund sizes and within-fund weights.
    let raw_sizes: Vec<f64> = (0..n_funds)
        .map(|_| pareto(&mut rng, 1.0, FUND_SIZE_SHAPE))
        .collect();
    let size_scale = spec.total_value / raw_sizes.iter().sum::<f64>();

    let mut edges: Vec<(u32, u32, f64)> = Vec::with_capacity(degrees.iter().sum());
    for i in 0..n_funds {
        let assets = &fund_assets[i];
        let size = raw_sizes[i] * size_scale;
        match spec.weight_mode {
            WeightMode::Uniform => {
                let value = size / assets.len() as f64;
                for &a in assets {
                    edges.push((i as u32, a as u32, value));
                }
            }
            WeightMode::PowerLaw { exponent } => {
                let raw: Vec<f64> = assets
                    .iter()
                    .map(|_| pareto(&mut rng, 1.0, exponent - 1.0))
                    .collect();
                let total: f64 = raw.iter().sum();
                for (&a, r) in assets.iter().zip(raw) {
                    edges.push((i as u32, a as u32, size * r / total));
                }
            }
        }
    }

    let fund_ids = (0..n_funds).map(|i| format!("F{i:05}")).collect();
    let asset_ids = (0..n_assets).map(|a| format!("A{a:05}")).collect();
    HoldingNetwork::from_parts(quarter, fund_ids, asset_ids, edges)
}
