//! Fire-sale distress propagation on a static holding network.
//!
//! One step of the recursion, starting from the pending per-asset returns
//! `delta_a(t) <= 0`:
//!
//! 1. revalue holdings: `W_ia <- W_ia * (1 + delta_a)`;
//! 2. portfolio drop per fund, relative to start-of-step value:
//!    `Drop_i = sum_a w_ia * delta_a <= 0`;
//! 3. redemption fraction `f_i = min(1, |Drop_i|)`;
//! 4. sell volume per asset `V_a = sum_i f_i * W_ia` (post-revaluation);
//! 5. liquidate: `W_ia <- W_ia * (1 - f_i)`;
//! 6. next return `delta_a(t+1) = -min(1, c * V_a / M_a)`, with `M_a` the
//!    post-revaluation, pre-liquidation aggregate value; an asset whose
//!    aggregate value reaches zero is frozen (`delta = 0` from then on);
//! 7. damage `D(t) = (S_tot(0) - S_tot(t)) / S_tot(0)` over the holdings
//!    remaining in the network.
//!
//! Redeemed value leaves the network and counts as loss; the trajectory
//! additionally reports a mark-to-market variant (`price_damage`) that
//! ignores redemption outflows and prices the original holdings at the
//! current price factors.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::network::{AssetIdx, HoldingNetwork};

/// Parameters of one shock experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShockConfig {
    /// Initial price shock applied to the seed asset, in `[0, 1]`.
    pub delta0: f64,
    /// Number of propagation steps.
    pub steps: usize,
    /// Market-impact coefficient `c` in `delta = -min(1, c * V / M)`.
    pub impact_c: f64,
    /// Quantile of the asset-value distribution defining the top-asset set.
    pub quantile: f64,
}

impl Default for ShockConfig {
    fn default() -> Self {
        ShockConfig {
            delta0: 0.5,
            steps: 10,
            impact_c: 1.0,
            quantile: 0.999,
        }
    }
}

impl ShockConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.delta0) {
            return Err(Error::InvalidConfig(format!(
                "delta0 must lie in [0, 1], got {}",
                self.delta0
            )));
        }
        if self.steps == 0 {
            return Err(Error::InvalidConfig("steps must be at least 1".into()));
        }
        if !(self.impact_c > 0.0 && self.impact_c.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "impact coefficient must be positive, got {}",
                self.impact_c
            )));
        }
        if !(0.0 < self.quantile && self.quantile < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "quantile must lie in (0, 1), got {}",
                self.quantile
            )));
        }
        Ok(())
    }
}

/// Damage time series; index `t-1` holds the value after step `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct DamageTrajectory {
    /// Fractional loss of total network value (redemptions included).
    pub damage: Vec<f64>,
    /// Mark-to-market loss of the original holdings at current prices.
    pub price_damage: Vec<f64>,
}

/// Ensemble result of shocking every top asset.
#[derive(Debug, Clone)]
pub struct SystemicDamage {
    /// Shocked assets, ascending.
    pub assets: Vec<AssetIdx>,
    /// Average trajectory over `assets`.
    pub mean: DamageTrajectory,
    /// Per-asset trajectories, aligned with `assets`.
    pub per_asset: Vec<DamageTrajectory>,
}

/// Assets whose aggregate value strictly exceeds the `q`-quantile of the
/// asset-value distribution (linear interpolation on the sorted values).
pub fn top_assets(net: &HoldingNetwork, q: f64) -> Result<Vec<AssetIdx>> {
    if !(0.0..1.0).contains(&q) {
        return Err(Error::InvalidConfig(format!(
            "quantile must lie in [0, 1), got {q}"
        )));
    }
    let values = net.asset_values();
    if values.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let threshold = interpolated_quantile(&sorted, q);
    Ok((0..values.len())
        .filter(|&a| values[a] > threshold)
        .map(|a| AssetIdx(a as u32))
        .collect())
}

fn interpolated_quantile(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = q * (n - 1) as f64;
    let lo = h.floor() as usize;
    let frac = h - lo as f64;
    if lo + 1 >= n {
        sorted[n - 1]
    } else {
        sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
    }
}

/// Mutable state of one shock simulation. The snapshot is shared read-only;
/// the simulation owns private copies of holdings, fund sizes and prices.
pub struct ShockSimulation<'a> {
    net: &'a HoldingNetwork,
    cfg: ShockConfig,
    /// Current holdings, fund-major, aligned with the network's edge arrays.
    values: Vec<f64>,
    fund_sizes: Vec<f64>,
    /// Aggregate asset value, maintained incrementally.
    asset_values: Vec<f64>,
    /// Pending return per asset, in `[-1, 0]`.
    delta: Vec<f64>,
    frozen: Vec<bool>,
    price_factor: Vec<f64>,
    initial_total: f64,
    // Scratch reused across steps.
    drop: Vec<f64>,
    sell: Vec<f64>,
}

impl<'a> ShockSimulation<'a> {
    pub fn new(net: &'a HoldingNetwork, asset: AssetIdx, cfg: ShockConfig) -> Result<Self> {
        cfg.validate()?;
        if asset.index() >= net.n_assets() {
            return Err(Error::UnknownAssetIndex(asset.index()));
        }
        let mut delta = vec![0.0; net.n_assets()];
        delta[asset.index()] = -cfg.delta0;
        Ok(ShockSimulation {
            net,
            cfg,
            values: net.edge_values.clone(),
            fund_sizes: net.fund_sizes().to_vec(),
            asset_values: net.asset_values().to_vec(),
            delta,
            frozen: vec![false; net.n_assets()],
            price_factor: vec![1.0; net.n_assets()],
            initial_total: net.total_value(),
            drop: vec![0.0; net.n_funds()],
            sell: vec![0.0; net.n_assets()],
        })
    }

    /// Current holdings, fund-major; bitwise equal to the input when no
    /// shock has been applied.
    pub fn holdings(&self) -> &[f64] {
        &self.values
    }

    pub fn price_factors(&self) -> &[f64] {
        &self.price_factor
    }

    /// Execute one propagation step and return `(damage, price_damage)`.
    pub fn step(&mut self) -> (f64, f64) {
        let net = self.net;

        // Revalue holdings of assets with a pending return; accumulate the
        // per-fund drop so weights refer to start-of-step values.
        for a in 0..net.n_assets() {
            let d = self.delta[a];
            if d == 0.0 {
                continue;
            }
            self.price_factor[a] *= 1.0 + d;
            for slot in net.asset_offsets[a]..net.asset_offsets[a + 1] {
                let pos = net.aedge_pos[slot] as usize;
                let change = self.values[pos] * d;
                self.drop[net.aedge_funds[slot].index()] += change;
                self.values[pos] += change;
            }
            self.asset_values[a] *= 1.0 + d;
        }

        // Redemptions: funds whose portfolio dropped sell a proportional
        // slice of every holding. Sell volumes accumulate per asset against
        // the pre-liquidation aggregate values.
        for i in 0..net.n_funds() {
            let drop = self.drop[i];
            if drop == 0.0 {
                continue;
            }
            self.drop[i] = 0.0;
            let start_size = self.fund_sizes[i];
            if start_size <= 0.0 {
                continue;
            }
            let fraction = (-drop / start_size).min(1.0);
            let revalued_size = start_size + drop;
            if fraction > 0.0 {
                for e in net.fund_offsets[i]..net.fund_offsets[i + 1] {
                    let v = self.values[e];
                    self.sell[net.edge_assets[e].index()] += fraction * v;
                    self.values[e] = v * (1.0 - fraction);
                }
            }
            self.fund_sizes[i] = revalued_size * (1.0 - fraction);
        }

        // Market impact of the sell volumes sets the next returns; selling
        // also removes the sold slice from the aggregate asset values.
        for a in 0..net.n_assets() {
            let sold = self.sell[a];
            self.sell[a] = 0.0;
            if self.frozen[a] {
                self.delta[a] = 0.0;
                continue;
            }
            let aggregate = self.asset_values[a];
            if aggregate <= 0.0 {
                self.frozen[a] = true;
                self.delta[a] = 0.0;
                continue;
            }
            self.delta[a] = if sold > 0.0 {
                -(self.cfg.impact_c * sold / aggregate).min(1.0)
            } else {
                0.0
            };
            self.asset_values[a] = aggregate - sold;
        }

        let total: f64 = self.fund_sizes.iter().sum();
        let damage = (self.initial_total - total) / self.initial_total;
        let price_damage = {
            let priced: f64 = (0..net.n_assets())
                .map(|a| net.asset_values()[a] * self.price_factor[a])
                .sum();
            (self.initial_total - priced) / self.initial_total
        };
        (damage, price_damage)
    }

    pub fn run(mut self) -> DamageTrajectory {
        let mut damage = Vec::with_capacity(self.cfg.steps);
        let mut price_damage = Vec::with_capacity(self.cfg.steps);
        for _ in 0..self.cfg.steps {
            let (d, p) = self.step();
            damage.push(d);
            price_damage.push(p);
        }
        DamageTrajectory {
            damage,
            price_damage,
        }
    }
}

/// Shock a single asset and return its damage trajectory.
pub fn propagate_shock(
    net: &HoldingNetwork,
    asset: AssetIdx,
    cfg: ShockConfig,
) -> Result<DamageTrajectory> {
    Ok(ShockSimulation::new(net, asset, cfg)?.run())
}

/// Shock every top asset independently and average the trajectories.
pub fn systemic_damage(net: &HoldingNetwork, cfg: ShockConfig) -> Result<SystemicDamage> {
    cfg.validate()?;
    let assets = top_assets(net, cfg.quantile)?;
    if assets.is_empty() {
        return Err(Error::EmptyTopAssets {
            quantile: cfg.quantile,
        });
    }

    #[cfg(feature = "parallel")]
    let per_asset: Vec<DamageTrajectory> = assets
        .par_iter()
        .map(|&a| ShockSimulation::new(net, a, cfg).map(ShockSimulation::run))
        .collect::<Result<_>>()?;
    #[cfg(not(feature = "parallel"))]
    let per_asset: Vec<DamageTrajectory> = assets
        .iter()
        .map(|&a| ShockSimulation::new(net, a, cfg).map(ShockSimulation::run))
        .collect::<Result<_>>()?;

    let n = assets.len() as f64;
    let mut mean = DamageTrajectory {
        damage: vec![0.0; cfg.steps],
        price_damage: vec![0.0; cfg.steps],
    };
    for trajectory in &per_asset {
        for t in 0..cfg.steps {
            mean.damage[t] += trajectory.damage[t];
            mean.price_damage[t] += trajectory.price_damage[t];
        }
    }
    for t in 0..cfg.steps {
        mean.damage[t] /= n;
        mean.price_damage[t] /= n;
    }
    Ok(SystemicDamage {
        assets,
        mean,
        per_asset,
    })
}
