//! Acceptance suite.
//!
//! Each test prints one summary line with its measured numbers and then
//! asserts the criterion:
//!
//! 1. the pairwise engine matches a naive all-pairs oracle exactly on 50
//!    random networks (N_f <= 200) in under 10 s;
//! 2. closed-form index identities hold, and `s <= J <= 1` on 1e5 random
//!    pairs;
//! 3. null models conserve what they promise and are byte-reproducible;
//! 4. the hand-derived contagion example is exact, the zero shock is a
//!    bitwise fixed point, and 100 fuzzed scenarios keep the invariants;
//! 5. damage ordering original >= rnd2 >= rnd1 on a clustered network at
//!    2006Q2 scale, in at least 90% of 20 seeds, within 10 minutes;
//! 6. mean-similarity ordering with non-overlapping 95% intervals;
//! 7. damage monotone in the shock size, mean similarity monotone in the
//!    style concentration;
//! 8. snapshot build + stats + degree CCDFs under 5 s and full pairwise
//!    similarity under 60 s at 2006Q2 scale.

use std::collections::{BTreeMap, HashSet};
use std::sync::OnceLock;
use std::time::Instant;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use holdnet::contagion::{propagate_shock, systemic_damage, ShockConfig, ShockSimulation};
use holdnet::io::write_edge_list;
use holdnet::metrics::{
    degree_ccdf, inverse_herfindahl, mean_indices, pairwise_similarities, PairMeanMode,
    PairwiseOptions, Side,
};
use holdnet::nullmodel::{rnd1, rnd2};
use holdnet::synth::{generate, SynthSpec, WeightMode};
use holdnet::{AssetIdx, EdgeRecord, FundIdx, HoldingNetwork, PortfolioView, Quarter};

fn quarter() -> Quarter {
    "2006Q2".parse().unwrap()
}

/// The clustered synthetic network at Table-S1 2006Q2 scale used by
/// criteria 5, 6, 7 and 8: 3128 funds, 10743 assets, mean degree 114
/// (~350k edges), 20 styles at concentration 0.8, uniform weights.
fn acceptance_spec() -> SynthSpec {
    SynthSpec {
        n_funds: 3128,
        n_assets: 10743,
        mean_degree: 114.0,
        gamma_funds: 2.5,
        gamma_assets: 3.0,
        styles: 20,
        style_concentration: 0.8,
        weight_mode: WeightMode::Uniform,
        total_value: 2.9449e12,
        seed: 1,
    }
}

fn acceptance_net() -> &'static HoldingNetwork {
    static NET: OnceLock<HoldingNetwork> = OnceLock::new();
    NET.get_or_init(|| generate(&acceptance_spec(), quarter()).unwrap())
}

fn shock_cfg(delta0: f64) -> ShockConfig {
    ShockConfig {
        delta0,
        steps: 10,
        impact_c: 1.0,
        quantile: 0.999,
    }
}

fn random_network(seed: u64) -> HoldingNetwork {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_funds = rng.random_range(20..=200);
    let n_assets = rng.random_range(30..=240);
    let mean_degree = rng.random_range(3.0..15.0);
    let p = mean_degree / n_assets as f64;
    let mut records = Vec::new();
    for f in 0..n_funds {
        let anchor = rng.random_range(0..n_assets);
        records.push(EdgeRecord::new(
            format!("F{f:04}"),
            format!("A{anchor:04}"),
            rng.random_range(1.0..100.0f64),
        ));
        for a in 0..n_assets {
            if rng.random::<f64>() < p {
                records.push(EdgeRecord::new(
                    format!("F{f:04}"),
                    format!("A{a:04}"),
                    rng.random_range(1.0..100.0f64),
                ));
            }
        }
    }
    HoldingNetwork::build(quarter(), records).unwrap()
}

/// Independent all-pairs oracle: double loop over funds with hash-set
/// intersections and a sorted map for the min-weight sum. Shares nothing
/// with the inverted-index engine.
fn naive_pairs(net: &HoldingNetwork) -> Vec<(u32, u32, f64, f64)> {
    let portfolios: Vec<BTreeMap<u32, f64>> = (0..net.n_funds())
        .map(|i| {
            net.portfolio_weights(FundIdx(i as u32))
                .map(|view| {
                    view.entries
                        .iter()
                        .map(|&(a, w)| (a.0, w))
                        .collect::<BTreeMap<u32, f64>>()
                })
                .unwrap_or_default()
        })
        .collect();
    let sets: Vec<HashSet<u32>> = portfolios
        .iter()
        .map(|p| p.keys().copied().collect())
        .collect();
    let mut rows = Vec::new();
    for i in 0..net.n_funds() {
        for j in (i + 1)..net.n_funds() {
            let inter = sets[i].intersection(&sets[j]).count();
            if inter == 0 {
                continue;
            }
            let union = sets[i].len() + sets[j].len() - inter;
            let jac = inter as f64 / union as f64;
            let min_sum: f64 = portfolios[i]
                .iter()
                .filter_map(|(a, &wi)| portfolios[j].get(a).map(|&wj| wi.min(wj)))
                .sum();
            rows.push((i as u32, j as u32, jac, jac * min_sum));
        }
    }
    rows
}

#[test]
fn c1_pairwise_engine_matches_naive_oracle() {
    let start = Instant::now();
    let mut pairs_checked = 0usize;
    for seed in 0..50u64 {
        let net = random_network(seed);
        let fast = pairwise_similarities(&net, PairwiseOptions::default()).unwrap();
        let slow = naive_pairs(&net);
        assert_eq!(fast.len(), slow.len(), "seed {seed}: pair sets differ");
        for (a, b) in fast.iter().zip(&slow) {
            assert_eq!((a.i.0, a.j.0), (b.0, b.1), "seed {seed}: pair order");
            assert!(
                (a.jaccard - b.2).abs() <= 1e-12,
                "seed {seed}: jaccard {} vs {}",
                a.jaccard,
                b.2
            );
            assert!(
                (a.similarity - b.3).abs() <= 1e-12,
                "seed {seed}: similarity {} vs {}",
                a.similarity,
                b.3
            );
        }
        pairs_checked += fast.len();
    }
    let elapsed = start.elapsed();
    let pass = elapsed.as_secs_f64() < 10.0;
    println!(
        "acceptance C1 pairwise-oracle-equivalence: 50 networks, {pairs_checked} pairs, {:.2}s — {}",
        elapsed.as_secs_f64(),
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "oracle equivalence took {elapsed:?}, budget 10s");
}

#[test]
fn c2_closed_form_index_identities() {
    // h = k on uniform portfolios of every size up to 64.
    for k in 1..=64usize {
        let view = PortfolioView {
            fund: FundIdx(0),
            entries: (0..k)
                .map(|a| (AssetIdx(a as u32), 1.0 / k as f64))
                .collect(),
        };
        let h = inverse_herfindahl(&view).unwrap();
        assert!(
            (h - k as f64).abs() <= 1e-9 * k as f64,
            "uniform k={k} gave h={h}"
        );
    }
    // h = 1 on single-asset portfolios.
    let single = PortfolioView {
        fund: FundIdx(0),
        entries: vec![(AssetIdx(3), 1.0)],
    };
    assert_eq!(inverse_herfindahl(&single).unwrap(), 1.0);

    // s <= J <= 1 on 1e5 random pairs; s = J = 1 for identical portfolios.
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let random_view = |rng: &mut ChaCha8Rng| {
        let k = rng.random_range(1..=40usize);
        let mut assets: Vec<u32> = (0..60u32).collect();
        assets.shuffle(rng);
        let mut chosen: Vec<u32> = assets[..k].to_vec();
        chosen.sort_unstable();
        let raw: Vec<f64> = (0..k).map(|_| rng.random_range(0.05..1.0f64)).collect();
        let total: f64 = raw.iter().sum();
        PortfolioView {
            fund: FundIdx(0),
            entries: chosen
                .into_iter()
                .zip(raw)
                .map(|(a, w)| (AssetIdx(a), w / total))
                .collect(),
        }
    };
    for case in 0..100_000 {
        let p = random_view(&mut rng);
        let q = random_view(&mut rng);
        let pa: Vec<AssetIdx> = p.assets().collect();
        let qa: Vec<AssetIdx> = q.assets().collect();
        let j = holdnet::metrics::jaccard(&pa, &qa).unwrap();
        let s = holdnet::metrics::similarity(&p, &q).unwrap();
        assert!(
            0.0 <= s && s <= j + 1e-12 && j <= 1.0,
            "case {case}: s={s}, j={j}"
        );
    }
    let identical = random_view(&mut rng);
    let j_same = {
        let a: Vec<AssetIdx> = identical.assets().collect();
        holdnet::metrics::jaccard(&a, &a).unwrap()
    };
    let s_same = holdnet::metrics::similarity(&identical, &identical).unwrap();
    assert_eq!(j_same, 1.0);
    assert!((s_same - 1.0).abs() <= 1e-12);
    println!("acceptance C2 closed-form-checks: h=k, h=1, 100000 random pairs bounded — PASS");
}

#[test]
fn c3_null_model_conservation_and_reproducibility() {
    for seed in 0..5u64 {
        let net = random_network(100 + seed);

        let r2 = rnd2(&net, seed).unwrap();
        for i in 0..net.n_funds() {
            let idx = FundIdx(i as u32);
            assert_eq!(
                net.fund_degree(idx).unwrap(),
                r2.fund_degree(idx).unwrap(),
                "rnd2 changed a degree"
            );
            let mut before = net.fund_holdings(idx).unwrap().1.to_vec();
            let mut after = r2.fund_holdings(idx).unwrap().1.to_vec();
            before.sort_unstable_by(f64::total_cmp);
            after.sort_unstable_by(f64::total_cmp);
            assert_eq!(before, after, "rnd2 changed a weight multiset");
            let h0 = inverse_herfindahl(&net.portfolio_weights(idx).unwrap()).unwrap();
            let h1 = inverse_herfindahl(&r2.portfolio_weights(idx).unwrap()).unwrap();
            assert!(
                (h0 - h1).abs() <= 1e-12 * h0.max(1.0),
                "rnd2 drifted h: {h0} vs {h1}"
            );
        }

        let r1 = rnd1(&net, seed).unwrap();
        assert_eq!(r1.n_edges(), net.n_edges(), "rnd1 changed E");
        let multiset = |n: &HoldingNetwork| {
            let mut w: Vec<f64> = n.edge_triples().map(|(_, _, v)| v).collect();
            w.sort_unstable_by(f64::total_cmp);
            w
        };
        assert_eq!(multiset(&net), multiset(&r1), "rnd1 changed the weights");

        // Byte reproducibility of both models.
        for net2 in [
            [rnd1(&net, seed).unwrap(), rnd1(&net, seed).unwrap()],
            [rnd2(&net, seed).unwrap(), rnd2(&net, seed).unwrap()],
        ] {
            let export = |n: &HoldingNetwork| {
                let mut buf = Vec::new();
                write_edge_list(n, &mut buf).unwrap();
                buf
            };
            assert_eq!(export(&net2[0]), export(&net2[1]), "seeded run not byte-stable");
        }
    }
    println!("acceptance C3 null-model-conservation: rnd1 E+weights, rnd2 k/weights/h <=1e-12, byte-stable — PASS");
}

#[test]
fn c4_contagion_ground_truth_and_fuzz() {
    // Hand-executed single-fund example.
    let single = HoldingNetwork::build(quarter(), vec![EdgeRecord::new("F", "A", 100.0)]).unwrap();
    let trajectory = propagate_shock(&single, AssetIdx(0), shock_cfg(0.5)).unwrap();
    assert_eq!(trajectory.damage[0], 0.75);
    assert_eq!(trajectory.damage[1], 0.9375);

    // Zero shock leaves the holdings bitwise unchanged.
    let net = random_network(200);
    let mut sim = ShockSimulation::new(&net, AssetIdx(0), shock_cfg(0.0)).unwrap();
    for _ in 0..10 {
        let (d, _) = sim.step();
        assert_eq!(d, 0.0);
    }
    let (_, original) = net.fund_holdings(FundIdx(0)).unwrap();
    assert_eq!(&sim.holdings()[..original.len()], original);

    // 100 fuzzed scenarios: total value never grows, holdings never go
    // negative.
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for case in 0..100u64 {
        let net = random_network(300 + case);
        let cfg = ShockConfig {
            delta0: rng.random_range(0.0..=1.0),
            steps: rng.random_range(1..=10),
            impact_c: rng.random_range(0.1..4.0),
            quantile: 0.999,
        };
        let asset = AssetIdx(rng.random_range(0..net.n_assets()) as u32);
        let mut sim = ShockSimulation::new(&net, asset, cfg).unwrap();
        let mut last = 0.0f64;
        for _ in 0..cfg.steps {
            let (d, _) = sim.step();
            assert!(d >= last - 1e-12, "case {case}: damage decreased");
            assert!(d <= 1.0 + 1e-12, "case {case}: damage above 1");
            last = d;
            assert!(
                sim.holdings().iter().all(|&w| w >= 0.0),
                "case {case}: negative holding"
            );
        }
    }
    println!("acceptance C4 contagion-ground-truth: worked example exact, zero-shock bitwise, 100 fuzz cases — PASS");
}

#[test]
fn c5_fragility_ordering_at_scale() {
    let start = Instant::now();
    let net = acceptance_net();
    let cfg = shock_cfg(0.5);
    let d_orig = systemic_damage(net, cfg).unwrap().mean.damage[9];
    let mut ordered = 0;
    for seed in 0..20u64 {
        let d2 = systemic_damage(&rnd2(net, seed).unwrap(), cfg).unwrap().mean.damage[9];
        let d1 = systemic_damage(&rnd1(net, seed).unwrap(), cfg).unwrap().mean.damage[9];
        if d_orig >= d2 && d2 >= d1 {
            ordered += 1;
        }
    }
    let elapsed = start.elapsed();
    let pass = ordered >= 18 && elapsed.as_secs_f64() < 600.0;
    println!(
        "acceptance C5 fragility-ordering: D(10) original={d_orig:.4}, ordered {ordered}/20 seeds, {:.1}s — {}",
        elapsed.as_secs_f64(),
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(ordered >= 18, "ordering held in only {ordered}/20 seeds");
    assert!(
        elapsed.as_secs_f64() < 600.0,
        "ensemble took {elapsed:?}, budget 10 minutes"
    );
}

#[test]
fn c6_similarity_ordering_with_separated_intervals() {
    let net = acceptance_net();
    let s_orig = mean_indices(net, PairMeanMode::IncludeDisjoint).unwrap().sbar;
    let mut s1 = Vec::new();
    let mut s2 = Vec::new();
    for seed in 0..20u64 {
        s1.push(
            mean_indices(&rnd1(net, seed).unwrap(), PairMeanMode::IncludeDisjoint)
                .unwrap()
                .sbar,
        );
        s2.push(
            mean_indices(&rnd2(net, seed).unwrap(), PairMeanMode::IncludeDisjoint)
                .unwrap()
                .sbar,
        );
    }
    let ci = |xs: &[f64]| {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
        let half = 1.96 * (var / n).sqrt();
        (mean - half, mean + half)
    };
    let (lo2, hi2) = ci(&s2);
    let (_lo1, hi1) = ci(&s1);
    let pass = s_orig > hi2 && lo2 > hi1;
    println!(
        "acceptance C6 similarity-ordering: sbar original={s_orig:.3e} > rnd2 CI ({lo2:.3e}, {hi2:.3e}) > rnd1 CI high {hi1:.3e} — {}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(s_orig > hi2, "original {s_orig} not above rnd2 interval {hi2}");
    assert!(lo2 > hi1, "rnd2 interval ({lo2}) overlaps rnd1 ({hi1})");
}

#[test]
fn c7_monotonicity_in_shock_and_concentration() {
    // D(10) non-decreasing over the delta0 grid on the acceptance network.
    let net = acceptance_net();
    let mut last = -1.0f64;
    let mut damages = Vec::new();
    for step in 1..=9 {
        let delta0 = step as f64 * 0.1;
        let d = systemic_damage(net, shock_cfg(delta0)).unwrap().mean.damage[9];
        assert!(
            d >= last - 1e-12,
            "D(10) fell from {last} to {d} at delta0={delta0}"
        );
        damages.push(d);
        last = d;
    }

    // Ensemble-mean sbar non-decreasing over the kappa grid (20 seeds per
    // point at desk scale).
    let base = SynthSpec {
        n_funds: 800,
        n_assets: 2700,
        mean_degree: 30.0,
        gamma_funds: 2.5,
        gamma_assets: 3.0,
        styles: 10,
        style_concentration: 0.0,
        weight_mode: WeightMode::Uniform,
        total_value: 1e12,
        seed: 0,
    };
    let mut sbars = Vec::new();
    for kappa in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let mut total = 0.0;
        for seed in 0..20 {
            let spec = SynthSpec {
                style_concentration: kappa,
                seed,
                ..base.clone()
            };
            let net = generate(&spec, quarter()).unwrap();
            total += mean_indices(&net, PairMeanMode::IncludeDisjoint).unwrap().sbar;
        }
        sbars.push(total / 20.0);
    }
    for w in sbars.windows(2) {
        assert!(
            w[1] >= w[0],
            "ensemble sbar fell from {} to {} along the kappa grid {sbars:?}",
            w[0],
            w[1]
        );
    }
    println!(
        "acceptance C7 monotonicity: D(10) {:.4}..{:.4} over delta0, sbar {:.2e}..{:.2e} over kappa — PASS",
        damages[0],
        damages[8],
        sbars[0],
        sbars[4]
    );
}

#[test]
fn c8_scale_budgets() {
    let records: Vec<EdgeRecord> = acceptance_net().edge_records().collect();

    let start = Instant::now();
    let net = HoldingNetwork::build(quarter(), records).unwrap();
    let stats = net.snapshot_stats();
    let _funds = degree_ccdf(&net, Side::Funds).unwrap();
    let _assets = degree_ccdf(&net, Side::Assets).unwrap();
    let build_elapsed = start.elapsed();

    // The generator was pointed at the 2006Q2 calibration row; the built
    // snapshot has to land within 10% of those targets.
    let within = |value: f64, target: f64| (value - target).abs() <= 0.1 * target;
    assert!(within(stats.n_funds as f64, 3128.0), "n_funds {}", stats.n_funds);
    assert!(within(stats.n_assets as f64, 10743.0), "n_assets {}", stats.n_assets);
    assert!(
        within(stats.mean_fund_degree, 114.0),
        "kbar {}",
        stats.mean_fund_degree
    );
    assert!(within(stats.density, 0.011), "rho {}", stats.density);
    assert!(
        within(stats.total_value, 2.9449e12),
        "s_tot {}",
        stats.total_value
    );

    let start = Instant::now();
    let pairs = pairwise_similarities(&net, PairwiseOptions::default()).unwrap();
    let pairwise_elapsed = start.elapsed();

    let pass = build_elapsed.as_secs_f64() < 5.0 && pairwise_elapsed.as_secs_f64() < 60.0;
    println!(
        "acceptance C8 scale: build+stats+ccdfs {:.2}s (n_funds={}, e={}), pairwise {:.2}s ({} pairs) — {}",
        build_elapsed.as_secs_f64(),
        stats.n_funds,
        stats.n_edges,
        pairwise_elapsed.as_secs_f64(),
        pairs.len(),
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(
        build_elapsed.as_secs_f64() < 5.0,
        "build path took {build_elapsed:?}, budget 5s"
    );
    assert!(
        pairwise_elapsed.as_secs_f64() < 60.0,
        "pairwise took {pairwise_elapsed:?}, budget 60s"
    );
}
