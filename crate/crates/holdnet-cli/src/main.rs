//! Command-line pipelines over holding networks: ingest quarterly
//! snapshots, describe and measure them, generate null models and synthetic
//! networks, and run shock-propagation experiments. Every command writes
//! plot-ready CSV/JSON plus a reproducibility manifest into `--out-dir`,
//! and identical inputs, flags and seeds produce byte-identical outputs.

mod manifest;

use std::fmt;
use std::fs::{self, File};
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use holdnet::contagion::{propagate_shock, systemic_damage, ShockConfig};
use holdnet::ingest::{build_quarter_snapshot, consolidate_classes, parse_holdings, ClassMap};
use holdnet::io::{read_edge_list, write_edge_list, SnapshotSummary};
use holdnet::metrics::{
    degree_ccdf, inverse_herfindahl, log_binned_pdf, mean_indices, pairwise_similarities,
    CcdfTable, PairMeanMode, PairSimilarity, PairwiseOptions, Side,
};
use holdnet::nullmodel::{randomize, NullModel, RandomizationSpec};
use holdnet::synth::{generate, SynthSpec, WeightMode};
use holdnet::{Error as NetError, FundIdx, HoldingNetwork, Quarter};
use manifest::RunManifest;

const EXIT_INTERNAL: u8 = 1;
const EXIT_INVALID: u8 = 2;

struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn invalid(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_INVALID,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<NetError> for CliError {
    fn from(err: NetError) -> Self {
        let code = match err {
            NetError::Io(_) => EXIT_INTERNAL,
            _ => EXIT_INVALID,
        };
        CliError {
            code,
            message: err.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError {
            code: EXIT_INTERNAL,
            message: err.to_string(),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Parser)]
#[command(name = "holdnet", version, about = "Bipartite fund-asset holding networks: metrics, null models, and fire-sale simulation")]
struct Cli {
    /// Cap for worker threads in parallel sections.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Directory for outputs and the run manifest.
    #[arg(long, global = true, default_value = "out")]
    out_dir: PathBuf,
    /// Seed for seeded operations (synth; ignored where a spec carries its own).
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a quarterly snapshot from holdings records.
    Ingest {
        /// Holdings CSV: fund_class_id,report_date,asset_id,market_value.
        #[arg(long)]
        holdings: PathBuf,
        /// Optional class map CSV: fund_class_id,fund_id.
        #[arg(long)]
        class_map: Option<PathBuf>,
        /// Target quarter, e.g. 2006Q2.
        #[arg(long)]
        quarter: String,
    },
    /// Print and write summary statistics of a snapshot.
    Stats {
        #[arg(long)]
        snapshot: PathBuf,
        #[arg(long)]
        quarter: Option<String>,
    },
    /// Diversification/overlap metrics, degree distributions and CCDFs.
    Metrics {
        #[arg(long)]
        snapshot: PathBuf,
        #[arg(long)]
        quarter: Option<String>,
        /// Also write the O(N^2) pairwise table and index CCDFs.
        #[arg(long)]
        pairs: bool,
        /// Average pair indices over overlapping pairs only.
        #[arg(long)]
        overlap_only: bool,
        /// Smallest intersection for a pair to be listed.
        #[arg(long, default_value_t = 1)]
        min_overlap: u32,
        /// Bin count for log-binned degree PDFs.
        #[arg(long, default_value_t = 20)]
        bins: usize,
    },
    /// Generate a null-model randomization of a snapshot.
    Randomize {
        #[arg(long)]
        snapshot: PathBuf,
        #[arg(long)]
        quarter: Option<String>,
        /// Model spec: rnd1:<seed> or rnd2:<seed>.
        #[arg(long)]
        model: String,
    },
    /// Check the conservation laws of a randomized snapshot.
    Verify {
        #[arg(long)]
        original: PathBuf,
        #[arg(long)]
        randomized: PathBuf,
        /// Which model the randomized snapshot claims to be: rnd1 or rnd2.
        #[arg(long)]
        model: String,
        #[arg(long)]
        quarter: Option<String>,
    },
    /// Simulate shock propagation and write damage trajectories.
    Shock {
        #[arg(long)]
        snapshot: PathBuf,
        #[arg(long)]
        quarter: Option<String>,
        #[command(flatten)]
        shock: ShockFlags,
        /// Shock one specific asset instead of the top-asset set.
        #[arg(long)]
        asset: Option<String>,
        /// Also write per-asset trajectories.
        #[arg(long)]
        per_asset: bool,
        /// Add the mark-to-market-only damage column.
        #[arg(long)]
        price_only: bool,
    },
    /// Shock ensembles on the original network and its null models.
    Compare {
        #[arg(long)]
        snapshot: PathBuf,
        #[arg(long)]
        quarter: Option<String>,
        /// Null models to include.
        #[arg(long, value_delimiter = ',', default_values_t = vec!["rnd1".to_owned(), "rnd2".to_owned()])]
        models: Vec<String>,
        /// Randomization seeds, comma separated.
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        seeds: Vec<u64>,
        #[command(flatten)]
        shock: ShockFlags,
    },
    /// Generate a synthetic holding network.
    Synth {
        /// JSON file with a generator spec; flags override its fields.
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long)]
        n_funds: Option<usize>,
        #[arg(long)]
        n_assets: Option<usize>,
        #[arg(long)]
        mean_degree: Option<f64>,
        #[arg(long)]
        gamma_funds: Option<f64>,
        #[arg(long)]
        gamma_assets: Option<f64>,
        #[arg(long)]
        styles: Option<usize>,
        /// Style concentration kappa in [0, 1].
        #[arg(long)]
        kappa: Option<f64>,
        /// Weight mode: uniform or powerlaw:<exponent>.
        #[arg(long)]
        weights: Option<String>,
        #[arg(long)]
        total_value: Option<f64>,
        /// Quarter label for the generated snapshot.
        #[arg(long, default_value = "2006Q2")]
        quarter: String,
    },
}

#[derive(Args, Clone, Copy)]
struct ShockFlags {
    /// Initial price shock in [0, 1].
    #[arg(long, default_value_t = 0.5)]
    delta0: f64,
    /// Propagation steps.
    #[arg(long, default_value_t = 10)]
    steps: usize,
    /// Market-impact coefficient c.
    #[arg(long, default_value_t = 1.0)]
    impact_c: f64,
    /// Top-asset quantile in (0, 1).
    #[arg(long, default_value_t = 0.999)]
    quantile: f64,
}

impl ShockFlags {
    fn config(&self) -> ShockConfig {
        ShockConfig {
            delta0: self.delta0,
            steps: self.steps,
            impact_c: self.impact_c,
            quantile: self.quantile,
        }
    }

    fn json(&self) -> serde_json::Value {
        serde_json::json!({
            "delta0": self.delta0,
            "steps": self.steps,
            "impact_c": self.impact_c,
            "quantile": self.quantile,
        })
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.code)
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    fs::create_dir_all(&cli.out_dir)?;
    let out_dir = cli.out_dir.clone();
    match cli.command {
        Command::Ingest {
            holdings,
            class_map,
            quarter,
        } => cmd_ingest(&out_dir, &holdings, class_map.as_deref(), &quarter),
        Command::Stats { snapshot, quarter } => cmd_stats(&out_dir, &snapshot, quarter.as_deref()),
        Command::Metrics {
            snapshot,
            quarter,
            pairs,
            overlap_only,
            min_overlap,
            bins,
        } => cmd_metrics(
            &out_dir,
            &snapshot,
            quarter.as_deref(),
            pairs,
            overlap_only,
            min_overlap,
            bins,
        ),
        Command::Randomize {
            snapshot,
            quarter,
            model,
        } => cmd_randomize(&out_dir, &snapshot, quarter.as_deref(), &model),
        Command::Verify {
            original,
            randomized,
            model,
            quarter,
        } => cmd_verify(&original, &randomized, &model, quarter.as_deref()),
        Command::Shock {
            snapshot,
            quarter,
            shock,
            asset,
            per_asset,
            price_only,
        } => cmd_shock(
            &out_dir,
            &snapshot,
            quarter.as_deref(),
            shock,
            asset.as_deref(),
            per_asset,
            price_only,
        ),
        Command::Compare {
            snapshot,
            quarter,
            models,
            seeds,
            shock,
        } => cmd_compare(&out_dir, &snapshot, quarter.as_deref(), &models, &seeds, shock),
        Command::Synth {
            spec,
            n_funds,
            n_assets,
            mean_degree,
            gamma_funds,
            gamma_assets,
            styles,
            kappa,
            weights,
            total_value,
            quarter,
        } => {
            let mut resolved = match spec {
                Some(path) => {
                    let file = File::open(&path)?;
                    serde_json::from_reader(BufReader::new(file))
                        .map_err(|e| CliError::invalid(format!("invalid synth spec: {e}")))?
                }
                None => SynthSpec::default(),
            };
            if let Some(v) = n_funds {
                resolved.n_funds = v;
            }
            if let Some(v) = n_assets {
                resolved.n_assets = v;
            }
            if let Some(v) = mean_degree {
                resolved.mean_degree = v;
            }
            if let Some(v) = gamma_funds {
                resolved.gamma_funds = v;
            }
            if let Some(v) = gamma_assets {
                resolved.gamma_assets = v;
            }
            if let Some(v) = styles {
                resolved.styles = v;
            }
            if let Some(v) = kappa {
                resolved.style_concentration = v;
            }
            if let Some(spec) = weights.as_deref() {
                resolved.weight_mode = parse_weight_mode(spec)?;
            }
            if let Some(v) = total_value {
                resolved.total_value = v;
            }
            if let Some(seed) = cli.seed {
                resolved.seed = seed;
            }
            cmd_synth(&out_dir, &resolved, &quarter)
        }
    }
}

// ---------------------------------------------------------------------------
// Snapshot loading and writing
// ---------------------------------------------------------------------------

fn parse_quarter(label: &str) -> CliResult<Quarter> {
    Quarter::from_str(label).map_err(CliError::from)
}

/// Load an edge-list snapshot; the quarter comes from the explicit flag or
/// from the JSON sidecar written next to every exported snapshot.
fn load_snapshot(path: &Path, quarter: Option<&str>) -> CliResult<HoldingNetwork> {
    let quarter = match quarter {
        Some(label) => parse_quarter(label)?,
        None => {
            let sidecar = path.with_extension("json");
            let data = fs::read_to_string(&sidecar).map_err(|_| {
                CliError::invalid(format!(
                    "no --quarter given and no sidecar {} found",
                    sidecar.display()
                ))
            })?;
            let summary: SnapshotSummary = serde_json::from_str(&data)
                .map_err(|e| CliError::invalid(format!("invalid sidecar: {e}")))?;
            parse_quarter(&summary.quarter)?
        }
    };
    let file = File::open(path).map_err(|e| {
        CliError::invalid(format!("cannot open snapshot {}: {e}", path.display()))
    })?;
    let records = read_edge_list(BufReader::new(file))?;
    Ok(HoldingNetwork::build(quarter, records)?)
}

/// Write `<stem>.csv` and `<stem>.json` and register both in the manifest.
fn write_snapshot(
    out_dir: &Path,
    stem: &str,
    net: &HoldingNetwork,
    manifest: &mut RunManifest,
) -> CliResult<PathBuf> {
    let csv_path = out_dir.join(format!("{stem}.csv"));
    write_edge_list(net, File::create(&csv_path)?)?;
    let json_path = out_dir.join(format!("{stem}.json"));
    let summary = SnapshotSummary::new(&net.quarter().to_string(), &net.snapshot_stats());
    write_json(&json_path, &summary)?;
    manifest.record_output(out_dir, &csv_path)?;
    manifest.record_output(out_dir, &json_path)?;
    Ok(csv_path)
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut body = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::invalid(format!("serialization failed: {e}")))?;
    body.push('\n');
    fs::write(path, body)?;
    Ok(())
}

fn write_table(path: &Path, header: &[&str], rows: &[Vec<String>]) -> CliResult<()> {
    let mut out = csv::Writer::from_writer(File::create(path)?);
    out.write_record(header)
        .map_err(|e| CliError::invalid(e.to_string()))?;
    for row in rows {
        out.write_record(row)
            .map_err(|e| CliError::invalid(e.to_string()))?;
    }
    out.flush()?;
    Ok(())
}

fn write_ccdf(path: &Path, table: &CcdfTable) -> CliResult<()> {
    let rows: Vec<Vec<String>> = table
        .points
        .iter()
        .map(|&(v, p)| vec![v.to_string(), p.to_string()])
        .collect();
    write_table(path, &["value", "probability"], &rows)
}

fn parse_weight_mode(spec: &str) -> CliResult<WeightMode> {
    if spec == "uniform" {
        return Ok(WeightMode::Uniform);
    }
    if let Some(exp) = spec.strip_prefix("powerlaw:") {
        let exponent: f64 = exp
            .parse()
            .map_err(|_| CliError::invalid(format!("invalid weight exponent {exp:?}")))?;
        return Ok(WeightMode::PowerLaw { exponent });
    }
    Err(CliError::invalid(format!(
        "invalid weight mode {spec:?}, expected uniform or powerlaw:<exponent>"
    )))
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

fn cmd_ingest(
    out_dir: &Path,
    holdings: &Path,
    class_map: Option<&Path>,
    quarter: &str,
) -> CliResult<()> {
    let quarter = parse_quarter(quarter)?;
    let file = File::open(holdings).map_err(|e| {
        CliError::invalid(format!("cannot open holdings {}: {e}", holdings.display()))
    })?;
    let records = parse_holdings(BufReader::new(file))?;
    let map = match class_map {
        Some(path) => {
            let file = File::open(path).map_err(|e| {
                CliError::invalid(format!("cannot open class map {}: {e}", path.display()))
            })?;
            ClassMap::parse(BufReader::new(file))?
        }
        None => ClassMap::identity(),
    };
    let records = consolidate_classes(records, &map);
    let net = build_quarter_snapshot(&records, quarter)?;

    let mut inputs: Vec<&Path> = vec![holdings];
    if let Some(path) = class_map {
        inputs.push(path);
    }
    let mut manifest = RunManifest::new(
        "ingest",
        &inputs,
        serde_json::json!({ "quarter": quarter.to_string() }),
    );
    write_snapshot(out_dir, "snapshot", &net, &mut manifest)?;
    manifest.write(out_dir)?;
    println!(
        "{} funds, {} assets, {} edges ingested for {quarter}",
        net.n_funds(),
        net.n_assets(),
        net.n_edges()
    );
    Ok(())
}

fn cmd_stats(out_dir: &Path, snapshot: &Path, quarter: Option<&str>) -> CliResult<()> {
    let net = load_snapshot(snapshot, quarter)?;
    let summary = SnapshotSummary::new(&net.quarter().to_string(), &net.snapshot_stats());
    let mut manifest = RunManifest::new("stats", &[snapshot], serde_json::json!({}));
    let path = out_dir.join("stats.json");
    write_json(&path, &summary)?;
    manifest.record_output(out_dir, &path)?;
    manifest.write(out_dir)?;
    println!("{}", serde_json::to_string(&summary).expect("stats serialize"));
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_metrics(
    out_dir: &Path,
    snapshot: &Path,
    quarter: Option<&str>,
    pairs: bool,
    overlap_only: bool,
    min_overlap: u32,
    bins: usize,
) -> CliResult<()> {
    let net = load_snapshot(snapshot, quarter)?;
    let mode = if overlap_only {
        PairMeanMode::OverlappingOnly
    } else {
        PairMeanMode::IncludeDisjoint
    };
    let means = mean_indices(&net, mode)?;

    let mut manifest = RunManifest::new(
        "metrics",
        &[snapshot],
        serde_json::json!({
            "pairs": pairs,
            "overlap_only": overlap_only,
            "min_overlap": min_overlap,
            "bins": bins,
        }),
    );

    let means_path = out_dir.join("means.json");
    write_json(&means_path, &means)?;
    manifest.record_output(out_dir, &means_path)?;

    for (side, stem) in [(Side::Funds, "fund_degree"), (Side::Assets, "asset_degree")] {
        let ccdf_path = out_dir.join(format!("{stem}_ccdf.csv"));
        write_ccdf(&ccdf_path, &degree_ccdf(&net, side)?)?;
        manifest.record_output(out_dir, &ccdf_path)?;

        let degrees: Vec<f64> = match side {
            Side::Funds => (0..net.n_funds())
                .map(|i| net.fund_degree(FundIdx(i as u32)).unwrap() as f64)
                .filter(|&d| d > 0.0)
                .collect(),
            Side::Assets => (0..net.n_assets())
                .map(|a| net.asset_degree(holdnet::AssetIdx(a as u32)).unwrap() as f64)
                .filter(|&d| d > 0.0)
                .collect(),
        };
        let pdf_path = out_dir.join(format!("{stem}_pdf.csv"));
        write_ccdf(&pdf_path, &log_binned_pdf(&degrees, bins)?)?;
        manifest.record_output(out_dir, &pdf_path)?;
    }

    let h_values: Vec<f64> = (0..net.n_funds())
        .filter_map(|i| {
            let idx = FundIdx(i as u32);
            net.portfolio_weights(idx)
                .ok()
                .map(|view| inverse_herfindahl(&view).expect("nonempty view"))
        })
        .collect();
    let h_path = out_dir.join("herfindahl_ccdf.csv");
    write_ccdf(&h_path, &holdnet::metrics::index_ccdf(&h_values)?)?;
    manifest.record_output(out_dir, &h_path)?;

    if pairs {
        let records = pairwise_similarities(&net, PairwiseOptions { min_overlap })?;
        let pairs_path = out_dir.join("pairwise.csv");
        write_pairs(&pairs_path, &net, &records)?;
        manifest.record_output(out_dir, &pairs_path)?;

        let total_pairs = net.n_funds() * (net.n_funds() - 1) / 2;
        for (stem, values) in [
            ("jaccard", records.iter().map(|p| p.jaccard).collect::<Vec<_>>()),
            ("similarity", records.iter().map(|p| p.similarity).collect::<Vec<_>>()),
        ] {
            let path = out_dir.join(format!("{stem}_ccdf.csv"));
            write_ccdf(&path, &pair_ccdf_with_zeros(&values, total_pairs)?)?;
            manifest.record_output(out_dir, &path)?;
        }
    }
    manifest.write(out_dir)?;
    println!("{}", serde_json::to_string(&means).expect("means serialize"));
    Ok(())
}

/// CCDF of pair index values over *all* pairs: the listed values plus the
/// implicit zeros of the never-emitted disjoint pairs.
fn pair_ccdf_with_zeros(values: &[f64], total_pairs: usize) -> CliResult<CcdfTable> {
    if values.is_empty() {
        return Ok(CcdfTable {
            points: vec![(0.0, 1.0)],
        });
    }
    let mut table = holdnet::metrics::index_ccdf(values)?;
    let scale = values.len() as f64 / total_pairs as f64;
    for point in &mut table.points {
        point.1 *= scale;
    }
    if values.len() < total_pairs && table.points.first().map(|p| p.0) != Some(0.0) {
        table.points.insert(0, (0.0, 1.0));
    }
    Ok(table)
}

fn write_pairs(path: &Path, net: &HoldingNetwork, records: &[PairSimilarity]) -> CliResult<()> {
    let mut out = csv::Writer::from_writer(File::create(path)?);
    out.write_record(["fund_i", "fund_j", "jaccard", "similarity"])
        .map_err(|e| CliError::invalid(e.to_string()))?;
    for rec in records {
        out.write_record([
            net.fund_id(rec.i)?,
            net.fund_id(rec.j)?,
            &rec.jaccard.to_string(),
            &rec.similarity.to_string(),
        ])
        .map_err(|e| CliError::invalid(e.to_string()))?;
    }
    out.flush()?;
    Ok(())
}

fn cmd_randomize(
    out_dir: &Path,
    snapshot: &Path,
    quarter: Option<&str>,
    model: &str,
) -> CliResult<()> {
    let spec = RandomizationSpec::from_str(model)?;
    let net = load_snapshot(snapshot, quarter)?;
    let randomized = randomize(&net, spec)?;
    let mut manifest = RunManifest::new(
        "randomize",
        &[snapshot],
        serde_json::json!({ "model": spec.to_string() }),
    );
    write_snapshot(out_dir, "randomized", &randomized, &mut manifest)?;
    manifest.write(out_dir)?;
    println!("wrote {} randomization of {}", spec, snapshot.display());
    Ok(())
}

fn cmd_verify(
    original: &Path,
    randomized: &Path,
    model: &str,
    quarter: Option<&str>,
) -> CliResult<()> {
    let model = match model {
        "rnd1" => NullModel::Rnd1,
        "rnd2" => NullModel::Rnd2,
        other => {
            return Err(CliError::invalid(format!(
                "invalid model {other:?}, expected rnd1 or rnd2"
            )))
        }
    };
    let a = load_snapshot(original, quarter)?;
    let b = load_snapshot(randomized, quarter.or(Some(&a.quarter().to_string())))?;
    let fail = |msg: String| Err(CliError::invalid(format!("verification failed: {msg}")));

    if a.n_edges() != b.n_edges() {
        return fail(format!("edge count {} vs {}", a.n_edges(), b.n_edges()));
    }
    let weights = |net: &HoldingNetwork| {
        let mut w: Vec<f64> = net.edge_triples().map(|(_, _, v)| v).collect();
        w.sort_unstable_by(f64::total_cmp);
        w
    };
    if weights(&a) != weights(&b) {
        return fail("global weight multiset changed".into());
    }
    if model == NullModel::Rnd2 {
        for i in 0..a.n_funds() {
            let idx = FundIdx(i as u32);
            let id = a.fund_id(idx)?;
            let j = b.fund_index(id)?;
            if a.fund_degree(idx)? != b.fund_degree(j)? {
                return fail(format!("degree of fund {id} changed"));
            }
            let mut wa = a.fund_holdings(idx)?.1.to_vec();
            let mut wb = b.fund_holdings(j)?.1.to_vec();
            wa.sort_unstable_by(f64::total_cmp);
            wb.sort_unstable_by(f64::total_cmp);
            if wa != wb {
                return fail(format!("weight multiset of fund {id} changed"));
            }
            let ha = inverse_herfindahl(&a.portfolio_weights(idx)?)?;
            let hb = inverse_herfindahl(&b.portfolio_weights(j)?)?;
            if (ha - hb).abs() > 1e-12 * ha.abs().max(1.0) {
                return fail(format!("herfindahl of fund {id} drifted: {ha} vs {hb}"));
            }
        }
    }
    println!("ok: {randomized:?} is a valid {model} randomization");
    Ok(())
}

fn cmd_shock(
    out_dir: &Path,
    snapshot: &Path,
    quarter: Option<&str>,
    shock: ShockFlags,
    asset: Option<&str>,
    per_asset: bool,
    price_only: bool,
) -> CliResult<()> {
    let net = load_snapshot(snapshot, quarter)?;
    let cfg = shock.config();
    let mut manifest = RunManifest::new("shock", &[snapshot], shock.json());

    let trajectory_rows = |damage: &[f64], price: &[f64]| -> Vec<Vec<String>> {
        (0..damage.len())
            .map(|t| {
                let mut row = vec![(t + 1).to_string(), damage[t].to_string()];
                if price_only {
                    row.push(price[t].to_string());
                }
                row
            })
            .collect()
    };
    let header: Vec<&str> = if price_only {
        vec!["t", "damage", "price_damage"]
    } else {
        vec!["t", "damage"]
    };

    match asset {
        Some(id) => {
            let idx = net.asset_index(id)?;
            let trajectory = propagate_shock(&net, idx, cfg)?;
            let path = out_dir.join("trajectory.csv");
            write_table(
                &path,
                &header,
                &trajectory_rows(&trajectory.damage, &trajectory.price_damage),
            )?;
            manifest.record_output(out_dir, &path)?;
        }
        None => {
            let result = systemic_damage(&net, cfg)?;
            let path = out_dir.join("trajectory.csv");
            write_table(
                &path,
                &header,
                &trajectory_rows(&result.mean.damage, &result.mean.price_damage),
            )?;
            manifest.record_output(out_dir, &path)?;
            if per_asset {
                let mut rows = Vec::new();
                for (asset, trajectory) in result.assets.iter().zip(&result.per_asset) {
                    let id = net.asset_id(*asset)?;
                    for t in 0..trajectory.damage.len() {
                        let mut row = vec![
                            id.to_owned(),
                            (t + 1).to_string(),
                            trajectory.damage[t].to_string(),
                        ];
                        if price_only {
                            row.push(trajectory.price_damage[t].to_string());
                        }
                        rows.push(row);
                    }
                }
                let mut pa_header = vec!["asset_id"];
                pa_header.extend(&header);
                let path = out_dir.join("per_asset.csv");
                write_table(&path, &pa_header, &rows)?;
                manifest.record_output(out_dir, &path)?;
            }
        }
    }
    manifest.write(out_dir)?;
    Ok(())
}

fn cmd_compare(
    out_dir: &Path,
    snapshot: &Path,
    quarter: Option<&str>,
    models: &[String],
    seeds: &[u64],
    shock: ShockFlags,
) -> CliResult<()> {
    if seeds.is_empty() {
        return Err(CliError::invalid("no seeds requested; pass --seeds"));
    }
    let mut parsed_models = Vec::new();
    for name in models {
        parsed_models.push(match name.as_str() {
            "rnd1" => NullModel::Rnd1,
            "rnd2" => NullModel::Rnd2,
            other => {
                return Err(CliError::invalid(format!(
                    "invalid model {other:?}, expected rnd1 or rnd2"
                )))
            }
        });
    }
    let net = load_snapshot(snapshot, quarter)?;
    let cfg = shock.config();

    let mut rows: Vec<Vec<String>> = Vec::new();
    let original = systemic_damage(&net, cfg)?;
    for t in 0..cfg.steps {
        rows.push(vec![
            "original".into(),
            String::new(),
            (t + 1).to_string(),
            original.mean.damage[t].to_string(),
        ]);
    }
    for &model in &parsed_models {
        for &seed in seeds {
            let randomized = randomize(&net, RandomizationSpec { model, seed })?;
            let result = systemic_damage(&randomized, cfg)?;
            for t in 0..cfg.steps {
                rows.push(vec![
                    model.to_string(),
                    seed.to_string(),
                    (t + 1).to_string(),
                    result.mean.damage[t].to_string(),
                ]);
            }
        }
    }

    let mut manifest = RunManifest::new(
        "compare",
        &[snapshot],
        serde_json::json!({
            "models": models,
            "seeds": seeds,
            "shock": shock.json(),
        }),
    );
    let path = out_dir.join("compare.csv");
    write_table(&path, &["variant", "seed", "t", "damage"], &rows)?;
    manifest.record_output(out_dir, &path)?;
    manifest.write(out_dir)?;
    Ok(())
}

fn cmd_synth(out_dir: &Path, spec: &SynthSpec, quarter: &str) -> CliResult<()> {
    let quarter = parse_quarter(quarter)?;
    let net = generate(spec, quarter)?;
    let mut manifest = RunManifest::new(
        "synth",
        &[],
        serde_json::to_value(spec).expect("spec serializes"),
    );
    write_snapshot(out_dir, "synthetic", &net, &mut manifest)?;
    manifest.write(out_dir)?;
    let summary = SnapshotSummary::new(&net.quarter().to_string(), &net.snapshot_stats());
    println!("{}", serde_json::to_string(&summary).expect("summary serialize"));
    Ok(())
}
