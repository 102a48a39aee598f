//! Replicated runs, parameter sweeps and their aggregate statistics.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::alpha::Alpha;
use crate::error::{Error, Result};
use crate::growth::Grower;
use crate::io::{fmt_sig, round_sig};
use crate::model::{Family, ModelParams};
use crate::observables::{self, scaling_exponent, RunSummary};
use crate::rng::{replica_seed, GrowthRng};
use crate::tree::{GrowingTree, NodeId};

pub const DEFAULT_REPLICAS: usize = 50;

fn default_replicas() -> usize {
    DEFAULT_REPLICAS
}

fn default_eta_dmin() -> u32 {
    observables::DEFAULT_ETA_DMIN
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeFormat {
    #[default]
    Csv,
    Binary,
}

/// Configuration of a replicated growth run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub family: Family,
    pub alpha: Alpha,
    #[serde(default)]
    pub r: f64,
    pub n_target: usize,
    #[serde(default = "default_replicas")]
    pub replicas: usize,
    #[serde(default)]
    pub seed: u64,
    /// Sizes at which observables are recorded; defaults to `[n_target]`.
    #[serde(default)]
    pub snapshots: Option<Vec<usize>>,
    #[serde(default = "default_eta_dmin")]
    pub eta_dmin: u32,
    #[serde(default)]
    pub summary_out: Option<String>,
    /// Parent-array output; `{replica}` in the path is replaced by the replica index.
    #[serde(default)]
    pub edges_out: Option<String>,
    #[serde(default)]
    pub edges_format: EdgeFormat,
    /// Histogram output; `{replica}` in the path is replaced by the replica index.
    #[serde(default)]
    pub histogram_out: Option<String>,
}

impl RunConfig {
    pub fn new(params: ModelParams, n_target: usize) -> Self {
        RunConfig {
            family: params.family,
            alpha: params.alpha,
            r: params.r,
            n_target,
            replicas: DEFAULT_REPLICAS,
            seed: 0,
            snapshots: None,
            eta_dmin: observables::DEFAULT_ETA_DMIN,
            summary_out: None,
            edges_out: None,
            edges_format: EdgeFormat::Csv,
            histogram_out: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn params(&self) -> ModelParams {
        ModelParams {
            family: self.family,
            alpha: self.alpha,
            r: self.r,
        }
    }

    pub fn snapshot_sizes(&self) -> Vec<usize> {
        self.snapshots.clone().unwrap_or_else(|| vec![self.n_target])
    }

    pub fn validate(&self) -> Result<()> {
        self.params().validate()?;
        validate_shared(self.n_target, self.replicas, self.snapshots.as_deref())
    }
}

fn validate_shared(n_target: usize, replicas: usize, snapshots: Option<&[usize]>) -> Result<()> {
    if replicas < 1 {
        return Err(Error::Config("replicas must be at least 1".into()));
    }
    if n_target < 2 {
        return Err(Error::Config("n_target must be at least 2".into()));
    }
    if u32::try_from(n_target).is_err() {
        return Err(Error::Config(format!("n_target {n_target} exceeds the u32 node range")));
    }
    if let Some(s) = snapshots {
        if s.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("snapshot sizes must be strictly ascending".into()));
        }
        if let Some(bad) = s.iter().find(|&&x| x < 2 || x > n_target) {
            return Err(Error::Config(format!("snapshot size {bad} is outside [2, {n_target}]")));
        }
    }
    Ok(())
}

/// One point of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepPoint {
    pub family: Family,
    pub alpha: Alpha,
    #[serde(default)]
    pub r: f64,
}

impl From<SweepPoint> for ModelParams {
    fn from(p: SweepPoint) -> Self {
        ModelParams {
            family: p.family,
            alpha: p.alpha,
            r: p.r,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub points: Vec<SweepPoint>,
    pub n_target: usize,
    #[serde(default = "default_replicas")]
    pub replicas: usize,
    #[serde(default)]
    pub seed: u64,
    /// Defaults to the geometric grid of [`geometric_snapshots`].
    #[serde(default)]
    pub snapshots: Option<Vec<usize>>,
    #[serde(default = "default_eta_dmin")]
    pub eta_dmin: u32,
    #[serde(default)]
    pub out: Option<String>,
}

impl SweepConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: SweepConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn snapshot_sizes(&self) -> Vec<usize> {
        self.snapshots
            .clone()
            .unwrap_or_else(|| geometric_snapshots(self.n_target))
    }

    pub fn validate(&self) -> Result<()> {
        if self.points.is_empty() {
            return Err(Error::Config("sweep has no points".into()));
        }
        for p in &self.points {
            ModelParams::from(*p).validate()?;
        }
        validate_shared(self.n_target, self.replicas, self.snapshots.as_deref())
    }
}

/// `round(10^(2 + k/2))` below `n_target`, then `n_target` itself.
pub fn geometric_snapshots(n_target: usize) -> Vec<usize> {
    let mut out: Vec<usize> = (0..)
        .map(|k| 10f64.powf(2.0 + 0.5 * f64::from(k)).round() as usize)
        .take_while(|&s| s < n_target)
        .collect();
    out.push(n_target);
    out
}

/// Run `replicas` independent growths and map each finished run through `f`.
///
/// Replica `k` uses the seed `replica_seed(master_seed, k)`. Results come back
/// in replica order regardless of the number of worker threads.
#[allow(clippy::too_many_arguments)]
pub fn run_replicas<T, F>(
    params: ModelParams,
    n_target: usize,
    snapshots: &[usize],
    replicas: usize,
    master_seed: u64,
    eta_dmin: u32,
    workers: Option<usize>,
    f: F,
) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize, &GrowingTree, Vec<RunSummary>) -> T + Sync,
{
    params.validate()?;
    validate_shared(n_target, replicas, Some(snapshots))?;
    let job = |k: usize| -> Result<T> {
        let tree = GrowingTree::with_capacity(n_target);
        let rng = GrowthRng::for_replica(master_seed, k as u64);
        let mut grower = Grower::new(tree, params, rng)?.with_eta_dmin(eta_dmin);
        let summaries = grower.grow_to(n_target, snapshots)?;
        Ok(f(k, grower.tree(), summaries))
    };
    let run = || (0..replicas).into_par_iter().map(job).collect::<Result<Vec<T>>>();
    match workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?
            .install(run),
        None => run(),
    }
}

/// Mean and sample standard deviation (0 for a single value).
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

pub const METRICS: [&str; 6] = ["leaf_fraction", "d1", "d2", "diameter", "eta_cv", "lead_changes"];

fn metric(s: &RunSummary, name: &str) -> Option<f64> {
    match name {
        "leaf_fraction" => Some(s.leaf_fraction),
        "d1" => Some(f64::from(s.d1)),
        "d2" => Some(f64::from(s.d2)),
        "diameter" => Some(f64::from(s.diameter)),
        "eta_cv" => s.eta_cv,
        "lead_changes" => Some(s.lead_changes as f64),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricStat {
    pub mean: f64,
    pub stddev: f64,
    pub count: usize,
}

/// Statistics of every metric across replicas at one snapshot size.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SnapshotAggregate {
    pub n: usize,
    pub metrics: Vec<(&'static str, MetricStat)>,
}

impl SnapshotAggregate {
    pub fn get(&self, name: &str) -> Option<&MetricStat> {
        self.metrics.iter().find(|(m, _)| *m == name).map(|(_, s)| s)
    }
}

/// Aggregate per-replica summaries, where `runs[k][j]` is snapshot `j` of replica `k`.
pub fn aggregate(runs: &[Vec<RunSummary>]) -> Vec<SnapshotAggregate> {
    let Some(first) = runs.first() else {
        return Vec::new();
    };
    (0..first.len())
        .map(|j| {
            let metrics = METRICS
                .iter()
                .filter_map(|&name| {
                    let vals: Vec<f64> = runs.iter().filter_map(|r| metric(&r[j], name)).collect();
                    if vals.is_empty() {
                        return None;
                    }
                    let (mean, stddev) = mean_std(&vals);
                    Some((
                        name,
                        MetricStat {
                            mean,
                            stddev,
                            count: vals.len(),
                        },
                    ))
                })
                .collect();
            SnapshotAggregate {
                n: first[j].n,
                metrics,
            }
        })
        .collect()
}

/// One line of the summary JSON-lines output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRecord {
    pub replica: usize,
    pub n: usize,
    pub leaf_fraction: f64,
    pub d1: u32,
    pub d2: u32,
    pub argmax_id: NodeId,
    pub diameter: u32,
    pub lead_changes: u64,
    pub eta_cv: Option<f64>,
    pub model: Family,
    pub alpha: Alpha,
    pub r: f64,
    pub seed: u64,
}

impl SummaryRecord {
    pub fn new(replica: usize, seed: u64, params: &ModelParams, s: &RunSummary) -> Self {
        SummaryRecord {
            replica,
            n: s.n,
            leaf_fraction: round_sig(s.leaf_fraction),
            d1: s.d1,
            d2: s.d2,
            argmax_id: s.argmax_id,
            diameter: s.diameter,
            lead_changes: s.lead_changes,
            eta_cv: s.eta_cv.map(round_sig),
            model: params.family,
            alpha: params.alpha,
            r: params.r,
            seed,
        }
    }
}

/// Aggregate line of the summary JSON-lines output.
#[derive(Debug, Clone, Serialize)]
pub struct AggregateRecord {
    pub aggregate: bool,
    pub n: usize,
    pub replicas: usize,
    pub model: Family,
    pub alpha: Alpha,
    pub r: f64,
    pub seed: u64,
    pub metrics: serde_json::Map<String, serde_json::Value>,
}

impl AggregateRecord {
    pub fn new(params: &ModelParams, seed: u64, replicas: usize, agg: &SnapshotAggregate) -> Self {
        let metrics = agg
            .metrics
            .iter()
            .map(|(name, s)| {
                (
                    (*name).to_string(),
                    serde_json::json!({ "mean": round_sig(s.mean), "stddev": round_sig(s.stddev) }),
                )
            })
            .collect();
        AggregateRecord {
            aggregate: true,
            n: agg.n,
            replicas,
            model: params.family,
            alpha: params.alpha,
            r: params.r,
            seed,
            metrics,
        }
    }
}

/// Per-replica summaries and the seed used for each replica.
pub struct RunOutcome {
    pub seeds: Vec<u64>,
    pub runs: Vec<Vec<RunSummary>>,
}

impl RunOutcome {
    pub fn aggregate(&self) -> Vec<SnapshotAggregate> {
        aggregate(&self.runs)
    }

    /// Summary JSON lines: every replica's snapshots, then one aggregate per snapshot.
    pub fn json_lines(&self, params: &ModelParams, master_seed: u64) -> Result<String> {
        let mut s = String::new();
        for (k, run) in self.runs.iter().enumerate() {
            for summary in run {
                let rec = SummaryRecord::new(k, self.seeds[k], params, summary);
                s.push_str(&serde_json::to_string(&rec)?);
                s.push('\n');
            }
        }
        for agg in self.aggregate() {
            let rec = AggregateRecord::new(params, master_seed, self.runs.len(), &agg);
            s.push_str(&serde_json::to_string(&rec)?);
            s.push('\n');
        }
        Ok(s)
    }
}

/// Run a [`RunConfig`], calling `per_tree` with each finished tree (for file output).
pub fn run_config(
    cfg: &RunConfig,
    workers: Option<usize>,
    per_tree: impl Fn(usize, &GrowingTree) -> Result<()> + Sync,
) -> Result<RunOutcome> {
    cfg.validate()?;
    let snapshots = cfg.snapshot_sizes();
    let runs = run_replicas(
        cfg.params(),
        cfg.n_target,
        &snapshots,
        cfg.replicas,
        cfg.seed,
        cfg.eta_dmin,
        workers,
        |k, tree, summaries| per_tree(k, tree).map(|()| summaries),
    )?
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let seeds = (0..cfg.replicas as u64).map(|k| replica_seed(cfg.seed, k)).collect();
    Ok(RunOutcome { seeds, runs })
}

pub const SWEEP_HEADER: &str = "family,alpha,r,n,metric,mean,stddev";

/// Run every sweep point and render the sweep CSV.
///
/// Besides one row per (point, snapshot, metric), each point gets a
/// `d1_exponent` row (at `n = n_target`) holding the log-log regression slope
/// of mean `d1` over the snapshot grid and its standard error.
pub fn run_sweep(cfg: &SweepConfig, workers: Option<usize>) -> Result<String> {
    cfg.validate()?;
    let snapshots = cfg.snapshot_sizes();
    let mut csv = String::from(SWEEP_HEADER);
    csv.push('\n');
    for point in &cfg.points {
        let params = ModelParams::from(*point);
        let runs = run_replicas(
            params,
            cfg.n_target,
            &snapshots,
            cfg.replicas,
            cfg.seed,
            cfg.eta_dmin,
            workers,
            |_, _, s| s,
        )?;
        let prefix = format!("{},{},{}", params.family, params.alpha, fmt_r(params.r));
        let aggs = aggregate(&runs);
        for agg in &aggs {
            for (name, stat) in &agg.metrics {
                let _ = writeln!(
                    csv,
                    "{prefix},{},{name},{},{}",
                    agg.n,
                    fmt_sig(stat.mean),
                    fmt_sig(stat.stddev)
                );
            }
        }
        let pts: Vec<(f64, f64)> = aggs
            .iter()
            .filter_map(|a| a.get("d1").map(|s| (a.n as f64, s.mean)))
            .collect();
        if let Ok((slope, stderr)) = scaling_exponent(&pts) {
            let _ = writeln!(
                csv,
                "{prefix},{},d1_exponent,{},{}",
                cfg.n_target,
                fmt_sig(slope),
                fmt_sig(stderr)
            );
        }
    }
    Ok(csv)
}

fn fmt_r(r: f64) -> String {
    format!("{r}")
}
