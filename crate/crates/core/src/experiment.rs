// Copyright 2026 The Carbonyl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Experiment harness: builds structures at a memory budget, streams a
//! workload through them, and scores the query plan against exact truth.
//!
//! Trial `t` of an experiment with seed `s` uses seed `s + t` for the
//! structure under test. Query subsets depend only on `s`, so every structure
//! and trial answers the same questions.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;
use rayon::prelude::*;
use serde::Serialize;

use crate::baselines::{CocoStar, CuckooTable, ExactOracle, DEFAULT_KICK_LIMIT, DEFAULT_SLOTS};
use crate::entry::{Key, SimUpdate};
use crate::error::{Error, Result};
use crate::estimator::Estimator;
use crate::metrics::{
    compute_errors, compute_recall, compute_subset_errors, measure_insert_mops, measure_query_mops,
    ErrorStats, MetricsReport, Stat, SCHEMA_VERSION,
};
use crate::resize::{RebuildPolicy, ShrinkMode};
use crate::sketch::{Carbonyl4Sketch, SketchParams, DEFAULT_D, DEFAULT_MAX_STEPS, DEFAULT_STOP_PROB};
use crate::streams::{SyntheticSpec, SyntheticStream, ZipfTable};

pub const DEFAULT_TOPK: usize = 1000;
const ENTRY_BYTES: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SketchKind {
    Carbonyl4,
    Coco,
    Cuckoo,
    Oracle,
}

impl FromStr for SketchKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "carbonyl4" => Ok(SketchKind::Carbonyl4),
            "coco" => Ok(SketchKind::Coco),
            "cuckoo" => Ok(SketchKind::Cuckoo),
            "oracle" => Ok(SketchKind::Oracle),
            other => Err(Error::param(format!("unknown sketch `{other}`"))),
        }
    }
}

impl fmt::Display for SketchKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SketchKind::Carbonyl4 => "carbonyl4",
            SketchKind::Coco => "coco",
            SketchKind::Cuckoo => "cuckoo",
            SketchKind::Oracle => "oracle",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QueryPlan {
    /// Every key that appeared in the stream.
    Point,
    /// `count` random subsets of `size` distinct appeared keys.
    Subset { count: usize, size: usize },
    /// Errors over the true top-`k`, plus recall.
    TopK { k: usize },
}

/// Parses `point`, `subset:COUNTxSIZE` or `topk:K`.
impl FromStr for QueryPlan {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::param(format!("bad query plan `{s}` (point | subset:COUNTxSIZE | topk:K)"));
        if s == "point" {
            return Ok(QueryPlan::Point);
        }
        if s == "topk" {
            return Ok(QueryPlan::TopK { k: DEFAULT_TOPK });
        }
        if let Some(k) = s.strip_prefix("topk:") {
            let k = k.parse().map_err(|_| bad())?;
            if k == 0 {
                return Err(bad());
            }
            return Ok(QueryPlan::TopK { k });
        }
        if let Some(rest) = s.strip_prefix("subset:") {
            let (c, z) = rest.split_once('x').ok_or_else(bad)?;
            let count = c.parse().map_err(|_| bad())?;
            let size = z.parse().map_err(|_| bad())?;
            if count == 0 || size == 0 {
                return Err(bad());
            }
            return Ok(QueryPlan::Subset { count, size });
        }
        Err(bad())
    }
}

impl fmt::Display for QueryPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QueryPlan::Point => f.write_str("point"),
            QueryPlan::Subset { count, size } => write!(f, "subset:{count}x{size}"),
            QueryPlan::TopK { k } => write!(f, "topk:{k}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub sketch: SketchKind,
    pub memory_bytes: usize,
    pub d: usize,
    pub max_steps: usize,
    pub stop_prob: f64,
    pub shrinkable: bool,
    pub query: QueryPlan,
    /// K used for the recall column when the plan is not top-K.
    pub recall_k: usize,
    pub seed: u64,
    pub trials: usize,
    /// Worker cap; `None` uses every core.
    pub threads: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            sketch: SketchKind::Carbonyl4,
            memory_bytes: 1 << 20,
            d: DEFAULT_D,
            max_steps: DEFAULT_MAX_STEPS,
            stop_prob: DEFAULT_STOP_PROB,
            shrinkable: false,
            query: QueryPlan::Point,
            recall_k: DEFAULT_TOPK,
            seed: 0,
            trials: 1,
            threads: None,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::param("need at least one trial"));
        }
        if !(0.0..=1.0).contains(&self.stop_prob) {
            return Err(Error::param(format!("stop probability must lie in [0, 1], got {}", self.stop_prob)));
        }
        if self.d < 2 {
            return Err(Error::param(format!("d must be at least 2, got {}", self.d)));
        }
        if self.sketch != SketchKind::Oracle && self.memory_bytes < self.d * ENTRY_BYTES {
            return Err(Error::param(format!(
                "memory budget {} is smaller than one bucket",
                self.memory_bytes
            )));
        }
        Ok(())
    }

    pub fn sketch_params(&self, seed: u64) -> SketchParams {
        let w = SketchParams::width_for_memory(self.memory_bytes, self.d, ENTRY_BYTES, self.shrinkable);
        SketchParams::new(w)
            .with_d(self.d)
            .with_max_steps(self.max_steps)
            .with_stop_prob(self.stop_prob)
            .with_shrinkable(self.shrinkable)
            .with_seed(seed)
    }
}

/// Any of the structures the harness can drive.
#[derive(Clone, Debug)]
pub enum AnyEstimator {
    Carbonyl4(Carbonyl4Sketch),
    Coco(CocoStar),
    Cuckoo(CuckooTable),
    Oracle(ExactOracle),
}

macro_rules! delegate {
    ($self:ident, $e:ident => $body:expr) => {
        match $self {
            AnyEstimator::Carbonyl4($e) => $body,
            AnyEstimator::Coco($e) => $body,
            AnyEstimator::Cuckoo($e) => $body,
            AnyEstimator::Oracle($e) => $body,
        }
    };
}

impl Estimator for AnyEstimator {
    fn name(&self) -> &'static str {
        delegate!(self, e => e.name())
    }
    fn apply(&mut self, update: &SimUpdate) {
        delegate!(self, e => Estimator::apply(e, update))
    }
    fn point_query(&self, key: Key) -> f64 {
        delegate!(self, e => Estimator::point_query(e, key))
    }
    fn topk(&self, k: usize) -> Vec<(Key, f64)> {
        delegate!(self, e => Estimator::topk(e, k))
    }
    fn memory_bytes(&self) -> usize {
        delegate!(self, e => Estimator::memory_bytes(e))
    }
    fn dropped(&self) -> u64 {
        delegate!(self, e => e.dropped())
    }
    fn avg_search_steps(&self) -> f64 {
        delegate!(self, e => e.avg_search_steps())
    }
}

impl AnyEstimator {
    pub fn width(&self) -> usize {
        match self {
            AnyEstimator::Carbonyl4(s) => s.w(),
            AnyEstimator::Coco(c) => c.cols(),
            AnyEstimator::Cuckoo(c) => c.capacity() / DEFAULT_SLOTS,
            AnyEstimator::Oracle(_) => 0,
        }
    }

    pub fn load_factor(&self) -> f64 {
        match self {
            AnyEstimator::Carbonyl4(s) => s.load_factor(),
            AnyEstimator::Cuckoo(c) => c.load_factor(),
            AnyEstimator::Coco(_) | AnyEstimator::Oracle(_) => 0.0,
        }
    }
}

pub fn build_estimator(cfg: &ExperimentConfig, seed: u64) -> Result<AnyEstimator> {
    cfg.validate()?;
    Ok(match cfg.sketch {
        SketchKind::Carbonyl4 => AnyEstimator::Carbonyl4(Carbonyl4Sketch::new(cfg.sketch_params(seed))?),
        SketchKind::Coco => {
            let cols = cfg.memory_bytes / (cfg.d * ENTRY_BYTES);
            AnyEstimator::Coco(CocoStar::new(cfg.d, cols, seed)?)
        }
        SketchKind::Cuckoo => {
            let buckets = cfg.memory_bytes / (DEFAULT_SLOTS * ENTRY_BYTES);
            AnyEstimator::Cuckoo(CuckooTable::new(buckets, DEFAULT_SLOTS, DEFAULT_KICK_LIMIT, seed)?)
        }
        SketchKind::Oracle => AnyEstimator::Oracle(ExactOracle::new()),
    })
}

/// A materialized stream with its exact answers.
#[derive(Clone, Debug)]
pub struct Workload {
    pub updates: Arc<Vec<SimUpdate>>,
    pub truth: Arc<ExactOracle>,
    /// Every key that appeared, ascending.
    pub keys: Arc<Vec<Key>>,
    /// Generator parameters when the stream is synthetic.
    pub synthetic: Option<SyntheticSpec>,
}

impl Workload {
    pub fn new(updates: Vec<SimUpdate>, synthetic: Option<SyntheticSpec>) -> Self {
        let truth = ExactOracle::from_stream(&updates);
        let keys = truth.keys_sorted();
        Workload {
            updates: Arc::new(updates),
            truth: Arc::new(truth),
            keys: Arc::new(keys),
            synthetic,
        }
    }

    pub fn synthetic(spec: &SyntheticSpec) -> Result<Self> {
        Ok(Self::new(SyntheticStream::new(spec)?.collect(), Some(spec.clone())))
    }

    fn synthetic_with_table(spec: &SyntheticSpec, table: Arc<ZipfTable>) -> Self {
        Self::new(SyntheticStream::with_table(spec, table).collect(), Some(spec.clone()))
    }
}

fn random_subsets(keys: &[Key], count: usize, size: usize, seed: u64) -> Vec<Vec<Key>> {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed ^ 0x5ab5_e75e);
    let size = size.min(keys.len());
    (0..count)
        .map(|_| sample(&mut rng, keys.len(), size).into_iter().map(|i| keys[i]).collect())
        .collect()
}

fn keys_of(top: &[(Key, f64)]) -> Vec<Key> {
    top.iter().map(|&(k, _)| k).collect()
}

/// Scores the current state of `est` against `workload` under `cfg.query`.
pub fn evaluate<E: Estimator + ?Sized>(
    cfg: &ExperimentConfig,
    workload: &Workload,
    est: &E,
) -> Result<(ErrorStats, f64)> {
    let truth = workload.truth.as_ref();
    if workload.keys.is_empty() {
        return Ok((ErrorStats::default(), 1.0));
    }
    let recall_k = match cfg.query {
        QueryPlan::TopK { k } => k,
        _ => cfg.recall_k,
    }
    .min(workload.keys.len());
    let true_top = truth.topk(recall_k);
    let recall = if recall_k == 0 {
        1.0
    } else {
        compute_recall(&keys_of(&true_top), &keys_of(&est.topk(recall_k)))?
    };
    let errors = match cfg.query {
        QueryPlan::Point => compute_errors(truth, est, &workload.keys)?,
        QueryPlan::Subset { count, size } => {
            let subsets = random_subsets(&workload.keys, count, size, cfg.seed);
            compute_subset_errors(truth, est, &subsets)?
        }
        QueryPlan::TopK { .. } => compute_errors(truth, est, &keys_of(&true_top))?,
    };
    Ok((errors, recall))
}

fn report(
    cfg: &ExperimentConfig,
    workload: &Workload,
    est: &AnyEstimator,
    seed: u64,
    (errors, recall): (ErrorStats, f64),
    (insert_mops, query_mops): (f64, f64),
) -> MetricsReport {
    let p = cfg.sketch_params(seed);
    MetricsReport {
        schema_version: SCHEMA_VERSION,
        stat: Stat::Trial,
        sketch: cfg.sketch.to_string(),
        memory_bytes: est.memory_bytes(),
        w: est.width(),
        d: if cfg.sketch == SketchKind::Cuckoo { DEFAULT_SLOTS } else { cfg.d },
        max_steps: p.max_steps,
        stop_prob: p.stop_prob,
        seed,
        items: workload.updates.len(),
        query: cfg.query.to_string(),
        set_ratio: workload.synthetic.as_ref().map(|s| s.set_ratio),
        zipf_alpha: workload.synthetic.as_ref().map(|s| s.zipf_alpha),
        are: errors.are,
        aae: errors.aae,
        mse: errors.mse,
        recall,
        insert_mops,
        query_mops,
        avg_search_steps: est.avg_search_steps(),
        load_factor: est.load_factor(),
        dropped: est.dropped() as f64,
    }
}

fn stream_into(est: &mut AnyEstimator, workload: &Workload) -> Result<f64> {
    if workload.updates.is_empty() {
        return Ok(0.0);
    }
    measure_insert_mops(est, &workload.updates)
}

fn query_speed(est: &AnyEstimator, workload: &Workload) -> Result<f64> {
    if workload.keys.is_empty() {
        return Ok(0.0);
    }
    measure_query_mops(est, &workload.keys)
}

/// Streams the workload into a fresh structure seeded with `seed` and scores it.
pub fn run_trial(cfg: &ExperimentConfig, workload: &Workload, seed: u64) -> Result<MetricsReport> {
    let mut est = build_estimator(cfg, seed)?;
    let insert_mops = stream_into(&mut est, workload)?;
    let query_mops = query_speed(&est, workload)?;
    let (errors, recall) = evaluate(cfg, workload, &est)?;
    Ok(report(cfg, workload, &est, seed, (errors, recall), (insert_mops, query_mops)))
}

#[derive(Clone, Debug, Serialize)]
pub struct RunSummary {
    pub schema_version: u32,
    pub mean: MetricsReport,
    pub sd: MetricsReport,
    pub trials: Vec<MetricsReport>,
}

fn with_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n.max(1));
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Io(std::io::Error::other(e)))?;
    Ok(pool.install(f))
}

fn trial_seeds(cfg: &ExperimentConfig) -> Vec<u64> {
    (0..cfg.trials as u64).map(|t| cfg.seed.wrapping_add(t)).collect()
}

pub fn run_experiment(cfg: &ExperimentConfig, workload: &Workload) -> Result<RunSummary> {
    cfg.validate()?;
    let seeds = trial_seeds(cfg);
    let trials = with_pool(cfg.threads, || {
        seeds
            .par_iter()
            .map(|&s| run_trial(cfg, workload, s))
            .collect::<Result<Vec<_>>>()
    })??;
    let (mean, sd) = MetricsReport::summarize(&trials).expect("at least one trial");
    Ok(RunSummary {
        schema_version: SCHEMA_VERSION,
        mean,
        sd,
        trials,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ShrinkDelta {
    pub are: f64,
    pub aae: f64,
    pub mse: f64,
    pub recall: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ShrinkReport {
    pub schema_version: u32,
    pub mode: String,
    pub before: MetricsReport,
    pub after: MetricsReport,
    /// `after - before`.
    pub delta: ShrinkDelta,
    pub shrink_seconds: f64,
}

fn mode_name(mode: ShrinkMode) -> &'static str {
    match mode {
        ShrinkMode::Rebuild => "rebuild",
        ShrinkMode::Resample => "resample",
        ShrinkMode::Heuristic => "heuristic",
    }
}

/// Builds a sketch at `cfg.memory_bytes`, streams the workload, halves it with
/// `mode`, and scores both states.
pub fn run_shrink_trial(
    cfg: &ExperimentConfig,
    workload: &Workload,
    mode: ShrinkMode,
    policy: &RebuildPolicy,
    seed: u64,
) -> Result<ShrinkReport> {
    if cfg.sketch != SketchKind::Carbonyl4 {
        return Err(Error::param("only the carbonyl4 sketch can be shrunk"));
    }
    let mut est = build_estimator(cfg, seed)?;
    let insert_mops = stream_into(&mut est, workload)?;
    let query_mops = query_speed(&est, workload)?;
    let (errors, recall) = evaluate(cfg, workload, &est)?;
    let before = report(cfg, workload, &est, seed, (errors, recall), (insert_mops, query_mops));

    let AnyEstimator::Carbonyl4(sketch) = &mut est else {
        unreachable!()
    };
    let start = Instant::now();
    sketch.shrink_halve(mode, policy)?;
    let shrink_seconds = start.elapsed().as_secs_f64();

    let query_mops = query_speed(&est, workload)?;
    let (errors, recall) = evaluate(cfg, workload, &est)?;
    let mut after = report(cfg, workload, &est, seed, (errors, recall), (0.0, query_mops));
    after.memory_bytes = est.memory_bytes();
    let delta = ShrinkDelta {
        are: after.are - before.are,
        aae: after.aae - before.aae,
        mse: after.mse - before.mse,
        recall: after.recall - before.recall,
    };
    Ok(ShrinkReport {
        schema_version: SCHEMA_VERSION,
        mode: mode_name(mode).to_string(),
        before,
        after,
        delta,
        shrink_seconds,
    })
}

/// Shrink trials run one after another so their wall times are comparable.
pub fn run_shrink(
    cfg: &ExperimentConfig,
    workload: &Workload,
    mode: ShrinkMode,
    policy: &RebuildPolicy,
) -> Result<Vec<ShrinkReport>> {
    cfg.validate()?;
    trial_seeds(cfg)
        .into_iter()
        .map(|s| run_shrink_trial(cfg, workload, mode, policy, s))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    MaxSteps,
    StopProb,
    D,
    SetRatio,
    ZipfAlpha,
    Memory,
}

impl Axis {
    pub fn name(&self) -> &'static str {
        match self {
            Axis::MaxSteps => "M",
            Axis::StopProb => "p_eps",
            Axis::D => "d",
            Axis::SetRatio => "set_ratio",
            Axis::ZipfAlpha => "zipf_alpha",
            Axis::Memory => "memory",
        }
    }
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "M" | "max_steps" => Axis::MaxSteps,
            "p_eps" | "stop_prob" => Axis::StopProb,
            "d" => Axis::D,
            "set_ratio" => Axis::SetRatio,
            "zipf_alpha" | "skew" => Axis::ZipfAlpha,
            "memory" => Axis::Memory,
            other => return Err(Error::param(format!("unknown sweep axis `{other}`"))),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AxisSpec {
    pub axis: Axis,
    pub values: Vec<f64>,
}

/// Parses `NAME=v1,v2,...`.
impl FromStr for AxisSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, vals) = s
            .split_once('=')
            .ok_or_else(|| Error::param(format!("bad axis `{s}` (expected NAME=v1,v2,...)")))?;
        let axis: Axis = name.trim().parse()?;
        let values = vals
            .split(',')
            .map(|v| {
                v.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::param(format!("bad value `{v}` for axis {name}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if values.is_empty() {
            return Err(Error::param(format!("axis {name} has no values")));
        }
        Ok(AxisSpec { axis, values })
    }
}

fn as_count(v: f64, axis: Axis) -> Result<usize> {
    if v >= 0.0 && v.fract() == 0.0 && v.is_finite() {
        Ok(v as usize)
    } else {
        Err(Error::param(format!("axis {} needs non-negative integers, got {v}", axis.name())))
    }
}

/// Runs every cell of the cartesian product of `axes` and returns one mean
/// row per cell, in row-major order (the last axis varies fastest).
pub fn run_sweep(base: &ExperimentConfig, workload: &Workload, axes: &[AxisSpec]) -> Result<Vec<MetricsReport>> {
    let regenerates = axes
        .iter()
        .any(|a| matches!(a.axis, Axis::SetRatio | Axis::ZipfAlpha));
    if regenerates && workload.synthetic.is_none() {
        return Err(Error::param("set_ratio and zipf_alpha axes need a synthetic workload"));
    }

    let mut cells: Vec<Vec<(Axis, f64)>> = vec![Vec::new()];
    for spec in axes {
        cells = cells
            .into_iter()
            .flat_map(|cell| {
                spec.values.iter().map(move |&v| {
                    let mut c = cell.clone();
                    c.push((spec.axis, v));
                    c
                })
            })
            .collect();
    }

    let mut rows = Vec::with_capacity(cells.len());
    let mut table: Option<(f64, Arc<ZipfTable>)> = None;
    for cell in cells {
        let mut cfg = base.clone();
        let mut spec = workload.synthetic.clone();
        for &(axis, v) in &cell {
            match axis {
                Axis::MaxSteps => cfg.max_steps = as_count(v, axis)?,
                Axis::StopProb => cfg.stop_prob = v,
                Axis::D => cfg.d = as_count(v, axis)?,
                Axis::Memory => cfg.memory_bytes = as_count(v, axis)?,
                Axis::SetRatio => spec.as_mut().expect("checked").set_ratio = v,
                Axis::ZipfAlpha => spec.as_mut().expect("checked").zipf_alpha = v,
            }
        }
        let regenerated;
        let cell_workload = match (&spec, regenerates) {
            (Some(s), true) => {
                s.validate()?;
                let tbl = match &table {
                    Some((alpha, t)) if *alpha == s.zipf_alpha => t.clone(),
                    _ => {
                        let t = Arc::new(ZipfTable::new(s.universe, s.zipf_alpha));
                        table = Some((s.zipf_alpha, t.clone()));
                        t
                    }
                };
                regenerated = Workload::synthetic_with_table(s, tbl);
                &regenerated
            }
            _ => workload,
        };
        rows.push(run_experiment(&cfg, cell_workload)?.mean);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_query_plans() {
        assert_eq!("point".parse::<QueryPlan>().unwrap(), QueryPlan::Point);
        assert_eq!("topk:50".parse::<QueryPlan>().unwrap(), QueryPlan::TopK { k: 50 });
        assert_eq!(
            "subset:100x10".parse::<QueryPlan>().unwrap(),
            QueryPlan::Subset { count: 100, size: 10 }
        );
        for bad in ["topk:0", "subset:10", "subset:0x3", "range"] {
            assert!(bad.parse::<QueryPlan>().is_err(), "{bad}");
        }
    }

    #[test]
    fn parses_axes() {
        let a: AxisSpec = "M=0,1,2".parse().unwrap();
        assert_eq!(a.axis, Axis::MaxSteps);
        assert_eq!(a.values, vec![0.0, 1.0, 2.0]);
        assert!("banana=1".parse::<AxisSpec>().is_err());
        assert!("M".parse::<AxisSpec>().is_err());
    }

    #[test]
    fn width_follows_memory() {
        let cfg = ExperimentConfig {
            memory_bytes: 1000 * 32,
            ..Default::default()
        };
        assert_eq!(cfg.sketch_params(0).w, 1000);
        let cfg = ExperimentConfig {
            shrinkable: true,
            ..cfg
        };
        assert_eq!(cfg.sketch_params(0).w, 512);
    }

    #[test]
    fn too_little_memory_is_rejected() {
        let cfg = ExperimentConfig {
            memory_bytes: 16,
            ..Default::default()
        };
        assert!(build_estimator(&cfg, 0).is_err());
    }
}
