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

//! Accuracy and speed metrics.

use std::collections::HashSet;
use std::hint::black_box;
use std::time::Instant;

use serde::Serialize;

use crate::entry::{Key, SimUpdate};
use crate::error::{Error, Result};
use crate::estimator::Estimator;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct ErrorStats {
    /// Mean relative error over keys whose true value is nonzero.
    pub are: f64,
    pub aae: f64,
    pub mse: f64,
    /// Keys that contributed to `are`.
    pub are_keys: usize,
}

fn accumulate(pairs: impl Iterator<Item = (f64, f64)>) -> Result<ErrorStats> {
    let (mut n, mut rel_n) = (0usize, 0usize);
    let (mut rel, mut abs, mut sq) = (0.0, 0.0, 0.0);
    for (truth, est) in pairs {
        let err = (truth - est).abs();
        n += 1;
        abs += err;
        sq += err * err;
        if truth != 0.0 {
            rel += err / truth.abs();
            rel_n += 1;
        }
    }
    if n == 0 {
        return Err(Error::param("error metrics need at least one query"));
    }
    Ok(ErrorStats {
        are: if rel_n == 0 { 0.0 } else { rel / rel_n as f64 },
        aae: abs / n as f64,
        mse: sq / n as f64,
        are_keys: rel_n,
    })
}

/// Point-query errors of `estimator` against `truth` over `keys`.
pub fn compute_errors<T, E>(truth: &T, estimator: &E, keys: &[Key]) -> Result<ErrorStats>
where
    T: Estimator + ?Sized,
    E: Estimator + ?Sized,
{
    accumulate(keys.iter().map(|&k| (truth.point_query(k), estimator.point_query(k))))
}

/// Subset-sum errors over a batch of key subsets.
pub fn compute_subset_errors<T, E>(truth: &T, estimator: &E, subsets: &[Vec<Key>]) -> Result<ErrorStats>
where
    T: Estimator + ?Sized,
    E: Estimator + ?Sized,
{
    accumulate(
        subsets
            .iter()
            .map(|s| (truth.subset_query(s), estimator.subset_query(s))),
    )
}

/// Fraction of the true top-K that the estimated top-K recovers.
pub fn compute_recall(true_topk: &[Key], est_topk: &[Key]) -> Result<f64> {
    if true_topk.is_empty() {
        return Err(Error::param("recall needs K > 0"));
    }
    let truth: HashSet<Key> = true_topk.iter().copied().collect();
    let hits = est_topk
        .iter()
        .copied()
        .collect::<HashSet<Key>>()
        .intersection(&truth)
        .count();
    Ok(hits as f64 / truth.len() as f64)
}

/// Million updates per second over one pass of `stream`.
pub fn measure_insert_mops<E: Estimator + ?Sized>(estimator: &mut E, stream: &[SimUpdate]) -> Result<f64> {
    if stream.is_empty() {
        return Err(Error::param("throughput needs a nonempty stream"));
    }
    let start = Instant::now();
    for u in stream {
        estimator.apply(u);
    }
    Ok(mops(stream.len(), start))
}

/// Million point queries per second over `keys`.
pub fn measure_query_mops<E: Estimator + ?Sized>(estimator: &E, keys: &[Key]) -> Result<f64> {
    if keys.is_empty() {
        return Err(Error::param("throughput needs a nonempty key list"));
    }
    let start = Instant::now();
    let mut acc = 0.0;
    for &k in keys {
        acc += estimator.point_query(black_box(k));
    }
    black_box(acc);
    Ok(mops(keys.len(), start))
}

fn mops(ops: usize, start: Instant) -> f64 {
    let secs = start.elapsed().as_secs_f64().max(1e-9);
    ops as f64 / secs / 1e6
}

/// Which statistic a report row carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Stat {
    Trial,
    Mean,
    Sd,
}

/// One experiment cell. Serializes to a flat JSON object, and to a CSV row
/// whose columns follow the field order below.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MetricsReport {
    pub schema_version: u32,
    pub stat: Stat,
    pub sketch: String,
    pub memory_bytes: usize,
    pub w: usize,
    pub d: usize,
    pub max_steps: usize,
    pub stop_prob: f64,
    pub seed: u64,
    pub items: usize,
    pub query: String,
    pub set_ratio: Option<f64>,
    pub zipf_alpha: Option<f64>,
    pub are: f64,
    pub aae: f64,
    pub mse: f64,
    pub recall: f64,
    pub insert_mops: f64,
    pub query_mops: f64,
    pub avg_search_steps: f64,
    pub load_factor: f64,
    pub dropped: f64,
}

impl MetricsReport {
    pub const CSV_COLUMNS: [&'static str; 22] = [
        "schema_version",
        "stat",
        "sketch",
        "memory_bytes",
        "w",
        "d",
        "max_steps",
        "stop_prob",
        "seed",
        "items",
        "query",
        "set_ratio",
        "zipf_alpha",
        "are",
        "aae",
        "mse",
        "recall",
        "insert_mops",
        "query_mops",
        "avg_search_steps",
        "load_factor",
        "dropped",
    ];

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }

    /// Mean and sample standard deviation over trial reports. Configuration
    /// columns are taken from the first report.
    pub fn summarize(reports: &[MetricsReport]) -> Option<(MetricsReport, MetricsReport)> {
        let first = reports.first()?;
        let n = reports.len() as f64;
        let pick: [fn(&MetricsReport) -> f64; 9] = [
            |r| r.are,
            |r| r.aae,
            |r| r.mse,
            |r| r.recall,
            |r| r.insert_mops,
            |r| r.query_mops,
            |r| r.avg_search_steps,
            |r| r.load_factor,
            |r| r.dropped,
        ];
        let mut mean = [0.0; 9];
        let mut sd = [0.0; 9];
        for (i, f) in pick.iter().enumerate() {
            let m = reports.iter().map(f).sum::<f64>() / n;
            let var = if reports.len() > 1 {
                reports.iter().map(|r| (f(r) - m).powi(2)).sum::<f64>() / (n - 1.0)
            } else {
                0.0
            };
            mean[i] = m;
            sd[i] = var.sqrt();
        }
        let fill = |stat: Stat, v: [f64; 9]| MetricsReport {
            stat,
            are: v[0],
            aae: v[1],
            mse: v[2],
            recall: v[3],
            insert_mops: v[4],
            query_mops: v[5],
            avg_search_steps: v[6],
            load_factor: v[7],
            dropped: v[8],
            ..first.clone()
        };
        Some((fill(Stat::Mean, mean), fill(Stat::Sd, sd)))
    }
}

/// Writes reports as CSV with a header row.
pub fn write_csv<W: std::io::Write>(w: W, reports: &[MetricsReport]) -> Result<()> {
    let mut w = csv::Writer::from_writer(w);
    if reports.is_empty() {
        w.write_record(MetricsReport::CSV_COLUMNS).map_err(to_io)?;
    }
    for r in reports {
        w.serialize(r).map_err(to_io)?;
    }
    w.flush()?;
    Ok(())
}

fn to_io(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}
