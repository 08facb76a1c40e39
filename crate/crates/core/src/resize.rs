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

//! Resizing: rebuild into a fresh sketch of any width, or halve in place by
//! folding bucket `k + w/2` into bucket `k`.
//!
//! Two in-place folding strategies are provided. Re-sampling keeps exactly
//! `d` of the up-to-`2d` entries with inclusion probabilities proportional to
//! magnitude (systematic sampling), which is the minimum-variance unbiased
//! choice. The heuristic repeatedly merges the two smallest entries, which
//! protects the largest entries and suits top-K workloads.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rand::Rng;

use crate::bucket::BalanceBucket;
use crate::entry::Entry;
use crate::error::{Error, Result};
use crate::merge::merge_pm;
use crate::sketch::{Carbonyl4Sketch, SketchParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShrinkMode {
    Rebuild,
    Resample,
    Heuristic,
}

impl std::str::FromStr for ShrinkMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rebuild" => Ok(ShrinkMode::Rebuild),
            "resample" => Ok(ShrinkMode::Resample),
            "heuristic" => Ok(ShrinkMode::Heuristic),
            other => Err(Error::param(format!("unknown shrink mode `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RebuildPolicy {
    /// Below this ratio of old to new width the target is treated as a plain
    /// cuckoo table (no stop coin).
    pub alpha: f64,
    /// Stop probability for rebuilds at or above `alpha`; `None` keeps the
    /// source sketch's setting.
    pub stop_prob: Option<f64>,
    /// Maximum displacements per entry in the cuckoo phase. When exhausted the
    /// cheapest merge seen along the walk is taken.
    pub kick_cap: usize,
}

impl Default for RebuildPolicy {
    fn default() -> Self {
        RebuildPolicy {
            alpha: 0.94,
            stop_prob: None,
            kick_cap: 500,
        }
    }
}

impl RebuildPolicy {
    fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::param(format!("alpha must lie in (0, 1), got {}", self.alpha)));
        }
        if let Some(p) = self.stop_prob {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::param(format!("stop probability must lie in [0, 1], got {p}")));
            }
        }
        Ok(())
    }
}

/// Re-inserts every resident entry of `sketch` into a new sketch with
/// `new_w` buckets. The new sketch keeps the source's overflow parameters.
pub fn rebuild(
    sketch: &Carbonyl4Sketch,
    new_w: usize,
    policy: &RebuildPolicy,
    seed: u64,
) -> Result<Carbonyl4Sketch> {
    if new_w < 2 {
        return Err(Error::param(format!("new width must be at least 2, got {new_w}")));
    }
    policy.validate()?;
    let src = sketch.params();
    let params = SketchParams {
        w: new_w,
        seed,
        ..src.clone()
    };
    let mut target = Carbonyl4Sketch::new(params)?;
    let ratio = src.w as f64 / new_w as f64;
    if ratio < policy.alpha {
        target.set_search_params(policy.kick_cap, 0.0)?;
    } else {
        target.set_search_params(src.max_steps, policy.stop_prob.unwrap_or(src.stop_prob))?;
    }
    for e in sketch.occupied() {
        target.set(e.key, e.value);
    }
    target.set_search_params(src.max_steps, src.stop_prob)?;
    Ok(target)
}

/// Magnitude-weighted systematic sampling of two buckets into one.
pub fn merge_pair_resample<R: Rng + ?Sized>(
    a: &BalanceBucket,
    b: &BalanceBucket,
    rng: &mut R,
) -> BalanceBucket {
    let d = a.d();
    assert_eq!(d, b.d(), "bucket geometries differ");
    let mut pool: Vec<Entry> = a.occupied().chain(b.occupied()).copied().collect();
    if pool.len() <= d {
        return pack(d, pool);
    }
    pool.sort_by(|x, y| y.value.abs().total_cmp(&x.value.abs()));

    // suffix[i] = Σ_{j ≥ i} |v_j|
    let mut suffix = vec![0.0; pool.len() + 1];
    for i in (0..pool.len()).rev() {
        suffix[i] = suffix[i + 1] + pool[i].value.abs();
    }

    let mut out = Vec::with_capacity(d);
    let mut i = 0;
    while out.len() < d {
        let remaining = (d - out.len()) as f64;
        let rest = suffix[i];
        if rest == 0.0 {
            // Only zero-valued entries are left; keep as many as fit.
            out.extend(pool[i..].iter().take(d - out.len()).copied());
            break;
        }
        if remaining * pool[i].value.abs() / rest >= 1.0 {
            out.push(pool[i]);
            i += 1;
            continue;
        }
        let slots = d - out.len();
        out.extend(systematic_sample(&pool[i..], slots, rest, rng));
        break;
    }
    pack(d, out)
}

/// Selects exactly `slots` entries with inclusion probability
/// `slots · |v| / total`, each stored with magnitude `total / slots`.
/// Every probability must be below one.
fn systematic_sample<R: Rng + ?Sized>(
    candidates: &[Entry],
    slots: usize,
    total: f64,
    rng: &mut R,
) -> Vec<Entry> {
    let scale = slots as f64 / total;
    let stored = total / slots as f64;
    let r: f64 = rng.random();
    let mut picked = Vec::with_capacity(slots);
    let mut upper = 0.0;
    let mut z = 0usize;
    for (j, e) in candidates.iter().enumerate() {
        // Pin the final boundary so rounding cannot leave a target unassigned.
        upper = if j + 1 == candidates.len() {
            slots as f64
        } else {
            upper + scale * e.value.abs()
        };
        while z < slots && r + (z as f64) < upper {
            picked.push(Entry::new(e.key, stored.copysign(e.value)));
            z += 1;
        }
    }
    debug_assert_eq!(picked.len(), slots);
    picked
}

#[derive(Clone, Copy)]
struct ByMagnitude {
    entry: Entry,
    seq: usize,
}

impl PartialEq for ByMagnitude {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for ByMagnitude {}

impl PartialOrd for ByMagnitude {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ByMagnitude {
    // Reversed so that the max-heap pops the smallest magnitude first.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .entry
            .value
            .abs()
            .total_cmp(&self.entry.value.abs())
            .then(other.seq.cmp(&self.seq))
    }
}

/// Folds two buckets into one by repeatedly merging the two smallest entries.
pub fn merge_pair_heuristic<R: Rng + ?Sized>(
    a: &BalanceBucket,
    b: &BalanceBucket,
    rng: &mut R,
) -> BalanceBucket {
    let d = a.d();
    assert_eq!(d, b.d(), "bucket geometries differ");
    let mut heap: BinaryHeap<ByMagnitude> = a
        .occupied()
        .chain(b.occupied())
        .enumerate()
        .map(|(seq, &entry)| ByMagnitude { entry, seq })
        .collect();
    let mut seq = heap.len();
    while heap.len() > d {
        let x = heap.pop().unwrap().entry;
        let y = heap.pop().unwrap().entry;
        heap.push(ByMagnitude {
            entry: merge_pm(x, y, rng),
            seq,
        });
        seq += 1;
    }
    let mut kept: Vec<ByMagnitude> = heap.into_vec();
    kept.sort_by_key(|m| m.seq);
    pack(d, kept.into_iter().map(|m| m.entry).collect())
}

fn pack(d: usize, entries: Vec<Entry>) -> BalanceBucket {
    debug_assert!(entries.len() <= d);
    let mut slots = entries;
    slots.resize(d, Entry::EMPTY);
    BalanceBucket::from_entries(slots)
}

impl Carbonyl4Sketch {
    /// Halves the number of buckets. `Resample` and `Heuristic` fold bucket
    /// pairs in place; `Rebuild` re-inserts everything into a fresh sketch of
    /// half the width using `policy`.
    pub fn shrink_halve(&mut self, mode: ShrinkMode, policy: &RebuildPolicy) -> Result<()> {
        let w = self.w();
        if !w.is_multiple_of(2) {
            return Err(Error::param(format!("cannot halve an odd width ({w})")));
        }
        let half = w / 2;
        if half < 2 {
            return Err(Error::param(format!("halving w = {w} would leave fewer than 2 buckets")));
        }
        match mode {
            ShrinkMode::Rebuild => {
                let seed = self.rng_mut().random();
                *self = rebuild(self, half, policy, seed)?;
            }
            ShrinkMode::Resample | ShrinkMode::Heuristic => {
                let (buckets, rng) = self.split_buckets_rng();
                let (low, high) = buckets.split_at_mut(half);
                for (lo, hi) in low.iter_mut().zip(high.iter()) {
                    *lo = match mode {
                        ShrinkMode::Resample => merge_pair_resample(lo, hi, rng),
                        _ => merge_pair_heuristic(lo, hi, rng),
                    };
                }
                buckets.truncate(half);
                self.params_mut().w = half;
            }
        }
        Ok(())
    }
}
