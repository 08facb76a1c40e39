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

//! The full sketch: `w` balance buckets addressed by two hash functions, with
//! cascading overflow to find a near-globally cheapest merge when both hashed
//! buckets of a new key are full.
//!
//! Overflow handling runs in two phases. The search walks from one hashed
//! bucket along the alternate buckets of each visited bucket's smallest entry,
//! costing the cheapest local merge at every stop, without touching the
//! buckets. The kick then replays the recorded path up to the cheapest bucket
//! (`B_opt`), shifting each bucket's smallest entry one hop along, and finishes
//! with the costed plan at `B_opt`.
//!
//! All randomness comes from one seeded generator per sketch. Draws happen in
//! program order: the bucket pick when overflow starts, one stop coin per
//! non-improving search step, one coin per merge.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::bucket::{BalanceBucket, MergePlan, PlanKind};
use crate::entry::{Entry, Key, SimUpdate, UpdateKind};
use crate::error::{Error, Result};
use crate::hash::{alternate_bucket, bucket_pair};

pub type SketchRng = Xoshiro256PlusPlus;

pub const DEFAULT_D: usize = 4;
pub const DEFAULT_MAX_STEPS: usize = 10;
pub const DEFAULT_STOP_PROB: f64 = 0.1;

#[derive(Clone, Debug, PartialEq)]
pub struct SketchParams {
    /// Number of buckets.
    pub w: usize,
    /// Slots per bucket.
    pub d: usize,
    /// Cap on search steps beyond the starting bucket (`M`).
    pub max_steps: usize,
    /// Probability of stopping at a non-improving search step (`p_ε`).
    pub stop_prob: f64,
    pub key_bytes: usize,
    pub value_bytes: usize,
    pub seed: u64,
    /// Restricts `w` to powers of two so that repeated halving stays
    /// consistent with the hash reduction.
    pub shrinkable: bool,
}

impl SketchParams {
    pub fn new(w: usize) -> Self {
        SketchParams {
            w,
            d: DEFAULT_D,
            max_steps: DEFAULT_MAX_STEPS,
            stop_prob: DEFAULT_STOP_PROB,
            key_bytes: 4,
            value_bytes: 4,
            seed: 0,
            shrinkable: false,
        }
    }

    pub fn with_d(mut self, d: usize) -> Self {
        self.d = d;
        self
    }

    pub fn with_max_steps(mut self, m: usize) -> Self {
        self.max_steps = m;
        self
    }

    pub fn with_stop_prob(mut self, p: f64) -> Self {
        self.stop_prob = p;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_shrinkable(mut self, shrinkable: bool) -> Self {
        self.shrinkable = shrinkable;
        self
    }

    /// Largest bucket count that fits in `memory_bytes` at the given geometry,
    /// rounded down to a power of two when `shrinkable`.
    pub fn width_for_memory(memory_bytes: usize, d: usize, entry_bytes: usize, shrinkable: bool) -> usize {
        let w = memory_bytes / (d * entry_bytes).max(1);
        if shrinkable && w > 0 {
            1 << (usize::BITS - 1 - w.leading_zeros())
        } else {
            w
        }
    }

    pub fn entry_bytes(&self) -> usize {
        self.key_bytes + self.value_bytes
    }

    pub fn memory_bytes(&self) -> usize {
        self.w * self.d * self.entry_bytes()
    }

    pub fn validate(&self) -> Result<()> {
        if self.w < 2 {
            return Err(Error::param(format!("w must be at least 2, got {}", self.w)));
        }
        if self.d < 2 {
            return Err(Error::param(format!("d must be at least 2, got {}", self.d)));
        }
        if !(0.0..=1.0).contains(&self.stop_prob) {
            return Err(Error::param(format!(
                "stop probability must lie in [0, 1], got {}",
                self.stop_prob
            )));
        }
        if self.shrinkable && !self.w.is_power_of_two() {
            return Err(Error::param(format!(
                "shrinkable sketches need a power-of-two w, got {}",
                self.w
            )));
        }
        Ok(())
    }
}

/// One hop of an overflow walk: the bucket visited and the slot whose occupant
/// would be displaced there.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PathStep {
    pub bucket: usize,
    pub slot: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchOutcome {
    pub path: Vec<PathStep>,
    /// `path[opt_prefix_len - 1]` is the cheapest bucket found.
    pub opt_prefix_len: usize,
    pub min_global: f64,
    /// The plan that achieves `min_global` at the cheapest bucket.
    pub opt_plan: MergePlan,
    /// Buckets evaluated, including the start.
    pub steps_taken: usize,
}

impl SearchOutcome {
    pub fn opt_bucket(&self) -> usize {
        self.path[self.opt_prefix_len - 1].bucket
    }
}

/// Running totals over overflow searches.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SearchStats {
    pub total_steps: u64,
    pub overflows: u64,
    /// Merges executed (the only events that lose information).
    pub merges: u64,
}

impl SearchStats {
    pub fn avg_steps(&self) -> f64 {
        if self.overflows == 0 {
            0.0
        } else {
            self.total_steps as f64 / self.overflows as f64
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Carbonyl4Sketch {
    params: SketchParams,
    buckets: Vec<BalanceBucket>,
    rng: SketchRng,
    stats: SearchStats,
}

impl Carbonyl4Sketch {
    pub fn new(params: SketchParams) -> Result<Self> {
        params.validate()?;
        Ok(Carbonyl4Sketch {
            buckets: vec![BalanceBucket::new(params.d); params.w],
            rng: SketchRng::seed_from_u64(params.seed),
            stats: SearchStats::default(),
            params,
        })
    }

    pub fn params(&self) -> &SketchParams {
        &self.params
    }

    pub fn w(&self) -> usize {
        self.params.w
    }

    pub fn buckets(&self) -> &[BalanceBucket] {
        &self.buckets
    }

    pub fn stats(&self) -> &SearchStats {
        &self.stats
    }

    pub fn memory_bytes(&self) -> usize {
        self.params.memory_bytes()
    }

    /// Changes the overflow parameters of a live sketch.
    pub fn set_search_params(&mut self, max_steps: usize, stop_prob: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&stop_prob) {
            return Err(Error::param(format!("stop probability must lie in [0, 1], got {stop_prob}")));
        }
        self.params.max_steps = max_steps;
        self.params.stop_prob = stop_prob;
        Ok(())
    }

    #[inline]
    pub fn hashed_buckets(&self, key: Key) -> (usize, usize) {
        bucket_pair(key, self.params.w, self.params.seed)
    }

    /// Resident slot of `key`, as `(bucket, slot)`.
    pub fn locate(&self, key: Key) -> Option<(usize, usize)> {
        let (a, b) = self.hashed_buckets(key);
        if let Some(s) = self.buckets[a].find(key) {
            return Some((a, s));
        }
        if b != a {
            if let Some(s) = self.buckets[b].find(key) {
                return Some((b, s));
            }
        }
        None
    }

    pub fn apply(&mut self, update: &SimUpdate) {
        debug_assert!(update.value.is_finite());
        match update.kind {
            UpdateKind::Set => self.set(update.key, update.value),
            UpdateKind::Increment => self.inc(update.key, update.value),
        }
    }

    pub fn set(&mut self, key: Key, value: f64) {
        if let Some((b, s)) = self.locate(key) {
            self.buckets[b].entries_mut()[s].value = value;
            return;
        }
        self.insert_absent(key, value);
    }

    pub fn inc(&mut self, key: Key, value: f64) {
        if let Some((b, s)) = self.locate(key) {
            self.buckets[b].entries_mut()[s].value += value;
            return;
        }
        self.insert_absent(key, value);
    }

    fn insert_absent(&mut self, key: Key, value: f64) {
        let (a, b) = self.hashed_buckets(key);
        for idx in [a, b] {
            if let Some(s) = self.buckets[idx].first_empty() {
                self.buckets[idx].entries_mut()[s] = Entry::new(key, value);
                return;
            }
        }
        let start = if self.rng.random::<bool>() { a } else { b };
        let outcome = self.cascade_search(start, key, value);
        self.cascade_kick(&outcome, key, value);
    }

    /// Read-only overflow search starting at `start`, one of `key`'s hashed
    /// buckets. Consumes stop coins from the sketch's generator but leaves the
    /// buckets untouched, and records the walk for [`cascade_kick`](Self::cascade_kick).
    ///
    /// The walk stops when an empty slot is found, when a non-improving step
    /// flips its stop coin, after `max_steps` hops, or when the next hop would
    /// revisit a bucket already on the path.
    pub fn cascade_search(&mut self, start: usize, key: Key, value: f64) -> SearchOutcome {
        debug_assert!(self.locate(key).is_none());
        let params = &self.params;
        let mut path: Vec<PathStep> = Vec::with_capacity(params.max_steps.min(32) + 1);
        let mut current = start;
        let mut incoming_abs = value.abs();
        let mut min_global = f64::INFINITY;
        let mut opt_prefix_len = 0;
        let mut opt_plan = None;

        loop {
            let bucket = &self.buckets[current];
            let plan = bucket.local_min_plan(incoming_abs);
            let slot = plan.displaced_slot();
            path.push(PathStep { bucket: current, slot });
            if plan.cost < min_global {
                min_global = plan.cost;
                opt_prefix_len = path.len();
                opt_plan = Some(plan);
                if plan.cost == 0.0 {
                    break;
                }
            } else if self.rng.random::<f64>() < params.stop_prob {
                break;
            }
            if path.len() > params.max_steps {
                break;
            }
            let candidate = bucket.entries()[slot];
            let next = alternate_bucket(candidate.key, current, params.w, params.seed);
            if path.iter().any(|s| s.bucket == next) {
                break;
            }
            incoming_abs = candidate.value.abs();
            current = next;
        }

        let steps_taken = path.len();
        self.stats.total_steps += steps_taken as u64;
        self.stats.overflows += 1;
        SearchOutcome {
            path,
            opt_prefix_len,
            min_global,
            opt_plan: opt_plan.expect("the first evaluated bucket always improves on +inf"),
            steps_taken,
        }
    }

    /// Replays a search outcome: every bucket before `B_opt` swaps the incoming
    /// entry into its recorded slot and passes the displaced entry on; `B_opt`
    /// executes the costed plan.
    pub fn cascade_kick(&mut self, outcome: &SearchOutcome, key: Key, value: f64) {
        let mut incoming = Entry::new(key, value);
        for step in &outcome.path[..outcome.opt_prefix_len - 1] {
            let slot = &mut self.buckets[step.bucket].entries_mut()[step.slot];
            incoming = std::mem::replace(slot, incoming);
        }
        if !matches!(outcome.opt_plan.kind, PlanKind::FillEmpty { .. }) {
            self.stats.merges += 1;
        }
        let opt = outcome.opt_bucket();
        self.buckets[opt].apply_plan(&outcome.opt_plan, incoming, &mut self.rng);
    }

    pub fn point_query(&self, key: Key) -> f64 {
        self.locate(key)
            .map_or(0.0, |(b, s)| self.buckets[b].entries()[s].value)
    }

    pub fn contains(&self, key: Key) -> bool {
        self.locate(key).is_some()
    }

    /// Sum of point estimates over `keys`.
    pub fn subset_query(&self, keys: &[Key]) -> f64 {
        keys.iter().map(|&k| self.point_query(k)).sum()
    }

    /// Subset sum by scanning every slot. Agrees with
    /// [`subset_query`](Self::subset_query) as long as each key is resident at
    /// most once and only in its hashed buckets.
    pub fn subset_query_scan(&self, keys: &HashSet<Key>) -> f64 {
        self.occupied()
            .filter(|e| keys.contains(&e.key))
            .map(|e| e.value)
            .sum()
    }

    /// The `k` resident entries of largest magnitude, ties by ascending key.
    pub fn topk(&self, k: usize) -> Vec<(Key, f64)> {
        crate::estimator::top_by_magnitude(self.occupied().map(|e| (e.key, e.value)), k)
    }

    pub fn occupied(&self) -> impl Iterator<Item = &Entry> {
        self.buckets.iter().flat_map(|b| b.occupied())
    }

    pub fn occupied_count(&self) -> usize {
        self.buckets.iter().map(BalanceBucket::occupied_count).sum()
    }

    pub fn load_factor(&self) -> f64 {
        self.occupied_count() as f64 / (self.params.w * self.params.d) as f64
    }

    pub fn total_abs_mass(&self) -> f64 {
        self.buckets.iter().map(BalanceBucket::abs_mass).sum()
    }

    /// Checks that every key is resident at most once and only in one of its
    /// hashed buckets.
    pub fn check_structure(&self) -> std::result::Result<(), String> {
        let mut seen = HashSet::with_capacity(self.occupied_count());
        for (i, bucket) in self.buckets.iter().enumerate() {
            if bucket.d() != self.params.d {
                return Err(format!("bucket {i} has {} slots, expected {}", bucket.d(), self.params.d));
            }
            for e in bucket.occupied() {
                if !seen.insert(e.key) {
                    return Err(format!("key {} is resident twice", e.key));
                }
                let (a, b) = self.hashed_buckets(e.key);
                if i != a && i != b {
                    return Err(format!("key {} sits in bucket {i}, hashed to {a}/{b}", e.key));
                }
                if !e.value.is_finite() {
                    return Err(format!("key {} holds non-finite value", e.key));
                }
            }
        }
        Ok(())
    }

    pub(crate) fn rng_mut(&mut self) -> &mut SketchRng {
        &mut self.rng
    }

    pub(crate) fn split_buckets_rng(&mut self) -> (&mut Vec<BalanceBucket>, &mut SketchRng) {
        (&mut self.buckets, &mut self.rng)
    }

    pub(crate) fn params_mut(&mut self) -> &mut SketchParams {
        &mut self.params
    }

    /// Overwrites a slot directly. Intended for constructing fixtures.
    pub fn put_raw(&mut self, bucket: usize, slot: usize, entry: Entry) {
        self.buckets[bucket].entries_mut()[slot] = entry;
    }
}
