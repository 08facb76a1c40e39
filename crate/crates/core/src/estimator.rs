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

//! The apply/query surface shared by the sketch, the baselines and the oracle.

use crate::entry::{Key, SimUpdate};
use crate::sketch::Carbonyl4Sketch;

pub trait Estimator {
    fn name(&self) -> &'static str;

    fn apply(&mut self, update: &SimUpdate);

    fn point_query(&self, key: Key) -> f64;

    fn subset_query(&self, keys: &[Key]) -> f64 {
        keys.iter().map(|&k| self.point_query(k)).sum()
    }

    /// The `k` recorded items of largest estimated magnitude, ties broken by
    /// ascending key.
    fn topk(&self, k: usize) -> Vec<(Key, f64)>;

    /// Accounted footprint, used to compare structures at equal memory.
    fn memory_bytes(&self) -> usize;

    /// Updates discarded outright (only the cuckoo table drops anything).
    fn dropped(&self) -> u64 {
        0
    }

    /// Mean overflow search length, for structures that search.
    fn avg_search_steps(&self) -> f64 {
        0.0
    }
}

/// Sorts by descending magnitude (ascending key on ties) and keeps `k`.
pub fn top_by_magnitude(items: impl Iterator<Item = (Key, f64)>, k: usize) -> Vec<(Key, f64)> {
    if k == 0 {
        return Vec::new();
    }
    let mut all: Vec<(Key, f64)> = items.collect();
    let cmp = |a: &(Key, f64), b: &(Key, f64)| {
        b.1.abs().total_cmp(&a.1.abs()).then(a.0.cmp(&b.0))
    };
    if all.len() > k {
        all.select_nth_unstable_by(k - 1, cmp);
        all.truncate(k);
    }
    all.sort_unstable_by(cmp);
    all
}

impl Estimator for Carbonyl4Sketch {
    fn name(&self) -> &'static str {
        "carbonyl4"
    }

    fn apply(&mut self, update: &SimUpdate) {
        Carbonyl4Sketch::apply(self, update)
    }

    fn point_query(&self, key: Key) -> f64 {
        Carbonyl4Sketch::point_query(self, key)
    }

    fn topk(&self, k: usize) -> Vec<(Key, f64)> {
        Carbonyl4Sketch::topk(self, k)
    }

    fn memory_bytes(&self) -> usize {
        Carbonyl4Sketch::memory_bytes(self)
    }

    fn avg_search_steps(&self) -> f64 {
        self.stats().avg_steps()
    }
}
