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

use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::entry::{Entry, Key, SimUpdate, UpdateKind};
use crate::error::{Error, Result};
use crate::estimator::{top_by_magnitude, Estimator};
use crate::hash::hash_with;

pub const DEFAULT_SLOTS: usize = 4;
pub const DEFAULT_KICK_LIMIT: usize = 500;

const SALT_A: u64 = 0x243f_6a88_85a3_08d3;
const SALT_B: u64 = 0x1319_8a2e_0370_7344;

/// Bucketized cuckoo hash table with two choices and random-walk eviction.
/// Whatever is still homeless when the kick limit runs out is discarded.
#[derive(Clone, Debug)]
pub struct CuckooTable {
    slots: Vec<Entry>,
    buckets: usize,
    per_bucket: usize,
    kick_limit: usize,
    dropped: u64,
    seed: u64,
    entry_bytes: usize,
    rng: Xoshiro256PlusPlus,
}

impl CuckooTable {
    pub fn new(buckets: usize, per_bucket: usize, kick_limit: usize, seed: u64) -> Result<Self> {
        if buckets == 0 || per_bucket == 0 {
            return Err(Error::param("cuckoo table needs at least one slot"));
        }
        Ok(CuckooTable {
            slots: vec![Entry::EMPTY; buckets * per_bucket],
            buckets,
            per_bucket,
            kick_limit,
            dropped: 0,
            seed,
            entry_bytes: 8,
            rng: Xoshiro256PlusPlus::seed_from_u64(seed ^ 0x5eed),
        })
    }

    pub fn capacity(&self) -> usize {
        self.slots.len()
    }

    pub fn len(&self) -> usize {
        self.slots.iter().filter(|e| e.occupied).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn load_factor(&self) -> f64 {
        self.len() as f64 / self.capacity() as f64
    }

    fn candidates(&self, key: Key) -> (usize, usize) {
        let n = self.buckets as u64;
        (
            (hash_with(key, self.seed ^ SALT_A) % n) as usize,
            (hash_with(key, self.seed ^ SALT_B) % n) as usize,
        )
    }

    fn bucket(&self, b: usize) -> std::ops::Range<usize> {
        b * self.per_bucket..(b + 1) * self.per_bucket
    }

    fn locate(&self, key: Key) -> Option<usize> {
        let (a, b) = self.candidates(key);
        [a, b]
            .into_iter()
            .flat_map(|bk| self.bucket(bk))
            .find(|&i| self.slots[i].occupied && self.slots[i].key == key)
    }

    fn empty_in(&self, b: usize) -> Option<usize> {
        self.bucket(b).find(|&i| !self.slots[i].occupied)
    }

    fn insert(&mut self, entry: Entry) {
        let (a, b) = self.candidates(entry.key);
        if let Some(i) = self.empty_in(a).or_else(|| self.empty_in(b)) {
            self.slots[i] = entry;
            return;
        }
        let mut homeless = entry;
        let mut current = if self.rng.random::<bool>() { a } else { b };
        for _ in 0..self.kick_limit {
            let victim = current * self.per_bucket + self.rng.random_range(0..self.per_bucket);
            homeless = std::mem::replace(&mut self.slots[victim], homeless);
            let (x, y) = self.candidates(homeless.key);
            current = if current == x { y } else { x };
            if let Some(i) = self.empty_in(current) {
                self.slots[i] = homeless;
                return;
            }
        }
        self.dropped += 1;
    }
}

impl Estimator for CuckooTable {
    fn name(&self) -> &'static str {
        "cuckoo"
    }

    fn apply(&mut self, update: &SimUpdate) {
        if let Some(i) = self.locate(update.key) {
            match update.kind {
                UpdateKind::Set => self.slots[i].value = update.value,
                UpdateKind::Increment => self.slots[i].value += update.value,
            }
            return;
        }
        self.insert(Entry::new(update.key, update.value));
    }

    fn point_query(&self, key: Key) -> f64 {
        self.locate(key).map_or(0.0, |i| self.slots[i].value)
    }

    fn topk(&self, k: usize) -> Vec<(Key, f64)> {
        top_by_magnitude(
            self.slots.iter().filter(|e| e.occupied).map(|e| (e.key, e.value)),
            k,
        )
    }

    fn memory_bytes(&self) -> usize {
        self.slots.len() * self.entry_bytes
    }

    fn dropped(&self) -> u64 {
        self.dropped
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_then_inc_is_exact() {
        let mut t = CuckooTable::new(16, 4, 500, 1).unwrap();
        t.apply(&SimUpdate::set(5, 2.5));
        t.apply(&SimUpdate::inc(5, 1.0));
        assert_eq!(t.point_query(5), 3.5);
        assert_eq!(t.dropped(), 0);
    }

    #[test]
    fn overflow_without_kicks_drops_the_newcomer() {
        let mut t = CuckooTable::new(1, 1, 0, 1).unwrap();
        t.apply(&SimUpdate::set(1, 1.0));
        t.apply(&SimUpdate::set(2, 2.0));
        assert_eq!(t.dropped(), 1);
        assert_eq!(t.point_query(1), 1.0);
        assert_eq!(t.point_query(2), 0.0);
    }

    #[test]
    fn moderate_load_is_lossless() {
        let mut t = CuckooTable::new(1000, 4, 500, 3).unwrap();
        let n = 3760; // 94% of 4000 slots
        for k in 0..n {
            t.apply(&SimUpdate::set(k * 7919 + 1, k as f64));
        }
        assert_eq!(t.dropped(), 0);
        for k in 0..n {
            assert_eq!(t.point_query(k * 7919 + 1), k as f64);
        }
    }
}
