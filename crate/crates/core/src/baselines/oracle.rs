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

use std::collections::HashMap;

use crate::entry::{Key, SimUpdate, UpdateKind};
use crate::estimator::{top_by_magnitude, Estimator};

/// Exact per-key values and the stream's L1 norm.
#[derive(Clone, Debug, Default)]
pub struct ExactOracle {
    values: HashMap<Key, f64>,
    l1_norm: f64,
    key_bytes: usize,
    value_bytes: usize,
}

impl ExactOracle {
    pub fn new() -> Self {
        ExactOracle {
            key_bytes: 4,
            value_bytes: 4,
            ..Default::default()
        }
    }

    pub fn from_stream<'a>(stream: impl IntoIterator<Item = &'a SimUpdate>) -> Self {
        let mut oracle = ExactOracle::new();
        for u in stream {
            oracle.apply(u);
        }
        oracle
    }

    pub fn value(&self, key: Key) -> f64 {
        self.values.get(&key).copied().unwrap_or(0.0)
    }

    /// Sum of `|v|` over every processed update.
    pub fn l1_norm(&self) -> f64 {
        self.l1_norm
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Every key that has appeared, in ascending order.
    pub fn keys_sorted(&self) -> Vec<Key> {
        let mut keys: Vec<Key> = self.values.keys().copied().collect();
        keys.sort_unstable();
        keys
    }

    pub fn iter(&self) -> impl Iterator<Item = (Key, f64)> + '_ {
        self.values.iter().map(|(&k, &v)| (k, v))
    }
}

impl Estimator for ExactOracle {
    fn name(&self) -> &'static str {
        "oracle"
    }

    fn apply(&mut self, update: &SimUpdate) {
        let slot = self.values.entry(update.key).or_insert(0.0);
        match update.kind {
            UpdateKind::Set => *slot = update.value,
            UpdateKind::Increment => *slot += update.value,
        }
        self.l1_norm += update.value.abs();
    }

    fn point_query(&self, key: Key) -> f64 {
        self.value(key)
    }

    fn topk(&self, k: usize) -> Vec<(Key, f64)> {
        top_by_magnitude(self.iter(), k)
    }

    fn memory_bytes(&self) -> usize {
        self.values.len() * (self.key_bytes + self.value_bytes)
    }
}
