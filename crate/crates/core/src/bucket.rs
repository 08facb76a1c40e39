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

//! The Balance Bucket: a fixed array of `d` slots that, once full, chooses
//! between folding the incoming entry into its smallest slot and folding its
//! two smallest slots together to make room.

use rand::Rng;

use crate::entry::{Entry, Key};
use crate::merge::{merge_cost, merge_pm};

/// What to do with an incoming entry at a given bucket.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PlanKind {
    /// Store into an unoccupied slot.
    FillEmpty { slot: usize },
    /// Merge the incoming entry with the smallest slot.
    MergeIncomingWithSmallest { slot: usize },
    /// Merge the two smallest slots into `second`, store the incoming entry in `smallest`.
    MergeTwoSmallest { second: usize, smallest: usize },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MergePlan {
    pub kind: PlanKind,
    pub cost: f64,
}

impl MergePlan {
    /// The slot whose current occupant leaves the bucket if the incoming entry
    /// is kicked in instead of merged.
    pub fn displaced_slot(&self) -> usize {
        match self.kind {
            PlanKind::FillEmpty { slot } => slot,
            PlanKind::MergeIncomingWithSmallest { slot } => slot,
            PlanKind::MergeTwoSmallest { smallest, .. } => smallest,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BalanceBucket {
    entries: Box<[Entry]>,
}

impl BalanceBucket {
    /// # Panics
    ///
    /// If `d < 2`.
    pub fn new(d: usize) -> Self {
        assert!(d >= 2, "a balance bucket needs at least two slots, got {d}");
        BalanceBucket {
            entries: vec![Entry::EMPTY; d].into_boxed_slice(),
        }
    }

    /// Builds a bucket from explicit slots. Panics on fewer than two slots or a
    /// key that occupies more than one slot.
    pub fn from_entries(entries: Vec<Entry>) -> Self {
        assert!(entries.len() >= 2);
        for (i, a) in entries.iter().enumerate() {
            for b in &entries[i + 1..] {
                assert!(
                    !(a.occupied && b.occupied && a.key == b.key),
                    "duplicate key {} in bucket",
                    a.key
                );
            }
        }
        BalanceBucket {
            entries: entries.into_boxed_slice(),
        }
    }

    #[inline]
    pub fn d(&self) -> usize {
        self.entries.len()
    }

    #[inline]
    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    #[inline]
    pub(crate) fn entries_mut(&mut self) -> &mut [Entry] {
        &mut self.entries
    }

    pub fn occupied(&self) -> impl Iterator<Item = &Entry> {
        self.entries.iter().filter(|e| e.occupied)
    }

    pub fn occupied_count(&self) -> usize {
        self.occupied().count()
    }

    pub fn is_full(&self) -> bool {
        self.entries.iter().all(|e| e.occupied)
    }

    pub fn abs_mass(&self) -> f64 {
        self.entries.iter().map(Entry::abs).sum()
    }

    #[inline]
    pub fn find(&self, key: Key) -> Option<usize> {
        self.entries.iter().position(|e| e.occupied && e.key == key)
    }

    #[inline]
    pub fn first_empty(&self) -> Option<usize> {
        self.entries.iter().position(|e| !e.occupied)
    }

    pub fn point_query(&self, key: Key) -> f64 {
        self.find(key).map_or(0.0, |i| self.entries[i].value)
    }

    /// Slots of the smallest and second-smallest magnitudes, as
    /// `(smallest, second)`. Among equal magnitudes the lower slot index ranks
    /// as larger. Only meaningful for a full bucket.
    pub fn two_smallest(&self) -> (usize, usize) {
        let e = &self.entries;
        let (mut smallest, mut second) = if e[1].value.abs() <= e[0].value.abs() {
            (1, 0)
        } else {
            (0, 1)
        };
        for i in 2..e.len() {
            let m = e[i].value.abs();
            if m <= e[smallest].value.abs() {
                second = smallest;
                smallest = i;
            } else if m <= e[second].value.abs() {
                second = i;
            }
        }
        (smallest, second)
    }

    /// Cheapest way to absorb an incoming entry of magnitude `incoming_abs`.
    pub fn local_min_plan(&self, incoming_abs: f64) -> MergePlan {
        if let Some(slot) = self.first_empty() {
            return MergePlan {
                kind: PlanKind::FillEmpty { slot },
                cost: 0.0,
            };
        }
        let (smallest, second) = self.two_smallest();
        let small = self.entries[smallest].value.abs();
        let penultimate = self.entries[second].value.abs();
        if incoming_abs <= penultimate {
            MergePlan {
                kind: PlanKind::MergeIncomingWithSmallest { slot: smallest },
                cost: merge_cost(incoming_abs, small),
            }
        } else {
            MergePlan {
                kind: PlanKind::MergeTwoSmallest { second, smallest },
                cost: merge_cost(small, penultimate),
            }
        }
    }

    /// Executes a plan produced by [`local_min_plan`](Self::local_min_plan) on
    /// the current, unchanged contents of this bucket.
    pub fn apply_plan<R: Rng + ?Sized>(&mut self, plan: &MergePlan, incoming: Entry, rng: &mut R) {
        let e = &mut self.entries;
        match plan.kind {
            PlanKind::FillEmpty { slot } => {
                debug_assert!(!e[slot].occupied);
                e[slot] = incoming;
            }
            PlanKind::MergeIncomingWithSmallest { slot } => {
                e[slot] = merge_pm(incoming, e[slot], rng);
            }
            PlanKind::MergeTwoSmallest { second, smallest } => {
                e[second] = merge_pm(e[second], e[smallest], rng);
                e[smallest] = incoming;
            }
        }
    }

    /// `key := value`.
    pub fn set<R: Rng + ?Sized>(&mut self, key: Key, value: f64, rng: &mut R) {
        if let Some(i) = self.find(key) {
            self.entries[i].value = value;
            return;
        }
        self.insert_absent(key, value, rng);
    }

    /// `key += value`. A key whose value cancels to zero stays resident.
    pub fn inc<R: Rng + ?Sized>(&mut self, key: Key, value: f64, rng: &mut R) {
        if let Some(i) = self.find(key) {
            self.entries[i].value += value;
            return;
        }
        self.insert_absent(key, value, rng);
    }

    fn insert_absent<R: Rng + ?Sized>(&mut self, key: Key, value: f64, rng: &mut R) {
        let plan = self.local_min_plan(value.abs());
        self.apply_plan(&plan, Entry::new(key, value), rng);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_xoshiro::Xoshiro256PlusPlus;

    fn bucket(values: &[(Key, f64)]) -> BalanceBucket {
        BalanceBucket::from_entries(values.iter().map(|&(k, v)| Entry::new(k, v)).collect())
    }

    fn rng() -> Xoshiro256PlusPlus {
        Xoshiro256PlusPlus::seed_from_u64(17)
    }

    #[test]
    fn plan_merges_two_smallest_when_incoming_is_large() {
        let b = bucket(&[(1, 9.0), (2, -4.0), (3, 2.0), (4, -1.0)]);
        let plan = b.local_min_plan(3.0);
        assert_eq!(plan.kind, PlanKind::MergeTwoSmallest { second: 2, smallest: 3 });
        assert_eq!(plan.cost, 4.0);
    }

    #[test]
    fn plan_merges_incoming_when_small() {
        let b = bucket(&[(1, 9.0), (2, -4.0), (3, 2.0), (4, -1.0)]);
        let plan = b.local_min_plan(1.5);
        assert_eq!(plan.kind, PlanKind::MergeIncomingWithSmallest { slot: 3 });
        assert_eq!(plan.cost, 3.0);
    }

    #[test]
    fn plan_boundary_uses_less_or_equal() {
        let b = bucket(&[(1, 9.0), (2, -4.0), (3, 2.0), (4, -1.0)]);
        assert!(matches!(
            b.local_min_plan(2.0).kind,
            PlanKind::MergeIncomingWithSmallest { slot: 3 }
        ));
    }

    #[test]
    fn plan_prefers_empty_slot() {
        let mut b = BalanceBucket::new(4);
        b.entries_mut()[0] = Entry::new(1, 9.0);
        b.entries_mut()[2] = Entry::new(2, 1.0);
        let plan = b.local_min_plan(1e9);
        assert_eq!(plan.kind, PlanKind::FillEmpty { slot: 1 });
        assert_eq!(plan.cost, 0.0);
    }

    #[test]
    fn ties_rank_lower_index_as_larger() {
        let b = bucket(&[(1, 2.0), (2, 2.0), (3, 2.0), (4, 5.0)]);
        assert_eq!(b.two_smallest(), (2, 1));
        let b = bucket(&[(1, 3.0), (2, 3.0)]);
        assert_eq!(b.two_smallest(), (1, 0));
    }

    #[test]
    fn set_overwrites_resident_key() {
        let mut b = bucket(&[(10, 5.0), (20, 2.0)]);
        b.set(10, -3.0, &mut rng());
        assert_eq!(b, bucket(&[(10, -3.0), (20, 2.0)]));
    }

    #[test]
    fn set_small_value_merges_into_smallest() {
        // [x=5, y=2], z := 1  →  y-slot becomes z=3 (p = 1/3) or y=3.
        let mut r = rng();
        let mut z_wins = 0;
        let n = 30_000;
        for _ in 0..n {
            let mut b = bucket(&[(10, 5.0), (20, 2.0)]);
            b.set(30, 1.0, &mut r);
            assert_eq!(b.entries()[0], Entry::new(10, 5.0));
            let slot = b.entries()[1];
            assert_eq!(slot.value, 3.0);
            match slot.key {
                30 => z_wins += 1,
                20 => {}
                k => panic!("unexpected key {k}"),
            }
        }
        let p = z_wins as f64 / n as f64;
        let se = (1.0 / 3.0 * 2.0 / 3.0 / n as f64).sqrt();
        assert!((p - 1.0 / 3.0).abs() < 4.0 * se, "{p}");
    }

    #[test]
    fn set_large_value_merges_the_two_smallest() {
        let mut r = rng();
        for _ in 0..100 {
            let mut b = bucket(&[(10, 5.0), (20, 2.0)]);
            b.set(30, 10.0, &mut r);
            // Slot 0 holds the merge of x and y, slot 1 the new entry.
            let merged = b.entries()[0];
            assert!(merged.key == 10 || merged.key == 20);
            assert_eq!(merged.value, 7.0);
            assert_eq!(b.entries()[1], Entry::new(30, 10.0));
        }
    }

    #[test]
    fn dropped_key_queries_zero() {
        let mut r = rng();
        let mut dropped = 0;
        for _ in 0..300 {
            let mut b = bucket(&[(10, 5.0), (20, 2.0)]);
            b.set(30, 1.0, &mut r);
            if b.find(30).is_none() {
                assert_eq!(b.point_query(30), 0.0);
                dropped += 1;
            }
        }
        assert!(dropped > 0);
    }

    #[test]
    fn inc_adds_in_place() {
        let mut b = BalanceBucket::new(2);
        b.set(10, 5.0, &mut rng());
        b.inc(10, 2.0, &mut rng());
        assert_eq!(b.entries(), &[Entry::new(10, 7.0), Entry::EMPTY]);
    }

    #[test]
    fn inc_absent_fills_empty() {
        let mut b = BalanceBucket::new(2);
        b.set(10, 5.0, &mut rng());
        b.inc(30, -1.0, &mut rng());
        assert_eq!(b.entries(), &[Entry::new(10, 5.0), Entry::new(30, -1.0)]);
    }

    #[test]
    fn inc_to_zero_keeps_key_resident() {
        let mut b = bucket(&[(10, 5.0), (20, -5.0)]);
        b.inc(10, -5.0, &mut rng());
        assert_eq!(b.entries(), &[Entry::new(10, 0.0), Entry::new(20, -5.0)]);
        assert_eq!(b.find(10), Some(0));
    }

    #[test]
    #[should_panic]
    fn single_slot_bucket_is_rejected() {
        BalanceBucket::new(1);
    }

    #[test]
    fn squared_error_stays_under_the_bound() {
        use std::collections::HashMap;
        let mut gen = Xoshiro256PlusPlus::seed_from_u64(3);
        let d = 4;
        let stream: Vec<(bool, Key, f64)> = (0..120)
            .map(|_| (gen.random::<bool>(), gen.random_range(0..30), gen.random::<f64>() * 10.0 - 4.0))
            .collect();
        let mut truth: HashMap<Key, f64> = HashMap::new();
        let mut l1 = 0.0;
        for &(set, k, v) in &stream {
            l1 += v.abs();
            let r = truth.entry(k).or_insert(0.0);
            if set {
                *r = v;
            } else {
                *r += v;
            }
        }
        let trials = 10_000;
        let mut total = 0.0;
        for t in 0..trials {
            let mut r = Xoshiro256PlusPlus::seed_from_u64(t);
            let mut b = BalanceBucket::new(d);
            for &(set, k, v) in &stream {
                if set {
                    b.set(k, v, &mut r);
                } else {
                    b.inc(k, v, &mut r);
                }
            }
            total += truth.iter().map(|(&k, &v)| (b.point_query(k) - v).powi(2)).sum::<f64>();
        }
        let mean = total / trials as f64;
        assert!(mean <= 2.0 * l1 * l1 / d as f64, "{mean} vs {}", 2.0 * l1 * l1 / d as f64);
    }
}
