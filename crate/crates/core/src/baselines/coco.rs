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

use rand::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::entry::{Entry, Key, SimUpdate, UpdateKind};
use crate::error::{Error, Result};
use crate::estimator::{top_by_magnitude, Estimator};
use crate::hash::hash_with;
use crate::merge::merge_pm;

/// CocoSketch with set support: `rows × cols` cells, one hash per row. A key
/// is recorded in at most one of its hashed cells. Unrecorded keys compete
/// with the smallest hashed cell through the signed unbiased merge, so signed
/// real values are handled the same way as in the balance bucket.
#[derive(Clone, Debug)]
pub struct CocoStar {
    cells: Vec<Entry>,
    rows: usize,
    cols: usize,
    seed: u64,
    entry_bytes: usize,
    rng: Xoshiro256PlusPlus,
}

impl CocoStar {
    pub fn new(rows: usize, cols: usize, seed: u64) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::param("coco sketch needs at least one row and column"));
        }
        Ok(CocoStar {
            cells: vec![Entry::EMPTY; rows * cols],
            rows,
            cols,
            seed,
            entry_bytes: 8,
            rng: Xoshiro256PlusPlus::seed_from_u64(seed ^ 0xc0c0),
        })
    }

    #[inline]
    fn cell(&self, row: usize, key: Key) -> usize {
        let h = hash_with(key, self.seed ^ (row as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
        row * self.cols + (h % self.cols as u64) as usize
    }

    fn locate(&self, key: Key) -> Option<usize> {
        (0..self.rows)
            .map(|r| self.cell(r, key))
            .find(|&i| self.cells[i].occupied && self.cells[i].key == key)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }
}

impl Estimator for CocoStar {
    fn name(&self) -> &'static str {
        "coco"
    }

    fn apply(&mut self, update: &SimUpdate) {
        if let Some(i) = self.locate(update.key) {
            match update.kind {
                UpdateKind::Set => self.cells[i].value = update.value,
                UpdateKind::Increment => self.cells[i].value += update.value,
            }
            return;
        }
        let incoming = Entry::new(update.key, update.value);
        let mut target = None;
        let mut smallest = f64::INFINITY;
        for r in 0..self.rows {
            let i = self.cell(r, update.key);
            if !self.cells[i].occupied {
                self.cells[i] = incoming;
                return;
            }
            let m = self.cells[i].value.abs();
            if m < smallest {
                smallest = m;
                target = Some(i);
            }
        }
        let i = target.expect("at least one row");
        self.cells[i] = merge_pm(incoming, self.cells[i], &mut self.rng);
    }

    fn point_query(&self, key: Key) -> f64 {
        self.locate(key).map_or(0.0, |i| self.cells[i].value)
    }

    fn topk(&self, k: usize) -> Vec<(Key, f64)> {
        top_by_magnitude(
            self.cells.iter().filter(|e| e.occupied).map(|e| (e.key, e.value)),
            k,
        )
    }

    fn memory_bytes(&self) -> usize {
        self.cells.len() * self.entry_bytes
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recorded_key_is_overwritten() {
        let mut c = CocoStar::new(4, 8, 1).unwrap();
        c.apply(&SimUpdate::set(3, 10.0));
        c.apply(&SimUpdate::set(3, -2.0));
        assert_eq!(c.point_query(3), -2.0);
        c.apply(&SimUpdate::inc(3, 5.0));
        assert_eq!(c.point_query(3), 3.0);
    }

    #[test]
    fn absent_key_fills_empty_cell() {
        let mut c = CocoStar::new(4, 8, 1).unwrap();
        c.apply(&SimUpdate::inc(3, -1.5));
        assert_eq!(c.point_query(3), -1.5);
    }

    #[test]
    fn full_cells_merge_unbiasedly() {
        // One column per row: every key hashes to the same cell in each row.
        let trials = 20_000;
        let mut sum_new = 0.0;
        let mut sum_old = 0.0;
        for t in 0..trials {
            let mut c = CocoStar::new(2, 1, t).unwrap();
            c.apply(&SimUpdate::set(1, 4.0));
            c.apply(&SimUpdate::set(2, 6.0));
            c.apply(&SimUpdate::set(3, 2.0));
            sum_new += c.point_query(3);
            sum_old += c.point_query(1);
            assert_eq!(c.point_query(2), 6.0);
        }
        let (mean_new, mean_old) = (sum_new / trials as f64, sum_old / trials as f64);
        // Q(3) ∈ {0, 6} with p = 1/3: sd = 6·sqrt(2/9) ≈ 2.83
        let se = 2.83 / (trials as f64).sqrt();
        assert!((mean_new - 2.0).abs() < 4.0 * se, "{mean_new}");
        assert!((mean_old - 4.0).abs() < 4.0 * se, "{mean_old}");
    }
}
