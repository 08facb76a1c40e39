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

//! Unbiased merging of two signed entries.

use rand::Rng;

use crate::entry::Entry;

/// Collapses two occupied entries into one.
///
/// With probability `|a| / (|a| + |b|)` the result carries `a.key`, otherwise
/// `b.key`; either way its magnitude is `|a| + |b|` and its sign is the sign of
/// the winner's value, so each key's expected value is preserved. The variance
/// added (the merge cost) is `2|a||b|`.
///
/// Two zero-valued entries merge deterministically into `a` with value zero and
/// consume no randomness.
pub fn merge_pm<R: Rng + ?Sized>(a: Entry, b: Entry, rng: &mut R) -> Entry {
    debug_assert!(a.occupied && b.occupied);
    let (ma, mb) = (a.value.abs(), b.value.abs());
    let total = ma + mb;
    if total == 0.0 {
        return Entry::new(a.key, 0.0);
    }
    let p = ma / total;
    let winner = if rng.random::<f64>() < p { a } else { b };
    let merged = Entry::new(winner.key, total.copysign(winner.value));
    debug_assert_eq!(merged.value.abs(), total);
    merged
}

/// Variance introduced by merging entries of magnitudes `a` and `b`.
#[inline]
pub fn merge_cost(a: f64, b: f64) -> f64 {
    2.0 * a * b
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_xoshiro::Xoshiro256PlusPlus;

    #[test]
    fn zero_partner_always_loses() {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(1);
        for _ in 0..1000 {
            let m = merge_pm(Entry::new(1, 5.0), Entry::new(2, 0.0), &mut rng);
            assert_eq!(m, Entry::new(1, 5.0));
            let m = merge_pm(Entry::new(2, 0.0), Entry::new(1, -5.0), &mut rng);
            assert_eq!(m, Entry::new(1, -5.0));
        }
    }

    #[test]
    fn double_zero_is_deterministic() {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(1);
        let before = rng.clone();
        let m = merge_pm(Entry::new(7, 0.0), Entry::new(8, 0.0), &mut rng);
        assert_eq!(m, Entry::new(7, 0.0));
        assert_eq!(rng, before);
    }

    #[test]
    fn signs_follow_the_winner() {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(9);
        let (mut saw_a, mut saw_b) = (false, false);
        for _ in 0..200 {
            let m = merge_pm(Entry::new(1, 3.0), Entry::new(2, -4.0), &mut rng);
            match m.key {
                1 => {
                    assert_eq!(m.value, 7.0);
                    saw_a = true;
                }
                2 => {
                    assert_eq!(m.value, -7.0);
                    saw_b = true;
                }
                _ => unreachable!(),
            }
        }
        assert!(saw_a && saw_b);
    }

    #[test]
    fn pair_variance_matches_cost() {
        // Exact enumeration: (3/7)·((7-3)² + 4²) + (4/7)·(3² + (-7+4)²) = 24.
        let exact = 3.0 / 7.0 * (16.0 + 16.0) + 4.0 / 7.0 * (9.0 + 9.0);
        assert!((exact - merge_cost(3.0, 4.0)).abs() < 1e-12);

        let mut rng = Xoshiro256PlusPlus::seed_from_u64(123);
        let n = 200_000;
        let mut sum_a = 0.0;
        let mut sq = 0.0;
        for _ in 0..n {
            let m = merge_pm(Entry::new(1, 3.0), Entry::new(2, -4.0), &mut rng);
            let (qa, qb) = if m.key == 1 { (m.value, 0.0) } else { (0.0, m.value) };
            sum_a += qa;
            sq += (qa - 3.0).powi(2) + (qb + 4.0).powi(2);
        }
        let mean_a = sum_a / n as f64;
        // sd of Q(a) is sqrt(3·4) ≈ 3.46
        assert!((mean_a - 3.0).abs() < 4.0 * 3.47 / (n as f64).sqrt());
        assert!((sq / n as f64 - 24.0).abs() < 0.24);
    }
}
