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

//! Bucket hashing.
//!
//! Both bucket indices are a seeded 64-bit mix reduced modulo `w`. Because the
//! reduction is a plain modulus, halving `w` maps bucket `k + w/2` onto bucket
//! `k`, which is what in-place shrinking relies on. The two indices are allowed
//! to coincide; callers treat "alternate bucket == current bucket" as a dead end.

use crate::entry::Key;
use crate::error::{Error, Result};

const SALT_FIRST: u64 = 0x9e37_79b9_7f4a_7c15;
const SALT_SECOND: u64 = 0xc2b2_ae3d_27d4_eb4f;

/// SplitMix64 finalizer. A bijection on `u64`.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seeded 64-bit hash of a key.
#[inline]
pub fn hash_with(key: Key, salt: u64) -> u64 {
    let s = mix64(salt);
    mix64(mix64(key ^ s).wrapping_add(s))
}

/// Unchecked variant of [`hash_pair`] for hot paths; `w` must be nonzero.
#[inline]
pub(crate) fn bucket_pair(key: Key, w: usize, seed: u64) -> (usize, usize) {
    let w = w as u64;
    (
        (hash_with(key, seed ^ SALT_FIRST) % w) as usize,
        (hash_with(key, seed ^ SALT_SECOND) % w) as usize,
    )
}

/// The two hashed bucket indices of `key` in a sketch with `w` buckets.
pub fn hash_pair(key: Key, w: usize, seed: u64) -> Result<(usize, usize)> {
    if w < 2 {
        return Err(Error::param(format!("bucket count must be at least 2, got {w}")));
    }
    Ok(bucket_pair(key, w, seed))
}

/// The hashed bucket of `key` that is not `current`. Returns `current` itself
/// when both hashes collide.
#[inline]
pub(crate) fn alternate_bucket(key: Key, current: usize, w: usize, seed: u64) -> usize {
    let (a, b) = bucket_pair(key, w, seed);
    if a == current {
        b
    } else {
        a
    }
}
