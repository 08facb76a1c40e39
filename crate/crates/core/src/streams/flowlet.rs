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
use crate::error::{Error, Result};

/// One millisecond.
pub const DEFAULT_FLOWLET_GAP_NS: u64 = 1_000_000;

/// A keyed, timestamped measurement such as a packet.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimestampedRecord {
    pub key: Key,
    pub timestamp_ns: u64,
    pub size: f64,
}

/// Turns a time-ordered trace into a SIM stream. The first record of each
/// flowlet (a key's first record, or one arriving more than `gap_ns` after
/// that key's previous record) becomes a set of its size; the rest become
/// increments.
pub fn derive_sim(records: &[TimestampedRecord], gap_ns: u64) -> Result<Vec<SimUpdate>> {
    let mut last_seen: HashMap<Key, u64> = HashMap::new();
    let mut out = Vec::with_capacity(records.len());
    let mut prev_ts = 0;
    for (i, r) in records.iter().enumerate() {
        if r.timestamp_ns < prev_ts {
            return Err(Error::Validation(format!(
                "record {i} is out of order ({} after {prev_ts})",
                r.timestamp_ns
            )));
        }
        prev_ts = r.timestamp_ns;
        let starts_flowlet = match last_seen.insert(r.key, r.timestamp_ns) {
            None => true,
            Some(t) => r.timestamp_ns - t > gap_ns,
        };
        out.push(SimUpdate::try_new(
            if starts_flowlet {
                UpdateKind::Set
            } else {
                UpdateKind::Increment
            },
            r.key,
            r.size,
        )?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entry::UpdateKind::{self, Increment as Inc, Set};

    fn rec(key: Key, t: u64) -> TimestampedRecord {
        TimestampedRecord {
            key,
            timestamp_ns: t,
            size: 100.0,
        }
    }

    fn kinds(s: &[SimUpdate]) -> Vec<UpdateKind> {
        s.iter().map(|u| u.kind).collect()
    }

    #[test]
    fn gap_threshold() {
        let ms = 1_000_000;
        let recs = [rec(1, 0), rec(1, ms / 2), rec(1, ms / 2 + 2 * ms)];
        assert_eq!(kinds(&derive_sim(&recs, ms).unwrap()), vec![Set, Inc, Set]);
    }

    #[test]
    fn exactly_the_gap_is_same_flowlet() {
        let recs = [rec(1, 0), rec(1, 1000)];
        assert_eq!(kinds(&derive_sim(&recs, 1000).unwrap()), vec![Set, Inc]);
    }

    #[test]
    fn single_record() {
        let u = derive_sim(&[rec(9, 5)], 10).unwrap();
        assert_eq!(u, vec![SimUpdate::set(9, 100.0)]);
    }

    #[test]
    fn keys_have_independent_clocks() {
        let recs = [rec(1, 0), rec(2, 5), rec(1, 8), rec(2, 30), rec(1, 40)];
        assert_eq!(kinds(&derive_sim(&recs, 10).unwrap()), vec![Set, Set, Inc, Set, Set]);
    }

    #[test]
    fn unsorted_input_is_rejected() {
        assert!(matches!(
            derive_sim(&[rec(1, 10), rec(2, 5)], 10),
            Err(Error::Validation(_))
        ));
    }
}
