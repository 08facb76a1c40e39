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

//! Keys, values, slots and stream updates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Opaque item identifier. Zero is a legal key.
pub type Key = u64;

/// A single key/value slot. Occupancy is tracked explicitly, so an occupied
/// slot may legitimately hold the value `0.0`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Entry {
    pub key: Key,
    pub value: f64,
    pub occupied: bool,
}

impl Entry {
    pub const EMPTY: Entry = Entry {
        key: 0,
        value: 0.0,
        occupied: false,
    };

    #[inline]
    pub fn new(key: Key, value: f64) -> Self {
        Entry {
            key,
            value,
            occupied: true,
        }
    }

    #[inline]
    pub fn abs(&self) -> f64 {
        if self.occupied {
            self.value.abs()
        } else {
            0.0
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UpdateKind {
    /// `:=` overwrites the current value.
    Set,
    /// `+=` adds to the current value.
    #[serde(rename = "inc")]
    Increment,
}

/// One operation of a set-increment mixed stream.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimUpdate {
    pub kind: UpdateKind,
    pub key: Key,
    pub value: f64,
}

impl SimUpdate {
    pub fn set(key: Key, value: f64) -> Self {
        SimUpdate {
            kind: UpdateKind::Set,
            key,
            value,
        }
    }

    pub fn inc(key: Key, value: f64) -> Self {
        SimUpdate {
            kind: UpdateKind::Increment,
            key,
            value,
        }
    }

    /// Builds an update, rejecting NaN and infinities.
    pub fn try_new(kind: UpdateKind, key: Key, value: f64) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::Validation(format!(
                "value for key {key} is not finite: {value}"
            )));
        }
        Ok(SimUpdate { kind, key, value })
    }
}
