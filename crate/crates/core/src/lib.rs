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

//! An unbiased key-value sketch for streams that mix overwrites (`key := v`)
//! and increments (`key += v`) over signed real values.
//!
//! The sketch ([`Carbonyl4Sketch`]) keeps `w` buckets of `d` key/value slots.
//! Each key hashes to two buckets. When both are full, a cascading overflow
//! walk looks for the cheapest unbiased merge over a chain of buckets instead
//! of settling for the cheapest merge inside one bucket. Every point, subset
//! and top-K estimate is unbiased, and the sketch can be halved in place.
//!
//! The crate also carries the comparison structures ([`baselines`]), workload
//! generators and trace I/O ([`streams`]), accuracy metrics ([`metrics`]) and
//! the experiment driver used by the `carbonyl` CLI ([`experiment`]).
//!
//! ```
//! use carbonyl::{Carbonyl4Sketch, SketchParams, SimUpdate};
//!
//! let mut sketch = Carbonyl4Sketch::new(SketchParams::new(1024).with_seed(7)).unwrap();
//! sketch.apply(&SimUpdate::set(42, 5.0));
//! sketch.apply(&SimUpdate::inc(42, -2.0));
//! assert_eq!(sketch.point_query(42), 3.0);
//! ```

pub mod baselines;
pub mod bucket;
pub mod entry;
pub mod error;
pub mod estimator;
pub mod experiment;
pub mod hash;
pub mod merge;
pub mod metrics;
pub mod resize;
pub mod sketch;
pub mod streams;

pub use bucket::{BalanceBucket, MergePlan, PlanKind};
pub use entry::{Entry, Key, SimUpdate, UpdateKind};
pub use error::{Error, Result};
pub use estimator::Estimator;
pub use hash::hash_pair;
pub use merge::merge_pm;
pub use resize::{merge_pair_heuristic, merge_pair_resample, rebuild, RebuildPolicy, ShrinkMode};
pub use sketch::{Carbonyl4Sketch, PathStep, SearchOutcome, SearchStats, SketchParams, SketchRng};
