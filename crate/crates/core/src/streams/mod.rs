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

//! Workload sources: synthetic generation, flowlet derivation from
//! timestamped traces, and CSV trace files.

mod flowlet;
mod synthetic;
mod trace;

pub use flowlet::{derive_sim, TimestampedRecord, DEFAULT_FLOWLET_GAP_NS};
pub use synthetic::{gen_synthetic, SyntheticSpec, SyntheticStream, ValueDist, ZipfTable, DEFAULT_UNIVERSE};
pub use trace::{
    read_records, read_updates, read_updates_from, write_records, write_updates, write_updates_to,
};
