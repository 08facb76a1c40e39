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

//! Ground truth and comparison structures.

mod coco;
mod cuckoo;
mod oracle;

pub use coco::CocoStar;
pub use cuckoo::{CuckooTable, DEFAULT_KICK_LIMIT, DEFAULT_SLOTS};
pub use oracle::ExactOracle;
