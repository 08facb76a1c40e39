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

use std::time::Instant;

use carbonyl::experiment::{run_experiment, ExperimentConfig, QueryPlan, SketchKind, Workload};
use carbonyl::metrics::measure_insert_mops;
use carbonyl::streams::{derive_sim, gen_synthetic, SyntheticSpec, TimestampedRecord};
use carbonyl::{Carbonyl4Sketch, Estimator, SimUpdate, SketchParams};

fn best_mops(stream: &[SimUpdate], params: &SketchParams, runs: usize) -> f64 {
    (0..runs)
        .map(|_| {
            let mut s = Carbonyl4Sketch::new(params.clone()).unwrap();
            measure_insert_mops(&mut s, stream).unwrap()
        })
        .fold(0.0, f64::max)
}

#[test]
fn no_cascade_inserts_fastest() {
    let stream = gen_synthetic(&SyntheticSpec {
        items: 300_000,
        seed: 1,
        ..Default::default()
    })
    .unwrap();
    let base = SketchParams::new(2048).with_seed(1);
    let m0 = best_mops(&stream, &base.clone().with_max_steps(0), 3);
    let m30 = best_mops(&stream, &base.with_max_steps(30), 3);
    assert!(m0 > 0.0 && m30 > 0.0);
    assert!(m0 >= m30, "M=0 {m0} Mops vs M=30 {m30} Mops");
}

#[test]
fn insert_time_scales_linearly() {
    // Overwrites of resident keys cost the same at every point in the stream.
    let stream: Vec<SimUpdate> = (0..400_000u64).map(|i| SimUpdate::set(i % 1000, i as f64)).collect();
    let params = SketchParams::new(4096).with_seed(2);
    let time = |n: usize| {
        (0..5)
            .map(|_| {
                let mut s = Carbonyl4Sketch::new(params.clone()).unwrap();
                let t = Instant::now();
                for u in &stream[..n] {
                    s.apply(std::hint::black_box(u));
                }
                std::hint::black_box(&s);
                t.elapsed().as_secs_f64()
            })
            .fold(f64::INFINITY, f64::min)
    };
    let ratio = time(400_000) / time(200_000);
    assert!((1.0..=3.0).contains(&ratio), "elapsed ratio {ratio}");
}

#[test]
fn worker_count_does_not_change_results() {
    let wl = Workload::synthetic(&SyntheticSpec {
        items: 50_000,
        seed: 3,
        ..Default::default()
    })
    .unwrap();
    let cfg = |threads| ExperimentConfig {
        memory_bytes: 64 << 10,
        trials: 4,
        threads: Some(threads),
        query: QueryPlan::Subset { count: 200, size: 10 },
        ..Default::default()
    };
    let a = run_experiment(&cfg(1), &wl).unwrap();
    let b = run_experiment(&cfg(3), &wl).unwrap();
    for (x, y) in a.trials.iter().zip(&b.trials) {
        assert_eq!((x.seed, x.are, x.aae, x.mse, x.recall), (y.seed, y.are, y.aae, y.mse, y.recall));
    }
    assert_eq!(a.trials.iter().map(|t| t.seed).collect::<Vec<_>>(), vec![0, 1, 2, 3]);
}

#[test]
fn baselines_share_the_harness() {
    let wl = Workload::synthetic(&SyntheticSpec {
        items: 50_000,
        seed: 4,
        ..Default::default()
    })
    .unwrap();
    for kind in [SketchKind::Carbonyl4, SketchKind::Coco, SketchKind::Cuckoo, SketchKind::Oracle] {
        let cfg = ExperimentConfig {
            sketch: kind,
            memory_bytes: 128 << 10,
            query: QueryPlan::TopK { k: 100 },
            ..Default::default()
        };
        let r = run_experiment(&cfg, &wl).unwrap().mean;
        assert_eq!(r.sketch, kind.to_string());
        assert!(r.insert_mops > 0.0 && r.query_mops > 0.0);
        assert!((0.0..=1.0).contains(&r.recall));
        assert!(r.are.is_finite() && r.aae.is_finite() && r.mse.is_finite());
        if kind == SketchKind::Oracle {
            assert_eq!((r.aae, r.recall), (0.0, 1.0));
        }
    }
}

#[test]
fn flowlet_trace_feeds_the_sketch() {
    let mut records = Vec::new();
    for i in 0..20_000u64 {
        records.push(TimestampedRecord {
            key: i % 97,
            timestamp_ns: i * 40_000,
            size: 64.0 + (i % 13) as f64,
        });
    }
    let updates = derive_sim(&records, 1_000_000).unwrap();
    let wl = Workload::new(updates, None);
    let mut s = Carbonyl4Sketch::new(SketchParams::new(64)).unwrap();
    for u in wl.updates.iter() {
        Estimator::apply(&mut s, u);
    }
    // 97 keys fit without merging, so every estimate is exact.
    for &k in wl.keys.iter() {
        assert_eq!(s.point_query(k), wl.truth.value(k));
    }
}
