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

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_distr::{Distribution, Exp, Normal};
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::entry::{Key, SimUpdate, UpdateKind};
use crate::error::{Error, Result};
use crate::hash::mix64;

pub const DEFAULT_UNIVERSE: usize = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ValueDist {
    /// Exponential with the given mean.
    Exp { mean: f64 },
    Normal { mean: f64, sd: f64 },
}

impl ValueDist {
    fn validate(&self) -> Result<()> {
        match *self {
            ValueDist::Exp { mean } if !(mean.is_finite() && mean > 0.0) => {
                Err(Error::param(format!("exponential mean must be positive, got {mean}")))
            }
            ValueDist::Normal { mean, sd } if !(mean.is_finite() && sd.is_finite() && sd > 0.0) => {
                Err(Error::param(format!("normal needs finite mean and positive sd, got {mean},{sd}")))
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for ValueDist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValueDist::Exp { mean } => write!(f, "exp:{mean}"),
            ValueDist::Normal { mean, sd } => write!(f, "normal:{mean},{sd}"),
        }
    }
}

/// Parses `exp:MEAN` or `normal:MEAN,SD`.
impl FromStr for ValueDist {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::param(format!("bad distribution `{s}` (expected exp:MEAN or normal:MEAN,SD)"));
        let (name, args) = s.split_once(':').ok_or_else(bad)?;
        let nums: Vec<f64> = args
            .split(',')
            .map(|x| x.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| bad())?;
        let dist = match (name, nums.as_slice()) {
            ("exp", &[mean]) => ValueDist::Exp { mean },
            ("normal", &[mean, sd]) => ValueDist::Normal { mean, sd },
            _ => return Err(bad()),
        };
        dist.validate()?;
        Ok(dist)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticSpec {
    pub items: usize,
    /// Number of distinct keys the Zipf law ranges over.
    pub universe: usize,
    pub zipf_alpha: f64,
    /// Probability that an item is a set.
    pub set_ratio: f64,
    pub set_dist: ValueDist,
    pub inc_dist: ValueDist,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            items: 1_000_000,
            universe: DEFAULT_UNIVERSE,
            zipf_alpha: 0.9,
            set_ratio: 0.5,
            set_dist: ValueDist::Exp { mean: 10.0 },
            inc_dist: ValueDist::Normal { mean: 0.0, sd: 10.0 },
            seed: 0,
        }
    }
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        if self.universe == 0 {
            return Err(Error::param("key universe must be nonempty"));
        }
        if !(self.zipf_alpha.is_finite() && self.zipf_alpha >= 0.0) {
            return Err(Error::param(format!("zipf alpha must be non-negative, got {}", self.zipf_alpha)));
        }
        if !(0.0..=1.0).contains(&self.set_ratio) {
            return Err(Error::param(format!("set ratio must lie in [0, 1], got {}", self.set_ratio)));
        }
        self.set_dist.validate()?;
        self.inc_dist.validate()
    }

    /// Key assigned to popularity rank `rank` (1-based).
    pub fn key_for_rank(rank: usize) -> Key {
        mix64(rank as u64)
    }
}

/// Cumulative Zipf weights over ranks `1..=n`.
#[derive(Clone, Debug)]
pub struct ZipfTable {
    cdf: Vec<f64>,
}

impl ZipfTable {
    pub fn new(n: usize, alpha: f64) -> Self {
        let mut cdf = Vec::with_capacity(n);
        let mut acc = 0.0;
        for r in 1..=n {
            acc += (r as f64).powf(-alpha);
            cdf.push(acc);
        }
        for c in &mut cdf {
            *c /= acc;
        }
        ZipfTable { cdf }
    }

    /// 1-based rank.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        self.cdf.partition_point(|&c| c <= u).min(self.cdf.len() - 1) + 1
    }
}

enum Sampler {
    Exp(Exp<f64>),
    Normal(Normal<f64>),
}

impl Sampler {
    fn new(d: ValueDist) -> Self {
        match d {
            ValueDist::Exp { mean } => Sampler::Exp(Exp::new(1.0 / mean).expect("validated")),
            ValueDist::Normal { mean, sd } => Sampler::Normal(Normal::new(mean, sd).expect("validated")),
        }
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Sampler::Exp(e) => loop {
                let v = e.sample(rng);
                if v > 0.0 {
                    break v;
                }
            },
            Sampler::Normal(n) => n.sample(rng),
        }
    }
}

/// Iterator over a synthetic SIM stream. Per item it draws, in order, the
/// operation kind, the key rank and the value.
pub struct SyntheticStream {
    remaining: usize,
    set_ratio: f64,
    zipf: Arc<ZipfTable>,
    set_values: Sampler,
    inc_values: Sampler,
    rng: Xoshiro256PlusPlus,
}

impl SyntheticStream {
    pub fn new(spec: &SyntheticSpec) -> Result<Self> {
        spec.validate()?;
        Ok(Self::with_table(spec, Arc::new(ZipfTable::new(spec.universe, spec.zipf_alpha))))
    }

    /// Reuses a precomputed rank table, which must match `spec.universe` and
    /// `spec.zipf_alpha`.
    pub fn with_table(spec: &SyntheticSpec, zipf: Arc<ZipfTable>) -> Self {
        SyntheticStream {
            remaining: spec.items,
            set_ratio: spec.set_ratio,
            zipf,
            set_values: Sampler::new(spec.set_dist),
            inc_values: Sampler::new(spec.inc_dist),
            rng: Xoshiro256PlusPlus::seed_from_u64(spec.seed),
        }
    }
}

impl Iterator for SyntheticStream {
    type Item = SimUpdate;

    fn next(&mut self) -> Option<SimUpdate> {
        if self.remaining == 0 {
            return None;
        }
        self.remaining -= 1;
        let kind = if self.rng.random::<f64>() < self.set_ratio {
            UpdateKind::Set
        } else {
            UpdateKind::Increment
        };
        let key = SyntheticSpec::key_for_rank(self.zipf.sample(&mut self.rng));
        let value = match kind {
            UpdateKind::Set => self.set_values.sample(&mut self.rng),
            UpdateKind::Increment => self.inc_values.sample(&mut self.rng),
        };
        Some(SimUpdate { kind, key, value })
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        (self.remaining, Some(self.remaining))
    }
}

pub fn gen_synthetic(spec: &SyntheticSpec) -> Result<Vec<SimUpdate>> {
    Ok(SyntheticStream::new(spec)?.collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(items: usize) -> SyntheticSpec {
        SyntheticSpec {
            items,
            seed: 42,
            ..Default::default()
        }
    }

    #[test]
    fn same_seed_same_stream() {
        let a = gen_synthetic(&spec(5_000)).unwrap();
        let b = gen_synthetic(&spec(5_000)).unwrap();
        assert_eq!(a, b);
        let c = gen_synthetic(&SyntheticSpec { seed: 43, ..spec(5_000) }).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn set_fraction_concentrates() {
        let s = gen_synthetic(&spec(1_000_000)).unwrap();
        let sets = s.iter().filter(|u| u.kind == UpdateKind::Set).count();
        let frac = sets as f64 / s.len() as f64;
        // 6 binomial standard errors at n = 10⁶ is 0.003
        assert!((frac - 0.5).abs() < 0.003, "{frac}");
    }

    #[test]
    fn set_values_have_mean_ten() {
        let s = gen_synthetic(&SyntheticSpec {
            set_ratio: 1.0,
            ..spec(1_000_000)
        })
        .unwrap();
        assert!(s.iter().all(|u| u.value > 0.0 && u.value.is_finite()));
        let mean = s.iter().map(|u| u.value).sum::<f64>() / s.len() as f64;
        // sd of the mean is 10/1000 = 0.01
        assert!((mean - 10.0).abs() < 0.1, "{mean}");
    }

    #[test]
    fn zipf_rank_ratio() {
        let table = ZipfTable::new(DEFAULT_UNIVERSE, 0.9);
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(7);
        let (mut r1, mut r2) = (0u64, 0u64);
        for _ in 0..1_000_000 {
            match table.sample(&mut rng) {
                1 => r1 += 1,
                2 => r2 += 1,
                _ => {}
            }
        }
        let ratio = r1 as f64 / r2 as f64;
        let expected = 2f64.powf(0.9);
        assert!((ratio / expected - 1.0).abs() < 0.1, "{ratio} vs {expected}");
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(SyntheticStream::new(&SyntheticSpec { set_ratio: 1.5, ..spec(10) }).is_err());
        assert!(SyntheticStream::new(&SyntheticSpec { universe: 0, ..spec(10) }).is_err());
        assert!(SyntheticStream::new(&SyntheticSpec {
            set_dist: ValueDist::Exp { mean: -1.0 },
            ..spec(10)
        })
        .is_err());
    }

    #[test]
    fn parses_distributions() {
        assert_eq!("exp:10".parse::<ValueDist>().unwrap(), ValueDist::Exp { mean: 10.0 });
        assert_eq!(
            "normal:0,10".parse::<ValueDist>().unwrap(),
            ValueDist::Normal { mean: 0.0, sd: 10.0 }
        );
        assert!("normal:0".parse::<ValueDist>().is_err());
        assert!("gamma:1,2".parse::<ValueDist>().is_err());
        assert!("exp:0".parse::<ValueDist>().is_err());
    }
}
