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

//! `carbonyl`: generate SIM workloads, run the sketch and its baselines
//! against exact answers, shrink, and sweep parameters.
//!
//! Exit codes: 0 on success, 2 for bad flags or invalid input, 1 for I/O
//! failures. `SIMSKETCH_THREADS` caps the number of trial workers.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use carbonyl::experiment::{
    run_experiment, run_shrink, run_sweep, AxisSpec, ExperimentConfig, QueryPlan, SketchKind, Workload,
};
use carbonyl::metrics::{write_csv, MetricsReport};
use carbonyl::streams::{gen_synthetic, read_updates, write_updates, SyntheticSpec, ValueDist, DEFAULT_UNIVERSE};
use carbonyl::{Error, RebuildPolicy, ShrinkMode};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "carbonyl", version, about = "Key-value sketching for mixed Set/Increment streams")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic Zipf SIM trace as `op,key,value` CSV.
    Generate {
        #[command(flatten)]
        synth: SynthArgs,
        #[arg(short = 'o', long)]
        output: PathBuf,
    },
    /// Stream a workload through one structure and score it.
    Run {
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        exp: ExpArgs,
        /// JSON summary path (stdout when absent).
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
        /// Per-trial, mean and sd rows.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Build at `--memory`, halve the sketch, and score both states.
    Shrink {
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        exp: ExpArgs,
        #[arg(long, default_value = "resample")]
        mode: String,
        /// Stop probability for the rebuild mode (defaults to `--p-eps`).
        #[arg(long)]
        rebuild_p_eps: Option<f64>,
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
    /// Run the cartesian product of `--axis NAME=v1,v2,...` and write one
    /// mean row per cell.
    Sweep {
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        exp: ExpArgs,
        /// M, p_eps, d, set_ratio, zipf_alpha or memory. Repeatable.
        #[arg(long = "axis", required = true)]
        axes: Vec<String>,
        /// CSV path (stdout when absent).
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 100_000)]
    items: usize,
    #[arg(long, default_value_t = DEFAULT_UNIVERSE)]
    universe: usize,
    #[arg(long, default_value_t = 0.9)]
    zipf_alpha: f64,
    #[arg(long, default_value_t = 0.5)]
    set_ratio: f64,
    #[arg(long, default_value = "exp:10")]
    set_dist: String,
    #[arg(long, default_value = "normal:0,10")]
    inc_dist: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl SynthArgs {
    fn spec(&self) -> Result<SyntheticSpec, Error> {
        let spec = SyntheticSpec {
            items: self.items,
            universe: self.universe,
            zipf_alpha: self.zipf_alpha,
            set_ratio: self.set_ratio,
            set_dist: self.set_dist.parse::<ValueDist>()?,
            inc_dist: self.inc_dist.parse::<ValueDist>()?,
            seed: self.seed,
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Args)]
struct SourceArgs {
    /// Existing `op,key,value` trace (optionally `.gz`). Synthetic when absent.
    #[arg(long)]
    trace: Option<PathBuf>,
    #[command(flatten)]
    synth: SynthArgs,
}

impl SourceArgs {
    fn load(&self) -> Result<Workload, Error> {
        match &self.trace {
            Some(path) => Ok(Workload::new(read_updates(path)?, None)),
            None => Workload::synthetic(&self.synth.spec()?),
        }
    }
}

#[derive(Args)]
struct ExpArgs {
    #[arg(long, default_value = "carbonyl4")]
    sketch: String,
    /// Bytes, or with a K/M suffix (powers of 1024).
    #[arg(long, default_value = "1M")]
    memory: String,
    #[arg(long, default_value_t = carbonyl::sketch::DEFAULT_D)]
    d: usize,
    #[arg(long = "M", default_value_t = carbonyl::sketch::DEFAULT_MAX_STEPS)]
    max_steps: usize,
    #[arg(long = "p-eps", default_value_t = carbonyl::sketch::DEFAULT_STOP_PROB)]
    p_eps: f64,
    /// point | subset:COUNTxSIZE | topk:K
    #[arg(long, default_value = "point")]
    query: String,
    /// K for the recall column when the query plan is not top-K.
    #[arg(long, default_value_t = carbonyl::experiment::DEFAULT_TOPK)]
    recall_k: usize,
    #[arg(long, default_value_t = 1)]
    trials: usize,
    /// Round the bucket count down to a power of two.
    #[arg(long)]
    shrinkable: bool,
    /// Seed for the structures under test (the workload uses its own `--seed`).
    #[arg(long)]
    sketch_seed: Option<u64>,
}

fn parse_memory(s: &str) -> Result<usize, Error> {
    let s = s.trim();
    let (digits, scale) = match s.as_bytes().last() {
        Some(b'K' | b'k') => (&s[..s.len() - 1], 1 << 10),
        Some(b'M' | b'm') => (&s[..s.len() - 1], 1 << 20),
        _ => (s, 1),
    };
    digits
        .parse::<usize>()
        .ok()
        .and_then(|n| n.checked_mul(scale))
        .ok_or_else(|| Error::Param(format!("bad memory size `{s}`")))
}

fn threads_from_env() -> Result<Option<usize>, Error> {
    match std::env::var("SIMSKETCH_THREADS") {
        Ok(v) => v
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .map(Some)
            .ok_or_else(|| Error::Param(format!("SIMSKETCH_THREADS must be a positive integer, got `{v}`"))),
        Err(_) => Ok(None),
    }
}

impl ExpArgs {
    fn config(&self, workload_seed: u64) -> Result<ExperimentConfig, Error> {
        let cfg = ExperimentConfig {
            sketch: self.sketch.parse::<SketchKind>()?,
            memory_bytes: parse_memory(&self.memory)?,
            d: self.d,
            max_steps: self.max_steps,
            stop_prob: self.p_eps,
            shrinkable: self.shrinkable,
            query: self.query.parse::<QueryPlan>()?,
            recall_k: self.recall_k,
            seed: self.sketch_seed.unwrap_or(workload_seed),
            trials: self.trials,
            threads: threads_from_env()?,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

fn open_out(path: Option<&PathBuf>) -> Result<Box<dyn Write>, Error> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn emit_json(path: Option<&PathBuf>, value: &impl serde::Serialize) -> Result<(), Error> {
    let mut out = open_out(path)?;
    serde_json::to_writer_pretty(&mut out, value).map_err(io::Error::from)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

fn emit_csv(path: Option<&PathBuf>, rows: &[MetricsReport]) -> Result<(), Error> {
    let mut out = open_out(path)?;
    write_csv(&mut out, rows)?;
    out.flush()?;
    Ok(())
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Generate { synth, output } => {
            let spec = synth.spec()?;
            write_updates(&output, &gen_synthetic(&spec)?)?;
        }
        Command::Run { source, exp, output, csv } => {
            let cfg = exp.config(source.synth.seed)?;
            let workload = source.load()?;
            let summary = run_experiment(&cfg, &workload)?;
            emit_json(output.as_ref(), &summary)?;
            if let Some(path) = csv {
                let mut rows = summary.trials.clone();
                rows.push(summary.mean.clone());
                rows.push(summary.sd.clone());
                emit_csv(Some(&path), &rows)?;
            }
        }
        Command::Shrink {
            source,
            exp,
            mode,
            rebuild_p_eps,
            output,
        } => {
            let cfg = exp.config(source.synth.seed)?;
            let mode: ShrinkMode = mode.parse()?;
            let policy = RebuildPolicy {
                stop_prob: Some(rebuild_p_eps.unwrap_or(cfg.stop_prob)),
                ..Default::default()
            };
            let workload = source.load()?;
            let reports = run_shrink(&cfg, &workload, mode, &policy)?;
            emit_json(output.as_ref(), &reports)?;
        }
        Command::Sweep { source, exp, axes, csv } => {
            let cfg = exp.config(source.synth.seed)?;
            let axes = axes
                .iter()
                .map(|a| a.parse::<AxisSpec>())
                .collect::<Result<Vec<_>, _>>()?;
            let workload = source.load()?;
            let rows = run_sweep(&cfg, &workload, &axes)?;
            emit_csv(csv.as_ref(), &rows)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Io(_) => ExitCode::from(1),
                _ => ExitCode::from(2),
            }
        }
    }
}
