// SPDX-License-Identifier: MIT
//! Replicated benchmark runs.
//!
//! Replicate `r` draws its seed from stream `r` of the master seed, builds a
//! model and a missingness plan from it, then samples each sample size from
//! its own stream. The target graph of each algorithm is that algorithm run
//! with a d-separation oracle conditioning on `S_l` (MNAR, MCAR) or on the
//! selection variables alone (MAR, none).

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::{Duration, Instant};

use mnarfci_core::metrics::{mean_effective_n, ScoreReport};
use mnarfci_core::synth::{generate_dag, sample_sem, stream_rng, MissingnessPlan};
use mnarfci_core::{
    search, CIDecision, CITester, CausalSystem, Mode, Pag, RuleSet, SampleSource, SearchOptions, Strategy,
    SystemOracle,
};
use rand::RngCore;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ExperimentConfig, Missingness};
use crate::error::Result;
use crate::format::{graph_to_text, system_to_text};

/// Seed of replicate `r` under master seed `master`.
pub fn replicate_seed(master: u64, r: usize) -> u64 {
    stream_rng(master, r as u64).next_u64()
}

pub fn search_options(cfg: &ExperimentConfig, mode: Mode) -> SearchOptions {
    SearchOptions {
        max_cond_size: cfg.max_cond_size,
        rules: RuleSet { r5_r7: cfg.selection_rules, ..RuleSet::default() },
        mode,
        ..SearchOptions::fci()
    }
}

/// Selection set the target graph conditions on.
pub fn target_selection(sys: &CausalSystem, missingness: Missingness) -> Vec<usize> {
    match missingness {
        Missingness::Mnar | Missingness::Mcar => sys.list_wise_selection(),
        Missingness::Mar | Missingness::None => sys.selection().to_vec(),
    }
}

/// Scores of one (replicate, sample size, algorithm, strategy) run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunScore {
    pub report: ScoreReport,
    /// Queries logged under the run's own strategy.
    pub queries: usize,
    /// List-wise confirmations issued by a wrapper run.
    pub confirmations: usize,
    pub avg_effective_n: Option<f64>,
    pub degenerate: usize,
    pub truncated: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub replicate: usize,
    pub seed: u64,
    pub config_hash: String,
    pub n: usize,
    pub algorithm: Mode,
    pub strategy: Strategy,
    /// Error message of a failed replicate.
    pub outcome: std::result::Result<RunScore, String>,
    pub wall_time: Duration,
}

/// Ground truth of one replicate, written as a manifest.
#[derive(Debug, Clone, Serialize)]
pub struct Truth {
    pub replicate: usize,
    pub seed: u64,
    pub config_hash: String,
    pub missingness: Missingness,
    pub system: String,
    pub targets: BTreeMap<Mode, String>,
}

struct Learned {
    strategy: Strategy,
    pag: Pag,
    log: Vec<CIDecision>,
    wall_time: Duration,
}

fn learn(data: &mnarfci_core::Dataset, alpha: f64, strategy: Strategy, opts: &SearchOptions) -> Result<Learned> {
    let start = Instant::now();
    let mut ci = CITester::new(SampleSource::new(data, alpha)?, strategy)?;
    let pag = search(&mut ci, opts);
    Ok(Learned { strategy, pag, log: ci.take_log(), wall_time: start.elapsed() })
}

fn score(run: &Learned, target: &Pag, baseline: Option<&[CIDecision]>) -> Result<RunScore> {
    let own: Vec<CIDecision> = run.log.iter().filter(|d| d.strategy == run.strategy).cloned().collect();
    Ok(RunScore {
        report: ScoreReport::new(&run.pag.graph, &target.graph, run.strategy, &run.log, baseline)?,
        queries: own.len(),
        confirmations: run.log.len() - own.len(),
        avg_effective_n: mean_effective_n(&own),
        degenerate: run.log.iter().filter(|d| d.degenerate).count(),
        truncated: run.pag.truncated,
    })
}

fn replicate(cfg: &ExperimentConfig, hash: &str, r: usize) -> (Vec<RunRecord>, Option<Truth>) {
    let seed = replicate_seed(cfg.seed, r);
    let record = |n, algorithm, strategy, outcome, wall_time| RunRecord {
        replicate: r,
        seed,
        config_hash: hash.to_owned(),
        n,
        algorithm,
        strategy,
        outcome,
        wall_time,
    };
    match replicate_inner(cfg, seed, r, hash) {
        Ok((rows, truth)) => {
            let records = rows.into_iter().map(|(n, a, s, o, t)| record(n, a, s, Ok(o), t)).collect();
            (records, Some(truth))
        }
        Err(e) => {
            let mut records = Vec::new();
            for &n in &cfg.sample_sizes {
                for &a in &cfg.algorithms {
                    for &s in &cfg.strategies {
                        records.push(record(n, a, s, Err(e.to_string()), Duration::ZERO));
                    }
                }
            }
            (records, None)
        }
    }
}

type Row = (usize, Mode, Strategy, RunScore, Duration);

fn replicate_inner(cfg: &ExperimentConfig, seed: u64, r: usize, hash: &str) -> Result<(Vec<Row>, Truth)> {
    let gen = cfg.gen_config(seed);
    let mut rng = gen.rng();
    let model = generate_dag(&gen, &mut rng)?;
    let plan = cfg.missingness.mechanism().map(|m| MissingnessPlan::draw(m, &model, &gen, &mut rng)).transpose()?;
    let sys = match &plan {
        Some(p) => p.system(&model),
        None => CausalSystem::fully_observed(model.dag()),
    };
    let sel = target_selection(&sys, cfg.missingness);

    let mut targets = BTreeMap::new();
    let mut target_logs = BTreeMap::new();
    for &a in &cfg.algorithms {
        let start = Instant::now();
        let mut ci = CITester::new(SystemOracle::fixed(&sys, sel.clone()), Strategy::Oracle)?;
        let pag = search(&mut ci, &search_options(cfg, a));
        let log = ci.take_log();
        target_logs.insert(a, Learned { strategy: Strategy::Oracle, pag: pag.clone(), log, wall_time: start.elapsed() });
        targets.insert(a, pag);
    }

    let mut rows = Vec::new();
    for (k, &n) in cfg.sample_sizes.iter().enumerate() {
        let mut data_rng = stream_rng(seed, k as u64 + 1);
        let complete = sample_sem(&model, n, &mut data_rng)?;
        let data = match &plan {
            Some(p) => p.apply(&model, &complete, &mut data_rng)?.0,
            None => complete,
        };
        for &a in &cfg.algorithms {
            let opts = search_options(cfg, a);
            let mut runs = Vec::new();
            for &s in &cfg.strategies {
                if s == Strategy::Oracle {
                    continue;
                }
                runs.push(learn(&data, cfg.alpha, s, &opts)?);
            }
            let baseline: Option<Vec<CIDecision>> = runs
                .iter()
                .find(|l| l.strategy == Strategy::ListWise)
                .map(|l| l.log.iter().filter(|d| d.strategy == Strategy::ListWise).cloned().collect());
            for &s in &cfg.strategies {
                let run = match s {
                    Strategy::Oracle => &target_logs[&a],
                    _ => runs.iter().find(|l| l.strategy == s).expect("run for every strategy"),
                };
                rows.push((n, a, s, score(run, &targets[&a], baseline.as_deref())?, run.wall_time));
            }
        }
    }
    let truth = Truth {
        replicate: r,
        seed,
        config_hash: hash.to_owned(),
        missingness: cfg.missingness,
        system: system_to_text(&sys),
        targets: targets.iter().map(|(&a, p)| (a, graph_to_text(&p.graph))).collect(),
    };
    Ok((rows, truth))
}

/// Runs every replicate in parallel without touching the file system.
/// Records come back sorted by replicate, then sample size, algorithm and
/// strategy in configuration order.
pub fn execute(cfg: &ExperimentConfig) -> Result<(Vec<RunRecord>, Vec<Truth>)> {
    cfg.validate()?;
    let hash = cfg.hash();
    let parts: Vec<(Vec<RunRecord>, Option<Truth>)> =
        (0..cfg.n_replicates).into_par_iter().map(|r| replicate(cfg, &hash, r)).collect();
    let mut records = Vec::new();
    let mut truths = Vec::new();
    for (rows, truth) in parts {
        records.extend(rows);
        truths.extend(truth);
    }
    Ok((records, truths))
}

/// Runs the experiment and writes `results.csv`, `summary.csv`,
/// `timings.csv` and, if enabled, `truth/replicate_<r>.json` under the
/// output directory.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<RunRecord>> {
    let (records, truths) = execute(cfg)?;
    let dir = &cfg.output_dir;
    fs::create_dir_all(dir)?;
    write_results(&records, cfg.missingness, File::create(dir.join("results.csv"))?)?;
    write_summary(&summarize(&records), File::create(dir.join("summary.csv"))?)?;
    write_timings(&records, File::create(dir.join("timings.csv"))?)?;
    fs::write(dir.join("config.json"), serde_json::to_string_pretty(cfg)?)?;
    if cfg.emit_truth {
        write_truths(&truths, &dir.join("truth"))?;
    }
    Ok(records)
}

fn write_truths(truths: &[Truth], dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    for t in truths {
        let f = BufWriter::new(File::create(dir.join(format!("replicate_{:04}.json", t.replicate)))?);
        serde_json::to_writer_pretty(f, t)?;
    }
    Ok(())
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.6}")).unwrap_or_default()
}

/// Column set of `results.csv`.
pub const RESULTS_HEADER: [&str; 17] = [
    "replicate",
    "seed",
    "config_hash",
    "missingness",
    "n",
    "algorithm",
    "strategy",
    "status",
    "shd",
    "skeleton_shd",
    "queries",
    "confirmations",
    "avg_effective_n",
    "pct_sample_gain",
    "degenerate",
    "truncated",
    "error",
];

pub fn write_results<W: Write>(records: &[RunRecord], missingness: Missingness, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(RESULTS_HEADER)?;
    for r in records {
        let mut row = vec![
            r.replicate.to_string(),
            r.seed.to_string(),
            r.config_hash.clone(),
            missingness.name().to_owned(),
            r.n.to_string(),
            r.algorithm.name().to_owned(),
            r.strategy.name().to_owned(),
        ];
        match &r.outcome {
            Ok(s) => row.extend([
                "ok".to_owned(),
                s.report.shd.to_string(),
                s.report.skeleton_shd.to_string(),
                s.queries.to_string(),
                s.confirmations.to_string(),
                fmt_opt(s.avg_effective_n),
                fmt_opt(s.report.pct_sample_gain),
                s.degenerate.to_string(),
                s.truncated.to_string(),
                String::new(),
            ]),
            Err(e) => {
                row.push("failed".to_owned());
                row.extend(std::iter::repeat(String::new()).take(8));
                row.push(e.clone());
            }
        }
        out.write_record(&row)?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_timings<W: Write>(records: &[RunRecord], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["replicate", "n", "algorithm", "strategy", "wall_ms"])?;
    for r in records {
        out.write_record([
            r.replicate.to_string(),
            r.n.to_string(),
            r.algorithm.name().to_owned(),
            r.strategy.name().to_owned(),
            format!("{:.3}", r.wall_time.as_secs_f64() * 1e3),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// Means over the successful replicates of one (algorithm, strategy, n).
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub algorithm: Mode,
    pub strategy: Strategy,
    pub n: usize,
    pub replicates: usize,
    pub failed: usize,
    pub mean_shd: f64,
    pub mean_skeleton_shd: f64,
    pub mean_effective_n: Option<f64>,
    pub mean_pct_sample_gain: Option<f64>,
}

fn mean(xs: impl Iterator<Item = f64>) -> Option<f64> {
    let (s, c) = xs.fold((0.0, 0usize), |(s, c), x| (s + x, c + 1));
    (c > 0).then(|| s / c as f64)
}

pub fn summarize(records: &[RunRecord]) -> Vec<SummaryRow> {
    let mut groups: BTreeMap<(Mode, Strategy, usize), Vec<&RunRecord>> = BTreeMap::new();
    for r in records {
        groups.entry((r.algorithm, r.strategy, r.n)).or_default().push(r);
    }
    groups
        .into_iter()
        .map(|((algorithm, strategy, n), rs)| {
            let ok: Vec<&RunScore> = rs.iter().filter_map(|r| r.outcome.as_ref().ok()).collect();
            SummaryRow {
                algorithm,
                strategy,
                n,
                replicates: ok.len(),
                failed: rs.len() - ok.len(),
                mean_shd: mean(ok.iter().map(|s| s.report.shd as f64)).unwrap_or(f64::NAN),
                mean_skeleton_shd: mean(ok.iter().map(|s| s.report.skeleton_shd as f64)).unwrap_or(f64::NAN),
                mean_effective_n: mean(ok.iter().filter_map(|s| s.avg_effective_n)),
                mean_pct_sample_gain: mean(ok.iter().filter_map(|s| s.report.pct_sample_gain)),
            }
        })
        .collect()
}

pub fn write_summary<W: Write>(rows: &[SummaryRow], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record([
        "algorithm",
        "strategy",
        "n",
        "replicates",
        "failed",
        "mean_shd",
        "mean_skeleton_shd",
        "mean_effective_n",
        "mean_pct_sample_gain",
    ])?;
    for s in rows {
        out.write_record([
            s.algorithm.name().to_owned(),
            s.strategy.name().to_owned(),
            s.n.to_string(),
            s.replicates.to_string(),
            s.failed.to_string(),
            format!("{:.6}", s.mean_shd),
            format!("{:.6}", s.mean_skeleton_shd),
            fmt_opt(s.mean_effective_n),
            fmt_opt(s.mean_pct_sample_gain),
        ])?;
    }
    out.flush()?;
    Ok(())
}
