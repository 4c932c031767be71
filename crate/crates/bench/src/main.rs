// SPDX-License-Identifier: MIT
use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use mnarfci::config::{ExperimentConfig, Missingness};
use mnarfci::experiment::{run_experiment, search_options, summarize};
use mnarfci::format::{graph_to_text, parse_graph, read_dataset, read_decisions, system_to_text, write_dataset, write_decisions};
use mnarfci::verify::{compare, negative_control, verify_soundness, VerifyConfig};
use mnarfci_core::metrics::ScoreReport;
use mnarfci_core::synth::{generate_dag, sample_sem, Mechanism, MissingnessPlan};
use mnarfci_core::{search, CITester, CausalSystem, Mode, SampleSource, Strategy};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "mnarfci", version, about = "Causal discovery with test-wise deletion under missing data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate one dataset with missing values and its ground truth.
    Generate(GenerateArgs),
    /// Run a replicated benchmark and write CSV results.
    Run(RunArgs),
    /// Check oracle-level soundness of the wrapper or heuristic strategy.
    Verify(VerifyArgs),
    /// Score a learned graph against a target graph.
    Score(ScoreArgs),
    /// Learn a PAG from a CSV dataset.
    Learn(LearnArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum MissingnessArg {
    Mnar,
    Mar,
    Mcar,
    None,
}

impl From<MissingnessArg> for Missingness {
    fn from(m: MissingnessArg) -> Self {
        match m {
            MissingnessArg::Mnar => Missingness::Mnar,
            MissingnessArg::Mar => Missingness::Mar,
            MissingnessArg::Mcar => Missingness::Mcar,
            MissingnessArg::None => Missingness::None,
        }
    }
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    Mode::from_name(s).ok_or_else(|| format!("unknown algorithm `{s}` (fci, rfci)"))
}

fn parse_strategy(s: &str) -> Result<Strategy, String> {
    Strategy::from_name(s).ok_or_else(|| format!("unknown strategy `{s}`"))
}

fn parse_range<T: std::str::FromStr>(s: &str) -> Result<[T; 2], String> {
    let (a, b) = s.split_once(',').ok_or("expected `lo,hi`")?;
    let p = |x: &str| x.trim().parse::<T>().map_err(|_| format!("bad bound `{x}`"));
    Ok([p(a)?, p(b)?])
}

/// Generator flags; unset flags keep the config-file or default value.
#[derive(Args, Clone, Default)]
struct GenFlags {
    #[arg(long)]
    p: Option<usize>,
    #[arg(long)]
    expected_neighbors: Option<f64>,
    /// Latent confounder count range, `lo,hi`.
    #[arg(long, value_parser = parse_range::<usize>)]
    latent_confounders: Option<[usize; 2]>,
    /// Missingness driver count range, `lo,hi`.
    #[arg(long, value_parser = parse_range::<usize>)]
    missingness_drivers: Option<[usize; 2]>,
    /// Targets per driver range, `lo,hi`.
    #[arg(long, value_parser = parse_range::<usize>)]
    vars_per_driver: Option<[usize; 2]>,
    /// Removal quantile range, `lo,hi`.
    #[arg(long, value_parser = parse_range::<f64>)]
    r_range: Option<[f64; 2]>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    missingness: Option<MissingnessArg>,
}

impl GenFlags {
    fn apply(&self, cfg: &mut ExperimentConfig) {
        if let Some(v) = self.p {
            cfg.p = v;
        }
        if let Some(v) = self.expected_neighbors {
            cfg.expected_neighbors = v;
        }
        if let Some(v) = self.latent_confounders {
            cfg.latent_confounders = v;
        }
        if let Some(v) = self.missingness_drivers {
            cfg.missingness_drivers = v;
        }
        if let Some(v) = self.vars_per_driver {
            cfg.vars_per_driver = v;
        }
        if let Some(v) = self.r_range {
            cfg.r_range = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.missingness {
            cfg.missingness = v.into();
        }
    }
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    gen: GenFlags,
    /// Number of samples.
    #[arg(long, default_value_t = 500)]
    n: usize,
    /// Output directory for data.csv and truth.json.
    #[arg(long, default_value = "generated")]
    out: PathBuf,
    /// Write the ground-truth manifest next to the data.
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    emit_truth: bool,
}

#[derive(Args)]
struct RunArgs {
    /// JSON experiment configuration; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    gen: GenFlags,
    #[arg(long, value_delimiter = ',')]
    sample_sizes: Option<Vec<usize>>,
    #[arg(long)]
    n_replicates: Option<usize>,
    #[arg(long, value_delimiter = ',', value_parser = parse_mode)]
    algorithms: Option<Vec<Mode>>,
    #[arg(long, value_delimiter = ',', value_parser = parse_strategy)]
    strategies: Option<Vec<Strategy>>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    max_cond_size: Option<usize>,
    #[arg(long)]
    selection_rules: bool,
    #[arg(long, action = clap::ArgAction::Set)]
    emit_truth: Option<bool>,
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 100)]
    n_systems: usize,
    #[arg(long, default_value_t = 6)]
    p_min: usize,
    #[arg(long, default_value_t = 10)]
    p_max: usize,
    /// mnar or mar checks the wrapper, mcar the heuristic strategy.
    #[arg(long, value_enum, default_value = "mnar")]
    missingness: MissingnessArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Check the assumption-violating control system instead; a mismatch
    /// there is expected.
    #[arg(long)]
    negative_control: bool,
    /// Write the report as JSON.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct ScoreArgs {
    #[arg(long)]
    learned: PathBuf,
    #[arg(long)]
    target: PathBuf,
    /// Decision log of the learned run.
    #[arg(long)]
    log: Option<PathBuf>,
    /// Baseline decision log for the sample gain.
    #[arg(long)]
    baseline: Option<PathBuf>,
    #[arg(long, value_parser = parse_strategy, default_value = "wrapper")]
    strategy: Strategy,
}

#[derive(Args)]
struct LearnArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long, value_parser = parse_mode, default_value = "fci")]
    algorithm: Mode,
    #[arg(long, value_parser = parse_strategy, default_value = "wrapper")]
    strategy: Strategy,
    #[arg(long, default_value_t = 0.01)]
    alpha: f64,
    #[arg(long)]
    max_cond_size: Option<usize>,
    #[arg(long)]
    selection_rules: bool,
    /// Output directory for pag.txt, pag.json and decisions.csv.
    #[arg(long, default_value = "learned")]
    out: PathBuf,
}

#[derive(Serialize)]
struct Manifest {
    seed: u64,
    n: usize,
    config: ExperimentConfig,
    columns: Vec<String>,
    /// Ground-truth system in the text graph format.
    system: String,
}

fn generate(args: GenerateArgs) -> anyhow::Result<()> {
    let mut cfg = ExperimentConfig::default();
    args.gen.apply(&mut cfg);
    let gen = cfg.gen_config(cfg.seed);
    let mut rng = gen.rng();
    let model = generate_dag(&gen, &mut rng)?;
    let complete = sample_sem(&model, args.n, &mut rng)?;
    let (data, sys) = match cfg.missingness.mechanism() {
        Some(m) => MissingnessPlan::draw(m, &model, &gen, &mut rng)?.apply(&model, &complete, &mut rng)?,
        None => (complete, CausalSystem::fully_observed(model.dag())),
    };
    fs::create_dir_all(&args.out)?;
    write_dataset(&data, BufWriter::new(File::create(args.out.join("data.csv"))?))?;
    if args.emit_truth {
        let manifest = Manifest {
            seed: cfg.seed,
            n: args.n,
            columns: data.names().to_vec(),
            system: system_to_text(&sys),
            config: cfg,
        };
        serde_json::to_writer_pretty(BufWriter::new(File::create(args.out.join("truth.json"))?), &manifest)?;
    }
    println!("wrote {} rows x {} columns to {}", data.n_rows(), data.n_cols(), args.out.display());
    Ok(())
}

fn run(args: RunArgs) -> anyhow::Result<()> {
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::from_json(&fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?)?,
        None => ExperimentConfig::default(),
    };
    args.gen.apply(&mut cfg);
    if let Some(v) = args.sample_sizes {
        cfg.sample_sizes = v;
    }
    if let Some(v) = args.n_replicates {
        cfg.n_replicates = v;
    }
    if let Some(v) = args.algorithms {
        cfg.algorithms = v;
    }
    if let Some(v) = args.strategies {
        cfg.strategies = v;
    }
    if let Some(v) = args.alpha {
        cfg.alpha = v;
    }
    if args.max_cond_size.is_some() {
        cfg.max_cond_size = args.max_cond_size;
    }
    cfg.selection_rules |= args.selection_rules;
    if let Some(v) = args.emit_truth {
        cfg.emit_truth = v;
    }
    if let Some(v) = args.output_dir {
        cfg.output_dir = v;
    }
    let records = run_experiment(&cfg)?;
    for s in summarize(&records) {
        let gain = s.mean_pct_sample_gain.map(|g| format!("{g:.1}%")).unwrap_or_else(|| "-".into());
        println!(
            "{:<4} {:<9} n={:<5} shd={:>6.2} skel={:>6.2} gain={}",
            s.algorithm.name(),
            s.strategy.name(),
            s.n,
            s.mean_shd,
            s.mean_skeleton_shd,
            gain
        );
    }
    println!("results in {}", cfg.output_dir.display());
    Ok(())
}

fn verify(args: VerifyArgs) -> anyhow::Result<bool> {
    let mechanism = match Missingness::from(args.missingness).mechanism() {
        Some(m) => m,
        None => bail!("verification needs a missingness mechanism"),
    };
    if args.negative_control {
        let sys = negative_control();
        let mismatch = compare(&sys, Mechanism::Mnar, Mode::Fci)?;
        println!(
            "negative control (assumption holds: {}): {}",
            sys.check_assumption1(),
            if mismatch.is_some() { "mismatch, as expected" } else { "no mismatch" }
        );
        return Ok(mismatch.is_some());
    }
    let cfg = VerifyConfig {
        n_systems: args.n_systems,
        p_min: args.p_min,
        p_max: args.p_max,
        mechanism,
        seed: args.seed,
        ..VerifyConfig::default()
    };
    let report = verify_soundness(&cfg)?;
    if let Some(path) = &args.report {
        serde_json::to_writer_pretty(BufWriter::new(File::create(path)?), &report)?;
    }
    for c in &report.counterexamples {
        eprintln!("counterexample: system {} (seed {}, p {}) under {}", c.index, c.seed, c.p, c.algorithm.name());
        eprintln!("{}", c.system);
    }
    println!("checked {} systems, {} counterexamples", report.checked, report.counterexamples.len());
    Ok(report.passed())
}

fn score(args: ScoreArgs) -> anyhow::Result<()> {
    let learned = parse_graph(&fs::read_to_string(&args.learned)?)?;
    let target = parse_graph(&fs::read_to_string(&args.target)?)?;
    let read_log = |p: &PathBuf| -> anyhow::Result<_> { Ok(read_decisions(BufReader::new(File::open(p)?))?) };
    let log = args.log.as_ref().map(read_log).transpose()?.unwrap_or_default();
    let baseline = args.baseline.as_ref().map(read_log).transpose()?;
    let report = ScoreReport::new(&learned, &target, args.strategy, &log, baseline.as_deref())?;
    let out = serde_json::json!({
        "shd": report.shd,
        "skeleton_shd": report.skeleton_shd,
        "avg_effective_n": report.avg_effective_n,
        "n_queries": report.n_queries,
        "pct_sample_gain": report.pct_sample_gain,
    });
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(())
}

#[derive(Serialize)]
struct EdgeJson {
    i: usize,
    j: usize,
    mark_i: char,
    mark_j: char,
}

#[derive(Serialize)]
struct PagJson {
    variables: Vec<String>,
    edges: Vec<EdgeJson>,
    sepsets: Vec<(usize, usize, Vec<usize>)>,
    queries: BTreeMap<Strategy, usize>,
    truncated: bool,
}

fn learn(args: LearnArgs) -> anyhow::Result<()> {
    let data = read_dataset(BufReader::new(File::open(&args.data).with_context(|| format!("opening {}", args.data.display()))?))?;
    let cfg = ExperimentConfig { max_cond_size: args.max_cond_size, selection_rules: args.selection_rules, ..Default::default() };
    let opts = search_options(&cfg, args.algorithm);
    let mut ci = CITester::new(SampleSource::new(&data, args.alpha)?, args.strategy)?;
    let pag = search(&mut ci, &opts);
    let log = ci.take_log();
    let mut queries = BTreeMap::new();
    for d in &log {
        *queries.entry(d.strategy).or_insert(0) += 1;
    }
    let summary = PagJson {
        variables: data.names().to_vec(),
        edges: pag
            .graph
            .edges()
            .map(|e| EdgeJson { i: e.first, j: e.second, mark_i: e.mark_first.code(), mark_j: e.mark_second.code() })
            .collect(),
        sepsets: pag.sepsets.iter().map(|((i, j), w)| (i, j, w.to_vec())).collect(),
        queries,
        truncated: pag.truncated,
    };
    fs::create_dir_all(&args.out)?;
    fs::write(args.out.join("pag.txt"), graph_to_text(&pag.graph))?;
    serde_json::to_writer_pretty(BufWriter::new(File::create(args.out.join("pag.json"))?), &summary)?;
    write_decisions(&log, BufWriter::new(File::create(args.out.join("decisions.csv"))?))?;
    println!("{} edges, {} queries; written to {}", pag.graph.edge_count(), log.len(), args.out.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(a) => generate(a).map(|_| true),
        Command::Run(a) => run(a).map(|_| true),
        Command::Verify(a) => verify(a),
        Command::Score(a) => score(a).map(|_| true),
        Command::Learn(a) => learn(a).map(|_| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
