//! `mute` command line: gen, baseline, train, eval, weights, perturb, synth.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

use crate::baseline::{hadamard, one_hot, random_k_hot};
use crate::codebook::Codebook;
use crate::error::{Error, Result};
use crate::nn::{
    evaluate_with, loss_trace_csv, synthetic_digits, train, BlobSpec, Dataset, DecodeRule,
    MlpModel, TrainConfig,
};
use crate::objective::{min_pairwise_distance, weighted_objective};
use crate::optimizer::{
    exact_search, lp_model, local_search, weighted_shuffle, MinDistanceFloor, OptimizerConfig,
    Weights,
};
use crate::perturb::PerturbationSpec;
use crate::report::{AccuracyRow, RunReport};
use crate::similarity::{confusion_to_weights, estimate_confusion, ConfusionMatrix, DEFAULT_FLOOR};
use crate::weights::WeightMatrix;

pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_DIVERGENCE: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "mute", version, about = "Multi-hot target codebooks and a small training harness")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Optimize a K-hot codebook.
    Gen(GenArgs),
    /// Write a one-hot, Hadamard or random codebook.
    Baseline(BaselineArgs),
    /// Train a network against a codebook.
    Train(TrainArgs),
    /// Evaluate a trained network on clean and perturbed data.
    Eval(EvalArgs),
    /// Build a class-similarity weight matrix.
    Weights(WeightsArgs),
    /// Write a corrupted copy of a dataset.
    Perturb(PerturbArgs),
    /// Generate a synthetic dataset.
    Synth(SynthArgs),
}

fn parse_floor(s: &str) -> std::result::Result<MinDistanceFloor, String> {
    match s {
        "none" => Ok(MinDistanceFloor::None),
        "auto" => Ok(MinDistanceFloor::Auto),
        d => d
            .parse()
            .map(MinDistanceFloor::Fixed)
            .map_err(|_| format!("expected none, auto or a distance, found {d:?}")),
    }
}

fn parse_secs(s: &str) -> std::result::Result<Duration, String> {
    s.parse::<f64>()
        .ok()
        .and_then(|v| Duration::try_from_secs_f64(v).ok())
        .ok_or_else(|| format!("expected a non-negative number of seconds, found {s:?}"))
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[arg(long)]
    pub classes: usize,
    /// Codeword width; defaults to the class count.
    #[arg(long)]
    pub bits: Option<usize>,
    #[arg(long)]
    pub k: usize,
    #[arg(long, conflicts_with = "uniform")]
    pub weights: Option<PathBuf>,
    #[arg(long)]
    pub uniform: bool,
    #[arg(long, env = "MUTE_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// Optimizer result JSON; printed to stdout when omitted.
    #[arg(long)]
    pub result: Option<PathBuf>,
    /// Also write the integer program in LP format.
    #[arg(long)]
    pub lp: Option<PathBuf>,
    /// Exhaustive search instead of local search.
    #[arg(long, conflicts_with = "shuffle_only")]
    pub exact: bool,
    /// Optimize without weights, then only reassign words to classes.
    #[arg(long, requires = "weights")]
    pub shuffle_only: bool,
    #[arg(long, default_value_t = 32)]
    pub restarts: usize,
    #[arg(long, default_value_t = 10_000)]
    pub max_iters: usize,
    /// Wall-clock budget in seconds for local search.
    #[arg(long, value_parser = parse_secs)]
    pub time_budget: Option<Duration>,
    /// `none`, `auto` or a required minimum pairwise distance.
    #[arg(long, default_value = "auto", value_parser = parse_floor)]
    pub min_distance: MinDistanceFloor,
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("kind").required(true).multiple(false)))]
pub struct BaselineArgs {
    #[arg(long, group = "kind")]
    pub onehot: bool,
    /// Sylvester order exponent m (width 2^m - 1).
    #[arg(long, value_name = "M", group = "kind")]
    pub hadamard: Option<u32>,
    /// Random words with K hot bits.
    #[arg(long, value_name = "K", group = "kind")]
    pub random: Option<usize>,
    #[arg(long)]
    pub classes: usize,
    /// Width for random codebooks; defaults to the class count.
    #[arg(long)]
    pub bits: Option<usize>,
    #[arg(long, env = "MUTE_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct TrainArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub codebook: PathBuf,
    /// Hidden layer widths, comma separated; empty for none.
    #[arg(long, default_value = "32", value_delimiter = ',')]
    pub hidden: Vec<usize>,
    /// Start from this checkpoint instead of a fresh initialization.
    #[arg(long)]
    pub init: Option<PathBuf>,
    #[arg(long, default_value_t = 50)]
    pub epochs: usize,
    #[arg(long, default_value_t = 0.1)]
    pub lr: f64,
    #[arg(long, default_value_t = 0.9)]
    pub momentum: f64,
    #[arg(long, default_value_t = 1e-4)]
    pub wd: f64,
    #[arg(long, default_value_t = 128)]
    pub batch: usize,
    #[arg(long, env = "MUTE_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum DecodeArg {
    Bce,
    Hamming,
}

impl From<DecodeArg> for DecodeRule {
    fn from(d: DecodeArg) -> Self {
        match d {
            DecodeArg::Bce => DecodeRule::Bce,
            DecodeArg::Hamming => DecodeRule::Hamming,
        }
    }
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub codebook: PathBuf,
    #[arg(long)]
    pub data: PathBuf,
    /// Extra test sets, e.g. `negative`, `blur:sigma=1`, `sp:p=0.02,seed=7`, `fgsm:eps=0.1`.
    #[arg(long = "perturb", value_parser = |s: &str| s.parse::<PerturbationSpec>().map_err(|e| e.to_string()))]
    pub perturb: Vec<PerturbationSpec>,
    /// Weights used to score the codebook objective; uniform when omitted.
    #[arg(long)]
    pub weights: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "bce")]
    pub decode: DecodeArg,
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Aligned text table; printed to stdout when omitted.
    #[arg(long)]
    pub table: Option<PathBuf>,
    /// Directory for one confusion CSV per test set.
    #[arg(long)]
    pub confusion_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct WeightsArgs {
    #[arg(long, conflicts_with_all = ["model", "data", "uniform"])]
    pub confusion: Option<PathBuf>,
    /// One-hot model whose confusion on `--data` is used.
    #[arg(long, requires = "data")]
    pub model: Option<PathBuf>,
    #[arg(long, requires = "model")]
    pub data: Option<PathBuf>,
    #[arg(long, requires = "classes")]
    pub uniform: bool,
    #[arg(long)]
    pub classes: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_FLOOR)]
    pub floor: f64,
    #[arg(long)]
    pub out: PathBuf,
    /// Also write the estimated confusion matrix.
    #[arg(long)]
    pub confusion_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct PerturbArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, value_parser = |s: &str| s.parse::<PerturbationSpec>().map_err(|e| e.to_string()))]
    pub spec: PerturbationSpec,
    /// Needed for fgsm.
    #[arg(long, requires = "codebook")]
    pub model: Option<PathBuf>,
    #[arg(long)]
    pub codebook: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum SynthKind {
    Blobs,
    Digits,
}

#[derive(Args, Debug)]
pub struct SynthArgs {
    #[arg(long, value_enum)]
    pub kind: SynthKind,
    #[arg(long, default_value_t = 6)]
    pub classes: usize,
    #[arg(long, default_value_t = 16)]
    pub dim: usize,
    #[arg(long, default_value_t = 100)]
    pub per_class: usize,
    /// Cluster spread for blobs, pixel noise for digits.
    #[arg(long, default_value_t = 0.1)]
    pub noise: f64,
    /// Noise stream; streams of one seed share cluster centers.
    #[arg(long, default_value_t = 0)]
    pub stream: u64,
    #[arg(long, env = "MUTE_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

/// Files written so far; removed again unless the command succeeds.
struct Outputs {
    written: Vec<PathBuf>,
    committed: bool,
}

impl Outputs {
    fn new() -> Self {
        Outputs {
            written: Vec::new(),
            committed: false,
        }
    }

    fn write(&mut self, path: &Path, contents: &str) -> Result<()> {
        std::fs::write(path, contents).map_err(|e| Error::file(path, e))?;
        self.written.push(path.to_path_buf());
        Ok(())
    }

    fn commit(mut self) {
        self.committed = true;
    }
}

impl Drop for Outputs {
    fn drop(&mut self) {
        if !self.committed {
            for p in &self.written {
                let _ = std::fs::remove_file(p);
            }
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidArgument(_) => EXIT_USAGE,
        Error::Infeasible(_)
        | Error::InstanceTooLarge { .. }
        | Error::FloorUnreachable { .. }
        | Error::DegenerateWeights(_)
        | Error::DimensionMismatch { .. } => EXIT_INFEASIBLE,
        Error::File { .. }
        | Error::Io(_)
        | Error::Csv(_)
        | Error::Parse { .. }
        | Error::InvalidCodebook(_) => EXIT_IO,
        Error::Divergence { .. } | Error::NonFinite(_) => EXIT_DIVERGENCE,
    }
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { 0 };
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn execute(cmd: Command) -> Result<()> {
    let mut out = Outputs::new();
    match cmd {
        Command::Gen(a) => gen(a, &mut out)?,
        Command::Baseline(a) => baseline(a, &mut out)?,
        Command::Train(a) => train_cmd(a, &mut out)?,
        Command::Eval(a) => eval(a, &mut out)?,
        Command::Weights(a) => weights(a, &mut out)?,
        Command::Perturb(a) => perturb(a, &mut out)?,
        Command::Synth(a) => synth(a, &mut out)?,
    }
    out.commit();
    Ok(())
}

fn gen(a: GenArgs, out: &mut Outputs) -> Result<()> {
    let weights = match &a.weights {
        Some(p) => Some(WeightMatrix::read_csv(p)?),
        None => None,
    };
    let mut cfg = OptimizerConfig::new(a.classes, a.k)
        .with_bits(a.bits.unwrap_or(a.classes))
        .with_seed(a.seed)
        .with_floor(a.min_distance);
    cfg.restarts = a.restarts;
    cfg.max_iters_per_restart = a.max_iters;
    cfg.time_budget = a.time_budget;
    if let (Some(w), false) = (&weights, a.shuffle_only) {
        cfg = cfg.with_weights(w.clone());
    }
    cfg.validate()?;

    let mut result = if a.exact {
        exact_search(&cfg)?
    } else {
        local_search(&cfg)?
    };
    if a.shuffle_only {
        let w = weights.as_ref().expect("clap requires --weights");
        result.codebook = weighted_shuffle(&result.codebook, w)?;
        result.objective = weighted_objective(&result.codebook, w)?;
    }

    out.write(&a.out, &result.codebook.to_json())?;
    if let Some(lp) = &a.lp {
        let mut lp_cfg = cfg.clone();
        if let Some(w) = &weights {
            lp_cfg.weights = Weights::Matrix(w.clone());
        }
        if let Some(f) = result.floor {
            lp_cfg.min_distance_floor = MinDistanceFloor::Fixed(f);
        }
        out.write(lp, &lp_model(&lp_cfg)?.0)?;
    }
    match &a.result {
        Some(p) => out.write(p, &result.to_json())?,
        None => print!("{}", result.to_json()),
    }
    Ok(())
}

fn baseline(a: BaselineArgs, out: &mut Outputs) -> Result<()> {
    let cb = if a.onehot {
        one_hot(a.classes)?
    } else if let Some(m) = a.hadamard {
        hadamard(a.classes, m)?
    } else {
        let k = a.random.expect("clap requires one kind");
        random_k_hot(a.classes, a.bits.unwrap_or(a.classes), k, a.seed)?
    };
    out.write(&a.out, &cb.to_json())
}

fn train_cmd(a: TrainArgs, out: &mut Outputs) -> Result<()> {
    let cb = Codebook::read(&a.codebook)?;
    let data = Dataset::read_csv(&a.data, Some(cb.n_classes()))?;
    let model = match &a.init {
        Some(p) => MlpModel::read(p)?,
        None => {
            let mut sizes = vec![data.dim()];
            sizes.extend(a.hidden.iter().copied().filter(|&h| h > 0));
            sizes.push(cb.n_bits());
            MlpModel::new(&sizes, a.seed)?
        }
    };
    let cfg = TrainConfig {
        learning_rate: a.lr,
        momentum: a.momentum,
        weight_decay: a.wd,
        batch_size: a.batch,
        epochs: a.epochs,
        seed: a.seed,
    };
    let outcome = train(&model, &data, &cb, &cfg)?;
    let acc = evaluate_with(&outcome.model, &data, &cb, DecodeRule::Bce)?.accuracy;
    out.write(&a.out, &outcome.model.to_json())?;
    if let Some(t) = &a.trace {
        out.write(t, &loss_trace_csv(&outcome.loss_trace, Some(&format!("train_accuracy={acc}"))))?;
    }
    println!(
        "trained {} epochs, final loss {}, train accuracy {acc}",
        cfg.epochs,
        outcome.loss_trace.last().copied().unwrap_or(f64::NAN)
    );
    Ok(())
}

fn file_label(p: &Path) -> String {
    p.display().to_string()
}

fn eval(a: EvalArgs, out: &mut Outputs) -> Result<()> {
    let cb = Codebook::read(&a.codebook)?;
    let model = MlpModel::read(&a.model)?;
    let data = Dataset::read_csv(&a.data, Some(cb.n_classes()))?;
    let (objective, objective_weights) = match &a.weights {
        Some(p) => (weighted_objective(&cb, &WeightMatrix::read_csv(p)?)?, file_label(p)),
        None if cb.n_classes() >= 2 => (
            weighted_objective(&cb, &WeightMatrix::uniform(cb.n_classes())?)?,
            "uniform".to_string(),
        ),
        None => (0.0, "uniform".to_string()),
    };
    let min_distance = if cb.n_classes() >= 2 {
        min_pairwise_distance(&cb)?
    } else {
        0
    };
    if let Some(dir) = &a.confusion_dir {
        std::fs::create_dir_all(dir).map_err(|e| Error::file(dir, e))?;
    }

    let mut sets: Vec<(String, Option<PerturbationSpec>)> = vec![("original".into(), None)];
    sets.extend(a.perturb.iter().map(|s| (s.to_string(), Some(*s))));
    let mut results = Vec::with_capacity(sets.len());
    for (idx, (label, spec)) in sets.into_iter().enumerate() {
        let start = Instant::now();
        let test = match spec {
            None => data.clone(),
            Some(s) => s.apply(&data, Some((&model, &cb)))?,
        };
        let ev = evaluate_with(&model, &test, &cb, a.decode.into())?;
        let confusion_file = match &a.confusion_dir {
            Some(dir) => {
                let path = dir.join(format!("confusion_{idx}.csv"));
                out.write(&path, &ev.confusion.to_csv_string())?;
                Some(file_label(&path))
            }
            None => None,
        };
        results.push(AccuracyRow {
            test_set: label,
            samples: test.len(),
            accuracy: ev.accuracy,
            confusion_file,
            wall_time: start.elapsed(),
        });
    }
    let report = RunReport {
        codebook: file_label(&a.codebook),
        model: file_label(&a.model),
        dataset: file_label(&a.data),
        provenance: cb.provenance(),
        n_classes: cb.n_classes(),
        n_bits: cb.n_bits(),
        objective,
        objective_weights,
        min_distance,
        results,
    };
    if let Some(p) = &a.report {
        out.write(p, &report.to_json())?;
    }
    match &a.table {
        Some(p) => out.write(p, &report.to_table())?,
        None => print!("{}", report.to_table()),
    }
    Ok(())
}

fn weights(a: WeightsArgs, out: &mut Outputs) -> Result<()> {
    let w = if a.uniform {
        WeightMatrix::uniform(a.classes.expect("clap requires --classes"))?
    } else {
        let cm = if let Some(p) = &a.confusion {
            ConfusionMatrix::read_csv(p)?
        } else if let (Some(m), Some(d)) = (&a.model, &a.data) {
            let model = MlpModel::read(m)?;
            let data = Dataset::read_csv(d, Some(model.output_dim()))?;
            estimate_confusion(&model, &data)?
        } else {
            return Err(Error::InvalidArgument(
                "give --confusion, --model with --data, or --uniform".into(),
            ));
        };
        if let Some(n) = a.classes {
            crate::error::check_dim("confusion matrix size", n, cm.n())?;
        }
        if let Some(p) = &a.confusion_out {
            out.write(p, &cm.to_csv_string())?;
        }
        confusion_to_weights(&cm, a.floor)?
    };
    out.write(&a.out, &w.to_csv_string())
}

fn perturb(a: PerturbArgs, out: &mut Outputs) -> Result<()> {
    let cb = match &a.codebook {
        Some(p) => Some(Codebook::read(p)?),
        None => None,
    };
    let model = match &a.model {
        Some(p) => Some(MlpModel::read(p)?),
        None => None,
    };
    let data = Dataset::read_csv(&a.data, cb.as_ref().map(|c| c.n_classes()))?;
    let target = match (&model, &cb) {
        (Some(m), Some(c)) => Some((m, c)),
        _ => None,
    };
    let perturbed = a.spec.apply(&data, target)?;
    out.write(&a.out, &perturbed.to_csv_string())
}

fn synth(a: SynthArgs, out: &mut Outputs) -> Result<()> {
    let data = match a.kind {
        SynthKind::Blobs => BlobSpec::new(a.classes, a.dim, a.noise, a.seed).sample(a.per_class, a.stream)?,
        SynthKind::Digits => synthetic_digits(a.per_class, a.noise, crate::seeding::sub_seed(a.seed, a.stream))?,
    };
    out.write(&a.out, &data.to_csv_string())
}
