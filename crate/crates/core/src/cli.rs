//! Command-line driver.
//!
//! Output layout under `--out DIR` (shared by `perturb`, `report` and `run`):
//!
//! ```text
//! datasets/truncated.json     one question per paragraph
//! datasets/<id>.json          perturbed dataset for ablation <id>
//! records/<id>.jsonl          one perturbation record per question
//! predictions/<run>.json      built-in reader output, <run> = original | truncated | <id>
//! eval/<run>.json             scores of <run>
//! report.md, report.json
//! ```
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 invalid data.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;
use thiserror::Error;

use crate::ablations::{apply_ablation, records_from_jsonl, records_to_jsonl, AblationId, AblationOptions, HalfSide};
use crate::evaluation::{compute_drop, evaluate_dataset, EvalResult};
use crate::reader::{predict, Predictions};
use crate::report::{build_report, render, Baselines, BaselineSummary, Format, ReportInputs, ReportSettings, Thresholds};
use crate::squad::{parse_dataset, serialize_dataset, truncate_dataset, validate_dataset, Dataset};

pub const DEFAULT_SEED: u64 = 42;
pub const SEED_ENV: &str = "MRCLENS_SEED";
const VIOLATIONS_SHOWN: usize = 20;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn data(msg: impl Into<String>) -> CliError {
    CliError::Data(msg.into())
}

#[derive(Debug, Parser)]
#[command(name = "mrclens", version, about = "Dataset bias diagnostics for SQuAD-style reading comprehension data")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Keep the first question of every paragraph (--dataset, --out FILE).
    Truncate(Flags),
    /// Write perturbed datasets and records (--dataset, --seed, --ablation, --half, --out DIR).
    Perturb(Flags),
    /// Run the built-in reader (--dataset, --out FILE).
    Predict(Flags),
    /// Score a predictions file (--dataset, --predictions FILE, --out FILE).
    Evaluate(Flags),
    /// Build report.md and report.json from DIR/eval and DIR/records (--out DIR).
    Report(Flags),
    /// Truncate, perturb, predict, evaluate and report in one go.
    Run(Flags),
}

#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Comma-separated subset of e1..e8.
    #[arg(long, value_delimiter = ',')]
    pub ablation: Option<Vec<AblationId>>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// A predictions file (evaluate) or a directory of <run>.json files (run).
    #[arg(long)]
    pub predictions: Option<PathBuf>,
    /// JSON config file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// F1-drop cutoffs as SMALL,LARGE.
    #[arg(long)]
    pub thresholds: Option<String>,
    #[arg(long)]
    pub half: Option<HalfSide>,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    dataset: Option<PathBuf>,
    seed: Option<u64>,
    ablations: Option<Vec<AblationId>>,
    out: Option<PathBuf>,
    predictions: Option<PathBuf>,
    thresholds: Option<Thresholds>,
    half: Option<HalfSide>,
    jobs: Option<usize>,
}

/// Where predictions come from in `run`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PredictionSource {
    Builtin,
    /// Directory holding `<run>.json` for every run that is evaluated.
    Directory(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub dataset_path: Option<PathBuf>,
    pub global_seed: u64,
    /// `None` means "not given": all eight for `perturb`/`run`, whatever has
    /// results for `report`.
    pub ablations: Option<Vec<AblationId>>,
    pub predictions: PredictionSource,
    pub predictions_path: Option<PathBuf>,
    pub thresholds: Thresholds,
    pub out: Option<PathBuf>,
    pub half: HalfSide,
    pub jobs: Option<usize>,
}

impl RunConfig {
    pub fn new(dataset: impl Into<PathBuf>, out: impl Into<PathBuf>) -> Self {
        Self {
            dataset_path: Some(dataset.into()),
            global_seed: DEFAULT_SEED,
            ablations: None,
            predictions: PredictionSource::Builtin,
            predictions_path: None,
            thresholds: Thresholds::default(),
            out: Some(out.into()),
            half: HalfSide::First,
            jobs: None,
        }
    }

    /// Flags over config file over `MRCLENS_SEED` over defaults.
    pub fn resolve(flags: &Flags, env_seed: Option<&str>) -> Result<Self, CliError> {
        let file = match &flags.config {
            Some(path) => {
                let bytes = read(path)?;
                serde_json::from_slice::<ConfigFile>(&bytes)
                    .map_err(|e| usage(format!("invalid config {}: {e}", path.display())))?
            }
            None => ConfigFile::default(),
        };
        let env_seed = env_seed
            .map(|s| {
                s.trim()
                    .parse::<u64>()
                    .map_err(|_| usage(format!("{SEED_ENV}={s:?} is not a 64-bit unsigned integer")))
            })
            .transpose()?;
        let thresholds = match &flags.thresholds {
            Some(s) => parse_thresholds(s)?,
            None => file.thresholds.unwrap_or_default(),
        };
        if !thresholds.is_ordered() {
            return Err(usage(format!(
                "thresholds must satisfy small < large (got {}, {})",
                thresholds.small, thresholds.large
            )));
        }
        let predictions_path = flags.predictions.clone().or(file.predictions);
        let mut ablations = flags.ablation.clone().or(file.ablations);
        if let Some(list) = &mut ablations {
            list.sort();
            list.dedup();
            if list.is_empty() {
                return Err(usage("--ablation needs at least one id"));
            }
        }
        let jobs = flags.jobs.or(file.jobs);
        if jobs == Some(0) {
            return Err(usage("--jobs must be at least 1"));
        }
        Ok(Self {
            dataset_path: flags.dataset.clone().or(file.dataset),
            global_seed: flags.seed.or(file.seed).or(env_seed).unwrap_or(DEFAULT_SEED),
            ablations,
            predictions: match &predictions_path {
                Some(p) => PredictionSource::Directory(p.clone()),
                None => PredictionSource::Builtin,
            },
            predictions_path,
            thresholds,
            out: flags.out.clone().or(file.out),
            half: flags.half.or(file.half).unwrap_or_default(),
            jobs,
        })
    }

    fn selected_ablations(&self) -> Vec<AblationId> {
        self.ablations.clone().unwrap_or_else(|| AblationId::ALL.to_vec())
    }

    fn options(&self) -> AblationOptions {
        AblationOptions { half: self.half }
    }

    fn dataset_path(&self) -> Result<&Path, CliError> {
        self.dataset_path.as_deref().ok_or_else(|| usage("--dataset is required"))
    }

    fn out(&self) -> Result<&Path, CliError> {
        self.out.as_deref().ok_or_else(|| usage("--out is required"))
    }
}

fn parse_thresholds(s: &str) -> Result<Thresholds, CliError> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let parse = |p: &str| {
        p.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| usage(format!("invalid threshold {p:?} in {s:?}")))
    };
    match parts.as_slice() {
        [small, large] => Ok(Thresholds { small: parse(small)?, large: parse(large)? }),
        _ => Err(usage(format!("--thresholds expects SMALL,LARGE, got {s:?}"))),
    }
}

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)
                .map_err(|e| usage(format!("cannot create {}: {e}", parent.display())))?;
        }
    }
    fs::write(path, bytes).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))
}

/// Reads, parses and validates a dataset.
pub fn load_dataset(path: &Path) -> Result<Dataset, CliError> {
    let bytes = read(path)?;
    let d = parse_dataset(&bytes).map_err(|e| data(format!("{}: {e}", path.display())))?;
    let violations = validate_dataset(&d);
    if !violations.is_empty() {
        let mut msg = format!("{}: {} offset violation(s)", path.display(), violations.len());
        for v in violations.iter().take(VIOLATIONS_SHOWN) {
            msg.push_str(&format!("\n  {v}"));
        }
        if violations.len() > VIOLATIONS_SHOWN {
            msg.push_str(&format!("\n  ... {} more", violations.len() - VIOLATIONS_SHOWN));
        }
        return Err(data(msg));
    }
    Ok(d)
}

fn load_predictions(path: &Path) -> Result<Predictions, CliError> {
    let bytes = read(path)?;
    Predictions::from_json(&bytes).map_err(|e| data(format!("{}: invalid predictions: {e}", path.display())))
}

pub fn dataset_file(out: &Path, run: &str) -> PathBuf {
    out.join("datasets").join(format!("{run}.json"))
}

pub fn records_file(out: &Path, id: AblationId) -> PathBuf {
    out.join("records").join(format!("{id}.jsonl"))
}

pub fn predictions_file(out: &Path, run: &str) -> PathBuf {
    out.join("predictions").join(format!("{run}.json"))
}

pub fn eval_file(out: &Path, run: &str) -> PathBuf {
    out.join("eval").join(format!("{run}.json"))
}

fn evaluate_to(d: &Dataset, preds: &Predictions, run: &str) -> Result<EvalResult, CliError> {
    let ev = evaluate_dataset(d, preds).map_err(|e| data(format!("{run}: {e}")))?;
    if !ev.unknown_ids.is_empty() {
        eprintln!(
            "warning: {run}: {} prediction id(s) match no question and were ignored",
            ev.unknown_ids.len()
        );
    }
    Ok(ev.result)
}

/// `truncate`: returns (paragraphs retained, questions before).
pub fn cmd_truncate(cfg: &RunConfig) -> Result<(usize, usize), CliError> {
    let d = load_dataset(cfg.dataset_path()?)?;
    let t = truncate_dataset(&d);
    write(cfg.out()?, &serialize_dataset(&t))?;
    eprintln!(
        "truncated {} questions to {} (one per paragraph)",
        d.question_count(),
        t.paragraph_count()
    );
    Ok((t.paragraph_count(), d.question_count()))
}

struct Perturbed {
    truncated: Option<Dataset>,
    runs: Vec<(AblationId, Dataset)>,
}

fn perturb_into(d: &Dataset, cfg: &RunConfig, out: &Path) -> Result<Perturbed, CliError> {
    let ablations = cfg.selected_ablations();
    let truncated = ablations
        .iter()
        .any(|id| id.spec().requires_truncated)
        .then(|| truncate_dataset(d));
    if let Some(t) = &truncated {
        write(&dataset_file(out, "truncated"), &serialize_dataset(t))?;
    }
    let mut runs = Vec::with_capacity(ablations.len());
    for id in ablations {
        let source = if id.spec().requires_truncated {
            truncated.as_ref().expect("truncated dataset prepared")
        } else {
            d
        };
        let (perturbed, records) = apply_ablation(source, id, cfg.global_seed, cfg.options())
            .map_err(|e| data(e.to_string()))?;
        let violations = validate_dataset(&perturbed);
        if !violations.is_empty() {
            return Err(data(format!("{id}: perturbation broke {} answer span(s)", violations.len())));
        }
        write(&dataset_file(out, id.as_str()), &serialize_dataset(&perturbed))?;
        write(&records_file(out, id), &records_to_jsonl(&records))?;
        runs.push((id, perturbed));
    }
    Ok(Perturbed { truncated, runs })
}

pub fn cmd_perturb(cfg: &RunConfig) -> Result<(), CliError> {
    let d = load_dataset(cfg.dataset_path()?)?;
    perturb_into(&d, cfg, cfg.out()?)?;
    Ok(())
}

pub fn cmd_predict(cfg: &RunConfig) -> Result<(), CliError> {
    let d = load_dataset(cfg.dataset_path()?)?;
    write(cfg.out()?, &predict(&d).to_json())
}

pub fn cmd_evaluate(cfg: &RunConfig) -> Result<EvalResult, CliError> {
    let d = load_dataset(cfg.dataset_path()?)?;
    let path = cfg.predictions_path.as_deref().ok_or_else(|| usage("--predictions is required"))?;
    let result = evaluate_to(&d, &load_predictions(path)?, "evaluate")?;
    let json = result.to_json();
    match &cfg.out {
        Some(out) => write(out, &json)?,
        None => println!("{}", String::from_utf8_lossy(&json)),
    }
    eprintln!("em {:.2}  f1 {:.2}  n {}", result.em, result.f1, result.question_count);
    Ok(result)
}

fn load_eval(path: &Path) -> Result<Option<EvalResult>, CliError> {
    if !path.exists() {
        return Ok(None);
    }
    let bytes = read(path)?;
    EvalResult::from_json(&bytes)
        .map(Some)
        .map_err(|e| data(format!("{}: invalid eval file: {e}", path.display())))
}

/// `report`: reads `eval/` and `records/` under the output directory.
pub fn cmd_report(cfg: &RunConfig) -> Result<(), CliError> {
    let out = cfg.out()?;
    let full = load_eval(&eval_file(out, "original"))?;
    let truncated = load_eval(&eval_file(out, "truncated"))?;
    let ablations: Vec<AblationId> = match &cfg.ablations {
        Some(list) => list.clone(),
        None => AblationId::ALL
            .into_iter()
            .filter(|id| eval_file(out, id.as_str()).exists())
            .collect(),
    };
    let mut deltas = Vec::new();
    let mut records = BTreeMap::new();
    for id in ablations {
        let ablated = load_eval(&eval_file(out, id.as_str()))?
            .ok_or_else(|| usage(format!("missing {}", eval_file(out, id.as_str()).display())))?;
        let (baseline, name) = if id.spec().requires_truncated {
            (truncated.as_ref(), "truncated")
        } else {
            (full.as_ref(), "original")
        };
        let baseline =
            baseline.ok_or_else(|| usage(format!("{id} needs {}", eval_file(out, name).display())))?;
        deltas.push(compute_drop(baseline, &ablated, id));
        let recs = records_from_jsonl(&read(&records_file(out, id))?)
            .map_err(|e| data(format!("{}: {e}", records_file(out, id).display())))?;
        records.insert(id, recs);
    }
    let report = build_report(ReportInputs {
        deltas: &deltas,
        records: &records,
        baselines: Baselines {
            full: full.as_ref().map(BaselineSummary::from),
            truncated: truncated.as_ref().map(BaselineSummary::from),
        },
        thresholds: cfg.thresholds,
        global_seed: cfg.global_seed,
        settings: ReportSettings { half: cfg.half, ..ReportSettings::default() },
    })
    .map_err(|e| data(e.to_string()))?;
    write(&out.join("report.md"), &render(&report, Format::Markdown))?;
    write(&out.join("report.json"), &render(&report, Format::Json))?;
    Ok(())
}

/// The whole pipeline. Output is byte-identical for identical configs.
pub fn run_pipeline(cfg: &RunConfig) -> Result<(), CliError> {
    let out = cfg.out()?.to_path_buf();
    let d = load_dataset(cfg.dataset_path()?)?;
    let perturbed = perturb_into(&d, cfg, &out)?;

    let mut runs: Vec<(String, &Dataset)> = vec![("original".to_string(), &d)];
    if let Some(t) = &perturbed.truncated {
        runs.push(("truncated".to_string(), t));
    }
    runs.extend(perturbed.runs.iter().map(|(id, ds)| (id.to_string(), ds)));

    for (run, dataset) in runs {
        let preds = match &cfg.predictions {
            PredictionSource::Builtin => {
                let preds = predict(dataset);
                write(&predictions_file(&out, &run), &preds.to_json())?;
                preds
            }
            PredictionSource::Directory(dir) => load_predictions(&dir.join(format!("{run}.json")))?,
        };
        let result = evaluate_to(dataset, &preds, &run)?;
        write(&eval_file(&out, &run), &result.to_json())?;
    }
    let report_cfg = RunConfig { ablations: Some(cfg.selected_ablations()), ..cfg.clone() };
    cmd_report(&report_cfg)?;
    eprintln!("wrote {}", out.join("report.md").display());
    Ok(())
}

fn dispatch(command: &Command) -> Result<(), CliError> {
    let flags = match command {
        Command::Truncate(f)
        | Command::Perturb(f)
        | Command::Predict(f)
        | Command::Evaluate(f)
        | Command::Report(f)
        | Command::Run(f) => f,
    };
    let env_seed = std::env::var(SEED_ENV).ok();
    let cfg = RunConfig::resolve(flags, env_seed.as_deref())?;
    let work = || match command {
        Command::Truncate(_) => cmd_truncate(&cfg).map(|_| ()),
        Command::Perturb(_) => cmd_perturb(&cfg),
        Command::Predict(_) => cmd_predict(&cfg),
        Command::Evaluate(_) => cmd_evaluate(&cfg).map(|_| ()),
        Command::Report(_) => cmd_report(&cfg),
        Command::Run(_) => run_pipeline(&cfg),
    };
    match cfg.jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| usage(format!("cannot start {n} workers: {e}")))?
            .install(work),
        None => work(),
    }
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
