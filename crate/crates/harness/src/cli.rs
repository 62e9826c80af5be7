use crate::answer::parse_model_answer;
use crate::client::{call_model, Endpoint, Generation};
use crate::config::{Mode, RunConfig};
use crate::prompt::{prompts_for, Task};
use anyhow::{anyhow, bail, Context, Result};
use argbind::datagen::{
    generate_dataset, gold_answer, read_dataset, validate_dataset, write_dataset, Count, DatasetId, Family, GenSpec,
    Instance, Vocabulary,
};
use argbind::fol::{canonicalize, parse_fol, MatchPolicy};
use argbind::jsonl::{read_jsonl, write_jsonl};
use argbind::predarg::{extract_structure, Repair};
use argbind::scoring::{emit_report, merge_reports, FolPrediction, MetricsReport, QaPrediction, ReportFormat};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use std::collections::{BTreeSet, HashMap};
use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use thiserror::Error;

/// A command-line mistake that clap cannot catch; exits with 2.
#[derive(Debug, Error)]
#[error("{0}")]
pub struct UsageError(String);

/// Exits with 1 after the error has been explained on stdout/stderr.
#[derive(Debug, Error)]
#[error("{0}")]
struct Failed(String);

#[derive(Parser, Debug)]
#[command(
    name = "argbind",
    version,
    about = "Predicate-argument binding probes: datasets, prompts, model runs, scoring"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a dataset as JSONL.
    Generate(GenerateArgs),
    /// Check a dataset against its templates and the answer oracle.
    Validate(ValidateArgs),
    /// Write one prompt per question (qa) or per instance (fol).
    Prompts(PromptsArgs),
    /// Write model-free predictions from the gold forms.
    Oracle(OracleArgs),
    /// Query an endpoint (live) or take existing generations (offline), then score.
    Run(RunArgs),
    /// Score yes/no predictions.
    ScoreQa(ScoreQaArgs),
    /// Score FOL predictions.
    ScoreFol(ScoreFolArgs),
    /// Merge metric files and render tables.
    Report(ReportArgs),
}

#[derive(Args, Debug)]
struct GenerateArgs {
    /// d11, d21, d22, d31, d32, d33 or dand.
    #[arg(long)]
    dataset: DatasetId,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of instances, or "all" for the full enumeration.
    #[arg(long, default_value = "all")]
    count: Count,
    #[arg(long)]
    vocab: Option<PathBuf>,
    /// Restrict to template families; repeatable.
    #[arg(long = "family")]
    families: Vec<Family>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    dataset: PathBuf,
    #[arg(long)]
    vocab: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct PromptsArgs {
    dataset: PathBuf,
    #[arg(long)]
    task: Task,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct OracleArgs {
    dataset: PathBuf,
    #[arg(long)]
    task: Task,
    #[arg(long)]
    vocab: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct RunArgs {
    /// TOML run config; flags below override its keys.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    mode: Option<Mode>,
    #[arg(long)]
    task: Option<Task>,
    #[arg(long)]
    dataset: Option<PathBuf>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long)]
    run_name: Option<String>,
    #[arg(long)]
    policy: Option<MatchPolicy>,
    #[arg(long)]
    vocab: Option<PathBuf>,
    #[arg(long)]
    generations: Option<PathBuf>,
    #[arg(long)]
    base_url: Option<String>,
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    token_env: Option<String>,
    #[arg(long)]
    max_in_flight: Option<usize>,
    #[arg(long)]
    retries: Option<u32>,
    #[arg(long)]
    timeout_secs: Option<u64>,
    #[arg(long)]
    max_tokens: Option<u32>,
    #[arg(long)]
    backoff_ms: Option<u64>,
    #[arg(long, default_value = "md")]
    format: ReportFormat,
}

#[derive(Args, Debug)]
struct ReportOut {
    /// Run name in the report; defaults to the prediction file's stem.
    #[arg(long)]
    run_name: Option<String>,
    #[arg(long, default_value = "md")]
    format: ReportFormat,
    /// Directory for metrics.json and the report; report to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ScoreQaArgs {
    dataset: PathBuf,
    predictions: PathBuf,
    #[command(flatten)]
    out: ReportOut,
}

#[derive(Args, Debug)]
struct ScoreFolArgs {
    dataset: PathBuf,
    predictions: PathBuf,
    #[arg(long, default_value_t = MatchPolicy::Canonical)]
    policy: MatchPolicy,
    #[arg(long)]
    vocab: Option<PathBuf>,
    #[command(flatten)]
    out: ReportOut,
}

#[derive(Args, Debug)]
struct ReportArgs {
    /// metrics.json files from score-qa, score-fol or run.
    #[arg(required = true)]
    metrics: Vec<PathBuf>,
    #[arg(long, default_value = "md")]
    format: ReportFormat,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Entry point shared by the binary and the tests. Returns the exit code:
/// 0 on success, 1 on failures (validation, scoring, io), 2 on usage errors.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) if e.is::<UsageError>() => {
            eprintln!("error: {e}");
            2
        }
        Err(e) if e.is::<Failed>() => {
            eprintln!("{e}");
            1
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}

fn dispatch(cmd: Command) -> Result<()> {
    match cmd {
        Command::Generate(a) => generate(a),
        Command::Validate(a) => validate(a),
        Command::Prompts(a) => prompts(a),
        Command::Oracle(a) => oracle(a),
        Command::Run(a) => run_cmd(a),
        Command::ScoreQa(a) => score_qa(a),
        Command::ScoreFol(a) => score_fol(a),
        Command::Report(a) => report(a),
    }
}

fn load_vocab(path: Option<&Path>) -> Result<Vocabulary> {
    match path {
        None => Ok(Vocabulary::default_vocab()),
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            Vocabulary::parse(&text).with_context(|| format!("{}", p.display()))
        }
    }
}

fn load_dataset(path: &Path) -> Result<Vec<Instance>> {
    let f = File::open(path).with_context(|| format!("reading {}", path.display()))?;
    read_dataset(BufReader::new(f)).with_context(|| format!("{}", path.display()))
}

fn load_records<T: serde::de::DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let f = File::open(path).with_context(|| format!("reading {}", path.display()))?;
    read_jsonl(BufReader::new(f)).with_context(|| format!("{}", path.display()))
}

/// Writes through a temporary sibling and renames, creating parent dirs.
fn write_file(path: &Path, fill: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> Result<()> {
    let ctx = || format!("writing {}", path.display());
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(ctx)?;
    }
    let mut tmp_name = path.file_name().ok_or_else(|| anyhow!("{} is not a file path", path.display()))?.to_owned();
    tmp_name.push(".tmp");
    let tmp = path.with_file_name(tmp_name);
    {
        let mut w = BufWriter::new(File::create(&tmp).with_context(ctx)?);
        fill(&mut w).and_then(|_| w.flush()).with_context(ctx)?;
    }
    fs::rename(&tmp, path).with_context(ctx)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write_file(path, |w| {
        serde_json::to_writer_pretty(&mut *w, value)?;
        w.write_all(b"\n")
    })
}

fn generate(a: GenerateArgs) -> Result<()> {
    let vocab = load_vocab(a.vocab.as_deref())?;
    let mut spec = GenSpec::new(a.dataset, a.seed, a.count);
    if !a.families.is_empty() {
        spec.families = Some(a.families.into_iter().collect::<BTreeSet<_>>());
    }
    let ds = generate_dataset(&spec, &vocab).map_err(|e| UsageError(e.to_string()))?;
    write_file(&a.out, |w| write_dataset(w, &ds))?;
    let questions: usize = ds.iter().map(|i| i.questions.len()).sum();
    eprintln!("{}: {} instances, {questions} questions -> {}", a.dataset, ds.len(), a.out.display());
    Ok(())
}

fn validate(a: ValidateArgs) -> Result<()> {
    let vocab = load_vocab(a.vocab.as_deref())?;
    let ds = load_dataset(&a.dataset)?;
    let r = validate_dataset(&ds, &vocab.lexicon);
    for v in &r.violations {
        println!("{v}");
    }
    let line = format!(
        "{}: {} instances, {} questions, {} violations",
        a.dataset.display(),
        r.instances,
        r.questions,
        r.violations.len()
    );
    if r.is_clean() {
        println!("{line}");
        Ok(())
    } else {
        Err(Failed(line).into())
    }
}

fn prompts(a: PromptsArgs) -> Result<()> {
    let ds = load_dataset(&a.dataset)?;
    let records = prompts_for(&ds, a.task);
    write_file(&a.out, |w| write_jsonl(w, &records))
}

fn oracle(a: OracleArgs) -> Result<()> {
    let vocab = load_vocab(a.vocab.as_deref())?;
    let ds = load_dataset(&a.dataset)?;
    match a.task {
        Task::Qa => {
            let mut preds = Vec::new();
            for inst in &ds {
                let bad = |m: String| anyhow!("{}: instance {}: {m}", a.dataset.display(), inst.instance_id);
                let f = parse_fol(&inst.gold_fol).map_err(|e| bad(e.to_string()))?;
                let s = extract_structure(&canonicalize(&f), &vocab.lexicon, Repair::Off)
                    .map_err(|e| bad(e.to_string()))?;
                for q in &inst.questions {
                    let ans = gold_answer(q, &s).map_err(|e| bad(e.to_string()))?;
                    preds.push(QaPrediction { question_id: q.question_id.clone(), answer: ans.into() });
                }
            }
            write_file(&a.out, |w| write_jsonl(w, &preds))
        }
        Task::Fol => {
            let preds: Vec<FolPrediction> = ds
                .iter()
                .map(|i| FolPrediction { instance_id: i.instance_id.clone(), fol: i.gold_fol.clone() })
                .collect();
            write_file(&a.out, |w| write_jsonl(w, &preds))
        }
    }
}

fn default_run_name(p: &Path) -> String {
    p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "run".into())
}

fn emit(report: &MetricsReport, out: &ReportOut) -> Result<()> {
    let text = emit_report(std::slice::from_ref(report), out.format);
    match &out.out {
        Some(dir) => {
            write_json(&dir.join("metrics.json"), report)?;
            let path = dir.join(format!("report.{}", out.format.extension()));
            write_file(&path, |w| w.write_all(text.as_bytes()))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn score_qa(a: ScoreQaArgs) -> Result<()> {
    let ds = load_dataset(&a.dataset)?;
    let preds: Vec<QaPrediction> = load_records(&a.predictions)?;
    let name = a.out.run_name.clone().unwrap_or_else(|| default_run_name(&a.predictions));
    let report =
        MetricsReport::from_qa(&name, &ds, &preds).map_err(|e| Failed(format!("{}: {e}", a.predictions.display())))?;
    emit(&report, &a.out)
}

fn score_fol(a: ScoreFolArgs) -> Result<()> {
    let vocab = load_vocab(a.vocab.as_deref())?;
    let ds = load_dataset(&a.dataset)?;
    let preds: Vec<FolPrediction> = load_records(&a.predictions)?;
    let name = a.out.run_name.clone().unwrap_or_else(|| default_run_name(&a.predictions));
    let report = MetricsReport::from_fol(&name, &ds, &preds, a.policy, &vocab.lexicon)
        .map_err(|e| Failed(format!("{}: {e}", a.predictions.display())))?;
    emit(&report, &a.out)
}

fn report(a: ReportArgs) -> Result<()> {
    let mut reports = Vec::new();
    for p in &a.metrics {
        let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
        let r: MetricsReport = serde_json::from_str(&text).with_context(|| format!("{}", p.display()))?;
        reports.push(r);
    }
    let merged = merge_reports(reports).map_err(|e| Failed(e.to_string()))?;
    let text = emit_report(&merged, a.format);
    match &a.out {
        Some(path) => write_file(path, |w| w.write_all(text.as_bytes())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Config file (if any) with flags applied on top.
fn resolve_config(a: &RunArgs) -> Result<RunConfig> {
    let mut cfg = match &a.config {
        Some(p) => RunConfig::load(p)?,
        None => {
            let need = |what: &str| UsageError(format!("run needs --config or --{what}"));
            RunConfig {
                mode: a.mode.ok_or_else(|| need("mode"))?,
                task: a.task.ok_or_else(|| need("task"))?,
                dataset: a.dataset.clone().ok_or_else(|| need("dataset"))?,
                out_dir: a.out_dir.clone().ok_or_else(|| need("out-dir"))?,
                run_name: None,
                policy: MatchPolicy::default(),
                vocab: None,
                generations: None,
                endpoint: None,
            }
        }
    };
    macro_rules! set {
        ($($field:ident),*) => {$(
            if let Some(v) = &a.$field {
                cfg.$field = v.clone().into();
            }
        )*};
    }
    set!(mode, task, dataset, out_dir, policy);
    if a.run_name.is_some() {
        cfg.run_name = a.run_name.clone();
    }
    if a.vocab.is_some() {
        cfg.vocab = a.vocab.clone();
    }
    if a.generations.is_some() {
        cfg.generations = a.generations.clone();
    }
    if (a.base_url.is_some() || a.model.is_some()) && cfg.endpoint.is_none() {
        let (Some(url), Some(model)) = (&a.base_url, &a.model) else {
            return Err(
                UsageError("--base-url and --model go together when the config has no [endpoint]".into()).into()
            );
        };
        cfg.endpoint = Some(Endpoint::new(url, model));
    }
    if let Some(ep) = cfg.endpoint.as_mut() {
        macro_rules! set_ep {
            ($($field:ident),*) => {$(
                if let Some(v) = &a.$field {
                    ep.$field = v.clone().into();
                }
            )*};
        }
        set_ep!(base_url, model, token_env, max_in_flight, retries, timeout_secs, max_tokens, backoff_ms);
    }
    cfg.check().map_err(|e| UsageError(e.to_string()))?;
    Ok(cfg)
}

fn run_cmd(a: RunArgs) -> Result<()> {
    let cfg = resolve_config(&a)?;
    let vocab = load_vocab(cfg.vocab.as_deref())?;
    let ds = load_dataset(&cfg.dataset)?;
    let prompts = prompts_for(&ds, cfg.task);
    let out = &cfg.out_dir;
    write_file(&out.join("prompts.jsonl"), |w| write_jsonl(w, &prompts))?;

    let mut failed = Vec::new();
    let generations: HashMap<String, String> = match cfg.mode {
        Mode::Live => {
            let ep = cfg.endpoint.as_ref().expect("checked");
            let summary = call_model(ep, &prompts, out)?;
            write_json(&out.join("summary.json"), &summary)?;
            eprintln!(
                "{} prompts: {} already done, {} succeeded, {} failed, {} retries",
                summary.total,
                summary.skipped,
                summary.succeeded,
                summary.failed.len(),
                summary.retries
            );
            failed = summary.failed;
            load_records::<Generation>(&out.join(crate::client::GENERATIONS_FILE))?
                .into_iter()
                .map(|g| (g.id, g.generation))
                .collect()
        }
        Mode::Offline => {
            let path = cfg.generations.as_ref().expect("checked");
            load_records::<Generation>(path)?.into_iter().map(|g| (g.id, g.generation)).collect()
        }
    };

    // prompts without a generation get no prediction and score as wrong
    let name = cfg.run_name();
    let report = match cfg.task {
        Task::Qa => {
            let preds: Vec<QaPrediction> = prompts
                .iter()
                .filter_map(|p| {
                    let g = generations.get(&p.id)?;
                    Some(QaPrediction { question_id: p.id.clone(), answer: parse_model_answer(g) })
                })
                .collect();
            write_file(&out.join("predictions.jsonl"), |w| write_jsonl(w, &preds))?;
            MetricsReport::from_qa(&name, &ds, &preds)
        }
        Task::Fol => {
            let preds: Vec<FolPrediction> = prompts
                .iter()
                .filter_map(|p| {
                    let g = generations.get(&p.id)?;
                    Some(FolPrediction { instance_id: p.id.clone(), fol: g.trim().to_string() })
                })
                .collect();
            write_file(&out.join("predictions.jsonl"), |w| write_jsonl(w, &preds))?;
            MetricsReport::from_fol(&name, &ds, &preds, cfg.policy, &vocab.lexicon)
        }
    }
    .map_err(|e| Failed(e.to_string()))?;
    emit(&report, &ReportOut { run_name: None, format: a.format, out: Some(out.clone()) })?;

    if !failed.is_empty() {
        bail!(Failed(format!(
            "{} of {} prompts failed; see {}",
            failed.len(),
            prompts.len(),
            out.join(crate::client::LOG_FILE).display()
        )));
    }
    Ok(())
}
