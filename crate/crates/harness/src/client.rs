//! Chat-completions client with bounded concurrency, retries and an
//! append-only generation log that makes runs resumable.

use crate::prompt::PromptRecord;
use serde::{Deserialize, Serialize};
use std::collections::{HashMap, HashSet, VecDeque};
use std::fs::{self, File, OpenOptions};
use std::io::{self, BufWriter, Read, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};
use std::sync::{mpsc, Arc, Mutex};
use std::thread;
use std::time::Duration;
use thiserror::Error;

pub const LOG_FILE: &str = "generations.log.jsonl";
pub const GENERATIONS_FILE: &str = "generations.jsonl";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Endpoint {
    /// Base URL up to and including the API version, e.g. `http://host/v1`.
    pub base_url: String,
    pub model: String,
    /// Environment variable holding the bearer token. No auth header when unset.
    #[serde(default)]
    pub token_env: Option<String>,
    #[serde(default = "defaults::max_in_flight")]
    pub max_in_flight: usize,
    #[serde(default = "defaults::timeout_secs")]
    pub timeout_secs: u64,
    /// Retries after the first attempt.
    #[serde(default = "defaults::retries")]
    pub retries: u32,
    #[serde(default = "defaults::max_tokens")]
    pub max_tokens: u32,
    #[serde(default = "defaults::backoff_ms")]
    pub backoff_ms: u64,
    #[serde(default = "defaults::max_backoff_ms")]
    pub max_backoff_ms: u64,
}

mod defaults {
    pub fn max_in_flight() -> usize {
        4
    }
    pub fn timeout_secs() -> u64 {
        60
    }
    pub fn retries() -> u32 {
        5
    }
    pub fn max_tokens() -> u32 {
        64
    }
    pub fn backoff_ms() -> u64 {
        500
    }
    pub fn max_backoff_ms() -> u64 {
        30_000
    }
}

impl Endpoint {
    pub fn new(base_url: &str, model: &str) -> Self {
        Endpoint {
            base_url: base_url.to_string(),
            model: model.to_string(),
            token_env: None,
            max_in_flight: defaults::max_in_flight(),
            timeout_secs: defaults::timeout_secs(),
            retries: defaults::retries(),
            max_tokens: defaults::max_tokens(),
            backoff_ms: defaults::backoff_ms(),
            max_backoff_ms: defaults::max_backoff_ms(),
        }
    }

    fn url(&self) -> String {
        format!("{}/chat/completions", self.base_url.trim_end_matches('/'))
    }

    /// Delay before retry `n` (1-based): `backoff_ms * 2^(n-1)`, capped.
    fn backoff(&self, n: u32) -> Duration {
        let ms = self.backoff_ms.saturating_mul(1u64 << (n - 1).min(32));
        Duration::from_millis(ms.min(self.max_backoff_ms))
    }
}

#[derive(Debug, Error)]
pub enum ClientError {
    #[error("environment variable {0} (endpoint token_env) is not set")]
    MissingToken(String),
    #[error("prompt id '{0}' appears twice")]
    DuplicateId(String),
    #[error("{path}: line {line} is not a generation record: {source}")]
    CorruptLog { path: PathBuf, line: usize, source: serde_json::Error },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("cannot build HTTP client: {0}")]
    Http(#[from] reqwest::Error),
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> ClientError + '_ {
    move |source| ClientError::Io { path: path.to_path_buf(), source }
}

/// One line of the generation log; written before the text is parsed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogRecord {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generation: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub attempts: u32,
}

/// One line of the final generations file, in prompt order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Generation {
    pub id: String,
    pub generation: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RunSummary {
    pub total: usize,
    /// Already in the log from an earlier run.
    pub skipped: usize,
    pub succeeded: usize,
    /// Ids without a generation at the end of the run.
    pub failed: Vec<String>,
    pub retries: u64,
}

impl RunSummary {
    pub fn is_success(&self) -> bool {
        self.failed.is_empty()
    }
}

enum Failure {
    Retryable { message: String, retry_after: Option<Duration> },
    Permanent(String),
}

#[derive(Serialize)]
struct ChatRequest<'a> {
    model: &'a str,
    messages: [Message<'a>; 1],
    temperature: f32,
    max_tokens: u32,
}

#[derive(Serialize)]
struct Message<'a> {
    role: &'a str,
    content: &'a str,
}

#[derive(Deserialize)]
struct ChatResponse {
    choices: Vec<Choice>,
}

#[derive(Deserialize)]
struct Choice {
    #[serde(default)]
    message: Option<ChoiceMessage>,
    #[serde(default)]
    text: Option<String>,
}

#[derive(Deserialize)]
struct ChoiceMessage {
    #[serde(default)]
    content: Option<String>,
}

/// A Retry-After value in (possibly fractional) seconds. HTTP dates and
/// out-of-range values are ignored.
pub fn parse_retry_after(value: &str) -> Option<Duration> {
    Duration::try_from_secs_f64(value.trim().parse::<f64>().ok()?).ok()
}

fn retry_after(resp: &reqwest::blocking::Response) -> Option<Duration> {
    parse_retry_after(resp.headers().get(reqwest::header::RETRY_AFTER)?.to_str().ok()?)
}

/// Text of the first choice of a chat-completions response body:
/// `message.content`, else the legacy `text` field.
pub fn parse_completion(body: &str) -> Result<String, String> {
    let parsed: ChatResponse = serde_json::from_str(body).map_err(|e| format!("malformed response: {e}"))?;
    let choice = parsed.choices.into_iter().next().ok_or("response has no choices")?;
    choice.message.and_then(|m| m.content).or(choice.text).ok_or_else(|| "first choice has no text".into())
}

fn request_once(
    http: &reqwest::blocking::Client,
    ep: &Endpoint,
    token: Option<&str>,
    prompt: &str,
) -> Result<String, Failure> {
    let body = ChatRequest {
        model: &ep.model,
        messages: [Message { role: "user", content: prompt }],
        temperature: 0.0,
        max_tokens: ep.max_tokens,
    };
    let mut req = http.post(ep.url()).json(&body);
    if let Some(t) = token {
        req = req.bearer_auth(t);
    }
    let resp = req.send().map_err(|e| Failure::Retryable { message: e.to_string(), retry_after: None })?;
    let status = resp.status();
    if status.as_u16() == 429 || status.is_server_error() {
        let retry_after = retry_after(&resp);
        return Err(Failure::Retryable { message: format!("HTTP {status}"), retry_after });
    }
    if !status.is_success() {
        let text = resp.text().unwrap_or_default();
        let snippet: String = text.chars().take(200).collect();
        return Err(Failure::Permanent(format!("HTTP {status}: {snippet}")));
    }
    let text = resp.text().map_err(|e| Failure::Retryable { message: e.to_string(), retry_after: None })?;
    parse_completion(&text).map_err(Failure::Permanent)
}

/// Runs one prompt to success or final failure; `attempts` counts requests.
fn complete(http: &reqwest::blocking::Client, ep: &Endpoint, token: Option<&str>, p: &PromptRecord) -> LogRecord {
    let mut attempts = 0;
    loop {
        attempts += 1;
        match request_once(http, ep, token, &p.prompt) {
            Ok(text) => return LogRecord { id: p.id.clone(), generation: Some(text), error: None, attempts },
            Err(Failure::Retryable { retry_after, .. }) if attempts <= ep.retries => {
                let wait = retry_after.unwrap_or_else(|| ep.backoff(attempts));
                thread::sleep(wait.min(Duration::from_millis(ep.max_backoff_ms)));
            }
            Err(Failure::Retryable { message, .. }) | Err(Failure::Permanent(message)) => {
                return LogRecord { id: p.id.clone(), generation: None, error: Some(message), attempts }
            }
        }
    }
}

/// Reads the log, dropping a torn final line (an interrupted write) and
/// truncating the file to the last complete record.
pub fn read_log(path: &Path) -> Result<Vec<LogRecord>, ClientError> {
    let mut file = match OpenOptions::new().read(true).write(true).open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(io_err(path)(e)),
    };
    let mut text = String::new();
    file.read_to_string(&mut text).map_err(io_err(path))?;

    let mut records = Vec::new();
    let mut offset = 0usize;
    let mut good_end = 0usize;
    let lines: Vec<&str> = text.split_inclusive('\n').collect();
    for (i, raw) in lines.iter().enumerate() {
        offset += raw.len();
        let line = raw.trim();
        if line.is_empty() {
            // a blank tail without its newline is torn too
            if raw.ends_with('\n') {
                good_end = offset;
            }
            continue;
        }
        match serde_json::from_str::<LogRecord>(line) {
            Ok(r) if raw.ends_with('\n') => {
                records.push(r);
                good_end = offset;
            }
            // complete JSON but no newline: keep it, terminate the line
            Ok(r) => {
                records.push(r);
                file.seek(SeekFrom::End(0)).map_err(io_err(path))?;
                file.write_all(b"\n").map_err(io_err(path))?;
                good_end = offset + 1;
            }
            Err(_) if i + 1 == lines.len() => break,
            Err(source) => return Err(ClientError::CorruptLog { path: path.to_path_buf(), line: i + 1, source }),
        }
    }
    let len = file.metadata().map_err(io_err(path))?.len();
    if (good_end as u64) < len {
        file.set_len(good_end as u64).map_err(io_err(path))?;
    }
    Ok(records)
}

/// Sends every prompt not yet answered in `out_dir`'s log, then writes the
/// generations file in prompt order. Per-id failures are recorded in the
/// log and the summary; they do not stop the run.
pub fn call_model(ep: &Endpoint, prompts: &[PromptRecord], out_dir: &Path) -> Result<RunSummary, ClientError> {
    let mut ids = HashSet::new();
    for p in prompts {
        if !ids.insert(p.id.as_str()) {
            return Err(ClientError::DuplicateId(p.id.clone()));
        }
    }
    let token = match &ep.token_env {
        Some(var) => Some(std::env::var(var).map_err(|_| ClientError::MissingToken(var.clone()))?),
        None => None,
    };
    fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    let log_path = out_dir.join(LOG_FILE);

    let mut done: HashMap<String, String> = HashMap::new();
    for r in read_log(&log_path)? {
        if let Some(g) = r.generation {
            done.insert(r.id, g);
        }
    }
    let pending: VecDeque<PromptRecord> = prompts.iter().filter(|p| !done.contains_key(&p.id)).cloned().collect();
    let mut summary = RunSummary { total: prompts.len(), skipped: prompts.len() - pending.len(), ..Default::default() };

    if !pending.is_empty() {
        let http = reqwest::blocking::Client::builder().timeout(Duration::from_secs(ep.timeout_secs.max(1))).build()?;
        let log = OpenOptions::new().create(true).append(true).open(&log_path).map_err(io_err(&log_path))?;
        let mut log = BufWriter::new(log);
        let workers = ep.max_in_flight.clamp(1, pending.len());
        let queue = Arc::new(Mutex::new(pending));
        let (tx, rx) = mpsc::channel::<LogRecord>();

        thread::scope(|s| -> Result<(), ClientError> {
            for _ in 0..workers {
                let (queue, tx, http, token) = (Arc::clone(&queue), tx.clone(), &http, token.as_deref());
                s.spawn(move || loop {
                    let next = queue.lock().expect("queue lock").pop_front();
                    let Some(p) = next else { break };
                    if tx.send(complete(http, ep, token, &p)).is_err() {
                        break;
                    }
                });
            }
            drop(tx);
            for rec in rx {
                serde_json::to_writer(&mut log, &rec).expect("log record serializes");
                log.write_all(b"\n").and_then(|_| log.flush()).map_err(io_err(&log_path))?;
                summary.retries += u64::from(rec.attempts.saturating_sub(1));
                if let Some(g) = rec.generation {
                    summary.succeeded += 1;
                    done.insert(rec.id, g);
                }
            }
            Ok(())
        })?;
    }

    let gen_path = out_dir.join(GENERATIONS_FILE);
    let tmp = out_dir.join(format!("{GENERATIONS_FILE}.tmp"));
    {
        let mut w = BufWriter::new(File::create(&tmp).map_err(io_err(&tmp))?);
        for p in prompts {
            match done.get(&p.id) {
                Some(g) => {
                    let rec = Generation { id: p.id.clone(), generation: g.clone() };
                    serde_json::to_writer(&mut w, &rec).expect("generation serializes");
                    w.write_all(b"\n").map_err(io_err(&tmp))?;
                }
                None => summary.failed.push(p.id.clone()),
            }
        }
        w.flush().map_err(io_err(&tmp))?;
    }
    fs::rename(&tmp, &gen_path).map_err(io_err(&gen_path))?;
    Ok(summary)
}
