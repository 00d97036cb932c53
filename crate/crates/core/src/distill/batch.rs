//! Budgeted, resumable batch summarization.

use std::collections::{BTreeMap, HashSet};
use std::fs::{self, File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::backend::Backend;
use super::prompt::PromptBundle;
use super::DistillError;

#[derive(Debug, Clone, PartialEq)]
pub struct BatchJob {
    pub id: String,
    pub bundle: PromptBundle,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckpointEntry {
    pub id: String,
    pub summary: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BatchOptions {
    /// Cap on backend requests issued by this run.
    pub max_requests: Option<usize>,
    /// Requests in flight at once.
    pub workers: usize,
}

impl Default for BatchOptions {
    fn default() -> Self {
        BatchOptions {
            max_requests: None,
            workers: 4,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BatchOutcome {
    /// Every checkpointed summary, this run's and earlier ones, by id.
    pub summaries: BTreeMap<String, String>,
    pub newly_completed: usize,
    pub skipped: usize,
    pub failed: Vec<(String, DistillError)>,
    /// Jobs left unattempted because the request budget ran out.
    pub over_budget: usize,
}

pub fn read_checkpoint(path: &Path) -> io::Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(out),
        Err(e) => return Err(e),
    };
    for line in BufReader::new(file).lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let e: CheckpointEntry =
            serde_json::from_str(&line).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))?;
        out.insert(e.id, e.summary);
    }
    Ok(out)
}

fn tmp_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".tmp");
    path.with_file_name(name)
}

/// Writes the whole checkpoint to a temporary file, then renames it over
/// the old one.
pub fn write_checkpoint(path: &Path, entries: &BTreeMap<String, String>) -> io::Result<()> {
    let tmp = tmp_path(path);
    {
        let mut f = File::create(&tmp)?;
        for (id, summary) in entries {
            let line = serde_json::to_string(&CheckpointEntry {
                id: id.clone(),
                summary: summary.clone(),
            })?;
            writeln!(f, "{line}")?;
        }
        f.sync_all()?;
    }
    fs::rename(&tmp, path)
}

/// Summarizes every job not already in `checkpoint`, saving after each
/// success. Prompts and replies go to `audit` with secrets redacted.
pub fn run_batch(
    jobs: &[BatchJob],
    backend: &dyn Backend,
    checkpoint: &Path,
    audit: Option<&Path>,
    options: BatchOptions,
) -> io::Result<BatchOutcome> {
    let done = read_checkpoint(checkpoint)?;
    let mut seen = HashSet::new();
    let pending: Vec<&BatchJob> = jobs
        .iter()
        .filter(|j| seen.insert(j.id.clone()))
        .filter(|j| !done.contains_key(&j.id))
        .collect();
    let skipped = seen.len() - pending.len();
    let state = Mutex::new((done, Vec::new(), 0usize));
    let audit_file = match audit {
        Some(p) => Some(Mutex::new(OpenOptions::new().create(true).append(true).open(p)?)),
        None => None,
    };
    let issued = AtomicUsize::new(0);
    let over_budget = AtomicUsize::new(0);
    let io_error: Mutex<Option<io::Error>> = Mutex::new(None);

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(options.workers.max(1))
        .build()
        .map_err(io::Error::other)?;
    pool.install(|| {
        pending.par_iter().for_each(|job| {
            if let Some(max) = options.max_requests {
                if issued.fetch_add(1, Ordering::SeqCst) >= max {
                    over_budget.fetch_add(1, Ordering::SeqCst);
                    return;
                }
            }
            let result = backend.complete(&job.bundle);
            if let Some(f) = &audit_file {
                let (reply, error) = match &result {
                    Ok(s) => (Some(backend.redact(s)), None),
                    Err(e) => (None, Some(backend.redact(&e.to_string()))),
                };
                let line = json!({
                    "id": job.id,
                    "prompt": backend.redact(&job.bundle.to_text()),
                    "reply": reply,
                    "error": error,
                });
                let mut f = f.lock().expect("audit lock");
                if let Err(e) = writeln!(f, "{line}") {
                    io_error.lock().expect("error lock").get_or_insert(e);
                }
            }
            let mut st = state.lock().expect("state lock");
            match result {
                Ok(summary) => {
                    st.0.insert(job.id.clone(), summary);
                    st.2 += 1;
                    if let Err(e) = write_checkpoint(checkpoint, &st.0) {
                        io_error.lock().expect("error lock").get_or_insert(e);
                    }
                }
                Err(e) => st.1.push((job.id.clone(), e)),
            }
        });
    });
    if let Some(e) = io_error.into_inner().expect("error lock") {
        return Err(e);
    }
    let (summaries, mut failed, newly_completed) = state.into_inner().expect("state lock");
    failed.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(BatchOutcome {
        summaries,
        newly_completed,
        skipped,
        failed,
        over_budget: over_budget.into_inner(),
    })
}
