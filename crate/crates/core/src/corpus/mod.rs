//! Operator surface: configuration, the on-disk corpus layout and the
//! end-to-end commands behind the CLI.
//!
//! Layout of a corpus directory:
//!
//! ```text
//! manifest.jsonl               one ManifestEntry per chart, sorted by id
//! charts/<id>.svg              the chart
//! charts/<id>.json             its sidecar (RenderedChart)
//! charts/<id>.table.json       its source ChartReadyTable
//! summaries.jsonl              {id, summary}, written by distill
//! open_qa.jsonl                optional {chart_id, question, answer} pairs
//! tasks/<kind>.jsonl           TaskRecords, written by gen-tasks
//! ```

mod pipeline;
mod report;
pub mod tablegen;

use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::synth::{Canvas, ChartType, ChartTypeWeights, Palette, StyleParams, BAR_THICKNESS_RANGE, FONT_PX_RANGE};

pub use pipeline::{
    cmd_distill, cmd_distill_with, cmd_extract, cmd_gen_tasks, cmd_synthesize, format_task_table, DistillReport,
    ExtractReport, GenTasksReport, SynthesizeReport, AUDIT_LOG, CHECKPOINT, TASK_COLUMNS,
};
pub use report::{
    cmd_eval, cmd_stats, format_stats, linguistic_stats, parse_metric, split_sentences, CorpusStats, LinguisticStats,
    TypeShare,
};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("i/o error on {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("{path} line {line}: {message}")]
    BadRecord {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("no manifest at {0}")]
    MissingManifest(PathBuf),
    #[error("ids without a gold record: {0:?}")]
    MissingGold(Vec<String>),
    #[error("prediction/gold length mismatch: {predictions} predictions, {gold} gold; unanswered ids: {missing:?}")]
    LengthMismatch {
        predictions: usize,
        gold: usize,
        missing: Vec<String>,
    },
    #[error("duplicate id {0}")]
    DuplicateId(String),
    #[error(transparent)]
    Synth(#[from] crate::synth::SynthError),
    #[error(transparent)]
    Distill(#[from] crate::distill::DistillError),
}

pub(crate) fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CorpusError + '_ {
    move |source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Per-chart record caps for each task kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct TaskCounts {
    pub table: usize,
    pub value_estimation: usize,
    pub qa_reasoning: usize,
    pub qa_open: usize,
    pub summary: usize,
}

impl Default for TaskCounts {
    fn default() -> Self {
        TaskCounts {
            table: 1,
            value_estimation: 1,
            qa_reasoning: 10,
            qa_open: 3,
            summary: 1,
        }
    }
}

/// Narrows the randomized style draw. Unset fields keep the full range.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StyleOverrides {
    pub show_data_labels: Option<bool>,
    pub palettes: Option<Vec<Palette>>,
    pub bar_thickness: Option<(f64, f64)>,
    pub font_px: Option<(u32, u32)>,
}

impl StyleOverrides {
    fn validate(&self) -> Result<(), String> {
        if let Some(p) = &self.palettes {
            if p.is_empty() {
                return Err("style.palettes is empty".into());
            }
        }
        if let Some((lo, hi)) = self.bar_thickness {
            if !(BAR_THICKNESS_RANGE.0 <= lo && lo <= hi && hi <= BAR_THICKNESS_RANGE.1) {
                return Err(format!("style.bar_thickness must lie within {BAR_THICKNESS_RANGE:?}"));
            }
        }
        if let Some((lo, hi)) = self.font_px {
            if !(FONT_PX_RANGE.0 <= lo && lo <= hi && hi <= FONT_PX_RANGE.1) {
                return Err(format!("style.font_px must lie within {FONT_PX_RANGE:?}"));
            }
        }
        Ok(())
    }

    pub fn apply(&self, mut style: StyleParams, rng: &mut ChaCha8Rng) -> StyleParams {
        if let Some(v) = self.show_data_labels {
            style.show_data_labels = v;
        }
        if let Some(p) = &self.palettes {
            style.palette = p[rng.gen_range(0..p.len())];
        }
        if let Some((lo, hi)) = self.bar_thickness {
            style.bar_thickness = crate::number::round2(rng.gen_range(lo..=hi)).clamp(lo, hi);
        }
        if let Some((lo, hi)) = self.font_px {
            style.font_px = rng.gen_range(lo..=hi);
        }
        style
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DemonstrationConfig {
    pub input: String,
    pub summary: String,
}

/// Pipeline configuration, read from JSON. Every field has a default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub seed: u64,
    /// Charts to synthesize. In table-input mode, an upper bound.
    pub charts: usize,
    pub chart_type_weights: ChartTypeWeights,
    pub tasks: TaskCounts,
    pub style: StyleOverrides,
    pub canvas: Canvas,
    pub output_dir: PathBuf,
    /// Directory of CSV / JSON tables to decompose instead of generating
    /// random ones.
    pub input_tables: Option<PathBuf>,
    /// JSON file holding a `BackendConfig`; the offline fallback is used
    /// when absent.
    pub backend_config: Option<PathBuf>,
    pub demonstration: Option<DemonstrationConfig>,
    /// Cap on summary requests per distill run.
    pub max_requests: Option<usize>,
    pub workers: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            seed: 0,
            charts: 100,
            chart_type_weights: ChartTypeWeights::default(),
            tasks: TaskCounts::default(),
            style: StyleOverrides::default(),
            canvas: Canvas::default(),
            output_dir: PathBuf::from("corpus"),
            input_tables: None,
            backend_config: None,
            demonstration: None,
            max_requests: None,
            workers: 4,
        }
    }
}

impl PipelineConfig {
    pub fn from_json_str(s: &str) -> Result<Self, CorpusError> {
        let c: PipelineConfig = serde_json::from_str(s).map_err(|e| CorpusError::InvalidConfig(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self, CorpusError> {
        Self::from_json_str(&fs::read_to_string(path).map_err(io_err(path))?)
    }

    pub fn validate(&self) -> Result<(), CorpusError> {
        let bad = |m: String| Err(CorpusError::InvalidConfig(m));
        if !self.chart_type_weights.is_valid() {
            return bad("chart_type_weights must be finite, non-negative and sum to more than 0".into());
        }
        if let Err(m) = self.style.validate() {
            return bad(m);
        }
        if !(self.canvas.width >= 400.0 && self.canvas.height >= 300.0)
            || !self.canvas.width.is_finite()
            || !self.canvas.height.is_finite()
        {
            return bad("canvas must be at least 400x300".into());
        }
        if self.workers == 0 {
            return bad("workers must be at least 1".into());
        }
        Ok(())
    }
}

/// One synthesized chart. Paths are relative to the corpus directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    pub chart_type: ChartType,
    pub svg: String,
    pub sidecar: String,
    pub table: String,
    pub canvas: Canvas,
    pub palette: Palette,
    pub data_labels: bool,
    pub marks: usize,
}

pub const MANIFEST: &str = "manifest.jsonl";
pub const SUMMARIES: &str = "summaries.jsonl";
pub const OPEN_QA: &str = "open_qa.jsonl";
pub const TASKS_DIR: &str = "tasks";
pub const CHARTS_DIR: &str = "charts";

pub fn chart_id(index: usize) -> String {
    format!("chart-{index:06}")
}

/// SplitMix64 finalizer; mixes a (seed, index) pair into an RNG seed.
pub fn mix_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Reads a JSONL file. Blank lines are skipped; with `lenient`, a torn final
/// line (from an interrupted writer) is ignored too.
pub fn read_jsonl<T: DeserializeOwned>(path: &Path, lenient: bool) -> Result<Vec<T>, CorpusError> {
    let file = File::open(path).map_err(io_err(path))?;
    let lines: Vec<String> = BufReader::new(file)
        .lines()
        .collect::<Result<_, _>>()
        .map_err(io_err(path))?;
    let last = lines.len();
    let mut out = Vec::new();
    for (i, line) in lines.iter().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str(line) {
            Ok(v) => out.push(v),
            Err(_) if lenient && i + 1 == last => {}
            Err(e) => {
                return Err(CorpusError::BadRecord {
                    path: path.to_path_buf(),
                    line: i + 1,
                    message: e.to_string(),
                })
            }
        }
    }
    Ok(out)
}

/// Writes records one per line through a temporary file and a rename.
pub fn write_jsonl<T: Serialize>(path: &Path, records: &[T]) -> Result<(), CorpusError> {
    let mut tmp_name = path.file_name().unwrap_or_default().to_os_string();
    tmp_name.push(".tmp");
    let tmp = path.with_file_name(tmp_name);
    {
        let mut f = io::BufWriter::new(File::create(&tmp).map_err(io_err(&tmp))?);
        for r in records {
            let line = serde_json::to_string(r).expect("records serialize");
            writeln!(f, "{line}").map_err(io_err(&tmp))?;
        }
        f.flush().map_err(io_err(&tmp))?;
    }
    fs::rename(&tmp, path).map_err(io_err(path))
}

pub fn read_manifest(corpus: &Path) -> Result<Vec<ManifestEntry>, CorpusError> {
    let path = corpus.join(MANIFEST);
    if !path.exists() {
        return Err(CorpusError::MissingManifest(path));
    }
    read_jsonl(&path, false)
}
