//! stats and eval.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::Path;

use once_cell::sync::Lazy;
use regex::Regex;
use serde::{Deserialize, Serialize};

use super::{read_jsonl, read_manifest, CorpusError, SUMMARIES};
use crate::distill::CheckpointEntry;
use crate::metrics::{evaluate, EvalExample, EvalKind, MetricReport};
use crate::synth::ChartType;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypeShare {
    pub chart_type: ChartType,
    pub count: usize,
    pub percent: f64,
}

/// Averages over a set of texts; all zero for an empty set.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LinguisticStats {
    pub texts: usize,
    pub vocab: usize,
    pub avg_chars: f64,
    pub avg_tokens: f64,
    pub avg_sentences: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub charts: usize,
    /// Every chart type, in canonical order.
    pub types: Vec<TypeShare>,
    pub summaries: LinguisticStats,
}

static SENTENCE_END: Lazy<Regex> = Lazy::new(|| Regex::new(r"[.!?]\s+").expect("valid regex"));

/// Splits after `.`, `!` or `?` followed by whitespace. A decimal point is
/// never followed by whitespace, so numbers stay whole.
pub fn split_sentences(text: &str) -> Vec<&str> {
    SENTENCE_END
        .split(text)
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect()
}

pub fn linguistic_stats<S: AsRef<str>>(texts: &[S]) -> LinguisticStats {
    if texts.is_empty() {
        return LinguisticStats::default();
    }
    let n = texts.len() as f64;
    let mut vocab = HashSet::new();
    let (mut chars, mut tokens, mut sentences) = (0usize, 0usize, 0usize);
    for t in texts {
        let t = t.as_ref();
        chars += t.chars().count();
        for tok in t.split_whitespace() {
            tokens += 1;
            vocab.insert(tok.to_lowercase());
        }
        sentences += split_sentences(t).len();
    }
    LinguisticStats {
        texts: texts.len(),
        vocab: vocab.len(),
        avg_chars: chars as f64 / n,
        avg_tokens: tokens as f64 / n,
        avg_sentences: sentences as f64 / n,
    }
}

/// Chart-type distribution from the manifest, and linguistic statistics
/// of `summaries.jsonl` when present.
pub fn cmd_stats(corpus: &Path) -> Result<CorpusStats, CorpusError> {
    let manifest = read_manifest(corpus)?;
    let mut counts: BTreeMap<ChartType, usize> = BTreeMap::new();
    for e in &manifest {
        *counts.entry(e.chart_type).or_default() += 1;
    }
    let total = manifest.len();
    let types = ChartType::ALL
        .iter()
        .map(|t| {
            let count = counts.get(t).copied().unwrap_or(0);
            TypeShare {
                chart_type: *t,
                count,
                percent: if total == 0 {
                    0.0
                } else {
                    100.0 * count as f64 / total as f64
                },
            }
        })
        .collect();
    let path = corpus.join(SUMMARIES);
    let summaries: Vec<String> = if path.exists() {
        read_jsonl::<CheckpointEntry>(&path, false)?
            .into_iter()
            .map(|e| e.summary)
            .collect()
    } else {
        Vec::new()
    };
    Ok(CorpusStats {
        charts: total,
        types,
        summaries: linguistic_stats(&summaries),
    })
}

pub fn format_stats(s: &CorpusStats) -> String {
    let mut lines = vec!["| Type | Count | % |".to_string(), "|---|---|---|".to_string()];
    for t in &s.types {
        lines.push(format!(
            "| {} | {} | {:.2} |",
            t.chart_type.as_str(),
            t.count,
            t.percent
        ));
    }
    lines.push(format!(
        "| Total | {} | {:.2} |",
        s.charts,
        s.types.iter().map(|t| t.percent).sum::<f64>()
    ));
    let l = &s.summaries;
    lines.push(String::new());
    lines.push("| Summaries | #Vocab | Avg. characters | Avg. tokens | Avg. sentences |".into());
    lines.push("|---|---|---|---|---|".into());
    lines.push(format!(
        "| {} | {} | {:.2} | {:.2} | {:.2} |",
        l.texts, l.vocab, l.avg_chars, l.avg_tokens, l.avg_sentences
    ));
    lines.join("\n")
}

#[derive(Deserialize)]
struct Prediction {
    id: String,
    output: String,
}

#[derive(Deserialize)]
struct Gold {
    id: String,
    target: String,
    #[serde(default)]
    kind: Option<String>,
}

/// Metric family for a gold `kind` field: a metric family name or a task
/// kind.
fn eval_kind(name: &str) -> Option<EvalKind> {
    match name {
        "qa" | "ra" | "qa_reasoning" | "qa_open" => Some(EvalKind::Qa),
        "table" | "rnss" | "rms" | "value_estimation" => Some(EvalKind::Table),
        "text" | "bleu" | "summary" => Some(EvalKind::Text),
        _ => None,
    }
}

/// Parses a metric name as accepted by `eval --metric`.
pub fn parse_metric(name: &str) -> Option<EvalKind> {
    eval_kind(&name.to_ascii_lowercase())
}

/// Scores `{id, output}` predictions against `{id, target, kind?}` gold
/// records, in gold order. `metric` overrides every record's kind.
pub fn cmd_eval(predictions: &Path, gold: &Path, metric: Option<EvalKind>) -> Result<MetricReport, CorpusError> {
    let preds: Vec<Prediction> = read_jsonl(predictions, false)?;
    let golds: Vec<Gold> = read_jsonl(gold, false)?;
    let mut by_id: HashMap<&str, &str> = HashMap::new();
    for p in &preds {
        if by_id.insert(&p.id, &p.output).is_some() {
            return Err(CorpusError::DuplicateId(p.id.clone()));
        }
    }
    let mut gold_ids = HashSet::new();
    for (i, g) in golds.iter().enumerate() {
        if !gold_ids.insert(g.id.as_str()) {
            return Err(CorpusError::DuplicateId(g.id.clone()));
        }
        if let Some(k) = &g.kind {
            if eval_kind(k).is_none() {
                return Err(CorpusError::BadRecord {
                    path: gold.to_path_buf(),
                    line: i + 1,
                    message: format!("unknown kind {k:?}"),
                });
            }
        }
    }
    let orphans: Vec<String> = preds
        .iter()
        .filter(|p| !gold_ids.contains(p.id.as_str()))
        .map(|p| p.id.clone())
        .collect();
    if !orphans.is_empty() {
        return Err(CorpusError::MissingGold(orphans));
    }
    let unanswered: Vec<String> = golds
        .iter()
        .filter(|g| !by_id.contains_key(g.id.as_str()))
        .map(|g| g.id.clone())
        .collect();
    if !unanswered.is_empty() {
        return Err(CorpusError::LengthMismatch {
            predictions: preds.len(),
            gold: golds.len(),
            missing: unanswered,
        });
    }
    let examples: Vec<EvalExample> = golds
        .iter()
        .map(|g| EvalExample {
            id: g.id.clone(),
            prediction: by_id[g.id.as_str()].to_string(),
            gold: g.target.clone(),
            kind: metric.or_else(|| g.kind.as_deref().and_then(eval_kind)),
        })
        .collect();
    Ok(evaluate(&examples))
}
