//! Evaluation metrics: relaxed accuracy, RNSS, RMS precision/recall/F1 and
//! corpus BLEU.

mod assignment;

use std::collections::HashMap;

use once_cell::sync::Lazy;
use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::number::parse_number;
use crate::table::{infer_column_kinds, Cell, ColumnKind, DataTable};
use crate::tasks::unflatten;

pub use assignment::{min_cost_assignment, pad_square};

/// Guards relative errors against a zero gold value.
pub const EPS: f64 = 1e-9;
pub const RA_TOLERANCE: f64 = 0.05;
pub const BLEU_SMOOTHING: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MetricError {
    #[error("{preds} predictions but {golds} references")]
    LengthMismatch { preds: usize, golds: usize },
}

/// 1 when both sides parse as numbers within 5% of gold (exact when gold is
/// 0), or when non-numeric answers match case-insensitively; else 0.
pub fn relaxed_accuracy(pred: &str, gold: &str) -> f64 {
    match (parse_number(pred.trim()), parse_number(gold.trim())) {
        (Some(p), Some(g)) => {
            let (p, g) = (p.value, g.value);
            let ok = if g == 0.0 {
                p == 0.0
            } else {
                // Relative slack keeps the verdict stable under rescaling.
                (p - g).abs() <= RA_TOLERANCE * g.abs() * (1.0 + 1e-9)
            };
            f64::from(u8::from(ok))
        }
        _ => f64::from(u8::from(pred.trim().to_lowercase() == gold.trim().to_lowercase())),
    }
}

static NUMBER_RE: Lazy<Regex> =
    Lazy::new(|| Regex::new(r"[+-]?(?:\d{1,3}(?:,\d{3})+|\d+)(?:\.\d+)?%?|[+-]?\.\d+%?").expect("valid regex"));

/// Numbers mentioned anywhere in free text.
pub fn numbers_in_text(text: &str) -> Vec<f64> {
    NUMBER_RE
        .find_iter(text)
        .filter_map(|m| parse_number(m.as_str()).map(|p| p.value))
        .collect()
}

/// Numeric cells of a table, row-major.
pub fn table_numbers(table: &DataTable) -> Vec<f64> {
    table.rows().iter().flatten().filter_map(Cell::as_number).collect()
}

/// Reads a flattened table, inferring column kinds.
pub fn parse_table_text(text: &str) -> Option<DataTable> {
    let grid = unflatten(text.trim()).ok()?;
    infer_column_kinds(&grid).ok()
}

/// Numbers of a predicted table given as text: numeric cells when it parses
/// as a flattened table, every number in the text otherwise.
pub fn prediction_numbers(text: &str) -> Vec<f64> {
    match parse_table_text(text) {
        Some(t) if t.columns().iter().any(|c| c.kind == ColumnKind::Numeric) => table_numbers(&t),
        _ => numbers_in_text(text),
    }
}

fn relative_distance(p: f64, g: f64) -> f64 {
    ((p - g).abs() / g.abs().max(EPS)).min(1.0)
}

/// Relative number set similarity between two number multisets. Both empty
/// scores 1.
pub fn rnss(pred: &[f64], gold: &[f64]) -> f64 {
    let n = pred.len().max(gold.len());
    if n == 0 {
        return 1.0;
    }
    let cost: Vec<Vec<f64>> = pred
        .iter()
        .map(|p| gold.iter().map(|g| relative_distance(*p, *g)).collect())
        .collect();
    let (_, total) = min_cost_assignment(&pad_square(&cost, gold.len(), 1.0));
    (1.0 - total / n as f64).clamp(0.0, 1.0)
}

pub fn rnss_tables(pred: &DataTable, gold: &DataTable) -> f64 {
    rnss(&table_numbers(pred), &table_numbers(gold))
}

/// A table cell addressed by normalized row and column keys.
#[derive(Debug, Clone, PartialEq)]
pub struct TableEntry {
    pub row_key: String,
    pub col_key: String,
    pub value: EntryValue,
}

#[derive(Debug, Clone, PartialEq)]
pub enum EntryValue {
    Number(f64),
    Text(String),
}

pub fn normalize_key(k: &str) -> String {
    k.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase()
}

/// One entry per non-key cell. The first categorical column keys the rows
/// (the row index when there is none).
pub fn table_entries(table: &DataTable) -> Vec<TableEntry> {
    let key_col = table.columns().iter().position(|c| c.kind == ColumnKind::Categorical);
    let mut out = Vec::new();
    for (ri, row) in table.rows().iter().enumerate() {
        let row_key = match key_col {
            Some(k) => normalize_key(&row[k].render()),
            None => ri.to_string(),
        };
        for (ci, cell) in row.iter().enumerate() {
            if Some(ci) == key_col {
                continue;
            }
            let value = match cell {
                Cell::Number(v) => EntryValue::Number(*v),
                Cell::Text(t) => EntryValue::Text(normalize_key(t)),
            };
            out.push(TableEntry {
                row_key: row_key.clone(),
                col_key: normalize_key(&table.columns()[ci].name),
                value,
            });
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RmsScore {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

fn pair_score(p: &TableEntry, g: &TableEntry) -> f64 {
    let key = strsim::normalized_levenshtein(
        &format!("{} {}", p.row_key, p.col_key),
        &format!("{} {}", g.row_key, g.col_key),
    );
    let value = match (&p.value, &g.value) {
        (EntryValue::Number(a), EntryValue::Number(b)) => 1.0 - relative_distance(*a, *b),
        (EntryValue::Text(a), EntryValue::Text(b)) => f64::from(u8::from(a == b)),
        _ => 0.0,
    };
    key * value
}

/// RMS over entry lists with an optimal one-to-one matching.
pub fn rms_entries(pred: &[TableEntry], gold: &[TableEntry]) -> RmsScore {
    if pred.is_empty() || gold.is_empty() {
        return RmsScore {
            precision: 0.0,
            recall: 0.0,
            f1: 0.0,
        };
    }
    let cost: Vec<Vec<f64>> = pred
        .iter()
        .map(|p| gold.iter().map(|g| 1.0 - pair_score(p, g)).collect())
        .collect();
    let square = pad_square(&cost, gold.len(), 1.0);
    let (rows, _) = min_cost_assignment(&square);
    let total: f64 = rows
        .iter()
        .enumerate()
        .filter(|(i, j)| *i < pred.len() && **j < gold.len())
        .map(|(i, j)| pair_score(&pred[i], &gold[*j]))
        .sum();
    let precision = total / pred.len() as f64;
    let recall = total / gold.len() as f64;
    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    RmsScore { precision, recall, f1 }
}

/// RMS of `pred` against `gold`, also trying `pred` transposed and keeping
/// the better F1.
pub fn rms_f1(pred: &DataTable, gold: &DataTable) -> RmsScore {
    let gold_entries = table_entries(gold);
    let straight = table_entries(pred);
    let transposed: Vec<TableEntry> = straight
        .iter()
        .map(|e| TableEntry {
            row_key: e.col_key.clone(),
            col_key: e.row_key.clone(),
            value: e.value.clone(),
        })
        .collect();
    let a = rms_entries(&straight, &gold_entries);
    let b = rms_entries(&transposed, &gold_entries);
    if b.f1 > a.f1 {
        b
    } else {
        a
    }
}

/// Lowercased tokens; each punctuation character is its own token.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    for c in text.chars() {
        if c.is_alphanumeric() {
            cur.extend(c.to_lowercase());
        } else {
            if !cur.is_empty() {
                out.push(std::mem::take(&mut cur));
            }
            if !c.is_whitespace() {
                out.push(c.to_string());
            }
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

fn ngram_counts(tokens: &[String], n: usize) -> HashMap<&[String], usize> {
    let mut m = HashMap::new();
    if tokens.len() >= n {
        for w in tokens.windows(n) {
            *m.entry(w).or_insert(0) += 1;
        }
    }
    m
}

/// Corpus BLEU-4 on a 0-100 scale with brevity penalty. Zero n-gram
/// precisions (including 0/0) are replaced by a tiny epsilon.
pub fn corpus_bleu(preds: &[String], golds: &[Vec<String>]) -> Result<f64, MetricError> {
    if preds.len() != golds.len() {
        return Err(MetricError::LengthMismatch {
            preds: preds.len(),
            golds: golds.len(),
        });
    }
    let mut matched = [0usize; 4];
    let mut totals = [0usize; 4];
    let (mut cand_len, mut ref_len) = (0usize, 0usize);
    for (p, refs) in preds.iter().zip(golds) {
        let pt = tokenize(p);
        let rts: Vec<Vec<String>> = refs.iter().map(|r| tokenize(r)).collect();
        cand_len += pt.len();
        ref_len += rts
            .iter()
            .map(Vec::len)
            .min_by_key(|l| ((*l as i64 - pt.len() as i64).abs(), *l))
            .unwrap_or(0);
        for n in 1..=4 {
            let counts = ngram_counts(&pt, n);
            let mut max_ref: HashMap<&[String], usize> = HashMap::new();
            for rt in &rts {
                for (g, c) in ngram_counts(rt, n) {
                    let e = max_ref.entry(g).or_insert(0);
                    *e = (*e).max(c);
                }
            }
            for (g, c) in &counts {
                matched[n - 1] += (*c).min(max_ref.get(g).copied().unwrap_or(0));
                totals[n - 1] += c;
            }
        }
    }
    if cand_len == 0 {
        return Ok(0.0);
    }
    let log_p: f64 = (0..4)
        .map(|i| {
            if matched[i] == 0 {
                BLEU_SMOOTHING.ln()
            } else {
                (matched[i] as f64 / totals[i] as f64).ln()
            }
        })
        .sum::<f64>()
        / 4.0;
    let bp = if cand_len > ref_len {
        1.0
    } else {
        (1.0 - ref_len as f64 / cand_len as f64).exp()
    };
    Ok(100.0 * bp * log_p.exp())
}

/// Scores for one prediction; metrics that do not apply are absent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExampleScore {
    pub id: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ra: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rnss: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rms: Option<RmsScore>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub ra: Option<f64>,
    pub rnss: Option<f64>,
    pub rms_precision: Option<f64>,
    pub rms_recall: Option<f64>,
    pub rms_f1: Option<f64>,
    pub bleu: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub per_example: Vec<ExampleScore>,
    pub aggregate: Aggregate,
}

/// Which metric family scores an example.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalKind {
    /// Relaxed accuracy.
    Qa,
    /// RNSS and RMS.
    Table,
    /// BLEU.
    Text,
}

/// A scored pair. Without a kind, table metrics apply when the gold text
/// parses as a table with a numeric column, and BLEU plus relaxed accuracy
/// apply otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalExample {
    pub id: String,
    pub prediction: String,
    pub gold: String,
    pub kind: Option<EvalKind>,
}

fn mean_of(xs: impl Iterator<Item = f64>) -> Option<f64> {
    let v: Vec<f64> = xs.collect();
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

pub fn evaluate(examples: &[EvalExample]) -> MetricReport {
    let mut per_example = Vec::new();
    let (mut bleu_preds, mut bleu_golds) = (Vec::new(), Vec::new());
    for ex in examples {
        let gold_table =
            parse_table_text(&ex.gold).filter(|t| t.columns().iter().any(|c| c.kind == ColumnKind::Numeric));
        let kind = ex.kind.unwrap_or(if gold_table.is_some() {
            EvalKind::Table
        } else {
            EvalKind::Qa
        });
        let mut score = ExampleScore {
            id: ex.id.clone(),
            ra: None,
            rnss: None,
            rms: None,
        };
        match kind {
            EvalKind::Table => {
                let gold_nums = gold_table
                    .as_ref()
                    .map(table_numbers)
                    .unwrap_or_else(|| numbers_in_text(&ex.gold));
                score.rnss = Some(rnss(&prediction_numbers(&ex.prediction), &gold_nums));
                score.rms = Some(match (parse_table_text(&ex.prediction), &gold_table) {
                    (Some(p), Some(g)) => rms_f1(&p, g),
                    _ => RmsScore {
                        precision: 0.0,
                        recall: 0.0,
                        f1: 0.0,
                    },
                });
            }
            EvalKind::Qa => score.ra = Some(relaxed_accuracy(&ex.prediction, &ex.gold)),
            EvalKind::Text => {}
        }
        if kind == EvalKind::Text || (ex.kind.is_none() && kind == EvalKind::Qa) {
            bleu_preds.push(ex.prediction.clone());
            bleu_golds.push(vec![ex.gold.clone()]);
        }
        per_example.push(score);
    }
    let aggregate = Aggregate {
        ra: mean_of(per_example.iter().filter_map(|s| s.ra)),
        rnss: mean_of(per_example.iter().filter_map(|s| s.rnss)),
        rms_precision: mean_of(per_example.iter().filter_map(|s| s.rms.map(|r| r.precision))),
        rms_recall: mean_of(per_example.iter().filter_map(|s| s.rms.map(|r| r.recall))),
        rms_f1: mean_of(per_example.iter().filter_map(|s| s.rms.map(|r| r.f1))),
        bleu: (!bleu_preds.is_empty()).then(|| corpus_bleu(&bleu_preds, &bleu_golds).expect("equal lengths")),
    };
    MetricReport { per_example, aggregate }
}
