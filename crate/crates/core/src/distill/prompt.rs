//! Prompt material for table summaries, OCR layouts and rubric grading.

use serde::{Deserialize, Serialize};

use super::DistillError;
use crate::geom::Rect;
use crate::table::DataTable;
use crate::tasks::flatten_table;

pub const TABLE_PREAMBLE: &str = "Write a short factual summary of the chart described by the data table. \
Mention the overall trend and the most notable values. Use only numbers that appear in the table.";
pub const OCR_PREAMBLE: &str = "The text below was read from a chart image and keeps its layout. \
Write a short factual summary of the chart. Use only numbers that appear in the text.";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decoding {
    pub max_tokens: u32,
    pub temperature: f64,
}

impl Default for Decoding {
    fn default() -> Self {
        Decoding {
            max_tokens: 256,
            temperature: 0.0,
        }
    }
}

/// A worked example shown before the target: input text and its summary.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Demonstration {
    pub input: String,
    pub summary: String,
}

impl Demonstration {
    pub fn new(input: impl Into<String>, summary: impl Into<String>) -> Result<Self, DistillError> {
        let d = Demonstration {
            input: input.into(),
            summary: summary.into(),
        };
        if d.input.trim().is_empty() || d.summary.trim().is_empty() {
            return Err(DistillError::EmptyDemonstration);
        }
        Ok(d)
    }
}

/// One-shot prompt: preamble, a single demonstration, then the payload.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PromptBundle {
    pub system_preamble: String,
    pub demonstration: Demonstration,
    pub target_payload: String,
    pub decoding: Decoding,
}

impl PromptBundle {
    pub fn new(
        system_preamble: impl Into<String>,
        demonstration: Demonstration,
        target_payload: impl Into<String>,
        decoding: Decoding,
    ) -> Result<Self, DistillError> {
        let target_payload = target_payload.into();
        if target_payload.trim().is_empty() {
            return Err(DistillError::EmptyPayload);
        }
        Demonstration::new(demonstration.input.clone(), demonstration.summary.clone())?;
        Ok(PromptBundle {
            system_preamble: system_preamble.into(),
            demonstration,
            target_payload,
            decoding,
        })
    }

    /// Plain-text rendering, for completion-style backends and audit logs.
    pub fn to_text(&self) -> String {
        format!(
            "{}\n\n{}\nSummary: {}\n\n{}\nSummary:",
            self.system_preamble, self.demonstration.input, self.demonstration.summary, self.target_payload
        )
    }
}

pub const TITLE_PREFIX: &str = "Title: ";
pub const UNITS_PREFIX: &str = "Units: ";

/// Title and unit lines (when present) followed by the flattened table.
pub fn table_payload(table: &DataTable) -> String {
    let mut out = String::new();
    if let Some(t) = table.title().filter(|t| !t.trim().is_empty()) {
        out.push_str(TITLE_PREFIX);
        out.push_str(t);
        out.push('\n');
    }
    let units: Vec<String> = table
        .columns()
        .iter()
        .filter_map(|c| c.unit.as_ref().map(|u| format!("{} ({u})", c.name)))
        .collect();
    if !units.is_empty() {
        out.push_str(UNITS_PREFIX);
        out.push_str(&units.join(", "));
        out.push('\n');
    }
    out.push_str(&flatten_table(table));
    out
}

pub fn build_table_summary_prompt(table: &DataTable, demo: &Demonstration) -> Result<PromptBundle, DistillError> {
    PromptBundle::new(TABLE_PREAMBLE, demo.clone(), table_payload(table), Decoding::default())
}

/// A text fragment found by OCR and its box in image pixels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OcrLine {
    pub text: String,
    pub bbox: Rect,
}

/// Lays OCR fragments on a monospaced grid. Fragments whose vertical
/// centres lie within half a line height share a row; columns come from
/// x offsets divided by the median character width.
pub fn layout_ocr_text(lines: &[OcrLine]) -> String {
    let lines: Vec<&OcrLine> = lines.iter().filter(|l| !l.text.trim().is_empty()).collect();
    if lines.is_empty() {
        return String::new();
    }
    let median = |mut v: Vec<f64>| {
        v.sort_by(f64::total_cmp);
        v[v.len() / 2]
    };
    let char_w = median(
        lines
            .iter()
            .map(|l| l.bbox.width / l.text.chars().count() as f64)
            .filter(|w| *w > 0.0)
            .collect::<Vec<_>>()
            .into_iter()
            .chain(std::iter::once(1.0))
            .collect(),
    )
    .max(1e-6);
    let line_h = median(lines.iter().map(|l| l.bbox.height).collect()).max(1e-6);
    let min_x = lines.iter().map(|l| l.bbox.x).fold(f64::INFINITY, f64::min);

    let mut sorted = lines.clone();
    sorted.sort_by(|a, b| {
        a.bbox
            .center_y()
            .total_cmp(&b.bbox.center_y())
            .then(a.bbox.x.total_cmp(&b.bbox.x))
    });
    let mut rows: Vec<Vec<&OcrLine>> = Vec::new();
    let mut row_y = f64::NEG_INFINITY;
    for l in sorted {
        if (l.bbox.center_y() - row_y).abs() <= line_h / 2.0 && !rows.is_empty() {
            rows.last_mut().expect("non-empty").push(l);
        } else {
            row_y = l.bbox.center_y();
            rows.push(vec![l]);
        }
    }
    let mut out = Vec::new();
    for mut row in rows {
        row.sort_by(|a, b| a.bbox.x.total_cmp(&b.bbox.x));
        let mut s = String::new();
        for l in row {
            let col = ((l.bbox.x - min_x) / char_w).round().max(0.0) as usize;
            let used = s.chars().count();
            let pad = if col > used { col - used } else { usize::from(used > 0) };
            s.extend(std::iter::repeat_n(' ', pad));
            s.push_str(l.text.trim());
        }
        out.push(s);
    }
    out.join("\n")
}

pub fn build_ocr_layout_prompt(lines: &[OcrLine], demo: &Demonstration) -> Result<PromptBundle, DistillError> {
    PromptBundle::new(OCR_PREAMBLE, demo.clone(), layout_ocr_text(lines), Decoding::default())
}

/// Two-stage grading material: first ask for grading steps from the
/// criterion, then ask for a 1-5 rating that follows those steps.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RubricPrompt {
    pub criterion: String,
    pub table: String,
    pub summary: String,
}

impl RubricPrompt {
    pub fn steps_request(&self) -> String {
        format!(
            "You will grade a summary of a chart against one criterion.\n\
             Criterion: {}\n\
             List the evaluation steps a careful grader should follow.",
            self.criterion
        )
    }

    pub fn rating_request(&self, steps: &str) -> String {
        format!(
            "Criterion: {}\nEvaluation steps:\n{}\n\nData table:\n{}\n\nSummary:\n{}\n\n\
             Reply with a single integer from 1 to 5 as the first token, then a short justification.",
            self.criterion,
            steps.trim(),
            self.table,
            self.summary
        )
    }
}

pub fn build_rubric_eval_prompt(
    table: &DataTable,
    summary: &str,
    criterion: &str,
) -> Result<RubricPrompt, DistillError> {
    if summary.trim().is_empty() || criterion.trim().is_empty() {
        return Err(DistillError::EmptyPayload);
    }
    Ok(RubricPrompt {
        criterion: criterion.trim().to_string(),
        table: table_payload(table),
        summary: summary.trim().to_string(),
    })
}

/// Leading integer 1-5 of a rating reply.
pub fn parse_rating(reply: &str) -> Result<u8, DistillError> {
    let digits: String = reply.trim_start().chars().take_while(char::is_ascii_digit).collect();
    match digits.parse::<u8>() {
        Ok(r @ 1..=5) => Ok(r),
        _ => Err(DistillError::ParseFailure(format!(
            "reply does not start with a rating from 1 to 5: {:?}",
            reply.chars().take(40).collect::<String>()
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::table::{Cell, Column};

    fn demo() -> Demonstration {
        Demonstration::new("Year | Sales & 2000 | 1", "Sales were 1 in 2000.").unwrap()
    }

    fn table() -> DataTable {
        DataTable::new(
            Some("Sales".into()),
            vec![Column::categorical("Year"), Column::numeric("Share", Some("%"))],
            vec![vec![Cell::text("2001"), Cell::Number(5.0)]],
        )
        .unwrap()
    }

    #[test]
    fn table_prompt() {
        let a = build_table_summary_prompt(&table(), &demo()).unwrap();
        assert_eq!(a, build_table_summary_prompt(&table(), &demo()).unwrap());
        assert_eq!(
            a.target_payload,
            "Title: Sales\nUnits: Share (%)\nYear | Share & 2001 | 5"
        );
        assert!(Demonstration::new("x", " ").is_err());
    }

    #[test]
    fn ocr_layout() {
        let l = |t: &str, x: f64, y: f64| OcrLine {
            text: t.into(),
            bbox: Rect::new(x, y, 10.0 * t.len() as f64, 12.0),
        };
        let text = layout_ocr_text(&[l("B", 100.0, 0.0), l("A", 0.0, 1.0), l("C", 50.0, 30.0)]);
        let rows: Vec<&str> = text.lines().collect();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0], format!("A{}B", " ".repeat(9)));
        assert_eq!(rows[1], format!("{}C", " ".repeat(5)));
    }

    #[test]
    fn ratings() {
        assert_eq!(parse_rating("4 - because it is accurate"), Ok(4));
        assert!(parse_rating("Four").is_err());
        assert!(parse_rating("9").is_err());
        let r = build_rubric_eval_prompt(&table(), "Fine.", "Accuracy").unwrap();
        assert!(r.rating_request("1. Check numbers").contains("first token"));
        assert!(build_rubric_eval_prompt(&table(), "", "Accuracy").is_err());
    }
}
