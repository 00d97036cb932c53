//! Pretraining record streams: data-table generation, value estimation,
//! template reasoning questions, open questions and summaries.

mod flatten;
pub mod qa;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::number::{format_number, round2};
use crate::synth::{ChartType, RenderedChart};
use crate::table::ChartReadyTable;

pub use flatten::{escape_cell, flatten_rows, flatten_table, unflatten, FlattenError, CELL_SEP, ROW_SEP};
pub use qa::{
    answer_for, candidate_bindings, catalog, catalog_json, enumerate_applicable, generate_qa, QaTemplate, SlotBinding,
    SlotType,
};

pub const TOKEN_TABLE: &str = "<extract_data_table>";
pub const TOKEN_VALUES: &str = "<estimate_values>";
pub const TOKEN_REASONING: &str = "<answer_question>";
pub const TOKEN_OPEN: &str = "<open_question>";
pub const TOKEN_SUMMARY: &str = "<summarize_chart>";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskKind {
    Table,
    ValueEstimation,
    QaReasoning,
    QaOpen,
    Summary,
}

impl TaskKind {
    pub const ALL: [TaskKind; 5] = [
        TaskKind::Table,
        TaskKind::ValueEstimation,
        TaskKind::QaReasoning,
        TaskKind::QaOpen,
        TaskKind::Summary,
    ];

    pub fn token(self) -> &'static str {
        match self {
            TaskKind::Table => TOKEN_TABLE,
            TaskKind::ValueEstimation => TOKEN_VALUES,
            TaskKind::QaReasoning => TOKEN_REASONING,
            TaskKind::QaOpen => TOKEN_OPEN,
            TaskKind::Summary => TOKEN_SUMMARY,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            TaskKind::Table => "table",
            TaskKind::ValueEstimation => "value_estimation",
            TaskKind::QaReasoning => "qa_reasoning",
            TaskKind::QaOpen => "qa_open",
            TaskKind::Summary => "summary",
        }
    }
}

/// One pretraining example, serialized as a JSONL line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskRecord {
    pub image: String,
    pub prompt: String,
    pub target: String,
    pub kind: TaskKind,
}

impl TaskRecord {
    /// Prompt is the kind's token, followed by `text` when non-empty.
    pub fn new(
        image: impl Into<String>,
        kind: TaskKind,
        text: &str,
        target: impl Into<String>,
    ) -> Result<Self, TaskError> {
        let target = target.into();
        if target.trim().is_empty() {
            return Err(TaskError::EmptyTarget);
        }
        let prompt = if text.is_empty() {
            kind.token().to_string()
        } else {
            format!("{} {}", kind.token(), text)
        };
        Ok(TaskRecord {
            image: image.into(),
            prompt,
            target,
            kind,
        })
    }

    /// Exactly one registered token starts the prompt.
    pub fn is_well_formed(&self) -> bool {
        let starts: Vec<TaskKind> = TaskKind::ALL
            .into_iter()
            .filter(|k| self.prompt.starts_with(k.token()))
            .collect();
        starts == [self.kind] && !self.target.trim().is_empty()
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TaskError {
    #[error("value estimation is undefined for {0:?} charts")]
    UnsupportedChartType(ChartType),
    #[error("record target is empty")]
    EmptyTarget,
    #[error("chart {0} has no summary")]
    MissingSummary(String),
    #[error("answer for chart {chart} is not a sentence of its summary: {answer:?}")]
    AnswerNotInSummary { chart: String, answer: String },
    #[error("unknown chart id {0}")]
    UnknownChart(String),
}

/// Data-table generation record: the chart's wide table, flattened.
pub fn table_record(image: &str, table: &ChartReadyTable) -> Result<TaskRecord, TaskError> {
    TaskRecord::new(image, TaskKind::Table, "", flatten_table(&table.to_wide()))
}

/// Fractions of the plot height covered by each bar, or each point's
/// offset above the plot bottom. One row per series, marks left to right.
pub fn value_estimation_target(chart: &RenderedChart) -> Result<String, TaskError> {
    if chart.chart_type == ChartType::Pie {
        return Err(TaskError::UnsupportedChartType(chart.chart_type));
    }
    let plot = chart.plot_area;
    let mut rows = Vec::new();
    for series in chart.series_names() {
        let mut marks: Vec<_> = chart.marks.iter().filter(|m| m.series == series).collect();
        marks.sort_by(|a, b| a.bbox.center_x().total_cmp(&b.bbox.center_x()));
        let row: Vec<String> = marks
            .iter()
            .map(|m| {
                let px = if chart.chart_type.is_bar() {
                    m.bbox.height
                } else {
                    plot.bottom() - m.bbox.center_y()
                };
                format_number(round2(px / plot.height))
            })
            .collect();
        rows.push(row);
    }
    Ok(flatten_rows(&rows))
}

pub fn value_estimation_record(image: &str, chart: &RenderedChart) -> Result<TaskRecord, TaskError> {
    TaskRecord::new(image, TaskKind::ValueEstimation, "", value_estimation_target(chart)?)
}

/// A chart id with the image reference written into records.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChartRef {
    pub id: String,
    pub image: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Assembly {
    pub records: Vec<TaskRecord>,
    pub errors: Vec<TaskError>,
    pub diagnostics: Vec<String>,
}

/// One record per (chart, non-empty summary). Charts with none are listed
/// as `MissingSummary`.
pub fn assemble_summary_records(charts: &[ChartRef], summaries: &HashMap<String, Vec<String>>) -> Assembly {
    let mut out = Assembly::default();
    for c in charts {
        let texts: Vec<&String> = summaries
            .get(&c.id)
            .map(|v| v.iter().filter(|s| !s.trim().is_empty()).collect())
            .unwrap_or_default();
        if texts.is_empty() {
            out.errors.push(TaskError::MissingSummary(c.id.clone()));
            continue;
        }
        for t in texts {
            out.records
                .push(TaskRecord::new(&c.image, TaskKind::Summary, "", t.trim()).expect("non-empty"));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpenQaPair {
    pub chart_id: String,
    pub question: String,
    pub answer: String,
}

/// Accepts pairs whose answer appears verbatim in the chart's summary.
/// Pairs for charts without a summary pass unchecked, with a diagnostic.
pub fn assemble_open_qa_records(
    charts: &[ChartRef],
    summaries: &HashMap<String, String>,
    pairs: &[OpenQaPair],
) -> Assembly {
    let images: HashMap<&str, &str> = charts.iter().map(|c| (c.id.as_str(), c.image.as_str())).collect();
    let mut out = Assembly::default();
    for p in pairs {
        let Some(image) = images.get(p.chart_id.as_str()) else {
            out.errors.push(TaskError::UnknownChart(p.chart_id.clone()));
            continue;
        };
        let answer = p.answer.trim();
        match summaries.get(&p.chart_id) {
            Some(summary) if !summary.contains(answer) || answer.is_empty() => {
                out.errors.push(TaskError::AnswerNotInSummary {
                    chart: p.chart_id.clone(),
                    answer: answer.to_string(),
                });
                continue;
            }
            Some(_) => {}
            None => out
                .diagnostics
                .push(format!("{}: unchecked (no summary on file)", p.chart_id)),
        }
        match TaskRecord::new(*image, TaskKind::QaOpen, p.question.trim(), answer) {
            Ok(r) => out.records.push(r),
            Err(e) => out.errors.push(e),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Rect;
    use crate::synth::{Canvas, MarkRecord, Palette};

    fn bar_chart(heights: &[f64], plot_h: f64) -> RenderedChart {
        RenderedChart {
            svg: String::new(),
            chart_type: ChartType::SimpleBar,
            canvas: Canvas::default(),
            palette: Palette::Tableau10,
            title: None,
            x_title: "x".into(),
            y_title: "v".into(),
            plot_area: Rect::new(0.0, 0.0, 400.0, plot_h),
            marks: heights
                .iter()
                .enumerate()
                .map(|(i, h)| MarkRecord {
                    series: "v".into(),
                    x_label: format!("L{i}"),
                    value: *h,
                    bbox: Rect::new(10.0 + 50.0 * i as f64, plot_h - h, 20.0, *h),
                    color: "#000000".into(),
                    angles: None,
                })
                .collect(),
            axis_ticks: vec![],
            x_ticks: vec![],
            legend: vec![],
        }
    }

    #[test]
    fn value_estimation_examples() {
        assert_eq!(value_estimation_target(&bar_chart(&[70.0], 200.0)).unwrap(), "0.35");
        assert_eq!(value_estimation_target(&bar_chart(&[200.0], 200.0)).unwrap(), "1");
        assert_eq!(
            value_estimation_target(&bar_chart(&[50.0, 100.0, 150.0], 200.0)).unwrap(),
            "0.25 | 0.5 | 0.75"
        );
        let mut pie = bar_chart(&[1.0], 10.0);
        pie.chart_type = ChartType::Pie;
        assert_eq!(
            value_estimation_target(&pie),
            Err(TaskError::UnsupportedChartType(ChartType::Pie))
        );
    }

    #[test]
    fn record_prompts() {
        let r = TaskRecord::new("a.svg", TaskKind::QaReasoning, "Why?", "Because").unwrap();
        assert_eq!(r.prompt, "<answer_question> Why?");
        assert!(r.is_well_formed());
        assert_eq!(
            TaskRecord::new("a.svg", TaskKind::Summary, "", " "),
            Err(TaskError::EmptyTarget)
        );
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["kind"], "qa_reasoning");
        assert_eq!(json["image"], "a.svg");
    }

    #[test]
    fn summaries_and_open_questions() {
        let charts = vec![
            ChartRef {
                id: "a".into(),
                image: "a.svg".into(),
            },
            ChartRef {
                id: "b".into(),
                image: "b.svg".into(),
            },
        ];
        let mut sums = HashMap::new();
        sums.insert("a".to_string(), vec!["Sales rose. They peaked in 2020.".to_string()]);
        sums.insert("b".to_string(), vec!["".to_string()]);
        let asm = assemble_summary_records(&charts, &sums);
        assert_eq!(asm.records.len(), 1);
        assert_eq!(asm.records[0].prompt, TOKEN_SUMMARY);
        assert_eq!(asm.errors, vec![TaskError::MissingSummary("b".into())]);

        let mut single = HashMap::new();
        single.insert("a".to_string(), "Sales rose. They peaked in 2020.".to_string());
        let pairs = vec![
            OpenQaPair {
                chart_id: "a".into(),
                question: "When?".into(),
                answer: "They peaked in 2020.".into(),
            },
            OpenQaPair {
                chart_id: "a".into(),
                question: "Who?".into(),
                answer: "Nobody.".into(),
            },
            OpenQaPair {
                chart_id: "b".into(),
                question: "What?".into(),
                answer: "Something.".into(),
            },
        ];
        let asm = assemble_open_qa_records(&charts, &single, &pairs);
        assert_eq!(asm.records.len(), 2);
        assert!(matches!(asm.errors[0], TaskError::AnswerNotInSummary { .. }));
        assert!(asm.diagnostics[0].contains("unchecked"));
    }
}
