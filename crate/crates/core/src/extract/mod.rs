//! Recovers a data table from a chart SVG: structured reading first, text
//! labels and value attributes next, axis-scale fitting last.

mod fit;
mod parse;
mod profile;

use std::collections::HashMap;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::geom::Rect;
use crate::number::parse_number;
use crate::synth::{MarkRecord, SliceAngles};
use crate::table::{Cell, Column, DataTable};

pub use fit::{fit_axis_scale, AxisFit, MAX_RESIDUAL_FRACTION};
pub use parse::{
    normalize_color, parse_chart_svg, MarkKind, ParsedChart, ParsedLabel, ParsedLegendItem, ParsedLine, ParsedMark,
    ParsedTick, SliceGeometry,
};
pub use profile::{Selector, SelectorProfile};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExtractError {
    #[error("malformed svg: {0}")]
    MalformedSvg(String),
    #[error("no chart marks matched the selector profile")]
    NoMarksFound,
    #[error("need at least two numeric axis ticks at distinct positions, found {found}")]
    InsufficientTicks { found: usize },
    #[error("axis ticks are not linear: residual {max_residual} exceeds {limit}")]
    NonLinearAxis { max_residual: f64, limit: f64 },
    #[error("values are neither labelled nor recoverable from an axis scale")]
    ScaleRequired,
    #[error("invalid selector profile: {0}")]
    InvalidProfile(String),
    #[error("reconstructed table is invalid: {0}")]
    Table(String),
}

/// `Exact` when every value came from a label or value attribute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Confidence {
    Exact,
    Recovered,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtractionResult {
    pub table: DataTable,
    pub marks: Vec<MarkRecord>,
    pub confidence: Confidence,
    pub diagnostics: Vec<String>,
}

impl Serialize for ExtractionResult {
    /// Table JSON with `confidence` and `diagnostics` alongside.
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Out<'a> {
            #[serde(flatten)]
            table: &'a DataTable,
            confidence: Confidence,
            diagnostics: &'a [String],
        }
        Out {
            table: &self.table,
            confidence: self.confidence,
            diagnostics: &self.diagnostics,
        }
        .serialize(s)
    }
}

/// Labels farther than this from a mark's anchor are not attributed to it.
const LABEL_RADIUS_PX: f64 = 24.0;

fn rgb(hex: &str) -> Option<(f64, f64, f64)> {
    let h = hex.strip_prefix('#')?;
    if h.len() != 6 {
        return None;
    }
    let c = |i: usize| u8::from_str_radix(&h[i..i + 2], 16).ok().map(f64::from);
    Some((c(0)?, c(2)?, c(4)?))
}

/// Legend entry for `color`: exact match first, nearest RGB otherwise.
fn legend_for(color: Option<&str>, legend: &[ParsedLegendItem], diags: &mut Vec<String>) -> Option<String> {
    let color = color?;
    if let Some(item) = legend.iter().find(|l| l.color.as_deref() == Some(color)) {
        return Some(item.name.clone());
    }
    let target = rgb(color)?;
    let best = legend
        .iter()
        .filter_map(|l| {
            let c = rgb(l.color.as_deref()?)?;
            let d = ((c.0 - target.0).powi(2) + (c.1 - target.1).powi(2) + (c.2 - target.2).powi(2)).sqrt();
            Some((d, l))
        })
        .min_by(|a, b| a.0.total_cmp(&b.0))?;
    diags.push(format!(
        "color {color} matched legend entry {:?} by nearest RGB (distance {:.1})",
        best.1.name, best.0
    ));
    Some(best.1.name.clone())
}

fn round_to(v: f64, decimals: usize) -> f64 {
    let f = 10f64.powi(decimals as i32);
    (v * f).round() / f
}

/// Point where a label for this mark is expected.
fn label_anchor(m: &ParsedMark) -> (f64, f64) {
    match (m.kind, m.slice) {
        (MarkKind::Slice, Some(g)) => {
            let mid = (g.start + g.sweep / 2.0).to_radians();
            let r = g.radius * 0.65;
            (g.center.0 + r * mid.sin(), g.center.1 - r * mid.cos())
        }
        (MarkKind::Bar, _) => (m.bbox.center_x(), m.bbox.y),
        _ => (m.bbox.center_x(), m.bbox.center_y()),
    }
}

struct Resolved {
    series: String,
    x: String,
    value: f64,
    exact: bool,
    mark: ParsedMark,
}

/// Builds a wide table (x column plus one numeric column per series) from
/// parsed chart parts. `scale` is consulted only for unlabelled bars and
/// points.
pub fn reconstruct_table(parsed: &ParsedChart, scale: Option<&AxisFit>) -> Result<ExtractionResult, ExtractError> {
    let mut diags = Vec::new();
    let count = |k: MarkKind| parsed.marks.iter().filter(|m| m.kind == k).count();
    let kind = [MarkKind::Bar, MarkKind::Point, MarkKind::Slice]
        .into_iter()
        .max_by_key(|k| (count(*k), std::cmp::Reverse(*k as u8)))
        .expect("three kinds");
    let marks: Vec<&ParsedMark> = parsed.marks.iter().filter(|m| m.kind == kind).collect();
    if marks.is_empty() {
        return Err(ExtractError::NoMarksFound);
    }
    if marks.len() < parsed.marks.len() {
        diags.push(format!(
            "ignored {} marks of other kinds",
            parsed.marks.len() - marks.len()
        ));
    }
    let is_pie = kind == MarkKind::Slice;
    let default_series = parsed
        .y_title
        .clone()
        .filter(|s| !s.is_empty())
        .unwrap_or_else(|| "value".to_string());

    // Labels carrying both attributes are matched by key; the rest by position.
    let mut keyed: HashMap<(String, String), &ParsedLabel> = HashMap::new();
    let mut loose: Vec<&ParsedLabel> = Vec::new();
    for l in &parsed.labels {
        match (&l.series, &l.x) {
            (Some(s), Some(x)) => {
                keyed.entry((s.clone(), x.clone())).or_insert(l);
            }
            _ => loose.push(l),
        }
    }
    let mut loose_used = vec![false; loose.len()];

    let mut x_ticks = parsed.x_ticks.clone();
    x_ticks.sort_by(|a, b| a.pixel.total_cmp(&b.pixel));

    let mut resolved: Vec<Resolved> = Vec::new();
    let mut unit: Option<String> = None;
    let mut any_recovered = false;
    for (i, m) in marks.iter().enumerate() {
        let series = match &m.series {
            Some(s) => s.clone(),
            None if !is_pie && !parsed.legend.is_empty() => {
                legend_for(m.color.as_deref(), &parsed.legend, &mut diags).unwrap_or_else(|| default_series.clone())
            }
            None => default_series.clone(),
        };
        let x = match &m.x {
            Some(x) => x.clone(),
            None if is_pie => {
                legend_for(m.color.as_deref(), &parsed.legend, &mut diags).unwrap_or_else(|| format!("slice {}", i + 1))
            }
            None => match x_ticks.iter().min_by(|a, b| {
                (a.pixel - m.bbox.center_x())
                    .abs()
                    .total_cmp(&(b.pixel - m.bbox.center_x()).abs())
            }) {
                Some(t) => t.label.clone(),
                None => {
                    diags.push(format!("mark {} has no x label; using its position", i + 1));
                    crate::geom::fmt_px(m.bbox.center_x())
                }
            },
        };

        let mut label_text = keyed.get(&(series.clone(), x.clone())).map(|l| l.text.clone());
        if label_text.is_none() {
            let (ax, ay) = label_anchor(m);
            let nearest = loose
                .iter()
                .enumerate()
                .filter(|(j, _)| !loose_used[*j])
                .map(|(j, l)| (j, ((l.pos.0 - ax).powi(2) + (l.pos.1 - ay).powi(2)).sqrt()))
                .filter(|(_, d)| *d <= LABEL_RADIUS_PX)
                .min_by(|a, b| a.1.total_cmp(&b.1));
            if let Some((j, _)) = nearest {
                loose_used[j] = true;
                label_text = Some(loose[j].text.clone());
            }
        }
        let from_label = label_text.as_deref().and_then(parse_number);
        let (value, exact) = if let Some(p) = from_label {
            if unit.is_none() {
                unit = p.unit.clone();
            }
            (p.value, true)
        } else if let Some(v) = m.value {
            (v, true)
        } else if is_pie {
            let g = m.slice.expect("slice marks carry geometry");
            (g.sweep / 360.0, false)
        } else if let Some(fit) = scale {
            let pixel = if kind == MarkKind::Bar {
                m.bbox.y
            } else {
                m.bbox.center_y()
            };
            (round_to(fit.value_at(pixel), fit.decimals.max(2)), false)
        } else {
            return Err(ExtractError::ScaleRequired);
        };
        any_recovered |= !exact;
        resolved.push(Resolved {
            series,
            x,
            value,
            exact,
            mark: (*m).clone(),
        });
    }
    // Label units win; ticks carry the same unit on axis charts.
    if unit.is_none() && !is_pie {
        unit = parsed
            .y_ticks
            .iter()
            .find_map(|t| parse_number(&t.label).and_then(|p| p.unit));
    }
    if is_pie && any_recovered {
        diags.push("slice values are proportions of the whole".to_string());
    }

    // Row order: left to right for axis charts, document order for pies.
    let mut x_order: Vec<(String, f64)> = Vec::new();
    for (i, r) in resolved.iter().enumerate() {
        let key = if is_pie { i as f64 } else { r.mark.bbox.center_x() };
        match x_order.iter_mut().find(|(x, _)| *x == r.x) {
            Some(entry) => entry.1 = entry.1.min(key),
            None => x_order.push((r.x.clone(), key)),
        }
    }
    x_order.sort_by(|a, b| a.1.total_cmp(&b.1));

    let mut series_order: Vec<String> = Vec::new();
    if !is_pie {
        for l in &parsed.legend {
            if resolved.iter().any(|r| r.series == l.name) && !series_order.contains(&l.name) {
                series_order.push(l.name.clone());
            }
        }
    }
    for r in &resolved {
        if !series_order.contains(&r.series) {
            series_order.push(r.series.clone());
        }
    }

    let mut cells: HashMap<(&str, &str), f64> = HashMap::new();
    for r in &resolved {
        if cells.insert((r.series.as_str(), r.x.as_str()), r.value).is_some() {
            diags.push(format!(
                "duplicate mark for {:?} / {:?}; keeping the last",
                r.series, r.x
            ));
        }
    }

    let mut x_name = parsed
        .x_title
        .clone()
        .filter(|s| !s.is_empty())
        .unwrap_or_else(|| "label".to_string());
    if series_order.contains(&x_name) {
        diags.push(format!("x title {x_name:?} collides with a series name"));
        x_name = format!("{x_name} (category)");
    }
    let mut columns = vec![Column::categorical(x_name)];
    for s in &series_order {
        columns.push(Column::numeric(s.clone(), unit.as_deref()));
    }
    let mut rows = Vec::new();
    for (x, _) in &x_order {
        let row: Option<Vec<Cell>> = std::iter::once(Some(Cell::text(x.clone())))
            .chain(
                series_order
                    .iter()
                    .map(|s| cells.get(&(s.as_str(), x.as_str())).map(|v| Cell::Number(*v))),
            )
            .collect();
        match row {
            Some(r) => rows.push(r),
            None => diags.push(format!("row {x:?} is missing a series value; dropped")),
        }
    }
    let table = DataTable::new(parsed.title.clone(), columns, rows).map_err(|e| ExtractError::Table(e.to_string()))?;

    let confidence = if resolved.iter().all(|r| r.exact) {
        Confidence::Exact
    } else {
        Confidence::Recovered
    };
    let marks = resolved
        .into_iter()
        .map(|r| MarkRecord {
            angles: r.mark.slice.map(|g| SliceAngles {
                start: g.start,
                end: g.start + g.sweep,
            }),
            series: r.series,
            x_label: r.x,
            value: r.value,
            bbox: r.mark.bbox,
            color: r.mark.color.unwrap_or_default(),
        })
        .collect();
    Ok(ExtractionResult {
        table,
        marks,
        confidence,
        diagnostics: diags,
    })
}

/// Parses, calibrates and reconstructs in one step.
pub fn extract_chart(svg: &str, profile: &SelectorProfile) -> Result<ExtractionResult, ExtractError> {
    let parsed = parse_chart_svg(svg, profile)?;
    let fit = if parsed.y_ticks.is_empty() {
        None
    } else {
        Some(fit_axis_scale(&parsed.y_ticks))
    };
    let scale = fit.as_ref().and_then(|f| f.as_ref().ok());
    match reconstruct_table(&parsed, scale) {
        Err(ExtractError::ScaleRequired) => match fit {
            Some(Err(e)) => Err(e),
            _ => Err(ExtractError::ScaleRequired),
        },
        Ok(mut result) => {
            if let Some(Err(e)) = fit {
                result.diagnostics.push(format!("axis scale unavailable: {e}"));
            }
            Ok(result)
        }
        other => other,
    }
}

/// Bounding box of the union of marks; handy when no plot area is tagged.
pub fn marks_extent(marks: &[ParsedMark]) -> Option<Rect> {
    let first = marks.first()?.bbox;
    let mut r = (first.x, first.y, first.right(), first.bottom());
    for m in &marks[1..] {
        r.0 = r.0.min(m.bbox.x);
        r.1 = r.1.min(m.bbox.y);
        r.2 = r.2.max(m.bbox.right());
        r.3 = r.3.max(m.bbox.bottom());
    }
    Some(Rect::new(r.0, r.1, r.2 - r.0, r.3 - r.1))
}
