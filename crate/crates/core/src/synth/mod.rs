//! Chart synthesis: chart-type choice, style diversification and a direct
//! SVG emitter that records every mark's geometry and source value.

mod axis;
mod render;
mod style;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::Rect;
use crate::table::ChartReadyTable;

pub use axis::{nice_axis, NiceAxis, MAX_TICKS};
pub use render::render;
pub use style::{
    diversify_style, Grid, LegendMarker, LineDash, Margins, NamedColor, Palette, StyleParams, BAR_GAP_RANGE,
    BAR_THICKNESS_RANGE, FONT_PX_RANGE,
};

/// Element classes written by [`render`] and read by the extractor.
pub mod class {
    pub const MARK_BAR: &str = "mark-bar";
    pub const MARK_SLICE: &str = "mark-slice";
    pub const MARK_POINT: &str = "mark-point";
    pub const MARK_LINE: &str = "mark-line";
    pub const MARK_LABEL: &str = "mark-label";
    pub const AXIS_X_TICK: &str = "axis-x-tick";
    pub const AXIS_Y_TICK: &str = "axis-y-tick";
    pub const AXIS_TITLE: &str = "axis-title";
    pub const LEGEND_ITEM: &str = "legend-item";
    pub const CHART_TITLE: &str = "chart-title";
    pub const PLOT_AREA: &str = "plot-area";
    pub const ATTR_SERIES: &str = "data-series";
    pub const ATTR_X: &str = "data-x";
    pub const ATTR_AXIS: &str = "data-axis";
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SynthError {
    #[error("plot area {width}x{height} px is smaller than 100x100")]
    CanvasTooSmall { width: f64, height: f64 },
    #[error("chart type {0:?} does not fit the table: {1}")]
    InconsistentSpec(ChartType, &'static str),
    #[error("invalid style: {0}")]
    InvalidStyle(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChartType {
    SimpleBar,
    GroupedBar,
    Pie,
    LineSingle,
    LineMulti,
}

impl ChartType {
    pub const ALL: [ChartType; 5] = [
        ChartType::SimpleBar,
        ChartType::GroupedBar,
        ChartType::Pie,
        ChartType::LineSingle,
        ChartType::LineMulti,
    ];

    pub fn is_bar(self) -> bool {
        matches!(self, ChartType::SimpleBar | ChartType::GroupedBar)
    }

    pub fn is_line(self) -> bool {
        matches!(self, ChartType::LineSingle | ChartType::LineMulti)
    }

    pub fn is_grouped(self) -> bool {
        matches!(self, ChartType::GroupedBar | ChartType::LineMulti)
    }

    /// Charts that draw a legend: multi-series charts and pies.
    pub fn has_legend(self) -> bool {
        self.is_grouped() || self == ChartType::Pie
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ChartType::SimpleBar => "simple_bar",
            ChartType::GroupedBar => "grouped_bar",
            ChartType::Pie => "pie",
            ChartType::LineSingle => "line_single",
            ChartType::LineMulti => "line_multi",
        }
    }
}

/// Relative weights used when picking among admissible chart types.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChartTypeWeights {
    #[serde(default)]
    pub simple_bar: f64,
    #[serde(default)]
    pub grouped_bar: f64,
    #[serde(default)]
    pub pie: f64,
    #[serde(default)]
    pub line_single: f64,
    #[serde(default)]
    pub line_multi: f64,
}

impl Default for ChartTypeWeights {
    /// Corpus mix of bar 58.51%, line 32.94% and pie 9.39%, with bars and
    /// lines split evenly between single- and multi-series.
    fn default() -> Self {
        ChartTypeWeights {
            simple_bar: 29.26,
            grouped_bar: 29.25,
            pie: 9.39,
            line_single: 16.47,
            line_multi: 16.47,
        }
    }
}

impl ChartTypeWeights {
    pub fn get(&self, t: ChartType) -> f64 {
        match t {
            ChartType::SimpleBar => self.simple_bar,
            ChartType::GroupedBar => self.grouped_bar,
            ChartType::Pie => self.pie,
            ChartType::LineSingle => self.line_single,
            ChartType::LineMulti => self.line_multi,
        }
    }

    pub fn total(&self) -> f64 {
        ChartType::ALL.iter().map(|t| self.get(*t)).sum()
    }

    pub fn is_valid(&self) -> bool {
        ChartType::ALL
            .iter()
            .all(|t| self.get(*t).is_finite() && self.get(*t) >= 0.0)
            && self.total() > 0.0
    }

    /// Weighted draw among `candidates`; uniform when their weights are all
    /// zero.
    pub fn pick<R: Rng>(&self, candidates: &[ChartType], rng: &mut R) -> ChartType {
        let total: f64 = candidates.iter().map(|t| self.get(*t).max(0.0)).sum();
        if total <= 0.0 {
            return candidates[rng.gen_range(0..candidates.len())];
        }
        let mut target = rng.gen::<f64>() * total;
        for t in candidates {
            let w = self.get(*t).max(0.0);
            if target < w {
                return *t;
            }
            target -= w;
        }
        *candidates
            .iter()
            .rev()
            .find(|t| self.get(**t) > 0.0)
            .expect("positive total")
    }
}

fn pie_admissible(table: &ChartReadyTable) -> bool {
    let values = table.values();
    !table.is_grouped()
        && (2..=8).contains(&values.len())
        && values.iter().all(|v| *v >= 0.0)
        && values.iter().sum::<f64>() > 0.0
}

/// Chart types that can display `table`.
pub fn admissible_types(table: &ChartReadyTable) -> Vec<ChartType> {
    if table.is_grouped() {
        vec![ChartType::GroupedBar, ChartType::LineMulti]
    } else if pie_admissible(table) {
        vec![ChartType::SimpleBar, ChartType::LineSingle, ChartType::Pie]
    } else {
        vec![ChartType::SimpleBar, ChartType::LineSingle]
    }
}

pub fn choose_chart_type(table: &ChartReadyTable, weights: &ChartTypeWeights, rng_seed: u64) -> ChartType {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    weights.pick(&admissible_types(table), &mut rng)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Canvas {
    pub width: f64,
    pub height: f64,
}

impl Default for Canvas {
    fn default() -> Self {
        Canvas {
            width: 800.0,
            height: 600.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartSpec {
    pub chart_type: ChartType,
    pub table: ChartReadyTable,
    pub style: StyleParams,
    pub canvas: Canvas,
}

impl ChartSpec {
    pub fn new(
        chart_type: ChartType,
        table: ChartReadyTable,
        style: StyleParams,
        canvas: Canvas,
    ) -> Result<Self, SynthError> {
        let spec = ChartSpec {
            chart_type,
            table,
            style,
            canvas,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        self.style.validate()?;
        let t = self.chart_type;
        if t.is_grouped() != self.table.is_grouped() {
            return Err(SynthError::InconsistentSpec(
                t,
                "grouped chart types require a group column and others forbid it",
            ));
        }
        if t == ChartType::Pie && !pie_admissible(&self.table) {
            return Err(SynthError::InconsistentSpec(
                t,
                "pie needs 2-8 non-negative values with a positive total",
            ));
        }
        Ok(())
    }
}

/// Degrees, clockwise from twelve o'clock.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SliceAngles {
    pub start: f64,
    pub end: f64,
}

impl SliceAngles {
    pub fn sweep(&self) -> f64 {
        self.end - self.start
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarkRecord {
    pub series: String,
    pub x_label: String,
    pub value: f64,
    pub bbox: Rect,
    pub color: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angles: Option<SliceAngles>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisTick {
    pub pixel: f64,
    pub label: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct XTick {
    pub pixel: f64,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LegendEntry {
    pub name: String,
    pub color: String,
    pub color_name: String,
}

/// An emitted chart together with its provenance sidecar. Serializing a
/// `RenderedChart` produces the sidecar (the SVG itself is written
/// separately).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RenderedChart {
    #[serde(skip)]
    pub svg: String,
    pub chart_type: ChartType,
    pub canvas: Canvas,
    pub palette: Palette,
    #[serde(default)]
    pub title: Option<String>,
    pub x_title: String,
    pub y_title: String,
    pub plot_area: Rect,
    pub marks: Vec<MarkRecord>,
    /// Y-axis ticks; empty for pies.
    pub axis_ticks: Vec<AxisTick>,
    #[serde(default)]
    pub x_ticks: Vec<XTick>,
    pub legend: Vec<LegendEntry>,
}

impl RenderedChart {
    /// Series names in legend order; the single mark series otherwise.
    pub fn series_names(&self) -> Vec<String> {
        if self.chart_type.is_grouped() {
            self.legend.iter().map(|l| l.name.clone()).collect()
        } else {
            let mut names: Vec<String> = Vec::new();
            for m in &self.marks {
                if !names.contains(&m.series) {
                    names.push(m.series.clone());
                }
            }
            names
        }
    }

    /// X labels ordered left to right by mark position.
    pub fn x_labels(&self) -> Vec<String> {
        if self.chart_type == ChartType::Pie {
            return self.marks.iter().map(|m| m.x_label.clone()).collect();
        }
        let mut ticks = self.x_ticks.clone();
        ticks.sort_by(|a, b| a.pixel.total_cmp(&b.pixel));
        ticks.into_iter().map(|t| t.label).collect()
    }
}
