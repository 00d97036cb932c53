//! Template reasoning questions: a 90-entry catalog, per-chart slot
//! enumeration and an answer oracle that reads the chart's marks.
//!
//! Left/right and group positions come from mark bounding boxes. Magnitudes
//! ("topmost", "largest") come from mark values. Ties on argmax/argmin go to
//! the leftmost label, mode ties to the smallest value. Differences are
//! absolute. Ratios and other numbers use the flattened-table number format.

use std::collections::{BTreeMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{TaskKind, TaskRecord};
use crate::number::format_number;
use crate::synth::{ChartType, RenderedChart};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SlotType {
    #[serde(rename = "<color>")]
    Color,
    #[serde(rename = "<legend-label>")]
    LegendLabel,
    #[serde(rename = "<x-axis-label>")]
    XAxisLabel,
    #[serde(rename = "<value>")]
    Value,
    #[serde(rename = "<N>")]
    Threshold,
    #[serde(rename = "<n>")]
    Divisor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QaTemplate {
    pub id: u8,
    /// Catalog wording.
    pub pattern: &'static str,
    /// Instantiable question with `{slot}` placeholders. `{mark}` reads
    /// "bars" or "line" by chart type.
    pub question: &'static str,
    pub slots: &'static [SlotType],
    pub variants: &'static [&'static str],
    pub applicability: &'static str,
}

impl QaTemplate {
    pub fn code(&self) -> String {
        format!("T{:02}", self.id)
    }
}

/// Concrete slot values for one template instance.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SlotBinding {
    pub template: u8,
    pub slots: BTreeMap<String, String>,
    pub rng_seed: u64,
}

impl SlotBinding {
    pub fn get(&self, slot: &str) -> Option<&str> {
        self.slots.get(slot).map(String::as_str)
    }
}

use SlotType::{Color as C, Divisor as SN, LegendLabel as L, Threshold as BN, Value as V, XAxisLabel as X};

const GROUPED_BAR: &str = "grouped bar";
const BAR: &str = "bar (simple or grouped)";
const COLOR_SERIES: &str = "grouped bar or multi-line (series have legend colors)";
const LEGEND: &str = "any chart with a legend (grouped bar, multi-line, pie)";
const SERIES: &str = "bar or line";
const ANY: &str = "any chart";
const PIE: &str = "pie";

macro_rules! t {
    ($id:expr, $pat:expr, $q:expr, [$($s:expr),*], [$($v:expr),*], $app:expr) => {
        QaTemplate { id: $id, pattern: $pat, question: $q, slots: &[$($s),*], variants: &[$($v),*], applicability: $app }
    };
}

static CATALOG: [QaTemplate; 90] = [
    t!(1, "First bar from the top/left in the second group from the top/left", "What is the value of the first bar from the left in the second group from the left?", [], [], "grouped bar with at least 2 groups"),
    t!(2, "First bar from the bottom/right in the second group from the bottom/right", "What is the value of the first bar from the right in the second group from the right?", [], [], "grouped bar with at least 2 groups"),
    t!(3, "Second bar from the bottom/right in the first group from the bottom/right", "What is the value of the second bar from the right in the first group from the right?", [], [], GROUPED_BAR),
    t!(4, "Second bar from the right/bottom in the first group from the left/top", "What is the value of the second bar from the right in the first group from the left?", [], [], GROUPED_BAR),
    t!(5, "Topmost/Leftmost bar", "What is the value of the leftmost bar?", [], [], BAR),
    t!(6, "Bottommost/Rightmost bar", "What is the value of the rightmost bar?", [], [], BAR),
    t!(7, "Second bar from the top/left", "What is the value of the second bar from the left?", [], [], "bar with at least 2 bars"),
    t!(8, "Second bar from the right/bottom", "What is the value of the second bar from the right?", [], [], "bar with at least 2 bars"),
    t!(9, "Leftmost topmost bar", "Which x-axis label has the leftmost topmost bar?", [], [], "bar with at least 2 bars"),
    t!(10, "Leftmost bottommost bar", "Which x-axis label has the leftmost bottommost bar?", [], [], "bar with at least 2 bars"),
    t!(11, "Rightmost topmost bar", "Which x-axis label has the rightmost topmost bar?", [], [], "bar with at least 2 bars"),
    t!(12, "Rightmost bottommost bar", "Which x-axis label has the rightmost bottommost bar?", [], [], "bar with at least 2 bars"),
    t!(13, "Leftmost <color> data", "What is the value of the leftmost {color} data?", [C], [], COLOR_SERIES),
    t!(14, "Rightmost <color> data", "What is the value of the rightmost {color} data?", [C], [], COLOR_SERIES),
    t!(15, "Second from the left <color> data", "What is the value of the second from the left {color} data?", [C], [], COLOR_SERIES),
    t!(16, "Second from the right <color> data", "What is the value of the second from the right {color} data?", [C], [], COLOR_SERIES),
    t!(17, "Which legend represented by <color>?", "Which legend is represented by {color}?", [C], [], LEGEND),
    t!(18, "What is the color of <legend>?", "What is the color of {legend}?", [L], [], LEGEND),
    t!(19, "Which one is greater, <x1> or <x2>?", "Which one is greater, {x1} or {x2}?", [X, X], [], "single-series chart with two different values"),
    t!(20, "Divide the sum of largest and lowest values by <n>", "Divide the sum of largest and lowest values by {n}.", [SN], [], ANY),
    t!(21, "When did line <legend-label> peak?", "When did line {legend} peak?", [L], [], "line"),
    t!(22, "What is the difference between maximum and minimum of <legend-label>?", "What is the difference between maximum and minimum of {legend}?", [L], [], SERIES),
    t!(23, "Sum pie segments above <value>", "Sum pie segments above {value}.", [V], [], "pie with two different segment values"),
    t!(24, "What is the sum of top three values?", "What is the sum of top three values?", [], [], "at least 3 values"),
    t!(25, "What is the median/mode of <legend-label>?", "What is the {variant} of {legend}?", [L], ["median", "mode"], "bar or line with at least 3 values per series"),
    t!(26, "What is the negative peak of <legend-label>?", "What is the negative peak of {legend}?", [L], [], SERIES),
    t!(27, "What is the largest/smallest value of <legend-label>?", "What is the {variant} value of {legend}?", [L], ["largest", "smallest"], SERIES),
    t!(28, "Which two x-axis labels of <legend-label> sums up to <value>?", "Which two x-axis labels of {legend} sum up to {value}?", [L, V], [], "bar or line with at least 2 labels"),
    t!(29, "What is the sum of the second highest and second lowest value of <legend-label>?", "What is the sum of the second highest and second lowest value of {legend}?", [L], [], "bar or line with at least 3 values per series"),
    t!(30, "Which x-axis label is second highest for <legend-label>?", "Which x-axis label is second highest for {legend}?", [L], [], "bar or line with at least 2 labels"),
    t!(31, "What is the sum of two middle values of <legend-label>?", "What is the sum of two middle values of {legend}?", [L], [], "bar or line with an even number (at least 4) of labels"),
    t!(32, "Which two x-axis labels of <legend-label> have a difference of <value>?", "Which two x-axis labels of {legend} have a difference of {value}?", [L, V], [], "bar or line with two different values in a series"),
    t!(33, "What is the average of <legend-label> from <x-label-1> to <x-label-2>?", "What is the average of {legend} from {x1} to {x2}?", [L, X, X], [], "bar or line with at least 2 labels"),
    t!(34, "What is the average of the highest and lowest value of <legend-label>?", "What is the average of the highest and lowest value of {legend}?", [L], [], SERIES),
    t!(35, "What is the sum of the average of <legend-label-1> and average of <legend-label-2>?", "What is the sum of the average of {legend1} and average of {legend2}?", [L, L], [], "bar or line with at least 2 series"),
    t!(36, "What is the sum/difference of the maximum of <legend-label-1> and minimum of <legend-label-2>?", "What is the {variant} of the maximum of {legend1} and minimum of {legend2}?", [L, L], ["sum", "difference"], "bar or line with at least 2 series"),
    t!(37, "Which x-axis label has the maximum/minimum difference between <legend-label-1> and <legend-label-2>?", "Which x-axis label has the {variant} difference between {legend1} and {legend2}?", [L, L], ["maximum", "minimum"], "bar or line with at least 2 series"),
    t!(38, "Which x-axis label witnessed the smallest value of <legend-label>?", "Which x-axis label witnessed the smallest value of {legend}?", [L], [], SERIES),
    t!(39, "Which label contains largest/smallest values across all labels?", "Which label contains the {variant} values across all labels?", [], ["largest", "smallest"], ANY),
    t!(40, "Sum up the medians of all the data series in this chart", "Sum up the medians of all the data series in this chart.", [], [], "bar or line with at least 3 values per series"),
    t!(41, "What is the average of all values above <value>?", "What is the average of all values above {value}?", [V], [], "at least two different values"),
    t!(42, "What is the sum of the largest and smallest difference between <legend-label-1> and <legend-label-2>?", "What is the sum of the largest and smallest difference between {legend1} and {legend2}?", [L, L], [], "bar or line with at least 2 series"),
    t!(43, "What is the maximum/minimum difference between <legend-label-1> and <legend-label-2>?", "What is the {variant} difference between {legend1} and {legend2}?", [L, L], ["maximum", "minimum"], "bar or line with at least 2 series"),
    t!(44, "What is the ratio of the largest to the smallest pie segment?", "What is the ratio of the largest to the smallest pie segment?", [], [], "pie whose smallest segment is non-zero"),
    t!(45, "What is the ratio of the two largest/smallest segments?", "What is the ratio of the two {variant} segments?", [], ["largest", "smallest"], "pie with a non-zero denominator"),
    t!(46, "What is the difference between the leftmost and rightmost bars?", "What is the difference between the leftmost and rightmost bars?", [], [], "bar with at least 2 bars"),
    t!(47, "What is the sum of the bars in the second group from the left?", "What is the sum of the bars in the second group from the left?", [], [], "grouped bar with at least 2 groups"),
    t!(48, "What is the sum of the bars in the first group from the right?", "What is the sum of the bars in the first group from the right?", [], [], GROUPED_BAR),
    t!(49, "What is the ratio between the two leftmost bars?", "What is the ratio between the two leftmost bars?", [], [], "bar whose second bar is non-zero"),
    t!(50, "What is the difference between the rightmost <color-1> bar and leftmost <color-2> bar?", "What is the difference between the rightmost {color1} bar and leftmost {color2} bar?", [C, C], [], GROUPED_BAR),
    t!(51, "What is the average of <color> bars values?", "What is the average of {color} bars values?", [C], [], GROUPED_BAR),
    t!(52, "How many <color> bars are larger than <N>?", "How many {color} bars are larger than {N}?", [C, BN], [], GROUPED_BAR),
    t!(53, "What is the average of the bars in the second group from the right?", "What is the average of the bars in the second group from the right?", [], [], "grouped bar with at least 2 groups"),
    t!(54, "How many bars in the leftmost group have a value over <N>?", "How many bars in the leftmost group have a value over {N}?", [BN], [], GROUPED_BAR),
    t!(55, "What does the <color> represent?", "What does the {color} represent?", [C], [], LEGEND),
    t!(56, "What is the median value of the <color> bars/line?", "What is the median value of the {color} {mark}?", [C], [], COLOR_SERIES),
    t!(57, "What is the average of the <color-1> sum and <color-2> sum?", "What is the average of the {color1} sum and {color2} sum?", [C, C], [], COLOR_SERIES),
    t!(58, "What is the average of the <color-1> median and <color-2> median?", "What is the average of the {color1} median and {color2} median?", [C, C], [], COLOR_SERIES),
    t!(59, "What is the least difference between the <color-1> and <color-2> bars/line?", "What is the least difference between the {color1} and {color2} {mark}?", [C, C], [], COLOR_SERIES),
    t!(60, "What is the ratio between the leftmost and rightmost bar in the first group from the left?", "What is the ratio between the leftmost and rightmost bar in the first group from the left?", [], [], "grouped bar whose denominator is non-zero"),
    t!(61, "What is the maximum value in the <color> bars/line?", "What is the maximum value in the {color} {mark}?", [C], [], COLOR_SERIES),
    t!(62, "What is the minimum value in the <color> bars/line?", "What is the minimum value in the {color} {mark}?", [C], [], COLOR_SERIES),
    t!(63, "What is the sum of <color> bars/line?", "What is the sum of {color} {mark}?", [C], [], COLOR_SERIES),
    t!(64, "What is the difference between the maximum values of the two leftmost bar groups?", "What is the difference between the maximum values of the two leftmost bar groups?", [], [], "grouped bar with at least 2 groups"),
    t!(65, "Sum of the first <color-1> and last <color-2> bars/line points", "Sum of the first {color1} and last {color2} {mark} values.", [C, C], [], COLOR_SERIES),
    t!(66, "Difference between the two lowest <color> bars", "Difference between the two lowest {color} bars.", [C], [], "grouped bar with at least 2 groups"),
    t!(67, "Add largest and smallest <color> line/bar values and divide by 2", "Add largest and smallest {color} {mark} values and divide by 2.", [C], [], COLOR_SERIES),
    t!(68, "What is the value of <color> line/bars in <x-axis-label>?", "What is the value of {color} {mark} in {x}?", [C, X], [], COLOR_SERIES),
    t!(69, "Sum/Average of <color-1> and <color-2> values in <x-axis-label>?", "What is the {variant} of {color1} and {color2} values in {x}?", [C, C, X], ["sum", "average"], COLOR_SERIES),
    t!(70, "Sum of highest points in <color-1> and <color-2> lines/bars", "Sum of highest points in {color1} and {color2} {mark}.", [C, C], [], COLOR_SERIES),
    t!(71, "Which color has the highest/smallest values?", "Which color has the {variant} values?", [], ["highest", "smallest"], COLOR_SERIES),
    t!(72, "How many values are equal in <color-1> line/bar?", "How many values are equal in {color} {mark}?", [C], [], COLOR_SERIES),
    t!(73, "Sum two rightmost values of <color> graph", "Sum two rightmost values of {color} graph.", [C], [], COLOR_SERIES),
    t!(74, "Product of two smallest values in the graph", "Product of two smallest values in the graph.", [], [], "at least 2 values"),
    t!(75, "Sum of lowest and median values of <color> graph/bars", "Sum of lowest and median values of {color} {mark}.", [C], [], COLOR_SERIES),
    t!(76, "When did <color> line reached the peak?", "When did {color} line reach the peak?", [C], [], "multi-line"),
    t!(77, "What is the average of the rightmost three points of <color> line?", "What is the average of the rightmost three points of {color} line?", [C], [], "multi-line with at least 3 points"),
    t!(78, "How many <color> data points are above <value>?", "How many {color} data points are above {N}?", [C, BN], [], COLOR_SERIES),
    t!(79, "What's the ratio of the largest and the third/second-largest <color> bar?", "What's the ratio of the largest and the {variant}-largest {color} bar?", [C], ["second", "third"], "grouped bar with a non-zero denominator"),
    t!(80, "Is the sum of lowest value of <color-1> and <color-2> bar greater than largest value of <color-3> bar?", "Is the sum of lowest value of {color1} and {color2} bar greater than largest value of {color3} bar?", [C, C, C], [], "grouped bar with at least 3 series"),
    t!(81, "Is the median value of <color-1> bars greater than the median value of <color-2> bars?", "Is the median value of {color1} bars greater than the median value of {color2} bars?", [C, C], [], GROUPED_BAR),
    t!(82, "Is the median of all the <color-1> bars greater than the largest value of <color-2> bar?", "Is the median of all the {color1} bars greater than the largest value of {color2} bar?", [C, C], [], GROUPED_BAR),
    t!(83, "What's the product of <color> bars in India and Japan?", "What's the product of {color} bars in {x1} and {x2}?", [C, X, X], [], "grouped bar with at least 2 groups"),
    t!(84, "Is the sum of the two middle bars greater than the sum of top and bottom bars?", "Is the sum of the two middle bars greater than the sum of top and bottom bars?", [], [], "simple bar with an even number (at least 4) of bars"),
    t!(85, "What's the ratio of the <x-axis-label-1> <color-1> bar and the <x-axis-2> <color-2> bar?", "What's the ratio of the {x1} {color1} bar and the {x2} {color2} bar?", [X, C, X, C], [], "grouped bar with a non-zero denominator"),
    t!(86, "Is the total of all <color-1> bars greater than the total of all <color-2> bars?", "Is the total of all {color1} bars greater than the total of all {color2} bars?", [C, C], [], GROUPED_BAR),
    t!(87, "Take the sum of the two smallest <color-1> bars and smallest <color-2> bars, deduct the smaller value from the larger value, what's the result?", "Take the sum of the two smallest {color1} bars and the two smallest {color2} bars, deduct the smaller value from the larger value, what's the result?", [C, C], [], "grouped bar with at least 2 groups"),
    t!(88, "What is the sum/average of two smallest/largest <color> bars?", "What is the {variant} {color} bars?", [C], ["sum of two smallest", "sum of two largest", "average of two smallest", "average of two largest"], "grouped bar with at least 2 groups"),
    t!(89, "What is the ratio of <color-1> and <color-2> segments?", "What is the ratio of {color1} and {color2} segments?", [C, C], [], "pie with a non-zero denominator"),
    t!(90, "What segment is represented by <color>?", "What segment is represented by {color}?", [C], [], PIE),
];

pub fn catalog() -> &'static [QaTemplate] {
    &CATALOG
}

pub fn template(id: u8) -> Option<&'static QaTemplate> {
    CATALOG.get(usize::from(id).checked_sub(1)?)
}

/// The catalog as a JSON array for documentation.
pub fn catalog_json() -> Value {
    Value::Array(
        CATALOG
            .iter()
            .map(|t| {
                json!({
                    "id": t.code(),
                    "pattern": t.pattern,
                    "question": t.question,
                    "slots": t.slots,
                    "variants": t.variants,
                    "applicability": t.applicability,
                })
            })
            .collect(),
    )
}

struct Series {
    name: String,
    color_name: String,
}

/// Chart contents arranged for question answering.
struct View {
    ct: ChartType,
    series: Vec<Series>,
    xs: Vec<String>,
    /// `v[series][x]`, x left to right.
    v: Vec<Vec<f64>>,
    /// Bar values and their x indices, ordered by left edge.
    bars: Vec<(f64, usize)>,
    /// Per x position (left to right), bar values ordered by left edge.
    groups: Vec<Vec<f64>>,
    /// Pie: color name of each segment.
    seg_colors: Vec<String>,
    ticks: Vec<f64>,
}

impl View {
    fn from_chart(chart: &RenderedChart) -> Option<View> {
        let ct = chart.chart_type;
        let color_name = |hex: &str| {
            chart
                .palette
                .name_of(hex)
                .map(str::to_string)
                .unwrap_or_else(|| hex.to_string())
        };
        if chart.marks.is_empty() {
            return None;
        }
        if ct == ChartType::Pie {
            let mut marks: Vec<_> = chart.marks.iter().collect();
            marks.sort_by(|a, b| {
                let sa = a.angles.map_or(0.0, |g| g.start);
                let sb = b.angles.map_or(0.0, |g| g.start);
                sa.total_cmp(&sb)
            });
            let seg_colors = marks
                .iter()
                .map(|m| {
                    chart
                        .legend
                        .iter()
                        .find(|l| l.name == m.x_label)
                        .map(|l| l.color_name.clone())
                        .unwrap_or_else(|| color_name(&m.color))
                })
                .collect();
            return Some(View {
                ct,
                series: vec![Series {
                    name: marks[0].series.clone(),
                    color_name: String::new(),
                }],
                xs: marks.iter().map(|m| m.x_label.clone()).collect(),
                v: vec![marks.iter().map(|m| m.value).collect()],
                bars: Vec::new(),
                groups: Vec::new(),
                seg_colors,
                ticks: Vec::new(),
            });
        }

        let mut names = chart.series_names();
        for m in &chart.marks {
            if !names.contains(&m.series) {
                names.push(m.series.clone());
            }
        }
        let series: Vec<Series> = names
            .iter()
            .map(|n| Series {
                name: n.clone(),
                color_name: chart
                    .legend
                    .iter()
                    .find(|l| &l.name == n)
                    .map(|l| l.color_name.clone())
                    .or_else(|| {
                        chart
                            .marks
                            .iter()
                            .find(|m| &m.series == n)
                            .map(|m| color_name(&m.color))
                    })
                    .unwrap_or_default(),
            })
            .collect();

        let mut centers: Vec<(String, f64, usize)> = Vec::new();
        for m in &chart.marks {
            match centers.iter_mut().find(|c| c.0 == m.x_label) {
                Some(c) => {
                    c.1 += m.bbox.center_x();
                    c.2 += 1;
                }
                None => centers.push((m.x_label.clone(), m.bbox.center_x(), 1)),
            }
        }
        centers.sort_by(|a, b| (a.1 / a.2 as f64).total_cmp(&(b.1 / b.2 as f64)));
        let xs: Vec<String> = centers.into_iter().map(|c| c.0).collect();
        let x_index = |label: &str| xs.iter().position(|x| x == label);

        let mut v = vec![vec![f64::NAN; xs.len()]; series.len()];
        for m in &chart.marks {
            let s = names.iter().position(|n| n == &m.series)?;
            v[s][x_index(&m.x_label)?] = m.value;
        }
        if v.iter().flatten().any(|x| x.is_nan()) {
            return None;
        }

        let (mut bars, mut groups) = (Vec::new(), Vec::new());
        if ct.is_bar() {
            let mut marks: Vec<_> = chart.marks.iter().collect();
            marks.sort_by(|a, b| a.bbox.x.total_cmp(&b.bbox.x));
            for m in &marks {
                bars.push((m.value, x_index(&m.x_label)?));
            }
            groups = (0..xs.len())
                .map(|xi| bars.iter().filter(|b| b.1 == xi).map(|b| b.0).collect())
                .collect();
        }
        Some(View {
            ct,
            series,
            xs,
            v,
            bars,
            groups,
            seg_colors: Vec::new(),
            ticks: chart.axis_ticks.iter().map(|t| t.value).collect(),
        })
    }

    fn n(&self) -> usize {
        self.xs.len()
    }

    fn k(&self) -> usize {
        self.series.len()
    }

    fn all(&self) -> Vec<f64> {
        self.v.iter().flatten().copied().collect()
    }

    fn color_series(&self) -> bool {
        matches!(self.ct, ChartType::GroupedBar | ChartType::LineMulti)
    }
}

fn sorted(v: &[f64]) -> Vec<f64> {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    s
}

fn max(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

fn min(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::INFINITY, f64::min)
}

fn sum(v: &[f64]) -> f64 {
    v.iter().sum()
}

fn mean(v: &[f64]) -> f64 {
    sum(v) / v.len() as f64
}

fn median(v: &[f64]) -> f64 {
    let s = sorted(v);
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        (s[n / 2 - 1] + s[n / 2]) / 2.0
    }
}

/// Most frequent value; the smallest one on ties.
fn mode(v: &[f64]) -> f64 {
    let s = sorted(v);
    let (mut best, mut best_count) = (s[0], 0);
    let mut i = 0;
    while i < s.len() {
        let j = s[i..].iter().take_while(|x| **x == s[i]).count();
        if j > best_count {
            best = s[i];
            best_count = j;
        }
        i += j;
    }
    best
}

fn argmax_first(v: &[f64]) -> usize {
    let m = max(v);
    v.iter().position(|x| *x == m).expect("non-empty")
}

fn argmin_first(v: &[f64]) -> usize {
    let m = min(v);
    v.iter().position(|x| *x == m).expect("non-empty")
}

fn num(x: f64) -> Option<String> {
    x.is_finite().then(|| format_number(x))
}

fn ratio(a: f64, b: f64) -> Option<String> {
    if b == 0.0 {
        None
    } else {
        num(a / b)
    }
}

fn yes_no(b: bool) -> Option<String> {
    Some(if b { "Yes" } else { "No" }.to_string())
}

/// Answers template `id` on `view` with slot values `b`; `None` when the
/// template does not apply or the binding is invalid.
fn answer(id: u8, w: &View, b: &BTreeMap<String, String>) -> Option<String> {
    let ct = w.ct;
    let n = w.n();
    let k = w.k();
    let get = |key: &str| b.get(key).map(String::as_str);
    let variant = get("variant").unwrap_or("");
    let color = |key: &str| -> Option<usize> {
        let c = get(key)?;
        w.series.iter().position(|s| s.color_name == c)
    };
    let legend = |key: &str| -> Option<usize> {
        let name = get(key)?;
        w.series.iter().position(|s| s.name == name)
    };
    let xi = |key: &str| -> Option<usize> {
        let x = get(key)?;
        w.xs.iter().position(|l| l == x)
    };
    let value = |key: &str| -> Option<f64> { get(key)?.parse().ok() };
    let bar = ct.is_bar();
    let gb = ct == ChartType::GroupedBar;
    let line = ct.is_line();
    let pie = ct == ChartType::Pie;
    let col = w.color_series();
    let ser = !pie;
    let two_colors = |a: &str, c: &str| -> Option<(usize, usize)> {
        let (x, y) = (color(a)?, color(c)?);
        (x != y).then_some((x, y))
    };
    let two_legends = || -> Option<(usize, usize)> {
        let (x, y) = (legend("legend1")?, legend("legend2")?);
        (x != y).then_some((x, y))
    };
    let bars: Vec<f64> = w.bars.iter().map(|b| b.0).collect();

    match id {
        1 if gb && n >= 2 => num(w.groups[1][0]),
        2 if gb && n >= 2 => num(*w.groups[n - 2].last()?),
        3 if gb && k >= 2 => num(w.groups[n - 1][k - 2]),
        4 if gb && k >= 2 => num(w.groups[0][k - 2]),
        5 if bar => num(bars[0]),
        6 if bar => num(*bars.last()?),
        7 if bar && bars.len() >= 2 => num(bars[1]),
        8 if bar && bars.len() >= 2 => num(bars[bars.len() - 2]),
        9..=12 if bar && bars.len() >= 2 => {
            let target = if id == 9 || id == 11 { max(&bars) } else { min(&bars) };
            let mut hits = w.bars.iter().filter(|b| b.0 == target);
            let hit = if id <= 10 {
                hits.clone().next()
            } else {
                hits.next_back()
            }?;
            Some(w.xs[hit.1].clone())
        }
        13 if col => num(w.v[color("color")?][0]),
        14 if col => num(w.v[color("color")?][n - 1]),
        15 if col && n >= 2 => num(w.v[color("color")?][1]),
        16 if col && n >= 2 => num(w.v[color("color")?][n - 2]),
        17 | 55 if pie => {
            let c = get("color")?;
            let i = w.seg_colors.iter().position(|s| s == c)?;
            Some(w.xs[i].clone())
        }
        17 | 55 if col => Some(w.series[color("color")?].name.clone()),
        18 if pie => {
            let i = w.xs.iter().position(|x| Some(x.as_str()) == get("legend"))?;
            Some(w.seg_colors[i].clone())
        }
        18 if col => Some(w.series[legend("legend")?].color_name.clone()),
        19 if k == 1 => {
            let (i, j) = (xi("x1")?, xi("x2")?);
            let (a, c) = (w.v[0][i], w.v[0][j]);
            if i == j || a == c {
                return None;
            }
            Some(if a > c { w.xs[i].clone() } else { w.xs[j].clone() })
        }
        20 => {
            let d = value("n")?;
            if d == 0.0 {
                return None;
            }
            let all = w.all();
            num((max(&all) + min(&all)) / d)
        }
        21 if line => Some(w.xs[argmax_first(&w.v[legend("legend")?])].clone()),
        22 if ser => {
            let s = &w.v[legend("legend")?];
            num(max(s) - min(s))
        }
        23 if pie => {
            let t = value("value")?;
            let s = &w.v[0];
            if t >= max(s) || !s.contains(&t) {
                return None;
            }
            num(sum(&s.iter().copied().filter(|x| *x > t).collect::<Vec<_>>()))
        }
        24 => {
            let s = sorted(&w.all());
            if s.len() < 3 {
                return None;
            }
            num(s[s.len() - 1] + s[s.len() - 2] + s[s.len() - 3])
        }
        25 if ser && n >= 3 => {
            let s = &w.v[legend("legend")?];
            match variant {
                "median" => num(median(s)),
                "mode" => num(mode(s)),
                _ => None,
            }
        }
        26 if ser => num(min(&w.v[legend("legend")?])),
        27 if ser => {
            let s = &w.v[legend("legend")?];
            match variant {
                "largest" => num(max(s)),
                "smallest" => num(min(s)),
                _ => None,
            }
        }
        28 | 32 if ser && n >= 2 => {
            let s = &w.v[legend("legend")?];
            let target = get("value")?;
            for i in 0..n {
                for j in i + 1..n {
                    let combined = if id == 28 { s[i] + s[j] } else { (s[i] - s[j]).abs() };
                    if id == 32 && s[i] == s[j] {
                        continue;
                    }
                    if num(combined).as_deref() == Some(target) {
                        return Some(format!("{} and {}", w.xs[i], w.xs[j]));
                    }
                }
            }
            None
        }
        29 if ser && n >= 3 => {
            let s = sorted(&w.v[legend("legend")?]);
            num(s[n - 2] + s[1])
        }
        30 if ser && n >= 2 => {
            let s = &w.v[legend("legend")?];
            let mut idx: Vec<usize> = (0..n).collect();
            idx.sort_by(|a, c| s[*c].total_cmp(&s[*a]));
            Some(w.xs[idx[1]].clone())
        }
        31 if ser && n >= 4 && n.is_multiple_of(2) => {
            let s = sorted(&w.v[legend("legend")?]);
            num(s[n / 2 - 1] + s[n / 2])
        }
        33 if ser && n >= 2 => {
            let s = &w.v[legend("legend")?];
            let (i, j) = (xi("x1")?, xi("x2")?);
            if i >= j {
                return None;
            }
            num(mean(&s[i..=j]))
        }
        34 if ser => {
            let s = &w.v[legend("legend")?];
            num((max(s) + min(s)) / 2.0)
        }
        35 if ser => {
            let (a, c) = two_legends()?;
            num(mean(&w.v[a]) + mean(&w.v[c]))
        }
        36 if ser => {
            let (a, c) = two_legends()?;
            let (hi, lo) = (max(&w.v[a]), min(&w.v[c]));
            match variant {
                "sum" => num(hi + lo),
                "difference" => num((hi - lo).abs()),
                _ => None,
            }
        }
        37 | 42 | 43 if ser => {
            let (a, c) = two_legends()?;
            let d: Vec<f64> = (0..n).map(|i| (w.v[a][i] - w.v[c][i]).abs()).collect();
            match (id, variant) {
                (37, "maximum") => Some(w.xs[argmax_first(&d)].clone()),
                (37, "minimum") => Some(w.xs[argmin_first(&d)].clone()),
                (42, _) => num(max(&d) + min(&d)),
                (43, "maximum") => num(max(&d)),
                (43, "minimum") => num(min(&d)),
                _ => None,
            }
        }
        38 if ser => Some(w.xs[argmin_first(&w.v[legend("legend")?])].clone()),
        39 => {
            let all = w.all();
            let target = match variant {
                "largest" => max(&all),
                "smallest" => min(&all),
                _ => return None,
            };
            let i = (0..n).find(|i| w.v.iter().any(|s| s[*i] == target))?;
            Some(w.xs[i].clone())
        }
        40 if ser && n >= 3 => num(w.v.iter().map(|s| median(s)).sum()),
        41 => {
            let t = value("value")?;
            let all = w.all();
            if t >= max(&all) || !all.contains(&t) {
                return None;
            }
            num(mean(&all.iter().copied().filter(|x| *x > t).collect::<Vec<_>>()))
        }
        44 if pie && n >= 2 => ratio(max(&w.v[0]), min(&w.v[0])),
        45 if pie && n >= 2 => {
            let s = sorted(&w.v[0]);
            match variant {
                "largest" => ratio(s[n - 1], s[n - 2]),
                "smallest" => ratio(s[1], s[0]),
                _ => None,
            }
        }
        46 if bar && bars.len() >= 2 => num((bars[0] - bars[bars.len() - 1]).abs()),
        47 if gb && n >= 2 => num(sum(&w.groups[1])),
        48 if gb => num(sum(&w.groups[n - 1])),
        49 if bar && bars.len() >= 2 => ratio(bars[0], bars[1]),
        50 if gb => {
            let (a, c) = two_colors("color1", "color2")?;
            num((w.v[a][n - 1] - w.v[c][0]).abs())
        }
        51 if gb => num(mean(&w.v[color("color")?])),
        52 if gb => {
            let t = value("N")?;
            Some(w.v[color("color")?].iter().filter(|x| **x > t).count().to_string())
        }
        53 if gb && n >= 2 => num(mean(&w.groups[n - 2])),
        54 if gb => {
            let t = value("N")?;
            Some(w.groups[0].iter().filter(|x| **x > t).count().to_string())
        }
        56 if col => num(median(&w.v[color("color")?])),
        57 if col => {
            let (a, c) = two_colors("color1", "color2")?;
            num((sum(&w.v[a]) + sum(&w.v[c])) / 2.0)
        }
        58 if col => {
            let (a, c) = two_colors("color1", "color2")?;
            num((median(&w.v[a]) + median(&w.v[c])) / 2.0)
        }
        59 if col => {
            let (a, c) = two_colors("color1", "color2")?;
            num(min(&(0..n).map(|i| (w.v[a][i] - w.v[c][i]).abs()).collect::<Vec<_>>()))
        }
        60 if gb => ratio(w.groups[0][0], *w.groups[0].last()?),
        61 if col => num(max(&w.v[color("color")?])),
        62 if col => num(min(&w.v[color("color")?])),
        63 if col => num(sum(&w.v[color("color")?])),
        64 if gb && n >= 2 => num((max(&w.groups[0]) - max(&w.groups[1])).abs()),
        65 if col => {
            let (a, c) = two_colors("color1", "color2")?;
            num(w.v[a][0] + w.v[c][n - 1])
        }
        66 if gb && n >= 2 => {
            let s = sorted(&w.v[color("color")?]);
            num(s[1] - s[0])
        }
        67 if col => {
            let s = &w.v[color("color")?];
            num((max(s) + min(s)) / 2.0)
        }
        68 if col => num(w.v[color("color")?][xi("x")?]),
        69 if col => {
            let (a, c) = two_colors("color1", "color2")?;
            let i = xi("x")?;
            let total = w.v[a][i] + w.v[c][i];
            match variant {
                "sum" => num(total),
                "average" => num(total / 2.0),
                _ => None,
            }
        }
        70 if col => {
            let (a, c) = two_colors("color1", "color2")?;
            num(max(&w.v[a]) + max(&w.v[c]))
        }
        71 if col => {
            let scores: Vec<f64> = match variant {
                "highest" => w.v.iter().map(|s| max(s)).collect(),
                "smallest" => w.v.iter().map(|s| -min(s)).collect(),
                _ => return None,
            };
            Some(w.series[argmax_first(&scores)].color_name.clone())
        }
        72 if col => {
            let s = &w.v[color("color")?];
            Some(
                s.iter()
                    .filter(|x| s.iter().filter(|y| y == x).count() > 1)
                    .count()
                    .to_string(),
            )
        }
        73 if col && n >= 2 => {
            let s = &w.v[color("color")?];
            num(s[n - 1] + s[n - 2])
        }
        74 => {
            let s = sorted(&w.all());
            if s.len() < 2 {
                return None;
            }
            num(s[0] * s[1])
        }
        75 if col => {
            let s = &w.v[color("color")?];
            num(min(s) + median(s))
        }
        76 if ct == ChartType::LineMulti => Some(w.xs[argmax_first(&w.v[color("color")?])].clone()),
        77 if ct == ChartType::LineMulti && n >= 3 => num(mean(&w.v[color("color")?][n - 3..])),
        78 if col => {
            let t = value("N")?;
            Some(w.v[color("color")?].iter().filter(|x| **x > t).count().to_string())
        }
        79 if gb => {
            let s = sorted(&w.v[color("color")?]);
            let idx = match variant {
                "second" => 2,
                "third" => 3,
                _ => return None,
            };
            if n < idx {
                return None;
            }
            ratio(s[n - 1], s[n - idx])
        }
        80 if gb && k >= 3 => {
            let (a, c) = two_colors("color1", "color2")?;
            let d = color("color3")?;
            if d == a || d == c {
                return None;
            }
            yes_no(min(&w.v[a]) + min(&w.v[c]) > max(&w.v[d]))
        }
        81 if gb => {
            let (a, c) = two_colors("color1", "color2")?;
            yes_no(median(&w.v[a]) > median(&w.v[c]))
        }
        82 if gb => {
            let (a, c) = two_colors("color1", "color2")?;
            yes_no(median(&w.v[a]) > max(&w.v[c]))
        }
        83 if gb && n >= 2 => {
            let (i, j) = (xi("x1")?, xi("x2")?);
            if i >= j {
                return None;
            }
            let s = &w.v[color("color")?];
            num(s[i] * s[j])
        }
        84 if ct == ChartType::SimpleBar && bars.len() >= 4 && bars.len().is_multiple_of(2) => {
            let m = bars.len() / 2;
            yes_no(bars[m - 1] + bars[m] > bars[0] + bars[bars.len() - 1])
        }
        85 if gb => {
            let (a, c) = (color("color1")?, color("color2")?);
            let (i, j) = (xi("x1")?, xi("x2")?);
            if (a, i) == (c, j) {
                return None;
            }
            ratio(w.v[a][i], w.v[c][j])
        }
        86 if gb => {
            let (a, c) = two_colors("color1", "color2")?;
            yes_no(sum(&w.v[a]) > sum(&w.v[c]))
        }
        87 if gb && n >= 2 => {
            let (a, c) = two_colors("color1", "color2")?;
            let (sa, sc) = (sorted(&w.v[a]), sorted(&w.v[c]));
            num(((sa[0] + sa[1]) - (sc[0] + sc[1])).abs())
        }
        88 if gb && n >= 2 => {
            let s = sorted(&w.v[color("color")?]);
            let (small, large) = (s[0] + s[1], s[n - 1] + s[n - 2]);
            match variant {
                "sum of two smallest" => num(small),
                "sum of two largest" => num(large),
                "average of two smallest" => num(small / 2.0),
                "average of two largest" => num(large / 2.0),
                _ => None,
            }
        }
        89 if pie => {
            let c1 = w.seg_colors.iter().position(|c| Some(c.as_str()) == get("color1"))?;
            let c2 = w.seg_colors.iter().position(|c| Some(c.as_str()) == get("color2"))?;
            if c1 == c2 {
                return None;
            }
            ratio(w.v[0][c1], w.v[0][c2])
        }
        90 if pie => {
            let i = w.seg_colors.iter().position(|c| Some(c.as_str()) == get("color"))?;
            Some(w.xs[i].clone())
        }
        _ => None,
    }
}

type Slots = BTreeMap<String, String>;

fn product(base: Vec<Slots>, key: &str, values: &[String]) -> Vec<Slots> {
    let mut out = Vec::with_capacity(base.len() * values.len());
    for b in &base {
        for v in values {
            let mut s = b.clone();
            s.insert(key.to_string(), v.clone());
            out.push(s);
        }
    }
    out
}

/// Every slot assignment worth trying for template `t`; `answer` filters
/// out the invalid ones.
fn raw_candidates(t: &QaTemplate, w: &View) -> Vec<Slots> {
    let colors: Vec<String> = if w.ct == ChartType::Pie {
        w.seg_colors.clone()
    } else {
        w.series.iter().map(|s| s.color_name.clone()).collect()
    };
    let legends: Vec<String> = if w.ct == ChartType::Pie {
        w.xs.clone()
    } else {
        w.series.iter().map(|s| s.name.clone()).collect()
    };
    let mut out = vec![Slots::new()];
    if !t.variants.is_empty() {
        let vs: Vec<String> = t.variants.iter().map(|s| s.to_string()).collect();
        out = product(out, "variant", &vs);
    }
    let (mut c_i, mut l_i, mut x_i) = (0, 0, 0);
    let count = |ty: SlotType| t.slots.iter().filter(|s| **s == ty).count();
    let (nc, nl, nx) = (count(C), count(L), count(X));
    for slot in t.slots {
        match slot {
            C => {
                c_i += 1;
                let key = if nc == 1 {
                    "color".to_string()
                } else {
                    format!("color{c_i}")
                };
                out = product(out, &key, &colors);
            }
            L => {
                l_i += 1;
                let key = if nl == 1 {
                    "legend".to_string()
                } else {
                    format!("legend{l_i}")
                };
                out = product(out, &key, &legends);
            }
            X => {
                x_i += 1;
                let key = if nx == 1 { "x".to_string() } else { format!("x{x_i}") };
                out = product(out, &key, &w.xs);
            }
            SN => {
                let ns: Vec<String> = (2..=5).map(|n| n.to_string()).collect();
                out = product(out, "n", &ns);
            }
            BN => {
                let ticks: Vec<String> = w.ticks.iter().map(|v| format_number(*v)).collect();
                out = product(out, "N", &ticks);
            }
            V => {
                out = value_candidates(t.id, w, out);
            }
        }
    }
    out
}

/// `<value>` slots depend on the other slots: a segment or data value for
/// thresholds, an achievable pair sum or difference for T28/T32.
fn value_candidates(id: u8, w: &View, base: Vec<Slots>) -> Vec<Slots> {
    let mut out = Vec::new();
    for b in base {
        let mut values: Vec<String> = Vec::new();
        match id {
            28 | 32 => {
                let Some(s) = b.get("legend").and_then(|l| w.series.iter().position(|s| &s.name == l)) else {
                    continue;
                };
                let s = &w.v[s];
                for i in 0..s.len() {
                    for j in i + 1..s.len() {
                        let x = if id == 28 { s[i] + s[j] } else { (s[i] - s[j]).abs() };
                        values.push(format_number(x));
                    }
                }
            }
            _ => values = w.all().iter().map(|v| format_number(*v)).collect(),
        }
        let mut seen = HashSet::new();
        values.retain(|v| seen.insert(v.clone()));
        out.extend(product(vec![b], "value", &values));
    }
    out
}

/// Valid bindings for template `id` on `chart`, in enumeration order.
pub fn candidate_bindings(chart: &RenderedChart, id: u8) -> Vec<SlotBinding> {
    let (Some(t), Some(w)) = (template(id), View::from_chart(chart)) else {
        return Vec::new();
    };
    bindings_for(t, &w)
}

fn bindings_for(t: &QaTemplate, w: &View) -> Vec<SlotBinding> {
    raw_candidates(t, w)
        .into_iter()
        .filter(|s| answer(t.id, w, s).is_some())
        .map(|slots| SlotBinding {
            template: t.id,
            slots,
            rng_seed: 0,
        })
        .collect()
}

/// Oracle answer for a binding, or `None` when it does not apply.
pub fn answer_for(chart: &RenderedChart, binding: &SlotBinding) -> Option<String> {
    let w = View::from_chart(chart)?;
    answer(binding.template, &w, &binding.slots)
}

/// Template ids with at least one valid binding on `chart`.
pub fn enumerate_applicable(chart: &RenderedChart) -> Vec<u8> {
    let Some(w) = View::from_chart(chart) else {
        return Vec::new();
    };
    CATALOG
        .iter()
        .filter(|t| !bindings_for(t, &w).is_empty())
        .map(|t| t.id)
        .collect()
}

/// Question text for a binding.
pub fn render_question(binding: &SlotBinding, chart_type: ChartType) -> Option<String> {
    let t = template(binding.template)?;
    let mut q = t.question.to_string();
    let mark = if chart_type.is_bar() { "bars" } else { "line" };
    q = q.replace("{mark}", mark);
    for (k, v) in &binding.slots {
        q = q.replace(&format!("{{{k}}}"), v);
    }
    (!q.contains('{')).then_some(q)
}

/// Up to `count` distinct reasoning records. Templates are drawn uniformly
/// among those with unused bindings, then a binding uniformly within the
/// template.
pub fn generate_qa(chart: &RenderedChart, image_ref: &str, count: usize, rng_seed: u64) -> Vec<TaskRecord> {
    let Some(w) = View::from_chart(chart) else {
        return Vec::new();
    };
    let mut pools: Vec<Vec<SlotBinding>> = CATALOG
        .iter()
        .map(|t| bindings_for(t, &w))
        .filter(|p| !p.is_empty())
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    while out.len() < count && !pools.is_empty() {
        let ti = rng.gen_range(0..pools.len());
        let bi = rng.gen_range(0..pools[ti].len());
        let mut binding = pools[ti].swap_remove(bi);
        if pools[ti].is_empty() {
            pools.swap_remove(ti);
        }
        binding.rng_seed = rng_seed;
        let (Some(q), Some(a)) = (
            render_question(&binding, w.ct),
            answer(binding.template, &w, &binding.slots),
        ) else {
            continue;
        };
        if !seen.insert(q.clone()) {
            continue;
        }
        if let Ok(r) = TaskRecord::new(image_ref, TaskKind::QaReasoning, &q, a) {
            out.push(r);
        }
    }
    out
}
