//! Random chart-ready tables for a requested chart type.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::number::round2;
use crate::synth::ChartType;
use crate::table::{ChartReadyTable, Column, MAX_CHART_ROWS};

const COUNTRIES: &[&str] = &[
    "United States",
    "China",
    "Japan",
    "Germany",
    "India",
    "United Kingdom",
    "France",
    "Brazil",
    "Italy",
    "Canada",
    "Spain",
    "Mexico",
    "Australia",
    "South Korea",
];
const CATEGORIES: &[&str] = &[
    "Food",
    "Housing",
    "Transport",
    "Health",
    "Education",
    "Leisure",
    "Clothing",
    "Utilities",
    "Savings",
    "Insurance",
];
const AGE_GROUPS: &[&str] = &["18-24", "25-34", "35-44", "45-54", "55-64", "65+"];
const MONTHS: &[&str] = &[
    "Jan", "Feb", "Mar", "Apr", "May", "Jun", "Jul", "Aug", "Sep", "Oct", "Nov", "Dec",
];
const PLATFORMS: &[&str] = &[
    "Facebook",
    "YouTube",
    "Instagram",
    "TikTok",
    "Snapchat",
    "Pinterest",
    "LinkedIn",
    "Reddit",
];

const SERIES_SETS: &[&[&str]] = &[
    &["Men", "Women"],
    &["Urban", "Rural"],
    &["North", "South", "East", "West"],
    &["Online", "In store", "Phone"],
    &["Exports", "Imports"],
    &["Product A", "Product B", "Product C", "Product D"],
    &["2019", "2020", "2021", "2022"],
];

struct Measure {
    name: &'static str,
    unit: Option<&'static str>,
    /// Largest magnitude drawn, before the random scale shift.
    top: f64,
}

const MEASURES: &[Measure] = &[
    Measure {
        name: "Revenue",
        unit: Some("$"),
        top: 1000.0,
    },
    Measure {
        name: "Share of respondents",
        unit: Some("%"),
        top: 100.0,
    },
    Measure {
        name: "Population",
        unit: None,
        top: 10000.0,
    },
    Measure {
        name: "Sales",
        unit: Some("€"),
        top: 500.0,
    },
    Measure {
        name: "Unemployment rate",
        unit: Some("%"),
        top: 25.0,
    },
    Measure {
        name: "Visitors",
        unit: None,
        top: 100000.0,
    },
    Measure {
        name: "Production",
        unit: None,
        top: 50.0,
    },
    Measure {
        name: "Market share",
        unit: Some("%"),
        top: 60.0,
    },
    Measure {
        name: "Average price",
        unit: Some("£"),
        top: 20.0,
    },
    Measure {
        name: "Net change",
        unit: None,
        top: 10.0,
    },
];

fn x_domain(rng: &mut ChaCha8Rng, n: usize) -> (&'static str, Vec<String>) {
    match rng.gen_range(0..6) {
        0 => {
            let start = rng.gen_range(1995..=2020);
            ("Year", (0..n).map(|i| (start + i as i32).to_string()).collect())
        }
        1 => {
            let start = rng.gen_range(0..=MONTHS.len() - n);
            (
                "Month",
                MONTHS[start..start + n].iter().map(|s| s.to_string()).collect(),
            )
        }
        2 => ("Country", pick_distinct(rng, COUNTRIES, n)),
        3 => ("Category", pick_distinct(rng, CATEGORIES, n)),
        4 if n <= AGE_GROUPS.len() => {
            let start = rng.gen_range(0..=AGE_GROUPS.len() - n);
            (
                "Age group",
                AGE_GROUPS[start..start + n].iter().map(|s| s.to_string()).collect(),
            )
        }
        _ => ("Platform", pick_distinct(rng, PLATFORMS, n)),
    }
}

fn pick_distinct(rng: &mut ChaCha8Rng, pool: &[&str], n: usize) -> Vec<String> {
    pool.choose_multiple(rng, n).map(|s| s.to_string()).collect()
}

/// Non-zero values with at most `decimals` decimals. Percent measures stay
/// within [0, 100]; `signed` allows negatives.
fn draw_values(rng: &mut ChaCha8Rng, m: &Measure, n: usize, signed: bool) -> Vec<f64> {
    let top = if m.unit == Some("%") {
        m.top
    } else {
        m.top * [0.1, 1.0, 10.0][rng.gen_range(0..3)]
    };
    let decimals = if top >= 1000.0 { 0 } else { rng.gen_range(0..=2) };
    let scale = 10f64.powi(decimals);
    let lo = if signed { -0.5 * top } else { 0.05 * top };
    (0..n)
        .map(|_| loop {
            let v = round2((rng.gen_range(lo..=top) * scale).round() / scale);
            if v != 0.0 {
                break v;
            }
        })
        .collect()
}

/// A random table that `chart_type` can display: distinct x labels and
/// series names, at most [`MAX_CHART_ROWS`] long rows, and (for pies)
/// positive values.
pub fn random_table(chart_type: ChartType, rng: &mut ChaCha8Rng) -> ChartReadyTable {
    let measure = &MEASURES[rng.gen_range(0..MEASURES.len())];
    let signed = chart_type != ChartType::Pie && measure.unit != Some("%") && rng.gen_bool(0.1);
    let y = Column::numeric(measure.name, measure.unit);
    if chart_type.is_grouped() {
        let set = SERIES_SETS[rng.gen_range(0..SERIES_SETS.len())];
        let k = rng.gen_range(2..=set.len());
        let series = &set[..k];
        let n = rng.gen_range(2..=MAX_CHART_ROWS / k);
        let (x_name, xs) = loop {
            let (name, xs) = x_domain(rng, n);
            // A year-valued series must not share a column with year labels.
            if !(name == "Year" && series[0] == "2019") {
                break (name, xs);
            }
        };
        let values = draw_values(rng, measure, n * k, signed);
        let group_name = if series[0] == "2019" { "Year" } else { "Group" };
        let title = title_for(rng, measure.name, x_name);
        let points: Vec<(&str, &str, f64)> = xs
            .iter()
            .enumerate()
            .flat_map(|(i, x)| series.iter().enumerate().map(move |(j, s)| (i, j, x, *s)))
            .map(|(i, j, x, s)| (x.as_str(), s, values[i * k + j]))
            .collect();
        ChartReadyTable::grouped(title.as_deref(), x_name, group_name, y, &points)
            .expect("generated grouped table is valid")
    } else {
        let n = rng.gen_range(if chart_type == ChartType::Pie { 2 } else { 3 }..=MAX_CHART_ROWS);
        let (x_name, xs) = x_domain(rng, n);
        let values = draw_values(rng, measure, n, signed);
        let title = title_for(rng, measure.name, x_name);
        let points: Vec<(&str, f64)> = xs.iter().map(String::as_str).zip(values).collect();
        ChartReadyTable::simple(title.as_deref(), x_name, y, &points).expect("generated simple table is valid")
    }
}

fn title_for(rng: &mut ChaCha8Rng, measure: &str, x_name: &str) -> Option<String> {
    match rng.gen_range(0..5) {
        0 => None,
        1 => Some(format!("{measure} by {}", x_name.to_lowercase())),
        2 => Some(format!("{measure} per {}", x_name.to_lowercase())),
        3 => Some(format!("{measure}, {}", rng.gen_range(2015..=2023))),
        _ => Some(format!(
            "Distribution of {} by {}",
            measure.to_lowercase(),
            x_name.to_lowercase()
        )),
    }
}
