//! Recover a table from an SVG chart: exactly from data labels when present,
//! otherwise by fitting the y-axis scale to the tick labels.
//!
//! cargo run --example extract_table [file.svg]

use chartcorpus::extract::{extract_chart, SelectorProfile};
use chartcorpus::synth::{diversify_style, render, Canvas, ChartSpec, ChartType};
use chartcorpus::table::{ChartReadyTable, Column};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let profile = SelectorProfile::default();
    if let Some(path) = std::env::args().nth(1) {
        let r = extract_chart(&std::fs::read_to_string(path)?, &profile)?;
        println!("{}", serde_json::to_string_pretty(&r)?);
        return Ok(());
    }
    let table = ChartReadyTable::simple(
        Some("Monthly rainfall"),
        "Month",
        Column::numeric("Rainfall (mm)", None),
        &[("Jan", 81.3), ("Feb", 64.9), ("Mar", 47.2), ("Apr", 22.5), ("May", 9.8)],
    )?;
    for labels in [true, false] {
        let mut style = diversify_style(3);
        style.show_data_labels = labels;
        let chart = render(&ChartSpec::new(
            ChartType::SimpleBar,
            table.clone(),
            style,
            Canvas::default(),
        )?)?;
        let r = extract_chart(&chart.svg, &profile)?;
        println!("data labels {labels}: confidence {:?}", r.confidence);
        for row in r.table.to_text_grid() {
            println!("  {}", row.join(" | "));
        }
        for d in &r.diagnostics {
            println!("  note: {d}");
        }
    }
    Ok(())
}
