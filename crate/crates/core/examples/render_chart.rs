//! Render one grouped bar chart and print its SVG plus mark-level provenance.
//!
//! cargo run --example render_chart > chart.svg

use chartcorpus::synth::{diversify_style, render, Canvas, ChartSpec, ChartType};
use chartcorpus::table::{ChartReadyTable, Column};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let table = ChartReadyTable::grouped(
        Some("Smartphone ownership by age"),
        "Age group",
        "Year",
        Column::numeric("Share", Some("%")),
        &[
            ("18-29", "2015", 86.0),
            ("18-29", "2021", 96.0),
            ("30-49", "2015", 83.0),
            ("30-49", "2021", 95.0),
            ("50-64", "2015", 58.0),
            ("50-64", "2021", 83.0),
        ],
    )?;
    let mut style = diversify_style(42);
    style.show_data_labels = true;
    let chart = render(&ChartSpec::new(ChartType::GroupedBar, table, style, Canvas::default())?)?;
    println!("{}", chart.svg);
    eprintln!("palette {:?}, plot area {:?}", chart.palette, chart.plot_area);
    for m in &chart.marks {
        eprintln!(
            "{:>6} {:>5} = {:>5} at {:?} {}",
            m.x_label, m.series, m.value, m.bbox, m.color
        );
    }
    Ok(())
}
