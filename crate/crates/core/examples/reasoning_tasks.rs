//! Pretraining records for one chart: the data-table target, bar-height
//! fractions for value estimation, and template-driven reasoning questions.
//!
//! cargo run --example reasoning_tasks

use chartcorpus::synth::{diversify_style, render, Canvas, ChartSpec, ChartType};
use chartcorpus::table::{ChartReadyTable, Column};
use chartcorpus::tasks::qa::template;
use chartcorpus::tasks::{enumerate_applicable, generate_qa, table_record, value_estimation_record};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let table = ChartReadyTable::simple(
        Some("Box office revenue"),
        "Studio",
        Column::numeric("Revenue", Some("$")),
        &[
            ("Aster", 412.0),
            ("Borealis", 289.5),
            ("Cinder", 633.25),
            ("Dune", 150.0),
        ],
    )?;
    let chart = render(&ChartSpec::new(
        ChartType::SimpleBar,
        table.clone(),
        diversify_style(9),
        Canvas::default(),
    )?)?;

    let t = table_record("chart.svg", &table)?;
    println!("{}\n  -> {}\n", t.prompt, t.target);
    let v = value_estimation_record("chart.svg", &chart)?;
    println!("{}\n  -> {}\n", v.prompt, v.target);

    let ids = enumerate_applicable(&chart);
    println!("{} of the templates apply to this chart", ids.len());
    if let Some(t) = ids.first().and_then(|id| template(*id)) {
        println!("first: {} {:?}\n", t.code(), t.pattern);
    }
    for r in generate_qa(&chart, "chart.svg", 8, 2024) {
        println!("{}\n  -> {}", r.prompt, r.target);
    }
    Ok(())
}
