//! Build the distillation prompts for a table and answer them with the
//! offline fallback backend. Swap in `HttpBackend` (or a backend config file
//! passed to `chartcorpus distill`) to use a hosted model.
//!
//! cargo run --example distill_offline

use chartcorpus::distill::{
    build_rubric_eval_prompt, build_table_summary_prompt, parse_rating, summarize, Demonstration, FallbackBackend,
};
use chartcorpus::table::{Cell, Column, DataTable};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let table = DataTable::new(
        Some("Household internet access".into()),
        vec![Column::categorical("Region"), Column::numeric("Households", Some("%"))],
        vec![
            vec![Cell::text("Urban"), Cell::Number(91.0)],
            vec![Cell::text("Suburban"), Cell::Number(86.5)],
            vec![Cell::text("Rural"), Cell::Number(72.25)],
        ],
    )?;
    let demo = Demonstration::new(
        "Year | Sales & 2001 | 5 & 2002 | 7.5",
        "Sales rose from 5 in 2001 to 7.5 in 2002.",
    )?;
    let bundle = build_table_summary_prompt(&table, &demo)?;
    println!("--- prompt ---\n{}\n", bundle.to_text());

    let summary = summarize(&bundle, &FallbackBackend)?;
    println!("--- summary ---\n{summary}\n");

    let rubric = build_rubric_eval_prompt(&table, &summary, "Every number in the summary appears in the table.")?;
    println!("--- grading steps request ---\n{}\n", rubric.steps_request());
    println!(
        "--- rating request ---\n{}\n",
        rubric.rating_request("1. List the numbers. 2. Find each in the table.")
    );
    println!(
        "a reply of \"4 - mostly faithful\" parses as {}",
        parse_rating("4 - mostly faithful")?
    );
    Ok(())
}
