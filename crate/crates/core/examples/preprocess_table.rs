//! Import a CSV table, infer column kinds, and cut it into chart-ready tables.
//!
//! cargo run --example preprocess_table

use chartcorpus::synth::admissible_types;
use chartcorpus::table::{decompose, DataTable};

const CSV: &str = "\
Country,Year,GDP growth (%),Exports ($bn)
Chile,2019,0.7,68.8
Chile,2020,-6.1,74.1
Peru,2019,2.2,47.7
Peru,2020,-10.9,42.8
Kenya,2019,5.1,6.0
Kenya,2020,-0.3,5.8
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let table = DataTable::from_csv_reader(CSV.as_bytes())?;
    for c in table.columns() {
        println!("column {:?}: {:?} unit={:?}", c.name, c.kind, c.unit);
    }
    for (i, ready) in decompose(&table, 7)?.iter().enumerate() {
        println!(
            "\nchart-ready #{i}: x={:?} group={:?} y={:?} ({} rows), admissible {:?}",
            ready.x_name(),
            ready.group_column().map(|g| ready.base().columns()[g].name.clone()),
            ready.y_name(),
            ready.row_count(),
            admissible_types(ready)
        );
        for (x, series, v) in ready.triples() {
            println!("  {x:<8} {series:<16} {v}");
        }
    }
    Ok(())
}
