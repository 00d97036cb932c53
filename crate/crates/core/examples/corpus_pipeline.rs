//! The whole factory in one process: synthesize charts, summarize them
//! offline, build task records, and print corpus statistics.
//!
//! cargo run --example corpus_pipeline [out_dir]

use std::path::PathBuf;

use chartcorpus::corpus::{cmd_distill, cmd_gen_tasks, cmd_stats, cmd_synthesize, format_stats, PipelineConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("chartcorpus-example"));
    let config = PipelineConfig::from_json_str(&format!(
        r#"{{"seed": 7, "charts": 40, "output_dir": {:?}, "tasks": {{"qa_reasoning": 5}}}}"#,
        out.to_string_lossy()
    ))?;

    let s = cmd_synthesize(&config)?;
    println!(
        "synthesized {} charts into {} ({} reused)",
        s.generated,
        out.display(),
        s.skipped
    );
    let d = cmd_distill(&out, &config)?;
    println!("summarized {} charts, {} failed", d.summarized, d.failed.len());
    let g = cmd_gen_tasks(&out, &config)?;
    for w in &g.warnings {
        println!("warning: {w}");
    }
    println!("\n{}", g.table("example"));
    println!("{}", format_stats(&cmd_stats(&out)?));
    Ok(())
}
