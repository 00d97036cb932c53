//! Score model outputs with relaxed accuracy, RNSS, RMS and corpus BLEU.
//!
//! cargo run --example score_predictions

use chartcorpus::metrics::{corpus_bleu, evaluate, relaxed_accuracy, EvalExample, EvalKind};

fn example(id: &str, prediction: &str, gold: &str, kind: EvalKind) -> EvalExample {
    EvalExample {
        id: id.into(),
        prediction: prediction.into(),
        gold: gold.into(),
        kind: Some(kind),
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!("RA(\"104\", \"100\") = {}", relaxed_accuracy("104", "100"));
    println!("RA(\"106\", \"100\") = {}", relaxed_accuracy("106", "100"));
    let bleu = corpus_bleu(
        &["sales peaked in 2002 at 7.5".into()],
        &[vec!["sales peaked at 7.5 in 2002".into()]],
    )?;
    println!("BLEU = {bleu:.2}\n");

    let report = evaluate(&[
        example("q1", "42", "41", EvalKind::Qa),
        example("q2", "Peru", "Chile", EvalKind::Qa),
        example(
            "t1",
            "Year | Sales & 2001 | 5 & 2002 | 8",
            "Year | Sales & 2001 | 5 & 2002 | 7.5",
            EvalKind::Table,
        ),
        example(
            "t2",
            "Sales | 2001 | 2002 & Value | 5 | 7.5",
            "Year | Sales & 2001 | 5 & 2002 | 7.5",
            EvalKind::Table,
        ),
        example(
            "s1",
            "Sales rose to 7.5 in 2002.",
            "Sales grew to 7.5 in 2002.",
            EvalKind::Text,
        ),
    ]);
    for s in &report.per_example {
        println!("{}", serde_json::to_string(s)?);
    }
    println!("\n{}", serde_json::to_string_pretty(&report.aggregate)?);
    Ok(())
}
