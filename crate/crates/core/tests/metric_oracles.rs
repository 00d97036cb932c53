//! Metric values counted by hand.

use chartcorpus::metrics::{corpus_bleu, relaxed_accuracy, rms_f1, rnss};
use chartcorpus::table::{Cell, Column, DataTable};

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() < 1e-9
}

fn sales(rows: &[(&str, f64)]) -> DataTable {
    DataTable::new(
        None,
        vec![Column::categorical("Year"), Column::numeric("Sales", None)],
        rows.iter()
            .map(|(y, v)| vec![Cell::text(*y), Cell::Number(*v)])
            .collect(),
    )
    .unwrap()
}

#[test]
fn bleu_short_candidate() {
    // 3-token candidate, 4-token reference: unigram 3/3, bigram 2/2,
    // trigram 1/1, no 4-grams (smoothed to 1e-9), brevity exp(1 - 4/3).
    let got = corpus_bleu(&["the cat sat".into()], &[vec!["the cat sat down".into()]]).unwrap();
    let want = 100.0 * (1.0f64 - 4.0 / 3.0).exp() * 1e-9f64.powf(0.25);
    assert!(close(got, want), "{got} vs {want}");
    assert!((got - 0.4029).abs() < 1e-4);
}

#[test]
fn bleu_clips_repeated_tokens() {
    // Unigrams: "the" x4 clipped to 2 of 4; bigram "the the" x3 clipped
    // to 1 of 3; trigram x2 clipped to 0; 4-gram 0 of 1. Equal lengths.
    let got = corpus_bleu(&["the the the the".into()], &[vec!["the the cat sat".into()]]).unwrap();
    let want = 100.0 * (((0.5f64).ln() + (1.0f64 / 3.0).ln() + 2.0 * 1e-9f64.ln()) / 4.0).exp();
    assert!(close(got, want), "{got} vs {want}");
}

#[test]
fn rnss_hand_matching() {
    // 10<->10 costs 0, 21<->20 costs 1/20.
    assert!(close(rnss(&[10.0, 21.0], &[20.0, 10.0]), 1.0 - 0.05 / 2.0));
    // One gold number unmatched costs 1 of 2.
    assert!(close(rnss(&[10.0], &[10.0, 50.0]), 0.5));
    // Distance caps at 1 per pair.
    assert!(close(rnss(&[1000.0], &[1.0]), 0.0));
}

#[test]
fn rms_hand_counts() {
    let gold = sales(&[("2001", 5.0), ("2002", 7.5)]);
    let off = rms_f1(&sales(&[("2001", 5.0), ("2002", 8.25)]), &gold);
    assert!(close(off.precision, 0.95) && close(off.recall, 0.95) && close(off.f1, 0.95));
    let short = rms_f1(&sales(&[("2001", 5.0)]), &gold);
    assert!(close(short.precision, 1.0) && close(short.recall, 0.5) && close(short.f1, 2.0 / 3.0));
}

#[test]
fn rms_accepts_transposed_prediction() {
    let gold = sales(&[("2001", 5.0), ("2002", 7.5)]);
    let transposed = DataTable::new(
        None,
        vec![
            Column::categorical("Year"),
            Column::numeric("2001", None),
            Column::numeric("2002", None),
        ],
        vec![vec![Cell::text("Sales"), Cell::Number(5.0), Cell::Number(7.5)]],
    )
    .unwrap();
    assert!(close(rms_f1(&transposed, &gold).f1, 1.0));
}

#[test]
fn relaxed_accuracy_boundaries() {
    assert_eq!(relaxed_accuracy("105", "100"), 1.0);
    assert_eq!(relaxed_accuracy("95", "100"), 1.0);
    assert_eq!(relaxed_accuracy("105.01", "100"), 0.0);
    assert_eq!(relaxed_accuracy("0", "0"), 1.0);
    assert_eq!(relaxed_accuracy("0.01", "0"), 0.0);
    assert_eq!(relaxed_accuracy("$1,050", "1000"), 1.0);
    assert_eq!(relaxed_accuracy(" Yes ", "yes"), 1.0);
    assert_eq!(relaxed_accuracy("no", "yes"), 0.0);
}

#[test]
fn listed_metric_examples() {
    assert_eq!(relaxed_accuracy("98", "100"), 1.0);
    assert_eq!(relaxed_accuracy("94", "100"), 0.0);
    assert!(close(rnss(&[10.0], &[10.0]), 1.0));
    assert!(close(rnss(&[9.5], &[10.0]), 0.95));
    assert!(close(rnss(&[], &[10.0]), 0.0));
    assert!(close(rnss(&[], &[]), 1.0));
    assert_eq!(corpus_bleu(&[String::new()], &[vec!["a b c d".into()]]).unwrap(), 0.0);
    assert!(corpus_bleu(&["a".into()], &[]).is_err());
}
