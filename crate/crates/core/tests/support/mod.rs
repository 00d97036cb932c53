//! Shared helpers for integration tests.
#![allow(dead_code)]

pub mod qa_brute;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use chartcorpus::corpus::tablegen::random_table;
use chartcorpus::synth::{diversify_style, render, Canvas, ChartSpec, ChartType, RenderedChart};
use chartcorpus::table::ChartReadyTable;

/// A seeded random chart of type `ct`, optionally forcing data labels.
pub fn random_chart(ct: ChartType, seed: u64, labels: Option<bool>) -> (ChartReadyTable, RenderedChart) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let table = random_table(ct, &mut rng);
    let mut style = diversify_style(rng.gen());
    if let Some(l) = labels {
        style.show_data_labels = l;
    }
    let spec = ChartSpec::new(ct, table.clone(), style, Canvas::default()).expect("valid spec");
    (table, render(&spec).expect("renders"))
}

/// Exact-equality number extraction for cross-checking texts: every maximal
/// run of digits with optional inner `.` or `,` groups, with `,` removed.
pub fn plain_numbers(text: &str) -> Vec<f64> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        if chars[i].is_ascii_digit() {
            let start = i;
            while i < chars.len()
                && (chars[i].is_ascii_digit()
                    || ((chars[i] == '.' || chars[i] == ',') && chars.get(i + 1).is_some_and(|c| c.is_ascii_digit())))
            {
                i += 1;
            }
            let s: String = chars[start..i].iter().filter(|c| **c != ',').collect();
            if let Ok(v) = s.parse() {
                out.push(v);
            }
        } else {
            i += 1;
        }
    }
    out
}
