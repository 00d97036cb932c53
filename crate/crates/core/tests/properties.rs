//! Property checks against brute-force or closed-form oracles.

mod support;

use proptest::prelude::*;

use chartcorpus::extract::{extract_chart, SelectorProfile};
use chartcorpus::metrics::{corpus_bleu, min_cost_assignment, relaxed_accuracy, rms_f1, rnss};
use chartcorpus::number::{format_number, parse_value, round2};
use chartcorpus::synth::ChartType;
use chartcorpus::table::{Cell, Column, DataTable};
use chartcorpus::tasks::{flatten_rows, generate_qa, unflatten, value_estimation_target, TaskKind};

/// Minimum over all n! permutations.
fn brute_assignment(cost: &[Vec<f64>]) -> f64 {
    fn go(cost: &[Vec<f64>], row: usize, used: &mut Vec<bool>) -> f64 {
        if row == cost.len() {
            return 0.0;
        }
        let mut best = f64::INFINITY;
        for j in 0..cost.len() {
            if !used[j] {
                used[j] = true;
                best = best.min(cost[row][j] + go(cost, row + 1, used));
                used[j] = false;
            }
        }
        best
    }
    go(cost, 0, &mut vec![false; cost.len()])
}

fn square(max: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    (1..=max).prop_flat_map(|n| prop::collection::vec(prop::collection::vec(0.0f64..10.0, n), n))
}

fn keyed(rows: &[(String, f64)]) -> DataTable {
    DataTable::new(
        None,
        vec![Column::categorical("key"), Column::numeric("value", None)],
        rows.iter()
            .map(|(k, v)| vec![Cell::text(k.as_str()), Cell::Number(*v)])
            .collect(),
    )
    .unwrap()
}

fn chart_type() -> impl Strategy<Value = ChartType> {
    prop::sample::select(ChartType::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn assignment_matches_exhaustive_search(cost in square(6)) {
        let (cols, total) = min_cost_assignment(&cost);
        let mut seen = cols.clone();
        seen.sort_unstable();
        prop_assert_eq!(seen, (0..cost.len()).collect::<Vec<_>>());
        let recomputed: f64 = cols.iter().enumerate().map(|(i, j)| cost[i][*j]).sum();
        prop_assert!((recomputed - total).abs() < 1e-9);
        prop_assert!((total - brute_assignment(&cost)).abs() < 1e-9);
    }

    #[test]
    fn flatten_round_trips_any_cells(
        rows in (1usize..5, 1usize..6).prop_flat_map(|(w, h)| {
            prop::collection::vec(prop::collection::vec("[ -~]{0,12}|[ |&\\\\]{1,4}", w), h)
        })
    ) {
        let text = flatten_rows(&rows);
        prop_assert_eq!(unflatten(&text).unwrap(), rows);
    }

    #[test]
    fn rnss_identity_bounds_and_order_invariance(
        gold in prop::collection::vec(-1e4f64..1e4, 0..8),
        pred in prop::collection::vec(-1e4f64..1e4, 0..8),
    ) {
        prop_assert!((rnss(&gold, &gold) - 1.0).abs() < 1e-12);
        let s = rnss(&pred, &gold);
        prop_assert!((0.0..=1.0).contains(&s));
        let mut rev = pred.clone();
        rev.reverse();
        prop_assert!((rnss(&rev, &gold) - s).abs() < 1e-9);
    }

    #[test]
    fn rnss_is_monotone_in_one_perturbation(
        gold in prop::collection::vec(1.0f64..1e3, 1..7),
        pick in any::<prop::sample::Index>(),
        a in 0.0f64..0.5,
        b in 0.0f64..0.5,
    ) {
        let i = pick.index(gold.len());
        let (near, far) = if a <= b { (a, b) } else { (b, a) };
        let mut p_near = gold.clone();
        p_near[i] *= 1.0 + near;
        let mut p_far = gold.clone();
        p_far[i] *= 1.0 + far;
        prop_assert!(rnss(&p_far, &gold) <= rnss(&p_near, &gold) + 1e-12);
    }

    #[test]
    fn rms_ignores_row_order(
        rows in prop::collection::vec(("[a-z]{1,6}", -1e3f64..1e3), 1..6),
        noise in prop::collection::vec(0.8f64..1.2, 6),
    ) {
        let mut seen = std::collections::HashSet::new();
        let rows: Vec<_> = rows.into_iter().filter(|(k, _)| seen.insert(k.clone())).collect();
        let gold = keyed(&rows);
        prop_assert!((rms_f1(&gold, &gold).f1 - 1.0).abs() < 1e-12);
        let pred_rows: Vec<_> = rows.iter().zip(&noise).map(|((k, v), n)| (k.clone(), v * n)).collect();
        let mut reversed = pred_rows.clone();
        reversed.reverse();
        let a = rms_f1(&keyed(&pred_rows), &gold);
        let b = rms_f1(&keyed(&reversed), &gold);
        prop_assert!((a.f1 - b.f1).abs() < 1e-9);
    }

    #[test]
    fn relaxed_accuracy_is_scale_free(g in 0.01f64..1e5, ratio in 0.9f64..1.1, k in 1u32..4) {
        let p = g * ratio;
        let scale = 10f64.powi(k as i32);
        let base = relaxed_accuracy(&format!("{p}"), &format!("{g}"));
        let scaled = relaxed_accuracy(&format!("{}", p * scale), &format!("{}", g * scale));
        let far = (ratio - 1.0).abs() > 0.0501;
        let near = (ratio - 1.0).abs() < 0.0499;
        if far { prop_assert_eq!(base, 0.0); }
        if near { prop_assert_eq!(base, 1.0); }
        if far || near { prop_assert_eq!(base, scaled); }
    }

    #[test]
    fn canonical_format_parses_back(v in -1e7f64..1e7) {
        let s = format_number(v);
        prop_assert_eq!(parse_value(&s), Some(round2(v)));
        prop_assert!(s != "-0");
    }

    #[test]
    fn bleu_of_a_text_against_itself_is_full(words in prop::collection::vec("[a-z]{1,6}", 4..20)) {
        let text = words.join(" ");
        let b = corpus_bleu(std::slice::from_ref(&text), &[vec![text.clone()]]).unwrap();
        prop_assert!((b - 100.0).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn labeled_charts_round_trip(ct in chart_type(), seed in any::<u64>()) {
        let (table, chart) = support::random_chart(ct, seed, Some(true));
        let got = extract_chart(&chart.svg, &SelectorProfile::default()).unwrap();
        prop_assert_eq!(got.table, table.to_wide());
    }

    #[test]
    fn value_estimation_fractions_are_in_unit_range(ct in chart_type(), seed in any::<u64>()) {
        prop_assume!(ct != ChartType::Pie);
        let (table, chart) = support::random_chart(ct, seed, None);
        let rows = unflatten(&value_estimation_target(&chart).unwrap()).unwrap();
        prop_assert_eq!(rows.iter().map(Vec::len).sum::<usize>(), table.values().len());
        for cell in rows.iter().flatten() {
            let f = parse_value(cell).unwrap();
            prop_assert!((0.0..=1.0).contains(&f), "{}", f);
        }
    }

    #[test]
    fn qa_records_are_well_formed_and_distinct(ct in chart_type(), seed in any::<u64>(), count in 1usize..15) {
        let (_, chart) = support::random_chart(ct, seed, None);
        let recs = generate_qa(&chart, "img.svg", count, seed);
        prop_assert!(recs.len() <= count);
        let mut prompts: Vec<&str> = recs.iter().map(|r| r.prompt.as_str()).collect();
        prompts.sort_unstable();
        prompts.dedup();
        prop_assert_eq!(prompts.len(), recs.len());
        for r in &recs {
            prop_assert!(r.is_well_formed());
            prop_assert_eq!(r.kind, TaskKind::QaReasoning);
        }
        prop_assert_eq!(generate_qa(&chart, "img.svg", count, seed), recs);
    }
}
