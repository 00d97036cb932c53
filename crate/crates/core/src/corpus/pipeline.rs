//! synthesize, extract, gen-tasks and distill.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::tablegen::random_table;
use super::{
    chart_id, io_err, mix_seed, read_jsonl, read_manifest, write_jsonl, CorpusError, ManifestEntry, PipelineConfig,
    CHARTS_DIR, MANIFEST, OPEN_QA, SUMMARIES, TASKS_DIR,
};
use crate::distill::{
    backend_from_config, build_table_summary_prompt, run_batch, table_payload, BackendConfig, BatchJob, BatchOptions,
    CheckpointEntry, Clock, Demonstration, SystemClock, Transport, UreqTransport,
};
use crate::extract::{extract_chart, Confidence, SelectorProfile};
use crate::synth::{choose_chart_type, diversify_style, render, ChartSpec, ChartType, ChartTypeWeights, RenderedChart};
use crate::table::{decompose, Cell, ChartReadyTable, Column, DataTable};
use crate::tasks::{
    assemble_open_qa_records, assemble_summary_records, generate_qa, table_record, value_estimation_record, ChartRef,
    OpenQaPair, TaskError, TaskKind, TaskRecord,
};

const TYPE_SALT: u64 = 0x7970_655f_7361_6c74;
const QA_SALT: u64 = 0x7161_5f73_616c_7421;
const GOLDEN_FRACTION: f64 = 0.618_033_988_749_894_9;

fn pool(workers: usize) -> Result<rayon::ThreadPool, CorpusError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| CorpusError::InvalidConfig(e.to_string()))
}

/// Chart type for generated chart `index`.
///
/// The draw follows a golden-ratio (Weyl) sequence with a seed-derived
/// offset, so type shares track the weights to within about 1/n instead of
/// the sampling noise of independent draws.
fn generated_type(weights: &ChartTypeWeights, seed: u64, index: usize) -> ChartType {
    let offset = (mix_seed(seed ^ TYPE_SALT, u64::MAX) >> 11) as f64 / (1u64 << 53) as f64;
    let u = (offset + (index as f64 + 1.0) * GOLDEN_FRACTION).fract();
    let total = weights.total();
    let mut acc = 0.0;
    let mut last = None;
    for t in ChartType::ALL {
        let w = weights.get(t);
        if w <= 0.0 {
            continue;
        }
        acc += w / total;
        last = Some(t);
        if u < acc {
            return t;
        }
    }
    last.expect("valid weights have a positive entry")
}

/// Decomposed input tables, in file-name order.
fn load_input_tables(dir: &Path, seed: u64) -> Result<Vec<ChartReadyTable>, CorpusError> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(io_err(dir))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| matches!(p.extension().and_then(|e| e.to_str()), Some("csv" | "json")))
        .collect();
    files.sort();
    let mut out = Vec::new();
    for (i, path) in files.iter().enumerate() {
        let text = fs::read_to_string(path).map_err(io_err(path))?;
        let parsed = if path.extension().and_then(|e| e.to_str()) == Some("csv") {
            DataTable::from_csv_reader(text.as_bytes())
        } else {
            DataTable::from_json_str(&text)
        };
        let table = parsed.map_err(|e| CorpusError::BadRecord {
            path: path.clone(),
            line: 0,
            message: e.to_string(),
        })?;
        // Tables without a chartable column pair contribute nothing.
        if let Ok(parts) = decompose(&table, mix_seed(seed, i as u64)) {
            out.extend(parts);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SynthesizeReport {
    pub total: usize,
    pub generated: usize,
    /// Charts already complete from an earlier run.
    pub skipped: usize,
}

fn synthesize_one(
    config: &PipelineConfig,
    index: usize,
    input: Option<&ChartReadyTable>,
) -> Result<(ChartSpec, RenderedChart), CorpusError> {
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(config.seed, index as u64));
    let (chart_type, table) = match input {
        Some(t) => (
            choose_chart_type(
                t,
                &config.chart_type_weights,
                mix_seed(config.seed ^ TYPE_SALT, index as u64),
            ),
            t.clone(),
        ),
        None => {
            let ct = generated_type(&config.chart_type_weights, config.seed, index);
            (ct, random_table(ct, &mut rng))
        }
    };
    let style = config.style.apply(diversify_style(rng.gen()), &mut rng);
    let spec = ChartSpec::new(chart_type, table, style, config.canvas)?;
    let chart = render(&spec)?;
    Ok((spec, chart))
}

fn write_chart(out: &Path, id: &str, spec: &ChartSpec, chart: &RenderedChart) -> Result<ManifestEntry, CorpusError> {
    let rel = |suffix: &str| format!("{CHARTS_DIR}/{id}{suffix}");
    let entry = ManifestEntry {
        id: id.to_string(),
        chart_type: chart.chart_type,
        svg: rel(".svg"),
        sidecar: rel(".json"),
        table: rel(".table.json"),
        canvas: chart.canvas,
        palette: chart.palette,
        data_labels: spec.style.show_data_labels,
        marks: chart.marks.len(),
    };
    let put = |rel: &str, body: String| {
        let p = out.join(rel);
        fs::write(&p, body).map_err(io_err(&p))
    };
    put(&entry.svg, chart.svg.clone())?;
    put(
        &entry.sidecar,
        serde_json::to_string(chart).expect("sidecar serializes"),
    )?;
    put(
        &entry.table,
        serde_json::to_string(&spec.table).expect("table serializes"),
    )?;
    Ok(entry)
}

/// Renders the configured corpus into `config.output_dir`.
///
/// Each chart's RNG is derived from `(seed, index)`, so worker count and
/// scheduling never change the output. Charts already listed in the
/// manifest (with their files present) are kept, which makes an
/// interrupted run resumable.
pub fn cmd_synthesize(config: &PipelineConfig) -> Result<SynthesizeReport, CorpusError> {
    config.validate()?;
    let out = config.output_dir.as_path();
    let charts_dir = out.join(CHARTS_DIR);
    fs::create_dir_all(&charts_dir).map_err(io_err(&charts_dir))?;

    let inputs = match &config.input_tables {
        Some(dir) => Some(load_input_tables(dir, config.seed)?),
        None => None,
    };
    let total = match &inputs {
        Some(t) => t.len().min(config.charts),
        None => config.charts,
    };
    let wanted: HashSet<String> = (0..total).map(chart_id).collect();

    let manifest_path = out.join(MANIFEST);
    let mut done: Vec<ManifestEntry> = if manifest_path.exists() {
        read_jsonl(&manifest_path, true)?
    } else {
        Vec::new()
    };
    done.retain(|e| wanted.contains(&e.id) && [&e.svg, &e.sidecar, &e.table].iter().all(|p| out.join(p).exists()));
    // Rewrite first so appends never follow a torn line.
    write_jsonl(&manifest_path, &done)?;
    let done_ids: HashSet<String> = done.iter().map(|e| e.id.clone()).collect();
    let pending: Vec<usize> = (0..total).filter(|i| !done_ids.contains(&chart_id(*i))).collect();

    let writer = Mutex::new(
        OpenOptions::new()
            .append(true)
            .open(&manifest_path)
            .map_err(io_err(&manifest_path))?,
    );
    let fresh: Vec<ManifestEntry> = pool(config.workers)?.install(|| {
        pending
            .par_iter()
            .map(|&i| {
                let id = chart_id(i);
                let (spec, chart) = synthesize_one(config, i, inputs.as_ref().map(|t| &t[i]))?;
                let entry = write_chart(out, &id, &spec, &chart)?;
                let line = serde_json::to_string(&entry).expect("manifest entry serializes");
                let mut w = writer.lock().expect("manifest writer");
                writeln!(w, "{line}").map_err(io_err(&manifest_path))?;
                Ok(entry)
            })
            .collect::<Result<_, CorpusError>>()
    })?;
    let generated = fresh.len();
    let skipped = done.len();
    done.extend(fresh);
    done.sort_by(|a, b| a.id.cmp(&b.id));
    write_jsonl(&manifest_path, &done)?;
    Ok(SynthesizeReport {
        total,
        generated,
        skipped,
    })
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ExtractReport {
    pub processed: usize,
    pub exact: usize,
    pub recovered: usize,
    /// (file name, error) per failure.
    pub failed: Vec<(String, String)>,
}

impl ExtractReport {
    pub fn summary_line(&self) -> String {
        format!(
            "{} processed: {} exact, {} recovered, {} failed",
            self.processed,
            self.exact,
            self.recovered,
            self.failed.len()
        )
    }
}

/// Extracts every `*.svg` in `svg_dir`, writing `<stem>.table.json` into
/// `out_dir` when given. Per-file failures are reported, not raised.
pub fn cmd_extract(
    svg_dir: &Path,
    profile: &SelectorProfile,
    out_dir: Option<&Path>,
    workers: usize,
) -> Result<ExtractReport, CorpusError> {
    let mut files: Vec<PathBuf> = fs::read_dir(svg_dir)
        .map_err(io_err(svg_dir))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().and_then(|e| e.to_str()) == Some("svg"))
        .collect();
    files.sort();
    if let Some(o) = out_dir {
        fs::create_dir_all(o).map_err(io_err(o))?;
    }
    let results: Vec<Result<Confidence, (String, String)>> = pool(workers)?.install(|| {
        files
            .par_iter()
            .map(|path| {
                let name = path.file_name().unwrap_or_default().to_string_lossy().into_owned();
                let svg = fs::read_to_string(path).map_err(|e| (name.clone(), e.to_string()))?;
                let result = extract_chart(&svg, profile).map_err(|e| (name.clone(), e.to_string()))?;
                if let Some(o) = out_dir {
                    let stem = path.file_stem().unwrap_or_default().to_string_lossy();
                    let dest = o.join(format!("{stem}.table.json"));
                    let body = serde_json::to_string(&result).expect("extraction serializes");
                    fs::write(&dest, body).map_err(|e| (name.clone(), e.to_string()))?;
                }
                Ok(result.confidence)
            })
            .collect()
    });
    let mut report = ExtractReport {
        processed: results.len(),
        ..Default::default()
    };
    for r in results {
        match r {
            Ok(Confidence::Exact) => report.exact += 1,
            Ok(Confidence::Recovered) => report.recovered += 1,
            Err(f) => report.failed.push(f),
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct GenTasksReport {
    /// Records written per kind; kinds with a configured count of 0 are
    /// absent.
    pub counts: BTreeMap<TaskKind, usize>,
    pub warnings: Vec<String>,
}

impl GenTasksReport {
    pub fn table(&self, dataset: &str) -> String {
        format_task_table(&[(dataset.to_string(), self.counts.clone())])
    }
}

pub const TASK_COLUMNS: [&str; 4] = [
    "Data Table Generation",
    "Numerical & Visual Reasoning",
    "Open-ended Question Answering",
    "Chart Summarization",
];

/// Per-dataset record counts in four task columns plus a total row. Table
/// and value-estimation records both count as data table generation.
pub fn format_task_table(rows: &[(String, BTreeMap<TaskKind, usize>)]) -> String {
    let cols = |c: &BTreeMap<TaskKind, usize>| {
        let g = |k| c.get(&k).copied().unwrap_or(0);
        [
            g(TaskKind::Table) + g(TaskKind::ValueEstimation),
            g(TaskKind::QaReasoning),
            g(TaskKind::QaOpen),
            g(TaskKind::Summary),
        ]
    };
    let mut lines = vec![
        format!("| Dataset | {} |", TASK_COLUMNS.join(" | ")),
        format!("|---|{}", "---|".repeat(TASK_COLUMNS.len())),
    ];
    let mut total = [0usize; 4];
    for (name, counts) in rows {
        let c = cols(counts);
        for (t, v) in total.iter_mut().zip(c) {
            *t += v;
        }
        lines.push(format!("| {name} | {} |", c.map(|v| v.to_string()).join(" | ")));
    }
    lines.push(format!("| Total | {} |", total.map(|v| v.to_string()).join(" | ")));
    lines.join("\n")
}

fn load_chart(corpus: &Path, e: &ManifestEntry) -> Result<(RenderedChart, ChartReadyTable), CorpusError> {
    let read = |rel: &str| {
        let p = corpus.join(rel);
        fs::read_to_string(&p).map_err(io_err(&p))
    };
    let bad = |rel: &str, e: serde_json::Error| CorpusError::BadRecord {
        path: corpus.join(rel),
        line: 1,
        message: e.to_string(),
    };
    let chart = serde_json::from_str(&read(&e.sidecar)?).map_err(|x| bad(&e.sidecar, x))?;
    let table = serde_json::from_str(&read(&e.table)?).map_err(|x| bad(&e.table, x))?;
    Ok((chart, table))
}

fn list_ids(ids: &[String]) -> String {
    const SHOWN: usize = 5;
    let mut s = ids.iter().take(SHOWN).cloned().collect::<Vec<_>>().join(", ");
    if ids.len() > SHOWN {
        s.push_str(&format!(", ... ({} more)", ids.len() - SHOWN));
    }
    s
}

/// Writes `tasks/<kind>.jsonl` for every kind with a positive count.
///
/// Summaries come from `summaries.jsonl` and open questions from
/// `open_qa.jsonl`; charts lacking them produce warnings, not errors.
pub fn cmd_gen_tasks(corpus: &Path, config: &PipelineConfig) -> Result<GenTasksReport, CorpusError> {
    let manifest = read_manifest(corpus)?;
    let counts = config.tasks;
    let per_chart: Vec<(Vec<TaskRecord>, Vec<TaskRecord>)> = pool(config.workers)?.install(|| {
        manifest
            .par_iter()
            .enumerate()
            .map(|(i, e)| {
                let (chart, table) = load_chart(corpus, e)?;
                let mut tables = Vec::new();
                if counts.table > 0 {
                    tables.extend(table_record(&e.svg, &table).ok());
                }
                if counts.value_estimation > 0 {
                    // Pies have no value axis; their records are skipped.
                    tables.extend(value_estimation_record(&e.svg, &chart).ok());
                }
                let qa = generate_qa(
                    &chart,
                    &e.svg,
                    counts.qa_reasoning,
                    mix_seed(config.seed ^ QA_SALT, i as u64),
                );
                Ok((tables, qa))
            })
            .collect::<Result<_, CorpusError>>()
    })?;
    let mut by_kind: BTreeMap<TaskKind, Vec<TaskRecord>> = BTreeMap::new();
    for (tables, qa) in per_chart {
        for r in tables.into_iter().chain(qa) {
            by_kind.entry(r.kind).or_default().push(r);
        }
    }

    let mut warnings = Vec::new();
    let refs: Vec<ChartRef> = manifest
        .iter()
        .map(|e| ChartRef {
            id: e.id.clone(),
            image: e.svg.clone(),
        })
        .collect();
    let summaries_path = corpus.join(SUMMARIES);
    let summaries: Vec<CheckpointEntry> = if summaries_path.exists() {
        read_jsonl(&summaries_path, false)?
    } else {
        Vec::new()
    };
    let mut summary_lists: HashMap<String, Vec<String>> = HashMap::new();
    for s in summaries {
        summary_lists.entry(s.id).or_default().push(s.summary);
    }
    if counts.summary > 0 {
        let capped: HashMap<String, Vec<String>> = summary_lists
            .iter()
            .map(|(k, v)| (k.clone(), v.iter().take(counts.summary).cloned().collect()))
            .collect();
        let a = assemble_summary_records(&refs, &capped);
        let missing: Vec<String> = a
            .errors
            .iter()
            .filter_map(|e| match e {
                TaskError::MissingSummary(id) => Some(id.clone()),
                _ => None,
            })
            .collect();
        if !missing.is_empty() {
            warnings.push(format!(
                "MissingSummary: {} chart(s) have no summary: {}",
                missing.len(),
                list_ids(&missing)
            ));
        }
        by_kind.insert(TaskKind::Summary, a.records);
    }
    if counts.qa_open > 0 {
        let path = corpus.join(OPEN_QA);
        let pairs: Vec<OpenQaPair> = if path.exists() {
            read_jsonl(&path, false)?
        } else {
            warnings.push(format!("MissingSummary: no {OPEN_QA}; open-ended QA records skipped"));
            Vec::new()
        };
        let mut per_chart: HashMap<&str, usize> = HashMap::new();
        let capped: Vec<OpenQaPair> = pairs
            .iter()
            .filter(|p| {
                let n = per_chart.entry(p.chart_id.as_str()).or_default();
                *n += 1;
                *n <= counts.qa_open
            })
            .cloned()
            .collect();
        let first: HashMap<String, String> = summary_lists
            .iter()
            .filter_map(|(k, v)| v.first().map(|s| (k.clone(), s.clone())))
            .collect();
        let a = assemble_open_qa_records(&refs, &first, &capped);
        warnings.extend(a.errors.iter().map(|e| e.to_string()));
        if !a.diagnostics.is_empty() {
            warnings.push(format!(
                "{} open question(s) accepted without a summary to check",
                a.diagnostics.len()
            ));
        }
        by_kind.insert(TaskKind::QaOpen, a.records);
    }

    let tasks_dir = corpus.join(TASKS_DIR);
    fs::create_dir_all(&tasks_dir).map_err(io_err(&tasks_dir))?;
    let configured = |k: TaskKind| match k {
        TaskKind::Table => counts.table,
        TaskKind::ValueEstimation => counts.value_estimation,
        TaskKind::QaReasoning => counts.qa_reasoning,
        TaskKind::QaOpen => counts.qa_open,
        TaskKind::Summary => counts.summary,
    };
    let mut report = GenTasksReport {
        warnings,
        ..Default::default()
    };
    for kind in TaskKind::ALL {
        let path = tasks_dir.join(format!("{}.jsonl", kind.as_str()));
        if configured(kind) == 0 {
            // A stale file from an earlier config would misreport the corpus.
            if path.exists() {
                fs::remove_file(&path).map_err(io_err(&path))?;
            }
            continue;
        }
        let records = by_kind.remove(&kind).unwrap_or_default();
        write_jsonl(&path, &records)?;
        report.counts.insert(kind, records.len());
    }
    Ok(report)
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct DistillReport {
    /// Charts with a summary on file after this run.
    pub summarized: usize,
    pub newly_completed: usize,
    pub skipped: usize,
    pub failed: Vec<(String, String)>,
    pub over_budget: usize,
}

pub const CHECKPOINT: &str = "distill.checkpoint.jsonl";
pub const AUDIT_LOG: &str = "distill.audit.jsonl";

fn default_demonstration() -> Demonstration {
    let table = DataTable::new(
        Some("Households with internet access".into()),
        vec![
            Column::categorical("Year"),
            Column::numeric("Share of households", Some("%")),
        ],
        [("2015", 78.0), ("2017", 84.0), ("2019", 88.5), ("2021", 91.0)]
            .iter()
            .map(|(y, v)| vec![Cell::text(*y), Cell::Number(*v)])
            .collect(),
    )
    .expect("demonstration table is valid");
    Demonstration::new(
        table_payload(&table),
        "The share of households with internet access rose steadily from 78% in 2015 to 91% in 2021. \
         The largest gain came between 2015 and 2017, when the share grew by six points.",
    )
    .expect("demonstration is non-empty")
}

/// [`cmd_distill_with`] over real HTTP and the system clock.
pub fn cmd_distill(corpus: &Path, config: &PipelineConfig) -> Result<DistillReport, CorpusError> {
    cmd_distill_with(
        corpus,
        config,
        Arc::new(UreqTransport),
        Arc::new(SystemClock::default()),
    )
}

/// Summarizes every chart's source table and writes `summaries.jsonl`.
///
/// Uses the backend named by `config.backend_config`, or the offline
/// fallback. Progress is checkpointed so a rerun only sends what is
/// missing.
pub fn cmd_distill_with(
    corpus: &Path,
    config: &PipelineConfig,
    transport: Arc<dyn Transport>,
    clock: Arc<dyn Clock>,
) -> Result<DistillReport, CorpusError> {
    let manifest = read_manifest(corpus)?;
    let backend_config = match &config.backend_config {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(io_err(p))?;
            Some(serde_json::from_str::<BackendConfig>(&text).map_err(|e| CorpusError::InvalidConfig(e.to_string()))?)
        }
        None => None,
    };
    let backend = backend_from_config(backend_config, transport, clock)?;
    let demo = match &config.demonstration {
        Some(d) => Demonstration::new(d.input.clone(), d.summary.clone())?,
        None => default_demonstration(),
    };
    let mut jobs = Vec::with_capacity(manifest.len());
    for e in &manifest {
        let (_, table) = load_chart(corpus, e)?;
        jobs.push(BatchJob {
            id: e.id.clone(),
            bundle: build_table_summary_prompt(&table.to_wide(), &demo)?,
        });
    }
    let checkpoint = corpus.join(CHECKPOINT);
    let audit = corpus.join(AUDIT_LOG);
    let outcome = run_batch(
        &jobs,
        backend.as_ref(),
        &checkpoint,
        Some(&audit),
        BatchOptions {
            max_requests: config.max_requests,
            workers: config.workers,
        },
    )
    .map_err(io_err(&checkpoint))?;
    let ids: HashSet<&str> = manifest.iter().map(|e| e.id.as_str()).collect();
    let records: Vec<CheckpointEntry> = outcome
        .summaries
        .iter()
        .filter(|(id, _)| ids.contains(id.as_str()))
        .map(|(id, summary)| CheckpointEntry {
            id: id.clone(),
            summary: summary.clone(),
        })
        .collect();
    write_jsonl(&corpus.join(SUMMARIES), &records)?;
    Ok(DistillReport {
        summarized: records.len(),
        newly_completed: outcome.newly_completed,
        skipped: outcome.skipped,
        failed: outcome.failed.into_iter().map(|(id, e)| (id, e.to_string())).collect(),
        over_budget: outcome.over_budget,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(dir: &Path, charts: usize, seed: u64) -> PipelineConfig {
        PipelineConfig {
            seed,
            charts,
            output_dir: dir.to_path_buf(),
            ..Default::default()
        }
    }

    #[test]
    fn weyl_types_track_weights() {
        let w = ChartTypeWeights::default();
        let n = 2000;
        let mut counts: HashMap<ChartType, usize> = HashMap::new();
        for i in 0..n {
            *counts.entry(generated_type(&w, 3, i)).or_default() += 1;
        }
        for t in ChartType::ALL {
            let share = counts.get(&t).copied().unwrap_or(0) as f64 / n as f64;
            assert!((share - w.get(t) / w.total()).abs() < 0.005, "{t:?} {share}");
        }
    }

    #[test]
    fn synthesize_is_resumable_and_deterministic() {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        let full = cmd_synthesize(&config(a.path(), 12, 5)).unwrap();
        assert_eq!((full.generated, full.skipped), (12, 0));
        // A partial run, a torn manifest line, then a resume.
        cmd_synthesize(&config(b.path(), 5, 5)).unwrap();
        let m = b.path().join(MANIFEST);
        let mut text = fs::read_to_string(&m).unwrap();
        text.push_str("{\"id\":\"chart-0000");
        fs::write(&m, text).unwrap();
        let resumed = cmd_synthesize(&config(b.path(), 12, 5)).unwrap();
        assert_eq!((resumed.generated, resumed.skipped), (7, 5));
        assert_eq!(fs::read(a.path().join(MANIFEST)).unwrap(), fs::read(&m).unwrap());
        for i in 0..12 {
            let f = format!("{CHARTS_DIR}/{}.svg", chart_id(i));
            assert_eq!(
                fs::read(a.path().join(&f)).unwrap(),
                fs::read(b.path().join(&f)).unwrap()
            );
        }
    }

    #[test]
    fn zero_charts_gives_an_empty_manifest() {
        let d = tempfile::tempdir().unwrap();
        cmd_synthesize(&config(d.path(), 0, 1)).unwrap();
        assert_eq!(fs::read_to_string(d.path().join(MANIFEST)).unwrap(), "");
    }

    #[test]
    fn pie_only_weights_give_only_pies() {
        let d = tempfile::tempdir().unwrap();
        let mut c = config(d.path(), 20, 2);
        c.chart_type_weights = serde_json::from_str(r#"{"pie": 1}"#).unwrap();
        cmd_synthesize(&c).unwrap();
        let m = read_manifest(d.path()).unwrap();
        assert!(m.iter().all(|e| e.chart_type == ChartType::Pie));
    }

    #[test]
    fn extract_counts_failures_without_raising() {
        let d = tempfile::tempdir().unwrap();
        let empty = cmd_extract(d.path(), &SelectorProfile::default(), None, 2).unwrap();
        assert!(empty.summary_line().starts_with("0 processed"));
        cmd_synthesize(&config(d.path(), 6, 9)).unwrap();
        let charts = d.path().join(CHARTS_DIR);
        fs::write(charts.join("broken.svg"), "<svg><rect").unwrap();
        let out = d.path().join("extracted");
        let r = cmd_extract(&charts, &SelectorProfile::default(), Some(&out), 2).unwrap();
        assert_eq!(r.processed, 7);
        assert_eq!(r.failed.len(), 1);
        assert_eq!(r.failed[0].0, "broken.svg");
        assert_eq!(r.exact + r.recovered, 6);
        assert!(out.join(format!("{}.table.json", chart_id(0))).exists());
    }

    #[test]
    fn gen_tasks_caps_counts_and_omits_zero_kinds() {
        let d = tempfile::tempdir().unwrap();
        let mut c = config(d.path(), 10, 4);
        c.tasks.qa_open = 0;
        cmd_synthesize(&c).unwrap();
        let r = cmd_gen_tasks(d.path(), &c).unwrap();
        assert!(r.counts[&TaskKind::QaReasoning] <= 100);
        assert!(!r.counts.contains_key(&TaskKind::QaOpen));
        assert!(!d.path().join(TASKS_DIR).join("qa_open.jsonl").exists());
        assert_eq!(r.counts[&TaskKind::Summary], 0);
        assert!(r.warnings.iter().any(|w| w.starts_with("MissingSummary")));
        let table = r.table("synthetic");
        assert!(table.starts_with("| Dataset | Data Table Generation | Numerical & Visual Reasoning"));
        assert!(table.lines().last().unwrap().starts_with("| Total |"));
    }

    #[test]
    fn distill_then_gen_tasks_emits_summaries() {
        let d = tempfile::tempdir().unwrap();
        let c = config(d.path(), 4, 6);
        cmd_synthesize(&c).unwrap();
        let first = cmd_distill(d.path(), &c).unwrap();
        assert_eq!((first.summarized, first.newly_completed), (4, 4));
        let again = cmd_distill(d.path(), &c).unwrap();
        assert_eq!((again.newly_completed, again.skipped), (0, 4));
        let r = cmd_gen_tasks(d.path(), &c).unwrap();
        assert_eq!(r.counts[&TaskKind::Summary], 4);
    }
}
