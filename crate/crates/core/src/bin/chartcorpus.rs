use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use chartcorpus::corpus::{
    cmd_distill, cmd_eval, cmd_extract, cmd_gen_tasks, cmd_stats, cmd_synthesize, format_stats, parse_metric,
    PipelineConfig,
};
use chartcorpus::extract::SelectorProfile;

#[derive(Parser)]
#[command(name = "chartcorpus", version, about = "Chart corpus factory and evaluation toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Pipeline config (JSON); defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Corpus directory; overrides the config output_dir.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn load(&self) -> Result<PipelineConfig> {
        let mut c = match &self.config {
            Some(p) => PipelineConfig::load(p)?,
            None => PipelineConfig::default(),
        };
        if let Some(s) = self.seed {
            c.seed = s;
        }
        if let Some(o) = &self.out {
            c.output_dir = o.clone();
        }
        Ok(c)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Render a corpus of charts with sidecars and source tables.
    Synthesize(Common),
    /// Recover data tables from a directory of SVG charts.
    Extract {
        svg_dir: PathBuf,
        /// Selector profile (JSON) for third-party SVG conventions.
        #[arg(long)]
        profile: Option<PathBuf>,
        /// Where to write <stem>.table.json files.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Exit non-zero when any file fails.
        #[arg(long)]
        strict: bool,
        #[arg(long, default_value_t = 4)]
        workers: usize,
    },
    /// Build pretraining task records from a synthesized corpus.
    GenTasks(Common),
    /// Write a summary for every chart in the corpus.
    Distill(Common),
    /// Chart-type distribution and summary statistics.
    Stats {
        #[arg(long, default_value = "corpus")]
        out: PathBuf,
        /// Print JSON instead of tables.
        #[arg(long)]
        json: bool,
    },
    /// Score {id, output} predictions against {id, target, kind?} gold.
    Eval {
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        gold: PathBuf,
        /// Forces one metric family: ra, rnss, rms or bleu.
        #[arg(long)]
        metric: Option<String>,
    },
}

fn corpus_dir(c: &PipelineConfig) -> &Path {
    c.output_dir.as_path()
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Synthesize(common) => {
            let c = common.load()?;
            let r = cmd_synthesize(&c)?;
            println!(
                "{} charts in {}: {} generated, {} already present",
                r.total,
                corpus_dir(&c).display(),
                r.generated,
                r.skipped
            );
        }
        Command::Extract {
            svg_dir,
            profile,
            out,
            strict,
            workers,
        } => {
            let profile = match profile {
                Some(p) => SelectorProfile::load(&p)?,
                None => SelectorProfile::default(),
            };
            let r = cmd_extract(&svg_dir, &profile, out.as_deref(), workers)?;
            for (file, err) in &r.failed {
                eprintln!("{file}: {err}");
            }
            println!("{}", r.summary_line());
            if strict && !r.failed.is_empty() {
                return Ok(ExitCode::from(2));
            }
        }
        Command::GenTasks(common) => {
            let c = common.load()?;
            let dir = corpus_dir(&c);
            let r = cmd_gen_tasks(dir, &c)?;
            for w in &r.warnings {
                eprintln!("warning: {w}");
            }
            let name = dir
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_else(|| "corpus".into());
            println!("{}", r.table(&name));
        }
        Command::Distill(common) => {
            let c = common.load()?;
            let r = cmd_distill(corpus_dir(&c), &c)?;
            for (id, err) in &r.failed {
                eprintln!("{id}: {err}");
            }
            println!(
                "{} summarized ({} new, {} from checkpoint), {} failed, {} over budget",
                r.summarized,
                r.newly_completed,
                r.skipped,
                r.failed.len(),
                r.over_budget
            );
        }
        Command::Stats { out, json } => {
            let s = cmd_stats(&out)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&s)?);
            } else {
                println!("{}", format_stats(&s));
            }
        }
        Command::Eval { pred, gold, metric } => {
            let metric = match metric {
                Some(m) => match parse_metric(&m) {
                    Some(k) => Some(k),
                    None => bail!("unknown metric {m:?}; expected ra, rnss, rms or bleu"),
                },
                None => None,
            };
            let report = cmd_eval(&pred, &gold, metric).context("evaluation failed")?;
            println!("{}", serde_json::to_string_pretty(&report.aggregate)?);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
