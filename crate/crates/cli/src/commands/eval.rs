//! `hsd eval` — score predictions against gold annotations.
//!
//! Single-task mode pairs a gold file with a prediction file record by
//! record (ids must agree). Summary mode combines three per-task report
//! JSONs into the cross-task average.

use std::path::PathBuf;

use clap::Args;
use hsd_core::corpus::LabeledRecord;
use hsd_core::metrics::{classification_eval, span_eval, summarize, EvalReport};
use hsd_core::normalize::CleanText;
use hsd_core::span::SpanSet;
use hsd_core::task::{Alphabet, ClassLabel, Task};

use crate::{usage, CliResult, Ctx};

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Task: vihsd, victsd, or vihos.
    #[arg(long)]
    task: Option<String>,

    /// Gold dataset (CSV or JSONL).
    #[arg(long)]
    gold: Option<PathBuf>,

    /// Predictions JSONL (decode output or gold-shaped records).
    #[arg(long)]
    pred: Option<PathBuf>,

    /// Gold schema override (e.g. vihsd_binary).
    #[arg(long)]
    schema: Option<String>,

    /// Also write the report JSON here.
    #[arg(long)]
    json: Option<PathBuf>,

    /// Print "table" (default) or "json" to stdout.
    #[arg(long, default_value = "table")]
    format: String,

    /// Summary mode: exactly three report JSONs, one per task.
    #[arg(long, num_args = 3, value_name = "REPORT")]
    summary: Option<Vec<PathBuf>>,
}

pub fn run(ctx: &Ctx, args: EvalArgs) -> CliResult {
    let as_json = match args.format.as_str() {
        "table" => false,
        "json" => true,
        other => return Err(usage(format!("unknown format {other:?}"))),
    };

    if let Some(reports) = &args.summary {
        return run_summary(reports, as_json);
    }

    let (task, gold, pred) = match (&args.task, &args.gold, &args.pred) {
        (Some(t), Some(g), Some(p)) => (super::parse_task(t)?, g, p),
        _ => {
            return Err(usage(
                "eval needs --task, --gold, and --pred (or --summary with three reports)",
            ))
        }
    };

    // pairing is positional, so reads are always strict here: a silently
    // skipped row would misalign every record after it
    let schema = super::resolve_schema(args.schema.as_deref(), Some(task), gold)?;
    let golds: Vec<LabeledRecord> = super::open_dataset(gold, &schema, true)?
        .collect::<Result<_, _>>()
        .map_err(|e| anyhow::anyhow!("gold {}: {e}", gold.display()))?;
    let pred_schema = super::resolve_schema(args.schema.as_deref(), Some(task), pred)?;
    let preds: Vec<LabeledRecord> = super::open_dataset(pred, &pred_schema, true)?
        .collect::<Result<_, _>>()
        .map_err(|e| anyhow::anyhow!("pred {}: {e}", pred.display()))?;

    if golds.len() != preds.len() {
        return Err(anyhow::anyhow!(
            "gold has {} records, pred has {}",
            golds.len(),
            preds.len()
        )
        .into());
    }
    for (i, (g, p)) in golds.iter().zip(&preds).enumerate() {
        if g.id != p.id {
            return Err(anyhow::anyhow!(
                "record {} id mismatch: gold {:?} vs pred {:?}",
                i + 1,
                g.id,
                p.id
            )
            .into());
        }
    }

    let report = match task {
        Task::HateSpansDetection => {
            let texts: Vec<CleanText> = golds.iter().map(|r| r.text.clone()).collect();
            let gold_spans: Vec<SpanSet> = golds
                .iter()
                .map(|r| r.spans.clone().unwrap_or_default())
                .collect();
            let pred_spans: Vec<SpanSet> = preds
                .iter()
                .map(|r| r.spans.clone().unwrap_or_default())
                .collect();
            span_eval(&gold_spans, &pred_spans, &texts).map_err(anyhow::Error::from)?
        }
        _ => {
            let alphabet = schema
                .alphabet
                .or_else(|| task.alphabet())
                .expect("classification schema has an alphabet");
            let gold_labels = parse_labels(&golds, alphabet)?;
            let pred_labels = parse_labels(&preds, alphabet)?;
            classification_eval(&gold_labels, &pred_labels).map_err(anyhow::Error::from)?
        }
    };

    if let Some(path) = &args.json {
        std::fs::write(path, serde_json::to_string_pretty(&report)?)
            .map_err(|e| anyhow::anyhow!("cannot write {}: {e}", path.display()))?;
    }
    if as_json {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        print_table_header();
        print_table_row(&report);
    }
    if !ctx.quiet {
        eprintln!("eval: {} examples", report.n_examples);
    }
    Ok(())
}

fn parse_labels(records: &[LabeledRecord], alphabet: Alphabet) -> CliResult<Vec<ClassLabel>> {
    records
        .iter()
        .map(|r| {
            r.class_label(alphabet)
                .map_err(|e| anyhow::anyhow!("record {}: {e}", r.id).into())
        })
        .collect()
}

fn run_summary(reports: &[PathBuf], as_json: bool) -> CliResult {
    let mut parsed: Vec<EvalReport> = Vec::with_capacity(reports.len());
    for path in reports {
        let text = std::fs::read_to_string(path)
            .map_err(|e| anyhow::anyhow!("cannot read {}: {e}", path.display()))?;
        parsed.push(
            serde_json::from_str(&text)
                .map_err(|e| anyhow::anyhow!("bad report {}: {e}", path.display()))?,
        );
    }
    parsed.sort_by_key(|r| r.task);
    let summary = summarize(parsed).map_err(anyhow::Error::from)?;
    if as_json {
        println!("{}", serde_json::to_string_pretty(&summary)?);
    } else {
        println!("Average MF1: {:.4}", summary.average_mf1);
        print_table_header();
        for report in &summary.reports {
            print_table_row(report);
        }
    }
    Ok(())
}

fn print_table_header() {
    println!("{:<24} {:>8} {:>8} {:>8}", "task", "Acc", "WF1", "MF1");
}

fn print_table_row(report: &EvalReport) {
    println!(
        "{:<24} {:>8.4} {:>8.4} {:>8.4}",
        report.task.prefix(),
        report.accuracy,
        report.weighted_f1,
        report.macro_f1
    );
}
