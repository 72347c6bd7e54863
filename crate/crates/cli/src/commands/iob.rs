//! `hsd iob` — convert between index spans and IOB token tags.

use std::io::{BufRead, BufReader, Write};
use std::path::PathBuf;

use clap::Args;
use hsd_core::corpus::LabeledRecord;
use hsd_core::span::{iob_to_spans, spans_to_iob, tokenize_with_offsets, IobTag, SpanSet};

use crate::progress::Progress;
use crate::{usage, CliResult, Ctx};

#[derive(Debug, Args)]
pub struct IobArgs {
    /// to-iob (spans → tags) or to-spans (tags → spans).
    #[arg(long)]
    direction: String,

    /// Input JSONL.
    #[arg(long)]
    input: PathBuf,

    /// Output JSONL; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
}

/// Tagged-token record: the IOB-side file format.
#[derive(Debug, serde::Serialize, serde::Deserialize)]
struct IobRecord {
    id: String,
    text: String,
    tokens: Vec<String>,
    tags: Vec<String>,
}

pub fn run(ctx: &Ctx, args: IobArgs) -> CliResult {
    match args.direction.as_str() {
        "to-iob" => to_iob(ctx, &args),
        "to-spans" => to_spans(ctx, &args),
        other => Err(usage(format!(
            "unknown direction {other:?} (expected to-iob or to-spans)"
        ))),
    }
}

fn to_iob(ctx: &Ctx, args: &IobArgs) -> CliResult {
    let schema = super::resolve_schema(Some("vihos"), None, &args.input)?;
    let mut reader = super::open_dataset(&args.input, &schema, ctx.strict)?;
    let mut out = super::out_writer(args.output.as_deref())?;
    let mut progress = Progress::new(ctx.progress_every, ctx.quiet, "converted");

    for record in reader.by_ref() {
        let record = record.map_err(anyhow::Error::from)?;
        let spans = record.spans.clone().unwrap_or_default();
        let seq = spans_to_iob(&record.text, &spans)
            .map_err(|e| anyhow::anyhow!("record {}: {e}", record.id))?;
        let out_record = IobRecord {
            id: record.id,
            text: record.text.text().to_string(),
            tokens: seq.tokens.iter().map(|t| t.text.clone()).collect(),
            tags: seq.tags.iter().map(|t| t.to_string()).collect(),
        };
        serde_json::to_writer(&mut out, &out_record).map_err(anyhow::Error::from)?;
        out.write_all(b"\n").map_err(anyhow::Error::from)?;
        progress.tick();
    }
    out.flush().map_err(anyhow::Error::from)?;
    progress.finish();
    super::report_skipped(ctx.quiet, "iob", reader.summary().skipped);
    Ok(())
}

fn to_spans(ctx: &Ctx, args: &IobArgs) -> CliResult {
    let reader = BufReader::new(
        std::fs::File::open(&args.input)
            .map_err(|e| anyhow::anyhow!("{}: {e}", args.input.display()))?,
    );
    let mut out = super::out_writer(args.output.as_deref())?;
    let mut progress = Progress::new(ctx.progress_every, ctx.quiet, "converted");
    let mut skipped = 0u64;
    let mut repaired = 0u64;

    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed: Result<LabeledRecord, String> = (|| {
            let record: IobRecord =
                serde_json::from_str(&line).map_err(|e| e.to_string())?;
            let tokens = tokenize_with_offsets(&record.text);
            if !record.tokens.is_empty() {
                let names: Vec<&str> = tokens.iter().map(|t| t.text.as_str()).collect();
                let given: Vec<&str> = record.tokens.iter().map(String::as_str).collect();
                if names != given {
                    return Err("tokens do not match whitespace-split text".into());
                }
            }
            let tags = record
                .tags
                .iter()
                .map(|t| t.parse::<IobTag>())
                .collect::<Result<Vec<_>, _>>()?;
            let decoded = iob_to_spans(&tokens, &tags).map_err(|e| e.to_string())?;
            if decoded.repaired {
                repaired += 1;
            }
            let mut rec = LabeledRecord::new(record.id, record.text);
            rec.spans = Some(if decoded.spans.is_empty() {
                SpanSet::empty()
            } else {
                decoded.spans
            });
            Ok(rec)
        })();
        match parsed {
            Ok(record) => {
                hsd_core::corpus::write_jsonl_record(&mut out, &record)
                    .map_err(anyhow::Error::from)?;
                progress.tick();
            }
            Err(reason) => {
                if ctx.strict {
                    return Err(anyhow::anyhow!("line {}: {reason}", lineno + 1).into());
                }
                skipped += 1;
            }
        }
    }
    out.flush().map_err(anyhow::Error::from)?;
    progress.finish();
    super::report_skipped(ctx.quiet, "iob", skipped);
    if repaired > 0 && !ctx.quiet {
        eprintln!("iob: repaired {repaired} sequences where I-T followed O");
    }
    Ok(())
}
