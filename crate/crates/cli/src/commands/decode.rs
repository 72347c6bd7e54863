//! `hsd decode` — raw model outputs in, structured predictions out.

use std::io::{BufRead, BufReader};
use std::path::PathBuf;

use clap::Args;
use hsd_core::corpus::{ModelOutputRecord, PredictionRecord};
use hsd_core::task::{decode_prediction, ParseStatus};

use crate::progress::Progress;
use crate::{CliResult, Ctx};

#[derive(Debug, Args)]
pub struct DecodeArgs {
    /// Task: vihsd, victsd, or vihos.
    #[arg(long)]
    task: String,

    /// JSONL of model outputs: {"id", "text", "output"}.
    #[arg(long)]
    input: PathBuf,

    /// Output predictions JSONL; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
}

pub fn run(ctx: &Ctx, args: DecodeArgs) -> CliResult {
    let task = super::parse_task(&args.task)?;
    let reader = BufReader::new(
        std::fs::File::open(&args.input)
            .map_err(|e| anyhow::anyhow!("{}: {e}", args.input.display()))?,
    );
    let mut out = super::out_writer(args.output.as_deref())?;
    let mut progress = Progress::new(ctx.progress_every, ctx.quiet, "decoded");
    let mut skipped = 0u64;
    let mut repaired = 0u64;
    let mut fallback = 0u64;

    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: ModelOutputRecord = match serde_json::from_str(&line) {
            Ok(r) => r,
            Err(e) => {
                if ctx.strict {
                    return Err(anyhow::anyhow!("line {}: {e}", lineno + 1).into());
                }
                skipped += 1;
                continue;
            }
        };
        let prediction = decode_prediction(task, &record.output, &record.text);
        match prediction.parse_status {
            ParseStatus::Repaired => repaired += 1,
            ParseStatus::Fallback => fallback += 1,
            ParseStatus::Exact => {}
        }
        let out_record = PredictionRecord {
            id: record.id,
            text: record.text,
            label: prediction.label.map(|l| l.name().to_string()),
            spans: prediction.spans,
            parse_status: prediction.parse_status,
        };
        serde_json::to_writer(&mut out, &out_record).map_err(anyhow::Error::from)?;
        out.write_all(b"\n").map_err(anyhow::Error::from)?;
        progress.tick();
    }
    out.flush().map_err(anyhow::Error::from)?;

    progress.finish();
    super::report_skipped(ctx.quiet, "decode", skipped);
    if !ctx.quiet && (repaired > 0 || fallback > 0) {
        eprintln!("decode: {repaired} outputs repaired, {fallback} fell back to the neutral value");
    }
    Ok(())
}
