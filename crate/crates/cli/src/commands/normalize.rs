//! `hsd normalize` — raw comments in, clean records out.

use std::io::{BufRead, BufReader};
use std::path::PathBuf;

use clap::Args;
use hsd_core::corpus::{write_jsonl_record, LabeledRecord};
use hsd_core::normalize::{is_effectively_empty, normalize, NormalizeConfig, RawComment};

use crate::progress::Progress;
use crate::{CliResult, Ctx};

#[derive(Debug, Args)]
pub struct NormalizeArgs {
    /// JSONL of raw comments: {"id", "body", "quoted_block"?, "topic"?}.
    #[arg(long)]
    input: PathBuf,

    /// Output records JSONL; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,

    /// Keep records whose text is empty after cleaning.
    #[arg(long)]
    keep_empty: bool,

    /// Leave URLs in place.
    #[arg(long)]
    no_url_removal: bool,

    /// Leave @mentions in place.
    #[arg(long)]
    no_username_removal: bool,

    /// Keep the quoted block in front of the body.
    #[arg(long)]
    no_quote_removal: bool,
}

pub fn run(ctx: &Ctx, args: NormalizeArgs) -> CliResult {
    let section = &ctx.config.normalize;
    let config = NormalizeConfig {
        url_removal: !args.no_url_removal && section.url_removal.unwrap_or(true),
        username_removal: !args.no_username_removal && section.username_removal.unwrap_or(true),
        quote_removal: !args.no_quote_removal && section.quote_removal.unwrap_or(true),
    };
    let keep_empty = args.keep_empty || section.keep_empty.unwrap_or(false);

    let reader = BufReader::new(
        std::fs::File::open(&args.input)
            .map_err(|e| anyhow::anyhow!("{}: {e}", args.input.display()))?,
    );
    let mut out = super::out_writer(args.output.as_deref())?;
    let mut progress = Progress::new(ctx.progress_every, ctx.quiet, "normalized");
    let mut skipped = 0u64;
    let mut dropped_empty = 0u64;

    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let raw: RawComment = match serde_json::from_str(&line) {
            Ok(raw) => raw,
            Err(e) => {
                if ctx.strict {
                    return Err(anyhow::anyhow!("line {}: {e}", lineno + 1).into());
                }
                skipped += 1;
                continue;
            }
        };
        let clean = normalize(&raw, &config);
        if !keep_empty && is_effectively_empty(&clean) {
            dropped_empty += 1;
            continue;
        }
        let mut record = LabeledRecord::new(raw.id, clean);
        record.topic = raw.topic;
        write_jsonl_record(&mut out, &record)?;
        progress.tick();
    }
    out.flush().map_err(anyhow::Error::from)?;

    progress.finish();
    super::report_skipped(ctx.quiet, "normalize", skipped);
    if dropped_empty > 0 && !ctx.quiet {
        eprintln!("normalize: dropped {dropped_empty} records empty after cleaning");
    }
    Ok(())
}
