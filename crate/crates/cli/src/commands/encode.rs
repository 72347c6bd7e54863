//! `hsd encode` — records in, prefix-task source/target pairs out.

use std::path::PathBuf;

use clap::Args;
use hsd_core::corpus::make_t5_pair;
use hsd_core::task::PrefixVariant;

use crate::progress::Progress;
use crate::{usage, CliResult, Ctx};

#[derive(Debug, Args)]
pub struct EncodeArgs {
    /// Task: vihsd, victsd, or vihos.
    #[arg(long)]
    task: String,

    /// Input dataset (CSV or JSONL).
    #[arg(long)]
    input: PathBuf,

    /// Output pairs; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,

    /// Input schema; defaults to the task's dataset.
    #[arg(long)]
    schema: Option<String>,

    /// Pair encoding: tsv (source TAB target) or jsonl.
    #[arg(long)]
    pair_format: Option<String>,

    /// Reproduce the misspelled toxic prefix found in released data.
    #[arg(long)]
    legacy_toxic_prefix: bool,
}

pub fn run(ctx: &Ctx, args: EncodeArgs) -> CliResult {
    let task = super::parse_task(&args.task)?;
    let schema = super::resolve_schema(args.schema.as_deref(), Some(task), &args.input)?;
    let variant = if args.legacy_toxic_prefix
        || ctx.config.encode.legacy_toxic_prefix.unwrap_or(false)
    {
        PrefixVariant::Legacy
    } else {
        PrefixVariant::Canonical
    };
    let pair_format = args
        .pair_format
        .or_else(|| ctx.config.encode.pair_format.clone())
        .unwrap_or_else(|| "tsv".to_string());
    let as_tsv = match pair_format.as_str() {
        "tsv" => true,
        "jsonl" => false,
        other => return Err(usage(format!("unknown pair format {other:?}"))),
    };

    let mut reader = super::open_dataset(&args.input, &schema, ctx.strict)?;
    let mut out = super::out_writer(args.output.as_deref())?;
    let mut progress = Progress::new(ctx.progress_every, ctx.quiet, "encoded");
    let mut skipped = 0u64;

    for record in reader.by_ref() {
        let record = record.map_err(anyhow::Error::from)?;
        let pair = match make_t5_pair(&record, task, schema.alphabet, variant) {
            Ok(pair) => pair,
            Err(e) => {
                if ctx.strict {
                    return Err(anyhow::anyhow!("record {}: {e}", record.id).into());
                }
                skipped += 1;
                continue;
            }
        };
        if as_tsv {
            hsd_core::corpus::write_pairs_tsv(std::iter::once(Ok(pair)), &mut out)
                .map_err(anyhow::Error::from)?;
        } else {
            hsd_core::corpus::write_pairs_jsonl(std::iter::once(Ok(pair)), &mut out)
                .map_err(anyhow::Error::from)?;
        }
        progress.tick();
    }
    out.flush().map_err(anyhow::Error::from)?;

    progress.finish();
    super::report_skipped(ctx.quiet, "encode", skipped + reader.summary().skipped);
    Ok(())
}
