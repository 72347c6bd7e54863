//! `hsd stats` — label/topic counts from records, or totals from a
//! topic manifest.

use std::path::PathBuf;

use clap::Args;
use hsd_core::weaklabel::{corpus_stats, manifest_stats, TopicManifest};

use crate::{usage, CliResult, Ctx};

#[derive(Debug, Args)]
pub struct StatsArgs {
    /// Labeled corpus (CSV or JSONL).
    #[arg(long)]
    input: Option<PathBuf>,

    /// Topic manifest JSON: {"topics": [{"topic", "threads", "comments"}]}.
    #[arg(long)]
    manifest: Option<PathBuf>,

    /// Input schema; defaults to pretrain.
    #[arg(long)]
    schema: Option<String>,
}

pub fn run(ctx: &Ctx, args: StatsArgs) -> CliResult {
    let report = match (&args.input, &args.manifest) {
        (Some(input), None) => {
            let schema = super::resolve_schema(args.schema.as_deref(), None, input)?;
            let mut reader = super::open_dataset(input, &schema, ctx.strict)?;
            let report = corpus_stats(reader.by_ref()).map_err(anyhow::Error::from)?;
            super::report_skipped(ctx.quiet, "stats", reader.summary().skipped);
            report
        }
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| anyhow::anyhow!("cannot read {}: {e}", path.display()))?;
            let manifest: TopicManifest = serde_json::from_str(&text)
                .map_err(|e| anyhow::anyhow!("bad manifest {}: {e}", path.display()))?;
            manifest_stats(&manifest)
        }
        _ => return Err(usage("stats needs exactly one of --input or --manifest")),
    };
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}
