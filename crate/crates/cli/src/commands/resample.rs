//! `hsd resample` — rebalance a binary-labeled corpus.

use std::io::Write;
use std::path::PathBuf;

use clap::Args;
use hsd_core::corpus::write_jsonl_record;
use hsd_core::weaklabel::{resample, RatioCondition};

use crate::{usage, CliResult, Ctx};

#[derive(Debug, Args)]
pub struct ResampleArgs {
    /// Labeled corpus (CSV or JSONL).
    #[arg(long)]
    input: PathBuf,

    /// Output JSONL.
    #[arg(long)]
    output: PathBuf,

    /// full, balanced, or hate_only.
    #[arg(long)]
    condition: Option<String>,

    /// Sampling seed; required so runs are reproducible.
    #[arg(long)]
    seed: Option<u64>,

    /// Input schema; defaults to pretrain.
    #[arg(long)]
    schema: Option<String>,
}

pub fn run(ctx: &Ctx, args: ResampleArgs) -> CliResult {
    let condition: RatioCondition = args
        .condition
        .or_else(|| ctx.config.resample.condition.clone())
        .ok_or_else(|| usage("resample needs --condition"))?
        .parse()
        .map_err(usage)?;
    let seed = args
        .seed
        .or(ctx.config.resample.seed)
        .ok_or_else(|| usage("resample needs --seed"))?;

    let schema = super::resolve_schema(args.schema.as_deref(), None, &args.input)?;
    let strict = ctx.strict;
    let mut out = std::io::BufWriter::new(
        std::fs::File::create(&args.output)
            .map_err(|e| anyhow::anyhow!("cannot create {}: {e}", args.output.display()))?,
    );

    let stats = resample(
        || {
            Ok(hsd_core::corpus::read_dataset_with(
                &args.input,
                &schema,
                strict,
            )?)
        },
        condition,
        seed,
        |record| {
            write_jsonl_record(&mut out, record)?;
            Ok(())
        },
    )
    .map_err(anyhow::Error::from)?;
    out.flush().map_err(anyhow::Error::from)?;

    if !ctx.quiet {
        eprintln!(
            "resample: read {}, wrote {} ({} hate + {} clean)",
            stats.read, stats.written, stats.hate, stats.clean
        );
    }
    Ok(())
}
