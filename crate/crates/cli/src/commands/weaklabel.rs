//! `hsd weaklabel` — annotate a corpus with a binary hate classifier.
//!
//! The classifier comes from one of: `--model` (a saved baseline),
//! `--train` (train a fresh baseline on a labeled set, collapsing 3-class
//! hate-speech labels to binary when needed), or `--remote` / the
//! `HSD_ANNOTATOR_URL` environment variable (a served model speaking the
//! POST /classify protocol).

use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::Duration;

use clap::Args;
use hsd_core::task::{collapse_to_binary, Alphabet};
use hsd_core::weaklabel::{
    run_labeling, train_baseline, Annotator, BaselineConfig, BaselineModel, RemoteAnnotator,
    RemoteConfig,
};

use crate::{usage, CliResult, Ctx};

#[derive(Debug, Args)]
pub struct WeaklabelArgs {
    /// Corpus to annotate (CSV or JSONL).
    #[arg(long)]
    input: PathBuf,

    /// Labeled output JSONL.
    #[arg(long)]
    output: PathBuf,

    /// Input schema; defaults to pretrain.
    #[arg(long)]
    schema: Option<String>,

    /// Train the baseline on this labeled dataset.
    #[arg(long)]
    train: Option<PathBuf>,

    /// Schema of the training set; defaults to vihsd (labels collapse to
    /// binary automatically).
    #[arg(long)]
    train_schema: Option<String>,

    /// Load a previously saved baseline model.
    #[arg(long)]
    model: Option<PathBuf>,

    /// Save the trained model here.
    #[arg(long)]
    save_model: Option<PathBuf>,

    /// Remote annotator endpoint URL.
    #[arg(long)]
    remote: Option<String>,

    /// Records per annotator batch.
    #[arg(long)]
    batch_size: Option<usize>,

    /// Checkpoint file for resumable runs.
    #[arg(long)]
    checkpoint: Option<PathBuf>,

    /// Remote request timeout in seconds.
    #[arg(long)]
    timeout_secs: Option<u64>,
}

pub fn run(ctx: &Ctx, args: WeaklabelArgs) -> CliResult {
    let batch_size = args
        .batch_size
        .or(ctx.config.weaklabel.batch_size)
        .unwrap_or(512);

    let annotator: Box<dyn Annotator> = build_annotator(ctx, &args)?;

    let schema = super::resolve_schema(args.schema.as_deref(), None, &args.input)?;
    let strict = ctx.strict;
    let progress = AtomicU64::new(0);
    let every = ctx.progress_every;
    let quiet = ctx.quiet;

    let stats = run_labeling(
        || {
            let reader = hsd_core::corpus::read_dataset_with(&args.input, &schema, strict)?;
            let progress = &progress;
            Ok(reader.inspect(move |_| {
                let n = progress.fetch_add(1, Ordering::Relaxed) + 1;
                if !quiet && n % every == 0 {
                    eprintln!("weaklabel: read {n} records");
                }
            }))
        },
        annotator.as_ref(),
        batch_size,
        &args.output,
        args.checkpoint.as_deref(),
    )
    .map_err(anyhow::Error::from)?;

    if !ctx.quiet {
        eprintln!(
            "weaklabel: {} records labeled in {} batches by {}",
            stats.labeled,
            stats.batches,
            annotator.id()
        );
    }
    Ok(())
}

fn build_annotator(ctx: &Ctx, args: &WeaklabelArgs) -> CliResult<Box<dyn Annotator>> {
    let sources = [
        args.model.is_some(),
        args.train.is_some(),
        args.remote.is_some(),
    ];
    if sources.iter().filter(|&&s| s).count() > 1 {
        return Err(usage("pick one of --model, --train, or --remote"));
    }

    if let Some(path) = &args.model {
        let model = BaselineModel::load(path).map_err(anyhow::Error::from)?;
        return Ok(Box::new(model));
    }

    if let Some(path) = &args.train {
        let schema_name = args.train_schema.as_deref().unwrap_or("vihsd");
        let schema = super::resolve_schema(Some(schema_name), None, path)?;
        let alphabet = schema
            .alphabet
            .ok_or_else(|| usage(format!("schema {schema_name} has no labels to train on")))?;
        let mut examples = Vec::new();
        for record in super::open_dataset(path, &schema, ctx.strict)? {
            let record = record.map_err(anyhow::Error::from)?;
            let label = record
                .class_label(alphabet)
                .map_err(anyhow::Error::from)?;
            let binary = match alphabet {
                Alphabet::Binary => label,
                Alphabet::HateSpeech => collapse_to_binary(label).map_err(anyhow::Error::from)?,
                Alphabet::ToxicSpeech => {
                    return Err(usage(
                        "toxic-speech labels do not train the hate classifier; use a vihsd or vihsd_binary set",
                    ))
                }
            };
            examples.push((record.text, binary));
        }
        let model =
            train_baseline(&examples, BaselineConfig::default()).map_err(anyhow::Error::from)?;
        if !ctx.quiet {
            eprintln!(
                "weaklabel: trained on {} examples ({} n-grams)",
                examples.len(),
                model.vocab_size()
            );
        }
        if let Some(save) = &args.save_model {
            model.save(save).map_err(anyhow::Error::from)?;
        }
        return Ok(Box::new(model));
    }

    let endpoint = args
        .remote
        .clone()
        .or_else(|| ctx.config.weaklabel.remote_endpoint.clone())
        .or_else(|| std::env::var(hsd_core::weaklabel::ENDPOINT_ENV).ok())
        .filter(|e| !e.is_empty());
    match endpoint {
        Some(endpoint) => {
            let timeout = args
                .timeout_secs
                .or(ctx.config.weaklabel.timeout_secs)
                .unwrap_or(30);
            Ok(Box::new(RemoteAnnotator::new(RemoteConfig {
                endpoint,
                timeout: Duration::from_secs(timeout),
                ..RemoteConfig::default()
            })))
        }
        None => Err(usage(
            "no annotator: pass --train, --model, or --remote (or set HSD_ANNOTATOR_URL)",
        )),
    }
}
