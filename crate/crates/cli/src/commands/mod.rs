//! Subcommand implementations and shared plumbing.

pub mod decode;
pub mod encode;
pub mod eval;
pub mod iob;
pub mod normalize;
pub mod resample;
pub mod stats;
pub mod weaklabel;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use hsd_core::corpus::{DatasetSchema, FileFormat, RecordReader};
use hsd_core::task::Task;

use crate::{usage, CliResult};

/// Resolves a schema from an explicit name or a task default, then aligns
/// the file format with the path extension.
pub fn resolve_schema(
    name: Option<&str>,
    task: Option<Task>,
    path: &Path,
) -> CliResult<DatasetSchema> {
    let schema_name = match name {
        Some(n) => n.to_string(),
        None => match task {
            Some(t) => t.alias().to_string(),
            None => "pretrain".to_string(),
        },
    };
    let schema = DatasetSchema::builtin(&schema_name).ok_or_else(|| {
        usage(format!(
            "unknown schema {schema_name:?} (expected vihsd, vihsd_binary, victsd, vihos, or pretrain)"
        ))
    })?;
    let format = format_for(path, schema.format);
    Ok(schema.with_format(format))
}

fn format_for(path: &Path, declared: FileFormat) -> FileFormat {
    match path.extension().and_then(|e| e.to_str()) {
        Some("csv") => FileFormat::Csv,
        Some("jsonl") | Some("json") | Some("ndjson") => FileFormat::Jsonl,
        _ => declared,
    }
}

/// Opens a dataset honoring the global strict flag.
pub fn open_dataset(
    path: &Path,
    schema: &DatasetSchema,
    strict: bool,
) -> CliResult<RecordReader> {
    hsd_core::corpus::read_dataset_with(path, schema, strict)
        .map_err(|e| anyhow::anyhow!("{}: {e}", path.display()).into())
}

/// File writer, or stdout when no path is given.
pub fn out_writer(path: Option<&Path>) -> CliResult<Box<dyn Write>> {
    match path {
        Some(p) => {
            let file = File::create(p)
                .map_err(|e| anyhow::anyhow!("cannot create {}: {e}", p.display()))?;
            Ok(Box::new(BufWriter::new(file)))
        }
        None => Ok(Box::new(BufWriter::new(std::io::stdout()))),
    }
}

/// Reports skipped-row totals on stderr after a tolerant read.
pub fn report_skipped(quiet: bool, what: &str, skipped: u64) {
    if skipped > 0 && !quiet {
        eprintln!("{what}: skipped {skipped} malformed rows (use --strict to fail instead)");
    }
}

pub fn parse_task(raw: &str) -> CliResult<Task> {
    raw.parse::<Task>().map_err(usage)
}
