//! Streaming corpus annotation.
//!
//! [`label_stream`] is the pure form: an iterator adapter that batches
//! records through an annotator and re-emits them in input order with
//! label, score, and annotator id attached. Memory is bounded by the
//! batch size regardless of corpus length.
//!
//! [`run_labeling`] is the file-backed form used for long runs: it writes
//! JSONL output and commits a checkpoint after every batch, so an
//! interrupted run resumes where it left off and produces byte-identical
//! output to an uninterrupted one.

use std::collections::VecDeque;
use std::fs::OpenOptions;
use std::io::{BufWriter, Seek, SeekFrom, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Annotator, WeakLabelError};
use crate::corpus::{write_jsonl_record, CorpusError, LabeledRecord};
use crate::normalize::CleanText;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelStats {
    pub labeled: u64,
    pub batches: u64,
}

/// Batch-commit checkpoint: how many input records are durably labeled
/// and how many output bytes they occupy.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub committed_records: u64,
    pub output_bytes: u64,
}

impl Checkpoint {
    pub fn load(path: &Path) -> Result<Option<Checkpoint>, WeakLabelError> {
        if !path.exists() {
            return Ok(None);
        }
        let data = std::fs::read_to_string(path)?;
        let ckpt = serde_json::from_str(&data)
            .map_err(|e| WeakLabelError::Io(std::io::Error::other(e)))?;
        Ok(Some(ckpt))
    }

    pub fn save(&self, path: &Path) -> Result<(), WeakLabelError> {
        // write-then-rename so a crash never leaves a torn checkpoint
        let tmp = path.with_extension("tmp");
        std::fs::write(&tmp, serde_json::to_string(self).expect("checkpoint serializes"))?;
        std::fs::rename(&tmp, path)?;
        Ok(())
    }
}

/// Labels a record stream, preserving order and propagating errors.
/// Every emitted record gains `label`, `score`, and `annotator`.
pub fn label_stream<'a, I>(
    input: I,
    annotator: &'a dyn Annotator,
    batch_size: usize,
) -> impl Iterator<Item = Result<LabeledRecord, WeakLabelError>> + 'a
where
    I: Iterator<Item = Result<LabeledRecord, CorpusError>> + 'a,
{
    StreamLabeler {
        input: Some(input),
        annotator,
        batch_size: batch_size.max(1),
        ready: VecDeque::new(),
    }
}

struct StreamLabeler<'a, I> {
    input: Option<I>,
    annotator: &'a dyn Annotator,
    batch_size: usize,
    ready: VecDeque<LabeledRecord>,
}

impl<I> StreamLabeler<'_, I>
where
    I: Iterator<Item = Result<LabeledRecord, CorpusError>>,
{
    fn fill(&mut self) -> Result<(), WeakLabelError> {
        let input = match self.input.as_mut() {
            Some(i) => i,
            None => return Ok(()),
        };
        let mut batch = Vec::with_capacity(self.batch_size);
        while batch.len() < self.batch_size {
            match input.next() {
                Some(Ok(record)) => batch.push(record),
                Some(Err(e)) => {
                    self.input = None;
                    return Err(e.into());
                }
                None => {
                    self.input = None;
                    break;
                }
            }
        }
        if !batch.is_empty() {
            annotate_batch(&mut batch, self.annotator)?;
            self.ready.extend(batch);
        }
        Ok(())
    }
}

impl<I> Iterator for StreamLabeler<'_, I>
where
    I: Iterator<Item = Result<LabeledRecord, CorpusError>>,
{
    type Item = Result<LabeledRecord, WeakLabelError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.ready.is_empty() {
            if let Err(e) = self.fill() {
                return Some(Err(e));
            }
        }
        self.ready.pop_front().map(Ok)
    }
}

fn annotate_batch(batch: &mut [LabeledRecord], annotator: &dyn Annotator) -> Result<(), WeakLabelError> {
    let texts: Vec<CleanText> = batch.iter().map(|r| r.text.clone()).collect();
    let results = annotator.classify_batch(&texts)?;
    debug_assert_eq!(results.len(), batch.len());
    for (record, (label, score)) in batch.iter_mut().zip(results) {
        record.label = Some(label.name().to_string());
        record.score = Some(score);
        record.annotator = Some(annotator.id().to_string());
    }
    Ok(())
}

/// Labels a corpus to a JSONL file with per-batch checkpoint commits.
///
/// `make_input` must return the same stream on every call; on resume the
/// already-committed prefix is skipped and the output file is truncated
/// to the committed byte count before appending. Errors out of the
/// annotator leave the checkpoint at the last committed batch.
pub fn run_labeling<I, F>(
    make_input: F,
    annotator: &dyn Annotator,
    batch_size: usize,
    out_path: &Path,
    checkpoint_path: Option<&Path>,
) -> Result<LabelStats, WeakLabelError>
where
    F: Fn() -> Result<I, WeakLabelError>,
    I: Iterator<Item = Result<LabeledRecord, CorpusError>>,
{
    let batch_size = batch_size.max(1);
    let mut ckpt = match checkpoint_path {
        Some(path) => Checkpoint::load(path)?.unwrap_or_default(),
        None => Checkpoint::default(),
    };

    let mut file = OpenOptions::new()
        .create(true)
        .write(true)
        .truncate(false)
        .open(out_path)?;
    let existing = file.metadata()?.len();
    if existing < ckpt.output_bytes {
        return Err(WeakLabelError::CheckpointMismatch {
            committed: ckpt.committed_records,
            expected: ckpt.output_bytes,
            actual: existing,
        });
    }
    // drop any bytes past the last committed batch
    file.set_len(ckpt.output_bytes)?;
    file.seek(SeekFrom::Start(ckpt.output_bytes))?;
    let mut writer = BufWriter::with_capacity(1 << 18, file);

    let mut input = make_input()?;
    for _ in 0..ckpt.committed_records {
        match input.next() {
            Some(Ok(_)) => {}
            Some(Err(e)) => return Err(e.into()),
            None => {
                return Err(WeakLabelError::CheckpointMismatch {
                    committed: ckpt.committed_records,
                    expected: ckpt.output_bytes,
                    actual: existing,
                })
            }
        }
    }

    let mut stats = LabelStats {
        labeled: ckpt.committed_records,
        batches: 0,
    };
    let mut batch: Vec<LabeledRecord> = Vec::with_capacity(batch_size);
    loop {
        batch.clear();
        while batch.len() < batch_size {
            match input.next() {
                Some(Ok(record)) => batch.push(record),
                Some(Err(e)) => return Err(e.into()),
                None => break,
            }
        }
        if batch.is_empty() {
            break;
        }
        annotate_batch(&mut batch, annotator)?;
        let mut written = 0u64;
        for record in &batch {
            written += write_jsonl_record(&mut writer, record)?;
        }
        writer.flush()?;
        ckpt.committed_records += batch.len() as u64;
        ckpt.output_bytes += written;
        if let Some(path) = checkpoint_path {
            ckpt.save(path)?;
        }
        stats.labeled = ckpt.committed_records;
        stats.batches += 1;
    }
    writer.flush()?;
    Ok(stats)
}
