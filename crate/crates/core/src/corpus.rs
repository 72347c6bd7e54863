//! Dataset schemas and streaming readers/writers.
//!
//! CSV is an ingestion-boundary format only; JSONL is the canonical
//! on-disk form. Readers stream row by row and never hold a corpus in
//! memory. Source column names are configurable per schema because
//! benchmark releases disagree on headers; the defaults are the logical
//! field names themselves.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::normalize::CleanText;
use crate::span::{SpanError, SpanSet};
use crate::task::{encode_source_with, encode_target, Alphabet, Gold, PrefixVariant, Task, TaskError};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{path}: missing column {column:?} required by schema {schema}")]
    SchemaMismatch {
        path: PathBuf,
        column: String,
        schema: String,
    },
    #[error("line {line}: {reason}")]
    Row { line: u64, reason: String },
    #[error("record {id}: missing {field}")]
    MissingField { id: String, field: &'static str },
    #[error(transparent)]
    Task(#[from] TaskError),
    #[error(transparent)]
    Span(#[from] SpanError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Which split a record belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Dev,
    Test,
    #[default]
    Unsplit,
}

impl Split {
    pub fn is_unsplit(&self) -> bool {
        matches!(self, Split::Unsplit)
    }
}

impl std::str::FromStr for Split {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "train" => Ok(Split::Train),
            "dev" | "valid" | "validation" => Ok(Split::Dev),
            "test" => Ok(Split::Test),
            "" | "unsplit" => Ok(Split::Unsplit),
            other => Err(format!("unknown split {other:?}")),
        }
    }
}

/// One corpus record in the canonical shape. Optional fields serialize
/// only when present; field order is fixed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledRecord {
    pub id: String,
    pub text: CleanText,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spans: Option<SpanSet>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub score: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub topic: Option<String>,
    #[serde(default, skip_serializing_if = "Split::is_unsplit")]
    pub split: Split,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub annotator: Option<String>,
}

impl LabeledRecord {
    pub fn new(id: impl Into<String>, text: impl Into<CleanText>) -> Self {
        LabeledRecord {
            id: id.into(),
            text: text.into(),
            label: None,
            spans: None,
            score: None,
            topic: None,
            split: Split::Unsplit,
            annotator: None,
        }
    }

    /// Parses the stored label name in the given alphabet.
    pub fn class_label(&self, alphabet: Alphabet) -> Result<crate::task::ClassLabel, CorpusError> {
        let name = self.label.as_deref().ok_or(CorpusError::MissingField {
            id: self.id.clone(),
            field: "label",
        })?;
        Ok(alphabet.parse(name)?)
    }
}

/// Raw model output paired with the original text, the input shape for
/// prediction decoding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelOutputRecord {
    pub id: String,
    pub text: CleanText,
    pub output: String,
}

/// A decoded prediction in serializable form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub id: String,
    pub text: CleanText,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spans: Option<SpanSet>,
    pub parse_status: crate::task::ParseStatus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FileFormat {
    Csv,
    Jsonl,
}

/// Maps logical record fields to source column names.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct ColumnMap {
    pub id: String,
    pub text: String,
    pub label: String,
    pub spans: String,
    pub score: String,
    pub topic: String,
    pub split: String,
}

impl Default for ColumnMap {
    fn default() -> Self {
        ColumnMap {
            id: "id".into(),
            text: "text".into(),
            label: "label".into(),
            spans: "spans".into(),
            score: "score".into(),
            topic: "topic".into(),
            split: "split".into(),
        }
    }
}

/// Declares how to read one dataset: file format, column names, label
/// alphabet, and whether records carry spans.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetSchema {
    pub name: String,
    pub format: FileFormat,
    /// Label alphabet for classification datasets; `None` for span data.
    pub alphabet: Option<Alphabet>,
    /// Whether records carry a span annotation column.
    pub has_spans: bool,
    /// Whether a label is mandatory on every record.
    pub label_required: bool,
    #[serde(default)]
    pub columns: ColumnMap,
}

impl DatasetSchema {
    /// The built-in schemas: `vihsd`, `vihsd_binary`, `victsd`, `vihos`,
    /// and `pretrain`.
    pub fn builtin(name: &str) -> Option<DatasetSchema> {
        let (alphabet, has_spans, label_required, format) = match name {
            "vihsd" => (Some(Alphabet::HateSpeech), false, true, FileFormat::Csv),
            "vihsd_binary" => (Some(Alphabet::Binary), false, true, FileFormat::Csv),
            "victsd" => (Some(Alphabet::ToxicSpeech), false, true, FileFormat::Csv),
            "vihos" => (None, true, false, FileFormat::Csv),
            "pretrain" => (Some(Alphabet::Binary), false, false, FileFormat::Jsonl),
            _ => return None,
        };
        Some(DatasetSchema {
            name: name.to_string(),
            format,
            alphabet,
            has_spans,
            label_required,
            columns: ColumnMap::default(),
        })
    }

    pub fn with_format(mut self, format: FileFormat) -> Self {
        self.format = format;
        self
    }

    /// Canonicalizes a raw label cell: numeric ids and label names both
    /// map to the label name.
    fn parse_label(&self, raw: &str) -> Result<Option<String>, String> {
        let raw = raw.trim();
        if raw.is_empty() {
            return Ok(None);
        }
        let alphabet = match self.alphabet {
            Some(a) => a,
            None => return Ok(None),
        };
        if let Ok(id) = raw.parse::<u8>() {
            return alphabet
                .from_id(id)
                .map(|l| Some(l.name().to_string()))
                .map_err(|e| e.to_string());
        }
        alphabet
            .parse(raw)
            .map(|l| Some(l.name().to_string()))
            .map_err(|e| e.to_string())
    }
}

/// Parses a span cell: either a flat index list `[0,1,2]` or a pair list
/// `[[0,2]]`, canonicalized either way.
pub fn parse_span_cell(raw: &str) -> Result<SpanSet, String> {
    let raw = raw.trim();
    if raw.is_empty() || raw == "[]" {
        return Ok(SpanSet::empty());
    }
    let value: serde_json::Value =
        serde_json::from_str(raw).map_err(|e| format!("bad span list: {e}"))?;
    let items = value.as_array().ok_or("span cell is not a list")?;
    if items.iter().all(serde_json::Value::is_u64) {
        let indices: Vec<usize> = items
            .iter()
            .map(|v| v.as_u64().expect("checked") as usize)
            .collect();
        return Ok(SpanSet::from_indices(indices));
    }
    let mut pairs = Vec::with_capacity(items.len());
    for item in items {
        let pair = item
            .as_array()
            .filter(|p| p.len() == 2 && p.iter().all(serde_json::Value::is_u64))
            .ok_or("span cell mixes indices and pairs")?;
        pairs.push((
            pair[0].as_u64().expect("checked") as usize,
            pair[1].as_u64().expect("checked") as usize,
        ));
    }
    SpanSet::try_from_pairs(pairs).map_err(|e| e.to_string())
}

/// Split totals and row bookkeeping from one read pass.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReadSummary {
    pub records: u64,
    pub skipped: u64,
    pub train: u64,
    pub dev: u64,
    pub test: u64,
    pub unsplit: u64,
}

impl ReadSummary {
    fn count(&mut self, split: Split) {
        self.records += 1;
        match split {
            Split::Train => self.train += 1,
            Split::Dev => self.dev += 1,
            Split::Test => self.test += 1,
            Split::Unsplit => self.unsplit += 1,
        }
    }
}

enum RowSource {
    Csv {
        rows: csv::StringRecordsIntoIter<File>,
        header: csv::StringRecord,
    },
    Jsonl {
        lines: std::io::Lines<BufReader<File>>,
    },
}

/// Streaming dataset reader. Malformed rows are counted and skipped by
/// default; in strict mode the first bad row ends the stream with an
/// error.
pub struct RecordReader {
    source: RowSource,
    schema: DatasetSchema,
    strict: bool,
    line: u64,
    summary: ReadSummary,
    done: bool,
}

/// Opens a dataset for streaming reads.
pub fn read_dataset(path: &Path, schema: &DatasetSchema) -> Result<RecordReader, CorpusError> {
    read_dataset_with(path, schema, false)
}

pub fn read_dataset_with(
    path: &Path,
    schema: &DatasetSchema,
    strict: bool,
) -> Result<RecordReader, CorpusError> {
    let file = File::open(path)?;
    let source = match schema.format {
        FileFormat::Csv => {
            let mut reader = csv::ReaderBuilder::new().flexible(true).from_reader(file);
            let header = reader
                .headers()
                .map_err(|e| CorpusError::Row {
                    line: 1,
                    reason: e.to_string(),
                })?
                .clone();
            let find = |name: &str| header.iter().position(|h| h == name);
            // text is always required; label/spans when the schema says so
            if find(&schema.columns.text).is_none() {
                return Err(CorpusError::SchemaMismatch {
                    path: path.to_path_buf(),
                    column: schema.columns.text.clone(),
                    schema: schema.name.clone(),
                });
            }
            if schema.label_required && find(&schema.columns.label).is_none() {
                return Err(CorpusError::SchemaMismatch {
                    path: path.to_path_buf(),
                    column: schema.columns.label.clone(),
                    schema: schema.name.clone(),
                });
            }
            if schema.has_spans && find(&schema.columns.spans).is_none() {
                return Err(CorpusError::SchemaMismatch {
                    path: path.to_path_buf(),
                    column: schema.columns.spans.clone(),
                    schema: schema.name.clone(),
                });
            }
            RowSource::Csv {
                rows: reader.into_records(),
                header,
            }
        }
        FileFormat::Jsonl => RowSource::Jsonl {
            lines: BufReader::new(file).lines(),
        },
    };
    Ok(RecordReader {
        source,
        schema: schema.clone(),
        strict,
        line: 1,
        summary: ReadSummary::default(),
        done: false,
    })
}

impl RecordReader {
    pub fn summary(&self) -> ReadSummary {
        self.summary
    }

    fn parse_csv_row(
        schema: &DatasetSchema,
        header: &csv::StringRecord,
        row: &csv::StringRecord,
        line: u64,
    ) -> Result<LabeledRecord, String> {
        let get = |name: &str| -> Option<&str> {
            header
                .iter()
                .position(|h| h == name)
                .and_then(|i| row.get(i))
        };
        let text = get(&schema.columns.text).ok_or("row shorter than header")?;
        let id = match get(&schema.columns.id) {
            Some(v) if !v.trim().is_empty() => v.trim().to_string(),
            _ => format!("row-{line}"),
        };
        let mut record = LabeledRecord::new(id, text);
        record.label = match get(&schema.columns.label) {
            Some(raw) => schema.parse_label(raw)?,
            None => None,
        };
        if schema.label_required && record.label.is_none() {
            return Err("missing label".into());
        }
        if schema.has_spans {
            let raw = get(&schema.columns.spans).unwrap_or("");
            let spans = parse_span_cell(raw)?;
            spans
                .validate_for(record.text.char_len())
                .map_err(|e| e.to_string())?;
            record.spans = Some(spans);
        }
        record.topic = get(&schema.columns.topic)
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(String::from);
        record.split = match get(&schema.columns.split) {
            Some(raw) => raw.trim().parse::<Split>()?,
            None => Split::Unsplit,
        };
        if let Some(raw) = get(&schema.columns.score) {
            if !raw.trim().is_empty() {
                record.score = Some(raw.trim().parse::<f64>().map_err(|e| e.to_string())?);
            }
        }
        Ok(record)
    }

    fn parse_jsonl_line(schema: &DatasetSchema, line: &str) -> Result<LabeledRecord, String> {
        let value: serde_json::Value = serde_json::from_str(line).map_err(|e| e.to_string())?;
        let obj = value.as_object().ok_or("line is not a JSON object")?;
        let field = |name: &str| obj.get(name);
        let text = field(&schema.columns.text)
            .and_then(|v| v.as_str())
            .ok_or("missing text field")?;
        let id = match field(&schema.columns.id) {
            Some(serde_json::Value::String(s)) => s.clone(),
            Some(serde_json::Value::Number(n)) => n.to_string(),
            _ => return Err("missing id field".into()),
        };
        let mut record = LabeledRecord::new(id, text);
        record.label = match field(&schema.columns.label) {
            Some(serde_json::Value::String(s)) => schema.parse_label(s)?,
            Some(serde_json::Value::Number(n)) => schema.parse_label(&n.to_string())?,
            Some(serde_json::Value::Null) | None => None,
            Some(other) => return Err(format!("bad label value {other}")),
        };
        if schema.label_required && record.label.is_none() {
            return Err("missing label".into());
        }
        if let Some(v) = field(&schema.columns.spans) {
            if !v.is_null() {
                let spans = parse_span_cell(&v.to_string())?;
                spans
                    .validate_for(record.text.char_len())
                    .map_err(|e| e.to_string())?;
                record.spans = Some(spans);
            }
        } else if schema.has_spans {
            record.spans = Some(SpanSet::empty());
        }
        record.score = field(&schema.columns.score).and_then(|v| v.as_f64());
        record.topic = field(&schema.columns.topic)
            .and_then(|v| v.as_str())
            .map(String::from);
        record.split = match field(&schema.columns.split) {
            Some(serde_json::Value::String(s)) => s.parse::<Split>()?,
            _ => Split::Unsplit,
        };
        record.annotator = field("annotator").and_then(|v| v.as_str()).map(String::from);
        Ok(record)
    }
}

impl Iterator for RecordReader {
    type Item = Result<LabeledRecord, CorpusError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        loop {
            self.line += 1;
            let parsed: Result<Option<LabeledRecord>, String> = match &mut self.source {
                RowSource::Csv { rows, header } => match rows.next() {
                    None => return None,
                    Some(Err(e)) => Err(e.to_string()),
                    Some(Ok(row)) => {
                        Self::parse_csv_row(&self.schema, header, &row, self.line).map(Some)
                    }
                },
                RowSource::Jsonl { lines } => match lines.next() {
                    None => return None,
                    Some(Err(e)) => {
                        self.done = true;
                        return Some(Err(CorpusError::Io(e)));
                    }
                    Some(Ok(line)) if line.trim().is_empty() => Ok(None),
                    Some(Ok(line)) => Self::parse_jsonl_line(&self.schema, &line).map(Some),
                },
            };
            match parsed {
                Ok(Some(record)) => {
                    self.summary.count(record.split);
                    return Some(Ok(record));
                }
                Ok(None) => continue, // blank line
                Err(reason) => {
                    if self.strict {
                        self.done = true;
                        return Some(Err(CorpusError::Row {
                            line: self.line,
                            reason,
                        }));
                    }
                    self.summary.skipped += 1;
                }
            }
        }
    }
}

/// Writes records as canonical JSONL. Returns the number written.
pub fn write_jsonl<'a>(
    records: impl IntoIterator<Item = &'a LabeledRecord>,
    path: &Path,
) -> Result<u64, CorpusError> {
    let mut writer = BufWriter::new(File::create(path)?);
    let mut count = 0u64;
    for record in records {
        write_jsonl_record(&mut writer, record)?;
        count += 1;
    }
    writer.flush()?;
    Ok(count)
}

/// Serializes one record as a JSONL line. Returns bytes written.
pub fn write_jsonl_record(
    writer: &mut impl Write,
    record: &LabeledRecord,
) -> Result<u64, CorpusError> {
    let json = serde_json::to_string(record).map_err(|e| CorpusError::Row {
        line: 0,
        reason: e.to_string(),
    })?;
    writer.write_all(json.as_bytes())?;
    writer.write_all(b"\n")?;
    Ok(json.len() as u64 + 1)
}

/// One source/target pair for text-to-text fine-tuning.
pub type Pair = (String, String);

/// Builds the source/target pair for one record under a task.
pub fn make_t5_pair(
    record: &LabeledRecord,
    task: Task,
    alphabet: Option<Alphabet>,
    variant: PrefixVariant,
) -> Result<Pair, CorpusError> {
    let source = encode_source_with(task, &record.text, variant);
    let target = match task {
        Task::HateSpansDetection => {
            let empty = SpanSet::empty();
            let spans = record.spans.as_ref().unwrap_or(&empty);
            encode_target(task, &Gold::Spans(spans), &record.text)?
        }
        _ => {
            let alphabet = alphabet
                .or_else(|| task.alphabet())
                .expect("classification task has an alphabet");
            let label = record.class_label(alphabet)?;
            encode_target(task, &Gold::Label(label), &record.text)?
        }
    };
    Ok((source, target))
}

/// Maps a record stream onto source/target pairs.
pub fn make_t5_pairs<'a>(
    records: impl Iterator<Item = Result<LabeledRecord, CorpusError>> + 'a,
    task: Task,
    alphabet: Option<Alphabet>,
    variant: PrefixVariant,
) -> impl Iterator<Item = Result<Pair, CorpusError>> + 'a {
    records.map(move |r| r.and_then(|record| make_t5_pair(&record, task, alphabet, variant)))
}

/// Writes pairs as TSV: source, tab, target, newline. No quoting — any
/// stray tab or newline inside a field becomes a space.
pub fn write_pairs_tsv(
    pairs: impl Iterator<Item = Result<Pair, CorpusError>>,
    writer: &mut impl Write,
) -> Result<u64, CorpusError> {
    let mut count = 0u64;
    for pair in pairs {
        let (source, target) = pair?;
        writer.write_all(sanitize_tsv(&source).as_bytes())?;
        writer.write_all(b"\t")?;
        writer.write_all(sanitize_tsv(&target).as_bytes())?;
        writer.write_all(b"\n")?;
        count += 1;
    }
    Ok(count)
}

fn sanitize_tsv(field: &str) -> std::borrow::Cow<'_, str> {
    if field.contains(['\t', '\n', '\r']) {
        std::borrow::Cow::Owned(field.replace(['\t', '\n', '\r'], " "))
    } else {
        std::borrow::Cow::Borrowed(field)
    }
}

/// Writes pairs as JSONL objects `{"source": ..., "target": ...}`.
pub fn write_pairs_jsonl(
    pairs: impl Iterator<Item = Result<Pair, CorpusError>>,
    writer: &mut impl Write,
) -> Result<u64, CorpusError> {
    let mut count = 0u64;
    for pair in pairs {
        let (source, target) = pair?;
        let mut obj = BTreeMap::new();
        obj.insert("source", source);
        obj.insert("target", target);
        let json = serde_json::to_string(&obj).map_err(|e| CorpusError::Row {
            line: count + 1,
            reason: e.to_string(),
        })?;
        writer.write_all(json.as_bytes())?;
        writer.write_all(b"\n")?;
        count += 1;
    }
    Ok(count)
}
