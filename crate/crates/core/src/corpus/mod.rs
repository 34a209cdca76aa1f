//! Ingestion of time-stamped text and covariates into the indexed,
//! period-bucketed corpus consumed by the samplers.

mod porter;
mod bucket;
mod covariates;
mod tokenize;
mod vocab;

use std::collections::HashSet;
use std::path::Path;

use chrono::NaiveDateTime;
use serde::{Deserialize, Serialize};

pub use bucket::{bucketize, parse_timestamp, Bucketing, PeriodScheme};
pub use covariates::{standardize_covariates, CovariateTable};
pub use tokenize::{default_stopwords, tokenize, TokenizeOptions};
pub use vocab::{build_vocabulary, Vocabulary, VocabularyBuild};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct RawDocument {
    pub id: String,
    pub timestamp: NaiveDateTime,
    pub text: String,
}

#[derive(Deserialize)]
struct RawRecord {
    id: String,
    timestamp: String,
    text: String,
}

/// Reads newline-delimited JSON records with `id`, `timestamp` and `text` fields.
pub fn parse_documents(text: &str, path: &Path) -> Result<Vec<RawDocument>> {
    let mut docs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let parse_err = |message: String| Error::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            message,
        };
        let record: RawRecord = serde_json::from_str(line).map_err(|e| parse_err(e.to_string()))?;
        let timestamp = parse_timestamp(&record.timestamp).map_err(|e| parse_err(e.to_string()))?;
        docs.push(RawDocument {
            id: record.id,
            timestamp,
            text: record.text,
        });
    }
    Ok(docs)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub tokens: Vec<u32>,
}

impl Document {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

/// Vocabulary-indexed documents grouped into `T` chronological periods, with
/// one covariate vector per period.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Corpus {
    pub vocabulary: Vocabulary,
    pub period_labels: Vec<String>,
    pub periods: Vec<Vec<Document>>,
    pub covariates: Vec<Vec<f64>>,
    pub coverage: f64,
}

impl Corpus {
    /// Corpus over the synthetic vocabulary `w0..w{V-1}` with periods labelled
    /// `0..T` and documents labelled `d{t}_{i}`.
    pub fn from_tokens(vocab_size: usize, periods: Vec<Vec<Vec<u32>>>, covariates: Vec<Vec<f64>>) -> Self {
        Self {
            vocabulary: Vocabulary::synthetic(vocab_size),
            period_labels: (0..periods.len()).map(|t| t.to_string()).collect(),
            periods: periods
                .into_iter()
                .enumerate()
                .map(|(t, docs)| {
                    docs.into_iter()
                        .enumerate()
                        .map(|(i, tokens)| Document { id: format!("d{t}_{i}"), tokens })
                        .collect()
                })
                .collect(),
            covariates,
            coverage: 1.0,
        }
    }

    pub fn num_periods(&self) -> usize {
        self.periods.len()
    }

    /// Number of covariate columns `p`.
    pub fn num_covariates(&self) -> usize {
        self.covariates.first().map_or(0, Vec::len)
    }

    pub fn vocab_size(&self) -> usize {
        self.vocabulary.len()
    }

    pub fn num_documents(&self) -> usize {
        self.periods.iter().map(Vec::len).sum()
    }

    pub fn num_tokens(&self) -> usize {
        self.documents().map(|(_, d)| d.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.num_documents() == 0
    }

    /// Documents in period-major order together with their period index.
    pub fn documents(&self) -> impl Iterator<Item = (usize, &Document)> + '_ {
        self.periods
            .iter()
            .enumerate()
            .flat_map(|(t, docs)| docs.iter().map(move |d| (t, d)))
    }

    /// Global index of the first document of each period, plus the total.
    pub fn period_offsets(&self) -> Vec<usize> {
        let mut offsets = Vec::with_capacity(self.periods.len() + 1);
        let mut acc = 0;
        offsets.push(0);
        for docs in &self.periods {
            acc += docs.len();
            offsets.push(acc);
        }
        offsets
    }

    pub fn validate(&self) -> Result<()> {
        let t = self.num_periods();
        if self.period_labels.len() != t {
            return Err(Error::input("period label count differs from period count"));
        }
        if self.covariates.len() != t {
            return Err(Error::input(format!(
                "{} covariate rows for {t} periods",
                self.covariates.len()
            )));
        }
        let p = self.num_covariates();
        if self.covariates.iter().any(|r| r.len() != p || r.iter().any(|v| !v.is_finite())) {
            return Err(Error::input("covariate rows must be finite and of equal length"));
        }
        let v = self.vocab_size() as u32;
        if let Some((_, d)) = self.documents().find(|(_, d)| d.tokens.iter().any(|&w| w >= v)) {
            return Err(Error::input(format!("document {} has a token outside the vocabulary", d.id)));
        }
        if !(0.0..=1.0).contains(&self.coverage) {
            return Err(Error::input("coverage must lie in [0, 1]"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct IngestOptions {
    pub tokenize: TokenizeOptions,
    pub vocab_size: usize,
    pub scheme: PeriodScheme,
    pub standardize: bool,
}

impl Default for IngestOptions {
    fn default() -> Self {
        Self {
            tokenize: TokenizeOptions::default(),
            vocab_size: 2000,
            scheme: PeriodScheme::Month,
            standardize: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IngestReport {
    pub documents_read: usize,
    pub documents_retained: usize,
    /// Ids of documents left with no in-vocabulary tokens.
    pub dropped_documents: Vec<String>,
    pub period_labels: Vec<String>,
    pub documents_per_period: Vec<usize>,
    pub empty_periods: Vec<String>,
    pub vocabulary_size: usize,
    pub coverage: f64,
    pub warnings: Vec<String>,
}

pub fn ingest(
    documents: &[RawDocument],
    covariates: &CovariateTable,
    options: &IngestOptions,
) -> Result<(Corpus, IngestReport)> {
    let mut seen = HashSet::new();
    for d in documents {
        if !seen.insert(d.id.as_str()) {
            return Err(Error::input(format!("duplicate document id {}", d.id)));
        }
    }
    let bucketing = bucketize(documents, &options.scheme)?;
    let streams: Vec<Vec<String>> = documents
        .iter()
        .map(|d| tokenize(&d.text, &options.tokenize))
        .collect();
    let built = build_vocabulary(&streams, options.vocab_size)?;
    let vocabulary = built.vocabulary;

    let mut periods: Vec<Vec<Document>> = vec![Vec::new(); bucketing.num_periods()];
    let mut dropped = Vec::new();
    for ((doc, stream), &t) in documents.iter().zip(&streams).zip(&bucketing.assignment) {
        let tokens: Vec<u32> = stream.iter().filter_map(|tok| vocabulary.id(tok)).collect();
        if tokens.is_empty() {
            dropped.push(doc.id.clone());
        } else {
            periods[t].push(Document {
                id: doc.id.clone(),
                tokens,
            });
        }
    }

    let aligned = covariates.align(&bucketing.labels)?;
    let covariates = if options.standardize {
        standardize_covariates(&aligned)?
    } else {
        aligned
    };

    let mut warnings: Vec<String> = built.warning.into_iter().collect();
    let empty_periods: Vec<String> = periods
        .iter()
        .zip(&bucketing.labels)
        .filter(|(docs, _)| docs.is_empty())
        .map(|(_, l)| l.clone())
        .collect();
    for label in &empty_periods {
        warnings.push(format!("period {label} has no retained documents"));
    }
    if !dropped.is_empty() {
        warnings.push(format!(
            "{} documents dropped with no in-vocabulary tokens",
            dropped.len()
        ));
    }

    let corpus = Corpus {
        vocabulary,
        period_labels: bucketing.labels.clone(),
        periods,
        covariates,
        coverage: built.coverage,
    };
    corpus.validate()?;
    let report = IngestReport {
        documents_read: documents.len(),
        documents_retained: corpus.num_documents(),
        dropped_documents: dropped,
        period_labels: bucketing.labels,
        documents_per_period: corpus.periods.iter().map(Vec::len).collect(),
        empty_periods,
        vocabulary_size: corpus.vocab_size(),
        coverage: corpus.coverage,
        warnings,
    };
    Ok((corpus, report))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn raw(id: &str, ts: &str, text: &str) -> RawDocument {
        RawDocument {
            id: id.into(),
            timestamp: parse_timestamp(ts).unwrap(),
            text: text.into(),
        }
    }

    fn table(rows: &[(&str, f64)]) -> CovariateTable {
        CovariateTable {
            columns: vec!["cpi".into()],
            labels: rows.iter().map(|r| r.0.to_string()).collect(),
            rows: rows.iter().map(|r| vec![r.1]).collect(),
        }
    }

    #[test]
    fn ingest_drops_empty_documents() {
        let docs = [
            raw("a", "2014-02-01", "nurse nurse doctor"),
            raw("b", "2014-02-11", "the and of"),
            raw("c", "2014-03-04", "doctor engineer"),
        ];
        let opts = IngestOptions {
            vocab_size: 2,
            ..Default::default()
        };
        let (corpus, report) =
            ingest(&docs, &table(&[("2014-02", 1.0), ("2014-03", 2.0)]), &opts).unwrap();
        assert_eq!(corpus.vocabulary.terms(), ["doctor", "nurse"]);
        assert_eq!(report.dropped_documents, ["b"]);
        assert_eq!(report.documents_per_period, [1, 1]);
        assert_eq!(corpus.num_documents(), report.documents_retained);
        assert!((corpus.coverage - 4.0 / 5.0).abs() < 1e-15);
        assert_eq!(corpus.covariates, vec![vec![-0.7071067811865475], vec![0.7071067811865475]]);
        assert_eq!(corpus.periods[1][0].tokens, [0]);
    }

    #[test]
    fn duplicate_ids_rejected() {
        let docs = [raw("a", "2014-02-01", "x"), raw("a", "2014-02-02", "y")];
        assert!(ingest(&docs, &table(&[("2014-02", 1.0)]), &IngestOptions::default()).is_err());
    }

    #[test]
    fn document_records_report_line_numbers() {
        let text = "{\"id\":\"a\",\"timestamp\":\"2014-02-01\",\"text\":\"x\"}\n\n{\"id\":\"b\"}\n";
        let err = parse_documents(text, Path::new("docs.jsonl")).unwrap_err();
        assert!(err.to_string().starts_with("docs.jsonl:3"), "{err}");
    }
}
