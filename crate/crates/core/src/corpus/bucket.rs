use std::collections::BTreeSet;

use chrono::{DateTime, Datelike, NaiveDate, NaiveDateTime};

use super::RawDocument;
use crate::error::{Error, Result};

/// How document timestamps map onto periods.
#[derive(Debug, Clone, PartialEq)]
pub enum PeriodScheme {
    /// One period per calendar month that contains at least one document.
    Month,
    /// One period per calendar day that contains at least one document.
    Day,
    /// Half-open intervals `[b_t, b_{t+1})` between consecutive labelled
    /// boundaries. Periods without documents are allowed.
    Boundaries(Vec<(String, NaiveDateTime)>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Bucketing {
    pub labels: Vec<String>,
    /// Period index for each input document, in input order.
    pub assignment: Vec<usize>,
    pub empty_periods: Vec<usize>,
}

impl Bucketing {
    pub fn num_periods(&self) -> usize {
        self.labels.len()
    }

    pub fn counts(&self) -> Vec<usize> {
        let mut n = vec![0; self.labels.len()];
        for &t in &self.assignment {
            n[t] += 1;
        }
        n
    }
}

/// Parses an ISO-8601 date or date-time. Offsets are normalized to UTC.
pub fn parse_timestamp(s: &str) -> Result<NaiveDateTime> {
    let s = s.trim();
    if let Ok(dt) = DateTime::parse_from_rfc3339(s) {
        return Ok(dt.naive_utc());
    }
    for fmt in ["%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%d %H:%M:%S%.f", "%Y-%m-%dT%H:%M"] {
        if let Ok(dt) = NaiveDateTime::parse_from_str(s, fmt) {
            return Ok(dt);
        }
    }
    NaiveDate::parse_from_str(s, "%Y-%m-%d")
        .map(|d| d.and_hms_opt(0, 0, 0).expect("midnight is valid"))
        .map_err(|_| Error::input(format!("unparseable timestamp {s:?}")))
}

pub fn bucketize(documents: &[RawDocument], scheme: &PeriodScheme) -> Result<Bucketing> {
    let bucketing = match scheme {
        PeriodScheme::Month => by_calendar_key(documents, |d| {
            (d.year(), d.month(), 0, format!("{:04}-{:02}", d.year(), d.month()))
        }),
        PeriodScheme::Day => by_calendar_key(documents, |d| {
            (d.year(), d.month(), d.day(), d.format("%Y-%m-%d").to_string())
        }),
        PeriodScheme::Boundaries(bounds) => by_boundaries(documents, bounds)?,
    };
    for &t in &bucketing.empty_periods {
        log::warn!("period {} has no documents", bucketing.labels[t]);
    }
    Ok(bucketing)
}

fn by_calendar_key<F>(documents: &[RawDocument], key: F) -> Bucketing
where
    F: Fn(NaiveDate) -> (i32, u32, u32, String),
{
    let keys: Vec<_> = documents.iter().map(|d| key(d.timestamp.date())).collect();
    let distinct: BTreeSet<_> = keys.iter().cloned().collect();
    let ordered: Vec<_> = distinct.into_iter().collect();
    let assignment = keys
        .iter()
        .map(|k| ordered.binary_search(k).expect("key present"))
        .collect();
    Bucketing {
        labels: ordered.into_iter().map(|k| k.3).collect(),
        assignment,
        empty_periods: Vec::new(),
    }
}

fn by_boundaries(
    documents: &[RawDocument],
    bounds: &[(String, NaiveDateTime)],
) -> Result<Bucketing> {
    if bounds.len() < 2 {
        return Err(Error::config(
            "a boundary list needs at least two boundaries (one period)",
        ));
    }
    if bounds.windows(2).any(|w| w[0].1 >= w[1].1) {
        return Err(Error::config("period boundaries must be strictly increasing"));
    }
    let starts: Vec<NaiveDateTime> = bounds.iter().map(|b| b.1).collect();
    let end = *starts.last().unwrap();
    let mut assignment = Vec::with_capacity(documents.len());
    for doc in documents {
        if doc.timestamp < starts[0] || doc.timestamp >= end {
            return Err(Error::input(format!(
                "document {} dated {} lies outside all period boundaries",
                doc.id, doc.timestamp
            )));
        }
        // index of the last start <= timestamp
        let t = starts.partition_point(|s| *s <= doc.timestamp) - 1;
        assignment.push(t);
    }
    let labels: Vec<String> = bounds[..bounds.len() - 1].iter().map(|b| b.0.clone()).collect();
    let mut seen = vec![false; labels.len()];
    for &t in &assignment {
        seen[t] = true;
    }
    let empty_periods = (0..labels.len()).filter(|&t| !seen[t]).collect();
    Ok(Bucketing {
        labels,
        assignment,
        empty_periods,
    })
}
