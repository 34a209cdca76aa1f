use std::collections::HashMap;
use std::path::Path;

use crate::error::{Error, Result};

/// A labelled covariate table as read from disk, before alignment to periods.
#[derive(Debug, Clone, PartialEq)]
pub struct CovariateTable {
    pub columns: Vec<String>,
    pub labels: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl CovariateTable {
    /// Parses a comma-separated table: a header line, then one row per period
    /// whose first field is the period label and remaining fields are numeric.
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let parse_err = |line: usize, message: String| Error::Parse {
            path: path.to_path_buf(),
            line,
            message,
        };
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let (_, header) = lines
            .next()
            .ok_or_else(|| parse_err(1, "empty covariate file".into()))?;
        let columns: Vec<String> = header.split(',').skip(1).map(|c| c.trim().to_string()).collect();
        if columns.is_empty() {
            return Err(parse_err(1, "header needs a label column and at least one covariate".into()));
        }
        let mut labels = Vec::new();
        let mut rows = Vec::new();
        for (line_no, line) in lines {
            let mut fields = line.split(',').map(str::trim);
            let label = fields.next().unwrap_or_default().to_string();
            let values = fields
                .map(|f| {
                    f.parse::<f64>()
                        .ok()
                        .filter(|v| v.is_finite())
                        .ok_or_else(|| parse_err(line_no, format!("non-numeric covariate value {f:?}")))
                })
                .collect::<Result<Vec<f64>>>()?;
            if values.len() != columns.len() {
                return Err(parse_err(
                    line_no,
                    format!("expected {} covariate values, found {}", columns.len(), values.len()),
                ));
            }
            labels.push(label);
            rows.push(values);
        }
        Ok(Self { columns, labels, rows })
    }

    /// Orders the rows to match `period_labels`; every period needs exactly one row.
    pub fn align(&self, period_labels: &[String]) -> Result<Vec<Vec<f64>>> {
        let mut by_label: HashMap<&str, usize> = HashMap::new();
        for (i, label) in self.labels.iter().enumerate() {
            if by_label.insert(label, i).is_some() {
                return Err(Error::input(format!("duplicate covariate row for period {label}")));
            }
        }
        let mut aligned = Vec::with_capacity(period_labels.len());
        for label in period_labels {
            let row = by_label
                .remove(label.as_str())
                .ok_or_else(|| Error::input(format!("covariate file has no row for period {label}")))?;
            aligned.push(self.rows[row].clone());
        }
        if let Some(extra) = by_label.keys().min() {
            return Err(Error::input(format!(
                "covariate row {extra} does not match any document period"
            )));
        }
        Ok(aligned)
    }
}

/// Centers each column and scales it to unit sample standard deviation
/// (denominator `T - 1`).
pub fn standardize_covariates(raw: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let t = raw.len();
    if t < 2 {
        return Err(Error::input("standardizing covariates needs at least two periods"));
    }
    let p = raw[0].len();
    if raw.iter().any(|r| r.len() != p) {
        return Err(Error::input("covariate rows have differing lengths"));
    }
    if raw.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::input("covariates contain missing or non-finite values"));
    }
    let mut out = raw.to_vec();
    for j in 0..p {
        let mean = raw.iter().map(|r| r[j]).sum::<f64>() / t as f64;
        let var = raw.iter().map(|r| (r[j] - mean).powi(2)).sum::<f64>() / (t - 1) as f64;
        let sd = var.sqrt();
        if !(sd > 1e-12 * mean.abs().max(1.0)) {
            return Err(Error::input(format!("covariate column {j} has zero variance")));
        }
        for row in out.iter_mut() {
            row[j] = (row[j] - mean) / sd;
        }
    }
    Ok(out)
}
