//! Bin-by-bin z-scores between an estimate table and a prediction table.

use std::path::Path;

use nhrmt::export::{Field, Table};
use serde::Serialize;

use crate::error::{CliError, Result};

/// Fraction of compared bins allowed to exceed the tolerance.
pub const MAX_EXCEEDING_FRACTION: f64 = 0.01;

const VALUE_COLUMNS: [&str; 2] = ["value", "normalized_moment"];
const NON_KEY_COLUMNS: [&str; 5] = ["value", "normalized_moment", "std_error", "rel_std_error", "n_samples"];
const KEY_REL_TOL: f64 = 1e-9;

/// A table of numbers read back from CSV; text cells become NaN.
#[derive(Clone, Debug, PartialEq)]
pub struct NumericTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl NumericTable {
    pub fn from_table(t: &Table) -> Self {
        let rows = t
            .rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|f| match f {
                        Field::Num(x) => *x,
                        Field::Int(k) => *k as f64,
                        Field::Text(_) => f64::NAN,
                    })
                    .collect()
            })
            .collect();
        NumericTable { header: t.header.clone(), rows }
    }

    pub fn read(path: &Path) -> Result<Self> {
        let bad = |msg: String| CliError::Csv { path: path.display().to_string(), msg };
        let mut reader = csv::Reader::from_path(path).map_err(|e| bad(e.to_string()))?;
        let header: Vec<String> = reader.headers().map_err(|e| bad(e.to_string()))?.iter().map(String::from).collect();
        let mut rows = Vec::new();
        for rec in reader.records() {
            let rec = rec.map_err(|e| bad(e.to_string()))?;
            rows.push(rec.iter().map(|s| s.trim().parse().unwrap_or(f64::NAN)).collect());
        }
        Ok(NumericTable { header, rows })
    }

    fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    fn value_column(&self) -> Option<usize> {
        VALUE_COLUMNS.iter().find_map(|c| self.column(c))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompareRow {
    pub keys: Vec<f64>,
    pub estimate: f64,
    pub std_error: f64,
    pub prediction: f64,
    /// `None` when either side is not finite, or the estimate has zero error
    /// and differs from the prediction.
    pub z: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompareReport {
    pub key_columns: Vec<String>,
    pub tolerance: f64,
    pub rows: Vec<CompareRow>,
    pub compared: usize,
    pub exceeding: usize,
    pub skipped: usize,
    pub passed: bool,
}

impl CompareReport {
    pub fn summary(&self) -> String {
        format!(
            "{}: {} of {} bins with |z| > {} ({} skipped); allowed fraction {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.exceeding,
            self.compared,
            self.tolerance,
            self.skipped,
            MAX_EXCEEDING_FRACTION
        )
    }

    pub fn to_table(&self) -> Table {
        let mut header: Vec<&str> = self.key_columns.iter().map(|s| s.as_str()).collect();
        header.extend(["estimate", "std_error", "prediction", "z"]);
        let mut t = Table::new(&header);
        for r in &self.rows {
            let mut row: Vec<Field> = r.keys.iter().map(|&k| k.into()).collect();
            row.extend([r.estimate.into(), r.std_error.into(), r.prediction.into(), r.z.unwrap_or(f64::NAN).into()]);
            t.rows.push(row);
        }
        t
    }
}

fn keys_match(a: f64, b: f64) -> bool {
    a == b || (a - b).abs() <= KEY_REL_TOL * a.abs().max(b.abs())
}

/// z-score of one bin. With a relative error column the comparison is made
/// in log space, where the jackknife error is computed.
fn z_score(estimate: f64, prediction: f64, abs_se: f64, rel_se: Option<f64>) -> Option<f64> {
    if !(estimate.is_finite() && prediction.is_finite()) {
        return None;
    }
    let scale = estimate.abs().max(prediction.abs());
    let (diff, se) = match rel_se {
        Some(rel) if estimate > 0.0 && prediction > 0.0 => ((estimate / prediction).ln(), rel),
        _ => (estimate - prediction, abs_se),
    };
    if !se.is_finite() {
        return None;
    }
    if se > 0.0 {
        return Some(diff / se);
    }
    // no error information (e.g. an empty bin): only exact agreement scores
    (diff.abs() <= 1e-12 * scale.max(1e-300)).then_some(0.0)
}

/// Compares row by row. Key columns are the columns both tables share other
/// than values, errors and sample counts; they must agree row for row.
pub fn compare_tables(estimates: &NumericTable, predictions: &NumericTable, tolerance: f64) -> Result<CompareReport> {
    if !(tolerance > 0.0) {
        return Err(CliError::Config(format!("tolerance must be positive, got {tolerance}")));
    }
    let est_col = estimates.value_column().ok_or_else(|| CliError::GridMismatch("estimates have no value column".into()))?;
    let pred_col =
        predictions.value_column().ok_or_else(|| CliError::GridMismatch("predictions have no value column".into()))?;
    let abs_col = estimates.column("std_error");
    let rel_col = estimates.column("rel_std_error");
    if abs_col.is_none() && rel_col.is_none() {
        return Err(CliError::GridMismatch("estimates have no std_error column".into()));
    }
    let keys: Vec<(String, usize, usize)> = estimates
        .header
        .iter()
        .enumerate()
        .filter(|(_, h)| !NON_KEY_COLUMNS.contains(&h.as_str()))
        .filter_map(|(i, h)| predictions.column(h).map(|j| (h.clone(), i, j)))
        .collect();
    if keys.is_empty() {
        return Err(CliError::GridMismatch("no shared grid columns".into()));
    }
    if estimates.rows.len() != predictions.rows.len() {
        return Err(CliError::GridMismatch(format!(
            "{} estimate rows vs {} prediction rows",
            estimates.rows.len(),
            predictions.rows.len()
        )));
    }
    let mut rows = Vec::with_capacity(estimates.rows.len());
    for (r, (e, p)) in estimates.rows.iter().zip(&predictions.rows).enumerate() {
        for (name, i, j) in &keys {
            if !keys_match(e[*i], p[*j]) {
                return Err(CliError::GridMismatch(format!("row {r}: {name} = {} vs {}", e[*i], p[*j])));
            }
        }
        let estimate = e[est_col];
        let prediction = p[pred_col];
        let rel = rel_col.map(|c| e[c]);
        let std_error = match (abs_col, rel) {
            (Some(c), _) => e[c],
            (None, Some(rel)) => rel * estimate.abs(),
            (None, None) => unreachable!(),
        };
        rows.push(CompareRow {
            keys: keys.iter().map(|(_, i, _)| e[*i]).collect(),
            estimate,
            std_error,
            prediction,
            z: z_score(estimate, prediction, std_error, if abs_col.is_some() { None } else { rel }),
        });
    }
    let compared = rows.iter().filter(|r| r.z.is_some()).count();
    let exceeding = rows.iter().filter(|r| r.z.is_some_and(|z| z.abs() > tolerance)).count();
    let passed = compared > 0 && (exceeding as f64) <= MAX_EXCEEDING_FRACTION * compared as f64;
    Ok(CompareReport {
        key_columns: keys.into_iter().map(|(h, _, _)| h).collect(),
        tolerance,
        skipped: rows.len() - compared,
        rows,
        compared,
        exceeding,
        passed,
    })
}

pub fn compare_files(estimates: &Path, predictions: &Path, tolerance: f64) -> Result<CompareReport> {
    compare_tables(&NumericTable::read(estimates)?, &NumericTable::read(predictions)?, tolerance)
}
