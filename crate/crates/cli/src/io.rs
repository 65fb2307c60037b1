//! CSV ingestion and output. Every file has a header row and one observation
//! per row.

use std::fs::File;
use std::io::{self, Read, Write};

use anyhow::{anyhow, bail, Context, Result};

use art_core::{Dataset, DatasetKind, ScoreSeries};

/// Response column of a regression file.
pub const RESPONSE_COLUMN: &str = "y";
pub const SCORE_COLUMN: &str = "score";
pub const CANDIDATE_COLUMN: &str = "candidate";

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    fn column_index(&self, name: &str, path: &str) -> Result<usize> {
        self.header.iter().position(|h| h == name).ok_or_else(|| {
            anyhow!(
                "{path}: no column named `{name}` in header {:?}",
                self.header
            )
        })
    }

    fn column(&self, j: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[j]).collect()
    }
}

fn open(path: &str) -> Result<Box<dyn Read>> {
    if path == "-" {
        Ok(Box::new(io::stdin()))
    } else {
        let file = File::open(path).with_context(|| format!("cannot open {path}"))?;
        Ok(Box::new(file))
    }
}

pub fn parse_table(reader: impl Read, path: &str) -> Result<Table> {
    let mut csv = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header: Vec<String> = csv
        .headers()
        .with_context(|| format!("{path}: cannot read header row"))?
        .iter()
        .map(str::to_owned)
        .collect();
    if header.is_empty() || header.iter().all(String::is_empty) {
        bail!("{path}: missing header row");
    }
    let mut rows = Vec::new();
    for record in csv.records() {
        let record = record.with_context(|| format!("{path}: malformed CSV"))?;
        let line = record.position().map_or(0, |p| p.line());
        let row = record
            .iter()
            .zip(&header)
            .map(|(cell, name)| {
                cell.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| {
                        anyhow!(
                            "{path}: line {line}, column `{name}`: `{cell}` is not a finite number"
                        )
                    })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok(Table { header, rows })
}

pub fn read_table(path: &str) -> Result<Table> {
    parse_table(open(path)?, path)
}

/// A regression dataset when the header has a `y` column, otherwise a
/// vector dataset over all columns.
pub fn read_dataset(path: &str) -> Result<Dataset> {
    table_to_dataset(&read_table(path)?, path)
}

pub fn table_to_dataset(table: &Table, path: &str) -> Result<Dataset> {
    let data = match table.header.iter().position(|h| h == RESPONSE_COLUMN) {
        Some(yj) => {
            let d = table.header.len() - 1;
            if d == 0 {
                bail!("{path}: regression data needs at least one covariate column");
            }
            let y = table.column(yj);
            let x = table
                .rows
                .iter()
                .flat_map(|r| {
                    r.iter()
                        .enumerate()
                        .filter(|&(j, _)| j != yj)
                        .map(|(_, &v)| v)
                })
                .collect();
            Dataset::regression(y, x, d)
        }
        None => {
            let d = table.header.len();
            Dataset::vector(table.rows.iter().flatten().copied().collect(), d)
        }
    };
    data.with_context(|| format!("{path}: invalid dataset"))
}

pub fn read_scores(path: &str) -> Result<ScoreSeries> {
    let table = read_table(path)?;
    let j = table.column_index(SCORE_COLUMN, path)?;
    ScoreSeries::new(table.column(j)).with_context(|| format!("{path}: invalid scores"))
}

pub fn read_candidates(path: &str) -> Result<Vec<usize>> {
    let table = read_table(path)?;
    let j = table.column_index(CANDIDATE_COLUMN, path)?;
    table
        .rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let v = r[j];
            if v >= 0.0 && v.fract() == 0.0 && v <= usize::MAX as f64 {
                Ok(v as usize)
            } else {
                bail!(
                    "{path}: row {}: candidate `{v}` is not a non-negative integer",
                    i + 1
                )
            }
        })
        .collect()
}

/// Writes `y` first (regression) followed by `x1, …, xd`.
pub fn write_dataset(data: &Dataset, out: impl Write) -> Result<()> {
    let mut csv = csv::Writer::from_writer(out);
    let regression = data.kind() == DatasetKind::Regression;
    let mut header: Vec<String> = Vec::with_capacity(data.d() + 1);
    if regression {
        header.push(RESPONSE_COLUMN.to_owned());
    }
    header.extend((1..=data.d()).map(|j| format!("x{j}")));
    csv.write_record(&header)?;
    let response = data.response();
    for (i, row) in data.rows().enumerate() {
        let mut record: Vec<String> = Vec::with_capacity(header.len());
        if let Some(y) = response {
            record.push(y[i].to_string());
        }
        record.extend(row.iter().map(f64::to_string));
        csv.write_record(&record)?;
    }
    csv.flush()?;
    Ok(())
}

/// Writes to `path`, or to stdout when `path` is `None` or `-`.
pub fn write_output(path: Option<&str>, bytes: &[u8]) -> Result<()> {
    match path {
        None | Some("-") => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()?;
        }
        Some(p) => std::fs::write(p, bytes).with_context(|| format!("cannot write {p}"))?,
    }
    Ok(())
}
