//! Dataset representations for cohort and test-negative-design samples,
//! the restriction mapping between them, and CSV ingestion.
//!
//! A cohort record carries the tri-level outcome `Y` (0 = not tested,
//! 1 = test-negative, 2 = test-positive); a TND record carries the binary
//! test-positive indicator `Y* = 1(Y = 2)` and implicitly has `S = 1`.

use std::path::Path;

use crate::error::{Error, Result};

/// Tri-level outcome at the end of follow-up.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TriOutcome {
    /// `Y = 0`: never tested.
    NotTested,
    /// `Y = 1`: tested, negative for the focal pathogen.
    TestNegative,
    /// `Y = 2`: tested, positive for the focal pathogen.
    TestPositive,
}

impl TriOutcome {
    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(TriOutcome::NotTested),
            1 => Some(TriOutcome::TestNegative),
            2 => Some(TriOutcome::TestPositive),
            _ => None,
        }
    }

    #[inline]
    pub fn code(self) -> u8 {
        match self {
            TriOutcome::NotTested => 0,
            TriOutcome::TestNegative => 1,
            TriOutcome::TestPositive => 2,
        }
    }

    #[inline]
    pub fn tested(self) -> bool {
        !matches!(self, TriOutcome::NotTested)
    }
}

/// One cohort subject: covariates, vaccination, tri-level outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct CohortRecord {
    pub x: Vec<f64>,
    pub v: bool,
    pub y: TriOutcome,
}

/// One TND subject: covariates, vaccination, test-positive indicator.
/// Every TND record implicitly has selection `S = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct TndRecord {
    pub x: Vec<f64>,
    pub v: bool,
    pub y_star: bool,
}

/// Cohort sample; all records share `covariate_dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct CohortDataset {
    records: Vec<CohortRecord>,
    covariate_dim: usize,
    covariate_names: Option<Vec<String>>,
}

/// TND sample; all records share `covariate_dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct TndDataset {
    records: Vec<TndRecord>,
    covariate_dim: usize,
    covariate_names: Option<Vec<String>>,
}

impl CohortDataset {
    pub fn new(records: Vec<CohortRecord>, covariate_dim: usize) -> Result<Self> {
        for (i, r) in records.iter().enumerate() {
            if r.x.len() != covariate_dim {
                return Err(Error::DimensionMismatch(format!(
                    "record {i} has {} covariates, expected {covariate_dim}",
                    r.x.len()
                )));
            }
        }
        Ok(CohortDataset { records, covariate_dim, covariate_names: None })
    }

    pub fn with_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.covariate_dim {
            return Err(Error::DimensionMismatch(format!(
                "{} covariate names for dimension {}",
                names.len(),
                self.covariate_dim
            )));
        }
        self.covariate_names = Some(names);
        Ok(self)
    }

    pub fn records(&self) -> &[CohortRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn covariate_dim(&self) -> usize {
        self.covariate_dim
    }

    pub fn covariate_names(&self) -> Option<&[String]> {
        self.covariate_names.as_deref()
    }
}

impl TndDataset {
    pub fn new(records: Vec<TndRecord>, covariate_dim: usize) -> Result<Self> {
        for (i, r) in records.iter().enumerate() {
            if r.x.len() != covariate_dim {
                return Err(Error::DimensionMismatch(format!(
                    "record {i} has {} covariates, expected {covariate_dim}",
                    r.x.len()
                )));
            }
        }
        Ok(TndDataset { records, covariate_dim, covariate_names: None })
    }

    pub fn with_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.covariate_dim {
            return Err(Error::DimensionMismatch(format!(
                "{} covariate names for dimension {}",
                names.len(),
                self.covariate_dim
            )));
        }
        self.covariate_names = Some(names);
        Ok(self)
    }

    pub fn records(&self) -> &[TndRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn covariate_dim(&self) -> usize {
        self.covariate_dim
    }

    pub fn covariate_names(&self) -> Option<&[String]> {
        self.covariate_names.as_deref()
    }
}

/// Restrict a cohort to the tested subjects, `S = 1(Y != 0)`, mapping the
/// tri-level outcome to the test-positive indicator `Y* = 1(Y = 2)`.
/// Record order is preserved; the output may be empty.
pub fn restrict_to_tested(cohort: &CohortDataset) -> TndDataset {
    let records = cohort
        .records
        .iter()
        .filter(|r| r.y.tested())
        .map(|r| TndRecord {
            x: r.x.clone(),
            v: r.v,
            y_star: r.y == TriOutcome::TestPositive,
        })
        .collect();
    TndDataset {
        records,
        covariate_dim: cohort.covariate_dim,
        covariate_names: cohort.covariate_names.clone(),
    }
}

/// Column mapping for CSV ingestion. The outcome column is interpreted as the
/// tri-level `Y` for cohort data and as the binary `Y*` for TND data.
#[derive(Debug, Clone)]
pub struct CsvSchema {
    pub col_v: String,
    pub col_y: String,
    pub cols_x: Vec<String>,
    /// Drop rows with missing or non-numeric cells instead of erroring.
    pub drop_missing: bool,
}

/// Ingestion report; `rows_dropped` counts rows removed under `drop_missing`.
#[derive(Debug, Clone, Copy, Default)]
pub struct IngestReport {
    pub rows_read: usize,
    pub rows_dropped: usize,
}

fn header_index(headers: &csv::StringRecord, name: &str) -> Result<usize> {
    headers
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| Error::Schema(format!("column '{name}' not found in header")))
}

fn parse_cell(raw: &str, row: usize, col: &str) -> Result<Option<f64>> {
    let trimmed = raw.trim();
    if trimmed.is_empty() {
        return Ok(None);
    }
    match trimmed.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(Some(v)),
        _ => Err(Error::Value { row, msg: format!("non-numeric value '{trimmed}' in column '{col}'") }),
    }
}

struct ParsedRow {
    x: Vec<f64>,
    v: f64,
    y: f64,
}

fn read_rows(path: &Path, schema: &CsvSchema) -> Result<(Vec<ParsedRow>, IngestReport)> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_path(path)?;
    let headers = reader.headers()?.clone();
    let iv = header_index(&headers, &schema.col_v)?;
    let iy = header_index(&headers, &schema.col_y)?;
    let ix: Vec<usize> = schema
        .cols_x
        .iter()
        .map(|c| header_index(&headers, c))
        .collect::<Result<_>>()?;

    let mut rows = Vec::new();
    let mut report = IngestReport::default();
    for (row_idx, record) in reader.records().enumerate() {
        let record = record?;
        report.rows_read += 1;
        let parse_all = || -> Result<Option<ParsedRow>> {
            let v = parse_cell(record.get(iv).unwrap_or(""), row_idx, &schema.col_v)?;
            let y = parse_cell(record.get(iy).unwrap_or(""), row_idx, &schema.col_y)?;
            let mut x = Vec::with_capacity(ix.len());
            for (&i, name) in ix.iter().zip(&schema.cols_x) {
                match parse_cell(record.get(i).unwrap_or(""), row_idx, name)? {
                    Some(val) => x.push(val),
                    None => return Ok(None),
                }
            }
            match (v, y) {
                (Some(v), Some(y)) => Ok(Some(ParsedRow { x, v, y })),
                _ => Ok(None),
            }
        };
        match parse_all() {
            Ok(Some(parsed)) => rows.push(parsed),
            Ok(None) => {
                if schema.drop_missing {
                    report.rows_dropped += 1;
                } else {
                    return Err(Error::Value { row: row_idx, msg: "missing value".into() });
                }
            }
            Err(e) => {
                if schema.drop_missing {
                    report.rows_dropped += 1;
                    let _ = e;
                } else {
                    return Err(e);
                }
            }
        }
    }
    Ok((rows, report))
}

fn parse_binary(value: f64, row: usize, what: &str) -> Result<bool> {
    if value == 0.0 {
        Ok(false)
    } else if value == 1.0 {
        Ok(true)
    } else {
        Err(Error::Value { row, msg: format!("{what} must be 0 or 1, got {value}") })
    }
}

/// Load a cohort dataset (`Y` in {0,1,2}) from a headered CSV file.
pub fn load_cohort_csv(path: &Path, schema: &CsvSchema) -> Result<(CohortDataset, IngestReport)> {
    let (rows, report) = read_rows(path, schema)?;
    let mut records = Vec::with_capacity(rows.len());
    for (i, row) in rows.into_iter().enumerate() {
        let v = parse_binary(row.v, i, "v")?;
        let y = if row.y.fract() == 0.0 && (0.0..=2.0).contains(&row.y) {
            TriOutcome::from_code(row.y as u8).unwrap()
        } else {
            return Err(Error::Value { row: i, msg: format!("y must be 0, 1 or 2, got {}", row.y) });
        };
        records.push(CohortRecord { x: row.x, v, y });
    }
    let ds = CohortDataset::new(records, schema.cols_x.len())?
        .with_names(schema.cols_x.clone())?;
    Ok((ds, report))
}

/// Load a TND dataset (`Y*` in {0,1}) from a headered CSV file.
pub fn load_tnd_csv(path: &Path, schema: &CsvSchema) -> Result<(TndDataset, IngestReport)> {
    let (rows, report) = read_rows(path, schema)?;
    let mut records = Vec::with_capacity(rows.len());
    for (i, row) in rows.into_iter().enumerate() {
        let v = parse_binary(row.v, i, "v")?;
        let y_star = parse_binary(row.y, i, "y_star")?;
        records.push(TndRecord { x: row.x, v, y_star });
    }
    let ds = TndDataset::new(records, schema.cols_x.len())?
        .with_names(schema.cols_x.clone())?;
    Ok((ds, report))
}

/// Write a cohort dataset as CSV with columns `v,y,x0,x1,...` (or the stored
/// covariate names when present).
pub fn write_cohort_csv(path: &Path, data: &CohortDataset) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    let mut header = vec!["v".to_string(), "y".to_string()];
    match data.covariate_names() {
        Some(names) => header.extend(names.iter().cloned()),
        None => header.extend((0..data.covariate_dim()).map(|i| format!("x{i}"))),
    }
    writer.write_record(&header)?;
    for r in data.records() {
        let mut row = vec![u8::from(r.v).to_string(), r.y.code().to_string()];
        row.extend(r.x.iter().map(|v| format!("{v}")));
        writer.write_record(&row)?;
    }
    writer.flush()?;
    Ok(())
}

/// Write a TND dataset as CSV with columns `v,y_star,x0,...`.
pub fn write_tnd_csv(path: &Path, data: &TndDataset) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    let mut header = vec!["v".to_string(), "y_star".to_string()];
    match data.covariate_names() {
        Some(names) => header.extend(names.iter().cloned()),
        None => header.extend((0..data.covariate_dim()).map(|i| format!("x{i}"))),
    }
    writer.write_record(&header)?;
    for r in data.records() {
        let mut row = vec![u8::from(r.v).to_string(), u8::from(r.y_star).to_string()];
        row.extend(r.x.iter().map(|v| format!("{v}")));
        writer.write_record(&row)?;
    }
    writer.flush()?;
    Ok(())
}
