//! CSV datasets: UTF-8, comma separated, a header row, object labels in the
//! first column, `.` as the decimal point and no thousands separators.

use std::io::Write;
use std::path::{Path, PathBuf};

use cindex_core::preprocess::{quantize_qualitative, IndicatorKind, JudgmentMatrix};
use cindex_core::Matrix;

use crate::config::EvaluationConfig;
use crate::error::{CliError, Result};

/// A parsed CSV before any column is interpreted.
#[derive(Debug, Clone, PartialEq)]
pub struct RawTable {
    pub path: PathBuf,
    /// Header of the label column.
    pub label_header: String,
    /// Indicator headers, in file order.
    pub headers: Vec<String>,
    pub objects: Vec<String>,
    /// One entry per data row, aligned with `headers`.
    pub cells: Vec<Vec<String>>,
    /// 1-based source line of each data row.
    pub lines: Vec<u64>,
}

pub fn load_table(path: &Path) -> Result<RawTable> {
    let bytes = std::fs::read(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_table(path, &bytes)
}

pub fn parse_table(path: &Path, bytes: &[u8]) -> Result<RawTable> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(bytes);
    let parse_err = |line: u64, column: usize, message: String| CliError::Parse {
        path: path.to_path_buf(),
        line,
        column,
        message,
    };

    let mut records = reader.records();
    let header = match records.next() {
        Some(rec) => rec.map_err(|e| csv_error(path, e))?,
        None => {
            return Err(CliError::Dataset {
                path: path.to_path_buf(),
                message: "file is empty".into(),
            })
        }
    };
    if header.len() < 2 {
        return Err(parse_err(
            1,
            1,
            "header needs a label column and at least one indicator".into(),
        ));
    }
    let label_header = header[0].to_string();
    let headers: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    for (j, h) in headers.iter().enumerate() {
        if h.is_empty() {
            return Err(parse_err(1, j + 2, "empty header".into()));
        }
        if headers[..j].contains(h) {
            return Err(parse_err(1, j + 2, format!("duplicate header '{h}'")));
        }
    }

    let mut objects = Vec::new();
    let mut cells = Vec::new();
    let mut lines = Vec::new();
    for rec in records {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() == 1 && rec[0].is_empty() {
            continue;
        }
        if rec.len() != header.len() {
            return Err(parse_err(
                line,
                rec.len().min(header.len()) + 1,
                format!("row has {} fields, header has {}", rec.len(), header.len()),
            ));
        }
        objects.push(rec[0].to_string());
        cells.push(rec.iter().skip(1).map(str::to_string).collect());
        lines.push(line);
    }
    if objects.is_empty() {
        return Err(CliError::Dataset {
            path: path.to_path_buf(),
            message: "no data rows".into(),
        });
    }
    Ok(RawTable {
        path: path.to_path_buf(),
        label_header,
        headers,
        objects,
        cells,
        lines,
    })
}

fn csv_error(path: &Path, e: csv::Error) -> CliError {
    let line = e.position().map_or(0, |p| p.line());
    CliError::Parse {
        path: path.to_path_buf(),
        line,
        column: 0,
        message: e.to_string(),
    }
}

impl RawTable {
    /// Interprets the columns named by `config`, parsing numbers and
    /// quantizing qualitative labels.
    pub fn to_judgment(&self, config: &EvaluationConfig) -> Result<JudgmentMatrix> {
        for (j, h) in self.headers.iter().enumerate() {
            if !config.indicators.iter().any(|i| &i.spec.name == h) {
                return Err(CliError::Parse {
                    path: self.path.clone(),
                    line: 1,
                    column: j + 2,
                    message: format!("column '{h}' is not a configured indicator"),
                });
            }
        }
        let mut columns = Vec::with_capacity(config.indicators.len());
        for ind in &config.indicators {
            let j = self
                .headers
                .iter()
                .position(|h| h == &ind.spec.name)
                .ok_or_else(|| CliError::Dataset {
                    path: self.path.clone(),
                    message: format!("indicator '{}' has no column", ind.spec.name),
                })?;
            let raw: Vec<&str> = self.cells.iter().map(|row| row[j].as_str()).collect();
            let values = match (ind.spec.kind, &ind.mapping) {
                (IndicatorKind::QualitativeBinary, Some(mapping)) => {
                    quantize_qualitative(&raw, mapping).map_err(|e| {
                        let i = raw
                            .iter()
                            .position(|l| !mapping.contains_key(*l))
                            .unwrap_or(0);
                        CliError::Parse {
                            path: self.path.clone(),
                            line: self.lines[i],
                            column: j + 2,
                            message: e.to_string(),
                        }
                    })?
                }
                _ => raw
                    .iter()
                    .enumerate()
                    .map(|(i, cell)| {
                        parse_number(cell).ok_or_else(|| CliError::Parse {
                            path: self.path.clone(),
                            line: self.lines[i],
                            column: j + 2,
                            message: format!(
                                "'{cell}' is not a finite number in quantitative column '{}'",
                                ind.spec.name
                            ),
                        })
                    })
                    .collect::<Result<Vec<f64>>>()?,
            };
            columns.push(values);
        }
        let values = Matrix::from_columns(&columns)?;
        Ok(JudgmentMatrix::new(
            self.objects.clone(),
            config.specs(),
            values,
        )?)
    }
}

/// Plain decimal numbers only; no NaN, infinities or digit grouping.
fn parse_number(cell: &str) -> Option<f64> {
    let ok = !cell.is_empty()
        && cell
            .bytes()
            .all(|b| b.is_ascii_digit() || matches!(b, b'.' | b'-' | b'+' | b'e' | b'E'));
    if !ok {
        return None;
    }
    cell.parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Reads a dataset and interprets it with `config`.
pub fn load_dataset(path: &Path, config: &EvaluationConfig) -> Result<JudgmentMatrix> {
    load_table(path)?.to_judgment(config)
}

/// Writes a labelled matrix in the dataset format. Numbers use Rust's
/// shortest round-trip representation, so reloading is exact.
pub fn write_matrix_csv<W: Write, S: AsRef<str>>(
    out: W,
    label_header: &str,
    objects: &[S],
    headers: &[S],
    values: &Matrix,
) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec![label_header.to_string()];
    header.extend(headers.iter().map(|h| h.as_ref().to_string()));
    w.write_record(&header)?;
    for (i, object) in objects.iter().enumerate() {
        let mut row = vec![object.as_ref().to_string()];
        row.extend(values.row(i).iter().map(|v| format!("{v:?}")));
        w.write_record(&row)?;
    }
    w.flush()
}

pub fn write_dataset<W: Write>(out: W, x: &JudgmentMatrix) -> std::io::Result<()> {
    let names: Vec<&str> = x.indicators().iter().map(|i| i.name.as_str()).collect();
    let objects: Vec<&str> = x.objects().iter().map(String::as_str).collect();
    write_matrix_csv(out, "object", &objects, &names, x.values())
}
