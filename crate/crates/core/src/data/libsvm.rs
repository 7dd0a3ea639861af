//! LIBSVM / SVMlight sparse text format: `label idx:val idx:val ...` with
//! 1-based, strictly ascending indices. Rows are densified to the largest
//! index seen in the file.

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::LabeledDataset;
use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

/// How raw label values map onto the two classes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum LabelMapping {
    /// `{-1, +1}` or `{0, 1}`; `1` is positive.
    Binary,
    /// Listed labels are positive; the rest are negative, or only those in
    /// `negative` when given (other rows are dropped).
    Split {
        positive: Vec<f64>,
        #[serde(default)]
        negative: Option<Vec<f64>>,
    },
}

impl LabelMapping {
    fn map(&self, raw: f64, line: usize) -> Result<Option<i8>> {
        match self {
            LabelMapping::Binary => {
                if raw == 1.0 {
                    Ok(Some(1))
                } else if raw == -1.0 || raw == 0.0 {
                    Ok(Some(-1))
                } else {
                    Err(Error::Parse {
                        line,
                        message: format!("label {raw} is not binary; supply a class split"),
                    })
                }
            }
            LabelMapping::Split { positive, negative } => {
                if positive.contains(&raw) {
                    Ok(Some(1))
                } else {
                    match negative {
                        Some(neg) if !neg.contains(&raw) => Ok(None),
                        _ => Ok(Some(-1)),
                    }
                }
            }
        }
    }
}

struct SparseRow {
    label: i8,
    entries: Vec<(usize, f64)>,
}

type RawRow = (f64, Vec<(usize, f64)>);

fn parse_line(text: &str, line: usize) -> Result<Option<RawRow>> {
    let text = text.split('#').next().unwrap_or("").trim();
    if text.is_empty() {
        return Ok(None);
    }
    let err = |message: String| Error::Parse { line, message };
    let mut tokens = text.split_whitespace();
    let label_tok = tokens.next().expect("non-empty line has a token");
    let label: f64 = label_tok
        .parse()
        .map_err(|_| err(format!("invalid label {label_tok:?}")))?;
    let mut entries = Vec::new();
    let mut last = 0usize;
    for tok in tokens {
        let (i, v) = tok
            .split_once(':')
            .ok_or_else(|| err(format!("expected idx:val, got {tok:?}")))?;
        let idx: usize = i.parse().map_err(|_| err(format!("invalid index {i:?}")))?;
        if idx == 0 {
            return Err(err("indices are 1-based".into()));
        }
        if idx <= last {
            return Err(err(format!("index {idx} is not ascending after {last}")));
        }
        let val: f64 = v.parse().map_err(|_| err(format!("invalid value {v:?}")))?;
        if !val.is_finite() {
            return Err(err(format!("non-finite value {v:?}")));
        }
        entries.push((idx, val));
        last = idx;
    }
    Ok(Some((label, entries)))
}

/// Parses LIBSVM text from a reader.
pub fn parse_libsvm<R: BufRead>(reader: R, mapping: &LabelMapping) -> Result<LabeledDataset> {
    let mut rows = Vec::new();
    let mut dim = 0;
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let Some((raw, entries)) = parse_line(&line?, line_no)? else {
            continue;
        };
        let Some(label) = mapping.map(raw, line_no)? else {
            continue;
        };
        if let Some(&(idx, _)) = entries.last() {
            dim = dim.max(idx);
        }
        rows.push(SparseRow { label, entries });
    }
    let mut features = DenseMatrix::zeros(rows.len(), dim);
    for (r, row) in rows.iter().enumerate() {
        let dst = features.row_mut(r);
        for &(idx, v) in &row.entries {
            dst[idx - 1] = v;
        }
    }
    LabeledDataset::new(features, rows.iter().map(|r| r.label).collect())
}

pub fn load_libsvm(path: impl AsRef<Path>, mapping: &LabelMapping) -> Result<LabeledDataset> {
    parse_libsvm(BufReader::new(File::open(path)?), mapping)
}

/// Writes nonzero entries only; values use the shortest round-trip form.
pub fn write_libsvm<W: Write>(mut w: W, data: &LabeledDataset) -> Result<()> {
    for (x, &y) in data.features().rows().zip(data.labels()) {
        write!(w, "{}", if y > 0 { "+1" } else { "-1" })?;
        for (j, v) in x.iter().enumerate() {
            if *v != 0.0 {
                write!(w, " {}:{}", j + 1, v)?;
            }
        }
        writeln!(w)?;
    }
    Ok(())
}
