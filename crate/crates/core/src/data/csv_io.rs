//! CSV with a header row `label,f1,...,fd`.

use std::io::{Read, Write};

use super::LabeledDataset;
use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

pub fn write_labeled_csv<W: Write>(w: W, data: &LabeledDataset) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let mut header = vec!["label".to_string()];
    header.extend((1..=data.dim()).map(|j| format!("f{j}")));
    out.write_record(&header)?;
    for (x, y) in data.features().rows().zip(data.labels()) {
        let mut rec = vec![y.to_string()];
        rec.extend(x.iter().map(|v| v.to_string()));
        out.write_record(&rec)?;
    }
    out.flush()?;
    Ok(())
}

/// Reads the header and numeric body; returns (label column, feature rows).
fn read_table<R: Read>(r: R) -> Result<(Option<Vec<f64>>, DenseMatrix)> {
    let mut rdr = csv::Reader::from_reader(r);
    let header = rdr.headers()?.clone();
    let label_col = header.iter().position(|h| h.trim() == "label");
    let d = header.len() - usize::from(label_col.is_some());
    let mut labels = Vec::new();
    let mut data = Vec::new();
    let mut rows = 0;
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        // header is line 1
        let line = i + 2;
        for (j, field) in rec.iter().enumerate() {
            let v: f64 = field.trim().parse().map_err(|_| Error::Parse {
                line,
                message: format!("invalid number {field:?} in column {}", j + 1),
            })?;
            if Some(j) == label_col {
                labels.push(v);
            } else {
                data.push(v);
            }
        }
        rows += 1;
    }
    let m = DenseMatrix::from_row_major(rows, d, data)?;
    Ok((label_col.map(|_| labels), m))
}

/// Feature matrix from a CSV; a `label` column, if present, is ignored.
pub fn read_feature_csv<R: Read>(r: R) -> Result<DenseMatrix> {
    read_table(r).map(|(_, m)| m)
}

pub fn read_labeled_csv<R: Read>(r: R) -> Result<LabeledDataset> {
    let (labels, m) = read_table(r)?;
    let labels = labels.ok_or_else(|| Error::InvalidArgument("CSV has no label column".into()))?;
    let labels = labels
        .into_iter()
        .enumerate()
        .map(|(i, l)| match l {
            1.0 => Ok(1),
            v if v == -1.0 || v == 0.0 => Ok(-1),
            v => Err(Error::Parse {
                line: i + 2,
                message: format!("label {v} is not binary"),
            }),
        })
        .collect::<Result<Vec<i8>>>()?;
    LabeledDataset::new(m, labels)
}
