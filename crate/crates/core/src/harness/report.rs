use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::Path;

use super::experiment::ResultRow;
use super::variant::VariantId;
use crate::corpus::csv_writer;
use crate::error::{Error, Result};
use crate::models::ModelKind;

/// A report in two shapes: the variant × model matrix and the long-form CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub text: String,
    pub csv: String,
}

fn cell(row: &ResultRow) -> String {
    match row.accuracy {
        Some(a) => format!("{a:.4}/{:.4}", row.mse),
        None => format!("-/{:.4}", row.mse),
    }
}

/// Renders `accuracy/mse` cells with one line per variant and one column per
/// model, both in canonical order. Combinations without a row are left blank.
pub fn emit_report(rows: &[ResultRow]) -> Result<Report> {
    if rows.is_empty() {
        return Err(Error::Data("no result rows to report".into()));
    }
    let variants: Vec<VariantId> = VariantId::ALL
        .into_iter()
        .filter(|v| rows.iter().any(|r| r.variant == *v))
        .collect();
    let models: Vec<ModelKind> = ModelKind::ALL
        .into_iter()
        .filter(|m| rows.iter().any(|r| r.model == *m))
        .collect();
    let lookup = |v: VariantId, m: ModelKind| {
        rows.iter()
            .find(|r| r.variant == v && r.model == m)
            .map(cell)
            .unwrap_or_default()
    };

    let mut header = vec!["Accuracy/MSE".to_owned()];
    header.extend(models.iter().map(|m| m.name().to_owned()));
    let mut table = vec![header];
    for &v in &variants {
        let mut line = vec![v.title().to_owned()];
        line.extend(models.iter().map(|&m| lookup(v, m)));
        table.push(line);
    }
    let widths: Vec<usize> = (0..table[0].len())
        .map(|c| table.iter().map(|l| l[c].chars().count()).max().unwrap_or(0))
        .collect();
    let mut text = String::new();
    for line in &table {
        let padded: Vec<String> = line.iter().zip(&widths).map(|(s, w)| format!("{s:<w$}")).collect();
        let _ = writeln!(text, "{}", padded.join("  ").trim_end());
    }

    let mut csv = Vec::new();
    write_rows_csv(rows, &mut csv)?;
    Ok(Report {
        text,
        csv: String::from_utf8(csv).expect("csv output is UTF-8"),
    })
}

pub fn write_rows_csv<W: Write>(rows: &[ResultRow], writer: W) -> Result<()> {
    let fail = |e: csv::Error| Error::Data(format!("csv write failed: {e}"));
    let mut wtr = csv_writer(writer);
    if rows.is_empty() {
        wtr.write_record([
            "variant",
            "model",
            "accuracy",
            "precision",
            "recall",
            "f_measure",
            "mse",
            "runtime_s",
        ])
        .map_err(fail)?;
    }
    for row in rows {
        wtr.serialize(row).map_err(fail)?;
    }
    wtr.flush().map_err(|e| Error::Data(format!("csv write failed: {e}")))
}

pub fn read_rows_csv<R: Read>(reader: R, origin: &str) -> Result<Vec<ResultRow>> {
    let mut rdr = csv::Reader::from_reader(reader);
    let rows: Vec<ResultRow> = rdr
        .deserialize()
        .enumerate()
        .map(|(i, r)| r.map_err(|e| Error::parse(origin, i + 1, e.to_string())))
        .collect::<Result<_>>()?;
    if let Some((i, _)) = rows
        .iter()
        .enumerate()
        .find(|(_, r)| r.accuracy.is_none() != r.model.is_regression())
    {
        return Err(Error::parse(
            origin,
            i + 1,
            "accuracy must be empty exactly for linear-regression rows",
        ));
    }
    Ok(rows)
}

pub fn load_rows_csv(path: impl AsRef<Path>) -> Result<Vec<ResultRow>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_rows_csv(file, &path.display().to_string())
}
