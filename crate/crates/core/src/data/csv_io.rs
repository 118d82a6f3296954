use std::fmt::Write as _;
use std::fs;
use std::io::Read;
use std::path::Path;

use super::{Column, Dataset, Sample};
use crate::error::{Error, Result};

pub const CSV_HEADER: &str =
    "sf_ratio,feed_temp_c,solvent_temp_c,rotation_rpm,product_flow_m3hr";

pub fn load_csv(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv(file, path.display().to_string())
}

/// Parses the canonical CSV. Row numbers in errors are file line numbers.
pub fn read_csv<R: Read>(reader: R, provenance: impl Into<String>) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(reader);

    let header = rdr.headers().map_err(csv_error)?.clone();
    if header.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let found = header.iter().collect::<Vec<_>>().join(",");
    if found != CSV_HEADER {
        return Err(Error::CsvHeader {
            expected: CSV_HEADER.to_string(),
            found,
        });
    }

    let mut samples = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(csv_error)?;
        let row = record.position().map_or(0, |p| p.line() as usize);
        let mut values = [0.0; 5];
        for (slot, (col, cell)) in values.iter_mut().zip(Column::ALL.iter().zip(record.iter())) {
            *slot = cell.trim().parse::<f64>().map_err(|_| Error::CsvCell {
                row,
                column: col.csv_name().to_string(),
                message: format!("not a number: `{cell}`"),
            })?;
        }
        let sample = Sample::from_values(values);
        sample
            .validate()
            .map_err(|message| Error::CsvRow { row, message })?;
        samples.push(sample);
    }
    if samples.is_empty() {
        return Err(Error::EmptyDataset);
    }
    Ok(Dataset {
        samples,
        provenance: provenance.into(),
    })
}

fn csv_error(err: csv::Error) -> Error {
    let row = err.position().map_or(0, |p| p.line() as usize);
    match err.into_kind() {
        csv::ErrorKind::Io(e) => Error::io("<csv>", e),
        csv::ErrorKind::UnequalLengths {
            expected_len, len, ..
        } => Error::CsvRow {
            row,
            message: format!("expected {expected_len} fields, found {len}"),
        },
        other => Error::CsvRow {
            row,
            message: format!("{other:?}"),
        },
    }
}

/// Canonical CSV text: LF line endings, shortest round-trip float formatting.
pub fn dataset_to_csv(ds: &Dataset) -> String {
    let mut out = String::with_capacity(ds.len() * 64);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for s in ds.samples() {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            s.sf_ratio, s.feed_temp, s.solvent_temp, s.rotation, s.product_flow
        );
    }
    out
}

pub fn write_csv(ds: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, dataset_to_csv(ds)).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Dataset> {
        read_csv(text.as_bytes(), "inline")
    }

    #[test]
    fn reads_rows_with_crlf() {
        let text = format!("{CSV_HEADER}\r\n1.5,80,85,30,12.5\r\n2,90,95,40,13\r\n");
        let ds = parse(&text).unwrap();
        assert_eq!(ds.len(), 2);
        assert_eq!(ds.samples()[1].rotation, 40.0);
    }

    #[test]
    fn header_only_is_empty() {
        let err = parse(&format!("{CSV_HEADER}\n")).unwrap_err();
        assert!(matches!(err, Error::EmptyDataset));
        assert_eq!(err.to_string(), "empty dataset");
        assert!(matches!(parse(""), Err(Error::EmptyDataset)));
    }

    #[test]
    fn renamed_column_rejected() {
        let err = parse("sf_ratio,feed_temp,solvent_temp_c,rotation_rpm,product_flow_m3hr\n1,2,3,4,5\n")
            .unwrap_err();
        assert!(matches!(err, Error::CsvHeader { .. }));
    }

    #[test]
    fn non_numeric_cell_names_row_and_column() {
        let err = parse(&format!("{CSV_HEADER}\n1,2,3,4,5\n1,abc,3,4,5\n")).unwrap_err();
        match err {
            Error::CsvCell { row, column, .. } => {
                assert_eq!(row, 3);
                assert_eq!(column, "feed_temp_c");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn zero_flow_names_row() {
        let err = parse(&format!("{CSV_HEADER}\n1,2,3,4,5\n1,2,3,4,0\n")).unwrap_err();
        match err {
            Error::CsvRow { row, message } => {
                assert_eq!(row, 3);
                assert!(message.contains("product_flow_m3hr"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn short_row_rejected() {
        let err = parse(&format!("{CSV_HEADER}\n1,2,3,4\n")).unwrap_err();
        assert!(matches!(err, Error::CsvRow { row: 2, .. }), "{err:?}");
    }

    #[test]
    fn missing_file_is_io_error() {
        let err = load_csv("/definitely/not/here.csv").unwrap_err();
        assert_eq!(err.kind(), crate::ErrorKind::Io);
        assert!(err.to_string().contains("/definitely/not/here.csv"));
    }

    #[test]
    fn text_round_trip() {
        let text = format!("{CSV_HEADER}\n1.25,80.5,85,30,12.345678901234567\n");
        let ds = parse(&text).unwrap();
        assert_eq!(dataset_to_csv(&ds), text);
    }
}
