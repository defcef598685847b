//! CSV ingestion and serialization of datasets.
//!
//! Row numbers in errors count data rows from 1, excluding the header.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use fairgroup_core::{Dataset, DatasetError, FeatureSpec, Kind, Role};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CsvError {
    #[error("missing column `{0}`")]
    MissingColumn(String),
    #[error("row {row}, column `{column}`: cannot parse `{value}` as a number")]
    ParseError {
        row: usize,
        column: String,
        value: String,
    },
    #[error("file has no header or no data rows")]
    EmptyFile,
    #[error("row {row}, column `{column}`: binary column holds a value other than 0 or 1")]
    NonBinaryValue { column: String, row: usize },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
}

fn read_table<R: Read>(reader: R) -> Result<(Vec<String>, Vec<csv::StringRecord>), CsvError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(|h| h.trim().to_string()).collect();
    if header.iter().all(String::is_empty) {
        return Err(CsvError::EmptyFile);
    }
    let records = rdr.records().collect::<Result<Vec<_>, _>>()?;
    if records.is_empty() {
        return Err(CsvError::EmptyFile);
    }
    Ok((header, records))
}

fn parse_column(
    records: &[csv::StringRecord],
    idx: usize,
    spec: &FeatureSpec,
) -> Result<Vec<f64>, CsvError> {
    records
        .iter()
        .enumerate()
        .map(|(r, rec)| {
            let raw = rec.get(idx).unwrap_or("").trim();
            let v: f64 = raw.parse().map_err(|_| CsvError::ParseError {
                row: r + 1,
                column: spec.name.clone(),
                value: raw.to_string(),
            })?;
            if !v.is_finite() {
                return Err(CsvError::ParseError {
                    row: r + 1,
                    column: spec.name.clone(),
                    value: raw.to_string(),
                });
            }
            if spec.kind == Kind::Binary && v != 0.0 && v != 1.0 {
                return Err(CsvError::NonBinaryValue {
                    column: spec.name.clone(),
                    row: r + 1,
                });
            }
            Ok(v)
        })
        .collect()
}

/// Reads the columns named in `specs`, in spec order. Other columns are
/// ignored; row order is preserved.
pub fn read_csv<R: Read>(reader: R, specs: &[FeatureSpec]) -> Result<Dataset, CsvError> {
    let (header, records) = read_table(reader)?;
    let mut columns = Vec::with_capacity(specs.len());
    for spec in specs {
        let idx = header
            .iter()
            .position(|h| *h == spec.name)
            .ok_or_else(|| CsvError::MissingColumn(spec.name.clone()))?;
        columns.push(parse_column(&records, idx, spec)?);
    }
    Ok(Dataset::new(specs.to_vec(), columns)?)
}

pub fn load_csv(path: &Path, specs: &[FeatureSpec]) -> Result<Dataset, CsvError> {
    read_csv(File::open(path)?, specs)
}

/// Reads every column. `target` becomes the target; a column whose values
/// are all 0 or 1 is binary, anything else numeric.
pub fn read_csv_inferred<R: Read>(reader: R, target: &str) -> Result<Dataset, CsvError> {
    let (header, records) = read_table(reader)?;
    if !header.iter().any(|h| h == target) {
        return Err(CsvError::MissingColumn(target.to_string()));
    }
    let mut specs = Vec::with_capacity(header.len());
    let mut columns = Vec::with_capacity(header.len());
    for (idx, name) in header.iter().enumerate() {
        let numeric = FeatureSpec::unprotected(name.clone(), Kind::Numeric);
        let col = parse_column(&records, idx, &numeric)?;
        let binary = col.iter().all(|v| *v == 0.0 || *v == 1.0);
        let spec = if name == target {
            if !binary {
                let row = col.iter().position(|v| *v != 0.0 && *v != 1.0).unwrap_or(0);
                return Err(CsvError::NonBinaryValue {
                    column: name.clone(),
                    row: row + 1,
                });
            }
            FeatureSpec::new(name.clone(), Role::Target, Kind::Binary)
        } else if binary {
            FeatureSpec::unprotected(name.clone(), Kind::Binary)
        } else {
            numeric
        };
        specs.push(spec);
        columns.push(col);
    }
    Ok(Dataset::new(specs, columns)?)
}

pub fn load_csv_inferred(path: &Path, target: &str) -> Result<Dataset, CsvError> {
    read_csv_inferred(File::open(path)?, target)
}

/// Writes a header and one row per point. Values use the shortest decimal
/// form that parses back to the same number.
pub fn write_csv<W: Write>(d: &Dataset, writer: W) -> Result<(), CsvError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(d.specs().iter().map(|s| s.name.as_str()))?;
    for r in 0..d.len() {
        w.write_record(d.columns().iter().map(|c| c[r].to_string()))?;
    }
    w.flush()?;
    Ok(())
}

pub fn save_csv(d: &Dataset, path: &Path) -> Result<(), CsvError> {
    write_csv(d, File::create(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn specs() -> Vec<FeatureSpec> {
        vec![
            FeatureSpec::unprotected("age", Kind::Numeric),
            FeatureSpec::unprotected("income", Kind::Numeric),
            FeatureSpec::target("target"),
        ]
    }

    #[test]
    fn loads_three_rows() {
        let text = "age,income,target\n30,15000,1\n40,25000,0\n50,8000,1\n";
        let d = read_csv(text.as_bytes(), &specs()).unwrap();
        assert_eq!(d.len(), 3);
        assert_eq!(d.column("income").unwrap(), &[15000.0, 25000.0, 8000.0]);
    }

    #[test]
    fn missing_column() {
        let text = "age,target\n30,1\n";
        assert!(matches!(
            read_csv(text.as_bytes(), &specs()),
            Err(CsvError::MissingColumn(c)) if c == "income"
        ));
    }

    #[test]
    fn non_binary_target() {
        let text = "age,income,target\n30,1,1\n31,2,2\n";
        assert!(matches!(
            read_csv(text.as_bytes(), &specs()),
            Err(CsvError::NonBinaryValue { column, row: 2 }) if column == "target"
        ));
    }

    #[test]
    fn parse_error_and_missing_value() {
        let text = "age,income,target\n30,abc,1\n";
        assert!(matches!(
            read_csv(text.as_bytes(), &specs()),
            Err(CsvError::ParseError { row: 1, .. })
        ));
        let text = "age,income,target\n30,,1\n";
        assert!(matches!(
            read_csv(text.as_bytes(), &specs()),
            Err(CsvError::ParseError { row: 1, .. })
        ));
    }

    #[test]
    fn empty_file() {
        assert!(matches!(read_csv("".as_bytes(), &specs()), Err(CsvError::EmptyFile)));
        assert!(matches!(
            read_csv("age,income,target\n".as_bytes(), &specs()),
            Err(CsvError::EmptyFile)
        ));
    }

    #[test]
    fn round_trip() {
        let text = "age,income,target\n30.25,15000,1\n40,0.1,0\n";
        let d = read_csv(text.as_bytes(), &specs()).unwrap();
        let mut buf = Vec::new();
        write_csv(&d, &mut buf).unwrap();
        assert_eq!(read_csv(buf.as_slice(), &specs()).unwrap(), d);
    }

    #[test]
    fn inferred_kinds() {
        let text = "x,flag,y\n1.5,0,1\n2,1,0\n";
        let d = read_csv_inferred(text.as_bytes(), "y").unwrap();
        assert_eq!(d.specs()[0].kind, Kind::Numeric);
        assert_eq!(d.specs()[1].kind, Kind::Binary);
        assert_eq!(d.target_name(), "y");
    }
}
