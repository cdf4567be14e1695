//! CSV ingestion for samples, distance tables and discrete laws.

use std::io::Read;

use crate::error::{DcovError, Result};
use crate::estimators::PairedSample;
use crate::metric::{MetricSpec, Point};
use crate::population::DiscreteJoint;

/// Which columns of a table to use.
///
/// Parsed from text: `a:b` is the half-open 0-based index range, a bare
/// integer is one index, anything else is a comma-separated list of header
/// names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColumnSelection {
    Names(Vec<String>),
    Range { start: usize, end: usize },
}

impl ColumnSelection {
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = |m: String| DcovError::InvalidParameter(format!("column selection {s:?}: {m}"));
        if s.is_empty() {
            return Err(bad("empty".into()));
        }
        if let Some((a, b)) = s.split_once(':') {
            if let (Ok(start), Ok(end)) = (a.trim().parse::<usize>(), b.trim().parse::<usize>()) {
                if end <= start {
                    return Err(bad("range is empty".into()));
                }
                return Ok(ColumnSelection::Range { start, end });
            }
        }
        if let Ok(i) = s.parse::<usize>() {
            return Ok(ColumnSelection::Range { start: i, end: i + 1 });
        }
        let names: Vec<String> = s.split(',').map(|n| n.trim().to_string()).collect();
        if names.iter().any(String::is_empty) {
            return Err(bad("empty column name".into()));
        }
        Ok(ColumnSelection::Names(names))
    }

    fn indices(&self, headers: &[String]) -> Result<Vec<usize>> {
        match self {
            ColumnSelection::Range { start, end } => {
                if *end > headers.len() {
                    return Err(DcovError::Input {
                        location: "header".into(),
                        message: format!("column range {start}:{end} exceeds {} columns", headers.len()),
                    });
                }
                Ok((*start..*end).collect())
            }
            ColumnSelection::Names(names) => names
                .iter()
                .map(|n| {
                    headers.iter().position(|h| h == n).ok_or_else(|| DcovError::Input {
                        location: "header".into(),
                        message: format!("missing column {n:?}"),
                    })
                })
                .collect(),
        }
    }
}

/// A numeric CSV table with a header row.
#[derive(Debug, Clone, PartialEq)]
pub struct NumericTable {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

fn parse_cell(field: &str, row: usize, col: usize) -> Result<f64> {
    let v: f64 = field.trim().parse().map_err(|_| DcovError::Input {
        location: format!("row {row}, column {col}"),
        message: format!("cannot parse {field:?} as a number"),
    })?;
    if !v.is_finite() {
        return Err(DcovError::Input { location: format!("row {row}, column {col}"), message: "non-finite value".into() });
    }
    Ok(v)
}

fn csv_err(e: csv::Error) -> DcovError {
    let location = e
        .position()
        .map(|p| format!("line {}", p.line()))
        .unwrap_or_else(|| "input".into());
    DcovError::Input { location, message: e.to_string() }
}

impl NumericTable {
    /// Reads a table whose first row is the header. Row numbers in error
    /// messages are 1-based data rows.
    pub fn read<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
        let headers: Vec<String> = rdr.headers().map_err(csv_err)?.iter().map(str::to_string).collect();
        if headers.is_empty() || headers.iter().all(String::is_empty) {
            return Err(DcovError::Input { location: "header".into(), message: "missing header row".into() });
        }
        let mut rows = Vec::new();
        for (r, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(csv_err)?;
            let row = rec.iter().enumerate().map(|(c, f)| parse_cell(f, r + 1, c)).collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        Ok(NumericTable { headers, rows })
    }

    pub fn select(&self, sel: &ColumnSelection) -> Result<Vec<Vec<f64>>> {
        let idx = sel.indices(&self.headers)?;
        Ok(self.rows.iter().map(|r| idx.iter().map(|&i| r[i]).collect()).collect())
    }
}

/// Reads paired Euclidean observations, one row per pair.
pub fn read_paired_sample<R: Read>(
    reader: R,
    x_cols: &ColumnSelection,
    y_cols: &ColumnSelection,
    beta: f64,
) -> Result<PairedSample> {
    let t = NumericTable::read(reader)?;
    PairedSample::euclidean(t.select(x_cols)?, t.select(y_cols)?, beta)
}

/// Reads a single block of columns, for one-sided diagnostics.
pub fn read_points<R: Read>(reader: R, cols: &ColumnSelection) -> Result<Vec<Vec<f64>>> {
    NumericTable::read(reader)?.select(cols)
}

/// Reads a square distance table. A first row that does not parse as
/// numbers is treated as a header.
pub fn read_metric_table<R: Read>(reader: R) -> Result<Vec<Vec<f64>>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(reader);
    let mut rows = Vec::new();
    for (r, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        if r == 0 && rec.iter().any(|f| f.parse::<f64>().is_err()) {
            continue;
        }
        rows.push(rec.iter().enumerate().map(|(c, f)| parse_cell(f, r + 1, c)).collect::<Result<Vec<_>>>()?);
    }
    Ok(rows)
}

/// Reads a finite joint law from columns `x_*`, `y_*` and `prob`. Weights
/// within 1e-6 of summing to one are renormalized.
pub fn read_joint<R: Read>(reader: R, beta: f64) -> Result<DiscreteJoint> {
    let t = NumericTable::read(reader)?;
    let pick = |prefix: &str| -> Vec<usize> {
        t.headers.iter().enumerate().filter(|(_, h)| h.starts_with(prefix)).map(|(i, _)| i).collect()
    };
    let (xi, yi) = (pick("x"), pick("y"));
    let pi = t.headers.iter().position(|h| h == "prob" || h == "p");
    let Some(pi) = pi else {
        return Err(DcovError::Input { location: "header".into(), message: "missing prob column".into() });
    };
    if xi.is_empty() || yi.is_empty() {
        return Err(DcovError::Input { location: "header".into(), message: "need x* and y* columns".into() });
    }
    let total: f64 = t.rows.iter().map(|r| r[pi]).sum();
    if (total - 1.0).abs() > 1e-6 {
        return Err(DcovError::InvalidProbabilities(format!("weights sum to {total}, not 1")));
    }
    let atoms = t
        .rows
        .iter()
        .map(|r| (Point::Coords(xi.iter().map(|&i| r[i]).collect()), Point::Coords(yi.iter().map(|&i| r[i]).collect())))
        .collect();
    let probs = t.rows.iter().map(|r| r[pi] / total).collect();
    DiscreteJoint::new(atoms, probs, MetricSpec::euclidean(xi.len(), beta)?, MetricSpec::euclidean(yi.len(), beta)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selection_parsing() {
        assert_eq!(ColumnSelection::parse("0:2").unwrap(), ColumnSelection::Range { start: 0, end: 2 });
        assert_eq!(ColumnSelection::parse("3").unwrap(), ColumnSelection::Range { start: 3, end: 4 });
        assert_eq!(
            ColumnSelection::parse("a, b").unwrap(),
            ColumnSelection::Names(vec!["a".into(), "b".into()])
        );
        assert!(ColumnSelection::parse("2:2").is_err());
        assert!(ColumnSelection::parse("a,,b").is_err());
    }

    #[test]
    fn reads_sample() {
        let data = "a,b,c\n1,2,3\n4,5,6\n";
        let s = read_paired_sample(data.as_bytes(), &ColumnSelection::parse("0:2").unwrap(), &ColumnSelection::parse("c").unwrap(), 1.0).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.y_points()[1], Point::Coords(vec![6.0]));
    }

    #[test]
    fn reports_bad_cell() {
        let data = "a,b\n1,2\n3,oops\n";
        let err = NumericTable::read(data.as_bytes()).unwrap_err();
        match err {
            DcovError::Input { location, .. } => assert_eq!(location, "row 2, column 1"),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn missing_column() {
        let data = "a,b\n1,2\n";
        let t = NumericTable::read(data.as_bytes()).unwrap();
        assert!(t.select(&ColumnSelection::parse("z").unwrap()).is_err());
        assert!(t.select(&ColumnSelection::parse("1:3").unwrap()).is_err());
    }

    #[test]
    fn ragged_rows_rejected() {
        assert!(NumericTable::read("a,b\n1,2\n3\n".as_bytes()).is_err());
    }

    #[test]
    fn metric_table_header_optional() {
        let with = read_metric_table("p,q\n0,1\n1,0\n".as_bytes()).unwrap();
        let without = read_metric_table("0,1\n1,0\n".as_bytes()).unwrap();
        assert_eq!(with, without);
    }

    #[test]
    fn joint_file() {
        let data = "x,y,prob\n0,0,0.5\n1,1,0.5\n";
        let j = read_joint(data.as_bytes(), 1.0).unwrap();
        assert_eq!(j.len(), 2);
        assert!(read_joint("x,y,prob\n0,0,0.4\n1,1,0.4\n".as_bytes(), 1.0).is_err());
    }
}
