//! Report CSV (`method,filter,cutoff_percent,phrase_count,accuracy`) and the
//! significance CSV.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::eval::{ExperimentResult, Filtering, Method, Significance};

pub const REPORT_COLUMNS: [&str; 5] = ["method", "filter", "cutoff_percent", "phrase_count", "accuracy"];

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => io.into(),
        other => Error::parse(line, format!("{other:?}")),
    }
}

/// Writes results in the order given.
pub fn write_report<W: Write>(out: W, results: &[ExperimentResult]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(REPORT_COLUMNS).map_err(csv_error)?;
    for r in results {
        w.write_record([
            r.method.to_string(),
            r.filter.to_string(),
            r.cutoff_percent.to_string(),
            r.phrase_count.to_string(),
            r.accuracy.to_string(),
        ])
        .map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a report back. Per-dialogue accuracies are not part of the file
/// and come back empty.
pub fn parse_report<R: Read>(input: R) -> Result<Vec<ExperimentResult>> {
    let mut reader = csv::Reader::from_reader(input);
    let headers = reader.headers().map_err(csv_error)?.clone();
    if headers.iter().ne(REPORT_COLUMNS) {
        return Err(Error::parse(1, format!("expected header {}", REPORT_COLUMNS.join(","))));
    }
    let mut results = Vec::new();
    for record in reader.records() {
        let record = record.map_err(csv_error)?;
        let n = record.position().map_or(0, |p| p.line() as usize);
        let number = |i: usize| -> Result<f64> {
            record[i]
                .parse()
                .map_err(|_| Error::parse(n, format!("{}: bad number {:?}", REPORT_COLUMNS[i], &record[i])))
        };
        results.push(ExperimentResult {
            method: record[0].parse::<Method>().map_err(|e| Error::parse(n, e.to_string()))?,
            filter: record[1].parse::<Filtering>().map_err(|e| Error::parse(n, e.to_string()))?,
            cutoff_percent: number(2)?,
            phrase_count: record[3]
                .parse()
                .map_err(|_| Error::parse(n, format!("phrase_count: bad count {:?}", &record[3])))?,
            accuracy: number(4)?,
            per_dialogue: Vec::new(),
        });
    }
    Ok(results)
}

pub const SIGNIFICANCE_COLUMNS: [&str; 9] = [
    "method",
    "filter",
    "cutoff_percent",
    "baseline",
    "t",
    "df",
    "p_value",
    "significant",
    "note",
];

/// One row per comparison; statistics are left empty when the test could
/// not be run, with the reason in `note`.
pub fn write_significance<W: Write>(out: W, rows: &[Significance]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SIGNIFICANCE_COLUMNS).map_err(csv_error)?;
    for row in rows {
        let (t, df, p, verdict, note) = match &row.test {
            Ok(r) => (
                r.t.to_string(),
                r.df.to_string(),
                r.p_value.to_string(),
                r.significant.to_string(),
                String::new(),
            ),
            Err(reason) => (String::new(), String::new(), String::new(), String::new(), reason.clone()),
        };
        w.write_record([
            row.method.to_string(),
            row.filter.to_string(),
            row.cutoff_percent.to_string(),
            row.baseline.to_string(),
            t,
            df,
            p,
            verdict,
            note,
        ])
        .map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}
