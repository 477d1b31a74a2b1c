use std::fs::File;
use std::path::Path;

use crate::error::{Error, Result};
use crate::problem::{LabeledSample, TestSample};
use crate::simlab::ExperimentReport;

struct Layout {
    x: Vec<usize>,
    y: Option<usize>,
    c: usize,
}

fn layout(headers: &csv::StringRecord, what: &str, need_y: bool) -> Result<Layout> {
    let find = |name: &str| headers.iter().position(|h| h.trim() == name);
    let mut x = Vec::new();
    while let Some(i) = find(&format!("x_{}", x.len() + 1)) {
        x.push(i);
    }
    if x.is_empty() {
        return Err(Error::Csv(format!("{what} CSV missing column 'x_1'")));
    }
    for h in headers.iter() {
        let h = h.trim();
        let known = h == "y" || h == "c" || (h.starts_with("x_") && h[2..].parse::<usize>().is_ok_and(|k| k >= 1 && k <= x.len()));
        if !known {
            return Err(Error::Csv(format!("{what} CSV has unexpected column '{h}'")));
        }
    }
    let y = find("y");
    if need_y && y.is_none() {
        return Err(Error::Csv(format!("{what} CSV missing column 'y'")));
    }
    let c = find("c").ok_or_else(|| Error::Csv(format!("{what} CSV missing column 'c'")))?;
    Ok(Layout { x, y, c })
}

fn cell(record: &csv::StringRecord, i: usize, name: &str, row: usize, what: &str) -> Result<f64> {
    let raw = record
        .get(i)
        .ok_or_else(|| Error::Csv(format!("{what} CSV row {row}: missing cell '{name}'")))?;
    let v: f64 = raw
        .trim()
        .parse()
        .map_err(|_| Error::Csv(format!("{what} CSV row {row}, column '{name}': cannot parse '{raw}'")))?;
    if !v.is_finite() {
        return Err(Error::Csv(format!("{what} CSV row {row}, column '{name}': non-finite value")));
    }
    Ok(v)
}

/// `(x, y, c)` per data row.
type Row = (Vec<f64>, Option<f64>, f64);

fn rows(path: &Path, what: &str, need_y: bool) -> Result<Vec<Row>> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| Error::Csv(format!("{}: {e}", path.display())))?;
    let headers = reader.headers().map_err(|e| Error::Csv(e.to_string()))?.clone();
    let lay = layout(&headers, what, need_y)?;
    let mut out = Vec::new();
    for (r, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Csv(format!("{what} CSV: {e}")))?;
        let row = r + 1;
        let x = lay
            .x
            .iter()
            .enumerate()
            .map(|(k, &i)| cell(&record, i, &format!("x_{}", k + 1), row, what))
            .collect::<Result<Vec<_>>>()?;
        let y = lay.y.map(|i| cell(&record, i, "y", row, what)).transpose()?;
        let c = cell(&record, lay.c, "c", row, what)?;
        out.push((x, y, c));
    }
    Ok(out)
}

/// Reads columns `x_1..x_d, y, c`; `d` comes from the header.
pub fn read_labeled(path: &Path) -> Result<Vec<LabeledSample>> {
    Ok(rows(path, "labeled", true)?
        .into_iter()
        .map(|(x, y, c)| LabeledSample::new(x, y.expect("required column"), c))
        .collect())
}

/// Reads columns `x_1..x_d, c` and an optional ground-truth `y`.
pub fn read_test(path: &Path) -> Result<Vec<TestSample>> {
    Ok(rows(path, "test", false)?
        .into_iter()
        .map(|(x, y, c)| TestSample { x, c, y_hidden: y })
        .collect())
}

fn header(d: usize, tail: &[&str]) -> Vec<String> {
    (1..=d)
        .map(|k| format!("x_{k}"))
        .chain(tail.iter().map(|s| s.to_string()))
        .collect()
}

fn writer(path: &Path) -> Result<csv::Writer<File>> {
    csv::Writer::from_path(path).map_err(|e| Error::Csv(format!("{}: {e}", path.display())))
}

fn csv_err(e: csv::Error) -> Error {
    Error::Csv(e.to_string())
}

/// Shortest representation that parses back to the same value.
fn num(v: f64) -> String {
    format!("{v:?}")
}

pub fn write_labeled(path: &Path, data: &[LabeledSample]) -> Result<()> {
    let d = data.first().map_or(0, |s| s.x.len());
    let mut w = writer(path)?;
    w.write_record(header(d, &["y", "c"])).map_err(csv_err)?;
    for s in data {
        let rec = s.x.iter().chain([&s.y, &s.c]).map(|&v| num(v));
        w.write_record(rec).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes the `y` column only when every row carries ground truth.
pub fn write_test(path: &Path, data: &[TestSample]) -> Result<()> {
    let d = data.first().map_or(0, |s| s.x.len());
    let with_y = !data.is_empty() && data.iter().all(|t| t.y_hidden.is_some());
    let mut w = writer(path)?;
    let tail: &[&str] = if with_y { &["c", "y"] } else { &["c"] };
    w.write_record(header(d, tail)).map_err(csv_err)?;
    for t in data {
        let mut rec: Vec<String> = t.x.iter().map(|&v| num(v)).collect();
        rec.push(num(t.c));
        if with_y {
            rec.push(num(t.y_hidden.unwrap()));
        }
        w.write_record(rec).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// `procedure,q,rep,fdr,power,n_selected`, one row per replication.
pub fn write_results(path: &Path, report: &ExperimentReport) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["procedure", "q", "rep", "fdr", "power", "n_selected"])
        .map_err(csv_err)?;
    for r in &report.rows {
        w.write_record([
            r.procedure.clone(),
            num(r.q),
            r.rep.to_string(),
            num(r.fdr),
            num(r.power),
            r.n_selected.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    #[test]
    fn missing_y_is_named() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("l.csv");
        fs::write(&p, "x_1,x_2,c\n1,2,0\n").unwrap();
        let err = read_labeled(&p).unwrap_err().to_string();
        assert!(err.contains("'y'"), "{err}");
    }

    #[test]
    fn nan_cell_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("l.csv");
        fs::write(&p, "x_1,y,c\nNaN,1,0\n").unwrap();
        let err = read_labeled(&p).unwrap_err().to_string();
        assert!(err.contains("x_1"), "{err}");
    }

    #[test]
    fn round_trip_exact() {
        let dir = tempfile::tempdir().unwrap();
        let data = vec![
            LabeledSample::new(vec![0.1 + 0.2, -1e-300], 1.0 / 3.0, 0.0),
            LabeledSample::new(vec![f64::MAX, 5e-324], -0.0, 2.5),
        ];
        let p = dir.path().join("l.csv");
        write_labeled(&p, &data).unwrap();
        assert_eq!(read_labeled(&p).unwrap(), data);
        let test = vec![TestSample::new(vec![std::f64::consts::PI], 0.7)];
        let p = dir.path().join("t.csv");
        write_test(&p, &test).unwrap();
        assert_eq!(read_test(&p).unwrap(), test);
    }

    #[test]
    fn column_order_free() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.csv");
        fs::write(&p, "c,x_2,x_1\n0,2,1\n").unwrap();
        let t = read_test(&p).unwrap();
        assert_eq!(t[0].x, vec![1.0, 2.0]);
        fs::write(&p, "c,x_3,x_1\n0,2,1\n").unwrap();
        assert!(read_test(&p).is_err());
    }
}
