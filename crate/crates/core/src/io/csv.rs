use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Time series of domain-averaged quantities, one row per recorded sample.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TimeSeries {
    pub names: Vec<String>,
    pub rows: Vec<(f64, Vec<f64>)>,
}

impl TimeSeries {
    pub fn new(names: Vec<String>) -> Self {
        TimeSeries { names, rows: Vec::new() }
    }

    pub fn push(&mut self, t: f64, values: Vec<f64>) -> Result<()> {
        if values.len() != self.names.len() {
            return Err(Error::Dimension(format!("{} values for {} columns", values.len(), self.names.len())));
        }
        self.rows.push((t, values));
        Ok(())
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.names.iter().position(|n| n == name)?;
        Some(self.rows.iter().map(|(_, v)| v[k]).collect())
    }
}

/// Header `t,<names>` followed by one line per row. Numbers use the shortest representation
/// that parses back to the same value.
pub fn csv_string(series: &TimeSeries) -> Result<String> {
    if let Some(bad) = series.names.iter().find(|n| n.contains([',', '\n', '"'])) {
        return Err(Error::Invalid(format!("column name '{bad}' cannot be written to CSV")));
    }
    let mut out = String::new();
    writeln!(out, "t,{}", series.names.join(",")).unwrap();
    for (t, values) in &series.rows {
        if values.len() != series.names.len() {
            return Err(Error::Dimension("row length differs from the header".into()));
        }
        write!(out, "{t:e}").unwrap();
        for v in values {
            write!(out, ",{v:e}").unwrap();
        }
        out.push('\n');
    }
    Ok(out)
}

pub fn write_csv_timeseries(series: &TimeSeries, path: &std::path::Path) -> Result<()> {
    let text = csv_string(series)?;
    std::fs::write(path, text).map_err(|e| Error::from(e).context(path.display().to_string()))
}

pub fn parse_csv_timeseries(text: &str) -> Result<TimeSeries> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| Error::Parse { line: 1, msg: "empty file".into() })?;
    let mut cols = header.split(',');
    if cols.next() != Some("t") {
        return Err(Error::Parse { line: 1, msg: "header must start with 't'".into() });
    }
    let mut series = TimeSeries::new(cols.map(str::to_string).collect());
    for (i, line) in lines {
        if line.is_empty() {
            continue;
        }
        let vals: Vec<f64> = line
            .split(',')
            .map(|v| v.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse { line: i + 1, msg: e.to_string() })?;
        if vals.len() != series.names.len() + 1 {
            return Err(Error::Parse { line: i + 1, msg: "column count differs from the header".into() });
        }
        series.rows.push((vals[0], vals[1..].to_vec()));
    }
    Ok(series)
}
