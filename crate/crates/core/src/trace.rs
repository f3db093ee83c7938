//! Column-oriented time series written as CSV.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::manifold::ManifoldSpec;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TraceRecord {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl TraceRecord {
    pub fn new(columns: Vec<String>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
        }
    }

    /// Header used by free-evolution scans.
    pub fn evolution_columns(spec: &ManifoldSpec) -> Vec<String> {
        let mut cols = vec!["t_au".to_string(), "t_si_ns".to_string()];
        cols.extend(spec.j_range().map(|k| format!("k={k}")));
        cols.push("autocorr".to_string());
        cols
    }

    /// Header used while a field is on.
    pub fn pulse_columns(spec: &ManifoldSpec) -> Vec<String> {
        let mut cols = vec!["t_au".to_string(), "pop_g".to_string(), "pop_e".to_string()];
        cols.extend(spec.j_range().map(|k| format!("k={k}")));
        cols.push("norm_error".to_string());
        cols
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }

    pub fn extend(&mut self, other: TraceRecord) {
        debug_assert_eq!(self.columns, other.columns);
        self.rows.extend(other.rows);
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|v| v.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let spec = ManifoldSpec::new(180, 2).unwrap();
        let mut t = TraceRecord::new(TraceRecord::evolution_columns(&spec));
        t.push(vec![0.0, 0.0, 1.0, 0.0, 1.0]);
        let s = t.to_csv_string().unwrap();
        assert_eq!(s, "t_au,t_si_ns,k=0,k=1,autocorr\n0,0,1,0,1\n");
        assert_eq!(t.column("k=0").unwrap(), vec![1.0]);
    }
}
