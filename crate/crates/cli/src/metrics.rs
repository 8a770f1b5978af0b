//! Tidy per-run metrics rows and the append-only CSV sink.

use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub schema_version: u32,
    pub point: usize,
    pub repeat: usize,
    pub seed: u64,
    pub family: String,
    pub dim: usize,
    pub alpha: f64,
    pub big_a: f64,
    pub noise: String,
    pub n: usize,
    pub epsilon: f64,
    pub oracle: String,
    pub final_angle: f64,
    pub final_01_error: f64,
    pub error_budget: f64,
    pub rounds_used: usize,
    pub samples_used: usize,
    pub cert_value: Option<f64>,
    pub stop_reason: String,
}

/// Writes rows in `(point, repeat)` order no matter which finishes first,
/// flushing each row as soon as everything before it is on disk.
pub struct OrderedCsv {
    writer: csv::Writer<File>,
    next: usize,
    pending: BTreeMap<usize, MetricsRow>,
}

impl OrderedCsv {
    /// Truncates `path` and writes the header.
    pub fn create(path: &Path) -> Result<Self, CliError> {
        let file = OpenOptions::new().create(true).write(true).truncate(true).open(path)?;
        Ok(Self { writer: csv::Writer::from_writer(file), next: 0, pending: BTreeMap::new() })
    }

    pub fn submit(&mut self, index: usize, row: MetricsRow) -> Result<(), CliError> {
        self.pending.insert(index, row);
        while let Some(row) = self.pending.remove(&self.next) {
            self.writer.serialize(&row)?;
            self.writer.flush()?;
            self.next += 1;
        }
        Ok(())
    }

    pub fn written(&self) -> usize {
        self.next
    }
}

pub fn read_rows(path: &Path) -> Result<Vec<MetricsRow>, CliError> {
    let mut rdr = csv::Reader::from_path(path)?;
    rdr.deserialize().map(|r| r.map_err(CliError::from)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(point: usize) -> MetricsRow {
        MetricsRow {
            schema_version: SCHEMA_VERSION,
            point,
            repeat: 0,
            seed: 1,
            family: "standard_gaussian".into(),
            dim: 5,
            alpha: 0.5,
            big_a: 1.0,
            noise: "constant_rate".into(),
            n: 1000,
            epsilon: 0.15,
            oracle: "well_behaved".into(),
            final_angle: 0.1,
            final_01_error: 0.03,
            error_budget: 0.2,
            rounds_used: 3,
            samples_used: 1000,
            cert_value: None,
            stop_reason: "oracle_fail".into(),
        }
    }

    #[test]
    fn out_of_order_rows_land_in_order() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.csv");
        let mut w = OrderedCsv::create(&p).unwrap();
        w.submit(1, row(1)).unwrap();
        assert_eq!(w.written(), 0);
        w.submit(0, row(0)).unwrap();
        assert_eq!(w.written(), 2);
        let rows = read_rows(&p).unwrap();
        assert_eq!(rows.iter().map(|r| r.point).collect::<Vec<_>>(), vec![0, 1]);
        let text = std::fs::read_to_string(&p).unwrap();
        assert!(text.starts_with("schema_version,point,repeat,"));
    }
}
