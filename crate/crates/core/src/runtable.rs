//! Run tables: one row per embedding variant, named metric columns, missing
//! cells tracked. CSV form: first column `variant_id`, remaining columns
//! named metrics, empty cell = missing.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default)]
pub struct RunTable {
    pub columns: Vec<String>,
    pub rows: Vec<RunRow>,
}

#[derive(Debug, Clone)]
pub struct RunRow {
    pub variant_id: String,
    /// Parallel to `RunTable::columns`.
    pub values: Vec<Option<f64>>,
}

impl RunTable {
    pub fn new(columns: Vec<String>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn column_index(&self, name: &str) -> Result<usize> {
        self.columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))
    }

    /// Append a row given a metric-name map; metrics missing from the map
    /// become missing cells.
    pub fn push_row(&mut self, variant_id: &str, metrics: &BTreeMap<String, f64>) -> Result<()> {
        if self.rows.iter().any(|r| r.variant_id == variant_id) {
            return Err(Error::DuplicateVariantId(variant_id.to_string()));
        }
        let values = self
            .columns
            .iter()
            .map(|c| metrics.get(c).copied())
            .collect();
        self.rows.push(RunRow {
            variant_id: variant_id.to_string(),
            values,
        });
        Ok(())
    }

    /// Complete (x, y) pairs for two columns, in row order.
    pub fn paired_column_values(&self, x: &str, y: &str) -> Result<Vec<(String, f64, f64)>> {
        let xi = self.column_index(x)?;
        let yi = self.column_index(y)?;
        Ok(self
            .rows
            .iter()
            .filter_map(|r| match (r.values[xi], r.values[yi]) {
                (Some(a), Some(b)) => Some((r.variant_id.clone(), a, b)),
                _ => None,
            })
            .collect())
    }

    pub fn from_csv_reader<R: Read>(source: R) -> Result<Self> {
        let mut reader = csv::Reader::from_reader(source);
        let headers = reader.headers()?.clone();
        if headers.is_empty() || headers.get(0) != Some("variant_id") {
            return Err(Error::InvalidParameter(
                "run table must start with a variant_id column".into(),
            ));
        }
        let columns: Vec<String> = headers.iter().skip(1).map(String::from).collect();
        let mut table = Self::new(columns);
        for record in reader.records() {
            let record = record?;
            let id = record.get(0).unwrap_or_default().to_string();
            let mut values = Vec::with_capacity(table.columns.len());
            for i in 0..table.columns.len() {
                let cell = record.get(i + 1).unwrap_or_default();
                if cell.is_empty() {
                    values.push(None);
                } else {
                    let v: f64 = cell.parse().map_err(|_| {
                        Error::InvalidParameter(format!("bad cell '{cell}' in row '{id}'"))
                    })?;
                    if !v.is_finite() {
                        return Err(Error::InvalidParameter(format!(
                            "non-finite cell in row '{id}'"
                        )));
                    }
                    values.push(Some(v));
                }
            }
            if table.rows.iter().any(|r| r.variant_id == id) {
                return Err(Error::DuplicateVariantId(id));
            }
            table.rows.push(RunRow {
                variant_id: id,
                values,
            });
        }
        Ok(table)
    }

    pub fn from_csv_file(path: &Path) -> Result<Self> {
        Self::from_csv_reader(std::fs::File::open(path)?)
    }

    pub fn to_csv_writer<W: Write>(&self, sink: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(sink);
        let mut header = vec!["variant_id".to_string()];
        header.extend(self.columns.clone());
        w.write_record(&header)?;
        for row in &self.rows {
            let mut record = vec![row.variant_id.clone()];
            for v in &row.values {
                record.push(v.map(|x| x.to_string()).unwrap_or_default());
            }
            w.write_record(&record)?;
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip_with_missing_cells() {
        let mut table = RunTable::new(vec!["weat".into(), "rnsb".into()]);
        let mut m = BTreeMap::new();
        m.insert("weat".to_string(), 0.5);
        m.insert("rnsb".to_string(), 0.25);
        table.push_row("v1", &m).unwrap();
        let mut m = BTreeMap::new();
        m.insert("weat".to_string(), -0.75);
        table.push_row("v2", &m).unwrap();

        let mut buf = Vec::new();
        table.to_csv_writer(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("variant_id,weat,rnsb\n"));
        assert!(text.contains("v2,-0.75,\n"));

        let back = RunTable::from_csv_reader(buf.as_slice()).unwrap();
        assert_eq!(back.columns, table.columns);
        assert_eq!(back.rows[1].values[1], None);
        assert_eq!(back.rows[0].values[0], Some(0.5));
    }

    #[test]
    fn duplicate_ids_rejected() {
        let mut table = RunTable::new(vec!["m".into()]);
        let m: BTreeMap<String, f64> = [("m".to_string(), 1.0)].into();
        table.push_row("v", &m).unwrap();
        assert!(matches!(
            table.push_row("v", &m).unwrap_err(),
            Error::DuplicateVariantId(_)
        ));
    }

    #[test]
    fn paired_values_drop_incomplete_rows() {
        let csv = "variant_id,a,b\nv1,1,2\nv2,3,\nv3,5,6\n";
        let table = RunTable::from_csv_reader(csv.as_bytes()).unwrap();
        let pairs = table.paired_column_values("a", "b").unwrap();
        assert_eq!(pairs.len(), 2);
        assert_eq!(pairs[0].0, "v1");
        assert_eq!(pairs[1], ("v3".to_string(), 5.0, 6.0));
        assert!(table.paired_column_values("a", "zzz").is_err());
    }
}
