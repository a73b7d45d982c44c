//! Result records and CSV tables.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use crate::CliError;

/// Numeric table written with 17 significant digits.
#[derive(Clone, Debug, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(|x| format!("{x:.16e}")))
                .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii csv")
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let mut r = csv::Reader::from_path(path)
            .map_err(|e| CliError::Parse(path.to_path_buf(), e.to_string()))?;
        let header = r
            .headers()
            .map_err(|e| CliError::Parse(path.to_path_buf(), e.to_string()))?
            .iter()
            .map(str::to_string)
            .collect();
        let mut rows = Vec::new();
        for rec in r.records() {
            let rec = rec.map_err(|e| CliError::Parse(path.to_path_buf(), e.to_string()))?;
            let row = rec
                .iter()
                .map(|f| f.trim().parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| CliError::Parse(path.to_path_buf(), e.to_string()))?;
            rows.push(row);
        }
        Ok(Self { header, rows })
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }
}

#[derive(Serialize)]
pub struct ResultRecord<'a, C: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub config: &'a C,
    pub results: Value,
    pub wall_time_s: f64,
}

/// Writes `<base>.json` plus `<base><suffix>.csv` per table, or prints the
/// JSON record when no base path is given.
pub fn emit<C: Serialize>(
    record: &ResultRecord<C>,
    tables: &[(&str, &Table)],
    out: Option<&Path>,
) -> Result<(), CliError> {
    let json = serde_json::to_string_pretty(record).expect("serializable record") + "\n";
    let Some(base) = out else {
        print!("{json}");
        return Ok(());
    };
    if let Some(dir) = base.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::Io(dir.to_path_buf(), e))?;
    }
    write(&with_suffix(base, ".json"), &json)?;
    for (suffix, table) in tables {
        write(
            &with_suffix(base, &format!("{suffix}.csv")),
            &table.to_csv(),
        )?;
    }
    Ok(())
}

pub fn with_suffix(base: &Path, suffix: &str) -> PathBuf {
    let mut s = base.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

pub fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Io(path.to_path_buf(), e))
}
