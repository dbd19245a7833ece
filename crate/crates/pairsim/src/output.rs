//! Delimited-text tables and key=value reports with a reproducibility header.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::CliError;

/// Fixed-precision scientific notation, identical across runs and platforms.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.12e}")
    } else {
        format!("{x}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    /// Column names carrying their unit suffix.
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn push_nums(&mut self, row: &[f64]) {
        self.push(row.iter().map(|&v| num(v)).collect());
    }

    pub fn render(&self, config_hash: &str, seed: u64) -> String {
        let mut s = format!(
            "# config_hash={config_hash} seed={seed} columns={}\n",
            self.columns.join(",")
        );
        for row in &self.rows {
            s.push_str(&row.join("\t"));
            s.push('\n');
        }
        s
    }
}

/// Ordered `key=value` lines.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub entries: Vec<(String, String)>,
}

impl Report {
    pub fn add(&mut self, key: impl Into<String>, value: impl ToString) {
        self.entries.push((key.into(), value.to_string()));
    }

    pub fn num(&mut self, key: impl Into<String>, value: f64) {
        self.add(key, num(value));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn get_f64(&self, key: &str) -> Option<f64> {
        self.get(key)?.parse().ok()
    }

    pub fn render(&self, config_hash: &str, seed: u64) -> String {
        let mut s = format!("# config_hash={config_hash} seed={seed}\n");
        for (k, v) in &self.entries {
            let _ = writeln!(s, "{k}={v}");
        }
        s
    }
}

pub fn write_file(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Data rows of a table file: every non-comment line split on whitespace.
pub fn read_table(path: &Path) -> Result<Vec<Vec<String>>, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(text
        .lines()
        .filter(|l| !l.trim_start().starts_with('#') && !l.trim().is_empty())
        .map(|l| l.split_whitespace().map(str::to_string).collect())
        .collect())
}

/// Writes every table as `<name>.dat`, the report as `<command>_report.txt` and the
/// resolved configuration as `effective_config.toml` into the configured directory.
pub fn write_outputs(
    cfg: &crate::config::RunConfig,
    command: &str,
    tables: &[Table],
    report: &Report,
) -> Result<Vec<std::path::PathBuf>, CliError> {
    let dir = cfg.out_dir();
    fs::create_dir_all(&dir).map_err(|source| CliError::Io {
        path: dir.display().to_string(),
        source,
    })?;
    let hash = cfg.hash()?;
    let mut written = Vec::new();
    for t in tables {
        let name = format!("{}.dat", t.name);
        write_file(&dir, &name, &t.render(&hash, cfg.seed))?;
        written.push(dir.join(name));
    }
    let name = format!("{command}_report.txt");
    write_file(&dir, &name, &report.render(&hash, cfg.seed))?;
    written.push(dir.join(name));
    write_file(&dir, "effective_config.toml", &cfg.to_toml()?)?;
    written.push(dir.join("effective_config.toml"));
    Ok(written)
}
