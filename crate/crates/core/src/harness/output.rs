use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::Result;

pub const LIBRARY_VERSION: &str = env!("CARGO_PKG_VERSION");

/// A CSV table preceded by `# key = value` metadata lines.
#[derive(Clone, Debug, PartialEq)]
pub struct CsvTable {
    /// Experiment name; also the output file stem.
    pub name: String,
    pub metadata: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(name: impl Into<String>, columns: &[&str]) -> Self {
        Self {
            name: name.into(),
            metadata: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.metadata.push((key.to_string(), value.to_string()));
        self
    }

    pub fn push_row(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn meta_value(&self, key: &str) -> Option<&str> {
        self.metadata.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    /// Parses column `name` of every row as `f64`.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        self.rows.iter().map(|r| r[i].parse().ok()).collect()
    }

    /// Hash of the experiment name and metadata, which echo the full config.
    pub fn config_hash(&self) -> String {
        config_hash(&self.name, &self.metadata)
    }

    /// `<name>-<hash>.csv`
    pub fn file_name(&self) -> String {
        format!("{}-{}.csv", self.name, self.config_hash())
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# experiment = {}", self.name);
        let _ = writeln!(s, "# s2scat_version = {LIBRARY_VERSION}");
        for (k, v) in &self.metadata {
            let _ = writeln!(s, "# {k} = {v}");
        }
        let _ = writeln!(s, "{}", self.columns.join(","));
        for r in &self.rows {
            let _ = writeln!(s, "{}", r.join(","));
        }
        s
    }

    /// Writes the table into `dir` under [`file_name`](Self::file_name).
    pub fn write_into(&self, dir: impl AsRef<Path>) -> Result<PathBuf> {
        std::fs::create_dir_all(dir.as_ref())?;
        let path = dir.as_ref().join(self.file_name());
        std::fs::write(&path, self.render())?;
        Ok(path)
    }
}

/// First 16 hex digits of SHA-256 over the name, the library version and
/// every metadata pair.
pub fn config_hash(name: &str, metadata: &[(String, String)]) -> String {
    let mut h = Sha256::new();
    h.update(name.as_bytes());
    h.update([0]);
    h.update(LIBRARY_VERSION.as_bytes());
    for (k, v) in metadata {
        h.update([0]);
        h.update(k.as_bytes());
        h.update(b"=");
        h.update(v.as_bytes());
    }
    let digest = h.finalize();
    digest[..8].iter().map(|b| format!("{b:02x}")).collect()
}

/// Round-trip formatting for table cells.
pub(crate) fn num(x: f64) -> String {
    format!("{x:e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn render_and_hash() {
        let mut t = CsvTable::new("demo", &["a", "b"]);
        t.meta("L", 16).meta("alpha", 2.0);
        t.push_row(vec![num(1.5), num(0.25)]);
        let text = t.render();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# experiment = demo");
        assert!(lines[1].starts_with("# s2scat_version = "));
        assert_eq!(lines[2], "# L = 16");
        assert_eq!(lines[4], "a,b");
        assert_eq!(lines[5], "1.5e0,2.5e-1");
        assert_eq!(t.column("b"), Some(vec![0.25]));
        assert_eq!(t.column("zzz"), None);

        let h = t.config_hash();
        assert_eq!(h.len(), 16);
        let mut other = t.clone();
        other.metadata[0].1 = "32".into();
        assert_ne!(other.config_hash(), h);
        // rows do not enter the hash
        let mut more = t.clone();
        more.push_row(vec![num(0.0), num(0.0)]);
        assert_eq!(more.config_hash(), h);
        assert_eq!(t.file_name(), format!("demo-{h}.csv"));
    }

    #[test]
    fn write_into_directory() {
        let dir = tempfile::tempdir().unwrap();
        let t = CsvTable::new("x", &["c"]);
        let p = t.write_into(dir.path().join("nested")).unwrap();
        assert_eq!(std::fs::read_to_string(p).unwrap(), t.render());
    }
}
