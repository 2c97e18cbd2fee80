//! CSV tables with a provenance line: `# lpcocycle <version> config=<hash>`.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Duration;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Floats with 17 significant digits.
pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn opt_float(x: Option<f64>) -> String {
    x.map(float).unwrap_or_default()
}

/// Milliseconds, or an empty cell when timings are off.
pub fn runtime(elapsed: Duration, timings: bool) -> String {
    if timings {
        elapsed.as_millis().to_string()
    } else {
        String::new()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: impl Into<String>, header: &[&'static str]) -> Self {
        Table {
            name: name.into(),
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn render(&self, config_hash: &str) -> String {
        let mut s = String::new();
        writeln!(s, "# lpcocycle {VERSION} config={config_hash}").unwrap();
        writeln!(s, "{}", self.header.join(",")).unwrap();
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|c| escape(c)).collect();
            writeln!(s, "{}", cells.join(",")).unwrap();
        }
        s
    }

    pub fn write(&self, dir: &Path, config_hash: &str) -> std::io::Result<PathBuf> {
        std::fs::create_dir_all(dir)?;
        let path = dir.join(format!("{}.csv", self.name));
        std::fs::write(&path, self.render(config_hash))?;
        Ok(path)
    }
}

fn escape(cell: &str) -> String {
    if cell.contains([',', '"', '\n']) {
        format!("\"{}\"", cell.replace('"', "\"\""))
    } else {
        cell.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rendering() {
        let mut t = Table::new("x", &["a", "b"]);
        t.push(vec![float(0.375), "p,q".into()]);
        let s = t.render("abc");
        assert_eq!(
            s,
            format!("# lpcocycle {VERSION} config=abc\na,b\n3.7500000000000000e-1,\"p,q\"\n")
        );
        assert_eq!(runtime(Duration::from_millis(5), false), "");
    }
}
