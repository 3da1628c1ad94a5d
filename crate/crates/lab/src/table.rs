use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::LabError;

/// A rectangular numeric table written as TSV under a `#` header block.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub name: String,
    pub note: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl ResultTable {
    pub fn new(name: &str, note: &str, columns: &[&str]) -> Self {
        ResultTable {
            name: name.into(),
            note: note.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        assert_eq!(row.len(), self.columns.len(), "row width in table {}", self.name);
        self.rows.push(row);
    }

    pub fn is_finite(&self) -> bool {
        self.rows.iter().flatten().all(|v| v.is_finite())
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# table: {}", self.name);
        for line in self.note.lines() {
            let _ = writeln!(s, "# {line}");
        }
        let _ = writeln!(s, "# {}", self.columns.join("\t"));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:.12e}")).collect();
            let _ = writeln!(s, "{}", cells.join("\t"));
        }
        s
    }

    pub fn write_to(&self, dir: &Path) -> Result<(), LabError> {
        let path = dir.join(format!("{}.tsv", self.name));
        fs::write(&path, self.render()).map_err(|e| LabError::io(&path, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_header_and_rows() {
        let mut t = ResultTable::new("demo", "two lines\nof notes", &["x", "y"]);
        t.push(vec![1.0, 0.5]);
        let text = t.render();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# table: demo");
        assert_eq!(lines[3], "# x\ty");
        assert_eq!(lines[4], "1.000000000000e0\t5.000000000000e-1");
    }
}
