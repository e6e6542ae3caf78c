//! Tables and their CSV and structured-text renderings.

use sha2::{Digest, Sha256};
use std::fmt::Write as _;

/// One named table; the last column of every row is the formula tag.
#[derive(Debug, Clone)]
pub struct Table {
    pub name: &'static str,
    pub columns: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &'static str, columns: &[&'static str]) -> Self {
        Table {
            name,
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, tag: &str, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.columns.len());
        let mut row = cells;
        row.push(format!("eq={tag}"));
        self.rows.push(row);
    }
}

/// Everything one run writes.
#[derive(Debug, Clone)]
pub struct Report {
    pub command: &'static str,
    pub config: String,
    pub settings: Vec<(&'static str, String)>,
    pub tables: Vec<Table>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    StructuredText,
}

/// Shortest round-trip rendering of a float, with -0 written as 0.
pub fn num(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:e}")
}

impl Report {
    pub fn new(command: &'static str, config: String) -> Self {
        Report {
            command,
            config,
            settings: Vec::new(),
            tables: Vec::new(),
        }
    }

    pub fn config_hash(&self) -> String {
        let digest = Sha256::digest(format!("{}\n{}", self.command, self.config).as_bytes());
        digest.iter().fold(String::new(), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.render_csv(),
            Format::StructuredText => self.render_text(),
        }
    }

    fn render_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# command: {}", self.command);
        let _ = writeln!(out, "# config_sha256: {}", self.config_hash());
        let _ = writeln!(out, "# config: {}", self.config);
        for (k, v) in &self.settings {
            let _ = writeln!(out, "# {k}: {v}");
        }
        for table in &self.tables {
            let _ = writeln!(out, "# table: {}", table.name);
            let mut writer = csv::Writer::from_writer(Vec::new());
            let mut header: Vec<&str> = table.columns.clone();
            header.push("tag");
            writer.write_record(&header).expect("in-memory write");
            for row in &table.rows {
                writer.write_record(row).expect("in-memory write");
            }
            let bytes = writer.into_inner().expect("in-memory flush");
            out.push_str(&String::from_utf8(bytes).expect("csv of utf-8 cells"));
        }
        out
    }

    fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "command = {}", self.command);
        let _ = writeln!(out, "config_sha256 = {}", self.config_hash());
        let _ = writeln!(out, "config = {:?}", self.config);
        for (k, v) in &self.settings {
            let _ = writeln!(out, "{k} = {v:?}");
        }
        for table in &self.tables {
            for row in &table.rows {
                let _ = write!(out, "{}", table.name);
                for (col, cell) in table.columns.iter().zip(row) {
                    let _ = write!(out, " {col}={cell:?}");
                }
                let _ = writeln!(out, " {}", row.last().expect("tag column"));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let mut r = Report::new("kernel", "a=1".into());
        r.settings.push(("rel_tol", "1e-10".into()));
        let mut t = Table::new("main", &["t", "value"]);
        t.push("main_term", vec![num(0.0), num(0.5)]);
        t.push("main_term", vec![num(1.0), "x,y".into()]);
        r.tables.push(t);
        r
    }

    #[test]
    fn csv_has_header_block_and_tags() {
        let text = sample().render(Format::Csv);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# command: kernel");
        assert!(lines[1].starts_with("# config_sha256: ") && lines[1].len() == 17 + 64);
        assert_eq!(lines[5], "t,value,tag");
        assert_eq!(lines[6], "0e0,5e-1,eq=main_term");
        assert_eq!(lines[7], "1e0,\"x,y\",eq=main_term");
    }

    #[test]
    fn structured_text_mirrors_rows() {
        let text = sample().render(Format::StructuredText);
        assert!(text.contains("main t=\"0e0\" value=\"5e-1\" eq=main_term"));
    }

    #[test]
    fn hash_depends_on_config() {
        let a = sample();
        let mut b = sample();
        b.config = "a=2".into();
        assert_ne!(a.config_hash(), b.config_hash());
        assert_eq!(a.config_hash(), sample().config_hash());
    }
}
