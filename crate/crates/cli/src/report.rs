use std::fmt::Write as _;
use std::io::{self, Write};
use std::str::FromStr;

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Text,
    Csv,
    Markdown,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "text" => Ok(Self::Text),
            "csv" => Ok(Self::Csv),
            "markdown" | "md" => Ok(Self::Markdown),
            "json" => Ok(Self::Json),
            other => Err(format!("unknown format {other:?} (text, csv, markdown, json)")),
        }
    }
}

/// Tabular command output. Numeric cells are already rendered as decimals.
#[derive(Clone, Debug, Default, Serialize, PartialEq)]
pub struct Report {
    pub title: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub footer: Vec<String>,
}

impl Report {
    pub fn new(title: impl Into<String>, header: &[&str]) -> Self {
        Self {
            title: title.into(),
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
            footer: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn note(&mut self, line: impl Into<String>) {
        self.footer.push(line.into());
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.text(),
            Format::Csv => self.csv(),
            Format::Markdown => self.markdown(),
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("report serializes");
                s.push('\n');
                s
            }
        }
    }

    pub fn write_to(&self, out: &mut dyn Write, format: Format) -> io::Result<()> {
        out.write_all(self.render(format).as_bytes())
    }

    fn widths(&self) -> Vec<usize> {
        let mut w: Vec<usize> = self.header.iter().map(|h| h.chars().count()).collect();
        for row in &self.rows {
            for (i, cell) in row.iter().enumerate() {
                w[i] = w[i].max(cell.chars().count());
            }
        }
        w
    }

    fn text(&self) -> String {
        let widths = self.widths();
        let mut s = String::new();
        if !self.title.is_empty() {
            let _ = writeln!(s, "# {}", self.title);
        }
        let line = |cells: &[String]| {
            let padded: Vec<String> = cells
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:>w$}"))
                .collect();
            padded.join("  ").trim_end().to_string()
        };
        let _ = writeln!(s, "{}", line(&self.header));
        for row in &self.rows {
            let _ = writeln!(s, "{}", line(row));
        }
        for note in &self.footer {
            let _ = writeln!(s, "# {note}");
        }
        s
    }

    fn csv(&self) -> String {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory CSV");
        for row in &self.rows {
            w.write_record(row).expect("in-memory CSV");
        }
        String::from_utf8(w.into_inner().expect("in-memory CSV")).expect("CSV is UTF-8")
    }

    fn markdown(&self) -> String {
        let mut s = String::new();
        if !self.title.is_empty() {
            let _ = writeln!(s, "**{}**\n", self.title);
        }
        let _ = writeln!(s, "| {} |", self.header.join(" | "));
        let rule: Vec<&str> = self.header.iter().map(|_| "---:").collect();
        let _ = writeln!(s, "|{}|", rule.join("|"));
        for row in &self.rows {
            let _ = writeln!(s, "| {} |", row.join(" | "));
        }
        if !self.footer.is_empty() {
            s.push('\n');
            for note in &self.footer {
                let _ = writeln!(s, "- {note}");
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let mut r = Report::new("demo", &["n", "re", "im"]);
        r.push(vec!["1".into(), "0.5".into(), "-0.25".into()]);
        r.push(vec!["10".into(), "0.125".into(), "+0.75".into()]);
        r.note("rule=simpson");
        r
    }

    #[test]
    fn text_is_right_aligned() {
        let text = sample().render(Format::Text);
        assert_eq!(
            text,
            "# demo\n n     re     im\n 1    0.5  -0.25\n10  0.125  +0.75\n# rule=simpson\n"
        );
    }

    #[test]
    fn csv_has_header_and_lf() {
        let csv = sample().render(Format::Csv);
        assert_eq!(csv, "n,re,im\n1,0.5,-0.25\n10,0.125,+0.75\n");
    }

    #[test]
    fn markdown_and_json() {
        let md = sample().render(Format::Markdown);
        assert!(md.contains("| n | re | im |\n|---:|---:|---:|\n| 1 | 0.5 | -0.25 |"));
        let json: serde_json::Value = serde_json::from_str(&sample().render(Format::Json)).unwrap();
        assert_eq!(json["rows"][1][2], "+0.75");
        assert_eq!(json["footer"][0], "rule=simpson");
    }
}
