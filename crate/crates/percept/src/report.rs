//! Human-readable tables and `statistic,value` machine files.

use crate::formats::full_precision;

/// Two-decimal cell text; negative zero prints as `0.00`.
pub fn fmt2(v: f64) -> String {
    let s = format!("{v:.2}");
    if s == "-0.00" {
        "0.00".into()
    } else {
        s
    }
}

/// Three-decimal p-value text followed by its significance stars.
pub fn fmt_p(p: f64, stars: &str) -> String {
    format!("{p:.3}{stars}")
}

/// An aligned plain-text table with a footnote of run parameters.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ReportTable {
    /// Heading line.
    pub title: String,
    /// Column headers.
    pub headers: Vec<String>,
    /// Formatted cells.
    pub rows: Vec<Vec<String>>,
    /// Lines printed under the table.
    pub notes: Vec<String>,
}

impl ReportTable {
    /// Table with a title and headers.
    pub fn new(title: impl Into<String>, headers: &[&str]) -> Self {
        Self {
            title: title.into(),
            headers: headers.iter().map(|h| (*h).to_owned()).collect(),
            ..Self::default()
        }
    }

    /// Appends a row of cells.
    pub fn row(&mut self, cells: Vec<String>) {
        self.rows.push(cells);
    }

    /// Appends a footnote line.
    pub fn note(&mut self, line: impl Into<String>) {
        self.notes.push(line.into());
    }

    /// Adds the `key=value` parameter footnote.
    pub fn echo_parameters(&mut self, params: &[(String, String)]) {
        let text: Vec<String> = params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        self.note(format!("Parameters: {}", text.join(" ")));
    }

    /// Renders with the first column left-aligned and the rest right-aligned.
    pub fn render(&self) -> String {
        let cols = self.headers.len().max(self.rows.iter().map(Vec::len).max().unwrap_or(0));
        let mut widths = vec![0; cols];
        for line in std::iter::once(&self.headers).chain(&self.rows) {
            for (w, cell) in widths.iter_mut().zip(line) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let fmt_line = |cells: &[String]| {
            let parts: Vec<String> = (0..cols)
                .map(|j| {
                    let cell = cells.get(j).map_or("", String::as_str);
                    if j == 0 {
                        format!("{cell:<w$}", w = widths[j])
                    } else {
                        format!("{cell:>w$}", w = widths[j])
                    }
                })
                .collect();
            parts.join("  ").trim_end().to_owned()
        };
        let mut out = String::new();
        out.push_str(&self.title);
        out.push('\n');
        let header = fmt_line(&self.headers);
        out.push_str(&header);
        out.push('\n');
        out.push_str(&"-".repeat(header.chars().count()));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&fmt_line(row));
            out.push('\n');
        }
        if !self.notes.is_empty() {
            out.push('\n');
            for n in &self.notes {
                out.push_str(n);
                out.push('\n');
            }
        }
        out
    }
}

/// CSV text with the given header and rows.
pub fn csv_text<R, C>(header: &[&str], rows: R) -> String
where
    R: IntoIterator<Item = C>,
    C: IntoIterator<Item = String>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
}

/// Ordered `statistic,value` rows.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct KeyValues(pub Vec<(String, String)>);

impl KeyValues {
    /// Adds a text value.
    pub fn text(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.0.push((key.into(), value.into()));
    }

    /// Adds a full-precision number.
    pub fn num(&mut self, key: impl Into<String>, value: f64) {
        self.text(key, full_precision(value));
    }

    /// CSV with a `statistic,value` header.
    pub fn to_csv(&self) -> String {
        csv_text(&["statistic", "value"], self.0.iter().map(|(k, v)| [k.clone(), v.clone()]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alignment() {
        let mut t = ReportTable::new("T", &["Feature", "Corr"]);
        t.row(vec!["speed".into(), fmt2(0.714)]);
        t.row(vec!["x".into(), fmt2(-0.001)]);
        t.note("n");
        assert_eq!(t.render(), "T\nFeature  Corr\n-------------\nspeed    0.71\nx        0.00\n\nn\n");
    }

    #[test]
    fn p_text() {
        assert_eq!(fmt_p(0.0009, "***"), "0.001***");
        assert_eq!(fmt_p(0.2, ""), "0.200");
    }

    #[test]
    fn key_values_keep_full_precision() {
        let mut kv = KeyValues::default();
        kv.num("r2", 0.1 + 0.2);
        kv.text("method", "ols");
        assert_eq!(kv.to_csv(), "statistic,value\nr2,0.30000000000000004\nmethod,ols\n");
    }
}
