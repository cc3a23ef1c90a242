//! Output plumbing shared by every subcommand.
//!
//! CSV dialect: comma separated, header always present, optional leading
//! `# key=value` metadata lines, numbers at nine significant digits and
//! divergence written as `inf` / `-inf`. JSON carries full precision and
//! writes divergent numbers as `null`, listing them under `diverges`.

use serde_json::{json, Map, Value};
use zpeff::format::csv_number;
use zpeff::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Text for the marker of a divergent number.
pub fn divergence_label(x: f64) -> &'static str {
    if x > 0.0 {
        "+inf"
    } else {
        "-inf"
    }
}

/// `x` as JSON, or `null` when it marks a divergence.
pub fn json_number(x: f64) -> Value {
    if x.is_finite() {
        json!(x + 0.0)
    } else {
        Value::Null
    }
}

/// Maps a divergence signal onto a signed infinity; other errors pass through.
pub fn or_marker(r: zpeff::Result<f64>) -> zpeff::Result<f64> {
    match r {
        Err(Error::Divergent { sign, .. }) => Ok(sign.as_f64()),
        other => other,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Entry {
    Real(f64),
    Count(u64),
    Text(String),
    Flag(bool),
}

impl Entry {
    fn csv(&self) -> String {
        match self {
            Entry::Real(x) => csv_number(*x),
            Entry::Count(n) => n.to_string(),
            Entry::Text(s) => s.clone(),
            Entry::Flag(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Entry::Real(x) => json_number(*x),
            Entry::Count(n) => json!(n),
            Entry::Text(s) => json!(s),
            Entry::Flag(b) => json!(b),
        }
    }
}

/// Ordered `quantity,value` report.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Record {
    entries: Vec<(String, Entry)>,
}

impl Record {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn real(mut self, key: &str, x: f64) -> Self {
        self.entries.push((key.into(), Entry::Real(x)));
        self
    }

    pub fn count(mut self, key: &str, n: u64) -> Self {
        self.entries.push((key.into(), Entry::Count(n)));
        self
    }

    pub fn text(mut self, key: &str, s: impl Into<String>) -> Self {
        self.entries.push((key.into(), Entry::Text(s.into())));
        self
    }

    pub fn flag(mut self, key: &str, b: bool) -> Self {
        self.entries.push((key.into(), Entry::Flag(b)));
        self
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("quantity,value\n");
        for (k, v) in &self.entries {
            out.push_str(&format!("{k},{}\n", v.csv()));
        }
        out
    }

    /// `# key=value` lines, for use above another table.
    pub fn to_comments(&self) -> String {
        self.entries
            .iter()
            .map(|(k, v)| format!("# {k}={}\n", v.csv()))
            .collect()
    }

    pub fn to_json_map(&self) -> Map<String, Value> {
        let mut map = Map::new();
        let mut diverges = Vec::new();
        for (k, v) in &self.entries {
            if let Entry::Real(x) = v {
                if !x.is_finite() && !x.is_nan() {
                    diverges.push(json!({ "field": k, "to": divergence_label(*x) }));
                }
            }
            map.insert(k.clone(), v.json());
        }
        if !diverges.is_empty() {
            map.insert("diverges".into(), Value::Array(diverges));
        }
        map
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => pretty(&Value::Object(self.to_json_map())),
        }
    }
}

pub fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}
