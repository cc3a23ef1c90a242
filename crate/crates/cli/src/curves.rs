//! Figure data as tables.

use serde_json::{json, Map, Value};
use zpeff::entropy::{shannon_pareto, varentropy_bs_pareto, varentropy_power_pareto};
use zpeff::format::csv_number;
use zpeff::measures::{discrete_efficiency, Distribution};
use zpeff::pareto::{beta_from_a, gini_from_beta, zp_efficiency, zp_efficiency_from_a};
use zpeff::{Error, Result};

use crate::output::{divergence_label, json_number, or_marker, pretty, Format};

pub const MIN_GRID: usize = 10;
/// Upper end of the tail-index axis for figures 3 to 5.
pub const BETA_MAX: f64 = 50.0;

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    pub values: Vec<f64>,
}

/// Named, equal-length columns; the first column is the strictly
/// increasing grid. Divergent entries hold signed infinities.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveTable {
    pub name: String,
    pub metadata: Vec<(String, String)>,
    pub columns: Vec<Column>,
}

impl CurveTable {
    pub fn new(name: &str, metadata: Vec<(String, String)>, columns: Vec<Column>) -> Result<Self> {
        let t = Self {
            name: name.into(),
            metadata,
            columns,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        let first = self
            .columns
            .first()
            .ok_or(Error::EmptyInput("curve table has no columns"))?;
        let len = first.values.len();
        if self.columns.iter().any(|c| c.values.len() != len) {
            return Err(Error::Validation("curve columns differ in length".into()));
        }
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if first.values.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Validation(format!(
                "grid column {} is not strictly increasing",
                first.name
            )));
        }
        Ok(())
    }

    pub fn rows(&self) -> usize {
        self.columns.first().map_or(0, |c| c.values.len())
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns
            .iter()
            .find(|c| c.name == name)
            .map(|c| c.values.as_slice())
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("# curve={}\n", self.name);
        for (k, v) in &self.metadata {
            out.push_str(&format!("# {k}={v}\n"));
        }
        let header: Vec<&str> = self.columns.iter().map(|c| c.name.as_str()).collect();
        out.push_str(&header.join(","));
        out.push('\n');
        for i in 0..self.rows() {
            let row: Vec<String> = self.columns.iter().map(|c| csv_number(c.values[i])).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    /// Inverse of [`CurveTable::to_csv`].
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut name = None;
        let mut metadata = Vec::new();
        let mut lines = text.lines();
        let header = loop {
            let line = lines
                .next()
                .ok_or(Error::EmptyInput("curve table has no header"))?;
            match line.strip_prefix("# ") {
                Some(meta) => {
                    let (k, v) = meta
                        .split_once('=')
                        .ok_or_else(|| Error::Parse(format!("bad metadata line {line:?}")))?;
                    if k == "curve" && name.is_none() {
                        name = Some(v.to_string());
                    } else {
                        metadata.push((k.to_string(), v.to_string()));
                    }
                }
                None => break line,
            }
        };
        let mut columns: Vec<Column> = header
            .split(',')
            .map(|n| Column {
                name: n.to_string(),
                values: Vec::new(),
            })
            .collect();
        for (i, line) in lines.enumerate() {
            let cells: Vec<&str> = line.split(',').collect();
            if cells.len() != columns.len() {
                return Err(Error::Parse(format!(
                    "row {}: {} cells for {} columns",
                    i + 1,
                    cells.len(),
                    columns.len()
                )));
            }
            for (col, cell) in columns.iter_mut().zip(cells) {
                let v: f64 = cell
                    .parse()
                    .map_err(|e| Error::Parse(format!("row {}: {cell:?}: {e}", i + 1)))?;
                col.values.push(v);
            }
        }
        let name = name.ok_or_else(|| Error::Parse("missing `# curve=` line".into()))?;
        Self::new(&name, metadata, columns)
    }

    pub fn to_json(&self) -> Value {
        let metadata: Map<String, Value> = self
            .metadata
            .iter()
            .map(|(k, v)| (k.clone(), json!(v)))
            .collect();
        let columns: Vec<Value> = self
            .columns
            .iter()
            .map(|c| {
                let diverges: Vec<Value> = c
                    .values
                    .iter()
                    .enumerate()
                    .filter(|(_, x)| x.is_infinite())
                    .map(|(i, &x)| json!({ "index": i, "to": divergence_label(x) }))
                    .collect();
                json!({
                    "name": c.name,
                    "values": c.values.iter().map(|&x| json_number(x)).collect::<Vec<_>>(),
                    "diverges": diverges,
                })
            })
            .collect();
        json!({ "name": self.name, "metadata": metadata, "columns": columns })
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => pretty(&self.to_json()),
        }
    }
}

fn meta(pairs: &[(&str, String)]) -> Vec<(String, String)> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn column(name: &str, values: Vec<f64>) -> Column {
    Column {
        name: name.into(),
        values,
    }
}

/// `n` points from `lo` to `hi` inclusive.
fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| {
            if k + 1 == n {
                hi
            } else {
                lo + (hi - lo) * k as f64 / (n - 1) as f64
            }
        })
        .collect()
}

fn map_grid(grid: &[f64], f: impl Fn(f64) -> Result<f64>) -> Result<Vec<f64>> {
    grid.iter().map(|&x| or_marker(f(x))).collect()
}

/// Table for figure `1..=5` on `grid` points.
pub fn emit_curves(figure: u8, grid: usize) -> Result<CurveTable> {
    if grid < MIN_GRID {
        return Err(Error::Validation(format!(
            "grid must have at least {MIN_GRID} points"
        )));
    }
    match figure {
        1 => two_state_efficiency(grid),
        2 => efficiency_vs_a(grid),
        3..=5 => beta_figure(figure, grid),
        _ => Err(Error::Validation(format!("no figure {figure}; choose 1 to 5"))),
    }
}

/// η(p) of the two-state law `(p, 1-p)`, one column per `a = 0.1, …, 0.9`,
/// on the interior grid `p_k = k/(grid+1)`.
fn two_state_efficiency(grid: usize) -> Result<CurveTable> {
    let ps: Vec<f64> = (1..=grid).map(|k| k as f64 / (grid + 1) as f64).collect();
    let mut columns = vec![column("p", ps.clone())];
    for k in 1..=9 {
        let a = k as f64 / 10.0;
        let eta = map_grid(&ps, |p| discrete_efficiency(&Distribution::new(vec![p, 1.0 - p])?, a))?;
        columns.push(column(&format!("eta_a{}", csv_number(a)), eta));
    }
    CurveTable::new(
        "two_state_efficiency",
        meta(&[
            ("figure", "1".into()),
            ("grid", grid.to_string()),
            ("p_range", format!("1/{0}:{1}/{0}", grid + 1, grid)),
            ("a_values", "0.1:0.1:0.9".into()),
        ]),
        columns,
    )
}

/// Closed-form η against `a ∈ [0, 1/2]`, with divergence at both ends.
fn efficiency_vs_a(grid: usize) -> Result<CurveTable> {
    let a = linspace(0.0, 0.5, grid);
    let beta = map_grid(&a, |a| {
        if a == 0.0 {
            Ok(f64::INFINITY)
        } else {
            beta_from_a(a)
        }
    })?;
    let eta = map_grid(&a, zp_efficiency_from_a)?;
    CurveTable::new(
        "efficiency_vs_a",
        meta(&[
            ("figure", "2".into()),
            ("grid", grid.to_string()),
            ("a_range", "0:0.5".into()),
        ]),
        vec![column("a", a), column("beta", beta), column("eta", eta)],
    )
}

/// Figures on `β ∈ [1, 50]`. The `β = 1` row is the limit from the right.
fn beta_figure(figure: u8, grid: usize) -> Result<CurveTable> {
    let beta = linspace(1.0, BETA_MAX, grid);
    let eta = map_grid(&beta, zp_efficiency)?;
    let mut columns = vec![column("beta", beta.clone()), column("eta", eta)];
    let name = match figure {
        3 => {
            columns.push(column("gini", map_grid(&beta, gini_from_beta)?));
            "efficiency_and_gini"
        }
        4 => {
            columns.push(column("shannon", map_grid(&beta, shannon_pareto)?));
            "efficiency_and_shannon"
        }
        _ => {
            columns.push(column("varentropy_bs", map_grid(&beta, varentropy_bs_pareto)?));
            let power = map_grid(&beta, |b| {
                if b == 1.0 {
                    Ok(f64::INFINITY)
                } else {
                    varentropy_power_pareto(b)
                }
            })?;
            columns.push(column("varentropy_p", power));
            "efficiency_and_varentropy"
        }
    };
    CurveTable::new(
        name,
        meta(&[
            ("figure", figure.to_string()),
            ("grid", grid.to_string()),
            ("beta_range", format!("1:{}", csv_number(BETA_MAX))),
        ]),
        columns,
    )
}
