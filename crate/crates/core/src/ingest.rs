//! From raw inputs to ranked tables and fitted exponents.
//!
//! Text corpora become [`RankFrequency`] tables via [`tokenize_corpus`];
//! numeric samples become [`SampleSet`]s. On top of those sit the Zipf rank
//! fit, the Hill estimator for the Pareto index and the empirical Gini.

use std::collections::HashMap;
use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::measures::Distribution;
use crate::regression::fit_line;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenizerOptions {
    /// Lower-case every token before counting.
    pub case_fold: bool,
}

impl Default for TokenizerOptions {
    fn default() -> Self {
        Self { case_fold: true }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankEntry {
    pub rank: usize,
    pub token: Option<String>,
    pub frequency: u64,
}

/// Rank-ordered frequency table. Ranks are `1..=n`, frequencies are
/// non-increasing, ties are ordered by token.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankFrequency {
    entries: Vec<RankEntry>,
    total: u64,
}

impl RankFrequency {
    /// Ranks `(token, count)` pairs; duplicate tokens are merged.
    pub fn from_counts<I, S>(counts: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, u64)>,
        S: Into<String>,
    {
        let mut merged: HashMap<String, u64> = HashMap::new();
        for (token, n) in counts {
            let token = token.into();
            if n == 0 {
                return Err(Error::Validation(format!("token {token:?} has zero count")));
            }
            *merged.entry(token).or_default() += n;
        }
        let mut pairs: Vec<(String, u64)> = merged.into_iter().collect();
        pairs.sort_by(|(ta, a), (tb, b)| b.cmp(a).then_with(|| ta.cmp(tb)));
        Self::build(pairs.into_iter().map(|(t, n)| (Some(t), n)).collect())
    }

    /// Ranks anonymous frequencies (e.g. rounded sample values).
    pub fn from_frequencies(mut freqs: Vec<u64>) -> Result<Self> {
        if freqs.contains(&0) {
            return Err(Error::Validation("frequencies must be positive".into()));
        }
        freqs.sort_unstable_by(|a, b| b.cmp(a));
        Self::build(freqs.into_iter().map(|n| (None, n)).collect())
    }

    fn build(sorted: Vec<(Option<String>, u64)>) -> Result<Self> {
        if sorted.is_empty() {
            return Err(Error::EmptyInput("no tokens to rank"));
        }
        let total = sorted.iter().map(|(_, n)| n).sum();
        let entries = sorted
            .into_iter()
            .enumerate()
            .map(|(i, (token, frequency))| RankEntry {
                rank: i + 1,
                token,
                frequency,
            })
            .collect();
        Ok(Self { entries, total })
    }

    pub fn entries(&self) -> &[RankEntry] {
        &self.entries
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn frequencies(&self) -> Vec<u64> {
        self.entries.iter().map(|e| e.frequency).collect()
    }

    pub const CSV_HEADER: &'static str = "rank,token,frequency";

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(Self::CSV_HEADER.split(','))?;
        for e in &self.entries {
            w.write_record([
                e.rank.to_string(),
                e.token.clone().unwrap_or_default(),
                e.frequency.to_string(),
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Reads a `token,count` table; a header row is skipped when its count
    /// field is not an integer.
    pub fn read_count_table<R: Read>(reader: R) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(reader);
        let mut counts = Vec::new();
        for (line, record) in r.records().enumerate() {
            let record = record?;
            if record.len() != 2 {
                return Err(Error::Parse(format!(
                    "row {}: expected token,count, found {} fields",
                    line + 1,
                    record.len()
                )));
            }
            match record[1].parse::<u64>() {
                Ok(n) => counts.push((record[0].to_string(), n)),
                Err(_) if line == 0 => continue,
                Err(e) => {
                    return Err(Error::Parse(format!(
                        "row {}: bad count {:?}: {e}",
                        line + 1,
                        &record[1]
                    )))
                }
            }
        }
        Self::from_counts(counts)
    }

    /// Writes each token `frequency` times, one occurrence per line, in rank
    /// order. Anonymous entries are skipped.
    pub fn detokenize(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            if let Some(t) = &e.token {
                for _ in 0..e.frequency {
                    out.push_str(t);
                    out.push('\n');
                }
            }
        }
        out
    }
}

/// Splits on every non-alphanumeric scalar, optionally lower-cases, counts
/// and ranks. Invalid UTF-8 is replaced rather than rejected.
pub fn tokenize_corpus(text: &[u8], opts: TokenizerOptions) -> Result<RankFrequency> {
    let text = String::from_utf8_lossy(text);
    let mut counts: HashMap<String, u64> = HashMap::new();
    for raw in text.split(|c: char| !c.is_alphanumeric()) {
        if raw.is_empty() {
            continue;
        }
        let token = if opts.case_fold {
            raw.to_lowercase()
        } else {
            raw.to_string()
        };
        *counts.entry(token).or_default() += 1;
    }
    if counts.is_empty() {
        return Err(Error::EmptyInput("corpus contains no tokens"));
    }
    RankFrequency::from_counts(counts)
}

/// `p_r = frequency_r / total`, in rank order.
pub fn empirical_distribution(rf: &RankFrequency) -> Result<Distribution<f64>> {
    if rf.total() == 0 {
        return Err(Error::EmptyInput("rank table has zero total"));
    }
    let total = rf.total() as f64;
    let weights: Vec<f64> = rf.entries().iter().map(|e| e.frequency as f64 / total).collect();
    Distribution::renormalize(&weights)
}

/// Inclusive 1-based rank range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankWindow {
    pub lo: usize,
    pub hi: usize,
}

impl RankWindow {
    pub fn new(lo: usize, hi: usize) -> Result<Self> {
        if lo == 0 || hi < lo {
            return Err(Error::Validation(format!("invalid rank window {lo}:{hi}")));
        }
        Ok(Self { lo, hi })
    }

    /// Ranks `5..=max(50, n/10)`, away from the head and the sparse tail.
    pub fn default_for(n: usize) -> Self {
        Self {
            lo: 5,
            hi: 50.max(n / 10),
        }
    }

    fn clip(self, n: usize) -> Self {
        Self {
            lo: self.lo,
            hi: self.hi.min(n),
        }
    }

    pub fn len(&self) -> usize {
        (self.hi + 1).saturating_sub(self.lo)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZipfFit {
    pub alpha: f64,
    pub x1: f64,
    pub r_squared: f64,
    /// The window actually used, after clipping to the table length.
    pub window: RankWindow,
}

/// Least squares of `ln frequency` on `ln rank` over `window`
/// (default [`RankWindow::default_for`]).
pub fn fit_zipf(rf: &RankFrequency, window: Option<RankWindow>) -> Result<ZipfFit> {
    let values: Vec<f64> = rf.entries().iter().map(|e| e.frequency as f64).collect();
    fit_rank_law(&values, window)
}

/// [`fit_zipf`] on real-valued achievements `x_1, x_2, …` listed by rank.
pub fn fit_rank_law(values: &[f64], window: Option<RankWindow>) -> Result<ZipfFit> {
    let window = window
        .unwrap_or_else(|| RankWindow::default_for(values.len()))
        .clip(values.len());
    if window.len() < 3 {
        return Err(Error::InsufficientData {
            needed: 3,
            got: window.len(),
        });
    }
    let picked = &values[window.lo - 1..window.hi];
    if let Some(bad) = picked.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
        return Err(Error::Validation(format!(
            "rank value {bad} is not a positive real"
        )));
    }
    let xs: Vec<f64> = (window.lo..=window.hi).map(|r| (r as f64).ln()).collect();
    let ys: Vec<f64> = picked.iter().map(|v| v.ln()).collect();
    let line = fit_line(&xs, &ys)?;
    Ok(ZipfFit {
        alpha: -line.slope,
        x1: line.intercept.exp(),
        r_squared: line.r_squared,
        window,
    })
}

/// Positive achievement samples with an optional declared lower cutoff.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSet {
    values: Vec<f64>,
    x_min: Option<f64>,
}

impl SampleSet {
    pub fn new(values: Vec<f64>, x_min: Option<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput("sample set is empty"));
        }
        if let Some(bad) = values.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
            return Err(Error::Validation(format!(
                "sample value {bad} is not a positive real"
            )));
        }
        if let Some(m) = x_min {
            if !(m.is_finite() && m > 0.0) {
                return Err(domain("x_min", m, "must be positive"));
            }
        }
        Ok(Self { values, x_min })
    }

    /// One value per line; blank lines and `#` comments are ignored.
    pub fn parse(text: &str, x_min: Option<f64>) -> Result<Self> {
        let mut values = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let v: f64 = line
                .parse()
                .map_err(|e| Error::Parse(format!("line {}: {line:?}: {e}", i + 1)))?;
            values.push(v);
        }
        Self::new(values, x_min)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The declared cutoff, or the sample minimum.
    pub fn x_min(&self) -> f64 {
        self.x_min
            .unwrap_or_else(|| self.values.iter().copied().fold(f64::INFINITY, f64::min))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HillFit {
    pub beta: f64,
    pub std_err: f64,
    pub x_min: f64,
    pub n: usize,
}

/// Maximum-likelihood Pareto index `β̂ = n / Σ ln(x_i/x_min)`, with
/// standard error `β̂/√n`.
pub fn fit_pareto_hill(s: &SampleSet) -> Result<HillFit> {
    let n = s.len();
    if n < 2 {
        return Err(Error::InsufficientData { needed: 2, got: n });
    }
    let x_min = s.x_min();
    if let Some(bad) = s.values().iter().find(|&&x| x < x_min) {
        return Err(Error::Validation(format!(
            "sample value {bad} lies below x_min = {x_min}"
        )));
    }
    let log_sum: f64 = s.values().iter().map(|&x| (x / x_min).ln()).sum();
    if log_sum == 0.0 {
        return Err(Error::Degenerate("every sample equals x_min"));
    }
    let beta = n as f64 / log_sum;
    Ok(HillFit {
        beta,
        std_err: beta / (n as f64).sqrt(),
        x_min,
        n,
    })
}

fn sorted(s: &SampleSet) -> Vec<f64> {
    let mut v = s.values().to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// `Σ_i Σ_j |x_i - x_j| / (2 n² mean)`, via the sorted form
/// `Σ_i (2i - n - 1) x_(i) / (n Σ x)`.
pub fn empirical_gini(s: &SampleSet) -> Result<f64> {
    let n = s.len();
    if n < 2 {
        return Err(Error::InsufficientData { needed: 2, got: n });
    }
    let v = sorted(s);
    let total: f64 = v.iter().sum();
    if !(total > 0.0) {
        return Err(domain("mean", total / n as f64, "must be positive"));
    }
    let nf = n as f64;
    let weighted: f64 = v
        .iter()
        .enumerate()
        .map(|(i, &x)| (2.0 * (i + 1) as f64 - nf - 1.0) * x)
        .sum();
    Ok(weighted / (nf * total))
}

/// Share of the total held by the largest `⌈q n⌉` values.
pub fn top_share(s: &SampleSet, q: f64) -> Result<f64> {
    if !(q > 0.0 && q <= 1.0) {
        return Err(domain("q", q, "top fraction must lie in (0, 1]"));
    }
    let v = sorted(s);
    let k = ((q * v.len() as f64).ceil() as usize).clamp(1, v.len());
    let total: f64 = v.iter().sum();
    Ok(v[v.len() - k..].iter().sum::<f64>() / total)
}
