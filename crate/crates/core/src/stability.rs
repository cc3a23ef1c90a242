//! Lesche stability of the efficiency functional.
//!
//! For `0 < a < 1` the normalized change `|E(p) - E(q)| / E_{N,max}` is
//! bounded by `N^a ‖p-q‖₁^{1-a} / (N^a - 1)`, and `x^a / (x^a - 1)` is
//! decreasing on `[2, ∞)`, so the whole chain is bounded by
//! `M ‖p-q‖₁^{1-a}` with `M = 2^a / (2^a - 1)` independently of `N`.
//! The Monte Carlo harness samples pairs inside an L1 ball and checks the
//! chain empirically.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::format::csv_number;
use crate::measures::{check_same_len, discrete_efficiency, Distribution};
use crate::scalar::{from_usize, Real};

fn check_a<T: Real>(a: T) -> Result<()> {
    if !(a > T::zero() && a < T::one()) {
        return Err(domain("a", a.as_f64(), "stability needs 0 < a < 1"));
    }
    Ok(())
}

/// `E_{N,max} = (N^a - 1)/a`, attained by the uniform distribution.
pub fn efficiency_sup<T: Real>(n: usize, a: T) -> Result<T> {
    check_a(a)?;
    if n == 0 {
        return Err(Error::Validation("support size must be at least 1".into()));
    }
    let n = from_usize::<T>(n);
    Ok((a * n.ln()).exp_m1() / a)
}

/// Both sides of `Σ|p_i^{1-a} - q_i^{1-a}| <= N^a ‖p-q‖₁^{1-a}`.
pub fn lemma1_gap<T: Real>(p: &Distribution<T>, q: &Distribution<T>, a: T) -> Result<(T, T)> {
    check_a(a)?;
    check_same_len(p, q)?;
    let one_minus = T::one() - a;
    let lhs = p
        .probs()
        .iter()
        .zip(q.probs())
        .map(|(&x, &y)| (x.powf(one_minus) - y.powf(one_minus)).abs())
        .sum();
    let n = from_usize::<T>(p.len());
    let rhs = n.powf(a) * p.l1_distance(q)?.powf(one_minus);
    Ok((lhs, rhs))
}

/// `M = 2^a / (2^a - 1)`, the supremum of `x^a/|1 - x^a|` on `[2, ∞)`.
pub fn lemma2_bound<T: Real>(a: T) -> Result<T> {
    check_a(a)?;
    let two_a = T::lit(2.0).powf(a);
    Ok(two_a / (two_a - T::one()))
}

/// `x^a / |1 - x^a|`.
pub fn lemma2_function<T: Real>(x: T, a: T) -> T {
    let xa = x.powf(a);
    xa / (T::one() - xa).abs()
}

/// `|E(p) - E(q)| / E_{N,max}` for `N >= 2`.
pub fn stability_ratio<T: Real>(p: &Distribution<T>, q: &Distribution<T>, a: T) -> Result<T> {
    check_a(a)?;
    check_same_len(p, q)?;
    if p.len() < 2 {
        return Err(Error::Degenerate(
            "stability ratio needs N >= 2 (the supremum vanishes at N = 1)",
        ));
    }
    let sup = efficiency_sup(p.len(), a)?;
    let ep = discrete_efficiency(p, a)?;
    let eq = discrete_efficiency(q, a)?;
    Ok((ep - eq).abs() / sup)
}

/// `N^a d^{1-a} / (N^a - 1)`: the middle link of the bound chain.
pub fn chain_bound<T: Real>(n: usize, l1: T, a: T) -> Result<T> {
    check_a(a)?;
    if n < 2 {
        return Err(Error::Degenerate("chain bound needs N >= 2"));
    }
    let na = from_usize::<T>(n).powf(a);
    Ok(na * l1.powf(T::one() - a) / (na - T::one()))
}

/// Perturbation size guaranteeing a normalized change below `epsilon`:
/// `δ = (ε/M)^{1/(1-a)}`.
pub fn delta_for_epsilon<T: Real>(epsilon: T, a: T) -> Result<T> {
    check_a(a)?;
    if !(epsilon > T::zero()) {
        return Err(domain("epsilon", epsilon.as_f64(), "must be positive"));
    }
    let m = lemma2_bound(a)?;
    Ok((epsilon / m).powf((T::one() - a).recip()))
}

/// Euclidean projection onto the probability simplex.
pub fn project_to_simplex(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|x, y| y.total_cmp(x));
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (j, &uj) in u.iter().enumerate() {
        cumulative += uj;
        let t = (cumulative - 1.0) / (j + 1) as f64;
        if uj - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|&x| (x - theta).max(0.0)).collect()
}

/// Harness configuration: one cell per support size in `n_values`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityTrialConfig {
    pub a: f64,
    pub n_values: Vec<usize>,
    pub delta: f64,
    pub trials: usize,
    pub seed: u64,
}

impl StabilityTrialConfig {
    pub fn validate(&self) -> Result<()> {
        check_a(self.a)?;
        if !(self.delta > 0.0) || !self.delta.is_finite() {
            return Err(domain("delta", self.delta, "must be positive"));
        }
        if self.n_values.is_empty() {
            return Err(Error::Validation("no support sizes given".into()));
        }
        if let Some(&n) = self.n_values.iter().find(|&&n| n < 2) {
            return Err(domain("N", n as f64, "support sizes must be at least 2"));
        }
        if self.trials == 0 {
            return Err(Error::Validation("trials must be at least 1".into()));
        }
        Ok(())
    }
}

/// One `(N, δ)` cell of a stability run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityCell {
    pub n: usize,
    pub delta: f64,
    pub max_ratio: f64,
    /// `N^a δ^{1-a} / (N^a - 1)`.
    pub lemma1_bound: f64,
    /// `M δ^{1-a}`.
    pub m_delta_bound: f64,
    /// Pairs whose ratio exceeded their own chain bound `N^a d^{1-a}/(N^a-1)`.
    pub chain_violations: usize,
    pub pairs: usize,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub a: f64,
    pub seed: u64,
    pub trials: usize,
    pub cells: Vec<StabilityCell>,
    pub pass: bool,
}

impl StabilityReport {
    pub const CSV_HEADER: &'static str = "N,delta,max_ratio,lemma1_bound,m_delta_bound,pass";

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for c in &self.cells {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                c.n,
                csv_number(c.delta),
                csv_number(c.max_ratio),
                csv_number(c.lemma1_bound),
                csv_number(c.m_delta_bound),
                c.pass
            ));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

// relative slack for floating-point comparisons against analytic bounds
const BOUND_SLACK: f64 = 1e-9;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic per-trial seed derived from `(master, cell, trial)`.
fn sub_seed(master: u64, cell: usize, trial: usize) -> u64 {
    splitmix64(splitmix64(splitmix64(master) ^ cell as u64) ^ trial as u64)
}

fn dirichlet_ones(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let e: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = e.iter().sum();
    e.into_iter().map(|x| x / total).collect()
}

/// Uniform draw from the L1 ball of the given radius in `n` dimensions.
fn l1_ball(rng: &mut ChaCha8Rng, n: usize, radius: f64) -> Vec<f64> {
    let e: Vec<f64> = (0..=n).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = e.iter().sum();
    e[..n]
        .iter()
        .map(|&x| {
            let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
            sign * radius * x / total
        })
        .collect()
}

fn l1(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).map(|(x, y)| (x - y).abs()).sum()
}

/// A random pair with `‖p - q‖₁ < delta`.
fn random_pair(rng: &mut ChaCha8Rng, n: usize, delta: f64) -> (Vec<f64>, Vec<f64>) {
    let p = dirichlet_ones(rng, n);
    let d = l1_ball(rng, n, delta);
    let shifted: Vec<f64> = p.iter().zip(&d).map(|(x, y)| x + y).collect();
    let mut q = project_to_simplex(&shifted);
    let dist = l1(&p, &q);
    let limit = delta * (1.0 - 1e-9);
    if dist >= limit {
        // convex combination stays on the simplex
        let t = limit / dist;
        q = p.iter().zip(&q).map(|(x, y)| x + t * (y - x)).collect();
    }
    (p, q)
}

/// Pairs that push the ratio toward its supremum: mass moved between two
/// coordinates of the uniform law, and mass spread out of a point mass.
fn adversarial_pairs(n: usize, delta: f64) -> Vec<(Vec<f64>, Vec<f64>)> {
    let step = 0.5 * delta * (1.0 - 1e-9);
    let nf = n as f64;
    let mut pairs = Vec::new();

    let uniform = vec![1.0 / nf; n];
    let moved = step.min(1.0 / nf);
    let mut q = uniform.clone();
    q[0] += moved;
    q[1] -= moved;
    pairs.push((uniform.clone(), q));

    let mut point = vec![0.0; n];
    point[0] = 1.0;
    let mut spread = point.clone();
    spread[0] = 1.0 - step;
    for x in spread.iter_mut().skip(1) {
        *x = step / (nf - 1.0);
    }
    pairs.push((point.clone(), spread));

    let mut two = point.clone();
    two[0] = 1.0 - step;
    two[1] = step;
    pairs.push((point, two));

    // uniform toward a point mass
    let mut toward = uniform.clone();
    let take = step.min(1.0 - 1.0 / nf);
    toward[0] += take;
    let others = take / (nf - 1.0);
    for x in toward.iter_mut().skip(1) {
        *x -= others;
    }
    pairs.push((uniform, toward));
    pairs
}

struct PairOutcome {
    ratio: f64,
    chain_ok: bool,
}

fn evaluate_pair(p: Vec<f64>, q: Vec<f64>, a: f64) -> Result<PairOutcome> {
    let n = p.len();
    let p = Distribution::new(p)?;
    let q = Distribution::new(q)?;
    let ratio = stability_ratio(&p, &q, a)?;
    let d = p.l1_distance(&q)?;
    let chain = chain_bound(n, d, a)?;
    let m_bound = lemma2_bound(a)? * d.powf(1.0 - a);
    let slack = 1.0 + BOUND_SLACK;
    Ok(PairOutcome {
        ratio,
        chain_ok: ratio <= chain * slack + 1e-15 && chain <= m_bound * slack + 1e-15,
    })
}

/// Runs every `(N, δ)` cell. Each trial draws from its own seed, so the
/// report does not depend on thread scheduling.
pub fn run_stability_trials(cfg: &StabilityTrialConfig) -> Result<StabilityReport> {
    cfg.validate()?;
    let a = cfg.a;
    let m = lemma2_bound(a)?;
    let m_delta_bound = m * cfg.delta.powf(1.0 - a);

    let mut cells = Vec::with_capacity(cfg.n_values.len());
    for (cell_index, &n) in cfg.n_values.iter().enumerate() {
        let random: Vec<PairOutcome> = (0..cfg.trials)
            .into_par_iter()
            .map(|trial| {
                let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(cfg.seed, cell_index, trial));
                let (p, q) = random_pair(&mut rng, n, cfg.delta);
                evaluate_pair(p, q, a)
            })
            .collect::<Result<_>>()?;
        let adversarial: Vec<PairOutcome> = adversarial_pairs(n, cfg.delta)
            .into_iter()
            .map(|(p, q)| evaluate_pair(p, q, a))
            .collect::<Result<_>>()?;

        let outcomes = random.iter().chain(&adversarial);
        let max_ratio = outcomes.clone().map(|o| o.ratio).fold(0.0, f64::max);
        let chain_violations = outcomes.filter(|o| !o.chain_ok).count();
        let lemma1_bound = chain_bound(n, cfg.delta, a)?;
        let pass = chain_violations == 0 && max_ratio < m_delta_bound && max_ratio <= lemma1_bound;
        cells.push(StabilityCell {
            n,
            delta: cfg.delta,
            max_ratio,
            lemma1_bound,
            m_delta_bound,
            chain_violations,
            pairs: random.len() + adversarial.len(),
            pass,
        });
    }
    let pass = cells.iter().all(|c| c.pass);
    Ok(StabilityReport {
        a,
        seed: cfg.seed,
        trials: cfg.trials,
        cells,
        pass,
    })
}
