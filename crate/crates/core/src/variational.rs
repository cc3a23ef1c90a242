//! Constrained maximization of the discrete efficiency.
//!
//! Maximizing `η = (Σ p_i^{1-a} - 1)/a` subject to `Σ p_i = 1` and
//! `Σ p_i x_i = μ` gives the stationarity condition
//!
//! ```text
//! ((1-a)/a) p_i^{-a} = λ + c x_i
//! ```
//!
//! so `p_i ∝ (x_i + λ/c)^{-1/a}`: a shifted power law with density exponent
//! `-1/a` and CCDF exponent `1/a - 1`. Because `η` is strictly concave on the
//! simplex and its gradient blows up at the faces, the maximizer is interior
//! and unique for every `μ` strictly between the smallest and largest level.
//!
//! Internally the law is written `p_i ∝ (1 + θ y_i)^{-1/a}` with
//! `y_i = (x_i - x_1)/(x_w - x_1) ∈ [0, 1]` and `θ = e^φ - 1 > -1`; the mean
//! is strictly decreasing in `φ`, which is solved for by bracketed root
//! finding. Normalization is then exact.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::format::csv_number;
use crate::measures::Distribution;
use crate::regression::fit_line;
use crate::roots::solve_bracketed_root;

/// Tolerance on the normalization and mean constraints.
pub const CONSTRAINT_TOL: f64 = 1e-12;

/// Which side condition closes the problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Constraint {
    /// Fixed mean achievement `μ`.
    Mean(f64),
    /// Fixed cost multiplier `c > 0` on the mean: stationary points of
    /// `η - c·X̄` under normalization.
    Multiplier(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariationalProblem {
    pub values: Vec<f64>,
    pub a: f64,
    pub constraint: Constraint,
}

impl VariationalProblem {
    pub fn with_mean(values: Vec<f64>, a: f64, mean: f64) -> Result<Self> {
        let p = Self {
            values,
            a,
            constraint: Constraint::Mean(mean),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_multiplier(values: Vec<f64>, a: f64, c: f64) -> Result<Self> {
        let p = Self {
            values,
            a,
            constraint: Constraint::Multiplier(c),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a > 0.0 && self.a < 0.5) {
            return Err(domain("a", self.a, "variational problem needs 0 < a < 0.5"));
        }
        if self.values.len() < 2 {
            return Err(Error::InsufficientData {
                needed: 2,
                got: self.values.len(),
            });
        }
        if self.values.iter().any(|x| !x.is_finite() || *x <= 0.0) {
            return Err(Error::Validation(
                "achievement levels must be finite and positive".into(),
            ));
        }
        if self.values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Validation(
                "achievement levels must be strictly increasing".into(),
            ));
        }
        match self.constraint {
            Constraint::Mean(mu) => {
                let (lo, hi) = (self.values[0], self.values[self.values.len() - 1]);
                if !mu.is_finite() || mu < lo || mu > hi {
                    return Err(Error::Infeasible(format!(
                        "mean {mu} lies outside the achievement range [{lo}, {hi}]"
                    )));
                }
            }
            Constraint::Multiplier(c) => {
                if !(c > 0.0) || !c.is_finite() {
                    return Err(domain("c", c, "multiplier must be positive"));
                }
            }
        }
        Ok(())
    }
}

/// Lagrange multipliers of `((1-a)/a) p_i^{-a} = λ + c x_i`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Multipliers {
    /// `λ`, attached to `Σ p_i = 1`.
    pub normalization: f64,
    /// `c`, attached to the mean.
    pub mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariationalSolution {
    pub distribution: Distribution<f64>,
    /// `None` on the faces of the constraint set (all mass on one level).
    pub multipliers: Option<Multipliers>,
    /// `λ/c`: the law is `p_i ∝ |x_i + shift|^{-1/a}`. `None` when uniform
    /// or degenerate.
    pub shift: Option<f64>,
    /// Slope of `ln p_i` against `ln|x_i + shift|` over `fit_window`.
    pub fitted_exponent: Option<f64>,
    /// Ranks (1-based, inclusive, by decreasing probability) used for the fit.
    pub fit_window: Option<(usize, usize)>,
    /// Largest relative stationarity violation or constraint error.
    pub residual: f64,
}

impl VariationalSolution {
    pub fn probs(&self) -> &[f64] {
        self.distribution.probs()
    }

    pub fn values(&self) -> &[f64] {
        self.distribution
            .values()
            .expect("solutions always carry their achievement levels")
    }

    pub const CSV_HEADER: &'static str = "i,x_i,p_i";

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for (i, (&x, &p)) in self.values().iter().zip(self.probs()).enumerate() {
            out.push_str(&format!("{},{},{}\n", i + 1, csv_number(x), csv_number(p)));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("solution serializes")
    }
}

fn log_add_exp(u: f64, v: f64) -> f64 {
    if u == f64::NEG_INFINITY {
        return v;
    }
    if v == f64::NEG_INFINITY {
        return u;
    }
    let m = u.max(v);
    m + (-(u - v).abs()).exp().ln_1p()
}

fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + xs.iter().map(|&x| (x - m).exp()).sum::<f64>().ln()
}

/// Log-weights `-(1/a) ln(1 + θ y_i)` with `θ = e^φ - 1`.
fn log_weights(y: &[f64], a: f64, phi: f64) -> Vec<f64> {
    y.iter()
        .map(|&yi| {
            let l = if yi <= 0.0 {
                0.0
            } else if yi >= 1.0 {
                phi
            } else {
                log_add_exp((1.0 - yi).ln(), yi.ln() + phi)
            };
            -l / a
        })
        .collect()
}

fn softmax(lw: &[f64]) -> Vec<f64> {
    let z = log_sum_exp(lw);
    lw.iter().map(|&w| (w - z).exp()).collect()
}

fn mean_of(p: &[f64], x: &[f64]) -> f64 {
    p.iter().zip(x).map(|(p, x)| p * x).sum()
}

/// Maximizes the efficiency under the problem's constraint.
///
/// `tol` bounds the reported residual; a solve whose residual exceeds it
/// is a convergence error.
pub fn solve_stationary(prob: &VariationalProblem, tol: f64) -> Result<VariationalSolution> {
    prob.validate()?;
    if !(tol > 0.0) {
        return Err(domain("tol", tol, "must be positive"));
    }
    let sol = match prob.constraint {
        Constraint::Mean(mu) => solve_fixed_mean(&prob.values, prob.a, mu)?,
        Constraint::Multiplier(c) => solve_fixed_multiplier(&prob.values, prob.a, c)?,
    };
    if !(sol.residual <= tol) {
        return Err(Error::Convergence {
            what: "stationary distribution (residual above tolerance)",
            iterations: crate::roots::MAX_ITERATIONS,
        });
    }
    Ok(sol)
}

fn point_mass(values: &[f64], index: usize) -> Result<VariationalSolution> {
    let mut probs = vec![0.0; values.len()];
    probs[index] = 1.0;
    Ok(VariationalSolution {
        distribution: Distribution::with_values(probs, values.to_vec())?,
        multipliers: None,
        shift: None,
        fitted_exponent: None,
        fit_window: None,
        residual: 0.0,
    })
}

fn solve_fixed_mean(values: &[f64], a: f64, mu: f64) -> Result<VariationalSolution> {
    let w = values.len();
    let (x1, xw) = (values[0], values[w - 1]);
    if mu <= x1 {
        return point_mass(values, 0);
    }
    if mu >= xw {
        return point_mass(values, w - 1);
    }
    let span = xw - x1;
    let y: Vec<f64> = values.iter().map(|&x| (x - x1) / span).collect();
    let mean_at = |phi: f64| mean_of(&softmax(&log_weights(&y, a, phi)), values);
    let f = |phi: f64| mean_at(phi) - mu;

    // bracket: the mean falls from x_w (φ → -∞) to x_1 (φ → +∞)
    let f0 = f(0.0);
    let phi = if f0 == 0.0 {
        0.0
    } else {
        let dir = if f0 > 0.0 { 1.0 } else { -1.0 };
        let mut near = 0.0;
        let mut far = dir;
        let mut tries = 0;
        while f(far).signum() == f0.signum() {
            near = far;
            far *= 2.0;
            tries += 1;
            if tries > 60 {
                return Err(Error::Infeasible(format!(
                    "mean {mu} is numerically indistinguishable from a boundary level"
                )));
            }
        }
        let (lo, hi) = if near < far { (near, far) } else { (far, near) };
        solve_bracketed_root(f, lo, hi, 1e-15)?
    };

    let probs = softmax(&log_weights(&y, a, phi));
    let theta = phi.exp_m1();
    let shift = (theta != 0.0).then(|| span / theta - x1);
    finish(values, a, probs, shift, Some(mu))
}

fn solve_fixed_multiplier(values: &[f64], a: f64, c: f64) -> Result<VariationalSolution> {
    let x1 = values[0];
    let k = a / (1.0 - a);
    // λ = -c x_1 + e^ψ keeps every λ + c x_i positive
    let log_total = |psi: f64| -> f64 {
        let lambda_plus = psi.exp();
        let lw: Vec<f64> = values
            .iter()
            .map(|&x| -(k * (lambda_plus + c * (x - x1))).ln() / a)
            .collect();
        log_sum_exp(&lw)
    };
    // ln Σp is strictly decreasing in ψ, +∞ at -∞ and -∞ at +∞
    let mut lo = -1.0;
    let mut hi = 1.0;
    let mut tries = 0;
    while log_total(lo) < 0.0 || log_total(hi) > 0.0 {
        if log_total(lo) < 0.0 {
            lo *= 2.0;
        }
        if log_total(hi) > 0.0 {
            hi *= 2.0;
        }
        tries += 1;
        if tries > 60 {
            return Err(Error::Convergence {
                what: "normalization multiplier bracket",
                iterations: tries,
            });
        }
    }
    let psi = solve_bracketed_root(log_total, lo, hi, 1e-15)?;
    let lambda_plus = psi.exp();
    let lw: Vec<f64> = values
        .iter()
        .map(|&x| -(k * (lambda_plus + c * (x - x1))).ln() / a)
        .collect();
    // renormalizing absorbs the last ulp of the root
    let probs = softmax(&lw);
    let lambda = lambda_plus - c * x1;
    finish(values, a, probs, Some(lambda / c), None)
}

fn finish(
    values: &[f64],
    a: f64,
    probs: Vec<f64>,
    shift: Option<f64>,
    mean_target: Option<f64>,
) -> Result<VariationalSolution> {
    let distribution = Distribution::with_values(probs, values.to_vec())?;
    let probs = distribution.probs();
    let multipliers = fit_multipliers(values, probs, a);

    let mut residual = (probs.iter().sum::<f64>() - 1.0).abs();
    if let Some(mu) = mean_target {
        let scale = mu.abs().max(values[values.len() - 1] - values[0]).max(1.0);
        residual = residual.max((mean_of(probs, values) - mu).abs() / scale);
    }
    if let Some(m) = multipliers {
        for (&x, &p) in values.iter().zip(probs) {
            if p > 0.0 {
                let lhs = (1.0 - a) / a * p.powf(-a);
                let rhs = m.normalization + m.mean * x;
                residual = residual.max((lhs - rhs).abs() / lhs.abs());
            }
        }
    }

    let (fitted_exponent, fit_window) = match shift {
        Some(s) => match density_exponent(values, probs, s) {
            Ok((e, w)) => (Some(e), Some(w)),
            Err(_) => (None, None),
        },
        None => (None, None),
    };
    Ok(VariationalSolution {
        distribution,
        multipliers,
        shift,
        fitted_exponent,
        fit_window,
        residual,
    })
}

/// Recovers `λ` and `c` from the two states of largest probability spread.
fn fit_multipliers(values: &[f64], probs: &[f64], a: f64) -> Option<Multipliers> {
    let g = |p: f64| (1.0 - a) / a * p.powf(-a);
    let pos: Vec<usize> = (0..probs.len()).filter(|&i| probs[i] > 0.0).collect();
    let (&i, &j) = (pos.first()?, pos.last()?);
    if i == j {
        return None;
    }
    let (gi, gj) = (g(probs[i]), g(probs[j]));
    let c = (gj - gi) / (values[j] - values[i]);
    let lambda = gi - c * values[i];
    (c.is_finite() && lambda.is_finite()).then_some(Multipliers {
        normalization: lambda,
        mean: c,
    })
}

/// States ordered by decreasing probability, with the top two ranks and the
/// bottom decile dropped. Returns 1-based inclusive rank bounds.
fn rank_window(len: usize) -> Option<(usize, usize)> {
    let lo = 3;
    let hi = len - len / 10;
    (hi >= lo + 2).then_some((lo, hi))
}

fn density_exponent(values: &[f64], probs: &[f64], shift: f64) -> Result<(f64, (usize, usize))> {
    let mut order: Vec<usize> = (0..probs.len()).filter(|&i| probs[i] > 0.0).collect();
    order.sort_by(|&i, &j| probs[j].total_cmp(&probs[i]).then(i.cmp(&j)));
    let (lo, hi) = rank_window(order.len()).ok_or(Error::InsufficientData {
        needed: 5,
        got: order.len(),
    })?;
    let picked = &order[lo - 1..hi];
    let xs: Vec<f64> = picked.iter().map(|&i| (values[i] + shift).abs().ln()).collect();
    let ys: Vec<f64> = picked.iter().map(|&i| probs[i].ln()).collect();
    Ok((fit_line(&xs, &ys)?.slope, (lo, hi)))
}

/// Log-log fit of the solution's tail against its shifted achievement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawCheck {
    /// Fitted exponent `β̂` of `P(X > x) ∝ (x + shift)^{-β̂}`.
    pub ccdf_exponent: f64,
    /// `1/a - 1`.
    pub expected: f64,
    pub relative_error: f64,
    /// 1-based inclusive level indices used.
    pub window: (usize, usize),
}

/// Fits the exponent of the discrete CCDF `Σ_{x_j > x_k} p_j`.
///
/// The CCDF just above level `k` is assigned to the cell boundary
/// `(x_k + x_{k+1})/2`; levels `3..=max(10, w/10)` are used, which stays
/// clear of both the discrete head and the truncation at the last level.
pub fn verify_power_law(sol: &VariationalSolution, a: f64) -> Result<PowerLawCheck> {
    if !(a > 0.0 && a < 1.0) {
        return Err(domain("a", a, "needs 0 < a < 1"));
    }
    let values = sol.values();
    let probs = sol.probs();
    let w = values.len();
    if w < 10 {
        return Err(Error::InsufficientData { needed: 10, got: w });
    }
    let shift = sol.shift.unwrap_or(0.0);
    if values[0] + shift <= 0.0 {
        return Err(Error::Validation(
            "solution is not a decreasing power law in the shifted levels".into(),
        ));
    }
    // tail[k] = Σ_{j > k} p_j
    let mut tail = vec![0.0; w];
    let mut acc = 0.0;
    for k in (0..w).rev() {
        tail[k] = acc;
        acc += probs[k];
    }
    let lo = 3usize;
    let hi = (w / 10).max(10).min(w - 1);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for k in (lo - 1)..hi {
        if tail[k] > 0.0 {
            xs.push((0.5 * (values[k] + values[k + 1]) + shift).ln());
            ys.push(tail[k].ln());
        }
    }
    let fit = fit_line(&xs, &ys)?;
    let ccdf_exponent = -fit.slope;
    let expected = 1.0 / a - 1.0;
    Ok(PowerLawCheck {
        ccdf_exponent,
        expected,
        relative_error: (ccdf_exponent - expected).abs() / expected,
        window: (lo, hi),
    })
}
