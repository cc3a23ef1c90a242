//! Pareto and Zipf model algebra.
//!
//! A Pareto law `P(X > x) = (x_min / x)^β` maximizes the efficiency with
//! coefficient `a = 1/(β+1)`. Its closed-form efficiency changes sign at
//! the root of `g(x) = x^x (1-x)^{1-x} - (1-2x)` on `(0, 1/2)`.

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result, Sign};
use crate::measures::PdfSpec;
use crate::roots::solve_bracketed_root;
use crate::scalar::{from_usize, Real};

/// Bracket for the efficiency zero, endpoint signs checked before solving.
pub const EFFICIENCY_ROOT_BRACKET: (f64, f64) = (0.01, 0.49);
/// Bracket for the zero of the Pareto differential entropy in β.
pub const SHANNON_ROOT_BRACKET: (f64, f64) = (1.0, 10.0);

/// Continuous Pareto law with scale `x_min` and tail index `beta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParetoModel<T> {
    x_min: T,
    beta: T,
}

impl<T: Real> ParetoModel<T> {
    pub fn new(x_min: T, beta: T) -> Result<Self> {
        if !(x_min > T::zero()) || !x_min.is_finite() {
            return Err(domain("x_min", x_min.as_f64(), "must be positive"));
        }
        if !(beta > T::zero()) || !beta.is_finite() {
            return Err(domain("beta", beta.as_f64(), "must be positive"));
        }
        Ok(Self { x_min, beta })
    }

    /// `x_min = 1`.
    pub fn standard(beta: T) -> Result<Self> {
        Self::new(T::one(), beta)
    }

    pub fn from_a(x_min: T, a: T) -> Result<Self> {
        Self::new(x_min, beta_from_a(a)?)
    }

    /// Checks a deserialized model.
    pub fn validated(self) -> Result<Self> {
        Self::new(self.x_min, self.beta)
    }

    pub fn x_min(&self) -> T {
        self.x_min
    }

    pub fn beta(&self) -> T {
        self.beta
    }

    /// `a = 1/(β+1)`.
    pub fn a(&self) -> T {
        T::one() / (self.beta + T::one())
    }

    /// True when `β > 1`, i.e. `a < 1/2`.
    pub fn in_zp_range(&self) -> bool {
        self.beta > T::one()
    }

    pub fn ccdf(&self, x: T) -> Result<T> {
        self.check_support(x)?;
        Ok((self.x_min / x).powf(self.beta))
    }

    pub fn pdf(&self, x: T) -> Result<T> {
        self.check_support(x)?;
        Ok(self.density_unchecked(x))
    }

    fn density_unchecked(&self, x: T) -> T {
        self.beta / self.x_min * (self.x_min / x).powf(self.beta + T::one())
    }

    fn check_support(&self, x: T) -> Result<()> {
        if x.is_nan() || x < self.x_min {
            return Err(domain("x", x.as_f64(), "below the Pareto scale x_min"));
        }
        Ok(())
    }

    /// The density as a quadrature-ready [`PdfSpec`] on `[x_min, ∞)`.
    pub fn pdf_spec(&self) -> PdfSpec<T> {
        let model = *self;
        PdfSpec::new(
            move |x| {
                if x < model.x_min {
                    T::zero()
                } else {
                    model.density_unchecked(x)
                }
            },
            self.x_min,
            T::infinity(),
        )
        .expect("Pareto support is valid by construction")
    }

    /// Inverse-CDF draws `x_min · u^{-1/β}`, `u ~ U(0,1)`; deterministic in `seed`.
    pub fn sample(&self, n: usize, seed: u64) -> Vec<T> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inv_beta = 1.0 / self.beta.as_f64();
        let x_min = self.x_min.as_f64();
        (0..n)
            .map(|_| {
                let u: f64 = rng.sample(Open01);
                // clamp keeps rounding from stepping below the scale
                T::lit((x_min * u.powf(-inv_beta)).max(x_min))
            })
            .collect()
    }
}

/// Rank law `x_r = x₁ / r^α`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZipfModel<T> {
    x1: T,
    alpha: T,
}

impl<T: Real> ZipfModel<T> {
    pub fn new(x1: T, alpha: T) -> Result<Self> {
        if !(x1 > T::zero()) || !x1.is_finite() {
            return Err(domain("x1", x1.as_f64(), "must be positive"));
        }
        if !(alpha > T::zero()) || !alpha.is_finite() {
            return Err(domain("alpha", alpha.as_f64(), "must be positive"));
        }
        Ok(Self { x1, alpha })
    }

    pub fn x1(&self) -> T {
        self.x1
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn value_at(&self, rank: usize) -> T {
        self.x1 / from_usize::<T>(rank).powf(self.alpha)
    }
}

/// `(r, x₁/r^α)` for `r = 1..=ranks`.
pub fn zipf_curve<T: Real>(z: &ZipfModel<T>, ranks: usize) -> Result<Vec<(usize, T)>> {
    if ranks == 0 {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    Ok((1..=ranks).map(|r| (r, z.value_at(r))).collect())
}

/// `β = 1/a - 1` for `0 < a < 1`.
pub fn beta_from_a<T: Real>(a: T) -> Result<T> {
    if !(a > T::zero() && a < T::one()) {
        return Err(domain("a", a.as_f64(), "needs 0 < a < 1"));
    }
    Ok(a.recip() - T::one())
}

/// `a = 1/(β+1)` for `β > 0`.
pub fn a_from_beta<T: Real>(beta: T) -> Result<T> {
    if !(beta > T::zero()) || !beta.is_finite() {
        return Err(domain("beta", beta.as_f64(), "must be positive"));
    }
    Ok((beta + T::one()).recip())
}

/// Closed-form efficiency of the Pareto law at its own coefficient
/// `a = 1/(β+1)`: `(β+1)[β^{-1/(β+1)} β/(β-1) - 1]`.
///
/// `β <= 1` is reported as divergence to `+∞`.
pub fn zp_efficiency<T: Real>(beta: T) -> Result<T> {
    if beta.is_nan() || beta <= T::zero() {
        return Err(domain("beta", beta.as_f64(), "must be positive"));
    }
    if beta <= T::one() {
        return Err(Error::Divergent {
            what: "Zipf-Pareto efficiency",
            sign: Sign::Positive,
        });
    }
    if beta.is_infinite() {
        return Err(Error::Divergent {
            what: "Zipf-Pareto efficiency",
            sign: Sign::Negative,
        });
    }
    let one = T::one();
    // ln[β^{-1/(β+1)} · β/(β-1)] = -ln β/(β+1) - ln(1 - 1/β)
    let log_ratio = -beta.ln() / (beta + one) - (-beta.recip()).ln_1p();
    Ok((beta + one) * log_ratio.exp_m1())
}

/// The same efficiency written in `a`:
/// `(1/a)[(a/(1-a))^a (1-a)/(1-2a) - 1]`.
pub fn zp_efficiency_from_a<T: Real>(a: T) -> Result<T> {
    if !(a > T::zero() && a < T::one()) {
        if a == T::zero() {
            return Err(Error::Divergent {
                what: "Zipf-Pareto efficiency",
                sign: Sign::Negative,
            });
        }
        return Err(domain("a", a.as_f64(), "needs 0 < a < 1"));
    }
    if a >= T::lit(0.5) {
        return Err(Error::Divergent {
            what: "Zipf-Pareto efficiency",
            sign: Sign::Positive,
        });
    }
    let one = T::one();
    let two = T::lit(2.0);
    let log_ratio = a * (a / (one - a)).ln() + ((one - a) / (one - two * a)).ln();
    Ok(log_ratio.exp_m1() / a)
}

/// Gini coefficient of a Pareto law, `1/(2β - 1)`.
pub fn gini_from_beta<T: Real>(beta: T) -> Result<T> {
    if beta.is_nan() || beta <= T::lit(0.5) {
        return Err(domain("beta", beta.as_f64(), "Gini needs beta > 1/2"));
    }
    Ok((T::lit(2.0) * beta - T::one()).recip())
}

/// `g(x) = x^x (1-x)^{1-x} - (1-2x)`, with `g(0) = 0`.
pub fn efficiency_root_function<T: Real>(x: T) -> T {
    let one = T::one();
    let head = if x == T::zero() {
        one
    } else {
        (x * x.ln() + (one - x) * (one - x).ln()).exp()
    };
    head - (one - T::lit(2.0) * x)
}

/// The coefficient `a*` in `(0, 1/2)` at which the Pareto efficiency
/// vanishes (the unique root of [`efficiency_root_function`]).
pub fn zero_efficiency_threshold<T: Real>(tol: T) -> Result<T> {
    if !(tol > T::zero()) {
        return Err(domain("tol", tol.as_f64(), "must be positive"));
    }
    let (lo, hi) = (
        T::lit(EFFICIENCY_ROOT_BRACKET.0),
        T::lit(EFFICIENCY_ROOT_BRACKET.1),
    );
    let (g_lo, g_hi) = (efficiency_root_function(lo), efficiency_root_function(hi));
    if !(g_lo < T::zero() && g_hi > T::zero()) {
        return Err(Error::NotBracketed {
            lo: lo.as_f64(),
            hi: hi.as_f64(),
            f_lo: g_lo.as_f64(),
            f_hi: g_hi.as_f64(),
        });
    }
    solve_bracketed_root(efficiency_root_function, lo, hi, tol)
}

/// The tail index `β` where the Pareto differential entropy
/// `1 + 1/β - ln β` crosses zero.
pub fn zero_shannon_threshold<T: Real>(tol: T) -> Result<T> {
    if !(tol > T::zero()) {
        return Err(domain("tol", tol.as_f64(), "must be positive"));
    }
    let f = |b: T| T::one() + b.recip() - b.ln();
    solve_bracketed_root(
        f,
        T::lit(SHANNON_ROOT_BRACKET.0),
        T::lit(SHANNON_ROOT_BRACKET.1),
        tol,
    )
}

/// Every sign-change threshold in one place.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds<T> {
    /// Coefficient where the Pareto efficiency vanishes.
    pub a_star: T,
    /// `1/a* - 1`.
    pub beta_star: T,
    /// Gini coefficient at `beta_star`.
    pub gini_star: T,
    /// Tail index where the Pareto differential entropy vanishes.
    pub shannon_zero_beta: T,
}

pub fn thresholds<T: Real>(tol: T) -> Result<Thresholds<T>> {
    let a_star = zero_efficiency_threshold(tol)?;
    let beta_star = beta_from_a(a_star)?;
    Ok(Thresholds {
        a_star,
        beta_star,
        gini_star: gini_from_beta(beta_star)?,
        shannon_zero_beta: zero_shannon_threshold(tol)?,
    })
}
