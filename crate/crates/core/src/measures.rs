//! The efficiency functional.
//!
//! Efficiencies compose nonadditively, `η = η₁ + η₂ + a·η₁·η₂`, which makes
//! `1 + a·η` multiplicative over independent subsystems. The per-state
//! efficiency consistent with that law on product distributions is
//! `η_i = (p_i^{-a} - 1) / a`, and the ensemble average is
//! `η = (Σ p_i^{1-a} - 1) / a`. The continuous version replaces the sum by
//! `∫ ρ^{1-a} dx`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::quadrature::{integrate, QuadratureConfig};
use crate::scalar::{from_usize, Real};

/// Loss / nonadditivity coefficient together with the range it was checked against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyParams<T> {
    a: T,
    strict_range: bool,
}

impl<T: Real> EfficiencyParams<T> {
    /// With `strict_range` the coefficient must lie in the Zipf-Pareto
    /// domain `0 < a < 1/2`; otherwise any finite value is accepted
    /// (`a = -1` is the Carnot case, `a = 0` the additive limit).
    pub fn new(a: T, strict_range: bool) -> Result<Self> {
        if !a.is_finite() {
            return Err(domain("a", a.as_f64(), "must be finite"));
        }
        if strict_range && !(a > T::zero() && a < T::lit(0.5)) {
            return Err(domain("a", a.as_f64(), "strict range is 0 < a < 0.5"));
        }
        Ok(Self { a, strict_range })
    }

    pub fn strict(a: T) -> Result<Self> {
        Self::new(a, true)
    }

    pub fn a(&self) -> T {
        self.a
    }

    pub fn strict_range(&self) -> bool {
        self.strict_range
    }

    pub fn compose(&self, eta1: T, eta2: T) -> T {
        compose_efficiency(eta1, eta2, self.a)
    }

    pub fn per_state(&self, p: T) -> Result<T> {
        per_state_efficiency(p, self.a)
    }

    pub fn discrete(&self, p: &Distribution<T>) -> Result<T> {
        discrete_efficiency(p, self.a)
    }
}

/// A finite probability vector, optionally attached to achievement values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Distribution<T> {
    probs: Vec<T>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    values: Option<Vec<T>>,
}

impl<T: Real> Distribution<T> {
    /// Validates `probs`: non-empty, every entry finite and `>= 0`, and
    /// `|Σp - 1|` within [`Real::normalization_tol`]. Nothing is rescaled.
    pub fn new(probs: Vec<T>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::Validation("distribution has no states".into()));
        }
        for (i, &p) in probs.iter().enumerate() {
            if !p.is_finite() || p < T::zero() {
                return Err(Error::Validation(format!(
                    "probability {i} is {p}; entries must be finite and non-negative"
                )));
            }
        }
        let total: T = probs.iter().copied().sum();
        if (total - T::one()).abs() > T::normalization_tol() {
            return Err(Error::Validation(format!(
                "probabilities sum to {total}, expected 1"
            )));
        }
        Ok(Self {
            probs,
            values: None,
        })
    }

    pub fn with_values(probs: Vec<T>, values: Vec<T>) -> Result<Self> {
        let mut d = Self::new(probs)?;
        if values.len() != d.probs.len() {
            return Err(Error::Validation(format!(
                "{} values for {} probabilities",
                values.len(),
                d.probs.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Validation(format!("non-finite achievement value {v}")));
        }
        d.values = Some(values);
        Ok(d)
    }

    /// Divides non-negative weights by their sum. This is the only way a
    /// vector gets rescaled into a distribution.
    pub fn renormalize(weights: &[T]) -> Result<Self> {
        if weights.iter().any(|w| !w.is_finite() || *w < T::zero()) {
            return Err(Error::Validation(
                "weights must be finite and non-negative".into(),
            ));
        }
        let total: T = weights.iter().copied().sum();
        if !(total > T::zero()) {
            return Err(Error::EmptyInput("weights sum to zero"));
        }
        let probs: Vec<T> = weights.iter().map(|&w| w / total).collect();
        Self::new(probs)
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Validation("distribution has no states".into()));
        }
        let p = T::one() / from_usize::<T>(n);
        Ok(Self {
            probs: vec![p; n],
            values: None,
        })
    }

    /// All mass on state `index` of `n`.
    pub fn degenerate(n: usize, index: usize) -> Result<Self> {
        if index >= n {
            return Err(Error::Validation(format!(
                "state {index} out of range for {n} states"
            )));
        }
        let mut probs = vec![T::zero(); n];
        probs[index] = T::one();
        Ok(Self {
            probs,
            values: None,
        })
    }

    /// Product distribution `r_{kj} = p_k q_j` of two independent systems,
    /// laid out row-major in `k`.
    pub fn product(&self, other: &Self) -> Self {
        let probs = self
            .probs
            .iter()
            .flat_map(|&p| other.probs.iter().map(move |&q| p * q))
            .collect();
        Self {
            probs,
            values: None,
        }
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn values(&self) -> Option<&[T]> {
        self.values.as_deref()
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Number of states carrying positive mass.
    pub fn support_size(&self) -> usize {
        self.probs.iter().filter(|&&p| p > T::zero()).count()
    }

    pub fn is_degenerate(&self) -> bool {
        self.support_size() == 1
    }

    /// Mean achievement `Σ p_i x_i`, if values are attached.
    pub fn mean_value(&self) -> Option<T> {
        self.values
            .as_ref()
            .map(|v| v.iter().zip(&self.probs).map(|(&x, &p)| x * p).sum())
    }

    /// L1 distance to another distribution over the same number of states.
    pub fn l1_distance(&self, other: &Self) -> Result<T> {
        check_same_len(self, other)?;
        Ok(self
            .probs
            .iter()
            .zip(&other.probs)
            .map(|(&p, &q)| (p - q).abs())
            .sum())
    }
}

pub(crate) fn check_same_len<T>(p: &Distribution<T>, q: &Distribution<T>) -> Result<()> {
    if p.probs.len() != q.probs.len() {
        return Err(Error::Validation(format!(
            "distributions have {} and {} states",
            p.probs.len(),
            q.probs.len()
        )));
    }
    Ok(())
}

/// Work and heat of an engine cycle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EngineExchange<T> {
    pub work: T,
    pub heat: T,
}

/// `η = W / Q`. Negative work gives negative efficiency.
pub fn engine_efficiency<T: Real>(e: EngineExchange<T>) -> Result<T> {
    if !(e.heat > T::zero()) || !e.heat.is_finite() {
        return Err(domain("heat", e.heat.as_f64(), "must be positive"));
    }
    if !e.work.is_finite() {
        return Err(domain("work", e.work.as_f64(), "must be finite"));
    }
    Ok(e.work / e.heat)
}

/// `η₁ + η₂ + a·η₁·η₂`; with `a = -1` this is `1 - (1-η₁)(1-η₂)`.
pub fn compose_efficiency<T: Real>(eta1: T, eta2: T, a: T) -> T {
    eta1 + eta2 + a * eta1 * eta2
}

/// `(p^{-a} - 1) / a`, or `-ln p` when `|a|` is below the limit threshold.
pub fn per_state_efficiency<T: Real>(p: T, a: T) -> Result<T> {
    if !(p > T::zero()) {
        return Err(domain("p", p.as_f64(), "per-state efficiency needs p > 0"));
    }
    if p > T::one() {
        return Err(domain("p", p.as_f64(), "probability exceeds 1"));
    }
    if !a.is_finite() {
        return Err(domain("a", a.as_f64(), "must be finite"));
    }
    if a.abs() < T::limit_threshold() {
        return Ok(-p.ln());
    }
    // expm1 keeps precision when a·ln p is small
    Ok((-a * p.ln()).exp_m1() / a)
}

/// Ensemble efficiency `(Σ p_i^{1-a} - 1) / a` for `0 <= a <= 1`.
///
/// Zero-probability states contribute nothing. Below the limit threshold the
/// Shannon entropy `-Σ p ln p` is returned; at `a = 1` the value is the number
/// of occupied states minus one.
pub fn discrete_efficiency<T: Real>(p: &Distribution<T>, a: T) -> Result<T> {
    if !(a > -T::limit_threshold() && a <= T::one()) {
        return Err(domain("a", a.as_f64(), "discrete efficiency needs 0 <= a <= 1"));
    }
    if a.abs() < T::limit_threshold() {
        return Ok(shannon(p.probs()));
    }
    let one_minus = T::one() - a;
    let sum: T = p
        .probs()
        .iter()
        .filter(|&&q| q > T::zero())
        .map(|&q| q.powf(one_minus))
        .sum();
    Ok((sum - T::one()) / a)
}

pub(crate) fn shannon<T: Real>(probs: &[T]) -> T {
    -probs
        .iter()
        .filter(|&&q| q > T::zero())
        .map(|&q| q * q.ln())
        .sum::<T>()
}

/// A probability density on `[lower, upper]` (`upper` may be `+∞`).
#[derive(Clone)]
pub struct PdfSpec<T> {
    density: Arc<dyn Fn(T) -> T + Send + Sync>,
    lower: T,
    upper: T,
}

impl<T: Real> fmt::Debug for PdfSpec<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PdfSpec")
            .field("lower", &self.lower)
            .field("upper", &self.upper)
            .finish_non_exhaustive()
    }
}

impl<T: Real> PdfSpec<T> {
    pub fn new<F>(density: F, lower: T, upper: T) -> Result<Self>
    where
        F: Fn(T) -> T + Send + Sync + 'static,
    {
        if !lower.is_finite() || upper.is_nan() || !(upper > lower) {
            return Err(Error::Validation(format!(
                "density support [{lower}, {upper}] is invalid"
            )));
        }
        Ok(Self {
            density: Arc::new(density),
            lower,
            upper,
        })
    }

    pub fn density(&self, x: T) -> T {
        (self.density)(x)
    }

    pub fn lower(&self) -> T {
        self.lower
    }

    pub fn upper(&self) -> T {
        self.upper
    }

    /// `∫ g(ρ(x)) dx` over the support.
    pub fn integrate_of<G>(&self, g: G, quad: &QuadratureConfig) -> Result<T>
    where
        G: Fn(T) -> T,
    {
        let rho = &self.density;
        integrate(|x| g(rho(x)), self.lower, self.upper, quad).map(|r| r.value)
    }

    /// Checks non-negativity and unit mass (tolerance 1e-9, or the quadrature
    /// tolerance if that is looser).
    pub fn validate(&self, quad: &QuadratureConfig) -> Result<()> {
        let negative_mass = self.integrate_of(|r| r.min(T::zero()), quad)?;
        if negative_mass < T::zero() {
            return Err(Error::Validation(format!(
                "density is negative on part of its support (mass {negative_mass})"
            )));
        }
        let mass = self.integrate_of(|r| r, quad)?;
        let tol = T::lit(1e-9f64.max(quad.abs_tol).max(quad.rel_tol));
        if (mass - T::one()).abs() > tol {
            return Err(Error::Validation(format!(
                "density integrates to {mass}, expected 1"
            )));
        }
        Ok(())
    }
}

/// `(∫ ρ^{1-a} dx - 1) / a` for `0 < a < 1/2`; may be negative.
pub fn continuous_efficiency<T: Real>(
    pdf: &PdfSpec<T>,
    a: T,
    quad: &QuadratureConfig,
) -> Result<T> {
    if !(a > T::zero() && a < T::lit(0.5)) {
        return Err(domain("a", a.as_f64(), "continuous efficiency needs 0 < a < 0.5"));
    }
    pdf.validate(quad)?;
    let one_minus = T::one() - a;
    let integral = pdf.integrate_of(
        |r| {
            if r > T::zero() {
                r.powf(one_minus)
            } else {
                T::zero()
            }
        },
        quad,
    )?;
    Ok((integral - T::one()) / a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn dist(p: &[f64]) -> Distribution<f64> {
        Distribution::new(p.to_vec()).unwrap()
    }

    #[test]
    fn engine_ratio() {
        let e = |w, q| engine_efficiency(EngineExchange { work: w, heat: q });
        assert_eq!(e(0.0, 5.0).unwrap(), 0.0);
        assert_eq!(e(3.0, 4.0).unwrap(), 0.75);
        assert_eq!(e(-2.0, 4.0).unwrap(), -0.5);
        assert!(matches!(e(1.0, 0.0), Err(Error::Domain { .. })));
        assert!(matches!(e(1.0, -3.0), Err(Error::Domain { .. })));
    }

    #[test]
    fn composition_cases() {
        assert_abs_diff_eq!(compose_efficiency(0.5, 0.5, -1.0), 0.75, epsilon = 1e-15);
        assert_eq!(compose_efficiency(0.37, 0.0, 0.8), 0.37);
        assert_abs_diff_eq!(compose_efficiency(0.3, 0.2, 0.0), 0.5, epsilon = 1e-15);
        // Kelvin form
        let (e1, e2) = (0.31, 0.47);
        assert_abs_diff_eq!(
            compose_efficiency(e1, e2, -1.0),
            1.0 - (1.0 - e1) * (1.0 - e2),
            epsilon = 1e-15
        );
    }

    #[test]
    fn per_state_values() {
        assert_eq!(per_state_efficiency(1.0, 0.3).unwrap(), 0.0);
        assert_abs_diff_eq!(per_state_efficiency(0.25, 0.5).unwrap(), 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(
            per_state_efficiency(0.5, 0.0).unwrap(),
            std::f64::consts::LN_2,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            per_state_efficiency(0.5, 1e-12).unwrap(),
            std::f64::consts::LN_2,
            epsilon = 1e-11
        );
        assert!(per_state_efficiency(0.0, 0.3).is_err());
        assert!(per_state_efficiency(1.2, 0.3).is_err());
    }

    #[test]
    fn discrete_values() {
        assert_eq!(discrete_efficiency(&dist(&[1.0, 0.0, 0.0]), 0.3).unwrap(), 0.0);
        // (4^0.25 - 1)/0.25
        let u4 = Distribution::<f64>::uniform(4).unwrap();
        assert_abs_diff_eq!(
            discrete_efficiency(&u4, 0.25).unwrap(),
            (4f64.powf(0.25) - 1.0) / 0.25,
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(discrete_efficiency(&u4, 0.25).unwrap(), 1.656854, epsilon = 1e-6);
    }

    #[test]
    fn discrete_limits() {
        let p = dist(&[0.1, 0.2, 0.3, 0.4]);
        let shannon = -p.probs().iter().map(|q| q * q.ln()).sum::<f64>();
        assert_abs_diff_eq!(discrete_efficiency(&p, 0.0).unwrap(), shannon, epsilon = 1e-15);
        assert_abs_diff_eq!(discrete_efficiency(&p, 1e-7).unwrap(), shannon, epsilon = 1e-6);
        // a = 1 counts occupied states
        let q = dist(&[0.5, 0.0, 0.25, 0.25]);
        assert_abs_diff_eq!(discrete_efficiency(&q, 1.0).unwrap(), 2.0, epsilon = 1e-15);
        assert!(discrete_efficiency(&p, -0.1).is_err());
        assert!(discrete_efficiency(&p, 1.1).is_err());
    }

    #[test]
    fn two_state_maximum_at_half() {
        let a = 0.3;
        let best = discrete_efficiency(&dist(&[0.5, 0.5]), a).unwrap();
        for k in 1..1000 {
            let p = k as f64 / 1000.0;
            let v = discrete_efficiency(&dist(&[p, 1.0 - p]), a).unwrap();
            assert!(v <= best + 1e-15);
        }
    }

    #[test]
    fn distribution_validation() {
        assert!(Distribution::<f64>::new(vec![]).is_err());
        assert!(Distribution::new(vec![0.5, 0.6]).is_err());
        assert!(Distribution::new(vec![1.5, -0.5]).is_err());
        assert!(Distribution::new(vec![f64::NAN, 1.0]).is_err());
        assert!(Distribution::new(vec![0.5, 0.5 + 1e-13]).is_ok());
        assert!(Distribution::with_values(vec![0.5, 0.5], vec![1.0]).is_err());
        assert!(Distribution::with_values(vec![0.5, 0.5], vec![1.0, f64::INFINITY]).is_err());
        let r = Distribution::renormalize(&[2.0, 6.0]).unwrap();
        assert_eq!(r.probs(), &[0.25, 0.75]);
        assert!(Distribution::renormalize(&[0.0, 0.0]).is_err());
    }

    #[test]
    fn strict_params() {
        assert!(EfficiencyParams::strict(0.3).is_ok());
        assert!(EfficiencyParams::strict(0.5).is_err());
        assert!(EfficiencyParams::strict(0.0).is_err());
        let carnot = EfficiencyParams::new(-1.0, false).unwrap();
        assert_abs_diff_eq!(carnot.compose(0.5, 0.5), 0.75, epsilon = 1e-15);
        assert!(EfficiencyParams::new(f64::NAN, false).is_err());
    }

    #[test]
    fn continuous_uniform_is_zero() {
        let quad = QuadratureConfig::default();
        let pdf = PdfSpec::new(|_x: f64| 1.0, 0.0, 1.0).unwrap();
        assert_abs_diff_eq!(continuous_efficiency(&pdf, 0.3, &quad).unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn continuous_rejects_bad_inputs() {
        let quad = QuadratureConfig::default();
        let not_normalized = PdfSpec::new(|_x: f64| 2.0, 0.0, 1.0).unwrap();
        assert!(matches!(
            continuous_efficiency(&not_normalized, 0.3, &quad),
            Err(Error::Validation(_))
        ));
        let negative = PdfSpec::new(|x: f64| 4.0 * x - 1.0, 0.0, 1.0).unwrap();
        assert!(continuous_efficiency(&negative, 0.3, &quad).is_err());
        let ok = PdfSpec::new(|_x: f64| 1.0, 0.0, 1.0).unwrap();
        assert!(continuous_efficiency(&ok, 0.5, &quad).is_err());
        assert!(PdfSpec::new(|_x: f64| 1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn continuous_divergence_is_typed() {
        // ρ = x^-1.1 / 10 on [1, ∞): ρ^{0.6} ~ x^-0.66 is not integrable
        let quad = QuadratureConfig::default();
        let pdf = PdfSpec::new(|x: f64| 0.1 * x.powf(-1.1), 1.0, f64::INFINITY).unwrap();
        let err = continuous_efficiency(&pdf, 0.4, &quad).unwrap_err();
        assert!(matches!(err, Error::Divergent { .. }));
    }

    #[test]
    fn product_distribution_layout() {
        let p = dist(&[0.25, 0.75]);
        let q = dist(&[0.5, 0.5]);
        let r = p.product(&q);
        assert_eq!(r.probs(), &[0.125, 0.125, 0.375, 0.375]);
    }
}
