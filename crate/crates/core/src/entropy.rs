//! Entropies compared against the efficiency: Shannon (discrete and for a
//! Pareto density) and varentropy in its discrete and continuous forms.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result, Sign};
use crate::measures::{shannon, Distribution, PdfSpec};
use crate::quadrature::QuadratureConfig;
use crate::scalar::Real;

/// Parameters of the continuous power-law varentropy
/// `S = ∫ ρ ((Zρ)^{-b} - m) / (1 - b) dx`.
///
/// The invariant measure `m(x)` only enters through `C = ∫ ρ m dx`, which is
/// stored directly. The dimension constant is fixed to one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarentropyConfig<T> {
    b: T,
    z: T,
    c: T,
}

impl<T: Real> VarentropyConfig<T> {
    pub fn new(b: T, z: T, c: T) -> Result<Self> {
        if !(b > T::zero() && b < T::one()) {
            return Err(domain("b", b.as_f64(), "exponent must satisfy 0 < b < 1"));
        }
        if !(z > T::zero()) || !z.is_finite() {
            return Err(domain("Z", z.as_f64(), "normalization must be positive"));
        }
        if !c.is_finite() {
            return Err(domain("C", c.as_f64(), "must be finite"));
        }
        Ok(Self { b, z, c })
    }

    /// `Z = 1/β`, `b = 1/(β+1)`, `C = 1`: the choice that makes the Pareto
    /// varentropy non-negative.
    pub fn pareto(beta: T) -> Result<Self> {
        if !(beta > T::zero()) {
            return Err(domain("beta", beta.as_f64(), "must be positive"));
        }
        Self::new(T::one() / (beta + T::one()), T::one() / beta, T::one())
    }

    pub fn b(&self) -> T {
        self.b
    }
    pub fn z(&self) -> T {
        self.z
    }
    pub fn c(&self) -> T {
        self.c
    }
    pub fn a_dim(&self) -> T {
        T::one()
    }

    pub fn with_c(self, c: T) -> Result<Self> {
        Self::new(self.b, self.z, c)
    }
}

/// `-Σ p ln p` in nats.
pub fn shannon_discrete<T: Real>(p: &Distribution<T>) -> T {
    shannon(p.probs())
}

/// Differential entropy of the Pareto density `β x^{-(β+1)}` on `[1, ∞)`:
/// `1 + 1/β - ln β`. Negative once `ln β > 1 + 1/β`.
pub fn shannon_pareto<T: Real>(beta: T) -> Result<T> {
    if !(beta > T::zero()) || !beta.is_finite() {
        return Err(domain("beta", beta.as_f64(), "must be positive"));
    }
    Ok(T::one() + beta.recip() - beta.ln())
}

/// `(Σ p^{1-b} - 1) / (1 - b)` for `0 < b < 1`.
pub fn varentropy_discrete<T: Real>(p: &Distribution<T>, b: T) -> Result<T> {
    if !(b > T::zero() && b < T::one()) {
        return Err(domain("b", b.as_f64(), "varentropy needs 0 < b < 1"));
    }
    let one_minus = T::one() - b;
    let sum: T = p
        .probs()
        .iter()
        .filter(|&&q| q > T::zero())
        .map(|&q| q.powf(one_minus))
        .sum();
    Ok((sum - T::one()) / one_minus)
}

/// Boltzmann-Shannon varentropy of the Pareto law with `C = -1`: `1/β`.
pub fn varentropy_bs_pareto<T: Real>(beta: T) -> Result<T> {
    if !(beta > T::zero()) {
        return Err(domain("beta", beta.as_f64(), "must be positive"));
    }
    Ok(beta.recip())
}

/// Same quantity with an arbitrary measure constant: `1 + 1/β + C`.
pub fn varentropy_bs_pareto_with_c<T: Real>(beta: T, c: T) -> Result<T> {
    if !(beta > T::zero()) {
        return Err(domain("beta", beta.as_f64(), "must be positive"));
    }
    Ok(T::one() + beta.recip() + c)
}

/// `(∫ ρ (Zρ)^{-b} dx - C) / (1 - b)` by quadrature.
pub fn varentropy_power_numeric<T: Real>(
    pdf: &PdfSpec<T>,
    cfg: &VarentropyConfig<T>,
    quad: &QuadratureConfig,
) -> Result<T> {
    pdf.validate(quad)?;
    let (b, z) = (cfg.b, cfg.z);
    let integral = pdf.integrate_of(
        |r| {
            if r > T::zero() {
                r * (z * r).powf(-b)
            } else {
                T::zero()
            }
        },
        quad,
    )?;
    Ok((integral - cfg.c) / (T::one() - b))
}

/// Closed form for the Pareto law with `C` left free:
/// `((β+1)/β) (β/(β-1) - C)`.
pub fn varentropy_power_pareto_with_c<T: Real>(beta: T, c: T) -> Result<T> {
    check_power_beta(beta)?;
    let one = T::one();
    Ok((beta + one) / beta * (beta / (beta - one) - c))
}

/// `(β+1) / (β(β-1))`, the `C = 1` case. Diverges as `β → 1⁺`.
pub fn varentropy_power_pareto<T: Real>(beta: T) -> Result<T> {
    check_power_beta(beta)?;
    let one = T::one();
    Ok((beta + one) / (beta * (beta - one)))
}

fn check_power_beta<T: Real>(beta: T) -> Result<()> {
    if beta.is_nan() || beta <= T::one() {
        return Err(domain("beta", beta.as_f64(), "power varentropy needs beta > 1"));
    }
    if beta < T::one() + T::lit(1e-9) {
        return Err(Error::Divergent {
            what: "power-law varentropy",
            sign: Sign::Positive,
        });
    }
    Ok(())
}
