//! Adaptive 21-point Gauss–Kronrod quadrature.
//!
//! Semi-infinite ranges `[lo, ∞)` are mapped onto `(0, 1]`: with `lo > 0` by
//! `t = lo / x`, otherwise by `x = lo + (1 - t) / t`. Before integrating, the
//! mapped integrand is probed on dyadic slices `[2^-(k+1), 2^-k]` close to
//! `t = 0`; if successive slices stop shrinking the integral is reported as
//! divergent.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Sign};
use crate::scalar::Real;

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689,
    0.973_906_528_517_171_720_077_964_012_084,
    0.930_157_491_355_708_226_001_207_180_060,
    0.865_063_366_688_984_510_732_096_688_423,
    0.780_817_726_586_416_897_063_717_578_345,
    0.679_409_568_299_024_406_234_327_365_115,
    0.562_757_134_668_604_683_339_000_099_273,
    0.433_395_394_129_247_190_799_265_943_166,
    0.294_392_862_701_460_198_131_126_603_104,
    0.148_874_338_981_631_210_884_826_001_130,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062,
    0.032_558_162_307_964_727_478_818_972_459,
    0.054_755_896_574_351_996_031_381_300_245,
    0.075_039_674_810_919_952_767_043_140_916,
    0.093_125_454_583_697_605_535_065_465_083,
    0.109_387_158_802_297_641_899_210_590_326,
    0.123_491_976_262_065_851_077_208_980_030,
    0.134_709_217_311_473_325_928_054_001_772,
    0.142_775_938_577_060_080_797_094_273_139,
    0.147_739_104_901_338_491_374_841_515_972,
    0.149_445_554_002_916_905_664_936_468_390,
];

// Weights of the embedded 10-point Gauss rule (nodes XGK[1], XGK[3], ...).
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893,
    0.149_451_349_150_580_593_145_776_339_658,
    0.219_086_362_515_982_043_995_534_934_228,
    0.269_266_719_309_996_355_091_226_921_569,
    0.295_524_224_714_752_870_173_892_994_651,
];

/// Tolerances and limits for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    /// Successive tail slices shrinking by less than this factor signal divergence.
    pub divergence_ratio: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-9,
            max_subdivisions: 4000,
            // 2^-0.05: tails decaying slower than x^-0.95 (in x) are rejected
            divergence_ratio: 0.966,
        }
    }
}

impl QuadratureConfig {
    /// Tighter tolerances, used by oracle checks.
    pub fn precise() -> Self {
        Self {
            abs_tol: 1e-13,
            rel_tol: 1e-12,
            ..Self::default()
        }
    }
}

/// Result of an integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral<T> {
    pub value: T,
    pub abs_error: T,
    pub intervals: usize,
}

struct Segment<T> {
    lo: T,
    hi: T,
    value: T,
    error: T,
}

impl<T: Real> PartialEq for Segment<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<T: Real> Eq for Segment<T> {}
impl<T: Real> PartialOrd for Segment<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Real> Ord for Segment<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .partial_cmp(&other.error)
            .unwrap_or(Ordering::Equal)
    }
}

/// One application of the 21-point Kronrod rule with its Gauss error estimate.
fn kronrod21<T: Real, F: Fn(T) -> T>(f: &F, lo: T, hi: T) -> (T, T) {
    let half = T::lit(0.5);
    let center = half * (lo + hi);
    let half_len = half * (hi - lo);
    let f_center = f(center);

    let mut res_kronrod = f_center * T::lit(WGK[10]);
    let mut res_gauss = T::zero();
    let mut res_abs = res_kronrod.abs();
    let mut fv1 = [T::zero(); 10];
    let mut fv2 = [T::zero(); 10];

    for j in 0..10 {
        let x = half_len * T::lit(XGK[j]);
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv1[j] = f1;
        fv2[j] = f2;
        res_kronrod = res_kronrod + T::lit(WGK[j]) * (f1 + f2);
        res_abs = res_abs + T::lit(WGK[j]) * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_gauss = res_gauss + T::lit(WG[j / 2]) * (f1 + f2);
        }
    }

    let mean = res_kronrod * half;
    let mut res_asc = T::lit(WGK[10]) * (f_center - mean).abs();
    for j in 0..10 {
        res_asc = res_asc + T::lit(WGK[j]) * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let scale = half_len.abs();
    let result = res_kronrod * half_len;
    let res_abs = res_abs * scale;
    let res_asc = res_asc * scale;
    let mut err = ((res_kronrod - res_gauss) * half_len).abs();

    if res_asc != T::zero() && err != T::zero() {
        let ratio = (T::lit(200.0) * err / res_asc).powf(T::lit(1.5));
        err = if ratio < T::one() {
            res_asc * ratio
        } else {
            res_asc
        };
    }
    let floor = T::lit(50.0) * T::epsilon() * res_abs;
    if floor > err {
        err = floor;
    }
    (result, err)
}

fn adaptive<T: Real, F: Fn(T) -> T>(
    f: &F,
    lo: T,
    hi: T,
    cfg: &QuadratureConfig,
) -> Result<Integral<T>> {
    let abs_tol = T::lit(cfg.abs_tol);
    let rel_tol = T::lit(cfg.rel_tol);
    let half = T::lit(0.5);

    let (value, error) = kronrod21(f, lo, hi);
    let mut heap = BinaryHeap::new();
    heap.push(Segment {
        lo,
        hi,
        value,
        error,
    });
    let mut total = value;
    let mut total_err = error;
    // segments too small to split; their error is frozen
    let mut frozen_err = T::zero();
    let mut intervals = 1usize;

    loop {
        if !total.is_finite() || !total_err.is_finite() {
            return Err(Error::Convergence {
                what: "quadrature (non-finite integrand)",
                iterations: intervals,
            });
        }
        let target = abs_tol.max(rel_tol * total.abs());
        if total_err <= target {
            break;
        }
        if intervals >= cfg.max_subdivisions {
            return Err(Error::Convergence {
                what: "adaptive quadrature",
                iterations: intervals,
            });
        }
        let Some(worst) = heap.pop() else { break };
        let mid = half * (worst.lo + worst.hi);
        if !(mid > worst.lo && mid < worst.hi) {
            frozen_err = frozen_err + worst.error;
            if heap.is_empty() {
                break;
            }
            continue;
        }
        let (v1, e1) = kronrod21(f, worst.lo, mid);
        let (v2, e2) = kronrod21(f, mid, worst.hi);
        total = total - worst.value + v1 + v2;
        total_err = total_err - worst.error + e1 + e2;
        heap.push(Segment {
            lo: worst.lo,
            hi: mid,
            value: v1,
            error: e1,
        });
        heap.push(Segment {
            lo: mid,
            hi: worst.hi,
            value: v2,
            error: e2,
        });
        intervals += 1;
        if heap.is_empty() {
            break;
        }
    }

    // resum to shed accumulated cancellation in the running total
    let value = heap.iter().map(|s| s.value).sum::<T>();
    let err = heap.iter().map(|s| s.error).sum::<T>() + frozen_err;
    let value = if heap.is_empty() { total } else { value };
    Ok(Integral {
        value,
        abs_error: err,
        intervals,
    })
}

/// Integrates `f` over `[lo, hi]`; `hi` may be `+∞`.
pub fn integrate<T, F>(f: F, lo: T, hi: T, cfg: &QuadratureConfig) -> Result<Integral<T>>
where
    T: Real,
    F: Fn(T) -> T,
{
    if !lo.is_finite() {
        return Err(Error::Validation(format!(
            "lower integration limit must be finite, got {lo}"
        )));
    }
    if hi.is_nan() || hi < lo {
        return Err(Error::Validation(format!(
            "integration range [{lo}, {hi}] is empty or invalid"
        )));
    }
    if hi == lo {
        return Ok(Integral {
            value: T::zero(),
            abs_error: T::zero(),
            intervals: 0,
        });
    }
    if hi.is_finite() {
        return adaptive(&f, lo, hi, cfg);
    }

    let mapped = |t: T| -> T {
        if t <= T::zero() {
            return T::zero();
        }
        let (x, jac) = if lo > T::zero() {
            (lo / t, lo / (t * t))
        } else {
            (lo + (T::one() - t) / t, T::one() / (t * t))
        };
        if !x.is_finite() {
            return T::zero();
        }
        let y = f(x) * jac;
        if y.is_finite() {
            y
        } else {
            T::zero()
        }
    };

    check_tail(&mapped, cfg)?;
    adaptive(&mapped, T::zero(), T::one(), cfg)
}

/// Probes the mapped integrand near `t = 0` (large `x`) and fails if its
/// dyadic slices do not decay geometrically.
fn check_tail<T: Real, F: Fn(T) -> T>(h: &F, cfg: &QuadratureConfig) -> Result<()> {
    let two = T::lit(2.0);
    let slice = |k: i32| -> T {
        let hi = two.powi(-k);
        let lo = hi / two;
        kronrod21(h, lo, hi).0
    };
    // x ~ 2^k * lo at slice k
    let probes: Vec<T> = (30..34).map(slice).collect();
    let tiny = T::min_positive_value().sqrt();
    let ratio_limit = T::lit(cfg.divergence_ratio);
    let mut diverging = true;
    for w in probes.windows(2) {
        let (a, b) = (w[0].abs(), w[1].abs());
        if a <= tiny && b <= tiny {
            diverging = false;
            break;
        }
        if b < ratio_limit * a {
            diverging = false;
            break;
        }
    }
    if diverging {
        let sign = if probes[probes.len() - 1] >= T::zero() {
            Sign::Positive
        } else {
            Sign::Negative
        };
        return Err(Error::Divergent {
            what: "improper integral",
            sign,
        });
    }
    Ok(())
}
