//! Zipf-Pareto efficiency functional and its companions.
//!
//! The efficiency of a probability distribution with exponent `a` is
//! `η = (Σ p_i^{1-a} - 1)/a`: it composes as `η₁ + η₂ + a η₁ η₂` over
//! independent subsystems, reduces to the Shannon entropy as `a → 0`, and its
//! maximization under a mean constraint produces Pareto laws with tail index
//! `β = 1/a - 1`. This crate provides:
//!
//! - [`measures`]: discrete, composite and continuous efficiency;
//! - [`entropy`]: Shannon entropy and varentropy, closed-form and numeric;
//! - [`pareto`]: Pareto/Zipf models, the closed-form ZP efficiency, Gini
//!   coupling and the zero-efficiency thresholds;
//! - [`stability`]: Lesche-stability bounds and randomized trials;
//! - [`variational`]: the constrained maximizer and power-law verification;
//! - [`ingest`]: tokenization, Zipf and Hill fits, empirical Gini.
//!
//! Analytic routines are generic over [`Real`] (`f32` or `f64`); the type
//! aliases at the crate root fix the scalar to `f64`.
//!
//! ```
//! use zpeff::pareto::zp_efficiency;
//!
//! let eta: f64 = zp_efficiency(2.0).unwrap();
//! assert!((eta - 1.762204).abs() < 1e-6);
//! ```

// Domain guards are written `!(x > 0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod entropy;
pub mod error;
pub mod format;
pub mod ingest;
pub mod measures;
pub mod pareto;
pub mod quadrature;
pub mod regression;
pub mod roots;
pub mod scalar;
pub mod stability;
pub mod variational;

pub use error::{Error, Result, Sign};
pub use quadrature::QuadratureConfig;
pub use scalar::Real;

pub type Distribution = measures::Distribution<f64>;
pub type EfficiencyParams = measures::EfficiencyParams<f64>;
pub type PdfSpec = measures::PdfSpec<f64>;
pub type VarentropyConfig = entropy::VarentropyConfig<f64>;
pub type ParetoModel = pareto::ParetoModel<f64>;
pub type ZipfModel = pareto::ZipfModel<f64>;
pub type Thresholds = pareto::Thresholds<f64>;
