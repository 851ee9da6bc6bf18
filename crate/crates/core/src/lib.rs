//! Inversion of characteristic functions of discrete distributions by a
//! filtered Fourier-cosine expansion.
//!
//! The pieces are
//! - [`filters`]: spectral filters σ(η),
//! - [`engine`]: coefficient sampling and filtered CDF, PMF and moments,
//! - [`kernels`]: Gibbs kernels and their error bounds,
//! - [`models`]: characteristic functions for discrete, Poisson-binomial
//!   and affine Hawkes models,
//! - [`truncation`]: choice of the expansion interval,
//! - [`oracles`]: exact and Monte Carlo reference values.

// `!(x > y)` is used on purpose so that NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dd;
pub mod engine;
pub mod error;
pub mod filters;
pub mod kernels;
pub mod models;
pub mod oracles;
pub mod truncation;

pub use engine::{
    sample_coefficients, sample_coefficients_2d, CharFn1D, CharFn2D, CosExpansion, CosExpansion2D, FnCharFn,
    FnCharFn2D, ProductCharFn,
};
pub use error::{Error, Result};
pub use filters::{AlphaRule, FilterKind, FilterSpec};

/// Parses a real number that may be written as a multiple or fraction of π:
/// `1.5`, `pi`, `-pi`, `0.6pi`, `0.6*pi`, `pi/4`, `3pi/4`.
pub fn parse_real(s: &str) -> std::result::Result<f64, std::num::ParseFloatError> {
    let t = s.trim();
    let Some(idx) = t.find("pi") else {
        return t.parse();
    };
    let coef = t[..idx].trim().trim_end_matches('*').trim();
    let coef = match coef {
        "" | "+" => 1.0,
        "-" => -1.0,
        c => c.parse::<f64>()?,
    };
    let rest = t[idx + 2..].trim();
    let value = coef * std::f64::consts::PI;
    match rest.strip_prefix('/') {
        Some(den) => Ok(value / den.trim().parse::<f64>()?),
        None if rest.is_empty() => Ok(value),
        None => "".parse(),
    }
}
