//! Spectral filters σ(η) applied to the k-th cosine coefficient as σ(k/K).
//!
//! Every filter is even, equals 1 at the origin and vanishes for |η| > 1.
//! The exponential filter is hard-zeroed outside [-1, 1] even though
//! e^{-αη^p} is formally positive there.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dd::Dd;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterKind {
    Lanczos,
    RaisedCosine,
    SharpenedRaisedCosine,
    Exponential,
    /// σ ≡ 1 on [-1, 1]: the plain truncated series. Test control only.
    AllPass,
}

/// How the exponential filter's α is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlphaRule {
    Fixed(f64),
    /// α = -ln(ε_machine), so that e^{-α} sits at roundoff level.
    MachineEps,
    /// α = ln(K²), which restores O(K⁻²) decay of the kernel bound.
    KSquared,
}

impl AlphaRule {
    pub fn resolve(&self, k_max: usize) -> f64 {
        match *self {
            AlphaRule::Fixed(a) => a,
            AlphaRule::MachineEps => -f64::EPSILON.ln(),
            AlphaRule::KSquared => ((k_max * k_max) as f64).ln(),
        }
    }
}

impl fmt::Display for AlphaRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlphaRule::Fixed(a) => write!(f, "{a}"),
            AlphaRule::MachineEps => f.write_str("eps"),
            AlphaRule::KSquared => f.write_str("k2"),
        }
    }
}

impl FromStr for AlphaRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "eps" => Ok(AlphaRule::MachineEps),
            "k2" => Ok(AlphaRule::KSquared),
            other => other
                .parse::<f64>()
                .map(AlphaRule::Fixed)
                .map_err(|_| Error::Config(format!("alpha: expected a number, `eps` or `k2`, got `{other}`"))),
        }
    }
}

/// A fully specified spectral filter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilterSpec {
    kind: FilterKind,
    order: u32,
    alpha: Option<AlphaRule>,
}

impl FilterSpec {
    pub const fn lanczos() -> Self {
        Self {
            kind: FilterKind::Lanczos,
            order: 1,
            alpha: None,
        }
    }

    pub const fn raised_cosine() -> Self {
        Self {
            kind: FilterKind::RaisedCosine,
            order: 2,
            alpha: None,
        }
    }

    pub const fn sharpened_raised_cosine() -> Self {
        Self {
            kind: FilterKind::SharpenedRaisedCosine,
            order: 8,
            alpha: None,
        }
    }

    pub const fn all_pass() -> Self {
        Self {
            kind: FilterKind::AllPass,
            order: 0,
            alpha: None,
        }
    }

    /// Exponential filter e^{-αη^p}; `order` must be even and at least 2,
    /// and a fixed α must be positive.
    pub fn exponential(order: u32, alpha: AlphaRule) -> Result<Self> {
        if order < 2 || !order.is_multiple_of(2) {
            return Err(Error::Config(format!(
                "exponential filter order must be an even integer >= 2, got {order}"
            )));
        }
        if let AlphaRule::Fixed(a) = alpha {
            if !(a > 0.0 && a.is_finite()) {
                return Err(Error::Config(format!(
                    "exponential filter alpha must be positive, got {a}"
                )));
            }
        }
        Ok(Self {
            kind: FilterKind::Exponential,
            order,
            alpha: Some(alpha),
        })
    }

    pub fn kind(&self) -> FilterKind {
        self.kind
    }

    /// Formal order p of the filter.
    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn alpha_rule(&self) -> Option<AlphaRule> {
        self.alpha
    }

    /// The α actually used for a series truncated at `k_max`.
    pub fn alpha(&self, k_max: usize) -> Option<f64> {
        self.alpha.map(|r| r.resolve(k_max))
    }

    /// σ(η) for a series with highest index `k_max`.
    pub fn eval(&self, eta: f64, k_max: usize) -> f64 {
        let eta = eta.abs();
        if eta > 1.0 {
            return 0.0;
        }
        match self.kind {
            FilterKind::AllPass => 1.0,
            FilterKind::Lanczos => {
                if eta == 0.0 {
                    1.0
                } else {
                    (PI * eta).sin() / (PI * eta)
                }
            }
            FilterKind::RaisedCosine => raised_cosine(eta),
            FilterKind::SharpenedRaisedCosine => sharpen(raised_cosine(eta)),
            FilterKind::Exponential => {
                let alpha = self
                    .alpha(k_max)
                    .unwrap_or_else(|| AlphaRule::MachineEps.resolve(k_max));
                (-alpha * eta.powi(self.order as i32)).exp()
            }
        }
    }

    /// σ(k/K) for k = 0..=K.
    pub fn weights(&self, k_max: usize) -> Vec<f64> {
        (0..=k_max).map(|k| self.eval(k as f64 / k_max as f64, k_max)).collect()
    }

    /// σ(k/K) in double-double precision, for the kernel evaluations whose
    /// values fall below f64 roundoff.
    pub fn weights_dd(&self, k_max: usize) -> Vec<Dd> {
        let kd = Dd::from_f64(k_max as f64);
        (0..=k_max)
            .map(|k| {
                if k == 0 {
                    return Dd::ONE;
                }
                if k == k_max && self.kind != FilterKind::AllPass && self.kind != FilterKind::Exponential {
                    return Dd::ZERO;
                }
                let eta = Dd::from_f64(k as f64) / kd;
                match self.kind {
                    FilterKind::AllPass => Dd::ONE,
                    FilterKind::Lanczos => {
                        let arg = Dd::PI * eta;
                        arg.sin() / arg
                    }
                    FilterKind::RaisedCosine => raised_cosine_dd(eta),
                    FilterKind::SharpenedRaisedCosine => sharpen_dd(raised_cosine_dd(eta)),
                    FilterKind::Exponential => {
                        let alpha = self
                            .alpha(k_max)
                            .unwrap_or_else(|| AlphaRule::MachineEps.resolve(k_max));
                        let mut pow = Dd::ONE;
                        for _ in 0..self.order {
                            pow = pow * eta;
                        }
                        (-pow.mul_f64(alpha)).exp()
                    }
                }
            })
            .collect()
    }

    /// Short name used on the command line and in artifact headers.
    pub fn short_name(&self) -> &'static str {
        match self.kind {
            FilterKind::Lanczos => "lanczos",
            FilterKind::RaisedCosine => "rcos",
            FilterKind::SharpenedRaisedCosine => "srcos",
            FilterKind::Exponential => "exp",
            FilterKind::AllPass => "none",
        }
    }
}

impl fmt::Display for FilterSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.alpha {
            Some(a) => write!(f, "{}(p={};alpha={})", self.short_name(), self.order, a),
            None => f.write_str(self.short_name()),
        }
    }
}

/// Parses the command-line filter names; the exponential filter gets its
/// defaults (p = 2, α = -ln ε) and can be refined with
/// [`FilterSpec::exponential`].
impl FromStr for FilterSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "lanczos" => Ok(Self::lanczos()),
            "rcos" | "raised_cosine" => Ok(Self::raised_cosine()),
            "srcos" | "sharpened_raised_cosine" => Ok(Self::sharpened_raised_cosine()),
            "exp" | "exponential" => Self::exponential(2, AlphaRule::MachineEps),
            "none" | "all_pass" => Ok(Self::all_pass()),
            other => Err(Error::Config(format!(
                "filter: unknown kind `{other}` (expected lanczos|rcos|srcos|exp|none)"
            ))),
        }
    }
}

#[inline]
fn raised_cosine(eta: f64) -> f64 {
    0.5 * (1.0 + (PI * eta).cos())
}

#[inline]
fn sharpen(s: f64) -> f64 {
    s.powi(4) * (35.0 - 84.0 * s + 70.0 * s * s - 20.0 * s * s * s)
}

fn raised_cosine_dd(eta: Dd) -> Dd {
    ((Dd::PI * eta).cos() + 1.0).mul_f64(0.5)
}

fn sharpen_dd(s: Dd) -> Dd {
    let s2 = s * s;
    let s3 = s2 * s;
    let poly = Dd::from_f64(35.0) - s.mul_f64(84.0) + s2.mul_f64(70.0) - s3.mul_f64(20.0);
    s2 * s2 * poly
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn catalogue() -> Vec<FilterSpec> {
        vec![
            FilterSpec::lanczos(),
            FilterSpec::raised_cosine(),
            FilterSpec::sharpened_raised_cosine(),
            FilterSpec::exponential(2, AlphaRule::Fixed(16.0)).unwrap(),
            FilterSpec::exponential(4, AlphaRule::KSquared).unwrap(),
            FilterSpec::exponential(2, AlphaRule::MachineEps).unwrap(),
            FilterSpec::all_pass(),
        ]
    }

    #[test]
    fn examples() {
        assert_eq!(FilterSpec::raised_cosine().eval(0.5, 16), 0.5);
        for f in catalogue() {
            assert_eq!(f.eval(0.0, 16), 1.0, "{f}");
        }
        assert_eq!(FilterSpec::lanczos().eval(1.3, 16), 0.0);
        assert!((FilterSpec::lanczos().eval(0.5, 16) - 2.0 / PI).abs() < 1e-16);
        assert_eq!(FilterSpec::sharpened_raised_cosine().eval(1.0, 16), 0.0);
    }

    #[test]
    fn exponential_is_hard_zeroed_outside_unit_interval() {
        let f = FilterSpec::exponential(2, AlphaRule::Fixed(1.0)).unwrap();
        assert!(f.eval(1.0, 8) > 0.3);
        assert_eq!(f.eval(1.0 + 1e-12, 8), 0.0);
    }

    #[test]
    fn invalid_exponential_specs_are_rejected() {
        assert!(FilterSpec::exponential(3, AlphaRule::MachineEps).is_err());
        assert!(FilterSpec::exponential(0, AlphaRule::MachineEps).is_err());
        assert!(FilterSpec::exponential(2, AlphaRule::Fixed(0.0)).is_err());
        assert!(FilterSpec::exponential(2, AlphaRule::Fixed(-1.0)).is_err());
    }

    #[test]
    fn alpha_rules() {
        assert!((AlphaRule::MachineEps.resolve(10) - 36.043_653_389_117_15).abs() < 1e-12);
        assert!((AlphaRule::KSquared.resolve(64) - (4096f64).ln()).abs() < 1e-15);
        assert_eq!("k2".parse::<AlphaRule>().unwrap(), AlphaRule::KSquared);
        assert_eq!("16".parse::<AlphaRule>().unwrap(), AlphaRule::Fixed(16.0));
        assert!("x".parse::<AlphaRule>().is_err());
    }

    #[test]
    fn sharpened_filter_is_flat_at_origin() {
        // first three finite-difference derivatives at 0 vanish
        let f = FilterSpec::sharpened_raised_cosine();
        let h = 1e-2;
        let s = |x: f64| f.eval(x, 64);
        let d1 = (s(h) - s(-h)) / (2.0 * h);
        let d2 = (s(h) - 2.0 * s(0.0) + s(-h)) / (h * h);
        let d3 = (s(2.0 * h) - 2.0 * s(h) + 2.0 * s(-h) - s(-2.0 * h)) / (2.0 * h * h * h);
        assert!(d1.abs() < 1e-12);
        assert!(d2.abs() < 1e-3, "d2={d2}");
        assert!(d3.abs() < 1e-3, "d3={d3}");
        // whereas the raised cosine has a nonzero second derivative
        let r = FilterSpec::raised_cosine();
        let rd1 = (r.eval(h, 64) - r.eval(-h, 64)) / (2.0 * h);
        assert!(rd1.abs() < 1e-12);
    }

    #[test]
    fn raised_cosine_first_derivative_is_order_h() {
        let r = FilterSpec::raised_cosine();
        for &h in &[1e-2, 1e-3] {
            let fwd = (r.eval(h, 64) - 1.0) / h;
            assert!(fwd.abs() <= 2.5 * h, "h={h}, fwd={fwd}");
        }
    }

    #[test]
    fn double_double_weights_agree_with_f64() {
        for f in catalogue() {
            let w = f.weights(37);
            let wd = f.weights_dd(37);
            for (a, b) in w.iter().zip(&wd) {
                // the sharpening polynomial cancels from terms of size 84
                assert!((a - b.to_f64()).abs() < 2e-14, "{f}: {a} vs {}", b.to_f64());
            }
        }
    }

    #[test]
    fn parse_names() {
        assert_eq!("rcos".parse::<FilterSpec>().unwrap(), FilterSpec::raised_cosine());
        assert_eq!("none".parse::<FilterSpec>().unwrap().kind(), FilterKind::AllPass);
        assert!("gauss".parse::<FilterSpec>().is_err());
    }

    proptest! {
        #[test]
        fn even(eta in -2.0f64..2.0, k in 1usize..2048) {
            for f in catalogue() {
                prop_assert_eq!(f.eval(eta, k), f.eval(-eta, k));
            }
        }

        #[test]
        fn zero_outside_unit_interval(eta in 1.0f64..10.0, k in 1usize..2048) {
            let eta = eta + 1e-9;
            for f in catalogue() {
                prop_assert_eq!(f.eval(eta, k), 0.0);
            }
        }

        #[test]
        fn monotone_decay(a in 0.0f64..1.0, b in 0.0f64..1.0) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            for f in [FilterSpec::raised_cosine(), FilterSpec::exponential(2, AlphaRule::Fixed(16.0)).unwrap()] {
                prop_assert!(f.eval(lo, 32) >= f.eval(hi, 32));
            }
        }
    }
}
