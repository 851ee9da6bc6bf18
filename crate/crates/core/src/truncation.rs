//! Choice of the expansion interval [a, b].

use std::fmt;
use std::str::FromStr;

use crate::engine::CharFn1D;
use crate::error::{Error, Result};
use crate::models::{HawkesModel, Model};

/// Default central-difference step for moments from a characteristic
/// function.
pub const DEFAULT_H: f64 = 1e-4;

/// Mean and variance of a law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub mean: f64,
    pub variance: f64,
}

impl Moments {
    pub fn std_dev(&self) -> f64 {
        self.variance.sqrt()
    }
}

fn central_moments(cf: &dyn CharFn1D, h: f64) -> Result<(f64, f64)> {
    let plus = cf.eval(h)?;
    let minus = cf.eval(-h)?;
    let zero = cf.eval(0.0)?;
    let mean = ((plus - minus) / (2.0 * h)).im;
    let second = -((plus - 2.0 * zero + minus) / (h * h)).re;
    Ok((mean, second))
}

/// Mean and variance by central differences of φ at ±h. When the estimates
/// at h and h/2 disagree by more than 1e-6 relative, they are combined by
/// Richardson extrapolation.
pub fn charfn_moments(cf: &dyn CharFn1D, h: f64) -> Result<Moments> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Config(format!("h = {h} must be positive")));
    }
    let (m1, s1) = central_moments(cf, h)?;
    let (m2, s2) = central_moments(cf, 0.5 * h)?;
    let close = |x: f64, y: f64| (x - y).abs() <= 1e-6 * x.abs().max(y.abs()).max(f64::MIN_POSITIVE);
    let (mean, second) = if close(m1, m2) && close(s1, s2) {
        (m1, s1)
    } else {
        ((4.0 * m2 - m1) / 3.0, (4.0 * s2 - s1) / 3.0)
    };
    let variance = second - mean * mean;
    if !(mean.is_finite() && variance.is_finite()) {
        return Err(Error::Numeric(format!("non-finite moments at h = {h}")));
    }
    if variance < -1e-8 {
        return Err(Error::Numeric(format!(
            "variance estimate {variance} is negative beyond roundoff; h = {h} is unsuitable"
        )));
    }
    Ok(Moments {
        mean,
        variance: variance.max(0.0),
    })
}

/// (mean - c, mean + c) with c = sqrt(variance/tol), which by Chebyshev's
/// inequality leaves at most `tol` of the mass outside.
pub fn chebyshev_range(mean: f64, variance: f64, tol: f64) -> Result<(f64, f64)> {
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::Config(format!("tol = {tol} must lie in (0, 1)")));
    }
    if !(variance >= 0.0 && variance.is_finite()) {
        return Err(Error::Config(format!("variance = {variance} must be nonnegative")));
    }
    let c = (variance / tol).sqrt();
    Ok((mean - c, mean + c))
}

/// `(N_t - left_pad_frac·u, u)` with `u = mean + sigmas·std` of N_T.
pub fn hawkes_range(
    model: &HawkesModel,
    cf: &dyn CharFn1D,
    h: f64,
    sigmas: f64,
    left_pad_frac: f64,
) -> Result<(f64, f64)> {
    if !(sigmas >= 0.0 && sigmas.is_finite()) {
        return Err(Error::Config(format!("sigmas = {sigmas} must be nonnegative")));
    }
    if !(left_pad_frac >= 0.0 && left_pad_frac.is_finite()) {
        return Err(Error::Config(format!(
            "left_pad_frac = {left_pad_frac} must be nonnegative"
        )));
    }
    let m = charfn_moments(cf, h)?;
    let upper = m.mean + sigmas * m.std_dev();
    Ok((model.count_t as f64 - left_pad_frac * upper, upper))
}

/// How the expansion interval is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RangeRule {
    Explicit {
        a: f64,
        b: f64,
    },
    Chebyshev {
        tol: f64,
    },
    Hawkes {
        sigmas: f64,
        left_pad_frac: f64,
    },
    /// The support hull of a bounded model widened by `pad` times its width
    /// on each side.
    Support {
        pad: f64,
    },
}

impl RangeRule {
    pub const HAWKES_DEFAULT: RangeRule = RangeRule::Hawkes {
        sigmas: 25.0,
        left_pad_frac: 0.1,
    };
    pub const SUPPORT_DEFAULT: RangeRule = RangeRule::Support { pad: 0.01 };

    /// The interval for `model`, whose univariate characteristic function
    /// is `cf`.
    pub fn resolve(&self, model: &Model, cf: &dyn CharFn1D) -> Result<(f64, f64)> {
        let (a, b) = match *self {
            RangeRule::Explicit { a, b } => (a, b),
            RangeRule::Chebyshev { tol } => {
                let m = charfn_moments(cf, DEFAULT_H)?;
                chebyshev_range(m.mean, m.variance, tol)?
            }
            RangeRule::Hawkes { sigmas, left_pad_frac } => match model {
                Model::Hawkes(h) => hawkes_range(h, cf, DEFAULT_H, sigmas, left_pad_frac)?,
                other => {
                    return Err(Error::Config(format!(
                        "range: the hawkes rule needs a hawkes model, got {}",
                        other.type_name()
                    )))
                }
            },
            RangeRule::Support { pad } => {
                let (lo, hi) = model.support_hull().ok_or_else(|| {
                    Error::Config(format!(
                        "range: the support rule needs a bounded model, got {}",
                        model.type_name()
                    ))
                })?;
                let width = if hi > lo { hi - lo } else { lo.abs().max(1.0) };
                (lo - pad * width, hi + pad * width)
            }
        };
        if !(a.is_finite() && b.is_finite() && b > a) {
            return Err(Error::Config(format!("range: [{a}, {b}] is empty or not finite")));
        }
        Ok((a, b))
    }
}

impl fmt::Display for RangeRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RangeRule::Explicit { a, b } => write!(f, "explicit:{a:e},{b:e}"),
            RangeRule::Chebyshev { tol } => write!(f, "chebyshev:{tol:e}"),
            RangeRule::Hawkes { sigmas, left_pad_frac } => write!(f, "hawkes:{sigmas},{left_pad_frac}"),
            RangeRule::Support { pad } => write!(f, "support:{pad}"),
        }
    }
}

fn parse_num(s: &str, what: &str) -> Result<f64> {
    crate::parse_real(s).map_err(|_| Error::Config(format!("range: cannot parse {what} `{s}`")))
}

/// `explicit:a,b`, `chebyshev:tol`, `hawkes[:sigmas[,left_pad_frac]]` or
/// `support[:pad]`. Numbers may be written as multiples of π (`0.5pi`).
impl FromStr for RangeRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (head, tail) = match s.split_once(':') {
            Some((h, t)) => (h, Some(t)),
            None => (s, None),
        };
        let args: Vec<&str> = tail.map(|t| t.split(',').map(str::trim).collect()).unwrap_or_default();
        let rule = match (head, args.as_slice()) {
            ("explicit", [a, b]) => RangeRule::Explicit {
                a: parse_num(a, "a")?,
                b: parse_num(b, "b")?,
            },
            ("chebyshev", [tol]) => {
                let tol = parse_num(tol, "tol")?;
                if !(tol > 0.0 && tol < 1.0) {
                    return Err(Error::Config(format!(
                        "range: chebyshev tol = {tol} must lie in (0, 1)"
                    )));
                }
                RangeRule::Chebyshev { tol }
            }
            ("hawkes", []) => Self::HAWKES_DEFAULT,
            ("hawkes", [sig]) => RangeRule::Hawkes {
                sigmas: parse_num(sig, "sigmas")?,
                left_pad_frac: 0.1,
            },
            ("hawkes", [sig, pad]) => RangeRule::Hawkes {
                sigmas: parse_num(sig, "sigmas")?,
                left_pad_frac: parse_num(pad, "left_pad_frac")?,
            },
            ("support", []) => Self::SUPPORT_DEFAULT,
            ("support", [pad]) => RangeRule::Support {
                pad: parse_num(pad, "pad")?,
            },
            _ => {
                return Err(Error::Config(format!(
                    "range: expected explicit:a,b | chebyshev:tol | hawkes[:sigmas[,pad]] | support[:pad], got `{s}`"
                )))
            }
        };
        if let RangeRule::Explicit { a, b } = rule {
            if !(b > a) {
                return Err(Error::Config(format!(
                    "range: explicit bounds need a < b, got {a}, {b}"
                )));
            }
        }
        Ok(rule)
    }
}
