//! Semi-analytical inversion of a characteristic function by a filtered
//! Fourier-cosine expansion.
//!
//! On a truncation interval `[a, b]` with `L = b - a`, the cosine coefficients
//! are sampled directly from the characteristic function,
//!
//! ```text
//! A_k = (2/L) Re{ φ(kπ/L) · exp(-i kπ a / L) },   k = 0..=K
//! ```
//!
//! and the filtered CDF is the integral of the filtered cosine series:
//!
//! ```text
//! F(x) = (A_0/2)(x - a) + Σ_{k=1..K} σ(k/K) A_k L/(kπ) sin(kπ (x-a)/L)
//! ```
//!
//! Internally the coefficients are stored as `B_k = (L/2) A_k`, which makes
//! `F(a) = 0` and `F(b) = B_0 = φ(0)` hold bit-exactly. Series are reduced in
//! descending `k` with compensated summation so results do not depend on
//! how coefficient sampling was scheduled.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::dd::NeumaierSum;
use crate::error::{Error, Result};
use crate::filters::FilterSpec;

/// A univariate characteristic function ω ↦ E[e^{iωX}].
pub trait CharFn1D: Sync {
    fn eval(&self, omega: f64) -> Result<Complex64>;
}

/// A bivariate characteristic function (ω₁, ω₂) ↦ E[e^{i(ω₁X₁ + ω₂X₂)}].
pub trait CharFn2D: Sync {
    fn eval(&self, omega1: f64, omega2: f64) -> Result<Complex64>;
}

/// Adapts an infallible closure to [`CharFn1D`].
pub struct FnCharFn<F>(pub F);

impl<F> CharFn1D for FnCharFn<F>
where
    F: Fn(f64) -> Complex64 + Sync,
{
    fn eval(&self, omega: f64) -> Result<Complex64> {
        Ok((self.0)(omega))
    }
}

/// Adapts an infallible closure to [`CharFn2D`].
pub struct FnCharFn2D<F>(pub F);

impl<F> CharFn2D for FnCharFn2D<F>
where
    F: Fn(f64, f64) -> Complex64 + Sync,
{
    fn eval(&self, omega1: f64, omega2: f64) -> Result<Complex64> {
        Ok((self.0)(omega1, omega2))
    }
}

impl<T: CharFn1D + ?Sized> CharFn1D for &T {
    fn eval(&self, omega: f64) -> Result<Complex64> {
        (**self).eval(omega)
    }
}

impl<T: CharFn1D + ?Sized> CharFn1D for Box<T> {
    fn eval(&self, omega: f64) -> Result<Complex64> {
        (**self).eval(omega)
    }
}

/// Independent product φ₁(ω₁)·φ₂(ω₂).
pub struct ProductCharFn<A, B>(pub A, pub B);

impl<A: CharFn1D, B: CharFn1D> CharFn2D for ProductCharFn<A, B> {
    fn eval(&self, omega1: f64, omega2: f64) -> Result<Complex64> {
        Ok(self.0.eval(omega1)? * self.1.eval(omega2)?)
    }
}

/// sin(π y), exactly zero at integers.
#[inline]
pub(crate) fn sin_pi(y: f64) -> f64 {
    let r = y - 2.0 * (y * 0.5).round(); // r in [-1, 1]
    let (sign, r) = if r < 0.0 { (-1.0, -r) } else { (1.0, r) };
    let r = if r > 0.5 { 1.0 - r } else { r };
    if r == 0.0 {
        0.0
    } else {
        sign * (PI * r).sin()
    }
}

/// cos(π y) with the same reduction as [`sin_pi`].
#[inline]
pub(crate) fn cos_pi(y: f64) -> f64 {
    let r = (y - 2.0 * (y * 0.5).round()).abs(); // [0, 1]
    if r == 0.0 {
        1.0
    } else if r == 1.0 {
        -1.0
    } else if r == 0.5 {
        0.0
    } else {
        (PI * r).cos()
    }
}

fn check_interval(a: f64, b: f64) -> Result<()> {
    if !(a.is_finite() && b.is_finite() && b > a) {
        return Err(Error::Config(format!(
            "truncation interval [{a}, {b}] must be finite with b > a"
        )));
    }
    Ok(())
}

fn check_terms(k_max: usize, name: &str) -> Result<()> {
    if k_max == 0 {
        return Err(Error::Config(format!("{name} must be at least 1")));
    }
    Ok(())
}

/// A sampled cosine expansion on `[a, b]` with coefficients `A_0..=A_K`.
#[derive(Debug, Clone, PartialEq)]
pub struct CosExpansion {
    a: f64,
    b: f64,
    // B_k = (b - a)/2 · A_k
    scaled: Vec<f64>,
}

/// Samples `A_0..=A_K` from `cf` on `[a, b]`.
pub fn sample_coefficients<C: CharFn1D + ?Sized>(cf: &C, a: f64, b: f64, k_max: usize) -> Result<CosExpansion> {
    check_interval(a, b)?;
    check_terms(k_max, "K")?;
    let len = b - a;
    let scaled = (0..=k_max)
        .into_par_iter()
        .map(|k| {
            let omega = k as f64 * PI / len;
            let phi = cf.eval(omega)?;
            if !(phi.re.is_finite() && phi.im.is_finite()) {
                return Err(Error::Numeric(format!(
                    "characteristic function is not finite at k = {k} (omega = {omega})"
                )));
            }
            let shift = Complex64::from_polar(1.0, -(k as f64) * PI * a / len);
            Ok((phi * shift).re)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CosExpansion { a, b, scaled })
}

impl CosExpansion {
    /// Builds an expansion from explicit coefficients `A_0..=A_K`.
    pub fn from_coefficients(a: f64, b: f64, coeffs: &[f64]) -> Result<Self> {
        check_interval(a, b)?;
        check_terms(coeffs.len().saturating_sub(1), "K")?;
        let half = 0.5 * (b - a);
        Ok(Self {
            a,
            b,
            scaled: coeffs.iter().map(|c| c * half).collect(),
        })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn k_max(&self) -> usize {
        self.scaled.len() - 1
    }

    /// A_k.
    pub fn coefficient(&self, k: usize) -> f64 {
        2.0 / (self.b - self.a) * self.scaled[k]
    }

    /// A_0..=A_K.
    pub fn coeffs(&self) -> Vec<f64> {
        (0..=self.k_max()).map(|k| self.coefficient(k)).collect()
    }

    /// The same expansion cut back to `k_max` terms. Coefficients do not
    /// depend on K, so a single sampling at the largest K serves a whole
    /// convergence study.
    pub fn truncated(&self, k_max: usize) -> Result<Self> {
        check_terms(k_max, "K")?;
        if k_max > self.k_max() {
            return Err(Error::Config(format!(
                "cannot truncate to K = {k_max}: only {} terms were sampled",
                self.k_max()
            )));
        }
        Ok(Self {
            a: self.a,
            b: self.b,
            scaled: self.scaled[..=k_max].to_vec(),
        })
    }

    fn check_point(&self, x: f64) -> Result<f64> {
        if !(x >= self.a && x <= self.b) {
            return Err(Error::Domain {
                what: "x",
                value: x,
                lo: self.a,
                hi: self.b,
            });
        }
        Ok((x - self.a) / (self.b - self.a))
    }

    // Σ_{k≥1} w_k B_k 2/(kπ) sin(kπt), w precomputed, descending k.
    fn cdf_series(&self, weights: &[f64], t: f64) -> f64 {
        let mut acc = NeumaierSum::new();
        for k in (1..self.scaled.len()).rev() {
            let w = weights[k];
            if w == 0.0 {
                continue;
            }
            acc.add(w * self.scaled[k] * 2.0 / (k as f64 * PI) * sin_pi(k as f64 * t));
        }
        acc.add(self.scaled[0] * t);
        acc.value()
    }

    /// Raw filtered CDF value at `x`, not clamped to [0, 1].
    pub fn filtered_cdf(&self, filter: &FilterSpec, x: f64) -> Result<f64> {
        let t = self.check_point(x)?;
        Ok(self.cdf_series(&filter.weights(self.k_max()), t))
    }

    /// [`Self::filtered_cdf`] at many points, evaluated in parallel.
    pub fn filtered_cdf_many(&self, filter: &FilterSpec, xs: &[f64]) -> Result<Vec<f64>> {
        let weights = filter.weights(self.k_max());
        xs.par_iter()
            .map(|&x| self.check_point(x).map(|t| self.cdf_series(&weights, t)))
            .collect()
    }

    /// Consumer-facing CDF: raw values clamped to [0, 1] and made
    /// nondecreasing along the (sorted) query points.
    pub fn clamped_cdf(&self, filter: &FilterSpec, xs: &[f64]) -> Result<Vec<f64>> {
        if xs.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::Precondition("clamped_cdf: query points must be sorted".into()));
        }
        let raw = self.filtered_cdf_many(filter, xs)?;
        let mut running = 0.0f64;
        Ok(raw
            .into_iter()
            .map(|v| {
                running = running.max(v.clamp(0.0, 1.0));
                running
            })
            .collect())
    }

    /// Filtered density f(x) = A_0/2 + Σ σ(k/K) A_k cos(kπ(x-a)/L).
    ///
    /// Only meaningful for continuous laws or as an integrand; for discrete
    /// laws it spikes at the atoms.
    pub fn filtered_density(&self, filter: &FilterSpec, x: f64) -> Result<f64> {
        let t = self.check_point(x)?;
        let w = filter.weights(self.k_max());
        Ok(self.density_clenshaw(&w, t))
    }

    fn density_clenshaw(&self, weights: &[f64], t: f64) -> f64 {
        // Σ' c_k cos(kθ) with c_k = 2 w_k B_k / L
        let inv_len = 1.0 / (self.b - self.a);
        let two_cos = 2.0 * cos_pi(t);
        let (mut b1, mut b2) = (0.0, 0.0);
        for k in (1..self.scaled.len()).rev() {
            let c = 2.0 * weights[k] * self.scaled[k] * inv_len;
            let b0 = c + two_cos * b1 - b2;
            b2 = b1;
            b1 = b0;
        }
        // f = c_0/2 + b1 cos θ - b2
        self.scaled[0] * inv_len + b1 * 0.5 * two_cos - b2
    }

    /// Probability masses at known support points, as
    /// `F(X_i + dx) - F(X_i - dx)`.
    pub fn recover_pmf(&self, filter: &FilterSpec, support: &[f64], dx: f64) -> Result<Vec<f64>> {
        if !(dx > 0.0 && dx.is_finite()) {
            return Err(Error::Precondition(format!("dx must be positive, got {dx}")));
        }
        if support.is_empty() {
            return Ok(Vec::new());
        }
        for w in support.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::Precondition(format!(
                    "support must be strictly increasing: {} then {}",
                    w[0], w[1]
                )));
            }
            if dx >= 0.5 * (w[1] - w[0]) {
                return Err(Error::Precondition(format!(
                    "dx = {dx} is not below half the gap between support points {} and {}",
                    w[0], w[1]
                )));
            }
        }
        let first = support[0];
        let last = support[support.len() - 1];
        if !(first > self.a && last < self.b) {
            return Err(Error::Precondition(format!(
                "support [{first}, {last}] must lie inside ({}, {})",
                self.a, self.b
            )));
        }
        if dx >= 0.5 * (first - self.a) || dx >= 0.5 * (self.b - last) {
            return Err(Error::Precondition(format!(
                "dx = {dx} is not below half the gap between the support ends [{first}, {last}] and [{}, {}]",
                self.a, self.b
            )));
        }
        let weights = filter.weights(self.k_max());
        let len = self.b - self.a;
        Ok(support
            .par_iter()
            .map(|&x| {
                let hi = self.cdf_series(&weights, (x + dx - self.a) / len);
                let lo = self.cdf_series(&weights, (x - dx - self.a) / len);
                hi - lo
            })
            .collect())
    }

    /// q-th raw moment of the filtered expansion,
    /// `(A_0/(2(q+1)))(b^{q+1} - a^{q+1}) + Σ σ(k/K) A_k C_k` with
    /// `C_k = ∫_a^b x^q cos(kπ(x-a)/L) dx` in closed form.
    pub fn cos_moment(&self, filter: &FilterSpec, q: u32) -> f64 {
        let (a, b) = (self.a, self.b);
        let len = b - a;
        let weights = filter.weights(self.k_max());
        let mut acc = NeumaierSum::new();
        for k in (1..self.scaled.len()).rev() {
            let w = weights[k];
            if w == 0.0 || q == 0 {
                continue;
            }
            acc.add(w * 2.0 / len * self.scaled[k] * cosine_power_integral(q, k, a, b));
        }
        let q1 = (q + 1) as i32;
        acc.add(self.scaled[0] * (b.powi(q1) - a.powi(q1)) / (q1 as f64 * len));
        acc.value()
    }

    /// The q-th moment by composite Gauss-Legendre quadrature of
    /// `x^q f(x)` with the density summed by Clenshaw's recurrence. This is
    /// an independent route to [`Self::cos_moment`] used as a cross-check.
    pub fn moment_by_quadrature(&self, filter: &FilterSpec, q: u32) -> f64 {
        let weights = filter.weights(self.k_max());
        let panels = self.k_max().max(16);
        let (nodes, gw) = gauss_legendre(16);
        let len = self.b - self.a;
        let h = len / panels as f64;
        let partial: Vec<f64> = (0..panels)
            .into_par_iter()
            .map(|p| {
                let mid = self.a + (p as f64 + 0.5) * h;
                let mut acc = NeumaierSum::new();
                for (z, w) in nodes.iter().zip(&gw) {
                    let x = mid + 0.5 * h * z;
                    let t = (x - self.a) / len;
                    acc.add(w * x.powi(q as i32) * self.density_clenshaw(&weights, t));
                }
                0.5 * h * acc.value()
            })
            .collect();
        partial.into_iter().collect::<NeumaierSum>().value()
    }
}

/// `C_k = ∫_a^b x^q cos(kπ(x-a)/(b-a)) dx` for k ≥ 1, by the
/// integration-by-parts recurrence
///
/// ```text
/// I_j = -(j/ω) S_{j-1},   S_j = (a^j - (-1)^k b^j)/ω + (j/ω) I_{j-1}
/// ```
///
/// with `ω = kπ/(b-a)`, `I_0 = 0`, `S_0 = (1 - (-1)^k)/ω`, where `S_j` is the
/// matching sine integral. For k = 0 it returns `(b^{q+1} - a^{q+1})/(q+1)`.
pub fn cosine_power_integral(q: u32, k: usize, a: f64, b: f64) -> f64 {
    let q1 = (q + 1) as i32;
    if k == 0 {
        return (b.powi(q1) - a.powi(q1)) / q1 as f64;
    }
    let omega = k as f64 * PI / (b - a);
    let parity = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    let mut cos_int = 0.0;
    let mut sin_int = (1.0 - parity) / omega;
    let (mut a_pow, mut b_pow) = (1.0, 1.0);
    for j in 1..=q {
        let jf = j as f64;
        a_pow *= a;
        b_pow *= b;
        let next_cos = -(jf / omega) * sin_int;
        let next_sin = (a_pow - parity * b_pow) / omega + (jf / omega) * cos_int;
        cos_int = next_cos;
        sin_int = next_sin;
    }
    cos_int
}

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for j in 2..=n {
                let jf = j as f64;
                let p2 = ((2.0 * jf - 1.0) * z * p1 - (jf - 1.0) * p0) / jf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { z } else { p1 };
            let pn1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pn1) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Bivariate cosine expansion on `[a₁,b₁]×[a₂,b₂]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CosExpansion2D {
    a: [f64; 2],
    b: [f64; 2],
    k_max: [usize; 2],
    // B_{k1,k2} = L1 L2/4 · A_{k1,k2}, row-major in k1
    scaled: Vec<f64>,
}

/// Samples `A_{k1,k2} = ½(A⁺ + A⁻)` from a bivariate characteristic function.
pub fn sample_coefficients_2d<C: CharFn2D + ?Sized>(
    cf: &C,
    a: [f64; 2],
    b: [f64; 2],
    k1_max: usize,
    k2_max: usize,
) -> Result<CosExpansion2D> {
    check_interval(a[0], b[0])?;
    check_interval(a[1], b[1])?;
    check_terms(k1_max, "K1")?;
    check_terms(k2_max, "K2")?;
    let (l1, l2) = (b[0] - a[0], b[1] - a[1]);
    let cols = k2_max + 1;
    let scaled = (0..(k1_max + 1) * cols)
        .into_par_iter()
        .map(|idx| {
            let (k1, k2) = (idx / cols, idx % cols);
            let w1 = k1 as f64 * PI / l1;
            let w2 = k2 as f64 * PI / l2;
            let p1 = k1 as f64 * PI * a[0] / l1;
            let p2 = k2 as f64 * PI * a[1] / l2;
            let plus = cf.eval(w1, w2)?;
            let minus = cf.eval(w1, -w2)?;
            for v in [plus, minus] {
                if !(v.re.is_finite() && v.im.is_finite()) {
                    return Err(Error::Numeric(format!(
                        "characteristic function is not finite at (k1, k2) = ({k1}, {k2})"
                    )));
                }
            }
            let a_plus = (plus * Complex64::from_polar(1.0, -p1 - p2)).re;
            let a_minus = (minus * Complex64::from_polar(1.0, -p1 + p2)).re;
            Ok(0.5 * (a_plus + a_minus))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CosExpansion2D {
        a,
        b,
        k_max: [k1_max, k2_max],
        scaled,
    })
}

impl CosExpansion2D {
    pub fn k_max(&self) -> [usize; 2] {
        self.k_max
    }

    pub fn bounds(&self) -> ([f64; 2], [f64; 2]) {
        (self.a, self.b)
    }

    /// A_{k1,k2}.
    pub fn coefficient(&self, k1: usize, k2: usize) -> f64 {
        let l1 = self.b[0] - self.a[0];
        let l2 = self.b[1] - self.a[1];
        4.0 / (l1 * l2) * self.scaled[k1 * (self.k_max[1] + 1) + k2]
    }

    fn scaled_at(&self, k1: usize, k2: usize) -> f64 {
        self.scaled[k1 * (self.k_max[1] + 1) + k2]
    }

    /// Filtered bivariate CDF: constant block, two edge sums weighted ½ and
    /// the double sum, written for a general rectangle.
    pub fn filtered_cdf_2d(&self, filter: &FilterSpec, x1: f64, x2: f64) -> Result<f64> {
        for (i, x) in [x1, x2].into_iter().enumerate() {
            if !(x >= self.a[i] && x <= self.b[i]) {
                return Err(Error::Domain {
                    what: if i == 0 { "x1" } else { "x2" },
                    value: x,
                    lo: self.a[i],
                    hi: self.b[i],
                });
            }
        }
        let t1 = (x1 - self.a[0]) / (self.b[0] - self.a[0]);
        let t2 = (x2 - self.a[1]) / (self.b[1] - self.a[1]);
        let w1 = filter.weights(self.k_max[0]);
        let w2 = filter.weights(self.k_max[1]);
        // g_i(k) = σ(k/K_i) · 2/(kπ) · sin(kπ t_i), g_i(0) = t_i
        let g = |w: &[f64], t: f64, k: usize| {
            if k == 0 {
                t
            } else {
                w[k] * 2.0 / (k as f64 * PI) * sin_pi(k as f64 * t)
            }
        };
        let g1: Vec<f64> = (0..=self.k_max[0]).map(|k| g(&w1, t1, k)).collect();
        let g2: Vec<f64> = (0..=self.k_max[1]).map(|k| g(&w2, t2, k)).collect();
        let mut acc = NeumaierSum::new();
        for k1 in (0..=self.k_max[0]).rev() {
            if g1[k1] == 0.0 {
                continue;
            }
            for k2 in (0..=self.k_max[1]).rev() {
                if g2[k2] == 0.0 {
                    continue;
                }
                acc.add(self.scaled_at(k1, k2) * g1[k1] * g2[k2]);
            }
        }
        Ok(acc.value())
    }
}
