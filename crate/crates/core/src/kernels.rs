//! Gibbs kernels of a spectral filter and their closed-form upper bounds.
//!
//! ```text
//! K0(x) = 1 + 2 Σ_{k=1..K} σ(k/K) cos(kx)
//! K1(x) = x - π + Σ_{k=1..K} (2/k) σ(k/K) sin(kx)
//! ```
//!
//! The CDF error of a filtered expansion is a probability-weighted sum of
//! `K1` values, so bounds on `|K1|` are error bounds. For high-order filters
//! `K1` falls far below f64 roundoff, so both kernels are summed in
//! double-double arithmetic.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::dd::Dd;
use crate::error::{Error, Result};
use crate::filters::{FilterKind, FilterSpec};

/// Riemann zeta for real s > 1: direct sum to N-1 plus an Euler-Maclaurin
/// tail, accurate to about 1e-16 relative.
pub fn zeta(s: f64) -> f64 {
    assert!(s > 1.0, "zeta requires s > 1");
    const N: usize = 64;
    let n = N as f64;
    let tail = n.powf(1.0 - s) / (s - 1.0) + 0.5 * n.powf(-s) + s / 12.0 * n.powf(-s - 1.0)
        - s * (s + 1.0) * (s + 2.0) / 720.0 * n.powf(-s - 3.0)
        + s * (s + 1.0) * (s + 2.0) * (s + 3.0) * (s + 4.0) / 30240.0 * n.powf(-s - 5.0);
    let mut acc = tail;
    for k in (1..N).rev() {
        acc += (k as f64).powf(-s);
    }
    acc
}

fn check_x(x: f64) -> Result<()> {
    if !(x > 0.0 && x < 2.0 * PI) {
        return Err(Error::Domain {
            what: "x",
            value: x,
            lo: 0.0,
            hi: 2.0 * PI,
        });
    }
    Ok(())
}

fn check_k(k_max: usize) -> Result<()> {
    if k_max == 0 {
        return Err(Error::Config("K must be at least 1".into()));
    }
    Ok(())
}

// (sin kx, cos kx) for k = 1..=K in double-double, by angle addition with a
// fresh evaluation every 32 steps to keep the recurrence error negligible.
fn harmonics(x: f64, k_max: usize) -> Vec<(Dd, Dd)> {
    let (s1, c1) = Dd::from_f64(x).sin_cos();
    let mut out = Vec::with_capacity(k_max);
    let (mut s, mut c) = (s1, c1);
    for k in 1..=k_max {
        if k > 1 {
            if k % 32 == 0 {
                let (p, e) = crate::dd::two_prod(k as f64, x);
                (s, c) = Dd { hi: p, lo: e }.sin_cos();
            } else {
                (s, c) = (s * c1 + c * s1, c * c1 - s * s1);
            }
        }
        out.push((s, c));
    }
    out
}

/// K0 in double-double, summed in descending k.
pub fn eval_k0_dd(filter: &FilterSpec, k_max: usize, x: f64) -> Dd {
    let w = filter.weights_dd(k_max);
    let h = harmonics(x, k_max);
    let mut acc = Dd::ZERO;
    for k in (1..=k_max).rev() {
        if w[k].hi != 0.0 {
            acc += w[k] * h[k - 1].1;
        }
    }
    acc.mul_f64(2.0) + 1.0
}

/// K1 in double-double, summed in descending k.
pub fn eval_k1_dd(filter: &FilterSpec, k_max: usize, x: f64) -> Dd {
    eval_k1_with(&filter.weights_dd(k_max), x)
}

fn eval_k1_with(weights: &[Dd], x: f64) -> Dd {
    let k_max = weights.len() - 1;
    let h = harmonics(x, k_max);
    let mut acc = Dd::ZERO;
    for k in (1..=k_max).rev() {
        if weights[k].hi != 0.0 {
            acc += (weights[k] * h[k - 1].0).mul_f64(2.0) / Dd::from_f64(k as f64);
        }
    }
    acc + (Dd::from_f64(x) - Dd::PI)
}

/// The filtered Dirichlet kernel K0(x).
pub fn eval_k0(filter: &FilterSpec, k_max: usize, x: f64) -> Result<f64> {
    check_k(k_max)?;
    check_x(x)?;
    Ok(eval_k0_dd(filter, k_max, x).to_f64())
}

/// The zero-mean antiderivative K1(x) of K0.
pub fn eval_k1(filter: &FilterSpec, k_max: usize, x: f64) -> Result<f64> {
    check_k(k_max)?;
    check_x(x)?;
    Ok(eval_k1_dd(filter, k_max, x).to_f64())
}

/// A closed-form bound on |K1(x)| and whether (K, x) lies above the
/// threshold for which it is proven.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelBound {
    pub value: f64,
    pub admissible: bool,
}

/// Upper bound on |K1(x)| for the Lanczos, raised cosine, sharpened raised
/// cosine and second-order exponential filters.
pub fn k1_bound(filter: &FilterSpec, k_max: usize, x: f64) -> Result<KernelBound> {
    check_k(k_max)?;
    check_x(x)?;
    let k = k_max as f64;
    let y = 2.0 * PI - x;
    let dist = (x - PI).abs();
    let above = |c: f64| k > (c * PI / x).max(c * PI / y);
    let bound = match filter.kind() {
        FilterKind::Lanczos => KernelBound {
            value: 38.0 / (3.0 * k * PI) * (dist + 1.0 / x + 1.0 / y),
            admissible: above(2.0),
        },
        FilterKind::RaisedCosine => KernelBound {
            value: zeta(3.0) / (3.0 * PI * k * k) * dist + 2.0 * PI * PI / (3.0 * k * k) * (x.powi(-2) + y.powi(-2)),
            admissible: above(2.0),
        },
        FilterKind::SharpenedRaisedCosine => {
            let k8 = k.powi(8);
            KernelBound {
                value: 1_334_025.0 / (PI * 128.0 * k8) * zeta(9.0) * dist
                    + 5_336_100.0 * PI.powi(8) / (8.0 * k8) * (x.powi(-8) + y.powi(-8)),
                admissible: above(6.0),
            }
        }
        FilterKind::Exponential if filter.order() == 2 => {
            let alpha = filter.alpha(k_max).expect("exponential filter carries alpha");
            let ea = (-alpha).exp();
            let pi2 = PI * PI;
            let value = ea / 12.0 * (x - PI).powi(2)
                + 2.0 * ea * (2.0 * PI.ln() - x.ln() - y.ln())
                + 4.0 * alpha * ea / k
                    * ((1.0 / x - 1.0 / PI).abs() + (1.0 / (x - 2.0 * PI) + 1.0 / PI).abs() + dist / 12.0)
                + 1.0 / (k * k)
                    * ((10.0 * alpha / (x * x) - 10.0 * alpha / pi2).abs()
                        + (10.0 * alpha / (y * y) - 10.0 * alpha / pi2).abs()
                        + 6.5 * alpha / PI.powi(3) * dist);
            KernelBound {
                value,
                admissible: true,
            }
        }
        _ => {
            return Err(Error::Config(format!(
                "no closed-form K1 bound is available for filter `{filter}`"
            )))
        }
    };
    Ok(bound)
}

/// `n` evenly spaced points strictly inside (0, 2π): the interior of an
/// (n + 2)-point grid including both endpoints.
pub fn interior_grid(n: usize) -> Vec<f64> {
    let step = 2.0 * PI / (n + 1) as f64;
    (1..=n).map(|i| i as f64 * step).collect()
}

/// One evaluated grid point of a bound sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundSample {
    pub k: usize,
    pub x: f64,
    pub abs_k1: f64,
    pub bound: f64,
    pub admissible: bool,
}

/// Result of checking |K1| ≤ bound over a grid and a list of K.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub filter: FilterSpec,
    pub k_values: Vec<usize>,
    pub grid: Vec<f64>,
    /// Admissible samples with |K1| > bound, sorted by (K, x).
    pub violations: Vec<BoundSample>,
    /// Inadmissible (K, x) pairs, which are skipped.
    pub skipped: usize,
    /// Minimum of bound - |K1| over admissible samples.
    pub max_slack: f64,
    /// Largest |K1| / bound over admissible samples.
    pub worst_ratio: f64,
    /// Every sample in (K, x) order.
    pub samples: Vec<BoundSample>,
}

impl BoundReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Evaluates |K1| against its bound at every grid point for every K.
pub fn verify_bounds(filter: &FilterSpec, k_values: &[usize], grid_n: usize) -> Result<BoundReport> {
    if grid_n < 2 {
        return Err(Error::Config(format!("grid must have at least 2 points, got {grid_n}")));
    }
    if k_values.is_empty() {
        return Err(Error::Config("at least one K is required".into()));
    }
    let grid = interior_grid(grid_n);
    // surface an unsupported filter before any work
    k1_bound(filter, k_values[0], grid[0])?;
    let mut samples = Vec::with_capacity(k_values.len() * grid.len());
    for &k in k_values {
        check_k(k)?;
        let weights = filter.weights_dd(k);
        let row: Vec<BoundSample> = grid
            .par_iter()
            .map(|&x| {
                let b = k1_bound(filter, k, x).expect("validated above");
                BoundSample {
                    k,
                    x,
                    abs_k1: eval_k1_with(&weights, x).abs().to_f64(),
                    bound: b.value,
                    admissible: b.admissible,
                }
            })
            .collect();
        samples.extend(row);
    }
    let mut violations: Vec<BoundSample> = samples
        .iter()
        .filter(|s| s.admissible && s.abs_k1 > s.bound)
        .copied()
        .collect();
    violations.sort_by(|p, q| p.k.cmp(&q.k).then(p.x.total_cmp(&q.x)));
    let skipped = samples.iter().filter(|s| !s.admissible).count();
    let admissible = samples.iter().filter(|s| s.admissible);
    let max_slack = admissible
        .clone()
        .map(|s| s.bound - s.abs_k1)
        .fold(f64::INFINITY, f64::min);
    let worst_ratio = admissible.map(|s| s.abs_k1 / s.bound).fold(0.0, f64::max);
    Ok(BoundReport {
        filter: *filter,
        k_values: k_values.to_vec(),
        grid,
        violations,
        skipped,
        max_slack,
        worst_ratio,
        samples,
    })
}

/// (K, |K1(x)|, bound) for each K.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracePoint {
    pub k: usize,
    pub abs_k1: f64,
    pub bound: f64,
    pub admissible: bool,
}

/// |K1(x)| and its bound along a list of K. Filters without a published
/// bound report NaN for the bound.
pub fn convergence_trace(filter: &FilterSpec, x: f64, k_values: &[usize]) -> Result<Vec<TracePoint>> {
    check_x(x)?;
    k_values
        .par_iter()
        .map(|&k| {
            check_k(k)?;
            let (bound, admissible) = match k1_bound(filter, k, x) {
                Ok(b) => (b.value, b.admissible),
                Err(Error::Config(_)) => (f64::NAN, false),
                Err(e) => return Err(e),
            };
            Ok(TracePoint {
                k,
                abs_k1: eval_k1_dd(filter, k, x).abs().to_f64(),
                bound,
                admissible,
            })
        })
        .collect()
}

/// Fitted log-log decay slope of |K1(x)| in K.
#[derive(Debug, Clone, PartialEq)]
pub struct SlopeFit {
    pub slope: f64,
    /// (K, envelope) pairs used in the fit.
    pub points: Vec<(usize, f64)>,
}

/// Least-squares slope of ln y against ln x.
pub fn loglog_slope(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 2 {
        return Err(Error::Numeric(format!(
            "slope fit needs at least 2 points, got {}",
            points.len()
        )));
    }
    let n = points.len() as f64;
    let lx: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

/// Decay slope of |K1(x)| over `k_values`.
///
/// |K1(x)| oscillates in K with period about 2π/x, so each K is replaced by
/// the envelope max |K1(x)| over K' in [K, K + ceil(2π/x)). Envelope values
/// at or below `floor` are dropped, and the fit uses the largest decade of
/// the remaining K.
pub fn decay_slope(filter: &FilterSpec, x: f64, k_values: &[usize], floor: f64) -> Result<SlopeFit> {
    check_x(x)?;
    let width = (2.0 * PI / x.min(2.0 * PI - x)).ceil() as usize;
    let env: Vec<(usize, f64)> = k_values
        .par_iter()
        .map(|&k| {
            let e = (k..k + width)
                .map(|kk| eval_k1_dd(filter, kk, x).abs().to_f64())
                .fold(0.0, f64::max);
            (k, e)
        })
        .collect();
    let above: Vec<(usize, f64)> = env.into_iter().filter(|p| p.1 > floor).collect();
    let top = above.iter().map(|p| p.0).max().unwrap_or(0);
    let points: Vec<(usize, f64)> = above.into_iter().filter(|p| p.0 * 10 >= top).collect();
    let slope = loglog_slope(&points.iter().map(|&(k, e)| (k as f64, e)).collect::<Vec<_>>())?;
    Ok(SlopeFit { slope, points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filters::AlphaRule;
    use proptest::prelude::*;

    fn all_filters() -> Vec<FilterSpec> {
        vec![
            FilterSpec::lanczos(),
            FilterSpec::raised_cosine(),
            FilterSpec::sharpened_raised_cosine(),
            FilterSpec::exponential(2, AlphaRule::Fixed(16.0)).unwrap(),
            FilterSpec::exponential(2, AlphaRule::KSquared).unwrap(),
        ]
    }

    #[test]
    fn zeta_values() {
        assert!((zeta(3.0) - 1.202_056_903_159_594_2).abs() < 1e-15);
        assert!((zeta(9.0) - 1.002_008_392_826_082_2).abs() < 1e-15);
        assert!((zeta(2.0) - PI * PI / 6.0).abs() < 1e-15);
    }

    #[test]
    fn k0_all_pass_is_dirichlet() {
        let f = FilterSpec::all_pass();
        for &k in &[1usize, 5, 17, 64] {
            for &x in &[0.3, 1.0, 2.9, 4.4, 6.1] {
                let d = ((k as f64 + 0.5) * x).sin() / (0.5 * x).sin();
                let v = eval_k0(&f, k, x).unwrap();
                assert!((v - d).abs() < 1e-11 * d.abs().max(1.0), "K={k} x={x}: {v} vs {d}");
            }
        }
    }

    #[test]
    fn k0_at_pi_is_alternating_sum() {
        let f = FilterSpec::raised_cosine();
        let want: f64 = 1.0
            + 2.0
                * (1..=8)
                    .map(|k| (-1f64).powi(k) * f.eval(k as f64 / 8.0, 8))
                    .sum::<f64>();
        assert!((eval_k0(&f, 8, PI).unwrap() - want).abs() < 1e-15);
    }

    #[test]
    fn k1_vanishes_at_pi() {
        for f in all_filters() {
            for k in [3, 16, 100] {
                // PI is the double nearest π, so K1 is of order 1e-16 · K0
                assert!(eval_k1(&f, k, PI).unwrap().abs() < 1e-15);
            }
        }
    }

    #[test]
    fn k1_is_the_integral_of_k0() {
        let (nodes, weights) = crate::engine::gauss_legendre(20);
        for f in all_filters() {
            for &(k, x) in &[(8usize, 0.7), (24, 2.2), (40, 5.0)] {
                // K0 is a trigonometric polynomial of degree K, so panel
                // Gauss-Legendre is essentially exact
                let panels = 4 * k;
                let h = (x - PI) / panels as f64;
                let mut s = 0.0;
                for p in 0..panels {
                    let mid = PI + (p as f64 + 0.5) * h;
                    for (z, w) in nodes.iter().zip(&weights) {
                        s += 0.5 * h * w * eval_k0(&f, k, mid + 0.5 * h * z).unwrap();
                    }
                }
                let k1 = eval_k1(&f, k, x).unwrap();
                assert!((k1 - s).abs() < 1e-8, "{f} K={k} x={x}: {k1} vs {s}");
            }
        }
    }

    #[test]
    fn bound_examples() {
        let b = k1_bound(&FilterSpec::lanczos(), 100, 0.5).unwrap();
        let want = 38.0 / (300.0 * PI) * ((0.5 - PI).abs() + 2.0 + 1.0 / (2.0 * PI - 0.5));
        assert!((b.value - want).abs() < 1e-15);
        assert!((b.value - 0.1942).abs() < 1e-4);
        assert!(b.admissible);
        assert!(!k1_bound(&FilterSpec::lanczos(), 5, 0.5).unwrap().admissible);
        for k in [4usize, 16, 100] {
            let b = k1_bound(&FilterSpec::raised_cosine(), k, PI).unwrap();
            assert!((b.value - 4.0 / (3.0 * (k * k) as f64)).abs() < 1e-15);
        }
        assert!(k1_bound(&FilterSpec::all_pass(), 16, 1.0).is_err());
        assert!(k1_bound(&FilterSpec::exponential(4, AlphaRule::Fixed(16.0)).unwrap(), 16, 1.0).is_err());
        assert!(k1_bound(&FilterSpec::lanczos(), 16, 0.0).is_err());
    }

    #[test]
    fn small_sweeps_hold() {
        for f in all_filters() {
            let r = verify_bounds(&f, &[16, 32, 64], 200).unwrap();
            assert!(r.holds(), "{f}: {:?}", r.violations.first());
            assert!(r.max_slack > 0.0);
        }
        assert!(verify_bounds(&FilterSpec::all_pass(), &[16], 100).is_err());
    }

    #[test]
    fn grid_is_interior_and_even() {
        let g = interior_grid(1000);
        assert_eq!(g.len(), 1000);
        assert!(g[0] > 0.0 && g[999] < 2.0 * PI);
        assert!(((g[1] - g[0]) - 2.0 * PI / 1001.0).abs() < 1e-15);
    }

    #[test]
    fn loglog_slope_recovers_power() {
        let pts: Vec<(f64, f64)> = (1..10).map(|i| (i as f64, 3.0 * (i as f64).powf(-2.5))).collect();
        assert!((loglog_slope(&pts).unwrap() + 2.5).abs() < 1e-12);
    }

    #[test]
    fn trace_reports_nan_bound_for_all_pass() {
        let t = convergence_trace(&FilterSpec::all_pass(), 0.5, &[16, 32]).unwrap();
        assert!(t.iter().all(|p| p.bound.is_nan() && p.abs_k1 > 0.0));
    }

    proptest! {
        #[test]
        fn k1_is_antisymmetric(x in 0.01f64..3.1, k in 1usize..200, which in 0usize..5) {
            let f = all_filters()[which];
            let lhs = eval_k1_dd(&f, k, x);
            let rhs = eval_k1_dd(&f, k, 2.0 * PI - x);
            prop_assert!((lhs + rhs).to_f64().abs() < 1e-12);
        }

        #[test]
        fn k0_is_symmetric(x in 0.01f64..3.1, k in 1usize..200, which in 0usize..5) {
            let f = all_filters()[which];
            let lhs = eval_k0(&f, k, x).unwrap();
            let rhs = eval_k0(&f, k, 2.0 * PI - x).unwrap();
            prop_assert!((lhs - rhs).abs() < 1e-10 * lhs.abs().max(1.0));
        }
    }
}
