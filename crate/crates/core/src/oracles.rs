//! Reference values that do not go through the cosine expansion: exact CDFs
//! and moments of finite laws, Poisson-binomial enumeration and convolution,
//! cosine coefficients summed directly over atoms, and Monte Carlo.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dd::NeumaierSum;
use crate::error::{Error, Result};
use crate::models::{DiscreteDist, DiscreteDist2D, GpbSpec, HawkesModel};

/// Right-continuous CDF of a finite law, P(X ≤ x).
pub fn exact_cdf(dist: &DiscreteDist, x: f64) -> f64 {
    dist.points()
        .iter()
        .zip(dist.probs())
        .filter(|(xm, _)| **xm <= x)
        .map(|(_, p)| *p)
        .collect::<NeumaierSum>()
        .value()
}

/// Exact CDF with precomputed compensated prefix sums for repeated queries.
#[derive(Debug, Clone)]
pub struct ExactCdf {
    points: Vec<f64>,
    prefix: Vec<f64>,
}

impl ExactCdf {
    pub fn new(dist: &DiscreteDist) -> Self {
        let mut acc = NeumaierSum::new();
        let prefix = dist
            .probs()
            .iter()
            .map(|p| {
                acc.add(*p);
                acc.value()
            })
            .collect();
        Self {
            points: dist.points().to_vec(),
            prefix,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.points.partition_point(|p| *p <= x);
        if n == 0 {
            0.0
        } else {
            self.prefix[n - 1]
        }
    }
}

/// P(X₁ ≤ x₁, X₂ ≤ x₂).
pub fn exact_cdf_2d(dist: &DiscreteDist2D, x1: f64, x2: f64) -> f64 {
    dist.atoms()
        .iter()
        .zip(dist.probs())
        .filter(|(a, _)| a[0] <= x1 && a[1] <= x2)
        .map(|(_, p)| *p)
        .collect::<NeumaierSum>()
        .value()
}

/// E[X^q].
pub fn exact_moment(dist: &DiscreteDist, q: u32) -> f64 {
    dist.points()
        .iter()
        .zip(dist.probs())
        .map(|(x, p)| p * x.powi(q as i32))
        .collect::<NeumaierSum>()
        .value()
}

/// Largest N accepted by [`gpb_enumerate`].
pub const ENUMERATION_LIMIT: usize = 24;
/// Largest support [`gpb_convolve`] may build.
pub const CONVOLUTION_CAP: usize = 1_000_000;

/// All 2^N outcomes of a generalized Poisson-binomial sum, with values
/// closer than 1e-12 merged.
pub fn gpb_enumerate(spec: &GpbSpec) -> Result<DiscreteDist> {
    let n = spec.n();
    if n > ENUMERATION_LIMIT {
        return Err(Error::Size(format!(
            "enumeration of 2^{n} outcomes exceeds the N <= {ENUMERATION_LIMIT} guard; use gpb_convolve"
        )));
    }
    let (a, b, p) = (spec.a(), spec.b(), spec.p());
    let atoms: Vec<(f64, f64)> = (0u64..1 << n)
        .map(|mask| {
            let mut value = NeumaierSum::new();
            let mut prob = 1.0;
            for i in 0..n {
                if mask >> i & 1 == 1 {
                    value.add(b[i]);
                    prob *= p[i];
                } else {
                    value.add(a[i]);
                    prob *= 1.0 - p[i];
                }
            }
            (value.value(), prob)
        })
        .filter(|&(_, prob)| prob > 0.0)
        .collect();
    DiscreteDist::from_atoms(atoms, 1e-12)
}

/// Generalized Poisson-binomial law by sequential convolution of the
/// Bernoulli factors, merging support values closer than `grid_tol` and
/// dropping zero-mass atoms.
pub fn gpb_convolve(spec: &GpbSpec, grid_tol: f64) -> Result<DiscreteDist> {
    if !(grid_tol >= 0.0) {
        return Err(Error::Config(format!("grid_tol = {grid_tol} must be nonnegative")));
    }
    let mut atoms: Vec<(f64, f64)> = vec![(0.0, 1.0)];
    for (i, ((a, b), p)) in spec.a().iter().zip(spec.b()).zip(spec.p()).enumerate() {
        let (lo, hi, p_lo, p_hi) = if a <= b {
            (*a, *b, 1.0 - p, *p)
        } else {
            (*b, *a, *p, 1.0 - p)
        };
        let left = atoms.iter().map(|&(x, q)| (x + lo, q * p_lo));
        let right = atoms.iter().map(|&(x, q)| (x + hi, q * p_hi));
        let merged = merge_sorted(left, right);
        let mut next: Vec<(f64, f64)> = Vec::with_capacity(merged.len());
        for (x, q) in merged {
            if q == 0.0 {
                continue;
            }
            match next.last_mut() {
                Some(last) if x - last.0 <= grid_tol => last.1 += q,
                _ => next.push((x, q)),
            }
        }
        if next.len() > CONVOLUTION_CAP {
            return Err(Error::Size(format!(
                "convolution support reached {} atoms after factor {i}, above the cap of {CONVOLUTION_CAP}",
                next.len()
            )));
        }
        atoms = next;
    }
    let (points, probs) = atoms.into_iter().unzip();
    DiscreteDist::new(points, probs)
}

fn merge_sorted(left: impl Iterator<Item = (f64, f64)>, right: impl Iterator<Item = (f64, f64)>) -> Vec<(f64, f64)> {
    let mut left = left.peekable();
    let mut right = right.peekable();
    let mut out = Vec::new();
    loop {
        let take_left = match (left.peek(), right.peek()) {
            (Some(l), Some(r)) => l.0 <= r.0,
            (Some(_), None) => true,
            (None, Some(_)) => false,
            (None, None) => break,
        };
        out.push(if take_left { left.next() } else { right.next() }.unwrap());
    }
    out
}

/// `A_k = (2/(b-a)) Σ_m p_m cos(kπ(X_m - a)/(b-a))`, k = 0..=K, summed over
/// the atoms without using the characteristic function.
pub fn direct_coefficients(dist: &DiscreteDist, a: f64, b: f64, k_max: usize) -> Result<Vec<f64>> {
    if !(b > a) {
        return Err(Error::Config(format!("interval [{a}, {b}] is empty")));
    }
    for &x in dist.points() {
        if !(x >= a && x <= b) {
            return Err(Error::Domain {
                what: "atom",
                value: x,
                lo: a,
                hi: b,
            });
        }
    }
    let len = b - a;
    Ok((0..=k_max)
        .map(|k| {
            let s: NeumaierSum = dist
                .points()
                .iter()
                .zip(dist.probs())
                .map(|(x, p)| p * (k as f64 * PI * (x - a) / len).cos())
                .collect();
            2.0 / len * s.value()
        })
        .collect())
}

/// `A_{k1,k2} = (4/(L₁L₂)) Σ p cos(k₁π(X₁-a₁)/L₁) cos(k₂π(X₂-a₂)/L₂)`,
/// row-major in k₁.
pub fn direct_coefficients_2d(
    dist: &DiscreteDist2D,
    a: [f64; 2],
    b: [f64; 2],
    k1_max: usize,
    k2_max: usize,
) -> Result<Vec<f64>> {
    for d in 0..2 {
        if !(b[d] > a[d]) {
            return Err(Error::Config(format!("interval [{}, {}] is empty", a[d], b[d])));
        }
    }
    for atom in dist.atoms() {
        for d in 0..2 {
            if !(atom[d] >= a[d] && atom[d] <= b[d]) {
                return Err(Error::Domain {
                    what: if d == 0 { "atom x1" } else { "atom x2" },
                    value: atom[d],
                    lo: a[d],
                    hi: b[d],
                });
            }
        }
    }
    let (l1, l2) = (b[0] - a[0], b[1] - a[1]);
    let mut out = Vec::with_capacity((k1_max + 1) * (k2_max + 1));
    for k1 in 0..=k1_max {
        for k2 in 0..=k2_max {
            let s: NeumaierSum = dist
                .atoms()
                .iter()
                .zip(dist.probs())
                .map(|(x, p)| {
                    p * (k1 as f64 * PI * (x[0] - a[0]) / l1).cos() * (k2 as f64 * PI * (x[1] - a[1]) / l2).cos()
                })
                .collect();
            out.push(4.0 / (l1 * l2) * s.value());
        }
    }
    Ok(out)
}

/// Draws one realization of a random variable.
pub trait Sampler: Sync {
    fn sample(&self, rng: &mut ChaCha8Rng) -> f64;
}

/// Inverse-CDF sampling of a finite law.
pub struct DiscreteSampler {
    points: Vec<f64>,
    cumulative: Vec<f64>,
}

impl DiscreteSampler {
    pub fn new(dist: &DiscreteDist) -> Self {
        let cdf = ExactCdf::new(dist);
        Self {
            points: cdf.points,
            cumulative: cdf.prefix,
        }
    }
}

impl Sampler for DiscreteSampler {
    fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        let u: f64 = rng.random();
        let i = self.cumulative.partition_point(|c| *c <= u);
        self.points[i.min(self.points.len() - 1)]
    }
}

impl Sampler for GpbSpec {
    fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        let mut acc = NeumaierSum::new();
        for ((a, b), p) in self.a().iter().zip(self.b()).zip(self.p()) {
            let u: f64 = rng.random();
            acc.add(if u < *p { *b } else { *a });
        }
        acc.value()
    }
}

fn exponential(rng: &mut ChaCha8Rng, rate: f64) -> f64 {
    let u: f64 = rng.random();
    -(1.0 - u).ln() / rate
}

/// N_T given F_t, simulated by thinning. Between defaults the intensity
/// relaxes toward c, so max(λ, c) dominates it until the next event.
impl Sampler for HawkesModel {
    fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        let mut s = self.t;
        let mut lambda = self.lambda_t;
        let mut count = self.count_t;
        loop {
            let dominating = lambda.max(self.c);
            if dominating <= 0.0 {
                break;
            }
            let wait = exponential(rng, dominating);
            if s + wait > self.horizon {
                break;
            }
            s += wait;
            lambda = self.c + (lambda - self.c) * (-self.kappa * wait).exp();
            let u: f64 = rng.random();
            if u * dominating <= lambda {
                count += 1;
                lambda += self.delta * exponential(rng, self.loss_rate);
            }
        }
        count as f64
    }
}

/// Paths per RNG stream; each block uses its own ChaCha stream so the
/// result does not depend on how blocks are scheduled.
pub const MC_BLOCK: usize = 4096;

/// Empirical CDF from Monte Carlo paths.
#[derive(Debug, Clone, PartialEq)]
pub struct McCdf {
    pub cdf: Vec<f64>,
    pub n_paths: usize,
    pub seed: u64,
    /// ½ n^{-1/2}, the standard error at the median.
    pub std_err: f64,
}

/// Draws `n_paths` samples in seeded blocks and returns their sorted values.
pub fn monte_carlo_samples<S: Sampler + ?Sized>(sampler: &S, n_paths: usize, seed: u64) -> Vec<f64> {
    let blocks = n_paths.div_ceil(MC_BLOCK);
    let mut samples: Vec<f64> = (0..blocks)
        .into_par_iter()
        .flat_map_iter(|blk| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(blk as u64);
            let n = MC_BLOCK.min(n_paths - blk * MC_BLOCK);
            (0..n).map(|_| sampler.sample(&mut rng)).collect::<Vec<_>>()
        })
        .collect();
    samples.par_sort_unstable_by(|a, b| a.total_cmp(b));
    samples
}

/// Empirical CDF P(X ≤ x) at each grid point.
pub fn monte_carlo_cdf<S: Sampler + ?Sized>(sampler: &S, n_paths: usize, x_grid: &[f64], seed: u64) -> Result<McCdf> {
    if n_paths == 0 {
        return Err(Error::Config("n_paths must be at least 1".into()));
    }
    let samples = monte_carlo_samples(sampler, n_paths, seed);
    let n = samples.len() as f64;
    let cdf = x_grid
        .iter()
        .map(|x| samples.partition_point(|s| s <= x) as f64 / n)
        .collect();
    Ok(McCdf {
        cdf,
        n_paths,
        seed,
        std_err: 0.5 / n.sqrt(),
    })
}
