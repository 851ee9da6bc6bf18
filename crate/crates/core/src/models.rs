//! Characteristic functions of the supported models: finite discrete laws
//! (1D and 2D), generalized Poisson-binomial sums and the default count of
//! an affine Hawkes process.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dd::NeumaierSum;
use crate::engine::{CharFn1D, CharFn2D};
use crate::error::{Error, Result};

const MASS_TOL: f64 = 1e-12;

/// A finite discrete law with strictly increasing support.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDist {
    points: Vec<f64>,
    probs: Vec<f64>,
}

impl DiscreteDist {
    pub fn new(points: Vec<f64>, probs: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Config("points: at least one atom is required".into()));
        }
        if points.len() != probs.len() {
            return Err(Error::Config(format!(
                "probs: expected {} entries to match points, got {}",
                points.len(),
                probs.len()
            )));
        }
        if let Some(i) = points.iter().position(|x| !x.is_finite()) {
            return Err(Error::Config(format!("points[{i}] is not finite")));
        }
        if let Some(i) = points.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::Config(format!(
                "points must be strictly increasing: points[{i}] = {} >= points[{}] = {}",
                points[i],
                i + 1,
                points[i + 1]
            )));
        }
        check_probs(&probs, "probs")?;
        Ok(Self { points, probs })
    }

    /// Builds a law from unsorted atoms, merging values closer than `tol`.
    pub fn from_atoms(mut atoms: Vec<(f64, f64)>, tol: f64) -> Result<Self> {
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut points: Vec<f64> = Vec::with_capacity(atoms.len());
        let mut probs: Vec<f64> = Vec::with_capacity(atoms.len());
        for (x, p) in atoms {
            match points.last() {
                Some(&last) if x - last <= tol => *probs.last_mut().unwrap() += p,
                _ => {
                    points.push(x);
                    probs.push(p);
                }
            }
        }
        Self::new(points, probs)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.points[0]
    }

    pub fn max(&self) -> f64 {
        self.points[self.points.len() - 1]
    }
}

fn check_probs(probs: &[f64], field: &str) -> Result<()> {
    if let Some(i) = probs.iter().position(|p| !(p.is_finite() && *p >= 0.0)) {
        return Err(Error::Config(format!(
            "{field}[{i}] = {} must be a nonnegative number",
            probs[i]
        )));
    }
    let total = probs.iter().copied().collect::<NeumaierSum>().value();
    if (total - 1.0).abs() > MASS_TOL {
        return Err(Error::Config(format!("{field} must sum to 1, got {total}")));
    }
    Ok(())
}

/// φ(ω) = Σ p_m e^{iωX_m}.
impl CharFn1D for DiscreteDist {
    fn eval(&self, omega: f64) -> Result<Complex64> {
        let mut re = NeumaierSum::new();
        let mut im = NeumaierSum::new();
        for (x, p) in self.points.iter().zip(&self.probs) {
            let (s, c) = (omega * x).sin_cos();
            re.add(p * c);
            im.add(p * s);
        }
        Ok(Complex64::new(re.value(), im.value()))
    }
}

/// The characteristic function of a finite discrete law.
pub fn charfn_discrete(dist: &DiscreteDist) -> &dyn CharFn1D {
    dist
}

/// A finite bivariate discrete law given by its atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDist2D {
    atoms: Vec<[f64; 2]>,
    probs: Vec<f64>,
}

impl DiscreteDist2D {
    pub fn new(atoms: Vec<[f64; 2]>, probs: Vec<f64>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::Config("atoms: at least one atom is required".into()));
        }
        if atoms.len() != probs.len() {
            return Err(Error::Config(format!(
                "probs: expected {} entries to match atoms, got {}",
                atoms.len(),
                probs.len()
            )));
        }
        if let Some(i) = atoms.iter().position(|a| !(a[0].is_finite() && a[1].is_finite())) {
            return Err(Error::Config(format!("atoms[{i}] is not finite")));
        }
        check_probs(&probs, "probs")?;
        Ok(Self { atoms, probs })
    }

    /// The product law of two independent marginals.
    pub fn independent(x1: &DiscreteDist, x2: &DiscreteDist) -> Self {
        let mut atoms = Vec::with_capacity(x1.len() * x2.len());
        let mut probs = Vec::with_capacity(x1.len() * x2.len());
        for (a, p) in x1.points.iter().zip(&x1.probs) {
            for (b, q) in x2.points.iter().zip(&x2.probs) {
                atoms.push([*a, *b]);
                probs.push(p * q);
            }
        }
        Self { atoms, probs }
    }

    pub fn atoms(&self) -> &[[f64; 2]] {
        &self.atoms
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Smallest rectangle holding every atom, as ([lo1, lo2], [hi1, hi2]).
    pub fn hull(&self) -> ([f64; 2], [f64; 2]) {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for a in &self.atoms {
            for d in 0..2 {
                lo[d] = lo[d].min(a[d]);
                hi[d] = hi[d].max(a[d]);
            }
        }
        (lo, hi)
    }
}

impl CharFn2D for DiscreteDist2D {
    fn eval(&self, omega1: f64, omega2: f64) -> Result<Complex64> {
        let mut re = NeumaierSum::new();
        let mut im = NeumaierSum::new();
        for (a, p) in self.atoms.iter().zip(&self.probs) {
            let (s, c) = (omega1 * a[0] + omega2 * a[1]).sin_cos();
            re.add(p * c);
            im.add(p * s);
        }
        Ok(Complex64::new(re.value(), im.value()))
    }
}

/// X = Σ_n (a_n (1 - I_n) + b_n I_n) with independent I_n ~ Bernoulli(p_n).
#[derive(Debug, Clone, PartialEq)]
pub struct GpbSpec {
    a: Vec<f64>,
    b: Vec<f64>,
    p: Vec<f64>,
}

impl GpbSpec {
    pub fn new(a: Vec<f64>, b: Vec<f64>, p: Vec<f64>) -> Result<Self> {
        let n = p.len();
        if n == 0 {
            return Err(Error::Config("p: at least one trial is required".into()));
        }
        if a.len() != n || b.len() != n {
            return Err(Error::Config(format!(
                "a, b and p must have equal lengths, got {}, {} and {n}",
                a.len(),
                b.len()
            )));
        }
        for (name, v) in [("a", &a), ("b", &b)] {
            if let Some(i) = v.iter().position(|x| !x.is_finite()) {
                return Err(Error::Config(format!("{name}[{i}] is not finite")));
            }
        }
        if let Some(i) = p.iter().position(|x| !(0.0..=1.0).contains(x)) {
            return Err(Error::Config(format!("p[{i}] = {} must lie in [0, 1]", p[i])));
        }
        Ok(Self { a, b, p })
    }

    /// Plain Poisson-binomial: a_n = 0, b_n = 1.
    pub fn poisson_binomial(p: Vec<f64>) -> Result<Self> {
        let n = p.len();
        Self::new(vec![0.0; n], vec![1.0; n], p)
    }

    pub fn n(&self) -> usize {
        self.p.len()
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    /// The range [Σ min(a_n, b_n), Σ max(a_n, b_n)] of possible values.
    pub fn hull(&self) -> (f64, f64) {
        let lo = self
            .a
            .iter()
            .zip(&self.b)
            .map(|(a, b)| a.min(*b))
            .collect::<NeumaierSum>();
        let hi = self
            .a
            .iter()
            .zip(&self.b)
            .map(|(a, b)| a.max(*b))
            .collect::<NeumaierSum>();
        (lo.value(), hi.value())
    }

    /// True when every a_n and b_n is an integer, so the law lives on ℤ.
    pub fn is_integer_valued(&self) -> bool {
        self.a.iter().chain(&self.b).all(|x| x.fract() == 0.0)
    }

    pub fn mean(&self) -> f64 {
        self.a
            .iter()
            .zip(&self.b)
            .zip(&self.p)
            .map(|((a, b), p)| a * (1.0 - p) + b * p)
            .collect::<NeumaierSum>()
            .value()
    }
}

/// φ(ω) = Π_n ((1 - p_n) e^{iωa_n} + p_n e^{iωb_n}).
impl CharFn1D for GpbSpec {
    fn eval(&self, omega: f64) -> Result<Complex64> {
        let mut acc = Complex64::new(1.0, 0.0);
        for ((a, b), p) in self.a.iter().zip(&self.b).zip(&self.p) {
            let factor = (1.0 - p) * Complex64::from_polar(1.0, omega * a) + p * Complex64::from_polar(1.0, omega * b);
            acc *= factor;
        }
        Ok(acc)
    }
}

/// The characteristic function of a generalized Poisson-binomial sum.
pub fn charfn_gpb(spec: &GpbSpec) -> &dyn CharFn1D {
    spec
}

/// Default-count model with intensity
/// `dλ = κ(c - λ)dt + δ dL`, where L accumulates exponentially distributed
/// losses with rate `loss_rate` at each default.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HawkesModel {
    pub kappa: f64,
    pub c: f64,
    pub delta: f64,
    pub loss_rate: f64,
    /// Current time.
    pub t: f64,
    /// Horizon.
    #[serde(rename = "T")]
    pub horizon: f64,
    pub lambda_t: f64,
    /// Cumulative loss at `t`.
    #[serde(rename = "L_t")]
    pub loss_t: f64,
    /// Default count at `t`.
    #[serde(rename = "N_t")]
    pub count_t: u64,
}

/// RK4 steps used when a caller does not choose.
pub const DEFAULT_STEPS: usize = 2000;

impl HawkesModel {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("kappa", self.kappa),
            ("c", self.c),
            ("delta", self.delta),
            ("loss_rate", self.loss_rate),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} = {v} must be positive")));
            }
        }
        if !(self.t.is_finite() && self.horizon.is_finite() && self.horizon >= self.t) {
            return Err(Error::Config(format!(
                "T = {} must be finite and not before t = {}",
                self.horizon, self.t
            )));
        }
        if !(self.lambda_t >= 0.0 && self.lambda_t.is_finite()) {
            return Err(Error::Config(format!(
                "lambda_t = {} must be nonnegative",
                self.lambda_t
            )));
        }
        if !self.loss_t.is_finite() {
            return Err(Error::Config("L_t is not finite".into()));
        }
        Ok(())
    }

    /// θ(w) = E[e^{wZ}] for Z ~ Exp(loss_rate).
    pub fn theta(&self, w: Complex64) -> Result<Complex64> {
        let gap = Complex64::new(self.loss_rate, 0.0) - w;
        if gap.norm() < 1e-12 {
            return Err(Error::Numeric(format!(
                "loss transform pole: w = {w} is within 1e-12 of loss_rate = {}",
                self.loss_rate
            )));
        }
        Ok(self.loss_rate / gap)
    }

    /// γ = κ - δ/loss_rate, the decay rate of the expected intensity.
    pub fn gamma(&self) -> f64 {
        self.kappa - self.delta / self.loss_rate
    }

    /// E[N_T | F_t] in closed form.
    pub fn mean_count(&self) -> f64 {
        let tau = self.horizon - self.t;
        let g = self.gamma();
        let (beta, alpha) = if g.abs() < 1e-12 {
            (tau, self.kappa * self.c * tau * tau / 2.0)
        } else {
            let decay = -(-g * tau).exp_m1();
            (decay / g, self.kappa * self.c * (tau / g - decay / (g * g)))
        };
        self.count_t as f64 + beta * self.lambda_t + alpha
    }

    /// E[N_T | F_t] from the linear moment ODEs
    /// `β' = γβ - 1`, `α' = -κcβ`, `β(T) = α(T) = 0`, integrated backward with
    /// the same fixed-step RK4 as the transform.
    pub fn mean_count_ode(&self, steps: usize) -> Result<f64> {
        self.validate()?;
        if steps == 0 {
            return Err(Error::Config("steps must be at least 1".into()));
        }
        let g = self.gamma();
        let kc = self.kappa * self.c;
        // in reversed time τ = T - s: dβ/dτ = 1 - γβ, dα/dτ = κcβ
        let f = |beta: f64| (1.0 - g * beta, kc * beta);
        let h = (self.horizon - self.t) / steps as f64;
        let (mut beta, mut alpha) = (0.0f64, 0.0f64);
        for _ in 0..steps {
            let k1 = f(beta);
            let k2 = f(beta + 0.5 * h * k1.0);
            let k3 = f(beta + 0.5 * h * k2.0);
            let k4 = f(beta + h * k3.0);
            beta += h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
            alpha += h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
        }
        Ok(self.count_t as f64 + beta * self.lambda_t + alpha)
    }
}

/// Terminal-value solution of the transform ODEs at time t.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeSolution {
    pub a_t: Complex64,
    pub b_t: Complex64,
    pub steps: usize,
    pub step_size: f64,
}

/// Integrates
///
/// ```text
/// b' = κb + 1 - θ(δb + u₁) e^{u₂},   a' = -κc b,   a(T) = b(T) = 0
/// ```
///
/// backward from T to t with `steps` classical RK4 steps.
pub fn solve_transform_odes(model: &HawkesModel, u: [Complex64; 2], steps: usize) -> Result<OdeSolution> {
    model.validate()?;
    if steps == 0 {
        return Err(Error::Config("steps must be at least 1".into()));
    }
    for (i, ui) in u.iter().enumerate() {
        if ui.re > 0.0 {
            return Err(Error::Config(format!(
                "u{} = {ui} must have nonpositive real part",
                i + 1
            )));
        }
    }
    let ku = u[1].exp();
    let kc = model.kappa * model.c;
    // reversed time τ = T - s
    let rhs = |b: Complex64| -> Result<(Complex64, Complex64)> {
        let th = model.theta(model.delta * b + u[0])?;
        Ok((-(model.kappa * b + 1.0 - th * ku), kc * b))
    };
    let h = (model.horizon - model.t) / steps as f64;
    let mut a = Complex64::new(0.0, 0.0);
    let mut b = Complex64::new(0.0, 0.0);
    for step in 0..steps {
        let k1 = rhs(b)?;
        let k2 = rhs(b + 0.5 * h * k1.0)?;
        let k3 = rhs(b + 0.5 * h * k2.0)?;
        let k4 = rhs(b + h * k3.0)?;
        b += h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
        a += h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
        if !(b.re.is_finite() && b.im.is_finite() && a.re.is_finite() && a.im.is_finite()) {
            return Err(Error::Numeric(format!("transform ODE diverged at step {}", step + 1)));
        }
        if b.re > 1e-12 {
            return Err(Error::Numeric(format!(
                "transform ODE left the bounded region: Re b = {} > 0 at step {}",
                b.re,
                step + 1
            )));
        }
    }
    Ok(OdeSolution {
        a_t: a,
        b_t: b,
        steps,
        step_size: h,
    })
}

/// E[exp(u·J_T) | F_t] = exp(a(t) + b(t)λ_t + u·J_t), J = (L, N).
pub fn hawkes_transform(model: &HawkesModel, u: [Complex64; 2], steps: usize) -> Result<Complex64> {
    if u[0] == Complex64::new(0.0, 0.0) && u[1] == Complex64::new(0.0, 0.0) {
        model.validate()?;
        return Ok(Complex64::new(1.0, 0.0));
    }
    let sol = solve_transform_odes(model, u, steps)?;
    Ok((sol.a_t + sol.b_t * model.lambda_t + u[0] * model.loss_t + u[1] * model.count_t as f64).exp())
}

/// ω ↦ E[e^{iωN_T} | F_t].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HawkesCountCharFn {
    pub model: HawkesModel,
    pub steps: usize,
}

pub fn hawkes_count_charfn(model: &HawkesModel, steps: usize) -> Result<HawkesCountCharFn> {
    model.validate()?;
    if steps == 0 {
        return Err(Error::Config("steps must be at least 1".into()));
    }
    Ok(HawkesCountCharFn { model: *model, steps })
}

impl CharFn1D for HawkesCountCharFn {
    fn eval(&self, omega: f64) -> Result<Complex64> {
        hawkes_transform(
            &self.model,
            [Complex64::new(0.0, 0.0), Complex64::new(0.0, omega)],
            self.steps,
        )
    }
}

/// (ω₁, ω₂) ↦ E[e^{i(ω₁L_T + ω₂N_T)} | F_t].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HawkesJointCharFn {
    pub model: HawkesModel,
    pub steps: usize,
}

impl CharFn2D for HawkesJointCharFn {
    fn eval(&self, omega1: f64, omega2: f64) -> Result<Complex64> {
        hawkes_transform(
            &self.model,
            [Complex64::new(0.0, omega1), Complex64::new(0.0, omega2)],
            self.steps,
        )
    }
}

/// A model document as stored on disk, tagged by `"type"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum ModelSpec {
    Discrete {
        points: Vec<f64>,
        probs: Vec<f64>,
        /// Preferred expansion interval.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        range: Option<[f64; 2]>,
    },
    Discrete2d {
        atoms: Vec<[f64; 2]>,
        probs: Vec<f64>,
        /// Preferred expansion rectangle as one interval per coordinate.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        range: Option<[[f64; 2]; 2]>,
    },
    Gpb {
        a: Vec<f64>,
        b: Vec<f64>,
        p: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        range: Option<[f64; 2]>,
    },
    Pb {
        p: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        range: Option<[f64; 2]>,
    },
    Hawkes(HawkesModel),
}

/// A validated model.
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Discrete(DiscreteDist),
    Discrete2D(DiscreteDist2D),
    Gpb(GpbSpec),
    Hawkes(HawkesModel),
}

impl ModelSpec {
    /// The interval stored with a univariate model, if any.
    pub fn preferred_range(&self) -> Option<(f64, f64)> {
        match self {
            ModelSpec::Discrete { range, .. } | ModelSpec::Gpb { range, .. } | ModelSpec::Pb { range, .. } => {
                range.map(|r| (r[0], r[1]))
            }
            _ => None,
        }
    }

    /// The rectangle stored with a bivariate model, if any.
    pub fn preferred_range_2d(&self) -> Option<([f64; 2], [f64; 2])> {
        match self {
            ModelSpec::Discrete2d { range: Some(r), .. } => Some(([r[0][0], r[1][0]], [r[0][1], r[1][1]])),
            _ => None,
        }
    }

    pub fn build(self) -> Result<Model> {
        Ok(match self {
            ModelSpec::Discrete { points, probs, .. } => Model::Discrete(DiscreteDist::new(points, probs)?),
            ModelSpec::Discrete2d { atoms, probs, .. } => Model::Discrete2D(DiscreteDist2D::new(atoms, probs)?),
            ModelSpec::Gpb { a, b, p, .. } => Model::Gpb(GpbSpec::new(a, b, p)?),
            ModelSpec::Pb { p, .. } => Model::Gpb(GpbSpec::poisson_binomial(p)?),
            ModelSpec::Hawkes(m) => {
                m.validate()?;
                Model::Hawkes(m)
            }
        })
    }
}

impl Model {
    pub fn type_name(&self) -> &'static str {
        match self {
            Model::Discrete(_) => "discrete",
            Model::Discrete2D(_) => "discrete2d",
            Model::Gpb(_) => "gpb",
            Model::Hawkes(_) => "hawkes",
        }
    }

    /// The univariate characteristic function, if the model is univariate.
    pub fn charfn_1d(&self, steps: usize) -> Result<Box<dyn CharFn1D + '_>> {
        match self {
            Model::Discrete(d) => Ok(Box::new(d)),
            Model::Gpb(g) => Ok(Box::new(g)),
            Model::Hawkes(h) => Ok(Box::new(hawkes_count_charfn(h, steps)?)),
            Model::Discrete2D(_) => Err(Error::Config(
                "model: a bivariate model needs a bivariate command (cdf2d)".into(),
            )),
        }
    }

    /// Range of possible values for models with bounded support.
    pub fn support_hull(&self) -> Option<(f64, f64)> {
        match self {
            Model::Discrete(d) => Some((d.min(), d.max())),
            Model::Gpb(g) => Some(g.hull()),
            _ => None,
        }
    }
}
