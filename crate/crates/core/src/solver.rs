//! Proximal gradient (forward-backward) for `Θ`, with exact prox steps for
//! every `(θ, h)` pairing and a log-linear rate fit for its traces.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{dist, norm, ranked_by, spectral_norm};
use crate::sets::{
    project_nonneg, project_sparse_simplex, project_sparse_sphere, project_sparse_sphere_nonneg,
    project_sparsity, zero_norm, SupportSet,
};
use crate::subdiff::{objective, HKind, ProblemSpec, ThetaKind};

/// Gap below which a rate fit treats `Θ_k − θ*` as exhausted.
pub const GAP_FLOOR: f64 = 1e-14;
/// Iterations required after support stabilization for a rate fit.
pub const MIN_RATE_TAIL: usize = 20;
const MIN_USABLE_GAPS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepRule {
    /// `1 / (2‖A‖₂ + 1e-8)`.
    Auto,
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub max_iters: usize,
    pub step: StepRule,
    /// Stop once `‖x_{k+1} − x_k‖ ≤ tol`.
    pub tol: f64,
    /// Seed for [`random_feasible_point`] when the caller has no start.
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { max_iters: 1000, step: StepRule::Auto, tol: 1e-12, seed: 0 }
    }
}

impl SolverConfig {
    /// The step size for `A`, validated against `step·2‖A‖₂ < 1`.
    pub fn resolve_step(&self, a_norm: f64) -> Result<f64> {
        let t = match self.step {
            StepRule::Auto => 1.0 / (2.0 * a_norm + 1e-8),
            StepRule::Fixed(t) => t,
        };
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::Config(format!("step {t} must be positive and finite")));
        }
        if t * 2.0 * a_norm >= 1.0 {
            return Err(Error::Config(format!(
                "step {t} violates step·2‖A‖ < 1 (‖A‖ = {a_norm})"
            )));
        }
        if !(self.tol > 0.0) {
            return Err(Error::Config(format!("tol {} must be positive", self.tol)));
        }
        Ok(t)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceEntry {
    pub k: usize,
    pub x: Vec<f64>,
    pub value: f64,
    pub support: SupportSet,
    /// `‖x_k − x_{k−1}‖`, zero at `k = 0`.
    pub step_norm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterateTrace {
    pub entries: Vec<TraceEntry>,
    /// First `k` after which the support never changes.
    pub support_stable_from: Option<usize>,
    pub step: f64,
}

impl IterateTrace {
    pub fn last(&self) -> &TraceEntry {
        self.entries.last().expect("trace is never empty")
    }

    pub fn values(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.value).collect()
    }
}

/// First index from which all supports equal the last one.
pub fn stable_from<T: PartialEq>(supports: &[T]) -> Option<usize> {
    let last = supports.last()?;
    let mut k = supports.len() - 1;
    while k > 0 && supports[k - 1] == *last {
        k -= 1;
    }
    Some(k)
}

/// Prox of `ν‖·‖₀` with parameter `t`: keep `|u_i| > √(2νt)`, drop ties.
pub fn hard_threshold(u: &[f64], t: f64, nu: f64) -> Vec<f64> {
    let thr = (2.0 * nu * t).sqrt();
    u.iter().map(|&v| if v.abs() > thr { v } else { 0.0 }).collect()
}

/// Best `x = u_{J_k}/‖u_{J_k}‖` over prefixes `J_k` of `order`, scored by
/// `−‖u_{J_k}‖ + tνk`; the smallest `k` wins ties.
fn sphere_prefix(u: &[f64], order: &[usize], t: f64, nu: f64) -> Vec<f64> {
    let mut best = (f64::INFINITY, 0usize);
    let mut sq = 0.0;
    for (k, &i) in order.iter().enumerate() {
        sq += u[i] * u[i];
        let score = -sq.sqrt() + t * nu * (k + 1) as f64;
        if score < best.0 {
            best = (score, k + 1);
        }
    }
    let keep = &order[..best.1];
    let n = keep.iter().map(|&i| u[i] * u[i]).sum::<f64>().sqrt();
    let mut x = vec![0.0; u.len()];
    for &i in keep {
        x[i] = u[i] / n;
    }
    x
}

/// `argmin_x ½‖x − u‖² + t·(θ + h)(x)`.
pub fn prox_theta_h(theta: ThetaKind, h: HKind, u: &[f64], t: f64) -> Result<Vec<f64>> {
    if u.is_empty() {
        return Err(Error::arg("empty input"));
    }
    if !(t > 0.0) {
        return Err(Error::arg(format!("t = {t} must be positive")));
    }
    match (theta, h) {
        (ThetaKind::Zero, HKind::ZeroNorm { nu }) => Ok(hard_threshold(u, t, nu)),
        (ThetaKind::NonnegOrthant, HKind::ZeroNorm { nu }) => {
            Ok(hard_threshold(&project_nonneg(u), t, nu))
        }
        (ThetaKind::Zero, HKind::SparsityBall { kappa }) => project_sparsity(u, kappa),
        (ThetaKind::NonnegOrthant, HKind::SparsityBall { kappa }) => {
            project_sparsity(&project_nonneg(u), kappa)
        }
        (ThetaKind::Sphere, HKind::SparsityBall { kappa }) => project_sparse_sphere(u, kappa),
        (ThetaKind::SphereNonneg, HKind::SparsityBall { kappa }) => {
            project_sparse_sphere_nonneg(u, kappa)
        }
        (ThetaKind::Simplex, HKind::SparsityBall { kappa }) => project_sparse_simplex(u, kappa),
        (ThetaKind::Sphere, HKind::ZeroNorm { nu }) => {
            if norm(u) == 0.0 {
                return Err(Error::Degenerate("prox onto the sphere at u = 0".into()));
            }
            let order: Vec<usize> =
                ranked_by(u, f64::abs).into_iter().take_while(|&i| u[i] != 0.0).collect();
            Ok(sphere_prefix(u, &order, t, nu))
        }
        (ThetaKind::SphereNonneg, HKind::ZeroNorm { nu }) => {
            let order: Vec<usize> =
                ranked_by(u, |v| v).into_iter().take_while(|&i| u[i] > 0.0).collect();
            if order.is_empty() {
                // every feasible x has ⟨x,u⟩ ≤ max u, attained 1-sparse
                return project_sparse_sphere_nonneg(u, 1);
            }
            Ok(sphere_prefix(u, &order, t, nu))
        }
        (ThetaKind::Simplex, HKind::ZeroNorm { nu }) => {
            // the best point with at most k nonzeros is the sparse simplex
            // projection; score it with its actual support size
            let mut best: Option<(f64, Vec<f64>)> = None;
            for k in 1..=u.len() {
                let x = project_sparse_simplex(u, k)?;
                let val = 0.5 * dist(&x, u).powi(2) + t * nu * zero_norm(&x) as f64;
                if best.as_ref().is_none_or(|(b, _)| val < *b) {
                    best = Some((val, x));
                }
            }
            Ok(best.expect("p ≥ 1").1)
        }
    }
}

/// A point of `dom Θ` drawn from a seeded Gaussian.
pub fn random_feasible_point(problem: &ProblemSpec, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = problem.dim();
    let mut g: Vec<f64> = (0..p).map(|_| StandardNormal.sample(&mut rng)).collect();
    if let HKind::SparsityBall { kappa } = problem.h() {
        g = project_sparsity(&g, kappa).expect("κ validated by ProblemSpec");
    }
    match problem.theta() {
        ThetaKind::Zero => g,
        ThetaKind::NonnegOrthant => g.iter().map(|v| v.abs()).collect(),
        ThetaKind::Sphere => {
            let n = norm(&g);
            g.iter().map(|v| v / n).collect()
        }
        ThetaKind::SphereNonneg => {
            let n = norm(&g);
            g.iter().map(|v| v.abs() / n).collect()
        }
        ThetaKind::Simplex => {
            let s: f64 = g.iter().map(|v| v.abs()).sum();
            g.iter().map(|v| v.abs() / s).collect()
        }
    }
}

/// Runs `x_{k+1} = prox(x_k − 2t·A x_k, t)` from `x0`. A start outside
/// `dom Θ` is accepted; the first prox step lands in the domain.
pub fn proximal_gradient(
    problem: &ProblemSpec,
    x0: &[f64],
    config: &SolverConfig,
) -> Result<IterateTrace> {
    let t = config.resolve_step(spectral_norm(problem.a()))?;
    if x0.len() != problem.dim() || x0.iter().any(|v| !v.is_finite()) {
        return Err(Error::arg("x0 must be a finite vector of the problem dimension"));
    }
    let entry = |k: usize, x: Vec<f64>, step_norm: f64| TraceEntry {
        k,
        value: objective(problem, &x),
        support: SupportSet::of(&x),
        x,
        step_norm,
    };
    let mut entries = vec![entry(0, x0.to_vec(), 0.0)];
    for k in 1..=config.max_iters {
        let x = &entries[k - 1].x;
        let ax = problem.a().mul_vec(x);
        let u: Vec<f64> = x.iter().zip(&ax).map(|(xi, gi)| xi - 2.0 * t * gi).collect();
        let next = prox_theta_h(problem.theta(), problem.h(), &u, t)?;
        let step_norm = dist(&next, x);
        entries.push(entry(k, next, step_norm));
        if step_norm <= config.tol {
            break;
        }
    }
    let supports: Vec<&SupportSet> = entries.iter().map(|e| &e.support).collect();
    Ok(IterateTrace { support_stable_from: stable_from(&supports), entries, step: t })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateFit {
    /// Slope of `log(Θ_k − θ*)` against `k`, i.e. `log q`.
    pub slope: f64,
    pub r_squared: f64,
    /// Number of points entering the fit.
    pub tail_len: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum RateOutcome {
    Fit(RateFit),
    /// Fewer than a handful of gaps exceed the floor; nothing to fit.
    GapExhausted { usable: usize },
}

/// Least squares line through `(x_i, y_i)`: `(slope, intercept, R²)`.
pub(crate) fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    (slope, my - slope * mx, r2)
}

/// Fits `log(values[k] − θ*)` against `k` over `k ≥ stable_from`, keeping
/// gaps above [`GAP_FLOOR`].
pub fn fit_linear_rate(values: &[f64], stable_from: usize, theta_star: f64) -> Result<RateOutcome> {
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    if theta_star > min + 1e-12 {
        return Err(Error::arg(format!("θ* = {theta_star} exceeds the best trace value {min}")));
    }
    let tail = values.len().saturating_sub(stable_from);
    if tail < MIN_RATE_TAIL {
        return Err(Error::Estimation {
            reason: format!("{tail} iterations after support stabilization, need {MIN_RATE_TAIL}"),
            partial: None,
        });
    }
    let (ks, logs): (Vec<f64>, Vec<f64>) = values
        .iter()
        .enumerate()
        .skip(stable_from)
        .filter(|(_, v)| **v - theta_star > GAP_FLOOR)
        .map(|(k, v)| (k as f64, (v - theta_star).ln()))
        .unzip();
    if ks.len() < MIN_USABLE_GAPS {
        return Ok(RateOutcome::GapExhausted { usable: ks.len() });
    }
    let (slope, _, r_squared) = linear_fit(&ks, &logs);
    Ok(RateOutcome::Fit(RateFit { slope, r_squared, tail_len: ks.len() }))
}

pub fn estimate_linear_rate(trace: &IterateTrace, theta_star: f64) -> Result<RateOutcome> {
    fit_linear_rate(&trace.values(), trace.support_stable_from.unwrap_or(0), theta_star)
}
