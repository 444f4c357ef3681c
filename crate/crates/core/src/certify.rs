//! Empirical KL checks around a critical point `x̄`.
//!
//! Points are drawn in `B(x̄, δ) ∩ [Θ(x̄) < Θ < Θ(x̄) + η]` along two kinds of
//! moves: perturbations that keep `supp(x̄)`, and (under `h = δ_Ω` below the
//! sparsity level) perturbations that grow the support. For every accepted
//! point the exact subdifferential distance is paired with the objective gap,
//! and the lower envelope of `log dist` against `log gap` is fitted.
//!
//! Everything here is evidence, not proof. Under `h = ν‖·‖₀`, any support
//! change costs at least `ν`; keeping `η < ν/3` keeps the window inside the
//! regime where only same-support points qualify.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{dist, dot, norm, SymMatrix};
use crate::sets::{project_simplex, zero_norm, SupportSet};
use crate::solver::linear_fit;
use crate::sphere_quadratic::{kl_constant_theoretical, same_order_holds, KlConstant};
use crate::subdiff::{subdiff_distance, HKind, ProblemSpec, ThetaKind};

/// Criticality tolerance required of `x̄`.
pub const CRITICAL_TOL: f64 = 1e-8;
/// Samples needed before an exponent is fitted.
pub const MIN_FIT_SAMPLES: usize = 30;
pub const FIT_BINS: usize = 20;
/// Smallest `ĉ` that counts as bounded away from zero.
pub const MIN_CONSTANT: f64 = 1e-6;
/// Largest fitted exponent still read as `1/2`.
pub const MAX_EXPONENT: f64 = 0.6;
/// Innermost radius as a fraction of `δ`.
const INNER_RADIUS: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct KlSample {
    pub point: Vec<f64>,
    /// `Θ(x) − Θ(x̄) > 0`.
    pub gap: f64,
    pub dist: f64,
    /// `‖x − x̄‖`.
    pub radius: f64,
    pub same_support: bool,
}

impl KlSample {
    pub fn ratio(&self) -> f64 {
        self.dist / self.gap.sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplingConfig {
    pub delta: f64,
    pub eta: f64,
    pub n: usize,
    pub seed: u64,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        Self { delta: 1e-2, eta: 1e-2, n: 500, seed: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum MoveKind {
    SameSupport,
    Grow,
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

pub(crate) fn require_critical(problem: &ProblemSpec, xbar: &[f64]) -> Result<()> {
    let residual = subdiff_distance(problem, xbar)?.distance;
    if residual > CRITICAL_TOL {
        return Err(Error::NotCritical { residual });
    }
    Ok(())
}

pub(crate) fn move_kinds(problem: &ProblemSpec, support: &SupportSet) -> Vec<MoveKind> {
    let mut kinds = Vec::new();
    let same_ok = match problem.theta() {
        ThetaKind::Sphere | ThetaKind::SphereNonneg | ThetaKind::Simplex => support.len() >= 2,
        ThetaKind::Zero | ThetaKind::NonnegOrthant => !support.is_empty(),
    };
    if same_ok {
        kinds.push(MoveKind::SameSupport);
    }
    if let HKind::SparsityBall { kappa } = problem.h() {
        if support.len() < kappa {
            kinds.push(MoveKind::Grow);
        }
    }
    kinds
}

/// Random superset of `support` with at most `kappa` elements, strictly
/// larger than `support`.
fn random_superset(support: &SupportSet, kappa: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut off: Vec<usize> = support.complement().indices().to_vec();
    for i in 0..off.len() {
        let j = rng.random_range(i..off.len());
        off.swap(i, j);
    }
    let extra = rng.random_range(1..=(kappa - support.len()).min(off.len()));
    off.truncate(extra);
    off
}

/// Displacement `Δ` with `x̄ + Δ` on the ideal (unrounded) path of the move,
/// or `None` when the draw leaves the domain.
pub(crate) fn candidate_displacement(
    problem: &ProblemSpec,
    xbar: &[f64],
    support: &SupportSet,
    radius: f64,
    kind: MoveKind,
    rng: &mut ChaCha8Rng,
) -> Option<Vec<f64>> {
    let p = xbar.len();
    let theta = problem.theta();
    let new: Vec<usize> = match (kind, problem.h()) {
        (MoveKind::Grow, HKind::SparsityBall { kappa }) => random_superset(support, kappa, rng),
        _ => Vec::new(),
    };
    let signed = matches!(theta, ThetaKind::Zero | ThetaKind::Sphere);
    let mut d = vec![0.0; p];
    for j in support.iter() {
        d[j] = gaussian(rng);
    }
    for &i in &new {
        let v = gaussian(rng);
        d[i] = if signed { v } else { v.abs() };
    }
    let delta = match theta {
        ThetaKind::Sphere | ThetaKind::SphereNonneg => {
            // tangent direction, then the geodesic whose chord has length r
            let c = dot(&d, xbar);
            d.iter_mut().zip(xbar).for_each(|(di, xi)| *di -= c * xi);
            let n = norm(&d);
            if n == 0.0 {
                return None;
            }
            let t = 2.0 * (radius / 2.0).asin();
            let s = (t / 2.0).sin();
            let (sin_t, cos_t_minus_1) = (t.sin(), -2.0 * s * s);
            xbar.iter().zip(&d).map(|(xi, di)| cos_t_minus_1 * xi + sin_t * di / n).collect()
        }
        ThetaKind::Simplex => {
            let mean = support.iter().map(|j| d[j]).sum::<f64>() / support.len() as f64;
            let added: f64 = new.iter().map(|&i| d[i]).sum();
            for j in support.iter() {
                d[j] -= mean + added / support.len() as f64;
            }
            let n = norm(&d);
            if n == 0.0 {
                return None;
            }
            d.iter().map(|v| v * radius / n).collect()
        }
        ThetaKind::Zero | ThetaKind::NonnegOrthant => {
            let n = norm(&d);
            if n == 0.0 {
                return None;
            }
            d.iter().map(|v| v * radius / n).collect::<Vec<f64>>()
        }
    };
    let z: Vec<f64> = xbar.iter().zip(&delta).map(|(a, b)| a + b).collect();
    if theta.needs_positive_support() && z.iter().any(|&v| v < 0.0) {
        if theta != ThetaKind::Simplex {
            return None;
        }
        let z = project_simplex(&z);
        return Some(z.iter().zip(xbar).map(|(a, b)| a - b).collect());
    }
    Some(delta)
}

/// `Θ(x̄ + Δ) − Θ(x̄)` from the displacement, which keeps tiny gaps free of
/// cancellation.
fn gap_from_displacement(problem: &ProblemSpec, xbar: &[f64], delta: &[f64], z: &[f64]) -> f64 {
    let a: &SymMatrix = problem.a();
    let smooth = 2.0 * a.bilinear(delta, xbar) + a.quad_form(delta);
    let nonsmooth = match problem.h() {
        HKind::ZeroNorm { nu } => nu * (zero_norm(z) as f64 - zero_norm(xbar) as f64),
        HKind::SparsityBall { .. } => 0.0,
    };
    smooth + nonsmooth
}

/// Gaps below this are within the rounding of the quadratic form at radius
/// `r` and carry no sign information.
fn gap_noise_floor(a: &SymMatrix, r: f64) -> f64 {
    a.max_abs() * (1e-12 * r * r + 1e-14 * r)
}

/// Evaluates one candidate; `None` unless it lies in the window with
/// `supp(z) ⊇ supp(x̄)`.
pub(crate) fn evaluate_candidate(
    problem: &ProblemSpec,
    xbar: &[f64],
    support: &SupportSet,
    delta: &[f64],
    max_radius: f64,
    eta: f64,
) -> Result<Option<KlSample>> {
    let z: Vec<f64> = xbar.iter().zip(delta).map(|(a, b)| a + b).collect();
    if !problem.in_domain(&z) {
        return Ok(None);
    }
    let zs = SupportSet::of(&z);
    if !support.is_subset_of(&zs) {
        return Ok(None);
    }
    let radius = dist(&z, xbar);
    let gap = gap_from_displacement(problem, xbar, delta, &z);
    if !(gap > gap_noise_floor(problem.a(), radius) && gap < eta)
        || radius > max_radius
        || radius == 0.0
    {
        return Ok(None);
    }
    let d = subdiff_distance(problem, &z)?.distance;
    Ok(Some(KlSample { same_support: zs == *support, point: z, gap, dist: d, radius }))
}

/// Log-spaced radii on `[δ·1e-6, δ]`.
pub fn log_radii(delta: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![delta],
        _ => (0..n)
            .map(|k| delta * INNER_RADIUS.powf(1.0 - k as f64 / (n - 1) as f64))
            .collect(),
    }
}

/// Draws `n` candidates around `x̄` and keeps those in the window. An empty
/// result is returned as such.
pub fn sample_neighborhood(
    problem: &ProblemSpec,
    xbar: &[f64],
    cfg: &SamplingConfig,
) -> Result<Vec<KlSample>> {
    if !(cfg.delta > 0.0 && cfg.eta > 0.0) {
        return Err(Error::arg("δ and η must be positive"));
    }
    require_critical(problem, xbar)?;
    let support = SupportSet::of(xbar);
    let kinds = move_kinds(problem, &support);
    if kinds.is_empty() {
        return Ok(Vec::new());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut out = Vec::new();
    for (k, r) in log_radii(cfg.delta, cfg.n).into_iter().enumerate() {
        let kind = kinds[k % kinds.len()];
        let Some(delta) = candidate_displacement(problem, xbar, &support, r, kind, &mut rng) else {
            continue;
        };
        if let Some(s) = evaluate_candidate(problem, xbar, &support, &delta, cfg.delta, cfg.eta)? {
            out.push(s);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct KlEstimate {
    /// Slope of the lower envelope of `log dist` against `log gap`.
    pub exponent_fit: f64,
    /// `min dist / √gap`.
    pub constant_hat: f64,
    pub n_samples: usize,
    pub delta: f64,
    pub eta: f64,
}

/// `min dist/√gap` over `(gap, dist)` pairs.
pub fn constant_hat(pairs: &[(f64, f64)]) -> f64 {
    pairs.iter().map(|(g, d)| d / g.sqrt()).fold(f64::INFINITY, f64::min)
}

/// Lower-envelope exponent fit over `(gap, dist)` pairs: gaps are binned into
/// [`FIT_BINS`] equal bins in `log gap`, the sample of smallest `dist` in each
/// bin is kept, and a line is fitted through those.
pub fn envelope_exponent(pairs: &[(f64, f64)]) -> Result<f64> {
    let partial = Some(constant_hat(pairs));
    if pairs.len() < MIN_FIT_SAMPLES {
        return Err(Error::Estimation {
            reason: format!("{} samples, need {MIN_FIT_SAMPLES}", pairs.len()),
            partial,
        });
    }
    let logs: Vec<(f64, f64)> =
        pairs.iter().filter(|(_, d)| *d > 0.0).map(|(g, d)| (g.ln(), d.ln())).collect();
    let lo = logs.iter().map(|v| v.0).fold(f64::INFINITY, f64::min);
    let hi = logs.iter().map(|v| v.0).fold(f64::NEG_INFINITY, f64::max);
    if !(hi > lo) {
        return Err(Error::Estimation { reason: "gaps span no range".into(), partial });
    }
    let width = (hi - lo) / FIT_BINS as f64;
    let mut bins: Vec<Option<(f64, f64)>> = vec![None; FIT_BINS];
    for &(lg, ld) in &logs {
        let b = (((lg - lo) / width) as usize).min(FIT_BINS - 1);
        if bins[b].is_none_or(|(_, best)| ld < best) {
            bins[b] = Some((lg, ld));
        }
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = bins.into_iter().flatten().unzip();
    if xs.len() < 2 {
        return Err(Error::Estimation { reason: "fewer than two occupied bins".into(), partial });
    }
    Ok(linear_fit(&xs, &ys).0)
}

pub fn estimate_kl_exponent(samples: &[KlSample], cfg: &SamplingConfig) -> Result<KlEstimate> {
    let pairs: Vec<(f64, f64)> = samples.iter().map(|s| (s.gap, s.dist)).collect();
    let exponent_fit = envelope_exponent(&pairs)?;
    Ok(KlEstimate {
        exponent_fit,
        constant_hat: constant_hat(&pairs),
        n_samples: samples.len(),
        delta: cfg.delta,
        eta: cfg.eta,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KlVerdict {
    /// `ĉ ≥ 1e-6` and `α̂ ≤ 0.6`. Empirical evidence only.
    Holds,
    Fails,
    /// No sample in the window; the inequality is not exercised.
    Vacuous,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KlReport {
    pub verdict: KlVerdict,
    pub estimate: Option<KlEstimate>,
    pub samples: Vec<KlSample>,
}

pub fn verify_kl_half(problem: &ProblemSpec, xbar: &[f64], cfg: &SamplingConfig) -> Result<KlReport> {
    let samples = sample_neighborhood(problem, xbar, cfg)?;
    if samples.is_empty() {
        return Ok(KlReport { verdict: KlVerdict::Vacuous, estimate: None, samples });
    }
    let est = estimate_kl_exponent(&samples, cfg)?;
    for s in &samples {
        assert!(est.constant_hat * s.gap.sqrt() <= s.dist * (1.0 + 1e-12));
    }
    let verdict = if est.constant_hat >= MIN_CONSTANT && est.exponent_fit <= MAX_EXPONENT {
        KlVerdict::Holds
    } else {
        KlVerdict::Fails
    };
    Ok(KlReport { verdict, estimate: Some(est), samples })
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConstantComparison {
    /// All diagonal entries are equal.
    Skipped,
    /// No sample passed the neighborhood check.
    Vacuous { c_theory: f64 },
    Compared { c_theory: f64, c_hat: f64, n_used: usize, passed: bool },
}

/// Compares `ĉ` with the closed-form constant for `θ = Sphere` and diagonal
/// `A`, over the samples inside the neighborhood where that constant applies.
pub fn compare_constant(
    problem: &ProblemSpec,
    xbar: &[f64],
    cfg: &SamplingConfig,
) -> Result<ConstantComparison> {
    if problem.theta() != ThetaKind::Sphere || !problem.a().is_diagonal() {
        return Err(Error::arg("constant comparison needs θ = sphere and a diagonal A"));
    }
    let d = problem.a().diagonal();
    let report = kl_constant_theoretical(&d, xbar)?;
    let KlConstant::Value(c_theory) = report.c_theory else {
        return Ok(ConstantComparison::Skipped);
    };
    let samples = sample_neighborhood(problem, xbar, cfg)?;
    let used: Vec<&KlSample> =
        samples.iter().filter(|s| same_order_holds(&d, &report, &s.point)).collect();
    if used.is_empty() {
        return Ok(ConstantComparison::Vacuous { c_theory });
    }
    let c_hat = used.iter().map(|s| s.ratio()).fold(f64::INFINITY, f64::min);
    Ok(ConstantComparison::Compared {
        c_theory,
        c_hat,
        n_used: used.len(),
        passed: c_hat >= c_theory * (1.0 - 1e-6),
    })
}
