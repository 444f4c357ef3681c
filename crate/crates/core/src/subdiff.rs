//! The composite objective `Θ(x) = xᵀAx + θ(x) + h(x)` and exact distances
//! from the origin to its generalized subdifferential.
//!
//! Writing `g = 2Ax` and `J = supp(x)`, every supported pairing reduces to
//!
//! ```text
//! dist²(0, ∂Θ(x)) = min over θ-multipliers of ‖(g + ζ)_J‖² + Σ_{i∈Ĵ} ρ_i²
//! ```
//!
//! where the `h`-part makes every coordinate off the support free, except for
//! the `κ − |J|` coordinates `Ĵ` of a limiting-cone branch when `h = δ_Ω` and
//! `‖x‖₀ < κ`. On those, `ρ_i` is the smallest residual the θ-multiplier
//! alone can reach.

use crate::error::{Error, Result};
use crate::linalg::{dot, norm, ranked_by, SymMatrix};
use crate::sets::{
    in_nonneg, in_simplex, in_sphere, minimize_eq_plus_lower, zero_norm, SupportSet,
};

/// The convex part `θ` of the objective, always an indicator function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ThetaKind {
    /// `θ ≡ 0`.
    Zero,
    /// Indicator of the unit sphere.
    Sphere,
    /// Indicator of the probability simplex.
    Simplex,
    /// Indicator of the nonnegative orthant.
    NonnegOrthant,
    /// Indicator of the nonnegative part of the unit sphere.
    SphereNonneg,
}

impl ThetaKind {
    pub const ALL: [ThetaKind; 5] = [
        ThetaKind::Zero,
        ThetaKind::Sphere,
        ThetaKind::Simplex,
        ThetaKind::NonnegOrthant,
        ThetaKind::SphereNonneg,
    ];

    /// Membership of `x` in the set `θ` indicates (tolerance `1e-10`).
    pub fn contains(self, x: &[f64]) -> bool {
        match self {
            ThetaKind::Zero => true,
            ThetaKind::Sphere => in_sphere(x),
            ThetaKind::Simplex => in_simplex(x),
            ThetaKind::NonnegOrthant => in_nonneg(x),
            ThetaKind::SphereNonneg => in_sphere(x) && in_nonneg(x),
        }
    }

    /// Whether the set carries a sign constraint, so support entries must be
    /// strictly positive for the multiplier structure used here.
    pub fn needs_positive_support(self) -> bool {
        matches!(self, ThetaKind::Simplex | ThetaKind::NonnegOrthant | ThetaKind::SphereNonneg)
    }

    /// Whether the normal cone carries a scalar multiplier `ω`.
    pub fn has_omega(self) -> bool {
        matches!(self, ThetaKind::Sphere | ThetaKind::Simplex | ThetaKind::SphereNonneg)
    }

    pub fn name(self) -> &'static str {
        match self {
            ThetaKind::Zero => "zero",
            ThetaKind::Sphere => "sphere",
            ThetaKind::Simplex => "simplex",
            ThetaKind::NonnegOrthant => "nonneg",
            ThetaKind::SphereNonneg => "sphere_nonneg",
        }
    }
}

impl std::str::FromStr for ThetaKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ThetaKind::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::arg(format!("unknown theta kind {s:?}")))
    }
}

/// The sparsity-inducing part `h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HKind {
    /// `h(x) = ν‖x‖₀`.
    ZeroNorm { nu: f64 },
    /// `h = δ_Ω` with `Ω = {‖x‖₀ ≤ κ}`.
    SparsityBall { kappa: usize },
}

/// The triple `(A, θ, h)` defining `Θ`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    a: SymMatrix,
    theta: ThetaKind,
    h: HKind,
}

impl ProblemSpec {
    pub fn new(a: SymMatrix, theta: ThetaKind, h: HKind) -> Result<Self> {
        match h {
            HKind::ZeroNorm { nu } if !(nu > 0.0 && nu.is_finite()) => {
                return Err(Error::arg(format!("ν = {nu} must be positive and finite")));
            }
            HKind::SparsityBall { kappa } if kappa == 0 || kappa > a.dim() => {
                return Err(Error::arg(format!("κ = {kappa} must lie in 1..={}", a.dim())));
            }
            _ => {}
        }
        Ok(Self { a, theta, h })
    }

    pub fn a(&self) -> &SymMatrix {
        &self.a
    }

    pub fn theta(&self) -> ThetaKind {
        self.theta
    }

    pub fn h(&self) -> HKind {
        self.h
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    /// `x ∈ dom θ`.
    pub fn in_theta_domain(&self, x: &[f64]) -> bool {
        x.len() == self.dim() && self.theta.contains(x)
    }

    /// `x ∈ dom Θ`.
    pub fn in_domain(&self, x: &[f64]) -> bool {
        self.in_theta_domain(x)
            && match self.h {
                HKind::ZeroNorm { .. } => true,
                HKind::SparsityBall { kappa } => zero_norm(x) <= kappa,
            }
    }

    /// The same problem with coordinates relabelled: `A ← PAPᵀ` where
    /// `(Px)_i = x_{perm[i]}`.
    pub fn permuted(&self, perm: &[usize]) -> ProblemSpec {
        Self { a: self.a.permuted(perm), theta: self.theta, h: self.h }
    }

    /// `h(x)` for `x ∈ Ω` (or any `x` under the zero-norm penalty).
    pub(crate) fn h_value(&self, x: &[f64]) -> f64 {
        match self.h {
            HKind::ZeroNorm { nu } => nu * zero_norm(x) as f64,
            HKind::SparsityBall { kappa } => {
                if zero_norm(x) <= kappa {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
        }
    }
}

/// `Θ(x)`, with `+∞` outside the domain. The zero-norm counts entries with
/// `x_i ≠ 0` exactly.
pub fn objective(problem: &ProblemSpec, x: &[f64]) -> f64 {
    assert_eq!(x.len(), problem.dim(), "dimension mismatch");
    if !problem.in_domain(x) {
        return f64::INFINITY;
    }
    problem.a.quad_form(x) + problem.h_value(x)
}

/// Whether the reported distance is the exact distance to `∂Θ(x)` or the
/// distance to a superset of it (hence a lower bound).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exactness {
    Exact,
    /// `h = δ_Ω` with `‖x‖₀ < κ`: only `∂Θ(x) ⊆ 2Ax + ∂θ(x) + N_Ω(x)` is
    /// available, so the value is `dist(0, superset) ≤ dist(0, ∂Θ(x))`.
    SupersetLowerBound,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubdiffResult {
    pub distance: f64,
    /// Multiplier of the sphere/simplex normal cone at the optimum.
    pub omega: Option<f64>,
    /// Completion `Ĵ` of the limiting-cone branch that was used.
    pub branch: Option<SupportSet>,
    /// `min_ζ ‖(2Ax + ζ)_J‖`: the support-block value that bounds the
    /// restricted problem's subdifferential distance.
    pub reduced_distance: f64,
    pub exactness: Exactness,
}

struct BlockFit {
    value: f64,
    omega: Option<f64>,
}

/// `min_ζ ‖(g + ζ)_J‖` over the θ-multiplier restricted to the support.
fn block_fit(theta: ThetaKind, g: &[f64], x: &[f64], support: &SupportSet) -> BlockFit {
    let gj = support.gather(g);
    if gj.is_empty() {
        return BlockFit { value: 0.0, omega: theta.has_omega().then_some(0.0) };
    }
    match theta {
        ThetaKind::Zero | ThetaKind::NonnegOrthant => BlockFit { value: norm(&gj), omega: None },
        ThetaKind::Sphere | ThetaKind::SphereNonneg => {
            let xj = support.gather(x);
            let omega = -dot(&gj, &xj) / dot(&xj, &xj);
            let r: Vec<f64> = gj.iter().zip(&xj).map(|(gi, xi)| gi + omega * xi).collect();
            BlockFit { value: norm(&r), omega: Some(omega) }
        }
        ThetaKind::Simplex => {
            let omega = -gj.iter().sum::<f64>() / gj.len() as f64;
            let r: Vec<f64> = gj.iter().map(|gi| gi + omega).collect();
            BlockFit { value: norm(&r), omega: Some(omega) }
        }
    }
}

fn validate_point(problem: &ProblemSpec, x: &[f64], need_h: bool) -> Result<()> {
    if x.len() != problem.dim() {
        return Err(Error::arg(format!(
            "x has length {}, problem dimension is {}",
            x.len(),
            problem.dim()
        )));
    }
    let ok = if need_h { problem.in_domain(x) } else { problem.in_theta_domain(x) };
    if !ok {
        return Err(Error::NotInDomain(format!(
            "x violates θ = {} or h = {:?}",
            problem.theta.name(),
            problem.h
        )));
    }
    if problem.theta.needs_positive_support() && x.iter().any(|&v| v < 0.0) {
        return Err(Error::NotInDomain(format!(
            "θ = {} needs x_J > 0 on the support",
            problem.theta.name()
        )));
    }
    Ok(())
}

/// Exact `dist(0, 2Ax + ∂θ(x) + ∂h(x))`.
///
/// Off-support coordinates are free under `h = ν‖·‖₀` or when `‖x‖₀ = κ`,
/// leaving only the support block. Below the sparsity level the limiting
/// cone forces `κ − |J|` extra coordinates; for a fixed multiplier the best
/// completion takes those with the smallest attainable residual, and for the
/// simplex (where that residual depends on `ω`) the ordering is still
/// `ω`-independent, so `ω` is found by exact breakpoint enumeration.
pub fn subdiff_distance(problem: &ProblemSpec, x: &[f64]) -> Result<SubdiffResult> {
    validate_point(problem, x, true)?;
    let p = problem.dim();
    let theta = problem.theta;
    let g: Vec<f64> = problem.a.mul_vec(x).into_iter().map(|v| 2.0 * v).collect();
    let support = SupportSet::of(x);
    let block = block_fit(theta, &g, x, &support);

    let forced = match problem.h {
        HKind::ZeroNorm { .. } => 0,
        HKind::SparsityBall { kappa } => kappa - support.len(),
    };
    if forced == 0 {
        return Ok(SubdiffResult {
            distance: block.value,
            omega: block.omega,
            branch: None,
            reduced_distance: block.value,
            exactness: Exactness::Exact,
        });
    }

    let off = support.complement();
    let (distance, omega, branch) = match theta {
        ThetaKind::Simplex => {
            // ρ_i(ω) = max(0, −g_i − ω): smaller −g_i is better for every ω
            let c: Vec<f64> = off.iter().map(|i| -g[i]).collect();
            let order = ranked_by(&c, |v| -v);
            let chosen: Vec<usize> = order[..forced].iter().map(|&k| off.indices()[k]).collect();
            let eq: Vec<f64> = support.iter().map(|j| -g[j]).collect();
            let lower: Vec<f64> = chosen.iter().map(|&i| -g[i]).collect();
            let (value_sq, omega) = minimize_eq_plus_lower(&eq, &lower);
            (value_sq.sqrt(), Some(omega), chosen)
        }
        _ => {
            let rho: Vec<f64> = off
                .iter()
                .map(|i| match theta {
                    ThetaKind::NonnegOrthant | ThetaKind::SphereNonneg => (-g[i]).max(0.0),
                    _ => g[i].abs(),
                })
                .collect();
            let order = ranked_by(&rho, |v| -v);
            let chosen: Vec<usize> = order[..forced].iter().map(|&k| off.indices()[k]).collect();
            let extra: f64 = order[..forced].iter().map(|&k| rho[k] * rho[k]).sum();
            ((block.value * block.value + extra).sqrt(), block.omega, chosen)
        }
    };
    Ok(SubdiffResult {
        distance,
        omega,
        branch: Some(SupportSet::new(branch, p)?),
        reduced_distance: block.value,
        exactness: Exactness::SupersetLowerBound,
    })
}

/// Recomputes the residual norm produced by a reported witness `(ω, Ĵ)`:
/// support coordinates use `ω`, branch coordinates their best residual given
/// `ω`, all other coordinates are free.
pub fn witness_distance(
    problem: &ProblemSpec,
    x: &[f64],
    omega: Option<f64>,
    branch: Option<&SupportSet>,
) -> Result<f64> {
    validate_point(problem, x, true)?;
    let g: Vec<f64> = problem.a.mul_vec(x).into_iter().map(|v| 2.0 * v).collect();
    let w = omega.unwrap_or(0.0);
    let mut total = 0.0;
    for i in 0..problem.dim() {
        let r = if x[i] != 0.0 {
            match problem.theta {
                ThetaKind::Zero | ThetaKind::NonnegOrthant => g[i],
                ThetaKind::Sphere | ThetaKind::SphereNonneg => g[i] + w * x[i],
                ThetaKind::Simplex => g[i] + w,
            }
        } else if branch.is_some_and(|b| b.contains(i)) {
            match problem.theta {
                ThetaKind::Zero | ThetaKind::Sphere => g[i],
                ThetaKind::NonnegOrthant | ThetaKind::SphereNonneg => (-g[i]).max(0.0),
                ThetaKind::Simplex => (-g[i] - w).max(0.0),
            }
        } else {
            0.0
        };
        total += r * r;
    }
    Ok(total.sqrt())
}

/// `0 ∈ ∂Θ(x)` up to `tol`.
pub fn check_critical(problem: &ProblemSpec, x: &[f64], tol: f64) -> Result<bool> {
    Ok(subdiff_distance(problem, x)?.distance <= tol)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssumptionVReport {
    /// `min_{ξ ∈ ∂θ(x)} ‖2A_JJ x_J + ξ_J‖`.
    pub lhs: f64,
    /// `dist(0, ∂g_{|J|}(x_J))` for `g_{|J|}(z) = zᵀA_JJ z + θ_{|J|}(z)`.
    pub rhs: f64,
    pub holds: bool,
    /// `|lhs − rhs| ≤ 1e-10`.
    pub equality: bool,
}

/// Compares the support-block multiplier minimization with the
/// subdifferential distance of the compressed problem on `J = supp(x)`.
pub fn assumption_v_check(problem: &ProblemSpec, x: &[f64]) -> Result<AssumptionVReport> {
    validate_point(problem, x, false)?;
    let support = SupportSet::of(x);
    let g: Vec<f64> = problem.a.mul_vec(x).into_iter().map(|v| 2.0 * v).collect();
    let lhs = block_fit(problem.theta, &g, x, &support).value;
    let rhs = if support.is_empty() {
        0.0
    } else {
        let restricted = ProblemSpec::new(
            problem.a.submatrix(support.indices()),
            problem.theta,
            HKind::ZeroNorm { nu: 1.0 },
        )?;
        subdiff_distance(&restricted, &support.gather(x))?.distance
    };
    Ok(AssumptionVReport {
        lhs,
        rhs,
        holds: lhs >= rhs - 1e-10,
        equality: (lhs - rhs).abs() <= 1e-10,
    })
}
