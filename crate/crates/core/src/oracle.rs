//! Brute-force ground truth for small instances.
//!
//! Everything here enumerates supports or scans multipliers on a grid and is
//! written without reusing the closed forms it checks. Each routine refuses
//! instances above its size guard.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::certify::{candidate_displacement, evaluate_candidate, move_kinds, require_critical};
use crate::error::{Error, Result};
use crate::linalg::{dist, norm, solve_spd, spectral_norm, sym_eig, SymMatrix};
use crate::sets::{project_simplex, SupportSet};
use crate::solver::linear_fit;
use crate::subdiff::{objective, HKind, ProblemSpec, ThetaKind};

pub const GLOBAL_MIN_LIMIT: usize = 12;
pub const SUBDIFF_LIMIT: usize = 10;
pub const PROX_LIMIT: usize = 8;
/// Number of `ω` grid points.
pub const OMEGA_GRID: usize = 100_000;
/// Log-log slope of min-ratio against radius above which the scan reports
/// decay toward zero.
pub const DECAY_SLOPE: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleMethod {
    SupportEnum,
    Grid,
    Breakpoint,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub value: f64,
    pub argmin: Vec<f64>,
    pub supports_examined: usize,
    pub method: OracleMethod,
}

/// `|a − b| ≤ rel·max(1, |a|, |b|)`.
pub fn agrees(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * 1f64.max(a.abs()).max(b.abs())
}

fn guard(operation: &'static str, size: usize, limit: usize) -> Result<()> {
    if size > limit {
        return Err(Error::Size { operation, size, limit });
    }
    Ok(())
}

fn mask_indices(mask: u64, p: usize) -> Vec<usize> {
    (0..p).filter(|i| mask >> i & 1 == 1).collect()
}

fn subsets_of_size(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let n = items.len();
    for mask in 0u64..(1 << n) {
        if mask.count_ones() as usize == k {
            out.push(mask_indices(mask, n).into_iter().map(|i| items[i]).collect());
        }
    }
    out
}

/// Golden-section minimization of a unimodal `f` on `[lo, hi]`.
pub(crate) fn golden_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - r * (hi - lo);
    let mut b = lo + r * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    for _ in 0..200 {
        if hi - lo <= 1e-15 * (1.0 + lo.abs().max(hi.abs())) {
            break;
        }
        if fa <= fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - r * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + r * (hi - lo);
            fb = f(b);
        }
    }
    let w = 0.5 * (lo + hi);
    (w, f(w))
}

/// Minimizes `f` over `[-bound, bound]` on [`OMEGA_GRID`] points, then polishes
/// around the best grid point.
fn grid_then_polish(f: &dyn Fn(f64) -> f64, bound: f64) -> (f64, f64) {
    let h = 2.0 * bound / (OMEGA_GRID - 1) as f64;
    let mut best = (f64::INFINITY, 0.0);
    for k in 0..OMEGA_GRID {
        let w = -bound + k as f64 * h;
        let v = f(w);
        if v < best.0 {
            best = (v, w);
        }
    }
    let (w, v) = golden_min(f, best.1 - h, best.1 + h);
    if v <= best.0 { (w, v) } else { (best.1, best.0) }
}

/// Smallest residual `min |g + ζ|` on one coordinate over the multipliers
/// `θ` and `h` allow there.
fn coordinate_residual(theta: ThetaKind, g: f64, x: f64, on_support: bool, forced: bool, w: f64) -> f64 {
    if on_support {
        return match theta {
            ThetaKind::Zero | ThetaKind::NonnegOrthant => g.abs(),
            ThetaKind::Sphere | ThetaKind::SphereNonneg => (g + w * x).abs(),
            ThetaKind::Simplex => (g + w).abs(),
        };
    }
    if !forced {
        return 0.0;
    }
    // ζ ranges over {0} or a half-line (−∞, c]; the best choice is −g when
    // admissible, else the endpoint
    let upper = match theta {
        ThetaKind::Zero | ThetaKind::Sphere => return g.abs(),
        ThetaKind::NonnegOrthant | ThetaKind::SphereNonneg => 0.0,
        ThetaKind::Simplex => w,
    };
    if -g <= upper { 0.0 } else { (g + upper).abs() }
}

/// `dist(0, ∂Θ(x))` by explicit enumeration of limiting-cone branches and an
/// `ω` grid with golden-section polish.
pub fn subdiff_distance_bruteforce(problem: &ProblemSpec, x: &[f64]) -> Result<OracleReport> {
    let p = problem.dim();
    guard("subdiff_distance_bruteforce", p, SUBDIFF_LIMIT)?;
    if x.len() != p || !problem.in_domain(x) {
        return Err(Error::NotInDomain("x is not in dom Θ".into()));
    }
    let theta = problem.theta();
    if matches!(theta, ThetaKind::Simplex | ThetaKind::NonnegOrthant | ThetaKind::SphereNonneg)
        && x.iter().any(|&v| v < 0.0)
    {
        return Err(Error::NotInDomain("negative entry".into()));
    }
    let g: Vec<f64> = (0..p).map(|i| 2.0 * (0..p).map(|j| problem.a().get(i, j) * x[j]).sum::<f64>()).collect();
    let on: Vec<bool> = x.iter().map(|&v| v != 0.0).collect();
    let off: Vec<usize> = (0..p).filter(|&i| !on[i]).collect();
    let nnz = p - off.len();
    let branches = match problem.h() {
        HKind::SparsityBall { kappa } if nnz < kappa => subsets_of_size(&off, kappa - nnz),
        _ => vec![Vec::new()],
    };
    let has_omega = matches!(theta, ThetaKind::Sphere | ThetaKind::SphereNonneg | ThetaKind::Simplex);
    let bound = 2.0 * spectral_norm(problem.a()) * norm(x) + 1.0;

    let mut best = (f64::INFINITY, Vec::new());
    for branch in &branches {
        let forced = |i: usize| branch.contains(&i);
        let residuals = |w: f64| -> Vec<f64> {
            (0..p).map(|i| coordinate_residual(theta, g[i], x[i], on[i], forced(i), w)).collect()
        };
        let f = |w: f64| residuals(w).iter().map(|r| r * r).sum::<f64>();
        let w = if has_omega { grid_then_polish(&f, bound).0 } else { 0.0 };
        let r = residuals(w);
        let v = norm(&r);
        if v < best.0 {
            best = (v, r);
        }
    }
    Ok(OracleReport {
        value: best.0,
        argmin: best.1,
        supports_examined: branches.len(),
        method: if has_omega { OracleMethod::Grid } else { OracleMethod::SupportEnum },
    })
}

/// Minimizes `zᵀBz` over the relative interior of the simplex: the unique
/// stationary point on the affine hull when the tangent Hessian is positive
/// definite and the point is strictly positive.
fn simplex_face_min(b: &SymMatrix) -> Option<Vec<f64>> {
    let m = b.dim();
    if m == 1 {
        return Some(vec![1.0]);
    }
    // z = c + N w with c = 1/m and N = [e_k − e_last]
    let c = vec![1.0 / m as f64; m];
    let bc = b.mul_vec(&c);
    let last = m - 1;
    let n = m - 1;
    let reduced = SymMatrix::from_fn(n, |k, l| b.get(k, l) - b.get(k, last) - b.get(last, l) + b.get(last, last));
    let rhs: Vec<f64> = (0..n).map(|k| -(bc[k] - bc[last])).collect();
    let tol = 1e-12 * 1f64.max(b.max_abs());
    let w = solve_spd(&reduced, &rhs, tol)?;
    let mut z = c;
    for k in 0..n {
        z[k] += w[k];
        z[last] -= w[k];
    }
    z.iter().all(|&v| v > 0.0).then_some(z)
}

/// Candidate minimizers of `zᵀA_JJ z` over `θ` restricted to support `J`
/// (strictly inside the face where that matters).
fn restricted_candidates(theta: ThetaKind, a_jj: &SymMatrix) -> Vec<Vec<f64>> {
    match theta {
        ThetaKind::Sphere => {
            let eig = sym_eig(a_jj);
            vec![eig.eigenvector(a_jj.dim() - 1)]
        }
        ThetaKind::SphereNonneg => {
            let eig = sym_eig(a_jj);
            (0..a_jj.dim())
                .filter_map(|k| {
                    let v = eig.eigenvector(k);
                    if v.iter().all(|&t| t > 0.0) {
                        Some(v)
                    } else if v.iter().all(|&t| t < 0.0) {
                        Some(v.iter().map(|t| -t).collect())
                    } else {
                        None
                    }
                })
                .collect()
        }
        ThetaKind::Simplex => simplex_face_min(a_jj).into_iter().collect(),
        ThetaKind::Zero | ThetaKind::NonnegOrthant => Vec::new(),
    }
}

/// Global minimum of `Θ` by enumerating every admissible support.
///
/// For `θ = Zero` and `θ = NonnegOrthant` the minimum is `0` at `x = 0`
/// unless some admissible support carries a descent direction, in which case
/// `Θ` is unbounded below.
pub fn global_min_enum(problem: &ProblemSpec) -> Result<OracleReport> {
    let p = problem.dim();
    guard("global_min_enum", p, GLOBAL_MIN_LIMIT)?;
    let max_size = match problem.h() {
        HKind::ZeroNorm { .. } => p,
        HKind::SparsityBall { kappa } => kappa,
    };
    let a = problem.a();
    let neg_tol = -1e-12 * 1f64.max(a.max_abs());
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut examined = 0;
    for mask in 1u64..(1 << p) {
        let idx = mask_indices(mask, p);
        if idx.len() > max_size {
            continue;
        }
        examined += 1;
        let a_jj = a.submatrix(&idx);
        match problem.theta() {
            ThetaKind::Zero => {
                if sym_eig(&a_jj).eigenvalues[idx.len() - 1] < neg_tol {
                    return Err(Error::Unbounded(format!("A is indefinite on support {idx:?}")));
                }
                continue;
            }
            ThetaKind::NonnegOrthant => {
                if simplex_face_min(&a_jj).is_some_and(|z| a_jj.quad_form(&z) < neg_tol)
                    || idx.iter().any(|&i| a.get(i, i) < neg_tol)
                {
                    return Err(Error::Unbounded(format!("A is not copositive on support {idx:?}")));
                }
                continue;
            }
            _ => {}
        }
        let support = SupportSet::new(idx, p)?;
        for z in restricted_candidates(problem.theta(), &a_jj) {
            let x = support.scatter(&z);
            let v = objective(problem, &x);
            let better = match &best {
                None => v.is_finite(),
                Some((b, _)) => v < b - 1e-12 * 1f64.max(b.abs()),
            };
            if better {
                best = Some((v, x));
            }
        }
    }
    let (value, argmin) = match problem.theta() {
        ThetaKind::Zero | ThetaKind::NonnegOrthant => {
            let x = vec![0.0; p];
            (objective(problem, &x), x)
        }
        _ => best.ok_or_else(|| Error::arg("no feasible support"))?,
    };
    Ok(OracleReport { value, argmin, supports_examined: examined, method: OracleMethod::SupportEnum })
}

/// Minimizer of `½‖x − u‖²` over `θ` with support inside `J`.
fn restricted_projection(theta: ThetaKind, u_j: &[f64]) -> Vec<f64> {
    match theta {
        ThetaKind::Zero => u_j.to_vec(),
        ThetaKind::NonnegOrthant => u_j.iter().map(|v| v.max(0.0)).collect(),
        ThetaKind::Simplex => project_simplex(u_j),
        ThetaKind::Sphere => {
            let n = norm(u_j);
            if n > 0.0 {
                u_j.iter().map(|v| v / n).collect()
            } else {
                let mut e = vec![0.0; u_j.len()];
                e[0] = 1.0;
                e
            }
        }
        ThetaKind::SphereNonneg => {
            let plus: Vec<f64> = u_j.iter().map(|v| v.max(0.0)).collect();
            let n = norm(&plus);
            if n > 0.0 {
                plus.iter().map(|v| v / n).collect()
            } else {
                let mut k = 0;
                for i in 1..u_j.len() {
                    if u_j[i] > u_j[k] {
                        k = i;
                    }
                }
                let mut e = vec![0.0; u_j.len()];
                e[k] = 1.0;
                e
            }
        }
    }
}

/// `½‖x − u‖² + t·(θ + h)(x)` for `x ∈ dom θ`.
pub fn prox_objective(h: HKind, u: &[f64], t: f64, x: &[f64]) -> f64 {
    let nnz = x.iter().filter(|&&v| v != 0.0).count();
    let hv = match h {
        HKind::ZeroNorm { nu } => nu * nnz as f64,
        HKind::SparsityBall { kappa } => {
            if nnz <= kappa {
                0.0
            } else {
                f64::INFINITY
            }
        }
    };
    0.5 * dist(x, u).powi(2) + t * hv
}

/// Prox by enumerating all supports and projecting onto each restricted set.
pub fn prox_bruteforce(theta: ThetaKind, h: HKind, u: &[f64], t: f64) -> Result<OracleReport> {
    let p = u.len();
    guard("prox_bruteforce", p, PROX_LIMIT)?;
    if p == 0 {
        return Err(Error::arg("empty input"));
    }
    let allow_empty = matches!(theta, ThetaKind::Zero | ThetaKind::NonnegOrthant);
    let mut best = (f64::INFINITY, Vec::new());
    let mut examined = 0;
    for mask in 0u64..(1 << p) {
        let idx = mask_indices(mask, p);
        if idx.is_empty() && !allow_empty {
            continue;
        }
        if let HKind::SparsityBall { kappa } = h {
            if idx.len() > kappa {
                continue;
            }
        }
        examined += 1;
        let u_j: Vec<f64> = idx.iter().map(|&i| u[i]).collect();
        let z = if idx.is_empty() { Vec::new() } else { restricted_projection(theta, &u_j) };
        let mut x = vec![0.0; p];
        for (k, &i) in idx.iter().enumerate() {
            x[i] = z[k];
        }
        let v = prox_objective(h, u, t, &x);
        if v < best.0 {
            best = (v, x);
        }
    }
    Ok(OracleReport { value: best.0, argmin: best.1, supports_examined: examined, method: OracleMethod::SupportEnum })
}

/// `v ∈ N_Ω(x̄)` by listing every completion `Ĵ` explicitly.
pub fn sparsity_cone_contains_enum(xbar: &[f64], kappa: usize, v: &[f64]) -> bool {
    let p = xbar.len();
    let on: Vec<usize> = (0..p).filter(|&i| xbar[i] != 0.0).collect();
    let off: Vec<usize> = (0..p).filter(|&i| xbar[i] == 0.0).collect();
    let zero = |i: &usize| v[*i].abs() <= 1e-10;
    if !on.iter().all(zero) {
        return false;
    }
    subsets_of_size(&off, kappa - on.len()).iter().any(|b| b.iter().all(zero))
}

/// `dist(v, N_Δ(x̄))` by an `ω` grid over `[−B, B]`, `B = 2‖v‖∞ + 1`.
pub fn simplex_cone_residual_grid(xbar: &[f64], v: &[f64]) -> f64 {
    let f = |w: f64| -> f64 {
        xbar.iter()
            .zip(v)
            .map(|(&x, &vi)| if x != 0.0 { (vi - w).powi(2) } else { (vi - vi.min(w)).powi(2) })
            .sum()
    };
    let bound = 2.0 * v.iter().fold(0.0f64, |m, t| m.max(t.abs())) + 1.0;
    grid_then_polish(&f, bound).1.sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatioRow {
    pub radius: f64,
    pub accepted: usize,
    /// Smallest `dist/√gap` among accepted samples.
    pub min_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatioScan {
    pub rows: Vec<RatioRow>,
    /// No radius produced a sample with positive gap.
    pub vacuous: bool,
    /// The per-radius minimum shrinks with the radius.
    pub decay: bool,
    /// Log-log slope of the minimum ratio against the radius.
    pub slope: Option<f64>,
}

/// Flags a scan from its rows.
pub fn summarize_ratio_rows(rows: Vec<RatioRow>) -> RatioScan {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|r| r.min_ratio.map(|m| (r.radius, m)))
        .collect();
    let vacuous = pts.is_empty();
    let hits_zero = pts.iter().any(|&(_, m)| m <= 0.0);
    let slope = if pts.len() >= 2 && !hits_zero {
        let (xs, ys): (Vec<f64>, Vec<f64>) = pts.iter().map(|(r, m)| (r.ln(), m.ln())).unzip();
        Some(linear_fit(&xs, &ys).0)
    } else {
        None
    };
    let decay = hits_zero || slope.is_some_and(|s| s > DECAY_SLOPE);
    RatioScan { rows, vacuous, decay, slope }
}

/// Per-radius minimum of `dist/√gap` over `per_radius` draws at distance
/// `r` from `x̄`.
pub fn kl_ratio_scan(
    problem: &ProblemSpec,
    xbar: &[f64],
    radii: &[f64],
    per_radius: usize,
    seed: u64,
) -> Result<RatioScan> {
    require_critical(problem, xbar)?;
    let support = SupportSet::of(xbar);
    let kinds = move_kinds(problem, &support);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(radii.len());
    for &r in radii {
        let mut accepted = 0;
        let mut min_ratio: Option<f64> = None;
        for j in 0..per_radius {
            if kinds.is_empty() {
                break;
            }
            let Some(delta) = candidate_displacement(problem, xbar, &support, r, kinds[j % kinds.len()], &mut rng)
            else {
                continue;
            };
            if let Some(s) = evaluate_candidate(problem, xbar, &support, &delta, r * (1.0 + 1e-6), f64::INFINITY)? {
                accepted += 1;
                let q = s.ratio();
                min_ratio = Some(min_ratio.map_or(q, |m| m.min(q)));
            }
        }
        rows.push(RatioRow { radius: r, accepted, min_ratio });
    }
    Ok(summarize_ratio_rows(rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere_quadratic::dist_subdiff_sphere_quad;
    use crate::subdiff::subdiff_distance;
    use rand::Rng;

    #[test]
    fn global_min_examples() {
        let pr = ProblemSpec::new(SymMatrix::diag(&[-3.0, -1.0]), ThetaKind::Sphere, HKind::SparsityBall { kappa: 1 })
            .unwrap();
        let r = global_min_enum(&pr).unwrap();
        assert_eq!(r.value, -3.0);
        assert_eq!(r.argmin, vec![1.0, 0.0]);

        let pr = ProblemSpec::new(SymMatrix::scaled_identity(3, 1.0), ThetaKind::Sphere, HKind::ZeroNorm { nu: 0.1 })
            .unwrap();
        let r = global_min_enum(&pr).unwrap();
        assert!((r.value - 1.1).abs() < 1e-15);
        assert_eq!(r.argmin, vec![1.0, 0.0, 0.0]);

        let pr = ProblemSpec::new(SymMatrix::zeros(3), ThetaKind::Zero, HKind::ZeroNorm { nu: 0.4 }).unwrap();
        let r = global_min_enum(&pr).unwrap();
        assert_eq!((r.value, r.argmin), (0.0, vec![0.0; 3]));
    }

    #[test]
    fn unbounded_and_oversized_instances() {
        let pr = ProblemSpec::new(SymMatrix::diag(&[1.0, -1.0]), ThetaKind::Zero, HKind::ZeroNorm { nu: 1.0 }).unwrap();
        assert!(matches!(global_min_enum(&pr), Err(Error::Unbounded(_))));
        let a = SymMatrix::from_rows(&[vec![1.0, -2.0], vec![-2.0, 1.0]]).unwrap();
        let pr = ProblemSpec::new(a.clone(), ThetaKind::NonnegOrthant, HKind::ZeroNorm { nu: 1.0 }).unwrap();
        assert!(matches!(global_min_enum(&pr), Err(Error::Unbounded(_))));
        let pr = ProblemSpec::new(a, ThetaKind::NonnegOrthant, HKind::SparsityBall { kappa: 1 }).unwrap();
        assert_eq!(global_min_enum(&pr).unwrap().value, 0.0);
        let pr = ProblemSpec::new(SymMatrix::zeros(13), ThetaKind::Sphere, HKind::ZeroNorm { nu: 1.0 }).unwrap();
        assert!(matches!(global_min_enum(&pr), Err(Error::Size { .. })));
        assert!(matches!(
            prox_bruteforce(ThetaKind::Zero, HKind::ZeroNorm { nu: 1.0 }, &[0.0; 9], 1.0),
            Err(Error::Size { .. })
        ));
    }

    #[test]
    fn simplex_global_min_matches_dense_grid() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let a = SymMatrix::from_fn(3, |_, _| rng.random_range(-1.0..1.0));
            let pr = ProblemSpec::new(a.clone(), ThetaKind::Simplex, HKind::SparsityBall { kappa: 3 }).unwrap();
            let r = global_min_enum(&pr).unwrap();
            let n = 400;
            let mut grid = f64::INFINITY;
            for i in 0..=n {
                for j in 0..=n - i {
                    let z = [i as f64 / n as f64, j as f64 / n as f64, (n - i - j) as f64 / n as f64];
                    grid = grid.min(a.quad_form(&z));
                }
            }
            assert!(r.value <= grid + 1e-12);
            assert!(r.value >= grid - 2e-2);
            assert_eq!(objective(&pr, &r.argmin), r.value);
        }
    }

    #[test]
    fn bruteforce_distance_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let a = SymMatrix::from_fn(4, |_, _| rng.random_range(-1.0..1.0));
        let pr = ProblemSpec::new(a, ThetaKind::Sphere, HKind::ZeroNorm { nu: 1.0 }).unwrap();
        assert!(subdiff_distance_bruteforce(&pr, &[1.0, 0.0, 0.0, 0.0]).unwrap().value < 1e-9);

        let d = SymMatrix::diag(&[3.0, 1.0, -2.0]);
        let pr = ProblemSpec::new(d.clone(), ThetaKind::Sphere, HKind::SparsityBall { kappa: 3 }).unwrap();
        for _ in 0..20 {
            let v: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
            let z: Vec<f64> = v.iter().map(|t| t / norm(&v)).collect();
            let brute = subdiff_distance_bruteforce(&pr, &z).unwrap();
            assert!(agrees(brute.value, dist_subdiff_sphere_quad(&d, &z).unwrap(), 1e-7));
            assert!((norm(&brute.argmin) - brute.value).abs() <= 1e-10);
        }
    }

    #[test]
    fn bruteforce_matches_exact_distance() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for trial in 0..60 {
            let theta = ThetaKind::ALL[trial % 5];
            let p = rng.random_range(2..6usize);
            let a = SymMatrix::from_fn(p, |_, _| rng.random_range(-1.0..1.0));
            let nnz = rng.random_range(1..=p);
            let mut x = vec![0.0; p];
            for i in 0..nnz {
                x[i] = rng.random_range(0.1..1.0);
            }
            match theta {
                ThetaKind::Sphere | ThetaKind::SphereNonneg => {
                    let n = norm(&x);
                    x.iter_mut().for_each(|v| *v /= n);
                }
                ThetaKind::Simplex => {
                    let s: f64 = x.iter().sum();
                    x.iter_mut().for_each(|v| *v /= s);
                }
                _ => {}
            }
            let h = HKind::SparsityBall { kappa: rng.random_range(nnz..=p) };
            let pr = ProblemSpec::new(a, theta, h).unwrap();
            let exact = subdiff_distance(&pr, &x).unwrap().distance;
            let brute = subdiff_distance_bruteforce(&pr, &x).unwrap().value;
            assert!(agrees(exact, brute, 1e-7), "{theta:?} {exact} {brute}");
        }
    }

    #[test]
    fn prox_bruteforce_examples() {
        let r = prox_bruteforce(ThetaKind::Sphere, HKind::SparsityBall { kappa: 2 }, &[3.0, 4.0, 0.0, 1.0], 1.0).unwrap();
        assert!(dist(&r.argmin, &[0.6, 0.8, 0.0, 0.0]) < 1e-15);
        let r = prox_bruteforce(ThetaKind::Zero, HKind::ZeroNorm { nu: 0.5 }, &[2.0, 0.5], 1.0).unwrap();
        assert_eq!(r.argmin, vec![2.0, 0.0]);
        let r = prox_bruteforce(ThetaKind::Sphere, HKind::ZeroNorm { nu: 0.3 }, &[1.0, 0.0], 2.0).unwrap();
        assert_eq!(r.argmin, vec![1.0, 0.0]);
        let r = prox_bruteforce(ThetaKind::Zero, HKind::SparsityBall { kappa: 2 }, &[1.0, -2.0], 1.0).unwrap();
        assert_eq!(r.argmin, vec![1.0, -2.0]);
        // tie between the two 1-sparse supports: first in enumeration order
        let r = prox_bruteforce(ThetaKind::Zero, HKind::SparsityBall { kappa: 1 }, &[1.0, 1.0], 1.0).unwrap();
        assert_eq!(r.argmin, vec![1.0, 0.0]);
        assert_eq!(r.value, 0.5);
    }

    #[test]
    fn cone_oracles() {
        assert!(sparsity_cone_contains_enum(&[1.0, 0.0, 0.0], 2, &[0.0, 0.0, 5.0]));
        assert!(!sparsity_cone_contains_enum(&[1.0, 0.0, 0.0], 2, &[0.0, 1.0, 5.0]));
        assert!(sparsity_cone_contains_enum(&[1.0, 2.0, 0.0], 2, &[0.0, 0.0, 5.0]));
        let r = simplex_cone_residual_grid(&[0.5, 0.5, 0.0], &[1.0, 1.0, 0.5]);
        assert!(r < 1e-9);
        let r = simplex_cone_residual_grid(&[0.5, 0.5, 0.0], &[1.0, 1.0, 2.0]);
        // F(ω) = 2(1 − ω)² + (2 − ω)² is minimal at ω = 4/3
        assert!((r - (2.0f64 / 3.0).sqrt()).abs() < 1e-9);
    }

    #[test]
    fn ratio_scan_examples() {
        let pr = ProblemSpec::new(SymMatrix::diag(&[2.0, 1.0]), ThetaKind::Sphere, HKind::SparsityBall { kappa: 2 })
            .unwrap();
        let radii: Vec<f64> = (0..8).map(|k| 10f64.powi(-k - 1)).collect();
        let scan = kl_ratio_scan(&pr, &[0.0, 1.0], &radii, 20, 1).unwrap();
        assert!(!scan.vacuous && !scan.decay);
        let last = scan.rows.last().unwrap().min_ratio.unwrap();
        assert!((last - 2.0).abs() < 1e-6);

        let rows: Vec<RatioRow> = radii
            .iter()
            .map(|&r| {
                let gap: f64 = r * r;
                RatioRow { radius: r, accepted: 1, min_ratio: Some(gap.powf(0.75) / gap.sqrt()) }
            })
            .collect();
        assert!(summarize_ratio_rows(rows).decay);

        let scan = kl_ratio_scan(&pr, &[1.0, 0.0], &radii, 20, 1).unwrap();
        assert!(scan.vacuous);
    }
}
