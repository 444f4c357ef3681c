//! Quadratic forms restricted to the unit sphere: `ψ(x) = xᵀDx + δ_S(x)` for
//! diagonal `D` and `g(z) = zᵀHz + δ_S(z)` for general symmetric `H`.
//!
//! Critical points are the unit eigenvectors. When an eigenvalue repeats the
//! critical set contains the whole unit sphere of its eigenspace; such sets
//! are reported as families next to finitely many representatives.

use crate::error::{Error, Result};
use crate::linalg::{dot, norm, sym_eig, SymMatrix};
use crate::sets::SupportSet;

const UNIT_TOL: f64 = 1e-10;
const EQUAL_REL_TOL: f64 = 1e-12;
const CRITICAL_TOL: f64 = 1e-9;

/// A continuum of critical points: every unit vector in `span(basis)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CriticalFamily {
    pub eigenvalue: f64,
    /// Positions in the eigenvalue list (coordinates for diagonal input).
    pub indices: Vec<usize>,
    /// Orthonormal basis of the eigenspace, in ambient coordinates.
    pub basis: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SphereCriticalSet {
    pub representatives: Vec<Vec<f64>>,
    pub families: Vec<CriticalFamily>,
}

impl SphereCriticalSet {
    /// Whether `z` lies in one of the families (within `tol`).
    pub fn contains(&self, z: &[f64], tol: f64) -> bool {
        self.families.iter().any(|f| {
            let proj: f64 = f.basis.iter().map(|b| dot(b, z).powi(2)).sum();
            (1.0 - proj).abs() <= tol
        })
    }
}

/// Groups positions with equal values, relative tolerance `1e-12`.
fn equal_value_groups(d: &[f64]) -> Vec<Vec<usize>> {
    let scale = d.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let mut order: Vec<usize> = (0..d.len()).collect();
    order.sort_by(|&i, &j| d[j].total_cmp(&d[i]).then(i.cmp(&j)));
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for i in order {
        match groups.last_mut() {
            Some(g) if (d[g[0]] - d[i]).abs() <= EQUAL_REL_TOL * scale => g.push(i),
            _ => groups.push(vec![i]),
        }
    }
    for g in &mut groups {
        g.sort_unstable();
    }
    groups.sort_by_key(|g| g[0]);
    groups
}

fn unit(p: usize, i: usize, s: f64) -> Vec<f64> {
    let mut e = vec![0.0; p];
    e[i] = s;
    e
}

/// Critical points of `ψ` for `D = diag(d)`: the signed coordinate vectors,
/// plus one family per block of equal `d`-values.
pub fn crit_points_diag(d: &[f64]) -> SphereCriticalSet {
    let p = d.len();
    let representatives = (0..p).flat_map(|i| [unit(p, i, 1.0), unit(p, i, -1.0)]).collect();
    let families = equal_value_groups(d)
        .into_iter()
        .map(|indices| CriticalFamily {
            eigenvalue: d[indices[0]],
            basis: indices.iter().map(|&i| unit(p, i, 1.0)).collect(),
            indices,
        })
        .collect();
    SphereCriticalSet { representatives, families }
}

/// Critical points of `g`: the diagonal answer for the spectrum of `H`,
/// mapped through its eigenvector basis.
pub fn crit_points_general(h: &SymMatrix) -> SphereCriticalSet {
    let eig = sym_eig(h);
    let diag = crit_points_diag(&eig.eigenvalues);
    let p = h.dim();
    let map = |v: &[f64]| -> Vec<f64> {
        (0..p).map(|i| (0..p).map(|k| eig.basis_entry(i, k) * v[k]).sum()).collect()
    };
    SphereCriticalSet {
        representatives: diag.representatives.iter().map(|v| map(v)).collect(),
        families: diag
            .families
            .into_iter()
            .map(|f| CriticalFamily {
                eigenvalue: f.eigenvalue,
                basis: f.indices.iter().map(|&k| eig.eigenvector(k)).collect(),
                indices: f.indices,
            })
            .collect(),
    }
}

fn check_unit(z: &[f64]) -> Result<()> {
    let n = norm(z);
    if (n - 1.0).abs() > UNIT_TOL {
        return Err(Error::arg(format!("‖z‖ = {n} is not 1")));
    }
    Ok(())
}

fn tangent_residual(h: &SymMatrix, z: &[f64]) -> Vec<f64> {
    let hz = h.mul_vec(z);
    let rq = dot(z, &hz);
    hz.iter().zip(z).map(|(a, b)| a - rq * b).collect()
}

/// `dist(0, ∂g(z)) = 2‖Hz − ⟨z,Hz⟩z‖`.
pub fn dist_subdiff_sphere_quad(h: &SymMatrix, z: &[f64]) -> Result<f64> {
    check_unit(z)?;
    if z.len() != h.dim() {
        return Err(Error::arg("dimension mismatch"));
    }
    Ok(2.0 * norm(&tangent_residual(h, z)))
}

/// Norm of the gradient of `zᵀHz` projected onto the tangent space of the
/// sphere at `z`.
pub fn riemannian_grad_norm(h: &SymMatrix, z: &[f64]) -> Result<f64> {
    check_unit(z)?;
    if z.len() != h.dim() {
        return Err(Error::arg("dimension mismatch"));
    }
    let grad: Vec<f64> = h.mul_vec(z).into_iter().map(|v| 2.0 * v).collect();
    let radial = dot(z, &grad);
    let t: Vec<f64> = grad.iter().zip(z).map(|(g, zi)| g - radial * zi).collect();
    Ok(norm(&t))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KlConstant {
    /// All `d_j` coincide: `ψ` is constant on the sphere and the inequality
    /// holds with any constant.
    AllEqual,
    Value(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct KlConstantReport {
    pub lambda_bar: f64,
    /// Off-support coordinates whose `d_j` differs from `λ̄`.
    pub j1bar: SupportSet,
    pub c_theory: KlConstant,
}

fn tol_scale(d: &[f64]) -> f64 {
    EQUAL_REL_TOL * d.iter().fold(1.0f64, |m, v| m.max(v.abs()))
}

/// The constant `c` in `dist(0, ∂ψ(x)) ≥ c·√(ψ(x) − ψ(x̄))` near a critical
/// point `x̄`, namely `min |d_j − λ̄| / √(max |d_j − λ̄|)` over `J̄₁`.
pub fn kl_constant_theoretical(d: &[f64], xbar: &[f64]) -> Result<KlConstantReport> {
    if d.len() != xbar.len() || d.is_empty() {
        return Err(Error::arg("d and x̄ must have the same positive length"));
    }
    let dm = SymMatrix::diag(d);
    let residual = dist_subdiff_sphere_quad(&dm, xbar)?;
    if residual > CRITICAL_TOL {
        return Err(Error::NotCritical { residual });
    }
    let lambda_bar = dm.quad_form(xbar);
    let tol = tol_scale(d);
    let j1: Vec<usize> = (0..d.len())
        .filter(|&j| xbar[j] == 0.0 && (d[j] - lambda_bar).abs() > tol)
        .collect();
    let j1bar = SupportSet::new(j1, d.len())?;
    let all_equal = d.iter().all(|&v| (v - d[0]).abs() <= tol);
    let c_theory = if all_equal || j1bar.is_empty() {
        KlConstant::AllEqual
    } else {
        let gaps: Vec<f64> = j1bar.iter().map(|j| (d[j] - lambda_bar).abs()).collect();
        let lo = gaps.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = gaps.iter().cloned().fold(0.0, f64::max);
        KlConstant::Value(lo / hi.sqrt())
    };
    Ok(KlConstantReport { lambda_bar, j1bar, c_theory })
}

/// `½|d_j − λ̄| ≤ |d_j − ⟨z,Dz⟩| ≤ 3/2·|d_j − λ̄|` for every `j ∈ J̄₁`: the
/// neighborhood condition under which the constant above applies at `z`.
pub fn same_order_holds(d: &[f64], report: &KlConstantReport, z: &[f64]) -> bool {
    let rq: f64 = d.iter().zip(z).map(|(di, zi)| di * zi * zi).sum();
    report.j1bar.iter().all(|j| {
        let base = (d[j] - report.lambda_bar).abs();
        let cur = (d[j] - rq).abs();
        0.5 * base <= cur && cur <= 1.5 * base
    })
}
