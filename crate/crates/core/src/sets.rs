//! Projections onto, and cone queries for, the constraint sets of the model:
//! the unit sphere, the probability simplex, the nonnegative orthant, the
//! sparsity ball `Ω = {x : ‖x‖₀ ≤ κ}` and the intersections the prox
//! operators need.
//!
//! All magnitude ties are broken in favour of the smaller index.

use crate::error::{Error, Result};
use crate::linalg::{norm, ranked_by, top_k_indices};

/// Absolute tolerance on equality/inequality constraints in membership tests.
pub const FEASIBILITY_TOL: f64 = 1e-10;

/// An ordered subset of `{0, …, p−1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SupportSet {
    indices: Vec<usize>,
    ambient_dim: usize,
}

impl SupportSet {
    /// Sorts the indices; rejects duplicates and out-of-range entries.
    pub fn new(mut indices: Vec<usize>, ambient_dim: usize) -> Result<Self> {
        indices.sort_unstable();
        if indices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::arg("support indices must be distinct"));
        }
        if let Some(&i) = indices.iter().find(|&&i| i >= ambient_dim) {
            return Err(Error::arg(format!("index {i} outside 0..{ambient_dim}")));
        }
        Ok(Self { indices, ambient_dim })
    }

    pub fn empty(ambient_dim: usize) -> Self {
        Self { indices: Vec::new(), ambient_dim }
    }

    pub fn full(ambient_dim: usize) -> Self {
        Self { indices: (0..ambient_dim).collect(), ambient_dim }
    }

    /// `supp(x)`: entries with `|x_i| > 0` exactly.
    pub fn of(x: &[f64]) -> Self {
        Self {
            indices: (0..x.len()).filter(|&i| x[i] != 0.0).collect(),
            ambient_dim: x.len(),
        }
    }

    pub fn from_mask(mask: u64, ambient_dim: usize) -> Self {
        Self {
            indices: (0..ambient_dim).filter(|i| mask >> i & 1 == 1).collect(),
            ambient_dim,
        }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.indices.binary_search(&i).is_ok()
    }

    pub fn complement(&self) -> SupportSet {
        Self {
            indices: (0..self.ambient_dim).filter(|&i| !self.contains(i)).collect(),
            ambient_dim: self.ambient_dim,
        }
    }

    pub fn is_subset_of(&self, other: &SupportSet) -> bool {
        self.indices.iter().all(|&i| other.contains(i))
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.indices.iter().copied()
    }

    /// `x_J` as a dense vector of length `|J|`.
    pub fn gather(&self, x: &[f64]) -> Vec<f64> {
        self.indices.iter().map(|&i| x[i]).collect()
    }

    /// Zero-extends `z ∈ ℝ^|J|` to `ℝ^p`.
    pub fn scatter(&self, z: &[f64]) -> Vec<f64> {
        debug_assert_eq!(z.len(), self.len());
        let mut x = vec![0.0; self.ambient_dim];
        for (&i, &v) in self.indices.iter().zip(z) {
            x[i] = v;
        }
        x
    }
}

impl std::fmt::Display for SupportSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.indices.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

pub fn zero_norm(x: &[f64]) -> usize {
    x.iter().filter(|v| **v != 0.0).count()
}

pub fn in_sphere(x: &[f64]) -> bool {
    (norm(x) - 1.0).abs() <= FEASIBILITY_TOL
}

pub fn in_nonneg(x: &[f64]) -> bool {
    x.iter().all(|&v| v >= -FEASIBILITY_TOL)
}

pub fn in_simplex(x: &[f64]) -> bool {
    in_nonneg(x) && (x.iter().sum::<f64>() - 1.0).abs() <= FEASIBILITY_TOL
}

fn check_kappa(kappa: usize, p: usize) -> Result<()> {
    if kappa == 0 || kappa > p {
        return Err(Error::arg(format!("κ = {kappa} must lie in 1..={p}")));
    }
    Ok(())
}

/// Euclidean projection onto `Ω = {‖x‖₀ ≤ κ}`.
pub fn project_sparsity(u: &[f64], kappa: usize) -> Result<Vec<f64>> {
    check_kappa(kappa, u.len())?;
    let keep = top_k_indices(u, kappa)?;
    Ok(keep.scatter(&keep.gather(u)))
}

pub fn project_sphere(u: &[f64]) -> Result<Vec<f64>> {
    let n = norm(u);
    if n == 0.0 {
        return Err(Error::Degenerate(
            "projection of 0 onto the sphere is the whole sphere".into(),
        ));
    }
    Ok(u.iter().map(|v| v / n).collect())
}

/// Projection onto the probability simplex by the sort-and-threshold rule
/// `x_i = max(u_i − τ, 0)`.
pub fn project_simplex(u: &[f64]) -> Vec<f64> {
    assert!(!u.is_empty(), "simplex projection needs p ≥ 1");
    let tau = simplex_threshold(u);
    u.iter().map(|v| (v - tau).max(0.0)).collect()
}

fn simplex_threshold(u: &[f64]) -> f64 {
    let mut sorted = u.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut tau = sorted[0] - 1.0;
    for (j, &v) in sorted.iter().enumerate() {
        cum += v;
        let t = (cum - 1.0) / (j + 1) as f64;
        if v - t > 0.0 {
            tau = t;
        }
    }
    tau
}

pub fn project_nonneg(u: &[f64]) -> Vec<f64> {
    u.iter().map(|v| v.max(0.0)).collect()
}

/// Projection onto `S ∩ Ω`: keep the `κ` largest magnitudes, then normalize.
pub fn project_sparse_sphere(u: &[f64], kappa: usize) -> Result<Vec<f64>> {
    let kept = project_sparsity(u, kappa)?;
    if norm(&kept) == 0.0 {
        return Err(Error::Degenerate(
            "top-κ part of u is zero; projection onto S∩Ω is multivalued".into(),
        ));
    }
    project_sphere(&kept)
}

/// Projection onto `S ∩ ℝ₊ᵖ ∩ Ω`.
///
/// With some positive entry this is the sparse-sphere rule applied to `u⁺`.
/// When `u ≤ 0` the maximum of `⟨x, u⟩` over nonnegative unit vectors is
/// `max_i u_i`, attained at the coordinate vector of the largest entry.
pub fn project_sparse_sphere_nonneg(u: &[f64], kappa: usize) -> Result<Vec<f64>> {
    check_kappa(kappa, u.len())?;
    let plus = project_nonneg(u);
    if plus.iter().any(|&v| v > 0.0) {
        return project_sparse_sphere(&plus, kappa);
    }
    let best = ranked_by(u, |v| v)[0];
    let mut x = vec![0.0; u.len()];
    x[best] = 1.0;
    Ok(x)
}

/// Projection onto `Δ ∩ Ω`: pick the `κ` largest entries of `u` (by value),
/// project that subvector onto the `(κ−1)`-simplex, zero elsewhere.
pub fn project_sparse_simplex(u: &[f64], kappa: usize) -> Result<Vec<f64>> {
    check_kappa(kappa, u.len())?;
    let mut keep = ranked_by(u, |v| v);
    keep.truncate(kappa);
    let keep = SupportSet::new(keep, u.len())?;
    Ok(keep.scatter(&project_simplex(&keep.gather(u))))
}

/// Certificate attached to a positive cone-membership answer.
#[derive(Debug, Clone, PartialEq)]
pub enum ConeWitness {
    /// Multiplier `ω` of the sphere or simplex normal cone.
    Omega(f64),
    /// Completion `Ĵ` of the support for the limiting normal cone of `Ω`
    /// (empty when `‖x̄‖₀ = κ`).
    Branch(SupportSet),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConeQueryResult {
    /// Membership in the limiting normal cone.
    pub contained: bool,
    /// Membership in the regular (= proximal) normal cone.
    pub regular_contained: bool,
    pub witness: Option<ConeWitness>,
}

/// Membership of `v` in the normal cone of `Ω` at `x̄`.
///
/// At `‖x̄‖₀ = κ` both cones equal `{v : v_J = 0}`. Below the sparsity level
/// the regular cone collapses to `{0}` while the limiting cone is the union
/// over completions `Ĵ ⊆ J̄`, `|Ĵ| = κ − |J|`, of `{v : v_{J∪Ĵ} = 0}`.
/// Entries with `|v_i| ≤ 1e-10` count as zero.
pub fn normal_cone_sparsity_contains(
    xbar: &[f64],
    kappa: usize,
    v: &[f64],
) -> Result<ConeQueryResult> {
    let p = xbar.len();
    if v.len() != p {
        return Err(Error::arg("x̄ and v must have the same length"));
    }
    check_kappa(kappa, p)?;
    let support = SupportSet::of(xbar);
    if support.len() > kappa {
        return Err(Error::arg(format!(
            "x̄ has {} nonzeros, outside Ω with κ = {kappa}",
            support.len()
        )));
    }
    let is_zero = |i: usize| v[i].abs() <= FEASIBILITY_TOL;
    let on_support_zero = support.iter().all(is_zero);
    if support.len() == kappa {
        return Ok(ConeQueryResult {
            contained: on_support_zero,
            regular_contained: on_support_zero,
            witness: on_support_zero.then(|| ConeWitness::Branch(SupportSet::empty(p))),
        });
    }
    let need = kappa - support.len();
    let regular_contained = (0..p).all(is_zero);
    let zeros: Vec<usize> = support.complement().iter().filter(|&i| is_zero(i)).collect();
    if on_support_zero && zeros.len() >= need {
        let branch = SupportSet::new(zeros[..need].to_vec(), p)?;
        Ok(ConeQueryResult {
            contained: true,
            regular_contained,
            witness: Some(ConeWitness::Branch(branch)),
        })
    } else {
        Ok(ConeQueryResult { contained: false, regular_contained, witness: None })
    }
}

/// Result of projecting a vector onto the simplex normal cone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexConeFit {
    pub residual: f64,
    pub omega: f64,
}

/// `dist(v, N_Δ(x̄))` where `N_Δ(x̄) = {ξ : ξ_J = ωe_J, ξ_J̄ ≤ ωe_J̄}`.
pub fn normal_cone_simplex_residual(xbar: &[f64], v: &[f64]) -> Result<f64> {
    normal_cone_simplex_fit(xbar, v).map(|f| f.residual)
}

/// Same as [`normal_cone_simplex_residual`] but also returns the optimal `ω`.
pub fn normal_cone_simplex_fit(xbar: &[f64], v: &[f64]) -> Result<SimplexConeFit> {
    if v.len() != xbar.len() {
        return Err(Error::arg("x̄ and v must have the same length"));
    }
    if !in_simplex(xbar) {
        return Err(Error::arg("x̄ is not in the simplex"));
    }
    let support = SupportSet::of(xbar);
    let eq = support.gather(v);
    let lower = support.complement().gather(v);
    let (value_sq, omega) = minimize_eq_plus_lower(&eq, &lower);
    Ok(SimplexConeFit { residual: value_sq.sqrt(), omega })
}

/// Minimizes `F(ω) = Σ_j (ω − a_j)² + Σ_i max(0, c_i − ω)²` exactly.
///
/// `F` is convex and piecewise quadratic with breakpoints at the `c_i`. On
/// each piece the active penalty set is fixed, so the global minimizer is
/// either a stationary point of some piece or a breakpoint; all candidates
/// are evaluated. Returns `(F(ω*), ω*)`.
pub(crate) fn minimize_eq_plus_lower(a: &[f64], c: &[f64]) -> (f64, f64) {
    let f = |w: f64| -> f64 {
        a.iter().map(|aj| (w - aj) * (w - aj)).sum::<f64>()
            + c.iter().map(|ci| (ci - w).max(0.0).powi(2)).sum::<f64>()
    };
    let mut breaks = c.to_vec();
    breaks.sort_by(|x, y| x.total_cmp(y));
    breaks.dedup();

    let mut candidates: Vec<f64> = breaks.clone();
    // pieces: (-∞, b0], [b0, b1], …, [b_last, ∞)
    for piece in 0..=breaks.len() {
        let lo = if piece == 0 { f64::NEG_INFINITY } else { breaks[piece - 1] };
        let hi = if piece == breaks.len() { f64::INFINITY } else { breaks[piece] };
        // active penalties on this piece: c_i > ω, i.e. c_i ≥ hi
        let mut count = a.len();
        let mut sum: f64 = a.iter().sum();
        for &ci in c {
            if ci >= hi {
                count += 1;
                sum += ci;
            }
        }
        let w = if count > 0 {
            sum / count as f64
        } else if lo.is_finite() {
            lo
        } else if hi.is_finite() {
            hi
        } else {
            0.0
        };
        candidates.push(w.clamp(lo, hi));
    }
    let mut best = (f64::INFINITY, 0.0);
    for w in candidates {
        let v = f(w);
        if v < best.0 {
            best = (v, w);
        }
    }
    best
}

/// `d ∈ T_Δ(x̄) ⇔ Σd_i = 0 and d_i ≥ 0 off the support of x̄`.
pub fn tangent_simplex_contains(xbar: &[f64], d: &[f64]) -> Result<bool> {
    if d.len() != xbar.len() {
        return Err(Error::arg("x̄ and d must have the same length"));
    }
    if !in_simplex(xbar) {
        return Err(Error::arg("x̄ is not in the simplex"));
    }
    let sum_ok = d.iter().sum::<f64>().abs() <= 1e-12;
    let sign_ok = (0..d.len()).all(|i| xbar[i] != 0.0 || d[i] >= -1e-12);
    Ok(sum_ok && sign_ok)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::dist;
    use proptest::prelude::*;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn sparsity_projection_examples() {
        assert_eq!(project_sparsity(&[3.0, -1.0, 2.0], 2).unwrap(), vec![3.0, 0.0, 2.0]);
        assert_eq!(project_sparsity(&[0.0, 5.0, 0.0], 2).unwrap(), vec![0.0, 5.0, 0.0]);
        assert_eq!(project_sparsity(&[1.0, 1.0, 1.0], 1).unwrap(), vec![1.0, 0.0, 0.0]);
        assert!(project_sparsity(&[1.0], 0).is_err());
    }

    #[test]
    fn sphere_projection_examples() {
        assert!(close(&project_sphere(&[3.0, 4.0]).unwrap(), &[0.6, 0.8], 1e-15));
        assert_eq!(project_sphere(&[0.0, 1.0]).unwrap(), vec![0.0, 1.0]);
        assert!(matches!(project_sphere(&[0.0, 0.0]), Err(Error::Degenerate(_))));
    }

    #[test]
    fn simplex_projection_examples() {
        assert!(close(&project_simplex(&[0.5, 0.5]), &[0.5, 0.5], 1e-15));
        assert!(close(&project_simplex(&[2.0, 0.0]), &[1.0, 0.0], 1e-15));
        let got = project_simplex(&[0.3, 0.3, 0.2]);
        assert!(close(&got, &[1.1 / 3.0, 1.1 / 3.0, 0.8 / 3.0], 1e-15));
    }

    #[test]
    fn simplex_projection_beats_dense_grid() {
        // grid over the 2-simplex in 3-D, step 1/400
        let u = [0.3, 0.3, 0.2];
        let x = project_simplex(&u);
        let n = 400;
        for i in 0..=n {
            for j in 0..=(n - i) {
                let y = [i as f64 / n as f64, j as f64 / n as f64, (n - i - j) as f64 / n as f64];
                assert!(dist(&x, &u) <= dist(&y, &u) + 1e-15);
            }
        }
    }

    #[test]
    fn nonneg_projection_examples() {
        assert_eq!(project_nonneg(&[-1.0, 2.0]), vec![0.0, 2.0]);
        assert_eq!(project_nonneg(&[0.0, 0.0]), vec![0.0, 0.0]);
    }

    #[test]
    fn sparse_sphere_examples() {
        let x = project_sparse_sphere(&[3.0, 4.0, 0.0, 1.0], 2).unwrap();
        assert!(close(&x, &[0.6, 0.8, 0.0, 0.0], 1e-15));
        let u = [1.0, -2.0, 2.0];
        assert_eq!(project_sparse_sphere(&u, 3).unwrap(), project_sphere(&u).unwrap());
        assert_eq!(project_sparse_sphere(&[1.0, 1.0], 1).unwrap(), vec![1.0, 0.0]);
        assert!(matches!(
            project_sparse_sphere(&[0.0, 0.0, 1.0], 2),
            Ok(_)
        ));
        assert!(matches!(project_sparse_sphere(&[0.0, 0.0], 1), Err(Error::Degenerate(_))));
    }

    #[test]
    fn sparse_simplex_examples() {
        assert_eq!(project_sparse_simplex(&[0.9, 0.2, 0.1], 1).unwrap(), vec![1.0, 0.0, 0.0]);
        assert_eq!(project_sparse_simplex(&[0.0, 0.4, 0.6], 2).unwrap(), vec![0.0, 0.4, 0.6]);
        assert_eq!(project_sparse_simplex(&[0.5, 0.5, 0.5], 2).unwrap(), vec![0.5, 0.5, 0.0]);
        assert!(project_sparse_simplex(&[0.5], 2).is_err());
    }

    #[test]
    fn sparse_sphere_nonneg_handles_nonpositive_input() {
        assert_eq!(project_sparse_sphere_nonneg(&[-3.0, -1.0, -2.0], 2).unwrap(), vec![0.0, 1.0, 0.0]);
        let x = project_sparse_sphere_nonneg(&[-3.0, 4.0, 3.0], 1).unwrap();
        assert_eq!(x, vec![0.0, 1.0, 0.0]);
    }

    #[test]
    fn sparsity_cone_examples() {
        let r = normal_cone_sparsity_contains(&[1.0, 0.0, 0.0], 2, &[0.0, 5.0, 0.0]).unwrap();
        assert!(r.contained && !r.regular_contained);
        assert_eq!(r.witness, Some(ConeWitness::Branch(SupportSet::new(vec![2], 3).unwrap())));

        let r = normal_cone_sparsity_contains(&[1.0, 0.0, 0.0], 2, &[0.0, 5.0, 5.0]).unwrap();
        assert!(!r.contained);

        let r = normal_cone_sparsity_contains(&[1.0, 1.0, 0.0], 2, &[0.0, 0.0, 7.0]).unwrap();
        assert!(r.contained && r.regular_contained);

        assert!(normal_cone_sparsity_contains(&[1.0, 1.0, 1.0], 2, &[0.0; 3]).is_err());
    }

    #[test]
    fn simplex_cone_examples() {
        assert!(normal_cone_simplex_residual(&[1.0, 0.0], &[2.0, 1.0]).unwrap() < 1e-15);
        let fit = normal_cone_simplex_fit(&[0.5, 0.5], &[1.0, 1.0]).unwrap();
        assert!(fit.residual < 1e-15 && (fit.omega - 1.0).abs() < 1e-15);
        let r = normal_cone_simplex_residual(&[0.5, 0.5], &[1.0, -1.0]).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-15);
        assert!(normal_cone_simplex_residual(&[0.5, 0.4], &[1.0, 1.0]).is_err());
    }

    #[test]
    fn simplex_cone_matches_omega_grid() {
        // 1-D grid oracle on ω ∈ [-2, 2], step 1e-5
        let cases: [(&[f64], &[f64]); 3] = [
            (&[1.0, 0.0], &[2.0, 1.0]),
            (&[0.5, 0.5], &[1.0, -1.0]),
            (&[0.2, 0.0, 0.8], &[0.3, 1.2, -0.4]),
        ];
        for (xbar, v) in cases {
            let s = SupportSet::of(xbar);
            let obj = |w: f64| {
                (0..v.len())
                    .map(|i| if s.contains(i) { (v[i] - w).powi(2) } else { (v[i] - w).max(0.0).powi(2) })
                    .sum::<f64>()
                    .sqrt()
            };
            let grid = (0..=400_000).map(|k| obj(-2.0 + k as f64 * 1e-5)).fold(f64::INFINITY, f64::min);
            let got = normal_cone_simplex_residual(xbar, v).unwrap();
            assert!((got - grid).abs() < 1e-6, "{got} vs {grid}");
        }
    }

    #[test]
    fn simplex_tangent_examples() {
        assert!(tangent_simplex_contains(&[1.0, 0.0], &[-1.0, 1.0]).unwrap());
        assert!(!tangent_simplex_contains(&[1.0, 0.0], &[1.0, -1.0]).unwrap());
        assert!(tangent_simplex_contains(&[0.5, 0.5], &[1.0, -1.0]).unwrap());
        // feasibility of x̄ + t d for small t
        let x = [0.5 + 1e-3, 0.5 - 1e-3];
        assert!(in_simplex(&x));
    }

    #[test]
    fn piecewise_minimizer_without_equalities() {
        // F(ω) = max(0, 1−ω)² + max(0, 3−ω)²: zero for ω ≥ 3
        let (v, w) = minimize_eq_plus_lower(&[], &[1.0, 3.0]);
        assert_eq!(v, 0.0);
        assert!(w >= 3.0);
    }

    proptest! {
        #[test]
        fn sparsity_cone_shrinks_as_kappa_grows(
            xs in prop::collection::vec(prop::sample::select(vec![0.0, 1.0, -2.0]), 1..6),
            vs in prop::collection::vec(prop::sample::select(vec![0.0, 0.0, 3.0]), 6),
        ) {
            let p = xs.len();
            let v = &vs[..p];
            let nnz = zero_norm(&xs).max(1);
            // a larger κ forces more completion coordinates to vanish
            let mut was_in = false;
            for kappa in (nnz..=p).rev() {
                let r = normal_cone_sparsity_contains(&xs, kappa, v).unwrap();
                prop_assert!(!was_in || r.contained);
                was_in = r.contained;
            }
        }

        #[test]
        fn simplex_cone_zero_residual_iff_witness_reconstructs(
            raw in prop::collection::vec(0.0f64..1.0, 2..6),
            zero_mask in prop::collection::vec(any::<bool>(), 6),
            vs in prop::collection::vec(-2.0f64..2.0, 6),
            omega in -1.0f64..1.0,
            build_member in any::<bool>(),
        ) {
            let p = raw.len();
            let mut x: Vec<f64> = raw.iter().zip(&zero_mask).map(|(r, z)| if *z { 0.0 } else { r + 0.1 }).collect();
            if x.iter().all(|v| *v == 0.0) { x[0] = 1.0; }
            let s: f64 = x.iter().sum();
            x.iter_mut().for_each(|v| *v /= s);
            let support = SupportSet::of(&x);
            let v: Vec<f64> = if build_member {
                (0..p).map(|i| if support.contains(i) { omega } else { omega - vs[i].abs() }).collect()
            } else {
                vs[..p].to_vec()
            };
            let fit = normal_cone_simplex_fit(&x, &v).unwrap();
            let recon: f64 = (0..p)
                .map(|i| if support.contains(i) { (v[i] - fit.omega).powi(2) } else { (v[i] - fit.omega).max(0.0).powi(2) })
                .sum::<f64>()
                .sqrt();
            prop_assert!((recon - fit.residual).abs() <= 1e-10);
            if build_member { prop_assert!(fit.residual <= 1e-10); }
        }

        #[test]
        fn simplex_cone_polarity(
            raw in prop::collection::vec(0.0f64..1.0, 2..6),
            zero_mask in prop::collection::vec(any::<bool>(), 6),
            slack in prop::collection::vec(0.0f64..2.0, 6),
            dirs in prop::collection::vec(-1.0f64..1.0, 6),
            omega in -1.0f64..1.0,
        ) {
            let p = raw.len();
            let mut x: Vec<f64> = raw.iter().zip(&zero_mask).map(|(r, z)| if *z { 0.0 } else { r + 0.1 }).collect();
            if x.iter().all(|v| *v == 0.0) { x[0] = 1.0; }
            let s: f64 = x.iter().sum();
            x.iter_mut().for_each(|v| *v /= s);
            let support = SupportSet::of(&x);
            let v: Vec<f64> = (0..p).map(|i| if support.contains(i) { omega } else { omega - slack[i] }).collect();
            prop_assert!(normal_cone_simplex_residual(&x, &v).unwrap() <= 1e-10);
            // tangent direction: nonnegative off the support, zero sum
            let mut d: Vec<f64> = (0..p).map(|i| if support.contains(i) { dirs[i] } else { dirs[i].abs() }).collect();
            let off: f64 = d.iter().sum::<f64>() / support.len() as f64;
            for i in support.iter() { d[i] -= off; }
            prop_assert!(tangent_simplex_contains(&x, &d).unwrap());
            let ip: f64 = v.iter().zip(&d).map(|(a, b)| a * b).sum();
            prop_assert!(ip <= 1e-10);
        }
    }
}
