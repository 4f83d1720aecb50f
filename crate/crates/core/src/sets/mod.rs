//! Closed sets with membership, projection and tangent/normal cone oracles.

mod boxsparse;
mod complementarity;
mod kcc;
mod polyunion;
mod spec;

use thiserror::Error;

use crate::polycone::{ConeError, ConeUnion, ConvexCone, CoordKind};

pub use boxsparse::BoxSparsitySet;
pub use complementarity::ComplementaritySet;
pub use kcc::{kcc_graph, kcc_image, kcc_vertices, kvc_selection};
pub use polyunion::{parse_poly_union, EnumerationCaps, PolyUnionSet, Polyhedron};
pub use spec::parse_set_spec;

/// Entries with magnitude above this count as nonzero.
pub const SPARSITY_TOL: f64 = 1e-9;
/// Bound activity tolerance for cone oracles.
pub const ACTIVE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SetError {
    #[error("point is not a member of the set")]
    NotAMember,
    #[error("enumeration cap exceeded: {0}")]
    EnumerationCapExceeded(String),
    #[error("invalid set: {0}")]
    Invalid(String),
    #[error("set literal: {0}")]
    Parse(String),
    #[error(transparent)]
    Cone(#[from] ConeError),
}

/// A set the projected-gradient solver can work with.
pub trait GeometricSet: Send + Sync {
    fn dim(&self) -> usize;
    fn member(&self, w: &[f64], tol: f64) -> bool;
    /// One Euclidean nearest point, chosen deterministically.
    fn project(&self, w: &[f64]) -> Vec<f64>;
    /// `dist(v, N(w))` for the limiting normal cone at a member `w`, when
    /// the set knows a closed form.
    fn normal_distance(&self, _w: &[f64], _v: &[f64]) -> Option<f64> {
        None
    }
}

/// The whole space `R^d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FullSpace(pub usize);

impl GeometricSet for FullSpace {
    fn dim(&self) -> usize {
        self.0
    }
    fn member(&self, w: &[f64], _tol: f64) -> bool {
        w.len() == self.0
    }
    fn project(&self, w: &[f64]) -> Vec<f64> {
        w.to_vec()
    }
    fn normal_distance(&self, _w: &[f64], v: &[f64]) -> Option<f64> {
        Some(crate::vecops::norm(v))
    }
}

/// Any of the supported structured sets.
#[derive(Debug, Clone, PartialEq)]
pub enum StructuredSet {
    BoxSparsity(BoxSparsitySet),
    Complementarity(ComplementaritySet),
    PolyUnion(PolyUnionSet),
}

impl StructuredSet {
    pub fn dim(&self) -> usize {
        match self {
            StructuredSet::BoxSparsity(s) => s.n(),
            StructuredSet::Complementarity(s) => 2 * s.n(),
            StructuredSet::PolyUnion(s) => s.dim(),
        }
    }

    pub fn member(&self, w: &[f64], tol: f64) -> bool {
        match self {
            StructuredSet::BoxSparsity(s) => s.member(w, tol),
            StructuredSet::Complementarity(s) => s.member(w, tol),
            StructuredSet::PolyUnion(s) => s.member(w, tol),
        }
    }

    /// Euclidean projection; generic unions have none.
    pub fn project(&self, w: &[f64]) -> Option<Vec<f64>> {
        match self {
            StructuredSet::BoxSparsity(s) => Some(s.project(w)),
            StructuredSet::Complementarity(s) => Some(s.project(w)),
            StructuredSet::PolyUnion(_) => None,
        }
    }

    pub fn tangent_cone(&self, w: &[f64]) -> Result<ConeUnion, SetError> {
        match self {
            StructuredSet::BoxSparsity(s) => s.tangent_cone(w),
            StructuredSet::Complementarity(s) => s.tangent_cone(w),
            StructuredSet::PolyUnion(s) => s.tangent_cone(w),
        }
    }

    pub fn regular_normal_cone(&self, w: &[f64]) -> Result<ConvexCone, SetError> {
        match self {
            StructuredSet::BoxSparsity(s) => s.regular_normal_cone(w),
            StructuredSet::Complementarity(s) => s.regular_normal_cone(w),
            StructuredSet::PolyUnion(s) => s.regular_normal_cone(w),
        }
    }

    pub fn limiting_normal_cone(&self, w: &[f64]) -> Result<ConeUnion, SetError> {
        match self {
            StructuredSet::BoxSparsity(s) => s.limiting_normal_cone(w),
            StructuredSet::Complementarity(s) => s.limiting_normal_cone(w),
            StructuredSet::PolyUnion(s) => s.limiting_normal_cone(w),
        }
    }

    /// The set written as an explicit union of convex polyhedra.
    pub fn to_poly_union(&self) -> Result<PolyUnionSet, SetError> {
        match self {
            StructuredSet::BoxSparsity(s) => s.to_poly_union(),
            StructuredSet::Complementarity(s) => s.to_poly_union(),
            StructuredSet::PolyUnion(s) => Ok(s.clone()),
        }
    }
}

/// Number of convex branches in the natural decomposition: maximal supports
/// `C(n, κ)` for a sparsity set, `2^n` for a complementarity set. `None`
/// for generic unions, whose count is just their branch list length.
pub fn branch_count(set: &StructuredSet) -> Option<num_bigint::BigUint> {
    use num_bigint::BigUint;
    match set {
        StructuredSet::BoxSparsity(s) => {
            let (n, k) = (s.n() as u64, s.kappa() as u64);
            let mut c = BigUint::from(1u32);
            for i in 0..k {
                c = c * BigUint::from(n - i) / BigUint::from(i + 1);
            }
            Some(c)
        }
        StructuredSet::Complementarity(s) => Some(BigUint::from(1u32) << s.n()),
        StructuredSet::PolyUnion(_) => None,
    }
}

/// Tangent shape of the interval `[lo, hi]` at `x`.
pub(crate) fn interval_kind(x: f64, lo: f64, hi: f64) -> CoordKind {
    if lo == hi {
        return CoordKind::Zero;
    }
    let at_lo = lo.is_finite() && x <= lo + ACTIVE_TOL;
    let at_hi = hi.is_finite() && x >= hi - ACTIVE_TOL;
    match (at_lo, at_hi) {
        (true, true) => CoordKind::Zero,
        (true, false) => CoordKind::Nonneg,
        (false, true) => CoordKind::Nonpos,
        (false, false) => CoordKind::Free,
    }
}

/// Squared distance from `x` to a one-dimensional cone.
pub(crate) fn kind_dist_sq(k: CoordKind, x: f64) -> f64 {
    match k {
        CoordKind::Free => 0.0,
        CoordKind::Zero => x * x,
        CoordKind::Nonneg => x.min(0.0).powi(2),
        CoordKind::Nonpos => x.max(0.0).powi(2),
    }
}

pub(crate) fn clamp(x: f64, lo: f64, hi: f64) -> f64 {
    // f64::clamp panics on lo > hi; bounds are validated at construction.
    x.max(lo).min(hi)
}

/// Builds a union of coordinate cones from per-coordinate shape patterns.
pub(crate) fn coordinate_union(patterns: Vec<Vec<CoordKind>>) -> Result<ConeUnion, SetError> {
    let mut patterns = patterns;
    patterns.sort_by_key(|p| p.iter().map(|k| *k as u8).collect::<Vec<_>>());
    patterns.dedup();
    // Drop patterns dominated coordinatewise by another one.
    let keep: Vec<bool> = (0..patterns.len())
        .map(|i| {
            !(0..patterns.len()).any(|j| {
                j != i && patterns[i].iter().zip(&patterns[j]).all(|(a, b)| a.within(*b)) && patterns[i] != patterns[j]
            })
        })
        .collect();
    let cones: Vec<ConvexCone> = patterns
        .iter()
        .zip(keep)
        .filter(|(_, k)| *k)
        .map(|(p, _)| ConvexCone::coordinate(p))
        .collect();
    Ok(ConeUnion::new(cones)?)
}

/// Iterates over all `k`-subsets of `pool` (in lexicographic order).
pub(crate) fn for_each_subset(pool: &[usize], k: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(pool: &[usize], k: usize, start: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..pool.len() {
            if pool.len() - i < k - cur.len() {
                break;
            }
            cur.push(pool[i]);
            rec(pool, k, i + 1, cur, f);
            cur.pop();
        }
    }
    let mut cur = Vec::with_capacity(k);
    if k <= pool.len() {
        rec(pool, k, 0, &mut cur, f);
    }
}

pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |c, i| c * (n - i) as f64 / (i + 1) as f64)
}

/// Upper bound on branches produced by closed-form cone oracles.
pub(crate) const MAX_CLOSED_FORM_BRANCHES: f64 = 4096.0;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_counts() {
        let s = |n, k| StructuredSet::BoxSparsity(BoxSparsitySet::unbounded(n, k).unwrap());
        assert_eq!(branch_count(&s(200, 5)).unwrap().to_string(), "2535650040");
        assert_eq!(branch_count(&s(200, 10)).unwrap().to_string(), "22451004309013280");
        assert_eq!(
            branch_count(&s(200, 20)).unwrap().to_string(),
            "1613587787967350073386147640"
        );
        let cc = StructuredSet::Complementarity(ComplementaritySet::new(vec![1.0; 200], vec![1.0; 200]).unwrap());
        let c = branch_count(&cc).unwrap().to_string();
        assert!(c.starts_with("16") && c.len() == 60 + 1);
    }

    #[test]
    fn subsets() {
        let mut seen = Vec::new();
        for_each_subset(&[0, 2, 5], 2, &mut |s| seen.push(s.to_vec()));
        assert_eq!(seen, vec![vec![0, 2], vec![0, 5], vec![2, 5]]);
    }
}
