//! Finitely generated convex cones and finite unions of them.
//!
//! A [`ConvexCone`] carries both a V-representation (generators plus a
//! lineality basis) and an H-representation (rows `a·v <= 0`, `b·v = 0`).
//! Conversion is a floating-point double description, see [`dd`].

pub mod dd;
mod text;

use std::collections::HashSet;

use thiserror::Error;

use crate::lp::{strict_margin, Rel};
use crate::vecops::{dot, normalized, unit};

pub use dd::polytope_vertices;
pub use text::{format_cone_union, parse_cone_union};

/// Tolerance for membership tests.
pub const MEMBERSHIP_TOL: f64 = 1e-9;
/// Tolerance for comparing representations (inclusion and equality).
pub const EQUALITY_TOL: f64 = 1e-7;
/// Largest ambient dimension accepted by the double description.
pub const MAX_DIM: usize = 12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConeError {
    #[error("dimension {dim} exceeds the cap of {cap}")]
    DimensionTooLarge { dim: usize, cap: usize },
    #[error("numerically degenerate conversion: {0}")]
    NumericallyDegenerate(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("inclusion undecided without the LP cover check")]
    InconclusiveCover,
    #[error("a cone union needs at least one branch")]
    EmptyUnion,
    #[error("cone literal: {0}")]
    Parse(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    HtoV,
    VtoH,
}

/// Outcome of an inclusion test `a ⊆ b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Inclusion {
    /// `a ⊆ b` and `b ⊄ a`.
    Subset,
    /// `a ⊆ b` and `b ⊆ a`.
    Equal,
    /// `a ⊄ b`.
    Neither,
}

impl Inclusion {
    pub fn holds(self) -> bool {
        self != Inclusion::Neither
    }
}

/// Per-coordinate shape used by [`ConvexCone::coordinate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CoordKind {
    Free,
    Nonneg,
    Nonpos,
    Zero,
}

impl CoordKind {
    /// Polar of the one-dimensional cone.
    pub fn polar(self) -> CoordKind {
        match self {
            CoordKind::Free => CoordKind::Zero,
            CoordKind::Zero => CoordKind::Free,
            CoordKind::Nonneg => CoordKind::Nonpos,
            CoordKind::Nonpos => CoordKind::Nonneg,
        }
    }

    pub fn admits(self, x: f64, tol: f64) -> bool {
        match self {
            CoordKind::Free => true,
            CoordKind::Nonneg => x >= -tol,
            CoordKind::Nonpos => x <= tol,
            CoordKind::Zero => x.abs() <= tol,
        }
    }

    /// `self ⊆ other` as subsets of the real line.
    pub fn within(self, other: CoordKind) -> bool {
        self == other || self == CoordKind::Zero || other == CoordKind::Free
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvexCone {
    dim: usize,
    generators: Vec<Vec<f64>>,
    lineality: Vec<Vec<f64>>,
    ineq_normals: Vec<Vec<f64>>,
    eq_normals: Vec<Vec<f64>>,
    reps_synced: bool,
}

fn check_dims(dim: usize, vs: &[Vec<f64>]) -> Result<(), ConeError> {
    match vs.iter().find(|v| v.len() != dim) {
        Some(v) => Err(ConeError::DimensionMismatch {
            expected: dim,
            found: v.len(),
        }),
        None => Ok(()),
    }
}

impl ConvexCone {
    /// Cone from an H-representation; the V-representation is computed.
    pub fn from_h(dim: usize, ineq: Vec<Vec<f64>>, eq: Vec<Vec<f64>>) -> Result<Self, ConeError> {
        Self::h_only(dim, ineq, eq)?.dd_convert(Direction::HtoV)
    }

    /// Cone from generators and lineality vectors; the H-representation is computed.
    pub fn from_v(dim: usize, gens: Vec<Vec<f64>>, lin: Vec<Vec<f64>>) -> Result<Self, ConeError> {
        Self::v_only(dim, gens, lin)?.dd_convert(Direction::VtoH)
    }

    /// Unsynced cone carrying only an H-representation.
    pub fn h_only(dim: usize, ineq: Vec<Vec<f64>>, eq: Vec<Vec<f64>>) -> Result<Self, ConeError> {
        check_dims(dim, &ineq)?;
        check_dims(dim, &eq)?;
        Ok(ConvexCone {
            dim,
            generators: Vec::new(),
            lineality: Vec::new(),
            ineq_normals: ineq,
            eq_normals: eq,
            reps_synced: false,
        })
    }

    /// Unsynced cone carrying only a V-representation.
    pub fn v_only(dim: usize, gens: Vec<Vec<f64>>, lin: Vec<Vec<f64>>) -> Result<Self, ConeError> {
        check_dims(dim, &gens)?;
        check_dims(dim, &lin)?;
        Ok(ConvexCone {
            dim,
            generators: gens,
            lineality: lin,
            ineq_normals: Vec::new(),
            eq_normals: Vec::new(),
            reps_synced: false,
        })
    }

    /// Populates the missing representation from the present one.
    pub fn dd_convert(&self, direction: Direction) -> Result<Self, ConeError> {
        if self.dim > MAX_DIM {
            return Err(ConeError::DimensionTooLarge {
                dim: self.dim,
                cap: MAX_DIM,
            });
        }
        match direction {
            Direction::HtoV => {
                let (gens, lin) = dd::h_to_v(self.dim, &self.ineq_normals, &self.eq_normals)?;
                let (ineq, eq) = dd::h_to_v(self.dim, &gens, &lin)?;
                Ok(ConvexCone {
                    dim: self.dim,
                    generators: gens,
                    lineality: lin,
                    ineq_normals: ineq,
                    eq_normals: eq,
                    reps_synced: true,
                })
            }
            Direction::VtoH => {
                let (ineq, eq) = dd::h_to_v(self.dim, &self.generators, &self.lineality)?;
                let (gens, lin) = dd::h_to_v(self.dim, &ineq, &eq)?;
                Ok(ConvexCone {
                    dim: self.dim,
                    generators: gens,
                    lineality: lin,
                    ineq_normals: ineq,
                    eq_normals: eq,
                    reps_synced: true,
                })
            }
        }
    }

    /// `{0}` in `R^dim`.
    pub fn zero(dim: usize) -> Self {
        Self::coordinate(&vec![CoordKind::Zero; dim])
    }

    /// `R^dim`.
    pub fn full(dim: usize) -> Self {
        Self::coordinate(&vec![CoordKind::Free; dim])
    }

    /// Product of one-dimensional cones, built directly in both representations.
    pub fn coordinate(kinds: &[CoordKind]) -> Self {
        let dim = kinds.len();
        let mut c = ConvexCone {
            dim,
            generators: Vec::new(),
            lineality: Vec::new(),
            ineq_normals: Vec::new(),
            eq_normals: Vec::new(),
            reps_synced: true,
        };
        for (i, k) in kinds.iter().enumerate() {
            let e = unit(dim, i);
            let neg: Vec<f64> = e.iter().map(|x| -x).collect();
            match k {
                CoordKind::Free => c.lineality.push(e),
                CoordKind::Nonneg => {
                    c.generators.push(e);
                    c.ineq_normals.push(neg);
                }
                CoordKind::Nonpos => {
                    c.generators.push(neg);
                    c.ineq_normals.push(e);
                }
                CoordKind::Zero => c.eq_normals.push(e),
            }
        }
        c
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn generators(&self) -> &[Vec<f64>] {
        &self.generators
    }
    pub fn lineality(&self) -> &[Vec<f64>] {
        &self.lineality
    }
    pub fn ineq_normals(&self) -> &[Vec<f64>] {
        &self.ineq_normals
    }
    pub fn eq_normals(&self) -> &[Vec<f64>] {
        &self.eq_normals
    }
    pub fn reps_synced(&self) -> bool {
        self.reps_synced
    }

    fn synced(&self) -> Result<std::borrow::Cow<'_, Self>, ConeError> {
        if self.reps_synced {
            Ok(std::borrow::Cow::Borrowed(self))
        } else if self.generators.is_empty() && self.lineality.is_empty() {
            Ok(std::borrow::Cow::Owned(self.dd_convert(Direction::HtoV)?))
        } else {
            Ok(std::borrow::Cow::Owned(self.dd_convert(Direction::VtoH)?))
        }
    }

    /// Membership through the H-representation; rows are compared after
    /// normalization so `tol` is a distance-like slack.
    pub fn contains(&self, v: &[f64], tol: f64) -> bool {
        let scale = |a: &[f64]| crate::vecops::norm(a).max(1e-300);
        self.ineq_normals.iter().all(|a| dot(a, v) <= tol * scale(a))
            && self.eq_normals.iter().all(|b| dot(b, v).abs() <= tol * scale(b))
    }

    pub fn is_zero(&self) -> bool {
        self.generators.is_empty() && self.lineality.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.lineality.len() == self.dim
    }

    /// Polar cone `{y : y·x <= 0 ∀x}`: the two representations swap roles.
    pub fn polar(&self) -> Result<Self, ConeError> {
        let c = self.synced()?;
        Ok(ConvexCone {
            dim: c.dim,
            generators: c.ineq_normals.clone(),
            lineality: c.eq_normals.clone(),
            ineq_normals: c.generators.clone(),
            eq_normals: c.lineality.clone(),
            reps_synced: true,
        })
    }

    pub fn sum(&self, other: &Self) -> Result<Self, ConeError> {
        self.same_dim(other)?;
        let a = self.synced()?;
        let b = other.synced()?;
        let gens = a.generators.iter().chain(&b.generators).cloned().collect();
        let lin = a.lineality.iter().chain(&b.lineality).cloned().collect();
        Self::from_v(self.dim, gens, lin)
    }

    pub fn intersect(&self, other: &Self) -> Result<Self, ConeError> {
        self.same_dim(other)?;
        let a = self.synced()?;
        let b = other.synced()?;
        let ineq = a.ineq_normals.iter().chain(&b.ineq_normals).cloned().collect();
        let eq = a.eq_normals.iter().chain(&b.eq_normals).cloned().collect();
        Self::from_h(self.dim, ineq, eq)
    }

    /// Cartesian product `self × other`.
    pub fn product(&self, other: &Self) -> Result<Self, ConeError> {
        let a = self.synced()?;
        let b = other.synced()?;
        let (da, db) = (a.dim, b.dim);
        let left = |v: &Vec<f64>| {
            let mut w = v.clone();
            w.resize(da + db, 0.0);
            w
        };
        let right = |v: &Vec<f64>| {
            let mut w = vec![0.0; da];
            w.extend_from_slice(v);
            w
        };
        let join = |x: &[Vec<f64>], y: &[Vec<f64>]| -> Vec<Vec<f64>> {
            x.iter().map(left).chain(y.iter().map(right)).collect()
        };
        Ok(ConvexCone {
            dim: da + db,
            generators: join(&a.generators, &b.generators),
            lineality: join(&a.lineality, &b.lineality),
            ineq_normals: join(&a.ineq_normals, &b.ineq_normals),
            eq_normals: join(&a.eq_normals, &b.eq_normals),
            reps_synced: true,
        })
    }

    /// Image under the coordinate projection onto `coords` (in that order).
    pub fn project(&self, coords: &[usize]) -> Result<Self, ConeError> {
        let c = self.synced()?;
        let pick = |v: &Vec<f64>| coords.iter().map(|&i| v[i]).collect::<Vec<f64>>();
        Self::from_v(
            coords.len(),
            c.generators.iter().map(pick).collect(),
            c.lineality.iter().map(pick).collect(),
        )
    }

    /// Intersects with `{v : v_k = 0, k ∈ coords}` and drops those coordinates.
    pub fn slice_zero(&self, coords: &[usize]) -> Result<Self, ConeError> {
        let c = self.synced()?;
        let mut eq = c.eq_normals.clone();
        eq.extend(coords.iter().map(|&k| unit(self.dim, k)));
        let cut = Self::from_h(self.dim, c.ineq_normals.clone(), eq)?;
        let keep: Vec<usize> = (0..self.dim).filter(|i| !coords.contains(i)).collect();
        cut.project(&keep)
    }

    /// `self ⊆ other` for convex cones.
    pub fn subset_of(&self, other: &Self) -> Result<bool, ConeError> {
        self.same_dim(other)?;
        let a = self.synced()?;
        let b = other.synced()?;
        Ok(a.vectors_in(&b))
    }

    fn vectors_in(&self, b: &ConvexCone) -> bool {
        self.generators.iter().all(|g| b.contains(g, EQUALITY_TOL))
            && self.lineality.iter().all(|l| {
                let neg: Vec<f64> = l.iter().map(|x| -x).collect();
                b.contains(l, EQUALITY_TOL) && b.contains(&neg, EQUALITY_TOL)
            })
    }

    pub fn equals(&self, other: &Self) -> Result<bool, ConeError> {
        Ok(self.subset_of(other)? && other.subset_of(self)?)
    }

    fn same_dim(&self, other: &Self) -> Result<(), ConeError> {
        if self.dim != other.dim {
            Err(ConeError::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            })
        } else {
            Ok(())
        }
    }

    /// Canonical hash key: rounded sorted generators plus the rounded
    /// projector onto the lineality space.
    fn key(&self) -> Vec<i64> {
        let q = |x: f64| (x * 1e6).round() as i64;
        let mut gens: Vec<Vec<i64>> = self
            .generators
            .iter()
            .map(|g| normalized(g, 1e-300).unwrap_or_default().into_iter().map(q).collect())
            .collect();
        gens.sort();
        gens.dedup();
        let d = self.dim;
        let mut key = vec![d as i64, gens.len() as i64];
        for i in 0..d {
            for j in 0..d {
                let p: f64 = self.lineality.iter().map(|l| l[i] * l[j]).sum();
                key.push(q(p));
            }
        }
        key.extend(gens.into_iter().flatten());
        key
    }
}

/// A finite union of convex cones of equal dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct ConeUnion {
    dim: usize,
    branches: Vec<ConvexCone>,
}

impl From<ConvexCone> for ConeUnion {
    fn from(c: ConvexCone) -> Self {
        ConeUnion {
            dim: c.dim,
            branches: vec![c],
        }
    }
}

impl ConeUnion {
    pub fn new(branches: Vec<ConvexCone>) -> Result<Self, ConeError> {
        let first = branches.first().ok_or(ConeError::EmptyUnion)?;
        let dim = first.dim;
        let mut synced = Vec::with_capacity(branches.len());
        for b in branches {
            if b.dim != dim {
                return Err(ConeError::DimensionMismatch {
                    expected: dim,
                    found: b.dim,
                });
            }
            synced.push(b.synced()?.into_owned());
        }
        Ok(ConeUnion { dim, branches: synced })
    }

    /// Like [`ConeUnion::new`], followed by [`ConeUnion::simplify`].
    pub fn simplified(branches: Vec<ConvexCone>) -> Result<Self, ConeError> {
        Self::new(branches)?.simplify()
    }

    pub fn zero(dim: usize) -> Self {
        ConvexCone::zero(dim).into()
    }

    pub fn full(dim: usize) -> Self {
        ConvexCone::full(dim).into()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn branches(&self) -> &[ConvexCone] {
        &self.branches
    }

    pub fn is_convex(&self) -> bool {
        self.branches.len() == 1
    }

    pub fn contains(&self, v: &[f64], tol: f64) -> bool {
        v.len() == self.dim && self.branches.iter().any(|b| b.contains(v, tol))
    }

    /// Removes duplicate branches and branches contained in another one.
    pub fn simplify(self) -> Result<Self, ConeError> {
        let mut seen = HashSet::new();
        let unique: Vec<ConvexCone> = self.branches.into_iter().filter(|b| seen.insert(b.key())).collect();
        let mut keep = vec![true; unique.len()];
        for i in 0..unique.len() {
            for j in 0..unique.len() {
                if i == j || !keep[j] {
                    continue;
                }
                if unique[i].subset_of(&unique[j])? {
                    keep[i] = false;
                    break;
                }
            }
        }
        let branches = unique
            .into_iter()
            .zip(keep)
            .filter_map(|(b, k)| k.then_some(b))
            .collect();
        Ok(ConeUnion {
            dim: self.dim,
            branches,
        })
    }

    /// Polar of the union: the intersection of the branch polars.
    pub fn polar(&self) -> Result<ConvexCone, ConeError> {
        if self.branches.len() == 1 {
            return self.branches[0].polar();
        }
        let ineq = self.branches.iter().flat_map(|b| b.generators.clone()).collect();
        let eq = self.branches.iter().flat_map(|b| b.lineality.clone()).collect();
        ConvexCone::from_h(self.dim, ineq, eq)
    }

    fn pairwise(
        &self,
        other: &Self,
        op: impl Fn(&ConvexCone, &ConvexCone) -> Result<ConvexCone, ConeError>,
    ) -> Result<Self, ConeError> {
        if self.dim != other.dim {
            return Err(ConeError::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        let mut out = Vec::with_capacity(self.branches.len() * other.branches.len());
        for a in &self.branches {
            for b in &other.branches {
                out.push(op(a, b)?);
            }
        }
        Self::simplified(out)
    }

    pub fn minkowski_sum(&self, other: &Self) -> Result<Self, ConeError> {
        self.pairwise(other, ConvexCone::sum)
    }

    pub fn intersect(&self, other: &Self) -> Result<Self, ConeError> {
        self.pairwise(other, ConvexCone::intersect)
    }

    /// Cartesian product, branch by branch.
    pub fn product(&self, other: &Self) -> Result<Self, ConeError> {
        let mut out = Vec::with_capacity(self.branches.len() * other.branches.len());
        for a in &self.branches {
            for b in &other.branches {
                out.push(a.product(b)?);
            }
        }
        Ok(ConeUnion {
            dim: self.dim + other.dim,
            branches: out,
        })
    }

    pub fn project_cone(&self, coords: &[usize]) -> Result<Self, ConeError> {
        let b = self
            .branches
            .iter()
            .map(|c| c.project(coords))
            .collect::<Result<_, _>>()?;
        Self::simplified(b)
    }

    pub fn slice_zero(&self, coords: &[usize]) -> Result<Self, ConeError> {
        let b = self
            .branches
            .iter()
            .map(|c| c.slice_zero(coords))
            .collect::<Result<_, _>>()?;
        Self::simplified(b)
    }

    /// Decides `self ⊆ other` and, if so, whether they are equal.
    pub fn subset_eq(&self, other: &Self) -> Result<Inclusion, ConeError> {
        self.subset_eq_with(other, true)
    }

    /// As [`ConeUnion::subset_eq`]; with `cover_check = false` the exact LP
    /// cover test is skipped and undecided cases report `InconclusiveCover`.
    pub fn subset_eq_with(&self, other: &Self, cover_check: bool) -> Result<Inclusion, ConeError> {
        if self.dim != other.dim {
            return Err(ConeError::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        if !self.covered_by(other, cover_check)? {
            return Ok(Inclusion::Neither);
        }
        if other.covered_by(self, cover_check)? {
            Ok(Inclusion::Equal)
        } else {
            Ok(Inclusion::Subset)
        }
    }

    /// `self ⊆ other` as a boolean.
    pub fn is_subset_of(&self, other: &Self) -> Result<bool, ConeError> {
        self.covered_by(other, true)
    }

    pub fn equals(&self, other: &Self) -> Result<bool, ConeError> {
        Ok(self.subset_eq(other)? == Inclusion::Equal)
    }

    fn covered_by(&self, other: &Self, cover_check: bool) -> Result<bool, ConeError> {
        for a in &self.branches {
            if other.branches.iter().any(|b| a.vectors_in(b)) {
                continue;
            }
            let mut vecs: Vec<Vec<f64>> = a.generators.clone();
            for l in &a.lineality {
                vecs.push(l.clone());
                vecs.push(l.iter().map(|x| -x).collect());
            }
            if vecs.iter().any(|v| !other.contains(v, EQUALITY_TOL)) {
                return Ok(false);
            }
            if !cover_check {
                return Err(ConeError::InconclusiveCover);
            }
            if !branch_covered(a, &other.branches) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Exact cover test: is the convex cone `a` contained in `∪ bs`?
///
/// A point of `a` outside the union violates one row of every `b`. The search
/// fixes one violated row per target branch and asks an LP for a point of `a`
/// with positive slack on all chosen rows.
fn branch_covered(a: &ConvexCone, bs: &[ConvexCone]) -> bool {
    let mut base: Vec<(Vec<f64>, Rel)> = Vec::new();
    for r in &a.ineq_normals {
        base.push((r.clone(), Rel::Le));
    }
    for r in &a.eq_normals {
        base.push((r.clone(), Rel::Eq));
    }
    let options: Vec<Vec<Vec<f64>>> = bs
        .iter()
        .map(|b| {
            let mut o: Vec<Vec<f64>> = b.ineq_normals.iter().map(|r| r.iter().map(|x| -x).collect()).collect();
            for r in &b.eq_normals {
                o.push(r.iter().map(|x| -x).collect());
                o.push(r.clone());
            }
            o
        })
        .collect();
    let mut chosen: Vec<Vec<f64>> = Vec::new();
    !witness_exists(a.dim, &base, &options, 0, &mut chosen)
}

fn witness_exists(
    dim: usize,
    base: &[(Vec<f64>, Rel)],
    options: &[Vec<Vec<f64>>],
    depth: usize,
    chosen: &mut Vec<Vec<f64>>,
) -> bool {
    let margin = {
        let mut rows: Vec<(&[f64], Rel)> = base.iter().map(|(r, rel)| (r.as_slice(), *rel)).collect();
        rows.extend(chosen.iter().map(|r| (r.as_slice(), Rel::Lt)));
        strict_margin(dim, &rows)
    };
    if margin <= EQUALITY_TOL {
        return false;
    }
    if depth == options.len() {
        return true;
    }
    for row in &options[depth] {
        chosen.push(row.clone());
        let found = witness_exists(dim, base, options, depth + 1, chosen);
        chosen.pop();
        if found {
            return true;
        }
    }
    false
}
