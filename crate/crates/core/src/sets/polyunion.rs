//! Finite unions of convex polyhedra and their cones.
//!
//! The limiting normal cone is computed from the local structure: near a
//! member `z` the set coincides with `z + T`, `T` the union of the branch
//! tangent cones, and `N(z)` is the union of `N̂_T(d)` over directions `d`.
//! `N̂_T(d)` is constant on the relatively open cells of the hyperplane
//! arrangement spanned by all active rows, so enumerating the realizable
//! cells (each checked by an LP) gives the cone exactly.

use crate::lp::{polyhedron_feasible, strict_margin, Rel};
use crate::polycone::{polytope_vertices, ConeUnion, ConvexCone, EQUALITY_TOL};
use crate::vecops::{dist, dot, norm};

use super::{SetError, ACTIVE_TOL};

/// `{z : a·z <= a0 for (a, a0) ∈ ineq, b·z = b0 for (b, b0) ∈ eq}`
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Polyhedron {
    pub ineq: Vec<(Vec<f64>, f64)>,
    pub eq: Vec<(Vec<f64>, f64)>,
}

impl Polyhedron {
    pub fn contains(&self, z: &[f64], tol: f64) -> bool {
        self.ineq.iter().all(|(a, r)| dot(a, z) <= r + tol) && self.eq.iter().all(|(b, r)| (dot(b, z) - r).abs() <= tol)
    }

    pub fn is_empty(&self, dim: usize) -> bool {
        !polyhedron_feasible(dim, &self.ineq, &self.eq)
    }

    /// Vertices, assuming the polyhedron is bounded.
    pub fn vertices(&self, dim: usize) -> Result<Vec<Vec<f64>>, SetError> {
        Ok(polytope_vertices(dim, &self.ineq, &self.eq)?)
    }

    fn active_rows(&self, z: &[f64]) -> Vec<&Vec<f64>> {
        self.ineq
            .iter()
            .filter(|(a, r)| (dot(a, z) - r).abs() <= ACTIVE_TOL)
            .map(|(a, _)| a)
            .collect()
    }

    fn tangent(&self, dim: usize, z: &[f64]) -> Result<ConvexCone, SetError> {
        let ineq = self.active_rows(z).into_iter().cloned().collect();
        let eq = self.eq.iter().map(|(b, _)| b.clone()).collect();
        Ok(ConvexCone::from_h(dim, ineq, eq)?)
    }
}

/// Limits for the arrangement enumeration behind the limiting normal cone.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationCaps {
    pub max_dim: usize,
    pub max_branches: usize,
}

impl Default for EnumerationCaps {
    fn default() -> Self {
        EnumerationCaps {
            max_dim: 6,
            max_branches: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolyUnionSet {
    dim: usize,
    branches: Vec<Polyhedron>,
    caps: EnumerationCaps,
}

fn normalize_row(a: &[f64], r: f64) -> Option<(Vec<f64>, f64)> {
    let n = norm(a);
    (n > 1e-14).then(|| (a.iter().map(|x| x / n).collect(), r / n))
}

impl PolyUnionSet {
    /// Rows are rescaled to unit normals; a zero row is dropped when it holds
    /// trivially and makes its branch empty otherwise.
    pub fn new(dim: usize, branches: Vec<Polyhedron>) -> Result<Self, SetError> {
        if branches.is_empty() {
            return Err(SetError::Invalid("a union needs at least one branch".into()));
        }
        let mut out = Vec::with_capacity(branches.len());
        for b in branches {
            let mut p = Polyhedron::default();
            let mut empty = false;
            for (rows, target, is_eq) in [(&b.ineq, &mut p.ineq, false), (&b.eq, &mut p.eq, true)] {
                for (a, r) in rows {
                    if a.len() != dim {
                        return Err(SetError::Invalid(format!(
                            "row of length {} in dimension {dim}",
                            a.len()
                        )));
                    }
                    if a.iter().any(|x| !x.is_finite()) || !r.is_finite() {
                        return Err(SetError::Invalid("non-finite constraint entry".into()));
                    }
                    match normalize_row(a, *r) {
                        Some(row) => target.push(row),
                        None => empty |= if is_eq { r.abs() > 1e-12 } else { *r < -1e-12 },
                    }
                }
            }
            if empty {
                // 0 <= -1: unsatisfiable
                p.ineq.push((vec![0.0; dim], -1.0));
            }
            out.push(p);
        }
        Ok(PolyUnionSet {
            dim,
            branches: out,
            caps: EnumerationCaps::default(),
        })
    }

    pub fn with_caps(mut self, caps: EnumerationCaps) -> Self {
        self.caps = caps;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn branches(&self) -> &[Polyhedron] {
        &self.branches
    }

    pub fn caps(&self) -> EnumerationCaps {
        self.caps
    }

    pub fn member(&self, z: &[f64], tol: f64) -> bool {
        z.len() == self.dim && self.branches.iter().any(|b| b.contains(z, tol))
    }

    /// Pairwise branch intersections; empty pieces are dropped, and an empty
    /// result is an error.
    pub fn intersection(&self, other: &Self) -> Result<Self, SetError> {
        if self.dim != other.dim {
            return Err(SetError::Invalid(format!(
                "dimensions {} and {} differ",
                self.dim, other.dim
            )));
        }
        let mut out = Vec::new();
        for a in &self.branches {
            for b in &other.branches {
                let p = Polyhedron {
                    ineq: a.ineq.iter().chain(&b.ineq).cloned().collect(),
                    eq: a.eq.iter().chain(&b.eq).cloned().collect(),
                };
                if !p.is_empty(self.dim) {
                    out.push(p);
                }
            }
        }
        if out.is_empty() {
            return Err(SetError::Invalid("the intersection is empty".into()));
        }
        Ok(PolyUnionSet::new(self.dim, out)?.with_caps(self.caps))
    }

    /// Appends the same rows to every branch.
    pub fn restricted(&self, extra: &Polyhedron) -> Result<Self, SetError> {
        self.intersection(&Self::new(self.dim, vec![extra.clone()])?)
    }

    fn active(&self, z: &[f64]) -> Result<Vec<&Polyhedron>, SetError> {
        if z.len() != self.dim {
            return Err(SetError::NotAMember);
        }
        let act: Vec<&Polyhedron> = self.branches.iter().filter(|b| b.contains(z, ACTIVE_TOL)).collect();
        if act.is_empty() {
            Err(SetError::NotAMember)
        } else {
            Ok(act)
        }
    }

    pub fn tangent_cone(&self, z: &[f64]) -> Result<ConeUnion, SetError> {
        let cones = self
            .active(z)?
            .into_iter()
            .map(|b| b.tangent(self.dim, z))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ConeUnion::simplified(cones)?)
    }

    pub fn regular_normal_cone(&self, z: &[f64]) -> Result<ConvexCone, SetError> {
        Ok(self.tangent_cone(z)?.polar()?)
    }

    pub fn limiting_normal_cone(&self, z: &[f64]) -> Result<ConeUnion, SetError> {
        let act = self.active(z)?;
        if self.dim > self.caps.max_dim || self.branches.len() > self.caps.max_branches {
            return Err(SetError::EnumerationCapExceeded(format!(
                "dimension {} with {} branches (caps {} / {})",
                self.dim,
                self.branches.len(),
                self.caps.max_dim,
                self.caps.max_branches
            )));
        }
        // Distinct hyperplanes, and every branch row as (hyperplane, sign).
        let mut planes: Vec<Vec<f64>> = Vec::new();
        let mut locate = |a: &[f64]| -> (usize, f64) {
            for (k, h) in planes.iter().enumerate() {
                if dist(h, a) < 1e-9 {
                    return (k, 1.0);
                }
                if h.iter().zip(a).all(|(x, y)| (x + y).abs() < 1e-9) {
                    return (k, -1.0);
                }
            }
            planes.push(a.to_vec());
            (planes.len() - 1, 1.0)
        };
        let local: Vec<LocalBranch> = act
            .iter()
            .map(|b| LocalBranch {
                ineq: b.active_rows(z).into_iter().map(|a| (locate(a), a.clone())).collect(),
                eq: b.eq.iter().map(|(a, _)| (locate(a), a.clone())).collect(),
            })
            .collect();
        let mut search = CellSearch {
            dim: self.dim,
            planes: &planes,
            branches: &local,
            signs: Vec::with_capacity(planes.len()),
            found: Vec::new(),
        };
        search.run()?;
        Ok(ConeUnion::simplified(search.found)?)
    }
}

struct LocalBranch {
    ineq: Vec<((usize, f64), Vec<f64>)>,
    eq: Vec<((usize, f64), Vec<f64>)>,
}

impl LocalBranch {
    /// Could a direction with the (partial) sign vector lie in this tangent cone?
    fn admits(&self, signs: &[i8]) -> bool {
        let sign = |(k, s): (usize, f64)| signs.get(k).map(|&g| s * f64::from(g));
        self.ineq.iter().all(|(h, _)| sign(*h).is_none_or(|v| v <= 0.0))
            && self.eq.iter().all(|(h, _)| sign(*h).is_none_or(|v| v == 0.0))
    }

    /// Regular normal cone of this branch's tangent cone at a direction in the cell.
    fn normal(&self, dim: usize, signs: &[i8]) -> Result<ConvexCone, SetError> {
        let gens = self
            .ineq
            .iter()
            .filter(|((k, _), _)| signs[*k] == 0)
            .map(|(_, a)| a.clone())
            .collect();
        let lin = self.eq.iter().map(|(_, a)| a.clone()).collect();
        Ok(ConvexCone::from_v(dim, gens, lin)?)
    }
}

struct CellSearch<'a> {
    dim: usize,
    planes: &'a [Vec<f64>],
    branches: &'a [LocalBranch],
    signs: Vec<i8>,
    found: Vec<ConvexCone>,
}

impl CellSearch<'_> {
    fn run(&mut self) -> Result<(), SetError> {
        if !self.branches.iter().any(|b| b.admits(&self.signs)) {
            return Ok(());
        }
        if !self.realizable() {
            return Ok(());
        }
        if self.signs.len() == self.planes.len() {
            let mut cone: Option<ConvexCone> = None;
            for b in self.branches.iter().filter(|b| b.admits(&self.signs)) {
                let n = b.normal(self.dim, &self.signs)?;
                cone = Some(match cone {
                    None => n,
                    Some(c) => c.intersect(&n)?,
                });
            }
            if let Some(c) = cone {
                if !self.found.iter().any(|f| f == &c) {
                    self.found.push(c);
                }
            }
            return Ok(());
        }
        for s in [0i8, -1, 1] {
            self.signs.push(s);
            self.run()?;
            self.signs.pop();
        }
        Ok(())
    }

    fn realizable(&self) -> bool {
        let neg: Vec<Vec<f64>> = self.planes.iter().map(|h| h.iter().map(|x| -x).collect()).collect();
        let rows: Vec<(&[f64], Rel)> = self
            .signs
            .iter()
            .enumerate()
            .map(|(k, &s)| match s {
                0 => (self.planes[k].as_slice(), Rel::Eq),
                -1 => (self.planes[k].as_slice(), Rel::Lt),
                _ => (neg[k].as_slice(), Rel::Lt),
            })
            .collect();
        strict_margin(self.dim, &rows) > EQUALITY_TOL
    }
}

fn parse_row(words: &[&str], is_eq: bool, lineno: usize) -> Result<(Vec<f64>, f64), SetError> {
    let err = |m: &str| SetError::Parse(format!("line {lineno}: {m}"));
    let rel = words
        .iter()
        .position(|w| matches!(*w, "<=" | "≤" | "="))
        .ok_or_else(|| err("missing relation"))?;
    let ok_rel = if is_eq { words[rel] == "=" } else { words[rel] != "=" };
    if !ok_rel || rel + 2 != words.len() {
        return Err(err("expected 'coefficients <= rhs' or 'coefficients = rhs'"));
    }
    let num = |w: &str| -> Result<f64, SetError> {
        let x: f64 = w.parse().map_err(|_| err(&format!("bad number '{w}'")))?;
        if x.is_finite() {
            Ok(x)
        } else {
            Err(err("non-finite entry"))
        }
    };
    let a = words[..rel].iter().map(|w| num(w)).collect::<Result<Vec<_>, _>>()?;
    Ok((a, num(words[rel + 1])?))
}

/// Parses the text form:
///
/// ```text
/// DIM 2
/// BRANCH
/// INEQ -1 0 <= 0
/// EQ 1 -1 = 0
/// ```
pub fn parse_poly_union(src: &str) -> Result<PolyUnionSet, SetError> {
    let mut dim: Option<usize> = None;
    let mut branches: Vec<Polyhedron> = Vec::new();
    let mut open = false;
    for (i, raw) in src.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let words: Vec<&str> = line.split_whitespace().collect();
        match words[0].to_ascii_uppercase().as_str() {
            "DIM" => {
                dim = words.get(1).and_then(|w| w.parse().ok());
                if dim.is_none() {
                    return Err(SetError::Parse(format!("line {}: DIM needs an integer", i + 1)));
                }
            }
            "BRANCH" => {
                branches.push(Polyhedron::default());
                open = true;
            }
            kw @ ("INEQ" | "EQ") => {
                if !open {
                    branches.push(Polyhedron::default());
                    open = true;
                }
                let row = parse_row(&words[1..], kw == "EQ", i + 1)?;
                let d = *dim.get_or_insert(row.0.len());
                if row.0.len() != d {
                    return Err(SetError::Parse(format!(
                        "line {}: expected {d} coefficients, found {}",
                        i + 1,
                        row.0.len()
                    )));
                }
                let b = branches.last_mut().unwrap();
                if kw == "EQ" {
                    b.eq.push(row);
                } else {
                    b.ineq.push(row);
                }
            }
            other => return Err(SetError::Parse(format!("line {}: unknown keyword '{other}'", i + 1))),
        }
    }
    let dim = dim.ok_or_else(|| SetError::Parse("missing DIM".into()))?;
    PolyUnionSet::new(dim, branches)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polycone::{CoordKind, Inclusion};

    fn omega1() -> PolyUnionSet {
        parse_poly_union("DIM 2\nBRANCH\nINEQ -1 0 <= 0\nEQ 0 1 = 0\nBRANCH\nINEQ 0 -1 <= 0\nEQ 1 0 = 0\n").unwrap()
    }

    #[test]
    fn nonnegative_axes() {
        let s = omega1();
        assert!(s.member(&[0.0, 2.0], 1e-9));
        assert!(!s.member(&[1.0, 1.0], 1e-9));
        let n = s.regular_normal_cone(&[0.0, 0.0]).unwrap();
        assert!(n
            .equals(&ConvexCone::coordinate(&[CoordKind::Nonpos, CoordKind::Nonpos]))
            .unwrap());
        // limiting: R²₋ ∪ ({0}×R) ∪ (R×{0})
        let lim = s.limiting_normal_cone(&[0.0, 0.0]).unwrap();
        let expect = ConeUnion::new(vec![
            ConvexCone::coordinate(&[CoordKind::Nonpos, CoordKind::Nonpos]),
            ConvexCone::coordinate(&[CoordKind::Zero, CoordKind::Free]),
            ConvexCone::coordinate(&[CoordKind::Free, CoordKind::Zero]),
        ])
        .unwrap();
        assert_eq!(lim.subset_eq(&expect).unwrap(), Inclusion::Equal);
    }

    #[test]
    fn convex_branch_cones_coincide() {
        let s = parse_poly_union("INEQ 1 1 <= 1\nINEQ -1 0 <= 0\n").unwrap();
        let z = [0.0, 1.0];
        let reg: ConeUnion = s.regular_normal_cone(&z).unwrap().into();
        let lim = s.limiting_normal_cone(&z).unwrap();
        assert_eq!(reg.subset_eq(&lim).unwrap(), Inclusion::Equal);
    }

    #[test]
    fn caps_and_membership_errors() {
        let s = omega1();
        assert_eq!(s.tangent_cone(&[1.0, 1.0]), Err(SetError::NotAMember));
        let tight = s.with_caps(EnumerationCaps {
            max_dim: 1,
            max_branches: 10,
        });
        assert!(matches!(
            tight.limiting_normal_cone(&[0.0, 0.0]),
            Err(SetError::EnumerationCapExceeded(_))
        ));
    }

    #[test]
    fn parse_errors() {
        assert!(parse_poly_union("INEQ 1 0 = 0\n").is_err());
        assert!(parse_poly_union("DIM 2\nINEQ 1 <= 0\n").is_err());
        assert!(parse_poly_union("FOO\n").is_err());
    }
}
