//! Floating-point double description: H-representation to V-representation
//! by incremental constraint insertion.
//!
//! Rays are kept unit length and orthogonal to the current lineality space,
//! whose basis is kept orthonormal. Adjacency of a positive/negative ray pair
//! is decided combinatorially on zero sets, which is exact as long as the ray
//! set stays minimal (duplicates are merged after every insertion).

use super::{ConeError, MAX_DIM};
use crate::vecops::{axpy, dist, dot, normalized};

/// Classification tolerance for unit rays against unit constraint rows.
pub(crate) const DD_TOL: f64 = 1e-9;
const VERIFY_TOL: f64 = 1e-7;

struct Ray {
    v: Vec<f64>,
    zero: Vec<bool>,
}

/// Generators `(rays, lineality)` of `{x : a·x <= 0 ∀a ∈ ineq, b·x = 0 ∀b ∈ eq}`.
pub(crate) fn h_to_v(
    dim: usize,
    ineq: &[Vec<f64>],
    eq: &[Vec<f64>],
) -> Result<(Vec<Vec<f64>>, Vec<Vec<f64>>), ConeError> {
    if dim > MAX_DIM {
        return Err(ConeError::DimensionTooLarge { dim, cap: MAX_DIM });
    }
    let mut rows: Vec<(Vec<f64>, bool)> = Vec::with_capacity(ineq.len() + eq.len());
    for (src, is_eq) in eq.iter().map(|r| (r, true)).chain(ineq.iter().map(|r| (r, false))) {
        if src.len() != dim {
            return Err(ConeError::DimensionMismatch {
                expected: dim,
                found: src.len(),
            });
        }
        if let Some(a) = normalized(src, 1e-14) {
            let dup = rows.iter().any(|(b, b_eq)| *b_eq == is_eq && dist(&a, b) < DD_TOL);
            if !dup {
                rows.push((a, is_eq));
            }
        }
    }

    let mut lin: Vec<Vec<f64>> = (0..dim).map(|i| crate::vecops::unit(dim, i)).collect();
    let mut rays: Vec<Ray> = Vec::new();

    for (k, (a, is_eq)) in rows.iter().enumerate() {
        // Constraint cuts the lineality space: pivot on the best-aligned vector.
        let pivot = lin
            .iter()
            .enumerate()
            .map(|(i, l)| (i, dot(a, l)))
            .max_by(|x, y| x.1.abs().total_cmp(&y.1.abs()));
        if let Some((pi, s0)) = pivot.filter(|(_, s)| s.abs() > DD_TOL) {
            let l0 = lin.remove(pi);
            for l in lin.iter_mut() {
                let c = dot(a, l) / s0;
                axpy(-c, &l0, l);
            }
            lin = orthonormalize(lin);
            for r in rays.iter_mut() {
                let c = dot(a, &r.v) / s0;
                axpy(-c, &l0, &mut r.v);
                r.zero.push(true);
            }
            if !is_eq {
                let mut zero = vec![true; k];
                zero.push(false);
                rays.push(Ray {
                    v: crate::vecops::scaled(-s0.signum(), &l0),
                    zero,
                });
            }
            let mut next = Vec::with_capacity(rays.len());
            for mut r in rays {
                project_out(&lin, &mut r.v);
                if let Some(v) = normalized(&r.v, 1e-12) {
                    r.v = v;
                    next.push(r);
                }
            }
            rays = dedup(next);
            continue;
        }

        let vals: Vec<f64> = rays.iter().map(|r| dot(a, &r.v)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&i| vals[i] > DD_TOL).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&i| vals[i] < -DD_TOL).collect();
        if pos.is_empty() && (!is_eq || neg.is_empty()) {
            for (r, v) in rays.iter_mut().zip(&vals) {
                r.zero.push(v.abs() <= DD_TOL);
            }
            continue;
        }

        let d_eff = dim - lin.len();
        let mut next: Vec<Ray> = Vec::new();
        for (i, r) in rays.iter().enumerate() {
            if vals[i].abs() <= DD_TOL || (!is_eq && vals[i] < 0.0) {
                let mut zero = r.zero.clone();
                zero.push(vals[i].abs() <= DD_TOL);
                next.push(Ray { v: r.v.clone(), zero });
            }
        }
        for &p in &pos {
            for &n in &neg {
                if !adjacent(&rays, p, n, d_eff) {
                    continue;
                }
                let (vp, vn) = (vals[p], vals[n]);
                let mut v = crate::vecops::scaled(vp, &rays[n].v);
                axpy(-vn, &rays[p].v, &mut v);
                project_out(&lin, &mut v);
                let v = normalized(&v, 1e-14)
                    .ok_or_else(|| ConeError::NumericallyDegenerate("cancellation while combining rays".into()))?;
                let mut zero: Vec<bool> = rays[p].zero.iter().zip(&rays[n].zero).map(|(x, y)| *x && *y).collect();
                zero.push(true);
                next.push(Ray { v, zero });
            }
        }
        rays = dedup(next);
    }

    let gens: Vec<Vec<f64>> = rays.into_iter().map(|r| r.v).collect();
    for (a, is_eq) in &rows {
        for g in &gens {
            let s = dot(a, g);
            if s > VERIFY_TOL || (*is_eq && s < -VERIFY_TOL) {
                return Err(ConeError::NumericallyDegenerate(format!(
                    "generator violates a constraint by {s:e}"
                )));
            }
        }
        for l in &lin {
            if dot(a, l).abs() > VERIFY_TOL {
                return Err(ConeError::NumericallyDegenerate(
                    "lineality vector leaves the cone".into(),
                ));
            }
        }
    }
    Ok((gens, lin))
}

fn adjacent(rays: &[Ray], p: usize, n: usize, d_eff: usize) -> bool {
    let common: Vec<bool> = rays[p].zero.iter().zip(&rays[n].zero).map(|(x, y)| *x && *y).collect();
    if common.iter().filter(|x| **x).count() + 2 < d_eff {
        return false;
    }
    !rays
        .iter()
        .enumerate()
        .any(|(i, r)| i != p && i != n && common.iter().zip(&r.zero).all(|(c, z)| !*c || *z))
}

fn dedup(rays: Vec<Ray>) -> Vec<Ray> {
    let mut out: Vec<Ray> = Vec::with_capacity(rays.len());
    for r in rays {
        if let Some(existing) = out.iter_mut().find(|o| dist(&o.v, &r.v) < 1e-9) {
            for (z, rz) in existing.zero.iter_mut().zip(&r.zero) {
                *z = *z && *rz;
            }
        } else {
            out.push(r);
        }
    }
    out
}

/// Modified Gram–Schmidt; drops vectors that become numerically dependent.
pub(crate) fn orthonormalize(vs: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(vs.len());
    for mut v in vs {
        for _ in 0..2 {
            for q in &out {
                let c = dot(q, &v);
                axpy(-c, q, &mut v);
            }
        }
        if let Some(u) = normalized(&v, 1e-10) {
            out.push(u);
        }
    }
    out
}

/// Removes the components of `v` along the orthonormal basis `basis`.
pub(crate) fn project_out(basis: &[Vec<f64>], v: &mut [f64]) {
    for q in basis {
        let c = dot(q, v);
        axpy(-c, q, v);
    }
}

/// Vertices of the polytope `{x : a·x <= a0, b·x = b0}` via homogenization.
/// Unbounded directions are ignored.
pub fn polytope_vertices(
    dim: usize,
    ineq: &[(Vec<f64>, f64)],
    eq: &[(Vec<f64>, f64)],
) -> Result<Vec<Vec<f64>>, ConeError> {
    let lift = |a: &[f64], rhs: f64| {
        let mut r = a.to_vec();
        r.push(-rhs);
        r
    };
    let mut h: Vec<Vec<f64>> = ineq.iter().map(|(a, r)| lift(a, *r)).collect();
    let mut t_nonneg = vec![0.0; dim + 1];
    t_nonneg[dim] = -1.0;
    h.push(t_nonneg);
    let e: Vec<Vec<f64>> = eq.iter().map(|(b, r)| lift(b, *r)).collect();
    let (gens, _lin) = h_to_v(dim + 1, &h, &e)?;
    let mut verts = Vec::new();
    for g in gens {
        let t = g[dim];
        if t > DD_TOL {
            verts.push(g[..dim].iter().map(|x| x / t).collect());
        }
    }
    Ok(verts)
}
