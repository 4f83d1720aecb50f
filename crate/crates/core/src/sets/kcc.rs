//! The cardinality-complementarity map `K_cc(z) = {λ : e·λ >= n-κ, 0 <= λ <= e, z∘λ = 0}`
//! and the vanishing-constraint selection.

use crate::vecops::unit;

use super::{for_each_subset, PolyUnionSet, Polyhedron, SetError, SPARSITY_TOL};

fn box_and_budget(n: usize, kappa: usize, offset: usize, dim: usize) -> Polyhedron {
    let mut p = Polyhedron::default();
    let mut budget = vec![0.0; dim];
    for i in 0..n {
        let e = unit(dim, offset + i);
        p.ineq.push((e.iter().map(|x| -x).collect(), 0.0));
        p.ineq.push((e, 1.0));
        budget[offset + i] = -1.0;
    }
    p.ineq.push((budget, -((n - kappa) as f64)));
    p
}

/// `K_cc(z)` as a single polyhedron in `λ`-space. It is empty exactly when
/// `‖z‖₀ > κ`.
pub fn kcc_image(z: &[f64], kappa: usize) -> Result<PolyUnionSet, SetError> {
    let n = z.len();
    if kappa > n {
        return Err(SetError::Invalid(format!("kappa = {kappa} exceeds n = {n}")));
    }
    let mut p = box_and_budget(n, kappa, 0, n);
    for (i, zi) in z.iter().enumerate() {
        if zi.abs() > SPARSITY_TOL {
            p.eq.push((unit(n, i), 0.0));
        }
    }
    PolyUnionSet::new(n, vec![p])
}

/// Vertices of `K_cc(z)` (empty when the image is empty).
pub fn kcc_vertices(z: &[f64], kappa: usize) -> Result<Vec<Vec<f64>>, SetError> {
    let img = kcc_image(z, kappa)?;
    let p = &img.branches()[0];
    if p.is_empty(z.len()) {
        return Ok(Vec::new());
    }
    p.vertices(z.len())
}

/// `gph K_cc ⊂ R^n × R^n` as the union over index sets `I` (where `z_I = 0`)
/// of `{z_I = 0, λ_{I^c} = 0, 0 <= λ <= e, e·λ >= n-κ}`; index sets too
/// small to carry the budget are skipped.
pub fn kcc_graph(n: usize, kappa: usize) -> Result<PolyUnionSet, SetError> {
    if kappa == 0 || kappa >= n {
        return Err(SetError::Invalid(format!(
            "kappa = {kappa} outside [1, {}]",
            n.saturating_sub(1)
        )));
    }
    let d = 2 * n;
    let all: Vec<usize> = (0..n).collect();
    let mut branches = Vec::new();
    for size in (n - kappa)..=n {
        for_each_subset(&all, size, &mut |zero_z| {
            let mut p = box_and_budget(n, kappa, n, d);
            for i in 0..n {
                if zero_z.contains(&i) {
                    p.eq.push((unit(d, i), 0.0));
                } else {
                    p.eq.push((unit(d, n + i), 0.0));
                }
            }
            branches.push(p);
        });
    }
    PolyUnionSet::new(d, branches)
}

/// `ψ(z) = max(G(z), 0)` taken entrywise.
pub fn kvc_selection(gz: &[f64]) -> Vec<f64> {
    gz.iter().map(|g| g.max(0.0)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn image_at_origin() {
        let img = kcc_image(&[0.0, 0.0], 1).unwrap();
        assert!(img.member(&[1.0, 0.0], 1e-9));
        assert!(img.member(&[0.5, 0.5], 1e-9));
        assert!(!img.member(&[0.4, 0.5], 1e-9));
        let mut v = kcc_vertices(&[0.0, 0.0], 1).unwrap();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(v.len(), 3);
    }

    #[test]
    fn singleton_and_empty_images() {
        let v = kcc_vertices(&[0.0, 2.0, 0.0], 1).unwrap();
        assert_eq!(v.len(), 1);
        assert!(v[0].iter().zip([1.0, 0.0, 1.0]).all(|(a, b)| (a - b).abs() < 1e-9));
        let img = kcc_image(&[1.0, 2.0, 0.0], 1).unwrap();
        assert!(img.branches()[0].is_empty(3));
    }

    #[test]
    fn graph_branches() {
        let g = kcc_graph(2, 1).unwrap();
        assert_eq!(g.branches().len(), 3);
        assert!(g.member(&[0.0, 0.0, 0.5, 0.5], 1e-9));
        assert!(g.member(&[3.0, 0.0, 0.0, 1.0], 1e-9));
        assert!(!g.member(&[3.0, 1.0, 0.0, 1.0], 1e-9));
    }

    #[test]
    fn selection() {
        assert_eq!(kvc_selection(&[-1.0, 2.0]), vec![0.0, 2.0]);
    }
}
