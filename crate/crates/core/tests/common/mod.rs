#![allow(dead_code)]

use ivopt_core::polycone::Inclusion;
use ivopt_core::sets::{BoxSparsitySet, ComplementaritySet, EnumerationCaps, StructuredSet};

/// Structured sets with `n <= 4` paired with member points covering every
/// support/activity pattern on a small value grid.
pub fn cone_grid() -> Vec<(StructuredSet, Vec<Vec<f64>>)> {
    let mut out = Vec::new();
    for n in 2..=4usize {
        for kappa in 1..n {
            let boxes: Vec<(Vec<f64>, Vec<f64>, Vec<f64>)> = vec![
                (vec![0.0; n], vec![1.0; n], vec![0.0, 0.5, 1.0]),
                (vec![f64::NEG_INFINITY; n], vec![f64::INFINITY; n], vec![0.0, 0.5, -2.0]),
                (
                    (0..n).map(|i| if i % 2 == 0 { -1.0 } else { 0.0 }).collect(),
                    (0..n).map(|i| if i == 1 { 0.0 } else { 1.0 }).collect(),
                    vec![0.0, 1.0, -1.0, 0.3],
                ),
            ];
            for (lo, hi, values) in boxes {
                let set = BoxSparsitySet::new(kappa, lo, hi).unwrap();
                let pts: Vec<Vec<f64>> = grid(n, &values).into_iter().filter(|p| set.member(p, 1e-12)).collect();
                out.push((StructuredSet::BoxSparsity(set), pts));
            }
        }
        let set =
            ComplementaritySet::new((0..n).map(|i| if i == 0 { 0.0 } else { 1.0 }).collect(), vec![1.0; n]).unwrap();
        let pair_values: &[(f64, f64)] = if n <= 3 {
            &[(0.0, 0.0), (0.5, 0.0), (1.0, 0.0), (0.0, 0.5), (0.0, 1.0)]
        } else {
            &[(0.0, 0.0), (1.0, 0.0), (0.0, 0.5)]
        };
        let mut pts = Vec::new();
        for combo in grid(n, &(0..pair_values.len()).map(|i| i as f64).collect::<Vec<_>>()) {
            let mut w = vec![0.0; 2 * n];
            for (i, c) in combo.iter().enumerate() {
                let (z, l) = pair_values[*c as usize];
                w[i] = z;
                w[n + i] = l;
            }
            if set.member(&w, 1e-12) {
                pts.push(w);
            }
        }
        out.push((StructuredSet::Complementarity(set), pts));
    }
    out
}

fn grid(n: usize, values: &[f64]) -> Vec<Vec<f64>> {
    let mut pts = vec![vec![]];
    for _ in 0..n {
        let mut next = Vec::new();
        for p in &pts {
            for v in values {
                let mut q = p.clone();
                q.push(*v);
                next.push(q);
            }
        }
        pts = next;
    }
    pts
}

/// Checks closed-form cones against the generic union computation at every
/// grid point. Returns (points checked, first mismatch if any).
pub fn check_cone_grid() -> (usize, Option<String>) {
    let caps = EnumerationCaps {
        max_dim: 8,
        max_branches: 16,
    };
    let mut checked = 0;
    for (set, pts) in cone_grid() {
        let generic = StructuredSet::PolyUnion(set.to_poly_union().unwrap().with_caps(caps));
        for p in &pts {
            checked += 1;
            let t1 = set.tangent_cone(p).unwrap();
            let t2 = generic.tangent_cone(p).unwrap();
            let r1 = set.regular_normal_cone(p).unwrap();
            let r2 = generic.regular_normal_cone(p).unwrap();
            let l1 = set.limiting_normal_cone(p).unwrap();
            let l2 = generic.limiting_normal_cone(p).unwrap();
            let checks = [
                ("tangent", t1.subset_eq(&t2).unwrap()),
                (
                    "regular",
                    r1.equals(&r2)
                        .map(|e| if e { Inclusion::Equal } else { Inclusion::Neither })
                        .unwrap(),
                ),
                ("limiting", l1.subset_eq(&l2).unwrap()),
            ];
            for (name, verdict) in checks {
                if verdict != Inclusion::Equal {
                    return (checked, Some(format!("{name} cone differs for {set:?} at {p:?}")));
                }
            }
        }
    }
    (checked, None)
}
