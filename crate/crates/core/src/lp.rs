//! Thin wrapper over `microlp` for the two LP shapes the crate needs:
//! homogeneous margin maximization (strict cone inequalities) and plain
//! polyhedron feasibility.

use microlp::{ComparisonOp, OptimizationDirection, Problem, SolveOutcome};

/// A homogeneous linear condition on `v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rel {
    /// `a·v <= 0`
    Le,
    /// `a·v = 0`
    Eq,
    /// `a·v < 0`
    Lt,
}

/// Maximizes `t` subject to `v ∈ [-1,1]^dim`, `t <= 1` and, for every row,
/// `a·v <= 0`, `a·v = 0`, or `a·v + t <= 0` (for strict rows).
///
/// Returns the optimal margin. A strict system is realizable iff the margin
/// is positive (the system is homogeneous, so any positive slack can be
/// scaled into the box).
pub fn strict_margin(dim: usize, rows: &[(&[f64], Rel)]) -> f64 {
    if !rows.iter().any(|(_, r)| *r == Rel::Lt) {
        return 1.0;
    }
    let mut p = Problem::new(OptimizationDirection::Maximize);
    let vars: Vec<_> = (0..dim).map(|_| p.add_var(0.0, (-1.0, 1.0))).collect();
    let t = p.add_var(1.0, (-1.0, 1.0));
    for (a, rel) in rows {
        let mut terms: Vec<_> = vars
            .iter()
            .zip(a.iter())
            .filter(|(_, c)| **c != 0.0)
            .map(|(v, c)| (*v, *c))
            .collect();
        match rel {
            Rel::Le => p.add_constraint(&terms[..], ComparisonOp::Le, 0.0),
            Rel::Eq => p.add_constraint(&terms[..], ComparisonOp::Eq, 0.0),
            Rel::Lt => {
                terms.push((t, 1.0));
                p.add_constraint(&terms[..], ComparisonOp::Le, 0.0)
            }
        }
    }
    match p.solve() {
        Ok(SolveOutcome::Solution(sol)) => sol.var_value(t),
        // v = 0, t = 0 is always feasible; a solver failure is treated as "no margin".
        _ => 0.0,
    }
}

/// Checks whether `{x : A x <= a, B x = b}` is nonempty.
pub fn polyhedron_feasible(dim: usize, ineq: &[(Vec<f64>, f64)], eq: &[(Vec<f64>, f64)]) -> bool {
    let mut p = Problem::new(OptimizationDirection::Minimize);
    let vars: Vec<_> = (0..dim)
        .map(|_| p.add_var(0.0, (f64::NEG_INFINITY, f64::INFINITY)))
        .collect();
    let mut add = |row: &[f64], op: ComparisonOp, rhs: f64| {
        let terms: Vec<_> = vars
            .iter()
            .zip(row.iter())
            .filter(|(_, c)| **c != 0.0)
            .map(|(v, c)| (*v, *c))
            .collect();
        if terms.is_empty() {
            // 0 <= rhs / 0 = rhs handled by caller-visible infeasibility below
            return Some(match op {
                ComparisonOp::Le => rhs >= -1e-12,
                _ => rhs.abs() <= 1e-12,
            });
        }
        p.add_constraint(&terms[..], op, rhs);
        None
    };
    for (a, rhs) in ineq {
        if add(a, ComparisonOp::Le, *rhs) == Some(false) {
            return false;
        }
    }
    for (b, rhs) in eq {
        if add(b, ComparisonOp::Eq, *rhs) == Some(false) {
            return false;
        }
    }
    matches!(p.solve(), Ok(SolveOutcome::Solution(_)))
}
