//! Cardinality-constrained mean-variance portfolios
//! `min ½zᵀQz  s.t.  eᵀz = 1, cᵀz >= θ, 0 <= z <= u, ‖z‖₀ <= κ`
//! and the reformulation with the complementarity slack `λ`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::lp::polyhedron_feasible;
use crate::sets::{for_each_subset, BoxSparsitySet, ComplementaritySet};
use crate::solver::{alm_solve, AlmConfig, AlmResult, QuadraticProblem};
use crate::vecops::dot;

use super::ModelError;

pub const SYMMETRY_TOL: f64 = 1e-8;
pub const PSD_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct PortfolioInstance {
    pub name: String,
    pub n: usize,
    /// Covariance, dense and row-major.
    pub q: Vec<Vec<f64>>,
    pub c: Vec<f64>,
    pub u: Vec<f64>,
    pub theta: f64,
    pub kappa: usize,
}

impl PortfolioInstance {
    /// Builds and validates.
    pub fn new(
        name: impl Into<String>,
        q: Vec<Vec<f64>>,
        c: Vec<f64>,
        u: Vec<f64>,
        theta: f64,
        kappa: usize,
    ) -> Result<Self, ModelError> {
        let inst = PortfolioInstance {
            name: name.into(),
            n: c.len(),
            q,
            c,
            u,
            theta,
            kappa,
        };
        inst.validate()?;
        Ok(inst)
    }

    pub fn with_kappa(&self, kappa: usize) -> Result<Self, ModelError> {
        let mut out = self.clone();
        out.kappa = kappa;
        out.validate()?;
        Ok(out)
    }

    /// Checks shape, finiteness, symmetry, positive semidefiniteness, signs,
    /// `κ` and the greedy feasibility witness, naming the first failure.
    pub fn validate(&self) -> Result<(), ModelError> {
        self.validate_structure()?;
        self.feasibility_witness().map(|_| ())
    }

    /// Everything [`validate`](Self::validate) checks except feasibility.
    pub fn validate_structure(&self) -> Result<(), ModelError> {
        let n = self.n;
        let fail = |m: String| Err(ModelError::Validation(m));
        if n < 2 {
            return fail(format!("n = {n}; at least two assets are needed"));
        }
        if self.c.len() != n || self.u.len() != n || self.q.len() != n || self.q.iter().any(|r| r.len() != n) {
            return fail(format!("dimensions do not match n = {n}"));
        }
        let finite = self
            .q
            .iter()
            .flatten()
            .chain(&self.c)
            .chain(&self.u)
            .all(|x| x.is_finite());
        if !finite || !self.theta.is_finite() {
            return fail("non-finite entry".into());
        }
        for i in 0..n {
            for j in 0..i {
                if (self.q[i][j] - self.q[j][i]).abs() > SYMMETRY_TOL {
                    return fail(format!("Q is not symmetric at ({i}, {j})"));
                }
            }
        }
        let min_eig = self.min_eigenvalue();
        if min_eig < -PSD_TOL {
            return fail(format!(
                "Q is not positive semidefinite (smallest eigenvalue {min_eig:e})"
            ));
        }
        if let Some(i) = self.c.iter().position(|x| *x < 0.0) {
            return fail(format!("c[{i}] is negative"));
        }
        if let Some(i) = self.u.iter().position(|x| *x < 0.0) {
            return fail(format!("u[{i}] is negative"));
        }
        if self.theta <= 0.0 {
            return fail(format!("theta = {} must be positive", self.theta));
        }
        if self.kappa == 0 || self.kappa >= n {
            return fail(format!("kappa = {} outside [1, {}]", self.kappa, n - 1));
        }
        Ok(())
    }

    /// The greedy point, when it reaches `θ`.
    pub fn feasibility_witness(&self) -> Result<Vec<f64>, ModelError> {
        match greedy_best_return(&self.c, &self.u, self.kappa) {
            Some((z, r)) if r >= self.theta - 1e-12 => Ok(z),
            Some((_, r)) => Err(ModelError::InfeasibleInstance(format!(
                "greedy witness reaches return {r}, below theta = {}",
                self.theta
            ))),
            None => Err(ModelError::InfeasibleInstance(format!(
                "the {} largest returns cannot hold a full budget under u",
                self.kappa
            ))),
        }
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let m = DMatrix::from_fn(self.n, self.n, |i, j| 0.5 * (self.q[i][j] + self.q[j][i]));
        m.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn objective(&self, z: &[f64]) -> f64 {
        0.5 * self.q.iter().zip(z).map(|(row, zi)| zi * dot(row, z)).sum::<f64>()
    }

    /// Feasible for the cardinality model within `tol`.
    pub fn feasible(&self, z: &[f64], tol: f64) -> bool {
        let sum: f64 = z.iter().sum();
        (sum - 1.0).abs() <= tol
            && dot(&self.c, z) >= self.theta - tol
            && z.iter().zip(&self.u).all(|(zi, ui)| *zi >= -tol && *zi <= ui + tol)
            && z.iter().filter(|zi| zi.abs() > crate::sets::SPARSITY_TOL).count() <= self.kappa
    }
}

/// Fills the budget over the `κ` assets with the largest returns, each up
/// to its bound. `None` when those bounds add up to less than one.
pub fn greedy_best_return(c: &[f64], u: &[f64], kappa: usize) -> Option<(Vec<f64>, f64)> {
    let mut order: Vec<usize> = (0..c.len()).collect();
    order.sort_by(|&a, &b| c[b].total_cmp(&c[a]).then(a.cmp(&b)));
    let mut z = vec![0.0; c.len()];
    let mut left = 1.0;
    for &i in order.iter().take(kappa) {
        let t = u[i].min(left);
        z[i] = t;
        left -= t;
    }
    (left <= 1e-12).then(|| {
        let r = dot(c, &z);
        (z, r)
    })
}

/// Two uncorrelated unit-variance assets with equal returns, `θ = ½`,
/// `κ = 1`. The optimum ½ sits at either unit vector.
pub fn portfolio_toy() -> PortfolioInstance {
    PortfolioInstance::new(
        "toy",
        vec![vec![1.0, 0.0], vec![0.0, 1.0]],
        vec![1.0, 1.0],
        vec![1.0, 1.0],
        0.5,
        1,
    )
    .expect("toy instance is valid")
}

/// The cardinality model over `D = {‖z‖₀ <= κ, 0 <= z <= u}`, started at 0.
pub fn build_pop(inst: &PortfolioInstance) -> Result<(QuadraticProblem<BoxSparsitySet>, Vec<f64>), ModelError> {
    inst.validate_structure()?;
    let n = inst.n;
    let neg_c: Vec<f64> = inst.c.iter().map(|x| -x).collect();
    let problem = QuadraticProblem {
        q_mat: inst.q.clone(),
        q_lin: vec![0.0; n],
        constant: 0.0,
        ineq_rows: vec![(neg_c, -inst.theta)],
        eq_rows: vec![(vec![1.0; n], 1.0)],
        domain: BoxSparsitySet::with_upper(inst.kappa, inst.u.clone())?,
    };
    Ok((problem, vec![0.0; n]))
}

/// The reformulation in `(z, λ)` over the complementarity set, started at
/// `z = 0`, `λ_i = 1` for the first `n - κ` entries and 0 after.
pub fn build_pop_ref(inst: &PortfolioInstance) -> Result<(QuadraticProblem<ComplementaritySet>, Vec<f64>), ModelError> {
    inst.validate_structure()?;
    let n = inst.n;
    let mut q_mat = vec![vec![0.0; 2 * n]; 2 * n];
    for i in 0..n {
        q_mat[i][..n].copy_from_slice(&inst.q[i]);
    }
    let mut ret = vec![0.0; 2 * n];
    let mut budget = vec![0.0; 2 * n];
    let mut sum = vec![0.0; 2 * n];
    for i in 0..n {
        ret[i] = -inst.c[i];
        budget[n + i] = -1.0;
        sum[i] = 1.0;
    }
    let problem = QuadraticProblem {
        q_mat,
        q_lin: vec![0.0; 2 * n],
        constant: 0.0,
        ineq_rows: vec![(ret, -inst.theta), (budget, -((n - inst.kappa) as f64))],
        eq_rows: vec![(sum, 1.0)],
        domain: ComplementaritySet::with_upper(inst.u.clone())?,
    };
    let mut w0 = vec![0.0; 2 * n];
    for l in w0.iter_mut().skip(n).take(n - inst.kappa) {
        *l = 1.0;
    }
    Ok((problem, w0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PortfolioModel {
    /// `z ∈ D` with the cardinality set.
    Implicit,
    /// `(z, λ)` over the complementarity set.
    Explicit,
}

impl std::fmt::Display for PortfolioModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PortfolioModel::Implicit => "implicit",
            PortfolioModel::Explicit => "explicit",
        })
    }
}

impl std::str::FromStr for PortfolioModel {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "implicit" => Ok(PortfolioModel::Implicit),
            "explicit" => Ok(PortfolioModel::Explicit),
            _ => Err(format!("unknown model '{s}' (implicit or explicit)")),
        }
    }
}

/// An ALM run on one of the two models, with `z` cut out of `w`.
#[derive(Debug, Clone)]
pub struct PortfolioRun {
    pub z: Vec<f64>,
    pub objective: f64,
    pub result: AlmResult,
}

pub fn solve_portfolio(
    inst: &PortfolioInstance,
    model: PortfolioModel,
    cfg: &AlmConfig,
) -> Result<PortfolioRun, ModelError> {
    let result = match model {
        PortfolioModel::Implicit => {
            let (p, w0) = build_pop(inst)?;
            alm_solve(&p, &w0, cfg)
        }
        PortfolioModel::Explicit => {
            let (p, w0) = build_pop_ref(inst)?;
            alm_solve(&p, &w0, cfg)
        }
    };
    let z = result.w[..inst.n].to_vec();
    Ok(PortfolioRun {
        objective: inst.objective(&z),
        z,
        result,
    })
}

/// Global minimum of the convex QP restricted to `support` (other entries
/// fixed at 0): every face of the feasible polytope is tried, each face
/// minimizer comes from its KKT system, and the best feasible one wins.
pub fn support_qp(inst: &PortfolioInstance, support: &[usize]) -> Option<(f64, Vec<f64>)> {
    let k = support.len();
    let mut best: Option<(f64, Vec<f64>)> = None;
    // per variable: 0 free, 1 at zero, 2 at upper
    let mut state = vec![0u8; k];
    loop {
        for return_active in [false, true] {
            if let Some(z) = face_point(inst, support, &state, return_active) {
                if inst.feasible(&z, 1e-9) {
                    let v = inst.objective(&z);
                    if best.as_ref().is_none_or(|(b, _)| v < *b) {
                        best = Some((v, z));
                    }
                }
            }
        }
        // next state in base 3
        let mut i = 0;
        while i < k && state[i] == 2 {
            state[i] = 0;
            i += 1;
        }
        if i == k {
            break;
        }
        state[i] += 1;
    }
    best
}

fn face_point(inst: &PortfolioInstance, support: &[usize], state: &[u8], return_active: bool) -> Option<Vec<f64>> {
    let n = inst.n;
    let mut z = vec![0.0; n];
    let mut free = Vec::new();
    for (&i, &s) in support.iter().zip(state) {
        match s {
            0 => free.push(i),
            2 => z[i] = inst.u[i],
            _ => {}
        }
    }
    let mut rows: Vec<(Vec<f64>, f64)> = vec![(vec![1.0; n], 1.0)];
    if return_active {
        rows.push((inst.c.clone(), inst.theta));
    }
    let f = free.len();
    let r = rows.len();
    let mut kkt = DMatrix::<f64>::zeros(f + r, f + r);
    let mut rhs = DVector::<f64>::zeros(f + r);
    for (a, &i) in free.iter().enumerate() {
        for (b, &j) in free.iter().enumerate() {
            kkt[(a, b)] = inst.q[i][j];
        }
        rhs[a] = -dot(&inst.q[i], &z);
        for (t, (row, _)) in rows.iter().enumerate() {
            kkt[(a, f + t)] = row[i];
            kkt[(f + t, a)] = row[i];
        }
    }
    for (t, (row, b)) in rows.iter().enumerate() {
        rhs[f + t] = b - dot(row, &z);
    }
    if f == 0 {
        // a vertex: the fixed entries must already satisfy the rows
        return rows
            .iter()
            .all(|(row, b)| (dot(row, &z) - b).abs() <= 1e-9)
            .then_some(z);
    }
    let sol = kkt.clone().lu().solve(&rhs)?;
    if (&kkt * &sol - &rhs).amax() > 1e-8 {
        return None;
    }
    for (a, &i) in free.iter().enumerate() {
        z[i] = sol[a];
    }
    Some(z)
}

/// Global optimum of the cardinality model by enumerating all supports of
/// size `κ`. `None` when no support is feasible.
pub fn brute_force_pop(inst: &PortfolioInstance) -> Option<(f64, Vec<f64>)> {
    let all: Vec<usize> = (0..inst.n).collect();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for_each_subset(&all, inst.kappa, &mut |s| {
        if let Some((v, z)) = support_qp(inst, s) {
            if best.as_ref().is_none_or(|(b, _)| v < *b) {
                best = Some((v, z));
            }
        }
    });
    best
}

/// Global optimum of the reformulation by enumerating its `2^n` convex
/// branches: in branch `S`, `λ_S = 0` and `z_{S^c} = 0`. The branch is
/// kept when an LP finds `λ` with `0 <= λ <= e`, `eᵀλ >= n - κ`; the `z`
/// part is then the support QP on `S`. Returns the value and `(z, λ)`.
pub fn brute_force_pop_ref(inst: &PortfolioInstance) -> Option<(f64, Vec<f64>)> {
    let n = inst.n;
    assert!(n < 25, "branch enumeration is exponential");
    let mut best: Option<(f64, Vec<f64>)> = None;
    for mask in 0u32..(1u32 << n) {
        let support: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let mut ineq = Vec::new();
        let mut eq = Vec::new();
        for i in 0..n {
            let e: Vec<f64> = (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect();
            if support.contains(&i) {
                eq.push((e, 0.0));
            } else {
                ineq.push((e.iter().map(|x| -x).collect(), 0.0));
                ineq.push((e, 1.0));
            }
        }
        ineq.push((vec![-1.0; n], -((n - inst.kappa) as f64)));
        if !polyhedron_feasible(n, &ineq, &eq) {
            continue;
        }
        let relaxed = PortfolioInstance {
            kappa: n,
            ..inst.clone()
        };
        if let Some((v, z)) = support_qp(&relaxed, &support) {
            if best.as_ref().is_none_or(|(b, _)| v < *b) {
                let mut w = z;
                w.extend((0..n).map(|i| if support.contains(&i) { 0.0 } else { 1.0 }));
                best = Some((v, w));
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::NlpProblem;

    fn toy() -> PortfolioInstance {
        portfolio_toy()
    }

    #[test]
    fn validation_failures() {
        let t = toy();
        let mut bad = t.clone();
        bad.q[0][1] = 0.5;
        assert!(matches!(bad.validate(), Err(ModelError::Validation(m)) if m.contains("symmetric")));
        let mut bad = t.clone();
        bad.q = vec![vec![1.0, 2.0], vec![2.0, 1.0]];
        assert!(matches!(bad.validate(), Err(ModelError::Validation(m)) if m.contains("semidefinite")));
        let mut bad = t.clone();
        bad.theta = 2.0;
        assert!(matches!(bad.validate(), Err(ModelError::InfeasibleInstance(_))));
        assert!(t.with_kappa(2).is_err());
        let mut bad = t.clone();
        bad.c[0] = f64::NAN;
        assert!(bad.validate().is_err());
    }

    #[test]
    fn toy_start_points() {
        let t = toy();
        let (p, w0) = build_pop(&t).unwrap();
        assert_eq!(w0, vec![0.0, 0.0]);
        assert_eq!(p.ineq(&w0), vec![0.5]);
        assert_eq!(p.eq(&w0), vec![-1.0]);
        assert!(!p.domain.member(&[0.5, 0.5], 1e-9));
        let (r, w0) = build_pop_ref(&t).unwrap();
        assert_eq!(w0, vec![0.0, 0.0, 1.0, 0.0]);
        assert!(r.domain.member(&w0, 0.0));
        assert_eq!(r.ineq(&w0)[1], 0.0);
    }

    #[test]
    fn toy_global_optimum() {
        let t = toy();
        let (v, z) = brute_force_pop(&t).unwrap();
        assert!((v - 0.5).abs() < 1e-12);
        assert!(z == vec![1.0, 0.0] || z == vec![0.0, 1.0]);
        let (v2, w) = brute_force_pop_ref(&t).unwrap();
        assert!((v2 - 0.5).abs() < 1e-12);
        assert!((w[0] - 1.0).abs() < 1e-12 || (w[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn face_enumeration_matches_dense_scan() {
        // two assets, full support, κ irrelevant: scan z = (t, 1-t)
        let inst = PortfolioInstance {
            name: "scan".into(),
            n: 2,
            q: vec![vec![2.0, 0.3], vec![0.3, 0.5]],
            c: vec![0.2, 0.9],
            u: vec![0.8, 0.7],
            theta: 0.4,
            kappa: 2,
        };
        let (v, _) = support_qp(&inst, &[0, 1]).unwrap();
        let mut scan = f64::INFINITY;
        for k in 0..=100_000 {
            let t = k as f64 / 100_000.0;
            let z = [t, 1.0 - t];
            if inst.feasible(&z, 0.0) {
                scan = scan.min(inst.objective(&z));
            }
        }
        assert!(v <= scan + 1e-12 && scan - v < 1e-6, "{v} vs {scan}");
    }
}
