use std::io::Write;

use serde::{Deserialize, Serialize};

use super::pg::{pg_solve, PgConfig, PgStatus};
use super::NlpProblem;
use crate::vecops::{axpy, norm};

/// A scalar applied to every component, or one value per component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Bound {
    Uniform(f64),
    PerComponent(Vec<f64>),
}

impl Bound {
    pub fn at(&self, i: usize) -> f64 {
        match self {
            Bound::Uniform(x) => *x,
            Bound::PerComponent(v) => v[i],
        }
    }
}

/// Inner tolerances `ε_1, ε_2, …`.
#[derive(Debug, Clone, PartialEq)]
pub enum EpsSchedule {
    Constant(f64),
    /// `max(first · factor^k, floor)`
    Geometric {
        first: f64,
        factor: f64,
        floor: f64,
    },
}

impl EpsSchedule {
    /// `ε_{k+1}` for outer iteration `k` (starting at 0).
    pub fn at(&self, k: usize) -> f64 {
        match self {
            EpsSchedule::Constant(e) => *e,
            EpsSchedule::Geometric { first, factor, floor } => (first * factor.powi(k as i32)).max(*floor),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlmConfig {
    pub rho0: f64,
    pub beta: f64,
    pub tau: f64,
    pub a_max: Bound,
    pub b_min: Bound,
    pub b_max: Bound,
    pub eps_tol: f64,
    pub inner_eps: EpsSchedule,
    pub max_outer: usize,
    pub max_inner_total: usize,
    pub min_inverse_stepsize: f64,
    pub max_penalty: f64,
    pub pg: PgConfig,
}

impl Default for AlmConfig {
    fn default() -> Self {
        AlmConfig {
            rho0: 1.0,
            beta: 10.0,
            tau: 0.9,
            a_max: Bound::Uniform(1e20),
            b_min: Bound::Uniform(-1e20),
            b_max: Bound::Uniform(1e20),
            eps_tol: 1e-4,
            inner_eps: EpsSchedule::Constant(1e-6),
            max_outer: 200,
            max_inner_total: 100_000,
            min_inverse_stepsize: 1e-20,
            max_penalty: 1e18,
            pg: PgConfig::default(),
        }
    }
}

impl AlmConfig {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.rho0 > 0.0) {
            return Err("rho0 must be positive".into());
        }
        if !(self.beta > 1.0) {
            return Err("beta must exceed 1".into());
        }
        if !(self.tau > 0.0 && self.tau < 1.0) {
            return Err("tau must lie in (0, 1)".into());
        }
        if !(self.eps_tol > 0.0) {
            return Err("eps_tol must be positive".into());
        }
        if self.max_outer == 0 || self.max_inner_total == 0 || !(self.max_penalty > 0.0) {
            return Err("caps must be positive".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Termination {
    Converged,
    OuterCap,
    InnerCap,
    StepsizeFloor,
    PenaltyCap,
}

impl std::fmt::Display for Termination {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Termination::Converged => "Converged",
            Termination::OuterCap => "OuterCap",
            Termination::InnerCap => "InnerCap",
            Termination::StepsizeFloor => "StepsizeFloor",
            Termination::PenaltyCap => "PenaltyCap",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for Termination {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "Converged" => Termination::Converged,
            "OuterCap" => Termination::OuterCap,
            "InnerCap" => Termination::InnerCap,
            "StepsizeFloor" => Termination::StepsizeFloor,
            "PenaltyCap" => Termination::PenaltyCap,
            _ => return Err(format!("unknown termination reason '{s}'")),
        })
    }
}

/// One outer iteration: the penalty used, the resulting violation, the
/// inner iteration count, the final subproblem value and the iterate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlmTraceRow {
    pub k: usize,
    pub rho: f64,
    pub v: f64,
    pub inner_iters: usize,
    pub l_value: f64,
    pub min_mu: f64,
    pub w: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlmResult {
    pub w: Vec<f64>,
    pub mu: Vec<f64>,
    pub nu: Vec<f64>,
    /// Penalty after the last update.
    pub rho: f64,
    pub violation: f64,
    pub outer_iters: usize,
    pub inner_iters: usize,
    pub reason: Termination,
    pub last_inner_residual: f64,
    pub trace: Vec<AlmTraceRow>,
}

fn ineq_shift(problem: &dyn NlpProblem, w: &[f64], mu: &[f64], rho: f64) -> Vec<f64> {
    problem
        .ineq(w)
        .iter()
        .zip(mu)
        .map(|(g, m)| (g + m / rho).max(0.0))
        .collect()
}

/// `L_ρ(w, μ, ν) = f(w) + ρ/2 (‖max(g(w) + μ/ρ, 0)‖² + ‖h(w) + ν/ρ‖²)` and its gradient.
pub fn aug_lagrangian(problem: &dyn NlpProblem, w: &[f64], mu: &[f64], nu: &[f64], rho: f64) -> (f64, Vec<f64>) {
    let gp = ineq_shift(problem, w, mu, rho);
    let hp: Vec<f64> = problem.eq(w).iter().zip(nu).map(|(h, v)| h + v / rho).collect();
    let value = problem.objective(w)
        + 0.5 * rho * (gp.iter().map(|x| x * x).sum::<f64>() + hp.iter().map(|x| x * x).sum::<f64>());
    let mut grad = problem.objective_grad(w);
    if !gp.is_empty() {
        for (row, y) in problem.ineq_jacobian(w).iter().zip(&gp) {
            if *y != 0.0 {
                axpy(rho * y, row, &mut grad);
            }
        }
    }
    if !hp.is_empty() {
        for (row, y) in problem.eq_jacobian(w).iter().zip(&hp) {
            axpy(rho * y, row, &mut grad);
        }
    }
    (value, grad)
}

/// `∇f(w) + J_g(w)ᵀμ + J_h(w)ᵀν`
pub fn lagrangian_gradient(problem: &dyn NlpProblem, w: &[f64], mu: &[f64], nu: &[f64]) -> Vec<f64> {
    let mut grad = problem.objective_grad(w);
    for (row, m) in problem.ineq_jacobian(w).iter().zip(mu) {
        axpy(*m, row, &mut grad);
    }
    for (row, v) in problem.eq_jacobian(w).iter().zip(nu) {
        axpy(*v, row, &mut grad);
    }
    grad
}

/// `V_ρ(w, μ) = ‖max(g(w), -μ/ρ)‖ + ‖h(w)‖`
pub fn violation(problem: &dyn NlpProblem, w: &[f64], mu: &[f64], rho: f64) -> f64 {
    let g: Vec<f64> = problem.ineq(w).iter().zip(mu).map(|(g, m)| g.max(-m / rho)).collect();
    norm(&g) + norm(&problem.eq(w))
}

/// `a = max(0, min(μ, a_max))`, `b = max(b_min, min(ν, b_max))`
pub fn safeguard(mu: &[f64], nu: &[f64], cfg: &AlmConfig) -> (Vec<f64>, Vec<f64>) {
    let a = mu
        .iter()
        .enumerate()
        .map(|(i, m)| m.min(cfg.a_max.at(i)).max(0.0))
        .collect();
    let b = nu
        .iter()
        .enumerate()
        .map(|(i, v)| v.min(cfg.b_max.at(i)).max(cfg.b_min.at(i)))
        .collect();
    (a, b)
}

pub fn alm_solve(problem: &dyn NlpProblem, w0: &[f64], cfg: &AlmConfig) -> AlmResult {
    let mut w = w0.to_vec();
    let mut mu = vec![0.0; problem.n_ineq()];
    let mut nu = vec![0.0; problem.n_eq()];
    let mut rho = cfg.rho0;
    let mut v_prev = f64::INFINITY;
    let mut inner_total = 0usize;
    let mut trace = Vec::new();
    let mut k = 0usize;
    let pg_base = PgConfig {
        min_inverse_stepsize: cfg.min_inverse_stepsize,
        ..cfg.pg.clone()
    };
    loop {
        let (a, b) = safeguard(&mu, &nu, cfg);
        let budget = cfg.max_inner_total - inner_total;
        let pg_cfg = PgConfig {
            max_iter: pg_base.max_iter.min(budget),
            ..pg_base.clone()
        };
        let rho_k = rho;
        let fg = |x: &[f64]| aug_lagrangian(problem, x, &a, &b, rho_k);
        let inner = pg_solve(&fg, problem.set(), &w, cfg.inner_eps.at(k), &pg_cfg);
        inner_total += inner.iterations;
        w = inner.w;
        mu = ineq_shift(problem, &w, &a, rho_k).iter().map(|x| rho_k * x).collect();
        nu = problem
            .eq(&w)
            .iter()
            .zip(&b)
            .map(|(h, bj)| rho_k * (h + bj / rho_k))
            .collect();
        let v = violation(problem, &w, &a, rho_k);
        trace.push(AlmTraceRow {
            k,
            rho: rho_k,
            v,
            inner_iters: inner.iterations,
            l_value: inner.value,
            min_mu: mu.iter().copied().fold(f64::INFINITY, f64::min),
            w: w.clone(),
        });
        if k >= 1 && v > cfg.tau * v_prev {
            rho *= cfg.beta;
        }
        v_prev = v;
        k += 1;
        let reason = if v < cfg.eps_tol {
            Some(Termination::Converged)
        } else if inner.status == PgStatus::StepsizeFloor {
            Some(Termination::StepsizeFloor)
        } else if inner_total >= cfg.max_inner_total {
            Some(Termination::InnerCap)
        } else if rho > cfg.max_penalty {
            Some(Termination::PenaltyCap)
        } else if k >= cfg.max_outer {
            Some(Termination::OuterCap)
        } else {
            None
        };
        if let Some(reason) = reason {
            return AlmResult {
                w,
                mu,
                nu,
                rho,
                violation: v,
                outer_iters: k,
                inner_iters: inner_total,
                reason,
                last_inner_residual: inner.residual,
                trace,
            };
        }
    }
}

/// Diagnostics for a candidate point: `dist(-∇_w L(w, μ, ν), N_D(w))` when
/// the set has a closed form for its limiting normal cone, and the
/// complementarity measure `‖min(μ, -g(w))‖`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationarityResidual {
    pub normal: Option<f64>,
    pub complementarity: f64,
}

pub fn stationarity_residual(problem: &dyn NlpProblem, w: &[f64], mu: &[f64], nu: &[f64]) -> StationarityResidual {
    let grad = lagrangian_gradient(problem, w, mu, nu);
    let neg: Vec<f64> = grad.iter().map(|x| -x).collect();
    let normal = problem.set().normal_distance(w, &neg);
    let comp: Vec<f64> = problem.ineq(w).iter().zip(mu).map(|(g, m)| m.min(-g)).collect();
    StationarityResidual {
        normal,
        complementarity: norm(&comp),
    }
}

/// Writes the trace as CSV with header `k,rho,v,inner_iters,l_value`.
pub fn write_trace_csv<W: Write>(trace: &[AlmTraceRow], out: W) -> std::io::Result<()> {
    let mut wr = csv::Writer::from_writer(out);
    wr.write_record(["k", "rho", "v", "inner_iters", "l_value"])?;
    for r in trace {
        wr.write_record([
            r.k.to_string(),
            format!("{:e}", r.rho),
            format!("{:e}", r.v),
            r.inner_iters.to_string(),
            format!("{:e}", r.l_value),
        ])?;
    }
    wr.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sets::{BoxSparsitySet, FullSpace, GeometricSet};
    use crate::solver::QuadraticProblem;

    struct Fixed {
        g: Vec<f64>,
        h: Vec<f64>,
    }

    impl NlpProblem for Fixed {
        fn dim(&self) -> usize {
            1
        }
        fn n_ineq(&self) -> usize {
            self.g.len()
        }
        fn n_eq(&self) -> usize {
            self.h.len()
        }
        fn objective(&self, _w: &[f64]) -> f64 {
            0.0
        }
        fn objective_grad(&self, _w: &[f64]) -> Vec<f64> {
            vec![0.0]
        }
        fn ineq(&self, _w: &[f64]) -> Vec<f64> {
            self.g.clone()
        }
        fn eq(&self, _w: &[f64]) -> Vec<f64> {
            self.h.clone()
        }
        fn ineq_jacobian(&self, _w: &[f64]) -> Vec<Vec<f64>> {
            vec![vec![0.0]; self.g.len()]
        }
        fn eq_jacobian(&self, _w: &[f64]) -> Vec<Vec<f64>> {
            vec![vec![0.0]; self.h.len()]
        }
        fn set(&self) -> &dyn GeometricSet {
            &FullSpace(1)
        }
    }

    #[test]
    fn hand_evaluations() {
        let p = Fixed {
            g: vec![-1.0],
            h: vec![],
        };
        assert_eq!(aug_lagrangian(&p, &[0.0], &[2.0], &[], 4.0).0, 0.0);
        assert_eq!(violation(&p, &[0.0], &[2.0], 4.0), 0.5);
        let p = Fixed {
            g: vec![],
            h: vec![1.0],
        };
        assert_eq!(aug_lagrangian(&p, &[0.0], &[], &[0.0], 2.0).0, 1.0);
        let p = Fixed {
            g: vec![],
            h: vec![3.0, 4.0],
        };
        assert_eq!(violation(&p, &[0.0], &[], 1.0), 5.0);
    }

    #[test]
    fn safeguard_clamps() {
        let cfg = AlmConfig {
            a_max: Bound::PerComponent(vec![1.0, 1.0]),
            ..AlmConfig::default()
        };
        let (a, b) = safeguard(&[-3.0, 5.0], &[2.0], &cfg);
        assert_eq!(a, vec![0.0, 1.0]);
        assert_eq!(b, vec![2.0]);
    }

    #[test]
    fn unconstrained_run_stops_after_one_iteration() {
        let p = QuadraticProblem {
            q_mat: vec![vec![1.0]],
            q_lin: vec![-2.0],
            constant: 0.0,
            ineq_rows: vec![],
            eq_rows: vec![],
            domain: FullSpace(1),
        };
        let r = alm_solve(&p, &[0.0], &AlmConfig::default());
        assert_eq!(r.reason, Termination::Converged);
        assert_eq!(r.outer_iters, 1);
        assert!((r.w[0] - 2.0).abs() < 1e-6);
    }

    #[test]
    fn incompatible_constraint_hits_penalty_cap() {
        // w ∈ R_{<=1}^2 ∩ [0,1]^2 with w1 + w2 = 3: infeasible
        let p = QuadraticProblem {
            q_mat: vec![vec![0.0; 2]; 2],
            q_lin: vec![0.0; 2],
            constant: 0.0,
            ineq_rows: vec![],
            eq_rows: vec![(vec![1.0, 1.0], 3.0)],
            domain: BoxSparsitySet::with_upper(1, vec![1.0, 1.0]).unwrap(),
        };
        let r = alm_solve(&p, &[0.0, 0.0], &AlmConfig::default());
        assert_eq!(r.reason, Termination::PenaltyCap);
        assert!(r.rho > 1e18);
        for pair in r.trace.windows(2) {
            assert!(pair[1].rho >= pair[0].rho);
        }
    }

    #[test]
    fn trace_csv_header() {
        let mut buf = Vec::new();
        let row = AlmTraceRow {
            k: 0,
            rho: 1.0,
            v: 0.5,
            inner_iters: 3,
            l_value: 1.0,
            min_mu: 0.0,
            w: vec![0.0],
        };
        write_trace_csv(&[row], &mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.starts_with("k,rho,v,inner_iters,l_value\n0,1e0,5e-1,3,1e0"));
    }
}
