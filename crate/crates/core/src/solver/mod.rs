//! Safeguarded augmented Lagrangian method with a spectral projected-gradient
//! inner solver.

mod alm;
mod pg;

use crate::sets::GeometricSet;
use crate::vecops::dot;

pub use alm::{
    alm_solve, aug_lagrangian, lagrangian_gradient, safeguard, stationarity_residual, violation, write_trace_csv,
    AlmConfig, AlmResult, AlmTraceRow, Bound, EpsSchedule, StationarityResidual, Termination,
};
pub use pg::{pg_solve, PgConfig, PgResult, PgStatus};

/// `min { f(w) : g(w) <= 0, h(w) = 0, w ∈ D }` with smooth `f`, `g`, `h`.
pub trait NlpProblem: Sync {
    fn dim(&self) -> usize;
    fn n_ineq(&self) -> usize {
        0
    }
    fn n_eq(&self) -> usize {
        0
    }
    fn objective(&self, w: &[f64]) -> f64;
    fn objective_grad(&self, w: &[f64]) -> Vec<f64>;
    fn ineq(&self, _w: &[f64]) -> Vec<f64> {
        Vec::new()
    }
    fn eq(&self, _w: &[f64]) -> Vec<f64> {
        Vec::new()
    }
    /// Rows are the gradients of the inequality components.
    fn ineq_jacobian(&self, _w: &[f64]) -> Vec<Vec<f64>> {
        Vec::new()
    }
    fn eq_jacobian(&self, _w: &[f64]) -> Vec<Vec<f64>> {
        Vec::new()
    }
    fn set(&self) -> &dyn GeometricSet;
}

/// `½ wᵀQw + qᵀw` subject to affine `A w <= a`, `B w = b` over a set `D`.
pub struct QuadraticProblem<S> {
    pub q_mat: Vec<Vec<f64>>,
    pub q_lin: Vec<f64>,
    pub constant: f64,
    /// rows `(a_i, r_i)` meaning `a_i·w - r_i <= 0`
    pub ineq_rows: Vec<(Vec<f64>, f64)>,
    /// rows `(b_j, s_j)` meaning `b_j·w - s_j = 0`
    pub eq_rows: Vec<(Vec<f64>, f64)>,
    pub domain: S,
}

impl<S: GeometricSet> NlpProblem for QuadraticProblem<S> {
    fn dim(&self) -> usize {
        self.q_lin.len()
    }
    fn n_ineq(&self) -> usize {
        self.ineq_rows.len()
    }
    fn n_eq(&self) -> usize {
        self.eq_rows.len()
    }
    fn objective(&self, w: &[f64]) -> f64 {
        let qw: f64 = self.q_mat.iter().zip(w).map(|(row, wi)| wi * dot(row, w)).sum();
        0.5 * qw + dot(&self.q_lin, w) + self.constant
    }
    fn objective_grad(&self, w: &[f64]) -> Vec<f64> {
        self.q_mat
            .iter()
            .zip(&self.q_lin)
            .map(|(row, qi)| dot(row, w) + qi)
            .collect()
    }
    fn ineq(&self, w: &[f64]) -> Vec<f64> {
        self.ineq_rows.iter().map(|(a, r)| dot(a, w) - r).collect()
    }
    fn eq(&self, w: &[f64]) -> Vec<f64> {
        self.eq_rows.iter().map(|(b, s)| dot(b, w) - s).collect()
    }
    fn ineq_jacobian(&self, _w: &[f64]) -> Vec<Vec<f64>> {
        self.ineq_rows.iter().map(|(a, _)| a.clone()).collect()
    }
    fn eq_jacobian(&self, _w: &[f64]) -> Vec<Vec<f64>> {
        self.eq_rows.iter().map(|(b, _)| b.clone()).collect()
    }
    fn set(&self) -> &dyn GeometricSet {
        &self.domain
    }
}
