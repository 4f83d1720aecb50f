//! Spectral projected gradient with a nonmonotone (max-type) line search.

use std::collections::VecDeque;

use crate::sets::GeometricSet;
use crate::vecops::{dot, norm, sub};

#[derive(Debug, Clone, PartialEq)]
pub struct PgConfig {
    /// Window of the nonmonotone acceptance test.
    pub memory: usize,
    pub sigma: f64,
    /// Factor applied to `γ` after a rejected trial step.
    pub eta: f64,
    pub gamma_min: f64,
    pub gamma_max: f64,
    pub gamma_init: f64,
    pub max_iter: usize,
    /// The step `1/γ` may not drop below this.
    pub min_inverse_stepsize: f64,
}

impl Default for PgConfig {
    fn default() -> Self {
        PgConfig {
            memory: 10,
            sigma: 1e-4,
            eta: 2.0,
            gamma_min: 1e-10,
            gamma_max: 1e20,
            gamma_init: 1.0,
            max_iter: 100_000,
            min_inverse_stepsize: 1e-20,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PgStatus {
    Converged,
    IterCap,
    StepsizeFloor,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PgResult {
    pub w: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    /// Last certified residual; bounds `dist(-∇L(w), N_D(w))`.
    pub residual: f64,
    pub status: PgStatus,
}

/// Minimizes a smooth `L` over `D`; `fg` returns value and gradient.
///
/// Each accepted step `w⁺ = P_D(w - ∇L(w)/γ)` yields the certificate
/// `r = ‖γ(w - w⁺) + ∇L(w⁺) - ∇L(w)‖`, since `γ(w - w⁺) - ∇L(w)` is a
/// proximal normal to `D` at `w⁺`. The solve stops once `r <= eps`.
pub fn pg_solve(
    fg: &dyn Fn(&[f64]) -> (f64, Vec<f64>),
    set: &dyn GeometricSet,
    w_init: &[f64],
    eps: f64,
    cfg: &PgConfig,
) -> PgResult {
    let mut w = if set.member(w_init, 1e-12) {
        w_init.to_vec()
    } else {
        set.project(w_init)
    };
    let (mut f, mut g) = fg(&w);
    let mut hist: VecDeque<f64> = VecDeque::with_capacity(cfg.memory.max(1));
    hist.push_back(f);
    let mut gamma = cfg.gamma_init;
    let mut residual = f64::INFINITY;
    for it in 0..cfg.max_iter {
        let f_ref = hist.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let (w_new, f_new, g_new) = loop {
            let trial: Vec<f64> = w.iter().zip(&g).map(|(wi, gi)| wi - gi / gamma).collect();
            let w_new = set.project(&trial);
            let (f_new, g_new) = fg(&w_new);
            let d2: f64 = w_new.iter().zip(&w).map(|(a, b)| (a - b) * (a - b)).sum();
            if f_new <= f_ref - 0.5 * cfg.sigma * gamma * d2 {
                break (w_new, f_new, g_new);
            }
            gamma *= cfg.eta;
            if 1.0 / gamma < cfg.min_inverse_stepsize || !gamma.is_finite() {
                return PgResult {
                    w,
                    value: f,
                    iterations: it,
                    residual,
                    status: PgStatus::StepsizeFloor,
                };
            }
        };
        let s = sub(&w_new, &w);
        let y = sub(&g_new, &g);
        let cert: Vec<f64> = s.iter().zip(&y).map(|(si, yi)| -gamma * si + yi).collect();
        residual = norm(&cert);
        w = w_new;
        f = f_new;
        g = g_new;
        if hist.len() == cfg.memory.max(1) {
            hist.pop_front();
        }
        hist.push_back(f);
        if residual <= eps {
            return PgResult {
                w,
                value: f,
                iterations: it + 1,
                residual,
                status: PgStatus::Converged,
            };
        }
        let sy = dot(&s, &y);
        let ss = dot(&s, &s);
        if ss > 0.0 && sy > 0.0 {
            gamma = (sy / ss).clamp(cfg.gamma_min, cfg.gamma_max);
        }
    }
    PgResult {
        w,
        value: f,
        iterations: cfg.max_iter,
        residual,
        status: PgStatus::IterCap,
    }
}
