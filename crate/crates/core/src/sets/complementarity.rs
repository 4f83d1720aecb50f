use crate::polycone::{ConeUnion, ConvexCone, CoordKind};
use crate::vecops::unit;

use super::{
    clamp, coordinate_union, interval_kind, kind_dist_sq, GeometricSet, PolyUnionSet, Polyhedron, SetError,
    MAX_CLOSED_FORM_BRANCHES, SPARSITY_TOL,
};

/// `{(z, λ) : 0 <= z <= u, 0 <= λ <= λ_upper, z_i λ_i = 0}`, stored as the
/// vector `(z_1..z_n, λ_1..λ_n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplementaritySet {
    n: usize,
    z_upper: Vec<f64>,
    lambda_upper: Vec<f64>,
}

type PairKinds = (CoordKind, CoordKind);

impl ComplementaritySet {
    pub fn new(z_upper: Vec<f64>, lambda_upper: Vec<f64>) -> Result<Self, SetError> {
        let n = z_upper.len();
        if lambda_upper.len() != n || n == 0 {
            return Err(SetError::Invalid(
                "upper bound vectors must be nonempty and of equal length".into(),
            ));
        }
        if z_upper.iter().chain(&lambda_upper).any(|u| u.is_nan() || *u < 0.0) {
            return Err(SetError::Invalid("upper bounds must be nonnegative".into()));
        }
        Ok(ComplementaritySet {
            n,
            z_upper,
            lambda_upper,
        })
    }

    /// Upper bound `u` on `z` and `λ <= e`.
    pub fn with_upper(z_upper: Vec<f64>) -> Result<Self, SetError> {
        let ones = vec![1.0; z_upper.len()];
        Self::new(z_upper, ones)
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn z_upper(&self) -> &[f64] {
        &self.z_upper
    }
    pub fn lambda_upper(&self) -> &[f64] {
        &self.lambda_upper
    }

    pub fn member(&self, w: &[f64], tol: f64) -> bool {
        w.len() == 2 * self.n
            && (0..self.n).all(|i| {
                let (z, l) = (w[i], w[self.n + i]);
                z >= -tol
                    && z <= self.z_upper[i] + tol
                    && l >= -tol
                    && l <= self.lambda_upper[i] + tol
                    && (z.abs() <= tol || l.abs() <= tol)
            })
    }

    /// Per pair, the nearer of `(clamp(z), 0)` and `(0, clamp(λ))`; ties keep `z`.
    pub fn project(&self, w: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut p = vec![0.0; 2 * n];
        for i in 0..n {
            let (z, l) = (w[i], w[n + i]);
            let pz = clamp(z, 0.0, self.z_upper[i]);
            let pl = clamp(l, 0.0, self.lambda_upper[i]);
            // cost_z <= cost_l  ⇔  gain_z >= gain_l, with gain = x² - (x - p)²
            let gain_z = pz * (2.0 * z - pz);
            let gain_l = pl * (2.0 * l - pl);
            if gain_z >= gain_l {
                p[i] = pz;
            } else {
                p[n + i] = pl;
            }
        }
        p
    }

    pub fn project_pair(&self, z: &[f64], lam: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let mut w = z.to_vec();
        w.extend_from_slice(lam);
        let p = self.project(&w);
        (p[..self.n].to_vec(), p[self.n..].to_vec())
    }

    fn check(&self, w: &[f64]) -> Result<(), SetError> {
        if self.member(w, SPARSITY_TOL) {
            Ok(())
        } else {
            Err(SetError::NotAMember)
        }
    }

    fn kinds(&self, w: &[f64], i: usize) -> (CoordKind, CoordKind) {
        (
            interval_kind(w[i], 0.0, self.z_upper[i]),
            interval_kind(w[self.n + i], 0.0, self.lambda_upper[i]),
        )
    }

    fn regime(&self, w: &[f64], i: usize) -> (bool, bool) {
        (w[i].abs() > SPARSITY_TOL, w[self.n + i].abs() > SPARSITY_TOL)
    }

    fn pair_tangent(&self, w: &[f64], i: usize) -> Vec<PairKinds> {
        let (kz, kl) = self.kinds(w, i);
        match self.regime(w, i) {
            (true, _) => vec![(kz, CoordKind::Zero)],
            (false, true) => vec![(CoordKind::Zero, kl)],
            (false, false) => vec![(kz, CoordKind::Zero), (CoordKind::Zero, kl)],
        }
    }

    fn pair_regular(&self, w: &[f64], i: usize) -> PairKinds {
        let (kz, kl) = self.kinds(w, i);
        match self.regime(w, i) {
            (true, _) => (kz.polar(), CoordKind::Free),
            (false, true) => (CoordKind::Free, kl.polar()),
            (false, false) => (kz.polar(), kl.polar()),
        }
    }

    fn pair_limiting(&self, w: &[f64], i: usize) -> Vec<PairKinds> {
        let mut out = vec![self.pair_regular(w, i)];
        if self.regime(w, i) == (false, false) {
            if self.z_upper[i] > 0.0 {
                out.push((CoordKind::Zero, CoordKind::Free));
            }
            if self.lambda_upper[i] > 0.0 {
                out.push((CoordKind::Free, CoordKind::Zero));
            }
        }
        out
    }

    fn product(&self, per_pair: Vec<Vec<PairKinds>>) -> Result<ConeUnion, SetError> {
        let count: f64 = per_pair.iter().map(|o| o.len() as f64).product();
        if count > MAX_CLOSED_FORM_BRANCHES {
            return Err(SetError::EnumerationCapExceeded(format!("{count} cone branches")));
        }
        let n = self.n;
        let mut patterns: Vec<Vec<CoordKind>> = vec![vec![CoordKind::Zero; 2 * n]];
        for (i, opts) in per_pair.iter().enumerate() {
            let mut next = Vec::with_capacity(patterns.len() * opts.len());
            for p in &patterns {
                for (kz, kl) in opts {
                    let mut q = p.clone();
                    q[i] = *kz;
                    q[n + i] = *kl;
                    next.push(q);
                }
            }
            patterns = next;
        }
        coordinate_union(patterns)
    }

    pub fn tangent_cone(&self, w: &[f64]) -> Result<ConeUnion, SetError> {
        self.check(w)?;
        self.product((0..self.n).map(|i| self.pair_tangent(w, i)).collect())
    }

    pub fn regular_normal_cone(&self, w: &[f64]) -> Result<ConvexCone, SetError> {
        self.check(w)?;
        let mut kinds = vec![CoordKind::Zero; 2 * self.n];
        for i in 0..self.n {
            let (a, b) = self.pair_regular(w, i);
            kinds[i] = a;
            kinds[self.n + i] = b;
        }
        Ok(ConvexCone::coordinate(&kinds))
    }

    pub fn limiting_normal_cone(&self, w: &[f64]) -> Result<ConeUnion, SetError> {
        self.check(w)?;
        self.product((0..self.n).map(|i| self.pair_limiting(w, i)).collect())
    }

    /// `dist(v, N(w))`: the cone is a product over pairs, so the squared
    /// distance splits into per-pair minima.
    pub fn normal_distance(&self, w: &[f64], v: &[f64]) -> Result<f64, SetError> {
        self.check(w)?;
        let n = self.n;
        let total: f64 = (0..n)
            .map(|i| {
                self.pair_limiting(w, i)
                    .into_iter()
                    .map(|(a, b)| kind_dist_sq(a, v[i]) + kind_dist_sq(b, v[n + i]))
                    .fold(f64::INFINITY, f64::min)
            })
            .sum();
        Ok(total.sqrt())
    }

    /// Explicit union of the `2^n` convex branches.
    pub fn to_poly_union(&self) -> Result<PolyUnionSet, SetError> {
        let n = self.n;
        let d = 2 * n;
        let mut branches = Vec::with_capacity(1 << n);
        for mask in 0u64..(1u64 << n) {
            let mut p = Polyhedron::default();
            for i in 0..n {
                // bit set: z_i free in [0, u_i], λ_i = 0
                let (free, fixed, ub) = if mask & (1 << i) != 0 {
                    (i, n + i, self.z_upper[i])
                } else {
                    (n + i, i, self.lambda_upper[i])
                };
                let e = unit(d, free);
                p.ineq.push((e.iter().map(|x| -x).collect(), 0.0));
                p.ineq.push((e, ub));
                p.eq.push((unit(d, fixed), 0.0));
            }
            branches.push(p);
        }
        PolyUnionSet::new(d, branches)
    }
}

impl GeometricSet for ComplementaritySet {
    fn dim(&self) -> usize {
        2 * self.n
    }
    fn member(&self, w: &[f64], tol: f64) -> bool {
        ComplementaritySet::member(self, w, tol)
    }
    fn project(&self, w: &[f64]) -> Vec<f64> {
        ComplementaritySet::project(self, w)
    }
    fn normal_distance(&self, w: &[f64], v: &[f64]) -> Option<f64> {
        ComplementaritySet::normal_distance(self, w, v).ok()
    }
}
