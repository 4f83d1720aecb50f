use crate::polycone::{ConeUnion, ConvexCone, CoordKind};
use crate::vecops::unit;

use super::{
    binomial, clamp, coordinate_union, for_each_subset, interval_kind, kind_dist_sq, GeometricSet, PolyUnionSet,
    Polyhedron, SetError, MAX_CLOSED_FORM_BRANCHES, SPARSITY_TOL,
};

/// `{z : ‖z‖₀ <= κ, lower <= z <= upper}` with `lower <= 0 <= upper`;
/// infinite bounds are allowed.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxSparsitySet {
    n: usize,
    kappa: usize,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl BoxSparsitySet {
    pub fn new(kappa: usize, lower: Vec<f64>, upper: Vec<f64>) -> Result<Self, SetError> {
        let n = lower.len();
        if upper.len() != n {
            return Err(SetError::Invalid("lower and upper differ in length".into()));
        }
        if kappa == 0 || kappa >= n {
            return Err(SetError::Invalid(format!(
                "kappa = {kappa} outside [1, {}]",
                n.saturating_sub(1)
            )));
        }
        for (l, u) in lower.iter().zip(&upper) {
            if l.is_nan() || u.is_nan() || *l > 0.0 || *u < 0.0 {
                return Err(SetError::Invalid("bounds must satisfy lower <= 0 <= upper".into()));
            }
        }
        Ok(BoxSparsitySet { n, kappa, lower, upper })
    }

    /// `{z : ‖z‖₀ <= κ, 0 <= z <= u}`
    pub fn with_upper(kappa: usize, upper: Vec<f64>) -> Result<Self, SetError> {
        let lower = vec![0.0; upper.len()];
        Self::new(kappa, lower, upper)
    }

    /// `R^n_{<=κ}`
    pub fn unbounded(n: usize, kappa: usize) -> Result<Self, SetError> {
        Self::new(kappa, vec![f64::NEG_INFINITY; n], vec![f64::INFINITY; n])
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn kappa(&self) -> usize {
        self.kappa
    }
    pub fn lower(&self) -> &[f64] {
        &self.lower
    }
    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn member(&self, z: &[f64], tol: f64) -> bool {
        z.len() == self.n
            && z.iter().filter(|x| x.abs() > tol).count() <= self.kappa
            && z.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(x, (l, u))| *x >= l - tol && *x <= u + tol)
    }

    /// Keeps the κ coordinates whose clamped value gains the most.
    pub fn project(&self, z: &[f64]) -> Vec<f64> {
        let clamped: Vec<f64> = (0..self.n).map(|i| clamp(z[i], self.lower[i], self.upper[i])).collect();
        let mut order: Vec<usize> = (0..self.n).collect();
        // z² - (z - p)², written without cancellation
        let benefit = |i: usize| clamped[i] * (2.0 * z[i] - clamped[i]);
        // stable sort keeps the smaller index first among ties
        order.sort_by(|&a, &b| benefit(b).total_cmp(&benefit(a)));
        let mut p = vec![0.0; self.n];
        for &i in &order[..self.kappa] {
            p[i] = clamped[i];
        }
        p
    }

    fn kind(&self, i: usize, x: f64) -> CoordKind {
        interval_kind(x, self.lower[i], self.upper[i])
    }

    fn support(&self, z: &[f64]) -> Result<Vec<usize>, SetError> {
        if !self.member(z, SPARSITY_TOL) {
            return Err(SetError::NotAMember);
        }
        Ok((0..self.n).filter(|&i| z[i].abs() > SPARSITY_TOL).collect())
    }

    fn eligible(&self, i: usize) -> bool {
        self.lower[i] != self.upper[i]
    }

    fn check_count(&self, count: f64) -> Result<(), SetError> {
        if count > MAX_CLOSED_FORM_BRANCHES {
            Err(SetError::EnumerationCapExceeded(format!("{count} cone branches")))
        } else {
            Ok(())
        }
    }

    pub fn tangent_cone(&self, z: &[f64]) -> Result<ConeUnion, SetError> {
        let supp = self.support(z)?;
        let rest: Vec<usize> = (0..self.n).filter(|i| !supp.contains(i)).collect();
        let extra = self.kappa - supp.len();
        self.check_count(binomial(rest.len(), extra))?;
        let mut patterns = Vec::new();
        for_each_subset(&rest, extra, &mut |add| {
            let pat = (0..self.n)
                .map(|i| {
                    if supp.contains(&i) || add.contains(&i) {
                        self.kind(i, z[i])
                    } else {
                        CoordKind::Zero
                    }
                })
                .collect();
            patterns.push(pat);
        });
        coordinate_union(patterns)
    }

    pub fn regular_normal_cone(&self, z: &[f64]) -> Result<ConvexCone, SetError> {
        let supp = self.support(z)?;
        let slack = supp.len() < self.kappa;
        let kinds: Vec<CoordKind> = (0..self.n)
            .map(|i| {
                if supp.contains(&i) || slack {
                    self.kind(i, z[i]).polar()
                } else {
                    CoordKind::Free
                }
            })
            .collect();
        Ok(ConvexCone::coordinate(&kinds))
    }

    /// Union over supports `S' ⊇ supp(z)`, `|S'| <= κ`, of the regular normal
    /// cones at nearby points with support `S'`.
    pub fn limiting_normal_cone(&self, z: &[f64]) -> Result<ConeUnion, SetError> {
        let supp = self.support(z)?;
        let pool: Vec<usize> = (0..self.n)
            .filter(|&i| !supp.contains(&i) && self.eligible(i))
            .collect();
        let room = self.kappa - supp.len();
        let total: f64 = (0..=room.min(pool.len())).map(|k| binomial(pool.len(), k)).sum();
        self.check_count(total)?;
        let mut patterns = Vec::new();
        for k in 0..=room.min(pool.len()) {
            let full = supp.len() + k == self.kappa;
            for_each_subset(&pool, k, &mut |add| {
                let pat = (0..self.n)
                    .map(|i| {
                        if supp.contains(&i) {
                            self.kind(i, z[i]).polar()
                        } else if add.contains(&i) {
                            CoordKind::Zero
                        } else if full {
                            CoordKind::Free
                        } else {
                            self.kind(i, 0.0).polar()
                        }
                    })
                    .collect();
                patterns.push(pat);
            });
        }
        coordinate_union(patterns)
    }

    /// `dist(v, N(z))` in closed form.
    pub fn normal_distance(&self, z: &[f64], v: &[f64]) -> Result<f64, SetError> {
        let supp = self.support(z)?;
        let mut base = 0.0;
        let mut is_supp = vec![false; self.n];
        for &i in &supp {
            base += kind_dist_sq(self.kind(i, z[i]).polar(), v[i]);
            is_supp[i] = true;
        }
        let pool: Vec<usize> = (0..self.n).filter(|&i| !is_supp[i] && self.eligible(i)).collect();
        let room = self.kappa - supp.len();
        let mut best = f64::INFINITY;
        // |S'| = κ: chosen coordinates pay v_i², all others are free.
        if pool.len() >= room {
            let mut sq: Vec<f64> = pool.iter().map(|&i| v[i] * v[i]).collect();
            sq.sort_by(f64::total_cmp);
            best = sq[..room].iter().sum();
        }
        // |S'| < κ: coordinates outside S' pay their distance to polar(T_i(0)).
        if room > 0 {
            let rest_cost: f64 = (0..self.n)
                .filter(|&i| !is_supp[i])
                .map(|i| kind_dist_sq(self.kind(i, 0.0).polar(), v[i]))
                .sum();
            let mut gains: Vec<f64> = pool
                .iter()
                .map(|&i| kind_dist_sq(self.kind(i, 0.0).polar(), v[i]) - v[i] * v[i])
                .filter(|g| *g > 0.0)
                .collect();
            gains.sort_by(|a, b| b.total_cmp(a));
            let gain: f64 = gains.iter().take(room - 1).sum();
            best = best.min(rest_cost - gain);
        }
        Ok((base + best.max(0.0)).sqrt())
    }

    /// Explicit union over maximal supports.
    pub fn to_poly_union(&self) -> Result<PolyUnionSet, SetError> {
        let all: Vec<usize> = (0..self.n).collect();
        let mut branches = Vec::new();
        for_each_subset(&all, self.kappa, &mut |supp| {
            let mut p = Polyhedron::default();
            for i in 0..self.n {
                let e = unit(self.n, i);
                if supp.contains(&i) {
                    if self.upper[i].is_finite() {
                        p.ineq.push((e.clone(), self.upper[i]));
                    }
                    if self.lower[i].is_finite() {
                        p.ineq.push((e.iter().map(|x| -x).collect(), -self.lower[i]));
                    }
                } else {
                    p.eq.push((e, 0.0));
                }
            }
            branches.push(p);
        });
        PolyUnionSet::new(self.n, branches)
    }
}

impl GeometricSet for BoxSparsitySet {
    fn dim(&self) -> usize {
        self.n
    }
    fn member(&self, w: &[f64], tol: f64) -> bool {
        BoxSparsitySet::member(self, w, tol)
    }
    fn project(&self, w: &[f64]) -> Vec<f64> {
        BoxSparsitySet::project(self, w)
    }
    fn normal_distance(&self, w: &[f64], v: &[f64]) -> Option<f64> {
        BoxSparsitySet::normal_distance(self, w, v).ok()
    }
}
