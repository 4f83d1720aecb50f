//! B-, S- and M-stationarity checks for `min f(z)` over `z ∈ M ∩ dom K`,
//! in abstract, implicit and explicit flavors, plus the intersection-rule
//! diagnostics.
//!
//! Every check reduces to membership of `-∇f(z̄)` in a cone assembled from
//! the case data with the polycone calculus.

mod case_file;

use thiserror::Error;

use crate::polycone::{ConeError, ConeUnion};

pub use case_file::{CaseFile, LambdaFile};

/// Membership tolerance for all dual checks.
pub const DUAL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StationarityError {
    #[error("missing cone data: {0}")]
    MissingConeData(String),
    #[error("flags contradict unconditional implications: {}", .0.join("; "))]
    Inconsistent(Vec<String>),
    #[error("case file: {0}")]
    Parse(String),
    #[error(transparent)]
    Cone(#[from] ConeError),
}

type Res<T> = Result<T, StationarityError>;

/// Cones at `(z̄, λ̄)` for one representative `λ̄ ∈ K(z̄)`, all in `R^n × R^m`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LambdaData {
    pub label: String,
    pub lambda: Vec<f64>,
    pub graph_tangent: Option<ConeUnion>,
    /// `N̂_gphK`; the polar of `graph_tangent` when absent.
    pub graph_regular: Option<ConeUnion>,
    pub graph_limiting: Option<ConeUnion>,
    /// `T_{(M×R^m)∩gphK}`
    pub joint_tangent: Option<ConeUnion>,
    /// `N̂_{(M×R^m)∩gphK}`; the polar of `joint_tangent` when absent.
    pub joint_regular: Option<ConeUnion>,
}

/// Everything the checkers need at a reference point `z̄ ∈ R^n`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct StationarityCase {
    pub name: String,
    pub grad_f: Vec<f64>,
    /// Dimension of the implicit variable `λ`.
    pub m: usize,
    pub m_tangent: Option<ConeUnion>,
    pub m_regular: Option<ConeUnion>,
    pub m_limiting: Option<ConeUnion>,
    /// When absent, the union over the listed `λ̄` of `dom DK(z̄, λ̄)`.
    pub domk_tangent: Option<ConeUnion>,
    pub domk_regular: Option<ConeUnion>,
    pub domk_limiting: Option<ConeUnion>,
    /// `T_{M∩domK}`
    pub abstract_tangent: Option<ConeUnion>,
    pub abstract_regular: Option<ConeUnion>,
    pub abstract_limiting: Option<ConeUnion>,
    pub lambdas: Vec<LambdaData>,
}

fn need<'a>(c: &'a Option<ConeUnion>, what: &str) -> Res<&'a ConeUnion> {
    c.as_ref()
        .ok_or_else(|| StationarityError::MissingConeData(what.to_string()))
}

fn regular_or_polar(reg: &Option<ConeUnion>, tan: &Option<ConeUnion>, what: &str) -> Res<ConeUnion> {
    match (reg, tan) {
        (Some(r), _) => Ok(r.clone()),
        (None, Some(t)) => Ok(t.polar()?.into()),
        (None, None) => Err(StationarityError::MissingConeData(what.to_string())),
    }
}

impl StationarityCase {
    pub fn n(&self) -> usize {
        self.grad_f.len()
    }

    fn neg_grad(&self) -> Vec<f64> {
        self.grad_f.iter().map(|g| -g).collect()
    }

    fn z_coords(&self) -> Vec<usize> {
        (0..self.n()).collect()
    }

    fn lambda_coords(&self) -> Vec<usize> {
        (self.n()..self.n() + self.m).collect()
    }

    /// Checks that every cone present has the dimension its role demands.
    pub fn validate(&self) -> Res<()> {
        let n = self.n();
        let nm = n + self.m;
        let mut bad = Vec::new();
        let want = |bad: &mut Vec<String>, c: &Option<ConeUnion>, d: usize, what: String| {
            if let Some(c) = c {
                if c.dim() != d {
                    bad.push(format!("{what} has dimension {}, expected {d}", c.dim()));
                }
            }
        };
        want(&mut bad, &self.m_tangent, n, "m_tangent".into());
        want(&mut bad, &self.m_regular, n, "m_regular".into());
        want(&mut bad, &self.m_limiting, n, "m_limiting".into());
        want(&mut bad, &self.domk_tangent, n, "domk_tangent".into());
        want(&mut bad, &self.domk_regular, n, "domk_regular".into());
        want(&mut bad, &self.domk_limiting, n, "domk_limiting".into());
        want(&mut bad, &self.abstract_tangent, n, "abstract_tangent".into());
        want(&mut bad, &self.abstract_regular, n, "abstract_regular".into());
        want(&mut bad, &self.abstract_limiting, n, "abstract_limiting".into());
        for l in &self.lambdas {
            if l.lambda.len() != self.m {
                bad.push(format!(
                    "lambda '{}' has length {}, expected {}",
                    l.label,
                    l.lambda.len(),
                    self.m
                ));
            }
            want(
                &mut bad,
                &l.graph_tangent,
                nm,
                format!("graph_tangent of '{}'", l.label),
            );
            want(
                &mut bad,
                &l.graph_regular,
                nm,
                format!("graph_regular of '{}'", l.label),
            );
            want(
                &mut bad,
                &l.graph_limiting,
                nm,
                format!("graph_limiting of '{}'", l.label),
            );
            want(
                &mut bad,
                &l.joint_tangent,
                nm,
                format!("joint_tangent of '{}'", l.label),
            );
            want(
                &mut bad,
                &l.joint_regular,
                nm,
                format!("joint_regular of '{}'", l.label),
            );
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(StationarityError::Parse(bad.join("; ")))
        }
    }

    fn m_regular_cone(&self) -> Res<ConeUnion> {
        regular_or_polar(&self.m_regular, &self.m_tangent, "regular normal cone of M")
    }

    fn domk_tangent_cone(&self) -> Res<ConeUnion> {
        if let Some(t) = &self.domk_tangent {
            return Ok(t.clone());
        }
        let mut parts: Vec<ConeUnion> = Vec::new();
        for l in &self.lambdas {
            parts.push(need(&l.graph_tangent, "tangent cone of dom K")?.project_cone(&self.z_coords())?);
        }
        if parts.is_empty() {
            return Err(StationarityError::MissingConeData("tangent cone of dom K".into()));
        }
        let branches = parts.into_iter().flat_map(|p| p.branches().to_vec()).collect();
        Ok(ConeUnion::simplified(branches)?)
    }

    fn domk_regular_cone(&self) -> Res<ConeUnion> {
        match &self.domk_regular {
            Some(r) => Ok(r.clone()),
            None => Ok(self.domk_tangent_cone()?.polar()?.into()),
        }
    }

    fn lambdas_nonempty(&self) -> Res<&[LambdaData]> {
        if self.lambdas.is_empty() {
            Err(StationarityError::MissingConeData("no lambda representatives".into()))
        } else {
            Ok(&self.lambdas)
        }
    }

    fn per_lambda(&self, f: impl Fn(&LambdaData) -> Res<bool>) -> Res<(bool, Vec<bool>)> {
        let per = self.lambdas_nonempty()?.iter().map(f).collect::<Res<Vec<bool>>>()?;
        Ok((per.iter().all(|b| *b), per))
    }

    fn graph_regular_cone(&self, l: &LambdaData) -> Res<ConeUnion> {
        regular_or_polar(&l.graph_regular, &l.graph_tangent, "regular normal cone of gph K")
    }
}

fn polar_contains(cone: &ConeUnion, v: &[f64]) -> Res<bool> {
    Ok(cone.polar()?.contains(v, DUAL_TOL))
}

/// `f'(z̄)w >= 0` on `T_{M∩domK}(z̄)`.
pub fn abstract_b(case: &StationarityCase) -> Res<bool> {
    polar_contains(
        need(&case.abstract_tangent, "tangent cone of M ∩ dom K")?,
        &case.neg_grad(),
    )
}

/// `f'(z̄)w >= 0` on `T_M(z̄) ∩ T_domK(z̄)`.
pub fn implicit_b(case: &StationarityCase) -> Res<bool> {
    let tm = need(&case.m_tangent, "tangent cone of M")?;
    polar_contains(&tm.intersect(&case.domk_tangent_cone()?)?, &case.neg_grad())
}

/// `dom DK(z̄, λ̄)`: the graph tangent cone projected onto `z`.
pub fn graph_derivative_domain(case: &StationarityCase, l: &LambdaData) -> Res<ConeUnion> {
    Ok(need(&l.graph_tangent, "tangent cone of gph K")?.project_cone(&case.z_coords())?)
}

/// `D̂*K(z̄, λ̄)(0)`
pub fn regular_coderivative_at_zero(case: &StationarityCase, l: &LambdaData) -> Res<ConeUnion> {
    Ok(case.graph_regular_cone(l)?.slice_zero(&case.lambda_coords())?)
}

/// `D*K(z̄, λ̄)(0)`
pub fn limiting_coderivative_at_zero(case: &StationarityCase, l: &LambdaData) -> Res<ConeUnion> {
    Ok(need(&l.graph_limiting, "limiting normal cone of gph K")?.slice_zero(&case.lambda_coords())?)
}

pub fn explicit_b_wrt(case: &StationarityCase, l: &LambdaData) -> Res<bool> {
    let tm = need(&case.m_tangent, "tangent cone of M")?;
    polar_contains(&tm.intersect(&graph_derivative_domain(case, l)?)?, &case.neg_grad())
}

/// Overall verdict and the verdict for each listed `λ̄`.
pub fn explicit_b(case: &StationarityCase) -> Res<(bool, Vec<bool>)> {
    case.per_lambda(|l| explicit_b_wrt(case, l))
}

/// `-∇f(z̄) ∈ N̂_M(z̄) + N̂_domK(z̄)`
pub fn implicit_s(case: &StationarityCase) -> Res<bool> {
    let sum = case.m_regular_cone()?.minkowski_sum(&case.domk_regular_cone()?)?;
    Ok(sum.contains(&case.neg_grad(), DUAL_TOL))
}

pub fn explicit_s_wrt(case: &StationarityCase, l: &LambdaData) -> Res<bool> {
    let sum = case
        .m_regular_cone()?
        .minkowski_sum(&regular_coderivative_at_zero(case, l)?)?;
    Ok(sum.contains(&case.neg_grad(), DUAL_TOL))
}

pub fn explicit_s(case: &StationarityCase) -> Res<(bool, Vec<bool>)> {
    case.per_lambda(|l| explicit_s_wrt(case, l))
}

/// `-∇f(z̄) ∈ N_{M∩domK}(z̄)`
pub fn abstract_m(case: &StationarityCase) -> Res<bool> {
    Ok(need(&case.abstract_limiting, "limiting normal cone of M ∩ dom K")?.contains(&case.neg_grad(), DUAL_TOL))
}

/// `-∇f(z̄) ∈ N_M(z̄) + N_domK(z̄)`
pub fn implicit_m(case: &StationarityCase) -> Res<bool> {
    let nm = need(&case.m_limiting, "limiting normal cone of M")?;
    let nd = need(&case.domk_limiting, "limiting normal cone of dom K")?;
    Ok(nm.minkowski_sum(nd)?.contains(&case.neg_grad(), DUAL_TOL))
}

pub fn explicit_m_wrt(case: &StationarityCase, l: &LambdaData) -> Res<bool> {
    let nm = need(&case.m_limiting, "limiting normal cone of M")?;
    let sum = nm.minkowski_sum(&limiting_coderivative_at_zero(case, l)?)?;
    Ok(sum.contains(&case.neg_grad(), DUAL_TOL))
}

pub fn explicit_m(case: &StationarityCase) -> Res<(bool, Vec<bool>)> {
    case.per_lambda(|l| explicit_m_wrt(case, l))
}

/// Whether `T_{A∩B} = T_A ∩ T_B`. The inclusion `⊆` always holds; a `false`
/// verdict means the converse fails.
pub fn tangent_intersection_rule(ta: &ConeUnion, tb: &ConeUnion, tab: &ConeUnion) -> Res<bool> {
    Ok(tab.equals(&ta.intersect(tb)?)?)
}

/// `N̂_{M∩domK}(z̄) = N̂_M(z̄) + N̂_domK(z̄)`
pub fn regular_sum_rule_implicit(case: &StationarityCase) -> Res<bool> {
    let lhs = regular_or_polar(
        &case.abstract_regular,
        &case.abstract_tangent,
        "regular normal cone of M ∩ dom K",
    )?;
    let rhs = case.m_regular_cone()?.minkowski_sum(&case.domk_regular_cone()?)?;
    Ok(lhs.equals(&rhs)?)
}

/// `N̂_{(M×R^m)∩gphK}(z̄,λ̄) = N̂_M(z̄)×{0} + N̂_gphK(z̄,λ̄)`
pub fn regular_sum_rule_explicit_wrt(case: &StationarityCase, l: &LambdaData) -> Res<bool> {
    let lhs = regular_or_polar(
        &l.joint_regular,
        &l.joint_tangent,
        "regular normal cone of (M×R^m) ∩ gph K",
    )?;
    let padded = case.m_regular_cone()?.product(&ConeUnion::zero(case.m))?;
    let rhs = padded.minkowski_sum(&case.graph_regular_cone(l)?)?;
    Ok(lhs.equals(&rhs)?)
}

pub fn regular_sum_rule_explicit(case: &StationarityCase) -> Res<(bool, Vec<bool>)> {
    case.per_lambda(|l| regular_sum_rule_explicit_wrt(case, l))
}

/// `T_{(M×R^m)∩gphK}(z̄,λ̄) = T_{M×R^m}(z̄,λ̄) ∩ T_gphK(z̄,λ̄)`
pub fn tangent_rule_explicit_wrt(case: &StationarityCase, l: &LambdaData) -> Res<bool> {
    let tm = need(&case.m_tangent, "tangent cone of M")?.product(&ConeUnion::full(case.m))?;
    tangent_intersection_rule(
        &tm,
        need(&l.graph_tangent, "tangent cone of gph K")?,
        need(&l.joint_tangent, "tangent cone of (M×R^m) ∩ gph K")?,
    )
}

/// Flags for one `λ̄`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LambdaFlags {
    pub label: String,
    pub explicit_b: Option<bool>,
    pub explicit_s: Option<bool>,
    pub explicit_m: Option<bool>,
    pub regular_sum_rule: Option<bool>,
    pub tangent_rule: Option<bool>,
}

/// All verdicts for a case; `None` marks a check whose cone data is missing.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct StationarityReport {
    pub name: String,
    pub abstract_b: Option<bool>,
    pub implicit_b: Option<bool>,
    pub explicit_b: Option<bool>,
    pub implicit_s: Option<bool>,
    pub explicit_s: Option<bool>,
    pub abstract_m: Option<bool>,
    pub implicit_m: Option<bool>,
    pub explicit_m: Option<bool>,
    /// Explicitly M-stationary with respect to at least one listed `λ̄`.
    pub explicit_m_some: Option<bool>,
    pub implicit_tangent_rule: Option<bool>,
    pub implicit_regular_sum_rule: Option<bool>,
    pub per_lambda: Vec<LambdaFlags>,
    /// Violated implications among the computed flags.
    pub violations: Vec<String>,
}

impl StationarityReport {
    pub fn consistent(&self) -> bool {
        self.violations.is_empty()
    }

    /// Looks a flag up by the name used in case files and printed reports.
    pub fn flag(&self, name: &str) -> Option<Option<bool>> {
        Some(match name {
            "abstract_b" => self.abstract_b,
            "implicit_b" => self.implicit_b,
            "explicit_b" => self.explicit_b,
            "implicit_s" => self.implicit_s,
            "explicit_s" => self.explicit_s,
            "abstract_m" => self.abstract_m,
            "implicit_m" => self.implicit_m,
            "explicit_m" => self.explicit_m,
            "explicit_m_some" => self.explicit_m_some,
            "implicit_tangent_rule" => self.implicit_tangent_rule,
            "implicit_regular_sum_rule" => self.implicit_regular_sum_rule,
            _ => {
                // "<flag>@<label>" addresses one λ̄
                let (flag, label) = name.split_once('@')?;
                let l = self.per_lambda.iter().find(|l| l.label == label)?;
                match flag {
                    "explicit_b" => l.explicit_b,
                    "explicit_s" => l.explicit_s,
                    "explicit_m" => l.explicit_m,
                    "regular_sum_rule" => l.regular_sum_rule,
                    "tangent_rule" => l.tangent_rule,
                    _ => return None,
                }
            }
        })
    }

    pub fn render(&self) -> String {
        fn show(v: Option<bool>) -> &'static str {
            match v {
                Some(true) => "true",
                Some(false) => "false",
                None => "n/a",
            }
        }
        let mut out = format!("case {}\n", self.name);
        let rows = [
            ("abstract_b", self.abstract_b),
            ("implicit_b", self.implicit_b),
            ("explicit_b", self.explicit_b),
            ("implicit_s", self.implicit_s),
            ("explicit_s", self.explicit_s),
            ("abstract_m", self.abstract_m),
            ("implicit_m", self.implicit_m),
            ("explicit_m", self.explicit_m),
            ("explicit_m_some", self.explicit_m_some),
            ("implicit_tangent_rule", self.implicit_tangent_rule),
            ("implicit_regular_sum_rule", self.implicit_regular_sum_rule),
        ];
        for (k, v) in rows {
            out.push_str(&format!("  {k:<26} {}\n", show(v)));
        }
        for l in &self.per_lambda {
            out.push_str(&format!(
                "  lambda {:<12} explicit_b={} explicit_s={} explicit_m={} regular_sum_rule={} tangent_rule={}\n",
                l.label,
                show(l.explicit_b),
                show(l.explicit_s),
                show(l.explicit_m),
                show(l.regular_sum_rule),
                show(l.tangent_rule)
            ));
        }
        if self.consistent() {
            out.push_str("  consistency OK\n");
        } else {
            for v in &self.violations {
                out.push_str(&format!("  INCONSISTENT: {v}\n"));
            }
        }
        out
    }
}

/// Missing data becomes `None`; every other error is returned.
fn optional<T>(r: Res<T>) -> Res<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(StationarityError::MissingConeData(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

fn conj(flags: &[Option<bool>]) -> Option<bool> {
    if flags.is_empty() {
        return None;
    }
    flags
        .iter()
        .copied()
        .collect::<Option<Vec<bool>>>()
        .map(|v| v.iter().all(|b| *b))
}

/// Runs every check the data allows and cross-checks the flags against the
/// implications that hold without extra assumptions.
pub fn check_all(case: &StationarityCase) -> Res<StationarityReport> {
    case.validate()?;
    let mut per_lambda = Vec::with_capacity(case.lambdas.len());
    for l in &case.lambdas {
        per_lambda.push(LambdaFlags {
            label: l.label.clone(),
            explicit_b: optional(explicit_b_wrt(case, l))?,
            explicit_s: optional(explicit_s_wrt(case, l))?,
            explicit_m: optional(explicit_m_wrt(case, l))?,
            regular_sum_rule: optional(regular_sum_rule_explicit_wrt(case, l))?,
            tangent_rule: optional(tangent_rule_explicit_wrt(case, l))?,
        });
    }
    let col = |f: fn(&LambdaFlags) -> Option<bool>| per_lambda.iter().map(f).collect::<Vec<_>>();
    let em = col(|l| l.explicit_m);
    let explicit_m_some = em
        .iter()
        .copied()
        .collect::<Option<Vec<bool>>>()
        .filter(|v| !v.is_empty())
        .map(|v| v.into_iter().any(|b| b));
    let implicit_tangent_rule = match (&case.m_tangent, &case.abstract_tangent) {
        (Some(tm), Some(tab)) => Some(tangent_intersection_rule(tm, &case.domk_tangent_cone()?, tab)?),
        _ => None,
    };
    let mut report = StationarityReport {
        name: case.name.clone(),
        abstract_b: optional(abstract_b(case))?,
        implicit_b: optional(implicit_b(case))?,
        explicit_b: conj(&col(|l| l.explicit_b)),
        implicit_s: optional(implicit_s(case))?,
        explicit_s: conj(&col(|l| l.explicit_s)),
        abstract_m: optional(abstract_m(case))?,
        implicit_m: optional(implicit_m(case))?,
        explicit_m: conj(&em),
        explicit_m_some,
        implicit_tangent_rule,
        implicit_regular_sum_rule: optional(regular_sum_rule_implicit(case))?,
        per_lambda,
        violations: Vec::new(),
    };
    report.violations = implication_violations(&report);
    Ok(report)
}

/// Like [`check_all`], but a violated implication is an error.
pub fn check_all_strict(case: &StationarityCase) -> Res<StationarityReport> {
    let r = check_all(case)?;
    if r.consistent() {
        Ok(r)
    } else {
        Err(StationarityError::Inconsistent(r.violations))
    }
}

fn implication_violations(r: &StationarityReport) -> Vec<String> {
    let mut out = Vec::new();
    let mut imp = |name: &str, lhs: Option<bool>, rhs: Option<bool>| {
        if lhs == Some(true) && rhs == Some(false) {
            out.push(name.to_string());
        }
    };
    imp("implicit S => implicit B", r.implicit_s, r.implicit_b);
    imp("implicit S => implicit M", r.implicit_s, r.implicit_m);
    imp("implicit S => abstract B", r.implicit_s, r.abstract_b);
    imp("explicit S => explicit B", r.explicit_s, r.explicit_b);
    imp("explicit S => explicit M", r.explicit_s, r.explicit_m);
    imp("implicit B => abstract B", r.implicit_b, r.abstract_b);
    imp("implicit B => explicit B", r.implicit_b, r.explicit_b);
    imp("abstract B => abstract M", r.abstract_b, r.abstract_m);
    imp(
        "implicit M => explicit M for some lambda",
        r.implicit_m,
        r.explicit_m_some,
    );
    for l in &r.per_lambda {
        imp(
            &format!("explicit S => explicit B at {}", l.label),
            l.explicit_s,
            l.explicit_b,
        );
        imp(
            &format!("explicit S => explicit M at {}", l.label),
            l.explicit_s,
            l.explicit_m,
        );
        imp(
            &format!("implicit B => explicit B at {}", l.label),
            r.implicit_b,
            l.explicit_b,
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polycone::{ConvexCone, CoordKind};

    fn coord(k: &[CoordKind]) -> ConeUnion {
        ConvexCone::coordinate(k).into()
    }

    /// `z ∈ M = R₋`, `gph K` tangent `R₊×R` at the origin.
    fn one_dim(grad: f64) -> StationarityCase {
        use CoordKind::*;
        StationarityCase {
            name: "1d".into(),
            grad_f: vec![grad],
            m: 1,
            m_tangent: Some(coord(&[Nonpos])),
            m_limiting: Some(coord(&[Nonneg])),
            domk_limiting: Some(coord(&[Nonpos])),
            abstract_tangent: Some(ConeUnion::zero(1)),
            abstract_limiting: Some(ConeUnion::full(1)),
            lambdas: vec![LambdaData {
                label: "0".into(),
                lambda: vec![0.0],
                graph_tangent: Some(coord(&[Nonneg, Free])),
                graph_limiting: Some(coord(&[Nonpos, Zero])),
                joint_tangent: Some(ConeUnion::zero(2)),
                ..LambdaData::default()
            }],
            ..StationarityCase::default()
        }
    }

    #[test]
    fn everything_holds_on_a_point() {
        for g in [-1.0, 0.0, 2.0] {
            let r = check_all_strict(&one_dim(g)).unwrap();
            assert_eq!(r.abstract_b, Some(true));
            assert_eq!(r.implicit_b, Some(true));
            assert_eq!(r.explicit_b, Some(true));
            assert_eq!(r.implicit_s, Some(true));
            assert_eq!(r.explicit_s, Some(true));
            assert_eq!(r.implicit_m, Some(true));
            assert_eq!(r.per_lambda[0].tangent_rule, Some(false));
        }
    }

    #[test]
    fn missing_data_is_none_or_error() {
        let mut c = one_dim(1.0);
        c.abstract_tangent = None;
        assert!(matches!(abstract_b(&c), Err(StationarityError::MissingConeData(_))));
        let r = check_all(&c).unwrap();
        assert_eq!(r.abstract_b, None);
        assert_eq!(r.implicit_tangent_rule, None);
        c.lambdas.clear();
        assert!(explicit_s(&c).is_err());
    }

    #[test]
    fn flag_lookup() {
        let r = check_all(&one_dim(1.0)).unwrap();
        assert_eq!(r.flag("explicit_b@0"), Some(Some(true)));
        assert_eq!(r.flag("tangent_rule@0"), Some(Some(false)));
        assert_eq!(r.flag("nonsense"), None);
        assert!(r.render().contains("consistency OK"));
    }

    #[test]
    fn inconsistent_flags_are_reported() {
        let r = StationarityReport {
            implicit_s: Some(true),
            implicit_b: Some(false),
            ..StationarityReport::default()
        };
        assert_eq!(implication_violations(&r).len(), 1);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let mut c = one_dim(1.0);
        c.m_tangent = Some(ConeUnion::full(2));
        assert!(matches!(check_all(&c), Err(StationarityError::Parse(_))));
    }
}
