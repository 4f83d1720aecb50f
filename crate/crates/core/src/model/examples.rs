//! Small examples with machine-checked claims: a failing sum rule for
//! regular normals, a failing tangent intersection rule, a cardinality
//! problem that is explicitly but not implicitly S-stationary, and a
//! vanishing-constrained problem whose reformulation has a spurious local
//! minimizer.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::polycone::{parse_cone_union, ConeUnion, ConvexCone, CoordKind};
use crate::sets::{
    kcc_graph, kcc_image, kcc_vertices, kvc_selection, parse_poly_union, BoxSparsitySet, ComplementaritySet,
    GeometricSet, PolyUnionSet, Polyhedron,
};
use crate::solver::{NlpProblem, QuadraticProblem};
use crate::stationarity::{
    check_all, regular_coderivative_at_zero, CaseFile, LambdaData, StationarityCase, StationarityReport, DUAL_TOL,
};
use crate::vecops::dist;

use super::ModelError;

const OMEGA_AXES: &str = include_str!("../../fixtures/omega_axes.poly");
const OMEGA_DIAGONAL: &str = include_str!("../../fixtures/omega_diagonal.poly");
const SQRT_GRAPH: &str = include_str!("../../fixtures/sqrt_graph.json");
const SQRT_GRAPH_PRODUCT: &str = include_str!("../../fixtures/sqrt_graph_product.cone");
const SQRT_GRAPH_MEET: &str = include_str!("../../fixtures/sqrt_graph_meet.cone");
const VANISHING_DOMAIN: &str = include_str!("../../fixtures/vanishing_domain.poly");
const VANISHING_GRAPH: &str = include_str!("../../fixtures/vanishing_graph.poly");

pub const EXAMPLE_IDS: [&str; 4] = ["2.1", "4.12", "5.2", "5.5"];

/// One assertion about an example and the verdict it must produce.
pub struct Claim {
    pub statement: &'static str,
    pub expected: bool,
    check: fn(&AcademicCase) -> Result<bool, ModelError>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClaimOutcome {
    pub statement: String,
    pub expected: bool,
    pub observed: Result<bool, String>,
}

impl ClaimOutcome {
    pub fn passed(&self) -> bool {
        self.observed == Ok(self.expected)
    }
}

pub struct NamedProblem {
    pub name: &'static str,
    pub problem: Box<dyn NlpProblem + Send>,
    pub start: Vec<f64>,
}

pub struct AcademicCase {
    pub id: &'static str,
    pub title: &'static str,
    pub sets: BTreeMap<&'static str, PolyUnionSet>,
    pub cones: BTreeMap<&'static str, ConeUnion>,
    pub cases: Vec<StationarityCase>,
    pub reports: Vec<StationarityReport>,
    pub problems: Vec<NamedProblem>,
    pub claims: Vec<Claim>,
    /// Printed after the claims when all of them pass.
    pub verdict: Option<&'static str>,
}

impl AcademicCase {
    fn new(id: &'static str, title: &'static str) -> Self {
        AcademicCase {
            id,
            title,
            sets: BTreeMap::new(),
            cones: BTreeMap::new(),
            cases: Vec::new(),
            reports: Vec::new(),
            problems: Vec::new(),
            claims: Vec::new(),
            verdict: None,
        }
    }

    fn claim(&mut self, statement: &'static str, expected: bool, check: fn(&AcademicCase) -> Result<bool, ModelError>) {
        self.claims.push(Claim {
            statement,
            expected,
            check,
        });
    }

    fn add_case(&mut self, case: StationarityCase) -> Result<(), ModelError> {
        self.reports.push(check_all(&case)?);
        self.cases.push(case);
        Ok(())
    }

    pub fn cone(&self, name: &str) -> Result<&ConeUnion, ModelError> {
        self.cones
            .get(name)
            .ok_or_else(|| ModelError::Fixture(format!("no cone named '{name}'")))
    }

    pub fn set(&self, name: &str) -> Result<&PolyUnionSet, ModelError> {
        self.sets
            .get(name)
            .ok_or_else(|| ModelError::Fixture(format!("no set named '{name}'")))
    }

    pub fn case(&self, i: usize) -> &StationarityCase {
        &self.cases[i]
    }

    pub fn report(&self, i: usize) -> &StationarityReport {
        &self.reports[i]
    }

    fn lambda(&self, i: usize, label: &str) -> Result<&LambdaData, ModelError> {
        self.cases[i]
            .lambdas
            .iter()
            .find(|l| l.label == label)
            .ok_or_else(|| ModelError::Fixture(format!("no lambda labelled '{label}'")))
    }

    fn lambda_flag(
        &self,
        i: usize,
        label: &str,
        f: fn(&crate::stationarity::LambdaFlags) -> Option<bool>,
    ) -> Result<bool, ModelError> {
        let l = self.reports[i]
            .per_lambda
            .iter()
            .find(|l| l.label == label)
            .ok_or_else(|| ModelError::Fixture(format!("no lambda labelled '{label}'")))?;
        known(f(l))
    }

    pub fn verify(&self) -> Vec<ClaimOutcome> {
        self.claims
            .iter()
            .map(|c| ClaimOutcome {
                statement: c.statement.to_string(),
                expected: c.expected,
                observed: (c.check)(self).map_err(|e| e.to_string()),
            })
            .collect()
    }

    pub fn all_pass(&self) -> bool {
        self.verify().iter().all(ClaimOutcome::passed)
    }

    /// Reports followed by one line per claim.
    pub fn render(&self) -> String {
        let mut out = format!("example {}: {}\n", self.id, self.title);
        for r in &self.reports {
            out.push_str(&r.render());
        }
        for c in self.verify() {
            let got = match &c.observed {
                Ok(b) => b.to_string(),
                Err(e) => format!("error ({e})"),
            };
            let tag = if c.passed() { "PASS" } else { "FAIL" };
            out.push_str(&format!(
                "[{tag}] {} (expected {}, got {got})\n",
                c.statement, c.expected
            ));
        }
        if let (Some(v), true) = (self.verdict, self.all_pass()) {
            out.push_str(&format!("verdict: {v}\n"));
        }
        out
    }
}

fn known(v: Option<bool>) -> Result<bool, ModelError> {
    v.ok_or_else(|| ModelError::Fixture("flag not computable from the case data".into()))
}

/// Looks an example up by id.
pub fn example(id: &str) -> Result<AcademicCase, ModelError> {
    match id {
        "2.1" => example_2_1(),
        "4.12" => example_4_12(),
        "5.2" => example_5_2(),
        "5.5" => example_5_5(),
        _ => Err(ModelError::UnknownExample(id.to_string())),
    }
}

fn poly(src: &str, what: &str) -> Result<PolyUnionSet, ModelError> {
    parse_poly_union(src).map_err(|e| ModelError::Fixture(format!("{what}: {e}")))
}

fn cone_literal(src: &str, what: &str) -> Result<ConeUnion, ModelError> {
    parse_cone_union(src).map_err(|e| ModelError::Fixture(format!("{what}: {e}")))
}

fn coord(k: &[CoordKind]) -> ConeUnion {
    ConvexCone::coordinate(k).into()
}

fn h_cone(dim: usize, ineq: Vec<Vec<f64>>, eq: Vec<Vec<f64>>) -> Result<ConeUnion, ModelError> {
    Ok(ConvexCone::from_h(dim, ineq, eq)?.into())
}

fn equal(a: &ConeUnion, b: &ConeUnion) -> Result<bool, ModelError> {
    Ok(a.equals(b)?)
}

/// `Ω₁ = {z ∈ R²₊ : z₁z₂ = 0}` and the diagonal `Ω₂` at the origin.
pub fn example_2_1() -> Result<AcademicCase, ModelError> {
    use CoordKind::*;
    let mut ex = AcademicCase::new(
        "2.1",
        "regular normals of an intersection versus the sum of regular normals",
    );
    let axes = poly(OMEGA_AXES, "omega_axes")?;
    let diag = poly(OMEGA_DIAGONAL, "omega_diagonal")?;
    let meet = axes.intersection(&diag)?;
    let o = [0.0, 0.0];
    let n1: ConeUnion = axes.regular_normal_cone(&o)?.into();
    let n2: ConeUnion = diag.regular_normal_cone(&o)?.into();
    let n12: ConeUnion = meet.regular_normal_cone(&o)?.into();
    ex.cones.insert("regular_axes", n1.clone());
    ex.cones.insert("regular_diagonal", n2.clone());
    ex.cones.insert("regular_meet", n12.clone());
    ex.cones.insert("regular_sum", n1.minkowski_sum(&n2)?);
    ex.cones.insert("tangent_axes", axes.tangent_cone(&o)?);
    ex.cones.insert("tangent_diagonal", diag.tangent_cone(&o)?);
    ex.cones.insert("tangent_meet", meet.tangent_cone(&o)?);
    ex.cones.insert("expect_nonpos", coord(&[Nonpos, Nonpos]));
    ex.cones
        .insert("expect_antidiagonal", h_cone(2, vec![], vec![vec![1.0, 1.0]])?);
    ex.cones
        .insert("expect_halfplane", h_cone(2, vec![vec![1.0, 1.0]], vec![])?);
    ex.sets.insert("axes", axes.clone());
    ex.sets.insert("diagonal", diag.clone());
    ex.sets.insert("meet", meet.clone());
    // Ω₂ as M, Ω₁ as dom K, f(z) = z₁ + z₂
    ex.add_case(StationarityCase {
        name: "diagonal within the axes, f = z1 + z2".into(),
        grad_f: vec![1.0, 1.0],
        m_tangent: Some(diag.tangent_cone(&o)?),
        m_limiting: Some(diag.limiting_normal_cone(&o)?),
        domk_tangent: Some(axes.tangent_cone(&o)?),
        domk_limiting: Some(axes.limiting_normal_cone(&o)?),
        abstract_tangent: Some(meet.tangent_cone(&o)?),
        abstract_limiting: Some(meet.limiting_normal_cone(&o)?),
        ..StationarityCase::default()
    })?;

    ex.claim(
        "regular normal cone of the axes union at 0 is the nonpositive orthant",
        true,
        |e| equal(e.cone("regular_axes")?, e.cone("expect_nonpos")?),
    );
    ex.claim("regular normal cone of the diagonal at 0 is {z1 + z2 = 0}", true, |e| {
        equal(e.cone("regular_diagonal")?, e.cone("expect_antidiagonal")?)
    });
    ex.claim("the two sets meet only at the origin", true, |e| {
        let meet = e.set("meet")?;
        let mut ok = true;
        for b in meet.branches() {
            let v = b.vertices(2)?;
            ok &= v.len() == 1 && v[0].iter().all(|x| x.abs() < 1e-9);
        }
        Ok(ok)
    });
    ex.claim(
        "regular normal cone of the intersection at 0 is the whole plane",
        true,
        |e| Ok(e.cone("regular_meet")?.branches().iter().all(|b| b.is_full())),
    );
    ex.claim("sum of the two regular normal cones is {z1 + z2 <= 0}", true, |e| {
        equal(e.cone("regular_sum")?, e.cone("expect_halfplane")?)
    });
    ex.claim("regular sum rule holds at 0", false, |e| {
        equal(e.cone("regular_meet")?, e.cone("regular_sum")?)
    });
    ex.claim(
        "sum of regular normals is a strict subset of the intersection's",
        true,
        |e| Ok(e.cone("regular_sum")?.subset_eq(e.cone("regular_meet")?)? == crate::polycone::Inclusion::Subset),
    );
    ex.claim("tangent intersection rule holds at 0", true, |e| {
        Ok(crate::stationarity::tangent_intersection_rule(
            e.cone("tangent_axes")?,
            e.cone("tangent_diagonal")?,
            e.cone("tangent_meet")?,
        )?)
    });
    ex.claim("with f = z1 + z2 the origin is implicitly S-stationary", true, |e| {
        known(e.report(0).implicit_s)
    });
    ex.claim("stationarity flags respect the unconditional implications", true, |e| {
        Ok(e.report(0).consistent())
    });
    ex.verdict = Some("the regular normal cone of the intersection is strictly larger than the sum: the sum rule fails while the tangent rule holds");
    Ok(ex)
}

/// `M = R₋`, `K(z) = [-√z, √z]` at `(0, 0)`; the graph cones are transcribed
/// fixture data.
pub fn example_4_12() -> Result<AcademicCase, ModelError> {
    use CoordKind::*;
    let mut ex = AcademicCase::new("4.12", "tangent cone intersection rule fails for a square-root graph");
    let file = CaseFile::from_json(SQRT_GRAPH).map_err(|e| ModelError::Fixture(format!("sqrt_graph: {e}")))?;
    let case = file.to_case()?;
    ex.cones.insert(
        "tangent_m_times_r",
        cone_literal(SQRT_GRAPH_PRODUCT, "sqrt_graph_product")?,
    );
    ex.cones
        .insert("tangent_meet_listed", cone_literal(SQRT_GRAPH_MEET, "sqrt_graph_meet")?);
    let tm_r = case
        .m_tangent
        .clone()
        .expect("fixture has m_tangent")
        .product(&ConeUnion::full(1))?;
    let tg = case.lambdas[0]
        .graph_tangent
        .clone()
        .expect("fixture has graph_tangent");
    ex.cones.insert("tangent_meet_computed", tm_r.intersect(&tg)?);
    ex.cones.insert("tangent_m_times_r_computed", tm_r);
    ex.cones.insert("tangent_graph", tg);
    ex.cones.insert(
        "tangent_joint",
        case.lambdas[0]
            .joint_tangent
            .clone()
            .expect("fixture has joint_tangent"),
    );
    ex.add_case(case)?;
    ex.cases[0].name = file.name.clone();

    ex.claim("T_M x R computed from T_M equals the listed R_- x R", true, |e| {
        equal(e.cone("tangent_m_times_r_computed")?, e.cone("tangent_m_times_r")?)
    });
    ex.claim("tangent cone of (M x R) meet gph K at (0,0) is {(0,0)}", true, |e| {
        Ok(e.cone("tangent_joint")?.branches().iter().all(|b| b.is_zero()))
    });
    ex.claim("T_{M x R} meet T_gphK equals the listed {0} x R", true, |e| {
        equal(e.cone("tangent_meet_computed")?, e.cone("tangent_meet_listed")?)
    });
    ex.claim("tangent cone intersection rule holds", false, |e| {
        e.lambda_flag(0, "0", |l| l.tangent_rule)
    });
    ex.claim("dom DK(0,0) is R_+", true, |e| {
        let d = crate::stationarity::graph_derivative_domain(e.case(0), e.lambda(0, "0")?)?;
        equal(&d, &coord(&[Nonneg]))
    });
    ex.claim("explicitly B-stationary", true, |e| known(e.report(0).explicit_b));
    ex.claim("every verdict listed in the case file is reproduced", true, |e| {
        let f = CaseFile::from_json(SQRT_GRAPH)?;
        Ok(f.mismatches(e.report(0)).is_empty())
    });
    ex.claim("stationarity flags respect the unconditional implications", true, |e| {
        Ok(e.report(0).consistent())
    });
    ex.verdict = Some("the tangent cone of M times R meets the graph tangent cone in more than the joint tangent cone: the tangent intersection rule fails");
    Ok(ex)
}

const LAMBDAS_CC: [(&str, [f64; 2]); 4] = [
    ("e1", [1.0, 0.0]),
    ("e2", [0.0, 1.0]),
    ("interior", [0.5, 0.5]),
    ("corner", [1.0, 1.0]),
];

/// `min (z₁+1)² + (z₂+1)²` s.t. `z₁ = z₂`, `‖z‖₀ <= 1` at `z̄ = 0`.
pub fn example_5_2() -> Result<AcademicCase, ModelError> {
    let mut ex = AcademicCase::new(
        "5.2",
        "explicitly but not implicitly S-stationary cardinality-constrained point",
    );
    let z0 = [0.0, 0.0];
    let m_set = poly(OMEGA_DIAGONAL, "omega_diagonal")?;
    let domk = BoxSparsitySet::unbounded(2, 1)?;
    let meet = m_set.intersection(&domk.to_poly_union()?)?;
    let graph = kcc_graph(2, 1)?;
    let joint = graph.restricted(&Polyhedron {
        ineq: vec![],
        eq: vec![(vec![1.0, -1.0, 0.0, 0.0], 0.0)],
    })?;
    let image = kcc_image(&z0, 1)?;

    let mut lambdas = Vec::new();
    for (label, lam) in LAMBDAS_CC {
        let p = [0.0, 0.0, lam[0], lam[1]];
        lambdas.push(LambdaData {
            label: label.into(),
            lambda: lam.to_vec(),
            graph_tangent: Some(graph.tangent_cone(&p)?),
            graph_regular: Some(graph.regular_normal_cone(&p)?.into()),
            graph_limiting: Some(graph.limiting_normal_cone(&p)?),
            joint_tangent: Some(joint.tangent_cone(&p)?),
            joint_regular: Some(joint.regular_normal_cone(&p)?.into()),
        });
    }
    let case = StationarityCase {
        name: "cardinality example at z = 0".into(),
        grad_f: vec![2.0, 2.0],
        m: 2,
        m_tangent: Some(m_set.tangent_cone(&z0)?),
        m_regular: Some(m_set.regular_normal_cone(&z0)?.into()),
        m_limiting: Some(m_set.limiting_normal_cone(&z0)?),
        domk_tangent: Some(domk.tangent_cone(&z0)?),
        domk_regular: Some(domk.regular_normal_cone(&z0)?.into()),
        domk_limiting: Some(domk.limiting_normal_cone(&z0)?),
        abstract_tangent: Some(meet.tangent_cone(&z0)?),
        abstract_regular: Some(meet.regular_normal_cone(&z0)?.into()),
        abstract_limiting: Some(meet.limiting_normal_cone(&z0)?),
        lambdas,
    };
    ex.sets.insert("m", m_set);
    ex.sets.insert("meet", meet);
    ex.sets.insert("graph", graph);
    ex.sets.insert("joint", joint);
    ex.sets.insert("image", image);
    ex.add_case(case)?;
    ex.problems.push(NamedProblem {
        name: "cardinality example",
        problem: Box::new(QuadraticProblem {
            q_mat: vec![vec![2.0, 0.0], vec![0.0, 2.0]],
            q_lin: vec![2.0, 2.0],
            constant: 2.0,
            ineq_rows: vec![],
            eq_rows: vec![(vec![1.0, -1.0], 0.0)],
            domain: domk,
        }),
        start: vec![1.0, 0.0],
    });

    ex.claim("K_cc(0) has the vertices e1, e2 and (1,1)", true, |_| {
        let mut v = kcc_vertices(&[0.0, 0.0], 1)?;
        v.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        let want = [[0.0, 1.0], [1.0, 0.0], [1.0, 1.0]];
        Ok(v.len() == 3 && v.iter().zip(want).all(|(a, b)| dist(a, &b) < 1e-9))
    });
    ex.claim("regular normal cone of M at 0 is {z1 + z2 = 0}", true, |e| {
        equal(
            e.case(0).m_regular.as_ref().expect("set"),
            &h_cone(2, vec![], vec![vec![1.0, 1.0]])?,
        )
    });
    ex.claim("regular normal cone of dom K at 0 is {0}", true, |e| {
        Ok(e.case(0)
            .domk_regular
            .as_ref()
            .expect("set")
            .branches()
            .iter()
            .all(|b| b.is_zero()))
    });
    ex.claim("regular coderivative D^K(0,e1)(0) is R x {0}", true, |e| {
        let d = regular_coderivative_at_zero(e.case(0), e.lambda(0, "e1")?)?;
        equal(&d, &coord(&[CoordKind::Free, CoordKind::Zero]))
    });
    ex.claim("regular coderivative D^K(0,e2)(0) is {0} x R", true, |e| {
        let d = regular_coderivative_at_zero(e.case(0), e.lambda(0, "e2")?)?;
        equal(&d, &coord(&[CoordKind::Zero, CoordKind::Free]))
    });
    ex.claim(
        "regular coderivative at the other lambdas is the whole plane",
        true,
        |e| {
            let mut ok = true;
            for l in ["interior", "corner"] {
                let d = regular_coderivative_at_zero(e.case(0), e.lambda(0, l)?)?;
                ok &= equal(&d, &ConeUnion::full(2))?;
            }
            Ok(ok)
        },
    );
    ex.claim(
        "regular normals of (M x R^2) meet gph K are R^2 x regular normals of K_cc(0)",
        true,
        |e| {
            let image = e.set("image")?;
            let mut ok = true;
            for (label, lam) in LAMBDAS_CC {
                let nl: ConeUnion = image.regular_normal_cone(&lam)?.into();
                let want = ConeUnion::full(2).product(&nl)?;
                let got = e.lambda(0, label)?.joint_regular.as_ref().expect("set");
                ok &= equal(got, &want)?;
            }
            Ok(ok)
        },
    );
    ex.claim("mu = 2, zeta = (-4, 0) solves the explicit S system at e1", true, |e| {
        multiplier_certificate(e, "e1", 2.0, [-4.0, 0.0])
    });
    ex.claim(
        "mu = -2, zeta = (0, -4) solves the explicit S system at e2",
        true,
        |e| multiplier_certificate(e, "e2", -2.0, [0.0, -4.0]),
    );
    ex.claim(
        "explicitly S-stationary with respect to every listed lambda",
        true,
        |e| known(e.report(0).explicit_s),
    );
    ex.claim("implicitly S-stationary", false, |e| known(e.report(0).implicit_s));
    ex.claim("graph regular sum rule holds for every listed lambda", true, |e| {
        let r = e.report(0);
        Ok(r.per_lambda.iter().all(|l| l.regular_sum_rule == Some(true)))
    });
    ex.claim("regular sum rule for M and dom K holds", false, |e| {
        known(e.report(0).implicit_regular_sum_rule)
    });
    ex.claim(
        "tangent cone of dom K equals the union of dom DK over the vertices of K_cc(0)",
        true,
        |e| {
            let c = e.case(0);
            let mut branches = Vec::new();
            for l in ["e1", "e2", "corner"] {
                let d = crate::stationarity::graph_derivative_domain(c, e.lambda(0, l)?)?;
                branches.extend(d.branches().iter().cloned());
            }
            equal(&ConeUnion::simplified(branches)?, c.domk_tangent.as_ref().expect("set"))
        },
    );
    ex.claim("stationarity flags respect the unconditional implications", true, |e| {
        Ok(e.report(0).consistent())
    });
    ex.verdict =
        Some("the origin is explicitly S-stationary for every multiplier class but not implicitly S-stationary");
    Ok(ex)
}

/// `∇f(0) + μ(1,-1) + ζ = 0`, `μ(1,-1) ∈ N̂_M(0)` and `ζ ∈ D̂*K(0,λ̄)(0)`.
fn multiplier_certificate(e: &AcademicCase, label: &str, mu: f64, zeta: [f64; 2]) -> Result<bool, ModelError> {
    let c = e.case(0);
    let residual = [c.grad_f[0] + mu + zeta[0], c.grad_f[1] - mu + zeta[1]];
    let nm = c.m_regular.as_ref().expect("set");
    let d = regular_coderivative_at_zero(c, e.lambda(0, label)?)?;
    Ok(residual.iter().all(|r| r.abs() < 1e-12) && nm.contains(&[mu, -mu], DUAL_TOL) && d.contains(&zeta, DUAL_TOL))
}

/// `min -z₂` s.t. `z₂ >= 0`, `z₁z₂ <= 0`.
pub struct VanishingProblem;

impl NlpProblem for VanishingProblem {
    fn dim(&self) -> usize {
        2
    }
    fn n_ineq(&self) -> usize {
        2
    }
    fn objective(&self, w: &[f64]) -> f64 {
        -w[1]
    }
    fn objective_grad(&self, _w: &[f64]) -> Vec<f64> {
        vec![0.0, -1.0]
    }
    fn ineq(&self, w: &[f64]) -> Vec<f64> {
        vec![-w[1], w[0] * w[1]]
    }
    fn ineq_jacobian(&self, w: &[f64]) -> Vec<Vec<f64>> {
        vec![vec![0.0, -1.0], vec![w[1], w[0]]]
    }
    fn set(&self) -> &dyn GeometricSet {
        &crate::sets::FullSpace(2)
    }
}

/// `(z₁, z₂, λ)` with `z₁` free and `z₂, λ >= 0`, `z₂λ = 0`.
pub struct FreeComplementarity {
    pair: ComplementaritySet,
}

impl FreeComplementarity {
    fn new() -> Self {
        FreeComplementarity {
            pair: ComplementaritySet::new(vec![f64::INFINITY], vec![f64::INFINITY]).expect("valid bounds"),
        }
    }
}

impl GeometricSet for FreeComplementarity {
    fn dim(&self) -> usize {
        3
    }
    fn member(&self, w: &[f64], tol: f64) -> bool {
        w.len() == 3 && w[0].is_finite() && self.pair.member(&w[1..], tol)
    }
    fn project(&self, w: &[f64]) -> Vec<f64> {
        let mut out = vec![w[0]];
        out.extend(self.pair.project(&w[1..]));
        out
    }
    fn normal_distance(&self, w: &[f64], v: &[f64]) -> Option<f64> {
        let d = self.pair.normal_distance(&w[1..], &v[1..]).ok()?;
        Some((d * d + v[0] * v[0]).sqrt())
    }
}

/// The complementarity reformulation `min -z₂` s.t. `z₁ - λ <= 0` over
/// [`FreeComplementarity`].
pub struct VanishingRefProblem {
    domain: FreeComplementarity,
}

impl Default for VanishingRefProblem {
    fn default() -> Self {
        VanishingRefProblem {
            domain: FreeComplementarity::new(),
        }
    }
}

impl NlpProblem for VanishingRefProblem {
    fn dim(&self) -> usize {
        3
    }
    fn n_ineq(&self) -> usize {
        1
    }
    fn objective(&self, w: &[f64]) -> f64 {
        -w[1]
    }
    fn objective_grad(&self, _w: &[f64]) -> Vec<f64> {
        vec![0.0, -1.0, 0.0]
    }
    fn ineq(&self, w: &[f64]) -> Vec<f64> {
        vec![w[0] - w[2]]
    }
    fn ineq_jacobian(&self, _w: &[f64]) -> Vec<Vec<f64>> {
        vec![vec![1.0, 0.0, -1.0]]
    }
    fn set(&self) -> &dyn GeometricSet {
        &self.domain
    }
}

/// Whether any of `samples` seeded feasible points within `radius` of
/// `center` has a smaller objective.
fn improving_neighbour(problem: &dyn NlpProblem, center: &[f64], radius: f64, samples: usize) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let f0 = problem.objective(center);
    for _ in 0..samples {
        let trial: Vec<f64> = center.iter().map(|c| c + radius * rng.gen_range(-1.0..=1.0)).collect();
        let w = problem.set().project(&trial);
        let feasible = problem.ineq(&w).iter().all(|g| *g <= 0.0) && dist(&w, center) <= radius * 2.0;
        if feasible && problem.objective(&w) < f0 - 1e-12 {
            return true;
        }
    }
    false
}

/// `min -z₂` s.t. `z₂ >= 0`, `z₁z₂ <= 0` and its complementarity
/// reformulation, at `z̄ = 0` with `λ̄ ∈ {0, 1}`.
pub fn example_5_5() -> Result<AcademicCase, ModelError> {
    let mut ex = AcademicCase::new("5.5", "a spurious local minimizer of the complementarity reformulation");
    let domain = poly(VANISHING_DOMAIN, "vanishing_domain")?;
    let graph = poly(VANISHING_GRAPH, "vanishing_graph")?;
    let z0 = [0.0, 0.0];
    let mut lambdas = Vec::new();
    for (label, lam) in [("1", 1.0), ("0", 0.0)] {
        let p = [0.0, 0.0, lam];
        let t = graph.tangent_cone(&p)?;
        lambdas.push(LambdaData {
            label: label.into(),
            lambda: vec![lam],
            graph_regular: Some(graph.regular_normal_cone(&p)?.into()),
            graph_limiting: Some(graph.limiting_normal_cone(&p)?),
            // M = R², so (M×R)∩gph K is the graph itself
            joint_tangent: Some(t.clone()),
            graph_tangent: Some(t),
            joint_regular: None,
        });
    }
    let case = StationarityCase {
        name: "vanishing example at z = 0".into(),
        grad_f: vec![0.0, -1.0],
        m: 1,
        m_tangent: Some(ConeUnion::full(2)),
        m_limiting: Some(ConeUnion::zero(2)),
        domk_tangent: Some(domain.tangent_cone(&z0)?),
        domk_limiting: Some(domain.limiting_normal_cone(&z0)?),
        abstract_tangent: Some(domain.tangent_cone(&z0)?),
        abstract_limiting: Some(domain.limiting_normal_cone(&z0)?),
        lambdas,
        ..StationarityCase::default()
    };
    ex.sets.insert("domain", domain);
    ex.sets.insert("graph", graph);
    ex.add_case(case)?;
    ex.problems.push(NamedProblem {
        name: "vanishing problem",
        problem: Box::new(VanishingProblem),
        start: vec![0.0, 0.0],
    });
    ex.problems.push(NamedProblem {
        name: "complementarity reformulation",
        problem: Box::new(VanishingRefProblem::default()),
        start: vec![0.0, 0.0, 1.0],
    });

    ex.claim("K_vc(0) is R_+", true, |e| {
        let g = e.set("graph")?;
        let inside = [0.0, 0.5, 1.0, 10.0, 1e6]
            .iter()
            .all(|t| g.member(&[0.0, 0.0, *t], 1e-12));
        Ok(inside && !g.member(&[0.0, 0.0, -1e-6], 1e-12))
    });
    ex.claim("explicitly B-stationary with respect to lambda = 1", true, |e| {
        e.lambda_flag(0, "1", |l| l.explicit_b)
    });
    ex.claim("explicitly B-stationary with respect to lambda = 0", false, |e| {
        e.lambda_flag(0, "0", |l| l.explicit_b)
    });
    ex.claim("abstractly B-stationary at z = 0", false, |e| {
        known(e.report(0).abstract_b)
    });
    ex.claim(
        "((0,0),1) is a local minimizer of the reformulation (sampled neighbourhood)",
        true,
        |_| {
            Ok(!improving_neighbour(
                &VanishingRefProblem::default(),
                &[0.0, 0.0, 1.0],
                1e-2,
                4000,
            ))
        },
    );
    ex.claim(
        "((0,0),0) is a local minimizer of the reformulation (sampled neighbourhood)",
        false,
        |_| {
            Ok(!improving_neighbour(
                &VanishingRefProblem::default(),
                &[0.0, 0.0, 0.0],
                1e-2,
                4000,
            ))
        },
    );
    ex.claim(
        "(0,0) is a local minimizer of the vanishing problem (sampled neighbourhood)",
        false,
        |_| Ok(!improving_neighbour(&VanishingProblem, &[0.0, 0.0], 1e-2, 4000)),
    );
    ex.claim(
        "psi(z) = max(z1, 0) lies in K_vc(z) for sampled feasible z",
        true,
        |e| {
            let g = e.set("graph")?;
            let d = e.set("domain")?;
            let mut rng = ChaCha8Rng::seed_from_u64(11);
            let mut ok = true;
            for _ in 0..2000 {
                let z = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
                if d.member(&z, 0.0) {
                    let psi = kvc_selection(&[z[0]]);
                    ok &= g.member(&[z[0], z[1], psi[0]], 1e-12);
                }
            }
            Ok(ok)
        },
    );
    ex.claim(
        "tangent cone of dom K equals the union of dom DK over lambda in {0, 1}",
        true,
        |e| {
            let c = e.case(0);
            let mut branches = Vec::new();
            for l in ["0", "1"] {
                let d = crate::stationarity::graph_derivative_domain(c, e.lambda(0, l)?)?;
                branches.extend(d.branches().iter().cloned());
            }
            equal(&ConeUnion::simplified(branches)?, c.domk_tangent.as_ref().expect("set"))
        },
    );
    ex.claim("stationarity flags respect the unconditional implications", true, |e| {
        Ok(e.report(0).consistent())
    });
    ex.verdict = Some("refuted: ((0,0),1) is explicitly B-stationary and even locally optimal in (z, lambda), yet (0,0) is neither abstractly B-stationary nor a local minimizer");
    Ok(ex)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_example_passes() {
        for id in EXAMPLE_IDS {
            let ex = example(id).unwrap();
            for c in ex.verify() {
                assert!(c.passed(), "{id}: {} -> {:?}", c.statement, c.observed);
            }
        }
    }

    #[test]
    fn unknown_id() {
        assert!(matches!(example("9.9"), Err(ModelError::UnknownExample(_))));
    }
}
