//! Browser bindings: projections and cones of planar structured sets, and
//! the augmented Lagrangian path on the cardinality example.
//!
//! Every export takes and returns plain strings and numbers, so the same
//! functions run natively in the tests.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use ivopt_core::model;
use ivopt_core::polycone::ConeUnion;
use ivopt_core::sets::{parse_set_spec, StructuredSet};
use ivopt_core::solver::{alm_solve, AlmConfig};

#[derive(Serialize)]
struct Projection {
    point: Vec<f64>,
    distance: f64,
}

#[derive(Serialize)]
struct Branch {
    generators: Vec<Vec<f64>>,
    lineality: Vec<Vec<f64>>,
    zero: bool,
    full: bool,
}

#[derive(Serialize)]
struct Cones {
    tangent: Vec<Branch>,
    regular: Vec<Branch>,
    limiting: Vec<Branch>,
}

#[derive(Serialize)]
struct Path {
    iterates: Vec<Vec<f64>>,
    rho: Vec<f64>,
    violation: Vec<f64>,
    reason: String,
    objective: f64,
}

fn planar(spec: &str) -> Result<StructuredSet, String> {
    let set = parse_set_spec(spec)?;
    if set.dim() != 2 {
        return Err(format!("the demo draws planar sets; '{spec}' lives in R^{}", set.dim()));
    }
    Ok(set)
}

fn json<T: Serialize>(v: &T) -> Result<String, String> {
    serde_json::to_string(v).map_err(|e| e.to_string())
}

fn branches(c: &ConeUnion) -> Vec<Branch> {
    c.branches()
        .iter()
        .map(|b| Branch {
            generators: b.generators().to_vec(),
            lineality: b.lineality().to_vec(),
            zero: b.is_zero(),
            full: b.is_full(),
        })
        .collect()
}

/// Nearest point of the set to `(x, y)` as `{"point": [..], "distance": d}`.
#[wasm_bindgen]
pub fn project(spec: &str, x: f64, y: f64) -> Result<String, String> {
    let set = planar(spec)?;
    let p = set.project(&[x, y]).ok_or("no projection for this set")?;
    let distance = ((p[0] - x).powi(2) + (p[1] - y).powi(2)).sqrt();
    json(&Projection { point: p, distance })
}

/// Tangent, regular normal and limiting normal cones at a member point.
#[wasm_bindgen]
pub fn cones(spec: &str, x: f64, y: f64) -> Result<String, String> {
    let set = planar(spec)?;
    let z = [x, y];
    let err = |e: ivopt_core::sets::SetError| e.to_string();
    json(&Cones {
        tangent: branches(&set.tangent_cone(&z).map_err(err)?),
        regular: branches(&set.regular_normal_cone(&z).map_err(err)?.into()),
        limiting: branches(&set.limiting_normal_cone(&z).map_err(err)?),
    })
}

/// Outer iterates of the solver on `min (z1+1)² + (z2+1)²` over the
/// diagonal within the axes, started at `(1, 0)`.
#[wasm_bindgen]
pub fn cardinality_path(rho0: f64, beta: f64) -> Result<String, String> {
    let cfg = AlmConfig {
        rho0,
        beta,
        ..AlmConfig::default()
    };
    cfg.validate()?;
    let ex = model::example_5_2().map_err(|e| e.to_string())?;
    let p = &ex.problems[0];
    let res = alm_solve(p.problem.as_ref(), &p.start, &cfg);
    let mut iterates = vec![p.start.clone()];
    iterates.extend(res.trace.iter().map(|r| r.w.clone()));
    json(&Path {
        iterates,
        rho: res.trace.iter().map(|r| r.rho).collect(),
        violation: res.trace.iter().map(|r| r.v).collect(),
        reason: res.reason.to_string(),
        objective: p.problem.objective(&res.w),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    fn parse(s: Result<String, String>) -> Value {
        serde_json::from_str(&s.unwrap()).unwrap()
    }

    #[test]
    fn projection_onto_axes() {
        let v = parse(project("sparsity:n=2:kappa=1", 0.3, -2.0));
        assert_eq!(v["point"], serde_json::json!([0.0, -2.0]));
        assert!((v["distance"].as_f64().unwrap() - 0.3).abs() < 1e-12);
        assert!(project("sparsity:n=3:kappa=1", 0.0, 0.0).is_err());
    }

    #[test]
    fn cones_at_origin() {
        let v = parse(cones("sparsity:n=2:kappa=1", 0.0, 0.0));
        assert!(v["regular"].as_array().unwrap().iter().all(|b| b["zero"] == true));
        assert_eq!(v["limiting"].as_array().unwrap().len(), 2);
        assert_eq!(v["tangent"].as_array().unwrap().len(), 2);
        assert!(cones("sparsity:n=2:kappa=1", 1.0, 1.0).is_err());
        let c = parse(cones("complementarity:n=1", 2.0, 0.0));
        assert_eq!(c["tangent"][0]["lineality"].as_array().unwrap().len(), 1);
    }

    #[test]
    fn path_reaches_origin() {
        let v = parse(cardinality_path(1.0, 10.0));
        assert_eq!(v["reason"], "Converged");
        let it = v["iterates"].as_array().unwrap();
        assert_eq!(it[0], serde_json::json!([1.0, 0.0]));
        let last: Vec<f64> = serde_json::from_value(it.last().unwrap().clone()).unwrap();
        assert!(last.iter().all(|x| x.abs() < 1e-3));
        assert!(cardinality_path(-1.0, 10.0).is_err());
    }
}
