//! JSON form of a [`StationarityCase`]. Cones are strings in the cone
//! literal format; `expect` maps flag names to the verdicts a run must
//! reproduce.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::polycone::{format_cone_union, parse_cone_union, ConeUnion};

use super::{LambdaData, StationarityCase, StationarityError, StationarityReport};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LambdaFile {
    pub label: String,
    pub lambda: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph_tangent: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph_regular: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph_limiting: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub joint_tangent: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub joint_regular: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseFile {
    pub name: String,
    pub grad_f: Vec<f64>,
    #[serde(default)]
    pub m: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_tangent: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_regular: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_limiting: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domk_tangent: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domk_regular: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domk_limiting: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub abstract_tangent: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub abstract_regular: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub abstract_limiting: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub lambdas: Vec<LambdaFile>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub expect: BTreeMap<String, bool>,
}

fn cone(src: &Option<String>, field: &str) -> Result<Option<ConeUnion>, StationarityError> {
    src.as_deref()
        .map(|s| parse_cone_union(s).map_err(|e| StationarityError::Parse(format!("{field}: {e}"))))
        .transpose()
}

fn text(c: &Option<ConeUnion>) -> Option<String> {
    c.as_ref().map(format_cone_union)
}

impl CaseFile {
    pub fn from_json(src: &str) -> Result<Self, StationarityError> {
        let f: CaseFile = serde_json::from_str(src).map_err(|e| StationarityError::Parse(e.to_string()))?;
        if f.grad_f
            .iter()
            .chain(f.lambdas.iter().flat_map(|l| &l.lambda))
            .any(|x| !x.is_finite())
        {
            return Err(StationarityError::Parse("non-finite entry".into()));
        }
        Ok(f)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("case files always serialize")
    }

    pub fn to_case(&self) -> Result<StationarityCase, StationarityError> {
        let mut lambdas = Vec::with_capacity(self.lambdas.len());
        for l in &self.lambdas {
            let at = |f: &str| format!("lambda '{}' {f}", l.label);
            lambdas.push(LambdaData {
                label: l.label.clone(),
                lambda: l.lambda.clone(),
                graph_tangent: cone(&l.graph_tangent, &at("graph_tangent"))?,
                graph_regular: cone(&l.graph_regular, &at("graph_regular"))?,
                graph_limiting: cone(&l.graph_limiting, &at("graph_limiting"))?,
                joint_tangent: cone(&l.joint_tangent, &at("joint_tangent"))?,
                joint_regular: cone(&l.joint_regular, &at("joint_regular"))?,
            });
        }
        let case = StationarityCase {
            name: self.name.clone(),
            grad_f: self.grad_f.clone(),
            m: self.m,
            m_tangent: cone(&self.m_tangent, "m_tangent")?,
            m_regular: cone(&self.m_regular, "m_regular")?,
            m_limiting: cone(&self.m_limiting, "m_limiting")?,
            domk_tangent: cone(&self.domk_tangent, "domk_tangent")?,
            domk_regular: cone(&self.domk_regular, "domk_regular")?,
            domk_limiting: cone(&self.domk_limiting, "domk_limiting")?,
            abstract_tangent: cone(&self.abstract_tangent, "abstract_tangent")?,
            abstract_regular: cone(&self.abstract_regular, "abstract_regular")?,
            abstract_limiting: cone(&self.abstract_limiting, "abstract_limiting")?,
            lambdas,
        };
        case.validate()?;
        Ok(case)
    }

    pub fn from_case(case: &StationarityCase, expect: BTreeMap<String, bool>) -> Self {
        CaseFile {
            name: case.name.clone(),
            grad_f: case.grad_f.clone(),
            m: case.m,
            m_tangent: text(&case.m_tangent),
            m_regular: text(&case.m_regular),
            m_limiting: text(&case.m_limiting),
            domk_tangent: text(&case.domk_tangent),
            domk_regular: text(&case.domk_regular),
            domk_limiting: text(&case.domk_limiting),
            abstract_tangent: text(&case.abstract_tangent),
            abstract_regular: text(&case.abstract_regular),
            abstract_limiting: text(&case.abstract_limiting),
            lambdas: case
                .lambdas
                .iter()
                .map(|l| LambdaFile {
                    label: l.label.clone(),
                    lambda: l.lambda.clone(),
                    graph_tangent: text(&l.graph_tangent),
                    graph_regular: text(&l.graph_regular),
                    graph_limiting: text(&l.graph_limiting),
                    joint_tangent: text(&l.joint_tangent),
                    joint_regular: text(&l.joint_regular),
                })
                .collect(),
            expect,
        }
    }

    /// Expected verdicts the report fails to reproduce, including unknown
    /// flag names and checks that could not run.
    pub fn mismatches(&self, report: &StationarityReport) -> Vec<String> {
        self.expect
            .iter()
            .filter_map(|(k, want)| match report.flag(k) {
                None => Some(format!("{k}: unknown flag")),
                Some(None) => Some(format!("{k}: not computable from the case data")),
                Some(Some(got)) if got != *want => Some(format!("{k}: expected {want}, got {got}")),
                _ => None,
            })
            .collect()
    }
}
