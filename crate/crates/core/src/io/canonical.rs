//! The canonical instance document:
//!
//! ```json
//! {"name": "toy", "n": 2, "kappa": [1], "theta": 0.5,
//!  "c": [1, 1], "u": [1, 1], "q_lower": [1, 0, 1]}
//! ```
//!
//! `q_lower` is the lower triangle of `Q` read row by row,
//! `Q[0][0], Q[1][0], Q[1][1], Q[2][0], ...`. A full `q` matrix is accepted
//! in its place on input; output always uses `q_lower`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::model::{ModelError, PortfolioInstance};

use super::{io_err, IoError};

/// Cardinality bounds used when a file lists none.
pub const DEFAULT_KAPPAS: [usize; 3] = [5, 10, 20];

/// Those of [`DEFAULT_KAPPAS`] below `n`, or `[1]` for tiny instances.
pub fn default_kappas(n: usize) -> Vec<usize> {
    let k: Vec<usize> = DEFAULT_KAPPAS.iter().copied().filter(|k| *k < n).collect();
    if k.is_empty() {
        vec![1]
    } else {
        k
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CanonicalInstanceFile {
    pub name: String,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<Vec<usize>>,
    pub theta: f64,
    pub c: Vec<f64>,
    pub u: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q_lower: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<Vec<Vec<f64>>>,
}

impl CanonicalInstanceFile {
    pub fn from_instance(inst: &PortfolioInstance, kappas: Option<Vec<usize>>) -> Self {
        let mut lower = Vec::with_capacity(inst.n * (inst.n + 1) / 2);
        for i in 0..inst.n {
            lower.extend_from_slice(&inst.q[i][..=i]);
        }
        CanonicalInstanceFile {
            name: inst.name.clone(),
            n: inst.n,
            kappa: kappas,
            theta: inst.theta,
            c: inst.c.clone(),
            u: inst.u.clone(),
            q_lower: Some(lower),
            q: None,
        }
    }

    /// Listed bounds, or [`default_kappas`].
    pub fn kappas(&self) -> Vec<usize> {
        match &self.kappa {
            Some(k) => k.clone(),
            None => default_kappas(self.n),
        }
    }

    fn dense_q(&self) -> Result<Vec<Vec<f64>>, ModelError> {
        let n = self.n;
        match (&self.q_lower, &self.q) {
            (Some(l), None) => {
                if l.len() != n * (n + 1) / 2 {
                    return Err(ModelError::Validation(format!(
                        "q_lower has {} entries, expected {} for n = {n}",
                        l.len(),
                        n * (n + 1) / 2
                    )));
                }
                let mut q = vec![vec![0.0; n]; n];
                let mut k = 0;
                for i in 0..n {
                    for j in 0..=i {
                        q[i][j] = l[k];
                        q[j][i] = l[k];
                        k += 1;
                    }
                }
                Ok(q)
            }
            (None, Some(q)) => Ok(q.clone()),
            _ => Err(ModelError::Validation(
                "exactly one of q_lower and q must be given".into(),
            )),
        }
    }

    /// Validated instance with `κ` set to the first listed bound.
    pub fn to_instance(&self) -> Result<(PortfolioInstance, Vec<usize>), ModelError> {
        let (inst, kappas) = self.to_instance_unchecked_feasibility()?;
        for &k in &kappas {
            inst.with_kappa(k)?;
        }
        Ok((inst, kappas))
    }

    /// As [`to_instance`](Self::to_instance) without the greedy
    /// feasibility witness.
    pub fn to_instance_unchecked_feasibility(&self) -> Result<(PortfolioInstance, Vec<usize>), ModelError> {
        let kappas = self.kappas();
        let Some(&k0) = kappas.first() else {
            return Err(ModelError::Validation("no admissible kappa".into()));
        };
        if self.c.len() != self.n {
            return Err(ModelError::Validation(format!(
                "c has length {}, n = {}",
                self.c.len(),
                self.n
            )));
        }
        let inst = PortfolioInstance {
            name: self.name.clone(),
            n: self.n,
            q: self.dense_q()?,
            c: self.c.clone(),
            u: self.u.clone(),
            theta: self.theta,
            kappa: k0,
        };
        for &k in &kappas {
            PortfolioInstance {
                kappa: k,
                ..inst.clone()
            }
            .validate_structure()?;
        }
        Ok((inst, kappas))
    }
}

fn parse_file(text: &str) -> Result<CanonicalInstanceFile, IoError> {
    let file: CanonicalInstanceFile = serde_json::from_str(text).map_err(|e| IoError::Parse(e.to_string()))?;
    let mut all = file
        .c
        .iter()
        .chain(&file.u)
        .chain(file.q_lower.iter().flatten())
        .chain(file.q.iter().flatten().flatten());
    if !file.theta.is_finite() || all.any(|x| !x.is_finite()) {
        return Err(IoError::Parse("non-finite number".into()));
    }
    Ok(file)
}

/// Parses and validates a canonical document. Non-finite numbers are
/// rejected, including the `1e999` spelling of infinity.
pub fn parse_canonical_str(text: &str) -> Result<(PortfolioInstance, Vec<usize>), IoError> {
    Ok(parse_file(text)?.to_instance()?)
}

pub fn read_canonical(path: &Path) -> Result<(PortfolioInstance, Vec<usize>), IoError> {
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    parse_canonical_str(&text)
}

/// Reads an instance that may fail the feasibility witness, so that a
/// solver can be pointed at it anyway.
pub fn read_canonical_unchecked_feasibility(path: &Path) -> Result<(PortfolioInstance, Vec<usize>), IoError> {
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    Ok(parse_file(&text)?.to_instance_unchecked_feasibility()?)
}

pub fn parse_canonical(path: &Path) -> Result<PortfolioInstance, IoError> {
    Ok(read_canonical(path)?.0)
}

pub fn write_canonical(inst: &PortfolioInstance, kappas: Option<Vec<usize>>, path: &Path) -> Result<(), IoError> {
    let doc = CanonicalInstanceFile::from_instance(inst, kappas);
    let text = serde_json::to_string_pretty(&doc).map_err(|e| IoError::Parse(e.to_string()))?;
    std::fs::write(path, text + "\n").map_err(|e| io_err(path, e))
}
