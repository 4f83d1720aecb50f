//! Short set descriptions: `sparsity:n=2:kappa=1`,
//! `box-sparsity:kappa=1:u=1,1` (optionally `l=...`), `complementarity:n=1`
//! or `complementarity:u=...:v=...`. Vector entries may be `inf`.

use std::collections::BTreeMap;

use super::{BoxSparsitySet, ComplementaritySet, StructuredSet};

fn numbers(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|t| match t.trim() {
            "inf" => Ok(f64::INFINITY),
            t => t.parse::<f64>().map_err(|_| format!("cannot read number '{t}'")),
        })
        .collect()
}

fn count(fields: &BTreeMap<&str, &str>, key: &str) -> Result<usize, String> {
    let v = fields.get(key).ok_or_else(|| format!("missing '{key}='"))?;
    v.parse().map_err(|_| format!("'{key}' must be a nonnegative integer"))
}

pub fn parse_set_spec(spec: &str) -> Result<StructuredSet, String> {
    let (kind, rest) = spec.split_once(':').unwrap_or((spec, ""));
    let mut fields = BTreeMap::new();
    for part in rest.split(':').filter(|p| !p.is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| format!("expected key=value, got '{part}'"))?;
        fields.insert(k.trim(), v.trim());
    }
    let set = match kind {
        "sparsity" => {
            let n = count(&fields, "n")?;
            StructuredSet::BoxSparsity(
                BoxSparsitySet::unbounded(n, count(&fields, "kappa")?).map_err(|e| e.to_string())?,
            )
        }
        "box-sparsity" => {
            let u = numbers(fields.get("u").ok_or("missing 'u='")?)?;
            let set = match fields.get("l") {
                Some(l) => BoxSparsitySet::new(count(&fields, "kappa")?, numbers(l)?, u),
                None => BoxSparsitySet::with_upper(count(&fields, "kappa")?, u),
            };
            StructuredSet::BoxSparsity(set.map_err(|e| e.to_string())?)
        }
        "complementarity" => {
            let z_upper = match (fields.get("u"), fields.get("n")) {
                (Some(u), _) => numbers(u)?,
                (None, Some(_)) => vec![f64::INFINITY; count(&fields, "n")?],
                (None, None) => return Err("complementarity needs 'n=' or 'u='".into()),
            };
            let l_upper = match fields.get("v") {
                Some(v) => numbers(v)?,
                None => vec![f64::INFINITY; z_upper.len()],
            };
            StructuredSet::Complementarity(ComplementaritySet::new(z_upper, l_upper).map_err(|e| e.to_string())?)
        }
        _ => {
            return Err(format!(
                "unknown set kind '{kind}' (sparsity, box-sparsity, complementarity)"
            ))
        }
    };
    Ok(set)
}
