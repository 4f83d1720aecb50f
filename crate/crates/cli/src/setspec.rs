//! `ivopt cones` set descriptions: the closed-form kinds plus `poly:FILE`.

use ivopt_core::sets::{parse_poly_union, parse_set_spec, StructuredSet};

pub fn parse_set(spec: &str) -> Result<StructuredSet, String> {
    if let Some(path) = spec.strip_prefix("poly:") {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))?;
        return parse_poly_union(&text)
            .map(StructuredSet::PolyUnion)
            .map_err(|e| e.to_string());
    }
    parse_set_spec(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poly_files() {
        assert!(parse_set("poly:/nope").is_err());
        let p = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/fixtures/omega_axes.poly");
        assert_eq!(parse_set(&format!("poly:{p}")).unwrap().dim(), 2);
        assert_eq!(parse_set("sparsity:n=3:kappa=1").unwrap().dim(), 3);
    }
}
