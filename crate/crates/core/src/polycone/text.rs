//! Plain-text cone literals.
//!
//! ```text
//! # comment
//! DIM 2
//! BRANCH
//! GEN
//! 1 0
//! LIN
//! INEQ
//! -1 0
//! EQ
//! 0 1
//! ```
//!
//! A branch holding a `GEN` or `LIN` section is built from its generators;
//! otherwise from its `INEQ`/`EQ` rows. When both are given they must agree.
//! The leading `BRANCH` may be omitted for a single branch.

use std::fmt::Write as _;

use super::{ConeError, ConeUnion, ConvexCone};

#[derive(Default)]
struct RawBranch {
    gen: Option<Vec<Vec<f64>>>,
    lin: Option<Vec<Vec<f64>>>,
    ineq: Option<Vec<Vec<f64>>>,
    eq: Option<Vec<Vec<f64>>>,
    touched: bool,
}

#[derive(Clone, Copy)]
enum Section {
    Gen,
    Lin,
    Ineq,
    Eq,
}

impl RawBranch {
    fn slot(&mut self, s: Section) -> &mut Vec<Vec<f64>> {
        let o = match s {
            Section::Gen => &mut self.gen,
            Section::Lin => &mut self.lin,
            Section::Ineq => &mut self.ineq,
            Section::Eq => &mut self.eq,
        };
        o.get_or_insert_with(Vec::new)
    }

    fn build(self, dim: usize) -> Result<ConvexCone, ConeError> {
        let has_v = self.gen.is_some() || self.lin.is_some();
        let has_h = self.ineq.is_some() || self.eq.is_some();
        if !has_v && !has_h {
            return Err(ConeError::Parse("branch without any section".into()));
        }
        let from_h = || {
            ConvexCone::from_h(
                dim,
                self.ineq.clone().unwrap_or_default(),
                self.eq.clone().unwrap_or_default(),
            )
        };
        if !has_v {
            return from_h();
        }
        let c = ConvexCone::from_v(
            dim,
            self.gen.clone().unwrap_or_default(),
            self.lin.clone().unwrap_or_default(),
        )?;
        if has_h && !c.equals(&from_h()?)? {
            return Err(ConeError::Parse(
                "generators and constraint rows describe different cones".into(),
            ));
        }
        Ok(c)
    }
}

pub(crate) fn parse_vector(line: &str) -> Result<Vec<f64>, String> {
    line.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| {
            let x: f64 = t.parse().map_err(|_| format!("bad number '{t}'"))?;
            if x.is_finite() {
                Ok(x)
            } else {
                Err(format!("non-finite entry '{t}'"))
            }
        })
        .collect()
}

/// Parses a cone literal into a union of (synced) convex cones.
pub fn parse_cone_union(src: &str) -> Result<ConeUnion, ConeError> {
    let mut dim: Option<usize> = None;
    let mut branches: Vec<RawBranch> = vec![RawBranch::default()];
    let mut section: Option<Section> = None;
    for (lineno, raw) in src.lines().enumerate() {
        let err = |m: String| ConeError::Parse(format!("line {}: {m}", lineno + 1));
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut words = line.split_whitespace();
        let head = words.next().unwrap_or("");
        match head.to_ascii_uppercase().as_str() {
            "DIM" => {
                let d: usize = words
                    .next()
                    .and_then(|w| w.parse().ok())
                    .ok_or_else(|| err("DIM needs a positive integer".into()))?;
                if d == 0 {
                    return Err(err("DIM must be positive".into()));
                }
                dim = Some(d);
            }
            "BRANCH" => {
                if branches.last().is_some_and(|b| b.touched) {
                    branches.push(RawBranch::default());
                }
                section = None;
            }
            "GEN" => section = Some(Section::Gen),
            "LIN" => section = Some(Section::Lin),
            "INEQ" => section = Some(Section::Ineq),
            "EQ" => section = Some(Section::Eq),
            _ => {
                let s = section.ok_or_else(|| err("vector outside a section".into()))?;
                let v = parse_vector(line).map_err(err)?;
                match dim {
                    None => dim = Some(v.len()),
                    Some(d) if d != v.len() => return Err(err(format!("expected {d} entries, found {}", v.len()))),
                    _ => {}
                }
                branches.last_mut().unwrap().slot(s).push(v);
                continue;
            }
        }
        if let Some(s) = section {
            let b = branches.last_mut().unwrap();
            b.slot(s);
            b.touched = true;
        }
    }
    let dim = dim.ok_or_else(|| ConeError::Parse("cannot infer the dimension; add a DIM line".into()))?;
    let cones = branches
        .into_iter()
        .filter(|b| b.touched)
        .map(|b| b.build(dim))
        .collect::<Result<Vec<_>, _>>()?;
    ConeUnion::new(cones)
}

fn fmt_num(x: f64) -> String {
    if x.abs() < 1e-12 {
        "0".into()
    } else {
        format!("{x}")
    }
}

fn write_rows(out: &mut String, name: &str, rows: &[Vec<f64>]) {
    let _ = writeln!(out, "{name}");
    for r in rows {
        let cells: Vec<String> = r.iter().map(|x| fmt_num(*x)).collect();
        let _ = writeln!(out, "{}", cells.join(" "));
    }
}

/// Writes a union in the literal format, both representations per branch.
pub fn format_cone_union(c: &ConeUnion) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "DIM {}", c.dim());
    for b in c.branches() {
        let _ = writeln!(out, "BRANCH");
        write_rows(&mut out, "GEN", b.generators());
        write_rows(&mut out, "LIN", b.lineality());
        write_rows(&mut out, "INEQ", b.ineq_normals());
        write_rows(&mut out, "EQ", b.eq_normals());
    }
    out
}
