//! Reader for the mean-variance instances of the Frangioni–Gentile
//! collection. One instance is four whitespace-separated text files
//! sharing a stem:
//!
//! | file   | content                                          |
//! |--------|--------------------------------------------------|
//! | `.mat` | `n`, then the covariance matrix, one row a line  |
//! | `.txt` | `n`, then the expected returns, one a line       |
//! | `.bds` | `n`, then `lower upper` buy-in bounds per asset  |
//! | `.rho` | the minimum expected return                      |
//!
//! The leading `n` is optional in every file. The lower buy-in bounds have
//! no counterpart in the cardinality model and are dropped.

use std::path::{Path, PathBuf};

use crate::model::PortfolioInstance;

use super::{default_kappas, io_err, IoError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FgFiles {
    pub name: String,
    pub mat: PathBuf,
    pub txt: PathBuf,
    pub bds: PathBuf,
    pub rho: PathBuf,
}

impl FgFiles {
    /// Accepts the stem or any one of the four files.
    pub fn locate(path: &Path) -> Self {
        let stem = match path.extension().and_then(|e| e.to_str()) {
            Some("mat" | "txt" | "bds" | "rho") => path.with_extension(""),
            _ => path.to_path_buf(),
        };
        let name = stem
            .file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        let with = |ext: &str| {
            let mut s = stem.clone().into_os_string();
            s.push(".");
            s.push(ext);
            PathBuf::from(s)
        };
        FgFiles {
            name,
            mat: with("mat"),
            txt: with("txt"),
            bds: with("bds"),
            rho: with("rho"),
        }
    }
}

struct NumLines {
    file: String,
    /// `(line number, values)` for every non-blank line.
    lines: Vec<(usize, Vec<f64>)>,
    last: usize,
}

impl NumLines {
    fn read(path: &Path) -> Result<Self, IoError> {
        let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
        Self::parse(&path.display().to_string(), &text)
    }

    fn parse(file: &str, text: &str) -> Result<Self, IoError> {
        let mut lines = Vec::new();
        let mut last = 0;
        for (i, raw) in text.lines().enumerate() {
            last = i + 1;
            let mut vals = Vec::new();
            for tok in raw.split_whitespace() {
                match tok.parse::<f64>() {
                    Ok(v) if v.is_finite() => vals.push(v),
                    _ => {
                        return Err(IoError::UnrecognizedLayout {
                            file: file.into(),
                            line: i + 1,
                            message: format!("'{tok}' is not a finite number"),
                        })
                    }
                }
            }
            if !vals.is_empty() {
                lines.push((i + 1, vals));
            }
        }
        Ok(NumLines {
            file: file.into(),
            lines,
            last,
        })
    }

    fn bad(&self, line: usize, message: String) -> IoError {
        IoError::UnrecognizedLayout {
            file: self.file.clone(),
            line,
            message,
        }
    }

    /// Drops a leading count line. Without an expected count any single
    /// integer counts; with one, the value must match and the line must not
    /// be needed as data.
    fn strip_count(&mut self, rows: Option<usize>) -> Result<Option<usize>, IoError> {
        let Some((_, first)) = self.lines.first() else {
            return Err(self.bad(self.last.max(1), "no data".into()));
        };
        if first.len() != 1 || first[0] < 1.0 || first[0].fract() != 0.0 {
            return Ok(None);
        }
        let n = first[0] as usize;
        let strip = match rows {
            None => true,
            Some(r) => r == n && self.lines.len() != r,
        };
        if strip {
            self.lines.remove(0);
            Ok(Some(n))
        } else {
            Ok(None)
        }
    }

    fn expect_rows(&self, n: usize, width: usize) -> Result<(), IoError> {
        for (line, vals) in &self.lines {
            if vals.len() != width {
                return Err(self.bad(*line, format!("expected {width} values, found {}", vals.len())));
            }
        }
        if self.lines.len() < n {
            return Err(self.bad(self.last + 1, format!("truncated: {} of {n} rows", self.lines.len())));
        }
        if self.lines.len() > n {
            return Err(self.bad(self.lines[n].0, format!("more than {n} rows")));
        }
        Ok(())
    }
}

/// Assembles and validates one instance; `κ` is the first of
/// [`default_kappas`](super::default_kappas).
pub fn convert_frangioni_gentile(path: &Path) -> Result<PortfolioInstance, IoError> {
    let files = FgFiles::locate(path);
    let mut mat = NumLines::read(&files.mat)?;
    let header = mat.strip_count(None)?;
    let n = header.unwrap_or(mat.lines.len());
    mat.expect_rows(n, n)?;
    let q: Vec<Vec<f64>> = mat.lines.iter().map(|(_, v)| v.clone()).collect();

    let mut txt = NumLines::read(&files.txt)?;
    txt.strip_count(Some(n))?;
    txt.expect_rows(n, 1)?;
    let c: Vec<f64> = txt.lines.iter().map(|(_, v)| v[0]).collect();

    let mut bds = NumLines::read(&files.bds)?;
    bds.strip_count(Some(n))?;
    bds.expect_rows(n, 2)?;
    let u: Vec<f64> = bds.lines.iter().map(|(_, v)| v[1]).collect();

    let rho = NumLines::read(&files.rho)?;
    rho.expect_rows(1, 1)?;
    let theta = rho.lines[0].1[0];

    let kappa = default_kappas(n)[0];
    Ok(PortfolioInstance::new(files.name, q, c, u, theta, kappa)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fmt::Write;

    fn write_instance(dir: &Path, n: usize, header: bool) -> PathBuf {
        let stem = dir.join(format!("pard{n}_1"));
        let h = |s: &mut String| {
            if header {
                writeln!(s, "{n}").unwrap();
            }
        };
        let (mut mat, mut txt, mut bds) = (String::new(), String::new(), String::new());
        h(&mut mat);
        h(&mut txt);
        h(&mut bds);
        for i in 0..n {
            let row: Vec<String> = (0..n)
                .map(|j| {
                    format!(
                        "{:e}",
                        if i == j {
                            0.05 + i as f64 * 1e-3
                        } else {
                            1e-3 / (1 + i.abs_diff(j)) as f64
                        }
                    )
                })
                .collect();
            writeln!(mat, "{}", row.join(" ")).unwrap();
            writeln!(txt, "{}", 0.001 + 0.0001 * i as f64).unwrap();
            writeln!(bds, "0.02 1").unwrap();
        }
        let w = |ext: &str, s: &str| std::fs::write(stem.with_extension(ext), s).unwrap();
        w("mat", &mat);
        w("txt", &txt);
        w("bds", &bds);
        w("rho", "0.0015\n");
        stem.with_extension("mat")
    }

    #[test]
    fn two_hundred_assets() {
        let dir = tempfile::tempdir().unwrap();
        for header in [true, false] {
            let p = write_instance(dir.path(), 200, header);
            let inst = convert_frangioni_gentile(&p).unwrap();
            assert_eq!(inst.n, 200);
            assert_eq!(inst.name, "pard200_1");
            assert_eq!(inst.kappa, 5);
            assert_eq!(inst.theta, 0.0015);
            let out = dir.path().join("c.json");
            super::super::write_canonical(&inst, None, &out).unwrap();
            assert_eq!(super::super::parse_canonical(&out).unwrap(), inst);
        }
    }

    #[test]
    fn truncated_and_corrupt() {
        let dir = tempfile::tempdir().unwrap();
        let p = write_instance(dir.path(), 8, true);
        let mat = std::fs::read_to_string(&p).unwrap();
        let cut: Vec<&str> = mat.lines().take(6).collect();
        std::fs::write(&p, cut.join("\n")).unwrap();
        match convert_frangioni_gentile(&p) {
            Err(IoError::UnrecognizedLayout { line, message, .. }) => {
                assert_eq!(line, 7);
                assert!(message.contains("truncated"));
            }
            other => panic!("{other:?}"),
        }
        let p = write_instance(dir.path(), 8, true);
        let bds = p.with_extension("bds");
        let text = std::fs::read_to_string(&bds).unwrap().replacen("0.02 1", "0.02 x", 1);
        std::fs::write(&bds, text).unwrap();
        assert!(matches!(
            convert_frangioni_gentile(&p),
            Err(IoError::UnrecognizedLayout { line: 2, .. })
        ));
        let p = write_instance(dir.path(), 8, false);
        let txt = p.with_extension("txt");
        std::fs::write(&txt, "0.1 0.2\n").unwrap();
        assert!(matches!(
            convert_frangioni_gentile(&p),
            Err(IoError::UnrecognizedLayout { line: 1, .. })
        ));
    }
}
