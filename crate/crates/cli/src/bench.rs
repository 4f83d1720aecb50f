//! The implicit-versus-explicit sweep.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;

use ivopt_core::io::{self, Model, OutputFormat, ResultRow};
use ivopt_core::model::{solve_portfolio, PortfolioInstance};
use ivopt_core::solver::{AlmConfig, Termination};

use crate::{parse_seeds, usage, BenchArgs, Fail, Outcome, OUT_DIR_ENV};

/// Objectives closer than this count as a tie.
pub const TIE_TOL: f64 = 1e-8;

fn dataset(dir: &Path) -> Result<Vec<PortfolioInstance>, Fail> {
    let entries = std::fs::read_dir(dir).map_err(|e| usage(format!("{}: {e}", dir.display())))?;
    let mut paths: Vec<PathBuf> = entries.filter_map(|e| e.ok().map(|e| e.path())).collect();
    paths.sort();
    let mut out = Vec::new();
    for p in paths {
        match p.extension().and_then(|e| e.to_str()) {
            Some("json") => out.push(io::read_canonical(&p).map_err(usage)?.0),
            Some("mat") => out.push(io::convert_frangioni_gentile(&p).map_err(usage)?),
            _ => {}
        }
    }
    Ok(out)
}

fn run(inst: &PortfolioInstance, model: Model, cfg: &AlmConfig, timing: bool) -> Result<ResultRow, String> {
    let t = Instant::now();
    let r = solve_portfolio(inst, model, cfg).map_err(|e| e.to_string())?;
    let secs = timing.then(|| t.elapsed().as_secs_f64());
    let a = &r.result;
    Ok(ResultRow::new(
        inst.name.clone(),
        model,
        inst.kappa,
        r.objective,
        a.outer_iters,
        a.inner_iters,
        a.rho,
        a.reason,
        secs,
    ))
}

/// `(wins, ties, losses, pairs)` of the implicit model over pairs where both
/// runs converged.
pub fn tally(rows: &[ResultRow]) -> (usize, usize, usize, usize) {
    let (mut w, mut t, mut l, mut pairs) = (0, 0, 0, 0);
    for imp in rows.iter().filter(|r| r.model == Model::Implicit) {
        pairs += 1;
        let exp = rows
            .iter()
            .find(|r| r.model == Model::Explicit && r.instance == imp.instance && r.kappa == imp.kappa);
        if let (Some(a), Some(b)) = (imp.objective, exp.and_then(|e| e.objective)) {
            if a < b - TIE_TOL {
                w += 1;
            } else if a <= b + TIE_TOL {
                t += 1;
            } else {
                l += 1;
            }
        }
    }
    (w, t, l, pairs)
}

pub(crate) fn cmd_bench(a: BenchArgs) -> Outcome {
    let cfg = a.solver.config().map_err(usage)?;
    let mut kappas = a.kappa.clone();
    kappas.sort_unstable();
    kappas.dedup();
    if kappas.is_empty() || kappas[0] == 0 {
        return Err(usage("kappa values must be positive"));
    }
    let base: Vec<PortfolioInstance> = match (&a.seeds, &a.dataset) {
        (Some(s), _) => {
            let seeds = parse_seeds(s).map_err(usage)?;
            if a.n < 2 || a.factors == 0 || kappas[0] >= a.n {
                return Err(usage(format!("need n >= 2, factors >= 1 and kappa < n = {}", a.n)));
            }
            // θ is calibrated for the smallest κ, which keeps every larger κ feasible
            seeds
                .iter()
                .map(|s| io::generate_synthetic(*s, a.n, a.factors, kappas[0]))
                .collect()
        }
        (None, Some(d)) => dataset(d)?,
        (None, None) => unreachable!("clap requires a source"),
    };
    if base.is_empty() {
        return Err(usage("no instances found"));
    }
    let mut jobs = Vec::new();
    for inst in &base {
        for &k in &kappas {
            match inst.with_kappa(k) {
                Ok(i) => {
                    jobs.push((i.clone(), Model::Implicit));
                    jobs.push((i, Model::Explicit));
                }
                Err(e) => eprintln!("ivopt: skipping {} with kappa = {k}: {e}", inst.name),
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(a.threads.unwrap_or(0))
        .build()
        .map_err(usage)?;
    let timing = !a.omit_timing;
    let results: Vec<Result<ResultRow, String>> =
        pool.install(|| jobs.par_iter().map(|(i, m)| run(i, *m, &cfg, timing)).collect());
    let mut rows = Vec::with_capacity(results.len());
    for (r, (inst, m)) in results.into_iter().zip(&jobs) {
        match r {
            Ok(row) => rows.push(row),
            Err(e) => eprintln!("ivopt: {} {m} kappa = {}: {e}", inst.name, inst.kappa),
        }
    }
    rows.sort_by(|x, y| (&x.instance, x.kappa, x.model).cmp(&(&y.instance, y.kappa, y.model)));
    if rows.is_empty() {
        return Err(Fail(crate::EXIT_ABORT, "no run completed".into()));
    }

    let out = a
        .out
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(|d| PathBuf::from(d).join("bench.csv")));
    match out {
        Some(p) => {
            if let Some(parent) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                crate::ensure_dir(parent)?;
            }
            io::emit_results(&rows, &p, OutputFormat::from_path(&p)).map_err(usage)?;
            eprintln!("wrote {} rows to {}", rows.len(), p.display());
        }
        None => io::write_results(&rows, OutputFormat::Csv, std::io::stdout().lock()).map_err(usage)?,
    }
    let (w, t, l, pairs) = tally(&rows);
    let conv = |m: Model| {
        rows.iter()
            .filter(|r| r.model == m && r.reason == Termination::Converged)
            .count()
    };
    eprintln!(
        "implicit vs explicit: {w} wins, {t} ties, {l} losses over {} pairs where both converged ({pairs} pairs)",
        w + t + l
    );
    eprintln!(
        "converged: implicit {}/{pairs}, explicit {}/{pairs}",
        conv(Model::Implicit),
        conv(Model::Explicit)
    );
    Ok(())
}
