//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Runs as a plain binary so the lines always reach the output.

mod common;

use std::sync::OnceLock;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ivopt_core::io::generate_synthetic;
use ivopt_core::model::{
    brute_force_pop, brute_force_pop_ref, example_2_1, example_4_12, example_5_2, example_5_5, solve_portfolio,
    PortfolioInstance, PortfolioModel, PortfolioRun, VanishingProblem, VanishingRefProblem,
};
use ivopt_core::polycone::{ConeUnion, ConvexCone, CoordKind};
use ivopt_core::sets::{BoxSparsitySet, ComplementaritySet};
use ivopt_core::solver::{alm_solve, aug_lagrangian, AlmConfig, AlmResult, NlpProblem, QuadraticProblem, Termination};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(t: Instant, limit: Duration) -> Result<Duration, String> {
    let e = t.elapsed();
    ensure(e < limit, format!("took {e:?}, limit {limit:?}"))?;
    Ok(e)
}

fn eq(a: &ConeUnion, b: &ConeUnion, what: &str) -> Result<(), String> {
    ensure(a.equals(b).map_err(|e| e.to_string())?, format!("{what} differs"))
}

fn coord(k: &[CoordKind]) -> ConeUnion {
    ConvexCone::coordinate(k).into()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

fn criterion_1() -> Outcome {
    use CoordKind::*;
    let t = Instant::now();
    let ex = example_2_1().map_err(|e| e.to_string())?;
    let c = |n| ex.cone(n).map_err(|e| e.to_string());
    eq(
        c("regular_axes")?,
        &coord(&[Nonpos, Nonpos]),
        "regular normals of the axes",
    )?;
    let anti: ConeUnion = ConvexCone::from_h(2, vec![], vec![vec![1.0, 1.0]])
        .map_err(|e| e.to_string())?
        .into();
    eq(c("regular_diagonal")?, &anti, "regular normals of the diagonal")?;
    eq(
        c("regular_meet")?,
        &ConeUnion::full(2),
        "regular normals of the intersection",
    )?;
    let sum_rule = c("regular_meet")?
        .equals(c("regular_sum")?)
        .map_err(|e| e.to_string())?;
    ensure(!sum_rule, "sum rule reported as holding")?;
    ensure(ex.all_pass(), "an example claim failed")?;
    let e = within(t, Duration::from_secs(1))?;
    Ok(format!("three cones equal, sum rule false, {e:.2?}"))
}

fn criterion_2() -> Outcome {
    let t = Instant::now();
    let ex = example_5_2().map_err(|e| e.to_string())?;
    let r = ex.report(0);
    ensure(r.per_lambda.len() >= 3, "fewer than three multiplier classes")?;
    for l in &r.per_lambda {
        ensure(
            l.explicit_s == Some(true),
            format!("explicit S at lambda {} is {:?}", l.label, l.explicit_s),
        )?;
        ensure(
            l.regular_sum_rule == Some(true),
            format!("explicit sum rule at lambda {} is {:?}", l.label, l.regular_sum_rule),
        )?;
    }
    ensure(r.explicit_s == Some(true), "explicit S overall")?;
    ensure(r.implicit_s == Some(false), format!("implicit S is {:?}", r.implicit_s))?;
    ensure(
        r.implicit_regular_sum_rule == Some(false),
        format!("implicit sum rule is {:?}", r.implicit_regular_sum_rule),
    )?;
    ensure(ex.all_pass(), "an example claim failed")?;
    let e = within(t, Duration::from_secs(1))?;
    Ok(format!(
        "explicit S on {} multipliers, implicit S false, {e:.2?}",
        r.per_lambda.len()
    ))
}

fn criterion_3() -> Outcome {
    let t = Instant::now();
    let ex = example_5_5().map_err(|e| e.to_string())?;
    let r = ex.report(0);
    let flag = |label: &str| {
        r.per_lambda
            .iter()
            .find(|l| l.label == label)
            .and_then(|l| l.explicit_b)
    };
    ensure(
        flag("1") == Some(true),
        format!("explicit B at lambda 1 is {:?}", flag("1")),
    )?;
    ensure(
        flag("0") == Some(false),
        format!("explicit B at lambda 0 is {:?}", flag("0")),
    )?;
    ensure(r.abstract_b == Some(false), format!("abstract B is {:?}", r.abstract_b))?;
    ensure(ex.all_pass(), "an example claim failed")?;
    let e = within(t, Duration::from_secs(1))?;
    Ok(format!("explicit B true/false, abstract B false, {e:.2?}"))
}

fn criterion_4() -> Outcome {
    use CoordKind::*;
    let ex = example_4_12().map_err(|e| e.to_string())?;
    let c = |n| ex.cone(n).map_err(|e| e.to_string());
    eq(c("tangent_m_times_r_computed")?, &coord(&[Nonpos, Free]), "T_M x R")?;
    eq(c("tangent_graph")?, &coord(&[Nonneg, Free]), "T_gphK")?;
    eq(c("tangent_meet_computed")?, &coord(&[Zero, Free]), "their intersection")?;
    eq(c("tangent_joint")?, &ConeUnion::zero(2), "joint tangent cone")?;
    let rule = ex.report(0).per_lambda[0].tangent_rule;
    ensure(rule == Some(false), format!("tangent rule is {rule:?}"))?;
    ensure(ex.all_pass(), "an example claim failed")?;
    Ok("four cones reproduced, tangent rule false".into())
}

fn subsets(n: usize, max: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n)
        .filter(|m| m.count_ones() as usize <= max)
        .map(|m| (0..n).filter(|i| m & (1 << i) != 0).collect())
        .collect()
}

fn brute_box(set: &BoxSparsitySet, z: &[f64]) -> f64 {
    subsets(set.n(), set.kappa())
        .iter()
        .map(|s| {
            let p: Vec<f64> = (0..set.n())
                .map(|i| {
                    if s.contains(&i) {
                        z[i].clamp(set.lower()[i], set.upper()[i])
                    } else {
                        0.0
                    }
                })
                .collect();
            dist(&p, z)
        })
        .fold(f64::INFINITY, f64::min)
}

fn brute_cc(set: &ComplementaritySet, w: &[f64]) -> f64 {
    let n = set.n();
    subsets(n, n)
        .iter()
        .map(|s| {
            let mut p = vec![0.0; 2 * n];
            for i in 0..n {
                if s.contains(&i) {
                    p[i] = w[i].clamp(0.0, set.z_upper()[i]);
                } else {
                    p[n + i] = w[n + i].clamp(0.0, set.lambda_upper()[i]);
                }
            }
            dist(&p, w)
        })
        .fold(f64::INFINITY, f64::min)
}

fn bound(rng: &mut ChaCha8Rng, sign: f64) -> f64 {
    if rng.gen_bool(0.2) {
        sign * f64::INFINITY
    } else if rng.gen_bool(0.1) {
        0.0
    } else {
        sign * rng.gen_range(0.1..2.0)
    }
}

fn criterion_5() -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    for k in 0..1000 {
        let n = rng.gen_range(2..=8);
        let x: Vec<f64> = (0..2 * n).map(|_| rng.gen_range(-3.0..3.0)).collect();
        if k % 2 == 0 {
            let lo = (0..n).map(|_| bound(&mut rng, -1.0)).collect();
            let hi = (0..n).map(|_| bound(&mut rng, 1.0)).collect();
            let set = BoxSparsitySet::new(rng.gen_range(1..n), lo, hi).map_err(|e| e.to_string())?;
            let z = &x[..n];
            let p = set.project(z);
            ensure(set.member(&p, 1e-12), format!("box projection {p:?} is not a member"))?;
            worst = worst.max((dist(&p, z) - brute_box(&set, z)).abs());
        } else {
            let u = (0..n).map(|_| bound(&mut rng, 1.0)).collect();
            let v = (0..n).map(|_| bound(&mut rng, 1.0)).collect();
            let set = ComplementaritySet::new(u, v).map_err(|e| e.to_string())?;
            let p = set.project(&x);
            ensure(
                set.member(&p, 1e-12),
                format!("complementarity projection {p:?} is not a member"),
            )?;
            worst = worst.max((dist(&p, &x) - brute_cc(&set, &x)).abs());
        }
    }
    ensure(worst <= 1e-10, format!("distance gap {worst:.3e}"))?;
    let e = within(t, Duration::from_secs(30))?;
    Ok(format!("1000 points, largest distance gap {worst:.1e}, {e:.2?}"))
}

fn criterion_6() -> Outcome {
    let t = Instant::now();
    let (n, err) = common::check_cone_grid();
    if let Some(err) = err {
        return Err(err);
    }
    let e = within(t, Duration::from_secs(60))?;
    Ok(format!("{n} grid points, {e:.2?}"))
}

fn criterion_7() -> Outcome {
    let ex = example_5_2().map_err(|e| e.to_string())?;
    let p = &ex.problems[0];
    let r = alm_solve(p.problem.as_ref(), &p.start, &AlmConfig::default());
    ensure(r.violation < 1e-4, format!("V = {:.3e}", r.violation))?;
    ensure(norm(&r.w) <= 1e-3, format!("|z| = {:.3e}", norm(&r.w)))?;
    ensure(r.outer_iters <= 200, format!("{} outer iterations", r.outer_iters))?;
    Ok(format!(
        "V = {:.1e}, |z| = {:.1e}, {} outer iterations",
        r.violation,
        norm(&r.w),
        r.outer_iters
    ))
}

/// Criterion 9's sweep, shared with the invariant check.
struct Sweep {
    runs: Vec<(String, usize, PortfolioModel, PortfolioRun)>,
    elapsed: Duration,
}

fn sweep() -> &'static Result<Sweep, String> {
    static SWEEP: OnceLock<Result<Sweep, String>> = OnceLock::new();
    SWEEP.get_or_init(|| {
        let t = Instant::now();
        let cfg = AlmConfig::default();
        let mut runs = Vec::new();
        for seed in 1..=20 {
            let base = generate_synthetic(seed, 50, 5, 5);
            for kappa in [5, 10] {
                let inst = base.with_kappa(kappa).map_err(|e| e.to_string())?;
                for model in [PortfolioModel::Implicit, PortfolioModel::Explicit] {
                    let run = solve_portfolio(&inst, model, &cfg).map_err(|e| e.to_string())?;
                    runs.push((inst.name.clone(), kappa, model, run));
                }
            }
        }
        Ok(Sweep {
            runs,
            elapsed: t.elapsed(),
        })
    })
}

fn alm_invariants(r: &AlmResult, cfg: &AlmConfig) -> Result<(), String> {
    for (k, row) in r.trace.iter().enumerate() {
        ensure(row.min_mu >= 0.0, format!("mu < 0 at k = {k}"))?;
        if let Some(next) = r.trace.get(k + 1) {
            ensure(next.rho >= row.rho, format!("rho decreased at k = {k}"))?;
            let raise = k >= 1 && row.v > cfg.tau * r.trace[k - 1].v;
            let raised = next.rho > row.rho;
            ensure(
                raise == raised,
                format!("rho update at k = {k}: expected {raise}, got {raised}"),
            )?;
            if raised {
                ensure(
                    next.rho == row.rho * cfg.beta,
                    format!("rho not multiplied by beta at k = {k}"),
                )?;
            }
        }
    }
    ensure(r.mu.iter().all(|m| *m >= 0.0), "final mu < 0")?;
    ensure(
        r.outer_iters == r.trace.len() && r.outer_iters <= cfg.max_outer,
        "outer cap",
    )?;
    ensure(r.inner_iters <= cfg.max_inner_total, "inner cap")?;
    let inner_sum: usize = r.trace.iter().map(|t| t.inner_iters).sum();
    ensure(inner_sum == r.inner_iters, "inner iteration count")?;
    match r.reason {
        Termination::Converged => ensure(r.violation < cfg.eps_tol, "converged above eps_tol")?,
        Termination::PenaltyCap => ensure(r.rho > cfg.max_penalty, "penalty cap below 1e18")?,
        Termination::InnerCap => ensure(r.inner_iters >= cfg.max_inner_total, "inner cap not reached")?,
        Termination::OuterCap => ensure(r.outer_iters == cfg.max_outer, "outer cap not reached")?,
        Termination::StepsizeFloor => {}
    }
    if r.reason != Termination::PenaltyCap {
        let last = r.trace.last().map_or(cfg.rho0, |t| t.rho);
        ensure(last <= cfg.max_penalty, "penalty above 1e18 without stopping")?;
    }
    Ok(())
}

fn criterion_8() -> Outcome {
    let cfg = AlmConfig::default();
    ensure(
        cfg.max_outer == 200
            && cfg.max_inner_total == 100_000
            && cfg.min_inverse_stepsize == 1e-20
            && cfg.max_penalty == 1e18,
        "default caps differ from 200 / 1e5 / 1e-20 / 1e18",
    )?;
    let sweep = sweep().as_ref().map_err(|e| e.clone())?;
    for (name, kappa, model, run) in &sweep.runs {
        alm_invariants(&run.result, &cfg).map_err(|e| format!("{name} kappa={kappa} {model}: {e}"))?;
    }
    Ok(format!("{} benchmark runs", sweep.runs.len()))
}

fn criterion_9() -> Outcome {
    let sweep = sweep().as_ref().map_err(|e| e.clone())?;
    let (mut both, mut wins) = (0, 0);
    for pair in sweep.runs.chunks(2) {
        let (imp, exp) = (&pair[0].3, &pair[1].3);
        if imp.result.reason == Termination::Converged && exp.result.reason == Termination::Converged {
            both += 1;
            if imp.objective <= exp.objective + 1e-8 {
                wins += 1;
            }
        }
    }
    ensure(both > 0, "no pair where both models converged")?;
    let share = wins as f64 / both as f64;
    ensure(share >= 0.7, format!("implicit no worse on {wins}/{both}"))?;
    ensure(
        sweep.elapsed < Duration::from_secs(600),
        format!("took {:?}", sweep.elapsed),
    )?;
    Ok(format!(
        "implicit no worse on {wins}/{both} pairs where both converged, {:.2?}",
        sweep.elapsed
    ))
}

/// No sampled feasible point beats the enumerated optimum.
fn sampled_lower(inst: &PortfolioInstance, rng: &mut ChaCha8Rng) -> f64 {
    let mut best = f64::INFINITY;
    for _ in 0..4000 {
        let mut z: Vec<f64> = (0..inst.n).map(|_| rng.gen::<f64>()).collect();
        let drop = rng.gen_range(0..inst.n);
        if inst.kappa < inst.n {
            z[drop] = 0.0;
        }
        let s: f64 = z.iter().sum();
        z.iter_mut().for_each(|x| *x /= s);
        if inst.feasible(&z, 0.0) {
            best = best.min(inst.objective(&z));
        }
    }
    best
}

fn criterion_10() -> Outcome {
    let cfg = AlmConfig {
        eps_tol: 1e-9,
        ..AlmConfig::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut close = 0;
    let mut worst_gap = 0.0f64;
    for seed in 1..=50u64 {
        let kappa = 1 + (seed % 2) as usize;
        let inst = generate_synthetic(1000 + seed, 3, 2, kappa);
        let (v, _) = brute_force_pop(&inst).ok_or(format!("{}: no feasible support", inst.name))?;
        let (v_ref, _) = brute_force_pop_ref(&inst).ok_or(format!("{}: no feasible branch", inst.name))?;
        worst_gap = worst_gap.max((v - v_ref).abs());
        ensure((v - v_ref).abs() <= 1e-8, format!("{}: {v} vs {v_ref}", inst.name))?;
        ensure(
            sampled_lower(&inst, &mut rng) >= v - 1e-12,
            format!("{}: sampled point beats the optimum", inst.name),
        )?;
        let run = solve_portfolio(&inst, PortfolioModel::Implicit, &cfg).map_err(|e| e.to_string())?;
        if run.result.reason == Termination::Converged && (run.objective - v).abs() <= 1e-6 {
            close += 1;
        }
    }
    ensure(close >= 40, format!("ALM within 1e-6 on {close}/50"))?;
    Ok(format!(
        "optima agree to {worst_gap:.1e}, ALM within 1e-6 on {close}/50"
    ))
}

fn random_quadratic(rng: &mut ChaCha8Rng) -> QuadraticProblem<BoxSparsitySet> {
    let n = rng.gen_range(2..=6);
    let mut q = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let v = rng.gen_range(-2.0..2.0);
            q[i][j] = v;
            q[j][i] = v;
        }
    }
    let row = |rng: &mut ChaCha8Rng| {
        (
            (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect(),
            rng.gen_range(-1.0..1.0),
        )
    };
    QuadraticProblem {
        q_mat: q,
        q_lin: (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect(),
        constant: 0.0,
        ineq_rows: (0..rng.gen_range(0..=3)).map(|_| row(rng)).collect(),
        eq_rows: (0..rng.gen_range(0..=2)).map(|_| row(rng)).collect(),
        domain: BoxSparsitySet::unbounded(n, 1).expect("n >= 2"),
    }
}

fn criterion_11() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst = 0.0f64;
    let mut done = 0;
    while done < 100 {
        let problem: Box<dyn NlpProblem> = match done % 5 {
            3 => Box::new(VanishingProblem),
            4 => Box::new(VanishingRefProblem::default()),
            _ => Box::new(random_quadratic(&mut rng)),
        };
        let n = problem.dim();
        let w: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let mu: Vec<f64> = (0..problem.n_ineq()).map(|_| rng.gen_range(0.0..2.0)).collect();
        let nu: Vec<f64> = (0..problem.n_eq()).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let rho = 10f64.powf(rng.gen_range(-1.0..2.0));
        // keep away from the kinks of max(g + mu/rho, 0)
        if problem
            .ineq(&w)
            .iter()
            .zip(&mu)
            .any(|(g, m)| (g + m / rho).abs() < 1e-3)
        {
            continue;
        }
        let (_, grad) = aug_lagrangian(problem.as_ref(), &w, &mu, &nu, rho);
        let h = 1e-6;
        let fd: Vec<f64> = (0..n)
            .map(|i| {
                let (mut a, mut b) = (w.clone(), w.clone());
                a[i] += h;
                b[i] -= h;
                let fa = aug_lagrangian(problem.as_ref(), &a, &mu, &nu, rho).0;
                let fb = aug_lagrangian(problem.as_ref(), &b, &mu, &nu, rho).0;
                (fa - fb) / (2.0 * h)
            })
            .collect();
        let rel = dist(&grad, &fd) / norm(&grad).max(1.0);
        worst = worst.max(rel);
        done += 1;
    }
    ensure(worst <= 1e-5, format!("relative error {worst:.3e}"))?;
    Ok(format!("100 cases, largest relative error {worst:.1e}"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("cone certificate for the intersection example", criterion_1),
        ("explicit but not implicit S-stationarity", criterion_2),
        ("refutation by the vanishing example", criterion_3),
        ("tangent intersection rule diagnostic", criterion_4),
        ("projections against brute force", criterion_5),
        ("closed-form cones against generic unions", criterion_6),
        ("ALM on the cardinality example", criterion_7),
        ("ALM invariants on the benchmark runs", criterion_8),
        ("implicit versus explicit benchmark", criterion_9),
        ("global optima of the two models", criterion_10),
        ("augmented Lagrangian gradient check", criterion_11),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} of {} criteria pass",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
