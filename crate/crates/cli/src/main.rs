//! `ivopt`: generate, convert and solve portfolio instances, run the
//! benchmark sweep, evaluate cones of structured sets and check
//! stationarity certificates.

mod bench;
mod setspec;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ivopt_core::io::{self, Model};
use ivopt_core::model::{self, PortfolioInstance};
use ivopt_core::polycone::{format_cone_union, ConeUnion};
use ivopt_core::sets::SetError;
use ivopt_core::solver::{alm_solve, write_trace_csv, AlmConfig, AlmResult, NlpProblem, Termination};
use ivopt_core::stationarity::{check_all, CaseFile};

/// Default directory for files written by `gen`, `convert` and `bench`.
pub const OUT_DIR_ENV: &str = "IVOPT_OUT_DIR";

pub const EXIT_USAGE: u8 = 1;
pub const EXIT_ABORT: u8 = 2;
pub const EXIT_INCONSISTENT: u8 = 3;

#[derive(Parser)]
#[command(
    name = "ivopt",
    version,
    about = "Augmented Lagrangian solver and cone toolkit for problems with implicit variables"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write seeded synthetic portfolio instances as canonical JSON.
    Gen(GenArgs),
    /// Solve one portfolio instance or one of the academic examples.
    Solve(SolveArgs),
    /// Run both models over many instances and cardinality bounds.
    Bench(BenchArgs),
    /// Print the tangent, regular normal or limiting normal cone of a set at a point.
    Cones(ConesArgs),
    /// Check the stationarity certificates of an example or a case file.
    Check(CheckArgs),
    /// Convert raw benchmark files (.mat/.txt/.bds/.rho) to canonical JSON.
    Convert(ConvertArgs),
}

/// Safeguarded augmented Lagrangian parameters.
#[derive(Args, Clone)]
struct SolverArgs {
    /// Initial penalty parameter.
    #[arg(long, default_value_t = 1.0)]
    rho0: f64,
    /// Penalty growth factor.
    #[arg(long, default_value_t = 10.0)]
    beta: f64,
    /// Required violation decrease factor before the penalty is kept.
    #[arg(long, default_value_t = 0.9)]
    tau: f64,
    /// Stop once the violation measure V falls below this.
    #[arg(long = "eps-tol", default_value_t = 1e-4)]
    eps_tol: f64,
}

impl SolverArgs {
    fn config(&self) -> Result<AlmConfig, String> {
        let cfg = AlmConfig {
            rho0: self.rho0,
            beta: self.beta,
            tau: self.tau,
            eps_tol: self.eps_tol,
            ..AlmConfig::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct GenArgs {
    /// Seeds as a list or inclusive range, e.g. `1..20` or `1,4,7`.
    #[arg(long, default_value = "1..20")]
    seeds: String,
    /// Number of assets.
    #[arg(long, default_value_t = 50)]
    n: usize,
    /// Number of factors in the covariance model.
    #[arg(long, default_value_t = 5)]
    factors: usize,
    /// Cardinality bounds stored in each file; the first calibrates theta.
    #[arg(long, value_delimiter = ',', default_value = "5,10")]
    kappa: Vec<usize>,
    /// Output directory (default: $IVOPT_OUT_DIR or the working directory).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    /// Canonical instance file.
    #[arg(required_unless_present = "example", conflicts_with = "example")]
    instance: Option<PathBuf>,
    /// Academic example id instead of an instance: 2.1, 4.12, 5.2 or 5.5.
    #[arg(long)]
    example: Option<String>,
    /// Which problem of the example, by position.
    #[arg(long, default_value_t = 0, requires = "example")]
    problem: usize,
    /// Portfolio model: implicit (cardinality set) or explicit (complementarity).
    #[arg(long, value_enum, default_value_t = ModelArg::Implicit)]
    model: ModelArg,
    /// Cardinality bound; overrides the first one listed in the file.
    #[arg(long)]
    kappa: Option<usize>,
    #[command(flatten)]
    solver: SolverArgs,
    /// Write the outer iteration trace as CSV.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Synthetic seeds, e.g. `1..20`.
    #[arg(long, conflicts_with = "dataset", required_unless_present = "dataset")]
    seeds: Option<String>,
    /// Directory of canonical .json instances or raw .mat/.txt/.bds/.rho sets.
    #[arg(long)]
    dataset: Option<PathBuf>,
    /// Number of assets of synthetic instances.
    #[arg(long, default_value_t = 50)]
    n: usize,
    /// Factors of synthetic instances.
    #[arg(long, default_value_t = 5)]
    factors: usize,
    /// Cardinality bounds.
    #[arg(long, value_delimiter = ',', default_value = "5,10,20")]
    kappa: Vec<usize>,
    #[command(flatten)]
    solver: SolverArgs,
    /// Result file, .csv or .json (default: $IVOPT_OUT_DIR/bench.csv, else stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Leave the seconds column empty so that repeated runs are byte-identical.
    #[arg(long)]
    omit_timing: bool,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Implicit,
    Explicit,
}

impl From<ModelArg> for Model {
    fn from(m: ModelArg) -> Model {
        match m {
            ModelArg::Implicit => Model::Implicit,
            ModelArg::Explicit => Model::Explicit,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Which {
    Tangent,
    Regular,
    Limiting,
}

#[derive(Args)]
struct ConesArgs {
    /// The set: `sparsity:n=N:kappa=K`, `box-sparsity:kappa=K:u=U1,U2,...`,
    /// `complementarity:n=N` or `complementarity:u=U1,...`, or `poly:FILE`
    /// for a union of polyhedra in the literal format.
    #[arg(long)]
    set: String,
    /// Comma-separated point.
    #[arg(long, allow_hyphen_values = true)]
    point: String,
    #[arg(long, value_enum, default_value_t = Which::Tangent)]
    which: Which,
}

#[derive(Args)]
struct CheckArgs {
    /// Academic example id: 2.1, 4.12, 5.2 or 5.5.
    #[arg(long, required_unless_present = "case", conflicts_with = "case")]
    example: Option<String>,
    /// JSON stationarity case file.
    #[arg(long)]
    case: Option<PathBuf>,
}

#[derive(Args)]
struct ConvertArgs {
    /// One file or the stem of each raw instance.
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    /// Output directory (default: $IVOPT_OUT_DIR or the working directory).
    #[arg(long)]
    out: Option<PathBuf>,
}

/// A failure with its exit code.
struct Fail(u8, String);

type Outcome = Result<(), Fail>;

fn usage(e: impl std::fmt::Display) -> Fail {
    Fail(EXIT_USAGE, e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let res = match cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Bench(a) => bench::cmd_bench(a),
        Command::Cones(a) => cmd_cones(a),
        Command::Check(a) => cmd_check(a),
        Command::Convert(a) => cmd_convert(a),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(Fail(code, msg)) => {
            if !msg.is_empty() {
                eprintln!("ivopt: {msg}");
            }
            ExitCode::from(code)
        }
    }
}

/// Writes to stdout, tolerating a closed pipe.
fn emit(text: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes()).and_then(|_| out.flush());
}

/// `a..b` (inclusive) or a comma list.
fn parse_seeds(s: &str) -> Result<Vec<u64>, String> {
    let bad = || format!("cannot read seeds '{s}'");
    if let Some((a, b)) = s.split_once("..") {
        let a: u64 = a.trim().parse().map_err(|_| bad())?;
        let b: u64 = b.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
        if a > b {
            return Err(bad());
        }
        return Ok((a..=b).collect());
    }
    s.split(',').map(|t| t.trim().parse().map_err(|_| bad())).collect()
}

fn parse_point(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|t| match t.trim().parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(format!("cannot read point coordinate '{t}'")),
        })
        .collect()
}

fn out_dir(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

fn ensure_dir(dir: &Path) -> Outcome {
    std::fs::create_dir_all(dir).map_err(|e| usage(format!("{}: {e}", dir.display())))
}

fn cmd_gen(a: GenArgs) -> Outcome {
    let seeds = parse_seeds(&a.seeds).map_err(usage)?;
    let Some(&k0) = a.kappa.first() else {
        return Err(usage("at least one kappa is needed"));
    };
    if a.n < 2 || a.factors == 0 || a.kappa.iter().any(|k| *k == 0 || *k >= a.n) {
        return Err(usage(format!(
            "need n >= 2, factors >= 1 and every kappa in [1, {})",
            a.n
        )));
    }
    let dir = out_dir(a.out);
    ensure_dir(&dir)?;
    for seed in seeds {
        let inst = io::generate_synthetic(seed, a.n, a.factors, k0);
        let path = dir.join(format!("{}.json", inst.name));
        io::write_canonical(&inst, Some(a.kappa.clone()), &path).map_err(usage)?;
        println!("{}", path.display());
    }
    Ok(())
}

fn print_result(label: &str, res: &AlmResult, objective: f64) {
    println!("{label}");
    println!("  reason       {}", res.reason);
    println!("  objective    {objective:.3}  ({objective:.12e})");
    println!("  violation    {:.3e}", res.violation);
    println!("  outer iters  {}", res.outer_iters);
    println!("  inner iters  {}", res.inner_iters);
    println!("  final rho    {:e}", res.rho);
    let w: Vec<String> = res.w.iter().map(|x| format!("{x:.6}")).collect();
    println!("  w            [{}]", w.join(", "));
}

fn finish(res: &AlmResult, trace: Option<PathBuf>) -> Outcome {
    if let Some(p) = trace {
        let f = std::fs::File::create(&p).map_err(|e| usage(format!("{}: {e}", p.display())))?;
        write_trace_csv(&res.trace, f).map_err(|e| usage(format!("{}: {e}", p.display())))?;
    }
    if res.reason == Termination::Converged {
        Ok(())
    } else {
        Err(Fail(EXIT_ABORT, format!("aborted: {}", res.reason)))
    }
}

fn cmd_solve(a: SolveArgs) -> Outcome {
    let cfg = a.solver.config().map_err(usage)?;
    if let Some(id) = &a.example {
        let ex = model::example(id).map_err(usage)?;
        let Some(p) = ex.problems.get(a.problem) else {
            return Err(usage(format!("example {id} has {} problem(s)", ex.problems.len())));
        };
        let problem: &dyn NlpProblem = p.problem.as_ref();
        let res = alm_solve(problem, &p.start, &cfg);
        print_result(&format!("example {id}: {}", p.name), &res, problem.objective(&res.w));
        return finish(&res, a.trace);
    }
    let path = a.instance.expect("clap requires an instance or an example");
    let (mut inst, _) = io::read_canonical_unchecked_feasibility(&path).map_err(usage)?;
    if let Some(k) = a.kappa {
        inst = PortfolioInstance { kappa: k, ..inst };
        inst.validate_structure().map_err(usage)?;
    }
    if let Err(e) = inst.feasibility_witness() {
        eprintln!("ivopt: warning: {e}");
    }
    let run = model::solve_portfolio(&inst, a.model.into(), &cfg).map_err(usage)?;
    print_result(
        &format!("{} ({} model, kappa = {})", inst.name, Model::from(a.model), inst.kappa),
        &run.result,
        run.objective,
    );
    finish(&run.result, a.trace)
}

fn vec_text(v: &[f64]) -> String {
    let parts: Vec<String> = v
        .iter()
        .map(|x| format!("{}", (x * 1e12).round() / 1e12 + 0.0))
        .collect();
    format!("({})", parts.join(","))
}

/// `{0}`, `R^n`, or `cone{...} + span{...}` per branch.
fn describe(c: &ConeUnion) -> String {
    let parts: Vec<String> = c
        .branches()
        .iter()
        .map(|b| {
            if b.is_zero() {
                return "{0}".to_string();
            }
            if b.is_full() {
                return format!("R^{}", b.dim());
            }
            let list = |rows: &[Vec<f64>]| rows.iter().map(|r| vec_text(r)).collect::<Vec<_>>().join(" ");
            let mut terms = Vec::new();
            if !b.generators().is_empty() {
                terms.push(format!("cone{{{}}}", list(b.generators())));
            }
            if !b.lineality().is_empty() {
                terms.push(format!("span{{{}}}", list(b.lineality())));
            }
            terms.join(" + ")
        })
        .collect();
    parts.join(" u ")
}

fn cmd_cones(a: ConesArgs) -> Outcome {
    let set = setspec::parse_set(&a.set).map_err(usage)?;
    let z = parse_point(&a.point).map_err(usage)?;
    if z.len() != set.dim() {
        return Err(usage(format!(
            "point has {} coordinates, the set lives in R^{}",
            z.len(),
            set.dim()
        )));
    }
    let cone = match a.which {
        Which::Tangent => set.tangent_cone(&z),
        Which::Regular => set.regular_normal_cone(&z).map(ConeUnion::from),
        Which::Limiting => set.limiting_normal_cone(&z),
    };
    match cone {
        Ok(c) => {
            emit(&format!("# {}\n{}", describe(&c), format_cone_union(&c)));
            Ok(())
        }
        Err(SetError::NotAMember) => Err(Fail(EXIT_ABORT, "point is not in the set".into())),
        Err(e) => Err(usage(e)),
    }
}

fn cmd_check(a: CheckArgs) -> Outcome {
    if let Some(id) = a.example {
        let ex = model::example(&id).map_err(usage)?;
        emit(&ex.render());
        if ex.reports.iter().any(|r| !r.consistent()) {
            return Err(Fail(EXIT_INCONSISTENT, "stationarity flags are inconsistent".into()));
        }
        return if ex.all_pass() {
            Ok(())
        } else {
            Err(Fail(EXIT_ABORT, format!("example {id}: some claims failed")))
        };
    }
    let path = a.case.expect("clap requires an example or a case");
    let text = std::fs::read_to_string(&path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let file = CaseFile::from_json(&text).map_err(usage)?;
    let case = file.to_case().map_err(usage)?;
    let report = check_all(&case).map_err(usage)?;
    let bad = file.mismatches(&report);
    let mut text = report.render();
    for m in &bad {
        text.push_str(&format!("MISMATCH {m}\n"));
    }
    emit(&text);
    if !report.consistent() {
        return Err(Fail(EXIT_INCONSISTENT, "stationarity flags are inconsistent".into()));
    }
    if bad.is_empty() {
        Ok(())
    } else {
        Err(Fail(
            EXIT_ABORT,
            format!("{} expected outcome(s) not reproduced", bad.len()),
        ))
    }
}

fn cmd_convert(a: ConvertArgs) -> Outcome {
    let dir = out_dir(a.out);
    ensure_dir(&dir)?;
    for input in &a.inputs {
        let inst = io::convert_frangioni_gentile(input).map_err(usage)?;
        let path = dir.join(format!("{}.json", inst.name));
        io::write_canonical(&inst, None, &path).map_err(usage)?;
        println!("{}", path.display());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds() {
        assert_eq!(parse_seeds("1..3").unwrap(), vec![1, 2, 3]);
        assert_eq!(parse_seeds("1..=2").unwrap(), vec![1, 2]);
        assert_eq!(parse_seeds("4, 2").unwrap(), vec![4, 2]);
        assert!(parse_seeds("3..1").is_err());
        assert!(parse_seeds("x").is_err());
    }

    #[test]
    fn points() {
        assert_eq!(parse_point("0,-1.5").unwrap(), vec![0.0, -1.5]);
        assert!(parse_point("0,inf").is_err());
    }

    #[test]
    fn clap_definition() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
