#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod trajectory;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use billiard_bvp::{
    crosscheck, enumerate_solutions, normalize, solve_branch, verify_solution, BilliardSolution,
    BranchOutcome, BranchStatus, CrosscheckReport, Error, ImpactEvent, VerificationReport,
};
use clap::{Parser, Subcommand};
use serde::Serialize;

use config::Config;

const VERSION: &str = env!("CARGO_PKG_VERSION");
/// Oracle agreement required by `verify`: terminal gap relative to the box
/// diameter, impact times relative to the horizon.
const ORACLE_SPACE_REL: f64 = 1e-4;
const ORACLE_TIME_REL: f64 = 1e-4;
const DRIFT_NOTE: &str =
    "continuation stopped on the successive-level drift rule, which is a heuristic";

const EXIT_CONVERGENCE: u8 = 2;
const EXIT_INVARIANT: u8 = 3;
const EXIT_INPUT: u8 = 4;

#[derive(Parser)]
#[command(
    name = "billiard",
    version,
    about = "Dirichlet problems for billiards in a box"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one branch and write its trajectory CSV and JSON report.
    Solve {
        config: PathBuf,
        /// Impact budget; defaults to the least admissible one.
        #[arg(long)]
        p: Option<u64>,
        /// Branch sign vector, e.g. `+1,-1`; defaults to all `+1`.
        #[arg(long, allow_hyphen_values = true)]
        xi: Option<String>,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Solve all 2^n branches and write one CSV per branch plus a certificate.
    Enumerate {
        config: PathBuf,
        #[arg(long)]
        p: Option<u64>,
        /// Worker threads for the branch solves (default: all cores).
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Check a trajectory CSV against the problem in a config file.
    Verify {
        solution: PathBuf,
        config: PathBuf,
        /// Write the report here instead of standard output.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Emit the uneven-table example configuration.
    ExampleTable {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Failure carrying its own exit code.
#[derive(Debug)]
struct Exit {
    code: u8,
    message: String,
}

impl std::fmt::Display for Exit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for Exit {}

fn library_code(e: &Error) -> u8 {
    match e {
        Error::NotConverged { .. } => EXIT_CONVERGENCE,
        Error::BoundViolation { .. }
        | Error::MonotonicityLost { .. }
        | Error::LimitResidual { .. }
        | Error::StuckAtBoundary { .. } => EXIT_INVARIANT,
        _ => EXIT_INPUT,
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<Exit>() {
            return e.code;
        }
        if let Some(e) = cause.downcast_ref::<Error>() {
            return library_code(e);
        }
    }
    EXIT_INPUT
}

fn status_code(status: &BranchStatus) -> u8 {
    match status {
        BranchStatus::Converged => 0,
        BranchStatus::InvariantViolated { .. } => EXIT_INVARIANT,
        BranchStatus::Failed { error } => library_code(error),
    }
}

/// Writes through a temporary sibling file, then renames it into place.
fn write_atomic(path: &Path, fill: impl FnOnce(&mut BufWriter<File>) -> Result<()>) -> Result<()> {
    let file_name = path
        .file_name()
        .with_context(|| format!("{} is not a file path", path.display()))?;
    let tmp = path.with_file_name(format!(
        ".{}.tmp{}",
        file_name.to_string_lossy(),
        std::process::id()
    ));
    let result = (|| {
        let mut w = BufWriter::new(
            File::create(&tmp).with_context(|| format!("cannot create {}", tmp.display()))?,
        );
        fill(&mut w)?;
        w.into_inner().map_err(|e| e.into_error())?.sync_all()?;
        std::fs::rename(&tmp, path).with_context(|| format!("cannot write {}", path.display()))
    })();
    if result.is_err() {
        let _ = std::fs::remove_file(&tmp);
    }
    result
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write_atomic(path, |w| {
        serde_json::to_writer_pretty(&mut *w, value)?;
        writeln!(w)?;
        Ok(())
    })
}

fn parse_xi(text: &str, n: usize) -> Result<Vec<i8>> {
    let xi = text
        .split(',')
        .map(|s| match s.trim() {
            "+1" | "1" | "+" => Ok(1),
            "-1" | "-" => Ok(-1),
            other => bail!("sign `{other}` in --xi must be +1 or -1"),
        })
        .collect::<Result<Vec<i8>>>()?;
    if xi.len() != n {
        bail!("--xi has {} signs, the box has {n} axes", xi.len());
    }
    Ok(xi)
}

fn branch_stem(p: u64, xi: &[i8]) -> String {
    let signs: String = xi.iter().map(|&s| if s > 0 { 'p' } else { 'm' }).collect();
    format!("branch_p{p}_{signs}")
}

fn to_original(events: &[ImpactEvent<f64>], shift: &[f64]) -> Vec<ImpactEvent<f64>> {
    events
        .iter()
        .map(|e| ImpactEvent {
            point: e.point.iter().zip(shift).map(|(x, s)| x + s).collect(),
            ..e.clone()
        })
        .collect()
}

fn make_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))
}

#[derive(Serialize)]
struct SolveReport<'a> {
    version: &'static str,
    command: &'static str,
    config: &'a Config,
    exit_code: u8,
    branch: &'a BranchOutcome<f64>,
    /// Impacts in original coordinates.
    impacts: Vec<ImpactEvent<f64>>,
    oracle: Option<CrosscheckReport>,
    oracle_agrees: Option<bool>,
    csv: Option<String>,
    notes: Vec<&'static str>,
}

fn write_branch_csv(sol: &BilliardSolution<f64>, path: &Path) -> Result<()> {
    write_atomic(path, |w| trajectory::write_csv(sol, w))
}

fn cmd_solve(config_path: &Path, p: Option<u64>, xi: Option<&str>, out_dir: &Path) -> Result<u8> {
    let config = Config::load(config_path)?;
    let n = config.dim();
    let xi = match xi {
        Some(text) => parse_xi(text, n)?,
        None => vec![1; n],
    };
    let domain = config.domain()?;
    let field = config.field()?;
    let (outcome, sol) = solve_branch(
        &domain,
        &field,
        &config.endpoints.a,
        &config.endpoints.b,
        p,
        &xi,
        &config.enumeration(),
    )?;
    make_dir(out_dir)?;
    let stem = branch_stem(outcome.spec.p, &xi);
    let mut csv = None;
    let mut oracle = None;
    let mut impacts = Vec::new();
    if let Some(sol) = &sol {
        let path = out_dir.join(format!("{stem}.csv"));
        write_branch_csv(sol, &path)?;
        csv = Some(path.display().to_string());
        oracle = Some(crosscheck(sol, &field, &config.oracle())?);
        impacts = to_original(&sol.impacts, &sol.shift);
    }
    let code = status_code(&outcome.status);
    let report = SolveReport {
        version: VERSION,
        command: "solve",
        config: &config,
        exit_code: code,
        branch: &outcome,
        impacts,
        oracle_agrees: oracle
            .as_ref()
            .map(|r| r.passes(ORACLE_SPACE_REL, ORACLE_TIME_REL)),
        oracle,
        csv,
        notes: if outcome.stopped_on_drift == Some(true) {
            vec![DRIFT_NOTE]
        } else {
            Vec::new()
        },
    };
    write_json(&out_dir.join(format!("{stem}.json")), &report)?;
    match &outcome.status {
        BranchStatus::Converged => println!(
            "branch {stem}: converged, {} impacts, total multiplicity {}",
            outcome.p_impacts.unwrap_or(0),
            outcome.total_mult.unwrap_or(0)
        ),
        BranchStatus::InvariantViolated { reason } => eprintln!("branch {stem}: {reason}"),
        BranchStatus::Failed { error } => eprintln!("branch {stem}: {error}"),
    }
    Ok(code)
}

#[derive(Serialize)]
struct Residuals {
    limit_residual: Option<f64>,
    fixed_point: Option<f64>,
    ode: Option<f64>,
    reflection: Option<f64>,
    max_velocity_deviation: Option<f64>,
}

#[derive(Serialize)]
struct BranchEntry<'a> {
    xi: &'a [i8],
    p: u64,
    target: &'a [f64],
    status: &'a BranchStatus,
    p_impacts: Option<usize>,
    total_mult: Option<usize>,
    residuals: Residuals,
    stopped_on_drift: Option<bool>,
    csv: Option<String>,
}

#[derive(Serialize)]
struct CertificateReport<'a> {
    version: &'static str,
    command: &'static str,
    config: &'a Config,
    exit_code: u8,
    p: u64,
    min_p: u64,
    m_bar: f64,
    partial: bool,
    converged: usize,
    distinctness_threshold: f64,
    all_distinct: bool,
    distinctness: &'a [Vec<f64>],
    branches: Vec<BranchEntry<'a>>,
    notes: Vec<&'static str>,
}

fn cmd_enumerate(
    config_path: &Path,
    p: Option<u64>,
    jobs: Option<usize>,
    out_dir: &Path,
) -> Result<u8> {
    let config = Config::load(config_path)?;
    let domain = config.domain()?;
    let field = config.field()?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        if j == 0 {
            bail!(Exit {
                code: EXIT_INPUT,
                message: "--jobs must be positive".into()
            });
        }
        pool = pool.num_threads(j);
    }
    let pool = pool.build()?;
    let cert = pool.install(|| {
        enumerate_solutions(
            &domain,
            &field,
            &config.endpoints.a,
            &config.endpoints.b,
            p,
            &config.enumeration(),
        )
    })?;
    make_dir(out_dir)?;

    let csv_paths = pool.install(|| {
        use rayon::prelude::*;
        cert.branches
            .par_iter()
            .map(|b| {
                b.solution
                    .map(|i| {
                        let path =
                            out_dir.join(format!("{}.csv", branch_stem(b.spec.p, &b.spec.xi)));
                        write_branch_csv(&cert.solutions[i], &path)
                            .map(|_| path.display().to_string())
                    })
                    .transpose()
            })
            .collect::<Result<Vec<_>>>()
    })?;

    let code = cert
        .branches
        .iter()
        .map(|b| status_code(&b.status))
        .fold(0, |acc, c| match (acc, c) {
            (EXIT_INVARIANT, _) | (_, EXIT_INVARIANT) => EXIT_INVARIANT,
            (a, b) => a.max(b),
        });
    let branches = cert
        .branches
        .iter()
        .zip(csv_paths)
        .map(|(b, csv)| BranchEntry {
            xi: &b.spec.xi,
            p: b.spec.p,
            target: &b.spec.target,
            status: &b.status,
            p_impacts: b.p_impacts,
            total_mult: b.total_mult,
            residuals: Residuals {
                limit_residual: b.limit_residual,
                fixed_point: b.levels.last().map(|l| l.residual),
                ode: b.verification.as_ref().map(|v| v.ode_residual),
                reflection: b.verification.as_ref().map(|v| v.reflection_violation),
                max_velocity_deviation: b.max_velocity_deviation,
            },
            stopped_on_drift: b.stopped_on_drift,
            csv,
        })
        .collect();
    let report = CertificateReport {
        version: VERSION,
        command: "enumerate",
        config: &config,
        exit_code: code,
        p: cert.p,
        min_p: cert.min_p,
        m_bar: cert.m_bar,
        partial: cert.partial,
        converged: cert.converged(),
        distinctness_threshold: cert.distinctness_threshold(),
        all_distinct: cert.all_distinct(),
        distinctness: &cert.distinctness,
        branches,
        notes: if cert
            .branches
            .iter()
            .any(|b| b.stopped_on_drift == Some(true))
        {
            vec![DRIFT_NOTE]
        } else {
            Vec::new()
        },
    };
    write_json(&out_dir.join("certificate.json"), &report)?;
    println!(
        "p = {}: {}/{} branches converged{}",
        cert.p,
        cert.converged(),
        cert.branches.len(),
        if cert.partial {
            " (partial certificate)"
        } else {
            ""
        }
    );
    Ok(code)
}

#[derive(Serialize)]
struct VerifyReport<'a> {
    version: &'static str,
    command: &'static str,
    config: &'a Config,
    solution: String,
    exit_code: u8,
    pass: bool,
    impacts: usize,
    total_mult: usize,
    verification: VerificationReport,
    oracle: CrosscheckReport,
    oracle_agrees: bool,
}

fn cmd_verify(solution: &Path, config_path: &Path, report_path: Option<&Path>) -> Result<u8> {
    let config = Config::load(config_path)?;
    let domain = config.domain()?;
    let field = config.field()?;
    let norm = normalize(&domain, &config.endpoints.a, &config.endpoints.b)?;
    let file =
        File::open(solution).with_context(|| format!("cannot open {}", solution.display()))?;
    let sol = trajectory::read_csv(
        file,
        &norm.domain,
        &norm.shift,
        config.field.horizon,
        &norm.start,
        &norm.end,
    )
    .with_context(|| format!("cannot read trajectory {}", solution.display()))?;
    let verification = verify_solution(&sol, &field, config.solver.verify_tol);
    let oracle = crosscheck(&sol, &field, &config.oracle())?;
    let oracle_agrees = oracle.passes(ORACLE_SPACE_REL, ORACLE_TIME_REL);
    let pass = verification.pass && oracle_agrees;
    let code = if pass { 0 } else { EXIT_INVARIANT };
    let report = VerifyReport {
        version: VERSION,
        command: "verify",
        config: &config,
        solution: solution.display().to_string(),
        exit_code: code,
        pass,
        impacts: sol.impact_count(),
        total_mult: sol.total_multiplicity(),
        verification,
        oracle,
        oracle_agrees,
    };
    match report_path {
        Some(path) => write_json(path, &report)?,
        None => println!("{}", serde_json::to_string_pretty(&report)?),
    }
    if !pass {
        eprintln!(
            "verification failed: solution checks {}, oracle agreement {}",
            if report.verification.pass {
                "pass"
            } else {
                "fail"
            },
            if oracle_agrees { "pass" } else { "fail" }
        );
    }
    Ok(code)
}

fn cmd_example_table(out: Option<&Path>) -> Result<u8> {
    let text = Config::example_table().to_toml();
    match out {
        Some(path) => write_atomic(path, |w| Ok(w.write_all(text.as_bytes())?))?,
        None => print!("{text}"),
    }
    Ok(0)
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Solve {
            config,
            p,
            xi,
            out_dir,
        } => cmd_solve(&config, p, xi.as_deref(), &out_dir),
        Command::Enumerate {
            config,
            p,
            jobs,
            out_dir,
        } => cmd_enumerate(&config, p, jobs, &out_dir),
        Command::Verify {
            solution,
            config,
            report,
        } => cmd_verify(&solution, &config, report.as_deref()),
        Command::ExampleTable { out } => cmd_example_table(out.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() {
                ExitCode::from(EXIT_INPUT)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
