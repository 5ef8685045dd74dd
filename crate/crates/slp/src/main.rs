//! Command-line front end: solve instances, generate benchmark families,
//! query the enumeration oracle, and run batch benchmarks.
//!
//! Exit codes: 0 on success, 1 when the solver stops without reaching the
//! requested tolerance (or primal recovery fails), 2 on input errors.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use slp::bench::{self, BenchConfig};
use slp::dual_primal::{self, PrimalError};
use slp::gen::{self, GenFamily, GenSpec};
use slp::oracle;
use slp::problem::{load_problem, save_problem, Problem};
use slp::spadmm::{SolveStatus, SolverConfig, TraceRow};

#[derive(Parser)]
#[command(
    name = "slp",
    version,
    about = "Cardinality-constrained LP solver: dual semi-proximal ADMM with certified primal recovery"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FamilyArg {
    /// Random equality system with a planted sparse solution.
    Random,
    /// Capped unit simplex with Gaussian costs.
    Simplex,
}

impl From<FamilyArg> for GenFamily {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Random => GenFamily::RandomPlanted,
            FamilyArg::Simplex => GenFamily::SimplexConstrained,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance from JSON and write the solution next to it.
    Solve {
        /// Instance file (JSON with A, b, c, l, r).
        instance: PathBuf,
        /// Penalty parameter sigma (default 1.0).
        #[arg(long)]
        sigma: Option<f64>,
        /// Multiplier step length tau (default 1.618).
        #[arg(long)]
        tau: Option<f64>,
        /// Stopping tolerance for both residuals (default 1e-8).
        #[arg(long)]
        tol: Option<f64>,
        /// Iteration cap (default 5000).
        #[arg(long)]
        maxiter: Option<usize>,
        /// Write a per-iteration residual trace CSV here.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Solution output path (default: `<instance stem>.solution.json`).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a benchmark instance.
    Gen {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long)]
        n: usize,
        /// Number of equality rows; the simplex family fixes this to 1.
        #[arg(long)]
        m: Option<usize>,
        /// Support budget.
        #[arg(long)]
        r: usize,
        /// Upper bound for the simplex family (default 1).
        #[arg(long, default_value_t = 1.0)]
        u: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Instance output path.
        #[arg(long)]
        out: PathBuf,
        /// Also write the planted point (random family only).
        #[arg(long)]
        xopt: Option<PathBuf>,
    },
    /// Enumerate the exact optimum of a small instance (n <= 25).
    Oracle {
        instance: PathBuf,
    },
    /// Run a batch benchmark described by a JSON config and emit CSV.
    Bench {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Failures mapped to exit codes: input problems exit 2, solver failures 1.
enum CliError {
    Input(String),
    Solver(String),
}

impl CliError {
    fn report(&self) -> ExitCode {
        match self {
            CliError::Input(msg) => {
                eprintln!("error: {msg}");
                ExitCode::from(2)
            }
            CliError::Solver(msg) => {
                eprintln!("solver failure: {msg}");
                ExitCode::from(1)
            }
        }
    }
}

fn input_err<E: std::fmt::Display>(context: &str) -> impl FnOnce(E) -> CliError + '_ {
    move |e| CliError::Input(format!("{context}: {e}"))
}

fn load(path: &Path) -> Result<Problem, CliError> {
    load_problem(path).map_err(input_err(&format!("reading {}", path.display())))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => e.report(),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Solve { instance, sigma, tau, tol, maxiter, trace, out } => {
            cmd_solve(&instance, sigma, tau, tol, maxiter, trace, out)
        }
        Command::Gen { family, n, m, r, u, seed, out, xopt } => {
            cmd_gen(family, n, m, r, u, seed, &out, xopt)
        }
        Command::Oracle { instance } => cmd_oracle(&instance),
        Command::Bench { config, out } => cmd_bench(&config, &out),
    }
}

fn cmd_solve(
    instance: &Path,
    sigma: Option<f64>,
    tau: Option<f64>,
    tol: Option<f64>,
    maxiter: Option<usize>,
    trace: Option<PathBuf>,
    out: Option<PathBuf>,
) -> Result<(), CliError> {
    let problem = load(instance)?;
    let defaults = SolverConfig::default();
    let config = SolverConfig {
        sigma: sigma.unwrap_or(defaults.sigma),
        tau: tau.unwrap_or(defaults.tau),
        tol: tol.unwrap_or(defaults.tol),
        maxiter: maxiter.unwrap_or(defaults.maxiter),
        ..defaults
    };
    config.validate().map_err(|e| CliError::Input(e.to_string()))?;

    let mut rows: Vec<TraceRow> = Vec::new();
    let result = dual_primal::solve_traced(&problem, &config, |row| {
        if trace.is_some() {
            rows.push(*row);
        }
    });
    if let Some(path) = &trace {
        let mut csv = String::from("iter,zeta,eta,theta\n");
        for row in &rows {
            let _ = writeln!(csv, "{},{},{},{}", row.iter, row.zeta, row.eta, row.theta);
        }
        std::fs::write(path, csv).map_err(input_err(&format!("writing {}", path.display())))?;
    }
    let solution = match result {
        Ok(s) => s,
        Err(PrimalError::Solver(e)) => return Err(CliError::Solver(e.to_string())),
        Err(PrimalError::RestrictedInfeasible) => {
            return Err(CliError::Solver(PrimalError::RestrictedInfeasible.to_string()))
        }
        Err(PrimalError::Lp(e)) => return Err(CliError::Solver(e.to_string())),
    };

    println!("objective: {}", solution.objective);
    println!("dual objective: {}", solution.dual_objective);
    println!("certificate: {:?}", solution.certificate.kind);
    println!("zeta: {:e}", solution.dual_stats.zeta);
    println!("eta: {:e}", solution.dual_stats.eta);
    println!("iterations: {}", solution.dual_stats.iterations);

    let out_path = out.unwrap_or_else(|| instance.with_extension("solution.json"));
    let json = serde_json::to_string_pretty(&solution)
        .map_err(|e| CliError::Input(format!("serializing solution: {e}")))?;
    std::fs::write(&out_path, json)
        .map_err(input_err(&format!("writing {}", out_path.display())))?;
    println!("solution written to {}", out_path.display());

    if solution.dual_stats.status == SolveStatus::MaxIterReached {
        return Err(CliError::Solver(format!(
            "stopped after {} iterations with zeta = {:e}, eta = {:e} above tol = {:e}",
            solution.dual_stats.iterations,
            solution.dual_stats.zeta,
            solution.dual_stats.eta,
            config.tol
        )));
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_gen(
    family: FamilyArg,
    n: usize,
    m: Option<usize>,
    r: usize,
    u: f64,
    seed: u64,
    out: &Path,
    xopt_path: Option<PathBuf>,
) -> Result<(), CliError> {
    let family = GenFamily::from(family);
    let m = match (family, m) {
        (GenFamily::SimplexConstrained, None) => 1,
        (GenFamily::RandomPlanted, None) => {
            return Err(CliError::Input("--m is required for the random family".into()))
        }
        (_, Some(m)) => m,
    };
    let spec = GenSpec { family, n, m, r, u, seed };
    let (problem, xopt) = gen::generate(&spec).map_err(|e| CliError::Input(e.to_string()))?;
    save_problem(&problem, out).map_err(input_err(&format!("writing {}", out.display())))?;
    println!("instance written to {}", out.display());
    if let Some(path) = xopt_path {
        let xopt = xopt.ok_or_else(|| {
            CliError::Input("--xopt is only available for the random family".into())
        })?;
        let json = serde_json::to_string(&xopt)
            .map_err(|e| CliError::Input(format!("serializing xopt: {e}")))?;
        std::fs::write(&path, json).map_err(input_err(&format!("writing {}", path.display())))?;
        println!("planted point written to {}", path.display());
    }
    Ok(())
}

fn cmd_oracle(instance: &Path) -> Result<(), CliError> {
    let problem = load(instance)?;
    if problem.n() > oracle::ENUM_MAX_N {
        return Err(CliError::Input(format!(
            "enumeration refuses n = {} > {}",
            problem.n(),
            oracle::ENUM_MAX_N
        )));
    }
    let result = oracle::enumerate_optimal(&problem).map_err(|e| match e {
        oracle::OracleError::TooLarge { .. } => CliError::Input(e.to_string()),
        other => CliError::Solver(other.to_string()),
    })?;
    println!("optimum: {}", result.optimum);
    println!("optimal supports: {}", result.optimal_index_sets.len());
    for set in result.optimal_index_sets.iter().take(16) {
        println!("  {:?}", set.indices());
    }
    if result.optimal_index_sets.len() > 16 {
        println!("  ... ({} total)", result.optimal_index_sets.len());
    }
    if let Some(x) = result.minimizers.first() {
        println!("one minimizer: {x:?}");
    }
    Ok(())
}

fn cmd_bench(config_path: &Path, out: &Path) -> Result<(), CliError> {
    let text = std::fs::read_to_string(config_path)
        .map_err(input_err(&format!("reading {}", config_path.display())))?;
    let config: BenchConfig = serde_json::from_str(&text)
        .map_err(input_err(&format!("parsing {}", config_path.display())))?;
    let rows = bench::run_bench_config(&config).map_err(|e| match e {
        bench::BenchError::InvalidParam(_) | bench::BenchError::Gen(_) => {
            CliError::Input(e.to_string())
        }
        bench::BenchError::Solver(e) => CliError::Input(e.to_string()),
    })?;
    let csv = bench::csv_string(&rows);
    std::fs::write(out, &csv).map_err(input_err(&format!("writing {}", out.display())))?;
    print!("{csv}");
    println!("results written to {}", out.display());
    Ok(())
}
