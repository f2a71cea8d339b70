use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use istiefel::bench::{render_table, run_experiment, run_grid, GridSpec, MetricSelector, ProblemKind, RetractionSelector, RunSpec};
use istiefel::{verify, Gamma3Choice};

#[derive(Parser)]
#[command(name = "istiefel-opt", version, about = "Riemannian descent on the indefinite Stiefel manifold")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProblemArg {
    Trace,
    Procrustes,
}

#[derive(Clone, Copy, ValueEnum)]
enum MetricArg {
    Eucl,
    Gcan,
}

#[derive(Clone, Copy, ValueEnum)]
enum RetractionArg {
    Qgeo,
}

#[derive(Clone, Copy, ValueEnum)]
enum Gamma3Arg {
    A,
    B,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write history.csv and summary.json.
    Run(RunArgs),
    /// Run the built-in property suites.
    Verify {
        #[arg(long, default_value_t = 20)]
        cases: usize,
    },
    /// Run a metric × retraction grid from a JSON file.
    Compare {
        #[arg(long)]
        grid: PathBuf,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
}

#[derive(clap::Args)]
struct RunArgs {
    /// JSON RunSpec; flags given on the command line override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    problem: Option<ProblemArg>,
    #[arg(long, value_enum)]
    metric: Option<MetricArg>,
    #[arg(long, value_enum)]
    retraction: Option<RetractionArg>,
    #[arg(long, value_enum)]
    gamma3: Option<Gamma3Arg>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    p: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    k_p: Option<usize>,
    #[arg(long)]
    k_m: Option<usize>,
    #[arg(long)]
    rank_deficit: Option<usize>,
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    rstop: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Starting point as a JSON or text matrix file.
    #[arg(long)]
    x0: Option<PathBuf>,
    /// Write 0 in the elapsed column so the history is reproducible byte for byte.
    #[arg(long)]
    no_elapsed: bool,
}

impl RunArgs {
    fn into_spec(self) -> Result<RunSpec> {
        let mut rs = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
            }
            None => {
                let Some(problem) = self.problem else { bail!("--problem is required without --config") };
                let problem = match problem {
                    ProblemArg::Trace => ProblemKind::Trace,
                    ProblemArg::Procrustes => ProblemKind::Procrustes,
                };
                RunSpec::new(problem, MetricSelector::Gcan)
            }
        };
        if let Some(p) = self.problem {
            rs.problem = match p {
                ProblemArg::Trace => ProblemKind::Trace,
                ProblemArg::Procrustes => ProblemKind::Procrustes,
            };
        }
        if let Some(m) = self.metric {
            rs.metric = match m {
                MetricArg::Eucl => MetricSelector::Eucl,
                MetricArg::Gcan => MetricSelector::Gcan,
            };
        }
        if let Some(RetractionArg::Qgeo) = self.retraction {
            rs.retraction = RetractionSelector::Qgeo;
        }
        if let Some(g) = self.gamma3 {
            rs.gamma3 = match g {
                Gamma3Arg::A => Gamma3Choice::A,
                Gamma3Arg::B => Gamma3Choice::B,
            };
        }
        for (slot, val) in [
            (&mut rs.n, self.n),
            (&mut rs.k, self.k),
            (&mut rs.p, self.p),
            (&mut rs.m, self.m),
            (&mut rs.k_p, self.k_p),
            (&mut rs.k_m, self.k_m),
            (&mut rs.rank_deficit, self.rank_deficit),
        ] {
            if val.is_some() {
                *slot = val;
            }
        }
        if let Some(v) = self.rho {
            rs.rho = v;
        }
        if let Some(v) = self.seed {
            rs.seed = v;
        }
        if let Some(v) = self.rstop {
            rs.solver.rstop = v;
        }
        if let Some(v) = self.max_iter {
            rs.solver.max_iter = v;
        }
        if let Some(v) = self.alpha {
            rs.solver.alpha = v;
        }
        if self.out.is_some() {
            rs.out = self.out;
        }
        if self.x0.is_some() {
            rs.x0 = self.x0;
        }
        if self.no_elapsed {
            rs.record_elapsed = false;
        }
        Ok(rs)
    }
}

fn run(args: RunArgs) -> Result<ExitCode> {
    let rs = args.into_spec()?;
    let out = run_experiment(&rs)?;
    println!("{}", serde_json::to_string_pretty(&out.summary)?);
    if let Some(dir) = &rs.out {
        eprintln!("wrote {}", dir.display());
    }
    Ok(if out.result.status == istiefel::Status::Converged { ExitCode::SUCCESS } else { ExitCode::from(2) })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(args) => run(args),
        Command::Verify { cases } => verify_cmd(cases),
        Command::Compare { grid, jobs } => compare(&grid, jobs),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn verify_cmd(cases: usize) -> Result<ExitCode> {
    let reports = verify::run_all(cases)?;
    let mut ok = true;
    for r in &reports {
        ok &= r.passed;
        println!(
            "{} {:<40} cases={:<4} worst={:.3e} tol={:.1e} ({:.2}s)",
            if r.passed { "PASS" } else { "FAIL" },
            r.name,
            r.cases,
            r.worst,
            r.tol,
            r.seconds
        );
    }
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn compare(path: &PathBuf, jobs: usize) -> Result<ExitCode> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let grid: GridSpec = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let rows = run_grid(&grid, jobs)?;
    print!("{}", render_table(&rows));
    Ok(ExitCode::SUCCESS)
}
