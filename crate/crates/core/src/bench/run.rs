//! Experiment configuration, execution and reporting.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::problems::{gen_procrustes_problem, gen_trace_problem, ProblemInstance};
use crate::error::{Error, Result};
use crate::geodesics::{QuasiGeodesicRetraction, Retraction};
use crate::manifold::Point;
use crate::matio;
use crate::metrics::{Gamma3Choice, MetricKind};
use crate::optimizer::{minimize, nonmonotone_update, IterationRecord, RunResult, SolverConfig, Status};

pub const HISTORY_HEADER: &str = "iter,f,grad_norm,feas,tau,n_evals,elapsed";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    Trace,
    Procrustes,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricSelector {
    Eucl,
    Gcan,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum RetractionSelector {
    #[default]
    Qgeo,
}

impl RetractionSelector {
    pub fn build(&self) -> Box<dyn Retraction> {
        match self {
            RetractionSelector::Qgeo => Box::new(QuasiGeodesicRetraction),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            RetractionSelector::Qgeo => "qgeo",
        }
    }
}

fn default_rho() -> f64 {
    2.0
}

fn default_true() -> bool {
    true
}

/// Everything needed to reproduce one run. Unset dimensions take the
/// desk-scale defaults of the selected problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSpec {
    pub problem: ProblemKind,
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub k: Option<usize>,
    #[serde(default)]
    pub p: Option<usize>,
    #[serde(default)]
    pub m: Option<usize>,
    #[serde(default)]
    pub k_p: Option<usize>,
    #[serde(default)]
    pub k_m: Option<usize>,
    #[serde(default)]
    pub rank_deficit: Option<usize>,
    pub metric: MetricSelector,
    #[serde(default = "default_rho")]
    pub rho: f64,
    #[serde(default)]
    pub gamma3: Gamma3Choice,
    #[serde(default)]
    pub retraction: RetractionSelector,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub out: Option<PathBuf>,
    /// Starting point file (see [`crate::matio`]); replaces the generator's X₀.
    #[serde(default)]
    pub x0: Option<PathBuf>,
    /// Write wall-clock seconds into the `elapsed` column; when false the
    /// column is 0 and the history file depends only on the RunSpec.
    #[serde(default = "default_true")]
    pub record_elapsed: bool,
}

impl RunSpec {
    pub fn new(problem: ProblemKind, metric: MetricSelector) -> Self {
        Self {
            problem,
            n: None,
            k: None,
            p: None,
            m: None,
            k_p: None,
            k_m: None,
            rank_deficit: None,
            metric,
            rho: 2.0,
            gamma3: Gamma3Choice::B,
            retraction: RetractionSelector::Qgeo,
            solver: SolverConfig::default(),
            seed: 0,
            out: None,
            x0: None,
            record_elapsed: true,
        }
    }

    pub fn metric_kind(&self) -> Result<MetricKind> {
        match self.metric {
            MetricSelector::Eucl => Ok(MetricKind::Euclidean),
            MetricSelector::Gcan => MetricKind::gcan(self.rho, self.gamma3),
        }
    }

    pub fn label(&self) -> String {
        let metric = match self.metric {
            MetricSelector::Eucl => "Eucl",
            MetricSelector::Gcan => "gcan",
        };
        format!("{metric}-{}", self.retraction.label())
    }

    /// Resolves defaults and checks dimension consistency.
    pub fn dims(&self) -> Result<ResolvedDims> {
        match self.problem {
            ProblemKind::Trace => {
                let n = self.n.unwrap_or(100);
                let k = self.k.unwrap_or(if self.n.is_some() { n / 5 } else { 20 });
                let p = self.p.unwrap_or_else(|| self.m.map_or(3 * n / 4, |m| n.saturating_sub(m)));
                let m = self.m.unwrap_or(n.saturating_sub(p));
                let k_p = self.k_p.unwrap_or_else(|| self.k_m.map_or(k / 2, |km| k.saturating_sub(km)));
                let k_m = self.k_m.unwrap_or(k.saturating_sub(k_p));
                if p + m != n || k_p + k_m != k {
                    return Err(Error::Config(format!(
                        "trace dimensions need p+m=n and k_p+k_m=k (n={n} k={k} p={p} m={m} k_p={k_p} k_m={k_m})"
                    )));
                }
                Ok(ResolvedDims { n, k, p, m, k_p, k_m, rank_deficit: 0 })
            }
            ProblemKind::Procrustes => {
                let n = self.n.unwrap_or(60);
                if let Some(k) = self.k {
                    if k != n {
                        return Err(Error::Config(format!(
                            "Procrustes lives on the J-orthogonal group, so k must equal n (got n={n}, k={k})"
                        )));
                    }
                }
                let p = self.p.unwrap_or_else(|| self.m.map_or(3 * n / 4, |m| n.saturating_sub(m)));
                let m = self.m.unwrap_or(n.saturating_sub(p));
                if p + m != n {
                    return Err(Error::Config(format!("Procrustes needs p+m=n (n={n} p={p} m={m})")));
                }
                let rank_deficit = self.rank_deficit.unwrap_or(4);
                Ok(ResolvedDims { n, k: n, p, m, k_p: p, k_m: m, rank_deficit })
            }
        }
    }

    pub fn build_problem(&self) -> Result<ProblemInstance> {
        let d = self.dims()?;
        match self.problem {
            ProblemKind::Trace => gen_trace_problem(d.n, d.k, d.p, d.m, d.k_p, d.k_m, self.seed),
            ProblemKind::Procrustes => gen_procrustes_problem(d.n, d.p, d.m, d.rank_deficit, self.seed),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResolvedDims {
    pub n: usize,
    pub k: usize,
    pub p: usize,
    pub m: usize,
    pub k_p: usize,
    pub k_m: usize,
    pub rank_deficit: usize,
}

/// One row of a results table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub obj: f64,
    pub grad: f64,
    pub feas: f64,
    pub iter: usize,
    pub eval: usize,
    pub cpu: f64,
    pub status: String,
    pub lyapunov_solves: usize,
    pub config: RunSpec,
}

impl Summary {
    pub fn from_result(result: &RunResult, spec: &RunSpec) -> Self {
        let last = result.last();
        let status = match &result.status {
            Status::Failed(msg) => format!("Failed: {msg}"),
            other => other.label().to_string(),
        };
        Summary {
            obj: last.f,
            grad: last.grad_norm,
            feas: last.feas,
            iter: result.iterations,
            eval: result.evaluations,
            cpu: result.wall_time,
            status,
            lyapunov_solves: result.lyapunov_solves,
            config: spec.clone(),
        }
    }
}

#[derive(Debug)]
pub struct ExperimentOutput {
    pub result: RunResult,
    pub summary: Summary,
}

/// Builds the instance, runs the solver and, when `rs.out` is set, writes
/// `history.csv`, `summary.json`, `convergence.csv` and `x_final.json`.
pub fn run_experiment(rs: &RunSpec) -> Result<ExperimentOutput> {
    let mut problem = rs.build_problem()?;
    if let Some(path) = &rs.x0 {
        problem.x0 = Point::new(problem.spec.clone(), matio::read_matrix(path)?)?;
    }
    let metric = rs.metric_kind()?;
    let retraction = rs.retraction.build();
    let result = minimize(problem.objective.as_ref(), &problem.x0, &metric, retraction.as_ref(), &rs.solver)?;
    let summary = Summary::from_result(&result, rs);
    if let Some(dir) = &rs.out {
        write_artifacts(dir, &result, &summary, rs)?;
    }
    Ok(ExperimentOutput { result, summary })
}

fn write_artifacts(dir: &Path, result: &RunResult, summary: &Summary, rs: &RunSpec) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut hist = fs::File::create(dir.join("history.csv"))?;
    write_history_csv(&mut hist, &result.history, rs.record_elapsed)?;
    let mut plot = fs::File::create(dir.join("convergence.csv"))?;
    emit_history_plotdata(&mut plot, &result.history, rs.solver.alpha)?;
    fs::write(dir.join("summary.json"), serde_json::to_string_pretty(summary)? + "\n")?;
    matio::write_json(&dir.join("x_final.json"), result.point.x())?;
    Ok(())
}

/// Per-iteration CSV with header `iter,f,grad_norm,feas,tau,n_evals,elapsed`.
pub fn write_history_csv<W: Write>(w: &mut W, history: &[IterationRecord], record_elapsed: bool) -> Result<()> {
    writeln!(w, "{HISTORY_HEADER}")?;
    for r in history {
        let elapsed = if record_elapsed { r.elapsed } else { 0.0 };
        writeln!(
            w,
            "{},{:e},{:e},{:e},{:e},{},{:e}",
            r.iter, r.f, r.grad_norm, r.feas, r.tau, r.n_evals, elapsed
        )?;
    }
    Ok(())
}

/// Plot-ready columns `iter,f_gap,grad_norm,c` where f_gap = f − min f and c
/// is the nonmonotone reference value recomputed from the f history.
pub fn emit_history_plotdata<W: Write>(w: &mut W, history: &[IterationRecord], alpha: f64) -> Result<()> {
    if history.is_empty() {
        return Err(Error::Config("empty history".into()));
    }
    let f_best = history.iter().map(|r| r.f).fold(f64::INFINITY, f64::min);
    writeln!(w, "iter,f_gap,grad_norm,c")?;
    let (mut c, mut q) = (history[0].f, 1.0);
    for (i, r) in history.iter().enumerate() {
        if i > 0 {
            (c, q) = nonmonotone_update(c, q, r.f, alpha);
        }
        writeln!(w, "{},{:e},{:e},{:e}", r.iter, r.f - f_best, r.grad_norm, c)?;
    }
    Ok(())
}

/// A metric × retraction sweep over one base configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub base: RunSpec,
    pub metrics: Vec<MetricSelector>,
    #[serde(default = "default_retractions")]
    pub retractions: Vec<RetractionSelector>,
}

fn default_retractions() -> Vec<RetractionSelector> {
    vec![RetractionSelector::Qgeo]
}

impl GridSpec {
    pub fn expand(&self) -> Vec<RunSpec> {
        let mut out = Vec::new();
        for &metric in &self.metrics {
            for &retraction in &self.retractions {
                let mut rs = self.base.clone();
                rs.metric = metric;
                rs.retraction = retraction;
                if let Some(dir) = &self.base.out {
                    rs.out = Some(dir.join(rs.label()));
                }
                out.push(rs);
            }
        }
        out
    }
}

/// Runs every cell of the grid using up to `jobs` worker threads; results keep grid order.
pub fn run_grid(grid: &GridSpec, jobs: usize) -> Result<Vec<Summary>> {
    let specs = grid.expand();
    let jobs = jobs.max(1);
    let mut slots: Vec<Option<Result<Summary>>> = vec![None; specs.len()];
    for (chunk_specs, chunk_slots) in specs.chunks(jobs).zip(slots.chunks_mut(jobs)) {
        std::thread::scope(|s| {
            let handles: Vec<_> = chunk_specs
                .iter()
                .map(|rs| s.spawn(move || run_experiment(rs).map(|o| o.summary)))
                .collect();
            for (slot, h) in chunk_slots.iter_mut().zip(handles) {
                *slot = Some(h.join().unwrap_or_else(|_| Err(Error::Config("worker panicked".into()))));
            }
        });
    }
    let summaries: Vec<Summary> = slots.into_iter().map(|s| s.expect("every slot filled")).collect::<Result<_>>()?;
    if let Some(dir) = &grid.base.out {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("compare.json"), serde_json::to_string_pretty(&summaries)? + "\n")?;
        fs::write(dir.join("compare.txt"), render_table(&summaries))?;
    }
    Ok(summaries)
}

/// Fixed-width table with columns Combination, obj., grad., feas., #iter., #eval., CPU.
pub fn render_table(rows: &[Summary]) -> String {
    let mut s = format!(
        "{:<14} {:>12} {:>12} {:>12} {:>7} {:>7} {:>10}  {}\n",
        "Combination", "obj.", "grad.", "feas.", "#iter.", "#eval.", "CPU", "status"
    );
    for r in rows {
        s += &format!(
            "{:<14} {:>12.4e} {:>12.4e} {:>12.4e} {:>7} {:>7} {:>10.4}  {}\n",
            r.config.label(),
            r.obj,
            r.grad,
            r.feas,
            r.iter,
            r.eval,
            r.cpu,
            r.status
        );
    }
    s
}
