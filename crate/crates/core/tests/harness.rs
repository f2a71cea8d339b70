use std::fs;

use istiefel::bench::{
    emit_history_plotdata, gen_procrustes_problem, gen_trace_problem, run_experiment, run_grid, GridSpec,
    MetricSelector, ProblemKind, RetractionSelector, RunSpec, HISTORY_HEADER,
};
use istiefel::matio;
use istiefel::rng::MatRng;
use istiefel::{Error, Status};

fn small_trace(metric: MetricSelector) -> RunSpec {
    let mut rs = RunSpec::new(ProblemKind::Trace, metric);
    rs.n = Some(30);
    rs.k = Some(6);
    rs.seed = 3;
    rs
}

#[test]
fn generators_pass_finite_difference_checks() {
    let insts = [gen_trace_problem(100, 20, 75, 25, 10, 10, 1).unwrap(), gen_procrustes_problem(60, 45, 15, 4, 1).unwrap()];
    for inst in &insts {
        let x = inst.x0.x();
        let dir = MatRng::new(9).normal(x.nrows(), x.ncols());
        let h = 1e-6;
        let obj = inst.objective.as_ref();
        let fd = (obj.value(&(x + &dir * h)) - obj.value(&(x - &dir * h))) / (2.0 * h);
        let exact = obj.egrad(x).dot(&dir);
        assert!((fd - exact).abs() <= 1e-6 * exact.abs(), "{}", inst.name);
        assert!(inst.x0.feasibility() <= 1e-10);
    }
}

#[test]
fn trace_start_is_feasible_at_several_sizes() {
    for (n, k, p, m, kp, km) in [(10, 4, 6, 4, 2, 2), (40, 10, 30, 10, 7, 3), (100, 20, 75, 25, 10, 10)] {
        let inst = gen_trace_problem(n, k, p, m, kp, km, 0).unwrap();
        assert!(inst.x0.feasibility() <= 1e-12);
        assert_eq!(inst.spec.inertia_j().n_pos, kp);
    }
}

#[test]
fn artifacts_are_written() {
    let dir = tempfile::tempdir().unwrap();
    let mut rs = small_trace(MetricSelector::Gcan);
    rs.out = Some(dir.path().join("run"));
    let out = run_experiment(&rs).unwrap();
    assert_eq!(out.result.status, Status::Converged);

    let hist = fs::read_to_string(dir.path().join("run/history.csv")).unwrap();
    let mut lines = hist.lines();
    assert_eq!(lines.next(), Some(HISTORY_HEADER));
    assert_eq!(lines.count(), out.result.history.len());

    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("run/summary.json")).unwrap()).unwrap();
    for key in ["obj", "grad", "feas", "iter", "eval", "cpu", "status", "config", "lyapunov_solves"] {
        assert!(summary.get(key).is_some(), "missing {key}");
    }
    assert_eq!(summary["status"], "Converged");
    assert_eq!(summary["config"]["n"], 30);
    assert!(summary["feas"].as_f64().unwrap() <= 1e-8);

    let x = matio::read_matrix(&dir.path().join("run/x_final.json")).unwrap();
    assert_eq!(&x, out.result.point.x());

    let plot = fs::read_to_string(dir.path().join("run/convergence.csv")).unwrap();
    let rows: Vec<Vec<f64>> = plot.lines().skip(1).map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), out.result.history.len());
    assert!(rows.iter().all(|r| r[2] > 0.0 && r[1] >= 0.0));
    assert!(rows.last().unwrap()[2] <= rs.solver.rstop * rows[0][2]);
    for (r, rec) in rows.iter().zip(&out.result.history) {
        assert!((r[3] - rec.c).abs() <= 1e-12 * (1.0 + rec.c.abs()));
    }
}

#[test]
fn plotdata_rejects_empty_history() {
    assert!(emit_history_plotdata(&mut Vec::new(), &[], 0.85).is_err());
}

#[test]
fn history_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let mut rs = small_trace(MetricSelector::Gcan);
    rs.record_elapsed = false;
    let mut bytes = Vec::new();
    for i in 0..2 {
        rs.out = Some(dir.path().join(format!("r{i}")));
        run_experiment(&rs).unwrap();
        bytes.push(fs::read(dir.path().join(format!("r{i}/history.csv"))).unwrap());
    }
    assert_eq!(bytes[0], bytes[1]);
}

#[test]
fn solve_counts_in_summaries() {
    let g = run_experiment(&small_trace(MetricSelector::Gcan)).unwrap().summary;
    let e = run_experiment(&small_trace(MetricSelector::Eucl)).unwrap().summary;
    assert_eq!(g.lyapunov_solves, 0);
    assert!(e.lyapunov_solves >= e.iter);
}

#[test]
fn starting_point_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let rs = small_trace(MetricSelector::Gcan);
    let inst = rs.build_problem().unwrap();
    let path = dir.path().join("x0.txt");
    fs::write(&path, matio::to_text(inst.x0.x())).unwrap();
    let mut with_file = rs.clone();
    with_file.x0 = Some(path);
    let a = run_experiment(&rs).unwrap();
    let b = run_experiment(&with_file).unwrap();
    assert_eq!(a.result.iterations, b.result.iterations);

    let bad = dir.path().join("bad.json");
    fs::write(&bad, matio::to_json_string(&(inst.x0.x() * 2.0)).unwrap()).unwrap();
    with_file.x0 = Some(bad);
    assert!(matches!(run_experiment(&with_file), Err(Error::Infeasible { .. })));
}

#[test]
fn inconsistent_dimensions_are_rejected() {
    let mut rs = small_trace(MetricSelector::Gcan);
    rs.k_p = Some(4);
    rs.k_m = Some(4);
    assert!(matches!(run_experiment(&rs), Err(Error::Config(_))));
    let mut rs = RunSpec::new(ProblemKind::Procrustes, MetricSelector::Gcan);
    rs.n = Some(20);
    rs.k = Some(5);
    assert!(matches!(run_experiment(&rs), Err(Error::Config(_))));
}

#[test]
fn grid_runs_in_parallel_and_keeps_order() {
    let dir = tempfile::tempdir().unwrap();
    let mut base = small_trace(MetricSelector::Gcan);
    base.out = Some(dir.path().to_path_buf());
    let grid = GridSpec { base, metrics: vec![MetricSelector::Eucl, MetricSelector::Gcan], retractions: vec![RetractionSelector::Qgeo] };
    let rows = run_grid(&grid, 2).unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0].config.metric, MetricSelector::Eucl);
    assert_eq!(rows[1].lyapunov_solves, 0);
    assert!(dir.path().join("Eucl-qgeo/history.csv").exists());
    assert!(dir.path().join("gcan-qgeo/summary.json").exists());
    let table = fs::read_to_string(dir.path().join("compare.txt")).unwrap();
    assert!(table.starts_with("Combination"));
    assert_eq!(table.lines().count(), 3);
    let sequential = run_grid(&GridSpec { base: small_trace(MetricSelector::Gcan), ..grid.clone() }, 1).unwrap();
    assert_eq!(sequential[1].iter, rows[1].iter);
}
