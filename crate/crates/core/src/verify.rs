//! Self-check suites behind `istiefel-opt verify`.
//!
//! Each suite draws a handful of random instances and compares the library
//! against identities or independent brute-force computations.

use std::time::Instant;

use serde::Serialize;

use crate::error::Result;
use crate::fixtures::random_instance;
use crate::geodesics::{check_symplectic_like_invariance, QuasiGeodesic};
use crate::linalg::{expm, lyap_spd, Mat};
use crate::manifold::{is_tangent, random_tangent};
use crate::metrics::{
    inner_ambient, project_normal_gcan, project_tangent_gcan, riemannian_gradient, Gamma3Choice, MetricKind,
};
use crate::rng::MatRng;

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub name: &'static str,
    pub cases: usize,
    pub worst: f64,
    pub tol: f64,
    pub passed: bool,
    pub seconds: f64,
}

fn finish(name: &'static str, cases: usize, worst: f64, tol: f64, start: Instant) -> SuiteReport {
    SuiteReport { name, cases, worst, tol, passed: worst <= tol, seconds: start.elapsed().as_secs_f64() }
}

fn dims(rng: &mut MatRng) -> (usize, usize) {
    let n = 6 + (rng.uniform(0.0, 1.0) * 20.0) as usize;
    let k = 2 + (rng.uniform(0.0, 1.0) * 5.0) as usize;
    (n, k.min(n - 1))
}

fn projections(cases: usize) -> Result<SuiteReport> {
    let start = Instant::now();
    let mut rng = MatRng::new(11);
    let mut worst: f64 = 0.0;
    let metric = MetricKind::gcan(2.0, Gamma3Choice::B)?;
    for c in 0..cases {
        let (n, k) = dims(&mut rng);
        let (_, x) = random_instance(n, k, 1000 + c as u64);
        let y = rng.normal(n, k);
        let p = project_tangent_gcan(&x, &y)?.into_inner();
        let q = project_normal_gcan(&x, &y)?;
        let scale = 1.0 + y.norm();
        let pp = project_tangent_gcan(&x, &p)?.into_inner();
        let (_, tan) = is_tangent(&x, &p);
        let orth = inner_ambient(&x, &p, &q, &metric)?.abs()
            / (1.0 + metric_sq(&x, &p, &metric)? * metric_sq(&x, &q, &metric)?).sqrt();
        worst = worst.max(((&p + &q) - &y).norm() / scale).max((pp - &p).norm() / scale).max(tan).max(orth);
    }
    Ok(finish("projections", cases, worst, 1e-9, start))
}

fn metric_sq(x: &crate::manifold::Point, z: &Mat, metric: &MetricKind) -> Result<f64> {
    inner_ambient(x, z, z, metric)
}

fn closed_form_vs_lyapunov(cases: usize) -> Result<SuiteReport> {
    let start = Instant::now();
    let mut rng = MatRng::new(12);
    let mut worst: f64 = 0.0;
    let gcan = MetricKind::gcan(1.5, Gamma3Choice::B)?;
    let tract = MetricKind::tractable_from_gcan(1.5, Gamma3Choice::B);
    for c in 0..cases {
        let (n, k) = dims(&mut rng);
        let (_, x) = random_instance(n, k, 2000 + c as u64);
        let g = rng.normal(n, k);
        let a = riemannian_gradient(&x, &g, &gcan)?;
        let b = riemannian_gradient(&x, &g, &tract)?;
        let err = (a.gradient.z() - b.gradient.z()).norm() / b.gradient.z().norm().max(1e-300);
        let counts_ok = a.lyapunov_solves == 0 && b.lyapunov_solves >= 1;
        worst = worst.max(if counts_ok { err } else { f64::INFINITY });
    }
    Ok(finish("closed-form gradient vs Lyapunov path", cases, worst, 1e-8, start))
}

fn lyapunov_kron(cases: usize) -> Result<SuiteReport> {
    let start = Instant::now();
    let mut rng = MatRng::new(13);
    let mut worst: f64 = 0.0;
    for _ in 0..cases {
        let k = 1 + (rng.uniform(0.0, 1.0) * 8.0) as usize;
        let g = rng.normal(k, k);
        let c = &g * g.transpose() + Mat::identity(k, k);
        let r = rng.symmetric(k);
        let u = lyap_spd(&c, &r)?;
        let i = Mat::identity(k, k);
        let op = i.kronecker(&c) + c.transpose().kronecker(&i);
        let rv = nalgebra::DVector::from_column_slice(r.as_slice());
        let uv = op.lu().solve(&rv).unwrap_or_else(|| nalgebra::DVector::from_element(k * k, f64::NAN));
        let oracle = Mat::from_column_slice(k, k, uv.as_slice());
        worst = worst.max((u - &oracle).norm() / (1.0 + oracle.norm()));
    }
    Ok(finish("lyap_spd vs Kronecker solve", cases, worst, 1e-10, start))
}

fn expm_series(cases: usize) -> Result<SuiteReport> {
    let start = Instant::now();
    let mut rng = MatRng::new(14);
    let mut worst: f64 = 0.0;
    for _ in 0..cases {
        let k = 2 + (rng.uniform(0.0, 1.0) * 8.0) as usize;
        let m = rng.normal(k, k) * rng.uniform(0.1, 3.0);
        let e = expm(&m)?;
        // Taylor series of exp(M/2^s) squared s times.
        let s = (m.norm().max(1.0).log2().ceil() as i32 + 4).max(0);
        let small = &m / 2f64.powi(s);
        let mut term = Mat::identity(k, k);
        let mut sum = term.clone();
        for i in 1..30 {
            term = &term * &small / i as f64;
            sum += &term;
        }
        for _ in 0..s {
            sum = &sum * &sum;
        }
        worst = worst.max((e - &sum).norm() / sum.norm());
    }
    Ok(finish("expm vs scaled Taylor series", cases, worst, 1e-12, start))
}

fn quasi_geodesics(cases: usize) -> Result<SuiteReport> {
    let start = Instant::now();
    let mut rng = MatRng::new(15);
    let mut worst: f64 = 0.0;
    for c in 0..cases {
        let (n, k) = dims(&mut rng);
        let (spec, x) = random_instance(n, k, 3000 + c as u64);
        let z = random_tangent(&x, c as u64)?;
        let curve = QuasiGeodesic::new(&z);
        for step in 0..=8 {
            let t = step as f64 * 0.25;
            let y = curve.eval(t)?;
            worst = worst.max(y.feasibility() / (1.0 + spec.a().norm() * y.x().norm_squared()));
            let (w, v) = curve.conserved(t)?;
            let vc = curve.v_closed_form(t)?;
            worst = worst.max((w - curve.w0()).norm() / (1.0 + curve.w0().norm()));
            worst = worst.max((v - &vc).norm() / (1.0 + vc.norm()));
        }
        let theta = rng.skew(k);
        let gamma = rng.symmetric(k);
        let lemma = check_symplectic_like_invariance(&theta, &gamma, spec.j(), 0.7)?;
        worst = worst.max(lemma / (1.0 + theta.norm() + gamma.norm()).powi(2));
    }
    Ok(finish("quasi-geodesic invariants", cases, worst, 1e-9, start))
}

/// Runs every suite with `cases` instances each.
pub fn run_all(cases: usize) -> Result<Vec<SuiteReport>> {
    Ok(vec![
        projections(cases)?,
        closed_form_vs_lyapunov(cases)?,
        lyapunov_kron(cases)?,
        expm_series(cases)?,
        quasi_geodesics(cases.min(10))?,
    ])
}
