//! The two model problems: trace minimization and J-orthogonal Procrustes.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{block_diag, Mat};
use crate::manifold::{make_spec, ManifoldSpec, Point};
use crate::optimizer::Objective;
use crate::rng::MatRng;

/// f(X) = tr(XᵀMX), ∇f̄(X) = 2MX.
#[derive(Debug, Clone)]
pub struct TraceObjective {
    pub m: Mat,
}

impl Objective for TraceObjective {
    fn value(&self, x: &Mat) -> f64 {
        x.dot(&(&self.m * x))
    }

    fn egrad(&self, x: &Mat) -> Mat {
        &self.m * x * 2.0
    }
}

/// f(X) = ‖GX − B‖²_F, ∇f̄(X) = 2Gᵀ(GX − B).
#[derive(Debug, Clone)]
pub struct ProcrustesObjective {
    pub g: Mat,
    pub b: Mat,
}

impl Objective for ProcrustesObjective {
    fn value(&self, x: &Mat) -> f64 {
        (&self.g * x - &self.b).norm_squared()
    }

    fn egrad(&self, x: &Mat) -> Mat {
        self.g.transpose() * (&self.g * x - &self.b) * 2.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dimensions {
    pub n: usize,
    pub k: usize,
    pub p: usize,
    pub m: usize,
    pub k_p: usize,
    pub k_m: usize,
}

pub struct ProblemInstance {
    pub name: String,
    pub objective: Arc<dyn Objective>,
    pub spec: Arc<ManifoldSpec>,
    pub x0: Point,
    pub seed: u64,
    pub dims: Dimensions,
    /// Known global minimizer, when the construction plants one.
    pub planted: Option<Mat>,
}

impl std::fmt::Debug for ProblemInstance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ProblemInstance")
            .field("name", &self.name)
            .field("seed", &self.seed)
            .field("dims", &self.dims)
            .finish_non_exhaustive()
    }
}

fn signed_diag(p: usize, m: usize, scaled: bool) -> Mat {
    let mut d = Vec::with_capacity(p + m);
    d.extend((1..=p).map(|i| if scaled { i as f64 } else { 1.0 }));
    d.extend((1..=m).map(|i| if scaled { -(i as f64) } else { -1.0 }));
    Mat::from_diagonal(&nalgebra::DVector::from_vec(d))
}

/// Trace minimization with A = diag(1,…,p, −1,…,−m), J = diag(I_{k_p}, −I_{k_m})
/// and M = VVᵀ for an orthonormalized random n×(n−5) matrix V.
///
/// X₀ is zero except for diag(1/√1,…,1/√k_p) in rows 1..k_p, columns
/// 1..k_p and diag(1/√1,…,1/√k_m) in rows p+1..p+k_m, columns
/// k_p+1..k_p+k_m.
pub fn gen_trace_problem(
    n: usize,
    k: usize,
    p: usize,
    m: usize,
    k_p: usize,
    k_m: usize,
    seed: u64,
) -> Result<ProblemInstance> {
    if p + m != n || k_p + k_m != k || k_p > p || k_m > m || n < 6 {
        return Err(Error::Config(format!(
            "inconsistent trace dimensions n={n} k={k} p={p} m={m} k_p={k_p} k_m={k_m} \
             (need p+m=n, k_p+k_m=k, k_p≤p, k_m≤m, n≥6)"
        )));
    }
    let a = signed_diag(p, m, true);
    let j = signed_diag(k_p, k_m, false);
    let spec = Arc::new(make_spec(a, j)?);

    let mut rng = MatRng::new(seed);
    let v = rng.orthonormal(n, n - 5);
    let mm = &v * v.transpose();
    let mm = (&mm + mm.transpose()) * 0.5;

    let mut x0 = Mat::zeros(n, k);
    for i in 0..k_p {
        x0[(i, i)] = 1.0 / ((i + 1) as f64).sqrt();
    }
    for i in 0..k_m {
        x0[(p + i, k_p + i)] = 1.0 / ((i + 1) as f64).sqrt();
    }
    let x0 = Point::with_tol(spec.clone(), x0, 1e-12)?;
    Ok(ProblemInstance {
        name: "trace".into(),
        objective: Arc::new(TraceObjective { m: mm }),
        spec,
        x0,
        seed,
        dims: Dimensions { n, k, p, m, k_p, k_m },
        planted: None,
    })
}

/// Flips the last column when det < 0.
fn proper(mut q: Mat) -> Mat {
    if q.ncols() > 0 && q.clone().determinant() < 0.0 {
        let last = q.ncols() - 1;
        q.column_mut(last).neg_mut();
    }
    q
}

/// Procrustes on the J-orthogonal group: A = J = diag(I_p, −I_m), k = n.
///
/// G is a random (n − rank_deficit)×n matrix, B = G·diag(U, V) for
/// orthonormalized random U (p×p) and V (m×m), and X₀ = I_n. The planted
/// point diag(U, V) is feasible and attains f = 0. U and V are made proper
/// rotations so the planted point lies in the component of I.
pub fn gen_procrustes_problem(
    n: usize,
    p: usize,
    m: usize,
    rank_deficit: usize,
    seed: u64,
) -> Result<ProblemInstance> {
    if p + m != n || rank_deficit >= n || p == 0 {
        return Err(Error::Config(format!(
            "inconsistent Procrustes dimensions n={n} p={p} m={m} rank_deficit={rank_deficit} \
             (need p+m=n, p≥1, rank_deficit<n)"
        )));
    }
    let j = signed_diag(p, m, false);
    let spec = Arc::new(make_spec(j.clone(), j)?);

    let mut rng = MatRng::new(seed);
    let g = rng.normal(n - rank_deficit, n);
    let u = proper(rng.orthonormal(p, p));
    let v = proper(rng.orthonormal(m, m));
    let planted = block_diag(&u, &v);
    let b = &g * &planted;

    let x0 = Point::with_tol(spec.clone(), Mat::identity(n, n), 0.0)?;
    Ok(ProblemInstance {
        name: "procrustes".into(),
        objective: Arc::new(ProcrustesObjective { g, b }),
        spec,
        x0,
        seed,
        dims: Dimensions { n, k: n, p, m, k_p: p, k_m: m },
        planted: Some(planted),
    })
}
