//! Random problem instances for property checks and the `verify` command.

use std::sync::Arc;

use crate::linalg::{block_diag, expm, Mat};
use crate::manifold::{make_spec, ManifoldSpec, Point};
use crate::rng::MatRng;

/// Random indefinite A = T·D·Tᵀ, mixed-signature J and a feasible X.
///
/// With A = T·D·Tᵀ, the point X = T⁻ᵀ·E·|D_E|^{-1/2}·H satisfies XᵀAX = J,
/// where E selects k_p positive and k_m negative diagonal entries of D and H
/// is a random J-orthogonal matrix exp(J·Ω), Ω skew.
pub fn random_instance(n: usize, k: usize, seed: u64) -> (Arc<ManifoldSpec>, Point) {
    assert!(k <= n && n >= 1);
    let mut rng = MatRng::new(seed);
    let k_p = if k >= 2 { 1 + (rng.uniform(0.0, (k - 1) as f64) as usize).min(k - 2) } else { k };
    let k_m = k - k_p;
    let free = n - k;
    let extra_pos = (rng.uniform(0.0, (free + 1) as f64) as usize).min(free);
    let n_pos = k_p + extra_pos;

    let mut d = Vec::with_capacity(n);
    for i in 0..n {
        let mag = rng.uniform(0.5, 3.0);
        d.push(if i < n_pos { mag } else { -mag });
    }
    let t = rng.well_conditioned(n);
    let dm = Mat::from_diagonal(&nalgebra::DVector::from_vec(d.clone()));
    let a = &t * dm * t.transpose();
    let a = (&a + a.transpose()) * 0.5;
    let j = block_diag(&Mat::identity(k_p, k_p), &(-Mat::identity(k_m, k_m)));

    // columns: first k_p positive slots, then k_m negative slots
    let mut e = Mat::zeros(n, k);
    for c in 0..k_p {
        e[(c, c)] = 1.0 / d[c].abs().sqrt();
    }
    for c in 0..k_m {
        let row = n_pos + c;
        e[(row, k_p + c)] = 1.0 / d[row].abs().sqrt();
    }
    let t_inv_t = t.transpose().lu().solve(&Mat::identity(n, n)).expect("T well conditioned");
    let omega = rng.skew(k) * 0.5;
    let h = expm(&(&j * omega)).expect("small exponent");
    let x = t_inv_t * e * h;

    let spec = Arc::new(make_spec(a, j).expect("fixture spec is valid"));
    let point = Point::new(spec.clone(), x).expect("fixture point is feasible");
    (spec, point)
}

/// Orthogonal Stiefel instance A = I_n, J = I_k with a random orthonormal X.
pub fn random_stiefel(n: usize, k: usize, seed: u64) -> (Arc<ManifoldSpec>, Point) {
    let mut rng = MatRng::new(seed);
    let x = rng.orthonormal(n, k);
    let spec = Arc::new(make_spec(Mat::identity(n, n), Mat::identity(k, k)).unwrap());
    let point = Point::new(spec.clone(), x).unwrap();
    (spec, point)
}
