//! Brute-force reference computations shared by the integration tests.
//! None of these call the library routine they are used to check.
#![allow(dead_code)]

use istiefel::linalg::Mat;
use nalgebra::DVector;

pub fn vec(m: &Mat) -> DVector<f64> {
    DVector::from_column_slice(m.as_slice())
}

pub fn unvec(v: &DVector<f64>, rows: usize, cols: usize) -> Mat {
    Mat::from_column_slice(rows, cols, v.as_slice())
}

pub fn rel(a: &Mat, b: &Mat) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

/// Solves C·U + U·C = R through the (I⊗C + Cᵀ⊗I) vec(U) = vec(R) system.
pub fn kron_lyap(c: &Mat, r: &Mat) -> Mat {
    let k = c.nrows();
    let i = Mat::identity(k, k);
    let op = i.kronecker(c) + c.transpose().kronecker(&i);
    let u = op.lu().solve(&vec(r)).expect("Kronecker system is nonsingular");
    unvec(&u, k, k)
}

/// exp(M) from the Taylor series of M/2^s followed by s squarings.
pub fn expm_series(m: &Mat) -> Mat {
    let n = m.nrows();
    let norm = m.norm();
    let s = if norm > 0.5 { (norm / 0.5).log2().ceil() as i32 } else { 0 };
    let small = m / 2f64.powi(s);
    let mut term = Mat::identity(n, n);
    let mut sum = term.clone();
    for i in 1..40 {
        term = &term * &small / i as f64;
        sum += &term;
        if term.norm() < 1e-20 * sum.norm() {
            break;
        }
    }
    for _ in 0..s {
        sum = &sum * &sum;
    }
    sum
}

/// Classical RK4 on Ÿ = −Y·J·(ẎᵀAẎ) from (X, Z) up to time t with fixed step h.
pub fn rk4_quasi_geodesic(a: &Mat, j: &Mat, x: &Mat, z: &Mat, t: f64, h: f64) -> (Mat, Mat) {
    let accel = |y: &Mat, v: &Mat| -(y * j * (v.transpose() * a * v));
    let steps = (t / h).round().max(1.0) as usize;
    let h = t / steps as f64;
    let (mut y, mut v) = (x.clone(), z.clone());
    for _ in 0..steps {
        let k1y = v.clone();
        let k1v = accel(&y, &v);
        let y2 = &y + &k1y * (h / 2.0);
        let v2 = &v + &k1v * (h / 2.0);
        let k2y = v2.clone();
        let k2v = accel(&y2, &v2);
        let y3 = &y + &k2y * (h / 2.0);
        let v3 = &v + &k2v * (h / 2.0);
        let k3y = v3.clone();
        let k3v = accel(&y3, &v3);
        let y4 = &y + &k3y * h;
        let v4 = &v + &k3v * h;
        let k4y = v4.clone();
        let k4v = accel(&y4, &v4);
        y += (k1y + &k2y * 2.0 + &k3y * 2.0 + k4y) * (h / 6.0);
        v += (k1v + &k2v * 2.0 + &k3v * 2.0 + k4v) * (h / 6.0);
    }
    (y, v)
}

/// Orthonormal basis (columns are vec(Z)) of {Z : XᵀAZ + ZᵀAX = 0}, taken
/// from the SVD of the matrix of the linear constraint map.
pub fn tangent_basis(a: &Mat, x: &Mat) -> Mat {
    let (n, k) = x.shape();
    let nk = n * k;
    let mut cols = Vec::with_capacity(nk);
    for idx in 0..nk {
        let mut e = Mat::zeros(n, k);
        e[(idx % n, idx / n)] = 1.0;
        let m = x.transpose() * a * &e;
        cols.push(vec(&(&m + m.transpose())));
    }
    let op = Mat::from_columns(&cols);
    // Null space of op via the eigenvectors of opᵀop with tiny eigenvalues.
    let gram = op.transpose() * &op;
    let eig = nalgebra::SymmetricEigen::new(gram);
    let top = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
    let keep: Vec<_> = (0..nk)
        .filter(|&i| eig.eigenvalues[i] <= 1e-10 * top)
        .map(|i| eig.eigenvectors.column(i).into_owned())
        .collect();
    Mat::from_columns(&keep)
}

/// argmin over tangent ξ of tr((Y − ξ)ᵀ M (Y − ξ)).
pub fn ls_projection(a: &Mat, mx: &Mat, x: &Mat, y: &Mat) -> Mat {
    let (n, k) = x.shape();
    let basis = tangent_basis(a, x);
    let big_m = Mat::identity(k, k).kronecker(mx);
    let lhs = basis.transpose() * &big_m * &basis;
    let rhs = basis.transpose() * &big_m * vec(y);
    let c = lhs.cholesky().expect("Gram matrix is spd").solve(&rhs);
    unvec(&(basis * c), n, k)
}

/// ρ⁻¹AXXᵀA + I − X(XᵀX)⁻¹Xᵀ.
pub fn mx_choice_b(a: &Mat, x: &Mat, rho: f64) -> Mat {
    let n = x.nrows();
    let ax = a * x;
    let ptx = x * (x.transpose() * x).try_inverse().unwrap() * x.transpose();
    &ax * ax.transpose() / rho + Mat::identity(n, n) - ptx
}

/// ρ⁻¹AXXᵀA + (A(I − XJXᵀA))².
pub fn mx_choice_a(a: &Mat, j: &Mat, x: &Mat, rho: f64) -> Mat {
    let n = x.nrows();
    let ax = a * x;
    let b = a * (Mat::identity(n, n) - x * j * ax.transpose());
    &ax * ax.transpose() / rho + &b * &b
}

pub fn central_diff(f: impl Fn(&Mat) -> f64, x: &Mat, z: &Mat, h: f64) -> f64 {
    (f(&(x + z * h)) - f(&(x - z * h))) / (2.0 * h)
}

/// Two-level Richardson extrapolation of the forward slope (c(h) − c(0))/h.
pub fn richardson_slope(c: impl Fn(f64) -> Mat, h1: f64, h2: f64) -> Mat {
    let base = c(0.0);
    let d1 = (c(h1) - &base) / h1;
    let d2 = (c(h2) - &base) / h2;
    (d2 * h1 - d1 * h2) / (h1 - h2)
}

/// Numerical rank via singular values relative to the largest.
pub fn rank(m: &Mat, rtol: f64) -> usize {
    let sv = m.clone().svd(false, false).singular_values;
    let top = sv.iter().cloned().fold(0.0, f64::max);
    sv.iter().filter(|&&s| s > rtol * top).count()
}
