//! Dense real-matrix kernels used by the geometry.
//!
//! Everything here is a pure function over `nalgebra` dynamic matrices. The
//! kernels are picked for robustness at desk scale (n up to a few thousand),
//! not for peak throughput.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

/// Dense column-major real matrix.
pub type Mat = DMatrix<f64>;

/// Relative threshold below which an eigenvalue is counted as zero.
pub const INERTIA_RTOL: f64 = 1e-10;

/// Eigenvalue sign counts of a symmetric matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Inertia {
    pub n_pos: usize,
    pub n_neg: usize,
    pub n_zero: usize,
}

impl Inertia {
    pub fn dim(&self) -> usize {
        self.n_pos + self.n_neg + self.n_zero
    }
}

pub(crate) fn ensure_square(m: &Mat, what: &str) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::Shape(format!(
            "{what} must be square, got {}×{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

pub(crate) fn ensure_finite(m: &Mat, what: &'static str) -> Result<()> {
    if m.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}

pub(crate) fn ensure_shape(m: &Mat, rows: usize, cols: usize, what: &str) -> Result<()> {
    if m.nrows() != rows || m.ncols() != cols {
        return Err(Error::Shape(format!(
            "{what} must be {rows}×{cols}, got {}×{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

/// Symmetric part ½(M + Mᵀ).
pub fn sym(m: &Mat) -> Result<Mat> {
    ensure_square(m, "sym input")?;
    Ok((m + m.transpose()) * 0.5)
}

/// Skew-symmetric part ½(M − Mᵀ).
pub fn skew(m: &Mat) -> Result<Mat> {
    ensure_square(m, "skew input")?;
    Ok((m - m.transpose()) * 0.5)
}

// Square-only helpers for internal hot paths where the shape is known.
pub(crate) fn sym_sq(m: &Mat) -> Mat {
    (m + m.transpose()) * 0.5
}

pub(crate) fn skew_sq(m: &Mat) -> Mat {
    (m - m.transpose()) * 0.5
}

/// Frobenius inner product ⟨P, Q⟩ = tr(PᵀQ).
pub fn frob_inner(p: &Mat, q: &Mat) -> f64 {
    p.dot(q)
}

/// Induced 1-norm (maximum absolute column sum).
pub fn norm1(m: &Mat) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `[P Q]`, horizontal concatenation.
pub fn hcat(p: &Mat, q: &Mat) -> Mat {
    assert_eq!(p.nrows(), q.nrows(), "hcat row mismatch");
    let mut out = Mat::zeros(p.nrows(), p.ncols() + q.ncols());
    out.columns_mut(0, p.ncols()).copy_from(p);
    out.columns_mut(p.ncols(), q.ncols()).copy_from(q);
    out
}

/// `[[P, Q], [R, S]]` for k×k blocks.
pub fn block2(p: &Mat, q: &Mat, r: &Mat, s: &Mat) -> Mat {
    let (a, b) = (p.nrows(), p.ncols());
    let (c, d) = (r.nrows(), q.ncols());
    let mut out = Mat::zeros(a + c, b + d);
    out.view_mut((0, 0), (a, b)).copy_from(p);
    out.view_mut((0, b), (a, d)).copy_from(q);
    out.view_mut((a, 0), (c, b)).copy_from(r);
    out.view_mut((a, b), (c, d)).copy_from(s);
    out
}

/// Block diagonal `diag(P, Q)`.
pub fn block_diag(p: &Mat, q: &Mat) -> Mat {
    let zpq = Mat::zeros(p.nrows(), q.ncols());
    let zqp = Mat::zeros(q.nrows(), p.ncols());
    block2(p, &zpq, &zqp, q)
}

// Padé [13/13] numerator coefficients.
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

// Largest 1-norm for which the [13/13] approximant is accurate to unit roundoff.
const THETA13: f64 = 5.371920351148152;

/// Matrix exponential by scaling and squaring with a fixed [13/13] Padé
/// approximant.
///
/// The input is scaled by 2⁻ˢ so that its 1-norm is at most θ₁₃, the Padé
/// approximant is evaluated, and the result is squared s times.
pub fn expm(m: &Mat) -> Result<Mat> {
    ensure_square(m, "expm input")?;
    ensure_finite(m, "expm input")?;
    let n = m.nrows();
    if n == 0 {
        return Ok(Mat::zeros(0, 0));
    }
    let nrm = norm1(m);
    let s = if nrm > THETA13 {
        (nrm / THETA13).log2().ceil() as i32
    } else {
        0
    };
    if s > 1000 {
        return Err(Error::Range(format!("expm: 1-norm {nrm:.3e} too large")));
    }
    let a = m * 0.5f64.powi(s);
    let b = &PADE13;
    let ident = Mat::identity(n, n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;

    let u_inner = &a6 * (&a6 * b[13] + &a4 * b[11] + &a2 * b[9])
        + &a6 * b[7]
        + &a4 * b[5]
        + &a2 * b[3]
        + &ident * b[1];
    let u = &a * u_inner;
    let v = &a6 * (&a6 * b[12] + &a4 * b[10] + &a2 * b[8])
        + &a6 * b[6]
        + &a4 * b[4]
        + &a2 * b[2]
        + &ident * b[0];

    let p = &v + &u;
    let q = &v - &u;
    let mut r = q
        .lu()
        .solve(&p)
        .ok_or_else(|| Error::Range("expm: singular Padé denominator".into()))?;
    for _ in 0..s {
        r = &r * &r;
    }
    ensure_finite(&r, "expm result").map_err(|_| {
        Error::Range(format!("expm: overflow for input with 1-norm {nrm:.3e}"))
    })?;
    Ok(r)
}

/// Solves C·U + U·C = R for symmetric positive-definite C and symmetric R.
///
/// Uses the spectral method: with C = QΛQᵀ and R̃ = QᵀRQ, the transformed
/// solution is Ũᵢⱼ = R̃ᵢⱼ / (λᵢ + λⱼ).
pub fn lyap_spd(c: &Mat, r: &Mat) -> Result<Mat> {
    ensure_square(c, "Lyapunov coefficient")?;
    ensure_shape(r, c.nrows(), c.ncols(), "Lyapunov right-hand side")?;
    ensure_finite(c, "Lyapunov coefficient")?;
    ensure_finite(r, "Lyapunov right-hand side")?;
    let k = c.nrows();
    if k == 0 {
        return Ok(Mat::zeros(0, 0));
    }
    let asym = (c - c.transpose()).norm();
    if asym > 1e-10 * c.norm().max(1.0) {
        return Err(Error::Asymmetric { residual: asym });
    }
    let eig = SymmetricEigen::new(sym_sq(c));
    let lmax = eig.eigenvalues.amax();
    let lmin = eig.eigenvalues.min();
    if lmin <= 1e-14 * lmax.max(f64::MIN_POSITIVE) {
        return Err(Error::NotPositiveDefinite { min_eig: lmin });
    }
    let q = &eig.eigenvectors;
    let mut rt = q.transpose() * sym_sq(r) * q;
    for j in 0..k {
        for i in 0..k {
            rt[(i, j)] /= eig.eigenvalues[i] + eig.eigenvalues[j];
        }
    }
    Ok(sym_sq(&(q * rt * q.transpose())))
}

/// Counts positive, negative and numerically zero eigenvalues.
///
/// An eigenvalue λ is zero when |λ| ≤ 1e−10·max(1, ‖S‖₂).
pub fn inertia(s: &Mat) -> Result<Inertia> {
    ensure_square(s, "inertia input")?;
    ensure_finite(s, "inertia input")?;
    let asym = (s - s.transpose()).norm();
    if asym > 1e-8 * s.norm().max(1.0) {
        return Err(Error::Asymmetric { residual: asym });
    }
    if s.nrows() == 0 {
        return Ok(Inertia { n_pos: 0, n_neg: 0, n_zero: 0 });
    }
    let eigs = SymmetricEigen::new(sym_sq(s)).eigenvalues;
    let tol = INERTIA_RTOL * eigs.amax().max(1.0);
    let mut out = Inertia { n_pos: 0, n_neg: 0, n_zero: 0 };
    for &l in eigs.iter() {
        if l > tol {
            out.n_pos += 1;
        } else if l < -tol {
            out.n_neg += 1;
        } else {
            out.n_zero += 1;
        }
    }
    Ok(out)
}

/// Orthonormal basis X⊥ of the orthogonal complement of range(X).
///
/// Computed from a Householder QR of `[X I_n]`: when X has full column rank
/// the first k columns of the square orthogonal factor span range(X) and the
/// remaining n − k columns span its complement.
pub fn nullspace_basis(x: &Mat) -> Result<Mat> {
    ensure_finite(x, "nullspace input")?;
    let (n, k) = x.shape();
    if k > n {
        return Err(Error::Shape(format!("nullspace input is {n}×{k} with k > n")));
    }
    let aug = hcat(x, &Mat::identity(n, n));
    let qr = aug.qr();
    let r = qr.r();
    let scale = x.norm().max(f64::MIN_POSITIVE);
    for i in 0..k {
        if r[(i, i)].abs() <= 1e-12 * scale {
            return Err(Error::RankDeficient(format!(
                "column {i} of X is (numerically) dependent on earlier columns"
            )));
        }
    }
    let q = qr.q();
    Ok(q.columns(k, n - k).into_owned())
}

/// Thin orthogonal factor of a tall matrix with the sign convention that R
/// has a nonnegative diagonal.
pub fn orthonormalize(m: &Mat) -> Mat {
    let qr = m.clone().qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..q.ncols() {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}
