//! Quasi-geodesics and the quasi-geodesic retraction.
//!
//! For X on the manifold and a tangent Z, the curve
//!
//! ```text
//! Y(t) = [X Z] · exp(t Ψ) · [I_k; 0] · exp(−t J W₀),
//! Ψ = [[J W₀, −J V₀], [I_k, J W₀]],   W₀ = XᵀAZ,  V₀ = ZᵀAZ,
//! ```
//!
//! solves Ÿ + Y·J·(ẎᵀAẎ) = 0 with Y(0) = X, Ẏ(0) = Z and stays on the
//! manifold for every real t. Its value at t = 1 is the retraction.

use crate::error::{Error, Result};
use crate::linalg::{block2, expm, hcat, norm1, Mat};
use crate::manifold::{Point, TangentVector};

/// Largest admissible t·‖Ψ‖₁ before evaluation is refused.
pub const MAX_EXPONENT_NORM: f64 = 50.0;

#[derive(Debug, Clone)]
pub struct QuasiGeodesic {
    base: Point,
    z: Mat,
    w0: Mat,
    v0: Mat,
    jw0: Mat,
    psi: Mat,
    xz: Mat,
    psi_norm: f64,
}

impl QuasiGeodesic {
    pub fn new(direction: &TangentVector) -> Self {
        Self::from_parts(direction.base(), direction.z())
    }

    /// Builds the curve without re-checking tangency of `z`.
    pub fn from_parts(base: &Point, z: &Mat) -> Self {
        let spec = base.spec();
        let j = spec.j();
        let az = spec.a() * z;
        let w0 = base.x().transpose() * &az;
        let v0 = z.transpose() * &az;
        let v0 = (&v0 + v0.transpose()) * 0.5;
        let jw0 = j * &w0;
        let k = spec.k();
        let psi = block2(&jw0, &(-(j * &v0)), &Mat::identity(k, k), &jw0);
        let psi_norm = norm1(&psi);
        Self { base: base.clone(), z: z.clone(), w0, v0, jw0, psi, xz: hcat(base.x(), z), psi_norm }
    }

    pub fn base(&self) -> &Point {
        &self.base
    }

    pub fn w0(&self) -> &Mat {
        &self.w0
    }

    pub fn v0(&self) -> &Mat {
        &self.v0
    }

    pub fn psi(&self) -> &Mat {
        &self.psi
    }

    /// ‖Ψ‖₁, reported for conditioning diagnostics.
    pub fn psi_norm(&self) -> f64 {
        self.psi_norm
    }

    fn exponentials(&self, t: f64) -> Result<(Mat, Mat)> {
        if !t.is_finite() {
            return Err(Error::Range(format!("curve parameter {t}")));
        }
        if t.abs() * self.psi_norm > MAX_EXPONENT_NORM {
            return Err(Error::Range(format!(
                "|t|·‖Ψ‖₁ = {:.3e} exceeds {MAX_EXPONENT_NORM}",
                t.abs() * self.psi_norm
            )));
        }
        let big = expm(&(&self.psi * t))?;
        let small = expm(&(&self.jw0 * (-t)))?;
        Ok((big, small))
    }

    /// Y(t).
    pub fn eval(&self, t: f64) -> Result<Point> {
        let k = self.base.spec().k();
        let (big, small) = self.exponentials(t)?;
        let y = &self.xz * big.columns(0, k) * small;
        Ok(Point::new_unchecked(self.base.spec_arc().clone(), y))
    }

    /// Ẏ(t) = [X Z] · exp(tΨ) · [0; I_k] · exp(−tJW₀).
    pub fn velocity(&self, t: f64) -> Result<Mat> {
        let k = self.base.spec().k();
        let (big, small) = self.exponentials(t)?;
        Ok(&self.xz * big.columns(k, k) * small)
    }

    /// (Y(t), Ẏ(t)) sharing one pair of exponentials.
    pub fn eval_with_velocity(&self, t: f64) -> Result<(Point, Mat)> {
        let k = self.base.spec().k();
        let (big, small) = self.exponentials(t)?;
        let y = &self.xz * big.columns(0, k) * &small;
        let yd = &self.xz * big.columns(k, k) * small;
        Ok((Point::new_unchecked(self.base.spec_arc().clone(), y), yd))
    }

    /// W(t) = YᵀAẎ and V(t) = ẎᵀAẎ evaluated on the curve.
    pub fn conserved(&self, t: f64) -> Result<(Mat, Mat)> {
        let (y, yd) = self.eval_with_velocity(t)?;
        let a_yd = self.base.spec().a() * &yd;
        Ok((y.x().transpose() * &a_yd, yd.transpose() * a_yd))
    }

    /// Closed form exp(−tW₀ᵀJ)·V₀·exp(−tJW₀) of V(t).
    pub fn v_closed_form(&self, t: f64) -> Result<Mat> {
        let j = self.base.spec().j();
        let left = expm(&(self.w0.transpose() * j * (-t)))?;
        let right = expm(&(&self.jw0 * (-t)))?;
        Ok(left * &self.v0 * right)
    }

    pub fn direction(&self) -> &Mat {
        &self.z
    }
}

/// Residual ‖exp(tΛ)ᵀ·Ω·exp(tΛ) − Ω‖_F with Λ = [[JΘ, JΓ], [I, JΘ]] and
/// Ω = [[0, J], [−J, 0]].
pub fn check_symplectic_like_invariance(theta: &Mat, gamma: &Mat, j: &Mat, t: f64) -> Result<f64> {
    let k = j.nrows();
    let jt = j * theta;
    let lambda = block2(&jt, &(j * gamma), &Mat::identity(k, k), &jt);
    let zero = Mat::zeros(k, k);
    let omega = block2(&zero, j, &(-j), &zero);
    let e = expm(&(lambda * t))?;
    Ok((e.transpose() * &omega * &e - omega).norm())
}

/// R_X(Z) = Y(1) of the quasi-geodesic through X with velocity Z.
pub fn retract_qgeo(z: &TangentVector) -> Result<Point> {
    QuasiGeodesic::new(z).eval(1.0)
}

/// Retraction applied to an ambient matrix assumed tangent at `x`.
pub fn retract_qgeo_at(x: &Point, z: &Mat) -> Result<Point> {
    QuasiGeodesic::from_parts(x, z).eval(1.0)
}

/// A retraction usable by the optimizer.
pub trait Retraction: Send + Sync {
    fn retract(&self, x: &Point, z: &Mat) -> Result<Point>;
    fn name(&self) -> &'static str;
}

/// The quasi-geodesic retraction.
#[derive(Debug, Clone, Copy, Default)]
pub struct QuasiGeodesicRetraction;

impl Retraction for QuasiGeodesicRetraction {
    fn retract(&self, x: &Point, z: &Mat) -> Result<Point> {
        retract_qgeo_at(x, z)
    }

    fn name(&self) -> &'static str {
        "qgeo"
    }
}
