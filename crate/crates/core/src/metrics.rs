//! Riemannian metrics on the indefinite Stiefel manifold.
//!
//! Three geometries are supported:
//!
//! * `Euclidean`: g(Z₁, Z₂) = tr(Z₁ᵀZ₂).
//! * `Tractable`: g(Z₁, Z₂) = tr(Z₁ᵀ M_X Z₂) for a caller-supplied spd M_X.
//!   Projections and gradients need one Lyapunov solve with the k×k
//!   coefficient XᵀA·M_X⁻¹·AX.
//! * `GeneralizedCanonical`: the one-parameter family whose M_X⁻¹ has the
//!   form ρXXᵀ + A⁻¹X⊥Γ₃X⊥ᵀA⁻¹. The Lyapunov coefficient collapses to ρI, so
//!   every projection and gradient has a closed form.
//!
//! Two choices of Γ₃ remove the dependence on the complement basis X⊥:
//! choice A sets Γ₃ = (X⊥ᵀX⊥)⁻¹, choice B sets
//! Γ₃ = (X⊥ᵀA⁻¹X⊥)⁻¹ X⊥ᵀX⊥ (X⊥ᵀA⁻¹X⊥)⁻¹.

use std::fmt;
use std::sync::Arc;

use nalgebra::Cholesky;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ensure_shape, lyap_spd, skew_sq, sym_sq, Mat};
use crate::manifold::{Point, TangentVector};

/// Γ₃ selection for the generalized canonical metric.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum Gamma3Choice {
    /// Γ₃ = (X⊥ᵀX⊥)⁻¹, giving M_X = ρ⁻¹AXXᵀA + (A(I − XJXᵀA))².
    A,
    /// Γ₃ = S⁻¹X⊥ᵀX⊥S⁻¹ with S = X⊥ᵀA⁻¹X⊥, giving
    /// M_X = ρ⁻¹AXXᵀA + I − X(XᵀX)⁻¹Xᵀ.
    #[default]
    B,
}

/// Callback producing the spd representing matrix of a tractable metric.
pub type MxProvider = Arc<dyn Fn(&Point) -> Mat + Send + Sync>;

#[derive(Clone)]
pub enum MetricKind {
    Euclidean,
    Tractable(MxProvider),
    GeneralizedCanonical { rho: f64, choice: Gamma3Choice },
}

impl MetricKind {
    pub fn gcan(rho: f64, choice: Gamma3Choice) -> Result<Self> {
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(Error::Config(format!("rho must be positive, got {rho}")));
        }
        Ok(MetricKind::GeneralizedCanonical { rho, choice })
    }

    /// Tractable metric whose M_X is the dense generalized canonical matrix.
    pub fn tractable_from_gcan(rho: f64, choice: Gamma3Choice) -> Self {
        MetricKind::Tractable(Arc::new(move |x: &Point| {
            mx_matrix(x, &MetricKind::GeneralizedCanonical { rho, choice })
                .expect("generalized canonical M_X is spd")
        }))
    }

    pub fn label(&self) -> &'static str {
        match self {
            MetricKind::Euclidean => "Eucl",
            MetricKind::Tractable(_) => "tractable",
            MetricKind::GeneralizedCanonical { .. } => "gcan",
        }
    }
}

impl Default for MetricKind {
    fn default() -> Self {
        MetricKind::GeneralizedCanonical { rho: 2.0, choice: Gamma3Choice::B }
    }
}

impl fmt::Debug for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricKind::Euclidean => write!(f, "Euclidean"),
            MetricKind::Tractable(_) => write!(f, "Tractable(<M_X provider>)"),
            MetricKind::GeneralizedCanonical { rho, choice } => {
                write!(f, "GeneralizedCanonical {{ rho: {rho}, choice: {choice:?} }}")
            }
        }
    }
}

/// Riemannian gradient plus cost counters for the call that produced it.
#[derive(Debug, Clone)]
pub struct GradientReport {
    pub gradient: TangentVector,
    pub lyapunov_solves: usize,
    /// Number of matrix products with an n×k operand.
    pub flops_proxy: usize,
}

fn inv_small(m: &Mat, what: &str) -> Result<Mat> {
    m.clone()
        .try_inverse()
        .ok_or_else(|| Error::RankDeficient(format!("{what} is singular")))
}

fn cholesky(m: Mat) -> Result<Cholesky<f64, nalgebra::Dyn>> {
    let probe = m.clone();
    Cholesky::new(m).ok_or_else(|| Error::NotPositiveDefinite {
        min_eig: nalgebra::SymmetricEigen::new(sym_sq(&probe)).eigenvalues.min(),
    })
}

/// Dense n×n representing matrix M_X of the metric at X.
pub fn mx_matrix(x: &Point, kind: &MetricKind) -> Result<Mat> {
    let spec = x.spec();
    let n = spec.n();
    let m = match kind {
        MetricKind::Euclidean => return Ok(Mat::identity(n, n)),
        MetricKind::Tractable(provider) => {
            let m = provider(x);
            ensure_shape(&m, n, n, "M_X")?;
            m
        }
        MetricKind::GeneralizedCanonical { rho, choice } => {
            let ax = spec.a() * x.x();
            let first = &ax * ax.transpose() / *rho;
            match choice {
                Gamma3Choice::A => {
                    let b = spec.a() - &ax * spec.j() * ax.transpose();
                    first + &b * &b
                }
                Gamma3Choice::B => {
                    let xtx_inv = inv_small(&(x.x().transpose() * x.x()), "XᵀX")?;
                    first + Mat::identity(n, n) - x.x() * xtx_inv * x.x().transpose()
                }
            }
        }
    };
    let m = sym_sq(&m);
    cholesky(m.clone())?;
    Ok(m)
}

/// Γ₃ induced by `choice` for the complement basis `xperp`.
pub fn gamma3(x: &Point, xperp: &Mat, choice: Gamma3Choice) -> Result<Mat> {
    let gram = xperp.transpose() * xperp;
    match choice {
        Gamma3Choice::A => inv_small(&gram, "X⊥ᵀX⊥"),
        Gamma3Choice::B => {
            let s = xperp.transpose() * x.spec().solve_a(xperp);
            let s_inv = inv_small(&s, "X⊥ᵀA⁻¹X⊥")?;
            Ok(&s_inv * gram * &s_inv)
        }
    }
}

/// M_X⁻¹ = ρXXᵀ + A⁻¹X⊥Γ₃X⊥ᵀA⁻¹ for an explicit complement basis.
pub fn mx_inverse(x: &Point, xperp: &Mat, rho: f64, choice: Gamma3Choice) -> Result<Mat> {
    let g3 = gamma3(x, xperp, choice)?;
    let ainv_xp = x.spec().solve_a(xperp);
    Ok(x.x() * x.x().transpose() * rho + &ainv_xp * g3 * ainv_xp.transpose())
}

/// tr(Z₁ᵀ M_X Z₂) for arbitrary ambient matrices.
///
/// The generalized canonical case never forms M_X.
pub fn inner_ambient(x: &Point, z1: &Mat, z2: &Mat, kind: &MetricKind) -> Result<f64> {
    let (n, k) = (x.spec().n(), x.spec().k());
    ensure_shape(z1, n, k, "Z₁")?;
    ensure_shape(z2, n, k, "Z₂")?;
    match kind {
        MetricKind::Euclidean => Ok(z1.dot(z2)),
        MetricKind::Tractable(_) => {
            let m = mx_matrix(x, kind)?;
            Ok(z1.dot(&(m * z2)))
        }
        MetricKind::GeneralizedCanonical { rho, choice } => {
            let spec = x.spec();
            let ax = spec.a() * x.x();
            let w1 = ax.transpose() * z1;
            let w2 = if std::ptr::eq(z1, z2) { w1.clone() } else { ax.transpose() * z2 };
            let head = w1.dot(&w2) / *rho;
            let tail = match choice {
                Gamma3Choice::A => {
                    let b1 = spec.a() * (z1 - x.x() * (spec.j() * &w1));
                    let b2 = spec.a() * (z2 - x.x() * (spec.j() * &w2));
                    b1.dot(&b2)
                }
                Gamma3Choice::B => {
                    let ch = cholesky(x.x().transpose() * x.x())?;
                    let p1 = x.x().transpose() * z1;
                    let p2 = if std::ptr::eq(z1, z2) { p1.clone() } else { x.x().transpose() * z2 };
                    z1.dot(z2) - p1.dot(&ch.solve(&p2))
                }
            };
            Ok(head + tail)
        }
    }
}

/// Metric inner product of two tangent vectors at the same base point.
pub fn inner(z1: &TangentVector, z2: &TangentVector, kind: &MetricKind) -> Result<f64> {
    if !z1.base().same_point(z2.base()) {
        return Err(Error::Shape("tangent vectors have different base points".into()));
    }
    inner_ambient(z1.base(), z1.z(), z2.z(), kind)
}

/// Component form ρ⁻¹tr(W₁ᵀW₂) + tr(K₁ᵀΓ₃⁻¹K₂) of the generalized canonical
/// metric, using the E-decomposition with the given complement basis.
pub fn inner_components(
    x: &Point,
    xperp: &Mat,
    z1: &Mat,
    z2: &Mat,
    rho: f64,
    choice: Gamma3Choice,
) -> Result<f64> {
    let d1 = crate::manifold::e_inverse_apply(x, xperp, z1)?;
    let d2 = crate::manifold::e_inverse_apply(x, xperp, z2)?;
    let g3_inv = inv_small(&gamma3(x, xperp, choice)?, "Γ₃")?;
    Ok(d1.w.dot(&d2.w) / rho + d1.k.dot(&(g3_inv * &d2.k)))
}

/// Tangent projection under the generalized canonical metric:
/// P_X(Y) = Y − XJ·sym(XᵀAY). Independent of ρ and Γ₃.
pub fn project_tangent_gcan(x: &Point, y: &Mat) -> Result<TangentVector> {
    let normal = project_normal_gcan(x, y)?;
    Ok(TangentVector::new_unchecked(x, y - normal))
}

/// Normal projection P⊥_X(Y) = XJ·sym(XᵀAY).
pub fn project_normal_gcan(x: &Point, y: &Mat) -> Result<Mat> {
    ensure_shape(y, x.spec().n(), x.spec().k(), "Y")?;
    Ok(x.x() * (x.spec().j() * sym_sq(&x.xta(y))))
}

/// M_X⁻¹ applied to n×k blocks.
enum MxInverse {
    Identity,
    Factored(Cholesky<f64, nalgebra::Dyn>),
}

impl MxInverse {
    fn for_metric(x: &Point, kind: &MetricKind) -> Result<Self> {
        match kind {
            MetricKind::Euclidean => Ok(MxInverse::Identity),
            MetricKind::Tractable(_) => Ok(MxInverse::Factored(cholesky(mx_matrix(x, kind)?)?)),
            MetricKind::GeneralizedCanonical { .. } => Err(Error::Config(
                "the Lyapunov path takes Euclidean or Tractable metrics".into(),
            )),
        }
    }

    fn apply(&self, b: &Mat) -> Mat {
        match self {
            MxInverse::Identity => b.clone(),
            MxInverse::Factored(ch) => ch.solve(b),
        }
    }
}

/// Tangent projection for a tractable metric:
/// P_X(Y) = Y − M_X⁻¹AX·U with U solving C·U + U·C = 2·sym(XᵀAY),
/// C = XᵀA·M_X⁻¹·AX.
pub fn project_tangent_tractable(x: &Point, y: &Mat, kind: &MetricKind) -> Result<TangentVector> {
    ensure_shape(y, x.spec().n(), x.spec().k(), "Y")?;
    let minv = MxInverse::for_metric(x, kind)?;
    let ax = x.spec().a() * x.x();
    let minv_ax = minv.apply(&ax);
    let c = sym_sq(&(ax.transpose() * &minv_ax));
    let rhs = sym_sq(&(x.xta(y))) * 2.0;
    let u = lyap_spd(&c, &rhs)?;
    Ok(TangentVector::new_unchecked(x, y - minv_ax * u))
}

/// Riemannian gradient from the Euclidean gradient ∇f̄(X).
///
/// Generalized canonical metrics use the closed forms
///
/// * A: ρ·XJ·skew(JXᵀG) + A⁻¹(I − X(XᵀX)⁻¹Xᵀ)A⁻¹G
/// * B: ρ·XJ·skew(JXᵀG) + (I − XJXᵀA)(I − XJXᵀA)ᵀG
///
/// and never call the Lyapunov solver. Euclidean and tractable metrics use
/// M_X⁻¹G − M_X⁻¹AX·U with one Lyapunov solve for U.
pub fn riemannian_gradient(x: &Point, egrad: &Mat, kind: &MetricKind) -> Result<GradientReport> {
    let spec = x.spec();
    ensure_shape(egrad, spec.n(), spec.k(), "Euclidean gradient")?;
    let xm = x.x();
    let j = spec.j();
    match kind {
        MetricKind::GeneralizedCanonical { rho, choice } => {
            let xtg = xm.transpose() * egrad;
            let head = xm * (j * skew_sq(&(j * &xtg))) * *rho;
            let (tail, products) = match choice {
                Gamma3Choice::B => {
                    // (I − AXJXᵀ)G, then (I − XJXᵀA) of that
                    let ax = spec.a() * xm;
                    let t = egrad - &ax * (j * &xtg);
                    let t = &t - xm * (j * (ax.transpose() * &t));
                    (t, 6)
                }
                Gamma3Choice::A => {
                    let xtx_inv = inv_small(&(xm.transpose() * xm), "XᵀX")?;
                    let s = spec.solve_a(egrad);
                    let s = &s - xm * (xtx_inv * (xm.transpose() * &s));
                    (spec.solve_a(&s), 6)
                }
            };
            Ok(GradientReport {
                gradient: TangentVector::new_unchecked(x, head + tail),
                lyapunov_solves: 0,
                flops_proxy: products + 2,
            })
        }
        MetricKind::Euclidean | MetricKind::Tractable(_) => {
            let minv = MxInverse::for_metric(x, kind)?;
            let ax = spec.a() * xm;
            let minv_ax = minv.apply(&ax);
            let minv_g = minv.apply(egrad);
            let c = sym_sq(&(ax.transpose() * &minv_ax));
            let rhs = sym_sq(&(ax.transpose() * &minv_g)) * 2.0;
            let u = lyap_spd(&c, &rhs)?;
            Ok(GradientReport {
                gradient: TangentVector::new_unchecked(x, minv_g - minv_ax * u),
                lyapunov_solves: 1,
                flops_proxy: 6,
            })
        }
    }
}

/// Gradient ρ·XJ·skew(JXᵀG) + A⁻¹X⊥Γ₃X⊥ᵀA⁻¹G for an explicit complement basis.
pub fn riemannian_gradient_with_complement(
    x: &Point,
    xperp: &Mat,
    egrad: &Mat,
    rho: f64,
    choice: Gamma3Choice,
) -> Result<Mat> {
    let spec = x.spec();
    let j = spec.j();
    let xm = x.x();
    let head = xm * (j * skew_sq(&(j * (xm.transpose() * egrad)))) * rho;
    if xperp.ncols() == 0 {
        return Ok(head);
    }
    let g3 = gamma3(x, xperp, choice)?;
    let ainv_xp = spec.solve_a(xperp);
    Ok(head + &ainv_xp * (g3 * (ainv_xp.transpose() * egrad)))
}

/// ‖ξ‖_X = sqrt(g(ξ, ξ)).
pub fn metric_norm(x: &Point, xi: &Mat, kind: &MetricKind) -> Result<f64> {
    Ok(inner_ambient(x, xi, xi, kind)?.max(0.0).sqrt())
}
