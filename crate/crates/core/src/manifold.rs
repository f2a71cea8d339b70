//! The indefinite Stiefel manifold iSt_{A,J}(k, n) = {X ∈ ℝⁿˣᵏ : XᵀAX = J}.
//!
//! [`ManifoldSpec`] holds a validated pair (A, J) together with a cached LU
//! factorization of A. [`Point`] and [`TangentVector`] share the ManifoldSpec through
//! an `Arc`, so they are cheap to clone and safe to send across threads.

use std::sync::Arc;

use nalgebra::{Dyn, LU};

use crate::error::{Error, Result};
use crate::linalg::{ensure_finite, ensure_shape, ensure_square, inertia, sym_sq, Inertia, Mat};
use crate::rng::MatRng;

/// Relative tolerance used for the structural checks on A and J.
const STRUCT_RTOL: f64 = 1e-10;

/// Relative tolerance of the tangency predicate.
pub const TANGENT_RTOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct ManifoldSpec {
    a: Mat,
    j: Mat,
    a_lu: LU<f64, Dyn, Dyn>,
    inertia_a: Inertia,
    inertia_j: Inertia,
}

/// Validates (A, J) and builds the manifold description.
///
/// Rejects asymmetric or singular A, asymmetric or non-involutory J, and
/// pairs violating i₊(J) ≤ i₊(A), i₋(J) ≤ i₋(A), each with its own error.
pub fn make_spec(a: Mat, j: Mat) -> Result<ManifoldSpec> {
    ensure_square(&a, "A")?;
    ensure_square(&j, "J")?;
    ensure_finite(&a, "A")?;
    ensure_finite(&j, "J")?;
    let (n, k) = (a.nrows(), j.nrows());
    if k > n {
        return Err(Error::Shape(format!("J is {k}×{k} but A is only {n}×{n}")));
    }
    let asym_a = (&a - a.transpose()).norm();
    if asym_a > STRUCT_RTOL * a.norm().max(1.0) {
        return Err(Error::Asymmetric { residual: asym_a });
    }
    let asym_j = (&j - j.transpose()).norm();
    if asym_j > STRUCT_RTOL * j.norm().max(1.0) {
        return Err(Error::Asymmetric { residual: asym_j });
    }
    let inv_res = (&j * &j - Mat::identity(k, k)).norm();
    if inv_res > STRUCT_RTOL * (k as f64).max(1.0) {
        return Err(Error::NotInvolutory { residual: inv_res });
    }
    let a = sym_sq(&a);
    let j = sym_sq(&j);
    let inertia_a = inertia(&a)?;
    if inertia_a.n_zero > 0 {
        let eigs = nalgebra::SymmetricEigen::new(a.clone()).eigenvalues;
        let min_abs = eigs.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
        return Err(Error::Singular { min_abs_eig: min_abs });
    }
    let inertia_j = inertia(&j)?;
    if inertia_j.n_pos > inertia_a.n_pos || inertia_j.n_neg > inertia_a.n_neg {
        return Err(Error::InertiaViolation {
            a_pos: inertia_a.n_pos,
            a_neg: inertia_a.n_neg,
            j_pos: inertia_j.n_pos,
            j_neg: inertia_j.n_neg,
        });
    }
    let a_lu = a.clone().lu();
    Ok(ManifoldSpec { a, j, a_lu, inertia_a, inertia_j })
}

impl ManifoldSpec {
    pub fn a(&self) -> &Mat {
        &self.a
    }

    pub fn j(&self) -> &Mat {
        &self.j
    }

    pub fn n(&self) -> usize {
        self.a.nrows()
    }

    pub fn k(&self) -> usize {
        self.j.nrows()
    }

    pub fn inertia_a(&self) -> Inertia {
        self.inertia_a
    }

    pub fn inertia_j(&self) -> Inertia {
        self.inertia_j
    }

    /// A⁻¹·B through the cached factorization.
    pub fn solve_a(&self, b: &Mat) -> Mat {
        // A was verified nonsingular at construction.
        self.a_lu.solve(b).expect("A is nonsingular")
    }

    /// Default feasibility tolerance 1e−8·(1 + ‖A‖_F‖X‖_F²).
    pub fn feas_tol(&self, x: &Mat) -> f64 {
        1e-8 * (1.0 + self.a.norm() * x.norm_squared())
    }

    /// Dimension nk − k(k+1)/2.
    pub fn dim(&self) -> usize {
        let (n, k) = (self.n(), self.k());
        n * k - k * (k + 1) / 2
    }
}

/// ‖XᵀAX − J‖_F.
pub fn feasibility_residual(spec: &ManifoldSpec, x: &Mat) -> Result<f64> {
    ensure_shape(x, spec.n(), spec.k(), "X")?;
    Ok(feas_unchecked(spec, x))
}

pub(crate) fn feas_unchecked(spec: &ManifoldSpec, x: &Mat) -> f64 {
    (x.transpose() * (spec.a() * x) - spec.j()).norm()
}

/// A point X on the manifold.
#[derive(Debug, Clone)]
pub struct Point {
    spec: Arc<ManifoldSpec>,
    x: Mat,
}

impl Point {
    /// Validates shape, finiteness and feasibility against the default tolerance.
    pub fn new(spec: Arc<ManifoldSpec>, x: Mat) -> Result<Self> {
        let tol = spec.feas_tol(&x);
        Self::with_tol(spec, x, tol)
    }

    pub fn with_tol(spec: Arc<ManifoldSpec>, x: Mat, tol: f64) -> Result<Self> {
        ensure_shape(&x, spec.n(), spec.k(), "X")?;
        ensure_finite(&x, "X")?;
        let residual = feas_unchecked(&spec, &x);
        if !(residual <= tol) {
            return Err(Error::Infeasible { residual, tol });
        }
        Ok(Self { spec, x })
    }

    /// Skips validation. For iterates produced by a retraction.
    pub fn new_unchecked(spec: Arc<ManifoldSpec>, x: Mat) -> Self {
        Self { spec, x }
    }

    pub fn x(&self) -> &Mat {
        &self.x
    }

    pub fn spec(&self) -> &ManifoldSpec {
        &self.spec
    }

    pub fn spec_arc(&self) -> &Arc<ManifoldSpec> {
        &self.spec
    }

    pub fn feasibility(&self) -> f64 {
        feas_unchecked(&self.spec, &self.x)
    }

    pub fn into_inner(self) -> Mat {
        self.x
    }

    /// XᵀA·Y, the k×k matrix that drives every projection.
    pub(crate) fn xta(&self, y: &Mat) -> Mat {
        self.x.transpose() * (self.spec.a() * y)
    }

    pub(crate) fn same_point(&self, other: &Point) -> bool {
        Arc::ptr_eq(&self.spec, &other.spec) && self.x == other.x
    }
}

/// A tangent vector Z at a base point X, i.e. ZᵀAX + XᵀAZ = 0.
#[derive(Debug, Clone)]
pub struct TangentVector {
    base: Point,
    z: Mat,
}

impl TangentVector {
    pub fn new(base: &Point, z: Mat) -> Result<Self> {
        ensure_shape(&z, base.spec().n(), base.spec().k(), "Z")?;
        ensure_finite(&z, "Z")?;
        let (ok, residual) = is_tangent(base, &z);
        if !ok {
            return Err(Error::NotTangent { residual });
        }
        Ok(Self { base: base.clone(), z })
    }

    pub fn new_unchecked(base: &Point, z: Mat) -> Self {
        Self { base: base.clone(), z }
    }

    pub fn base(&self) -> &Point {
        &self.base
    }

    pub fn z(&self) -> &Mat {
        &self.z
    }

    pub fn into_inner(self) -> Mat {
        self.z
    }
}

/// Tangency predicate ‖sym(XᵀAZ)‖_F ≤ tol·(1 + ‖XᵀAZ‖_F + ‖A‖_F‖X‖_F‖Z‖_F).
/// Returns the residual alongside the verdict.
pub fn is_tangent(x: &Point, z: &Mat) -> (bool, f64) {
    if z.shape() != x.x().shape() {
        return (false, f64::INFINITY);
    }
    let m = x.xta(z);
    let residual = sym_sq(&m).norm();
    let scale = 1.0 + m.norm() + x.spec().a().norm() * x.x().norm() * z.norm();
    (residual <= TANGENT_RTOL * scale, residual)
}

/// Coordinates of Y in the basis E = [X  A⁻¹X⊥].
#[derive(Debug, Clone)]
pub struct EDecomposition {
    pub w: Mat,
    pub k: Mat,
    pub xperp: Mat,
    ainv_xperp: Mat,
}

impl EDecomposition {
    /// X·W + A⁻¹X⊥·K.
    pub fn reconstruct(&self, x: &Point) -> Mat {
        x.x() * &self.w + &self.ainv_xperp * &self.k
    }

    pub fn ainv_xperp(&self) -> &Mat {
        &self.ainv_xperp
    }
}

/// Applies E⁻¹ to Y: W = J·XᵀA·Y and K = (X⊥ᵀA⁻¹X⊥)⁻¹·X⊥ᵀ·Y.
pub fn e_inverse_apply(x: &Point, xperp: &Mat, y: &Mat) -> Result<EDecomposition> {
    let spec = x.spec();
    let (n, k) = (spec.n(), spec.k());
    ensure_shape(xperp, n, n - k, "X⊥")?;
    ensure_shape(y, n, k, "Y")?;
    let w = spec.j() * x.xta(y);
    let ainv_xperp = spec.solve_a(xperp);
    let gram = xperp.transpose() * &ainv_xperp;
    let kk = if n == k {
        Mat::zeros(0, k)
    } else {
        gram.lu()
            .solve(&(xperp.transpose() * y))
            .ok_or_else(|| Error::RankDeficient("X⊥ᵀA⁻¹X⊥ is singular".into()))?
    };
    Ok(EDecomposition { w, k: kk, xperp: xperp.clone(), ainv_xperp })
}

/// Draws Z = X·J·S + A⁻¹X⊥·K with S skew and K free, each of unit Frobenius norm.
pub fn random_tangent(x: &Point, seed: u64) -> Result<TangentVector> {
    let mut rng = MatRng::new(seed);
    random_tangent_with(x, &mut rng)
}

pub fn random_tangent_with(x: &Point, rng: &mut MatRng) -> Result<TangentVector> {
    let spec = x.spec();
    let (n, k) = (spec.n(), spec.k());
    let xperp = crate::linalg::nullspace_basis(x.x())?;
    let mut s = rng.skew(k);
    let sn = s.norm();
    if sn > 0.0 {
        s /= sn;
    }
    let mut kk = rng.normal(n - k, k);
    let kn = kk.norm();
    if kn > 0.0 {
        kk /= kn;
    }
    Ok(tangent_from_parts(x, &xperp, &s, &kk))
}

/// Z = X·J·S + A⁻¹X⊥·K; tangent whenever S is skew.
pub fn tangent_from_parts(x: &Point, xperp: &Mat, s: &Mat, kk: &Mat) -> TangentVector {
    let spec = x.spec();
    let mut z = x.x() * (spec.j() * s);
    if kk.nrows() > 0 {
        z += spec.solve_a(xperp) * kk;
    }
    TangentVector::new_unchecked(x, z)
}
