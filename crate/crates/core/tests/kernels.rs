mod common;

use common::{expm_series, kron_lyap, rel};
use istiefel::linalg::{block_diag, expm, inertia, lyap_spd, nullspace_basis, orthonormalize, skew, sym, Mat};
use istiefel::rng::MatRng;
use istiefel::Error;
use proptest::prelude::*;

fn spd(rng: &mut MatRng, k: usize) -> Mat {
    let g = rng.normal(k, k);
    &g * g.transpose() + Mat::identity(k, k) * 0.5
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sym_skew_split(seed in any::<u64>(), k in 1usize..9) {
        let m = MatRng::new(seed).normal(k, k);
        let s = sym(&m).unwrap();
        let w = skew(&m).unwrap();
        prop_assert!(((&s + &w) - &m).norm() <= 1e-15 * (1.0 + m.norm()));
        prop_assert!((sym(&s).unwrap() - &s).norm() == 0.0);
        prop_assert!(sym(&w).unwrap().norm() <= 1e-16 * (1.0 + m.norm()));
        prop_assert!((s.transpose() - &s).norm() == 0.0);
        prop_assert!((w.transpose() + &w).norm() == 0.0);
    }

    #[test]
    fn lyap_residual_small(seed in any::<u64>(), k in 1usize..9) {
        let mut rng = MatRng::new(seed);
        let c = spd(&mut rng, k);
        let r = rng.symmetric(k);
        let u = lyap_spd(&c, &r).unwrap();
        let resid = (&c * &u + &u * &c - &r).norm();
        prop_assert!(resid <= 1e-10 * (1.0 + c.norm() * u.norm() + r.norm()));
        prop_assert!((u.transpose() - &u).norm() <= 1e-12 * (1.0 + u.norm()));
    }

    #[test]
    fn expm_of_skew_is_orthogonal(seed in any::<u64>(), k in 1usize..9) {
        let s = MatRng::new(seed).skew(k) * 3.0;
        let e = expm(&s).unwrap();
        prop_assert!((e.transpose() * &e - Mat::identity(k, k)).norm() <= 1e-12);
    }

    #[test]
    fn nullspace_is_orthonormal_complement(seed in any::<u64>(), n in 3usize..20, kk in 1usize..6) {
        let k = kk.min(n - 1);
        let x = MatRng::new(seed).normal(n, k);
        let xp = nullspace_basis(&x).unwrap();
        prop_assert_eq!(xp.shape(), (n, n - k));
        prop_assert!((x.transpose() * &xp).norm() <= 1e-12 * x.norm());
        prop_assert!((xp.transpose() * &xp - Mat::identity(n - k, n - k)).norm() <= 1e-12);
    }
}

#[test]
fn lyap_matches_kronecker_oracle() {
    let mut rng = MatRng::new(4);
    for k in 1..=8 {
        let c = spd(&mut rng, k);
        let r = rng.symmetric(k);
        let u = lyap_spd(&c, &r).unwrap();
        assert!((&u - kron_lyap(&c, &r)).norm() <= 1e-10 * (1.0 + u.norm()), "k={k}");
    }
}

#[test]
fn lyap_error_cases() {
    let c = Mat::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 1.0]);
    assert!(matches!(lyap_spd(&c, &Mat::identity(2, 2)), Err(Error::Asymmetric { .. })));
    assert!(lyap_spd(&Mat::identity(2, 2), &Mat::identity(3, 3)).is_err());
}

#[test]
fn expm_matches_series_oracle() {
    let mut rng = MatRng::new(5);
    for k in [1, 2, 4, 6, 10] {
        for scale in [1e-3, 0.3, 2.0, 8.0] {
            let m = rng.normal(k, k) * scale;
            let e = expm(&m).unwrap();
            assert!(rel(&e, &expm_series(&m)) <= 1e-12, "k={k} scale={scale}");
        }
    }
}

#[test]
fn expm_inverse_and_nilpotent() {
    let m = MatRng::new(6).normal(5, 5);
    let prod = expm(&m).unwrap() * expm(&(-&m)).unwrap();
    assert!((prod - Mat::identity(5, 5)).norm() <= 1e-12);
    let n = Mat::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
    assert_eq!(expm(&n).unwrap(), Mat::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0]));
}

#[test]
fn inertia_congruence_invariance() {
    let mut rng = MatRng::new(7);
    for trial in 0..50 {
        let n = 3 + trial % 8;
        let p = trial % (n + 1);
        let d: Vec<f64> = (0..n).map(|i| if i < p { rng.uniform(0.5, 3.0) } else { -rng.uniform(0.5, 3.0) }).collect();
        let s = Mat::from_diagonal(&nalgebra::DVector::from_vec(d));
        let t = rng.well_conditioned(n);
        let congruent = t.transpose() * &s * &t;
        let congruent = (&congruent + congruent.transpose()) * 0.5;
        let a = inertia(&s).unwrap();
        let b = inertia(&congruent).unwrap();
        assert_eq!(a, b);
        assert_eq!((b.n_pos, b.n_neg, b.n_zero), (p, n - p, 0));
    }
}

#[test]
fn inertia_counts_zeros_and_rejects_asymmetry() {
    let s = block_diag(&Mat::identity(2, 2), &Mat::zeros(2, 2));
    let i = inertia(&s).unwrap();
    assert_eq!((i.n_pos, i.n_neg, i.n_zero), (2, 0, 2));
    let bad = Mat::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0]);
    assert!(matches!(inertia(&bad), Err(Error::Asymmetric { .. })));
}

#[test]
fn orthonormalize_has_positive_r_diagonal() {
    let m = MatRng::new(8).normal(9, 4);
    let q = orthonormalize(&m);
    assert!((q.transpose() * &q - Mat::identity(4, 4)).norm() <= 1e-13);
    let r = q.transpose() * &m;
    for i in 0..4 {
        assert!(r[(i, i)] > 0.0);
        for jdx in 0..i {
            assert!(r[(i, jdx)].abs() <= 1e-12);
        }
    }
}
