use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use qi_core::bounds::{chernoff_bound, q_s};
use qi_core::symplectic::{
    beamsplitter, log_negativity, partial_transpose, phase_rotation, squeezer,
    symplectic_eigenvalues, symplectic_form, williamson_decompose,
};
use qi_core::{Bipartition, CovarianceMatrix, GaussianState};

/// Random symplectic from a fixed gate pattern with drawn parameters.
fn random_symplectic(n: usize, params: &[f64]) -> DMatrix<f64> {
    let mut s = DMatrix::identity(2 * n, 2 * n);
    let mut it = params.iter().cycle();
    for layer in 0..2 {
        for m in 0..n {
            s = phase_rotation(n, m, *it.next().unwrap() * 3.0) * s;
            s = squeezer(n, m, *it.next().unwrap() * 0.6) * s;
        }
        for m in 0..n.saturating_sub(1) {
            let b = (m + 1 + layer) % n;
            if b != m {
                s = beamsplitter(n, m, b, *it.next().unwrap() * 1.5) * s;
            }
        }
    }
    s
}

fn covariance(n: usize, nu: &[f64], params: &[f64]) -> CovarianceMatrix {
    let s = random_symplectic(n, params);
    let mut d = DVector::zeros(2 * n);
    for j in 0..n {
        d[2 * j] = nu[j];
        d[2 * j + 1] = nu[j];
    }
    let m = &s * DMatrix::from_diagonal(&d) * s.transpose();
    CovarianceMatrix::symmetrized(m).unwrap()
}

fn state_strategy() -> impl Strategy<Value = (usize, Vec<f64>, Vec<f64>)> {
    (1usize..=3).prop_flat_map(|n| {
        (
            Just(n),
            prop::collection::vec(1.0f64..4.0, n),
            prop::collection::vec(-1.0f64..1.0, 12),
        )
    })
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| b.partial_cmp(a).unwrap());
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn spectrum_is_congruence_invariant((n, nu, p) in state_strategy(), q in prop::collection::vec(-1.0f64..1.0, 12)) {
        let cov = covariance(n, &nu, &p);
        let moved = cov.congruence(&random_symplectic(n, &q)).unwrap();
        let a = symplectic_eigenvalues(&cov).unwrap();
        let b = symplectic_eigenvalues(&moved).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-8 * x.max(1.0));
        }
        for (x, y) in a.iter().zip(sorted(nu.clone()).iter()) {
            prop_assert!((x - y).abs() < 1e-8 * x.max(1.0));
        }
    }

    #[test]
    fn williamson_reconstructs((n, nu, p) in state_strategy()) {
        let cov = covariance(n, &nu, &p);
        let w = williamson_decompose(&cov).unwrap();
        let scale = cov.entries().amax();
        prop_assert!(w.reconstruction_residual(&cov) < 1e-9 * scale.max(1.0));
        prop_assert!(w.symplectic_residual() < 1e-9 * scale.max(1.0));
        let det: f64 = w.nu.iter().map(|v| v * v).product();
        prop_assert!((cov.determinant() - det).abs() < 1e-8 * det);
    }

    #[test]
    fn partial_transpose_is_an_involution((n, nu, p) in state_strategy().prop_filter("two modes at least", |s| s.0 >= 2)) {
        let cov = covariance(n, &nu, &p);
        let part = Bipartition::new([0], n).unwrap();
        let back = partial_transpose(&partial_transpose(&cov, &part).unwrap(), &part).unwrap();
        prop_assert_eq!(back, cov.clone());
        prop_assert!(log_negativity(&cov, &part).unwrap() >= 0.0);
    }

    #[test]
    fn overlap_symmetry_and_invariance(
        (n, nu, p) in state_strategy(),
        nu2 in prop::collection::vec(1.0f64..4.0, 3),
        p2 in prop::collection::vec(-1.0f64..1.0, 12),
        q in prop::collection::vec(-1.0f64..1.0, 12),
        s in 0.05f64..0.95,
    ) {
        let a = GaussianState::zero_mean(covariance(n, &nu, &p));
        let b = GaussianState::zero_mean(covariance(n, &nu2[..n], &p2));
        let ab = q_s(&a, &b, s).unwrap().q;
        let ba = q_s(&b, &a, 1.0 - s).unwrap().q;
        prop_assert!((ab - ba).abs() < 1e-9);
        prop_assert!(ab > 0.0 && ab <= 1.0 + 1e-9);

        let t = random_symplectic(n, &q);
        let at = GaussianState::zero_mean(a.cov().congruence(&t).unwrap());
        let bt = GaussianState::zero_mean(b.cov().congruence(&t).unwrap());
        let moved = q_s(&at, &bt, s).unwrap().q;
        prop_assert!((moved - ab).abs() < 1e-8);
    }

    #[test]
    fn chernoff_bound_falls_with_copies(nu in 1.0f64..3.0, nu2 in 1.0f64..3.0, m in 1u64..50) {
        let a = GaussianState::zero_mean(CovarianceMatrix::thermal((nu - 1.0) / 2.0).unwrap());
        let b = GaussianState::zero_mean(CovarianceMatrix::thermal((nu2 - 1.0) / 2.0).unwrap());
        let one = chernoff_bound(&a, &b, m).unwrap().value;
        let more = chernoff_bound(&a, &b, m + 1).unwrap().value;
        prop_assert!(more <= one + 1e-15);
    }
}

#[test]
fn symplectic_form_basics() {
    let om = symplectic_form(3);
    assert_eq!(&om * om.transpose(), DMatrix::identity(6, 6));
    assert_eq!(&om * &om, -DMatrix::<f64>::identity(6, 6));
    assert_eq!(om.transpose(), -om.clone());
    assert_eq!(
        symplectic_form(1),
        DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0])
    );
}
