//! Values frozen from an independent 50-digit evaluation, and the headline
//! claims of the three-mode illumination analysis.

#![allow(clippy::excessive_precision)]

use qi_core::bounds::{g_p, gamma2, gamma3};
use qi_core::states::{cc3, solve_cq3};
use qi_core::{
    bhattacharyya_bound, coherent_qb, find_crossover, q_s, CovarianceMatrix, GaussianState,
    IlluminationModel, IlluminationScenario,
};

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn qb_exponent(model: IlluminationModel, n_s: f64, n_b: f64, kappa: f64) -> f64 {
    let scn =
        IlluminationScenario::new(n_s, n_b, kappa, 1, model.default_correlation(n_s)).unwrap();
    let (a, b) = model.states(&scn).unwrap();
    -q_s(&a, &b, 0.5).unwrap().ln_q
}

#[test]
fn exponent_closed_forms() {
    assert!(rel(gamma2(0.01), 0.008271925124533579) < 1e-14);
    assert!(rel(gamma3(0.01), 0.008756550553521644) < 1e-14);
    assert!(rel(gamma2(1.0), 0.34314575050761975) < 1e-14);
    assert!(rel(solve_cq3(0.01), 0.14141212010042825) < 1e-14);
    assert!(rel(solve_cq3(0.2), 0.623489186487985) < 1e-13);
}

#[test]
fn crossover_location() {
    let n = find_crossover().unwrap();
    assert!((n - 0.2953549585).abs() < 1e-9, "{n}");
    assert!((gamma3(n) - gamma2(n)).abs() < 1e-10);
}

#[test]
fn three_mode_bhattacharyya_exponents() {
    for (n_b, expected) in [
        (1e2, 8.6762173162498963121e-7),
        (1e3, 8.7484488998926450452e-8),
        (1e4, 8.7557396984054241993e-9),
    ] {
        let got = qb_exponent(IlluminationModel::ThreeMode, 0.01, n_b, 0.01);
        assert!(rel(got, expected) < 1e-6, "{n_b}: {got} vs {expected}");
    }
}

#[test]
fn two_mode_bhattacharyya_exponents() {
    for (n_b, expected) in [
        (1e2, 8.1975367319291234544e-7),
        (1e3, 8.2644240968720814954e-8),
        (1e4, 8.2711743940900619879e-9),
    ] {
        let got = qb_exponent(IlluminationModel::TwoMode, 0.01, n_b, 0.01);
        assert!(rel(got, expected) < 1e-6, "{n_b}: {got} vs {expected}");
    }
}

#[test]
fn two_mode_overlap_at_oracle_point() {
    let scn = IlluminationScenario::two_mode(0.1, 0.3, 0.1, 1).unwrap();
    let (a, b) = IlluminationModel::TwoMode.states(&scn).unwrap();
    for (s, expected) in [
        (0.25, 0.99526354930435553),
        (0.5, 0.99405945156253924),
        (0.75, 0.99521465501864381),
    ] {
        assert!(rel(q_s(&a, &b, s).unwrap().q, expected) < 1e-13);
    }
}

#[test]
fn thermal_pair_overlap() {
    let a = GaussianState::zero_mean(CovarianceMatrix::thermal(1.0).unwrap());
    let b = GaussianState::zero_mean(CovarianceMatrix::thermal(2.0).unwrap());
    assert!(rel(q_s(&a, &b, 0.5).unwrap().q, 0.9659258262890682867) < 1e-14);
    assert!(rel(g_p(3.0, 0.5).unwrap(), 1.0 / (2f64.sqrt() - 1.0)) < 1e-14);
}

#[test]
fn three_mode_minimum_is_off_centre() {
    let scn = IlluminationScenario::three_mode(0.1, 20.0, 0.01, 1).unwrap();
    let (a, b) = IlluminationModel::ThreeMode.states(&scn).unwrap();
    let at = |s: f64| -q_s(&a, &b, s).unwrap().ln_q;
    assert!(rel(at(0.5), 3.191997276264e-5) < 1e-8);
    assert!(rel(at(0.45), 3.165236e-5) < 1e-6);
    assert!(rel(at(0.55), 3.165312e-5) < 1e-6);
}

#[test]
fn factor_four_gap() {
    let scn = IlluminationScenario::two_mode(0.01, 1e4, 0.01, 1).unwrap();
    let (a, b) = IlluminationModel::TwoMode.states(&scn).unwrap();
    let two = -bhattacharyya_bound(&a, &b, 1).unwrap().ln_q;
    let coherent = -coherent_qb(0.01, 1e4, 0.01, 1).unwrap().ln_q;
    let ratio = two / coherent;
    assert!((3.2..=4.0).contains(&ratio), "{ratio}");
    assert!((ratio - 3.309).abs() < 1e-3, "{ratio}");
}

#[test]
fn separability_threshold_below_maximum() {
    for n in [0.1, 0.5, 1.0, 5.0] {
        assert!(cc3(n) < solve_cq3(n));
    }
}
