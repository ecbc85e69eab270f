use qi_core::fock::{trace_power_product, TwoModeOracle};
use qi_core::{bhattacharyya_bound, chernoff_bound, q_s, IlluminationModel, IlluminationScenario};

fn gaussian_pair(
    n_s: f64,
    n_b: f64,
    kappa: f64,
) -> (qi_core::GaussianState, qi_core::GaussianState) {
    let scn = IlluminationScenario::two_mode(n_s, n_b, kappa, 1).unwrap();
    IlluminationModel::TwoMode.states(&scn).unwrap()
}

#[test]
fn oracle_matches_gaussian_overlap() {
    let oracle = TwoModeOracle::new(0.1, 0.3, 0.1, 30).unwrap();
    let (a, b) = gaussian_pair(0.1, 0.3, 0.1);
    for s in [0.25, 0.5, 0.75] {
        let g = q_s(&a, &b, s).unwrap().q;
        let f = oracle.q_s(s).unwrap();
        assert!((g - f).abs() / g < 1e-5, "{s}: {g} vs {f}");
    }
    let swapped = trace_power_product(&oracle.sigma, &oracle.rho, 0.7).unwrap();
    assert!((oracle.q_s(0.3).unwrap() - swapped).abs() < 1e-10);
}

#[test]
fn gap_shrinks_with_cutoff() {
    let (n_s, n_b, kappa) = (0.3, 0.6, 0.2);
    let (a, b) = gaussian_pair(n_s, n_b, kappa);
    let g = q_s(&a, &b, 0.5).unwrap().q;
    let gaps: Vec<f64> = [4, 6, 8, 10]
        .into_iter()
        .map(|c| {
            let o = TwoModeOracle::with_budget(n_s, n_b, kappa, c, 1.0).unwrap();
            (o.q_s(0.5).unwrap() - g).abs()
        })
        .collect();
    assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
}

#[test]
fn bound_chain_on_oracle_scenarios() {
    for (n_s, n_b, kappa) in [(0.1, 0.3, 0.1), (0.05, 0.5, 0.3), (0.2, 0.1, 0.5)] {
        let oracle = TwoModeOracle::new(n_s, n_b, kappa, 22).unwrap();
        let slack = 10.0 * oracle.tail_bound();
        let (a, b) = gaussian_pair(n_s, n_b, kappa);
        let helstrom = oracle.helstrom().unwrap();
        let qc = chernoff_bound(&a, &b, 1).unwrap().value;
        let qb = bhattacharyya_bound(&a, &b, 1).unwrap().value;
        assert!(helstrom <= qc + slack, "{helstrom} {qc}");
        assert!(qc <= qb + slack, "{qc} {qb}");
    }
}
