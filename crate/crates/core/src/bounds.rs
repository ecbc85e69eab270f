//! Gaussian Chernoff and Bhattacharyya bounds and the illumination error
//! exponents.
//!
//! For two `n`-mode Gaussian states with Williamson data `(S_a, α)` and
//! `(S_b, β)`, the overlap `Tr[ρ_a^s ρ_b^{1-s}]` is
//!
//! ```text
//! Q_s = 2^n Π G_s(α_k) G_{1-s}(β_k) / sqrt(det V) · exp(-½ dᵀ V⁻¹ d),
//! V   = S_a Λ_s(α) S_aᵀ + S_b Λ_{1-s}(β) S_bᵀ,
//! ```
//!
//! with `d` the difference of the mean vectors. The `½` in the displacement
//! term belongs to the `<x> = 2 Re α` convention used throughout the crate.
//! Everything is accumulated in log space so that overlaps within `1e-9` of
//! one still yield accurate exponents `-ln Q_s`.

use std::fmt;
use std::str::FromStr;

use nalgebra::{Cholesky, DVector};
use serde::Serialize;

use crate::error::{invalid, QiError, Result};
use crate::numeric::{bisect, scan_then_golden};
use crate::states::{
    cq2, rho_cov, sigma_cov, solve_cq3, two_mode_rho_cov, two_mode_sigma_cov, variance,
    IlluminationScenario,
};
use crate::symplectic::{
    williamson_decompose, CovarianceMatrix, GaussianState, WilliamsonDecomposition, PHYSICAL_TOL,
};

/// Endpoints used in place of `s = 0` and `s = 1` in the Chernoff search.
pub const S_ENDPOINT: f64 = 1e-6;
/// Coarse scan size of the Chernoff search.
pub const SCAN_POINTS: usize = 33;
/// Golden-section stopping width in `s`.
pub const S_TOL: f64 = 1e-10;
/// Default crossover search interval and resolution.
pub const CROSSOVER_BRACKET: (f64, f64) = (0.05, 1.0);
pub const CROSSOVER_TOL: f64 = 1e-13;

fn check_args(x: f64, p: f64) -> Result<f64> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(invalid(format!("power must lie in (0, 1], got {p}")));
    }
    if !(x >= 1.0 - PHYSICAL_TOL) || !x.is_finite() {
        return Err(QiError::Unphysical(x));
    }
    Ok(x.max(1.0))
}

/// `(Λ_p(x), ln G_p(x))`, evaluated through
/// `(x+1)^p - (x-1)^p = (x-1)^p · expm1(p ln((x+1)/(x-1)))`, which keeps
/// full relative accuracy for large `x` and small `p`.
fn thermal_terms(x: f64, p: f64) -> (f64, f64) {
    if x <= 1.0 {
        return (1.0, 0.0);
    }
    if p == 1.0 {
        return (x, 0.0);
    }
    let ln_lo = (x - 1.0).ln();
    let gap = (2.0 / (x - 1.0)).ln_1p();
    let t = p * gap;
    let (lambda, ln_e) = if t > 30.0 {
        (1.0 + 2.0 * (-t).exp(), t + (-(-t).exp()).ln_1p())
    } else {
        let e = t.exp_m1();
        (1.0 + 2.0 / e, e.ln())
    };
    let ln_g = p * (std::f64::consts::LN_2 - ln_lo) - ln_e;
    (lambda, ln_g)
}

/// `Λ_p(x) = [(x+1)^p + (x-1)^p] / [(x+1)^p - (x-1)^p]`.
pub fn lambda_p(x: f64, p: f64) -> Result<f64> {
    let x = check_args(x, p)?;
    Ok(thermal_terms(x, p).0)
}

/// `G_p(x) = 2^p / [(x+1)^p - (x-1)^p]`.
pub fn g_p(x: f64, p: f64) -> Result<f64> {
    let x = check_args(x, p)?;
    Ok(thermal_terms(x, p).1.exp())
}

/// Natural log of [`g_p`].
pub fn ln_g_p(x: f64, p: f64) -> Result<f64> {
    let x = check_args(x, p)?;
    Ok(thermal_terms(x, p).1)
}

/// One evaluation of the overlap `Q_s` with its factor breakdown.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QsEvaluation {
    pub s: f64,
    pub q: f64,
    pub ln_q: f64,
    /// `ln[2^n Π G_s(α_k) G_{1-s}(β_k)]`.
    pub ln_prefactor: f64,
    /// `½ ln det V`.
    pub half_ln_det: f64,
    /// `½ dᵀ V⁻¹ d`.
    pub displacement: f64,
}

/// Williamson data of a pair of states, reusable across `s`.
#[derive(Debug, Clone)]
pub struct OverlapPair {
    a: WilliamsonDecomposition,
    b: WilliamsonDecomposition,
    d: DVector<f64>,
}

impl OverlapPair {
    pub fn new(a: &GaussianState, b: &GaussianState) -> Result<Self> {
        if a.modes() != b.modes() {
            return Err(invalid(format!(
                "states have {} and {} modes",
                a.modes(),
                b.modes()
            )));
        }
        let wa = physical_williamson(a.cov())?;
        let wb = physical_williamson(b.cov())?;
        Ok(Self::from_decompositions(wa, wb, a.mean() - b.mean()))
    }

    /// Builds from precomputed decompositions and mean difference.
    pub fn from_decompositions(
        a: WilliamsonDecomposition,
        b: WilliamsonDecomposition,
        d: DVector<f64>,
    ) -> Self {
        assert_eq!(a.modes(), b.modes());
        assert_eq!(d.len(), 2 * a.modes());
        Self { a, b, d }
    }

    pub fn evaluate(&self, s: f64) -> Result<QsEvaluation> {
        if !(s > 0.0 && s < 1.0) {
            return Err(invalid(format!("s must lie in (0, 1), got {s}")));
        }
        let n = self.a.modes();
        let mut ln_prefactor = n as f64 * std::f64::consts::LN_2;
        let mut wa = Vec::with_capacity(n);
        let mut wb = Vec::with_capacity(n);
        for (&alpha, &beta) in self.a.nu.iter().zip(&self.b.nu) {
            let (la, ga) = thermal_terms(alpha.max(1.0), s);
            let (lb, gb) = thermal_terms(beta.max(1.0), 1.0 - s);
            ln_prefactor += ga + gb;
            wa.push(la);
            wb.push(lb);
        }
        let v = self.a.congruence_with(&wa) + self.b.congruence_with(&wb);
        let v = (&v + v.transpose()) * 0.5;
        let chol = Cholesky::new(v).ok_or_else(|| {
            QiError::NumericalBreakdown(format!(
                "V(s) + V(1-s) is not positive definite at s = {s}"
            ))
        })?;
        let half_ln_det: f64 = chol.l_dirty().diagonal().iter().map(|v| v.ln()).sum();
        let displacement = if self.d.iter().all(|&v| v == 0.0) {
            0.0
        } else {
            0.5 * self.d.dot(&chol.solve(&self.d))
        };
        let ln_q = ln_prefactor - half_ln_det - displacement;
        if !ln_q.is_finite() {
            return Err(QiError::NumericalBreakdown(format!(
                "non-finite overlap at s = {s}"
            )));
        }
        Ok(QsEvaluation {
            s,
            q: ln_q.exp(),
            ln_q,
            ln_prefactor,
            half_ln_det,
            displacement,
        })
    }
}

fn physical_williamson(cov: &CovarianceMatrix) -> Result<WilliamsonDecomposition> {
    let w = williamson_decompose(cov)?;
    if let Some(&min) = w.nu.iter().min_by(|a, b| a.total_cmp(b)) {
        if min < 1.0 - PHYSICAL_TOL {
            return Err(QiError::Unphysical(min));
        }
    }
    Ok(w)
}

/// `Q_s = Tr[ρ_a^s ρ_b^{1-s}]` for two Gaussian states.
pub fn q_s(a: &GaussianState, b: &GaussianState, s: f64) -> Result<QsEvaluation> {
    OverlapPair::new(a, b)?.evaluate(s)
}

/// A probability bound `½ Q^M` together with how it was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundResult {
    pub value: f64,
    pub q_at_s: f64,
    pub ln_q: f64,
    pub s_used: f64,
    pub copies: u64,
    pub diagnostics: QsEvaluation,
}

impl BoundResult {
    fn from_evaluation(eval: QsEvaluation, copies: u64) -> Self {
        Self {
            value: 0.5 * (copies as f64 * eval.ln_q).exp(),
            q_at_s: eval.q,
            ln_q: eval.ln_q,
            s_used: eval.s,
            copies,
            diagnostics: eval,
        }
    }

    /// `-ln(2P) = -M ln Q`.
    pub fn exponent(&self) -> f64 {
        -(self.copies as f64) * self.ln_q
    }

    /// `-ln(2P) / M = -ln Q`.
    pub fn exponent_per_copy(&self) -> f64 {
        -self.ln_q
    }
}

fn check_copies(copies: u64) -> Result<()> {
    if copies == 0 {
        return Err(invalid("M must be at least 1"));
    }
    Ok(())
}

/// Chernoff bound `½ (min_s Q_s)^M`: a 33-point scan on
/// `[1e-6, 1 - 1e-6]` refined by golden section.
pub fn chernoff_bound(a: &GaussianState, b: &GaussianState, copies: u64) -> Result<BoundResult> {
    check_copies(copies)?;
    chernoff_from_pair(&OverlapPair::new(a, b)?, copies)
}

pub fn chernoff_from_pair(pair: &OverlapPair, copies: u64) -> Result<BoundResult> {
    let min = scan_then_golden(
        |s| pair.evaluate(s).map(|e| e.ln_q),
        S_ENDPOINT,
        1.0 - S_ENDPOINT,
        SCAN_POINTS,
        S_TOL,
    )?;
    let mut best = pair.evaluate(min.x)?;
    let half = pair.evaluate(0.5)?;
    if half.ln_q < best.ln_q {
        best = half;
    }
    Ok(BoundResult::from_evaluation(best, copies))
}

/// Bhattacharyya bound `½ Q_{1/2}^M`.
pub fn bhattacharyya_bound(
    a: &GaussianState,
    b: &GaussianState,
    copies: u64,
) -> Result<BoundResult> {
    check_copies(copies)?;
    bhattacharyya_from_pair(&OverlapPair::new(a, b)?, copies)
}

pub fn bhattacharyya_from_pair(pair: &OverlapPair, copies: u64) -> Result<BoundResult> {
    Ok(BoundResult::from_evaluation(pair.evaluate(0.5)?, copies))
}

/// Two-mode exponent `γ2` (exact closed form).
pub fn gamma2(n_s: f64) -> f64 {
    let r = (n_s * (1.0 + n_s)).sqrt();
    n_s * (1.0 + n_s) * (1.0 + n_s - r) / (1.0 + n_s + r)
}

/// Three-mode exponent `γ3 = ½ C² S (1 - sqrt(ν² - 1)/ν)` at `C = C_q^(3)`,
/// `ν = sqrt(S² - C²)`.
pub fn gamma3(n_s: f64) -> f64 {
    if n_s == 0.0 {
        return 0.0;
    }
    let c = solve_cq3(n_s);
    let s = variance(n_s);
    // ν² - 1 = (S² - 1) - C² with S² - 1 = 4 N_S (1 + N_S)
    let nu2_minus_1 = 4.0 * n_s * (1.0 + n_s) - c * c;
    let nu = (1.0 + nu2_minus_1).sqrt();
    0.5 * c * c * s * (1.0 - nu2_minus_1.max(0.0).sqrt() / nu)
}

/// Leading small-`N_S` behaviour `N_S (1 - 2 sqrt(N_S))` of [`gamma2`].
pub fn gamma2_asymptotic(n_s: f64) -> f64 {
    n_s * (1.0 - 2.0 * n_s.sqrt())
}

/// Leading small-`N_S` behaviour `N_S (1 - sqrt(2 N_S))` of [`gamma3`].
pub fn gamma3_asymptotic(n_s: f64) -> f64 {
    n_s * (1.0 - (2.0 * n_s).sqrt())
}

/// Coherent-state baseline: thermal background with and without a return
/// displaced by amplitude `sqrt(κ N_S)`.
pub fn coherent_qb(n_s: f64, n_b: f64, kappa: f64, copies: u64) -> Result<BoundResult> {
    let (a, b) = coherent_states(n_s, n_b, kappa)?;
    bhattacharyya_bound(&a, &b, copies)
}

fn coherent_states(n_s: f64, n_b: f64, kappa: f64) -> Result<(GaussianState, GaussianState)> {
    IlluminationScenario::new(n_s, n_b, kappa, 1, 0.0)?;
    let cov = CovarianceMatrix::thermal(n_b)?;
    let absent = GaussianState::zero_mean(cov.clone());
    let amp = (kappa * n_s).sqrt();
    let present = GaussianState::new(cov, DVector::from_vec(vec![2.0 * amp, 0.0]))?;
    Ok((absent, present))
}

/// Which transmitter the scenario describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum IlluminationModel {
    TwoMode,
    ThreeMode,
    Coherent,
}

impl IlluminationModel {
    /// Default correlation amplitude: `C_q` for two modes, `C_q^(3)` for three.
    pub fn default_correlation(self, n_s: f64) -> f64 {
        match self {
            IlluminationModel::TwoMode => cq2(n_s),
            IlluminationModel::ThreeMode => solve_cq3(n_s),
            IlluminationModel::Coherent => 0.0,
        }
    }

    /// Target-absent and target-present states of the scenario.
    pub fn states(self, scn: &IlluminationScenario) -> Result<(GaussianState, GaussianState)> {
        match self {
            IlluminationModel::TwoMode => Ok((
                GaussianState::zero_mean(two_mode_rho_cov(scn)?),
                GaussianState::zero_mean(two_mode_sigma_cov(scn)?),
            )),
            IlluminationModel::ThreeMode => Ok((
                GaussianState::zero_mean(rho_cov(scn)?),
                GaussianState::zero_mean(sigma_cov(scn)?),
            )),
            IlluminationModel::Coherent => coherent_states(scn.n_s, scn.n_b, scn.kappa),
        }
    }

    /// Large-`N_B` per-copy exponent: `κγ/N_B`, or `κN_S/(4N_B)` for the
    /// coherent baseline. The three-mode value uses the scenario's
    /// correlation; the two-mode value is NaN away from `C = C_q`.
    pub fn asymptotic_exponent(self, scn: &IlluminationScenario) -> f64 {
        let (k, nb) = (scn.kappa, scn.n_b);
        match self {
            IlluminationModel::Coherent => k * scn.n_s / (4.0 * nb),
            // the two-mode closed form exists only at C = C_q
            IlluminationModel::TwoMode if scn.c == cq2(scn.n_s) => k * gamma2(scn.n_s) / nb,
            IlluminationModel::TwoMode => f64::NAN,
            IlluminationModel::ThreeMode => {
                let s = scn.signal_variance();
                let c = scn.c;
                let nu2 = s * s - c * c;
                let nu = nu2.sqrt();
                let g = 0.5 * c * c * s * (1.0 - (nu2 - 1.0).max(0.0).sqrt() / nu);
                k * g / nb
            }
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            IlluminationModel::TwoMode => "two-mode",
            IlluminationModel::ThreeMode => "three-mode",
            IlluminationModel::Coherent => "coherent",
        }
    }
}

impl fmt::Display for IlluminationModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for IlluminationModel {
    type Err = QiError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "two-mode" | "two" | "2" => Ok(IlluminationModel::TwoMode),
            "three-mode" | "three" | "3" => Ok(IlluminationModel::ThreeMode),
            "coherent" => Ok(IlluminationModel::Coherent),
            other => Err(invalid(format!(
                "unknown model {other:?} (expected two-mode, three-mode or coherent)"
            ))),
        }
    }
}

/// `γ2`, `γ3` and their ratio at one signal strength.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExponentComparison {
    pub n_s: f64,
    pub gamma2: f64,
    pub gamma3: f64,
    /// `None` where `γ2 = 0` (only at `N_S = 0`).
    pub ratio: Option<f64>,
}

impl ExponentComparison {
    pub fn at(n_s: f64) -> Result<Self> {
        if !(n_s >= 0.0) || !n_s.is_finite() {
            return Err(invalid(format!("N_S must be finite and >= 0, got {n_s}")));
        }
        let (g2, g3) = (gamma2(n_s), gamma3(n_s));
        Ok(Self {
            n_s,
            gamma2: g2,
            gamma3: g3,
            ratio: (g2 > 0.0).then(|| g3 / g2),
        })
    }
}

/// Exact exponents along a grid, in grid order.
pub fn ratio_sweep(grid: &[f64]) -> Result<Vec<ExponentComparison>> {
    grid.iter().map(|&n| ExponentComparison::at(n)).collect()
}

/// Signal strength where `γ3 = γ2`, searched on `[0.05, 1]`.
pub fn find_crossover() -> Result<f64> {
    find_crossover_in(CROSSOVER_BRACKET.0, CROSSOVER_BRACKET.1, CROSSOVER_TOL)
}

pub fn find_crossover_in(lo: f64, hi: f64, tol: f64) -> Result<f64> {
    bisect(|n| gamma3(n) - gamma2(n), lo, hi, tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn thermal(n: f64) -> GaussianState {
        GaussianState::zero_mean(CovarianceMatrix::thermal(n).unwrap())
    }

    #[test]
    fn lambda_and_g_special_values() {
        assert_eq!(lambda_p(5.0, 1.0).unwrap(), 5.0);
        for p in [0.1, 0.5, 0.9] {
            assert_eq!(lambda_p(1.0, p).unwrap(), 1.0);
            assert_eq!(g_p(1.0, p).unwrap(), 1.0);
        }
        for x in [1.5, 3.0, 1e4] {
            assert_eq!(g_p(x, 1.0).unwrap(), 1.0);
        }
        let sq2 = 2f64.sqrt();
        assert!((lambda_p(3.0, 0.5).unwrap() - (3.0 + 2.0 * sq2)).abs() < 1e-13);
        assert!((g_p(3.0, 0.5).unwrap() - (1.0 + sq2)).abs() < 1e-13);
    }

    #[test]
    fn lambda_and_g_match_direct_formula() {
        for &x in &[1.2, 2.0, 7.0, 150.0] {
            for &p in &[0.2, 0.5, 0.8] {
                let (hi, lo) = ((x + 1.0f64).powf(p), (x - 1.0f64).powf(p));
                let lam = (hi + lo) / (hi - lo);
                let g = 2f64.powf(p) / (hi - lo);
                assert!((lambda_p(x, p).unwrap() - lam).abs() / lam < 1e-12);
                assert!((g_p(x, p).unwrap() - g).abs() / g < 1e-12);
            }
        }
    }

    #[test]
    fn thermal_photon_form_of_g() {
        for &n in &[0.5, 2.0, 30.0] {
            for &p in &[0.25, 0.75] {
                let expect = 1.0 / ((n + 1.0f64).powf(p) - n.powf(p));
                let got = g_p(2.0 * n + 1.0, p).unwrap();
                assert!((got - expect).abs() / expect < 1e-12);
            }
        }
    }

    #[test]
    fn large_argument_is_finite_and_accurate() {
        // Λ_{1/2}(x) = (√(x+1)+√(x-1))² / 2 exactly
        let x = 1e12;
        let exact = ((x + 1.0f64).sqrt() + (x - 1.0f64).sqrt()).powi(2) / 2.0;
        assert!((lambda_p(x, 0.5).unwrap() - exact).abs() / exact < 1e-12);
        assert!(g_p(x, 0.5).unwrap().is_finite());
    }

    #[test]
    fn argument_checks() {
        assert!(matches!(lambda_p(0.5, 0.5), Err(QiError::Unphysical(_))));
        assert!(lambda_p(2.0, 0.0).is_err());
        assert!(g_p(2.0, 1.5).is_err());
        // tiny undershoot is tolerated
        assert_eq!(lambda_p(1.0 - 1e-12, 0.3).unwrap(), 1.0);
    }

    #[test]
    fn identical_states_overlap_to_one() {
        let scn = IlluminationScenario::three_mode(0.2, 3.0, 0.05, 1).unwrap();
        let st = GaussianState::zero_mean(sigma_cov(&scn).unwrap());
        for s in [0.1, 0.5, 0.9] {
            let e = q_s(&st, &st, s).unwrap();
            assert!(e.ln_q.abs() < 1e-12, "{e:?}");
        }
        let b = chernoff_bound(&st, &st, 7).unwrap();
        assert!((b.value - 0.5).abs() < 1e-11);
    }

    #[test]
    fn thermal_pair_matches_fock_sum() {
        // Σ_n sqrt(p_n q_n) with p, q geometric
        let (n1, n2) = (1.0f64, 2.0f64);
        let r1 = n1 / (1.0 + n1);
        let r2 = n2 / (1.0 + n2);
        let expect = 1.0 / ((1.0 + n1) * (1.0 + n2)).sqrt() / (1.0 - (r1 * r2).sqrt());
        let got = q_s(&thermal(n1), &thermal(n2), 0.5).unwrap().q;
        assert!((got - expect).abs() < 1e-13, "{got} vs {expect}");
    }

    #[test]
    fn symmetric_pair_has_central_optimum() {
        // swapping the arguments maps s to 1 - s; a symmetric family has s* = 1/2
        let a = GaussianState::new(
            CovarianceMatrix::thermal(1.0).unwrap(),
            DVector::from_vec(vec![0.6, 0.0]),
        )
        .unwrap();
        let b = GaussianState::new(
            CovarianceMatrix::thermal(1.0).unwrap(),
            DVector::from_vec(vec![-0.6, 0.0]),
        )
        .unwrap();
        let qc = chernoff_bound(&a, &b, 1).unwrap();
        assert!((qc.s_used - 0.5).abs() < 1e-6, "{}", qc.s_used);
    }

    #[test]
    fn swap_symmetry() {
        let scn = IlluminationScenario::three_mode(0.3, 1.5, 0.2, 1).unwrap();
        let (a, b) = IlluminationModel::ThreeMode.states(&scn).unwrap();
        for s in [0.2, 0.35, 0.8] {
            let ab = q_s(&a, &b, s).unwrap().q;
            let ba = q_s(&b, &a, 1.0 - s).unwrap().q;
            assert!((ab - ba).abs() / ab < 1e-10);
        }
    }

    #[test]
    fn gamma_closed_forms() {
        assert_eq!(gamma2(0.0), 0.0);
        assert_eq!(gamma3(0.0), 0.0);
        let sq2 = 2f64.sqrt();
        let expect = 2.0 * (2.0 - sq2) / (2.0 + sq2);
        assert!((gamma2(1.0) - expect).abs() < 1e-15);
        assert!((gamma2(1.0) - 0.3431457505).abs() < 1e-10);
        // series agreement to O(N_S²)
        let n = 0.01;
        assert!((gamma2(n) - 0.008).abs() < 5.0 * n * n);
        assert!((gamma3(n) - 0.0085858).abs() < 5.0 * n * n);
        assert!((gamma2_asymptotic(n) - 0.008).abs() < 1e-15);
    }

    #[test]
    fn ratio_at_reported_crossover() {
        let r = gamma3(0.295) / gamma2(0.295);
        assert!((r - 1.0).abs() < 1e-2);
        let x = find_crossover().unwrap();
        assert!((0.290..=0.300).contains(&x));
        assert!((gamma3(x) - gamma2(x)).abs() / gamma2(x) < 1e-8);
        let y = find_crossover_in(0.06, 0.9, CROSSOVER_TOL).unwrap();
        assert!((x - y).abs() < 1e-6);
    }

    #[test]
    fn sweep_order_and_limits() {
        let rows = ratio_sweep(&[0.01, 1.0, 1e-8, 0.0]).unwrap();
        assert!(rows[0].ratio.unwrap() > 1.0);
        assert!(rows[1].ratio.unwrap() < 1.0);
        assert!((rows[2].ratio.unwrap() - 1.0).abs() < 1e-3);
        assert_eq!(rows[3].ratio, None);
        assert!(ratio_sweep(&[-1.0]).is_err());
    }

    #[test]
    fn coherent_baseline() {
        let none = coherent_qb(1.0, 10.0, 0.0, 5).unwrap();
        assert!((none.value - 0.5).abs() < 1e-14);
        let b = coherent_qb(1.0, 1e4, 0.01, 100_000_000).unwrap();
        let per_copy = b.exponent() / 1e8;
        assert!((per_copy - 2.5e-7).abs() / 2.5e-7 < 0.02);
        // exact closed form κ N_S (√(N_B+1) - √N_B)²
        let exact = 0.01 * (1e4f64 + 1.0).sqrt().mul_add(1.0, -100.0).powi(2);
        assert!((b.exponent_per_copy() - exact).abs() / exact < 1e-8);
    }

    #[test]
    fn model_parsing() {
        assert_eq!(
            "three-mode".parse::<IlluminationModel>().unwrap(),
            IlluminationModel::ThreeMode
        );
        assert!("four".parse::<IlluminationModel>().is_err());
    }
}
