//! Covariance builders for the illumination states and their closed-form
//! symplectic data.
//!
//! Three-mode states are ordered `(R, I1, I2)` (return, idler 1, idler 2);
//! the initial three-mode state is ordered `(S, I1, I2)`. Two-mode states are
//! ordered `(R, I)`.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{invalid, QiError, Result};
use crate::numeric::bracketed_newton;
use crate::symplectic::{
    max_abs_diff, williamson_decompose, CovarianceMatrix, WilliamsonDecomposition,
};

/// Slack allowed above the maximal correlation before a state is rejected.
pub const CORRELATION_SLACK: f64 = 1e-12;

/// Quadrature variance `2n + 1` of a thermal mode with mean photon number `n`.
pub fn variance(nbar: f64) -> f64 {
    2.0 * nbar + 1.0
}

/// Two-mode squeezed vacuum correlation `2 sqrt(N_S (1 + N_S))`.
pub fn cq2(n_s: f64) -> f64 {
    2.0 * (n_s * (1.0 + n_s)).sqrt()
}

/// Maximal correlation of the symmetric three-mode state.
///
/// Returns `sqrt(x*)` where `x*` is the unique root in `(0, S^2/2)` of
/// `4x^3 - 9S^2 x^2 + 6S^4 x - (S^6 - 1)`. The constant term is evaluated as
/// `(S^2 - 1)(S^4 + S^2 + 1)` with `S^2 - 1 = 4 N_S (1 + N_S)` so that small
/// `N_S` keeps full relative precision.
pub fn solve_cq3(n_s: f64) -> f64 {
    assert!(n_s >= 0.0 && n_s.is_finite(), "N_S must be finite and >= 0");
    if n_s == 0.0 {
        return 0.0;
    }
    let s = variance(n_s);
    let s2 = s * s;
    let s4 = s2 * s2;
    let c0 = 4.0 * n_s * (1.0 + n_s) * (s4 + s2 + 1.0);
    let cubic = |x: f64| {
        let v = ((4.0 * x - 9.0 * s2) * x + 6.0 * s4) * x - c0;
        let d = (12.0 * x - 18.0 * s2) * x + 6.0 * s4;
        (v, d)
    };
    let start = c0 / (6.0 * s4);
    let mut x = bracketed_newton(cubic, 0.0, 0.5 * s2, start, 1e-15 * s2)
        .expect("the cubic changes sign on (0, S^2/2)");
    // one polishing step; the stopping test fires on the step before last
    let (v, d) = cubic(x);
    let polished = x - v / d;
    if polished > 0.0 && polished < 0.5 * s2 {
        x = polished;
    }
    x.sqrt()
}

/// Residual of the defining cubic at `x`, for diagnostics.
pub fn cq3_cubic_residual(n_s: f64, x: f64) -> f64 {
    let s2 = variance(n_s).powi(2);
    let s4 = s2 * s2;
    let c0 = 4.0 * n_s * (1.0 + n_s) * (s4 + s2 + 1.0);
    ((4.0 * x - 9.0 * s2) * x + 6.0 * s4) * x - c0
}

/// Separability threshold of the symmetric three-mode state.
pub fn cc3(n_s: f64) -> f64 {
    let a = 2.0 + 5.0 * n_s + 5.0 * n_s * n_s;
    let b = ((1.0 + 3.0 * n_s) * (2.0 + 3.0 * n_s) * (2.0 + n_s + n_s * n_s)).sqrt();
    (0.5 * (a - b)).max(0.0).sqrt()
}

/// Parameters of one illumination experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IlluminationScenario {
    /// Mean signal photon number `N_S`.
    pub n_s: f64,
    /// Mean background photon number `N_B` seen at the receiver.
    pub n_b: f64,
    /// Target reflectivity `κ`.
    pub kappa: f64,
    /// Number of copies `M`.
    pub copies: u64,
    /// Correlation amplitude `C`.
    pub c: f64,
}

impl IlluminationScenario {
    pub fn new(n_s: f64, n_b: f64, kappa: f64, copies: u64, c: f64) -> Result<Self> {
        let finite_nonneg = |v: f64| v.is_finite() && v >= 0.0;
        if !finite_nonneg(n_s) {
            return Err(invalid(format!("N_S must be finite and >= 0, got {n_s}")));
        }
        if !finite_nonneg(n_b) {
            return Err(invalid(format!("N_B must be finite and >= 0, got {n_b}")));
        }
        if !(0.0..=1.0).contains(&kappa) {
            return Err(invalid(format!("kappa must lie in [0, 1], got {kappa}")));
        }
        if copies == 0 {
            return Err(invalid("M must be at least 1"));
        }
        if !finite_nonneg(c) {
            return Err(invalid(format!("C must be finite and >= 0, got {c}")));
        }
        Ok(Self {
            n_s,
            n_b,
            kappa,
            copies,
            c,
        })
    }

    /// Three-mode scenario at the maximal correlation `C_q^(3)`.
    pub fn three_mode(n_s: f64, n_b: f64, kappa: f64, copies: u64) -> Result<Self> {
        let probe = Self::new(n_s, n_b, kappa, copies, 0.0)?;
        Ok(Self {
            c: solve_cq3(n_s),
            ..probe
        })
    }

    /// Two-mode scenario at the TMSV correlation `C_q`.
    pub fn two_mode(n_s: f64, n_b: f64, kappa: f64, copies: u64) -> Result<Self> {
        let probe = Self::new(n_s, n_b, kappa, copies, 0.0)?;
        Ok(Self {
            c: cq2(n_s),
            ..probe
        })
    }

    pub fn signal_variance(&self) -> f64 {
        variance(self.n_s)
    }

    pub fn background_variance(&self) -> f64 {
        variance(self.n_b)
    }

    /// Return-mode variance `A = 2 κ N_S + B` when the target is present.
    pub fn return_variance(&self) -> f64 {
        2.0 * self.kappa * self.n_s + self.background_variance()
    }

    pub fn validate_three_mode(&self) -> Result<()> {
        let max = solve_cq3(self.n_s);
        if self.c > max + CORRELATION_SLACK {
            return Err(QiError::CorrelationTooLarge { c: self.c, max });
        }
        Ok(())
    }

    pub fn validate_two_mode(&self) -> Result<()> {
        let max = cq2(self.n_s);
        if self.c > max + CORRELATION_SLACK {
            return Err(QiError::CorrelationTooLarge { c: self.c, max });
        }
        Ok(())
    }
}

/// Two-mode squeezed vacuum covariance, modes `(S, I)`.
pub fn tmsv_cov(n_s: f64) -> Result<CovarianceMatrix> {
    if !(n_s >= 0.0) || !n_s.is_finite() {
        return Err(invalid(format!("N_S must be finite and >= 0, got {n_s}")));
    }
    let mut m = DMatrix::from_diagonal_element(4, 4, variance(n_s));
    set_pair(&mut m, 0, 1, cq2(n_s));
    CovarianceMatrix::new(m)
}

/// Symmetric three-mode covariance with pairwise correlation `c`, modes
/// `(S, I1, I2)`. Rejects `c > C_q^(3)`.
pub fn three_mode_cov(n_s: f64, c: f64) -> Result<CovarianceMatrix> {
    if !(n_s >= 0.0) || !n_s.is_finite() {
        return Err(invalid(format!("N_S must be finite and >= 0, got {n_s}")));
    }
    if !(c >= 0.0) {
        return Err(invalid(format!("C must be >= 0, got {c}")));
    }
    let max = solve_cq3(n_s);
    if c > max + CORRELATION_SLACK {
        return Err(QiError::CorrelationTooLarge { c, max });
    }
    three_mode_cov_unchecked(n_s, c)
}

/// [`three_mode_cov`] without the physicality check, for probing the
/// boundary of the bona fide region.
pub fn three_mode_cov_unchecked(n_s: f64, c: f64) -> Result<CovarianceMatrix> {
    let mut m = DMatrix::from_diagonal_element(6, 6, variance(n_s));
    set_pair(&mut m, 0, 1, c);
    set_pair(&mut m, 0, 2, c);
    set_pair(&mut m, 1, 2, c);
    CovarianceMatrix::new(m)
}

/// Target-absent state: thermal return mode next to the idler pair.
/// Independent of `κ`.
pub fn rho_cov(scn: &IlluminationScenario) -> Result<CovarianceMatrix> {
    scn.validate_three_mode()?;
    let mut m = DMatrix::zeros(6, 6);
    let (b, s) = (scn.background_variance(), scn.signal_variance());
    for i in 0..6 {
        m[(i, i)] = if i < 2 { b } else { s };
    }
    set_pair(&mut m, 1, 2, scn.c);
    CovarianceMatrix::new(m)
}

/// Target-present state: return mode `A` correlated with both idlers by
/// `sqrt(κ) C`.
pub fn sigma_cov(scn: &IlluminationScenario) -> Result<CovarianceMatrix> {
    scn.validate_three_mode()?;
    let mut m = DMatrix::zeros(6, 6);
    let (a, s) = (scn.return_variance(), scn.signal_variance());
    for i in 0..6 {
        m[(i, i)] = if i < 2 { a } else { s };
    }
    let rc = scn.kappa.sqrt() * scn.c;
    set_pair(&mut m, 0, 1, rc);
    set_pair(&mut m, 0, 2, rc);
    set_pair(&mut m, 1, 2, scn.c);
    CovarianceMatrix::new(m)
}

/// Two-mode target-absent state `diag(B, B, S, S)`.
pub fn two_mode_rho_cov(scn: &IlluminationScenario) -> Result<CovarianceMatrix> {
    scn.validate_two_mode()?;
    let (b, s) = (scn.background_variance(), scn.signal_variance());
    CovarianceMatrix::new(DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
        b, b, s, s,
    ])))
}

/// Two-mode target-present state with return-idler correlation `sqrt(κ) C`.
pub fn two_mode_sigma_cov(scn: &IlluminationScenario) -> Result<CovarianceMatrix> {
    scn.validate_two_mode()?;
    let (a, s) = (scn.return_variance(), scn.signal_variance());
    let mut m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![a, a, s, s]));
    set_pair(&mut m, 0, 1, scn.kappa.sqrt() * scn.c);
    CovarianceMatrix::new(m)
}

/// Closed-form Williamson decomposition of the target-absent state.
pub fn rho_symplectic_analytic(scn: &IlluminationScenario) -> Result<WilliamsonDecomposition> {
    let (s, c) = (scn.signal_variance(), scn.c);
    if !(c >= 0.0 && c < s) {
        return Err(QiError::AnalyticDomain(format!(
            "need 0 <= C < S, got C = {c}, S = {s}"
        )));
    }
    let z = ((s - c) / (s + c)).powf(0.25);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let z1 = [h / z, h * z];
    let z2 = [h * z, h / z];
    let mut sym = DMatrix::zeros(6, 6);
    sym[(0, 0)] = 1.0;
    sym[(1, 1)] = 1.0;
    for q in 0..2 {
        // rows I1 = (Z1, -Z2), I2 = (Z1, Z2)
        sym[(2 + q, 2 + q)] = z1[q];
        sym[(2 + q, 4 + q)] = -z2[q];
        sym[(4 + q, 2 + q)] = z1[q];
        sym[(4 + q, 4 + q)] = z2[q];
    }
    let nu = (s * s - c * c).sqrt();
    Ok(WilliamsonDecomposition {
        symplectic: sym,
        nu: vec![scn.background_variance(), nu, nu],
    }
    .sorted_descending())
}

/// Closed-form symplectic data of the target-present three-mode state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SigmaSymplecticData {
    pub beta1: f64,
    pub beta_plus: f64,
    pub beta_minus: f64,
    pub xi: f64,
    pub mu1_plus: f64,
    pub mu1_minus: f64,
    pub mu2_plus: f64,
    pub mu2_minus: f64,
    pub x_plus: f64,
    pub x_minus: f64,
    pub y_plus: f64,
    pub y_minus: f64,
    pub u_plus: f64,
    pub u_minus: f64,
    pub v_plus: f64,
    pub v_minus: f64,
    pub z: f64,
    a: f64,
    s: f64,
    c: f64,
    kappa: f64,
}

impl SigmaSymplecticData {
    /// Assembles `S_σ` with mode blocks ordered `(β1, β+, β-)`.
    pub fn symplectic_matrix(&self) -> DMatrix<f64> {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let z2 = [h * self.z, h / self.z];
        let x1 = [self.x_plus, self.y_plus];
        let x2 = [self.y_minus, self.x_minus];
        let y1 = [self.u_plus, self.v_plus];
        let y2 = [self.v_minus, self.u_minus];
        let mut m = DMatrix::zeros(6, 6);
        for q in 0..2 {
            m[(q, 2 + q)] = x1[q];
            m[(q, 4 + q)] = x2[q];
            m[(2 + q, q)] = z2[q];
            m[(2 + q, 2 + q)] = y1[q];
            m[(2 + q, 4 + q)] = y2[q];
            m[(4 + q, q)] = -z2[q];
            m[(4 + q, 2 + q)] = y1[q];
            m[(4 + q, 4 + q)] = y2[q];
        }
        m
    }

    /// The analytic decomposition, modes sorted by descending eigenvalue.
    pub fn decomposition(&self) -> WilliamsonDecomposition {
        WilliamsonDecomposition {
            symplectic: self.symplectic_matrix(),
            nu: vec![self.beta1, self.beta_plus, self.beta_minus],
        }
        .sorted_descending()
    }

    /// Relative residuals of the four μ identities, in the order
    /// `μ2+ - μ2- = 2ξ`, `μ2+ μ2- = 8κC²(A-S+C)(A-S-C)`,
    /// `μ1+ μ2+ = 2(A-S-C)[A μ2+ - 4κC²(A-S+C)]`,
    /// `μ1- μ2- = -2(A-S+C)[A μ2- - 4κC²(A-S-C)]`.
    pub fn mu_identity_residuals(&self) -> [f64; 4] {
        let (a, s, c, k) = (self.a, self.s, self.c, self.kappa);
        let rel = |lhs: f64, rhs: f64| {
            let scale = lhs.abs().max(rhs.abs());
            if scale == 0.0 {
                0.0
            } else {
                (lhs - rhs).abs() / scale
            }
        };
        [
            rel(self.mu2_plus - self.mu2_minus, 2.0 * self.xi),
            rel(
                self.mu2_plus * self.mu2_minus,
                8.0 * k * c * c * (a - s + c) * (a - s - c),
            ),
            rel(
                self.mu1_plus * self.mu2_plus,
                2.0 * (a - s - c) * (a * self.mu2_plus - 4.0 * k * c * c * (a - s + c)),
            ),
            rel(
                self.mu1_minus * self.mu2_minus,
                -2.0 * (a - s + c) * (a * self.mu2_minus - 4.0 * k * c * c * (a - s - c)),
            ),
        ]
    }
}

/// Closed-form symplectic eigenvalues and transformation of the
/// target-present state. Fails with [`QiError::AnalyticDomain`] whenever a
/// radicand is negative or the assembled matrix degenerates (e.g. `κ = 0`);
/// callers then use the numeric Williamson path.
pub fn sigma_symplectic_analytic(scn: &IlluminationScenario) -> Result<SigmaSymplecticData> {
    scn.validate_three_mode()?;
    let (a, s, c, k) = (
        scn.return_variance(),
        scn.signal_variance(),
        scn.c,
        scn.kappa,
    );
    let domain = |what: &str, v: f64| -> Result<f64> {
        if v.is_finite() && v >= 0.0 {
            Ok(v.sqrt())
        } else {
            Err(QiError::AnalyticDomain(format!("{what} radicand is {v}")))
        }
    };

    if k == 0.0 || c == 0.0 {
        return Err(QiError::AnalyticDomain(
            "the transformation degenerates without target or correlation".into(),
        ));
    }
    let lead = a * a - s * s + c * c;
    let xi = domain(
        "xi",
        lead * lead - 8.0 * k * c * c * (a - s + c) * (a - s - c),
    )?;
    let beta1 = domain("beta1", s * s - c * c)?;
    let base = a * a + s * s - (1.0 + 4.0 * k) * c * c;
    // The small root of each pair loses most of its digits to cancellation,
    // so it is recovered from the product of the pair instead.
    let beta_prod = (2.0 * k * c * c - a * s - a * c) * (2.0 * k * c * c - a * s + a * c);
    let (beta_plus, beta_minus) = {
        let big = 0.5 * (base + xi);
        let small = if big > 0.0 {
            beta_prod / big
        } else {
            0.5 * (base - xi)
        };
        (domain("beta+", big)?, domain("beta-", small)?)
    };

    let mu2_prod = 8.0 * k * c * c * (a - s + c) * (a - s - c);
    let (mu2_p, mu2_m) = if lead >= 0.0 {
        let big = lead + xi;
        (
            big,
            if big != 0.0 {
                mu2_prod / big
            } else {
                lead - xi
            },
        )
    } else {
        let big = lead - xi;
        (mu2_prod / big, big)
    };
    let mu1 = |sign: f64| (xi - 2.0 * a * c) + sign * ((a - s) * (a - s) - c * c);
    let mu2 = |sign: f64| if sign > 0.0 { mu2_p } else { mu2_m };
    let beta = |sign: f64| if sign > 0.0 { beta_plus } else { beta_minus };

    let mut x = [0.0; 2];
    let mut y = [0.0; 2];
    let mut u = [0.0; 2];
    let mut v = [0.0; 2];
    for (i, sign) in [1.0f64, -1.0].into_iter().enumerate() {
        let m1 = mu1(sign);
        let m2 = mu2(sign);
        let m2_other = mu2(-sign);
        let b = beta(sign);
        let d_mp = a - s - sign * c;
        let d_pm = a - s + sign * c;
        let guard = |what: &str, num: f64, den: f64| -> Result<f64> {
            if den == 0.0 {
                return Err(QiError::AnalyticDomain(format!(
                    "{what} has a zero denominator"
                )));
            }
            domain(what, num / den)
        };
        x[i] = sign * 0.5 * guard("x", m1 * m2, d_mp * xi * b)?;
        y[i] = guard("y", d_mp * m2 * b, m1 * xi)?;
        u[i] = guard("u", m1 * m2_other, 8.0 * d_pm * xi * b)?;
        v[i] = -sign * guard("v", d_pm * m2_other * b, 2.0 * m1 * xi)?;
    }

    let data = SigmaSymplecticData {
        beta1,
        beta_plus,
        beta_minus,
        xi,
        mu1_plus: mu1(1.0),
        mu1_minus: mu1(-1.0),
        mu2_plus: mu2(1.0),
        mu2_minus: mu2(-1.0),
        x_plus: x[0],
        x_minus: x[1],
        y_plus: y[0],
        y_minus: y[1],
        u_plus: u[0],
        u_minus: u[1],
        v_plus: v[0],
        v_minus: v[1],
        z: ((s - c) / (s + c)).powf(0.25),
        a,
        s,
        c,
        kappa: k,
    };

    let dec = data.decomposition();
    let scale = a.max(1.0);
    if !(dec.symplectic_residual() < 1e-6) {
        return Err(QiError::AnalyticDomain(
            "assembled transformation is not symplectic".into(),
        ));
    }
    let target = sigma_cov(scn)?;
    if !(max_abs_diff(&dec.reconstruct(), target.entries()) < 1e-6 * scale) {
        return Err(QiError::AnalyticDomain(
            "assembled transformation does not reconstruct the state".into(),
        ));
    }
    Ok(data)
}

/// How closely the closed-form decompositions of `ρ` and `σ` agree with the
/// numeric Williamson decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnalyticAgreement {
    /// Largest gap between analytic and numeric symplectic eigenvalues.
    pub nu_gap: f64,
    /// Largest reconstruction residual of the numeric decompositions.
    pub numeric_reconstruction: f64,
    /// Largest reconstruction residual of the analytic decompositions.
    pub analytic_reconstruction: f64,
    /// Largest symplectic residual of the analytic transformations.
    pub analytic_symplectic: f64,
    /// Worst relative residual of the μ identities.
    pub mu_identity: f64,
}

pub fn analytic_agreement(scn: &IlluminationScenario) -> Result<AnalyticAgreement> {
    let rho = rho_cov(scn)?;
    let sigma = sigma_cov(scn)?;
    let rho_a = rho_symplectic_analytic(scn)?;
    let sigma_data = sigma_symplectic_analytic(scn)?;
    let sigma_a = sigma_data.decomposition();
    let rho_n = williamson_decompose(&rho)?;
    let sigma_n = williamson_decompose(&sigma)?;
    let gap = |a: &WilliamsonDecomposition, b: &WilliamsonDecomposition| {
        a.nu.iter()
            .zip(&b.nu)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    };
    Ok(AnalyticAgreement {
        nu_gap: gap(&rho_a, &rho_n).max(gap(&sigma_a, &sigma_n)),
        numeric_reconstruction: rho_n
            .reconstruction_residual(&rho)
            .max(sigma_n.reconstruction_residual(&sigma)),
        analytic_reconstruction: rho_a
            .reconstruction_residual(&rho)
            .max(sigma_a.reconstruction_residual(&sigma)),
        analytic_symplectic: rho_a
            .symplectic_residual()
            .max(sigma_a.symplectic_residual()),
        mu_identity: sigma_data
            .mu_identity_residuals()
            .into_iter()
            .fold(0.0, f64::max),
    })
}

fn set_pair(m: &mut DMatrix<f64>, i: usize, j: usize, c: f64) {
    let (xi, pi, xj, pj) = (2 * i, 2 * i + 1, 2 * j, 2 * j + 1);
    m[(xi, xj)] = c;
    m[(xj, xi)] = c;
    m[(pi, pj)] = -c;
    m[(pj, pi)] = -c;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symplectic::{is_pure, symplectic_eigenvalues, williamson_decompose};

    #[test]
    fn cq2_values() {
        assert_eq!(cq2(0.0), 0.0);
        assert!((cq2(1.0) - 2.0 * 2f64.sqrt()).abs() < 1e-15);
        assert!((cq2(0.295) - 2.0 * (0.295f64 * 1.295).sqrt()).abs() < 1e-15);
        assert!((cq2(0.295) - 1.2362).abs() < 1e-4);
    }

    #[test]
    fn tmsv_entries() {
        assert_eq!(tmsv_cov(0.0).unwrap().into_inner(), DMatrix::identity(4, 4));
        let t = tmsv_cov(1.0).unwrap();
        assert_eq!(t[(0, 0)], 3.0);
        assert!((t[(0, 2)] - 2.8284271247).abs() < 1e-10);
        assert!((t[(1, 3)] + 2.8284271247).abs() < 1e-10);
    }

    #[test]
    fn cq3_at_zero_and_limits() {
        assert_eq!(solve_cq3(0.0), 0.0);
        for n in [1e-4f64, 1e-3, 0.01] {
            let series = (2.0 * n).sqrt() * (1.0 - 2.0 / 3.0 * n * n + 4.0 / 3.0 * n.powi(3));
            let err = (solve_cq3(n) - series).abs() / series;
            assert!(err < 10.0 * n.powi(4), "{n}: {err}");
        }
        assert!((solve_cq3(0.01) - 0.14141212010042825).abs() < 1e-15);
        let large = solve_cq3(100.0);
        assert!((large - 100.5).abs() / 100.5 < 1e-9);
    }

    #[test]
    fn cc3_closed_form() {
        assert_eq!(cc3(0.0), 0.0);
        let expected = ((12.0 - 4.0 * 5f64.sqrt()) / 2.0).sqrt();
        assert!((cc3(1.0) - expected).abs() < 1e-14);
        for ns in [0.1, 0.5, 1.0, 5.0] {
            assert!(cc3(ns) < solve_cq3(ns));
        }
    }

    #[test]
    fn three_mode_physicality_boundary() {
        let ns = 0.5;
        let cq = solve_cq3(ns);
        let at_max = three_mode_cov(ns, cq).unwrap();
        assert!((at_max.determinant() - 1.0).abs() < 1e-12);
        // unit determinant is not enough: one symplectic eigenvalue drops below 1
        let nu = at_max.symplectic_eigenvalues().unwrap();
        assert!(nu[2] < 1.0 && nu[0] > 1.0);
        assert!(!is_pure(&at_max).unwrap());
        // the largest bona fide correlation for this pattern is sqrt(N_S (1 + N_S))
        let edge = (ns * (1.0 + ns)).sqrt();
        let nu = three_mode_cov(ns, edge)
            .unwrap()
            .symplectic_eigenvalues()
            .unwrap();
        assert!((nu[2] - 1.0).abs() < 1e-9);
        assert!(matches!(
            three_mode_cov(ns, 1.01 * cq),
            Err(QiError::CorrelationTooLarge { .. })
        ));
        let beyond = three_mode_cov_unchecked(ns, 1.01 * cq).unwrap();
        assert!(!beyond.is_bona_fide());

        let product = three_mode_cov(ns, 0.0).unwrap();
        assert_eq!(
            product.into_inner(),
            DMatrix::from_diagonal_element(6, 6, 2.0)
        );
    }

    #[test]
    fn rho_ignores_kappa() {
        let a = IlluminationScenario::three_mode(0.3, 2.0, 0.01, 1).unwrap();
        let b = IlluminationScenario { kappa: 0.7, ..a };
        assert_eq!(rho_cov(&a).unwrap(), rho_cov(&b).unwrap());

        let vac = IlluminationScenario::new(0.4, 0.0, 0.1, 1, 0.0).unwrap();
        let m = rho_cov(&vac).unwrap().into_inner();
        let s = 1.8;
        assert_eq!(
            m,
            DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 1.0, s, s, s, s]))
        );
    }

    #[test]
    fn rho_spectrum_matches_closed_form() {
        let scn = IlluminationScenario::three_mode(0.2, 5.0, 0.01, 1).unwrap();
        let nu = symplectic_eigenvalues(&rho_cov(&scn).unwrap()).unwrap();
        let s = scn.signal_variance();
        let inner = (s * s - scn.c * scn.c).sqrt();
        assert!((nu[0] - 11.0).abs() < 1e-10);
        assert!((nu[1] - inner).abs() < 1e-10);
        assert!((nu[2] - inner).abs() < 1e-10);
    }

    #[test]
    fn rho_analytic_decomposition() {
        let flat = IlluminationScenario::new(0.3, 2.0, 0.1, 1, 0.0).unwrap();
        let w = rho_symplectic_analytic(&flat).unwrap();
        let st = &w.symplectic;
        assert!(((st * st.transpose()) - DMatrix::<f64>::identity(6, 6)).amax() < 1e-14);
        assert!(w.reconstruction_residual(&rho_cov(&flat).unwrap()) < 1e-14);

        let scn = IlluminationScenario::three_mode(0.3, 2.0, 0.1, 1).unwrap();
        let cov = rho_cov(&scn).unwrap();
        let w = rho_symplectic_analytic(&scn).unwrap();
        assert!(w.reconstruction_residual(&cov) < 1e-9);
        assert!(w.symplectic_residual() < 1e-12);
        let numeric = williamson_decompose(&cov).unwrap();
        for (a, b) in w.nu.iter().zip(&numeric.nu) {
            assert!((a - b).abs() < 1e-10);
        }

        let bad = IlluminationScenario::new(0.3, 2.0, 0.1, 1, 1.6).unwrap();
        assert!(matches!(
            rho_symplectic_analytic(&bad),
            Err(QiError::AnalyticDomain(_))
        ));
    }

    #[test]
    fn sigma_reduces_to_rho_without_target() {
        let scn = IlluminationScenario::three_mode(0.3, 2.0, 0.0, 1).unwrap();
        assert_eq!(sigma_cov(&scn).unwrap(), rho_cov(&scn).unwrap());
    }

    #[test]
    fn sigma_full_reflection_carries_signal_correlations() {
        let scn = IlluminationScenario::three_mode(0.3, 0.0, 1.0, 1).unwrap();
        let m = sigma_cov(&scn).unwrap();
        assert_eq!(m[(0, 0)], scn.signal_variance());
        assert_eq!(m[(0, 2)], scn.c);
        assert_eq!(m[(1, 5)], -scn.c);
        // at κ = 1 and N_B = 0 the state is the initial three-mode state
        assert_eq!(m, three_mode_cov(0.3, scn.c).unwrap());
    }

    #[test]
    fn sigma_analytic_at_reference_point() {
        let scn = IlluminationScenario::three_mode(0.1, 20.0, 0.01, 1).unwrap();
        let data = sigma_symplectic_analytic(&scn).unwrap();
        for r in data.mu_identity_residuals() {
            assert!(r < 1e-10, "{:?}", data.mu_identity_residuals());
        }
        let cov = sigma_cov(&scn).unwrap();
        let dec = data.decomposition();
        assert!(dec.reconstruction_residual(&cov) < 1e-9);
        assert!(dec.symplectic_residual() < 1e-9);

        let numeric = symplectic_eigenvalues(&cov).unwrap();
        for (a, b) in dec.nu.iter().zip(&numeric) {
            assert!((a - b).abs() < 1e-9, "{:?} vs {:?}", dec.nu, numeric);
        }
    }

    #[test]
    fn sigma_analytic_perturbative_limit() {
        let scn = IlluminationScenario::three_mode(0.1, 100.0, 1e-6, 1).unwrap();
        let data = sigma_symplectic_analytic(&scn).unwrap();
        let a = scn.return_variance();
        let inner = (scn.signal_variance().powi(2) - scn.c * scn.c).sqrt();
        assert!((data.beta_plus - a).abs() / a < 1e-5);
        assert!((data.beta_minus - inner).abs() / inner < 1e-5);
        assert!((data.beta1 - inner).abs() < 1e-15);
    }

    #[test]
    fn sigma_analytic_domain_failures() {
        // weak background: A - S - C < 0
        let weak = IlluminationScenario::three_mode(1.0, 0.1, 0.2, 1).unwrap();
        assert!(matches!(
            sigma_symplectic_analytic(&weak),
            Err(QiError::AnalyticDomain(_))
        ));
        let no_target = IlluminationScenario::three_mode(0.1, 20.0, 0.0, 1).unwrap();
        assert!(matches!(
            sigma_symplectic_analytic(&no_target),
            Err(QiError::AnalyticDomain(_))
        ));
    }

    #[test]
    fn scenario_validation() {
        assert!(IlluminationScenario::new(-0.1, 1.0, 0.1, 1, 0.0).is_err());
        assert!(IlluminationScenario::new(0.1, 1.0, 1.1, 1, 0.0).is_err());
        assert!(IlluminationScenario::new(0.1, 1.0, 0.1, 0, 0.0).is_err());
        let too_big = IlluminationScenario::new(0.1, 1.0, 0.1, 1, 1.0).unwrap();
        assert!(matches!(
            rho_cov(&too_big),
            Err(QiError::CorrelationTooLarge { .. })
        ));
        // C_q is allowed for two-mode but exceeds the three-mode maximum
        let two = IlluminationScenario::two_mode(0.1, 1.0, 0.1, 1).unwrap();
        assert!(two_mode_sigma_cov(&two).is_ok());
        assert!(sigma_cov(&two).is_err());
    }
}
