//! Truncated Fock-space oracle.
//!
//! Every state used here has a real density matrix in the number basis, so
//! operators are stored as real symmetric matrices. Two-mode operators use
//! the index `n1 * (cutoff + 1) + n2`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;

use crate::error::{invalid, QiError, Result};
use crate::symplectic::max_abs_diff;

/// Largest matrix side the oracle will build.
pub const DIMENSION_CAP: usize = 4096;
/// Eigenvalues between this and zero are floored, anything lower is an error.
pub const EIGEN_FLOOR: f64 = -1e-10;
/// Tail bound the two-mode oracle accepts.
pub const TAIL_BUDGET: f64 = 1e-8;

const HERMITIAN_TOL: f64 = 1e-12;

#[derive(Clone, PartialEq)]
pub struct FockOperator {
    modes: usize,
    cutoff: usize,
    matrix: DMatrix<f64>,
    tail_bound: f64,
}

impl std::fmt::Debug for FockOperator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FockOperator")
            .field("modes", &self.modes)
            .field("cutoff", &self.cutoff)
            .field("tail_bound", &self.tail_bound)
            .finish_non_exhaustive()
    }
}

/// Side length of the operator for `modes` modes at `cutoff`, or a cap error.
pub fn fock_dimension(modes: usize, cutoff: usize) -> Result<usize> {
    let side = cutoff.checked_add(1).ok_or(QiError::DimensionCap {
        dim: usize::MAX,
        cap: DIMENSION_CAP,
    })?;
    let mut dim = 1usize;
    for _ in 0..modes {
        dim = dim.saturating_mul(side);
    }
    if dim > DIMENSION_CAP {
        return Err(QiError::DimensionCap {
            dim,
            cap: DIMENSION_CAP,
        });
    }
    Ok(dim)
}

impl FockOperator {
    /// Wraps a matrix, checking its shape, the dimension cap and symmetry.
    /// `tail_bound` is the analytic bound on the weight lost to truncation.
    pub fn new(modes: usize, cutoff: usize, matrix: DMatrix<f64>, tail_bound: f64) -> Result<Self> {
        if modes == 0 {
            return Err(invalid("a Fock operator needs at least one mode"));
        }
        let dim = fock_dimension(modes, cutoff)?;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(invalid(format!(
                "expected a {dim}x{dim} matrix, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let asym = max_abs_diff(&matrix, &matrix.transpose());
        if !(asym <= HERMITIAN_TOL) {
            return Err(QiError::NotSymmetric(asym));
        }
        if !(tail_bound >= 0.0) {
            return Err(invalid(format!(
                "tail bound must be >= 0, got {tail_bound}"
            )));
        }
        Ok(Self {
            modes,
            cutoff,
            matrix,
            tail_bound,
        })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace()
    }

    /// Checks the density-operator invariants: unit trace within the tail
    /// bound and no eigenvalue below [`EIGEN_FLOOR`].
    pub fn check_density(&self) -> Result<()> {
        let deficit = (1.0 - self.trace()).abs();
        if deficit > self.tail_bound + 1e-12 {
            return Err(QiError::TruncationBudget {
                bound: deficit,
                budget: self.tail_bound,
            });
        }
        Spectrum::of(self).map(|_| ())
    }

    /// `self ⊗ other`.
    pub fn tensor(&self, other: &FockOperator) -> Result<FockOperator> {
        if self.cutoff != other.cutoff {
            return Err(invalid("tensor factors must share a cutoff"));
        }
        let modes = self.modes + other.modes;
        fock_dimension(modes, self.cutoff)?;
        FockOperator::new(
            modes,
            self.cutoff,
            self.matrix.kronecker(&other.matrix),
            self.tail_bound + other.tail_bound,
        )
    }

    /// Reduced operator of one mode of a two-mode operator.
    pub fn reduce_to(&self, keep: usize) -> Result<FockOperator> {
        if self.modes != 2 || keep > 1 {
            return Err(invalid(
                "reduce_to needs a two-mode operator and keep in {0, 1}",
            ));
        }
        let d = self.cutoff + 1;
        let mut out = DMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                let mut acc = 0.0;
                for t in 0..d {
                    acc += if keep == 0 {
                        self.matrix[(i * d + t, j * d + t)]
                    } else {
                        self.matrix[(t * d + i, t * d + j)]
                    };
                }
                out[(i, j)] = acc;
            }
        }
        FockOperator::new(1, self.cutoff, out, self.tail_bound)
    }

    /// Quadrature means and covariance of a two-mode operator with
    /// `x = a + a†`, `p = -i(a - a†)`. For a real density matrix every mixed
    /// `x`/`p` moment vanishes.
    pub fn quadrature_moments(&self) -> Result<(DVector<f64>, DMatrix<f64>)> {
        if self.modes != 2 {
            return Err(invalid("quadrature moments are implemented for two modes"));
        }
        let d = self.cutoff + 1;
        let a = annihilation(d);
        let x = &a + a.transpose();
        // p = -i q with q = a - a†; products of two p's pick up -1
        let q = &a - a.transpose();
        let id = DMatrix::identity(d, d);
        let expect = |ra: &DMatrix<f64>, rb: &DMatrix<f64>| self.expect_product(ra, rb);

        let mut mean = DVector::zeros(4);
        mean[0] = expect(&x, &id);
        mean[2] = expect(&id, &x);
        let mut cov = DMatrix::zeros(4, 4);
        cov[(0, 0)] = expect(&(&x * &x), &id) - mean[0] * mean[0];
        cov[(1, 1)] = -expect(&(&q * &q), &id);
        cov[(2, 2)] = expect(&id, &(&x * &x)) - mean[2] * mean[2];
        cov[(3, 3)] = -expect(&id, &(&q * &q));
        cov[(0, 2)] = expect(&x, &x) - mean[0] * mean[2];
        cov[(2, 0)] = cov[(0, 2)];
        cov[(1, 3)] = -expect(&q, &q);
        cov[(3, 1)] = cov[(1, 3)];
        Ok((mean, cov))
    }

    fn expect_product(&self, ra: &DMatrix<f64>, rb: &DMatrix<f64>) -> f64 {
        let d = self.cutoff + 1;
        let mut acc = 0.0;
        for k in 0..d {
            for i in 0..d {
                let aki = ra[(k, i)];
                if aki == 0.0 {
                    continue;
                }
                for l in 0..d {
                    for j in 0..d {
                        let blj = rb[(l, j)];
                        if blj != 0.0 {
                            acc += self.matrix[(i * d + j, k * d + l)] * aki * blj;
                        }
                    }
                }
            }
        }
        acc
    }
}

fn annihilation(d: usize) -> DMatrix<f64> {
    let mut a = DMatrix::zeros(d, d);
    for n in 1..d {
        a[(n - 1, n)] = (n as f64).sqrt();
    }
    a
}

fn check_photons(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(invalid(format!("{name} must be finite and >= 0, got {v}")))
    }
}

/// Probability of `n` photons in a thermal state, and its geometric tail
/// beyond `cutoff`.
fn thermal_weights(nbar: f64, cutoff: usize) -> (Vec<f64>, f64) {
    let ratio = nbar / (nbar + 1.0);
    let mut w = Vec::with_capacity(cutoff + 1);
    let mut p = 1.0 / (nbar + 1.0);
    for _ in 0..=cutoff {
        w.push(p);
        p *= ratio;
    }
    (w, ratio.powi(cutoff as i32 + 1))
}

pub fn thermal_fock(nbar: f64, cutoff: usize) -> Result<FockOperator> {
    check_photons("nbar", nbar)?;
    fock_dimension(1, cutoff)?;
    let (w, tail) = thermal_weights(nbar, cutoff);
    FockOperator::new(
        1,
        cutoff,
        DMatrix::from_diagonal(&DVector::from_vec(w)),
        tail,
    )
}

fn tmsv_amplitudes(n_s: f64, cutoff: usize) -> (Vec<f64>, f64) {
    let (w, tail) = thermal_weights(n_s, cutoff);
    (w.into_iter().map(f64::sqrt).collect(), tail)
}

/// Two-mode squeezed vacuum `Σ ψ_n |n, n⟩` as a rank-one density matrix.
pub fn tmsv_fock(n_s: f64, cutoff: usize) -> Result<FockOperator> {
    check_photons("N_S", n_s)?;
    let dim = fock_dimension(2, cutoff)?;
    let d = cutoff + 1;
    let (amp, tail) = tmsv_amplitudes(n_s, cutoff);
    let mut psi = DVector::zeros(dim);
    for (n, a) in amp.iter().enumerate() {
        psi[n * d + n] = *a;
    }
    FockOperator::new(2, cutoff, &psi * psi.transpose(), tail)
}

/// `exp[θ(a_S†a_B − a_S a_B†)]` restricted to `N` total photons, in the
/// basis `|j, N − j⟩` indexed by the signal count `j`.
fn beamsplitter_block(total: usize, theta: f64) -> DMatrix<f64> {
    let n = total;
    let mut g = DMatrix::zeros(n + 1, n + 1);
    for j in 0..n {
        let amp = (((j + 1) * (n - j)) as f64).sqrt();
        g[(j + 1, j)] = theta * amp;
        g[(j, j + 1)] = -theta * amp;
    }
    g.exp()
}

/// Two-mode target-present state (return, idler): the signal arm of a TMSV
/// is mixed with thermal background `N_B / (1 − κ)` on a beamsplitter of
/// transmissivity `κ` and the background port is discarded.
pub fn beamsplitter_sigma_fock(
    n_s: f64,
    n_b: f64,
    kappa: f64,
    cutoff: usize,
) -> Result<FockOperator> {
    check_photons("N_S", n_s)?;
    check_photons("N_B", n_b)?;
    if !(0.0..=1.0).contains(&kappa) {
        return Err(invalid(format!("kappa must lie in [0, 1], got {kappa}")));
    }
    let dim = fock_dimension(2, cutoff)?;
    if kappa == 1.0 {
        if n_b > 0.0 {
            return Err(invalid(
                "kappa = 1 with N_B > 0 needs an infinitely bright background",
            ));
        }
        return tmsv_fock(n_s, cutoff);
    }
    let d = cutoff + 1;
    let (psi, tail_s) = tmsv_amplitudes(n_s, cutoff);
    let n_bg = n_b / (1.0 - kappa);
    let (t, tail_b) = thermal_weights(n_bg, cutoff);
    let theta = kappa.sqrt().acos();
    let blocks: Vec<DMatrix<f64>> = (0..=2 * cutoff)
        .map(|n| beamsplitter_block(n, theta))
        .collect();

    // <r| Tr_B[U |n,k><m,k| U†] |r'> is nonzero only for r' = r + m − n
    let mut out = DMatrix::zeros(dim, dim);
    for n in 0..d {
        for m in 0..d {
            let weight = psi[n] * psi[m];
            for r in 0..d {
                let rp = r + m;
                if rp < n || rp - n >= d {
                    continue;
                }
                let rp = rp - n;
                let mut acc = 0.0;
                for (k, tk) in t.iter().enumerate() {
                    if r > n + k || rp > m + k {
                        continue;
                    }
                    acc += tk * blocks[n + k][(r, n)] * blocks[m + k][(rp, m)];
                }
                out[(r * d + n, rp * d + m)] = weight * acc;
            }
        }
    }
    out = (&out + out.transpose()) * 0.5;
    let return_tail = thermal_weights(kappa * n_s + n_b, cutoff).1;
    FockOperator::new(2, cutoff, out, tail_s + tail_b + return_tail)
}

/// Eigen-decomposition of a density operator with the negativity floor
/// applied.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub values: DVector<f64>,
    pub vectors: DMatrix<f64>,
}

/// Symmetric eigendecomposition. nalgebra's implicit QR can return NaN for
/// matrices with a large exact null space (rank-one pure states), so on a
/// non-finite result the spectrum is shifted away from zero and restored.
fn symmetric_eigen(m: &DMatrix<f64>) -> Result<SymmetricEigen<f64, nalgebra::Dyn>> {
    let eig = SymmetricEigen::new(m.clone());
    if eig
        .eigenvalues
        .iter()
        .chain(eig.eigenvectors.iter())
        .all(|v| v.is_finite())
    {
        return Ok(eig);
    }
    let n = m.nrows();
    let shift = m.amax().max(1.0);
    let mut eig = SymmetricEigen::new(m + DMatrix::identity(n, n) * shift);
    eig.eigenvalues.add_scalar_mut(-shift);
    if eig
        .eigenvalues
        .iter()
        .chain(eig.eigenvectors.iter())
        .all(|v| v.is_finite())
    {
        Ok(eig)
    } else {
        Err(QiError::NumericalBreakdown(
            "symmetric eigensolver returned NaN".into(),
        ))
    }
}

impl Spectrum {
    pub fn of(op: &FockOperator) -> Result<Self> {
        let eig = symmetric_eigen(&op.matrix)?;
        let worst = eig.eigenvalues.min();
        if worst < EIGEN_FLOOR {
            return Err(QiError::NegativeEigenvalue(worst));
        }
        Ok(Self {
            values: eig.eigenvalues.map(|v| v.max(0.0)),
            vectors: eig.eigenvectors,
        })
    }
}

fn pow0(x: f64, p: f64) -> f64 {
    if x > 0.0 {
        x.powf(p)
    } else {
        0.0
    }
}

/// Precomputed data for evaluating `Tr[a^s b^(1−s)]` at many `s`.
#[derive(Debug, Clone)]
pub struct TracePowerPair {
    a: DVector<f64>,
    b: DVector<f64>,
    overlap2: DMatrix<f64>,
}

impl TracePowerPair {
    pub fn new(a: &FockOperator, b: &FockOperator) -> Result<Self> {
        if a.dim() != b.dim() {
            return Err(invalid(format!(
                "dimension mismatch: {} vs {}",
                a.dim(),
                b.dim()
            )));
        }
        let sa = Spectrum::of(a)?;
        let sb = Spectrum::of(b)?;
        let overlap2 = (sa.vectors.transpose() * &sb.vectors).map(|w| w * w);
        Ok(Self {
            a: sa.values,
            b: sb.values,
            overlap2,
        })
    }

    pub fn evaluate(&self, s: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&s) {
            return Err(invalid(format!("s must lie in [0, 1], got {s}")));
        }
        let pa = self.a.map(|v| pow0(v, s));
        let pb = self.b.map(|v| pow0(v, 1.0 - s));
        Ok((pa.transpose() * &self.overlap2 * pb)[(0, 0)])
    }
}

pub fn trace_power_product(a: &FockOperator, b: &FockOperator, s: f64) -> Result<f64> {
    TracePowerPair::new(a, b)?.evaluate(s)
}

/// Minimum single-copy error `½(1 − ½‖a − b‖₁)` for equal priors.
pub fn helstrom_single_copy(a: &FockOperator, b: &FockOperator) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(invalid(format!(
            "dimension mismatch: {} vs {}",
            a.dim(),
            b.dim()
        )));
    }
    Spectrum::of(a)?;
    Spectrum::of(b)?;
    let diff = symmetric_eigen(&(&a.matrix - &b.matrix))?.eigenvalues;
    let norm: f64 = diff.iter().map(|v| v.abs()).sum();
    Ok(0.5 * (1.0 - 0.5 * norm))
}

/// The target-absent and target-present two-mode states at one cutoff.
#[derive(Debug, Clone)]
pub struct TwoModeOracle {
    pub rho: FockOperator,
    pub sigma: FockOperator,
    pair: TracePowerPair,
}

impl TwoModeOracle {
    pub fn new(n_s: f64, n_b: f64, kappa: f64, cutoff: usize) -> Result<Self> {
        Self::with_budget(n_s, n_b, kappa, cutoff, TAIL_BUDGET)
    }

    /// As [`TwoModeOracle::new`] with a caller-chosen tail budget, for
    /// truncation studies at deliberately small cutoffs.
    pub fn with_budget(n_s: f64, n_b: f64, kappa: f64, cutoff: usize, budget: f64) -> Result<Self> {
        let sigma = beamsplitter_sigma_fock(n_s, n_b, kappa, cutoff)?;
        let rho = thermal_fock(n_b, cutoff)?.tensor(&thermal_fock(n_s, cutoff)?)?;
        let bound = rho.tail_bound().max(sigma.tail_bound());
        if bound > budget {
            return Err(QiError::TruncationBudget { bound, budget });
        }
        let pair = TracePowerPair::new(&rho, &sigma)?;
        Ok(Self { rho, sigma, pair })
    }

    pub fn tail_bound(&self) -> f64 {
        self.rho.tail_bound().max(self.sigma.tail_bound())
    }

    pub fn q_s(&self, s: f64) -> Result<f64> {
        self.pair.evaluate(s)
    }

    pub fn helstrom(&self) -> Result<f64> {
        helstrom_single_copy(&self.rho, &self.sigma)
    }
}

/// `Tr[ρ^s σ^(1−s)]` for the two-mode illumination pair.
pub fn oracle_qs_two_mode(n_s: f64, n_b: f64, kappa: f64, s: f64, cutoff: usize) -> Result<f64> {
    TwoModeOracle::new(n_s, n_b, kappa, cutoff)?.q_s(s)
}

/// One row of an oracle comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleRow {
    pub s: f64,
    pub gaussian: f64,
    pub oracle: f64,
    pub relative_gap: f64,
    pub tail_bound: f64,
    pub flagged: bool,
}

impl OracleRow {
    pub fn new(s: f64, gaussian: f64, oracle: f64, tail_bound: f64) -> Self {
        let relative_gap = (gaussian - oracle).abs() / gaussian.abs().max(f64::MIN_POSITIVE);
        Self {
            s,
            gaussian,
            oracle,
            relative_gap,
            tail_bound,
            flagged: (gaussian - oracle).abs() > 10.0 * tail_bound.max(f64::EPSILON),
        }
    }
}
