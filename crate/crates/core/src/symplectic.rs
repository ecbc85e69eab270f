//! Mode-count-generic symplectic linear algebra.
//!
//! Covariance matrices use the interleaved quadrature ordering
//! `(x1, p1, ..., xn, pn)` and the vacuum-variance-one convention, so a
//! thermal mode with mean photon number `n` has diagonal entries `2n + 1`.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::Index;

use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};

use crate::error::{invalid, QiError, Result};

/// Absolute tolerance on `|M - M^T|` for a matrix to count as symmetric.
pub const SYMMETRY_TOL: f64 = 1e-12;
/// Leading principal minors must exceed this to count as positive definite.
pub const MINOR_TOL: f64 = 1e-12;
/// Symplectic eigenvalues may undershoot 1 by this much and still be physical.
pub const PHYSICAL_TOL: f64 = 1e-9;
/// Relative tolerance under which two symplectic eigenvalues are one cluster.
pub const PAIRING_TOL: f64 = 1e-9;

/// Real symmetric `2n x 2n` quadrature covariance matrix.
#[derive(Clone, PartialEq)]
pub struct CovarianceMatrix {
    modes: usize,
    entries: DMatrix<f64>,
}

impl CovarianceMatrix {
    /// Wraps a matrix after checking shape, finiteness and symmetry.
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        let dim = entries.nrows();
        if dim == 0 || !dim.is_multiple_of(2) || entries.ncols() != dim {
            return Err(invalid(format!(
                "covariance must be square with even dimension, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(invalid("covariance has non-finite entries"));
        }
        let asym = max_asymmetry(&entries);
        if asym > SYMMETRY_TOL {
            return Err(QiError::NotSymmetric(asym));
        }
        Ok(Self {
            modes: dim / 2,
            entries,
        })
    }

    /// Builds from row-major entries of a `2n x 2n` matrix.
    pub fn from_row_slice(modes: usize, data: &[f64]) -> Result<Self> {
        let dim = 2 * modes;
        if data.len() != dim * dim {
            return Err(invalid(format!(
                "expected {} entries for {} modes, got {}",
                dim * dim,
                modes,
                data.len()
            )));
        }
        Self::new(DMatrix::from_row_slice(dim, dim, data))
    }

    /// Symmetrizes `(M + M^T) / 2` before wrapping. Useful for matrices built
    /// by congruence, which are symmetric only up to rounding.
    pub fn symmetrized(entries: DMatrix<f64>) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(invalid("covariance must be square"));
        }
        let sym = (&entries + entries.transpose()) * 0.5;
        Self::new(sym)
    }

    pub fn vacuum(modes: usize) -> Self {
        Self {
            modes,
            entries: DMatrix::identity(2 * modes, 2 * modes),
        }
    }

    /// Single-mode thermal state with mean photon number `nbar`.
    pub fn thermal(nbar: f64) -> Result<Self> {
        if !(nbar >= 0.0) || !nbar.is_finite() {
            return Err(invalid(format!(
                "thermal photon number must be >= 0, got {nbar}"
            )));
        }
        let v = 2.0 * nbar + 1.0;
        Ok(Self {
            modes: 1,
            entries: DMatrix::from_diagonal_element(2, 2, v),
        })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn dim(&self) -> usize {
        2 * self.modes
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.entries
    }

    /// Block-diagonal direct sum `self ⊕ other`.
    pub fn direct_sum(&self, other: &CovarianceMatrix) -> CovarianceMatrix {
        let (a, b) = (self.dim(), other.dim());
        let mut m = DMatrix::zeros(a + b, a + b);
        m.view_mut((0, 0), (a, a)).copy_from(&self.entries);
        m.view_mut((a, a), (b, b)).copy_from(&other.entries);
        CovarianceMatrix {
            modes: self.modes + other.modes,
            entries: m,
        }
    }

    /// Applies the congruence `S Λ S^T` and re-symmetrizes.
    pub fn congruence(&self, s: &DMatrix<f64>) -> Result<CovarianceMatrix> {
        if s.nrows() != self.dim() || s.ncols() != self.dim() {
            return Err(invalid("congruence matrix has the wrong shape"));
        }
        Self::symmetrized(s * &self.entries * s.transpose())
    }

    /// Largest absolute entrywise difference.
    pub fn max_abs_diff(&self, other: &CovarianceMatrix) -> f64 {
        max_abs_diff(&self.entries, &other.entries)
    }

    pub fn determinant(&self) -> f64 {
        self.entries.clone().determinant()
    }

    /// Checks positive definiteness through the leading principal minors.
    pub fn check_positive_definite(&self) -> Result<()> {
        for k in 1..=self.dim() {
            let minor = self
                .entries
                .view((0, 0), (k, k))
                .clone_owned()
                .determinant();
            if !(minor > MINOR_TOL) {
                return Err(QiError::NotPositiveDefinite {
                    index: k,
                    value: minor,
                });
            }
        }
        Ok(())
    }

    pub fn symplectic_eigenvalues(&self) -> Result<Vec<f64>> {
        symplectic_eigenvalues(self)
    }

    /// Errors unless every symplectic eigenvalue is at least `1 - PHYSICAL_TOL`.
    pub fn check_bona_fide(&self) -> Result<()> {
        let nu = symplectic_eigenvalues(self)?;
        let min = nu.iter().copied().fold(f64::INFINITY, f64::min);
        if min < 1.0 - PHYSICAL_TOL {
            return Err(QiError::Unphysical(min));
        }
        Ok(())
    }

    pub fn is_bona_fide(&self) -> bool {
        self.check_bona_fide().is_ok()
    }
}

impl Index<(usize, usize)> for CovarianceMatrix {
    type Output = f64;

    fn index(&self, idx: (usize, usize)) -> &f64 {
        &self.entries[idx]
    }
}

impl fmt::Debug for CovarianceMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CovarianceMatrix")
            .field("modes", &self.modes)
            .field("entries", &self.entries)
            .finish()
    }
}

/// A Gaussian state: mean quadrature vector plus covariance matrix.
///
/// A coherent amplitude `α` corresponds to `<x> = 2 Re α`, `<p> = 2 Im α`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    cov: CovarianceMatrix,
    mean: DVector<f64>,
}

impl GaussianState {
    pub fn new(cov: CovarianceMatrix, mean: DVector<f64>) -> Result<Self> {
        if mean.len() != cov.dim() {
            return Err(invalid(format!(
                "mean has length {}, expected {}",
                mean.len(),
                cov.dim()
            )));
        }
        if mean.iter().any(|v| !v.is_finite()) {
            return Err(invalid("mean has non-finite entries"));
        }
        Ok(Self { cov, mean })
    }

    pub fn zero_mean(cov: CovarianceMatrix) -> Self {
        let dim = cov.dim();
        Self {
            cov,
            mean: DVector::zeros(dim),
        }
    }

    pub fn cov(&self) -> &CovarianceMatrix {
        &self.cov
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn modes(&self) -> usize {
        self.cov.modes()
    }
}

/// `S` and the symplectic spectrum with `Λ = S (⊕ ν_j 1_2) S^T`.
#[derive(Debug, Clone, PartialEq)]
pub struct WilliamsonDecomposition {
    pub symplectic: DMatrix<f64>,
    pub nu: Vec<f64>,
}

impl WilliamsonDecomposition {
    pub fn modes(&self) -> usize {
        self.nu.len()
    }

    /// `S D S^T` with `D = ⊕ d_j 1_2` for arbitrary per-mode weights `d`.
    pub fn congruence_with(&self, weights: &[f64]) -> DMatrix<f64> {
        assert_eq!(weights.len(), self.nu.len(), "one weight per mode");
        let mut scaled = self.symplectic.clone();
        for (j, w) in weights.iter().enumerate() {
            scaled.column_mut(2 * j).scale_mut(*w);
            scaled.column_mut(2 * j + 1).scale_mut(*w);
        }
        scaled * self.symplectic.transpose()
    }

    pub fn reconstruct(&self) -> DMatrix<f64> {
        self.congruence_with(&self.nu)
    }

    /// `max |S Ω S^T - Ω|`.
    pub fn symplectic_residual(&self) -> f64 {
        let omega = symplectic_form(self.modes());
        max_abs_diff(
            &(&self.symplectic * &omega * self.symplectic.transpose()),
            &omega,
        )
    }

    /// `max |S D S^T - Λ|`.
    pub fn reconstruction_residual(&self, cov: &CovarianceMatrix) -> f64 {
        max_abs_diff(&self.reconstruct(), cov.entries())
    }

    /// Reorders the mode blocks so `nu` is non-increasing.
    pub fn sorted_descending(self) -> Self {
        let n = self.nu.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| self.nu[b].total_cmp(&self.nu[a]));
        let mut symplectic = DMatrix::zeros(2 * n, 2 * n);
        for (dst, &src) in order.iter().enumerate() {
            symplectic
                .column_mut(2 * dst)
                .copy_from(&self.symplectic.column(2 * src));
            symplectic
                .column_mut(2 * dst + 1)
                .copy_from(&self.symplectic.column(2 * src + 1));
        }
        let nu = order.iter().map(|&i| self.nu[i]).collect();
        Self { symplectic, nu }
    }
}

/// Set of modes whose momenta are sign-flipped by the partial transpose.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bipartition {
    transposed: BTreeSet<usize>,
    modes: usize,
}

impl Bipartition {
    /// `transposed` must be a nonempty proper subset of `0..modes`.
    pub fn new(transposed: impl IntoIterator<Item = usize>, modes: usize) -> Result<Self> {
        let transposed: BTreeSet<usize> = transposed.into_iter().collect();
        if transposed.is_empty() {
            return Err(invalid("bipartition needs at least one transposed mode"));
        }
        if transposed.len() >= modes {
            return Err(invalid("bipartition must be a proper subset of the modes"));
        }
        if let Some(&m) = transposed.iter().find(|&&m| m >= modes) {
            return Err(invalid(format!("mode {m} out of range for {modes} modes")));
        }
        Ok(Self { transposed, modes })
    }

    pub fn transposed_modes(&self) -> impl Iterator<Item = usize> + '_ {
        self.transposed.iter().copied()
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn contains(&self, mode: usize) -> bool {
        self.transposed.contains(&mode)
    }

    /// Every single-mode-versus-rest split of an `n`-mode system.
    pub fn single_mode_splits(modes: usize) -> Vec<Bipartition> {
        (0..modes)
            .map(|m| Bipartition::new([m], modes).expect("valid single-mode split"))
            .collect()
    }
}

/// Standard form `Ω = ⊕ [[0, 1], [-1, 0]]`.
pub fn symplectic_form(n: usize) -> DMatrix<f64> {
    let mut omega = DMatrix::zeros(2 * n, 2 * n);
    for j in 0..n {
        omega[(2 * j, 2 * j + 1)] = 1.0;
        omega[(2 * j + 1, 2 * j)] = -1.0;
    }
    omega
}

/// Symplectic eigenvalues, one per mode, sorted descending.
pub fn symplectic_eigenvalues(cov: &CovarianceMatrix) -> Result<Vec<f64>> {
    Ok(SymplecticSpectrum::compute(cov)?.positive_eigenvalues())
}

/// Numeric Williamson decomposition.
///
/// Diagonalizes the Hermitian matrix `i Λ^{1/2} Ω Λ^{1/2}`, whose spectrum is
/// `±ν_j`. Inside each cluster of (near-)degenerate eigenvalues the real
/// invariant subspace is spanned canonically: the coordinate axis with the
/// largest projection onto the still-unused part of the subspace seeds the
/// `x` column of the next pair, and the partner column follows from the
/// antisymmetric generator. Ties go to the lowest axis. A state already in
/// Williamson normal form therefore decomposes with `S = 1`.
pub fn williamson_decompose(cov: &CovarianceMatrix) -> Result<WilliamsonDecomposition> {
    let spec = SymplecticSpectrum::compute(cov)?;
    let n = cov.modes();
    let dim = 2 * n;
    let nu_raw = spec.positive_eigenvalues();

    // group consecutive eigenvalues (already descending) into clusters
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for (idx, &v) in nu_raw.iter().enumerate() {
        match clusters.last_mut() {
            Some(cl) if (nu_raw[cl[0]] - v).abs() <= PAIRING_TOL * nu_raw[cl[0]].max(1.0) => {
                cl.push(idx)
            }
            _ => clusters.push(vec![idx]),
        }
    }

    let mut columns: Vec<(DVector<f64>, DVector<f64>, f64)> = Vec::with_capacity(n);
    for cluster in &clusters {
        // orthonormal real basis of the cluster's invariant subspace
        let mut basis: Vec<DVector<f64>> = Vec::with_capacity(2 * cluster.len());
        for &idx in cluster {
            let w = spec.eigenvector(idx);
            let re = w.map(|z| z.re * std::f64::consts::SQRT_2);
            let im = w.map(|z| -z.im * std::f64::consts::SQRT_2);
            basis.push(re);
            basis.push(im);
        }
        orthonormalize(&mut basis)?;

        let mut local: Vec<DVector<f64>> = Vec::with_capacity(basis.len());
        for _ in 0..cluster.len() {
            let mut best: Option<(f64, DVector<f64>)> = None;
            for axis in 0..dim {
                let mut cand = DVector::zeros(dim);
                for b in &basis {
                    cand.axpy(b[axis], b, 1.0);
                }
                for o in &local {
                    let proj = o.dot(&cand);
                    cand.axpy(-proj, o, 1.0);
                }
                let weight = cand.norm_squared();
                let better = match &best {
                    None => true,
                    Some((w, _)) => weight > *w + PAIRING_TOL,
                };
                if better {
                    best = Some((weight, cand));
                }
            }
            let (weight, cand) = best.expect("dim > 0");
            if weight < 1e-6 {
                return Err(QiError::Pairing(format!(
                    "degenerate cluster near nu = {} exhausted",
                    nu_raw[cluster[0]]
                )));
            }
            let o1 = cand / weight.sqrt();
            let k1 = &spec.generator * &o1;
            let norm = k1.norm();
            if !(norm > 0.0) {
                return Err(QiError::Pairing("vanishing generator image".into()));
            }
            let mut o2 = -k1 / norm;
            for o in local.iter().chain(std::iter::once(&o1)) {
                let proj = o.dot(&o2);
                o2.axpy(-proj, o, 1.0);
            }
            let n2 = o2.norm();
            if n2 < 0.5 {
                return Err(QiError::Pairing(format!(
                    "partner vector collapsed near nu = {}",
                    nu_raw[cluster[0]]
                )));
            }
            o2 /= n2;
            // K o2 = ν o1 for an exact pair
            let nu = o1.dot(&(&spec.generator * &o2));
            local.push(o1.clone());
            local.push(o2.clone());
            columns.push((o1, o2, nu));
        }
    }

    let mut symplectic = DMatrix::zeros(dim, dim);
    let mut nu = Vec::with_capacity(n);
    for (j, (o1, o2, v)) in columns.into_iter().enumerate() {
        if !(v > 0.0) {
            return Err(QiError::Pairing(format!("non-positive pair value {v}")));
        }
        let scale = 1.0 / v.sqrt();
        symplectic.set_column(2 * j, &(&spec.sqrt_cov * o1 * scale));
        symplectic.set_column(2 * j + 1, &(&spec.sqrt_cov * o2 * scale));
        nu.push(v);
    }
    Ok(WilliamsonDecomposition { symplectic, nu })
}

/// Flips the sign of every momentum row and column of the transposed modes.
pub fn partial_transpose(cov: &CovarianceMatrix, part: &Bipartition) -> Result<CovarianceMatrix> {
    if part.modes() != cov.modes() {
        return Err(invalid(format!(
            "bipartition is over {} modes, covariance has {}",
            part.modes(),
            cov.modes()
        )));
    }
    let dim = cov.dim();
    let sign: Vec<f64> = (0..dim)
        .map(|i| {
            if i % 2 == 1 && part.contains(i / 2) {
                -1.0
            } else {
                1.0
            }
        })
        .collect();
    let entries = DMatrix::from_fn(dim, dim, |i, j| {
        let v = cov.entries[(i, j)];
        if sign[i] * sign[j] < 0.0 {
            -v
        } else {
            v
        }
    });
    Ok(CovarianceMatrix {
        modes: cov.modes(),
        entries,
    })
}

/// Logarithmic negativity `Σ_{ν̃ < 1} -log2 ν̃` over the partially transposed spectrum.
pub fn log_negativity(cov: &CovarianceMatrix, part: &Bipartition) -> Result<f64> {
    let pt = partial_transpose(cov, part)?;
    let nu = symplectic_eigenvalues(&pt)?;
    Ok(nu
        .iter()
        .filter(|&&v| v < 1.0)
        .map(|&v| -v.log2())
        .sum::<f64>()
        .max(0.0))
}

/// True iff every symplectic eigenvalue is within `PHYSICAL_TOL` of 1.
pub fn is_pure(cov: &CovarianceMatrix) -> Result<bool> {
    let nu = symplectic_eigenvalues(cov)?;
    Ok(nu.iter().all(|v| (v - 1.0).abs() <= PHYSICAL_TOL))
}

/// Phase rotation by `theta` on one mode of an `n`-mode system.
pub fn phase_rotation(n: usize, mode: usize, theta: f64) -> DMatrix<f64> {
    let mut s = DMatrix::identity(2 * n, 2 * n);
    let (sin, cos) = theta.sin_cos();
    let i = 2 * mode;
    s[(i, i)] = cos;
    s[(i, i + 1)] = sin;
    s[(i + 1, i)] = -sin;
    s[(i + 1, i + 1)] = cos;
    s
}

/// Single-mode squeezer `diag(e^{-r}, e^{r})` on one mode.
pub fn squeezer(n: usize, mode: usize, r: f64) -> DMatrix<f64> {
    let mut s = DMatrix::identity(2 * n, 2 * n);
    s[(2 * mode, 2 * mode)] = (-r).exp();
    s[(2 * mode + 1, 2 * mode + 1)] = r.exp();
    s
}

/// Beamsplitter with transmissivity `cos^2 theta` between modes `a` and `b`.
pub fn beamsplitter(n: usize, a: usize, b: usize, theta: f64) -> DMatrix<f64> {
    let mut s = DMatrix::identity(2 * n, 2 * n);
    let (sin, cos) = theta.sin_cos();
    for q in 0..2 {
        let (i, j) = (2 * a + q, 2 * b + q);
        s[(i, i)] = cos;
        s[(i, j)] = sin;
        s[(j, i)] = -sin;
        s[(j, j)] = cos;
    }
    s
}

pub(crate) fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn max_asymmetry(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

/// Symmetric square root of a symmetric positive definite matrix.
pub(crate) fn sqrt_spd(m: &DMatrix<f64>) -> DMatrix<f64> {
    let eig = SymmetricEigen::new(m.clone());
    let roots = eig.eigenvalues.map(|v| v.max(0.0).sqrt());
    let q = &eig.eigenvectors;
    let mut scaled = q.clone();
    for (j, r) in roots.iter().enumerate() {
        scaled.column_mut(j).scale_mut(*r);
    }
    let out = scaled * q.transpose();
    (&out + out.transpose()) * 0.5
}

fn orthonormalize(vectors: &mut [DVector<f64>]) -> Result<()> {
    for i in 0..vectors.len() {
        let (done, rest) = vectors.split_at_mut(i);
        let v = &mut rest[0];
        for u in done.iter() {
            let proj = u.dot(v);
            v.axpy(-proj, u, 1.0);
        }
        let norm = v.norm();
        if norm < 0.5 {
            return Err(QiError::Pairing(
                "cluster eigenvectors are not linearly independent".into(),
            ));
        }
        *v /= norm;
    }
    Ok(())
}

/// Spectrum of `i Λ^{1/2} Ω Λ^{1/2}` with the pieces needed downstream.
struct SymplecticSpectrum {
    sqrt_cov: DMatrix<f64>,
    generator: DMatrix<f64>,
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<Complex<f64>>,
    // indices of the positive eigenvalues, descending
    positive: Vec<usize>,
}

impl SymplecticSpectrum {
    fn compute(cov: &CovarianceMatrix) -> Result<Self> {
        cov.check_positive_definite()?;
        let n = cov.modes();
        let sqrt_cov = sqrt_spd(cov.entries());
        let k = &sqrt_cov * symplectic_form(n) * &sqrt_cov;
        let generator = (&k - k.transpose()) * 0.5;
        let herm = generator.map(|v| Complex::new(0.0, v));
        let eig = SymmetricEigen::new(herm);
        let eigenvalues: Vec<f64> = eig.eigenvalues.iter().copied().collect();

        let mut order: Vec<usize> = (0..2 * n).collect();
        order.sort_by(|&a, &b| eigenvalues[b].total_cmp(&eigenvalues[a]));
        let positive: Vec<usize> = order[..n].to_vec();
        let negative: Vec<usize> = order[n..].iter().rev().copied().collect();
        for (&p, &q) in positive.iter().zip(&negative) {
            let (lp, lq) = (eigenvalues[p], eigenvalues[q]);
            if !(lp > 0.0) || (lp + lq).abs() > PAIRING_TOL * lp.max(1.0) {
                return Err(QiError::Pairing(format!(
                    "spectrum is not paired: {lp} vs {lq}"
                )));
            }
        }
        Ok(Self {
            sqrt_cov,
            generator,
            eigenvalues,
            eigenvectors: eig.eigenvectors,
            positive,
        })
    }

    fn positive_eigenvalues(&self) -> Vec<f64> {
        self.positive.iter().map(|&i| self.eigenvalues[i]).collect()
    }

    fn eigenvector(&self, rank: usize) -> DVector<Complex<f64>> {
        self.eigenvectors.column(self.positive[rank]).clone_owned()
    }
}
