//! Gaussian-state quantum illumination.
//!
//! * [`symplectic`]: covariance matrices, symplectic spectra, Williamson
//!   decomposition, partial transpose and logarithmic negativity.
//! * [`states`]: the two- and three-mode signal/idler covariance builders and
//!   their closed-form symplectic data.
//! * [`bounds`]: the n-mode Gaussian Chernoff/Bhattacharyya engine and the
//!   illumination error exponents.
//! * [`fock`]: brute-force truncated Fock-space oracle for the two-mode case.

// `!(x >= lo)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod error;
pub mod fock;
pub mod numeric;
pub mod states;
pub mod symplectic;

pub use bounds::{
    bhattacharyya_bound, chernoff_bound, coherent_qb, find_crossover, gamma2, gamma3, q_s,
    ratio_sweep, BoundResult, ExponentComparison, IlluminationModel, QsEvaluation,
};
pub use error::{QiError, Result};
pub use states::{AnalyticAgreement, IlluminationScenario, SigmaSymplecticData};
pub use symplectic::{Bipartition, CovarianceMatrix, GaussianState, WilliamsonDecomposition};
