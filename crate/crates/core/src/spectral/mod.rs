//! Eigensolvers, numerical rank, the Joukowsky transform and eigenvalue
//! multiset comparison.

mod hermitian;
mod joukowsky;
mod multiset;
mod svd;
mod unitary;

use serde::{Deserialize, Serialize};

use crate::linalg::CMatrix;

pub use hermitian::eig_hermitian;
pub use joukowsky::{joukowsky, joukowsky_inverse};
pub use multiset::{
    compare_points, multiset_compare, single_linkage, EigenMultiset, MatchReport, MatchedPair, MultisetEntry,
};
pub use svd::{kernel_basis, kernel_dimension, rank, svd, Svd};
pub use unitary::{angle, eig_unitary};

#[derive(Clone, Debug)]
pub struct EigenDecomposition<T> {
    pub values: Vec<T>,
    pub vectors: CMatrix,
    /// max ‖A v − λ v‖ over the computed pairs.
    pub residual: f64,
}

/// Numerical tolerances shared by construction, verification and output.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Operator identities (coisometry, involution, composition).
    pub construction: f64,
    /// Eigenpair residual bound.
    pub eigen_residual: f64,
    /// Eigenvalue clustering for multiplicity counts.
    pub cluster: f64,
    /// Relative singular-value threshold for kernels.
    pub kernel: f64,
    /// Max distance for matching two spectra.
    pub matching: f64,
    /// Eigenvalues of T this close to ±1 are counted in ker(T ∓ 1).
    pub boundary: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            construction: 1e-10,
            eigen_residual: 1e-8,
            cluster: 1e-7,
            kernel: 1e-8,
            matching: 1e-8,
            boundary: 1e-7,
        }
    }
}

/// Default cap on the dimension of matrices diagonalized densely.
pub const DEFAULT_MAX_DENSE_DIM: usize = 4096;

/// The dense-diagonalization cap, overridable through `SWK_MAX_DIM`.
pub fn max_dense_dimension() -> usize {
    std::env::var("SWK_MAX_DIM")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_MAX_DENSE_DIM)
}

/// Fails with a resource-limit error when `n` exceeds the dense cap.
pub fn ensure_dense_feasible(n: usize, what: &str) -> crate::Result<()> {
    let cap = max_dense_dimension();
    if n > cap {
        return Err(crate::Error::ResourceLimit(format!(
            "{what} needs a dense {n}x{n} diagonalization; the limit is {cap} (SWK_MAX_DIM)"
        )));
    }
    Ok(())
}
