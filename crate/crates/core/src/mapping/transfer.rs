//! Eigenvector transfer between `T` and `U`, and the action of `U` on
//! `dA* ker(T ∓ 1)`.
//!
//! For `x = Re λ` with `|λ| = 1`, `λ ≠ ±1`, the map `K_λ = dA* - λ dB*`
//! sends `ker(T - x)` into `ker(U - λ)` and
//! `M_λ = λ / (1 - λ²) · dA (S + conj(λ))` is its left inverse there.

use serde::Serialize;

use super::{DenseOps, TRANSFER_MARGIN};
use crate::error::{Error, Result};
use crate::linalg::{norm2, CMatrix, C64, ONE};
use crate::operators::WalkOperators;
use crate::spectral::{joukowsky_inverse, kernel_basis, kernel_dimension, EigenDecomposition, Tolerances};

/// Smallest distance from `±1` accepted by [`transfer_map_check`].
pub const TRANSFER_DOMAIN_MARGIN: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TransferReport {
    pub x: f64,
    /// Upper preimage; the conjugate is checked as well.
    pub lambda: C64,
    /// `dim ker(T - x)`.
    pub multiplicity: usize,
    pub ker_u_lambda: usize,
    pub ker_u_conj: usize,
    /// max `|U ψ - λ ψ| / |ψ|` over basis vectors and both preimages.
    pub eigen_residual: f64,
    /// max `|M_λ ψ - f|`.
    pub inverse_residual: f64,
    pub pass: bool,
    /// `K_λ f` for each basis vector `f`, as columns.
    #[serde(skip)]
    pub vectors: CMatrix,
}

/// Checks the transfer maps on a full orthonormal basis of `ker(T - x)`.
pub fn transfer_map_check(ops: &WalkOperators, x: f64, tol: &Tolerances) -> Result<TransferReport> {
    if x.is_nan() || x.abs() >= 1.0 - TRANSFER_DOMAIN_MARGIN {
        return Err(Error::Domain(format!(
            "transfer maps degenerate at |x| >= 1 - {TRANSFER_DOMAIN_MARGIN:e}, got x = {x}"
        )));
    }
    let d = DenseOps::new(ops)?;
    let basis = kernel_basis(&d.t.shifted(C64::new(x, 0.0)), tol.kernel)?;
    if basis.cols() == 0 {
        return Err(Error::Domain(format!("{x} is not an eigenvalue of the discriminant")));
    }
    let (lambda, conj) = joukowsky_inverse(x)?;
    let ker_u_lambda = kernel_dimension(&d.u.shifted(lambda), tol.kernel)?;
    let ker_u_conj = kernel_dimension(&d.u.shifted(conj), tol.kernel)?;
    Ok(residuals(&d, x, &basis, ker_u_lambda, ker_u_conj, tol))
}

fn residuals(
    d: &DenseOps,
    x: f64,
    basis: &CMatrix,
    ker_u_lambda: usize,
    ker_u_conj: usize,
    tol: &Tolerances,
) -> TransferReport {
    let (lambda, conj) = joukowsky_inverse(x).expect("x checked to lie inside (-1, 1)");
    let da_star = d.da.adjoint();
    let db_star = d.db.adjoint();
    let a = da_star.matmul(basis);
    let b = db_star.matmul(basis);
    let mut eigen_residual: f64 = 0.0;
    let mut inverse_residual: f64 = 0.0;
    let mut vectors = CMatrix::zeros(d.dim_h(), basis.cols());
    for (branch, lam) in [lambda, conj].into_iter().enumerate() {
        let psi = &a - &b.scale(lam);
        let u_psi = d.u.matmul(&psi);
        let back =
            d.da.matmul(&(&d.s.matmul(&psi) + &psi.scale(lam.conj())))
                .scale(lam / (ONE - lam * lam));
        for j in 0..basis.cols() {
            let col = psi.column(j);
            let norm = norm2(&col);
            let r: Vec<C64> = u_psi.column(j).iter().zip(&col).map(|(u, p)| u - lam * p).collect();
            eigen_residual = eigen_residual.max(norm2(&r) / norm);
            let e: Vec<C64> = back.column(j).iter().zip(basis.column(j)).map(|(m, f)| m - f).collect();
            inverse_residual = inverse_residual.max(norm2(&e));
            if branch == 0 {
                vectors.set_column(j, &col);
            }
        }
    }
    let multiplicity = basis.cols();
    TransferReport {
        x,
        lambda,
        multiplicity,
        ker_u_lambda,
        ker_u_conj,
        eigen_residual,
        inverse_residual,
        pass: eigen_residual <= tol.eigen_residual
            && inverse_residual <= tol.eigen_residual
            && ker_u_lambda == multiplicity
            && ker_u_conj == multiplicity,
        vectors,
    }
}

/// Transfer checks for every eigenvalue cluster of `T` inside
/// `(-1 + TRANSFER_MARGIN, 1 - TRANSFER_MARGIN)`, using the eigenvectors of
/// `T` as kernel bases and eigenvalue counts of `U` as kernel dimensions.
pub(crate) fn transfer_over_spectrum(
    d: &DenseOps,
    te: &EigenDecomposition<f64>,
    u_values: &[C64],
    tol: &Tolerances,
) -> Result<Vec<TransferReport>> {
    let mut out = Vec::new();
    let mut start = 0;
    let n = te.values.len();
    while start < n {
        let mut end = start + 1;
        while end < n && te.values[end] - te.values[end - 1] <= tol.cluster {
            end += 1;
        }
        let x = te.values[start..end].iter().sum::<f64>() / (end - start) as f64;
        if x.abs() < 1.0 - TRANSFER_MARGIN {
            let cols: Vec<usize> = (start..end).collect();
            let basis = te.vectors.select_columns(&cols);
            let (lambda, conj) = joukowsky_inverse(x)?;
            let count = |z: C64| u_values.iter().filter(|v| (*v - z).norm() <= tol.cluster).count();
            out.push(residuals(d, x, &basis, count(lambda), count(conj), tol));
        }
        start = end;
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct L0Branch {
    /// `+1` for `ker(T - 1)`, `-1` for `ker(T + 1)`.
    pub sign: i8,
    pub dimension: usize,
    /// max `|U dA* f ∓ dA* f|`.
    pub u_residual: f64,
    /// max `|S dA* f ∓ dA* f|`.
    pub s_residual: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct L0Report {
    pub plus: L0Branch,
    pub minus: L0Branch,
    pub pass: bool,
}

/// `U` and `S` act as `±1` on `dA* ker(T ∓ 1)`. Vacuous when the kernel is
/// trivial.
pub fn verify_l0_action(ops: &WalkOperators, tol: &Tolerances) -> Result<L0Report> {
    l0_dense(&DenseOps::new(ops)?, tol)
}

pub(crate) fn l0_dense(d: &DenseOps, tol: &Tolerances) -> Result<L0Report> {
    let branch = |sign: i8| -> Result<L0Branch> {
        let s = C64::new(f64::from(sign), 0.0);
        let basis = kernel_basis(&d.t.shifted(s), tol.kernel)?;
        if basis.cols() == 0 {
            return Ok(L0Branch {
                sign,
                dimension: 0,
                u_residual: 0.0,
                s_residual: 0.0,
                pass: true,
            });
        }
        let g = d.da.adjoint().matmul(&basis);
        let target = g.scale(s);
        let u_residual = column_norm_max(&(&d.u.matmul(&g) - &target));
        let s_residual = column_norm_max(&(&d.s.matmul(&g) - &target));
        Ok(L0Branch {
            sign,
            dimension: basis.cols(),
            u_residual,
            s_residual,
            pass: u_residual <= tol.eigen_residual && s_residual <= tol.eigen_residual,
        })
    };
    let plus = branch(1)?;
    let minus = branch(-1)?;
    Ok(L0Report {
        pass: plus.pass && minus.pass,
        plus,
        minus,
    })
}

fn column_norm_max(m: &CMatrix) -> f64 {
    (0..m.cols()).map(|j| norm2(&m.column(j))).fold(0.0, f64::max)
}
