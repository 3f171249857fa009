//! Hermitian eigensolver.
//!
//! Householder reduction to a complex tridiagonal matrix, a diagonal phase
//! change that makes the off-diagonal real, then the implicit QL iteration
//! with eigenvector accumulation (the EISPACK `tql2` scheme).

use super::EigenDecomposition;
use crate::error::{Error, Result};
use crate::linalg::{norm2, CMatrix, C64, ONE, ZERO};

const HERMITIAN_TOL: f64 = 1e-10;
const MAX_QL_ITERATIONS: usize = 60;

/// Eigen-decomposition of a Hermitian matrix.
///
/// Values are ascending; eigenvector `j` is column `j` of `vectors`.
pub fn eig_hermitian(a: &CMatrix) -> Result<EigenDecomposition<f64>> {
    if !a.is_square() {
        return Err(Error::Dimension(format!(
            "eig_hermitian needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let n = a.rows();
    if n == 0 {
        return Ok(EigenDecomposition {
            values: vec![],
            vectors: CMatrix::zeros(0, 0),
            residual: 0.0,
        });
    }
    let scale = a.max_abs().max(1.0);
    let herm = a.hermitian_residual();
    if herm > HERMITIAN_TOL * scale {
        return Err(Error::NotHermitian(herm));
    }
    let work = &(a + &a.adjoint()).scale_real(0.5);
    let (mut diag, mut off, mut z) = tridiagonalize(work);
    tql2(&mut diag, &mut off, &mut z)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]));
    let values: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let vectors = z.select_columns(&order);
    let residual = max_residual(a, &values, &vectors);
    Ok(EigenDecomposition {
        values,
        vectors,
        residual,
    })
}

fn max_residual(a: &CMatrix, values: &[f64], vectors: &CMatrix) -> f64 {
    let av = a.matmul(vectors);
    let mut worst: f64 = 0.0;
    for (j, &lambda) in values.iter().enumerate() {
        let mut r = 0.0;
        for i in 0..a.rows() {
            r += (av[(i, j)] - vectors[(i, j)] * lambda).norm_sqr();
        }
        worst = worst.max(r.sqrt());
    }
    worst
}

/// Returns the real diagonal, the real off-diagonal (`off[i]` couples `i`
/// and `i + 1`, last entry zero) and the unitary `Q` with `A = Q R Q*`.
fn tridiagonalize(a: &CMatrix) -> (Vec<f64>, Vec<f64>, CMatrix) {
    let n = a.rows();
    let mut a = a.clone();
    let mut q = CMatrix::identity(n);
    let mut sub = vec![ZERO; n];

    for k in 0..n.saturating_sub(2) {
        let m = n - k - 1;
        let x: Vec<C64> = (0..m).map(|i| a[(k + 1 + i, k)]).collect();
        let xnorm = norm2(&x);
        if xnorm == 0.0 {
            continue;
        }
        let phase = if x[0] == ZERO { ONE } else { x[0] / x[0].norm() };
        let alpha = -phase * xnorm;
        let mut v = x;
        v[0] -= alpha;
        let vnorm = norm2(&v);
        if vnorm == 0.0 {
            continue;
        }
        for vi in &mut v {
            *vi /= vnorm;
        }

        // B <- H B H on the trailing block, H = I - 2 v v*.
        let mut p = vec![ZERO; m];
        for (i, pi) in p.iter_mut().enumerate() {
            let row = &a.row(k + 1 + i)[k + 1..];
            *pi = row.iter().zip(&v).map(|(b, vj)| b * vj).sum();
        }
        let c: C64 = v.iter().zip(&p).map(|(vi, pi)| vi.conj() * pi).sum();
        let w: Vec<C64> = p.iter().zip(&v).map(|(pi, vi)| pi - c * vi).collect();
        for i in 0..m {
            for j in 0..m {
                let delta = v[i] * w[j].conj() + w[i] * v[j].conj();
                a[(k + 1 + i, k + 1 + j)] -= delta * 2.0;
            }
        }
        a[(k + 1, k)] = alpha;
        a[(k, k + 1)] = alpha.conj();
        for i in 1..m {
            a[(k + 1 + i, k)] = ZERO;
            a[(k, k + 1 + i)] = ZERO;
        }

        // Q <- Q H.
        for r in 0..n {
            let qrow = &q.row(r)[k + 1..];
            let y: C64 = qrow.iter().zip(&v).map(|(qi, vi)| qi * vi).sum();
            for i in 0..m {
                q[(r, k + 1 + i)] -= y * v[i].conj() * 2.0;
            }
        }
    }

    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    for (k, s) in sub.iter_mut().enumerate().take(n.saturating_sub(1)) {
        *s = a[(k + 1, k)];
    }

    // Phase change D with D* R D real: d_{k+1} = d_k s_k / |s_k|.
    let mut off = vec![0.0; n];
    let mut d = ONE;
    let mut phases = vec![ONE; n];
    for k in 0..n.saturating_sub(1) {
        let s = sub[k];
        let mag = s.norm();
        off[k] = mag;
        if mag > 0.0 {
            d *= s / mag;
        }
        phases[k + 1] = d;
    }
    for r in 0..n {
        for (j, &ph) in phases.iter().enumerate() {
            q[(r, j)] *= ph;
        }
    }
    (diag, off, q)
}

/// Implicit QL on a real symmetric tridiagonal matrix; the real rotations
/// are accumulated into the columns of `z`.
fn tql2(d: &mut [f64], e: &mut [f64], z: &mut CMatrix) -> Result<()> {
    let n = d.len();
    if n <= 1 {
        return Ok(());
    }
    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > MAX_QL_ITERATIONS {
                    return Err(Error::NoConvergence(iter));
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().take(n).skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for k in 0..n {
                        let zk1 = z[(k, i + 1)];
                        let zk = z[(k, i)];
                        z[(k, i + 1)] = zk * s + zk1 * c;
                        z[(k, i)] = zk * c - zk1 * s;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn two_by_two_closed_form() {
        let a = CMatrix::from_real_rows(&[&[0.0, 0.5], &[0.5, 0.0]]);
        let eig = eig_hermitian(&a).unwrap();
        assert!((eig.values[0] + 0.5).abs() < 1e-15);
        assert!((eig.values[1] - 0.5).abs() < 1e-15);
        assert!(eig.residual < 1e-14);
    }

    #[test]
    fn identity_has_unit_spectrum() {
        let eig = eig_hermitian(&CMatrix::identity(3)).unwrap();
        assert_eq!(eig.values, vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn complex_hermitian_reconstructs() {
        let n = 7;
        let a = CMatrix::from_fn(n, n, |i, j| {
            let (lo, hi) = (i.min(j) as f64, i.max(j) as f64);
            let im = if i < j {
                0.3 * (lo - hi)
            } else if i > j {
                -0.3 * (lo - hi)
            } else {
                0.0
            };
            c((lo * 1.7 + hi * 0.3).sin(), im)
        });
        let eig = eig_hermitian(&a).unwrap();
        let lambda = CMatrix::from_diagonal(&eig.values.iter().map(|&v| c(v, 0.0)).collect::<Vec<_>>());
        let recon = eig.vectors.matmul(&lambda).matmul(&eig.vectors.adjoint());
        assert!(recon.max_abs_diff(&a) < 1e-12);
        let gram = eig.vectors.adjoint().matmul(&eig.vectors);
        assert!(gram.max_abs_diff(&CMatrix::identity(n)) < 1e-12);
        assert!(eig.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn rejects_non_hermitian() {
        let a = CMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(eig_hermitian(&a), Err(Error::NotHermitian(_))));
    }
}
