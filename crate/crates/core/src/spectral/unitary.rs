//! Unitary eigensolver.
//!
//! A unitary matrix is normal, so its Hermitian parts `(A + A*)/2` and
//! `(A - A*)/(2i)` commute and share an eigenbasis. We diagonalize the
//! first, then resolve each (near-)degenerate cluster with the second
//! restricted to the cluster, and once more with the first restricted to
//! the resulting sub-clusters.

use std::f64::consts::TAU;

use super::hermitian::eig_hermitian;
use super::EigenDecomposition;
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64};

const UNITARY_TOL: f64 = 1e-9;
const SPLIT_TOL: f64 = 1e-6;

pub fn eig_unitary(a: &CMatrix) -> Result<EigenDecomposition<C64>> {
    if !a.is_square() {
        return Err(Error::Dimension(format!(
            "eig_unitary needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let n = a.rows();
    let adj = a.adjoint();
    let defect = adj.matmul(a).max_abs_diff(&CMatrix::identity(n));
    if defect > UNITARY_TOL {
        return Err(Error::NotUnitary(defect));
    }
    if n == 0 {
        return Ok(EigenDecomposition {
            values: vec![],
            vectors: CMatrix::zeros(0, 0),
            residual: 0.0,
        });
    }

    let re = (a + &adj).scale_real(0.5);
    let im = (a - &adj).scale(C64::new(0.0, -0.5));

    let first = eig_hermitian(&re)?;
    let mut vectors = first.vectors;
    for group in split_by_gap(&first.values) {
        if group.len() < 2 {
            continue;
        }
        let (sub_values, rotated) = rotate_within(&im, &vectors, &group)?;
        write_columns(&mut vectors, &group, &rotated);
        for sub in split_by_gap(&sub_values) {
            if sub.len() < 2 {
                continue;
            }
            let cols: Vec<usize> = sub.iter().map(|&i| group[i]).collect();
            let (_, rotated) = rotate_within(&re, &vectors, &cols)?;
            write_columns(&mut vectors, &cols, &rotated);
        }
    }

    let av = a.matmul(&vectors);
    let mut values = Vec::with_capacity(n);
    for j in 0..n {
        let mut rq = C64::new(0.0, 0.0);
        for i in 0..n {
            rq += vectors[(i, j)].conj() * av[(i, j)];
        }
        let mag = rq.norm();
        values.push(if mag > 0.0 { rq / mag } else { rq });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| angle(values[i]).total_cmp(&angle(values[j])));
    let values: Vec<C64> = order.iter().map(|&i| values[i]).collect();
    let vectors = vectors.select_columns(&order);
    let av = av.select_columns(&order);

    let mut residual: f64 = 0.0;
    for (j, &lambda) in values.iter().enumerate() {
        let r: f64 = (0..n).map(|i| (av[(i, j)] - vectors[(i, j)] * lambda).norm_sqr()).sum();
        residual = residual.max(r.sqrt());
    }
    Ok(EigenDecomposition {
        values,
        vectors,
        residual,
    })
}

/// Argument in `[0, 2π)`.
pub fn angle(z: C64) -> f64 {
    let a = z.im.atan2(z.re);
    if a < 0.0 {
        (a + TAU) % TAU
    } else {
        a
    }
}

/// Consecutive runs of sorted values whose neighbours are within the split
/// tolerance.
fn split_by_gap(values: &[f64]) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut prev: Option<f64> = None;
    for i in order {
        match prev {
            Some(p) if values[i] - p <= SPLIT_TOL => groups.last_mut().expect("open group").push(i),
            _ => groups.push(vec![i]),
        }
        prev = Some(values[i]);
    }
    groups
}

/// Diagonalizes `h` restricted to the span of the selected columns.
fn rotate_within(h: &CMatrix, basis: &CMatrix, cols: &[usize]) -> Result<(Vec<f64>, CMatrix)> {
    let q = basis.select_columns(cols);
    let restricted = q.adjoint().matmul(&h.matmul(&q));
    let restricted = (&restricted + &restricted.adjoint()).scale_real(0.5);
    let eig = eig_hermitian(&restricted)?;
    Ok((eig.values, q.matmul(&eig.vectors)))
}

fn write_columns(target: &mut CMatrix, cols: &[usize], source: &CMatrix) {
    for (k, &j) in cols.iter().enumerate() {
        target.set_column(j, &source.column(k));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quarter_rotation() {
        let a = CMatrix::from_real_rows(&[&[0.0, -1.0], &[1.0, 0.0]]);
        let eig = eig_unitary(&a).unwrap();
        assert!((eig.values[0] - C64::new(0.0, 1.0)).norm() < 1e-14);
        assert!((eig.values[1] - C64::new(0.0, -1.0)).norm() < 1e-14);
        assert!(eig.residual < 1e-14);
    }

    #[test]
    fn minus_identity() {
        let a = CMatrix::identity(2).scale_real(-1.0);
        let eig = eig_unitary(&a).unwrap();
        for v in eig.values {
            assert!((v + 1.0).norm() < 1e-15);
        }
    }

    #[test]
    fn degenerate_real_parts_are_separated() {
        // diag(e^{ia}, e^{-ia}, e^{ia}) conjugated by a dense unitary.
        let t = 0.7_f64;
        let d = CMatrix::from_diagonal(&[
            C64::from_polar(1.0, t),
            C64::from_polar(1.0, -t),
            C64::from_polar(1.0, t),
        ]);
        let u = rotation3();
        let a = u.matmul(&d).matmul(&u.adjoint());
        let eig = eig_unitary(&a).unwrap();
        assert!(eig.residual < 1e-12);
        let plus = eig
            .values
            .iter()
            .filter(|v| (**v - C64::from_polar(1.0, t)).norm() < 1e-12)
            .count();
        let minus = eig
            .values
            .iter()
            .filter(|v| (**v - C64::from_polar(1.0, -t)).norm() < 1e-12)
            .count();
        assert_eq!((plus, minus), (2, 1));
    }

    fn rotation3() -> CMatrix {
        let s = 1.0 / 3f64.sqrt();
        let w = C64::from_polar(1.0, TAU / 3.0);
        CMatrix::from_fn(3, 3, |i, j| w.powu((i * j) as u32) * s)
    }

    #[test]
    fn rejects_non_unitary() {
        let a = CMatrix::identity(2).scale_real(2.0);
        assert!(matches!(eig_unitary(&a), Err(Error::NotUnitary(_))));
    }
}
