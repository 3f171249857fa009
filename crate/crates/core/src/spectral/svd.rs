//! Complex SVD (right singular vectors only) and the numerical rank and
//! kernel helpers built on it.

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64, ONE, ZERO};

const MAX_QR_ITERATIONS: usize = 75;

#[derive(Clone, Debug)]
pub struct Svd {
    /// Descending; one value per column of the input.
    pub singular_values: Vec<f64>,
    /// Right singular vectors as columns, in the order of `singular_values`.
    pub v: CMatrix,
}

/// Right singular vectors and singular values by Householder
/// bidiagonalization followed by implicit-shift QR on the real bidiagonal.
///
/// Wide inputs are padded with zero rows, which changes neither the right
/// singular vectors nor the kernel.
pub fn svd(a: &CMatrix) -> Result<Svd> {
    let n = a.cols();
    let m = a.rows().max(n);
    let mut w: Vec<Vec<C64>> = (0..n)
        .map(|j| {
            let mut c = a.column(j);
            c.resize(m, ZERO);
            c
        })
        .collect();
    let mut v: Vec<Vec<C64>> = (0..n)
        .map(|j| {
            let mut e = vec![ZERO; n];
            e[j] = ONE;
            e
        })
        .collect();
    let (mut d, mut e) = bidiagonalize(&mut w, &mut v, m, n);
    diagonalize(&mut d, &mut e, &mut v)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[j].total_cmp(&d[i]).then(i.cmp(&j)));
    let singular_values = order.iter().map(|&i| d[i]).collect();
    let ordered: Vec<Vec<C64>> = order.iter().map(|&i| v[i].clone()).collect();
    Ok(Svd {
        singular_values,
        v: CMatrix::from_columns(n, &ordered),
    })
}

/// Reflector `I - 2 u u* / (u* u)` sending `x` to `alpha e_1`, with
/// `alpha = -phase(x_0) |x|`. Returns `None` for a zero vector.
fn householder(x: &[C64]) -> Option<(Vec<C64>, f64, C64)> {
    let norm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return None;
    }
    let phase = if x[0].norm() == 0.0 { ONE } else { x[0] / x[0].norm() };
    let alpha = -phase * norm;
    let mut u = x.to_vec();
    u[0] -= alpha;
    let uu: f64 = u.iter().map(|z| z.norm_sqr()).sum();
    if uu == 0.0 {
        return None;
    }
    Some((u, 2.0 / uu, alpha))
}

/// Reduces the columns `w` (m x n) to a real upper bidiagonal form,
/// accumulating the right transformations into the columns `v`.
/// Returns the diagonal and the superdiagonal (`e[0] = 0`, `e[j]` couples
/// `j - 1` and `j`).
fn bidiagonalize(w: &mut [Vec<C64>], v: &mut [Vec<C64>], m: usize, n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    for j in 0..n {
        // Left reflector on rows j.., column j.
        let x: Vec<C64> = w[j][j..m].to_vec();
        let alpha = match householder(&x) {
            Some((u, scale, alpha)) => {
                for col in w[j..n].iter_mut() {
                    let dot: C64 = u.iter().zip(&col[j..m]).map(|(a, b)| a.conj() * b).sum::<C64>() * scale;
                    for (c, a) in col[j..m].iter_mut().zip(&u) {
                        *c -= a * dot;
                    }
                }
                alpha
            }
            None => ZERO,
        };
        // Row phase (left unitary) makes the diagonal real and non-negative.
        let r = alpha.norm();
        if r > 0.0 {
            let p = alpha.conj() / r;
            for col in w[j..n].iter_mut() {
                col[j] *= p;
            }
        }
        d[j] = r;
        if j + 1 >= n {
            continue;
        }
        // Right reflector on columns j+1.., row j: with y the row, reflect
        // conj(y) so that y G = conj(alpha) e_1.
        let y: Vec<C64> = (j + 1..n).map(|c| w[c][j].conj()).collect();
        let beta = match householder(&y) {
            Some((u, scale, alpha)) => {
                // (X G)[r, :] = X[r, :] - scale (X[r, :] u) u*, applied to
                // every row of w and of v.
                apply_right(w, j + 1, n, j, m, &u, scale);
                apply_right(v, j + 1, n, 0, n, &u, scale);
                alpha.conj()
            }
            None => ZERO,
        };
        let r = beta.norm();
        if r > 0.0 {
            let p = beta.conj() / r;
            for x in w[j + 1].iter_mut() {
                *x *= p;
            }
            for x in v[j + 1].iter_mut() {
                *x *= p;
            }
        }
        e[j + 1] = r;
    }
    (d, e)
}

#[allow(clippy::needless_range_loop)]
fn apply_right(cols: &mut [Vec<C64>], c0: usize, c1: usize, r0: usize, r1: usize, u: &[C64], scale: f64) {
    for r in r0..r1 {
        let dot: C64 = (c0..c1).zip(u).map(|(c, a)| cols[c][r] * a).sum::<C64>() * scale;
        for (c, a) in (c0..c1).zip(u) {
            cols[c][r] -= dot * a.conj();
        }
    }
}

/// Golub-Kahan implicit-shift QR on the bidiagonal `(d, e)`. Rotations
/// are accumulated into the columns `v`; singular values end up in `d`.
fn diagonalize(d: &mut [f64], e: &mut [f64], v: &mut [Vec<C64>]) -> Result<()> {
    let n = d.len();
    let anorm = (0..n).map(|i| d[i].abs() + e[i].abs()).fold(0.0, f64::max);
    // Entries at rounding level relative to the whole matrix are dropped;
    // without this, trailing blocks of noise can stall the shifted QR.
    let floor = 16.0 * f64::EPSILON * anorm;
    let negligible = |x: f64| x.abs() <= floor;
    for k in (0..n).rev() {
        let mut iterations = 0;
        loop {
            // Find the start l of the unreduced block ending at k.
            let mut l = k;
            let mut cancel = false;
            loop {
                if l == 0 || negligible(e[l]) {
                    break;
                }
                if negligible(d[l - 1]) {
                    cancel = true;
                    break;
                }
                l -= 1;
            }
            if cancel {
                // d[l-1] is negligible: chase e[l..=k] away with left
                // rotations, which leave v untouched.
                let (mut c, mut s) = (0.0, 1.0);
                for i in l..=k {
                    let f = s * e[i];
                    e[i] *= c;
                    if negligible(f) {
                        break;
                    }
                    let g = d[i];
                    let h = f.hypot(g);
                    d[i] = h;
                    c = g / h;
                    s = -f / h;
                }
            }
            let z = d[k];
            if l == k {
                if z < 0.0 {
                    d[k] = -z;
                    for x in v[k].iter_mut() {
                        *x = -*x;
                    }
                }
                break;
            }
            iterations += 1;
            if iterations > MAX_QR_ITERATIONS {
                return Err(Error::NoConvergence(MAX_QR_ITERATIONS));
            }
            // Wilkinson-type shift from the trailing 2x2 block.
            let nm = k - 1;
            let mut x = d[l];
            let y = d[nm];
            let g = e[nm];
            let h = e[k];
            let mut f = ((y - z) * (y + z) + (g - h) * (g + h)) / (2.0 * h * y);
            let r = f.hypot(1.0);
            f = ((x - z) * (x + z) + h * ((y / (f + r.copysign(f))) - h)) / x;
            let (mut c, mut s) = (1.0, 1.0);
            for j in l..=nm {
                let i = j + 1;
                let mut g = e[i];
                let mut y = d[i];
                let mut h = s * g;
                g *= c;
                let mut z = f.hypot(h);
                e[j] = z;
                c = f / z;
                s = h / z;
                f = x * c + g * s;
                g = g * c - x * s;
                h = y * s;
                y *= c;
                rotate(v, j, i, c, s);
                z = f.hypot(h);
                d[j] = z;
                if z != 0.0 {
                    c = f / z;
                    s = h / z;
                }
                f = c * g + s * y;
                x = c * y - s * g;
            }
            e[l] = 0.0;
            e[k] = f;
            d[k] = x;
        }
    }
    Ok(())
}

fn rotate(v: &mut [Vec<C64>], p: usize, q: usize, c: f64, s: f64) {
    let (left, right) = v.split_at_mut(q);
    for (x, z) in left[p].iter_mut().zip(right[0].iter_mut()) {
        let (a, b) = (*x, *z);
        *x = a * c + b * s;
        *z = b * c - a * s;
    }
}

/// Singular values at or below this are treated as zero.
fn threshold(sigma: &[f64], tolerance: f64) -> f64 {
    match sigma.first() {
        Some(&max) if max > 0.0 => tolerance * max,
        _ => tolerance,
    }
}

/// `dim ker A`: singular values below `tolerance * σ_max` (absolute
/// `tolerance` for the zero matrix), counted over the columns of `A`.
pub fn kernel_dimension(a: &CMatrix, tolerance: f64) -> Result<usize> {
    Ok(kernel_basis(a, tolerance)?.cols())
}

pub fn rank(a: &CMatrix, tolerance: f64) -> Result<usize> {
    Ok(a.cols() - kernel_dimension(a, tolerance)?)
}

/// Orthonormal basis of the numerical kernel, as columns.
pub fn kernel_basis(a: &CMatrix, tolerance: f64) -> Result<CMatrix> {
    if tolerance <= 0.0 {
        return Err(Error::invalid("kernel tolerance must be positive"));
    }
    let svd = svd(a)?;
    let thr = threshold(&svd.singular_values, tolerance);
    let idx: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&j| svd.singular_values[j] <= thr)
        .collect();
    Ok(svd.v.select_columns(&idx))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_matrix_has_full_kernel() {
        assert_eq!(kernel_dimension(&CMatrix::zeros(3, 3), 1e-8).unwrap(), 3);
    }

    #[test]
    fn diagonal_singular_values() {
        let a = CMatrix::from_real_rows(&[&[3.0, 0.0], &[0.0, -4.0], &[0.0, 0.0]]);
        let s = svd(&a).unwrap();
        assert!((s.singular_values[0] - 4.0).abs() < 1e-14);
        assert!((s.singular_values[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn rank_one_complex() {
        let u = [C64::new(1.0, 1.0), C64::new(0.0, 2.0), C64::new(-1.0, 0.5)];
        let w = [
            C64::new(0.3, -0.2),
            C64::new(1.0, 0.0),
            C64::new(0.0, 1.0),
            C64::new(2.0, 0.0),
        ];
        let a = CMatrix::from_fn(3, 4, |i, j| u[i] * w[j].conj());
        assert_eq!(rank(&a, 1e-8).unwrap(), 1);
        let k = kernel_basis(&a, 1e-8).unwrap();
        assert_eq!(k.cols(), 3);
        assert!(a.matmul(&k).max_abs() < 1e-13);
    }

    #[test]
    fn matches_gram_eigenvalues_and_v_is_unitary() {
        let a = CMatrix::from_fn(7, 5, |i, j| {
            C64::new(((i * 5 + j * 3) % 7) as f64 - 3.0, ((i + 2 * j) % 5) as f64 * 0.5 - 1.0)
        });
        let s = svd(&a).unwrap();
        let gram = super::super::eig_hermitian(&a.adjoint().matmul(&a)).unwrap();
        let mut squares: Vec<f64> = s.singular_values.iter().map(|x| x * x).collect();
        squares.reverse();
        for (x, y) in squares.iter().zip(&gram.values) {
            assert!((x - y).abs() < 1e-10 * gram.values[4], "{x} vs {y}");
        }
        let vv = s.v.adjoint().matmul(&s.v);
        assert!(vv.max_abs_diff(&CMatrix::identity(5)) < 1e-13);
        // A v_j has norm sigma_j.
        for j in 0..5 {
            let av = a.matvec(&s.v.column(j));
            let norm = av.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            assert!((norm - s.singular_values[j]).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_non_positive_tolerance() {
        assert!(kernel_dimension(&CMatrix::identity(2), 0.0).is_err());
    }
}
