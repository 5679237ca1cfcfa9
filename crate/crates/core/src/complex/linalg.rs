//! Small dense linear algebra: exact elimination over any [`Field`],
//! Hermitian eigenvalues by cyclic Jacobi, and the least singular direction
//! of a complex matrix.

// row operations index two rows at once
#![allow(clippy::needless_range_loop)]

use nalgebra::DMatrix;

use super::field::{Field, C64};

/// Reduces `rows` in place to reduced row echelon form and returns the pivot
/// columns. Exact fields pivot on the first nonzero entry; floating ones on
/// the largest entry, treating negligible values as zero.
pub fn row_reduce<F: Field>(rows: &mut [Vec<F>]) -> Vec<usize> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let pick = if F::is_exact() {
            (r..nrows).find(|&i| !rows[i][c].is_zero())
        } else {
            (r..nrows)
                .filter(|&i| !rows[i][c].is_negligible())
                .max_by(|&a, &b| rows[a][c].magnitude().total_cmp(&rows[b][c].magnitude()))
        };
        let Some(p) = pick else { continue };
        rows.swap(r, p);
        let inv = rows[r][c].inverse().expect("pivot is nonzero");
        for x in rows[r].iter_mut() {
            *x = x.times(&inv);
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, pv) in row.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *x = x.minus(&f.times(pv));
                }
            }
            if !F::is_exact() {
                row[c] = F::zero();
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank<F: Field>(rows: &[Vec<F>]) -> usize {
    let mut m = rows.to_vec();
    row_reduce(&mut m).len()
}

/// Basis of `{x : A x = 0}` for `A` with `ncols` columns.
pub fn nullspace<F: Field>(rows: &[Vec<F>], ncols: usize) -> Vec<Vec<F>> {
    let mut m = rows.to_vec();
    let pivots = row_reduce(&mut m);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![F::zero(); ncols];
            v[f] = F::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = m[r][f].negate();
            }
            v
        })
        .collect()
}

/// Solves `A x = b` if consistent, returning one solution.
pub fn solve<F: Field>(rows: &[Vec<F>], b: &[F]) -> Option<Vec<F>> {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut aug: Vec<Vec<F>> = rows
        .iter()
        .zip(b)
        .map(|(r, bi)| {
            let mut r = r.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let pivots = row_reduce(&mut aug);
    if pivots.contains(&ncols) {
        return None;
    }
    let mut x = vec![F::zero(); ncols];
    for (r, &pc) in pivots.iter().enumerate() {
        x[pc] = aug[r][ncols].clone();
    }
    Some(x)
}

pub fn determinant<F: Field>(m: &[Vec<F>]) -> F {
    let n = m.len();
    let mut a = m.to_vec();
    let mut det = F::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_negligible()) else {
            return F::zero();
        };
        if p != c {
            a.swap(p, c);
            det = det.negate();
        }
        det = det.times(&a[c][c]);
        let inv = a[c][c].inverse().expect("pivot is nonzero");
        for i in c + 1..n {
            let f = a[i][c].times(&inv);
            if f.is_zero() {
                continue;
            }
            for j in c..n {
                let v = a[c][j].times(&f);
                a[i][j] = a[i][j].minus(&v);
            }
        }
    }
    det
}

/// Eigenvalues of a real symmetric matrix, ascending.
pub fn symmetric_eigenvalues(m: &[Vec<f64>]) -> Vec<f64> {
    let n = m.len();
    let mut a = m.to_vec();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        let scale: f64 = (0..n).map(|i| a[i][i] * a[i][i]).sum::<f64>().max(f64::MIN_POSITIVE);
        if off <= 1e-30 * scale || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q] == 0.0 {
                    continue;
                }
                let tau = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let t = if tau == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Eigenvalues of a Hermitian matrix, ascending.
///
/// Uses the real embedding `[[Re, -Im], [Im, Re]]`, whose spectrum is that of
/// the input with every eigenvalue doubled.
pub fn hermitian_eigenvalues(m: &[Vec<C64>]) -> Vec<f64> {
    let n = m.len();
    let mut r = vec![vec![0.0; 2 * n]; 2 * n];
    for i in 0..n {
        for j in 0..n {
            // symmetrize against rounding in the input
            let h = (m[i][j] + m[j][i].conj()) * 0.5;
            r[i][j] = h.re;
            r[i + n][j + n] = h.re;
            r[i][j + n] = -h.im;
            r[i + n][j] = h.im;
        }
    }
    let ev = symmetric_eigenvalues(&r);
    ev.chunks(2).map(|p| 0.5 * (p[0] + p[1])).collect()
}

/// Smallest singular value of `a` and a unit right singular vector for it.
pub fn least_singular_vector(a: &DMatrix<C64>) -> (f64, Vec<C64>) {
    let svd = a.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let (idx, sigma) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|x, y| x.1.total_cmp(y.1))
        .map(|(i, s)| (i, *s))
        .expect("nonempty matrix");
    let v = (0..v_t.ncols()).map(|j| v_t[(idx, j)].conj()).collect();
    (sigma, v)
}
