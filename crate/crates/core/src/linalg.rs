//! Minimum-norm linear least squares via a complete orthogonal decomposition.
//!
//! `A P = Q [R11 R12; 0 0]` is computed with column-pivoted Householder QR.
//! When `A` is rank deficient the leading `rank` rows of `R` are factored
//! again, `[R11 R12]^T = Z [L^T; 0]`, which gives the solution of smallest
//! Euclidean norm among all least-squares minimizers.

use alloc::vec;
use alloc::vec::Vec;

/// Relative threshold on the pivoted diagonal below which columns count as dependent.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct LeastSquares {
    pub solution: Vec<f64>,
    pub rank: usize,
}

/// Applies the reflector `I - 2 v v^T / (v^T v)` stored in `v` (acting on
/// indices `offset..offset + v.len()`) to the vector `x`.
fn reflect(v: &[f64], vnorm2: f64, offset: usize, x: &mut [f64]) {
    let dot: f64 = v.iter().zip(&x[offset..]).map(|(a, b)| a * b).sum();
    let scale = 2.0 * dot / vnorm2;
    for (xi, vi) in x[offset..].iter_mut().zip(v) {
        *xi -= scale * vi;
    }
}

/// Builds the Householder vector that maps `x` onto a multiple of `e_0`.
/// Returns `(v, v^T v, alpha)` where the image is `alpha e_0`.
fn householder(x: &[f64]) -> (Vec<f64>, f64, f64) {
    let norm = libm::sqrt(x.iter().map(|v| v * v).sum::<f64>());
    let alpha = if x[0] > 0.0 { -norm } else { norm };
    let mut v = x.to_vec();
    v[0] -= alpha;
    let vnorm2 = v.iter().map(|a| a * a).sum::<f64>();
    (v, vnorm2, alpha)
}

/// Solves `min ||A x - b||` with minimum `||x||`. `a` is row-major `m x n`.
pub fn min_norm_lstsq(a: &[f64], m: usize, n: usize, b: &[f64], rel_tol: f64) -> LeastSquares {
    assert_eq!(a.len(), m * n, "matrix size mismatch");
    assert_eq!(b.len(), m, "rhs size mismatch");

    // Column-major working copy: cols[j][i] = A(i, j).
    let mut cols: Vec<Vec<f64>> = (0..n).map(|j| (0..m).map(|i| a[i * n + j]).collect()).collect();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut qtb = b.to_vec();
    let mut rank = 0;
    let mut lead = 0.0;

    for k in 0..m.min(n) {
        let tail_norm2 = |c: &Vec<f64>| c[k..].iter().map(|v| v * v).sum::<f64>();
        let (p, best) = (k..n)
            .map(|j| (j, tail_norm2(&cols[j])))
            .fold((k, -1.0), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
        let best = libm::sqrt(best);
        if k == 0 {
            lead = best;
        }
        if best == 0.0 || best <= rel_tol * lead {
            break;
        }
        cols.swap(k, p);
        perm.swap(k, p);

        let (v, vnorm2, alpha) = householder(&cols[k][k..]);
        if vnorm2 > 0.0 {
            for col in cols.iter_mut().skip(k + 1) {
                reflect(&v, vnorm2, k, col);
            }
            reflect(&v, vnorm2, k, &mut qtb);
        }
        cols[k][k] = alpha;
        for entry in cols[k][k + 1..].iter_mut() {
            *entry = 0.0;
        }
        rank += 1;
    }

    let mut solution = vec![0.0; n];
    if rank == 0 {
        return LeastSquares { solution, rank };
    }
    let rhs = &qtb[..rank];

    let permuted = if rank == n {
        // Full column rank: back substitution on R.
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut acc = rhs[i];
            for j in i + 1..n {
                acc -= cols[j][i] * x[j];
            }
            x[i] = acc / cols[i][i];
        }
        x
    } else {
        // Factor R1^T (n x rank) = Z [L^T; 0]; then solve L y = rhs and x' = Z [y; 0].
        let mut rt: Vec<Vec<f64>> = (0..rank).map(|i| (0..n).map(|j| cols[j][i]).collect()).collect();
        let mut reflectors = Vec::with_capacity(rank);
        for k in 0..rank {
            let (v, vnorm2, alpha) = householder(&rt[k][k..]);
            if vnorm2 > 0.0 {
                for col in rt.iter_mut().skip(k + 1) {
                    reflect(&v, vnorm2, k, col);
                }
            }
            rt[k][k] = alpha;
            reflectors.push((v, vnorm2));
        }
        // rt[c][r] holds the upper-triangular factor U (= L^T) at (r, c), r <= c.
        let mut y = vec![0.0; n];
        for i in 0..rank {
            let mut acc = rhs[i];
            for j in 0..i {
                acc -= rt[i][j] * y[j];
            }
            y[i] = acc / rt[i][i];
        }
        for (k, (v, vnorm2)) in reflectors.iter().enumerate().rev() {
            if *vnorm2 > 0.0 {
                reflect(v, *vnorm2, k, &mut y);
            }
        }
        y
    };

    for (j, &pj) in perm.iter().enumerate() {
        solution[pj] = permuted[j];
    }
    LeastSquares { solution, rank }
}

/// Solves the square system `a x = b` (row-major `n x n`) by Gaussian
/// elimination with partial pivoting. Returns `None` when a pivot falls below
/// `pivot_tol` times the largest entry.
pub fn solve_dense(mut a: Vec<f64>, n: usize, mut b: Vec<f64>, pivot_tol: f64) -> Option<Vec<f64>> {
    assert_eq!(a.len(), n * n);
    assert_eq!(b.len(), n);
    let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return None;
    }
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| a[i * n + k].abs().total_cmp(&a[j * n + k].abs()))
            .unwrap();
        if a[p * n + k].abs() <= pivot_tol * scale {
            return None;
        }
        if p != k {
            for c in 0..n {
                a.swap(k * n + c, p * n + c);
            }
            b.swap(k, p);
        }
        for i in k + 1..n {
            let f = a[i * n + k] / a[k * n + k];
            if f != 0.0 {
                for c in k..n {
                    a[i * n + c] -= f * a[k * n + c];
                }
                b[i] -= f * b[k];
            }
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut acc = b[i];
        for c in i + 1..n {
            acc -= a[i * n + c] * x[c];
        }
        x[i] = acc / a[i * n + i];
    }
    Some(x)
}
