use super::matrix::{vec_norm, ComplexMatrix, C64, ZERO};
use super::{MathError, Tolerances};

/// Least-squares solution together with the achieved residual `‖Ax - b‖₂`.
#[derive(Debug, Clone)]
pub struct LeastSquares {
    pub solution: Vec<C64>,
    pub residual: f64,
    pub rank: usize,
}

pub fn solve_stacked_least_squares(a: &ComplexMatrix, b: &[C64]) -> Result<LeastSquares, MathError> {
    solve_stacked_least_squares_with(a, b, Tolerances::default().rank)
}

/// Householder QR with column pivoting.
///
/// The numerical rank is the number of pivots with `|R_kk| > rank_tol·|R_00|`;
/// a rank below the column count is reported as [`MathError::RankDeficient`].
pub fn solve_stacked_least_squares_with(
    a: &ComplexMatrix,
    b: &[C64],
    rank_tol: f64,
) -> Result<LeastSquares, MathError> {
    let (m, n) = a.dim();
    if m < n {
        return Err(MathError::Underdetermined { rows: m, cols: n });
    }
    if b.len() != m {
        return Err(MathError::DimensionMismatch { expected: (m, 1), found: (b.len(), 1) });
    }
    if !a.is_finite() || b.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(MathError::NonFinite);
    }

    // column-major working copy: cols[j][i]
    let mut cols: Vec<Vec<C64>> = (0..n).map(|j| a.column(j)).collect();
    let mut rhs = b.to_vec();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut diag = vec![ZERO; n];
    let mut lead = 0.0;
    let mut rank = n;

    for k in 0..n {
        let (pivot, pivot_norm) =
            (k..n)
                .map(|j| (j, vec_norm(&cols[j][k..])))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        cols.swap(k, pivot);
        perm.swap(k, pivot);
        if k == 0 {
            lead = pivot_norm;
        }
        if pivot_norm <= rank_tol * lead || pivot_norm == 0.0 {
            rank = k;
            break;
        }

        let x0 = cols[k][k];
        let alpha = if x0.norm() > 0.0 { -(x0 / x0.norm()) * pivot_norm } else { C64::new(-pivot_norm, 0.0) };
        let mut v: Vec<C64> = cols[k][k..].to_vec();
        v[0] -= alpha;
        let vv: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vv > 0.0 {
            let reflect = |target: &mut [C64]| {
                let w: C64 = v.iter().zip(target.iter()).map(|(vi, ti)| vi.conj() * ti).sum();
                let f = w * (2.0 / vv);
                for (ti, vi) in target.iter_mut().zip(&v) {
                    *ti -= f * vi;
                }
            };
            for col in cols.iter_mut().skip(k + 1) {
                reflect(&mut col[k..]);
            }
            reflect(&mut rhs[k..]);
        }
        diag[k] = alpha;
        cols[k][k] = alpha;
        for z in cols[k][k + 1..].iter_mut() {
            *z = ZERO;
        }
    }

    if rank < n {
        return Err(MathError::RankDeficient { rank, cols: n });
    }

    let mut y = vec![ZERO; n];
    for i in (0..n).rev() {
        let mut acc = rhs[i];
        for j in i + 1..n {
            acc -= cols[j][i] * y[j];
        }
        y[i] = acc / diag[i];
    }
    let mut solution = vec![ZERO; n];
    for (j, &p) in perm.iter().enumerate() {
        solution[p] = y[j];
    }

    let ax = a.matvec(&solution);
    let residual = ax.iter().zip(b).map(|(p, q)| (p - q).norm_sqr()).sum::<f64>().sqrt();
    Ok(LeastSquares { solution, residual, rank })
}
