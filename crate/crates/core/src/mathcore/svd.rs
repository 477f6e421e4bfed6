use super::matrix::{ComplexMatrix, C64};
use super::{MathError, Tolerances};

/// Singular values in ascending order, by one-sided (Hestenes) Jacobi.
///
/// Columns are rotated pairwise until mutually orthogonal; the singular
/// values are then the column norms. Absolute accuracy is about `ε·σ_max`,
/// so exact zeros come out at rounding level.
pub fn singular_values(a: &ComplexMatrix) -> Result<Vec<f64>, MathError> {
    if !a.is_finite() {
        return Err(MathError::NonFinite);
    }
    let work = if a.rows() >= a.cols() { a.clone() } else { a.dagger() };
    let (m, n) = work.dim();
    let mut cols: Vec<Vec<C64>> = (0..n).map(|j| work.column(j)).collect();
    let max_sweeps = Tolerances::default().max_sweeps;
    let eps = f64::EPSILON * (m as f64).sqrt();

    let mut converged = n < 2;
    for _ in 0..max_sweeps {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha: f64 = cols[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = cols[q].iter().map(|z| z.norm_sqr()).sum();
                if alpha == 0.0 || beta == 0.0 {
                    continue;
                }
                let gamma: C64 = cols[p].iter().zip(&cols[q]).map(|(x, y)| x.conj() * y).sum();
                let g = gamma.norm();
                if g <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let tau = (beta - alpha) / (2.0 * g);
                let sign = if tau >= 0.0 { 1.0 } else { -1.0 };
                let t = sign / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let s_fwd = phase * s;
                let s_bwd = phase.conj() * s;
                let (left, right) = cols.split_at_mut(q);
                for (x, y) in left[p].iter_mut().zip(right[0].iter_mut()) {
                    let xp = *x;
                    let yq = *y;
                    *x = xp * c - s_bwd * yq;
                    *y = s_fwd * xp + yq * c;
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(MathError::NoConvergence { sweeps: max_sweeps });
    }

    let mut sv: Vec<f64> = cols.iter().map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()).collect();
    sv.sort_by(f64::total_cmp);
    Ok(sv)
}
