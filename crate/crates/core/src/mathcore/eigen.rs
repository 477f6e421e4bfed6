use super::matrix::{ComplexMatrix, C64, ZERO};
use super::{MathError, Tolerances};

/// Eigen-decomposition of a Hermitian matrix: ascending eigenvalues and the
/// matching orthonormal eigenvectors stored as columns.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl EigenSystem {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.eigenvectors.column(k)
    }

    /// `max(E) - min(E)`, zero for an empty or scalar spectrum.
    pub fn spectral_range(&self) -> f64 {
        match (self.eigenvalues.first(), self.eigenvalues.last()) {
            (Some(lo), Some(hi)) => hi - lo,
            _ => 0.0,
        }
    }

    /// Expresses `op` in the eigenbasis: `V† op V`.
    pub fn to_eigenbasis(&self, op: &ComplexMatrix) -> ComplexMatrix {
        self.eigenvectors.dagger().matmul(op).matmul(&self.eigenvectors)
    }

    /// Maps an eigenbasis operator back: `V op V†`.
    pub fn from_eigenbasis(&self, op: &ComplexMatrix) -> ComplexMatrix {
        self.eigenvectors.matmul(op).matmul(&self.eigenvectors.dagger())
    }
}

pub fn hermitian_eigensystem(m: &ComplexMatrix) -> Result<EigenSystem, MathError> {
    hermitian_eigensystem_with(m, &Tolerances::default())
}

/// Cyclic complex Jacobi eigensolver.
///
/// Each rotation is the real Jacobi rotation conjugated by the phase of the
/// pivot, so the pivot is annihilated exactly and the diagonal stays real.
pub fn hermitian_eigensystem_with(m: &ComplexMatrix, tol: &Tolerances) -> Result<EigenSystem, MathError> {
    let n = m.require_square()?;
    if !m.is_finite() {
        return Err(MathError::NonFinite);
    }
    let deviation = m.hermitian_deviation();
    if deviation > tol.hermitian * m.max_abs().max(f64::MIN_POSITIVE) {
        return Err(MathError::NotHermitian { deviation });
    }

    let mut a = m.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let norm = a.frobenius_norm();
    let target = (n.max(1) as f64) * f64::EPSILON * norm;

    let mut converged = false;
    for _ in 0..tol.max_sweeps {
        if off_diagonal_norm(&a) <= target {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged && off_diagonal_norm(&a) > target {
        return Err(MathError::NoConvergence { sweeps: tol.max_sweeps });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vectors = ComplexMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);

    let range = match (eigenvalues.first(), eigenvalues.last()) {
        (Some(lo), Some(hi)) => hi - lo,
        _ => 0.0,
    };
    let gap = tol.degenerate_gap * range.max(f64::MIN_POSITIVE);
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && eigenvalues[end] - eigenvalues[end - 1] < gap {
            end += 1;
        }
        if end - start > 1 {
            orthonormalize_columns(&mut vectors, start, end);
        }
        start = end;
    }
    for k in 0..n {
        fix_phase(&mut vectors, k);
    }

    Ok(EigenSystem { eigenvalues, eigenvectors: vectors })
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let abs = apq.norm();
    if abs == 0.0 {
        return;
    }
    let n = a.rows();
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let phase = apq / abs;
    let tau = (aqq - app) / (2.0 * abs);
    let t = if tau.is_infinite() {
        0.0
    } else {
        let sign = if tau >= 0.0 { 1.0 } else { -1.0 };
        sign / (tau.abs() + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let s_fwd = phase * s; // s e^{iφ}
    let s_bwd = phase.conj() * s; // s e^{-iφ}

    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c - s_bwd * akq;
        a[(k, q)] = s_fwd * akp + akq * c;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c - s_fwd * aqk;
        a[(q, k)] = s_bwd * apk + aqk * c;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = C64::new(app - t * abs, 0.0);
    a[(q, q)] = C64::new(aqq + t * abs, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c - s_bwd * vkq;
        v[(k, q)] = s_fwd * vkp + vkq * c;
    }
}

/// Modified Gram–Schmidt on columns `start..end`.
fn orthonormalize_columns(v: &mut ComplexMatrix, start: usize, end: usize) {
    let n = v.rows();
    for k in start..end {
        for j in start..k {
            let mut proj = ZERO;
            for r in 0..n {
                proj += v[(r, j)].conj() * v[(r, k)];
            }
            for r in 0..n {
                let vj = v[(r, j)];
                v[(r, k)] -= proj * vj;
            }
        }
        let norm: f64 = (0..n).map(|r| v[(r, k)].norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.0 {
            for r in 0..n {
                v[(r, k)] /= norm;
            }
        }
    }
}

/// First component above 1e-10 made real and positive.
fn fix_phase(v: &mut ComplexMatrix, k: usize) {
    let n = v.rows();
    if let Some(r) = (0..n).find(|&r| v[(r, k)].norm() > 1e-10) {
        let z = v[(r, k)];
        let phase = z.conj() / z.norm();
        for i in 0..n {
            v[(i, k)] *= phase;
        }
        v[(r, k)] = C64::new(v[(r, k)].norm(), 0.0);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn residual(m: &ComplexMatrix, es: &EigenSystem) -> f64 {
        let mut worst: f64 = 0.0;
        for k in 0..es.dim() {
            let vk = es.vector(k);
            let mv = m.matvec(&vk);
            let r: f64 = mv.iter().zip(&vk).map(|(a, b)| (a - b * es.eigenvalues[k]).norm_sqr()).sum::<f64>().sqrt();
            worst = worst.max(r);
        }
        worst
    }

    #[test]
    fn identity_is_its_own_eigenbasis() {
        let es = hermitian_eigensystem(&ComplexMatrix::identity(6)).unwrap();
        assert!(es.eigenvalues.iter().all(|&e| (e - 1.0).abs() < 1e-15));
        assert_eq!(es.eigenvectors, ComplexMatrix::identity(6));
    }

    #[test]
    fn flip_flop_block() {
        let j = 0.1;
        let m = ComplexMatrix::from_real_rows(&[&[0.0, j], &[j, 0.0]]);
        let es = hermitian_eigensystem(&m).unwrap();
        assert!((es.eigenvalues[0] + 0.1).abs() < 1e-15);
        assert!((es.eigenvalues[1] - 0.1).abs() < 1e-15);
        assert!(residual(&m, &es) < 1e-15);
        // first nonzero component real-positive
        assert!(es.eigenvectors[(0, 0)].re > 0.0 && es.eigenvectors[(0, 0)].im == 0.0);
    }

    #[test]
    fn complex_entries_converge() {
        let m = ComplexMatrix::from_fn(4, 4, |i, j| {
            if i == j {
                C64::new(i as f64, 0.0)
            } else if i < j {
                C64::new(0.3 * (i + j) as f64, 0.7 - 0.1 * j as f64)
            } else {
                C64::new(0.3 * (i + j) as f64, -(0.7 - 0.1 * i as f64))
            }
        });
        let es = hermitian_eigensystem(&m).unwrap();
        assert!(residual(&m, &es) < 1e-12 * m.frobenius_norm());
        assert!(es.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        let u = &es.eigenvectors;
        let gram = u.dagger().matmul(u);
        assert!((&gram - &ComplexMatrix::identity(4)).max_abs() < 1e-13);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(hermitian_eigensystem(&m), Err(MathError::NotHermitian { .. })));
        let r = ComplexMatrix::zeros(2, 3);
        assert!(matches!(hermitian_eigensystem(&r), Err(MathError::NotSquare { .. })));
    }

    #[test]
    fn degenerate_cluster_stays_orthonormal() {
        // eigenvalue 2 with multiplicity 2
        let m = ComplexMatrix::from_real_rows(&[&[2.0, 0.0, 0.0], &[0.0, 1.5, 0.5], &[0.0, 0.5, 1.5]]);
        let es = hermitian_eigensystem(&m).unwrap();
        assert!((es.eigenvalues[0] - 1.0).abs() < 1e-14);
        assert!((es.eigenvalues[1] - 2.0).abs() < 1e-14);
        assert!((es.eigenvalues[2] - 2.0).abs() < 1e-14);
        let u = &es.eigenvectors;
        assert!((&u.dagger().matmul(u) - &ComplexMatrix::identity(3)).max_abs() < 1e-14);
    }
}
