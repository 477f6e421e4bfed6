//! Non-equilibrium steady states.
//!
//! The fixed point is found by stacking the generator with a trace row and
//! solving the overdetermined system by least squares. The solve runs in the
//! energy eigenbasis of the Hamiltonian with every row scaled to unit
//! max-norm: in that basis the generator splits cleanly into fast coherence
//! rows (Bohr frequencies) and slow population rows (rates that may be many
//! orders of magnitude smaller), and row scaling keeps the slow block from
//! drowning in rounding noise of the fast one.

use thiserror::Error;

use crate::lindblad::{generator_matrix, DecayChannel, Liouvillian};
use crate::mathcore::{
    hermitian_eigensystem, singular_values, solve_stacked_least_squares_with, vec_norm, ComplexMatrix, MathError,
    Tolerances, ONE, ZERO,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NessError {
    #[error(transparent)]
    Math(MathError),
    #[error("steady state is not unique: generator kernel has dimension {null_dim}")]
    NonErgodic { null_dim: usize },
    #[error("steady state is not positive: minimum eigenvalue {min_eigenvalue:.3e}")]
    PositivityFailure { min_eigenvalue: f64 },
    #[error("fixed-point residual {residual:.3e} exceeds {bound:.3e}")]
    Residual { residual: f64, bound: f64 },
}

impl From<MathError> for NessError {
    fn from(e: MathError) -> Self {
        NessError::Math(e)
    }
}

#[derive(Debug, Clone)]
pub struct SteadyState {
    pub rho: ComplexMatrix,
    /// `‖L·vec(ρ)‖₂` with the original generator.
    pub residual: f64,
    pub min_eigenvalue: f64,
    pub null_dim: usize,
}

impl SteadyState {
    /// `ρ` with eigenvalues below zero clipped and the trace restored.
    /// Meant for display; currents are always computed from `rho` itself.
    pub fn clipped(&self) -> Result<ComplexMatrix, NessError> {
        let es = hermitian_eigensystem(&self.rho)?;
        let clipped: Vec<f64> = es.eigenvalues.iter().map(|&p| p.max(0.0)).collect();
        let total: f64 = clipped.iter().sum();
        let diag = ComplexMatrix::diagonal(&clipped.iter().map(|p| p / total).collect::<Vec<_>>());
        Ok(es.from_eigenbasis(&diag))
    }
}

pub fn steady_state(l: &Liouvillian) -> Result<SteadyState, NessError> {
    steady_state_with(l, &Tolerances::default())
}

pub fn steady_state_with(l: &Liouvillian, tol: &Tolerances) -> Result<SteadyState, NessError> {
    let d = l.dim;
    let es = hermitian_eigensystem(&l.hamiltonian)?;
    let h_eig = ComplexMatrix::diagonal(&es.eigenvalues);
    let channels: Vec<DecayChannel> =
        l.channels.iter().map(|ch| DecayChannel { jump: es.to_eigenbasis(&ch.jump), ..ch.clone() }).collect();
    let l_eig = generator_matrix(&h_eig, &channels, l.includes_hamiltonian);

    let n = d * d;
    let mut stacked = ComplexMatrix::zeros(n + 1, n);
    for i in 0..n {
        let row = l_eig.row(i);
        let scale = row.iter().fold(0.0f64, |m, z| m.max(z.norm()));
        if scale > f64::MIN_POSITIVE {
            for (j, z) in row.iter().enumerate() {
                stacked[(i, j)] = z / scale;
            }
        }
    }
    for k in 0..d {
        stacked[(n, k + k * d)] = ONE;
    }
    let mut rhs = vec![ZERO; n + 1];
    rhs[n] = ONE;

    let ls = match solve_stacked_least_squares_with(&stacked, &rhs, tol.rank) {
        Ok(ls) => ls,
        Err(MathError::RankDeficient { rank, cols }) => {
            return Err(NessError::NonErgodic { null_dim: cols + 1 - rank });
        }
        Err(e) => return Err(e.into()),
    };

    let rho_eig = ComplexMatrix::unvectorize(&ls.solution, d)?;
    let mut rho = es.from_eigenbasis(&rho_eig).hermitian_part();
    let trace = rho.trace().re;
    rho = rho.scale_real(1.0 / trace);

    let residual = vec_norm(&l.matrix.matvec(&rho.vectorize()));
    let bound = tol.residual * l.norm();
    if residual > bound {
        return Err(NessError::Residual { residual, bound });
    }
    let min_eigenvalue = hermitian_eigensystem(&rho)?.eigenvalues[0];
    if min_eigenvalue < -tol.positivity {
        return Err(NessError::PositivityFailure { min_eigenvalue });
    }
    Ok(SteadyState { rho, residual, min_eigenvalue, null_dim: 1 })
}

/// Singular-value summary of a generator.
#[derive(Debug, Clone)]
pub struct UniquenessReport {
    /// Number of singular values below `1e-10·σ_max`.
    pub null_dim: usize,
    pub smallest: f64,
    pub second_smallest: f64,
    pub largest: f64,
}

pub fn uniqueness_report(l: &Liouvillian) -> Result<UniquenessReport, NessError> {
    let sv = singular_values(&l.matrix)?;
    let largest = sv.last().copied().unwrap_or(0.0);
    let cutoff = Tolerances::default().rank * largest;
    let null_dim = if largest == 0.0 { sv.len() } else { sv.iter().filter(|&&s| s < cutoff).count() };
    Ok(UniquenessReport {
        null_dim,
        smallest: sv.first().copied().unwrap_or(0.0),
        second_smallest: sv.get(1).copied().unwrap_or(0.0),
        largest,
    })
}

/// Trace distance `½‖a - b‖₁` between two Hermitian matrices.
pub fn trace_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64, NessError> {
    let diff = (a - b).hermitian_part();
    Ok(0.5 * hermitian_eigensystem(&diff)?.eigenvalues.iter().map(|e| e.abs()).sum::<f64>())
}

/// Gibbs state `e^{-H/T}/Z` from the eigensystem of `h`.
pub fn gibbs_state(h: &ComplexMatrix, temperature: f64) -> Result<ComplexMatrix, NessError> {
    let es = hermitian_eigensystem(h)?;
    let e0 = es.eigenvalues[0];
    let weights: Vec<f64> = es.eigenvalues.iter().map(|e| (-(e - e0) / temperature).exp()).collect();
    let z: f64 = weights.iter().sum();
    let diag: Vec<f64> = weights.iter().map(|w| w / z).collect();
    Ok(es.from_eigenbasis(&ComplexMatrix::diagonal(&diag)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lindblad::{build_liouvillian, eigenoperator_decomposition, BathLabel, BathSpec};

    fn qubit(omega: f64, t: f64) -> Liouvillian {
        let h = ComplexMatrix::diagonal(&[0.0, omega]);
        let sx = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let bath = BathSpec::new(BathLabel::Cold, t, 1e-3, sx).unwrap();
        let chans = eigenoperator_decomposition(&h, &bath, None).unwrap();
        build_liouvillian(&h, chans, true).unwrap()
    }

    #[test]
    fn thermal_qubit() {
        let ss = steady_state(&qubit(7.5, 10.0)).unwrap();
        let ratio = ss.rho[(1, 1)].re / ss.rho[(0, 0)].re;
        assert!((ratio - (-0.75f64).exp()).abs() < 1e-13);
        assert!(ss.rho[(0, 1)].norm() < 1e-15);
        assert_eq!(ss.null_dim, 1);
    }

    #[test]
    fn pure_commutator_is_not_ergodic() {
        let h = ComplexMatrix::diagonal(&[0.0, 1.0, 3.0]);
        let l = build_liouvillian(&h, Vec::new(), true).unwrap();
        assert_eq!(steady_state(&l).unwrap_err(), NessError::NonErgodic { null_dim: 3 });
    }

    #[test]
    fn zero_generator_null_space_is_everything() {
        let l = build_liouvillian(&ComplexMatrix::zeros(3, 3), Vec::new(), false).unwrap();
        assert_eq!(uniqueness_report(&l).unwrap().null_dim, 9);
    }

    #[test]
    fn two_uncoupled_qubits_have_unique_fixed_point() {
        let h = ComplexMatrix::diagonal(&[0.0, 1.0, 2.5, 3.5]);
        let left = ComplexMatrix::from_real_rows(&[
            &[0.0, 1.0, 0.0, 0.0],
            &[1.0, 0.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 1.0],
            &[0.0, 0.0, 1.0, 0.0],
        ]);
        let right = ComplexMatrix::from_real_rows(&[
            &[0.0, 0.0, 1.0, 0.0],
            &[0.0, 0.0, 0.0, 1.0],
            &[1.0, 0.0, 0.0, 0.0],
            &[0.0, 1.0, 0.0, 0.0],
        ]);
        let mut chans =
            eigenoperator_decomposition(&h, &BathSpec::new(BathLabel::Cold, 1.0, 0.01, left).unwrap(), None).unwrap();
        chans.extend(
            eigenoperator_decomposition(&h, &BathSpec::new(BathLabel::Hot, 2.0, 0.01, right).unwrap(), None).unwrap(),
        );
        let l = build_liouvillian(&h, chans, true).unwrap();
        assert_eq!(uniqueness_report(&l).unwrap().null_dim, 1);
        let ss = steady_state(&l).unwrap();
        assert!(ss.min_eigenvalue > 0.0);
    }

    #[test]
    fn gibbs_and_trace_distance() {
        let h = ComplexMatrix::diagonal(&[0.0, 1.0]);
        let g = gibbs_state(&h, 1.0).unwrap();
        let p1 = 1.0 / (1.0 + std::f64::consts::E);
        assert!((g[(1, 1)].re - p1).abs() < 1e-15);
        let flipped = ComplexMatrix::diagonal(&[p1, 1.0 - p1]);
        assert!((trace_distance(&g, &flipped).unwrap() - (1.0 - 2.0 * p1)).abs() < 1e-14);
    }
}
