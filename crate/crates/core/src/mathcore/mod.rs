//! Dense complex linear algebra: Hermitian eigensolver, rank-revealing
//! least squares, singular values and a real-cubic root finder.
//!
//! Everything here works on small matrices (at most a few hundred rows) and
//! is written for accuracy rather than asymptotic speed.

mod cubic;
mod eigen;
mod lstsq;
mod matrix;
mod svd;

pub use cubic::real_cubic_roots;
pub use eigen::{hermitian_eigensystem, hermitian_eigensystem_with, EigenSystem};
pub use lstsq::{solve_stacked_least_squares, solve_stacked_least_squares_with, LeastSquares};
pub use matrix::{dot, vec_norm, ComplexMatrix, C64, ONE, ZERO};
pub use svd::singular_values;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MathError {
    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: expected {expected:?}, found {found:?}")]
    DimensionMismatch { expected: (usize, usize), found: (usize, usize) },
    #[error("matrix is not Hermitian (deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },
    #[error("Jacobi iteration did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("system is rank deficient: numerical rank {rank} < {cols} unknowns")]
    RankDeficient { rank: usize, cols: usize },
    #[error("least-squares system is underdetermined ({rows} rows < {cols} columns)")]
    Underdetermined { rows: usize, cols: usize },
    #[error("cubic has complex roots (discriminant {discriminant:.3e})")]
    ComplexRoots { discriminant: f64 },
    #[error("non-finite value encountered")]
    NonFinite,
}

/// Numerical tolerances shared by the linear-algebra routines and the
/// steady-state pipeline built on top of them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Hermiticity check, relative to the largest-magnitude entry.
    pub hermitian: f64,
    /// Maximum number of cyclic Jacobi sweeps.
    pub max_sweeps: usize,
    /// Eigenvalues closer than this fraction of the spectral range form a
    /// degenerate cluster (also the default Bohr-frequency grouping tolerance).
    pub degenerate_gap: f64,
    /// Relative pivot / singular value cutoff for numerical rank.
    pub rank: f64,
    /// Smallest eigenvalue a steady state may have.
    pub positivity: f64,
    /// Steady-state residual bound, relative to the generator norm.
    pub residual: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            hermitian: 1e-12,
            max_sweeps: 100,
            degenerate_gap: 1e-9,
            rank: 1e-10,
            positivity: 1e-10,
            residual: 1e-10,
        }
    }
}
