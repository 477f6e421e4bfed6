//! Lindblad generator construction.
//!
//! A bath couples to the device through a Hermitian operator. Projecting that
//! operator onto pairs of energy eigenspaces splits it into eigenoperators
//! (jump operators), one per distinct positive Bohr frequency; together
//! these frequencies form the dissipative spectrum of the bath. Every channel
//! relaxes at `γω³(1 + n(ω))` and is excited at that rate times `e^{-ω/T}`.
//!
//! Superoperators act on column-stacked density matrices:
//! `vec(A X B) = (Bᵀ ⊗ A) vec(X)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mathcore::{hermitian_eigensystem, vec_norm, ComplexMatrix, EigenSystem, MathError, Tolerances, C64, ZERO};

/// Matrix elements of the coupling below this fraction of its largest
/// eigenbasis element are treated as structural zeros.
const ELEMENT_CUTOFF: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LindbladError {
    #[error(transparent)]
    Math(#[from] MathError),
    #[error("invalid bath '{label}': {reason}")]
    InvalidBath { label: BathLabel, reason: String },
    #[error("invalid rate arguments: omega={omega}, temperature={temperature}, gamma={gamma}")]
    InvalidRate { omega: f64, temperature: f64, gamma: f64 },
    #[error("operator dimension {found} does not match system dimension {expected}")]
    DimensionMismatch { expected: usize, found: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BathLabel {
    Work,
    Hot,
    Cold,
}

impl BathLabel {
    pub const ALL: [BathLabel; 3] = [BathLabel::Work, BathLabel::Hot, BathLabel::Cold];

    pub fn as_str(self) -> &'static str {
        match self {
            BathLabel::Work => "work",
            BathLabel::Hot => "hot",
            BathLabel::Cold => "cold",
        }
    }
}

impl fmt::Display for BathLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BathLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "work" | "w" => Ok(BathLabel::Work),
            "hot" | "h" => Ok(BathLabel::Hot),
            "cold" | "c" => Ok(BathLabel::Cold),
            other => Err(format!("unknown bath '{other}' (expected cold, hot or work)")),
        }
    }
}

/// One heat bath: temperature, dissipation scale and the Hermitian operator
/// through which it touches the device.
#[derive(Debug, Clone)]
pub struct BathSpec {
    pub label: BathLabel,
    pub temperature: f64,
    pub gamma: f64,
    pub coupling: ComplexMatrix,
}

impl BathSpec {
    pub fn new(label: BathLabel, temperature: f64, gamma: f64, coupling: ComplexMatrix) -> Result<Self, LindbladError> {
        let invalid = |reason: &str| LindbladError::InvalidBath { label, reason: reason.to_string() };
        if !(temperature > 0.0 && temperature.is_finite()) {
            return Err(invalid("temperature must be positive and finite"));
        }
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(invalid("gamma must be positive and finite"));
        }
        if !coupling.is_hermitian(Tolerances::default().hermitian) {
            return Err(invalid("coupling operator must be Hermitian"));
        }
        Ok(Self { label, temperature, gamma, coupling })
    }
}

/// An open decay channel: the lowering eigenoperator at Bohr frequency
/// `omega` and its detailed-balance pair of rates.
#[derive(Debug, Clone)]
pub struct DecayChannel {
    pub bath: BathLabel,
    pub omega: f64,
    pub temperature: f64,
    pub jump: ComplexMatrix,
    pub rate_down: f64,
    pub rate_up: f64,
    /// Eigen-index pairs `(lower, upper)` merged into this channel.
    pub transitions: Vec<(usize, usize)>,
}

/// Relaxation and excitation rates `(γω³(1+n), e^{-ω/T}·γω³(1+n))` with
/// `n = 1/(e^{ω/T} - 1)`.
pub fn rate(omega: f64, temperature: f64, gamma: f64) -> Result<(f64, f64), LindbladError> {
    let valid = |x: f64| x > 0.0 && x.is_finite();
    if !(valid(omega) && valid(temperature) && valid(gamma)) {
        return Err(LindbladError::InvalidRate { omega, temperature, gamma });
    }
    let x = omega / temperature;
    // 1 + n = 1 / (1 - e^{-x})
    let down = gamma * omega.powi(3) / -(-x).exp_m1();
    let up = down * (-x).exp();
    Ok((down, up))
}

/// Default Bohr-frequency grouping tolerance for a spectrum.
pub fn default_group_tol(es: &EigenSystem) -> f64 {
    Tolerances::default().degenerate_gap * es.spectral_range().max(f64::MIN_POSITIVE)
}

pub fn eigenoperator_decomposition(
    h: &ComplexMatrix,
    bath: &BathSpec,
    group_tol: Option<f64>,
) -> Result<Vec<DecayChannel>, LindbladError> {
    let es = hermitian_eigensystem(h)?;
    decompose_in_eigenbasis(&es, bath, group_tol)
}

/// Splits `bath.coupling` into lowering eigenoperators of the Hamiltonian
/// whose eigensystem is `es`.
///
/// Transitions whose Bohr frequencies sit within `group_tol` of each other
/// (single linkage after sorting) share one jump operator; the channel
/// frequency is the mean of its members. Frequencies at or below `group_tol`
/// would be pure dephasing and are dropped with a warning if their weight
/// is not negligible.
pub fn decompose_in_eigenbasis(
    es: &EigenSystem,
    bath: &BathSpec,
    group_tol: Option<f64>,
) -> Result<Vec<DecayChannel>, LindbladError> {
    let d = es.dim();
    if bath.coupling.dim() != (d, d) {
        return Err(LindbladError::DimensionMismatch { expected: d, found: bath.coupling.rows() });
    }
    let tol = group_tol.unwrap_or_else(|| default_group_tol(es));
    let c = es.to_eigenbasis(&bath.coupling);
    let cutoff = ELEMENT_CUTOFF * c.max_abs();

    let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
    let mut dephasing = 0.0;
    for lower in 0..d {
        for upper in 0..d {
            let element = c[(lower, upper)];
            if element.norm() <= cutoff {
                continue;
            }
            let omega = es.eigenvalues[upper] - es.eigenvalues[lower];
            if omega > tol {
                pairs.push((omega, lower, upper));
            } else if omega.abs() <= tol {
                dephasing += element.norm_sqr();
            }
        }
    }
    if dephasing.sqrt() > ELEMENT_CUTOFF * bath.coupling.max_abs() {
        log::warn!(
            "{} coupling has a diagonal part of weight {:.3e} in the energy eigenbasis; pure dephasing is ignored",
            bath.label,
            dephasing.sqrt()
        );
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));

    let mut groups: Vec<Vec<(f64, usize, usize)>> = Vec::new();
    for pair in pairs {
        match groups.last_mut() {
            Some(group) if pair.0 - group.last().map_or(f64::NEG_INFINITY, |p| p.0) <= tol => group.push(pair),
            _ => groups.push(vec![pair]),
        }
    }

    groups
        .into_iter()
        .map(|group| {
            let omega = group.iter().map(|p| p.0).sum::<f64>() / group.len() as f64;
            let mut jump_eig = ComplexMatrix::zeros(d, d);
            let mut transitions = Vec::with_capacity(group.len());
            for &(_, lower, upper) in &group {
                jump_eig[(lower, upper)] = c[(lower, upper)];
                transitions.push((lower, upper));
            }
            let (rate_down, rate_up) = rate(omega, bath.temperature, bath.gamma)?;
            Ok(DecayChannel {
                bath: bath.label,
                omega,
                temperature: bath.temperature,
                jump: es.from_eigenbasis(&jump_eig),
                rate_down,
                rate_up,
                transitions,
            })
        })
        .collect()
}

/// A GKLS generator in matrix form together with the data it was built from.
#[derive(Debug, Clone)]
pub struct Liouvillian {
    pub dim: usize,
    pub matrix: ComplexMatrix,
    pub channels: Vec<DecayChannel>,
    pub hamiltonian: ComplexMatrix,
    pub includes_hamiltonian: bool,
}

impl Liouvillian {
    /// Frobenius norm of the generator matrix.
    pub fn norm(&self) -> f64 {
        self.matrix.frobenius_norm()
    }

    pub fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix, LindbladError> {
        check_dim(rho, self.dim)?;
        Ok(ComplexMatrix::unvectorize(&self.matrix.matvec(&rho.vectorize()), self.dim)?)
    }

    /// `‖L·vec(ρ)‖₂`
    pub fn residual(&self, rho: &ComplexMatrix) -> Result<f64, LindbladError> {
        check_dim(rho, self.dim)?;
        Ok(vec_norm(&self.matrix.matvec(&rho.vectorize())))
    }

    pub fn channels_of(&self, bath: BathLabel) -> Vec<DecayChannel> {
        self.channels.iter().filter(|c| c.bath == bath).cloned().collect()
    }
}

fn check_dim(op: &ComplexMatrix, d: usize) -> Result<(), LindbladError> {
    if op.dim() == (d, d) {
        Ok(())
    } else {
        Err(LindbladError::DimensionMismatch { expected: d, found: op.rows() })
    }
}

pub fn build_liouvillian(
    h: &ComplexMatrix,
    channels: Vec<DecayChannel>,
    include_hamiltonian: bool,
) -> Result<Liouvillian, LindbladError> {
    let d = h.require_square()?;
    for ch in &channels {
        check_dim(&ch.jump, d)?;
    }
    let matrix = generator_matrix(h, &channels, include_hamiltonian);
    Ok(Liouvillian { dim: d, matrix, channels, hamiltonian: h.clone(), includes_hamiltonian: include_hamiltonian })
}

/// `ρ ↦ -i[H,ρ]·flag + Σ Γ↓ D[A](ρ) + Γ↑ D[A†](ρ)` as a `d² x d²` matrix.
pub(crate) fn generator_matrix(
    h: &ComplexMatrix,
    channels: &[DecayChannel],
    include_hamiltonian: bool,
) -> ComplexMatrix {
    let d = h.rows();
    let id = ComplexMatrix::identity(d);
    let mut l = ComplexMatrix::zeros(d * d, d * d);
    if include_hamiltonian {
        let minus_i = C64::new(0.0, -1.0);
        add_kron(&mut l, &id, h, minus_i);
        add_kron(&mut l, &h.transpose(), &id, -minus_i);
    }
    for ch in channels {
        let lowering = &ch.jump;
        let raising = lowering.dagger();
        add_dissipator(&mut l, lowering, &raising, ch.rate_down, &id);
        add_dissipator(&mut l, &raising, lowering, ch.rate_up, &id);
    }
    l
}

fn add_dissipator(l: &mut ComplexMatrix, x: &ComplexMatrix, x_dag: &ComplexMatrix, rate: f64, id: &ComplexMatrix) {
    if rate == 0.0 {
        return;
    }
    let r = C64::new(rate, 0.0);
    let xdx = x_dag.matmul(x);
    // X ρ X†  ->  conj(X) ⊗ X
    add_kron(l, &x.conj(), x, r);
    add_kron(l, id, &xdx, -0.5 * r);
    add_kron(l, &xdx.transpose(), id, -0.5 * r);
}

fn add_kron(out: &mut ComplexMatrix, a: &ComplexMatrix, b: &ComplexMatrix, scale: C64) {
    let (r1, c1) = a.dim();
    let (r2, c2) = b.dim();
    for i in 0..r1 {
        for j in 0..c1 {
            let aij = a[(i, j)];
            if aij == ZERO {
                continue;
            }
            let f = aij * scale;
            for k in 0..r2 {
                for m in 0..c2 {
                    let bkm = b[(k, m)];
                    if bkm != ZERO {
                        out[(i * r2 + k, j * c2 + m)] += f * bkm;
                    }
                }
            }
        }
    }
}

/// `D_α(ρ)` summed over the given channels, evaluated directly with matrix
/// products rather than through the superoperator.
pub fn apply_dissipator(channels: &[DecayChannel], rho: &ComplexMatrix) -> Result<ComplexMatrix, LindbladError> {
    let d = rho.require_square()?;
    let mut out = ComplexMatrix::zeros(d, d);
    for ch in channels {
        check_dim(&ch.jump, d)?;
        let a = &ch.jump;
        let a_dag = a.dagger();
        for (x, x_dag, rate) in [(a, &a_dag, ch.rate_down), (&a_dag, a, ch.rate_up)] {
            let sandwich = x.matmul(rho).matmul(x_dag);
            let xdx = x_dag.matmul(x);
            let anti = xdx.anticommutator(rho);
            out += &(&sandwich - &anti.scale_real(0.5)).scale_real(rate);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qubit_bath(omega: f64, t: f64) -> (ComplexMatrix, BathSpec) {
        let h = ComplexMatrix::diagonal(&[0.0, omega]);
        let sx = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        (h, BathSpec::new(BathLabel::Cold, t, 1.0, sx).unwrap())
    }

    fn gibbs_qubit(omega: f64, t: f64) -> ComplexMatrix {
        let pe = 1.0 / (1.0 + (omega / t).exp());
        ComplexMatrix::diagonal(&[1.0 - pe, pe])
    }

    #[test]
    fn rate_closed_form() {
        let (down, up) = rate(40.0, 20.0, 1.0).unwrap();
        let e2 = std::f64::consts::E.powi(2);
        let oracle = 64000.0 * (1.0 + 1.0 / (e2 - 1.0));
        assert!((down - oracle).abs() < 1e-9 * oracle, "{down}");
        assert!((down - 74017.1).abs() < 0.1 && (up - 10017.1).abs() < 0.1, "{down} {up}");
        assert!((up / down - (-2.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn rate_zero_occupation_limit() {
        let (down, up) = rate(10.0, 1e-3, 2.0).unwrap();
        assert_eq!(down, 2.0 * 1000.0);
        assert_eq!(up, 0.0);
    }

    #[test]
    fn rate_rejects_bad_arguments() {
        assert!(rate(0.0, 1.0, 1.0).is_err());
        assert!(rate(1.0, -1.0, 1.0).is_err());
        assert!(rate(1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn bath_validation() {
        let sx = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        assert!(BathSpec::new(BathLabel::Hot, 0.0, 1.0, sx.clone()).is_err());
        assert!(BathSpec::new(BathLabel::Hot, 1.0, -1.0, sx).is_err());
        let lower = ComplexMatrix::unit(2, 0, 1);
        assert!(BathSpec::new(BathLabel::Hot, 1.0, 1.0, lower).is_err());
    }

    #[test]
    fn bare_maser_cold_bath_single_channel() {
        let h = ComplexMatrix::diagonal(&[0.0, 7.5, 40.0]);
        let cold = &ComplexMatrix::unit(3, 0, 1) + &ComplexMatrix::unit(3, 1, 0);
        let bath = BathSpec::new(BathLabel::Cold, 10.0, 1.0, cold).unwrap();
        let chans = eigenoperator_decomposition(&h, &bath, None).unwrap();
        assert_eq!(chans.len(), 1);
        assert!((chans[0].omega - 7.5).abs() < 1e-12);
        assert!((&chans[0].jump - &ComplexMatrix::unit(3, 0, 1)).max_abs() < 1e-14);
    }

    #[test]
    fn pure_commutator_annihilates_eigenprojectors() {
        let h = ComplexMatrix::from_real_rows(&[&[1.0, 0.3, 0.0], &[0.3, 2.0, 0.1], &[0.0, 0.1, 3.5]]);
        let l = build_liouvillian(&h, Vec::new(), true).unwrap();
        let es = hermitian_eigensystem(&h).unwrap();
        for k in 0..3 {
            let v = es.vector(k);
            let p = ComplexMatrix::outer(&v, &v);
            assert!(l.apply(&p).unwrap().max_abs() < 1e-13);
        }
    }

    #[test]
    fn qubit_gibbs_is_fixed_point() {
        let (h, bath) = qubit_bath(7.5, 10.0);
        let chans = eigenoperator_decomposition(&h, &bath, None).unwrap();
        let l = build_liouvillian(&h, chans.clone(), true).unwrap();
        let g = gibbs_qubit(7.5, 10.0);
        assert!(l.apply(&g).unwrap().max_abs() < 1e-12 * l.norm());
        assert!(apply_dissipator(&chans, &g).unwrap().max_abs() < 1e-12 * chans[0].rate_down);
    }

    #[test]
    fn superoperator_matches_direct_dissipator() {
        let h = ComplexMatrix::from_real_rows(&[&[0.0, 0.2, 0.0], &[0.2, 3.0, 0.4], &[0.0, 0.4, 7.0]]);
        let coupling =
            ComplexMatrix::from_fn(3, 3, |i, j| if i == j { ZERO } else { C64::new(1.0, 0.3 * (j as f64 - i as f64)) });
        let bath = BathSpec::new(BathLabel::Work, 2.0, 0.01, coupling).unwrap();
        let chans = eigenoperator_decomposition(&h, &bath, None).unwrap();
        let l = build_liouvillian(&h, chans.clone(), false).unwrap();
        let rho = ComplexMatrix::from_fn(3, 3, |i, j| {
            if i == j {
                C64::new([0.5, 0.3, 0.2][i], 0.0)
            } else {
                C64::new(0.05, 0.02 * (j as f64 - i as f64))
            }
        });
        let direct = apply_dissipator(&chans, &rho).unwrap();
        let via_l = l.apply(&rho).unwrap();
        assert!((&direct - &via_l).max_abs() < 1e-15);
        assert!(direct.trace().norm() < 1e-15);
        assert!(direct.is_hermitian(1e-12));
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let (h, bath) = qubit_bath(1.0, 1.0);
        let chans = eigenoperator_decomposition(&h, &bath, None).unwrap();
        let h3 = ComplexMatrix::identity(3);
        assert!(matches!(build_liouvillian(&h3, chans.clone(), true), Err(LindbladError::DimensionMismatch { .. })));
        assert!(apply_dissipator(&chans, &ComplexMatrix::identity(3)).is_err());
        let bad = BathSpec::new(BathLabel::Cold, 1.0, 1.0, ComplexMatrix::identity(3)).unwrap();
        assert!(eigenoperator_decomposition(&h, &bad, None).is_err());
    }
}
