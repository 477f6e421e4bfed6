//! Steady-state thermodynamics: heat currents, probe readings, spin
//! temperatures and coefficients of performance.
//!
//! Sign convention: a positive current `q_α` is heat flowing from bath `α`
//! into the device. `sigma = -Σ q_α/T_α` is the entropy production rate and
//! is non-negative.

use thiserror::Error;

use crate::lindblad::{apply_dissipator, BathLabel, DecayChannel, LindbladError, Liouvillian};
use crate::mathcore::{vec_norm, ComplexMatrix, MathError, Tolerances};
use crate::models::{ModelError, ModelSpec, ProbeSpec, Temperatures};
use crate::ness::{steady_state_with, NessError, SteadyState};

/// Relative size of the fixed-point residual above which a state is
/// considered stale for the generator it is paired with.
const STALE_RESIDUAL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ThermoError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Ness(#[from] NessError),
    #[error(transparent)]
    Lindblad(#[from] LindbladError),
    #[error(transparent)]
    Math(#[from] MathError),
    #[error("state is not a fixed point of the generator: residual {residual:.3e} > {bound:.3e}")]
    StaleState { residual: f64, bound: f64 },
    #[error("coefficient of performance undefined: work current {q_w:.3e} vanishes")]
    UndefinedCop { q_w: f64 },
    #[error("invalid arguments: {0}")]
    Domain(String),
    #[error("probe bias {bias} outside [-1, 1]")]
    BiasOutOfRange { bias: f64 },
    #[error("population of level {level} is {population:.3e}; spin temperature undefined")]
    EmptyLevel { level: usize, population: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeatCurrents {
    pub q_w: f64,
    pub q_h: f64,
    pub q_c: f64,
    pub sigma: f64,
    pub first_law_residual: f64,
    /// Gross energy exchanged per unit time, summed over both directions of
    /// every channel. Sets the scale against which net currents count as zero.
    pub throughput: f64,
}

impl HeatCurrents {
    pub fn get(&self, bath: BathLabel) -> f64 {
        match bath {
            BathLabel::Work => self.q_w,
            BathLabel::Hot => self.q_h,
            BathLabel::Cold => self.q_c,
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.q_w.abs().max(self.q_h.abs()).max(self.q_c.abs())
    }

    /// `Σ q_α / T_α`, non-positive by the second law.
    pub fn clausius_sum(&self, temps: &Temperatures) -> f64 {
        self.q_w / temps.work + self.q_h / temps.hot + self.q_c / temps.cold
    }
}

/// `q_α = tr{H D_α(ρ)}` with `H` the full coherent Hamiltonian of the model.
pub fn heat_currents(model: &ModelSpec, l: &Liouvillian, rho: &ComplexMatrix) -> Result<HeatCurrents, ThermoError> {
    let residual = vec_norm(&l.matrix.matvec(&rho.vectorize()));
    let bound = STALE_RESIDUAL * l.norm();
    if residual > bound {
        return Err(ThermoError::StaleState { residual, bound });
    }
    currents_from_channels(&model.hamiltonian, &l.channels, rho, &model.params.temperatures)
}

fn currents_from_channels(
    h: &ComplexMatrix,
    channels: &[DecayChannel],
    rho: &ComplexMatrix,
    temps: &Temperatures,
) -> Result<HeatCurrents, ThermoError> {
    let mut q = [0.0; 3];
    for (slot, bath) in BathLabel::ALL.iter().enumerate() {
        let own: Vec<DecayChannel> = channels.iter().filter(|c| c.bath == *bath).cloned().collect();
        q[slot] = h.matmul(&apply_dissipator(&own, rho)?).trace().re;
    }
    let mut throughput = 0.0;
    for ch in channels {
        let a = &ch.jump;
        let a_dag = a.dagger();
        let down = a_dag.matmul(a).matmul(rho).trace().re;
        let up = a.matmul(&a_dag).matmul(rho).trace().re;
        throughput += ch.omega * (ch.rate_down * down + ch.rate_up * up);
    }
    let [q_w, q_h, q_c] = q;
    Ok(HeatCurrents {
        q_w,
        q_h,
        q_c,
        sigma: -(q_w / temps.work + q_h / temps.hot + q_c / temps.cold),
        first_law_residual: (q_w + q_h + q_c).abs(),
        throughput,
    })
}

/// Generator, steady state and currents of one model.
#[derive(Debug, Clone)]
pub struct SteadyAnalysis {
    pub liouvillian: Liouvillian,
    pub state: SteadyState,
    pub currents: HeatCurrents,
}

pub fn analyze(model: &ModelSpec) -> Result<SteadyAnalysis, ThermoError> {
    analyze_with(model, &Tolerances::default())
}

pub fn analyze_with(model: &ModelSpec, tol: &Tolerances) -> Result<SteadyAnalysis, ThermoError> {
    let liouvillian = model.liouvillian()?;
    let state = steady_state_with(&liouvillian, tol)?;
    let currents = heat_currents(model, &liouvillian, &state.rho)?;
    Ok(SteadyAnalysis { liouvillian, state, currents })
}

/// Largest relative spread among `q_c/ω_c`, `q_w/(ω_h-ω_c)` and `-q_h/ω_h`.
/// Zero for an endoreversible device, where all three equal one cycle rate,
/// and for currents that vanish against the throughput (no net cycle).
pub fn flux_rate_check(currents: &HeatCurrents, omega_c: f64, omega_h: f64) -> f64 {
    let rates = [currents.q_c / omega_c, currents.q_w / (omega_h - omega_c), -currents.q_h / omega_h];
    let scale = rates.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    if scale == 0.0 || currents.max_abs() <= 1e-12 * currents.throughput {
        return 0.0;
    }
    let hi = rates.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = rates.iter().copied().fold(f64::INFINITY, f64::min);
    (hi - lo) / scale
}

/// `q_c / q_w`.
///
/// Undefined when the work current is negligible either against the cold
/// current or against the gross energy throughput (reversible point).
pub fn cop(currents: &HeatCurrents) -> Result<f64, ThermoError> {
    let q_w = currents.q_w;
    if q_w.abs() <= 1e-14 * currents.q_c.abs() || q_w.abs() <= 1e-12 * currents.throughput || q_w == 0.0 {
        return Err(ThermoError::UndefinedCop { q_w });
    }
    Ok(currents.q_c / q_w)
}

/// `ω_c / (ω_h - ω_c)`.
pub fn cop_endoreversible_estimate(omega_c: f64, omega_h: f64) -> Result<f64, ThermoError> {
    if !(omega_c >= 0.0 && omega_c < omega_h && omega_h.is_finite()) {
        return Err(ThermoError::Domain(format!("need 0 <= omega_c < omega_h, got ({omega_c}, {omega_h})")));
    }
    Ok(omega_c / (omega_h - omega_c))
}

/// `T_c (T_w - T_h) / [T_w (T_h - T_c)]`.
pub fn carnot_cop(temps: &Temperatures) -> Result<f64, ThermoError> {
    temps.require_ordered()?;
    Ok(temps.cold * (temps.work - temps.hot) / (temps.work * (temps.hot - temps.cold)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeReading {
    pub omega: f64,
    /// `p_g - p_e`
    pub bias: f64,
    pub bias_eq: f64,
    pub delta: f64,
    /// Spin temperature; `+∞` at zero bias and negative for inverted probes.
    pub t_eff: f64,
}

/// Bias `tanh(Ω/2T)` of a two-level system in equilibrium at `T`.
pub fn bias_eq(omega: f64, temperature: f64) -> f64 {
    (omega / (2.0 * temperature)).tanh()
}

/// `Ω / ln[(1+ε)/(1-ε)]`, i.e. `Ω / ln(p_g/p_e)`.
pub fn spin_temperature(bias: f64, omega: f64) -> f64 {
    if bias == 0.0 {
        return f64::INFINITY;
    }
    omega / ((1.0 + bias) / (1.0 - bias)).ln()
}

pub fn probe_reading(
    rho: &ComplexMatrix,
    probe: &ProbeSpec,
    interface_temperature: f64,
) -> Result<ProbeReading, ThermoError> {
    if rho.dim() != (2 * probe.device_levels, 2 * probe.device_levels) {
        return Err(ThermoError::Domain(format!(
            "state of dimension {} does not match a probed {}-level device",
            rho.rows(),
            probe.device_levels
        )));
    }
    let reduced = probe.reduced_state(rho);
    let bias = reduced[(0, 0)].re - reduced[(1, 1)].re;
    if !bias.is_finite() || bias.abs() > 1.0 + 1e-10 {
        return Err(ThermoError::BiasOutOfRange { bias });
    }
    let bias = bias.clamp(-1.0, 1.0);
    let eq = bias_eq(probe.omega, interface_temperature);
    Ok(ProbeReading {
        omega: probe.omega,
        bias,
        bias_eq: eq,
        delta: bias - eq,
        t_eff: spin_temperature(bias, probe.omega),
    })
}

/// Spin temperature `-ω / ln(p_upper/p_lower)` of the transition between
/// basis states `lower` and `upper`. Equal populations give `+∞`.
pub fn filter_temperature(rho: &ComplexMatrix, lower: usize, upper: usize, omega: f64) -> Result<f64, ThermoError> {
    let d = rho.rows();
    if lower >= d || upper >= d {
        return Err(ThermoError::Domain(format!("level index out of range for dimension {d}")));
    }
    let p_lo = rho[(lower, lower)].re;
    let p_hi = rho[(upper, upper)].re;
    for (level, population) in [(lower, p_lo), (upper, p_hi)] {
        if population <= 0.0 {
            return Err(ThermoError::EmptyLevel { level, population });
        }
    }
    if p_lo == p_hi {
        return Ok(f64::INFINITY);
    }
    Ok(-omega / (p_hi / p_lo).ln())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bias_round_trip() {
        for (omega, t) in [(7.5, 10.0), (0.3, 20.0), (40.0, 30.0)] {
            let b = bias_eq(omega, t);
            assert!((spin_temperature(b, omega) - t).abs() < 1e-10 * t);
            let pe = 1.0 / (1.0 + (omega / t).exp());
            assert!((b - (1.0 - 2.0 * pe)).abs() < 1e-15);
        }
        assert!(bias_eq(500.0, 10.0) == 1.0);
        assert!(spin_temperature(0.0, 7.5).is_infinite());
        assert!(spin_temperature(-0.1, 7.5) < 0.0);
    }

    #[test]
    fn carnot_reference() {
        let c = carnot_cop(&Temperatures::new(30.0, 20.0, 10.0)).unwrap();
        assert!((c - 1.0 / 3.0).abs() < 1e-15);
        assert!((carnot_cop(&Temperatures::new(1e12, 20.0, 10.0)).unwrap() - 1.0).abs() < 1e-10);
        assert!(carnot_cop(&Temperatures::new(30.0, 10.0, 10.0)).is_err());
    }

    #[test]
    fn endoreversible_estimate() {
        assert!((cop_endoreversible_estimate(7.5, 40.0).unwrap() - 7.5 / 32.5).abs() < 1e-15);
        assert!((cop_endoreversible_estimate(10.0, 40.0).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(cop_endoreversible_estimate(0.0, 40.0).unwrap(), 0.0);
        assert!(cop_endoreversible_estimate(41.0, 40.0).is_err());
    }

    #[test]
    fn filter_temperature_markers() {
        let rho = ComplexMatrix::diagonal(&[0.5, 0.5]);
        assert!(filter_temperature(&rho, 0, 1, 1.0).unwrap().is_infinite());
        let rho = ComplexMatrix::diagonal(&[1.0, 0.0]);
        assert!(matches!(filter_temperature(&rho, 0, 1, 1.0), Err(ThermoError::EmptyLevel { level: 1, .. })));
        let pe = 1.0 / (1.0 + 2f64.exp());
        let rho = ComplexMatrix::diagonal(&[1.0 - pe, pe]);
        assert!((filter_temperature(&rho, 0, 1, 4.0).unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn cop_undefined_when_work_vanishes() {
        let c =
            HeatCurrents { q_w: 1e-20, q_h: -1e-20, q_c: 0.0, sigma: 0.0, first_law_residual: 0.0, throughput: 1e-3 };
        assert!(matches!(cop(&c), Err(ThermoError::UndefinedCop { .. })));
        let c = HeatCurrents { q_w: 2.0, q_h: -3.0, q_c: 1.0, sigma: 0.0, first_law_residual: 0.0, throughput: 10.0 };
        assert_eq!(cop(&c).unwrap(), 0.5);
    }
}
