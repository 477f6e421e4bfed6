//! Concrete heat-pump devices, optionally fitted with a two-level probe.
//!
//! Probed models live on the product space device ⊗ probe with
//! device-index-major ordering: state `|k, p⟩` has index `2k + p`, where
//! `p = 0` is the probe ground state `|g⟩` and `p = 1` the excited `|e⟩`.
//! Device levels are labelled `a, b, c(, d)` = `0, 1, 2(, 3)`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lindblad::{
    build_liouvillian, decompose_in_eigenbasis, BathLabel, BathSpec, DecayChannel, LindbladError, Liouvillian,
};
use crate::mathcore::{hermitian_eigensystem, ComplexMatrix, MathError, ONE};

pub const DEFAULT_GAMMA: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("invalid parameters: {0}")]
    Domain(String),
    #[error(transparent)]
    Lindblad(#[from] LindbladError),
    #[error(transparent)]
    Math(#[from] MathError),
}

fn domain(msg: impl Into<String>) -> ModelError {
    ModelError::Domain(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Temperatures {
    pub work: f64,
    pub hot: f64,
    pub cold: f64,
}

impl Temperatures {
    pub const fn new(work: f64, hot: f64, cold: f64) -> Self {
        Self { work, hot, cold }
    }

    pub fn of(&self, bath: BathLabel) -> f64 {
        match bath {
            BathLabel::Work => self.work,
            BathLabel::Hot => self.hot,
            BathLabel::Cold => self.cold,
        }
    }

    pub fn uniform(t: f64) -> Self {
        Self::new(t, t, t)
    }

    fn validate(&self) -> Result<(), ModelError> {
        for bath in BathLabel::ALL {
            let t = self.of(bath);
            if !(t > 0.0 && t.is_finite()) {
                return Err(domain(format!("{bath} temperature must be positive, got {t}")));
            }
        }
        Ok(())
    }

    /// Checks `T_w > T_h > T_c > 0`.
    pub fn require_ordered(&self) -> Result<(), ModelError> {
        self.validate()?;
        if self.work > self.hot && self.hot > self.cold {
            Ok(())
        } else {
            Err(domain(format!(
                "temperatures must satisfy T_w > T_h > T_c, got ({}, {}, {})",
                self.work, self.hot, self.cold
            )))
        }
    }
}

impl Default for Temperatures {
    fn default() -> Self {
        Self::new(30.0, 20.0, 10.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Device {
    Maser3,
    Pump4,
}

impl Device {
    pub fn levels(self) -> usize {
        match self {
            Device::Maser3 => 3,
            Device::Pump4 => 4,
        }
    }

    /// Device levels `(lower, upper)` through which `bath` exchanges energy.
    pub fn contact_transition(self, bath: BathLabel) -> (usize, usize) {
        match (self, bath) {
            (_, BathLabel::Cold) => (0, 1),
            (Device::Maser3, BathLabel::Work) => (1, 2),
            (Device::Maser3, BathLabel::Hot) => (0, 2),
            (Device::Pump4, BathLabel::Work) => (2, 3),
            (Device::Pump4, BathLabel::Hot) => (0, 3),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeParams {
    pub omega: f64,
    pub j: f64,
    #[serde(default = "default_interface")]
    pub interface: BathLabel,
}

fn default_interface() -> BathLabel {
    BathLabel::Cold
}

fn default_gamma() -> f64 {
    DEFAULT_GAMMA
}

/// Everything needed to rebuild a model from scratch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    pub device: Device,
    pub omega_c: f64,
    pub omega_h: f64,
    #[serde(default)]
    pub g: f64,
    #[serde(default)]
    pub temperatures: Temperatures,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    #[serde(default)]
    pub probe: Option<ProbeParams>,
}

impl ModelParams {
    pub fn maser3(omega_c: f64, omega_h: f64, temperatures: Temperatures, gamma: f64) -> Self {
        Self { device: Device::Maser3, omega_c, omega_h, g: 0.0, temperatures, gamma, probe: None }
    }

    pub fn pump4(omega_c: f64, omega_h: f64, g: f64, temperatures: Temperatures, gamma: f64) -> Self {
        Self { device: Device::Pump4, omega_c, omega_h, g, temperatures, gamma, probe: None }
    }

    pub fn with_probe(mut self, omega: f64, j: f64, interface: BathLabel) -> Self {
        self.probe = Some(ProbeParams { omega, j, interface });
        self
    }

    pub fn without_probe(mut self) -> Self {
        self.probe = None;
        self
    }

    /// Bare frequency of the device's contact transition with `bath`.
    pub fn contact_frequency(&self, bath: BathLabel) -> f64 {
        match bath {
            BathLabel::Cold => self.omega_c,
            BathLabel::Work => self.omega_h - self.omega_c,
            BathLabel::Hot => self.omega_h,
        }
    }

    pub fn build(&self) -> Result<ModelSpec, ModelError> {
        build_model(self)
    }
}

/// Probe bookkeeping for partial traces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeSpec {
    pub omega: f64,
    pub j: f64,
    pub interface: BathLabel,
    pub device_levels: usize,
}

impl ProbeSpec {
    pub fn ground_indices(&self) -> Vec<usize> {
        (0..self.device_levels).map(|k| 2 * k).collect()
    }

    pub fn excited_indices(&self) -> Vec<usize> {
        (0..self.device_levels).map(|k| 2 * k + 1).collect()
    }

    /// Reduced 2x2 probe state `tr_device ρ`.
    pub fn reduced_state(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(2, 2);
        for k in 0..self.device_levels {
            for p in 0..2 {
                for q in 0..2 {
                    out[(p, q)] += rho[(2 * k + p, 2 * k + q)];
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct ModelSpec {
    pub dim: usize,
    pub hamiltonian: ComplexMatrix,
    /// Work, hot and cold baths, in that order.
    pub baths: Vec<BathSpec>,
    pub probe: Option<ProbeSpec>,
    pub params: ModelParams,
}

impl ModelSpec {
    pub fn bath(&self, label: BathLabel) -> &BathSpec {
        self.baths.iter().find(|b| b.label == label).expect("model carries all three baths")
    }

    /// Open decay channels of every bath against one shared eigensystem.
    pub fn channels(&self, group_tol: Option<f64>) -> Result<Vec<DecayChannel>, ModelError> {
        let es = hermitian_eigensystem(&self.hamiltonian)?;
        let mut out = Vec::new();
        for bath in &self.baths {
            out.extend(decompose_in_eigenbasis(&es, bath, group_tol)?);
        }
        Ok(out)
    }

    pub fn liouvillian(&self) -> Result<Liouvillian, ModelError> {
        self.liouvillian_with(true, None)
    }

    pub fn liouvillian_with(
        &self,
        include_hamiltonian: bool,
        group_tol: Option<f64>,
    ) -> Result<Liouvillian, ModelError> {
        let channels = self.channels(group_tol)?;
        Ok(build_liouvillian(&self.hamiltonian, channels, include_hamiltonian)?)
    }
}

fn positive(name: &str, x: f64) -> Result<(), ModelError> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("{name} must be positive and finite, got {x}")))
    }
}

fn validate(params: &ModelParams) -> Result<(), ModelError> {
    positive("omega_c", params.omega_c)?;
    positive("omega_h", params.omega_h)?;
    positive("gamma", params.gamma)?;
    params.temperatures.validate()?;
    if params.omega_c >= params.omega_h {
        return Err(domain(format!("need omega_c < omega_h, got {} >= {}", params.omega_c, params.omega_h)));
    }
    match params.device {
        Device::Maser3 if params.g != 0.0 => return Err(domain("the three-level maser has no internal coupling g")),
        Device::Pump4 if !(params.g >= 0.0 && params.g < params.omega_c) => {
            return Err(domain(format!("need 0 <= g < omega_c, got g = {}", params.g)));
        }
        _ => {}
    }
    if let Some(p) = params.probe {
        positive("probe omega", p.omega)?;
        positive("probe J", p.j)?;
    }
    Ok(())
}

fn hermitian_pair(n: usize, i: usize, j: usize) -> ComplexMatrix {
    &ComplexMatrix::unit(n, i, j) + &ComplexMatrix::unit(n, j, i)
}

fn device_hamiltonian(params: &ModelParams) -> ComplexMatrix {
    match params.device {
        Device::Maser3 => ComplexMatrix::diagonal(&[0.0, params.omega_c, params.omega_h]),
        Device::Pump4 => {
            let mut h = ComplexMatrix::diagonal(&[0.0, params.omega_c, params.omega_c, params.omega_h]);
            h[(1, 2)] = ONE * params.g;
            h[(2, 1)] = ONE * params.g;
            h
        }
    }
}

pub fn build_model(params: &ModelParams) -> Result<ModelSpec, ModelError> {
    validate(params)?;
    let n = params.device.levels();
    let device_h = device_hamiltonian(params);
    let device_coupling = |bath| {
        let (lo, hi) = params.device.contact_transition(bath);
        hermitian_pair(n, lo, hi)
    };

    let (hamiltonian, couplings, probe) = match params.probe {
        None => (device_h, BathLabel::ALL.map(device_coupling), None),
        Some(p) => {
            let id2 = ComplexMatrix::identity(2);
            let idn = ComplexMatrix::identity(n);
            let mut h = &device_h.kron(&id2) + &idn.kron(&ComplexMatrix::diagonal(&[0.0, p.omega]));
            let (lo, hi) = params.device.contact_transition(p.interface);
            // J(|lo,e⟩⟨hi,g| + h.c.)
            let flip = hermitian_pair(2 * n, 2 * lo + 1, 2 * hi).scale_real(p.j);
            h += &flip;
            let probe_sx = idn.kron(&hermitian_pair(2, 0, 1));
            let couplings = BathLabel::ALL.map(|bath| {
                let c = device_coupling(bath).kron(&id2);
                if bath == p.interface {
                    &c + &probe_sx
                } else {
                    c
                }
            });
            let spec = ProbeSpec { omega: p.omega, j: p.j, interface: p.interface, device_levels: n };
            (h, couplings, Some(spec))
        }
    };

    let baths = BathLabel::ALL
        .iter()
        .zip(couplings)
        .map(|(&label, coupling)| BathSpec::new(label, params.temperatures.of(label), params.gamma, coupling))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ModelSpec { dim: hamiltonian.rows(), hamiltonian, baths, probe, params: *params })
}

pub fn build_maser3(omega_c: f64, omega_h: f64, temps: Temperatures, gamma: f64) -> Result<ModelSpec, ModelError> {
    build_model(&ModelParams::maser3(omega_c, omega_h, temps, gamma))
}

#[allow(clippy::too_many_arguments)]
pub fn build_maser3_with_probe(
    omega_c: f64,
    omega_h: f64,
    temps: Temperatures,
    gamma: f64,
    omega: f64,
    j: f64,
    interface: BathLabel,
) -> Result<ModelSpec, ModelError> {
    build_model(&ModelParams::maser3(omega_c, omega_h, temps, gamma).with_probe(omega, j, interface))
}

pub fn build_pump4(
    omega_c: f64,
    omega_h: f64,
    g: f64,
    temps: Temperatures,
    gamma: f64,
) -> Result<ModelSpec, ModelError> {
    build_model(&ModelParams::pump4(omega_c, omega_h, g, temps, gamma))
}

#[allow(clippy::too_many_arguments)]
pub fn build_pump4_with_probe(
    omega_c: f64,
    omega_h: f64,
    g: f64,
    temps: Temperatures,
    gamma: f64,
    omega: f64,
    j: f64,
    interface: BathLabel,
) -> Result<ModelSpec, ModelError> {
    build_model(&ModelParams::pump4(omega_c, omega_h, g, temps, gamma).with_probe(omega, j, interface))
}

/// Cold-filter frequency at which all heat currents of an endoreversible
/// chiller vanish: `ω_h T_c (T_w - T_h) / [T_h (T_w - T_c)]`.
pub fn omega_c_rev(omega_h: f64, temps: &Temperatures) -> Result<f64, ModelError> {
    positive("omega_h", omega_h)?;
    temps.require_ordered()?;
    Ok(omega_h * temps.cold * (temps.work - temps.hot) / (temps.hot * (temps.work - temps.cold)))
}

/// Coefficients `(c2, c1, c0)` of the monic cubic whose roots are the three
/// mixed levels of the probed four-level device (cold interface) spanned by
/// `|a,e⟩, |b,g⟩, |c,g⟩`.
pub fn pump4_probe_cubic(omega_c: f64, g: f64, omega: f64, j: f64) -> (f64, f64, f64) {
    let c2 = -(omega + 2.0 * omega_c);
    let c1 = omega_c * omega_c + 2.0 * omega * omega_c - g * g - j * j;
    let c0 = g * g * omega + j * j * omega_c - omega * omega_c * omega_c;
    (c2, c1, c0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidityCheck {
    pub name: String,
    pub satisfied: bool,
    /// Left-hand side over right-hand side; satisfied iff `ratio <= 1`.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidityReport {
    pub checks: Vec<ValidityCheck>,
    pub overall: bool,
}

impl ValidityReport {
    pub fn check(&self, name: &str) -> Option<&ValidityCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Weak-coupling and secular sanity checks, each with a 10x margin:
///
/// - `secular`: largest channel rate vs the smallest splitting between two
///   channels of the same bath;
/// - `born_markov`: `γ` vs the lowest bath temperature;
/// - `probe_coupling` (probed models only): largest rate vs `J`.
pub fn validity_report(model: &ModelSpec) -> Result<ValidityReport, ModelError> {
    let channels = model.channels(None)?;
    let max_rate = channels.iter().map(|c| c.rate_down).fold(0.0, f64::max);
    let mut min_split = f64::INFINITY;
    for bath in BathLabel::ALL {
        let mut freqs: Vec<f64> = channels.iter().filter(|c| c.bath == bath).map(|c| c.omega).collect();
        freqs.sort_by(f64::total_cmp);
        for w in freqs.windows(2) {
            min_split = min_split.min(w[1] - w[0]);
        }
    }
    let mut checks = Vec::new();
    let make = |name: &str, ratio: f64| ValidityCheck { name: name.to_string(), satisfied: ratio <= 1.0, ratio };
    checks.push(make("secular", max_rate / (0.1 * min_split)));
    let t = &model.params.temperatures;
    let t_min = t.work.min(t.hot).min(t.cold);
    checks.push(make("born_markov", model.params.gamma / (0.1 * t_min)));
    if let Some(p) = &model.probe {
        checks.push(make("probe_coupling", max_rate / (0.1 * p.j)));
    }
    let overall = checks.iter().all(|c| c.satisfied);
    Ok(ValidityReport { checks, overall })
}

/// A named parameter set with its default probe sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    /// Probe sits on the cold interface, tuned to the contact frequency.
    pub params: ModelParams,
    pub grid: Grid,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Grid {
    pub const fn new(min: f64, max: f64, points: usize) -> Self {
        Self { min, max, points }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.min.is_finite() && self.max.is_finite() && self.min < self.max) {
            return Err(domain(format!("grid needs min < max, got [{}, {}]", self.min, self.max)));
        }
        if self.points < 3 {
            return Err(domain(format!("grid needs at least 3 points, got {}", self.points)));
        }
        Ok(())
    }

    /// Grid values; the last point is exactly `max`.
    pub fn values(&self) -> Vec<f64> {
        let step = (self.max - self.min) / (self.points - 1) as f64;
        (0..self.points).map(|i| if i + 1 == self.points { self.max } else { self.min + step * i as f64 }).collect()
    }

    /// `center ± 10·max(J, g)` with 401 points.
    pub fn around(center: f64, j: f64, g: f64) -> Self {
        let half = 10.0 * j.max(g);
        Self::new(center - half, center + half, 401)
    }
}

const PRESET_T: Temperatures = Temperatures::new(30.0, 20.0, 10.0);

const fn probed(device: Device, omega_c: f64, g: f64, j: f64) -> ModelParams {
    ModelParams {
        device,
        omega_c,
        omega_h: 40.0,
        g,
        temperatures: PRESET_T,
        gamma: DEFAULT_GAMMA,
        probe: Some(ProbeParams { omega: omega_c, j, interface: BathLabel::Cold }),
    }
}

pub const PRESETS: [Preset; 6] = [
    Preset {
        name: "fig2a",
        description: "three-level maser chiller, omega_c = 3/4 omega_c,rev",
        params: probed(Device::Maser3, 7.5, 0.0, 0.1),
        grid: Grid::new(6.5, 8.5, 401),
    },
    Preset {
        name: "fig2b",
        description: "three-level maser heat transformer, omega_c = 5/4 omega_c,rev",
        params: probed(Device::Maser3, 12.5, 0.0, 0.1),
        grid: Grid::new(11.5, 13.5, 401),
    },
    Preset {
        name: "fig3a",
        description: "four-level pump, g = 0.5, J = 0.1",
        params: probed(Device::Pump4, 7.5, 0.5, 0.1),
        grid: Grid::new(6.5, 8.5, 401),
    },
    Preset {
        name: "fig3b",
        description: "four-level pump, g = 0.1, J = 0.1 (channels unresolved)",
        params: probed(Device::Pump4, 7.5, 0.1, 0.1),
        grid: Grid::new(6.5, 8.5, 401),
    },
    Preset {
        name: "fig3b-fine",
        description: "four-level pump, g = 0.1, J = 0.01 (channels resolved)",
        params: probed(Device::Pump4, 7.5, 0.1, 0.01),
        grid: Grid::new(7.0, 8.0, 501),
    },
    Preset {
        name: "fig3c",
        description: "four-level pump at omega_c = omega_c,rev, g = 0.5",
        params: probed(Device::Pump4, 10.0, 0.5, 0.1),
        grid: Grid::new(9.0, 11.0, 401),
    },
];

pub fn preset(name: &str) -> Option<Preset> {
    PRESETS.iter().find(|p| p.name == name).copied()
}

impl Preset {
    /// Same device with the probe moved to `interface`, tuned to that
    /// interface's contact frequency. The cold interface keeps the preset
    /// grid; others get [`Grid::around`] the contact frequency.
    pub fn at_interface(&self, interface: BathLabel) -> (ModelParams, Grid) {
        let j = self.params.probe.map_or(0.1, |p| p.j);
        let center = self.params.contact_frequency(interface);
        let params = self.params.with_probe(center, j, interface);
        let grid = if interface == BathLabel::Cold { self.grid } else { Grid::around(center, j, self.params.g) };
        (params, grid)
    }
}
