//! Probe-frequency sweeps and the black-box diagnosis built on them.
//!
//! A scan tunes the probe across a window at one interface and records how
//! far its polarization bias sits from the value the bare bath would impose.
//! Peaks (probe colder than the bath) mark decay channels through which the
//! device draws heat from that bath; troughs mark channels releasing heat.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lindblad::BathLabel;
use crate::mathcore::Tolerances;
use crate::models::{validity_report, Grid, ModelError, ModelParams};
use crate::thermo::{analyze_with, probe_reading, ThermoError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScanError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("detection threshold must be positive, got {0}")]
    Threshold(f64),
}

/// Default prominence threshold per interface.
///
/// Work and hot features are roughly an order of magnitude weaker than cold
/// ones at the same probe coupling, because those transitions carry larger
/// Bohr frequencies and hence thinner thermal populations.
pub fn default_threshold(interface: BathLabel) -> f64 {
    match interface {
        BathLabel::Cold => 1e-3,
        BathLabel::Work | BathLabel::Hot => 1e-4,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    /// Device parameters; the probe frequency is overwritten per grid point.
    pub params: ModelParams,
    pub interface: BathLabel,
    pub j: f64,
    pub grid: Grid,
    pub threshold: f64,
    /// Steady-state solver tolerances.
    #[serde(default)]
    pub tolerances: Tolerances,
}

impl ScanConfig {
    pub fn new(params: ModelParams, interface: BathLabel, j: f64, grid: Grid) -> Self {
        Self {
            params: params.without_probe(),
            interface,
            j,
            grid,
            threshold: default_threshold(interface),
            tolerances: Tolerances::default(),
        }
    }

    pub fn validate(&self) -> Result<(), ScanError> {
        self.grid.validate()?;
        if !(self.threshold > 0.0 && self.threshold.is_finite()) {
            return Err(ScanError::Threshold(self.threshold));
        }
        // probe frequency is irrelevant to parameter validation
        let probe_omega = self.grid.min.max(f64::MIN_POSITIVE);
        self.params.with_probe(probe_omega, self.j, self.interface).build()?;
        Ok(())
    }

    pub fn params_at(&self, omega: f64) -> ModelParams {
        self.params.with_probe(omega, self.j, self.interface)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub omega: f64,
    pub bias: f64,
    pub bias_eq: f64,
    pub delta: f64,
    pub t_eff: f64,
    pub q_w: f64,
    pub q_h: f64,
    pub q_c: f64,
    pub sigma: f64,
    pub residual: f64,
    /// Gross energy exchange with all baths, see [`HeatCurrents`](crate::thermo::HeatCurrents).
    pub throughput: f64,
    /// All weak-coupling checks pass at this point.
    pub valid: bool,
    /// Set when the point could not be solved; numeric fields are NaN.
    pub failure: Option<String>,
}

impl ScanRow {
    pub fn failed(&self) -> bool {
        self.failure.is_some()
    }

    fn failure(omega: f64, err: ThermoError) -> Self {
        let nan = f64::NAN;
        Self {
            omega,
            bias: nan,
            bias_eq: nan,
            delta: nan,
            t_eff: nan,
            q_w: nan,
            q_h: nan,
            q_c: nan,
            sigma: nan,
            residual: nan,
            throughput: nan,
            valid: false,
            failure: Some(err.to_string()),
        }
    }
}

/// One grid point: fresh model, steady state, probe reading and currents.
pub fn scan_point(config: &ScanConfig, omega: f64) -> ScanRow {
    let evaluate = || -> Result<ScanRow, ThermoError> {
        let model = config.params_at(omega).build()?;
        let probe = model.probe.expect("scan models carry a probe");
        let analysis = analyze_with(&model, &config.tolerances)?;
        let reading = probe_reading(&analysis.state.rho, &probe, model.params.temperatures.of(config.interface))?;
        let valid = validity_report(&model)?.overall;
        let q = analysis.currents;
        Ok(ScanRow {
            omega,
            bias: reading.bias,
            bias_eq: reading.bias_eq,
            delta: reading.delta,
            t_eff: reading.t_eff,
            q_w: q.q_w,
            q_h: q.q_h,
            q_c: q.q_c,
            sigma: q.sigma,
            residual: analysis.state.residual,
            throughput: q.throughput,
            valid,
            failure: None,
        })
    };
    evaluate().unwrap_or_else(|e| ScanRow::failure(omega, e))
}

/// Rows in ascending `Ω`; points are evaluated in parallel but each depends
/// only on its own `Ω`, so the output does not depend on scheduling.
pub fn scan(config: &ScanConfig) -> Result<Vec<ScanRow>, ScanError> {
    config.validate()?;
    let omegas = config.grid.values();
    Ok(omegas.par_iter().map(|&omega| scan_point(config, omega)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Absorbing,
    Releasing,
    Indeterminate,
}

/// Positive deviation: probe effectively colder than its bath, so the device
/// draws heat from that bath. Deviations below `threshold` are indeterminate.
pub fn classify_direction(delta: f64, threshold: f64) -> Direction {
    if delta.is_nan() || delta.abs() < threshold || delta == 0.0 {
        Direction::Indeterminate
    } else if delta > 0.0 {
        Direction::Absorbing
    } else {
        Direction::Releasing
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelEstimate {
    pub interface: BathLabel,
    pub frequency: f64,
    pub direction: Direction,
    pub prominence: f64,
}

/// Local maxima of `delta` at or above `threshold` and local minima at or
/// below `-threshold`, refined by a parabola through the extremal triple.
/// Failed rows are skipped; extrema on the window edge are not reported.
pub fn detect_channels(rows: &[ScanRow], threshold: f64, interface: BathLabel) -> Vec<ChannelEstimate> {
    let pts: Vec<(f64, f64)> =
        rows.iter().filter(|r| !r.failed() && r.delta.is_finite()).map(|r| (r.omega, r.delta)).collect();
    let mut out = Vec::new();
    for i in 1..pts.len().saturating_sub(1) {
        let (prev, cur, next) = (pts[i - 1].1, pts[i].1, pts[i + 1].1);
        let is_peak = cur >= threshold && cur > prev && cur >= next;
        let is_trough = cur <= -threshold && cur < prev && cur <= next;
        if !(is_peak || is_trough) {
            continue;
        }
        out.push(ChannelEstimate {
            interface,
            frequency: parabolic_vertex(pts[i - 1], pts[i], pts[i + 1]),
            direction: classify_direction(cur, threshold),
            prominence: cur.abs(),
        });
    }
    out
}

fn parabolic_vertex((x0, y0): (f64, f64), (x1, y1): (f64, f64), (x2, y2): (f64, f64)) -> f64 {
    let d01 = (y1 - y0) / (x1 - x0);
    let d12 = (y2 - y1) / (x2 - x1);
    let curvature = (d12 - d01) / (x2 - x0);
    if curvature == 0.0 || !curvature.is_finite() {
        return x1;
    }
    // vertex of y0 + d01 (x - x0) + curvature (x - x0)(x - x1)
    let x = 0.5 * (x0 + x1) - d01 / (2.0 * curvature);
    x.clamp(x0, x2)
}

/// Rows and detection threshold from one interface.
#[derive(Debug, Clone)]
pub struct InterfaceScan {
    pub interface: BathLabel,
    pub threshold: f64,
    pub rows: Vec<ScanRow>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OperationMode {
    Chiller,
    HeatTransformer,
    Indeterminate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterfaceChannels {
    pub interface: BathLabel,
    pub threshold: f64,
    pub channels: Vec<ChannelEstimate>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosisReport {
    pub channels: Vec<InterfaceChannels>,
    pub operation_mode: OperationMode,
    pub endoreversible_consistent: bool,
    pub cop_estimate: Option<f64>,
    pub irreversibility_scale: f64,
    pub annotations: Vec<String>,
}

impl DiagnosisReport {
    pub fn at(&self, interface: BathLabel) -> Option<&InterfaceChannels> {
        self.channels.iter().find(|c| c.interface == interface)
    }
}

fn chiller_direction(interface: BathLabel) -> Direction {
    match interface {
        BathLabel::Cold | BathLabel::Work => Direction::Absorbing,
        BathLabel::Hot => Direction::Releasing,
    }
}

pub fn diagnose(scans: &[InterfaceScan]) -> DiagnosisReport {
    let channels: Vec<InterfaceChannels> = scans
        .iter()
        .map(|s| InterfaceChannels {
            interface: s.interface,
            threshold: s.threshold,
            channels: detect_channels(&s.rows, s.threshold, s.interface),
        })
        .collect();

    let mut annotations = Vec::new();
    let endoreversible_consistent = !channels.is_empty() && channels.iter().all(|c| c.channels.len() == 1);

    let mut chiller_votes = 0;
    let mut transformer_votes = 0;
    let mut conflicted = false;
    for ic in &channels {
        let absorbing = ic.channels.iter().filter(|c| c.direction == Direction::Absorbing).count();
        let releasing = ic.channels.iter().filter(|c| c.direction == Direction::Releasing).count();
        if absorbing > 0 && releasing > 0 {
            conflicted = true;
            let describe = |dir: Direction| {
                ic.channels
                    .iter()
                    .filter(|c| c.direction == dir)
                    .map(|c| format!("{:.4}", c.frequency))
                    .collect::<Vec<_>>()
                    .join(", ")
            };
            annotations.push(format!(
                "internal dissipation at the {} interface: absorbing channels at [{}], releasing channels at [{}]",
                ic.interface,
                describe(Direction::Absorbing),
                describe(Direction::Releasing)
            ));
            continue;
        }
        if ic.channels.is_empty() {
            annotations
                .push(format!("no channel above threshold {:.1e} at the {} interface", ic.threshold, ic.interface));
            continue;
        }
        let dir = if absorbing > 0 { Direction::Absorbing } else { Direction::Releasing };
        if dir == chiller_direction(ic.interface) {
            chiller_votes += 1;
        } else {
            transformer_votes += 1;
        }
    }
    let operation_mode = match (conflicted, chiller_votes, transformer_votes) {
        (false, c, 0) if c > 0 => OperationMode::Chiller,
        (false, 0, t) if t > 0 => OperationMode::HeatTransformer,
        _ => OperationMode::Indeterminate,
    };
    if !conflicted && chiller_votes > 0 && transformer_votes > 0 {
        annotations.push("interfaces disagree on the direction of operation".to_string());
    }

    let mean_frequency = |bath: BathLabel| {
        channels
            .iter()
            .find(|c| c.interface == bath)
            .filter(|c| !c.channels.is_empty())
            .map(|c| c.channels.iter().map(|e| e.frequency).sum::<f64>() / c.channels.len() as f64)
    };
    let cop_estimate =
        match (mean_frequency(BathLabel::Cold), mean_frequency(BathLabel::Hot), mean_frequency(BathLabel::Work)) {
            (Some(c), Some(h), _) if h > c => Some(c / (h - c)),
            (Some(c), _, Some(w)) if w > 0.0 => Some(c / w),
            _ => None,
        };

    let irreversibility_scale = channels
        .iter()
        .filter(|c| c.channels.len() > 1)
        .map(|c| {
            let f = c.channels.iter().map(|e| e.frequency);
            f.clone().fold(f64::NEG_INFINITY, f64::max) - f.fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max);

    DiagnosisReport {
        channels,
        operation_mode,
        endoreversible_consistent,
        cop_estimate,
        irreversibility_scale,
        annotations,
    }
}
