//! Run configuration: a JSON document merged with command-line flags.

use std::path::{Path, PathBuf};

use heatprobe::lindblad::BathLabel;
use heatprobe::mathcore::Tolerances;
use heatprobe::models::{omega_c_rev, preset, Device, Grid, ModelParams, Preset, PRESETS};
use heatprobe::scanner::{default_threshold, ScanConfig};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Scan,
    Diagnose,
    Currents,
    Validate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Contents of a `--config` file. Every field is optional; flags win.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<Command>,
    pub preset: Option<String>,
    pub model: Option<ModelParams>,
    /// Probe sweep for `scan`/`diagnose`, `ω_c` sweep for `currents`.
    pub grid: Option<Grid>,
    pub interfaces: Option<Vec<BathLabel>>,
    /// Probe coupling; defaults to the model's probe or 0.1.
    pub j: Option<f64>,
    pub threshold: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub strict: Option<bool>,
    pub tolerances: Option<Tolerances>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

/// Flag values that override the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub preset: Option<String>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub grid: Option<Grid>,
    pub interfaces: Vec<BathLabel>,
    pub strict: bool,
}

/// Parses `min:max:points`.
pub fn parse_grid(s: &str) -> Result<Grid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [min, max, points] = parts[..] else {
        return Err(format!("expected min:max:points, got '{s}'"));
    };
    let num = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("bad number '{x}': {e}"));
    let grid =
        Grid::new(num(min)?, num(max)?, points.trim().parse().map_err(|e| format!("bad point count '{points}': {e}"))?);
    grid.validate().map_err(|e| e.to_string())?;
    Ok(grid)
}

/// Where the model came from; presets carry their default sweep.
#[derive(Debug, Clone)]
pub enum ModelSource {
    Preset(Preset),
    Explicit(ModelParams),
}

impl ModelSource {
    pub fn params(&self) -> ModelParams {
        match self {
            ModelSource::Preset(p) => p.params,
            ModelSource::Explicit(m) => *m,
        }
    }
}

/// A fully merged configuration.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub source: ModelSource,
    pub grid: Option<Grid>,
    pub interfaces: Vec<BathLabel>,
    pub j: Option<f64>,
    pub threshold: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub strict: bool,
    pub tolerances: Tolerances,
}

pub fn resolve(command: Command, file: RunConfig, flags: Overrides) -> Result<Resolved, CliError> {
    if let Some(c) = file.command {
        if c != command {
            return Err(CliError::Config(format!("config file is for '{c:?}', not '{command:?}'").to_lowercase()));
        }
    }
    let source = match (flags.preset.or(file.preset), file.model) {
        (Some(name), None) => ModelSource::Preset(lookup_preset(&name)?),
        (Some(_), Some(_)) => {
            return Err(CliError::Config("a preset and an explicit model are mutually exclusive".into()));
        }
        (None, Some(model)) => ModelSource::Explicit(model),
        (None, None) => return Err(CliError::Config("no model given: use --preset or a config with \"model\"".into())),
    };
    source.params().build().map_err(|e| CliError::Config(e.to_string()))?;

    let interfaces = if flags.interfaces.is_empty() { file.interfaces.unwrap_or_default() } else { flags.interfaces };
    let format = flags.format.or(file.format).unwrap_or(match command {
        Command::Scan | Command::Currents => Format::Csv,
        Command::Diagnose | Command::Validate => Format::Json,
    });
    if matches!(command, Command::Diagnose | Command::Validate) && format == Format::Csv {
        return Err(CliError::Config("diagnose and validate only emit JSON".into()));
    }
    if let Some(j) = file.j {
        if !(j > 0.0 && j.is_finite()) {
            return Err(CliError::Config(format!("j must be positive, got {j}")));
        }
    }
    let grid = flags.grid.or(file.grid);
    if let Some(g) = &grid {
        g.validate().map_err(|e| CliError::Config(e.to_string()))?;
    }
    Ok(Resolved {
        source,
        grid,
        interfaces,
        j: file.j,
        threshold: file.threshold,
        out: flags.out.or(file.out),
        format,
        strict: flags.strict || file.strict.unwrap_or(false),
        tolerances: file.tolerances.unwrap_or_default(),
    })
}

fn lookup_preset(name: &str) -> Result<Preset, CliError> {
    preset(name).ok_or_else(|| {
        let known: Vec<&str> = PRESETS.iter().map(|p| p.name).collect();
        CliError::Config(format!("unknown preset '{name}' (known: {})", known.join(", ")))
    })
}

impl Resolved {
    fn probe_j(&self) -> f64 {
        self.j.or(self.source.params().probe.map(|p| p.j)).unwrap_or(0.1)
    }

    /// Scan setup for one interface. Presets keep their sweep on the cold
    /// interface; otherwise the sweep brackets the contact frequency.
    pub fn scan_config(&self, interface: BathLabel) -> Result<ScanConfig, CliError> {
        let j = self.probe_j();
        let (params, default_grid) = match &self.source {
            ModelSource::Preset(p) => p.at_interface(interface),
            ModelSource::Explicit(m) => (*m, Grid::around(m.contact_frequency(interface), j, m.g)),
        };
        let mut config = ScanConfig::new(params, interface, j, self.grid.unwrap_or(default_grid));
        config.threshold = self.threshold.unwrap_or(default_threshold(interface));
        config.tolerances = self.tolerances;
        config.validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(config)
    }

    /// `ω_c` values for the currents sweep: by default from just above the
    /// level splitting up to the reversible point.
    pub fn currents_grid(&self) -> Result<Grid, CliError> {
        if let Some(g) = self.grid {
            return Ok(g);
        }
        let p = self.source.params();
        let start = match p.device {
            Device::Maser3 => 0.5,
            Device::Pump4 => p.g + 0.5,
        };
        let end = omega_c_rev(p.omega_h, &p.temperatures).map_err(|e| CliError::Config(e.to_string()))?;
        if start >= end {
            return Err(CliError::Config(format!("empty default sweep [{start}, {end}]; pass --grid")));
        }
        Ok(Grid::new(start, end, 20))
    }
}
