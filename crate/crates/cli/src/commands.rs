use heatprobe::lindblad::BathLabel;
use heatprobe::models::validity_report;
use heatprobe::scanner::{diagnose, scan, InterfaceScan};
use heatprobe::thermo::{analyze_with, carnot_cop, cop, cop_endoreversible_estimate};

use crate::config::{Format, Resolved};
use crate::output::{currents_csv, in_gamma_units, json, scan_csv, CurrentsRow};
use crate::CliError;

/// Text to emit plus the exit status it implies.
pub struct Outcome {
    pub text: String,
    pub error: Option<CliError>,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Self { text, error: None }
    }
}

fn failed_rows(count: usize, total: usize) -> CliError {
    CliError::Numerical(format!("{count} of {total} points could not be solved"))
}

pub fn cmd_scan(run: &Resolved) -> Result<Outcome, CliError> {
    let interface = match run.interfaces.as_slice() {
        [] => run.source.params().probe.map_or(BathLabel::Cold, |p| p.interface),
        [one] => *one,
        _ => return Err(CliError::Config("scan takes a single --interface".into())),
    };
    let config = run.scan_config(interface)?;
    let rows = scan(&config).map_err(|e| CliError::Config(e.to_string()))?;
    let gamma = config.params.gamma;
    let scaled: Vec<_> = rows.iter().map(|r| in_gamma_units(r, gamma)).collect();
    let text = match run.format {
        Format::Csv => scan_csv(&scaled),
        Format::Json => json(&scaled),
    };
    let failed = rows.iter().filter(|r| r.failed()).count();
    for r in rows.iter().filter(|r| r.failed()) {
        log::error!("omega = {}: {}", r.omega, r.failure.as_deref().unwrap_or_default());
    }
    Ok(Outcome { text, error: (failed > 0).then(|| failed_rows(failed, rows.len())) })
}

pub fn cmd_diagnose(run: &Resolved) -> Result<Outcome, CliError> {
    let interfaces = if run.interfaces.is_empty() { BathLabel::ALL.to_vec() } else { run.interfaces.clone() };
    let mut scans = Vec::with_capacity(interfaces.len());
    let (mut failed, mut total) = (0, 0);
    for interface in interfaces {
        let config = run.scan_config(interface)?;
        let rows = scan(&config).map_err(|e| CliError::Config(e.to_string()))?;
        failed += rows.iter().filter(|r| r.failed()).count();
        total += rows.len();
        scans.push(InterfaceScan { interface, threshold: config.threshold, rows });
    }
    let report = diagnose(&scans);
    Ok(Outcome { text: json(&report), error: (failed > 0).then(|| failed_rows(failed, total)) })
}

pub fn cmd_currents(run: &Resolved) -> Result<Outcome, CliError> {
    let base = run.source.params().without_probe();
    let grid = run.currents_grid()?;
    let carnot = carnot_cop(&base.temperatures).ok();
    let mut rows = Vec::with_capacity(grid.points);
    let mut failures = Vec::new();
    for omega_c in grid.values() {
        let mut params = base;
        params.omega_c = omega_c;
        let model = params.build().map_err(|e| CliError::Config(format!("omega_c = {omega_c}: {e}")))?;
        let cop_endo = cop_endoreversible_estimate(omega_c, params.omega_h).ok();
        match analyze_with(&model, &run.tolerances) {
            Ok(a) => {
                let q = a.currents;
                rows.push(CurrentsRow {
                    omega_c,
                    q_w: q.q_w / params.gamma,
                    q_h: q.q_h / params.gamma,
                    q_c: q.q_c / params.gamma,
                    sigma: q.sigma / params.gamma,
                    cop: cop(&q).ok(),
                    cop_endo,
                    cop_carnot: carnot,
                });
            }
            Err(e) => {
                log::error!("omega_c = {omega_c}: {e}");
                failures.push(omega_c);
                let nan = f64::NAN;
                rows.push(CurrentsRow {
                    omega_c,
                    q_w: nan,
                    q_h: nan,
                    q_c: nan,
                    sigma: nan,
                    cop: None,
                    cop_endo,
                    cop_carnot: carnot,
                });
            }
        }
    }
    let text = match run.format {
        Format::Csv => currents_csv(&rows),
        Format::Json => json(&rows),
    };
    Ok(Outcome { text, error: (!failures.is_empty()).then(|| failed_rows(failures.len(), rows.len())) })
}

pub fn cmd_validate(run: &Resolved) -> Result<Outcome, CliError> {
    let model = run.source.params().build().map_err(|e| CliError::Config(e.to_string()))?;
    let report = validity_report(&model).map_err(|e| CliError::Numerical(e.to_string()))?;
    let mut outcome = Outcome::ok(json(&report));
    if run.strict && !report.overall {
        let failing: Vec<&str> = report.checks.iter().filter(|c| !c.satisfied).map(|c| c.name.as_str()).collect();
        outcome.error = Some(CliError::Validation(format!("failed checks: {}", failing.join(", "))));
    }
    Ok(outcome)
}
