//! CSV and JSON serializers. CSV numbers carry 17 significant digits;
//! heat currents and entropy production are written in units of `γ`.

use heatprobe::scanner::ScanRow;
use serde::Serialize;

pub const SCAN_HEADER: &str = "omega,bias,bias_eq,delta,t_eff,q_w,q_h,q_c,sigma,residual";
pub const CURRENTS_HEADER: &str = "omega_c,q_w,q_h,q_c,sigma,cop,cop_endo,cop_carnot";

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// Row with currents, entropy production and throughput divided by `gamma`.
pub fn in_gamma_units(row: &ScanRow, gamma: f64) -> ScanRow {
    ScanRow {
        q_w: row.q_w / gamma,
        q_h: row.q_h / gamma,
        q_c: row.q_c / gamma,
        sigma: row.sigma / gamma,
        throughput: row.throughput / gamma,
        ..row.clone()
    }
}

pub fn scan_csv(rows: &[ScanRow]) -> String {
    let mut out = String::from(SCAN_HEADER);
    out.push('\n');
    for r in rows {
        let fields = [r.omega, r.bias, r.bias_eq, r.delta, r.t_eff, r.q_w, r.q_h, r.q_c, r.sigma, r.residual];
        out.push_str(&fields.map(num).join(","));
        out.push('\n');
    }
    out
}

/// One point of a bare-device sweep over `ω_c`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurrentsRow {
    pub omega_c: f64,
    pub q_w: f64,
    pub q_h: f64,
    pub q_c: f64,
    pub sigma: f64,
    pub cop: Option<f64>,
    pub cop_endo: Option<f64>,
    pub cop_carnot: Option<f64>,
}

pub fn currents_csv(rows: &[CurrentsRow]) -> String {
    let mut out = String::from(CURRENTS_HEADER);
    out.push('\n');
    for r in rows {
        let fields = [
            num(r.omega_c),
            num(r.q_w),
            num(r.q_h),
            num(r.q_c),
            num(r.sigma),
            opt(r.cop),
            opt(r.cop_endo),
            opt(r.cop_carnot),
        ];
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

pub fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string(value).expect("report types serialize");
    s.push('\n');
    s
}
