//! Machine-readable exports. CSV carries 15 significant digits; in JSON the
//! round-trip-critical scalars (B, c) are emitted as decimal strings.

use crate::correction::CorrectionResult;
use crate::quadrature::TfMoments;
use crate::tf_solver::TfSolution;
use crate::verify::CheckResult;
use serde::Serialize;
use serde_json::json;

fn num(x: f64) -> String {
    format!("{x:.15e}")
}

/// `x,f,fprime` rows over the stored grid.
pub fn solution_csv(sol: &TfSolution) -> String {
    let mut out = String::from("x,f,fprime\n");
    for i in 0..sol.grid.len() {
        out.push_str(&format!(
            "{},{},{}\n",
            num(sol.grid[i]),
            num(sol.f_values[i]),
            num(sol.fprime_values[i])
        ));
    }
    out
}

pub fn solution_json(sol: &TfSolution) -> String {
    let v = json!({
        "B": format!("{:.15e}", sol.b),
        "x_max": sol.params.x_max,
        "tail_amplitude": sol.tail.amplitude,
        "tail_subleading": sol.tail.subleading,
        "grid_points": sol.grid.len(),
    });
    serde_json::to_string_pretty(&v).unwrap()
}

pub fn moments_json(m: &TfMoments, b: f64) -> String {
    let v = json!({
        "m_f2": m.m_f2,
        "m_slope": m.m_slope,
        "m_norm": m.m_norm,
        "est_error": m.est_error,
        "B": format!("{b:.15e}"),
    });
    serde_json::to_string_pretty(&v).unwrap()
}

#[derive(Debug, Serialize)]
struct CorrectionRow {
    z: f64,
    delta_e_closed: f64,
    delta_e_oracle: f64,
}

pub fn correction_json(
    closed: &CorrectionResult,
    oracle: &CorrectionResult,
    ev_factor: Option<f64>,
) -> String {
    let rows: Vec<CorrectionRow> = closed
        .delta_e
        .iter()
        .zip(&oracle.delta_e)
        .map(|(&(z, dc), &(_, dor))| {
            let f = ev_factor.unwrap_or(1.0);
            CorrectionRow {
                z,
                delta_e_closed: dc * f,
                delta_e_oracle: dor * f,
            }
        })
        .collect();
    let v = json!({
        "c": format!("{:.15e}", closed.c),
        "unit": if ev_factor.is_some() { "eV" } else { "hartree" },
        "oracle_est_error": oracle.est_error,
        "corrections": rows,
    });
    serde_json::to_string_pretty(&v).unwrap()
}

/// `Z,deltaE_closed,deltaE_oracle` rows.
pub fn sweep_csv(closed: &CorrectionResult, oracle: &CorrectionResult) -> String {
    let mut out = String::from("Z,deltaE_closed,deltaE_oracle\n");
    for (&(z, dc), &(_, dor)) in closed.delta_e.iter().zip(&oracle.delta_e) {
        out.push_str(&format!("{},{},{}\n", num(z), num(dc), num(dor)));
    }
    out
}

pub fn verify_table(rows: &[CheckResult]) -> String {
    let mut out = String::new();
    for r in rows {
        out.push_str(&format!(
            "{:<28} {}  measured {:.3e} (limit {:.0e})  {}\n",
            r.name,
            if r.passed { "PASS" } else { "FAIL" },
            r.value,
            r.threshold,
            r.detail
        ));
    }
    out
}

pub fn verify_json(rows: &[CheckResult]) -> String {
    serde_json::to_string_pretty(rows).unwrap()
}
