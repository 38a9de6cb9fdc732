//! Deterministic text serialization: CSV tables with shortest round-trip
//! float formatting, and pretty JSON for report types.

use std::fmt::Display;

use num_traits::Float;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::oracle::OracleResidual;
use crate::profile::RadialProfile;
use crate::verify::{InequalityReport, LadderValues};

/// Rust's float Display already emits the shortest string that parses back
/// to the same bits, which keeps CSV output byte-deterministic.
fn push_row<F: Display>(out: &mut String, cells: &[F]) {
    for (i, c) in cells.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&c.to_string());
    }
    out.push('\n');
}

pub fn profile_csv<F: Float + Display>(profile: &RadialProfile<F>) -> String {
    let mut out = String::from("r,u,du,v,dv\n");
    for i in 0..profile.r.len() {
        push_row(
            &mut out,
            &[profile.r[i], profile.u[i], profile.du[i], profile.v[i], profile.dv[i]],
        );
    }
    out
}

/// Margin curves against radius, for external plotting.
pub fn margins_csv<F: Float + Display>(rs: &[F], report: &InequalityReport<F>) -> Result<String> {
    if rs.len() != report.margins_main.len() {
        return Err(Error::Invalid(format!(
            "margin CSV needs matching radius array: {} radii vs {} margins",
            rs.len(),
            report.margins_main.len()
        )));
    }
    let mut out = String::from("r,margin_main,margin_souplet,dominance\n");
    for i in 0..rs.len() {
        push_row(
            &mut out,
            &[rs[i], report.margins_main[i], report.margins_souplet[i], report.dominance[i]],
        );
    }
    Ok(out)
}

/// Ladder rows in long form: one line per (k, grid point).
pub fn ladder_csv<F: Float + Display>(rs: &[F], ladder: &LadderValues<F>) -> Result<String> {
    if ladder.w_rows.iter().any(|row| row.len() != rs.len()) {
        return Err(Error::Invalid("ladder CSV needs matching radius array".into()));
    }
    let mut out = String::from("k,r,w\n");
    for (k, row) in ladder.ks.iter().zip(&ladder.w_rows) {
        for (r, w) in rs.iter().zip(row) {
            out.push_str(&k.to_string());
            out.push(',');
            out.push_str(&r.to_string());
            out.push(',');
            out.push_str(&w.to_string());
            out.push('\n');
        }
    }
    Ok(out)
}

/// Residual histories in long form: one line per (identity, step size).
pub fn residuals_csv<F: Float + Display>(residuals: &[OracleResidual<F>]) -> String {
    let mut out = String::from("name,h,residual,order,verdict\n");
    for res in residuals {
        for (h, r) in res.grid_h.iter().zip(&res.residual) {
            out.push_str(&format!("{},{},{},{},{}\n", res.name, h, r, res.order, res.verdict));
        }
    }
    out
}

pub fn to_json_pretty<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value)
        .map_err(|e| Error::Invalid(format!("serialization failed: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fd::uniform_grid;
    use crate::params::ProblemParams;
    use crate::profile::TestFn;

    #[test]
    fn profile_csv_round_trips_every_float() {
        let params = ProblemParams::strict(8, 5.0f64, 0.0).unwrap();
        let prof = TestFn::Gaussian.profile(params, &uniform_grid(0.0, 2.0, 17)).unwrap();
        let csv = profile_csv(&prof);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "r,u,du,v,dv");
        for (i, line) in lines.enumerate() {
            let cells: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
            assert_eq!(cells[0].to_bits(), prof.r[i].to_bits());
            assert_eq!(cells[1].to_bits(), prof.u[i].to_bits());
            assert_eq!(cells[4].to_bits(), prof.dv[i].to_bits());
        }
    }

    #[test]
    fn csv_output_is_reproducible() {
        let params = ProblemParams::strict(8, 5.0f64, 0.5).unwrap();
        let prof = TestFn::Gaussian.profile(params, &uniform_grid(0.0, 3.0, 33)).unwrap();
        assert_eq!(profile_csv(&prof), profile_csv(&prof));
    }

    #[test]
    fn mismatched_lengths_are_rejected() {
        let params = ProblemParams::strict(8, 5.0f64, 0.0).unwrap();
        let prof = TestFn::Gaussian.profile(params, &uniform_grid(0.0, 2.0, 9)).unwrap();
        let table = crate::iteration::iteration_table(&params, 5).unwrap();
        let rep = crate::verify::inequality_report(&prof, &table, 1e-6).unwrap();
        assert!(margins_csv(&prof.r[..4], &rep).is_err());
        assert!(margins_csv(&prof.r, &rep).unwrap().starts_with("r,margin_main"));
    }
}
