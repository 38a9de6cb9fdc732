//! Subcommand execution and deterministic artifact emission: CSV tables,
//! JSON reports, and a manifest of checksummed relative paths.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;
use sha2::{Digest, Sha256};

use henon_core::fd::uniform_grid;
use henon_core::io;
use henon_core::iteration::{admissible_weight_bound, iteration_table};
use henon_core::oracle::{
    check_auxiliary_equation, check_expansion_identities, newton_potential_check,
    radial_newton_potential, random_square_trials, random_trace_trials, DecayQuantity,
    OracleResidual, TrialStats,
};
use henon_core::profile::TestFn;
use henon_core::solver::{critical_bubble, shoot_entire_solution_with, simulate_average_blowup};
use henon_core::verify::{
    conformal_scalar_curvature, inequality_report, ladder_check, wtilde_diagnostic, Verdict,
};
use henon_core::{Error, Result};

use crate::config::Resolved;

/// Output-directory writer that records every artifact's checksum for the
/// run manifest. Paths in the manifest are relative to the run directory;
/// nothing absolute or time-dependent is ever written.
pub struct Artifacts {
    root: PathBuf,
    pub records: Vec<(String, String)>,
}

fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut out = String::with_capacity(64);
    for b in digest {
        write!(out, "{b:02x}").unwrap();
    }
    out
}

impl Artifacts {
    pub fn create(root: &Path) -> Result<Self> {
        std::fs::create_dir_all(root)
            .map_err(|e| Error::Invalid(format!("cannot create output directory: {e}")))?;
        Ok(Artifacts { root: root.to_path_buf(), records: Vec::new() })
    }

    pub fn write_text(&mut self, rel: &str, text: &str) -> Result<()> {
        let path = self.root.join(rel);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)
                .map_err(|e| Error::Invalid(format!("cannot create {}: {e}", rel)))?;
        }
        std::fs::write(&path, text)
            .map_err(|e| Error::Invalid(format!("cannot write {rel}: {e}")))?;
        self.records.push((rel.to_string(), sha256_hex(text.as_bytes())));
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, rel: &str, value: &T) -> Result<()> {
        self.write_text(rel, &io::to_json_pretty(value)?)
    }

    /// Manifest: resolved config echo plus sorted artifact checksums.
    pub fn finish(&mut self, config_echo: serde_json::Value) -> Result<()> {
        let mut entries = self.records.clone();
        entries.sort();
        let manifest = json!({
            "config": config_echo,
            "artifacts": entries
                .iter()
                .map(|(path, sha256)| json!({ "path": path, "sha256": sha256 }))
                .collect::<Vec<_>>(),
        });
        self.write_text("manifest.json", &io::to_json_pretty(&manifest)?)
    }
}

/// The manifest's config echo; identical shape for every subcommand so
/// sweep points and single runs diff cleanly.
pub fn config_echo(subcommand: &str, cfg: &Resolved) -> serde_json::Value {
    json!({
        "subcommand": subcommand,
        "n": cfg.n,
        "p": cfg.p,
        "a": cfg.a,
        "u0": cfg.u0,
        "k": cfg.k,
        "seed": cfg.seed,
        "exploratory": cfg.exploratory,
        "r_max": cfg.r_max,
        "v0": cfg.v0,
        "escape": cfg.escape,
        "trials": cfg.trials,
        "tolerances": cfg.tolerances,
    })
}

fn csv_row(out: &mut String, cells: &[String]) {
    out.push_str(&cells.join(","));
    out.push('\n');
}

pub struct Outcome {
    pub pass: bool,
    /// Sweep row cells, parallel to the subcommand's column list.
    pub row: Vec<String>,
}

/// Dispatch by subcommand name; the names double as the sweep inner keys.
pub fn dispatch(sub: &str, cfg: &Resolved, art: &mut Artifacts) -> Result<Outcome> {
    match sub {
        "sequences" => cmd_sequences(cfg, art),
        "solve" => cmd_solve(cfg, art),
        "verify" => cmd_verify(cfg, art),
        "blowup" => cmd_blowup(cfg, art),
        "oracle" => cmd_oracle(cfg, art),
        "decay" => cmd_decay(cfg, art),
        other => Err(Error::Invalid(format!("unknown subcommand '{other}'"))),
    }
}

/// Coefficient table, limits, and the admissible weight bound.
pub fn cmd_sequences(cfg: &Resolved, art: &mut Artifacts) -> Result<Outcome> {
    let params = cfg.params()?;
    let table = iteration_table(&params, cfg.k)?;

    let mut csv = String::from("k,alpha,beta,i1,i2,i3,i4,a_bound\n");
    for row in &table.rows {
        csv_row(
            &mut csv,
            &[
                row.k.to_string(),
                row.alpha.to_string(),
                row.beta.to_string(),
                row.i1.to_string(),
                row.i2.to_string(),
                row.i3.to_string(),
                row.i4.to_string(),
                row.a_bound.to_string(),
            ],
        );
    }
    art.write_text("sequences.csv", &csv)?;

    let tol = cfg.tol("seq_limit");
    let converged = table.alpha_gap < tol && table.beta_gap < tol;
    let weight = if params.is_strict() {
        Some(admissible_weight_bound(&params, cfg.k)?)
    } else {
        None
    };
    let pass = converged && weight.as_ref().is_none_or(|w| w.a_k.iter().all(|&x| x > 0.0));
    art.write_json(
        "summary.json",
        &json!({
            "alpha_limit": table.alpha_limit,
            "beta_limit": table.beta_limit,
            "i3_limit": table.i3_limit,
            "a_limit": table.a_limit,
            "alpha_gap": table.alpha_gap,
            "beta_gap": table.beta_gap,
            "admissible_inf": table.admissible_inf(),
            "converged": converged,
            "weight_bound": weight,
            "pass": pass,
        }),
    )?;
    Ok(Outcome {
        pass,
        row: vec![
            table.alpha_limit.to_string(),
            table.beta_limit.to_string(),
            table.alpha_gap.to_string(),
            table.beta_gap.to_string(),
            table.admissible_inf().to_string(),
        ],
    })
}

pub const SEQUENCES_COLUMNS: &str = "alpha_limit,beta_limit,alpha_gap,beta_gap,admissible_inf";

/// Shooting solve: profile CSV plus bisection metadata.
pub fn cmd_solve(cfg: &Resolved, art: &mut Artifacts) -> Result<Outcome> {
    let params = cfg.params()?;
    let shot = shoot_entire_solution_with(&params, cfg.u0, cfg.tol("shoot"), cfg.r_max)?;
    art.write_text("profile.csv", &io::profile_csv(&shot.profile))?;
    let pass = shot.profile.is_entire_like();
    art.write_json(
        "solve.json",
        &json!({
            "v0_star": shot.v0_star,
            "bracket": shot.bracket,
            "classification": shot.profile.meta.classification,
            "warnings": shot.profile.meta.warnings,
            "grid_points": shot.profile.r.len(),
            "tail_slope": shot.profile.tail_slope(),
            "pass": pass,
        }),
    )?;
    Ok(Outcome {
        pass,
        row: vec![
            shot.v0_star.to_string(),
            shot.profile.meta.classification.to_string(),
        ],
    })
}

pub const SOLVE_COLUMNS: &str = "v0_star,classification";

/// Solve-then-verify pipeline: margins, ladder, curvature, and the
/// subharmonicity diagnostic.
pub fn cmd_verify(cfg: &Resolved, art: &mut Artifacts) -> Result<Outcome> {
    let params = cfg.params()?;
    let shot = shoot_entire_solution_with(&params, cfg.u0, cfg.tol("shoot"), cfg.r_max)?;
    let table = iteration_table(&params, cfg.k)?;
    let report = inequality_report(&shot.profile, &table, cfg.tol("margin_rel"))?;
    let ladder = ladder_check(&shot.profile, &table, 0.0, cfg.k, cfg.tol("margin_rel"))?;
    let curvature = conformal_scalar_curvature(&shot.profile)?;
    let d = params.derived();
    let wtilde = wtilde_diagnostic(&shot.profile, d.alpha_limit, d.beta_limit, 0.0)?;

    art.write_text("profile.csv", &io::profile_csv(&shot.profile))?;
    art.write_text("margins.csv", &io::margins_csv(&shot.profile.r, &report)?)?;
    art.write_text("ladder.csv", &io::ladder_csv(&shot.profile.r, &ladder)?)?;

    let dominance_min = report.dominance.iter().cloned().fold(f64::INFINITY, f64::min);
    let min_margin_rel = if report.scale > 0.0 {
        report.min_margin_main / report.scale
    } else {
        report.min_margin_main
    };
    let pass = report.verdict != Verdict::Fail;
    art.write_json(
        "verify.json",
        &json!({
            "v0_star": shot.v0_star,
            "verdict": report.verdict,
            "min_margin_main": report.min_margin_main,
            "min_margin_rel": min_margin_rel,
            "argmin_radius": report.argmin_radius,
            "scale": report.scale,
            "dominance_min": dominance_min,
            "ladder_max_overall": ladder.max_overall,
            "ladder_monotone": ladder.monotone_in_k,
            "curvature": {
                "min_s_g": curvature.min_s_g,
                "positive": curvature.positive,
                "max_identity_residual": curvature.max_identity_residual,
            },
            "wtilde": {
                "mask_empty": wtilde.mask_empty,
                "min_laplacian_on_mask": wtilde.min_laplacian_on_mask,
            },
            "pass": pass,
        }),
    )?;
    Ok(Outcome {
        pass,
        row: vec![
            shot.v0_star.to_string(),
            min_margin_rel.to_string(),
            format!("{:?}", report.verdict).to_lowercase(),
        ],
    })
}

pub const VERIFY_COLUMNS: &str = "v0_star,min_margin_rel,verdict";

/// Averaged blow-up trajectory with the quadratic bound and envelopes.
pub fn cmd_blowup(cfg: &Resolved, art: &mut Artifacts) -> Result<Outcome> {
    let params = cfg.params()?;
    let report = simulate_average_blowup(&params, cfg.u0, cfg.v0, cfg.escape)?;
    art.write_text("profile.csv", &io::profile_csv(&report.profile))?;
    let envelopes_ok = report.envelope_checks.iter().all(|e| e.fraction_ok == 1.0);
    let pass = report.bound_check == 1.0
        && report.r_escape.is_some()
        && report.v_nonincreasing
        && report.du_lower_bound_ok
        && envelopes_ok;
    art.write_json(
        "blowup.json",
        &json!({
            "alpha_bar": report.alpha_bar,
            "bound_check": report.bound_check,
            "r_escape": report.r_escape,
            "envelope_checks": report.envelope_checks,
            "v_nonincreasing": report.v_nonincreasing,
            "du_lower_bound_ok": report.du_lower_bound_ok,
            "pass": pass,
        }),
    )?;
    Ok(Outcome {
        pass,
        row: vec![
            report.bound_check.to_string(),
            report.r_escape.map_or(String::new(), |r| r.to_string()),
        ],
    })
}

pub const BLOWUP_COLUMNS: &str = "bound_check,r_escape";

/// The full oracle battery: randomized elementary inequalities, expansion
/// identity refinement, the auxiliary equation with its negative control,
/// the Newton potential on the bubble, and potential linearity.
pub fn cmd_oracle(cfg: &Resolved, art: &mut Artifacts) -> Result<Outcome> {
    let params = cfg.params()?;
    let trace: TrialStats = random_trace_trials(5, cfg.trials, cfg.seed);
    let square: TrialStats = random_square_trials(cfg.trials, cfg.seed.wrapping_add(1));

    let grids = [51usize, 101, 201, 401];
    let mut residuals: Vec<OracleResidual<f64>> = Vec::new();
    residuals.extend(check_expansion_identities(&TestFn::Gaussian, &params, 0.1, &grids)?);

    let grid3 = uniform_grid(0.0, 3.0, 601);
    let bubble3 = critical_bubble(cfg.n, 1.0, &grid3)?;
    let aux = check_auxiliary_equation(&bubble3)?;
    let control_params = henon_core::params::ProblemParams::exploratory(cfg.n, 3.0, 0.0)?;
    let control = check_auxiliary_equation(&TestFn::Gaussian.profile(control_params, &grid3)?)?;
    let control_ratio = control.residual.last().unwrap() / aux.residual.last().unwrap();
    residuals.push(aux);

    let grid20 = uniform_grid(0.0, 20.0, 2001);
    let bubble20 = critical_bubble(cfg.n, 1.0, &grid20)?;
    let potential = newton_potential_check(&bubble20)?;

    // Linearity of the potential in the source, on a generic pair.
    let f1: Vec<f64> = grid20.iter().map(|&x: &f64| (-x * x).exp()).collect();
    let f2: Vec<f64> = grid20.iter().map(|&x: &f64| 1.0 / (1.0 + x * x).powi(3)).collect();
    let sum: Vec<f64> = f1.iter().zip(&f2).map(|(a, b)| a + b).collect();
    let w1 = radial_newton_potential(&grid20, &f1, cfg.n, 0.0, None)?.w;
    let w2 = radial_newton_potential(&grid20, &f2, cfg.n, 0.0, None)?.w;
    let ws = radial_newton_potential(&grid20, &sum, cfg.n, 0.0, None)?.w;
    let linearity = w1
        .iter()
        .zip(&w2)
        .zip(&ws)
        .map(|((a, b), c)| (a + b - c).abs() / (1.0 + c.abs()))
        .fold(0.0, f64::max);

    art.write_text("residuals.csv", &io::residuals_csv(&residuals))?;
    let pass = trace.pass()
        && square.pass()
        && residuals.iter().all(|r| r.verdict)
        && control_ratio > 100.0
        && potential.max_h_rel < 1e-6
        && linearity < 1e-12;
    art.write_json(
        "oracle.json",
        &json!({
            "trials": cfg.trials,
            "seed": cfg.seed,
            "trace": trace,
            "square": square,
            "residuals": residuals,
            "auxiliary_control_ratio": control_ratio,
            "potential": {
                "max_h_rel": potential.max_h_rel,
                "harmonic_fit": potential.harmonic_fit,
                "source_residual": potential.source_residual,
                "tail_estimate": potential.tail_estimate,
            },
            "linearity_max_rel": linearity,
            "pass": pass,
        }),
    )?;
    Ok(Outcome {
        pass,
        row: vec![
            trace.min_relative_margin.to_string(),
            square.min_relative_margin.to_string(),
        ],
    })
}

pub const ORACLE_COLUMNS: &str = "min_trace_rel,min_square_rel";

/// Ball-integral decay slopes of the four estimated quantities against
/// their predicted exponents, on a fresh shooting solution.
pub fn cmd_decay(cfg: &Resolved, art: &mut Artifacts) -> Result<Outcome> {
    let params = cfg.params()?;
    let shot = shoot_entire_solution_with(&params, cfg.u0, cfg.tol("shoot"), cfg.r_max)?;
    let band = cfg.tol("slope_band");
    let mut rows = Vec::new();
    let mut csv = String::from("quantity,predicted,fitted,window_lo,window_hi,pass,two_sided\n");
    let mut pass = true;
    let mut fitted = Vec::new();
    for q in DecayQuantity::all() {
        let rep = decay_with_band(&shot.profile, q, band)?;
        csv_row(
            &mut csv,
            &[
                rep.quantity.clone(),
                rep.predicted.to_string(),
                rep.fitted.to_string(),
                rep.window.0.to_string(),
                rep.window.1.to_string(),
                rep.pass.to_string(),
                rep.two_sided.to_string(),
            ],
        );
        pass &= rep.pass;
        fitted.push(rep.fitted.to_string());
        rows.push(rep);
    }
    art.write_text("decay.csv", &csv)?;
    art.write_json(
        "decay.json",
        &json!({ "v0_star": shot.v0_star, "slopes": rows, "pass": pass }),
    )?;
    Ok(Outcome { pass, row: fitted })
}

pub const DECAY_COLUMNS: &str = "lemma1bound,corollary_u,corgrad,delta2";

/// Slope check with the configured band in place of the library default:
/// one-sided for the verdict (the estimates are upper bounds), symmetric
/// for the sharpness diagnostic.
fn decay_with_band(
    profile: &henon_core::Profile,
    q: DecayQuantity,
    band: f64,
) -> Result<henon_core::oracle::SlopeReport<f64>> {
    let mut rep = henon_core::oracle::decay_slope_check(profile, q)?;
    rep.pass = rep.fitted <= rep.predicted + band;
    rep.two_sided = (rep.fitted - rep.predicted).abs() <= band;
    Ok(rep)
}
