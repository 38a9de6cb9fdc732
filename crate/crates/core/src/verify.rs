//! Pointwise evaluation of the main inequality, its one-step baseline, the
//! iteration ladder w_k, the transformed-ladder diagnostic, and the
//! conformal scalar curvature, on radial profiles.

use num_traits::{Float, FromPrimitive};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::iteration::IterationTable;
use crate::profile::{weight_pow, RadialProfile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// Strict-mode entire-like profile, minimum margin within tolerance.
    Pass,
    /// Strict-mode entire-like profile, margin violated beyond tolerance.
    Fail,
    /// Exploratory parameters or non-entire-like profile: margins reported,
    /// no sign asserted.
    ReportOnly,
    /// Weight a exceeds the admissible bound inf A_k; margins reported but
    /// the theorem does not cover this weight.
    OutsideWeightRange,
}

#[derive(Debug, Clone, Serialize)]
pub struct LadderMax<F> {
    pub k: i64,
    pub max_w: F,
}

#[derive(Debug, Clone, Serialize)]
pub struct InequalityReport<F> {
    /// v - (beta_limit r^b u^q + alpha_limit u'^2/u) per grid point.
    pub margins_main: Vec<F>,
    /// v - sqrt(2/(p+1)) r^b u^q per grid point.
    pub margins_souplet: Vec<F>,
    /// RHS_main - RHS_souplet per grid point; nonnegative unconditionally.
    pub dominance: Vec<F>,
    pub min_margin_main: F,
    pub argmin_radius: F,
    pub ladder: Vec<LadderMax<F>>,
    /// sup of RHS_main over the grid; tolerances are relative to this.
    pub scale: F,
    pub tol_rel: F,
    pub verdict: Verdict,
}

fn require_positive_u<F: Float + FromPrimitive>(profile: &RadialProfile<F>) -> Result<()> {
    profile.validate()?;
    if profile.u.iter().any(|&u| !(u > F::zero())) {
        return Err(Error::Profile(
            "profile has nonpositive u; margin terms divide by u".into(),
        ));
    }
    Ok(())
}

fn check_table_match<F: Float + FromPrimitive>(
    profile: &RadialProfile<F>,
    table: &IterationTable<F>,
) -> Result<()> {
    let d = profile.meta.params.derived();
    let tol = F::from_f64(1e-9).unwrap();
    if (table.alpha_limit - d.alpha_limit).abs() > tol
        || (table.beta_limit - d.beta_limit).abs() > tol
    {
        return Err(Error::Invalid(
            "iteration table was built for different parameters than the profile".into(),
        ));
    }
    Ok(())
}

/// sup over the grid of the main right-hand side, the scale for relative
/// tolerances.
fn main_rhs_scale<F: Float + FromPrimitive>(profile: &RadialProfile<F>) -> F {
    let d = profile.meta.params.derived();
    let mut scale = F::zero();
    for i in 0..profile.r.len() {
        let wq = weight_pow(profile.r[i], d.b) * profile.u[i].powf(d.q);
        let rhs = d.beta_limit * wq
            + d.alpha_limit * (profile.du[i] * profile.du[i] / profile.u[i]);
        if rhs > scale {
            scale = rhs;
        }
    }
    scale
}

/// Evaluate the main pointwise inequality and the one-step baseline on a
/// profile; the iteration table supplies the ladder maxima and the
/// admissible weight window.
pub fn inequality_report<F: Float + FromPrimitive>(
    profile: &RadialProfile<F>,
    table: &IterationTable<F>,
    tol_rel: F,
) -> Result<InequalityReport<F>> {
    require_positive_u(profile)?;
    check_table_match(profile, table)?;
    let params = &profile.meta.params;
    let d = params.derived();
    let two = F::from_f64(2.0).unwrap();
    let beta0 = (two / (params.p + F::one())).sqrt();

    let m = profile.r.len();
    let mut margins_main = Vec::with_capacity(m);
    let mut margins_souplet = Vec::with_capacity(m);
    let mut dominance = Vec::with_capacity(m);
    let mut min_margin = F::infinity();
    let mut argmin = profile.r[0];
    let mut scale = F::zero();
    for i in 0..m {
        // Association matters: the ladder evaluates beta * (r^b u^q), and the
        // k = 0 row must equal the negated baseline margin bit for bit.
        let wq = weight_pow(profile.r[i], d.b) * profile.u[i].powf(d.q);
        let grad = profile.du[i] * profile.du[i] / profile.u[i];
        let rhs_main = d.beta_limit * wq + d.alpha_limit * grad;
        let rhs_souplet = beta0 * wq;
        let margin = profile.v[i] - rhs_main;
        margins_main.push(margin);
        margins_souplet.push(profile.v[i] - rhs_souplet);
        dominance.push(rhs_main - rhs_souplet);
        if margin < min_margin {
            min_margin = margin;
            argmin = profile.r[i];
        }
        if rhs_main > scale {
            scale = rhs_main;
        }
    }

    let ladder_vals = ladder_check(profile, table, F::zero(), table.rows.len() - 1, tol_rel)?;
    let ladder = ladder_vals
        .ks
        .iter()
        .zip(&ladder_vals.max_w)
        .map(|(&k, &mw)| LadderMax { k, max_w: mw })
        .collect();

    let a_inf = table.admissible_inf();
    let verdict = if params.a > a_inf {
        Verdict::OutsideWeightRange
    } else if params.is_strict() && profile.is_entire_like() {
        if min_margin >= -tol_rel * scale {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    } else {
        Verdict::ReportOnly
    };

    Ok(InequalityReport {
        margins_main,
        margins_souplet,
        dominance,
        min_margin_main: min_margin,
        argmin_radius: argmin,
        ladder,
        scale,
        tol_rel,
        verdict,
    })
}

/// The ladder functions w_k = lap u + alpha_k u'^2/(u+eps) + beta_k r^b u^q
/// evaluated per k, with w at k = -1 meaning lap u alone.
#[derive(Debug, Clone, Serialize)]
pub struct LadderValues<F> {
    pub epsilon: F,
    /// Row indices: -1, 0, 1, ..., K.
    pub ks: Vec<i64>,
    pub w_rows: Vec<Vec<F>>,
    pub max_w: Vec<F>,
    /// Grid indices where the last row is >= 0.
    pub region_mask: Vec<usize>,
    /// Pointwise w_{k+1} >= w_k everywhere (guaranteed at eps = 0).
    pub monotone_in_k: bool,
    pub scale: F,
    /// max over all rows and points; <= tol * scale on covered profiles.
    pub max_overall: F,
    pub tol: F,
}

pub fn ladder_check<F: Float + FromPrimitive>(
    profile: &RadialProfile<F>,
    table: &IterationTable<F>,
    epsilon: F,
    k_max: usize,
    tol: F,
) -> Result<LadderValues<F>> {
    require_positive_u(profile)?;
    check_table_match(profile, table)?;
    if epsilon < F::zero() {
        return Err(Error::Invalid("epsilon must be nonnegative".into()));
    }
    if k_max >= table.rows.len() {
        return Err(Error::Invalid(format!(
            "ladder depth {k_max} exceeds table length {}",
            table.rows.len()
        )));
    }
    let d = profile.meta.params.derived();
    let m = profile.r.len();

    // Shared grid factors.
    let grad: Vec<F> = (0..m)
        .map(|i| profile.du[i] * profile.du[i] / (profile.u[i] + epsilon))
        .collect();
    let wq: Vec<F> = (0..m)
        .map(|i| weight_pow(profile.r[i], d.b) * profile.u[i].powf(d.q))
        .collect();

    let mut ks = vec![-1i64];
    let mut w_rows: Vec<Vec<F>> = vec![(0..m).map(|i| -profile.v[i]).collect()];
    for k in 0..=k_max {
        let alpha = table.rows[k].alpha;
        let beta = table.rows[k].beta;
        let row: Vec<F> = (0..m)
            .map(|i| -profile.v[i] + alpha * grad[i] + beta * wq[i])
            .collect();
        ks.push(k as i64);
        w_rows.push(row);
    }

    let max_w: Vec<F> = w_rows
        .iter()
        .map(|row| row.iter().cloned().fold(F::neg_infinity(), F::max))
        .collect();
    let max_overall = max_w.iter().cloned().fold(F::neg_infinity(), F::max);
    let last = w_rows.last().unwrap();
    let region_mask: Vec<usize> =
        (0..m).filter(|&i| last[i] >= F::zero()).collect();
    let mut monotone = true;
    for pair in w_rows.windows(2).skip(1) {
        // Skip the (-1, 0) pair: the k = -1 row drops the beta term, so the
        // coefficient-monotonicity argument starts at k = 0.
        for i in 0..m {
            if pair[1][i] < pair[0][i] {
                monotone = false;
            }
        }
    }
    // The -1 -> 0 step adds beta_0 wq >= 0, so include it too.
    for i in 0..m {
        if w_rows[1][i] < w_rows[0][i] {
            monotone = false;
        }
    }

    Ok(LadderValues {
        epsilon,
        ks,
        w_rows,
        max_w,
        region_mask,
        monotone_in_k: monotone,
        scale: main_rhs_scale(profile),
        max_overall,
        tol,
    })
}

/// The transformed ladder wtilde = (u+eps)^(-alpha) w and its radial
/// Laplacian on the region {w >= 0}, where the transform is subharmonic
/// for solutions.
#[derive(Debug, Clone, Serialize)]
pub struct WtildeReport<F> {
    pub alpha: F,
    pub beta: F,
    pub epsilon: F,
    /// Profile-grid indices where w >= 0.
    pub region_mask: Vec<usize>,
    pub mask_empty: bool,
    /// (radius, lap wtilde) at uniform resample points inside the mask.
    pub laplacian_on_mask: Vec<(F, F)>,
    pub min_laplacian_on_mask: Option<F>,
}

pub fn wtilde_diagnostic<F: Float + FromPrimitive>(
    profile: &RadialProfile<F>,
    alpha: F,
    beta: F,
    epsilon: F,
) -> Result<WtildeReport<F>> {
    require_positive_u(profile)?;
    let params = &profile.meta.params;
    let two = F::from_f64(2.0).unwrap();
    if !(params.p + F::one() > two * alpha) {
        return Err(Error::Hypothesis(format!(
            "transform requires p+1 > 2*alpha, got p = {:?}, alpha = {:?}",
            params.p.to_f64(),
            alpha.to_f64()
        )));
    }
    let d = params.derived();
    let m = profile.r.len();
    let w_of = |u: F, du: F, v: F, r: F| -> F {
        -v + alpha * du * du / (u + epsilon) + beta * weight_pow(r, d.b) * u.powf(d.q)
    };
    let region_mask: Vec<usize> = (0..m)
        .filter(|&i| w_of(profile.u[i], profile.du[i], profile.v[i], profile.r[i]) >= F::zero())
        .collect();

    // FD Laplacian of wtilde needs a uniform grid away from r = 0.
    let lo = if profile.r[0] > F::zero() { profile.r[0] } else { profile.r[1] };
    let hi = *profile.r.last().unwrap();
    let samples = 512usize;
    let rs = profile.resample_uniform(lo, hi, samples)?;
    let mut wt = Vec::with_capacity(samples);
    let mut on_mask = vec![false; samples];
    for i in 0..samples {
        let w = w_of(rs.u[i], rs.du[i], rs.v[i], rs.r[i]);
        wt.push((rs.u[i] + epsilon).powf(-alpha) * w);
        on_mask[i] = w >= F::zero();
    }
    let lap = crate::fd::radial_laplacian(&rs.r, &wt, params.n);
    let mut laplacian_on_mask = Vec::new();
    let mut min_lap: Option<F> = None;
    for i in 1..samples - 1 {
        if on_mask[i] {
            laplacian_on_mask.push((rs.r[i], lap[i]));
            min_lap = Some(match min_lap {
                Some(v) if v < lap[i] => v,
                _ => lap[i],
            });
        }
    }

    Ok(WtildeReport {
        alpha,
        beta,
        epsilon,
        mask_empty: region_mask.is_empty(),
        region_mask,
        laplacian_on_mask,
        min_laplacian_on_mask: min_lap,
    })
}

/// Scalar curvature of the conformal metric u^(4/(n-4)) g_flat, evaluated
/// radially, plus a finite-difference check of the composition identity
/// lap(u^m) = m u^(m-1) (lap u + (m-1) u'^2/u).
#[derive(Debug, Clone, Serialize)]
pub struct CurvatureReport<F> {
    pub conformal_exponent: F,
    pub inner_power: F,
    pub s_g: Vec<F>,
    pub min_s_g: F,
    pub positive: bool,
    /// |lap(u^m) - m u^(m-1)(lap u + (m-1) u'^2/u)| on a uniform resample,
    /// all derivatives by finite differences.
    pub identity_residual: Vec<F>,
    pub max_identity_residual: F,
}

pub fn conformal_scalar_curvature<F: Float + FromPrimitive>(
    profile: &RadialProfile<F>,
) -> Result<CurvatureReport<F>> {
    require_positive_u(profile)?;
    let params = &profile.meta.params;
    let n = params.nf();
    let one = F::one();
    let two = F::from_f64(2.0).unwrap();
    let four = F::from_f64(4.0).unwrap();
    let m_pow = (n - two) / (n - four);
    let pref = four * (n - one) / (n - two) * m_pow;
    let expo = -n / (n - four);

    let mut s_g = Vec::with_capacity(profile.r.len());
    let mut min_s_g = F::infinity();
    for i in 0..profile.r.len() {
        let u = profile.u[i];
        let grad = profile.du[i] * profile.du[i] / u;
        let val = pref * u.powf(expo) * (profile.v[i] - (m_pow - one) * grad);
        if val < min_s_g {
            min_s_g = val;
        }
        s_g.push(val);
    }

    let lo = if profile.r[0] > F::zero() { profile.r[0] } else { profile.r[1] };
    let hi = *profile.r.last().unwrap();
    let samples = 512usize;
    let rs = profile.resample_uniform(lo, hi, samples)?;
    let h = rs.r[1] - rs.r[0];
    let um: Vec<F> = rs.u.iter().map(|&u| u.powf(m_pow)).collect();
    let lap_um = crate::fd::radial_laplacian(&rs.r, &um, params.n);
    let lap_u = crate::fd::radial_laplacian(&rs.r, &rs.u, params.n);
    let du_fd = crate::fd::d1(&rs.u, h);
    let mut identity_residual = Vec::with_capacity(samples);
    let mut max_res = F::zero();
    for i in 0..samples {
        let u = rs.u[i];
        let rhs = m_pow * u.powf(m_pow - one) * (lap_u[i] + (m_pow - one) * du_fd[i] * du_fd[i] / u);
        let res = (lap_um[i] - rhs).abs();
        if res > max_res {
            max_res = res;
        }
        identity_residual.push(res);
    }

    Ok(CurvatureReport {
        conformal_exponent: four / (n - four),
        inner_power: m_pow,
        min_s_g,
        positive: min_s_g > F::zero(),
        s_g,
        identity_residual,
        max_identity_residual: max_res,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::iteration::iteration_table;
    use crate::params::ProblemParams;
    use crate::profile::{Classification, TestFn};

    /// Synthetic n=8, p=5, a=0 profile u = (1+r^2)^(-1/2): decays like the
    /// scaling tail r^(-1) and satisfies the main inequality pointwise.
    fn synthetic_entire(n_pts: usize, r_max: f64, amp: f64) -> RadialProfile<f64> {
        let params = ProblemParams::strict(8, 5.0f64, 0.0).unwrap();
        let f = TestFn::Rational { amp, lambda2: 1.0, sigma: 0.5 };
        let grid = crate::fd::uniform_grid(0.0, r_max, n_pts);
        let mut prof = f.profile(params, &grid).unwrap();
        prof.meta.classification = Classification::EntireLike;
        prof
    }

    #[test]
    fn synthetic_profile_passes_and_scaled_one_fails() {
        let table = iteration_table(&ProblemParams::strict(8, 5.0f64, 0.0).unwrap(), 50).unwrap();
        let good = synthetic_entire(2001, 200.0, 1.0);
        let rep = inequality_report(&good, &table, 1e-6).unwrap();
        assert_eq!(rep.verdict, Verdict::Pass, "min margin {}", rep.min_margin_main);
        assert!(rep.min_margin_main > 0.0);
        // Quintupling u turns the u^3 term dominant and breaks the bound.
        let bad = synthetic_entire(2001, 200.0, 5.0);
        let rep2 = inequality_report(&bad, &table, 1e-6).unwrap();
        assert_eq!(rep2.verdict, Verdict::Fail);
        assert!(rep2.min_margin_main < -rep2.tol_rel * rep2.scale);
    }

    #[test]
    fn dominance_is_nonnegative_even_for_arbitrary_profiles() {
        // Weight a = 1 sits inside the admissible window for (n, p) = (8, 5),
        // so the exploratory profile reports instead of being rejected.
        let params = ProblemParams::exploratory(8, 5.0f64, 1.0).unwrap();
        let grid = crate::fd::uniform_grid(0.0, 6.0, 301);
        let prof = TestFn::Gaussian.profile(params, &grid).unwrap();
        let table = iteration_table(&params, 10).unwrap();
        let rep = inequality_report(&prof, &table, 1e-6).unwrap();
        assert!(rep.dominance.iter().all(|&d| d >= 0.0));
        assert_eq!(rep.verdict, Verdict::ReportOnly);
    }

    #[test]
    fn ladder_rows_are_monotone_and_match_baseline() {
        let params = ProblemParams::strict(8, 5.0f64, 0.0).unwrap();
        let table = iteration_table(&params, 20).unwrap();
        let prof = synthetic_entire(801, 100.0, 1.0);
        let lv = ladder_check(&prof, &table, 0.0, 20, 1e-6).unwrap();
        assert!(lv.monotone_in_k);
        assert_eq!(lv.ks[0], -1);
        // k = -1 row is lap u = -v.
        for (i, &w) in lv.w_rows[0].iter().enumerate() {
            assert_eq!(w, -prof.v[i]);
        }
        // k = 0 row is the negated baseline margin, bit for bit.
        let rep = inequality_report(&prof, &table, 1e-6).unwrap();
        for (w, m) in lv.w_rows[1].iter().zip(&rep.margins_souplet) {
            assert_eq!(*w, -m);
        }
        // All rows nonpositive on a profile satisfying the inequality.
        assert!(lv.max_overall <= 0.0);
        assert!(lv.region_mask.is_empty());
    }

    #[test]
    fn weight_above_admissible_window_downgrades_verdict() {
        let params = ProblemParams::exploratory(8, 5.0f64, 9.0).unwrap();
        let grid = crate::fd::uniform_grid(0.0, 5.0, 201);
        let prof = TestFn::Gaussian.profile(params, &grid).unwrap();
        let table = iteration_table(&params, 20).unwrap();
        let rep = inequality_report(&prof, &table, 1e-6).unwrap();
        assert_eq!(rep.verdict, Verdict::OutsideWeightRange);
    }

    #[test]
    fn wtilde_mask_full_on_constructed_violation_and_empty_on_solution() {
        // Near-constant positive u makes w ~ beta u^q > 0 everywhere.
        let params = ProblemParams::exploratory(8, 5.0f64, 0.0).unwrap();
        let f = TestFn::Rational { amp: 1.0, lambda2: 100.0, sigma: 0.01 };
        let grid = crate::fd::uniform_grid(0.1, 4.0, 201);
        let prof = f.profile(params, &grid).unwrap();
        let rep = wtilde_diagnostic(&prof, 0.2, 0.5, 0.0).unwrap();
        assert_eq!(rep.region_mask.len(), prof.r.len());
        assert!(!rep.laplacian_on_mask.is_empty());

        let good = synthetic_entire(801, 100.0, 1.0);
        let rep2 = wtilde_diagnostic(&good, 0.5, 0.5897678246195885, 0.0).unwrap();
        assert!(rep2.mask_empty);
        assert!(rep2.laplacian_on_mask.is_empty());

        // Hypothesis boundary alpha = (p+1)/2 rejected.
        assert!(wtilde_diagnostic(&good, 3.0, 0.5, 0.0).is_err());
    }

    #[test]
    fn curvature_sign_tracks_the_gradient_corrected_laplacian() {
        let prof = synthetic_entire(801, 100.0, 1.0);
        let rep = conformal_scalar_curvature(&prof).unwrap();
        assert!(rep.positive);
        assert!((rep.conformal_exponent - 1.0).abs() < 1e-15);
        assert!((rep.inner_power - 1.5).abs() < 1e-15);
        // Exact linkage: verdict equals sign of min(v - (m-1)u'^2/u).
        let m_pow = rep.inner_power;
        let linked = prof
            .r
            .iter()
            .enumerate()
            .map(|(i, _)| prof.v[i] - (m_pow - 1.0) * prof.du[i] * prof.du[i] / prof.u[i])
            .fold(f64::INFINITY, f64::min);
        assert_eq!(rep.positive, linked > 0.0);
    }

    #[test]
    fn curvature_identity_residual_converges_at_second_order() {
        let params = ProblemParams::exploratory(8, 2.0f64, 0.0).unwrap();
        let grid = crate::fd::uniform_grid(0.2, 3.0, 4001);
        let prof = TestFn::Gaussian.profile(params, &grid).unwrap();
        let rep = conformal_scalar_curvature(&prof).unwrap();
        assert!(rep.max_identity_residual < 1e-3);
        let mut hs = Vec::new();
        let mut res = Vec::new();
        for m in [101usize, 201, 401, 801] {
            // Direct refinement of the identity on analytic samples.
            let sub = crate::fd::uniform_grid(0.2, 3.0, m);
            let u: Vec<f64> = sub.iter().map(|&r| TestFn::<f64>::Gaussian.u(r)).collect();
            let h = sub[1] - sub[0];
            let m_pow: f64 = 1.5;
            let um: Vec<f64> = u.iter().map(|&x| x.powf(m_pow)).collect();
            let lap_um = crate::fd::radial_laplacian(&sub, &um, 8);
            let lap_u = crate::fd::radial_laplacian(&sub, &u, 8);
            let du = crate::fd::d1(&u, h);
            let mut worst = 0.0f64;
            for i in 0..m {
                let rhs = m_pow * u[i].powf(m_pow - 1.0)
                    * (lap_u[i] + (m_pow - 1.0) * du[i] * du[i] / u[i]);
                worst = worst.max((lap_um[i] - rhs).abs());
            }
            hs.push(h);
            res.push(worst);
        }
        let order = crate::fd::convergence_order(&hs, &res);
        assert!(order > 1.9, "order {order}");
    }

    #[test]
    fn constant_profile_has_zero_curvature() {
        let params = ProblemParams::exploratory(8, 5.0f64, 0.0).unwrap();
        let grid = crate::fd::uniform_grid(0.5, 3.0, 101);
        let m = grid.len();
        let prof = RadialProfile {
            r: grid,
            u: vec![2.0; m],
            du: vec![0.0; m],
            v: vec![0.0; m],
            dv: vec![0.0; m],
            meta: crate::profile::ProfileMeta {
                params,
                u0: 2.0,
                v0: 0.0,
                rtol: 0.0,
                atol: 0.0,
                classification: Classification::Exact,
                warnings: Vec::new(),
            },
        };
        let rep = conformal_scalar_curvature(&prof).unwrap();
        assert!(rep.s_g.iter().all(|&s| s == 0.0));
        assert!(!rep.positive);
    }
}
