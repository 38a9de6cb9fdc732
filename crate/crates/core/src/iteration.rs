//! The coefficient iteration behind the pointwise inequality: the alpha and
//! beta recursions, the ladder coefficients I1..I4 at the vanishing-
//! regularization limit, and the admissible weight bound A_k.

use crate::error::{Error, Result};
use crate::params::ProblemParams;
use num_traits::{Float, FromPrimitive};
use serde::Serialize;

/// alpha_0 = 0, then the positive root that annihilates I2 at every step:
/// alpha_{k+1} = [4(alpha_k+1) - n + sqrt(n(16 alpha_k^2 + 24 alpha_k + n + 8))] / (4(n-1)).
pub fn alpha_sequence<F: Float + FromPrimitive>(params: &ProblemParams<F>, k_max: usize) -> Vec<F> {
    let n = params.nf();
    let c4 = F::from_f64(4.0).unwrap();
    let c8 = F::from_f64(8.0).unwrap();
    let c16 = F::from_f64(16.0).unwrap();
    let c24 = F::from_f64(24.0).unwrap();
    let one = F::one();
    let mut out = Vec::with_capacity(k_max + 1);
    out.push(F::zero());
    for _ in 0..k_max {
        let ak = *out.last().unwrap();
        let disc = n * (c16 * ak * ak + c24 * ak + n + c8);
        out.push((c4 * (ak + one) - n + disc.sqrt()) / (c4 * (n - one)));
    }
    out
}

/// beta_0 = sqrt(2/(p+1)), beta_{k+1} = sqrt(2/(p+1) + 4 alpha_k beta_k^2 / ((p+1) n)).
pub fn beta_sequence<F: Float + FromPrimitive>(
    params: &ProblemParams<F>,
    alphas: &[F],
    k_max: usize,
) -> Result<Vec<F>> {
    if alphas.len() < k_max {
        return Err(Error::Invalid(format!(
            "beta recursion to k = {k_max} needs alpha_0..alpha_{}, got {} entries",
            k_max - 1,
            alphas.len()
        )));
    }
    let n = params.nf();
    let two = F::from_f64(2.0).unwrap();
    let four = F::from_f64(4.0).unwrap();
    let p1 = params.p + F::one();
    let mut out = Vec::with_capacity(k_max + 1);
    out.push((two / p1).sqrt());
    for k in 0..k_max {
        let bk = *out.last().unwrap();
        out.push((two / p1 + four / (p1 * n) * alphas[k] * bk * bk).sqrt());
    }
    Ok(out)
}

/// One ladder row evaluated at the vanishing-regularization limit
/// (the u/(u+eps) ratio set to rho; the theorem path uses rho = 1).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CoefficientRow<F> {
    pub k: usize,
    pub alpha: F,
    pub beta: F,
    pub i1: F,
    pub i2: F,
    pub i3: F,
    /// I4 at the params' own weight a.
    pub i4: F,
    /// Largest weight keeping I4 nonnegative at this row.
    pub a_bound: F,
}

pub fn iteration_coefficients<F: Float + FromPrimitive>(
    params: &ProblemParams<F>,
    alphas: &[F],
    betas: &[F],
    k: usize,
) -> Result<CoefficientRow<F>> {
    iteration_coefficients_with_ratio(params, alphas, betas, k, F::one())
}

/// rho in (0,1] is the u/(u+eps) ratio; rho = 1 is the limit the theorem uses.
pub fn iteration_coefficients_with_ratio<F: Float + FromPrimitive>(
    params: &ProblemParams<F>,
    alphas: &[F],
    betas: &[F],
    k: usize,
    rho: F,
) -> Result<CoefficientRow<F>> {
    if k + 1 >= alphas.len().min(betas.len()) {
        return Err(Error::Invalid(format!(
            "coefficient row k = {k} needs sequence entries through k+1 = {}",
            k + 1
        )));
    }
    if !(rho > F::zero() && rho <= F::one()) {
        return Err(Error::Invalid(format!(
            "ratio rho = {} outside (0, 1]",
            rho.to_f64().unwrap_or(f64::NAN)
        )));
    }
    let n = params.nf();
    let p = params.p;
    let one = F::one();
    let two = F::from_f64(2.0).unwrap();
    let four = F::from_f64(4.0).unwrap();
    let d = params.derived();
    let q = d.q;
    let (ak, ak1) = (alphas[k], alphas[k + 1]);
    let (bk, bk1) = (betas[k], betas[k + 1]);
    // alpha enters scaled by the ratio everywhere it came from the
    // |grad u|^2/(u+eps) term; at rho = 1 these reduce to the limit formulas.
    let akr = ak * rho;
    let ak1r = ak1 * rho;

    let i1 = one - (p + one) / two * bk1 * bk1 + two / n * ak1r * bk * bk;
    let i2 = two / n * (ak1r + akr + one) * (ak1r + akr + one) - two * ak1r * (ak1r + one) + ak1r;
    let i3 = four / n * ak1r * bk * (ak1r + akr + one) + bk1 * ak1r - (p + one) * bk1 * ak1r
        + (p + one) / two * ((p - one) / two - ak1r) * bk1;

    let denom = bk1 * (q - ak1r) * (q - ak1r) - i3;
    if params.mode == crate::params::Mode::Strict && !(denom > F::zero()) {
        return Err(Error::WeightBoundDenominator {
            k,
            value: denom.to_f64().unwrap_or(f64::NAN),
        });
    }
    let a_bound = two * (n - two) * i3 / denom;
    let a = params.a;
    let i4 = a / two * bk1 * (n + a / two - two)
        - a * a * bk1 * bk1 * (q - ak1r) * (q - ak1r) / (four * i3);
    Ok(CoefficientRow { k, alpha: ak, beta: bk, i1, i2, i3, i4, a_bound })
}

#[derive(Debug, Clone, Serialize)]
pub struct IterationTable<F> {
    pub rows: Vec<CoefficientRow<F>>,
    pub alpha_limit: F,
    pub beta_limit: F,
    /// beta * (q - n/(n-4)) (q - 2/(n-4)), the factored I3 limit.
    pub i3_limit: F,
    /// A at the limit constants.
    pub a_limit: F,
    /// |alpha_K - alpha_limit| and |beta_K - beta_limit|.
    pub alpha_gap: F,
    pub beta_gap: F,
    /// Full sequences including index K+1 (rows stop at K).
    pub alphas: Vec<F>,
    pub betas: Vec<F>,
}

impl<F: Float> IterationTable<F> {
    /// min over computed rows of A_k, capped by the limit value: the weight
    /// window this table certifies.
    pub fn admissible_inf(&self) -> F {
        self.rows
            .iter()
            .map(|r| r.a_bound)
            .fold(self.a_limit, F::min)
    }
}

pub fn iteration_table<F: Float + FromPrimitive>(
    params: &ProblemParams<F>,
    k_max: usize,
) -> Result<IterationTable<F>> {
    let alphas = alpha_sequence(params, k_max + 1);
    let betas = beta_sequence(params, &alphas, k_max + 1)?;
    let mut rows = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        rows.push(iteration_coefficients(params, &alphas, &betas, k)?);
    }
    let d = params.derived();
    let (i3_limit, a_limit) = limit_row(params);
    Ok(IterationTable {
        rows,
        alpha_limit: d.alpha_limit,
        beta_limit: d.beta_limit,
        i3_limit,
        a_limit,
        alpha_gap: (alphas[k_max] - d.alpha_limit).abs(),
        beta_gap: (betas[k_max] - d.beta_limit).abs(),
        alphas,
        betas,
    })
}

/// (I3, A) evaluated at the fixed point (alpha_limit, beta_limit).
pub fn limit_row<F: Float + FromPrimitive>(params: &ProblemParams<F>) -> (F, F) {
    let n = params.nf();
    let two = F::from_f64(2.0).unwrap();
    let four = F::from_f64(4.0).unwrap();
    let d = params.derived();
    let (q, al, be) = (d.q, d.alpha_limit, d.beta_limit);
    let i3 = be * (q - n / (n - four)) * (q - two / (n - four));
    let a_lim = two * (n - two) * i3 / (be * (q - al) * (q - al) - i3);
    (i3, a_lim)
}

#[derive(Debug, Clone, Serialize)]
pub struct WeightBoundReport<F> {
    pub a_k: Vec<F>,
    /// Smallest A_k over the window.
    pub window_min: F,
    pub window_min_index: usize,
    pub a_limit: F,
    /// min(window_min, a_limit): the usable bound at depth K.
    pub inf_bound: F,
    /// Whether A_k decreased monotonically over the window (observed, not assumed).
    pub monotone_decreasing: bool,
}

pub fn admissible_weight_bound<F: Float + FromPrimitive>(
    params: &ProblemParams<F>,
    k_max: usize,
) -> Result<WeightBoundReport<F>> {
    if params.mode != crate::params::Mode::Strict {
        return Err(Error::Hypothesis(
            "weight bound is defined in the supercritical (strict) regime".into(),
        ));
    }
    let table = iteration_table(params, k_max)?;
    let a_k: Vec<F> = table.rows.iter().map(|r| r.a_bound).collect();
    let (mut min, mut arg) = (a_k[0], 0usize);
    let mut monotone = true;
    for (k, &v) in a_k.iter().enumerate() {
        if v < min {
            min = v;
            arg = k;
        }
        if k > 0 && v > a_k[k - 1] {
            monotone = false;
        }
    }
    Ok(WeightBoundReport {
        window_min: min,
        window_min_index: arg,
        a_limit: table.a_limit,
        inf_bound: min.min(table.a_limit),
        monotone_decreasing: monotone,
        a_k,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::ProblemParams;

    fn reference() -> ProblemParams<f64> {
        ProblemParams::strict(8, 5.0, 0.0).unwrap()
    }

    #[test]
    fn alpha_starts_at_zero_and_hits_the_known_first_step() {
        let al = alpha_sequence(&reference(), 2);
        assert_eq!(al[0], 0.0);
        // (-4 + sqrt(128))/28, cross-checked against (4-n+sqrt(n^2+8n))/(4n-4)
        assert!((al[1] - 0.2612038749637414).abs() < 1e-15);
        assert!((al[1] - (4.0 - 8.0 + (64.0f64 + 64.0).sqrt()) / 28.0).abs() < 1e-15);
    }

    #[test]
    fn alpha_converges_to_two_over_n_minus_4() {
        let p = reference();
        let al = alpha_sequence(&p, 200);
        assert!((al[200] - 0.5).abs() < 1e-10);
        // Strictly increasing until the iterates hit the fixed point at
        // f64 resolution (the map sends 0.5 to exactly 0.5), then flat.
        assert!(al.windows(2).all(|w| w[1] >= w[0]));
        assert!(al.windows(2).all(|w| w[1] > w[0] || (w[0] - 0.5).abs() < 1e-12));
        assert!(al.iter().all(|&x| x <= 0.5));
        assert!(al[..40].iter().all(|&x| x < 0.5));
    }

    #[test]
    fn beta_first_step_is_stationary_then_converges() {
        let p = reference();
        let al = alpha_sequence(&p, 200);
        let be = beta_sequence(&p, &al, 200).unwrap();
        assert_eq!(be[0], (1.0f64 / 3.0).sqrt());
        assert_eq!(be[1], be[0]); // alpha_0 = 0 leaves the radicand unchanged
        assert!((be[200] - 0.5897678246195885).abs() < 1e-12);
        assert!(be.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn fixed_points_reproduce_themselves() {
        for (n, p) in [(5u32, 12.0f64), (8, 5.0), (10, 4.0), (12, 3.5)] {
            let params = ProblemParams::strict(n, p, 0.0).unwrap();
            let d = params.derived();
            let nf = n as f64;
            let al = d.alpha_limit;
            let next =
                (4.0 * (al + 1.0) - nf + (nf * (16.0 * al * al + 24.0 * al + nf + 8.0)).sqrt())
                    / (4.0 * (nf - 1.0));
            assert!((next - al).abs() < 1e-12, "alpha fixed point drifts at n={n}");
            let be = d.beta_limit;
            let bnext = (2.0 / (p + 1.0) + 4.0 / ((p + 1.0) * nf) * al * be * be).sqrt();
            assert!((bnext - be).abs() < 1e-12, "beta fixed point drifts at n={n}");
        }
    }

    #[test]
    fn i2_vanishes_and_i1_matches_closed_form() {
        let p = reference();
        let t = iteration_table(&p, 50).unwrap();
        for r in &t.rows {
            assert!(r.i2.abs() <= 1e-12 * (1.0 + t.alphas[r.k + 1].powi(2)));
            let closed = 2.0 / 8.0 * r.beta * r.beta * (t.alphas[r.k + 1] - r.alpha);
            assert!((r.i1 - closed).abs() <= 1e-12);
            // I1 = (2/n) beta_k^2 (alpha_{k+1} - alpha_k) > 0 while the alpha
            // increment is still resolvable; deep rows sit at roundoff.
            if t.alphas[r.k + 1] - r.alpha > 1e-13 {
                assert!(r.i1 > 0.0);
            }
        }
    }

    #[test]
    fn i3_row_zero_matches_independent_evaluation() {
        // frozen from a 40-digit evaluation of the same formulas
        let p = reference();
        let t = iteration_table(&p, 1).unwrap();
        assert!((t.rows[0].i3 - 2.3527512311488155).abs() < 1e-14);
    }

    #[test]
    fn i3_limit_factors() {
        let p = reference();
        let t = iteration_table(&p, 1).unwrap();
        // (q - n/(n-4))(q - 2/(n-4)) = (3-2)(3-0.5) = 2.5 at n=8, p=5
        assert!((t.i3_limit / p.derived().beta_limit - 2.5).abs() < 1e-12);
    }

    #[test]
    fn weight_bound_reference_values() {
        let p = reference();
        let w = admissible_weight_bound(&p, 200).unwrap();
        assert!((w.a_k[0] - 14.273836674363554).abs() < 1e-9);
        assert!((w.a_limit - 8.0).abs() < 1e-9);
        assert!(w.a_k.iter().all(|&a| a > 0.0));
        assert!(w.monotone_decreasing);
        // A_k reaches the limit value at f64 resolution well before k = 200,
        // so the minimum sits on the plateau, not at a specific index.
        assert!((w.a_k[w.window_min_index] - w.window_min).abs() == 0.0);
        assert!((w.a_k[200] - w.a_limit).abs() < 1e-9);
        assert!((w.window_min - 8.0).abs() < 1e-9);
        assert!((w.inf_bound - w.window_min.min(w.a_limit)).abs() == 0.0);
    }

    #[test]
    fn limit_a_is_8_exactly_by_rationals() {
        // At n=8, p=5: alpha = 1/2, beta^2 = 8/23, I3/beta = 5/2,
        // A = 2*6*(5/2) / ((5/2)^2 - 5/2) = 30/3.75 = 8.
        let (_, a_lim) = limit_row(&reference());
        assert!((a_lim - 8.0).abs() < 1e-12);
    }

    #[test]
    fn ratio_argument_is_validated_and_continuous() {
        let p = reference();
        let al = alpha_sequence(&p, 3);
        let be = beta_sequence(&p, &al, 3).unwrap();
        assert!(iteration_coefficients_with_ratio(&p, &al, &be, 0, 0.0).is_err());
        assert!(iteration_coefficients_with_ratio(&p, &al, &be, 0, 1.1).is_err());
        let r1 = iteration_coefficients_with_ratio(&p, &al, &be, 0, 1.0).unwrap();
        let r9 = iteration_coefficients_with_ratio(&p, &al, &be, 0, 0.999).unwrap();
        assert!((r1.i3 - r9.i3).abs() < 0.05);
    }

    #[test]
    fn f32_sequences_track_f64() {
        let p32 = ProblemParams::strict(8, 5.0f32, 0.0).unwrap();
        let al = alpha_sequence(&p32, 60);
        assert!((al[60] - 0.5).abs() < 1e-5);
    }
}
