//! Finite-difference verification of the two Laplacian expansion identities
//! used in the ladder step and of the auxiliary second-order equation that
//! holds on solutions of the unweighted problem.

use num_traits::{Float, FromPrimitive};

use super::OracleResidual;
use crate::error::{Error, Result};
use crate::fd::{radial_laplacian, uniform_grid};
use crate::params::ProblemParams;
use crate::profile::{weight_pow, RadialProfile, TestFn};

fn validate_grids(grids: &[usize]) -> Result<()> {
    if grids.len() < 2 {
        return Err(Error::Invalid("refinement list needs at least two grids".into()));
    }
    for w in grids.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::Invalid("refinement list must be strictly increasing".into()));
        }
    }
    if grids[0] < 16 {
        return Err(Error::Invalid("coarsest refinement grid must have at least 16 nodes".into()));
    }
    Ok(())
}

/// Residuals of the two expansions at explicit exponents (b, q) over the
/// window [lo, hi]. The Laplacian of u inside the first expansion is the
/// same FD operator as the left side, so the degenerate case b = 0, q = 1
/// cancels to the rounding floor.
///
/// The residual maximum is taken over the window inset by a tenth of the
/// span on each side. The truncation coefficient has a steep gradient at
/// the window edge, and the nearest node to the edge moves with h, so the
/// full-window maximum samples a growing coefficient under refinement and
/// understates the order until h is far smaller than any of the catalog
/// grids reach.
pub fn expansion_residuals<F: Float + FromPrimitive>(
    test_fn: &TestFn<F>,
    n: u32,
    b: F,
    q: F,
    epsilon: F,
    window: (F, F),
    grids: &[usize],
) -> Result<Vec<OracleResidual<F>>> {
    if !(epsilon > F::zero()) {
        return Err(Error::Invalid("expansion check requires epsilon > 0".into()));
    }
    if !(window.0 > F::zero() && window.1 > window.0) {
        return Err(Error::Invalid("evaluation window must satisfy 0 < lo < hi".into()));
    }
    validate_grids(grids)?;
    let nf = F::from_u32(n).unwrap();
    let one = F::one();
    let two = F::from_f64(2.0).unwrap();
    let four = F::from_f64(4.0).unwrap();

    let mut hs = Vec::with_capacity(grids.len());
    let mut res_j = Vec::with_capacity(grids.len());
    let mut res_i = Vec::with_capacity(grids.len());
    let mut scale_j = F::one();
    let mut scale_i = F::one();
    for &m in grids {
        let rs = uniform_grid(window.0, window.1, m);
        let h = rs[1] - rs[0];
        let u: Vec<F> = rs.iter().map(|&r| test_fn.u(r)).collect();
        if u.iter().any(|&x| !(x > F::zero())) {
            return Err(Error::Invalid(
                "test function vanishes on the grid; u^(q-2) terms are singular".into(),
            ));
        }
        let inset = (m - 1).div_ceil(10);
        let (i_lo, i_hi) = (inset, m - 1 - inset);

        // Expansion of lap(r^b u^q).
        let fj: Vec<F> = rs.iter().zip(&u).map(|(&r, &ui)| weight_pow(r, b) * ui.powf(q)).collect();
        let lhs_j = radial_laplacian(&rs, &fj, n);
        let lap_u_fd = radial_laplacian(&rs, &u, n);
        let mut worst_j = F::zero();
        for i in i_lo..=i_hi {
            let (r, ui) = (rs[i], u[i]);
            let du = test_fn.du(r);
            let rhs = b * (nf + b - two) * r.powf(b - two) * ui.powf(q)
                + q * (q - one) * weight_pow(r, b) * ui.powf(q - two) * du * du
                + q * weight_pow(r, b) * ui.powf(q - one) * lap_u_fd[i]
                + two * b * q * r.powf(b - one) * ui.powf(q - one) * du;
            worst_j = worst_j.max((lhs_j[i] - rhs).abs());
            scale_j = scale_j.max(lhs_j[i].abs());
        }

        // Expansion of lap(u'^2 / (u + eps)).
        let g: Vec<F> = rs
            .iter()
            .zip(&u)
            .map(|(&r, &ui)| {
                let du = test_fn.du(r);
                du * du / (ui + epsilon)
            })
            .collect();
        let lhs_i = radial_laplacian(&rs, &g, n);
        let mut worst_i = F::zero();
        for i in i_lo..=i_hi {
            let (r, ui) = (rs[i], u[i]);
            let du = test_fn.du(r);
            let d2 = test_fn.d2(r);
            let lap = test_fn.laplacian(r, n);
            let lapd = test_fn.laplacian_deriv(r, n);
            let phi = one / (ui + epsilon);
            let rhs = two * phi * (d2 * d2 + (nf - one) * (du / r) * (du / r))
                + two * phi * du * lapd
                - phi * phi * du * du * lap
                + two * phi * phi * phi * du * du * du * du
                - four * phi * phi * du * du * d2;
            worst_i = worst_i.max((lhs_i[i] - rhs).abs());
            scale_i = scale_i.max(lhs_i[i].abs());
        }

        hs.push(h);
        res_j.push(worst_j);
        res_i.push(worst_i);
    }

    Ok(vec![
        OracleResidual::from_history("weighted_power_laplacian", hs.clone(), res_j, scale_j),
        OracleResidual::from_history("gradient_square_laplacian", hs, res_i, scale_i),
    ])
}

/// The two ladder expansions at the exponents b = a/2, q = (p+1)/2 drawn
/// from the parameters, on the catalog window r in [0.2, 3].
pub fn check_expansion_identities<F: Float + FromPrimitive>(
    test_fn: &TestFn<F>,
    params: &ProblemParams<F>,
    epsilon: F,
    grids: &[usize],
) -> Result<Vec<OracleResidual<F>>> {
    let d = params.derived();
    let window = (F::from_f64(0.2).unwrap(), F::from_f64(3.0).unwrap());
    expansion_residuals(test_fn, params.n, d.b, d.q, epsilon, window, grids)
}

/// Residual of the auxiliary equation
/// sqrt(2/(p+1)) u^((1-p)/2) lap w
///   = lap u + sqrt(2/(p+1)) u^((p+1)/2) + ((p-1)/2) u'^2/u,
/// with w = lap u + sqrt(2/(p+1)) u^((p+1)/2), which holds when
/// lap^2 u = u^p. Stated for the unweighted equation only.
pub fn check_auxiliary_equation<F: Float + FromPrimitive>(
    profile: &RadialProfile<F>,
) -> Result<OracleResidual<F>> {
    profile.validate()?;
    let params = &profile.meta.params;
    if params.a != F::zero() {
        return Err(Error::Hypothesis(
            "auxiliary equation is stated for the unweighted problem; got a != 0".into(),
        ));
    }
    if profile.u.iter().any(|&x| !(x > F::zero())) {
        return Err(Error::Profile(
            "auxiliary equation check requires u > 0 on the whole grid".into(),
        ));
    }
    let one = F::one();
    let two = F::from_f64(2.0).unwrap();
    let p = params.p;
    let q = (p + one) / two;
    let c = (two / (p + one)).sqrt();

    let lo = if profile.r[0] > F::zero() { profile.r[0] } else { profile.r[1] };
    let hi = *profile.r.last().unwrap();
    let mut hs = Vec::new();
    let mut res = Vec::new();
    let mut scale = F::one();
    for m in [128usize, 256, 512, 1024] {
        let rs = profile.resample_uniform(lo, hi, m)?;
        let w: Vec<F> = (0..m).map(|i| -rs.v[i] + c * rs.u[i].powf(q)).collect();
        let lap_w = radial_laplacian(&rs.r, &w, params.n);
        let mut worst = F::zero();
        for i in 0..m {
            let u = rs.u[i];
            let lhs = c * u.powf((one - p) / two) * lap_w[i];
            let rhs = -rs.v[i] + c * u.powf(q) + (p - one) / two * rs.du[i] * rs.du[i] / u;
            worst = worst.max((lhs - rhs).abs());
            scale = scale.max(rhs.abs());
        }
        hs.push(rs.r[1] - rs.r[0]);
        res.push(worst);
    }
    Ok(OracleResidual::from_history("auxiliary_function_equation", hs, res, scale))
}
