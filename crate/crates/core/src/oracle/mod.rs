//! Independent checks of the algebraic identities, elementary inequalities,
//! potential representation, and decay rates that the estimates rest on.
//! Everything here is computed by finite differences and quadrature only,
//! so a failure localizes to a formula rather than to solver internals.

use num_traits::{Float, FromPrimitive};
use serde::Serialize;

mod decay;
mod identities;
mod inequalities;
mod potential;

pub use decay::{decay_slope_check, DecayQuantity, SlopeReport};
pub use identities::{check_auxiliary_equation, check_expansion_identities};
pub use inequalities::{
    check_square_inequality, check_trace_inequality, random_square_trials, random_trace_trials,
    TrialStats,
};
pub use potential::{
    newton_potential_check, radial_newton_potential, unit_ball_volume, NewtonPotential,
    PotentialReport,
};

/// Residual history of one finite-difference identity check over a grid
/// refinement ladder.
#[derive(Debug, Clone, Serialize)]
pub struct OracleResidual<F> {
    pub name: String,
    pub grid_h: Vec<F>,
    /// Max-norm residual per step size, parallel to grid_h.
    pub residual: Vec<F>,
    /// Fitted convergence order (0 when the residual sits at rounding floor).
    pub order: F,
    pub verdict: bool,
}

impl<F: Float + FromPrimitive> OracleResidual<F> {
    /// Verdict rule: pass at rounding floor, or at fitted order >= 1.9 with
    /// the finest residual small relative to the quantity's magnitude.
    pub(crate) fn from_history(name: &str, grid_h: Vec<F>, residual: Vec<F>, scale: F) -> Self {
        let unit_scale = scale.abs().max(F::one());
        let floor = F::from_f64(1e-12).unwrap() * unit_scale;
        let cap = F::from_f64(1e-2).unwrap() * unit_scale;
        let min_res = residual.iter().cloned().fold(F::infinity(), F::min);
        let order = match crate::fit::loglog_slope(&grid_h, &residual) {
            Some((slope, _)) => slope,
            None => F::zero(),
        };
        let verdict =
            min_res <= floor || (order >= F::from_f64(1.9).unwrap() && min_res <= cap);
        OracleResidual { name: name.into(), grid_h, residual, order, verdict }
    }
}
