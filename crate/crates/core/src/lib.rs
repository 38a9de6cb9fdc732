//! Numerical laboratory for the fourth-order Henon equation
//! lap^2 u = |x|^a u^p in dimension n >= 5.
//!
//! The crate computes every constructive object behind the pointwise bound
//! -lap u >= sqrt(2/((p+1) - 8/(n(n-4)))) |x|^(a/2) u^((p+1)/2)
//!           + (2/(n-4)) |grad u|^2 / u
//! at desk scale: the coefficient iteration that produces the constants,
//! radial solutions by shooting (including the explicit critical bubble and
//! averaged blow-up trajectories), pointwise margin evaluation with the
//! ladder and curvature diagnostics, and independent finite-difference and
//! quadrature oracles for the identities, the Newton potential, and the
//! integral decay rates.
//!
//! Numeric kernels are generic over the scalar type through `num_traits`
//! (f32 and f64 work throughout; the shooting refinement stage internally
//! promotes to double-double precision). The aliases at the crate root fix
//! the common f64 instantiations.

// `!(x > 0)` rejects NaN along with the out-of-range values; `x <= 0` would
// silently accept it. The guards are deliberate.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Stencil and table code indexes several parallel arrays by position;
// iterator rewrites obscure the offset arithmetic.
#![allow(clippy::needless_range_loop)]

pub mod dd;
pub mod error;
pub mod exponents;
pub mod fd;
pub mod fit;
pub mod growth;
pub mod io;
pub mod iteration;
pub mod ode;
pub mod oracle;
pub mod params;
pub mod profile;
pub mod quad;
pub mod solver;
pub mod verify;

pub use error::{Error, Result};

/// f64 instantiations of the generic types, the shapes the CLI works with.
pub type Params = params::ProblemParams<f64>;
pub type Derived = params::DerivedConstants<f64>;
pub type Iteration = iteration::IterationTable<f64>;
pub type WeightBound = iteration::WeightBoundReport<f64>;
pub type Growth = growth::GrowthTable<f64>;
pub type Exponents = exponents::ExponentTable<f64>;
pub type Profile = profile::RadialProfile<f64>;
pub type Catalog = profile::TestFn<f64>;
pub type Blowup = solver::BlowupReport<f64>;
pub type Inequality = verify::InequalityReport<f64>;
pub type Ladder = verify::LadderValues<f64>;
pub type Wtilde = verify::WtildeReport<f64>;
pub type Curvature = verify::CurvatureReport<f64>;
pub type Residual = oracle::OracleResidual<f64>;
pub type Potential = oracle::PotentialReport<f64>;
pub type Slope = oracle::SlopeReport<f64>;

pub use solver::ShootingResult;
