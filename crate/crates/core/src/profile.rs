//! Radial profiles: the common currency of solver, verifier, and oracle.
//!
//! A profile stores u, u', v = -lap u, v' on a strictly increasing radial
//! grid together with origin data and a classification of how it was
//! produced or where the trajectory ended.

use num_traits::{Float, FromPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::ProblemParams;

/// r^e with the 0^0 = 1 convention, so an absent weight (e = 0) is inert
/// even on grids that include the origin.
pub(crate) fn weight_pow<F: Float>(r: F, e: F) -> F {
    if e == F::zero() {
        F::one()
    } else {
        r.powf(e)
    }
}

/// How a trajectory ended, or how a profile was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    /// Closed-form analytic profile.
    Exact,
    /// Reached r_max with u > 0, v > 0, u decreasing, and a power-law tail.
    EntireLike,
    /// Reached r_max without qualifying as entire-like.
    ReachedRMax,
    /// u fell through zero.
    UCrossing,
    /// v fell through zero.
    VCrossing,
    /// u exceeded the escape bound (or the step size underflowed).
    Growth,
}

impl Classification {
    pub fn label(self) -> &'static str {
        match self {
            Classification::Exact => "exact",
            Classification::EntireLike => "entire-like",
            Classification::ReachedRMax => "reached-r-max",
            Classification::UCrossing => "u-crossing",
            Classification::VCrossing => "v-crossing",
            Classification::Growth => "growth",
        }
    }
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Origin data and provenance attached to every profile.
#[derive(Debug, Clone, Serialize)]
pub struct ProfileMeta<F> {
    pub params: ProblemParams<F>,
    pub u0: F,
    pub v0: F,
    pub rtol: F,
    pub atol: F,
    pub classification: Classification,
    pub warnings: Vec<String>,
}

/// Radial samples of (u, u', v, v') with v = -lap u.
#[derive(Debug, Clone, Serialize)]
pub struct RadialProfile<F> {
    pub r: Vec<F>,
    pub u: Vec<F>,
    pub du: Vec<F>,
    pub v: Vec<F>,
    pub dv: Vec<F>,
    pub meta: ProfileMeta<F>,
}

impl<F: Float + FromPrimitive> RadialProfile<F> {
    /// Grid sanity: matched lengths >= 2, r strictly increasing, r[0] >= 0.
    pub fn validate(&self) -> Result<()> {
        let m = self.r.len();
        if m < 2 {
            return Err(Error::Profile(format!("grid has {m} points, need at least 2")));
        }
        if [&self.u, &self.du, &self.v, &self.dv].iter().any(|c| c.len() != m) {
            return Err(Error::Profile("column lengths differ".into()));
        }
        if !(self.r[0] >= F::zero()) {
            return Err(Error::Profile("grid starts at negative radius".into()));
        }
        for i in 1..m {
            if !(self.r[i] > self.r[i - 1]) {
                return Err(Error::Profile(format!("grid not strictly increasing at index {i}")));
            }
        }
        Ok(())
    }

    pub fn is_entire_like(&self) -> bool {
        self.meta.classification == Classification::EntireLike
    }

    /// Cubic Hermite interpolation of (u, v) and their derivatives at radius x.
    /// Returns (u, du, v, dv); x must lie inside the grid.
    pub fn interpolate(&self, x: F) -> (F, F, F, F) {
        let (uu, dd) = hermite_eval(&self.r, &self.u, &self.du, x);
        let (vv, dvv) = hermite_eval(&self.r, &self.v, &self.dv, x);
        (uu, dd, vv, dvv)
    }

    /// Resample onto a uniform grid of m points over [lo, hi] by cubic
    /// Hermite interpolation, which keeps stored-derivative accuracy.
    pub fn resample_uniform(&self, lo: F, hi: F, m: usize) -> Result<ResampledProfile<F>> {
        self.validate()?;
        let first = self.r[0];
        let last = *self.r.last().unwrap();
        if lo < first || hi > last || !(lo < hi) {
            return Err(Error::Profile(format!(
                "resample window outside grid [{:?}, {:?}]",
                first.to_f64(),
                last.to_f64()
            )));
        }
        let grid = crate::fd::uniform_grid(lo, hi, m);
        let mut u = Vec::with_capacity(m);
        let mut du = Vec::with_capacity(m);
        let mut v = Vec::with_capacity(m);
        let mut dv = Vec::with_capacity(m);
        for &x in &grid {
            let (a, b, c, d) = self.interpolate(x);
            u.push(a);
            du.push(b);
            v.push(c);
            dv.push(d);
        }
        Ok(ResampledProfile { r: grid, u, du, v, dv })
    }

    /// Max interior defect |v + (u'' + (n-1)u'/r)| on a uniform resampling
    /// of m points over [lo, hi]; the defect must shrink at order ~2 in the
    /// resampling step for a consistent profile.
    pub fn fd_consistency_residual(&self, lo: F, hi: F, m: usize) -> Result<F> {
        let rs = self.resample_uniform(lo, hi, m)?;
        let n = self.meta.params.n;
        let lap = crate::fd::radial_laplacian(&rs.r, &rs.u, n);
        let mut worst = F::zero();
        for i in 1..m - 1 {
            let defect = (rs.v[i] + lap[i]).abs();
            if defect > worst {
                worst = defect;
            }
        }
        Ok(worst)
    }

    /// Log-log slope of u over the last decade of the grid.
    pub fn tail_slope(&self) -> Option<F> {
        let last = *self.r.last().unwrap();
        let ten = F::from_f64(10.0).unwrap();
        let lo = last / ten;
        let mut rs = Vec::new();
        let mut us = Vec::new();
        for (&ri, &ui) in self.r.iter().zip(&self.u) {
            if ri >= lo {
                rs.push(ri);
                us.push(ui);
            }
        }
        crate::fit::loglog_slope(&rs, &us).map(|(s, _)| s)
    }
}

/// Uniform-grid view of a profile produced by `resample_uniform`.
#[derive(Debug, Clone)]
pub struct ResampledProfile<F> {
    pub r: Vec<F>,
    pub u: Vec<F>,
    pub du: Vec<F>,
    pub v: Vec<F>,
    pub dv: Vec<F>,
}

/// Value and derivative of the piecewise cubic Hermite interpolant of
/// (xs, ys, ds) at x. xs must be strictly increasing and bracket x.
pub fn hermite_eval<F: Float + FromPrimitive>(xs: &[F], ys: &[F], ds: &[F], x: F) -> (F, F) {
    let m = xs.len();
    assert!(m >= 2 && x >= xs[0] && x <= xs[m - 1], "query outside grid");
    // Index of the interval [xs[i], xs[i+1]] containing x.
    let i = match xs.partition_point(|&xi| xi <= x) {
        0 => 0,
        j if j >= m => m - 2,
        j => j - 1,
    };
    let h = xs[i + 1] - xs[i];
    let t = (x - xs[i]) / h;
    let one = F::one();
    let two = F::from_f64(2.0).unwrap();
    let three = F::from_f64(3.0).unwrap();
    let four = F::from_f64(4.0).unwrap();
    let six = F::from_f64(6.0).unwrap();
    let t2 = t * t;
    let t3 = t2 * t;
    let h00 = two * t3 - three * t2 + one;
    let h10 = t3 - two * t2 + t;
    let h01 = -two * t3 + three * t2;
    let h11 = t3 - t2;
    let value = h00 * ys[i] + h10 * h * ds[i] + h01 * ys[i + 1] + h11 * h * ds[i + 1];
    let d00 = (six * t2 - six * t) / h;
    let d10 = three * t2 - four * t + one;
    let d01 = (-six * t2 + six * t) / h;
    let d11 = three * t2 - two * t;
    let deriv = d00 * ys[i] + d10 * ds[i] + d01 * ys[i + 1] + d11 * ds[i + 1];
    (value, deriv)
}

/// Built-in smooth radial test functions with closed-form derivatives up to
/// order three, used by the finite-difference oracles.
#[derive(Debug, Clone, Copy)]
pub enum TestFn<F> {
    /// exp(-r^2)
    Gaussian,
    /// amp * (lambda2 + r^2)^(-sigma)
    Rational { amp: F, lambda2: F, sigma: F },
}

impl<F: Float + FromPrimitive> TestFn<F> {
    pub fn u(&self, r: F) -> F {
        match *self {
            TestFn::Gaussian => (-r * r).exp(),
            TestFn::Rational { amp, lambda2, sigma } => amp * (lambda2 + r * r).powf(-sigma),
        }
    }

    pub fn du(&self, r: F) -> F {
        let two = F::from_f64(2.0).unwrap();
        match *self {
            TestFn::Gaussian => -two * r * (-r * r).exp(),
            TestFn::Rational { amp, lambda2, sigma } => {
                -two * sigma * amp * r * (lambda2 + r * r).powf(-sigma - F::one())
            }
        }
    }

    pub fn d2(&self, r: F) -> F {
        let one = F::one();
        let two = F::from_f64(2.0).unwrap();
        let four = F::from_f64(4.0).unwrap();
        match *self {
            TestFn::Gaussian => (four * r * r - two) * (-r * r).exp(),
            TestFn::Rational { amp, lambda2, sigma } => {
                let w = lambda2 + r * r;
                -two * sigma * amp * w.powf(-sigma - one)
                    + four * sigma * (sigma + one) * amp * r * r * w.powf(-sigma - two)
            }
        }
    }

    pub fn d3(&self, r: F) -> F {
        let one = F::one();
        let two = F::from_f64(2.0).unwrap();
        let eight = F::from_f64(8.0).unwrap();
        let twelve = F::from_f64(12.0).unwrap();
        match *self {
            TestFn::Gaussian => (twelve * r - eight * r * r * r) * (-r * r).exp(),
            TestFn::Rational { amp, lambda2, sigma } => {
                let w = lambda2 + r * r;
                twelve * sigma * (sigma + one) * amp * r * w.powf(-sigma - two)
                    - eight * sigma * (sigma + one) * (sigma + two) * amp * r * r * r
                        * w.powf(-sigma - two - one)
            }
        }
    }

    /// Radial Laplacian u'' + (n-1) u'/r; at r = 0 the limit n * u''(0)
    /// applies (the catalog functions are even, so u'''(0) = 0).
    pub fn laplacian(&self, r: F, n: u32) -> F {
        let nf = F::from_u32(n).unwrap();
        if r == F::zero() {
            return nf * self.d2(F::zero());
        }
        self.d2(r) + (nf - F::one()) * self.du(r) / r
    }

    /// Derivative of the radial Laplacian: u''' + (n-1)(u''/r - u'/r^2).
    pub fn laplacian_deriv(&self, r: F, n: u32) -> F {
        let nf = F::from_u32(n).unwrap();
        if r == F::zero() {
            return F::zero();
        }
        self.d3(r) + (nf - F::one()) * (self.d2(r) / r - self.du(r) / (r * r))
    }

    /// Exact analytic profile on the given grid.
    pub fn profile(&self, params: ProblemParams<F>, grid: &[F]) -> Result<RadialProfile<F>> {
        if grid.len() < 2 {
            return Err(Error::Profile("grid needs at least 2 points".into()));
        }
        let n = params.n;
        let r = grid.to_vec();
        let u: Vec<F> = r.iter().map(|&x| self.u(x)).collect();
        let du: Vec<F> = r.iter().map(|&x| self.du(x)).collect();
        let v: Vec<F> = r.iter().map(|&x| -self.laplacian(x, n)).collect();
        let dv: Vec<F> = r.iter().map(|&x| -self.laplacian_deriv(x, n)).collect();
        let u0 = self.u(F::zero());
        let v0 = -self.laplacian(F::zero(), n);
        let profile = RadialProfile {
            r,
            u,
            du,
            v,
            dv,
            meta: ProfileMeta {
                params,
                u0,
                v0,
                rtol: F::zero(),
                atol: F::zero(),
                classification: Classification::Exact,
                warnings: Vec::new(),
            },
        };
        profile.validate()?;
        Ok(profile)
    }
}
