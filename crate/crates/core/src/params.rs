//! Problem parameters for Δ²u = |x|^a u^p and the constants derived from them.

use crate::error::{Error, Result};
use num_traits::{Float, FromPrimitive};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Supercritical regime the positivity theorem covers: p > (n+4+2a)/(n-4).
    Strict,
    /// Any p > 1; downstream reports carry a non-theorem-covered marker.
    Exploratory,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ProblemParams<F> {
    pub n: u32,
    pub p: F,
    pub a: F,
    pub mode: Mode,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct DerivedConstants<F> {
    /// (p+1)/2
    pub q: F,
    /// a/2
    pub b: F,
    /// 8/(n(n-4))
    pub c_n: F,
    /// 2/(n-4)
    pub alpha_limit: F,
    /// sqrt(2/((p+1) - c_n))
    pub beta_limit: F,
    /// (n+4+2a)/(n-4)
    pub p_critical: F,
}

impl<F: Float + FromPrimitive> ProblemParams<F> {
    pub fn new(n: u32, p: F, a: F, mode: Mode) -> Result<Self> {
        if n < 5 {
            return Err(Error::Dimension(n));
        }
        if !(p > F::one()) {
            return Err(Error::Exponent(p.to_f64().unwrap_or(f64::NAN)));
        }
        if !(a >= F::zero()) {
            return Err(Error::Weight(a.to_f64().unwrap_or(f64::NAN)));
        }
        let params = ProblemParams { n, p, a, mode };
        if mode == Mode::Strict && p <= params.derived().p_critical {
            return Err(Error::Subcritical {
                p: p.to_f64().unwrap_or(f64::NAN),
                critical: params.derived().p_critical.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(params)
    }

    pub fn strict(n: u32, p: F, a: F) -> Result<Self> {
        Self::new(n, p, a, Mode::Strict)
    }

    pub fn exploratory(n: u32, p: F, a: F) -> Result<Self> {
        Self::new(n, p, a, Mode::Exploratory)
    }

    pub fn nf(&self) -> F {
        F::from_u32(self.n).unwrap()
    }

    pub fn derived(&self) -> DerivedConstants<F> {
        let one = F::one();
        let two = F::from_f64(2.0).unwrap();
        let four = F::from_f64(4.0).unwrap();
        let eight = F::from_f64(8.0).unwrap();
        let n = self.nf();
        let c_n = eight / (n * (n - four));
        DerivedConstants {
            q: (self.p + one) / two,
            b: self.a / two,
            c_n,
            alpha_limit: two / (n - four),
            beta_limit: (two / (self.p + one - c_n)).sqrt(),
            p_critical: (n + four + two * self.a) / (n - four),
        }
    }

    /// Scaling length m = (4+a)/(p-1): u0 -> lambda^m u0 maps solutions to
    /// solutions with r -> r/lambda.
    pub fn scaling_power(&self) -> F {
        let four = F::from_f64(4.0).unwrap();
        (four + self.a) / (self.p - F::one())
    }

    pub fn is_strict(&self) -> bool {
        self.mode == Mode::Strict
    }

    /// The same parameters in another scalar type. Skips revalidation:
    /// the receiver was already validated and the conversion goes through
    /// f64, which both scalar types in use represent exactly.
    pub fn lift<G: Float + FromPrimitive>(&self) -> Result<ProblemParams<G>> {
        let conv = |x: F| -> Result<G> {
            x.to_f64()
                .and_then(G::from_f64)
                .ok_or_else(|| Error::Invalid("parameter not representable in target type".into()))
        };
        Ok(ProblemParams { n: self.n, p: conv(self.p)?, a: conv(self.a)?, mode: self.mode })
    }
}
