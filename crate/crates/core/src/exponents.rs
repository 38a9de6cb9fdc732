//! Decay exponents used by the integral estimates: the sphere-embedding
//! exponent s = 2/(n-3), the eta rates controlling the averaged functionals,
//! and the predicted growth exponents of the ball integrals.

use crate::params::ProblemParams;
use num_traits::{Float, FromPrimitive};
use serde::Serialize;
use std::collections::BTreeMap;

#[derive(Debug, Clone, Serialize)]
pub struct ExponentTable<F> {
    /// 2/(n-3)
    pub s: F,
    pub eta1: F,
    pub eta2: F,
    pub eta3: F,
    /// min(eta1, eta2, eta3)
    pub eta: F,
    /// lemma name -> predicted exponent of the ball integral in R
    pub decay_exponents: BTreeMap<String, F>,
}

pub fn exponent_table<F: Float + FromPrimitive>(params: &ProblemParams<F>) -> ExponentTable<F> {
    let one = F::one();
    let two = F::from_f64(2.0).unwrap();
    let three = F::from_f64(3.0).unwrap();
    let four = F::from_f64(4.0).unwrap();
    let (n, p, a) = (params.nf(), params.p, params.a);
    let s = two / (n - three);
    let eta1 = a * (p / (p - one) - (s + one) / two) + four * p / (p - one);
    let eta2 = (s + one) / (p + one) * (a * p + two * (p + one));
    let eta3 = two * (p + three + a) * (s + one) / (p - one);
    let mut decay = BTreeMap::new();
    decay.insert("lemma1bound".into(), n - (four * p + a) / (p - one));
    decay.insert("corollary_u".into(), n - (a + four) / (p - one));
    decay.insert("lemma1boundLap".into(), n - (two * p + two + a) / (p - one));
    decay.insert("corgrad".into(), n - (p + three + a) / (p - one));
    decay.insert("delta2".into(), n - (four * p + a) / (p - one));
    decay.insert("up_sphere".into(), n - (a + four) * p / (p - one));
    ExponentTable { s, eta1, eta2, eta3, eta: eta1.min(eta2).min(eta3), decay_exponents: decay }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_values_n8_p5() {
        let t = exponent_table(&ProblemParams::strict(8, 5.0f64, 0.0).unwrap());
        assert_eq!(t.s, 0.4);
        assert!((t.eta1 - 5.0).abs() < 1e-14);
        assert!((t.eta2 - 2.8).abs() < 1e-14);
        assert!((t.eta3 - 5.6).abs() < 1e-14);
        assert_eq!(t.eta, t.eta2);
        assert!((t.decay_exponents["lemma1bound"] - 3.0).abs() < 1e-14);
        assert!((t.decay_exponents["corollary_u"] - 7.0).abs() < 1e-14);
        assert!((t.decay_exponents["lemma1boundLap"] - 5.0).abs() < 1e-14);
        assert!((t.decay_exponents["corgrad"] - 6.0).abs() < 1e-14);
        assert!((t.decay_exponents["delta2"] - 3.0).abs() < 1e-14);
        assert!((t.decay_exponents["up_sphere"] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn s_in_unit_interval_and_etas_positive_on_strict_grid() {
        for n in 5u32..=12 {
            let crit = (n as f64 + 4.0) / (n as f64 - 4.0);
            for dp in [0.5, 1.5, 3.0] {
                let params = ProblemParams::strict(n, crit + dp, 0.0).unwrap();
                let t = exponent_table(&params);
                assert!(t.s > 0.0 && t.s <= 1.0);
                assert!(t.eta1 > 0.0 && t.eta2 > 0.0 && t.eta3 > 0.0);
                // side condition p/(p-1) > (s+1)/2 stays strict
                let p = params.p;
                assert!(p / (p - 1.0) - (t.s + 1.0) / 2.0 > 0.0);
            }
        }
    }
}
