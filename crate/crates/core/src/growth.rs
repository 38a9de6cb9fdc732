//! Bookkeeping sequences for the blow-up dichotomy: the radial power t_k,
//! the base exponent s_k, the accumulated-constant bound B^{4k+4}, and the
//! radius ratios whose infinite product converges.

use crate::error::{Error, Result};
use crate::params::ProblemParams;
use num_traits::{Float, FromPrimitive};
use serde::Serialize;

/// Linear value alongside its log; the linear copy is dropped past 1e300.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Scaled<F> {
    pub value: Option<F>,
    pub ln: F,
}

impl<F: Float + FromPrimitive> Scaled<F> {
    fn from_linear(x: F) -> Self {
        let cap = F::from_f64(1e300).unwrap();
        Scaled { value: if x <= cap { Some(x) } else { None }, ln: x.ln() }
    }
    fn from_ln(ln: F) -> Self {
        let cap = F::from_f64(1e300).unwrap().ln();
        Scaled { value: if ln <= cap { Some(ln.exp()) } else { None }, ln }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct GrowthRow<F> {
    pub k: usize,
    pub t_k: Scaled<F>,
    pub s_k: Scaled<F>,
    /// B^{4k+4}
    pub mk_bound: Scaled<F>,
    /// 2^{4/(p t_k + a + 1)}
    pub r_ratio: Scaled<F>,
    /// prod_{i<=k} r_ratio_i
    pub r_ratio_partial_product: F,
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthTable<F> {
    pub rows: Vec<GrowthRow<F>>,
    /// growth base B = 2p + a + n + 4
    pub base: F,
    /// -v(0)/(2n), present when a blow-up seed is attached
    pub alpha_bar: Option<F>,
    p: F,
}

pub fn growth_sequences<F: Float + FromPrimitive>(
    params: &ProblemParams<F>,
    k_max: usize,
) -> GrowthTable<F> {
    let two = F::from_f64(2.0).unwrap();
    let four = F::from_f64(4.0).unwrap();
    let one = F::one();
    let (p, a, n) = (params.p, params.a, params.nf());
    let base = two * p + a + n + four;
    let ln_cap = F::from_f64(1e300).unwrap().ln();
    let ln_p = p.ln();
    let ln_base = base.ln();

    let mut rows: Vec<GrowthRow<F>> = Vec::with_capacity(k_max + 1);
    let mut t = Scaled::from_linear(two);
    let mut s = Scaled::from_linear(F::zero());
    let mut ratio_exp_sum = F::zero();
    for k in 0..=k_max {
        // M_k = B^{4k+4}
        let ln_mk = F::from_usize(4 * k + 4).unwrap() * ln_base;
        // р_ratio exponent 4/(p t_k + a + 1), computed from whichever copy of t survives
        let pt = match t.value {
            Some(tv) => p * tv + a + one,
            None => (ln_p + t.ln).exp(), // a+1 is lost below 1e-280 relative anyway
        };
        let ratio_e = four / pt;
        ratio_exp_sum = ratio_exp_sum + ratio_e;
        rows.push(GrowthRow {
            k,
            t_k: t,
            s_k: s,
            mk_bound: Scaled::from_ln(ln_mk),
            r_ratio: Scaled::from_linear(two.powf(ratio_e)),
            r_ratio_partial_product: two.powf(ratio_exp_sum),
        });
        // advance the recursions: t_{k+1} = p t_k + a + 4, s_{k+1} = p s_k + 4k + 4
        let step = F::from_usize(4 * k + 4).unwrap();
        t = match t.value {
            Some(tv) if (p * tv + a + four).ln() < ln_cap => Scaled::from_linear(p * tv + a + four),
            _ => Scaled::from_ln(ln_p + t.ln + ((a + four) / (ln_p + t.ln).exp()).ln_1p()),
        };
        s = match s.value {
            Some(sv) if (p * sv + step).ln() < ln_cap => Scaled::from_linear(p * sv + step),
            _ => Scaled::from_ln(ln_p + s.ln + (step / (ln_p + s.ln).exp()).ln_1p()),
        };
    }
    GrowthTable { rows, base, alpha_bar: None, p }
}

pub fn growth_sequences_with_seed<F: Float + FromPrimitive>(
    params: &ProblemParams<F>,
    k_max: usize,
    v0_bar: F,
) -> Result<GrowthTable<F>> {
    if !(v0_bar < F::zero()) {
        return Err(Error::InitialValue(format!(
            "blow-up seed needs v(0) < 0, got {}",
            v0_bar.to_f64().unwrap_or(f64::NAN)
        )));
    }
    let two = F::from_f64(2.0).unwrap();
    let mut table = growth_sequences(params, k_max);
    table.alpha_bar = Some(-v0_bar / (two * params.nf()));
    Ok(table)
}

/// Closed forms, for cross-checking the recursions:
/// t_k = (2p^{k+1} + (a+2)p^k - (a+4))/(p-1),
/// s_k = (4p^{k+1} - 4p(k+1) + 4k)/(p-1)^2.
pub fn closed_form_t<F: Float + FromPrimitive>(params: &ProblemParams<F>, k: usize) -> F {
    let two = F::from_f64(2.0).unwrap();
    let four = F::from_f64(4.0).unwrap();
    let (p, a) = (params.p, params.a);
    let pk = p.powi(k as i32);
    (two * p * pk + (a + two) * pk - (a + four)) / (p - F::one())
}

pub fn closed_form_s<F: Float + FromPrimitive>(params: &ProblemParams<F>, k: usize) -> F {
    let four = F::from_f64(4.0).unwrap();
    let p = params.p;
    let kf = F::from_usize(k).unwrap();
    let pm1 = p - F::one();
    (four * p.powi(k as i32 + 1) - four * p * (kf + F::one()) + four * kf) / (pm1 * pm1)
}

impl<F: Float + FromPrimitive> GrowthTable<F> {
    /// ln of the k-th envelope alpha_bar^{p^k} B^{-s_k} r^{t_k} at radius
    /// r > 0. None without a seed or once a row ingredient left linear range.
    pub fn ln_envelope(&self, k: usize, r: F) -> Option<F> {
        let alpha = self.alpha_bar?;
        let row = self.rows.get(k)?;
        let t_k = row.t_k.value?;
        let s_k = row.s_k.value?;
        let p_k = self.p.powi(k as i32);
        if !p_k.is_finite() {
            return None;
        }
        Some(p_k * alpha.ln() - s_k * self.base.ln() + t_k * r.ln())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(p: f64, a: f64) -> ProblemParams<f64> {
        ProblemParams::exploratory(8, p, a).unwrap()
    }

    #[test]
    fn starts_at_t2_s0() {
        let g = growth_sequences(&params(2.0, 0.0), 5);
        assert_eq!(g.rows[0].t_k.value, Some(2.0));
        assert_eq!(g.rows[0].s_k.value, Some(0.0));
    }

    #[test]
    fn matches_worked_examples() {
        let g = growth_sequences(&params(2.0, 0.0), 3);
        assert_eq!(g.rows[1].t_k.value, Some(8.0)); // 2*2+4, = (2*8+2*4-4)/1
        assert_eq!(g.rows[2].s_k.value, Some(16.0)); // 2*4+8, = (4*8-24+8)/1
        assert_eq!(closed_form_t(&params(2.0, 0.0), 1), 8.0);
        assert_eq!(closed_form_s(&params(2.0, 0.0), 2), 16.0);
    }

    #[test]
    fn recursion_agrees_with_closed_form_to_k30() {
        for p in [1.5, 2.0, 3.0] {
            for a in [0.0, 1.0] {
                let pr = params(p, a);
                let g = growth_sequences(&pr, 30);
                for k in 0..=30 {
                    let t = g.rows[k].t_k.value.unwrap();
                    let s = g.rows[k].s_k.value.unwrap();
                    let tc = closed_form_t(&pr, k);
                    let sc = closed_form_s(&pr, k);
                    assert!((t - tc).abs() <= 1e-12 * tc.abs(), "t_k p={p} a={a} k={k}");
                    assert!((s - sc).abs() <= 1e-12 * (1.0 + sc.abs()), "s_k p={p} a={a} k={k}");
                }
            }
        }
    }

    #[test]
    fn growth_base_and_mk() {
        let g = growth_sequences(&params(5.0, 0.0), 2);
        assert_eq!(g.base, 2.0 * 5.0 + 0.0 + 8.0 + 4.0);
        let b: f64 = 22.0;
        assert!((g.rows[1].mk_bound.value.unwrap() - b.powi(8)).abs() < 1e-3);
    }

    #[test]
    fn switches_to_log_space_past_1e300() {
        let g = growth_sequences(&params(5.0, 0.0), 500);
        let overflowed: Vec<_> = g.rows.iter().filter(|r| r.t_k.value.is_none()).collect();
        assert!(!overflowed.is_empty(), "t_k must pass 1e300 by k = 500 at p = 5");
        for r in &overflowed {
            assert!(r.t_k.ln.is_finite());
        }
        // log-space recursion stays consistent with the closed form in log space:
        // ln t_k ~ (k+1) ln p + ln((2 + (a+2)/p)/(p-1)) for large k
        let last = g.rows.last().unwrap();
        let lnp = 5.0f64.ln();
        let predicted = 501.0 * lnp + (2.0f64 + 2.0 / 5.0).ln() - 4.0f64.ln();
        assert!((last.t_k.ln - predicted).abs() < 1e-9 * predicted.abs());
    }

    #[test]
    fn ratio_partial_products_are_cauchy() {
        let g = growth_sequences(&params(5.0, 0.0), 60);
        let prods: Vec<f64> = g.rows.iter().map(|r| r.r_ratio_partial_product).collect();
        // tail differences collapse geometrically
        for k in 40..59 {
            assert!((prods[k + 1] - prods[k]).abs() < 1e-12);
        }
        assert!(prods[60] > 1.0 && prods[60] < 2.0);
    }

    #[test]
    fn seed_sets_alpha_bar() {
        let pr = ProblemParams::strict(8, 5.0, 0.0).unwrap();
        let g = growth_sequences_with_seed(&pr, 3, -1.0).unwrap();
        assert_eq!(g.alpha_bar, Some(1.0 / 16.0));
        assert!(growth_sequences_with_seed(&pr, 3, 0.5).is_err());
    }
}
