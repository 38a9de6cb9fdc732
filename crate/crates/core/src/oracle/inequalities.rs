//! Elementary inequalities used pointwise in the proofs: the trace bound
//! n ||A||^2 >= (trace A)^2 and the ordered-square bound
//! (t-s)^2 >= t*^2 - 2 t* s + s^2, plus seeded randomized trial drivers.

use num_traits::{Float, FromPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};

/// Margin n ||A||_F^2 - (trace A)^2 of a square matrix; nonnegative by
/// Cauchy-Schwarz against the identity.
pub fn check_trace_inequality<F: Float + FromPrimitive>(rows: &[Vec<F>]) -> Result<F> {
    let n = rows.len();
    if n == 0 {
        return Err(Error::NonSquare { rows: 0, cols: 0 });
    }
    for row in rows {
        if row.len() != n {
            return Err(Error::NonSquare { rows: n, cols: row.len() });
        }
    }
    let mut norm2 = F::zero();
    let mut trace = F::zero();
    for (i, row) in rows.iter().enumerate() {
        for (j, &a) in row.iter().enumerate() {
            if !a.is_finite() {
                return Err(Error::Invalid(format!("matrix entry ({i}, {j}) is not finite")));
            }
            norm2 = norm2 + a * a;
            if i == j {
                trace = trace + a;
            }
        }
    }
    Ok(F::from_usize(n).unwrap() * norm2 - trace * trace)
}

/// Margin (t-s)^2 - (t*^2 - 2 t* s + s^2) under the hypothesis
/// t <= t* <= 0 <= s; each violated condition is named in the error.
pub fn check_square_inequality<F: Float + FromPrimitive>(t: F, t_star: F, s: F) -> Result<F> {
    if !(t <= t_star) {
        return Err(Error::Hypothesis(format!(
            "square inequality requires t <= t_star, got t = {:?} > t_star = {:?}",
            t.to_f64(),
            t_star.to_f64()
        )));
    }
    if !(t_star <= F::zero()) {
        return Err(Error::Hypothesis(format!(
            "square inequality requires t_star <= 0, got t_star = {:?}",
            t_star.to_f64()
        )));
    }
    if !(s >= F::zero()) {
        return Err(Error::Hypothesis(format!(
            "square inequality requires s >= 0, got s = {:?}",
            s.to_f64()
        )));
    }
    let two = F::from_f64(2.0).unwrap();
    Ok((t - s) * (t - s) - (t_star * t_star - two * t_star * s + s * s))
}

/// Outcome of a randomized margin sweep.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TrialStats {
    pub trials: usize,
    pub min_margin: f64,
    /// Smallest margin divided by its per-trial scale; passes at >= -1e-12.
    pub min_relative_margin: f64,
    /// Count of trials with relative margin below -1e-12.
    pub failures: usize,
}

impl TrialStats {
    pub fn pass(&self) -> bool {
        self.failures == 0
    }
}

/// Random dim x dim matrices with entries uniform in [-1, 1]; margins
/// scaled by 1 + ||A||_F^4.
pub fn random_trace_trials(dim: usize, trials: usize, seed: u64) -> TrialStats {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stats = TrialStats {
        trials,
        min_margin: f64::INFINITY,
        min_relative_margin: f64::INFINITY,
        failures: 0,
    };
    for _ in 0..trials {
        let a: Vec<Vec<f64>> = (0..dim)
            .map(|_| (0..dim).map(|_| rng.gen_range(-1.0..=1.0)).collect())
            .collect();
        let margin = check_trace_inequality(&a).expect("generated matrix is square");
        let norm2: f64 = a.iter().flatten().map(|x| x * x).sum();
        let rel = margin / (1.0 + norm2 * norm2);
        stats.min_margin = stats.min_margin.min(margin);
        stats.min_relative_margin = stats.min_relative_margin.min(rel);
        if rel < -1e-12 {
            stats.failures += 1;
        }
    }
    stats
}

/// Random admissible triples t <= t* <= 0 <= s with components of size
/// up to 3; margins scaled by 1 + (t-s)^2 + (t*-s)^2.
pub fn random_square_trials(trials: usize, seed: u64) -> TrialStats {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stats = TrialStats {
        trials,
        min_margin: f64::INFINITY,
        min_relative_margin: f64::INFINITY,
        failures: 0,
    };
    for _ in 0..trials {
        let t_star = -rng.gen_range(0.0..=3.0);
        let t = t_star - rng.gen_range(0.0..=3.0);
        let s = rng.gen_range(0.0..=3.0);
        let margin = check_square_inequality(t, t_star, s).expect("triple is admissible");
        let scale = 1.0 + (t - s) * (t - s) + (t_star - s) * (t_star - s);
        let rel = margin / scale;
        stats.min_margin = stats.min_margin.min(margin);
        stats.min_relative_margin = stats.min_relative_margin.min(rel);
        if rel < -1e-12 {
            stats.failures += 1;
        }
    }
    stats
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_matrix_is_the_equality_case() {
        let a = vec![
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
        ];
        assert_eq!(check_trace_inequality(&a).unwrap(), 0.0);
        // Scalar multiples of the identity stay at equality.
        let c = vec![vec![-2.5, 0.0], vec![0.0, -2.5]];
        assert!(check_trace_inequality(&c).unwrap().abs() < 1e-12);
    }

    #[test]
    fn zero_trace_diagonal_has_margin_four() {
        let a = vec![vec![1.0, 0.0], vec![0.0, -1.0]];
        assert_eq!(check_trace_inequality(&a).unwrap(), 4.0);
    }

    #[test]
    fn non_square_and_non_finite_are_rejected() {
        let ragged = vec![vec![1.0, 2.0], vec![3.0]];
        assert!(matches!(
            check_trace_inequality(&ragged),
            Err(Error::NonSquare { rows: 2, cols: 1 })
        ));
        assert!(check_trace_inequality::<f64>(&[]).is_err());
        let inf = vec![vec![f64::INFINITY]];
        assert!(check_trace_inequality(&inf).is_err());
    }

    #[test]
    fn square_inequality_reference_values() {
        assert_eq!(check_square_inequality(-3.0, -1.0, 2.0).unwrap(), 16.0);
        assert_eq!(check_square_inequality(-1.0, -1.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn each_violated_hypothesis_is_named() {
        let e1 = check_square_inequality(-1.0, -2.0, 1.0).unwrap_err();
        assert!(e1.to_string().contains("t <= t_star"));
        let e2 = check_square_inequality(-1.0, 0.5, 1.0).unwrap_err();
        assert!(e2.to_string().contains("t_star <= 0"));
        let e3 = check_square_inequality(-2.0, -1.0, -0.1).unwrap_err();
        assert!(e3.to_string().contains("s >= 0"));
    }

    #[test]
    fn ten_thousand_seeded_trials_never_dip_below_tolerance() {
        let tr = random_trace_trials(5, 10_000, 0xfeed);
        assert!(tr.pass(), "trace failures: {}", tr.failures);
        assert!(tr.min_margin >= -1e-12);
        let sq = random_square_trials(10_000, 0xbeef);
        assert!(sq.pass(), "square failures: {}", sq.failures);
        assert!(sq.min_margin >= 0.0);
    }

    #[test]
    fn trials_are_reproducible_for_a_fixed_seed() {
        let a = random_trace_trials(4, 500, 12);
        let b = random_trace_trials(4, 500, 12);
        assert_eq!(a.min_margin, b.min_margin);
        assert_eq!(a.min_relative_margin, b.min_relative_margin);
    }
}
