//! Adaptive embedded Runge-Kutta integration (Dormand-Prince 5(4)).
//!
//! Generic over the scalar so trajectories can be integrated in f64 or in
//! double-double precision with the same code path. Events are detected by
//! sign change at step ends and localized by bisection on the cubic Hermite
//! dense output; an event already satisfied at the start fires immediately.

use num_traits::{Float, FromPrimitive};

/// Tableau entries as exact integer ratios so every scalar type gets
/// correctly rounded coefficients.
const A: [[(i64, i64); 6]; 6] = [
    [(1, 5), (0, 1), (0, 1), (0, 1), (0, 1), (0, 1)],
    [(3, 40), (9, 40), (0, 1), (0, 1), (0, 1), (0, 1)],
    [(44, 45), (-56, 15), (32, 9), (0, 1), (0, 1), (0, 1)],
    [(19372, 6561), (-25360, 2187), (64448, 6561), (-212, 729), (0, 1), (0, 1)],
    [(9017, 3168), (-355, 33), (46732, 5247), (49, 176), (-5103, 18656), (0, 1)],
    [(35, 384), (0, 1), (500, 1113), (125, 192), (-2187, 6784), (11, 84)],
];
const C: [(i64, i64); 6] = [(1, 5), (3, 10), (4, 5), (8, 9), (1, 1), (1, 1)];
/// Fifth-order minus fourth-order weights (error estimator).
const E: [(i64, i64); 7] = [
    (71, 57600),
    (0, 1),
    (-71, 16695),
    (71, 1920),
    (-17253, 339200),
    (22, 525),
    (-1, 40),
];

fn ratio<F: Float + FromPrimitive>(r: (i64, i64)) -> F {
    F::from_i64(r.0).unwrap() / F::from_i64(r.1).unwrap()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Fires when the component falls to or below the threshold.
    Falling,
    /// Fires when the component rises to or above the threshold.
    Rising,
}

#[derive(Debug, Clone, Copy)]
pub struct EventSpec<F> {
    pub component: usize,
    pub threshold: F,
    pub direction: Direction,
    pub label: &'static str,
}

impl<F: Float> EventSpec<F> {
    fn triggered(&self, y: &[F]) -> bool {
        match self.direction {
            Direction::Falling => y[self.component] <= self.threshold,
            Direction::Rising => y[self.component] >= self.threshold,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OdeStatus {
    /// Reached x_end.
    Done,
    /// An event fired; the last recorded point is the localized crossing.
    Event { label: &'static str },
    /// Step budget exhausted before x_end.
    MaxSteps,
    /// Step size collapsed below resolvable spacing.
    StepUnderflow,
}

#[derive(Debug, Clone)]
pub struct OdeSolution<F, const N: usize> {
    pub xs: Vec<F>,
    pub ys: Vec<[F; N]>,
    pub status: OdeStatus,
    pub accepted: usize,
    pub rejected: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions<F> {
    pub rtol: F,
    pub atol: F,
    pub h_init: F,
    pub max_steps: usize,
}

struct Tableau<F> {
    a: [[F; 6]; 6],
    c: [F; 6],
    e: [F; 7],
}

impl<F: Float + FromPrimitive> Tableau<F> {
    fn new() -> Self {
        let mut a = [[F::zero(); 6]; 6];
        let mut c = [F::zero(); 6];
        let mut e = [F::zero(); 7];
        for i in 0..6 {
            c[i] = ratio(C[i]);
            for j in 0..6 {
                a[i][j] = ratio(A[i][j]);
            }
        }
        for i in 0..7 {
            e[i] = ratio(E[i]);
        }
        Tableau { a, c, e }
    }
}

/// Cubic Hermite value of component `comp` inside a step.
fn hermite_component<F: Float + FromPrimitive, const N: usize>(
    h: F,
    y0: &[F; N],
    f0: &[F; N],
    y1: &[F; N],
    f1: &[F; N],
    t: F,
    comp: usize,
) -> F {
    let one = F::one();
    let two = F::from_f64(2.0).unwrap();
    let three = F::from_f64(3.0).unwrap();
    let t2 = t * t;
    let t3 = t2 * t;
    (two * t3 - three * t2 + one) * y0[comp]
        + (t3 - two * t2 + t) * h * f0[comp]
        + (-two * t3 + three * t2) * y1[comp]
        + (t3 - t2) * h * f1[comp]
}

/// Full Hermite state inside a step.
fn hermite_state<F: Float + FromPrimitive, const N: usize>(
    h: F,
    y0: &[F; N],
    f0: &[F; N],
    y1: &[F; N],
    f1: &[F; N],
    t: F,
) -> [F; N] {
    let mut out = [F::zero(); N];
    for c in 0..N {
        out[c] = hermite_component(h, y0, f0, y1, f1, t, c);
    }
    out
}

/// Integrate y' = f(x, y) from x0 to x_end, recording every accepted step.
/// `samples` lists extra abscissae that must be hit exactly (sorted,
/// strictly increasing, inside (x0, x_end]); pass &[] for none.
pub fn integrate<F, const N: usize>(
    f: impl Fn(F, &[F; N]) -> [F; N],
    x0: F,
    y0: [F; N],
    x_end: F,
    events: &[EventSpec<F>],
    samples: &[F],
    opts: &OdeOptions<F>,
) -> OdeSolution<F, N>
where
    F: Float + FromPrimitive,
{
    let tb = Tableau::<F>::new();
    let mut xs = vec![x0];
    let mut ys = vec![y0];
    let mut accepted = 0usize;
    let mut rejected = 0usize;

    // Immediate fire: an event condition already met at the start.
    for ev in events {
        if ev.triggered(&y0) {
            return OdeSolution {
                xs,
                ys,
                status: OdeStatus::Event { label: ev.label },
                accepted,
                rejected,
            };
        }
    }

    let one = F::one();
    let half = F::from_f64(0.5).unwrap();
    let safety = F::from_f64(0.9).unwrap();
    let shrink = F::from_f64(0.2).unwrap();
    let grow = F::from_f64(5.0).unwrap();
    let order_inv = F::from_f64(-0.2).unwrap();

    let mut x = x0;
    let mut y = y0;
    let mut h = opts.h_init;
    let mut k1 = f(x, &y);
    let mut sample_idx = samples.partition_point(|&s| s <= x0);

    for _ in 0..opts.max_steps {
        if x >= x_end {
            return OdeSolution { xs, ys, status: OdeStatus::Done, accepted, rejected };
        }
        // Clamp to the next mandatory abscissa, then to the right endpoint.
        let mut target = x_end;
        if sample_idx < samples.len() && samples[sample_idx] < target {
            target = samples[sample_idx];
        }
        if x + h > target {
            h = target - x;
        }
        if !(x + h > x) {
            return OdeSolution { xs, ys, status: OdeStatus::StepUnderflow, accepted, rejected };
        }

        // Stage sweep.
        let mut k = [[F::zero(); N]; 7];
        k[0] = k1;
        for s in 0..6 {
            let mut yi = y;
            for j in 0..=s {
                let aij = tb.a[s][j];
                if aij != F::zero() {
                    for c in 0..N {
                        yi[c] = yi[c] + h * aij * k[j][c];
                    }
                }
            }
            k[s + 1] = f(x + tb.c[s] * h, &yi);
        }
        // Fifth-order solution is the last stage's argument (FSAL).
        let mut y_new = y;
        for j in 0..6 {
            let aij = tb.a[5][j];
            if aij != F::zero() {
                for c in 0..N {
                    y_new[c] = y_new[c] + h * aij * k[j][c];
                }
            }
        }
        // WRMS error estimate.
        let mut err_sq = F::zero();
        for c in 0..N {
            let mut e = F::zero();
            for j in 0..7 {
                if tb.e[j] != F::zero() {
                    e = e + tb.e[j] * k[j][c];
                }
            }
            e = e * h;
            let scale = opts.atol + opts.rtol * y[c].abs().max(y_new[c].abs());
            let q = e / scale;
            err_sq = err_sq + q * q;
        }
        let err = (err_sq / F::from_usize(N).unwrap()).sqrt();

        if !err.is_finite() {
            rejected += 1;
            h = h * shrink;
            continue;
        }
        if err > one {
            rejected += 1;
            let factor = (safety * err.powf(order_inv)).max(shrink);
            h = h * factor;
            continue;
        }

        // Accepted.
        accepted += 1;
        let f_new = k[6];
        let h_used = h;
        let x_new = x + h_used;

        // Event scan on this step.
        let mut hit: Option<(&'static str, F)> = None;
        for ev in events {
            if !ev.triggered(&y_new) {
                continue;
            }
            // Bisect the Hermite interpolant for the earliest crossing.
            let mut lo = F::zero();
            let mut hi = one;
            for _ in 0..128 {
                let mid = half * (lo + hi);
                let val = hermite_component(h_used, &y, &k1, &y_new, &f_new, mid, ev.component);
                let trig = match ev.direction {
                    Direction::Falling => val <= ev.threshold,
                    Direction::Rising => val >= ev.threshold,
                };
                if trig {
                    hi = mid;
                } else {
                    lo = mid;
                }
                if hi - lo < F::epsilon() {
                    break;
                }
            }
            let t_hit = hi;
            match hit {
                Some((_, t_prev)) if t_prev <= t_hit => {}
                _ => hit = Some((ev.label, t_hit)),
            }
        }
        if let Some((label, t_hit)) = hit {
            let y_hit = hermite_state(h_used, &y, &k1, &y_new, &f_new, t_hit);
            xs.push(x + t_hit * h_used);
            ys.push(y_hit);
            return OdeSolution {
                xs,
                ys,
                status: OdeStatus::Event { label },
                accepted,
                rejected,
            };
        }

        x = x_new;
        y = y_new;
        k1 = f_new;
        xs.push(x);
        ys.push(y);
        if sample_idx < samples.len() && x >= samples[sample_idx] {
            sample_idx += 1;
        }

        let factor = (safety * err.powf(order_inv)).min(grow).max(shrink);
        h = h_used * factor;
    }
    OdeSolution { xs, ys, status: OdeStatus::MaxSteps, accepted, rejected }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dd::Dd;
    use num_traits::ToPrimitive;

    fn opts64(rtol: f64) -> OdeOptions<f64> {
        OdeOptions { rtol, atol: 1e-300, h_init: 1e-4, max_steps: 1_000_000 }
    }

    #[test]
    fn exponential_growth_matches_exp() {
        let sol = integrate(|_, y: &[f64; 1]| [y[0]], 0.0, [1.0], 1.0, &[], &[], &opts64(1e-12));
        assert_eq!(sol.status, OdeStatus::Done);
        let last = sol.ys.last().unwrap()[0];
        assert!((last - std::f64::consts::E).abs() < 1e-10, "got {last}");
    }

    #[test]
    fn harmonic_oscillator_error_tracks_tolerance() {
        let f = |_: f64, y: &[f64; 2]| [y[1], -y[0]];
        let mut errs = Vec::new();
        for rtol in [1e-6, 1e-9, 1e-12] {
            let sol = integrate(f, 0.0, [1.0, 0.0], 10.0, &[], &[], &opts64(rtol));
            let got = sol.ys.last().unwrap();
            let want = [(10.0f64).cos(), -(10.0f64).sin()];
            errs.push(((got[0] - want[0]).powi(2) + (got[1] - want[1]).powi(2)).sqrt());
        }
        assert!(errs[0] < 1e-4 && errs[1] < 1e-7 && errs[2] < 1e-10, "{errs:?}");
        assert!(errs[0] > errs[1] && errs[1] > errs[2]);
    }

    #[test]
    fn falling_event_localized_at_half_life() {
        let f = |_: f64, y: &[f64; 1]| [-y[0]];
        let ev = EventSpec { component: 0, threshold: 0.5, direction: Direction::Falling, label: "half" };
        let sol = integrate(f, 0.0, [1.0], 10.0, &[ev], &[], &opts64(1e-12));
        assert_eq!(sol.status, OdeStatus::Event { label: "half" });
        let x_hit = *sol.xs.last().unwrap();
        assert!((x_hit - std::f64::consts::LN_2).abs() < 1e-9, "hit at {x_hit}");
    }

    #[test]
    fn rising_event_and_immediate_fire() {
        let f = |_: f64, y: &[f64; 1]| [y[0]];
        let ev = EventSpec { component: 0, threshold: 2.0, direction: Direction::Rising, label: "double" };
        let sol = integrate(f, 0.0, [1.0], 10.0, &[ev], &[], &opts64(1e-12));
        let x_hit = *sol.xs.last().unwrap();
        assert!((x_hit - std::f64::consts::LN_2).abs() < 1e-9);
        // Already above threshold: fires before any step is taken.
        let sol2 = integrate(f, 0.0, [3.0], 10.0, &[ev], &[], &opts64(1e-12));
        assert_eq!(sol2.status, OdeStatus::Event { label: "double" });
        assert_eq!(sol2.xs.len(), 1);
    }

    #[test]
    fn mandatory_samples_are_hit_exactly() {
        let f = |_: f64, y: &[f64; 1]| [-y[0]];
        let samples = [0.25, 0.5, 0.75];
        let sol = integrate(f, 0.0, [1.0], 1.0, &[], &samples, &opts64(1e-10));
        for s in samples {
            assert!(sol.xs.contains(&s), "missing sample {s}");
        }
    }

    #[test]
    fn quintic_is_integrated_exactly_in_double_double() {
        // A fifth-order method integrates y' = 5x^4 without truncation
        // error, so only arithmetic rounding remains.
        let f = |x: Dd, _: &[Dd; 1]| {
            let x2 = x * x;
            [Dd::from(5.0) * x2 * x2]
        };
        let opts = OdeOptions {
            rtol: Dd::from(1e-18),
            atol: Dd::from(1e-40),
            h_init: Dd::from(1e-2),
            max_steps: 100_000,
        };
        let sol = integrate(f, Dd::from(0.0), [Dd::from(0.0)], Dd::from(2.0), &[], &[], &opts);
        assert_eq!(sol.status, OdeStatus::Done);
        let got = sol.ys.last().unwrap()[0];
        let err = (got - Dd::from(32.0)).abs().to_f64().unwrap();
        assert!(err < 1e-27, "err {err:e}");
    }

    #[test]
    fn double_double_runs_agree_beyond_f64_precision() {
        let f = |_: Dd, y: &[Dd; 2]| [y[1], -y[0]];
        let run = |rtol: f64| {
            let opts = OdeOptions {
                rtol: Dd::from(rtol),
                atol: Dd::from(1e-60),
                h_init: Dd::from(1e-3),
                max_steps: 2_000_000,
            };
            let sol =
                integrate(f, Dd::from(0.0), [Dd::from(1.0), Dd::from(0.0)], Dd::from(3.0), &[], &[], &opts);
            assert_eq!(sol.status, OdeStatus::Done);
            sol.ys.last().unwrap()[0]
        };
        let loose = run(1e-18);
        let tight = run(1e-22);
        // Independent step sequences agreeing this closely means both carry
        // accuracy unreachable with f64 state.
        let gap = (loose - tight).abs().to_f64().unwrap();
        assert!(gap < 1e-16, "gap {gap:e}");
        let f64_ref = (3.0f64).cos();
        assert!((tight.to_f64().unwrap() - f64_ref).abs() < 1e-12);
    }
}
