//! Quadrature on the solver's non-uniform radial grids.
//!
//! Each interval is integrated with the exact antiderivative of the
//! interpolating parabola; interior intervals average the left- and
//! right-shifted parabolas, which keeps the rule third order on the
//! geometric grids the adaptive integrator produces.

use num_traits::{Float, FromPrimitive};

/// Exact integral over [a, b] of the quadratic through three nodes.
/// Evaluated in coordinates centered at `a`: every term is O(h^3) instead
/// of O(x^3), so nothing cancels on grids that reach large radii.
fn parabola_integral<F: Float + FromPrimitive>(xs: [F; 3], ys: [F; 3], a: F, b: F) -> F {
    let two = F::from_f64(2.0).unwrap();
    let three = F::from_f64(3.0).unwrap();
    let w = b - a;
    let t = [xs[0] - a, xs[1] - a, xs[2] - a];
    // Integral of (s - u)(s - v) over [0, w].
    let pair = |u: F, v: F| w * w * w / three - (u + v) * w * w / two + u * v * w;
    let mut total = F::zero();
    for j in 0..3 {
        let (u, v) = match j {
            0 => (t[1], t[2]),
            1 => (t[0], t[2]),
            _ => (t[0], t[1]),
        };
        let denom = (t[j] - u) * (t[j] - v);
        total = total + ys[j] * pair(u, v) / denom;
    }
    total
}

/// Cumulative integral F[i] = integral of f from x[0] to x[i].
pub fn cumulative<F: Float + FromPrimitive>(x: &[F], f: &[F]) -> Vec<F> {
    let m = x.len();
    assert!(m == f.len() && m >= 3, "need three matched samples");
    let half = F::from_f64(0.5).unwrap();
    let mut out = vec![F::zero(); m];
    for i in 0..m - 1 {
        let left = if i >= 1 {
            Some(parabola_integral(
                [x[i - 1], x[i], x[i + 1]],
                [f[i - 1], f[i], f[i + 1]],
                x[i],
                x[i + 1],
            ))
        } else {
            None
        };
        let right = if i + 2 < m {
            Some(parabola_integral(
                [x[i], x[i + 1], x[i + 2]],
                [f[i], f[i + 1], f[i + 2]],
                x[i],
                x[i + 1],
            ))
        } else {
            None
        };
        let piece = match (left, right) {
            (Some(l), Some(r)) => half * (l + r),
            (Some(l), None) => l,
            (None, Some(r)) => r,
            (None, None) => unreachable!(),
        };
        out[i + 1] = out[i] + piece;
    }
    out
}

/// Total integral of f over the whole grid.
pub fn integrate<F: Float + FromPrimitive>(x: &[F], f: &[F]) -> F {
    *cumulative(x, f).last().unwrap()
}

/// Analytic tail integral of C x^gamma from `from` to infinity.
/// Returns None when the tail diverges (gamma >= -1).
pub fn power_tail_integral<F: Float + FromPrimitive>(c: F, gamma: F, from: F) -> Option<F> {
    let one = F::one();
    if gamma >= -one {
        return None;
    }
    Some(-c * from.powf(gamma + one) / (gamma + one))
}
