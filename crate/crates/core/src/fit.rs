//! Least-squares line fits used for decay slopes and convergence orders.

use num_traits::{Float, FromPrimitive};

/// Slope and intercept of the least-squares line y = slope*x + intercept.
pub fn linear_fit<F: Float + FromPrimitive>(x: &[F], y: &[F]) -> (F, F) {
    assert!(x.len() == y.len() && x.len() >= 2, "need two matched samples");
    let m = F::from_usize(x.len()).unwrap();
    let sx = x.iter().fold(F::zero(), |s, &v| s + v);
    let sy = y.iter().fold(F::zero(), |s, &v| s + v);
    let mx = sx / m;
    let my = sy / m;
    let mut sxx = F::zero();
    let mut sxy = F::zero();
    for (&xi, &yi) in x.iter().zip(y) {
        sxx = sxx + (xi - mx) * (xi - mx);
        sxy = sxy + (xi - mx) * (yi - my);
    }
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// d log y / d log x by least squares; pairs with nonpositive entries are
/// dropped (log undefined), at least two must survive.
pub fn loglog_slope<F: Float + FromPrimitive>(x: &[F], y: &[F]) -> Option<(F, F)> {
    let mut lx = Vec::with_capacity(x.len());
    let mut ly = Vec::with_capacity(y.len());
    for (&xi, &yi) in x.iter().zip(y) {
        if xi > F::zero() && yi > F::zero() {
            lx.push(xi.ln());
            ly.push(yi.ln());
        }
    }
    if lx.len() < 2 {
        return None;
    }
    let (slope, intercept) = linear_fit(&lx, &ly);
    Some((slope, intercept.exp()))
}

/// Fit f ~ C x^gamma over the tail window [x_lo, x_hi]; returns (gamma, C).
pub fn power_tail<F: Float + FromPrimitive>(x: &[F], f: &[F], x_lo: F, x_hi: F) -> Option<(F, F)> {
    let mut xs = Vec::new();
    let mut fs = Vec::new();
    for (&xi, &fi) in x.iter().zip(f) {
        if xi >= x_lo && xi <= x_hi {
            xs.push(xi);
            fs.push(fi);
        }
    }
    loglog_slope(&xs, &fs)
}

/// Least-squares fit of y to c1 + c2 * phi(x); returns (c1, c2, rms residual).
pub fn affine_basis_fit<F: Float + FromPrimitive>(
    x: &[F],
    y: &[F],
    phi: impl Fn(F) -> F,
) -> (F, F, F) {
    let m = F::from_usize(x.len()).unwrap();
    let ph: Vec<F> = x.iter().map(|&v| phi(v)).collect();
    let (c2, c1) = linear_fit(&ph, y);
    let mut ss = F::zero();
    for (&pi, &yi) in ph.iter().zip(y) {
        let r = yi - c1 - c2 * pi;
        ss = ss + r * r;
    }
    (c1, c2, (ss / m).sqrt())
}
