//! Second-order finite-difference stencils on uniform grids.
//!
//! Interior points use centered differences; the first and last points use
//! one-sided stencils of the same order, so every derivative array has the
//! full length of its input.

use num_traits::{Float, FromPrimitive};

/// First derivative, O(h^2) everywhere.
pub fn d1<F: Float + FromPrimitive>(f: &[F], h: F) -> Vec<F> {
    let m = f.len();
    assert!(m >= 4, "stencils need at least four points");
    let two = F::from_f64(2.0).unwrap();
    let three = F::from_f64(3.0).unwrap();
    let four = F::from_f64(4.0).unwrap();
    let mut out = vec![F::zero(); m];
    out[0] = (-three * f[0] + four * f[1] - f[2]) / (two * h);
    for i in 1..m - 1 {
        out[i] = (f[i + 1] - f[i - 1]) / (two * h);
    }
    out[m - 1] = (three * f[m - 1] - four * f[m - 2] + f[m - 3]) / (two * h);
    out
}

/// Second derivative, O(h^2) everywhere.
pub fn d2<F: Float + FromPrimitive>(f: &[F], h: F) -> Vec<F> {
    let m = f.len();
    assert!(m >= 4, "stencils need at least four points");
    let two = F::from_f64(2.0).unwrap();
    let four = F::from_f64(4.0).unwrap();
    let five = F::from_f64(5.0).unwrap();
    let h2 = h * h;
    let mut out = vec![F::zero(); m];
    out[0] = (two * f[0] - five * f[1] + four * f[2] - f[3]) / h2;
    for i in 1..m - 1 {
        out[i] = (f[i + 1] - two * f[i] + f[i - 1]) / h2;
    }
    out[m - 1] = (two * f[m - 1] - five * f[m - 2] + four * f[m - 3] - f[m - 4]) / h2;
    out
}

/// Radial Laplacian f'' + (n-1) f'/r on a uniform grid with r[i] > 0.
pub fn radial_laplacian<F: Float + FromPrimitive>(r: &[F], f: &[F], n: u32) -> Vec<F> {
    assert_eq!(r.len(), f.len());
    let h = r[1] - r[0];
    let nm1 = F::from_u32(n - 1).unwrap();
    let df = d1(f, h);
    let ddf = d2(f, h);
    r.iter()
        .zip(df.iter().zip(ddf.iter()))
        .map(|(&ri, (&d, &dd))| {
            if ri > F::zero() {
                dd + nm1 * d / ri
            } else {
                // Radial profiles are even, so f'/r -> f''(0) at the axis.
                F::from_u32(n).unwrap() * dd
            }
        })
        .collect()
}

/// Radial bilaplacian as the composition of two radial Laplacians.
pub fn radial_bilaplacian<F: Float + FromPrimitive>(r: &[F], f: &[F], n: u32) -> Vec<F> {
    let lap = radial_laplacian(r, f, n);
    radial_laplacian(r, &lap, n)
}

/// Uniform grid of `m` points on [lo, hi] inclusive.
pub fn uniform_grid<F: Float + FromPrimitive>(lo: F, hi: F, m: usize) -> Vec<F> {
    assert!(m >= 2);
    let span = hi - lo;
    let steps = F::from_usize(m - 1).unwrap();
    (0..m)
        .map(|i| lo + span * F::from_usize(i).unwrap() / steps)
        .collect()
}

/// Observed convergence order from residual maxima at successive grid
/// spacings: the log-log slope of residual against h.
pub fn convergence_order<F: Float + FromPrimitive>(hs: &[F], residuals: &[F]) -> F {
    let (slope, _) = crate::fit::loglog_slope(hs, residuals)
        .expect("residuals must be positive to measure an order");
    slope
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivative_stencils_are_second_order() {
        let f = |x: f64| (1.5 * x).sin();
        let fp = |x: f64| 1.5 * (1.5 * x).cos();
        let fpp = |x: f64| -2.25 * (1.5 * x).sin();
        let mut hs = Vec::new();
        let mut e1 = Vec::new();
        let mut e2 = Vec::new();
        for m in [41usize, 81, 161, 321] {
            let grid = uniform_grid(0.0, 2.0, m);
            let h = grid[1] - grid[0];
            let vals: Vec<f64> = grid.iter().map(|&x| f(x)).collect();
            let g1 = d1(&vals, h);
            let g2 = d2(&vals, h);
            let m1 = grid
                .iter()
                .zip(&g1)
                .map(|(&x, &g)| (g - fp(x)).abs())
                .fold(0.0f64, f64::max);
            let m2 = grid
                .iter()
                .zip(&g2)
                .map(|(&x, &g)| (g - fpp(x)).abs())
                .fold(0.0f64, f64::max);
            hs.push(h);
            e1.push(m1);
            e2.push(m2);
        }
        let o1 = convergence_order(&hs, &e1);
        let o2 = convergence_order(&hs, &e2);
        assert!(o1 > 1.9, "first derivative order {o1}");
        assert!(o2 > 1.9, "second derivative order {o2}");
    }

    #[test]
    fn radial_laplacian_of_r_squared_is_2n() {
        let n = 8u32;
        let r = uniform_grid(0.5, 3.0, 101);
        let f: Vec<f64> = r.iter().map(|&x| x * x).collect();
        let lap = radial_laplacian(&r, &f, n);
        for &v in &lap[1..lap.len() - 1] {
            assert!((v - 16.0).abs() < 1e-9, "lap = {v}");
        }
    }

    #[test]
    fn bilaplacian_of_r4_is_constant() {
        // lap r^k = k(k+n-2) r^(k-2), so at n = 8: lap r^4 = 40 r^2 and
        // lap^2 r^4 = 40 * 2n = 640.
        let n = 8u32;
        let r = uniform_grid(1.0, 2.0, 201);
        let f: Vec<f64> = r.iter().map(|&x| x.powi(4)).collect();
        let bil = radial_bilaplacian(&r, &f, n);
        for &v in &bil[3..bil.len() - 3] {
            assert!((v - 640.0).abs() < 1e-4, "bilap = {v}");
        }
    }
}
