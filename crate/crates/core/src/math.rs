//! Scalar special functions and small numerical kernels shared by the
//! engines. Everything routes through `libm` so the crate stays `no_std`.

use alloc::vec::Vec;
use core::f64::consts::PI;

pub use libm::{
    ceil, cos, erf, erfc, exp, expm1, floor, lgamma, log as ln, log1p, pow, round, sin, sqrt,
    tgamma,
};

/// Surface area `σ_{N-1}` of the unit sphere in `R^N` (2 for `N = 1`).
pub fn sphere_area(dimension: usize) -> f64 {
    let half = dimension as f64 / 2.0;
    2.0 * pow(PI, half) / tgamma(half)
}

/// Volume of the unit ball in `R^N`.
pub fn ball_volume(dimension: usize) -> f64 {
    sphere_area(dimension) / dimension as f64
}

/// `e^{-x} I_0(x)` for `x >= 0`.
///
/// Power series below 30 (all terms positive, no cancellation), the
/// Hankel asymptotic series above.
pub fn bessel_i0_scaled(x: f64) -> f64 {
    let x = x.abs();
    if x < 30.0 {
        let q = 0.25 * x * x;
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut k = 1.0;
        loop {
            term *= q / (k * k);
            sum += term;
            if term < 1e-17 * sum {
                break;
            }
            k += 1.0;
        }
        sum * exp(-x)
    } else {
        // I_0(x) ~ e^x / sqrt(2πx) Σ ((2k-1)!!)^2 / (k! (8x)^k)
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..30 {
            let kk = k as f64;
            let odd = 2.0 * kk - 1.0;
            let next = term * odd * odd / (kk * 8.0 * x);
            if next.abs() > term.abs() {
                break;
            }
            term = next;
            sum += term;
            if term < 1e-17 * sum {
                break;
            }
        }
        sum / sqrt(2.0 * PI * x)
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "rule needs at least one node");
    let mut nodes = alloc::vec![0.0; n];
    let mut weights = alloc::vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, then Newton on P_n.
        let mut x = cos(PI * (i as f64 + 0.75) / (nf + 0.5));
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 1 { x } else { p1 };
            let pm1 = if n == 1 { 1.0 } else { p0 };
            dp = nf * (x * p - pm1) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// Ordinary least-squares fit `y ≈ slope·x + intercept`.
pub fn least_squares_line(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    debug_assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// `n` points spaced geometrically from `lo` to `hi` inclusive.
pub fn geometric_points(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return alloc::vec![lo];
    }
    let ratio = ln(hi / lo) / (n - 1) as f64;
    (0..n)
        .map(|i| {
            if i + 1 == n {
                hi
            } else {
                lo * exp(ratio * i as f64)
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_areas() {
        assert!((sphere_area(1) - 2.0).abs() < 1e-14);
        assert!((sphere_area(2) - 2.0 * PI).abs() < 1e-13);
        assert!((sphere_area(3) - 4.0 * PI).abs() < 1e-13);
        assert!((ball_volume(3) - 4.0 * PI / 3.0).abs() < 1e-13);
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        for n in [1usize, 2, 5, 8, 33, 128] {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-12, "n = {n}");
            let deg = 2 * n - 1;
            let exact = if deg % 2 == 1 {
                2.0 / (deg as f64)
            } else {
                0.0
            };
            let got: f64 = x
                .iter()
                .zip(&w)
                .map(|(x, w)| w * pow(*x, (deg - 1) as f64))
                .sum();
            assert!((got - exact).abs() < 1e-11, "n = {n}: {got} vs {exact}");
        }
    }

    #[test]
    fn bessel_scaled_matches_quadrature_of_defining_integral() {
        // I_0(x) = (1/π) ∫_0^π e^{x cos θ} dθ, evaluated by a fine midpoint rule
        for &x in &[0.0, 0.3, 1.0, 5.0, 29.9, 30.1, 80.0, 400.0] {
            let n = 200_000;
            let h = PI / n as f64;
            let s: f64 = (0..n)
                .map(|i| exp(x * (cos((i as f64 + 0.5) * h) - 1.0)))
                .sum::<f64>()
                * h
                / PI;
            let got = bessel_i0_scaled(x);
            assert!((got - s).abs() < 1e-9 * s, "x = {x}: {got} vs {s}");
        }
    }

    #[test]
    fn least_squares_recovers_line() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys: Vec<f64> = xs.iter().map(|x| -0.5 * x + 2.0).collect();
        let (m, b) = least_squares_line(&xs, &ys);
        assert!((m + 0.5).abs() < 1e-14 && (b - 2.0).abs() < 1e-14);
    }
}
