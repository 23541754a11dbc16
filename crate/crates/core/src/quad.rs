//! One-dimensional quadrature: adaptive Simpson on finite intervals and
//! convergence classification of improper integrals `∫_z^∞ φ(σ) dσ`.
//!
//! Improper integrals are truncated at `z·10^decades`; the remainder is
//! modelled by a power law fitted to `φ` on the last `fit_decades` of the
//! truncated range. The integral is declared convergent only when the fitted
//! exponent is below `-1 - margin`.

use alloc::vec::Vec;

use crate::math::{exp, gauss_legendre, least_squares_line, ln, pow};

/// Adaptive Simpson quadrature of `f` on `[a, b]` to relative accuracy `rel_tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel_tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    // Coarse composite pass fixes the absolute tolerance scale.
    let panels = 32;
    let h = (b - a) / panels as f64;
    let mut coarse = 0.0;
    let mut pieces = [(0.0, 0.0, 0.0, 0.0, 0.0); 32];
    for (i, piece) in pieces.iter_mut().enumerate() {
        let lo = a + h * i as f64;
        let hi = if i + 1 == panels { b } else { lo + h };
        let (fl, fm, fh) = (f(lo), f(0.5 * (lo + hi)), f(hi));
        let s = (hi - lo) / 6.0 * (fl + 4.0 * fm + fh);
        coarse += s;
        *piece = (lo, hi, fl, fm, fh);
    }
    if !coarse.is_finite() {
        return coarse;
    }
    let abs_tol = rel_tol * coarse.abs().max(1e-300) / panels as f64;
    pieces
        .iter()
        .map(|&(lo, hi, fl, fm, fh)| {
            let whole = (hi - lo) / 6.0 * (fl + 4.0 * fm + fh);
            simpson_step(f, lo, hi, fl, fm, fh, whole, abs_tol, 48)
        })
        .sum()
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol || !delta.is_finite() {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Truncation and tail-fit settings for [`improper_tail`].
#[derive(Debug, Clone, Copy)]
pub struct TailOptions {
    /// Decades covered by the quadrature before the tail model takes over.
    pub decades: f64,
    /// Decades at the end of the truncated range used for the power-law fit.
    pub fit_decades: f64,
    /// Exponent margin: convergent iff fitted exponent `< -1 - margin`.
    pub margin: f64,
    pub rel_tol: f64,
}

impl Default for TailOptions {
    fn default() -> Self {
        TailOptions {
            decades: 8.0,
            fit_decades: 2.0,
            margin: 0.05,
            rel_tol: 1e-11,
        }
    }
}

/// Outcome of classifying `∫_lower^∞ φ(σ) dσ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailIntegral {
    /// Truncated quadrature plus fitted tail; `+∞` when divergent.
    pub value: f64,
    /// Quadrature over `[lower, lower·10^decades]`.
    pub truncated: f64,
    /// Fitted power-law exponent of the integrand at the end of the range.
    pub exponent: f64,
    pub converged: bool,
}

/// Classify and evaluate `∫_lower^∞ φ(σ) dσ` for a nonnegative integrand.
pub fn improper_tail<F: Fn(f64) -> f64>(phi: F, lower: f64, opts: &TailOptions) -> TailIntegral {
    debug_assert!(lower > 0.0);
    let ln10 = core::f64::consts::LN_10;
    let u0 = ln(lower);
    let u1 = u0 + opts.decades * ln10;
    let in_log = |u: f64| {
        let s = exp(u);
        s * phi(s)
    };
    let truncated = adaptive_simpson(&in_log, u0, u1, opts.rel_tol);

    let fit_lo = u1 - opts.fit_decades * ln10;
    let samples = 9;
    let mut xs = [0.0; 9];
    let mut ys = [0.0; 9];
    let mut underflow = false;
    let mut blown = !truncated.is_finite();
    for i in 0..samples {
        let u = fit_lo + (u1 - fit_lo) * i as f64 / (samples - 1) as f64;
        let v = phi(exp(u));
        if !v.is_finite() {
            blown = true;
        } else if v <= 0.0 {
            underflow = true;
        } else {
            xs[i] = u;
            ys[i] = ln(v);
        }
    }
    if blown {
        return TailIntegral {
            value: f64::INFINITY,
            truncated,
            exponent: f64::INFINITY,
            converged: false,
        };
    }
    if underflow {
        // Integrand vanishes (or underflows) at the end of the range: super-polynomial decay.
        return TailIntegral {
            value: truncated,
            truncated,
            exponent: f64::NEG_INFINITY,
            converged: true,
        };
    }
    let (exponent, _) = least_squares_line(&xs, &ys);
    let converged = exponent < -1.0 - opts.margin;
    if !converged {
        return TailIntegral {
            value: f64::INFINITY,
            truncated,
            exponent,
            converged,
        };
    }
    let end = exp(u1);
    let tail = end * phi(end) / (-exponent - 1.0);
    TailIntegral {
        value: truncated + tail,
        truncated,
        exponent,
        converged,
    }
}

/// Weights `w_k` with `∫_0^{ξ_end} ξ^e p(ξ) dξ ≈ Σ_k w_k p(ξ_k)`, `ξ_k = k h`.
///
/// Quadratic panels where their weights are nonnegative, linear cells
/// otherwise (close to the origin when `ξ^e` varies steeply); every weight
/// is nonnegative, which keeps `S(t)` positivity preserving.
pub(crate) fn graded_weights(end: usize, e: f64, h: f64, xi: impl Fn(usize) -> f64) -> Vec<f64> {
    let mut w = alloc::vec![0.0; end + 1];
    let linear = |w: &mut [f64], k: usize| {
        let m = lagrange_moments(&[xi(k), xi(k + 1)], xi(k), xi(k + 1), e, h);
        w[k] += m[0];
        w[k + 1] += m[1];
    };
    let mut k = 0;
    if end % 2 == 1 {
        linear(&mut w, 0);
        k = 1;
    }
    while k + 2 <= end {
        let m = lagrange_moments(&[xi(k), xi(k + 1), xi(k + 2)], xi(k), xi(k + 2), e, h);
        if m.iter().all(|&x| x >= 0.0) {
            for (i, mi) in m.iter().enumerate() {
                w[k + i] += mi;
            }
        } else {
            linear(&mut w, k);
            linear(&mut w, k + 1);
        }
        k += 2;
    }
    w
}

/// `∫_lo^hi ξ^e ℓ_i(ξ) dξ` for the Lagrange basis on `points` (two or three).
fn lagrange_moments(points: &[f64], lo: f64, hi: f64, e: f64, h: f64) -> Vec<f64> {
    let mid = 0.5 * (lo + hi);
    if lo == 0.0 || mid <= 8.0 * h {
        // expand each basis polynomial in monomials and use exact moments
        let moment = |k: f64| (pow(hi, e + k + 1.0) - pow(lo, e + k + 1.0)) / (e + k + 1.0);
        let (m0, m1, m2) = (moment(0.0), moment(1.0), moment(2.0));
        (0..points.len())
            .map(|i| {
                let others: Vec<f64> = (0..points.len())
                    .filter(|&j| j != i)
                    .map(|j| points[j])
                    .collect();
                let denom: f64 = others.iter().map(|p| points[i] - p).product();
                let value = match others.as_slice() {
                    [p] => m1 - p * m0,
                    [p, q] => m2 - (p + q) * m1 + p * q * m0,
                    _ => unreachable!("two or three interpolation points"),
                };
                value / denom
            })
            .collect()
    } else {
        let (x, wts) = gauss_legendre(8);
        let half = 0.5 * (hi - lo);
        (0..points.len())
            .map(|i| {
                x.iter()
                    .zip(&wts)
                    .map(|(tau, wt)| {
                        let z = mid + half * tau;
                        let basis: f64 = (0..points.len())
                            .filter(|&j| j != i)
                            .map(|j| (z - points[j]) / (points[i] - points[j]))
                            .product();
                        half * wt * pow(z, e) * basis
                    })
                    .sum()
            })
            .collect()
    }
}
