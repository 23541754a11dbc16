//! Numerical checks of the kernel estimates: smoothing, the power-data
//! decay rate, the local lower bounds on a ball, and the kernel ordering
//! between nested domains.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::PI;

use super::{DirichletEngine, FreeSpaceEngine, SemigroupEngine};
use crate::error::{check_positive, Error, Result};
use crate::math::{geometric_points, least_squares_line, ln, pow, sqrt};
use crate::radial_field::{RadialFunction, RadialGrid};

const SMOOTHING_TOL: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothingCheck {
    pub lhs: f64,
    pub bound: f64,
    pub ratio: f64,
    pub satisfied: bool,
}

/// `‖S(t)f‖_{q2} <= (4πt)^{-N/2 (1/q1 - 1/q2)} ‖f‖_{q1}`.
pub fn verify_smoothing(
    engine: &SemigroupEngine,
    f: &RadialFunction,
    t: f64,
    q1: f64,
    q2: f64,
) -> Result<SmoothingCheck> {
    check_positive("t", t)?;
    if !(q1 >= 1.0 && q2 >= q1) {
        return Err(Error::InvalidParameter {
            name: "q1",
            value: q1,
            expected: "1 <= q1 <= q2 <= ∞",
        });
    }
    let n = engine.dimension() as f64;
    let lhs = engine.apply(f, t)?.norm(q2)?;
    let exponent = -0.5 * n * (1.0 / q1 - 1.0 / q2);
    let bound = pow(4.0 * PI * t, exponent) * f.norm(q1)?;
    let ratio = if bound > 0.0 {
        lhs / bound
    } else if lhs > 0.0 {
        f64::INFINITY
    } else {
        0.0
    };
    Ok(SmoothingCheck {
        lhs,
        bound,
        ratio,
        satisfied: lhs <= bound * (1.0 + SMOOTHING_TOL),
    })
}

/// `|x|^{-γ} χ_{B_l}` on `grid`.
pub fn power_profile(grid: Arc<RadialGrid>, gamma: f64, l: f64) -> Result<RadialFunction> {
    let values = grid
        .nodes()
        .iter()
        .map(|&s| {
            if s <= l * (1.0 + 1e-12) {
                pow(s, -gamma)
            } else {
                0.0
            }
        })
        .collect();
    RadialFunction::new(grid, values, gamma, l)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lemma2Options {
    pub t_min: f64,
    pub t_max: f64,
    pub count: usize,
}

impl Default for Lemma2Options {
    fn default() -> Self {
        Lemma2Options {
            t_min: 1e-4,
            t_max: 1e-1,
            count: 13,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lemma2Estimate {
    pub c0_hat: f64,
    pub slope_hat: f64,
    /// `(t, ‖S(t)(|·|^{-γ}χ_{B_1})‖_{q2})`
    pub samples: Vec<(f64, f64)>,
}

/// Measure `C` and the decay slope in
/// `‖S(t)(|·|^{-γ}χ_{B_1})‖_{q2} <= C t^{-N/2 (1/q1 - 1/q2) - γ/2} ‖χ_{B_1}‖_{q1}`.
///
/// `C0_hat` is normalized by `‖χ_{B_1}‖_{q1}`, so for `q1 = ∞` it is the
/// constant in `‖S(t)u_0‖_∞ <= C_0 K^{1/r} t^{-ρ/2r}`.
pub fn estimate_lemma2_constant(
    engine: &SemigroupEngine,
    gamma: f64,
    q1: f64,
    q2: f64,
    options: &Lemma2Options,
) -> Result<Lemma2Estimate> {
    let n = engine.dimension() as f64;
    if !(gamma > 0.0 && gamma < n) {
        return Err(Error::InvalidParameter {
            name: "γ",
            value: gamma,
            expected: "0 < γ < N",
        });
    }
    let middle = gamma / n + 1.0 / q1;
    if !(q1 >= 1.0 && q2 >= 1.0 && 1.0 / q2 < middle && middle < 1.0) {
        return Err(Error::HypothesisViolated(
            "requires 0 <= 1/q2 < γ/N + 1/q1 < 1",
        ));
    }
    if options.count < 2 || !(options.t_min > 0.0 && options.t_max > options.t_min) {
        return Err(Error::InvalidParameter {
            name: "t-grid",
            value: options.count as f64,
            expected: "at least two times with 0 < t_min < t_max",
        });
    }
    let grid = engine.grid().clone();
    if grid.radius() < 1.0 {
        return Err(Error::SupportOutsideDomain {
            support: 1.0,
            radius: grid.radius(),
        });
    }
    let data = power_profile(grid.clone(), gamma, 1.0)?;
    let chi = RadialFunction::new(grid.clone(), alloc::vec![1.0; grid.len()], 0.0, 1.0)?;
    let normalizer = chi.norm(q1)?;
    let rate = 0.5 * n * (1.0 / q1 - 1.0 / q2) + 0.5 * gamma;
    let times = geometric_points(options.t_min, options.t_max, options.count);
    let mut samples = Vec::with_capacity(times.len());
    let mut c0_hat: f64 = 0.0;
    for &t in &times {
        let value = engine.apply(&data, t)?.norm(q2)?;
        c0_hat = c0_hat.max(pow(t, rate) * value / normalizer);
        samples.push((t, value));
    }
    let xs: Vec<f64> = samples.iter().map(|p| ln(p.0)).collect();
    let ys: Vec<f64> = samples.iter().map(|p| ln(p.1)).collect();
    let (slope_hat, _) = least_squares_line(&xs, &ys);
    Ok(Lemma2Estimate {
        c0_hat,
        slope_hat,
        samples,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lemma1Row {
    pub t: f64,
    /// `min S(t)χ_{B_l} / (l^N (l+√t)^{-N})` over `B_{l+√t}`
    pub c_n: f64,
    /// `min S(t)(|·|^{-γ}χ_{B_l}) / t^{-γ/2}` over `B_{√t}`
    pub c_prime_n: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lemma1Report {
    pub rows: Vec<Lemma1Row>,
    pub pass: bool,
}

/// Largest-to-smallest spread allowed across the sampled times.
const LEMMA1_SPREAD: f64 = 3.0;

/// Empirical lower-bound constants on `B_R` for `χ_{B_l}` and `|·|^{-γ}χ_{B_l}`.
pub fn verify_lemma1_lower(
    engine: &DirichletEngine,
    l: f64,
    gamma: f64,
    times: &[f64],
) -> Result<Lemma1Report> {
    check_positive("l", l)?;
    let n = engine.grid().dimension() as f64;
    if !(gamma > 0.0 && gamma < n) {
        return Err(Error::InvalidParameter {
            name: "γ",
            value: gamma,
            expected: "0 < γ < N",
        });
    }
    let delta = 0.5 * (engine.radius() - l);
    if delta <= 0.0 {
        return Err(Error::SupportOutsideDomain {
            support: l,
            radius: engine.radius(),
        });
    }
    if times.is_empty() {
        return Err(Error::NoAdmissibleTime);
    }
    for &t in times {
        check_positive("t", t)?;
        if t > delta * delta || t > l * l {
            return Err(Error::InvalidParameter {
                name: "t",
                value: t,
                expected: "t <= δ^2 and t <= l^2",
            });
        }
    }
    let grid = engine.grid().clone();
    let chi = RadialFunction::new(grid.clone(), alloc::vec![1.0; grid.len()], 0.0, l)?;
    let singular = power_profile(grid.clone(), gamma, l)?;
    let mut rows = Vec::with_capacity(times.len());
    for &t in times {
        let root = sqrt(t);
        let a = engine.apply(&chi, t)?;
        let scale = pow(l, n) * pow(l + root, -n);
        let c_n = min_over(&grid, a.values(), l + root) / scale;
        let b = engine.apply(&singular, t)?;
        let c_prime_n = min_over(&grid, b.values(), root) * pow(t, 0.5 * gamma);
        rows.push(Lemma1Row { t, c_n, c_prime_n });
    }
    let spread = |f: fn(&Lemma1Row) -> f64| {
        let hi = rows.iter().map(f).fold(0.0, f64::max);
        let lo = rows.iter().map(f).fold(f64::INFINITY, f64::min);
        lo > 0.0 && hi <= LEMMA1_SPREAD * lo
    };
    let pass = spread(|r| r.c_n) && spread(|r| r.c_prime_n);
    Ok(Lemma1Report { rows, pass })
}

fn min_over(grid: &RadialGrid, values: &[f64], radius: f64) -> f64 {
    let end = grid.count_within(radius).max(1);
    values[..end].iter().copied().fold(f64::INFINITY, f64::min)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelOrdering {
    pub holds: bool,
    /// largest of `S_small - S_large` and `S_large - S_free` over the small ball
    pub max_violation: f64,
    pub tolerance: f64,
}

/// Relative tolerance of the node-wise comparison, against `‖S_free(t)f‖_∞`.
const ORDERING_TOL: f64 = 1e-6;

/// `S_{B_small}(t)f <= S_{B_large}(t)f <= S_{R^N}(t)f` on `B_small`.
///
/// `f` lives on a uniform grid of radius `r_large`; `r_small` must be one of
/// its nodes so that both balls share their nodes.
pub fn verify_kernel_ordering(
    f: &RadialFunction,
    t: f64,
    r_small: f64,
    r_large: f64,
) -> Result<KernelOrdering> {
    check_positive("t", t)?;
    if !f.is_nonnegative() {
        let (index, &value) = f
            .values()
            .iter()
            .enumerate()
            .find(|(_, v)| **v < 0.0)
            .expect("a negative node");
        return Err(Error::NegativeValue {
            what: "kernel ordering data",
            index,
            value,
        });
    }
    let grid = f.grid();
    if grid.grade() != 1.0
        || (grid.radius() - r_large).abs() > 1e-12 * r_large
        || !(r_small < r_large)
    {
        return Err(Error::InvalidParameter {
            name: "R_large",
            value: r_large,
            expected: "f sampled on a uniform grid of radius R_large > R_small",
        });
    }
    let small_count = grid.index_of(r_small).ok_or(Error::InvalidParameter {
        name: "R_small",
        value: r_small,
        expected: "a node of the uniform grid",
    })? + 1;
    if f.support_radius() > r_small * (1.0 + 1e-12) {
        return Err(Error::SupportOutsideDomain {
            support: f.support_radius(),
            radius: r_small,
        });
    }
    let n = grid.dimension();
    let large = DirichletEngine::new(n, r_large, grid.len())?;
    let small = DirichletEngine::new(n, r_small, small_count)?;
    let restricted = RadialFunction::new(
        small.grid().clone(),
        f.values()[..small_count].to_vec(),
        f.singular_power(),
        f.support_radius(),
    )?;
    let s_small = small.apply(&restricted, t)?;
    let s_large = large.apply(f, t)?;
    let s_free = FreeSpaceEngine::new(grid.clone()).apply(f, t)?;
    let tolerance = ORDERING_TOL * s_free.sup_norm();
    let mut max_violation: f64 = f64::NEG_INFINITY;
    for i in 0..small_count {
        let (a, b, c) = (s_small.values()[i], s_large.values()[i], s_free.values()[i]);
        max_violation = max_violation.max(a - b).max(b - c);
    }
    Ok(KernelOrdering {
        holds: max_violation <= tolerance,
        max_violation,
        tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::exp;

    fn free(n: usize) -> SemigroupEngine {
        SemigroupEngine::free_space(Arc::new(
            RadialGrid::with_breakpoint(n, 8.0, 1024, 3.0, 1.0).unwrap(),
        ))
    }

    #[test]
    fn near_delta_bump_saturates_the_smoothing_constant() {
        let engine = free(1);
        let sigma = 1e-3;
        let bump = RadialFunction::from_fn(engine.grid().clone(), |s| {
            exp(-s * s / (4.0 * sigma)) / sqrt(4.0 * PI * sigma)
        })
        .unwrap();
        let check = verify_smoothing(&engine, &bump, 0.1, 1.0, f64::INFINITY).unwrap();
        assert!(check.satisfied);
        assert!(check.ratio > 0.98 && check.ratio <= 1.0 + 1e-9, "{check:?}");
    }

    #[test]
    fn smoothing_edge_cases() {
        let engine = free(3);
        let zero = RadialFunction::zero(engine.grid().clone());
        let check = verify_smoothing(&engine, &zero, 0.1, 1.0, 2.0).unwrap();
        assert_eq!(check.lhs, 0.0);
        assert!(check.satisfied);
        assert!(verify_smoothing(&engine, &zero, 0.1, 2.0, 1.0).is_err());
        let chi = power_profile(engine.grid().clone(), 0.0, 1.0).unwrap();
        for q in [1.0, 2.0, 3.5, f64::INFINITY] {
            let check = verify_smoothing(&engine, &chi, 0.02, q, q).unwrap();
            assert!(
                check.satisfied && check.ratio <= 1.0 + 1e-6,
                "q={q}: {check:?}"
            );
        }
    }

    #[test]
    fn lemma2_decay_rates_and_hypothesis() {
        let engine = free(3);
        for gamma in [1.0, 2.0] {
            let est = estimate_lemma2_constant(
                &engine,
                gamma,
                f64::INFINITY,
                f64::INFINITY,
                &Lemma2Options::default(),
            )
            .unwrap();
            assert!(
                (est.slope_hat + 0.5 * gamma).abs() < 0.05,
                "γ={gamma}: {}",
                est.slope_hat
            );
        }
        assert!(matches!(
            estimate_lemma2_constant(&engine, 1.0, 1.0, 1.0, &Lemma2Options::default()),
            Err(Error::HypothesisViolated(_))
        ));
    }

    #[test]
    fn lemma2_constant_matches_the_origin_value() {
        // t^{γ/2} S(t)|x|^{-γ}(0) = Γ((N-γ)/2) / (4^{γ/2} Γ(N/2)) for untruncated data
        let engine = free(3);
        let est = estimate_lemma2_constant(
            &engine,
            1.0,
            f64::INFINITY,
            f64::INFINITY,
            &Lemma2Options {
                t_min: 1e-5,
                t_max: 1e-3,
                count: 3,
            },
        )
        .unwrap();
        let exact = 1.0 / (2.0 * crate::math::tgamma(1.5));
        assert!(
            (est.c0_hat - exact).abs() < 1e-4,
            "{} vs {exact}",
            est.c0_hat
        );
    }

    #[test]
    fn lemma1_rejects_inadmissible_times() {
        let engine = DirichletEngine::new(3, 4.0, 256).unwrap();
        assert!(verify_lemma1_lower(&engine, 1.0, 1.0, &[3.0]).is_err());
        assert!(verify_lemma1_lower(&engine, 0.1, 1.0, &[0.05]).is_err());
        assert!(verify_lemma1_lower(&engine, 4.0, 1.0, &[0.01]).is_err());
    }

    #[test]
    fn lemma1_constants_are_positive_and_stable() {
        for n in 1..=3 {
            let engine = DirichletEngine::new(n, 4.0, 512).unwrap();
            let report = verify_lemma1_lower(&engine, 1.0, 0.5, &[1e-3, 1e-2, 1e-1]).unwrap();
            assert!(report.pass, "N={n}: {report:?}");
        }
    }

    #[test]
    fn kernel_ordering_on_nested_balls() {
        let grid = Arc::new(RadialGrid::uniform(3, 4.0, 2048).unwrap());
        let chi =
            RadialFunction::new(grid.clone(), alloc::vec![1.0; grid.len()], 0.0, 1.0).unwrap();
        let check = verify_kernel_ordering(&chi, 0.05, 2.0, 4.0).unwrap();
        assert!(check.holds, "{check:?}");
        let zero = RadialFunction::zero(grid.clone());
        let zero = RadialFunction::new(grid.clone(), zero.values().to_vec(), 0.0, 1.0).unwrap();
        assert!(verify_kernel_ordering(&zero, 0.05, 2.0, 4.0).unwrap().holds);
        let mut signed = alloc::vec![1.0; grid.len()];
        signed[5] = -1.0;
        let signed = RadialFunction::new(grid, signed, 0.0, 1.0).unwrap();
        assert!(matches!(
            verify_kernel_ordering(&signed, 0.05, 2.0, 4.0),
            Err(Error::NegativeValue { .. })
        ));
    }

    #[test]
    fn short_times_are_local() {
        // away from the jump and the boundary, all three engines return f
        let grid = Arc::new(RadialGrid::uniform(3, 4.0, 1024).unwrap());
        let chi =
            RadialFunction::new(grid.clone(), alloc::vec![1.0; grid.len()], 0.0, 1.0).unwrap();
        let small = DirichletEngine::new(3, 2.0, 512).unwrap();
        let restricted =
            RadialFunction::new(small.grid().clone(), alloc::vec![1.0; 512], 0.0, 1.0).unwrap();
        let t = 1e-4;
        let outs = [
            small.apply(&restricted, t).unwrap().values().to_vec(),
            DirichletEngine::new(3, 4.0, 1024)
                .unwrap()
                .apply(&chi, t)
                .unwrap()
                .values()
                .to_vec(),
            FreeSpaceEngine::new(grid.clone())
                .apply(&chi, t)
                .unwrap()
                .values()
                .to_vec(),
        ];
        for (i, &s) in grid.nodes().iter().enumerate().take(512) {
            if (s - 1.0).abs() > 0.1 {
                let exact = if s < 1.0 { 1.0 } else { 0.0 };
                for out in &outs {
                    assert!((out[i] - exact).abs() < 1e-3, "s={s}: {}", out[i]);
                }
            }
        }
    }
}
