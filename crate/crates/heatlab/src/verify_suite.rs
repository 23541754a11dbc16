//! The estimate battery behind `heatlab verify`: smoothing, the decay
//! constant of power data, the lower bound on a ball, and kernel ordering.

use std::f64::consts::PI;
use std::sync::Arc;

use heatlab_core::radial_field::{RadialFunction, RadialGrid};
use heatlab_core::semigroup::{
    estimate_lemma2_constant, power_profile, verify_kernel_ordering, verify_lemma1_lower,
    verify_smoothing, DirichletEngine, Lemma2Options, SemigroupEngine,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::CliError;

pub const CHECKS: [&str; 4] = ["smoothing", "decay", "lower-bound", "kernel"];

#[derive(Debug, Clone, Serialize)]
pub struct CheckRecord {
    pub check: String,
    pub params: Value,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub pass: bool,
}

/// Deliberate defects for exercising the failure path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// Halve the smoothing constant.
    KernelConstant,
}

impl Fault {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        match text {
            "kernel-constant" => Ok(Fault::KernelConstant),
            other => Err(CliError::Invalid(format!("unknown fault '{other}'"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SuiteOptions {
    pub only: Vec<String>,
    pub cases: usize,
    pub seed: u64,
    pub fault: Option<Fault>,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            only: Vec::new(),
            cases: 50,
            seed: 7,
            fault: None,
        }
    }
}

pub fn run_suite(opts: &SuiteOptions) -> Result<Vec<CheckRecord>, CliError> {
    for name in &opts.only {
        if !CHECKS.contains(&name.as_str()) {
            return Err(CliError::Invalid(format!(
                "unknown check '{name}'; expected one of {}",
                CHECKS.join(", ")
            )));
        }
    }
    let wanted = |name: &str| opts.only.is_empty() || opts.only.iter().any(|o| o == name);
    let mut records = Vec::new();
    if wanted("smoothing") {
        let factor = if opts.fault == Some(Fault::KernelConstant) {
            0.5
        } else {
            1.0
        };
        records.extend(smoothing_checks(opts.cases, opts.seed, factor)?);
    }
    if wanted("decay") {
        records.extend(decay_checks()?);
    }
    if wanted("lower-bound") {
        records.extend(lower_bound_checks()?);
    }
    if wanted("kernel") {
        records.push(kernel_check()?);
    }
    Ok(records)
}

fn q_label(q: f64) -> Value {
    if q.is_finite() {
        json!(q)
    } else {
        json!("inf")
    }
}

/// Random Gaussian mixtures and ball indicators against the exact constant
/// `(4πt)^{-N/2(1/q1 - 1/q2)}`, then the near-delta saturation case.
pub fn smoothing_checks(
    cases: usize,
    seed: u64,
    constant_factor: f64,
) -> Result<Vec<CheckRecord>, CliError> {
    let engines: Vec<SemigroupEngine> = (1..=3)
        .map(|n| {
            Ok(SemigroupEngine::free_space(Arc::new(RadialGrid::new(
                n, 8.0, 256, 3.0,
            )?)))
        })
        .collect::<Result<_, heatlab_core::Error>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draws = Vec::with_capacity(cases);
    for _ in 0..cases {
        let n = rng.gen_range(1..=3usize);
        let t = 10f64.powf(rng.gen_range(-3.0..0.0));
        let q1 = [1.0, 1.5, 2.0, 3.0][rng.gen_range(0..4)];
        let q2 = [q1, 2.0 * q1, 4.0, f64::INFINITY][rng.gen_range(0..4)].max(q1);
        let shape: Vec<(f64, f64)> = if rng.gen_bool(0.25) {
            vec![(-1.0, rng.gen_range(0.2..2.0))]
        } else {
            (0..rng.gen_range(1..=3))
                .map(|_| (rng.gen_range(0.1..2.0), rng.gen_range(0.01..0.5)))
                .collect()
        };
        draws.push((n, t, q1, q2, shape));
    }
    let mut records = draws
        .par_iter()
        .enumerate()
        .map(|(case, (n, t, q1, q2, shape))| {
            let engine = &engines[n - 1];
            let f = if shape[0].0 < 0.0 {
                power_profile(engine.grid().clone(), 0.0, shape[0].1)?
            } else {
                RadialFunction::from_fn(engine.grid().clone(), |s| {
                    shape.iter().map(|&(c, sigma)| c * (-s * s / (4.0 * sigma)).exp()).sum()
                })?
            };
            let check = verify_smoothing(engine, &f, *t, *q1, *q2)?;
            let rhs = check.bound * constant_factor;
            let ratio = if rhs > 0.0 { check.lhs / rhs } else { 0.0 };
            Ok(CheckRecord {
                check: "smoothing".into(),
                params: json!({"case": case, "N": n, "t": t, "q1": q_label(*q1), "q2": q_label(*q2), "data": shape}),
                lhs: check.lhs,
                rhs,
                ratio,
                pass: check.lhs <= rhs * (1.0 + 1e-3),
            })
        })
        .collect::<Result<Vec<_>, heatlab_core::Error>>()?;

    let engine = SemigroupEngine::free_space(Arc::new(RadialGrid::with_breakpoint(
        1, 8.0, 1024, 3.0, 1.0,
    )?));
    let sigma = 1e-3;
    let bump = RadialFunction::from_fn(engine.grid().clone(), |s| {
        (-s * s / (4.0 * sigma)).exp() / (4.0 * PI * sigma).sqrt()
    })?;
    let check = verify_smoothing(&engine, &bump, 0.1, 1.0, f64::INFINITY)?;
    let rhs = check.bound * constant_factor;
    let ratio = check.lhs / rhs;
    records.push(CheckRecord {
        check: "smoothing-saturation".into(),
        params: json!({"N": 1, "t": 0.1, "q1": 1, "q2": "inf", "bump_variance": 2.0 * sigma}),
        lhs: check.lhs,
        rhs,
        ratio,
        pass: ratio > 0.98 && ratio <= 1.0 + 1e-3,
    });
    Ok(records)
}

/// Decay slope `-γ/2` and stability of `C_0` when the time sample is refined
/// and extended one decade toward `t = 0`.
pub fn decay_checks() -> Result<Vec<CheckRecord>, CliError> {
    let engine = SemigroupEngine::free_space(Arc::new(RadialGrid::with_breakpoint(
        3, 8.0, 1024, 3.0, 1.0,
    )?));
    let mut records = Vec::new();
    for gamma in [0.5, 1.0, 2.0] {
        let coarse = Lemma2Options::default();
        let fine = Lemma2Options {
            t_min: coarse.t_min / 10.0,
            t_max: coarse.t_max,
            count: 3 * coarse.count - 2,
        };
        let a = estimate_lemma2_constant(&engine, gamma, f64::INFINITY, f64::INFINITY, &coarse)?;
        let b = estimate_lemma2_constant(&engine, gamma, f64::INFINITY, f64::INFINITY, &fine)?;
        let target = -0.5 * gamma;
        records.push(CheckRecord {
            check: "decay-slope".into(),
            params: json!({"N": 3, "gamma": gamma, "q1": "inf", "q2": "inf", "samples": coarse.count}),
            lhs: a.slope_hat,
            rhs: target,
            ratio: a.slope_hat / target,
            pass: (a.slope_hat - target).abs() <= 0.05,
        });
        records.push(CheckRecord {
            check: "decay-stability".into(),
            params: json!({"N": 3, "gamma": gamma, "samples": [coarse.count, fine.count]}),
            lhs: b.c0_hat,
            rhs: a.c0_hat,
            ratio: b.c0_hat / a.c0_hat,
            pass: (b.c0_hat / a.c0_hat - 1.0).abs() <= 0.1,
        });
    }
    Ok(records)
}

pub const LOWER_BOUND_TIMES: [f64; 4] = [1e-4, 1e-3, 1e-2, 1e-1];

/// Positive lower constants on `B_4`, stable within a factor 3 over three decades.
/// `lhs` is the larger of the two max/min spreads.
pub fn lower_bound_checks() -> Result<Vec<CheckRecord>, CliError> {
    (1..=3usize)
        .into_par_iter()
        .map(|n| {
            let engine = DirichletEngine::new(n, 4.0, 1024)?;
            let report = verify_lemma1_lower(&engine, 1.0, 0.5, &LOWER_BOUND_TIMES)?;
            let spread = |pick: fn(&heatlab_core::semigroup::Lemma1Row) -> f64| {
                let lo = report.rows.iter().map(pick).fold(f64::INFINITY, f64::min);
                let hi = report.rows.iter().map(pick).fold(0.0, f64::max);
                if lo > 0.0 {
                    hi / lo
                } else {
                    f64::INFINITY
                }
            };
            let worst = spread(|r| r.c_n).max(spread(|r| r.c_prime_n));
            let rows: Vec<Value> = report
                .rows
                .iter()
                .map(|r| json!({"t": r.t, "c_N": r.c_n, "c_prime_N": r.c_prime_n}))
                .collect();
            Ok(CheckRecord {
                check: "lower-bound".into(),
                params: json!({"N": n, "R": 4.0, "l": 1.0, "gamma": 0.5, "rows": rows}),
                lhs: worst,
                rhs: 3.0,
                ratio: worst / 3.0,
                pass: report.pass,
            })
        })
        .collect::<Result<Vec<_>, heatlab_core::Error>>()
        .map_err(CliError::from)
}

/// `S_{B_2}(t) ≤ S_{B_4}(t) ≤ S_{R^N}(t)` on `χ_{B_1}`.
pub fn kernel_check() -> Result<CheckRecord, CliError> {
    let grid = Arc::new(RadialGrid::uniform(3, 4.0, 2048)?);
    let chi = RadialFunction::new(grid.clone(), vec![1.0; grid.len()], 0.0, 1.0)?;
    let check = verify_kernel_ordering(&chi, 0.05, 2.0, 4.0)?;
    Ok(CheckRecord {
        check: "kernel".into(),
        params: json!({"N": 3, "t": 0.05, "R_small": 2.0, "R_large": 4.0, "M": 2048}),
        lhs: check.max_violation,
        rhs: check.tolerance,
        ratio: check.max_violation / check.tolerance,
        pass: check.holds,
    })
}
