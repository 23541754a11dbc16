//! Mild solutions `u(t) = S(t)u_0 + ∫_0^t S(t-σ) h(σ) g(u(σ)) dσ`:
//! monotone iteration between an explicit sub/supersolution pair, a direct
//! forward sweep, the non-existence probe and the Gronwall uniqueness bound.
//!
//! Time is discretized by the first-order exponential integrator
//! `U_{k+1} = S(Δt_k)[U_k + Δt_k h(t_k) g(V_k)]`, `U_0 = S(t_0)u_0`, on a
//! geometric grid. With `V = U` the sweep is the discrete fixed point; with
//! `V` a previous iterate it is one Picard step.

use alloc::vec::Vec;

use crate::criteria::check_def2;
use crate::error::{check_positive, Error, Result};
use crate::math::{exp, geometric_points, ln, pow};
use crate::nonlinearity::NonlinearitySpec;
use crate::quad::{improper_tail, TailOptions};
use crate::radial_field::{ProblemSpec, RadialFunction};
use crate::semigroup::SemigroupEngine;

/// `t_0 = START_FRACTION · T`.
pub const START_FRACTION: f64 = 1e-4;
pub const DEFAULT_STEPS: usize = 200;

/// Increasing times `t_0 < t_1 < ... < t_K`, all positive.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    times: Vec<f64>,
}

impl TimeGrid {
    pub fn new(times: Vec<f64>) -> Result<Self> {
        if times.len() < 2 {
            return Err(Error::InvalidParameter {
                name: "time grid",
                value: times.len() as f64,
                expected: "at least two times",
            });
        }
        if !(times[0] > 0.0)
            || times.windows(2).any(|w| !(w[1] > w[0]))
            || !times[times.len() - 1].is_finite()
        {
            return Err(Error::InvalidParameter {
                name: "time grid",
                value: times[0],
                expected: "finite, positive, strictly increasing times",
            });
        }
        Ok(TimeGrid { times })
    }

    /// `steps` geometric steps from `START_FRACTION · end` to `end`.
    pub fn geometric(end: f64, steps: usize) -> Result<Self> {
        check_positive("T", end)?;
        Self::new(geometric_points(START_FRACTION * end, end, steps + 1))
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn start(&self) -> f64 {
        self.times[0]
    }

    pub fn end(&self) -> f64 {
        self.times[self.times.len() - 1]
    }

    pub fn steps(&self) -> usize {
        self.times.len() - 1
    }

    /// The leading times not exceeding `limit`.
    pub fn truncated(&self, limit: f64) -> Result<Self> {
        let keep = self.times.partition_point(|&t| t <= limit * (1.0 + 1e-12));
        Self::new(self.times[..keep].to_vec())
    }

    /// Every step split at its geometric midpoint.
    pub fn refined(&self) -> Self {
        let mut times = Vec::with_capacity(2 * self.times.len() - 1);
        for w in self.times.windows(2) {
            times.push(w[0]);
            times.push(libm::sqrt(w[0] * w[1]));
        }
        times.push(self.end());
        TimeGrid { times }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverSettings {
    pub tol: f64,
    pub max_iter: usize,
    pub blowup_cap: f64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            tol: 1e-6,
            max_iter: 200,
            blowup_cap: 1e8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceStatus {
    Converged,
    BlownUp,
    MaxIter,
}

impl TraceStatus {
    pub fn label(self) -> &'static str {
        match self {
            TraceStatus::Converged => "converged",
            TraceStatus::BlownUp => "blown_up",
            TraceStatus::MaxIter => "max_iter",
        }
    }
}

/// Snapshots and diagnostics of one solve.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveTrace {
    pub times: Vec<f64>,
    pub snapshots: Vec<RadialFunction>,
    pub sup_norms: Vec<f64>,
    pub lr_norms: Vec<f64>,
    /// `max_k ‖u^n(t_k) - u^{n-1}(t_k)‖_∞ / (1 + ‖u^n(t_k)‖_∞)` per Picard sweep.
    pub sweep_changes: Vec<f64>,
    pub iterations: usize,
    pub status: TraceStatus,
    /// `C_meas = max_k t_k^{ρ/2r} ‖u(t_k)‖_∞`
    pub decay_constant: f64,
    /// `max_k ‖u(t_k) - 𝔉(u)(t_k)‖_∞ / (1 + ‖u(t_k)‖_∞)`
    pub residual: f64,
    /// Largest increase `u^n - u^{n-1}` seen across Picard sweeps.
    pub monotone_defect: f64,
    /// Largest violation of `v <= u <= w`.
    pub sandwich_defect: f64,
    pub escape_time: Option<f64>,
    /// Bound on the Duhamel contribution from `(0, t_0]`, relative to `w`.
    pub startup_bound: Option<f64>,
    pub decay_exponent: f64,
    pub r: f64,
    pub initial: RadialFunction,
}

impl SolveTrace {
    fn build(
        spec: &ProblemSpec,
        times: &[f64],
        snapshots: Vec<RadialFunction>,
        initial: &RadialFunction,
        status: TraceStatus,
    ) -> Result<Self> {
        let times = times[..snapshots.len()].to_vec();
        let sup_norms: Vec<f64> = snapshots.iter().map(|u| u.sup_norm()).collect();
        let lr_norms = snapshots
            .iter()
            .map(|u| u.norm(spec.r))
            .collect::<Result<Vec<f64>>>()?;
        let exponent = spec.decay_exponent();
        let decay_constant = times
            .iter()
            .zip(&sup_norms)
            .map(|(&t, &s)| pow(t, exponent) * s)
            .fold(0.0, f64::max);
        Ok(SolveTrace {
            times,
            snapshots,
            sup_norms,
            lr_norms,
            sweep_changes: Vec::new(),
            iterations: 0,
            status,
            decay_constant,
            residual: f64::NAN,
            monotone_defect: 0.0,
            sandwich_defect: 0.0,
            escape_time: None,
            startup_bound: None,
            decay_exponent: exponent,
            r: spec.r,
            initial: initial.clone(),
        })
    }

    pub fn end(&self) -> f64 {
        self.times.last().copied().unwrap_or(0.0)
    }
}

/// `w(t_k) = A S(t_k)u_0` and `v = 0` or `v = -w`.
#[derive(Debug, Clone, PartialEq)]
pub struct SandwichPair {
    pub upper: Vec<RadialFunction>,
    pub lower: Vec<RadialFunction>,
    pub amplification: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Supersolution {
    pub pair: SandwichPair,
    /// The input grid cut at the admissible horizon.
    pub grid: TimeGrid,
    /// Largest input-grid time where the continuous margin is at most one.
    pub t_star: f64,
    /// Largest input-grid time where the discrete margin is at most one.
    pub t_star_discrete: f64,
    /// `(t_k, 1/A + (2r/ρ)(AC_0K^{1/r})^{2r/ρ} ∫_{z(t_k)}^∞ ...)` over the input grid.
    pub margin_curve: Vec<(f64, f64)>,
    /// `(t_k, 1/A + Σ_{j<k} Δt_j h(t_j) G(‖w_j‖_∞))` over the input grid.
    pub discrete_margin: Vec<(f64, f64)>,
    /// `max (𝔉(w) - w) / ‖w(t_k)‖_∞` over the admissible grid.
    pub max_defect: f64,
    pub verified: bool,
    pub c0: f64,
    pub startup_bound: f64,
    /// `S(t_0)u_0`
    pub start: RadialFunction,
}

fn weight_and_envelope(spec: &ProblemSpec) -> Result<()> {
    let flags = spec.nonlinearity.flags();
    if !(flags.zero_at_zero && flags.locally_lipschitz) {
        return Err(Error::HypothesisViolated(
            "g must be locally Lipschitz with g(0) = 0",
        ));
    }
    Ok(())
}

/// `∫_0^t h(σ) E(C σ^{-ρ/2r}) dσ` in the variable `z = C σ^{-ρ/2r}`.
fn singular_time_integral(
    spec: &ProblemSpec,
    c: f64,
    t: f64,
    envelope: impl Fn(f64) -> f64,
) -> f64 {
    let k = 2.0 * spec.r / spec.rho;
    let z = c * pow(t, -spec.rho / (2.0 * spec.r));
    let tail = improper_tail(
        |s| pow(s, -(1.0 + k)) * spec.weight.eval(pow(c / s, k)) * envelope(s),
        z,
        &TailOptions::default(),
    );
    if !tail.converged {
        return f64::INFINITY;
    }
    k * pow(c, k) * tail.value
}

/// Continuous admissibility margin at time `t`; the supersolution is valid while it is `<= 1`.
pub fn margin(spec: &ProblemSpec, c0: f64, amplification: f64, t: f64) -> Result<f64> {
    check_positive("t", t)?;
    let c = amplification * c0 * pow(spec.k, 1.0 / spec.r);
    let g = &spec.nonlinearity;
    Ok(1.0 / amplification
        + singular_time_integral(spec, c, t, |s| g.envelope_g(s).unwrap_or(f64::INFINITY)))
}

/// Largest `T <= t_max` with `margin(T) <= 1`.
pub fn admissible_horizon(
    spec: &ProblemSpec,
    c0: f64,
    amplification: f64,
    t_max: f64,
) -> Result<f64> {
    check_positive("T", t_max)?;
    if !(amplification > 1.0) {
        return Err(Error::InvalidParameter {
            name: "A",
            value: amplification,
            expected: "A > 1",
        });
    }
    if margin(spec, c0, amplification, t_max)? <= 1.0 {
        return Ok(t_max);
    }
    let (mut lo, mut hi) = (ln(t_max) - 40.0 * core::f64::consts::LN_10, ln(t_max));
    if margin(spec, c0, amplification, exp(lo))? > 1.0 {
        return Err(Error::NoAdmissibleTime);
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if margin(spec, c0, amplification, exp(mid))? <= 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(exp(lo))
}

fn nonlinear_source(
    g: &NonlinearitySpec,
    state: &RadialFunction,
    source: &RadialFunction,
    scale: f64,
) -> Result<RadialFunction> {
    let values: Vec<f64> = state
        .values()
        .iter()
        .zip(source.values())
        .map(|(&u, &v)| u + scale * g.eval(v))
        .collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            what: "Duhamel forcing",
        });
    }
    RadialFunction::new(state.grid().clone(), values, 0.0, state.grid().radius())
}

/// One Picard sweep `U_{k+1} = S(Δt_k)[U_k + Δt_k h(t_k) g(V_k)]`.
fn picard_sweep(
    spec: &ProblemSpec,
    engine: &SemigroupEngine,
    start: &RadialFunction,
    times: &[f64],
    source: &[RadialFunction],
) -> Result<Vec<RadialFunction>> {
    let mut out = Vec::with_capacity(times.len());
    out.push(start.clone());
    for k in 0..times.len() - 1 {
        let dt = times[k + 1] - times[k];
        let forced = nonlinear_source(
            &spec.nonlinearity,
            &out[k],
            &source[k],
            dt * spec.weight.eval(times[k]),
        )?;
        out.push(engine.apply(&forced, dt)?);
    }
    Ok(out)
}

fn sup_diff(a: &RadialFunction, b: &RadialFunction) -> f64 {
    a.values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn max_increase(next: &RadialFunction, prev: &RadialFunction) -> f64 {
    next.values()
        .iter()
        .zip(prev.values())
        .map(|(x, y)| x - y)
        .fold(0.0, f64::max)
}

fn relative_change(a: &[RadialFunction], b: &[RadialFunction]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| sup_diff(x, y) / (1.0 + x.sup_norm()))
        .fold(0.0, f64::max)
}

/// Relative slack granted to `𝔉(w) <= w`.
const SUPERSOLUTION_SLACK: f64 = 1e-4;

/// Build `w = A S(t)|u_0|` on `grid`, find the admissible horizon, and check
/// `𝔉(w, u_0) <= w` node-wise on it.
pub fn build_supersolution(
    spec: &ProblemSpec,
    engine: &SemigroupEngine,
    u0: &RadialFunction,
    grid: &TimeGrid,
    amplification: f64,
    c0: f64,
) -> Result<Supersolution> {
    spec.validate()?;
    weight_and_envelope(spec)?;
    check_positive("C0", c0)?;
    if !(amplification > 1.0) {
        return Err(Error::InvalidParameter {
            name: "A",
            value: amplification,
            expected: "A > 1",
        });
    }
    if !u0.is_nonnegative() {
        return Err(Error::HypothesisViolated(
            "initial data must be nonnegative",
        ));
    }
    let g = &spec.nonlinearity;
    let times = grid.times();
    let start = engine.apply(u0, times[0])?;
    let mut upper = Vec::with_capacity(times.len());
    upper.push(start.scaled(amplification));
    for k in 0..times.len() - 1 {
        let next = engine.apply(&upper[k], times[k + 1] - times[k])?;
        upper.push(next);
    }

    let margin_curve = times
        .iter()
        .map(|&t| margin(spec, c0, amplification, t).map(|m| (t, m)))
        .collect::<Result<Vec<_>>>()?;
    let mut discrete_margin = Vec::with_capacity(times.len());
    let mut acc = 1.0 / amplification;
    for k in 0..times.len() {
        discrete_margin.push((times[k], acc));
        if k + 1 < times.len() {
            acc += (times[k + 1] - times[k])
                * spec.weight.eval(times[k])
                * g.envelope_g(upper[k].sup_norm())?;
        }
    }
    let zero_data = u0.values().iter().all(|&v| v == 0.0);
    let last_ok =
        |curve: &[(f64, f64)]| curve.iter().take_while(|p| p.1 <= 1.0).last().map(|p| p.0);
    let (t_star, t_star_discrete) = if zero_data {
        (grid.end(), grid.end())
    } else {
        (
            last_ok(&margin_curve).ok_or(Error::NoAdmissibleTime)?,
            last_ok(&discrete_margin).ok_or(Error::NoAdmissibleTime)?,
        )
    };
    let admissible = grid
        .truncated(t_star.min(t_star_discrete))
        .map_err(|_| Error::NoAdmissibleTime)?;
    let n = admissible.times().len();
    upper.truncate(n);

    let image = picard_sweep(spec, engine, &start, admissible.times(), &upper)?;
    let mut max_defect = f64::NEG_INFINITY;
    let mut verified = true;
    for (fw, w) in image.iter().zip(&upper) {
        let scale = w.sup_norm();
        for (&a, &b) in fw.values().iter().zip(w.values()) {
            if a > b * (1.0 + SUPERSOLUTION_SLACK) + 1e-12 * scale {
                verified = false;
            }
            if scale > 0.0 {
                max_defect = max_defect.max((a - b) / scale);
            }
        }
    }
    if max_defect == f64::NEG_INFINITY {
        max_defect = 0.0;
    }
    let lower = if g.vanishes_on_negatives() {
        upper
            .iter()
            .map(|w| RadialFunction::zero(w.grid().clone()))
            .collect()
    } else {
        upper.iter().map(|w| w.scaled(-1.0)).collect()
    };
    let startup_bound = if zero_data {
        0.0
    } else {
        margin_curve[0].1 - 1.0 / amplification
    };
    Ok(Supersolution {
        pair: SandwichPair {
            upper,
            lower,
            amplification,
        },
        grid: admissible,
        t_star,
        t_star_discrete,
        margin_curve,
        discrete_margin,
        max_defect,
        verified,
        c0,
        startup_bound,
        start,
    })
}

/// Picard iteration `u^0 = w`, `u^n = 𝔉(u^{n-1}, u_0)` on the admissible grid.
pub fn monotone_iterate(
    spec: &ProblemSpec,
    engine: &SemigroupEngine,
    u0: &RadialFunction,
    supersolution: &Supersolution,
    settings: &SolverSettings,
) -> Result<SolveTrace> {
    check_positive("tol", settings.tol)?;
    let times = supersolution.grid.times();
    let start = &supersolution.start;
    let mut current = supersolution.pair.upper.clone();
    let mut changes = Vec::new();
    let mut monotone_defect: f64 = 0.0;
    let mut status = TraceStatus::MaxIter;
    for _ in 0..settings.max_iter {
        let next = match picard_sweep(spec, engine, start, times, &current) {
            Ok(next) => next,
            Err(Error::NonFinite { .. }) => {
                status = TraceStatus::BlownUp;
                break;
            }
            Err(e) => return Err(e),
        };
        for (a, b) in next.iter().zip(&current) {
            monotone_defect = monotone_defect.max(max_increase(a, b));
        }
        let change = relative_change(&next, &current);
        changes.push(change);
        current = next;
        if change < settings.tol {
            status = TraceStatus::Converged;
            break;
        }
    }
    let residual = match picard_sweep(spec, engine, start, times, &current) {
        Ok(image) => relative_change(&image, &current),
        Err(_) => f64::INFINITY,
    };
    let pair = &supersolution.pair;
    let mut sandwich_defect: f64 = 0.0;
    for ((u, w), v) in current.iter().zip(&pair.upper).zip(&pair.lower) {
        sandwich_defect = sandwich_defect
            .max(max_increase(u, w))
            .max(max_increase(v, u));
    }
    let mut trace = SolveTrace::build(spec, times, current, u0, status)?;
    trace.iterations = changes.len();
    trace.sweep_changes = changes;
    trace.residual = residual;
    trace.monotone_defect = monotone_defect;
    trace.sandwich_defect = sandwich_defect;
    trace.startup_bound = Some(supersolution.startup_bound);
    Ok(trace)
}

/// Forward sweep of the discrete mild equation, stopping once `‖u‖_∞ > blowup_cap`.
pub fn direct_mild_solve(
    spec: &ProblemSpec,
    engine: &SemigroupEngine,
    u0: &RadialFunction,
    grid: &TimeGrid,
    blowup_cap: f64,
) -> Result<SolveTrace> {
    check_positive("blowup_cap", blowup_cap)?;
    let times = grid.times();
    let mut states = Vec::with_capacity(times.len());
    states.push(engine.apply(u0, times[0])?);
    let mut escape = None;
    if states[0].sup_norm() > blowup_cap {
        escape = Some(times[0]);
    }
    let mut k = 0;
    while escape.is_none() && k + 1 < times.len() {
        let dt = times[k + 1] - times[k];
        let forced = nonlinear_source(
            &spec.nonlinearity,
            &states[k],
            &states[k],
            dt * spec.weight.eval(times[k]),
        );
        let next = match forced {
            Ok(f) => engine.apply(&f, dt)?,
            Err(Error::NonFinite { .. }) => {
                escape = Some(times[k + 1]);
                break;
            }
            Err(e) => return Err(e),
        };
        if !(next.sup_norm() <= blowup_cap) {
            escape = Some(times[k + 1]);
        }
        states.push(next);
        k += 1;
    }
    let status = if escape.is_some() {
        TraceStatus::BlownUp
    } else {
        TraceStatus::Converged
    };
    if escape.is_some() {
        // keep only the finite part of the trajectory
        while states.last().is_some_and(|s| !(s.sup_norm() <= blowup_cap)) {
            states.pop();
        }
    }
    let mut trace = SolveTrace::build(spec, times, states, u0, status)?;
    trace.iterations = 1;
    trace.escape_time = escape;
    trace.residual = 0.0;
    Ok(trace)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeRow {
    pub tau: f64,
    /// `‖S(τ)v_0‖_∞`
    pub sup_norm: f64,
    /// `∫_{‖S(τ)v_0‖_∞}^∞ dσ/f(σ)`
    pub tail: f64,
    /// `∫_0^τ h / tail`
    pub phi: f64,
    pub violated: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeReport {
    pub rows: Vec<ProbeRow>,
    pub phi_max: f64,
    /// Smallest probed `τ` with `Φ(τ) > 1`.
    pub violated_at: Option<f64>,
}

/// `Φ(τ) = ∫_0^τ h · (∫_{‖S(τ)v_0‖_∞}^∞ dσ/f(σ))^{-1}`. A nonnegative mild
/// solution on `(0, T)` forces `Φ(τ) <= 1` for every `τ < T`.
pub fn blowup_probe(
    spec: &ProblemSpec,
    engine: &SemigroupEngine,
    v0: &RadialFunction,
    taus: &[f64],
) -> Result<ProbeReport> {
    let f = &spec.nonlinearity;
    let flags = f.flags();
    if !(flags.convex_on_positives && flags.nondecreasing && flags.zero_at_zero) {
        return Err(Error::Inapplicable(
            "the probe needs a convex nondecreasing f with f(0) = 0",
        ));
    }
    if !v0.is_nonnegative() {
        return Err(Error::HypothesisViolated("probe data must be nonnegative"));
    }
    let mut rows = Vec::with_capacity(taus.len());
    for &tau in taus {
        check_positive("τ", tau)?;
        let sup_norm = engine.apply(v0, tau)?.sup_norm();
        if !(sup_norm > 0.0) {
            return Err(Error::Inapplicable("S(τ)v0 vanishes"));
        }
        let tail = f.osgood_tail(sup_norm)?;
        if !tail.converged {
            return Err(Error::Inapplicable("the Osgood integral of 1/f diverges"));
        }
        let phi = spec.weight.integral(tau) / tail.value;
        rows.push(ProbeRow {
            tau,
            sup_norm,
            tail: tail.value,
            phi,
            violated: phi > 1.0,
        });
    }
    let phi_max = rows.iter().map(|r| r.phi).fold(0.0, f64::max);
    let violated_at = rows
        .iter()
        .filter(|r| r.violated)
        .map(|r| r.tau)
        .fold(None, |m: Option<f64>, t| Some(m.map_or(t, |m| m.min(t))));
    Ok(ProbeReport {
        rows,
        phi_max,
        violated_at,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayCheck {
    pub c_meas: f64,
    pub bound: f64,
    pub pass: bool,
}

/// `C_meas <= A C_0 K^{1/r} (1 + 0.05)`.
pub fn decay_check(
    trace: &SolveTrace,
    spec: &ProblemSpec,
    amplification: f64,
    c0: f64,
) -> Result<DecayCheck> {
    if trace.status != TraceStatus::Converged {
        return Err(Error::TraceStatus(trace.status.label()));
    }
    let bound = amplification * c0 * pow(spec.k, 1.0 / spec.r) * 1.05;
    Ok(DecayCheck {
        c_meas: trace.decay_constant,
        bound,
        pass: trace.decay_constant <= bound,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GronwallCheck {
    /// `(t_k, ‖u(t_k) - v(t_k)‖_r)`
    pub lhs: Vec<(f64, f64)>,
    /// `(t_k, 1.05 ‖u_0 - v_0‖_r exp[∫_0^{t_k} L(C_1 σ^{-ρ/2r}) h(σ) dσ])`
    pub rhs: Vec<(f64, f64)>,
    pub pass: bool,
}

/// Compare two solutions against the Gronwall bound of the uniqueness proof.
pub fn gronwall_uniqueness_check(
    u: &SolveTrace,
    v: &SolveTrace,
    spec: &ProblemSpec,
    c1: f64,
) -> Result<GronwallCheck> {
    let def2 = check_def2(&spec.nonlinearity, &spec.weight, spec.r, spec.rho, c1)?;
    if !def2.pass {
        return Err(Error::Inapplicable(
            "the L-integral diverges; uniqueness is not covered",
        ));
    }
    for trace in [u, v] {
        if trace.status != TraceStatus::Converged {
            return Err(Error::TraceStatus(trace.status.label()));
        }
        if trace.decay_constant > c1 * 1.05 {
            return Err(Error::HypothesisViolated(
                "a trace leaves the class sup t^{ρ/2r}‖u‖_∞ <= C1",
            ));
        }
    }
    if u.times != v.times {
        return Err(Error::GridMismatch);
    }
    let d0 = u.initial.difference(&v.initial)?.norm(spec.r)?;
    let g = &spec.nonlinearity;
    let mut lhs = Vec::with_capacity(u.times.len());
    let mut rhs = Vec::with_capacity(u.times.len());
    let mut pass = true;
    for (k, &t) in u.times.iter().enumerate() {
        let diff = u.snapshots[k].difference(&v.snapshots[k])?.norm(spec.r)?;
        let exponent =
            singular_time_integral(spec, c1, t, |s| g.lipschitz(s).unwrap_or(f64::INFINITY));
        let bound = 1.05 * d0 * exp(exponent);
        pass &= diff <= bound;
        lhs.push((t, diff));
        rhs.push((t, bound));
    }
    Ok(GronwallCheck { lhs, rhs, pass })
}

#[allow(clippy::too_many_arguments)]
/// Existence pipeline for upper-class power data: horizon, grid,
/// supersolution, monotone iteration.
pub fn solve_existence(
    spec: &ProblemSpec,
    engine: &SemigroupEngine,
    u0: &RadialFunction,
    c0: f64,
    amplification: f64,
    t_max: f64,
    steps: usize,
    settings: &SolverSettings,
) -> Result<(Supersolution, SolveTrace)> {
    let horizon = admissible_horizon(spec, c0, amplification, t_max)?;
    let grid = TimeGrid::geometric(horizon, steps)?;
    let supersolution = build_supersolution(spec, engine, u0, &grid, amplification, c0)?;
    let trace = monotone_iterate(spec, engine, u0, &supersolution, settings)?;
    Ok((supersolution, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criteria::measure_c0;
    use crate::nonlinearity::WeightSpec;
    use crate::radial_field::{build_singular_data, DataSide, Domain};
    use alloc::sync::Arc;

    fn spec(rho: f64, g: NonlinearitySpec) -> ProblemSpec {
        ProblemSpec {
            dimension: 3,
            r: 1.0,
            rho,
            k: 1.0,
            a: 1.0,
            domain: Domain::WholeSpace,
            nonlinearity: g,
            weight: WeightSpec::One,
            side: DataSide::Upper,
        }
    }

    #[test]
    fn time_grid_shapes() {
        let grid = TimeGrid::geometric(1.0, 10).unwrap();
        assert_eq!(grid.steps(), 10);
        assert!((grid.start() - 1e-4).abs() < 1e-18);
        assert!((grid.end() - 1.0).abs() < 1e-15);
        assert_eq!(grid.refined().steps(), 20);
        assert_eq!(grid.truncated(0.05).unwrap().end(), grid.times()[6]);
        assert!(TimeGrid::new(alloc::vec![0.1, 0.1]).is_err());
        assert!(TimeGrid::new(alloc::vec![0.0, 0.1]).is_err());
    }

    #[test]
    fn zero_data_stays_zero() {
        let s = spec(0.5, NonlinearitySpec::power(3.0).unwrap());
        let engine = SemigroupEngine::for_problem(&s, 128).unwrap();
        let u0 = RadialFunction::zero(engine.grid().clone());
        let grid = TimeGrid::geometric(1.0, 20).unwrap();
        let sup = build_supersolution(&s, &engine, &u0, &grid, 2.0, 0.7).unwrap();
        assert_eq!(sup.grid.end(), 1.0);
        let trace = monotone_iterate(&s, &engine, &u0, &sup, &SolverSettings::default()).unwrap();
        assert_eq!(trace.status, TraceStatus::Converged);
        assert_eq!(trace.iterations, 1);
        assert!(trace.sup_norms.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn linear_equation_matches_exponential_factor() {
        let s = spec(0.5, NonlinearitySpec::linear(1.0).unwrap());
        assert!((admissible_horizon(&s, 0.7, 2.0, 10.0).unwrap() - 0.5).abs() < 1e-9);
        let grid = Arc::new(RadialGrid::new(3, 8.0, 512, 3.0).unwrap());
        let engine = SemigroupEngine::free_space(grid.clone());
        let u0 = RadialFunction::from_fn(grid, |x| exp(-x * x)).unwrap();
        let times = TimeGrid::geometric(0.5, 200).unwrap();
        let sup = build_supersolution(&s, &engine, &u0, &times, 2.0, 0.7).unwrap();
        assert!(sup.verified, "defect {}", sup.max_defect);
        let trace = monotone_iterate(&s, &engine, &u0, &sup, &SolverSettings::default()).unwrap();
        assert_eq!(trace.status, TraceStatus::Converged);
        for (k, &t) in trace.times.iter().enumerate().step_by(20) {
            let free = engine.apply(&u0, t).unwrap();
            let expected = exp(t) * free.values()[0];
            let got = trace.snapshots[k].values()[0];
            assert!(
                (got / expected - 1.0).abs() < 0.02,
                "t={t}: {got} vs {expected}"
            );
        }
    }

    use crate::radial_field::RadialGrid;

    #[test]
    fn power_problem_converges_monotonically() {
        let s = spec(0.5, NonlinearitySpec::power(3.0).unwrap());
        let engine = SemigroupEngine::for_problem(&s, 256).unwrap();
        let u0 = build_singular_data(&s, engine.grid().clone()).unwrap();
        let c0 = measure_c0(3, 0.5, 256).unwrap();
        let settings = SolverSettings::default();
        let (sup, trace) = solve_existence(&s, &engine, &u0, c0, 2.0, 1.0, 100, &settings).unwrap();
        assert!(sup.verified, "defect {}", sup.max_defect);
        assert_eq!(trace.status, TraceStatus::Converged);
        assert!(
            trace.monotone_defect <= 1e-10 * (1.0 + trace.sup_norms[0]),
            "{}",
            trace.monotone_defect
        );
        assert!(trace.sandwich_defect <= 1e-10 * (1.0 + trace.sup_norms[0]));
        assert!(trace.residual <= 10.0 * settings.tol, "{}", trace.residual);
        let decay = decay_check(&trace, &s, 2.0, c0).unwrap();
        assert!(decay.pass, "{decay:?}");
    }

    #[test]
    fn probe_requires_convexity_and_osgood() {
        let s = spec(1.25, NonlinearitySpec::linear(1.0).unwrap());
        let engine = SemigroupEngine::for_problem(&s, 128).unwrap();
        let u0 = build_singular_data(&s, engine.grid().clone()).unwrap();
        assert!(matches!(
            blowup_probe(&s, &engine, &u0, &[1e-3]),
            Err(Error::Inapplicable(_))
        ));
        let s = spec(2.5, NonlinearitySpec::power(2.0).unwrap());
        let u0 = build_singular_data(&s, engine.grid().clone()).unwrap();
        let report = blowup_probe(&s, &engine, &u0, &[1e-6, 1e-4, 1e-2]).unwrap();
        assert!(report.violated_at.is_some(), "{report:?}");
    }

    #[test]
    fn direct_solve_escapes_for_supercritical_data() {
        let s = spec(2.5, NonlinearitySpec::power(2.0).unwrap());
        let engine = SemigroupEngine::for_problem(&s, 256).unwrap();
        let u0 = build_singular_data(&s, engine.grid().clone()).unwrap();
        let grid = TimeGrid::geometric(1.0, 200).unwrap();
        let trace = direct_mild_solve(&s, &engine, &u0, &grid, 1e8).unwrap();
        assert_eq!(trace.status, TraceStatus::BlownUp);
        assert!(trace.escape_time.is_some());
        assert!(matches!(
            decay_check(&trace, &s, 2.0, 1.0),
            Err(Error::TraceStatus(_))
        ));
    }

    #[test]
    fn gronwall_bound_holds_for_nearby_data() {
        let s = spec(0.5, NonlinearitySpec::odd_power(3.0).unwrap());
        let engine = SemigroupEngine::for_problem(&s, 256).unwrap();
        let c0 = measure_c0(3, 0.5, 256).unwrap();
        let u0 = build_singular_data(&s, engine.grid().clone()).unwrap();
        let v0 = u0.scaled(0.9);
        let settings = SolverSettings::default();
        let horizon = admissible_horizon(&s, c0, 2.0, 1.0).unwrap();
        let grid = TimeGrid::geometric(horizon, 60).unwrap();
        let su = build_supersolution(&s, &engine, &u0, &grid, 2.0, c0).unwrap();
        let sv = build_supersolution(&s, &engine, &v0, &su.grid, 2.0, c0).unwrap();
        let u = monotone_iterate(&s, &engine, &u0, &su, &settings).unwrap();
        let v = monotone_iterate(&s, &engine, &v0, &sv, &settings).unwrap();
        assert_eq!(u.times, v.times);
        let check = gronwall_uniqueness_check(&u, &v, &s, 2.0 * c0).unwrap();
        assert!(check.pass, "{check:?}");
        let p = spec(0.5, NonlinearitySpec::power(5.0).unwrap());
        assert!(matches!(
            gronwall_uniqueness_check(&u, &v, &p, 2.0 * c0),
            Err(Error::Inapplicable(_))
        ));
    }
}
