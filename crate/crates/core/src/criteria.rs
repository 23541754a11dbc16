//! Integral and limit criteria of the existence, non-existence and
//! uniqueness theorems, and the decision tree that turns a problem
//! instance into a verdict backed by certificates.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::error::{check_positive, Error, Result};
use crate::math::{least_squares_line, ln, pow};
use crate::nonlinearity::{ExponentMethod, Family, NonlinearitySpec, WeightSpec};
use crate::quad::{improper_tail, TailIntegral, TailOptions};
use crate::radial_field::{DataSide, ProblemSpec, RadialGrid};
use crate::semigroup::{estimate_lemma2_constant, Lemma2Options, SemigroupEngine};

/// Existence for upper-class data with `h = 1`, read from `p_inf`.
pub const UNWEIGHTED_EXISTENCE: &str = "unweighted-existence";
/// Existence for upper-class data with a general weight, via the `G`-integral.
pub const WEIGHTED_EXISTENCE: &str = "weighted-existence";
/// Non-existence for lower-class data with `h = 1`, read from `p_sup`.
pub const UNWEIGHTED_NONEXISTENCE: &str = "unweighted-nonexistence";
/// Non-existence for lower-class data with a general weight.
pub const WEIGHTED_NONEXISTENCE: &str = "weighted-nonexistence";
/// Uniqueness in the class `sup t^{ρ/2r}‖u(t)‖_∞ <= C_1`, via the `L`-integral.
pub const UNIQUENESS: &str = "uniqueness";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalValues {
    /// `1 + 2r/N`
    pub p_star: f64,
    /// `2r/(q-1)`
    pub rho_star: f64,
    /// `2r(β+1)/(q-1)`
    pub rho_star_weighted: f64,
}

pub fn critical_values(dimension: usize, r: f64, q: f64, beta: f64) -> Result<CriticalValues> {
    if dimension == 0 {
        return Err(Error::InvalidParameter {
            name: "N",
            value: 0.0,
            expected: "N >= 1",
        });
    }
    if !(r >= 1.0) {
        return Err(Error::InvalidParameter {
            name: "r",
            value: r,
            expected: "r >= 1",
        });
    }
    if !(q > 1.0) {
        return Err(Error::InvalidParameter {
            name: "q",
            value: q,
            expected: "q > 1",
        });
    }
    if !(beta > -1.0) {
        return Err(Error::InvalidParameter {
            name: "beta",
            value: beta,
            expected: "beta > -1",
        });
    }
    Ok(CriticalValues {
        p_star: 1.0 + 2.0 * r / dimension as f64,
        rho_star: 2.0 * r / (q - 1.0),
        rho_star_weighted: 2.0 * r * (beta + 1.0) / (q - 1.0),
    })
}

/// `p* = 1 + 2r/N`.
pub fn p_star(dimension: usize, r: f64) -> f64 {
    1.0 + 2.0 * r / dimension as f64
}

#[derive(Debug, Clone, PartialEq)]
pub enum LaisterDetail {
    /// `r > 1`: whether `limsup t^{-p*} f(t) < ∞`.
    Limsup {
        bounded: bool,
        method: ExponentMethod,
    },
    /// `r = 1`: `∫_1^∞ σ^{-p*} F(σ) dσ`.
    Integral(TailIntegral),
}

#[derive(Debug, Clone, PartialEq)]
pub struct LaisterCheck {
    pub pass: bool,
    pub detail: LaisterDetail,
}

/// The condition under which every nonnegative `L^r` datum has a local solution.
pub fn check_laister(f: &NonlinearitySpec, r: f64, dimension: usize) -> Result<LaisterCheck> {
    if !(r >= 1.0) {
        return Err(Error::InvalidParameter {
            name: "r",
            value: r,
            expected: "r >= 1",
        });
    }
    let p = p_star(dimension, r);
    if r > 1.0 {
        let (bounded, method) = limsup_bounded(f, p)?;
        return Ok(LaisterCheck {
            pass: bounded,
            detail: LaisterDetail::Limsup { bounded, method },
        });
    }
    let tail = improper_tail(
        |s| pow(s, -p) * f.envelope_f(s, 1.0).unwrap_or(f64::INFINITY),
        1.0,
        &TailOptions::default(),
    );
    Ok(LaisterCheck {
        pass: tail.converged,
        detail: LaisterDetail::Integral(tail),
    })
}

/// Whether `t^{-p} f(t)` stays bounded as `t → ∞`.
fn limsup_bounded(f: &NonlinearitySpec, p: f64) -> Result<(bool, ExponentMethod)> {
    let exact = |b| Ok((b, ExponentMethod::Exact));
    match &f.family {
        Family::Power { q } => exact(*q <= p),
        Family::OddPower { p: q } => exact(*q <= p),
        // the logarithmic factor is unbounded, so equality fails too
        Family::LogPower { q, .. } => exact(*q < p),
        Family::Exponential { .. } => exact(false),
        Family::Linear { .. } => exact(p >= 1.0),
        Family::Tabulated(_) => {
            let g = f.growth_exponents_numeric(p)?;
            Ok((g.slope <= p + g.band, ExponentMethod::Heuristic))
        }
    }
}

/// `∫_1^∞ σ^{-(1+2r/ρ)} h(c σ^{-2r/ρ}) E(σ) dσ` for an envelope `E`.
fn weighted_envelope_integral(
    envelope: impl Fn(f64) -> f64,
    h: &WeightSpec,
    r: f64,
    rho: f64,
    c: f64,
) -> TailIntegral {
    let k = 2.0 * r / rho;
    improper_tail(
        |s| pow(s, -(1.0 + k)) * h.eval(c * pow(s, -k)) * envelope(s),
        1.0,
        &TailOptions::default(),
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegralCheck {
    pub pass: bool,
    pub integral: TailIntegral,
}

fn check_weight(h: &WeightSpec) -> Result<()> {
    if h.min_value() < 0.0 {
        return Err(Error::HypothesisViolated(
            "the weight h must be nonnegative",
        ));
    }
    Ok(())
}

/// `∫_1^∞ σ^{-(1+2r/ρ)} h((A C_0 K^{1/r})^{2r/ρ} σ^{-2r/ρ}) G(σ) dσ < ∞`.
pub fn check_h4(
    g: &NonlinearitySpec,
    h: &WeightSpec,
    r: f64,
    rho: f64,
    amplification: f64,
    c0: f64,
    k: f64,
) -> Result<IntegralCheck> {
    check_weight(h)?;
    check_positive("rho", rho)?;
    check_positive("C0", c0)?;
    check_positive("K", k)?;
    if !(amplification > 1.0) {
        return Err(Error::InvalidParameter {
            name: "A",
            value: amplification,
            expected: "A > 1",
        });
    }
    let c = pow(amplification * c0 * pow(k, 1.0 / r), 2.0 * r / rho);
    let integral =
        weighted_envelope_integral(|s| g.envelope_g(s).unwrap_or(f64::INFINITY), h, r, rho, c);
    Ok(IntegralCheck {
        pass: integral.converged,
        integral,
    })
}

/// `∫_1^∞ σ^{-(1+2r/ρ)} h((σ/C_1)^{-2r/ρ}) L(σ) dσ < ∞`.
pub fn check_def2(
    g: &NonlinearitySpec,
    h: &WeightSpec,
    r: f64,
    rho: f64,
    c1: f64,
) -> Result<IntegralCheck> {
    check_weight(h)?;
    check_positive("rho", rho)?;
    check_positive("C1", c1)?;
    if !(g.flags().locally_lipschitz && g.flags().zero_at_zero) {
        return Err(Error::HypothesisViolated(
            "g must be locally Lipschitz with g(0) = 0",
        ));
    }
    let c = pow(c1, 2.0 * r / rho);
    let integral =
        weighted_envelope_integral(|s| g.lipschitz(s).unwrap_or(f64::INFINITY), h, r, rho, c);
    Ok(IntegralCheck {
        pass: integral.converged,
        integral,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlowupWeightCheck {
    pub holds: bool,
    /// `κ = ρ(p_sup - 1 - ε)/2r`
    pub kappa: f64,
    /// `β + 1 - κ` for power weights, or the fitted log-log slope of the
    /// samples; the limsup is infinite when it is negative.
    pub exponent: Option<f64>,
    /// Last sampled `t^{-κ} ∫_0^t h` (sampled path only).
    pub last_sample: Option<f64>,
    pub heuristic: bool,
}

/// `limsup_{t→0+} t^{-ρ(p_sup-1-ε)/2r} ∫_0^t h = ∞`.
pub fn check_blowup_weight(
    h: &WeightSpec,
    r: f64,
    rho: f64,
    p_sup: f64,
    eps: f64,
) -> Result<BlowupWeightCheck> {
    check_weight(h)?;
    if !p_sup.is_finite() {
        return Err(Error::Inapplicable(
            "the weight criterion needs a finite p_sup",
        ));
    }
    if !(eps > 0.0 && eps < p_sup - 1.0) {
        return Err(Error::InvalidParameter {
            name: "ε",
            value: eps,
            expected: "0 < ε < p_sup - 1",
        });
    }
    let kappa = rho * (p_sup - 1.0 - eps) / (2.0 * r);
    if let Some(beta) = h.power_exponent() {
        let exponent = beta + 1.0 - kappa;
        return Ok(BlowupWeightCheck {
            holds: exponent < 0.0,
            kappa,
            exponent: Some(exponent),
            last_sample: None,
            heuristic: false,
        });
    }
    // sampled path: t = 10^{-k}, k = 1..8; growth is read from the slope of the last five samples
    let times: Vec<f64> = (1..=8).map(|k| pow(10.0, -(k as f64))).collect();
    let samples: Vec<f64> = times
        .iter()
        .map(|&t| pow(t, -kappa) * h.integral(t))
        .collect();
    let tail = &samples[3..];
    let growing = tail.iter().all(|v| *v > 0.0) && tail.windows(2).all(|w| w[1] >= w[0]);
    let exponent = if growing {
        let xs: Vec<f64> = times[3..].iter().map(|&t| ln(t)).collect();
        let ys: Vec<f64> = tail.iter().map(|&v| ln(v)).collect();
        Some(least_squares_line(&xs, &ys).0)
    } else {
        None
    };
    let holds = exponent.is_some_and(|e| e < -SAMPLED_GROWTH_MARGIN);
    Ok(BlowupWeightCheck {
        holds,
        kappa,
        exponent,
        last_sample: Some(samples[7]),
        heuristic: true,
    })
}

/// The sampled weight criterion needs `t^{-κ}∫_0^t h` to grow at least like `t^{-0.05}`.
const SAMPLED_GROWTH_MARGIN: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Existence {
    Predicted,
    Excluded,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Uniqueness {
    Predicted,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub criterion: &'static str,
    pub theorem: &'static str,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
    /// Rests on a finite-window estimate rather than closed-form metadata.
    pub heuristic: bool,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub existence: Existence,
    pub uniqueness: Uniqueness,
    pub applied_theorem: Option<&'static str>,
    pub certificates: Vec<Certificate>,
    pub p_star: f64,
    /// `2r/(p_inf - 1)` when `p_inf` exists.
    pub rho_star: Option<f64>,
    /// `2r(β+1)/(p_inf - 1)` for power weights.
    pub rho_star_weighted: Option<f64>,
    pub c0: f64,
    pub c1: f64,
    pub amplification: f64,
}

/// Where the decay constant `C_0` of `‖S(t)u_0‖_∞ <= C_0 K^{1/r} t^{-ρ/2r}` comes from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum C0Source {
    /// Measured by the free-space engine on a grid with this many nodes.
    Measured {
        count: usize,
    },
    Given(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifyOptions {
    pub amplification: f64,
    pub c0: C0Source,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions {
            amplification: 2.0,
            c0: C0Source::Measured { count: 512 },
        }
    }
}

/// Measured decay constant for `γ = ρ/r` with `q_1 = q_2 = ∞`.
pub fn measure_c0(dimension: usize, gamma: f64, count: usize) -> Result<f64> {
    let grid = Arc::new(RadialGrid::with_breakpoint(
        dimension, 8.0, count, 3.0, 1.0,
    )?);
    let engine = SemigroupEngine::free_space(grid);
    Ok(estimate_lemma2_constant(
        &engine,
        gamma,
        f64::INFINITY,
        f64::INFINITY,
        &Lemma2Options::default(),
    )?
    .c0_hat)
}

/// Relative width of the undecided band around a heuristic threshold.
const HEURISTIC_BAND: f64 = 0.05;

fn below(value: f64, threshold: f64, heuristic: bool) -> bool {
    if heuristic {
        value < threshold * (1.0 - HEURISTIC_BAND)
    } else {
        value < threshold
    }
}

fn above(value: f64, threshold: f64, heuristic: bool) -> bool {
    if heuristic {
        value > threshold * (1.0 + HEURISTIC_BAND)
    } else {
        value > threshold
    }
}

/// Run the decision tree on a validated problem.
pub fn classify(spec: &ProblemSpec, options: &ClassifyOptions) -> Result<Verdict> {
    spec.validate()?;
    let (r, rho, n) = (spec.r, spec.rho, spec.dimension);
    let amplification = options.amplification;
    if !(amplification > 1.0) {
        return Err(Error::InvalidParameter {
            name: "A",
            value: amplification,
            expected: "A > 1",
        });
    }
    let g = &spec.nonlinearity;
    let h = &spec.weight;
    let flags = g.flags();
    let p_star = p_star(n, r);
    let growth = g.growth_exponents(p_star)?;
    let heuristic = growth.method == ExponentMethod::Heuristic;
    let c0 = match options.c0 {
        C0Source::Given(c) => {
            check_positive("C0", c)?;
            c
        }
        C0Source::Measured { count } => measure_c0(n, rho / r, count)?,
    };
    let c1 = amplification * c0 * pow(spec.k, 1.0 / r);
    let rho_star = growth.p_inf.map(|p| 2.0 * r / (p - 1.0));
    let rho_star_weighted =
        rho_star.and_then(|rs| h.power_exponent().map(|beta| rs * (beta + 1.0)));

    let mut certificates = Vec::new();
    let mut existence = Existence::Inconclusive;
    let mut applied = None;
    let structural = flags.convex_on_positives && flags.nondecreasing && flags.zero_at_zero;

    match spec.side {
        DataSide::Upper => {
            if h.is_one() && structural {
                if let Some(threshold) = rho_star {
                    let pass = below(rho, threshold, heuristic);
                    certificates.push(Certificate {
                        criterion: "rho-below-critical",
                        theorem: UNWEIGHTED_EXISTENCE,
                        value: rho,
                        threshold,
                        pass,
                        heuristic,
                        note: format!("p_inf = {}", growth.p_inf.unwrap_or(f64::NAN)),
                    });
                    if pass {
                        existence = Existence::Predicted;
                        applied = Some(UNWEIGHTED_EXISTENCE);
                    }
                }
            }
            if existence == Existence::Inconclusive && flags.zero_at_zero && flags.locally_lipschitz
            {
                let check = check_h4(g, h, r, rho, amplification, c0, spec.k)?;
                certificates.push(Certificate {
                    criterion: "supersolution-integral",
                    theorem: WEIGHTED_EXISTENCE,
                    value: check.integral.exponent,
                    threshold: -1.0 - TailOptions::default().margin,
                    pass: check.pass,
                    heuristic: true,
                    note: format!("integral = {}", check.integral.value),
                });
                if check.pass {
                    existence = Existence::Predicted;
                    applied = Some(WEIGHTED_EXISTENCE);
                }
            }
        }
        DataSide::Lower => {
            if h.is_one() && structural {
                if let Some(p_sup) = growth.p_sup {
                    let threshold = if p_sup.is_infinite() {
                        0.0
                    } else {
                        2.0 * r / (p_sup - 1.0)
                    };
                    let pass = above(rho, threshold, heuristic) && rho < n as f64;
                    certificates.push(Certificate {
                        criterion: "rho-above-critical",
                        theorem: UNWEIGHTED_NONEXISTENCE,
                        value: rho,
                        threshold,
                        pass,
                        heuristic,
                        note: format!("p_sup = {p_sup}"),
                    });
                    if pass {
                        existence = Existence::Excluded;
                        applied = Some(UNWEIGHTED_NONEXISTENCE);
                    }
                }
            }
            if existence == Existence::Inconclusive && structural {
                if let Some(p_sup) = growth.p_sup.filter(|p| p.is_finite()) {
                    let mut best: Option<(f64, BlowupWeightCheck)> = None;
                    for k in 1..=10 {
                        let eps = (p_sup - 1.0) * pow(2.0, -(k as f64));
                        let check = check_blowup_weight(h, r, rho, p_sup, eps)?;
                        let better = best.map_or(true, |(_, b)| {
                            !b.holds && (check.holds || check.kappa > b.kappa)
                        });
                        if better {
                            best = Some((eps, check));
                        }
                        if check.holds {
                            break;
                        }
                    }
                    let (eps, check) = best.expect("at least one ε is tried");
                    let holds = check.holds
                        && !(heuristic && check.exponent.is_some_and(|e| e > -HEURISTIC_BAND));
                    certificates.push(Certificate {
                        criterion: "blowup-weight",
                        theorem: WEIGHTED_NONEXISTENCE,
                        value: check.exponent.unwrap_or(f64::NAN),
                        threshold: 0.0,
                        pass: holds,
                        heuristic: heuristic || check.heuristic,
                        note: format!("ε = {eps}, κ = {}", check.kappa),
                    });
                    if holds {
                        existence = Existence::Excluded;
                        applied = Some(WEIGHTED_NONEXISTENCE);
                    }
                }
            }
        }
    }

    let mut uniqueness = Uniqueness::Inconclusive;
    if existence == Existence::Predicted && flags.locally_lipschitz && flags.zero_at_zero {
        let check = check_def2(g, h, r, rho, c1)?;
        certificates.push(Certificate {
            criterion: "lipschitz-integral",
            theorem: UNIQUENESS,
            value: check.integral.exponent,
            threshold: -1.0 - TailOptions::default().margin,
            pass: check.pass,
            heuristic: true,
            note: format!("C1 = {c1}"),
        });
        if check.pass {
            uniqueness = Uniqueness::Predicted;
        }
    }
    if certificates.is_empty() {
        certificates.push(Certificate {
            criterion: "hypotheses",
            theorem: match spec.side {
                DataSide::Upper => WEIGHTED_EXISTENCE,
                DataSide::Lower => WEIGHTED_NONEXISTENCE,
            },
            value: f64::NAN,
            threshold: f64::NAN,
            pass: false,
            heuristic: false,
            note: String::from("structural hypotheses on g or h not met"),
        });
    }
    Ok(Verdict {
        existence,
        uniqueness,
        applied_theorem: applied,
        certificates,
        p_star,
        rho_star,
        rho_star_weighted,
        c0,
        c1,
        amplification,
    })
}
