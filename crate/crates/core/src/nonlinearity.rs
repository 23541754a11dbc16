//! Nonlinearity and time-weight families.
//!
//! A [`NonlinearitySpec`] describes the source term `g`. Families defined by
//! a formula on `[0, ∞)` (power, exponential, log-power) are extended to the
//! negative axis by zero, `g(t) = 0` for `t <= 0`; the odd power and linear
//! families are odd. Tabulated nonlinearities are piecewise linear through
//! their samples on the whole real line.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{exp, expm1, geometric_points, least_squares_line, ln, log1p, pow};
use crate::quad::{improper_tail, TailIntegral, TailOptions};

/// Piecewise-linear samples `(t_i, y_i)` with strictly increasing `t_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    points: Vec<(f64, f64)>,
}

impl Table {
    pub fn new(mut points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::Parse(
                "a table needs at least two samples".to_string(),
            ));
        }
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        for w in points.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(Error::Parse("table abscissae must be distinct".to_string()));
            }
        }
        if points.iter().any(|(t, y)| !t.is_finite() || !y.is_finite()) {
            return Err(Error::NonFinite {
                what: "table samples",
            });
        }
        Ok(Table { points })
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    /// Linear interpolation; linear extrapolation with the end-segment slopes.
    pub fn eval(&self, t: f64) -> f64 {
        let p = &self.points;
        let i = match p.binary_search_by(|q| q.0.total_cmp(&t)) {
            Ok(i) => return p[i].1,
            Err(i) => i.clamp(1, p.len() - 1),
        };
        let (t0, y0) = p[i - 1];
        let (t1, y1) = p[i];
        y0 + (y1 - y0) * (t - t0) / (t1 - t0)
    }

    fn slopes(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.points
            .windows(2)
            .map(|w| (w[0].0, w[1].0, (w[1].1 - w[0].1) / (w[1].0 - w[0].0)))
    }
}

/// The functional form of a nonlinearity.
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// `t^q` for `t > 0`, zero for `t <= 0`.
    Power {
        q: f64,
    },
    /// `|t|^{p-1} t`.
    OddPower {
        p: f64,
    },
    /// `e^{αt} - 1` for `t > 0`, zero for `t <= 0`.
    Exponential {
        alpha: f64,
    },
    /// `(1+t)^q [ln(1+t)]^s` for `t > 0`, zero for `t <= 0`.
    LogPower {
        q: f64,
        s: f64,
    },
    /// `c t`.
    Linear {
        slope: f64,
    },
    Tabulated(Table),
}

/// Structural properties the theorems' hypotheses refer to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Flags {
    pub convex_on_positives: bool,
    pub nondecreasing: bool,
    pub zero_at_zero: bool,
    pub locally_lipschitz: bool,
}

/// Exact polynomial growth order when the family determines it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GrowthOrder {
    /// `f(t)` grows like `t^d` up to slowly varying factors.
    Polynomial(f64),
    /// Faster than every power.
    SuperPolynomial,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExponentMethod {
    /// Read from the family's closed form.
    Exact,
    /// Log-log slope fit on a finite window; cannot certify a limsup.
    Heuristic,
}

/// `p_inf = inf{p > p*: limsup t^{-p} f(t) < ∞}` and
/// `p_sup = sup{p > p*: liminf t^{-p} f(t) > 0}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthExponents {
    /// `None` when no power bounds `f` (super-polynomial growth).
    pub p_inf: Option<f64>,
    /// `None` when the defining set is empty; `+∞` for super-polynomial growth.
    pub p_sup: Option<f64>,
    pub method: ExponentMethod,
    /// Fitted log-log slope (heuristic path) or the exact order.
    pub slope: f64,
    /// Spread of local slopes around the fit (zero for exact metadata).
    pub band: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NonlinearitySpec {
    pub family: Family,
}

impl NonlinearitySpec {
    pub fn power(q: f64) -> Result<Self> {
        if !(q > 1.0 && q.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "q",
                value: q,
                expected: "q > 1",
            });
        }
        Ok(Self {
            family: Family::Power { q },
        })
    }

    pub fn odd_power(p: f64) -> Result<Self> {
        if !(p > 1.0 && p.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "p",
                value: p,
                expected: "p > 1",
            });
        }
        Ok(Self {
            family: Family::OddPower { p },
        })
    }

    pub fn exponential(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "alpha",
                value: alpha,
                expected: "alpha > 0",
            });
        }
        Ok(Self {
            family: Family::Exponential { alpha },
        })
    }

    pub fn log_power(q: f64, s: f64) -> Result<Self> {
        if !(q > 1.0 && q.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "q",
                value: q,
                expected: "q > 1",
            });
        }
        if !(s >= 1.0 && s.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "s",
                value: s,
                expected: "s >= 1",
            });
        }
        Ok(Self {
            family: Family::LogPower { q, s },
        })
    }

    pub fn linear(slope: f64) -> Result<Self> {
        if !slope.is_finite() {
            return Err(Error::NonFinite {
                what: "linear slope",
            });
        }
        Ok(Self {
            family: Family::Linear { slope },
        })
    }

    pub fn tabulated(points: Vec<(f64, f64)>) -> Result<Self> {
        Ok(Self {
            family: Family::Tabulated(Table::new(points)?),
        })
    }

    /// Parse `power:q=3`, `oddpow:p=3`, `exp:alpha=1`, `logpow:q=5,s=2`,
    /// `linear:c=1` or `table:0=0,1=1,2=8`.
    pub fn parse(text: &str) -> Result<Self> {
        let (kind, args) = split_kind(text);
        match kind {
            "power" | "pow" => Self::power(param(&args, "q")?),
            "oddpow" => Self::odd_power(param(&args, "p")?),
            "exp" => Self::exponential(param(&args, "alpha")?),
            "logpow" => Self::log_power(param(&args, "q")?, param(&args, "s")?),
            "linear" => Self::linear(param(&args, "c")?),
            "table" => Self::tabulated(table_points(&args)?),
            _ => Err(Error::Parse(format!("unknown nonlinearity '{text}'"))),
        }
    }

    /// Canonical config string, inverse of [`parse`](Self::parse).
    pub fn label(&self) -> String {
        match &self.family {
            Family::Power { q } => format!("power:q={q}"),
            Family::OddPower { p } => format!("oddpow:p={p}"),
            Family::Exponential { alpha } => format!("exp:alpha={alpha}"),
            Family::LogPower { q, s } => format!("logpow:q={q},s={s}"),
            Family::Linear { slope } => format!("linear:c={slope}"),
            Family::Tabulated(t) => {
                let body: Vec<String> =
                    t.points().iter().map(|(x, y)| format!("{x}={y}")).collect();
                format!("table:{}", body.join(","))
            }
        }
    }

    /// `g(t)` on the whole real line.
    pub fn eval(&self, t: f64) -> f64 {
        match &self.family {
            Family::Power { q } => {
                if t > 0.0 {
                    pow(t, *q)
                } else {
                    0.0
                }
            }
            Family::OddPower { p } => t.signum() * pow(t.abs(), *p),
            Family::Exponential { alpha } => {
                if t > 0.0 {
                    expm1(alpha * t)
                } else {
                    0.0
                }
            }
            Family::LogPower { q, s } => {
                if t > 0.0 {
                    pow(1.0 + t, *q) * pow(log1p(t), *s)
                } else {
                    0.0
                }
            }
            Family::Linear { slope } => slope * t,
            Family::Tabulated(table) => table.eval(t),
        }
    }

    /// `ln g(t)` for large positive `t`, without overflow.
    pub fn ln_eval(&self, t: f64) -> f64 {
        match &self.family {
            Family::Power { q } => q * ln(t),
            Family::OddPower { p } => p * ln(t),
            Family::Exponential { alpha } => alpha * t + ln(-expm1(-alpha * t)),
            Family::LogPower { q, s } => q * log1p(t) + s * ln(log1p(t)),
            Family::Linear { slope } => ln(*slope) + ln(t),
            Family::Tabulated(table) => ln(table.eval(t)),
        }
    }

    pub fn flags(&self) -> Flags {
        match &self.family {
            Family::Power { .. }
            | Family::OddPower { .. }
            | Family::Exponential { .. }
            | Family::LogPower { .. } => Flags {
                convex_on_positives: true,
                nondecreasing: true,
                zero_at_zero: true,
                locally_lipschitz: true,
            },
            Family::Linear { slope } => Flags {
                convex_on_positives: true,
                nondecreasing: *slope >= 0.0,
                zero_at_zero: true,
                locally_lipschitz: true,
            },
            Family::Tabulated(table) => {
                let slopes: Vec<(f64, f64, f64)> = table.slopes().collect();
                let nondecreasing = slopes.iter().all(|s| s.2 >= 0.0);
                // convexity on [0, ∞): slopes of segments reaching into t > 0 nondecreasing
                let positive: Vec<f64> = slopes.iter().filter(|s| s.1 > 0.0).map(|s| s.2).collect();
                let convex = positive.windows(2).all(|w| w[1] >= w[0] - 1e-12);
                Flags {
                    convex_on_positives: convex,
                    nondecreasing,
                    zero_at_zero: table.eval(0.0).abs() < 1e-14,
                    locally_lipschitz: true,
                }
            }
        }
    }

    /// `g(t) = 0` for every `t <= 0`, so `v = 0` is a subsolution for nonnegative data.
    pub fn vanishes_on_negatives(&self) -> bool {
        match &self.family {
            Family::Power { .. } | Family::Exponential { .. } | Family::LogPower { .. } => true,
            Family::OddPower { .. } | Family::Linear { .. } => false,
            Family::Tabulated(table) => {
                // linear extrapolation below the table is flat only if the first segment is
                let nonpositive: Vec<f64> = table
                    .points()
                    .iter()
                    .filter(|p| p.0 <= 0.0)
                    .map(|p| p.1)
                    .collect();
                nonpositive.len() >= 2 && nonpositive.iter().all(|&y| y == 0.0)
            }
        }
    }

    /// Growth order from the closed form, when the family has one.
    pub fn exact_growth(&self) -> Option<GrowthOrder> {
        match &self.family {
            Family::Power { q } => Some(GrowthOrder::Polynomial(*q)),
            Family::OddPower { p } => Some(GrowthOrder::Polynomial(*p)),
            Family::Exponential { .. } => Some(GrowthOrder::SuperPolynomial),
            Family::LogPower { q, .. } => Some(GrowthOrder::Polynomial(*q)),
            Family::Linear { .. } => Some(GrowthOrder::Polynomial(1.0)),
            Family::Tabulated(_) => None,
        }
    }

    /// `G(s) = sup_{0<|t|<=s} g(t)/t`, with `G(0) = 0`.
    pub fn envelope_g(&self, s: f64) -> Result<f64> {
        if !(s >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "s",
                value: s,
                expected: "s >= 0",
            });
        }
        self.require_zero_at_zero()?;
        if s == 0.0 {
            return Ok(0.0);
        }
        Ok(match &self.family {
            Family::Power { q } => pow(s, q - 1.0),
            Family::OddPower { p } => pow(s, p - 1.0),
            Family::Exponential { alpha } => expm1(alpha * s) / s,
            Family::LogPower { .. } => self.eval(s) / s,
            Family::Linear { slope } => *slope,
            Family::Tabulated(table) => {
                // g(t)/t is monotone on each linear piece through a nonzero
                // intercept, so the sup sits at ±s, a breakpoint, or the t → 0 limit.
                let mut best = f64::NEG_INFINITY;
                let mut probe = |t: f64| {
                    if t != 0.0 && t.abs() <= s {
                        best = best.max(table.eval(t) / t);
                    }
                };
                probe(s);
                probe(-s);
                for &(t, _) in table.points() {
                    probe(t);
                }
                for t in geometric_points(s * 1e-12, s, 400) {
                    probe(t);
                    probe(-t);
                }
                best
            }
        })
    }

    /// `sup_{lower <= t <= σ} f(t)/t` on the positive axis. `lower = 1` gives
    /// `F(σ)`; `lower = 0` gives the open window `(0, σ]`.
    pub fn envelope_f(&self, sigma: f64, lower: f64) -> Result<f64> {
        if !(lower >= 0.0) || !(sigma > 0.0) || sigma < lower {
            return Err(Error::InvalidParameter {
                name: "sigma",
                value: sigma,
                expected: "a nonempty window lower <= t <= sigma with sigma > 0",
            });
        }
        match &self.family {
            Family::Tabulated(table) => {
                let lo = if lower > 0.0 { lower } else { sigma * 1e-12 };
                let mut best = self.eval(sigma) / sigma;
                for t in geometric_points(lo, sigma, 400) {
                    best = best.max(self.eval(t) / t);
                }
                for &(t, y) in table.points() {
                    if t >= lo && t <= sigma && t > 0.0 {
                        best = best.max(y / t);
                    }
                }
                Ok(best)
            }
            // convex with f(0) = 0: the quotient is nondecreasing
            _ => Ok(self.eval(sigma) / sigma),
        }
    }

    /// `L(s) = sup_{|u|,|v|<=s, u≠v} (g(u)-g(v))/(u-v)`, with `L(0) = 0`.
    pub fn lipschitz(&self, s: f64) -> Result<f64> {
        if !(s >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "s",
                value: s,
                expected: "s >= 0",
            });
        }
        if s == 0.0 {
            return Ok(0.0);
        }
        Ok(match &self.family {
            Family::Power { q } => q * pow(s, q - 1.0),
            Family::OddPower { p } => p * pow(s, p - 1.0),
            Family::Exponential { alpha } => alpha * exp(alpha * s),
            Family::LogPower { q, s: e } => {
                let l = log1p(s);
                q * pow(1.0 + s, q - 1.0) * pow(l, *e) + e * pow(1.0 + s, q - 1.0) * pow(l, e - 1.0)
            }
            Family::Linear { slope } => slope.abs(),
            Family::Tabulated(table) => {
                let p = table.points();
                let mut best: f64 = 0.0;
                for (a, b, m) in table.slopes() {
                    if b > -s && a < s {
                        best = best.max(m.abs());
                    }
                }
                // [-s, s] entirely inside an extrapolated end piece
                if s <= p[0].0 {
                    best = best.max(table.slopes().next().unwrap().2.abs());
                }
                if -s >= p[p.len() - 1].0 {
                    best = best.max(table.slopes().last().unwrap().2.abs());
                }
                best
            }
        })
    }

    /// Theorem-level growth exponents relative to the critical value `p*`.
    ///
    /// Uses the family's exact growth order when available; otherwise falls
    /// back to [`growth_exponents_numeric`](Self::growth_exponents_numeric).
    pub fn growth_exponents(&self, p_star: f64) -> Result<GrowthExponents> {
        if !self.flags().nondecreasing {
            return Err(Error::Unsupported(
                "growth exponents need a nondecreasing f",
            ));
        }
        match self.exact_growth() {
            Some(order) => Ok(exponents_from_order(
                order,
                p_star,
                ExponentMethod::Exact,
                0.0,
            )),
            None => self.growth_exponents_numeric(p_star),
        }
    }

    /// Log-log slope of `f` over `t = 2^k`, `k = 20..=60`, in log arithmetic.
    pub fn growth_exponents_numeric(&self, p_star: f64) -> Result<GrowthExponents> {
        let xs: Vec<f64> = (20..=60)
            .map(|k| k as f64 * core::f64::consts::LN_2)
            .collect();
        let ys: Vec<f64> = xs.iter().map(|&x| self.ln_eval(exp(x))).collect();
        if ys.iter().any(|y| !y.is_finite()) {
            return Err(Error::Unsupported(
                "f must be positive on the sampling window",
            ));
        }
        let local: Vec<f64> = xs
            .windows(2)
            .zip(ys.windows(2))
            .map(|(x, y)| (y[1] - y[0]) / (x[1] - x[0]))
            .collect();
        if local.iter().any(|&d| d < 0.0) {
            return Err(Error::Unsupported("f is decreasing on the sampling window"));
        }
        let last = *local.last().unwrap();
        if last > 64.0 && last > 2.0 * local[0] {
            return Ok(exponents_from_order(
                GrowthOrder::SuperPolynomial,
                p_star,
                ExponentMethod::Heuristic,
                f64::INFINITY,
            ));
        }
        let (slope, _) = least_squares_line(&xs, &ys);
        let band = local.iter().map(|d| (d - slope).abs()).fold(0.0, f64::max);
        let mut out = exponents_from_order(
            GrowthOrder::Polynomial(slope),
            p_star,
            ExponentMethod::Heuristic,
            band,
        );
        out.slope = slope;
        Ok(out)
    }

    /// `H(z) = ∫_z^∞ dσ / f(σ)` with convergence classification.
    pub fn osgood_tail(&self, z: f64) -> Result<TailIntegral> {
        if !(z > 0.0) {
            return Err(Error::InvalidParameter {
                name: "z",
                value: z,
                expected: "z > 0",
            });
        }
        if !(self.eval(z) > 0.0) {
            return Err(Error::HypothesisViolated("f must be positive on [z, ∞)"));
        }
        Ok(improper_tail(
            |s| 1.0 / self.eval(s),
            z,
            &TailOptions {
                decades: 8.0,
                ..TailOptions::default()
            },
        ))
    }

    fn require_zero_at_zero(&self) -> Result<()> {
        if self.flags().zero_at_zero {
            Ok(())
        } else {
            Err(Error::HypothesisViolated("g(0) must vanish"))
        }
    }
}

fn exponents_from_order(
    order: GrowthOrder,
    p_star: f64,
    method: ExponentMethod,
    band: f64,
) -> GrowthExponents {
    match order {
        GrowthOrder::Polynomial(d) => GrowthExponents {
            p_inf: Some(d.max(p_star)),
            p_sup: if d > p_star { Some(d) } else { None },
            method,
            slope: d,
            band,
        },
        GrowthOrder::SuperPolynomial => GrowthExponents {
            p_inf: None,
            p_sup: Some(f64::INFINITY),
            method,
            slope: f64::INFINITY,
            band,
        },
    }
}

/// The time weight `h(t) >= 0`.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightSpec {
    One,
    /// `t^β`, `β > -1`.
    Power {
        beta: f64,
    },
    /// Piecewise linear through samples on `[0, ∞)`, constant past the last one.
    Tabulated(Table),
}

impl WeightSpec {
    pub fn power(beta: f64) -> Result<Self> {
        if !(beta > -1.0 && beta.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "beta",
                value: beta,
                expected: "beta > -1",
            });
        }
        Ok(if beta == 0.0 {
            WeightSpec::One
        } else {
            WeightSpec::Power { beta }
        })
    }

    pub fn tabulated(points: Vec<(f64, f64)>) -> Result<Self> {
        let table = Table::new(points)?;
        if table.points()[0].0 > 0.0 {
            return Err(Error::Parse("weight table must start at t = 0".to_string()));
        }
        if let Some((i, &(_, y))) = table.points().iter().enumerate().find(|(_, p)| p.1 < 0.0) {
            return Err(Error::NegativeValue {
                what: "weight h",
                index: i,
                value: y,
            });
        }
        Ok(WeightSpec::Tabulated(table))
    }

    /// Parse `one`, `weight:one`, `weight:beta=0.5` or `wtable:0=1,1=2`.
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        if text == "one" || text == "weight:one" || text == "1" {
            return Ok(WeightSpec::One);
        }
        if text == "t" {
            return Self::power(1.0);
        }
        let (kind, args) = split_kind(text);
        match kind {
            "weight" | "power" => Self::power(param(&args, "beta")?),
            "wtable" => Self::tabulated(table_points(&args)?),
            _ => Err(Error::Parse(format!("unknown weight '{text}'"))),
        }
    }

    pub fn label(&self) -> String {
        match self {
            WeightSpec::One => "one".to_string(),
            WeightSpec::Power { beta } => format!("weight:beta={beta}"),
            WeightSpec::Tabulated(t) => {
                let body: Vec<String> =
                    t.points().iter().map(|(x, y)| format!("{x}={y}")).collect();
                format!("wtable:{}", body.join(","))
            }
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            WeightSpec::One => 1.0,
            WeightSpec::Power { beta } => pow(t, *beta),
            WeightSpec::Tabulated(table) => {
                let last = table.points()[table.points().len() - 1];
                if t >= last.0 {
                    last.1
                } else {
                    table.eval(t)
                }
            }
        }
    }

    /// `∫_0^t h(σ) dσ`.
    pub fn integral(&self, t: f64) -> f64 {
        match self {
            WeightSpec::One => t,
            WeightSpec::Power { beta } => pow(t, beta + 1.0) / (beta + 1.0),
            WeightSpec::Tabulated(table) => {
                let mut acc = 0.0;
                let pts = table.points();
                for w in pts.windows(2) {
                    let (a, b) = (w[0].0, w[1].0.min(t));
                    if b <= a {
                        break;
                    }
                    acc += 0.5 * (b - a) * (w[0].1 + self.eval(b));
                }
                let last = pts[pts.len() - 1];
                if t > last.0 {
                    acc += (t - last.0) * last.1;
                }
                acc
            }
        }
    }

    /// Exponent `β` when `h = t^β` (zero for the constant weight).
    pub fn power_exponent(&self) -> Option<f64> {
        match self {
            WeightSpec::One => Some(0.0),
            WeightSpec::Power { beta } => Some(*beta),
            WeightSpec::Tabulated(_) => None,
        }
    }

    pub fn is_one(&self) -> bool {
        matches!(self, WeightSpec::One)
    }

    pub fn min_value(&self) -> f64 {
        match self {
            WeightSpec::Tabulated(t) => {
                t.points().iter().map(|p| p.1).fold(f64::INFINITY, f64::min)
            }
            _ => 0.0,
        }
    }
}

fn split_kind(text: &str) -> (&str, Vec<(String, String)>) {
    let text = text.trim();
    let (kind, rest) = match text.split_once(':') {
        Some((k, r)) => (k.trim(), r),
        None => (text, ""),
    };
    let args = rest
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|kv| match kv.split_once('=') {
            Some((k, v)) => (k.trim().to_string(), v.trim().to_string()),
            None => (kv.trim().to_string(), String::new()),
        })
        .collect();
    (kind, args)
}

fn param(args: &[(String, String)], key: &str) -> Result<f64> {
    let raw = args
        .iter()
        .find(|(k, _)| k == key)
        .map(|(_, v)| v.as_str())
        .ok_or_else(|| Error::Parse(format!("missing parameter '{key}'")))?;
    raw.parse::<f64>()
        .map_err(|_| Error::Parse(format!("parameter '{key}' is not a number: '{raw}'")))
}

fn table_points(args: &[(String, String)]) -> Result<Vec<(f64, f64)>> {
    args.iter()
        .map(|(k, v)| {
            let t = k
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad table abscissa '{k}'")))?;
            let y = v
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad table value '{v}'")))?;
            Ok((t, y))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::E;

    /// Brute-force sup of g(t)/t over a dense sign-symmetric sample.
    fn brute_g(g: &NonlinearitySpec, s: f64) -> f64 {
        let n = 20_000;
        (1..=n)
            .flat_map(|i| {
                let t = s * i as f64 / n as f64;
                [g.eval(t) / t, g.eval(-t) / -t]
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Brute-force sup of difference quotients over a grid pair-set.
    fn brute_l(g: &NonlinearitySpec, s: f64) -> f64 {
        let n = 2000;
        let pts: Vec<f64> = (0..=n)
            .map(|i| -s + 2.0 * s * i as f64 / n as f64)
            .collect();
        let mut best: f64 = 0.0;
        for i in 0..pts.len() {
            for j in (i + 1)..pts.len().min(i + 4) {
                best = best.max((g.eval(pts[j]) - g.eval(pts[i])) / (pts[j] - pts[i]));
            }
        }
        best
    }

    #[test]
    fn envelope_g_examples() {
        let g = NonlinearitySpec::power(3.0).unwrap();
        assert_eq!(g.envelope_g(2.0).unwrap(), 4.0);
        assert_eq!(g.envelope_g(0.0).unwrap(), 0.0);
        assert!(g.envelope_g(1e-9).unwrap() < 1e-15);
        let e = NonlinearitySpec::exponential(1.0).unwrap();
        assert!((e.envelope_g(1.0).unwrap() - (E - 1.0)).abs() < 1e-14);
        assert!((brute_g(&e, 1.0) - (E - 1.0)).abs() < 1e-12);
        assert!(g.envelope_g(-1.0).is_err());
    }

    #[test]
    fn envelope_g_rejects_nonzero_origin() {
        let t = NonlinearitySpec::tabulated(vec![(0.0, 1.0), (1.0, 2.0)]).unwrap();
        assert!(matches!(
            t.envelope_g(1.0),
            Err(Error::HypothesisViolated(_))
        ));
    }

    #[test]
    fn tabulated_envelopes_match_brute_force() {
        let t = NonlinearitySpec::tabulated(vec![
            (-1.0, -0.5),
            (0.0, 0.0),
            (1.0, 1.0),
            (2.0, 5.0),
            (3.0, 12.0),
        ])
        .unwrap();
        for s in [0.5, 1.0, 2.5, 3.0] {
            let g = t.envelope_g(s).unwrap();
            let b = brute_g(&t, s);
            assert!(g >= b - 1e-12 && g - b < 1e-3, "s={s}: {g} vs {b}");
            let l = t.lipschitz(s).unwrap();
            let bl = brute_l(&t, s);
            assert!(l >= bl - 1e-9 && l - bl < 1e-6, "s={s}: {l} vs {bl}");
        }
    }

    #[test]
    fn envelope_f_examples() {
        let f = NonlinearitySpec::power(2.0).unwrap();
        assert_eq!(f.envelope_f(4.0, 1.0).unwrap(), 4.0);
        assert_eq!(f.envelope_f(4.0, 0.0).unwrap(), 4.0);
        assert!(f.envelope_f(0.5, 1.0).is_err());
        let lp = NonlinearitySpec::log_power(2.0, 1.0).unwrap();
        let sigma = E - 1.0;
        let exact = pow(1.0 + sigma, 2.0) * ln(1.0 + sigma) / sigma;
        let got = lp.envelope_f(sigma, 1.0).unwrap();
        assert!((got - exact).abs() < 1e-12);
        let brute = (0..=10_000)
            .map(|i| 1.0 + (sigma - 1.0) * i as f64 / 10_000.0)
            .map(|t| lp.eval(t) / t)
            .fold(0.0, f64::max);
        assert!((got - brute).abs() < 1e-12);
    }

    #[test]
    fn lipschitz_examples() {
        let g = NonlinearitySpec::odd_power(3.0).unwrap();
        assert_eq!(g.lipschitz(2.0).unwrap(), 12.0);
        assert_eq!(g.lipschitz(0.0).unwrap(), 0.0);
        let e = NonlinearitySpec::exponential(1.0).unwrap();
        assert!((e.lipschitz(1.0).unwrap() - E).abs() < 1e-14);
        assert!((brute_l(&e, 1.0) - E).abs() < 5e-3);
    }

    #[test]
    fn growth_exponents_exact_families() {
        let p_star = 5.0 / 3.0;
        let g = NonlinearitySpec::power(3.0)
            .unwrap()
            .growth_exponents(p_star)
            .unwrap();
        assert_eq!(
            (g.p_inf, g.p_sup, g.method),
            (Some(3.0), Some(3.0), ExponentMethod::Exact)
        );
        let g = NonlinearitySpec::exponential(1.0)
            .unwrap()
            .growth_exponents(p_star)
            .unwrap();
        assert_eq!((g.p_inf, g.p_sup), (None, Some(f64::INFINITY)));
        let lp = NonlinearitySpec::log_power(5.0, 2.0).unwrap();
        let g = lp.growth_exponents(p_star).unwrap();
        assert_eq!((g.p_inf, g.p_sup), (Some(5.0), Some(5.0)));
        let n = lp.growth_exponents_numeric(p_star).unwrap();
        assert_eq!(n.method, ExponentMethod::Heuristic);
        assert!((4.9..=5.1).contains(&n.slope), "slope {}", n.slope);
    }

    #[test]
    fn numeric_growth_on_power_and_exponential() {
        let n = NonlinearitySpec::power(3.0)
            .unwrap()
            .growth_exponents_numeric(1.5)
            .unwrap();
        assert!((n.slope - 3.0).abs() < 0.05);
        let n = NonlinearitySpec::exponential(0.5)
            .unwrap()
            .growth_exponents_numeric(1.5)
            .unwrap();
        assert_eq!((n.p_inf, n.p_sup), (None, Some(f64::INFINITY)));
    }

    #[test]
    fn subcritical_power_has_empty_sup_set() {
        let g = NonlinearitySpec::power(1.2)
            .unwrap()
            .growth_exponents(5.0 / 3.0)
            .unwrap();
        assert_eq!(g.p_sup, None);
        assert_eq!(g.p_inf, Some(5.0 / 3.0));
    }

    #[test]
    fn decreasing_is_rejected() {
        let t = NonlinearitySpec::tabulated(vec![(0.0, 0.0), (1.0, -1.0)]).unwrap();
        assert!(t.growth_exponents(2.0).is_err());
    }

    #[test]
    fn osgood_examples() {
        let f = NonlinearitySpec::power(2.0).unwrap();
        let h1 = f.osgood_tail(1.0).unwrap();
        assert!(h1.converged && (h1.value - 1.0).abs() < 1e-6);
        let h2 = f.osgood_tail(2.0).unwrap();
        assert!((h2.value - 0.5).abs() < 1e-6);
        let lin = NonlinearitySpec::linear(1.0).unwrap();
        assert!(!lin.osgood_tail(1.0).unwrap().converged);
        let zero = NonlinearitySpec::tabulated(vec![(0.0, 0.0), (5.0, 0.0), (6.0, 1.0)]).unwrap();
        assert!(zero.osgood_tail(1.0).is_err());
    }

    #[test]
    fn parse_round_trip() {
        for text in [
            "power:q=3",
            "exp:alpha=1",
            "logpow:q=5,s=2",
            "oddpow:p=2.5",
            "linear:c=1",
            "table:0=0,1=1,2=8",
        ] {
            let g = NonlinearitySpec::parse(text).unwrap();
            assert_eq!(NonlinearitySpec::parse(&g.label()).unwrap(), g);
        }
        assert_eq!(
            WeightSpec::parse("weight:beta=0.5").unwrap(),
            WeightSpec::Power { beta: 0.5 }
        );
        assert_eq!(WeightSpec::parse("one").unwrap(), WeightSpec::One);
        assert_eq!(
            WeightSpec::parse("t").unwrap(),
            WeightSpec::Power { beta: 1.0 }
        );
        assert!(NonlinearitySpec::parse("power:q=0.5").is_err());
        assert!(NonlinearitySpec::parse("cube").is_err());
        assert!(WeightSpec::parse("wtable:0=1,1=-1").is_err());
    }

    #[test]
    fn weight_integrals() {
        let h = WeightSpec::power(1.0).unwrap();
        assert!((h.integral(0.3) - 0.045).abs() < 1e-15);
        let t = WeightSpec::tabulated(vec![(0.0, 0.0), (1.0, 1.0)]).unwrap();
        assert!((t.integral(1.0) - 0.5).abs() < 1e-15);
        assert!((t.integral(2.0) - 1.5).abs() < 1e-15);
    }
}
