//! Free-space heat semigroup by direct quadrature of the Gauss–Weierstrass
//! kernel against a radial profile.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{check_positive, Error, Result};
use crate::math::{bessel_i0_scaled, cos, exp, expm1, gauss_legendre, pow, sin, sphere_area, sqrt};
use crate::quad::graded_weights;
use crate::radial_field::{RadialFunction, RadialGrid};

/// Sources with `(x - s)^2 > 4t · CUTOFF` contribute below `e^{-50}`.
const CUTOFF: f64 = 50.0;

/// How the angular part of the kernel is integrated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AngularRule {
    /// Modified-Bessel closed forms (`N = 2`) and elementary ones (`N = 1, 3`).
    ClosedForm,
    /// Gauss–Legendre in the polar angle with weight `sin^{N-2}θ`.
    GaussLegendre(usize),
}

#[derive(Debug, Clone, PartialEq)]
struct AngularTable {
    cosines: Vec<f64>,
    weights: Vec<f64>,
}

/// `S(t)` on `R^N` for radial data sampled on a graded grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FreeSpaceEngine {
    grid: Arc<RadialGrid>,
    rule: AngularRule,
    table: Option<AngularTable>,
    unit: ProductRule,
    mass_rule: (Vec<f64>, Vec<f64>),
}

impl FreeSpaceEngine {
    pub fn new(grid: Arc<RadialGrid>) -> Self {
        let unit = ProductRule::unit(&grid);
        FreeSpaceEngine {
            grid,
            rule: AngularRule::ClosedForm,
            table: None,
            unit,
            mass_rule: gauss_legendre(16),
        }
    }

    pub fn with_angular_rule(grid: Arc<RadialGrid>, rule: AngularRule) -> Result<Self> {
        let table = match rule {
            AngularRule::ClosedForm => None,
            AngularRule::GaussLegendre(q) => {
                if q < 64 {
                    return Err(Error::InvalidParameter {
                        name: "Q",
                        value: q as f64,
                        expected: "at least 64 angular nodes",
                    });
                }
                let n = grid.dimension();
                if n == 1 {
                    None
                } else {
                    let (x, w) = gauss_legendre(q);
                    let prefactor = sphere_area(n - 1);
                    let mut cosines = Vec::with_capacity(q);
                    let mut weights = Vec::with_capacity(q);
                    for (xi, wi) in x.iter().zip(&w) {
                        let theta = 0.5 * PI * (xi + 1.0);
                        cosines.push(cos(theta));
                        weights.push(0.5 * PI * wi * prefactor * pow(sin(theta), n as f64 - 2.0));
                    }
                    Some(AngularTable { cosines, weights })
                }
            }
        };
        let unit = ProductRule::unit(&grid);
        Ok(FreeSpaceEngine {
            grid,
            rule,
            table,
            unit,
            mass_rule: gauss_legendre(16),
        })
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn angular_rule(&self) -> AngularRule {
        self.rule
    }

    /// Angular factor `A_N(b)`, `b = xs/2t`, with `e^{-(x-s)^2/4t}` pulled out.
    fn angular(&self, b: f64) -> f64 {
        let n = self.grid.dimension();
        if let Some(table) = &self.table {
            return table
                .cosines
                .iter()
                .zip(&table.weights)
                .map(|(c, w)| w * exp(b * (c - 1.0)))
                .sum();
        }
        match n {
            1 => 1.0 + exp(-2.0 * b),
            2 => 2.0 * PI * bessel_i0_scaled(b),
            _ => {
                if b < 1e-12 {
                    4.0 * PI * (1.0 - b)
                } else {
                    -2.0 * PI * expm1(-2.0 * b) / b
                }
            }
        }
    }

    /// Radial kernel: `S(t)f(x) = ∫_0^∞ kernel(x, s, t) f(s) s^{N-1} ds`.
    pub fn kernel(&self, x: f64, s: f64, t: f64) -> f64 {
        let n = self.grid.dimension() as f64;
        let d = x - s;
        pow(4.0 * PI * t, -0.5 * n) * exp(-d * d / (4.0 * t)) * self.angular(x * s / (2.0 * t))
    }

    /// `∫_{B_R} G_t(x - y) dy` for `|x| = x`, by composite Gauss–Legendre in `s`.
    fn ball_mass(&self, x: f64, t: f64) -> f64 {
        let radius = self.grid.radius();
        let reach = sqrt(4.0 * t * CUTOFF);
        if radius - x > reach {
            return 1.0;
        }
        let n = self.grid.dimension() as f64;
        let lo = (x - reach).max(0.0);
        let panels = 8;
        let width = (radius - lo) / panels as f64;
        let (nodes, weights) = &self.mass_rule;
        let mut total = 0.0;
        for p in 0..panels {
            let mid = lo + (p as f64 + 0.5) * width;
            for (z, w) in nodes.iter().zip(weights) {
                let s = mid + 0.5 * width * z;
                total += 0.5 * width * w * self.kernel(x, s, t) * pow(s, n - 1.0);
            }
        }
        total.min(1.0)
    }

    /// `S(t)f` on the grid of `f`. The result is regular and supported on the whole grid.
    pub fn apply(&self, f: &RadialFunction, t: f64) -> Result<RadialFunction> {
        if !f.same_grid(&RadialFunction::zero(self.grid.clone())) {
            return Err(Error::GridMismatch);
        }
        let values = self.apply_at(f, t, self.grid.nodes())?;
        RadialFunction::new(self.grid.clone(), values, 0.0, self.grid.radius())
    }

    /// `S(t)f` evaluated at arbitrary radii (the origin included).
    ///
    /// Each value is rescaled so that the constant function gets the exact
    /// kernel mass of the computational ball. Where the kernel is narrower
    /// than the local spacing this turns the sampled kernel into a local
    /// average instead of an amplification.
    pub fn apply_at(&self, f: &RadialFunction, t: f64, targets: &[f64]) -> Result<Vec<f64>> {
        check_positive("t", t)?;
        if f.dimension() != self.grid.dimension() {
            return Err(Error::GridMismatch);
        }
        let rule = ProductRule::new(f)?;
        let reach = sqrt(4.0 * t * CUTOFF);
        let out = targets
            .iter()
            .map(|&x| {
                let lo = self.unit.sources.partition_point(|&s| s < x - reach);
                let hi = self.unit.sources.partition_point(|&s| s <= x + reach);
                let (mut value, mut mass) = (0.0, 0.0);
                for k in lo..hi {
                    let kernel = self.kernel(x, self.unit.sources[k], t);
                    mass += self.unit.weights[k] * kernel;
                    if k < rule.weights.len() {
                        value += rule.weights[k] * kernel;
                    }
                }
                if mass > 0.0 {
                    value * self.ball_mass(x, t) / mass
                } else {
                    value
                }
            })
            .collect();
        Ok(out)
    }
}

/// Quadrature for `∫_0^a ψ(s) f(s) s^{N-1} ds` in the grading variable
/// `ξ = (s/R)^{1/g}`, where `f(s) = φ(s) s^{-γ}`:
///
/// `c ∫_0^{ξ_j} ξ^e ψφ dξ`, `e = g(N-γ) - 1`, `c = g R^{N-γ}`.
///
/// `φ` is interpolated by quadratics on pairs of cells and the weight
/// `ξ^e` is integrated exactly, so power-law data incur no singularity error.
/// The weights here already include the samples of `φ`.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct ProductRule {
    pub sources: Vec<f64>,
    pub weights: Vec<f64>,
}

impl ProductRule {
    fn unit(grid: &Arc<RadialGrid>) -> Self {
        let one = RadialFunction::new(
            grid.clone(),
            alloc::vec![1.0; grid.len()],
            0.0,
            grid.radius(),
        );
        Self::new(&one.expect("constant profile is valid")).expect("regular profile")
    }

    pub fn new(f: &RadialFunction) -> Result<Self> {
        let grid = f.grid();
        let end = f.support_len();
        let mut sources = Vec::with_capacity(end + 1);
        let mut weights = Vec::with_capacity(end + 1);
        if end == 0 {
            return Ok(ProductRule { sources, weights });
        }
        let n = grid.dimension() as f64;
        let gamma = f.singular_power();
        let g = grid.grade();
        let e = g * (n - gamma) - 1.0;
        let c = g * pow(grid.radius(), n - gamma);
        let m = grid.len() as f64;
        let h = 1.0 / m;
        let xi = |k: usize| k as f64 * h;

        let w = graded_weights(end, e, h, xi);
        sources.push(0.0);
        let nodes = grid.nodes();
        let phi1 = f.values()[0] * pow(nodes[0], gamma);
        weights.push(c * w[0] * phi1);
        for k in 1..=end {
            let s = nodes[k - 1];
            let phi = f.values()[k - 1] * pow(s, gamma);
            sources.push(s);
            weights.push(c * w[k] * phi);
        }
        Ok(ProductRule { sources, weights })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::erf;

    fn gaussian(grid: &Arc<RadialGrid>, sigma: f64) -> RadialFunction {
        RadialFunction::from_fn(grid.clone(), |s| exp(-s * s / (4.0 * sigma))).unwrap()
    }

    #[test]
    fn gaussian_convolution_oracle() {
        for n in 1..=3 {
            let grid = Arc::new(RadialGrid::new(n, 8.0, 1024, 3.0).unwrap());
            let engine = FreeSpaceEngine::new(grid.clone());
            for (sigma, t) in [(0.1, 0.05), (0.25, 0.5), (0.05, 1e-3)] {
                let out = engine.apply(&gaussian(&grid, sigma), t).unwrap();
                let err = grid
                    .nodes()
                    .iter()
                    .zip(out.values())
                    .map(|(&s, &v)| {
                        (v - pow(sigma / (sigma + t), 0.5 * n as f64)
                            * exp(-s * s / (4.0 * (sigma + t))))
                        .abs()
                    })
                    .fold(0.0, f64::max);
                assert!(err < 1e-6, "N={n} σ={sigma} t={t}: {err}");
            }
        }
    }

    #[test]
    fn erf_oracle_in_one_dimension() {
        let grid = Arc::new(RadialGrid::with_breakpoint(1, 8.0, 1024, 3.0, 1.0).unwrap());
        let chi =
            RadialFunction::new(grid.clone(), alloc::vec![1.0; grid.len()], 0.0, 1.0).unwrap();
        let out = FreeSpaceEngine::new(grid.clone())
            .apply(&chi, 0.25)
            .unwrap();
        for (&x, &v) in grid.nodes().iter().zip(out.values()) {
            let exact = 0.5 * (erf(1.0 - x) + erf(1.0 + x));
            assert!((v - exact).abs() < 1e-8, "x={x}: {v} vs {exact}");
        }
    }

    #[test]
    fn angular_rules_agree() {
        for n in 2..=3 {
            let grid = Arc::new(RadialGrid::new(n, 8.0, 64, 3.0).unwrap());
            let closed = FreeSpaceEngine::new(grid.clone());
            let gl =
                FreeSpaceEngine::with_angular_rule(grid, AngularRule::GaussLegendre(128)).unwrap();
            for b in [0.0, 1e-6, 0.3, 2.0, 10.0, 40.0] {
                let (a, q) = (closed.angular(b), gl.angular(b));
                assert!((a - q).abs() < 1e-10 * a, "N={n} b={b}: {a} vs {q}");
            }
        }
    }

    #[test]
    fn rejects_bad_time() {
        let grid = Arc::new(RadialGrid::new(3, 8.0, 64, 3.0).unwrap());
        let engine = FreeSpaceEngine::new(grid.clone());
        let f = RadialFunction::zero(grid);
        assert!(engine.apply(&f, 0.0).is_err());
        assert!(engine.apply(&f, f64::NAN).is_err());
    }
}
