//! Radial grids, radial profiles, Lebesgue norms, and the power-singular
//! data classes
//!
//! * upper class: `ψ >= 0` with `|x|^ρ ψ(x)^r <= K χ_{B_a}(x)`,
//! * lower class: `ψ >= 0` with `|x|^ρ ψ(x)^r >= K χ_{B_a}(x)`.

use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::error::{check_positive, Error, Result};
use crate::math::{ln, pow, round, sphere_area};
use crate::nonlinearity::{NonlinearitySpec, WeightSpec};
use crate::quad::graded_weights;

/// Nodes `r_i = R (i/M)^γ`, `i = 1..=M`. The origin is never a node.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    dimension: usize,
    radius: f64,
    grade: f64,
    nodes: Vec<f64>,
}

impl RadialGrid {
    pub fn new(dimension: usize, radius: f64, count: usize, grade: f64) -> Result<Self> {
        if !(1..=3).contains(&dimension) {
            return Err(Error::InvalidParameter {
                name: "N",
                value: dimension as f64,
                expected: "a space dimension in {1, 2, 3}",
            });
        }
        check_positive("R", radius)?;
        if count < 4 {
            return Err(Error::InvalidParameter {
                name: "M",
                value: count as f64,
                expected: "at least 4 nodes",
            });
        }
        if !(grade >= 1.0 && grade.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "grade",
                value: grade,
                expected: "grade >= 1",
            });
        }
        let m = count as f64;
        let mut nodes: Vec<f64> = (1..=count)
            .map(|i| radius * pow(i as f64 / m, grade))
            .collect();
        nodes[count - 1] = radius;
        Ok(RadialGrid {
            dimension,
            radius,
            grade,
            nodes,
        })
    }

    pub fn uniform(dimension: usize, radius: f64, count: usize) -> Result<Self> {
        Self::new(dimension, radius, count, 1.0)
    }

    /// A grid whose grading is nudged so that `breakpoint` is exactly a node.
    ///
    /// The grade moves by `O(1/M)`; it never drops below 1.
    pub fn with_breakpoint(
        dimension: usize,
        radius: f64,
        count: usize,
        grade: f64,
        breakpoint: f64,
    ) -> Result<Self> {
        check_positive("a", breakpoint)?;
        if breakpoint > radius * (1.0 + 1e-12) {
            return Err(Error::SupportOutsideDomain {
                support: breakpoint,
                radius,
            });
        }
        if breakpoint >= radius * (1.0 - 1e-12) {
            return Self::new(dimension, radius, count, grade);
        }
        let m = count as f64;
        let ratio = breakpoint / radius;
        let mut j = round(m * pow(ratio, 1.0 / grade)).clamp(1.0, m - 1.0);
        let mut adjusted = ln(ratio) / ln(j / m);
        while adjusted < 1.0 && j < m - 1.0 {
            j += 1.0;
            adjusted = ln(ratio) / ln(j / m);
        }
        let mut grid = Self::new(dimension, radius, count, adjusted)?;
        grid.nodes[j as usize - 1] = breakpoint;
        Ok(grid)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn grade(&self) -> f64 {
        self.grade
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Smallest gap between consecutive nodes (including the origin gap).
    pub fn min_spacing(&self) -> f64 {
        let mut best = self.nodes[0];
        for w in self.nodes.windows(2) {
            best = best.min(w[1] - w[0]);
        }
        best
    }

    /// Index of the node equal to `r` (relative tolerance 1e-12), if any.
    pub fn index_of(&self, r: f64) -> Option<usize> {
        let i = self.nodes.partition_point(|&x| x < r * (1.0 - 1e-12));
        (i < self.nodes.len() && (self.nodes[i] - r).abs() <= 1e-12 * r).then_some(i)
    }

    /// Number of nodes with `r_i <= r` (up to relative tolerance 1e-12).
    pub fn count_within(&self, r: f64) -> usize {
        self.nodes.partition_point(|&x| x <= r * (1.0 + 1e-12))
    }
}

/// Samples of a radial profile on a [`RadialGrid`].
///
/// Near the origin the profile is declared to behave like
/// `v_1 (s/r_1)^{-γ}` with `γ = singular_power`. Values beyond
/// `support_radius` are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialFunction {
    grid: Arc<RadialGrid>,
    values: Vec<f64>,
    singular_power: f64,
    support_radius: f64,
}

impl RadialFunction {
    pub fn new(
        grid: Arc<RadialGrid>,
        mut values: Vec<f64>,
        singular_power: f64,
        support_radius: f64,
    ) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch);
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                what: "radial function values",
            });
        }
        let n = grid.dimension() as f64;
        if !(singular_power >= 0.0 && singular_power < n) {
            return Err(Error::InvalidParameter {
                name: "singular_power",
                value: singular_power,
                expected: "0 <= singular_power < N",
            });
        }
        check_positive("support_radius", support_radius)?;
        if support_radius > grid.radius() * (1.0 + 1e-12) {
            return Err(Error::SupportOutsideDomain {
                support: support_radius,
                radius: grid.radius(),
            });
        }
        let end = grid.count_within(support_radius);
        for v in &mut values[end..] {
            *v = 0.0;
        }
        Ok(RadialFunction {
            grid,
            values,
            singular_power,
            support_radius,
        })
    }

    /// Regular profile sampled from `f`, supported on the whole grid.
    pub fn from_fn(grid: Arc<RadialGrid>, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.nodes().iter().map(|&s| f(s)).collect();
        let radius = grid.radius();
        Self::new(grid, values, 0.0, radius)
    }

    pub fn zero(grid: Arc<RadialGrid>) -> Self {
        let radius = grid.radius();
        RadialFunction {
            values: alloc::vec![0.0; grid.len()],
            grid,
            singular_power: 0.0,
            support_radius: radius,
        }
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn singular_power(&self) -> f64 {
        self.singular_power
    }

    pub fn support_radius(&self) -> f64 {
        self.support_radius
    }

    /// Number of leading nodes inside the support.
    pub fn support_len(&self) -> usize {
        self.grid.count_within(self.support_radius)
    }

    pub fn dimension(&self) -> usize {
        self.grid.dimension()
    }

    pub fn same_grid(&self, other: &RadialFunction) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid) || *self.grid == *other.grid
    }

    pub fn is_nonnegative(&self) -> bool {
        self.values.iter().all(|&v| v >= 0.0)
    }

    pub fn scaled(&self, c: f64) -> RadialFunction {
        let mut out = self.clone();
        for v in &mut out.values {
            *v *= c;
        }
        out
    }

    /// Node-wise `φ(v)`; the caller states the singular power of the result.
    pub fn map(&self, phi: impl Fn(f64) -> f64, singular_power: f64) -> Result<RadialFunction> {
        let values = self.values.iter().map(|&v| phi(v)).collect();
        RadialFunction::new(
            self.grid.clone(),
            values,
            singular_power,
            self.support_radius,
        )
    }

    /// Node-wise `self - other` on a shared grid.
    pub fn difference(&self, other: &RadialFunction) -> Result<RadialFunction> {
        if !self.same_grid(other) {
            return Err(Error::GridMismatch);
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a - b)
            .collect();
        RadialFunction::new(
            self.grid.clone(),
            values,
            self.singular_power.max(other.singular_power),
            self.support_radius.max(other.support_radius),
        )
    }

    /// `max_i |v_i|`, or `+∞` when a declared singularity carries mass at the origin.
    pub fn sup_norm(&self) -> f64 {
        if self.singular_power > 0.0 && self.values[0] != 0.0 {
            return f64::INFINITY;
        }
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `‖f‖_{L^p(B_R)}` for `p ∈ [1, ∞]`.
    ///
    /// In the grading variable `ξ = (s/R)^{1/g}` the integrand is
    /// `ξ^e φ(ξ)` with `φ = |f|^p s^{γp}`; the weight `ξ^e` is integrated
    /// exactly, so the declared singularity at the origin costs nothing and
    /// power profiles are integrated without error.
    pub fn norm(&self, p: f64) -> Result<f64> {
        if !(p >= 1.0) {
            return Err(Error::InvalidParameter {
                name: "p",
                value: p,
                expected: "p >= 1 or p = ∞",
            });
        }
        if p.is_infinite() {
            return Ok(self.sup_norm());
        }
        let n = self.grid.dimension() as f64;
        let end = self.support_len();
        if end == 0 || self.values[..end].iter().all(|&v| v == 0.0) {
            return Ok(0.0);
        }
        let power = self.singular_power * p;
        if power >= n && self.values[0] != 0.0 {
            return Ok(f64::INFINITY);
        }
        let power = if power >= n { 0.0 } else { power };
        let g = self.grid.grade();
        let e = g * (n - power) - 1.0;
        let h = 1.0 / self.grid.len() as f64;
        let weights = graded_weights(end, e, h, |k| k as f64 * h);
        let nodes = self.grid.nodes();
        let phi = |i: usize| pow(self.values[i].abs(), p) * pow(nodes[i], power);
        let mut total = weights[0] * phi(0);
        for (k, w) in weights.iter().enumerate().take(end + 1).skip(1) {
            total += w * phi(k - 1);
        }
        total *= g * pow(self.grid.radius(), n - power);
        Ok(pow(sphere_area(self.grid.dimension()) * total, 1.0 / p))
    }
}

/// Spatial domain of the problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    WholeSpace,
    DirichletBall { radius: f64 },
}

/// Which data class the initial datum is taken from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataSide {
    Upper,
    Lower,
}

/// A full problem instance: `u_t - Δu = h(t) g(u)` with datum `K^{1/r}|x|^{-ρ/r}χ_{B_a}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub dimension: usize,
    pub r: f64,
    pub rho: f64,
    pub k: f64,
    pub a: f64,
    pub domain: Domain,
    pub nonlinearity: NonlinearitySpec,
    pub weight: WeightSpec,
    pub side: DataSide,
}

impl ProblemSpec {
    pub fn validate(&self) -> Result<()> {
        if !(1..=3).contains(&self.dimension) {
            return Err(Error::InvalidParameter {
                name: "N",
                value: self.dimension as f64,
                expected: "a space dimension in {1, 2, 3}",
            });
        }
        if !(self.r >= 1.0 && self.r.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "r",
                value: self.r,
                expected: "1 <= r < ∞",
            });
        }
        if !(self.rho > 0.0 && self.rho < self.dimension as f64) {
            return Err(Error::RhoNotBelowDimension {
                rho: self.rho,
                dimension: self.dimension,
            });
        }
        check_positive("K", self.k)?;
        check_positive("a", self.a)?;
        if let Domain::DirichletBall { radius } = self.domain {
            check_positive("R", radius)?;
            if self.a > radius {
                return Err(Error::SupportOutsideDomain {
                    support: self.a,
                    radius,
                });
            }
        }
        if self.weight.min_value() < 0.0 {
            return Err(Error::HypothesisViolated(
                "the weight h must be nonnegative",
            ));
        }
        Ok(())
    }

    /// Default computational grid: `R = 8a` in whole space, the ball radius
    /// otherwise; grading 3 with `a` pinned to a node.
    pub fn default_grid(&self, count: usize) -> Result<RadialGrid> {
        let radius = match self.domain {
            Domain::WholeSpace => 8.0 * self.a,
            Domain::DirichletBall { radius } => radius,
        };
        RadialGrid::with_breakpoint(self.dimension, radius, count, 3.0, self.a)
    }

    /// Blow-up exponent `ρ/(2r)` of `‖S(t)u_0‖_∞ ~ t^{-ρ/2r}`.
    pub fn decay_exponent(&self) -> f64 {
        self.rho / (2.0 * self.r)
    }
}

/// `u_0(s) = K^{1/r} s^{-ρ/r}` for `s <= a`, zero beyond.
///
/// The result witnesses both data classes with the same `(K, a)`.
pub fn build_singular_data(spec: &ProblemSpec, grid: Arc<RadialGrid>) -> Result<RadialFunction> {
    if !(spec.rho > 0.0 && spec.rho < spec.dimension as f64) {
        return Err(Error::RhoNotBelowDimension {
            rho: spec.rho,
            dimension: spec.dimension,
        });
    }
    if grid.dimension() != spec.dimension {
        return Err(Error::GridMismatch);
    }
    if spec.a > grid.radius() * (1.0 + 1e-12) {
        return Err(Error::SupportOutsideDomain {
            support: spec.a,
            radius: grid.radius(),
        });
    }
    check_positive("K", spec.k)?;
    let amplitude = pow(spec.k, 1.0 / spec.r);
    let power = spec.rho / spec.r;
    let values = grid
        .nodes()
        .iter()
        .map(|&s| {
            if s <= spec.a * (1.0 + 1e-12) {
                amplitude * pow(s, -power)
            } else {
                0.0
            }
        })
        .collect();
    RadialFunction::new(grid, values, power, spec.a)
}

/// Constants `(K, a)` of a class-membership witness.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Witness {
    pub k: f64,
    pub a: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Membership {
    pub upper: Option<Witness>,
    pub lower: Option<Witness>,
}

impl Membership {
    pub fn in_upper(&self) -> bool {
        self.upper.is_some()
    }

    pub fn in_lower(&self) -> bool {
        self.lower.is_some()
    }
}

/// Decide membership of a nonnegative profile in the upper and lower classes
/// for `(ρ, r)`, reporting witnesses `(K, a)`.
///
/// The lower witness uses the largest radius `a` on which the bound holds.
pub fn class_membership(f: &RadialFunction, rho: f64, r: f64) -> Result<Membership> {
    let n = f.dimension();
    if !(rho > 0.0 && rho < n as f64) {
        return Err(Error::RhoNotBelowDimension { rho, dimension: n });
    }
    if !(r >= 1.0) {
        return Err(Error::InvalidParameter {
            name: "r",
            value: r,
            expected: "r >= 1",
        });
    }
    if let Some((index, &value)) = f.values().iter().enumerate().find(|(_, v)| **v < 0.0) {
        return Err(Error::NegativeValue {
            what: "class data",
            index,
            value,
        });
    }
    let nodes = f.grid().nodes();
    let end = f.support_len();
    let weighted: Vec<f64> = (0..end)
        .map(|i| pow(nodes[i], rho) * pow(f.values()[i], r))
        .collect();
    // |x|^ρ f^r ~ s^{ρ - γr} as s → 0
    let origin_exponent = rho - f.singular_power() * r;
    let tol = 1e-12;

    let last_positive = weighted.iter().rposition(|&w| w > 0.0);
    let upper = if origin_exponent < -tol && f.values()[0] > 0.0 {
        None
    } else {
        let k = weighted.iter().fold(0.0, |m: f64, &w| m.max(w));
        let a = match last_positive {
            Some(i) if i + 1 < end => nodes[i + 1].min(f.support_radius()),
            Some(_) => f.support_radius(),
            None => f.support_radius(),
        };
        Some(Witness { k, a })
    };

    let lower = if origin_exponent > tol || weighted.is_empty() || weighted[0] <= 0.0 {
        None
    } else {
        let run = weighted
            .iter()
            .position(|&w| w <= 0.0)
            .unwrap_or(weighted.len());
        let k = weighted[..run].iter().fold(f64::INFINITY, |m, &w| m.min(w));
        let a = if run == end {
            f.support_radius()
        } else {
            nodes[run - 1]
        };
        Some(Witness { k, a })
    };
    Ok(Membership { upper, lower })
}
