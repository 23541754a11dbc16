//! Heat semigroup on a ball with zero boundary values, by finite-volume
//! Crank–Nicolson on a uniform radial grid.

use alloc::sync::Arc;
use alloc::vec::Vec;

use super::free_space::FreeSpaceEngine;
use crate::error::{check_positive, Error, Result};
use crate::math::{ceil, pow};
use crate::radial_field::{RadialFunction, RadialGrid};

/// Singular data are handed to the free-space quadrature for the first
/// `STARTUP_STEPS` base steps.
const STARTUP_STEPS: f64 = 10.0;

/// `S(t)` on `B_R` with `u = 0` on `∂B_R`.
///
/// Unknowns sit at `s_i = i h`, `i = 0..M`, the origin being an internal
/// node with the symmetric limit `2N (u_1 - u_0)/h^2` of the radial
/// Laplacian. The time step never exceeds `h^2/N`, which keeps every
/// Crank–Nicolson step positivity preserving.
#[derive(Debug, Clone, PartialEq)]
pub struct DirichletEngine {
    grid: Arc<RadialGrid>,
    free: FreeSpaceEngine,
    h: f64,
    lower: Vec<f64>,
    diag: Vec<f64>,
    upper: Vec<f64>,
    volumes: Vec<f64>,
}

impl DirichletEngine {
    pub fn new(dimension: usize, radius: f64, count: usize) -> Result<Self> {
        let grid = Arc::new(RadialGrid::uniform(dimension, radius, count)?);
        let n = dimension as f64;
        let h = radius / count as f64;
        let mut lower = Vec::with_capacity(count);
        let mut diag = Vec::with_capacity(count);
        let mut upper = Vec::with_capacity(count);
        let mut volumes = Vec::with_capacity(count);
        // rows 0..M-1; u_M = 0 is eliminated
        for i in 0..count {
            if i == 0 {
                lower.push(0.0);
                upper.push(2.0 * n / (h * h));
                diag.push(-2.0 * n / (h * h));
                volumes.push(pow(0.5 * h, n) / n);
                continue;
            }
            let s = i as f64 * h;
            let volume = (pow(s + 0.5 * h, n) - pow(s - 0.5 * h, n)) / n;
            let lo = pow(s - 0.5 * h, n - 1.0) / (h * volume);
            let up = pow(s + 0.5 * h, n - 1.0) / (h * volume);
            lower.push(lo);
            upper.push(up);
            diag.push(-(lo + up));
            volumes.push(volume);
        }
        let free = FreeSpaceEngine::new(grid.clone());
        Ok(DirichletEngine {
            grid,
            free,
            h,
            lower,
            diag,
            upper,
            volumes,
        })
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn radius(&self) -> f64 {
        self.grid.radius()
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    /// Largest admissible step `h^2/N`.
    pub fn base_step(&self) -> f64 {
        self.h * self.h / self.grid.dimension() as f64
    }

    /// Number of equal steps used to reach `t`, and their size.
    pub fn steps_for(&self, t: f64) -> (usize, f64) {
        let n = ceil(t / self.base_step()).max(1.0);
        (n as usize, t / n)
    }

    pub fn apply(&self, f: &RadialFunction, t: f64) -> Result<RadialFunction> {
        check_positive("t", t)?;
        if !f.same_grid(&RadialFunction::zero(self.grid.clone())) {
            return Err(Error::GridMismatch);
        }
        let m = self.grid.len();
        let (mut u, remaining) = if f.singular_power() > 0.0 {
            let t1 = t.min(STARTUP_STEPS * self.base_step());
            let targets: Vec<f64> = (0..=m).map(|i| i as f64 * self.h).collect();
            let mut u = self.free.apply_at(f, t1, &targets)?;
            u.truncate(m);
            (u, t - t1)
        } else {
            (self.project(f), t)
        };
        if remaining > 0.0 {
            let (steps, dt) = self.steps_for(remaining);
            self.crank_nicolson(&mut u, steps, dt);
        }
        let mut values: Vec<f64> = u[1..].to_vec();
        values.push(0.0);
        RadialFunction::new(self.grid.clone(), values, 0.0, self.grid.radius())
    }

    /// `∫ f` over the ball divided by `|S^{N-1}|`, summed over the scheme's
    /// own cells. This is the quantity the scheme never increases.
    pub fn mass(&self, f: &RadialFunction) -> Result<f64> {
        if !f.same_grid(&RadialFunction::zero(self.grid.clone())) {
            return Err(Error::GridMismatch);
        }
        Ok(self
            .project(f)
            .iter()
            .zip(&self.volumes)
            .map(|(u, v)| u * v)
            .sum())
    }

    /// Cell values at `s_0..s_{M-1}`; the cell straddling the support edge
    /// keeps only its inside volume fraction.
    fn project(&self, f: &RadialFunction) -> Vec<f64> {
        let m = self.grid.len();
        let n = self.grid.dimension() as f64;
        let mut u = Vec::with_capacity(m);
        u.push(f.values()[0]);
        u.extend_from_slice(&f.values()[..m - 1]);
        let a = f.support_radius();
        let h = self.h;
        let edge = (a / h + 0.5) as usize;
        if edge >= 1 && edge < m && a < self.grid.radius() {
            let s = edge as f64 * h;
            let inside = if s <= a {
                f.values()[edge - 1]
            } else {
                f.values()[edge.saturating_sub(2)]
            };
            let lo = (s - 0.5 * h).max(0.0);
            let fraction = ((pow(a.min(s + 0.5 * h), n) - pow(lo, n)) / n) / self.volumes[edge];
            u[edge] = inside * fraction.clamp(0.0, 1.0);
        }
        u
    }

    fn crank_nicolson(&self, u: &mut [f64], steps: usize, dt: f64) {
        let m = u.len();
        let half = 0.5 * dt;
        // factor (I - dt/2 L) once; Thomas forward sweep coefficients
        let mut c_prime = alloc::vec![0.0; m];
        let mut denom = alloc::vec![0.0; m];
        for i in 0..m {
            let a = -half * self.lower[i];
            let b = 1.0 - half * self.diag[i];
            let c = -half * self.upper[i];
            let d = if i == 0 { b } else { b - a * c_prime[i - 1] };
            denom[i] = d;
            c_prime[i] = c / d;
        }
        let mut rhs = alloc::vec![0.0; m];
        for _ in 0..steps {
            for i in 0..m {
                let left = if i == 0 { 0.0 } else { u[i - 1] };
                let right = if i + 1 < m { u[i + 1] } else { 0.0 };
                rhs[i] = u[i]
                    + half * (self.lower[i] * left + self.diag[i] * u[i] + self.upper[i] * right);
            }
            let mut prev = 0.0;
            for i in 0..m {
                let a = -half * self.lower[i];
                let value = if i == 0 { rhs[0] } else { rhs[i] - a * prev };
                prev = value / denom[i];
                rhs[i] = prev;
            }
            u[m - 1] = rhs[m - 1];
            for i in (0..m - 1).rev() {
                u[i] = rhs[i] - c_prime[i] * u[i + 1];
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::{exp, sin};
    use core::f64::consts::PI;

    #[test]
    fn first_eigenmode_decays_at_its_rate() {
        // N = 3: sin(πs/R)/s decays like e^{-(π/R)^2 t}; N = 1: cos(πs/2R) like e^{-(π/2R)^2 t}
        let engine = DirichletEngine::new(3, 1.0, 400).unwrap();
        let f = RadialFunction::from_fn(engine.grid().clone(), |s| sin(PI * s) / (PI * s)).unwrap();
        let out = engine.apply(&f, 0.1).unwrap();
        let decay = exp(-PI * PI * 0.1);
        for (&v, &g) in out.values().iter().zip(f.values()) {
            assert!((v - decay * g).abs() < 1e-4, "{v} vs {}", decay * g);
        }
        let engine = DirichletEngine::new(1, 1.0, 400).unwrap();
        let f = RadialFunction::from_fn(engine.grid().clone(), |s| crate::math::cos(0.5 * PI * s))
            .unwrap();
        let out = engine.apply(&f, 0.2).unwrap();
        let decay = exp(-0.25 * PI * PI * 0.2);
        for (&v, &g) in out.values().iter().zip(f.values()) {
            assert!((v - decay * g).abs() < 1e-4);
        }
    }

    #[test]
    fn boundary_value_is_zero() {
        let engine = DirichletEngine::new(2, 2.0, 128).unwrap();
        let f = RadialFunction::from_fn(engine.grid().clone(), |_| 1.0).unwrap();
        let out = engine.apply(&f, 0.05).unwrap();
        assert_eq!(*out.values().last().unwrap(), 0.0);
        assert!(out
            .values()
            .iter()
            .all(|&v| (0.0..=1.0 + 1e-12).contains(&v)));
    }

    #[test]
    fn step_policy() {
        let engine = DirichletEngine::new(3, 4.0, 256).unwrap();
        let (n, dt) = engine.steps_for(0.1);
        assert!(dt <= engine.base_step() * (1.0 + 1e-12));
        assert!((n as f64 * dt - 0.1).abs() < 1e-14);
    }
}
