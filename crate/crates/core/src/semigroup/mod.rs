//! The heat semigroup `S(t)` acting on radial data.

mod dirichlet;
mod free_space;
mod verify;

use alloc::sync::Arc;

pub use dirichlet::DirichletEngine;
pub use free_space::{AngularRule, FreeSpaceEngine};
pub use verify::{
    estimate_lemma2_constant, power_profile, verify_kernel_ordering, verify_lemma1_lower,
    verify_smoothing, KernelOrdering, Lemma1Report, Lemma1Row, Lemma2Estimate, Lemma2Options,
    SmoothingCheck,
};

use crate::error::{Error, Result};
use crate::radial_field::{Domain, ProblemSpec, RadialFunction, RadialGrid};

#[derive(Debug, Clone, PartialEq)]
pub enum SemigroupEngine {
    FreeSpace(FreeSpaceEngine),
    DirichletBall(DirichletEngine),
}

impl SemigroupEngine {
    pub fn free_space(grid: Arc<RadialGrid>) -> Self {
        SemigroupEngine::FreeSpace(FreeSpaceEngine::new(grid))
    }

    pub fn dirichlet_ball(dimension: usize, radius: f64, count: usize) -> Result<Self> {
        Ok(SemigroupEngine::DirichletBall(DirichletEngine::new(
            dimension, radius, count,
        )?))
    }

    /// Engine matching the domain of `spec`: free space on the default
    /// graded grid, or the ball engine with `count` uniform cells.
    pub fn for_problem(spec: &ProblemSpec, count: usize) -> Result<Self> {
        match spec.domain {
            Domain::WholeSpace => Ok(Self::free_space(Arc::new(spec.default_grid(count)?))),
            Domain::DirichletBall { radius } => Self::dirichlet_ball(spec.dimension, radius, count),
        }
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        match self {
            SemigroupEngine::FreeSpace(e) => e.grid(),
            SemigroupEngine::DirichletBall(e) => e.grid(),
        }
    }

    pub fn dimension(&self) -> usize {
        self.grid().dimension()
    }

    pub fn is_free_space(&self) -> bool {
        matches!(self, SemigroupEngine::FreeSpace(_))
    }

    pub fn apply(&self, f: &RadialFunction, t: f64) -> Result<RadialFunction> {
        match self {
            SemigroupEngine::FreeSpace(e) => e.apply(f, t),
            SemigroupEngine::DirichletBall(e) => e.apply(f, t),
        }
    }
}

/// `S(t)f`. The result is regular (`singular_power = 0`).
pub fn heat_apply(engine: &SemigroupEngine, f: &RadialFunction, t: f64) -> Result<RadialFunction> {
    if f.values().iter().any(|v| v.is_nan()) {
        return Err(Error::NonFinite {
            what: "heat_apply input",
        });
    }
    engine.apply(f, t)
}
