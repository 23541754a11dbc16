use std::sync::Arc;

use heatlab_core::radial_field::{RadialFunction, RadialGrid};
use heatlab_core::semigroup::{heat_apply, SemigroupEngine};
use proptest::prelude::*;

fn engines(n: usize) -> [SemigroupEngine; 2] {
    [
        SemigroupEngine::free_space(Arc::new(RadialGrid::new(n, 8.0, 256, 3.0).unwrap())),
        SemigroupEngine::dirichlet_ball(n, 4.0, 256).unwrap(),
    ]
}

/// `Σ c_j e^{-s^2/4σ_j}`
fn mixture(engine: &SemigroupEngine, terms: &[(f64, f64)]) -> RadialFunction {
    RadialFunction::from_fn(engine.grid().clone(), |s| {
        terms
            .iter()
            .map(|&(c, sigma)| c * (-s * s / (4.0 * sigma)).exp())
            .sum()
    })
    .unwrap()
}

fn terms() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((0.0..2.0f64, 0.02..0.5f64), 1..4)
}

fn sup_diff(a: &RadialFunction, b: &RadialFunction) -> f64 {
    a.values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 12, ..ProptestConfig::default() })]

    #[test]
    fn semigroup_law(n in 1usize..=3, terms in terms(), s in 1e-3..1.0f64, t in 1e-3..1.0f64) {
        for engine in engines(n) {
            let f = mixture(&engine, &terms);
            let two_step = heat_apply(&engine, &heat_apply(&engine, &f, s).unwrap(), t).unwrap();
            let one_step = heat_apply(&engine, &f, s + t).unwrap();
            prop_assert!(sup_diff(&two_step, &one_step) <= 1e-5 * f.sup_norm());
        }
    }

    #[test]
    fn positivity_and_order(n in 1usize..=3, lo in terms(), extra in terms(), t in 1e-3..1.0f64) {
        for engine in engines(n) {
            let f = mixture(&engine, &lo);
            let mut both = lo.clone();
            both.extend(extra.iter().copied());
            let g = mixture(&engine, &both);
            let sf = heat_apply(&engine, &f, t).unwrap();
            let sg = heat_apply(&engine, &g, t).unwrap();
            prop_assert!(sf.values().iter().all(|&v| v >= -1e-12));
            prop_assert!(sf.values().iter().zip(sg.values()).all(|(a, b)| *a <= b + 1e-12));
        }
    }

    #[test]
    fn l1_contraction(n in 1usize..=3, terms in terms(), t in 1e-3..1.0f64) {
        let [free, ball] = engines(n);
        let f = mixture(&free, &terms);
        let mass = f.norm(1.0).unwrap();
        let after = heat_apply(&free, &f, t).unwrap().norm(1.0).unwrap();
        prop_assert!(after <= mass * (1.0 + 1e-4));
        prop_assert!((after - mass).abs() <= 1e-3 * mass);
        let SemigroupEngine::DirichletBall(cells) = &ball else { unreachable!() };
        let f = mixture(&ball, &terms);
        let mass = cells.mass(&f).unwrap();
        let after = cells.mass(&heat_apply(&ball, &f, t).unwrap()).unwrap();
        prop_assert!(after <= mass * (1.0 + 1e-6));
    }

    #[test]
    fn jensen(n in 1usize..=3, terms in terms(), t in 1e-3..1.0f64) {
        let convex: [fn(f64) -> f64; 2] = [|u| u * u, |u| u.exp_m1()];
        for engine in engines(n) {
            let f = mixture(&engine, &terms);
            let sf = heat_apply(&engine, &f, t).unwrap();
            for phi in convex {
                let lhs = sf.map(phi, 0.0).unwrap();
                let rhs = heat_apply(&engine, &f.map(phi, 0.0).unwrap(), t).unwrap();
                prop_assert!(lhs.values().iter().zip(rhs.values()).all(|(a, b)| *a <= b + 1e-6));
            }
        }
    }
}

#[test]
fn zero_stays_zero() {
    for engine in engines(3) {
        let zero = RadialFunction::zero(engine.grid().clone());
        for t in [1e-4, 0.1, 2.0] {
            assert!(heat_apply(&engine, &zero, t)
                .unwrap()
                .values()
                .iter()
                .all(|&v| v == 0.0));
        }
    }
}

#[test]
fn rejects_nonpositive_time() {
    for engine in engines(2) {
        let zero = RadialFunction::zero(engine.grid().clone());
        assert!(heat_apply(&engine, &zero, 0.0).is_err());
        assert!(heat_apply(&engine, &zero, -1.0).is_err());
    }
}
