use std::sync::Arc;

use heatlab_core::nonlinearity::{NonlinearitySpec, WeightSpec};
use heatlab_core::radial_field::{
    build_singular_data, class_membership, DataSide, Domain, ProblemSpec, RadialFunction,
    RadialGrid,
};
use proptest::prelude::*;

fn spec(n: usize, r: f64, rho: f64, k: f64, a: f64) -> ProblemSpec {
    ProblemSpec {
        dimension: n,
        r,
        rho,
        k,
        a,
        domain: Domain::WholeSpace,
        nonlinearity: NonlinearitySpec::power(3.0).unwrap(),
        weight: WeightSpec::One,
        side: DataSide::Upper,
    }
}

proptest! {
    #[test]
    fn norm_is_homogeneous(values in prop::collection::vec(-5.0..5.0f64, 64), c in -4.0..4.0f64, p in 1.0..6.0f64) {
        let grid = Arc::new(RadialGrid::new(2, 3.0, 64, 2.0).unwrap());
        let f = RadialFunction::new(grid, values, 0.0, 3.0).unwrap();
        for q in [p, f64::INFINITY] {
            let lhs = f.scaled(c).norm(q).unwrap();
            let rhs = c.abs() * f.norm(q).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1e-300));
        }
    }

    #[test]
    fn power_data_witnesses_both_classes(
        n in 1usize..=3,
        r in 1.0..4.0f64,
        frac in 0.05..0.95f64,
        k in 0.1..10.0f64,
        a in 0.2..3.0f64,
    ) {
        let rho = frac * n as f64;
        let s = spec(n, r, rho, k, a);
        let grid = Arc::new(s.default_grid(256).unwrap());
        let u0 = build_singular_data(&s, grid).unwrap();
        let m = class_membership(&u0, rho, r).unwrap();
        let (up, lo) = (m.upper.unwrap(), m.lower.unwrap());
        prop_assert!((up.k - k).abs() <= 1e-9 * k && (up.a - a).abs() <= 1e-9 * a);
        prop_assert!((lo.k - k).abs() <= 1e-9 * k && (lo.a - a).abs() <= 1e-9 * a);
    }

    #[test]
    fn power_data_norm_matches_closed_form(
        n in 1usize..=3,
        r in 1.0..4.0f64,
        frac in 0.05..0.95f64,
        k in 0.1..10.0f64,
    ) {
        let rho = frac * n as f64;
        let s = spec(n, r, rho, k, 1.0);
        let grid = Arc::new(RadialGrid::with_breakpoint(n, 8.0, 512, 3.0, 1.0).unwrap());
        let u0 = build_singular_data(&s, grid).unwrap();
        let sigma = 2.0 * std::f64::consts::PI.powf(n as f64 / 2.0) / libm::tgamma(n as f64 / 2.0);
        let exact = (k * sigma / (n as f64 - rho)).powf(1.0 / r);
        prop_assert!((u0.norm(r).unwrap() - exact).abs() <= 1e-5 * exact);
    }
}
