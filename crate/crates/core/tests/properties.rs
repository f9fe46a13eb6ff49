//! Property-based tests for the library invariants: duality, homogeneity,
//! exactness of constant kernels, classification of the built-in phi
//! families, and determinism of seeded runs.

use orlicz_core::bodies::{random_body, BodyClass, ConvexBody};
use orlicz_core::functionals::{affine_orlicz, OptimizerOpts};
use orlicz_core::grid::{sphere_measure, SphereGrid};
use orlicz_core::mixed;
use orlicz_core::orlicz::{Class, OrliczFunction};
use proptest::prelude::*;

fn grid2() -> SphereGrid {
    SphereGrid::build(2, 128).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 16, ..ProptestConfig::default() })]

    /// Quadrature weights sum to the sphere measure on every valid grid.
    #[test]
    fn grid_weights_sum(res in 2usize..80) {
        let grid = SphereGrid::build(2, res * 2).unwrap();
        let total: f64 = grid.weights.iter().sum();
        prop_assert!((total - sphere_measure(2)).abs() < 1e-10);
    }

    /// Support/radial duality: rho_K(u) * h_{K polar}(u) = 1 pointwise.
    #[test]
    fn polar_duality(seed in 0u64..500) {
        let grid = grid2();
        let k = random_body(2, seed, BodyClass::Polytope).unwrap();
        let polar = k.polar().unwrap();
        let h = polar.support_profile(&grid).unwrap();
        let rho = k.radial_profile(&grid).unwrap();
        for (a, b) in rho.iter().zip(&h) {
            prop_assert!((a * b - 1.0).abs() < 1e-9);
        }
    }

    /// V_phi(K, K) = |K| whenever phi(1) = 1.
    #[test]
    fn v_phi_diagonal(seed in 0u64..500, p in -0.9f64..3.0) {
        prop_assume!(p.abs() > 1e-3);
        let phi = OrliczFunction::power(p, 2).unwrap();
        let k = random_body(2, seed, BodyClass::Polytope).unwrap();
        let v = mixed::v_phi(&k, &k, &phi, None).unwrap().value;
        let vol = k.volume().unwrap();
        prop_assert!((v - vol).abs() < 1e-10 * vol);
    }

    /// L_p homogeneity in the second argument: V_p(K, sQ) = s^p V_p(K, Q).
    #[test]
    fn v_p_homogeneity(seed in 0u64..300, s in 0.3f64..3.0, p in 0.2f64..3.0) {
        let phi = OrliczFunction::power(p, 2).unwrap();
        let k = random_body(2, seed, BodyClass::Polytope).unwrap();
        let q = random_body(2, seed + 1000, BodyClass::Polytope).unwrap();
        let v = mixed::v_phi(&k, &q, &phi, None).unwrap().value;
        let vs = mixed::v_phi(&k, &q.scaled(s), &phi, None).unwrap().value;
        prop_assert!((vs - s.powf(p) * v).abs() < 1e-9 * vs.abs().max(v.abs()));
    }

    /// Volume scales with degree n and vrad with degree 1.
    #[test]
    fn volume_scaling(seed in 0u64..300, s in 0.2f64..4.0) {
        let k = random_body(2, seed, BodyClass::Polytope).unwrap();
        let v = k.volume().unwrap();
        let vs = k.scaled(s).volume().unwrap();
        prop_assert!((vs - s * s * v).abs() < 1e-9 * vs);
        let r = k.vrad_dim(2).unwrap();
        let rs = k.scaled(s).vrad_dim(2).unwrap();
        prop_assert!((rs - s * r).abs() < 1e-9 * rs);
    }

    /// Power classification: p > 0 or p < -n lands in Phi; -n < p < 0 in Psi.
    #[test]
    fn power_classification(p in -6.0f64..6.0) {
        prop_assume!((p + 2.0).abs() > 0.05 && p.abs() > 0.05);
        let phi = OrliczFunction::power(p, 2).unwrap();
        let expected = if p > 0.0 || p < -2.0 { Class::Phi } else { Class::Psi };
        prop_assert_eq!(phi.class(), expected);
    }

    /// Constant phi makes the affine functional exactly a * n * |K|.
    #[test]
    fn constant_phi_exact(seed in 0u64..300, a in 0.2f64..5.0) {
        let grid = grid2();
        let phi = OrliczFunction::constant(a, 2).unwrap();
        let k = random_body(2, seed, BodyClass::Polytope).unwrap();
        let r = affine_orlicz(&k, &phi, &grid, &OptimizerOpts::default()).unwrap();
        let expect = a * 2.0 * k.volume().unwrap();
        prop_assert!((r.value - expect).abs() <= 1e-12 * expect);
    }

    /// Identical seeds reproduce the optimizer value bit-for-bit.
    #[test]
    fn seeded_determinism(seed in 0u64..100) {
        let grid = SphereGrid::build(2, 256).unwrap();
        let phi = OrliczFunction::power(-1.0, 2).unwrap();
        let k = random_body(2, seed, BodyClass::Smooth).unwrap();
        let opts = OptimizerOpts { restarts: 2, max_iters: 300, seed, ..Default::default() };
        let a = affine_orlicz(&k, &phi, &grid, &opts).unwrap();
        let b = affine_orlicz(&k, &phi, &grid, &opts).unwrap();
        prop_assert_eq!(a.value.to_bits(), b.value.to_bits());
    }

    /// Body JSON round-trips to bit-identical support evaluations.
    #[test]
    fn body_json_roundtrip(seed in 0u64..300) {
        let grid = grid2();
        let k = random_body(2, seed, BodyClass::Polytope).unwrap();
        let text = serde_json::to_string(&k).unwrap();
        let back: ConvexBody = serde_json::from_str(&text).unwrap();
        let h1 = k.support_profile(&grid).unwrap();
        let h2 = back.support_profile(&grid).unwrap();
        for (a, b) in h1.iter().zip(&h2) {
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }
    }
}
