use std::sync::LazyLock;

use proptest::prelude::*;
use warplab_core::geometry::{
    bakry_emery_k, default_grid, laplacian_rho, laplacian_rho_sq, ricci_bounds, ModelManifold, RadialPotential,
};

static BUILTINS: LazyLock<Vec<ModelManifold>> = LazyLock::new(|| {
    vec![
        ModelManifold::flat(2).unwrap(),
        ModelManifold::flat(3).unwrap(),
        ModelManifold::hyperbolic(2).unwrap(),
        ModelManifold::hyperbolic(4).unwrap(),
        ModelManifold::paper_surface(1.0).unwrap(),
        ModelManifold::paper_surface(0.25).unwrap(),
        ModelManifold::power_surface(2, 1e-5, 3.0).unwrap(),
        ModelManifold::power_surface(3, 1e-3, 2.0).unwrap(),
    ]
});

fn builtins() -> &'static [ModelManifold] {
    &BUILTINS
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

// Central differences of ln w at step 1e-4 (relative to r below 1), so the
// check stays meaningful where w overflows.
fn fd_step(r: f64) -> f64 {
    1e-4 * r.min(1.0)
}

proptest! {
    #[test]
    fn warp_positive_and_log_derivatives_consistent(idx in 0usize..8, r in 1e-3f64..50.0) {
        let m = &builtins()[idx];
        let w = &m.warp;
        prop_assert!(w.log_value(r).is_finite());
        prop_assert!(w.value(r) > 0.0);
        let h = fd_step(r);
        let fd1 = (w.log_value(r + h) - w.log_value(r - h)) / (2.0 * h);
        prop_assert!(rel(fd1, w.log_derivative(r)) <= 1e-6, "{}: {fd1} vs {}", m.name, w.log_derivative(r));
        // (ln w)'' = w''/w - (w'/w)²
        let fd2 = (w.log_derivative(r + h) - w.log_derivative(r - h)) / (2.0 * h);
        let lw1 = w.log_derivative(r);
        let exact = w.curvature_ratio(r) - lw1 * lw1;
        prop_assert!((fd2 - exact).abs() <= 1e-6 * (exact.abs() + lw1 * lw1), "{}: {fd2} vs {exact}", m.name);
    }

    #[test]
    fn warp_value_derivatives_where_representable(idx in 0usize..4, r in 1e-2f64..50.0) {
        let w = &builtins()[idx].warp;
        let h = 1e-4;
        let fd1 = (w.value(r + h) - w.value(r - h)) / (2.0 * h);
        let fd2 = (w.value(r + h) - 2.0 * w.value(r) + w.value(r - h)) / (h * h);
        prop_assert!(rel(fd1, w.d1(r)) <= 1e-6);
        if w.d2(r).abs() > 1e-8 * w.value(r) {
            prop_assert!(rel(fd2, w.d2(r)) <= 1e-5);
        } else {
            prop_assert!(fd2.abs() <= 1e-4 * w.value(r).max(1.0));
        }
    }

    #[test]
    fn flat_ricci_is_zero(d in 2usize..6, r in 1e-3f64..50.0) {
        prop_assert_eq!(ricci_bounds(&ModelManifold::flat(d).unwrap(), r).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn flat_gaussian_bakry_emery_is_delta(delta in 0.1f64..10.0, d in 2usize..5) {
        let k = bakry_emery_k(&ModelManifold::flat(d).unwrap(), &RadialPotential::Gaussian { delta }, &default_grid()).unwrap();
        prop_assert_eq!(k, delta);
    }

    #[test]
    fn generator_on_r_squared(idx in 0usize..8, r in 0.05f64..20.0) {
        let m = &builtins()[idx];
        let v = RadialPotential::Gaussian { delta: 1.5 };
        let (l, l2) = laplacian_rho(m, &v, r).unwrap();
        prop_assert!((2.0 + 2.0 * r * l - l2).abs() <= 1e-12 * (2.0 + (2.0 * r * l).abs()));
        let h = 1e-4 * r.min(1.0);
        let f = |x: f64| x * x;
        let f1 = (f(r + h) - f(r - h)) / (2.0 * h);
        let f2 = (f(r + h) - 2.0 * f(r) + f(r - h)) / (h * h);
        let generator = f2 + l * f1;
        let scale = f2.abs() + (l * f1).abs();
        prop_assert!((generator - l2).abs() <= 1e-6 * scale, "{generator} vs {l2}");
    }
}

#[test]
fn paper_surface_ricci_grows_like_four_k_squared_r_squared() {
    for k in [0.5, 1.0, 2.0] {
        let m = ModelManifold::paper_surface(k).unwrap();
        let (radial, _) = ricci_bounds(&m, 100.0).unwrap();
        let ratio = -radial / (4.0 * k * k * 1e4);
        assert!((ratio - 1.0).abs() < 0.02, "{k}: {ratio}");
    }
}

#[test]
fn laplacian_rho_sq_has_pole_limit_2d() {
    for m in builtins() {
        let v = RadialPotential::Gaussian { delta: 1.0 };
        let pole = laplacian_rho_sq(m, &v, 0.0);
        assert!((pole - 2.0 * m.dimension as f64).abs() < 1e-9, "{}: {pole}", m.name);
    }
}
