use proptest::prelude::*;
use warplab_core::contractivity::{
    c_lambda, check_condition_45, fit_moment_drift, gamma1_inverse, gamma2_inverse, hyper_super_ultra_verdict,
    moment_level_log, sup_moment_bound, sup_moment_bound_log, ContractivityEvidence, CurvatureGrowth, Growth,
    GrowthPair,
};
use warplab_core::diffusion::{simulate_radial, SimConfig};
use warplab_core::exec::Sequential;
use warplab_core::geometry::{ModelManifold, RadialPotential};
use warplab_core::quad::{geometric_grid, uniform_grid};
use warplab_core::report::Verdict;
use warplab_core::stats::MeanEstimate;

const THETA: f64 = 0.4 / (1.0 + std::f64::consts::SQRT_2);

fn power(alpha: f64) -> GrowthPair {
    GrowthPair::power(alpha, 1e-5, THETA).unwrap()
}

#[test]
fn phi_derivative_is_gamma1() {
    for alpha in [1.5, 3.0, 5.0] {
        let gp = power(alpha);
        for r in uniform_grid(0.01, 20.0, 200) {
            let h = 1e-5 * r;
            let fd = (gp.phi_fn(r + h) - gp.phi_fn(r - h)) / (2.0 * h);
            assert!((fd - gp.gamma1(r)).abs() <= 1e-6 * gp.gamma1(r), "α={alpha} r={r}");
        }
    }
}

#[test]
fn eta_is_convex_and_equals_r_gamma1_for_power() {
    let gp = power(3.0);
    let rs = uniform_grid(0.01, 20.0, 400);
    for w in rs.windows(3) {
        let (a, b, c) = (gp.eta_fn(w[0]), gp.eta_fn(w[1]), gp.eta_fn(w[2]));
        assert!(a + c - 2.0 * b >= -1e-12 * b.max(1.0));
    }
    for &r in &rs {
        let ratio = gp.eta_fn(r) / (r * gp.gamma1(r));
        assert!((ratio - 1.0).abs() < 1e-12, "{ratio}");
    }
}

#[test]
fn gammas_are_monotone_and_inverses_compose() {
    let gp = power(3.0);
    let rs = geometric_grid(1e-3, 1e3, 300);
    for w in rs.windows(2) {
        assert!(gp.gamma1(w[1]) > gp.gamma1(w[0]));
        assert!(gp.gamma2(w[1]).unwrap() < gp.gamma2(w[0]).unwrap());
    }
    for &r in &rs {
        let back = gamma1_inverse(&gp, gp.gamma1(r)).unwrap();
        assert!((back - r).abs() <= 1e-8 * r.max(1.0));
        let back = gamma2_inverse(&gp, gp.gamma2(r).unwrap()).unwrap();
        assert!((back - r).abs() <= 1e-8 * r.max(1.0));
    }
    // the bisection path used for non-power growth agrees with the closed form
    let custom = GrowthPair::new(Growth::Custom(|s| s * s), CurvatureGrowth::Zero, THETA).unwrap();
    for s in [0.1, 1.0, 10.0] {
        let a = gamma1_inverse(&custom, s).unwrap();
        let b = gamma1_inverse(&gp, s).unwrap();
        assert!((a - b).abs() <= 1e-6 * b.max(1.0), "{a} vs {b}");
    }
}

#[test]
fn condition_verdicts_follow_growth() {
    let grid_r = geometric_grid(1e-3, 50.0, 400);
    let grid_t = geometric_grid(1e-3, 50.0, 100);
    for alpha in [1.5, 3.0] {
        assert!(power(alpha).gamma2_finite());
    }
    let constant = GrowthPair::new(Growth::Constant { value: 2.0 }, CurvatureGrowth::Zero, THETA).unwrap();
    assert!(!constant.gamma2_finite());
    let rep = check_condition_45(&power(3.0), 2, &grid_r, &grid_t).unwrap();
    assert!(rep.pass);
}

#[test]
fn sup_moment_bound_dominates_simulation() {
    let m = ModelManifold::power_surface(2, 1e-5, 3.0).unwrap();
    let v = RadialPotential::Power { alpha: 3.0, scale: 1.0 };
    let gp = power(3.0);
    let (lambda, t) = (0.05, 0.5);
    let c_drift = fit_moment_drift(&m, &v, &gp, lambda, &geometric_grid(1e-3, 50.0, 2000)).unwrap();
    for r0 in [0.5, 1.0, 3.0] {
        let cfg = SimConfig {
            paths: 10_000,
            horizon: t,
            seed: 21,
            ..Default::default()
        };
        let ens = simulate_radial(&m, &v, &cfg, r0, &Sequential).unwrap();
        let xs: Vec<f64> = ens.terminal_radii().iter().map(|r| (lambda * r * r).exp()).collect();
        let e = MeanEstimate::from_samples(&xs);
        let b = sup_moment_bound(&gp, lambda, t, (lambda * r0 * r0).exp(), c_drift).unwrap();
        assert!(b.bound.is_finite());
        assert!(e.mean <= b.bound + 3.0 * e.se, "r0={r0}: {} vs {}", e.mean, b.bound);
    }
}

#[test]
fn log_form_moment_bound_matches_direct_form() {
    let m = ModelManifold::power_surface(2, 1e-5, 3.0).unwrap();
    let v = RadialPotential::Power { alpha: 3.0, scale: 1.0 };
    let gp = power(3.0);
    let grid = geometric_grid(1e-3, 20.0, 2000);
    for lambda in [0.05, 0.2, 0.5] {
        let c = fit_moment_drift(&m, &v, &gp, lambda, &grid).unwrap();
        let direct = (2.0 * c + 2.0 * c_lambda(&gp, lambda).unwrap().value).ln();
        let log = moment_level_log(&m, &v, &gp, lambda, &grid).unwrap();
        assert!(
            (direct - log).abs() <= 1e-9 * direct.abs().max(1.0),
            "λ={lambda}: {direct} vs {log}"
        );
        let a = sup_moment_bound(&gp, lambda, 0.5, lambda.exp(), c).unwrap();
        let b = sup_moment_bound_log(&gp, lambda, 0.5, lambda, log).unwrap();
        assert!((a.log_bound - b.log_bound).abs() <= 1e-9 * a.log_bound.abs().max(1.0));
    }
    // large λ overflows e^{λρ²} but the log form stays finite
    let log = moment_level_log(&m, &v, &gp, 10.0, &geometric_grid(1e-3, 50.0, 2000)).unwrap();
    let b = sup_moment_bound_log(&gp, 10.0, 0.5, 10.0, log).unwrap();
    assert!(log.is_finite() && b.log_bound.is_finite() && b.bound.is_infinite());
}

fn verdict() -> impl Strategy<Value = Option<Verdict>> {
    prop_oneof![
        Just(None),
        Just(Some(Verdict::Pass)),
        Just(Some(Verdict::Fail)),
        Just(Some(Verdict::Inconclusive)),
    ]
}

proptest! {
    #[test]
    fn verdict_chain_is_monotone(
        hyper in proptest::option::of(any::<bool>()),
        harnack in verdict(),
        supers in proptest::collection::vec((0.1f64..10.0, any::<bool>()), 0..6),
        ultra in proptest::option::of(any::<bool>()),
    ) {
        let ev = ContractivityEvidence {
            hyper_moment_finite: hyper,
            harnack,
            super_moments: supers,
            ultra_bounds_finite: ultra,
        };
        let v = hyper_super_ultra_verdict(&ev);
        if v.ultra == Verdict::Pass {
            prop_assert_eq!(v.super_, Verdict::Pass);
        }
        if v.super_ == Verdict::Pass {
            prop_assert_eq!(v.hyper, Verdict::Pass);
        }
    }
}
