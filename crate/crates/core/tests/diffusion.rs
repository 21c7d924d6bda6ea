mod common;

use common::Threads;
use warplab_core::contractivity::{CurvatureGrowth, Growth, GrowthPair};
use warplab_core::diffusion::{
    check_drift_inequality, check_drift_inequality_phi, exp_functional_check, exp_functional_check_phi,
    nonexplosion_check, simulate_radial, simulate_radial_with, stationary_starts, FitPlan, SimConfig, SimRequest,
};
use warplab_core::exec::Sequential;
use warplab_core::geometry::{ModelManifold, RadialPotential, ScenarioConditions};
use warplab_core::measure::RadialMeasure;
use warplab_core::quad::{geometric_grid, uniform_grid};
use warplab_core::report::Verdict;
use warplab_core::stats::MeanEstimate;

fn flat_gauss() -> (ModelManifold, RadialPotential, ScenarioConditions) {
    (
        ModelManifold::flat(2).unwrap(),
        RadialPotential::Gaussian { delta: 2.0 },
        ScenarioConditions {
            delta: 2.0,
            ..Default::default()
        },
    )
}

/// `ln E exp(q ∫_0^T |X|² dt)` for the d-dimensional OU process
/// `dX = -δX dt + √2 dB` from `|X_0| = r`: with `a' = 4a² - 2δa + q`,
/// `b' = 2a`, the value is `d·b(T) + a(T) r²`.
fn riccati_log_mgf(q: f64, delta: f64, d: usize, r: f64, t: f64) -> f64 {
    let f = |a: f64| 4.0 * a * a - 2.0 * delta * a + q;
    let n = 20_000;
    let h = t / n as f64;
    let (mut a, mut b) = (0.0f64, 0.0f64);
    for _ in 0..n {
        let k1 = f(a);
        let k2 = f(a + 0.5 * h * k1);
        let k3 = f(a + 0.5 * h * k2);
        let k4 = f(a + h * k3);
        let a_next = a + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        // b' = 2a integrated with Simpson on the same step
        let a_mid = a + 0.5 * h * (k1 + k2) * 0.5;
        b += h / 6.0 * (2.0 * a + 8.0 * a_mid + 2.0 * a_next);
        a = a_next;
    }
    d as f64 * b + a * r * r
}

#[test]
fn ensembles_are_identical_across_worker_counts() {
    let (m, v, _) = flat_gauss();
    let cfg = SimConfig {
        paths: 257,
        horizon: 0.3,
        seed: 99,
        ..Default::default()
    };
    let acc = |r: f64| r.sin();
    let start = |i: usize| 0.5 + 0.01 * i as f64;
    let req = SimRequest {
        start: &start,
        snapshots: vec![0.1, 0.2],
        accumulator: Some(&acc),
        stream_offset: 7,
    };
    let a = simulate_radial_with(&m, &v, &cfg, &req, &Sequential).unwrap();
    let b = simulate_radial_with(&m, &v, &cfg, &req, &Threads(4)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn stationary_second_moment() {
    let (m, v, _) = flat_gauss();
    let cfg = SimConfig {
        paths: 20_000,
        horizon: 3.0,
        seed: 1,
        ..Default::default()
    };
    let ens = simulate_radial(&m, &v, &cfg, 1.0, &Sequential).unwrap();
    let r2: Vec<f64> = ens.terminal_radii().iter().map(|r| r * r).collect();
    let e = MeanEstimate::from_samples(&r2);
    assert!((e.mean - 1.0).abs() <= 3.0 * e.se, "{e:?}");
    assert!(ens.min_radius() >= cfg.pole_guard * (1.0 - 1e-12));
}

#[test]
fn second_moment_relaxes_monotonically() {
    let (m, v, _) = flat_gauss();
    let times: Vec<f64> = (1..=10).map(|k| 0.1 * k as f64).collect();
    let cfg = SimConfig {
        paths: 5_000,
        horizon: 1.0,
        seed: 2,
        ..Default::default()
    };
    let start = |_: usize| 4.0;
    let req = SimRequest {
        start: &start,
        snapshots: times.clone(),
        accumulator: None,
        stream_offset: 0,
    };
    let ens = simulate_radial_with(&m, &v, &cfg, &req, &Sequential).unwrap();
    let means: Vec<f64> = (0..times.len())
        .map(|k| ens.radii_at(k).iter().map(|r| r * r).sum::<f64>() / cfg.paths as f64)
        .collect();
    // E r_t² = 1 + 15 e^{-4t} for the 2-d OU process with δ = 2.
    for (k, &t) in times.iter().enumerate() {
        let exact = 1.0 + 15.0 * (-4.0 * t).exp();
        assert!(
            (means[k] - exact).abs() < 0.05 * exact,
            "t={t}: {} vs {exact}",
            means[k]
        );
    }
    assert!(means.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn stationary_start_is_invariant_and_reversible() {
    let (m, v, _) = flat_gauss();
    let mu = RadialMeasure::new(&m, &v);
    let n = 20_000;
    let starts = stationary_starts(&mu, n, 5, 1e-3).unwrap();
    let start = |i: usize| starts[i];
    let cfg = SimConfig {
        paths: n,
        horizon: 1.0,
        seed: 5,
        ..Default::default()
    };
    let ens = simulate_radial_with(&m, &v, &cfg, &SimRequest::fixed(&start), &Sequential).unwrap();
    let f = |r: f64| (-r * r).exp();
    let g = |r: f64| 1.0 / (1.0 + r);
    for h in [&f as &dyn Fn(f64) -> f64, &g] {
        let target = mu.expectation(&|r| h(r)).finite().unwrap();
        let xs: Vec<f64> = ens.terminal_radii().iter().map(|&r| h(r)).collect();
        let e = MeanEstimate::from_samples(&xs);
        assert!((e.mean - target).abs() <= 4.0 * e.se, "{e:?} vs {target}");
    }
    // ⟨P_T f, g⟩ - ⟨f, P_T g⟩ from the same stationary pairs.
    let diff: Vec<f64> = ens
        .paths
        .iter()
        .zip(&starts)
        .map(|(p, &r0)| g(r0) * f(p.terminal) - f(r0) * g(p.terminal))
        .collect();
    let e = MeanEstimate::from_samples(&diff);
    assert!(e.mean.abs() <= 4.0 * e.se, "{e:?}");
    assert!(ens.reflected_fraction() < 0.01);
}

#[test]
fn exp_functional_matches_riccati_oracle() {
    let (m, v, sc) = flat_gauss();
    let cfg = SimConfig {
        paths: 20_000,
        seed: 3,
        ..Default::default()
    };
    let plan = FitPlan {
        calibration: FitPlan::grid(&[0.5, 1.0], &[0.5, 1.0]),
        held_out: FitPlan::grid(&[1.5], &[1.0]),
    };
    assert!(plan.is_disjoint());
    let rep = exp_functional_check(&m, &v, &sc, &cfg, &plan, 1.0, &Sequential).unwrap();
    for e in rep.calibration.iter().chain(&rep.held_out) {
        let exact = riccati_log_mgf(0.25, 2.0, 2, e.r, e.t);
        let tol = 3.0 * e.estimate.log_se + 0.01 * exact.abs();
        assert!(
            (e.estimate.log_mean - exact).abs() <= tol,
            "r={} T={}: {} vs {exact}",
            e.r,
            e.t,
            e.estimate.log_mean
        );
    }
    assert!(rep.passed(), "{:?}", rep.reports);
    assert!(rep.fitted_c2 >= 0.0);
}

#[test]
fn exp_functional_is_stable_under_step_halving() {
    let (m, v, sc) = flat_gauss();
    let plan = FitPlan {
        calibration: vec![(0.5, 1.0)],
        held_out: vec![(1.0, 1.0)],
    };
    let run = |step: f64| {
        let cfg = SimConfig {
            paths: 20_000,
            step,
            seed: 4,
            ..Default::default()
        };
        exp_functional_check(&m, &v, &sc, &cfg, &plan, 1.0, &Sequential)
            .unwrap()
            .held_out[0]
            .estimate
    };
    let (a, b) = (run(2e-3), run(1e-3));
    let width = 2.0 * 1.96 * a.log_se.max(b.log_se);
    assert!((a.log_mean - b.log_mean).abs() < width, "{a:?} {b:?}");
}

#[test]
fn short_horizon_functional_is_near_one() {
    let (m, v, sc) = flat_gauss();
    let cfg = SimConfig {
        paths: 1_000,
        horizon: 1e-3,
        ..Default::default()
    };
    let plan = FitPlan {
        calibration: vec![(0.5, 1e-3)],
        held_out: vec![(1.0, 1e-3)],
    };
    let rep = exp_functional_check(&m, &v, &sc, &cfg, &plan, 1.0, &Sequential).unwrap();
    assert!(rep.held_out[0].estimate.log_mean.abs() < 1e-3);
    assert!(rep.passed());
}

#[test]
fn phi_functional_power_scenario_holds_on_held_out_pairs() {
    let m = ModelManifold::power_surface(2, 1e-5, 3.0).unwrap();
    let v = RadialPotential::Power { alpha: 3.0, scale: 1.0 };
    let gp = GrowthPair::power(3.0, 1e-5, 0.4 / (1.0 + 2f64.sqrt())).unwrap();
    let cfg = SimConfig {
        paths: 10_000,
        seed: 6,
        ..Default::default()
    };
    let plan = FitPlan {
        calibration: FitPlan::grid(&[0.5, 1.0], &[0.25, 0.5]),
        held_out: FitPlan::grid(&[0.75], &[0.5]),
    };
    let rep = exp_functional_check_phi(&m, &v, &gp, &cfg, &plan, &Sequential).unwrap();
    assert!(rep.passed(), "{:?}", rep.reports);
    let zero = GrowthPair::new(Growth::Constant { value: 0.0 }, CurvatureGrowth::Zero, 0.1).unwrap();
    let rep = exp_functional_check_phi(&m, &v, &zero, &cfg, &plan, &Sequential).unwrap();
    assert_eq!(rep.held_out[0].estimate.log_mean, 0.0);
    assert!(rep.passed());
}

#[test]
fn drift_fit_examples() {
    let (m, v, sc) = flat_gauss();
    let grid = geometric_grid(1e-3, 50.0, 2000);
    let fit = check_drift_inequality(&m, &v, &sc, &grid).unwrap();
    assert!((fit.constant.unwrap() - 4.0).abs() < 1e-9);
    assert!(fit.margin_trace.iter().all(|p| p.1 >= -1e-9));

    let power = ModelManifold::power_surface(2, 1e-4, 3.0).unwrap();
    let pv = RadialPotential::Power { alpha: 3.0, scale: 1.0 };
    let gp = GrowthPair::power(3.0, 1e-4, 0.4 / (1.0 + 2f64.sqrt())).unwrap();
    let short = geometric_grid(1e-3, 20.0, 2000);
    let fit = check_drift_inequality_phi(&power, &pv, &gp, &short).unwrap();
    assert!(fit.constant.is_some() && fit.min_margin >= -1e-9);

    let zero = GrowthPair::new(Growth::Constant { value: 0.0 }, CurvatureGrowth::Zero, 0.1).unwrap();
    let fit =
        check_drift_inequality_phi(&ModelManifold::flat(2).unwrap(), &RadialPotential::Zero, &zero, &grid).unwrap();
    assert!((fit.constant.unwrap() - 4.0).abs() < 1e-9);
}

#[test]
fn nonexplosion_is_bounded_by_second_moment_chain() {
    let (m, v, sc) = flat_gauss();
    let fit = check_drift_inequality(&m, &v, &sc, &uniform_grid(1e-3, 50.0, 2000)).unwrap();
    let c = fit.uniform_bound().unwrap();
    let cfg = SimConfig {
        paths: 5_000,
        seed: 8,
        ..Default::default()
    };
    let ens = simulate_radial(&m, &v, &cfg, 1.0, &Sequential).unwrap();
    for level in [2.0, 3.0, 10.0, 1e6] {
        let rep = nonexplosion_check(&ens, 1.0, level, c);
        assert_eq!(rep.verdict, Verdict::Pass, "{rep:?}");
    }
    assert_eq!(nonexplosion_check(&ens, 1.0, 1e6, c).fraction, 0.0);
}
