mod common;

use common::{ou_semigroup, Threads};
use proptest::prelude::*;
use warplab_core::coupling::{
    constant_drift_weights, harnack_chain_log_rhs, harnack_check, index_form_bound, simulate_comparison, CouplingModel,
    HarnackFunction, HarnackPathway, HarnackPlan, HarnackTuple, SemigroupSamples, XiMode,
};
use warplab_core::diffusion::SimConfig;
use warplab_core::exec::Sequential;
use warplab_core::geometry::{default_grid, ModelManifold, RadialPotential, ScenarioConditions};
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

proptest! {
    #[test]
    fn index_form_is_monotone_and_bounded(k in 0.0f64..50.0, dk in 0.0f64..5.0, d in 2usize..6, rho in 0.0f64..20.0, drho in 0.0f64..2.0) {
        let base = index_form_bound(k, d, rho);
        prop_assert!(base >= 0.0);
        prop_assert!(index_form_bound(k + dk, d, rho) >= base);
        prop_assert!(index_form_bound(k, d, rho + drho) >= base);
        // tanh ≤ 1 and tanh x ≤ x
        let dm1 = (d - 1) as f64;
        prop_assert!(base <= 2.0 * (k * dm1).sqrt() + 1e-12);
        prop_assert!(base <= k * rho + 1e-12);
    }
}

#[test]
fn schedule_dominates_and_couples() {
    let (m, v, sc) = flat_gauss();
    let model = CouplingModel::thm11(&m, &v, &sc, &default_grid()).unwrap();
    for (r1, r2) in [(1.0, 3.0), (0.5, 4.0)] {
        for t in [1.0, 5.0] {
            let cfg = SimConfig {
                paths: 2_000,
                horizon: t,
                seed: 11,
                ..Default::default()
            };
            let ens = simulate_comparison(&m, &v, &model, &cfg, r1, r2, false, &Sequential).unwrap();
            assert!(ens.dominance_excess <= 1e-9, "{}", ens.dominance_excess);
            assert!(ens.coupled_fraction >= 0.99, "{r1},{r2},{t}: {}", ens.coupled_fraction);
            for rec in &ens.records {
                assert!(rec.tau.unwrap() <= t + cfg.step);
            }
        }
    }
}

#[test]
fn comparison_is_identical_across_worker_counts() {
    let (m, v, sc) = flat_gauss();
    let model = CouplingModel::thm11(&m, &v, &sc, &default_grid()).unwrap();
    let cfg = SimConfig {
        paths: 300,
        horizon: 1.0,
        seed: 12,
        ..Default::default()
    };
    let a = simulate_comparison(&m, &v, &model, &cfg, 1.0, 3.0, true, &Sequential).unwrap();
    let b = simulate_comparison(&m, &v, &model, &cfg, 1.0, 3.0, true, &Threads(3)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn undriven_distance_decays_at_least_at_rate_delta() {
    let (m, v, sc) = flat_gauss();
    let model = CouplingModel::thm11(&m, &v, &sc, &default_grid())
        .unwrap()
        .with_xi_mode(XiMode::Zero);
    let cfg = SimConfig {
        paths: 200,
        horizon: 5.0,
        seed: 13,
        ..Default::default()
    };
    let ens = simulate_comparison(&m, &v, &model, &cfg, 1.0, 3.0, true, &Sequential).unwrap();
    for rec in &ens.records {
        assert!(rec.log_r == 0.0);
        // the constant pair term fixes the plateau; beyond it the slope is -δ
        let tail: Vec<(f64, f64)> = rec.trace.iter().copied().filter(|p| p.0 <= 1.0).collect();
        let (t0, p0) = tail[0];
        let (t1, p1) = *tail.last().unwrap();
        let plateau = model.pair_constant / sc.delta;
        let rate = -((p1 - plateau).max(1e-300) / (p0 - plateau)).ln() / (t1 - t0);
        assert!(p1 > plateau || rec.tau.is_some());
        assert!(rate >= 0.95 * sc.delta, "{rate}");
    }
}

#[test]
fn girsanov_weights_are_martingale_normalised() {
    let w = constant_drift_weights(1.0, 1.0, 1e-3, 100_000, 14, &Sequential);
    let r: Vec<f64> = w.iter().map(|x| x.exp()).collect();
    let r2: Vec<f64> = w.iter().map(|x| (2.0 * x).exp()).collect();
    let e1 = MeanEstimate::from_samples(&r);
    let e2 = MeanEstimate::from_samples(&r2);
    assert!((e1.mean - 1.0).abs() <= 3.0 * e1.se, "{e1:?}");
    assert!((e2.mean - 0.5f64.exp()).abs() <= 3.0 * e2.se, "{e2:?}");
}

#[test]
fn harnack_equal_points_and_constant_function() {
    let (m, v, sc) = flat_gauss();
    let plan = HarnackPlan {
        alpha: 2.0,
        calibration: vec![HarnackTuple { x: 1.0, y: 2.0, t: 1.0 }],
        held_out: vec![HarnackTuple { x: 1.5, y: 1.5, t: 1.0 }],
        functions: vec![HarnackFunction::GaussianBump, HarnackFunction::Constant(3.0)],
        pathway: HarnackPathway::Thm11,
    };
    let cfg = SimConfig {
        paths: 2_000,
        seed: 15,
        ..Default::default()
    };
    let out = harnack_check(&m, &v, &sc, &cfg, &plan, &Sequential).unwrap();
    assert_eq!(out.verdict(), Verdict::Pass);
    for e in out.calibration.iter().chain(&out.held_out) {
        if e.function == HarnackFunction::Constant(3.0) {
            assert!((e.implied_c * e.weight).abs() < 1e-12);
        }
    }
}

#[test]
fn harnack_frozen_constant_against_kernel_oracle() {
    let (m, v, sc) = flat_gauss();
    let plan = HarnackPlan::standard(2.0, HarnackPathway::Thm11);
    assert!(plan.is_disjoint());
    let cfg = SimConfig {
        paths: 20_000,
        seed: 16,
        ..Default::default()
    };
    let out = harnack_check(&m, &v, &sc, &cfg, &plan, &Sequential).unwrap();
    assert_eq!(out.reports.len(), plan.held_out.len() * plan.functions.len());
    assert!(
        out.reports.iter().all(|r| r.verdict != Verdict::Fail),
        "{:?}",
        out.reports
    );
    for e in out.held_out.iter() {
        let f = e.function;
        let exact = ou_semigroup(2.0, e.tuple.y, e.tuple.t, |r| f.value(r));
        assert!((e.pf_y.mean - exact).abs() <= 3.0 * e.pf_y.se, "{e:?} vs {exact}");
        // f^α is largest at the pole, where a naive radial step is biased
        let exact = ou_semigroup(2.0, e.tuple.x, e.tuple.t, |r| f.value(r).powi(2));
        assert!((e.pfa_x.mean - exact).abs() <= 3.0 * e.pfa_x.se, "{e:?} vs {exact}");
    }
}

#[test]
fn chain_through_measured_weights_dominates() {
    let (m, v, sc) = flat_gauss();
    let model = CouplingModel::thm11(&m, &v, &sc, &default_grid()).unwrap();
    let cfg = SimConfig {
        paths: 20_000,
        horizon: 1.0,
        seed: 17,
        ..Default::default()
    };
    let (x, y, alpha) = (1.0, 2.0, 2.0);
    let weights = simulate_comparison(&m, &v, &model, &cfg, x, y, false, &Sequential).unwrap();
    let samples = SemigroupSamples::simulate(&m, &v, &cfg, &[(x, 1.0), (y, 1.0)], &Sequential).unwrap();
    let f = HarnackFunction::GaussianBump;
    let pf_y = samples.expectation(y, 1.0, |r| f.value(r)).unwrap();
    let pfa_x = samples.expectation(x, 1.0, |r| f.value(r).powf(alpha)).unwrap();
    let (log_rhs, se) = harnack_chain_log_rhs(&pfa_x, &weights, alpha);
    let log_lhs = alpha * pf_y.mean.ln();
    let se_total = (se * se + (alpha * pf_y.se / pf_y.mean).powi(2)).sqrt();
    assert!(log_rhs - log_lhs >= -3.0 * se_total, "{log_rhs} vs {log_lhs}");
}
