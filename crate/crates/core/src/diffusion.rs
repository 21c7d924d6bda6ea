//! The radial L-diffusion `dr = √2 dB + ((d-1) w'/w + V')(r) dt`, the drift
//! inequalities for `L ρ_o²`, and Monte Carlo checks of the exponential
//! functional bounds.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::SQRT_2;
#[allow(unused_imports)] // inherent float methods shadow these when std is linked
use num_traits::Float;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::contractivity::GrowthPair;
use crate::error::{Error, Result};
use crate::exec::Executor;
use crate::geometry::{laplacian_rho_sq, ModelManifold, RadialPotential, ScenarioConditions};
use crate::measure::{RadialCdf, RadialMeasure};
use crate::report::{Verdict, VerificationReport};
use crate::rng::{normal, stream, Family};
use crate::stats::{LogMeanExp, MeanEstimate};

/// Time discretisation and ensemble size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub step: f64,
    pub horizon: f64,
    pub paths: usize,
    pub seed: u64,
    pub pole_guard: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            step: 1e-3,
            horizon: 1.0,
            paths: 10_000,
            seed: 0,
            pole_guard: 1e-3,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |name: &str, constraint: &str| {
            Err(Error::InvalidParameter {
                name: name.into(),
                constraint: constraint.into(),
            })
        };
        if !(self.step > 0.0) {
            return bad("step", "step must be > 0");
        }
        if !(self.horizon >= self.step) {
            return bad("horizon", "horizon must be >= step");
        }
        if self.paths == 0 {
            return bad("paths", "paths must be >= 1");
        }
        if !(self.pole_guard > 0.0) {
            return bad("pole_guard", "pole_guard must be > 0");
        }
        Ok(())
    }

    /// Number of Euler steps needed to reach time `t`.
    pub fn steps_to(&self, t: f64) -> usize {
        ((t / self.step).round() as usize).max(1)
    }

    /// Radius below which the drift is capped instead of rejected.
    pub fn pole_zone(&self) -> f64 {
        (10.0 * (2.0 * self.step).sqrt()).max(self.pole_guard)
    }
}

/// Radial drift `b(r) = (d-1) w'/w + V'`.
pub fn radial_drift(m: &ModelManifold, v: &RadialPotential, r: f64) -> f64 {
    (m.dimension - 1) as f64 * m.warp.log_derivative(r) + v.d1(r)
}

/// Per-path outcome. Snapshot vectors are aligned with
/// [`PathEnsemble::snapshot_times`].
#[derive(Debug, Clone, PartialEq)]
pub struct PathRecord {
    pub terminal: f64,
    /// `∫_0^T r² dt` by the trapezoid rule.
    pub integral_r2: f64,
    /// `∫_0^T g(r) dt` for the user accumulator `g` (0 without one).
    pub integral_user: f64,
    pub max_radius: f64,
    pub min_radius: f64,
    pub reflections: u32,
    pub snap_radius: Vec<f64>,
    pub snap_r2: Vec<f64>,
    pub snap_user: Vec<f64>,
}

/// A seeded ensemble of radial paths.
#[derive(Debug, Clone, PartialEq)]
pub struct PathEnsemble {
    pub seed: u64,
    pub config: SimConfig,
    pub snapshot_times: Vec<f64>,
    pub paths: Vec<PathRecord>,
    pub steps_per_path: usize,
}

impl PathEnsemble {
    pub fn terminal_radii(&self) -> Vec<f64> {
        self.paths.iter().map(|p| p.terminal).collect()
    }

    /// Radii at snapshot `k`.
    pub fn radii_at(&self, k: usize) -> Vec<f64> {
        self.paths.iter().map(|p| p.snap_radius[k]).collect()
    }

    /// Fraction of Euler steps that hit the reflecting guard.
    pub fn reflected_fraction(&self) -> f64 {
        let hits: u64 = self.paths.iter().map(|p| p.reflections as u64).sum();
        hits as f64 / (self.paths.len() * self.steps_per_path) as f64
    }

    pub fn min_radius(&self) -> f64 {
        self.paths.iter().map(|p| p.min_radius).fold(f64::INFINITY, f64::min)
    }
}

/// Everything that distinguishes one simulation request from another
/// besides the scenario.
pub struct SimRequest<'a> {
    /// Start radius of path `i`.
    pub start: &'a (dyn Fn(usize) -> f64 + Sync),
    /// Times at which radius and running integrals are recorded.
    pub snapshots: Vec<f64>,
    /// Integrand of the user accumulator.
    pub accumulator: Option<&'a (dyn Fn(f64) -> f64 + Sync)>,
    /// Offset added to the path index when selecting the random stream, so
    /// that different requests under one seed stay independent.
    pub stream_offset: u64,
}

impl<'a> SimRequest<'a> {
    pub fn fixed(start: &'a (dyn Fn(usize) -> f64 + Sync)) -> Self {
        Self {
            start,
            snapshots: Vec::new(),
            accumulator: None,
            stream_offset: 0,
        }
    }
}

/// One Euler step of the Euclidean lift `X = rθ` in `R^d`, whose norm has
/// the law of the radial diffusion. The Bessel drift `(d-1)/r` is carried by
/// the norm, so only the regular remainder `(d-1)(w'/w - 1/r) + V'` is
/// stepped. The drift is capped near the pole and the radius reflected at
/// the guard. Returns the new radius and whether it was reflected.
#[inline]
pub(crate) fn euler_step(
    m: &ModelManifold,
    v: &RadialPotential,
    cfg: &SimConfig,
    r: f64,
    rng: &mut ChaCha8Rng,
) -> Result<(f64, bool)> {
    let h = cfg.step;
    let dm1 = (m.dimension - 1) as f64;
    let mut b = dm1 * (m.warp.log_derivative(r) - 1.0 / r) + v.d1(r);
    if r <= cfg.pole_zone() {
        let cap = 0.5 / h;
        b = b.clamp(-cap, cap);
    } else if !(b.abs() * h <= 1.0) {
        return Err(Error::StepTooLarge {
            radius: r,
            excess: b.abs() * h,
        });
    }
    let s = (2.0 * h).sqrt();
    let x = r + b * h + s * normal(rng);
    let mut q = x * x;
    for _ in 1..m.dimension {
        let z = normal(rng);
        q += 2.0 * h * z * z;
    }
    let mut next = q.sqrt();
    let mut reflected = false;
    if next < cfg.pole_guard {
        next = (2.0 * cfg.pole_guard - next).max(cfg.pole_guard);
        reflected = true;
    }
    Ok((next, reflected))
}

pub fn simulate_radial<E: Executor>(
    m: &ModelManifold,
    v: &RadialPotential,
    cfg: &SimConfig,
    r_start: f64,
    exec: &E,
) -> Result<PathEnsemble> {
    let start = move |_: usize| r_start;
    simulate_radial_with(m, v, cfg, &SimRequest::fixed(&start), exec)
}

pub fn simulate_radial_with<E: Executor>(
    m: &ModelManifold,
    v: &RadialPotential,
    cfg: &SimConfig,
    req: &SimRequest<'_>,
    exec: &E,
) -> Result<PathEnsemble> {
    cfg.validate()?;
    let n_steps = cfg.steps_to(cfg.horizon);
    let snap_steps: Vec<usize> = req.snapshots.iter().map(|&t| cfg.steps_to(t).min(n_steps)).collect();
    let h = cfg.step;
    let results = exec.map_indexed(cfg.paths, |i| -> Result<PathRecord> {
        let r0 = (req.start)(i);
        if !(r0 >= cfg.pole_guard) {
            return Err(Error::Domain {
                what: "simulate_radial",
                constraint: "r_start >= pole_guard",
                value: r0,
            });
        }
        let mut rng = stream(cfg.seed, Family::Radial, req.stream_offset + i as u64);
        let acc = req.accumulator;
        let mut r = r0;
        let mut g = acc.map_or(0.0, |f| f(r));
        let mut rec = PathRecord {
            terminal: r0,
            integral_r2: 0.0,
            integral_user: 0.0,
            max_radius: r0,
            min_radius: r0,
            reflections: 0,
            snap_radius: vec![0.0; snap_steps.len()],
            snap_r2: vec![0.0; snap_steps.len()],
            snap_user: vec![0.0; snap_steps.len()],
        };
        let mut next_snap = 0;
        for step in 1..=n_steps {
            let (next, reflected) = euler_step(m, v, cfg, r, &mut rng)?;
            rec.reflections += reflected as u32;
            rec.integral_r2 += 0.5 * h * (r * r + next * next);
            if let Some(f) = acc {
                let g_next = f(next);
                rec.integral_user += 0.5 * h * (g + g_next);
                g = g_next;
            }
            r = next;
            rec.max_radius = rec.max_radius.max(r);
            rec.min_radius = rec.min_radius.min(r);
            while next_snap < snap_steps.len() && snap_steps[next_snap] == step {
                rec.snap_radius[next_snap] = r;
                rec.snap_r2[next_snap] = rec.integral_r2;
                rec.snap_user[next_snap] = rec.integral_user;
                next_snap += 1;
            }
        }
        rec.terminal = r;
        Ok(rec)
    });
    let paths = results.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(PathEnsemble {
        seed: cfg.seed,
        config: *cfg,
        snapshot_times: req.snapshots.clone(),
        paths,
        steps_per_path: n_steps,
    })
}

/// `n` start radii drawn from `μ` by inverse-CDF sampling, each from its
/// own stream of the initial-condition family.
pub fn stationary_starts(mu: &RadialMeasure, n: usize, seed: u64, pole_guard: f64) -> Result<Vec<f64>> {
    let cdf = RadialCdf::new(mu, 20_000)?;
    Ok((0..n)
        .map(|i| {
            let u: f64 = stream(seed, Family::Initial, i as u64).random();
            cdf.quantile(u).max(pole_guard)
        })
        .collect())
}

/// Fitted constant of a drift inequality with its margin trace.
#[derive(Debug, Clone, PartialEq)]
pub struct DriftFit {
    /// `None` when no finite constant works.
    pub constant: Option<f64>,
    /// Coefficient of the quadratic decay term (`δ - σ√(d-1)` for the
    /// Hessian pathway).
    pub kappa: f64,
    /// `(r, rhs - lhs)` with the fitted constant.
    pub margin_trace: Vec<(f64, f64)>,
    pub min_margin: f64,
    /// `lhs(r) / r` at the end of the grid, describing the residual growth.
    pub tail_slope: f64,
    pub note: String,
}

impl DriftFit {
    /// `sup_r C₁(1 + r) - 2κr²`, a uniform bound on `L ρ_o²` when `κ > 0`.
    pub fn uniform_bound(&self) -> Option<f64> {
        let c = self.constant?;
        if self.kappa > 0.0 {
            let r = (c / (4.0 * self.kappa)).max(0.0);
            Some(c * (1.0 + r) - 2.0 * self.kappa * r * r)
        } else {
            None
        }
    }
}

/// Smallest `C` with `lhs(r) ≤ C (1 + r) - decay(r)` on `grid ∪ {0}`.
fn fit_linear_constant<L: Fn(f64) -> f64, D: Fn(f64) -> f64>(
    grid: &[f64],
    lhs: L,
    decay: D,
) -> (Option<f64>, Vec<(f64, f64)>, f64) {
    let mut pts: Vec<f64> = Vec::with_capacity(grid.len() + 1);
    pts.push(0.0);
    pts.extend(grid.iter().copied().filter(|&r| r > 0.0));
    let need: Vec<f64> = pts.iter().map(|&r| (lhs(r) + decay(r)) / (1.0 + r)).collect();
    let c = need.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let n = need.len();
    // A requirement still rising over the outer tenth of the grid has no
    // finite supremum in the limit.
    let tail_start = n - (n / 10).max(2);
    let rising = need[tail_start..]
        .windows(2)
        .all(|w| w[1] > w[0] + 1e-12 * w[0].abs().max(1.0))
        && need[n - 1] >= c - 1e-12 * c.abs().max(1.0);
    let tail_slope = lhs(pts[n - 1]) / pts[n - 1];
    if rising || !c.is_finite() {
        let trace = pts.iter().zip(&need).map(|(&r, &q)| (r, -q)).collect();
        return (None, trace, tail_slope);
    }
    let trace = pts.iter().map(|&r| (r, c * (1.0 + r) - decay(r) - lhs(r))).collect();
    (Some(c), trace, tail_slope)
}

pub fn check_drift_inequality(
    m: &ModelManifold,
    v: &RadialPotential,
    sc: &ScenarioConditions,
    grid: &[f64],
) -> Result<DriftFit> {
    if grid.is_empty() {
        return Err(Error::Degenerate("empty radial grid"));
    }
    let kappa = sc.delta - sc.sigma * ((m.dimension - 1) as f64).sqrt();
    let (constant, margin_trace, tail_slope) =
        fit_linear_constant(grid, |r| laplacian_rho_sq(m, v, r), |r| 2.0 * kappa * r * r);
    let min_margin = margin_trace.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let note = if kappa.abs() <= 1e-12 * sc.delta.abs().max(1.0) {
        alloc::format!(
            "boundary case delta = sigma*sqrt(d-1): no quadratic decay; L rho^2 / r -> {tail_slope:.4} at the grid end"
        )
    } else if kappa < 0.0 {
        String::from("delta < sigma*sqrt(d-1): the decay term has the wrong sign")
    } else {
        String::new()
    };
    Ok(DriftFit {
        constant,
        kappa,
        margin_trace,
        min_margin: if constant.is_some() {
            min_margin
        } else {
            f64::NEG_INFINITY
        },
        tail_slope,
        note,
    })
}

/// Fit of `Lρ² ≤ c₁(1+r) - 2r(∫_0^r Φ - √(Ψ(r)(d-1)))`.
pub fn check_drift_inequality_phi(
    m: &ModelManifold,
    v: &RadialPotential,
    gp: &GrowthPair,
    grid: &[f64],
) -> Result<DriftFit> {
    if grid.is_empty() {
        return Err(Error::Degenerate("empty radial grid"));
    }
    let dm1 = (m.dimension - 1) as f64;
    let decay = |r: f64| 2.0 * r * (gp.primitive(r) - (gp.psi(r) * dm1).sqrt());
    let (constant, margin_trace, tail_slope) = fit_linear_constant(grid, |r| laplacian_rho_sq(m, v, r), decay);
    let min_margin = margin_trace.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    Ok(DriftFit {
        constant,
        kappa: f64::NAN,
        margin_trace,
        min_margin: if constant.is_some() {
            min_margin
        } else {
            f64::NEG_INFINITY
        },
        tail_slope,
        note: String::new(),
    })
}

/// `(r, T)` pairs of a fit-then-verify protocol.
#[derive(Debug, Clone, PartialEq)]
pub struct FitPlan {
    pub calibration: Vec<(f64, f64)>,
    pub held_out: Vec<(f64, f64)>,
}

impl FitPlan {
    pub fn grid(rs: &[f64], ts: &[f64]) -> Vec<(f64, f64)> {
        rs.iter().flat_map(|&r| ts.iter().map(move |&t| (r, t))).collect()
    }

    pub fn is_disjoint(&self) -> bool {
        self.calibration.iter().all(|c| !self.held_out.contains(c))
    }
}

/// Monte Carlo estimate of `ln E exp[X]` at one `(r, T)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairEstimate {
    pub r: f64,
    pub t: f64,
    pub estimate: LogMeanExp,
    /// Log of the bound without the fitted constant.
    pub log_bound_base: f64,
}

/// Outcome of a fit-then-verify exponential functional check.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpFunctionalReport {
    pub fitted_c2: f64,
    pub calibration: Vec<PairEstimate>,
    pub held_out: Vec<PairEstimate>,
    /// One report per held-out pair; `margin = ln rhs - ln lhs`.
    pub reports: Vec<VerificationReport>,
    pub reflected_fraction: f64,
}

impl ExpFunctionalReport {
    pub fn passed(&self) -> bool {
        self.reports.iter().all(|r| r.verdict == Verdict::Pass)
    }
}

struct ExpKind<'a> {
    /// Multiplier of the accumulated integral inside the exponential.
    coeff: f64,
    /// Integrand of the accumulated integral; `None` means `r²`.
    integrand: Option<&'a (dyn Fn(f64) -> f64 + Sync)>,
    /// `ln E ≤ time_factor · C₂ · T + base(r)`.
    time_factor: f64,
    base: &'a dyn Fn(f64) -> f64,
    check_id: &'static str,
}

fn run_exp_functional<E: Executor>(
    m: &ModelManifold,
    v: &RadialPotential,
    cfg: &SimConfig,
    plan: &FitPlan,
    kind: &ExpKind<'_>,
    exec: &E,
) -> Result<ExpFunctionalReport> {
    let mut starts: Vec<f64> = plan.calibration.iter().chain(&plan.held_out).map(|p| p.0).collect();
    starts.sort_by(f64::total_cmp);
    starts.dedup();
    let mut estimates: Vec<PairEstimate> = Vec::new();
    let mut reflected = 0.0f64;
    for (si, &r0) in starts.iter().enumerate() {
        let mut times: Vec<f64> = plan
            .calibration
            .iter()
            .chain(&plan.held_out)
            .filter(|p| p.0 == r0)
            .map(|p| p.1)
            .collect();
        times.sort_by(f64::total_cmp);
        times.dedup();
        let horizon = *times.last().unwrap();
        let local = SimConfig { horizon, ..*cfg };
        let start = move |_: usize| r0;
        let req = SimRequest {
            start: &start,
            snapshots: times.clone(),
            accumulator: kind.integrand,
            stream_offset: (si as u64) << 32,
        };
        let ens = simulate_radial_with(m, v, &local, &req, exec)?;
        reflected = reflected.max(ens.reflected_fraction());
        for (k, &t) in times.iter().enumerate() {
            let xs: Vec<f64> = ens
                .paths
                .iter()
                .map(|p| {
                    let integral = if kind.integrand.is_some() {
                        p.snap_user[k]
                    } else {
                        p.snap_r2[k]
                    };
                    kind.coeff * integral
                })
                .collect();
            estimates.push(PairEstimate {
                r: r0,
                t,
                estimate: LogMeanExp::from_log_samples(&xs),
                log_bound_base: (kind.base)(r0),
            });
        }
    }
    let find = |p: &(f64, f64)| *estimates.iter().find(|e| e.r == p.0 && e.t == p.1).unwrap();
    let calibration: Vec<PairEstimate> = plan.calibration.iter().map(find).collect();
    let held_out: Vec<PairEstimate> = plan.held_out.iter().map(find).collect();
    let c2 = calibration
        .iter()
        .map(|e| (e.estimate.log_mean - e.log_bound_base) / (kind.time_factor * e.t))
        .fold(0.0f64, f64::max);
    let reports = held_out
        .iter()
        .map(|e| {
            let log_rhs = kind.time_factor * c2 * e.t + e.log_bound_base;
            let margin = log_rhs - e.estimate.log_mean;
            let half = 1.96 * e.estimate.log_se;
            let verdict = if !e.estimate.reliable() {
                Verdict::Unreliable
            } else if margin >= -3.0 * half {
                Verdict::Pass
            } else {
                Verdict::Fail
            };
            VerificationReport::new(kind.check_id, e.estimate.log_mean.exp(), log_rhs.exp(), verdict)
                .with_margin(margin, half)
                .with_fitted("C2", c2)
                .with_note(alloc::format!("r={} T={} ess={:.0}", e.r, e.t, e.estimate.ess))
        })
        .collect();
    Ok(ExpFunctionalReport {
        fitted_c2: c2,
        calibration,
        held_out,
        reports,
        reflected_fraction: reflected,
    })
}

/// `E exp[¼(δ₀ - σ√(d-1))² ∫_0^T r² dt] ≤ exp[C₂T + ¼(δ₀ - σ√(d-1)) r²]`
/// with `C₂` fitted on the calibration pairs.
pub fn exp_functional_check<E: Executor>(
    m: &ModelManifold,
    v: &RadialPotential,
    sc: &ScenarioConditions,
    cfg: &SimConfig,
    plan: &FitPlan,
    delta0: f64,
    exec: &E,
) -> Result<ExpFunctionalReport> {
    let base = sc.sigma * ((m.dimension - 1) as f64).sqrt();
    if !(delta0 >= base && delta0 < sc.delta) {
        return Err(Error::InvalidParameter {
            name: "delta0".into(),
            constraint: alloc::format!("delta0 must lie in [{base}, {})", sc.delta),
        });
    }
    let k0 = delta0 - base;
    let bound = move |r: f64| 0.25 * k0 * r * r;
    let kind = ExpKind {
        coeff: 0.25 * k0 * k0,
        integrand: None,
        time_factor: 1.0,
        base: &bound,
        check_id: "exp_functional",
    };
    run_exp_functional(m, v, cfg, plan, &kind, exec)
}

/// `E exp[(1/(2(1+√2)²)) ∫_0^T P(r)² dt] ≤ exp[2C₂T + φ(r²)√2/(8(1+√2))]`
/// with `P = ∫_0^r Φ`.
pub fn exp_functional_check_phi<E: Executor>(
    m: &ModelManifold,
    v: &RadialPotential,
    gp: &GrowthPair,
    cfg: &SimConfig,
    plan: &FitPlan,
    exec: &E,
) -> Result<ExpFunctionalReport> {
    let a = 1.0 + SQRT_2;
    let integrand = |r: f64| {
        let p = gp.primitive(r);
        p * p
    };
    let bound = |r: f64| gp.phi_fn(r * r) * SQRT_2 / (8.0 * a);
    let kind = ExpKind {
        coeff: 1.0 / (2.0 * a * a),
        integrand: Some(&integrand),
        time_factor: 2.0,
        base: &bound,
        check_id: "exp_functional_phi",
    };
    run_exp_functional(m, v, cfg, plan, &kind, exec)
}

/// Exceedance of radius `n` against `(ρ_o(x)² + C t) / n²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonexplosionReport {
    pub level: f64,
    pub fraction: f64,
    pub bound: f64,
    pub se: f64,
    pub verdict: Verdict,
}

/// `c_bound` is a uniform bound on `L ρ_o²`, e.g. [`DriftFit::uniform_bound`].
pub fn nonexplosion_check(ens: &PathEnsemble, r_start: f64, level: f64, c_bound: f64) -> NonexplosionReport {
    let hits: Vec<f64> = ens
        .paths
        .iter()
        .map(|p| if p.max_radius >= level { 1.0 } else { 0.0 })
        .collect();
    let e = MeanEstimate::from_samples(&hits);
    let t = ens.config.horizon;
    let bound = (r_start * r_start + c_bound.max(0.0) * t) / (level * level);
    let n = hits.len() as f64;
    let se = (bound.min(1.0) * (1.0 - bound.min(1.0)) / n).sqrt().max(e.se);
    let verdict = if !(level > r_start) {
        Verdict::Skipped
    } else {
        Verdict::from_bool(e.mean <= bound + 3.0 * se)
    };
    NonexplosionReport {
        level,
        fraction: e.mean,
        bound,
        se,
        verdict,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::Sequential;
    use crate::quad::geometric_grid;

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

    #[test]
    fn single_step_is_one_euler_step() {
        let (m, v, _) = flat_gauss();
        let cfg = SimConfig {
            step: 1e-2,
            horizon: 1e-2,
            paths: 1,
            seed: 42,
            pole_guard: 1e-3,
        };
        let ens = simulate_radial(&m, &v, &cfg, 1.0, &Sequential).unwrap();
        let mut rng = stream(42, Family::Radial, 0);
        let (z1, z2) = (normal(&mut rng), normal(&mut rng));
        // the flat Bessel drift 1/r is left to the norm
        let x = 1.0 + (radial_drift(&m, &v, 1.0) - 1.0) * 1e-2 + (2e-2f64).sqrt() * z1;
        let expected = (x * x + 2e-2 * z2 * z2).sqrt();
        assert_eq!(ens.paths[0].terminal, expected);
    }

    #[test]
    fn step_too_large_is_reported() {
        let m = ModelManifold::flat(2).unwrap();
        let v = RadialPotential::Gaussian { delta: 50.0 };
        let cfg = SimConfig {
            step: 0.1,
            horizon: 0.1,
            paths: 1,
            ..Default::default()
        };
        assert!(matches!(
            simulate_radial(&m, &v, &cfg, 10.0, &Sequential),
            Err(Error::StepTooLarge { .. })
        ));
    }

    #[test]
    fn flat_gaussian_drift_constant_is_four() {
        let (m, v, sc) = flat_gauss();
        let fit = check_drift_inequality(&m, &v, &sc, &geometric_grid(1e-3, 50.0, 2000)).unwrap();
        assert!((fit.constant.unwrap() - 4.0).abs() < 1e-9);
        assert!(fit.min_margin >= -1e-9);
        assert_eq!(fit.uniform_bound(), Some(5.0));
    }

    #[test]
    fn zero_potential_has_no_finite_drift_constant() {
        let m = ModelManifold::flat(2).unwrap();
        let sc = ScenarioConditions {
            delta: 1.0,
            ..Default::default()
        };
        let fit = check_drift_inequality(&m, &RadialPotential::Zero, &sc, &geometric_grid(1e-3, 50.0, 2000)).unwrap();
        assert!(fit.constant.is_none());
    }

    #[test]
    fn boundary_case_is_annotated() {
        let m = ModelManifold::paper_surface(1.0).unwrap();
        let v = RadialPotential::Paper { k: 1.0, lambda: 1.0 };
        let sc = ScenarioConditions {
            delta: 2.0,
            sigma: 2.0,
            ..Default::default()
        };
        let fit = check_drift_inequality(&m, &v, &sc, &geometric_grid(1e-3, 50.0, 2000)).unwrap();
        assert_eq!(fit.kappa, 0.0);
        assert!(fit.note.contains("boundary"));
        // L ρ² = 4 - 2λ r²/√(1+r²) decays only linearly.
        assert!((fit.constant.unwrap() - 4.0).abs() < 1e-9);
        assert!((fit.tail_slope + 2.0).abs() < 0.1);
    }

    #[test]
    fn zero_coefficient_functional_is_one() {
        let (m, v, sc) = flat_gauss();
        let cfg = SimConfig {
            paths: 200,
            ..Default::default()
        };
        let sc0 = ScenarioConditions { sigma: 0.0, ..sc };
        let plan = FitPlan {
            calibration: alloc::vec![(0.5, 0.2)],
            held_out: alloc::vec![(1.0, 0.2)],
        };
        let rep = exp_functional_check(&m, &v, &sc0, &cfg, &plan, 0.0, &Sequential).unwrap();
        assert_eq!(rep.held_out[0].estimate.log_mean, 0.0);
        assert!(rep.passed());
    }

    #[test]
    fn nonexplosion_examples() {
        let (m, v, _) = flat_gauss();
        let cfg = SimConfig {
            paths: 500,
            horizon: 1.0,
            ..Default::default()
        };
        let ens = simulate_radial(&m, &v, &cfg, 1.0, &Sequential).unwrap();
        let rep = nonexplosion_check(&ens, 1.0, 10.0, 5.0);
        assert_eq!(rep.fraction, 0.0);
        assert!(rep.bound > 0.0 && rep.verdict == Verdict::Pass);
        assert_eq!(nonexplosion_check(&ens, 1.0, 0.5, 5.0).verdict, Verdict::Skipped);
    }
}
