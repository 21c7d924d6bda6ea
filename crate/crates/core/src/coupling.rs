//! Distance comparison process for coupling by parallel displacement, the
//! Girsanov weight removing the added drift, and the Monte Carlo Harnack
//! check with a frozen constant.

use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::FRAC_1_SQRT_2;
#[allow(unused_imports)] // inherent float methods shadow these when std is linked
use num_traits::Float;

use crate::contractivity::{check_hessian_growth, GrowthPair};
use crate::diffusion::{euler_step, simulate_radial_with, SimConfig, SimRequest};
use crate::error::{Error, Result};
use crate::exec::Executor;
use crate::geometry::{applicability, check_condition_14, ModelManifold, RadialPotential, ScenarioConditions};
use crate::report::Verdict;
use crate::rng::{normal, stream, Family};
use crate::stats::MeanEstimate;

/// `2√(K(d-1)) tanh[(ρ/2)√(K/(d-1))]`, extended by 0 at `K = 0`.
pub fn index_form_bound(k: f64, d: usize, rho: f64) -> f64 {
    let k = k.max(0.0);
    let dm1 = (d.max(2) - 1) as f64;
    2.0 * (k * dm1).sqrt() * (0.5 * rho.max(0.0) * (k / dm1).sqrt()).tanh()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScheduleId {
    Thm11,
    Thm42,
}

impl ScheduleId {
    pub fn as_str(&self) -> &'static str {
        match self {
            ScheduleId::Thm11 => "thm11",
            ScheduleId::Thm42 => "thm42",
        }
    }
}

/// The added coupling drift `ξ_t` as a function of `ρ_o(x_t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DriftSchedule {
    /// `ξ = C₃ + 2σ√(d-1) ρ_o(x_t) + ρ(x,y)/T`.
    Thm11 { c3: f64, sigma: f64, dimension: usize },
    /// `ξ = C₄ + 2θ P(ρ_o(x_t)) + ρ(x,y)/T`.
    Thm42 { c4: f64, gp: GrowthPair },
}

impl DriftSchedule {
    pub fn id(&self) -> ScheduleId {
        match self {
            DriftSchedule::Thm11 { .. } => ScheduleId::Thm11,
            DriftSchedule::Thm42 { .. } => ScheduleId::Thm42,
        }
    }
}

pub fn coupling_drift(schedule: &DriftSchedule, r_current: f64, rho_start: f64, horizon: f64) -> f64 {
    let base = rho_start / horizon;
    match *schedule {
        DriftSchedule::Thm11 { c3, sigma, dimension } => {
            c3 + 2.0 * sigma * ((dimension - 1) as f64).sqrt() * r_current + base
        }
        DriftSchedule::Thm42 { c4, gp } => c4 + 2.0 * gp.theta * gp.primitive(r_current) + base,
    }
}

/// Which drift is actually applied.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum XiMode {
    Full,
    /// No added drift; the distance contracts only through the potential.
    Zero,
}

/// Everything the comparison ODE needs, fitted from a scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingModel {
    pub schedule: DriftSchedule,
    pub dimension: usize,
    /// Ricci envelope `c + σ²(r_x + ρ)²` (thm11) or `Ψ(r_x + ρ)` (thm42).
    pub c: f64,
    pub sigma: f64,
    pub delta: f64,
    /// Constant of the potential pair term: `c₁` in `c₁ - δρ` or `C₃` in
    /// `C₃ - P(ρ/2)`.
    pub pair_constant: f64,
    /// Radius of the compact part and the Hessian maximum on it.
    pub r0: f64,
    pub r1: f64,
    pub xi_mode: XiMode,
}

impl CouplingModel {
    /// Fits `c₁ = 2r₀r₁ + 2r₀δ` and `C₃ = c₁ + 2√(c(d-1))`; refuses when
    /// `δ ≤ (1+√2)σ√(d-1)`.
    pub fn thm11(m: &ModelManifold, v: &RadialPotential, sc: &ScenarioConditions, grid: &[f64]) -> Result<Self> {
        let app = applicability(sc, m.dimension);
        if !app.thm11 {
            return Err(Error::Inapplicable {
                threshold_name: "(1+sqrt2)*sigma*sqrt(d-1)",
                relation: ">",
                threshold: app.thm11_threshold,
                delta: sc.delta,
            });
        }
        let hc = check_condition_14(m, v, sc, grid)?;
        let r0 = hc
            .observed_r0
            .ok_or(Error::Degenerate("-Hess_V >= delta fails at the grid end"))?;
        let r1 = if r0 > 0.0 { hc.inner_max.max(0.0) } else { 0.0 };
        let c1 = 2.0 * r0 * r1 + 2.0 * r0 * sc.delta;
        let dm1 = (m.dimension - 1) as f64;
        let c3 = c1 + 2.0 * (sc.c * dm1).sqrt();
        Ok(Self {
            schedule: DriftSchedule::Thm11 {
                c3,
                sigma: sc.sigma,
                dimension: m.dimension,
            },
            dimension: m.dimension,
            c: sc.c,
            sigma: sc.sigma,
            delta: sc.delta,
            pair_constant: c1,
            r0,
            r1,
            xi_mode: XiMode::Full,
        })
    }

    /// Fits `C₃ = 2r₀r₁ + 2P(r₀)` from `-Hess_V ≥ Φ` outside `B(o, r₀)` and
    /// `C₄ = C₃ + 2C` with `C` the growth-condition constant in `gp`.
    pub fn thm42(m: &ModelManifold, v: &RadialPotential, gp: &GrowthPair, grid: &[f64]) -> Result<Self> {
        if !gp.c45.is_finite() {
            return Err(Error::InvalidParameter {
                name: "c45".into(),
                constraint: "the growth condition needs a finite constant".into(),
            });
        }
        let hc = check_hessian_growth(m, v, gp, grid)?;
        let r0 = hc
            .observed_r0
            .ok_or(Error::Degenerate("-Hess_V >= Phi fails at the grid end"))?;
        let r1 = if r0 > 0.0 { hc.inner_max.max(0.0) } else { 0.0 };
        let c3 = 2.0 * r0 * r1 + 2.0 * gp.primitive(r0);
        Ok(Self {
            schedule: DriftSchedule::Thm42 {
                c4: c3 + 2.0 * gp.c45,
                gp: *gp,
            },
            dimension: m.dimension,
            c: 0.0,
            sigma: 0.0,
            delta: 0.0,
            pair_constant: c3,
            r0,
            r1,
            xi_mode: XiMode::Full,
        })
    }

    pub fn with_xi_mode(mut self, mode: XiMode) -> Self {
        self.xi_mode = mode;
        self
    }

    pub fn curvature_envelope(&self, r_x: f64, rho: f64) -> f64 {
        match self.schedule {
            DriftSchedule::Thm11 { .. } => {
                let s = r_x + rho;
                self.c + self.sigma * self.sigma * s * s
            }
            DriftSchedule::Thm42 { gp, .. } => gp.psi(r_x + rho),
        }
    }

    pub fn pair_term(&self, rho: f64) -> f64 {
        match self.schedule {
            DriftSchedule::Thm11 { .. } => self.pair_constant - self.delta * rho,
            DriftSchedule::Thm42 { gp, .. } => self.pair_constant - gp.primitive(0.5 * rho),
        }
    }

    pub fn xi(&self, r_x: f64, rho_start: f64, horizon: f64) -> f64 {
        match self.xi_mode {
            XiMode::Full => coupling_drift(&self.schedule, r_x, rho_start, horizon),
            XiMode::Zero => 0.0,
        }
    }

    /// `(dρ/dt, ξ)` of the comparison ODE.
    pub fn rate(&self, r_x: f64, rho: f64, rho_start: f64, horizon: f64) -> (f64, f64) {
        let k = self.curvature_envelope(r_x, rho);
        let xi = self.xi(r_x, rho_start, horizon);
        (index_form_bound(k, self.dimension, rho) + self.pair_term(rho) - xi, xi)
    }
}

/// One coupled pair.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingRecord {
    pub rho_start: f64,
    pub horizon: f64,
    /// First time the comparison distance reaches 0, if before the horizon.
    pub tau: Option<f64>,
    /// `(t, ρ)` subsampled; empty unless requested.
    pub trace: Vec<(f64, f64)>,
    pub schedule: ScheduleId,
    pub log_r: f64,
    /// `∫_0^τ ξ² dt`.
    pub xi_sq_integral: f64,
    /// `max_t dρ/dt + ρ(x,y)/T`, nonpositive when the drift dominates.
    pub dominance_excess: f64,
    /// Comparison distance at the horizon (0 when coupled).
    pub final_rho: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CouplingEnsemble {
    pub records: Vec<CouplingRecord>,
    pub coupled_fraction: f64,
    pub dominance_excess: f64,
    pub step: f64,
}

impl CouplingEnsemble {
    pub fn log_weights(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.log_r).collect()
    }

    /// `E R^β`.
    pub fn weight_moment(&self, beta: f64) -> MeanEstimate {
        let xs: Vec<f64> = self.records.iter().map(|r| (beta * r.log_r).exp()).collect();
        MeanEstimate::from_samples(&xs)
    }
}

/// Number of trace points kept per path when a trace is requested.
pub const TRACE_POINTS: usize = 200;

/// Integrates the comparison distance along simulated base paths started at
/// `r1`, the second point sitting at `r2` on the same meridian.
pub fn simulate_comparison<E: Executor>(
    m: &ModelManifold,
    v: &RadialPotential,
    model: &CouplingModel,
    cfg: &SimConfig,
    r1: f64,
    r2: f64,
    record_trace: bool,
    exec: &E,
) -> Result<CouplingEnsemble> {
    cfg.validate()?;
    let h = cfg.step;
    let horizon = cfg.horizon;
    let n_steps = cfg.steps_to(horizon);
    let rho0 = (r1 - r2).abs();
    let stride = (n_steps / TRACE_POINTS).max(1);
    let sqrt_h = h.sqrt();
    let results = exec.map_indexed(cfg.paths, |i| -> Result<CouplingRecord> {
        let mut rec = CouplingRecord {
            rho_start: rho0,
            horizon,
            tau: None,
            trace: Vec::new(),
            schedule: model.schedule.id(),
            log_r: 0.0,
            xi_sq_integral: 0.0,
            dominance_excess: f64::NEG_INFINITY,
            final_rho: rho0,
        };
        if rho0 == 0.0 {
            rec.tau = Some(0.0);
            rec.final_rho = 0.0;
            return Ok(rec);
        }
        let mut radial = stream(cfg.seed, Family::Radial, i as u64);
        let mut girsanov = stream(cfg.seed, Family::Girsanov, i as u64);
        let mut r = r1;
        let mut rho = rho0;
        if record_trace {
            rec.trace.push((0.0, rho));
        }
        for n in 0..n_steps {
            let t = n as f64 * h;
            let (rate, xi) = model.rate(r, rho, rho0, horizon);
            rec.dominance_excess = rec.dominance_excess.max(rate + rho0 / horizon);
            let zg = normal(&mut girsanov);
            rec.log_r += -FRAC_1_SQRT_2 * xi * sqrt_h * zg - 0.25 * xi * xi * h;
            rec.xi_sq_integral += xi * xi * h;
            let next = rho + h * rate;
            if next <= 0.0 {
                rec.tau = Some(t + h * rho / (rho - next));
                rho = 0.0;
                if record_trace {
                    rec.trace.push((rec.tau.unwrap(), 0.0));
                }
                break;
            }
            rho = next;
            if record_trace && (n + 1) % stride == 0 {
                rec.trace.push(((n + 1) as f64 * h, rho));
            }
            r = euler_step(m, v, cfg, r, &mut radial)?.0;
        }
        rec.final_rho = rho;
        Ok(rec)
    });
    let records = results.into_iter().collect::<Result<Vec<_>>>()?;
    let coupled = records.iter().filter(|r| r.tau.is_some()).count();
    let dominance_excess = records
        .iter()
        .map(|r| r.dominance_excess)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(CouplingEnsemble {
        coupled_fraction: coupled as f64 / records.len() as f64,
        dominance_excess,
        records,
        step: h,
    })
}

/// `-(1/√2) Σ ξ_k ΔW_k - ¼ Σ ξ_k² h` with `ΔW_k = √h Z_k` drawn from `rng`.
pub fn girsanov_weight(xi: &[f64], h: f64, rng: &mut rand_chacha::ChaCha8Rng) -> f64 {
    let sqrt_h = h.sqrt();
    xi.iter()
        .map(|&x| -FRAC_1_SQRT_2 * x * sqrt_h * normal(rng) - 0.25 * x * x * h)
        .sum()
}

/// Log-weights for the constant drift `ξ` up to `τ = T` over `paths`
/// independent Girsanov streams.
pub fn constant_drift_weights<E: Executor>(
    xi: f64,
    horizon: f64,
    h: f64,
    paths: usize,
    seed: u64,
    exec: &E,
) -> Vec<f64> {
    let steps = ((horizon / h).round() as usize).max(1);
    let schedule = alloc::vec![xi; steps];
    exec.map_indexed(paths, |i| {
        let mut rng = stream(seed, Family::Girsanov, i as u64);
        girsanov_weight(&schedule, h, &mut rng)
    })
}

/// `pα(pα - α + 1) / (8(p-1)(α-1)²)`.
pub fn holder_exponent(alpha: f64, p: f64) -> Result<f64> {
    if !(alpha > 1.0) {
        return Err(Error::Domain {
            what: "holder_exponent",
            constraint: "alpha > 1",
            value: alpha,
        });
    }
    if !(p > 1.0) {
        return Err(Error::Domain {
            what: "holder_exponent",
            constraint: "p > 1",
            value: p,
        });
    }
    let pa = p * alpha;
    Ok(pa * (pa - alpha + 1.0) / (8.0 * (p - 1.0) * (alpha - 1.0) * (alpha - 1.0)))
}

/// Positive bounded test functions for the Harnack check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HarnackFunction {
    /// `1 + e^{-r²}`.
    GaussianBump,
    /// `2 + sin(2r) e^{-(r-1)²}`.
    SineBump,
    Constant(f64),
}

impl HarnackFunction {
    pub fn value(&self, r: f64) -> f64 {
        match *self {
            HarnackFunction::GaussianBump => 1.0 + (-r * r).exp(),
            HarnackFunction::SineBump => 2.0 + (2.0 * r).sin() * (-(r - 1.0) * (r - 1.0)).exp(),
            HarnackFunction::Constant(c) => c,
        }
    }

    pub fn name(&self) -> String {
        match *self {
            HarnackFunction::GaussianBump => "1+exp(-r^2)".into(),
            HarnackFunction::SineBump => "2+sin(2r)exp(-(r-1)^2)".into(),
            HarnackFunction::Constant(c) => alloc::format!("const({c})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarnackTuple {
    pub x: f64,
    pub y: f64,
    pub t: f64,
}

/// Which exponent the fitted constant multiplies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HarnackPathway {
    /// `ρ²/T + T + ρ_o(x)²`.
    Thm11,
    /// `ρ²/T + T + φ(ρ_o(x)²)`.
    Thm42(GrowthPair),
}

#[derive(Debug, Clone, PartialEq)]
pub struct HarnackPlan {
    pub alpha: f64,
    pub calibration: Vec<HarnackTuple>,
    pub held_out: Vec<HarnackTuple>,
    pub functions: Vec<HarnackFunction>,
    pub pathway: HarnackPathway,
}

fn tuple_grid(xs: &[f64], ys: &[f64], ts: &[f64]) -> Vec<HarnackTuple> {
    let mut out = Vec::new();
    for &x in xs {
        for &y in ys {
            for &t in ts {
                out.push(HarnackTuple { x, y, t });
            }
        }
    }
    out
}

impl HarnackPlan {
    /// 3×3×3 calibration grid and a disjoint 2×2×2 held-out grid.
    pub fn standard(alpha: f64, pathway: HarnackPathway) -> Self {
        Self {
            alpha,
            calibration: tuple_grid(&[0.5, 1.0, 1.5], &[0.5, 1.5, 2.5], &[0.5, 1.0, 2.0]),
            held_out: tuple_grid(&[0.75, 1.25], &[1.0, 2.0], &[0.75, 1.5]),
            functions: alloc::vec![HarnackFunction::GaussianBump, HarnackFunction::SineBump],
            pathway,
        }
    }

    pub fn is_disjoint(&self) -> bool {
        self.calibration.iter().all(|c| !self.held_out.contains(c))
    }
}

/// Monte Carlo semigroup values at one tuple and function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarnackEstimate {
    pub tuple: HarnackTuple,
    pub function: HarnackFunction,
    /// `P_T f(y)`.
    pub pf_y: MeanEstimate,
    /// `P_T f^α(x)`.
    pub pfa_x: MeanEstimate,
    /// Multiplier of `C` in the exponent.
    pub weight: f64,
    /// `(α ln P_T f(y) - ln P_T f^α(x)) / weight`.
    pub implied_c: f64,
    /// Standard error of `α ln P_T f(y) - ln P_T f^α(x)`.
    pub log_se: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HarnackReport {
    pub alpha: f64,
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub function: String,
    /// `(P_T f(y))^α`.
    pub lhs: f64,
    /// `P_T f^α(x) exp[C · weight]`.
    pub rhs: f64,
    pub fitted_c: f64,
    /// `ln rhs - ln lhs`.
    pub margin: f64,
    pub se: f64,
    pub ci: (f64, f64),
    pub verdict: Verdict,
    /// Paths needed to resolve an inconclusive comparison.
    pub required_paths: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HarnackOutcome {
    pub fitted_c: f64,
    pub calibration: Vec<HarnackEstimate>,
    pub held_out: Vec<HarnackEstimate>,
    pub reports: Vec<HarnackReport>,
}

impl HarnackOutcome {
    pub fn verdict(&self) -> Verdict {
        if self.reports.iter().any(|r| r.verdict == Verdict::Fail) {
            Verdict::Fail
        } else if self.reports.iter().all(|r| r.verdict == Verdict::Pass) {
            Verdict::Pass
        } else {
            Verdict::Inconclusive
        }
    }
}

/// Radii at each requested time for every distinct start.
pub struct SemigroupSamples {
    starts: Vec<f64>,
    times: Vec<Vec<f64>>,
    radii: Vec<Vec<Vec<f64>>>,
}

impl SemigroupSamples {
    /// Simulates each distinct start once to its largest time, with streams
    /// offset by the start's index so distinct starts are independent.
    pub fn simulate<E: Executor>(
        m: &ModelManifold,
        v: &RadialPotential,
        cfg: &SimConfig,
        points: &[(f64, f64)],
        exec: &E,
    ) -> Result<Self> {
        let mut starts: Vec<f64> = points.iter().map(|p| p.0).collect();
        starts.sort_by(f64::total_cmp);
        starts.dedup();
        let mut times = Vec::new();
        let mut radii = Vec::new();
        for (si, &r0) in starts.iter().enumerate() {
            let mut ts: Vec<f64> = points.iter().filter(|p| p.0 == r0).map(|p| p.1).collect();
            ts.sort_by(f64::total_cmp);
            ts.dedup();
            let local = SimConfig {
                horizon: *ts.last().unwrap(),
                ..*cfg
            };
            let start = move |_: usize| r0;
            let req = SimRequest {
                start: &start,
                snapshots: ts.clone(),
                accumulator: None,
                stream_offset: (si as u64 + 1) << 32,
            };
            let ens = simulate_radial_with(m, v, &local, &req, exec)?;
            radii.push((0..ts.len()).map(|k| ens.radii_at(k)).collect());
            times.push(ts);
        }
        Ok(Self { starts, times, radii })
    }

    /// Samples of `ρ_o(x_t)` for the start `r` at time `t`.
    pub fn radii(&self, r: f64, t: f64) -> Option<&[f64]> {
        let si = self.starts.iter().position(|&s| s == r)?;
        let k = self.times[si].iter().position(|&s| s == t)?;
        Some(&self.radii[si][k])
    }

    /// `P_t g(r)` estimated from the samples.
    pub fn expectation<G: Fn(f64) -> f64>(&self, r: f64, t: f64, g: G) -> Option<MeanEstimate> {
        let xs: Vec<f64> = self.radii(r, t)?.iter().map(|&x| g(x)).collect();
        Some(MeanEstimate::from_samples(&xs))
    }
}

fn harnack_weight(pathway: &HarnackPathway, tuple: &HarnackTuple) -> f64 {
    let rho = (tuple.x - tuple.y).abs();
    let tail = match pathway {
        HarnackPathway::Thm11 => tuple.x * tuple.x,
        HarnackPathway::Thm42(gp) => gp.phi_fn(tuple.x * tuple.x),
    };
    rho * rho / tuple.t + tuple.t + tail
}

fn harnack_estimate(
    samples: &SemigroupSamples,
    alpha: f64,
    pathway: &HarnackPathway,
    tuple: HarnackTuple,
    function: HarnackFunction,
) -> HarnackEstimate {
    let pf_y = samples.expectation(tuple.y, tuple.t, |r| function.value(r)).unwrap();
    let pfa_x = samples
        .expectation(tuple.x, tuple.t, |r| function.value(r).powf(alpha))
        .unwrap();
    let weight = harnack_weight(pathway, &tuple);
    let log_gap = alpha * pf_y.mean.ln() - pfa_x.mean.ln();
    // Equal starts share one ensemble, for which Jensen holds exactly.
    let log_se = if tuple.x == tuple.y {
        0.0
    } else {
        ((alpha * pf_y.se / pf_y.mean).powi(2) + (pfa_x.se / pfa_x.mean).powi(2)).sqrt()
    };
    HarnackEstimate {
        tuple,
        function,
        pf_y,
        pfa_x,
        weight,
        implied_c: log_gap / weight,
        log_se,
    }
}

/// Fits `C` as the largest implied constant over the calibration tuples
/// (at least 0), freezes it and evaluates every held-out tuple.
pub fn harnack_check<E: Executor>(
    m: &ModelManifold,
    v: &RadialPotential,
    sc: &ScenarioConditions,
    cfg: &SimConfig,
    plan: &HarnackPlan,
    exec: &E,
) -> Result<HarnackOutcome> {
    if !(plan.alpha > 1.0) {
        return Err(Error::Domain {
            what: "harnack_check",
            constraint: "alpha > 1",
            value: plan.alpha,
        });
    }
    if plan.functions.is_empty() || plan.calibration.is_empty() {
        return Err(Error::Degenerate("harnack plan needs functions and calibration tuples"));
    }
    if let HarnackPathway::Thm11 = plan.pathway {
        let app = applicability(sc, m.dimension);
        if !app.thm11 {
            return Err(Error::Inapplicable {
                threshold_name: "(1+sqrt2)*sigma*sqrt(d-1)",
                relation: ">",
                threshold: app.thm11_threshold,
                delta: sc.delta,
            });
        }
    }
    let mut points = Vec::new();
    for tp in plan.calibration.iter().chain(&plan.held_out) {
        points.push((tp.x, tp.t));
        points.push((tp.y, tp.t));
    }
    let samples = SemigroupSamples::simulate(m, v, cfg, &points, exec)?;
    let estimate =
        |tp: &HarnackTuple, f: &HarnackFunction| harnack_estimate(&samples, plan.alpha, &plan.pathway, *tp, *f);
    let calibration: Vec<HarnackEstimate> = plan
        .calibration
        .iter()
        .flat_map(|tp| plan.functions.iter().map(move |f| (tp, f)))
        .map(|(tp, f)| estimate(tp, f))
        .collect();
    let held_out: Vec<HarnackEstimate> = plan
        .held_out
        .iter()
        .flat_map(|tp| plan.functions.iter().map(move |f| (tp, f)))
        .map(|(tp, f)| estimate(tp, f))
        .collect();
    let fitted_c = calibration.iter().map(|e| e.implied_c).fold(0.0f64, f64::max);
    let reports = held_out
        .iter()
        .map(|e| harnack_report(e, plan.alpha, fitted_c, cfg.paths))
        .collect();
    Ok(HarnackOutcome {
        fitted_c,
        calibration,
        held_out,
        reports,
    })
}

/// Evaluates one tuple against a frozen constant.
pub fn harnack_report(e: &HarnackEstimate, alpha: f64, fitted_c: f64, paths: usize) -> HarnackReport {
    let log_lhs = alpha * e.pf_y.mean.ln();
    let log_rhs = e.pfa_x.mean.ln() + fitted_c * e.weight;
    let margin = log_rhs - log_lhs;
    let se = e.log_se;
    let verdict = if se == 0.0 {
        Verdict::from_bool(margin >= 0.0)
    } else {
        Verdict::from_margin(margin, se, 3.0)
    };
    let required_paths = (verdict == Verdict::Inconclusive).then(|| {
        let ratio = 3.0 * se / margin.abs().max(1e-300);
        (paths as f64 * ratio * ratio).ceil().min(usize::MAX as f64) as usize
    });
    HarnackReport {
        alpha,
        t: e.tuple.t,
        x: e.tuple.x,
        y: e.tuple.y,
        function: e.function.name(),
        lhs: log_lhs.exp(),
        rhs: log_rhs.exp(),
        fitted_c,
        margin,
        se,
        ci: (margin - 3.0 * se, margin + 3.0 * se),
        verdict,
        required_paths,
    }
}

/// Right side of `(P_T f(y))^α ≤ P_T f^α(x) (E R^{α/(α-1)})^{α-1}` in log
/// form, with its standard error, from measured weights.
pub fn harnack_chain_log_rhs(pfa_x: &MeanEstimate, weights: &CouplingEnsemble, alpha: f64) -> (f64, f64) {
    let moment = weights.weight_moment(alpha / (alpha - 1.0));
    let value = pfa_x.mean.ln() + (alpha - 1.0) * moment.mean.ln();
    let se = ((pfa_x.se / pfa_x.mean).powi(2) + ((alpha - 1.0) * moment.se / moment.mean).powi(2)).sqrt();
    (value, se)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::Sequential;
    use crate::geometry::default_grid;

    #[test]
    fn index_form_examples() {
        assert_eq!(index_form_bound(0.0, 2, 7.0), 0.0);
        assert!((index_form_bound(1.0, 2, 2.0) - 2.0 * 1.0f64.tanh()).abs() < 1e-15);
        assert!((index_form_bound(1.0, 2, 100.0) - 2.0).abs() < 1e-8);
        assert!((index_form_bound(1e-12, 3, 1.0) - index_form_bound(0.0, 3, 1.0)).abs() < 1e-6);
    }

    #[test]
    fn drift_examples() {
        let s = DriftSchedule::Thm11 {
            c3: 1.0,
            sigma: 0.0,
            dimension: 2,
        };
        assert_eq!(coupling_drift(&s, 17.0, 2.0, 2.0), 2.0);
        let s = DriftSchedule::Thm11 {
            c3: 0.0,
            sigma: 1.0,
            dimension: 2,
        };
        assert_eq!(coupling_drift(&s, 3.0, 0.0, 1.0), 6.0);
        let gp = GrowthPair::power(3.0, 1e-5, 0.25).unwrap();
        let s = DriftSchedule::Thm42 { c4: 0.0, gp };
        assert!((coupling_drift(&s, 2.0, 1.0, 1.0) - 7.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn holder_examples() {
        assert_eq!(holder_exponent(2.0, 2.0).unwrap(), 1.5);
        assert_eq!(holder_exponent(2.0, 1.5).unwrap(), 1.5);
        // The iterated limit needs α(p-1) → ∞; at α(p-1) = 1 the value is 1/4.
        assert!((holder_exponent(1e6, 1.0 + 1e-6).unwrap() - 0.25).abs() < 1e-5);
        assert!((holder_exponent(1e12, 1.0 + 1e-6).unwrap() - 0.125).abs() < 1e-5);
        assert!(holder_exponent(1.0, 2.0).is_err());
        assert!(holder_exponent(2.0, 1.0).is_err());
    }

    #[test]
    fn inapplicable_schedule_is_refused() {
        let m = ModelManifold::hyperbolic(3).unwrap();
        let sc = ScenarioConditions {
            sigma: 1.0,
            delta: 2.0,
            ..Default::default()
        };
        let err =
            CouplingModel::thm11(&m, &RadialPotential::Gaussian { delta: 2.0 }, &sc, &default_grid()).unwrap_err();
        assert!(matches!(err, Error::Inapplicable { .. }));
    }

    #[test]
    fn equal_starts_couple_at_once() {
        let m = ModelManifold::flat(2).unwrap();
        let v = RadialPotential::Gaussian { delta: 2.0 };
        let sc = ScenarioConditions {
            delta: 2.0,
            ..Default::default()
        };
        let model = CouplingModel::thm11(&m, &v, &sc, &default_grid()).unwrap();
        let cfg = SimConfig {
            paths: 4,
            ..Default::default()
        };
        let ens = simulate_comparison(&m, &v, &model, &cfg, 1.0, 1.0, false, &Sequential).unwrap();
        assert!(ens.records.iter().all(|r| r.tau == Some(0.0) && r.log_r == 0.0));
    }

    #[test]
    fn zero_drift_gives_unit_weight() {
        let mut rng = stream(1, Family::Girsanov, 0);
        assert_eq!(girsanov_weight(&[0.0; 100], 1e-2, &mut rng), 0.0);
    }
}
