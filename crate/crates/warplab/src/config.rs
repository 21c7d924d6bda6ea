//! Scenario files: sectioned TOML with validation and canonical re-emission.
//!
//! Every section is optional except `[manifold]` and `[potential]`; missing
//! keys take documented defaults, unknown keys are rejected.

use serde::{Deserialize, Serialize};
use warplab_core::contractivity::GrowthPair;
use warplab_core::coupling::{HarnackFunction, HarnackPathway, HarnackPlan, HarnackTuple, ScheduleId};
use warplab_core::diffusion::{FitPlan, SimConfig};
use warplab_core::geometry::{ModelManifold, RadialPotential, ScenarioConditions};

use crate::error::{invalid, Error, Result};

const ONE_PLUS_SQRT2: f64 = 1.0 + std::f64::consts::SQRT_2;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    manifold: RawManifold,
    potential: RawPotential,
    #[serde(default)]
    conditions: RawConditions,
    #[serde(default)]
    simulation: RawSimulation,
    #[serde(default)]
    coupling: RawCoupling,
    #[serde(default)]
    contractivity: RawContractivity,
    #[serde(default)]
    suites: RawSuites,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawManifold {
    name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dimension: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    k: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    alpha: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPotential {
    name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    k: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    scale: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConditions {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sigma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    r0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    delta0: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPairs {
    r: Vec<f64>,
    t: Vec<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSimulation {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    step: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    horizon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    paths: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pole_guard: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    fit_calibration: Option<RawPairs>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    fit_held_out: Option<RawPairs>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTuples {
    x: Vec<f64>,
    y: Vec<f64>,
    t: Vec<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCoupling {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    schedule: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    paths: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pairs: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    horizons: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    calibration: Option<RawTuples>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    held_out: Option<RawTuples>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawContractivity {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    phi: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lambda_grid: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    t_grid: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSuites {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    curvature: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    measure: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    drift: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    coupling: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    harnack: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    contractivity: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    expected_fail: Option<Vec<String>>,
}

/// Built-in manifold with its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ManifoldSpec {
    Flat { dimension: usize },
    Hyperbolic { dimension: usize },
    PaperSurface { k: f64 },
    PowerSurface { dimension: usize, epsilon: f64, alpha: f64 },
}

impl ManifoldSpec {
    pub fn build(&self) -> Result<ModelManifold> {
        Ok(match *self {
            ManifoldSpec::Flat { dimension } => ModelManifold::flat(dimension)?,
            ManifoldSpec::Hyperbolic { dimension } => ModelManifold::hyperbolic(dimension)?,
            ManifoldSpec::PaperSurface { k } => ModelManifold::paper_surface(k)?,
            ManifoldSpec::PowerSurface {
                dimension,
                epsilon,
                alpha,
            } => ModelManifold::power_surface(dimension, epsilon, alpha)?,
        })
    }

    pub fn dimension(&self) -> usize {
        match *self {
            ManifoldSpec::Flat { dimension }
            | ManifoldSpec::Hyperbolic { dimension }
            | ManifoldSpec::PowerSurface { dimension, .. } => dimension,
            ManifoldSpec::PaperSurface { .. } => 2,
        }
    }
}

/// `x × y × t` grid of Harnack tuples.
#[derive(Debug, Clone, PartialEq)]
pub struct TupleGrid {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub t: Vec<f64>,
}

impl TupleGrid {
    pub fn tuples(&self) -> Vec<HarnackTuple> {
        let mut out = Vec::new();
        for &x in &self.x {
            for &y in &self.y {
                for &t in &self.t {
                    out.push(HarnackTuple { x, y, t });
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CouplingSettings {
    pub schedule: ScheduleId,
    /// Harnack power.
    pub alpha: f64,
    /// Hölder exponent parameter.
    pub p: f64,
    pub paths: usize,
    pub pairs: Vec<(f64, f64)>,
    pub horizons: Vec<f64>,
    pub calibration: TupleGrid,
    pub held_out: TupleGrid,
}

/// Power growth `Φ(s) = s^{α-1}`, `Ψ(s) = ε s^{2α}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthSettings {
    pub alpha: f64,
    pub epsilon: f64,
    pub theta: f64,
}

impl GrowthSettings {
    pub fn pair(&self) -> Result<GrowthPair> {
        Ok(GrowthPair::power(self.alpha, self.epsilon, self.theta)?)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContractivitySettings {
    pub growth: Option<GrowthSettings>,
    /// Constant of the ultracontractivity bound.
    pub c: f64,
    pub lambda_grid: Vec<f64>,
    pub t_grid: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteSelection {
    pub curvature: bool,
    pub measure: bool,
    pub drift: bool,
    pub coupling: bool,
    pub harnack: bool,
    pub contractivity: bool,
    /// Check ids (or dotted prefixes) the scenario predicts to fail.
    pub expected_fail: Vec<String>,
}

impl SuiteSelection {
    pub fn expects_failure(&self, check_id: &str) -> bool {
        self.expected_fail.iter().any(|e| {
            check_id == e || (check_id.starts_with(e.as_str()) && check_id.as_bytes().get(e.len()) == Some(&b'.'))
        })
    }
}

/// A validated scenario with every default filled in.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub manifold: ManifoldSpec,
    pub potential: RadialPotential,
    pub conditions: ScenarioConditions,
    /// Exponent parameter of the exponential functional check.
    pub delta0: f64,
    pub simulation: SimConfig,
    pub fit_plan: FitPlan,
    pub coupling: CouplingSettings,
    pub contractivity: ContractivitySettings,
    pub suites: SuiteSelection,
}

impl Scenario {
    pub fn model(&self) -> Result<ModelManifold> {
        self.manifold.build()
    }

    pub fn growth_pair(&self) -> Result<Option<GrowthPair>> {
        self.contractivity.growth.map(|g| g.pair()).transpose()
    }

    pub fn harnack_plan(&self, pathway: HarnackPathway) -> HarnackPlan {
        HarnackPlan {
            alpha: self.coupling.alpha,
            calibration: self.coupling.calibration.tuples(),
            held_out: self.coupling.held_out.tuples(),
            functions: vec![HarnackFunction::GaussianBump, HarnackFunction::SineBump],
            pathway,
        }
    }
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// Parses and validates scenario text.
pub fn parse_config(text: &str) -> Result<Scenario> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Parse {
        line: e.span().map_or(1, |s| line_of(text, s.start)),
        message: e.message().to_string(),
    })?;
    resolve(raw)
}

fn positive(key: &str, short: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(invalid(key, format!("{short} must be > 0")))
    }
}

fn nonnegative(key: &str, short: &str, v: f64) -> Result<f64> {
    if v >= 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(invalid(key, format!("{short} must be >= 0")))
    }
}

fn above_one(key: &str, short: &str, v: f64) -> Result<f64> {
    if v > 1.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(invalid(key, format!("{short} must be > 1")))
    }
}

fn require(key: &str, v: Option<f64>) -> Result<f64> {
    v.ok_or_else(|| invalid(key, "required"))
}

fn reject(section: &str, owner: &str, present: &[(&str, bool)]) -> Result<()> {
    match present.iter().find(|p| p.1) {
        Some((key, _)) => Err(invalid(
            format!("{section}.{key}"),
            format!("does not apply to `{owner}`"),
        )),
        None => Ok(()),
    }
}

fn dimension(v: Option<usize>) -> Result<usize> {
    let d = v.unwrap_or(2);
    if d >= 2 {
        Ok(d)
    } else {
        Err(invalid("manifold.dimension", "dimension must be >= 2"))
    }
}

fn resolve_manifold(m: &RawManifold) -> Result<ManifoldSpec> {
    let has = |o: Option<f64>| o.is_some();
    match m.name.as_str() {
        "flat" | "hyperbolic" => {
            reject(
                "manifold",
                &m.name,
                &[("k", has(m.k)), ("epsilon", has(m.epsilon)), ("alpha", has(m.alpha))],
            )?;
            let dimension = dimension(m.dimension)?;
            Ok(if m.name == "flat" {
                ManifoldSpec::Flat { dimension }
            } else {
                ManifoldSpec::Hyperbolic { dimension }
            })
        }
        "paper_surface" => {
            reject(
                "manifold",
                &m.name,
                &[
                    ("dimension", m.dimension.is_some_and(|d| d != 2)),
                    ("epsilon", has(m.epsilon)),
                    ("alpha", has(m.alpha)),
                ],
            )?;
            Ok(ManifoldSpec::PaperSurface {
                k: positive("manifold.k", "k", require("manifold.k", m.k)?)?,
            })
        }
        "power_surface" => {
            reject("manifold", &m.name, &[("k", has(m.k))])?;
            Ok(ManifoldSpec::PowerSurface {
                dimension: dimension(m.dimension)?,
                epsilon: positive("manifold.epsilon", "epsilon", require("manifold.epsilon", m.epsilon)?)?,
                alpha: above_one("manifold.alpha", "alpha", require("manifold.alpha", m.alpha)?)?,
            })
        }
        other => Err(invalid(
            "manifold.name",
            format!("unknown manifold `{other}` (expected flat, hyperbolic, paper_surface, power_surface)"),
        )),
    }
}

fn resolve_potential(p: &RawPotential) -> Result<RadialPotential> {
    let has = |o: Option<f64>| o.is_some();
    let all = [
        ("delta", has(p.delta)),
        ("k", has(p.k)),
        ("lambda", has(p.lambda)),
        ("alpha", has(p.alpha)),
        ("scale", has(p.scale)),
    ];
    let others =
        |keep: &[&str]| -> Vec<(&str, bool)> { all.iter().copied().filter(|e| !keep.contains(&e.0)).collect() };
    match p.name.as_str() {
        "zero" => {
            reject("potential", "zero", &others(&[]))?;
            Ok(RadialPotential::Zero)
        }
        "gaussian" => {
            reject("potential", "gaussian", &others(&["delta"]))?;
            Ok(RadialPotential::Gaussian {
                delta: positive("potential.delta", "delta", require("potential.delta", p.delta)?)?,
            })
        }
        "paper" => {
            reject("potential", "paper", &others(&["k", "lambda"]))?;
            Ok(RadialPotential::Paper {
                k: positive("potential.k", "k", require("potential.k", p.k)?)?,
                lambda: positive("potential.lambda", "lambda", require("potential.lambda", p.lambda)?)?,
            })
        }
        "power" => {
            reject("potential", "power", &others(&["alpha", "scale"]))?;
            Ok(RadialPotential::Power {
                alpha: above_one("potential.alpha", "alpha", require("potential.alpha", p.alpha)?)?,
                scale: positive("potential.scale", "scale", p.scale.unwrap_or(1.0))?,
            })
        }
        other => Err(invalid(
            "potential.name",
            format!("unknown potential `{other}` (expected zero, gaussian, paper, power)"),
        )),
    }
}

fn nonempty_positive(key: &str, xs: &[f64]) -> Result<()> {
    if xs.is_empty() {
        return Err(invalid(key, "must not be empty"));
    }
    if xs.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
        return Err(invalid(key, "entries must be > 0"));
    }
    Ok(())
}

fn resolve(raw: RawConfig) -> Result<Scenario> {
    let manifold = resolve_manifold(&raw.manifold)?;
    let potential = resolve_potential(&raw.potential)?;
    let d = manifold.dimension();

    let rc = &raw.conditions;
    let defaults = ScenarioConditions::default();
    let conditions = ScenarioConditions {
        sigma: nonnegative("conditions.sigma", "sigma", rc.sigma.unwrap_or(defaults.sigma))?,
        c: nonnegative("conditions.c", "c", rc.c.unwrap_or(defaults.c))?,
        delta: positive(
            "conditions.delta",
            "delta",
            rc.delta.unwrap_or(match potential {
                RadialPotential::Gaussian { delta } => delta,
                _ => defaults.delta,
            }),
        )?,
        r0: nonnegative("conditions.r0", "r0", rc.r0.unwrap_or(defaults.r0))?,
        theta: rc.theta.unwrap_or(defaults.theta),
    };
    if !(conditions.theta > 0.0 && conditions.theta < 1.0 / ONE_PLUS_SQRT2) {
        return Err(invalid("conditions.theta", "theta must lie in (0, 1/(1+sqrt 2))"));
    }
    let floor = conditions.sigma * ((d - 1) as f64).sqrt();
    let delta0 = rc.delta0.unwrap_or(0.5 * (floor + conditions.delta));
    if !(delta0 >= floor && (delta0 < conditions.delta || conditions.delta <= floor)) {
        return Err(invalid(
            "conditions.delta0",
            "delta0 must lie in [sigma*sqrt(d-1), delta)",
        ));
    }

    let rs = &raw.simulation;
    let sd = SimConfig::default();
    let simulation = SimConfig {
        step: rs.step.unwrap_or(sd.step),
        horizon: rs.horizon.unwrap_or(sd.horizon),
        paths: rs.paths.unwrap_or(sd.paths),
        seed: rs.seed.unwrap_or(sd.seed),
        pole_guard: rs.pole_guard.unwrap_or(sd.pole_guard),
    };
    simulation.validate().map_err(|e| match e {
        warplab_core::Error::InvalidParameter { name, constraint } => invalid(format!("simulation.{name}"), constraint),
        other => Error::Core(other),
    })?;
    let pairs = |p: &Option<RawPairs>, key: &str, r: &[f64], t: &[f64]| -> Result<Vec<(f64, f64)>> {
        let (r, t) = p
            .as_ref()
            .map_or((r.to_vec(), t.to_vec()), |p| (p.r.clone(), p.t.clone()));
        nonempty_positive(&format!("{key}.r"), &r)?;
        nonempty_positive(&format!("{key}.t"), &t)?;
        Ok(FitPlan::grid(&r, &t))
    };
    let fit_plan = FitPlan {
        calibration: pairs(
            &rs.fit_calibration,
            "simulation.fit_calibration",
            &[0.5, 1.0],
            &[0.5, 1.0],
        )?,
        held_out: pairs(&rs.fit_held_out, "simulation.fit_held_out", &[1.5, 2.0], &[1.5, 2.0])?,
    };
    if !fit_plan.is_disjoint() {
        return Err(invalid(
            "simulation.fit_held_out",
            "held-out pairs must be disjoint from calibration pairs",
        ));
    }

    let rk = &raw.contractivity;
    let growth = match rk.phi.as_deref() {
        None => {
            reject(
                "contractivity",
                "no phi",
                &[
                    ("alpha", rk.alpha.is_some()),
                    ("epsilon", rk.epsilon.is_some()),
                    ("theta", rk.theta.is_some()),
                ],
            )?;
            None
        }
        Some("power") => {
            let g = GrowthSettings {
                alpha: above_one(
                    "contractivity.alpha",
                    "alpha",
                    require("contractivity.alpha", rk.alpha)?,
                )?,
                epsilon: positive(
                    "contractivity.epsilon",
                    "epsilon",
                    require("contractivity.epsilon", rk.epsilon)?,
                )?,
                theta: rk.theta.unwrap_or(conditions.theta),
            };
            if !(g.theta > 0.0 && g.theta < 1.0 / ONE_PLUS_SQRT2) {
                return Err(invalid("contractivity.theta", "theta must lie in (0, 1/(1+sqrt 2))"));
            }
            Some(g)
        }
        Some(other) => {
            return Err(invalid(
                "contractivity.phi",
                format!("phi must be \"power\", got \"{other}\""),
            ))
        }
    };
    let contractivity = ContractivitySettings {
        growth,
        c: positive("contractivity.c", "c", rk.c.unwrap_or(1.0))?,
        lambda_grid: rk
            .lambda_grid
            .clone()
            .unwrap_or_else(|| vec![0.05, 0.5, 1.0, 5.0, 10.0]),
        t_grid: rk
            .t_grid
            .clone()
            .unwrap_or_else(|| vec![1e-3, 1e-2, 0.1, 0.5, 1.0, 10.0]),
    };
    nonempty_positive("contractivity.lambda_grid", &contractivity.lambda_grid)?;
    nonempty_positive("contractivity.t_grid", &contractivity.t_grid)?;

    let cp = &raw.coupling;
    let schedule = match cp.schedule.as_deref() {
        None if growth.is_some() => ScheduleId::Thm42,
        None | Some("thm11") => ScheduleId::Thm11,
        Some("thm42") => ScheduleId::Thm42,
        Some(other) => {
            return Err(invalid(
                "coupling.schedule",
                format!("schedule must be thm11 or thm42, got {other}"),
            ))
        }
    };
    if schedule == ScheduleId::Thm42 && growth.is_none() {
        return Err(invalid("coupling.schedule", "thm42 needs a [contractivity] phi"));
    }
    let tuples = |g: &Option<RawTuples>, key: &str, x: &[f64], y: &[f64], t: &[f64]| -> Result<TupleGrid> {
        let grid = g.as_ref().map_or_else(
            || TupleGrid {
                x: x.to_vec(),
                y: y.to_vec(),
                t: t.to_vec(),
            },
            |g| TupleGrid {
                x: g.x.clone(),
                y: g.y.clone(),
                t: g.t.clone(),
            },
        );
        nonempty_positive(&format!("{key}.x"), &grid.x)?;
        nonempty_positive(&format!("{key}.y"), &grid.y)?;
        nonempty_positive(&format!("{key}.t"), &grid.t)?;
        Ok(grid)
    };
    let coupling = CouplingSettings {
        schedule,
        alpha: above_one("coupling.alpha", "alpha", cp.alpha.unwrap_or(2.0))?,
        p: above_one("coupling.p", "p", cp.p.unwrap_or(2.0))?,
        paths: cp.paths.unwrap_or(10_000),
        pairs: cp.pairs.clone().map_or_else(
            || vec![(1.0, 3.0), (0.5, 4.0)],
            |v| v.into_iter().map(|p| (p[0], p[1])).collect(),
        ),
        horizons: cp.horizons.clone().unwrap_or_else(|| vec![1.0, 5.0]),
        calibration: tuples(
            &cp.calibration,
            "coupling.calibration",
            &[0.5, 1.0, 1.5],
            &[0.5, 1.5, 2.5],
            &[0.5, 1.0, 2.0],
        )?,
        held_out: tuples(
            &cp.held_out,
            "coupling.held_out",
            &[0.75, 1.25],
            &[1.0, 2.0],
            &[0.75, 1.5],
        )?,
    };
    if coupling.paths == 0 {
        return Err(invalid("coupling.paths", "paths must be >= 1"));
    }
    nonempty_positive("coupling.horizons", &coupling.horizons)?;
    let flat: Vec<f64> = coupling.pairs.iter().flat_map(|p| [p.0, p.1]).collect();
    nonempty_positive("coupling.pairs", &flat)?;
    let cal = coupling.calibration.tuples();
    if coupling.held_out.tuples().iter().any(|t| cal.contains(t)) {
        return Err(invalid(
            "coupling.held_out",
            "held-out tuples must be disjoint from calibration tuples",
        ));
    }

    let su = &raw.suites;
    let suites = SuiteSelection {
        curvature: su.curvature.unwrap_or(true),
        measure: su.measure.unwrap_or(true),
        drift: su.drift.unwrap_or(true),
        coupling: su.coupling.unwrap_or(true),
        harnack: su.harnack.unwrap_or(true),
        contractivity: su.contractivity.unwrap_or(true),
        expected_fail: su.expected_fail.clone().unwrap_or_default(),
    };

    Ok(Scenario {
        name: raw.name.unwrap_or_else(|| "custom".into()),
        manifold,
        potential,
        conditions,
        delta0,
        simulation,
        fit_plan,
        coupling,
        contractivity,
        suites,
    })
}

fn axes(pairs: &[(f64, f64)]) -> RawPairs {
    let mut r: Vec<f64> = Vec::new();
    let mut t: Vec<f64> = Vec::new();
    for &(a, b) in pairs {
        if !r.contains(&a) {
            r.push(a);
        }
        if !t.contains(&b) {
            t.push(b);
        }
    }
    RawPairs { r, t }
}

fn raw_tuples(g: &TupleGrid) -> RawTuples {
    RawTuples {
        x: g.x.clone(),
        y: g.y.clone(),
        t: g.t.clone(),
    }
}

/// Canonical text of a scenario, with every default written out.
pub fn emit_config(s: &Scenario) -> String {
    let manifold = match s.manifold {
        ManifoldSpec::Flat { dimension } => RawManifold {
            name: "flat".into(),
            dimension: Some(dimension),
            ..Default::default()
        },
        ManifoldSpec::Hyperbolic { dimension } => RawManifold {
            name: "hyperbolic".into(),
            dimension: Some(dimension),
            ..Default::default()
        },
        ManifoldSpec::PaperSurface { k } => RawManifold {
            name: "paper_surface".into(),
            k: Some(k),
            ..Default::default()
        },
        ManifoldSpec::PowerSurface {
            dimension,
            epsilon,
            alpha,
        } => RawManifold {
            name: "power_surface".into(),
            dimension: Some(dimension),
            epsilon: Some(epsilon),
            alpha: Some(alpha),
            ..Default::default()
        },
    };
    let potential = match s.potential {
        RadialPotential::Zero => RawPotential {
            name: "zero".into(),
            ..Default::default()
        },
        RadialPotential::Gaussian { delta } => RawPotential {
            name: "gaussian".into(),
            delta: Some(delta),
            ..Default::default()
        },
        RadialPotential::Paper { k, lambda } => RawPotential {
            name: "paper".into(),
            k: Some(k),
            lambda: Some(lambda),
            ..Default::default()
        },
        RadialPotential::Power { alpha, scale } => RawPotential {
            name: "power".into(),
            alpha: Some(alpha),
            scale: Some(scale),
            ..Default::default()
        },
    };
    let c = &s.conditions;
    let sim = &s.simulation;
    let cp = &s.coupling;
    let k = &s.contractivity;
    let su = &s.suites;
    let raw = RawConfig {
        name: Some(s.name.clone()),
        manifold,
        potential,
        conditions: RawConditions {
            sigma: Some(c.sigma),
            c: Some(c.c),
            delta: Some(c.delta),
            r0: Some(c.r0),
            theta: Some(c.theta),
            delta0: Some(s.delta0),
        },
        simulation: RawSimulation {
            step: Some(sim.step),
            horizon: Some(sim.horizon),
            paths: Some(sim.paths),
            seed: Some(sim.seed),
            pole_guard: Some(sim.pole_guard),
            fit_calibration: Some(axes(&s.fit_plan.calibration)),
            fit_held_out: Some(axes(&s.fit_plan.held_out)),
        },
        coupling: RawCoupling {
            schedule: Some(cp.schedule.as_str().into()),
            alpha: Some(cp.alpha),
            p: Some(cp.p),
            paths: Some(cp.paths),
            pairs: Some(cp.pairs.iter().map(|p| [p.0, p.1]).collect()),
            horizons: Some(cp.horizons.clone()),
            calibration: Some(raw_tuples(&cp.calibration)),
            held_out: Some(raw_tuples(&cp.held_out)),
        },
        contractivity: RawContractivity {
            phi: k.growth.map(|_| "power".into()),
            alpha: k.growth.map(|g| g.alpha),
            epsilon: k.growth.map(|g| g.epsilon),
            theta: k.growth.map(|g| g.theta),
            c: Some(k.c),
            lambda_grid: Some(k.lambda_grid.clone()),
            t_grid: Some(k.t_grid.clone()),
        },
        suites: RawSuites {
            curvature: Some(su.curvature),
            measure: Some(su.measure),
            drift: Some(su.drift),
            coupling: Some(su.coupling),
            harnack: Some(su.harnack),
            contractivity: Some(su.contractivity),
            expected_fail: Some(su.expected_fail.clone()),
        },
    };
    toml::to_string(&raw).expect("scenario serialises")
}
