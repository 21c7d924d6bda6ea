//! Warped-product model manifolds, radial potentials and the pointwise
//! curvature and Hessian conditions built from them.
//!
//! All pointwise quantities require `r > 0`: `w'/w ~ 1/r` is singular at the
//! pole. Where a limit at the pole is needed (the drift fit) it is provided
//! explicitly.

use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::SQRT_2;
#[allow(unused_imports)] // inherent float methods shadow these when std is linked
use num_traits::Float;

use crate::error::{require_positive_radius, Error, Result};
use crate::quad::geometric_grid;

/// Warping function `w` of `dr² + w(r)² dΘ²`.
#[derive(Debug, Clone, PartialEq)]
pub enum Warp {
    /// `w = r`.
    Flat,
    /// `w = sinh r`.
    Hyperbolic,
    /// `w = r e^{k r²}`.
    Exponential { k: f64 },
    /// `w'' = Ψ(r) w / (d-1)` with `Ψ(s) = ε s^{2α}`, integrated numerically.
    PowerCurvature(PowerWarp),
}

impl Warp {
    pub fn value(&self, r: f64) -> f64 {
        match self {
            Warp::Flat => r,
            Warp::Hyperbolic => r.sinh(),
            Warp::Exponential { k } => r * (k * r * r).exp(),
            Warp::PowerCurvature(p) => p.log_value(r).exp(),
        }
    }

    pub fn d1(&self, r: f64) -> f64 {
        match self {
            Warp::Flat => 1.0,
            Warp::Hyperbolic => r.cosh(),
            Warp::Exponential { k } => (k * r * r).exp() * (1.0 + 2.0 * k * r * r),
            Warp::PowerCurvature(p) => p.log_value(r).exp() * p.log_derivative(r),
        }
    }

    pub fn d2(&self, r: f64) -> f64 {
        self.value(r) * self.curvature_ratio(r)
    }

    /// `ln w(r)`, finite wherever `w` itself would overflow.
    pub fn log_value(&self, r: f64) -> f64 {
        match self {
            Warp::Flat => r.ln(),
            Warp::Hyperbolic => log_sinh(r),
            Warp::Exponential { k } => r.ln() + k * r * r,
            Warp::PowerCurvature(p) => p.log_value(r),
        }
    }

    /// `w'(r) / w(r)`.
    pub fn log_derivative(&self, r: f64) -> f64 {
        match self {
            Warp::Flat => 1.0 / r,
            Warp::Hyperbolic => 1.0 / r.tanh(),
            Warp::Exponential { k } => 1.0 / r + 2.0 * k * r,
            Warp::PowerCurvature(p) => p.log_derivative(r),
        }
    }

    /// `r w'(r) / w(r)`, finite with limit 1 at the pole.
    pub fn r_log_derivative(&self, r: f64) -> f64 {
        match self {
            Warp::Flat => 1.0,
            Warp::Hyperbolic => {
                if r < 1e-4 {
                    1.0 + r * r / 3.0
                } else {
                    r / r.tanh()
                }
            }
            Warp::Exponential { k } => 1.0 + 2.0 * k * r * r,
            Warp::PowerCurvature(p) => {
                if r <= 0.0 {
                    1.0
                } else {
                    r * p.log_derivative(r)
                }
            }
        }
    }

    /// `w''(r) / w(r)`.
    pub fn curvature_ratio(&self, r: f64) -> f64 {
        match self {
            Warp::Flat => 0.0,
            Warp::Hyperbolic => 1.0,
            Warp::Exponential { k } => 6.0 * k + 4.0 * k * k * r * r,
            Warp::PowerCurvature(p) => p.q(r),
        }
    }

    /// `(1 - w'²) / w²`, the sectional curvature of tangential 2-planes
    /// (with sign) that enters the tangential Ricci eigenvalue when `d ≥ 3`.
    pub fn tangential_term(&self, r: f64) -> f64 {
        match self {
            Warp::Flat => 0.0,
            Warp::Hyperbolic => -1.0,
            Warp::Exponential { k } => {
                let u = self.log_derivative(r);
                (-2.0 * k * r * r).exp() / (r * r) - u * u
            }
            Warp::PowerCurvature(p) => {
                let u = p.log_derivative(r);
                (-2.0 * p.log_value(r)).exp() - u * u
            }
        }
    }
}

fn log_sinh(r: f64) -> f64 {
    if r < 20.0 {
        r.sinh().ln()
    } else {
        r - core::f64::consts::LN_2 + (-(-2.0 * r).exp()).ln_1p()
    }
}

/// Tabulated warp solving `w'' = q(r) w`, `q = ε r^{2α} / (d-1)`, `w(0) = 0`,
/// `w'(0) = 1`.
///
/// On `[0, 1]` the linear system `(w, w')` is tabulated; beyond that the
/// Riccati form `(ln w, u = w'/w)`, `u' = q - u²`, avoids overflow. Once the
/// Riccati equation becomes stiff for the table step the two-term WKB
/// continuation `u ≈ √q - q'/(4q)` takes over.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerWarp {
    epsilon: f64,
    alpha: f64,
    dimension: usize,
    coeff: f64,
    step: f64,
    linear_end: f64,
    /// `(w, w')` on `[0, linear_end]`.
    linear: Vec<(f64, f64)>,
    /// `(ln w, u)` on `[linear_end, riccati_end]`.
    riccati: Vec<(f64, f64)>,
    riccati_end: f64,
    wkb_offset: f64,
}

impl PowerWarp {
    const STEP: f64 = 5e-4;
    const LINEAR_END: f64 = 1.0;
    const TABLE_CAP: f64 = 64.0;

    pub fn new(dimension: usize, epsilon: f64, alpha: f64) -> Result<Self> {
        if dimension < 2 {
            return Err(Error::InvalidParameter {
                name: "dimension".into(),
                constraint: "dimension must be >= 2".into(),
            });
        }
        if !(epsilon > 0.0) {
            return Err(Error::InvalidParameter {
                name: "epsilon".into(),
                constraint: "epsilon must be > 0".into(),
            });
        }
        if !(alpha > 1.0) {
            return Err(Error::InvalidParameter {
                name: "alpha".into(),
                constraint: "alpha must be > 1".into(),
            });
        }
        let coeff = epsilon / (dimension - 1) as f64;
        let h = Self::STEP;
        let q = |r: f64| coeff * r.powf(2.0 * alpha);

        let n_lin = (Self::LINEAR_END / h).round() as usize;
        let mut linear = Vec::with_capacity(n_lin + 1);
        let (mut w, mut dw) = (0.0f64, 1.0f64);
        linear.push((w, dw));
        for i in 0..n_lin {
            let r = i as f64 * h;
            let f = |r: f64, w: f64, dw: f64| (dw, q(r) * w);
            let k1 = f(r, w, dw);
            let k2 = f(r + 0.5 * h, w + 0.5 * h * k1.0, dw + 0.5 * h * k1.1);
            let k3 = f(r + 0.5 * h, w + 0.5 * h * k2.0, dw + 0.5 * h * k2.1);
            let k4 = f(r + h, w + h * k3.0, dw + h * k3.1);
            w += h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
            dw += h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
            linear.push((w, dw));
        }
        let linear_end = n_lin as f64 * h;

        let mut riccati = Vec::new();
        let (mut lw, mut u) = (w.ln(), dw / w);
        riccati.push((lw, u));
        let mut r = linear_end;
        // RK4 on u' = q - u² is stable while 2 u h stays well inside 2.78.
        while r < Self::TABLE_CAP && q(r).sqrt() * h < 0.2 {
            let f = |r: f64, u: f64| (u, q(r) - u * u);
            let k1 = f(r, u);
            let k2 = f(r + 0.5 * h, u + 0.5 * h * k1.1);
            let k3 = f(r + 0.5 * h, u + 0.5 * h * k2.1);
            let k4 = f(r + h, u + h * k3.1);
            lw += h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
            u += h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
            r = linear_end + riccati.len() as f64 * h;
            riccati.push((lw, u));
        }
        let riccati_end = linear_end + (riccati.len() - 1) as f64 * h;
        let mut out = Self {
            epsilon,
            alpha,
            dimension,
            coeff,
            step: h,
            linear_end,
            linear,
            riccati,
            riccati_end,
            wkb_offset: 0.0,
        };
        let (lw_end, _) = *out.riccati.last().unwrap();
        out.wkb_offset = lw_end - out.wkb_phase(riccati_end);
        Ok(out)
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Radius up to which the Riccati table is used.
    pub fn table_end(&self) -> f64 {
        self.riccati_end
    }

    /// `q(r) = w''/w = Ψ(r)/(d-1)`.
    pub fn q(&self, r: f64) -> f64 {
        self.coeff * r.powf(2.0 * self.alpha)
    }

    fn dq(&self, r: f64) -> f64 {
        2.0 * self.alpha * self.coeff * r.powf(2.0 * self.alpha - 1.0)
    }

    fn wkb_phase(&self, r: f64) -> f64 {
        let a1 = self.alpha + 1.0;
        self.coeff.sqrt() * r.powf(a1) / a1 - 0.25 * self.q(r).ln()
    }

    pub fn log_value(&self, r: f64) -> f64 {
        if r <= self.linear_end {
            let (w, _) = self.linear_at(r);
            w.ln()
        } else if r <= self.riccati_end {
            self.riccati_at(r).0
        } else {
            self.wkb_offset + self.wkb_phase(r)
        }
    }

    pub fn log_derivative(&self, r: f64) -> f64 {
        if r <= self.linear_end {
            let (w, dw) = self.linear_at(r);
            dw / w
        } else if r <= self.riccati_end {
            self.riccati_at(r).1
        } else {
            let q = self.q(r);
            q.sqrt() - self.dq(r) / (4.0 * q)
        }
    }

    fn locate(&self, r: f64, origin: f64, len: usize) -> (usize, f64) {
        let x = (r - origin) / self.step;
        let i = (x.floor().max(0.0) as usize).min(len - 2);
        (i, x - i as f64)
    }

    fn linear_at(&self, r: f64) -> (f64, f64) {
        let (i, t) = self.locate(r, 0.0, self.linear.len());
        let h = self.step;
        let (w0, d0) = self.linear[i];
        let (w1, d1) = self.linear[i + 1];
        let r0 = i as f64 * h;
        let dd0 = self.q(r0) * w0;
        let dd1 = self.q(r0 + h) * w1;
        (hermite(w0, d0, w1, d1, h, t), hermite(d0, dd0, d1, dd1, h, t))
    }

    fn riccati_at(&self, r: f64) -> (f64, f64) {
        let (i, t) = self.locate(r, self.linear_end, self.riccati.len());
        let h = self.step;
        let (l0, u0) = self.riccati[i];
        let (l1, u1) = self.riccati[i + 1];
        let r0 = self.linear_end + i as f64 * h;
        let du0 = self.q(r0) - u0 * u0;
        let du1 = self.q(r0 + h) - u1 * u1;
        (hermite(l0, u0, l1, u1, h, t), hermite(u0, du0, u1, du1, h, t))
    }
}

/// Cubic Hermite interpolation on `[x0, x0 + h]` at fraction `t`.
fn hermite(y0: f64, m0: f64, y1: f64, m1: f64, h: f64, t: f64) -> f64 {
    let t2 = t * t;
    let t3 = t2 * t;
    (2.0 * t3 - 3.0 * t2 + 1.0) * y0 + (t3 - 2.0 * t2 + t) * h * m0 + (-2.0 * t3 + 3.0 * t2) * y1 + (t3 - t2) * h * m1
}

/// A rotationally symmetric manifold with a pole at `r = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelManifold {
    pub dimension: usize,
    pub warp: Warp,
    pub name: String,
}

impl ModelManifold {
    pub fn new(dimension: usize, warp: Warp, name: impl Into<String>) -> Result<Self> {
        if dimension < 2 {
            return Err(Error::InvalidParameter {
                name: "dimension".into(),
                constraint: "dimension must be >= 2".into(),
            });
        }
        Ok(Self {
            dimension,
            warp,
            name: name.into(),
        })
    }

    pub fn flat(dimension: usize) -> Result<Self> {
        Self::new(dimension, Warp::Flat, "flat")
    }

    pub fn hyperbolic(dimension: usize) -> Result<Self> {
        Self::new(dimension, Warp::Hyperbolic, "hyperbolic")
    }

    /// The plane with metric `dr² + (r e^{k r²})² dθ²`.
    pub fn paper_surface(k: f64) -> Result<Self> {
        if !(k > 0.0) {
            return Err(Error::InvalidParameter {
                name: "k".into(),
                constraint: "k must be > 0".into(),
            });
        }
        Self::new(2, Warp::Exponential { k }, "paper_surface")
    }

    /// Warp with Ricci curvature `-ε r^{2α}` in every direction when `d = 2`.
    pub fn power_surface(dimension: usize, epsilon: f64, alpha: f64) -> Result<Self> {
        let warp = PowerWarp::new(dimension, epsilon, alpha)?;
        Self::new(dimension, Warp::PowerCurvature(warp), "power_surface")
    }

    fn dm1(&self) -> f64 {
        (self.dimension - 1) as f64
    }

    /// Log of the unnormalised radial density `e^V w^{d-1}`.
    pub fn log_radial_density(&self, v: &RadialPotential, r: f64) -> f64 {
        v.value(r) + self.dm1() * self.warp.log_value(r)
    }

    /// `ln |S^{d-1}|`.
    pub fn log_sphere_area(&self) -> f64 {
        let half = 0.5 * self.dimension as f64;
        core::f64::consts::LN_2 + half * core::f64::consts::PI.ln() - libm_lgamma(half)
    }
}

fn libm_lgamma(x: f64) -> f64 {
    // `ln Γ` for the half-integers and integers that occur as d/2.
    let mut acc = 0.0;
    let mut y = x;
    while y > 1.0 + 1e-9 {
        y -= 1.0;
        acc += y.ln();
    }
    if (y - 0.5).abs() < 1e-12 {
        acc + 0.5 * core::f64::consts::PI.ln()
    } else {
        acc
    }
}

/// Radial potential `V(r)` with its first two derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RadialPotential {
    /// `V ≡ 0`.
    Zero,
    /// `V = -δ r² / 2`.
    Gaussian { delta: f64 },
    /// `V = -k r² - λ (r² + 1)^{1/2}`.
    Paper { k: f64, lambda: f64 },
    /// `V' = -scale ∫_0^r s^{α-1} ds`, so `-V'' = Φ(r) = scale r^{α-1}`.
    Power { alpha: f64, scale: f64 },
}

impl RadialPotential {
    pub fn name(&self) -> &'static str {
        match self {
            RadialPotential::Zero => "zero",
            RadialPotential::Gaussian { .. } => "gaussian",
            RadialPotential::Paper { .. } => "paper",
            RadialPotential::Power { .. } => "power",
        }
    }

    pub fn value(&self, r: f64) -> f64 {
        match *self {
            RadialPotential::Zero => 0.0,
            RadialPotential::Gaussian { delta } => -0.5 * delta * r * r,
            RadialPotential::Paper { k, lambda } => -k * r * r - lambda * (r * r + 1.0).sqrt(),
            RadialPotential::Power { alpha, scale } => -scale * r.powf(alpha + 1.0) / (alpha * (alpha + 1.0)),
        }
    }

    pub fn d1(&self, r: f64) -> f64 {
        match *self {
            RadialPotential::Zero => 0.0,
            RadialPotential::Gaussian { delta } => -delta * r,
            RadialPotential::Paper { k, lambda } => -2.0 * k * r - lambda * r / (r * r + 1.0).sqrt(),
            RadialPotential::Power { alpha, scale } => -scale * r.powf(alpha) / alpha,
        }
    }

    pub fn d2(&self, r: f64) -> f64 {
        match *self {
            RadialPotential::Zero => 0.0,
            RadialPotential::Gaussian { delta } => -delta,
            RadialPotential::Paper { k, lambda } => -2.0 * k - lambda / (r * r + 1.0).powf(1.5),
            RadialPotential::Power { alpha, scale } => -scale * r.powf(alpha - 1.0),
        }
    }

    /// `V'(r) / r`, with its limit `V''(0)` at the pole.
    pub fn d1_over_r(&self, r: f64) -> f64 {
        match *self {
            RadialPotential::Zero => 0.0,
            RadialPotential::Gaussian { delta } => -delta,
            RadialPotential::Paper { k, lambda } => -2.0 * k - lambda / (r * r + 1.0).sqrt(),
            RadialPotential::Power { alpha, scale } => -scale * r.powf(alpha - 1.0) / alpha,
        }
    }
}

/// Constants of the curvature and Hessian conditions of a scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioConditions {
    /// Quadratic Ricci bound `Ric ≥ -(c + σ² r²)`.
    pub sigma: f64,
    pub c: f64,
    /// `-Hess_V ≥ δ` outside `B(o, r0)`.
    pub delta: f64,
    pub r0: f64,
    /// Ratio `θ < 1/(1+√2)` of the growth condition.
    pub theta: f64,
}

impl Default for ScenarioConditions {
    fn default() -> Self {
        Self {
            sigma: 0.0,
            c: 0.0,
            delta: 1.0,
            r0: 10.0,
            theta: 0.4 / (1.0 + SQRT_2),
        }
    }
}

/// Default radial grid: 2000 geometric points on `[1e-3, 50]`.
pub fn default_grid() -> Vec<f64> {
    geometric_grid(1e-3, 50.0, 2000)
}

/// Radial and tangential eigenvalues of `Ric` at radius `r`.
pub fn ricci_bounds(m: &ModelManifold, r: f64) -> Result<(f64, f64)> {
    require_positive_radius("ricci_bounds", r)?;
    let ratio = m.warp.curvature_ratio(r);
    let radial = -m.dm1() * ratio;
    let tangential = if m.dimension > 2 {
        -ratio + (m.dimension - 2) as f64 * m.warp.tangential_term(r)
    } else {
        -ratio
    };
    Ok((radial, tangential))
}

/// Radial and tangential eigenvalues of `Hess_V` at radius `r`.
pub fn hess_v_eigenvalues(m: &ModelManifold, v: &RadialPotential, r: f64) -> Result<(f64, f64)> {
    require_positive_radius("hess_v_eigenvalues", r)?;
    Ok((v.d2(r), v.d1_over_r(r) * m.warp.r_log_derivative(r)))
}

/// Greatest lower bound of the eigenvalues of `Ric - Hess_V` over `grid`.
pub fn bakry_emery_k(m: &ModelManifold, v: &RadialPotential, grid: &[f64]) -> Result<f64> {
    if grid.is_empty() {
        return Err(Error::Degenerate("empty radial grid"));
    }
    let mut k = f64::INFINITY;
    for &r in grid {
        let (ric_r, ric_t) = ricci_bounds(m, r)?;
        let (h_r, h_t) = hess_v_eigenvalues(m, v, r)?;
        k = k.min(ric_r - h_r).min(ric_t - h_t);
    }
    Ok(k)
}

/// Minimum over the grid of `min Ric(r) + σ² r² + c`; nonnegative means the
/// quadratic Ricci lower bound holds there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarginReport {
    pub margin: f64,
    pub argmin: f64,
    /// `|Ric| + σ² r² + c` at the worst point, the scale for rounding.
    pub scale: f64,
}

impl MarginReport {
    pub fn holds(&self) -> bool {
        self.margin >= -1e-12 * self.scale.max(1.0)
    }
}

pub fn check_condition_15(m: &ModelManifold, sc: &ScenarioConditions, grid: &[f64]) -> Result<MarginReport> {
    let mut out = MarginReport {
        margin: f64::INFINITY,
        argmin: f64::NAN,
        scale: 0.0,
    };
    for &r in grid {
        let (a, b) = ricci_bounds(m, r)?;
        let val = a.min(b) + sc.sigma * sc.sigma * r * r + sc.c;
        if val < out.margin {
            out = MarginReport {
                margin: val,
                argmin: r,
                scale: a.abs().max(b.abs()) + sc.sigma * sc.sigma * r * r + sc.c,
            };
        }
    }
    Ok(out)
}

/// Result of scanning `-Hess_V ≥ δ` over a grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HessianCheck {
    pub holds: bool,
    /// Smallest radius beyond which every grid point satisfies the bound;
    /// `None` when the last grid point fails.
    pub observed_r0: Option<f64>,
    /// `max Hess_V` eigenvalue inside `B(o, observed_r0)`.
    pub inner_max: f64,
}

pub fn check_condition_14(
    m: &ModelManifold,
    v: &RadialPotential,
    sc: &ScenarioConditions,
    grid: &[f64],
) -> Result<HessianCheck> {
    let tol = 1e-12 * sc.delta.abs().max(1.0);
    let mut ok = Vec::with_capacity(grid.len());
    let mut eig = Vec::with_capacity(grid.len());
    for &r in grid {
        let (a, b) = hess_v_eigenvalues(m, v, r)?;
        ok.push(a <= -sc.delta + tol && b <= -sc.delta + tol);
        eig.push(a.max(b));
    }
    let first_tail = ok.iter().rposition(|&x| !x).map_or(0, |i| i + 1);
    if first_tail >= grid.len() {
        return Ok(HessianCheck {
            holds: false,
            observed_r0: None,
            inner_max: f64::NAN,
        });
    }
    let observed = if first_tail == 0 { 0.0 } else { grid[first_tail - 1] };
    let inner_max = eig[..first_tail].iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(HessianCheck {
        holds: observed <= sc.r0,
        observed_r0: Some(observed),
        inner_max,
    })
}

/// Threshold verdicts on `δ` against `σ √(d-1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Applicability {
    pub thm11: bool,
    pub lem23: bool,
    pub lem21_tail: bool,
    pub thm11_threshold: f64,
    pub lem23_threshold: f64,
    pub lem21_threshold: f64,
}

pub fn applicability(sc: &ScenarioConditions, d: usize) -> Applicability {
    let base = sc.sigma * ((d.max(1) - 1) as f64).sqrt();
    let thm11_threshold = (1.0 + SQRT_2) * base;
    let lem23_threshold = 2.0 * base;
    let lem21_threshold = base;
    Applicability {
        thm11: sc.delta > thm11_threshold,
        lem23: sc.delta >= lem23_threshold,
        lem21_tail: sc.delta > lem21_threshold,
        thm11_threshold,
        lem23_threshold,
        lem21_threshold,
    }
}

/// `(L ρ_o, L ρ_o²)` at radius `r`.
pub fn laplacian_rho(m: &ModelManifold, v: &RadialPotential, r: f64) -> Result<(f64, f64)> {
    require_positive_radius("laplacian_rho", r)?;
    let l = m.dm1() * m.warp.log_derivative(r) + v.d1(r);
    Ok((l, laplacian_rho_sq(m, v, r)))
}

/// `L ρ_o²` including its limit `2d` at the pole.
pub fn laplacian_rho_sq(m: &ModelManifold, v: &RadialPotential, r: f64) -> f64 {
    2.0 + 2.0 * m.dm1() * m.warp.r_log_derivative(r) + 2.0 * r * r * v.d1_over_r(r)
}

/// Distance between two points on one meridian.
pub fn geodesic_distance_meridian(r1: f64, r2: f64) -> f64 {
    (r1 - r2).abs()
}
