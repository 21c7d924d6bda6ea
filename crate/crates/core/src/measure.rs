//! The invariant measure `μ ∝ e^V dvol` reduced to its radial density
//! `m(r) = e^{V(r)} w(r)^{d-1}`.
//!
//! Integrals are taken against the shifted density `e^{ln m - s}` with `s`
//! the maximum of `ln m` on a scan grid, which keeps every integrand finite
//! for the scenarios of interest. Normalised quantities do not depend on the
//! shift.

use alloc::vec::Vec;
#[allow(unused_imports)] // inherent float methods shadow these when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::geometry::{ModelManifold, RadialPotential};
use crate::quad::{geometric_grid, GaussLegendre, ImproperEstimate, Quadrature, TailRule, TailVerdict};

/// Decay class of the radial density.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailClass {
    /// `-ln m` grows at least like `r^{3/2}`.
    GaussianLike,
    /// `-ln m` grows, but slower than `r^{3/2}`.
    Subexponential,
    /// The density does not decay.
    Divergent,
}

/// Radial density of `μ` with cached normalisation.
#[derive(Debug, Clone)]
pub struct RadialMeasure {
    pub manifold: ModelManifold,
    pub potential: RadialPotential,
    /// Shift `s` applied to `ln m`.
    pub log_shift: f64,
    /// `∫ e^{ln m - s} dr`, infinite when divergent.
    pub shifted_mass: f64,
    pub tail_class: TailClass,
    quad: Quadrature,
}

impl RadialMeasure {
    pub fn new(m: &ModelManifold, v: &RadialPotential) -> Self {
        let log_shift = scan_max(|r| m.log_radial_density(v, r));
        let quad = Quadrature::default();
        let shifted = quad.integrate_half_line(&|r| shifted_density(m, v, log_shift, r), TailRule::HalvingPieces);
        Self {
            manifold: m.clone(),
            potential: *v,
            log_shift,
            shifted_mass: shifted.value,
            tail_class: tail_class(m, v),
            quad,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.shifted_mass.is_finite()
    }

    /// `ln m(r)`.
    pub fn log_density(&self, r: f64) -> f64 {
        self.manifold.log_radial_density(&self.potential, r)
    }

    /// The normalised radial density `m(r) / ∫ m`.
    pub fn density(&self, r: f64) -> f64 {
        shifted_density(&self.manifold, &self.potential, self.log_shift, r) / self.shifted_mass
    }

    /// `μ(f)` for a radial `f` by adaptive quadrature over the half-line.
    pub fn expectation<F: Fn(f64) -> f64>(&self, f: &F) -> ImproperEstimate {
        self.quad
            .integrate_half_line(&|r| f(r) * self.density_or_zero(r), TailRule::HalvingPieces)
    }

    fn density_or_zero(&self, r: f64) -> f64 {
        if r <= 0.0 {
            0.0
        } else {
            self.density(r)
        }
    }

    /// Smallest radius beyond the bulk where `ln m` has dropped by `drop`
    /// below its maximum.
    pub fn cutoff(&self, drop: f64) -> Option<f64> {
        cutoff_for(|r| self.log_density(r), drop)
    }
}

fn shifted_density(m: &ModelManifold, v: &RadialPotential, shift: f64, r: f64) -> f64 {
    if r <= 0.0 {
        return 0.0;
    }
    (m.log_radial_density(v, r) - shift).exp()
}

fn scan_grid() -> Vec<f64> {
    geometric_grid(1e-3, 4096.0, 2400)
}

fn scan_max<F: Fn(f64) -> f64>(f: F) -> f64 {
    let mut best = f64::NEG_INFINITY;
    for r in scan_grid() {
        let x = f(r);
        if x.is_finite() && x > best {
            best = x;
        }
    }
    best
}

fn cutoff_for<F: Fn(f64) -> f64>(f: F, drop: f64) -> Option<f64> {
    let grid = scan_grid();
    let vals: Vec<f64> = grid.iter().map(|&r| f(r)).collect();
    let (imax, vmax) =
        vals.iter()
            .enumerate()
            .filter(|(_, v)| v.is_finite())
            .fold(
                (0, f64::NEG_INFINITY),
                |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc },
            );
    if !vmax.is_finite() {
        return None;
    }
    // Require the drop to persist to the end of the scan.
    let mut out = None;
    for i in (imax..grid.len()).rev() {
        if vals[i] < vmax - drop || vals[i] == f64::NEG_INFINITY {
            out = Some(grid[i]);
        } else {
            break;
        }
    }
    out
}

fn tail_class(m: &ModelManifold, v: &RadialPotential) -> TailClass {
    let l = |r: f64| -m.log_radial_density(v, r);
    let (a, b, c) = (l(16.0), l(32.0), l(64.0));
    if !(c > b) || !(b > a) || !c.is_finite() {
        return TailClass::Divergent;
    }
    let p = ((c - b) / (b - a)).log2();
    if p >= 1.5 {
        TailClass::GaussianLike
    } else {
        TailClass::Subexponential
    }
}

/// Total radial mass `∫ m` and the normalisation `Z = |S^{d-1}| ∫ m`.
#[derive(Debug, Clone, PartialEq)]
pub struct MassReport {
    pub radial_mass: f64,
    pub z: f64,
    pub log_z: f64,
    pub converged: bool,
    pub trace: Vec<(f64, f64)>,
}

pub fn partition_mass(m: &ModelManifold, v: &RadialPotential) -> MassReport {
    let shift = scan_max(|r| m.log_radial_density(v, r));
    let est = Quadrature::default().integrate_half_line(&|r| shifted_density(m, v, shift, r), TailRule::HalvingPieces);
    let converged = est.is_finite();
    let log_mass = if converged {
        shift + est.value.ln()
    } else {
        f64::INFINITY
    };
    let log_z = log_mass + m.log_sphere_area();
    MassReport {
        radial_mass: log_mass.exp(),
        z: log_z.exp(),
        log_z,
        converged,
        trace: est.trace.iter().map(|&(r, s)| (r, s * shift.exp())).collect(),
    }
}

/// `μ(e^{λ ρ_o²})` with its convergence verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentReport {
    pub lambda: f64,
    pub value: f64,
    pub converged: bool,
    /// Partial normalised integrals at the doubling radii.
    pub truncation_trace: Vec<(f64, f64)>,
    pub tail_class: TailClass,
}

pub fn exp_moment(m: &ModelManifold, v: &RadialPotential, lambda: f64) -> Result<MomentReport> {
    let mu = RadialMeasure::new(m, v);
    exp_moment_in(&mu, lambda)
}

/// As [`exp_moment`] with a prepared measure.
pub fn exp_moment_in(mu: &RadialMeasure, lambda: f64) -> Result<MomentReport> {
    if !mu.is_finite() {
        return Err(Error::Divergent { radius: f64::INFINITY });
    }
    let shift = mu.log_shift;
    let z = mu.shifted_mass;
    let est = mu.quad.integrate_half_line(
        &|r| {
            if r <= 0.0 {
                0.0
            } else {
                (mu.log_density(r) - shift + lambda * r * r).exp()
            }
        },
        TailRule::HalvingPieces,
    );
    let converged = matches!(est.verdict, TailVerdict::Converged);
    Ok(MomentReport {
        lambda,
        value: if converged { est.value / z } else { f64::INFINITY },
        converged,
        truncation_trace: est.trace.iter().map(|&(r, s)| (r, s / z)).collect(),
        tail_class: mu.tail_class,
    })
}

/// A radial test function with its derivative.
pub trait RadialFunction {
    fn value(&self, r: f64) -> f64;
    fn derivative(&self, r: f64) -> f64;
    /// `ln |f(r)|`; override when `f` itself can overflow.
    fn log_abs(&self, r: f64) -> f64 {
        self.value(r).abs().ln()
    }
}

/// Members of the default LSI test family, plus a few simple shapes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TestFunction {
    Constant(f64),
    /// `a + b r`.
    Affine {
        a: f64,
        b: f64,
    },
    /// `exp(β r² / 4)`.
    GaussianExp {
        beta: f64,
    },
    /// `exp(-(r - c)² / 2)`.
    Bump {
        center: f64,
    },
}

impl RadialFunction for TestFunction {
    fn value(&self, r: f64) -> f64 {
        match *self {
            TestFunction::Constant(c) => c,
            TestFunction::Affine { a, b } => a + b * r,
            TestFunction::GaussianExp { beta } => (0.25 * beta * r * r).exp(),
            TestFunction::Bump { center } => (-0.5 * (r - center) * (r - center)).exp(),
        }
    }

    fn derivative(&self, r: f64) -> f64 {
        match *self {
            TestFunction::Constant(_) => 0.0,
            TestFunction::Affine { b, .. } => b,
            TestFunction::GaussianExp { beta } => 0.5 * beta * r * (0.25 * beta * r * r).exp(),
            TestFunction::Bump { center } => -(r - center) * (-0.5 * (r - center) * (r - center)).exp(),
        }
    }

    fn log_abs(&self, r: f64) -> f64 {
        match *self {
            TestFunction::GaussianExp { beta } => 0.25 * beta * r * r,
            TestFunction::Bump { center } => -0.5 * (r - center) * (r - center),
            _ => self.value(r).abs().ln(),
        }
    }
}

/// A radial function given by two closures.
pub struct FnPair<F, G>(pub F, pub G);

impl<F: Fn(f64) -> f64, G: Fn(f64) -> f64> RadialFunction for FnPair<F, G> {
    fn value(&self, r: f64) -> f64 {
        (self.0)(r)
    }
    fn derivative(&self, r: f64) -> f64 {
        (self.1)(r)
    }
}

/// Entropy and Dirichlet energy of the normalised `g = f / √μ(f²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyEnergy {
    pub entropy: f64,
    pub energy: f64,
    /// `entropy / energy`, defined as 0 for constants.
    pub ratio: f64,
}

/// `g ln g - g + 1` from `ln g`, accurate near `g = 1` and for `g → 0`.
fn entropy_density(log_g: f64) -> f64 {
    let g = log_g.exp();
    let t = g - 1.0;
    if t.abs() < 1e-2 {
        let mut term = t * t;
        let mut sum = 0.0;
        for n in 2..12 {
            let k = n as f64;
            sum += term / (k * (k - 1.0)) * if n % 2 == 0 { 1.0 } else { -1.0 };
            term *= t;
        }
        sum
    } else {
        g * log_g - t
    }
}

const COMPOSITE_PANELS: usize = 400;

pub fn entropy_energy<F: RadialFunction + ?Sized>(
    m: &ModelManifold,
    v: &RadialPotential,
    f: &F,
) -> Result<EntropyEnergy> {
    let log_weight = |r: f64| m.log_radial_density(v, r) + 2.0 * f.log_abs(r);
    let shift = scan_max(log_weight);
    if !shift.is_finite() {
        return Err(Error::Degenerate("test function vanishes on the scan grid"));
    }
    let cut = cutoff_for(log_weight, 60.0).ok_or(Error::Degenerate("test function not square integrable"))?;
    // the entropy integrand tends to the density itself where f is negligible
    let cut = cutoff_for(|r| m.log_radial_density(v, r), 60.0).map_or(cut, |c| c.max(cut));
    let gl = GaussLegendre::new(20);
    let h = cut / COMPOSITE_PANELS as f64;
    let mut nodes = Vec::with_capacity(COMPOSITE_PANELS * gl.len());
    for i in 0..COMPOSITE_PANELS {
        let a = i as f64 * h;
        gl.for_each_node(a, a + h, |x, wq| {
            let lw = m.log_radial_density(v, x) - shift;
            nodes.push((x, wq * lw.exp()));
        });
    }
    let mut mass = 0.0;
    let mut f2 = 0.0;
    let mut d2 = 0.0;
    for &(x, w) in &nodes {
        let fx = f.value(x);
        let dx = f.derivative(x);
        mass += w;
        f2 += w * fx * fx;
        d2 += w * dx * dx;
    }
    if !(f2 > 1e-300 * mass) {
        return Err(Error::Degenerate("mu(f^2) vanishes"));
    }
    let log_norm = (f2 / mass).ln();
    let mut ent = 0.0;
    for &(x, w) in &nodes {
        ent += w * entropy_density(2.0 * f.log_abs(x) - log_norm);
    }
    let entropy = (ent / mass).max(0.0);
    let energy = d2 / f2;
    let ratio = if energy > 0.0 { entropy / energy } else { 0.0 };
    Ok(EntropyEnergy { entropy, energy, ratio })
}

/// The default family: `exp(β r²/4)` for `β ∈ [-10, 10]` in steps of 0.05
/// (excluding 0), and unit bumps centred at `0.5, 1.0, …, 20`.
pub fn default_family() -> Vec<TestFunction> {
    let mut out = Vec::new();
    for i in -200i32..=200 {
        if i != 0 {
            out.push(TestFunction::GaussianExp { beta: i as f64 * 0.05 });
        }
    }
    for i in 1..=40 {
        out.push(TestFunction::Bump { center: i as f64 * 0.5 });
    }
    out
}

/// Best witnessed LSI constant over a family.
#[derive(Debug, Clone, PartialEq)]
pub struct LsiBound {
    pub c_lb: f64,
    pub argmax: Option<TestFunction>,
    /// Every non-degenerate member with its functionals.
    pub members: Vec<(TestFunction, EntropyEnergy)>,
}

pub fn lsi_lower_bound(m: &ModelManifold, v: &RadialPotential, family: &[TestFunction]) -> Result<LsiBound> {
    let mut members = Vec::new();
    let mut best: Option<(TestFunction, f64)> = None;
    for f in family {
        let Ok(ee) = entropy_energy(m, v, f) else { continue };
        if !(ee.ratio.is_finite()) {
            continue;
        }
        if best.map_or(true, |(_, b)| ee.ratio > b) {
            best = Some((*f, ee.ratio));
        }
        members.push((*f, ee));
    }
    if members.is_empty() {
        return Err(Error::Degenerate("every family member is degenerate"));
    }
    Ok(LsiBound {
        c_lb: best.map_or(0.0, |b| b.1),
        argmax: best.map(|b| b.0),
        members,
    })
}

/// Inverse-CDF sampler for the normalised radial density.
#[derive(Debug, Clone)]
pub struct RadialCdf {
    grid: Vec<f64>,
    cdf: Vec<f64>,
}

impl RadialCdf {
    /// Tabulates the CDF on `n` uniform cells up to the `drop = 60` cutoff.
    pub fn new(mu: &RadialMeasure, n: usize) -> Result<Self> {
        let cut = mu.cutoff(60.0).ok_or(Error::Divergent { radius: f64::INFINITY })?;
        let gl = GaussLegendre::new(8);
        let h = cut / n as f64;
        let mut grid = Vec::with_capacity(n + 1);
        let mut cdf = Vec::with_capacity(n + 1);
        let mut acc = 0.0;
        grid.push(0.0);
        cdf.push(0.0);
        let dens = |r: f64| shifted_density(&mu.manifold, &mu.potential, mu.log_shift, r);
        for i in 0..n {
            let a = i as f64 * h;
            acc += gl.panel(&dens, a, a + h);
            grid.push(a + h);
            cdf.push(acc);
        }
        for c in cdf.iter_mut() {
            *c /= acc;
        }
        Ok(Self { grid, cdf })
    }

    /// Radius at cumulative probability `u ∈ [0, 1]`.
    pub fn quantile(&self, u: f64) -> f64 {
        let i = self.cdf.partition_point(|&c| c < u).clamp(1, self.cdf.len() - 1);
        let (c0, c1) = (self.cdf[i - 1], self.cdf[i]);
        let t = if c1 > c0 { (u - c0) / (c1 - c0) } else { 0.5 };
        self.grid[i - 1] + t * (self.grid[i] - self.grid[i - 1])
    }
}
