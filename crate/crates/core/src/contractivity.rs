//! Growth-function calculus for the Hessian growth `Φ` and Ricci growth `Ψ`:
//! `Γ₁`, `Γ₂`, `φ`, `η`, `C(λ)`, the growth condition linking `Φ` and `Ψ`,
//! ultracontractivity bounds and the hyper/super/ultra verdict.

use alloc::vec::Vec;
use core::f64::consts::SQRT_2;
#[allow(unused_imports)] // inherent float methods shadow these when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::geometry::{hess_v_eigenvalues, laplacian_rho_sq, ModelManifold, RadialPotential};
use crate::quad::{golden_max, uniform_grid, Quadrature, TailRule, TailVerdict};
use crate::report::Verdict;

const ONE_PLUS_SQRT2: f64 = 1.0 + SQRT_2;

fn quad() -> Quadrature {
    Quadrature::new(1e-15, 1e-13)
}

/// Hessian growth `Φ`.
#[derive(Debug, Clone, Copy)]
pub enum Growth {
    /// `Φ(s) = scale · s^{α-1}`, `α > 1`.
    Power { alpha: f64, scale: f64 },
    /// `Φ ≡ value`.
    Constant { value: f64 },
    /// Any increasing positive function; everything goes through quadrature.
    Custom(fn(f64) -> f64),
}

impl PartialEq for Growth {
    fn eq(&self, other: &Self) -> bool {
        match (*self, *other) {
            (Growth::Power { alpha: a, scale: s }, Growth::Power { alpha: b, scale: t }) => a == b && s == t,
            (Growth::Constant { value: a }, Growth::Constant { value: b }) => a == b,
            (Growth::Custom(f), Growth::Custom(g)) => core::ptr::fn_addr_eq(f, g),
            _ => false,
        }
    }
}

/// Ricci growth `Ψ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CurvatureGrowth {
    Zero,
    /// `Ψ(s) = ε s^{exponent}`.
    Power {
        epsilon: f64,
        exponent: f64,
    },
}

impl CurvatureGrowth {
    pub fn value(&self, s: f64) -> f64 {
        match *self {
            CurvatureGrowth::Zero => 0.0,
            CurvatureGrowth::Power { epsilon, exponent } => epsilon * s.max(0.0).powf(exponent),
        }
    }
}

/// The pair `(Φ, Ψ)` with the ratio `θ` and the constant of the growth
/// condition `√(Ψ(r+t)(d-1)) ≤ θ P(r) + ½ P(t/2) + C`, `P = ∫_0^· Φ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthPair {
    pub phi: Growth,
    pub psi: CurvatureGrowth,
    pub theta: f64,
    pub c45: f64,
}

impl GrowthPair {
    pub fn new(phi: Growth, psi: CurvatureGrowth, theta: f64) -> Result<Self> {
        if !(theta > 0.0 && theta < 1.0 / ONE_PLUS_SQRT2) {
            return Err(Error::InvalidParameter {
                name: "theta".into(),
                constraint: "theta must lie in (0, 1/(1+sqrt 2))".into(),
            });
        }
        match phi {
            Growth::Power { alpha, scale } if !(alpha > 1.0 && scale > 0.0) => {
                return Err(Error::InvalidParameter {
                    name: "alpha".into(),
                    constraint: "alpha must be > 1 and scale > 0".into(),
                })
            }
            Growth::Constant { value } if !(value >= 0.0) => {
                return Err(Error::InvalidParameter {
                    name: "phi".into(),
                    constraint: "constant phi must be >= 0".into(),
                })
            }
            _ => {}
        }
        if let CurvatureGrowth::Power { epsilon, .. } = psi {
            if !(epsilon > 0.0) {
                return Err(Error::InvalidParameter {
                    name: "epsilon".into(),
                    constraint: "epsilon must be > 0".into(),
                });
            }
        }
        Ok(Self {
            phi,
            psi,
            theta,
            c45: 0.0,
        })
    }

    /// `Φ(s) = s^{α-1}` with `Ψ(s) = ε s^{2α}`, the pair of the closing
    /// example.
    pub fn power(alpha: f64, epsilon: f64, theta: f64) -> Result<Self> {
        Self::new(
            Growth::Power { alpha, scale: 1.0 },
            CurvatureGrowth::Power {
                epsilon,
                exponent: 2.0 * alpha,
            },
            theta,
        )
    }

    pub fn with_c45(mut self, c45: f64) -> Self {
        self.c45 = c45;
        self
    }

    pub fn phi(&self, s: f64) -> f64 {
        match self.phi {
            Growth::Power { alpha, scale } => scale * s.powf(alpha - 1.0),
            Growth::Constant { value } => value,
            Growth::Custom(f) => f(s),
        }
    }

    pub fn psi(&self, s: f64) -> f64 {
        self.psi.value(s)
    }

    /// `P(r) = ∫_0^r Φ`.
    pub fn primitive(&self, r: f64) -> f64 {
        match self.phi {
            Growth::Power { alpha, scale } => scale * r.powf(alpha) / alpha,
            Growth::Constant { value } => value * r,
            Growth::Custom(_) => self.primitive_numeric(r),
        }
    }

    pub fn primitive_numeric(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        quad().integrate_split(&|s| self.phi(s), 0.0, r, 8).value
    }

    /// `Γ₁(r) = P(√r)/√r`, with `Γ₁(0)` the limit `Φ(0)`.
    pub fn gamma1(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return self.phi(0.0);
        }
        match self.phi {
            Growth::Power { alpha, scale } => scale * r.powf(0.5 * (alpha - 1.0)) / alpha,
            _ => self.primitive(r.sqrt()) / r.sqrt(),
        }
    }

    pub fn gamma1_numeric(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return self.phi(0.0);
        }
        self.primitive_numeric(r.sqrt()) / r.sqrt()
    }

    /// `Γ₂(r) = ∫_r^∞ ds / (√s P(√s))`; `Err(Divergent)` when infinite.
    pub fn gamma2(&self, r: f64) -> Result<f64> {
        crate::error::require_positive_radius("gamma2", r)?;
        match self.phi {
            Growth::Power { alpha, scale } => Ok((alpha / scale) * (2.0 / (alpha - 1.0)) * r.powf(0.5 * (1.0 - alpha))),
            Growth::Constant { .. } => Err(Error::Divergent { radius: f64::INFINITY }),
            Growth::Custom(_) => self.gamma2_numeric(r),
        }
    }

    pub fn gamma2_numeric(&self, r: f64) -> Result<f64> {
        crate::error::require_positive_radius("gamma2", r)?;
        let f = |s: f64| 1.0 / (s.sqrt() * self.primitive(s.sqrt()));
        let est = quad().integrate_tail(&f, r, TailRule::PowerLaw);
        match est.verdict {
            TailVerdict::Converged => Ok(est.value),
            TailVerdict::Divergent { radius } => Err(Error::Divergent { radius }),
        }
    }

    /// Whether `Γ₂(1) < ∞`.
    pub fn gamma2_finite(&self) -> bool {
        self.gamma2(1.0).is_ok()
    }

    /// `φ(r) = ∫_0^r P(√s)/√s ds = 2∫_0^{√r} P`.
    pub fn phi_fn(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        match self.phi {
            Growth::Power { alpha, scale } => 2.0 * scale * r.powf(0.5 * (alpha + 1.0)) / (alpha * (alpha + 1.0)),
            Growth::Constant { value } => value * r,
            Growth::Custom(_) => self.phi_fn_numeric(r),
        }
    }

    pub fn phi_fn_numeric(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        2.0 * quad().integrate_split(&|u| self.primitive(u), 0.0, r.sqrt(), 8).value
    }

    /// `η(r) = √r P(√r) = r Γ₁(r)`.
    pub fn eta_fn(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        r.sqrt() * self.primitive(r.sqrt())
    }

    /// `Φ(r_max) > 10 Φ(1)`.
    pub fn unbounded_evidence(&self, r_max: f64) -> bool {
        self.phi(r_max) > 10.0 * self.phi(1.0)
    }

    /// `P(r)²/Φ(r)` increasing on `[1, r_max]` and above 10 at `r_max`.
    pub fn growth_ratio_evidence(&self, r_max: f64) -> bool {
        let ratio = |r: f64| {
            let p = self.primitive(r);
            p * p / self.phi(r)
        };
        let grid = uniform_grid(1.0, r_max, 200);
        grid.windows(2).all(|w| ratio(w[1]) > ratio(w[0])) && ratio(r_max) > 10.0
    }
}

pub fn gamma1(gp: &GrowthPair, r: f64) -> f64 {
    gp.gamma1(r)
}

pub fn gamma2(gp: &GrowthPair, r: f64) -> Result<f64> {
    gp.gamma2(r)
}

pub fn phi_fn(gp: &GrowthPair, r: f64) -> f64 {
    gp.phi_fn(r)
}

pub fn eta_fn(gp: &GrowthPair, r: f64) -> f64 {
    gp.eta_fn(r)
}

fn bisect<F: Fn(f64) -> bool>(above: F, mut lo: f64, mut hi: f64) -> f64 {
    // invariant: !above(lo), above(hi)
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if above(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// `Γ₁⁻¹(s) = inf{t ≥ 0 : Γ₁(t) ≥ s}`.
pub fn gamma1_inverse(gp: &GrowthPair, s: f64) -> Result<f64> {
    if s <= gp.gamma1(0.0) {
        return Ok(0.0);
    }
    if let Growth::Power { alpha, scale } = gp.phi {
        return Ok((alpha * s / scale).powf(2.0 / (alpha - 1.0)));
    }
    let mut hi = 1.0;
    let mut n = 0;
    while gp.gamma1(hi) < s {
        hi *= 2.0;
        n += 1;
        if n > 1000 || !hi.is_finite() {
            return Err(Error::Range {
                what: "gamma1",
                level: s,
            });
        }
    }
    Ok(bisect(|t| gp.gamma1(t) >= s, 0.0, hi))
}

/// `Γ₂⁻¹(s) = inf{r > 0 : Γ₂(r) ≤ s}`.
pub fn gamma2_inverse(gp: &GrowthPair, s: f64) -> Result<f64> {
    if !(s > 0.0) {
        return Err(Error::Range {
            what: "gamma2",
            level: s,
        });
    }
    if let Growth::Power { alpha, scale } = gp.phi {
        let k = (alpha / scale) * (2.0 / (alpha - 1.0));
        return Ok((k / s).powf(2.0 / (alpha - 1.0)));
    }
    let below = |r: f64| gp.gamma2(r).map(|g| g <= s);
    let mut hi = 1.0;
    let mut n = 0;
    while !below(hi)? {
        hi *= 2.0;
        n += 1;
        if n > 1000 || !hi.is_finite() {
            return Err(Error::Range {
                what: "gamma2",
                level: s,
            });
        }
    }
    let mut lo = 0.5 * hi;
    n = 0;
    while below(lo)? {
        lo *= 0.5;
        n += 1;
        if n > 1000 {
            return Ok(0.0);
        }
    }
    Ok(bisect(|r| below(r).unwrap_or(false), lo, hi))
}

/// Generic inverse of either growth function.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GammaFn {
    Gamma1,
    Gamma2,
}

pub fn inverse_monotone(gp: &GrowthPair, which: GammaFn, s: f64) -> Result<f64> {
    match which {
        GammaFn::Gamma1 => gamma1_inverse(gp, s),
        GammaFn::Gamma2 => gamma2_inverse(gp, s),
    }
}

/// `C(λ)` with its search domain and the a priori bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CLambda {
    pub value: f64,
    /// Natural log of `value` (`-∞` when zero); finite even when `value`
    /// overflows.
    pub log_value: f64,
    pub argmax: f64,
    /// Right end of the search domain.
    pub r_max: f64,
    /// `4λ + 2λ Γ₁⁻¹(4(1+√2)²λ)`, the log of the a priori bound.
    pub log_bound: f64,
    pub within_bound: bool,
}

/// `sup_r r e^{λr²} (4λ²r - λ P(r)/(1+√2)²)`, clamped at 0.
pub fn c_lambda(gp: &GrowthPair, lambda: f64) -> Result<CLambda> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidParameter {
            name: "lambda".into(),
            constraint: "lambda must be > 0".into(),
        });
    }
    let level = 4.0 * ONE_PLUS_SQRT2 * ONE_PLUS_SQRT2 * lambda;
    let r2 = gamma1_inverse(gp, level)?;
    let r_max = r2.sqrt();
    let log_bound = 4.0 * lambda + 2.0 * lambda * r2;
    let a2 = ONE_PLUS_SQRT2 * ONE_PLUS_SQRT2;
    // Log of the positive part; -∞ where the bracket is not positive.
    let log_g = |r: f64| {
        let bracket = 4.0 * lambda * lambda * r - lambda * gp.primitive(r) / a2;
        if r > 0.0 && bracket > 0.0 {
            r.ln() + lambda * r * r + bracket.ln()
        } else {
            f64::NEG_INFINITY
        }
    };
    let mut best = (0.0, f64::NEG_INFINITY);
    if r_max > 0.0 {
        let grid = uniform_grid(0.0, r_max, 401);
        let mut k_best = 0;
        for (k, &r) in grid.iter().enumerate() {
            let v = log_g(r);
            if v > best.1 {
                best = (r, v);
                k_best = k;
            }
        }
        if best.1.is_finite() {
            let a = grid[k_best.saturating_sub(1)];
            let b = grid[(k_best + 1).min(grid.len() - 1)];
            let refined = golden_max(&log_g, a, b, 1e-12);
            if refined.1 > best.1 {
                best = refined;
            }
        }
    }
    let log_value = best.1;
    Ok(CLambda {
        value: log_value.exp(),
        log_value,
        argmax: best.0,
        r_max,
        log_bound,
        within_bound: log_value <= log_bound + 1e-12 * log_bound.abs().max(1.0),
    })
}

/// Outcome of the growth-condition scan.
#[derive(Debug, Clone, PartialEq)]
pub struct Condition45Report {
    /// Smallest `C` making the inequality hold on the grid.
    pub c: f64,
    /// Minimum of `rhs - lhs` with the fitted `C` (zero or positive).
    pub min_margin: f64,
    /// Where the deficit is largest.
    pub argmax: (f64, f64),
    /// Largest deficit on the outermost ring of the grid and on the ring
    /// just inside it.
    pub outer_deficit: f64,
    pub inner_deficit: f64,
    pub pass: bool,
}

/// Scans `√(Ψ(r+t)(d-1)) - θP(r) - ½P(t/2)` on `grid_r × grid_t`. The
/// condition fails when the deficit is positive and still growing at the
/// outer boundary, since then no finite constant exists.
pub fn check_condition_45(gp: &GrowthPair, d: usize, grid_r: &[f64], grid_t: &[f64]) -> Result<Condition45Report> {
    let (nr, nt) = (grid_r.len(), grid_t.len());
    if nr < 2 || nt < 2 {
        return Err(Error::Degenerate("condition grid needs at least 2 points per axis"));
    }
    let dm1 = (d.max(1) - 1) as f64;
    let deficit =
        |r: f64, t: f64| (gp.psi(r + t) * dm1).sqrt() - gp.theta * gp.primitive(r) - 0.5 * gp.primitive(0.5 * t);
    let mut worst = (f64::NEG_INFINITY, (0.0, 0.0));
    let mut outer = f64::NEG_INFINITY;
    let mut inner = f64::NEG_INFINITY;
    for (i, &r) in grid_r.iter().enumerate() {
        for (j, &t) in grid_t.iter().enumerate() {
            let dv = deficit(r, t);
            if dv > worst.0 {
                worst = (dv, (r, t));
            }
            if i == nr - 1 || j == nt - 1 {
                outer = outer.max(dv);
            } else if i == nr - 2 || j == nt - 2 {
                inner = inner.max(dv);
            }
        }
    }
    let c = worst.0.max(0.0);
    let pass = !(outer > 0.0 && outer > inner);
    Ok(Condition45Report {
        c,
        min_margin: c - worst.0,
        argmax: worst.1,
        outer_deficit: outer,
        inner_deficit: inner,
        pass,
    })
}

/// Smallest radius beyond which both `Hess_V` eigenvalues lie below `-Φ`,
/// and the largest eigenvalue inside it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HessianGrowthCheck {
    pub observed_r0: Option<f64>,
    pub inner_max: f64,
}

pub fn check_hessian_growth(
    m: &ModelManifold,
    v: &RadialPotential,
    gp: &GrowthPair,
    grid: &[f64],
) -> Result<HessianGrowthCheck> {
    let mut ok = Vec::with_capacity(grid.len());
    let mut eig = Vec::with_capacity(grid.len());
    for &r in grid {
        let (a, b) = hess_v_eigenvalues(m, v, r)?;
        let target = -gp.phi(r);
        let tol = 1e-9 * target.abs().max(1.0);
        ok.push(a <= target + tol && b <= target + tol);
        eig.push(a.max(b));
    }
    let first_tail = ok.iter().rposition(|&x| !x).map_or(0, |i| i + 1);
    if first_tail >= grid.len() {
        return Ok(HessianGrowthCheck {
            observed_r0: None,
            inner_max: f64::NAN,
        });
    }
    let observed = if first_tail == 0 { 0.0 } else { grid[first_tail - 1] };
    let inner_max = eig[..first_tail].iter().copied().fold(0.0f64, f64::max);
    Ok(HessianGrowthCheck {
        observed_r0: Some(observed),
        inner_max,
    })
}

/// Smallest `C` with `L e^{λρ²} ≤ C + C(λ) - λρ e^{λρ²} P(ρ)` on `grid`,
/// using `L e^{λρ²} = e^{λρ²}(λ Lρ² + 4λ²ρ²)`.
pub fn fit_moment_drift(
    m: &ModelManifold,
    v: &RadialPotential,
    gp: &GrowthPair,
    lambda: f64,
    grid: &[f64],
) -> Result<f64> {
    let cl = c_lambda(gp, lambda)?;
    let mut c = 0.0f64;
    for &r in grid {
        let e = (lambda * r * r).exp();
        let lhs = e * (lambda * laplacian_rho_sq(m, v, r) + 4.0 * lambda * lambda * r * r);
        c = c.max(lhs - cl.value + lambda * r * e * gp.primitive(r));
    }
    Ok(c)
}

/// `ln(2C + 2C(λ))` for the smallest admissible `C` of
/// [`fit_moment_drift`], evaluated in log form so large `λ` do not overflow.
pub fn moment_level_log(
    m: &ModelManifold,
    v: &RadialPotential,
    gp: &GrowthPair,
    lambda: f64,
    grid: &[f64],
) -> Result<f64> {
    let cl = c_lambda(gp, lambda)?;
    // C + C(λ) = max(C(λ), sup e^{λρ²} q) with q the bracket below.
    let mut log_sup = cl.log_value;
    for &r in grid {
        let q = lambda * laplacian_rho_sq(m, v, r) + 4.0 * lambda * lambda * r * r + lambda * r * gp.primitive(r);
        if q > 0.0 {
            log_sup = log_sup.max(lambda * r * r + q.ln());
        }
    }
    Ok(core::f64::consts::LN_2 + log_sup)
}

/// `exp[c + (c/t)(1 + Γ₁⁻¹(c/t) + Γ₂⁻¹(t/c))]` and its parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UltraBound {
    pub t: f64,
    pub c: f64,
    pub log_value: f64,
    pub value: f64,
    pub gamma1_inv_term: f64,
    pub gamma2_inv_term: f64,
}

pub fn ultra_bound(gp: &GrowthPair, c: f64, t: f64) -> Result<UltraBound> {
    if !(t > 0.0 && c > 0.0) {
        return Err(Error::InvalidParameter {
            name: "t".into(),
            constraint: "t and c must be > 0".into(),
        });
    }
    let g1 = gamma1_inverse(gp, c / t)?;
    let g2 = gamma2_inverse(gp, t / c)?;
    let log_value = c + (c / t) * (1.0 + g1 + g2);
    Ok(UltraBound {
        t,
        c,
        log_value,
        value: log_value.exp(),
        gamma1_inv_term: g1,
        gamma2_inv_term: g2,
    })
}

/// Short-time exponent `(α+1)/(α-1)` of the power example.
pub fn power_law_exponent(alpha: f64) -> Result<f64> {
    if !(alpha > 1.0) {
        return Err(Error::Domain {
            what: "power_law_exponent",
            constraint: "alpha > 1",
            value: alpha,
        });
    }
    Ok((alpha + 1.0) / (alpha - 1.0))
}

/// Slope of `ln(log B)` against `ln(1/t)` between two times.
pub fn log_bound_slope(a: &UltraBound, b: &UltraBound) -> f64 {
    (b.log_value.ln() - a.log_value.ln()) / ((1.0 / b.t).ln() - (1.0 / a.t).ln())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentPhase {
    /// The initial moment already sits below the plateau.
    Plateau,
    /// The moment first decreases, then settles at the plateau.
    Decreasing,
}

/// Bound on `E e^{λρ²(x_t)}` from `d⁺h/dt ≤ C + C(λ) - λ h η(λ⁻¹ ln h)`.
/// The `log_*` fields stay finite where the values overflow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupMomentBound {
    pub lambda: f64,
    pub t: f64,
    pub h0: f64,
    /// `sup{h ≥ 1 : λ h η(ln h / λ) ≤ 2C + 2C(λ)}`.
    pub plateau: f64,
    /// `exp[λ Γ₂⁻¹(t/2)]`.
    pub decreasing: f64,
    pub bound: f64,
    pub log_bound: f64,
    /// Start-independent bound `max(plateau, decreasing)`.
    pub uniform: f64,
    pub log_uniform: f64,
    pub phase: MomentPhase,
    /// `ln(2C + 2C(λ))`.
    pub log_level: f64,
}

pub fn sup_moment_bound(gp: &GrowthPair, lambda: f64, t: f64, h0: f64, c_drift: f64) -> Result<SupMomentBound> {
    let cl = c_lambda(gp, lambda)?;
    let log_level = core::f64::consts::LN_2 + (c_drift + cl.value).ln();
    sup_moment_bound_log(gp, lambda, t, h0.ln(), log_level)
}

/// [`sup_moment_bound`] with the start `ln h0` and the level
/// `ln(2C + 2C(λ))` given in log form, e.g. from [`moment_level_log`].
pub fn sup_moment_bound_log(
    gp: &GrowthPair,
    lambda: f64,
    t: f64,
    log_h0: f64,
    log_level: f64,
) -> Result<SupMomentBound> {
    if !(t > 0.0 && log_h0 >= 0.0 && lambda > 0.0) {
        return Err(Error::InvalidParameter {
            name: "h0".into(),
            constraint: "t and lambda must be > 0 and h0 >= 1".into(),
        });
    }
    // ln of λ h η(ln h / λ) at u = ln h; increasing in u.
    let log_g = |u: f64| lambda.ln() + u + gp.eta_fn(u / lambda).ln();
    let log_plateau = if log_level.is_nan() || log_level == f64::INFINITY {
        f64::INFINITY
    } else {
        let mut hi = 1.0;
        while log_g(hi) <= log_level && hi < 1e12 {
            hi *= 2.0;
        }
        if log_g(hi) <= log_level {
            f64::INFINITY
        } else {
            bisect(|u| log_g(u) > log_level, 0.0, hi)
        }
    };
    let log_decreasing = lambda * gamma2_inverse(gp, 0.5 * t)?;
    let (phase, log_bound) = if log_g(log_h0) <= log_level {
        (MomentPhase::Plateau, log_plateau)
    } else {
        (MomentPhase::Decreasing, log_h0.min(log_decreasing).max(log_plateau))
    };
    let log_uniform = log_plateau.max(log_decreasing);
    Ok(SupMomentBound {
        lambda,
        t,
        h0: log_h0.exp(),
        plateau: log_plateau.exp(),
        decreasing: log_decreasing.exp(),
        bound: log_bound.exp(),
        log_bound,
        uniform: log_uniform.exp(),
        log_uniform,
        phase,
        log_level,
    })
}

/// Evidence feeding the three-level verdict. `None` means not collected.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ContractivityEvidence {
    /// Finiteness of `μ(e^{λρ²})` at the λ the hypercontractivity chain needs.
    pub hyper_moment_finite: Option<bool>,
    /// Verdict of the Harnack check for the scenario.
    pub harnack: Option<Verdict>,
    /// `(λ, finite)` over the super grid up to λ = 10.
    pub super_moments: Vec<(f64, bool)>,
    /// Finiteness of the ultracontractivity and sup-moment bounds.
    pub ultra_bounds_finite: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContractivityVerdict {
    pub hyper: Verdict,
    pub super_: Verdict,
    pub ultra: Verdict,
}

/// Assembles the verdicts so that ultra implies super implies hyper.
pub fn hyper_super_ultra_verdict(ev: &ContractivityEvidence) -> ContractivityVerdict {
    let super_ = if !ev.super_moments.is_empty() && ev.super_moments.iter().all(|m| m.1) {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    let ultra = match (super_, ev.ultra_bounds_finite) {
        (Verdict::Pass, Some(true)) => Verdict::Pass,
        _ => Verdict::Fail,
    };
    let hyper = if super_ == Verdict::Pass {
        Verdict::Pass
    } else {
        match (ev.hyper_moment_finite, ev.harnack) {
            (Some(false), _) => Verdict::Fail,
            (Some(true), Some(Verdict::Pass)) => Verdict::Pass,
            (Some(true), Some(Verdict::Fail)) => Verdict::Fail,
            (Some(true), _) => Verdict::Inconclusive,
            (None, _) => Verdict::Inconclusive,
        }
    };
    ContractivityVerdict { hyper, super_, ultra }
}
