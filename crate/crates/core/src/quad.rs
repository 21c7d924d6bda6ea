//! Adaptive composite Gauss–Legendre quadrature on finite intervals and on
//! half-lines, with divergence detection for improper integrals.

use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)] // inherent float methods shadow these when std is linked
use num_traits::Float;

/// Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes and weights by Newton iteration on `P_n`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 2, "Gauss-Legendre rule needs at least two nodes");
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for i in 0..n {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            nodes.push(x);
            weights.push(2.0 / ((1.0 - x * x) * dp * dp));
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Single-panel estimate of `∫_a^b f`.
    pub fn panel<F: Fn(f64) -> f64>(&self, f: &F, a: f64, b: f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }

    /// Calls `visit(x, w)` for every mapped node and weight on `[a, b]`.
    pub fn for_each_node<V: FnMut(f64, f64)>(&self, a: f64, b: f64, mut visit: V) {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            visit(mid + half * x, w * half);
        }
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Result of a finite-interval integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub panels: usize,
}

/// How the tail of an improper integral is judged.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailRule {
    /// Once the doubling pieces start shrinking, each must shrink by at
    /// least a factor two; three consecutive failures mean divergence.
    /// Pieces are integrated out to the cap radius.
    HalvingPieces,
    /// Pieces are assumed to follow a power law; a stable piece ratio below
    /// one is summed geometrically, a ratio at or above one diverges.
    PowerLaw,
}

/// Outcome of an improper integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailVerdict {
    Converged,
    Divergent { radius: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImproperEstimate {
    pub value: f64,
    pub error: f64,
    pub verdict: TailVerdict,
    /// `(R, ∫_a^R f)` at every doubling radius.
    pub trace: Vec<(f64, f64)>,
    /// Radius from which the doubling pieces started shrinking.
    pub detected_radius: Option<f64>,
}

impl ImproperEstimate {
    pub fn is_finite(&self) -> bool {
        matches!(self.verdict, TailVerdict::Converged)
    }

    /// The value if converged.
    pub fn finite(&self) -> Option<f64> {
        self.is_finite().then_some(self.value)
    }
}

/// Adaptive quadrature driver.
#[derive(Debug, Clone)]
pub struct Quadrature {
    rule: GaussLegendre,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_depth: u32,
    /// Doubling pieces are taken up to `start * 2^max_doublings`.
    pub max_doublings: u32,
}

impl Default for Quadrature {
    fn default() -> Self {
        Self::new(1e-10, 1e-8)
    }
}

impl Quadrature {
    pub fn new(abs_tol: f64, rel_tol: f64) -> Self {
        Self {
            rule: GaussLegendre::new(20),
            abs_tol,
            rel_tol,
            max_depth: 40,
            max_doublings: 15,
        }
    }

    /// `∫_a^b f` by bisection until each panel's halves agree with it.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: &F, a: f64, b: f64) -> Estimate {
        if a == b {
            return Estimate {
                value: 0.0,
                error: 0.0,
                panels: 0,
            };
        }
        let width = (b - a).abs();
        let mut stack: Vec<(f64, f64, f64, u32)> = Vec::new();
        stack.push((a, b, self.rule.panel(f, a, b), 0));
        let mut value = 0.0;
        let mut error = 0.0;
        let mut panels = 0;
        while let Some((lo, hi, whole, depth)) = stack.pop() {
            let mid = 0.5 * (lo + hi);
            let left = self.rule.panel(f, lo, mid);
            let right = self.rule.panel(f, mid, hi);
            let halves = left + right;
            let diff = (halves - whole).abs();
            let local_abs = self.abs_tol * (hi - lo).abs() / width;
            let tol = local_abs.max(self.rel_tol * halves.abs());
            if diff <= tol || depth >= self.max_depth || !halves.is_finite() {
                value += halves;
                error += diff;
                panels += 1;
            } else {
                stack.push((lo, mid, left, depth + 1));
                stack.push((mid, hi, right, depth + 1));
            }
        }
        Estimate { value, error, panels }
    }

    /// `∫_a^b f` with the interval pre-split into `pieces` equal panels.
    pub fn integrate_split<F: Fn(f64) -> f64>(&self, f: &F, a: f64, b: f64, pieces: usize) -> Estimate {
        let h = (b - a) / pieces as f64;
        let mut out = Estimate {
            value: 0.0,
            error: 0.0,
            panels: 0,
        };
        for i in 0..pieces {
            let lo = a + h * i as f64;
            let hi = if i + 1 == pieces { b } else { lo + h };
            let e = self.integrate(f, lo, hi);
            out.value += e.value;
            out.error += e.error;
            out.panels += e.panels;
        }
        out
    }

    /// `∫_0^∞ f`: the head `[0, 1]` followed by doubling pieces `[2^k, 2^{k+1}]`.
    pub fn integrate_half_line<F: Fn(f64) -> f64>(&self, f: &F, rule: TailRule) -> ImproperEstimate {
        let head = self.integrate_split(f, 0.0, 1.0, 8);
        self.doubling_tail(f, 1.0, head, rule)
    }

    /// `∫_a^∞ f` for `a > 0`, with pieces `[a 2^k, a 2^{k+1}]`.
    pub fn integrate_tail<F: Fn(f64) -> f64>(&self, f: &F, a: f64, rule: TailRule) -> ImproperEstimate {
        let head = Estimate {
            value: 0.0,
            error: 0.0,
            panels: 0,
        };
        self.doubling_tail(f, a, head, rule)
    }

    fn doubling_tail<F: Fn(f64) -> f64>(&self, f: &F, start: f64, head: Estimate, rule: TailRule) -> ImproperEstimate {
        let mut total = head.value;
        let mut error = head.error;
        let mut trace = Vec::new();
        trace.push((start, total));
        if !total.is_finite() {
            return ImproperEstimate {
                value: f64::INFINITY,
                error,
                verdict: TailVerdict::Divergent { radius: start },
                trace,
                detected_radius: None,
            };
        }
        let max_doublings = match rule {
            TailRule::HalvingPieces => self.max_doublings,
            TailRule::PowerLaw => self.max_doublings.max(60),
        };
        let mut prev_piece: Option<f64> = None;
        let mut prev_ratio: Option<f64> = None;
        let mut detected: Option<f64> = None;
        let mut failures = 0u32;
        let mut lo = start;
        for _ in 0..max_doublings {
            let hi = 2.0 * lo;
            let piece = self.integrate_split(f, lo, hi, 8);
            let p = piece.value;
            if !p.is_finite() {
                return divergent(lo, error, trace, detected);
            }
            total += p;
            error += piece.error;
            trace.push((hi, total));
            match rule {
                TailRule::HalvingPieces => {
                    if let Some(q) = prev_piece {
                        let shrinking = p.abs() <= q.abs();
                        if detected.is_none() && shrinking {
                            detected = Some(lo);
                        }
                        if detected.is_some() {
                            let halved = p.abs() <= 0.5 * q.abs() || (p == 0.0 && q == 0.0);
                            if halved {
                                failures = 0;
                            } else {
                                failures += 1;
                                if failures >= 3 {
                                    return divergent(hi, error, trace, detected);
                                }
                            }
                        }
                    }
                }
                TailRule::PowerLaw => {
                    if let Some(q) = prev_piece {
                        if q != 0.0 {
                            let ratio = p / q;
                            if let Some(r0) = prev_ratio {
                                let stable = (ratio - r0).abs() <= 1e-6 * ratio.abs().max(1e-300);
                                if stable {
                                    detected.get_or_insert(lo);
                                    if ratio >= 1.0 - 1e-9 {
                                        return divergent(hi, error, trace, detected);
                                    }
                                    let rest = p * ratio / (1.0 - ratio);
                                    total += rest;
                                    trace.push((f64::INFINITY, total));
                                    return ImproperEstimate {
                                        value: total,
                                        error,
                                        verdict: TailVerdict::Converged,
                                        trace,
                                        detected_radius: detected,
                                    };
                                }
                            }
                            prev_ratio = Some(ratio);
                        } else if p == 0.0 {
                            return ImproperEstimate {
                                value: total,
                                error,
                                verdict: TailVerdict::Converged,
                                trace,
                                detected_radius: Some(lo),
                            };
                        }
                    }
                }
            }
            prev_piece = Some(p);
            lo = hi;
        }
        match rule {
            TailRule::HalvingPieces if detected.is_some() => ImproperEstimate {
                value: total,
                error,
                verdict: TailVerdict::Converged,
                trace,
                detected_radius: detected,
            },
            _ => divergent(lo, error, trace, detected),
        }
    }
}

fn divergent(radius: f64, error: f64, trace: Vec<(f64, f64)>, detected_radius: Option<f64>) -> ImproperEstimate {
    ImproperEstimate {
        value: f64::INFINITY,
        error,
        verdict: TailVerdict::Divergent { radius },
        trace,
        detected_radius,
    }
}

/// Golden-section search for the maximum of a unimodal `f` on `[a, b]`.
pub fn golden_max<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let g = 0.5 * (5.0f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol * (1.0 + c.abs()) {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    if fc > fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Geometric grid of `n` points on `[lo, hi]`.
pub fn geometric_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && n >= 2);
    let ratio = (hi / lo).ln() / (n - 1) as f64;
    (0..n)
        .map(|i| if i + 1 == n { hi } else { lo * (ratio * i as f64).exp() })
        .collect()
}

/// Uniform grid of `n` points on `[lo, hi]`.
pub fn uniform_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2);
    let h = (hi - lo) / (n - 1) as f64;
    (0..n)
        .map(|i| if i + 1 == n { hi } else { lo + h * i as f64 })
        .collect()
}
