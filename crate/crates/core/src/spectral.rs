//! Spectral gap of `L` restricted to the lowest angular sectors.
//!
//! A function `f(r) Y(Θ)` with `Y` a spherical harmonic of degree `l` sees
//! the radial operator `f'' + ((d-1) w'/w + V') f' - l(l+d-2) f / w²`. The
//! gap of `L` is the smaller of the second `l = 0` eigenvalue and the first
//! `l = 1` eigenvalue. Both are computed from a finite-volume discretisation
//! of the divergence form `m⁻¹ (m f')'` on `[0, R]`, which yields a
//! symmetric tridiagonal matrix after scaling by the mass.

use alloc::vec::Vec;
#[allow(unused_imports)] // inherent float methods shadow these when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::geometry::{ModelManifold, RadialPotential};

/// Symmetric tridiagonal matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    pub diag: Vec<f64>,
    /// `off[i]` couples `i` and `i + 1`.
    pub off: Vec<f64>,
}

impl Tridiagonal {
    /// Number of eigenvalues strictly below `x` (Sturm sequence count).
    pub fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut q = self.diag[0] - x;
        if q < 0.0 {
            count += 1;
        }
        for i in 1..self.diag.len() {
            let denom = if q == 0.0 {
                f64::EPSILON * (self.off[i - 1].abs() + 1e-300)
            } else {
                q
            };
            q = self.diag[i] - x - self.off[i - 1] * self.off[i - 1] / denom;
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// The `k`-th smallest eigenvalue (0-based) by bisection.
    pub fn eigenvalue(&self, k: usize) -> f64 {
        let n = self.diag.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { self.off[i - 1].abs() } else { 0.0 } + if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

/// Discretisation parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapOptions {
    /// Right end of the domain; chosen where `ln m` has dropped by 60 when
    /// absent.
    pub cutoff: Option<f64>,
    /// Cells on the coarse grid; the fine grid has twice as many.
    pub cells: usize,
}

impl Default for GapOptions {
    fn default() -> Self {
        Self {
            cutoff: None,
            cells: 2000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapReport {
    /// `min(radial, angular)`.
    pub gap: f64,
    /// Second eigenvalue in the radial sector (Neumann at the pole).
    pub radial: f64,
    /// First eigenvalue in the `l = 1` sector.
    pub angular: f64,
    pub cutoff: f64,
    pub coarse: f64,
    pub fine: f64,
}

fn sector_matrix(m: &ModelManifold, v: &RadialPotential, cutoff: f64, n: usize, degree: usize) -> Tridiagonal {
    let h = cutoff / n as f64;
    let centre = |i: usize| (i as f64 + 0.5) * h;
    let logm: Vec<f64> = (0..n).map(|i| m.log_radial_density(v, centre(i))).collect();
    let shift = logm.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mass: Vec<f64> = logm.iter().map(|l| (l - shift).exp() * h).collect();
    let flux: Vec<f64> = (1..n)
        .map(|i| (m.log_radial_density(v, i as f64 * h) - shift).exp() / h)
        .collect();
    let angular = (degree * (degree + m.dimension - 2)) as f64;
    let mut diag = Vec::with_capacity(n);
    for i in 0..n {
        let mut a = 0.0;
        if i > 0 {
            a += flux[i - 1];
        }
        if i + 1 < n {
            a += flux[i];
        }
        if angular > 0.0 {
            let lw = m.warp.log_value(centre(i));
            a += angular * (-2.0 * lw).exp() * mass[i];
        }
        diag.push(a / mass[i]);
    }
    let off = (0..n - 1).map(|i| -flux[i] / (mass[i] * mass[i + 1]).sqrt()).collect();
    Tridiagonal { diag, off }
}

fn sector_eigen(m: &ModelManifold, v: &RadialPotential, cutoff: f64, n: usize, degree: usize) -> f64 {
    let k = if degree == 0 { 1 } else { 0 };
    sector_matrix(m, v, cutoff, n, degree).eigenvalue(k)
}

pub fn spectral_gap(m: &ModelManifold, v: &RadialPotential, opts: GapOptions) -> Result<GapReport> {
    let cutoff = match opts.cutoff {
        Some(c) => c,
        None => crate::measure::RadialMeasure::new(m, v)
            .cutoff(60.0)
            .ok_or(Error::Divergent { radius: f64::INFINITY })?,
    };
    if !(cutoff > 0.0) || opts.cells < 4 {
        return Err(Error::Degenerate(
            "spectral grid needs a positive cutoff and at least 4 cells",
        ));
    }
    let extrapolate = |degree: usize| -> Result<(f64, f64, f64)> {
        let coarse = sector_eigen(m, v, cutoff, opts.cells, degree);
        let fine = sector_eigen(m, v, cutoff, 2 * opts.cells, degree);
        if (coarse - fine).abs() > 0.1 * fine.abs() {
            return Err(Error::Resolution {
                what: "spectral gap",
                coarse,
                fine,
            });
        }
        Ok(((4.0 * fine - coarse) / 3.0, coarse, fine))
    };
    let (radial, rc, rf) = extrapolate(0)?;
    let (angular, ac, af) = extrapolate(1)?;
    let (coarse, fine) = if radial <= angular { (rc, rf) } else { (ac, af) };
    Ok(GapReport {
        gap: radial.min(angular),
        radial,
        angular,
        cutoff,
        coarse,
        fine,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sturm_count_on_diagonal() {
        let t = Tridiagonal {
            diag: alloc::vec![3.0, 1.0, 2.0],
            off: alloc::vec![0.0, 0.0],
        };
        assert_eq!(t.count_below(2.5), 2);
        assert!((t.eigenvalue(0) - 1.0).abs() < 1e-12);
        assert!((t.eigenvalue(2) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn path_laplacian_spectrum() {
        // Eigenvalues of tridiag(-1, 2, -1) are 2 - 2cos(kπ/(n+1)).
        let n = 50;
        let t = Tridiagonal {
            diag: alloc::vec![2.0; n],
            off: alloc::vec![-1.0; n - 1],
        };
        let exact = 2.0 - 2.0 * (core::f64::consts::PI / (n as f64 + 1.0)).cos();
        assert!((t.eigenvalue(0) - exact).abs() < 1e-12);
    }

    #[test]
    fn ornstein_uhlenbeck_gap() {
        let m = ModelManifold::flat(2).unwrap();
        for delta in [2.0, 5.0] {
            let rep = spectral_gap(&m, &RadialPotential::Gaussian { delta }, GapOptions::default()).unwrap();
            assert!((rep.gap - delta).abs() < 0.02 * delta, "{rep:?}");
            assert!((rep.radial - 2.0 * delta).abs() < 0.02 * delta, "{rep:?}");
        }
    }
}
