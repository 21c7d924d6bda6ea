//! Numerical laboratory for diffusions on rotationally symmetric model
//! manifolds.
//!
//! A model manifold is `[0, ∞) × S^{d-1}` with metric `dr² + w(r)² dΘ²`.
//! Together with a radial potential `V` it defines the operator
//! `L = Δ + ∇V`, its invariant measure `μ ∝ e^V dvol`, and the radial
//! diffusion `dr = √2 dB + ((d-1) w'/w + V')(r) dt`. The modules here
//! compute curvature conditions, measure concentration, drift
//! inequalities, the distance-comparison coupling with its Girsanov
//! weight, and the growth-function calculus behind super- and
//! ultracontractivity bounds.
//!
//! The crate is `no_std` and needs only `alloc`. Parallelism is injected
//! through [`exec::Executor`]; the sequential executor lives here and a
//! threaded one lives in the `warplab` companion crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod contractivity;
pub mod coupling;
pub mod diffusion;
mod error;
pub mod exec;
pub mod geometry;
pub mod measure;
pub mod quad;
pub mod report;
pub mod rng;
pub mod spectral;
pub mod stats;

pub use error::{Error, Result};
