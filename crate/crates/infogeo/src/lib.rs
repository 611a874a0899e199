//! Riemannian geometry of generalized Gaussian (p-Gaussian) distribution
//! manifolds.
//!
//! The parameter space is `Ξₙ = 𝓜ₙ × ℝⁿ`, where `𝓜ₙ` is the cone of real
//! symmetric positive definite `n×n` matrices. A point `(D, u)` labels the
//! density with inverse covariance `D` and mean `u`; `p` selects the family
//! member (power-law tails for `p < 1`, compact support for `p > 1`, the
//! classical Gaussian at `p = 1`).
//!
//! The crate provides:
//!
//! * [`family`] — densities, normalization, sampling, and closed-form
//!   Rényi / Tsallis / Shannon entropies;
//! * [`metric`] — the two-parameter unified metric
//!   `½Tr(D⁻¹XD⁻¹Y) + α Tr(D⁻¹X)Tr(D⁻¹Y) + β⟨x,Dy⟩` together with every
//!   named metric it subsumes (entropy-induced, Fisher, Calvo–Oller, LMR)
//!   plus Csiszár divergences and the Kubo–Mori / largest metrics;
//! * [`geometry`] — covariant derivative, geodesic ODE and integrator,
//!   closed-form geodesic families and Rao distances;
//! * [`curvature`] — Riemann and Ricci tensors, scalar curvatures, and the
//!   geodesic-ball volume expansion;
//! * [`oracle`] — independent numerical ground truth (quadrature,
//!   Monte-Carlo, finite differences) used to cross-validate every closed
//!   form above.
//!
//! All values are immutable after construction and all operations are pure;
//! everything is safe to use from multiple threads. Internal parallel loops
//! use fixed partitioning, so results do not depend on the worker count
//! (see [`oracle::exec`]).

pub mod curvature;
pub mod family;
pub mod geometry;
pub mod linalg;
pub mod metric;
pub mod oracle;
pub mod special;

mod error;

pub use error::{Error, Result};
