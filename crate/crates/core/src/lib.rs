//! Numerical kernels for adapted complex structures on tangent bundles of
//! Riemannian manifolds, with Lie-group and Nahm-equation laboratories.
//!
//! - [`lie`], [`algebras`]: matrix Lie algebras, groups and their complexifications.
//! - [`curvature`]: curvature tensors, normal-coordinate metric jets, finite-difference curvature.
//! - [`jet`], [`ma`]: truncated polynomials and the quartic expansion of the Monge–Ampère potential.
//! - [`kahler`]: Kähler curvature of the adapted structure along the zero section.
//! - [`complexify`]: the maps `TG → G^C` and `T(G/H) → G^C/H^C` and holomorphy checks.
//! - [`nahm`]: discretized paths, gauge actions, Nahm residuals and hyperkähler data.

pub mod algebras;
pub mod complexify;
pub mod curvature;
pub mod error;
pub mod jet;
pub mod kahler;
pub mod lie;
pub mod linalg;
pub mod ma;
pub mod nahm;

pub use error::{Error, Result};
