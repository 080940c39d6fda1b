//! Path-space laboratory for Nahm's equations on `[0, 1]`.
//!
//! Configurations are quadruples of algebra-valued paths sampled on a
//! uniform grid. The module provides the Nahm residuals, the gauge action
//! and the gauge-fixing ODE, the flat hyperkähler data (`L²` metric, `ω_I`,
//! the potential `f`), the circle action on `(T2, T3)`, the moment map for
//! an isotropy subgroup, and the roundtrip `(a, v) ↦ a·exp(iv)` through
//! baby-Nahm data.

mod adapted;
mod equations;
mod hyperkahler;
mod io;
mod path;

pub use adapted::{
    embed_tangent, roundtrip_adapted, roundtrip_adapted_with_path, EmbeddedTangent, GeodesicHPath,
    HPath, TwistedHPath,
};
pub use equations::{
    baby_nahm_residual, gauge_act, nahm_integrate, nahm_integrate_curve, nahm_residual,
    random_smooth_gauge, residual_sup, solve_gauge_ode, solve_gauge_ode_curve, NahmConfiguration,
    PathTangent,
};
pub use hyperkahler::{
    apply_i, constant_direction, d_i_df, kahler_potential_f, l2_metric, moment_map_h, omega_i,
    omega_j, omega_k, s1_action,
};
pub use io::{load_bundle, path_from_csv, path_to_csv, save_bundle};
pub use path::{grid, trapezoid, GaugePath, MatrixCurve, PathKind};
