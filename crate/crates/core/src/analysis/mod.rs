//! Structural analyzers: shape, compound-Poisson parametrization,
//! dispersion, entropies, likelihood-ratio ordering, the Stein operator and
//! limit distances.

mod dispersion;
mod limits;
mod ordering;
mod shape;

pub use dispersion::{
    classify_dispersion, classify_dispersion_scan, dispersion_delta, log_power_sum, moments,
    renyi_entropy, tsallis_entropy, Dispersion, DispersionReport, Moments,
};
pub use limits::{
    limit_cmb_to_cmp, limit_cmnb_to_cmp, limit_cmnhg_to_cmnb, limit_grid, strictly_decreasing,
    tv_distance, tv_distance_to, LimitPoint,
};
pub use ordering::{
    lr_hypothesis, lr_order_check, stein_operator_residual, stein_residual, LrHypothesis,
};
pub use shape::{
    classify_shape, classify_shape_scan, dpcp_parametrization, is_dpcp, log_second_ratios,
    DpcpMembership, DpcpParams, DpcpReason, ShapeClass, ShapeReport,
};
