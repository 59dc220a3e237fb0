//! Disk-model hyperbolic geometry, Fuchsian groups and orbital sums.

pub mod geometry;
pub mod group;
pub mod orbital;

pub use geometry::{
    angle_windows, ball_area, ball_euclid, chi, geodesic_flow, hyp_dist, j_len, lambda_len, mobius_act, DiskPoint,
    LineElement, MobiusMap,
};
pub use group::{enumerate_group, Enumeration, FuchsianGroup, GroupElement};
pub use orbital::{
    annulus_sandwich, correlation_integral, cover_counting, multi_correlation_geodesic, orbital_sum,
    word_metric_band, CoverCount, Orbit, QuadratureSpec, ThetaZero,
};
