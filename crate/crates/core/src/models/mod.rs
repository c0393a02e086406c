//! Statistical models and their geometry.

pub mod elliptic;
pub mod monotone;
pub mod quadrature;
pub mod simplex;
pub mod takano;

pub use elliptic::{
    elliptic_constants, elliptic_fisher_sigma, elliptic_metric, elliptic_warped_spec,
    upper_half_plane_family, upper_half_plane_metric, EllipticConstants, EllipticFamily, Generator,
};
pub use monotone::{
    bkm_cone_geometry, cone_fiber_metric, entry_difference_in_cone, mixture_connection,
    mixture_connection_action, monotone_metric_2x2, monotone_metric_field, BkmCone, FieldJet,
    Herm2, MatrixChart, MonotoneSymbol,
};
pub use quadrature::QuadratureConfig;
pub use simplex::{
    denormalization_geometry, simplex_alpha_connection, simplex_fisher, DenormalizedFamily,
    SimplexFamily,
};
pub use takano::{takano_geometry, takano_warped_spec, TakanoSpace};
