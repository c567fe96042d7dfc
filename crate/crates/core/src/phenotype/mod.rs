//! Extreme pathways, phenotype coordinates and field analysis.

mod fields;
mod pathways;
mod projection;

pub use fields::{
    field_gradient, field_gradient_at, field_time_derivatives, interp_field, locate, surface_stats, SurfaceStats,
    TimeDerivatives,
};
pub use pathways::{extreme_pathways, Coordinate, PathwayBasis, PathwayClass, MAX_COORDINATES};
pub use projection::{project_onto, project_to_pathway_coords, PathwayProjection};
