//! Geodesic geometry on the plane, the sphere and a flat two-triangle
//! complex, with the two-step viscosity iteration for nonexpansive maps and
//! randomized checks of the supporting inequalities.

// Negated comparisons such as `!(x > 0.0)` are how NaN inputs get rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod exec;
pub mod glued;
pub mod lemma_suite;
pub mod maps;
pub mod minimize;
pub mod model_spaces;
pub mod projections;
pub mod quadrilateral;
pub mod sampling;
pub mod sequences;
pub mod vec3;
pub mod viscosity;

pub use error::{Error, Result};
pub use exec::Execution;
pub use maps::{theorem_k_bound, MapKind, MapSpec};
pub use model_spaces::{GeodesicSegment, Point, Space, SpaceKind};
pub use projections::{FixSet, ProjectionResult};
