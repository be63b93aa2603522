//! Branched affine surfaces represented as glued affine triangles.

pub mod builders;
pub mod developing;
pub mod flip_graph;
pub mod flips;
pub mod geodesics;
pub mod geometry;
pub mod shell;
pub mod surface;
pub mod transition;

pub use num_complex::Complex64;
pub use surface::{ConeSummary, Corner, EdgeId, HalfEdge, Surface, SurfaceError, SurfaceInfo, Triangle, VertexId};
pub use transition::Transition;
