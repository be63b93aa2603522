//! Straight-line flow: trajectories, saddle connections, straightening and cylinders.

mod cylinders;
mod saddles;
mod straighten;
mod trace;

pub use cylinders::{
    cylinder_disjointness_check, detect_cylinders, triangulability_verdict, CylinderKind, CylinderRecord,
    DisjointnessReport, Verdict,
};
pub use saddles::{enumerate_saddle_connections, SaddleConnection};
pub use straighten::{free_reduce, straighten, StraightenError, Straightened};
pub use trace::{trace, TraceError, TrajectoryEvent, DELTA_V};

use crate::geometry::cross;
use num_complex::Complex64;

/// Sine of the angle from `u` to `v`.
fn turn_sign(u: Complex64, v: Complex64) -> f64 {
    let n = u.norm() * v.norm();
    if n == 0.0 {
        0.0
    } else {
        cross(u, v) / n
    }
}
