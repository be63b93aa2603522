//! Text format, renderers and parameter sweeps.

mod format;
mod render;
mod sweep;

pub use format::{parse_surface, parse_surface_file, serialize_surface, FormatError, SurfaceFile};
pub use render::{flip_graph_dot, render_development_svg, Layout};
pub use sweep::{
    family_from_params, family_parameters, parse_angle, parse_grid, sweep_family, SweepError, SweepOptions, FAMILIES,
};
