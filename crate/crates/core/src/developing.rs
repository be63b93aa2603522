//! Developing triangle strips into a common chart; holonomy and index of loops.

use crate::geometry::{wrap_pi, TOL};
use crate::surface::{HalfEdge, Surface, VertexId};
use crate::transition::Transition;
use num_complex::Complex64;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DevelopError {
    #[error("crossing {index} ({half_edge}) does not belong to the current triangle")]
    DisconnectedPath { index: usize, half_edge: HalfEdge },
    #[error("crossing {0} is a boundary half-edge")]
    BoundaryCrossing(HalfEdge),
    #[error("triangle {0} does not exist")]
    UnknownTriangle(usize),
    #[error("loop does not close")]
    NotClosed,
    #[error("segment {0} has zero length")]
    ZeroLengthSegment(usize),
    #[error("exterior angle at point {0} is ±π")]
    Cusp(usize),
}

/// Triangles of a dual path placed in the chart of the first one.
#[derive(Clone, Debug, PartialEq)]
pub struct DevelopedChain {
    /// `(triangle, placement)`, where the placement maps the triangle's chart into the base chart.
    pub placements: Vec<(usize, Transition)>,
    pub crossings: Vec<HalfEdge>,
    /// Placement of the last triangle.
    pub cumulative: Transition,
}

impl DevelopedChain {
    pub fn start(&self) -> usize {
        self.placements[0].0
    }

    pub fn end(&self) -> usize {
        self.placements.last().expect("nonempty").0
    }

    /// Developed corners of placement `i`.
    pub fn points(&self, s: &Surface, i: usize) -> [Complex64; 3] {
        let (t, p) = self.placements[i];
        s.triangle(t).points.map(|z| p.apply(z))
    }

    /// If placement coefficients exceed `1e12`, rescales the whole picture into a bounded frame.
    /// Returns the frame map (base chart → frame) and the rescaled placements.
    pub fn normalized(&self) -> (Transition, Vec<Transition>) {
        let m = self
            .placements
            .iter()
            .map(|(_, p)| p.a.norm().max(p.b.norm()))
            .fold(0.0, f64::max);
        let frame = if m > 1e12 {
            Transition::new(Complex64::new(1.0 / m, 0.0), Complex64::new(0.0, 0.0))
        } else {
            Transition::IDENTITY
        };
        let placed = self.placements.iter().map(|(_, p)| frame.compose(p)).collect();
        (frame, placed)
    }
}

/// Places `start` by the identity and each subsequent triangle by `previous ∘ g⁻¹`, where `g` is
/// the transition of the crossed half-edge.
pub fn develop_strip(
    s: &Surface,
    start: usize,
    crossings: &[HalfEdge],
) -> Result<DevelopedChain, DevelopError> {
    if start >= s.num_triangles() {
        return Err(DevelopError::UnknownTriangle(start));
    }
    let mut placements = Vec::with_capacity(crossings.len() + 1);
    placements.push((start, Transition::IDENTITY));
    let mut current = start;
    let mut placement = Transition::IDENTITY;
    for (index, &h) in crossings.iter().enumerate() {
        if h.tri != current || h.edge >= 3 {
            return Err(DevelopError::DisconnectedPath { index, half_edge: h });
        }
        let g = s
            .transition_of(h)
            .map_err(|_| DevelopError::BoundaryCrossing(h))?;
        placement = placement.compose(&g.inverse());
        current = s.partner(h).expect("glued").tri;
        placements.push((current, placement));
    }
    Ok(DevelopedChain {
        placements,
        crossings: crossings.to_vec(),
        cumulative: placement,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HolonomyKind {
    Translation,
    Dilation,
    General,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LoopHolonomy {
    /// Derivative of the cumulative placement.
    pub a: Complex64,
    pub kind: HolonomyKind,
    pub cumulative: Transition,
}

pub fn classify_derivative(a: Complex64) -> HolonomyKind {
    if (a - 1.0).norm() < TOL {
        HolonomyKind::Translation
    } else if a.im.abs() < TOL * a.norm().max(1.0) {
        HolonomyKind::Dilation
    } else {
        HolonomyKind::General
    }
}

/// Linear holonomy of a dual loop starting and ending in triangle `start`.
pub fn loop_holonomy(
    s: &Surface,
    start: usize,
    crossings: &[HalfEdge],
) -> Result<LoopHolonomy, DevelopError> {
    let chain = develop_strip(s, start, crossings)?;
    if chain.end() != start {
        return Err(DevelopError::NotClosed);
    }
    let a = chain.cumulative.a;
    Ok(LoopHolonomy {
        a,
        kind: classify_derivative(a),
        cumulative: chain.cumulative,
    })
}

/// Total turning (in turns) of a closed polyline and the holonomy closing it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LoopIndex {
    pub theta: f64,
    pub holonomy: Complex64,
}

/// Index of a piecewise-geodesic loop given as developed points `z₀ … z_m` with
/// `z_m = H(z₀)`. The closing exterior angle is measured between the last segment and the
/// image of the first under `H`.
pub fn loop_index(points: &[Complex64], holonomy: &Transition) -> Result<LoopIndex, DevelopError> {
    if points.len() < 2 {
        return Err(DevelopError::NotClosed);
    }
    let scale = points
        .iter()
        .map(|z| z.norm())
        .fold(1.0f64, f64::max);
    let m = points.len() - 1;
    if (points[m] - holonomy.apply(points[0])).norm() > TOL * scale {
        return Err(DevelopError::NotClosed);
    }
    let mut dirs = Vec::with_capacity(m + 1);
    for i in 0..m {
        let d = points[i + 1] - points[i];
        if d.norm() <= 1e-14 * scale {
            return Err(DevelopError::ZeroLengthSegment(i));
        }
        dirs.push(d);
    }
    dirs.push(holonomy.apply_vector(dirs[0]));
    let mut total = 0.0;
    for i in 1..dirs.len() {
        let turn = wrap_pi((dirs[i] / dirs[i - 1]).arg());
        if PI - turn.abs() < 1e-12 {
            return Err(DevelopError::Cusp(i));
        }
        total += turn;
    }
    Ok(LoopIndex {
        theta: total / (2.0 * PI),
        holonomy: holonomy.a,
    })
}

/// Polyline through the developed midpoints of the crossed edges of a dual loop, closing with
/// the cumulative placement. Suitable input for [`loop_index`].
pub fn dual_loop_polyline(
    s: &Surface,
    start: usize,
    crossings: &[HalfEdge],
) -> Result<(Vec<Complex64>, Transition), DevelopError> {
    let chain = develop_strip(s, start, crossings)?;
    if crossings.is_empty() || chain.end() != start {
        return Err(DevelopError::NotClosed);
    }
    let mut points = Vec::with_capacity(crossings.len() + 1);
    for (i, h) in crossings.iter().enumerate() {
        let (p, q) = s.triangle(h.tri).edge_points(h.edge);
        points.push(chain.placements[i].1.apply((p + q) / 2.0));
    }
    points.push(chain.cumulative.apply(points[0]));
    Ok((points, chain.cumulative))
}

/// The dual loop turning once counter-clockwise around an interior vertex: start triangle and
/// crossings.
pub fn vertex_link_loop(s: &Surface, v: VertexId) -> Option<(usize, Vec<HalfEdge>)> {
    let corners = s.corners_of(v);
    if s.cones()[v].is_boundary {
        return None;
    }
    Some((corners[0].tri, corners.iter().map(|c| c.incoming()).collect()))
}

/// Holonomy derivatives of a generating set of dual loops: one loop per gluing not used by a
/// breadth-first spanning tree of the dual graph.
pub fn fundamental_holonomies(s: &Surface) -> Vec<Complex64> {
    let nt = s.num_triangles();
    let mut placed: Vec<Option<Transition>> = vec![None; nt];
    let mut tree = vec![false; 3 * nt];
    placed[0] = Some(Transition::IDENTITY);
    let mut queue = std::collections::VecDeque::from([0]);
    while let Some(t) = queue.pop_front() {
        for e in 0..3 {
            let h = HalfEdge::new(t, e);
            let Some(k) = s.partner(h) else { continue };
            if placed[k.tri].is_none() {
                let g = s.transition_of(h).expect("glued");
                placed[k.tri] = Some(placed[t].unwrap().compose(&g.inverse()));
                tree[h.index()] = true;
                tree[k.index()] = true;
                queue.push_back(k.tri);
            }
        }
    }
    let mut out = Vec::new();
    for (h, k) in s.gluings() {
        if tree[h.index()] {
            continue;
        }
        let (Some(p), Some(q)) = (placed[h.tri], placed[k.tri]) else { continue };
        let g = s.transition_of(h).expect("glued");
        out.push(p.a / g.a / q.a);
    }
    out
}

/// Coarsest holonomy type over all loops: translation if every generator is trivial, dilation
/// if every generator is real and positive.
pub fn holonomy_type(s: &Surface) -> HolonomyKind {
    let gens = fundamental_holonomies(s);
    if gens.iter().all(|&a| classify_derivative(a) == HolonomyKind::Translation) {
        HolonomyKind::Translation
    } else if gens.iter().all(|&a| classify_derivative(a) != HolonomyKind::General && a.re > 0.0) {
        HolonomyKind::Dilation
    } else {
        HolonomyKind::General
    }
}
