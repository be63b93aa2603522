//! Geometric edge flips and self-folded triangles.

use crate::geometry::{diameter, orient};
use crate::surface::{Corner, EdgeId, HalfEdge, Surface, SurfaceError, Triangle, VertexId};
use crate::transition::Transition;
use num_complex::Complex64;
use std::fmt;
use thiserror::Error;

/// Convexity margin relative to the squared quad diameter.
pub const EPS_CONV: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Predicate {
    DistinctTriangles,
    StrictlyConvex,
    Embedded,
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Predicate::DistinctTriangles => "distinct_triangles",
            Predicate::StrictlyConvex => "strictly_convex",
            Predicate::Embedded => "embedded",
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FlipError {
    #[error("edge {0} does not exist")]
    UnknownEdge(EdgeId),
    #[error("edge {0} is a boundary edge")]
    BoundaryEdge(EdgeId),
    #[error("edge {edge} is not flippable: {predicate} fails")]
    NotFlippable { edge: EdgeId, predicate: Predicate },
    #[error(transparent)]
    Surface(#[from] SurfaceError),
}

/// The two triangles adjacent to an interior edge, developed into the chart of the first.
///
/// Corners run counter-clockwise `A, B, C, D` with the edge as diagonal `A–C`; `A, C, D` is the
/// triangle of `half_edge` and `A, B, C` the developed image of its partner.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadView {
    pub edge: EdgeId,
    pub half_edge: HalfEdge,
    pub partner: HalfEdge,
    pub corners: [Complex64; 4],
    /// Places the partner triangle's chart into the chart of `half_edge.tri`.
    pub placement: Transition,
    pub distinct_triangles: bool,
    pub strictly_convex: bool,
    pub embedded: bool,
}

impl QuadView {
    pub fn is_flippable(&self) -> bool {
        self.distinct_triangles && self.strictly_convex && self.embedded
    }

    pub fn failing_predicate(&self) -> Option<Predicate> {
        if !self.distinct_triangles {
            Some(Predicate::DistinctTriangles)
        } else if !self.strictly_convex {
            Some(Predicate::StrictlyConvex)
        } else if !self.embedded {
            Some(Predicate::Embedded)
        } else {
            None
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FlipMove {
    pub removed: EdgeId,
    pub inserted: EdgeId,
    /// The new diagonal `B–D` as its two half-edges in the flipped surface.
    pub diagonal: (HalfEdge, HalfEdge),
}

pub fn quad_of_edge(s: &Surface, e: EdgeId) -> Result<QuadView, FlipError> {
    let h = *s.edges().get(e).ok_or(FlipError::UnknownEdge(e))?;
    let k = s.partner(h).ok_or(FlipError::BoundaryEdge(e))?;
    let g = s.transition_of(h)?;
    let placement = g.inverse();
    let p = &s.triangle(h.tri).points;
    let q = &s.triangle(k.tri).points;
    let a = p[h.edge];
    let c = p[(h.edge + 1) % 3];
    let d = p[(h.edge + 2) % 3];
    let b = placement.apply(q[(k.edge + 2) % 3]);
    let corners = [a, b, c, d];
    let eps = EPS_CONV * diameter(&corners).powi(2);
    let strictly_convex = (0..4).all(|i| orient(corners[i], corners[(i + 1) % 4], corners[(i + 2) % 4]) > eps);
    let distinct_triangles = h.tri != k.tri;
    let embedded = distinct_triangles && orient(a, b, c) > 0.0 && orient(a, c, d) > 0.0;
    Ok(QuadView {
        edge: e,
        half_edge: h,
        partner: k,
        corners,
        placement,
        distinct_triangles,
        strictly_convex,
        embedded,
    })
}

/// Replaces the diagonal `A–C` of the quad around `e` by `B–D`.
///
/// The new triangles are `D, A, B` (in the chart of the first old triangle) and `B, C, D` (in
/// the chart of the second); the new diagonal is half-edge 2 of both.
pub fn flip(s: &Surface, e: EdgeId) -> Result<(Surface, FlipMove), FlipError> {
    let quad = quad_of_edge(s, e)?;
    if let Some(predicate) = quad.failing_predicate() {
        return Err(FlipError::NotFlippable { edge: e, predicate });
    }
    let (h, k) = (quad.half_edge, quad.partner);
    let (t, u) = (h.tri, k.tri);
    let [a, b, c, d] = quad.corners;
    let g = quad.placement.inverse();

    let mut triangles = s.triangles().to_vec();
    triangles[t] = Triangle::new(d, a, b);
    triangles[u] = Triangle::new(g.apply(b), g.apply(c), g.apply(d));

    let (e0, e1, e2) = (h.edge, (h.edge + 1) % 3, (h.edge + 2) % 3);
    let (f1, f2) = ((k.edge + 1) % 3, (k.edge + 2) % 3);
    let remap = |x: HalfEdge| -> HalfEdge {
        if x == HalfEdge::new(t, e2) {
            HalfEdge::new(t, 0)
        } else if x == HalfEdge::new(u, f1) {
            HalfEdge::new(t, 1)
        } else if x == HalfEdge::new(u, f2) {
            HalfEdge::new(u, 0)
        } else if x == HalfEdge::new(t, e1) {
            HalfEdge::new(u, 1)
        } else {
            x
        }
    };
    let mut gluings: Vec<(HalfEdge, HalfEdge)> = s
        .gluings()
        .into_iter()
        .filter(|&(x, y)| !(x == h || y == h))
        .map(|(x, y)| (remap(x), remap(y)))
        .collect();
    gluings.push((HalfEdge::new(t, 2), HalfEdge::new(u, 2)));

    let remap_corner = |c: Corner| -> Corner {
        if c.tri == t {
            match c.corner {
                x if x == e0 => Corner::new(t, 1),
                x if x == e1 => Corner::new(u, 1),
                _ => Corner::new(t, 0),
            }
        } else if c.tri == u {
            match c.corner {
                x if x == k.edge => Corner::new(u, 1),
                x if x == f1 => Corner::new(t, 1),
                _ => Corner::new(t, 2),
            }
        } else {
            c
        }
    };
    let aux: Vec<Corner> = s.auxiliary_corners().into_iter().map(remap_corner).collect();
    let flipped = Surface::build(triangles, &gluings, &aux)?;
    let inserted = flipped.edge_of(HalfEdge::new(t, 2));
    Ok((
        flipped,
        FlipMove {
            removed: e,
            inserted,
            diagonal: (HalfEdge::new(t, 2), HalfEdge::new(u, 2)),
        },
    ))
}

/// Interior edges that pass all flip predicates, in edge order.
pub fn flippable_edges(s: &Surface) -> Vec<EdgeId> {
    s.interior_edges()
        .filter(|&e| quad_of_edge(s, e).map(|q| q.is_flippable()).unwrap_or(false))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SelfFolded {
    pub tri: usize,
    pub apex: VertexId,
    pub apex_angle: f64,
}

/// Triangles two of whose sides are glued to each other, with the vertex between those sides.
pub fn self_folded_scan(s: &Surface) -> Vec<SelfFolded> {
    let mut out = Vec::new();
    for t in 0..s.num_triangles() {
        for i in 0..3 {
            let h = HalfEdge::new(t, i);
            let Some(k) = s.partner(h) else { continue };
            if k.tri != t || k.edge < i {
                continue;
            }
            let common = if k.edge == (i + 1) % 3 { k.edge } else { i };
            let apex = s.vertex_of(Corner::new(t, common));
            out.push(SelfFolded {
                tri: t,
                apex,
                apex_angle: s.cones()[apex].angle,
            });
        }
    }
    out
}
