//! Surfaces as complexes of planar triangles glued along edges by complex-affine maps.
//!
//! Every triangle carries its own chart coordinates. A gluing between half-edge `(t, e)` and
//! `(t', e')` induces the transition sending the chart of `t` to the chart of `t'` with
//! `P_e ↦ Q_{e'+1}` and `P_{e+1} ↦ Q_{e'}`. Vertices, cone angles and dilation ratios are
//! derived from the corner orbits of the gluing.

use crate::geometry::{corner_angle, diameter, orient, EPS_AREA, TOL};
use crate::transition::Transition;
use num_complex::Complex64;
use std::f64::consts::PI;
use std::fmt;
use thiserror::Error;

/// Half-edge `edge` of triangle `tri`; it runs from vertex `edge` to vertex `edge + 1 mod 3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfEdge {
    pub tri: usize,
    pub edge: usize,
}

impl HalfEdge {
    pub const fn new(tri: usize, edge: usize) -> Self {
        HalfEdge { tri, edge }
    }

    #[inline]
    pub fn index(self) -> usize {
        3 * self.tri + self.edge
    }

    /// Corner at the start of this half-edge.
    pub fn tail(self) -> Corner {
        Corner::new(self.tri, self.edge)
    }

    /// Corner at the end of this half-edge.
    pub fn head(self) -> Corner {
        Corner::new(self.tri, (self.edge + 1) % 3)
    }

    /// Corner opposite this half-edge in its triangle.
    pub fn opposite_corner(self) -> Corner {
        Corner::new(self.tri, (self.edge + 2) % 3)
    }
}

impl fmt::Display for HalfEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.tri, self.edge)
    }
}

/// Corner `corner` (vertex index 0..3) of triangle `tri`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Corner {
    pub tri: usize,
    pub corner: usize,
}

impl Corner {
    pub const fn new(tri: usize, corner: usize) -> Self {
        Corner { tri, corner }
    }

    #[inline]
    pub fn index(self) -> usize {
        3 * self.tri + self.corner
    }

    /// Half-edge leaving this corner.
    pub fn outgoing(self) -> HalfEdge {
        HalfEdge::new(self.tri, self.corner)
    }

    /// Half-edge arriving at this corner.
    pub fn incoming(self) -> HalfEdge {
        HalfEdge::new(self.tri, (self.corner + 2) % 3)
    }
}

impl fmt::Display for Corner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.tri, self.corner)
    }
}

pub type VertexId = usize;

/// Index into [`Surface::edges`].
pub type EdgeId = usize;

#[derive(Clone, Debug, PartialEq)]
pub struct Triangle {
    pub points: [Complex64; 3],
}

impl Triangle {
    pub fn new(p0: Complex64, p1: Complex64, p2: Complex64) -> Self {
        Triangle {
            points: [p0, p1, p2],
        }
    }

    /// Twice the signed area.
    pub fn orientation(&self) -> f64 {
        orient(self.points[0], self.points[1], self.points[2])
    }

    pub fn diameter(&self) -> f64 {
        diameter(&self.points)
    }

    pub fn angle(&self, k: usize) -> f64 {
        corner_angle(
            self.points[k],
            self.points[(k + 1) % 3],
            self.points[(k + 2) % 3],
        )
    }

    pub fn angles(&self) -> [f64; 3] {
        [self.angle(0), self.angle(1), self.angle(2)]
    }

    pub fn min_angle(&self) -> f64 {
        let [a, b, c] = self.angles();
        a.min(b).min(c)
    }

    pub fn centroid(&self) -> Complex64 {
        (self.points[0] + self.points[1] + self.points[2]) / 3.0
    }

    pub fn edge_points(&self, e: usize) -> (Complex64, Complex64) {
        (self.points[e], self.points[(e + 1) % 3])
    }

    fn is_nondegenerate(&self) -> bool {
        let d = self.diameter();
        d > 0.0 && 0.5 * self.orientation() > EPS_AREA * d * d
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SurfaceError {
    #[error("surface has no triangles")]
    Empty,
    #[error("triangle {0} is degenerate or negatively oriented")]
    DegenerateTriangle(usize),
    #[error("reference to missing triangle {0}")]
    UnknownTriangle(usize),
    #[error("index {0} out of range 0..3")]
    BadIndex(usize),
    #[error("half-edge {0} glued more than once")]
    DoubleGluing(HalfEdge),
    #[error("auxiliary vertex {vertex} is not a regular point (angle {angle}, dilation {dilation})")]
    BadAuxiliary {
        vertex: VertexId,
        angle: f64,
        dilation: f64,
    },
    #[error("closed genus-zero surface needs at least three singularities, found {0}")]
    TooFewSingularities(usize),
    #[error("half-edge {0} lies on the boundary")]
    BoundaryEdge(HalfEdge),
    #[error("operation requires a closed surface")]
    HasBoundary,
    #[error("odd Euler characteristic on a closed surface")]
    NonOrientable,
}

/// Angle and dilation data of one vertex.
#[derive(Clone, Debug, PartialEq)]
pub struct ConeSummary {
    pub vertex: VertexId,
    /// Cone angle for interior vertices, interior angle sum for boundary vertices.
    pub angle: f64,
    /// Modulus of the link holonomy (1 for boundary vertices).
    pub dilation: f64,
    /// Principal argument of the link holonomy, in `(-π, π]` (0 for boundary vertices).
    pub holonomy_arg: f64,
    pub is_boundary: bool,
    pub is_auxiliary: bool,
}

impl ConeSummary {
    pub fn is_regular(&self) -> bool {
        !self.is_boundary && (self.angle - 2.0 * PI).abs() < TOL && (self.dilation - 1.0).abs() < TOL
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurfaceInfo {
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
    pub euler_characteristic: i64,
    /// Defined for closed surfaces only.
    pub genus: Option<i64>,
    /// Non-auxiliary vertices.
    pub marked_points: usize,
    pub auxiliary_points: usize,
    pub boundary_components: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussBonnet {
    pub r_angle: f64,
    pub r_log: f64,
}

impl GaussBonnet {
    pub fn passes(&self, tol: f64) -> bool {
        self.r_angle < tol && self.r_log < tol
    }
}

#[derive(Clone, Debug)]
struct VertexData {
    /// Corners in counter-clockwise order around the vertex. For boundary vertices the first
    /// corner has a boundary outgoing edge and the last a boundary incoming edge.
    corners: Vec<Corner>,
}

/// An immutable, validated surface.
#[derive(Clone, Debug)]
pub struct Surface {
    triangles: Vec<Triangle>,
    partner: Vec<Option<HalfEdge>>,
    transitions: Vec<Option<Transition>>,
    corner_vertex: Vec<VertexId>,
    vertices: Vec<VertexData>,
    cones: Vec<ConeSummary>,
    edges: Vec<HalfEdge>,
    edge_of_half: Vec<EdgeId>,
    boundary_components: usize,
}

impl Surface {
    /// Builds and validates a surface. `auxiliary` lists one corner of every vertex that is a
    /// removable marked point.
    pub fn build(
        triangles: Vec<Triangle>,
        gluings: &[(HalfEdge, HalfEdge)],
        auxiliary: &[Corner],
    ) -> Result<Surface, SurfaceError> {
        if triangles.is_empty() {
            return Err(SurfaceError::Empty);
        }
        let nt = triangles.len();
        for (i, t) in triangles.iter().enumerate() {
            if !t.points.iter().all(|p| p.re.is_finite() && p.im.is_finite()) || !t.is_nondegenerate() {
                return Err(SurfaceError::DegenerateTriangle(i));
            }
        }
        let check_half = |h: HalfEdge| -> Result<(), SurfaceError> {
            if h.tri >= nt {
                return Err(SurfaceError::UnknownTriangle(h.tri));
            }
            if h.edge >= 3 {
                return Err(SurfaceError::BadIndex(h.edge));
            }
            Ok(())
        };
        let mut partner: Vec<Option<HalfEdge>> = vec![None; 3 * nt];
        for &(h, k) in gluings {
            check_half(h)?;
            check_half(k)?;
            if h == k {
                return Err(SurfaceError::DoubleGluing(h));
            }
            if partner[h.index()].is_some() {
                return Err(SurfaceError::DoubleGluing(h));
            }
            if partner[k.index()].is_some() {
                return Err(SurfaceError::DoubleGluing(k));
            }
            partner[h.index()] = Some(k);
            partner[k.index()] = Some(h);
        }

        let mut transitions = vec![None; 3 * nt];
        for t in 0..nt {
            for e in 0..3 {
                let h = HalfEdge::new(t, e);
                if let Some(k) = partner[h.index()] {
                    let (p0, p1) = triangles[t].edge_points(e);
                    let (q0, q1) = triangles[k.tri].edge_points(k.edge);
                    transitions[h.index()] = Some(Transition::two_point(p0, p1, q1, q0));
                }
            }
        }

        let mut s = Surface {
            triangles,
            partner,
            transitions,
            corner_vertex: vec![usize::MAX; 3 * nt],
            vertices: Vec::new(),
            cones: Vec::new(),
            edges: Vec::new(),
            edge_of_half: vec![usize::MAX; 3 * nt],
            boundary_components: 0,
        };
        s.compute_vertices();
        s.compute_edges();
        s.compute_boundary();

        let mut aux_vertices = Vec::new();
        for &c in auxiliary {
            if c.tri >= nt {
                return Err(SurfaceError::UnknownTriangle(c.tri));
            }
            if c.corner >= 3 {
                return Err(SurfaceError::BadIndex(c.corner));
            }
            aux_vertices.push(s.corner_vertex[c.index()]);
        }
        s.compute_cones(&aux_vertices);
        for &v in &aux_vertices {
            let cone = &s.cones[v];
            if !cone.is_regular() {
                return Err(SurfaceError::BadAuxiliary {
                    vertex: v,
                    angle: cone.angle,
                    dilation: cone.dilation,
                });
            }
        }
        if s.is_closed() {
            let info = s.euler_info()?;
            if info.genus == Some(0) && info.marked_points < 3 {
                return Err(SurfaceError::TooFewSingularities(info.marked_points));
            }
        }
        Ok(s)
    }

    /// Corner reached by rotating counter-clockwise across the incoming edge.
    fn ccw_next(&self, c: Corner) -> Option<Corner> {
        self.partner[c.incoming().index()].map(|k| Corner::new(k.tri, k.edge))
    }

    /// Corner reached by rotating clockwise across the outgoing edge.
    fn cw_next(&self, c: Corner) -> Option<Corner> {
        self.partner[c.outgoing().index()].map(|k| Corner::new(k.tri, (k.edge + 1) % 3))
    }

    fn compute_vertices(&mut self) {
        let nt = self.triangles.len();
        for start in 0..3 * nt {
            if self.corner_vertex[start] != usize::MAX {
                continue;
            }
            let c0 = Corner::new(start / 3, start % 3);
            // rewind clockwise to the boundary, if there is one
            let mut first = c0;
            loop {
                match self.cw_next(first) {
                    Some(c) if c == c0 => break,
                    Some(c) => first = c,
                    None => break,
                }
            }
            let id = self.vertices.len();
            let mut corners = vec![first];
            let mut cur = first;
            while let Some(c) = self.ccw_next(cur) {
                if c == first {
                    break;
                }
                corners.push(c);
                cur = c;
            }
            for c in &corners {
                self.corner_vertex[c.index()] = id;
            }
            self.vertices.push(VertexData { corners });
        }
    }

    fn compute_edges(&mut self) {
        for t in 0..self.triangles.len() {
            for e in 0..3 {
                let h = HalfEdge::new(t, e);
                match self.partner[h.index()] {
                    Some(k) if k < h => {}
                    _ => {
                        let id = self.edges.len();
                        self.edges.push(h);
                        self.edge_of_half[h.index()] = id;
                        if let Some(k) = self.partner[h.index()] {
                            self.edge_of_half[k.index()] = id;
                        }
                    }
                }
            }
        }
    }

    fn compute_boundary(&mut self) {
        let nt = self.triangles.len();
        let mut seen = vec![false; 3 * nt];
        let mut cycles = 0;
        for i in 0..3 * nt {
            if self.partner[i].is_some() || seen[i] {
                continue;
            }
            cycles += 1;
            let mut h = HalfEdge::new(i / 3, i % 3);
            while !seen[h.index()] {
                seen[h.index()] = true;
                // rotate clockwise around the head until the outgoing edge is on the boundary
                let mut c = h.head();
                while let Some(n) = self.cw_next(c) {
                    c = n;
                }
                h = c.outgoing();
            }
        }
        self.boundary_components = cycles;
    }

    fn compute_cones(&mut self, aux: &[VertexId]) {
        let mut cones = Vec::with_capacity(self.vertices.len());
        for (v, data) in self.vertices.iter().enumerate() {
            let angle: f64 = data
                .corners
                .iter()
                .map(|c| self.triangles[c.tri].angle(c.corner))
                .sum();
            let is_boundary = self.partner[data.corners[0].outgoing().index()].is_none();
            let (dilation, holonomy_arg) = if is_boundary {
                (1.0, 0.0)
            } else {
                let hol = self.link_holonomy(v);
                (hol.a.norm(), hol.a.arg())
            };
            cones.push(ConeSummary {
                vertex: v,
                angle,
                dilation,
                holonomy_arg,
                is_boundary,
                is_auxiliary: aux.contains(&v),
            });
        }
        self.cones = cones;
    }

    /// Placement of the first corner's triangle after one counter-clockwise turn around an
    /// interior vertex.
    pub fn link_holonomy(&self, v: VertexId) -> Transition {
        let mut placement = Transition::IDENTITY;
        for c in &self.vertices[v].corners {
            let g = self.transitions[c.incoming().index()].expect("interior vertex");
            placement = placement.compose(&g.inverse());
        }
        placement
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn triangles(&self) -> &[Triangle] {
        &self.triangles
    }

    pub fn triangle(&self, t: usize) -> &Triangle {
        &self.triangles[t]
    }

    pub fn point(&self, c: Corner) -> Complex64 {
        self.triangles[c.tri].points[c.corner]
    }

    pub fn partner(&self, h: HalfEdge) -> Option<HalfEdge> {
        self.partner[h.index()]
    }

    pub fn is_glued(&self, h: HalfEdge) -> bool {
        self.partner[h.index()].is_some()
    }

    /// Transition from the chart of `h.tri` to the chart of its neighbour across `h`.
    pub fn transition_of(&self, h: HalfEdge) -> Result<Transition, SurfaceError> {
        if h.tri >= self.triangles.len() {
            return Err(SurfaceError::UnknownTriangle(h.tri));
        }
        if h.edge >= 3 {
            return Err(SurfaceError::BadIndex(h.edge));
        }
        self.transitions[h.index()].ok_or(SurfaceError::BoundaryEdge(h))
    }

    pub fn half_edges(&self) -> impl Iterator<Item = HalfEdge> + '_ {
        (0..self.triangles.len()).flat_map(|t| (0..3).map(move |e| HalfEdge::new(t, e)))
    }

    pub fn gluings(&self) -> Vec<(HalfEdge, HalfEdge)> {
        self.half_edges()
            .filter_map(|h| self.partner(h).filter(|k| h < *k).map(|k| (h, k)))
            .collect()
    }

    pub fn vertex_of(&self, c: Corner) -> VertexId {
        self.corner_vertex[c.index()]
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    /// Corners around `v`, counter-clockwise.
    pub fn corners_of(&self, v: VertexId) -> &[Corner] {
        &self.vertices[v].corners
    }

    pub fn cones(&self) -> &[ConeSummary] {
        &self.cones
    }

    pub fn is_auxiliary(&self, v: VertexId) -> bool {
        self.cones[v].is_auxiliary
    }

    /// One representative corner per auxiliary vertex.
    pub fn auxiliary_corners(&self) -> Vec<Corner> {
        self.cones
            .iter()
            .filter(|c| c.is_auxiliary)
            .map(|c| self.vertices[c.vertex].corners[0])
            .collect()
    }

    /// Canonical half-edge of every edge (the smaller of a glued pair).
    pub fn edges(&self) -> &[HalfEdge] {
        &self.edges
    }

    pub fn edge_of(&self, h: HalfEdge) -> EdgeId {
        self.edge_of_half[h.index()]
    }

    pub fn interior_edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        (0..self.edges.len()).filter(|&e| self.is_glued(self.edges[e]))
    }

    pub fn is_closed(&self) -> bool {
        self.boundary_components == 0
    }

    pub fn boundary_components(&self) -> usize {
        self.boundary_components
    }

    pub fn min_angle(&self) -> f64 {
        self.triangles
            .iter()
            .map(Triangle::min_angle)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn euler_info(&self) -> Result<SurfaceInfo, SurfaceError> {
        let v = self.vertices.len();
        let e = self.edges.len();
        let f = self.triangles.len();
        let chi = v as i64 - e as i64 + f as i64;
        let genus = if self.is_closed() {
            if chi % 2 != 0 {
                return Err(SurfaceError::NonOrientable);
            }
            Some((2 - chi) / 2)
        } else {
            None
        };
        let aux = self.cones.iter().filter(|c| c.is_auxiliary).count();
        Ok(SurfaceInfo {
            vertices: v,
            edges: e,
            faces: f,
            euler_characteristic: chi,
            genus,
            marked_points: v - aux,
            auxiliary_points: aux,
            boundary_components: self.boundary_components,
        })
    }

    /// Residuals of the angle and dilation identities for closed surfaces.
    pub fn check_gauss_bonnet(&self) -> Result<GaussBonnet, SurfaceError> {
        if !self.is_closed() {
            return Err(SurfaceError::HasBoundary);
        }
        let g = self.euler_info()?.genus.expect("closed") as f64;
        let angle_defect: f64 = self.cones.iter().map(|c| c.angle - 2.0 * PI).sum();
        let log_sum: f64 = self.cones.iter().map(|c| c.dilation.ln()).sum();
        Ok(GaussBonnet {
            r_angle: (angle_defect - 2.0 * PI * (2.0 * g - 2.0)).abs(),
            r_log: log_sum.abs(),
        })
    }

    /// Rebuilds with the same combinatorics and new triangle coordinates.
    pub fn with_triangles(&self, triangles: Vec<Triangle>) -> Result<Surface, SurfaceError> {
        Surface::build(triangles, &self.gluings(), &self.auxiliary_corners())
    }
}

/// Analyzes vertices of `s`: one summary per vertex.
pub fn analyze_vertices(s: &Surface) -> Vec<ConeSummary> {
    s.cones().to_vec()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::wrap_pi;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn square_parts() -> (Vec<Triangle>, Vec<(HalfEdge, HalfEdge)>) {
        let tris = vec![
            Triangle::new(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 1.0)),
            Triangle::new(c(0.0, 0.0), c(1.0, 1.0), c(0.0, 1.0)),
        ];
        let glue = vec![
            (HalfEdge::new(0, 0), HalfEdge::new(1, 1)),
            (HalfEdge::new(0, 1), HalfEdge::new(1, 2)),
            (HalfEdge::new(0, 2), HalfEdge::new(1, 0)),
        ];
        (tris, glue)
    }

    #[test]
    fn square_torus_counts() {
        let (t, g) = square_parts();
        let s = Surface::build(t, &g, &[]).unwrap();
        let info = s.euler_info().unwrap();
        assert_eq!((info.vertices, info.edges, info.faces), (1, 3, 2));
        assert_eq!(info.genus, Some(1));
        assert_eq!(info.marked_points, 1);
        let cone = &s.cones()[0];
        assert!((cone.angle - 2.0 * PI).abs() < 1e-12);
        assert!((cone.dilation - 1.0).abs() < 1e-12);
        let gb = s.check_gauss_bonnet().unwrap();
        assert!(gb.passes(1e-12));
    }

    #[test]
    fn horizontal_side_transition() {
        let (t, g) = square_parts();
        let s = Surface::build(t, &g, &[]).unwrap();
        let tr = s.transition_of(HalfEdge::new(0, 0)).unwrap();
        assert!((tr.a - c(1.0, 0.0)).norm() < 1e-15);
        assert!((tr.b - c(0.0, 1.0)).norm() < 1e-15);
        for h in s.half_edges() {
            let k = s.partner(h).unwrap();
            let id = s
                .transition_of(h)
                .unwrap()
                .compose(&s.transition_of(k).unwrap());
            assert!(id.is_identity(1e-12));
        }
    }

    #[test]
    fn omitted_gluing_leaves_boundary() {
        let (t, mut g) = square_parts();
        g.pop();
        let s = Surface::build(t, &g, &[]).unwrap();
        let info = s.euler_info().unwrap();
        // cutting the torus along a non-separating loop gives an annulus
        assert_eq!(info.euler_characteristic, 0);
        assert_eq!(info.genus, None);
        assert_eq!(info.boundary_components, 2);
        assert_eq!(info.edges, 4);
        assert!(s.cones().iter().all(|c| c.is_boundary));
        for cone in s.cones() {
            assert!((cone.angle - PI).abs() < 1e-12);
        }
        assert_eq!(s.check_gauss_bonnet(), Err(SurfaceError::HasBoundary));
        assert_eq!(
            s.transition_of(HalfEdge::new(0, 2)),
            Err(SurfaceError::BoundaryEdge(HalfEdge::new(0, 2)))
        );
    }

    #[test]
    fn collinear_triangle_rejected() {
        let t = vec![Triangle::new(c(0.0, 0.0), c(1.0, 0.0), c(2.0, 0.0))];
        assert_eq!(
            Surface::build(t, &[], &[]).unwrap_err(),
            SurfaceError::DegenerateTriangle(0)
        );
    }

    #[test]
    fn clockwise_triangle_rejected() {
        let t = vec![Triangle::new(c(0.0, 0.0), c(0.0, 1.0), c(1.0, 0.0))];
        assert!(matches!(
            Surface::build(t, &[], &[]),
            Err(SurfaceError::DegenerateTriangle(0))
        ));
    }

    #[test]
    fn double_and_self_gluing_rejected() {
        let (t, mut g) = square_parts();
        g.push((HalfEdge::new(0, 0), HalfEdge::new(1, 0)));
        assert!(matches!(
            Surface::build(t.clone(), &g, &[]),
            Err(SurfaceError::DoubleGluing(_))
        ));
        let g = vec![(HalfEdge::new(0, 0), HalfEdge::new(0, 0))];
        assert!(matches!(
            Surface::build(t, &g, &[]),
            Err(SurfaceError::DoubleGluing(_))
        ));
    }

    #[test]
    fn single_triangle_is_a_disk() {
        let t = vec![Triangle::new(c(0.0, 0.0), c(1.0, 0.0), c(0.3, 0.8))];
        let s = Surface::build(t, &[], &[]).unwrap();
        let info = s.euler_info().unwrap();
        assert_eq!(info.vertices, 3);
        assert_eq!(info.euler_characteristic, 1);
        assert_eq!(info.boundary_components, 1);
    }

    #[test]
    fn auxiliary_must_be_regular() {
        let t = vec![Triangle::new(c(0.0, 0.0), c(1.0, 0.0), c(0.3, 0.8))];
        let err = Surface::build(t, &[], &[Corner::new(0, 1)]).unwrap_err();
        assert!(matches!(err, SurfaceError::BadAuxiliary { .. }));
    }

    #[test]
    fn holonomy_arg_matches_angle_mod_two_pi() {
        let (t, g) = square_parts();
        let s = Surface::build(t, &g, &[]).unwrap();
        for cone in s.cones() {
            assert!(wrap_pi(cone.angle - cone.holonomy_arg).abs() < 1e-9);
        }
    }
}
