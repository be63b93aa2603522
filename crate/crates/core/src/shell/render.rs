//! SVG developments and Graphviz flip graphs.

use crate::developing::{develop_strip, DevelopError};
use crate::flip_graph::FlipGraphReport;
use crate::geodesics::{CylinderKind, CylinderRecord};
use crate::geometry::cross;
use crate::surface::{HalfEdge, Surface};
use crate::transition::Transition;
use num_complex::Complex64;
use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeSet, BinaryHeap};
use std::fmt::Write as _;

const WIDTH: f64 = 800.0;
const MARGIN: f64 = 40.0;

#[derive(Clone, Copy, Debug)]
pub enum Layout<'a> {
    /// Every triangle once, placed along a breadth-first spanning tree of the dual graph.
    Whole,
    /// The developed strip of a crossing word.
    Strip { start: usize, word: &'a [HalfEdge] },
}

/// Placements of each triangle in one plane, optionally with tree-edge markers.
fn whole_layout(s: &Surface) -> (Vec<(usize, Transition)>, BTreeSet<HalfEdge>) {
    let n = s.num_triangles();
    let mut placed: Vec<Option<Transition>> = vec![None; n];
    let mut order = Vec::with_capacity(n);
    let mut tree = BTreeSet::new();
    for root in 0..n {
        if placed[root].is_some() {
            continue;
        }
        // further components continue to the right of what is already drawn
        let shift = if order.is_empty() {
            Transition::IDENTITY
        } else {
            let right = order
                .iter()
                .flat_map(|&(t, g): &(usize, Transition)| s.triangle(t).points.map(|z| g.apply(z)))
                .map(|z| z.re)
                .fold(f64::NEG_INFINITY, f64::max);
            let left = s.triangle(root).points.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
            Transition::translation(Complex64::new(right - left + 0.5, 0.0))
        };
        placed[root] = Some(shift);
        order.push((root, shift));
        // grow the picture across gluings closest to the identity, then by the copy whose
        // centroid stays closest to the root's
        let centre = shift.apply(s.triangle(root).centroid());
        let mut heap = BinaryHeap::new();
        let mut candidates: Vec<Transition> = Vec::new();
        let push = |heap: &mut BinaryHeap<_>, candidates: &mut Vec<Transition>, t: usize, g0: Transition| {
            for e in 0..3 {
                let h = HalfEdge::new(t, e);
                if let Some(k) = s.partner(h) {
                    let step = s.transition_of(h).expect("glued");
                    let g = g0.compose(&step.inverse());
                    let distortion = ((step.a - 1.0).norm() * 1e9).round();
                    let d = (g.apply(s.triangle(k.tri).centroid()) - centre).norm();
                    heap.push(Reverse((OrdF64(distortion), OrdF64(d), h, k, candidates.len())));
                    candidates.push(g);
                }
            }
        };
        push(&mut heap, &mut candidates, root, shift);
        while let Some(Reverse((_, _, h, k, i))) = heap.pop() {
            let g = candidates[i];
            if placed[k.tri].is_some() {
                continue;
            }
            placed[k.tri] = Some(g);
            order.push((k.tri, g));
            tree.insert(h);
            tree.insert(k);
            push(&mut heap, &mut candidates, k.tri, g);
        }
    }
    (order, tree)
}

#[derive(Clone, Copy, PartialEq)]
struct OrdF64(f64);

impl Eq for OrdF64 {}
impl PartialOrd for OrdF64 {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for OrdF64 {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

struct Frame {
    lo: Complex64,
    scale: f64,
    height: f64,
}

impl Frame {
    fn new(points: impl Iterator<Item = Complex64>) -> Frame {
        let (mut lo, mut hi) = (Complex64::new(f64::INFINITY, f64::INFINITY), Complex64::new(f64::NEG_INFINITY, f64::NEG_INFINITY));
        for z in points {
            lo = Complex64::new(lo.re.min(z.re), lo.im.min(z.im));
            hi = Complex64::new(hi.re.max(z.re), hi.im.max(z.im));
        }
        let span = (hi.re - lo.re).max(hi.im - lo.im).max(1e-12);
        let scale = (WIDTH - 2.0 * MARGIN) / span;
        Frame {
            lo,
            scale,
            height: (hi.im - lo.im) * scale + 2.0 * MARGIN,
        }
    }

    fn xy(&self, z: Complex64) -> (f64, f64) {
        (
            MARGIN + (z.re - self.lo.re) * self.scale,
            self.height - MARGIN - (z.im - self.lo.im) * self.scale,
        )
    }

    fn points(&self, zs: &[Complex64]) -> String {
        zs.iter()
            .map(|&z| {
                let (x, y) = self.xy(z);
                format!("{x:.6},{y:.6}")
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Keeps the part of a convex polygon where `f >= 0`, for an affine function `f`.
fn clip(poly: &[Complex64], f: impl Fn(Complex64) -> f64) -> Vec<Complex64> {
    let mut out = Vec::new();
    for i in 0..poly.len() {
        let (a, b) = (poly[i], poly[(i + 1) % poly.len()]);
        let (fa, fb) = (f(a), f(b));
        if fa >= 0.0 {
            out.push(a);
        }
        if (fa >= 0.0) != (fb >= 0.0) {
            out.push(a + (b - a) * (fa / (fa - fb)));
        }
    }
    out
}

/// Parts of the layout triangles inside the cylinder; `layout` gives each triangle's placement.
fn overlay_polygons(s: &Surface, c: &CylinderRecord, layout: &[Option<Transition>]) -> Vec<Vec<Complex64>> {
    c.pieces()
        .into_iter()
        .filter_map(|(t, g)| {
            let tri: Vec<Complex64> = s.triangle(t).points.iter().map(|&z| g.apply(z)).collect();
            let poly = match (c.kind, c.fixed_point) {
                (CylinderKind::Flat, _) => {
                    let u = c.direction;
                    let p = clip(&tri, |z| cross(u, z) - c.lower);
                    clip(&p, |z| c.upper - cross(u, z))
                }
                (CylinderKind::Hyperbolic, Some(p)) if c.upper - c.lower < std::f64::consts::PI => {
                    let dl = Complex64::from_polar(1.0, c.lower);
                    let du = Complex64::from_polar(1.0, c.upper);
                    let q = clip(&tri, |z| cross(dl, z - p));
                    clip(&q, |z| cross(z - p, du))
                }
                _ => tri,
            };
            let back = layout[t]?.compose(&g.inverse());
            (poly.len() >= 3).then(|| poly.into_iter().map(|z| back.apply(z)).collect())
        })
        .collect()
}

fn fmt_angle(x: f64) -> String {
    format!("{:.4}π", x / std::f64::consts::PI)
}

/// Deterministic SVG picture of a development, with vertex labels `(θ, λ)` and optional
/// shading of cylinders.
pub fn render_development_svg(
    s: &Surface,
    layout: Layout<'_>,
    cylinders: &[CylinderRecord],
) -> Result<String, DevelopError> {
    let (placements, tree) = match layout {
        Layout::Whole => whole_layout(s),
        Layout::Strip { start, word } => {
            let chain = develop_strip(s, start, word)?;
            let tree: BTreeSet<HalfEdge> = word.iter().flat_map(|&h| [h, s.partner(h).expect("glued")]).collect();
            (chain.placements, tree)
        }
    };
    let mut first: Vec<Option<Transition>> = vec![None; s.num_triangles()];
    for &(t, g) in &placements {
        first[t].get_or_insert(g);
    }
    let shaded: Vec<Vec<Vec<Complex64>>> = cylinders.iter().map(|c| overlay_polygons(s, c, &first)).collect();
    let placed: Vec<[Complex64; 3]> = placements
        .iter()
        .map(|(t, g)| s.triangle(*t).points.map(|z| g.apply(z)))
        .collect();
    let frame = Frame::new(placed.iter().flatten().copied());
    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{:.6}" height="{:.6}" viewBox="0 0 {:.6} {:.6}">"#,
        WIDTH, frame.height, WIDTH, frame.height
    )
    .unwrap();
    writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    for (i, polys) in shaded.iter().enumerate() {
        let fill = if cylinders[i].kind == CylinderKind::Hyperbolic { "#e8a33d" } else { "#5aa0d8" };
        writeln!(out, r#"<g class="cylinder" data-index="{i}" fill="{fill}" fill-opacity="0.35" stroke="none">"#).unwrap();
        for p in polys {
            writeln!(out, r#"<polygon points="{}"/>"#, frame.points(p)).unwrap();
        }
        out.push_str("</g>\n");
    }
    out.push_str("<g class=\"triangles\" fill=\"none\" stroke=\"black\" stroke-width=\"1\">\n");
    for ((t, _), pts) in placements.iter().zip(&placed) {
        writeln!(out, r#"<polygon data-tri="{t}" points="{}"/>"#, frame.points(pts)).unwrap();
    }
    out.push_str("</g>\n");
    // sides glued elsewhere in the picture are drawn in colour
    out.push_str("<g class=\"cut-edges\" stroke=\"#b03030\" stroke-width=\"2\">\n");
    for ((t, _), pts) in placements.iter().zip(&placed) {
        for e in 0..3 {
            let h = HalfEdge::new(*t, e);
            if s.is_glued(h) && !tree.contains(&h) {
                let (a, b) = (frame.xy(pts[e]), frame.xy(pts[(e + 1) % 3]));
                writeln!(
                    out,
                    r#"<line data-edge="{h}" x1="{:.6}" y1="{:.6}" x2="{:.6}" y2="{:.6}"/>"#,
                    a.0, a.1, b.0, b.1
                )
                .unwrap();
            }
        }
    }
    out.push_str("</g>\n");
    out.push_str("<g class=\"labels\" font-family=\"sans-serif\" font-size=\"11\">\n");
    let mut labelled = vec![false; s.num_vertices()];
    for ((t, _), pts) in placements.iter().zip(&placed) {
        for k in 0..3 {
            let v = s.vertex_of(crate::surface::Corner::new(*t, k));
            if std::mem::replace(&mut labelled[v], true) {
                continue;
            }
            let cone = &s.cones()[v];
            let (x, y) = frame.xy(pts[k]);
            writeln!(out, r#"<circle cx="{x:.6}" cy="{y:.6}" r="3" fill="black"/>"#).unwrap();
            writeln!(
                out,
                r#"<text x="{:.6}" y="{:.6}">v{v} ({}, {:.4})</text>"#,
                x + 4.0,
                y - 4.0,
                fmt_angle(cone.angle),
                cone.dilation
            )
            .unwrap();
        }
    }
    out.push_str("</g>\n</svg>\n");
    Ok(out)
}

/// Graphviz description of an explored flip graph, one undirected edge per flip pair.
pub fn flip_graph_dot(report: &FlipGraphReport) -> String {
    let mut out = String::from("graph flips {\n  node [shape=box, fontname=\"monospace\"];\n");
    for (i, n) in report.nodes.iter().enumerate() {
        let mark = if i == report.witness { ", style=bold" } else { "" };
        writeln!(
            out,
            "  n{i} [label=\"{i} d={} min={:.6}\"{mark}];",
            n.depth, n.min_angle
        )
        .unwrap();
    }
    let mut seen = BTreeSet::new();
    for e in &report.edges {
        let key = if (e.from, e.edge) <= (e.to, e.inserted) {
            (e.from, e.edge, e.to, e.inserted)
        } else {
            (e.to, e.inserted, e.from, e.edge)
        };
        if seen.insert(key) {
            writeln!(out, "  n{} -- n{} [label=\"{}/{}\"];", key.0, key.2, key.1, key.3).unwrap();
        }
    }
    out.push_str("}\n");
    out
}
