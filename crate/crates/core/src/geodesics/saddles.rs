use super::turn_sign;
use crate::surface::{Corner, EdgeId, HalfEdge, Surface, VertexId};
use crate::transition::Transition;
use num_complex::Complex64;
use std::collections::BTreeMap;

const WEDGE_EPS: f64 = 1e-12;

/// A straight segment between vertices whose interior avoids all vertices.
#[derive(Clone, Debug, PartialEq)]
pub struct SaddleConnection {
    /// Corner of the first triangle at the start vertex.
    pub start: Corner,
    /// Corner of the last triangle at the end vertex.
    pub end: Corner,
    pub start_vertex: VertexId,
    pub end_vertex: VertexId,
    /// Edges crossed strictly inside, in order. Empty for triangle sides.
    pub word: Vec<HalfEdge>,
    /// Developed displacement in the chart of `start.tri`.
    pub vector: Complex64,
    /// Set when the connection is a side of the triangulation.
    pub edge: Option<EdgeId>,
}

impl SaddleConnection {
    /// The word of the same connection traversed backwards.
    pub fn reversed_word(&self, s: &Surface) -> Vec<HalfEdge> {
        reverse_word(s, &self.word)
    }
}

pub(crate) fn reverse_word(s: &Surface, word: &[HalfEdge]) -> Vec<HalfEdge> {
    word.iter()
        .rev()
        .map(|&h| s.partner(h).expect("crossed edges are glued"))
        .collect()
}

struct Wedge {
    corner: Corner,
    origin: Complex64,
    crossing: HalfEdge,
    placement: Transition,
    right: Complex64,
    left: Complex64,
    word: Vec<HalfEdge>,
}

/// All saddle connections crossing at most `depth` edges, found by propagating the visibility
/// wedge of every corner. Each connection is reported once (up to reversal).
pub fn enumerate_saddle_connections(s: &Surface, depth: usize) -> Vec<SaddleConnection> {
    let mut out = Vec::new();
    for (id, &h) in s.edges().iter().enumerate() {
        let (p, q) = s.triangle(h.tri).edge_points(h.edge);
        let start = h.tail();
        let end = h.head();
        out.push(SaddleConnection {
            start,
            end,
            start_vertex: s.vertex_of(start),
            end_vertex: s.vertex_of(end),
            word: Vec::new(),
            vector: q - p,
            edge: Some(id),
        });
    }

    let mut found: BTreeMap<(usize, Vec<HalfEdge>), SaddleConnection> = BTreeMap::new();
    if depth == 0 {
        return out;
    }
    for t in 0..s.num_triangles() {
        for k in 0..3 {
            let pts = s.triangle(t).points;
            let origin = pts[k];
            let mut stack = vec![Wedge {
                corner: Corner::new(t, k),
                origin,
                crossing: HalfEdge::new(t, (k + 1) % 3),
                placement: Transition::IDENTITY,
                right: pts[(k + 1) % 3] - origin,
                left: pts[(k + 2) % 3] - origin,
                word: Vec::new(),
            }];
            while let Some(w) = stack.pop() {
                let Some(partner) = s.partner(w.crossing) else { continue };
                let g = s.transition_of(w.crossing).expect("glued");
                let placement = w.placement.compose(&g.inverse());
                let q = s.triangle(partner.tri).points;
                let f = partner.edge;
                let v = placement.apply(q[(f + 2) % 3]) - w.origin;
                let mut word = w.word;
                word.push(w.crossing);
                let right_of_v = turn_sign(w.right, v) > WEDGE_EPS;
                let left_of_v = turn_sign(v, w.left) > WEDGE_EPS;
                if right_of_v && left_of_v {
                    let end = Corner::new(partner.tri, (f + 2) % 3);
                    let rev = reverse_word(s, &word);
                    let key = if rev < word { rev } else { word.clone() };
                    found.entry((key.len(), key)).or_insert(SaddleConnection {
                        start: w.corner,
                        end,
                        start_vertex: s.vertex_of(w.corner),
                        end_vertex: s.vertex_of(end),
                        word: word.clone(),
                        vector: v,
                        edge: None,
                    });
                }
                if word.len() >= depth {
                    continue;
                }
                // rays between the right bound and v leave through the edge ending at v
                let left = if left_of_v { v } else { w.left };
                if turn_sign(w.right, left) > WEDGE_EPS {
                    stack.push(Wedge {
                        corner: w.corner,
                        origin: w.origin,
                        crossing: HalfEdge::new(partner.tri, (f + 1) % 3),
                        placement,
                        right: w.right,
                        left,
                        word: word.clone(),
                    });
                }
                let right = if right_of_v { v } else { w.right };
                if turn_sign(right, w.left) > WEDGE_EPS {
                    stack.push(Wedge {
                        corner: w.corner,
                        origin: w.origin,
                        crossing: HalfEdge::new(partner.tri, (f + 2) % 3),
                        placement,
                        right,
                        left: w.left,
                        word,
                    });
                }
            }
        }
    }
    out.extend(found.into_values());
    out
}
