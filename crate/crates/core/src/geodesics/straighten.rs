use super::saddles::SaddleConnection;
use super::turn_sign;
use crate::developing::develop_strip;
use crate::surface::{Corner, HalfEdge, Surface, VertexId};
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StraightenError {
    #[error("invalid strip: {0}")]
    InvalidStrip(String),
}

/// Geodesic representative of an arc: a chain of saddle connections.
#[derive(Clone, Debug, PartialEq)]
pub struct Straightened {
    /// Turning points in the chart of the first triangle, including both ends.
    pub points: Vec<Complex64>,
    pub vertices: Vec<VertexId>,
    pub segments: Vec<SaddleConnection>,
    /// The input word after cancelling backtracks.
    pub word: Vec<HalfEdge>,
}

impl Straightened {
    pub fn single(&self) -> Option<&SaddleConnection> {
        (self.segments.len() == 1).then(|| &self.segments[0])
    }

    /// Sum of absolute turning angles at interior points.
    pub fn total_turning(&self) -> f64 {
        self.points
            .windows(3)
            .map(|w| ((w[2] - w[1]) / (w[1] - w[0])).arg().abs())
            .sum()
    }
}

/// Cancels consecutive crossings of an edge and straight back.
pub fn free_reduce(s: &Surface, word: &[HalfEdge]) -> Vec<HalfEdge> {
    let mut out: Vec<HalfEdge> = Vec::with_capacity(word.len());
    for &h in word {
        if out.last().and_then(|&l| s.partner(l)) == Some(h) {
            out.pop();
        } else {
            out.push(h);
        }
    }
    out
}

struct Portal {
    left: Complex64,
    right: Complex64,
    left_corner: (usize, Corner),
    right_corner: (usize, Corner),
}

/// Shortest path from the vertex at `start` to the vertex at `end` within the developed strip
/// of `word` (funnel algorithm).
pub fn straighten(
    s: &Surface,
    start: Corner,
    word: &[HalfEdge],
    end: Corner,
) -> Result<Straightened, StraightenError> {
    let word = free_reduce(s, word);
    let chain = develop_strip(s, start.tri, &word).map_err(|e| StraightenError::InvalidStrip(e.to_string()))?;
    if chain.end() != end.tri || start.corner >= 3 || end.corner >= 3 {
        return Err(StraightenError::InvalidStrip("end corner is not in the last triangle".into()));
    }
    let m = word.len();
    let place = |i: usize, c: Corner| chain.placements[i].1.apply(s.point(c));
    let origin = s.point(start);
    let target = place(m, end);
    let scale = chain
        .placements
        .iter()
        .enumerate()
        .flat_map(|(i, _)| chain.points(s, i))
        .map(|z| (z - origin).norm())
        .fold(0.0, f64::max);
    let tol = 1e-12 * scale;
    if (target - origin).norm() <= tol {
        return Err(StraightenError::InvalidStrip("arc has coincident developed endpoints".into()));
    }
    let mut portals = Vec::with_capacity(m + 2);
    portals.push(Portal {
        left: origin,
        right: origin,
        left_corner: (0, start),
        right_corner: (0, start),
    });
    for (i, h) in word.iter().enumerate() {
        let l = Corner::new(h.tri, (h.edge + 1) % 3);
        let r = Corner::new(h.tri, h.edge);
        portals.push(Portal {
            left: place(i, l),
            right: place(i, r),
            left_corner: (i, l),
            right_corner: (i, r),
        });
    }
    portals.push(Portal {
        left: target,
        right: target,
        left_corner: (m, end),
        right_corner: (m, end),
    });
    if word.iter().enumerate().any(|(i, _)| {
        let p = &portals[i + 1];
        let a = place(i, Corner::new(word[i].tri, (word[i].edge + 2) % 3));
        turn_sign(p.left - p.right, a - p.right) <= 0.0
    }) {
        return Err(StraightenError::InvalidStrip("degenerate developed triangle".into()));
    }

    let near = |a: Complex64, b: Complex64| (a - b).norm() <= tol;
    let side = |apex: Complex64, a: Complex64, b: Complex64| crate::geometry::cross(a - apex, b - apex);
    let mut path: Vec<(usize, Complex64, (usize, Corner))> = vec![(0, origin, (0, start))];
    let mut apex = origin;
    let (mut left, mut left_i) = (origin, 0);
    let (mut right, mut right_i) = (origin, 0);
    let mut i = 1;
    let area_tol = tol * scale;
    while i < portals.len() {
        let (l, r) = (portals[i].left, portals[i].right);
        if side(apex, right, r) >= -area_tol {
            if near(apex, right) || side(apex, left, r) < -area_tol {
                right = r;
                right_i = i;
            } else {
                if left_i == m + 1 || near(left, target) {
                    break;
                }
                path.push((left_i, left, portals[left_i].left_corner));
                apex = left;
                right = apex;
                right_i = left_i;
                i = left_i + 1;
                continue;
            }
        }
        if side(apex, left, l) <= area_tol {
            if near(apex, left) || side(apex, right, l) > area_tol {
                left = l;
                left_i = i;
            } else {
                if right_i == m + 1 || near(right, target) {
                    break;
                }
                path.push((right_i, right, portals[right_i].right_corner));
                apex = right;
                left = apex;
                left_i = right_i;
                i = right_i + 1;
                continue;
            }
        }
        i += 1;
    }
    path.push((m + 1, target, (m, end)));

    let mut segments = Vec::with_capacity(path.len() - 1);
    for w in path.windows(2) {
        let (ia, pa, _) = w[0];
        let (ib, pb, _) = w[1];
        let dir = pb - pa;
        let crossed: Vec<usize> = (ia + 1..ib)
            .filter(|&j| {
                let p = &portals[j];
                let sl = turn_sign(dir, p.left - pa);
                let sr = turn_sign(dir, p.right - pa);
                sl > 1e-12 && sr < -1e-12
            })
            .collect();
        let locate = |tri_index: usize, z: Complex64| -> Option<Corner> {
            let t = chain.placements[tri_index].0;
            (0..3)
                .map(|k| Corner::new(t, k))
                .find(|&c| near(place(tri_index, c), z))
        };
        let (first, last) = match (crossed.first(), crossed.last()) {
            (Some(&f), Some(&l)) => (f - 1, l),
            _ => {
                let lo = ia.saturating_sub(1);
                let hi = ib.min(m);
                let j = (lo..=hi)
                    .find(|&j| locate(j, pa).is_some() && locate(j, pb).is_some())
                    .ok_or_else(|| StraightenError::InvalidStrip("segment leaves the strip".into()))?;
                (j, j)
            }
        };
        let (Some(sc), Some(ec)) = (locate(first, pa), locate(last, pb)) else {
            return Err(StraightenError::InvalidStrip("turning point is not a strip vertex".into()));
        };
        let sub: Vec<HalfEdge> = crossed.iter().map(|&j| word[j - 1]).collect();
        let a = chain.placements[first].1.a;
        let edge = sub.is_empty().then(|| {
            let t = chain.placements[first].0;
            let h = (0..3)
                .map(|e| HalfEdge::new(t, e))
                .find(|h| (h.tail() == sc && h.head() == ec) || (h.head() == sc && h.tail() == ec))
                .expect("two corners of a triangle share a side");
            s.edge_of(h)
        });
        segments.push(SaddleConnection {
            start: sc,
            end: ec,
            start_vertex: s.vertex_of(sc),
            end_vertex: s.vertex_of(ec),
            word: sub,
            vector: dir / a,
            edge,
        });
    }
    Ok(Straightened {
        points: path.iter().map(|p| p.1).collect(),
        vertices: path.iter().map(|p| s.vertex_of((p.2).1)).collect(),
        segments,
        word,
    })
}
