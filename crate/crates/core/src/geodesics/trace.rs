use crate::geometry::{barycentric, cross, dot};
use crate::surface::{Corner, HalfEdge, Surface, VertexId};
use num_complex::Complex64;
use thiserror::Error;

/// Vertex-hit tolerance relative to the diameter of the current triangle.
pub const DELTA_V: f64 = 1e-9;

const MAX_PERIOD: usize = 64;

#[derive(Clone, Debug, PartialEq)]
pub enum TrajectoryEvent {
    /// Crossing of a glued half-edge at parameter `t` from its tail.
    CrossEdge { half_edge: HalfEdge, t: f64 },
    HitVertex { vertex: VertexId, corner: Corner },
    ExitBoundary { half_edge: HalfEdge, t: f64 },
    /// The last crossings repeat `word` with a contracting real return map.
    LimitCycle {
        word: Vec<HalfEdge>,
        /// Derivative of the first-return map along `word`.
        derivative: f64,
        contraction: f64,
        /// Ratio of the last two gaps between successive crossing parameters.
        observed_ratio: f64,
    },
    BudgetExhausted,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TraceError {
    #[error("triangle {0} does not exist")]
    UnknownTriangle(usize),
    #[error("start point lies on an edge of its triangle")]
    StartOnEdge,
    #[error("start point lies outside its triangle")]
    StartOutside,
    #[error("direction is zero")]
    ZeroDirection,
}

/// Follows the straight ray from `start` (in the chart of `tri`) in direction `dir`.
pub fn trace(
    s: &Surface,
    tri: usize,
    start: Complex64,
    dir: Complex64,
    max_crossings: usize,
) -> Result<Vec<TrajectoryEvent>, TraceError> {
    if tri >= s.num_triangles() {
        return Err(TraceError::UnknownTriangle(tri));
    }
    if !(dir.norm() > 0.0) || !dir.re.is_finite() || !dir.im.is_finite() {
        return Err(TraceError::ZeroDirection);
    }
    let bary = barycentric(&s.triangle(tri).points, start);
    let min_bary = bary.iter().copied().fold(f64::INFINITY, f64::min);
    if min_bary < -1e-12 {
        return Err(TraceError::StartOutside);
    }
    if min_bary <= 1e-9 {
        return Err(TraceError::StartOnEdge);
    }

    let mut events = Vec::new();
    let mut history: Vec<(HalfEdge, f64, Complex64)> = Vec::new();
    let (mut t, mut p, mut d) = (tri, start, dir / dir.norm());
    let mut entry: Option<usize> = None;
    loop {
        if history.len() >= max_crossings {
            events.push(TrajectoryEvent::BudgetExhausted);
            return Ok(events);
        }
        let tr = s.triangle(t);
        let pts = tr.points;
        let delta = DELTA_V * tr.diameter();
        let mut exit: Option<(usize, f64, f64)> = None;
        for j in 0..3 {
            if entry == Some(j) {
                continue;
            }
            let e = pts[(j + 1) % 3] - pts[j];
            let den = cross(d, e);
            if den <= 0.0 {
                continue;
            }
            let ray = cross(pts[j] - p, e) / den;
            let u = cross(pts[j] - p, d) / den;
            if exit.is_none_or(|(_, best, _)| ray < best) {
                exit = Some((j, ray, u));
            }
        }
        let (j, ray, u) = match exit {
            Some(x) => x,
            None => {
                // the ray runs along the entry edge; report its far vertex
                let k = (0..3)
                    .max_by(|&a, &b| dot(pts[a] - p, d).total_cmp(&dot(pts[b] - p, d)))
                    .expect("three corners");
                let corner = Corner::new(t, k);
                events.push(TrajectoryEvent::HitVertex {
                    vertex: s.vertex_of(corner),
                    corner,
                });
                return Ok(events);
            }
        };
        let ray = ray.max(0.0);
        for k in 0..3 {
            let along = dot(pts[k] - p, d).clamp(0.0, ray);
            if (pts[k] - (p + d * along)).norm() < delta {
                let corner = Corner::new(t, k);
                events.push(TrajectoryEvent::HitVertex {
                    vertex: s.vertex_of(corner),
                    corner,
                });
                return Ok(events);
            }
        }
        let h = HalfEdge::new(t, j);
        let hit = p + d * ray;
        let Some(k) = s.partner(h) else {
            events.push(TrajectoryEvent::ExitBoundary { half_edge: h, t: u });
            return Ok(events);
        };
        let g = s.transition_of(h).expect("glued");
        events.push(TrajectoryEvent::CrossEdge { half_edge: h, t: u });
        history.push((h, u, g.a));
        if let Some(cycle) = limit_cycle(&history) {
            events.push(cycle);
            return Ok(events);
        }
        p = g.apply(hit);
        let nd = g.apply_vector(d);
        d = nd / nd.norm();
        t = k.tri;
        entry = Some(k.edge);
    }
}

fn limit_cycle(history: &[(HalfEdge, f64, Complex64)]) -> Option<TrajectoryEvent> {
    let n = history.len();
    for period in 1..=MAX_PERIOD.min(n / 3) {
        let tail = &history[n - 3 * period..];
        if !(0..2 * period).all(|i| tail[i].0 == tail[i + period].0) {
            continue;
        }
        let a: Complex64 = history[n - period..].iter().map(|x| x.2).product();
        if a.im.abs() > 1e-9 * a.norm() || a.re <= 0.0 || (a.re - 1.0).abs() <= 1e-9 {
            continue;
        }
        let u = |i: usize| history[i].1;
        let g1 = u(n - 1 - period) - u(n - 1 - 2 * period);
        let g2 = u(n - 1) - u(n - 1 - period);
        if !(g1 * g2 > 0.0 && g2.abs() < g1.abs()) {
            continue;
        }
        return Some(TrajectoryEvent::LimitCycle {
            word: history[n - period..].iter().map(|x| x.0).collect(),
            derivative: a.re,
            contraction: a.re.min(1.0 / a.re),
            observed_ratio: g2 / g1,
        });
    }
    None
}
