use super::turn_sign;
use crate::developing::develop_strip;
use crate::geometry::{contains, cross, dot, wrap_pi};
use crate::surface::{Corner, HalfEdge, Surface, VertexId};
use crate::transition::Transition;
use num_complex::Complex64;
use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet};
use std::f64::consts::PI;
use std::fmt;

const FLOOD_LIMIT: usize = 200_000;
const PORTAL_EPS: f64 = 1e-9;
const SAMPLES: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CylinderKind {
    Flat,
    Hyperbolic,
}

impl fmt::Display for CylinderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CylinderKind::Flat => "flat",
            CylinderKind::Hyperbolic => "hyperbolic",
        })
    }
}

/// A developed copy of a triangle inside a cylinder, with the transverse coordinate of each
/// corner: lifted argument around the fixed point (hyperbolic) or signed offset (flat).
#[derive(Clone, Debug)]
struct Piece {
    tri: usize,
    placement: Transition,
    lifts: [f64; 3],
}

impl Piece {
    fn range(&self) -> (f64, f64) {
        let mn = self.lifts.iter().copied().fold(f64::INFINITY, f64::min);
        let mx = self.lifts.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (mn, mx)
    }
}

/// A maximal cylinder of parallel closed geodesics.
#[derive(Clone, Debug)]
pub struct CylinderRecord {
    pub kind: CylinderKind,
    /// Cyclic crossing word of one closed geodesic; the base chart is that of `word[0].tri`.
    pub word: Vec<HalfEdge>,
    /// Placement of the base triangle after one period.
    pub return_map: Transition,
    /// Real derivative of the return map (1 for flat, above 1 for hyperbolic).
    pub derivative: f64,
    /// `max(a, 1/a)`.
    pub modulus: f64,
    /// Angle β of a hyperbolic cylinder; 0 for flat ones.
    pub angle: f64,
    /// Perpendicular width of a flat cylinder; 0 for hyperbolic ones.
    pub width: f64,
    pub fixed_point: Option<Complex64>,
    /// Unit direction of the closed geodesics (flat) or of the core ray (hyperbolic).
    pub direction: Complex64,
    /// Transverse coordinate of the core geodesic and of the two boundaries.
    pub core: f64,
    pub lower: f64,
    pub upper: f64,
    pub lower_vertices: Vec<VertexId>,
    pub upper_vertices: Vec<VertexId>,
    /// A point of the core geodesic: triangle, chart point and direction in that chart.
    pub core_point: (usize, Complex64, Complex64),
    pieces: Vec<Piece>,
}

impl CylinderRecord {
    /// Triangle copies covering the cylinder, as placements into the chart of `word[0].tri`.
    pub fn pieces(&self) -> Vec<(usize, Transition)> {
        self.pieces.iter().map(|p| (p.tri, p.placement)).collect()
    }

    fn transverse(&self, z: Complex64) -> f64 {
        match self.kind {
            CylinderKind::Hyperbolic => (z - self.fixed_point.expect("hyperbolic")).arg(),
            CylinderKind::Flat => cross(self.direction, z),
        }
    }

    /// Coordinate of `z` lifted consistently with the corner lifts of `piece`.
    fn lift_in(&self, piece: &Piece, z: Complex64, s: &Surface) -> f64 {
        match self.kind {
            CylinderKind::Flat => self.transverse(z),
            CylinderKind::Hyperbolic => {
                let z0 = piece.placement.apply(s.triangle(piece.tri).points[0]);
                piece.lifts[0] + wrap_pi(self.transverse(z) - self.transverse(z0))
            }
        }
    }

    /// Transverse coordinate of the chart point `x` of triangle `tri`, if it lies strictly
    /// inside the cylinder, together with the piece placement used.
    fn locate(&self, s: &Surface, tri: usize, x: Complex64, margin: f64) -> Option<(f64, Transition)> {
        for piece in self.pieces.iter().filter(|p| p.tri == tri) {
            let pts = s.triangle(tri).points.map(|z| piece.placement.apply(z));
            let z = piece.placement.apply(x);
            let area = cross(pts[1] - pts[0], pts[2] - pts[0]);
            if !contains(&pts, z, 1e-9 * area.abs()) {
                continue;
            }
            let l = self.lift_in(piece, z, s);
            if l > self.lower + margin && l < self.upper - margin {
                return Some((l, piece.placement));
            }
        }
        None
    }

    /// Whether a closed geodesic through `x` (chart of `tri`) with direction `d` belongs to
    /// this cylinder.
    pub fn contains_geodesic(&self, s: &Surface, tri: usize, x: Complex64, d: Complex64) -> bool {
        let Some((_, placement)) = self.locate(s, tri, x, 1e-9) else { return false };
        let dd = placement.apply_vector(d);
        let reference = match self.kind {
            CylinderKind::Flat => self.direction,
            CylinderKind::Hyperbolic => placement.apply(x) - self.fixed_point.expect("hyperbolic"),
        };
        turn_sign(reference, dd).abs() < 1e-7
    }

    /// A grid of interior points in cylinder coordinates, as (triangle, chart point).
    fn samples(&self, s: &Surface, n: usize) -> Vec<(usize, Complex64)> {
        let mut out = Vec::new();
        if self.kind != CylinderKind::Hyperbolic {
            return out;
        }
        let p = self.fixed_point.expect("hyperbolic");
        let period = self.derivative.ln();
        let (ct, cx, _) = self.core_point;
        let rho0 = self
            .pieces
            .iter()
            .find(|pc| pc.tri == ct)
            .map(|pc| (pc.placement.apply(cx) - p).norm().ln())
            .unwrap_or(0.0);
        for i in 0..n {
            let tau = self.lower + (i as f64 + 0.5) / n as f64 * (self.upper - self.lower);
            for j in 0..n {
                let rho = rho0 + (j as f64 + 0.5) / n as f64 * period;
                if let Some(hit) = self.find_sample(s, p, tau, rho, period) {
                    out.push(hit);
                }
            }
        }
        out
    }

    fn find_sample(&self, s: &Surface, p: Complex64, tau: f64, rho: f64, period: f64) -> Option<(usize, Complex64)> {
        for piece in &self.pieces {
            let (mn, mx) = piece.range();
            if tau < mn || tau > mx {
                continue;
            }
            let pts = s.triangle(piece.tri).points.map(|z| piece.placement.apply(z));
            let radii = pts.map(|z| (z - p).norm().ln());
            let rmin = radii.iter().copied().fold(f64::INFINITY, f64::min) - period;
            let rmax = radii.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let k0 = ((rmin - rho) / period).floor() as i64;
            let k1 = ((rmax - rho) / period).ceil() as i64;
            for k in k0..=k1 {
                let z = p + Complex64::from_polar((rho + k as f64 * period).exp(), tau);
                if !contains(&pts, z, 0.0) {
                    continue;
                }
                if (self.lift_in(piece, z, s) - tau).abs() < 1e-9 {
                    return Some((piece.tri, piece.placement.inverse().apply(z)));
                }
            }
        }
        None
    }
}

#[derive(Clone, Copy)]
struct Queued {
    distance: f64,
    order: usize,
}

impl PartialEq for Queued {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Queued {}
impl PartialOrd for Queued {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Queued {
    fn cmp(&self, other: &Self) -> Ordering {
        // smallest distance first, then earliest
        other
            .distance
            .total_cmp(&self.distance)
            .then(other.order.cmp(&self.order))
    }
}

/// Cyclic non-backtracking crossing words of length at most `max_period`, each as its
/// lexicographically minimal rotation, without proper powers.
fn cyclic_words(s: &Surface, max_period: usize) -> Vec<Vec<HalfEdge>> {
    let mut out = Vec::new();
    for h0 in s.half_edges() {
        if !s.is_glued(h0) {
            continue;
        }
        let mut stack = vec![vec![h0]];
        while let Some(word) = stack.pop() {
            let last = *word.last().expect("nonempty");
            let k = s.partner(last).expect("glued");
            if k.tri == h0.tri && k.edge != h0.edge && is_primitive_min_rotation(&word) {
                out.push(word.clone());
            }
            if word.len() >= max_period {
                continue;
            }
            for step in [2, 1] {
                let h = HalfEdge::new(k.tri, (k.edge + step) % 3);
                if s.is_glued(h) && h >= h0 {
                    let mut w = word.clone();
                    w.push(h);
                    stack.push(w);
                }
            }
        }
    }
    out.sort();
    out
}

fn is_primitive_min_rotation(word: &[HalfEdge]) -> bool {
    let n = word.len();
    (1..n).all(|k| {
        let rotated = word[k..].iter().chain(&word[..k]);
        for (x, y) in rotated.zip(word) {
            match x.cmp(y) {
                Ordering::Greater => return true,
                Ordering::Less => return false,
                Ordering::Equal => {}
            }
        }
        false
    })
}

struct Candidate {
    kind: CylinderKind,
    word: Vec<HalfEdge>,
    ret: Transition,
    fixed_point: Option<Complex64>,
    direction: Complex64,
    core: f64,
    core_point: (usize, Complex64, Complex64),
    base_tri: usize,
}

/// Checks that some closed geodesic follows `word`, and returns its core data.
fn realize(s: &Surface, word: &[HalfEdge]) -> Option<Candidate> {
    let base = word[0].tri;
    let chain = develop_strip(s, base, word).ok()?;
    let ret = chain.cumulative;
    let a = ret.a;
    let kind = if (a - 1.0).norm() < 1e-9 {
        if ret.b.norm() < 1e-9 {
            return None;
        }
        CylinderKind::Flat
    } else if a.im.abs() < 1e-9 * a.norm() && a.re > 1.0 {
        CylinderKind::Hyperbolic
    } else {
        return None;
    };
    let mut portals: Vec<(Complex64, Complex64)> = word
        .iter()
        .enumerate()
        .map(|(j, h)| {
            let (p, q) = s.triangle(h.tri).edge_points(h.edge);
            let pl = chain.placements[j].1;
            (pl.apply(p), pl.apply(q))
        })
        .collect();
    portals.push((ret.apply(portals[0].0), ret.apply(portals[0].1)));

    let (direction, fixed_point, core, positions) = match kind {
        CylinderKind::Hyperbolic => {
            let p = ret.fixed_point()?;
            let mut lo = f64::NEG_INFINITY;
            let mut hi = f64::INFINITY;
            for &(x, y) in &portals {
                if turn_sign(y - x, p - x).abs() < 1e-12 {
                    return None;
                }
                let ax = (x - p).arg();
                let ay = ax + wrap_pi((y - p).arg() - ax);
                let (mut l, mut h) = if ax < ay { (ax, ay) } else { (ay, ax) };
                if lo.is_finite() {
                    let centre = 0.5 * (lo + hi);
                    let shift = ((centre - 0.5 * (l + h)) / (2.0 * PI)).round() * 2.0 * PI;
                    l += shift;
                    h += shift;
                }
                lo = lo.max(l);
                hi = hi.min(h);
                if hi - lo <= 1e-12 {
                    return None;
                }
            }
            let phi = 0.5 * (lo + hi);
            let dir = Complex64::from_polar(1.0, phi);
            let mut radii = Vec::with_capacity(portals.len());
            for &(x, y) in &portals {
                let e = y - x;
                let den = cross(dir, e);
                if den.abs() < 1e-300 {
                    return None;
                }
                let r = cross(x - p, e) / den;
                let t = cross(x - p, dir) / den;
                if !(r > 0.0 && t > PORTAL_EPS && t < 1.0 - PORTAL_EPS) {
                    return None;
                }
                radii.push(p + dir * r);
            }
            (dir, Some(p), phi, radii)
        }
        CylinderKind::Flat => {
            let u = ret.b / ret.b.norm();
            let mut lo = f64::NEG_INFINITY;
            let mut hi = f64::INFINITY;
            for &(x, y) in &portals {
                let (ox, oy) = (cross(u, x), cross(u, y));
                lo = lo.max(ox.min(oy));
                hi = hi.min(ox.max(oy));
            }
            if hi - lo <= 1e-12 * ret.b.norm() {
                return None;
            }
            let o = 0.5 * (lo + hi);
            let mut pts = Vec::with_capacity(portals.len());
            for &(x, y) in &portals {
                let den = cross(u, y - x);
                let t = (o - cross(u, x)) / den;
                if !(t > PORTAL_EPS && t < 1.0 - PORTAL_EPS) {
                    return None;
                }
                pts.push(x + (y - x) * t);
            }
            (u, None, o, pts)
        }
    };
    let along = |z: Complex64| match fixed_point {
        Some(p) => (z - p).norm(),
        None => dot(direction, z),
    };
    if positions.windows(2).any(|w| along(w[1]) <= along(w[0])) {
        return None;
    }
    let mid = 0.5 * (positions[0] + positions[1]);
    let pl1 = chain.placements[1].1;
    let local = pl1.inverse();
    let d_local = local.apply_vector(match fixed_point {
        Some(p) => (mid - p) / (mid - p).norm(),
        None => direction,
    });
    Some(Candidate {
        kind,
        word: word.to_vec(),
        ret,
        fixed_point,
        direction,
        core,
        core_point: (chain.placements[1].0, local.apply(mid), d_local / d_local.norm()),
        base_tri: base,
    })
}

/// Floods the cylinder around a realized core geodesic and measures its transverse extent.
fn measure(s: &Surface, c: Candidate) -> Option<CylinderRecord> {
    let period = match c.kind {
        CylinderKind::Hyperbolic => c.ret.a.re.ln(),
        CylinderKind::Flat => c.ret.b.norm(),
    };
    let coord = |z: Complex64| match c.fixed_point {
        Some(p) => (z - p).arg(),
        None => cross(c.direction, z),
    };
    let along = |z: Complex64| match c.fixed_point {
        Some(p) => (z - p).norm().ln(),
        None => dot(c.direction, z),
    };
    let key = |piece: &Piece| {
        let z0 = piece.placement.apply(s.triangle(piece.tri).points[0]);
        let f = along(z0) / period;
        let q = ((f - f.floor()) * 1e7).round() as i64 % 10_000_000;
        (piece.tri, (piece.lifts[0] * 1e7).round() as i64, q)
    };
    let tol = 1e-12;

    let pts0 = s.triangle(c.base_tri).points;
    let first = Piece {
        tri: c.base_tri,
        placement: Transition::IDENTITY,
        lifts: pts0.map(|z| match c.kind {
            CylinderKind::Hyperbolic => c.core + wrap_pi(coord(z) - c.core),
            CylinderKind::Flat => coord(z),
        }),
    };
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    let mut lo_v: Vec<VertexId> = Vec::new();
    let mut hi_v: Vec<VertexId> = Vec::new();
    let mut seen = HashSet::new();
    seen.insert(key(&first));
    let mut pieces = vec![first];
    let mut heap = BinaryHeap::new();
    heap.push((Queued { distance: 0.0, order: 0 }, 0usize));
    while let Some((_, idx)) = heap.pop() {
        let piece = pieces[idx].clone();
        let (mn, mx) = piece.range();
        if mx <= lo + tol || mn >= hi - tol {
            continue;
        }
        for k in 0..3 {
            let v = s.vertex_of(Corner::new(piece.tri, k));
            if s.is_auxiliary(v) {
                continue;
            }
            let l = piece.lifts[k];
            if (l - c.core).abs() <= tol {
                return None;
            }
            if l > c.core && l <= hi + tol {
                if l < hi - tol {
                    hi_v.clear();
                }
                hi = hi.min(l);
                if !hi_v.contains(&v) {
                    hi_v.push(v);
                }
            } else if l < c.core && l >= lo - tol {
                if l > lo + tol {
                    lo_v.clear();
                }
                lo = lo.max(l);
                if !lo_v.contains(&v) {
                    lo_v.push(v);
                }
            }
        }
        if piece.range().1 <= lo + tol || piece.range().0 >= hi - tol {
            continue;
        }
        let placed = s.triangle(piece.tri).points.map(|z| piece.placement.apply(z));
        for e in 0..3 {
            let h = HalfEdge::new(piece.tri, e);
            let Some(k) = s.partner(h) else { continue };
            // the edge must reach into the open gap
            let (le, lf) = (piece.lifts[e], piece.lifts[(e + 1) % 3]);
            if le.max(lf) <= lo + tol || le.min(lf) >= hi - tol {
                continue;
            }
            let g = s.transition_of(h).expect("glued");
            let placement = piece.placement.compose(&g.inverse());
            let q = s.triangle(k.tri).points.map(|z| placement.apply(z));
            let mut lifts = [0.0; 3];
            lifts[k.edge] = piece.lifts[(e + 1) % 3];
            lifts[(k.edge + 1) % 3] = piece.lifts[e];
            let third = (k.edge + 2) % 3;
            lifts[third] = match c.kind {
                CylinderKind::Hyperbolic => {
                    let anchor = (k.edge + 1) % 3;
                    lifts[anchor] + wrap_pi(coord(q[third]) - coord(q[anchor]))
                }
                CylinderKind::Flat => coord(q[third]),
            };
            if let Some(p) = c.fixed_point {
                let area = cross(q[1] - q[0], q[2] - q[0]);
                if contains(&q, p, 1e-12 * area.abs()) {
                    return None;
                }
            }
            let child = Piece {
                tri: k.tri,
                placement,
                lifts,
            };
            if !seen.insert(key(&child)) {
                continue;
            }
            if pieces.len() >= FLOOD_LIMIT {
                return None;
            }
            let (cmn, cmx) = child.range();
            let distance = if cmn <= c.core && c.core <= cmx {
                0.0
            } else {
                (cmn - c.core).abs().min((cmx - c.core).abs())
            };
            let order = pieces.len();
            pieces.push(child);
            heap.push((Queued { distance, order }, order));
        }
        let _ = placed;
    }
    if !lo.is_finite() || !hi.is_finite() {
        return None;
    }
    pieces.retain(|p| {
        let (mn, mx) = p.range();
        mx > lo + tol && mn < hi - tol
    });
    let derivative = c.ret.a.re;
    let (angle, width) = match c.kind {
        CylinderKind::Hyperbolic => (hi - lo, 0.0),
        CylinderKind::Flat => (0.0, hi - lo),
    };
    Some(CylinderRecord {
        kind: c.kind,
        word: c.word,
        return_map: c.ret,
        derivative,
        modulus: derivative.max(1.0 / derivative),
        angle,
        width,
        fixed_point: c.fixed_point,
        direction: c.direction,
        core: c.core,
        lower: lo,
        upper: hi,
        lower_vertices: lo_v,
        upper_vertices: hi_v,
        core_point: c.core_point,
        pieces,
    })
}

/// Closed-geodesic cylinders whose core crosses at most `max_period` edges, one record per
/// maximal cylinder, in order of their minimal crossing words.
pub fn detect_cylinders(s: &Surface, max_period: usize) -> Vec<CylinderRecord> {
    let mut records: Vec<CylinderRecord> = Vec::new();
    for word in cyclic_words(s, max_period) {
        let Some(c) = realize(s, &word) else { continue };
        let (tri, x, d) = c.core_point;
        if records
            .iter()
            .any(|r| r.kind == c.kind && r.contains_geodesic(s, tri, x, d))
        {
            continue;
        }
        if let Some(r) = measure(s, c) {
            records.push(r);
        }
    }
    records
}

#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    /// A hyperbolic cylinder of angle at least π, free of true singularities.
    NotTriangulableAtSingularities { cylinder: usize, angle: f64 },
    /// The surface has no auxiliary points, so its own triangulation is geometric.
    TriangulableWitnessed,
    /// No obstruction found among cylinders of period at most `max_period`.
    TriangulableLikely { max_period: usize },
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::NotTriangulableAtSingularities { .. } => f.write_str("NOT_TRIANGULABLE_AT_SINGULARITIES"),
            Verdict::TriangulableWitnessed => f.write_str("TRIANGULABLE_WITNESSED"),
            Verdict::TriangulableLikely { max_period } => write!(f, "TRIANGULABLE_LIKELY(max_period={max_period})"),
        }
    }
}

pub fn triangulability_verdict(s: &Surface, max_period: usize) -> Verdict {
    let records = detect_cylinders(s, max_period);
    if let Some((i, r)) = records
        .iter()
        .enumerate()
        .find(|(_, r)| r.kind == CylinderKind::Hyperbolic && r.angle >= PI - 1e-9)
    {
        return Verdict::NotTriangulableAtSingularities {
            cylinder: i,
            angle: r.angle,
        };
    }
    if s.auxiliary_corners().is_empty() {
        Verdict::TriangulableWitnessed
    } else {
        Verdict::TriangulableLikely { max_period }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DisjointnessReport {
    pub pairs_checked: usize,
    pub samples_checked: usize,
    /// `(i, j, count)`: sample points of record `i` lying strictly inside record `j`.
    pub violations: Vec<(usize, usize, usize)>,
}

impl DisjointnessReport {
    pub fn passes(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Samples a grid of interior points of every hyperbolic cylinder of angle at least π/2 and
/// checks that none lies inside another such cylinder.
pub fn cylinder_disjointness_check(s: &Surface, records: &[CylinderRecord]) -> DisjointnessReport {
    let wide: Vec<usize> = (0..records.len())
        .filter(|&i| records[i].kind == CylinderKind::Hyperbolic && records[i].angle >= PI / 2.0)
        .collect();
    let mut report = DisjointnessReport {
        pairs_checked: 0,
        samples_checked: 0,
        violations: Vec::new(),
    };
    for &i in &wide {
        let samples = records[i].samples(s, SAMPLES);
        for &j in &wide {
            if i == j {
                continue;
            }
            report.pairs_checked += 1;
            report.samples_checked += samples.len();
            let hits = samples
                .iter()
                .filter(|&&(t, x)| records[j].locate(s, t, x, 1e-9).is_some())
                .count();
            if hits > 0 {
                report.violations.push((i, j, hits));
            }
        }
    }
    report
}
