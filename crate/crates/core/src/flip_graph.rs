//! The graph of geometric triangulations connected by flips.

use crate::developing::holonomy_type;
use crate::flips::{flip, flippable_edges, FlipError};
use crate::geodesics::{CylinderKind, CylinderRecord};
use crate::surface::{Corner, EdgeId, HalfEdge, Surface, Triangle};
use num_complex::Complex64;
use rayon::prelude::*;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use thiserror::Error;

/// Grid for quantized triangle shapes.
pub const SHAPE_GRID: f64 = 1e-9;

const BOUNDARY: i64 = -1;

pub fn min_angle(s: &Surface) -> f64 {
    s.min_angle()
}

/// Canonical encoding of a triangulation up to relabeling and similarity.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TriangulationKey(Vec<i64>);

impl TriangulationKey {
    pub fn to_bytes(&self) -> Vec<u8> {
        self.0.iter().flat_map(|x| x.to_be_bytes()).collect()
    }

    /// Short stable hexadecimal digest (FNV-1a) for display.
    pub fn digest(&self) -> String {
        let mut h: u64 = 0xcbf29ce484222325;
        for b in self.to_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
        format!("{h:016x}")
    }
}

impl fmt::Display for TriangulationKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.digest())
    }
}

/// A relabeling: triangle `t` becomes `label[t]`, with its local vertex 0 at old vertex `rot[t]`.
#[derive(Clone, Debug)]
struct Labeling {
    label: Vec<usize>,
    rot: Vec<usize>,
    order: Vec<usize>,
}

impl Labeling {
    fn half_edge(&self, h: HalfEdge) -> HalfEdge {
        HalfEdge::new(self.label[h.tri], (h.edge + 3 - self.rot[h.tri]) % 3)
    }
}

fn quantize(x: f64) -> i64 {
    (x / SHAPE_GRID).round() as i64
}

fn bfs_labeling(s: &Surface, start: HalfEdge) -> Labeling {
    let nt = s.num_triangles();
    let mut label = vec![usize::MAX; nt];
    let mut rot = vec![0; nt];
    let mut order = Vec::with_capacity(nt);
    label[start.tri] = 0;
    rot[start.tri] = start.edge;
    order.push(start.tri);
    let mut head = 0;
    loop {
        while head < order.len() {
            let t = order[head];
            head += 1;
            for j in 0..3 {
                let h = HalfEdge::new(t, (rot[t] + j) % 3);
                if let Some(k) = s.partner(h) {
                    if label[k.tri] == usize::MAX {
                        label[k.tri] = order.len();
                        rot[k.tri] = k.edge;
                        order.push(k.tri);
                    }
                }
            }
        }
        match label.iter().position(|&l| l == usize::MAX) {
            Some(t) => {
                label[t] = order.len();
                order.push(t);
            }
            None => break,
        }
    }
    Labeling { label, rot, order }
}

fn encode(s: &Surface, lab: &Labeling) -> Vec<i64> {
    let nt = s.num_triangles();
    let mut code = Vec::with_capacity(12 * nt);
    for &t in &lab.order {
        for j in 0..3 {
            let h = HalfEdge::new(t, (lab.rot[t] + j) % 3);
            match s.partner(h) {
                Some(k) => {
                    let m = lab.half_edge(k);
                    code.push((3 * m.tri + m.edge) as i64);
                }
                None => code.push(BOUNDARY),
            }
        }
    }
    for &t in &lab.order {
        for j in 0..3 {
            let v = s.vertex_of(Corner::new(t, (lab.rot[t] + j) % 3));
            code.push(s.is_auxiliary(v) as i64);
        }
    }
    // two corner angles fix a positively oriented triangle up to similarity and stay
    // well-conditioned however thin it gets
    for &t in &lab.order {
        let tri = s.triangle(t);
        let r = lab.rot[t];
        code.push(quantize(tri.angle(r)));
        code.push(quantize(tri.angle((r + 1) % 3)));
    }
    code
}

fn best_labeling(s: &Surface) -> (Vec<i64>, Labeling) {
    let mut best: Option<(Vec<i64>, Labeling)> = None;
    for h in s.half_edges() {
        let lab = bfs_labeling(s, h);
        let code = encode(s, &lab);
        if best.as_ref().is_none_or(|(b, _)| code < *b) {
            best = Some((code, lab));
        }
    }
    best.expect("nonempty surface")
}

pub fn triangulation_key(s: &Surface) -> TriangulationKey {
    TriangulationKey(best_labeling(s).0)
}

/// A surface relabeled by its minimal labeling, so surfaces with equal keys have consistent
/// edge ids.
#[derive(Clone, Debug)]
pub struct CanonicalForm {
    pub key: TriangulationKey,
    pub surface: Surface,
    labeling: Vec<(usize, usize)>,
}

impl CanonicalForm {
    /// Image of a half-edge of the original surface.
    pub fn map_half_edge(&self, h: HalfEdge) -> HalfEdge {
        let (l, r) = self.labeling[h.tri];
        HalfEdge::new(l, (h.edge + 3 - r) % 3)
    }
}

pub fn canonical_form(s: &Surface) -> CanonicalForm {
    let (code, lab) = best_labeling(s);
    let triangles: Vec<Triangle> = lab
        .order
        .iter()
        .map(|&t| {
            let p = s.triangle(t).points;
            let r = lab.rot[t];
            Triangle::new(p[r], p[(r + 1) % 3], p[(r + 2) % 3])
        })
        .collect();
    let gluings: Vec<(HalfEdge, HalfEdge)> = s
        .gluings()
        .into_iter()
        .map(|(h, k)| (lab.half_edge(h), lab.half_edge(k)))
        .collect();
    let aux: Vec<Corner> = s
        .auxiliary_corners()
        .into_iter()
        .map(|c| {
            let m = lab.half_edge(c.outgoing());
            Corner::new(m.tri, m.edge)
        })
        .collect();
    let surface = Surface::build(triangles, &gluings, &aux).expect("relabeling preserves validity");
    let labeling = (0..s.num_triangles()).map(|t| (lab.label[t], lab.rot[t])).collect();
    CanonicalForm {
        key: TriangulationKey(code),
        surface,
        labeling,
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FlipGraphError {
    #[error("node budget must be positive")]
    BudgetZero,
    #[error("target {0} is not a triangulation of the same surface")]
    IncompatibleTargets(usize),
}

#[derive(Clone, Debug)]
pub struct ExploreOptions {
    /// Maximum number of nodes.
    pub budget: usize,
    /// Maximum flip distance from the start; `None` for unlimited.
    pub depth: Option<usize>,
    pub parallel: bool,
    /// Drop states whose minimum angle is below this floor. Makes the result heuristic.
    pub min_angle_floor: Option<f64>,
}

impl ExploreOptions {
    pub fn new(budget: usize) -> Self {
        ExploreOptions {
            budget,
            depth: None,
            parallel: false,
            min_angle_floor: None,
        }
    }

    pub fn depth(mut self, depth: usize) -> Self {
        self.depth = Some(depth);
        self
    }

    pub fn parallel(mut self, parallel: bool) -> Self {
        self.parallel = parallel;
        self
    }

    pub fn min_angle_floor(mut self, floor: f64) -> Self {
        self.min_angle_floor = Some(floor);
        self
    }
}

#[derive(Clone, Debug)]
pub struct FlipGraphNode {
    pub key: TriangulationKey,
    pub min_angle: f64,
    pub depth: usize,
    /// Canonical-form representative.
    pub surface: Surface,
}

/// A flip from node `from` across `edge` arriving at node `to`, where the new diagonal is
/// `inserted` (edge ids in the canonical representatives).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FlipGraphEdge {
    pub from: usize,
    pub edge: EdgeId,
    pub to: usize,
    pub inserted: EdgeId,
}

#[derive(Clone, Debug)]
pub struct FlipGraphReport {
    /// Nodes in discovery order; node 0 is the start.
    pub nodes: Vec<FlipGraphNode>,
    pub edges: Vec<FlipGraphEdge>,
    pub frontier_exhausted: bool,
    pub alpha_hat: f64,
    pub alpha_exact: bool,
    /// First discovered node attaining `alpha_hat`.
    pub witness: usize,
    /// Set when states were pruned by a minimum-angle floor.
    pub heuristic: bool,
    index: HashMap<TriangulationKey, usize>,
}

impl FlipGraphReport {
    pub fn node_of(&self, key: &TriangulationKey) -> Option<usize> {
        self.index.get(key).copied()
    }
}

struct Child {
    edge: EdgeId,
    key: TriangulationKey,
    surface: Surface,
    inserted: EdgeId,
    min_angle: f64,
}

/// Flips of every flippable edge of `s`, canonicalized, in edge order.
fn children(s: &Surface) -> Vec<Child> {
    flippable_edges(s)
        .into_iter()
        .filter_map(|e| {
            let (f, mv) = flip(s, e).ok()?;
            let cf = canonical_form(&f);
            let inserted = cf.surface.edge_of(cf.map_half_edge(mv.diagonal.0));
            let min_angle = cf.surface.min_angle();
            Some(Child {
                edge: e,
                key: cf.key,
                surface: cf.surface,
                inserted,
                min_angle,
            })
        })
        .collect()
}

fn expand(level: &[(usize, Surface)], parallel: bool) -> Vec<Vec<Child>> {
    if parallel {
        level.par_iter().map(|(_, s)| children(s)).collect()
    } else {
        level.iter().map(|(_, s)| children(s)).collect()
    }
}

pub fn explore_flip_graph(s: &Surface, opts: &ExploreOptions) -> Result<FlipGraphReport, FlipGraphError> {
    if opts.budget == 0 {
        return Err(FlipGraphError::BudgetZero);
    }
    let root = canonical_form(s);
    let root_angle = root.surface.min_angle();
    let mut nodes = vec![FlipGraphNode {
        key: root.key.clone(),
        min_angle: root_angle,
        depth: 0,
        surface: root.surface.clone(),
    }];
    let mut index = HashMap::new();
    index.insert(root.key, 0);
    let mut edges = Vec::new();
    let mut truncated = false;
    let mut pruned = false;
    let mut level: Vec<(usize, Surface)> = vec![(0, root.surface)];
    let mut d = 0;
    while !level.is_empty() && opts.depth.is_none_or(|m| d < m) {
        let expanded = expand(&level, opts.parallel);
        let mut next = Vec::new();
        for ((from, _), kids) in level.iter().zip(expanded) {
            for child in kids {
                let to = match index.get(&child.key) {
                    Some(&i) => i,
                    None => {
                        if opts.min_angle_floor.is_some_and(|f| child.min_angle < f) {
                            pruned = true;
                            continue;
                        }
                        if nodes.len() >= opts.budget {
                            truncated = true;
                            continue;
                        }
                        let i = nodes.len();
                        index.insert(child.key.clone(), i);
                        next.push((i, child.surface.clone()));
                        nodes.push(FlipGraphNode {
                            key: child.key,
                            min_angle: child.min_angle,
                            depth: d + 1,
                            surface: child.surface,
                        });
                        i
                    }
                };
                edges.push(FlipGraphEdge {
                    from: *from,
                    edge: child.edge,
                    to,
                    inserted: child.inserted,
                });
            }
        }
        level = next;
        d += 1;
    }
    let frontier_exhausted = level.is_empty() && !truncated;
    let alpha_hat = nodes.iter().map(|n| n.min_angle).fold(f64::MIN, f64::max);
    let witness = nodes
        .iter()
        .position(|n| n.min_angle >= alpha_hat - 1e-12)
        .expect("nonempty");
    let alpha_exact = (frontier_exhausted && !pruned) || alpha_hat >= PI / 3.0 - 1e-9;
    Ok(FlipGraphReport {
        nodes,
        edges,
        frontier_exhausted,
        alpha_hat,
        alpha_exact,
        witness,
        heuristic: pruned,
        index,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct AlphaBound {
    pub alpha_hat: f64,
    pub alpha_exact: bool,
    pub witness: TriangulationKey,
}

/// Lower bound for the supremum of minimum angles over triangulations reachable by flips.
pub fn alpha_lower_bound(s: &Surface, budget: usize) -> Result<AlphaBound, FlipGraphError> {
    let r = explore_flip_graph(s, &ExploreOptions::new(budget))?;
    Ok(AlphaBound {
        alpha_hat: r.alpha_hat,
        alpha_exact: r.alpha_exact,
        witness: r.nodes[r.witness].key.clone(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Reachability {
    /// Edge ids, each referring to the canonical form of the current surface (the first one to
    /// the canonical form of the start). Replay with [`replay_chain`].
    Chain(Vec<EdgeId>),
    NotFoundWithinBudget,
}

fn cone_signature(s: &Surface) -> Vec<(f64, f64, bool)> {
    let mut v: Vec<(f64, f64, bool)> = s
        .cones()
        .iter()
        .map(|c| (c.angle, c.dilation, c.is_auxiliary))
        .collect();
    v.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    v
}

fn compatible(a: &Surface, b: &Surface) -> bool {
    if a.num_triangles() != b.num_triangles() || a.boundary_components() != b.boundary_components() {
        return false;
    }
    if holonomy_type(a) != holonomy_type(b) {
        return false;
    }
    let (x, y) = (cone_signature(a), cone_signature(b));
    x.len() == y.len()
        && x.iter()
            .zip(&y)
            .all(|(p, q)| (p.0 - q.0).abs() < 1e-9 && (p.1 - q.1).abs() < 1e-9 && p.2 == q.2)
}

struct SearchTree {
    /// key → (parent key, edge flipped in the parent, inserted edge in this node)
    parent: HashMap<TriangulationKey, Option<(TriangulationKey, EdgeId, EdgeId)>>,
    frontier: Vec<(TriangulationKey, Surface)>,
}

impl SearchTree {
    fn new(cf: CanonicalForm) -> Self {
        let mut parent = HashMap::new();
        parent.insert(cf.key.clone(), None);
        SearchTree {
            parent,
            frontier: vec![(cf.key, cf.surface)],
        }
    }

    /// Expands one level; returns a key also present in `other`, if met.
    fn step(&mut self, other: &SearchTree, budget: usize, used: &mut usize) -> Option<TriangulationKey> {
        let mut next = Vec::new();
        let mut met = None;
        for (key, s) in std::mem::take(&mut self.frontier) {
            for child in children(&s) {
                if self.parent.contains_key(&child.key) {
                    continue;
                }
                if *used >= budget {
                    return met;
                }
                *used += 1;
                self.parent
                    .insert(child.key.clone(), Some((key.clone(), child.edge, child.inserted)));
                if met.is_none() && other.parent.contains_key(&child.key) {
                    met = Some(child.key.clone());
                }
                next.push((child.key, child.surface));
            }
            if met.is_some() {
                return met;
            }
        }
        self.frontier = next;
        met
    }
}

fn bidirectional(start: &CanonicalForm, target: &CanonicalForm, budget: usize) -> Reachability {
    if start.key == target.key {
        return Reachability::Chain(Vec::new());
    }
    let mut fwd = SearchTree::new(start.clone());
    let mut bwd = SearchTree::new(target.clone());
    let mut used = 2;
    loop {
        if fwd.frontier.is_empty() && bwd.frontier.is_empty() || used >= budget {
            return Reachability::NotFoundWithinBudget;
        }
        let forward = !fwd.frontier.is_empty() && (fwd.frontier.len() <= bwd.frontier.len() || bwd.frontier.is_empty());
        let met = if forward {
            fwd.step(&bwd, budget, &mut used)
        } else {
            bwd.step(&fwd, budget, &mut used)
        };
        if let Some(m) = met {
            let mut chain = Vec::new();
            let mut k = m.clone();
            while let Some(Some((p, e, _))) = fwd.parent.get(&k) {
                chain.push(*e);
                k = p.clone();
            }
            chain.reverse();
            let mut k = m;
            while let Some(Some((p, _, inserted))) = bwd.parent.get(&k) {
                chain.push(*inserted);
                k = p.clone();
            }
            return Reachability::Chain(chain);
        }
    }
}

/// Searches for flip chains from `s` to each target, meeting in the middle. A budget bounds the
/// number of states visited per target.
pub fn verify_reachability(
    s: &Surface,
    targets: &[Surface],
    budget: usize,
) -> Result<Vec<Reachability>, FlipGraphError> {
    if budget == 0 {
        return Err(FlipGraphError::BudgetZero);
    }
    for (i, t) in targets.iter().enumerate() {
        if !compatible(s, t) {
            return Err(FlipGraphError::IncompatibleTargets(i));
        }
    }
    let start = canonical_form(s);
    Ok(targets
        .iter()
        .map(|t| bidirectional(&start, &canonical_form(t), budget))
        .collect())
}

/// Applies a chain reported by [`verify_reachability`], canonicalizing before each flip.
pub fn replay_chain(s: &Surface, chain: &[EdgeId]) -> Result<Surface, FlipError> {
    let mut cur = canonical_form(s).surface;
    for &e in chain {
        cur = canonical_form(&flip(&cur, e)?.0).surface;
    }
    Ok(cur)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CylinderBoundReport {
    pub alpha_hat: f64,
    /// `π − alpha_hat`.
    pub bound: f64,
    pub checked: usize,
    /// `(record index, β)` of hyperbolic cylinders above the bound.
    pub violations: Vec<(usize, f64)>,
}

impl CylinderBoundReport {
    pub fn passes(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks that the angle of every hyperbolic cylinder is at most `π − alpha_hat`.
pub fn check_alpha_cylinder_bound(alpha_hat: f64, cylinders: &[CylinderRecord]) -> CylinderBoundReport {
    let bound = PI - alpha_hat;
    let mut checked = 0;
    let mut violations = Vec::new();
    for (i, c) in cylinders.iter().enumerate() {
        if c.kind != CylinderKind::Hyperbolic {
            continue;
        }
        checked += 1;
        if c.angle > bound + 1e-6 {
            violations.push((i, c.angle));
        }
    }
    CylinderBoundReport {
        alpha_hat,
        bound,
        checked,
        violations,
    }
}

/// Shape parameter of triangle `t` with vertex 0 as origin and vertex 1 at 1.
pub fn shape_parameter(t: &Triangle) -> Complex64 {
    let p = t.points;
    (p[2] - p[0]) / (p[1] - p[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::*;
    use crate::transition::Transition;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn relabeled(s: &Surface, perm: &[usize], rots: &[usize]) -> Surface {
        let nt = s.num_triangles();
        let mut tris = vec![s.triangle(0).clone(); nt];
        let map = |h: HalfEdge| HalfEdge::new(perm[h.tri], (h.edge + 3 - rots[h.tri]) % 3);
        for t in 0..nt {
            let p = s.triangle(t).points;
            let r = rots[t];
            let shift = Transition::new(c(0.3, 0.4), c(5.0, -2.0));
            tris[perm[t]] = Triangle::new(
                shift.apply(p[r]),
                shift.apply(p[(r + 1) % 3]),
                shift.apply(p[(r + 2) % 3]),
            );
        }
        let gl: Vec<_> = s.gluings().into_iter().map(|(h, k)| (map(h), map(k))).collect();
        let aux: Vec<_> = s
            .auxiliary_corners()
            .into_iter()
            .map(|c| {
                let m = map(c.outgoing());
                Corner::new(m.tri, m.edge)
            })
            .collect();
        Surface::build(tris, &gl, &aux).unwrap()
    }

    #[test]
    fn min_angles() {
        assert!((min_angle(&build_square_torus()) - PI / 4.0).abs() < 1e-12);
        assert!((min_angle(&build_hex_torus()) - PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn key_invariant_under_relabeling() {
        let s = build_star_sphere([PI / 2.0, 0.8, 1.3], [2.0, 1.5, 1.0], c(0.4, 0.7)).unwrap();
        let r = relabeled(&s, &[2, 0, 3, 1], &[1, 2, 0, 1]);
        assert_eq!(triangulation_key(&s), triangulation_key(&r));
        let t = build_star_sphere([PI / 2.0, 0.8, 1.3], [2.0, 1.5, 1.0], c(0.4, 0.71)).unwrap();
        assert_ne!(triangulation_key(&s), triangulation_key(&t));
    }

    #[test]
    fn key_sees_auxiliary_flags() {
        let s = build_dilation_torus(0.9 * PI, 2.0).unwrap();
        let r = relabeled(&s, &[1, 0], &[2, 1]);
        assert_eq!(triangulation_key(&s), triangulation_key(&r));
    }

    #[test]
    fn canonical_form_has_same_key() {
        let s = build_two_cylinder_surface(0.6 * PI, [2.0, 3.0]).unwrap();
        let cf = canonical_form(&s);
        assert_eq!(triangulation_key(&cf.surface), cf.key);
    }

    #[test]
    fn depth_zero_single_node() {
        let r = explore_flip_graph(&build_square_torus(), &ExploreOptions::new(10).depth(0)).unwrap();
        assert_eq!(r.nodes.len(), 1);
        assert!(r.edges.is_empty());
        assert!(!r.frontier_exhausted);
    }

    #[test]
    fn budget_zero_rejected() {
        assert_eq!(
            explore_flip_graph(&build_square_torus(), &ExploreOptions::new(0)).unwrap_err(),
            FlipGraphError::BudgetZero
        );
    }

    #[test]
    fn square_depth_one_bidirected() {
        let r = explore_flip_graph(&build_square_torus(), &ExploreOptions::new(100).depth(2)).unwrap();
        let root_edges: Vec<_> = r.edges.iter().filter(|e| e.from == 0).collect();
        assert!(!root_edges.is_empty() && root_edges.len() <= 3);
        for e in root_edges {
            assert!(r
                .edges
                .iter()
                .any(|b| b.from == e.to && b.edge == e.inserted && b.to == 0));
        }
    }

    #[test]
    fn alpha_values() {
        let hex = alpha_lower_bound(&build_hex_torus(), 50).unwrap();
        assert!((hex.alpha_hat - PI / 3.0).abs() < 1e-12);
        assert!(hex.alpha_exact);
        assert_eq!(hex.witness, triangulation_key(&build_hex_torus()));
        let sq = alpha_lower_bound(&build_square_torus(), 200).unwrap();
        assert!((sq.alpha_hat - PI / 4.0).abs() < 1e-9);
        assert!(!sq.alpha_exact);
    }

    #[test]
    fn alpha_monotone_in_budget() {
        let s = build_star_sphere([PI / 2.0; 3], [1.0; 3], c(0.5, 0.75f64.sqrt())).unwrap();
        let mut last = 0.0;
        for b in [1, 5, 20, 80] {
            let a = alpha_lower_bound(&s, b).unwrap().alpha_hat;
            assert!(a >= last && a <= PI / 3.0 + 1e-12);
            last = a;
        }
    }

    #[test]
    fn parallel_matches_sequential() {
        let s = build_star_sphere([PI / 2.0, 0.8, 1.3], [2.0, 1.5, 1.0], c(0.4, 0.7)).unwrap();
        let a = explore_flip_graph(&s, &ExploreOptions::new(60)).unwrap();
        let b = explore_flip_graph(&s, &ExploreOptions::new(60).parallel(true)).unwrap();
        let ka: Vec<_> = a.nodes.iter().map(|n| n.key.clone()).collect();
        let kb: Vec<_> = b.nodes.iter().map(|n| n.key.clone()).collect();
        assert_eq!(ka, kb);
        assert_eq!(a.edges, b.edges);
    }

    #[test]
    fn star_sphere_nodes_have_four_faces() {
        let s = build_star_sphere([PI / 2.0; 3], [1.0; 3], c(0.45, 0.8)).unwrap();
        let r = explore_flip_graph(&s, &ExploreOptions::new(500)).unwrap();
        for n in &r.nodes {
            assert_eq!(n.surface.num_triangles(), 4);
            assert_eq!(n.surface.num_vertices(), 4);
        }
    }

    #[test]
    fn pruning_is_heuristic() {
        let s = build_square_torus();
        let r = explore_flip_graph(&s, &ExploreOptions::new(100).min_angle_floor(0.5)).unwrap();
        assert!(r.heuristic);
        assert!(r.nodes.iter().all(|n| n.min_angle >= 0.5));
    }

    #[test]
    fn reach_self_and_neighbor() {
        let s = build_square_torus();
        let e = flippable_edges(&s)[0];
        let n = flip(&s, e).unwrap().0;
        let r = verify_reachability(&s, &[s.clone(), n.clone()], 100).unwrap();
        assert_eq!(r[0], Reachability::Chain(vec![]));
        match &r[1] {
            Reachability::Chain(ch) => {
                assert!(ch.len() <= 1);
                assert_eq!(triangulation_key(&replay_chain(&s, ch).unwrap()), triangulation_key(&n));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn reach_far_target() {
        let s = build_star_sphere([PI / 2.0, 0.8, 1.3], [2.0, 1.5, 1.0], c(0.4, 0.7)).unwrap();
        let r = explore_flip_graph(&s, &ExploreOptions::new(40)).unwrap();
        let target = r.nodes.last().unwrap().surface.clone();
        let res = verify_reachability(&s, std::slice::from_ref(&target), 1000).unwrap();
        let Reachability::Chain(ch) = &res[0] else { panic!() };
        assert_eq!(ch.len(), r.nodes.last().unwrap().depth);
        assert_eq!(triangulation_key(&replay_chain(&s, ch).unwrap()), triangulation_key(&target));
    }

    #[test]
    fn incompatible_target_rejected() {
        let s = build_square_torus();
        assert_eq!(
            verify_reachability(&s, &[build_dilation_torus(1.0, 2.0).unwrap()], 10).unwrap_err(),
            FlipGraphError::IncompatibleTargets(0)
        );
    }

    #[test]
    fn alpha_cylinder_bound() {
        let s = build_dilation_torus(PI / 3.0, 2.0).unwrap();
        let a = alpha_lower_bound(&s, 200).unwrap();
        let cyl = crate::geodesics::detect_cylinders(&s, 4);
        let r = check_alpha_cylinder_bound(a.alpha_hat, &cyl);
        assert_eq!(r.checked, 1);
        assert!(r.passes());

        let sq = build_square_torus();
        let r = check_alpha_cylinder_bound(PI / 4.0, &crate::geodesics::detect_cylinders(&sq, 4));
        assert_eq!(r.checked, 0);
        assert!(r.passes());

        let s = build_dilation_torus(0.9 * PI, 2.0).unwrap();
        let a = alpha_lower_bound(&s, 200).unwrap();
        let cyl = crate::geodesics::detect_cylinders(&s, 4);
        assert!(cyl.iter().any(|c| (c.angle - 0.9 * PI).abs() < 1e-6));
        assert!(check_alpha_cylinder_bound(a.alpha_hat, &cyl).passes(), "{}", a.alpha_hat);
    }

    #[test]
    fn auxiliary_points_inside_cylinder_escape_bound() {
        // triangles with a vertex inside the cylinder need not cross it, so their angles are
        // not limited by π − β
        let aux = build_sectored_cylinder_torus(0.9 * PI, 2.0, 2).unwrap();
        let a = alpha_lower_bound(&aux, 200).unwrap();
        assert!(min_angle(&aux) > 0.1 * PI + 1e-3);
        let r = check_alpha_cylinder_bound(a.alpha_hat, &crate::geodesics::detect_cylinders(&aux, 4));
        assert_eq!(r.violations.len(), 1);
    }

    #[test]
    fn bound_flags_wide_cylinder() {
        let s = build_big_cylinder(1.2 * PI, 2.0, 3).unwrap();
        let r = check_alpha_cylinder_bound(0.1, &crate::geodesics::detect_cylinders(&s, 4));
        assert_eq!(r.violations.len(), 1);
    }
}
