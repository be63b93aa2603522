//! Example families and fixtures.

use crate::geometry::{cross, orient};
use crate::surface::{Corner, HalfEdge, Surface, SurfaceError, Triangle};
use num_complex::Complex64;
use std::collections::HashMap;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BuildError {
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("polygon is not simple and counter-clockwise")]
    NonSimplePolygon,
    #[error("bad side pairing: {0}")]
    BadPairing(String),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn he(t: usize, e: usize) -> HalfEdge {
    HalfEdge::new(t, e)
}

/// Torus `C / (uZ + vZ)` cut along `u`, `v` and `u + v`. Requires `u × v > 0`.
pub fn build_lattice_torus(u: Complex64, v: Complex64) -> Result<Surface, BuildError> {
    if cross(u, v) <= 0.0 {
        return Err(BuildError::BadParams("lattice basis must be positively oriented".into()));
    }
    let zero = c(0.0, 0.0);
    let tris = vec![Triangle::new(zero, u, u + v), Triangle::new(zero, u + v, v)];
    let glue = [(he(0, 0), he(1, 1)), (he(0, 1), he(1, 2)), (he(0, 2), he(1, 0))];
    Ok(Surface::build(tris, &glue, &[])?)
}

/// Unit square torus split along the diagonal `1 + i`.
pub fn build_square_torus() -> Surface {
    build_lattice_torus(c(1.0, 0.0), c(0.0, 1.0)).expect("square torus")
}

/// Torus tiled by two equilateral triangles.
pub fn build_hex_torus() -> Surface {
    let w = Complex64::from_polar(1.0, PI / 3.0);
    let tris = vec![
        Triangle::new(c(0.0, 0.0), c(1.0, 0.0), w),
        Triangle::new(c(1.0, 0.0), c(1.0, 0.0) + w, w),
    ];
    let glue = [(he(0, 0), he(1, 1)), (he(0, 1), he(1, 2)), (he(0, 2), he(1, 0))];
    Surface::build(tris, &glue, &[]).expect("hex torus")
}

/// Annulus sector of angle `theta` between radii 1 and `lambda`, cut into `sectors` chord
/// trapezoids. Radial sides of consecutive trapezoids are glued by rotation, the last to the
/// first, and each trapezoid's chords by the dilation. Vertices on the intermediate radial sides
/// are auxiliary; the vertex on the closing side is the marked point.
///
/// Triangle `2j` is `(r₀, r₁, r₁e^{iψ})` and `2j+1` is `(r₀, r₁e^{iψ}, r₀e^{iψ})` with
/// `ψ = theta / sectors`, `r₀ = min(1, λ)`, `r₁ = max(1, λ)`.
pub fn build_sectored_cylinder_torus(
    theta: f64,
    lambda: f64,
    sectors: usize,
) -> Result<Surface, BuildError> {
    if !(theta > 0.0 && theta.is_finite()) {
        return Err(BuildError::BadParams(format!("angle {theta} must be positive")));
    }
    if !(lambda > 0.0 && lambda.is_finite()) || (lambda - 1.0).abs() < 1e-12 {
        return Err(BuildError::BadParams(format!("dilation {lambda} must be positive and ≠ 1")));
    }
    if sectors == 0 {
        return Err(BuildError::BadParams("need at least one sector".into()));
    }
    let psi = theta / sectors as f64;
    if psi >= PI {
        return Err(BuildError::BadParams(format!(
            "sector angle {psi} must be below π; use more sectors"
        )));
    }
    let (r0, r1) = if lambda > 1.0 { (1.0, lambda) } else { (lambda, 1.0) };
    let rot = Complex64::from_polar(1.0, psi);
    let p = [c(r0, 0.0), c(r1, 0.0), rot * r1, rot * r0];
    let mut tris = Vec::with_capacity(2 * sectors);
    let mut glue = Vec::with_capacity(3 * sectors);
    for j in 0..sectors {
        let (a, b) = (2 * j, 2 * j + 1);
        tris.push(Triangle::new(p[0], p[1], p[2]));
        tris.push(Triangle::new(p[0], p[2], p[3]));
        glue.push((he(a, 2), he(b, 0)));
        glue.push((he(a, 1), he(b, 2)));
        let prev_b = 2 * ((j + sectors - 1) % sectors) + 1;
        glue.push((he(a, 0), he(prev_b, 1)));
    }
    let aux: Vec<Corner> = (1..sectors).map(|j| Corner::new(2 * j, 0)).collect();
    Ok(Surface::build(tris, &glue, &aux)?)
}

/// Trapezoid `1, λ, λe^{iθ}, e^{iθ}` with radial sides glued by rotation and chords by the
/// dilation: a torus with one marked point filled by a hyperbolic cylinder of angle `theta`.
pub fn build_dilation_torus(theta: f64, lambda: f64) -> Result<Surface, BuildError> {
    if !(theta > 0.0 && theta < PI) {
        return Err(BuildError::BadParams(format!("angle {theta} must lie in (0, π)")));
    }
    build_sectored_cylinder_torus(theta, lambda, 1)
}

/// Hyperbolic cylinder of angle `theta ≥ π` on a torus, as `sectors` trapezoids with one
/// auxiliary marked point per intermediate closed geodesic.
pub fn build_big_cylinder(theta: f64, lambda: f64, sectors: usize) -> Result<Surface, BuildError> {
    if !(theta >= PI) {
        return Err(BuildError::BadParams(format!("angle {theta} must be at least π")));
    }
    build_sectored_cylinder_torus(theta, lambda, sectors)
}

/// Sphere with four cone points: central triangle `(0, 1, z)` with a self-folded triangle glued
/// along each side. Self-folded triangle `i` is `(A, B, B')` with angle `θᵢ` at `A` and
/// `|AB'| = λᵢ|AB|`, its sides `[A,B]` and `[A,B']` glued by the similarity fixing `A`.
pub fn build_star_sphere(
    angles: [f64; 3],
    dilations: [f64; 3],
    center: Complex64,
) -> Result<Surface, BuildError> {
    for &t in &angles {
        if !(t > 0.0 && t < PI) {
            return Err(BuildError::BadParams(format!("cone angle {t} must lie in (0, π)")));
        }
    }
    if 4.0 * PI - angles.iter().sum::<f64>() <= PI {
        return Err(BuildError::BadParams("fourth cone angle must exceed π".into()));
    }
    for &l in &dilations {
        if !(l > 0.0 && l.is_finite()) {
            return Err(BuildError::BadParams(format!("dilation {l} must be positive")));
        }
    }
    if !(center.im > 0.0) {
        return Err(BuildError::BadParams("central shape needs positive imaginary part".into()));
    }
    let mut tris = vec![Triangle::new(c(0.0, 0.0), c(1.0, 0.0), center)];
    let mut glue = Vec::new();
    for i in 0..3 {
        let t = i + 1;
        tris.push(Triangle::new(
            c(0.0, 0.0),
            c(1.0, 0.0),
            Complex64::from_polar(dilations[i], angles[i]),
        ));
        glue.push((he(t, 0), he(t, 2)));
        glue.push((he(0, i), he(t, 1)));
    }
    Ok(Surface::build(tris, &glue, &[])?)
}

/// Genus-2 surface made of two hexagonal hyperbolic cylinders of angle `theta` with dilations
/// `lambdas`, each radial side carrying a midpoint marked point, boundaries glued crosswise.
pub fn build_two_cylinder_surface(theta: f64, lambdas: [f64; 2]) -> Result<Surface, BuildError> {
    if !(theta > 0.0 && theta < PI) {
        return Err(BuildError::BadParams(format!("angle {theta} must lie in (0, π)")));
    }
    let mut tris = Vec::new();
    let mut glue = Vec::new();
    for (k, &lambda) in lambdas.iter().enumerate() {
        if !(lambda > 1.0 && lambda.is_finite()) {
            return Err(BuildError::BadParams(format!("dilation {lambda} must exceed 1")));
        }
        let rot = Complex64::from_polar(1.0, theta);
        let m = lambda.sqrt();
        let p = [c(1.0, 0.0), c(m, 0.0), c(lambda, 0.0), rot * lambda, rot * m, rot];
        let o = 4 * k;
        tris.push(Triangle::new(p[0], p[1], p[5]));
        tris.push(Triangle::new(p[1], p[4], p[5]));
        tris.push(Triangle::new(p[1], p[2], p[3]));
        tris.push(Triangle::new(p[1], p[3], p[4]));
        glue.push((he(o, 1), he(o + 1, 2)));
        glue.push((he(o + 1, 0), he(o + 3, 2)));
        glue.push((he(o + 2, 2), he(o + 3, 0)));
        glue.push((he(o, 2), he(o + 2, 1)));
    }
    // boundary segments: bottom (A e0, C e0), top (D e1, B e1) per cylinder
    let (a1, b1, c1, d1) = (he(0, 0), he(2, 0), he(3, 1), he(1, 1));
    let (a2, b2, c2, d2) = (he(4, 0), he(6, 0), he(7, 1), he(5, 1));
    glue.extend([(a1, a2), (b1, c2), (c1, b2), (d1, d2)]);
    Ok(Surface::build(tris, &glue, &[])?)
}

/// Triangulates a simple counter-clockwise polygon by ear clipping and glues sides according to
/// `pairing`; side `i` runs from vertex `i` to vertex `i + 1`.
pub fn build_from_polygon(
    vertices: &[Complex64],
    pairing: &[(usize, usize)],
) -> Result<Surface, BuildError> {
    let n = vertices.len();
    if n < 3 || !is_simple_ccw(vertices) {
        return Err(BuildError::NonSimplePolygon);
    }
    let mut side_used = vec![false; n];
    for &(i, j) in pairing {
        if i >= n || j >= n || i == j {
            return Err(BuildError::BadPairing(format!("invalid pair ({i}, {j})")));
        }
        for s in [i, j] {
            if side_used[s] {
                return Err(BuildError::BadPairing(format!("side {s} paired twice")));
            }
            side_used[s] = true;
        }
    }
    if let Some(s) = side_used.iter().position(|u| !u) {
        return Err(BuildError::BadPairing(format!("side {s} is unpaired")));
    }

    let ears = ear_clip(vertices).ok_or(BuildError::NonSimplePolygon)?;
    let mut tris = Vec::new();
    let mut directed: HashMap<(usize, usize), HalfEdge> = HashMap::new();
    for (t, &[i, j, k]) in ears.iter().enumerate() {
        tris.push(Triangle::new(vertices[i], vertices[j], vertices[k]));
        for (e, (a, b)) in [(i, j), (j, k), (k, i)].into_iter().enumerate() {
            directed.insert((a, b), he(t, e));
        }
    }
    let mut glue = Vec::new();
    let mut keys: Vec<_> = directed.keys().copied().collect();
    keys.sort_unstable();
    for (a, b) in keys {
        if a < b {
            if let Some(&h) = directed.get(&(b, a)) {
                glue.push((directed[&(a, b)], h));
            }
        }
    }
    let side = |s: usize| directed[&(s, (s + 1) % n)];
    for &(i, j) in pairing {
        glue.push((side(i), side(j)));
    }
    Ok(Surface::build(tris, &glue, &[])?)
}

fn signed_area(v: &[Complex64]) -> f64 {
    (0..v.len()).map(|i| cross(v[i], v[(i + 1) % v.len()])).sum::<f64>() / 2.0
}

fn segments_cross(p1: Complex64, p2: Complex64, q1: Complex64, q2: Complex64) -> bool {
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    (d1 * d2 <= 0.0) && (d3 * d4 <= 0.0)
}

fn is_simple_ccw(v: &[Complex64]) -> bool {
    let n = v.len();
    if signed_area(v) <= 0.0 {
        return false;
    }
    for i in 0..n {
        for j in i + 1..n {
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if adjacent {
                continue;
            }
            if segments_cross(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n]) {
                return false;
            }
        }
    }
    true
}

fn ear_clip(v: &[Complex64]) -> Option<Vec<[usize; 3]>> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    let mut out = Vec::new();
    while idx.len() > 3 {
        let m = idx.len();
        let ear = (0..m).find(|&k| {
            let (a, b, cc) = (idx[(k + m - 1) % m], idx[k], idx[(k + 1) % m]);
            let scale = (v[a] - v[b]).norm_sqr().max((v[cc] - v[b]).norm_sqr());
            if orient(v[a], v[b], v[cc]) <= 1e-12 * scale {
                return false;
            }
            idx.iter().all(|&q| {
                q == a
                    || q == b
                    || q == cc
                    || !(orient(v[a], v[b], v[q]) >= 0.0
                        && orient(v[b], v[cc], v[q]) >= 0.0
                        && orient(v[cc], v[a], v[q]) >= 0.0)
            })
        })?;
        let (a, b, cc) = (idx[(ear + m - 1) % m], idx[ear], idx[(ear + 1) % m]);
        out.push([a, b, cc]);
        idx.remove(ear);
    }
    out.push([idx[0], idx[1], idx[2]]);
    Some(out)
}

/// A parameterized family member.
#[derive(Clone, Debug, PartialEq)]
pub enum Family {
    SquareTorus,
    HexTorus,
    DilationTorus { theta: f64, lambda: f64 },
    StarSphere { angles: [f64; 3], dilations: [f64; 3], center: Complex64 },
    BigCylinder { theta: f64, lambda: f64, sectors: usize },
    SectoredTorus { theta: f64, lambda: f64, sectors: usize },
    TwoCylinder { theta: f64, lambdas: [f64; 2] },
}

impl Family {
    pub fn build(&self) -> Result<Surface, BuildError> {
        match *self {
            Family::SquareTorus => Ok(build_square_torus()),
            Family::HexTorus => Ok(build_hex_torus()),
            Family::DilationTorus { theta, lambda } => build_dilation_torus(theta, lambda),
            Family::StarSphere { angles, dilations, center } => {
                build_star_sphere(angles, dilations, center)
            }
            Family::BigCylinder { theta, lambda, sectors } => {
                build_big_cylinder(theta, lambda, sectors)
            }
            Family::SectoredTorus { theta, lambda, sectors } => {
                build_sectored_cylinder_torus(theta, lambda, sectors)
            }
            Family::TwoCylinder { theta, lambdas } => build_two_cylinder_surface(theta, lambdas),
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            Family::SquareTorus => "square_torus",
            Family::HexTorus => "hex_torus",
            Family::DilationTorus { .. } => "dilation_torus",
            Family::StarSphere { .. } => "star_sphere",
            Family::BigCylinder { .. } => "big_cylinder",
            Family::SectoredTorus { .. } => "sectored_torus",
            Family::TwoCylinder { .. } => "two_cylinder",
        }
    }
}
