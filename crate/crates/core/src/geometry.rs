//! Planar predicates on `Complex64` points.

use num_complex::Complex64;

/// Absolute tolerance used for comparisons of derived reals.
pub const TOL: f64 = 1e-9;

/// Minimum triangle area relative to the squared diameter.
pub const EPS_AREA: f64 = 1e-12;

/// z-component of the cross product `u × v`; positive when `v` is counter-clockwise from `u`.
#[inline]
pub fn cross(u: Complex64, v: Complex64) -> f64 {
    u.re * v.im - u.im * v.re
}

#[inline]
pub fn dot(u: Complex64, v: Complex64) -> f64 {
    u.re * v.re + u.im * v.im
}

/// Twice the signed area of `abc`.
#[inline]
pub fn orient(a: Complex64, b: Complex64, c: Complex64) -> f64 {
    cross(b - a, c - a)
}

pub fn diameter(points: &[Complex64]) -> f64 {
    let mut d: f64 = 0.0;
    for (i, p) in points.iter().enumerate() {
        for q in &points[i + 1..] {
            d = d.max((p - q).norm());
        }
    }
    d
}

/// Interior angle at `apex` of the positively oriented triangle `apex, next, prev`.
#[inline]
pub fn corner_angle(apex: Complex64, next: Complex64, prev: Complex64) -> f64 {
    ((prev - apex) / (next - apex)).arg().abs()
}

/// Reduces an angle to `(-π, π]`.
pub fn wrap_pi(mut x: f64) -> f64 {
    use std::f64::consts::PI;
    x %= 2.0 * PI;
    if x > PI {
        x -= 2.0 * PI;
    } else if x <= -PI {
        x += 2.0 * PI;
    }
    x
}

/// Distance between `x` and `y` on the circle `R / 2πZ`.
pub fn angle_distance(x: f64, y: f64) -> f64 {
    wrap_pi(x - y).abs()
}

/// Whether `p` lies inside the closed triangle `abc` (positively oriented), with slack `eps`
/// measured in units of twice the area.
pub fn contains(tri: &[Complex64; 3], p: Complex64, eps: f64) -> bool {
    let [a, b, c] = *tri;
    orient(a, b, p) >= -eps && orient(b, c, p) >= -eps && orient(c, a, p) >= -eps
}

/// Barycentric coordinates of `p` with respect to `abc`.
pub fn barycentric(tri: &[Complex64; 3], p: Complex64) -> [f64; 3] {
    let [a, b, c] = *tri;
    let area = orient(a, b, c);
    [
        orient(b, c, p) / area,
        orient(c, a, p) / area,
        orient(a, b, p) / area,
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn right_isoceles_corners() {
        let a = Complex64::new(0.0, 0.0);
        let b = Complex64::new(1.0, 0.0);
        let c = Complex64::new(1.0, 1.0);
        assert!((corner_angle(a, b, c) - PI / 4.0).abs() < 1e-15);
        assert!((corner_angle(b, c, a) - PI / 2.0).abs() < 1e-15);
        assert!(orient(a, b, c) > 0.0);
    }

    #[test]
    fn wrapping() {
        assert!((wrap_pi(3.0 * PI) - PI).abs() < 1e-12);
        assert!((wrap_pi(-3.5 * PI) - 0.5 * PI).abs() < 1e-12);
        assert!(angle_distance(0.1, 2.0 * PI - 0.1) < 0.2 + 1e-12);
    }
}
