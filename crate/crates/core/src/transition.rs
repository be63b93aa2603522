use num_complex::Complex64;
use std::fmt;

/// Complex-affine map `z ↦ a·z + b`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Transition {
    pub a: Complex64,
    pub b: Complex64,
}

impl Transition {
    pub const IDENTITY: Transition = Transition {
        a: Complex64 { re: 1.0, im: 0.0 },
        b: Complex64 { re: 0.0, im: 0.0 },
    };

    pub fn new(a: Complex64, b: Complex64) -> Self {
        debug_assert!(a.norm_sqr() > 0.0, "affine derivative must be nonzero");
        Transition { a, b }
    }

    pub fn translation(b: Complex64) -> Self {
        Transition::new(Complex64::new(1.0, 0.0), b)
    }

    /// The unique map sending `p0 ↦ q0` and `p1 ↦ q1`. Requires `p0 ≠ p1`.
    pub fn two_point(p0: Complex64, p1: Complex64, q0: Complex64, q1: Complex64) -> Self {
        let a = (q1 - q0) / (p1 - p0);
        Transition::new(a, q0 - a * p0)
    }

    #[inline]
    pub fn apply(&self, z: Complex64) -> Complex64 {
        self.a * z + self.b
    }

    /// Applies only the linear part (for direction vectors).
    #[inline]
    pub fn apply_vector(&self, v: Complex64) -> Complex64 {
        self.a * v
    }

    /// `self ∘ inner`.
    #[inline]
    pub fn compose(&self, inner: &Transition) -> Transition {
        Transition {
            a: self.a * inner.a,
            b: self.a * inner.b + self.b,
        }
    }

    #[inline]
    pub fn inverse(&self) -> Transition {
        let ai = self.a.inv();
        Transition { a: ai, b: -ai * self.b }
    }

    /// Largest coefficient distance to `other`.
    pub fn distance(&self, other: &Transition) -> f64 {
        (self.a - other.a).norm().max((self.b - other.b).norm())
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        self.distance(&Transition::IDENTITY) <= tol
    }

    /// Fixed point `b / (1 − a)`, if `a ≠ 1`.
    pub fn fixed_point(&self) -> Option<Complex64> {
        let d = Complex64::new(1.0, 0.0) - self.a;
        (d.norm() > 1e-14).then(|| self.b / d)
    }
}

impl Default for Transition {
    fn default() -> Self {
        Transition::IDENTITY
    }
}

impl fmt::Display for Transition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "z -> ({} {:+}i)z + ({} {:+}i)",
            self.a.re, self.a.im, self.b.re, self.b.im
        )
    }
}
