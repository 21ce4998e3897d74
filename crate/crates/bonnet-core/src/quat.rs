//! Quaternion algebra ℍ = span{1, i, j, k} and 3-vectors, tuned for surface
//! work in the imaginary part Im ℍ = span{i, j, k}.
//!
//! Conventions used throughout the crate:
//!
//! * Hamilton product with i j = k, j k = i, k i = j.
//! * ℝ³ is identified with Im ℍ; for imaginary X, Y the product splits as
//!   X Y = −⟨X, Y⟩ + X × Y.
//! * ℂ is embedded as the subalgebra span{1, i}; a complex number
//!   z = x + iy acts on j and k from the left by z j = x j + y k and
//!   z k = x k − y j (equivalently j z̄ = z j).
//!
//! Frames act by conjugation: a unit quaternion Φ moves the vector X to
//! Φ⁻¹ X Φ, a rotation of Im ℍ. Everything here is plain `f64` component
//! arithmetic; no unit-norm invariant is imposed by the types because the
//! construction genuinely needs non-unit products (metric factors, Möbius
//! conjugations ( ±ε−f ) X ( ±ε+f ), …).

use num_complex::Complex64;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

/// Vector in ℝ³, identified with the imaginary quaternions span{i, j, k}.
#[derive(Debug, Clone, Copy, PartialEq, Default, serde::Serialize, serde::Deserialize)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3 { x: 0.0, y: 0.0, z: 0.0 };

    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    /// Euclidean inner product ⟨self, other⟩.
    pub fn dot(self, other: Vec3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    /// Cross product self × other (right-handed, matches i × j = k).
    pub fn cross(self, other: Vec3) -> Vec3 {
        Vec3 {
            x: self.y * other.z - self.z * other.y,
            y: self.z * other.x - self.x * other.z,
            z: self.x * other.y - self.y * other.x,
        }
    }

    pub fn norm_sqr(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Unit vector in the same direction; `None` for (numerically) zero input.
    pub fn normalized(self) -> Option<Vec3> {
        let n = self.norm();
        if n > 0.0 && n.is_finite() {
            Some(self / n)
        } else {
            None
        }
    }

    /// The purely imaginary quaternion x i + y j + z k.
    pub fn as_quat(self) -> Quat {
        Quat { a: 0.0, b: self.x, c: self.y, d: self.z }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Vec3 {
    fn add_assign(&mut self, o: Vec3) {
        *self = *self + o;
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl SubAssign for Vec3 {
    fn sub_assign(&mut self, o: Vec3) {
        *self = *self - o;
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Div<f64> for Vec3 {
    type Output = Vec3;
    fn div(self, s: f64) -> Vec3 {
        Vec3::new(self.x / s, self.y / s, self.z / s)
    }
}

/// Quaternion a + b i + c j + d k.
#[derive(Debug, Clone, Copy, PartialEq, Default, serde::Serialize, serde::Deserialize)]
pub struct Quat {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Quat {
    pub const ZERO: Quat = Quat { a: 0.0, b: 0.0, c: 0.0, d: 0.0 };
    pub const ONE: Quat = Quat { a: 1.0, b: 0.0, c: 0.0, d: 0.0 };
    pub const I: Quat = Quat { a: 0.0, b: 1.0, c: 0.0, d: 0.0 };
    pub const J: Quat = Quat { a: 0.0, b: 0.0, c: 1.0, d: 0.0 };
    pub const K: Quat = Quat { a: 0.0, b: 0.0, c: 0.0, d: 1.0 };

    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Quat { a, b, c, d }
    }

    pub fn from_scalar(a: f64) -> Self {
        Quat { a, b: 0.0, c: 0.0, d: 0.0 }
    }

    /// Embed z = x + iy as the quaternion x + y i ∈ span{1, i}.
    pub fn from_complex(z: Complex64) -> Self {
        Quat { a: z.re, b: z.im, c: 0.0, d: 0.0 }
    }

    /// The product z·j for complex z = x + iy, i.e. x j + y k.
    ///
    /// A planar curve γ(u, w) ∈ ℂ becomes the space curve γ·j in the
    /// {j, k}-plane; this is the embedding used by the immersion formulas.
    pub fn complex_j(z: Complex64) -> Self {
        Quat { a: 0.0, b: 0.0, c: z.re, d: z.im }
    }

    /// The product z·k for complex z = x + iy, i.e. −y j + x k.
    pub fn complex_k(z: Complex64) -> Self {
        Quat { a: 0.0, b: 0.0, c: -z.im, d: z.re }
    }

    /// Scalar (real) part.
    pub fn re(self) -> f64 {
        self.a
    }

    /// Imaginary part as a vector in ℝ³.
    pub fn im_h(self) -> Vec3 {
        Vec3 { x: self.b, y: self.c, z: self.d }
    }

    /// Quaternionic conjugate a − b i − c j − d k.
    pub fn conjugate(self) -> Self {
        Quat { a: self.a, b: -self.b, c: -self.c, d: -self.d }
    }

    pub fn norm_sqr(self) -> f64 {
        self.a * self.a + self.b * self.b + self.c * self.c + self.d * self.d
    }

    pub fn norm(self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Multiplicative inverse q̄ / |q|²; caller must not pass (numerically)
    /// zero quaternions.
    pub fn inverse(self) -> Self {
        let n2 = self.norm_sqr();
        debug_assert!(n2 > 0.0, "inverse of zero quaternion");
        self.conjugate() * (1.0 / n2)
    }

    /// Rescale to unit norm; used by the frame integrator to hold the
    /// |Φ| = 1 invariant against integration drift.
    pub fn normalized(self) -> Self {
        self * (1.0 / self.norm())
    }

    /// Conjugation g⁻¹ · self · g.
    ///
    /// For unit g this is the rotation of Im ℍ carrying frame-coordinates to
    /// space-coordinates; for non-unit g it additionally scales by |g|²…
    /// which is exactly the Möbius-type transformation the pair formulas
    /// need, so no unit-norm check is imposed here.
    pub fn conj_by(self, g: Quat) -> Self {
        g.inverse() * self * g
    }

    /// Rotate a vector by the unit quaternion `self`: x ↦ self⁻¹ x self.
    pub fn rotate(self, x: Vec3) -> Vec3 {
        x.as_quat().conj_by(self).im_h()
    }

    /// Integer power by repeated multiplication (monodromy M^k; |k| is tiny).
    pub fn powi(self, k: i32) -> Self {
        let base = if k >= 0 { self } else { self.inverse() };
        let mut out = Quat::ONE;
        for _ in 0..k.unsigned_abs() {
            out = out * base;
        }
        out
    }

    pub fn is_finite(self) -> bool {
        self.a.is_finite() && self.b.is_finite() && self.c.is_finite() && self.d.is_finite()
    }
}

impl Add for Quat {
    type Output = Quat;
    fn add(self, o: Quat) -> Quat {
        Quat::new(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)
    }
}

impl AddAssign for Quat {
    fn add_assign(&mut self, o: Quat) {
        *self = *self + o;
    }
}

impl Sub for Quat {
    type Output = Quat;
    fn sub(self, o: Quat) -> Quat {
        Quat::new(self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d)
    }
}

impl Neg for Quat {
    type Output = Quat;
    fn neg(self) -> Quat {
        Quat::new(-self.a, -self.b, -self.c, -self.d)
    }
}

impl Mul<f64> for Quat {
    type Output = Quat;
    fn mul(self, s: f64) -> Quat {
        Quat::new(self.a * s, self.b * s, self.c * s, self.d * s)
    }
}

impl Mul for Quat {
    type Output = Quat;
    /// Hamilton product (i j = k and cyclic).
    fn mul(self, o: Quat) -> Quat {
        Quat {
            a: self.a * o.a - self.b * o.b - self.c * o.c - self.d * o.d,
            b: self.a * o.b + self.b * o.a + self.c * o.d - self.d * o.c,
            c: self.a * o.c - self.b * o.d + self.c * o.a + self.d * o.b,
            d: self.a * o.d + self.b * o.c - self.c * o.b + self.d * o.a,
        }
    }
}

/// Imaginary part of a quaternion as a vector (free-function form for
/// call sites that read better without method syntax).
pub fn im_h(q: Quat) -> Vec3 {
    q.im_h()
}

/// Imaginary part of a complex number.
pub fn im_c(z: Complex64) -> f64 {
    z.im
}
