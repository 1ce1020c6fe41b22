//! Complex quaternions H(C).
//!
//! A [`Biquaternion`] is `a = a0 + a1 i1 + a2 i2 + a3 i3` with complex
//! components. The complex unit `i` commutes with every `i_k`, so the
//! algebra is the complexification of Hamilton's quaternions and contains
//! zero divisors, e.g. `(1 + i i1)(1 - i i1) = 0`.

use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;

use crate::vec3::{self, CVec3};

const C0: Complex64 = Complex64::new(0.0, 0.0);
const C1: Complex64 = Complex64::new(1.0, 0.0);

/// `(sign, index)` of the basis product `i_row * i_col`.
const TABLE: [[(f64, usize); 4]; 4] = [
    [(1.0, 0), (1.0, 1), (1.0, 2), (1.0, 3)],
    [(1.0, 1), (-1.0, 0), (1.0, 3), (-1.0, 2)],
    [(1.0, 2), (-1.0, 3), (-1.0, 0), (1.0, 1)],
    [(1.0, 3), (1.0, 2), (-1.0, 1), (-1.0, 0)],
];

/// A complex quaternion `s + v1 i1 + v2 i2 + v3 i3`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Biquaternion {
    /// Scalar part `Sc(a)`.
    pub s: Complex64,
    /// Vector part `Vec(a)`.
    pub v: CVec3,
}

impl Biquaternion {
    pub const ZERO: Self = Self { s: C0, v: [C0; 3] };
    /// The unit `i0`.
    pub const ONE: Self = Self { s: C1, v: [C0; 3] };
    pub const I1: Self = Self { s: C0, v: [C1, C0, C0] };
    pub const I2: Self = Self { s: C0, v: [C0, C1, C0] };
    pub const I3: Self = Self { s: C0, v: [C0, C0, C1] };

    pub const fn new(s: Complex64, v: CVec3) -> Self {
        Self { s, v }
    }

    pub fn scalar(s: impl Into<Complex64>) -> Self {
        Self { s: s.into(), v: [C0; 3] }
    }

    pub fn vector(v: CVec3) -> Self {
        Self { s: C0, v }
    }

    /// Real vector `x1 i1 + x2 i2 + x3 i3`.
    pub fn from_real_vector(x: [f64; 3]) -> Self {
        Self::vector(vec3::to_complex(x))
    }

    /// The basis element `i_k`, `k = 0..=3`.
    pub fn basis(k: usize) -> Self {
        let mut c = [C0; 4];
        c[k] = C1;
        Self::from_components(c)
    }

    pub fn from_components(c: [Complex64; 4]) -> Self {
        Self { s: c[0], v: [c[1], c[2], c[3]] }
    }

    pub fn components(&self) -> [Complex64; 4] {
        [self.s, self.v[0], self.v[1], self.v[2]]
    }

    pub fn sc(&self) -> Complex64 {
        self.s
    }

    /// Vector part as a purely vectorial biquaternion.
    pub fn vec(&self) -> Self {
        Self::vector(self.v)
    }

    /// Quaternionic conjugation `C_H a = a0 - a⃗`.
    pub fn quat_conj(&self) -> Self {
        Self { s: self.s, v: [-self.v[0], -self.v[1], -self.v[2]] }
    }

    /// Complex conjugation `i -> -i` of every component.
    pub fn complex_conj(&self) -> Self {
        Self { s: self.s.conj(), v: [self.v[0].conj(), self.v[1].conj(), self.v[2].conj()] }
    }

    pub fn is_purely_vectorial(&self) -> bool {
        self.s == C0
    }

    /// Largest modulus over the four complex components.
    pub fn max_abs(&self) -> f64 {
        self.components().iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.components().iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Matrix `L` with `components(self * b) = L * components(b)`.
    pub fn left_matrix(&self) -> [[Complex64; 4]; 4] {
        let [k0, k1, k2, k3] = self.components();
        [
            [k0, -k1, -k2, -k3],
            [k1, k0, -k3, k2],
            [k2, k3, k0, -k1],
            [k3, -k2, k1, k0],
        ]
    }

    /// Matrix `R` with `components(b * self) = R * components(b)`.
    pub fn right_matrix(&self) -> [[Complex64; 4]; 4] {
        let [k0, k1, k2, k3] = self.components();
        [
            [k0, -k1, -k2, -k3],
            [k1, k0, k3, -k2],
            [k2, -k3, k0, k1],
            [k3, k2, -k1, k0],
        ]
    }
}

/// Quaternionic product from the multiplication table of `i0..i3`.
pub fn mul(a: &Biquaternion, b: &Biquaternion) -> Biquaternion {
    let ac = a.components();
    let bc = b.components();
    let mut out = [C0; 4];
    for (r, ar) in ac.iter().enumerate() {
        for (c, bc) in bc.iter().enumerate() {
            let (sign, k) = TABLE[r][c];
            out[k] += ar * bc * sign;
        }
    }
    Biquaternion::from_components(out)
}

/// The same product through `Sc(ab) = a0 b0 - <a,b>`, `Vec(ab) = a0 b + b0 a + a × b`.
pub fn product_from_parts(a: &Biquaternion, b: &Biquaternion) -> Biquaternion {
    let s = a.s * b.s - dot(a, b);
    let v = vec3::cadd(
        vec3::cadd(vec3::cscale(b.v, a.s), vec3::cscale(a.v, b.s)),
        cross(a, b),
    );
    Biquaternion { s, v }
}

pub fn quat_conj(a: &Biquaternion) -> Biquaternion {
    a.quat_conj()
}

pub fn complex_conj(a: &Biquaternion) -> Biquaternion {
    a.complex_conj()
}

pub fn sc(a: &Biquaternion) -> Complex64 {
    a.s
}

pub fn vec(a: &Biquaternion) -> Biquaternion {
    a.vec()
}

/// Euclidean bilinear product of the vector parts.
pub fn dot(a: &Biquaternion, b: &Biquaternion) -> Complex64 {
    vec3::cdot(a.v, b.v)
}

/// Cross product of the vector parts.
pub fn cross(a: &Biquaternion, b: &Biquaternion) -> CVec3 {
    vec3::ccross(a.v, b.v)
}

impl Mul for Biquaternion {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        mul(&self, &rhs)
    }
}

impl Mul<Complex64> for Biquaternion {
    type Output = Self;
    fn mul(self, rhs: Complex64) -> Self {
        Self { s: self.s * rhs, v: vec3::cscale(self.v, rhs) }
    }
}

impl Mul<Biquaternion> for Complex64 {
    type Output = Biquaternion;
    fn mul(self, rhs: Biquaternion) -> Biquaternion {
        rhs * self
    }
}

impl Mul<f64> for Biquaternion {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        self * Complex64::new(rhs, 0.0)
    }
}

impl Div<Complex64> for Biquaternion {
    type Output = Self;
    fn div(self, rhs: Complex64) -> Self {
        self * (C1 / rhs)
    }
}

impl Div<f64> for Biquaternion {
    type Output = Self;
    fn div(self, rhs: f64) -> Self {
        self * (1.0 / rhs)
    }
}

impl Add for Biquaternion {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self { s: self.s + rhs.s, v: vec3::cadd(self.v, rhs.v) }
    }
}

impl Sub for Biquaternion {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self { s: self.s - rhs.s, v: vec3::csub(self.v, rhs.v) }
    }
}

impl Neg for Biquaternion {
    type Output = Self;
    fn neg(self) -> Self {
        Self { s: -self.s, v: [-self.v[0], -self.v[1], -self.v[2]] }
    }
}

impl AddAssign for Biquaternion {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl SubAssign for Biquaternion {
    fn sub_assign(&mut self, rhs: Self) {
        *self = *self - rhs;
    }
}

impl Sum for Biquaternion {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::ZERO, Add::add)
    }
}

impl From<Complex64> for Biquaternion {
    fn from(s: Complex64) -> Self {
        Self::scalar(s)
    }
}
