//! Clifford algebra Cl(3,0) kernel: multivectors, the geometric product,
//! duality, unit quaternions, and spin/detector bivectors.
//!
//! The basis is fixed once and for all as
//! `{1, e_x, e_y, e_z, e_x^e_y, e_y^e_z, e_z^e_x, I}` with the pseudoscalar
//! `I = e_x^e_y^e_z`, `I^2 = -1`. Every product in the crate is derived from
//! the single Cayley table over this convention.

use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

/// Blade indices into [`Multivector3::coeffs`].
pub mod blade {
    pub const SCALAR: usize = 0;
    pub const EX: usize = 1;
    pub const EY: usize = 2;
    pub const EZ: usize = 3;
    pub const EXY: usize = 4;
    pub const EYZ: usize = 5;
    pub const EZX: usize = 6;
    pub const PSEUDO: usize = 7;
}

#[derive(Debug, Error, PartialEq)]
pub enum GaError {
    #[error("cannot normalize a vector with near-zero length (|v| = {norm:e})")]
    DegenerateVector { norm: f64 },
    #[error("non-finite component in vector ({x}, {y}, {z})")]
    NonFinite { x: f64, y: f64, z: f64 },
}

/// Cayley table for the geometric product: `E_i * E_j = sign * E_k`,
/// basis order `[1, e_x, e_y, e_z, e_xy, e_yz, e_zx, I]`.
///
/// Derived by blade reduction from `e_i e_i = +1` and anticommutation;
/// associativity and the duality relation are enforced by the test suite.
#[rustfmt::skip]
const CAYLEY: [[(f64, usize); 8]; 8] = [
    // 1
    [(1.0, 0), (1.0, 1), (1.0, 2), (1.0, 3), (1.0, 4), (1.0, 5), (1.0, 6), (1.0, 7)],
    // e_x
    [(1.0, 1), (1.0, 0), (1.0, 4), (-1.0, 6), (1.0, 2), (1.0, 7), (-1.0, 3), (1.0, 5)],
    // e_y
    [(1.0, 2), (-1.0, 4), (1.0, 0), (1.0, 5), (-1.0, 1), (1.0, 3), (1.0, 7), (1.0, 6)],
    // e_z
    [(1.0, 3), (1.0, 6), (-1.0, 5), (1.0, 0), (1.0, 7), (-1.0, 2), (1.0, 1), (1.0, 4)],
    // e_xy
    [(1.0, 4), (-1.0, 2), (1.0, 1), (1.0, 7), (-1.0, 0), (-1.0, 6), (1.0, 5), (-1.0, 3)],
    // e_yz
    [(1.0, 5), (1.0, 7), (-1.0, 3), (1.0, 2), (1.0, 6), (-1.0, 0), (-1.0, 4), (-1.0, 1)],
    // e_zx
    [(1.0, 6), (1.0, 3), (1.0, 7), (-1.0, 1), (-1.0, 5), (1.0, 4), (-1.0, 0), (-1.0, 2)],
    // I
    [(1.0, 7), (1.0, 5), (1.0, 6), (1.0, 4), (-1.0, 3), (-1.0, 1), (-1.0, 2), (-1.0, 0)],
];

/// An element of the eight-dimensional real Clifford algebra Cl(3,0).
///
/// Coefficients are indexed by the [`blade`] constants.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Multivector3 {
    pub coeffs: [f64; 8],
}

impl Multivector3 {
    pub const ZERO: Self = Self { coeffs: [0.0; 8] };

    pub fn scalar(value: f64) -> Self {
        let mut coeffs = [0.0; 8];
        coeffs[blade::SCALAR] = value;
        Self { coeffs }
    }

    pub fn vector(x: f64, y: f64, z: f64) -> Self {
        let mut coeffs = [0.0; 8];
        coeffs[blade::EX] = x;
        coeffs[blade::EY] = y;
        coeffs[blade::EZ] = z;
        Self { coeffs }
    }

    /// Bivector from coefficients on `(e_y^e_z, e_z^e_x, e_x^e_y)`.
    ///
    /// This ordering makes `Multivector3::bivector(v.x, v.y, v.z) == I * v`
    /// for a vector `v`, i.e. the bivector dual to `v`.
    pub fn bivector(yz: f64, zx: f64, xy: f64) -> Self {
        let mut coeffs = [0.0; 8];
        coeffs[blade::EYZ] = yz;
        coeffs[blade::EZX] = zx;
        coeffs[blade::EXY] = xy;
        Self { coeffs }
    }

    pub fn pseudoscalar(value: f64) -> Self {
        let mut coeffs = [0.0; 8];
        coeffs[blade::PSEUDO] = value;
        Self { coeffs }
    }

    pub fn scalar_part(&self) -> f64 {
        self.coeffs[blade::SCALAR]
    }

    pub fn vector_part(&self) -> [f64; 3] {
        [
            self.coeffs[blade::EX],
            self.coeffs[blade::EY],
            self.coeffs[blade::EZ],
        ]
    }

    /// Bivector coefficients in `(e_y^e_z, e_z^e_x, e_x^e_y)` order.
    pub fn bivector_part(&self) -> [f64; 3] {
        [
            self.coeffs[blade::EYZ],
            self.coeffs[blade::EZX],
            self.coeffs[blade::EXY],
        ]
    }

    pub fn pseudoscalar_part(&self) -> f64 {
        self.coeffs[blade::PSEUDO]
    }

    /// Full Cl(3,0) geometric product.
    pub fn geometric_product(&self, rhs: &Self) -> Self {
        let mut out = [0.0; 8];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                if b == 0.0 {
                    continue;
                }
                let (sign, k) = CAYLEY[i][j];
                out[k] += sign * a * b;
            }
        }
        Self { coeffs: out }
    }

    /// Euclidean norm: square root of the sum of squared coefficients.
    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    /// Reversion: flips the sign of the grade-2 and grade-3 parts.
    pub fn reverse(&self) -> Self {
        let mut coeffs = self.coeffs;
        for c in &mut coeffs[blade::EXY..=blade::PSEUDO] {
            *c = -*c;
        }
        Self { coeffs }
    }

    /// Largest absolute coefficient difference against `other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.coeffs
            .iter()
            .zip(other.coeffs.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn scale(&self, factor: f64) -> Self {
        let mut coeffs = self.coeffs;
        for c in &mut coeffs {
            *c *= factor;
        }
        Self { coeffs }
    }
}

impl Add for Multivector3 {
    type Output = Multivector3;
    fn add(self, rhs: Self) -> Self {
        let mut coeffs = self.coeffs;
        for (c, r) in coeffs.iter_mut().zip(rhs.coeffs.iter()) {
            *c += r;
        }
        Self { coeffs }
    }
}

impl Sub for Multivector3 {
    type Output = Multivector3;
    fn sub(self, rhs: Self) -> Self {
        let mut coeffs = self.coeffs;
        for (c, r) in coeffs.iter_mut().zip(rhs.coeffs.iter()) {
            *c -= r;
        }
        Self { coeffs }
    }
}

impl Neg for Multivector3 {
    type Output = Multivector3;
    fn neg(self) -> Self {
        self.scale(-1.0)
    }
}

impl Mul for Multivector3 {
    type Output = Multivector3;
    fn mul(self, rhs: Self) -> Self {
        self.geometric_product(&rhs)
    }
}

impl Mul<f64> for Multivector3 {
    type Output = Multivector3;
    fn mul(self, rhs: f64) -> Self {
        self.scale(rhs)
    }
}

/// A unit vector in R^3 (|v| = 1 within 1e-12 by construction).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnitVector3 {
    x: f64,
    y: f64,
    z: f64,
}

impl UnitVector3 {
    /// Normalizes `(x, y, z)`; fails on near-zero or non-finite input.
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self, GaError> {
        if !(x.is_finite() && y.is_finite() && z.is_finite()) {
            return Err(GaError::NonFinite { x, y, z });
        }
        let norm = (x * x + y * y + z * z).sqrt();
        if norm < 1e-12 {
            return Err(GaError::DegenerateVector { norm });
        }
        Ok(Self {
            x: x / norm,
            y: y / norm,
            z: z / norm,
        })
    }

    /// Components are already unit to within floating-point rounding
    /// (used by samplers that construct points on the sphere directly).
    pub(crate) fn from_unit_unchecked(x: f64, y: f64, z: f64) -> Self {
        debug_assert!((x * x + y * y + z * z - 1.0).abs() < 1e-9);
        Self { x, y, z }
    }

    pub fn x_axis() -> Self {
        Self { x: 1.0, y: 0.0, z: 0.0 }
    }

    pub fn y_axis() -> Self {
        Self { x: 0.0, y: 1.0, z: 0.0 }
    }

    pub fn z_axis() -> Self {
        Self { x: 0.0, y: 0.0, z: 1.0 }
    }

    /// Unit vector at `angle` from `e_z` in the x-z plane. Detector layouts
    /// place `a` at angle 0 and `b` at the opening angle, so that
    /// `dot(a, b) = cos(angle)`.
    pub fn from_xz_angle(angle: f64) -> Self {
        Self { x: angle.sin(), y: 0.0, z: angle.cos() }
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn components(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    /// Right-handed cross product (not normalized).
    pub fn cross(&self, other: &Self) -> [f64; 3] {
        [
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        ]
    }

    /// Angle to `other` in `[0, pi]`.
    pub fn angle_to(&self, other: &Self) -> f64 {
        self.dot(other).clamp(-1.0, 1.0).acos()
    }

    pub fn as_multivector(&self) -> Multivector3 {
        Multivector3::vector(self.x, self.y, self.z)
    }
}

impl Neg for UnitVector3 {
    type Output = UnitVector3;
    fn neg(self) -> Self {
        Self { x: -self.x, y: -self.y, z: -self.z }
    }
}

/// Handedness of the frame, the `lambda = +/-1` hidden variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    Plus,
    Minus,
}

impl Orientation {
    pub fn sign(self) -> f64 {
        match self {
            Orientation::Plus => 1.0,
            Orientation::Minus => -1.0,
        }
    }

    pub fn from_sign(sign: i8) -> Option<Self> {
        match sign {
            1 => Some(Orientation::Plus),
            -1 => Some(Orientation::Minus),
            _ => None,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Orientation::Plus => Orientation::Minus,
            Orientation::Minus => Orientation::Plus,
        }
    }
}

/// `lambda * I * v` for an arbitrary (not necessarily unit) vector `v`.
pub fn oriented_dual(v: [f64; 3], orientation: Orientation) -> Multivector3 {
    let s = orientation.sign();
    Multivector3::bivector(s * v[0], s * v[1], s * v[2])
}

/// Spin bivector `L(n, lambda) = lambda I n`; squares to -1 for unit `n`.
pub fn spin_bivector(n: UnitVector3, orientation: Orientation) -> Multivector3 {
    oriented_dual(n.components(), orientation)
}

/// Detector bivector `D(n) = I n`, the orientation-independent counterpart
/// of [`spin_bivector`]: `L(n, lambda) = lambda D(n)`.
pub fn detector_bivector(n: UnitVector3) -> Multivector3 {
    Multivector3::bivector(n.x(), n.y(), n.z())
}

/// Threshold on the wedge norm below which two vectors are treated as
/// collinear and the quaternion degenerates to the scalar +/-1 limit.
pub const COLLINEAR_EPS: f64 = 1e-12;

/// A unit quaternion: scalar plus bivector grades of Cl(3,0), norm 1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnitQuaternion(Multivector3);

impl UnitQuaternion {
    pub fn identity() -> Self {
        Self(Multivector3::scalar(1.0))
    }

    /// `exp((I v) eta) = cos(eta) + (I v) sin(eta)` for a unit axis `v`.
    pub fn exp(axis: UnitVector3, half_angle: f64) -> Self {
        let (sin, cos) = half_angle.sin_cos();
        let mut m = oriented_dual(axis.components(), Orientation::Plus).scale(sin);
        m.coeffs[blade::SCALAR] = cos;
        Self(m)
    }

    /// `cos(eta_uv) + (u^v / |u^v|) sin(eta_uv)` with `eta_uv = arccos(u.v)`.
    ///
    /// Collinear inputs return the scalar limit +/-1: the sine factor
    /// vanishes identically as `eta_uv -> 0` or `pi`.
    pub fn from_vector_pair(u: UnitVector3, v: UnitVector3) -> Self {
        let c = u.dot(&v).clamp(-1.0, 1.0);
        let w = u.cross(&v);
        let wedge_norm = (w[0] * w[0] + w[1] * w[1] + w[2] * w[2]).sqrt();
        if wedge_norm < COLLINEAR_EPS {
            return Self(Multivector3::scalar(if c >= 0.0 { 1.0 } else { -1.0 }));
        }
        let eta = c.acos();
        let (sin, cos) = eta.sin_cos();
        let scale = sin / wedge_norm;
        let mut m = Multivector3::bivector(w[0] * scale, w[1] * scale, w[2] * scale);
        m.coeffs[blade::SCALAR] = cos;
        Self(m)
    }

    pub fn as_multivector(&self) -> &Multivector3 {
        &self.0
    }

    pub fn scalar_part(&self) -> f64 {
        self.0.scalar_part()
    }

    pub fn bivector_part(&self) -> [f64; 3] {
        self.0.bivector_part()
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn reverse(&self) -> Self {
        Self(self.0.reverse())
    }
}

impl Mul for UnitQuaternion {
    type Output = UnitQuaternion;

    /// S^3 is closed under multiplication: the product of two even-grade
    /// elements is even-grade and the norm stays 1 up to rounding.
    fn mul(self, rhs: Self) -> Self {
        Self(self.0.geometric_product(&rhs.0))
    }
}

impl Add for UnitQuaternion {
    type Output = Multivector3;

    /// Quaternion sums leave S^3; the result is a plain multivector whose
    /// norm carries the triangle-inequality content.
    fn add(self, rhs: Self) -> Multivector3 {
        self.0 + rhs.0
    }
}
