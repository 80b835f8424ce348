//! Quaternion algebra with the convention i = jk (hence ij = k, jk = i, ki = j).

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::{GeomError, Result};

/// w + x·i + y·j + z·k.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quaternion {
    pub const ZERO: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 0.0);
    pub const ONE: Quaternion = Quaternion::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Quaternion = Quaternion::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Quaternion = Quaternion::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 1.0);

    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Quaternion { w, x, y, z }
    }

    pub fn real(w: f64) -> Self {
        Quaternion::new(w, 0.0, 0.0, 0.0)
    }

    /// Embeds a complex number as w + x·i.
    pub fn from_complex(c: Complex64) -> Self {
        Quaternion::new(c.re, c.im, 0.0, 0.0)
    }

    /// Builds z1 + j·z2.
    pub fn from_pair(z1: Complex64, z2: Complex64) -> Self {
        // j(a + ib) = a·j − b·k
        Quaternion::new(z1.re, z1.im, z2.re, -z2.im)
    }

    /// Inverse of [`Quaternion::from_pair`]: q = z1 + j·z2.
    pub fn to_pair(self) -> (Complex64, Complex64) {
        (
            Complex64::new(self.w, self.x),
            Complex64::new(self.y, -self.z),
        )
    }

    pub fn conj(self) -> Self {
        Quaternion::new(self.w, -self.x, -self.y, -self.z)
    }

    pub fn norm_sqr(self) -> f64 {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    pub fn norm(self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn re(self) -> f64 {
        self.w
    }

    pub fn im(self) -> Quaternion {
        Quaternion::new(0.0, self.x, self.y, self.z)
    }

    pub fn scale(self, s: f64) -> Self {
        Quaternion::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }

    /// Multiplicative inverse; panics-free, returns non-finite values for zero.
    pub fn inv(self) -> Self {
        self.conj().scale(1.0 / self.norm_sqr())
    }

    pub fn try_inv(self) -> Result<Self> {
        if self.norm_sqr() == 0.0 {
            Err(GeomError::ZeroVector)
        } else {
            Ok(self.inv())
        }
    }

    pub fn normalized(self) -> Self {
        self.scale(1.0 / self.norm())
    }

    pub fn is_finite(self) -> bool {
        self.w.is_finite() && self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn dist(self, other: Quaternion) -> f64 {
        (self - other).norm()
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.w, self.x, self.y, self.z]
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Quaternion::new(a[0], a[1], a[2], a[3])
    }
}

impl Add for Quaternion {
    type Output = Quaternion;
    fn add(self, o: Quaternion) -> Quaternion {
        Quaternion::new(self.w + o.w, self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Quaternion {
    type Output = Quaternion;
    fn sub(self, o: Quaternion) -> Quaternion {
        Quaternion::new(self.w - o.w, self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;
    fn neg(self) -> Quaternion {
        Quaternion::new(-self.w, -self.x, -self.y, -self.z)
    }
}

impl Mul for Quaternion {
    type Output = Quaternion;
    fn mul(self, b: Quaternion) -> Quaternion {
        let a = self;
        Quaternion::new(
            a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
        )
    }
}

impl Mul<f64> for Quaternion {
    type Output = Quaternion;
    fn mul(self, s: f64) -> Quaternion {
        self.scale(s)
    }
}

impl Div for Quaternion {
    type Output = Quaternion;
    #[allow(clippy::suspicious_arithmetic_impl)]
    /// Right division a·b⁻¹.
    fn div(self, b: Quaternion) -> Quaternion {
        self * b.inv()
    }
}

impl fmt::Display for Quaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {:+}i {:+}j {:+}k", self.w, self.x, self.y, self.z)
    }
}

/// Product a·b.
pub fn mul(a: Quaternion, b: Quaternion) -> Quaternion {
    a * b
}

/// True iff v² = −1 and |v| = 1 within `tol`.
pub fn is_imaginary_unit(v: Quaternion, tol: f64) -> bool {
    let sq = v * v;
    (sq + Quaternion::ONE).norm() < tol && (v.norm() - 1.0).abs() < tol
}

/// Returns λ with λ·i·λ⁻¹ = n for a unit imaginary n.
///
/// λ = 1 − n·i away from n = −i; λ = j near it.
pub fn conjugator_to(n: Quaternion) -> Result<Quaternion> {
    if !is_imaginary_unit(n, 1e-9) {
        return Err(GeomError::NotImaginaryUnit);
    }
    if (n + Quaternion::I).norm() < 1e-8 {
        return Ok(Quaternion::J);
    }
    Ok(Quaternion::ONE - n * Quaternion::I)
}

/// λ·x·λ⁻¹.
pub fn rot3(lambda: Quaternion, x: Quaternion) -> Quaternion {
    lambda * x * lambda.inv()
}

/// λ·x·μ⁻¹.
pub fn rot4(lambda: Quaternion, mu: Quaternion, x: Quaternion) -> Quaternion {
    lambda * x * mu.inv()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const I: Quaternion = Quaternion::I;
    const J: Quaternion = Quaternion::J;
    const K: Quaternion = Quaternion::K;
    const ONE: Quaternion = Quaternion::ONE;

    fn close(a: Quaternion, b: Quaternion) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn units_multiply_by_convention() {
        assert!(close(J * K, I));
        assert!(close(I * J, K));
        assert!(close(K * I, J));
        for u in [I, J, K] {
            assert!(close(u * u, -ONE));
        }
    }

    #[test]
    fn mul_examples() {
        let q = Quaternion::new(0.3, -1.2, 2.0, 0.7);
        assert!(close(mul(ONE, q), q));
        assert!(close(
            mul(ONE + I, ONE + J),
            Quaternion::new(1.0, 1.0, 1.0, 1.0)
        ));
    }

    #[test]
    fn imaginary_unit_examples() {
        assert!(is_imaginary_unit(I, 1e-9));
        let s = 1.0 / 2f64.sqrt();
        assert!(is_imaginary_unit(Quaternion::new(0.0, s, s, 0.0), 1e-9));
        assert!(!is_imaginary_unit(ONE, 1e-9));
    }

    #[test]
    fn conjugator_examples() {
        let l = conjugator_to(I).unwrap();
        assert!(close(l.normalized(), ONE));
        let l = conjugator_to(J).unwrap();
        assert!(close(l, ONE + K));
        assert!(close(rot3(l, I), J));
        let l = conjugator_to(-I).unwrap();
        assert!(close(l, J));
        assert!(close(rot3(l, I), -I));
        assert!(conjugator_to(ONE).is_err());
        assert!(conjugator_to(I * 2.0).is_err());
    }

    #[test]
    fn rotation_examples() {
        assert!(close(rot3(J, I), -I));
        let l = Quaternion::new(0.2, 0.5, -1.0, 3.0);
        assert!(close(rot3(l, ONE), ONE));
        let q = Quaternion::new(1.0, 2.0, 3.0, 4.0);
        assert!(close(rot4(ONE, ONE, q), q));
    }

    #[test]
    fn complex_pair_round_trip() {
        let q = Quaternion::new(0.1, -0.2, 0.3, -0.4);
        let (z1, z2) = q.to_pair();
        assert!(close(Quaternion::from_pair(z1, z2), q));
        // q = z1 + j z2 as a quaternion product
        let rebuilt = Quaternion::from_complex(z1) + J * Quaternion::from_complex(z2);
        assert!(close(rebuilt, q));
    }

    fn quat() -> impl Strategy<Value = Quaternion> {
        (-2.0..2.0f64, -2.0..2.0f64, -2.0..2.0f64, -2.0..2.0f64)
            .prop_map(|(w, x, y, z)| Quaternion::new(w, x, y, z))
    }

    fn unit_imag() -> impl Strategy<Value = Quaternion> {
        (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64)
            .prop_filter("nonzero", |(x, y, z)| x * x + y * y + z * z > 1e-4)
            .prop_map(|(x, y, z)| Quaternion::new(0.0, x, y, z).normalized())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]

        #[test]
        fn conjugator_maps_i_to_n(n in unit_imag()) {
            let l = conjugator_to(n).unwrap();
            prop_assert!((rot3(l, I) - n).norm() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn associative(a in quat(), b in quat(), c in quat()) {
            prop_assert!(((a * b) * c - a * (b * c)).norm() < 1e-10);
        }

        #[test]
        fn inverse(a in quat()) {
            prop_assume!(a.norm() > 1e-3);
            prop_assert!((a * a.inv() - ONE).norm() < 1e-10);
        }

        #[test]
        fn rot3_preserves_norm_and_real_part(l in quat(), x in quat()) {
            prop_assume!(l.norm() > 1e-2);
            let y = rot3(l, x);
            prop_assert!((y.norm() - x.norm()).abs() < 1e-9);
            prop_assert!((y.w - x.w).abs() < 1e-9);
        }

        #[test]
        fn rot4_preserves_norm(l in quat(), m in quat(), x in quat()) {
            prop_assume!(l.norm() > 1e-2 && m.norm() > 1e-2);
            let y = rot4(l.normalized(), m.normalized(), x);
            prop_assert!((y.norm() - x.norm()).abs() < 1e-9);
        }

        #[test]
        fn imaginary_unit_predicate(v in quat()) {
            prop_assume!(v.norm() > 1e-3);
            let u = v.normalized();
            let expected = (u * u + ONE).norm() < 1e-9 && (u.norm() - 1.0).abs() < 1e-9;
            prop_assert_eq!(is_imaginary_unit(u, 1e-9), expected);
            let t = u.im().normalized();
            prop_assert!(is_imaginary_unit(t, 1e-9));
        }
    }
}
