//! Octonions by Cayley–Dickson doubling of the quaternions with
//! `(a, b)(c, d) = (ac − d̄b, da + bc̄)`.
//!
//! Basis: `e0 = 1`, `e1, e2, e3 = i, j, k` in the first quaternion and
//! `e4..e7 = (0,1), (0,i), (0,j), (0,k)`. In particular `e1 e2 = e3`.

use serde::{Deserialize, Serialize};
use std::ops::{Add, Mul, Neg, Sub};

pub type Quaternion = [f64; 4];

pub fn quat_mul(a: &Quaternion, b: &Quaternion) -> Quaternion {
    [
        a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
        a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
        a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
        a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0],
    ]
}

pub fn quat_conj(a: &Quaternion) -> Quaternion {
    [a[0], -a[1], -a[2], -a[3]]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Octonion(pub [f64; 8]);

impl Octonion {
    pub const ZERO: Octonion = Octonion([0.0; 8]);

    pub fn basis(i: usize) -> Self {
        let mut v = [0.0; 8];
        v[i] = 1.0;
        Octonion(v)
    }

    pub fn from_slice(s: &[f64]) -> Self {
        let mut v = [0.0; 8];
        v.copy_from_slice(&s[..8]);
        Octonion(v)
    }

    /// An imaginary octonion from its 7 imaginary components.
    pub fn imaginary(s: &[f64]) -> Self {
        let mut v = [0.0; 8];
        v[1..].copy_from_slice(&s[..7]);
        Octonion(v)
    }

    fn halves(&self) -> (Quaternion, Quaternion) {
        let v = self.0;
        ([v[0], v[1], v[2], v[3]], [v[4], v[5], v[6], v[7]])
    }

    fn from_halves(a: Quaternion, b: Quaternion) -> Self {
        Octonion([a[0], a[1], a[2], a[3], b[0], b[1], b[2], b[3]])
    }

    pub fn conj(&self) -> Self {
        let mut v = self.0.map(|x| -x);
        v[0] = self.0[0];
        Octonion(v)
    }

    pub fn dot(&self, o: &Self) -> f64 {
        self.0.iter().zip(&o.0).map(|(a, b)| a * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn scale(&self, c: f64) -> Self {
        Octonion(self.0.map(|x| c * x))
    }
}

impl Mul for Octonion {
    type Output = Octonion;
    fn mul(self, o: Octonion) -> Octonion {
        let (a, b) = self.halves();
        let (c, d) = o.halves();
        let ac = quat_mul(&a, &c);
        let dbar_b = quat_mul(&quat_conj(&d), &b);
        let da = quat_mul(&d, &a);
        let bcbar = quat_mul(&b, &quat_conj(&c));
        let mut first = [0.0; 4];
        let mut second = [0.0; 4];
        for i in 0..4 {
            first[i] = ac[i] - dbar_b[i];
            second[i] = da[i] + bcbar[i];
        }
        Octonion::from_halves(first, second)
    }
}

impl Add for Octonion {
    type Output = Octonion;
    fn add(self, o: Octonion) -> Octonion {
        let mut v = self.0;
        for (x, y) in v.iter_mut().zip(o.0) {
            *x += y;
        }
        Octonion(v)
    }
}

impl Sub for Octonion {
    type Output = Octonion;
    fn sub(self, o: Octonion) -> Octonion {
        self + (-o)
    }
}

impl Neg for Octonion {
    type Output = Octonion;
    fn neg(self) -> Octonion {
        Octonion(self.0.map(|x| -x))
    }
}

pub fn octonion_mul(a: &Octonion, b: &Octonion) -> Octonion {
    *a * *b
}

/// `[x, y, z] = (xy)z − x(yz)`.
pub fn associator(x: &Octonion, y: &Octonion, z: &Octonion) -> Octonion {
    (*x * *y) * *z - *x * (*y * *z)
}

/// Triple cross product `x × y × z = ½(x(ȳz) − z(ȳx))`.
pub fn triple_cross(x: &Octonion, y: &Octonion, z: &Octonion) -> Octonion {
    let yb = y.conj();
    (*x * (yb * *z) - *z * (yb * *x)).scale(0.5)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multiplication_table_basics() {
        let e = Octonion::basis;
        assert_eq!(e(1) * e(2), e(3));
        assert_eq!(e(2) * e(1), -e(3));
        assert_eq!(e(0) * e(5), e(5));
        for i in 1..8 {
            assert_eq!(e(i) * e(i), -e(0));
            for j in 1..8 {
                if i != j {
                    assert_eq!(e(i) * e(j), -(e(j) * e(i)));
                }
            }
        }
        assert_eq!(associator(&e(1), &e(2), &e(3)), Octonion::ZERO);
        assert_ne!(associator(&e(1), &e(2), &e(4)), Octonion::ZERO);
    }

    #[test]
    fn triple_cross_is_unit_on_orthonormal_basis_triples() {
        for a in 0..8 {
            for b in a + 1..8 {
                for c in b + 1..8 {
                    let v = triple_cross(&Octonion::basis(a), &Octonion::basis(b), &Octonion::basis(c));
                    assert!((v.norm() - 1.0).abs() < 1e-14);
                    for i in [a, b, c] {
                        assert!(v.dot(&Octonion::basis(i)).abs() < 1e-14);
                    }
                }
            }
        }
    }
}
