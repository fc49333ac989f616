//! Second-order forward-mode jets: value, gradient and Hessian.

use std::ops::{Add, Mul, Neg, Sub};

/// Value, gradient and (row-major, symmetric) Hessian of a scalar function of
/// `n` variables at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet2 {
    pub value: f64,
    pub grad: Vec<f64>,
    pub hess: Vec<f64>,
}

impl Jet2 {
    pub fn constant(n: usize, value: f64) -> Self {
        Self {
            value,
            grad: vec![0.0; n],
            hess: vec![0.0; n * n],
        }
    }

    /// The coordinate function `x_i` evaluated at `value`.
    pub fn variable(n: usize, i: usize, value: f64) -> Self {
        let mut j = Self::constant(n, value);
        j.grad[i] = 1.0;
        j
    }

    pub fn nvars(&self) -> usize {
        self.grad.len()
    }

    pub fn h(&self, i: usize, j: usize) -> f64 {
        self.hess[i * self.nvars() + j]
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
            && self.grad.iter().all(|v| v.is_finite())
            && self.hess.iter().all(|v| v.is_finite())
    }

    /// `f(self)` given `f`, `f'` and `f''` at `self.value`.
    pub fn chain(&self, f0: f64, f1: f64, f2: f64) -> Self {
        let n = self.nvars();
        let grad = self.grad.iter().map(|g| f1 * g).collect();
        let mut hess = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                hess[i * n + j] = f2 * self.grad[i] * self.grad[j] + f1 * self.hess[i * n + j];
            }
        }
        Self {
            value: f0,
            grad,
            hess,
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            value: c * self.value,
            grad: self.grad.iter().map(|g| c * g).collect(),
            hess: self.hess.iter().map(|h| c * h).collect(),
        }
    }

    pub fn recip(&self) -> Self {
        let v = self.value;
        self.chain(1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v))
    }

    pub fn powi(&self, k: i32) -> Self {
        let v = self.value;
        let kf = k as f64;
        let f1 = if k == 0 { 0.0 } else { kf * v.powi(k - 1) };
        let f2 = if k == 0 || k == 1 {
            0.0
        } else {
            kf * (kf - 1.0) * v.powi(k - 2)
        };
        self.chain(v.powi(k), f1, f2)
    }

    pub fn powf(&self, p: f64) -> Self {
        let v = self.value;
        self.chain(v.powf(p), p * v.powf(p - 1.0), p * (p - 1.0) * v.powf(p - 2.0))
    }

    pub fn sqrt(&self) -> Self {
        let s = self.value.sqrt();
        self.chain(s, 0.5 / s, -0.25 / (s * self.value))
    }

    pub fn exp(&self) -> Self {
        let e = self.value.exp();
        self.chain(e, e, e)
    }

    pub fn ln(&self) -> Self {
        let v = self.value;
        self.chain(v.ln(), 1.0 / v, -1.0 / (v * v))
    }

    pub fn sin(&self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.chain(s, c, -s)
    }

    pub fn cos(&self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.chain(c, -s, -c)
    }

    pub fn sinh(&self) -> Self {
        let (s, c) = (self.value.sinh(), self.value.cosh());
        self.chain(s, c, s)
    }

    pub fn cosh(&self) -> Self {
        let (s, c) = (self.value.sinh(), self.value.cosh());
        self.chain(c, s, c)
    }

    pub fn tanh(&self) -> Self {
        let t = self.value.tanh();
        let d = 1.0 - t * t;
        self.chain(t, d, -2.0 * t * d)
    }

    pub fn atan(&self) -> Self {
        let v = self.value;
        let d = 1.0 / (1.0 + v * v);
        self.chain(v.atan(), d, -2.0 * v * d * d)
    }

    /// Chain rule for `outer ∘ (inner_1, ..., inner_k)` where `outer` is a jet
    /// in `k` variables evaluated at the inner values.
    pub fn compose(outer: &Jet2, inner: &[Jet2]) -> Jet2 {
        let k = outer.nvars();
        assert_eq!(k, inner.len(), "compose: arity mismatch");
        let n = inner.first().map_or(0, |j| j.nvars());
        let mut grad = vec![0.0; n];
        let mut hess = vec![0.0; n * n];
        for (a, ia) in inner.iter().enumerate() {
            let ga = outer.grad[a];
            for i in 0..n {
                grad[i] += ga * ia.grad[i];
                for j in 0..n {
                    hess[i * n + j] += ga * ia.hess[i * n + j];
                }
            }
            for (b, ib) in inner.iter().enumerate() {
                let hab = outer.hess[a * k + b];
                if hab == 0.0 {
                    continue;
                }
                for i in 0..n {
                    for j in 0..n {
                        hess[i * n + j] += hab * ia.grad[i] * ib.grad[j];
                    }
                }
            }
        }
        Jet2 {
            value: outer.value,
            grad,
            hess,
        }
    }
}

impl Add for &Jet2 {
    type Output = Jet2;
    fn add(self, o: &Jet2) -> Jet2 {
        Jet2 {
            value: self.value + o.value,
            grad: self.grad.iter().zip(&o.grad).map(|(a, b)| a + b).collect(),
            hess: self.hess.iter().zip(&o.hess).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &Jet2 {
    type Output = Jet2;
    fn sub(self, o: &Jet2) -> Jet2 {
        Jet2 {
            value: self.value - o.value,
            grad: self.grad.iter().zip(&o.grad).map(|(a, b)| a - b).collect(),
            hess: self.hess.iter().zip(&o.hess).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &Jet2 {
    type Output = Jet2;
    fn mul(self, o: &Jet2) -> Jet2 {
        let n = self.nvars();
        let mut hess = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                hess[i * n + j] = self.hess[i * n + j] * o.value
                    + o.hess[i * n + j] * self.value
                    + self.grad[i] * o.grad[j]
                    + o.grad[i] * self.grad[j];
            }
        }
        Jet2 {
            value: self.value * o.value,
            grad: self
                .grad
                .iter()
                .zip(&o.grad)
                .map(|(a, b)| a * o.value + b * self.value)
                .collect(),
            hess,
        }
    }
}

impl Neg for &Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        self.scale(-1.0)
    }
}
