//! Truncated Taylor arithmetic: a higher-order dual number.
//!
//! A `Jet` stores `f(x0), f'(x0)/1!, ..., f^(n)(x0)/n!` up to `order`. Seeding a
//! variable with `[x0, 1, 0, ...]` and pushing it through the closed form of a
//! test function yields every derivative up to `order` in one pass.

use std::ops::{Add, Mul, Neg, Sub};

/// Highest derivative order a jet can carry.
pub const MAX_ORDER: usize = 8;
const LEN: usize = MAX_ORDER + 1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    c: [f64; LEN],
    order: usize,
}

impl Jet {
    pub fn constant(v: f64, order: usize) -> Self {
        assert!(order <= MAX_ORDER, "jet order {order} exceeds {MAX_ORDER}");
        let mut c = [0.0; LEN];
        c[0] = v;
        Jet { c, order }
    }

    /// The identity function seeded at `x0`, with slope `slope`.
    pub fn variable(x0: f64, slope: f64, order: usize) -> Self {
        let mut j = Jet::constant(x0, order);
        if order >= 1 {
            j.c[1] = slope;
        }
        j
    }

    /// A jet from normalized Taylor coefficients; the order is `c.len() - 1`.
    pub fn from_coeffs(c: &[f64]) -> Self {
        assert!(
            !c.is_empty() && c.len() <= LEN,
            "jet needs 1..={LEN} coefficients, got {}",
            c.len()
        );
        let mut a = [0.0; LEN];
        a[..c.len()].copy_from_slice(c);
        Jet {
            c: a,
            order: c.len() - 1,
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    /// Normalized Taylor coefficient `f^(k)(x0) / k!`.
    pub fn coeff(&self, k: usize) -> f64 {
        if k > self.order {
            0.0
        } else {
            self.c[k]
        }
    }

    /// The `k`-th derivative `f^(k)(x0)`.
    pub fn derivative(&self, k: usize) -> f64 {
        let fact: f64 = (1..=k).map(|i| i as f64).product();
        self.coeff(k) * fact
    }

    pub fn scale(mut self, s: f64) -> Self {
        for v in self.c.iter_mut().take(self.order + 1) {
            *v *= s;
        }
        self
    }

    pub fn add_scalar(mut self, s: f64) -> Self {
        self.c[0] += s;
        self
    }

    pub fn recip(&self) -> Self {
        let n = self.order;
        let a0 = self.c[0];
        let mut b = [0.0; LEN];
        b[0] = 1.0 / a0;
        for k in 1..=n {
            let mut s = 0.0;
            for j in 1..=k {
                s += self.c[j] * b[k - j];
            }
            b[k] = -s / a0;
        }
        Jet { c: b, order: n }
    }

    pub fn exp(&self) -> Self {
        let n = self.order;
        let mut e = [0.0; LEN];
        e[0] = self.c[0].exp();
        for k in 1..=n {
            let mut s = 0.0;
            for j in 1..=k {
                s += j as f64 * self.c[j] * e[k - j];
            }
            e[k] = s / k as f64;
        }
        Jet { c: e, order: n }
    }

    /// Horner evaluation of `sum coeffs[i] * self^i`.
    pub fn poly(&self, coeffs: &[f64]) -> Self {
        let mut acc = Jet::constant(0.0, self.order);
        for &c in coeffs.iter().rev() {
            acc = (acc * *self).add_scalar(c);
        }
        acc
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(mut self, rhs: Jet) -> Jet {
        let n = self.order.min(rhs.order);
        for k in 0..=n {
            self.c[k] += rhs.c[k];
        }
        self.order = n;
        self
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        self + (-rhs)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        let n = self.order.min(rhs.order);
        let mut c = [0.0; LEN];
        for k in 0..=n {
            let mut s = 0.0;
            for j in 0..=k {
                s += self.c[j] * rhs.c[k - j];
            }
            c[k] = s;
        }
        Jet { c, order: n }
    }
}
