//! Truncated Taylor expansions to fourth order, used for exact derivatives of
//! rational compositions of the model polynomials.

use std::ops::{Add, Div, Mul, Neg, Sub};

pub const JET_LEN: usize = 5;

/// Taylor coefficients `c[k]` of `f(x0 + t) = Σ c[k] t^k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub c: [f64; JET_LEN],
}

const FACT: [f64; JET_LEN] = [1.0, 1.0, 2.0, 6.0, 24.0];

impl Jet {
    pub fn constant(v: f64) -> Self {
        let mut c = [0.0; JET_LEN];
        c[0] = v;
        Jet { c }
    }

    /// The independent variable at `x0`.
    pub fn variable(x0: f64) -> Self {
        let mut c = [0.0; JET_LEN];
        c[0] = x0;
        c[1] = 1.0;
        Jet { c }
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    /// The `k`-th derivative at the expansion point.
    pub fn deriv(&self, k: usize) -> f64 {
        self.c[k] * FACT[k]
    }

    pub fn scale(self, s: f64) -> Jet {
        let mut c = self.c;
        c.iter_mut().for_each(|v| *v *= s);
        Jet { c }
    }

    pub fn recip(self) -> Jet {
        let a0 = self.c[0];
        let mut r = [0.0; JET_LEN];
        r[0] = 1.0 / a0;
        for k in 1..JET_LEN {
            let s: f64 = (1..=k).map(|j| self.c[j] * r[k - j]).sum();
            r[k] = -s / a0;
        }
        Jet { c: r }
    }

    pub fn sqrt(self) -> Jet {
        let mut r = [0.0; JET_LEN];
        r[0] = self.c[0].sqrt();
        for k in 1..JET_LEN {
            let s: f64 = (1..k).map(|j| r[j] * r[k - j]).sum();
            r[k] = (self.c[k] - s) / (2.0 * r[0]);
        }
        Jet { c: r }
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        let mut c = self.c;
        for (a, b) in c.iter_mut().zip(o.c) {
            *a += b;
        }
        Jet { c }
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        self + (-o)
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
    fn mul(self, o: Jet) -> Jet {
        let mut c = [0.0; JET_LEN];
        for (i, &a) in self.c.iter().enumerate() {
            for (j, &b) in o.c.iter().enumerate().take(JET_LEN - i) {
                c[i + j] += a * b;
            }
        }
        Jet { c }
    }
}

impl Div for Jet {
    type Output = Jet;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Jet) -> Jet {
        self * o.recip()
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(self, v: f64) -> Jet {
        let mut c = self.c;
        c[0] += v;
        Jet { c }
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, v: f64) -> Jet {
        self.scale(v)
    }
}
