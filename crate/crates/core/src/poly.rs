//! Dense real polynomials, stored lowest degree first.

use crate::jet::Jet;
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Poly {
    coeffs: Vec<f64>,
}

impl Poly {
    pub fn new(coeffs: &[f64]) -> Self {
        let mut p = Poly {
            coeffs: coeffs.to_vec(),
        };
        p.trim();
        p
    }

    pub fn zero() -> Self {
        Poly { coeffs: vec![0.0] }
    }

    pub fn constant(c: f64) -> Self {
        Poly { coeffs: vec![c] }
    }

    /// The monomial `c x^k`.
    pub fn monomial(c: f64, k: usize) -> Self {
        let mut coeffs = vec![0.0; k + 1];
        coeffs[k] = c;
        Poly::new(&coeffs)
    }

    fn trim(&mut self) {
        while self.coeffs.len() > 1 && *self.coeffs.last().unwrap() == 0.0 {
            self.coeffs.pop();
        }
        if self.coeffs.is_empty() {
            self.coeffs.push(0.0);
        }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    pub fn eval_jet(&self, x: &Jet) -> Jet {
        self.coeffs
            .iter()
            .rev()
            .fold(Jet::constant(0.0), |acc, &c| acc * *x + c)
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() == 1 {
            return Poly::zero();
        }
        let d: Vec<f64> = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &c)| k as f64 * c)
            .collect();
        Poly::new(&d)
    }

    pub fn nth_derivative(&self, n: usize) -> Poly {
        (0..n).fold(self.clone(), |p, _| p.derivative())
    }

    /// `x ↦ p(s x)`.
    pub fn scale_arg(&self, s: f64) -> Poly {
        let mut f = 1.0;
        let c: Vec<f64> = self
            .coeffs
            .iter()
            .map(|&c| {
                let v = c * f;
                f *= s;
                v
            })
            .collect();
        Poly::new(&c)
    }

    pub fn scale(&self, s: f64) -> Poly {
        let c: Vec<f64> = self.coeffs.iter().map(|&c| c * s).collect();
        Poly::new(&c)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let c: Vec<f64> = (0..n)
            .map(|k| {
                self.coeffs.get(k).copied().unwrap_or(0.0) + other.coeffs.get(k).copied().unwrap_or(0.0)
            })
            .collect();
        Poly::new(&c)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scale(-1.0))
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut c = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Poly::new(&c)
    }

    /// Quotient of the division by the monic factor `(x - r)`; the remainder is discarded.
    pub fn deflate(&self, r: f64) -> Poly {
        let n = self.degree();
        if n == 0 {
            return Poly::zero();
        }
        let mut q = vec![0.0; n];
        let mut acc = 0.0;
        for k in (1..=n).rev() {
            acc = acc * r + self.coeffs[k];
            q[k - 1] = acc;
        }
        Poly::new(&q)
    }

    /// All complex roots, as eigenvalues of the companion matrix.
    pub fn roots(&self) -> Vec<Complex64> {
        let scale = self.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        let mut c = self.coeffs.clone();
        while c.len() > 1 && c.last().unwrap().abs() <= 1e-14 * scale {
            c.pop();
        }
        let n = c.len() - 1;
        if n == 0 {
            return Vec::new();
        }
        let cc: Vec<Complex64> = c.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        complex_roots(&cc)
    }
}

/// Roots of a complex polynomial (lowest degree first) via its companion matrix.
pub fn complex_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let scale = coeffs.iter().fold(0.0f64, |m, c| m.max(c.norm()));
    let mut c = coeffs.to_vec();
    while c.len() > 1 && c.last().unwrap().norm() <= 1e-14 * scale {
        c.pop();
    }
    let n = c.len() - 1;
    if n == 0 {
        return Vec::new();
    }
    let lead = c[n];
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    for i in 1..n {
        m[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for i in 0..n {
        m[(i, n - 1)] = -c[i] / lead;
    }
    match nalgebra::linalg::Schur::try_new(m, f64::EPSILON, 1000) {
        Some(schur) => {
            let (_, t) = schur.unpack();
            (0..n).map(|i| t[(i, i)]).collect()
        }
        None => aberth(&c),
    }
}

/// Eigenvalues of a real square matrix. Falls back to the roots of the
/// characteristic polynomial (Faddeev–LeVerrier) if the QR iteration stalls.
pub fn matrix_eigenvalues(a: &DMatrix<f64>) -> Vec<Complex64> {
    let n = a.nrows();
    let m = a.map(|v| Complex64::new(v, 0.0));
    if let Some(schur) = nalgebra::linalg::Schur::try_new(m, f64::EPSILON, 1000) {
        let (_, t) = schur.unpack();
        return (0..n).map(|i| t[(i, i)]).collect();
    }
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n + 1];
    coeffs[n] = Complex64::new(1.0, 0.0);
    let mut mk = DMatrix::<f64>::zeros(n, n);
    let id = DMatrix::<f64>::identity(n, n);
    for k in 1..=n {
        mk = a * &mk + &id * coeffs[n - k + 1].re;
        let c = -(a * &mk).trace() / k as f64;
        coeffs[n - k] = Complex64::new(c, 0.0);
    }
    aberth(&coeffs)
}

/// Aberth–Ehrlich simultaneous iteration, used when the QR iteration on the
/// companion matrix stalls.
fn aberth(c: &[Complex64]) -> Vec<Complex64> {
    let n = c.len() - 1;
    let eval = |z: Complex64| {
        let mut p = c[n];
        let mut dp = Complex64::new(0.0, 0.0);
        for k in (0..n).rev() {
            dp = dp * z + p;
            p = p * z + c[k];
        }
        (p, dp)
    };
    // Cauchy-type bound for the starting circle.
    let radius = 1.0 + c[..n].iter().fold(0.0f64, |m, a| m.max((a / c[n]).norm()));
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(0.5 * radius, 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64))
        .collect();
    for _ in 0..500 {
        let mut moved: f64 = 0.0;
        for i in 0..n {
            let (p, dp) = eval(z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let sum: Complex64 = (0..n).filter(|&j| j != i).map(|j| Complex64::new(1.0, 0.0) / (z[i] - z[j])).sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * sum);
            if step.is_finite() {
                z[i] -= step;
                moved = moved.max(step.norm() / (1.0 + z[i].norm()));
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivative_and_eval() {
        let p = Poly::new(&[1.0, -2.0, 3.0]);
        assert_eq!(p.eval(2.0), 9.0);
        assert_eq!(p.derivative().coeffs(), &[-2.0, 6.0]);
        assert_eq!(p.nth_derivative(3).coeffs(), &[0.0]);
    }

    #[test]
    fn deflation_recovers_factor() {
        let p = Poly::new(&[-6.0, 11.0, -6.0, 1.0]);
        let q = p.deflate(1.0);
        assert_eq!(q.coeffs(), &[6.0, -5.0, 1.0]);
    }

    #[test]
    fn aberth_matches_known_roots() {
        let c: Vec<Complex64> = [-6.0, 11.0, -6.0, 1.0].iter().map(|&v| Complex64::new(v, 0.0)).collect();
        let mut r: Vec<f64> = aberth(&c).iter().map(|z| z.re).collect();
        r.sort_by(|a, b| a.total_cmp(b));
        for (a, b) in r.iter().zip([1.0, 2.0, 3.0]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn matrix_eigenvalues_of_rotation() {
        let m = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]);
        let mut e = matrix_eigenvalues(&m);
        e.sort_by(|a, b| a.im.total_cmp(&b.im));
        assert!((e[0] - Complex64::new(0.0, -1.0)).norm() < 1e-14);
        assert!((e[1] - Complex64::new(0.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn companion_roots() {
        let p = Poly::new(&[-6.0, 11.0, -6.0, 1.0]);
        let mut r: Vec<f64> = p.roots().iter().map(|z| z.re).collect();
        r.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (a, b) in r.iter().zip([1.0, 2.0, 3.0]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn complex_companion_roots() {
        let i = Complex64::new(0.0, 1.0);
        // (z - i)(z + 2)
        let c = [-2.0 * i, Complex64::new(2.0, 0.0) - i, Complex64::new(1.0, 0.0)];
        let r = complex_roots(&c);
        assert!(r.iter().any(|z| (z - i).norm() < 1e-12));
        assert!(r.iter().any(|z| (z + 2.0).norm() < 1e-12));
    }

    #[test]
    fn scale_arg_composes() {
        let p = Poly::new(&[1.0, 1.0, 1.0]);
        assert_eq!(p.scale_arg(2.0).eval(1.5), p.eval(3.0));
    }
}
