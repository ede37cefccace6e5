//! Gauss–Legendre rules and a globally adaptive vector-valued integrator.

use crate::error::{Error, Result};
use std::sync::OnceLock;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { z } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

const PANEL_ORDER: usize = 12;

fn panel_rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(PANEL_ORDER))
}

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_panels: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            rel_tol: 1e-13,
            abs_tol: 0.0,
            max_panels: 4000,
        }
    }
}

struct Panel<const K: usize> {
    a: f64,
    b: f64,
    value: [f64; K],
    abs_value: [f64; K],
    error: f64,
}

fn rule<const K: usize, F: Fn(f64) -> [f64; K]>(f: &F, a: f64, b: f64) -> ([f64; K], [f64; K]) {
    let (x, w) = panel_rule();
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut s = [0.0; K];
    let mut sa = [0.0; K];
    for (xi, wi) in x.iter().zip(w) {
        let v = f(c + h * xi);
        for k in 0..K {
            s[k] += wi * h * v[k];
            sa[k] += wi * h.abs() * v[k].abs();
        }
    }
    (s, sa)
}

fn split<const K: usize, F: Fn(f64) -> [f64; K]>(f: &F, a: f64, b: f64, whole: [f64; K]) -> (Panel<K>, Panel<K>) {
    let m = 0.5 * (a + b);
    let (l, la) = rule(f, a, m);
    let (r, ra) = rule(f, m, b);
    let err = (0..K)
        .map(|k| (whole[k] - l[k] - r[k]).abs())
        .fold(0.0, f64::max);
    // The difference estimates the error of the coarse value; halves share it.
    (
        Panel { a, b: m, value: l, abs_value: la, error: 0.5 * err },
        Panel { a: m, b, value: r, abs_value: ra, error: 0.5 * err },
    )
}

/// Integrates a vector-valued function over `[a, b]`, bisecting the panel with
/// the largest error estimate until every component meets
/// `err ≤ abs_tol + rel_tol·∫|f_k|`.
pub fn integrate<const K: usize, F: Fn(f64) -> [f64; K]>(
    f: F,
    a: f64,
    b: f64,
    opts: &QuadOptions,
) -> Result<[f64; K]> {
    if a == b {
        return Ok([0.0; K]);
    }
    let (whole, _) = rule(&f, a, b);
    let (p, q) = split(&f, a, b, whole);
    let mut panels = vec![p, q];
    loop {
        let mut total = [0.0; K];
        let mut total_abs = [0.0; K];
        let mut total_err = 0.0;
        for p in &panels {
            for k in 0..K {
                total[k] += p.value[k];
                total_abs[k] += p.abs_value[k];
            }
            total_err += p.error;
        }
        let scale = total_abs.iter().fold(0.0f64, |m, v| m.max(*v));
        let tol = opts.abs_tol + opts.rel_tol * scale;
        if total_err <= tol || scale == 0.0 {
            return Ok(total);
        }
        if panels.len() >= opts.max_panels {
            return Err(Error::QuadratureNotConverged { estimate: total_err / scale });
        }
        // Deterministic choice: largest error, lowest index on ties.
        let (idx, _) = panels
            .iter()
            .enumerate()
            .fold((0, -1.0), |(bi, be), (i, p)| if p.error > be { (i, p.error) } else { (bi, be) });
        let worst = panels.swap_remove(idx);
        if (worst.b - worst.a).abs() <= 1e-15 * (a.abs() + b.abs()) {
            return Err(Error::QuadratureNotConverged { estimate: total_err / scale });
        }
        let (l, r) = split(&f, worst.a, worst.b, worst.value);
        panels.push(l);
        panels.push(r);
    }
}

/// Scalar convenience wrapper around [`integrate`].
pub fn integrate_scalar<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, opts: &QuadOptions) -> Result<f64> {
    integrate(|x| [f(x)], a, b, opts).map(|v| v[0])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_rule_is_exact_for_polynomials() {
        let (x, w) = gauss_legendre(7);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(12)).sum();
        assert!((s - 2.0 / 13.0).abs() < 1e-14);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn adaptive_handles_endpoint_singularity() {
        let v = integrate_scalar(|x| 1.0 / x.sqrt(), 0.0, 1.0, &QuadOptions { rel_tol: 1e-8, ..Default::default() }).unwrap();
        assert!((v - 2.0).abs() < 1e-7);
    }

    #[test]
    fn smooth_vector_integrand() {
        let v = integrate(|x| [x.sin(), x.cos()], 0.0, std::f64::consts::PI, &QuadOptions::default()).unwrap();
        assert!((v[0] - 2.0).abs() < 1e-13);
        assert!(v[1].abs() < 1e-13);
    }
}
