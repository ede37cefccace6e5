//! Adaptive Dormand–Prince 5(4) integrator for real first-order systems.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            rel_tol: 1e-12,
            abs_tol: 1e-14,
            max_steps: 200_000,
        }
    }
}

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Integrator state carried between successive calls so that the step size
/// adapts across output points.
pub struct Stepper<F: FnMut(f64, &[f64], &mut [f64])> {
    rhs: F,
    opts: OdeOptions,
    pub x: f64,
    pub y: Vec<f64>,
    h: f64,
    k: Vec<Vec<f64>>,
    fsal_valid: bool,
    pub steps: usize,
}

impl<F: FnMut(f64, &[f64], &mut [f64])> Stepper<F> {
    pub fn new(rhs: F, x0: f64, y0: &[f64], h0: f64, opts: OdeOptions) -> Self {
        let n = y0.len();
        Stepper {
            rhs,
            opts,
            x: x0,
            y: y0.to_vec(),
            h: h0,
            k: vec![vec![0.0; n]; 7],
            fsal_valid: false,
            steps: 0,
        }
    }

    /// Advances exactly to `x_end`.
    pub fn advance_to(&mut self, x_end: f64) -> Result<()> {
        let n = self.y.len();
        let dir = if x_end >= self.x { 1.0 } else { -1.0 };
        if self.h == 0.0 || self.h.signum() != dir {
            self.h = dir * (x_end - self.x).abs().max(1e-12) * 0.01;
        }
        let mut ytmp = vec![0.0; n];
        let mut ynew = vec![0.0; n];
        while (x_end - self.x) * dir > 0.0 {
            if self.steps >= self.opts.max_steps {
                return Err(Error::IntegratorFailed { x: self.x, step: self.h });
            }
            let mut h = self.h;
            let last = (self.x + h - x_end) * dir >= 0.0;
            if last {
                h = x_end - self.x;
            }
            if !self.fsal_valid {
                let (k0, _) = self.k.split_at_mut(1);
                (self.rhs)(self.x, &self.y, &mut k0[0]);
                self.fsal_valid = true;
            }
            for s in 1..7 {
                for i in 0..n {
                    let mut acc = self.y[i];
                    for (j, kj) in self.k.iter().enumerate().take(s) {
                        acc += h * A[s][j] * kj[i];
                    }
                    ytmp[i] = acc;
                }
                let xs = self.x + C[s] * h;
                if s == 6 {
                    ynew.copy_from_slice(&ytmp);
                }
                let (_, rest) = self.k.split_at_mut(s);
                (self.rhs)(xs, &ytmp, &mut rest[0]);
            }
            let mut err = 0.0;
            for i in 0..n {
                let mut e = 0.0;
                for (s, ks) in self.k.iter().enumerate() {
                    e += E[s] * ks[i];
                }
                e *= h;
                let sc = self.opts.abs_tol + self.opts.rel_tol * self.y[i].abs().max(ynew[i].abs());
                err += (e / sc) * (e / sc);
            }
            err = (err / n as f64).sqrt();
            if !err.is_finite() {
                self.h *= 0.1;
                self.fsal_valid = false;
                if self.h.abs() < 1e-14 * (1.0 + self.x.abs()) {
                    return Err(Error::IntegratorFailed { x: self.x, step: self.h });
                }
                continue;
            }
            let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            if err <= 1.0 {
                self.x = if last { x_end } else { self.x + h };
                self.y.copy_from_slice(&ynew);
                let k6 = std::mem::take(&mut self.k[6]);
                self.k[0] = k6;
                self.k[6] = vec![0.0; n];
                self.steps += 1;
                if !last {
                    self.h = h * fac;
                }
            } else {
                self.h = h * fac.min(1.0);
                if self.h.abs() < 1e-14 * (1.0 + self.x.abs()) {
                    return Err(Error::IntegratorFailed { x: self.x, step: self.h });
                }
            }
        }
        Ok(())
    }
}

/// Integrates from `x0` to `x1` and returns the final state.
pub fn integrate<F: FnMut(f64, &[f64], &mut [f64])>(
    rhs: F,
    x0: f64,
    x1: f64,
    y0: &[f64],
    opts: OdeOptions,
) -> Result<Vec<f64>> {
    let mut s = Stepper::new(rhs, x0, y0, 0.0, opts);
    s.advance_to(x1)?;
    Ok(s.y)
}
