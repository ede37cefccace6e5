//! The action integral Θ(μx, cx, ωφ, μφ), its gradient and Hessian, and the
//! change of variables to the modulation coordinates `(kx, kφ, 𝓆, 𝓂)`.

use crate::error::{Error, Result};
use crate::exec::{self, ExecMode};
use crate::model::ModelSpec;
use crate::profile::{effective_potential_jet, period_integral, potential_param_gradient, WaveParams, Well};
use crate::quad::{self, QuadOptions};
use nalgebra::Matrix4;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;

pub type Mat4 = [[f64; 4]; 4];

pub fn to_matrix(m: &Mat4) -> Matrix4<f64> {
    Matrix4::from_fn(|i, j| m[i][j])
}

pub fn from_matrix(m: &Matrix4<f64>) -> Mat4 {
    let mut out = [[0.0; 4]; 4];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = m[(i, j)];
        }
    }
    out
}

#[derive(Debug, Clone, Copy)]
pub struct ActionOptions {
    pub quad: QuadOptions,
    /// Relative finite-difference step, scaled by `max(|p_j|, 1)`.
    pub fd_rel_step: f64,
    /// Steps below this multiple of the parameter scale are refused.
    pub min_rel_step: f64,
    pub exec: ExecMode,
    /// Restricts the well search, see [`Well::new`].
    pub seed: Option<(f64, f64)>,
}

impl Default for ActionOptions {
    fn default() -> Self {
        ActionOptions {
            quad: QuadOptions::default(),
            fd_rel_step: 1e-4,
            min_rel_step: 1e-11,
            exec: ExecMode::Parallel,
            seed: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ActionData {
    pub theta: f64,
    /// ∇Θ in the order `(μx, cx, ωφ, μφ)`.
    pub grad: [f64; 4],
    pub hess: Mat4,
    /// Step used in each parameter direction.
    pub fd_step: [f64; 4],
    /// Richardson error estimate per entry (before symmetrization).
    pub est_error: Mat4,
    /// `max |H_ij − H_ji| / max |H_ij|` before symmetrization.
    pub asymmetry: f64,
}

fn theta_on(well: &Well, opts: &QuadOptions) -> Result<f64> {
    let d = well.width();
    quad::integrate_scalar(
        |u| {
            let (s, c) = u.sin_cos();
            well.sqrt_p(u) * 2.0 * d * s * c / well.rho(u)
        },
        0.0,
        FRAC_PI_2,
        opts,
    )
}

fn grad_on(model: &ModelSpec, well: &Well, opts: &QuadOptions) -> Result<[f64; 4]> {
    let params = well.params;
    period_integral(well, |rho| potential_param_gradient(model, rho, &params), opts)
}

/// `Θ = 2∫_{ρmin}^{ρmax} √(μx − 𝒲ρ) √(κ(2ρ)/ρ) dρ`.
pub fn action_value(model: &ModelSpec, params: &WaveParams) -> Result<f64> {
    let well = Well::new(model, params, None)?;
    theta_on(&well, &QuadOptions::default())
}

pub fn action_gradient(model: &ModelSpec, params: &WaveParams) -> Result<[f64; 4]> {
    action_gradient_with(model, params, &ActionOptions::default())
}

pub fn action_gradient_with(model: &ModelSpec, params: &WaveParams, opts: &ActionOptions) -> Result<[f64; 4]> {
    let well = Well::new(model, params, opts.seed)?;
    grad_on(model, &well, &opts.quad)
}

/// Bisection for the zero of `𝒲ρ'` in `(a, b)` given opposite signs at the ends.
fn critical_point(model: &ModelSpec, params: &WaveParams, mut a: f64, mut b: f64) -> Option<f64> {
    let d1 = |r: f64| effective_potential_jet(model, r, params).map(|j| j.deriv(1)).ok();
    let mut fa = d1(a)?;
    let fb = d1(b)?;
    if (fa < 0.0) == (fb < 0.0) {
        return None;
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        let fm = d1(m)?;
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
        if b - a <= 1e-15 * m.abs() {
            break;
        }
    }
    Some(0.5 * (a + b))
}

/// Distance in parameter space, per direction, to the nearest regime boundary:
/// the harmonic collapse at the bottom of the well and, if present, the
/// saddle between the well and its dual root.
fn boundary_steps(model: &ModelSpec, well: &Well) -> Result<(f64, [f64; 4])> {
    let params = well.params;
    let w0 = |r: f64| effective_potential_jet(model, r, &params).map(|j| j.value());
    let mut crit = Vec::new();
    if let Some(r) = critical_point(model, &params, well.rho_min, well.rho_max) {
        crit.push((r, params.mu_x - w0(r)?));
    }
    if let Ok(d) = well.dual_point() {
        let (a, b) = if d.rho > well.rho_max { (well.rho_max, d.rho) } else { (d.rho, well.rho_min) };
        if let Some(r) = critical_point(model, &params, a, b) {
            crit.push((r, w0(r)? - params.mu_x));
        }
    }
    let margin = crit.iter().map(|c| c.1.abs()).fold(f64::INFINITY, f64::min);
    let mut caps = [f64::INFINITY; 4];
    for (rho, _) in &crit {
        let g = potential_param_gradient(model, *rho, &params);
        for j in 0..4 {
            if g[j] != 0.0 {
                caps[j] = caps[j].min(margin / (8.0 * g[j].abs()));
            }
        }
    }
    Ok((margin, caps))
}

pub fn action_hessian(model: &ModelSpec, params: &WaveParams) -> Result<ActionData> {
    action_hessian_with(model, params, &ActionOptions::default())
}

/// Hessian by central differences of the quadrature gradient at steps `h` and
/// `h/2`, combined by Richardson extrapolation.
pub fn action_hessian_with(model: &ModelSpec, params: &WaveParams, opts: &ActionOptions) -> Result<ActionData> {
    let well = Well::new(model, params, opts.seed)?;
    let theta = theta_on(&well, &opts.quad)?;
    let grad = grad_on(model, &well, &opts.quad)?;
    let (margin, caps) = boundary_steps(model, &well)?;
    let p0 = params.to_array();
    let mut steps = [0.0; 4];
    for j in 0..4 {
        let scale = p0[j].abs().max(1.0);
        let h = (opts.fd_rel_step * scale).min(caps[j]);
        if h < opts.min_rel_step * scale {
            return Err(Error::BoundaryTooClose { step: h, margin });
        }
        steps[j] = h;
    }
    let seed = (well.rho_min, well.rho_max);
    // (direction, step divisor, sign)
    let mut stencil = Vec::with_capacity(16);
    for j in 0..4 {
        for div in [1.0, 2.0] {
            for sign in [1.0, -1.0] {
                stencil.push((j, div, sign));
            }
        }
    }
    let sub = ActionOptions { seed: Some(seed), ..*opts };
    let grads = exec::try_map(opts.exec, &stencil, |&(j, div, sign)| {
        let mut p = p0;
        p[j] += sign * steps[j] / div;
        action_gradient_with(model, &WaveParams::from_array(p), &sub)
    })?;
    let mut raw = [[0.0; 4]; 4];
    let mut est = [[0.0; 4]; 4];
    for j in 0..4 {
        let base = 4 * j;
        let h = steps[j];
        for i in 0..4 {
            let d1 = (grads[base][i] - grads[base + 1][i]) / (2.0 * h);
            let d2 = (grads[base + 2][i] - grads[base + 3][i]) / h;
            raw[i][j] = (4.0 * d2 - d1) / 3.0;
            est[i][j] = (d2 - d1).abs() / 3.0;
        }
    }
    let norm = raw.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut asym: f64 = 0.0;
    let mut hess = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            asym = asym.max((raw[i][j] - raw[j][i]).abs());
            hess[i][j] = 0.5 * (raw[i][j] + raw[j][i]);
        }
    }
    for i in 0..4 {
        for j in 0..4 {
            let floor = 0.01 * raw[i][j].abs().max(1e-6 * norm);
            if est[i][j] > floor {
                return Err(Error::NoiseFloor {
                    i,
                    j,
                    estimate: est[i][j],
                    value: raw[i][j],
                });
            }
        }
    }
    Ok(ActionData {
        theta,
        grad,
        hess,
        fd_step: steps,
        est_error: est,
        asymmetry: if norm > 0.0 { asym / norm } else { 0.0 },
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModulationCoordinates {
    pub k_x: f64,
    pub k_phi: f64,
    pub q_bar: f64,
    pub m_bar: f64,
    /// Rows `(kx, kφ, 𝓆, 𝓂)`, columns `(μx, cx, ωφ, μφ)`.
    pub jacobian: Mat4,
}

/// `kx = 1/∂μxΘ` and `(1, 𝓆, 𝓂, kφ) = A₀∇Θ/∂μxΘ`, with the Jacobian obtained
/// by the chain rule through Hess Θ.
pub fn coordinates_from(grad: &[f64; 4], hess: &Mat4) -> Result<ModulationCoordinates> {
    let [g0, g1, g2, g3] = *grad;
    if g0 == 0.0 || !g0.is_finite() {
        return Err(Error::ZeroPeriodDerivative);
    }
    let g02 = g0 * g0;
    let d = Matrix4::new(
        -1.0 / g02, 0.0, 0.0, 0.0,
        g3 / g02, 0.0, 0.0, -1.0 / g0,
        -g1 / g02, 1.0 / g0, 0.0, 0.0,
        g2 / g02, 0.0, -1.0 / g0, 0.0,
    );
    let jac = d * to_matrix(hess);
    Ok(ModulationCoordinates {
        k_x: 1.0 / g0,
        k_phi: -g3 / g0,
        q_bar: g1 / g0,
        m_bar: -g2 / g0,
        jacobian: from_matrix(&jac),
    })
}

pub fn modulation_coordinates(model: &ModelSpec, params: &WaveParams) -> Result<ModulationCoordinates> {
    let data = action_hessian(model, params)?;
    coordinates_from(&data.grad, &data.hess)
}

/// Signed count of negative eigenvalues and the eigenvalues themselves.
pub fn symmetric_eigenvalues(h: &Mat4) -> [f64; 4] {
    let e = to_matrix(h).symmetric_eigen();
    let mut v = [e.eigenvalues[0], e.eigenvalues[1], e.eigenvalues[2], e.eigenvalues[3]];
    v.sort_by(|a, b| a.total_cmp(b));
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::reference_focusing;
    use crate::profile::solve_profile;

    #[test]
    fn gradient_components_reference() {
        let m = reference_focusing();
        let p = WaveParams::new(-0.375, 0.0, -1.0, 0.0);
        let g = action_gradient(&m, &p).unwrap();
        let prof = solve_profile(&m, &p, 128).unwrap();
        assert!(((g[0] - prof.x_period) / prof.x_period).abs() < 1e-10);
        assert_eq!(g[1], 0.0);
        assert_eq!(g[3], 0.0);
    }

    #[test]
    fn degenerate_action() {
        let m = reference_focusing();
        assert!(matches!(
            action_value(&m, &WaveParams::new(-0.5, 0.0, -1.0, 0.0)),
            Err(Error::DegenerateWell { .. })
        ));
    }

    #[test]
    fn hessian_is_symmetric() {
        let m = reference_focusing();
        let d = action_hessian(&m, &WaveParams::new(-0.375, 0.0, -1.0, 0.0)).unwrap();
        assert!(d.asymmetry < 1e-6, "{}", d.asymmetry);
    }
}
