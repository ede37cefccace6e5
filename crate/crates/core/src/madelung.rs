//! Madelung transform between `U ∈ ℝ²` and the hydrodynamic pair `(ρ, v)`,
//! and the two first integrals of the profile equations.

use crate::error::{Error, Result};
use crate::model::ModelSpec;
use crate::profile::{v_x, WaveProfile};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HydroState {
    pub rho: Vec<f64>,
    pub v: Vec<f64>,
    pub x_grid: Vec<f64>,
    /// Optional exact `ρ_x`; finite differences are used when absent.
    pub rho_x: Option<Vec<f64>>,
}

pub const MODULUS_FLOOR: f64 = 1e-12;

fn j(u: [f64; 2]) -> [f64; 2] {
    [u[1], -u[0]]
}

fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

/// `ρ = ½‖U‖²`, `v = ½ JU·U_x / ρ`.
pub fn to_hydro(u: &[[f64; 2]], u_x: &[[f64; 2]], x_grid: &[f64]) -> Result<HydroState> {
    if u.len() != u_x.len() || u.len() != x_grid.len() {
        return Err(Error::InvalidInput("array lengths differ".into()));
    }
    let mut rho = Vec::with_capacity(u.len());
    let mut v = Vec::with_capacity(u.len());
    let mut rho_x = Vec::with_capacity(u.len());
    for (index, (&a, &b)) in u.iter().zip(u_x).enumerate() {
        let n2 = dot(a, a);
        if !(n2 >= MODULUS_FLOOR) {
            return Err(Error::VanishingModulus { index });
        }
        let r = 0.5 * n2;
        rho.push(r);
        v.push(0.5 * dot(j(a), b) / r);
        rho_x.push(dot(a, b));
    }
    Ok(HydroState {
        rho,
        v,
        x_grid: x_grid.to_vec(),
        rho_x: Some(rho_x),
    })
}

/// Cumulative integral on a possibly nonuniform grid using the cubic through
/// the four nearest nodes on each interval.
pub fn cumulative_integral(x: &[f64], f: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut out = vec![0.0; n];
    if n < 2 {
        return out;
    }
    if n < 4 {
        for i in 1..n {
            out[i] = out[i - 1] + 0.5 * (x[i] - x[i - 1]) * (f[i] + f[i - 1]);
        }
        return out;
    }
    // 3-point Gauss–Legendre on each interval against the local cubic.
    let g = [(-(0.6f64).sqrt()), 0.0, (0.6f64).sqrt()];
    let w = [5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0];
    for i in 0..n - 1 {
        let s = i.saturating_sub(1).min(n - 4);
        let (a, b) = (x[i], x[i + 1]);
        let mut acc = 0.0;
        for k in 0..3 {
            let t = 0.5 * (a + b) + 0.5 * (b - a) * g[k];
            let mut val = 0.0;
            for p in s..s + 4 {
                let mut l = 1.0;
                for q in s..s + 4 {
                    if q != p {
                        l *= (t - x[q]) / (x[p] - x[q]);
                    }
                }
                val += l * f[p];
            }
            acc += w[k] * val;
        }
        out[i + 1] = out[i] + 0.5 * (b - a) * acc;
    }
    out
}

fn derivative(x: &[f64], f: &[f64]) -> Vec<f64> {
    let n = x.len();
    (0..n)
        .map(|i| {
            let (a, b) = if i == 0 { (0, 1) } else if i == n - 1 { (n - 2, n - 1) } else { (i - 1, i + 1) };
            (f[b] - f[a]) / (x[b] - x[a])
        })
        .collect()
}

/// `θ = θ₀ + ∫₀ˣ v`, `U = √(2ρ) e^{θJ} e₁`, together with `U_x`.
pub fn from_hydro(state: &HydroState, theta0: f64) -> (Vec<[f64; 2]>, Vec<[f64; 2]>) {
    let th = cumulative_integral(&state.x_grid, &state.v);
    let rho_x = state
        .rho_x
        .clone()
        .unwrap_or_else(|| derivative(&state.x_grid, &state.rho));
    let mut u = Vec::with_capacity(th.len());
    let mut ux = Vec::with_capacity(th.len());
    for i in 0..th.len() {
        let t = theta0 + th[i];
        let a = (2.0 * state.rho[i]).sqrt();
        let ui = [a * t.cos(), -a * t.sin()];
        u.push(ui);
        ux.push(v_x(ui, state.rho[i], rho_x[i], state.v[i]));
    }
    (u, ux)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FirstIntegralResiduals {
    pub res_mu_phi: Vec<f64>,
    pub res_mu_x: Vec<f64>,
    pub res_mu_phi_hydro: Vec<f64>,
    pub res_mu_x_hydro: Vec<f64>,
    /// Largest absolute residual over both identities and both routes.
    pub max_abs: f64,
    /// Largest disagreement between the two routes.
    pub route_gap: f64,
}

/// Residuals of `μφ = κJ𝒱·𝒱_x + (cx/2)‖𝒱‖²` and
/// `μx = ½κ‖𝒱_x‖² − W(‖𝒱‖²) + (ωφ/2)‖𝒱‖²`, evaluated from the 𝒱 samples and
/// again from the hydrodynamic pair.
pub fn first_integral_residuals(model: &ModelSpec, prof: &WaveProfile) -> FirstIntegralResiduals {
    let p = prof.params;
    let n = prof.rho.len();
    let mut out = FirstIntegralResiduals {
        res_mu_phi: Vec::with_capacity(n),
        res_mu_x: Vec::with_capacity(n),
        res_mu_phi_hydro: Vec::with_capacity(n),
        res_mu_x_hydro: Vec::with_capacity(n),
        max_abs: 0.0,
        route_gap: 0.0,
    };
    for i in 0..n {
        let vv = prof.vv[i];
        let a = dot(vv, vv);
        let vx = v_x(vv, 0.5 * a, prof.rho_x[i], prof.v[i]);
        let k = model.kappa(a);
        let wv = model.w(a);
        let r1 = k * dot(j(vv), vx) + 0.5 * p.c_x * a - p.mu_phi;
        let r2 = 0.5 * k * dot(vx, vx) - wv + 0.5 * p.omega_phi * a - p.mu_x;

        let rho = prof.rho[i];
        let (rx, v) = (prof.rho_x[i], prof.v[i]);
        let kh = model.kappa(2.0 * rho);
        let h1 = 2.0 * kh * rho * v + p.c_x * rho - p.mu_phi;
        let h2 = kh * rx * rx / (4.0 * rho) + kh * rho * v * v - model.w(2.0 * rho) + p.omega_phi * rho - p.mu_x;
        for r in [r1, r2, h1, h2] {
            out.max_abs = out.max_abs.max(r.abs());
        }
        out.route_gap = out.route_gap.max((r1 - h1).abs()).max((r2 - h2).abs());
        out.res_mu_phi.push(r1);
        out.res_mu_x.push(r2);
        out.res_mu_phi_hydro.push(h1);
        out.res_mu_x_hydro.push(h2);
    }
    out
}

/// Linearizations of the two first integrals at `(𝒱, 𝒱_x)` in the direction
/// `(ψ, ψ_x)`:
/// `κ'·2(𝒱·ψ)J𝒱·𝒱_x + κ(Jψ·𝒱_x + J𝒱·ψ_x) + cx𝒱·ψ` and
/// `κ'(𝒱·ψ)‖𝒱_x‖² + κ𝒱_x·ψ_x − 2W'(𝒱·ψ) + ωφ𝒱·ψ`.
/// Both are constant in `x` along solutions of the linearized profile
/// equation (the spectral system at λ = 0, η = 0).
pub fn linearized_first_integrals(
    model: &ModelSpec,
    params: &crate::profile::WaveParams,
    vv: [f64; 2],
    vx: [f64; 2],
    psi: [f64; 2],
    psi_x: [f64; 2],
) -> [f64; 2] {
    let a = dot(vv, vv);
    let [k, k1, _] = model.kappa_derivs(a);
    let w1 = model.w_derivs(a)[1];
    let vp = dot(vv, psi);
    let mass = 2.0 * k1 * vp * dot(j(vv), vx) + k * (dot(j(psi), vx) + dot(j(vv), psi_x)) + params.c_x * vp;
    let mom = k1 * vp * dot(vx, vx) + k * dot(vx, psi_x) - 2.0 * w1 * vp + params.omega_phi * vp;
    [mass, mom]
}
