//! Reduced profile problem: effective potential, turning points, the sampled
//! periodic profile and its per-period averages.
//!
//! Profiles are parametrized by `(μx, cx, ωφ, μφ)`. With `α = 2ρ` the mass
//! obeys `(κ(2ρ)/(4ρ))ρ_x² + 𝒲ρ(ρ) = μx`, and clearing denominators gives the
//! polynomial `P(ρ) = 4ρκ(2ρ)(μx − 𝒲ρ(ρ))` whose simple positive roots are the
//! turning points. Inside a well `P = (ρ − ρmin)(ρ − ρmax)S(ρ)` with `S < 0`,
//! and the substitution `ρ = ρmin + Δ sin²u` removes the endpoint
//! singularities: `dx/du = 2κ(2ρ)/√(−S(ρ))` over a half period.

use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::model::{Coefficient, ModelSpec};
use crate::ode::OdeOptions;
use crate::poly::Poly;
use crate::quad::{self, QuadOptions};
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveParams {
    pub mu_x: f64,
    pub c_x: f64,
    pub omega_phi: f64,
    pub mu_phi: f64,
}

impl WaveParams {
    pub fn new(mu_x: f64, c_x: f64, omega_phi: f64, mu_phi: f64) -> Self {
        WaveParams { mu_x, c_x, omega_phi, mu_phi }
    }

    /// Parameters in the fixed order `(μx, cx, ωφ, μφ)`.
    pub fn to_array(self) -> [f64; 4] {
        [self.mu_x, self.c_x, self.omega_phi, self.mu_phi]
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        WaveParams::new(a[0], a[1], a[2], a[3])
    }
}

fn check_rho(rho: f64) -> Result<()> {
    if rho > 0.0 && rho.is_finite() {
        Ok(())
    } else {
        Err(Error::NonpositiveRho(rho))
    }
}

pub(crate) fn nu_jet(model: &ModelSpec, rho: Jet, c_x: f64, mu_phi: f64) -> Jet {
    let k = model.poly(Coefficient::Kappa).eval_jet(&(rho * 2.0));
    (Jet::constant(mu_phi) + rho * (-c_x)) / (rho * k * 2.0)
}

/// Phase velocity `ν(ρ) = (μφ − cxρ)/(2ρκ(2ρ))`.
pub fn nu(model: &ModelSpec, rho: f64, c_x: f64, mu_phi: f64) -> Result<f64> {
    check_rho(rho)?;
    Ok((mu_phi - c_x * rho) / (2.0 * rho * model.kappa(2.0 * rho)))
}

/// Taylor jet of 𝒲ρ at `rho` (derivatives through order 4).
pub fn effective_potential_jet(model: &ModelSpec, rho: f64, p: &WaveParams) -> Result<Jet> {
    check_rho(rho)?;
    let r = Jet::variable(rho);
    let a = r * 2.0;
    let k = model.poly(Coefficient::Kappa).eval_jet(&a);
    let w = model.poly(Coefficient::W).eval_jet(&a);
    let v = nu_jet(model, r, p.c_x, p.mu_phi);
    Ok(-w - k * r * v * v + r * p.omega_phi + v * p.mu_phi - r * v * p.c_x)
}

/// `∂ρ^order 𝒲ρ(ρ; cx, ωφ, μφ)`.
pub fn effective_potential(model: &ModelSpec, rho: f64, params: &WaveParams, order: usize) -> Result<f64> {
    if order > crate::model::MAX_DERIVATIVE_ORDER {
        return Err(Error::OrderTooHigh {
            order,
            max: crate::model::MAX_DERIVATIVE_ORDER,
        });
    }
    Ok(effective_potential_jet(model, rho, params)?.deriv(order))
}

/// Derivatives of `μx − 𝒲ρ(ρ)` with respect to `(μx, cx, ωφ, μφ)`. Since ν is
/// the critical point of 𝒲ρ in its velocity slot, these are `(1, ρν, −ρ, −ν)`.
pub fn potential_param_gradient(model: &ModelSpec, rho: f64, params: &WaveParams) -> [f64; 4] {
    let v = (params.mu_phi - params.c_x * rho) / (2.0 * rho * model.kappa(2.0 * rho));
    [1.0, rho * v, -rho, -v]
}

/// `P(ρ) = 4ρκ(2ρ)(μx + W(2ρ) − ωφρ) − (μφ − cxρ)²`.
pub fn well_polynomial(model: &ModelSpec, p: &WaveParams) -> Poly {
    let k2 = model.poly(Coefficient::Kappa).scale_arg(2.0);
    let w2 = model.poly(Coefficient::W).scale_arg(2.0);
    let bracket = w2.add(&Poly::new(&[p.mu_x, -p.omega_phi]));
    let flux = Poly::new(&[p.mu_phi, -p.c_x]);
    Poly::monomial(4.0, 1).mul(&k2).mul(&bracket).sub(&flux.mul(&flux))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DualSide {
    /// Adjacent root below the well (`ρ_dual < ρmin`).
    Below,
    /// Adjacent root above the well (`ρ_dual > ρmax`).
    Above,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DualPoint {
    pub rho: f64,
    pub side: DualSide,
    /// Gap to the well relative to the well width.
    pub epsilon: f64,
}

/// Sorted positive roots of `P`, classified.
struct RootSet {
    simple: Vec<f64>,
    double: Vec<f64>,
}

fn poly_abs_scale(p: &Poly, x: f64) -> f64 {
    p.coeffs().iter().rev().fold(0.0, |acc, c| acc * x.abs() + c.abs())
}

fn refine_root(p: &Poly, mut lo: f64, mut hi: f64) -> f64 {
    let dp = p.derivative();
    let mut flo = p.eval(lo);
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let fx = p.eval(x);
        if fx == 0.0 {
            return x;
        }
        if (fx < 0.0) == (flo < 0.0) {
            lo = x;
            flo = fx;
        } else {
            hi = x;
        }
        let d = dp.eval(x);
        let newton = x - fx / d;
        let next = if d != 0.0 && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        if (next - x).abs() <= 4.0 * f64::EPSILON * x.abs().max(1e-300) || hi - lo <= 4.0 * f64::EPSILON * x.abs() {
            return next;
        }
        x = next;
    }
    x
}

fn positive_roots(p: &Poly) -> RootSet {
    let mut cands: Vec<f64> = p
        .roots()
        .into_iter()
        .filter(|z| z.im.abs() <= 1e-5 * (1.0 + z.re.abs()) && z.re > 1e-12)
        .map(|z| z.re)
        .collect();
    cands.sort_by(|a, b| a.total_cmp(b));
    // Group numerically coincident candidates (a double root splits by ~√ε).
    let mut groups: Vec<Vec<f64>> = Vec::new();
    for c in cands {
        match groups.last_mut() {
            Some(g) if (c - g[g.len() - 1]).abs() <= 1e-6 * (1.0 + c.abs()) => g.push(c),
            _ => groups.push(vec![c]),
        }
    }
    let centers: Vec<f64> = groups.iter().map(|g| g.iter().sum::<f64>() / g.len() as f64).collect();
    let mut simple = Vec::new();
    let mut double = Vec::new();
    for (i, g) in groups.iter().enumerate() {
        let c = centers[i];
        let left_gap = if i > 0 { c - centers[i - 1] } else { c };
        let right_gap = if i + 1 < centers.len() { centers[i + 1] - c } else { 0.5 * (1.0 + c) };
        let lo = c - 0.5 * left_gap;
        let hi = c + 0.5 * right_gap;
        let (flo, fhi) = (p.eval(lo), p.eval(hi));
        let changes = (flo < 0.0) != (fhi < 0.0);
        if g.len() == 1 && changes {
            simple.push(refine_root(p, lo, hi));
        } else if g.len() == 1 {
            // Real candidate without a sign change: tangency.
            double.push(c);
        } else if changes {
            // Odd multiplicity cluster; keep a single crossing.
            simple.push(refine_root(p, lo, hi));
        } else {
            double.push(c);
        }
    }
    RootSet { simple, double }
}

/// Turning points together with the data needed to integrate over the well.
#[derive(Debug, Clone)]
pub struct Well {
    pub params: WaveParams,
    pub rho_min: f64,
    pub rho_max: f64,
    /// Remaining roots (simple and double) outside the well, sorted.
    pub outer_roots: Vec<f64>,
    p: Poly,
    s: Poly,
    kappa2: Poly,
}

impl Well {
    /// Locates the bounded well of `μx − 𝒲ρ`. With `seed = Some((a, b))` the
    /// first well meeting `[a, b]` is chosen, otherwise the lowest one.
    pub fn new(model: &ModelSpec, params: &WaveParams, seed: Option<(f64, f64)>) -> Result<Well> {
        let p = well_polynomial(model, params);
        if p.is_zero() {
            return Err(Error::NoWellFound);
        }
        let roots = positive_roots(&p);
        let r = &roots.simple;
        let mut chosen = None;
        for i in 0..r.len().saturating_sub(1) {
            let (a, b) = (r[i], r[i + 1]);
            if roots.double.iter().any(|d| *d > a && *d < b) {
                continue;
            }
            if p.eval(0.5 * (a + b)) <= 0.0 {
                continue;
            }
            if let Some((s0, s1)) = seed {
                if b < s0.min(s1) || a > s0.max(s1) {
                    continue;
                }
            }
            chosen = Some((a, b));
            break;
        }
        let Some((rho_min, rho_max)) = chosen else {
            return Err(match roots.double.first() {
                Some(&rho) => Error::DegenerateWell { rho },
                None => Error::NoWellFound,
            });
        };
        let dp = p.derivative();
        for rho in [rho_min, rho_max] {
            if dp.eval(rho).abs() * rho <= 1e-9 * poly_abs_scale(&p, rho) {
                return Err(Error::DegenerateWell { rho });
            }
        }
        model.check_alpha(2.0 * rho_max)?;
        let s = p.deflate(rho_min).deflate(rho_max);
        let mut outer_roots: Vec<f64> = roots
            .simple
            .iter()
            .chain(&roots.double)
            .copied()
            .filter(|x| *x < rho_min || *x > rho_max)
            .collect();
        outer_roots.sort_by(|a, b| a.total_cmp(b));
        Ok(Well {
            params: *params,
            rho_min,
            rho_max,
            outer_roots,
            p,
            s,
            kappa2: model.poly(Coefficient::Kappa).scale_arg(2.0),
        })
    }

    pub fn width(&self) -> f64 {
        self.rho_max - self.rho_min
    }

    pub fn polynomial(&self) -> &Poly {
        &self.p
    }

    pub fn rho(&self, u: f64) -> f64 {
        self.rho_min + self.width() * u.sin().powi(2)
    }

    pub fn sqrt_neg_s(&self, rho: f64) -> f64 {
        (-self.s.eval(rho)).max(0.0).sqrt()
    }

    /// `dx/du` along the rising half period.
    pub fn dx_du(&self, u: f64) -> f64 {
        let rho = self.rho(u);
        2.0 * self.kappa2.eval(rho) / self.sqrt_neg_s(rho)
    }

    /// `ρ_x` along the rising half period.
    pub fn rho_x(&self, u: f64) -> f64 {
        let rho = self.rho(u);
        self.width() * u.sin() * u.cos() * self.sqrt_neg_s(rho) / self.kappa2.eval(rho)
    }

    /// `√P(ρ)` written without cancellation inside the well.
    pub fn sqrt_p(&self, u: f64) -> f64 {
        let rho = self.rho(u);
        self.width() * (u.sin() * u.cos()).abs() * self.sqrt_neg_s(rho)
    }

    /// Nearest root of `P` adjacent to the well from outside.
    pub fn dual_point(&self) -> Result<DualPoint> {
        let below = self.outer_roots.iter().rev().find(|r| **r < self.rho_min).copied();
        let above = self.outer_roots.iter().find(|r| **r > self.rho_max).copied();
        let cand = match (below, above) {
            (Some(b), Some(a)) => {
                if self.rho_min - b <= a - self.rho_max {
                    (b, DualSide::Below)
                } else {
                    (a, DualSide::Above)
                }
            }
            (Some(b), None) => (b, DualSide::Below),
            (None, Some(a)) => (a, DualSide::Above),
            (None, None) => return Err(Error::NoDualPoint),
        };
        let gap = match cand.1 {
            DualSide::Below => self.rho_min - cand.0,
            DualSide::Above => cand.0 - self.rho_max,
        };
        Ok(DualPoint {
            rho: cand.0,
            side: cand.1,
            epsilon: gap / self.width(),
        })
    }
}

/// `∫₀^{X_x} f(ρ(x)) dx` over one full period, by adaptive quadrature in `u`.
pub fn period_integral<const K: usize, F: Fn(f64) -> [f64; K]>(well: &Well, f: F, opts: &QuadOptions) -> Result<[f64; K]> {
    quad::integrate(
        |u| {
            let w = 2.0 * well.dx_du(u);
            let mut v = f(well.rho(u));
            v.iter_mut().for_each(|c| *c *= w);
            v
        },
        0.0,
        FRAC_PI_2,
        opts,
    )
}

pub fn turning_points(model: &ModelSpec, params: &WaveParams) -> Result<(f64, f64)> {
    let w = Well::new(model, params, None)?;
    Ok((w.rho_min, w.rho_max))
}

pub fn turning_points_seeded(model: &ModelSpec, params: &WaveParams, seed: (f64, f64)) -> Result<(f64, f64)> {
    let w = Well::new(model, params, Some(seed))?;
    Ok((w.rho_min, w.rho_max))
}

/// First cancellation point of `μx − 𝒲ρ` next to the well, on whichever side
/// lies closer.
pub fn dual_point(model: &ModelSpec, params: &WaveParams) -> Result<DualPoint> {
    match Well::new(model, params, None) {
        Ok(w) => w.dual_point(),
        Err(Error::DegenerateWell { .. }) => Err(Error::NoDualPoint),
        Err(e) => Err(e),
    }
}

pub fn rho_dual(model: &ModelSpec, params: &WaveParams) -> Result<f64> {
    dual_point(model, params).map(|d| d.rho)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WaveProfile {
    pub params: WaveParams,
    pub x_grid: Vec<f64>,
    pub rho: Vec<f64>,
    /// `ρ_x` at the grid points.
    pub rho_x: Vec<f64>,
    pub v: Vec<f64>,
    pub theta: Vec<f64>,
    #[serde(rename = "V")]
    pub vv: Vec<[f64; 2]>,
    pub x_period: f64,
    pub xi_phi: f64,
    pub k_x: f64,
    pub k_phi: f64,
    pub omega_x: f64,
    pub rho_min: f64,
    pub rho_max: f64,
    /// Points per half period; the full grid has `2·n_half − 1` points.
    pub n_half: usize,
    /// Quadrature weights of the full-period trapezoid rule in `u`, so that
    /// `Σ wᵢ f(xᵢ) ≈ ∫₀^{X_x} f dx`.
    pub weights: Vec<f64>,
    /// Max deviation of an independent ODE integration of the profile, if run.
    pub cross_check_defect: Option<f64>,
}

#[derive(Debug, Clone, Copy)]
pub struct ProfileOptions {
    pub n_points: usize,
    pub seed: Option<(f64, f64)>,
    pub cross_check: bool,
    pub quad: QuadOptions,
}

impl Default for ProfileOptions {
    fn default() -> Self {
        ProfileOptions {
            n_points: 256,
            seed: None,
            cross_check: true,
            quad: QuadOptions::default(),
        }
    }
}

pub fn solve_profile(model: &ModelSpec, params: &WaveParams, n_points: usize) -> Result<WaveProfile> {
    solve_profile_with(model, params, &ProfileOptions { n_points, ..Default::default() })
}

pub fn solve_profile_with(model: &ModelSpec, params: &WaveParams, opts: &ProfileOptions) -> Result<WaveProfile> {
    let n = opts.n_points;
    if n < 64 {
        return Err(Error::InvalidInput(format!("n_points must be at least 64, got {n}")));
    }
    let well = Well::new(model, params, opts.seed)?;
    let h = FRAC_PI_2 / (n - 1) as f64;
    let us: Vec<f64> = (0..n).map(|j| j as f64 * h).collect();
    let nu_of = |rho: f64| (params.mu_phi - params.c_x * rho) / (2.0 * rho * model.kappa(2.0 * rho));

    let mut xs = vec![0.0; n];
    let mut ths = vec![0.0; n];
    for j in 1..n {
        let inc = quad::integrate(
            |u| {
                let d = well.dx_du(u);
                [d, nu_of(well.rho(u)) * d]
            },
            us[j - 1],
            us[j],
            &opts.quad,
        )?;
        xs[j] = xs[j - 1] + inc[0];
        ths[j] = ths[j - 1] + inc[1];
    }
    let x_period = 2.0 * xs[n - 1];
    let xi_phi = 2.0 * ths[n - 1];

    let total = 2 * n - 1;
    let mut x_grid = Vec::with_capacity(total);
    let mut rho = Vec::with_capacity(total);
    let mut rho_x = Vec::with_capacity(total);
    let mut theta = Vec::with_capacity(total);
    let mut weights = Vec::with_capacity(total);
    for j in 0..n {
        x_grid.push(xs[j]);
        rho.push(well.rho(us[j]));
        rho_x.push(well.rho_x(us[j]));
        theta.push(ths[j]);
        // The half-period point is interior to the full-period rule.
        let end = if j == 0 { 0.5 } else { 1.0 };
        weights.push(h * end * well.dx_du(us[j]));
    }
    // Even reflection about the half period.
    for k in 1..n {
        let j = n - 1 - k;
        x_grid.push(x_period - xs[j]);
        rho.push(rho[j]);
        rho_x.push(-rho_x[j]);
        theta.push(xi_phi - ths[j]);
        weights.push(if j == 0 { weights[0] } else { h * well.dx_du(us[j]) });
    }
    let v: Vec<f64> = rho.iter().map(|&r| nu_of(r)).collect();
    let vv: Vec<[f64; 2]> = rho
        .iter()
        .zip(&theta)
        .map(|(&r, &t)| {
            let a = (2.0 * r).sqrt();
            [a * t.cos(), -a * t.sin()]
        })
        .collect();

    let mut profile = WaveProfile {
        params: *params,
        x_grid,
        rho,
        rho_x,
        v,
        theta,
        vv,
        x_period,
        xi_phi,
        k_x: 1.0 / x_period,
        k_phi: xi_phi / x_period,
        omega_x: -params.c_x / x_period,
        rho_min: well.rho_min,
        rho_max: well.rho_max,
        n_half: n,
        weights,
        cross_check_defect: None,
    };
    if opts.cross_check {
        let defect = ode_cross_check(model, &well, &profile)?;
        let tolerance = 1e-8 * well.rho_max;
        if defect > tolerance {
            return Err(Error::CrossCheckFailed { defect, tolerance });
        }
        profile.cross_check_defect = Some(defect);
    }
    Ok(profile)
}

/// Right-hand side pieces of the second-order mass equation `ρ'' = G'(ρ)/2`
/// with `G = P/κ(2ρ)²`, as jets in ρ.
pub(crate) struct MassField {
    p: Poly,
    kappa2: Poly,
}

impl MassField {
    pub(crate) fn new(model: &ModelSpec, params: &WaveParams) -> Self {
        MassField {
            p: well_polynomial(model, params),
            kappa2: model.poly(Coefficient::Kappa).scale_arg(2.0),
        }
    }

    /// Jet of `G(ρ) = ρ_x²` at `rho`.
    pub(crate) fn g_jet(&self, rho: f64) -> Jet {
        let r = Jet::variable(rho);
        let k = self.kappa2.eval_jet(&r);
        self.p.eval_jet(&r) / (k * k)
    }
}

/// Integrates `ρ'' = G'(ρ)/2` across each grid interval, restarting from the
/// quadrature values at the left node, and reports the largest mismatch at
/// the right node. Restarting keeps the check well conditioned near
/// homoclinic orbits, where errors grow exponentially over a period.
fn ode_cross_check(model: &ModelSpec, _well: &Well, prof: &WaveProfile) -> Result<f64> {
    let field = MassField::new(model, &prof.params);
    let rhs = |_x: f64, y: &[f64], dy: &mut [f64]| {
        dy[0] = y[1];
        dy[1] = 0.5 * field.g_jet(y[0]).deriv(1);
    };
    let mut defect: f64 = 0.0;
    for i in 0..prof.x_grid.len() - 1 {
        let y0 = [prof.rho[i], prof.rho_x[i]];
        let y = crate::ode::integrate(rhs, prof.x_grid[i], prof.x_grid[i + 1], &y0, OdeOptions::default())?;
        defect = defect.max((y[0] - prof.rho[i + 1]).abs());
    }
    Ok(defect)
}

/// Per-period averages of a profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Averages {
    pub m_bar: f64,
    pub q_bar: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    pub sigma3: f64,
    pub tau0: f64,
    pub tau1: f64,
    pub tau2: f64,
    pub tau3: f64,
    /// `max_j |σ_j − τ_j/k_x| / max(|σ_j|, X_x·scale)` over `j = 1, 2, 3`.
    pub sigma_tau_defect: f64,
}

/// `𝒱_x` from the sampled quantities: `𝒱_x = (ρ_x/(2ρ))𝒱 + v J𝒱`.
pub fn v_x(vv: [f64; 2], rho: f64, rho_x: f64, v: f64) -> [f64; 2] {
    let jv = [vv[1], -vv[0]];
    let a = rho_x / (2.0 * rho);
    [a * vv[0] + v * jv[0], a * vv[1] + v * jv[1]]
}

pub fn wave_averages(model: &ModelSpec, prof: &WaveProfile) -> Result<Averages> {
    wave_averages_with(model, prof, &QuadOptions::default())
}

pub fn wave_averages_with(model: &ModelSpec, prof: &WaveProfile, opts: &QuadOptions) -> Result<Averages> {
    // Sample route: trapezoid in u over the stored 𝒱 samples.
    let mut s = [0.0; 5];
    for i in 0..prof.x_grid.len() {
        let w = prof.weights[i];
        let vv = prof.vv[i];
        let a = vv[0] * vv[0] + vv[1] * vv[1];
        let k = model.kappa(a);
        let vx = v_x(vv, prof.rho[i], prof.rho_x[i], prof.v[i]);
        let jv = [vv[1], -vv[0]];
        s[0] += w * 0.5 * a;
        s[1] += w * prof.rho[i] * prof.v[i];
        s[2] += w * k * a;
        s[3] += w * k * (jv[0] * vx[0] + jv[1] * vx[1]);
        s[4] += w * k * (vx[0] * vx[0] + vx[1] * vx[1]);
    }
    let xp = prof.x_period;

    // Quadrature route: averages over the scaled period, in ρ only.
    let params = prof.params;
    let well = Well::new(model, &params, Some((prof.rho_min, prof.rho_max)))?;
    let t = period_integral(
        &well,
        |rho| {
            let [k, k1, _] = model.kappa_derivs(2.0 * rho);
            let v = (params.mu_phi - params.c_x * rho) / (2.0 * rho * k);
            let wr = effective_potential_jet(model, rho, &params).map(|j| j.value()).unwrap_or(f64::NAN);
            [
                1.0,
                k1 * 2.0 * rho,
                k * 2.0 * rho,
                k * 2.0 * rho * v,
                2.0 * (params.mu_x - wr) + 2.0 * k * rho * v * v,
            ]
        },
        opts,
    )?;
    let xq = t[0];
    let tau = [t[1] / xq, t[2] / xq, t[3] / xq, t[4] / xq];
    let k_x = prof.k_x;
    let sig = [s[2], s[3], s[4]];
    let scale = sig.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let defect = (0..3)
        .map(|j| (sig[j] - tau[j + 1] / k_x).abs() / scale.max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max);
    Ok(Averages {
        m_bar: s[0] / xp,
        q_bar: s[1] / xp,
        sigma1: sig[0],
        sigma2: sig[1],
        sigma3: sig[2],
        tau0: tau[0],
        tau1: tau[1],
        tau2: tau[2],
        tau3: tau[3],
        sigma_tau_defect: defect,
    })
}
