//! Linearized spectral problem about a profile, monodromy matrix and Evans
//! function `D_ξ(λ, η) = det(R(x₀+X, x₀; λ, η) − e^{iξ} diag(e^{ξφJ}, e^{ξφJ}))`.
//!
//! The profile is integrated together with the fundamental matrix so that the
//! coefficients are available at every stage of the integrator.

use crate::error::{Error, Result};
use crate::exec::{self, ExecMode};
use crate::model::ModelSpec;
use crate::ode::{OdeOptions, Stepper};
use crate::profile::{nu_jet, MassField, WaveParams, WaveProfile};
use crate::jet::Jet;
use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub type C64 = Complex64;
pub type CMat4 = Matrix4<C64>;


#[derive(Debug, Clone, Copy)]
pub struct SpectralOptions {
    pub ode: OdeOptions,
    /// Largest supported |λ|.
    pub lambda_ceiling: f64,
    /// Base point `x₀` of the monodromy as a fraction of the period.
    pub x0_fraction: f64,
    pub exec: ExecMode,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        SpectralOptions {
            ode: OdeOptions {
                rel_tol: 1e-12,
                abs_tol: 1e-14,
                max_steps: 2_000_000,
            },
            lambda_ceiling: 500.0,
            x0_fraction: 0.25,
            exec: ExecMode::Parallel,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralQuery {
    pub lambda: C64,
    pub xi: f64,
    pub eta_sq: f64,
}

/// 𝒱 and its first three derivatives at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileJet {
    pub v: [f64; 2],
    pub vx: [f64; 2],
    pub vxx: [f64; 2],
    pub vxxx: [f64; 2],
}

#[derive(Debug, Clone)]
pub struct MonodromyResult {
    pub r: CMat4,
    pub det_r: C64,
    /// `exp(∫ tr M)` over the period.
    pub liouville: C64,
    pub liouville_defect: f64,
    pub x0: f64,
    /// 𝒱, 𝒱_x, 𝒱_xx, 𝒱_xxx at `x₀`.
    pub base: ProfileJet,
    /// Rotation `e^{ξφJ}` accumulated over one period.
    pub xi_phi: f64,
}

impl MonodromyResult {
    /// `D_ξ = det(R − e^{iξ} diag(e^{ξφJ}, e^{ξφJ}))`.
    pub fn evans(&self, xi: f64) -> C64 {
        (self.r - block_rotation(self.xi_phi) * C64::from_polar(1.0, xi)).determinant()
    }
}

/// `diag(e^{θJ}, e^{θJ})` as a complex matrix.
pub fn block_rotation(theta: f64) -> CMat4 {
    let (s, c) = theta.sin_cos();
    let mut m = CMat4::zeros();
    for b in [0, 2] {
        m[(b, b)] = c.into();
        m[(b, b + 1)] = s.into();
        m[(b + 1, b)] = (-s).into();
        m[(b + 1, b + 1)] = c.into();
    }
    m
}

fn j2() -> Matrix2<C64> {
    Matrix2::new(0.0.into(), 1.0.into(), (-1.0).into(), 0.0.into())
}

fn outer(a: [f64; 2], b: [f64; 2]) -> Matrix2<C64> {
    Matrix2::new(
        (a[0] * b[0]).into(),
        (a[0] * b[1]).into(),
        (a[1] * b[0]).into(),
        (a[1] * b[1]).into(),
    )
}

fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

/// First-order system matrix `M` with `Φ = (ψ, ψ')`, `Φ' = MΦ`, where
/// `κψ'' = Aψ + Bψ'` is the spectral relation solved for `ψ''`.
pub fn coefficient_matrix(
    model: &ModelSpec,
    params: &WaveParams,
    pj: &ProfileJet,
    lambda: C64,
    eta_sq: f64,
) -> CMat4 {
    let (v, vx, vxx) = (pj.v, pj.vx, pj.vxx);
    let a = dot(v, v);
    let [k, k1, k2] = model.kappa_derivs(a);
    let w = model.w_derivs(a);
    let s = dot(v, vx);
    let vx2 = dot(vx, vx);
    let id = Matrix2::<C64>::identity();
    let j = j2();
    let aa = id * C64::from(k1 * vx2 + 2.0 * w[1] - params.omega_phi + eta_sq * k)
        + outer(v, v) * C64::from(2.0 * k2 * vx2 + 4.0 * w[2])
        - outer(vx, v) * C64::from(4.0 * k2 * s)
        - outer(vx, vx) * C64::from(2.0 * k1)
        - outer(vxx, v) * C64::from(2.0 * k1)
        + j * lambda;
    let bb = outer(v, vx) * C64::from(2.0 * k1) - j * C64::from(params.c_x) - id * C64::from(2.0 * k1 * s)
        - outer(vx, v) * C64::from(2.0 * k1);
    let mut m = CMat4::zeros();
    m[(0, 2)] = 1.0.into();
    m[(1, 3)] = 1.0.into();
    for r in 0..2 {
        for c in 0..2 {
            m[(2 + r, c)] = aa[(r, c)] / k;
            m[(2 + r, 2 + c)] = bb[(r, c)] / k;
        }
    }
    m
}

/// Integrates `R' = M(x, aux)R` with `R(x0) = I` alongside auxiliary real
/// unknowns, returning the final auxiliary state and `R(x1)`.
fn fundamental<F>(aux0: &[f64], x0: f64, x1: f64, opts: &OdeOptions, f: F) -> Result<(Vec<f64>, CMat4)>
where
    F: Fn(f64, &[f64], &mut [f64]) -> CMat4,
{
    let na = aux0.len();
    let mut y0 = aux0.to_vec();
    for i in 0..4 {
        for j in 0..4 {
            y0.push(if i == j { 1.0 } else { 0.0 });
            y0.push(0.0);
        }
    }
    let rhs = |x: f64, y: &[f64], dy: &mut [f64]| {
        let m = f(x, &y[..na], &mut dy[..na]);
        let r = |i: usize, j: usize| C64::new(y[na + 2 * (4 * i + j)], y[na + 2 * (4 * i + j) + 1]);
        for i in 0..4 {
            for j in 0..4 {
                let mut acc = C64::new(0.0, 0.0);
                for k in 0..4 {
                    acc += m[(i, k)] * r(k, j);
                }
                dy[na + 2 * (4 * i + j)] = acc.re;
                dy[na + 2 * (4 * i + j) + 1] = acc.im;
            }
        }
    };
    let mut st = Stepper::new(rhs, x0, &y0, 0.0, *opts);
    st.advance_to(x1)?;
    let y = st.y;
    let r = CMat4::from_fn(|i, j| C64::new(y[na + 2 * (4 * i + j)], y[na + 2 * (4 * i + j) + 1]));
    Ok((y[..na].to_vec(), r))
}

/// Spectral problem about one profile; evaluations at distinct `(λ, η²)` are
/// independent.
pub struct EvansContext<'a> {
    model: &'a ModelSpec,
    params: WaveParams,
    field: MassField,
    x_period: f64,
    xi_phi: f64,
    rho_min: f64,
    x0: f64,
    y_x0: [f64; 3],
    opts: SpectralOptions,
}

impl<'a> EvansContext<'a> {
    pub fn new(model: &'a ModelSpec, profile: &WaveProfile, opts: SpectralOptions) -> Result<Self> {
        model.check_alpha(2.0 * profile.rho_max)?;
        let field = MassField::new(model, &profile.params);
        let mut ctx = EvansContext {
            model,
            params: profile.params,
            field,
            x_period: profile.x_period,
            xi_phi: profile.xi_phi,
            rho_min: profile.rho_min,
            x0: opts.x0_fraction * profile.x_period,
            y_x0: [profile.rho_min, 0.0, 0.0],
            opts,
        };
        ctx.y_x0 = ctx.profile_state_at(&[ctx.x0])?[0];
        Ok(ctx)
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn x_period(&self) -> f64 {
        self.x_period
    }

    pub fn xi_phi(&self) -> f64 {
        self.xi_phi
    }

    pub fn options(&self) -> &SpectralOptions {
        &self.opts
    }

    fn profile_rhs(&self, y: &[f64], dy: &mut [f64]) {
        dy[0] = y[1];
        dy[1] = 0.5 * self.field.g_jet(y[0]).deriv(1);
        dy[2] = nu_jet(self.model, Jet::variable(y[0]), self.params.c_x, self.params.mu_phi).value();
    }

    /// Profile state `(ρ, ρ_x, θ)` at increasing abscissae, from `x = 0`.
    pub fn profile_state_at(&self, xs: &[f64]) -> Result<Vec<[f64; 3]>> {
        let mut st = Stepper::new(
            |_, y: &[f64], dy: &mut [f64]| self.profile_rhs(y, dy),
            0.0,
            &[self.rho_min, 0.0, 0.0],
            0.0,
            self.opts.ode,
        );
        let mut out = Vec::with_capacity(xs.len());
        for &x in xs {
            st.advance_to(x)?;
            out.push([st.y[0], st.y[1], st.y[2]]);
        }
        Ok(out)
    }

    /// 𝒱 and derivatives from `(ρ, ρ_x, θ)`, via `f = √(2ρ)e^{−iθ}` and
    /// `L = log f`.
    pub fn profile_jet(&self, y: &[f64]) -> ProfileJet {
        let (rho, p, th) = (y[0], y[1], y[2]);
        let g = self.field.g_jet(rho);
        let nu = nu_jet(self.model, Jet::variable(rho), self.params.c_x, self.params.mu_phi);
        let (n0, n1, n2) = (nu.value(), nu.deriv(1), nu.deriv(2));
        let r2 = 0.5 * g.deriv(1);
        let r3 = 0.5 * g.deriv(2) * p;
        let l1 = C64::new(p / (2.0 * rho), -n0);
        let l2 = C64::new(r2 / (2.0 * rho) - p * p / (2.0 * rho * rho), -n1 * p);
        let l3 = C64::new(
            r3 / (2.0 * rho) - 1.5 * p * r2 / (rho * rho) + p.powi(3) / rho.powi(3),
            -(n2 * p * p + n1 * r2),
        );
        let f = C64::from_polar((2.0 * rho).sqrt(), -th);
        let f1 = f * l1;
        let f2 = f * (l2 + l1 * l1);
        let f3 = f * (l3 + 3.0 * l1 * l2 + l1 * l1 * l1);
        ProfileJet {
            v: [f.re, f.im],
            vx: [f1.re, f1.im],
            vxx: [f2.re, f2.im],
            vxxx: [f3.re, f3.im],
        }
    }

    fn check_lambda(&self, lambda: C64) -> Result<()> {
        if lambda.norm() > self.opts.lambda_ceiling {
            return Err(Error::LambdaCeiling {
                modulus: lambda.norm(),
                ceiling: self.opts.lambda_ceiling,
            });
        }
        Ok(())
    }

    /// `M(x)` and the profile jet at each requested abscissa.
    pub fn sample_system(&self, xs: &[f64], lambda: C64, eta_sq: f64) -> Result<Vec<(ProfileJet, CMat4)>> {
        self.check_lambda(lambda)?;
        let states = self.profile_state_at(xs)?;
        Ok(states
            .iter()
            .map(|y| {
                let pj = self.profile_jet(y);
                (pj, coefficient_matrix(self.model, &self.params, &pj, lambda, eta_sq))
            })
            .collect())
    }

    pub fn monodromy(&self, lambda: C64, eta_sq: f64) -> Result<MonodromyResult> {
        self.check_lambda(lambda)?;
        let aux0 = [self.y_x0[0], self.y_x0[1], self.y_x0[2], 0.0];
        let (aux, r) = fundamental(&aux0, self.x0, self.x0 + self.x_period, &self.opts.ode, |_, y, dy| {
            self.profile_rhs(y, dy);
            let pj = self.profile_jet(y);
            let [k, k1, _] = self.model.kappa_derivs(2.0 * y[0]);
            dy[3] = -4.0 * k1 * dot(pj.v, pj.vx) / k;
            coefficient_matrix(self.model, &self.params, &pj, lambda, eta_sq)
        })?;
        let det_r = r.determinant();
        let liouville = C64::from(aux[3].exp());
        let liouville_defect = (det_r - liouville).norm() / det_r.norm();
        Ok(MonodromyResult {
            r,
            det_r,
            liouville,
            liouville_defect,
            x0: self.x0,
            base: self.profile_jet(&self.y_x0),
            xi_phi: self.xi_phi,
        })
    }

    pub fn evans(&self, xi: f64, lambda: C64, eta_sq: f64) -> Result<C64> {
        Ok(self.monodromy(lambda, eta_sq)?.evans(xi))
    }

    /// Evans function at many `(ξ, λ, η²)` points, in input order.
    pub fn evans_batch(&self, queries: &[SpectralQuery]) -> Result<Vec<C64>> {
        exec::try_map(self.opts.exec, queries, |q| self.evans(q.xi, q.lambda, q.eta_sq))
    }
}

pub fn monodromy(model: &ModelSpec, profile: &WaveProfile, lambda: C64, eta_sq: f64) -> Result<MonodromyResult> {
    EvansContext::new(model, profile, SpectralOptions::default())?.monodromy(lambda, eta_sq)
}

pub fn evans(model: &ModelSpec, profile: &WaveProfile, xi: f64, lambda: C64, eta_sq: f64) -> Result<C64> {
    EvansContext::new(model, profile, SpectralOptions::default())?.evans(xi, lambda, eta_sq)
}

/// Monodromy about the zero state `U ≡ 0` over a period `x_period`, where the
/// system has constant coefficients.
pub fn zero_state_monodromy(
    model: &ModelSpec,
    params: &WaveParams,
    lambda: C64,
    eta_sq: f64,
    x_period: f64,
    opts: &OdeOptions,
) -> Result<CMat4> {
    let pj = ProfileJet {
        v: [0.0; 2],
        vx: [0.0; 2],
        vxx: [0.0; 2],
        vxxx: [0.0; 2],
    };
    let m = coefficient_matrix(model, params, &pj, lambda, eta_sq);
    fundamental(&[], 0.0, x_period, opts, |_, _, _| m).map(|(_, r)| r)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Rect {
    fn corners(&self) -> [C64; 4] {
        [
            C64::new(self.re_min, self.im_min),
            C64::new(self.re_max, self.im_min),
            C64::new(self.re_max, self.im_max),
            C64::new(self.re_min, self.im_max),
        ]
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ContourOptions {
    pub points_per_edge: usize,
    pub max_rounds: usize,
    /// Relative modulus below which a boundary value counts as a root.
    pub floor: f64,
}

impl Default for ContourOptions {
    fn default() -> Self {
        ContourOptions {
            points_per_edge: 24,
            max_rounds: 40,
            floor: 1e-13,
        }
    }
}

fn arg_step(a: C64, b: C64) -> f64 {
    (b / a).arg()
}

/// Winding number of `D_ξ(·, η)` around a rectangle. Segments are bisected
/// until consecutive samples differ by less than either modulus and by less
/// than π/4 in argument, so the chord between them stays away from zero.
pub fn count_unstable(ctx: &EvansContext, xi: f64, eta_sq: f64, rect: &Rect, copts: &ContourOptions) -> Result<i64> {
    let c = rect.corners();
    let mut ts: Vec<f64> = (0..4 * copts.points_per_edge)
        .map(|k| k as f64 / copts.points_per_edge as f64)
        .collect();
    let point = |t: f64| {
        let e = (t.floor() as usize).min(3);
        let s = t - e as f64;
        c[e] + (c[(e + 1) % 4] - c[e]) * s
    };
    let eval = |ts: &[f64]| -> Result<Vec<C64>> {
        let qs: Vec<SpectralQuery> = ts.iter().map(|&t| SpectralQuery { lambda: point(t), xi, eta_sq }).collect();
        ctx.evans_batch(&qs)
    };
    let mut ds = eval(&ts)?;
    for round in 0..=copts.max_rounds {
        let scale = ds.iter().fold(0.0f64, |m, d| m.max(d.norm()));
        if let Some(k) = ds.iter().position(|d| d.norm() <= copts.floor * scale) {
            let z = point(ts[k]);
            return Err(Error::RootOnContour { re: z.re, im: z.im });
        }
        let n = ts.len();
        let bad: Vec<usize> = (0..n)
            .filter(|&k| {
                let (a, b) = (ds[k], ds[(k + 1) % n]);
                arg_step(a, b).abs() >= 0.25 * PI || (b - a).norm() >= a.norm().min(b.norm())
            })
            .collect();
        if bad.is_empty() {
            let total: f64 = (0..n).map(|k| arg_step(ds[k], ds[(k + 1) % n])).sum();
            return Ok((total / (2.0 * PI)).round() as i64);
        }
        if round == copts.max_rounds {
            let k = bad[0];
            let z = point(ts[k]);
            return Err(Error::RootOnContour { re: z.re, im: z.im });
        }
        let mids: Vec<f64> = bad
            .iter()
            .map(|&k| {
                let t1 = if k + 1 == n { 4.0 } else { ts[k + 1] };
                0.5 * (ts[k] + t1)
            })
            .collect();
        let dm = eval(&mids)?;
        let mut merged: Vec<(f64, C64)> = ts.into_iter().zip(ds).chain(mids.into_iter().zip(dm)).collect();
        merged.sort_by(|a, b| a.0.total_cmp(&b.0));
        ts = merged.iter().map(|m| m.0).collect();
        ds = merged.iter().map(|m| m.1).collect();
    }
    unreachable!()
}

#[derive(Debug, Clone, Copy)]
pub struct EigencurveOptions {
    /// Disk radius is `max(min_radius, radius_per_xi·|ξ|)`.
    pub radius_per_xi: f64,
    pub min_radius: f64,
    pub nodes: usize,
}

impl Default for EigencurveOptions {
    fn default() -> Self {
        EigencurveOptions {
            radius_per_xi: 0.5,
            min_radius: 1e-3,
            nodes: 64,
        }
    }
}

/// Roots of an analytic function inside the circle `|z| = r` from samples on
/// the circle: Taylor coefficients by DFT give `D'`, contour moments give the
/// power sums, and Newton's identities give the monic polynomial.
pub fn roots_in_disk(samples: &[C64], radius: f64, expected: usize) -> Result<Vec<C64>> {
    let n = samples.len();
    let nodes: Vec<C64> = (0..n)
        .map(|k| C64::from_polar(radius, 2.0 * PI * k as f64 / n as f64))
        .collect();
    // a_m r^m = (1/n) Σ D_k e^{−2πikm/n}
    let coeffs: Vec<C64> = (0..n)
        .map(|m| {
            samples
                .iter()
                .enumerate()
                .map(|(k, d)| d * C64::from_polar(1.0, -2.0 * PI * (k * m % n) as f64 / n as f64))
                .sum::<C64>()
                / n as f64
        })
        .collect();
    let zdz: Vec<C64> = (0..n)
        .map(|k| {
            (1..n)
                .map(|m| coeffs[m] * m as f64 * C64::from_polar(1.0, 2.0 * PI * (k * m % n) as f64 / n as f64))
                .sum()
        })
        .collect();
    let moments: Vec<C64> = (0..=expected)
        .map(|p| {
            (0..n)
                .map(|k| nodes[k].powu(p as u32) * zdz[k] / samples[k])
                .sum::<C64>()
                / n as f64
        })
        .collect();
    let count = moments[0].re.round() as i64;
    if count != expected as i64 || (moments[0].re - count as f64).abs() > 0.1 {
        return Err(Error::DiskCaptureFailed { count });
    }
    // Newton's identities: k e_k = Σ_{i=1}^k (−1)^{i−1} e_{k−i} s_i.
    let mut e = vec![C64::new(1.0, 0.0)];
    for k in 1..=expected {
        let mut acc = C64::new(0.0, 0.0);
        for i in 1..=k {
            let sgn = if i % 2 == 1 { 1.0 } else { -1.0 };
            acc += e[k - i] * moments[i] * sgn;
        }
        e.push(acc / k as f64);
    }
    // z^n − e1 z^{n−1} + e2 z^{n−2} − …, lowest degree first.
    let mut poly = vec![C64::new(0.0, 0.0); expected + 1];
    for (k, ek) in e.iter().enumerate() {
        let sgn = if k % 2 == 0 { 1.0 } else { -1.0 };
        poly[expected - k] = ek * sgn;
    }
    Ok(crate::poly::complex_roots(&poly))
}

fn best_matching(prev: &[C64], next: &[C64]) -> Vec<C64> {
    let n = next.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best = perm.clone();
    let mut best_cost = f64::INFINITY;
    fn permute(k: usize, perm: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if k == perm.len() {
            f(perm);
            return;
        }
        for i in k..perm.len() {
            perm.swap(k, i);
            permute(k + 1, perm, f);
            perm.swap(k, i);
        }
    }
    permute(0, &mut perm, &mut |p: &[usize]| {
        let cost: f64 = p.iter().enumerate().map(|(i, &j)| (prev[i] - next[j]).norm_sqr()).sum();
        if cost < best_cost {
            best_cost = cost;
            best = p.to_vec();
        }
    });
    best.iter().map(|&j| next[j]).collect()
}

/// The four Evans roots near the origin for each ξ, ordered by continuity
/// along `xi_list`.
pub fn eigencurves(ctx: &EvansContext, xi_list: &[f64], eopts: &EigencurveOptions) -> Result<Vec<[C64; 4]>> {
    let mut queries = Vec::new();
    let mut radii = Vec::new();
    for &xi in xi_list {
        let r = eopts.min_radius.max(eopts.radius_per_xi * xi.abs());
        radii.push(r);
        for k in 0..eopts.nodes {
            queries.push(SpectralQuery {
                lambda: C64::from_polar(r, 2.0 * PI * k as f64 / eopts.nodes as f64),
                xi,
                eta_sq: 0.0,
            });
        }
    }
    let values = ctx.evans_batch(&queries)?;
    let mut out: Vec<[C64; 4]> = Vec::with_capacity(xi_list.len());
    for (i, chunk) in values.chunks(eopts.nodes).enumerate() {
        let mut roots = roots_in_disk(chunk, radii[i], 4)?;
        roots.sort_by(|a, b| a.im.total_cmp(&b.im).then(a.re.total_cmp(&b.re)));
        if let Some(prev) = out.last() {
            roots = best_matching(prev, &roots);
        }
        out.push([roots[0], roots[1], roots[2], roots[3]]);
    }
    Ok(out)
}

/// Sign changes of `D_ξ(λ, η)` for real `λ` on a grid, ξ ∈ {0, π}; returns the
/// largest λ at which a sign change was seen (0 if none).
pub fn last_real_sign_change(ctx: &EvansContext, xi: f64, eta_sq: f64, lambdas: &[f64]) -> Result<f64> {
    let qs: Vec<SpectralQuery> = lambdas
        .iter()
        .map(|&l| SpectralQuery { lambda: l.into(), xi, eta_sq })
        .collect();
    let d = ctx.evans_batch(&qs)?;
    let mut last = 0.0;
    for k in 1..d.len() {
        if (d[k].re < 0.0) != (d[k - 1].re < 0.0) {
            last = lambdas[k];
        }
    }
    Ok(last)
}

/// Threshold above which `D₀` and `D_π` are expected positive on the real axis:
/// twice the last observed sign change over `η² ∈ eta_sqs`, at least 1.
pub fn calibrate_high_frequency(ctx: &EvansContext, eta_sqs: &[f64], lambda_max: f64, n: usize) -> Result<f64> {
    let grid: Vec<f64> = (1..=n).map(|k| lambda_max * k as f64 / n as f64).collect();
    let mut last: f64 = 0.0;
    for &e in eta_sqs {
        for xi in [0.0, PI] {
            last = last.max(last_real_sign_change(ctx, xi, e, &grid)?);
        }
    }
    Ok((2.0 * last).max(1.0))
}
