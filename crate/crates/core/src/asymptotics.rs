//! Harmonic (small-amplitude) and solitary (large-period) limits: limiting
//! parameters, the indices δ_hyp, δ_BF, 𝔞₀, the solitary action Θ_s with its
//! Vakhitov–Kolokolov index, and the constant-state verdict.

use crate::error::{Error, Result};
use crate::model::ModelSpec;
use crate::modulation::Verdict;
use crate::poly::Poly;
use crate::profile::{effective_potential_jet, well_polynomial, Well, WaveParams};
use crate::quad::{self, QuadOptions};
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

/// Parameters `(ωφ, μφ, μx)` of the constant state `(ρ⁰, kφ⁰)` at speed `cx`,
/// plus the Taylor jet of 𝒲ρ there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EndState {
    pub c_x: f64,
    pub rho0: f64,
    pub k_phi0: f64,
    pub omega_phi0: f64,
    pub mu_phi0: f64,
    pub mu_x0: f64,
    /// `∂ρ^k 𝒲ρ(ρ⁰)` for `k = 0..=4`.
    pub w_derivs: [f64; 5],
}

impl EndState {
    pub fn params(&self) -> WaveParams {
        WaveParams::new(self.mu_x0, self.c_x, self.omega_phi0, self.mu_phi0)
    }
}

fn check_state(model: &ModelSpec, rho0: f64) -> Result<()> {
    if !(rho0 > 0.0) || !rho0.is_finite() {
        return Err(Error::NonpositiveRho(rho0));
    }
    model.check_alpha(2.0 * rho0)
}

/// `μφ = cxρ + 2ρκ(2ρ)kφ`, `ωφ = cxkφ + (2ρκ'(2ρ) + κ(2ρ))kφ² + 2W'(2ρ)` and
/// `μx = 𝒲ρ(ρ)`, so that `ρ` is a critical point of 𝒲ρ with `ν(ρ) = kφ`.
pub fn end_state(model: &ModelSpec, c_x: f64, rho0: f64, k_phi0: f64) -> Result<EndState> {
    check_state(model, rho0)?;
    let a = 2.0 * rho0;
    let [k, k1, _] = model.kappa_derivs(a);
    let w = model.w_derivs(a);
    let mu_phi0 = c_x * rho0 + a * k * k_phi0;
    let omega_phi0 = c_x * k_phi0 + (a * k1 + k) * k_phi0 * k_phi0 + 2.0 * w[1];
    let p = WaveParams::new(0.0, c_x, omega_phi0, mu_phi0);
    let jet = effective_potential_jet(model, rho0, &p)?;
    let w_derivs = [jet.value(), jet.deriv(1), jet.deriv(2), jet.deriv(3), jet.deriv(4)];
    Ok(EndState {
        c_x,
        rho0,
        k_phi0,
        omega_phi0,
        mu_phi0,
        mu_x0: w_derivs[0],
        w_derivs,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HarmonicPoint {
    pub c_x: f64,
    pub rho0: f64,
    pub k_phi0: f64,
    pub omega_phi0: f64,
    pub mu_phi0: f64,
    pub mu_x0: f64,
    #[serde(rename = "X0")]
    pub x0: f64,
    pub delta_hyp: f64,
    #[serde(rename = "delta_BF")]
    pub delta_bf: f64,
    pub a0: f64,
}

/// `W''(2ρ) + (κ''(2ρ)ρ + κ'(2ρ))kφ²`.
pub fn delta_hyp(model: &ModelSpec, rho0: f64, k_phi0: f64) -> Result<f64> {
    check_state(model, rho0)?;
    let a = 2.0 * rho0;
    let [_, k1, k2] = model.kappa_derivs(a);
    let w = model.w_derivs(a);
    Ok(w[2] + (k2 * rho0 + k1) * k_phi0 * k_phi0)
}

fn delta_bf_at(model: &ModelSpec, st: &EndState) -> f64 {
    let a = 2.0 * st.rho0;
    let [k, k1, k2] = model.kappa_derivs(a);
    let w = model.w_derivs(a);
    let (w2, w3, w4) = (w[2], w[3], w[4]);
    let r = k1 / k;
    let q = k2 / k;
    let s = 1.0 / a;
    // (1/2)(κ/2ρ)(2π/X⁰)² reduces to ∂²ρ𝒲ρ / 2; used as is when ρ⁰ is not a
    // minimum, where X⁰ is undefined.
    let kk = 0.5 * st.w_derivs[2];
    let g3 = -3.0 * r * r - 2.0 * r * s + q;
    let g2 = w2 * (-12.0 * r * r - 6.0 * r * s + 4.0 * s * s + 3.0 * q) + 4.0 * w3 * (r + 2.0 * s) + 2.0 * w4;
    let g1 = 12.0 * w2 * w2 * (r * r + 4.0 * r * s + 3.0 * s * s)
        + 8.0 * w2 * w3 * (4.0 * r + 5.0 * s)
        + 4.0 / 3.0 * w3 * w3
        + 6.0 * w2 * w4;
    let t = w3 + 3.0 * w2 * (r + s);
    let g0 = 8.0 * w2 * t * t;
    kk * kk * kk * g3 + kk * kk * g2 + kk * g1 + g0
}

/// The Benjamin–Feir index at the constant state `(cx, ρ⁰, kφ⁰)`.
pub fn delta_bf(model: &ModelSpec, c_x: f64, rho0: f64, k_phi0: f64) -> Result<f64> {
    let st = end_state(model, c_x, rho0, k_phi0)?;
    Ok(delta_bf_at(model, &st))
}

fn a0_at(model: &ModelSpec, st: &EndState) -> f64 {
    let rho = st.rho0;
    let [k, k1, k2] = model.kappa_derivs(2.0 * rho);
    let [_, _, w2, w3, w4] = st.w_derivs;
    let bracket = 5.0 / 3.0 * w3 * w3 - w2 * w4 - 4.0 * w2 * w3 * (k1 / k - 1.0 / (2.0 * rho))
        + 16.0 * w2 * w2 * (k2 / k - k1 / (2.0 * rho * k) + 1.0 / (2.0 * rho * rho));
    bracket / (8.0 * w2 * w2 * w2)
}

/// Non-degeneracy index 𝔞₀ of the small-amplitude co-periodic result.
pub fn a0_index(model: &ModelSpec, c_x: f64, rho0: f64, k_phi0: f64) -> Result<f64> {
    let st = end_state(model, c_x, rho0, k_phi0)?;
    Ok(a0_at(model, &st))
}

pub fn harmonic_point(model: &ModelSpec, c_x: f64, rho0: f64, k_phi0: f64) -> Result<HarmonicPoint> {
    let st = end_state(model, c_x, rho0, k_phi0)?;
    let d2w = st.w_derivs[2];
    if !(d2w > 0.0) {
        return Err(Error::NotAMinimum { d2w });
    }
    let k = model.kappa(2.0 * rho0);
    Ok(HarmonicPoint {
        c_x,
        rho0,
        k_phi0,
        omega_phi0: st.omega_phi0,
        mu_phi0: st.mu_phi0,
        mu_x0: st.mu_x0,
        x0: 2.0 * PI * (k / (2.0 * rho0 * d2w)).sqrt(),
        delta_hyp: delta_hyp(model, rho0, k_phi0)?,
        delta_bf: delta_bf_at(model, &st),
        a0: a0_at(model, &st),
    })
}

/// Small-amplitude wave at `μx = μx⁰ + ε²` around the minimum `(cx, ρ⁰, kφ⁰)`.
pub fn harmonic_wave(model: &ModelSpec, c_x: f64, rho0: f64, k_phi0: f64, epsilon: f64) -> Result<WaveParams> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(Error::InvalidInput(format!("epsilon must be positive, got {epsilon}")));
    }
    let st = end_state(model, c_x, rho0, k_phi0)?;
    if !(st.w_derivs[2] > 0.0) {
        return Err(Error::NotAMinimum { d2w: st.w_derivs[2] });
    }
    let mut params = st.params();
    params.mu_x += epsilon * epsilon;
    let well = Well::new(model, &params, Some((rho0, rho0)))?;
    if !(well.rho_min < rho0 && well.rho_max > rho0) {
        return Err(Error::NoWellFound);
    }
    Ok(params)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolitaryData {
    pub c_x: f64,
    pub rho_endstate: f64,
    pub k_phi: f64,
    pub rho_s: f64,
    pub theta_s: f64,
    /// `∂²_{cx}Θ_s`, filled by [`vk_index`].
    pub d2_theta_s: Option<f64>,
}

/// Safeguarded Newton on a polynomial inside a sign-changing bracket.
fn polish_root(p: &Poly, mut a: f64, mut b: f64) -> f64 {
    let dp = p.derivative();
    let mut fa = p.eval(a);
    let mut x = 0.5 * (a + b);
    for _ in 0..200 {
        let fx = p.eval(x);
        if fx == 0.0 {
            return x;
        }
        if (fx < 0.0) == (fa < 0.0) {
            a = x;
            fa = fx;
        } else {
            b = x;
        }
        let d = dp.eval(x);
        let newton = x - fx / d;
        let next = if d != 0.0 && newton > a.min(b) && newton < a.max(b) { newton } else { 0.5 * (a + b) };
        if (next - x).abs() <= 1e-16 * x.abs().max(1e-300) || (b - a).abs() <= 1e-15 * x.abs() {
            return next;
        }
        x = next;
    }
    x
}

/// The simple root of `μx⁰ − 𝒲ρ` closest to `ρ⁰` on the side where the
/// homoclinic well lies, together with the cofactor `S = P/((ρ−ρ⁰)²(ρ−ρˢ))`.
fn solitary_root(model: &ModelSpec, st: &EndState) -> Result<(f64, Poly)> {
    let p = well_polynomial(model, &st.params());
    let q = p.deflate(st.rho0).deflate(st.rho0);
    let rho0 = st.rho0;
    let mut cands: Vec<f64> = q
        .roots()
        .iter()
        .filter(|z| z.im.abs() <= 1e-7 * (1.0 + z.re.abs()) && z.re > 0.0)
        .map(|z| z.re)
        .filter(|r| (r - rho0).abs() > 1e-9 * rho0)
        .collect();
    cands.sort_by(|a, b| (a - rho0).abs().total_cmp(&(b - rho0).abs()));
    for r in cands {
        // The well must fill the whole interval between ρ⁰ and ρˢ.
        let probe = [0.1, 0.5, 0.9].map(|t| rho0 + t * (r - rho0));
        if probe.iter().any(|x| p.eval(*x) <= 0.0) {
            continue;
        }
        let h = 1e-6 * (r - rho0).abs();
        let (lo, hi) = (r - h, r + h);
        let rs = if (q.eval(lo) < 0.0) != (q.eval(hi) < 0.0) { polish_root(&q, lo, hi) } else { r };
        model.check_alpha(2.0 * rs.max(rho0))?;
        let s = q.deflate(rs);
        return Ok((rs, s));
    }
    Err(Error::NoSolitaryWave)
}

fn theta_s_at(model: &ModelSpec, st: &EndState, opts: &QuadOptions) -> Result<(f64, f64)> {
    let (rs, s) = solitary_root(model, st)?;
    let d = st.rho0 - rs;
    let ad = d.abs();
    // ρ = ρˢ + Δ sin²u; √P = |Δ|cos²u · sin u · √(Δ S(ρ)).
    let theta = quad::integrate_scalar(
        |u| {
            let (sn, cs) = u.sin_cos();
            let rho = rs + d * sn * sn;
            let inner = (d * s.eval(rho)).max(0.0).sqrt();
            ad * cs * cs * sn * inner * 2.0 * ad * sn * cs / rho
        },
        0.0,
        FRAC_PI_2,
        opts,
    )?;
    Ok((rs, theta))
}

/// `Θ_s = 2∫ √(μx⁰ − 𝒲ρ) √(κ(2ρ)/ρ) dρ` between the end state and the
/// turning point of the solitary wave.
pub fn solitary_action(model: &ModelSpec, c_x: f64, rho_endstate: f64, k_phi: f64) -> Result<SolitaryData> {
    let st = end_state(model, c_x, rho_endstate, k_phi)?;
    let (rho_s, theta_s) = theta_s_at(model, &st, &QuadOptions::default())?;
    Ok(SolitaryData {
        c_x,
        rho_endstate,
        k_phi,
        rho_s,
        theta_s,
        d2_theta_s: None,
    })
}

/// Second difference of Θ_s in `cx` at step `h`, holding `(ρ⁰, kφ)` fixed.
fn second_difference(model: &ModelSpec, c_x: f64, rho: f64, k_phi: f64, h: f64) -> Result<f64> {
    let t = |c: f64| solitary_action(model, c, rho, k_phi).map(|s| s.theta_s);
    Ok((t(c_x + h)? - 2.0 * t(c_x)? + t(c_x - h)?) / (h * h))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VkEstimate {
    pub value: f64,
    /// `|D(h/2) − D(h)|/3`.
    pub error_estimate: f64,
    pub step: f64,
}

pub fn vk_index_with(model: &ModelSpec, c_x: f64, rho_endstate: f64, k_phi: f64, step: f64) -> Result<VkEstimate> {
    let d1 = second_difference(model, c_x, rho_endstate, k_phi, step)?;
    let d2 = second_difference(model, c_x, rho_endstate, k_phi, 0.5 * step)?;
    Ok(VkEstimate {
        value: (4.0 * d2 - d1) / 3.0,
        error_estimate: (d2 - d1).abs() / 3.0,
        step,
    })
}

/// Vakhitov–Kolokolov index `∂²_{cx}Θ_s` by Richardson-extrapolated central
/// differences. The step is halved (up to ten times) while the stencil
/// leaves the range of speeds where the solitary wave exists or the
/// extrapolation error estimate exceeds `1e-6` relative.
pub fn vk_index(model: &ModelSpec, c_x: f64, rho_endstate: f64, k_phi: f64) -> Result<f64> {
    solitary_action(model, c_x, rho_endstate, k_phi)?;
    let mut step = 0.02 * c_x.abs().max(1.0);
    let mut best: Option<VkEstimate> = None;
    let mut last = None;
    for _ in 0..=10 {
        match vk_index_with(model, c_x, rho_endstate, k_phi, step) {
            Ok(v) => {
                if v.error_estimate <= 1e-6 * v.value.abs() {
                    return Ok(v.value);
                }
                if best.map_or(true, |b| v.error_estimate < b.error_estimate) {
                    best = Some(v);
                }
            }
            Err(e) => last = Some(e),
        }
        step *= 0.5;
    }
    best.map(|b| b.value).ok_or(last.unwrap_or(Error::NoSolitaryWave))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LargePeriodWave {
    pub params: WaveParams,
    /// `μx⁰ − μx`.
    pub delta: f64,
    pub epsilon: f64,
    pub rho_min: f64,
    pub rho_max: f64,
    pub rho_dual: f64,
    pub rho_s: f64,
}

fn wave_below_saddle(model: &ModelSpec, st: &EndState, rs: f64, delta: f64) -> Result<LargePeriodWave> {
    let mut params = st.params();
    params.mu_x -= delta;
    let seed = (rs.min(st.rho0), rs.max(st.rho0));
    let well = Well::new(model, &params, Some(seed))?;
    // The chosen well must be the one that approaches the end state.
    let between = |x: f64| x >= seed.0 - 1e-9 * seed.1 && x <= seed.1;
    if !(between(well.rho_min) && between(well.rho_max)) {
        return Err(Error::NoWellFound);
    }
    let dual = well.dual_point()?;
    Ok(LargePeriodWave {
        params,
        delta,
        epsilon: dual.epsilon,
        rho_min: well.rho_min,
        rho_max: well.rho_max,
        rho_dual: dual.rho,
        rho_s: rs,
    })
}

/// Periodic wave near the solitary wave of `(cx, ρ⁰, kφ)` whose relative gap
/// to the dual root is `epsilon`, found by bisection in `log(μx⁰ − μx)`.
pub fn large_period_wave(model: &ModelSpec, c_x: f64, rho_endstate: f64, k_phi: f64, epsilon: f64) -> Result<LargePeriodWave> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidInput(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    let st = end_state(model, c_x, rho_endstate, k_phi)?;
    let (rs, _) = solitary_root(model, &st)?;
    let scale = st.w_derivs[2].abs().max(1e-300) * (rs - st.rho0).powi(2);
    let mut lo = (1e-30 * scale).ln();
    let mut hi = (0.5 * scale).ln();
    // Shrink the upper bracket until a well exists.
    let mut hi_wave = None;
    for _ in 0..60 {
        match wave_below_saddle(model, &st, rs, hi.exp()) {
            Ok(w) => {
                hi_wave = Some(w);
                break;
            }
            Err(_) => hi -= 1.0,
        }
    }
    let hi_wave = hi_wave.ok_or(Error::NoSolitaryWave)?;
    if hi_wave.epsilon < epsilon {
        return Err(Error::InvalidInput(format!(
            "epsilon {epsilon} exceeds the largest reachable value {}",
            hi_wave.epsilon
        )));
    }
    let mut best = hi_wave;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        match wave_below_saddle(model, &st, rs, mid.exp()) {
            Ok(w) => {
                if w.epsilon > epsilon {
                    hi = mid;
                } else {
                    lo = mid;
                }
                best = w;
                if ((w.epsilon - epsilon) / epsilon).abs() < 1e-6 {
                    break;
                }
            }
            Err(_) => lo = mid,
        }
        if hi - lo < 1e-13 {
            break;
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantStateReport {
    pub rho0: f64,
    pub k_phi: f64,
    pub delta_hyp: f64,
    pub verdict: Verdict,
}

/// Spectral stability of the constant state `√(2ρ⁰)e^{kφx J}e₁` with isotropic
/// transverse coefficient.
pub fn constant_state_check(model: &ModelSpec, rho0: f64, k_phi: f64) -> ConstantStateReport {
    if rho0 == 0.0 {
        return ConstantStateReport {
            rho0,
            k_phi,
            delta_hyp: f64::NAN,
            verdict: Verdict::Stable,
        };
    }
    let a = 2.0 * rho0;
    let [_, k1, k2] = model.kappa_derivs(a);
    let dh = model.w_derivs(a)[2] + (k2 * rho0 + k1) * k_phi * k_phi;
    let unstable = rho0 > 0.0 && model.kappa(a) != 0.0 && dh < 0.0;
    ConstantStateReport {
        rho0,
        k_phi,
        delta_hyp: dh,
        verdict: if unstable { Verdict::Unstable } else { Verdict::Stable },
    }
}

/// One row of a regime scan over `(cx, ρ⁰, kφ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeEntry {
    pub c_x: f64,
    pub rho0: f64,
    pub k_phi: f64,
    pub delta_hyp: f64,
    #[serde(rename = "delta_BF")]
    pub delta_bf: f64,
    pub a0: Option<f64>,
    #[serde(rename = "X0")]
    pub x0: Option<f64>,
    pub vk_index: Option<f64>,
    pub constant_state: Verdict,
    pub sideband: Verdict,
    pub coperiodic: Verdict,
    pub transverse: Verdict,
}

impl RegimeEntry {
    /// Compact `name=VERDICT` list separated by `;`.
    pub fn verdict_string(&self) -> String {
        let name = |v: Verdict| v.as_str();
        format!(
            "constant={};sideband={};coperiodic={};transverse={}",
            name(self.constant_state),
            name(self.sideband),
            name(self.coperiodic),
            name(self.transverse)
        )
    }
}

/// Asymptotic verdicts at `(cx, ρ⁰, kφ)`: small-amplitude ones when ρ⁰ is a
/// nondegenerate minimum of 𝒲ρ, large-period ones when it is a maximum with
/// an adjacent solitary wave.
pub fn regime_entry(model: &ModelSpec, c_x: f64, rho0: f64, k_phi: f64) -> Result<RegimeEntry> {
    let st = end_state(model, c_x, rho0, k_phi)?;
    let dh = delta_hyp(model, rho0, k_phi)?;
    let dbf = delta_bf_at(model, &st);
    let constant_state = constant_state_check(model, rho0, k_phi).verdict;
    let mut e = RegimeEntry {
        c_x,
        rho0,
        k_phi,
        delta_hyp: dh,
        delta_bf: dbf,
        a0: None,
        x0: None,
        vk_index: None,
        constant_state,
        sideband: Verdict::Inconclusive,
        coperiodic: Verdict::Inconclusive,
        transverse: Verdict::Inconclusive,
    };
    if st.w_derivs[2] > 0.0 {
        let hp = harmonic_point(model, c_x, rho0, k_phi)?;
        e.a0 = Some(hp.a0);
        e.x0 = Some(hp.x0);
        e.sideband = if dh < 0.0 || dbf < 0.0 { Verdict::Unstable } else { Verdict::NoInstabilityDetected };
        e.coperiodic = if hp.a0 != 0.0 { Verdict::StableCandidate } else { Verdict::Inconclusive };
        e.transverse = if dh != 0.0 && dbf != 0.0 { Verdict::Unstable } else { Verdict::Inconclusive };
    } else if st.w_derivs[2] < 0.0 {
        match vk_index(model, c_x, rho0, k_phi) {
            Ok(vk) => {
                e.vk_index = Some(vk);
                e.coperiodic = if vk < 0.0 {
                    Verdict::Unstable
                } else if vk > 0.0 {
                    Verdict::StableCandidate
                } else {
                    Verdict::Inconclusive
                };
                e.sideband = if vk < 0.0 { Verdict::Unstable } else { Verdict::Inconclusive };
                e.transverse = if vk != 0.0 { Verdict::Unstable } else { Verdict::Inconclusive };
            }
            Err(Error::NoSolitaryWave) => {
                e.sideband = Verdict::NotApplicable;
                e.coperiodic = Verdict::NotApplicable;
                e.transverse = Verdict::NotApplicable;
            }
            Err(err) => return Err(err),
        }
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{reference_defocusing, reference_focusing};

    #[test]
    fn reference_harmonic_point() {
        let m = reference_focusing();
        let h = harmonic_point(&m, 0.0, 1.0, 0.0).unwrap();
        assert_eq!(h.mu_phi0, 0.0);
        assert!((h.omega_phi0 + 1.0).abs() < 1e-15);
        assert!((h.mu_x0 + 0.5).abs() < 1e-15);
        assert!((h.x0 - PI * 2f64.sqrt()).abs() < 1e-14);
        assert!((h.delta_hyp + 0.25).abs() < 1e-15);
        assert!((h.a0 - 1.0).abs() < 1e-14);
    }

    #[test]
    fn defocusing_point_is_a_maximum() {
        let m = reference_defocusing();
        assert!(matches!(harmonic_point(&m, 0.0, 1.0, 0.0), Err(Error::NotAMinimum { .. })));
    }

    #[test]
    fn focusing_has_no_solitary_wave() {
        let m = reference_focusing();
        assert_eq!(solitary_action(&m, 0.0, 1.0, 0.0), Err(Error::NoSolitaryWave));
    }

    #[test]
    fn constant_state_verdicts() {
        assert_eq!(constant_state_check(&reference_focusing(), 1.0, 0.0).verdict, Verdict::Unstable);
        assert_eq!(constant_state_check(&reference_defocusing(), 1.0, 0.0).verdict, Verdict::Stable);
        assert_eq!(constant_state_check(&reference_focusing(), 0.0, 0.3).verdict, Verdict::Stable);
    }
}
