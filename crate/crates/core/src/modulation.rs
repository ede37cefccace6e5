//! Whitham modulation data: the matrices `A₀, B₀, C₀`, the low-frequency
//! matrices `Σ_t, Σ_y`, the coefficients of the quartic symbol
//! `Δ₀(λ, z, ζ) = det(λA₀ HessΘ − zB₀ + (ζ²/λ)C₀)` and the stability
//! criteria built on them.

use crate::action::{from_matrix, to_matrix, Mat4};
use crate::error::{Error, Result};
use crate::exec::{self, ExecMode};
use crate::poly::{complex_roots, matrix_eigenvalues};
use crate::profile::Averages;
use nalgebra::{DMatrix, DVector, Matrix4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

type C64 = Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Unstable,
    StableCandidate,
    /// Nothing found at the resolution used.
    NoInstabilityDetected,
    Inconclusive,
    NotApplicable,
    Stable,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Unstable => "UNSTABLE",
            Verdict::StableCandidate => "STABLE_CANDIDATE",
            Verdict::NoInstabilityDetected => "NO_INSTABILITY_DETECTED",
            Verdict::Inconclusive => "INCONCLUSIVE",
            Verdict::NotApplicable => "NOT_APPLICABLE",
            Verdict::Stable => "STABLE",
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

pub fn a0() -> Matrix4<f64> {
    Matrix4::from_diagonal(&nalgebra::Vector4::new(1.0, 1.0, -1.0, -1.0))
}

pub fn b0() -> Matrix4<f64> {
    Matrix4::new(
        0.0, 1.0, 0.0, 0.0,
        1.0, 0.0, 0.0, 0.0,
        0.0, 0.0, 0.0, 1.0,
        0.0, 0.0, 1.0, 0.0,
    )
}

pub fn c0(sigma1: f64, sigma2: f64, sigma3: f64) -> Matrix4<f64> {
    Matrix4::new(
        0.0, 0.0, 0.0, 0.0,
        0.0, -sigma3, sigma2, 0.0,
        0.0, -sigma2, sigma1, 0.0,
        0.0, 0.0, 0.0, 0.0,
    )
}

/// Left permutation relating `λA₀HessΘ − zB₀` to `λΣ_t − zI`.
pub fn perm_left() -> Matrix4<f64> {
    Matrix4::new(
        0.0, 0.0, 0.0, 1.0,
        1.0, 0.0, 0.0, 0.0,
        0.0, 0.0, 1.0, 0.0,
        0.0, 1.0, 0.0, 0.0,
    )
}

pub fn perm_right() -> Matrix4<f64> {
    Matrix4::new(
        0.0, 0.0, 0.0, 1.0,
        0.0, 1.0, 0.0, 0.0,
        1.0, 0.0, 0.0, 0.0,
        0.0, 0.0, 1.0, 0.0,
    )
}

/// `δ_(m,n,p)` multiplies `λ^{m−p} z^n ζ^{2p}`, `m + n + p = 4`, `p ≤ m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaCoef {
    pub m: usize,
    pub n: usize,
    pub p: usize,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModulationData {
    pub hess: Mat4,
    pub k_x: f64,
    pub a0: Mat4,
    pub b0: Mat4,
    pub c0: Mat4,
    pub sigma_t: Mat4,
    pub sigma_y: Mat4,
    pub delta: Vec<DeltaCoef>,
    /// Eigenvalues `a` of `(kx A₀ HessΘ)⁻¹B₀` (empty when HessΘ is singular).
    pub pencil_eigenvalues: Vec<C64>,
    /// Largest relative gap between the reconstructed and direct Δ₀ at the
    /// verification points.
    pub reconstruction_residual: f64,
    /// Largest relative low-order coefficient of `λ⁴Δ₀` that must vanish.
    pub spurious_residual: f64,
}

fn det_c(m: &Matrix4<C64>) -> C64 {
    m.determinant()
}

fn to_c(m: &Matrix4<f64>) -> Matrix4<C64> {
    m.map(C64::from)
}

/// Solves a Vandermonde system for polynomial coefficients (lowest first).
fn vandermonde_solve(nodes: &[f64], values: &[f64]) -> Vec<f64> {
    let n = nodes.len();
    let v = DMatrix::from_fn(n, n, |i, j| nodes[i].powi(j as i32));
    let b = DVector::from_column_slice(values);
    v.lu().solve(&b).map(|x| x.iter().copied().collect()).unwrap_or_else(|| vec![f64::NAN; n])
}

const LAMBDA_DEG: usize = 8;
const W_DEG: usize = 4;

fn norm_max(m: &Matrix4<f64>) -> f64 {
    m.iter().fold(0.0f64, |a, v| a.max(v.abs()))
}

/// Coefficients of `λ⁴Δ₀` by interpolation on a scaled integer grid, then the
/// exponent shift by four.
fn extract_delta(h: &Matrix4<f64>, c: &Matrix4<f64>) -> Result<(Vec<DeltaCoef>, f64)> {
    let ah = a0() * h;
    let b = b0();
    let hn = norm_max(h).max(f64::MIN_POSITIVE);
    let cn = norm_max(c);
    let sl = 1.0 / hn;
    let sw = if cn > 0.0 { sl / cn } else { sl };
    let lam_nodes: Vec<f64> = (0..=LAMBDA_DEG).map(|k| k as f64 - 4.0).collect();
    let w_nodes: Vec<f64> = (0..=W_DEG).map(|k| k as f64).collect();
    // vals[iw][il]
    let mut by_w = Vec::with_capacity(w_nodes.len());
    for &wn in &w_nodes {
        let vals: Vec<f64> = lam_nodes
            .iter()
            .map(|&ln| {
                let l = ln * sl;
                (ah * (l * l) - b * l + c * (wn * sw)).determinant()
            })
            .collect();
        by_w.push(vandermonde_solve(&lam_nodes, &vals));
    }
    // scaled[a][p]
    let mut scaled = vec![vec![0.0; W_DEG + 1]; LAMBDA_DEG + 1];
    for a in 0..=LAMBDA_DEG {
        let col: Vec<f64> = by_w.iter().map(|row| row[a]).collect();
        let cw = vandermonde_solve(&w_nodes, &col);
        for p in 0..=W_DEG {
            scaled[a][p] = cw[p];
        }
    }
    let big = scaled.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut spurious: f64 = 0.0;
    let mut out = Vec::new();
    for a in 0..=LAMBDA_DEG {
        for p in 0..=W_DEG {
            let s = scaled[a][p];
            let rel = if big > 0.0 { s.abs() / big } else { 0.0 };
            let valid = a >= 4 && 8 >= a + 2 * p;
            if !valid {
                spurious = spurious.max(rel);
                continue;
            }
            let m = a - 4 + p;
            let n = 8 - a - 2 * p;
            let value = s / (sl.powi(a as i32) * sw.powi(p as i32));
            out.push(DeltaCoef { m, n, p, value });
        }
    }
    if spurious > 1e-9 {
        return Err(Error::SingularityNotSpurious { residual: spurious });
    }
    out.sort_by_key(|d| (d.m, d.n, d.p));
    Ok((out, spurious))
}

/// Fixed pseudo-random verification points (deterministic).
fn probe_points(count: usize) -> Vec<(C64, C64, C64)> {
    let mut state: u64 = 0x9E37_79B9_7F4A_7C15;
    let mut next = || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
    };
    (0..count)
        .map(|_| {
            let l = C64::new(next(), next()) + C64::new(0.3, 0.0);
            (l, C64::new(next(), next()), C64::new(next(), next()))
        })
        .collect()
}

impl ModulationData {
    /// Evaluates Δ₀ from its coefficients.
    pub fn delta0(&self, lambda: C64, z: C64, zeta: C64) -> C64 {
        self.delta
            .iter()
            .map(|d| d.value * lambda.powu((d.m - d.p) as u32) * z.powu(d.n as u32) * zeta.powu(2 * d.p as u32))
            .sum()
    }

    /// Δ₀ as the 4×4 determinant, for cross-checks.
    pub fn delta0_direct(&self, lambda: C64, z: C64, zeta: C64) -> C64 {
        let m = to_c(&(a0() * to_matrix(&self.hess))) * lambda - to_c(&b0()) * z
            + to_c(&to_matrix(&self.c0)) * (zeta * zeta / lambda);
        det_c(&m)
    }

    pub fn coefficient(&self, m: usize, n: usize, p: usize) -> f64 {
        self.delta
            .iter()
            .find(|d| d.m == m && d.n == n && d.p == p)
            .map(|d| d.value)
            .unwrap_or(0.0)
    }

    /// `det(λΣ_t − (e^{iξ} − 1)I + (η²/λ)Σ_y)`, the leading part of the Evans
    /// function near the origin.
    pub fn low_frequency_symbol(&self, lambda: C64, xi: f64, eta_sq: f64) -> C64 {
        let z = C64::from_polar(1.0, xi) - 1.0;
        let m = to_c(&to_matrix(&self.sigma_t)) * lambda - Matrix4::<C64>::identity() * z
            + to_c(&to_matrix(&self.sigma_y)) * (eta_sq / lambda);
        det_c(&m)
    }

    /// Quartic in λ: coefficients (lowest first) of `Δ₀(λ, z, ζ)`.
    pub fn quartic_in_lambda(&self, z: C64, zeta: C64) -> [C64; 5] {
        let mut c = [C64::new(0.0, 0.0); 5];
        for d in &self.delta {
            c[d.m - d.p] += d.value * z.powu(d.n as u32) * zeta.powu(2 * d.p as u32);
        }
        c
    }
}

fn build(h: &Matrix4<f64>, c: &Matrix4<f64>, k_x: f64) -> Result<ModulationData> {
    let pl = perm_left();
    let pr = perm_right();
    let sigma_t = pl * a0() * h * pr;
    let sigma_y = pl * c * pr;
    let (delta, spurious) = extract_delta(h, c)?;
    let mut data = ModulationData {
        hess: from_matrix(h),
        k_x,
        a0: from_matrix(&a0()),
        b0: from_matrix(&b0()),
        c0: from_matrix(c),
        sigma_t: from_matrix(&sigma_t),
        sigma_y: from_matrix(&sigma_y),
        delta,
        pencil_eigenvalues: Vec::new(),
        reconstruction_residual: 0.0,
        spurious_residual: spurious,
    };
    let mut worst: f64 = 0.0;
    for (l, z, zeta) in probe_points(20) {
        let a = data.delta0(l, z, zeta);
        let b = data.delta0_direct(l, z, zeta);
        worst = worst.max((a - b).norm() / a.norm().max(b.norm()).max(f64::MIN_POSITIVE));
    }
    data.reconstruction_residual = worst;
    if let Ok(cs) = characteristic_speeds(&data.hess, k_x, 0.0) {
        data.pencil_eigenvalues = cs.pencil_eigenvalues.to_vec();
    }
    Ok(data)
}

/// Builds the modulation data from HessΘ, the averages and `kx`.
pub fn assemble(hess: &Mat4, averages: &Averages, k_x: f64) -> Result<ModulationData> {
    build(&to_matrix(hess), &c0(averages.sigma1, averages.sigma2, averages.sigma3), k_x)
}

/// Builds modulation data directly from `Σ_t` and `Σ_y`, inverting the
/// permutation relations.
pub fn from_sigma(sigma_t: &Mat4, sigma_y: &Mat4, k_x: f64) -> Result<ModulationData> {
    let pl = perm_left();
    let pr = perm_right();
    let st = to_matrix(sigma_t);
    let sy = to_matrix(sigma_y);
    let h = a0() * pl.transpose() * st * pr.transpose();
    let c = pl.transpose() * sy * pr.transpose();
    build(&h, &c, k_x)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CharacteristicSpeeds {
    /// Eigenvalues `a` of `(kx A₀ HessΘ)⁻¹B₀`.
    pub pencil_eigenvalues: [C64; 4],
    /// `a − cx`.
    pub speeds: [C64; 4],
    pub weakly_hyperbolic: bool,
}

fn check_nonsingular(h: &Matrix4<f64>) -> Result<()> {
    let sv = h.singular_values();
    let max = sv.max();
    let min = sv.min();
    if !(max > 0.0) || min <= 1e-13 * max {
        return Err(Error::SingularHessian);
    }
    Ok(())
}

pub fn characteristic_speeds(hess: &Mat4, k_x: f64, c_x: f64) -> Result<CharacteristicSpeeds> {
    let h = to_matrix(hess);
    check_nonsingular(&h)?;
    let lhs = a0() * h * k_x;
    let inv = lhs.try_inverse().ok_or(Error::SingularHessian)?;
    let m = inv * b0();
    let ev = matrix_eigenvalues(&DMatrix::from_fn(4, 4, |i, j| m[(i, j)]));
    let mut a = [ev[0], ev[1], ev[2], ev[3]];
    a.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
    let weakly_hyperbolic = a.iter().all(|z| z.im.abs() <= 1e-8 * (1.0 + z.norm()));
    Ok(CharacteristicSpeeds {
        pencil_eigenvalues: a,
        speeds: a.map(|z| z - c_x),
        weakly_hyperbolic,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoperiodicReport {
    pub det: f64,
    pub det_sign: i32,
    pub eigenvalues: [f64; 4],
    pub negative_signature: usize,
    pub verdict: Verdict,
}

pub fn coperiodic_criterion(hess: &Mat4) -> Result<CoperiodicReport> {
    let h = to_matrix(hess);
    check_nonsingular(&h)?;
    let det = h.determinant();
    let eigenvalues = crate::action::symmetric_eigenvalues(hess);
    let negative_signature = eigenvalues.iter().filter(|e| **e < 0.0).count();
    let verdict = if det < 0.0 {
        Verdict::Unstable
    } else if negative_signature == 2 && hess[0][0] != 0.0 {
        Verdict::StableCandidate
    } else {
        Verdict::Inconclusive
    };
    Ok(CoperiodicReport {
        det,
        det_sign: if det > 0.0 { 1 } else { -1 },
        eigenvalues,
        negative_signature,
        verdict,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SidebandReport {
    pub pencil_eigenvalues: [C64; 4],
    pub speeds: [C64; 4],
    pub weakly_hyperbolic: bool,
    pub verdict: Verdict,
}

pub fn sideband_criterion(hess: &Mat4, k_x: f64, c_x: f64) -> Result<SidebandReport> {
    let cs = characteristic_speeds(hess, k_x, c_x)?;
    Ok(SidebandReport {
        pencil_eigenvalues: cs.pencil_eigenvalues,
        speeds: cs.speeds,
        weakly_hyperbolic: cs.weakly_hyperbolic,
        verdict: if cs.weakly_hyperbolic { Verdict::NoInstabilityDetected } else { Verdict::Unstable },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub xi: f64,
    pub zeta: f64,
    pub lambda: C64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Xi0Report {
    pub delta400: f64,
    pub delta301: f64,
    pub delta202: f64,
    pub inequalities_hold: bool,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FullScanReport {
    pub directions: usize,
    pub unstable_directions: Vec<Witness>,
    /// Direction with the largest growth rate.
    pub worst: Option<Witness>,
    /// Largest growth rate among directions with `ζ ≠ 0`.
    pub worst_transverse: Option<Witness>,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TransverseReport {
    pub xi0: Xi0Report,
    pub full: FullScanReport,
}

#[derive(Debug, Clone, Copy)]
pub struct TransverseOptions {
    pub directions: usize,
    pub refine: usize,
    /// Relative threshold on Re λ for calling a root unstable.
    pub tol_rel: f64,
    pub exec: ExecMode,
}

impl Default for TransverseOptions {
    fn default() -> Self {
        TransverseOptions {
            directions: 720,
            refine: 4,
            tol_rel: 1e-7,
            exec: ExecMode::Parallel,
        }
    }
}

fn direction_roots(data: &ModulationData, phi: f64) -> (f64, f64, Vec<C64>) {
    let (zeta, xi) = phi.sin_cos();
    let c = data.quartic_in_lambda(C64::new(0.0, xi), C64::from(zeta));
    (xi, zeta, complex_roots(&c))
}

fn growth(data: &ModulationData, phi: f64, tol: f64) -> (Witness, bool) {
    let (xi, zeta, roots) = direction_roots(data, phi);
    let scale = roots.iter().fold(1.0f64, |m, r| m.max(r.norm()));
    let best = roots
        .iter()
        .copied()
        .max_by(|a, b| a.re.total_cmp(&b.re))
        .unwrap_or(C64::new(0.0, 0.0));
    (Witness { xi, zeta, lambda: best }, best.re > tol * scale)
}

pub fn transverse_criteria(data: &ModulationData) -> TransverseReport {
    transverse_criteria_with(data, &TransverseOptions::default())
}

pub fn transverse_criteria_with(data: &ModulationData, opts: &TransverseOptions) -> TransverseReport {
    let d400 = data.coefficient(4, 0, 0);
    let d301 = data.coefficient(3, 0, 1);
    let d202 = data.coefficient(2, 0, 2);
    let inequalities_hold = d400 >= 0.0 && d301 >= 2.0 * (d400 * d202).abs().sqrt() && d202 >= 0.0;
    let xi0 = Xi0Report {
        delta400: d400,
        delta301: d301,
        delta202: d202,
        inequalities_hold,
        verdict: if inequalities_hold { Verdict::NoInstabilityDetected } else { Verdict::Unstable },
    };

    let n = opts.directions.max(1);
    let phis: Vec<f64> = (0..n).map(|k| PI * k as f64 / n as f64).collect();
    let mut samples: Vec<(f64, Witness, bool)> = exec::map(opts.exec, &phis, |&phi| {
        let (w, u) = growth(data, phi, opts.tol_rel);
        (phi, w, u)
    });
    // Refine around stability transitions and around the worst direction.
    let mut extra = Vec::new();
    let worst_k = (0..n)
        .max_by(|&a, &b| samples[a].1.lambda.re.total_cmp(&samples[b].1.lambda.re))
        .unwrap_or(0);
    for k in 0..n {
        let next_unstable = if k + 1 < n { samples[k + 1].2 } else { samples[0].2 };
        if samples[k].2 != next_unstable || k == worst_k || (k + 1) % n == worst_k {
            for r in 1..opts.refine {
                extra.push(PI * (k as f64 + r as f64 / opts.refine as f64) / n as f64);
            }
        }
    }
    let refined: Vec<(f64, Witness, bool)> = exec::map(opts.exec, &extra, |&phi| {
        let (w, u) = growth(data, phi, opts.tol_rel);
        (phi, w, u)
    });
    samples.extend(refined);
    samples.sort_by(|a, b| a.0.total_cmp(&b.0));

    let unstable_directions: Vec<Witness> = samples.iter().filter(|s| s.2).map(|s| s.1).collect();
    let pick = |filter: &dyn Fn(&Witness) -> bool| {
        samples
            .iter()
            .filter(|s| s.2 && filter(&s.1))
            .map(|s| s.1)
            .max_by(|a, b| a.lambda.re.total_cmp(&b.lambda.re))
    };
    let worst = pick(&|_| true);
    let worst_transverse = pick(&|w| w.zeta.abs() > 1e-12);
    let full = FullScanReport {
        directions: samples.len(),
        verdict: if unstable_directions.is_empty() { Verdict::NoInstabilityDetected } else { Verdict::Unstable },
        unstable_directions,
        worst,
        worst_transverse,
    };
    TransverseReport { xi0, full }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Eta0Entry {
    pub omega0: f64,
    pub multiplicity: usize,
    pub quantity: f64,
    /// Quantity divided by the leading Taylor coefficient, when `r₀ = 2`.
    pub ratio: Option<f64>,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Xi0SplittingReport {
    pub discriminant: f64,
    pub quantity: Option<f64>,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SplittingReport {
    pub eta0: Vec<Eta0Entry>,
    pub eta0_verdict: Verdict,
    pub xi0: Xi0SplittingReport,
}

#[derive(Debug, Clone, Copy)]
pub struct SplittingOptions {
    /// Eigenvalues within this relative distance form one cluster.
    pub cluster_tol: f64,
    /// Relative tolerance for the discriminant `δ₃₀₁² − 4δ₄₀₀δ₂₀₂`.
    pub discriminant_tol: f64,
    /// Relative size below which a test quantity counts as zero.
    pub zero_tol: f64,
}

impl Default for SplittingOptions {
    fn default() -> Self {
        SplittingOptions {
            cluster_tol: 1e-6,
            discriminant_tol: 1e-6,
            zero_tol: 1e-9,
        }
    }
}

pub fn splitting_criteria(data: &ModulationData) -> Result<SplittingReport> {
    splitting_criteria_with(data, &SplittingOptions::default())
}

pub fn splitting_criteria_with(data: &ModulationData, opts: &SplittingOptions) -> Result<SplittingReport> {
    let st = to_matrix(&data.sigma_t);
    check_nonsingular(&st)?;
    let inv = st.try_inverse().ok_or(Error::SingularHessian)?;
    let ev = matrix_eigenvalues(&DMatrix::from_fn(4, 4, |i, j| inv[(i, j)]));
    let mut reals: Vec<f64> = ev
        .iter()
        .filter(|z| z.im.abs() <= 1e-8 * (1.0 + z.norm()).max(opts.cluster_tol * z.norm() * 10.0))
        .map(|z| z.re)
        .collect();
    reals.sort_by(|a, b| a.total_cmp(b));
    let mut clusters: Vec<Vec<f64>> = Vec::new();
    for r in reals {
        match clusters.last_mut() {
            Some(c) if (r - c[0]).abs() <= opts.cluster_tol * (1.0 + r.abs()) => c.push(r),
            _ => clusters.push(vec![r]),
        }
    }
    let d = |m, n, p| data.coefficient(m, n, p);
    let mut eta0 = Vec::new();
    for c in clusters {
        let r0 = c.len();
        let w0 = c.iter().sum::<f64>() / r0 as f64;
        let terms = [d(1, 2, 1), d(2, 1, 1) * w0, d(3, 0, 1) * w0 * w0];
        let quantity: f64 = terms.iter().sum();
        let scale = terms.iter().fold(0.0f64, |m, t| m.max(t.abs())).max(f64::MIN_POSITIVE);
        let nonzero = quantity.abs() > opts.zero_tol * scale;
        let (ratio, verdict) = if r0 >= 3 {
            (None, if nonzero { Verdict::Unstable } else { Verdict::NotApplicable })
        } else if r0 == 2 {
            // (1/r₀!) ∂_λ^{r₀} Δ₀(λ, 1, 0) at λ = ω₀; Δ₀(λ,1,0) = Σ δ_(m,4−m,0) λ^m.
            let lead: f64 = (r0..=4)
                .map(|m| {
                    let binom = (0..r0).fold(1.0, |acc, i| acc * (m - i) as f64) / 2.0;
                    binom * d(m, 4 - m, 0) * w0.powi((m - r0) as i32)
                })
                .sum();
            let ratio = quantity / lead;
            (Some(ratio), if nonzero && ratio < 0.0 { Verdict::Unstable } else { Verdict::NotApplicable })
        } else {
            (None, Verdict::NotApplicable)
        };
        eta0.push(Eta0Entry {
            omega0: w0,
            multiplicity: r0,
            quantity,
            ratio,
            verdict,
        });
    }
    let eta0_verdict = if eta0.iter().any(|e| e.verdict == Verdict::Unstable) {
        Verdict::Unstable
    } else {
        Verdict::NotApplicable
    };

    let (d400, d301, d202) = (d(4, 0, 0), d(3, 0, 1), d(2, 0, 2));
    let disc = d301 * d301 - 4.0 * d400 * d202;
    let disc_scale = (d301 * d301).max((4.0 * d400 * d202).abs()).max(f64::MIN_POSITIVE);
    let xi0 = if d400 != 0.0 && disc.abs() <= opts.discriminant_tol * disc_scale {
        let t1 = d(2, 1, 1) * d400;
        let t2 = 0.5 * d(3, 1, 0) * d301;
        let q = t1 - t2;
        let nonzero = q.abs() > opts.zero_tol * t1.abs().max(t2.abs()).max(f64::MIN_POSITIVE);
        Xi0SplittingReport {
            discriminant: disc,
            quantity: Some(q),
            verdict: if nonzero { Verdict::Unstable } else { Verdict::Inconclusive },
        }
    } else {
        Xi0SplittingReport {
            discriminant: disc,
            quantity: None,
            verdict: Verdict::NotApplicable,
        }
    };
    Ok(SplittingReport { eta0, eta0_verdict, xi0 })
}
