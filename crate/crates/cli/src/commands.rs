//! The `profile`, `stability` and `scan` commands.

use crate::config::{ConfigError, RegimeSpec, RunConfig, ScanAxis, ScanKind, Side, WaveSpec};
use crate::output::{csv, to_json, Cell};
use num_complex::Complex64;
use serde::Serialize;
use std::path::{Path, PathBuf};
use wavestab_core::action::{self, ActionData, ActionOptions, ModulationCoordinates};
use wavestab_core::asymptotics::{self, LargePeriodWave, RegimeEntry};
use wavestab_core::exec::{self, ExecMode};
use wavestab_core::modulation::{
    self, CoperiodicReport, ModulationData, SidebandReport, SplittingReport, TransverseOptions, TransverseReport,
    Verdict,
};
use wavestab_core::ode::OdeOptions;
use wavestab_core::profile::{self, Averages, ProfileOptions, WaveParams, WaveProfile};
use wavestab_core::quad::QuadOptions;
use wavestab_core::spectral::{self, ContourOptions, EvansContext, Rect, SpectralOptions, SpectralQuery};
use wavestab_core::ModelSpec;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Numerical(#[from] wavestab_core::Error),
    #[error("cannot write output: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 4,
        }
    }

    /// Variant name, e.g. `DegenerateWell` or `Invalid`.
    pub fn kind(&self) -> String {
        let dbg = match self {
            CliError::Config(e) => format!("{e:?}"),
            CliError::Numerical(e) => format!("{e:?}"),
            CliError::Io(_) => "Io".into(),
        };
        dbg.split(|c: char| !c.is_alphanumeric()).next().unwrap_or("").to_string()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ErrorReport {
    pub kind: String,
    pub category: &'static str,
    pub message: String,
    pub exit_code: i32,
}

impl From<&CliError> for ErrorReport {
    fn from(e: &CliError) -> Self {
        ErrorReport {
            kind: e.kind(),
            category: match e {
                CliError::Config(_) => "config",
                CliError::Numerical(_) => "numerical",
                CliError::Io(_) => "io",
            },
            message: e.to_string(),
            exit_code: e.exit_code(),
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    pub timestamp: bool,
}

fn timestamp(opts: &RunOptions) -> Option<u64> {
    opts.timestamp
        .then(|| std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0))
}

fn write(dir: &Path, name: &str, text: &str) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let path = dir.join(name);
    std::fs::write(&path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(path)
}

/// Parameters of the wave to analyse, with the well hint and limit data for
/// waves given through a regime description.
#[derive(Debug, Clone, Serialize)]
pub struct ResolvedWave {
    pub params: WaveParams,
    pub regime: Option<RegimeSpec>,
    pub large_period: Option<LargePeriodWave>,
    #[serde(skip)]
    pub seed: Option<(f64, f64)>,
}

pub fn resolve_wave(model: &ModelSpec, spec: &WaveSpec) -> wavestab_core::Result<ResolvedWave> {
    match *spec {
        WaveSpec::Explicit(params) => Ok(ResolvedWave { params, regime: None, large_period: None, seed: None }),
        WaveSpec::Regime(r) => match r.side {
            Side::Harmonic => {
                let params = asymptotics::harmonic_wave(model, r.c_x, r.rho0, r.k_phi, r.epsilon)?;
                Ok(ResolvedWave { params, regime: Some(r), large_period: None, seed: Some((r.rho0, r.rho0)) })
            }
            Side::Solitary => {
                let w = asymptotics::large_period_wave(model, r.c_x, r.rho0, r.k_phi, r.epsilon)?;
                Ok(ResolvedWave {
                    params: w.params,
                    regime: Some(r),
                    seed: Some((w.rho_min, w.rho_max)),
                    large_period: Some(w),
                })
            }
        },
    }
}

struct Settings {
    profile: ProfileOptions,
    action: ActionOptions,
    spectral: SpectralOptions,
    transverse: TransverseOptions,
    contour: ContourOptions,
}

fn settings(cfg: &RunConfig, seed: Option<(f64, f64)>) -> Settings {
    let n = &cfg.numerics;
    let quad = QuadOptions { rel_tol: n.quad_rel_tol, max_panels: n.quad_max_panels, ..QuadOptions::default() };
    let spectral_default = SpectralOptions::default();
    Settings {
        profile: ProfileOptions { n_points: n.n_points, seed, quad, ..ProfileOptions::default() },
        action: ActionOptions { quad, fd_rel_step: n.fd_step, seed, ..ActionOptions::default() },
        spectral: SpectralOptions {
            ode: OdeOptions { rel_tol: n.ode_rel_tol, abs_tol: n.ode_abs_tol, ..spectral_default.ode },
            lambda_ceiling: n.lambda_ceiling,
            ..spectral_default
        },
        transverse: TransverseOptions { directions: n.directions, ..TransverseOptions::default() },
        contour: ContourOptions { points_per_edge: n.contour_points_per_edge, ..ContourOptions::default() },
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ProfileSummary {
    pub params: WaveParams,
    #[serde(rename = "X_x")]
    pub x_period: f64,
    pub xi_phi: f64,
    pub k_x: f64,
    pub k_phi: f64,
    pub omega_x: f64,
    pub rho_min: f64,
    pub rho_max: f64,
    pub n_points: usize,
    pub cross_check_defect: Option<f64>,
    pub averages: Averages,
}

impl ProfileSummary {
    fn new(prof: &WaveProfile, averages: Averages) -> Self {
        ProfileSummary {
            params: prof.params,
            x_period: prof.x_period,
            xi_phi: prof.xi_phi,
            k_x: prof.k_x,
            k_phi: prof.k_phi,
            omega_x: prof.omega_x,
            rho_min: prof.rho_min,
            rho_max: prof.rho_max,
            n_points: prof.x_grid.len(),
            cross_check_defect: prof.cross_check_defect,
            averages,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
struct SummaryFile<'a> {
    #[serde(skip_serializing_if = "Option::is_none")]
    timestamp_unix: Option<u64>,
    wave: &'a ResolvedWave,
    profile: &'a ProfileSummary,
}

pub const PROFILE_HEADER: [&str; 6] = ["x", "rho", "v", "theta", "V1", "V2"];
pub const EVANS_HEADER: [&str; 6] = ["xi", "eta_sq", "re_lambda", "im_lambda", "re_D", "im_D"];
pub const REGIME_HEADER: [&str; 10] = ["cx", "rho0", "k_phi", "delta_hyp", "delta_BF", "a0", "X0", "vk_index", "verdicts", "error"];
pub const WAVE_SCAN_HEADER: [&str; 17] = [
    "index", "axis_value", "mu_x", "c_x", "omega_phi", "mu_phi", "X_x", "k_x", "det_hess", "negative_signature",
    "vk_index", "coperiodic", "sideband", "transverse", "splitting_eta0", "splitting_xi0", "error",
];

fn profile_csv(prof: &WaveProfile) -> String {
    let rows: Vec<Vec<Cell>> = (0..prof.x_grid.len())
        .map(|i| {
            vec![
                Cell::F(prof.x_grid[i]),
                Cell::F(prof.rho[i]),
                Cell::F(prof.v[i]),
                Cell::F(prof.theta[i]),
                Cell::F(prof.vv[i][0]),
                Cell::F(prof.vv[i][1]),
            ]
        })
        .collect();
    csv(&PROFILE_HEADER, &rows)
}

/// Writes the profile CSV and its JSON summary.
pub fn cmd_profile(cfg: &RunConfig, out: &Path, opts: &RunOptions) -> Result<Vec<PathBuf>, CliError> {
    let model = cfg.build_model()?;
    let wave = resolve_wave(&model, &cfg.wave_spec())?;
    let s = settings(cfg, wave.seed);
    let prof = profile::solve_profile_with(&model, &wave.params, &s.profile)?;
    let av = profile::wave_averages_with(&model, &prof, &s.profile.quad)?;
    let summary = ProfileSummary::new(&prof, av);
    let file = SummaryFile { timestamp_unix: timestamp(opts), wave: &wave, profile: &summary };
    Ok(vec![
        write(out, &cfg.outputs.profile_csv, &profile_csv(&prof))?,
        write(out, &cfg.outputs.summary_json, &to_json(&file))?,
    ])
}

/// Either a computed section or the reason it could not be computed.
#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum Section<T> {
    Ok(T),
    Failed { error: String },
}

impl<T> Section<T> {
    fn from_result(r: wavestab_core::Result<T>) -> Self {
        match r {
            Ok(v) => Section::Ok(v),
            Err(e) => Section::Failed { error: e.to_string() },
        }
    }

    pub fn ok(&self) -> Option<&T> {
        match self {
            Section::Ok(v) => Some(v),
            Section::Failed { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CountEntry {
    pub xi: f64,
    pub eta_sq: f64,
    pub rect: Rect,
    pub count: Section<i64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Verdicts {
    pub coperiodic: Verdict,
    pub sideband: Verdict,
    pub transverse: Verdict,
    pub splitting_eta0: Option<Verdict>,
    pub splitting_xi0: Option<Verdict>,
}

#[derive(Debug, Clone, Serialize)]
pub struct StabilityReport {
    pub tool: &'static str,
    pub version: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp_unix: Option<u64>,
    pub wave: ResolvedWave,
    pub profile: ProfileSummary,
    pub action: ActionData,
    pub coordinates: ModulationCoordinates,
    pub modulation: ModulationData,
    pub coperiodic: CoperiodicReport,
    pub sideband: SidebandReport,
    pub transverse: TransverseReport,
    pub splitting: Section<SplittingReport>,
    pub asymptotics: Option<Section<RegimeEntry>>,
    pub counts: Vec<CountEntry>,
    pub verdicts: Verdicts,
}

/// Runs profile, action, modulation data and every criterion on one wave.
pub fn analyse(
    model: &ModelSpec,
    cfg: &RunConfig,
    wave: ResolvedWave,
    with_counts: bool,
) -> Result<(StabilityReport, WaveProfile), CliError> {
    let s = settings(cfg, wave.seed);
    let prof = profile::solve_profile_with(model, &wave.params, &s.profile)?;
    let av = profile::wave_averages_with(model, &prof, &s.profile.quad)?;
    let ad = action::action_hessian_with(model, &wave.params, &s.action)?;
    let coords = action::coordinates_from(&ad.grad, &ad.hess)?;
    let data = modulation::assemble(&ad.hess, &av, prof.k_x)?;
    let coperiodic = modulation::coperiodic_criterion(&ad.hess)?;
    let sideband = modulation::sideband_criterion(&ad.hess, prof.k_x, wave.params.c_x)?;
    let transverse = modulation::transverse_criteria_with(&data, &s.transverse);
    let splitting = Section::from_result(modulation::splitting_criteria(&data));
    let asymptotics = wave
        .regime
        .map(|r| Section::from_result(asymptotics::regime_entry(model, r.c_x, r.rho0, r.k_phi)));
    let mut counts = Vec::new();
    if let (true, Some(c)) = (with_counts, &cfg.count) {
        let ctx = EvansContext::new(model, &prof, s.spectral)?;
        let rect = Rect { re_min: c.rect[0], re_max: c.rect[1], im_min: c.rect[2], im_max: c.rect[3] };
        for &xi in &c.xi {
            for &eta_sq in &c.eta_sq {
                let count = Section::from_result(spectral::count_unstable(&ctx, xi, eta_sq, &rect, &s.contour));
                counts.push(CountEntry { xi, eta_sq, rect, count });
            }
        }
    }
    let verdicts = Verdicts {
        coperiodic: coperiodic.verdict,
        sideband: sideband.verdict,
        transverse: transverse.full.verdict,
        splitting_eta0: splitting.ok().map(|r| r.eta0_verdict),
        splitting_xi0: splitting.ok().map(|r| r.xi0.verdict),
    };
    let report = StabilityReport {
        tool: "wavestab",
        version: env!("CARGO_PKG_VERSION"),
        timestamp_unix: None,
        profile: ProfileSummary::new(&prof, av),
        wave,
        action: ad,
        coordinates: coords,
        modulation: data,
        coperiodic,
        sideband,
        transverse,
        splitting,
        asymptotics,
        counts,
        verdicts,
    };
    Ok((report, prof))
}

fn evans_csv(model: &ModelSpec, cfg: &RunConfig, prof: &WaveProfile) -> Result<Option<String>, CliError> {
    let Some(e) = &cfg.evans_scan else { return Ok(None) };
    let s = settings(cfg, None);
    let ctx = EvansContext::new(model, prof, s.spectral)?;
    let mut queries = Vec::new();
    for &xi in &e.xi {
        for &eta_sq in &e.eta_sq {
            for &re in &e.lambda_re {
                for &im in &e.lambda_im {
                    queries.push(SpectralQuery { lambda: Complex64::new(re, im), xi, eta_sq });
                }
            }
        }
    }
    let values = ctx.evans_batch(&queries)?;
    let rows: Vec<Vec<Cell>> = queries
        .iter()
        .zip(&values)
        .map(|(q, d)| {
            vec![
                Cell::F(q.xi),
                Cell::F(q.eta_sq),
                Cell::F(q.lambda.re),
                Cell::F(q.lambda.im),
                Cell::F(d.re),
                Cell::F(d.im),
            ]
        })
        .collect();
    Ok(Some(csv(&EVANS_HEADER, &rows)))
}

/// Writes the stability report and, if configured, the Evans scan CSV.
pub fn cmd_stability(cfg: &RunConfig, out: &Path, opts: &RunOptions) -> Result<Vec<PathBuf>, CliError> {
    let model = cfg.build_model()?;
    let wave = resolve_wave(&model, &cfg.wave_spec())?;
    let (mut report, prof) = analyse(&model, cfg, wave, true)?;
    report.timestamp_unix = timestamp(opts);
    let mut files = Vec::new();
    if let Some(text) = evans_csv(&model, cfg, &prof)? {
        files.push(write(out, &cfg.outputs.evans_csv, &text)?);
    }
    files.push(write(out, &cfg.outputs.report_json, &to_json(&report))?);
    Ok(files)
}

fn with_axis(spec: WaveSpec, axis: ScanAxis, v: f64) -> WaveSpec {
    match spec {
        WaveSpec::Explicit(mut p) => {
            match axis {
                ScanAxis::MuX => p.mu_x = v,
                ScanAxis::CX => p.c_x = v,
                ScanAxis::OmegaPhi => p.omega_phi = v,
                ScanAxis::MuPhi => p.mu_phi = v,
                _ => unreachable!("checked by validate"),
            }
            WaveSpec::Explicit(p)
        }
        WaveSpec::Regime(mut r) => {
            match axis {
                ScanAxis::CX => r.c_x = v,
                ScanAxis::Rho0 => r.rho0 = v,
                ScanAxis::KPhi => r.k_phi = v,
                ScanAxis::Epsilon => r.epsilon = v,
                _ => unreachable!("checked by validate"),
            }
            WaveSpec::Regime(r)
        }
    }
}

fn verdict_cell(v: Option<Verdict>) -> Cell {
    Cell::S(v.map(|v| v.as_str().to_string()).unwrap_or_default())
}

fn wave_row(model: &ModelSpec, cfg: &RunConfig, index: usize, spec: WaveSpec, value: f64) -> Vec<Cell> {
    let result = resolve_wave(model, &spec)
        .map_err(CliError::from)
        .and_then(|w| analyse(model, cfg, w, false));
    let head = [Cell::S(index.to_string()), Cell::F(value)];
    match result {
        Ok((r, _)) => {
            let p = r.wave.params;
            let det = action::to_matrix(&r.action.hess).determinant();
            let vk = r.asymptotics.as_ref().and_then(|s| s.ok()).and_then(|e| e.vk_index);
            let mut row = Vec::from(head);
            row.extend([
                Cell::F(p.mu_x),
                Cell::F(p.c_x),
                Cell::F(p.omega_phi),
                Cell::F(p.mu_phi),
                Cell::F(r.profile.x_period),
                Cell::F(r.profile.k_x),
                Cell::F(det),
                Cell::S(r.coperiodic.negative_signature.to_string()),
                Cell::Opt(vk),
                verdict_cell(Some(r.verdicts.coperiodic)),
                verdict_cell(Some(r.verdicts.sideband)),
                verdict_cell(Some(r.verdicts.transverse)),
                verdict_cell(r.verdicts.splitting_eta0),
                verdict_cell(r.verdicts.splitting_xi0),
                Cell::S(String::new()),
            ]);
            row
        }
        Err(e) => {
            let mut row = Vec::from(head);
            row.extend((0..14).map(|_| Cell::S(String::new())));
            row.push(Cell::S(format!("{}: {e}", e.kind())));
            row
        }
    }
}

fn regime_row(model: &ModelSpec, r: RegimeSpec) -> Vec<Cell> {
    let head = [Cell::F(r.c_x), Cell::F(r.rho0), Cell::F(r.k_phi)];
    let mut row = Vec::from(head);
    match asymptotics::regime_entry(model, r.c_x, r.rho0, r.k_phi) {
        Ok(e) => row.extend([
            Cell::F(e.delta_hyp),
            Cell::F(e.delta_bf),
            Cell::Opt(e.a0),
            Cell::Opt(e.x0),
            Cell::Opt(e.vk_index),
            Cell::S(e.verdict_string()),
            Cell::S(String::new()),
        ]),
        Err(e) => {
            row.extend((0..6).map(|_| Cell::S(String::new())));
            let e = CliError::from(e);
            row.push(Cell::S(format!("{}: {e}", e.kind())));
        }
    }
    row
}

/// Runs one analysis per grid point in a worker pool and writes the rows in
/// grid order. Per-point failures are recorded in the `error` column.
pub fn cmd_scan(cfg: &RunConfig, out: &Path, _opts: &RunOptions) -> Result<Vec<PathBuf>, CliError> {
    let model = cfg.build_model()?;
    let scan = cfg
        .scan
        .as_ref()
        .ok_or_else(|| ConfigError::Invalid("the scan command needs a [scan] section".into()))?;
    let grid = scan.grid()?;
    let spec = cfg.wave_spec();
    let points: Vec<(usize, f64)> = grid.iter().copied().enumerate().collect();
    let text = match scan.kind {
        ScanKind::Waves => {
            let rows = exec::map(ExecMode::Parallel, &points, |&(i, v)| {
                wave_row(&model, cfg, i, with_axis(spec, scan.axis, v), v)
            });
            csv(&WAVE_SCAN_HEADER, &rows)
        }
        ScanKind::Regime => {
            let rows = exec::map(ExecMode::Parallel, &points, |&(_, v)| match with_axis(spec, scan.axis, v) {
                WaveSpec::Regime(r) => regime_row(&model, r),
                WaveSpec::Explicit(_) => unreachable!("checked by validate"),
            });
            csv(&REGIME_HEADER, &rows)
        }
    };
    Ok(vec![write(out, &cfg.outputs.scan_csv, &text)?])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Profile,
    Stability,
    Scan,
}

/// Loads the config, runs the command and returns the process exit code.
/// Failures are printed to stderr as JSON and, when possible, written to the
/// configured error file in `out`.
pub fn run(command: Command, config: &Path, out: &Path, opts: &RunOptions) -> i32 {
    let cfg = RunConfig::load(config);
    let error_name = cfg.as_ref().map(|c| c.outputs.error_json.clone()).unwrap_or_else(|_| "error.json".into());
    let result = cfg.map_err(CliError::from).and_then(|cfg| match command {
        Command::Profile => cmd_profile(&cfg, out, opts),
        Command::Stability => cmd_stability(&cfg, out, opts),
        Command::Scan => cmd_scan(&cfg, out, opts),
    });
    match result {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            0
        }
        Err(e) => {
            let text = to_json(&serde_json::json!({ "error": ErrorReport::from(&e) }));
            eprint!("{text}");
            let _ = write(out, &error_name, &text);
            e.exit_code()
        }
    }
}
