//! TOML run configuration.

use serde::{Deserialize, Serialize};
use std::path::Path;
use wavestab_core::profile::WaveParams;
use wavestab_core::{make_model, ModelSpec};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config file: {0}")]
    Io(String),
    #[error("cannot parse config: {0}")]
    Parse(String),
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelSection,
    pub wave: WaveSection,
    #[serde(default)]
    pub numerics: Numerics,
    #[serde(default)]
    pub outputs: Outputs,
    pub evans_scan: Option<EvansScan>,
    pub count: Option<CountSection>,
    pub scan: Option<ScanSection>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub kappa: Vec<f64>,
    #[serde(rename = "W")]
    pub w: Vec<f64>,
    pub kappa_transverse: Option<Vec<f64>>,
    pub alpha_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Harmonic,
    Solitary,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegimeSpec {
    pub c_x: f64,
    pub rho0: f64,
    pub k_phi: f64,
    pub epsilon: f64,
    pub side: Side,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveSection {
    pub params: Option<WaveParams>,
    pub regime: Option<RegimeSpec>,
}

/// The wave to analyse, after checking that exactly one form is given.
#[derive(Debug, Clone, Copy)]
pub enum WaveSpec {
    Explicit(WaveParams),
    Regime(RegimeSpec),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Numerics {
    pub n_points: usize,
    pub quad_rel_tol: f64,
    pub quad_max_panels: usize,
    pub fd_step: f64,
    pub ode_rel_tol: f64,
    pub ode_abs_tol: f64,
    pub lambda_ceiling: f64,
    pub directions: usize,
    pub contour_points_per_edge: usize,
}

impl Default for Numerics {
    fn default() -> Self {
        Numerics {
            n_points: 256,
            quad_rel_tol: 1e-13,
            quad_max_panels: 4000,
            fd_step: 1e-4,
            ode_rel_tol: 1e-12,
            ode_abs_tol: 1e-14,
            lambda_ceiling: 500.0,
            directions: 720,
            contour_points_per_edge: 24,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Outputs {
    pub profile_csv: String,
    pub summary_json: String,
    pub report_json: String,
    pub evans_csv: String,
    pub scan_csv: String,
    pub error_json: String,
}

impl Default for Outputs {
    fn default() -> Self {
        Outputs {
            profile_csv: "profile.csv".into(),
            summary_json: "summary.json".into(),
            report_json: "report.json".into(),
            evans_csv: "evans.csv".into(),
            scan_csv: "scan.csv".into(),
            error_json: "error.json".into(),
        }
    }
}

/// Grid of Evans function samples written to the Evans CSV.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvansScan {
    pub xi: Vec<f64>,
    pub eta_sq: Vec<f64>,
    pub lambda_re: Vec<f64>,
    #[serde(default = "zero_list")]
    pub lambda_im: Vec<f64>,
}

fn zero_list() -> Vec<f64> {
    vec![0.0]
}

/// Argument-principle eigenvalue counts inside a rectangle.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CountSection {
    pub xi: Vec<f64>,
    pub eta_sq: Vec<f64>,
    /// `[re_min, re_max, im_min, im_max]`.
    pub rect: [f64; 4],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanAxis {
    MuX,
    CX,
    OmegaPhi,
    MuPhi,
    Rho0,
    KPhi,
    Epsilon,
}

impl ScanAxis {
    pub fn name(self) -> &'static str {
        match self {
            ScanAxis::MuX => "mu_x",
            ScanAxis::CX => "c_x",
            ScanAxis::OmegaPhi => "omega_phi",
            ScanAxis::MuPhi => "mu_phi",
            ScanAxis::Rho0 => "rho0",
            ScanAxis::KPhi => "k_phi",
            ScanAxis::Epsilon => "epsilon",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScanKind {
    /// One stability report per wave along the axis.
    #[default]
    Waves,
    /// Asymptotic indices and verdicts at `(c_x, rho0, k_phi)` points.
    Regime,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSection {
    #[serde(default)]
    pub kind: ScanKind,
    pub axis: ScanAxis,
    /// Explicit axis values; takes precedence over `start/stop/count`.
    pub values: Option<Vec<f64>>,
    pub start: Option<f64>,
    pub stop: Option<f64>,
    pub count: Option<usize>,
    /// Use a geometric instead of a linear grid.
    #[serde(default)]
    pub log: bool,
}

impl ScanSection {
    pub fn grid(&self) -> Result<Vec<f64>, ConfigError> {
        let g = match (&self.values, self.start, self.stop, self.count) {
            (Some(v), _, _, _) => v.clone(),
            (None, Some(a), Some(b), Some(n)) => {
                if self.log && !(a > 0.0 && b > 0.0) {
                    return Err(ConfigError::Invalid("log scan needs positive start and stop".into()));
                }
                (0..n)
                    .map(|i| {
                        let t = if n == 1 { 0.0 } else { i as f64 / (n - 1) as f64 };
                        if self.log {
                            (a.ln() + t * (b.ln() - a.ln())).exp()
                        } else {
                            a + t * (b - a)
                        }
                    })
                    .collect()
            }
            _ => return Err(ConfigError::Invalid("scan needs either values or start, stop and count".into())),
        };
        if g.is_empty() {
            return Err(ConfigError::Invalid("scan grid is empty".into()));
        }
        if g.iter().any(|v| !v.is_finite()) {
            return Err(ConfigError::Invalid("scan grid contains non-finite values".into()));
        }
        Ok(g)
    }
}

impl RunConfig {
    pub fn from_str(text: &str) -> Result<RunConfig, ConfigError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<RunConfig, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io(format!("{}: {e}", path.display())))?;
        RunConfig::from_str(&text)
    }

    pub fn wave_spec(&self) -> WaveSpec {
        match (self.wave.params, self.wave.regime) {
            (Some(p), _) => WaveSpec::Explicit(p),
            (None, Some(r)) => WaveSpec::Regime(r),
            (None, None) => unreachable!("checked by validate"),
        }
    }

    pub fn build_model(&self) -> Result<ModelSpec, ConfigError> {
        let m = &self.model;
        make_model(&m.kappa, &m.w, m.kappa_transverse.as_deref(), m.alpha_max)
            .map_err(|e| ConfigError::Invalid(format!("model: {e}")))
    }

    fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |s: &str| Err(ConfigError::Invalid(s.into()));
        match (&self.wave.params, &self.wave.regime) {
            (Some(_), Some(_)) => return invalid("wave: give either params or regime, not both"),
            (None, None) => return invalid("wave: one of params or regime is required"),
            _ => {}
        }
        if let Some(r) = &self.wave.regime {
            if !(r.epsilon > 0.0) {
                return invalid("wave.regime.epsilon must be positive");
            }
        }
        let n = &self.numerics;
        if n.n_points < 8 {
            return invalid("numerics.n_points must be at least 8");
        }
        if n.directions == 0 || n.contour_points_per_edge < 4 {
            return invalid("numerics.directions must be positive and contour_points_per_edge at least 4");
        }
        for (name, v) in [
            ("quad_rel_tol", n.quad_rel_tol),
            ("fd_step", n.fd_step),
            ("ode_rel_tol", n.ode_rel_tol),
            ("ode_abs_tol", n.ode_abs_tol),
            ("lambda_ceiling", n.lambda_ceiling),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(ConfigError::Invalid(format!("numerics.{name} must be positive")));
            }
        }
        if let Some(e) = &self.evans_scan {
            if e.xi.is_empty() || e.eta_sq.is_empty() || e.lambda_re.is_empty() || e.lambda_im.is_empty() {
                return invalid("evans_scan lists must be nonempty");
            }
        }
        if let Some(c) = &self.count {
            if c.xi.is_empty() || c.eta_sq.is_empty() || !(c.rect[0] < c.rect[1] && c.rect[2] < c.rect[3]) {
                return invalid("count needs nonempty xi and eta_sq and a rectangle with min < max");
            }
        }
        if let Some(s) = &self.scan {
            s.grid()?;
            let regime_axis = matches!(s.axis, ScanAxis::Rho0 | ScanAxis::KPhi | ScanAxis::Epsilon);
            let param_axis = matches!(s.axis, ScanAxis::MuX | ScanAxis::OmegaPhi | ScanAxis::MuPhi);
            let explicit = self.wave.params.is_some();
            if s.kind == ScanKind::Waves && ((explicit && regime_axis) || (!explicit && param_axis)) {
                return Err(ConfigError::Invalid(format!(
                    "scan axis {} does not apply to this wave section",
                    s.axis.name()
                )));
            }
            if s.kind == ScanKind::Regime && (explicit || param_axis || s.axis == ScanAxis::Epsilon) {
                return invalid("regime scans need a wave.regime section and an axis among c_x, rho0, k_phi");
            }
        }
        Ok(())
    }
}
