use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::floquet::{ising_template, FloquetSchedule, Mode, DEFAULT_DETUNING, NOISE_SIGMA};
use crate::harness::HarnessError;
use crate::qml::{BSplineBasis, ModelKind, ModelSpec};
use crate::qrc::{EchoConfig, WaveKind, DEFAULT_RCOND};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    QrcEcho,
    FitQnn,
    FitVqkan,
}

impl ExperimentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentKind::QrcEcho => "qrc_echo",
            ExperimentKind::FitQnn => "fit_qnn",
            ExperimentKind::FitVqkan => "fit_vqkan",
        }
    }

    pub fn model(self) -> Option<ModelKind> {
        match self {
            ExperimentKind::QrcEcho => None,
            ExperimentKind::FitQnn => Some(ModelKind::Qnn),
            ExperimentKind::FitVqkan => Some(ModelKind::Vqkan),
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentKind {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, HarnessError> {
        match s {
            "qrc_echo" => Ok(ExperimentKind::QrcEcho),
            "fit_qnn" => Ok(ExperimentKind::FitQnn),
            "fit_vqkan" => Ok(ExperimentKind::FitVqkan),
            other => Err(HarnessError::Config(format!(
                "unknown experiment `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FloquetConfig {
    pub half_period: f64,
    pub frames_per_half_period: usize,
    pub d: f64,
    pub noise_scale: f64,
    pub noise_sigma: f64,
    pub resample_per_frame: bool,
}

impl Default for FloquetConfig {
    fn default() -> Self {
        Self {
            half_period: 1.0,
            frames_per_half_period: 10,
            d: DEFAULT_DETUNING,
            noise_scale: 0.1,
            noise_sigma: NOISE_SIGMA,
            resample_per_frame: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QrcConfig {
    pub n_qubits: usize,
    pub waves: Vec<WaveKind>,
    pub sample_frames: usize,
    pub echo_delay: usize,
    pub n_steps: usize,
    pub period_steps: usize,
    pub train_fraction: f64,
    pub rcond: f64,
}

impl Default for QrcConfig {
    fn default() -> Self {
        let echo = EchoConfig::default();
        Self {
            n_qubits: echo.n_qubits,
            waves: echo.waves,
            sample_frames: echo.sample_frames,
            echo_delay: echo.echo_delay,
            n_steps: echo.n_steps,
            period_steps: echo.period_steps,
            train_fraction: echo.train_fraction,
            rcond: DEFAULT_RCOND,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QmlConfig {
    pub n_train: usize,
    pub n_test: usize,
    pub n_layers: usize,
    pub noise_repeats: usize,
    pub spline_grid: usize,
    pub spline_degree: usize,
    /// Spline domain and sampling box for the encoded coordinates.
    pub domain_lo: f64,
    pub domain_hi: f64,
}

impl Default for QmlConfig {
    fn default() -> Self {
        Self {
            n_train: 10,
            n_test: 50,
            n_layers: 2,
            noise_repeats: 10,
            spline_grid: 5,
            spline_degree: 3,
            domain_lo: 0.0,
            domain_hi: 0.25,
        }
    }
}

/// Fully resolved experiment description; missing keys take these defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    /// Fit experiments only; the echo suite always runs both modes.
    pub mode: Mode,
    pub master_seed: u64,
    pub attempts: usize,
    pub generations: usize,
    pub sigma0: f64,
    pub floquet: FloquetConfig,
    pub qrc: QrcConfig,
    pub qml: QmlConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            experiment: ExperimentKind::QrcEcho,
            mode: Mode::Noiseless,
            master_seed: 0,
            attempts: 10,
            generations: 15,
            sigma0: 0.3,
            floquet: FloquetConfig::default(),
            qrc: QrcConfig::default(),
            qml: QmlConfig::default(),
        }
    }
}

fn invalid(field: &str, message: impl fmt::Display) -> HarnessError {
    HarnessError::Config(format!("{field}: {message}"))
}

fn require(ok: bool, field: &str, message: impl fmt::Display) -> Result<(), HarnessError> {
    if ok {
        Ok(())
    } else {
        Err(invalid(field, message))
    }
}

impl ExperimentConfig {
    /// Parses and validates a TOML document.
    pub fn parse(text: &str) -> Result<Self, HarnessError> {
        let config: Self = toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    /// TOML text that [`ExperimentConfig::parse`] maps back to `self`.
    pub fn to_toml(&self) -> Result<String, HarnessError> {
        toml::to_string(self).map_err(|e| HarnessError::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let f = &self.floquet;
        require(
            self.master_seed <= i64::MAX as u64,
            "master_seed",
            "must fit in a signed 64-bit integer",
        )?;
        require(self.attempts >= 1, "attempts", "must be at least 1")?;
        require(self.generations >= 1, "generations", "must be at least 1")?;
        require(
            self.sigma0.is_finite() && self.sigma0 > 0.0,
            "sigma0",
            format!("must be positive, got {}", self.sigma0),
        )?;
        require(
            f.half_period.is_finite() && f.half_period > 0.0,
            "floquet.half_period",
            format!("must be positive, got {}", f.half_period),
        )?;
        require(
            f.frames_per_half_period >= 1,
            "floquet.frames_per_half_period",
            "must be at least 1",
        )?;
        require(
            (0.0..=1.0).contains(&f.d),
            "floquet.d",
            format!("must lie in [0, 1], got {}", f.d),
        )?;
        require(
            f.noise_scale.is_finite() && f.noise_scale >= 0.0,
            "floquet.noise_scale",
            format!("must be non-negative, got {}", f.noise_scale),
        )?;
        require(
            f.noise_sigma.is_finite() && f.noise_sigma >= 0.0,
            "floquet.noise_sigma",
            format!("must be non-negative, got {}", f.noise_sigma),
        )?;

        match self.experiment {
            ExperimentKind::QrcEcho => {
                let q = &self.qrc;
                require(
                    (1..=crate::quantum::MAX_QUBITS).contains(&q.n_qubits),
                    "qrc.n_qubits",
                    "must be in 1..=12",
                )?;
                require(
                    !q.waves.is_empty(),
                    "qrc.waves",
                    "must list at least one wave",
                )?;
                require(
                    q.sample_frames >= 1,
                    "qrc.sample_frames",
                    "must be at least 1",
                )?;
                require(q.n_steps >= 1, "qrc.n_steps", "must be at least 1")?;
                require(
                    q.period_steps >= 2,
                    "qrc.period_steps",
                    "must be at least 2",
                )?;
                require(
                    q.train_fraction > 0.0 && q.train_fraction < 1.0,
                    "qrc.train_fraction",
                    format!("must lie in (0, 1), got {}", q.train_fraction),
                )?;
                require(
                    q.rcond.is_finite() && q.rcond >= 0.0,
                    "qrc.rcond",
                    "must be non-negative",
                )?;
                let echo = self.echo_config();
                let split = echo.split_index();
                require(
                    split > q.echo_delay && split < q.n_steps,
                    "qrc.echo_delay",
                    format!(
                        "leaves no training or test rows (split at step {split} of {})",
                        q.n_steps
                    ),
                )?;
            }
            ExperimentKind::FitQnn | ExperimentKind::FitVqkan => {
                let m = &self.qml;
                require(m.n_train >= 1, "qml.n_train", "must be at least 1")?;
                require(m.n_test >= 1, "qml.n_test", "must be at least 1")?;
                require(m.n_layers >= 1, "qml.n_layers", "must be at least 1")?;
                require(
                    m.noise_repeats >= 1,
                    "qml.noise_repeats",
                    "must be at least 1",
                )?;
                require(m.spline_grid >= 1, "qml.spline_grid", "must be at least 1")?;
                require(
                    0.0 <= m.domain_lo && m.domain_lo < m.domain_hi && m.domain_hi <= 1.0,
                    "qml.domain_lo",
                    format!(
                        "domain [{}, {}] must satisfy 0 <= lo < hi <= 1",
                        m.domain_lo, m.domain_hi
                    ),
                )?;
                self.model_spec()?;
            }
        }
        Ok(())
    }

    pub fn echo_config(&self) -> EchoConfig {
        let f = &self.floquet;
        let q = &self.qrc;
        EchoConfig {
            master_seed: self.master_seed,
            attempts: self.attempts,
            n_qubits: q.n_qubits,
            half_period: f.half_period,
            frames_per_half_period: f.frames_per_half_period,
            d: f.d,
            noise_scale: f.noise_scale,
            noise_sigma: f.noise_sigma,
            resample_per_frame: f.resample_per_frame,
            waves: q.waves.clone(),
            sample_frames: q.sample_frames,
            echo_delay: q.echo_delay,
            n_steps: q.n_steps,
            period_steps: q.period_steps,
            train_fraction: q.train_fraction,
            rcond: q.rcond,
        }
    }

    /// Model for fit experiments; `None` for the echo suite.
    pub fn model_spec(&self) -> Result<Option<ModelSpec>, HarnessError> {
        let Some(kind) = self.experiment.model() else {
            return Ok(None);
        };
        let f = &self.floquet;
        let m = &self.qml;
        let schedule = FloquetSchedule::new(
            ising_template(crate::qml::QML_QUBITS)?,
            f.half_period,
            f.frames_per_half_period,
            f.d,
        )?
        .with_resample_per_frame(f.resample_per_frame);
        let basis = BSplineBasis::new(m.domain_lo, m.domain_hi, m.spline_grid, m.spline_degree)?;
        Ok(Some(ModelSpec::new(
            kind,
            m.n_layers,
            schedule,
            basis,
            f.noise_scale,
            f.noise_sigma,
        )?))
    }
}
