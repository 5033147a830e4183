use std::time::{Duration, Instant};

use crate::cmaes::{optimize_batch, GenerationRecord};
use crate::floquet::Mode;
use crate::harness::config::{ExperimentConfig, ExperimentKind};
use crate::harness::HarnessError;
use crate::qml::{sample_points, test_metric, training_loss, ModelKind, ModelSpec, PointResult};
use crate::qrc::{run_echo_suite, EchoRecord};
use crate::rng::{derive_seed, RngStream};

/// One optimization attempt of a fit experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct FitAttempt {
    pub attempt: usize,
    /// Best training loss found by the optimizer.
    pub train_loss: f64,
    /// Sum of absolute distances on the held-out points.
    pub test_metric: f64,
    pub history: Vec<GenerationRecord>,
    pub best_params: Vec<f64>,
    pub points: Vec<PointResult>,
    pub clamp_events: usize,
    pub rejected_evaluations: usize,
    /// Variates drawn from every noise stream of this attempt.
    pub noise_draws: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    pub model: ModelKind,
    pub mode: Mode,
    pub param_names: Vec<String>,
    pub attempts: Vec<FitAttempt>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ReportBody {
    Echo(Vec<EchoRecord>),
    Fit(FitReport),
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub config: ExperimentConfig,
    pub body: ReportBody,
    pub wall_clock: Duration,
}

/// Training/test points are seeded per attempt only, never per mode, so the
/// noiseless and noisy cases of one master seed see identical data.
///
/// Seed labels: `qml.train`, `qml.test`, `qml.init`, `cma` per attempt;
/// `qml.noise.train` per (attempt, generation, member); `qml.noise.test`
/// per attempt.
pub fn run_fit_attempt(
    config: &ExperimentConfig,
    spec: &ModelSpec,
    attempt: usize,
) -> Result<FitAttempt, HarnessError> {
    let seed = config.master_seed;
    let a = attempt as u64;
    let q = &config.qml;
    let train = sample_points(
        q.n_train,
        q.domain_lo,
        q.domain_hi,
        &mut RngStream::derived(seed, "qml.train", &[a]),
    )?;
    let test = sample_points(
        q.n_test,
        q.domain_lo,
        q.domain_hi,
        &mut RngStream::derived(seed, "qml.test", &[a]),
    )?;
    let x0 = spec.initial_params(&mut RngStream::derived(seed, "qml.init", &[a]));

    let mode = config.mode;
    let mut clamp_events = 0;
    let mut noise_draws = 0;
    let result = optimize_batch(
        |generation, candidates| {
            candidates
                .iter()
                .enumerate()
                .map(|(member, params)| {
                    let mut rng = RngStream::derived(
                        seed,
                        "qml.noise.train",
                        &[a, generation as u64, member as u64],
                    );
                    let eval =
                        training_loss(spec, params, &train, mode, q.noise_repeats, &mut rng)?;
                    clamp_events += eval.clamp_events;
                    noise_draws += rng.draws();
                    Ok(eval.value)
                })
                .collect()
        },
        &x0,
        config.sigma0,
        config.generations,
        derive_seed(seed, "cma", &[a]),
    )?;

    let mut rng = RngStream::derived(seed, "qml.noise.test", &[a]);
    let report = test_metric(
        spec,
        &result.best_params,
        &test,
        mode,
        q.noise_repeats,
        &mut rng,
    )?;
    noise_draws += rng.draws();

    Ok(FitAttempt {
        attempt,
        train_loss: result.best_fitness,
        test_metric: report.metric,
        history: result.history,
        best_params: result.best_params,
        points: report.points,
        clamp_events: clamp_events + report.clamp_events,
        rejected_evaluations: result.rejected_evaluations,
        noise_draws,
    })
}

/// Runs the configured experiment to completion.
pub fn run_case(config: &ExperimentConfig) -> Result<RunReport, HarnessError> {
    config.validate()?;
    let start = Instant::now();
    let body = match config.experiment {
        ExperimentKind::QrcEcho => ReportBody::Echo(run_echo_suite(&config.echo_config())?),
        ExperimentKind::FitQnn | ExperimentKind::FitVqkan => {
            let spec = config
                .model_spec()?
                .expect("fit experiments define a model");
            let attempts = (0..config.attempts)
                .map(|attempt| {
                    run_fit_attempt(config, &spec, attempt).map_err(|e| HarnessError::Attempt {
                        attempt,
                        message: e.to_string(),
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            ReportBody::Fit(FitReport {
                model: spec.kind(),
                mode: config.mode,
                param_names: spec.param_names(),
                attempts,
            })
        }
    };
    Ok(RunReport {
        config: config.clone(),
        body,
        wall_clock: start.elapsed(),
    })
}
