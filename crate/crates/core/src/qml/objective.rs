//! Training loss and held-out metric for the fitting task.

use crate::error::{Error, Result};
use crate::floquet::Mode;
use crate::qml::encoding::{target_function, EncodedInput};
use crate::qml::model::ModelSpec;
use crate::rng::RngStream;

/// A scalar objective value plus the acos clamp events seen while computing it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub value: f64,
    pub clamp_events: usize,
}

/// Mean prediction over the noise realizations of one point.
fn mean_prediction(
    spec: &ModelSpec,
    params: &[f64],
    input: &EncodedInput,
    mode: Mode,
    repeats: usize,
    rng: &mut RngStream,
) -> Result<(f64, usize)> {
    // Noiseless evaluations are deterministic; repeating them is wasted work.
    let repeats = match mode {
        Mode::Noiseless => 1,
        Mode::Qtcc => repeats,
    };
    let mut sum = 0.0;
    let mut clamps = 0;
    for _ in 0..repeats {
        let f = spec.forward(params, input, mode, rng)?;
        sum += f.prediction;
        clamps += f.clamp_events;
    }
    Ok((sum / repeats as f64, clamps))
}

fn check_repeats(repeats: usize) -> Result<()> {
    if repeats == 0 {
        return Err(Error::OutOfRange {
            what: "noise repeats",
            value: 0.0,
        });
    }
    Ok(())
}

/// `sum_m mean_r (prediction_r(u_m) - f(u_m))^2`.
///
/// In noiseless mode each sample is evaluated once whatever `repeats` says.
pub fn training_loss(
    spec: &ModelSpec,
    params: &[f64],
    samples: &[EncodedInput],
    mode: Mode,
    repeats: usize,
    rng: &mut RngStream,
) -> Result<Evaluation> {
    if samples.is_empty() {
        return Err(Error::Empty("training samples"));
    }
    check_repeats(repeats)?;
    let reps = if mode == Mode::Noiseless { 1 } else { repeats };
    let mut value = 0.0;
    let mut clamp_events = 0;
    for input in samples {
        let target = target_function(input);
        let mut acc = 0.0;
        for _ in 0..reps {
            let f = spec.forward(params, input, mode, rng)?;
            acc += (f.prediction - target).powi(2);
            clamp_events += f.clamp_events;
        }
        value += acc / reps as f64;
    }
    Ok(Evaluation {
        value,
        clamp_events,
    })
}

/// One held-out point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointResult {
    pub input: EncodedInput,
    pub prediction: f64,
    pub target: f64,
    pub abs_distance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestReport {
    /// Sum of absolute distances.
    pub metric: f64,
    pub points: Vec<PointResult>,
    pub clamp_events: usize,
}

/// `sum_m |mean_r prediction_r(u_m) - f(u_m)|`.
pub fn test_metric(
    spec: &ModelSpec,
    params: &[f64],
    points: &[EncodedInput],
    mode: Mode,
    repeats: usize,
    rng: &mut RngStream,
) -> Result<TestReport> {
    if points.is_empty() {
        return Err(Error::Empty("test points"));
    }
    check_repeats(repeats)?;
    let mut out = Vec::with_capacity(points.len());
    let mut clamp_events = 0;
    for input in points {
        let (prediction, clamps) = mean_prediction(spec, params, input, mode, repeats, rng)?;
        clamp_events += clamps;
        let target = target_function(input);
        out.push(PointResult {
            input: *input,
            prediction,
            target,
            abs_distance: (prediction - target).abs(),
        });
    }
    Ok(TestReport {
        metric: out.iter().map(|p| p.abs_distance).sum(),
        points: out,
        clamp_events,
    })
}
