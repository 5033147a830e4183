use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngStream;

const RANDOM_COMPONENTS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WaveKind {
    Sin,
    Triangle,
    Block,
    Saw,
    Random,
}

impl WaveKind {
    pub fn as_str(self) -> &'static str {
        match self {
            WaveKind::Sin => "sin",
            WaveKind::Triangle => "triangle",
            WaveKind::Block => "block",
            WaveKind::Saw => "saw",
            WaveKind::Random => "random",
        }
    }
}

impl fmt::Display for WaveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for WaveKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sin" => Ok(WaveKind::Sin),
            "triangle" => Ok(WaveKind::Triangle),
            "block" => Ok(WaveKind::Block),
            "saw" => Ok(WaveKind::Saw),
            "random" => Ok(WaveKind::Random),
            other => Err(Error::UnknownWaveform(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveformSpec {
    pub kind: WaveKind,
    pub n_steps: usize,
    pub period_steps: usize,
    /// Only read for [`WaveKind::Random`].
    pub seed: u64,
}

/// Samples `k = 0..n_steps` of the requested wave; every value lies in `[-1, 1]`.
///
/// * sin: `sin(2 pi k / P)`
/// * triangle: zigzag in phase with the sine, peaks `+-1` at quarter periods
/// * block: `+1` on the first half of each period, `-1` on the second
/// * saw: `2 frac(k / P) - 1`
/// * random: five sinusoids with uniform amplitudes in `[0, 1)`, phases in
///   `[0, 2 pi)` and frequencies in `[0.5, 5)` cycles per `P` steps, rescaled
///   so the largest magnitude is 1
pub fn generate_waveform(spec: &WaveformSpec) -> Result<Vec<f64>> {
    if spec.n_steps == 0 {
        return Err(Error::OutOfRange {
            what: "n_steps",
            value: 0.0,
        });
    }
    if spec.period_steps < 2 {
        return Err(Error::OutOfRange {
            what: "period_steps",
            value: spec.period_steps as f64,
        });
    }
    let p = spec.period_steps as f64;
    let phase = |k: usize| (k % spec.period_steps) as f64 / p;
    let wave = match spec.kind {
        WaveKind::Sin => (0..spec.n_steps)
            .map(|k| (2.0 * PI * phase(k)).sin())
            .collect(),
        WaveKind::Triangle => (0..spec.n_steps)
            .map(|k| {
                let f = phase(k);
                if f < 0.25 {
                    4.0 * f
                } else if f < 0.75 {
                    2.0 - 4.0 * f
                } else {
                    4.0 * f - 4.0
                }
            })
            .collect(),
        WaveKind::Block => (0..spec.n_steps)
            .map(|k| if phase(k) < 0.5 { 1.0 } else { -1.0 })
            .collect(),
        WaveKind::Saw => (0..spec.n_steps).map(|k| 2.0 * phase(k) - 1.0).collect(),
        WaveKind::Random => {
            let mut rng = RngStream::from_seed(spec.seed);
            let components: Vec<(f64, f64, f64)> = (0..RANDOM_COMPONENTS)
                .map(|_| {
                    (
                        rng.uniform(0.0, 1.0),
                        rng.uniform(0.5, 5.0),
                        rng.uniform(0.0, 2.0 * PI),
                    )
                })
                .collect();
            let raw: Vec<f64> = (0..spec.n_steps)
                .map(|k| {
                    components
                        .iter()
                        .map(|(amp, cycles, ph)| {
                            amp * (2.0 * PI * cycles * k as f64 / p + ph).sin()
                        })
                        .sum()
                })
                .collect();
            let peak = raw.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
            if peak > 0.0 {
                raw.into_iter().map(|v| v / peak).collect()
            } else {
                raw
            }
        }
    };
    Ok(wave)
}
