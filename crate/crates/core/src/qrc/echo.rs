//! Six-wave echo benchmark comparing noiseless and noisy reservoirs.

use crate::error::{Error, Result};
use crate::floquet::{ising_template, FloquetSchedule, Mode};
use crate::qrc::readout::{fit_filter, predict, qrc_loss};
use crate::qrc::reservoir::{harvest_features, Reservoir};
use crate::qrc::waveform::{generate_waveform, WaveKind, WaveformSpec};
use crate::rng::{derive_seed, RngStream};

#[derive(Debug, Clone, PartialEq)]
pub struct EchoConfig {
    pub master_seed: u64,
    pub attempts: usize,
    pub n_qubits: usize,
    pub half_period: f64,
    pub frames_per_half_period: usize,
    pub d: f64,
    pub noise_scale: f64,
    pub noise_sigma: f64,
    pub resample_per_frame: bool,
    pub waves: Vec<WaveKind>,
    /// Steps per reservoir sample (fresh start each sample).
    pub sample_frames: usize,
    pub echo_delay: usize,
    pub n_steps: usize,
    pub period_steps: usize,
    pub train_fraction: f64,
    pub rcond: f64,
}

impl Default for EchoConfig {
    fn default() -> Self {
        Self {
            master_seed: 0,
            attempts: 10,
            n_qubits: 4,
            half_period: 1.0,
            frames_per_half_period: 10,
            d: crate::floquet::DEFAULT_DETUNING,
            noise_scale: 0.1,
            noise_sigma: crate::floquet::NOISE_SIGMA,
            resample_per_frame: false,
            waves: vec![
                WaveKind::Sin,
                WaveKind::Triangle,
                WaveKind::Block,
                WaveKind::Saw,
                WaveKind::Random,
                WaveKind::Random,
            ],
            sample_frames: 20,
            echo_delay: 5,
            n_steps: 100,
            period_steps: 20,
            train_fraction: 0.6,
            rcond: crate::qrc::readout::DEFAULT_RCOND,
        }
    }
}

impl EchoConfig {
    /// First step of the test segment.
    pub fn split_index(&self) -> usize {
        (self.train_fraction * self.n_steps as f64).floor() as usize
    }

    pub fn n_test(&self) -> usize {
        self.n_steps - self.split_index()
    }

    pub fn validate(&self) -> Result<()> {
        if self.attempts == 0 {
            return Err(Error::InvalidArgument("attempts must be at least 1".into()));
        }
        if self.waves.is_empty() {
            return Err(Error::Empty("wave list"));
        }
        if self.sample_frames == 0 {
            return Err(Error::OutOfRange {
                what: "sample_frames",
                value: 0.0,
            });
        }
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(Error::OutOfRange {
                what: "train_fraction",
                value: self.train_fraction,
            });
        }
        let split = self.split_index();
        if split <= self.echo_delay || split >= self.n_steps {
            return Err(Error::InvalidArgument(format!(
                "split at step {split} leaves no training rows after echo_delay {} or no test rows in {} steps",
                self.echo_delay, self.n_steps
            )));
        }
        Ok(())
    }

    /// Labels such as `sin` or `random_2`; repeated kinds are numbered.
    pub fn wave_labels(&self) -> Vec<String> {
        self.waves
            .iter()
            .enumerate()
            .map(|(i, kind)| {
                let total = self.waves.iter().filter(|k| *k == kind).count();
                if total > 1 {
                    let ordinal = self.waves[..=i].iter().filter(|k| *k == kind).count();
                    format!("{kind}_{ordinal}")
                } else {
                    kind.to_string()
                }
            })
            .collect()
    }
}

/// Outcome of one (wave, mode, attempt) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct EchoRecord {
    pub wave: String,
    pub mode: Mode,
    pub attempt: usize,
    pub loss: f64,
    /// `|y_tilde_k - y_k|` over the test segment.
    pub test_abs_errors: Vec<f64>,
}

/// Echo teacher: the input delayed by `delay` steps (zero before the start).
pub fn echo_teacher(input: &[f64], delay: usize) -> Vec<f64> {
    (0..input.len())
        .map(|k| if k >= delay { input[k - delay] } else { 0.0 })
        .collect()
}

/// Runs one wave through the reservoir, fits on the training segment and
/// scores the held-out segment.
pub fn run_echo_case(
    config: &EchoConfig,
    input: &[f64],
    reservoir: &Reservoir,
    mode: Mode,
    rng: &mut RngStream,
) -> Result<(f64, Vec<f64>)> {
    let v = harvest_features(input, reservoir, mode, rng)?;
    let y = echo_teacher(input, config.echo_delay);
    let split = config.split_index();
    let train_rows = split - config.echo_delay;
    let v_train = v.rows(config.echo_delay, train_rows).into_owned();
    let w = fit_filter(&v_train, &y[config.echo_delay..split], config.rcond)?;
    let v_test = v.rows(split, config.n_steps - split).into_owned();
    let y_tilde = predict(&v_test, &w)?;
    let y_test = &y[split..];
    let loss = qrc_loss(&y_tilde, y_test)?;
    let abs = y_tilde
        .iter()
        .zip(y_test)
        .map(|(a, b)| (a - b).abs())
        .collect();
    Ok((loss, abs))
}

/// Every wave, both modes, `attempts` fresh reservoirs.
///
/// Seeds: reservoir per attempt from `qrc.reservoir`, random waves per wave
/// index from `qrc.wave`, noise per (attempt, wave) from `qrc.noise`.
pub fn run_echo_suite(config: &EchoConfig) -> Result<Vec<EchoRecord>> {
    config.validate()?;
    let labels = config.wave_labels();
    let inputs = config
        .waves
        .iter()
        .enumerate()
        .map(|(i, &kind)| {
            generate_waveform(&WaveformSpec {
                kind,
                n_steps: config.n_steps,
                period_steps: config.period_steps,
                seed: derive_seed(config.master_seed, "qrc.wave", &[i as u64]),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let schedule = FloquetSchedule::new(
        ising_template(config.n_qubits)?,
        config.half_period,
        config.frames_per_half_period,
        config.d,
    )?
    .with_resample_per_frame(config.resample_per_frame);

    let mut records = Vec::with_capacity(2 * config.attempts * inputs.len());
    for mode in [Mode::Noiseless, Mode::Qtcc] {
        for attempt in 0..config.attempts {
            let mut reservoir_rng =
                RngStream::derived(config.master_seed, "qrc.reservoir", &[attempt as u64]);
            let reservoir = Reservoir::random(
                schedule.clone(),
                config.noise_scale,
                config.noise_sigma,
                &mut reservoir_rng,
            )?
            .with_sample_frames(config.sample_frames)?;
            for (i, input) in inputs.iter().enumerate() {
                let mut noise = RngStream::derived(
                    config.master_seed,
                    "qrc.noise",
                    &[attempt as u64, i as u64],
                );
                let (loss, test_abs_errors) =
                    run_echo_case(config, input, &reservoir, mode, &mut noise)?;
                records.push(EchoRecord {
                    wave: labels[i].clone(),
                    mode,
                    attempt,
                    loss,
                    test_abs_errors,
                });
            }
        }
    }
    Ok(records)
}

/// Mean loss over every record of `mode`.
pub fn mean_loss(records: &[EchoRecord], mode: Mode) -> f64 {
    let losses: Vec<f64> = records
        .iter()
        .filter(|r| r.mode == mode)
        .map(|r| r.loss)
        .collect();
    losses.iter().sum::<f64>() / losses.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> EchoConfig {
        EchoConfig {
            attempts: 2,
            n_steps: 40,
            ..EchoConfig::default()
        }
    }

    #[test]
    fn labels_number_repeats() {
        assert_eq!(
            EchoConfig::default().wave_labels(),
            vec!["sin", "triangle", "block", "saw", "random_1", "random_2"]
        );
    }

    #[test]
    fn teacher_is_delayed_input() {
        assert_eq!(
            echo_teacher(&[1.0, 2.0, 3.0, 4.0], 2),
            vec![0.0, 0.0, 1.0, 2.0]
        );
        assert_eq!(echo_teacher(&[1.0, 2.0], 0), vec![1.0, 2.0]);
    }

    #[test]
    fn suite_shape_and_determinism() {
        let cfg = small();
        let a = run_echo_suite(&cfg).unwrap();
        assert_eq!(a.len(), 2 * 2 * 6);
        assert!(a.iter().all(|r| r.loss.is_finite() && r.loss >= 0.0));
        assert!(a.iter().all(|r| r.test_abs_errors.len() == cfg.n_test()));
        let b = run_echo_suite(&cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn zero_delay_losses_nonnegative() {
        let cfg = EchoConfig {
            echo_delay: 0,
            ..small()
        };
        let recs = run_echo_suite(&cfg).unwrap();
        assert!(recs.iter().all(|r| r.loss >= 0.0 && r.loss.is_finite()));
    }

    #[test]
    fn validation() {
        let mut cfg = small();
        cfg.echo_delay = 30;
        assert!(cfg.validate().is_err());
        let mut cfg = small();
        cfg.train_fraction = 1.0;
        assert!(cfg.validate().is_err());
        let mut cfg = small();
        cfg.waves.clear();
        assert!(cfg.validate().is_err());
    }
}
