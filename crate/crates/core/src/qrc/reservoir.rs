use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::floquet::{floquet_propagate_driven, FloquetSchedule, Mode, NoiseSpec};
use crate::quantum::{ProjectorTerm, Statevector};
use crate::rng::RngStream;

/// Qubit that receives the input signal.
pub const INPUT_QUBIT: usize = 0;

/// `0.5 (1 + x) |0><0| + 0.5 (1 - x) |1><1|` on the input qubit.
pub fn input_operator(x: f64) -> Result<ProjectorTerm> {
    if !(x.is_finite() && x.abs() <= 1.0) {
        return Err(Error::OutOfRange {
            what: "reservoir input",
            value: x,
        });
    }
    Ok(ProjectorTerm {
        qubit: INPUT_QUBIT,
        p0: 0.5 * (1.0 + x),
        p1: 0.5 * (1.0 - x),
    })
}

/// `(0.5 (<Z_l> + 1))_l`, the population of `|0>` on each qubit.
pub fn reservoir_row(state: &Statevector) -> Vec<f64> {
    (0..state.n_qubits())
        .map(|l| 0.5 * (state.z_expectation(l).expect("qubit in range") + 1.0))
        .collect()
}

/// A fixed random Ising reservoir driven by the Floquet schedule.
#[derive(Debug, Clone)]
pub struct Reservoir {
    schedule: FloquetSchedule,
    base: Vec<f64>,
    noise_scale: f64,
    noise_sigma: f64,
    sample_frames: usize,
}

impl Reservoir {
    pub fn new(
        schedule: FloquetSchedule,
        base: Vec<f64>,
        noise_scale: f64,
        noise_sigma: f64,
    ) -> Result<Self> {
        // Validates lengths and finiteness once.
        NoiseSpec::uniform(base.clone(), noise_scale)?.with_sigma(noise_sigma)?;
        if base.len() != schedule.h1_template().term_count() {
            return Err(Error::LengthMismatch {
                what: "reservoir coefficients",
                expected: schedule.h1_template().term_count(),
                actual: base.len(),
            });
        }
        let sample_frames = 2 * schedule.frames_per_half_period();
        Ok(Self {
            schedule,
            base,
            noise_scale,
            noise_sigma,
            sample_frames,
        })
    }

    /// Base coefficients drawn uniformly from `[-1, 1]`.
    pub fn random(
        schedule: FloquetSchedule,
        noise_scale: f64,
        noise_sigma: f64,
        rng: &mut RngStream,
    ) -> Result<Self> {
        let base = (0..schedule.h1_template().term_count())
            .map(|_| rng.uniform(-1.0, 1.0))
            .collect();
        Self::new(schedule, base, noise_scale, noise_sigma)
    }

    /// Steps per sample; every sample restarts from `|0...0>` at `t = 0`.
    /// Defaults to one full Floquet period.
    pub fn with_sample_frames(mut self, sample_frames: usize) -> Result<Self> {
        if sample_frames == 0 {
            return Err(Error::OutOfRange {
                what: "sample_frames",
                value: 0.0,
            });
        }
        self.sample_frames = sample_frames;
        Ok(self)
    }

    pub fn sample_frames(&self) -> usize {
        self.sample_frames
    }

    pub fn schedule(&self) -> &FloquetSchedule {
        &self.schedule
    }

    pub fn base(&self) -> &[f64] {
        &self.base
    }

    pub fn noise_spec(&self, mode: Mode) -> NoiseSpec {
        let spec = match mode {
            Mode::Noiseless => NoiseSpec::noiseless(self.base.clone()),
            Mode::Qtcc => NoiseSpec::uniform(self.base.clone(), self.noise_scale),
        };
        spec.and_then(|s| s.with_sigma(self.noise_sigma))
            .expect("validated on construction")
    }
}

/// Drives the reservoir with one input value per frame and records one
/// feature row per step.
///
/// The input is cut into samples of `sample_frames` consecutive steps. Each
/// sample starts from `|0...0>` at the beginning of a Floquet period; frame
/// `k` of the sample adds `input_operator(x)` to the branch Hamiltonian
/// active in that frame, evolves one frame and stores [`reservoir_row`].
/// Rows are ordered by (sample, frame), i.e. by input step.
pub fn harvest_features(
    inputs: &[f64],
    reservoir: &Reservoir,
    mode: Mode,
    rng: &mut RngStream,
) -> Result<DMatrix<f64>> {
    if inputs.is_empty() {
        return Err(Error::Empty("input sequence"));
    }
    let injections = inputs
        .iter()
        .map(|&x| input_operator(x))
        .collect::<Result<Vec<_>>>()?;
    let schedule = &reservoir.schedule;
    let n_q = schedule.n_qubits();
    let frames = schedule.frames_per_half_period();
    let spec = reservoir.noise_spec(mode);
    let start = Statevector::zero(n_q)?;

    let mut rows = DMatrix::<f64>::zeros(inputs.len(), n_q);
    for (sample, chunk) in injections.chunks(reservoir.sample_frames).enumerate() {
        let offset = sample * reservoir.sample_frames;
        floquet_propagate_driven(
            &start,
            schedule,
            &spec,
            chunk.len().div_ceil(frames),
            rng,
            |k| chunk.get(k).copied(),
            |frame| {
                if frame.index < chunk.len() {
                    for (l, v) in reservoir_row(frame.state).into_iter().enumerate() {
                        rows[(offset + frame.index, l)] = v;
                    }
                }
            },
        )?;
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::floquet::ising_template;

    fn reservoir(half_period: f64, seed: u64) -> Reservoir {
        let schedule =
            FloquetSchedule::new(ising_template(4).unwrap(), half_period, 10, 0.001).unwrap();
        Reservoir::random(schedule, 0.1, 1.0 / 3.0, &mut RngStream::from_seed(seed)).unwrap()
    }

    #[test]
    fn input_operator_endpoints() {
        let t = input_operator(1.0).unwrap();
        assert_eq!((t.qubit, t.p0, t.p1), (0, 1.0, 0.0));
        let t = input_operator(-1.0).unwrap();
        assert_eq!((t.p0, t.p1), (0.0, 1.0));
        let t = input_operator(0.0).unwrap();
        assert_eq!((t.p0, t.p1), (0.5, 0.5));
        assert!(input_operator(1.5).is_err());
        assert!(input_operator(f64::NAN).is_err());
    }

    #[test]
    fn initial_row_is_all_ones() {
        assert_eq!(reservoir_row(&Statevector::zero(4).unwrap()), vec![1.0; 4]);
    }

    #[test]
    fn rows_bounded() {
        let r = reservoir(1.0, 3);
        let inputs: Vec<f64> = (0..37).map(|k| (k as f64 * 0.4).sin()).collect();
        for mode in [Mode::Noiseless, Mode::Qtcc] {
            let v = harvest_features(&inputs, &r, mode, &mut RngStream::from_seed(1)).unwrap();
            assert_eq!(v.shape(), (37, 4));
            assert!(v.iter().all(|x| (-1e-12..=1.0 + 1e-12).contains(x)));
        }
    }

    #[test]
    fn frozen_dynamics() {
        let r = reservoir(1e-11, 3);
        let inputs = vec![0.7; 20];
        let v =
            harvest_features(&inputs, &r, Mode::Noiseless, &mut RngStream::from_seed(1)).unwrap();
        assert!(v.iter().all(|x| (x - 1.0).abs() < 1e-8));
    }

    #[test]
    fn noiseless_ignores_rng_and_qtcc_draws() {
        let r = reservoir(1.0, 3);
        let inputs = vec![0.2; 25];
        let mut a = RngStream::from_seed(1);
        let mut b = RngStream::from_seed(2);
        let va = harvest_features(&inputs, &r, Mode::Noiseless, &mut a).unwrap();
        let vb = harvest_features(&inputs, &r, Mode::Noiseless, &mut b).unwrap();
        assert_eq!(va, vb);
        assert_eq!(a.draws(), 0);

        let vq = harvest_features(&inputs, &r, Mode::Qtcc, &mut a).unwrap();
        assert!(a.draws() > 0);
        assert_ne!(va, vq);
    }

    #[test]
    fn samples_restart_from_zero_state() {
        let r = reservoir(1.0, 4).with_sample_frames(10).unwrap();
        let inputs: Vec<f64> = (0..30).map(|k| if k < 10 { 0.5 } else { -0.3 }).collect();
        let v =
            harvest_features(&inputs, &r, Mode::Noiseless, &mut RngStream::from_seed(0)).unwrap();
        let alone = harvest_features(
            &inputs[10..20],
            &r,
            Mode::Noiseless,
            &mut RngStream::from_seed(0),
        )
        .unwrap();
        assert_eq!(v.rows(10, 10), alone.rows(0, 10));
        assert_eq!(v.rows(10, 10), v.rows(20, 10));
        assert!(r.clone().with_sample_frames(0).is_err());
    }
}
