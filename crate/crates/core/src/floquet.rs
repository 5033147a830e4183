//! Two-branch Floquet schedule and Gaussian coefficient noise.
//!
//! Within each period `2T` the register first evolves for `T` under the
//! transverse drive `sum_j 0.5 (1 - d) X_j`, then for `T` under the Ising
//! Hamiltonian `H1`. Only `H1` carries noise: each coefficient is drawn as
//! `theta0_i + thetar_i * g` with `g ~ N(0, sigma)`, `sigma = 1/3`.
//! Each half period is split into frames of length `T / frames`; frames are
//! half-open intervals, so a boundary instant belongs to the later branch.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::{IsingHamiltonian, Pauli, ProjectorTerm, Propagator, Statevector};
use crate::rng::RngStream;

pub const DEFAULT_DETUNING: f64 = 0.001;
pub const NOISE_SIGMA: f64 = 1.0 / 3.0;

/// Noiseless propagation versus noisy time-crystal propagation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Noiseless,
    Qtcc,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Noiseless => "noiseless",
            Mode::Qtcc => "qtcc",
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "noiseless" => Ok(Mode::Noiseless),
            "qtcc" => Ok(Mode::Qtcc),
            other => Err(Error::InvalidArgument(format!("unknown mode `{other}`"))),
        }
    }
}

/// `sum_j 0.5 (1 - d) X_j`.
pub fn drive_hamiltonian(n_qubits: usize, d: f64) -> Result<IsingHamiltonian> {
    if !(0.0..=1.0).contains(&d) {
        return Err(Error::OutOfRange {
            what: "d",
            value: d,
        });
    }
    let mut h = IsingHamiltonian::new(n_qubits)?;
    for q in 0..n_qubits {
        h.add_one_body(q, Pauli::X, 0.5 * (1.0 - d))?;
    }
    Ok(h)
}

/// All-to-all Ising structure with zero coefficients.
///
/// Coefficient layout: `Z_0..Z_{n-1}`, then `X_0..X_{n-1}`, then `Z_a Z_b`
/// for `a < b` in lexicographic order.
pub fn ising_template(n_qubits: usize) -> Result<IsingHamiltonian> {
    let mut h = IsingHamiltonian::new(n_qubits)?;
    for q in 0..n_qubits {
        h.add_one_body(q, Pauli::Z, 0.0)?;
    }
    for q in 0..n_qubits {
        h.add_one_body(q, Pauli::X, 0.0)?;
    }
    for a in 0..n_qubits {
        for b in a + 1..n_qubits {
            h.add_two_body(a, b, 0.0)?;
        }
    }
    Ok(h)
}

/// Index of the `Z_q` one-body coefficient in the [`ising_template`] layout.
pub fn z_field_index(qubit: usize) -> usize {
    qubit
}

/// Base coefficients and per-term noise amplitudes for `H1`.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSpec {
    base: Vec<f64>,
    amplitudes: Vec<f64>,
    sigma: f64,
}

impl NoiseSpec {
    pub fn new(base: Vec<f64>, amplitudes: Vec<f64>) -> Result<Self> {
        if base.len() != amplitudes.len() {
            return Err(Error::LengthMismatch {
                what: "noise amplitudes",
                expected: base.len(),
                actual: amplitudes.len(),
            });
        }
        if base.iter().chain(&amplitudes).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("noise specification"));
        }
        Ok(Self {
            base,
            amplitudes,
            sigma: NOISE_SIGMA,
        })
    }

    pub fn noiseless(base: Vec<f64>) -> Result<Self> {
        let n = base.len();
        Self::new(base, vec![0.0; n])
    }

    /// Every term gets amplitude `scale`.
    pub fn uniform(base: Vec<f64>, scale: f64) -> Result<Self> {
        let n = base.len();
        Self::new(base, vec![scale; n])
    }

    pub fn with_sigma(mut self, sigma: f64) -> Result<Self> {
        if !(sigma.is_finite() && sigma >= 0.0) {
            return Err(Error::OutOfRange {
                what: "noise sigma",
                value: sigma,
            });
        }
        self.sigma = sigma;
        Ok(self)
    }

    pub fn base(&self) -> &[f64] {
        &self.base
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn len(&self) -> usize {
        self.base.len()
    }

    pub fn is_empty(&self) -> bool {
        self.base.is_empty()
    }

    pub fn is_noiseless(&self) -> bool {
        self.amplitudes.iter().all(|&a| a == 0.0)
    }
}

/// Instantiates `template` with coefficients `theta0 + thetar * N(0, sigma)`.
///
/// The noiseless spec returns the base coefficients exactly and draws nothing
/// from `rng`; otherwise exactly one variate is drawn per term.
pub fn sample_noisy_h1(
    spec: &NoiseSpec,
    template: &IsingHamiltonian,
    rng: &mut RngStream,
) -> Result<IsingHamiltonian> {
    if spec.len() != template.term_count() {
        return Err(Error::LengthMismatch {
            what: "noise specification",
            expected: template.term_count(),
            actual: spec.len(),
        });
    }
    if spec.is_noiseless() {
        return template.with_coefficients(&spec.base);
    }
    let coefficients: Vec<f64> = spec
        .base
        .iter()
        .zip(&spec.amplitudes)
        .map(|(b, a)| b + a * rng.gaussian(spec.sigma))
        .collect();
    template.with_coefficients(&coefficients)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Drive,
    H1,
}

/// Drive/`H1` alternation with a fixed half period and frame count.
#[derive(Debug, Clone)]
pub struct FloquetSchedule {
    half_period: f64,
    d: f64,
    frames_per_half_period: usize,
    resample_per_frame: bool,
    h1_template: IsingHamiltonian,
    drive: IsingHamiltonian,
    drive_frame: Propagator,
}

impl FloquetSchedule {
    pub fn new(
        h1_template: IsingHamiltonian,
        half_period: f64,
        frames_per_half_period: usize,
        d: f64,
    ) -> Result<Self> {
        if !(half_period.is_finite() && half_period > 0.0) {
            return Err(Error::OutOfRange {
                what: "half_period",
                value: half_period,
            });
        }
        if frames_per_half_period == 0 {
            return Err(Error::OutOfRange {
                what: "frames_per_half_period",
                value: 0.0,
            });
        }
        let drive = drive_hamiltonian(h1_template.n_qubits(), d)?;
        let dt = half_period / frames_per_half_period as f64;
        let drive_frame = Propagator::new(&drive, dt)?;
        Ok(Self {
            half_period,
            d,
            frames_per_half_period,
            resample_per_frame: false,
            h1_template,
            drive,
            drive_frame,
        })
    }

    /// Draw fresh `H1` noise for every frame instead of once per half period.
    pub fn with_resample_per_frame(mut self, on: bool) -> Self {
        self.resample_per_frame = on;
        self
    }

    pub fn n_qubits(&self) -> usize {
        self.h1_template.n_qubits()
    }

    pub fn half_period(&self) -> f64 {
        self.half_period
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn frames_per_half_period(&self) -> usize {
        self.frames_per_half_period
    }

    pub fn resample_per_frame(&self) -> bool {
        self.resample_per_frame
    }

    pub fn frame_duration(&self) -> f64 {
        self.half_period / self.frames_per_half_period as f64
    }

    pub fn h1_template(&self) -> &IsingHamiltonian {
        &self.h1_template
    }

    pub fn drive(&self) -> &IsingHamiltonian {
        &self.drive
    }

    /// Branch active during half period `index` (0-based).
    pub fn branch(index: usize) -> Branch {
        if index.is_multiple_of(2) {
            Branch::Drive
        } else {
            Branch::H1
        }
    }
}

/// What an observer sees after each frame.
#[derive(Debug)]
pub struct Frame<'a> {
    /// Frame counter across the whole propagation.
    pub index: usize,
    pub half_period: usize,
    pub branch: Branch,
    /// Hamiltonian that generated this frame, including any injected term.
    pub hamiltonian: &'a IsingHamiltonian,
    pub state: &'a Statevector,
}

/// Runs `n_half_periods` half periods starting with the drive branch,
/// calling `observer` after every frame.
pub fn floquet_propagate<F>(
    state: &Statevector,
    schedule: &FloquetSchedule,
    spec: &NoiseSpec,
    n_half_periods: usize,
    rng: &mut RngStream,
    observer: F,
) -> Result<Statevector>
where
    F: FnMut(&Frame<'_>),
{
    floquet_propagate_driven(
        state,
        schedule,
        spec,
        n_half_periods,
        rng,
        |_| None,
        observer,
    )
}

/// Like [`floquet_propagate`], but `injection(frame_index)` may add a
/// projector term to whichever branch Hamiltonian is active for that frame.
pub fn floquet_propagate_driven<I, F>(
    state: &Statevector,
    schedule: &FloquetSchedule,
    spec: &NoiseSpec,
    n_half_periods: usize,
    rng: &mut RngStream,
    mut injection: I,
    mut observer: F,
) -> Result<Statevector>
where
    I: FnMut(usize) -> Option<ProjectorTerm>,
    F: FnMut(&Frame<'_>),
{
    if n_half_periods == 0 {
        return Err(Error::OutOfRange {
            what: "n_half_periods",
            value: 0.0,
        });
    }
    if state.n_qubits() != schedule.n_qubits() {
        return Err(Error::QubitMismatch {
            expected: schedule.n_qubits(),
            actual: state.n_qubits(),
        });
    }
    if spec.len() != schedule.h1_template.term_count() {
        return Err(Error::LengthMismatch {
            what: "noise specification",
            expected: schedule.h1_template.term_count(),
            actual: spec.len(),
        });
    }
    let dt = schedule.frame_duration();
    let frames = schedule.frames_per_half_period;
    let mut psi = state.clone();
    let mut index = 0usize;

    for half in 0..n_half_periods {
        let branch = FloquetSchedule::branch(half);
        let mut active = match branch {
            Branch::Drive => schedule.drive.clone(),
            Branch::H1 => sample_noisy_h1(spec, &schedule.h1_template, rng)?,
        };
        let mut cached: Option<Propagator> = match branch {
            Branch::Drive => Some(schedule.drive_frame.clone()),
            Branch::H1 => None,
        };

        for frame in 0..frames {
            if branch == Branch::H1 && schedule.resample_per_frame && frame > 0 {
                active = sample_noisy_h1(spec, &schedule.h1_template, rng)?;
                cached = None;
            }
            match injection(index) {
                Some(term) => {
                    let h = active.with_projector(term)?;
                    Propagator::new(&h, dt)?.apply(&mut psi)?;
                    observer(&Frame {
                        index,
                        half_period: half,
                        branch,
                        hamiltonian: &h,
                        state: &psi,
                    });
                }
                None => {
                    let u = match &cached {
                        Some(u) => u,
                        None => cached.insert(Propagator::new(&active, dt)?),
                    };
                    u.apply(&mut psi)?;
                    observer(&Frame {
                        index,
                        half_period: half,
                        branch,
                        hamiltonian: &active,
                        state: &psi,
                    });
                }
            }
            index += 1;
        }
    }
    Ok(psi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    #[test]
    fn drive_coefficients() {
        let h = drive_hamiltonian(1, 0.0).unwrap();
        assert_eq!(h.one_body().len(), 1);
        assert_eq!(h.one_body()[0].coefficient, 0.5);
        assert_eq!(h.one_body()[0].axis, Pauli::X);

        let h = drive_hamiltonian(4, 0.001).unwrap();
        assert_eq!(h.one_body().len(), 4);
        assert!(h.two_body().is_empty());
        for t in h.one_body() {
            assert!((t.coefficient - 0.4995).abs() < 1e-15);
        }

        let h = drive_hamiltonian(2, 1.0).unwrap();
        assert!(h.one_body().iter().all(|t| t.coefficient == 0.0));

        assert!(drive_hamiltonian(2, -0.1).is_err());
    }

    #[test]
    fn template_layout() {
        let h = ising_template(4).unwrap();
        assert_eq!(h.term_count(), 4 + 4 + 6);
        assert_eq!(h.one_body()[z_field_index(2)].axis, Pauli::Z);
        assert_eq!(h.one_body()[z_field_index(2)].qubit, 2);
    }

    #[test]
    fn noiseless_sampling_is_exact_and_silent() {
        let template = ising_template(2).unwrap();
        let base = vec![0.1, -0.2, 0.3, 0.4, -0.5];
        let spec = NoiseSpec::noiseless(base.clone()).unwrap();
        let mut rng = RngStream::from_seed(1);
        let h = sample_noisy_h1(&spec, &template, &mut rng).unwrap();
        assert_eq!(h.coefficients(), base);
        assert_eq!(rng.draws(), 0);
    }

    #[test]
    fn sampling_rejects_length_mismatch() {
        let template = ising_template(2).unwrap();
        let spec = NoiseSpec::noiseless(vec![0.0; 3]).unwrap();
        let mut rng = RngStream::from_seed(1);
        assert!(matches!(
            sample_noisy_h1(&spec, &template, &mut rng),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(NoiseSpec::new(vec![0.0; 2], vec![0.0; 3]).is_err());
    }

    fn zero_spec(schedule: &FloquetSchedule) -> NoiseSpec {
        NoiseSpec::noiseless(vec![0.0; schedule.h1_template().term_count()]).unwrap()
    }

    #[test]
    fn observer_fires_once_per_frame() {
        let schedule = FloquetSchedule::new(ising_template(2).unwrap(), 1.0, 7, 0.001).unwrap();
        let spec = zero_spec(&schedule);
        let mut count = 0;
        let mut rng = RngStream::from_seed(0);
        floquet_propagate(
            &Statevector::zero(2).unwrap(),
            &schedule,
            &spec,
            2,
            &mut rng,
            |_| count += 1,
        )
        .unwrap();
        assert_eq!(count, 14);
    }

    #[test]
    fn vanishing_half_period_freezes_state() {
        let mut template = ising_template(2).unwrap();
        template
            .set_coefficients(&[0.3, -0.4, 0.9, 0.2, 1.0])
            .unwrap();
        let schedule = FloquetSchedule::new(template.clone(), 1e-9, 10, 0.001).unwrap();
        let spec = NoiseSpec::noiseless(template.coefficients()).unwrap();
        let mut start = Statevector::zero(2).unwrap();
        start.apply_ry(0, 0.8).unwrap();
        let mut rng = RngStream::from_seed(0);
        let out = floquet_propagate(&start, &schedule, &spec, 4, &mut rng, |_| {}).unwrap();
        for (a, b) in out.amplitudes().iter().zip(start.amplitudes()) {
            assert!((a - b).norm() < 1e-8);
        }
    }

    #[test]
    fn z_half_period_returns_plus_state() {
        // Drive d = 1 is the zero operator; H1 = Z0 for T = pi gives
        // exp(-i pi Z)|+> = -|+>.
        let mut template = IsingHamiltonian::new(1).unwrap();
        template.add_one_body(0, Pauli::Z, 1.0).unwrap();
        let schedule = FloquetSchedule::new(template, PI, 1, 1.0).unwrap();
        let spec = NoiseSpec::noiseless(vec![1.0]).unwrap();
        let plus = Statevector::from_amplitudes(vec![Complex64::new(1.0, 0.0); 2]).unwrap();
        let mut rng = RngStream::from_seed(0);
        let out = floquet_propagate(&plus, &schedule, &spec, 2, &mut rng, |_| {}).unwrap();
        let overlap: Complex64 = out
            .amplitudes()
            .iter()
            .zip(plus.amplitudes())
            .map(|(a, b)| b.conj() * a)
            .sum();
        assert!((overlap.norm() - 1.0).abs() < 1e-12);
        // Closed form for the H1 branch alone: phases e^{-i pi} on both
        // components.
        assert!((out.amplitudes()[0] - Complex64::new(-(0.5f64.sqrt()), 0.0)).norm() < 1e-12);
    }

    #[test]
    fn one_draw_per_h1_half_period() {
        let template = ising_template(2).unwrap();
        let schedule = FloquetSchedule::new(template, 1.0, 5, 0.001).unwrap();
        let spec = NoiseSpec::uniform(vec![0.5; 5], 1.0).unwrap();
        let mut seen: Vec<(usize, Vec<f64>)> = Vec::new();
        let mut rng = RngStream::from_seed(9);
        floquet_propagate(
            &Statevector::zero(2).unwrap(),
            &schedule,
            &spec,
            4,
            &mut rng,
            |f| {
                if f.branch == Branch::H1 {
                    seen.push((f.half_period, f.hamiltonian.coefficients()));
                }
            },
        )
        .unwrap();
        assert_eq!(seen.len(), 10);
        for chunk in seen.chunks(5) {
            assert!(chunk
                .iter()
                .all(|(h, c)| *h == chunk[0].0 && *c == chunk[0].1));
        }
        assert_ne!(seen[0].1, seen[5].1);
        assert_eq!(rng.draws(), 10);
    }

    #[test]
    fn per_frame_resampling_flag() {
        let schedule = FloquetSchedule::new(ising_template(2).unwrap(), 1.0, 5, 0.001)
            .unwrap()
            .with_resample_per_frame(true);
        let spec = NoiseSpec::uniform(vec![0.5; 5], 1.0).unwrap();
        let mut rng = RngStream::from_seed(9);
        let mut coeffs = Vec::new();
        floquet_propagate(
            &Statevector::zero(2).unwrap(),
            &schedule,
            &spec,
            2,
            &mut rng,
            |f| {
                if f.branch == Branch::H1 {
                    coeffs.push(f.hamiltonian.coefficients());
                }
            },
        )
        .unwrap();
        assert_eq!(rng.draws(), 25);
        assert_ne!(coeffs[0], coeffs[1]);
    }

    #[test]
    fn rejects_zero_half_periods() {
        let schedule = FloquetSchedule::new(ising_template(1).unwrap(), 1.0, 2, 0.0).unwrap();
        let spec = zero_spec(&schedule);
        let mut rng = RngStream::from_seed(0);
        assert!(floquet_propagate(
            &Statevector::zero(1).unwrap(),
            &schedule,
            &spec,
            0,
            &mut rng,
            |_| {}
        )
        .is_err());
        assert!(FloquetSchedule::new(ising_template(1).unwrap(), 0.0, 2, 0.0).is_err());
        assert!(FloquetSchedule::new(ising_template(1).unwrap(), 1.0, 0, 0.0).is_err());
    }
}
