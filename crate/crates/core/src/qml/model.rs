//! Layered QNN and VQKAN models on the Floquet substrate.
//!
//! Parameter vector layout (flat, as seen by the optimizer):
//!
//! 1. `H1` coefficients for every layer, `n_layers * 14` values in the
//!    [`ising_template`] order (`Z_q` fields, `X_q` fields, `Z_a Z_b`).
//! 2. VQKAN only: spline coefficients for every layer and ordered qubit pair
//!    `(j, k)`, `n_layers * 16 * n_basis` values, layer-major then `j`, `k`.
//! 3. Readout affine `a`, `b`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::floquet::{
    floquet_propagate, ising_template, z_field_index, FloquetSchedule, Mode, NoiseSpec,
};
use crate::qml::encoding::{feature_readout, parabolic_encode, EncodedInput, QML_QUBITS};
use crate::qml::spline::{vqkan_angle, BSplineBasis};
use crate::quantum::PauliString;
use crate::rng::RngStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Qnn,
    Vqkan,
}

impl ModelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Qnn => "qnn",
            ModelKind::Vqkan => "vqkan",
        }
    }
}

/// Output of one forward pass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Forward {
    pub prediction: f64,
    pub clamp_events: usize,
}

/// Structure of a QNN or VQKAN model; trainable values live outside in a
/// flat parameter vector.
#[derive(Debug, Clone)]
pub struct ModelSpec {
    kind: ModelKind,
    n_layers: usize,
    schedule: FloquetSchedule,
    basis: BSplineBasis,
    noise_scale: f64,
    noise_sigma: f64,
    observable: Vec<PauliString>,
}

impl ModelSpec {
    pub fn new(
        kind: ModelKind,
        n_layers: usize,
        schedule: FloquetSchedule,
        basis: BSplineBasis,
        noise_scale: f64,
        noise_sigma: f64,
    ) -> Result<Self> {
        if n_layers == 0 {
            return Err(Error::OutOfRange {
                what: "n_layers",
                value: 0.0,
            });
        }
        if schedule.n_qubits() != QML_QUBITS {
            return Err(Error::QubitMismatch {
                expected: QML_QUBITS,
                actual: schedule.n_qubits(),
            });
        }
        if schedule.h1_template() != &ising_template(QML_QUBITS)? {
            return Err(Error::InvalidArgument(
                "model schedule must use the Ising H1 template".into(),
            ));
        }
        // Validates the noise parameters.
        NoiseSpec::uniform(vec![0.0], noise_scale)?.with_sigma(noise_sigma)?;
        let observable = vec![
            PauliString::parse("ZZII", 1.0)?,
            PauliString::parse("IIZZ", 1.0)?,
        ];
        Ok(Self {
            kind,
            n_layers,
            schedule,
            basis,
            noise_scale,
            noise_sigma,
            observable,
        })
    }

    /// Two layers, `T = 1`, ten frames, `d = 0.001`, cubic splines on
    /// five cells over `[0, 0.25]`, `eta = 0.1`.
    pub fn standard(kind: ModelKind) -> Result<Self> {
        let schedule = FloquetSchedule::new(
            ising_template(QML_QUBITS)?,
            1.0,
            10,
            crate::floquet::DEFAULT_DETUNING,
        )?;
        let basis = BSplineBasis::new(0.0, 0.25, 5, 3)?;
        Self::new(kind, 2, schedule, basis, 0.1, crate::floquet::NOISE_SIGMA)
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn n_layers(&self) -> usize {
        self.n_layers
    }

    pub fn schedule(&self) -> &FloquetSchedule {
        &self.schedule
    }

    pub fn basis(&self) -> &BSplineBasis {
        &self.basis
    }

    pub fn observable(&self) -> &[PauliString] {
        &self.observable
    }

    fn h1_len(&self) -> usize {
        self.schedule.h1_template().term_count()
    }

    fn spline_len_per_layer(&self) -> usize {
        match self.kind {
            ModelKind::Qnn => 0,
            ModelKind::Vqkan => QML_QUBITS * QML_QUBITS * self.basis.n_basis(),
        }
    }

    /// Search-space dimension.
    pub fn n_params(&self) -> usize {
        self.n_layers * (self.h1_len() + self.spline_len_per_layer()) + 2
    }

    fn h1_params<'a>(&self, params: &'a [f64], layer: usize) -> &'a [f64] {
        let n = self.h1_len();
        &params[layer * n..(layer + 1) * n]
    }

    fn spline_params<'a>(&self, params: &'a [f64], layer: usize, j: usize, k: usize) -> &'a [f64] {
        let nb = self.basis.n_basis();
        let start = self.n_layers * self.h1_len()
            + layer * self.spline_len_per_layer()
            + (j * QML_QUBITS + k) * nb;
        &params[start..start + nb]
    }

    fn readout(&self, params: &[f64]) -> (f64, f64) {
        let n = params.len();
        (params[n - 2], params[n - 1])
    }

    /// `H1` fields uniform on `[-0.1, 0.1]`, spline coefficients 0, `a = b = 1`.
    pub fn initial_params(&self, rng: &mut RngStream) -> Vec<f64> {
        let mut p = Vec::with_capacity(self.n_params());
        for _ in 0..self.n_layers * self.h1_len() {
            p.push(rng.uniform(-0.1, 0.1));
        }
        p.extend(std::iter::repeat_n(
            0.0,
            self.n_layers * self.spline_len_per_layer(),
        ));
        p.extend([1.0, 1.0]);
        p
    }

    /// Human-readable label per parameter, in vector order.
    pub fn param_names(&self) -> Vec<String> {
        let mut names = Vec::with_capacity(self.n_params());
        let template = self.schedule.h1_template();
        for layer in 0..self.n_layers {
            for t in template.one_body() {
                names.push(format!(
                    "layer{layer}.h1.{}{}",
                    t.axis.as_char().to_ascii_lowercase(),
                    t.qubit
                ));
            }
            for t in template.two_body() {
                names.push(format!("layer{layer}.h1.zz{}{}", t.pair.0, t.pair.1));
            }
        }
        if self.kind == ModelKind::Vqkan {
            for layer in 0..self.n_layers {
                for j in 0..QML_QUBITS {
                    for k in 0..QML_QUBITS {
                        for l in 0..self.basis.n_basis() {
                            names.push(format!("layer{layer}.spline.q{j}q{k}.c{l}"));
                        }
                    }
                }
            }
        }
        names.push("readout.a".into());
        names.push("readout.b".into());
        names
    }

    fn check_params(&self, params: &[f64]) -> Result<()> {
        if params.len() != self.n_params() {
            return Err(Error::LengthMismatch {
                what: "model parameters",
                expected: self.n_params(),
                actual: params.len(),
            });
        }
        if params.iter().any(|p| !p.is_finite()) {
            return Err(Error::NonFinite("model parameter"));
        }
        Ok(())
    }

    fn layer_noise(&self, coefficients: Vec<f64>, mode: Mode) -> Result<NoiseSpec> {
        match mode {
            Mode::Noiseless => NoiseSpec::noiseless(coefficients),
            Mode::Qtcc => NoiseSpec::uniform(coefficients, self.noise_scale),
        }?
        .with_sigma(self.noise_sigma)
    }

    /// `<Z0 Z1 + Z2 Z3>` of the final state, before the readout affine.
    pub fn raw_output(
        &self,
        params: &[f64],
        input: &EncodedInput,
        mode: Mode,
        rng: &mut RngStream,
    ) -> Result<(f64, usize)> {
        self.check_params(params)?;
        let mut state = parabolic_encode(input.u())?;
        let mut clamps = 0;
        for layer in 0..self.n_layers {
            let mut coefficients = self.h1_params(params, layer).to_vec();
            if self.kind == ModelKind::Qnn && layer == 0 {
                for (q, u) in input.u().iter().enumerate() {
                    coefficients[z_field_index(q)] += u;
                }
            }
            let spec = self.layer_noise(coefficients, mode)?;
            state = floquet_propagate(&state, &self.schedule, &spec, 2, rng, |_| {})?;

            if self.kind == ModelKind::Vqkan {
                let features = feature_readout(&state)?;
                for j in 0..QML_QUBITS {
                    for k in 0..QML_QUBITS {
                        let (angle, c) = vqkan_angle(
                            &features,
                            self.spline_params(params, layer, j, k),
                            &self.basis,
                        )?;
                        clamps += c;
                        if j == k {
                            state.apply_ry(j, angle)?;
                        } else {
                            state.apply_controlled_ry(j, k, angle)?;
                        }
                    }
                }
            }
        }
        Ok((state.expectation(&self.observable)?, clamps))
    }

    /// Prediction `a <Z0 Z1 + Z2 Z3> + b`.
    pub fn forward(
        &self,
        params: &[f64],
        input: &EncodedInput,
        mode: Mode,
        rng: &mut RngStream,
    ) -> Result<Forward> {
        let (raw, clamp_events) = self.raw_output(params, input, mode, rng)?;
        let (a, b) = self.readout(params);
        Ok(Forward {
            prediction: a * raw + b,
            clamp_events,
        })
    }
}
