use crate::error::{Error, Result};
use crate::quantum::Statevector;
use crate::rng::RngStream;

/// Register size of the QNN and VQKAN models.
pub const QML_QUBITS: usize = 4;

/// A point of the fitting problem, stored in the unit cube.
///
/// `u` is the encoded coordinate; the target function sees `x = 2u - 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EncodedInput {
    u: [f64; QML_QUBITS],
}

impl EncodedInput {
    pub fn new(u: [f64; QML_QUBITS]) -> Result<Self> {
        for &v in &u {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::OutOfRange {
                    what: "encoded coordinate",
                    value: v,
                });
            }
        }
        Ok(Self { u })
    }

    pub fn u(&self) -> &[f64; QML_QUBITS] {
        &self.u
    }

    pub fn x(&self) -> [f64; QML_QUBITS] {
        self.u.map(|v| 2.0 * v - 1.0)
    }
}

/// `n` points drawn uniformly from `[lo, hi]^4`.
pub fn sample_points(n: usize, lo: f64, hi: f64, rng: &mut RngStream) -> Result<Vec<EncodedInput>> {
    if !(0.0 <= lo && lo < hi && hi <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "sampling box [{lo}, {hi}] must satisfy 0 <= lo < hi <= 1"
        )));
    }
    (0..n)
        .map(|_| EncodedInput::new(std::array::from_fn(|_| rng.uniform(lo, hi))))
        .collect()
}

/// `prod_j Ry_j(2 acos(sqrt(u_j))) |0...0>`, so that `0.5 (<Z_j> + 1) = u_j`.
pub fn parabolic_encode(u: &[f64]) -> Result<Statevector> {
    let mut state = Statevector::zero(u.len())?;
    for (j, &v) in u.iter().enumerate() {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::OutOfRange {
                what: "encoded coordinate",
                value: v,
            });
        }
        state.apply_ry(j, 2.0 * v.sqrt().acos())?;
    }
    Ok(state)
}

/// `(0.5 (<Z_i> + 1))_i` on the four-qubit register.
pub fn feature_readout(state: &Statevector) -> Result<[f64; QML_QUBITS]> {
    if state.n_qubits() != QML_QUBITS {
        return Err(Error::QubitMismatch {
            expected: QML_QUBITS,
            actual: state.n_qubits(),
        });
    }
    let mut out = [0.0; QML_QUBITS];
    for (i, slot) in out.iter_mut().enumerate() {
        *slot = 0.5 * (state.z_expectation(i)? + 1.0);
    }
    Ok(out)
}

/// `exp(sin(x0^2 + x1^2) + sin(x2^2 + x3^2))` with `x = 2u - 1`.
pub fn target_function(input: &EncodedInput) -> f64 {
    let x = input.x();
    ((x[0] * x[0] + x[1] * x[1]).sin() + (x[2] * x[2] + x[3] * x[3]).sin()).exp()
}

/// `x / (exp(-x) + 1)`.
pub fn fermi_dirac(x: f64) -> f64 {
    x / ((-x).exp() + 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn encode_extremes() {
        let s = parabolic_encode(&[1.0; 4]).unwrap();
        assert_eq!(feature_readout(&s).unwrap(), [1.0; 4]);
        let s = parabolic_encode(&[0.0; 4]).unwrap();
        for z in (0..4).map(|i| s.z_expectation(i).unwrap()) {
            assert!((z + 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn encode_round_trip() {
        let u = [0.1, 0.25, 0.6, 0.93];
        let back = feature_readout(&parabolic_encode(&u).unwrap()).unwrap();
        for (a, b) in back.iter().zip(&u) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn encode_rejects_out_of_range() {
        assert!(parabolic_encode(&[0.5, 1.2]).is_err());
        assert!(EncodedInput::new([0.0, -0.1, 0.0, 0.0]).is_err());
        assert!(feature_readout(&Statevector::zero(3).unwrap()).is_err());
    }

    #[test]
    fn target_values() {
        let half = EncodedInput::new([0.5; 4]).unwrap();
        assert_eq!(target_function(&half), 1.0);
        let zero = EncodedInput::new([0.0; 4]).unwrap();
        assert!((target_function(&zero) - (2.0 * 2.0f64.sin()).exp()).abs() < 1e-14);
        let a = EncodedInput::new([1.0, 1.0, 0.0, 0.0]).unwrap();
        let b = EncodedInput::new([0.0, 0.0, 1.0, 1.0]).unwrap();
        assert_eq!(target_function(&a), target_function(&b));
    }

    #[test]
    fn fermi_dirac_values() {
        assert_eq!(fermi_dirac(0.0), 0.0);
        // Independent evaluation: 0.25 / (exp(-0.25) + 1) = 0.14054412522144952.
        assert!((fermi_dirac(0.25) - 0.140_544_125_221_449_52).abs() < 1e-15);
        assert!((fermi_dirac(0.25) - 0.25 / ((-0.25f64).exp() + 1.0)).abs() < 1e-16);
        for x in [0.1, 0.7, 2.0, -3.0] {
            let lhs = fermi_dirac(x) + fermi_dirac(-x);
            let rhs = x * (1.0 / ((-x).exp() + 1.0) - 1.0 / (x.exp() + 1.0));
            assert!((lhs - rhs).abs() < 1e-14);
        }
    }

    #[test]
    fn sampled_points_stay_in_box() {
        let mut rng = RngStream::from_seed(2);
        let pts = sample_points(100, 0.0, 0.25, &mut rng).unwrap();
        assert!(pts
            .iter()
            .all(|p| p.u().iter().all(|v| (0.0..0.25).contains(v))));
        assert!(sample_points(1, 0.3, 0.2, &mut rng).is_err());
    }
}
