use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quantum::PauliString;

pub const MAX_QUBITS: usize = 12;

/// Dense statevector over `n_qubits` qubits.
///
/// Qubit `q` is bit `q` of the basis index, so qubit 0 is the least
/// significant bit. Global phase carries no meaning.
#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

pub(crate) fn check_qubit_count(n_qubits: usize) -> Result<()> {
    if (1..=MAX_QUBITS).contains(&n_qubits) {
        Ok(())
    } else {
        Err(Error::QubitCount(n_qubits))
    }
}

impl Statevector {
    /// `|0...0>` on `n_qubits` qubits.
    pub fn zero(n_qubits: usize) -> Result<Self> {
        check_qubit_count(n_qubits)?;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Ok(Self {
            n_qubits,
            amplitudes,
        })
    }

    /// Builds a state from raw amplitudes and normalizes it.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "amplitude count {len} is not a power of two >= 2"
            )));
        }
        let n_qubits = len.trailing_zeros() as usize;
        check_qubit_count(n_qubits)?;
        if amplitudes
            .iter()
            .any(|a| !a.re.is_finite() || !a.im.is_finite())
        {
            return Err(Error::NonFinite("amplitude"));
        }
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidArgument("zero vector".into()));
        }
        Ok(Self {
            n_qubits,
            amplitudes: amplitudes.into_iter().map(|a| a / norm).collect(),
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Probability of each computational basis state.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit < self.n_qubits {
            Ok(())
        } else {
            Err(Error::QubitIndex {
                index: qubit,
                n_qubits: self.n_qubits,
            })
        }
    }

    /// Rotation `exp(-i angle Y / 2)` on `qubit`.
    pub fn apply_ry(&mut self, qubit: usize, angle: f64) -> Result<()> {
        self.check_qubit(qubit)?;
        if !angle.is_finite() {
            return Err(Error::NonFinite("rotation angle"));
        }
        let (s, c) = (angle / 2.0).sin_cos();
        let mask = 1usize << qubit;
        for i in 0..self.amplitudes.len() {
            if i & mask == 0 {
                let a0 = self.amplitudes[i];
                let a1 = self.amplitudes[i | mask];
                self.amplitudes[i] = a0 * c - a1 * s;
                self.amplitudes[i | mask] = a0 * s + a1 * c;
            }
        }
        Ok(())
    }

    /// Ry on `target` conditioned on `control` being `|1>`.
    pub fn apply_controlled_ry(&mut self, control: usize, target: usize, angle: f64) -> Result<()> {
        self.check_qubit(control)?;
        self.check_qubit(target)?;
        if control == target {
            return Err(Error::InvalidArgument(format!(
                "control and target are both qubit {control}"
            )));
        }
        if !angle.is_finite() {
            return Err(Error::NonFinite("rotation angle"));
        }
        let (s, c) = (angle / 2.0).sin_cos();
        let cmask = 1usize << control;
        let tmask = 1usize << target;
        for i in 0..self.amplitudes.len() {
            if i & cmask != 0 && i & tmask == 0 {
                let a0 = self.amplitudes[i];
                let a1 = self.amplitudes[i | tmask];
                self.amplitudes[i] = a0 * c - a1 * s;
                self.amplitudes[i | tmask] = a0 * s + a1 * c;
            }
        }
        Ok(())
    }

    /// `<psi| sum_k c_k P_k |psi>` for a sum of Pauli strings.
    pub fn expectation(&self, observable: &[PauliString]) -> Result<f64> {
        let mut total = Complex64::new(0.0, 0.0);
        let mut scale = 1.0_f64;
        for term in observable {
            if term.n_qubits() != self.n_qubits {
                return Err(Error::QubitMismatch {
                    expected: self.n_qubits,
                    actual: term.n_qubits(),
                });
            }
            total += term.coefficient() * self.pauli_expectation(term);
            scale += term.coefficient().abs();
        }
        if total.im.abs() > 1e-12 * scale {
            return Err(Error::ComplexExpectation(total.im));
        }
        Ok(total.re)
    }

    /// `<psi|P|psi>` for the bare string (coefficient not applied).
    fn pauli_expectation(&self, p: &PauliString) -> Complex64 {
        let (flip, zmask, ycount) = p.masks();
        // Y = i X Z, so the Y count contributes i^ycount.
        let y_phase = match ycount % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
        let mut acc = Complex64::new(0.0, 0.0);
        for (b, amp) in self.amplitudes.iter().enumerate() {
            let sign = if (b & zmask).count_ones() % 2 == 0 {
                1.0
            } else {
                -1.0
            };
            acc += self.amplitudes[b ^ flip].conj() * amp * sign;
        }
        acc * y_phase
    }

    /// `<Z_q>`.
    pub fn z_expectation(&self, qubit: usize) -> Result<f64> {
        self.check_qubit(qubit)?;
        let mask = 1usize << qubit;
        Ok(self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(i, a)| {
                if i & mask == 0 {
                    a.norm_sqr()
                } else {
                    -a.norm_sqr()
                }
            })
            .sum())
    }
}
